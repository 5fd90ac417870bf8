//! Incremental 3-D convex hull.
//!
//! Used at mesh ingestion to extract hull vertices and edge adjacency, and as
//! the convexity oracle when validating user-supplied meshes.

use std::collections::{HashMap, VecDeque};

use crate::{Error, Result, Vec3};

/// Relative tolerance (scaled by the point-cloud extent) below which a point
/// is considered to lie on a face plane.
const REL_PLANE_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct Hull {
    pub vertices: Vec<Vec3>,
    /// Outward-oriented (counter-clockwise seen from outside) triangles.
    pub faces: Vec<[usize; 3]>,
    /// Sorted vertex adjacency along polytope edges: edges shared by two
    /// coplanar triangles are left out.
    pub neighbors: Vec<Vec<usize>>,
    /// Index of each hull vertex in the input point list.
    pub source_indices: Vec<usize>,
    /// Absolute plane tolerance used during construction.
    pub tolerance: f64,
}

#[derive(Debug, Clone, Copy)]
struct Face {
    v: [usize; 3],
    normal: Vec3,
    offset: f64,
    alive: bool,
}

impl Face {
    fn new(points: &[Vec3], v: [usize; 3]) -> Self {
        let [a, b, c] = v.map(|i| points[i]);
        let n = (b - a).cross(&(c - a));
        let len = n.norm();
        let normal = if len > 0.0 { n / len } else { n };
        Face {
            v,
            normal,
            offset: normal.dot(&a),
            alive: true,
        }
    }

    fn distance(&self, p: &Vec3) -> f64 {
        self.normal.dot(p) - self.offset
    }

    fn edges(&self) -> [(usize, usize); 3] {
        let [a, b, c] = self.v;
        [(a, b), (b, c), (c, a)]
    }
}

/// Computes the convex hull of `points`.
///
/// Points closer than the construction tolerance to the current hull are not
/// retained as vertices, so the result holds (numerically) extreme points only.
pub fn convex_hull(points: &[Vec3]) -> Result<Hull> {
    if points.len() < 4 {
        return Err(Error::Hull(format!(
            "need at least 4 points, got {}",
            points.len()
        )));
    }
    if points.iter().any(|p| !p.iter().all(|c| c.is_finite())) {
        return Err(Error::Hull("non-finite coordinate".into()));
    }
    let scale = points
        .iter()
        .flat_map(|p| p.iter().map(|c| c.abs()))
        .fold(0.0_f64, f64::max)
        .max(f64::MIN_POSITIVE);
    let tol = REL_PLANE_TOL * scale;

    let seed = initial_tetrahedron(points, tol)?;
    let mut faces: Vec<Face> = Vec::with_capacity(points.len() * 4);
    let mut edge_face: HashMap<(usize, usize), usize> = HashMap::new();

    let centroid = seed.iter().map(|&i| points[i]).sum::<Vec3>() / 4.0;
    let [i0, i1, i2, i3] = seed;
    for tri in [[i0, i1, i2], [i0, i1, i3], [i0, i2, i3], [i1, i2, i3]] {
        let mut f = Face::new(points, tri);
        if f.distance(&centroid) > 0.0 {
            f = Face::new(points, [tri[0], tri[2], tri[1]]);
        }
        push_face(&mut faces, &mut edge_face, f);
    }

    let mut visible = vec![false; 0];
    let mut queue = VecDeque::new();
    for (pi, p) in points.iter().enumerate() {
        if seed.contains(&pi) {
            continue;
        }
        let mut best = None;
        let mut best_dist = tol;
        for (fi, f) in faces.iter().enumerate() {
            if f.alive {
                let dist = f.distance(p);
                if dist > best_dist {
                    best_dist = dist;
                    best = Some(fi);
                }
            }
        }
        let Some(start) = best else { continue };

        // Connected region of faces that see the point.
        visible.clear();
        visible.resize(faces.len(), false);
        visible[start] = true;
        queue.push_back(start);
        let mut region = Vec::new();
        while let Some(fi) = queue.pop_front() {
            region.push(fi);
            for (a, b) in faces[fi].edges() {
                let Some(&nf) = edge_face.get(&(b, a)) else {
                    return Err(Error::Hull("open hull surface".into()));
                };
                if !visible[nf] && faces[nf].distance(p) > tol {
                    visible[nf] = true;
                    queue.push_back(nf);
                }
            }
        }

        let mut horizon = Vec::new();
        for &fi in &region {
            for (a, b) in faces[fi].edges() {
                let nf = edge_face[&(b, a)];
                if !visible[nf] {
                    horizon.push((a, b));
                }
            }
        }
        for &fi in &region {
            faces[fi].alive = false;
            for e in faces[fi].edges() {
                edge_face.remove(&e);
            }
        }
        for (a, b) in horizon {
            push_face(&mut faces, &mut edge_face, Face::new(points, [a, b, pi]));
        }
    }

    let alive: Vec<&Face> = faces.iter().filter(|f| f.alive).collect();
    if edge_face.len() != alive.len() * 3 {
        return Err(Error::Hull("non-manifold hull surface".into()));
    }

    let mut remap = vec![usize::MAX; points.len()];
    let mut source_indices = Vec::new();
    for f in &alive {
        for &v in &f.v {
            if remap[v] == usize::MAX {
                remap[v] = source_indices.len();
                source_indices.push(v);
            }
        }
    }
    // Deterministic vertex order: by input index.
    source_indices.sort_unstable();
    for (new, &old) in source_indices.iter().enumerate() {
        remap[old] = new;
    }
    let vertices: Vec<Vec3> = source_indices.iter().map(|&i| points[i]).collect();
    let out_faces: Vec<[usize; 3]> = alive.iter().map(|f| f.v.map(|v| remap[v])).collect();

    // Directed edge -> vertex opposite to it in its triangle.
    let mut opposite: HashMap<(usize, usize), usize> = HashMap::with_capacity(out_faces.len() * 3);
    for f in &out_faces {
        for k in 0..3 {
            opposite.insert((f[k], f[(k + 1) % 3]), f[(k + 2) % 3]);
        }
    }
    let euler = vertices.len() as i64 - (opposite.len() / 2) as i64 + out_faces.len() as i64;
    if euler != 2 {
        return Err(Error::Hull(format!(
            "hull surface has Euler characteristic {euler}, expected 2"
        )));
    }

    // Triangulation diagonals inside flat facets are not polytope edges.
    let mut neighbors = vec![Vec::new(); vertices.len()];
    for (&(a, b), &c) in &opposite {
        if a > b {
            continue;
        }
        let d = opposite[&(b, a)];
        let (pa, pb) = (vertices[a], vertices[b]);
        let n = (pb - pa).cross(&(vertices[c] - pa));
        let len = n.norm();
        let flat = len > 0.0 && (n.dot(&(vertices[d] - pa)) / len).abs() <= tol;
        if !flat {
            neighbors[a].push(b);
            neighbors[b].push(a);
        }
    }
    for list in &mut neighbors {
        list.sort_unstable();
    }

    let hull = Hull {
        vertices,
        faces: out_faces,
        neighbors,
        source_indices,
        tolerance: tol,
    };
    let slack = 1e3 * tol;
    if points.iter().any(|p| hull.signed_distance(p) > slack) {
        return Err(Error::Hull("input point left outside the hull".into()));
    }
    Ok(hull)
}

impl Hull {
    /// Maximum signed distance of `p` to the face planes: negative inside,
    /// positive outside (exact outside distance only near faces).
    pub fn signed_distance(&self, p: &Vec3) -> f64 {
        face_planes(&self.vertices, &self.faces)
            .map(|(n, off)| n.dot(p) - off)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Unit outward normals and offsets of the given triangles.
pub fn face_planes<'a>(
    vertices: &'a [Vec3],
    faces: &'a [[usize; 3]],
) -> impl Iterator<Item = (Vec3, f64)> + 'a {
    faces.iter().filter_map(move |f| {
        let [a, b, c] = f.map(|i| vertices[i]);
        let n = (b - a).cross(&(c - a));
        let len = n.norm();
        (len > 0.0).then(|| {
            let n = n / len;
            (n, n.dot(&a))
        })
    })
}

fn push_face(faces: &mut Vec<Face>, edge_face: &mut HashMap<(usize, usize), usize>, f: Face) {
    let idx = faces.len();
    for e in f.edges() {
        edge_face.insert(e, idx);
    }
    faces.push(f);
}

fn initial_tetrahedron(points: &[Vec3], tol: f64) -> Result<[usize; 4]> {
    // Most distant pair among the six axis-extreme points.
    let mut extremes = [0usize; 6];
    for (i, p) in points.iter().enumerate() {
        for axis in 0..3 {
            if p[axis] < points[extremes[2 * axis]][axis] {
                extremes[2 * axis] = i;
            }
            if p[axis] > points[extremes[2 * axis + 1]][axis] {
                extremes[2 * axis + 1] = i;
            }
        }
    }
    let mut pair = (extremes[0], extremes[1]);
    let mut best = -1.0;
    for &a in &extremes {
        for &b in &extremes {
            let d = (points[a] - points[b]).norm_squared();
            if d > best {
                best = d;
                pair = (a, b);
            }
        }
    }
    let (a, b) = pair;
    if best.sqrt() <= tol {
        return Err(Error::Hull("all points coincide".into()));
    }
    let ab = points[b] - points[a];
    let (c, line_dist) = farthest(points, |p| (p - points[a]).cross(&ab).norm() / ab.norm());
    if line_dist <= tol {
        return Err(Error::Hull("points are collinear".into()));
    }
    let n = ab.cross(&(points[c] - points[a])).normalize();
    let (d, plane_dist) = farthest(points, |p| n.dot(&(p - points[a])).abs());
    if plane_dist <= tol {
        return Err(Error::Hull("points are coplanar".into()));
    }
    Ok([a, b, c, d])
}

fn farthest(points: &[Vec3], dist: impl Fn(&Vec3) -> f64) -> (usize, f64) {
    points
        .iter()
        .enumerate()
        .map(|(i, p)| (i, dist(p)))
        .fold((0, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc })
}

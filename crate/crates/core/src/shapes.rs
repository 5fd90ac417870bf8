//! Convex shapes and their support functions.
//!
//! All support functions return a point *minimizing* `<x, d>` over the
//! shape. Meshes use hill-climbing over their vertex adjacency graph,
//! warm-started from a caller-owned vertex hint.

use std::collections::VecDeque;

use nalgebra::linalg::{Cholesky, SymmetricEigen};

use crate::hull::{self, Hull};
use crate::{Error, Mat3, Result, Vec3};

const ORTHONORMAL_TOL: f64 = 1e-9;
const SYMMETRY_TOL: f64 = 1e-12;
const MAX_ELLIPSOID_CONDITION: f64 = 1e8;

/// Rigid placement of a shape: `x_world = rotation * x_local + translation`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose {
    rotation: Mat3,
    translation: Vec3,
}

impl Pose {
    pub fn new(rotation: Mat3, translation: Vec3) -> Result<Self> {
        let err = (rotation.transpose() * rotation - Mat3::identity()).abs().max();
        if !(err <= ORTHONORMAL_TOL) {
            return Err(Error::InvalidPose(format!(
                "rotation not orthonormal (|R^T R - I| = {err:e})"
            )));
        }
        let det = rotation.determinant();
        if !((det - 1.0).abs() <= ORTHONORMAL_TOL) {
            return Err(Error::InvalidPose(format!("rotation determinant {det}")));
        }
        if !translation.iter().all(|c| c.is_finite()) {
            return Err(Error::InvalidPose("non-finite translation".into()));
        }
        Ok(Pose {
            rotation,
            translation,
        })
    }

    pub fn identity() -> Self {
        Pose {
            rotation: Mat3::identity(),
            translation: Vec3::zeros(),
        }
    }

    pub fn from_translation(translation: Vec3) -> Self {
        Pose {
            rotation: Mat3::identity(),
            translation,
        }
    }

    /// Rotation by a rotation vector (axis times angle, radians).
    pub fn from_axis_angle(rotation_vector: Vec3, translation: Vec3) -> Self {
        let rotation = *nalgebra::Rotation3::new(rotation_vector).matrix();
        Pose {
            rotation,
            translation,
        }
    }

    pub fn rotation(&self) -> &Mat3 {
        &self.rotation
    }

    pub fn translation(&self) -> &Vec3 {
        &self.translation
    }

    pub fn translated(&self, offset: &Vec3) -> Self {
        Pose {
            rotation: self.rotation,
            translation: self.translation + offset,
        }
    }

    pub fn transform_point(&self, p: &Vec3) -> Vec3 {
        self.rotation * p + self.translation
    }

    pub fn inverse_transform_point(&self, p: &Vec3) -> Vec3 {
        self.rotation.transpose() * (p - self.translation)
    }
}

impl Default for Pose {
    fn default() -> Self {
        Pose::identity()
    }
}

/// Solid ellipsoid `{x : x^T A x <= 1}`.
#[derive(Debug, Clone)]
pub struct Ellipsoid {
    matrix: Mat3,
    cholesky: Cholesky<f64, nalgebra::U3>,
    max_eigenvalue: f64,
}

impl Ellipsoid {
    /// Builds an ellipsoid from its symmetric positive-definite shape matrix.
    /// Matrices with condition number above 1e8 are rejected.
    pub fn new(matrix: Mat3) -> Result<Self> {
        if !matrix.iter().all(|c| c.is_finite()) {
            return Err(Error::InvalidShape("ellipsoid matrix not finite".into()));
        }
        let asym = (matrix - matrix.transpose()).abs().max();
        if asym > SYMMETRY_TOL {
            return Err(Error::InvalidShape(format!(
                "ellipsoid matrix not symmetric (asymmetry {asym:e})"
            )));
        }
        let eig = SymmetricEigen::new(matrix);
        let lo = eig.eigenvalues.min();
        let hi = eig.eigenvalues.max();
        if !(lo > 0.0) {
            return Err(Error::InvalidShape(
                "ellipsoid matrix not positive definite".into(),
            ));
        }
        if hi / lo > MAX_ELLIPSOID_CONDITION {
            return Err(Error::InvalidShape(format!(
                "ellipsoid too flat (condition number {:e})",
                hi / lo
            )));
        }
        let cholesky = Cholesky::new(matrix)
            .ok_or_else(|| Error::InvalidShape("Cholesky factorization failed".into()))?;
        Ok(Ellipsoid {
            matrix,
            cholesky,
            max_eigenvalue: hi,
        })
    }

    /// Axis-aligned ellipsoid with the given semi-axes (meters).
    pub fn from_semi_axes(semi_axes: Vec3) -> Result<Self> {
        Self::from_semi_axes_rotated(semi_axes, &Mat3::identity())
    }

    /// Ellipsoid with semi-axes along the columns of `rotation`.
    pub fn from_semi_axes_rotated(semi_axes: Vec3, rotation: &Mat3) -> Result<Self> {
        if !semi_axes.iter().all(|&a| a > 0.0 && a.is_finite()) {
            return Err(Error::InvalidShape("semi-axes must be positive".into()));
        }
        let lambda = Mat3::from_diagonal(&semi_axes.map(|a| 1.0 / (a * a)));
        let mut m = rotation * lambda * rotation.transpose();
        // Exact symmetry.
        m = (m + m.transpose()) * 0.5;
        Self::new(m)
    }

    pub fn matrix(&self) -> &Mat3 {
        &self.matrix
    }

    /// `p = -A^{-1} d / sqrt(d^T A^{-1} d)`.
    fn support(&self, d: &Vec3) -> Vec3 {
        let v = self.cholesky.solve(d);
        -v / d.dot(&v).sqrt()
    }

    fn contains(&self, x: &Vec3, tol: f64) -> bool {
        (x.dot(&(self.matrix * x))).sqrt() - 1.0 <= tol * self.max_eigenvalue.sqrt()
    }
}

/// Axis-aligned box centered at the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cuboid {
    half_extents: Vec3,
}

impl Cuboid {
    pub fn new(half_extents: Vec3) -> Result<Self> {
        if !half_extents.iter().all(|&h| h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidShape(
                "box half-extents must be positive".into(),
            ));
        }
        Ok(Cuboid { half_extents })
    }

    pub fn half_extents(&self) -> &Vec3 {
        &self.half_extents
    }

    /// `p_i = -h_i sgn(d_i)` with `sgn(0) = +1`.
    fn support(&self, d: &Vec3) -> Vec3 {
        Vec3::from_fn(|i, _| {
            if d[i] >= 0.0 {
                -self.half_extents[i]
            } else {
                self.half_extents[i]
            }
        })
    }

    fn contains(&self, x: &Vec3, tol: f64) -> bool {
        (0..3).all(|i| x[i].abs() <= self.half_extents[i] + tol)
    }
}

/// Ball centered at the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sphere {
    radius: f64,
}

impl Sphere {
    pub fn new(radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidShape("sphere radius must be positive".into()));
        }
        Ok(Sphere { radius })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }
}

/// Convex polytope given by its vertices and vertex adjacency.
#[derive(Debug, Clone)]
pub struct ConvexMesh {
    vertices: Vec<Vec3>,
    neighbors: Vec<Vec<usize>>,
    /// Hull triangles; empty for meshes with fewer than 4 vertices.
    faces: Vec<[usize; 3]>,
}

impl ConvexMesh {
    /// Validates adjacency (range, symmetry, connectivity) and convexity:
    /// every vertex must lie on the boundary of the hull of the vertex set.
    /// Meshes with 4 or more vertices must be full-dimensional.
    pub fn new(vertices: Vec<Vec3>, neighbors: Vec<Vec<usize>>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::EmptyMesh);
        }
        if neighbors.len() != vertices.len() {
            return Err(Error::InvalidShape(format!(
                "{} adjacency lists for {} vertices",
                neighbors.len(),
                vertices.len()
            )));
        }
        let n = vertices.len();
        for (i, list) in neighbors.iter().enumerate() {
            for &j in list {
                if j >= n {
                    return Err(Error::InvalidShape(format!(
                        "neighbor index {j} of vertex {i} out of range"
                    )));
                }
                if !neighbors[j].contains(&i) {
                    return Err(Error::InvalidShape(format!(
                        "adjacency not symmetric between {i} and {j}"
                    )));
                }
            }
        }
        if !is_connected(&neighbors) {
            return Err(Error::InvalidShape("adjacency graph not connected".into()));
        }
        let faces = if n >= 4 {
            let hull = hull::convex_hull(&vertices)?;
            if let Some(i) = vertices
                .iter()
                .position(|v| hull.signed_distance(v) < -1e3 * hull.tolerance)
            {
                return Err(Error::InvalidShape(format!(
                    "vertex {i} lies strictly inside the hull"
                )));
            }
            // Re-index hull faces onto this mesh's vertex order.
            hull.faces
                .iter()
                .map(|f| f.map(|k| hull.source_indices[k]))
                .collect()
        } else {
            Vec::new()
        };
        Ok(ConvexMesh {
            vertices,
            neighbors,
            faces,
        })
    }

    /// Mesh made of the hull vertices and hull-edge adjacency of `hull`.
    pub fn from_hull(hull: Hull) -> Self {
        ConvexMesh {
            vertices: hull.vertices,
            neighbors: hull.neighbors,
            faces: hull.faces,
        }
    }

    /// Convex hull of an arbitrary point cloud.
    pub fn from_points(points: &[Vec3]) -> Result<Self> {
        Ok(Self::from_hull(hull::convex_hull(points)?))
    }

    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    pub fn neighbors(&self) -> &[Vec<usize>] {
        &self.neighbors
    }

    pub fn faces(&self) -> &[[usize; 3]] {
        &self.faces
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    fn contains(&self, x: &Vec3, tol: f64) -> bool {
        if self.faces.is_empty() {
            let shifted: Vec<Vec3> = self.vertices.iter().map(|v| v - x).collect();
            let (p, _) = crate::simplex::brute_force_min_norm(&shifted);
            return p.norm() <= tol;
        }
        hull::face_planes(&self.vertices, &self.faces).all(|(n, off)| n.dot(x) - off <= tol)
    }
}

fn is_connected(neighbors: &[Vec<usize>]) -> bool {
    let mut seen = vec![false; neighbors.len()];
    let mut queue = VecDeque::from([0]);
    seen[0] = true;
    let mut count = 1;
    while let Some(i) = queue.pop_front() {
        for &j in &neighbors[i] {
            if !seen[j] {
                seen[j] = true;
                count += 1;
                queue.push_back(j);
            }
        }
    }
    count == neighbors.len()
}

#[derive(Debug, Clone)]
pub enum ConvexShape {
    Ellipsoid(Ellipsoid),
    Box(Cuboid),
    Sphere(Sphere),
    Mesh(ConvexMesh),
}

impl ConvexShape {
    pub fn is_mesh(&self) -> bool {
        matches!(self, ConvexShape::Mesh(_))
    }

    /// Whether the local-frame point `x` lies in the shape, up to roughly
    /// `tol` meters.
    pub fn contains(&self, x: &Vec3, tol: f64) -> bool {
        match self {
            ConvexShape::Ellipsoid(e) => e.contains(x, tol),
            ConvexShape::Box(b) => b.contains(x, tol),
            ConvexShape::Sphere(s) => x.norm() <= s.radius + tol,
            ConvexShape::Mesh(m) => m.contains(x, tol),
        }
    }

    pub fn contains_posed(&self, pose: &Pose, x: &Vec3, tol: f64) -> bool {
        self.contains(&pose.inverse_transform_point(x), tol)
    }
}

impl From<Ellipsoid> for ConvexShape {
    fn from(s: Ellipsoid) -> Self {
        ConvexShape::Ellipsoid(s)
    }
}

impl From<Cuboid> for ConvexShape {
    fn from(s: Cuboid) -> Self {
        ConvexShape::Box(s)
    }
}

impl From<Sphere> for ConvexShape {
    fn from(s: Sphere) -> Self {
        ConvexShape::Sphere(s)
    }
}

impl From<ConvexMesh> for ConvexShape {
    fn from(s: ConvexMesh) -> Self {
        ConvexShape::Mesh(s)
    }
}

/// A support point; `vertex_index` is set for meshes only.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupportResult {
    pub point: Vec3,
    pub vertex_index: Option<usize>,
}

fn check_direction(d: &Vec3) -> Result<()> {
    let n2 = d.norm_squared();
    if n2 > 0.0 && n2.is_finite() {
        Ok(())
    } else {
        Err(Error::DegenerateDirection)
    }
}

/// Point of `shape` (local frame) minimizing `<x, d>`. `hint` is the
/// hill-climbing start vertex for meshes and is ignored otherwise.
pub fn support(shape: &ConvexShape, d: &Vec3, hint: Option<usize>) -> Result<SupportResult> {
    check_direction(d)?;
    let point = match shape {
        ConvexShape::Ellipsoid(e) => e.support(d),
        ConvexShape::Box(b) => b.support(d),
        ConvexShape::Sphere(s) => -d * (s.radius / d.norm()),
        ConvexShape::Mesh(m) => return hill_climb(m, d, hint.unwrap_or(0)),
    };
    Ok(SupportResult {
        point,
        vertex_index: None,
    })
}

/// Greedy descent of `<v, d>` over the mesh adjacency graph from `start`.
///
/// Each sweep scans all neighbors of the current vertex and keeps the best
/// strictly improving one; the walk stops when a sweep finds no improvement.
/// On a convex mesh the stopping vertex attains the global minimum value.
pub fn hill_climb(mesh: &ConvexMesh, d: &Vec3, start: usize) -> Result<SupportResult> {
    check_direction(d)?;
    if start >= mesh.vertices.len() {
        return Err(Error::HintOutOfRange {
            hint: start,
            len: mesh.vertices.len(),
        });
    }
    let mut current = start;
    let mut best = mesh.vertices[current].dot(d);
    loop {
        let mut improved = false;
        let from = current;
        for &j in &mesh.neighbors[from] {
            let r = mesh.vertices[j].dot(d);
            if r < best {
                best = r;
                current = j;
                improved = true;
            }
        }
        if !improved {
            break;
        }
    }
    Ok(SupportResult {
        point: mesh.vertices[current],
        vertex_index: Some(current),
    })
}

/// Full scan over all vertices; ties go to the lowest index.
pub fn brute_force_support(mesh: &ConvexMesh, d: &Vec3) -> Result<SupportResult> {
    check_direction(d)?;
    if mesh.vertices.is_empty() {
        return Err(Error::EmptyMesh);
    }
    let mut idx = 0;
    let mut best = mesh.vertices[0].dot(d);
    for (i, v) in mesh.vertices.iter().enumerate().skip(1) {
        let r = v.dot(d);
        if r < best {
            best = r;
            idx = i;
        }
    }
    Ok(SupportResult {
        point: mesh.vertices[idx],
        vertex_index: Some(idx),
    })
}

/// Support of the posed set `R S + t`: `R support(S, R^T d) + t`.
pub fn posed_support(
    shape: &ConvexShape,
    pose: &Pose,
    d: &Vec3,
    hint: Option<usize>,
) -> Result<SupportResult> {
    let local = pose.rotation.transpose() * d;
    let s = support(shape, &local, hint)?;
    Ok(SupportResult {
        point: pose.transform_point(&s.point),
        vertex_index: s.vertex_index,
    })
}

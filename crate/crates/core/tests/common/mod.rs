#![allow(dead_code)]

use gjk_accel::hull::convex_hull;
use gjk_accel::{ConvexMesh, Pose, Vec3};
use nalgebra::{DMatrix, DVector};
use rand::Rng;

pub const MESH_DIR: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/assets/meshes");

pub fn unit_vector<R: Rng + ?Sized>(rng: &mut R) -> Vec3 {
    loop {
        let v = Vec3::from_fn(|_, _| rng.random_range(-1.0..=1.0));
        let n = v.norm();
        if n > 1e-3 && n <= 1.0 {
            return v / n;
        }
    }
}

pub fn random_pose<R: Rng + ?Sized>(rng: &mut R, reach: f64) -> Pose {
    let axis = unit_vector(rng) * rng.random_range(0.0..std::f64::consts::PI);
    let t = Vec3::from_fn(|_, _| rng.random_range(-reach..=reach));
    Pose::from_axis_angle(axis, t)
}

/// Hull of random points in an anisotropic box; the vertex count is at most
/// `max_points`.
pub fn random_polytope<R: Rng + ?Sized>(rng: &mut R, max_points: usize) -> ConvexMesh {
    loop {
        let n = rng.random_range(4..=max_points);
        let scale = Vec3::from_fn(|_, _| rng.random_range(0.05..=1.0));
        let pts: Vec<Vec3> = (0..n)
            .map(|_| Vec3::from_fn(|_, _| rng.random_range(-1.0..=1.0)).component_mul(&scale))
            .collect();
        if let Ok(m) = ConvexMesh::from_points(&pts) {
            return m;
        }
    }
}

/// `n` random points on an ellipsoid surface; every point is a hull vertex.
pub fn ellipsoid_cloud_mesh<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ConvexMesh {
    let scale = Vec3::from_fn(|_, _| rng.random_range(0.1..=1.0));
    let pts: Vec<Vec3> = (0..n).map(|_| unit_vector(rng).component_mul(&scale)).collect();
    ConvexMesh::from_points(&pts).expect("points on an ellipsoid are in convex position")
}

/// Random point of the hull of `vertices` (Dirichlet-like weights).
pub fn hull_sample<R: Rng + ?Sized>(rng: &mut R, vertices: &[Vec3]) -> Vec3 {
    let k = rng.random_range(1..=4.min(vertices.len()));
    let mut w: Vec<f64> = (0..k).map(|_| -rng.random::<f64>().max(1e-300).ln()).collect();
    let s: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= s);
    (0..k).fold(Vec3::zeros(), |acc, i| {
        acc + vertices[rng.random_range(0..vertices.len())] * w[i]
    })
}

/// Point of triangle `abc` closest to the origin (region test on the
/// triangle's Voronoi regions).
pub fn closest_on_triangle(a: &Vec3, b: &Vec3, c: &Vec3) -> Vec3 {
    let p = Vec3::zeros();
    let ab = b - a;
    let ac = c - a;
    let ap = p - a;
    let d1 = ab.dot(&ap);
    let d2 = ac.dot(&ap);
    if d1 <= 0.0 && d2 <= 0.0 {
        return *a;
    }
    let bp = p - b;
    let d3 = ab.dot(&bp);
    let d4 = ac.dot(&bp);
    if d3 >= 0.0 && d4 <= d3 {
        return *b;
    }
    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        return a + ab * (d1 / (d1 - d3));
    }
    let cp = p - c;
    let d5 = ab.dot(&cp);
    let d6 = ac.dot(&cp);
    if d6 >= 0.0 && d5 <= d6 {
        return *c;
    }
    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        return a + ac * (d2 / (d2 - d6));
    }
    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
        return b + (c - b) * ((d4 - d3) / ((d4 - d3) + (d5 - d6)));
    }
    let denom = 1.0 / (va + vb + vc);
    a + ab * (vb * denom) + ac * (vc * denom)
}

/// Distance from the origin to the hull of `points`: 0 when inside,
/// otherwise the closest point over all hull facets.
pub fn hull_distance(points: &[Vec3]) -> f64 {
    let hull = convex_hull(points).expect("full-dimensional point set");
    if hull.signed_distance(&Vec3::zeros()) <= 0.0 {
        return 0.0;
    }
    hull.faces
        .iter()
        .map(|f| {
            closest_on_triangle(&hull.vertices[f[0]], &hull.vertices[f[1]], &hull.vertices[f[2]]).norm()
        })
        .fold(f64::INFINITY, f64::min)
}

/// Distance between two posed polytopes through the hull of all pairwise
/// vertex differences.
pub fn polytope_distance(m1: &ConvexMesh, p1: &Pose, m2: &ConvexMesh, p2: &Pose) -> f64 {
    let v1: Vec<Vec3> = m1.vertices().iter().map(|v| p1.transform_point(v)).collect();
    let v2: Vec<Vec3> = m2.vertices().iter().map(|v| p2.transform_point(v)).collect();
    let diffs: Vec<Vec3> = v1.iter().flat_map(|a| v2.iter().map(move |b| a - b)).collect();
    hull_distance(&diffs)
}

fn project_to_probability_simplex(v: &mut [f64]) {
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cum = 0.0;
    let mut theta = 0.0;
    for (i, ui) in u.iter().enumerate() {
        cum += ui;
        let t = (cum - 1.0) / (i + 1) as f64;
        if ui - t > 0.0 {
            theta = t;
        }
    }
    v.iter_mut().for_each(|x| *x = (*x - theta).max(0.0));
}

/// Min-norm point of the hull of `points` by accelerated projected gradient
/// on the barycentric weights, then an exact solve on the detected support.
pub fn qp_min_norm(points: &[Vec3]) -> Vec3 {
    let n = points.len();
    let p = DMatrix::from_fn(3, n, |r, c| points[c][r]);
    let g = p.transpose() * &p;
    let lip = g.norm().max(1e-12);
    let mut lam = vec![1.0 / n as f64; n];
    let mut y = lam.clone();
    let mut t = 1.0f64;
    for _ in 0..50_000 {
        let grad = &g * DVector::from_column_slice(&y);
        let mut next: Vec<f64> = (0..n).map(|i| y[i] - grad[i] / lip).collect();
        project_to_probability_simplex(&mut next);
        let t_next = (1.0 + (1.0 + 4.0 * t * t).sqrt()) / 2.0;
        for i in 0..n {
            y[i] = next[i] + (t - 1.0) / t_next * (next[i] - lam[i]);
        }
        lam = next;
        t = t_next;
    }
    let coarse = (0..n).fold(Vec3::zeros(), |acc, i| acc + points[i] * lam[i]);

    // Polish: least-norm point of the affine hull of the active points.
    let active: Vec<usize> = (0..n).filter(|&i| lam[i] > 1e-7).collect();
    let k = active.len();
    let mut kkt = DMatrix::zeros(k + 1, k + 1);
    let mut rhs = DVector::zeros(k + 1);
    for (a, &i) in active.iter().enumerate() {
        for (b, &j) in active.iter().enumerate() {
            kkt[(a, b)] = points[i].dot(&points[j]);
        }
        kkt[(a, k)] = 1.0;
        kkt[(k, a)] = 1.0;
    }
    rhs[k] = 1.0;
    match kkt.lu().solve(&rhs) {
        Some(sol) if (0..k).all(|a| sol[a] >= -1e-12) => {
            let polished = active.iter().enumerate().fold(Vec3::zeros(), |acc, (a, &i)| acc + points[i] * sol[a]);
            if polished.norm() <= coarse.norm() + 1e-9 {
                polished
            } else {
                coarse
            }
        }
        _ => coarse,
    }
}

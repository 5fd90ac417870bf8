//! Projection of the origin onto the convex hull of up to four points.
//!
//! This is the fully-corrective step of GJK: the new iterate is the point of
//! `conv(W)` closest to the origin and `W` is reduced to the vertices of the
//! minimal face containing it. The sub-distance computation uses signed
//! volumes/areas, descending to lower-dimensional faces only where the
//! origin's barycentric coordinates have the wrong sign. Affinely degenerate
//! inputs (duplicates, collinear or coplanar sets) are handled by that same
//! descent.

use crate::minkowski::SupportPair;
use crate::{Error, Result, Vec3};

/// Points with smaller barycentric weight are removed from reduced simplices.
pub const MIN_RETAINED_WEIGHT: f64 = 1e-14;

/// Projections with smaller norm are treated as hitting the origin.
pub const ZERO_THRESHOLD: f64 = 1e-12;

/// Active set of GJK: 1 to 4 support pairs with barycentric coordinates.
#[derive(Debug, Clone, Copy)]
pub struct Simplex {
    pairs: [SupportPair; 4],
    lambda: [f64; 4],
    len: usize,
}

impl Simplex {
    /// Singleton simplex with weight 1.
    pub fn new(pair: SupportPair) -> Self {
        Simplex {
            pairs: [pair; 4],
            lambda: [1.0, 0.0, 0.0, 0.0],
            len: 1,
        }
    }

    /// Simplex over the given pairs with uniform weights.
    ///
    /// # Panics
    /// If `pairs` is empty or holds more than 4 elements.
    pub fn from_pairs(pairs: &[SupportPair]) -> Self {
        assert!(
            (1..=4).contains(&pairs.len()),
            "simplex rank must be in 1..=4, got {}",
            pairs.len()
        );
        let mut s = Simplex::new(pairs[0]);
        s.len = pairs.len();
        s.pairs[..pairs.len()].copy_from_slice(pairs);
        let w = 1.0 / pairs.len() as f64;
        s.lambda = [0.0; 4];
        s.lambda[..pairs.len()].fill(w);
        s
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn pairs(&self) -> &[SupportPair] {
        &self.pairs[..self.len]
    }

    pub fn lambda(&self) -> &[f64] {
        &self.lambda[..self.len]
    }

    /// Appends a support pair; the caller re-projects afterwards.
    ///
    /// # Panics
    /// If the simplex already holds 4 pairs.
    pub fn push(&mut self, pair: SupportPair) {
        assert!(self.len < 4, "simplex already has rank 4");
        self.pairs[self.len] = pair;
        self.lambda[self.len] = 0.0;
        self.len += 1;
    }

    /// Removes the most recently pushed pair.
    pub fn pop(&mut self) {
        if self.len > 1 {
            self.len -= 1;
        }
    }

    /// `sum lambda_i p_i`.
    pub fn point(&self) -> Vec3 {
        self.pairs()
            .iter()
            .zip(self.lambda())
            .map(|(sp, &l)| sp.p() * l)
            .sum()
    }

    /// Witness points on shape 1 and shape 2 recomposed from the weights.
    pub fn witnesses(&self) -> (Vec3, Vec3) {
        let mut w1 = Vec3::zeros();
        let mut w2 = Vec3::zeros();
        for (sp, &l) in self.pairs().iter().zip(self.lambda()) {
            w1 += sp.w1 * l;
            w2 += sp.w2 * l;
        }
        (w1, w2)
    }
}

/// Closest point of `conv(simplex)` to the origin and the reduced simplex
/// supporting it (all retained weights above [`MIN_RETAINED_WEIGHT`]).
pub fn project_origin(simplex: &Simplex) -> Result<(Vec3, Simplex)> {
    let pts: [Vec3; 4] = std::array::from_fn(|i| simplex.pairs[i.min(simplex.len - 1)].p());
    let cand = match simplex.len {
        1 => Candidate::vertex(&pts, 0),
        2 => segment(&pts, 0, 1),
        3 => triangle(&pts, [0, 1, 2]),
        4 => tetrahedron(&pts),
        n => unreachable!("simplex of rank {n}"),
    };
    if !cand.dist2.is_finite() || cand.lambda.iter().any(|l| !l.is_finite()) {
        return Err(Error::SimplexDegeneracy);
    }

    let mut reduced = *simplex;
    reduced.len = 0;
    let mut total = 0.0;
    for i in 0..simplex.len {
        if cand.lambda[i] > MIN_RETAINED_WEIGHT {
            reduced.pairs[reduced.len] = simplex.pairs[i];
            reduced.lambda[reduced.len] = cand.lambda[i];
            reduced.len += 1;
            total += cand.lambda[i];
        }
    }
    if reduced.len == 0 {
        return Err(Error::SimplexDegeneracy);
    }
    for l in &mut reduced.lambda[..reduced.len] {
        *l /= total;
    }
    let point = if cand.origin_inside {
        Vec3::zeros()
    } else {
        reduced.point()
    };
    Ok((point, reduced))
}

/// Whether the projection of the origin onto the simplex is (numerically)
/// the origin itself.
pub fn contains_origin(simplex: &Simplex) -> bool {
    project_origin(simplex).is_ok_and(|(p, _)| p.norm() <= ZERO_THRESHOLD)
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    lambda: [f64; 4],
    dist2: f64,
    rank: usize,
    origin_inside: bool,
}

impl Candidate {
    fn vertex(pts: &[Vec3; 4], i: usize) -> Self {
        let mut lambda = [0.0; 4];
        lambda[i] = 1.0;
        Candidate {
            lambda,
            dist2: pts[i].norm_squared(),
            rank: 1,
            origin_inside: false,
        }
    }

    /// Lower distance wins; exact ties go to the lower-rank face.
    fn better_than(&self, other: &Candidate) -> bool {
        self.dist2 < other.dist2 || (self.dist2 == other.dist2 && self.rank < other.rank)
    }
}

fn same_sign(a: f64, b: f64) -> bool {
    (a > 0.0 && b > 0.0) || (a < 0.0 && b < 0.0)
}

fn segment(pts: &[Vec3; 4], i: usize, j: usize) -> Candidate {
    let a = pts[i];
    let e = pts[j] - a;
    let ee = e.norm_squared();
    if ee == 0.0 {
        return Candidate::vertex(pts, i);
    }
    let t = -a.dot(&e) / ee;
    if t <= 0.0 {
        return Candidate::vertex(pts, i);
    }
    if t >= 1.0 {
        return Candidate::vertex(pts, j);
    }
    let mut lambda = [0.0; 4];
    lambda[i] = 1.0 - t;
    lambda[j] = t;
    let p = a * (1.0 - t) + pts[j] * t;
    Candidate {
        lambda,
        dist2: p.norm_squared(),
        rank: 2,
        origin_inside: false,
    }
}

/// Twice the signed area of `(a, b, c)` projected on the plane orthogonal to
/// coordinate axis `k`.
fn area2(a: &Vec3, b: &Vec3, c: &Vec3, k: usize) -> f64 {
    let (x, y) = ((k + 1) % 3, (k + 2) % 3);
    (b[x] - a[x]) * (c[y] - a[y]) - (b[y] - a[y]) * (c[x] - a[x])
}

fn triangle(pts: &[Vec3; 4], idx: [usize; 3]) -> Candidate {
    let [a, b, c] = idx.map(|i| pts[i]);
    let e1 = b - a;
    let e2 = c - a;
    let n = e1.cross(&e2);
    let nn = n.norm_squared();
    let degenerate = !(nn > f64::EPSILON * f64::EPSILON * e1.norm_squared() * e2.norm_squared());

    if !degenerate {
        // Project the origin on the triangle's plane, then classify it with
        // signed areas in the coordinate plane where the triangle is largest.
        let p0 = n * (a.dot(&n) / nn);
        let k = n.iamax();
        let mu = n[k];
        let c0 = area2(&p0, &b, &c, k);
        let c1 = area2(&a, &p0, &c, k);
        let c2 = area2(&a, &b, &p0, k);
        let cs = [c0, c1, c2];
        if cs.iter().all(|&ci| same_sign(mu, ci)) {
            let mut lambda = [0.0; 4];
            for (m, &i) in idx.iter().enumerate() {
                lambda[i] = cs[m] / mu;
            }
            let p = a * lambda[idx[0]] + b * lambda[idx[1]] + c * lambda[idx[2]];
            return Candidate {
                lambda,
                dist2: p.norm_squared(),
                rank: 3,
                origin_inside: false,
            };
        }
        let mut best: Option<Candidate> = None;
        for m in 0..3 {
            if !same_sign(mu, cs[m]) {
                let cand = segment(pts, idx[(m + 1) % 3], idx[(m + 2) % 3]);
                if best.is_none_or(|b| cand.better_than(&b)) {
                    best = Some(cand);
                }
            }
        }
        return best.expect("at least one edge has a mismatched sign");
    }

    let mut best = segment(pts, idx[0], idx[1]);
    for (i, j) in [(idx[1], idx[2]), (idx[0], idx[2])] {
        let cand = segment(pts, i, j);
        if cand.better_than(&best) {
            best = cand;
        }
    }
    best
}

fn tetrahedron(pts: &[Vec3; 4]) -> Candidate {
    let [a, b, c, d] = *pts;
    let vol = |p: &Vec3, q: &Vec3, r: &Vec3, s: &Vec3| (q - p).dot(&(r - p).cross(&(s - p)));
    let o = Vec3::zeros();
    let det = vol(&a, &b, &c, &d);
    // Signed volumes with vertex j replaced by the origin: lambda_j = cs[j] / det.
    let cs = [
        vol(&o, &b, &c, &d),
        vol(&a, &o, &c, &d),
        vol(&a, &b, &o, &d),
        vol(&a, &b, &c, &o),
    ];
    if cs.iter().all(|&ci| same_sign(det, ci)) {
        let mut lambda = [0.0; 4];
        for j in 0..4 {
            lambda[j] = cs[j] / det;
        }
        return Candidate {
            lambda,
            dist2: 0.0,
            rank: 4,
            origin_inside: true,
        };
    }
    let mut best: Option<Candidate> = None;
    for j in 0..4 {
        if !same_sign(det, cs[j]) {
            let face = match j {
                0 => [1, 2, 3],
                1 => [0, 2, 3],
                2 => [0, 1, 3],
                _ => [0, 1, 2],
            };
            let cand = triangle(pts, face);
            if best.is_none_or(|b| cand.better_than(&b)) {
                best = Some(cand);
            }
        }
    }
    best.expect("at least one facet has a mismatched sign")
}

/// Exhaustive minimum-norm point of `conv(points)` for small point sets.
///
/// Enumerates every affinely independent subset of at most four points,
/// solves the equality-constrained least-norm problem on its affine hull in
/// closed form (KKT system on the Gram matrix), keeps solutions with
/// nonnegative weights, and returns the best one. Exponential; meant as a
/// test oracle for at most 8 points.
///
/// # Panics
/// If `points` is empty.
pub fn brute_force_min_norm(points: &[Vec3]) -> (Vec3, Vec<f64>) {
    assert!(!points.is_empty(), "brute_force_min_norm needs points");
    let n = points.len();
    let mut best_point = points[0];
    let mut best_lambda = vec![0.0; n];
    best_lambda[0] = 1.0;
    let mut best_norm = points[0].norm_squared();

    let mut subsets: Vec<Vec<usize>> = (1u32..(1 << n))
        .filter(|m| m.count_ones() <= 4)
        .map(|m| (0..n).filter(|&i| m & (1 << i) != 0).collect())
        .collect();
    subsets.sort_by_key(Vec::len);

    for subset in subsets {
        let Some(weights) = affine_min_norm(points, &subset) else {
            continue;
        };
        if weights.iter().any(|&w| w < 0.0) {
            continue;
        }
        let p: Vec3 = subset.iter().zip(&weights).map(|(&i, &w)| points[i] * w).sum();
        let norm = p.norm_squared();
        if norm < best_norm * (1.0 - 1e-12) - 1e-300 {
            best_norm = norm;
            best_point = p;
            best_lambda = vec![0.0; n];
            for (&i, &w) in subset.iter().zip(&weights) {
                best_lambda[i] = w;
            }
        }
    }
    (best_point, best_lambda)
}

/// Weights of the least-norm point on the affine hull of `points[subset]`, or
/// `None` if the subset is affinely dependent.
fn affine_min_norm(points: &[Vec3], subset: &[usize]) -> Option<Vec<f64>> {
    use nalgebra::{DMatrix, DVector};
    let k = subset.len();
    if k == 1 {
        return Some(vec![1.0]);
    }
    // Affine independence: the difference vectors must have full rank.
    let base = points[subset[0]];
    let diffs = DMatrix::from_fn(3, k - 1, |r, c| points[subset[c + 1]][r] - base[r]);
    let sv = diffs.singular_values();
    let scale = sv.max();
    if scale == 0.0 || sv.min() <= 1e-9 * scale {
        return None;
    }
    // [G 1; 1^T 0] [lambda; mu] = [0; 1]
    let mut kkt = DMatrix::zeros(k + 1, k + 1);
    for (r, &i) in subset.iter().enumerate() {
        for (c, &j) in subset.iter().enumerate() {
            kkt[(r, c)] = points[i].dot(&points[j]);
        }
        kkt[(r, k)] = 1.0;
        kkt[(k, r)] = 1.0;
    }
    let mut rhs = DVector::zeros(k + 1);
    rhs[k] = 1.0;
    let sol = kkt.lu().solve(&rhs)?;
    Some(sol.iter().take(k).copied().collect())
}

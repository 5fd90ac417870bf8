//! Seeded benchmark suites: shape pairs in random relative poses, translated
//! along their closest-point axis to prescribed signed distances.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::minkowski::CollisionPair;
use crate::shapes::{ConvexMesh, ConvexShape, Cuboid, Ellipsoid, Pose};
use crate::solvers::{solve_gjk, SolverConfig, Status};
use crate::{obj, Error, Mat3, Result, Vec3};

pub const MIN_SEMI_AXIS: f64 = 0.05;
pub const MAX_SEMI_AXIS: f64 = 1.0;
pub const MIN_TARGET: f64 = -0.1;
pub const MAX_TARGET: f64 = 1.0;
/// Radius of the ball initial relative translations are drawn from.
pub const POSE_BALL_RADIUS: f64 = 3.0;
/// Achieved distances must match their targets within this bound.
pub const DISTANCE_TOLERANCE: f64 = 1e-6;
/// Below this pre-translation distance the witness axis is unreliable.
const MIN_AXIS_DISTANCE: f64 = 1e-9;
const MAX_POSE_ATTEMPTS: usize = 1000;

/// Half-extent of the cubes of the cube family (unit cubes).
pub const CUBE_HALF_EXTENT: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShapeFamily {
    Ellipsoids,
    Cubes,
    Meshes(Vec<PathBuf>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub seed: u64,
    pub n_pairs: usize,
    pub poses_per_pair: usize,
    pub distance_grid: Vec<f64>,
    pub shape_family: ShapeFamily,
}

impl SuiteConfig {
    pub fn new(seed: u64, n_pairs: usize, poses_per_pair: usize, distance_grid: Vec<f64>, shape_family: ShapeFamily) -> Self {
        SuiteConfig {
            seed,
            n_pairs,
            poses_per_pair,
            distance_grid,
            shape_family,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_pairs == 0 || self.poses_per_pair == 0 || self.distance_grid.is_empty() {
            return Err(Error::Generation(
                "pairs, poses and distance grid must be non-empty".into(),
            ));
        }
        if let Some(t) = self
            .distance_grid
            .iter()
            .find(|t| !(MIN_TARGET..=MAX_TARGET).contains(*t))
        {
            return Err(Error::Generation(format!(
                "target distance {t} outside [{MIN_TARGET}, {MAX_TARGET}]"
            )));
        }
        if let ShapeFamily::Meshes(paths) = &self.shape_family {
            if paths.is_empty() {
                return Err(Error::Generation("mesh family needs at least one mesh".into()));
            }
        }
        Ok(())
    }

    pub fn problem_count(&self) -> usize {
        self.n_pairs * self.poses_per_pair * self.distance_grid.len()
    }
}

/// Signed distance grid used by the desk-scale suites.
pub const DESK_DISTANCE_GRID: [f64; 8] = [-0.1, -0.05, -0.01, 0.001, 0.01, 0.1, 0.5, 1.0];

#[derive(Debug, Clone)]
pub struct Problem {
    pub pair: CollisionPair,
    pub target_distance: f64,
    pub pair_id: usize,
    pub pose_id: usize,
}

/// Random rotation, uniform over SO(3) (uniform unit quaternion).
pub fn random_rotation<R: Rng + ?Sized>(rng: &mut R) -> Mat3 {
    use std::f64::consts::TAU;
    let (u1, u2, u3): (f64, f64, f64) = (rng.random(), rng.random(), rng.random());
    let (a, b) = ((1.0 - u1).sqrt(), u1.sqrt());
    let q = nalgebra::Quaternion::new(
        b * (TAU * u3).cos(),
        a * (TAU * u2).sin(),
        a * (TAU * u2).cos(),
        b * (TAU * u3).sin(),
    );
    *nalgebra::UnitQuaternion::from_quaternion(q)
        .to_rotation_matrix()
        .matrix()
}

/// `A = Q diag(1/a_i^2) Q^T` with `a_i` uniform in `[0.05, 1.0]` m and `Q` a
/// uniform random rotation.
pub fn sample_ellipsoid<R: Rng + ?Sized>(rng: &mut R) -> Ellipsoid {
    let axes = Vec3::from_fn(|_, _| rng.random_range(MIN_SEMI_AXIS..=MAX_SEMI_AXIS));
    let q = random_rotation(rng);
    Ellipsoid::from_semi_axes_rotated(axes, &q).expect("sampled semi-axes are well conditioned")
}

fn sample_in_ball<R: Rng + ?Sized>(rng: &mut R, radius: f64) -> Vec3 {
    loop {
        let v = Vec3::from_fn(|_, _| rng.random_range(-1.0..=1.0));
        if v.norm_squared() <= 1.0 {
            return v * radius;
        }
    }
}

/// Moves shape 2 along the unit vector from its witness toward the witness on
/// shape 1 so that the signed distance becomes `target`.
///
/// For `target >= 0` the new distance equals `target`; for `target < 0` the
/// shapes overlap by `|target|` along that axis.
pub fn set_separation(pair: &CollisionPair, target: f64) -> Result<Problem> {
    let r = solve_gjk(pair, &SolverConfig::default())?;
    if r.status != Status::Separated || r.distance < MIN_AXIS_DISTANCE {
        return Err(Error::Generation(format!(
            "degenerate witness axis (status {}, distance {:e})",
            r.status, r.distance
        )));
    }
    let axis = r.separation_vector / r.separation_vector.norm();
    let shift = axis * (r.distance - target);
    Ok(Problem {
        pair: pair.with_shape2_translated(&shift),
        target_distance: target,
        pair_id: 0,
        pose_id: 0,
    })
}

/// Checks the achieved signed distance of a generated problem.
pub fn verify_problem(problem: &Problem) -> Result<()> {
    let r = solve_gjk(&problem.pair, &SolverConfig::default())?;
    let t = problem.target_distance;
    let ok = if t >= 0.0 {
        r.status == Status::Separated && (r.distance - t).abs() <= DISTANCE_TOLERANCE
    } else {
        r.status == Status::Intersecting
    };
    if ok {
        Ok(())
    } else {
        Err(Error::Generation(format!(
            "target {t}: solver reports {} at distance {:e}",
            r.status, r.distance
        )))
    }
}

/// Reads an OBJ file and returns the convex hull of its vertices with
/// hull-edge adjacency.
pub fn load_convex_mesh(path: &Path) -> Result<ConvexMesh> {
    let m = obj::read_obj(path)?;
    if m.vertices.len() < 4 {
        return Err(Error::InvalidShape(format!(
            "{}: need at least 4 vertices, found {}",
            path.display(),
            m.vertices.len()
        )));
    }
    ConvexMesh::from_points(&m.vertices).map_err(|e| match e {
        Error::Hull(msg) => Error::Hull(format!("{}: {msg}", path.display())),
        other => other,
    })
}

/// All `*.obj` files in `dir`, sorted by name.
pub fn list_meshes(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e.eq_ignore_ascii_case("obj")))
        .collect();
    paths.sort();
    Ok(paths)
}

/// Generates `n_pairs x poses_per_pair x |distance_grid|` problems, ordered by
/// pair, then pose, then target. Identical configs yield identical suites.
pub fn generate_suite(config: &SuiteConfig) -> Result<Vec<Problem>> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let meshes: Vec<Arc<ConvexShape>> = match &config.shape_family {
        ShapeFamily::Meshes(paths) => paths
            .iter()
            .map(|p| load_convex_mesh(p).map(|m| Arc::new(ConvexShape::Mesh(m))))
            .collect::<Result<_>>()?,
        _ => Vec::new(),
    };
    let cube = Arc::new(ConvexShape::Box(
        Cuboid::new(Vec3::repeat(CUBE_HALF_EXTENT)).expect("positive half-extents"),
    ));

    let mut problems = Vec::with_capacity(config.problem_count());
    for pair_id in 0..config.n_pairs {
        let draw_shape = |rng: &mut ChaCha8Rng| -> Arc<ConvexShape> {
            match &config.shape_family {
                ShapeFamily::Ellipsoids => Arc::new(ConvexShape::Ellipsoid(sample_ellipsoid(rng))),
                ShapeFamily::Cubes => cube.clone(),
                ShapeFamily::Meshes(_) => meshes[rng.random_range(0..meshes.len())].clone(),
            }
        };
        let shape1 = draw_shape(&mut rng);
        let shape2 = draw_shape(&mut rng);
        for pose_id in 0..config.poses_per_pair {
            let batch = sample_pose_batch(&mut rng, &shape1, &shape2, &config.distance_grid)?;
            problems.extend(batch.into_iter().map(|mut p| {
                p.pair_id = pair_id;
                p.pose_id = pose_id;
                p
            }));
        }
    }
    Ok(problems)
}

/// Samples non-intersecting relative poses until every target of the grid
/// can be realized and verified from the same pose.
fn sample_pose_batch(
    rng: &mut ChaCha8Rng,
    shape1: &Arc<ConvexShape>,
    shape2: &Arc<ConvexShape>,
    grid: &[f64],
) -> Result<Vec<Problem>> {
    'attempt: for _ in 0..MAX_POSE_ATTEMPTS {
        let pose1 = Pose::new(random_rotation(rng), Vec3::zeros())?;
        let pose2 = Pose::new(random_rotation(rng), sample_in_ball(rng, POSE_BALL_RADIUS))?;
        let pair = CollisionPair::new(shape1.clone(), pose1, shape2.clone(), pose2);
        let mut batch = Vec::with_capacity(grid.len());
        for &target in grid {
            let Ok(problem) = set_separation(&pair, target) else {
                continue 'attempt;
            };
            if verify_problem(&problem).is_err() {
                continue 'attempt;
            }
            batch.push(problem);
        }
        return Ok(batch);
    }
    Err(Error::Generation(format!(
        "no valid pose found after {MAX_POSE_ATTEMPTS} attempts"
    )))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub pair_id: usize,
    pub pose_id: usize,
    pub target_distance: f64,
}

/// Config plus per-problem ids and targets; enough to regenerate a suite and
/// check it matches.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteManifest {
    pub config: SuiteConfig,
    pub problems: Vec<ManifestEntry>,
}

impl SuiteManifest {
    pub fn new(config: &SuiteConfig, problems: &[Problem]) -> Self {
        SuiteManifest {
            config: config.clone(),
            problems: problems
                .iter()
                .map(|p| ManifestEntry {
                    pair_id: p.pair_id,
                    pose_id: p.pose_id,
                    target_distance: p.target_distance,
                })
                .collect(),
        }
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(path, text).map_err(|e| Error::io(path, e))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }

    /// Regenerates the suite and checks ids and targets against the manifest.
    pub fn regenerate(&self) -> Result<Vec<Problem>> {
        let problems = generate_suite(&self.config)?;
        if SuiteManifest::new(&self.config, &problems) != *self {
            return Err(Error::Generation(
                "regenerated suite does not match manifest".into(),
            ));
        }
        Ok(problems)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapes::Sphere;

    fn sphere_pair(center2: Vec3) -> CollisionPair {
        let s = ConvexShape::from(Sphere::new(1.0).unwrap());
        CollisionPair::from_shapes(s.clone(), Pose::identity(), s, Pose::from_translation(center2))
    }

    #[test]
    fn sphere_separation_targets() {
        let pair = sphere_pair(Vec3::new(4.0, 0.0, 0.0));
        let p = set_separation(&pair, 1.0).unwrap();
        assert!((p.pair.pose2.translation() - Vec3::new(3.0, 0.0, 0.0)).norm() < 1e-6);
        let p = set_separation(&pair, -0.1).unwrap();
        assert!((p.pair.pose2.translation() - Vec3::new(1.9, 0.0, 0.0)).norm() < 1e-6);
        verify_problem(&p).unwrap();
    }

    #[test]
    fn touching_pair_is_degenerate() {
        let pair = sphere_pair(Vec3::new(1.0, 0.0, 0.0));
        assert!(matches!(set_separation(&pair, 0.5), Err(Error::Generation(_))));
    }

    #[test]
    fn ellipsoid_sampling_is_deterministic_and_bounded() {
        let a = sample_ellipsoid(&mut ChaCha8Rng::seed_from_u64(42));
        let b = sample_ellipsoid(&mut ChaCha8Rng::seed_from_u64(42));
        assert_eq!(a.matrix(), b.matrix());
        assert_eq!((a.matrix() - a.matrix().transpose()).abs().max(), 0.0);

        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..1000 {
            let e = sample_ellipsoid(&mut rng);
            let eig = nalgebra::SymmetricEigen::new(*e.matrix()).eigenvalues;
            assert!(eig.min() >= 1.0 - 1e-9 && eig.max() <= 400.0 * (1.0 + 1e-9), "{eig:?}");
        }
    }

    #[test]
    fn random_rotations_are_proper() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..100 {
            let r = random_rotation(&mut rng);
            assert!(Pose::new(r, Vec3::zeros()).is_ok());
        }
    }

    #[test]
    fn config_validation() {
        let bad = SuiteConfig::new(1, 1, 1, vec![2.0], ShapeFamily::Ellipsoids);
        assert!(bad.validate().is_err());
        let bad = SuiteConfig::new(1, 0, 1, vec![0.1], ShapeFamily::Ellipsoids);
        assert!(bad.validate().is_err());
        let bad = SuiteConfig::new(1, 1, 1, vec![0.1], ShapeFamily::Meshes(vec![]));
        assert!(bad.validate().is_err());
    }
}

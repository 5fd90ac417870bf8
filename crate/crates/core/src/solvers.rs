//! Frank-Wolfe, GJK and Nesterov-accelerated GJK on `min |x|^2 / 2, x in D`.
//!
//! All three solvers start from `x0 = s_D((1, 0, 0))`, use the Frank-Wolfe
//! duality gap `<x, x - s_D(x)>` as the distance-mode stopping criterion,
//! and report witness points recomposed from the support pairs.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::minkowski::{duality_gap, CollisionPair, SupportPair};
use crate::simplex::{project_origin, Simplex, ZERO_THRESHOLD};
use crate::{Error, Result, Vec3};

pub const DEFAULT_EPSILON: f64 = 1e-8;
pub const DEFAULT_MAX_ITERATIONS: usize = 1000;
pub const DEFAULT_FW_MAX_ITERATIONS: usize = 50_000;

/// Direction of the first support call.
const INITIAL_DIRECTION: Vec3 = Vec3::new(1.0, 0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    #[serde(rename = "fw")]
    FrankWolfe,
    Gjk,
    #[serde(rename = "nesterov")]
    NesterovGjk,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [
        Algorithm::FrankWolfe,
        Algorithm::Gjk,
        Algorithm::NesterovGjk,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Algorithm::FrankWolfe => "fw",
            Algorithm::Gjk => "gjk",
            Algorithm::NesterovGjk => "nesterov",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "fw" => Ok(Algorithm::FrankWolfe),
            "gjk" => Ok(Algorithm::Gjk),
            "nesterov" => Ok(Algorithm::NesterovGjk),
            other => Err(format!("unknown algorithm `{other}` (expected fw|gjk|nesterov)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Run to a certified distance.
    Distance,
    /// Stop as soon as a separating plane is found.
    Boolean,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Distance => "distance",
            Mode::Boolean => "boolean",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "distance" => Ok(Mode::Distance),
            "boolean" => Ok(Mode::Boolean),
            other => Err(format!("unknown mode `{other}` (expected distance|boolean)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Tolerance on the absolute duality gap.
    pub epsilon: f64,
    pub max_iterations: usize,
    /// Normalize the momentum direction terms (Nesterov only).
    pub normalize_support_directions: bool,
    pub mode: Mode,
    pub record_trace: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            epsilon: DEFAULT_EPSILON,
            max_iterations: DEFAULT_MAX_ITERATIONS,
            normalize_support_directions: true,
            mode: Mode::Distance,
            record_trace: false,
        }
    }
}

impl SolverConfig {
    /// Defaults with the iteration budget suited to `algorithm`.
    pub fn for_algorithm(algorithm: Algorithm) -> Self {
        let max_iterations = match algorithm {
            Algorithm::FrankWolfe => DEFAULT_FW_MAX_ITERATIONS,
            _ => DEFAULT_MAX_ITERATIONS,
        };
        SolverConfig {
            max_iterations,
            ..Default::default()
        }
    }

    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_trace(mut self, record: bool) -> Self {
        self.record_trace = record;
        self
    }

    pub fn with_normalization(mut self, normalize: bool) -> Self {
        self.normalize_support_directions = normalize;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidConfig("max_iterations must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Separated,
    Intersecting,
    MaxIterations,
    NumericalFailure,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Separated => "separated",
            Status::Intersecting => "intersecting",
            Status::MaxIterations => "max_iterations",
            Status::NumericalFailure => "numerical_failure",
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One iteration of a solver run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceStep {
    pub iteration: usize,
    /// `<x_k, x_k - s_k>` with `s_k` the support point queried this
    /// iteration (the true duality gap once momentum is off).
    pub duality_gap: f64,
    pub norm_x: f64,
    /// Unit support direction. A GJK run that ends inside `D` closes with a
    /// terminal row at `x = 0` carrying the last direction.
    pub direction: Vec3,
    pub momentum_active: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QueryResult {
    pub status: Status,
    /// `|x_k|` for separated shapes, 0 otherwise.
    pub distance: f64,
    /// `witness1 - witness2`.
    pub separation_vector: Vec3,
    pub witness1: Vec3,
    pub witness2: Vec3,
    /// Number of support calls inside the main loop.
    pub iterations: usize,
    pub trace: Option<Vec<TraceStep>>,
}

impl QueryResult {
    fn finish(
        status: Status,
        x: &Vec3,
        w1: Vec3,
        w2: Vec3,
        iterations: usize,
        trace: Option<Vec<TraceStep>>,
    ) -> Self {
        let distance = match status {
            Status::Separated => x.norm(),
            _ => 0.0,
        };
        QueryResult {
            status,
            distance,
            separation_vector: w1 - w2,
            witness1: w1,
            witness2: w2,
            iterations,
            trace,
        }
    }

    pub fn is_separated(&self) -> bool {
        self.status == Status::Separated
    }

    pub fn is_intersecting(&self) -> bool {
        self.status == Status::Intersecting
    }

    /// Writes the trace as CSV with header `iter,gap,norm_x,dx,dy,dz,momentum`.
    pub fn write_trace_csv<W: Write>(&self, out: W) -> Result<()> {
        write_trace_csv(self.trace.as_deref().unwrap_or(&[]), out)
    }
}

pub const TRACE_HEADER: [&str; 7] = ["iter", "gap", "norm_x", "dx", "dy", "dz", "momentum"];

pub fn write_trace_csv<W: Write>(trace: &[TraceStep], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TRACE_HEADER)?;
    for t in trace {
        w.write_record([
            t.iteration.to_string(),
            format!("{:e}", t.duality_gap),
            format!("{:e}", t.norm_x),
            t.direction.x.to_string(),
            t.direction.y.to_string(),
            t.direction.z.to_string(),
            u8::from(t.momentum_active).to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::io("<trace>", e))?;
    Ok(())
}

struct Tracer(Option<Vec<TraceStep>>);

impl Tracer {
    fn new(enabled: bool) -> Self {
        Tracer(enabled.then(Vec::new))
    }

    fn push(&mut self, iteration: usize, gap: f64, x: &Vec3, d: &Vec3, momentum: bool) {
        if let Some(t) = &mut self.0 {
            t.push(TraceStep {
                iteration,
                duality_gap: gap,
                norm_x: x.norm(),
                direction: d / d.norm(),
                momentum_active: momentum,
            });
        }
    }
}

/// Dispatches to the requested solver.
pub fn solve(pair: &CollisionPair, config: &SolverConfig, algorithm: Algorithm) -> Result<QueryResult> {
    match algorithm {
        Algorithm::FrankWolfe => solve_fw(pair, config),
        Algorithm::Gjk => solve_gjk(pair, config),
        Algorithm::NesterovGjk => solve_nesterov_gjk(pair, config),
    }
}

/// Vanilla Frank-Wolfe with exact line-search on `|x|^2 / 2`.
///
/// Without a simplex the iterate only reaches the origin asymptotically, so
/// intersection is declared when the gap criterion holds while no separating
/// plane `<x, s> > 0` exists (the iterate is then within `sqrt(epsilon)` of
/// the origin).
pub fn solve_fw(pair: &CollisionPair, config: &SolverConfig) -> Result<QueryResult> {
    config.validate()?;
    let mut pair = pair.clone();
    let mut tracer = Tracer::new(config.record_trace);
    let s0 = pair.support_difference_mut(&INITIAL_DIRECTION)?;
    let (mut w1, mut w2) = (s0.w1, s0.w2);
    let mut x = s0.p();

    for k in 0..config.max_iterations {
        let iterations = k + 1;
        if x.norm() <= ZERO_THRESHOLD {
            return Ok(QueryResult::finish(Status::Intersecting, &x, w1, w2, k, tracer.0));
        }
        let s = pair.support_difference_mut(&x)?;
        let sp = s.p();
        if config.mode == Mode::Boolean && sp.dot(&x) > 0.0 {
            tracer.push(k, duality_gap(&x, &sp), &x, &x, false);
            return Ok(QueryResult::finish(Status::Separated, &x, w1, w2, iterations, tracer.0));
        }
        let gap = duality_gap(&x, &sp);
        tracer.push(k, gap, &x, &x, false);
        if gap <= config.epsilon {
            let status = if sp.dot(&x) > 0.0 {
                Status::Separated
            } else {
                Status::Intersecting
            };
            return Ok(QueryResult::finish(status, &x, w1, w2, iterations, tracer.0));
        }
        let dir = x - sp;
        let gamma = (gap / dir.norm_squared()).clamp(0.0, 1.0);
        x = x * (1.0 - gamma) + sp * gamma;
        w1 = w1 * (1.0 - gamma) + s.w1 * gamma;
        w2 = w2 * (1.0 - gamma) + s.w2 * gamma;
    }
    Ok(QueryResult::finish(
        Status::MaxIterations,
        &x,
        w1,
        w2,
        config.max_iterations,
        tracer.0,
    ))
}

/// GJK as fully-corrective Frank-Wolfe: each new support point joins the
/// simplex, the origin is re-projected onto its hull and unused vertices are
/// discarded.
pub fn solve_gjk(pair: &CollisionPair, config: &SolverConfig) -> Result<QueryResult> {
    run_gjk(pair, config, false)
}

/// GJK whose support directions follow a Nesterov momentum recursion.
///
/// With `delta_k = (k + 1) / (k + 3)`:
///
/// ```text
/// y_k = delta_k x_k + (1 - delta_k) s_{k-1}
/// d_k = delta_k d_{k-1} + (1 - delta_k) y_k            (raw)
/// d_k = delta_k d_{k-1}/|d_{k-1}| + (1 - delta_k) y_k/|y_k|  (normalized)
/// ```
///
/// with `s_{-1} = d_{-1} = x_0`. When the gap measured with the momentum
/// support point drops below epsilon the momentum iterate has reached a fixed
/// point: that support point is discarded and the remaining iterations run as
/// vanilla GJK.
pub fn solve_nesterov_gjk(pair: &CollisionPair, config: &SolverConfig) -> Result<QueryResult> {
    run_gjk(pair, config, true)
}

fn run_gjk(pair: &CollisionPair, config: &SolverConfig, accelerate: bool) -> Result<QueryResult> {
    config.validate()?;
    let mut pair = pair.clone();
    let mut tracer = Tracer::new(config.record_trace);
    let normalize = config.normalize_support_directions;

    let s0 = pair.support_difference_mut(&INITIAL_DIRECTION)?;
    let mut simplex = Simplex::new(s0);
    let mut x = s0.p();
    let mut momentum = accelerate;
    let mut last_support = x;
    let mut dir = x;

    let fail = |simplex: &Simplex, x: &Vec3, status, k, trace| {
        let (w1, w2) = simplex.witnesses();
        QueryResult::finish(status, x, w1, w2, k, trace)
    };

    for k in 0..config.max_iterations {
        let iterations = k + 1;
        if x.norm() <= ZERO_THRESHOLD {
            return Ok(fail(&simplex, &x, Status::Intersecting, k, tracer.0));
        }

        dir = if momentum {
            momentum_direction(k, &x, &last_support, &dir, normalize).unwrap_or(x)
        } else {
            x
        };

        let s: SupportPair = pair.support_difference_mut(&dir)?;
        let sp = s.p();

        if config.mode == Mode::Boolean && sp.dot(&dir) > 0.0 {
            // `dir` is the normal of a plane separating D from the origin.
            tracer.push(k, duality_gap(&x, &sp), &x, &dir, momentum);
            return Ok(fail(&simplex, &x, Status::Separated, iterations, tracer.0));
        }

        let gap = duality_gap(&x, &sp);
        tracer.push(k, gap, &x, &dir, momentum);
        if gap <= config.epsilon {
            if momentum {
                momentum = false;
                continue;
            }
            return Ok(fail(&simplex, &x, Status::Separated, iterations, tracer.0));
        }

        simplex.push(s);
        match project_origin(&simplex) {
            Ok((p, reduced)) => {
                x = p;
                simplex = reduced;
            }
            Err(_) => {
                simplex.pop();
                return Ok(fail(&simplex, &x, Status::NumericalFailure, iterations, tracer.0));
            }
        }
        last_support = sp;

        if x.norm() <= ZERO_THRESHOLD {
            tracer.push(iterations, 0.0, &x, &dir, momentum);
            let (w1, w2) = simplex.witnesses();
            return Ok(QueryResult::finish(
                Status::Intersecting,
                &x,
                w1,
                w2,
                iterations,
                tracer.0,
            ));
        }
    }
    Ok(fail(
        &simplex,
        &x,
        Status::MaxIterations,
        config.max_iterations,
        tracer.0,
    ))
}

fn momentum_direction(k: usize, x: &Vec3, last_support: &Vec3, prev_dir: &Vec3, normalize: bool) -> Option<Vec3> {
    let delta = (k as f64 + 1.0) / (k as f64 + 3.0);
    let y = x * delta + last_support * (1.0 - delta);
    let d = if normalize {
        let (yn, dn) = (y.norm(), prev_dir.norm());
        if yn == 0.0 || dn == 0.0 {
            return None;
        }
        prev_dir * (delta / dn) + y * ((1.0 - delta) / yn)
    } else {
        prev_dir * delta + y * (1.0 - delta)
    };
    (d.norm_squared() > 0.0 && d.iter().all(|c| c.is_finite())).then_some(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapes::{ConvexShape, Cuboid, Pose, Sphere};

    fn spheres(center2: Vec3) -> CollisionPair {
        let s = ConvexShape::from(Sphere::new(1.0).unwrap());
        CollisionPair::from_shapes(s.clone(), Pose::identity(), s, Pose::from_translation(center2))
    }

    #[test]
    fn gjk_sphere_distance_and_witnesses() {
        let r = solve_gjk(&spheres(Vec3::new(3.0, 0.0, 0.0)), &SolverConfig::default()).unwrap();
        assert_eq!(r.status, Status::Separated);
        assert!((r.distance - 1.0).abs() < 1e-8, "{}", r.distance);
        assert!((r.witness1 - Vec3::new(1.0, 0.0, 0.0)).norm() < 1e-6);
        assert!((r.witness2 - Vec3::new(2.0, 0.0, 0.0)).norm() < 1e-6);
        assert!((r.separation_vector.norm() - r.distance).abs() < 1e-12);
    }

    #[test]
    fn all_solvers_agree_on_spheres() {
        let pair = spheres(Vec3::new(3.0, 0.0, 0.0));
        for algo in Algorithm::ALL {
            let r = solve(&pair, &SolverConfig::for_algorithm(algo), algo).unwrap();
            assert_eq!(r.status, Status::Separated, "{algo}");
            assert!((r.distance - 1.0).abs() < 1e-6, "{algo}: {}", r.distance);
        }
        let gjk = solve_gjk(&pair, &SolverConfig::default()).unwrap();
        let nes = solve_nesterov_gjk(&pair, &SolverConfig::default()).unwrap();
        assert!((gjk.distance - nes.distance).abs() < 1e-8);
    }

    #[test]
    fn overlapping_boxes_intersect() {
        let b = ConvexShape::from(Cuboid::new(Vec3::repeat(0.5)).unwrap());
        let pose = Pose::from_axis_angle(Vec3::new(0.2, 0.1, 0.0), Vec3::new(0.1, 0.0, 0.0));
        let pair = CollisionPair::from_shapes(b.clone(), pose, b, pose);
        for algo in Algorithm::ALL {
            for mode in [Mode::Distance, Mode::Boolean] {
                let cfg = SolverConfig::for_algorithm(algo).with_mode(mode);
                let r = solve(&pair, &cfg, algo).unwrap();
                assert_eq!(r.status, Status::Intersecting, "{algo} {mode}");
                assert_eq!(r.distance, 0.0);
            }
        }
    }

    #[test]
    fn boolean_mode_exits_early() {
        let pair = spheres(Vec3::new(10.0, 1.0, 0.0));
        let cfg = SolverConfig::default().with_mode(Mode::Boolean);
        let b = solve_gjk(&pair, &cfg).unwrap();
        let d = solve_gjk(&pair, &SolverConfig::default()).unwrap();
        assert_eq!(b.status, Status::Separated);
        assert!(b.iterations <= d.iterations);
    }

    #[test]
    fn trace_marks_single_momentum_switch() {
        let pair = spheres(Vec3::new(2.01, 0.3, -0.1));
        let cfg = SolverConfig::default().with_trace(true);
        let r = solve_nesterov_gjk(&pair, &cfg).unwrap();
        let trace = r.trace.unwrap();
        assert_eq!(trace.len(), r.iterations);
        let switches = trace
            .windows(2)
            .filter(|w| w[0].momentum_active != w[1].momentum_active)
            .count();
        assert!(switches <= 1);
        assert!(trace[0].momentum_active);
        assert!(!trace.last().unwrap().momentum_active);
    }

    #[test]
    fn invalid_config_rejected() {
        let pair = spheres(Vec3::new(3.0, 0.0, 0.0));
        let cfg = SolverConfig {
            epsilon: 0.0,
            ..Default::default()
        };
        assert!(matches!(solve_gjk(&pair, &cfg), Err(Error::InvalidConfig(_))));
        let cfg = SolverConfig {
            max_iterations: 0,
            ..Default::default()
        };
        assert!(solve_fw(&pair, &cfg).is_err());
    }

    #[test]
    fn trace_csv_header() {
        let pair = spheres(Vec3::new(3.0, 0.0, 0.0));
        let r = solve_gjk(&pair, &SolverConfig::default().with_trace(true)).unwrap();
        let mut buf = Vec::new();
        r.write_trace_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("iter,gap,norm_x,dx,dy,dz,momentum"));
        assert_eq!(lines.count(), r.iterations);
    }
}

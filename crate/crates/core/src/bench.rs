//! Benchmark protocol and CSV aggregation.
//!
//! Iteration counts come from one solve per (problem, solver). Timings are
//! the mean of the lowest 90% of repeated wall-clock measurements, which
//! discards throttling and scheduling outliers.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::benchgen::Problem;
use crate::solvers::{solve, Algorithm, Mode, SolverConfig, Status};
use crate::{Error, Result};

/// Exact CSV header of bench output.
pub const BENCH_HEADER: &str = "pair_id,pose_id,algo,mode,dist_target,iters,time_ns,status,dist";

/// Fraction of fastest timing samples kept.
pub const KEPT_FRACTION_NUM: usize = 9;
pub const KEPT_FRACTION_DEN: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub pair_id: usize,
    pub pose_id: usize,
    pub algo: String,
    pub mode: String,
    pub dist_target: f64,
    pub iters: usize,
    pub time_ns: f64,
    pub status: String,
    pub dist: f64,
}

/// A solver together with its configuration knobs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverSpec {
    pub algorithm: Algorithm,
    pub normalize: bool,
}

impl SolverSpec {
    pub fn new(algorithm: Algorithm) -> Self {
        SolverSpec {
            algorithm,
            normalize: true,
        }
    }

    pub fn label(&self) -> String {
        match (self.algorithm, self.normalize) {
            (Algorithm::NesterovGjk, false) => "nesterov_unnormalized".to_string(),
            (a, _) => a.as_str().to_string(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchOptions {
    pub mode: Mode,
    pub epsilon: f64,
    /// Overrides the per-algorithm default budget.
    pub max_iterations: Option<usize>,
    pub repetitions: usize,
}

impl Default for BenchOptions {
    fn default() -> Self {
        BenchOptions {
            mode: Mode::Distance,
            epsilon: crate::solvers::DEFAULT_EPSILON,
            max_iterations: None,
            repetitions: 100,
        }
    }
}

impl BenchOptions {
    pub fn solver_config(&self, spec: &SolverSpec) -> SolverConfig {
        let mut cfg = SolverConfig::for_algorithm(spec.algorithm)
            .with_mode(self.mode)
            .with_normalization(spec.normalize);
        cfg.epsilon = self.epsilon;
        if let Some(m) = self.max_iterations {
            cfg.max_iterations = m;
        }
        cfg
    }
}

/// Number of samples kept out of `n` repetitions (at least one).
pub fn kept_samples(n: usize) -> usize {
    (n * KEPT_FRACTION_NUM / KEPT_FRACTION_DEN).max(1).min(n)
}

/// Mean of the lowest 90% of `samples`; sorts in place. Returns the mean
/// and the number of samples it averages.
pub fn mean_of_fastest(samples: &mut [f64]) -> (f64, usize) {
    samples.sort_by(|a, b| a.total_cmp(b));
    let k = kept_samples(samples.len());
    if k == 0 {
        return (0.0, 0);
    }
    (samples[..k].iter().sum::<f64>() / k as f64, k)
}

/// Runs every solver on every problem; timed runs are sequential on the
/// calling thread.
pub fn run_bench(problems: &[Problem], solvers: &[SolverSpec], options: &BenchOptions) -> Result<Vec<BenchRecord>> {
    let reps = options.repetitions.max(1);
    let mut records = Vec::with_capacity(problems.len() * solvers.len());
    let mut samples = vec![0.0; reps];
    for problem in problems {
        for spec in solvers {
            let cfg = options.solver_config(spec);
            let result = solve(&problem.pair, &cfg, spec.algorithm)?;
            for slot in samples.iter_mut() {
                let start = Instant::now();
                let r = solve(&problem.pair, &cfg, spec.algorithm)?;
                let elapsed = start.elapsed().as_nanos() as f64;
                std::hint::black_box(r);
                *slot = elapsed.max(1.0);
            }
            let (time_ns, _) = mean_of_fastest(&mut samples);
            records.push(BenchRecord {
                pair_id: problem.pair_id,
                pose_id: problem.pose_id,
                algo: spec.label(),
                mode: options.mode.as_str().to_string(),
                dist_target: problem.target_distance,
                iters: result.iterations,
                time_ns,
                status: result.status.as_str().to_string(),
                dist: if result.status == Status::Separated {
                    result.distance
                } else {
                    0.0
                },
            });
        }
    }
    Ok(records)
}

pub fn write_records<W: Write>(records: &[BenchRecord], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(BENCH_HEADER.split(','))?;
    for r in records {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| Error::io("<bench csv>", e))?;
    Ok(())
}

/// Reads bench CSV, rejecting files whose header differs from
/// [`BENCH_HEADER`].
pub fn read_records<R: Read>(input: R) -> Result<Vec<BenchRecord>> {
    let mut rdr = csv::Reader::from_reader(input);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    if header.join(",") != BENCH_HEADER {
        return Err(Error::InvalidConfig(format!(
            "bench CSV header mismatch: expected `{BENCH_HEADER}`, found `{}`",
            header.join(",")
        )));
    }
    rdr.deserialize().map(|r| r.map_err(Error::from)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub dist_target: f64,
    pub mode: String,
    pub algo: String,
    pub n: usize,
    pub iters_mean: f64,
    pub iters_std: f64,
    pub time_ns_mean: f64,
    pub time_ns_std: f64,
    /// Mean over problems of `N_gjk / N_nesterov`, when both were run.
    pub iters_ratio_gjk_over_nesterov: Option<f64>,
    pub time_ratio_gjk_over_nesterov: Option<f64>,
}

pub fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Per (distance bucket, mode, algorithm) statistics. Ratio columns are
/// computed per problem first and then averaged, so they compare solvers on
/// identical problems.
pub fn aggregate(records: &[BenchRecord]) -> Vec<SummaryRow> {
    type Bucket = (u64, String);
    let key = |r: &BenchRecord| -> Bucket { (r.dist_target.to_bits(), r.mode.clone()) };

    let mut groups: BTreeMap<(Bucket, String), Vec<&BenchRecord>> = BTreeMap::new();
    let mut per_problem: BTreeMap<(Bucket, usize, usize), BTreeMap<&str, &BenchRecord>> = BTreeMap::new();
    for r in records {
        groups.entry((key(r), r.algo.clone())).or_default().push(r);
        per_problem
            .entry((key(r), r.pair_id, r.pose_id))
            .or_default()
            .insert(r.algo.as_str(), r);
    }

    let mut ratios: BTreeMap<Bucket, (Vec<f64>, Vec<f64>)> = BTreeMap::new();
    for ((bucket, _, _), algos) in &per_problem {
        if let (Some(g), Some(n)) = (algos.get("gjk"), algos.get("nesterov")) {
            let entry = ratios.entry(bucket.clone()).or_default();
            entry.0.push(g.iters as f64 / n.iters.max(1) as f64);
            entry.1.push(g.time_ns / n.time_ns.max(f64::MIN_POSITIVE));
        }
    }

    let mut rows: Vec<SummaryRow> = groups
        .into_iter()
        .map(|((bucket, algo), rs)| {
            let iters: Vec<f64> = rs.iter().map(|r| r.iters as f64).collect();
            let times: Vec<f64> = rs.iter().map(|r| r.time_ns).collect();
            let (iters_mean, iters_std) = mean_std(&iters);
            let (time_ns_mean, time_ns_std) = mean_std(&times);
            let ratio = ratios.get(&bucket);
            SummaryRow {
                dist_target: f64::from_bits(bucket.0),
                mode: bucket.1.clone(),
                algo,
                n: rs.len(),
                iters_mean,
                iters_std,
                time_ns_mean,
                time_ns_std,
                iters_ratio_gjk_over_nesterov: ratio.map(|r| mean_std(&r.0).0),
                time_ratio_gjk_over_nesterov: ratio.map(|r| mean_std(&r.1).0),
            }
        })
        .collect();
    rows.sort_by(|a, b| {
        a.dist_target
            .total_cmp(&b.dist_target)
            .then_with(|| a.mode.cmp(&b.mode))
            .then_with(|| a.algo.cmp(&b.algo))
    });
    rows
}

pub fn write_summary<W: Write>(rows: &[SummaryRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| Error::io("<summary csv>", e))?;
    Ok(())
}

/// Human-readable table of summary rows.
pub fn format_summary(rows: &[SummaryRow]) -> String {
    let mut s = format!(
        "{:>8} {:>9} {:>22} {:>6} {:>18} {:>24} {:>10} {:>10}\n",
        "dist", "mode", "algo", "n", "iters", "time_ns", "N ratio", "T ratio"
    );
    let fmt_ratio = |r: Option<f64>| r.map_or_else(|| "-".to_string(), |v| format!("{v:.3}"));
    for r in rows {
        s.push_str(&format!(
            "{:>8} {:>9} {:>22} {:>6} {:>18} {:>24} {:>10} {:>10}\n",
            r.dist_target,
            r.mode,
            r.algo,
            r.n,
            format!("{:.2} ± {:.2}", r.iters_mean, r.iters_std),
            format!("{:.1} ± {:.1}", r.time_ns_mean, r.time_ns_std),
            fmt_ratio(r.iters_ratio_gjk_over_nesterov),
            fmt_ratio(r.time_ratio_gjk_over_nesterov),
        ));
    }
    s
}

//! Seeded trial batches and the experiments built on them.
//!
//! Trial `i` of a batch always runs with `trial_seed(base_seed, i)`, so a
//! batch is reproducible record-for-record regardless of thread count.

use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::coloring::{Coloring, GammaTable};
use crate::descent::{self, RunResult, RunStatus, SolverConfig};
use crate::graph::{write_dimacs, Graph};
use crate::instances::{self, InstanceSpec};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExperimentError {
    #[error("scaling needs at least 3 strictly ascending sizes, got {0:?}")]
    Sizes(Vec<usize>),
    #[error("size {size} is not valid for family {family}")]
    FamilySize { family: &'static str, size: usize },
    #[error("trials must be at least 1")]
    NoTrials,
    #[error(transparent)]
    Instance(#[from] instances::InstanceError),
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Independent per-trial seed derived from `(base_seed, trial)`.
pub fn trial_seed(base_seed: u64, trial: u64) -> u64 {
    splitmix(base_seed ^ splitmix(trial.wrapping_add(0x243f_6a88_85a3_08d3)))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRecord {
    pub trial_index: usize,
    pub seed: u64,
    /// `feasible`, `budget_exhausted`, `cycle_detected` or `error`.
    pub status: String,
    pub steps_taken: u64,
    pub best_conflicts: usize,
    pub wall_time_ms: f64,
    pub reason: String,
}

impl TrialRecord {
    fn from_run(trial_index: usize, seed: u64, run: Result<RunResult, descent::SolverError>, elapsed: f64) -> Self {
        match run {
            Ok(r) => TrialRecord {
                trial_index,
                seed,
                status: r.status.as_str().to_string(),
                steps_taken: r.steps_taken,
                best_conflicts: r.best_conflicts,
                wall_time_ms: elapsed,
                reason: String::new(),
            },
            Err(e) => TrialRecord::error(trial_index, seed, e.to_string()),
        }
    }

    fn error(trial_index: usize, seed: u64, reason: String) -> Self {
        TrialRecord {
            trial_index,
            seed,
            status: "error".into(),
            steps_taken: 0,
            best_conflicts: 0,
            wall_time_ms: 0.0,
            reason,
        }
    }

    pub fn is(&self, status: RunStatus) -> bool {
        self.status == status.as_str()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BatchSummary {
    pub instance: String,
    pub k: usize,
    pub trials: usize,
    pub success_rate: f64,
    pub cycle_rate: f64,
    pub budget_rate: f64,
    pub error_rate: f64,
    /// Everything that is not a success: `cycle_rate + budget_rate + error_rate`.
    pub failure_rate: f64,
    pub steps_p50: u64,
    pub steps_p90: u64,
    pub steps_max: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Batch {
    pub summary: BatchSummary,
    pub records: Vec<TrialRecord>,
}

/// Nearest-rank quantile of an ascending slice; 0 for an empty slice.
pub fn quantile(sorted: &[u64], q: f64) -> u64 {
    if sorted.is_empty() {
        return 0;
    }
    let rank = (q * sorted.len() as f64).ceil().max(1.0) as usize;
    sorted[rank.min(sorted.len()) - 1]
}

pub fn summarize(instance: &str, k: usize, records: &[TrialRecord]) -> BatchSummary {
    let trials = records.len();
    let rate = |status: &str| records.iter().filter(|r| r.status == status).count() as f64 / trials.max(1) as f64;
    let mut steps: Vec<u64> = records.iter().map(|r| r.steps_taken).collect();
    steps.sort_unstable();
    let success_rate = rate("feasible");
    let cycle_rate = rate("cycle_detected");
    let budget_rate = rate("budget_exhausted");
    let error_rate = rate("error");
    BatchSummary {
        instance: instance.to_string(),
        k,
        trials,
        success_rate,
        cycle_rate,
        budget_rate,
        error_rate,
        failure_rate: cycle_rate + budget_rate + error_rate,
        steps_p50: quantile(&steps, 0.5),
        steps_p90: quantile(&steps, 0.9),
        steps_max: steps.last().copied().unwrap_or(0),
    }
}

/// Runs `trials` seeded solver runs on `g`, from random colourings or from `start`.
pub fn run_trials(g: &Graph, cfg: &SolverConfig, trials: usize, base_seed: u64, start: Option<&Coloring>) -> Vec<TrialRecord> {
    (0..trials)
        .into_par_iter()
        .map(|i| {
            let seed = trial_seed(base_seed, i as u64);
            let cfg = cfg.with_seed(seed);
            let t0 = Instant::now();
            let run = match start {
                Some(s) => descent::run_from(g, &cfg, s.clone()),
                None => descent::run(g, &cfg),
            };
            TrialRecord::from_run(i, seed, run, t0.elapsed().as_secs_f64() * 1e3)
        })
        .collect()
}

/// Generates the instance and runs a seeded batch. A generator failure is
/// recorded on every trial rather than aborting.
pub fn run_batch(spec: &InstanceSpec, cfg: &SolverConfig, trials: usize, base_seed: u64) -> Result<Batch, ExperimentError> {
    if trials == 0 {
        return Err(ExperimentError::NoTrials);
    }
    let records = match spec.generate() {
        Ok(g) => run_trials(&g, cfg, trials, base_seed, None),
        Err(e) => (0..trials)
            .map(|i| TrialRecord::error(i, trial_seed(base_seed, i as u64), e.to_string()))
            .collect(),
    };
    Ok(Batch {
        summary: summarize(&spec.to_string(), cfg.k, &records),
        records,
    })
}

pub fn write_records_csv<W: Write>(records: &[TrialRecord], out: W) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Drops one named column from CSV text, e.g. `wall_time_ms` before comparing runs.
pub fn strip_column(csv_text: &str, column: &str) -> String {
    let mut lines = csv_text.lines();
    let Some(header) = lines.next() else {
        return String::new();
    };
    let idx = header.split(',').position(|h| h == column);
    let keep = |line: &str| -> String {
        match idx {
            Some(i) => line
                .split(',')
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, f)| f)
                .collect::<Vec<_>>()
                .join(","),
            None => line.to_string(),
        }
    };
    std::iter::once(header).chain(lines).map(|l| keep(l) + "\n").collect()
}

/// Step budget as a function of instance size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Budget {
    Fixed(u64),
    /// `factor · n³`
    CubicN(u64),
    /// `factor · n · m`
    NM(u64),
}

impl Budget {
    pub fn steps(self, n: usize, m: usize) -> u64 {
        match self {
            Budget::Fixed(b) => b,
            Budget::CubicN(f) => f * (n as u64).pow(3),
            Budget::NM(f) => f * n as u64 * m as u64,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ScalingFamily {
    Path,
    RingEven,
    RingOdd,
    /// `bounded_degree_random(n, delta, seed)` with a seed derived per size.
    BoundedDegree { delta: usize },
}

impl ScalingFamily {
    pub fn name(self) -> &'static str {
        match self {
            ScalingFamily::Path => "path",
            ScalingFamily::RingEven => "ring_even",
            ScalingFamily::RingOdd => "ring_odd",
            ScalingFamily::BoundedDegree { .. } => "bounded_degree",
        }
    }

    pub fn generate(self, n: usize, base_seed: u64) -> Result<Graph, ExperimentError> {
        let wrong = || ExperimentError::FamilySize {
            family: self.name(),
            size: n,
        };
        match self {
            ScalingFamily::Path => Ok(instances::path(n)?),
            ScalingFamily::RingEven if n % 2 == 0 => Ok(instances::ring(n)?),
            ScalingFamily::RingOdd if n % 2 == 1 => Ok(instances::ring(n)?),
            ScalingFamily::RingEven | ScalingFamily::RingOdd => Err(wrong()),
            ScalingFamily::BoundedDegree { delta } => Ok(instances::bounded_degree_random(n, delta, trial_seed(base_seed, n as u64))?),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingRow {
    pub n: usize,
    pub m: usize,
    pub trials: usize,
    pub budget: u64,
    pub success_rate: f64,
    pub median_steps: u64,
    pub p90_steps: u64,
    pub max_steps: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingReport {
    pub family: &'static str,
    pub k: usize,
    pub rows: Vec<ScalingRow>,
    /// Least-squares slope of `ln(median_steps)` against `ln(n)`; medians below 1 count as 1.
    pub slope: f64,
    pub all_succeeded: bool,
}

/// Least-squares slope of `y` against `x`.
pub fn ls_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

pub fn scaling_experiment(
    family: ScalingFamily,
    sizes: &[usize],
    trials: usize,
    k: usize,
    budget: Budget,
    base_seed: u64,
) -> Result<ScalingReport, ExperimentError> {
    if sizes.len() < 3 || sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(ExperimentError::Sizes(sizes.to_vec()));
    }
    if trials == 0 {
        return Err(ExperimentError::NoTrials);
    }
    let mut rows = Vec::with_capacity(sizes.len());
    for &n in sizes {
        let g = family.generate(n, base_seed)?;
        let steps_budget = budget.steps(n, g.edge_count());
        let cfg = SolverConfig::new(k, steps_budget, 0);
        let records = run_trials(&g, &cfg, trials, trial_seed(base_seed, n as u64), None);
        let s = summarize(family.name(), k, &records);
        rows.push(ScalingRow {
            n,
            m: g.edge_count(),
            trials,
            budget: steps_budget,
            success_rate: s.success_rate,
            median_steps: s.steps_p50,
            p90_steps: s.steps_p90,
            max_steps: s.steps_max,
        });
    }
    let points: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| ((r.n as f64).ln(), (r.median_steps.max(1) as f64).ln()))
        .collect();
    Ok(ScalingReport {
        family: family.name(),
        k,
        all_succeeded: rows.iter().all(|r| r.success_rate == 1.0),
        slope: ls_slope(&points),
        rows,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TrapFamily {
    G2,
    G3,
}

impl TrapFamily {
    pub fn k(self) -> usize {
        match self {
            TrapFamily::G2 => 2,
            TrapFamily::G3 => 3,
        }
    }

    pub fn graph(self, size: usize) -> Result<Graph, ExperimentError> {
        Ok(match self {
            TrapFamily::G2 => instances::forest_g2(size)?,
            TrapFamily::G3 => instances::legs_g3(size)?,
        })
    }

    pub fn trap_coloring(self, size: usize) -> Coloring {
        match self {
            TrapFamily::G2 => instances::g2_trap_coloring(size),
            TrapFamily::G3 => instances::g3_trap_coloring(size),
        }
    }

    /// Lower bound on the probability of never reaching a feasible colouring:
    /// `1 − (31/32)^c` for `c` trees, and
    /// `[1 − (239/243)^L]·[1 − (239/243)^(L−1)]` for `L` legs.
    pub fn analytic_bound(self, size: usize) -> f64 {
        match self {
            TrapFamily::G2 => 1.0 - (31.0f64 / 32.0).powi(size as i32),
            TrapFamily::G3 => {
                let q = 239.0f64 / 243.0;
                (1.0 - q.powi(size as i32)) * (1.0 - q.powi(size as i32 - 1))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrapReport {
    pub family: TrapFamily,
    pub size: usize,
    pub k: usize,
    pub trials: usize,
    pub budget: u64,
    pub window: usize,
    pub success_rate: f64,
    pub cycle_rate: f64,
    pub budget_rate: f64,
    pub non_success_rate: f64,
    pub analytic_bound: f64,
    /// `sqrt(p(1−p)/trials)` at `p = analytic_bound`.
    pub sigma: f64,
    /// `analytic_bound − 3·sigma`.
    pub threshold: f64,
    pub passes: bool,
}

pub fn trap_experiment(
    family: TrapFamily,
    size: usize,
    trials: usize,
    budget: u64,
    window: usize,
    base_seed: u64,
) -> Result<(TrapReport, Vec<TrialRecord>), ExperimentError> {
    if trials == 0 {
        return Err(ExperimentError::NoTrials);
    }
    let g = family.graph(size)?;
    let cfg = SolverConfig::new(family.k(), budget, 0).with_cycle_window(window);
    let records = run_trials(&g, &cfg, trials, base_seed, None);
    let s = summarize("", family.k(), &records);
    let bound = family.analytic_bound(size);
    let sigma = (bound * (1.0 - bound) / trials as f64).sqrt();
    let non_success = 1.0 - s.success_rate;
    let threshold = bound - 3.0 * sigma;
    Ok((
        TrapReport {
            family,
            size,
            k: family.k(),
            trials,
            budget,
            window,
            success_rate: s.success_rate,
            cycle_rate: s.cycle_rate,
            budget_rate: s.budget_rate,
            non_success_rate: non_success,
            analytic_bound: bound,
            sigma,
            threshold,
            passes: non_success >= threshold,
        },
        records,
    ))
}

/// Runs from the deterministic trap colouring; `seed` varies only tie-breaking.
pub fn trap_start_trials(family: TrapFamily, size: usize, trials: usize, budget: u64, window: usize, base_seed: u64) -> Result<Vec<TrialRecord>, ExperimentError> {
    let g = family.graph(size)?;
    let cfg = SolverConfig::new(family.k(), budget, 0).with_cycle_window(window);
    Ok(run_trials(&g, &cfg, trials, base_seed, Some(&family.trap_coloring(size))))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlateauTrial {
    pub trial_index: usize,
    pub seed: u64,
    pub initial_conflicts: usize,
    pub improving_steps: usize,
    pub conflicts_at_bound: usize,
    pub passed: bool,
}

/// Everything needed to replay a failed check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Counterexample {
    pub seed: u64,
    pub reason: String,
    pub dimacs: String,
    pub trajectory: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlateauReport {
    pub n: usize,
    pub m: usize,
    pub k: usize,
    /// `½ Σ_v ⌊deg(v)/k⌋`, kept doubled to stay integral.
    pub twice_bound_sum: usize,
    pub trials: Vec<PlateauTrial>,
    pub counterexamples: Vec<Counterexample>,
    pub passed: bool,
}

/// From random starts, checks that every move is strictly improving until each
/// vertex has at most `⌊deg(v)/k⌋` conflicts, that this takes at most `m`
/// steps, and that `confl(S) ≤ ½ Σ_v ⌊deg(v)/k⌋` at that point.
pub fn plateau_bound_check(g: &Graph, k: usize, trials: usize, base_seed: u64) -> PlateauReport {
    use rand::SeedableRng;
    let m = g.edge_count();
    let twice_bound: usize = (0..g.vertex_count()).map(|v| g.degree(v) / k.max(1)).sum();
    let outcomes: Vec<(PlateauTrial, Option<Counterexample>)> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let seed = trial_seed(base_seed, i as u64);
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let start = Coloring::random(g, k, &mut rng).expect("k >= 1");
            let mut table = GammaTable::build(g, &start).expect("matching length");
            let initial = table.conflict_count();
            let mut trajectory = vec![initial];
            let mut improving = 0usize;
            let mut failure = None;
            while !table.within_degree_bounds() {
                let mv = match descent::step(&mut table, &mut rng) {
                    Ok(mv) => mv,
                    Err(e) => {
                        failure = Some(e.to_string());
                        break;
                    }
                };
                trajectory.push(table.conflict_count());
                if mv.delta >= 0 {
                    failure = Some(format!("non-improving move {mv:?} while a vertex exceeds its bound"));
                    break;
                }
                improving += 1;
                if improving > m {
                    failure = Some(format!("{improving} improving steps exceed m = {m}"));
                    break;
                }
            }
            let conflicts = table.conflict_count();
            if failure.is_none() && 2 * conflicts > twice_bound {
                failure = Some(format!("{conflicts} conflicts exceed half of {twice_bound}"));
            }
            let trial = PlateauTrial {
                trial_index: i,
                seed,
                initial_conflicts: initial,
                improving_steps: improving,
                conflicts_at_bound: conflicts,
                passed: failure.is_none(),
            };
            let cx = failure.map(|reason| Counterexample {
                seed,
                reason,
                dimacs: write_dimacs(g),
                trajectory,
            });
            (trial, cx)
        })
        .collect();
    let (trials, cxs): (Vec<_>, Vec<_>) = outcomes.into_iter().unzip();
    let counterexamples: Vec<Counterexample> = cxs.into_iter().flatten().collect();
    PlateauReport {
        n: g.vertex_count(),
        m,
        k,
        twice_bound_sum: twice_bound,
        passed: counterexamples.is_empty(),
        trials,
        counterexamples,
    }
}

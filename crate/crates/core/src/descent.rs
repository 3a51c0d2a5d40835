//! The Vertex Descent loop: scan the conflicting vertices, take a uniformly
//! random argmin move (even when it worsens), track the best colouring, and
//! stop on feasibility, step budget, or a revisited state.

use std::collections::{HashMap, VecDeque};
use std::io::Write;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::coloring::{Coloring, ColoringError, GammaTable, Move};
use crate::graph::Graph;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolverError {
    #[error(transparent)]
    Coloring(#[from] ColoringError),
    #[error("colouring has no conflicts, so there are no moves")]
    NoConflicts,
    #[error("with k = 1 the neighbourhood of a conflicting colouring is empty")]
    EmptyNeighbourhood,
    #[error("initial colouring uses k = {found}, config says k = {expected}")]
    ColourCountMismatch { expected: usize, found: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolverConfig {
    pub k: usize,
    pub max_steps: u64,
    pub seed: u64,
    pub record_trajectory: bool,
    /// Revisit window for cycle detection; 0 disables it.
    pub cycle_window: usize,
}

impl SolverConfig {
    pub fn new(k: usize, max_steps: u64, seed: u64) -> Self {
        SolverConfig {
            k,
            max_steps,
            seed,
            record_trajectory: false,
            cycle_window: 0,
        }
    }

    pub fn with_trajectory(mut self) -> Self {
        self.record_trajectory = true;
        self
    }

    pub fn with_cycle_window(mut self, window: usize) -> Self {
        self.cycle_window = window;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Feasible,
    BudgetExhausted,
    CycleDetected,
}

impl RunStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            RunStatus::Feasible => "feasible",
            RunStatus::BudgetExhausted => "budget_exhausted",
            RunStatus::CycleDetected => "cycle_detected",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TrajectoryPoint {
    pub step: u64,
    /// Conflicts after the move.
    pub conflicts: usize,
    pub moved_vertex: usize,
    pub new_colour: usize,
    pub delta: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunResult {
    pub status: RunStatus,
    pub steps_taken: u64,
    pub best_conflicts: usize,
    pub best_coloring: Coloring,
    pub trajectory: Option<Vec<TrajectoryPoint>>,
}

/// Every minimum-delta move over `N(S)`, ordered by vertex then colour.
pub fn best_moves(table: &GammaTable<'_>) -> Result<Vec<Move>, SolverError> {
    let mut out = Vec::new();
    best_moves_into(table, &mut out)?;
    Ok(out)
}

pub fn best_moves_into(table: &GammaTable<'_>, out: &mut Vec<Move>) -> Result<(), SolverError> {
    out.clear();
    if table.conflicting().is_empty() {
        return Err(SolverError::NoConflicts);
    }
    if table.k() < 2 {
        return Err(SolverError::EmptyNeighbourhood);
    }
    let mut min = i64::MAX;
    for &v in table.conflicting() {
        let own = table.colour(v);
        let row = table.row(v);
        let current = row[own] as i64;
        for (c, &g) in row.iter().enumerate() {
            if c == own {
                continue;
            }
            let delta = g as i64 - current;
            if delta < min {
                min = delta;
                out.clear();
            }
            if delta == min {
                out.push(Move {
                    vertex: v,
                    new_colour: c,
                    delta,
                });
            }
        }
    }
    out.sort_unstable_by_key(|m| (m.vertex, m.new_colour));
    Ok(())
}

/// One iteration: pick uniformly among the best moves and apply it.
pub fn step<R: Rng + ?Sized>(table: &mut GammaTable<'_>, rng: &mut R) -> Result<Move, SolverError> {
    let mut buf = Vec::new();
    step_with(table, rng, &mut buf).map(|(m, _)| m)
}

/// Returns the move taken and the vertex's previous colour.
fn step_with<R: Rng + ?Sized>(table: &mut GammaTable<'_>, rng: &mut R, buf: &mut Vec<Move>) -> Result<(Move, usize), SolverError> {
    best_moves_into(table, buf)?;
    let m = buf[rng.gen_range(0..buf.len())];
    let old = table.colour(m.vertex);
    table.recolour_unchecked(m.vertex, m.new_colour);
    Ok((m, old))
}

/// True iff the last `window` fingerprints contain a repeat.
pub fn detect_cycle(history: &[u64], window: usize) -> bool {
    if window < 2 {
        return false;
    }
    let tail = &history[history.len().saturating_sub(window)..];
    let mut seen = std::collections::HashSet::with_capacity(tail.len());
    !tail.iter().all(|fp| seen.insert(*fp))
}

/// Streaming form of [`detect_cycle`]: remembers the previous `window - 1` states.
#[derive(Debug, Clone)]
pub struct CycleDetector {
    keep: usize,
    recent: VecDeque<u64>,
    counts: HashMap<u64, u32>,
}

impl CycleDetector {
    pub fn new(window: usize) -> Self {
        CycleDetector {
            keep: window.saturating_sub(1),
            recent: VecDeque::with_capacity(window),
            counts: HashMap::with_capacity(window),
        }
    }

    /// Records a state; returns true if it already occurred within the window.
    pub fn push(&mut self, fp: u64) -> bool {
        if self.keep == 0 {
            return false;
        }
        let repeat = self.counts.contains_key(&fp);
        self.recent.push_back(fp);
        *self.counts.entry(fp).or_insert(0) += 1;
        if self.recent.len() > self.keep {
            let old = self.recent.pop_front().unwrap();
            if let Some(c) = self.counts.get_mut(&old) {
                *c -= 1;
                if *c == 0 {
                    self.counts.remove(&old);
                }
            }
        }
        repeat
    }
}

/// Zobrist keys: the fingerprint of a colouring is the XOR of `key(v, s(v))`,
/// so it is independent of vertex order and updates in O(1) per move.
#[derive(Debug, Clone)]
pub struct Fingerprinter {
    k: usize,
    keys: Vec<u64>,
}

impl Fingerprinter {
    pub fn new(n: usize, k: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_f00d_cafe_d00d ^ ((n as u64) << 20) ^ k as u64);
        Fingerprinter {
            k,
            keys: (0..n * k).map(|_| rng.next_u64()).collect(),
        }
    }

    pub fn of(&self, colours: &[usize]) -> u64 {
        colours
            .iter()
            .enumerate()
            .fold(0, |acc, (v, &c)| acc ^ self.keys[v * self.k + c])
    }

    #[inline]
    pub fn update(&self, fp: u64, v: usize, old: usize, new: usize) -> u64 {
        fp ^ self.keys[v * self.k + old] ^ self.keys[v * self.k + new]
    }
}

/// Runs Vertex Descent from a uniformly random colouring drawn from `cfg.seed`.
pub fn run(g: &Graph, cfg: &SolverConfig) -> Result<RunResult, SolverError> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let initial = Coloring::random(g, cfg.k, &mut rng)?;
    run_with_rng(g, cfg, initial, &mut rng)
}

/// Runs Vertex Descent from a given colouring; `cfg.seed` drives tie-breaking only.
pub fn run_from(g: &Graph, cfg: &SolverConfig, initial: Coloring) -> Result<RunResult, SolverError> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    run_with_rng(g, cfg, initial, &mut rng)
}

fn run_with_rng<R: Rng + ?Sized>(g: &Graph, cfg: &SolverConfig, initial: Coloring, rng: &mut R) -> Result<RunResult, SolverError> {
    if initial.k() != cfg.k {
        return Err(SolverError::ColourCountMismatch {
            expected: cfg.k,
            found: initial.k(),
        });
    }
    let mut table = GammaTable::build(g, &initial)?;
    let mut best_conflicts = table.conflict_count();
    let mut best_coloring = initial;
    let mut trajectory = cfg.record_trajectory.then(Vec::new);

    let detecting = cfg.cycle_window >= 2;
    let fingerprinter = detecting.then(|| Fingerprinter::new(g.vertex_count(), cfg.k));
    let mut detector = CycleDetector::new(if detecting { cfg.cycle_window } else { 0 });
    let mut fp = fingerprinter.as_ref().map_or(0, |f| f.of(table.colours()));
    detector.push(fp);

    let mut steps = 0u64;
    let mut buf = Vec::new();
    let status = loop {
        if table.is_feasible() {
            break RunStatus::Feasible;
        }
        if steps >= cfg.max_steps {
            break RunStatus::BudgetExhausted;
        }
        let (m, old) = step_with(&mut table, rng, &mut buf)?;
        steps += 1;
        let conflicts = table.conflict_count();
        if let Some(t) = trajectory.as_mut() {
            t.push(TrajectoryPoint {
                step: steps,
                conflicts,
                moved_vertex: m.vertex,
                new_colour: m.new_colour,
                delta: m.delta,
            });
        }
        if conflicts < best_conflicts {
            best_conflicts = conflicts;
            best_coloring = table.coloring();
        }
        if let Some(f) = fingerprinter.as_ref() {
            fp = f.update(fp, m.vertex, old, m.new_colour);
            if detector.push(fp) {
                break RunStatus::CycleDetected;
            }
        }
    };

    Ok(RunResult {
        status,
        steps_taken: steps,
        best_conflicts,
        best_coloring,
        trajectory,
    })
}

/// Writes a trajectory as CSV with columns `step,conflicts,moved_vertex,new_colour,delta`.
pub fn write_trajectory_csv<W: Write>(points: &[TrajectoryPoint], out: W) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    for p in points {
        w.serialize(p)?;
    }
    w.flush()?;
    Ok(())
}

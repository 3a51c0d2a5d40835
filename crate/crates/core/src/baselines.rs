//! Reference colouring algorithms: Brélaz's DSATUR (single run or every
//! tie-break resolution) and an exact backtracking colourability oracle.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::coloring::Coloring;
use crate::graph::Graph;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BaselineError {
    #[error("DSATUR enumeration exceeded the branch limit of {0} complete runs")]
    BranchLimit(u64),
    #[error("undecided: exact search exceeded its budget of {0} nodes")]
    Undecided(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TieBreak {
    /// Smallest vertex index among the remaining ties.
    Lexicographic,
    /// Uniform among the remaining ties.
    Random(u64),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DsaturResult {
    pub coloring: Coloring,
    pub colours_used: usize,
    /// `(vertex, saturation when chosen)` in choice order.
    pub decision_trace: Vec<(usize, usize)>,
}

#[derive(Clone)]
struct DsaturState<'g> {
    graph: &'g Graph,
    colour: Vec<Option<usize>>,
    /// `seen[v][c]`: number of coloured neighbours of `v` with colour `c`.
    seen: Vec<Vec<u32>>,
    saturation: Vec<usize>,
    used: usize,
    remaining: usize,
}

impl<'g> DsaturState<'g> {
    fn new(graph: &'g Graph) -> Self {
        let n = graph.vertex_count();
        DsaturState {
            graph,
            colour: vec![None; n],
            seen: vec![Vec::new(); n],
            saturation: vec![0; n],
            used: 0,
            remaining: n,
        }
    }

    /// Uncoloured vertices of maximum saturation, then maximum degree.
    fn candidates(&self) -> Vec<usize> {
        let key = |v: usize| (self.saturation[v], self.graph.degree(v));
        let best = (0..self.colour.len())
            .filter(|&v| self.colour[v].is_none())
            .map(key)
            .max();
        match best {
            None => Vec::new(),
            Some(best) => (0..self.colour.len())
                .filter(|&v| self.colour[v].is_none() && key(v) == best)
                .collect(),
        }
    }

    fn smallest_free(&self, v: usize) -> usize {
        let row = &self.seen[v];
        (0..).find(|&c| row.get(c).copied().unwrap_or(0) == 0).unwrap()
    }

    fn assign(&mut self, v: usize, c: usize) {
        self.colour[v] = Some(c);
        self.used = self.used.max(c + 1);
        self.remaining -= 1;
        for &w in self.graph.neighbours(v) {
            let row = &mut self.seen[w];
            if row.len() <= c {
                row.resize(c + 1, 0);
            }
            if row[c] == 0 {
                self.saturation[w] += 1;
            }
            row[c] += 1;
        }
    }

    fn into_coloring(self) -> Coloring {
        let k = self.used.max(1);
        Coloring::new(self.colour.into_iter().map(|c| c.unwrap()).collect(), k).unwrap()
    }
}

/// Classic DSATUR: max saturation, then max degree, then `tie_break`; smallest feasible colour.
pub fn dsatur(g: &Graph, tie_break: TieBreak) -> DsaturResult {
    let mut rng = match tie_break {
        TieBreak::Random(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
        TieBreak::Lexicographic => None,
    };
    let mut state = DsaturState::new(g);
    let mut trace = Vec::with_capacity(g.vertex_count());
    while state.remaining > 0 {
        let ties = state.candidates();
        let v = match rng.as_mut() {
            Some(rng) => ties[rng.gen_range(0..ties.len())],
            None => ties[0],
        };
        trace.push((v, state.saturation[v]));
        let c = state.smallest_free(v);
        state.assign(v, c);
    }
    let colours_used = state.used;
    DsaturResult {
        coloring: state.into_coloring(),
        colours_used,
        decision_trace: trace,
    }
}

/// Minimum and maximum colours used by DSATUR over every tie-break resolution.
///
/// Fails once more than `branch_limit` complete runs would be explored.
pub fn dsatur_enumerate(g: &Graph, branch_limit: u64) -> Result<(usize, usize), BaselineError> {
    fn dfs(state: DsaturState<'_>, leaves: &mut u64, limit: u64, acc: &mut (usize, usize)) -> Result<(), BaselineError> {
        let mut state = state;
        loop {
            if state.remaining == 0 {
                *leaves += 1;
                if *leaves > limit {
                    return Err(BaselineError::BranchLimit(limit));
                }
                acc.0 = acc.0.min(state.used);
                acc.1 = acc.1.max(state.used);
                return Ok(());
            }
            let ties = state.candidates();
            if let [v] = ties[..] {
                let c = state.smallest_free(v);
                state.assign(v, c);
                continue;
            }
            for &v in &ties {
                let mut next = state.clone();
                let c = next.smallest_free(v);
                next.assign(v, c);
                dfs(next, leaves, limit, acc)?;
            }
            return Ok(());
        }
    }
    let mut acc = (usize::MAX, 0);
    let mut leaves = 0;
    dfs(DsaturState::new(g), &mut leaves, branch_limit, &mut acc)?;
    if g.vertex_count() == 0 {
        acc.0 = 0;
    }
    Ok(acc)
}

/// Exact `k`-colourability by DSATUR-ordered backtracking with colour-symmetry pruning.
///
/// Returns a witness when colourable. Gives up with [`BaselineError::Undecided`]
/// after `node_budget` tentative assignments.
pub fn k_colorable(g: &Graph, k: usize, node_budget: u64) -> Result<Option<Coloring>, BaselineError> {
    let n = g.vertex_count();
    if n == 0 {
        return Ok(Some(Coloring::new(Vec::new(), k.max(1)).unwrap()));
    }
    if k == 0 {
        return Ok(None);
    }
    let mut search = Backtrack {
        g,
        k,
        colour: vec![usize::MAX; n],
        forbidden: vec![vec![0u32; k]; n],
        nodes: 0,
        budget: node_budget,
    };
    if search.extend(0)? {
        Ok(Some(Coloring::new(search.colour, k).unwrap()))
    } else {
        Ok(None)
    }
}

struct Backtrack<'g> {
    g: &'g Graph,
    k: usize,
    colour: Vec<usize>,
    forbidden: Vec<Vec<u32>>,
    nodes: u64,
    budget: u64,
}

impl Backtrack<'_> {
    fn saturation(&self, v: usize) -> usize {
        self.forbidden[v].iter().filter(|&&x| x > 0).count()
    }

    fn pick(&self) -> Option<usize> {
        (0..self.colour.len())
            .filter(|&v| self.colour[v] == usize::MAX)
            .max_by_key(|&v| (self.saturation(v), self.g.degree(v), std::cmp::Reverse(v)))
    }

    fn set(&mut self, v: usize, c: usize, on: bool) {
        self.colour[v] = if on { c } else { usize::MAX };
        for &w in self.g.neighbours(v) {
            if on {
                self.forbidden[w][c] += 1;
            } else {
                self.forbidden[w][c] -= 1;
            }
        }
    }

    fn extend(&mut self, used: usize) -> Result<bool, BaselineError> {
        let Some(v) = self.pick() else {
            return Ok(true);
        };
        // a fresh colour is interchangeable with any other fresh colour
        let limit = (used + 1).min(self.k);
        for c in 0..limit {
            if self.forbidden[v][c] > 0 {
                continue;
            }
            self.nodes += 1;
            if self.nodes > self.budget {
                return Err(BaselineError::Undecided(self.budget));
            }
            self.set(v, c, true);
            if self.extend(used.max(c + 1))? {
                return Ok(true);
            }
            self.set(v, c, false);
        }
        Ok(false)
    }
}

/// Greedy clique: for each seed vertex, add vertices adjacent to all chosen ones.
pub fn greedy_clique(g: &Graph) -> Vec<usize> {
    let mut best = Vec::new();
    for seed in 0..g.vertex_count() {
        let mut clique = vec![seed];
        let mut cands: Vec<usize> = g.neighbours(seed).to_vec();
        cands.sort_by_key(|&v| std::cmp::Reverse(g.degree(v)));
        for v in cands {
            if clique.iter().all(|&u| g.has_edge(u, v)) {
                clique.push(v);
            }
        }
        if clique.len() > best.len() {
            best = clique;
        }
    }
    best
}

/// Chromatic number, searched upward from the greedy clique bound.
pub fn exact_chromatic(g: &Graph, node_budget: u64) -> Result<usize, BaselineError> {
    if g.vertex_count() == 0 {
        return Ok(0);
    }
    let lower = greedy_clique(g).len();
    let upper = dsatur(g, TieBreak::Lexicographic).colours_used;
    for k in lower..upper {
        if k_colorable(g, k, node_budget)?.is_some() {
            return Ok(k);
        }
    }
    Ok(upper)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coloring::conflict_count_direct;

    fn ring(n: usize) -> Graph {
        Graph::from_edges(n, &(0..n).map(|i| (i, (i + 1) % n)).collect::<Vec<_>>()).unwrap()
    }

    fn complete(n: usize) -> Graph {
        let mut e = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                e.push((u, v));
            }
        }
        Graph::from_edges(n, &e).unwrap()
    }

    fn petersen() -> Graph {
        let mut e = Vec::new();
        for i in 0..5 {
            e.push((i, (i + 1) % 5));
            e.push((i, i + 5));
            e.push((5 + i, 5 + (i + 2) % 5));
        }
        Graph::from_edges(10, &e).unwrap()
    }

    #[test]
    fn dsatur_examples() {
        let path = Graph::from_edges(10, &(0..9).map(|i| (i, i + 1)).collect::<Vec<_>>()).unwrap();
        let r = dsatur(&path, TieBreak::Lexicographic);
        assert_eq!(r.colours_used, 2);
        assert_eq!(conflict_count_direct(&path, &r.coloring), 0);
        assert_eq!(r.decision_trace.len(), 10);
        assert_eq!(dsatur(&complete(5), TieBreak::Random(3)).colours_used, 5);
        assert_eq!(dsatur(&Graph::empty(4), TieBreak::Lexicographic).colours_used, 1);
    }

    #[test]
    fn enumerate_examples() {
        assert_eq!(dsatur_enumerate(&ring(6), 1_000_000), Ok((2, 2)));
        assert_eq!(dsatur_enumerate(&ring(5), 1_000_000), Ok((3, 3)));
        assert_eq!(dsatur_enumerate(&ring(7), 1), Err(BaselineError::BranchLimit(1)));
    }

    #[test]
    fn exact_examples() {
        assert_eq!(exact_chromatic(&ring(7), 1_000_000), Ok(3));
        assert_eq!(exact_chromatic(&complete(6), 1_000_000), Ok(6));
        assert_eq!(exact_chromatic(&petersen(), 1_000_000), Ok(3));
        assert_eq!(exact_chromatic(&Graph::empty(3), 10), Ok(1));
        let w = k_colorable(&petersen(), 3, 1_000_000).unwrap().unwrap();
        assert_eq!(conflict_count_direct(&petersen(), &w), 0);
        assert_eq!(k_colorable(&petersen(), 2, 1_000_000), Ok(None));
        assert_eq!(k_colorable(&complete(12), 11, 5), Err(BaselineError::Undecided(5)));
    }
}

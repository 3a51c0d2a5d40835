//! Colourings and the Γ table: per-vertex, per-colour neighbour counts with
//! incrementally maintained conflict count and conflicting-vertex set.

use std::fmt::Write as _;

use rand::Rng;
use thiserror::Error;

use crate::graph::Graph;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ColoringError {
    #[error("colour count must be at least 1")]
    ZeroColours,
    #[error("colouring has {found} entries but the graph has {expected} vertices")]
    LengthMismatch { expected: usize, found: usize },
    #[error("vertex {vertex} has colour {colour}, outside 0..{k}")]
    ColourOutOfRange { vertex: usize, colour: usize, k: usize },
    #[error("vertex {0} out of range")]
    VertexOutOfRange(usize),
    #[error("recolouring vertex {vertex} to its current colour {colour} is not a move")]
    NotAMove { vertex: usize, colour: usize },
    #[error("operation needs at least 2 colours, got {0}")]
    TooFewColours(usize),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Assignment of one of `k` colours to every vertex.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Coloring {
    colours: Vec<usize>,
    k: usize,
}

impl Coloring {
    pub fn new(colours: Vec<usize>, k: usize) -> Result<Self, ColoringError> {
        if k == 0 {
            return Err(ColoringError::ZeroColours);
        }
        if let Some((vertex, &colour)) = colours.iter().enumerate().find(|(_, &c)| c >= k) {
            return Err(ColoringError::ColourOutOfRange { vertex, colour, k });
        }
        Ok(Coloring { colours, k })
    }

    /// Every vertex gets an independent uniform colour from `0..k`.
    pub fn random<R: Rng + ?Sized>(g: &Graph, k: usize, rng: &mut R) -> Result<Self, ColoringError> {
        if k == 0 {
            return Err(ColoringError::ZeroColours);
        }
        let colours = (0..g.vertex_count()).map(|_| rng.gen_range(0..k)).collect();
        Ok(Coloring { colours, k })
    }

    #[inline]
    pub fn colour(&self, v: usize) -> usize {
        self.colours[v]
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.colours.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colours.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.colours
    }

    /// Number of distinct colours actually used.
    pub fn colours_used(&self) -> usize {
        let mut seen = vec![false; self.k];
        self.colours.iter().for_each(|&c| seen[c] = true);
        seen.into_iter().filter(|&b| b).count()
    }

    /// Colour class `V_c`, derived on demand.
    pub fn class(&self, c: usize) -> Vec<usize> {
        (0..self.colours.len()).filter(|&v| self.colours[v] == c).collect()
    }

    /// One `v <index> <colour>` line per vertex.
    pub fn to_lines(&self) -> String {
        let mut out = String::new();
        for (v, c) in self.colours.iter().enumerate() {
            writeln!(out, "v {v} {c}").unwrap();
        }
        out
    }

    /// Inverse of [`Coloring::to_lines`]. Every vertex in `0..n` must appear exactly once.
    pub fn parse_lines(text: &str, n: usize, k: usize) -> Result<Self, ColoringError> {
        let mut colours = vec![None; n];
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| ColoringError::Parse { line: idx + 1, msg };
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 3 || fields[0] != "v" {
                return Err(err(format!("expected `v <index> <colour>`, got {line:?}")));
            }
            let v: usize = fields[1].parse().map_err(|_| err(format!("bad index {:?}", fields[1])))?;
            let c: usize = fields[2].parse().map_err(|_| err(format!("bad colour {:?}", fields[2])))?;
            if v >= n {
                return Err(err(format!("vertex {v} outside 0..{n}")));
            }
            if colours[v].replace(c).is_some() {
                return Err(err(format!("vertex {v} listed twice")));
            }
        }
        let colours = colours
            .into_iter()
            .enumerate()
            .map(|(v, c)| {
                c.ok_or(ColoringError::Parse {
                    line: 0,
                    msg: format!("vertex {v} missing"),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Coloring::new(colours, k)
    }
}

/// Recolour `vertex` to `new_colour`, changing the conflict count by `delta`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Move {
    pub vertex: usize,
    pub new_colour: usize,
    pub delta: i64,
}

/// Monochromatic edges counted by a direct edge scan.
pub fn conflict_count_direct(g: &Graph, s: &Coloring) -> usize {
    g.edges().filter(|&(u, v)| s.colour(u) == s.colour(v)).count()
}

#[derive(Debug, Clone, Default)]
struct IndexSet {
    members: Vec<usize>,
    position: Vec<usize>,
}

const ABSENT: usize = usize::MAX;

impl IndexSet {
    fn with_universe(n: usize) -> Self {
        IndexSet {
            members: Vec::new(),
            position: vec![ABSENT; n],
        }
    }

    #[inline]
    fn contains(&self, v: usize) -> bool {
        self.position[v] != ABSENT
    }

    #[inline]
    fn insert(&mut self, v: usize) {
        if self.position[v] == ABSENT {
            self.position[v] = self.members.len();
            self.members.push(v);
        }
    }

    #[inline]
    fn remove(&mut self, v: usize) {
        let at = self.position[v];
        if at == ABSENT {
            return;
        }
        let last = self.members.pop().unwrap();
        if last != v {
            self.members[at] = last;
            self.position[last] = at;
        }
        self.position[v] = ABSENT;
    }
}

/// Γ table over a borrowed graph. Single-writer state owned by one solver run.
#[derive(Debug, Clone)]
pub struct GammaTable<'g> {
    graph: &'g Graph,
    k: usize,
    colours: Vec<usize>,
    /// Row-major `n × k`: `gamma[v * k + c]` neighbours of `v` coloured `c`.
    gamma: Vec<u32>,
    conflicts: usize,
    conflicting: IndexSet,
}

impl<'g> GammaTable<'g> {
    /// Builds the table from scratch in `O(n·k + m)`.
    pub fn build(graph: &'g Graph, s: &Coloring) -> Result<Self, ColoringError> {
        let n = graph.vertex_count();
        if s.len() != n {
            return Err(ColoringError::LengthMismatch {
                expected: n,
                found: s.len(),
            });
        }
        let k = s.k();
        let colours = s.as_slice().to_vec();
        let mut gamma = vec![0u32; n * k];
        for v in 0..n {
            for &w in graph.neighbours(v) {
                gamma[v * k + colours[w]] += 1;
            }
        }
        let mut conflicting = IndexSet::with_universe(n);
        let mut twice = 0usize;
        for v in 0..n {
            let own = gamma[v * k + colours[v]] as usize;
            if own > 0 {
                conflicting.insert(v);
                twice += own;
            }
        }
        Ok(GammaTable {
            graph,
            k,
            colours,
            gamma,
            conflicts: twice / 2,
            conflicting,
        })
    }

    #[inline]
    pub fn graph(&self) -> &'g Graph {
        self.graph
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn colour(&self, v: usize) -> usize {
        self.colours[v]
    }

    pub fn colours(&self) -> &[usize] {
        &self.colours
    }

    pub fn coloring(&self) -> Coloring {
        Coloring {
            colours: self.colours.clone(),
            k: self.k,
        }
    }

    #[inline]
    pub fn gamma(&self, v: usize, c: usize) -> u32 {
        self.gamma[v * self.k + c]
    }

    pub fn row(&self, v: usize) -> &[u32] {
        &self.gamma[v * self.k..(v + 1) * self.k]
    }

    /// `confl(S)`.
    #[inline]
    pub fn conflict_count(&self) -> usize {
        self.conflicts
    }

    /// `C(S)` in internal (insertion/swap) order.
    #[inline]
    pub fn conflicting(&self) -> &[usize] {
        &self.conflicting.members
    }

    #[inline]
    pub fn is_conflicting(&self, v: usize) -> bool {
        self.conflicting.contains(v)
    }

    pub fn is_feasible(&self) -> bool {
        self.conflicts == 0
    }

    /// Size of the neighbourhood `N(S)`: `(k-1)·|C(S)|`.
    pub fn neighbourhood_size(&self) -> usize {
        (self.k - 1) * self.conflicting.members.len()
    }

    /// Conflict change from recolouring `v` to `c`, in O(1).
    pub fn move_delta(&self, v: usize, c: usize) -> Result<i64, ColoringError> {
        self.check(v, c)?;
        Ok(self.delta_unchecked(v, c))
    }

    #[inline]
    pub(crate) fn delta_unchecked(&self, v: usize, c: usize) -> i64 {
        let row = v * self.k;
        self.gamma[row + c] as i64 - self.gamma[row + self.colours[v]] as i64
    }

    fn check(&self, v: usize, c: usize) -> Result<(), ColoringError> {
        if v >= self.colours.len() {
            return Err(ColoringError::VertexOutOfRange(v));
        }
        if c >= self.k {
            return Err(ColoringError::ColourOutOfRange {
                vertex: v,
                colour: c,
                k: self.k,
            });
        }
        if self.colours[v] == c {
            return Err(ColoringError::NotAMove { vertex: v, colour: c });
        }
        Ok(())
    }

    /// Applies the move's recolouring; `m.delta` is ignored and recomputed.
    pub fn apply_move(&mut self, m: &Move) -> Result<i64, ColoringError> {
        self.recolour(m.vertex, m.new_colour)
    }

    /// Recolours `v` to `c` in `O(deg(v))`, returning the conflict change.
    pub fn recolour(&mut self, v: usize, c: usize) -> Result<i64, ColoringError> {
        self.check(v, c)?;
        Ok(self.recolour_unchecked(v, c))
    }

    pub(crate) fn recolour_unchecked(&mut self, v: usize, new: usize) -> i64 {
        let k = self.k;
        let old = self.colours[v];
        let delta = self.delta_unchecked(v, new);
        for &w in self.graph.neighbours(v) {
            let base = w * k;
            self.gamma[base + old] -= 1;
            self.gamma[base + new] += 1;
            let sw = self.colours[w];
            if sw == old && self.gamma[base + old] == 0 {
                self.conflicting.remove(w);
            } else if sw == new {
                self.conflicting.insert(w);
            }
        }
        self.colours[v] = new;
        if self.gamma[v * k + new] > 0 {
            self.conflicting.insert(v);
        } else {
            self.conflicting.remove(v);
        }
        self.conflicts = (self.conflicts as i64 + delta) as usize;
        delta
    }

    /// Colour `c' ≠ s(v)` minimising `Γ(v, c')`, ties broken uniformly at random.
    /// Returns `(c', Γ(v, c'))`.
    pub fn least_gamma_colour<R: Rng + ?Sized>(&self, v: usize, rng: &mut R) -> Result<(usize, u32), ColoringError> {
        if self.k < 2 {
            return Err(ColoringError::TooFewColours(self.k));
        }
        if v >= self.colours.len() {
            return Err(ColoringError::VertexOutOfRange(v));
        }
        let own = self.colours[v];
        let row = self.row(v);
        let best = (0..self.k).filter(|&c| c != own).map(|c| row[c]).min().unwrap();
        let ties: Vec<usize> = (0..self.k).filter(|&c| c != own && row[c] == best).collect();
        Ok((ties[rng.gen_range(0..ties.len())], best))
    }

    /// Bound `⌊deg(v)/k⌋` on the conflicts of `v` after the initial descent phase.
    #[inline]
    pub fn degree_bound(&self, v: usize) -> u32 {
        (self.graph.degree(v) / self.k) as u32
    }

    /// True iff every vertex has `Γ(v, s(v)) ≤ ⌊deg(v)/k⌋`.
    pub fn within_degree_bounds(&self) -> bool {
        self.conflicting
            .members
            .iter()
            .all(|&v| self.gamma(v, self.colours[v]) <= self.degree_bound(v))
    }
}

impl PartialEq for GammaTable<'_> {
    fn eq(&self, other: &Self) -> bool {
        let mut a = self.conflicting.members.clone();
        let mut b = other.conflicting.members.clone();
        a.sort_unstable();
        b.sort_unstable();
        self.k == other.k
            && self.colours == other.colours
            && self.gamma == other.gamma
            && self.conflicts == other.conflicts
            && a == b
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn k3() -> Graph {
        Graph::from_edges(3, &[(0, 1), (1, 2), (0, 2)]).unwrap()
    }

    fn path3() -> Graph {
        Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap()
    }

    #[test]
    fn random_coloring_contract() {
        let g = Graph::empty(500);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(Coloring::random(&g, 1, &mut rng).unwrap().as_slice().iter().all(|&c| c == 0));
        assert_eq!(Coloring::random(&g, 0, &mut rng), Err(ColoringError::ZeroColours));

        let a = Coloring::random(&g, 4, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        let b = Coloring::random(&g, 4, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        assert_eq!(a, b);

        let n = 10_000;
        let big = Graph::empty(n);
        let s = Coloring::random(&big, 2, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        let ones = s.as_slice().iter().filter(|&&c| c == 1).count() as f64;
        let sd = (n as f64 * 0.25).sqrt();
        assert!((ones - n as f64 / 2.0).abs() <= 4.0 * sd, "ones = {ones}");
    }

    #[test]
    fn build_table_examples() {
        let g = k3();
        let t = GammaTable::build(&g, &Coloring::new(vec![0, 0, 0], 3).unwrap()).unwrap();
        assert!((0..3).all(|v| t.gamma(v, 0) == 2));
        assert_eq!(t.conflict_count(), 3);
        let mut c = t.conflicting().to_vec();
        c.sort();
        assert_eq!(c, vec![0, 1, 2]);

        let p = path3();
        let t = GammaTable::build(&p, &Coloring::new(vec![0, 1, 0], 2).unwrap()).unwrap();
        assert_eq!(t.conflict_count(), 0);
        assert!(t.conflicting().is_empty());
        let t = GammaTable::build(&p, &Coloring::new(vec![0, 0, 0], 2).unwrap()).unwrap();
        assert_eq!(t.conflict_count(), 2);

        let err = GammaTable::build(&p, &Coloring::new(vec![0, 0], 2).unwrap()).unwrap_err();
        assert_eq!(err, ColoringError::LengthMismatch { expected: 3, found: 2 });
    }

    #[test]
    fn direct_count_examples() {
        let mut edges = Vec::new();
        for u in 0..4 {
            for v in u + 1..4 {
                edges.push((u, v));
            }
        }
        let k4 = Graph::from_edges(4, &edges).unwrap();
        assert_eq!(conflict_count_direct(&k4, &Coloring::new(vec![0; 4], 1).unwrap()), 6);
        assert_eq!(conflict_count_direct(&k4, &Coloring::new(vec![0, 1, 2, 3], 4).unwrap()), 0);
    }

    #[test]
    fn move_delta_examples() {
        let g = k3();
        let t = GammaTable::build(&g, &Coloring::new(vec![0, 0, 0], 3).unwrap()).unwrap();
        assert_eq!(t.move_delta(0, 1), Ok(-2));
        assert_eq!(t.move_delta(0, 0), Err(ColoringError::NotAMove { vertex: 0, colour: 0 }));

        let iso = Graph::empty(2);
        let t = GammaTable::build(&iso, &Coloring::new(vec![1, 0], 3).unwrap()).unwrap();
        assert_eq!(t.move_delta(0, 2), Ok(0));

        // recount before (2) and after (0) recolouring the middle of a monochrome path
        let p = path3();
        let before = Coloring::new(vec![0, 0, 0], 2).unwrap();
        let after = Coloring::new(vec![0, 1, 0], 2).unwrap();
        let direct = conflict_count_direct(&p, &after) as i64 - conflict_count_direct(&p, &before) as i64;
        assert_eq!(direct, -2);
        let t = GammaTable::build(&p, &before).unwrap();
        assert_eq!(t.move_delta(1, 1), Ok(direct));
    }

    #[test]
    fn apply_move_examples() {
        let g = k3();
        let start = Coloring::new(vec![0, 0, 0], 3).unwrap();
        let mut t = GammaTable::build(&g, &start).unwrap();
        let original = t.clone();
        let m = Move {
            vertex: 0,
            new_colour: 1,
            delta: -2,
        };
        assert_eq!(t.apply_move(&m), Ok(-2));
        assert_eq!(t.conflict_count(), 1);
        assert!(!t.is_conflicting(0) && t.is_conflicting(1) && t.is_conflicting(2));
        assert_eq!(t, GammaTable::build(&g, &t.coloring()).unwrap());
        assert!(t.recolour(0, 1).is_err());
        t.recolour(0, 0).unwrap();
        assert_eq!(t, original);
    }

    #[test]
    fn least_gamma_colour_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        // centre 0 of a star with leaves coloured 0,0,0,1 and itself 0: row [3,1]
        let star = Graph::from_edges(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap();
        let t = GammaTable::build(&star, &Coloring::new(vec![0, 0, 0, 0, 1], 2).unwrap()).unwrap();
        assert_eq!(t.row(0), &[3, 1]);
        assert_eq!(t.least_gamma_colour(0, &mut rng), Ok((1, 1)));

        let iso = Graph::empty(1);
        let t = GammaTable::build(&iso, &Coloring::new(vec![0], 3).unwrap()).unwrap();
        let (c, val) = t.least_gamma_colour(0, &mut rng).unwrap();
        assert!(c != 0 && val == 0);

        // deg 5, k=3, row [3,1,1]
        let star5 = Graph::from_edges(6, &[(0, 1), (0, 2), (0, 3), (0, 4), (0, 5)]).unwrap();
        let t = GammaTable::build(&star5, &Coloring::new(vec![0, 0, 0, 0, 1, 2], 3).unwrap()).unwrap();
        assert_eq!(t.row(0), &[3, 1, 1]);
        let (c, val) = t.least_gamma_colour(0, &mut rng).unwrap();
        assert!(c == 1 || c == 2);
        assert_eq!(val, 1);
        assert!(val <= t.degree_bound(0));

        let t = GammaTable::build(&iso, &Coloring::new(vec![0], 1).unwrap()).unwrap();
        assert_eq!(t.least_gamma_colour(0, &mut rng), Err(ColoringError::TooFewColours(1)));
    }

    #[test]
    fn least_gamma_colour_enumerated_rows() {
        // every row of non-negative counts summing to deg with Γ(v,s(v)) above the bound
        fn rows(len: usize, total: u32) -> Vec<Vec<u32>> {
            if len == 1 {
                return vec![vec![total]];
            }
            (0..=total)
                .flat_map(|first| {
                    rows(len - 1, total - first).into_iter().map(move |mut r| {
                        r.insert(0, first);
                        r
                    })
                })
                .collect()
        }
        for k in 2..=4usize {
            for deg in 0..=7u32 {
                let bound = deg / k as u32;
                for row in rows(k, deg) {
                    if row[0] > bound {
                        let min_other = *row[1..].iter().min().unwrap();
                        assert!(min_other <= bound && min_other < row[0], "{row:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn coloring_lines_round_trip() {
        let s = Coloring::new(vec![2, 0, 1, 1], 3).unwrap();
        let text = s.to_lines();
        assert_eq!(text.lines().next(), Some("v 0 2"));
        assert_eq!(Coloring::parse_lines(&text, 4, 3).unwrap(), s);
        assert!(Coloring::parse_lines("v 0 1\nv 0 1\n", 2, 2).is_err());
        assert!(Coloring::parse_lines("v 0 1\n", 2, 2).is_err());
        assert!(Coloring::parse_lines("v 0 5\nv 1 0\n", 2, 2).is_err());
    }
}

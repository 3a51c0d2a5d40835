//! Deterministic generators for the analysed instance families.
//!
//! Vertex labels are fixed per family so experiments can address roles
//! (tree hubs, leg vertices, leaves) directly:
//!
//! * `forest_g2(c)`: tree `t` occupies `14t..14t+14` as
//!   `A, B, C, D, E, F` then the leaf pairs of `C`, `D`, `E`, `F`. See [`G2Tree`].
//! * `legs_g3(L)`: vertex 0 is the centre; leg `i` occupies `1+5i..6+5i` as
//!   `a, b, pick, leaf_a, leaf_b`. See [`G3Leg`].

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::coloring::Coloring;
use crate::graph::Graph;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InstanceError {
    #[error("{family} needs size at least {min}, got {got}")]
    TooSmall { family: &'static str, min: usize, got: usize },
    #[error("bad instance spec {0:?}")]
    BadSpec(String),
}

fn at_least(family: &'static str, min: usize, got: usize) -> Result<(), InstanceError> {
    if got < min {
        Err(InstanceError::TooSmall { family, min, got })
    } else {
        Ok(())
    }
}

pub fn path(n: usize) -> Result<Graph, InstanceError> {
    at_least("path", 1, n)?;
    let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
    Ok(Graph::from_edges(n, &edges).unwrap())
}

pub fn ring(n: usize) -> Result<Graph, InstanceError> {
    at_least("ring", 3, n)?;
    let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    Ok(Graph::from_edges(n, &edges).unwrap())
}

pub fn complete(n: usize) -> Result<Graph, InstanceError> {
    at_least("complete", 3, n)?;
    let mut edges = Vec::with_capacity(n * (n - 1) / 2);
    for u in 0..n {
        for v in u + 1..n {
            edges.push((u, v));
        }
    }
    Ok(Graph::from_edges(n, &edges).unwrap())
}

/// Edge list of `G1`, found by `examples/find_g1.rs`.
const G1_EDGES: [(usize, usize); 12] = [
    (0, 1),
    (0, 5),
    (0, 6),
    (0, 7),
    (1, 4),
    (1, 6),
    (1, 7),
    (2, 3),
    (2, 4),
    (2, 5),
    (3, 4),
    (3, 5),
];

/// 3-chromatic graph on 8 vertices where DSATUR always uses 4 colours.
/// Maximum degree 4, and every degree-4 neighbourhood induces `K1 ∪ P3`.
pub fn g1() -> Graph {
    Graph::from_edges(8, &G1_EDGES).unwrap()
}

/// Vertex labels of one tree of `forest_g2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct G2Tree {
    pub a: usize,
    pub b: usize,
    /// `C, D` hang off `A`; `E, F` hang off `B`.
    pub middle: [usize; 4],
    /// Two leaves under each middle vertex, same order as `middle`.
    pub leaves: [[usize; 2]; 4],
}

pub const G2_TREE_SIZE: usize = 14;

pub fn g2_tree(t: usize) -> G2Tree {
    let base = G2_TREE_SIZE * t;
    G2Tree {
        a: base,
        b: base + 1,
        middle: [base + 2, base + 3, base + 4, base + 5],
        leaves: [
            [base + 6, base + 7],
            [base + 8, base + 9],
            [base + 10, base + 11],
            [base + 12, base + 13],
        ],
    }
}

/// `c` disjoint copies of the 14-vertex tree with hub edge `A–B`, `A` adjacent
/// to `C, D`, `B` adjacent to `E, F`, and two leaves on each of `C, D, E, F`.
pub fn forest_g2(c: usize) -> Result<Graph, InstanceError> {
    at_least("g2", 1, c)?;
    let mut edges = Vec::with_capacity(13 * c);
    for t in 0..c {
        let tree = g2_tree(t);
        edges.push((tree.a, tree.b));
        edges.push((tree.a, tree.middle[0]));
        edges.push((tree.a, tree.middle[1]));
        edges.push((tree.b, tree.middle[2]));
        edges.push((tree.b, tree.middle[3]));
        for (mid, leaves) in tree.middle.iter().zip(tree.leaves) {
            edges.push((*mid, leaves[0]));
            edges.push((*mid, leaves[1]));
        }
    }
    Ok(Graph::from_edges(G2_TREE_SIZE * c, &edges).unwrap())
}

/// Two-colouring of `forest_g2(c)` where every tree sits in the oscillation
/// trap: `A, B` coloured 0, `C..F` coloured 1, leaves coloured 0.
pub fn g2_trap_coloring(c: usize) -> Coloring {
    let mut colours = vec![0; G2_TREE_SIZE * c];
    for t in 0..c {
        for v in g2_tree(t).middle {
            colours[v] = 1;
        }
    }
    Coloring::new(colours, 2).unwrap()
}

pub const G3_CENTRE: usize = 0;

/// Vertex labels of one leg of `legs_g3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct G3Leg {
    pub a: usize,
    pub b: usize,
    pub pick: usize,
    pub leaf_a: usize,
    pub leaf_b: usize,
}

pub fn g3_leg(i: usize) -> G3Leg {
    let base = 1 + 5 * i;
    G3Leg {
        a: base,
        b: base + 1,
        pick: base + 2,
        leaf_a: base + 3,
        leaf_b: base + 4,
    }
}

/// Centre vertex joined to `legs` diamonds. In each leg the two degree-4
/// vertices `a, b` are adjacent to the centre, to each other, to a shared
/// pick vertex, and each to one private leaf.
pub fn legs_g3(legs: usize) -> Result<Graph, InstanceError> {
    at_least("g3", 2, legs)?;
    let mut edges = Vec::with_capacity(7 * legs);
    for i in 0..legs {
        let l = g3_leg(i);
        edges.extend_from_slice(&[
            (G3_CENTRE, l.a),
            (G3_CENTRE, l.b),
            (l.a, l.b),
            (l.a, l.pick),
            (l.b, l.pick),
            (l.a, l.leaf_a),
            (l.b, l.leaf_b),
        ]);
    }
    Ok(Graph::from_edges(1 + 5 * legs, &edges).unwrap())
}

/// Three-colouring of `legs_g3(legs)` with the two blocked legs: the centre
/// and one degree-4 vertex per blocked leg share colour 0; leg 0 uses colours
/// `{0,1}` on `a, b` and 2 on its pick and leaves, leg 1 uses `{0,2}` and 1.
/// Remaining legs are coloured properly (`a=1, b=2`, pick and leaves 0).
pub fn g3_trap_coloring(legs: usize) -> Coloring {
    let mut colours = vec![0; 1 + 5 * legs];
    let mut paint = |leg: G3Leg, a, b, rest| {
        colours[leg.a] = a;
        colours[leg.b] = b;
        colours[leg.pick] = rest;
        colours[leg.leaf_a] = rest;
        colours[leg.leaf_b] = rest;
    };
    paint(g3_leg(0), 0, 1, 2);
    paint(g3_leg(1), 0, 2, 1);
    for i in 2..legs {
        paint(g3_leg(i), 1, 2, 0);
    }
    Coloring::new(colours, 3).unwrap()
}

/// Random simple graph with maximum degree at most `delta_max`: all vertex
/// pairs in shuffled order, each inserted unless an endpoint is already full.
pub fn bounded_degree_random(n: usize, delta_max: usize, seed: u64) -> Result<Graph, InstanceError> {
    at_least("rand", 1, n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pairs = Vec::with_capacity(n * (n - 1) / 2);
    for u in 0..n {
        for v in u + 1..n {
            pairs.push((u, v));
        }
    }
    pairs.shuffle(&mut rng);
    let mut degree = vec![0usize; n];
    let mut edges = Vec::new();
    for (u, v) in pairs {
        if degree[u] < delta_max && degree[v] < delta_max {
            degree[u] += 1;
            degree[v] += 1;
            edges.push((u, v));
        }
    }
    Ok(Graph::from_edges(n, &edges).unwrap())
}

/// Instance family plus size parameters, parsed from strings such as
/// `path:100`, `ring:9`, `complete:5`, `g1`, `g2:5`, `g3:8`, `rand:200:3:seed7`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InstanceSpec {
    Path(usize),
    Ring(usize),
    Complete(usize),
    G1,
    ForestG2(usize),
    LegsG3(usize),
    BoundedDegreeRandom { n: usize, delta_max: usize, seed: u64 },
}

impl InstanceSpec {
    pub fn generate(&self) -> Result<Graph, InstanceError> {
        match *self {
            InstanceSpec::Path(n) => path(n),
            InstanceSpec::Ring(n) => ring(n),
            InstanceSpec::Complete(n) => complete(n),
            InstanceSpec::G1 => Ok(g1()),
            InstanceSpec::ForestG2(c) => forest_g2(c),
            InstanceSpec::LegsG3(l) => legs_g3(l),
            InstanceSpec::BoundedDegreeRandom { n, delta_max, seed } => bounded_degree_random(n, delta_max, seed),
        }
    }
}

impl fmt::Display for InstanceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InstanceSpec::Path(n) => write!(f, "path:{n}"),
            InstanceSpec::Ring(n) => write!(f, "ring:{n}"),
            InstanceSpec::Complete(n) => write!(f, "complete:{n}"),
            InstanceSpec::G1 => write!(f, "g1"),
            InstanceSpec::ForestG2(c) => write!(f, "g2:{c}"),
            InstanceSpec::LegsG3(l) => write!(f, "g3:{l}"),
            InstanceSpec::BoundedDegreeRandom { n, delta_max, seed } => write!(f, "rand:{n}:{delta_max}:seed{seed}"),
        }
    }
}

impl FromStr for InstanceSpec {
    type Err = InstanceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || InstanceError::BadSpec(s.to_string());
        let parts: Vec<&str> = s.trim().split(':').collect();
        let num = |i: usize| parts.get(i).and_then(|p| p.parse::<usize>().ok()).ok_or_else(bad);
        let spec = match (parts[0], parts.len()) {
            ("path", 2) => InstanceSpec::Path(num(1)?),
            ("ring", 2) => InstanceSpec::Ring(num(1)?),
            ("complete", 2) => InstanceSpec::Complete(num(1)?),
            ("g1", 1) => InstanceSpec::G1,
            ("g2", 2) => InstanceSpec::ForestG2(num(1)?),
            ("g3", 2) => InstanceSpec::LegsG3(num(1)?),
            ("rand", 4) => {
                let seed = parts[3].strip_prefix("seed").unwrap_or(parts[3]);
                InstanceSpec::BoundedDegreeRandom {
                    n: num(1)?,
                    delta_max: num(2)?,
                    seed: seed.parse().map_err(|_| bad())?,
                }
            }
            _ => return Err(bad()),
        };
        Ok(spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::baselines::{dsatur_enumerate, exact_chromatic};
    use crate::coloring::{conflict_count_direct, GammaTable};
    use crate::graph::{classify_brooks, neighbourhood_class_check, BrooksClass};

    #[test]
    fn basic_families() {
        assert_eq!(classify_brooks(&ring(5).unwrap()).class, BrooksClass::OddRing);
        let p2 = path(2).unwrap();
        assert_eq!(p2.edges().collect::<Vec<_>>(), vec![(0, 1)]);
        let k4 = complete(4).unwrap();
        assert_eq!((k4.edge_count(), k4.max_degree()), (6, 3));
        assert!(path(0).is_err() && ring(2).is_err() && complete(2).is_err());
        for n in 1..30 {
            let p = path(n).unwrap();
            assert_eq!(p.edge_count(), n - 1);
            if n >= 2 {
                assert_eq!(p.degrees().iter().filter(|&&d| d == 1).count(), 2);
            }
        }
        for n in 3..30 {
            let r = ring(n).unwrap();
            assert!(r.is_connected() && r.degrees().iter().all(|&d| d == 2));
            assert_eq!(complete(n).unwrap().edge_count(), n * (n - 1) / 2);
        }
    }

    #[test]
    fn g1_properties() {
        let g = g1();
        assert_eq!(g.vertex_count(), 8);
        assert_eq!(g.max_degree(), 4);
        assert!(neighbourhood_class_check(&g).all_induce_k1_p3);
        assert_eq!(exact_chromatic(&g, 1_000_000), Ok(3));
        assert_eq!(dsatur_enumerate(&g, 1_000_000), Ok((4, 4)));
    }

    #[test]
    fn g2_structure() {
        let g = forest_g2(1).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count(), g.max_degree()), (14, 13, 3));
        assert!(g.is_forest());
        assert_eq!(forest_g2(3).unwrap().components().0, 3);
        assert!(forest_g2(0).is_err());
        for c in 1..6 {
            let g = forest_g2(c).unwrap();
            let degs = g.degrees();
            assert!(degs.iter().all(|d| (1..=3).contains(d)));
            // A, B and the four middle vertices have degree 3; the rest are leaves
            assert_eq!(degs.iter().filter(|&&d| d == 3).count(), 6 * c);
            assert_eq!(degs.iter().filter(|&&d| d == 1).count(), 8 * c);
            assert_eq!((g.vertex_count(), g.edge_count()), (14 * c, 13 * c));
        }
        let t = g2_tree(1);
        let g = forest_g2(2).unwrap();
        assert!(g.has_edge(t.a, t.b));
        assert_eq!(g.neighbours(t.a), &[t.b, t.middle[0], t.middle[1]]);
    }

    #[test]
    fn g2_trap_has_one_conflict_per_tree() {
        for c in [1, 4] {
            let g = forest_g2(c).unwrap();
            let s = g2_trap_coloring(c);
            assert_eq!(conflict_count_direct(&g, &s), c);
            let t = GammaTable::build(&g, &s).unwrap();
            // every move out of the trap worsens by one
            for &v in t.conflicting() {
                assert_eq!(t.move_delta(v, 1 - t.colour(v)), Ok(1));
            }
        }
    }

    #[test]
    fn g3_structure() {
        let g = legs_g3(3).unwrap();
        assert_eq!(g.vertex_count(), 16);
        assert_eq!(g.degree(G3_CENTRE), 6);
        assert!(legs_g3(1).is_err());
        assert_eq!(exact_chromatic(&legs_g3(2).unwrap(), 1_000_000), Ok(3));
        for l in 2..8 {
            let g = legs_g3(l).unwrap();
            assert!(g.is_connected());
            let degs = g.degrees();
            assert_eq!(degs.iter().filter(|&&d| d == 4).count(), 2 * l + usize::from(l == 2));
            let r = neighbourhood_class_check(&g);
            for i in 0..l {
                let leg = g3_leg(i);
                assert_eq!((g.degree(leg.a), g.degree(leg.b), g.degree(leg.pick)), (4, 4, 2));
                assert_eq!((g.degree(leg.leaf_a), g.degree(leg.leaf_b)), (1, 1));
                // leg vertices of degree 4 see centre–partner–pick as a path plus their leaf
                assert!(!r.failing.contains(&leg.a) && !r.failing.contains(&leg.b));
            }
            // centre has degree 2L, so the class check fails on max degree (L > 2)
            // or on the centre's 2K2 neighbourhood (L = 2)
            assert!(!r.all_induce_k1_p3);
        }
    }

    #[test]
    fn g3_trap_coloring_blocks_two_legs() {
        let g = legs_g3(2).unwrap();
        let s = g3_trap_coloring(2);
        assert_eq!(conflict_count_direct(&g, &s), 2);
        let t = GammaTable::build(&g, &s).unwrap();
        let mut c = t.conflicting().to_vec();
        c.sort();
        assert_eq!(c, vec![G3_CENTRE, g3_leg(0).a, g3_leg(1).a]);
        let big = legs_g3(10).unwrap();
        assert_eq!(conflict_count_direct(&big, &g3_trap_coloring(10)), 2);
    }

    #[test]
    fn random_bounded_degree() {
        assert_eq!(bounded_degree_random(10, 0, 5).unwrap().edge_count(), 0);
        for seed in 0..10 {
            let g = bounded_degree_random(100, 3, seed).unwrap();
            assert!(g.max_degree() <= 3);
            assert_eq!(g, bounded_degree_random(100, 3, seed).unwrap());
        }
        assert_ne!(bounded_degree_random(50, 3, 1).unwrap(), bounded_degree_random(50, 3, 2).unwrap());
    }

    #[test]
    fn spec_strings() {
        for s in ["path:100", "ring:9", "complete:5", "g1", "g2:5", "g3:8", "rand:200:3:seed7"] {
            let spec: InstanceSpec = s.parse().unwrap();
            assert_eq!(spec.to_string(), s);
            assert!(spec.generate().is_ok());
        }
        assert_eq!(
            "rand:20:3:7".parse::<InstanceSpec>(),
            Ok(InstanceSpec::BoundedDegreeRandom {
                n: 20,
                delta_max: 3,
                seed: 7
            })
        );
        for bad in ["", "path", "path:x", "g1:3", "torus:4", "rand:1:2"] {
            assert!(bad.parse::<InstanceSpec>().is_err(), "{bad}");
        }
        assert!(matches!("g3:1".parse::<InstanceSpec>().unwrap().generate(), Err(InstanceError::TooSmall { .. })));
    }
}

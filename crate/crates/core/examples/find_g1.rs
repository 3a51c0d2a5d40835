//! Exhaustive search over labelled 8-vertex graphs for the smallest graph on
//! which DSATUR always needs 4 colours while 3 suffice, restricted to graphs
//! with maximum degree 4 whose degree-4 vertices have `K1 ∪ P3` neighbourhoods.
//!
//! Prints the first hit in edge-mask order. `instances::g1` freezes its output.

use rayon::prelude::*;
use vdlab::baselines::{dsatur, dsatur_enumerate, exact_chromatic, TieBreak};
use vdlab::graph::{neighbourhood_class_check, Graph};

const N: usize = 8;

fn pairs() -> Vec<(usize, usize)> {
    let mut p = Vec::new();
    for u in 0..N {
        for v in u + 1..N {
            p.push((u, v));
        }
    }
    p
}

fn check(mask: u32, pairs: &[(usize, usize)]) -> Option<Graph> {
    let mut deg = [0u8; N];
    for (i, &(u, v)) in pairs.iter().enumerate() {
        if mask >> i & 1 == 1 {
            deg[u] += 1;
            deg[v] += 1;
            if deg[u] > 4 || deg[v] > 4 {
                return None;
            }
        }
    }
    if !deg.contains(&4) || deg.contains(&0) {
        return None;
    }
    let edges: Vec<_> = pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &p)| p).collect();
    let g = Graph::from_edges(N, &edges).unwrap();
    if !neighbourhood_class_check(&g).all_induce_k1_p3 || !g.is_connected() {
        return None;
    }
    if dsatur(&g, TieBreak::Lexicographic).colours_used < 4 {
        return None;
    }
    if dsatur_enumerate(&g, 10_000_000).ok()?.0 < 4 || exact_chromatic(&g, 1_000_000).ok()? != 3 {
        return None;
    }
    Some(g)
}

fn main() {
    let pairs = pairs();
    let hit = (0u32..1 << pairs.len()).into_par_iter().find_first(|&m| check(m, &pairs).is_some());
    match hit {
        Some(mask) => {
            let g = check(mask, &pairs).unwrap();
            println!("mask {mask:#x}: {:?}", g.edges().collect::<Vec<_>>());
            println!("degrees {:?}", g.degrees());
        }
        None => println!("no graph found"),
    }
}

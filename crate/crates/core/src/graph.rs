//! Undirected simple graphs, structural classifiers and DIMACS `.col` I/O.

use std::collections::VecDeque;
use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("edge ({0}, {1}) has an endpoint outside 0..{2}")]
    OutOfRange(usize, usize, usize),
    #[error("edge ({0}, {0}) is a self-loop")]
    SelfLoop(usize),
    #[error("line {line}: {msg}")]
    Dimacs { line: usize, msg: String },
}

/// Undirected simple graph on vertices `0..n` with sorted adjacency lists.
///
/// Immutable after construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adjacency: Vec<Vec<usize>>,
    edge_count: usize,
}

impl Graph {
    /// Builds a graph from an edge list, dropping duplicate and reversed copies.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut adjacency = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(GraphError::OutOfRange(u, v, n));
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        let mut twice = 0;
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
            twice += list.len();
        }
        Ok(Graph {
            adjacency,
            edge_count: twice / 2,
        })
    }

    pub fn empty(n: usize) -> Self {
        Graph {
            adjacency: vec![Vec::new(); n],
            edge_count: 0,
        }
    }

    #[inline]
    pub fn vertex_count(&self) -> usize {
        self.adjacency.len()
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    #[inline]
    pub fn neighbours(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adjacency.iter().map(Vec::len).collect()
    }

    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adjacency[u].binary_search(&v).is_ok()
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    /// Component index per vertex, numbered in order of first appearance.
    pub fn components(&self) -> (usize, Vec<usize>) {
        let n = self.vertex_count();
        let mut label = vec![usize::MAX; n];
        let mut count = 0;
        let mut queue = VecDeque::new();
        for start in 0..n {
            if label[start] != usize::MAX {
                continue;
            }
            label[start] = count;
            queue.push_back(start);
            while let Some(u) = queue.pop_front() {
                for &w in self.neighbours(u) {
                    if label[w] == usize::MAX {
                        label[w] = count;
                        queue.push_back(w);
                    }
                }
            }
            count += 1;
        }
        (count, label)
    }

    pub fn is_connected(&self) -> bool {
        self.components().0 <= 1
    }

    pub fn is_forest(&self) -> bool {
        let (components, _) = self.components();
        self.edge_count + components == self.vertex_count()
    }

    /// Subgraph induced by `vertices`, relabelled to `0..vertices.len()` in the given order.
    pub fn induced(&self, vertices: &[usize]) -> Graph {
        let mut edges = Vec::new();
        for (i, &u) in vertices.iter().enumerate() {
            for (j, &v) in vertices.iter().enumerate().skip(i + 1) {
                if self.has_edge(u, v) {
                    edges.push((i, j));
                }
            }
        }
        Graph::from_edges(vertices.len(), &edges).expect("induced subgraph is simple")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BrooksClass {
    Complete,
    OddRing,
    Other,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BrooksReport {
    pub class: BrooksClass,
    pub connected: bool,
}

/// Classifies `g` against the two exceptions of Brooks' theorem.
pub fn classify_brooks(g: &Graph) -> BrooksReport {
    let n = g.vertex_count();
    let connected = g.is_connected();
    let class = if connected && n >= 1 && g.edge_count() == n * (n - 1) / 2 {
        BrooksClass::Complete
    } else if connected && n >= 3 && n % 2 == 1 && (0..n).all(|v| g.degree(v) == 2) {
        BrooksClass::OddRing
    } else {
        BrooksClass::Other
    };
    BrooksReport { class, connected }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NeighbourhoodReport {
    pub max_degree: usize,
    pub degree4_vertices: Vec<usize>,
    /// Degree-4 vertices whose neighbourhood does not induce `K1 ∪ P3`.
    pub failing: Vec<usize>,
    pub all_induce_k1_p3: bool,
}

/// True iff the 4-vertex graph `h` is an isolated vertex plus a path on the other three.
pub fn is_k1_union_p3(h: &Graph) -> bool {
    if h.vertex_count() != 4 || h.edge_count() != 2 {
        return false;
    }
    let mut degs = h.degrees();
    degs.sort_unstable();
    // Two edges with degree sequence [0,1,1,2] must share the middle vertex.
    degs == [0, 1, 1, 2]
}

/// Checks that every degree-4 vertex has a `K1 ∪ P3` neighbourhood and that `Δ ≤ 4`.
pub fn neighbourhood_class_check(g: &Graph) -> NeighbourhoodReport {
    let max_degree = g.max_degree();
    let degree4_vertices: Vec<usize> = (0..g.vertex_count()).filter(|&v| g.degree(v) == 4).collect();
    let failing: Vec<usize> = degree4_vertices
        .iter()
        .copied()
        .filter(|&v| !is_k1_union_p3(&g.induced(g.neighbours(v))))
        .collect();
    NeighbourhoodReport {
        max_degree,
        all_induce_k1_p3: max_degree <= 4 && failing.is_empty(),
        degree4_vertices,
        failing,
    }
}

/// Parses DIMACS `.col` text. With `strict`, an edge count differing from the
/// header is an error; otherwise it is tolerated.
pub fn parse_dimacs(text: &str, strict: bool) -> Result<Graph, GraphError> {
    let err = |line: usize, msg: String| GraphError::Dimacs { line, msg };
    let mut header: Option<(usize, usize)> = None;
    let mut edges = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        let mut fields = line.split_whitespace();
        match fields.next() {
            Some("p") => {
                if header.is_some() {
                    return Err(err(line_no, "duplicate problem line".into()));
                }
                let format = fields.next();
                if !matches!(format, Some("edge") | Some("col")) {
                    return Err(err(line_no, format!("unsupported format {format:?}")));
                }
                let n = parse_num(fields.next(), line_no, "vertex count")?;
                let m = parse_num(fields.next(), line_no, "edge count")?;
                header = Some((n, m));
            }
            Some("e") => {
                let (n, _) = header.ok_or_else(|| err(line_no, "edge before problem line".into()))?;
                let u = parse_num(fields.next(), line_no, "endpoint")?;
                let v = parse_num(fields.next(), line_no, "endpoint")?;
                if u == 0 || v == 0 || u > n || v > n {
                    return Err(err(line_no, format!("vertex index out of range 1..={n} in edge ({u}, {v})")));
                }
                if u == v {
                    return Err(err(line_no, format!("self-loop on vertex {u}")));
                }
                edges.push((u - 1, v - 1));
            }
            Some(other) => return Err(err(line_no, format!("unknown line type {other:?}"))),
            None => unreachable!(),
        }
    }
    let (n, m) = header.ok_or_else(|| err(0, "missing problem line".into()))?;
    let g = Graph::from_edges(n, &edges)?;
    if strict && edges.len() != m {
        return Err(err(0, format!("header declares {m} edges, found {}", edges.len())));
    }
    Ok(g)
}

fn parse_num(field: Option<&str>, line: usize, what: &str) -> Result<usize, GraphError> {
    let field = field.ok_or_else(|| GraphError::Dimacs {
        line,
        msg: format!("missing {what}"),
    })?;
    field.parse().map_err(|_| GraphError::Dimacs {
        line,
        msg: format!("bad {what} {field:?}"),
    })
}

pub fn write_dimacs(g: &Graph) -> String {
    let mut out = format!("p edge {} {}\n", g.vertex_count(), g.edge_count());
    for (u, v) in g.edges() {
        writeln!(out, "e {} {}", u + 1, v + 1).unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring(n: usize) -> Graph {
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Graph::from_edges(n, &edges).unwrap()
    }

    fn complete(n: usize) -> Graph {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                edges.push((u, v));
            }
        }
        Graph::from_edges(n, &edges).unwrap()
    }

    #[test]
    fn construction_examples() {
        let p = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(p.degrees(), vec![1, 2, 1]);
        let single = Graph::from_edges(1, &[]).unwrap();
        assert_eq!((single.vertex_count(), single.edge_count()), (1, 0));
        let dup = Graph::from_edges(4, &[(0, 1), (0, 1), (1, 0)]).unwrap();
        assert_eq!(dup.edge_count(), 1);
        assert_eq!(dup.neighbours(0), &[1]);
    }

    #[test]
    fn construction_errors_name_the_pair() {
        assert_eq!(Graph::from_edges(3, &[(0, 3)]), Err(GraphError::OutOfRange(0, 3, 3)));
        assert_eq!(Graph::from_edges(3, &[(1, 1)]), Err(GraphError::SelfLoop(1)));
        assert!(Graph::from_edges(3, &[(1, 1)]).unwrap_err().to_string().contains("(1, 1)"));
    }

    #[test]
    fn brooks_examples() {
        assert_eq!(classify_brooks(&complete(4)).class, BrooksClass::Complete);
        assert_eq!(classify_brooks(&ring(5)).class, BrooksClass::OddRing);
        let path = Graph::from_edges(6, &(0..5).map(|i| (i, i + 1)).collect::<Vec<_>>()).unwrap();
        assert_eq!(
            classify_brooks(&path),
            BrooksReport {
                class: BrooksClass::Other,
                connected: true
            }
        );
        for t in 2..12 {
            assert_eq!(classify_brooks(&ring(2 * t + 1)).class, BrooksClass::OddRing);
            assert_eq!(classify_brooks(&ring(2 * t)).class, BrooksClass::Other);
        }
        // two disjoint triangles: 2-regular, odd vertex count per part, but disconnected
        let two = Graph::from_edges(6, &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)]).unwrap();
        assert_eq!(
            classify_brooks(&two),
            BrooksReport {
                class: BrooksClass::Other,
                connected: false
            }
        );
    }

    #[test]
    fn neighbourhood_examples() {
        let r = neighbourhood_class_check(&complete(5));
        assert_eq!(r.max_degree, 4);
        assert!(!r.all_induce_k1_p3);
        assert_eq!(r.failing.len(), 5);
        let r = neighbourhood_class_check(&complete(4));
        assert!(r.all_induce_k1_p3 && r.degree4_vertices.is_empty());
        // star K_{1,4}: neighbourhood is 4 isolated vertices
        let star = Graph::from_edges(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap();
        assert!(!neighbourhood_class_check(&star).all_induce_k1_p3);
        // add path 1-2-3 among the leaves
        let good = Graph::from_edges(5, &[(0, 1), (0, 2), (0, 3), (0, 4), (1, 2), (2, 3)]).unwrap();
        assert!(neighbourhood_class_check(&good).all_induce_k1_p3);
        // 2K2 has the right edge count but the wrong shape
        let twok2 = Graph::from_edges(4, &[(0, 1), (2, 3)]).unwrap();
        assert!(!is_k1_union_p3(&twok2));
    }

    #[test]
    fn dimacs_examples() {
        let g = parse_dimacs("p edge 3 2\ne 1 2\ne 2 3", true).unwrap();
        assert_eq!(g, Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap());
        let text = write_dimacs(&complete(3));
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], "p edge 3 3");
        assert_eq!(lines.iter().filter(|l| l.starts_with("e ")).count(), 3);
        assert!(matches!(parse_dimacs("p edge 2 1\ne 1 5", true), Err(GraphError::Dimacs { line: 2, .. })));
    }

    #[test]
    fn dimacs_comments_and_strictness() {
        let text = "c a comment\np edge 3 3\nc another\ne 1 2\ne 2 3\n";
        assert!(parse_dimacs(text, true).is_err());
        assert_eq!(parse_dimacs(text, false).unwrap().edge_count(), 2);
        assert!(parse_dimacs("e 1 2\n", false).is_err());
        assert!(parse_dimacs("p edge x 1\n", false).is_err());
        assert!(parse_dimacs("", false).is_err());
    }
}

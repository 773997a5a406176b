//! (d,k)-regular hypergraphs, their incidence (biadjacency) matrices and the
//! correspondence with bipartite biregular graphs.

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;

/// A simple (d,k)-regular hypergraph on vertices `0..n`.
///
/// Hyperedges are stored as strictly increasing vertex lists and the edge
/// list itself is kept sorted, so two hypergraphs with the same edge set
/// compare equal and serialise identically.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "HypergraphRepr")]
pub struct Hypergraph {
    n: usize,
    d: usize,
    k: usize,
    edges: Vec<Vec<usize>>,
    #[serde(skip)]
    incidence: Vec<Vec<usize>>,
}

#[derive(Deserialize)]
struct HypergraphRepr {
    n: usize,
    d: usize,
    k: usize,
    edges: Vec<Vec<usize>>,
}

impl TryFrom<HypergraphRepr> for Hypergraph {
    type Error = Error;

    fn try_from(r: HypergraphRepr) -> Result<Self> {
        build_hypergraph(r.n, r.edges, r.d, r.k)
    }
}

/// Validates and canonicalises a (d,k)-regular hypergraph.
pub fn build_hypergraph(
    n: usize,
    edges: Vec<Vec<usize>>,
    d: usize,
    k: usize,
) -> Result<Hypergraph> {
    if k < 2 || d < 1 {
        return Err(Error::InvalidParameters(format!(
            "need k >= 2 and d >= 1, got d = {d}, k = {k}"
        )));
    }
    let mut canonical = Vec::with_capacity(edges.len());
    for (idx, mut e) in edges.into_iter().enumerate() {
        if let Some(&v) = e.iter().find(|&&v| v >= n) {
            return Err(Error::VertexOutOfRange { vertex: v, n });
        }
        e.sort_unstable();
        e.dedup();
        if e.len() != k {
            return Err(Error::NotUniform {
                edge: idx,
                size: e.len(),
                k,
            });
        }
        canonical.push((idx, e));
    }
    if !(n * d).is_multiple_of(k) || canonical.len() != n * d / k {
        return Err(Error::CountMismatch {
            expected: n * d / k,
            actual: canonical.len(),
        });
    }
    canonical.sort_by(|a, b| a.1.cmp(&b.1));
    for w in canonical.windows(2) {
        if w[0].1 == w[1].1 {
            let (first, second) = (w[0].0.min(w[1].0), w[0].0.max(w[1].0));
            return Err(Error::DuplicateHyperedge { first, second });
        }
    }
    let edges: Vec<Vec<usize>> = canonical.into_iter().map(|(_, e)| e).collect();
    let incidence = incidence_lists(n, &edges);
    for (vertex, inc) in incidence.iter().enumerate() {
        if inc.len() != d {
            return Err(Error::NotRegular {
                vertex,
                degree: inc.len(),
                expected: d,
            });
        }
    }
    Ok(Hypergraph {
        n,
        d,
        k,
        edges,
        incidence,
    })
}

fn incidence_lists(n: usize, edges: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut inc = vec![Vec::new(); n];
    for (j, e) in edges.iter().enumerate() {
        for &v in e {
            inc[v].push(j);
        }
    }
    inc
}

impl Hypergraph {
    /// The complete k-uniform hypergraph on `n` vertices, which is
    /// (C(n-1, k-1), k)-regular.
    pub fn complete(n: usize, k: usize) -> Result<Self> {
        let mut edges = Vec::new();
        let mut current = Vec::with_capacity(k);
        fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if cur.len() == k {
                out.push(cur.clone());
                return;
            }
            for v in start..n {
                cur.push(v);
                rec(v + 1, n, k, cur, out);
                cur.pop();
            }
        }
        rec(0, n, k, &mut current, &mut edges);
        let d = edges.len() * k / n.max(1);
        build_hypergraph(n, edges, d, k)
    }

    /// Vertex-disjoint union; the second copy is relabelled after the first.
    pub fn disjoint_union(&self, other: &Self) -> Result<Self> {
        if self.d != other.d || self.k != other.k {
            return Err(Error::InvalidParameters(
                "disjoint union needs matching (d, k)".into(),
            ));
        }
        let mut edges = self.edges.clone();
        edges.extend(
            other
                .edges
                .iter()
                .map(|e| e.iter().map(|v| v + self.n).collect()),
        );
        build_hypergraph(self.n + other.n, edges, self.d, self.k)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn edges(&self) -> &[Vec<usize>] {
        &self.edges
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Indices of the hyperedges containing vertex `v`.
    pub fn incident_edges(&self, v: usize) -> &[usize] {
        &self.incidence[v]
    }

    /// `A_ij` = number of hyperedges containing both `i` and `j`, zero
    /// diagonal.
    pub fn adjacency_matrix(&self) -> DenseMatrix {
        let mut a = DenseMatrix::zeros(self.n, self.n);
        for e in &self.edges {
            for &i in e {
                for &j in e {
                    if i != j {
                        a[(i, j)] += 1.0;
                    }
                }
            }
        }
        a
    }

    /// n x |E| incidence matrix, `X[i][e] = 1` iff `i ∈ e`.
    pub fn incidence_matrix(&self) -> DenseMatrix {
        let mut x = DenseMatrix::zeros(self.n, self.edges.len());
        for (j, e) in self.edges.iter().enumerate() {
            for &i in e {
                x[(i, j)] = 1.0;
            }
        }
        x
    }

    pub fn to_bipartite(&self) -> BipartiteGraph {
        BipartiteGraph {
            n1: self.n,
            n2: self.edges.len(),
            d1: self.d,
            d2: self.k,
            x: self.incidence_matrix(),
        }
    }

    /// Connectivity of the associated bipartite graph (vertices plus
    /// hyperedges), which is equivalent to connectivity of the hypergraph.
    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let m = self.edges.len();
        // nodes 0..n are vertices, n..n+m are hyperedges
        let mut seen = vec![false; self.n + m];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        let mut visited = 1;
        while let Some(u) = queue.pop_front() {
            let next: &[usize] = if u < self.n {
                &self.incidence[u]
            } else {
                &self.edges[u - self.n]
            };
            for &w in next {
                let node = if u < self.n { w + self.n } else { w };
                if !seen[node] {
                    seen[node] = true;
                    visited += 1;
                    queue.push_back(node);
                }
            }
        }
        visited == self.n + m
    }

    /// Number of cycles of length `l` (`1 <= l <= 8`): closed walks with `l`
    /// distinct hyperedges and `l` distinct vertices, each cycle counted
    /// once regardless of starting point and direction.
    pub fn count_cycles(&self, l: usize) -> Result<u64> {
        if l == 0 || l > 8 {
            return Err(Error::LengthTooLarge(l));
        }
        if l == 1 {
            return Ok(0);
        }
        let mut total = 0u64;
        let mut verts = Vec::with_capacity(l);
        let mut used_edges = Vec::with_capacity(l);
        for v0 in 0..self.n {
            verts.push(v0);
            total += self.extend_cycle(l, &mut verts, &mut used_edges);
            verts.pop();
        }
        debug_assert_eq!(total % (2 * l as u64), 0);
        Ok(total / (2 * l as u64))
    }

    fn extend_cycle(&self, l: usize, verts: &mut Vec<usize>, used: &mut Vec<usize>) -> u64 {
        let cur = *verts.last().unwrap();
        let mut count = 0;
        for &e in &self.incidence[cur] {
            if used.contains(&e) {
                continue;
            }
            if used.len() == l - 1 {
                // closing edge must contain the start vertex
                if self.edges[e].binary_search(&verts[0]).is_ok() {
                    count += 1;
                }
                continue;
            }
            used.push(e);
            for &next in &self.edges[e] {
                if verts.contains(&next) {
                    continue;
                }
                verts.push(next);
                count += self.extend_cycle(l, verts, used);
                verts.pop();
            }
            used.pop();
        }
        count
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("hypergraph serialises")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::InvalidParameters(e.to_string()))
    }
}

/// A bipartite graph on `V1 ∪ V2` given by its `n1 x n2` biadjacency
/// matrix, with every row summing to `d1` and every column to `d2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BipartiteGraph {
    pub n1: usize,
    pub n2: usize,
    pub d1: usize,
    pub d2: usize,
    pub x: DenseMatrix,
}

impl BipartiteGraph {
    pub fn new(x: DenseMatrix, d1: usize, d2: usize) -> Result<Self> {
        let (n1, n2) = (x.rows(), x.cols());
        if x.as_slice().iter().any(|&v| v != 0.0 && v != 1.0) {
            return Err(Error::InvalidParameters(
                "biadjacency entries must be 0 or 1".into(),
            ));
        }
        for (i, s) in x.row_sums().into_iter().enumerate() {
            if s as usize != d1 {
                return Err(Error::NotRegular {
                    vertex: i,
                    degree: s as usize,
                    expected: d1,
                });
            }
        }
        for (j, s) in x.col_sums().into_iter().enumerate() {
            if s as usize != d2 {
                return Err(Error::NotRegular {
                    vertex: n1 + j,
                    degree: s as usize,
                    expected: d2,
                });
            }
        }
        if n1 * d1 != n2 * d2 {
            return Err(Error::CountMismatch {
                expected: n1 * d1,
                actual: n2 * d2,
            });
        }
        Ok(Self { n1, n2, d1, d2, x })
    }

    /// Neighbourhood in `V1` of column `j`.
    pub fn column_support(&self, j: usize) -> Vec<usize> {
        (0..self.n1).filter(|&i| self.x[(i, j)] != 0.0).collect()
    }

    /// Edges `(i, j)` with `i ∈ V1`, `j ∈ V2`, in row-major order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.n1 * self.d1);
        for i in 0..self.n1 {
            for j in 0..self.n2 {
                if self.x[(i, j)] != 0.0 {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Adjacency of the whole bipartite graph, `[[0, X], [Xᵀ, 0]]`.
    pub fn adjacency_matrix(&self) -> DenseMatrix {
        let n = self.n1 + self.n2;
        let mut a = DenseMatrix::zeros(n, n);
        for (i, j) in self.edges() {
            a[(i, self.n1 + j)] = 1.0;
            a[(self.n1 + j, i)] = 1.0;
        }
        a
    }

    /// First pair of columns with identical supports, if any.
    pub fn duplicate_columns(&self) -> Option<(usize, usize)> {
        let mut seen: HashMap<Vec<usize>, usize> = HashMap::with_capacity(self.n2);
        for j in 0..self.n2 {
            if let Some(&first) = seen.get(&self.column_support(j)) {
                return Some((first, j));
            }
            seen.insert(self.column_support(j), j);
        }
        None
    }

    /// Hypergraph whose hyperedges are the column neighbourhoods. Fails
    /// when two columns coincide, since the result would have a repeated
    /// hyperedge.
    pub fn to_hypergraph(&self) -> Result<Hypergraph> {
        if let Some((a, b)) = self.duplicate_columns() {
            return Err(Error::MultipleHyperedges(a, b));
        }
        let edges = (0..self.n2).map(|j| self.column_support(j)).collect();
        build_hypergraph(self.n1, edges, self.d1, self.d2)
    }
}

pub fn from_bipartite(g: &BipartiteGraph) -> Result<Hypergraph> {
    g.to_hypergraph()
}

pub fn to_bipartite(h: &Hypergraph) -> BipartiteGraph {
    h.to_bipartite()
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn triangle() -> Hypergraph {
        build_hypergraph(3, vec![vec![0, 1], vec![1, 2], vec![0, 2]], 2, 2).unwrap()
    }

    #[test]
    fn complete_three_uniform_on_four() {
        let triples = vec![vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3]];
        let h = build_hypergraph(4, triples, 3, 3).unwrap();
        assert_eq!(h, Hypergraph::complete(4, 3).unwrap());
        let a = h.adjacency_matrix();
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(a[(i, j)], if i == j { 0.0 } else { 2.0 });
            }
        }
    }

    #[test]
    fn validation_errors() {
        let dup = vec![vec![0, 1, 2], vec![0, 1, 2], vec![0, 2, 3], vec![1, 2, 3]];
        assert!(matches!(
            build_hypergraph(4, dup, 3, 3),
            Err(Error::DuplicateHyperedge { first: 0, second: 1 })
        ));
        assert!(matches!(
            build_hypergraph(3, vec![vec![0, 1], vec![1, 5], vec![0, 2]], 2, 2),
            Err(Error::VertexOutOfRange { vertex: 5, n: 3 })
        ));
        assert!(matches!(
            build_hypergraph(3, vec![vec![0, 1], vec![1, 1], vec![0, 2]], 2, 2),
            Err(Error::NotUniform { edge: 1, size: 1, k: 2 })
        ));
        assert!(matches!(
            build_hypergraph(3, vec![vec![0, 1], vec![1, 2]], 2, 2),
            Err(Error::CountMismatch { expected: 3, actual: 2 })
        ));
        // right count, wrong degrees
        assert!(matches!(
            build_hypergraph(4, vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2]], 2, 2),
            Err(Error::NotRegular { vertex: 0, degree: 3, expected: 2 })
        ));
        assert!(build_hypergraph(3, vec![], 0, 2).is_err());
    }

    #[test]
    fn triangle_is_a_graph() {
        let t = triangle();
        let a = t.adjacency_matrix();
        assert_eq!(a.row_sums(), vec![2.0; 3]);
        assert_eq!(a.trace(), 0.0);
        assert!(t.is_connected());
    }

    #[test]
    fn bipartite_round_trip_and_gram_identity() {
        for h in [triangle(), Hypergraph::complete(4, 3).unwrap(), Hypergraph::complete(5, 3).unwrap()] {
            let g = h.to_bipartite();
            assert_eq!(g.x.row_sums(), vec![h.d() as f64; h.n()]);
            assert_eq!(g.x.col_sums(), vec![h.k() as f64; h.num_edges()]);
            assert_eq!(from_bipartite(&g).unwrap(), h);
            let gram = g.x.matmul(&g.x.transpose()).unwrap();
            assert_eq!(gram, h.adjacency_matrix().shift_diagonal(h.d() as f64));
        }
    }

    #[test]
    fn identical_columns_are_multiple_hyperedges() {
        // two hyperedges {0,1,2} on vertices 0..3, plus the rest of a (2,3) structure
        let x = DenseMatrix::from_rows(&[
            vec![1.0, 1.0, 0.0, 0.0],
            vec![1.0, 1.0, 0.0, 0.0],
            vec![1.0, 1.0, 0.0, 0.0],
            vec![0.0, 0.0, 1.0, 1.0],
            vec![0.0, 0.0, 1.0, 1.0],
            vec![0.0, 0.0, 1.0, 1.0],
        ])
        .unwrap();
        let g = BipartiteGraph::new(x, 2, 3).unwrap();
        assert_eq!(from_bipartite(&g), Err(Error::MultipleHyperedges(0, 1)));
    }

    #[test]
    fn bipartite_validation() {
        let x = DenseMatrix::from_rows(&[vec![1.0, 0.0], vec![1.0, 1.0]]).unwrap();
        assert!(BipartiteGraph::new(x, 1, 1).is_err());
        let x = DenseMatrix::from_rows(&[vec![2.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert!(BipartiteGraph::new(x, 1, 1).is_err());
    }

    /// Rooted, oriented enumeration of `(v0, e1, v1, e2, v0)` tuples.
    fn two_cycle_tuples(h: &Hypergraph) -> u64 {
        let mut count = 0;
        for v0 in 0..h.n() {
            for v1 in 0..h.n() {
                if v0 == v1 {
                    continue;
                }
                for (i, e1) in h.edges().iter().enumerate() {
                    for (j, e2) in h.edges().iter().enumerate() {
                        let both = |e: &Vec<usize>| e.contains(&v0) && e.contains(&v1);
                        if i != j && both(e1) && both(e2) {
                            count += 1;
                        }
                    }
                }
            }
        }
        count
    }

    #[test]
    fn cycle_counts() {
        let t = triangle();
        assert_eq!(t.count_cycles(1).unwrap(), 0);
        assert_eq!(t.count_cycles(2).unwrap(), 0);
        assert_eq!(t.count_cycles(3).unwrap(), 1);
        assert_eq!(t.count_cycles(4).unwrap(), 0);
        assert!(matches!(t.count_cycles(9), Err(Error::LengthTooLarge(9))));
        assert!(matches!(t.count_cycles(0), Err(Error::LengthTooLarge(0))));

        let c4 = build_hypergraph(4, vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![0, 3]], 2, 2).unwrap();
        assert_eq!(c4.count_cycles(4).unwrap(), 1);
        assert_eq!(c4.count_cycles(3).unwrap(), 0);

        let k4 = Hypergraph::complete(4, 3).unwrap();
        let brute = two_cycle_tuples(&k4);
        assert_eq!(brute, 24);
        assert_eq!(k4.count_cycles(2).unwrap(), brute / 4);
        assert_eq!(k4.count_cycles(2).unwrap(), 6);

        // K4 as a graph: 4 triangles and 3 four-cycles
        let k4g = Hypergraph::complete(4, 2).unwrap();
        assert_eq!(k4g.count_cycles(3).unwrap(), 4);
        assert_eq!(k4g.count_cycles(4).unwrap(), 3);
    }

    #[test]
    fn disconnected_union() {
        let two = triangle().disjoint_union(&triangle()).unwrap();
        assert_eq!(two.n(), 6);
        assert!(!two.is_connected());
    }

    #[test]
    fn json_round_trip() {
        let h = Hypergraph::complete(4, 3).unwrap();
        let s = h.to_json();
        assert_eq!(s, r#"{"n":4,"d":3,"k":3,"edges":[[0,1,2],[0,1,3],[0,2,3],[1,2,3]]}"#);
        assert_eq!(Hypergraph::from_json(&s).unwrap(), h);
        let bad = r#"{"n":4,"d":3,"k":3,"edges":[[0,1,2],[0,1,2],[0,2,3],[1,2,3]]}"#;
        assert!(Hypergraph::from_json(bad).is_err());
    }
}

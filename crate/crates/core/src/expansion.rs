//! Hyperedge counts between vertex sets and randomized checks of the
//! expander mixing and vertex expansion bounds.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypergraph::Hypergraph;
use crate::linalg::DenseMatrix;
use crate::spectra::GapReport;

/// Slack below which a trial counts as a violation.
pub const VIOLATION_TOL: f64 = 1e-9;

fn indicator(n: usize, set: &[usize]) -> Result<Vec<f64>> {
    let mut v = vec![0.0; n];
    for &i in set {
        if i >= n {
            return Err(Error::VertexOutOfRange { vertex: i, n });
        }
        v[i] = 1.0;
    }
    Ok(v)
}

fn edge_count_with(a: &DenseMatrix, v1: &[usize], v2: &[usize]) -> Result<u64> {
    let n = a.rows();
    let x = indicator(n, v1)?;
    let y = a.matvec(&indicator(n, v2)?)?;
    Ok(x.iter().zip(&y).map(|(p, q)| p * q).sum::<f64>().round() as u64)
}

/// `e(V1, V2) = ⟨1_{V1}, A 1_{V2}⟩`: triples `(i, j, e)` with `i ∈ V1`,
/// `j ∈ V2`, `i ≠ j` and `{i, j} ⊂ e`. Repeated vertices in a set count once.
pub fn edge_count(h: &Hypergraph, v1: &[usize], v2: &[usize]) -> Result<u64> {
    edge_count_with(&h.adjacency_matrix(), v1, v2)
}

/// Vertices sharing a hyperedge with some other vertex of `s`.
pub fn neighborhood(h: &Hypergraph, s: &[usize]) -> Result<Vec<usize>> {
    if s.is_empty() {
        return Err(Error::EmptySet);
    }
    let n = h.n();
    let mut inside = vec![false; n];
    for &i in s {
        if i >= n {
            return Err(Error::VertexOutOfRange { vertex: i, n });
        }
        inside[i] = true;
    }
    let mut hit = vec![false; n];
    for e in h.edges() {
        let members: Vec<usize> = e.iter().copied().filter(|&v| inside[v]).collect();
        match members.len() {
            0 => {}
            // the lone member is not its own neighbour through this edge
            1 => e.iter().filter(|&&v| v != members[0]).for_each(|&v| hit[v] = true),
            _ => e.iter().for_each(|&v| hit[v] = true),
        }
    }
    Ok((0..n).filter(|&v| hit[v]).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpansionReport {
    pub n: usize,
    pub d: usize,
    pub k: usize,
    pub lambda: f64,
    pub seed: u64,
    pub trials: usize,
    pub violations: usize,
    /// Minimum over trials of bound minus observed quantity (or observed
    /// minus bound for the lower bound).
    pub worst_slack: f64,
}

impl ExpansionReport {
    fn new(h: &Hypergraph, gap: &GapReport, seed: u64) -> Self {
        Self {
            n: h.n(),
            d: h.d(),
            k: h.k(),
            lambda: gap.lambda,
            seed,
            trials: 0,
            violations: 0,
            worst_slack: f64::INFINITY,
        }
    }

    fn record(&mut self, slack: f64) {
        self.trials += 1;
        if slack < -VIOLATION_TOL {
            self.violations += 1;
        }
        self.worst_slack = self.worst_slack.min(slack);
    }
}

/// Size uniform in `1..=n`, then a uniform subset of that size, sorted.
pub fn random_subset(n: usize, rng: &mut impl Rng) -> Vec<usize> {
    let size = rng.random_range(1..=n);
    let mut s = sample(rng, n, size).into_vec();
    s.sort_unstable();
    s
}

/// `λ √(|V1||V2|(1-|V1|/n)(1-|V2|/n)) - |e(V1,V2) - d(k-1)|V1||V2|/n|`.
pub fn expander_mixing_slack(h: &Hypergraph, lambda: f64, e12: u64, s1: usize, s2: usize) -> f64 {
    let n = h.n() as f64;
    let (a, b) = (s1 as f64, s2 as f64);
    let dk = (h.d() * (h.k() - 1)) as f64;
    let lhs = (e12 as f64 - dk * a * b / n).abs();
    let rhs = lambda * (a * b * (1.0 - a / n) * (1.0 - b / n)).max(0.0).sqrt();
    rhs - lhs
}

/// `|N(S)|/|S| - 1 / (1 - (1 - λ²/(d(k-1))²)(1 - |S|/n))`.
pub fn vertex_expansion_slack(h: &Hypergraph, lambda: f64, s: usize, ns: usize) -> f64 {
    let n = h.n() as f64;
    let dk = (h.d() * (h.k() - 1)) as f64;
    let bound = 1.0 / (1.0 - (1.0 - lambda * lambda / (dk * dk)) * (1.0 - s as f64 / n));
    ns as f64 / s as f64 - bound
}

pub fn verify_expander_mixing(
    h: &Hypergraph,
    gap: &GapReport,
    trials: usize,
    seed: u64,
) -> Result<ExpansionReport> {
    if trials == 0 {
        return Err(Error::InvalidParameters("trials must be at least 1".into()));
    }
    let a = h.adjacency_matrix();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = ExpansionReport::new(h, gap, seed);
    for _ in 0..trials {
        let v1 = random_subset(h.n(), &mut rng);
        let v2 = random_subset(h.n(), &mut rng);
        let e12 = edge_count_with(&a, &v1, &v2)?;
        rep.record(expander_mixing_slack(h, gap.lambda, e12, v1.len(), v2.len()));
    }
    Ok(rep)
}

pub fn verify_vertex_expansion(
    h: &Hypergraph,
    gap: &GapReport,
    trials: usize,
    seed: u64,
) -> Result<ExpansionReport> {
    if trials == 0 {
        return Err(Error::InvalidParameters("trials must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = ExpansionReport::new(h, gap, seed);
    for _ in 0..trials {
        let s = random_subset(h.n(), &mut rng);
        let ns = neighborhood(h, &s)?;
        rep.record(vertex_expansion_slack(h, gap.lambda, s.len(), ns.len()));
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampler::{sample_regular_hypergraph, SampleConfig};
    use crate::spectra::adjacency_gap;

    /// `|{(i, j, e) : i ∈ V1, j ∈ V2, i ≠ j, {i, j} ⊂ e}|` by enumeration.
    fn triple_count(h: &Hypergraph, v1: &[usize], v2: &[usize]) -> u64 {
        let mut c = 0;
        for e in h.edges() {
            for &i in v1 {
                for &j in v2 {
                    if i != j && e.contains(&i) && e.contains(&j) {
                        c += 1;
                    }
                }
            }
        }
        c
    }

    fn k4() -> Hypergraph {
        Hypergraph::complete(4, 3).unwrap()
    }

    #[test]
    fn edge_count_examples() {
        let tri = Hypergraph::complete(3, 2).unwrap();
        assert_eq!(edge_count(&tri, &[0], &[1]).unwrap(), 1);
        assert_eq!(edge_count(&k4(), &[0, 1, 2, 3], &[0, 1, 2, 3]).unwrap(), 24);
        let a = k4().adjacency_matrix();
        assert_eq!(edge_count(&k4(), &[1], &[3]).unwrap() as f64, a[(1, 3)]);
        assert!(edge_count(&k4(), &[4], &[0]).is_err());
    }

    #[test]
    fn neighborhood_examples() {
        let tri = Hypergraph::complete(3, 2).unwrap();
        assert_eq!(neighborhood(&tri, &[0]).unwrap(), vec![1, 2]);
        assert_eq!(neighborhood(&k4(), &[0]).unwrap(), vec![1, 2, 3]);
        assert_eq!(neighborhood(&k4(), &[0, 1, 2, 3]).unwrap(), vec![0, 1, 2, 3]);
        assert!(matches!(neighborhood(&k4(), &[]), Err(Error::EmptySet)));
    }

    #[test]
    fn quadratic_form_matches_triples() {
        let (h, _) = sample_regular_hypergraph(&SampleConfig::new(30, 4, 3, 8)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let v1 = random_subset(h.n(), &mut rng);
            let v2 = random_subset(h.n(), &mut rng);
            assert_eq!(edge_count(&h, &v1, &v2).unwrap(), triple_count(&h, &v1, &v2));
        }
    }

    #[test]
    fn edges_from_set_land_in_neighborhood() {
        let (h, _) = sample_regular_hypergraph(&SampleConfig::new(60, 5, 3, 2)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let s = random_subset(h.n(), &mut rng);
            let ns = neighborhood(&h, &s).unwrap();
            let e = edge_count(&h, &s, &ns).unwrap();
            assert_eq!(e, (s.len() * h.d() * (h.k() - 1)) as u64);
        }
    }

    #[test]
    fn equality_cases() {
        let h = k4();
        let gap = adjacency_gap(&h).unwrap();
        let all = [0, 1, 2, 3];
        let e = edge_count(&h, &all, &all).unwrap();
        assert!(expander_mixing_slack(&h, gap.lambda, e, 4, 4).abs() < 1e-12);
        let ns = neighborhood(&h, &[0]).unwrap();
        assert!(vertex_expansion_slack(&h, gap.lambda, 1, ns.len()).abs() < 1e-9);
        // whole vertex set: bound 1
        assert!(vertex_expansion_slack(&h, gap.lambda, 4, 4).abs() < 1e-12);
    }

    #[test]
    fn sampled_theorems_hold() {
        let (h, _) = sample_regular_hypergraph(&SampleConfig::new(120, 5, 3, 4)).unwrap();
        assert!(h.is_connected());
        let gap = adjacency_gap(&h).unwrap();
        let r = verify_expander_mixing(&h, &gap, 1000, 9).unwrap();
        assert_eq!((r.trials, r.violations), (1000, 0));
        assert!(r.worst_slack >= -VIOLATION_TOL);
        let r = verify_vertex_expansion(&h, &gap, 1000, 9).unwrap();
        assert_eq!((r.trials, r.violations), (1000, 0));
        assert_eq!(r, verify_vertex_expansion(&h, &gap, 1000, 9).unwrap());
        assert!(verify_vertex_expansion(&h, &gap, 0, 9).is_err());
    }

    #[test]
    fn non_adjacent_singletons() {
        let (h, _) = sample_regular_hypergraph(&SampleConfig::new(120, 5, 3, 5)).unwrap();
        let gap = adjacency_gap(&h).unwrap();
        let a = h.adjacency_matrix();
        let j = (1..h.n()).find(|&j| a[(0, j)] == 0.0).unwrap();
        let e = edge_count(&h, &[0], &[j]).unwrap();
        assert_eq!(e, 0);
        assert!(expander_mixing_slack(&h, gap.lambda, e, 1, 1) >= 0.0);
    }
}

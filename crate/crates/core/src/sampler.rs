//! Random bipartite biregular graphs and random simple (d,k)-regular
//! hypergraphs.
//!
//! The default scheme is the configuration model: `nd` vertex stubs are
//! matched with `nd` hyperedge stubs by a seeded shuffle and the whole
//! matching is redrawn whenever a vertex lands in the same hyperedge twice.
//! Conditioned on success this is exactly uniform over simple bipartite
//! (d,k)-biregular graphs, but the success probability decays like
//! `exp(-(d-1)(k-1)/2)`, so for larger degrees [`SampleMethod::Switching`]
//! repairs the multi-edges with degree-preserving switches and then mixes
//! with random switches instead.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypergraph::{BipartiteGraph, Hypergraph};
use crate::linalg::DenseMatrix;

pub const RNG_ALGORITHM: &str = "ChaCha8 (rand_chacha 0.9, seed_from_u64)";
pub const DEFAULT_MAX_RETRIES: usize = 1000;
pub const DEFAULT_SWITCH_SWEEPS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleMethod {
    /// Configuration model with a full restart on any multi-edge.
    Rejection,
    /// Configuration model, multi-edges removed by switchings, followed by
    /// `sweeps * n * d` attempted random switches.
    Switching { sweeps: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleConfig {
    pub n: usize,
    pub d: usize,
    pub k: usize,
    pub seed: u64,
    pub max_retries: usize,
    pub method: SampleMethod,
}

impl SampleConfig {
    pub fn new(n: usize, d: usize, k: usize, seed: u64) -> Self {
        Self {
            n,
            d,
            k,
            seed,
            max_retries: DEFAULT_MAX_RETRIES,
            method: SampleMethod::Rejection,
        }
    }

    pub fn with_method(mut self, method: SampleMethod) -> Self {
        self.method = method;
        self
    }

    pub fn with_max_retries(mut self, max_retries: usize) -> Self {
        self.max_retries = max_retries;
        self
    }

    /// Checks the hypergraph-sampling constraints: `k >= 2`, `d >= k`,
    /// `k | n*d` and `n >= k`.
    pub fn validate(&self) -> Result<()> {
        self.check(true)
    }

    /// Bipartite sampling has no orientation requirement, so `d < k` is
    /// allowed there.
    fn check(&self, require_d_ge_k: bool) -> Result<()> {
        let Self { n, d, k, .. } = *self;
        let mut problems = Vec::new();
        if k < 2 {
            problems.push(format!("k = {k} < 2"));
        }
        if d < 1 {
            problems.push("d = 0".to_string());
        }
        if require_d_ge_k && d < k {
            problems.push(format!("d = {d} < k = {k} (sample the dual instead)"));
        }
        if k > 0 && (n * d) % k != 0 {
            problems.push(format!("k = {k} does not divide n*d = {}", n * d));
        }
        if n < k {
            problems.push(format!("n = {n} < k = {k}"));
        }
        if k > 0 && n * d / k < d {
            problems.push(format!("only {} hyperedges for degree {d}", n * d / k));
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidParameters(problems.join("; ")))
        }
    }

    pub fn num_edges(&self) -> usize {
        self.n * self.d / self.k
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleReport {
    pub attempts: usize,
    pub multiedge_rejections: usize,
    pub duplicate_neighborhood_rejections: usize,
    pub rng: String,
    pub method: SampleMethod,
}

impl SampleReport {
    fn new(method: SampleMethod) -> Self {
        Self {
            attempts: 0,
            multiedge_rejections: 0,
            duplicate_neighborhood_rejections: 0,
            rng: RNG_ALGORITHM.to_string(),
            method,
        }
    }
}

/// Vertex-to-hyperedge assignment as `n` rows of `d` distinct edge ids.
struct Pairing {
    rows: Vec<Vec<usize>>,
}

impl Pairing {
    fn to_biadjacency(&self, m: usize) -> DenseMatrix {
        let mut x = DenseMatrix::zeros(self.rows.len(), m);
        for (i, row) in self.rows.iter().enumerate() {
            for &e in row {
                x[(i, e)] = 1.0;
            }
        }
        x
    }

    fn has_duplicate_columns(&self, m: usize) -> bool {
        let mut cols = vec![Vec::new(); m];
        for (i, row) in self.rows.iter().enumerate() {
            for &e in row {
                cols[e].push(i);
            }
        }
        // vertices are pushed in increasing order, so supports are sorted
        cols.sort_unstable();
        cols.windows(2).any(|w| w[0] == w[1])
    }
}

fn edge_stubs(cfg: &SampleConfig) -> Vec<usize> {
    (0..cfg.num_edges())
        .flat_map(|e| std::iter::repeat_n(e, cfg.k))
        .collect()
}

/// One configuration-model draw; `None` on a multi-edge.
fn draw_configuration(cfg: &SampleConfig, rng: &mut ChaCha8Rng) -> Option<Pairing> {
    let mut stubs = edge_stubs(cfg);
    stubs.shuffle(rng);
    let mut rows = Vec::with_capacity(cfg.n);
    for chunk in stubs.chunks(cfg.d) {
        let mut row = chunk.to_vec();
        row.sort_unstable();
        if row.windows(2).any(|w| w[0] == w[1]) {
            return None;
        }
        rows.push(row);
    }
    Some(Pairing { rows })
}

/// Configuration-model draw repaired by switchings, then mixed.
fn draw_switching(cfg: &SampleConfig, sweeps: usize, rng: &mut ChaCha8Rng) -> Option<Pairing> {
    let m = cfg.num_edges();
    let total = cfg.n * cfg.d;
    let mut stubs = edge_stubs(cfg);
    stubs.shuffle(rng);
    // pair p joins vertex p / d with hyperedge stubs[p]
    let vertex = |p: usize| p / cfg.d;
    let mut count = vec![0u16; cfg.n * m];
    for (p, &e) in stubs.iter().enumerate() {
        count[vertex(p) * m + e] += 1;
    }

    // a switch exchanges the hyperedges of pairs p and q
    let try_switch = |p: usize, q: usize, stubs: &mut [usize], count: &mut [u16]| -> bool {
        let (v, e) = (vertex(p), stubs[p]);
        let (w, f) = (vertex(q), stubs[q]);
        if v == w || e == f || count[v * m + f] != 0 || count[w * m + e] != 0 {
            return false;
        }
        count[v * m + e] -= 1;
        count[w * m + f] -= 1;
        count[v * m + f] += 1;
        count[w * m + e] += 1;
        stubs[p] = f;
        stubs[q] = e;
        true
    };

    let budget = 1000 * total;
    let mut spent = 0;
    loop {
        let bad: Vec<usize> = (0..total)
            .filter(|&p| count[vertex(p) * m + stubs[p]] > 1)
            .collect();
        if bad.is_empty() {
            break;
        }
        for &p in &bad {
            if count[vertex(p) * m + stubs[p]] <= 1 {
                continue;
            }
            loop {
                spent += 1;
                if spent > budget {
                    return None;
                }
                let q = rng.random_range(0..total);
                if try_switch(p, q, &mut stubs, &mut count) {
                    break;
                }
            }
        }
    }
    for _ in 0..sweeps * total {
        let p = rng.random_range(0..total);
        let q = rng.random_range(0..total);
        try_switch(p, q, &mut stubs, &mut count);
    }

    let mut rows: Vec<Vec<usize>> = stubs.chunks(cfg.d).map(<[usize]>::to_vec).collect();
    for row in &mut rows {
        row.sort_unstable();
    }
    Some(Pairing { rows })
}

fn sample_pairing(
    cfg: &SampleConfig,
    reject_duplicate_columns: bool,
) -> Result<(Pairing, SampleReport)> {
    cfg.check(reject_duplicate_columns)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut report = SampleReport::new(cfg.method);
    let m = cfg.num_edges();
    while report.attempts < cfg.max_retries {
        report.attempts += 1;
        let drawn = match cfg.method {
            SampleMethod::Rejection => draw_configuration(cfg, &mut rng),
            SampleMethod::Switching { sweeps } => draw_switching(cfg, sweeps, &mut rng),
        };
        let Some(pairing) = drawn else {
            report.multiedge_rejections += 1;
            continue;
        };
        if reject_duplicate_columns && pairing.has_duplicate_columns(m) {
            report.duplicate_neighborhood_rejections += 1;
            continue;
        }
        return Ok((pairing, report));
    }
    Err(Error::RetryLimitExceeded(cfg.max_retries))
}

/// A simple bipartite graph with `n` rows of degree `d` and `nd/k` columns
/// of degree `k`. Deterministic in `cfg.seed`.
pub fn sample_bipartite_biregular(cfg: &SampleConfig) -> Result<(BipartiteGraph, SampleReport)> {
    let (pairing, report) = sample_pairing(cfg, false)?;
    let g = BipartiteGraph::new(pairing.to_biadjacency(cfg.num_edges()), cfg.d, cfg.k)?;
    Ok((g, report))
}

/// A simple (d,k)-regular hypergraph: bipartite draws whose columns repeat
/// a neighbourhood are rejected, the rest are read off as hyperedges.
pub fn sample_regular_hypergraph(cfg: &SampleConfig) -> Result<(Hypergraph, SampleReport)> {
    let (pairing, report) = sample_pairing(cfg, true)?;
    let g = BipartiteGraph::new(pairing.to_biadjacency(cfg.num_edges()), cfg.d, cfg.k)?;
    Ok((g.to_hypergraph()?, report))
}

/// Picks [`SampleMethod::Rejection`] when the configuration model succeeds
/// with reasonable probability and switching otherwise.
pub fn auto_method(d: usize, k: usize) -> SampleMethod {
    // P(simple) ~ exp(-(d-1)(k-1)/2); rejection is fine up to ~1/3000
    if (d.saturating_sub(1) * k.saturating_sub(1)) <= 16 {
        SampleMethod::Rejection
    } else {
        SampleMethod::Switching {
            sweeps: DEFAULT_SWITCH_SWEEPS,
        }
    }
}

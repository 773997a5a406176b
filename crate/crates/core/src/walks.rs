//! Simple and non-backtracking random walks on regular hypergraphs.
//!
//! Non-backtracking walks `v0 e1 v1 … el vl` require `v_{i-1} ≠ v_i`,
//! `v_{i-1}, v_i ∈ e_i` and `e_i ≠ e_{i+1}`. Their counts `A^(l)` satisfy
//!
//! ```text
//! A^(1)   = A
//! A^(2)   = A² - (k-2)A - d(k-1)I
//! A^(l+1) = (A - (k-2)) A^(l) - (d-1)(k-1) A^(l-1)
//! ```
//!
//! The `(k-2)A` terms remove two-step walks that stay inside one hyperedge;
//! for `k = 2` this is the familiar graph recurrence.

use std::fmt::Write as _;

use log::warn;
use rand::seq::IndexedRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypergraph::Hypergraph;
use crate::linalg::{symmetric_eigen, DenseMatrix};
use crate::spectra::{adjacency_gap, GapReport};

/// Longest length computed in exact integer arithmetic.
pub const EXACT_WALK_LENGTH: usize = 8;

/// `λ` within this of `d(k-1)` means there is no spectral gap.
pub const GAP_TOL: f64 = 1e-8;

/// `P = A / (d(k-1))`.
pub fn srw_transition(h: &Hypergraph) -> DenseMatrix {
    h.adjacency_matrix().scale(1.0 / (h.d() * (h.k() - 1)) as f64)
}

fn require_gap(gap: &GapReport, d: usize, k: usize) -> Result<f64> {
    let top = (d * (k - 1)) as f64;
    if gap.lambda >= top - GAP_TOL {
        return Err(Error::NoSpectralGap { lambda: gap.lambda, top });
    }
    Ok(top)
}

/// `ρ = λ / (d(k-1))`.
pub fn srw_mixing_exact(gap: &GapReport, d: usize, k: usize) -> Result<f64> {
    let top = require_gap(gap, d, k)?;
    Ok(gap.lambda / top)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixingReport {
    pub exact_rate: f64,
    /// `(sup_l)^(1/l)` at the largest length.
    pub empirical_rate: f64,
    /// `exp` of the least-squares slope of `ln sup_l` over the second half
    /// of the lengths.
    pub fit_rate: f64,
    /// Coefficient of determination of that fit.
    pub fit_r2: f64,
    /// Inclusive range of lengths used by the fit.
    pub lengths_used: (usize, usize),
    /// `(l, max_ij |P^l_ij - 1/n|)` for `l = 1..=l_max`.
    pub per_length_sup: Vec<(usize, f64)>,
}

impl MixingReport {
    /// `l,sup,exact_rate^l` rows.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("l,sup,exact_rate_pow\n");
        for &(l, sup) in &self.per_length_sup {
            let _ = writeln!(s, "{l},{sup},{}", self.exact_rate.powi(l as i32));
        }
        s
    }
}

/// Tracks `max_ij |P^l_ij - 1/n|` through powers of `P - J/n`, which equal
/// `P^l - J/n` because `P` is doubly stochastic; this keeps relative
/// precision once the deviations fall below machine epsilon.
pub fn srw_mixing_empirical(h: &Hypergraph, l_max: usize) -> Result<MixingReport> {
    if l_max < 10 {
        return Err(Error::InvalidParameters(format!("l_max must be at least 10, got {l_max}")));
    }
    let gap = adjacency_gap(h)?;
    let exact_rate = srw_mixing_exact(&gap, h.d(), h.k())?;
    let n = h.n();
    let q = srw_transition(h).sub(&DenseMatrix::from_fn(n, n, |_, _| 1.0 / n as f64))?;
    let mut power = q.clone();
    let mut per_length_sup = Vec::with_capacity(l_max);
    for l in 1..=l_max {
        if l > 1 {
            power = power.matmul(&q)?;
        }
        per_length_sup.push((l, power.max_abs()));
    }
    let empirical_rate = per_length_sup[l_max - 1].1.powf(1.0 / l_max as f64);
    let start = l_max / 2 + 1;
    let pts: Vec<(f64, f64)> = per_length_sup[start - 1..]
        .iter()
        .filter(|(_, s)| *s > 0.0)
        .map(|&(l, s)| (l as f64, s.ln()))
        .collect();
    let (slope, r2) = linear_fit(&pts);
    Ok(MixingReport {
        exact_rate,
        empirical_rate,
        fit_rate: slope.exp(),
        fit_r2: r2,
        lengths_used: (start, l_max),
        per_length_sup,
    })
}

/// Least-squares slope and R² of `y` against `x`.
fn linear_fit(pts: &[(f64, f64)]) -> (f64, f64) {
    let m = pts.len() as f64;
    if pts.len() < 2 {
        return (f64::NEG_INFINITY, 0.0);
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    (slope, r2)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WalkCounts {
    pub l: usize,
    pub matrix: DenseMatrix,
    /// Whether every entry was computed in exact integer arithmetic.
    pub exact: bool,
}

impl WalkCounts {
    /// `d(k-1)((d-1)(k-1))^{l-1}`, the number of walks of length `l` from
    /// any vertex.
    pub fn expected_row_sum(d: usize, k: usize, l: usize) -> u128 {
        let q = ((d - 1) * (k - 1)) as u128;
        (d * (k - 1)) as u128 * q.pow(l as u32 - 1)
    }
}

type IntMatrix = Vec<Vec<i128>>;

fn int_matmul(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    let n = a.len();
    let mut out = vec![vec![0i128; n]; n];
    for i in 0..n {
        for (t, &ait) in a[i].iter().enumerate() {
            if ait == 0 {
                continue;
            }
            for j in 0..n {
                out[i][j] += ait * b[t][j];
            }
        }
    }
    out
}

fn to_dense(m: &IntMatrix) -> DenseMatrix {
    let n = m.len();
    DenseMatrix::from_fn(n, n, |i, j| m[i][j] as f64)
}

/// `A^(l)`, exact up to length 8, floating point beyond.
pub fn nb_walk_counts(h: &Hypergraph, l: usize) -> Result<WalkCounts> {
    if l == 0 {
        return Err(Error::InvalidParameters("walk length must be at least 1".into()));
    }
    let (d, k) = (h.d() as i128, h.k() as i128);
    let q = (d - 1) * (k - 1);
    let a = h.adjacency_matrix();
    let n = h.n();
    let ai: IntMatrix = (0..n).map(|i| (0..n).map(|j| a[(i, j)] as i128).collect()).collect();
    // B = A - (k-2) I
    let mut b = ai.clone();
    for (i, row) in b.iter_mut().enumerate() {
        row[i] -= k - 2;
    }
    let mut prev: IntMatrix = ai.clone();
    if l == 1 {
        return Ok(WalkCounts { l, matrix: to_dense(&prev), exact: true });
    }
    let mut cur = int_matmul(&b, &ai);
    for (i, row) in cur.iter_mut().enumerate() {
        row[i] -= d * (k - 1);
    }
    let exact_until = l.min(EXACT_WALK_LENGTH);
    for _ in 2..exact_until {
        let mut next = int_matmul(&b, &cur);
        for i in 0..n {
            for j in 0..n {
                next[i][j] -= q * prev[i][j];
            }
        }
        prev = cur;
        cur = next;
    }
    if l <= EXACT_WALK_LENGTH {
        return Ok(WalkCounts { l, matrix: to_dense(&cur), exact: true });
    }
    warn!("walk counts beyond length {EXACT_WALK_LENGTH} use floating point (l = {l})");
    let bf = to_dense(&b);
    let mut prev = to_dense(&prev);
    let mut cur = to_dense(&cur);
    for _ in EXACT_WALK_LENGTH..l {
        let next = bf.matmul(&cur)?.sub(&prev.scale(q as f64))?;
        prev = cur;
        cur = next;
    }
    Ok(WalkCounts { l, matrix: cur, exact: false })
}

/// The graph-form recurrence `A^(2) = A² - (k-1)dI`,
/// `A^(l+1) = A A^(l) - (k-1)(d-1) A^(l-1)`, kept to quantify how far it is
/// from the true counts when `k ≥ 3`.
pub fn nb_walk_counts_graph_form(h: &Hypergraph, l: usize) -> Result<DenseMatrix> {
    if l == 0 {
        return Err(Error::InvalidParameters("walk length must be at least 1".into()));
    }
    let (d, k) = (h.d() as f64, h.k() as f64);
    let a = h.adjacency_matrix();
    let mut prev = a.clone();
    if l == 1 {
        return Ok(prev);
    }
    let mut cur = a.matmul(&a)?.shift_diagonal(-(k - 1.0) * d);
    for _ in 2..l {
        let next = a.matmul(&cur)?.sub(&prev.scale((k - 1.0) * (d - 1.0)))?;
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// Chebyshev polynomial of the second kind, with `U_{-1} = 0` and
/// `U_{-2} = -1`.
pub fn chebyshev_u(l: i64, x: f64) -> f64 {
    match l {
        i64::MIN..=-3 => {
            // U_{-n} = -U_{n-2}
            -chebyshev_u(-l - 2, x)
        }
        -2 => -1.0,
        -1 => 0.0,
        _ => {
            let (mut prev, mut cur) = (0.0, 1.0);
            for _ in 0..l {
                let next = 2.0 * x * cur - prev;
                prev = cur;
                cur = next;
            }
            cur
        }
    }
}

/// `Q_l(x) = √((d-1)/d) U_l(x) - U_{l-2}(x) / √(d(d-1))`.
#[allow(non_snake_case)]
pub fn chebyshev_Q(l: usize, x: f64, d: usize) -> f64 {
    let d = d as f64;
    ((d - 1.0) / d).sqrt() * chebyshev_u(l as i64, x)
        - chebyshev_u(l as i64 - 2, x) / (d * (d - 1.0)).sqrt()
}

/// Scalar form of `A^(l)` at an eigenvalue `a` of `A`:
/// `q^{l/2} [U_l(x) + (k-2)/√q U_{l-1}(x) - (k-1)/q U_{l-2}(x)]` with
/// `x = (a - (k-2)) / (2√q)`.
pub fn nb_count_polynomial(l: usize, a: f64, d: usize, k: usize) -> f64 {
    let q = ((d - 1) * (k - 1)) as f64;
    let sq = q.sqrt();
    let kk = k as f64;
    let x = (a - (kk - 2.0)) / (2.0 * sq);
    let l = l as i64;
    sq.powi(l as i32)
        * (chebyshev_u(l, x) + (kk - 2.0) / sq * chebyshev_u(l - 1, x)
            - (kk - 1.0) / q * chebyshev_u(l - 2, x))
}

/// The same in the graph form `√((k-1)^l d (d-1)^{l-1}) Q_l(a / (2√q))`.
pub fn nb_count_polynomial_graph_form(l: usize, a: f64, d: usize, k: usize) -> f64 {
    let (df, kf) = (d as f64, k as f64);
    let q = (df - 1.0) * (kf - 1.0);
    let scale = ((kf - 1.0).powi(l as i32) * df * (df - 1.0).powi(l as i32 - 1)).sqrt();
    scale * chebyshev_Q(l, a / (2.0 * q.sqrt()), d)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChebyshevCheck {
    pub l: usize,
    /// Max-norm distance of the hypergraph polynomial form to `A^(l)`.
    pub discrepancy: f64,
    /// Max-norm distance of the graph form to `A^(l)` (zero only if `k = 2`).
    pub graph_form_discrepancy: f64,
}

/// Evaluates both polynomial forms at `A` through its eigendecomposition
/// and compares them with the recurrence.
pub fn chebyshev_identity_check(h: &Hypergraph, l: usize) -> Result<ChebyshevCheck> {
    let (spec, vecs) = symmetric_eigen(&h.adjacency_matrix())?;
    let (d, k) = (h.d(), h.k());
    let counts = nb_walk_counts(h, l)?.matrix;
    let apply = |f: &dyn Fn(f64) -> f64| -> DenseMatrix {
        let n = h.n();
        let vals: Vec<f64> = spec.values.iter().map(|&a| f(a)).collect();
        DenseMatrix::from_fn(n, n, |i, j| {
            (0..n).map(|t| vecs[(i, t)] * vals[t] * vecs[(j, t)]).sum()
        })
    };
    let hyper = apply(&|a| nb_count_polynomial(l, a, d, k));
    let graph = apply(&|a| nb_count_polynomial_graph_form(l, a, d, k));
    Ok(ChebyshevCheck {
        l,
        discrepancy: hyper.max_abs_diff(&counts),
        graph_form_discrepancy: graph.max_abs_diff(&counts),
    })
}

fn require_nondegenerate(d: usize, k: usize) -> Result<()> {
    if d == 2 && k == 2 {
        return Err(Error::DegenerateParameters);
    }
    if d < 2 {
        return Err(Error::InvalidParameters(format!("non-backtracking walks need d >= 2, got {d}")));
    }
    Ok(())
}

/// `P̃^(l) = A^(l) / (d(k-1)((d-1)(k-1))^{l-1})`.
pub fn nbrw_transition(h: &Hypergraph, l: usize) -> Result<DenseMatrix> {
    require_nondegenerate(h.d(), h.k())?;
    let counts = nb_walk_counts(h, l)?;
    let total = WalkCounts::expected_row_sum(h.d(), h.k(), l) as f64;
    Ok(counts.matrix.scale(1.0 / total))
}

/// `ψ(x) = x + √(x² - 1)` for `x ≥ 1`, and `1` on `[0, 1]`.
pub fn psi(x: f64) -> Result<f64> {
    if x < 0.0 || x.is_nan() {
        return Err(Error::NegativeInput(x));
    }
    Ok(if x <= 1.0 { 1.0 } else { x + (x * x - 1.0).sqrt() })
}

/// `ρ̃ = ψ(λ / (2√q)) / √q`, `q = (d-1)(k-1)`.
pub fn nbrw_mixing_exact(gap: &GapReport, d: usize, k: usize) -> Result<f64> {
    require_nondegenerate(d, k)?;
    require_gap(gap, d, k)?;
    let sq = (((d - 1) * (k - 1)) as f64).sqrt();
    Ok(psi(gap.lambda / (2.0 * sq))? / sq)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NbWalk {
    /// `v0, …, vl`.
    pub vertices: Vec<usize>,
    /// `e1, …, el`.
    pub edges: Vec<usize>,
}

impl NbWalk {
    pub fn end(&self) -> usize {
        *self.vertices.last().expect("walk has a start vertex")
    }
}

fn check_walk_input(h: &Hypergraph, v0: usize, l: usize) -> Result<()> {
    require_nondegenerate(h.d(), h.k())?;
    if v0 >= h.n() {
        return Err(Error::VertexOutOfRange { vertex: v0, n: h.n() });
    }
    if l == 0 {
        return Err(Error::InvalidParameters("walk length must be at least 1".into()));
    }
    Ok(())
}

fn walk_with(h: &Hypergraph, v0: usize, l: usize, rng: &mut ChaCha8Rng) -> NbWalk {
    let mut vertices = Vec::with_capacity(l + 1);
    let mut edges = Vec::with_capacity(l);
    vertices.push(v0);
    let mut e = *h.incident_edges(v0).choose(rng).expect("d >= 1");
    let mut v = v0;
    for step in 0..l {
        edges.push(e);
        let others: Vec<usize> = h.edges()[e].iter().copied().filter(|&u| u != v).collect();
        v = *others.choose(rng).expect("k >= 2");
        vertices.push(v);
        if step + 1 < l {
            let next: Vec<usize> = h.incident_edges(v).iter().copied().filter(|&f| f != e).collect();
            e = *next.choose(rng).expect("d >= 2");
        }
    }
    NbWalk { vertices, edges }
}

/// One non-backtracking walk of length `l` from `v0`: the first hyperedge
/// is uniform among those at `v0`, then each step picks a vertex of the
/// current hyperedge other than the current vertex and a different
/// hyperedge at it, uniformly.
pub fn nbrw_simulate(h: &Hypergraph, v0: usize, l: usize, seed: u64) -> Result<NbWalk> {
    check_walk_input(h, v0, l)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(walk_with(h, v0, l, &mut rng))
}

/// End-vertex frequencies of `trials` walks drawn from one seeded stream.
pub fn nbrw_end_distribution(
    h: &Hypergraph,
    v0: usize,
    l: usize,
    trials: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    check_walk_input(h, v0, l)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = vec![0usize; h.n()];
    for _ in 0..trials {
        counts[walk_with(h, v0, l, &mut rng).end()] += 1;
    }
    Ok(counts.into_iter().map(|c| c as f64 / trials.max(1) as f64).collect())
}

/// Total variation distance between two distributions on the same set.
pub fn total_variation(p: &[f64], q: &[f64]) -> f64 {
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

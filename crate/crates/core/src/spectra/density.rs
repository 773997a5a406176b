//! Limiting spectral densities and their distribution functions.
//!
//! Every law here has an absolutely continuous part supported on finitely
//! many intervals whose edges behave like square roots (vanishing or
//! inverse). Integrals over an interval `[c - r, c + r]` are taken in the
//! angle variable `x = c + r cos θ`, which turns those edges into smooth
//! integrands for adaptive Simpson.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::adaptive_simpson;

/// Absolute tolerance for distribution-function integrals.
pub const CDF_TOL: f64 = 1e-8;

/// A probability law on the real line made of a density on finitely many
/// intervals plus optional point masses.
pub trait SpectralDensity {
    fn pdf(&self, x: f64) -> f64;

    /// Disjoint, ascending intervals carrying the density.
    fn pieces(&self) -> Vec<(f64, f64)>;

    /// `(location, weight)` atoms.
    fn point_masses(&self) -> Vec<(f64, f64)> {
        Vec::new()
    }

    /// Mass of the continuous part on `(-∞, x]`.
    fn continuous_cdf(&self, x: f64) -> f64 {
        self.pieces()
            .into_iter()
            .map(|(lo, hi)| piece_mass(self, lo, hi, lo, x.min(hi)))
            .sum()
    }

    fn cdf(&self, x: f64) -> f64 {
        self.continuous_cdf(x)
            + self
                .point_masses()
                .iter()
                .filter(|(loc, _)| *loc <= x)
                .map(|(_, w)| w)
                .sum::<f64>()
    }

    /// `μ([lo, hi])`.
    fn interval_mass(&self, lo: f64, hi: f64) -> f64 {
        let cont = self.continuous_cdf(hi) - self.continuous_cdf(lo);
        let atoms: f64 = self
            .point_masses()
            .iter()
            .filter(|(loc, _)| *loc >= lo && *loc <= hi)
            .map(|(_, w)| w)
            .sum();
        cont + atoms
    }

    /// Continuous mass plus point masses, computed by quadrature.
    fn total_mass(&self) -> f64 {
        let cont: f64 = self
            .pieces()
            .into_iter()
            .map(|(lo, hi)| piece_mass(self, lo, hi, lo, hi))
            .sum();
        cont + self.point_masses().iter().map(|(_, w)| w).sum::<f64>()
    }
}

fn angle_of(lo: f64, hi: f64, x: f64) -> f64 {
    let c = 0.5 * (lo + hi);
    let r = 0.5 * (hi - lo);
    ((x - c) / r).clamp(-1.0, 1.0).acos()
}

/// Integral of the density over `[from, to] ⊂ [lo, hi]` in the angle
/// variable.
fn piece_mass<D: SpectralDensity + ?Sized>(dens: &D, lo: f64, hi: f64, from: f64, to: f64) -> f64 {
    if to <= from || to <= lo || from >= hi {
        return 0.0;
    }
    let c = 0.5 * (lo + hi);
    let r = 0.5 * (hi - lo);
    let t_hi = angle_of(lo, hi, from.max(lo));
    let t_lo = angle_of(lo, hi, to.min(hi));
    let integrand = |t: f64| {
        let s = t.sin();
        if s <= 0.0 {
            return edge_limit(dens, c, r, t);
        }
        dens.pdf(c + r * t.cos()) * r * s
    };
    let tol = CDF_TOL * ((t_hi - t_lo) / PI).max(1e-6);
    adaptive_simpson(&integrand, t_lo, t_hi, tol)
}

/// At θ ∈ {0, π} the integrand is a 0·∞ product for inverse-square-root
/// edges; approximate the limit from just inside.
fn edge_limit<D: SpectralDensity + ?Sized>(dens: &D, c: f64, r: f64, t: f64) -> f64 {
    let eps = 1e-7;
    let t_in = if t < 1.0 { eps } else { PI - eps };
    dens.pdf(c + r * t_in.cos()) * r * t_in.sin()
}

/// Continuous CDF evaluated at many ascending points in one pass.
pub fn continuous_cdf_sorted<D: SpectralDensity + ?Sized>(dens: &D, xs: &[f64]) -> Vec<f64> {
    debug_assert!(xs.windows(2).all(|w| w[0] <= w[1]));
    let mut out = vec![0.0; xs.len()];
    for (lo, hi) in dens.pieces() {
        let mut acc = 0.0;
        let mut prev = lo;
        for (o, &x) in out.iter_mut().zip(xs) {
            let cur = x.clamp(lo, hi);
            if cur > prev {
                acc += piece_mass(dens, lo, hi, prev, cur);
                prev = cur;
            }
            *o += acc;
        }
    }
    out
}

/// Quantiles `F⁻¹(p)` of the continuous part (normalised to mass one) for
/// ascending `ps` in `(0, 1)`.
pub fn quantiles_sorted<D: SpectralDensity + ?Sized>(dens: &D, ps: &[f64]) -> Vec<f64> {
    const GRID: usize = 1024;
    // tabulate the CDF on an angle grid per piece
    let mut nodes: Vec<(f64, f64, f64, f64)> = Vec::new(); // (lo, hi, x, cdf)
    let mut acc = 0.0;
    for (lo, hi) in dens.pieces() {
        let c = 0.5 * (lo + hi);
        let r = 0.5 * (hi - lo);
        let mut prev = lo;
        nodes.push((lo, hi, lo, acc));
        for i in 1..=GRID {
            let t = PI * (1.0 - i as f64 / GRID as f64);
            let x = if i == GRID { hi } else { c + r * t.cos() };
            acc += piece_mass(dens, lo, hi, prev, x);
            nodes.push((lo, hi, x, acc));
            prev = x;
        }
    }
    let total = acc;
    let mut out = Vec::with_capacity(ps.len());
    let mut idx = 1;
    for &p in ps {
        let target = p * total;
        while idx + 1 < nodes.len() && nodes[idx].3 < target {
            idx += 1;
        }
        let (lo, hi, x1, c1) = nodes[idx];
        let (_, _, x0, c0) = nodes[idx - 1];
        if x0 >= x1 || (lo, hi) != (nodes[idx - 1].0, nodes[idx - 1].1) {
            out.push(x1);
            continue;
        }
        let (mut a, mut b) = (x0, x1);
        for _ in 0..60 {
            let mid = 0.5 * (a + b);
            let m = c0 + piece_mass(dens, lo, hi, x0, mid);
            if m < target {
                a = mid;
            } else {
                b = mid;
            }
            if b - a < 1e-14 {
                break;
            }
        }
        let _ = c1;
        out.push(0.5 * (a + b));
    }
    out
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha.is_finite() && alpha >= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameters(format!("alpha = {alpha} < 1")))
    }
}

fn semicircle_factor(x: f64) -> f64 {
    (1.0 - x * x / 4.0).max(0.0).sqrt() / PI
}

/// Bulk density of `(A - (k-2)) / sqrt((d-1)(k-1))` for random
/// (d,k)-regular hypergraphs with fixed degrees.
pub fn feng_li_density(x: f64, d: usize, k: usize) -> Result<f64> {
    check_feng_li(d, k)?;
    Ok(feng_li_unchecked(x, d as f64, k as f64))
}

fn check_feng_li(d: usize, k: usize) -> Result<()> {
    if k < 2 || d < k {
        return Err(Error::InvalidParameters(format!(
            "need d >= k >= 2, got d = {d}, k = {k}"
        )));
    }
    Ok(())
}

fn feng_li_unchecked(x: f64, d: f64, k: f64) -> f64 {
    if !(-2.0..=2.0).contains(&x) {
        return 0.0;
    }
    let q = (d - 1.0) * (k - 1.0);
    let sq = q.sqrt();
    let num = 1.0 + (k - 1.0) / q;
    let den = (1.0 + 1.0 / q - x / sq) * (1.0 + (k - 1.0) * (k - 1.0) / q + (k - 1.0) * x / sq);
    let s = semicircle_factor(x);
    if s == 0.0 {
        return 0.0;
    }
    num / den * s
}

/// Limit of the same normalisation when `d, k → ∞` with `d/k → alpha`.
pub fn alpha_density(x: f64, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    Ok(alpha_unchecked(x, alpha))
}

fn alpha_unchecked(x: f64, alpha: f64) -> f64 {
    let s = semicircle_factor(x);
    if s == 0.0 {
        return 0.0;
    }
    alpha / (1.0 + alpha + alpha.sqrt() * x) * s
}

/// Edges `a = 1 - alpha^{-1/2}`, `b = 1 + alpha^{-1/2}`.
pub fn bipartite_edges(alpha: f64) -> (f64, f64) {
    let r = alpha.sqrt().recip();
    (1.0 - r, 1.0 + r)
}

/// Global law of a random bipartite biregular graph with degree ratio
/// `alpha`: the density on `±[a, b]` and the point mass at zero.
pub fn bipartite_density(x: f64, alpha: f64) -> Result<(f64, f64)> {
    check_alpha(alpha)?;
    Ok((bipartite_unchecked(x, alpha), (alpha - 1.0) / (alpha + 1.0)))
}

fn bipartite_unchecked(x: f64, alpha: f64) -> f64 {
    let (a, b) = bipartite_edges(alpha);
    let ax = x.abs();
    if ax > b || ax < a {
        return 0.0;
    }
    let pref = alpha / ((1.0 + alpha) * PI);
    if a == 0.0 {
        // |x| cancels against sqrt(x^2 - 0)
        return pref * (b * b - x * x).max(0.0).sqrt();
    }
    if ax == 0.0 {
        return 0.0;
    }
    pref / ax * ((b * b - x * x) * (x * x - a * a)).max(0.0).sqrt()
}

/// Marchenko–Pastur-type law of the squared nonzero bipartite eigenvalues
/// on `[a², b²]`.
pub fn gram_density(x: f64, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    Ok(gram_unchecked(x, alpha))
}

fn gram_unchecked(x: f64, alpha: f64) -> f64 {
    let (a, b) = bipartite_edges(alpha);
    let (a2, b2) = (a * a, b * b);
    if x < a2 || x > b2 || x <= 0.0 {
        return 0.0;
    }
    alpha / (2.0 * PI * x) * ((b2 - x) * (x - a2)).max(0.0).sqrt()
}

/// The four limiting laws as values usable with [`SpectralDensity`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case")]
pub enum LimitLaw {
    FengLi { d: usize, k: usize },
    Alpha { alpha: f64 },
    Bipartite { alpha: f64 },
    Gram { alpha: f64 },
}

impl LimitLaw {
    pub fn feng_li(d: usize, k: usize) -> Result<Self> {
        check_feng_li(d, k)?;
        Ok(Self::FengLi { d, k })
    }

    pub fn alpha(alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(Self::Alpha { alpha })
    }

    pub fn bipartite(alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(Self::Bipartite { alpha })
    }

    pub fn gram(alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(Self::Gram { alpha })
    }
}

impl SpectralDensity for LimitLaw {
    fn pdf(&self, x: f64) -> f64 {
        match *self {
            Self::FengLi { d, k } => feng_li_unchecked(x, d as f64, k as f64),
            Self::Alpha { alpha } => alpha_unchecked(x, alpha),
            Self::Bipartite { alpha } => bipartite_unchecked(x, alpha),
            Self::Gram { alpha } => gram_unchecked(x, alpha),
        }
    }

    fn pieces(&self) -> Vec<(f64, f64)> {
        match *self {
            Self::FengLi { .. } | Self::Alpha { .. } => vec![(-2.0, 2.0)],
            Self::Bipartite { alpha } => {
                let (a, b) = bipartite_edges(alpha);
                if a == 0.0 {
                    vec![(-b, b)]
                } else {
                    vec![(-b, -a), (a, b)]
                }
            }
            Self::Gram { alpha } => {
                let (a, b) = bipartite_edges(alpha);
                vec![(a * a, b * b)]
            }
        }
    }

    fn point_masses(&self) -> Vec<(f64, f64)> {
        match *self {
            Self::Bipartite { alpha } if alpha > 1.0 => vec![(0.0, (alpha - 1.0) / (alpha + 1.0))],
            _ => Vec::new(),
        }
    }
}

//! Adjacency spectra, Ramanujan margins, empirical spectral distributions
//! and their distance to the limiting laws.

mod density;

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypergraph::Hypergraph;
use crate::linalg::{symmetric_eigenvalues, RealSpectrum};

pub use density::{
    alpha_density, bipartite_density, bipartite_edges, continuous_cdf_sorted, feng_li_density,
    gram_density, quantiles_sorted, LimitLaw, SpectralDensity, CDF_TOL,
};

/// Tolerance on the quadrature normalisation of a density.
pub const NORMALIZATION_TOL: f64 = 1e-6;

/// Tolerance for the Perron eigenvalue `d(k-1)` on connected samples.
pub const PERRON_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    pub n: usize,
    pub d: usize,
    pub k: usize,
    pub lambda1: f64,
    pub lambda2: f64,
    pub lambda_min: f64,
    /// `max(λ2, |λn|)`.
    pub lambda: f64,
    /// `2√((d-1)(k-1)) - max_{i≥2} |λ_i - (k-2)|`; nonnegative iff Ramanujan.
    pub ramanujan_margin: f64,
}

impl GapReport {
    /// Only the top eigenvalue is treated as trivial; for a disconnected
    /// hypergraph the repeated `d(k-1)` therefore shows up in the margin.
    pub fn from_spectrum(spectrum: &RealSpectrum, d: usize, k: usize) -> Self {
        let v = &spectrum.values;
        let n = v.len();
        let lambda1 = v.first().copied().unwrap_or(0.0);
        let lambda2 = v.get(1).copied().unwrap_or(lambda1);
        let lambda_min = v.last().copied().unwrap_or(0.0);
        let bound = 2.0 * (((d - 1) * (k - 1)) as f64).sqrt();
        let shift = k as f64 - 2.0;
        let worst = v.iter().skip(1).map(|l| (l - shift).abs()).fold(0.0, f64::max);
        Self {
            n,
            d,
            k,
            lambda1,
            lambda2,
            lambda_min,
            lambda: lambda2.max(lambda_min.abs()).max(0.0),
            ramanujan_margin: bound - worst,
        }
    }

    pub fn is_ramanujan(&self) -> bool {
        self.ramanujan_margin >= 0.0
    }

    /// `|λ1 - d(k-1)| ≤ 1e-8`.
    pub fn perron_matches(&self) -> bool {
        (self.lambda1 - (self.d * (self.k - 1)) as f64).abs() <= PERRON_TOL
    }
}

pub fn adjacency_gap(h: &Hypergraph) -> Result<GapReport> {
    let spectrum = symmetric_eigenvalues(&h.adjacency_matrix())?;
    Ok(GapReport::from_spectrum(&spectrum, h.d(), h.k()))
}

/// Discrete probability measure: equally weighted atoms plus explicit
/// point masses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Esd {
    atoms: Vec<f64>,
    point_masses: Vec<(f64, f64)>,
}

pub type ESD = Esd;

impl Esd {
    pub fn new(mut atoms: Vec<f64>, point_masses: Vec<(f64, f64)>) -> Result<Self> {
        if atoms.iter().any(|a| !a.is_finite()) {
            return Err(Error::InvalidParameters("non-finite atom".into()));
        }
        let pm: f64 = point_masses.iter().map(|(_, w)| w).sum();
        if point_masses.iter().any(|(l, w)| !l.is_finite() || !(*w >= 0.0)) || pm > 1.0 + 1e-12 {
            return Err(Error::InvalidParameters("point masses must be nonnegative and sum to at most 1".into()));
        }
        if atoms.is_empty() && (pm - 1.0).abs() > 1e-12 {
            return Err(Error::EmptySet);
        }
        atoms.sort_by(f64::total_cmp);
        Ok(Self { atoms, point_masses })
    }

    pub fn atoms(&self) -> &[f64] {
        &self.atoms
    }

    pub fn point_masses(&self) -> &[(f64, f64)] {
        &self.point_masses
    }

    pub fn atom_weight(&self) -> f64 {
        if self.atoms.is_empty() {
            return 0.0;
        }
        let pm: f64 = self.point_masses.iter().map(|(_, w)| w).sum();
        (1.0 - pm) / self.atoms.len() as f64
    }

    /// Removes the largest atom (the Perron outlier) and renormalises.
    pub fn without_largest(&self) -> Self {
        let mut atoms = self.atoms.clone();
        atoms.pop();
        Self { atoms, point_masses: self.point_masses.clone() }
    }

    /// `μ((-∞, x])`.
    pub fn cdf(&self, x: f64) -> f64 {
        let count = self.atoms.partition_point(|a| *a <= x);
        count as f64 * self.atom_weight()
            + self.point_masses.iter().filter(|(l, _)| *l <= x).map(|(_, w)| w).sum::<f64>()
    }

    /// `μ((-∞, x))`.
    pub fn cdf_left(&self, x: f64) -> f64 {
        let count = self.atoms.partition_point(|a| *a < x);
        count as f64 * self.atom_weight()
            + self.point_masses.iter().filter(|(l, _)| *l < x).map(|(_, w)| w).sum::<f64>()
    }

    /// `μ([lo, hi])`.
    pub fn interval_mass(&self, lo: f64, hi: f64) -> f64 {
        self.cdf(hi) - self.cdf_left(lo)
    }

    /// Equal-width bins over `[lo, hi]`; mass outside is dropped.
    pub fn histogram(&self, bins: usize, lo: f64, hi: f64) -> Result<Vec<HistogramBin>> {
        if bins == 0 || !(hi > lo) {
            return Err(Error::InvalidParameters(format!("bad histogram range [{lo}, {hi}] with {bins} bins")));
        }
        let width = (hi - lo) / bins as f64;
        let mut out: Vec<HistogramBin> = (0..bins)
            .map(|i| HistogramBin {
                bin_left: lo + i as f64 * width,
                bin_right: if i + 1 == bins { hi } else { lo + (i + 1) as f64 * width },
                mass: 0.0,
            })
            .collect();
        let w = self.atom_weight();
        let place = |x: f64| -> Option<usize> {
            if x < lo || x > hi {
                return None;
            }
            Some((((x - lo) / width) as usize).min(bins - 1))
        };
        for &a in &self.atoms {
            if let Some(i) = place(a) {
                out[i].mass += w;
            }
        }
        for &(l, pw) in &self.point_masses {
            if let Some(i) = place(l) {
                out[i].mass += pw;
            }
        }
        Ok(out)
    }

    pub fn histogram_csv(&self, bins: usize, lo: f64, hi: f64) -> Result<String> {
        let mut s = String::from("bin_left,bin_right,mass\n");
        for b in self.histogram(bins, lo, hi)? {
            let _ = writeln!(s, "{},{},{}", b.bin_left, b.bin_right, b.mass);
        }
        Ok(s)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("ESD serialises")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HistogramBin {
    pub bin_left: f64,
    pub bin_right: f64,
    pub mass: f64,
}

/// ESD of `(λ - shift) / scale`.
pub fn esd_of(spectrum: &RealSpectrum, shift: f64, scale: f64) -> Result<Esd> {
    if !(scale > 0.0) {
        return Err(Error::InvalidParameters(format!("scale must be positive, got {scale}")));
    }
    Esd::new(spectrum.values.iter().map(|l| (l - shift) / scale).collect(), Vec::new())
}

/// Kolmogorov distance `sup_x |F_e(x) - F(x)|`, evaluated from both sides
/// at every atom, point mass and support endpoint.
pub fn ks_distance<D: SpectralDensity + ?Sized>(e: &Esd, density: &D) -> Result<f64> {
    let total = density.total_mass();
    if (total - 1.0).abs() > NORMALIZATION_TOL {
        return Err(Error::DensityNotNormalized(total));
    }
    let mut pts: Vec<f64> = e.atoms.clone();
    pts.extend(e.point_masses.iter().map(|(l, _)| *l));
    let pms = density.point_masses();
    pts.extend(pms.iter().map(|(l, _)| *l));
    for (lo, hi) in density.pieces() {
        pts.push(lo);
        pts.push(hi);
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let cont = continuous_cdf_sorted(density, &pts);
    let mut worst = 0.0f64;
    for (&t, &c) in pts.iter().zip(&cont) {
        let below: f64 = pms.iter().filter(|(l, _)| *l < t).map(|(_, w)| w).sum();
        let at: f64 = pms.iter().filter(|(l, _)| *l == t).map(|(_, w)| w).sum();
        let f_left = c + below;
        let f_right = f_left + at;
        worst = worst
            .max((e.cdf_left(t) - f_left).abs())
            .max((e.cdf(t) - f_right).abs());
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalLawParams {
    pub h: f64,
    pub r: f64,
    pub eta: f64,
}

/// `h = min(ln n / (9 (ln k)²), k)`, `r = e^{1/h}`, `η = √r - 1/√r`.
pub fn local_law_params(n: usize, k: usize) -> Result<LocalLawParams> {
    if n < 3 || k < 2 {
        return Err(Error::InvalidParameters(format!("need n >= 3, k >= 2, got n = {n}, k = {k}")));
    }
    let lk = (k as f64).ln();
    let h = ((n as f64).ln() / (9.0 * lk * lk)).min(k as f64);
    Ok(LocalLawParams::from_h(h))
}

impl LocalLawParams {
    pub fn from_h(h: f64) -> Self {
        let r = (1.0 / h).exp();
        let eta = r.sqrt() - r.sqrt().recip();
        Self { h, r, eta }
    }

    /// `4(1+√α)²/√α · max(2η, η / (-δ ln δ))`.
    pub fn min_width(&self, alpha: f64, delta: f64) -> f64 {
        let sa = alpha.sqrt();
        let c = 4.0 * (1.0 + sa) * (1.0 + sa) / sa;
        c * (2.0 * self.eta).max(self.eta / (-delta * delta.ln()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalLawReport {
    pub interval: (f64, f64),
    /// `|μ_n(I) - μ(I)|`.
    pub lhs: f64,
    pub width: f64,
    /// Minimum interval width the estimate requires.
    pub allowed_width: f64,
    /// `lhs / (δ |I|)`, to be compared with the unspecified constant.
    pub ratio: f64,
    /// Whether the interval is wide enough.
    pub ok: bool,
}

/// Compares ESD and limit mass on `interval` without enforcing the width
/// requirement.
pub fn local_law_report<D: SpectralDensity + ?Sized>(
    e: &Esd,
    density: &D,
    interval: (f64, f64),
    params: &LocalLawParams,
    alpha: f64,
    delta: f64,
) -> Result<LocalLawReport> {
    let (lo, hi) = interval;
    if !(lo < hi) || lo <= -2.0 || hi > 2.0 {
        return Err(Error::InvalidParameters(format!("interval [{lo}, {hi}] must lie in (-2, 2]")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidParameters(format!("delta must lie in (0, 1), got {delta}")));
    }
    if !(alpha >= 1.0) {
        return Err(Error::InvalidParameters(format!("alpha = {alpha} < 1")));
    }
    let width = hi - lo;
    let lhs = (e.interval_mass(lo, hi) - density.interval_mass(lo, hi)).abs();
    let allowed_width = params.min_width(alpha, delta);
    Ok(LocalLawReport {
        interval,
        lhs,
        width,
        allowed_width,
        ratio: lhs / (delta * width),
        ok: width >= allowed_width,
    })
}

/// Like [`local_law_report`] but refuses intervals below the minimum width.
pub fn local_law_check<D: SpectralDensity + ?Sized>(
    e: &Esd,
    density: &D,
    interval: (f64, f64),
    params: &LocalLawParams,
    alpha: f64,
    delta: f64,
) -> Result<LocalLawReport> {
    let rep = local_law_report(e, density, interval, params, alpha, delta)?;
    if !rep.ok {
        return Err(Error::IntervalTooNarrow { width: rep.width, required: rep.allowed_width });
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampler::{sample_regular_hypergraph, SampleConfig};

    #[test]
    fn complete_three_uniform_gap() {
        let h = Hypergraph::complete(4, 3).unwrap();
        let g = adjacency_gap(&h).unwrap();
        assert!((g.lambda1 - 6.0).abs() < 1e-10);
        assert!((g.lambda2 + 2.0).abs() < 1e-10);
        assert!((g.lambda_min + 2.0).abs() < 1e-10);
        assert!((g.lambda - 2.0).abs() < 1e-10);
        assert!((g.ramanujan_margin - 1.0).abs() < 1e-10);
        assert!(g.is_ramanujan() && g.perron_matches());
        let js = serde_json::to_string(&g).unwrap();
        assert!(js.contains("\"ramanujan_margin\""));
    }

    #[test]
    fn triangle_gap() {
        let h = Hypergraph::complete(3, 2).unwrap();
        let g = adjacency_gap(&h).unwrap();
        assert!((g.lambda1 - 2.0).abs() < 1e-10);
        assert!((g.lambda2 + 1.0).abs() < 1e-10);
        assert!((g.ramanujan_margin - 1.0).abs() < 1e-10);
    }

    #[test]
    fn esd_transform() {
        let spec = RealSpectrum::new(vec![6.0, -2.0, -2.0, -2.0]);
        let e = esd_of(&spec, 1.0, 8f64.sqrt()).unwrap();
        let s8 = 8f64.sqrt();
        assert_eq!(e.atoms().len(), 4);
        for a in &e.atoms()[..3] {
            assert!((a + 3.0 / s8).abs() < 1e-15);
        }
        assert!((e.atoms()[3] - 5.0 / s8).abs() < 1e-15);
        assert_eq!(e.atom_weight(), 0.25);
        let id = esd_of(&spec, 0.0, 1.0).unwrap();
        assert_eq!(id.atoms(), &[-2.0, -2.0, -2.0, 6.0]);
        assert!(esd_of(&spec, 0.0, 0.0).is_err());
        assert_eq!(e.without_largest().atoms().len(), 3);
        assert!((e.without_largest().atom_weight() - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn esd_cdf_and_histogram() {
        let e = Esd::new(vec![0.5, -0.5, 0.25], vec![(0.0, 0.25)]).unwrap();
        assert!((e.atom_weight() - 0.25).abs() < 1e-15);
        assert!((e.cdf(0.0) - 0.5).abs() < 1e-15);
        assert!((e.cdf_left(0.0) - 0.25).abs() < 1e-15);
        assert!((e.cdf(1.0) - 1.0).abs() < 1e-15);
        let hist = e.histogram(4, -1.0, 1.0).unwrap();
        let masses: Vec<f64> = hist.iter().map(|b| b.mass).collect();
        assert_eq!(masses, vec![0.0, 0.25, 0.5, 0.25]);
        let csv = e.histogram_csv(2, -1.0, 1.0).unwrap();
        assert_eq!(csv, "bin_left,bin_right,mass\n-1,0,0.25\n0,1,0.75\n");
        let back: Esd = serde_json::from_str(&e.to_json()).unwrap();
        assert_eq!(back, e);
    }

    #[test]
    fn ks_self_consistency() {
        let law = LimitLaw::feng_li(5, 3).unwrap();
        let n = 10_000;
        let ps: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
        let q = quantiles_sorted(&law, &ps);
        let e = Esd::new(q, Vec::new()).unwrap();
        let dist = ks_distance(&e, &law).unwrap();
        assert!(dist < 2e-4, "{dist}");
    }

    #[test]
    fn ks_matching_point_mass() {
        let alpha = 3.0;
        let law = LimitLaw::bipartite(alpha).unwrap();
        let zero = (alpha - 1.0) / (alpha + 1.0);
        let n = 4000;
        let ps: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
        let q = quantiles_sorted(&law, &ps);
        let e = Esd::new(q, vec![(0.0, zero)]).unwrap();
        let dist = ks_distance(&e, &law).unwrap();
        assert!(dist < 1e-3, "{dist}");
        let e_missing = Esd::new(e.atoms().to_vec(), Vec::new()).unwrap();
        assert!(ks_distance(&e_missing, &law).unwrap() > 0.2);
    }

    struct Unnormalised;
    impl SpectralDensity for Unnormalised {
        fn pdf(&self, x: f64) -> f64 {
            if (0.0..=1.0).contains(&x) { 2.0 } else { 0.0 }
        }
        fn pieces(&self) -> Vec<(f64, f64)> {
            vec![(0.0, 1.0)]
        }
    }

    #[test]
    fn ks_rejects_unnormalised() {
        let e = Esd::new(vec![0.5], Vec::new()).unwrap();
        assert!(matches!(ks_distance(&e, &Unnormalised), Err(Error::DensityNotNormalized(_))));
    }

    #[test]
    fn sampled_esd_is_confined() {
        let cfg = SampleConfig::new(300, 5, 3, 11);
        let (h, _) = sample_regular_hypergraph(&cfg).unwrap();
        let spec = symmetric_eigenvalues(&h.adjacency_matrix()).unwrap();
        let e = esd_of(&spec, 1.0, 8f64.sqrt()).unwrap();
        let outside = e.atoms().iter().filter(|a| a.abs() > 2.2).count();
        assert!(outside <= 1);
        let ks = ks_distance(&e.without_largest(), &LimitLaw::feng_li(5, 3).unwrap()).unwrap();
        assert!(ks < 0.08, "{ks}");
    }

    #[test]
    fn local_law_formula() {
        let p = local_law_params(1_000_000, 10).unwrap();
        let h = (1e6f64).ln() / (9.0 * 10f64.ln().powi(2));
        assert!((p.h - h).abs() < 1e-14);
        assert!((p.h - 0.28954).abs() < 1e-4);
        assert!((p.r - (1.0 / h).exp()).abs() < 1e-12);
        assert!((p.eta - (p.r.sqrt() - 1.0 / p.r.sqrt())).abs() < 1e-12);
        assert!(local_law_params(2, 3).is_err());
        // h capped at k
        let big = local_law_params(usize::MAX, 2).unwrap();
        assert_eq!(big.h, 2.0);
    }

    #[test]
    fn local_law_width() {
        let p = LocalLawParams::from_h(5.0);
        let law = LimitLaw::feng_li(5, 3).unwrap();
        let e = Esd::new(vec![0.0, 0.5], Vec::new()).unwrap();
        let err = local_law_check(&e, &law, (0.0, 0.1), &p, 1.0, 0.5).unwrap_err();
        assert!(matches!(err, Error::IntervalTooNarrow { .. }));
        let rep = local_law_report(&e, &law, (0.0, 0.1), &p, 1.0, 0.5).unwrap();
        assert!(!rep.ok);
        let w1 = p.min_width(1.0, 0.9);
        let w2 = p.min_width(1.0, 0.999_999);
        assert!(w2 > 1e3 * w1);
        assert!(local_law_report(&e, &law, (0.0, 0.1), &p, 1.0, 1.0).is_err());
    }

    proptest::proptest! {
        #[test]
        fn eta_decreases_in_h(h1 in 0.05f64..50.0, dh in 0.01f64..10.0) {
            let a = LocalLawParams::from_h(h1);
            let b = LocalLawParams::from_h(h1 + dh);
            proptest::prop_assert!(b.eta < a.eta);
            proptest::prop_assert!(b.eta > 0.0 && b.r > 1.0);
        }
    }
}

//! Experiment orchestration: parameter checks, per-seed work on a bounded
//! pool, per-seed files and a deterministic summary.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use hyperspec::expansion::{verify_expander_mixing, verify_vertex_expansion};
use hyperspec::linalg::{symmetric_eigenvalues, NONSYMMETRIC_CAP};
use hyperspec::nbops::{classify_nb_spectrum, nb_gap_from_spectrum, verify_bmn};
use hyperspec::sampler::{auto_method, SampleMethod, RNG_ALGORITHM};
use hyperspec::spectra::{
    esd_of, ks_distance, local_law_params, local_law_report, GapReport, LimitLaw,
};
use hyperspec::walks::{nbrw_mixing_exact, srw_mixing_empirical};
use hyperspec::{sample_regular_hypergraph, Error, Hypergraph, SampleConfig};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::{Common, Format};

pub const EXIT_INVALID: u8 = 2;
pub const EXIT_IO: u8 = 3;
pub const EXIT_INTERNAL: u8 = 4;

/// Histogram range and resolution for `esd --format csv`.
const HIST_BINS: usize = 50;
const HIST_RANGE: (f64, f64) = (-2.5, 2.5);

/// `δ` and intervals for `local-law`.
const LOCAL_LAW_DELTA: f64 = 0.5;
const LOCAL_LAW_INTERVALS: [(f64, f64); 4] = [(-1.9, 2.0), (-1.9, 0.0), (0.0, 2.0), (-1.0, 1.0)];

/// Offset that separates subset-sampling streams from sampling streams.
const TRIAL_SEED_OFFSET: u64 = 0x9E37_79B9_7F4A_7C15;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Sample,
    Gap,
    Esd,
    NbSpectrum,
    WalkMix,
    Expansion,
    LocalLaw,
}

impl Kind {
    fn name(self) -> &'static str {
        match self {
            Kind::Sample => "sample",
            Kind::Gap => "gap",
            Kind::Esd => "esd",
            Kind::NbSpectrum => "nb-spectrum",
            Kind::WalkMix => "walk-mix",
            Kind::Expansion => "expansion",
            Kind::LocalLaw => "local-law",
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Extra {
    pub lmax: usize,
    pub trials: usize,
}

impl Default for Extra {
    fn default() -> Self {
        Self { lmax: 40, trials: 1000 }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub kind: Kind,
    pub n: usize,
    pub d: usize,
    pub k: usize,
    pub seeds: Vec<u64>,
    pub slack: f64,
    pub out: std::path::PathBuf,
    pub format: Format,
    pub extra: Extra,
    pub method: SampleMethod,
}

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    fn invalid(message: impl Into<String>) -> Self {
        Self { code: EXIT_INVALID, message: message.into() }
    }

    fn io(path: &Path, e: std::io::Error) -> Self {
        Self { code: EXIT_IO, message: format!("{}: {e}", path.display()) }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidParameters(_)
            | Error::RetryLimitExceeded(_)
            | Error::DimensionTooLarge { .. }
            | Error::DegenerateParameters => EXIT_INVALID,
            _ => EXIT_INTERNAL,
        };
        Self { code, message: e.to_string() }
    }
}

/// A plain integer is a count (seeds `0..N`); anything with a comma is an
/// explicit list. The result is sorted and deduplicated.
pub fn parse_seeds(s: &str) -> Result<Vec<u64>, CliError> {
    let s = s.trim();
    let mut seeds: Vec<u64> = if s.contains(',') {
        s.split(',')
            .filter(|t| !t.trim().is_empty())
            .map(|t| t.trim().parse::<u64>().map_err(|_| CliError::invalid(format!("bad seed {t:?}"))))
            .collect::<Result<_, _>>()?
    } else {
        let count: u64 = s.parse().map_err(|_| CliError::invalid(format!("bad seed count {s:?}")))?;
        (0..count).collect()
    };
    seeds.sort_unstable();
    seeds.dedup();
    if seeds.is_empty() {
        return Err(CliError::invalid("no seeds given"));
    }
    Ok(seeds)
}

impl ExperimentSpec {
    pub fn new(kind: Kind, c: Common, extra: Extra) -> Result<Self, CliError> {
        let seeds = parse_seeds(&c.seeds)?;
        SampleConfig::new(c.n, c.d, c.k, 0).validate()?;
        if !(c.slack >= 0.0) {
            return Err(CliError::invalid(format!("slack must be nonnegative, got {}", c.slack)));
        }
        match kind {
            Kind::NbSpectrum if c.n * c.d > NONSYMMETRIC_CAP => {
                return Err(CliError::invalid(format!(
                    "nb-spectrum needs n*d <= {NONSYMMETRIC_CAP}, got {}",
                    c.n * c.d
                )));
            }
            Kind::WalkMix if extra.lmax < 10 => {
                return Err(CliError::invalid("--lmax must be at least 10"));
            }
            Kind::Expansion if extra.trials == 0 => {
                return Err(CliError::invalid("--trials must be at least 1"));
            }
            _ => {}
        }
        Ok(Self {
            kind,
            n: c.n,
            d: c.d,
            k: c.k,
            seeds,
            slack: c.slack,
            out: c.out,
            format: c.format,
            extra,
            method: auto_method(c.d, c.k),
        })
    }

    fn config(&self, seed: u64) -> SampleConfig {
        SampleConfig::new(self.n, self.d, self.k, seed).with_method(self.method)
    }

    fn q(&self) -> f64 {
        ((self.d - 1) * (self.k - 1)) as f64
    }
}

/// What one seed produces: the per-seed file body and its summary entry.
struct SeedOutput {
    file: String,
    entry: Value,
}

fn thread_count() -> Option<usize> {
    std::env::var("HYPERSPEC_THREADS").ok()?.trim().parse::<usize>().ok().filter(|&t| t > 0)
}

pub fn run(spec: &ExperimentSpec) -> Result<(), CliError> {
    fs::create_dir_all(&spec.out).map_err(|e| CliError::io(&spec.out, e))?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = thread_count() {
        builder = builder.num_threads(t);
    }
    let pool = builder
        .build()
        .map_err(|e| CliError { code: EXIT_INTERNAL, message: e.to_string() })?;
    let results: Vec<(u64, Result<SeedOutput, CliError>)> = pool.install(|| {
        spec.seeds.par_iter().map(|&seed| (seed, run_seed(spec, seed))).collect()
    });

    let mut entries = Vec::new();
    let mut errors = Vec::new();
    let mut first_error: Option<CliError> = None;
    for (seed, res) in results {
        match res {
            Ok(out) => {
                let path = spec.out.join(format!("{}_seed{seed}.{}", spec.kind.name(), spec.format.ext()));
                fs::write(&path, out.file).map_err(|e| CliError::io(&path, e))?;
                entries.push(out.entry);
            }
            Err(e) => {
                errors.push(json!({ "seed": seed, "code": e.code, "error": e.message }));
                if first_error.as_ref().is_none_or(|f| e.code > f.code) {
                    first_error = Some(e);
                }
            }
        }
    }

    let summary = json!({
        "command": spec.kind.name(),
        "n": spec.n,
        "d": spec.d,
        "k": spec.k,
        "seeds": spec.seeds,
        "slack": spec.slack,
        "sampler": { "rng": RNG_ALGORITHM, "method": spec.method },
        "results": entries,
        "aggregate": aggregate(spec, &entries),
        "errors": errors,
    });
    let path = spec.out.join("summary.json");
    let body = serde_json::to_string_pretty(&summary).expect("summary serialises") + "\n";
    fs::write(&path, body).map_err(|e| CliError::io(&path, e))?;
    match first_error {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

fn pretty(v: &impl serde::Serialize) -> String {
    serde_json::to_string_pretty(v).expect("serialisable") + "\n"
}

fn run_seed(spec: &ExperimentSpec, seed: u64) -> Result<SeedOutput, CliError> {
    let (h, report) = sample_regular_hypergraph(&spec.config(seed))?;
    let sample_info = json!({
        "attempts": report.attempts,
        "multiedge_rejections": report.multiedge_rejections,
        "duplicate_neighborhood_rejections": report.duplicate_neighborhood_rejections,
    });
    match spec.kind {
        Kind::Sample => sample_seed(spec, seed, &h, sample_info),
        Kind::Gap => gap_seed(spec, seed, &h),
        Kind::Esd => esd_seed(spec, seed, &h),
        Kind::NbSpectrum => nb_seed(spec, seed, &h),
        Kind::WalkMix => walk_seed(spec, seed, &h),
        Kind::Expansion => expansion_seed(spec, seed, &h),
        Kind::LocalLaw => local_law_seed(spec, seed, &h),
    }
}

fn sample_seed(spec: &ExperimentSpec, seed: u64, h: &Hypergraph, info: Value) -> Result<SeedOutput, CliError> {
    let file = match spec.format {
        Format::Json => h.to_json() + "\n",
        Format::Csv => {
            let mut s = String::from("edge,vertex\n");
            for (e, verts) in h.edges().iter().enumerate() {
                for v in verts {
                    let _ = writeln!(s, "{e},{v}");
                }
            }
            s
        }
    };
    let entry = json!({ "seed": seed, "connected": h.is_connected(), "sampling": info });
    Ok(SeedOutput { file, entry })
}

fn gap_seed(spec: &ExperimentSpec, seed: u64, h: &Hypergraph) -> Result<SeedOutput, CliError> {
    let spectrum = symmetric_eigenvalues(&h.adjacency_matrix())?;
    let gap = GapReport::from_spectrum(&spectrum, spec.d, spec.k);
    let entry = json!({
        "seed": seed,
        "connected": h.is_connected(),
        "perron_matches": gap.perron_matches(),
        "lambda": gap.lambda,
        "ramanujan_margin": gap.ramanujan_margin,
        "ramanujan": gap.is_ramanujan(),
        "within_slack": gap.ramanujan_margin >= -spec.slack,
    });
    let file = match spec.format {
        Format::Json => pretty(&json!({ "seed": seed, "gap": gap, "eigenvalues": spectrum.values })),
        Format::Csv => {
            let mut s = String::from("index,eigenvalue\n");
            for (i, v) in spectrum.values.iter().enumerate() {
                let _ = writeln!(s, "{i},{v}");
            }
            s
        }
    };
    Ok(SeedOutput { file, entry })
}

fn esd_seed(spec: &ExperimentSpec, seed: u64, h: &Hypergraph) -> Result<SeedOutput, CliError> {
    let spectrum = symmetric_eigenvalues(&h.adjacency_matrix())?;
    let full = esd_of(&spectrum, spec.k as f64 - 2.0, spec.q().sqrt())?;
    let perron_atom = full.atoms().last().copied();
    let bulk = full.without_largest();
    let alpha = spec.d as f64 / spec.k as f64;
    let ks_feng_li = ks_distance(&bulk, &LimitLaw::feng_li(spec.d, spec.k)?)?;
    let ks_alpha = ks_distance(&bulk, &LimitLaw::alpha(alpha)?)?;
    let entry = json!({
        "seed": seed,
        "perron_atom": perron_atom,
        "ks_feng_li": ks_feng_li,
        "ks_alpha": ks_alpha,
        "alpha": alpha,
    });
    let file = match spec.format {
        Format::Json => pretty(&json!({
            "seed": seed,
            "perron_excluded": true,
            "perron_atom": perron_atom,
            "ks_feng_li": ks_feng_li,
            "ks_alpha": ks_alpha,
            "esd": bulk,
        })),
        Format::Csv => bulk.histogram_csv(HIST_BINS, HIST_RANGE.0, HIST_RANGE.1)?,
    };
    Ok(SeedOutput { file, entry })
}

fn nb_seed(spec: &ExperimentSpec, seed: u64, h: &Hypergraph) -> Result<SeedOutput, CliError> {
    let cls = classify_nb_spectrum(h)?;
    let gap = nb_gap_from_spectrum(&cls.oracle, spec.d, spec.k, spec.slack);
    let bmn = verify_bmn(h);
    let largest = cls.oracle.values.first().map(|z| z.norm()).unwrap_or(0.0);
    let entry = json!({
        "seed": seed,
        "bmn": bmn,
        "reconciled": cls.reconciled,
        "max_deviation": cls.max_deviation,
        "largest_modulus": largest,
        "lambda2_modulus": gap.lambda2_modulus,
        "bound": gap.bound,
        "within_slack": gap.ok,
    });
    let file = match spec.format {
        Format::Json => pretty(&json!({ "seed": seed, "bmn": bmn, "gap": gap, "classification": cls })),
        Format::Csv => {
            let mut s = String::from("re,im,modulus\n");
            for z in &cls.oracle.values {
                let _ = writeln!(s, "{},{},{}", z.re, z.im, z.norm());
            }
            s
        }
    };
    Ok(SeedOutput { file, entry })
}

fn walk_seed(spec: &ExperimentSpec, seed: u64, h: &Hypergraph) -> Result<SeedOutput, CliError> {
    let gap = hyperspec::spectra::adjacency_gap(h)?;
    let rep = match srw_mixing_empirical(h, spec.extra.lmax) {
        Ok(r) => r,
        Err(Error::NoSpectralGap { lambda, top }) => {
            let entry = json!({ "seed": seed, "skipped": format!("no spectral gap: lambda = {lambda}, d(k-1) = {top}") });
            let file = match spec.format {
                Format::Json => pretty(&entry),
                Format::Csv => String::from("l,sup,exact_rate_pow\n"),
            };
            return Ok(SeedOutput { file, entry });
        }
        Err(e) => return Err(e.into()),
    };
    let nbrw = nbrw_mixing_exact(&gap, spec.d, spec.k).ok();
    let entry = json!({
        "seed": seed,
        "exact_rate": rep.exact_rate,
        "empirical_rate": rep.empirical_rate,
        "fit_rate": rep.fit_rate,
        "fit_r2": rep.fit_r2,
        "nbrw_exact_rate": nbrw,
    });
    let file = match spec.format {
        Format::Json => pretty(&json!({ "seed": seed, "mixing": rep, "nbrw_exact_rate": nbrw })),
        Format::Csv => rep.to_csv(),
    };
    Ok(SeedOutput { file, entry })
}

fn expansion_seed(spec: &ExperimentSpec, seed: u64, h: &Hypergraph) -> Result<SeedOutput, CliError> {
    let gap = hyperspec::spectra::adjacency_gap(h)?;
    let trial_seed = seed.wrapping_add(TRIAL_SEED_OFFSET);
    let mixing = verify_expander_mixing(h, &gap, spec.extra.trials, trial_seed)?;
    let vertex = verify_vertex_expansion(h, &gap, spec.extra.trials, trial_seed)?;
    let entry = json!({
        "seed": seed,
        "connected": h.is_connected(),
        "mixing_violations": mixing.violations,
        "mixing_worst_slack": mixing.worst_slack,
        "vertex_violations": vertex.violations,
        "vertex_worst_slack": vertex.worst_slack,
    });
    let file = match spec.format {
        Format::Json => pretty(&json!({ "seed": seed, "expander_mixing": mixing, "vertex_expansion": vertex })),
        Format::Csv => {
            let mut s = String::from("theorem,trials,violations,worst_slack\n");
            for (name, r) in [("expander_mixing", &mixing), ("vertex_expansion", &vertex)] {
                let _ = writeln!(s, "{name},{},{},{}", r.trials, r.violations, r.worst_slack);
            }
            s
        }
    };
    Ok(SeedOutput { file, entry })
}

fn local_law_seed(spec: &ExperimentSpec, seed: u64, h: &Hypergraph) -> Result<SeedOutput, CliError> {
    let spectrum = symmetric_eigenvalues(&h.adjacency_matrix())?;
    let bulk = esd_of(&spectrum, spec.k as f64 - 2.0, spec.q().sqrt())?.without_largest();
    let alpha = spec.d as f64 / spec.k as f64;
    let law = LimitLaw::alpha(alpha)?;
    let params = local_law_params(spec.n, spec.k)?;
    let reports = LOCAL_LAW_INTERVALS
        .iter()
        .map(|&iv| local_law_report(&bulk, &law, iv, &params, alpha, LOCAL_LAW_DELTA))
        .collect::<Result<Vec<_>, _>>()?;
    let entry = json!({
        "seed": seed,
        "max_lhs": reports.iter().map(|r| r.lhs).fold(0.0, f64::max),
        "any_wide_enough": reports.iter().any(|r| r.ok),
    });
    let file = match spec.format {
        Format::Json => pretty(&json!({
            "seed": seed,
            "alpha": alpha,
            "delta": LOCAL_LAW_DELTA,
            "params": params,
            "perron_excluded": true,
            "intervals": reports,
        })),
        Format::Csv => {
            let mut s = String::from("lo,hi,lhs,width,allowed_width,ratio,ok\n");
            for r in &reports {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{},{}",
                    r.interval.0, r.interval.1, r.lhs, r.width, r.allowed_width, r.ratio, r.ok
                );
            }
            s
        }
    };
    Ok(SeedOutput { file, entry })
}

fn fraction(entries: &[Value], key: &str) -> Value {
    let flags: Vec<bool> = entries.iter().filter_map(|e| e.get(key)?.as_bool()).collect();
    if flags.is_empty() {
        return Value::Null;
    }
    json!(flags.iter().filter(|&&b| b).count() as f64 / flags.len() as f64)
}

fn median(entries: &[Value], key: &str) -> Value {
    let mut v: Vec<f64> = entries.iter().filter_map(|e| e.get(key)?.as_f64()).collect();
    if v.is_empty() {
        return Value::Null;
    }
    v.sort_by(f64::total_cmp);
    let m = v.len();
    json!(if m % 2 == 1 { v[m / 2] } else { 0.5 * (v[m / 2 - 1] + v[m / 2]) })
}

fn sum_u64(entries: &[Value], key: &str) -> u64 {
    entries.iter().filter_map(|e| e.get(key)?.as_u64()).sum()
}

fn aggregate(spec: &ExperimentSpec, entries: &[Value]) -> Value {
    let q = spec.q();
    match spec.kind {
        Kind::Sample => json!({
            "fraction_connected": fraction(entries, "connected"),
            "total_attempts": entries.iter().filter_map(|e| e["sampling"]["attempts"].as_u64()).sum::<u64>(),
        }),
        Kind::Gap => json!({
            "bound": 2.0 * q.sqrt(),
            "bound_with_slack": 2.0 * q.sqrt() + spec.slack,
            "fraction_ramanujan": fraction(entries, "ramanujan"),
            "fraction_within_slack": fraction(entries, "within_slack"),
            "fraction_connected": fraction(entries, "connected"),
        }),
        Kind::Esd => json!({
            "perron_excluded": true,
            "median_ks_feng_li": median(entries, "ks_feng_li"),
            "median_ks_alpha": median(entries, "ks_alpha"),
        }),
        Kind::NbSpectrum => json!({
            "bound": q.sqrt(),
            "bound_with_slack": q.sqrt() + spec.slack,
            "fraction_within_slack": fraction(entries, "within_slack"),
            "fraction_reconciled": fraction(entries, "reconciled"),
            "fraction_bmn": fraction(entries, "bmn"),
        }),
        Kind::WalkMix => json!({
            "lmax": spec.extra.lmax,
            "median_exact_rate": median(entries, "exact_rate"),
            "median_fit_rate": median(entries, "fit_rate"),
            "skipped": entries.iter().filter(|e| e.get("skipped").is_some()).count(),
        }),
        Kind::Expansion => json!({
            "trials_per_seed": spec.extra.trials,
            "mixing_violations": sum_u64(entries, "mixing_violations"),
            "vertex_violations": sum_u64(entries, "vertex_violations"),
        }),
        Kind::LocalLaw => json!({
            "delta": LOCAL_LAW_DELTA,
            "intervals": LOCAL_LAW_INTERVALS,
            "median_max_lhs": median(entries, "max_lhs"),
        }),
    }
}

//! Spec expansion and execution. A spec becomes an ordered list of
//! independent cells; cells may run on any number of threads, but rows are
//! assembled in cell order by a single aggregator, so file contents depend
//! only on the spec and seed.

use crate::csv;
use crate::manifest::{CellRecord, CellStatus, RunManifest};
use crate::plot;
use crate::spec::{parse_regime, ExperimentSpec, Kind, ValidationError};
use crate::verify::{self, CellBody};
use gslab_core::bounds::{
    minimax_lower, required_m_lower, xi_choice, BoundReport, Domain, upper_m_lipschitz,
};
use gslab_core::model::SignedSupport;
use gslab_core::sensing::{
    decode_exhaustive, estimate_risk_detailed, DecoderFamily, HardPrior, RiskMode, SensingConfig,
};
use gslab_core::Error as CoreError;
use ndarray::{Array1, Array2};
use rayon::prelude::*;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};

/// Cells whose signed-support family exceeds this are skipped.
pub const DECODE_CAP: u128 = 1 << 20;
/// Exact-neighborhood enumeration cap for bound reports and packing cells.
pub const NMAX_CAP: u128 = 200_000;
/// Monte Carlo trials when the spec does not say.
pub const DEFAULT_TRIALS: usize = 200;
/// Random latent pairs per slope-check cell when the spec does not say.
pub const DEFAULT_PAIRS: usize = 100_000;
const MAX_CELLS: usize = 10_000;

const BOUNDS_COLUMNS: &[&str] = &[
    "cell", "n", "k", "m", "alpha", "sigma2", "frob2", "xi", "eps", "log_v", "log_nmax_bound",
    "ratio_bound", "analytic_flag", "log_nmax_exact", "info", "fano_bracket", "fano",
    "minimax_lower", "required_m_lower",
];
const RISK_COLUMNS: &[&str] = &[
    "cell", "n", "k", "alpha", "m", "xi", "trials", "decoder", "risk", "std_error",
    "minimax_lower", "thr_m_lower", "thr_m_upper",
];
const VERIFY_COLUMNS: &[&str] = &["cell", "status", "metric", "value"];
const TRIAL_COLUMNS: &[&str] = &[
    "trial", "m", "n", "k", "alpha", "xi", "decoder", "sq_error", "seed",
];

#[derive(Debug, Clone, PartialEq)]
enum Cell {
    Bounds { n: usize, k: usize, m: f64, alpha: f64 },
    Risk { n: usize, k: usize, alpha: f64, m: usize, xi: Option<f64> },
    Deep { n: usize, k: usize, r: f64, x_max: f64 },
    Sawtooth { teeth: u64 },
    Recursive { k0: usize, n0: usize, regime: String },
    Lipschitz { n: usize, k: usize, r: f64, x_max: Option<f64>, l: Option<f64> },
    Packing { n: usize, k: usize },
}

fn num(v: f64) -> String {
    format!("{v}")
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

impl Cell {
    fn id(&self) -> String {
        match self {
            Cell::Bounds { n, k, m, alpha } => {
                format!("bounds[n={n} k={k} m={} alpha={}]", num(*m), num(*alpha))
            }
            Cell::Risk { n, k, alpha, m, xi } => match xi {
                Some(xi) => format!(
                    "risk[n={n} k={k} alpha={} m={m} xi={}]",
                    num(*alpha),
                    num(*xi)
                ),
                None => format!("risk[n={n} k={k} alpha={} m={m}]", num(*alpha)),
            },
            Cell::Deep { n, k, r, x_max } => {
                format!("deep[n={n} k={k} r={} x_max={}]", num(*r), num(*x_max))
            }
            Cell::Sawtooth { teeth } => format!("sawtooth[teeth={teeth}]"),
            Cell::Recursive { k0, n0, regime } => {
                format!("recursive[k0={k0} n0={n0} regime={regime}]")
            }
            Cell::Lipschitz { n, k, r, x_max, l } => match (x_max, l) {
                (_, Some(l)) => format!("lipschitz[n={n} k={k} r={} l={}]", num(*r), num(*l)),
                (x, None) => format!(
                    "lipschitz[n={n} k={k} r={} x_max={}]",
                    num(*r),
                    num(x.unwrap_or(1.0))
                ),
            },
            Cell::Packing { n, k } => format!("packing[n={n} k={k}]"),
        }
    }
}

fn or_unit(values: &[f64]) -> Vec<f64> {
    if values.is_empty() {
        vec![1.0]
    } else {
        values.to_vec()
    }
}

fn expand(spec: &ExperimentSpec) -> Result<Vec<Cell>, ValidationError> {
    let mut cells = Vec::new();
    match spec.kind {
        Kind::BoundsSweep => {
            for &n in &spec.n {
                for &k in &spec.k {
                    for &m in &spec.m {
                        for &alpha in &spec.alpha {
                            cells.push(Cell::Bounds { n, k, m, alpha });
                        }
                    }
                }
            }
        }
        Kind::RiskCurve => {
            let xis: Vec<Option<f64>> = if spec.xi.is_empty() {
                vec![None]
            } else {
                spec.xi.iter().map(|x| Some(*x)).collect()
            };
            for &n in &spec.n {
                for &k in &spec.k {
                    for &alpha in &spec.alpha {
                        for &xi in &xis {
                            for &m in &spec.m {
                                cells.push(Cell::Risk {
                                    n,
                                    k,
                                    alpha,
                                    m: m as usize,
                                    xi,
                                });
                            }
                        }
                    }
                }
            }
        }
        Kind::ReluVerify => {
            if !spec.n.is_empty() && !spec.k.is_empty() {
                for &n in &spec.n {
                    for &k in &spec.k {
                        for &r in &or_unit(&spec.r) {
                            for &x_max in &or_unit(&spec.x_max) {
                                cells.push(Cell::Deep { n, k, r, x_max });
                            }
                        }
                    }
                }
            }
            for &teeth in &spec.sawtooth_teeth {
                cells.push(Cell::Sawtooth { teeth });
            }
            if !spec.regimes.is_empty() {
                for &k0 in &spec.k0 {
                    for &n0 in &spec.n0 {
                        for regime in &spec.regimes {
                            cells.push(Cell::Recursive {
                                k0,
                                n0,
                                regime: regime.clone(),
                            });
                        }
                    }
                }
            }
        }
        Kind::LipschitzVerify => {
            for &n in &spec.n {
                for &k in &spec.k {
                    for &r in &or_unit(&spec.r) {
                        if spec.l.is_empty() {
                            for &x_max in &or_unit(&spec.x_max) {
                                cells.push(Cell::Lipschitz {
                                    n,
                                    k,
                                    r,
                                    x_max: Some(x_max),
                                    l: None,
                                });
                            }
                        } else {
                            for &l in &spec.l {
                                cells.push(Cell::Lipschitz {
                                    n,
                                    k,
                                    r,
                                    x_max: None,
                                    l: Some(l),
                                });
                            }
                        }
                    }
                }
            }
        }
        Kind::PackingVerify => {
            for &n in &spec.n {
                for &k in &spec.k {
                    cells.push(Cell::Packing { n, k });
                }
            }
        }
    }
    if cells.is_empty() {
        return Err(ValidationError::one("(grid)", "no cells to run"));
    }
    if cells.len() > MAX_CELLS {
        return Err(ValidationError::one(
            "(grid)",
            format!("{} cells exceed the limit of {MAX_CELLS}", cells.len()),
        ));
    }
    Ok(cells)
}

/// Parameter-domain errors and enumeration caps are deliberate skips; every
/// other error is a real failure.
fn classify(e: &CoreError) -> CellStatus {
    match e {
        CoreError::EnumerationCap { .. }
        | CoreError::InvalidParameter(_)
        | CoreError::NotGroupSparse(_) => CellStatus::Skipped {
            reason: e.to_string(),
        },
        _ => CellStatus::Failed {
            reason: e.to_string(),
        },
    }
}

struct CellResult {
    record: CellRecord,
    rows: Vec<Vec<String>>,
    trial_rows: Vec<Vec<String>>,
}

fn bounds_row(id: &str, n: usize, k: usize, m: f64, alpha: f64, rep: &BoundReport) -> Vec<String> {
    vec![
        id.to_string(),
        n.to_string(),
        k.to_string(),
        num(m),
        num(alpha),
        num(rep.sigma2),
        num(rep.frob2),
        num(rep.xi),
        num(rep.eps),
        num(rep.packing.log_v),
        num(rep.packing.log_nmax_bound),
        num(rep.packing.ratio_bound),
        rep.packing.analytic_flag.to_string(),
        opt(rep.log_nmax_exact),
        num(rep.info),
        opt(rep.fano_bracket),
        opt(rep.fano),
        num(rep.minimax_lower),
        num(rep.required_m_lower),
    ]
}

fn risk_body(
    spec: &ExperimentSpec,
    id: &str,
    n: usize,
    k: usize,
    alpha: f64,
    m: usize,
    xi_fixed: Option<f64>,
    want_trials: bool,
) -> Result<(Vec<String>, Vec<Vec<String>>), CoreError> {
    let c = spec.constants();
    if k == 0 || n % k != 0 {
        return Err(CoreError::NotGroupSparse(format!(
            "n = {n} does not split into k = {k} equal blocks"
        )));
    }
    let count = SignedSupport::count(k, n / k);
    if count > DECODE_CAP {
        return Err(CoreError::EnumerationCap {
            size: count,
            cap: DECODE_CAP,
        });
    }
    let sigma2 = alpha / m as f64;
    let frob2 = c.c_a * n as f64;
    let xi = match xi_fixed {
        Some(x) => x,
        None => xi_choice(n, k, sigma2, frob2)?,
    };
    let cfg = SensingConfig::new(m, n, alpha, spec.seed)?.with_frobenius(frob2)?;
    let prior = HardPrior { k, xi };
    let family = DecoderFamily::SignedSupports { k, xi };
    let decoder = move |y: &Array1<f64>, a: &Array2<f64>| {
        decode_exhaustive(y, a, family, DECODE_CAP)
            .expect("family size already checked against the cap")
            .values()
            .clone()
    };
    let mode = match spec.panel {
        Some(panel) => RiskMode::WorstCaseOverSampledSignals { panel },
        None => RiskMode::PriorAveraged,
    };
    let trials = spec.trials_or(DEFAULT_TRIALS);
    let (est, per_trial) = estimate_risk_detailed(&prior, &decoder, &cfg, trials, mode)?;

    let minimax = minimax_lower(n, k, sigma2, frob2, &c).ok();
    let thr_lo = required_m_lower(n, k, &c).ok();
    let l_prior = 2.0 * n as f64 * xi / k as f64;
    let thr_hi = upper_m_lipschitz(k, l_prior, 1.0, alpha, Domain::Rectangular, &c).ok();
    let row = vec![
        id.to_string(),
        n.to_string(),
        k.to_string(),
        num(alpha),
        m.to_string(),
        num(xi),
        trials.to_string(),
        "signed_supports".to_string(),
        num(est.mean_sq_error),
        num(est.std_error),
        opt(minimax),
        opt(thr_lo),
        opt(thr_hi),
    ];
    let trial_rows = if want_trials {
        per_trial
            .iter()
            .enumerate()
            .map(|(t, sq)| {
                vec![
                    t.to_string(),
                    m.to_string(),
                    n.to_string(),
                    k.to_string(),
                    num(alpha),
                    num(xi),
                    "signed_supports".to_string(),
                    num(*sq),
                    spec.seed.to_string(),
                ]
            })
            .collect()
    } else {
        Vec::new()
    };
    Ok((row, trial_rows))
}

fn verify_rows(id: &str, status: &CellStatus, metrics: &[(&'static str, String)]) -> Vec<Vec<String>> {
    let label = status.label();
    if metrics.is_empty() {
        return vec![vec![id.to_string(), label, "note".to_string(), String::new()]];
    }
    metrics
        .iter()
        .map(|(name, value)| vec![id.to_string(), label.clone(), name.to_string(), value.clone()])
        .collect()
}

fn execute(spec: &ExperimentSpec, cell: &Cell, index: u64, want_trials: bool) -> CellResult {
    let id = cell.id();
    let long_form = !matches!(cell, Cell::Bounds { .. } | Cell::Risk { .. });
    let body = catch_unwind(AssertUnwindSafe(|| run_cell(spec, cell, index, want_trials)));
    match body {
        Ok(result) => finish_cell(&id, result, long_form),
        Err(payload) => {
            let reason = payload
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| payload.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".to_string());
            CellResult {
                record: CellRecord {
                    id,
                    status: CellStatus::Failed {
                        reason: format!("panic: {reason}"),
                    },
                },
                rows: Vec::new(),
                trial_rows: Vec::new(),
            }
        }
    }
}

enum CellOutput {
    Row(Vec<String>, Vec<Vec<String>>),
    Verify(CellBody),
    Err(CoreError),
}

fn run_cell(spec: &ExperimentSpec, cell: &Cell, index: u64, want_trials: bool) -> CellOutput {
    let c = spec.constants();
    match cell {
        Cell::Bounds { n, k, m, alpha } => {
            match BoundReport::evaluate(*n, *k, *m, *alpha, &c, NMAX_CAP) {
                Ok(rep) => CellOutput::Row(bounds_row(&cell.id(), *n, *k, *m, *alpha, &rep), Vec::new()),
                Err(e) => CellOutput::Err(e),
            }
        }
        Cell::Risk { n, k, alpha, m, xi } => {
            match risk_body(spec, &cell.id(), *n, *k, *alpha, *m, *xi, want_trials) {
                Ok((row, trial_rows)) => CellOutput::Row(row, trial_rows),
                Err(e) => CellOutput::Err(e),
            }
        }
        Cell::Deep { n, k, r, x_max } => {
            match verify::deep_cell(*n, *k, *r, *x_max, spec.seed, index) {
                Ok(body) => CellOutput::Verify(body),
                Err(e) => CellOutput::Err(e),
            }
        }
        Cell::Sawtooth { teeth } => match verify::sawtooth_cell(*teeth) {
            Ok(body) => CellOutput::Verify(body),
            Err(e) => CellOutput::Err(e),
        },
        Cell::Recursive { k0, n0, regime } => {
            let parsed = match parse_regime(regime) {
                Ok(r) => r,
                Err(msg) => return CellOutput::Err(CoreError::InvalidParameter(msg)),
            };
            match verify::recursive_cell(*k0, *n0, &parsed, 1.0, spec.min_ratio) {
                Ok(body) => CellOutput::Verify(body),
                Err(e) => CellOutput::Err(e),
            }
        }
        Cell::Lipschitz { n, k, r, x_max, l } => {
            let x_max = match (x_max, l) {
                (Some(x), _) => *x,
                (None, Some(l)) => l * *k as f64 * r / (2.0 * *n as f64),
                (None, None) => 1.0,
            };
            let pairs = spec.trials_or(DEFAULT_PAIRS);
            match verify::lipschitz_cell(*n, *k, *r, x_max, pairs, spec.seed, index) {
                Ok(body) => CellOutput::Verify(body),
                Err(e) => CellOutput::Err(e),
            }
        }
        Cell::Packing { n, k } => match verify::packing_cell(*n, *k, NMAX_CAP) {
            Ok(body) => CellOutput::Verify(body),
            Err(e) => CellOutput::Err(e),
        },
    }
}

fn finish_cell(id: &str, output: CellOutput, long_form: bool) -> CellResult {
    match output {
        CellOutput::Row(row, trial_rows) => CellResult {
            record: CellRecord {
                id: id.to_string(),
                status: CellStatus::Ok,
            },
            rows: vec![row],
            trial_rows,
        },
        CellOutput::Verify(body) => {
            let status = match body.failure {
                None => CellStatus::Ok,
                Some(reason) => CellStatus::Failed { reason },
            };
            CellResult {
                rows: verify_rows(id, &status, &body.metrics),
                record: CellRecord {
                    id: id.to_string(),
                    status,
                },
                trial_rows: Vec::new(),
            }
        }
        CellOutput::Err(e) => {
            let status = classify(&e);
            // the wide numeric schemas have no status column; those cells
            // are recorded in the manifest only
            let rows = if long_form {
                verify_rows(id, &status, &[])
            } else {
                Vec::new()
            };
            CellResult {
                rows,
                record: CellRecord {
                    id: id.to_string(),
                    status,
                },
                trial_rows: Vec::new(),
            }
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub trials: Option<usize>,
    /// also emit per-trial rows (risk curves only)
    pub trial_csv: bool,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub manifest: RunManifest,
    pub manifest_hash: String,
    pub csv: String,
    pub trial_csv: Option<String>,
    pub plot_svg: Option<String>,
}

fn columns_for(kind: Kind) -> &'static [&'static str] {
    match kind {
        Kind::BoundsSweep => BOUNDS_COLUMNS,
        Kind::RiskCurve => RISK_COLUMNS,
        Kind::ReluVerify | Kind::LipschitzVerify | Kind::PackingVerify => VERIFY_COLUMNS,
    }
}

pub fn run(
    spec: &ExperimentSpec,
    spec_raw: &[u8],
    ov: &Overrides,
) -> Result<RunOutput, ValidationError> {
    let mut spec = spec.clone();
    if let Some(seed) = ov.seed {
        spec.seed = seed;
    }
    if let Some(trials) = ov.trials {
        spec.trials = Some(trials);
    }
    spec.validate()?;
    let mut manifest = RunManifest::new(spec_raw);
    let cells = expand(&spec)?;
    let results: Vec<CellResult> = cells
        .par_iter()
        .enumerate()
        .map(|(i, cell)| execute(&spec, cell, i as u64, ov.trial_csv))
        .collect();
    manifest.finish(results.iter().map(|r| r.record.clone()).collect());
    let manifest_hash = manifest.hash();

    let rows: Vec<Vec<String>> = results.iter().flat_map(|r| r.rows.clone()).collect();
    let csv_text = csv::render(&manifest_hash, columns_for(spec.kind), &rows);
    let trial_rows: Vec<Vec<String>> = results.iter().flat_map(|r| r.trial_rows.clone()).collect();
    let trial_csv = (spec.kind == Kind::RiskCurve && ov.trial_csv)
        .then(|| csv::render(&manifest_hash, TRIAL_COLUMNS, &trial_rows));
    let plot_svg = (spec.kind == Kind::RiskCurve && !rows.is_empty())
        .then(|| plot::emit_plot(&csv_text).expect("runner-generated csv is well-formed"));

    Ok(RunOutput {
        manifest,
        manifest_hash,
        csv: csv_text,
        trial_csv,
        plot_svg,
    })
}

/// Write `results.csv`, `manifest.json`, and when present `trials.csv` and
/// `plot.svg` into `dir`; returns the paths written.
pub fn write_outputs(out: &RunOutput, dir: &Path) -> std::io::Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let csv_path = dir.join("results.csv");
    std::fs::write(&csv_path, &out.csv)?;
    written.push(csv_path);
    let manifest_path = dir.join("manifest.json");
    std::fs::write(&manifest_path, out.manifest.to_json())?;
    written.push(manifest_path);
    if let Some(trials) = &out.trial_csv {
        let p = dir.join("trials.csv");
        std::fs::write(&p, trials)?;
        written.push(p);
    }
    if let Some(svg) = &out.plot_svg {
        let p = dir.join("plot.svg");
        std::fs::write(&p, svg)?;
        written.push(p);
    }
    Ok(written)
}

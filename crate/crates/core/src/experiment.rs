//! Sweep experiments driven by a JSON config file.
//!
//! Every sweep point is evaluated both analytically and by Monte Carlo.
//! Points run in parallel; rows are written in sweep order.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::auth::{
    default_eve_bounds, error_probabilities, p_fa_closed_form, p_md_expected, sigma_from_lq_db,
    threshold_for_pfa, AuthProfile, Realization,
};
use crate::channel::{NetworkParams, BASELINE_RHO_T};
use crate::coverage::coverage_joint;
use crate::geometry::{AnnulusRegion, DiskRegion};
use crate::montecarlo::{estimate_coverage, simulate_auth, AuthScenario, TrialConfig};

const MAX_SWEEP_POINTS: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    CoverageVsBeta,
    CoverageVsJamArea,
    CoverageVsJamDistance,
    AuthErrorsVsLq,
    Roc,
}

impl Scenario {
    pub fn parse(name: &str) -> Option<Self> {
        serde_json::from_value(serde_json::Value::String(name.to_owned())).ok()
    }

    pub fn name(&self) -> &'static str {
        match self {
            Scenario::CoverageVsBeta => "coverage_vs_beta",
            Scenario::CoverageVsJamArea => "coverage_vs_jam_area",
            Scenario::CoverageVsJamDistance => "coverage_vs_jam_distance",
            Scenario::AuthErrorsVsLq => "auth_errors_vs_lq",
            Scenario::Roc => "roc",
        }
    }

    /// The only sweep variable each scenario accepts.
    pub fn sweep_variable(&self) -> &'static str {
        match self {
            Scenario::CoverageVsBeta => "beta_db",
            Scenario::CoverageVsJamArea => "z2",
            Scenario::CoverageVsJamDistance => "z1",
            Scenario::AuthErrorsVsLq => "lq_db",
            Scenario::Roc => "p_fa",
        }
    }

    fn is_coverage(&self) -> bool {
        matches!(
            self,
            Scenario::CoverageVsBeta | Scenario::CoverageVsJamArea | Scenario::CoverageVsJamDistance
        )
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl OutputFormat {
    pub fn parse(name: &str) -> Option<Self> {
        match name {
            "csv" => Some(Self::Csv),
            "json" => Some(Self::Json),
            _ => None,
        }
    }
}

/// Network parameters as written in the config file. Missing keys take
/// the baseline values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ParamsFile {
    pub p_leader_dbm: f64,
    pub p_follower_dbm: f64,
    pub p_jammer_dbm: f64,
    pub alpha: f64,
    pub beta_dl_db: f64,
    pub beta_ul_db: f64,
    pub rho_t: f64,
    pub rho_j: f64,
    pub z1: f64,
    pub z2: f64,
    pub disk_radius: f64,
}

impl Default for ParamsFile {
    fn default() -> Self {
        Self {
            p_leader_dbm: 30.0,
            p_follower_dbm: 20.0,
            p_jammer_dbm: 10.0,
            alpha: 3.0,
            beta_dl_db: -20.0,
            beta_ul_db: -20.0,
            rho_t: BASELINE_RHO_T,
            rho_j: BASELINE_RHO_T,
            z1: 0.0,
            z2: 300.0,
            disk_radius: 500.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AuthFile {
    pub m: usize,
    pub n: usize,
    pub realization_seed: u64,
    /// Fixed link quality for the ROC scenario.
    pub lq_db: f64,
    /// Threshold from a target false-alarm rate...
    pub p_fa: Option<f64>,
    /// ...or a fixed threshold in dB.
    pub epsilon: Option<f64>,
    pub eve_psi_min: Option<f64>,
    pub eve_psi_max: Option<f64>,
}

impl Default for AuthFile {
    fn default() -> Self {
        Self {
            m: 5,
            n: 5,
            realization_seed: 42,
            lq_db: 10.0,
            p_fa: None,
            epsilon: None,
            eve_psi_min: None,
            eve_psi_max: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepFile {
    pub variable: String,
    pub start: f64,
    pub stop: f64,
    pub step: f64,
    /// Annulus width `z2 − z1` for jam-distance sweeps.
    #[serde(default)]
    pub width: Option<f64>,
}

fn default_trials() -> u64 {
    100_000
}

fn default_seed() -> u64 {
    42
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub scenario: Scenario,
    #[serde(default)]
    pub params: ParamsFile,
    #[serde(default)]
    pub auth: AuthFile,
    pub sweep: SweepFile,
    #[serde(default = "default_trials")]
    pub n_trials: u64,
    #[serde(default = "default_seed")]
    pub master_seed: u64,
    pub output_path: PathBuf,
    #[serde(default)]
    pub output_format: OutputFormat,
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub trials: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: Option<OutputFormat>,
    pub scenario: Option<Scenario>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    pub params: NetworkParams,
    pub auth: AuthFile,
    pub sweep: SweepFile,
    pub n_trials: u64,
    pub master_seed: u64,
    pub output_path: PathBuf,
    pub output_format: OutputFormat,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExperimentError {
    /// One diagnostic per problem found in the config.
    Config(Vec<String>),
    Numeric(String),
    Io(String),
}

impl ExperimentError {
    pub fn exit_code(&self) -> i32 {
        match self {
            ExperimentError::Config(_) | ExperimentError::Io(_) => 2,
            ExperimentError::Numeric(_) => 3,
        }
    }
}

impl fmt::Display for ExperimentError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExperimentError::Config(diags) => write!(f, "{}", diags.join("\n")),
            ExperimentError::Numeric(msg) => write!(f, "numeric failure: {msg}"),
            ExperimentError::Io(msg) => write!(f, "{msg}"),
        }
    }
}

impl std::error::Error for ExperimentError {}

// 1-based line of the first occurrence of `"key"` in the raw text.
fn line_of(text: &str, key: &str) -> Option<usize> {
    let needle = format!("\"{key}\"");
    text.lines().position(|l| l.contains(&needle)).map(|i| i + 1)
}

struct Diagnostics<'a> {
    source: &'a str,
    text: &'a str,
    items: Vec<String>,
}

impl Diagnostics<'_> {
    fn push(&mut self, key: &str, msg: impl fmt::Display) {
        match line_of(self.text, key) {
            Some(line) => self.items.push(format!("{}:{line}: {msg}", self.source)),
            None => self.items.push(format!("{}: {msg}", self.source)),
        }
    }
}

/// Parses and validates a config file.
pub fn load_config(path: &Path, overrides: &Overrides) -> Result<ExperimentConfig, ExperimentError> {
    let text = fs::read_to_string(path)
        .map_err(|e| ExperimentError::Config(vec![format!("{}: {e}", path.display())]))?;
    parse_config(&text, &path.display().to_string(), overrides)
}

/// Parses and validates config text. `source` labels the diagnostics.
pub fn parse_config(
    text: &str,
    source: &str,
    overrides: &Overrides,
) -> Result<ExperimentConfig, ExperimentError> {
    let file: ConfigFile = serde_json::from_str(text).map_err(|e| {
        ExperimentError::Config(vec![format!("{source}:{}:{}: {e}", e.line(), e.column())])
    })?;

    let mut d = Diagnostics {
        source,
        text,
        items: Vec::new(),
    };
    let scenario = overrides.scenario.unwrap_or(file.scenario);
    let n_trials = overrides.trials.unwrap_or(file.n_trials);
    let p = file.params;

    if !(p.alpha > 2.0) || !p.alpha.is_finite() {
        d.push("alpha", format!("alpha must be > 2, got {}", p.alpha));
    }
    if !(p.z1 >= 0.0 && p.z1 < p.z2) || !p.z2.is_finite() {
        d.push("z1", format!("annulus requires 0 <= z1 < z2, got z1 = {}, z2 = {}", p.z1, p.z2));
    }
    if !(p.disk_radius > 0.0) || !p.disk_radius.is_finite() {
        d.push("disk_radius", format!("disk_radius must be > 0, got {}", p.disk_radius));
    }
    if !(p.rho_t > 0.0) || !p.rho_t.is_finite() {
        d.push("rho_t", format!("rho_t must be > 0, got {}", p.rho_t));
    }
    if !(p.rho_j >= 0.0) || !p.rho_j.is_finite() {
        d.push("rho_j", format!("rho_j must be >= 0, got {}", p.rho_j));
    }
    for (key, v) in [
        ("p_leader_dbm", p.p_leader_dbm),
        ("p_follower_dbm", p.p_follower_dbm),
        ("p_jammer_dbm", p.p_jammer_dbm),
        ("beta_dl_db", p.beta_dl_db),
        ("beta_ul_db", p.beta_ul_db),
    ] {
        if !v.is_finite() {
            d.push(key, format!("{key} must be finite"));
        }
    }
    if n_trials == 0 {
        d.push("n_trials", "n_trials must be >= 1");
    }

    let s = &file.sweep;
    if s.variable != scenario.sweep_variable() {
        d.push(
            "variable",
            format!(
                "scenario {scenario} sweeps \"{}\", not \"{}\"",
                scenario.sweep_variable(),
                s.variable
            ),
        );
    }
    if !s.start.is_finite() || !s.stop.is_finite() || s.start > s.stop {
        d.push("start", format!("sweep needs finite start <= stop, got {} .. {}", s.start, s.stop));
    } else if !(s.step > 0.0) || !s.step.is_finite() {
        d.push("step", format!("sweep step must be > 0, got {}", s.step));
    } else if (s.stop - s.start) / s.step >= MAX_SWEEP_POINTS as f64 {
        d.push("step", format!("sweep has more than {MAX_SWEEP_POINTS} points"));
    } else {
        match scenario {
            Scenario::CoverageVsJamArea if s.start < p.z1 => d.push(
                "start",
                format!("annulus outer radius z2 must be >= z1 = {}, got {}", p.z1, s.start),
            ),
            Scenario::CoverageVsJamDistance if s.start < 0.0 => {
                d.push("start", format!("annulus inner radius z1 must be >= 0, got {}", s.start))
            }
            Scenario::Roc if !(s.start > 0.0 && s.stop < 1.0) => d.push(
                "start",
                format!("p_fa sweep must stay inside (0, 1), got {} .. {}", s.start, s.stop),
            ),
            _ => {}
        }
    }
    match (scenario, s.width) {
        (Scenario::CoverageVsJamDistance, Some(w)) if !(w > 0.0) || !w.is_finite() => {
            d.push("width", format!("annulus width must be > 0, got {w}"))
        }
        (Scenario::CoverageVsJamDistance, _) => {}
        (_, Some(_)) => d.push("width", "width only applies to coverage_vs_jam_distance"),
        _ => {}
    }

    let a = &file.auth;
    if !scenario.is_coverage() {
        if a.m == 0 {
            d.push("m", "m must be >= 1");
        }
        if a.n == 0 {
            d.push("n", "n must be >= 1");
        }
        if let Some(e) = a.epsilon {
            if !(e >= 0.0) || !e.is_finite() {
                d.push("epsilon", format!("epsilon must be >= 0, got {e}"));
            }
        }
        if let Some(pfa) = a.p_fa {
            if !(pfa > 0.0 && pfa < 1.0) {
                d.push("p_fa", format!("p_fa must lie in (0, 1), got {pfa}"));
            }
        }
        match (scenario, a.p_fa.is_some(), a.epsilon.is_some()) {
            (Scenario::AuthErrorsVsLq, true, true) | (Scenario::AuthErrorsVsLq, false, false) => {
                d.push("auth", "auth needs exactly one of p_fa or epsilon")
            }
            (Scenario::Roc, _, true) | (Scenario::Roc, true, _) => {
                d.push("auth", "roc sweeps p_fa; remove p_fa/epsilon from auth")
            }
            _ => {}
        }
        if !a.lq_db.is_finite() {
            d.push("lq_db", "lq_db must be finite");
        }
        let lo = a.eve_psi_min.unwrap_or(0.0);
        if let (Some(lo), Some(hi)) = (a.eve_psi_min, a.eve_psi_max) {
            if !(lo < hi) {
                d.push("eve_psi_min", format!("Eve prior needs eve_psi_min < eve_psi_max, got {lo} .. {hi}"));
            }
        } else if a.eve_psi_min.is_some() != a.eve_psi_max.is_some() {
            d.push("eve_psi_min", format!("set both eve_psi_min and eve_psi_max or neither (got {lo})"));
        }
    }

    if !d.items.is_empty() {
        return Err(ExperimentError::Config(d.items));
    }

    let params = NetworkParams {
        p_leader_dbm: p.p_leader_dbm,
        p_follower_dbm: p.p_follower_dbm,
        p_jammer_dbm: p.p_jammer_dbm,
        alpha: p.alpha,
        beta_dl_db: p.beta_dl_db,
        beta_ul_db: p.beta_ul_db,
        rho_t: p.rho_t,
        rho_j: p.rho_j,
        jam_annulus: AnnulusRegion::new(p.z1, p.z2).expect("checked above"),
        disk: DiskRegion::new(p.disk_radius).expect("checked above"),
    };
    params
        .validate()
        .map_err(|e| ExperimentError::Config(vec![format!("{source}: {e}")]))?;

    Ok(ExperimentConfig {
        scenario,
        params,
        auth: file.auth,
        sweep: file.sweep,
        n_trials,
        master_seed: overrides.seed.unwrap_or(file.master_seed),
        output_path: overrides.out.clone().unwrap_or(file.output_path),
        output_format: overrides.format.unwrap_or(file.output_format),
    })
}

/// Sweep values `start, start + step, …, ≤ stop`, rounded to 12 decimals so
/// that e.g. `0.01 + 9·0.01` prints as `0.1`.
pub fn sweep_values(sweep: &SweepFile) -> Vec<f64> {
    let n = ((sweep.stop - sweep.start) / sweep.step + 1e-9).floor() as usize + 1;
    (0..n)
        .map(|k| {
            let v = sweep.start + k as f64 * sweep.step;
            let r = (v * 1e12).round() / 1e12;
            if r == 0.0 {
                0.0
            } else {
                r
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoverageRow {
    pub sweep_var: &'static str,
    pub sweep_value: f64,
    pub p_dl_analytic: f64,
    pub p_ul_analytic: f64,
    pub p_joint_analytic: f64,
    pub p_dl_mc: f64,
    pub p_ul_mc: f64,
    pub p_joint_mc: f64,
    pub ci_halfwidth: f64,
    pub abs_gap: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AuthRow {
    pub lq_db: f64,
    pub epsilon: f64,
    pub p_fa_cf: f64,
    pub p_fa_mc: f64,
    pub p_md_cf: f64,
    pub p_md_mc: f64,
    pub p_mc_cf: f64,
    pub p_mc_mc: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RocRow {
    pub p_fa: f64,
    pub epsilon: f64,
    pub p_d_cf: f64,
    pub p_d_mc: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Table {
    Coverage(Vec<CoverageRow>),
    Auth(Vec<AuthRow>),
    Roc(Vec<RocRow>),
}

impl Table {
    pub fn len(&self) -> usize {
        match self {
            Table::Coverage(r) => r.len(),
            Table::Auth(r) => r.len(),
            Table::Roc(r) => r.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn numeric<T>(var: &str, value: f64, r: crate::Result<T>) -> Result<T, ExperimentError> {
    r.map_err(|e| ExperimentError::Numeric(format!("at {var} = {value}: {e}")))
}

// Network parameters of one coverage sweep point. A zero-width annulus
// holds no jammers.
fn coverage_point(cfg: &ExperimentConfig, value: f64) -> crate::Result<NetworkParams> {
    let p = cfg.params;
    let ring = |z1: f64, z2: f64| -> crate::Result<NetworkParams> {
        if z2 == z1 {
            Ok(p.with_rho_j(0.0).with_annulus(AnnulusRegion::new(z1, z1 + 1.0)?))
        } else {
            Ok(p.with_annulus(AnnulusRegion::new(z1, z2)?))
        }
    };
    match cfg.scenario {
        Scenario::CoverageVsBeta => Ok(p.with_beta_db(value)),
        Scenario::CoverageVsJamArea => ring(p.jam_annulus.z1(), value),
        Scenario::CoverageVsJamDistance => ring(value, value + cfg.sweep.width.unwrap_or(50.0)),
        _ => unreachable!("not a coverage scenario"),
    }
}

fn run_coverage(cfg: &ExperimentConfig, values: &[f64]) -> Result<Table, ExperimentError> {
    let var = cfg.scenario.sweep_variable();
    let rows = values
        .par_iter()
        .map(|&v| {
            let params = numeric(var, v, coverage_point(cfg, v))?;
            let cf = numeric(var, v, coverage_joint(&params))?;
            let trial = numeric(var, v, TrialConfig::new(cfg.n_trials, cfg.master_seed, params))?;
            let mc = numeric(var, v, estimate_coverage(&trial))?;
            Ok(CoverageRow {
                sweep_var: var,
                sweep_value: v,
                p_dl_analytic: cf.p_dl,
                p_ul_analytic: cf.p_ul,
                p_joint_analytic: cf.p_joint,
                p_dl_mc: mc.result.p_dl,
                p_ul_mc: mc.result.p_ul,
                p_joint_mc: mc.result.p_joint,
                ci_halfwidth: mc.ci_joint,
                abs_gap: (cf.p_joint - mc.result.p_joint).abs(),
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Table::Coverage(rows))
}

/// Fingerprints of the configured realisation and the Eve prior bounds.
pub fn auth_setup(cfg: &ExperimentConfig) -> crate::Result<(Realization, (f64, f64))> {
    let a = &cfg.auth;
    let real = Realization::sample(a.m, a.n, cfg.params.disk, cfg.params.alpha, a.realization_seed)?;
    let bounds = match (a.eve_psi_min, a.eve_psi_max) {
        (Some(lo), Some(hi)) => (lo, hi),
        _ => default_eve_bounds(&cfg.params.disk, cfg.params.alpha),
    };
    Ok((real, bounds))
}

fn run_auth(cfg: &ExperimentConfig, values: &[f64]) -> Result<Table, ExperimentError> {
    let (real, bounds) = numeric("lq_db", f64::NAN, auth_setup(cfg))?;
    let rows = values
        .par_iter()
        .map(|&lq| {
            let row = || -> crate::Result<AuthRow> {
                let sigma = sigma_from_lq_db(lq);
                let epsilon = match cfg.auth.p_fa {
                    Some(p) => threshold_for_pfa(p, sigma)?,
                    None => cfg.auth.epsilon.expect("validated"),
                };
                let profile = AuthProfile::new(real.followers.clone(), sigma, epsilon, bounds, cfg.auth.n)?;
                let cf = error_probabilities(&profile, &real.eves)?;
                let legit = simulate_auth(&profile, &AuthScenario::Legit, cfg.n_trials, cfg.master_seed)?;
                let eve = simulate_auth(
                    &profile,
                    &AuthScenario::EveFixed(real.eves.clone()),
                    cfg.n_trials,
                    cfg.master_seed,
                )?;
                Ok(AuthRow {
                    lq_db: lq,
                    epsilon,
                    p_fa_cf: cf.p_fa,
                    p_fa_mc: legit.p_fa,
                    p_md_cf: cf.p_md,
                    p_md_mc: eve.p_md,
                    p_mc_cf: cf.p_mc,
                    p_mc_mc: legit.p_mc,
                })
            };
            numeric("lq_db", lq, row())
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Table::Auth(rows))
}

fn run_roc(cfg: &ExperimentConfig, values: &[f64]) -> Result<Table, ExperimentError> {
    let (real, bounds) = numeric("p_fa", f64::NAN, auth_setup(cfg))?;
    let sigma = sigma_from_lq_db(cfg.auth.lq_db);
    let rows = values
        .par_iter()
        .map(|&p_fa| {
            let row = || -> crate::Result<RocRow> {
                let epsilon = threshold_for_pfa(p_fa, sigma)?;
                let profile = AuthProfile::new(real.followers.clone(), sigma, epsilon, bounds, cfg.auth.n)?;
                let md = p_md_expected(&profile)?;
                let eve = simulate_auth(&profile, &AuthScenario::EveUniform, cfg.n_trials, cfg.master_seed)?;
                debug_assert!(p_fa_closed_form(epsilon, sigma).is_ok());
                Ok(RocRow {
                    p_fa,
                    epsilon,
                    p_d_cf: 1.0 - md.value,
                    p_d_mc: 1.0 - eve.p_md,
                })
            };
            numeric("p_fa", p_fa, row())
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Table::Roc(rows))
}

/// Evaluates every sweep point.
pub fn evaluate(cfg: &ExperimentConfig) -> Result<Table, ExperimentError> {
    let values = sweep_values(&cfg.sweep);
    match cfg.scenario {
        Scenario::AuthErrorsVsLq => run_auth(cfg, &values),
        Scenario::Roc => run_roc(cfg, &values),
        _ => run_coverage(cfg, &values),
    }
}

fn csv_bytes<T: Serialize>(rows: &[T]) -> Result<Vec<u8>, ExperimentError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| ExperimentError::Io(e.to_string()))?;
    }
    w.into_inner().map_err(|e| ExperimentError::Io(e.to_string()))
}

fn json_bytes<T: Serialize>(rows: &[T]) -> Result<Vec<u8>, ExperimentError> {
    let mut out = serde_json::to_vec_pretty(rows).map_err(|e| ExperimentError::Io(e.to_string()))?;
    out.push(b'\n');
    Ok(out)
}

/// Serialises a table in the requested format.
pub fn render(table: &Table, format: OutputFormat) -> Result<Vec<u8>, ExperimentError> {
    match (table, format) {
        (Table::Coverage(r), OutputFormat::Csv) => csv_bytes(r),
        (Table::Auth(r), OutputFormat::Csv) => csv_bytes(r),
        (Table::Roc(r), OutputFormat::Csv) => csv_bytes(r),
        (Table::Coverage(r), OutputFormat::Json) => json_bytes(r),
        (Table::Auth(r), OutputFormat::Json) => json_bytes(r),
        (Table::Roc(r), OutputFormat::Json) => json_bytes(r),
    }
}

/// Runs the experiment, writes the table and returns a one-line summary.
pub fn run(cfg: &ExperimentConfig) -> Result<String, ExperimentError> {
    let table = evaluate(cfg)?;
    let bytes = render(&table, cfg.output_format)?;
    if let Some(dir) = cfg.output_path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)
            .map_err(|e| ExperimentError::Io(format!("{}: {e}", dir.display())))?;
    }
    fs::write(&cfg.output_path, bytes)
        .map_err(|e| ExperimentError::Io(format!("{}: {e}", cfg.output_path.display())))?;

    let extra = match &table {
        Table::Coverage(rows) => {
            let gap = rows.iter().map(|r| r.abs_gap).fold(0.0, f64::max);
            format!(", max |analytic - mc| on p_joint = {gap:.4}")
        }
        _ => String::new(),
    };
    Ok(format!(
        "{}: {} rows ({} trials, seed {}) written to {}{extra}",
        cfg.scenario,
        table.len(),
        cfg.n_trials,
        cfg.master_seed,
        cfg.output_path.display()
    ))
}

//! The acceptance criteria as executable checks, and the suite runner that writes their
//! reports and a combined verdict.

use crate::coeffs::{coeff_oracle, cosine_coeff_c, cosine_coeff_ctilde, CoeffKind, CoeffTable};
use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::evolve::track::InitialData;
use crate::evolve::{evolve_and_track, fixed_point_iterate, EvolutionReport, RadialSpectralState, YangFeldmanReport};
use crate::final_data::{scattering_data, sup_weighted_rho, FinalState, GaussianScattering};
use crate::fit::log_space;
use crate::profiles::{ProfileConfig, Profiles};
use crate::residual::lemmas::verify_pointwise_lemmas;
use crate::residual::{profile_closeness_scan, residual_decay_scan, verify_identity_mainest0, DecayReport, ResidualKind};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::path::{Path, PathBuf};
use std::time::Instant;

pub const CRITERIA: [(&str, &str); 12] = [
    ("AC1", "closed-form cosine coefficients match adaptive quadrature; parity zeros hold identically"),
    ("AC2", "|c_n| n^{8/3} stays within a factor 2 of its n = 99 value for odd n in [21, 99]"),
    ("AC3", "discrete (box+1) of phase monomials matches the closed form at fourth order"),
    ("AC4", "pointwise inequalities: exact bounds hold, other ratios finite and refinement-stable"),
    ("AC5", "||u_ap_tilde - u_ap|| / (t^{-5/6} log t) varies by at most a factor 3 on [1e2, 1e4]"),
    ("AC6", "resonant residual decays with exponent <= -1.6; uncorrected residual exponent in [-1.2, -0.85]"),
    ("AC7", "mode residuals decay with exponent <= -1.8 and amplitudes track |c_n| within a factor 4"),
    ("AC8", "full residual (box+1)A - N(A) decays with exponent <= -1.6"),
    ("AC9", "linear evolution approaches the free profile; relative error <= 0.05 at t = 400"),
    ("AC10", "nonlinear tracking: fitted gamma >= 0.7 and corrected error <= 0.5 x uncorrected error"),
    ("AC11", "Yang-Feldman iterates contract: d_{k+1}/d_k <= 0.7 for k = 1..3"),
    ("AC12", "energy drift <= 1e-4, linear reversibility to 1e-10, Parseval metric consistency to 1e-8"),
];

/// One line of the verdict file. Criteria outside the executed suites carry nulls.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub criterion_id: String,
    pub description: String,
    pub measured: Value,
    pub threshold: Value,
    pub passed: Option<bool>,
}

impl Verdict {
    fn skipped(id: &str) -> Self {
        Self {
            criterion_id: id.into(),
            description: description(id).into(),
            measured: Value::Null,
            threshold: Value::Null,
            passed: None,
        }
    }
}

fn description(id: &str) -> &'static str {
    CRITERIA.iter().find(|c| c.0 == id).map(|c| c.1).unwrap_or("")
}

/// A named table written as CSV and as whitespace-separated gnuplot data.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(name: impl Into<String>, header: &[&str]) -> Self {
        Self { name: name.into(), header: header.iter().map(|s| s.to_string()).collect(), rows: vec![] }
    }

    fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.header.join(",") + "\n";
        for row in &self.rows {
            s += &row.join(",");
            s.push('\n');
        }
        s
    }

    pub fn to_gnuplot(&self) -> String {
        let mut s = format!("# {}\n", self.header.join(" "));
        for row in &self.rows {
            s += &row.join(" ");
            s.push('\n');
        }
        s
    }
}

fn num(x: f64) -> String {
    format!("{x:e}")
}

/// Result of one criterion: the verdict, its tables, and a detailed JSON report.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub verdict: Verdict,
    pub tables: Vec<Table>,
    pub details: Value,
    pub runtime_s: f64,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.verdict.passed == Some(true)
    }

    /// The single summary line printed by the acceptance tests and the CLI.
    pub fn line(&self) -> String {
        let v = &self.verdict;
        let tag = match v.passed {
            Some(true) => "PASS",
            Some(false) => "FAIL",
            None => "SKIP",
        };
        format!("{tag} {} {} measured={} threshold={}", v.criterion_id, v.description, v.measured, v.threshold)
    }
}

fn outcome(id: &str, measured: Value, threshold: Value, passed: bool, tables: Vec<Table>, details: Value, start: Instant) -> Outcome {
    Outcome {
        verdict: Verdict {
            criterion_id: id.into(),
            description: description(id).into(),
            measured,
            threshold,
            passed: Some(passed),
        },
        tables,
        details,
        runtime_s: start.elapsed().as_secs_f64(),
    }
}

fn profiles_for(state: &FinalState, cfg: ProfileConfig) -> Result<Profiles<GaussianScattering>> {
    Profiles::new(scattering_data(state), cfg)
}

/// The final state rescaled so that sup ⟨μ⟩^{3/2}ρ equals `target`; zero data stays zero.
pub fn rescaled_to(state: &FinalState, target: f64) -> FinalState {
    let sup = sup_weighted_rho(&scattering_data(state));
    if sup == 0.0 {
        *state
    } else {
        state.scaled(target / sup)
    }
}

pub fn criterion_1() -> Result<Outcome> {
    let start = Instant::now();
    let mut table = Table::new("coeffs_oracle", &["n", "closed_form", "quadrature", "abs_diff"]);
    let mut worst = 0.0f64;
    for n in 0..=49u32 {
        let (kind, closed) = if n % 2 == 1 { (CoeffKind::C, cosine_coeff_c(n)) } else { (CoeffKind::CTilde, cosine_coeff_ctilde(n)) };
        let quad = coeff_oracle(n, kind, 1e-12).map_err(|e| e.within("coeffs"))?;
        let diff = (closed - quad).abs();
        worst = worst.max(diff);
        table.push(vec![n.to_string(), num(closed), num(quad), num(diff)]);
    }
    let parity = (0..=200u32).all(|n| if n % 2 == 0 { cosine_coeff_c(n) == 0.0 } else { cosine_coeff_ctilde(n) == 0.0 });
    let runtime = start.elapsed().as_secs_f64();
    let passed = worst <= 1e-10 && parity && runtime < 10.0;
    Ok(outcome(
        "AC1",
        json!({"max_abs_diff": worst, "parity_zeros": parity, "runtime_s": runtime}),
        json!({"max_abs_diff": 1e-10, "runtime_s": 10.0}),
        passed,
        vec![table],
        Value::Null,
        start,
    ))
}

pub fn criterion_2() -> Result<Outcome> {
    let start = Instant::now();
    let scaled = |n: u32| cosine_coeff_c(n).abs() * (n as f64).powf(8.0 / 3.0);
    let reference = scaled(99);
    let mut table = Table::new("coeffs_decay", &["n", "abs_c_n_times_n_8_3", "ratio_to_n99"]);
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for n in (21..=99).step_by(2) {
        let r = scaled(n) / reference;
        lo = lo.min(r);
        hi = hi.max(r);
        table.push(vec![n.to_string(), num(scaled(n)), num(r)]);
    }
    let runtime = start.elapsed().as_secs_f64();
    let passed = lo >= 0.5 && hi <= 2.0 && runtime < 5.0;
    Ok(outcome(
        "AC2",
        json!({"min_ratio": lo, "max_ratio": hi, "runtime_s": runtime}),
        json!({"band": [0.5, 2.0], "runtime_s": 5.0}),
        passed,
        vec![table],
        Value::Null,
        start,
    ))
}

/// Fifty deterministic (t, r) points with 12 <= t <= 85.5 and the stencil inside the cone.
pub fn identity_points() -> Vec<(f64, f64)> {
    (0..50)
        .map(|i| {
            let t = 12.0 + 1.5 * i as f64;
            let frac = (0.618_033_988_75 * i as f64).fract();
            (t, (0.05 + 0.85 * frac) * (t - 2.0))
        })
        .collect()
}

pub fn criterion_3() -> Result<Outcome> {
    let start = Instant::now();
    let pts = identity_points();
    let mut table = Table::new("identity_convergence", &["n", "m", "dev_h", "dev_h_half", "ratio"]);
    let mut ratios = vec![];
    for &(n, m) in &[(1.0, 1.5), (3.0, 2.5), (1.0, 0.0)] {
        let d1 = verify_identity_mainest0(n, m, &pts, 0.1).map_err(|e| e.within("residual"))?;
        let d2 = verify_identity_mainest0(n, m, &pts, 0.05).map_err(|e| e.within("residual"))?;
        ratios.push(d1 / d2);
        table.push(vec![num(n), num(m), num(d1), num(d2), num(d1 / d2)]);
    }
    let runtime = start.elapsed().as_secs_f64();
    let passed = ratios.iter().all(|r| (12.0..=20.0).contains(r)) && runtime < 30.0;
    Ok(outcome(
        "AC3",
        json!({"ratios": ratios, "points": pts.len(), "runtime_s": runtime}),
        json!({"ratio": [12.0, 20.0], "runtime_s": 30.0}),
        passed,
        vec![table],
        Value::Null,
        start,
    ))
}

pub fn criterion_4(cfg: &RunConfig) -> Result<Outcome> {
    let start = Instant::now();
    let state = cfg.final_state()?;
    let mut tables = vec![];
    let mut measured = serde_json::Map::new();
    let mut details = serde_json::Map::new();
    let mut passed = true;
    for &target in &cfg.lemmas.targets {
        let data = scattering_data(&rescaled_to(&state, target));
        let reports = verify_pointwise_lemmas(&data, cfg.profile.lambda1, &cfg.lemmas.grid).map_err(|e| e.within("lemmas"))?;
        let mut table = Table::new(format!("lemmas_sup_{target}"), &["inequality", "max_ratio", "samples", "refinement_stable", "exact"]);
        for r in &reports {
            passed &= r.passed();
            let exact = r.exact.map(|b| b.to_string()).unwrap_or_else(|| "-".into());
            table.push(vec![r.name.clone(), num(r.max_ratio), r.sample_count.to_string(), r.refinement_stable.to_string(), exact]);
        }
        let key = format!("sup_{target}");
        measured.insert(key.clone(), json!(reports.iter().map(|r| (r.name.clone(), json!(r.max_ratio))).collect::<serde_json::Map<_, _>>()));
        details.insert(key, serde_json::to_value(&reports)?);
        tables.push(table);
    }
    let runtime = start.elapsed().as_secs_f64();
    measured.insert("runtime_s".into(), json!(runtime));
    passed &= runtime < 60.0;
    Ok(outcome(
        "AC4",
        Value::Object(measured),
        json!({"exact_bounds": "ratio <= 1 at every sample", "others": "finite, stable within 10% under 2x refinement", "runtime_s": 60.0}),
        passed,
        tables,
        Value::Object(details),
        start,
    ))
}

pub fn criterion_5(cfg: &RunConfig) -> Result<Outcome> {
    let start = Instant::now();
    let p = profiles_for(&cfg.final_state()?, cfg.profile.clone())?;
    let times = log_space(100.0, 1e4, cfg.residual.points);
    let rep = profile_closeness_scan(&p, &times).map_err(|e| e.within("profiles"))?;
    let mut table = Table::new("profile_closeness", &["t", "norm", "scaled"]);
    for i in 0..times.len() {
        table.push(vec![num(rep.times[i]), num(rep.norms[i]), num(rep.scaled[i])]);
    }
    let runtime = start.elapsed().as_secs_f64();
    let passed = rep.variation <= 3.0 && rep.variation.is_finite() && runtime < 60.0;
    Ok(outcome(
        "AC5",
        json!({"variation": rep.variation, "runtime_s": runtime}),
        json!({"variation": 3.0, "runtime_s": 60.0}),
        passed,
        vec![table],
        serde_json::to_value(&rep)?,
        start,
    ))
}

fn residual_profiles(cfg: &RunConfig) -> Result<Profiles<GaussianScattering>> {
    profiles_for(&cfg.final_state()?.scaled(cfg.residual.data_scale), cfg.profile.clone())
}

fn scan(p: &Profiles<GaussianScattering>, cfg: &RunConfig, kind: ResidualKind) -> Result<DecayReport> {
    let times = log_space(cfg.residual.t_min, cfg.residual.t_max, cfg.residual.points);
    residual_decay_scan(p, kind, &times, cfg.residual.derivatives).map_err(|e| e.within("residual"))
}

/// A label made safe for file names: `vn_vs_Nn(3)` becomes `vn_vs_Nn_3`.
pub fn file_stem(label: &str) -> String {
    label.replace('(', "_").replace(')', "")
}

fn decay_table(rep: &DecayReport) -> Table {
    let mut t = Table::new(format!("residual_{}", file_stem(&rep.kind)), &["t", "norm"]);
    for (a, b) in rep.times.iter().zip(&rep.norms) {
        t.push(vec![num(*a), num(*b)]);
    }
    t
}

/// Passes when the fit is conclusive and its exponent satisfies `ok`, or when the data is zero.
fn decay_ok(rep: &DecayReport, ok: impl Fn(f64) -> bool) -> bool {
    rep.degenerate() || (rep.conclusive() && ok(rep.fitted_exponent))
}

/// The decay requirement for each residual kind: exponent <= -1.6 for the resonant and full
/// residuals, <= -1.8 for single modes, and within [-1.2, -0.85] for the uncorrected residual.
pub fn exponent_acceptable(kind: ResidualKind, exponent: f64) -> bool {
    match kind {
        ResidualKind::UapTildeVsNr | ResidualKind::AFull => exponent <= -1.6,
        ResidualKind::VnVsNn(_) => exponent <= -1.8,
        ResidualKind::UapTildeOnly => (-1.2..=-0.85).contains(&exponent),
    }
}

pub fn criterion_6(cfg: &RunConfig) -> Result<Outcome> {
    let start = Instant::now();
    let p = residual_profiles(cfg)?;
    let resonant = scan(&p, cfg, ResidualKind::UapTildeVsNr)?;
    let uncorrected = scan(&p, cfg, ResidualKind::UapTildeOnly)?;
    let runtime = start.elapsed().as_secs_f64();
    let passed = decay_ok(&resonant, |e| exponent_acceptable(ResidualKind::UapTildeVsNr, e))
        && (uncorrected.degenerate() || exponent_acceptable(ResidualKind::UapTildeOnly, uncorrected.fitted_exponent))
        && runtime < 600.0;
    Ok(outcome(
        "AC6",
        json!({
            "exponent": resonant.fitted_exponent, "r_squared": resonant.r_squared,
            "uncorrected_exponent": uncorrected.fitted_exponent, "uncorrected_r_squared": uncorrected.r_squared,
            "runtime_s": runtime,
        }),
        json!({"exponent": -1.6, "r_squared": 0.98, "uncorrected_exponent": [-1.2, -0.85], "runtime_s": 600.0}),
        passed,
        vec![decay_table(&resonant), decay_table(&uncorrected)],
        json!([resonant, uncorrected]),
        start,
    ))
}

pub fn criterion_7(cfg: &RunConfig) -> Result<Outcome> {
    let start = Instant::now();
    let p = residual_profiles(cfg)?;
    let table = CoeffTable::new(p.config().n_max, p.config().lambda1, p.config().lambda2);
    let mut reports = vec![];
    let mut per_coeff = vec![];
    let mut passed = true;
    for &n in &cfg.residual.modes {
        let rep = scan(&p, cfg, ResidualKind::VnVsNn(n))?;
        passed &= decay_ok(&rep, |e| exponent_acceptable(ResidualKind::VnVsNn(n), e));
        let c = table.nonlinear_coeff(n).abs();
        if !rep.degenerate() {
            per_coeff.push(rep.fitted_amplitude / c);
        }
        reports.push(rep);
    }
    let spread = if per_coeff.is_empty() {
        1.0
    } else {
        per_coeff.iter().cloned().fold(0.0, f64::max) / per_coeff.iter().cloned().fold(f64::INFINITY, f64::min)
    };
    let runtime = start.elapsed().as_secs_f64();
    passed &= spread <= 4.0 && runtime < 600.0;
    let exponents: Vec<f64> = reports.iter().map(|r| r.fitted_exponent).collect();
    Ok(outcome(
        "AC7",
        json!({"modes": cfg.residual.modes, "exponents": exponents, "amplitude_over_coeff_spread": spread, "runtime_s": runtime}),
        json!({"exponent": -1.8, "r_squared": 0.98, "amplitude_over_coeff_spread": 4.0, "runtime_s": 600.0}),
        passed,
        reports.iter().map(decay_table).collect(),
        json!(reports),
        start,
    ))
}

pub fn criterion_8(cfg: &RunConfig) -> Result<Outcome> {
    let start = Instant::now();
    let p = residual_profiles(cfg)?;
    let rep = scan(&p, cfg, ResidualKind::AFull)?;
    let runtime = start.elapsed().as_secs_f64();
    let passed = decay_ok(&rep, |e| exponent_acceptable(ResidualKind::AFull, e)) && runtime < 600.0;
    Ok(outcome(
        "AC8",
        json!({"exponent": rep.fitted_exponent, "r_squared": rep.r_squared, "runtime_s": runtime}),
        json!({"exponent": -1.6, "r_squared": 0.98, "runtime_s": 600.0}),
        passed,
        vec![decay_table(&rep)],
        json!(rep),
        start,
    ))
}

/// A labelled tracking run and its wall time.
#[derive(Debug, Clone)]
pub struct TrackingRun {
    pub label: String,
    pub report: EvolutionReport,
    pub runtime_s: f64,
}

/// Every evolution the evolve criteria look at.
#[derive(Debug, Clone)]
pub struct EvolutionRuns {
    /// λ = 0 from the exact linear data, up to t = 400.
    pub linear: TrackingRun,
    pub nonlinear: Vec<TrackingRun>,
}

pub fn evolution_runs(cfg: &RunConfig) -> Result<EvolutionRuns> {
    let state = cfg.final_state()?;
    let run = |label: &str, lambda1: f64, lambda2: f64, t_end: f64, init: InitialData| -> Result<TrackingRun> {
        let start = Instant::now();
        let p = profiles_for(&state, ProfileConfig { lambda1, lambda2, ..cfg.profile.clone() })?;
        let evo = crate::evolve::EvolutionConfig { t_end, uncorrected_baseline: true, ..cfg.evolve.clone() };
        let report = evolve_and_track(&p, &evo, &init).map_err(|e| e.within("evolve"))?;
        Ok(TrackingRun { label: label.into(), report, runtime_s: start.elapsed().as_secs_f64() })
    };
    let t_lin = 400f64.min(cfg.evolve.t_end);
    let linear = run("linear", 0.0, 0.0, t_lin, InitialData::LinearFinalState { state })?;
    let nonlinear = vec![
        run("lambda1_plus", 1.0, 0.0, cfg.evolve.t_end, InitialData::ProfileA)?,
        run("lambda1_minus", -1.0, 0.0, cfg.evolve.t_end, InitialData::ProfileA)?,
        run("lambda2_on", 1.0, 1.0, cfg.evolve.t_end, InitialData::ProfileA)?,
    ];
    Ok(EvolutionRuns { linear, nonlinear })
}

fn evolution_table(run: &TrackingRun) -> Table {
    let r = &run.report;
    let mut t = Table::new(
        format!("evolve_{}", run.label),
        &["t", "err_l2", "err_h_half", "err_l2_uncorrected", "energy", "err_l2_vs_a", "ref_norm"],
    );
    for i in 0..r.times.len() {
        let unc = r.err_l2_uncorrected.as_ref().map(|u| num(u[i])).unwrap_or_default();
        t.push(vec![num(r.times[i]), num(r.err_l2[i]), num(r.err_h_half[i]), unc, num(r.energy[i]), num(r.err_l2_vs_a[i]), num(r.ref_norm[i])]);
    }
    t
}

fn relative_errors(r: &EvolutionReport) -> Vec<f64> {
    r.err_l2.iter().zip(&r.ref_norm).map(|(e, n)| if *n == 0.0 { 0.0 } else { e / n }).collect()
}

pub fn criterion_9(runs: &EvolutionRuns) -> Outcome {
    let start = Instant::now();
    let r = &runs.linear.report;
    let rel = relative_errors(r);
    let final_rel = *rel.last().unwrap_or(&0.0);
    let t_final = *r.times.last().unwrap_or(&0.0);
    let degenerate = r.ref_norm.iter().all(|&n| n == 0.0);
    let trend = crate::fit::fit_power_law(&r.times, &rel, false).map(|f| f.exponent);
    let increases = rel.windows(2).filter(|w| w[1] > w[0]).count();
    let passed = degenerate
        || (trend.is_some_and(|s| s < 0.0) && final_rel <= 0.05 && (t_final - 400.0).abs() < 1e-9 && runs.linear.runtime_s < 300.0);
    let mut tables = vec![evolution_table(&runs.linear)];
    let mut rt = Table::new("evolve_linear_relative", &["t", "relative_error"]);
    for (t, e) in r.times.iter().zip(&rel) {
        rt.push(vec![num(*t), num(*e)]);
    }
    tables.push(rt);
    outcome(
        "AC9",
        json!({"relative_error_at_t_final": final_rel, "t_final": t_final, "trend_exponent": trend, "checkpoint_increases": increases, "runtime_s": runs.linear.runtime_s}),
        json!({"relative_error": 0.05, "t_final": 400.0, "trend_exponent": "< 0", "runtime_s": 300.0}),
        passed,
        tables,
        json!({"times": r.times, "relative_error": rel}),
        start,
    )
}

pub fn criterion_10(runs: &EvolutionRuns) -> Outcome {
    let start = Instant::now();
    let mut measured = serde_json::Map::new();
    let mut passed = true;
    for run in &runs.nonlinear {
        let r = &run.report;
        let last = *r.err_l2.last().unwrap_or(&0.0);
        let unc = r.err_l2_uncorrected.as_ref().and_then(|u| u.last().copied()).unwrap_or(0.0);
        let degenerate = r.ref_norm.iter().all(|&n| n == 0.0);
        let ratio = if unc == 0.0 { 0.0 } else { last / unc };
        let ok = degenerate || (r.fitted_gamma >= 0.7 && last <= 0.5 * unc && run.runtime_s < 900.0);
        passed &= ok;
        measured.insert(
            run.label.clone(),
            json!({"fitted_gamma": r.fitted_gamma, "gamma_r_squared": r.gamma_r_squared, "final_error_ratio": ratio, "passed": ok, "runtime_s": run.runtime_s}),
        );
    }
    outcome(
        "AC10",
        Value::Object(measured),
        json!({"fitted_gamma": 0.7, "final_error_ratio": 0.5, "runtime_s": 900.0}),
        passed,
        runs.nonlinear.iter().map(evolution_table).collect(),
        json!(runs.nonlinear.iter().map(|r| (r.label.clone(), r.report.clone())).collect::<std::collections::BTreeMap<_, _>>()),
        start,
    )
}

pub fn criterion_11(cfg: &RunConfig) -> Result<Outcome> {
    let start = Instant::now();
    let p = profiles_for(&cfg.final_state()?, cfg.profile.clone())?;
    let rep: YangFeldmanReport = fixed_point_iterate(&p, &cfg.yang_feldman).map_err(|e| e.within("evolve"))?;
    let mut table = Table::new("yang_feldman", &["k", "d_k", "ratio_to_previous"]);
    for (k, d) in rep.d.iter().enumerate() {
        let r = if k == 0 { String::new() } else { num(rep.ratios[k - 1]) };
        table.push(vec![k.to_string(), num(*d), r]);
    }
    let checked: Vec<f64> = rep.ratios.iter().skip(1).take(3).copied().collect();
    let runtime = start.elapsed().as_secs_f64();
    let passed = checked.len() == 3 && checked.iter().all(|&r| r <= 0.7) && runtime < 900.0;
    Ok(outcome(
        "AC11",
        json!({"ratios_k1_to_k3": checked, "first_ratio": rep.ratios.first(), "tail_ratio": rep.tail_ratio, "runtime_s": runtime}),
        json!({"ratio": 0.7, "iterations_needed": 5, "runtime_s": 900.0}),
        passed,
        vec![table],
        json!(rep),
        start,
    ))
}

/// Forward then backward λ = 0 evolution from the linear data; relative change of the modes.
pub fn reversibility_defect(cfg: &RunConfig) -> Result<f64> {
    let state = cfg.final_state()?;
    let e = &cfg.evolve;
    let (u, ut): (Vec<f64>, Vec<f64>) = RadialSpectralState::zero(e.radius, e.modes, 0.0)?
        .grid()
        .iter()
        .map(|&r| state.linear_initial_data(r))
        .unzip();
    let start = RadialSpectralState::from_grid(e.radius, 0.0, &u, &ut)?;
    let mut s = start.clone();
    let steps = 2000;
    for _ in 0..steps {
        s.strang_step(e.dt, 0.0, 0.0)?;
    }
    for _ in 0..steps {
        s.strang_step(-e.dt, 0.0, 0.0)?;
    }
    let norm: f64 = start.v_modes.iter().chain(&start.w_modes).map(|x| x * x).sum::<f64>().sqrt();
    let diff: f64 = s
        .v_modes
        .iter()
        .chain(&s.w_modes)
        .zip(start.v_modes.iter().chain(&start.w_modes))
        .map(|(a, b)| (a - b).powi(2))
        .sum::<f64>()
        .sqrt();
    Ok(if norm == 0.0 { diff } else { diff / norm })
}

pub fn criterion_12(cfg: &RunConfig, runs: &EvolutionRuns) -> Result<Outcome> {
    let start = Instant::now();
    let all: Vec<&TrackingRun> = std::iter::once(&runs.linear).chain(&runs.nonlinear).collect();
    let drift = all.iter().map(|r| r.report.max_energy_drift).fold(0.0, f64::max);
    let mismatch = all.iter().map(|r| r.report.metric_mismatch).fold(0.0, f64::max);
    let reversibility = reversibility_defect(cfg).map_err(|e| e.within("evolve"))?;
    let passed = drift <= 1e-4 && reversibility <= 1e-10 && mismatch <= 1e-8;
    Ok(outcome(
        "AC12",
        json!({"max_energy_drift": drift, "reversibility": reversibility, "metric_mismatch": mismatch}),
        json!({"max_energy_drift": 1e-4, "reversibility": 1e-10, "metric_mismatch": 1e-8}),
        passed,
        vec![],
        json!(all.iter().map(|r| (r.label.clone(), r.report.max_energy_drift)).collect::<std::collections::BTreeMap<_, _>>()),
        start,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Coeffs,
    Lemmas,
    Residual,
    Evolve,
    All,
}

impl Suite {
    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "coeffs" => Self::Coeffs,
            "lemmas" => Self::Lemmas,
            "residual" => Self::Residual,
            "evolve" => Self::Evolve,
            "all" => Self::All,
            _ => return None,
        })
    }

    fn includes(self, other: Suite) -> bool {
        self == Suite::All || self == other
    }
}

#[derive(Debug, Clone)]
pub struct SuiteReport {
    /// All twelve criteria in order; those not executed carry nulls.
    pub verdicts: Vec<Verdict>,
    pub outcomes: Vec<Outcome>,
}

impl SuiteReport {
    /// True when every executed criterion passed.
    pub fn all_passed(&self) -> bool {
        self.outcomes.iter().all(Outcome::passed)
    }
}

/// Runs the requested criteria in dependency order (coeffs, lemmas, residual, evolve).
pub fn run_suite(cfg: &RunConfig, suite: Suite) -> Result<SuiteReport> {
    let mut outcomes = vec![];
    if suite.includes(Suite::Coeffs) {
        outcomes.push(criterion_1()?);
        outcomes.push(criterion_2()?);
    }
    if suite.includes(Suite::Lemmas) {
        outcomes.push(criterion_3()?);
        outcomes.push(criterion_4(cfg)?);
    }
    if suite.includes(Suite::Residual) {
        outcomes.push(criterion_5(cfg)?);
        outcomes.push(criterion_6(cfg)?);
        outcomes.push(criterion_7(cfg)?);
        outcomes.push(criterion_8(cfg)?);
    }
    if suite.includes(Suite::Evolve) {
        let runs = evolution_runs(cfg)?;
        outcomes.push(criterion_9(&runs));
        outcomes.push(criterion_10(&runs));
        outcomes.push(criterion_11(cfg)?);
        outcomes.push(criterion_12(cfg, &runs)?);
    }
    let verdicts = CRITERIA
        .iter()
        .map(|(id, _)| {
            outcomes.iter().find(|o| o.verdict.criterion_id == *id).map(|o| o.verdict.clone()).unwrap_or_else(|| Verdict::skipped(id))
        })
        .collect();
    Ok(SuiteReport { verdicts, outcomes })
}

/// Writes every table and report under `dir`; returns the files written.
pub fn write_reports(report: &SuiteReport, dir: &Path, emit: &crate::config::EmitConfig) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut written = vec![];
    let mut put = |name: String, body: String| -> Result<()> {
        let path = dir.join(name);
        std::fs::write(&path, body)?;
        written.push(path);
        Ok(())
    };
    for o in &report.outcomes {
        for t in &o.tables {
            if emit.csv {
                put(format!("{}.csv", t.name), t.to_csv())?;
            }
            if emit.gnuplot {
                put(format!("{}.dat", t.name), t.to_gnuplot())?;
            }
        }
        if emit.json && !o.details.is_null() {
            put(format!("{}.json", o.verdict.criterion_id), serde_json::to_string_pretty(&o.details)?)?;
        }
    }
    put("verdict.json".into(), serde_json::to_string_pretty(&report.verdicts)?)?;
    Ok(written)
}

/// Error raised when the verdict has failures, for callers that want a `Result`.
pub fn failures(report: &SuiteReport) -> Result<()> {
    let failed: Vec<String> = report.outcomes.iter().filter(|o| !o.passed()).map(|o| o.verdict.criterion_id.clone()).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Error::Config(format!("criteria failed: {}", failed.join(", "))))
    }
}

use super::state::RadialSpectralState;
use crate::error::{Error, Result};
use crate::final_data::{sup_weighted_rho, FinalState, ScatteringData};
use crate::fit::{fit_power_law, log_space};
use crate::profiles::{ProfileKind, Profiles};
use num_dual::Dual2_64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// How the evolution is started at `t_start`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialData {
    /// (u, ∂_t u) = (A, ∂_t A) at t_start.
    ProfileA,
    /// The linear solution of the final state, projected at t = 0 and flowed exactly to t_start.
    LinearFinalState { state: FinalState },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvolutionConfig {
    pub t_start: f64,
    pub t_end: f64,
    pub dt: f64,
    pub radius: f64,
    pub modes: usize,
    pub checkpoints: usize,
    /// Largest admissible sup ⟨μ⟩^{3/2}ρ(μ).
    pub smallness: f64,
    /// Outer zone r > boundary_zone·R whose share of ∫v² dr is monitored.
    pub boundary_zone: f64,
    pub boundary_tol: f64,
    pub uncorrected_baseline: bool,
}

impl Default for EvolutionConfig {
    fn default() -> Self {
        Self {
            t_start: 50.0,
            t_end: 500.0,
            dt: 0.05,
            radius: 600.0,
            modes: 4096,
            checkpoints: 30,
            smallness: 0.1,
            boundary_zone: 0.9,
            boundary_tol: 1e-10,
            uncorrected_baseline: false,
        }
    }
}

impl EvolutionConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |key: &str, msg: String| Err(Error::Config(format!("evolve.{key}: {msg}")));
        if !(self.t_start >= 3.0) {
            return bad("t_start", format!("must be >= 3, got {}", self.t_start));
        }
        if !(self.t_end > self.t_start) {
            return bad("t_end", format!("must exceed t_start, got {}", self.t_end));
        }
        if !(self.dt > 0.0 && self.dt <= 1.0) {
            return bad("dt", format!("must lie in (0, 1], got {}", self.dt));
        }
        if self.modes < 16 {
            return bad("modes", format!("must be >= 16, got {}", self.modes));
        }
        if self.checkpoints < 4 {
            return bad("checkpoints", format!("must be >= 4, got {}", self.checkpoints));
        }
        if !(self.boundary_zone > 0.0 && self.boundary_zone < 1.0) {
            return bad("boundary_zone", format!("must lie in (0, 1), got {}", self.boundary_zone));
        }
        if !(self.radius > 0.0) {
            return bad("radius", format!("must be positive, got {}", self.radius));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvolutionReport {
    pub times: Vec<f64>,
    /// ‖u − u_ap‖_{L²}, mode side.
    pub err_l2: Vec<f64>,
    /// The same norm summed on the grid.
    pub err_l2_grid: Vec<f64>,
    pub err_h_half: Vec<f64>,
    /// ‖u − u_ap‖ with the phase correction switched off.
    pub err_l2_uncorrected: Option<Vec<f64>>,
    pub ref_norm: Vec<f64>,
    /// ‖u − A‖_{L²}: distance to the approximate solution the run was started from.
    pub err_l2_vs_a: Vec<f64>,
    pub energy: Vec<f64>,
    pub boundary_fraction: Vec<f64>,
    /// Exponent γ of err_l2 ~ t^{−γ} over the second half of the time range.
    pub fitted_gamma: f64,
    pub gamma_r_squared: f64,
    pub max_energy_drift: f64,
    /// Largest relative gap between the mode-side and grid-side error norms.
    pub metric_mismatch: f64,
}

/// ∂_t of a profile by forward-mode differentiation of its closed form.
pub fn profile_dt<S: ScatteringData>(p: &Profiles<S>, kind: ProfileKind, t: f64, r: f64) -> f64 {
    p.eval(kind, Dual2_64::from_re(t).derivative(), Dual2_64::from_re(r)).v1
}

fn sample<S: ScatteringData>(p: &Profiles<S>, kind: ProfileKind, t: f64, grid: &[f64]) -> Vec<f64> {
    grid.par_iter().map(|&r| p.eval(kind, t, r)).collect()
}

/// Checks every precondition of a tracking run without doing any work.
pub fn check_preconditions<S: ScatteringData>(p: &Profiles<S>, cfg: &EvolutionConfig) -> Result<()> {
    cfg.validate()?;
    let reach = p.config().cone_cutoff * cfg.t_end;
    if reach > cfg.boundary_zone * cfg.radius {
        return Err(Error::Domain(format!(
            "profile support reaches r = {reach} by t_end, beyond the monitored zone {} of R = {}",
            cfg.boundary_zone, cfg.radius
        )));
    }
    let measured = sup_weighted_rho(p.data());
    if measured > cfg.smallness {
        return Err(Error::Smallness { measured, threshold: cfg.smallness });
    }
    Ok(())
}

/// Builds the state at `t_start`.
pub fn initial_state<S: ScatteringData>(
    p: &Profiles<S>,
    cfg: &EvolutionConfig,
    init: &InitialData,
) -> Result<RadialSpectralState> {
    let mut s = RadialSpectralState::zero(cfg.radius, cfg.modes, cfg.t_start)?;
    match init {
        InitialData::ProfileA => {
            let grid = s.grid().to_vec();
            let u = sample(p, ProfileKind::A, cfg.t_start, &grid);
            let ut: Vec<f64> = grid.par_iter().map(|&r| profile_dt(p, ProfileKind::A, cfg.t_start, r)).collect();
            s = RadialSpectralState::from_grid(cfg.radius, cfg.t_start, &u, &ut)?;
        }
        InitialData::LinearFinalState { state } => {
            let (u, ut): (Vec<f64>, Vec<f64>) = s.grid().iter().map(|&r| state.linear_initial_data(r)).unzip();
            s = RadialSpectralState::from_grid(cfg.radius, 0.0, &u, &ut)?;
            s.linear_flow(cfg.t_start);
            s.t = cfg.t_start;
        }
    }
    Ok(s)
}

/// Step indices at which checkpoints are taken, log-spaced in time.
fn checkpoint_steps(cfg: &EvolutionConfig, steps: usize, dt: f64) -> Vec<usize> {
    let mut idx: Vec<usize> = log_space(cfg.t_start, cfg.t_end, cfg.checkpoints)
        .into_iter()
        .map(|t| (((t - cfg.t_start) / dt).round() as usize).min(steps))
        .collect();
    idx.dedup();
    idx
}

/// Evolves from `t_start` to `t_end` and measures the distance to u_ap along the way.
pub fn evolve_and_track<S: ScatteringData>(
    p: &Profiles<S>,
    cfg: &EvolutionConfig,
    init: &InitialData,
) -> Result<EvolutionReport> {
    check_preconditions(p, cfg)?;
    let (l1, l2) = (p.config().lambda1, p.config().lambda2);
    let mut state = initial_state(p, cfg, init)?;
    let steps = ((cfg.t_end - cfg.t_start) / cfg.dt).ceil() as usize;
    let dt = (cfg.t_end - cfg.t_start) / steps as f64;
    let marks = checkpoint_steps(cfg, steps, dt);
    let grid = state.grid().to_vec();

    let mut rep = EvolutionReport {
        times: vec![],
        err_l2: vec![],
        err_l2_grid: vec![],
        err_h_half: vec![],
        err_l2_uncorrected: cfg.uncorrected_baseline.then(Vec::new),
        ref_norm: vec![],
        err_l2_vs_a: vec![],
        energy: vec![],
        boundary_fraction: vec![],
        fitted_gamma: f64::NAN,
        gamma_r_squared: 0.0,
        max_energy_drift: 0.0,
        metric_mismatch: 0.0,
    };
    let mut done = 0usize;
    for &mark in &marks {
        while done < mark {
            state.strang_step(dt, l1, l2)?;
            done += 1;
        }
        let t = cfg.t_start + done as f64 * dt;
        state.t = t;
        let fraction = state.boundary_fraction(cfg.boundary_zone)?;
        if fraction > cfg.boundary_tol {
            return Err(Error::BoundaryContamination { t, fraction, tolerance: cfg.boundary_tol });
        }
        let reference = state.project(&sample(p, ProfileKind::Uap, t, &grid))?;
        let diff: Vec<f64> = state.v_modes.iter().zip(&reference).map(|(a, b)| a - b).collect();
        let err = state.l2_norm_of(&diff);
        let v_grid = state.transform().inverse(&state.v_modes)?;
        let ref_grid: Vec<f64> = grid.iter().map(|&r| r * p.eval(ProfileKind::Uap, t, r)).collect();
        let grid_diff: Vec<f64> = v_grid.iter().zip(&ref_grid).map(|(a, b)| a - b).collect();
        let err_grid = state.l2_norm_grid(&grid_diff);
        if err > 0.0 {
            rep.metric_mismatch = rep.metric_mismatch.max((err - err_grid).abs() / err);
        }
        rep.times.push(t);
        rep.err_l2.push(err);
        rep.err_l2_grid.push(err_grid);
        rep.err_h_half.push(state.h_half_norm_of(&diff));
        rep.ref_norm.push(state.l2_norm_of(&reference));
        let approx = state.project(&sample(p, ProfileKind::A, t, &grid))?;
        let d: Vec<f64> = state.v_modes.iter().zip(&approx).map(|(a, b)| a - b).collect();
        rep.err_l2_vs_a.push(state.l2_norm_of(&d));
        rep.energy.push(state.energy(l1, l2)?);
        rep.boundary_fraction.push(fraction);
        if let Some(unc) = rep.err_l2_uncorrected.as_mut() {
            let free = state.project(&sample(p, ProfileKind::UapFree, t, &grid))?;
            let d: Vec<f64> = state.v_modes.iter().zip(&free).map(|(a, b)| a - b).collect();
            unc.push(state.l2_norm_of(&d));
        }
    }
    let e0 = rep.energy[0];
    rep.max_energy_drift = if e0 == 0.0 {
        rep.energy.iter().map(|e| e.abs()).fold(0.0, f64::max)
    } else {
        rep.energy.iter().map(|e| ((e - e0) / e0).abs()).fold(0.0, f64::max)
    };
    let mid = 0.5 * (cfg.t_start + cfg.t_end);
    let (ts, es): (Vec<f64>, Vec<f64>) = rep.times.iter().zip(&rep.err_l2).filter(|(t, _)| **t >= mid).map(|(a, b)| (*a, *b)).unzip();
    if let Some(fit) = fit_power_law(&ts, &es, false) {
        rep.fitted_gamma = -fit.exponent;
        rep.gamma_r_squared = fit.r_squared;
    }
    Ok(rep)
}

//! Residuals of the profiles under the Klein-Gordon operator, their decay rates, and
//! pointwise checks of the estimates used to bound them.

pub mod lemmas;

use crate::error::{Error, Result};
use crate::final_data::ScatteringData;
use crate::fit::{fit_power_law, PowerFit};
use crate::profiles::{ProfileKind, Profiles};
use crate::quad::CompositeRule;
use crate::scalar::{Field, Scalar};
use num_dual::{Dual2_64, DualNum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// N(u) = λ₁|u|^{2/3}u + λ₂|u|^{5/3}.
pub fn nonlinearity(u: f64, lambda1: f64, lambda2: f64) -> f64 {
    let a = u.abs().cbrt();
    let a2 = a * a;
    lambda1 * a2 * u + lambda2 * a2 * a2 * a
}

/// (□ + 1)f = f_tt − f_rr − (2/r)f_r + f from exact second derivatives.
pub fn box_plus_one_exact<F: Field>(f: &F, t: f64, r: f64) -> f64 {
    let ft = f.eval(Dual2_64::from_re(t).derivative(), Dual2_64::from_re(r));
    let fr = f.eval(Dual2_64::from_re(t), Dual2_64::from_re(r).derivative());
    let lap = if r == 0.0 { 3.0 * fr.v2 } else { fr.v2 + 2.0 * fr.v1 / r };
    ft.v2 - lap + ft.re
}

/// Fourth-order central-difference approximation of (□ + 1) for a radial sampler.
/// Points with r < 2h_r use the even extension u(t, −r) = u(t, r).
pub fn discrete_box_plus_one<F: Fn(f64, f64) -> f64>(
    sampler: F,
    t: f64,
    r: f64,
    h_t: f64,
    h_r: f64,
) -> Result<f64> {
    if !(h_t > 0.0 && h_r > 0.0) {
        return Err(Error::Stencil(format!("steps must be positive, got {h_t}, {h_r}")));
    }
    if t - 2.0 * h_t < 3.0 {
        return Err(Error::Stencil(format!("t - 2h_t = {} below 3", t - 2.0 * h_t)));
    }
    if r < 0.0 || r + 2.0 * h_r >= t - 2.0 * h_t {
        return Err(Error::Stencil(format!("stencil around (t = {t}, r = {r}) leaves the light cone")));
    }
    let f = |tt: f64, rr: f64| sampler(tt, rr.abs());
    let f0 = f(t, r);
    let ftt = (-f(t + 2.0 * h_t, r) + 16.0 * f(t + h_t, r) - 30.0 * f0 + 16.0 * f(t - h_t, r)
        - f(t - 2.0 * h_t, r))
        / (12.0 * h_t * h_t);
    let (rp1, rp2, rm1, rm2) = (f(t, r + h_r), f(t, r + 2.0 * h_r), f(t, r - h_r), f(t, r - 2.0 * h_r));
    let frr = (-rp2 + 16.0 * rp1 - 30.0 * f0 + 16.0 * rm1 - rm2) / (12.0 * h_r * h_r);
    let lap = if r == 0.0 {
        3.0 * frr
    } else {
        let fr = (-rp2 + 8.0 * rp1 - 8.0 * rm1 + rm2) / (12.0 * h_r);
        frr + 2.0 * fr / r
    };
    Ok(ftt - lap + f0)
}

/// s^{−m} e^{in√(t²−r²)}, real or imaginary part.
#[derive(Debug, Clone, Copy)]
pub struct PhaseMonomial {
    pub n: f64,
    pub m: f64,
    pub imaginary: bool,
}

impl Field for PhaseMonomial {
    fn eval<D: Scalar>(&self, t: D, r: D) -> D {
        let q = ((t - r) * (t + r)).sqrt();
        let (s, c) = (q * self.n).sin_cos();
        t.powf(-self.m) * if self.imaginary { s } else { c }
    }
}

impl PhaseMonomial {
    /// Closed-form (□+1) of the monomial:
    /// [−(n²−1)s^{−m} − in(2m−3)s^{−m−1}⟨μ⟩ + m(m+1)s^{−m−2}] e^{in⟨μ⟩^{−1}s}.
    pub fn box_closed_form(&self, t: f64, r: f64) -> f64 {
        let (n, m) = (self.n, self.m);
        let q = ((t - r) * (t + r)).sqrt();
        let bracket = t / q;
        let real = -(n * n - 1.0) * t.powf(-m) + m * (m + 1.0) * t.powf(-m - 2.0);
        let imag = -n * (2.0 * m - 3.0) * t.powf(-m - 1.0) * bracket;
        let (s, c) = (n * q).sin_cos();
        if self.imaginary {
            real * s + imag * c
        } else {
            real * c - imag * s
        }
    }
}

/// Maximum deviation of the discrete operator from the closed-form identity over `points`,
/// taking real and imaginary parts separately.
pub fn verify_identity_mainest0(n: f64, m: f64, points: &[(f64, f64)], h: f64) -> Result<f64> {
    let mut worst = 0.0f64;
    for &(t, r) in points {
        if t < 10.0 || r >= t {
            return Err(Error::Domain(format!("sample (t = {t}, r = {r}) must have t >= 10 and r < t")));
        }
        for imaginary in [false, true] {
            let f = PhaseMonomial { n, m, imaginary };
            let d = discrete_box_plus_one(|a, b| f.at(a, b), t, r, h, h)?;
            worst = worst.max((d - f.box_closed_form(t, r)).abs());
        }
    }
    Ok(worst)
}

/// Radial light-cone norm √(∫₀^{ct} |f(r)|² 4πr² dr) by composite 8-point Gauss-Legendre panels,
/// doubled until two successive values agree to `rel_tol`.
pub fn lightcone_l2_norm<F: Fn(f64) -> f64 + Sync>(
    sampler: F,
    t: f64,
    cutoff: f64,
    rel_tol: f64,
) -> Result<f64> {
    if t < 3.0 {
        return Err(Error::Domain(format!("light-cone norm needs t >= 3, got {t}")));
    }
    let top = cutoff * t;
    let mut panels = ((t / 16.0).ceil() as usize).max(16);
    let mut prev: Option<f64> = None;
    let mut evals = 0;
    for _ in 0..16 {
        let rule = CompositeRule::new(0.0, top, panels, 8);
        let samples: Vec<f64> = rule
            .nodes()
            .par_iter()
            .map(|&r| {
                let v = sampler(r);
                4.0 * std::f64::consts::PI * r * r * v * v
            })
            .collect();
        evals += samples.len();
        let value = rule.apply(&samples);
        if let Some(p) = prev {
            if (value - p).abs() <= rel_tol * value.abs() || value == 0.0 && p == 0.0 {
                return Ok(value.sqrt());
            }
        }
        prev = Some(value);
        panels *= 2;
    }
    let est = prev.unwrap_or(0.0);
    Err(Error::Quadrature { estimate: est.sqrt(), error: f64::NAN, evals })
}

/// Designated residual fields.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ResidualKind {
    /// (□+1)ũ_ap − N_r
    UapTildeVsNr,
    /// (□+1)v_n − N_n
    VnVsNn(u32),
    /// (□+1)A − N(A)
    AFull,
    /// (□+1)ũ_ap − N(ũ_ap)
    UapTildeOnly,
}

impl ResidualKind {
    pub fn label(&self) -> String {
        match self {
            ResidualKind::UapTildeVsNr => "uap_tilde_vs_Nr".into(),
            ResidualKind::VnVsNn(n) => format!("vn_vs_Nn({n})"),
            ResidualKind::AFull => "A_full".into(),
            ResidualKind::UapTildeOnly => "uap_tilde_only".into(),
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "uap_tilde_vs_Nr" | "uap-tilde-vs-nr" => Some(Self::UapTildeVsNr),
            "A_full" | "a-full" | "A" => Some(Self::AFull),
            "uap_tilde_only" | "uap-tilde-only" => Some(Self::UapTildeOnly),
            _ => {
                let inner = s.strip_prefix("vn_vs_Nn(").or_else(|| s.strip_prefix("vn-vs-nn("))?;
                inner.strip_suffix(')')?.parse().ok().map(Self::VnVsNn)
            }
        }
    }
}

/// How (□+1) is applied to the profiles.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum Derivatives {
    /// Second-order dual numbers: exact up to rounding.
    #[default]
    Exact,
    /// Fourth-order stencil with steps h = theta·t (relative) or h = theta (absolute).
    FiniteDifference { theta_t: f64, theta_r: f64, relative: bool },
}

impl<S: ScatteringData> Profiles<S> {
    /// t^{−5/2}⟨μ⟩^{5/2}ρ^{5/3} Σ a_n cos(n(α+β)) at (t, r); zero outside the cone cutoff.
    pub fn nonlinear_harmonics(&self, terms: &[(f64, f64)], t: f64, r: f64) -> f64 {
        if !(r < self.config().cone_cutoff * t) {
            return 0.0;
        }
        let q = ((t - r) * (t + r)).sqrt();
        let bracket = t / q;
        let m = r / q;
        let (zr, zi) = self.data().z(m);
        let rho2 = zr * zr + zi * zi;
        if rho2 == 0.0 {
            return 0.0;
        }
        let alpha = crate::profiles::alpha_phase(self.data(), t, m, self.config().lambda1);
        let theta = alpha + zi.atan2(zr);
        let amp = (bracket / t).powf(2.5) * rho2.powf(5.0 / 6.0);
        amp * theta.cos_series(terms)
    }

    /// N_r = λ₁c₁t^{−5/2}⟨μ⟩^{5/2}ρ^{5/3}cos(α+β).
    pub fn resonant_part(&self, t: f64, r: f64) -> f64 {
        self.nonlinear_harmonics(&[(1.0, self.coeffs().nonlinear_coeff(1))], t, r)
    }

    /// N_nr: the truncated non-resonant harmonics of N(ũ_ap).
    pub fn nonresonant_part(&self, t: f64, r: f64) -> f64 {
        self.nonlinear_harmonics(&self.coeffs().nonresonant_terms(), t, r)
    }

    /// N_n, the n-th harmonic of N(ũ_ap).
    pub fn mode_part(&self, n: u32, t: f64, r: f64) -> f64 {
        if n > self.coeffs().n_max {
            return 0.0;
        }
        self.nonlinear_harmonics(&[(n as f64, self.coeffs().nonlinear_coeff(n))], t, r)
    }

    fn box_of(&self, kind: ProfileKind, t: f64, r: f64, deriv: Derivatives) -> Result<f64> {
        match deriv {
            Derivatives::Exact => Ok(box_plus_one_exact(&self.field(kind), t, r)),
            Derivatives::FiniteDifference { theta_t, theta_r, relative } => {
                let (ht, hr) = if relative { (theta_t * t, theta_r * t) } else { (theta_t, theta_r) };
                discrete_box_plus_one(|a, b| self.eval(kind, a, b), t, r, ht, hr)
            }
        }
    }

    /// Pointwise value of a designated residual.
    pub fn residual(&self, kind: ResidualKind, t: f64, r: f64, deriv: Derivatives) -> Result<f64> {
        let c = self.config();
        let n = |u: f64| nonlinearity(u, c.lambda1, c.lambda2);
        Ok(match kind {
            ResidualKind::UapTildeVsNr => {
                self.box_of(ProfileKind::UapTilde, t, r, deriv)? - self.resonant_part(t, r)
            }
            ResidualKind::VnVsNn(k) => {
                self.box_of(ProfileKind::VMode(k), t, r, deriv)? - self.mode_part(k, t, r)
            }
            ResidualKind::AFull => self.box_of(ProfileKind::A, t, r, deriv)? - n(self.eval_a(t, r)),
            ResidualKind::UapTildeOnly => {
                self.box_of(ProfileKind::UapTilde, t, r, deriv)? - n(self.eval_u_ap_tilde(t, r))
            }
        })
    }

    /// ‖residual(t)‖_{L²(|x| < ct)}.
    pub fn residual_norm(&self, kind: ResidualKind, t: f64, deriv: Derivatives, rel_tol: f64) -> Result<f64> {
        let cutoff = self.config().cone_cutoff;
        // Finite-difference stencils must stay inside the cone; trim the outer edge accordingly.
        let top = match deriv {
            Derivatives::Exact => cutoff,
            Derivatives::FiniteDifference { theta_t, theta_r, relative } => {
                let (ht, hr) = if relative { (theta_t * t, theta_r * t) } else { (theta_t, theta_r) };
                cutoff.min((t - 2.0 * ht - 2.0 * hr) / t * 0.999)
            }
        };
        let err = std::sync::Mutex::new(None);
        let v = lightcone_l2_norm(
            |r| match self.residual(kind, t, r, deriv) {
                Ok(v) => v,
                Err(e) => {
                    err.lock().unwrap().get_or_insert(e);
                    0.0
                }
            },
            t,
            top,
            rel_tol,
        )?;
        match err.into_inner().unwrap() {
            Some(e) => Err(e),
            None => Ok(v),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayReport {
    pub kind: String,
    pub times: Vec<f64>,
    pub norms: Vec<f64>,
    pub fitted_exponent: f64,
    pub fitted_amplitude: f64,
    /// Whether the log-corrected fit has the higher r² (the reported fit is always the plain one).
    pub with_log_factor: bool,
    pub r_squared: f64,
    pub plain: Option<PowerFit>,
    pub log_corrected: Option<PowerFit>,
}

impl DecayReport {
    pub fn conclusive(&self) -> bool {
        self.r_squared >= 0.98
    }

    /// True when every norm vanished (zero data), in which case no rate is defined.
    pub fn degenerate(&self) -> bool {
        self.norms.iter().all(|&n| n == 0.0)
    }
}

/// Residual norms over `times` with plain and log-corrected power-law fits.
pub fn residual_decay_scan<S: ScatteringData + Sync>(
    profiles: &Profiles<S>,
    kind: ResidualKind,
    times: &[f64],
    deriv: Derivatives,
) -> Result<DecayReport> {
    if times.windows(2).any(|w| w[1] <= w[0]) || times.iter().any(|&t| t < 3.0) {
        return Err(Error::Domain("scan times must be increasing and >= 3".into()));
    }
    let norms = times
        .par_iter()
        .map(|&t| profiles.residual_norm(kind, t, deriv, 1e-9))
        .collect::<Result<Vec<f64>>>()?;
    let plain = fit_power_law(times, &norms, false);
    let log_corrected = fit_power_law(times, &norms, true);
    let with_log_factor = match (plain, log_corrected) {
        (Some(p), Some(l)) => l.r_squared > p.r_squared,
        _ => false,
    };
    let (fitted_exponent, fitted_amplitude, r_squared) = match plain {
        Some(p) => (p.exponent, p.amplitude, p.r_squared),
        None => (f64::NAN, 0.0, 0.0),
    };
    Ok(DecayReport {
        kind: kind.label(),
        times: times.to_vec(),
        norms,
        fitted_exponent,
        fitted_amplitude,
        with_log_factor,
        r_squared,
        plain,
        log_corrected,
    })
}

/// ‖ũ_ap(t) − u_ap(t)‖_{L²(|x| < ct)} against the rate t^{−5/6} log t.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClosenessReport {
    pub times: Vec<f64>,
    pub norms: Vec<f64>,
    /// norm / (t^{−5/6} log t)
    pub scaled: Vec<f64>,
    /// max(scaled) / min(scaled); 1 when every norm vanishes.
    pub variation: f64,
}

pub fn profile_closeness_scan<S: ScatteringData + Sync>(profiles: &Profiles<S>, times: &[f64]) -> Result<ClosenessReport> {
    let cutoff = profiles.config().cone_cutoff;
    let norms = times
        .par_iter()
        .map(|&t| {
            lightcone_l2_norm(|r| profiles.eval_u_ap_tilde(t, r) - profiles.eval_u_ap(t, r), t, cutoff, 1e-9)
        })
        .collect::<Result<Vec<f64>>>()?;
    let scaled: Vec<f64> = times.iter().zip(&norms).map(|(t, n)| n / (t.powf(-5.0 / 6.0) * t.ln())).collect();
    let hi = scaled.iter().cloned().fold(0.0, f64::max);
    let lo = scaled.iter().cloned().fold(f64::INFINITY, f64::min);
    let variation = if hi == 0.0 { 1.0 } else { hi / lo };
    Ok(ClosenessReport { times: times.to_vec(), norms, scaled, variation })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::final_data::{scattering_data, FinalState};
    use crate::profiles::ProfileConfig;
    use std::f64::consts::PI;

    #[test]
    fn nonlinearity_examples() {
        assert_eq!(nonlinearity(0.0, 1.0, 1.0), 0.0);
        assert_eq!(nonlinearity(-1.0, 1.0, 0.0), -1.0);
        assert!((nonlinearity(8.0, 1.0, 0.0) - 32.0).abs() < 1e-12);
        assert!((nonlinearity(-8.0, 0.0, 1.0) - 32.0).abs() < 1e-12);
    }

    #[test]
    fn discrete_box_examples() {
        assert_eq!(discrete_box_plus_one(|_, _| 0.0, 20.0, 3.0, 0.1, 0.1).unwrap(), 0.0);
        let v = discrete_box_plus_one(|t, _| (-t).exp(), 10.0, 0.0, 0.05, 0.05).unwrap();
        assert!((v - 2.0 * (-10f64).exp()).abs() < 1e-6 * (-10f64).exp());
        assert!(discrete_box_plus_one(|_, _| 0.0, 4.0, 0.0, 0.6, 0.1).is_err());
        assert!(discrete_box_plus_one(|_, _| 0.0, 20.0, 19.7, 0.1, 0.1).is_err());
        let f = PhaseMonomial { n: 1.0, m: 1.5, imaginary: false };
        let d = discrete_box_plus_one(|a, b| f.at(a, b), 50.0, 10.0, 0.05, 0.05).unwrap();
        let exact = f.box_closed_form(50.0, 10.0);
        assert!((d - exact).abs() < 1e-9, "{d} vs {exact}");
    }

    #[test]
    fn axis_handling_matches_exact_laplacian() {
        // Stencil (with even reflection), jets and closed form near and on the axis.
        let f = PhaseMonomial { n: 2.0, m: 0.5, imaginary: true };
        for &r in &[0.0, 0.03, 0.5] {
            let d = discrete_box_plus_one(|a, b| f.at(a, b), 30.0, r, 0.02, 0.02).unwrap();
            let e = box_plus_one_exact(&f, 30.0, r);
            assert!((d - e).abs() < 1e-7, "r = {r}: {d} vs {e}");
            assert!((e - f.box_closed_form(30.0, r)).abs() < 1e-13);
        }
    }

    #[test]
    fn mainest0_term_dropout_and_convergence() {
        let pts: Vec<(f64, f64)> = (0..10).map(|i| (12.0 + 4.0 * i as f64, 0.3 * (i as f64) * 3.0)).collect();
        for &(n, m) in &[(1.0, 0.0), (1.0, 1.5), (3.0, 2.5)] {
            let d1 = verify_identity_mainest0(n, m, &pts, 0.1).unwrap();
            let d2 = verify_identity_mainest0(n, m, &pts, 0.05).unwrap();
            assert!((12.0..=20.0).contains(&(d1 / d2)), "n={n} m={m}: {}", d1 / d2);
        }
        let f = PhaseMonomial { n: 1.0, m: 1.5, imaginary: false };
        let (t, r) = (40.0, 7.0);
        let q = (t * t - r * r).sqrt();
        assert!((f.box_closed_form(t, r) - 1.5 * 2.5 * t.powf(-3.5) * q.cos()).abs() < 1e-18);
    }

    #[test]
    fn lightcone_norm_examples() {
        assert_eq!(lightcone_l2_norm(|_| 0.0, 10.0, 0.995, 1e-9).unwrap(), 0.0);
        let c = 0.995;
        let v = lightcone_l2_norm(|_| 1.0, 10.0, c, 1e-9).unwrap();
        assert!((v - (4.0 * PI * (c * 10.0f64).powi(3) / 3.0).sqrt()).abs() < 1e-12 * v);
        let v = lightcone_l2_norm(|r| (-r * r / 2.0).exp(), 40.0, c, 1e-9).unwrap();
        let exact = (PI.powf(1.5)).sqrt();
        assert!((v - exact).abs() < 1e-9 * exact);
    }

    #[test]
    fn hyperbolic_change_of_variables() {
        // f = ⟨μ⟩^{5/2}e^{−|μ|²}: ‖f‖_{L²(|x|<t)} = t^{3/2}‖e^{−|μ|²}‖_{L²_μ}
        let g_norm = (4.0 * PI * PI.sqrt() / (4.0 * 2f64.powf(1.5))).sqrt();
        for t in [10.0, 100.0, 1000.0] {
            let f = |r: f64| {
                let q = ((t - r) * (t + r)).sqrt();
                let m = r / q;
                (1.0 + m * m).powf(1.25) * (-m * m).exp()
            };
            let v = lightcone_l2_norm(f, t, 0.995, 1e-11).unwrap();
            let exact = t.powf(1.5) * g_norm;
            assert!((v - exact).abs() <= 1e-8 * exact, "{t}: {v} {exact}");
        }
    }

    #[test]
    fn amplitude_bound_at_late_time() {
        let p = default_profiles(1.0, 41);
        let t: f64 = 1e4;
        let sup = (0..200_000)
            .map(|i| p.eval_a(t, i as f64 * 0.05).abs())
            .fold(0.0, f64::max);
        let eta = crate::final_data::sup_weighted_rho(p.data());
        assert!((t.powf(1.5) * sup / eta - 1.0).abs() < 0.05);
    }

    #[test]
    fn profile_closeness_rate() {
        let p = default_profiles(1.0, 41);
        let rep = profile_closeness_scan(&p, &crate::fit::log_space(100.0, 1e4, 12)).unwrap();
        assert!(rep.variation <= 3.0, "{rep:?}");
        let free = default_profiles(0.0, 41);
        let rep = profile_closeness_scan(&free, &[100.0, 1000.0]).unwrap();
        assert_eq!(rep.norms, vec![0.0, 0.0]);
        assert_eq!(rep.variation, 1.0);
    }

    fn default_profiles(lambda1: f64, n_max: u32) -> Profiles<crate::final_data::GaussianScattering> {
        let sd = scattering_data(&FinalState::new(0.1, 2.0, 0.0, 1.0).unwrap());
        Profiles::new(sd, ProfileConfig { lambda1, n_max, ..Default::default() }).unwrap()
    }

    #[test]
    fn resonant_split_examples() {
        let lin = default_profiles(0.0, 41);
        assert_eq!(lin.resonant_part(50.0, 3.0), 0.0);
        assert_eq!(lin.nonresonant_part(50.0, 3.0), 0.0);
        let p = default_profiles(1.0, 201);
        let tail = crate::coeffs::series_tail_bound_c(201);
        let mut s = 7u64;
        let mut next = || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (s >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..1000 {
            let t = 3.0 + 500.0 * next();
            let r = 0.99 * t * next();
            let total = p.resonant_part(t, r) + p.nonresonant_part(t, r);
            let direct = nonlinearity(p.eval_u_ap_tilde(t, r), 1.0, 0.0);
            let h = crate::profiles::to_hyperbolic(t, r).unwrap();
            let scale = (h.bracket_mu / t).powf(2.5) * p.data().rho(h.mu_norm).powf(5.0 / 3.0);
            assert!((total - direct).abs() <= tail * scale + 1e-300, "{total} vs {direct}");
        }
    }

    #[test]
    fn exact_and_fd_residuals_agree_at_moderate_times() {
        let p = default_profiles(1.0, 41);
        let fd = Derivatives::FiniteDifference { theta_t: 0.02, theta_r: 0.02, relative: false };
        for kind in [ResidualKind::UapTildeVsNr, ResidualKind::AFull, ResidualKind::VnVsNn(3)] {
            let a = p.residual_norm(kind, 100.0, Derivatives::Exact, 1e-9).unwrap();
            let b = p.residual_norm(kind, 100.0, fd, 1e-9).unwrap();
            assert!((a - b).abs() < 1e-3 * a, "{kind:?}: {a} vs {b}");
        }
    }

    #[test]
    fn splitting_consistency() {
        let p = default_profiles(1.0, 41);
        let tail = crate::coeffs::series_tail_bound_c(41);
        for t in [100.0, 1000.0] {
            let split = lightcone_l2_norm(
                |r| {
                    nonlinearity(p.eval_u_ap_tilde(t, r), 1.0, 0.0)
                        - p.resonant_part(t, r)
                        - p.nonresonant_part(t, r)
                },
                t,
                0.995,
                1e-9,
            )
            .unwrap();
            let h = lightcone_l2_norm(
                |r| {
                    let h = crate::profiles::to_hyperbolic(t, r).unwrap();
                    (h.bracket_mu / t).powf(2.5) * p.data().rho(h.mu_norm).powf(5.0 / 3.0)
                },
                t,
                0.995,
                1e-9,
            )
            .unwrap();
            assert!(split <= tail * h, "{split} vs {}", tail * h);
        }
    }

    #[test]
    fn residual_kind_labels_round_trip() {
        for k in [ResidualKind::UapTildeVsNr, ResidualKind::VnVsNn(7), ResidualKind::AFull, ResidualKind::UapTildeOnly] {
            assert_eq!(ResidualKind::parse(&k.label()), Some(k));
        }
    }
}

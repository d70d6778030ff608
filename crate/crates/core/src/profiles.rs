//! Hyperbolic coordinates and the asymptotic profiles u_ap, ũ_ap, v_n, ṽ_ap and A = ũ_ap + ṽ_ap.

use crate::coeffs::CoeffTable;
use crate::error::{Error, Result};
use crate::final_data::ScatteringData;
use crate::scalar::{Field, Scalar};
use serde::{Deserialize, Serialize};

/// (s, |μ|, ⟨μ⟩) with s = t and μ = x/√(t²−|x|²).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HyperbolicPoint {
    pub s: f64,
    pub mu_norm: f64,
    pub bracket_mu: f64,
}

impl HyperbolicPoint {
    /// Radius r = t|μ|/⟨μ⟩.
    pub fn radius(&self) -> f64 {
        self.s * self.mu_norm / self.bracket_mu
    }
}

pub fn to_hyperbolic(t: f64, r: f64) -> Result<HyperbolicPoint> {
    if !(r >= 0.0 && r < t) {
        return Err(Error::OutsideLightCone { t, r });
    }
    let q = ((t - r) * (t + r)).sqrt();
    Ok(HyperbolicPoint { s: t, mu_norm: r / q, bracket_mu: t / q })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProfileConfig {
    pub lambda1: f64,
    pub lambda2: f64,
    pub n_max: u32,
    pub cone_cutoff: f64,
    pub fd_step: f64,
    pub fd_step_r: f64,
    pub tail_tol: f64,
}

impl Default for ProfileConfig {
    fn default() -> Self {
        Self {
            lambda1: 1.0,
            lambda2: 0.0,
            n_max: 41,
            cone_cutoff: 0.995,
            fd_step: 1e-3,
            fd_step_r: 1e-3,
            tail_tol: 1e-6,
        }
    }
}

impl ProfileConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |key: &str, msg: String| Err(Error::Config(format!("profile.{key}: {msg}")));
        if self.n_max < 3 || self.n_max % 2 == 0 {
            return bad("n_max", format!("must be odd and >= 3, got {}", self.n_max));
        }
        if !(self.cone_cutoff > 0.0 && self.cone_cutoff < 1.0) {
            return bad("cone_cutoff", format!("must lie in (0, 1), got {}", self.cone_cutoff));
        }
        if !(self.fd_step > 0.0 && self.fd_step < 0.1) {
            return bad("fd_step", format!("must lie in (0, 0.1), got {}", self.fd_step));
        }
        if !(self.fd_step_r > 0.0 && self.fd_step_r < 0.1) {
            return bad("fd_step_r", format!("must lie in (0, 0.1), got {}", self.fd_step_r));
        }
        if !self.lambda1.is_finite() || !self.lambda2.is_finite() {
            return bad("lambda1", "nonlinearity coefficients must be finite".into());
        }
        if !(self.tail_tol > 0.0) {
            return bad("tail_tol", format!("must be positive, got {}", self.tail_tol));
        }
        let tail = CoeffTable::new(self.n_max, self.lambda1, self.lambda2).series_tail_bound();
        if tail > self.tail_tol {
            return bad("n_max", format!("series tail bound {tail:e} exceeds tail_tol {:e}", self.tail_tol));
        }
        Ok(())
    }
}

/// λ₁c₁/2 = λ₁Γ(11/6)/(√πΓ(7/3)), the coefficient in Ψ = −(λ₁c₁/2)ρ^{2/3}.
pub fn phase_coefficient(lambda1: f64) -> f64 {
    0.5 * lambda1 * crate::coeffs::cosine_coeff_c(1)
}

/// ρ̃ = √(ρ² + s^{−1}⟨μ⟩^{−3}).
pub fn rho_tilde<S: ScatteringData>(sd: &S, s: f64, mu_norm: f64) -> f64 {
    let rho = sd.rho(mu_norm);
    let b2 = 1.0 + mu_norm * mu_norm;
    (rho * rho + 1.0 / (s * b2 * b2.sqrt())).sqrt()
}

/// Ψ(μ) = −(λ₁c₁/2)ρ(μ)^{2/3}.
pub fn phase_psi<S: ScatteringData>(sd: &S, mu_norm: f64, lambda1: f64) -> f64 {
    -phase_coefficient(lambda1) * sd.rho(mu_norm).powf(2.0 / 3.0)
}

/// Ψ̃(s, μ) = −(λ₁c₁/2)ρ̃(s, μ)^{2/3}.
pub fn phase_psi_tilde<S: ScatteringData>(sd: &S, s: f64, mu_norm: f64, lambda1: f64) -> f64 {
    -phase_coefficient(lambda1) * rho_tilde(sd, s, mu_norm).powf(2.0 / 3.0)
}

/// α(t, μ) = ⟨μ⟩^{−1}t + Ψ̃(t, μ) log t.
pub fn alpha_phase<S: ScatteringData>(sd: &S, t: f64, mu_norm: f64, lambda1: f64) -> f64 {
    t / (1.0 + mu_norm * mu_norm).sqrt() + phase_psi_tilde(sd, t, mu_norm, lambda1) * t.ln()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProfileKind {
    /// u_ap with the phase Ψ log t.
    Uap,
    /// u_ap with Ψ ≡ 0.
    UapFree,
    UapTilde,
    /// A single correction mode v_n.
    VMode(u32),
    VapTilde,
    A,
}

/// Quantities shared by every profile at one point (t, r).
struct Local<D> {
    t: D,
    bracket: D,
    q: D,
    zr: D,
    zi: D,
    rho2: D,
}

/// Profile evaluator bound to scattering data and a nonlinearity.
#[derive(Debug, Clone)]
pub struct Profiles<S> {
    sd: S,
    cfg: ProfileConfig,
    coeffs: CoeffTable,
    correction: Vec<(f64, f64)>,
    phase_k: f64,
}

impl<S: ScatteringData> Profiles<S> {
    pub fn new(sd: S, cfg: ProfileConfig) -> Result<Self> {
        cfg.validate()?;
        let coeffs = CoeffTable::new(cfg.n_max, cfg.lambda1, cfg.lambda2);
        let correction = coeffs.correction_terms();
        let phase_k = phase_coefficient(cfg.lambda1);
        Ok(Self { sd, cfg, coeffs, correction, phase_k })
    }

    pub fn data(&self) -> &S {
        &self.sd
    }

    pub fn config(&self) -> &ProfileConfig {
        &self.cfg
    }

    pub fn coeffs(&self) -> &CoeffTable {
        &self.coeffs
    }

    fn local<D: Scalar>(&self, t: D, r: D) -> Option<Local<D>> {
        let (tv, rv) = (t.value(), r.value());
        if !(rv < self.cfg.cone_cutoff * tv) {
            return None;
        }
        let q = ((t - r) * (t + r)).sqrt();
        let bracket = t / q;
        let (zr, zi) = self.sd.z(r / q);
        let rho2 = zr * zr + zi * zi;
        if rho2.value() == 0.0 {
            return None;
        }
        Some(Local { t, bracket, q, zr, zi, rho2 })
    }

    fn tilde_rho2<D: Scalar>(l: &Local<D>) -> D {
        l.rho2 + (l.t * l.bracket.powi(3)).recip()
    }

    /// t^{−3/2}⟨μ⟩^{3/2} Re(ρe^{iβ}e^{iφ}).
    fn leading<D: Scalar>(l: &Local<D>, phase: D) -> D {
        let (s, c) = phase.sin_cos();
        (l.bracket / l.t).powf(1.5) * (l.zr * c - l.zi * s)
    }

    /// α(t, μ) at a local point.
    fn alpha<D: Scalar>(&self, l: &Local<D>) -> D {
        let psi_tilde = -Self::tilde_rho2(l).cbrt() * self.phase_k;
        l.q + psi_tilde * l.t.ln()
    }

    /// t^{−5/2}⟨μ⟩^{5/2}ρ̃^{2/3}ρ Σ a_n cos(n(α + β)).
    fn series<D: Scalar>(&self, l: &Local<D>, terms: &[(f64, f64)]) -> D {
        if terms.is_empty() {
            return D::zero();
        }
        let theta = self.alpha(l) + l.zi.atan2(l.zr);
        let amp = (l.bracket / l.t).powf(2.5) * Self::tilde_rho2(l).cbrt() * l.rho2.sqrt();
        amp * theta.cos_series(terms)
    }

    fn mode_coefficient(&self, n: u32) -> f64 {
        let nf = n as f64;
        -self.coeffs.nonlinear_coeff(n) / (nf * nf - 1.0)
    }

    /// Generic evaluation of any profile kind.
    pub fn eval<D: Scalar>(&self, kind: ProfileKind, t: D, r: D) -> D {
        let Some(l) = self.local(t, r) else {
            return D::zero();
        };
        match kind {
            ProfileKind::Uap => {
                let psi = -l.rho2.cbrt() * self.phase_k;
                Self::leading(&l, l.q + psi * l.t.ln())
            }
            ProfileKind::UapFree => Self::leading(&l, l.q),
            ProfileKind::UapTilde => Self::leading(&l, self.alpha(&l)),
            ProfileKind::VMode(n) => {
                if n == 1 || n > self.cfg.n_max {
                    return D::zero();
                }
                self.series(&l, &[(n as f64, self.mode_coefficient(n))])
            }
            ProfileKind::VapTilde => self.series(&l, &self.correction),
            ProfileKind::A => Self::leading(&l, self.alpha(&l)) + self.series(&l, &self.correction),
        }
    }

    pub fn eval_u_ap(&self, t: f64, r: f64) -> f64 {
        self.eval(ProfileKind::Uap, t, r)
    }

    pub fn eval_u_ap_free(&self, t: f64, r: f64) -> f64 {
        self.eval(ProfileKind::UapFree, t, r)
    }

    pub fn eval_u_ap_tilde(&self, t: f64, r: f64) -> f64 {
        self.eval(ProfileKind::UapTilde, t, r)
    }

    /// Correction mode v_n for odd n ≥ 3.
    pub fn eval_v_n(&self, n: u32, t: f64, r: f64) -> Result<f64> {
        if n < 3 || n % 2 == 0 {
            return Err(Error::Domain(format!("v_n requires odd n >= 3, got {n}")));
        }
        Ok(self.eval(ProfileKind::VMode(n), t, r))
    }

    pub fn eval_v_ap_tilde(&self, t: f64, r: f64) -> f64 {
        self.eval(ProfileKind::VapTilde, t, r)
    }

    pub fn eval_a(&self, t: f64, r: f64) -> f64 {
        self.eval(ProfileKind::A, t, r)
    }

    /// ∂_t A by the fourth-order central difference with relative step `fd_step`, checked
    /// for fourth-order behaviour against the half and quarter steps and Richardson-extrapolated.
    pub fn eval_a_dt(&self, t: f64, r: f64) -> Result<f64> {
        let h = self.cfg.fd_step * t;
        if t - 2.0 * h < 3.0 {
            return Err(Error::Stencil(format!("t - 2h = {} < 3", t - 2.0 * h)));
        }
        let f = |tt: f64| self.eval_a(tt, r);
        let mut fmax = 0.0f64;
        let mut d = |h: f64| {
            let v = [f(t + 2.0 * h), f(t + h), f(t - h), f(t - 2.0 * h)];
            fmax = v.iter().fold(fmax, |m, x| m.max(x.abs()));
            (-v[0] + 8.0 * v[1] - 8.0 * v[2] + v[3]) / (12.0 * h)
        };
        let (d1, d2, d4) = (d(h), d(0.5 * h), d(0.25 * h));
        let (e1, e2) = ((d1 - d2).abs(), (d2 - d4).abs());
        let noise = 64.0 * f64::EPSILON * fmax / (0.25 * h);
        if e2 > 10.0 * e1 / 16.0 + noise {
            return Err(Error::Derivative {
                what: format!("d/dt A at (t = {t}, r = {r})"),
                analytic: d2,
                numeric: d4,
            });
        }
        Ok(d2 + (d2 - d1) / 15.0)
    }

    /// Upper bound on |A| just inside the cone cutoff, over all t ≥ 3.
    pub fn cutoff_amplitude(&self) -> f64 {
        let c = self.cfg.cone_cutoff;
        let mu_c = c / (1.0 - c * c).sqrt();
        let series_sum: f64 = self.correction.iter().map(|(_, a)| a.abs()).sum();
        (0..=400)
            .map(|i| {
                let m = mu_c + 0.25 * i as f64;
                let b2 = 1.0 + m * m;
                let rho = self.sd.rho(m);
                let lead = b2.powf(0.75) * rho;
                let corr = series_sum * b2.powf(1.25) * (rho * rho + 1.0 / 3.0).cbrt() * rho / 3.0;
                (lead + corr) / 3f64.powf(1.5)
            })
            .fold(0.0, f64::max)
    }

    pub fn field(&self, kind: ProfileKind) -> ProfileField<'_, S> {
        ProfileField { profiles: self, kind }
    }
}

/// One profile kind viewed as a [`Field`].
pub struct ProfileField<'a, S> {
    pub profiles: &'a Profiles<S>,
    pub kind: ProfileKind,
}

impl<S: ScatteringData> Field for ProfileField<'_, S> {
    fn eval<D: Scalar>(&self, t: D, r: D) -> D {
        self.profiles.eval(self.kind, t, r)
    }
}

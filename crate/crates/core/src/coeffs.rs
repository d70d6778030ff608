//! Fourier-cosine coefficients of |cos θ|^{2/3} cos θ and |cos θ|^{5/3}.
//!
//! With the convention f(θ) = a_0/2 + Σ_{n≥1} a_n cos nθ, where
//! a_n = (1/π)∫_{−π}^{π} f(θ) cos nθ dθ.

use crate::error::{Error, Result};
use crate::quad::{integrate, QuadOptions};
use std::f64::consts::{FRAC_PI_2, PI};

/// `(ln|Γ(x)|, sign Γ(x))`.
pub fn log_gamma_signed(x: f64) -> Result<(f64, f64)> {
    if x.is_nan() || (x <= 0.0 && x == x.floor()) {
        return Err(Error::Domain(format!("Gamma has a pole at x = {x}")));
    }
    let (lg, sign) = libm::lgamma_r(x);
    Ok((lg, if sign < 0 { -1.0 } else { 1.0 }))
}

fn gamma_ratio_term(prefactor_gamma: f64, denom_gamma: f64, n: u32) -> f64 {
    let nf = n as f64;
    // None of these arguments can be a pole for the parities used below.
    let (l1, s1) = log_gamma_signed(prefactor_gamma).unwrap();
    let (l2, s2) = log_gamma_signed((3.0 * nf - 5.0) / 6.0).unwrap();
    let (l3, s3) = log_gamma_signed(denom_gamma).unwrap();
    let (l4, s4) = log_gamma_signed((3.0 * nf + 11.0) / 6.0).unwrap();
    let log_mag = l1 + l2 - l3 - l4 - 0.5 * PI.ln();
    2.0 * s1 * s2 * s3 * s4 * log_mag.exp()
}

/// Coefficient c_n of |cos θ|^{2/3} cos θ; zero for even n.
pub fn cosine_coeff_c(n: u32) -> f64 {
    if n % 2 == 0 {
        return 0.0;
    }
    let sign = if ((n - 1) / 2) % 2 == 0 { 1.0 } else { -1.0 };
    sign * gamma_ratio_term(11.0 / 6.0, -1.0 / 3.0, n)
}

/// Coefficient c̃_n of |cos θ|^{5/3}; zero for odd n.
pub fn cosine_coeff_ctilde(n: u32) -> f64 {
    if n % 2 == 1 {
        return 0.0;
    }
    let sign = if (n / 2) % 2 == 0 { 1.0 } else { -1.0 };
    sign * gamma_ratio_term(4.0 / 3.0, -5.0 / 6.0, n)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoeffKind {
    C,
    CTilde,
}

/// Coefficient by direct quadrature of the defining integral.
pub fn coeff_oracle(n: u32, kind: CoeffKind, rel_tol: f64) -> Result<f64> {
    if rel_tol < 1e-13 {
        return Err(Error::Domain(format!("rel_tol {rel_tol:e} below 1e-13")));
    }
    let nf = n as f64;
    let f = move |theta: f64| {
        let c = theta.cos();
        let base = match kind {
            CoeffKind::C => c.abs().powf(2.0 / 3.0) * c,
            CoeffKind::CTilde => c.abs().powf(5.0 / 3.0),
        };
        base * (nf * theta).cos()
    };
    let opts = QuadOptions { rel_tol, abs_tol: rel_tol * 1e-2, max_evals: 1_000_000 };
    let breaks = [-PI, -FRAC_PI_2, FRAC_PI_2, PI];
    let mut total = 0.0;
    for w in breaks.windows(2) {
        total += integrate(f, w[0], w[1], opts)?.value;
    }
    Ok(total / PI)
}

/// d_n = −λ c_n/(n²−1), the amplitude of the n-th correction mode.
pub fn mode_amplitude_d(n: u32, lambda1: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::Domain(format!("mode {n} is not a correction mode (n >= 2 required)")));
    }
    let nf = n as f64;
    Ok(-lambda1 * cosine_coeff_c(n) / (nf * nf - 1.0))
}

fn tail_majorant(n: u32, peak: f64) -> f64 {
    // ∫_N^∞ x^{-8/3}/(x²−1) dx ≤ N²/(N²−1) · (3/11) N^{-11/3}
    let nf = n as f64;
    peak * nf * nf / (nf * nf - 1.0) * (3.0 / 11.0) * nf.powf(-11.0 / 3.0)
}

/// Bound on Σ_{n>N} |c_n|/(n²−1).
pub fn truncation_tail_bound(n: u32) -> f64 {
    let n = n.max(3);
    let peak = (n.saturating_sub(4).max(1)..=n)
        .map(|k| cosine_coeff_c(k).abs() * (k as f64).powf(8.0 / 3.0))
        .fold(0.0, f64::max);
    tail_majorant(n, peak)
}

/// Bound on Σ_{n>N} |c_n|, the neglected part of the series of |cos θ|^{2/3} cos θ itself.
pub fn series_tail_bound_c(n: u32) -> f64 {
    let n = n.max(3);
    let peak = (n.saturating_sub(4).max(1)..=n)
        .map(|k| cosine_coeff_c(k).abs() * (k as f64).powf(8.0 / 3.0))
        .fold(0.0, f64::max);
    peak * 0.6 * (n as f64).powf(-5.0 / 3.0)
}

/// Same bound for the c̃ series.
pub fn truncation_tail_bound_tilde(n: u32) -> f64 {
    let n = n.max(3);
    let peak = (n.saturating_sub(4).max(1)..=n)
        .map(|k| cosine_coeff_ctilde(k).abs() * (k as f64).powf(8.0 / 3.0))
        .fold(0.0, f64::max);
    tail_majorant(n, peak)
}

/// Cached coefficients for a given nonlinearity λ₁|u|^{2/3}u + λ₂|u|^{5/3}.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffTable {
    pub n_max: u32,
    pub c: Vec<f64>,
    pub c_tilde: Vec<f64>,
    pub lambda1: f64,
    pub lambda2: f64,
}

impl CoeffTable {
    pub fn new(n_max: u32, lambda1: f64, lambda2: f64) -> Self {
        let c = (0..=n_max).map(cosine_coeff_c).collect();
        let c_tilde = (0..=n_max).map(cosine_coeff_ctilde).collect();
        Self { n_max, c, c_tilde, lambda1, lambda2 }
    }

    pub fn d(&self, n: u32) -> Result<f64> {
        mode_amplitude_d(n, self.lambda1)
    }

    /// Coefficient of cos nθ in N(ρ cos θ)/ρ^{5/3}, including the halved constant term.
    pub fn nonlinear_coeff(&self, n: u32) -> f64 {
        let i = n as usize;
        let ct = if n == 0 { 0.5 * self.c_tilde[0] } else { self.c_tilde[i] };
        self.lambda1 * self.c[i] + self.lambda2 * ct
    }

    /// Correction-series coefficients: every non-resonant mode n ≠ 1 divided by −(n²−1).
    pub fn correction_terms(&self) -> Vec<(f64, f64)> {
        (0..=self.n_max)
            .filter(|&n| n != 1)
            .map(|n| {
                let nf = n as f64;
                (nf, -self.nonlinear_coeff(n) / (nf * nf - 1.0))
            })
            .filter(|&(_, a)| a != 0.0)
            .collect()
    }

    /// Non-resonant nonlinear terms (n, coefficient), n ≠ 1.
    pub fn nonresonant_terms(&self) -> Vec<(f64, f64)> {
        (0..=self.n_max)
            .filter(|&n| n != 1)
            .map(|n| (n as f64, self.nonlinear_coeff(n)))
            .filter(|&(_, a)| a != 0.0)
            .collect()
    }

    /// Bound on the neglected part of the correction series.
    pub fn series_tail_bound(&self) -> f64 {
        self.lambda1.abs() * truncation_tail_bound(self.n_max)
            + self.lambda2.abs() * truncation_tail_bound_tilde(self.n_max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_gamma_examples() {
        assert_eq!(log_gamma_signed(1.0).unwrap(), (0.0, 1.0));
        let (l, s) = log_gamma_signed(0.5).unwrap();
        assert!((l - 0.5 * PI.ln()).abs() < 1e-14 && s == 1.0);
        let (l, s) = log_gamma_signed(-1.0 / 3.0).unwrap();
        let g23 = 1.354_117_939_426_400_4_f64;
        assert!((l - (3.0 * g23).ln()).abs() < 1e-13 && s == -1.0);
        assert!(log_gamma_signed(0.0).is_err());
        assert!(log_gamma_signed(-3.0).is_err());
    }

    #[test]
    fn closed_form_examples() {
        assert_eq!(cosine_coeff_c(2), 0.0);
        assert_eq!(cosine_coeff_ctilde(1), 0.0);
        let c1 = cosine_coeff_c(1);
        assert!((c1 - 0.8915).abs() < 1e-4, "{c1}");
        let direct = 2.0 * libm::tgamma(11.0 / 6.0) / (PI.sqrt() * libm::tgamma(7.0 / 3.0));
        assert!((c1 - direct).abs() < 1e-14);
        assert!((cosine_coeff_c(3) - 0.1274).abs() < 1e-4);
    }

    #[test]
    fn closed_forms_match_oracle() {
        for n in (1..=49).step_by(2) {
            let o = coeff_oracle(n, CoeffKind::C, 1e-12).unwrap();
            assert!((cosine_coeff_c(n) - o).abs() <= 1e-10, "c_{n}");
        }
        for n in (0..=48).step_by(2) {
            let o = coeff_oracle(n, CoeffKind::CTilde, 1e-12).unwrap();
            assert!((cosine_coeff_ctilde(n) - o).abs() <= 1e-10, "ctilde_{n}");
        }
    }

    #[test]
    fn oracle_zero_cases() {
        assert!(coeff_oracle(0, CoeffKind::C, 1e-12).unwrap().abs() <= 1e-12);
        assert!(coeff_oracle(4, CoeffKind::C, 1e-12).unwrap().abs() <= 1e-12);
        assert!(coeff_oracle(3, CoeffKind::CTilde, 1e-12).unwrap().abs() <= 1e-12);
        assert!(coeff_oracle(1, CoeffKind::C, 1e-14).is_err());
    }

    #[test]
    fn signs_alternate_and_decay_rate() {
        assert!(cosine_coeff_c(1) > 0.0 && cosine_coeff_c(3) > 0.0);
        for n in (3..=97).step_by(2) {
            assert!(cosine_coeff_c(n) * cosine_coeff_c(n + 2) < 0.0);
        }
        let m = cosine_coeff_c(99).abs() * 99f64.powf(8.0 / 3.0);
        for n in (21..=99).step_by(2) {
            let v = cosine_coeff_c(n).abs() * (n as f64).powf(8.0 / 3.0);
            assert!(v >= 0.5 * m && v <= 2.0 * m);
        }
    }

    #[test]
    fn phase_coefficient_identity() {
        let half = libm::tgamma(11.0 / 6.0) / (PI.sqrt() * libm::tgamma(7.0 / 3.0));
        assert!((half - cosine_coeff_c(1) / 2.0).abs() < 1e-12 * half);
    }

    #[test]
    fn mode_amplitudes() {
        assert_eq!(mode_amplitude_d(2, 1.0).unwrap(), 0.0);
        assert_eq!(mode_amplitude_d(3, 0.0).unwrap(), 0.0);
        let o = coeff_oracle(3, CoeffKind::C, 1e-12).unwrap();
        assert!((mode_amplitude_d(3, 1.0).unwrap() + o / 8.0).abs() < 1e-12);
        assert!((mode_amplitude_d(3, 1.0).unwrap() + 0.01592).abs() < 1e-5);
        assert!(mode_amplitude_d(1, 1.0).is_err());
    }

    #[test]
    fn tail_bound_dominates_direct_sum() {
        let direct: f64 = (22..=2001u32)
            .map(|n| cosine_coeff_c(n).abs() / ((n * n) as f64 - 1.0))
            .sum();
        assert!(truncation_tail_bound(21) >= direct);
        assert!(truncation_tail_bound(1001) <= 1e-8);
        let mut prev = f64::INFINITY;
        for n in 3..200 {
            let b = truncation_tail_bound(n);
            assert!(b < prev, "not decreasing at {n}");
            prev = b;
        }
    }

    #[test]
    fn table_invariants() {
        let t = CoeffTable::new(41, 1.0, 0.5);
        for n in 0..=41 {
            if n % 2 == 0 {
                assert_eq!(t.c[n], 0.0);
            } else {
                assert_eq!(t.c_tilde[n], 0.0);
            }
        }
        assert!(t.correction_terms().iter().all(|&(n, _)| n != 1.0));
    }
}

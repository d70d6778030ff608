//! Radial Gaussian final states and their scattering data ρ, β.

use crate::error::Result;
use crate::quad::{integrate, QuadOptions};
use crate::scalar::Scalar;
use std::f64::consts::{PI, SQRT_2, TAU};

/// Final state φ0 = a0 e^{−|x|²/(2σ0²)}, φ1 = a1 e^{−|x|²/(2σ1²)}.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct FinalState {
    pub a0: f64,
    pub sigma0: f64,
    pub a1: f64,
    pub sigma1: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Component {
    Phi0,
    Phi1,
}

impl FinalState {
    pub fn new(a0: f64, sigma0: f64, a1: f64, sigma1: f64) -> Result<Self> {
        if !(sigma0 > 0.0 && sigma1 > 0.0) {
            return Err(crate::Error::Domain(format!(
                "Gaussian widths must be positive, got {sigma0}, {sigma1}"
            )));
        }
        Ok(Self { a0, sigma0, a1, sigma1 })
    }

    fn parts(&self, which: Component) -> (f64, f64) {
        match which {
            Component::Phi0 => (self.a0, self.sigma0),
            Component::Phi1 => (self.a1, self.sigma1),
        }
    }

    /// Physical-space value at radius r.
    pub fn phi(&self, which: Component, r: f64) -> f64 {
        let (a, s) = self.parts(which);
        a * (-r * r / (2.0 * s * s)).exp()
    }

    /// Returns the state with both amplitudes multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self { a0: self.a0 * factor, a1: self.a1 * factor, ..*self }
    }

    /// Data (u, ∂_t u) at t = 0 of the free solution whose leading asymptotic term is
    /// t^{−3/2}⟨μ⟩^{3/2}ρ cos(⟨μ⟩^{−1}t + β) with this state's ρ, β.
    ///
    /// Stationary phase for cos(t⟨D⟩)φ0 + sin(t⟨D⟩)⟨D⟩^{−1}φ1 produces the constant
    /// e^{3iπ/4} = −e^{−iπ/4}, so the matching data are (−φ0, −φ1).
    pub fn linear_initial_data(&self, r: f64) -> (f64, f64) {
        (-self.phi(Component::Phi0, r), -self.phi(Component::Phi1, r))
    }

    pub fn is_zero(&self) -> bool {
        self.a0 == 0.0 && self.a1 == 0.0
    }
}

/// Unitary transform (2π)^{−3/2}∫e^{−ix·ξ}φ(x)dx of the Gaussian component at |ξ|.
pub fn fourier_hat(state: &FinalState, which: Component, xi_norm: f64) -> f64 {
    let (a, s) = state.parts(which);
    a * s.powi(3) * (-0.5 * s * s * xi_norm * xi_norm).exp()
}

/// Radial scattering data ρ(μ)e^{iβ(μ)}, evaluated through m = |μ|.
pub trait ScatteringData: Sync {
    /// Real and imaginary parts of ρ e^{iβ}.
    fn z<D: Scalar>(&self, m: D) -> (D, D);

    fn rho(&self, m: f64) -> f64 {
        let (x, y) = self.z(m);
        x.hypot(y)
    }

    /// Argument in [0, 2π); 0 where ρ vanishes.
    fn beta(&self, m: f64) -> f64 {
        let (x, y) = self.z(m);
        if x == 0.0 && y == 0.0 {
            return 0.0;
        }
        let b = y.atan2(x);
        if b < 0.0 {
            (b + TAU) % TAU
        } else {
            b
        }
    }

    /// ⟨μ⟩^{3/2}ρ(μ).
    fn weighted_rho(&self, m: f64) -> f64 {
        (1.0 + m * m).powf(0.75) * self.rho(m)
    }
}

/// ρe^{iβ} = e^{−iπ/4}(⟨μ⟩φ̂0(μ) − iφ̂1(μ)) for a Gaussian final state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianScattering {
    pub state: FinalState,
}

pub fn scattering_data(state: &FinalState) -> GaussianScattering {
    GaussianScattering { state: *state }
}

impl ScatteringData for GaussianScattering {
    fn z<D: Scalar>(&self, m: D) -> (D, D) {
        let s = &self.state;
        let m2 = m * m;
        let bracket = (m2 + 1.0).sqrt();
        let h0 = (m2 * (-0.5 * s.sigma0 * s.sigma0)).exp() * (s.a0 * s.sigma0.powi(3));
        let h1 = (m2 * (-0.5 * s.sigma1 * s.sigma1)).exp() * (s.a1 * s.sigma1.powi(3));
        let p = bracket * h0;
        ((p - h1) / SQRT_2, -(p + h1) / SQRT_2)
    }
}

/// sup_μ ⟨μ⟩^{3/2}ρ(μ): log-spaced scan followed by golden-section refinement.
pub fn sup_weighted_rho<S: ScatteringData>(sd: &S) -> f64 {
    let n = 2000;
    let mut grid = Vec::with_capacity(n + 1);
    grid.push(0.0);
    for i in 0..n {
        grid.push(1e-3 * (1e5f64).powf(i as f64 / (n - 1) as f64));
    }
    let vals: Vec<f64> = grid.iter().map(|&m| sd.weighted_rho(m)).collect();
    let (imax, &vmax) = vals
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("grid is non-empty");
    if vmax == 0.0 {
        return 0.0;
    }
    let lo = grid[imax.saturating_sub(1)];
    let hi = grid[(imax + 1).min(grid.len() - 1)];
    let refined = golden_max(|m| sd.weighted_rho(m), lo, hi);
    refined.max(vmax)
}

fn golden_max<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if (b - a).abs() <= 1e-14 * (1.0 + a.abs()) {
            break;
        }
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    fc.max(fd)
}

/// The six weighted Sobolev norms whose sum is the Y norm, in order:
/// ‖φ0‖_{H²}, ‖xφ0‖_{H³}, ‖|x|²φ0‖_{H⁴}, ‖φ1‖_{H¹}, ‖xφ1‖_{H²}, ‖|x|²φ1‖_{H³}.
pub fn y_norm_terms(state: &FinalState, opts: QuadOptions) -> Result<[f64; 6]> {
    let term = |which: Component, weight: u32, k: i32| -> Result<f64> {
        let (a, s) = state.parts(which);
        if a == 0.0 {
            return Ok(0.0);
        }
        let s2 = s * s;
        let f = |xi: f64| {
            let x2 = xi * xi;
            let g = a * s.powi(3) * (-0.5 * s2 * x2).exp();
            let mult = match weight {
                0 => 1.0,
                // Σ_j |∂_{ξ_j} ĝ|² = σ⁴|ξ|² ĝ²
                1 => s2 * s2 * x2,
                // −Δ_ξ ĝ = (3σ² − σ⁴|ξ|²) ĝ
                _ => (3.0 * s2 - s2 * s2 * x2).powi(2),
            };
            4.0 * PI * x2 * (1.0 + x2).powi(k) * mult * g * g
        };
        let top = 14.0 / s;
        Ok(integrate(f, 0.0, top, opts)?.value.sqrt())
    };
    Ok([
        term(Component::Phi0, 0, 2)?,
        term(Component::Phi0, 1, 3)?,
        term(Component::Phi0, 2, 4)?,
        term(Component::Phi1, 0, 1)?,
        term(Component::Phi1, 1, 2)?,
        term(Component::Phi1, 2, 3)?,
    ])
}

/// ‖(φ0, φ1)‖_Y computed on the Fourier side.
pub fn y_norm(state: &FinalState, opts: QuadOptions) -> Result<f64> {
    Ok(y_norm_terms(state, opts)?.iter().sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn gauss(a0: f64, s0: f64, a1: f64, s1: f64) -> FinalState {
        FinalState::new(a0, s0, a1, s1).unwrap()
    }

    #[test]
    fn fourier_hat_examples() {
        let zero = gauss(0.0, 1.3, 0.0, 1.0);
        assert_eq!(fourier_hat(&zero, Component::Phi0, 0.7), 0.0);
        let s = gauss(1.0, 1.0, 0.0, 1.0);
        assert!((fourier_hat(&s, Component::Phi0, 0.0) - 1.0).abs() < 1e-15);
        // Radial transform: (2π)^{-3/2} ∫ 4π r² sinc(ξr) φ(r) dr at |ξ| = 1.
        let f = |r: f64| {
            let sinc = if r == 0.0 { 1.0 } else { r.sin() / r };
            4.0 * PI * r * r * sinc * (-0.5 * r * r).exp()
        };
        let q = integrate(f, 0.0, 40.0, QuadOptions::default()).unwrap().value;
        let oracle = q / (2.0 * PI).powf(1.5);
        assert!((oracle - (-0.5f64).exp()).abs() < 1e-12);
        assert!((fourier_hat(&s, Component::Phi0, 1.0) - oracle).abs() < 1e-12);
    }

    #[test]
    fn scattering_examples() {
        let zero = scattering_data(&gauss(0.0, 1.0, 0.0, 1.0));
        assert_eq!(zero.rho(0.4), 0.0);
        assert_eq!(zero.beta(0.4), 0.0);
        let d0 = scattering_data(&gauss(1.0, 1.0, 0.0, 1.0));
        assert!((d0.rho(0.0) - 1.0).abs() < 1e-15);
        assert!((d0.beta(0.0) - 7.0 * PI / 4.0).abs() < 1e-14);
        let d1 = scattering_data(&gauss(0.0, 1.0, 1.0, 1.0));
        assert!((d1.rho(0.0) - 1.0).abs() < 1e-15);
        assert!((d1.beta(0.0) - 5.0 * PI / 4.0).abs() < 1e-14);
    }

    #[test]
    fn sup_weighted_rho_examples() {
        assert_eq!(sup_weighted_rho(&scattering_data(&gauss(0.0, 1.0, 0.0, 1.0))), 0.0);
        let v = sup_weighted_rho(&scattering_data(&gauss(1.0, 1.0, 0.0, 1.0)));
        // d/dμ log[(1+μ²)^{5/4}e^{−μ²/2}] = 0 at μ² = 3/2.
        let oracle = 2.5f64.powf(1.25) * (-0.75f64).exp();
        assert!((v - oracle).abs() < 1e-12 * oracle, "{v} vs {oracle}");
        let v3 = sup_weighted_rho(&scattering_data(&gauss(3.0, 1.0, 0.0, 1.0)));
        assert!((v3 - 3.0 * v).abs() < 1e-12 * v3);
    }

    #[test]
    fn y_norm_homogeneity_and_zero() {
        let o = QuadOptions::default();
        assert_eq!(y_norm(&gauss(0.0, 1.0, 0.0, 2.0), o).unwrap(), 0.0);
        let a = y_norm_terms(&gauss(1.0, 1.5, 0.0, 1.0), o).unwrap();
        let b = y_norm_terms(&gauss(2.0, 1.5, 0.0, 1.0), o).unwrap();
        for i in 0..3 {
            assert!((b[i] - 2.0 * a[i]).abs() < 1e-12 * b[i]);
        }
    }

    // Radial finite-difference operators on a cell-centred grid with even reflection at r = 0.
    struct Radial {
        h: f64,
        r: Vec<f64>,
    }

    impl Radial {
        fn new(h: f64, top: f64) -> Self {
            let n = (top / h) as usize;
            Self { h, r: (0..n).map(|i| (i as f64 + 0.5) * h).collect() }
        }
        fn at(f: &[f64], i: isize) -> f64 {
            if i < 0 {
                f[(-i - 1) as usize]
            } else if (i as usize) < f.len() {
                f[i as usize]
            } else {
                0.0
            }
        }
        fn d1(&self, f: &[f64]) -> Vec<f64> {
            (0..f.len() as isize)
                .map(|i| (Self::at(f, i + 1) - Self::at(f, i - 1)) / (2.0 * self.h))
                .collect()
        }
        fn lap(&self, f: &[f64]) -> Vec<f64> {
            let d = self.d1(f);
            (0..f.len() as isize)
                .map(|i| {
                    let d2 = (Self::at(f, i + 1) - 2.0 * Self::at(f, i) + Self::at(f, i - 1))
                        / (self.h * self.h);
                    d2 + 2.0 * d[i as usize] / self.r[i as usize]
                })
                .collect()
        }
        fn norm2(&self, f: &[f64]) -> f64 {
            self.r.iter().zip(f).map(|(r, v)| 4.0 * PI * r * r * v * v * self.h).sum()
        }
        // ‖⟨D⟩^k f‖² for radial f
        fn hk_radial(&self, f: &[f64], k: u32) -> f64 {
            let mut total = 0.0;
            let mut g = f.to_vec();
            for i in 0..=k {
                if i % 2 == 0 {
                    total += binomial(k, i) * self.norm2(&g);
                } else {
                    total += binomial(k, i) * self.norm2(&self.d1(&g));
                    g = self.lap(&g);
                }
            }
            total
        }
        // Σ_j ‖⟨D⟩^k (x_j f)‖² for radial f, via Δ^l(x_j f) = x_j(Δ^l f + 2l (Δ^{l−1}f)'/r).
        fn hk_vector(&self, f: &[f64], k: u32) -> f64 {
            let mut total = 0.0;
            for i in 0..=k {
                let l = i / 2;
                let mut h = f.to_vec();
                for _ in 0..l.saturating_sub(1) {
                    h = self.lap(&h);
                }
                let g = if l == 0 { f.to_vec() } else { self.lap(&h) };
                let big_f: Vec<f64> = if l == 0 {
                    g
                } else {
                    let dh = self.d1(&h);
                    (0..f.len()).map(|j| g[j] + 2.0 * l as f64 * dh[j] / self.r[j]).collect()
                };
                let integrand: Vec<f64> = if i % 2 == 0 {
                    (0..f.len()).map(|j| self.r[j] * big_f[j]).collect()
                } else {
                    let df = self.d1(&big_f);
                    (0..f.len())
                        .map(|j| {
                            let (r, v, dv) = (self.r[j], big_f[j], df[j]);
                            (3.0 * v * v + 2.0 * r * v * dv + r * r * dv * dv).sqrt()
                        })
                        .collect()
                };
                total += binomial(k, i) * self.norm2(&integrand);
            }
            total
        }
    }

    fn binomial(n: u32, k: u32) -> f64 {
        (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
    }

    #[test]
    fn y_norm_matches_physical_space_finite_differences() {
        let st = gauss(1.0, 1.0, 0.7, 1.3);
        let terms = y_norm_terms(&st, QuadOptions::default()).unwrap();
        let g = Radial::new(2e-3, 16.0);
        let p0: Vec<f64> = g.r.iter().map(|&r| st.phi(Component::Phi0, r)).collect();
        let p1: Vec<f64> = g.r.iter().map(|&r| st.phi(Component::Phi1, r)).collect();
        let x2p0: Vec<f64> = g.r.iter().zip(&p0).map(|(r, v)| r * r * v).collect();
        let x2p1: Vec<f64> = g.r.iter().zip(&p1).map(|(r, v)| r * r * v).collect();
        let phys = [
            g.hk_radial(&p0, 2).sqrt(),
            g.hk_vector(&p0, 3).sqrt(),
            g.hk_radial(&x2p0, 4).sqrt(),
            g.hk_radial(&p1, 1).sqrt(),
            g.hk_vector(&p1, 2).sqrt(),
            g.hk_radial(&x2p1, 3).sqrt(),
        ];
        for (a, b) in terms.iter().zip(&phys) {
            assert!((a - b).abs() <= 1e-4 * a, "fourier {a} vs physical {b}");
        }
    }

    proptest! {
        #[test]
        fn reconstruction_and_homogeneity(a0 in -2.0f64..2.0, a1 in -2.0f64..2.0,
                                          s0 in 0.3f64..3.0, s1 in 0.3f64..3.0,
                                          m in 0.0f64..6.0, k in 0.1f64..5.0) {
            let st = gauss(a0, s0, a1, s1);
            let sd = scattering_data(&st);
            let (re, im) = sd.z(m);
            let bracket = (1.0 + m * m).sqrt();
            let h0 = fourier_hat(&st, Component::Phi0, m);
            let h1 = fourier_hat(&st, Component::Phi1, m);
            // e^{-iπ/4}(⟨μ⟩h0 − i h1) by complex multiplication
            let (cr, ci) = (SQRT_2 / 2.0, -SQRT_2 / 2.0);
            let (wr, wi) = (bracket * h0, -h1);
            let (er, ei) = (cr * wr - ci * wi, cr * wi + ci * wr);
            let (rho, beta) = (sd.rho(m), sd.beta(m));
            let scale = 1e-14 * (1.0 + rho);
            prop_assert!((rho * beta.cos() - er).abs() <= scale);
            prop_assert!((rho * beta.sin() - ei).abs() <= scale);
            prop_assert!((re - er).abs() <= scale && (im - ei).abs() <= scale);
            prop_assert!((0.0..TAU).contains(&beta));
            let sk = scattering_data(&st.scaled(k));
            prop_assert!((sk.rho(m) - k * rho).abs() <= 1e-13 * (1.0 + k * rho));
            if rho > 1e-100 {
                let db = (sk.beta(m) - beta).abs();
                prop_assert!(db < 1e-12 || (db - TAU).abs() < 1e-12);
            }
        }

        #[test]
        fn radiality(x in -3.0f64..3.0, y in -3.0f64..3.0, z in -3.0f64..3.0, th in 0.0f64..6.3) {
            let sd = scattering_data(&gauss(0.8, 1.1, 0.3, 0.9));
            let m = (x * x + y * y + z * z).sqrt();
            let (c, s) = (th.cos(), th.sin());
            let (xr, yr) = (c * x - s * y, s * x + c * y);
            let mr = (xr * xr + yr * yr + z * z).sqrt();
            prop_assert!((sd.rho(m) - sd.rho(mr)).abs() <= 1e-14);
        }
    }
}

use super::transform::SineTransform;
use crate::error::{Error, Result};
use crate::residual::nonlinearity;
use rayon::prelude::*;
use std::f64::consts::PI;

/// Radial solution u = v/r stored as sine coefficients of v and ∂_t v.
#[derive(Debug, Clone)]
pub struct RadialSpectralState {
    pub radius: f64,
    pub v_modes: Vec<f64>,
    pub w_modes: Vec<f64>,
    pub t: f64,
    transform: SineTransform,
    k: Vec<f64>,
    omega: Vec<f64>,
    r: Vec<f64>,
}

impl RadialSpectralState {
    pub fn zero(radius: f64, modes: usize, t: f64) -> Result<Self> {
        if !(radius > 0.0) || modes == 0 {
            return Err(Error::Domain(format!("need R > 0 and M > 0, got R = {radius}, M = {modes}")));
        }
        let k: Vec<f64> = (1..=modes).map(|m| m as f64 * PI / radius).collect();
        let omega = k.iter().map(|k| (1.0 + k * k).sqrt()).collect();
        let r = (1..=modes).map(|j| j as f64 * radius / (modes + 1) as f64).collect();
        Ok(Self {
            radius,
            v_modes: vec![0.0; modes],
            w_modes: vec![0.0; modes],
            t,
            transform: SineTransform::new(modes),
            k,
            omega,
            r,
        })
    }

    /// State whose u and ∂_t u take the given values on the collocation grid.
    pub fn from_grid(radius: f64, t: f64, u: &[f64], ut: &[f64]) -> Result<Self> {
        let mut s = Self::zero(radius, u.len(), t)?;
        if ut.len() != u.len() {
            return Err(Error::SizeMismatch { expected: u.len(), got: ut.len() });
        }
        let v: Vec<f64> = u.iter().zip(&s.r).map(|(u, r)| u * r).collect();
        let w: Vec<f64> = ut.iter().zip(&s.r).map(|(u, r)| u * r).collect();
        s.v_modes = s.transform.forward(&v)?;
        s.w_modes = s.transform.forward(&w)?;
        Ok(s)
    }

    pub fn modes(&self) -> usize {
        self.v_modes.len()
    }

    pub fn grid(&self) -> &[f64] {
        &self.r
    }

    pub fn wavenumbers(&self) -> &[f64] {
        &self.k
    }

    pub fn frequencies(&self) -> &[f64] {
        &self.omega
    }

    pub fn transform(&self) -> &SineTransform {
        &self.transform
    }

    pub fn dr(&self) -> f64 {
        self.radius / (self.modes() + 1) as f64
    }

    /// u on the collocation grid.
    pub fn u_grid(&self) -> Result<Vec<f64>> {
        let mut v = self.transform.inverse(&self.v_modes)?;
        v.iter_mut().zip(&self.r).for_each(|(x, r)| *x /= r);
        Ok(v)
    }

    /// Sine coefficients of r·f(r) for a radial function sampled on the grid.
    pub fn project(&self, f: &[f64]) -> Result<Vec<f64>> {
        let v: Vec<f64> = f.iter().zip(&self.r).map(|(f, r)| f * r).collect();
        self.transform.forward(&v)
    }

    /// 3D L² norm of the radial function with v-coefficients `modes` (Parseval).
    pub fn l2_norm_of(&self, modes: &[f64]) -> f64 {
        (4.0 * PI * self.radius / 2.0 * modes.iter().map(|x| x * x).sum::<f64>()).sqrt()
    }

    /// 3D H^{1/2} norm via the multiplier (1 + k²)^{1/4}.
    pub fn h_half_norm_of(&self, modes: &[f64]) -> f64 {
        let s: f64 = modes.iter().zip(&self.k).map(|(x, k)| (1.0 + k * k).sqrt() * x * x).sum();
        (4.0 * PI * self.radius / 2.0 * s).sqrt()
    }

    /// 3D L² norm of grid values of v, by the trapezoid-type grid sum.
    pub fn l2_norm_grid(&self, v: &[f64]) -> f64 {
        (4.0 * PI * self.dr() * v.iter().map(|x| x * x).sum::<f64>()).sqrt()
    }

    /// Exact flow of the semi-discrete linear system for time dt.
    pub fn linear_flow(&mut self, dt: f64) {
        let omega = &self.omega;
        self.v_modes
            .par_iter_mut()
            .zip(self.w_modes.par_iter_mut())
            .zip(omega.par_iter())
            .for_each(|((v, w), &om)| {
                let (s, c) = (om * dt).sin_cos();
                let nv = *v * c + *w * s / om;
                let nw = -*v * om * s + *w * c;
                *v = nv;
                *w = nw;
            });
        self.t += dt;
    }

    /// w += dt · r N(v/r) on the grid.
    fn kick(&mut self, dt: f64, lambda1: f64, lambda2: f64) -> Result<()> {
        if lambda1 == 0.0 && lambda2 == 0.0 {
            return Ok(());
        }
        let mut g = self.transform.inverse(&self.v_modes)?;
        g.par_iter_mut().zip(self.r.par_iter()).for_each(|(v, &r)| {
            *v = r * nonlinearity(*v / r, lambda1, lambda2);
        });
        if g.iter().any(|x| !x.is_finite()) {
            return Err(Error::Blowup { t: self.t });
        }
        self.transform.forward_in_place(&mut g)?;
        self.w_modes.iter_mut().zip(&g).for_each(|(w, g)| *w += dt * g);
        Ok(())
    }

    /// Half linear flow, nonlinear kick, half linear flow.
    pub fn strang_step(&mut self, dt: f64, lambda1: f64, lambda2: f64) -> Result<()> {
        self.linear_flow(0.5 * dt);
        self.kick(dt, lambda1, lambda2)?;
        self.linear_flow(0.5 * dt);
        if self.v_modes.iter().chain(&self.w_modes).any(|x| !x.is_finite()) {
            return Err(Error::Blowup { t: self.t });
        }
        Ok(())
    }

    /// E = ∫[½(u_t² + u_r² + u²) − (3λ₁/8)|u|^{8/3} − (3λ₂/8)|u|^{5/3}u] 4πr² dr.
    pub fn energy(&self, lambda1: f64, lambda2: f64) -> Result<f64> {
        let quad: f64 = self
            .v_modes
            .iter()
            .zip(&self.w_modes)
            .zip(&self.omega)
            .map(|((v, w), om)| 0.5 * (w * w + om * om * v * v))
            .sum();
        let kinetic = 4.0 * PI * self.radius / 2.0 * quad;
        if lambda1 == 0.0 && lambda2 == 0.0 {
            return Ok(kinetic);
        }
        let u = self.u_grid()?;
        let pot: f64 = u
            .iter()
            .zip(&self.r)
            .map(|(&u, &r)| {
                let a = u.abs().cbrt();
                let a2 = a * a;
                r * r * (0.375 * lambda1 * a2 * a2 * a2 * a2 + 0.375 * lambda2 * a2 * a2 * a * u)
            })
            .sum();
        Ok(kinetic - 4.0 * PI * self.dr() * pot)
    }

    /// Fraction of ∫v² dr carried by the outer zone r > zone·R.
    pub fn boundary_fraction(&self, zone: f64) -> Result<f64> {
        let v = self.transform.inverse(&self.v_modes)?;
        let total: f64 = v.iter().map(|x| x * x).sum();
        if total == 0.0 {
            return Ok(0.0);
        }
        let outer: f64 = v.iter().zip(&self.r).filter(|(_, &r)| r > zone * self.radius).map(|(x, _)| x * x).sum();
        Ok(outer / total)
    }
}

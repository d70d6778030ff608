use super::state::RadialSpectralState;
use crate::error::{Error, Result};
use crate::final_data::ScatteringData;
use crate::fit::fit_power_law;
use crate::profiles::{ProfileKind, Profiles};
use crate::residual::{box_plus_one_exact, nonlinearity};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// 𝒢[g](τ_i) = ∫_{τ_i}^{τ_N} sin((τ_i − τ)ω)/ω · g(τ) dτ for every mode, with g piecewise linear
/// between samples and the sine kernel integrated exactly on each interval.
/// `g[i][m]` is mode m at τ_i = τ_0 + iΔτ.
pub fn yang_feldman_g(omega: &[f64], g: &[Vec<f64>], dtau: f64) -> Result<Vec<Vec<f64>>> {
    let w_max = omega.iter().fold(0.0f64, |a, &b| a.max(b));
    if w_max * dtau > 0.5 {
        return Err(Error::Resolution(w_max * dtau));
    }
    let m = omega.len();
    if let Some(row) = g.iter().find(|row| row.len() != m) {
        return Err(Error::SizeMismatch { expected: m, got: row.len() });
    }
    let n = g.len();
    let columns: Vec<Vec<f64>> = omega
        .par_iter()
        .enumerate()
        .map(|(k, &w)| {
            let (sn, cs) = (w * dtau).sin_cos();
            // e^{−iωΔ}
            let (er, ei) = (cs, -sn);
            // I0 = (1 − e^{−iωΔ})/(iω), I1 = (e^{−iωΔ}(1 + iωΔ) − 1)/ω²
            let (i0r, i0i) = (sn / w, (cs - 1.0) / w);
            let wd = w * dtau;
            let (i1r, i1i) = ((er - ei * wd - 1.0) / (w * w), (ei + er * wd) / (w * w));
            let mut out = vec![0.0; n];
            let (mut zr, mut zi) = (0.0, 0.0);
            for i in (0..n.saturating_sub(1)).rev() {
                let a = g[i][k];
                let b = (g[i + 1][k] - a) / dtau;
                let pr = er * zr - ei * zi;
                let pi = er * zi + ei * zr;
                zr = a * i0r + b * i1r + pr;
                zi = a * i0i + b * i1i + pi;
                out[i] = zi / w;
            }
            out
        })
        .collect();
    Ok((0..n).map(|i| columns.iter().map(|c| c[i]).collect()).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct YangFeldmanConfig {
    pub t_start: f64,
    pub t_max: f64,
    pub dtau: f64,
    pub radius: f64,
    pub modes: usize,
    pub iterations: usize,
    /// Weight exponent in d_k = sup t^γ‖v_{k+1} − v_k‖.
    pub gamma: f64,
    pub contraction: f64,
    /// Largest admissible ratio of the estimated truncated tail of ∫‖F‖ to the computed part.
    /// Unset means the ratio is only reported.
    pub tail_tol: Option<f64>,
}

impl Default for YangFeldmanConfig {
    fn default() -> Self {
        Self {
            t_start: 50.0,
            t_max: 500.0,
            dtau: 0.08,
            radius: 600.0,
            modes: 1024,
            iterations: 5,
            gamma: 0.75,
            contraction: 0.7,
            tail_tol: None,
        }
    }
}

impl YangFeldmanConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |key: &str, msg: String| Err(Error::Config(format!("yang_feldman.{key}: {msg}")));
        if !(self.t_start >= 3.0) {
            return bad("t_start", format!("must be >= 3, got {}", self.t_start));
        }
        if !(self.t_max >= 10.0 * self.t_start) {
            return bad("t_max", format!("must be >= 10 t_start, got {}", self.t_max));
        }
        if !(self.dtau > 0.0) {
            return bad("dtau", format!("must be positive, got {}", self.dtau));
        }
        if !(self.radius > self.t_max) {
            return bad("radius", format!("must exceed t_max, got {}", self.radius));
        }
        if self.modes < 16 {
            return bad("modes", format!("must be >= 16, got {}", self.modes));
        }
        if self.iterations < 2 {
            return bad("iterations", format!("must be >= 2, got {}", self.iterations));
        }
        if !(self.contraction > 0.0 && self.contraction < 1.0) {
            return bad("contraction", format!("must lie in (0, 1), got {}", self.contraction));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct YangFeldmanReport {
    /// d_k = sup_τ τ^γ‖v_{k+1}(τ) − v_k(τ)‖_{L²}, k = 0, 1, ...
    pub d: Vec<f64>,
    /// d_{k+1}/d_k.
    pub ratios: Vec<f64>,
    /// All ratios from k = 1 on are at most the contraction threshold.
    pub contracted: bool,
    /// sup_τ τ^{3/2}‖A(τ)‖_∞.
    pub eta_proxy: f64,
    /// Estimated ∫_{t_max}^∞‖F‖ over ∫_{t_start}^{t_max}‖F‖.
    pub tail_ratio: f64,
    /// sup_τ τ^γ‖v_K(τ)‖_{L²} for the last iterate.
    pub final_weighted_norm: f64,
}

fn ratio(next: f64, prev: f64) -> f64 {
    if next == 0.0 {
        0.0
    } else if prev == 0.0 {
        f64::INFINITY
    } else {
        next / prev
    }
}

/// Iterates v ↦ −𝒢[N(v + A) − N(A) − F] from v = 0, with F = (□+1)A − N(A).
/// Since (□+1)𝒢[g] = −g, a fixed point solves (□+1)(v + A) = N(v + A).
pub fn fixed_point_iterate<S: ScatteringData>(p: &Profiles<S>, cfg: &YangFeldmanConfig) -> Result<YangFeldmanReport> {
    cfg.validate()?;
    let (l1, l2) = (p.config().lambda1, p.config().lambda2);
    let helper = RadialSpectralState::zero(cfg.radius, cfg.modes, cfg.t_start)?;
    let n = ((cfg.t_max - cfg.t_start) / cfg.dtau).ceil() as usize + 1;
    let dtau = (cfg.t_max - cfg.t_start) / (n - 1) as f64;
    let w_max = helper.frequencies().iter().fold(0.0f64, |a, &b| a.max(b));
    if w_max * dtau > 0.5 {
        return Err(Error::Resolution(w_max * dtau));
    }
    let taus: Vec<f64> = (0..n).map(|i| cfg.t_start + i as f64 * dtau).collect();
    let grid = helper.grid().to_vec();

    // A and (□+1)A = N(A) + F on the grid; the source handed to 𝒢 is (□+1)A − N(v + A).
    let fields: Vec<(Vec<f64>, Vec<f64>)> = taus
        .par_iter()
        .map(|&t| {
            let a = grid.iter().map(|&r| p.eval(ProfileKind::A, t, r)).collect();
            let field = p.field(ProfileKind::A);
            let b = grid.iter().map(|&r| box_plus_one_exact(&field, t, r)).collect();
            (a, b)
        })
        .collect();
    let eta_proxy = taus
        .iter()
        .zip(&fields)
        .map(|(t, (a, _))| t.powf(1.5) * a.iter().fold(0.0f64, |m, x| m.max(x.abs())))
        .fold(0.0, f64::max);

    let source = |v: &[Vec<f64>]| -> Result<Vec<Vec<f64>>> {
        v.par_iter()
            .zip(fields.par_iter())
            .map(|(modes, (a, b))| {
                let mut u = helper.transform().inverse(modes)?;
                for (j, x) in u.iter_mut().enumerate() {
                    let total = *x / grid[j] + a[j];
                    *x = b[j] - nonlinearity(total, l1, l2);
                }
                helper.project(&u)
            })
            .collect()
    };
    let weighted_sup = |a: &[Vec<f64>], b: Option<&[Vec<f64>]>| -> f64 {
        taus.iter()
            .enumerate()
            .map(|(i, t)| {
                let d: Vec<f64> = match b {
                    Some(b) => a[i].iter().zip(&b[i]).map(|(x, y)| x - y).collect(),
                    None => a[i].clone(),
                };
                t.powf(cfg.gamma) * helper.l2_norm_of(&d)
            })
            .fold(0.0, f64::max)
    };

    let mut v = vec![vec![0.0; cfg.modes]; n];
    let mut d = Vec::with_capacity(cfg.iterations);
    let mut ratios = Vec::new();
    let mut tail_ratio = 0.0;
    for k in 0..cfg.iterations {
        let g = source(&v)?;
        if k == 0 {
            tail_ratio = tail_estimate(&taus, &g, &helper, dtau)?;
            if let Some(tol) = cfg.tail_tol.filter(|&tol| tail_ratio > tol) {
                return Err(Error::Domain(format!(
                    "truncated tail of the source is {tail_ratio:.3} of the computed part, above {tol}"
                )));
            }
        }
        let next = yang_feldman_g(helper.frequencies(), &g, dtau)?;
        d.push(weighted_sup(&next, Some(&v)));
        v = next;
        if k >= 1 {
            ratios.push(ratio(d[k], d[k - 1]));
            if ratios.iter().filter(|&&r| r >= 1.0).count() >= 2 {
                return Err(Error::NoContraction { ratios, eta: eta_proxy });
            }
        }
    }
    let contracted = ratios.iter().skip(1).all(|&r| r <= cfg.contraction);
    Ok(YangFeldmanReport { d, ratios, contracted, eta_proxy, tail_ratio, final_weighted_norm: weighted_sup(&v, None) })
}

/// Power-law extrapolation of ∫_{t_max}^∞‖g‖ relative to the sampled integral.
fn tail_estimate(taus: &[f64], g: &[Vec<f64>], helper: &RadialSpectralState, dtau: f64) -> Result<f64> {
    let norms: Vec<f64> = g.iter().map(|row| helper.l2_norm_of(row)).collect();
    let inside: f64 = dtau * (norms.iter().sum::<f64>() - 0.5 * (norms[0] + norms[norms.len() - 1]));
    if inside == 0.0 {
        return Ok(0.0);
    }
    let half = taus.len() / 2;
    let Some(fit) = fit_power_law(&taus[half..], &norms[half..], false) else {
        return Ok(0.0);
    };
    if fit.exponent >= -1.0 {
        return Err(Error::Domain(format!("source decays like t^{:.3}; its tail is not integrable", fit.exponent)));
    }
    let t_max = taus[taus.len() - 1];
    let tail = fit.amplitude * t_max.powf(fit.exponent + 1.0) / (-fit.exponent - 1.0);
    Ok(tail / inside)
}

//! Least-squares power-law fits on log-log axes.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerFit {
    pub exponent: f64,
    pub amplitude: f64,
    pub r_squared: f64,
}

/// Fits y ≈ amplitude · x^exponent [· log x] by linear regression of logarithms.
/// Points with non-positive y are skipped; returns `None` with fewer than two usable points.
pub fn fit_power_law(x: &[f64], y: &[f64], with_log: bool) -> Option<PowerFit> {
    let pts: Vec<(f64, f64)> = x
        .iter()
        .zip(y)
        .filter(|(&a, &b)| a > 0.0 && b > 0.0 && b.is_finite() && (!with_log || a > 1.0))
        .map(|(&a, &b)| {
            let ly = if with_log { b.ln() - a.ln().ln() } else { b.ln() };
            (a.ln(), ly)
        })
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    let r_squared = if syy == 0.0 { 1.0 } else { (1.0 - ss_res / syy).clamp(0.0, 1.0) };
    Some(PowerFit { exponent: slope, amplitude: intercept.exp(), r_squared })
}

/// n points log-spaced over [a, b].
pub fn log_space(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    let (la, lb) = (a.ln(), b.ln());
    (0..n).map(|i| (la + (lb - la) * i as f64 / (n - 1) as f64).exp()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_exact_power_law() {
        let x = log_space(100.0, 1e4, 12);
        let y: Vec<f64> = x.iter().map(|t| 3.0 * t.powf(-1.75)).collect();
        let f = fit_power_law(&x, &y, false).unwrap();
        assert!((f.exponent + 1.75).abs() < 1e-12 && (f.amplitude - 3.0).abs() < 1e-10);
        assert!((f.r_squared - 1.0).abs() < 1e-12);
        let y: Vec<f64> = x.iter().map(|t| 0.5 * t.powf(-11.0 / 6.0) * t.ln()).collect();
        let f = fit_power_law(&x, &y, true).unwrap();
        assert!((f.exponent + 11.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(fit_power_law(&[1.0], &[1.0], false).is_none());
        assert!(fit_power_law(&[1.0, 2.0], &[0.0, 0.0], false).is_none());
    }
}

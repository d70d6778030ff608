//! Scalars that carry optional second-order derivative information.

use num_dual::{Dual2_64, DualNum};

/// A real number or second-order dual number over `f64`.
pub trait Scalar: DualNum<Primitive = f64> + Copy + Send + Sync {
    /// Σ a_k cos(n_k θ) for `terms = [(n_k, a_k)]`, with derivatives propagated through θ.
    fn cos_series(self, terms: &[(f64, f64)]) -> Self;

    fn value(&self) -> f64;
}

impl Scalar for f64 {
    fn cos_series(self, terms: &[(f64, f64)]) -> Self {
        terms.iter().map(|&(n, a)| a * (n * self).cos()).sum()
    }

    fn value(&self) -> f64 {
        *self
    }
}

impl Scalar for Dual2_64 {
    fn cos_series(self, terms: &[(f64, f64)]) -> Self {
        let theta = self.re;
        let (mut f, mut f1, mut f2) = (0.0, 0.0, 0.0);
        for &(n, a) in terms {
            let (s, c) = (n * theta).sin_cos();
            f += a * c;
            f1 -= a * n * s;
            f2 -= a * n * n * c;
        }
        Dual2_64::new(f, f1 * self.v1, f2 * self.v1 * self.v1 + f1 * self.v2)
    }

    fn value(&self) -> f64 {
        self.re
    }
}

/// A radial space-time field u(t, r) that can be evaluated on any [`Scalar`].
pub trait Field: Sync {
    fn eval<D: Scalar>(&self, t: D, r: D) -> D;

    fn at(&self, t: f64, r: f64) -> f64 {
        self.eval(t, r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn series_chain_rule_matches_direct() {
        let terms = [(3.0, 0.2), (5.0, -0.05), (0.0, 0.1)];
        let x = Dual2_64::from_re(0.7).derivative();
        let th = x * x + x.sin();
        let s = th.cos_series(&terms);
        let d: Dual2_64 = terms.iter().map(|&(n, a)| (th * n).cos() * a).sum();
        assert!((s.re - d.re).abs() < 1e-15);
        assert!((s.v1 - d.v1).abs() < 1e-14);
        assert!((s.v2 - d.v2).abs() < 1e-13);
    }
}

use crate::error::{Error, Result};
use rustdct::{Dst1, DctPlanner};
use std::sync::Arc;

/// Sine transform pair on the collocation grid r_j = jR/(M+1), j = 1..M, for the basis sin(mπr/R).
#[derive(Clone)]
pub struct SineTransform {
    len: usize,
    plan: Arc<dyn Dst1<f64>>,
}

impl std::fmt::Debug for SineTransform {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SineTransform").field("len", &self.len).finish()
    }
}

impl SineTransform {
    pub fn new(len: usize) -> Self {
        let plan = DctPlanner::new().plan_dst1(len);
        Self { len, plan }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    fn check(&self, n: usize) -> Result<()> {
        if n != self.len {
            return Err(Error::SizeMismatch { expected: self.len, got: n });
        }
        Ok(())
    }

    /// Grid values to mode coefficients, in place.
    pub fn forward_in_place(&self, buf: &mut [f64]) -> Result<()> {
        self.check(buf.len())?;
        self.plan.process_dst1(buf);
        let scale = 2.0 / (self.len + 1) as f64;
        buf.iter_mut().for_each(|x| *x *= scale);
        Ok(())
    }

    /// Mode coefficients to grid values, in place.
    pub fn inverse_in_place(&self, buf: &mut [f64]) -> Result<()> {
        self.check(buf.len())?;
        self.plan.process_dst1(buf);
        Ok(())
    }

    pub fn forward(&self, values: &[f64]) -> Result<Vec<f64>> {
        let mut out = values.to_vec();
        self.forward_in_place(&mut out)?;
        Ok(out)
    }

    pub fn inverse(&self, modes: &[f64]) -> Result<Vec<f64>> {
        let mut out = modes.to_vec();
        self.inverse_in_place(&mut out)?;
        Ok(out)
    }
}

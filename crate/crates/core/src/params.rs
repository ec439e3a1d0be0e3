use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parameters of the merged process: `n` merged vertices, each absorbing `m`
/// consecutive tree vertices, with attractiveness `beta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub n: usize,
    pub m: usize,
    pub beta: f64,
}

impl ModelParams {
    pub fn new(n: usize, m: usize, beta: f64) -> Result<Self> {
        check_beta(beta)?;
        if m == 0 {
            return Err(Error::Parameter("m must be at least 1".into()));
        }
        if n == 0 {
            return Err(Error::Parameter("n must be at least 1".into()));
        }
        Ok(Self { n, m, beta })
    }

    /// Number of vertices of the underlying tree, `n * m`.
    pub fn tree_size(&self) -> usize {
        self.n * self.m
    }

    pub fn validate(&self) -> Result<()> {
        Self::new(self.n, self.m, self.beta).map(|_| ())
    }
}

pub(crate) fn check_beta(beta: f64) -> Result<()> {
    if beta.is_finite() && beta > 0.0 {
        Ok(())
    } else {
        Err(Error::Parameter(format!(
            "beta must be finite and satisfy beta > 0, got {beta}"
        )))
    }
}

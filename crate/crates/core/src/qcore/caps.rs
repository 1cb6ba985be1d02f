use crate::error::{QcError, Result};

/// Size limits guarding dense constructions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Caps {
    /// Largest `d^t` for which a t-copy register is stored densely.
    pub dim: usize,
    /// Largest `D^{n+k}` accepted by the Haar moment oracle.
    pub oracle: usize,
}

pub const DEFAULT_DIM_CAP: usize = 1024;
pub const DEFAULT_ORACLE_CAP: usize = 4096;
pub const DIM_CAP_ENV: &str = "QCERTLAB_DIM_CAP";

impl Default for Caps {
    fn default() -> Self {
        Caps { dim: DEFAULT_DIM_CAP, oracle: DEFAULT_ORACLE_CAP }
    }
}

impl Caps {
    /// Reads `QCERTLAB_DIM_CAP`; the oracle cap scales with it by the
    /// default ratio.
    pub fn from_env() -> Result<Self> {
        match std::env::var(DIM_CAP_ENV) {
            Ok(v) => {
                let dim: usize = v.trim().parse().map_err(|_| {
                    QcError::InvalidParameter(format!("{DIM_CAP_ENV}={v} is not an integer"))
                })?;
                if dim == 0 {
                    return Err(QcError::InvalidParameter(format!("{DIM_CAP_ENV} must be positive")));
                }
                Ok(Caps { dim, oracle: dim.saturating_mul(DEFAULT_ORACLE_CAP / DEFAULT_DIM_CAP) })
            }
            Err(_) => Ok(Caps::default()),
        }
    }

    pub fn with_scale(self, factor: usize) -> Self {
        Caps { dim: self.dim.saturating_mul(factor), oracle: self.oracle.saturating_mul(factor) }
    }

    /// Errors unless `base^exp <= cap`.
    pub fn check_pow(what: &str, base: usize, exp: usize, cap: usize) -> Result<usize> {
        match super::checked_pow(base, exp) {
            Some(n) if n <= cap => Ok(n),
            Some(n) => Err(QcError::ResourceLimit { what: what.to_string(), size: n, cap }),
            None => Err(QcError::ResourceLimit { what: what.to_string(), size: usize::MAX, cap }),
        }
    }

    pub fn check_dim(&self, what: &str, base: usize, exp: usize) -> Result<usize> {
        Self::check_pow(what, base, exp, self.dim)
    }

    pub fn check_oracle(&self, what: &str, base: usize, exp: usize) -> Result<usize> {
        Self::check_pow(what, base, exp, self.oracle)
    }
}

//! Model parameters under the weak-asymmetry scaling.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Scale `L`, rates `beta1`, `beta2` and the derived vertex weights.
///
/// `b1 = exp(-beta1 / L)` is the probability that a line entering from the
/// left goes straight; `b2 = exp(-beta2 / L)` is the same for a line entering
/// from below. The exponential height field is `phi = q^H` with `q = b1 / b2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    scale: u32,
    beta1: f64,
    beta2: f64,
    b1: f64,
    b2: f64,
}

/// Rates must be positive, finite and distinct.
pub(crate) fn check_rates(beta1: f64, beta2: f64) -> Result<()> {
    if !(beta1.is_finite() && beta1 > 0.0 && beta2.is_finite() && beta2 > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "rates must be positive and finite, got beta1 = {beta1}, beta2 = {beta2}"
        )));
    }
    if beta1 == beta2 {
        return Err(Error::InvalidParameter("beta1 must differ from beta2".into()));
    }
    Ok(())
}

impl ModelParams {
    pub fn new(scale: u32, beta1: f64, beta2: f64) -> Result<Self> {
        if scale == 0 {
            return Err(Error::InvalidParameter("scale L must be at least 1".into()));
        }
        check_rates(beta1, beta2)?;
        let l = f64::from(scale);
        Ok(Self {
            scale,
            beta1,
            beta2,
            b1: (-beta1 / l).exp(),
            b2: (-beta2 / l).exp(),
        })
    }

    /// Arbitrary stochastic weights in `(0, 1)`, with `L = 1`.
    ///
    /// The rates are back-solved as `beta_i = -ln b_i` so every derived
    /// quantity stays consistent with the scaled constructor.
    pub fn from_weights(b1: f64, b2: f64) -> Result<Self> {
        for (name, b) in [("b1", b1), ("b2", b2)] {
            if !(b > 0.0 && b < 1.0) {
                return Err(Error::InvalidParameter(format!("{name} must lie in (0, 1), got {b}")));
            }
        }
        if b1 == b2 {
            return Err(Error::InvalidParameter("b1 must differ from b2".into()));
        }
        Ok(Self {
            scale: 1,
            beta1: -b1.ln(),
            beta2: -b2.ln(),
            b1,
            b2,
        })
    }

    pub fn scale(&self) -> u32 {
        self.scale
    }

    pub fn scale_f64(&self) -> f64 {
        f64::from(self.scale)
    }

    pub fn beta1(&self) -> f64 {
        self.beta1
    }

    pub fn beta2(&self) -> f64 {
        self.beta2
    }

    pub fn b1(&self) -> f64 {
        self.b1
    }

    pub fn b2(&self) -> f64 {
        self.b2
    }

    /// `q = b1 / b2`.
    pub fn q(&self) -> f64 {
        self.b1 / self.b2
    }

    /// `exp(beta1 - beta2)`. Note `q^L = 1 / frak_q`.
    pub fn frak_q(&self) -> f64 {
        (self.beta1 - self.beta2).exp()
    }

    /// `q^L = exp(beta2 - beta1)`: the base in which `H / L` approximates
    /// the logarithm of the macroscopic profile.
    pub fn macroscopic_height_base(&self) -> f64 {
        (self.beta2 - self.beta1).exp()
    }
}

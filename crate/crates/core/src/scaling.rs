use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// P = α I^a v^b λ^c τ^d, SI inputs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingLaw {
    pub alpha: f64,
    pub exp_i: i32,
    pub exp_v: i32,
    pub exp_lambda: i32,
    pub exp_tau: i32,
}

impl ScalingLaw {
    pub const DEPOLARIZER: ScalingLaw = ScalingLaw { alpha: 5.09e-21, exp_i: 2, exp_v: 2, exp_lambda: 2, exp_tau: 2 };
    pub const SKD: ScalingLaw = ScalingLaw { alpha: 9.96e-14, exp_i: 3, exp_v: 0, exp_lambda: 4, exp_tau: 2 };
    pub const TWO_COLOR_KD: ScalingLaw = ScalingLaw { alpha: 5.12e-7, exp_i: 3, exp_v: 2, exp_lambda: 6, exp_tau: 2 };
}

/// Evaluates the law. Overflow saturates to `f64::MAX` and is reported as an error.
pub fn scaling_probability(law: &ScalingLaw, intensity: f64, v: f64, lambda: f64, tau: f64) -> Result<f64> {
    for (name, x) in [("I", intensity), ("v", v), ("lambda", lambda), ("tau", tau)] {
        if !(x > 0.0 && x.is_finite()) {
            return Err(Error::InvalidParameter(format!("{name} must be positive, got {x}")));
        }
    }
    // log-space keeps intermediate powers from overflowing when the product is representable
    let ln = law.alpha.abs().ln()
        + law.exp_i as f64 * intensity.ln()
        + law.exp_v as f64 * v.ln()
        + law.exp_lambda as f64 * lambda.ln()
        + law.exp_tau as f64 * tau.ln();
    if ln > f64::MAX.ln() {
        return Err(Error::Overflow { saturated: f64::MAX });
    }
    let direct = law.alpha
        * intensity.powi(law.exp_i)
        * v.powi(law.exp_v)
        * lambda.powi(law.exp_lambda)
        * tau.powi(law.exp_tau);
    if direct.is_finite() && direct != 0.0 {
        Ok(direct)
    } else {
        Ok(law.alpha.signum() * ln.exp())
    }
}

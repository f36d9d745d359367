use crate::error::{Error, Result};

/// Numerical knobs shared by every computation.
///
/// Decision thresholds are relative: a criterion with natural magnitude `s`
/// is compared against `decision_margin * s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToleranceConfig {
    /// Allowed deviation of a unit vector's norm from 1.
    pub unit_tol: f64,
    /// Relative cluster width for the top singular subspace, in units of `σ_max²`.
    pub subspace_tol: f64,
    /// Number of angles in a circle sweep.
    pub sweep_points: usize,
    /// Number of Fibonacci-lattice directions used for joint-range sweeps.
    pub sphere_directions: usize,
    /// Termination tolerance for local refinement.
    pub refine_tol: f64,
    /// Relative width of the band in which a criterion counts as satisfied.
    pub decision_margin: f64,
    /// Random restarts for shell maximization.
    pub oracle_samples: usize,
    pub rng_seed: u64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            unit_tol: 1e-10,
            subspace_tol: 1e-8,
            sweep_points: 720,
            sphere_directions: 64 * 64,
            refine_tol: 1e-10,
            decision_margin: 1e-9,
            oracle_samples: 64,
            rng_seed: 0x5EED_0F0F_2017_0001,
        }
    }
}

impl ToleranceConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("unit_tol", self.unit_tol),
            ("subspace_tol", self.subspace_tol),
            ("refine_tol", self.refine_tol),
            ("decision_margin", self.decision_margin),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Invalid(format!("{name} must be positive, got {v}")));
            }
        }
        if self.sweep_points < 16 {
            return Err(Error::Invalid(format!(
                "sweep_points must be at least 16, got {}",
                self.sweep_points
            )));
        }
        if self.sphere_directions < 16 {
            return Err(Error::Invalid(format!(
                "sphere_directions must be at least 16, got {}",
                self.sphere_directions
            )));
        }
        if self.oracle_samples < 1 {
            return Err(Error::Invalid("oracle_samples must be at least 1".into()));
        }
        Ok(())
    }

    /// Absolute threshold for a criterion whose natural magnitude is `scale`.
    pub(crate) fn threshold(&self, scale: f64) -> f64 {
        self.decision_margin * scale.abs()
    }
}

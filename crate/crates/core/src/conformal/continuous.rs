use serde::Serialize;

use crate::error::MeasureError;
use crate::step::StepFunction;

/// Probability measure on the circle with a piecewise-constant density.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CircleDensity {
    density: StepFunction,
    beta: f64,
}

impl CircleDensity {
    /// Normalizes `density` to total mass 1.
    pub fn new(density: StepFunction, beta: f64) -> Result<Self, MeasureError> {
        if density
            .values()
            .iter()
            .any(|&v| !(v >= 0.0) || !v.is_finite())
        {
            return Err(MeasureError::InvalidParameter(
                "density must be finite and nonnegative".into(),
            ));
        }
        let total = density.total();
        if !(total > 0.0) {
            return Err(MeasureError::InvalidParameter(
                "density has zero mass".into(),
            ));
        }
        Ok(CircleDensity {
            density: density.map(|v| v / total),
            beta,
        })
    }

    pub fn density(&self) -> &StepFunction {
        &self.density
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Mass of the arc from `a` to `b`.
    pub fn interval(&self, a: f64, b: f64) -> f64 {
        self.density.integral(a, b)
    }

    /// `∫_a^b g dν` for a step function `g`.
    pub fn integrate(&self, g: &StepFunction, a: f64, b: f64) -> f64 {
        self.density.combine(g, |d, v| d * v).integral(a, b)
    }
}

/// `βe^{−βt}dt` on ℝ (a probability measure on `[0, ∞)`).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LineExponential {
    beta: f64,
}

impl LineExponential {
    pub fn new(beta: f64) -> Result<Self, MeasureError> {
        if !(beta > 0.0) {
            return Err(MeasureError::InvalidParameter(format!(
                "beta = {beta} must be positive"
            )));
        }
        Ok(LineExponential { beta })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Mass of `[a, b)`; `b = ∞` allowed.
    pub fn interval(&self, a: f64, b: f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        (-self.beta * a).exp() - (-self.beta * b).exp()
    }

    pub fn log_density(&self, t: f64) -> f64 {
        self.beta.ln() - self.beta * t
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_is_a_probability_on_the_half_line() {
        let m = LineExponential::new(0.9).unwrap();
        assert!((m.interval(0.0, f64::INFINITY) - 1.0).abs() < 1e-15);
        let e = m.interval(0.0, 1.0);
        assert!((m.interval(1.0, 2.0) - (-0.9f64).exp() * e).abs() < 1e-15);
    }

    #[test]
    fn circle_density_normalizes() {
        let m = CircleDensity::new(StepFunction::two_valued(0.25, 3.0, 1.0), 1.0).unwrap();
        assert!((m.interval(0.0, 1.0) - 1.0).abs() < 1e-15);
        assert!((m.interval(0.0, 0.25) - 0.5).abs() < 1e-15);
        assert!(CircleDensity::new(StepFunction::constant(-1.0), 1.0).is_err());
    }
}

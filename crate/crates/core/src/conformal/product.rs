use num_traits::{One, Zero};
use serde::Serialize;

use super::Cylinder;
use crate::error::MeasureError;
use crate::scalar::{Rational, Scalar};

/// i.i.d. measure on Ω with `P(x_k = 1) = p` at every coordinate, tied to
/// β through `(1−p)/p = e^β`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DyadicProduct {
    #[serde(serialize_with = "super::serialize_display")]
    p: Rational,
    beta: f64,
}

impl DyadicProduct {
    /// Product measure whose β is read off from `p`.
    pub fn new(p: Rational) -> Result<Self, MeasureError> {
        let half = Rational::new(1.into(), 2.into());
        if p <= Rational::zero() || p >= half {
            return Err(MeasureError::InvalidParameter(format!(
                "p = {p} must lie in (0, 1/2)"
            )));
        }
        let beta = ((Rational::one() - &p) / &p).as_f64().ln();
        Ok(DyadicProduct { p, beta })
    }

    /// Checks the defining relation `(1−p)/p = e^β` against a given β.
    pub fn with_beta(p: Rational, beta: f64) -> Result<Self, MeasureError> {
        let m = DyadicProduct::new(p)?;
        if (m.beta - beta).abs() > 1e-12 * beta.abs().max(1.0) {
            return Err(MeasureError::InvalidParameter(format!(
                "(1-p)/p = e^{} does not match beta = {beta}",
                m.beta
            )));
        }
        Ok(m)
    }

    pub fn p(&self) -> &Rational {
        &self.p
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn exact_mass(&self, c: &Cylinder) -> Rational {
        if c.is_empty() {
            return Rational::zero();
        }
        let q = Rational::one() - &self.p;
        c.constraints().values().fold(Rational::one(), |acc, &b| {
            acc * if b { &self.p } else { &q }
        })
    }

    pub fn mass(&self, c: &Cylinder) -> f64 {
        if c.is_empty() {
            return 0.0;
        }
        let p = self.p.as_f64();
        c.constraints()
            .values()
            .map(|&b| if b { p } else { 1.0 - p })
            .product()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rational;

    #[test]
    fn cylinder_masses() {
        let m = DyadicProduct::new(rational(1, 3)).unwrap();
        assert_eq!(m.exact_mass(&Cylinder::new([(1, false)])), rational(2, 3));
        assert_eq!(
            m.exact_mass(&Cylinder::new([(1, true), (2, false)])),
            rational(2, 9)
        );
        assert_eq!(m.exact_mass(&Cylinder::whole()), rational(1, 1));
        assert!((m.beta() - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn relation_is_checked() {
        assert!(DyadicProduct::with_beta(rational(1, 3), 2f64.ln()).is_ok());
        assert!(DyadicProduct::with_beta(rational(1, 3), 1.0).is_err());
        assert!(DyadicProduct::new(rational(1, 2)).is_err());
    }
}

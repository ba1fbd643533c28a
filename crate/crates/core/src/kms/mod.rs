//! The *-algebra spanned by `f·w_s` over the unit space of hereditary sets,
//! and the state families evaluated on it.

mod element;
mod function;
mod state;

use std::fmt::Debug;
use std::ops::Neg;

use num_complex::{Complex, Complex64};
use num_traits::{Num, ToPrimitive};

use crate::scalar::{rational, Rational};

pub use element::{random_element, AlgebraElement};
pub use function::{Constraints, CylinderFunction};
pub use state::{
    evaluate_state, verify_kms, CircleMeasure, KmsReport, StateDescriptor, TorusMeasure,
};

/// Coefficient field of cylinder functions: `Complex64`, or exact
/// `Complex<Rational>`.
pub trait Coeff:
    Clone + Debug + PartialEq + Num + Neg<Output = Self> + Send + Sync + 'static
{
    fn conj(&self) -> Self;
    fn to_c64(&self) -> Complex64;
    /// `(re + i·im) / den`
    fn small(re: i64, im: i64, den: i64) -> Self;
    fn render(&self) -> String;
}

fn render_parts(re: String, im: String, re_zero: bool, im_zero: bool, im_negative: bool) -> String {
    match (re_zero, im_zero) {
        (_, true) => re,
        (true, false) if im == "1" => "i".into(),
        (true, false) if im == "-1" => "-i".into(),
        (true, false) => format!("{im}i"),
        (false, false) => {
            let sign = if im_negative { "" } else { "+" };
            format!("({re}{sign}{im}i)")
        }
    }
}

impl Coeff for Complex64 {
    fn conj(&self) -> Self {
        Complex::conj(self)
    }
    fn to_c64(&self) -> Complex64 {
        *self
    }
    fn small(re: i64, im: i64, den: i64) -> Self {
        Complex64::new(re as f64 / den as f64, im as f64 / den as f64)
    }
    fn render(&self) -> String {
        render_parts(
            self.re.to_string(),
            self.im.to_string(),
            self.re == 0.0,
            self.im == 0.0,
            self.im < 0.0,
        )
    }
}

impl Coeff for Complex<Rational> {
    fn conj(&self) -> Self {
        Complex::conj(self)
    }
    fn to_c64(&self) -> Complex64 {
        Complex64::new(
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }
    fn small(re: i64, im: i64, den: i64) -> Self {
        Complex::new(rational(re, den), rational(im, den))
    }
    fn render(&self) -> String {
        use num_traits::{Signed, Zero};
        render_parts(
            self.re.to_string(),
            self.im.to_string(),
            self.re.is_zero(),
            self.im.is_zero(),
            self.im.is_negative(),
        )
    }
}

/// Exact complex rational coefficient.
pub type ExactCoeff = Complex<Rational>;

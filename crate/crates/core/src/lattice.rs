//! The lattice ℤ², its positive cone ℕ², the homomorphism `c`, and the
//! unimodular transport used for rational θ.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_integer::Integer;
use serde::Serialize;

use crate::error::LatticeError;
use crate::scalar::Scalar;

/// `a·e₁ + b·e₂` with `e₁ = (1,0)`, `e₂ = (0,1)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct GroupElement {
    pub a: i64,
    pub b: i64,
}

impl GroupElement {
    pub const ZERO: GroupElement = GroupElement { a: 0, b: 0 };
    pub const E1: GroupElement = GroupElement { a: 1, b: 0 };
    pub const E2: GroupElement = GroupElement { a: 0, b: 1 };
    /// `v₁ = e₁`
    pub const V1: GroupElement = GroupElement { a: 1, b: 0 };
    /// `v₂ = e₁ + e₂`
    pub const V2: GroupElement = GroupElement { a: 1, b: 1 };

    pub const fn new(a: i64, b: i64) -> Self {
        GroupElement { a, b }
    }

    /// Coordinates `(m, n)` with `self = m·v₁ + n·v₂`.
    pub fn to_v_coords(self) -> (i64, i64) {
        (self.a - self.b, self.b)
    }

    pub fn from_v_coords(m: i64, n: i64) -> Self {
        GroupElement { a: m + n, b: n }
    }

    pub fn is_zero(self) -> bool {
        self.a == 0 && self.b == 0
    }

    /// Membership in ℕ².
    pub fn in_cone(self) -> bool {
        self.a >= 0 && self.b >= 0
    }

    /// Membership in −ℕ².
    pub fn in_negative_cone(self) -> bool {
        self.a <= 0 && self.b <= 0
    }

    /// Componentwise order: `self ≤ other` iff `other − self ∈ ℕ²`.
    pub fn le_cone(self, other: GroupElement) -> bool {
        (other - self).in_cone()
    }

    /// All elements of the square `[-r, r]²`, row-major.
    pub fn square(r: i64) -> impl Iterator<Item = GroupElement> {
        (-r..=r).flat_map(move |a| (-r..=r).map(move |b| GroupElement::new(a, b)))
    }
}

impl Add for GroupElement {
    type Output = GroupElement;
    fn add(self, o: GroupElement) -> GroupElement {
        GroupElement::new(self.a + o.a, self.b + o.b)
    }
}

impl Sub for GroupElement {
    type Output = GroupElement;
    fn sub(self, o: GroupElement) -> GroupElement {
        GroupElement::new(self.a - o.a, self.b - o.b)
    }
}

impl Neg for GroupElement {
    type Output = GroupElement;
    fn neg(self) -> GroupElement {
        GroupElement::new(-self.a, -self.b)
    }
}

impl Mul<GroupElement> for i64 {
    type Output = GroupElement;
    fn mul(self, s: GroupElement) -> GroupElement {
        GroupElement::new(self * s.a, self * s.b)
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.a, self.b)
    }
}

/// Inverse temperature β together with `θ = c(e₂)`; `c(e₁) = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct Potential<S> {
    pub beta: S,
    pub theta: S,
}

impl<S: Scalar> Potential<S> {
    pub fn new(beta: S, theta: S) -> Self {
        Potential { beta, theta }
    }

    /// Working significand bits; `None` for exact scalars.
    pub fn precision(&self) -> Option<u32> {
        S::SIGNIFICAND_BITS
    }

    pub fn c(&self, s: GroupElement) -> S {
        c_value(s, self)
    }

    pub fn to_f64(&self) -> Potential<f64> {
        Potential::new(self.beta.as_f64(), self.theta.as_f64())
    }

    /// `1 + θ = c(v₂)`
    pub fn one_plus_theta(&self) -> S {
        S::one() + self.theta.clone()
    }
}

/// `c(a,b) = a + bθ`.
pub fn c_value<S: Scalar>(s: GroupElement, pot: &Potential<S>) -> S {
    S::from_int(s.a) + S::from_int(s.b) * pot.theta.clone()
}

/// Matrix `[[x, y], [z, w]]` of the map φ with φ(e₁) = (x, z), φ(e₂) = (y, w).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TransportMatrix {
    pub x: u64,
    pub y: u64,
    pub z: u64,
    pub w: u64,
}

impl TransportMatrix {
    pub fn det(&self) -> i128 {
        self.x as i128 * self.w as i128 - self.y as i128 * self.z as i128
    }

    pub fn apply(&self, s: GroupElement) -> GroupElement {
        GroupElement::new(
            self.x as i64 * s.a + self.y as i64 * s.b,
            self.z as i64 * s.a + self.w as i64 * s.b,
        )
    }

    /// `c₁(φ(s))`, the θ = 1 homomorphism after transport.
    pub fn transported_c(&self, s: GroupElement) -> i64 {
        let t = self.apply(s);
        t.a + t.b
    }
}

/// Unimodular matrix carrying `c_θ` (θ = p/q) to `q · c₁`.
///
/// For `q ≥ 2`, `x` is the least positive solution of `xp ≡ 1 (mod q)`.
pub fn sl2_transport(p: i64, q: i64) -> Result<TransportMatrix, LatticeError> {
    if p <= 0 || q <= 0 {
        return Err(LatticeError::NonPositive { p, q });
    }
    if p.gcd(&q) != 1 {
        return Err(LatticeError::NotCoprime { p, q });
    }
    let (p, q) = (p as u64, q as u64);
    if q == 1 {
        return Ok(TransportMatrix {
            x: 1,
            y: p - 1,
            z: 0,
            w: 1,
        });
    }
    let x = (1..q)
        .find(|&x| (x as u128 * p as u128) % q as u128 == 1)
        .expect("p is invertible mod q");
    let y = (x * p - 1) / q;
    Ok(TransportMatrix {
        x,
        y,
        z: q - x,
        w: p - y,
    })
}

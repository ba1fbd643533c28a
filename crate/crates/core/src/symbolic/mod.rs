//! Points of Ω = {0,1}^ℤ, the shift, the potential χ and the ℤ²-action on
//! Ω×ℤ that parametrizes the universal unit space.

mod biseq;

use std::collections::BTreeSet;

pub use biseq::BiSeq;

use crate::lattice::{GroupElement, Potential};
use crate::scalar::Scalar;

/// τᵏx
pub fn shift(x: &BiSeq, k: i64) -> BiSeq {
    x.shift(k)
}

/// `χ(x) = 1` if `x₋₁ = 0`, else `−θ`.
pub fn chi<S: Scalar>(x: &BiSeq, pot: &Potential<S>) -> S {
    if x.bit(-1) {
        -pot.theta.clone()
    } else {
        S::one()
    }
}

/// Birkhoff sum `Sₙ(χ)(x)` in closed form.
pub fn birkhoff<S: Scalar>(x: &BiSeq, n: i64, pot: &Potential<S>) -> S {
    match n {
        0 => S::zero(),
        n if n > 0 => S::from_int(n) - pot.one_plus_theta() * S::from_int(x.ones(-n, 0)),
        n => S::from_int(n) + pot.one_plus_theta() * S::from_int(x.ones(0, -n)),
    }
}

/// Point `(x, t)` of Ω×ℤ.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OmegaZPoint {
    pub x: BiSeq,
    pub t: i64,
}

impl OmegaZPoint {
    pub fn new(x: BiSeq, t: i64) -> Self {
        OmegaZPoint { x, t }
    }

    /// Whether the point lies in `X_u = Ω×ℕ`.
    pub fn in_unit_space(&self) -> bool {
        self.t >= 0
    }
}

/// `a_m`: `t − (x₀+…+x_{m−1})` for `m > 0`, `t + (x₋₁+…+x_m)` for `m < 0`.
pub fn profile(pt: &OmegaZPoint, m: i64) -> i64 {
    if m >= 0 {
        pt.t - pt.x.ones(0, m)
    } else {
        pt.t + pt.x.ones(m, 0)
    }
}

/// Membership of `s` in the hereditary set `A(x, t) = {m v₁ + n v₂ : n ≤ a_m}`.
pub fn in_hereditary_set(pt: &OmegaZPoint, s: GroupElement) -> bool {
    let (m, n) = s.to_v_coords();
    n <= profile(pt, m)
}

/// The ℤ²-action: `(x,t)+v₁ = (τx, t+x₋₁)`, `(x,t)+v₂ = (x, t+1)`.
pub fn act(pt: &OmegaZPoint, s: GroupElement) -> OmegaZPoint {
    let (m, n) = s.to_v_coords();
    let gain = if m >= 0 {
        pt.x.ones(-m, 0)
    } else {
        -pt.x.ones(0, -m)
    };
    OmegaZPoint {
        x: pt.x.shift(m),
        t: pt.t + gain + n,
    }
}

/// Checks `A(pt + s) = A(pt) + s` on the square `[-window, window]²`.
pub fn equivariance_check(pt: &OmegaZPoint, s: GroupElement, window: i64) -> bool {
    let moved = act(pt, s);
    GroupElement::square(window)
        .all(|u| in_hereditary_set(&moved, u) == in_hereditary_set(pt, u - s))
}

/// Generator `p·v₁ − K·v₂` of the stabilizer when `x` has minimal period `p`
/// with `K` ones per period.
pub fn stabilizer_of(pt: &OmegaZPoint) -> Option<GroupElement> {
    let p = pt.x.is_periodic()? as i64;
    let k = pt.x.ones(0, p);
    Some(GroupElement::from_v_coords(p, -k))
}

/// `Q_y ∩ [-window, window]² = {s : y − s ∈ Ω×ℕ}`.
pub fn q_set(pt: &OmegaZPoint, window: i64) -> BTreeSet<GroupElement> {
    GroupElement::square(window)
        .filter(|&s| act(pt, -s).t >= 0)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rational, Rational};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn exact(theta: Rational) -> Potential<Rational> {
        Potential::new(rational(1, 1), theta)
    }

    #[test]
    fn chi_examples() {
        let pot = Potential::new(1.0, 0.7);
        assert_eq!(chi(&BiSeq::constant(false), &pot), 1.0);
        assert_eq!(chi(&BiSeq::constant(true), &pot), -0.7);
        assert_eq!(chi(&BiSeq::constant(true), &Potential::new(1.0, 0.0)), 0.0);
    }

    #[test]
    fn birkhoff_examples() {
        let pot = exact(rational(2, 3));
        assert_eq!(birkhoff(&BiSeq::step(), 0, &pot), rational(0, 1));
        assert_eq!(
            birkhoff(&BiSeq::constant(true), 1, &exact(rational(0, 1))),
            rational(0, 1)
        );
        assert_eq!(birkhoff(&BiSeq::step(), -3, &pot), rational(2, 1));
    }

    #[test]
    fn birkhoff_matches_summing_chi_along_the_orbit() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let pot = exact(rational(3, 5));
        for _ in 0..50 {
            let x = BiSeq::random(&mut rng, 4, 5);
            let mut s = rational(0, 1);
            for n in 1..25 {
                s += chi(&x.shift(n - 1), &pot);
                assert_eq!(birkhoff(&x, n, &pot), s);
            }
            let mut s = rational(0, 1);
            for n in 1..25 {
                s -= chi(&x.shift(-n), &pot);
                assert_eq!(birkhoff(&x, -n, &pot), s);
            }
        }
    }

    #[test]
    fn profile_examples() {
        let zeros = OmegaZPoint::new(BiSeq::constant(false), 5);
        assert!((-7..7).all(|m| profile(&zeros, m) == 5));
        let ones = OmegaZPoint::new(BiSeq::constant(true), 0);
        assert_eq!(profile(&ones, 3), -3);
        assert_eq!(profile(&ones, -3), 3);
    }

    #[test]
    fn hereditary_membership_examples() {
        let ones = OmegaZPoint::new(BiSeq::constant(true), 0);
        assert!(in_hereditary_set(&ones, -GroupElement::E2));
        assert!(!in_hereditary_set(&ones, GroupElement::E1));
        let zeros = OmegaZPoint::new(BiSeq::constant(false), 0);
        assert!(in_hereditary_set(&zeros, GroupElement::ZERO));
        // the formula gives A(1̄,0) = {first e-coordinate ≤ 0}
        for s in GroupElement::square(6) {
            assert_eq!(in_hereditary_set(&ones, s), s.a <= 0);
        }
    }

    #[test]
    fn action_examples() {
        let x: BiSeq = "(01)* 1 . 0 (1)*".parse().unwrap();
        let pt = OmegaZPoint::new(x, 0);
        assert_eq!(act(&pt, GroupElement::ZERO), pt);
        let ones = OmegaZPoint::new(BiSeq::constant(true), 0);
        assert_eq!(
            act(&ones, GroupElement::V1),
            OmegaZPoint::new(BiSeq::constant(true), 1)
        );
        assert_eq!(act(&act(&pt, GroupElement::V1), -GroupElement::V1), pt);
    }

    #[test]
    fn equivariance_examples() {
        let ones = OmegaZPoint::new(BiSeq::constant(true), 0);
        assert!(equivariance_check(&ones, GroupElement::ZERO, 6));
        assert!(equivariance_check(&ones, GroupElement::V2, 6));
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..200 {
            let pt = OmegaZPoint::new(BiSeq::random(&mut rng, 3, 4), rng.random_range(-5..5));
            let s = GroupElement::new(rng.random_range(-6..6), rng.random_range(-6..6));
            assert!(equivariance_check(&pt, s, 8));
        }
    }

    #[test]
    fn stabilizer_examples() {
        let ones = OmegaZPoint::new(BiSeq::constant(true), 0);
        assert_eq!(stabilizer_of(&ones), Some(-GroupElement::E2));
        assert_eq!(stabilizer_of(&OmegaZPoint::new(BiSeq::step(), 0)), None);
        let alt = OmegaZPoint::new(BiSeq::periodic(&[false, true]), 3);
        let g = stabilizer_of(&alt).unwrap();
        assert_eq!(g, GroupElement::from_v_coords(2, -1));
        assert_eq!(act(&alt, g), alt);
    }

    #[test]
    fn q_set_examples() {
        let ones = OmegaZPoint::new(BiSeq::constant(true), 0);
        let q = q_set(&ones, 4);
        assert!(q.contains(&GroupElement::ZERO));
        assert!(!q.contains(&GroupElement::V2));
        let x = OmegaZPoint::new("(10)* 0 . 11 (0)*".parse().unwrap(), 2);
        for s in GroupElement::square(3) {
            let moved = act(&x, s);
            let (qa, qb) = (q_set(&x, 8), q_set(&moved, 8));
            for u in GroupElement::square(4) {
                assert_eq!(qb.contains(&(u + s)), qa.contains(&u));
            }
        }
    }
}

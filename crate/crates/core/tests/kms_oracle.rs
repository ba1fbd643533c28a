//! Algebra identities cross-checked against the groupoid picture: an element
//! is a function on arrows `(A, u)`, product is convolution, adjoint is
//! `a*(A,u) = conj a(A+u, −u)`.

use kmslab_core::kms::{random_element, AlgebraElement, Coeff, CylinderFunction, ExactCoeff};
use kmslab_core::symbolic::in_hereditary_set;
use kmslab_core::{BiSeq, GroupElement, OmegaZPoint};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A unit of the groupoid translated by `offset`.
#[derive(Clone, Debug)]
enum Set {
    Point(OmegaZPoint, GroupElement),
    Full,
}

impl Set {
    fn contains(&self, w: GroupElement) -> bool {
        match self {
            Set::Point(pt, off) => in_hereditary_set(pt, w - *off),
            Set::Full => true,
        }
    }

    fn translate(&self, v: GroupElement) -> Set {
        match self {
            Set::Point(pt, off) => Set::Point(pt.clone(), *off + v),
            Set::Full => Set::Full,
        }
    }
}

fn fn_at<C: Coeff>(f: &CylinderFunction<C>, a: &Set) -> C {
    f.terms()
        .filter(|(k, _)| k.iter().all(|(&u, &bit)| a.contains(u) == bit))
        .fold(C::zero(), |acc, (_, c)| acc + c.clone())
}

/// `a(A, u) = f_{−u}(A)·[−u ∈ A]`.
fn arrow<C: Coeff>(a: &AlgebraElement<C>, set: &Set, u: GroupElement) -> C {
    match a.summand(-u) {
        Some(f) if set.contains(-u) => fn_at(f, set),
        _ => C::zero(),
    }
}

fn convolve<C: Coeff>(
    a: &AlgebraElement<C>,
    b: &AlgebraElement<C>,
    set: &Set,
    u: GroupElement,
) -> C {
    a.summands()
        .map(|(&s, _)| arrow(a, set, -s) * arrow(b, &set.translate(-s), u + s))
        .fold(C::zero(), |acc, x| acc + x)
}

/// Only `(A, u)` with `−u ∈ A` are arrows: both ends then contain 0.
fn star<C: Coeff>(a: &AlgebraElement<C>, set: &Set, u: GroupElement) -> C {
    if !set.contains(-u) {
        return C::zero();
    }
    arrow(a, &set.translate(u), -u).conj()
}

fn random_sets(rng: &mut ChaCha8Rng, n: usize) -> Vec<Set> {
    let mut out = vec![Set::Full];
    while out.len() < n {
        let x = BiSeq::random(rng, 4, 8);
        out.push(Set::Point(
            OmegaZPoint::new(x, rng.random_range(0..6)),
            GroupElement::ZERO,
        ));
    }
    out
}

/// Arrows worth probing: every `−s` with `s` within reach of the supports.
fn arrows() -> impl Iterator<Item = GroupElement> {
    GroupElement::square(4)
}

fn close(a: Complex64, b: Complex64) -> bool {
    (a - b).norm() <= 1e-12
}

fn elements<C: Coeff>(seed: u64, n: usize) -> (Vec<AlgebraElement<C>>, Vec<Set>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let els = (0..n).map(|_| random_element(&mut rng)).collect();
    (els, random_sets(&mut rng, 100))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn product_is_convolution(seed in any::<u64>()) {
        let (e, sets) = elements::<Complex64>(seed, 2);
        let ab = e[0].mul(&e[1]);
        for set in &sets {
            for u in arrows() {
                prop_assert!(close(arrow(&ab, set, u), convolve(&e[0], &e[1], set, u)), "{} / {} at {u}", e[0], e[1]);
            }
        }
    }

    #[test]
    fn adjoint_is_groupoid_inverse(seed in any::<u64>()) {
        let (e, sets) = elements::<Complex64>(seed, 1);
        let a = &e[0];
        let s = a.adjoint();
        for set in &sets {
            for u in arrows() {
                prop_assert!(close(arrow(&s, set, u), star(a, set, u)));
            }
        }
    }

    #[test]
    fn exact_identities(seed in any::<u64>()) {
        let (e, sets) = elements::<ExactCoeff>(seed, 3);
        let (a, b, c) = (&e[0], &e[1], &e[2]);
        let left = a.mul(&b.mul(c));
        let right = a.mul(b).mul(c);
        let ab_star = a.mul(b).adjoint();
        let ba = b.adjoint().mul(&a.adjoint());
        prop_assert_eq!(&a.adjoint().adjoint(), a);
        for set in &sets {
            for u in arrows() {
                prop_assert_eq!(arrow(&left, set, u), arrow(&right, set, u));
                prop_assert_eq!(arrow(&ab_star, set, u), arrow(&ba, set, u));
                prop_assert_eq!(arrow(&a.mul(b), set, u), convolve(a, b, set, u));
            }
        }
    }

    #[test]
    fn covariance(seed in any::<u64>(), sa in -3i64..=3, sb in -3i64..=3) {
        let (e, sets) = elements::<ExactCoeff>(seed, 1);
        let s = GroupElement::new(sa, sb);
        let eps = CylinderFunction::epsilon(s);
        for (_, f) in e[0].summands() {
            let lhs = f.r_shift(-s).r_shift(s).mul(&eps);
            let rhs = f.mul(&eps);
            for set in &sets {
                prop_assert_eq!(fn_at(&lhs, set), fn_at(&rhs, set));
            }
            // w_s f w_s* = R_s(f)
            let conj = AlgebraElement::w(s).mul(&AlgebraElement::spanning(f.clone(), GroupElement::ZERO)).mul(&AlgebraElement::w(s).adjoint());
            let shifted = AlgebraElement::spanning(f.r_shift(s), GroupElement::ZERO);
            for set in &sets {
                prop_assert_eq!(arrow(&conj, set, GroupElement::ZERO), arrow(&shifted, set, GroupElement::ZERO));
            }
        }
    }

    #[test]
    fn isometries(a in 0i64..=4, b in 0i64..=4) {
        let s = GroupElement::new(a, b);
        let w = AlgebraElement::<ExactCoeff>::w(s);
        prop_assert_eq!(w.adjoint().mul(&w), AlgebraElement::identity());
        prop_assert_eq!(w.mul(&w.adjoint()), AlgebraElement::spanning(CylinderFunction::epsilon(s), GroupElement::ZERO));
    }
}

#[test]
fn exact_and_float_modes_agree() {
    let (e, sets) = elements::<ExactCoeff>(77, 2);
    let ab = e[0].mul(&e[1]);
    let ab64 = e[0].to_c64().mul(&e[1].to_c64());
    for set in &sets {
        for u in arrows() {
            assert!(close(arrow(&ab, set, u).to_c64(), arrow(&ab64, set, u)));
        }
    }
}

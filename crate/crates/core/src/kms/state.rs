use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::element::{random_element, AlgebraElement};
use super::function::{Constraints, CylinderFunction};
use super::Coeff;
use crate::conformal::{AtomicOrbit, ConformalMeasure};
use crate::error::KmsError;
use crate::lattice::{GroupElement, Potential};
use crate::symbolic::{profile, BiSeq, OmegaZPoint};

/// Atoms plus a multiple of Haar measure on 𝕋; atoms are given by their
/// angle in turns.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CircleMeasure {
    atoms: Vec<(f64, f64)>,
    haar: f64,
}

/// Atoms plus a multiple of Haar measure on 𝕋².
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TorusMeasure {
    atoms: Vec<([f64; 2], f64)>,
    haar: f64,
}

fn check_probability(weights: impl Iterator<Item = f64>, haar: f64) -> Result<(), KmsError> {
    let mut total = haar;
    if !(haar >= 0.0) {
        return Err(KmsError::VariantMismatch(format!(
            "Haar weight {haar} is negative"
        )));
    }
    for w in weights {
        if !(w >= 0.0) {
            return Err(KmsError::VariantMismatch(format!(
                "atom weight {w} is negative"
            )));
        }
        total += w;
    }
    if (total - 1.0).abs() > 1e-12 {
        return Err(KmsError::VariantMismatch(format!(
            "total mass {total} is not 1"
        )));
    }
    Ok(())
}

impl CircleMeasure {
    pub fn new(atoms: Vec<(f64, f64)>, haar: f64) -> Result<Self, KmsError> {
        check_probability(atoms.iter().map(|a| a.1), haar)?;
        Ok(CircleMeasure { atoms, haar })
    }

    pub fn haar() -> Self {
        CircleMeasure {
            atoms: vec![],
            haar: 1.0,
        }
    }

    /// Point mass at `e^{2πi·angle}`.
    pub fn point(angle: f64) -> Self {
        CircleMeasure {
            atoms: vec![(angle, 1.0)],
            haar: 0.0,
        }
    }

    /// `∫ zⁿ dμ`
    pub fn moment(&self, n: i64) -> Complex64 {
        let atoms: Complex64 = self
            .atoms
            .iter()
            .map(|&(a, w)| w * Complex64::from_polar(1.0, TAU * a * n as f64))
            .sum();
        atoms + if n == 0 { self.haar } else { 0.0 }
    }
}

impl TorusMeasure {
    pub fn new(atoms: Vec<([f64; 2], f64)>, haar: f64) -> Result<Self, KmsError> {
        check_probability(atoms.iter().map(|a| a.1), haar)?;
        Ok(TorusMeasure { atoms, haar })
    }

    pub fn haar() -> Self {
        TorusMeasure {
            atoms: vec![],
            haar: 1.0,
        }
    }

    pub fn point(angles: [f64; 2]) -> Self {
        TorusMeasure {
            atoms: vec![(angles, 1.0)],
            haar: 0.0,
        }
    }

    /// `∫ z₁ᵃ z₂ᵇ dμ₂`
    pub fn moment(&self, s: GroupElement) -> Complex64 {
        let atoms: Complex64 = self
            .atoms
            .iter()
            .map(|&([x, y], w)| {
                w * Complex64::from_polar(1.0, TAU * (x * s.a as f64 + y * s.b as f64))
            })
            .sum();
        atoms + if s.is_zero() { self.haar } else { 0.0 }
    }
}

/// Probability on `Ω×ℕ` of the form `Σ_y w_y δ_y ⊗ (1−q)Σ_t qᵗ δ_t`.
#[derive(Clone, Debug, Serialize)]
pub struct LevelMeasure {
    #[serde(skip)]
    points: Vec<(BiSeq, f64)>,
    beta: f64,
    theta: f64,
    q: f64,
    tail: f64,
}

impl LevelMeasure {
    fn from_orbit(o: &AtomicOrbit, q: f64) -> Self {
        LevelMeasure {
            points: o.points().map(|(n, w)| (o.base().shift(n), w)).collect(),
            beta: o.beta(),
            theta: o.theta(),
            q,
            tail: o.tail_bound(),
        }
    }

    /// Mass of `{(y,t) : t ≥ 0, constraints hold at A(y,t)}`.
    ///
    /// `u = (m,n)_v ∈ A(y,t)` iff `t ≥ n − a_m(y,0)`, so each term cuts out an
    /// interval of levels and the level sum is a difference of two powers of `q`.
    fn term_mass(&self, k: &Constraints) -> f64 {
        let ln_q = self.q.ln();
        self.points
            .iter()
            .map(|(y, w)| {
                let origin = OmegaZPoint::new(y.clone(), 0);
                let (mut lo, mut hi) = (0i64, i64::MAX);
                for (u, &bit) in k {
                    let (m, n) = u.to_v_coords();
                    let threshold = n - profile(&origin, m);
                    if bit {
                        lo = lo.max(threshold);
                    } else {
                        hi = hi.min(threshold);
                    }
                }
                if hi <= lo {
                    0.0
                } else if hi == i64::MAX {
                    w * (lo as f64 * ln_q).exp()
                } else {
                    w * ((lo as f64 * ln_q).exp() - (hi as f64 * ln_q).exp())
                }
            })
            .sum()
    }

    fn integrate<C: Coeff>(
        &self,
        f: &CylinderFunction<C>,
        tol: f64,
        label: GroupElement,
    ) -> Result<Complex64, KmsError> {
        let weight: f64 = f.terms().map(|(_, c)| c.to_c64().norm()).sum();
        if self.tail * weight > tol {
            return Err(KmsError::UncertifiedTail(format!(
                "w{label}: truncated orbit mass {:e} times coefficient weight {weight} exceeds {tol:e}",
                self.tail
            )));
        }
        Ok(f.terms().map(|(k, c)| c.to_c64() * self.term_mass(k)).sum())
    }
}

/// The four implemented state families.
#[derive(Clone, Debug, Serialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum StateDescriptor {
    /// `ω(a) = ∫ E(a) dm̄` for a lifted atomic conformal measure.
    CondExp { measure: LevelMeasure },
    /// Periodic orbit with stabilizer `ℤ·generator` and a character on it.
    TypeI {
        measure: LevelMeasure,
        generator: GroupElement,
        character: [f64; 2],
    },
    /// θ = 0: `δ_{a,0} μ̂(b) · (1−e^{−β})Σ_k e^{−βk} f(A(1̲,k))`.
    ThetaZero { mu: CircleMeasure },
    /// β = 0: `f(ℤ²) · μ̂₂(s)`.
    Tracial { mu2: TorusMeasure },
}

fn lifted_orbit(m: &ConformalMeasure) -> Result<(&AtomicOrbit, f64), KmsError> {
    match m {
        ConformalMeasure::Lifted(l) => match l.inner() {
            ConformalMeasure::AtomicOrbit(o) => Ok((o, l.q())),
            other => Err(KmsError::VariantMismatch(format!(
                "lift of {} is not evaluated",
                other.variant_name()
            ))),
        },
        other => Err(KmsError::VariantMismatch(format!(
            "expected a lifted measure, got {}",
            other.variant_name()
        ))),
    }
}

impl StateDescriptor {
    pub fn cond_exp(m: &ConformalMeasure) -> Result<Self, KmsError> {
        let (o, q) = lifted_orbit(m)?;
        Ok(StateDescriptor::CondExp {
            measure: LevelMeasure::from_orbit(o, q),
        })
    }

    /// `character` is the value `z` on the stabilizer generator, `|z| = 1`.
    pub fn type_one(m: &ConformalMeasure, character: Complex64) -> Result<Self, KmsError> {
        let (o, q) = lifted_orbit(m)?;
        if o.period().is_none() {
            return Err(KmsError::VariantMismatch(
                "orbit is not periodic, stabilizer is trivial".into(),
            ));
        }
        if (character.norm() - 1.0).abs() > 1e-12 {
            return Err(KmsError::VariantMismatch(format!(
                "character value {character} is not unimodular"
            )));
        }
        let p = o.period().unwrap() as i64;
        let generator = GroupElement::from_v_coords(p, -o.base().ones(0, p));
        let c = generator.a as f64 + generator.b as f64 * o.theta();
        if c.abs() > 1e-12 {
            return Err(KmsError::VariantMismatch(format!(
                "stabilizer generator {generator} has c = {c}, not 0"
            )));
        }
        Ok(StateDescriptor::TypeI {
            measure: LevelMeasure::from_orbit(o, q),
            generator,
            character: [character.re, character.im],
        })
    }

    pub fn theta_zero(mu: CircleMeasure) -> Self {
        StateDescriptor::ThetaZero { mu }
    }

    pub fn tracial(mu2: TorusMeasure) -> Self {
        StateDescriptor::Tracial { mu2 }
    }

    pub fn family(&self) -> &'static str {
        match self {
            StateDescriptor::CondExp { .. } => "cond-exp",
            StateDescriptor::TypeI { .. } => "type-i",
            StateDescriptor::ThetaZero { .. } => "theta-zero",
            StateDescriptor::Tracial { .. } => "tracial",
        }
    }
}

fn check_potential(m: &LevelMeasure, pot: &Potential<f64>) -> Result<(), KmsError> {
    if (m.beta - pot.beta).abs() > 1e-12 || (m.theta - pot.theta).abs() > 1e-12 {
        return Err(KmsError::VariantMismatch(format!(
            "measure built for beta={}, theta={} but evaluated at beta={}, theta={}",
            m.beta, m.theta, pot.beta, pot.theta
        )));
    }
    Ok(())
}

/// `k` with `s = k·g`, if any.
fn multiple_of(s: GroupElement, g: GroupElement) -> Option<i64> {
    let k = if g.a != 0 { s.a / g.a } else { s.b / g.b };
    (k * g == s).then_some(k)
}

/// `ω(a)` for the given state.
pub fn evaluate_state<C: Coeff>(
    st: &StateDescriptor,
    a: &AlgebraElement<C>,
    pot: &Potential<f64>,
    tol: f64,
) -> Result<Complex64, KmsError> {
    match st {
        StateDescriptor::CondExp { measure } => {
            check_potential(measure, pot)?;
            match a.summand(GroupElement::ZERO) {
                Some(f) => measure.integrate(f, tol, GroupElement::ZERO),
                None => Ok(Complex64::new(0.0, 0.0)),
            }
        }
        StateDescriptor::TypeI {
            measure,
            generator,
            character,
        } => {
            check_potential(measure, pot)?;
            let zbar = Complex64::new(character[0], -character[1]);
            let mut total = Complex64::new(0.0, 0.0);
            for (&s, f) in a.summands() {
                if let Some(k) = multiple_of(s, *generator) {
                    total += zbar.powi(k as i32) * measure.integrate(f, tol, s)?;
                }
            }
            Ok(total)
        }
        StateDescriptor::ThetaZero { mu } => {
            if pot.theta != 0.0 || !(pot.beta > 0.0) {
                return Err(KmsError::VariantMismatch(format!(
                    "theta-zero state needs theta = 0 and beta > 0, got {}, {}",
                    pot.theta, pot.beta
                )));
            }
            let half_planes = LevelMeasure {
                points: vec![(BiSeq::constant(true), 1.0)],
                beta: pot.beta,
                theta: 0.0,
                q: (-pot.beta).exp(),
                tail: 0.0,
            };
            let mut total = Complex64::new(0.0, 0.0);
            for (&s, f) in a.summands() {
                if s.a == 0 {
                    total += mu.moment(s.b) * half_planes.integrate(f, tol, s)?;
                }
            }
            Ok(total)
        }
        StateDescriptor::Tracial { mu2 } => Ok(a
            .summands()
            .map(|(&s, f)| f.at_full_set().to_c64() * mu2.moment(s))
            .sum()),
    }
}

/// Outcome of [`verify_kms`].
#[derive(Clone, Debug, Serialize)]
pub struct KmsReport {
    pub family: String,
    pub trials: usize,
    pub tol: f64,
    /// Largest `|ω(ab) − ω(bσ_{iβ}(a))|` (tracial: `|ω(ab) − ω(ba)|`).
    pub max_deviation: f64,
    pub worst_pair: Option<(String, String)>,
    pub failures: usize,
    /// Smallest `Re ω(a*a)` over the sampled `a`.
    pub min_positivity: f64,
    /// Largest `|Im ω(a*a)|`.
    pub positivity_imag: f64,
    /// `|ω(1) − 1|`
    pub normalization_defect: f64,
    pub errors: Vec<String>,
}

impl KmsReport {
    pub fn passed(&self) -> bool {
        self.errors.is_empty()
            && self.failures == 0
            && self.max_deviation <= self.tol
            && self.min_positivity >= -self.tol
            && self.positivity_imag <= self.tol
            && self.normalization_defect <= self.tol
    }
}

struct Trial {
    deviation: f64,
    pair: (String, String),
    positivity: Complex64,
}

fn run_trial(
    st: &StateDescriptor,
    pot: &Potential<f64>,
    seed: u64,
    index: u64,
    tol: f64,
) -> Result<Trial, KmsError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    let a: AlgebraElement<Complex64> = random_element(&mut rng);
    let b: AlgebraElement<Complex64> = random_element(&mut rng);
    // scale tolerance passed to integrals so the tail certificate covers the product
    let inner_tol = tol / 4.0;
    let lhs = evaluate_state(st, &a.mul(&b), pot, inner_tol)?;
    let rhs = match st {
        StateDescriptor::Tracial { .. } => evaluate_state(st, &b.mul(&a), pot, inner_tol)?,
        _ => evaluate_state(st, &b.mul(&a.sigma_ibeta(pot)), pot, inner_tol)?,
    };
    let positivity = evaluate_state(st, &a.adjoint().mul(&a), pot, inner_tol)?;
    Ok(Trial {
        deviation: (lhs - rhs).norm(),
        pair: (a.to_string(), b.to_string()),
        positivity,
    })
}

/// Checks the KMS condition on `trials` random pairs, plus positivity on the
/// first element of each pair and normalization.
pub fn verify_kms(
    st: &StateDescriptor,
    pot: &Potential<f64>,
    trials: usize,
    seed: u64,
    tol: f64,
) -> KmsReport {
    let results: Vec<Result<Trial, KmsError>> = (0..trials as u64)
        .into_par_iter()
        .map(|i| run_trial(st, pot, seed, i, tol))
        .collect();
    let mut report = KmsReport {
        family: st.family().to_string(),
        trials,
        tol,
        max_deviation: 0.0,
        worst_pair: None,
        failures: 0,
        min_positivity: f64::INFINITY,
        positivity_imag: 0.0,
        normalization_defect: 0.0,
        errors: vec![],
    };
    for (i, r) in results.into_iter().enumerate() {
        match r {
            Ok(t) => {
                if t.deviation > tol {
                    report.failures += 1;
                }
                if t.deviation > report.max_deviation || report.worst_pair.is_none() {
                    report.max_deviation = report.max_deviation.max(t.deviation);
                    report.worst_pair = Some(t.pair);
                }
                report.min_positivity = report.min_positivity.min(t.positivity.re);
                report.positivity_imag = report.positivity_imag.max(t.positivity.im.abs());
            }
            Err(e) => report.errors.push(format!("trial {i}: {e}")),
        }
    }
    match evaluate_state(st, &AlgebraElement::<Complex64>::identity(), pot, tol) {
        Ok(v) => report.normalization_defect = (v - 1.0).norm(),
        Err(e) => report.errors.push(format!("identity: {e}")),
    }
    report
}

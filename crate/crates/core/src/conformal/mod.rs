//! e^{−βχ}-conformal measures on Ω, their lifts to e^{−βc}-conformal measures
//! on Ω×ℤ, and exhaustive conformality checks on cylinder sets.

mod continuous;
mod cylinder;
mod orbit;
mod product;

use std::collections::BTreeSet;
use std::fmt::Display;

use rayon::prelude::*;
use serde::{Serialize, Serializer};

pub use continuous::{CircleDensity, LineExponential};
pub use cylinder::Cylinder;
pub use orbit::{orbit_measure, AtomicOrbit};
pub use product::DyadicProduct;

use crate::error::MeasureError;
use crate::lattice::{GroupElement, Potential};
use crate::scalar::Scalar;

/// Default bound on the number of coordinates per side enumerated by
/// approximate evaluations.
pub const DEFAULT_DEPTH_CAP: usize = 12;

pub(crate) fn serialize_display<T: Display, S: Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(v)
}

/// Whether conformal measures (equivalently β-KMS states) exist: β > 0 and θ ≥ 0.
///
/// β = 0 is reported separately as [`MeasureError::TracialRegime`].
pub fn existence_gate<S: Scalar>(pot: &Potential<S>) -> Result<bool, MeasureError> {
    if pot.beta.is_zero() {
        return Err(MeasureError::TracialRegime);
    }
    Ok(pot.beta > S::zero() && pot.theta >= S::zero())
}

/// Measure on Ω×ℤ with `m̄(E×{n}) = (1−q)qⁿ m(E)`, `q = e^{−β(1+θ)}`.
#[derive(Clone, Debug)]
pub struct Lifted {
    inner: Box<ConformalMeasure>,
    beta: f64,
    theta: f64,
    q: f64,
}

impl Lifted {
    pub fn inner(&self) -> &ConformalMeasure {
        &self.inner
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// `e^{−β(1+θ)}`
    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn slice_mass(&self, level: i64) -> f64 {
        (1.0 - self.q) * self.q.powi(level as i32)
    }
}

#[derive(Clone, Debug)]
pub enum ConformalMeasure {
    AtomicOrbit(AtomicOrbit),
    DyadicProduct(DyadicProduct),
    CircleDensity(CircleDensity),
    LineExponential(LineExponential),
    Lifted(Lifted),
}

impl ConformalMeasure {
    pub fn variant_name(&self) -> &'static str {
        match self {
            ConformalMeasure::AtomicOrbit(_) => "atomic-orbit",
            ConformalMeasure::DyadicProduct(_) => "dyadic-product",
            ConformalMeasure::CircleDensity(_) => "circle-density",
            ConformalMeasure::LineExponential(_) => "line-exponential",
            ConformalMeasure::Lifted(_) => "lifted",
        }
    }

    /// Certified bound on mass not accounted for by truncation.
    pub fn certified_tail(&self) -> f64 {
        match self {
            ConformalMeasure::AtomicOrbit(m) => m.tail_bound(),
            ConformalMeasure::Lifted(l) => l.inner.certified_tail(),
            _ => 0.0,
        }
    }

    fn atomic(&self) -> Option<&AtomicOrbit> {
        match self {
            ConformalMeasure::AtomicOrbit(m) => Some(m),
            ConformalMeasure::Lifted(l) => l.inner.atomic(),
            _ => None,
        }
    }
}

/// Lift of a measure on Ω to Ω×ℤ; requires `β(1+θ) > 0`.
pub fn lift<S: Scalar>(
    m: ConformalMeasure,
    pot: &Potential<S>,
) -> Result<ConformalMeasure, MeasureError> {
    let p = pot.to_f64();
    let rate = p.beta * (1.0 + p.theta);
    if !(rate > 0.0) {
        return Err(MeasureError::InvalidParameter(format!(
            "beta(1+theta) = {rate} must be positive"
        )));
    }
    if matches!(m, ConformalMeasure::Lifted(_)) {
        return Err(MeasureError::InvalidParameter(
            "measure is already lifted".into(),
        ));
    }
    Ok(ConformalMeasure::Lifted(Lifted {
        inner: Box::new(m),
        beta: p.beta,
        theta: p.theta,
        q: (-rate).exp(),
    }))
}

/// Mass of a cylinder. Over Ω×ℤ a cylinder without level means `E×ℕ`.
pub fn measure_of_cylinder(m: &ConformalMeasure, c: &Cylinder) -> Result<f64, MeasureError> {
    if c.is_empty() {
        return Ok(0.0);
    }
    match m {
        ConformalMeasure::AtomicOrbit(o) => Ok(o.mass(c)),
        ConformalMeasure::DyadicProduct(d) => Ok(d.mass(c)),
        ConformalMeasure::CircleDensity(_) | ConformalMeasure::LineExponential(_) => {
            Err(MeasureError::UnsupportedCylinder {
                width: c.constraints().len(),
                cap: 0,
            })
        }
        ConformalMeasure::Lifted(l) => {
            let inner = measure_of_cylinder(
                &l.inner,
                &Cylinder::new(c.constraints().iter().map(|(&k, &b)| (k, b))),
            )?;
            Ok(match c.level() {
                None => inner,
                Some(n) => l.slice_mass(n) * inner,
            })
        }
    }
}

/// `true` iff `m({x : x₋₁ = 0}) ≤ tol`.
pub fn theta_zero_concentration(m: &ConformalMeasure, tol: f64) -> Result<bool, MeasureError> {
    let inner = match m {
        ConformalMeasure::Lifted(l) => l.inner.as_ref(),
        other => other,
    };
    Ok(measure_of_cylinder(inner, &Cylinder::new([(-1, false)]))? <= tol)
}

/// `(E×{n}) + s` as a disjoint union of level cylinders.
pub fn translate(c: &Cylinder, s: GroupElement) -> Vec<Cylinder> {
    let level = c.level().expect("translation needs a level");
    let (m, n) = s.to_v_coords();
    let mut pieces = vec![c.clone()];
    for _ in 0..m.abs() {
        pieces = pieces
            .into_iter()
            .flat_map(|p| {
                let l = p.level().unwrap();
                if m > 0 {
                    // (x,t)+v₁ = (τx, t + x₋₁)
                    [(false, 0), (true, 1)]
                        .map(|(b, dl)| p.clone().and(-1, b).shifted(1).at_level(l + dl))
                } else {
                    // (x,t)−v₁ = (τ⁻¹x, t − x₀)
                    [(false, 0), (true, -1)]
                        .map(|(b, dl)| p.clone().and(0, b).shifted(-1).at_level(l + dl))
                }
            })
            .filter(|p| !p.is_empty())
            .collect();
    }
    debug_assert!(
        pieces.iter().all(|p| p.level().is_some()),
        "level {level} lost"
    );
    pieces
        .into_iter()
        .map(|p| {
            let l = p.level().unwrap();
            p.at_level(l + n)
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct ConformalReport {
    pub variant: String,
    pub depth: usize,
    pub max_deviation: f64,
    pub worst_cylinder: String,
    pub certified_tail: f64,
    /// Sum of deviations over all full cylinders: bounds the deviation of
    /// every cylinder whose constraints fit in the window.
    pub union_bound: f64,
    pub cylinders_checked: usize,
    pub tol: f64,
    pub passed: bool,
    pub note: Option<String>,
}

fn pattern_of(x: &crate::symbolic::BiSeq, n: i64, lo: i64, width: usize) -> u64 {
    (0..width).fold(0u64, |acc, i| {
        acc | ((x.bit(lo + i as i64 - n) as u64) << i)
    })
}

/// Full-cylinder patterns on the window that can carry mass, or `None` for "all".
fn candidates(m: &ConformalMeasure, lo: i64, width: usize) -> Option<Vec<u64>> {
    let o = m.atomic()?;
    let (a, b) = o.range();
    let set: BTreeSet<u64> = (a - 1..=b + 1)
        .map(|n| pattern_of(o.base(), n, lo, width))
        .collect();
    Some(set.into_iter().collect())
}

const DENSE_LIMIT: usize = 20;

/// Verifies `m(τC) = ∫_C e^{−βχ} dm` for all full cylinders on `[-depth, depth]`
/// (for Ω measures), or both lift translation identities on those cylinders at
/// levels 0..3 (for lifted measures).
pub fn check_conformal<S: Scalar>(
    m: &ConformalMeasure,
    pot: &Potential<S>,
    depth: usize,
    tol: f64,
) -> ConformalReport {
    let p = pot.to_f64();
    let lo = -(depth as i64);
    let width = 2 * depth + 1;
    let mut report = ConformalReport {
        variant: m.variant_name().to_string(),
        depth,
        max_deviation: 0.0,
        worst_cylinder: String::new(),
        certified_tail: m.certified_tail(),
        union_bound: 0.0,
        cylinders_checked: 0,
        tol,
        passed: false,
        note: None,
    };
    if matches!(
        m,
        ConformalMeasure::CircleDensity(_) | ConformalMeasure::LineExponential(_)
    ) {
        report.note = Some("measure is not defined on Ω cylinders".into());
        return report;
    }
    let patterns = match candidates(m, lo, width) {
        Some(v) => v,
        None if width <= DENSE_LIMIT => (0..1u64 << width).collect(),
        None => {
            report.note = Some(format!(
                "window of {width} coordinates exceeds the dense limit {DENSE_LIMIT}"
            ));
            return report;
        }
    };
    let mass =
        |c: &Cylinder| measure_of_cylinder(m, c).expect("cylinder over the measure's own space");
    let deviations: Vec<(f64, Cylinder)> = patterns
        .par_iter()
        .flat_map_iter(|&pat| {
            let c = Cylinder::full(lo, width, pat);
            let mut out = Vec::new();
            if let ConformalMeasure::Lifted(l) = m {
                for level in 0..3 {
                    let e = c.clone().at_level(level);
                    let base = mass(&e);
                    for (s, factor) in
                        [(GroupElement::V1, (-l.beta).exp()), (GroupElement::V2, l.q)]
                    {
                        let moved: f64 = translate(&e, s).iter().map(&mass).sum();
                        out.push(((moved - factor * base).abs(), e.clone()));
                    }
                }
            } else {
                let lhs = mass(&c.shifted(1));
                let rhs = (-p.beta).exp() * mass(&c.clone().and(-1, false))
                    + (p.beta * p.theta).exp() * mass(&c.clone().and(-1, true));
                out.push(((lhs - rhs).abs(), c));
            }
            out
        })
        .collect();
    report.cylinders_checked = deviations.len();
    for (d, c) in &deviations {
        report.union_bound += d;
        if *d > report.max_deviation || report.worst_cylinder.is_empty() {
            report.max_deviation = *d;
            report.worst_cylinder = c.to_string();
        }
    }
    report.passed = report.union_bound <= tol;
    report
}

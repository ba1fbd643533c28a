//! Concrete (ℤ², ℕ²)-spaces `(Y, X)` with conformal measures.

mod dyadic;
mod line;
mod rotation;
mod transfer;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Debug;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::ModelError;
use crate::lattice::GroupElement;

pub use dyadic::{
    separation_brute_force, separation_witness, AddingMachine, DyadicPoint, DyadicSkewPoint,
    SeparationReport,
};
pub use line::{Cone, ConePoint, RealLine};
pub use rotation::{RotationII, RotationIII, SkewPoint};
pub use transfer::{transfer_density_estimate, DensityEstimate};

/// Factor type attached to a model. Always cited, never computed here.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TypeLabel {
    pub kind: &'static str,
    pub basis: &'static str,
    pub system: &'static str,
}

impl TypeLabel {
    pub fn cited(kind: &'static str, system: &'static str) -> Self {
        TypeLabel {
            kind,
            basis: "by citation",
            system,
        }
    }
}

/// Sampled conformality of a model's measure on its own test family.
#[derive(Clone, Debug, Serialize)]
pub struct ConformalityCheck {
    pub family: String,
    pub checked: usize,
    pub max_deviation: f64,
    pub tol: f64,
}

impl ConformalityCheck {
    pub fn passed(&self) -> bool {
        self.checked > 0 && self.max_deviation <= self.tol
    }
}

/// A `(ℤ², ℕ²)`-space `Y ⊇ X` with a conformal measure.
pub trait ModelSpace: Sync {
    type Point: Clone + Debug + Send + Sync;

    fn name(&self) -> &'static str;
    fn beta(&self) -> f64;
    fn theta(&self) -> f64;
    fn act(&self, pt: &Self::Point, s: GroupElement) -> Self::Point;
    fn in_x(&self, pt: &Self::Point) -> bool;
    /// Coordinate that moves by `c(s)` plus the skew cocycle under `s`.
    fn height(&self, pt: &Self::Point) -> f64;
    /// Skew cocycle accumulated along `s`: `Δheight − c(s)`.
    fn cocycle(&self, s: GroupElement, pt: &Self::Point) -> f64;
    fn sample(&self, rng: &mut ChaCha8Rng) -> Self::Point;
    fn same(&self, a: &Self::Point, b: &Self::Point) -> bool;
    /// `log d(m∘T_s)/dm` at `pt`, from the measure's density.
    fn log_rn(&self, s: GroupElement, pt: &Self::Point) -> f64;
    /// Group elements bringing `pt` back into a small cell around itself.
    fn recurrences(&self, pt: &Self::Point, rng: &mut ChaCha8Rng) -> Vec<GroupElement>;
    fn conformality(&self, trials: usize, seed: u64) -> ConformalityCheck;
    fn type_label(&self) -> TypeLabel;
}

/// `Q_pt ∩ [-window, window]² = {s : pt − s ∈ X}`.
pub fn q_embed<M: ModelSpace>(model: &M, pt: &M::Point, window: i64) -> BTreeSet<GroupElement> {
    GroupElement::square(window)
        .filter(|&s| model.in_x(&model.act(pt, -s)))
        .collect()
}

/// First lattice element of the window lying in exactly one of `Q_a`, `Q_b`.
pub fn separating_element<M: ModelSpace>(
    model: &M,
    a: &M::Point,
    b: &M::Point,
    window: i64,
) -> Option<GroupElement> {
    GroupElement::square(window)
        .find(|&s| model.in_x(&model.act(a, -s)) != model.in_x(&model.act(b, -s)))
}

/// Pass/fail record for one invariant of a model.
#[derive(Clone, Debug, Serialize)]
pub struct ModelCheck {
    pub name: String,
    pub passed: bool,
    pub deviation: Option<f64>,
    pub bound: Option<f64>,
    pub heuristic: bool,
    pub detail: String,
}

impl ModelCheck {
    fn exact(name: &str, failures: usize, total: usize) -> Self {
        ModelCheck {
            name: name.to_string(),
            passed: failures == 0 && total > 0,
            deviation: None,
            bound: None,
            heuristic: false,
            detail: format!("{failures} failures in {total} samples"),
        }
    }
}

fn random_nonneg(rng: &mut ChaCha8Rng, r: i64) -> GroupElement {
    GroupElement::new(rng.random_range(0..=r), rng.random_range(0..=r))
}

fn random_element(rng: &mut ChaCha8Rng, r: i64) -> GroupElement {
    GroupElement::new(rng.random_range(-r..=r), rng.random_range(-r..=r))
}

/// `X + ℕ² ⊆ X` on `samples` points of `X`.
pub fn check_invariance<M: ModelSpace>(model: &M, samples: usize, seed: u64) -> ModelCheck {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut total, mut bad) = (0, 0);
    while total < samples {
        let pt = model.sample(&mut rng);
        if !model.in_x(&pt) {
            continue;
        }
        total += 1;
        for a in [
            GroupElement::E1,
            GroupElement::E2,
            random_nonneg(&mut rng, 20),
        ] {
            if !model.in_x(&model.act(&pt, a)) {
                bad += 1;
                break;
            }
        }
    }
    ModelCheck::exact("invariance", bad, total)
}

/// Purity: each sampled `y` has some `a ∈ ℕ²` with `y − a ∉ X`.
pub fn check_purity<M: ModelSpace>(model: &M, samples: usize, seed: u64) -> ModelCheck {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bad = (0..samples)
        .filter(|_| {
            let y = model.sample(&mut rng);
            let escapes = (0..40).any(|j| {
                let k = 1i64 << j;
                [GroupElement::new(k, 0), GroupElement::new(0, k)]
                    .iter()
                    .any(|&a| !model.in_x(&model.act(&y, -a)))
            });
            !escapes
        })
        .count();
    ModelCheck::exact("purity", bad, samples)
}

/// `act(pt, s+t) = act(act(pt, s), t)`.
pub fn check_action<M: ModelSpace>(model: &M, samples: usize, seed: u64) -> ModelCheck {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bad = (0..samples)
        .filter(|_| {
            let pt = model.sample(&mut rng);
            let (s, t) = (random_element(&mut rng, 30), random_element(&mut rng, 30));
            !model.same(&model.act(&pt, s + t), &model.act(&model.act(&pt, s), t))
        })
        .count();
    ModelCheck::exact("group-action", bad, samples)
}

/// `c(s+t, pt) = c(s, pt) + c(t, pt+s)`.
pub fn check_cocycle<M: ModelSpace>(model: &M, samples: usize, seed: u64) -> ModelCheck {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let pt = model.sample(&mut rng);
        let (s, t) = (random_element(&mut rng, 30), random_element(&mut rng, 30));
        let lhs = model.cocycle(s + t, &pt);
        let rhs = model.cocycle(s, &pt) + model.cocycle(t, &model.act(&pt, s));
        worst = worst.max((lhs - rhs).abs());
    }
    let tol = 1e-9;
    ModelCheck {
        name: "cocycle-identity".into(),
        passed: worst <= tol,
        deviation: Some(worst),
        bound: Some(tol),
        heuristic: false,
        detail: format!("{samples} random triples"),
    }
}

/// `Q_{pt+s} = Q_pt + s` on the common window.
pub fn check_q_equivariance<M: ModelSpace>(
    model: &M,
    samples: usize,
    window: i64,
    seed: u64,
) -> ModelCheck {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bad = (0..samples)
        .filter(|_| {
            let pt = model.sample(&mut rng);
            let s = random_element(&mut rng, 4);
            let moved = model.act(&pt, s);
            let q = q_embed(model, &pt, window);
            let q_moved = q_embed(model, &moved, window);
            GroupElement::square(window)
                .filter(|&u| (u + s).a.abs() <= window && (u + s).b.abs() <= window)
                .any(|u| q.contains(&u) != q_moved.contains(&(u + s)))
        })
        .count();
    ModelCheck::exact("q-equivariance", bad, samples)
}

/// The full invariant suite run by the CLI `check` command.
pub fn standard_checks<M: ModelSpace>(model: &M, seed: u64) -> Vec<ModelCheck> {
    let conf = model.conformality(50, seed);
    let mut out = vec![
        check_invariance(model, 1000, seed),
        check_purity(model, 1000, seed.wrapping_add(1)),
        check_action(model, 1000, seed.wrapping_add(2)),
        check_cocycle(model, 1000, seed.wrapping_add(3)),
        check_q_equivariance(model, 100, 8, seed.wrapping_add(4)),
        ModelCheck {
            name: "conformality".into(),
            passed: conf.passed(),
            deviation: Some(conf.max_deviation),
            bound: Some(conf.tol),
            heuristic: false,
            detail: format!("{} ({} sets)", conf.family, conf.checked),
        },
    ];
    out.sort_by(|a, b| a.name.cmp(&b.name));
    out
}

/// Histogram of height-compensated log Radon–Nikodym values at recurrences.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RatioHistogram {
    pub resolution: f64,
    /// bin centre (as `round(value/resolution)`) → count
    pub bins: BTreeMap<i64, usize>,
    pub samples: usize,
    pub recurrences: usize,
}

impl RatioHistogram {
    fn new(resolution: f64) -> Self {
        RatioHistogram {
            resolution,
            bins: BTreeMap::new(),
            samples: 0,
            recurrences: 0,
        }
    }

    fn merge(mut self, other: RatioHistogram) -> Self {
        for (k, v) in other.bins {
            *self.bins.entry(k).or_default() += v;
        }
        self.samples += other.samples;
        self.recurrences += other.recurrences;
        self
    }

    pub fn values(&self) -> impl Iterator<Item = (f64, usize)> + '_ {
        self.bins
            .iter()
            .map(|(&k, &c)| (k as f64 * self.resolution, c))
    }

    pub fn distinct(&self) -> usize {
        self.bins.len()
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("log_rn_value,count\n");
        for (v, c) in self.values() {
            s.push_str(&format!("{v},{c}\n"));
        }
        s
    }
}

/// Value recorded at a recurrence `s` of `pt`:
/// `log d(m∘T_s)/dm (pt) + β·(height(pt+s) − height(pt))`.
///
/// For a measure with an `e^{−β·height}` factor the level part cancels and
/// only the base measure's cocycle survives.
pub fn compensated_log_rn<M: ModelSpace>(model: &M, s: GroupElement, pt: &M::Point) -> f64 {
    let dh = model.height(&model.act(pt, s)) - model.height(pt);
    model.log_rn(s, pt) + model.beta() * dh
}

const RATIO_RESOLUTION: f64 = 1e-9;
const RATIO_CHUNK: usize = 64;

/// Samples points, collects recurrences and bins the compensated log-RN values.
///
/// Chunks are seeded independently from `seed` and merged in order, so the
/// result does not depend on the thread count.
pub fn ratio_set_sampler<M: ModelSpace>(
    model: &M,
    samples: usize,
    seed: u64,
) -> Result<RatioHistogram, ModelError> {
    let chunks = samples.div_ceil(RATIO_CHUNK);
    let hist = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng =
                ChaCha8Rng::seed_from_u64(seed ^ (c as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
            let mut h = RatioHistogram::new(RATIO_RESOLUTION);
            let n = RATIO_CHUNK.min(samples - c * RATIO_CHUNK);
            for _ in 0..n {
                let pt = model.sample(&mut rng);
                h.samples += 1;
                for s in model.recurrences(&pt, &mut rng) {
                    let v = compensated_log_rn(model, s, &pt);
                    *h.bins
                        .entry((v / RATIO_RESOLUTION).round() as i64)
                        .or_default() += 1;
                    h.recurrences += 1;
                }
            }
            h
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(RatioHistogram::new(RATIO_RESOLUTION), RatioHistogram::merge);
    if hist.recurrences == 0 {
        return Err(ModelError::InsufficientRecurrences {
            found: 0,
            required: 1,
            partial: hist.values().map(|(v, _)| v).collect(),
        });
    }
    Ok(hist)
}

/// Any of the model systems, behind one type for the CLI.
#[derive(Clone, Debug)]
pub enum ModelSystem {
    RealLine(RealLine<f64>),
    Cone(Cone<f64>),
    AddingMachine(AddingMachine<crate::scalar::Rational>),
    RotationII(RotationII),
    RotationIII(RotationIII),
}

macro_rules! dispatch {
    ($self:expr, $m:ident => $body:expr) => {
        match $self {
            ModelSystem::RealLine($m) => $body,
            ModelSystem::Cone($m) => $body,
            ModelSystem::AddingMachine($m) => $body,
            ModelSystem::RotationII($m) => $body,
            ModelSystem::RotationIII($m) => $body,
        }
    };
}

impl ModelSystem {
    pub fn name(&self) -> &'static str {
        dispatch!(self, m => m.name())
    }

    pub fn type_label(&self) -> TypeLabel {
        dispatch!(self, m => m.type_label())
    }

    pub fn checks(&self, seed: u64) -> Vec<ModelCheck> {
        dispatch!(self, m => standard_checks(m, seed))
    }

    pub fn ratio_set(&self, samples: usize, seed: u64) -> Result<RatioHistogram, ModelError> {
        dispatch!(self, m => ratio_set_sampler(m, samples, seed))
    }
}

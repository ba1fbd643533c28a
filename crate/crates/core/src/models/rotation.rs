//! Skew products over an irrational rotation `R_α x = x + α`.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{transfer_density_estimate, ConformalityCheck, DensityEstimate, ModelSpace, TypeLabel};
use crate::conformal::CircleDensity;
use crate::error::ModelError;
use crate::lattice::GroupElement;
use crate::number::{ratio_outside_span, Decision, Number};
use crate::step::StepFunction;

const CELL: f64 = 1.0 / 1024.0;

/// Angle in `[0, 1)` and an integer level.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SkewPoint {
    pub x: f64,
    pub t: i64,
}

fn frac(x: f64) -> f64 {
    let f = x - x.floor();
    if f >= 1.0 {
        0.0
    } else {
        f
    }
}

fn circle_close(a: f64, b: f64, tol: f64) -> bool {
    let d = (a - b).abs();
    d.min(1.0 - d) <= tol
}

fn irrational_angle(alpha: &Number) -> Result<f64, ModelError> {
    let a = alpha.value();
    if !(a > 0.0 && a < 1.0) {
        return Err(ModelError::InvalidParameter(format!(
            "alpha = {alpha} must lie in (0,1)"
        )));
    }
    if alpha.is_rational() == Some(true) {
        return Err(ModelError::InvalidParameter(format!(
            "alpha = {alpha} is rational"
        )));
    }
    Ok(a)
}

/// First `count` returns `‖nα‖ < CELL`, as `n` with sign.
fn returns(alpha: f64, count: usize) -> Vec<i64> {
    let mut out = Vec::new();
    let mut n = 1i64;
    while out.len() < count && n < 10_000_000 {
        for k in [n, -n] {
            if circle_close(frac(k as f64 * alpha), 0.0, CELL) {
                out.push(k);
            }
        }
        n += 1;
    }
    out
}

/// `θ = 1`, `(x,t)+e₁ = (x+α, φ(x)+t+1)`, `(x,t)+e₂ = (x, t+1)` with the
/// coboundary `φ = h∘R_α − h`, `h = 1_{[0,η)}`. The base measure has density
/// proportional to `e^{βh}`.
#[derive(Clone, Debug)]
pub struct RotationII {
    alpha: f64,
    eta: f64,
    beta: f64,
    nu: CircleDensity,
}

impl RotationII {
    /// Needs `0 < η < min(α, 1−α)` and `β > 0`.
    pub fn new(alpha: &Number, eta: f64, beta: f64) -> Result<Self, ModelError> {
        let a = irrational_angle(alpha)?;
        if !(eta > 0.0 && eta < a.min(1.0 - a)) {
            return Err(ModelError::InvalidParameter(format!(
                "eta = {eta} must lie in (0, min(alpha, 1-alpha))"
            )));
        }
        if !(beta > 0.0) {
            return Err(ModelError::InvalidParameter(format!(
                "beta = {beta} must be positive"
            )));
        }
        let nu = CircleDensity::new(StepFunction::two_valued(eta, beta.exp(), 1.0), beta)
            .map_err(|e| ModelError::InvalidParameter(e.to_string()))?;
        Ok(RotationII {
            alpha: a,
            eta,
            beta,
            nu,
        })
    }

    pub fn base_measure(&self) -> &CircleDensity {
        &self.nu
    }

    fn h(&self, x: f64) -> i64 {
        (frac(x) < self.eta) as i64
    }

    pub fn phi(&self, x: f64) -> i64 {
        self.h(x + self.alpha) - self.h(x)
    }

    /// `φ` as a step function.
    pub fn phi_step(&self) -> StepFunction {
        let h = StepFunction::two_valued(self.eta, 1.0, 0.0);
        h.rotate(self.alpha).combine(&h, |a, b| a - b)
    }

    /// `μ(E×{n}) = (1−e^{−β})e^{−βn}ν(E)` for an arc `E = [a, b)`.
    pub fn lifted_mass(&self, a: f64, b: f64, n: i64) -> f64 {
        let q = (-self.beta).exp();
        (1.0 - q) * q.powi(n as i32) * self.nu.interval(a, b)
    }
}

impl ModelSpace for RotationII {
    type Point = SkewPoint;

    fn name(&self) -> &'static str {
        "rotation-ii"
    }

    fn beta(&self) -> f64 {
        self.beta
    }

    fn theta(&self) -> f64 {
        1.0
    }

    fn act(&self, p: &SkewPoint, s: GroupElement) -> SkewPoint {
        let x = frac(p.x + s.a as f64 * self.alpha);
        // the cocycle telescopes: Σ_{k<a} φ(x + kα) = h(x + aα) − h(x)
        SkewPoint {
            x,
            t: p.t + self.h(x) - self.h(p.x) + s.a + s.b,
        }
    }

    fn in_x(&self, p: &SkewPoint) -> bool {
        p.t >= 0
    }

    fn height(&self, p: &SkewPoint) -> f64 {
        p.t as f64
    }

    fn cocycle(&self, s: GroupElement, p: &SkewPoint) -> f64 {
        (self.act(p, s).t - p.t - s.a - s.b) as f64
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> SkewPoint {
        SkewPoint {
            x: rng.random_range(0.0..1.0),
            t: rng.random_range(-6..=6),
        }
    }

    fn same(&self, a: &SkewPoint, b: &SkewPoint) -> bool {
        a.t == b.t && circle_close(a.x, b.x, 1e-9)
    }

    fn log_rn(&self, s: GroupElement, p: &SkewPoint) -> f64 {
        let q = self.act(p, s);
        let log_density = |y: &SkewPoint| self.beta * self.h(y.x) as f64 - self.beta * y.t as f64;
        log_density(&q) - log_density(p)
    }

    fn recurrences(&self, p: &SkewPoint, _rng: &mut ChaCha8Rng) -> Vec<GroupElement> {
        returns(self.alpha, 3)
            .into_iter()
            .map(|n| {
                let moved = self.act(p, GroupElement::new(n, 0));
                GroupElement::new(n, p.t - moved.t)
            })
            .collect()
    }

    fn conformality(&self, trials: usize, seed: u64) -> ConformalityCheck {
        use rand::SeedableRng;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let phi = self.phi_step();
        let rn = phi.map(|v| (self.beta * v).exp());
        let mut worst = (self.nu.interval(0.0, 1.0) - 1.0).abs();
        for _ in 0..trials {
            let a = rng.random_range(0.0..1.0);
            let b = a + rng.random_range(0.01..0.99);
            // ν(R_α E) = ∫_E e^{βφ} dν
            let lhs = self.nu.interval(a + self.alpha, b + self.alpha);
            worst = worst.max((lhs - self.nu.integrate(&rn, a, b)).abs());
            // μ((E×{n}) + e₁) = e^{−β} μ(E×{n}), splitting E by the value of φ
            let n = rng.random_range(0..4);
            let image: f64 = (-1i64..=1)
                .map(|j| {
                    let on_level = phi.map(|v| (v as i64 == j) as u8 as f64);
                    let nu_img = self
                        .nu
                        .integrate(&on_level.combine(&rn, |u, r| u * r), a, b);
                    let q = (-self.beta).exp();
                    (1.0 - q) * q.powi((n + j + 1) as i32) * nu_img
                })
                .sum();
            worst = worst.max((image - (-self.beta).exp() * self.lifted_mass(a, b, n)).abs());
        }
        ConformalityCheck {
            family: "random arcs: RN identity and lifted e1 identity".into(),
            checked: trials + 1,
            max_deviation: worst,
            tol: 1e-10,
        }
    }

    fn type_label(&self) -> TypeLabel {
        TypeLabel::cited("II", "rotation skew product with a coboundary cocycle")
    }
}

/// `(x,t)+v₁ = (x+α, 1_{[σ,1)}(x)+t)`, `(x,t)+v₂ = (x, t+1)` with
/// `σ = γ/(γ+1)`, `θ = γ`, over the base measure of `(R_α, e^{−βF_γ})`.
#[derive(Clone, Debug)]
pub struct RotationIII {
    alpha: f64,
    gamma: f64,
    beta: f64,
    sigma: f64,
    f: StepFunction,
    estimate: DensityEstimate,
    nu: CircleDensity,
    span_condition: Decision,
}

impl RotationIII {
    /// `F_γ = 1` on `[0, σ)` and `−γ` on `[σ, 1)`; the base measure comes from
    /// [`transfer_density_estimate`] on `grid_size` cells.
    pub fn new(
        alpha: &Number,
        gamma: f64,
        beta: f64,
        grid_size: usize,
    ) -> Result<Self, ModelError> {
        let a = irrational_angle(alpha)?;
        if !(gamma > 0.0) {
            return Err(ModelError::InvalidParameter(format!(
                "gamma = {gamma} must be positive"
            )));
        }
        if !(beta > 0.0) {
            return Err(ModelError::InvalidParameter(format!(
                "beta = {beta} must be positive"
            )));
        }
        let sigma = gamma / (gamma + 1.0);
        let f = StepFunction::two_valued(sigma, 1.0, -gamma);
        let estimate = transfer_density_estimate(&f, a, beta, grid_size, 50, 1e-9)?;
        let nu = estimate.measure(beta);
        let span_condition = if gamma == 1.0 {
            Decision::Holds
        } else {
            ratio_outside_span(&Number::Float(gamma), alpha)
        };
        Ok(RotationIII {
            alpha: a,
            gamma,
            beta,
            sigma,
            f,
            estimate,
            nu,
            span_condition,
        })
    }

    /// As [`RotationIII::new`] with γ given symbolically, so the span
    /// condition on `θ/(θ+1)` is decided exactly when possible.
    pub fn with_gamma(
        alpha: &Number,
        gamma: &Number,
        beta: f64,
        grid_size: usize,
    ) -> Result<Self, ModelError> {
        let mut m = RotationIII::new(alpha, gamma.value(), beta, grid_size)?;
        if gamma.as_rational().is_none() || gamma.value() != 1.0 {
            m.span_condition = ratio_outside_span(gamma, alpha);
        }
        Ok(m)
    }

    pub fn split(&self) -> f64 {
        self.sigma
    }

    pub fn potential(&self) -> &StepFunction {
        &self.f
    }

    pub fn estimate(&self) -> &DensityEstimate {
        &self.estimate
    }

    pub fn base_measure(&self) -> &CircleDensity {
        &self.nu
    }

    pub fn span_condition(&self) -> Decision {
        self.span_condition
    }

    fn upper(&self, x: f64) -> i64 {
        (frac(x) >= self.sigma) as i64
    }
}

impl ModelSpace for RotationIII {
    type Point = SkewPoint;

    fn name(&self) -> &'static str {
        "rotation-iii"
    }

    fn beta(&self) -> f64 {
        self.beta
    }

    fn theta(&self) -> f64 {
        self.gamma
    }

    fn act(&self, p: &SkewPoint, s: GroupElement) -> SkewPoint {
        let (m, n) = s.to_v_coords();
        let gain: i64 = if m >= 0 {
            (0..m)
                .map(|k| self.upper(p.x + k as f64 * self.alpha))
                .sum()
        } else {
            -(1..=-m)
                .map(|k| self.upper(p.x - k as f64 * self.alpha))
                .sum::<i64>()
        };
        SkewPoint {
            x: frac(p.x + m as f64 * self.alpha),
            t: p.t + gain + n,
        }
    }

    fn in_x(&self, p: &SkewPoint) -> bool {
        p.t >= 0
    }

    fn height(&self, p: &SkewPoint) -> f64 {
        (1.0 + self.gamma) * p.t as f64
    }

    /// `−Σ F_γ` along the `v₁`-steps of `s`.
    fn cocycle(&self, s: GroupElement, p: &SkewPoint) -> f64 {
        let (m, _) = s.to_v_coords();
        if m >= 0 {
            -(0..m)
                .map(|k| self.f.eval(p.x + k as f64 * self.alpha))
                .sum::<f64>()
        } else {
            (1..=-m)
                .map(|k| self.f.eval(p.x - k as f64 * self.alpha))
                .sum::<f64>()
        }
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> SkewPoint {
        SkewPoint {
            x: rng.random_range(0.0..1.0),
            t: rng.random_range(-6..=6),
        }
    }

    fn same(&self, a: &SkewPoint, b: &SkewPoint) -> bool {
        a.t == b.t && circle_close(a.x, b.x, 1e-9)
    }

    fn log_rn(&self, s: GroupElement, p: &SkewPoint) -> f64 {
        let q = self.act(p, s);
        let d = self.nu.density();
        (d.eval(q.x).ln() - d.eval(p.x).ln()) - self.beta * (self.height(&q) - self.height(p))
    }

    fn recurrences(&self, p: &SkewPoint, _rng: &mut ChaCha8Rng) -> Vec<GroupElement> {
        returns(self.alpha, 3)
            .into_iter()
            .map(|m| {
                let moved = self.act(p, GroupElement::from_v_coords(m, 0));
                GroupElement::from_v_coords(m, p.t - moved.t)
            })
            .collect()
    }

    fn conformality(&self, trials: usize, seed: u64) -> ConformalityCheck {
        use rand::SeedableRng;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rn = self.f.map(|v| (-self.beta * v).exp());
        let mut worst = (self.nu.interval(0.0, 1.0) - 1.0).abs();
        for _ in 0..trials {
            let a = rng.random_range(0.0..1.0);
            let b = a + rng.random_range(0.01..0.99);
            let lhs = self.nu.interval(a + self.alpha, b + self.alpha);
            worst = worst.max((lhs - self.nu.integrate(&rn, a, b)).abs());
        }
        ConformalityCheck {
            family: "random arcs: RN identity of the estimated base measure".into(),
            checked: trials + 1,
            max_deviation: worst,
            tol: 1e-4,
        }
    }

    fn type_label(&self) -> TypeLabel {
        TypeLabel::cited(
            "III",
            "rotation skew product with the two-valued step cocycle F_gamma",
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::q_embed;

    fn alpha() -> Number {
        "sqrt(2)-1".parse().unwrap()
    }

    #[test]
    fn rotation_ii_closed_forms() {
        let (eta, beta) = (0.2, 0.7);
        let m = RotationII::new(&alpha(), eta, beta).unwrap();
        let expect = eta * beta.exp() / (eta * beta.exp() + 1.0 - eta);
        assert!((m.base_measure().interval(0.0, eta) - expect).abs() < 1e-14);
        assert!((m.base_measure().interval(0.0, 1.0) - 1.0).abs() < 1e-14);
        let a = alpha().value();
        // φ on the four pieces, composed with the rotation
        assert_eq!(m.phi(1.0 - a + 0.5 * eta), 1);
        assert_eq!(m.phi(0.5 * eta), -1);
        assert_eq!(m.phi(0.5), 0);
        assert!(m.conformality(50, 1).passed());
    }

    #[test]
    fn rotation_ii_rejects_wide_eta() {
        assert!(RotationII::new(&alpha(), 0.5, 1.0).is_err());
        assert!(RotationII::new(&"1/3".parse().unwrap(), 0.1, 1.0).is_err());
    }

    #[test]
    fn rotation_iii_split_and_estimate() {
        let m = RotationIII::new(&alpha(), 1.0, 0.8, 1 << 14).unwrap();
        assert_eq!(m.split(), 0.5);
        assert!((m.base_measure().interval(0.0, 1.0) - 1.0).abs() < 1e-8);
        assert!(m.conformality(50, 2).passed());
        assert!(RotationIII::new(&alpha(), 0.0, 0.8, 1 << 12).is_err());
        assert_eq!(m.span_condition(), Decision::Holds);
    }

    #[test]
    fn rotation_iii_cocycle_matches_height_change() {
        let m = RotationIII::new(&alpha(), 1.0, 0.8, 1 << 10).unwrap();
        let p = SkewPoint { x: 0.3, t: 2 };
        for s in GroupElement::square(5) {
            let q = m.act(&p, s);
            let c = s.a as f64 + s.b as f64 * m.theta();
            assert!((m.cocycle(s, &p) - (m.height(&q) - m.height(&p) - c)).abs() < 1e-12);
        }
        assert!(q_embed(&m, &p, 3).contains(&GroupElement::ZERO));
    }

    #[test]
    fn irrational_theta_span_condition() {
        let m =
            RotationIII::with_gamma(&alpha(), &"sqrt(3)".parse().unwrap(), 0.5, 1 << 10).unwrap();
        assert_eq!(m.span_condition(), Decision::Holds);
        let m =
            RotationIII::with_gamma(&alpha(), &"sqrt(2)".parse().unwrap(), 0.5, 1 << 10).unwrap();
        assert_eq!(m.span_condition(), Decision::Fails);
    }
}

//! Type II examples: the real line with `c` as translation, and the cone family on 𝕋×ℝ.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{ConformalityCheck, ModelSpace, TypeLabel};
use crate::error::ModelError;
use crate::lattice::GroupElement;
use crate::number::{rationally_independent, Decision, Number};
use crate::scalar::Real;

fn r<R: Real>(x: f64) -> R {
    R::from_f64(x).expect("finite constant")
}

fn tolerance<R: Real>() -> f64 {
    1e-12f64.max(1e4 * R::epsilon().as_f64())
}

const CELL: f64 = 1.0 / 1024.0;

/// `ℝ` with `t+e₁ = t+1`, `t+e₂ = t+θ`, `X = [0, ∞)` and `dm = βe^{−βt}dt`.
#[derive(Clone, Debug)]
pub struct RealLine<R> {
    beta: R,
    theta: R,
    theta_form: Number,
}

impl<R: Real> RealLine<R> {
    /// Rejects `θ` known to be rational (the action would not be free).
    pub fn new(beta: R, theta: &Number) -> Result<Self, ModelError> {
        if !(beta > R::zero()) {
            return Err(ModelError::InvalidParameter(format!(
                "beta = {beta:?} must be positive"
            )));
        }
        if theta.is_rational() == Some(true) {
            return Err(ModelError::InvalidParameter(format!(
                "theta = {theta} is rational; the action is not free"
            )));
        }
        if !(theta.value() > 0.0) {
            return Err(ModelError::InvalidParameter(format!(
                "theta = {theta} must be positive"
            )));
        }
        Ok(RealLine {
            beta,
            theta: r(theta.value()),
            theta_form: theta.clone(),
        })
    }

    /// Whether irrationality of θ was decided or only assumed.
    pub fn theta_irrational(&self) -> Decision {
        match self.theta_form.is_rational() {
            Some(false) => Decision::Holds,
            Some(true) => Decision::Fails,
            None => Decision::Assumed,
        }
    }

    pub fn c(&self, s: GroupElement) -> R {
        r::<R>(s.a as f64) + r::<R>(s.b as f64) * self.theta
    }

    /// `m([a, b)) = e^{−βa} − e^{−βb}`.
    pub fn interval(&self, a: R, b: R) -> R {
        if b <= a {
            return R::zero();
        }
        (-self.beta * a).exp() - (-self.beta * b).exp()
    }

    /// A lattice point `s` with `t₁ < c(s) < t₂` (so `s ∈ Q_{t₂} \ Q_{t₁}`),
    /// searching `|n| ≤ W` for `W = 1, 2, 4, …`; returns it with the window used.
    pub fn separate(&self, t1: R, t2: R, max_window: i64) -> Option<(GroupElement, i64)> {
        let (lo, hi) = if t1 < t2 { (t1, t2) } else { (t2, t1) };
        if !(lo < hi) {
            return None;
        }
        let mut w = 1i64;
        while w <= max_window {
            for n in -w..=w {
                let nt = r::<R>(n as f64) * self.theta;
                let m = (lo - nt).floor() + R::one();
                let v = m + nt;
                if v > lo && v < hi {
                    return Some((GroupElement::new(m.to_i64()?, n), w));
                }
            }
            w *= 2;
        }
        None
    }
}

impl<R: Real> ModelSpace for RealLine<R> {
    type Point = R;

    fn name(&self) -> &'static str {
        "real-line"
    }

    fn beta(&self) -> f64 {
        self.beta.as_f64()
    }

    fn theta(&self) -> f64 {
        self.theta.as_f64()
    }

    fn act(&self, t: &R, s: GroupElement) -> R {
        *t + self.c(s)
    }

    fn in_x(&self, t: &R) -> bool {
        *t >= R::zero()
    }

    fn height(&self, t: &R) -> f64 {
        t.as_f64()
    }

    fn cocycle(&self, _s: GroupElement, _t: &R) -> f64 {
        0.0
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> R {
        r(rng.random_range(-5.0..5.0))
    }

    fn same(&self, a: &R, b: &R) -> bool {
        (*a - *b).abs().as_f64() <= tolerance::<R>() * (1.0 + a.abs().as_f64()) * 1e3
    }

    fn log_rn(&self, s: GroupElement, t: &R) -> f64 {
        let log_density = |u: R| (self.beta.ln() - self.beta * u).as_f64();
        log_density(self.act(t, s)) - log_density(*t)
    }

    fn recurrences(&self, t: &R, _rng: &mut ChaCha8Rng) -> Vec<GroupElement> {
        let mut out = Vec::new();
        let theta = self.theta.as_f64();
        for n in 1..1_000_000i64 {
            for n in [n, -n] {
                let m = (-(n as f64) * theta).round() as i64;
                let s = GroupElement::new(m, n);
                if (self.act(t, s) - *t).abs().as_f64() < CELL {
                    out.push(s);
                }
            }
            if out.len() >= 3 {
                break;
            }
        }
        out
    }

    fn conformality(&self, trials: usize, seed: u64) -> ConformalityCheck {
        use rand::SeedableRng;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut worst: f64 = 0.0;
        for i in 0..trials {
            let (a, b, s) = if i == 0 {
                (0.0, 1.0, GroupElement::E1)
            } else {
                let a = rng.random_range(-1.0..4.0);
                (
                    a,
                    a + rng.random_range(0.0..2.0),
                    GroupElement::new(rng.random_range(-3..=3), rng.random_range(-3..=3)),
                )
            };
            let (a, b): (R, R) = (r(a), r(b));
            let c = self.c(s);
            let lhs = self.interval(a + c, b + c);
            let rhs = (-self.beta * c).exp() * self.interval(a, b);
            worst = worst.max((lhs - rhs).abs().as_f64());
        }
        ConformalityCheck {
            family: "intervals [a,b) translated by c(s)".into(),
            checked: trials,
            max_deviation: worst,
            tol: tolerance::<R>(),
        }
    }

    fn type_label(&self) -> TypeLabel {
        TypeLabel::cited(
            "II",
            "translation by a dense rank-two subgroup of the reals",
        )
    }
}

/// Point of 𝕋×ℝ with the angle reduced to `[0, 1)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConePoint<R> {
    pub x: R,
    pub y: R,
}

/// 𝕋×ℝ with `+e₁ = +(0, 1)`, `+e₂ = +(α, θ)`, `X = {y ≥ (δ/α)x}` and
/// `dμ = e^{−βy}dx dy` normalized so that `μ(X) = 1`.
#[derive(Clone, Debug)]
pub struct Cone<R> {
    delta: R,
    alpha: R,
    theta: R,
    beta: R,
    kappa: R,
    norm: R,
    independence: Decision,
}

impl<R: Real> Cone<R> {
    pub fn new(delta: R, alpha: &Number, theta: &Number, beta: R) -> Result<Self, ModelError> {
        let (a, t) = (alpha.value(), theta.value());
        let bad = |m: String| Err(ModelError::InvalidParameter(m));
        if !(a > 0.0 && a < 1.0) {
            return bad(format!("alpha = {alpha} must lie in (0,1)"));
        }
        if !(t > 0.0) {
            return bad(format!("theta = {theta} must be positive"));
        }
        if !(delta > R::zero() && delta.as_f64() <= t) {
            return bad(format!("delta = {delta:?} must lie in (0, theta]"));
        }
        if !(beta > R::zero()) {
            return bad(format!("beta = {beta:?} must be positive"));
        }
        let independence = rationally_independent(alpha, theta);
        if independence == Decision::Fails {
            return bad(format!(
                "1, alpha = {alpha}, theta = {theta} are rationally dependent"
            ));
        }
        let alpha: R = r(a);
        let kappa = delta / alpha;
        let norm = (R::one() - (-beta * kappa).exp()) / (beta * beta * kappa);
        Ok(Cone {
            delta,
            alpha,
            theta: r(t),
            beta,
            kappa,
            norm,
            independence,
        })
    }

    pub fn independence(&self) -> Decision {
        self.independence
    }

    pub fn slope(&self) -> R {
        self.kappa
    }

    pub fn delta(&self) -> R {
        self.delta
    }

    fn frac(x: R) -> R {
        x - x.floor()
    }

    /// `μ` of `{(x,y) : x ∈ arc [x0, x0+w), y ∈ [y0, y1), y ≥ oy + κ·frac(x − ox)}`.
    /// With `oy = −∞` this is a plain rectangle.
    pub fn mass(&self, x0: R, w: R, y0: R, y1: R, ox: R, oy: R) -> R {
        let (b, k) = (self.beta, self.kappa);
        let x0 = Self::frac(x0);
        let mut pieces = vec![(x0, (x0 + w).min(R::one()))];
        if x0 + w > R::one() {
            pieces.push((R::zero(), x0 + w - R::one()));
        }
        let cut = Self::frac(ox);
        let mut split = Vec::new();
        for (a, e) in pieces {
            if a < cut && cut < e {
                split.push((a, cut));
                split.push((cut, e));
            } else {
                split.push((a, e));
            }
        }
        let top = (-b * y1).exp();
        let mut total = R::zero();
        for (a, e) in split {
            if oy == R::neg_infinity() {
                total = total + (e - a) * ((-b * y0).exp() - top) / b;
                continue;
            }
            // on this piece the boundary is g(x) = base + κx
            let mid = (a + e) / r(2.0);
            let base = oy + k * Self::frac(mid - ox) - k * mid;
            let at = |y: R| (y - base) / k;
            let (xa, xb) = (at(y0).max(a).min(e), at(y1).max(a).min(e));
            // [a, xa): g ≤ y0; [xa, xb): y0 < g < y1; [xb, e): g ≥ y1
            total = total + (xa - a) * ((-b * y0).exp() - top) / b;
            let ramp = (-b * base).exp() * ((-b * k * xa).exp() - (-b * k * xb).exp()) / (b * k);
            total = total + (ramp - (xb - xa) * top) / b;
        }
        total / self.norm
    }
}

impl<R: Real> ModelSpace for Cone<R> {
    type Point = ConePoint<R>;

    fn name(&self) -> &'static str {
        "cone"
    }

    fn beta(&self) -> f64 {
        self.beta.as_f64()
    }

    fn theta(&self) -> f64 {
        self.theta.as_f64()
    }

    fn act(&self, p: &ConePoint<R>, s: GroupElement) -> ConePoint<R> {
        let (a, b): (R, R) = (r(s.a as f64), r(s.b as f64));
        ConePoint {
            x: Self::frac(p.x + b * self.alpha),
            y: p.y + a + b * self.theta,
        }
    }

    fn in_x(&self, p: &ConePoint<R>) -> bool {
        p.y >= self.kappa * p.x
    }

    fn height(&self, p: &ConePoint<R>) -> f64 {
        p.y.as_f64()
    }

    fn cocycle(&self, _s: GroupElement, _p: &ConePoint<R>) -> f64 {
        0.0
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> ConePoint<R> {
        ConePoint {
            x: r(rng.random_range(0.0..1.0)),
            y: r(rng.random_range(-3.0..5.0)),
        }
    }

    fn same(&self, p: &ConePoint<R>, q: &ConePoint<R>) -> bool {
        let dx = (p.x - q.x).abs().as_f64();
        let tol = 1e3 * tolerance::<R>();
        dx.min(1.0 - dx) <= tol && (p.y - q.y).abs().as_f64() <= tol * (1.0 + p.y.abs().as_f64())
    }

    fn log_rn(&self, s: GroupElement, p: &ConePoint<R>) -> f64 {
        let log_density = |q: &ConePoint<R>| (-self.beta * q.y - self.norm.ln()).as_f64();
        log_density(&self.act(p, s)) - log_density(p)
    }

    fn recurrences(&self, p: &ConePoint<R>, _rng: &mut ChaCha8Rng) -> Vec<GroupElement> {
        let mut out = Vec::new();
        for n in 1..1_000_000i64 {
            for n in [n, -n] {
                let q = self.act(p, GroupElement::new(0, n));
                let dx = (q.x - p.x).abs().as_f64();
                if dx.min(1.0 - dx) < CELL {
                    let m = -(q.y - p.y).round().to_i64().unwrap_or(0);
                    out.push(GroupElement::new(m, n));
                }
            }
            if out.len() >= 3 {
                break;
            }
        }
        out
    }

    fn conformality(&self, trials: usize, seed: u64) -> ConformalityCheck {
        use rand::SeedableRng;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut worst: f64 = (self.mass(
            R::zero(),
            R::one(),
            R::zero(),
            R::infinity(),
            R::zero(),
            R::zero(),
        ) - R::one())
        .abs()
        .as_f64();
        for _ in 0..trials {
            let x0: R = r(rng.random_range(0.0..1.0));
            let w: R = r(rng.random_range(0.05..0.9));
            let y0: R = r(rng.random_range(-1.0..3.0));
            let y1 = y0 + r(rng.random_range(0.1..3.0));
            let s = GroupElement::new(rng.random_range(-3..=3), rng.random_range(-3..=3));
            let shift = self.act(
                &ConePoint {
                    x: R::zero(),
                    y: R::zero(),
                },
                s,
            );
            let (sx, c) = (r::<R>(s.b as f64) * self.alpha, shift.y);
            // (E ∩ X) + s = (E + s) ∩ (X + s)
            let lhs = self.mass(x0 + sx, w, y0 + c, y1 + c, sx, c);
            let rhs = (-self.beta * c).exp() * self.mass(x0, w, y0, y1, R::zero(), R::zero());
            worst = worst.max((lhs - rhs).abs().as_f64());
        }
        ConformalityCheck {
            family: "rectangles cut by the cone, translated by s".into(),
            checked: trials + 1,
            max_deviation: worst,
            tol: tolerance::<R>(),
        }
    }

    fn type_label(&self) -> TypeLabel {
        TypeLabel::cited(
            "II",
            "cone over a dense rotation with translation in height",
        )
    }
}

use serde::Serialize;

use super::{existence_gate, Cylinder};
use crate::error::MeasureError;
use crate::lattice::Potential;
use crate::scalar::Scalar;
use crate::symbolic::{birkhoff, BiSeq};

/// Largest truncation radius tried before giving up on a slowly converging orbit.
const MAX_RADIUS: i64 = 1 << 22;

/// Conformal probability measure carried by the orbit `{τⁿx}`.
#[derive(Clone, Debug, Serialize)]
pub struct AtomicOrbit {
    #[serde(serialize_with = "super::serialize_display")]
    base: BiSeq,
    beta: f64,
    theta: f64,
    first: i64,
    weights: Vec<f64>,
    log_norm: f64,
    tail_bound: f64,
    period: Option<usize>,
}

impl AtomicOrbit {
    pub fn base(&self) -> &BiSeq {
        &self.base
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// `log Z` with `Z = Σₙ e^{−βSₙ(χ)(x)}` (over one period for periodic orbits).
    pub fn log_norm(&self) -> f64 {
        self.log_norm
    }

    /// Certified upper bound on the mass of orbit points left out of `points()`.
    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    pub fn period(&self) -> Option<usize> {
        self.period
    }

    /// Index range `[first, last]` of stored orbit points.
    pub fn range(&self) -> (i64, i64) {
        (self.first, self.first + self.weights.len() as i64 - 1)
    }

    /// `(n, wₙ)` for every stored orbit point `τⁿx`.
    pub fn points(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.weights
            .iter()
            .enumerate()
            .map(move |(i, &w)| (self.first + i as i64, w))
    }

    pub fn weight(&self, n: i64) -> f64 {
        let i = n - self.first;
        if i < 0 || i >= self.weights.len() as i64 {
            0.0
        } else {
            self.weights[i as usize]
        }
    }

    pub fn mass(&self, c: &Cylinder) -> f64 {
        self.points()
            .filter(|&(n, _)| c.contains_shift(&self.base, n))
            .map(|(_, w)| w)
            .sum()
    }
}

/// Conformal measure on the orbit of `x`.
///
/// Periodic points need `S_p(χ)(x) = 0`; their `p` atoms get weights `∝ e^{−βSₙ}`. Aperiodic
/// points need the two-sided series `Σ e^{−βSₙ}` to converge; it is truncated
/// where the closed-form geometric tail of the periodic ends drops below
/// `tol/4` on each side, and that tail mass is stored as the certified bound.
pub fn orbit_measure<S: Scalar>(
    x: &BiSeq,
    pot: &Potential<S>,
    tol: f64,
) -> Result<AtomicOrbit, MeasureError> {
    let p64 = pot.to_f64();
    if !existence_gate(pot)? {
        return Err(MeasureError::GateClosed {
            beta: p64.beta,
            theta: p64.theta,
        });
    }
    if let Some(p) = x.is_periodic() {
        let sp = birkhoff(x, p as i64, pot);
        if !sp.is_negligible(p as f64) {
            return Err(MeasureError::PeriodicObstruction {
                period: p,
                sum: sp.as_f64(),
            });
        }
        // w_{n+1} = e^{−βχ(τⁿx)} w_n closes up because S_p = 0
        let logs: Vec<f64> = (0..p as i64)
            .map(|n| -p64.beta * birkhoff(x, n, &p64))
            .collect();
        let shift = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let z: f64 = logs.iter().map(|l| (l - shift).exp()).sum();
        return Ok(AtomicOrbit {
            base: x.clone(),
            beta: p64.beta,
            theta: p64.theta,
            first: 0,
            weights: logs.iter().map(|l| (l - shift).exp() / z).collect(),
            log_norm: z.ln() + shift,
            tail_bound: 0.0,
            period: Some(p),
        });
    }

    let (pl, pr) = (x.left_period().len() as i64, x.right_period().len() as i64);
    let kl = x.left_period().iter().filter(|&&b| b).count() as i64;
    let kr = x.right_period().iter().filter(|&&b| b).count() as i64;
    // growth of Sₙ per period as n → +∞ (left tail) and n → −∞ (right tail)
    let drift_fwd = S::from_int(pl) - pot.one_plus_theta() * S::from_int(kl);
    let drift_bwd = pot.one_plus_theta() * S::from_int(kr) - S::from_int(pr);
    for (side, d) in [("forward", &drift_fwd), ("backward", &drift_bwd)] {
        if *d <= S::zero() || d.is_negligible(1.0) {
            return Err(MeasureError::DivergentSeries {
                side,
                drift: d.as_f64(),
            });
        }
    }
    let beta = p64.beta;
    let s = |n: i64| birkhoff(x, n, &p64);
    let ratio_f = (-beta * drift_fwd.as_f64()).exp();
    let ratio_b = (-beta * drift_bwd.as_f64()).exp();

    let base_f = (-x.lo()).max(1);
    let base_b = x.hi().max(1);
    let (mut jf, mut jb) = (0u32, 0u32);
    loop {
        let nf = base_f + pl * ((1i64 << jf) - 1);
        let nb = base_b + pr * ((1i64 << jb) - 1);
        if nf > MAX_RADIUS || nb > MAX_RADIUS {
            return Err(MeasureError::InvalidParameter(format!(
                "orbit series converges too slowly to truncate at tolerance {tol:e}"
            )));
        }
        let logs: Vec<f64> = (-nb..=nf).map(|n| -beta * s(n)).collect();
        let shift = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let window: f64 = logs.iter().map(|l| (l - shift).exp()).sum();
        let tail_f: f64 = (1..=pl)
            .map(|k| (-beta * s(nf + k) - shift).exp())
            .sum::<f64>()
            / (1.0 - ratio_f);
        let tail_b: f64 = (1..=pr)
            .map(|k| (-beta * s(-nb - k) - shift).exp())
            .sum::<f64>()
            / (1.0 - ratio_b);
        let ok_f = tail_f / window <= tol / 4.0;
        let ok_b = tail_b / window <= tol / 4.0;
        if ok_f && ok_b {
            let z = window + tail_f + tail_b;
            return Ok(AtomicOrbit {
                base: x.clone(),
                beta,
                theta: p64.theta,
                first: -nb,
                weights: logs.iter().map(|l| (l - shift).exp() / z).collect(),
                log_norm: z.ln() + shift,
                // relative slack for the tail sums, absolute slack for summation rounding
                tail_bound: (tail_f + tail_b) / z * (1.0 + 1e-9)
                    + 4.0 * f64::EPSILON * logs.len() as f64,
                period: None,
            });
        }
        if !ok_f {
            jf += 1;
        }
        if !ok_b {
            jb += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rational;
    use crate::symbolic::chi;

    #[test]
    fn fixed_point_all_ones_at_theta_zero() {
        let m = orbit_measure(&BiSeq::constant(true), &Potential::new(1.0, 0.0), 1e-10).unwrap();
        assert_eq!(m.points().collect::<Vec<_>>(), vec![(0, 1.0)]);
    }

    #[test]
    fn periodic_weights_follow_the_cocycle() {
        // period 01 at θ = 1: χ alternates, S₂ = 0
        let x: BiSeq = "(01)* . (01)*".parse().unwrap();
        let pot = Potential::new(0.9, 1.0);
        let m = orbit_measure(&x, &pot, 1e-12).unwrap();
        assert_eq!(m.period(), Some(2));
        let ratio = m.weight(1) / m.weight(0);
        assert!((ratio - (-0.9f64 * chi(&x, &pot)).exp()).abs() < 1e-14);
        assert!((m.weight(0) + m.weight(1) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn periodic_obstruction() {
        let err =
            orbit_measure(&BiSeq::constant(true), &Potential::new(1.0, 0.5), 1e-10).unwrap_err();
        assert!(matches!(
            err,
            MeasureError::PeriodicObstruction { period: 1, .. }
        ));
        let exact = Potential::new(rational(1, 1), rational(1, 2));
        assert!(orbit_measure(&BiSeq::constant(true), &exact, 1e-10).is_err());
    }

    #[test]
    fn step_sequence_weight_is_tanh() {
        let m = orbit_measure(&BiSeq::step(), &Potential::new(1.0, 1.0), 1e-13).unwrap();
        // oracle: partial sums of e^{-|n|}
        let z: f64 = (-200i64..=200).map(|n| (-(n.abs() as f64)).exp()).sum();
        assert!((m.weight(0) - 1.0 / z).abs() < 1e-13);
        assert!((m.weight(0) - 0.5f64.tanh()).abs() < 1e-13);
    }

    #[test]
    fn gate_and_divergence() {
        assert!(matches!(
            orbit_measure(&BiSeq::step(), &Potential::new(-1.0, 1.0), 1e-10),
            Err(MeasureError::GateClosed { .. })
        ));
        assert!(matches!(
            orbit_measure(&BiSeq::step(), &Potential::new(0.0, 1.0), 1e-10),
            Err(MeasureError::TracialRegime)
        ));
        // right tail of zeros: S_{-n} = -n, the backward series diverges
        let x: BiSeq = "(1)* . (0)*".parse().unwrap();
        assert!(matches!(
            orbit_measure(&x, &Potential::new(1.0, 0.5), 1e-10),
            Err(MeasureError::DivergentSeries {
                side: "forward",
                ..
            }) | Err(MeasureError::DivergentSeries {
                side: "backward",
                ..
            })
        ));
        // theta = 0 and the step sequence: backward drift is θ = 0
        assert!(matches!(
            orbit_measure(&BiSeq::step(), &Potential::new(1.0, 0.0), 1e-10),
            Err(MeasureError::DivergentSeries {
                side: "backward",
                ..
            })
        ));
    }

    #[test]
    fn one_step_cocycle_relation() {
        let pot = Potential::new(1.3, 0.7);
        let x: BiSeq = "(0001)* 01 . 1 (1)*".parse().unwrap();
        let m = orbit_measure(&x, &pot, 1e-12).unwrap();
        let (lo, hi) = m.range();
        for n in lo..hi {
            let lhs = m.weight(n + 1).ln();
            let rhs = m.weight(n).ln() - pot.beta * chi(&x.shift(n), &pot);
            assert!((lhs - rhs).abs() < 1e-12, "n={n}");
        }
    }

    #[test]
    fn tail_bound_is_certified_by_doubling() {
        let pot = Potential::new(1.3, 0.7);
        let x: BiSeq = "(0001)* . (1)*".parse().unwrap();
        let coarse = orbit_measure(&x, &pot, 1e-4).unwrap();
        let fine = orbit_measure(&x, &pot, 1e-12).unwrap();
        let captured_coarse: f64 = coarse.points().map(|(_, w)| w).sum();
        let captured_fine: f64 = fine.points().map(|(_, w)| w).sum();
        assert!(1.0 - captured_coarse <= coarse.tail_bound());
        assert!((captured_fine - captured_coarse).abs() <= coarse.tail_bound());
        assert!((captured_coarse + coarse.tail_bound() - 1.0).abs() < 1e-12);
        assert!(coarse.tail_bound() < 1e-4);
    }
}

//! Numerical conformal measure for a rotation with a step potential:
//! the probability `ν` on 𝕋 with `ν(R_α E) = ∫_E e^{−βF} dν`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::conformal::CircleDensity;
use crate::error::ModelError;
use crate::scalar::rational_from_f64;
use crate::step::StepFunction;

/// Output of [`transfer_density_estimate`].
#[derive(Clone, Debug, Serialize)]
pub struct DensityEstimate {
    /// Piecewise-constant density on `grid_size` uniform cells, mean 1.
    pub density: StepFunction,
    pub grid_size: usize,
    /// `p/q`: the convergent of α the operator was discretized with.
    pub rotation: (u64, u64),
    /// L¹ change of one application of the discretized operator at the returned density.
    pub residual: f64,
    pub iterations: usize,
    /// Largest `|ν(R_α[0,x)) − ∫_{[0,x)} e^{−βF}dν|` over 64 arcs, with the true α.
    pub rn_defect: f64,
}

impl DensityEstimate {
    pub fn measure(&self, beta: f64) -> CircleDensity {
        CircleDensity::new(self.density.clone(), beta).expect("estimate is a probability density")
    }
}

/// Convergents `p/q` of the binary value of `alpha ∈ (0,1)`, denominators up to `max_den`.
fn convergents(alpha: f64, max_den: u64) -> Vec<(u64, u64)> {
    let r = rational_from_f64(alpha).expect("finite alpha");
    let (mut num, mut den): (BigInt, BigInt) = (r.numer().clone(), r.denom().clone());
    let (mut p0, mut p1, mut q0, mut q1) = (1u128, 0u128, 0u128, 1u128);
    let mut out = Vec::new();
    let mut first = true;
    while !den.is_zero() {
        let (a, rem) = num.div_rem(&den);
        (num, den) = (den, rem);
        if first {
            // integer part of a number in (0,1)
            first = false;
            continue;
        }
        let a = a.abs().to_u128().unwrap_or(u128::MAX / 4);
        let (p2, q2) = (a.saturating_mul(p1) + p0, a.saturating_mul(q1) + q0);
        if q2 > max_den as u128 {
            break;
        }
        out.push((p2 as u64, q2 as u64));
        (p0, p1, q0, q1) = (p1, p2, q1, q2);
    }
    out
}

/// Estimates the conformal measure of `(R_α, e^{−βF})` as a density on
/// `grid_size` cells.
///
/// A plain power iteration of `ν ↦ normalize(E ↦ ∫_{R_α⁻¹E} e^{−βF}dν)` does
/// not settle for an irrational rotation, so the operator is discretized with
/// a convergent `p/q` of α (`q ≥ grid_size`, and at most `64·grid_size`).
/// On the `q`-cell grid the rotation is one cycle and the fixed point follows
/// the cycle: `w_{i+p} = w_i d_i / g` with `d_i` the cell average of `e^{−βF}`
/// and `g` their geometric mean. Power iteration then runs from that point
/// until the L¹ change is at most `tol`. The cell masses are resampled onto
/// the output grid through the distribution function.
pub fn transfer_density_estimate(
    f: &StepFunction,
    alpha: f64,
    beta: f64,
    grid_size: usize,
    max_iter: usize,
    tol: f64,
) -> Result<DensityEstimate, ModelError> {
    if grid_size < 1 << 10 || !grid_size.is_power_of_two() {
        return Err(ModelError::InvalidParameter(format!(
            "grid size {grid_size} must be a power of two >= 1024"
        )));
    }
    if !(alpha > 0.0 && alpha < 1.0) || !beta.is_finite() {
        return Err(ModelError::InvalidParameter(format!(
            "need alpha in (0,1) and finite beta, got {alpha}, {beta}"
        )));
    }
    let cap = 64 * grid_size as u64;
    let conv = convergents(alpha, cap);
    let &(p, q) = conv
        .iter()
        .find(|&&(_, q)| q >= grid_size as u64)
        .or(conv.last())
        .ok_or_else(|| {
            ModelError::InvalidParameter(format!("alpha = {alpha} has no usable convergent"))
        })?;
    if q < 2 {
        return Err(ModelError::InvalidParameter(format!(
            "alpha = {alpha} is too close to a rational"
        )));
    }
    let (pu, qu) = (p as usize, q as usize);
    let weight = f.map(|v| (-beta * v).exp());
    let d: Vec<f64> = (0..qu)
        .map(|i| q as f64 * weight.integral(i as f64 / q as f64, (i + 1) as f64 / q as f64))
        .collect();
    let mean_log = d.iter().map(|v| v.ln()).sum::<f64>() / q as f64;
    let mut log_w = vec![0.0; qu];
    let mut i = 0usize;
    for _ in 0..qu - 1 {
        let next = (i + pu) % qu;
        log_w[next] = log_w[i] + d[i].ln() - mean_log;
        i = next;
    }
    let top = log_w.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut w: Vec<f64> = log_w.iter().map(|l| (l - top).exp()).collect();
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|v| *v /= total);

    let step = |w: &[f64]| -> Vec<f64> {
        let mut out = vec![0.0; qu];
        for (i, &wi) in w.iter().enumerate() {
            out[(i + pu) % qu] = wi * d[i];
        }
        let s: f64 = out.iter().sum();
        out.iter_mut().for_each(|v| *v /= s);
        out
    };
    let mut iterations = 0;
    let residual = loop {
        let next = step(&w);
        let change: f64 = next.iter().zip(&w).map(|(a, b)| (a - b).abs()).sum();
        if change <= tol {
            break change;
        }
        if iterations >= max_iter {
            return Err(ModelError::NoConvergence {
                iterations,
                residual: change,
            });
        }
        w = next;
        iterations += 1;
    };

    let mut cdf = Vec::with_capacity(qu + 1);
    cdf.push(0.0);
    let mut acc = 0.0;
    for v in &w {
        acc += v;
        cdf.push(acc);
    }
    let at = |x: f64| {
        let pos = x * q as f64;
        let k = (pos.floor() as usize).min(qu - 1);
        cdf[k] + (pos - k as f64) * w[k]
    };
    let n = grid_size;
    let values: Vec<f64> = (0..n)
        .map(|j| (at((j + 1) as f64 / n as f64) - at(j as f64 / n as f64)) * n as f64)
        .collect();
    let density = StepFunction::uniform(values);
    let nu = CircleDensity::new(density.clone(), beta)
        .map_err(|e| ModelError::InvalidParameter(e.to_string()))?;
    let weighted = nu.density().combine(&weight, |a, b| a * b);
    let rn_defect = (1..64)
        .map(|j| {
            let x = j as f64 / 64.0;
            (nu.interval(alpha, alpha + x) - weighted.integral(0.0, x)).abs()
        })
        .fold(0.0, f64::max);
    Ok(DensityEstimate {
        density: nu.density().clone(),
        grid_size,
        rotation: (p, q),
        residual,
        iterations,
        rn_defect,
    })
}

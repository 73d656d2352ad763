//! The binary example: a doubly symmetric source `X2 = X1 ⊕ Bern(p)`, output
//! `Y = X1 ⊕ X2 ⊕ Bern(q)`, auxiliaries `W_i = X_i ⊕ Bern(θ_i)` and a trivial
//! time-sharing variable.

use rayon::prelude::*;
use serde::Serialize;

use super::{beta_region, min_sum_rate, AuxPmf, LinearInequalitySystem, RegionError, Result};
use crate::prob::JointPmf;

/// `a(1 - b) + b(1 - a)`: the flip probability of two cascaded BSCs.
pub fn bsc_convolve(a: f64, b: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&a) || !(0.0..=1.0).contains(&b) {
        return Err(RegionError::Invalid(format!("crossover probabilities {a}, {b} outside [0, 1]")));
    }
    Ok(a * (1.0 - b) + b * (1.0 - a))
}

/// Largest symmetric θ with `bsc_convolve(θ, θ) <= q`.
pub fn theta_max(q: f64) -> f64 {
    let q = q.clamp(0.0, 0.5);
    (1.0 - (1.0 - 2.0 * q).sqrt()) / 2.0
}

fn output_flip(q: f64, theta_bar: f64) -> Result<f64> {
    // tiny negative slack appears at the θ = θ_max boundary
    let gap = q - theta_bar;
    if gap < -1e-12 {
        return Err(RegionError::Invalid(format!("test-channel noise {theta_bar} exceeds output noise {q}")));
    }
    Ok((gap.max(0.0) / (1.0 - 2.0 * theta_bar)).min(0.5))
}

pub fn example1_aux(p: f64, q: f64, theta1: f64, theta2: f64) -> Result<AuxPmf<f64>> {
    if !(0.0..=0.5).contains(&p) || !(0.0..=0.5).contains(&q) {
        return Err(RegionError::Invalid(format!("flip probabilities ({p}, {q}) outside [0, 1/2]")));
    }
    let theta_bar = bsc_convolve(theta1, theta2)?;
    let qp = output_flip(q, theta_bar)?;
    let flip = |t: f64, a: usize, b: usize| if a == b { 1.0 - t } else { t };
    let joint = JointPmf::from_fn(&[1, 2, 2, 2, 2, 2], |i| {
        let (w1, w2, x1, x2, y) = (i[1], i[2], i[3], i[4], i[5]);
        0.5 * flip(p, x1, x2) * flip(theta1, x1, w1) * flip(theta2, x2, w2) * flip(qp, w1 ^ w2, y)
    })?;
    AuxPmf::new(joint)
}

/// Target `p_{X1 X2 Y}` of the example.
pub fn example1_target(p: f64, q: f64) -> Result<JointPmf<f64>> {
    let flip = |t: f64, a: usize, b: usize| if a == b { 1.0 - t } else { t };
    Ok(JointPmf::from_fn(&[2, 2, 2], |i| 0.5 * flip(p, i[0], i[1]) * flip(q, i[0] ^ i[1], i[2]))?)
}

/// One point of the symmetric family `θ1 = θ2 = θ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThetaPoint {
    pub theta: f64,
    pub structured_min: f64,
    pub unstructured_bound: f64,
}

fn structured_at(p: f64, q: f64, theta: f64) -> Result<f64> {
    let aux = example1_aux(p, q, theta, theta)?;
    let sys: LinearInequalitySystem<f64> = beta_region(&aux)?;
    min_sum_rate(&sys)
}

fn unstructured_at(p: f64, q: f64, theta: f64) -> Result<f64> {
    Ok(example1_aux(p, q, theta, theta)?.unstructured_sum_bound())
}

fn grid(q: f64, points: usize) -> Vec<f64> {
    let hi = theta_max(q);
    if points <= 1 || hi == 0.0 {
        return vec![0.0];
    }
    (0..points).map(|i| hi * i as f64 / (points - 1) as f64).collect()
}

/// Both sum-rate curves on a uniform grid of `points` values of θ.
pub fn theta_sweep(p: f64, q: f64, points: usize) -> Result<Vec<ThetaPoint>> {
    grid(q, points)
        .into_par_iter()
        .map(|theta| {
            Ok(ThetaPoint {
                theta,
                structured_min: structured_at(p, q, theta)?,
                unstructured_bound: unstructured_at(p, q, theta)?,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Example1Min {
    pub value: f64,
    pub theta: f64,
}

/// Grid search then golden-section refinement around the best grid cell.
fn minimize_over_theta(q: f64, points: usize, f: impl Fn(f64) -> Result<f64> + Sync) -> Result<Example1Min> {
    let thetas = grid(q, points);
    let values: Vec<f64> = thetas.par_iter().map(|&t| f(t)).collect::<Result<_>>()?;
    let (best, &value) = values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .ok_or(RegionError::Infeasible)?;
    let mut out = Example1Min {
        value,
        theta: thetas[best],
    };
    if thetas.len() < 3 {
        return Ok(out);
    }
    let (mut a, mut b) = (thetas[best.saturating_sub(1)], thetas[(best + 1).min(thetas.len() - 1)]);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    for _ in 0..60 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d)?;
        }
    }
    for (t, v) in [(c, fc), (d, fd)] {
        if v < out.value {
            out = Example1Min { value: v, theta: t };
        }
    }
    Ok(out)
}

/// Minimum over the symmetric family of the smallest `R1 + R2 + C`.
pub fn example1_structured_min(p: f64, q: f64) -> Result<Example1Min> {
    example1_structured_min_on(p, q, 10_000)
}

pub fn example1_structured_min_on(p: f64, q: f64, points: usize) -> Result<Example1Min> {
    minimize_over_theta(q, points, |t| structured_at(p, q, t))
}

/// Minimum over the symmetric family of `I(X1 X2 Y; W1 W2)`.
pub fn example1_unstructured_sum_min(p: f64, q: f64) -> Result<Example1Min> {
    minimize_over_theta(q, 10_000, |t| unstructured_at(p, q, t))
}

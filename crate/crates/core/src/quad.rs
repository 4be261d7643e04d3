//! Tanh-sinh (double-exponential) quadrature at arbitrary precision.
//!
//! Abscissas are stored as their distance to the nearer endpoint, so integrands
//! with a removable singularity at an endpoint are sampled without cancellation.

use rug::float::Constant;
use rug::{Assign, Float};

use crate::error::{Error, Result};
use crate::precision::log2_abs;

#[derive(Clone, Debug)]
struct Node {
    /// `1 − |x|` for the abscissa `x ∈ (−1, 1)`.
    comp: Float,
    weight: Float,
}

/// Precomputed tanh-sinh rule on `[−1, 1]` with step halving.
#[derive(Clone, Debug)]
pub struct TanhSinh {
    prec: u32,
    /// `levels[m]` holds the new nodes of step `2^-m` (`t = k·2^-m`, `k` odd for
    /// `m > 0`), for `t ≥ 0` only; the rule is symmetric.
    levels: Vec<Vec<Node>>,
}

/// Value and convergence data of one quadrature.
#[derive(Clone, Debug)]
pub struct QuadResult {
    pub value: Float,
    /// `|S_m − S_(m−1)|` at the final level.
    pub error_estimate: Float,
    pub levels_used: usize,
}

impl TanhSinh {
    pub const DEFAULT_MAX_LEVEL: usize = 10;

    pub fn new(prec: u32) -> Self {
        Self::with_max_level(prec, Self::DEFAULT_MAX_LEVEL)
    }

    pub fn with_max_level(prec: u32, max_level: usize) -> Self {
        let half_pi = Float::with_val(prec, Constant::Pi) / 2u32;
        let cutoff = -(f64::from(prec) + 40.0);
        let mut levels = Vec::with_capacity(max_level + 1);
        for m in 0..=max_level {
            let h = Float::with_val(prec, 1) >> m as u32;
            let mut nodes = Vec::new();
            let mut k: u64 = if m == 0 { 0 } else { 1 };
            loop {
                let t = Float::with_val(prec, &h * k);
                let v = Float::with_val(prec, t.sinh_ref()) * &half_pi;
                // 1 − tanh v = 2 / (1 + e^(2v))
                let e2v = Float::with_val(prec, &v * 2u32).exp();
                let comp = Float::with_val(prec, 2u32) / (e2v + 1u32);
                let cosh_v = Float::with_val(prec, v.cosh_ref());
                let weight = Float::with_val(prec, t.cosh_ref()) * &half_pi
                    / Float::with_val(prec, cosh_v.square_ref());
                if log2_abs(&weight) < cutoff {
                    break;
                }
                nodes.push(Node { comp, weight });
                k += if m == 0 { 1 } else { 2 };
            }
            levels.push(nodes);
        }
        TanhSinh { prec, levels }
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }

    /// `∫_a^b f(x) dx`, halving the step until successive sums differ by at most `tol`.
    pub fn integrate<F>(&self, f: F, a: &Float, b: &Float, tol: &Float) -> Result<QuadResult>
    where
        F: Fn(&Float) -> Float,
    {
        let prec = self.prec;
        let half_width = Float::with_val(prec, b - a) / 2u32;
        let mid = Float::with_val(prec, a + b) / 2u32;
        let mut x = Float::new(prec);
        let mut offset = Float::new(prec);
        let mut raw = Float::new(prec);
        let mut previous: Option<Float> = None;
        let mut estimate = Float::new(prec);
        for (m, nodes) in self.levels.iter().enumerate() {
            for (idx, node) in nodes.iter().enumerate() {
                offset.assign(&half_width * &node.comp);
                if m == 0 && idx == 0 {
                    raw += Float::with_val(prec, f(&mid)) * &node.weight;
                    continue;
                }
                x.assign(a + &offset);
                let left = f(&x);
                x.assign(b - &offset);
                let right = f(&x);
                raw += Float::with_val(prec, left + right) * &node.weight;
            }
            let h = Float::with_val(prec, 1) >> m as u32;
            estimate.assign(&raw * &h);
            estimate *= &half_width;
            if let Some(prev) = previous.as_ref() {
                let diff = Float::with_val(prec, &estimate - prev).abs();
                if m >= 3 && diff <= *tol {
                    return Ok(QuadResult {
                        value: estimate,
                        error_estimate: diff,
                        levels_used: m + 1,
                    });
                }
            }
            previous = Some(estimate.clone());
        }
        Err(Error::NonConvergence {
            what: "tanh-sinh quadrature",
            limit: self.levels.len(),
        })
    }

    /// `∫_a^∞ f(x) dx` via `x = a + t/(1 − t)` on `[0, 1]`.
    pub fn integrate_to_infinity<F>(&self, f: F, a: &Float, tol: &Float) -> Result<QuadResult>
    where
        F: Fn(&Float) -> Float,
    {
        let prec = self.prec;
        let g = |t: &Float| {
            let one_minus = Float::with_val(prec, 1u32 - t);
            if one_minus.is_zero() {
                return Float::new(prec);
            }
            let x = Float::with_val(prec, t / &one_minus) + a;
            let jac = Float::with_val(prec, one_minus.square_ref());
            let v = f(&x);
            if v.is_zero() {
                v
            } else {
                v / jac
            }
        };
        self.integrate(g, &Float::new(prec), &Float::with_val(prec, 1), tol)
    }
}

//! Riemann's `Ξ(s) = ξ(1/2 + is)` as the Fourier transform of `k = E(h)`, and the
//! table of zeta zeros generated from its sign changes.
//!
//! With `g(x) = k(eˣ)`, which is even and decays double-exponentially,
//! `Ξ(s) = 4 ∫_ℝ g(x) cos(sx) dx` is evaluated by the trapezoidal rule at two
//! step sizes; the difference of the two sums is the reported error bound.

use rug::float::Constant;
use rug::{Assign, Complex, Float};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::par::Execution;
use crate::precision::PrecisionContext;

/// Default largest `|s|` accepted by [`ThetaSeries::xi`].
pub const DEFAULT_S_BUDGET: f64 = 200.0;
/// Grid step of the zero scan.
pub const SCAN_STEP: f64 = 0.05;
/// Version tag written into zero tables.
pub const GENERATOR_VERSION: &str = "theta-trapezoid-1";

/// First five nontrivial zeros, 30 decimals, from the published tables.
pub const LITERATURE_ZEROS: [&str; 5] = [
    "14.134725141734693790457251983562",
    "21.022039638771554992628479593897",
    "25.010857580145688763213790992563",
    "30.424876125859513210311897530584",
    "32.935061587739189690662368964075",
];

/// `h(u) = (π/2) u² (2πu² − 3) e^(−πu²)`.
pub fn hermite_h(u: &Float) -> Float {
    let prec = u.prec();
    let pi = Float::with_val(prec, Constant::Pi);
    let u2 = Float::with_val(prec, u.square_ref());
    let pu2 = Float::with_val(prec, &pi * &u2);
    let poly = Float::with_val(prec, &pu2 * 2u32) - 3u32;
    let decay = Float::with_val(prec, -&pu2).exp();
    pi / 2u32 * u2 * poly * decay
}

/// Truncated `k(u) = u^(1/2) Σ_(n≥1) h(nu)` and the trapezoid tables for `Ξ`.
#[derive(Clone, Debug)]
pub struct ThetaSeries {
    ctx: PrecisionContext,
    work: u32,
    /// Terms of the theta sum needed at `u = 1`.
    pub n_max: usize,
    /// Integration cutoff in `u`.
    pub u_max: Float,
    s_budget: f64,
    /// Fine trapezoid step; the coarse step is twice as large.
    step: Float,
    /// `g(k·step)` for `k = 0, 1, …` up to the cutoff.
    samples: Vec<Float>,
    /// `−log2` of the negligible term size relative to `|g(0)|`.
    cut_bits: u32,
}

/// `Ξ(s)` with an error bound.
#[derive(Clone, Debug)]
pub struct XiValue {
    pub value: Float,
    pub error: Float,
}

impl ThetaSeries {
    /// Tables good for `|s| ≤ s_budget` at the precision of `ctx`.
    pub fn new(ctx: &PrecisionContext, s_budget: f64) -> Result<Self> {
        if !(s_budget > 0.0 && s_budget.is_finite()) {
            return Err(Error::InvalidParams(format!("bad oscillation budget {s_budget}")));
        }
        let quarter_pi = std::f64::consts::FRAC_PI_4;
        // Cancellation in the cosine transform costs about π|s|/4 nats.
        let extra = (quarter_pi * s_budget / std::f64::consts::LN_2).ceil() as u32;
        let work = ctx.bits() + extra + 32;
        let cut_bits = work + 16;
        // g extends analytically to |Im x| < π/4; use strip width 0.7.
        let strip = 0.7;
        let target = f64::from(ctx.bits() + 8) * std::f64::consts::LN_2 + strip * s_budget;
        let coarse = 2.0 * std::f64::consts::PI * strip / target;
        let step = Float::with_val(work, coarse) / 2u32;
        let threshold = f64::from(cut_bits) * std::f64::consts::LN_2 + 20.0;
        let n_max = (threshold / std::f64::consts::PI).sqrt().ceil() as usize;

        let mut series = ThetaSeries {
            ctx: *ctx,
            work,
            n_max,
            u_max: Float::new(work),
            s_budget,
            step,
            samples: Vec::new(),
            cut_bits,
        };
        let g0 = series.k(&Float::with_val(work, 1))?;
        let mut floor = Float::with_val(work, g0.abs_ref());
        floor >>= cut_bits;
        let mut k = 0u64;
        loop {
            let x = Float::with_val(work, &series.step * k);
            let u = x.exp();
            let g = series.k(&u)?;
            // g is eventually monotone; stop once it is negligible past its hump.
            let negligible = Float::with_val(work, g.abs_ref()) < floor && u > 2;
            series.samples.push(g);
            if negligible {
                series.u_max = u;
                break;
            }
            k += 1;
        }
        Ok(series)
    }

    pub fn context(&self) -> &PrecisionContext {
        &self.ctx
    }

    pub fn working_bits(&self) -> u32 {
        self.work
    }

    pub fn s_budget(&self) -> f64 {
        self.s_budget
    }

    pub fn nodes(&self) -> usize {
        self.samples.len()
    }

    /// `k(u) = u^(1/2) Σ_n h(nu)`, evaluated as `k(1/u)` for `u < 1`.
    pub fn k(&self, u: &Float) -> Result<Float> {
        if *u <= 0 {
            return Err(Error::domain("k", "u must be positive"));
        }
        let work = self.work.max(u.prec());
        let u = if *u < 1 {
            Float::with_val(work, u.recip_ref())
        } else {
            Float::with_val(work, u)
        };
        let pi = Float::with_val(work, Constant::Pi);
        let threshold = f64::from(self.cut_bits) * std::f64::consts::LN_2 + 20.0;
        let mut acc = Float::new(work);
        for n in 1.. {
            let x = Float::with_val(work, &u * n as u64);
            let arg = Float::with_val(work, x.square_ref()) * &pi;
            if arg.to_f64() > threshold {
                break;
            }
            acc += hermite_h(&x);
        }
        Ok(acc * u.sqrt())
    }

    fn check_budget(&self, s: &Float) -> Result<()> {
        let v = s.to_f64().abs();
        if v > self.s_budget {
            return Err(Error::OscillationBudgetExceeded {
                s: v,
                limit: self.s_budget,
            });
        }
        Ok(())
    }

    /// Trapezoid sums `(Σ_even, Σ_odd)` of `w(x_k) g(x_k) e^(i s x_k)`, `k ≥ 1`.
    fn sums<F>(&self, s: &Float, weight: F) -> (Complex, Complex)
    where
        F: Fn(u64, &Float) -> Float,
    {
        let work = self.work;
        let theta = Float::with_val(work, s * &self.step);
        let rot = Complex::with_val(work, (theta.cos_ref(), theta.sin_ref()));
        let mut phase = rot.clone();
        let mut even = Complex::new(work);
        let mut odd = Complex::new(work);
        for (k, g) in self.samples.iter().enumerate().skip(1) {
            let w = weight(k as u64, g);
            let term = Complex::with_val(work, &phase * &w);
            if k % 2 == 0 {
                even += term;
            } else {
                odd += term;
            }
            if k % 64 == 0 {
                let a = Float::with_val(work, &theta * (k as u64 + 1));
                phase.assign((a.cos_ref(), a.sin_ref()));
            } else {
                phase *= &rot;
            }
        }
        (even, odd)
    }

    /// `Ξ(s)` with the fine/coarse trapezoid difference as error bound.
    pub fn xi(&self, s: &Float) -> Result<XiValue> {
        self.check_budget(s)?;
        let work = self.work;
        let (even, odd) = self.sums(s, |_, g| g.clone());
        let g0 = &self.samples[0];
        let coarse_step = Float::with_val(work, &self.step * 2u32);
        let coarse = (Float::with_val(work, even.real() * 2u32) + g0) * &coarse_step * 4u32;
        let all = Float::with_val(work, even.real() + odd.real());
        let fine = (all * 2u32 + g0) * &self.step * 4u32;
        let error = Float::with_val(self.ctx.bits(), &fine - &coarse).abs();
        Ok(XiValue {
            value: Float::with_val(self.ctx.bits(), &fine),
            error,
        })
    }

    /// `Ξ′(s) = −8 ∫_0^∞ x g(x) sin(sx) dx`.
    pub fn xi_derivative(&self, s: &Float) -> Result<Float> {
        self.check_budget(s)?;
        let work = self.work;
        let step = self.step.clone();
        let (even, odd) = self.sums(s, |k, g| Float::with_val(work, &step * k) * g);
        let all = Float::with_val(work, even.imag() + odd.imag());
        Ok(Float::with_val(self.ctx.bits(), -(all * &self.step * 8u32)))
    }
}

/// One generated zero `s_k` with its error bound.
#[derive(Clone, Debug)]
pub struct ZeroEntry {
    pub index: usize,
    pub value: Float,
    pub error: Float,
}

/// Consecutive zeta zeros on the critical line with generation metadata.
#[derive(Clone, Debug)]
pub struct ZeroTable {
    pub entries: Vec<ZeroEntry>,
    pub meta: ZeroTableMeta,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ZeroTableMeta {
    pub bits: u32,
    pub n_max: usize,
    pub u_max: f64,
    pub version: String,
}

impl ZeroTable {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// The `k`-th zero, 1-based.
    pub fn get(&self, k: usize) -> Option<&ZeroEntry> {
        k.checked_sub(1).and_then(|i| self.entries.get(i))
    }

    /// Fails unless the values are strictly increasing and indexed `1, 2, …`.
    pub fn validate(&self) -> Result<()> {
        for (i, e) in self.entries.iter().enumerate() {
            if e.index != i + 1 {
                return Err(Error::InvalidParams(format!(
                    "zero table index {} at position {}",
                    e.index,
                    i + 1
                )));
            }
        }
        for w in self.entries.windows(2) {
            if w[0].value >= w[1].value {
                return Err(Error::InvalidParams(format!(
                    "zero table not increasing at index {}",
                    w[1].index
                )));
            }
        }
        Ok(())
    }
}

/// Sign changes of `Ξ` on the grid `s_i = i·step`, `lo ≤ i < hi`, as bracket
/// index pairs.
fn scan_grid(
    series: &ThetaSeries,
    step: f64,
    lo: usize,
    hi: usize,
    exec: Execution,
) -> Result<Vec<usize>> {
    let prec = series.work;
    let values = exec.try_map(hi - lo + 1, |k| {
        let s = Float::with_val(prec, step) * (lo + k) as u64;
        Ok(series.xi(&s)?.value.is_sign_negative())
    })?;
    Ok(values
        .windows(2)
        .enumerate()
        .filter(|(_, w)| w[0] != w[1])
        .map(|(k, _)| lo + k)
        .collect())
}

/// Generates the first `count` zeros of `Ξ` to about `10^(−(digits−20))`.
pub fn zeta_zeros(count: usize, ctx: &PrecisionContext, exec: Execution) -> Result<ZeroTable> {
    zeta_zeros_with_budget(count, ctx, DEFAULT_S_BUDGET, exec)
}

pub fn zeta_zeros_with_budget(
    count: usize,
    ctx: &PrecisionContext,
    s_budget: f64,
    exec: Execution,
) -> Result<ZeroTable> {
    let scan_ctx = PrecisionContext::new(PrecisionContext::MIN_BITS)?;
    let scan = ThetaSeries::new(&scan_ctx, s_budget)?;
    let limit = (s_budget / SCAN_STEP).floor() as usize;
    let chunk = 256;
    let mut brackets = Vec::new();
    let mut end = 0;
    while brackets.len() < count {
        if end >= limit {
            return Err(Error::OscillationBudgetExceeded {
                s: end as f64 * SCAN_STEP,
                limit: s_budget,
            });
        }
        let next = (end + chunk).min(limit);
        brackets.extend(scan_grid(&scan, SCAN_STEP, end, next, exec)?);
        end = next;
    }
    brackets.truncate(count);
    let last = brackets.last().map_or(0, |&i| i + 1);
    let fine = scan_grid(&scan, SCAN_STEP / 2.0, 0, 2 * last, exec)?;
    if fine.len() != brackets.len() {
        return Err(Error::MissedZeroSuspected {
            coarse: brackets.len(),
            fine: fine.len(),
        });
    }

    let series = ThetaSeries::new(ctx, s_budget)?;
    let entries = exec.try_map(brackets.len(), |k| {
        let i = brackets[k];
        let lo = Float::with_val(ctx.bits(), SCAN_STEP) * i as u64;
        let hi = Float::with_val(ctx.bits(), SCAN_STEP) * (i + 1) as u64;
        let (value, error) = refine_zero(&series, lo, hi)?;
        Ok(ZeroEntry {
            index: k + 1,
            value,
            error,
        })
    })?;
    let table = ZeroTable {
        entries,
        meta: ZeroTableMeta {
            bits: ctx.bits(),
            n_max: series.n_max,
            u_max: series.u_max.to_f64(),
            version: GENERATOR_VERSION.to_string(),
        },
    };
    table.validate()?;
    Ok(table)
}

/// Safeguarded Newton on a sign-change bracket of `Ξ`; returns the zero and a bound
/// `|ΔΞ|/|Ξ′| + |last step|`.
pub fn refine_zero(series: &ThetaSeries, lo: Float, hi: Float) -> Result<(Float, Float)> {
    let ctx = *series.context();
    let prec = ctx.bits();
    let mut lo = lo;
    let mut hi = hi;
    let lo_neg = series.xi(&lo)?.value.is_sign_negative();
    if series.xi(&hi)?.value.is_sign_negative() == lo_neg {
        return Err(Error::InvalidParams("zero bracket without sign change".into()));
    }
    let tol = ctx.eps() * 64u32;
    let mut x = Float::with_val(prec, &lo + &hi) / 2u32;
    let limit = 4 * prec as usize;
    for _ in 0..limit {
        let v = series.xi(&x)?;
        let d = series.xi_derivative(&x)?;
        if v.value.is_zero() {
            let bound = Float::with_val(prec, &v.error / &d).abs();
            return Ok((x, bound));
        }
        if v.value.is_sign_negative() == lo_neg {
            lo.assign(&x);
        } else {
            hi.assign(&x);
        }
        let newton = Float::with_val(prec, &x - Float::with_val(prec, &v.value / &d));
        let next = if d.is_normal() && newton > lo && newton < hi {
            newton
        } else {
            Float::with_val(prec, &lo + &hi) / 2u32
        };
        let moved = Float::with_val(prec, &next - &x).abs();
        x = next;
        let width = Float::with_val(prec, &hi - &lo);
        if moved <= tol || width <= tol {
            let bound = Float::with_val(prec, &v.error / &d).abs() + moved;
            return Ok((x, bound));
        }
    }
    Err(Error::NonConvergence {
        what: "zeta zero refinement",
        limit,
    })
}

/// A second, independent road to `Ξ(s)`: `½ z(z−1) π^(−z/2) Γ(z/2) ζ(z)` at
/// `z = 1/2 + is`, with Euler–Maclaurin for `ζ` and Stirling for `Γ`.
pub mod crosscheck {
    use rug::{Complex, Float};

    use crate::error::{Error, Result};
    use crate::precision::{cabs, log2_abs, PrecisionContext};
    use crate::specfun::bernoulli_even;

    /// Euler–Maclaurin `ζ(z)` for `z ≠ 1`.
    pub fn zeta(z: &Complex, ctx: &PrecisionContext) -> Result<Complex> {
        let prec = ctx.bits() + 32;
        let one = Complex::with_val(prec, 1);
        if Complex::with_val(prec, z - &one).is_zero() {
            return Err(Error::Pole {
                func: "zeta",
                at: "1".into(),
            });
        }
        let imag = z.imag().to_f64().abs();
        let n = (f64::from(ctx.bits()) / 4.0 + imag) as u64 + 10;
        let z = Complex::with_val(prec, z);
        let neg_z = Complex::with_val(prec, -&z);
        let mut sum = Complex::new(prec);
        for k in 1..n {
            let ln_k = Float::with_val(prec, k).ln();
            sum += Complex::with_val(prec, &neg_z * &ln_k).exp();
        }
        let ln_n = Float::with_val(prec, n).ln();
        let n_pow = Complex::with_val(prec, &neg_z * &ln_n).exp();
        let zm1 = Complex::with_val(prec, &z - 1u32);
        sum += Complex::with_val(prec, &n_pow * n) / &zm1;
        sum += Complex::with_val(prec, &n_pow / 2u32);

        let eps_log2 = -f64::from(prec);
        let nf = Float::with_val(prec, n);
        let inv_n2 = Float::with_val(prec, nf.square_ref()).recip();
        // term_k = B_2k/(2k)! · z(z+1)…(z+2k−2) · n^(−z−2k+1)
        let mut rising = Complex::with_val(prec, &z);
        let mut power = Complex::with_val(prec, &n_pow / &nf);
        let mut factorial = Float::with_val(prec, 2);
        let bern = bernoulli_even(prec as usize);
        let mut last = f64::INFINITY;
        for (k, b) in bern.iter().enumerate().map(|(i, b)| (i + 1, b)) {
            if k > 1 {
                let a = Complex::with_val(prec, &z + (2 * k - 3) as u64);
                let c = Complex::with_val(prec, &z + (2 * k - 2) as u64);
                rising *= a;
                rising *= c;
                power *= &inv_n2;
                factorial *= ((2 * k - 1) * (2 * k)) as u64;
            }
            let coef = Float::with_val(prec, b) / &factorial;
            let term = Complex::with_val(prec, &rising * &power) * coef;
            let size = log2_abs(&cabs(&term));
            sum += &term;
            if size < eps_log2 + log2_abs(&cabs(&sum)) {
                return Ok(Complex::with_val(ctx.bits(), &sum));
            }
            if size > last {
                break;
            }
            last = size;
        }
        Err(Error::NonConvergence {
            what: "Euler-Maclaurin zeta",
            limit: bern.len(),
        })
    }

    /// `Γ(w)` for `Re w > 0` by upward shift and the Stirling series.
    pub fn gamma(w: &Complex, ctx: &PrecisionContext) -> Result<Complex> {
        let prec = ctx.bits() + 32;
        if *w.real() <= 0 {
            return Err(Error::domain("gamma", "requires Re w > 0"));
        }
        let radius = f64::from(prec) / 4.0 + 10.0;
        let mut shifted = Complex::with_val(prec, w);
        let mut product = Complex::with_val(prec, 1);
        while cabs(&shifted).to_f64() < radius {
            product *= &shifted;
            shifted += 1u32;
        }
        // ln Γ(v) = (v − 1/2) ln v − v + ½ ln 2π + Σ B_2k / (2k(2k−1) v^(2k−1))
        let ln_v = Complex::with_val(prec, shifted.ln_ref());
        let mut lg = Complex::with_val(prec, &shifted - 0.5f64) * &ln_v;
        lg -= &shifted;
        let two_pi = Float::with_val(prec, rug::float::Constant::Pi) * 2u32;
        lg += two_pi.ln() / 2u32;
        let inv = Complex::with_val(prec, shifted.recip_ref());
        let inv2 = Complex::with_val(prec, inv.square_ref());
        let mut power = inv;
        let eps_log2 = -f64::from(prec);
        let bern = bernoulli_even(prec as usize / 2);
        let mut converged = false;
        for (k, b) in bern.iter().enumerate().map(|(i, b)| (i + 1, b)) {
            let coef = Float::with_val(prec, b) / ((2 * k * (2 * k - 1)) as u64);
            let term = Complex::with_val(prec, &power * &coef);
            lg += &term;
            if log2_abs(&cabs(&term)) < eps_log2 {
                converged = true;
                break;
            }
            power *= &inv2;
        }
        if !converged {
            return Err(Error::NonConvergence {
                what: "Stirling series",
                limit: bern.len(),
            });
        }
        Ok(Complex::with_val(ctx.bits(), lg.exp() / product))
    }

    /// `ξ(1/2 + is)` for real `s`.
    pub fn xi_via_zeta(s: &Float, ctx: &PrecisionContext) -> Result<Float> {
        let prec = ctx.bits() + 32;
        let z = Complex::with_val(prec, (0.5f64, s));
        let work = PrecisionContext::new(prec)?;
        let zeta = zeta(&z, &work)?;
        let half = Complex::with_val(prec, &z / 2u32);
        let gamma = gamma(&half, &work)?;
        let pi = Float::with_val(prec, rug::float::Constant::Pi);
        let pi_pow = (Complex::with_val(prec, &half * pi.ln()) * -1i32).exp();
        let zm1 = Complex::with_val(prec, &z - 1u32);
        let value = z * zm1 * pi_pow * gamma * zeta / 2u32;
        Ok(Float::with_val(ctx.bits(), value.real()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(160).unwrap()
    }

    #[test]
    fn h_at_zero() {
        assert!(hermite_h(&Float::with_val(128, 0)).is_zero());
    }

    #[test]
    fn k_is_symmetric() {
        let ts = ThetaSeries::new(&ctx(), 20.0).unwrap();
        for u in [1.1, 2.0, 5.0] {
            let a = ts.k(&Float::with_val(160, u)).unwrap();
            let inv = Float::with_val(160, u).recip();
            let direct_inv = {
                let work = ts.working_bits();
                let pi = Float::with_val(work, Constant::Pi);
                let mut acc = Float::new(work);
                for n in 1..200u32 {
                    let x = Float::with_val(work, &inv * n);
                    if Float::with_val(work, x.square_ref()) * &pi > 600 {
                        break;
                    }
                    acc += hermite_h(&x);
                }
                acc * Float::with_val(work, inv.sqrt_ref())
            };
            let d = Float::with_val(160, &a - &direct_inv).abs();
            assert!(d < 1e-40, "u = {u}: {d}");
        }
    }

    #[test]
    fn xi_at_zero() {
        let ts = ThetaSeries::new(&ctx(), 20.0).unwrap();
        let v = ts.xi(&Float::with_val(160, 0)).unwrap();
        assert!((v.value.to_f64() - 0.497_120_778_188_314).abs() < 1e-14);
        assert!(v.error < 1e-40);
    }

    #[test]
    fn xi_is_even() {
        let ts = ThetaSeries::new(&ctx(), 20.0).unwrap();
        let a = ts.xi(&Float::with_val(160, 3.7)).unwrap().value;
        let b = ts.xi(&Float::with_val(160, -3.7)).unwrap().value;
        assert_eq!(a, b);
    }

    #[test]
    fn budget_is_enforced() {
        let ts = ThetaSeries::new(&ctx(), 20.0).unwrap();
        assert!(matches!(
            ts.xi(&Float::with_val(160, 25)),
            Err(Error::OscillationBudgetExceeded { .. })
        ));
    }

    #[test]
    fn first_zero_bracket() {
        let ts = ThetaSeries::new(&ctx(), 20.0).unwrap();
        let a = ts.xi(&Float::with_val(160, 14)).unwrap().value;
        let b = ts.xi(&Float::with_val(160, 14.2)).unwrap().value;
        assert!(a.is_sign_negative() != b.is_sign_negative());
    }

    #[test]
    fn derivative_matches_difference() {
        let ts = ThetaSeries::new(&ctx(), 20.0).unwrap();
        let s = Float::with_val(160, 7.5);
        let h = Float::with_val(160, 1e-12);
        let up = ts.xi(&Float::with_val(160, &s + &h)).unwrap().value;
        let down = ts.xi(&Float::with_val(160, &s - &h)).unwrap().value;
        let fd = (up - down) / (h * 2u32);
        let d = ts.xi_derivative(&s).unwrap();
        assert!(Float::with_val(160, &fd - &d).abs() < 1e-20);
    }

    #[test]
    fn crosscheck_at_zero() {
        let c = ctx();
        let v = crosscheck::xi_via_zeta(&c.zero(), &c).unwrap();
        assert!((v.to_f64() - 0.497_120_778_188_314).abs() < 1e-14);
    }

    #[test]
    fn gamma_half() {
        let c = ctx();
        let g = crosscheck::gamma(&Complex::with_val(160, 0.5), &c).unwrap();
        let expected = c.pi().sqrt();
        assert!(Float::with_val(160, g.real() - &expected).abs() < 1e-45);
    }

    #[test]
    fn zeta_at_two() {
        let c = ctx();
        let z = crosscheck::zeta(&Complex::with_val(160, 2), &c).unwrap();
        let expected = Float::with_val(160, c.pi().square_ref()) / 6u32;
        assert!(Float::with_val(160, z.real() - &expected).abs() < 1e-45);
    }

    #[test]
    fn first_zeros() {
        let c = ctx();
        let t = zeta_zeros_with_budget(2, &c, 30.0, Execution::Sequential).unwrap();
        assert_eq!(t.len(), 2);
        let lit = c.parse(LITERATURE_ZEROS[0]).unwrap();
        let d = Float::with_val(160, &t.entries[0].value - &lit).abs();
        assert!(d < 1e-28, "{d}");
        assert!((t.entries[1].value.to_f64() - 21.022_039_638_771_55).abs() < 1e-12);
    }
}

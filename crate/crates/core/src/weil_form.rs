//! Matrix of the truncated Weil quadratic form `QW_λ^N` in the basis `V_n`, `|n| ≤ N`.
//!
//! `τ = W₀,₂ − W_ℝ − Σ_p W_p`, each component from its closed form:
//!
//! * `W₀,₂` is a rank-two matrix with entries rational in `n`, `m`;
//! * `Σ_p W_p` is a finite sum over prime powers `k ≤ λ²`;
//! * `W_ℝ` is tabulated from the integrals `α_L`, `β_L`, `γ_L` of
//!   `ρ(x) = e^(x/2) / (e^x − e^(−x))`, themselves expressed through ₂F₁, Φ, ψ, ψ⁽¹⁾.

use std::fmt;
use std::str::FromStr;

use rug::{Assign, Complex, Float};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::SymMatrix;
use crate::par::Execution;
use crate::precision::PrecisionContext;
use crate::specfun::{hyp2f1, lerch_phi2, Polygamma};

/// Largest admissible `λ²`; prime powers are enumerated by trial division.
pub const MAX_LAMBDA_SQUARED: u64 = 10_000;

/// How `λ` was given: a decimal literal or `sqrt:k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LambdaSpec {
    Decimal(String),
    Sqrt(u64),
}

impl FromStr for LambdaSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(rest) = s.strip_prefix("sqrt:") {
            let k: u64 = rest
                .parse()
                .map_err(|_| Error::InvalidParams(format!("bad sqrt argument in {s:?}")))?;
            return Ok(LambdaSpec::Sqrt(k));
        }
        if Float::parse(s).is_err() {
            return Err(Error::InvalidParams(format!("cannot parse lambda {s:?}")));
        }
        Ok(LambdaSpec::Decimal(s.to_string()))
    }
}

impl fmt::Display for LambdaSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LambdaSpec::Decimal(s) => f.write_str(s),
            LambdaSpec::Sqrt(k) => write!(f, "sqrt:{k}"),
        }
    }
}

impl LambdaSpec {
    pub fn value(&self, ctx: &PrecisionContext) -> Result<Float> {
        match self {
            LambdaSpec::Decimal(s) => ctx.parse(s),
            LambdaSpec::Sqrt(k) => Ok(ctx.real(*k).sqrt()),
        }
    }

    /// `⌊λ²⌋`, exact for `sqrt:k`.
    pub fn squared_floor(&self, ctx: &PrecisionContext) -> Result<u64> {
        match self {
            LambdaSpec::Sqrt(k) => Ok(*k),
            LambdaSpec::Decimal(_) => {
                let sq = Float::with_val(ctx.bits(), self.value(ctx)?.square_ref()).floor();
                sq.to_integer()
                    .and_then(|i| i.to_u64())
                    .ok_or_else(|| Error::InvalidParams("lambda^2 out of range".into()))
            }
        }
    }
}

/// `(λ, L = 2 ln λ, N)` at a given precision.
#[derive(Clone, Debug)]
pub struct WeilParams {
    pub lambda_spec: LambdaSpec,
    pub lambda: Float,
    pub l: Float,
    pub n: usize,
    pub ctx: PrecisionContext,
}

impl WeilParams {
    pub fn new(lambda_spec: LambdaSpec, n: usize, ctx: PrecisionContext) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParams("N must be positive".into()));
        }
        let lambda = lambda_spec.value(&ctx)?;
        if lambda <= 1 {
            return Err(Error::InvalidParams(format!("lambda = {lambda_spec} must exceed 1")));
        }
        if lambda_spec.squared_floor(&ctx)? > MAX_LAMBDA_SQUARED {
            return Err(Error::InvalidParams(format!(
                "lambda^2 beyond {MAX_LAMBDA_SQUARED} is not supported"
            )));
        }
        let l = Float::with_val(ctx.bits(), lambda.ln_ref()) * 2u32;
        Ok(WeilParams {
            lambda_spec,
            lambda,
            l,
            n,
            ctx,
        })
    }

    pub fn dim(&self) -> usize {
        2 * self.n + 1
    }

    pub fn prec(&self) -> u32 {
        self.ctx.bits()
    }

    /// Row/column of basis index `i ∈ [−N, N]`.
    pub fn pos(&self, i: i64) -> usize {
        debug_assert!(i.unsigned_abs() as usize <= self.n);
        (i + self.n as i64) as usize
    }

    /// Basis index of row/column `p`.
    pub fn index(&self, p: usize) -> i64 {
        p as i64 - self.n as i64
    }

    /// Same `λ` and `N` at another precision.
    pub fn at_precision(&self, ctx: PrecisionContext) -> Result<Self> {
        WeilParams::new(self.lambda_spec.clone(), self.n, ctx)
    }
}

/// `α_L(n)`, `β_L(n)`, `γ_L(n)` for `0 ≤ n ≤ N` and the constant corrections.
#[derive(Clone, Debug)]
pub struct ArchCoefficients {
    pub alpha: Vec<Float>,
    pub beta: Vec<Float>,
    pub gamma: Vec<Float>,
    pub c_l: Float,
    pub w_l: Float,
}

impl ArchCoefficients {
    /// `α_L(n)` for any sign of `n`; α is odd.
    pub fn alpha_at(&self, n: i64) -> Float {
        let a = &self.alpha[n.unsigned_abs() as usize];
        if n < 0 {
            Float::with_val(a.prec(), -a)
        } else {
            a.clone()
        }
    }

    pub fn beta_at(&self, n: i64) -> &Float {
        &self.beta[n.unsigned_abs() as usize]
    }

    pub fn gamma_at(&self, n: i64) -> &Float {
        &self.gamma[n.unsigned_abs() as usize]
    }
}

/// `c(L) = ∫_0^L (1 − e^(−x/2)) / (e^x − e^(−x)) dx` in closed form.
pub fn correction_c(l: &Float, ctx: &PrecisionContext) -> Float {
    let p = ctx.bits();
    let e_half = Float::with_val(p, l / 2u32).exp();
    let e_full = Float::with_val(p, l.exp_ref());
    let mut inner = Float::with_val(p, &e_full + 1u32).ln() * 2u32;
    inner += ctx.pi();
    inner += Float::with_val(p, 4u32).ln();
    let mut c = Float::with_val(p, &e_half + 1u32).ln();
    c -= inner / 4u32;
    c += e_half.atan();
    c
}

/// `c(L) + w(L)` from its simplified closed form.
pub fn correction_sum(l: &Float, ctx: &PrecisionContext) -> Float {
    let p = ctx.bits();
    let e_half = Float::with_val(p, l / 2u32).exp();
    let ratio = Float::with_val(p, &e_half - 1u32) / Float::with_val(p, &e_half + 1u32);
    let pi = ctx.pi();
    let mut s = ratio.ln() / 2u32;
    s += e_half.atan();
    s -= Float::with_val(p, &pi / 4u32);
    s += ctx.euler_gamma() / 2u32;
    s += (pi * 8u32).ln() / 2u32;
    s
}

/// Shared per-`L` constants for the archimedean integrals.
struct ArchKernel<'a> {
    params: &'a WeilParams,
    poly: Polygamma,
    pi: Float,
    e_half: Float,
    z: Float,
    psi_quarter: Complex,
    hyp_quarter: Float,
}

impl<'a> ArchKernel<'a> {
    fn new(params: &'a WeilParams) -> Result<Self> {
        let ctx = &params.ctx;
        let p = ctx.bits();
        let poly = Polygamma::new(ctx);
        let e_half = (Float::with_val(p, -&params.l) / 2u32).exp();
        let z = (Float::with_val(p, -&params.l) * 2u32).exp();
        let quarter = ctx.complex(0.25);
        let psi_quarter = poly.digamma(&quarter)?;
        let hyp_quarter = hyp2f1(&ctx.real(1), &quarter, &ctx.complex(1.25), &z, ctx)?
            .real()
            .clone();
        Ok(ArchKernel {
            params,
            poly,
            pi: ctx.pi(),
            e_half,
            z,
            psi_quarter,
            hyp_quarter,
        })
    }

    /// `(∫ sin·ρ, ∫ x cos·ρ, ∫ (cos − 1)·ρ)` over `[0, L]` for frequency `n`.
    fn integrals(&self, n: u64) -> Result<(Float, Float, Float)> {
        let ctx = &self.params.ctx;
        let p = ctx.bits();
        let l = &self.params.l;
        // w = 1/4 + iπn/L
        let im = Float::with_val(p, &self.pi * n) / l;
        let w = Complex::with_val(p, (0.25, &im));
        let w1 = Complex::with_val(p, &w + 1u32);
        let f = hyp2f1(&ctx.real(1), &w, &w1, &self.z, ctx)?;
        let psi = self.poly.digamma(&w)?;
        let psi1 = self.poly.trigamma(&w)?;
        let phi = lerch_phi2(&self.z, &w, ctx)?;

        let four_pi_n = Float::with_val(p, &self.pi * (4 * n));
        let two_l = Float::with_val(p, l * 2u32);
        // 2L / (L + 4πin) · F
        let mut g = Complex::with_val(p, (l, &four_pi_n));
        g.recip_mut();
        g *= &two_l;
        g *= &f;
        // 2L / (4πn − iL) · F
        let mut h = Complex::with_val(p, (&four_pi_n, Float::with_val(p, -l)));
        h.recip_mut();
        h *= &two_l;
        h *= &f;

        let mut sin_int = Float::with_val(p, g.imag() * &self.e_half);
        sin_int += Float::with_val(p, psi.imag() / 2u32);

        let mut xcos_int = Float::with_val(p, h.imag() * &self.e_half);
        xcos_int *= l;
        xcos_int = -xcos_int;
        xcos_int -= Float::with_val(p, phi.real() * &self.e_half) / 4u32;
        xcos_int += Float::with_val(p, psi1.real() / 4u32);

        let mut cos_int = Float::with_val(p, g.real() * &self.e_half);
        cos_int = -cos_int;
        cos_int += Float::with_val(p, &self.hyp_quarter * &self.e_half) * 2u32;
        cos_int -= Float::with_val(p, psi.real() - self.psi_quarter.real()) / 2u32;

        Ok((sin_int, xcos_int, cos_int))
    }
}

/// `α_L`, `β_L`, `γ_L` for `0 ≤ n ≤ N`.
pub fn arch_coefficients(params: &WeilParams, exec: Execution) -> Result<ArchCoefficients> {
    let kernel = ArchKernel::new(params)?;
    let ctx = &params.ctx;
    let p = ctx.bits();
    let c_l = correction_c(&params.l, ctx);
    let corr = correction_sum(&params.l, ctx);
    let w_l = Float::with_val(p, &corr - &c_l);
    let rows = exec.try_map(params.n + 1, |n| kernel.integrals(n as u64))?;
    let mut alpha = Vec::with_capacity(rows.len());
    let mut beta = Vec::with_capacity(rows.len());
    let mut gamma = Vec::with_capacity(rows.len());
    for (n, (sin_int, xcos_int, cos_int)) in rows.into_iter().enumerate() {
        if n == 0 {
            alpha.push(Float::new(p));
        } else {
            alpha.push(sin_int / &kernel.pi);
        }
        beta.push(xcos_int / &params.l);
        gamma.push(cos_int + &corr);
    }
    Ok(ArchCoefficients {
        alpha,
        beta,
        gamma,
        c_l,
        w_l,
    })
}

/// Prime powers `1 < k ≤ limit` paired with their prime, by trial division.
pub fn prime_powers(limit: u64) -> Vec<(u64, u64)> {
    (2..=limit)
        .filter_map(|k| prime_base(k).map(|p| (k, p)))
        .collect()
}

/// `Some(p)` when `k = p^r` for a prime `p`.
fn prime_base(k: u64) -> Option<u64> {
    if k < 2 {
        return None;
    }
    let mut d = 2;
    while d * d <= k {
        if k.is_multiple_of(d) {
            let mut r = k;
            while r.is_multiple_of(d) {
                r /= d;
            }
            return (r == 1).then_some(d);
        }
        d += 1;
    }
    Some(k)
}

/// von Mangoldt `Λ(k)`: `ln p` when `k = p^r`, else 0.
pub fn von_mangoldt(k: u64, ctx: &PrecisionContext) -> Float {
    match prime_base(k) {
        Some(p) => ctx.real(p).ln(),
        None => ctx.zero(),
    }
}

/// `q(U_n, U_m)(y)` for `y ∈ [0, L]`.
pub fn q_basis(n: i64, m: i64, y: &Float, l: &Float, pi: &Float) -> Float {
    let p = y.prec();
    let arg = |k: i64| Float::with_val(p, pi * (2 * k)) * y / l;
    if n == m {
        let mut v = Float::with_val(p, y / l);
        v = 1u32 - v;
        v *= 2u32;
        v * arg(n).cos()
    } else {
        let diff = arg(m).sin() - arg(n).sin();
        diff / (Float::with_val(p, pi * (n - m)))
    }
}

/// `W₀,₂(V_n, V_m) = 32 L sinh²(L/4) (L² − 16π² mn) / ((L² + 16π² m²)(L² + 16π² n²))`.
pub fn w02_entry(n: i64, m: i64, params: &WeilParams) -> Float {
    let p = params.prec();
    let l = &params.l;
    let pi = params.ctx.pi();
    let pi2_16 = Float::with_val(p, pi.square_ref()) * 16u32;
    let l2 = Float::with_val(p, l.square_ref());
    let sinh = Float::with_val(p, l / 4u32).sinh();
    let mut num = Float::with_val(p, sinh.square_ref()) * l * 32u32;
    num *= Float::with_val(p, &l2 - Float::with_val(p, &pi2_16 * (m * n)));
    let dm = Float::with_val(p, &l2 + Float::with_val(p, &pi2_16 * (m * m)));
    let dn = Float::with_val(p, &l2 + Float::with_val(p, &pi2_16 * (n * n)));
    num / dm / dn
}

/// `W_ℝ(V_n, V_m)` from the coefficient table.
pub fn arch_entry(n: i64, m: i64, coeffs: &ArchCoefficients) -> Float {
    if n == m {
        let g = coeffs.gamma_at(n);
        Float::with_val(g.prec(), g - coeffs.beta_at(n)) * 2u32
    } else {
        let d = coeffs.alpha_at(m) - coeffs.alpha_at(n);
        d / (n - m)
    }
}

/// Prime powers `k ≤ λ²` with `y = ln k` and weight `Λ(k) k^(−1/2)`, plus the
/// trigonometric tables `sin(2πjy/L)`, `cos(2πjy/L)` for `0 ≤ j ≤ N`.
#[derive(Clone, Debug)]
pub struct PrimeTable {
    pub entries: Vec<PrimeTerm>,
}

#[derive(Clone, Debug)]
pub struct PrimeTerm {
    pub k: u64,
    pub p: u64,
    pub y: Float,
    pub weight: Float,
    sin: Vec<Float>,
    cos: Vec<Float>,
}

impl PrimeTable {
    pub fn new(params: &WeilParams) -> Result<Self> {
        let ctx = &params.ctx;
        let prec = ctx.bits();
        let limit = params.lambda_spec.squared_floor(ctx)?;
        let pi = ctx.pi();
        let entries = prime_powers(limit)
            .into_iter()
            .map(|(k, p)| {
                let y = ctx.real(k).ln();
                let weight = ctx.real(p).ln() / ctx.real(k).sqrt();
                let step = Float::with_val(prec, &pi * 2u32) * &y / &params.l;
                let (sin, cos) = (0..=params.n)
                    .map(|j| Float::with_val(prec, &step * j as u64).sin_cos(ctx.zero()))
                    .unzip();
                PrimeTerm {
                    k,
                    p,
                    y,
                    weight,
                    sin,
                    cos,
                }
            })
            .collect();
        Ok(PrimeTable { entries })
    }

    fn sin_at(term: &PrimeTerm, j: i64) -> Float {
        let s = &term.sin[j.unsigned_abs() as usize];
        if j < 0 {
            Float::with_val(s.prec(), -s)
        } else {
            s.clone()
        }
    }

    /// `Σ_k Λ(k) k^(−1/2) q(U_n, U_m)(ln k)`.
    pub fn entry(&self, n: i64, m: i64, params: &WeilParams, pi: &Float) -> Float {
        let prec = params.prec();
        let mut acc = Float::new(prec);
        for t in &self.entries {
            let q = if n == m {
                let mut v = Float::with_val(prec, &t.y / &params.l);
                v = 1u32 - v;
                v *= 2u32;
                v * &t.cos[n.unsigned_abs() as usize]
            } else {
                let d = Self::sin_at(t, m) - Self::sin_at(t, n);
                d / Float::with_val(prec, pi * (n - m))
            };
            acc += q * &t.weight;
        }
        acc
    }
}

/// `Σ_p W_p(V_n, V_m)`; builds a [`PrimeTable`] on every call.
pub fn prime_entry(n: i64, m: i64, params: &WeilParams) -> Result<Float> {
    let table = PrimeTable::new(params)?;
    Ok(table.entry(n, m, params, &params.ctx.pi()))
}

/// Assembled matrix `τ` with its `τ_ii = a_i`, `τ_ij = (b_i − b_j)/(i − j)` structure.
#[derive(Clone, Debug)]
pub struct WeilMatrix {
    pub params: WeilParams,
    pub tau: SymMatrix,
    /// `a_i`, indexed by position `i + N`.
    pub a: Vec<Float>,
    /// `b_i`, indexed by position `i + N`.
    pub b: Vec<Float>,
}

/// Everything needed to evaluate individual entries of `τ`.
pub struct EntryEvaluator<'a> {
    params: &'a WeilParams,
    pub coeffs: ArchCoefficients,
    pub primes: PrimeTable,
    pi: Float,
}

impl<'a> EntryEvaluator<'a> {
    pub fn new(params: &'a WeilParams, exec: Execution) -> Result<Self> {
        Ok(EntryEvaluator {
            params,
            coeffs: arch_coefficients(params, exec)?,
            primes: PrimeTable::new(params)?,
            pi: params.ctx.pi(),
        })
    }

    /// `τ_(n,m) = W₀,₂ − W_ℝ − Σ W_p`.
    pub fn entry(&self, n: i64, m: i64) -> Float {
        let mut v = w02_entry(n, m, self.params);
        v -= arch_entry(n, m, &self.coeffs);
        v -= self.primes.entry(n, m, self.params, &self.pi);
        v
    }
}

/// Assembles `τ`, recovers `(a, b)` and checks parity and the difference-quotient structure.
pub fn assemble(params: &WeilParams, exec: Execution) -> Result<WeilMatrix> {
    let eval = EntryEvaluator::new(params, exec)?;
    let dim = params.dim();
    let pairs: Vec<(usize, usize)> = (0..dim)
        .flat_map(|r| (r..dim).map(move |c| (r, c)))
        .collect();
    let upper = exec.map(pairs.len(), |k| {
        let (r, c) = pairs[k];
        eval.entry(params.index(r), params.index(c))
    });
    let tau = SymMatrix::from_upper(dim, upper)?;
    WeilMatrix::from_tau(params.clone(), tau)
}

impl WeilMatrix {
    /// Wraps an existing `τ` (e.g. read from disk) and runs the structure checks.
    pub fn from_tau(params: WeilParams, tau: SymMatrix) -> Result<Self> {
        if tau.dim() != params.dim() {
            return Err(Error::InvalidParams(format!(
                "matrix dimension {} does not match 2N+1 = {}",
                tau.dim(),
                params.dim()
            )));
        }
        let a = (0..tau.dim()).map(|i| tau.get(i, i).clone()).collect();
        let b = least_squares_b(&params, &tau);
        let m = WeilMatrix { params, tau, a, b };
        let tol = m.params.ctx.tol_half();
        let parity = m.parity_defect();
        if parity > tol {
            return Err(Error::Structure(format!(
                "parity defect {:e} exceeds 2^(-bits/2)",
                parity.to_f64()
            )));
        }
        let structure = m.structure_defect();
        if structure > tol {
            return Err(Error::Structure(format!(
                "difference-quotient defect {:e} exceeds 2^(-bits/2)",
                structure.to_f64()
            )));
        }
        Ok(m)
    }

    pub fn entry(&self, i: i64, j: i64) -> &Float {
        self.tau.get(self.params.pos(i), self.params.pos(j))
    }

    pub fn a_at(&self, i: i64) -> &Float {
        &self.a[self.params.pos(i)]
    }

    pub fn b_at(&self, i: i64) -> &Float {
        &self.b[self.params.pos(i)]
    }

    /// `max |τ_(−i,−j) − τ_(i,j)|`.
    pub fn parity_defect(&self) -> Float {
        let dim = self.tau.dim();
        let mut worst = Float::new(self.params.prec());
        let mut d = Float::new(self.params.prec());
        for r in 0..dim {
            for c in r..dim {
                d.assign(self.tau.get(r, c) - self.tau.get(dim - 1 - r, dim - 1 - c));
                d.abs_mut();
                if d > worst {
                    worst.assign(&d);
                }
            }
        }
        worst
    }

    /// `max_(i≠j) |τ_ij (i − j) − (b_i − b_j)|`.
    pub fn structure_defect(&self) -> Float {
        let dim = self.tau.dim();
        let p = self.params.prec();
        let mut worst = Float::new(p);
        let mut d = Float::new(p);
        for r in 0..dim {
            for c in 0..dim {
                if r == c {
                    continue;
                }
                d.assign(self.tau.get(r, c) * (r as i64 - c as i64));
                d -= &self.b[r];
                d += &self.b[c];
                d.abs_mut();
                if d > worst {
                    worst.assign(&d);
                }
            }
        }
        worst
    }

    /// `max |τ_ij (i−j) + τ_jk (j−k) + τ_ki (k−i)|` over distinct triples. O(dim³).
    pub fn telescoping_defect(&self) -> Float {
        let dim = self.tau.dim();
        let p = self.params.prec();
        let mut worst = Float::new(p);
        let mut s = Float::new(p);
        for i in 0..dim {
            for j in (i + 1)..dim {
                for k in (j + 1)..dim {
                    let (ii, jj, kk) = (i as i64, j as i64, k as i64);
                    s.assign(self.tau.get(i, j) * (ii - jj));
                    s += Float::with_val(p, self.tau.get(j, k) * (jj - kk));
                    s += Float::with_val(p, self.tau.get(k, i) * (kk - ii));
                    s.abs_mut();
                    if s > worst {
                        worst.assign(&s);
                    }
                }
            }
        }
        worst
    }
}

/// Least-squares `b` from `τ_ij (i − j) = b_i − b_j` under `Σ b = 0`:
/// `b_i = (1/(2N+1)) Σ_(j≠i) τ_ij (i − j)`. Oddness of `b` follows from parity of `τ`.
fn least_squares_b(params: &WeilParams, tau: &SymMatrix) -> Vec<Float> {
    let dim = tau.dim();
    let p = params.prec();
    (0..dim)
        .map(|r| {
            let mut acc = Float::new(p);
            for c in 0..dim {
                if c != r {
                    acc += Float::with_val(p, tau.get(r, c) * (r as i64 - c as i64));
                }
            }
            acc / dim as u64
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(spec: &str, n: usize) -> WeilParams {
        WeilParams::new(spec.parse().unwrap(), n, PrecisionContext::new(192).unwrap()).unwrap()
    }

    #[test]
    fn lambda_spec_parsing() {
        assert_eq!("sqrt:13".parse::<LambdaSpec>().unwrap(), LambdaSpec::Sqrt(13));
        assert_eq!(
            "1.2".parse::<LambdaSpec>().unwrap(),
            LambdaSpec::Decimal("1.2".into())
        );
        assert!("sqrt:x".parse::<LambdaSpec>().is_err());
        assert!("abc".parse::<LambdaSpec>().is_err());
        assert_eq!(LambdaSpec::Sqrt(12).to_string(), "sqrt:12");
    }

    #[test]
    fn params_validation() {
        let ctx = PrecisionContext::new(128).unwrap();
        assert!(WeilParams::new(LambdaSpec::Decimal("0.9".into()), 3, ctx).is_err());
        assert!(WeilParams::new(LambdaSpec::Sqrt(2), 0, ctx).is_err());
        assert!(WeilParams::new(LambdaSpec::Sqrt(20_000), 3, ctx).is_err());
        let p = params("2", 3);
        let expected = Float::with_val(192, 4u32).ln();
        assert!(Float::with_val(192, &p.l - &expected).abs() < p.ctx.eps());
        assert_eq!(p.dim(), 7);
    }

    #[test]
    fn von_mangoldt_values() {
        let ctx = PrecisionContext::new(128).unwrap();
        assert_eq!(von_mangoldt(8, &ctx), ctx.real(2).ln());
        assert!(von_mangoldt(6, &ctx).is_zero());
        assert_eq!(von_mangoldt(13, &ctx), ctx.real(13).ln());
        assert!(von_mangoldt(1, &ctx).is_zero());
    }

    #[test]
    fn prime_powers_up_to_13() {
        let got = prime_powers(13);
        let expected = vec![
            (2, 2),
            (3, 3),
            (4, 2),
            (5, 5),
            (7, 7),
            (8, 2),
            (9, 3),
            (11, 11),
            (13, 13),
        ];
        assert_eq!(got, expected);
    }

    #[test]
    fn prime_sum_empty_below_two() {
        let p = params("1.2", 2);
        for n in -2..=2 {
            for m in -2..=2 {
                assert!(prime_entry(n, m, &p).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn prime_diagonal_zero_mode_at_lambda_two() {
        let p = params("2", 2);
        let got = prime_entry(0, 0, &p).unwrap();
        let ctx = &p.ctx;
        let mut expected = ctx.zero();
        for (k, base) in [(2u64, 2u64), (3, 3), (4, 2)] {
            let y = ctx.real(k).ln();
            let term = ctx.real(base).ln() / ctx.real(k).sqrt() * 2u32
                * (1u32 - Float::with_val(192, &y / &p.l));
            expected += term;
        }
        assert!(Float::with_val(192, &got - &expected).abs() < ctx.eps());
    }

    #[test]
    fn w02_zero_mode() {
        let p = params("3", 4);
        let got = w02_entry(0, 0, &p);
        let s = Float::with_val(192, &p.l / 4u32).sinh();
        let expected = Float::with_val(192, s.square_ref()) * 32u32 / &p.l;
        assert!(Float::with_val(192, &got - &expected).abs() < p.ctx.eps());
        assert_eq!(w02_entry(2, -3, &p), w02_entry(-2, 3, &p));
    }

    #[test]
    fn correction_c_matches_quadrature() {
        let p = params("sqrt:13", 1);
        let quad = crate::quad::TanhSinh::new(p.prec());
        let prec = p.prec();
        let r = quad
            .integrate(
                |x: &Float| {
                    let num = -(Float::with_val(prec, -x) / 2u32).exp_m1();
                    let den = Float::with_val(prec, x.sinh_ref()) * 2u32;
                    num / den
                },
                &p.ctx.zero(),
                &p.l,
                &p.ctx.tol_half(),
            )
            .unwrap();
        let d = Float::with_val(prec, &r.value - correction_c(&p.l, &p.ctx)).abs();
        assert!(d < p.ctx.tol_half(), "{d}");
    }

    #[test]
    fn correction_sum_value() {
        let p = params("sqrt:13", 1);
        let got = correction_sum(&p.l, &p.ctx).to_f64();
        assert!((got - 2.130_732_896_615_913_6).abs() < 1e-15, "{got}");
    }

    #[test]
    fn arch_table_shape() {
        let p = params("3", 3);
        let c = arch_coefficients(&p, Execution::Sequential).unwrap();
        assert!(c.alpha[0].is_zero());
        assert_eq!(arch_entry(2, 1, &c), arch_entry(1, 2, &c));
        let expected = Float::with_val(192, -&c.alpha[1]);
        assert_eq!(arch_entry(1, -1, &c), expected);
        let diag = Float::with_val(192, &c.gamma[2] - &c.beta[2]) * 2u32;
        assert_eq!(arch_entry(2, 2, &c), diag);
    }

    #[test]
    fn gamma_differences_cancel_corrections() {
        let p = params("3", 5);
        let c = arch_coefficients(&p, Execution::Sequential).unwrap();
        let kernel = ArchKernel::new(&p).unwrap();
        for n in 1..=5 {
            let (_, _, cos_int) = kernel.integrals(n).unwrap();
            let (_, _, cos_zero) = kernel.integrals(0).unwrap();
            let lhs = Float::with_val(192, &c.gamma[n as usize] - &c.gamma[0]);
            let rhs = cos_int - cos_zero;
            assert!(Float::with_val(192, &lhs - &rhs).abs() < p.ctx.eps());
        }
    }

    #[test]
    fn tiny_matrix_without_primes() {
        let p = params("1.2", 1);
        let m = assemble(&p, Execution::Sequential).unwrap();
        let coeffs = arch_coefficients(&p, Execution::Sequential).unwrap();
        for i in -1..=1 {
            for j in -1..=1 {
                let expected = w02_entry(i, j, &p) - arch_entry(i, j, &coeffs);
                assert_eq!(*m.entry(i, j), expected);
            }
        }
    }

    #[test]
    fn parity_and_structure() {
        let p = params("2", 5);
        let m = assemble(&p, Execution::Sequential).unwrap();
        let tol = p.ctx.tol_half();
        assert!(m.parity_defect() <= tol);
        assert!(m.structure_defect() <= tol);
        assert!(m.telescoping_defect() <= tol);
        assert!(m.b_at(0).clone().abs() <= tol);
        for i in 1..=5 {
            let s = Float::with_val(192, m.b_at(i) + m.b_at(-i)).abs();
            assert!(s <= tol);
            assert_eq!(m.a_at(i), m.a_at(-i));
        }
    }

    #[test]
    fn evaluator_is_symmetric() {
        let p = params("sqrt:13", 4);
        let e = EntryEvaluator::new(&p, Execution::Sequential).unwrap();
        for i in -4..=4 {
            for j in -4..=4 {
                let d = Float::with_val(192, e.entry(i, j) - e.entry(j, i)).abs();
                assert!(d <= p.ctx.tol_half());
            }
        }
    }

    #[test]
    fn parallel_matches_sequential() {
        let p = params("sqrt:13", 6);
        let s = assemble(&p, Execution::Sequential).unwrap();
        let q = assemble(&p, Execution::Parallel).unwrap();
        assert_eq!(s.tau, q.tau);
    }

    #[test]
    fn corrupted_matrix_is_rejected() {
        let p = params("2", 3);
        let m = assemble(&p, Execution::Sequential).unwrap();
        let mut tau = m.tau.clone();
        let bumped = Float::with_val(192, tau.get(1, 4) + 1e-10);
        tau.set(1, 4, &bumped);
        let mirror = Float::with_val(192, tau.get(5, 2) + 1e-10);
        tau.set(5, 2, &mirror);
        assert!(matches!(
            WeilMatrix::from_tau(p.clone(), tau),
            Err(Error::Structure(_))
        ));
    }
}

//! Independent oracles shared by the integration and acceptance tests.

#![allow(dead_code)]

use rug::{Complex, Float};
use weil_core::quad::TanhSinh;
use weil_core::weil_form::{q_basis, von_mangoldt, WeilParams};
use weil_core::{PrecisionContext, Result};

/// `e^(y/2) / (2 sinh y)`.
fn rho(y: &Float) -> Float {
    let prec = y.prec();
    let num = Float::with_val(prec, y / 2u32).exp();
    num / (Float::with_val(prec, y.sinh_ref()) * 2u32)
}

/// `(∫ sin·ρ, ∫ x cos·ρ, ∫ (cos − 1)·ρ)` over `[0, L]` at frequency `n`, by quadrature.
pub fn arch_integrals(n: i64, params: &WeilParams, tol: &Float) -> Result<(Float, Float, Float)> {
    let prec = params.prec();
    let quad = TanhSinh::new(prec);
    let l = params.l.clone();
    let pi = params.ctx.pi();
    let freq = Float::with_val(prec, &pi * (2 * n)) / &l;
    let zero = params.ctx.zero();
    let arg = |x: &Float| Float::with_val(prec, &freq * x);
    let sin_int = quad.integrate(|x| arg(x).sin() * rho(x), &zero, &l, tol)?;
    let xcos_int = quad.integrate(
        |x| arg(x).cos() * Float::with_val(prec, x * rho(x)),
        &zero,
        &l,
        tol,
    )?;
    let cos_int = quad.integrate(
        |x| {
            // cos θ − 1 = −2 sin²(θ/2), without cancellation near 0
            let half = Float::with_val(prec, arg(x) / 2u32).sin();
            Float::with_val(prec, half.square_ref()) * -2i32 * rho(x)
        },
        &zero,
        &l,
        tol,
    )?;
    Ok((sin_int.value, xcos_int.value, cos_int.value))
}

/// `τ(n, m)` from the integral forms of `W₀,₂` and `W_ℝ` applied to
/// `ω = q(U_n, U_m)`, and the prime sum evaluated pointwise.
pub fn tau_by_quadrature(n: i64, m: i64, params: &WeilParams, tol: &Float) -> Result<Float> {
    let prec = params.prec();
    let ctx = &params.ctx;
    let quad = TanhSinh::new(prec);
    let l = params.l.clone();
    let pi = ctx.pi();
    let zero = ctx.zero();
    let omega = |y: &Float| q_basis(n, m, y, &l, &pi);
    let omega0 = omega(&zero);

    let w02 = quad.integrate(
        |y| {
            let c = Float::with_val(prec, y / 2u32).cosh() * 2u32;
            omega(y) * c
        },
        &zero,
        &l,
        tol,
    )?;

    let pv = quad.integrate(
        |y| {
            let e = Float::with_val(prec, y / 2u32).exp_m1();
            let mut num = Float::with_val(prec, &e * omega(y));
            num += Float::with_val(prec, omega(y) - &omega0);
            num / (Float::with_val(prec, y.sinh_ref()) * 2u32)
        },
        &zero,
        &l,
        tol,
    )?;
    let tail = quad.integrate_to_infinity(
        |y| Float::with_val(prec, y.sinh_ref()).recip() / 2u32,
        &l,
        tol,
    )?;
    let four_pi = Float::with_val(prec, &pi * 4u32);
    let mut w_real = (four_pi.ln() + ctx.euler_gamma()) / 2u32 * &omega0;
    w_real += &pv.value;
    w_real -= Float::with_val(prec, &omega0 * &tail.value);

    let limit = params.lambda_spec.squared_floor(ctx)?;
    let mut primes = Float::new(prec);
    for k in 2..=limit {
        let lk = von_mangoldt(k, ctx);
        if lk.is_zero() {
            continue;
        }
        let y = ctx.real(k).ln();
        primes += lk / ctx.real(k).sqrt() * omega(&y);
    }
    Ok(w02.value - w_real - primes)
}

/// `‖h‖²` and `∫_ℝ h` by quadrature on the half-line.
pub fn hermite_moments(ctx: &PrecisionContext) -> Result<(Float, Float)> {
    let prec = ctx.bits();
    let quad = TanhSinh::new(prec);
    let tol = ctx.tol_half();
    let zero = ctx.zero();
    let integral = quad.integrate_to_infinity(weil_core::xi_oracle::hermite_h, &zero, &tol)?;
    let norm2 = quad.integrate_to_infinity(
        |u| {
            let h = weil_core::xi_oracle::hermite_h(u);
            Float::with_val(prec, h.square_ref())
        },
        &zero,
        &tol,
    )?;
    Ok((integral.value * 2u32, norm2.value * 2u32))
}

/// `√33 / 2^(17/4)`.
pub fn hermite_norm_closed_form(ctx: &PrecisionContext) -> Float {
    let prec = ctx.bits();
    let pow = ctx.real(4.25).exp2();
    Float::with_val(prec, ctx.real(33).sqrt() / pow)
}

/// `|a − b| / max(1, |a|)` for complex values.
pub fn rel_diff(a: &Complex, b: &Complex) -> Float {
    let prec = a.prec().0;
    let d = Float::with_val(prec, Complex::with_val(prec, a - b).abs_ref());
    let scale = Float::with_val(prec, a.abs_ref()).max(&Float::with_val(prec, 1));
    d / scale
}

//! Special functions at arbitrary precision: ψ, ψ⁽¹⁾, ₂F₁ for `|z| < 1` and the
//! Hurwitz–Lerch transcendent Φ(z, 2, x).
//!
//! ψ and ψ⁽¹⁾ shift the argument upward with the recurrences
//! `ψ(z+1) = ψ(z) + 1/z`, `ψ⁽¹⁾(z+1) = ψ⁽¹⁾(z) − 1/z²` until `|z|` clears a
//! precision-dependent radius, then sum the Bernoulli asymptotic series. The two
//! series functions are summed directly; every use in this crate has
//! `z = e^(−2L) < e^(−2)`.

use rug::{Assign, Complex, Float, Integer, Rational};

use crate::error::{Error, Result};
use crate::precision::{log2_abs, PrecisionContext};

/// Even-index Bernoulli numbers `B_2, B_4, …, B_(2 count)`, exact.
///
/// Uses the integer tangent-number recurrence; `B_(2n) = (−1)^(n−1) 2n T_n / (4^n (4^n − 1))`.
pub fn bernoulli_even(count: usize) -> Vec<Rational> {
    if count == 0 {
        return Vec::new();
    }
    let mut t = vec![Integer::new(); count + 1];
    t[1] = Integer::from(1);
    for k in 2..=count {
        t[k] = Integer::from(&t[k - 1] * (k as u64 - 1));
    }
    for k in 2..=count {
        for j in k..=count {
            let lower = Integer::from(&t[j - 1] * (j as u64 - k as u64));
            t[j] *= j as u64 - k as u64 + 2;
            t[j] += lower;
        }
    }
    (1..=count)
        .map(|n| {
            let four_n = Integer::from(1) << (2 * n as u32);
            let denom = &four_n * Integer::from(&four_n - 1u32);
            let numer = Integer::from(&t[n] * (2 * n as u64));
            let mut b = Rational::from((numer, denom));
            if n % 2 == 0 {
                b = -b;
            }
            b
        })
        .collect()
}

fn mag_log2(z: &Complex) -> f64 {
    log2_abs(z.real()).max(log2_abs(z.imag()))
}

fn is_nonpositive_integer(z: &Complex) -> bool {
    z.imag().is_zero() && z.real().is_integer() && *z.real() <= 0
}

/// Tracks the "three consecutive negligible terms" stopping rule.
struct SmallTermRun {
    run: usize,
    eps_log2: f64,
}

impl SmallTermRun {
    fn new(eps_log2: i32) -> Self {
        SmallTermRun {
            run: 0,
            eps_log2: f64::from(eps_log2),
        }
    }

    fn push(&mut self, term: &Complex, sum: &Complex) -> bool {
        let t = mag_log2(term);
        if t == f64::NEG_INFINITY || t < mag_log2(sum) + self.eps_log2 {
            self.run += 1;
        } else {
            self.run = 0;
        }
        self.run >= 3
    }
}

/// Retries a series evaluation once with doubled guard bits on non-convergence.
fn with_guard_retry<T>(
    ctx: &PrecisionContext,
    eval: impl Fn(&PrecisionContext) -> Result<T>,
) -> Result<T> {
    match eval(ctx) {
        Err(Error::NonConvergence { .. }) => eval(&ctx.with_doubled_guard()),
        other => other,
    }
}

/// Gauss hypergeometric `₂F₁(a, b; c; z)` for real `|z| < 1` by direct summation.
pub fn hyp2f1(
    a: &Float,
    b: &Complex,
    c: &Complex,
    z: &Float,
    ctx: &PrecisionContext,
) -> Result<Complex> {
    let cap = 10 * ctx.bits() as usize;
    hyp2f1_capped(a, b, c, z, ctx, cap)
}

/// [`hyp2f1`] with an explicit term cap.
pub fn hyp2f1_capped(
    a: &Float,
    b: &Complex,
    c: &Complex,
    z: &Float,
    ctx: &PrecisionContext,
    cap: usize,
) -> Result<Complex> {
    if z.clone().abs() >= 1 {
        return Err(Error::domain("hyp2f1", format!("|z| = {} >= 1", z.to_f64().abs())));
    }
    if is_nonpositive_integer(c) {
        return Err(Error::domain("hyp2f1", "c is a non-positive integer"));
    }
    let out_prec = ctx.bits();
    with_guard_retry(ctx, |ctx| {
        let prec = ctx.bits();
        let mut sum = Complex::with_val(prec, 1);
        let mut term = Complex::with_val(prec, 1);
        if z.is_zero() {
            return Ok(Complex::with_val(out_prec, &sum));
        }
        let a = Float::with_val(prec, a);
        let mut ak = a.clone();
        let mut bk = Complex::with_val(prec, b);
        let mut ck = Complex::with_val(prec, c);
        let mut stop = SmallTermRun::new(ctx.eps_log2());
        let mut ratio = Complex::new(prec);
        for k in 0..cap {
            ratio.assign(&bk * &ak);
            ratio *= z;
            ratio /= &ck;
            ratio /= (k + 1) as u64;
            term *= &ratio;
            sum += &term;
            if stop.push(&term, &sum) {
                return Ok(Complex::with_val(out_prec, &sum));
            }
            ak += 1;
            bk += 1;
            ck += 1;
        }
        Err(Error::NonConvergence {
            what: "hyp2f1 series",
            limit: cap,
        })
    })
}

/// Hurwitz–Lerch `Φ(z, 2, x) = Σ_(k≥0) z^k / (x + k)²` for real `|z| < 1`.
pub fn lerch_phi2(z: &Float, x: &Complex, ctx: &PrecisionContext) -> Result<Complex> {
    if z.clone().abs() >= 1 {
        return Err(Error::domain("lerch_phi2", format!("|z| = {} >= 1", z.to_f64().abs())));
    }
    if is_nonpositive_integer(x) {
        return Err(Error::domain("lerch_phi2", "x is a non-positive integer"));
    }
    let cap = 10 * ctx.bits() as usize;
    let out_prec = ctx.bits();
    with_guard_retry(ctx, |ctx| {
        let prec = ctx.bits();
        let mut xk = Complex::with_val(prec, x);
        let mut sum = Complex::with_val(prec, xk.square_ref()).recip();
        if z.is_zero() {
            return Ok(Complex::with_val(out_prec, &sum));
        }
        let mut zk = Float::with_val(prec, 1);
        let mut term = Complex::new(prec);
        let mut stop = SmallTermRun::new(ctx.eps_log2());
        for _ in 1..cap {
            xk += 1;
            zk *= z;
            term.assign(xk.square_ref());
            term.recip_mut();
            term *= &zk;
            sum += &term;
            if stop.push(&term, &sum) {
                return Ok(Complex::with_val(out_prec, &sum));
            }
        }
        Err(Error::NonConvergence {
            what: "lerch_phi2 series",
            limit: cap,
        })
    })
}

/// Evaluator for ψ and ψ⁽¹⁾ that owns its Bernoulli table.
///
/// Construction costs a few milliseconds at 700 bits; reuse one instance for many
/// arguments. Instances are immutable and can be shared across threads.
#[derive(Clone, Debug)]
pub struct Polygamma {
    ctx: PrecisionContext,
    prec: u32,
    radius: f64,
    bernoulli: Vec<Float>,
}

impl Polygamma {
    pub fn new(ctx: &PrecisionContext) -> Self {
        let prec = ctx.bits() + 16;
        let count = (prec / 4 + 16) as usize;
        let bernoulli = bernoulli_even(count)
            .into_iter()
            .map(|b| Float::with_val(prec, b))
            .collect();
        Polygamma {
            ctx: *ctx,
            prec,
            radius: f64::from(prec / 4).max(16.0),
            bernoulli,
        }
    }

    pub fn context(&self) -> &PrecisionContext {
        &self.ctx
    }

    fn check(&self, z: &Complex, func: &'static str) -> Result<()> {
        if is_nonpositive_integer(z) {
            return Err(Error::Pole {
                func,
                at: z.real().to_string_radix(10, Some(12)),
            });
        }
        Ok(())
    }

    /// Upward shift until `Re w > 1/2` and `|w| ≥ radius`; returns `w = z + n` and
    /// `(Σ 1/(z+j), Σ 1/(z+j)²)` over the skipped points.
    fn shift(&self, z: &Complex, want_squares: bool) -> (Complex, Complex, Complex) {
        let mut w = Complex::with_val(self.prec, z);
        let mut inv_sum = Complex::new(self.prec);
        let mut inv_sq_sum = Complex::new(self.prec);
        let mut inv = Complex::new(self.prec);
        loop {
            let re = w.real().to_f64();
            let im = w.imag().to_f64();
            if re > 0.5 && re.hypot(im) >= self.radius {
                break;
            }
            inv.assign(w.recip_ref());
            inv_sum += &inv;
            if want_squares {
                inv.square_mut();
                inv_sq_sum += &inv;
            }
            w += 1;
        }
        (w, inv_sum, inv_sq_sum)
    }

    pub fn digamma(&self, z: &Complex) -> Result<Complex> {
        self.check(z, "digamma")?;
        let (w, inv_sum, _) = self.shift(z, false);
        let winv = Complex::with_val(self.prec, w.recip_ref());
        let winv2 = Complex::with_val(self.prec, winv.square_ref());
        let mut sum = Complex::with_val(self.prec, w.ln_ref());
        sum -= Complex::with_val(self.prec, &winv / 2u32);
        let mut power = winv2.clone();
        let mut term = Complex::new(self.prec);
        let mut stop = SmallTermRun::new(-(self.prec as i32));
        for (k, b) in self.bernoulli.iter().enumerate() {
            term.assign(&power * b);
            term /= 2 * (k as u32 + 1);
            sum -= &term;
            if stop.push(&term, &sum) {
                sum -= &inv_sum;
                return Ok(Complex::with_val(self.ctx.bits(), &sum));
            }
            power *= &winv2;
        }
        Err(Error::NonConvergence {
            what: "digamma asymptotic series",
            limit: self.bernoulli.len(),
        })
    }

    pub fn trigamma(&self, z: &Complex) -> Result<Complex> {
        self.check(z, "trigamma")?;
        let (w, _, inv_sq_sum) = self.shift(z, true);
        let winv = Complex::with_val(self.prec, w.recip_ref());
        let winv2 = Complex::with_val(self.prec, winv.square_ref());
        let mut sum = winv.clone();
        sum += Complex::with_val(self.prec, &winv2 / 2u32);
        let mut power = Complex::with_val(self.prec, &winv2 * &winv);
        let mut term = Complex::new(self.prec);
        let mut stop = SmallTermRun::new(-(self.prec as i32));
        for b in &self.bernoulli {
            term.assign(&power * b);
            sum += &term;
            if stop.push(&term, &sum) {
                sum += &inv_sq_sum;
                return Ok(Complex::with_val(self.ctx.bits(), &sum));
            }
            power *= &winv2;
        }
        Err(Error::NonConvergence {
            what: "trigamma asymptotic series",
            limit: self.bernoulli.len(),
        })
    }
}

/// Digamma ψ(z) = Γ′(z)/Γ(z). Builds a fresh [`Polygamma`]; prefer that type in loops.
pub fn digamma(z: &Complex, ctx: &PrecisionContext) -> Result<Complex> {
    Polygamma::new(ctx).digamma(z)
}

/// Trigamma ψ⁽¹⁾(z).
pub fn trigamma(z: &Complex, ctx: &PrecisionContext) -> Result<Complex> {
    Polygamma::new(ctx).trigamma(z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rug::float::Constant;

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(256).unwrap()
    }

    fn close(a: &Complex, b: &Complex, tol_log2: i32) -> bool {
        let d = Complex::with_val(a.prec().0, a - b);
        let scale = mag_log2(b).max(0.0);
        mag_log2(&d) < scale + f64::from(tol_log2)
    }

    #[test]
    fn bernoulli_small_values() {
        let b = bernoulli_even(6);
        let expected = [(1, 6), (-1, 30), (1, 42), (-1, 30), (5, 66), (-691, 2730)];
        for (got, (n, d)) in b.iter().zip(expected) {
            assert_eq!(*got, Rational::from((n, d)));
        }
    }

    #[test]
    fn hyp2f1_at_zero_is_one() {
        let c = ctx();
        let v = hyp2f1(
            &c.real(1),
            &c.complex((0.25, 0)),
            &c.complex((1.25, 0)),
            &c.zero(),
            &c,
        )
        .unwrap();
        assert_eq!(v, Complex::with_val(256, 1));
    }

    #[test]
    fn hyp2f1_log_closed_form() {
        let c = ctx();
        let half = c.real(0.5);
        let v = hyp2f1(&c.real(1), &c.complex(1), &c.complex(2), &half, &c).unwrap();
        let expected = Complex::with_val(256, 2 * c.ln2());
        assert!(close(&v, &expected, c.eps_log2()));
    }

    #[test]
    fn hyp2f1_rejects_unit_argument() {
        let c = ctx();
        let r = hyp2f1(&c.real(1), &c.complex(1), &c.complex(2), &c.real(1), &c);
        assert!(matches!(r, Err(Error::Domain { .. })));
        let r = hyp2f1(&c.real(1), &c.complex(1), &c.complex(-2), &c.real(0.5), &c);
        assert!(matches!(r, Err(Error::Domain { .. })));
    }

    #[test]
    fn hyp2f1_cap_reports_nonconvergence() {
        let c = ctx();
        let r = hyp2f1_capped(&c.real(1), &c.complex(1), &c.complex(2), &c.real(0.9), &c, 5);
        assert!(matches!(r, Err(Error::NonConvergence { .. })));
    }

    #[test]
    fn lerch_at_zero_is_inverse_square() {
        let c = ctx();
        let x = c.complex((0.25, 3));
        let v = lerch_phi2(&c.zero(), &x, &c).unwrap();
        let expected = Complex::with_val(256, x.square_ref()).recip();
        assert!(close(&v, &expected, c.eps_log2()));
    }

    #[test]
    fn lerch_rejects_poles() {
        let c = ctx();
        assert!(lerch_phi2(&c.real(0.5), &c.complex(-3), &c).is_err());
        assert!(lerch_phi2(&c.real(1.5), &c.complex(1), &c).is_err());
    }

    #[test]
    fn digamma_at_one_is_minus_euler() {
        let c = ctx();
        let v = digamma(&c.complex(1), &c).unwrap();
        let expected = Complex::with_val(256, -c.euler_gamma());
        assert!(close(&v, &expected, c.eps_log2()));
    }

    #[test]
    fn digamma_quarter_closed_form() {
        let c = ctx();
        let v = digamma(&c.complex(0.25), &c).unwrap();
        let expected = -c.euler_gamma() - c.pi() / 2u32 - 3u32 * c.ln2();
        assert!(close(&v, &Complex::with_val(256, expected), c.eps_log2()));
    }

    #[test]
    fn trigamma_quarter_closed_form() {
        let c = ctx();
        let v = trigamma(&c.complex(0.25), &c).unwrap();
        let catalan = Float::with_val(256, Constant::Catalan);
        let expected = Float::with_val(256, c.pi().square_ref()) + 8u32 * catalan;
        assert!(close(&v, &Complex::with_val(256, expected), c.eps_log2()));
    }

    #[test]
    fn poles_are_rejected() {
        let c = ctx();
        assert!(matches!(digamma(&c.complex(0), &c), Err(Error::Pole { .. })));
        assert!(matches!(trigamma(&c.complex(-4), &c), Err(Error::Pole { .. })));
        assert!(digamma(&c.complex((-4, 1e-30)), &c).is_ok());
    }
}

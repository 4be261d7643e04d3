//! The rank-one perturbation `D_log^(λ,N)` of the scaling operator: its real
//! spectrum through the secular function `S(s) = Σ_j ξ_j / (j − s)`, the Fourier
//! transform `ξ̂` and the regularized determinant.

use rug::ops::Pow;
use rug::{Assign, Complex, Float};

use crate::error::{Error, Result};
use crate::par::Execution;
use crate::precision::{cabs, PrecisionContext};
use crate::spectral::{even_simple_check, minimal_vector, EigenDecomposition};
use crate::weil_form::WeilParams;

/// Sampling density at which bracketing starts; doubled until all roots are found.
const INITIAL_SAMPLES: usize = 32;
/// Largest sampling density per region before giving up.
const MAX_SAMPLES: usize = 4096;
/// Closest approach to a pole of the outer-region samples, in units of the index.
const OUTER_MIN_OFFSET: f64 = 1e-9;

/// `D_log^(λ,N)` through its data `(λ, N, ξ, ε_N)`.
#[derive(Clone, Debug)]
pub struct PerturbedOperator {
    pub params: WeilParams,
    /// `ξ_j` at position `j + N`, normalized by `Σ_j ξ_j = √L`.
    pub xi: Vec<Float>,
    pub eps_n: Float,
}

impl PerturbedOperator {
    /// Checks the normalization and parity of `xi`.
    pub fn new(params: WeilParams, xi: Vec<Float>, eps_n: Float) -> Result<Self> {
        if xi.len() != params.dim() {
            return Err(Error::InvalidParams(format!(
                "xi has {} coordinates, expected {}",
                xi.len(),
                params.dim()
            )));
        }
        let ctx = &params.ctx;
        let prec = ctx.bits();
        let mut sum = Float::new(prec);
        let mut mass = Float::new(prec);
        for v in &xi {
            sum += v;
            mass += Float::with_val(prec, v.abs_ref());
        }
        let sqrt_l = Float::with_val(prec, params.l.sqrt_ref());
        let scale = Float::with_val(prec, &mass).max(&Float::with_val(prec, 1));
        let tol = Float::with_val(prec, ctx.tol_half() * &scale);
        if Float::with_val(prec, &sum - &sqrt_l).abs() > tol {
            return Err(Error::InvalidParams(format!(
                "coefficients sum to {}, expected sqrt(L)",
                sum.to_f64()
            )));
        }
        let parity_tol = Float::with_val(prec, ctx.tol_quarter() * &scale);
        for (a, b) in xi.iter().zip(xi.iter().rev()) {
            if Float::with_val(prec, a - b).abs() > parity_tol {
                return Err(Error::InvalidParams("xi is not even".into()));
            }
        }
        Ok(PerturbedOperator { params, xi, eps_n })
    }

    /// Runs the even-simple check and normalizes the minimal eigenvector.
    pub fn from_decomposition(params: WeilParams, dec: &EigenDecomposition) -> Result<Self> {
        even_simple_check(dec, &params.ctx)?;
        let xi = minimal_vector(dec, &params)?;
        PerturbedOperator::new(params, xi, dec.eps_n.clone())
    }

    fn ctx(&self) -> &PrecisionContext {
        &self.params.ctx
    }

    fn prec(&self) -> u32 {
        self.params.prec()
    }

    pub fn n(&self) -> usize {
        self.params.n
    }

    pub fn xi_at(&self, j: i64) -> &Float {
        &self.xi[self.params.pos(j)]
    }

    /// `2π/L`, the spacing of the unperturbed spectrum.
    pub fn step(&self) -> Float {
        let pi = self.ctx().pi();
        Float::with_val(self.prec(), pi * 2u32) / &self.params.l
    }

    /// `(S(s), S′(s))` for real `s` away from the poles.
    pub fn secular(&self, s: &Float) -> (Float, Float) {
        let prec = self.prec();
        let mut value = Float::new(prec);
        let mut deriv = Float::new(prec);
        let mut inv = Float::new(prec);
        let mut term = Float::new(prec);
        for (pos, xi) in self.xi.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            let j = self.params.index(pos);
            inv.assign(j - s);
            inv.recip_mut();
            term.assign(xi * &inv);
            value += &term;
            term *= &inv;
            deriv += &term;
        }
        (value, deriv)
    }

    /// Indices whose coefficient is below `2^(−bits/2)·max|ξ|`.
    pub fn vanishing_indices(&self) -> Vec<i64> {
        let cut = self.zero_cut();
        (0..self.xi.len())
            .filter(|&p| self.xi[p].cmp_abs(&cut) != Some(std::cmp::Ordering::Greater))
            .map(|p| self.params.index(p))
            .collect()
    }

    fn zero_cut(&self) -> Float {
        let prec = self.prec();
        let mut max = Float::new(prec);
        for v in &self.xi {
            if v.cmp_abs(&max) == Some(std::cmp::Ordering::Greater) {
                max.assign(v.abs_ref());
            }
        }
        max * self.ctx().tol_half()
    }

    /// Copy with sub-threshold coefficients set to exactly zero.
    fn cleaned(&self) -> PerturbedOperator {
        let cut = self.zero_cut();
        let xi = self
            .xi
            .iter()
            .map(|v| {
                if v.cmp_abs(&cut) == Some(std::cmp::Ordering::Greater) {
                    v.clone()
                } else {
                    Float::new(v.prec())
                }
            })
            .collect();
        PerturbedOperator {
            params: self.params.clone(),
            xi,
            eps_n: self.eps_n.clone(),
        }
    }

    /// Upper bound on `|s|` for any root of `S`: `N + Σ|ξ_j||j| / |Σ ξ_j|`.
    fn root_bound(&self) -> Float {
        let prec = self.prec();
        let mut weighted = Float::new(prec);
        let mut sum = Float::new(prec);
        for (pos, v) in self.xi.iter().enumerate() {
            let j = self.params.index(pos);
            weighted += Float::with_val(prec, v.abs_ref()) * j.unsigned_abs();
            sum += v;
        }
        sum.abs_mut();
        weighted / sum + (self.n() as u64 + 1)
    }

    /// All `2N` roots of `Det(D″ − s)` in index units, their `|S|` residuals and the
    /// indices appended for vanishing coefficients.
    pub fn secular_roots(&self, exec: Execution) -> Result<SpectrumResult> {
        let op = self.cleaned();
        let prec = self.prec();
        let expected = 2 * self.n();
        let poles: Vec<i64> = (0..op.xi.len())
            .filter(|&p| !op.xi[p].is_zero())
            .map(|p| op.params.index(p))
            .collect();
        let vanishing: Vec<i64> = (0..op.xi.len())
            .filter(|&p| op.xi[p].is_zero())
            .map(|p| op.params.index(p))
            .collect();
        let interior_expected = poles.len().saturating_sub(1);

        let bound = op.root_bound();
        let mut regions = Vec::with_capacity(poles.len() + 1);
        regions.push(Region::Left {
            pole: poles[0],
            bound: bound.clone(),
        });
        for w in poles.windows(2) {
            regions.push(Region::Between(w[0], w[1]));
        }
        regions.push(Region::Right {
            pole: *poles.last().expect("at least one pole"),
            bound,
        });

        let mut samples = INITIAL_SAMPLES;
        let brackets = loop {
            let per_region = exec.map(regions.len(), |k| op.brackets(&regions[k], samples));
            let found: Vec<(Float, Float)> = per_region.into_iter().flatten().collect();
            if found.len() == interior_expected {
                break found;
            }
            if found.len() > interior_expected || samples >= MAX_SAMPLES {
                return Err(Error::RootCountMismatch {
                    expected,
                    found: found.len() + vanishing.len(),
                });
            }
            samples *= 2;
        };

        let polished = exec.try_map(brackets.len(), |k| {
            let (lo, hi) = &brackets[k];
            op.polish(lo, hi)
        })?;
        let mut roots: Vec<Float> = polished;
        roots.extend(vanishing.iter().map(|&j| Float::with_val(prec, j)));
        roots.sort_by(|a, b| a.partial_cmp(b).expect("finite roots"));
        if roots.len() != expected {
            return Err(Error::RootCountMismatch {
                expected,
                found: roots.len(),
            });
        }
        let residuals = roots
            .iter()
            .map(|r| {
                if r.is_integer() {
                    Float::new(prec)
                } else {
                    op.secular(r).0.abs()
                }
            })
            .collect();
        let step = self.step();
        let interior = roots
            .iter()
            .map(|r| Float::with_val(prec, r * &step))
            .collect();
        Ok(SpectrumResult {
            interior,
            roots,
            residuals,
            appended: vanishing,
            tail_rule: TailRule { step, n: self.n() },
        })
    }

    /// Sign-change brackets of `S` inside one region from `samples` sample points.
    fn brackets(&self, region: &Region, samples: usize) -> Vec<(Float, Float)> {
        let points = region.sample_points(samples, self.prec());
        let mut out = Vec::new();
        let mut prev: Option<(Float, bool)> = None;
        for x in points {
            let (v, _) = self.secular(&x);
            if v.is_zero() {
                out.push((x.clone(), x.clone()));
                prev = None;
                continue;
            }
            let neg = v.is_sign_negative();
            if let Some((px, pneg)) = &prev {
                if *pneg != neg {
                    out.push((px.clone(), x.clone()));
                }
            }
            prev = Some((x, neg));
        }
        out
    }

    /// Safeguarded Newton inside a sign-change bracket.
    fn polish(&self, lo: &Float, hi: &Float) -> Result<Float> {
        let prec = self.prec();
        if lo == hi {
            return Ok(lo.clone());
        }
        let mut lo = lo.clone();
        let mut hi = hi.clone();
        let lo_neg = self.secular(&lo).0.is_sign_negative();
        let mut x = Float::with_val(prec, &lo + &hi) / 2u32;
        let tol = self.ctx().eps();
        let limit = 4 * prec as usize;
        for _ in 0..limit {
            let (v, d) = self.secular(&x);
            if v.is_zero() {
                return Ok(x);
            }
            if v.is_sign_negative() == lo_neg {
                lo.assign(&x);
            } else {
                hi.assign(&x);
            }
            let width = Float::with_val(prec, &hi - &lo);
            let scale = Float::with_val(prec, x.abs_ref()).max(&Float::with_val(prec, 1));
            if width <= Float::with_val(prec, &tol * &scale) {
                return Ok(x);
            }
            let newton = Float::with_val(prec, &x - Float::with_val(prec, &v / &d));
            let inside = d.is_normal() && newton > lo && newton < hi;
            let next = if inside {
                newton
            } else {
                Float::with_val(prec, &lo + &hi) / 2u32
            };
            let moved = Float::with_val(prec, &next - &x).abs();
            x = next;
            if moved <= Float::with_val(prec, &tol * &scale) {
                return Ok(x);
            }
        }
        Err(Error::NonConvergence {
            what: "secular root polish",
            limit,
        })
    }

    /// `ξ̂(z) = 2 L^(−1/2) sin(zL/2) Σ_j ξ_j / (z − 2πj/L)`.
    pub fn xi_hat(&self, z: &Complex) -> Complex {
        let prec = self.prec();
        let l = &self.params.l;
        let step = self.step();
        let near = self.ctx().tol_quarter();
        let half_l = Float::with_val(prec, l / 2u32);
        let mut singular: Option<(i64, Complex)> = None;
        let mut sum = Complex::new(prec);
        for (pos, xi) in self.xi.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            let j = self.params.index(pos);
            let delta = Complex::with_val(prec, z - Float::with_val(prec, &step * j));
            if singular.is_none() && cabs(&delta) < near {
                singular = Some((j, delta));
                continue;
            }
            sum += Complex::with_val(prec, xi / delta);
        }
        let mut value = Complex::with_val(prec, z * &half_l).sin() * sum;
        if let Some((j, delta)) = singular {
            // sin(zL/2)/(z − 2πj/L) = (−1)^j (L/2) sinc((z − 2πj/L) L/2)
            let arg = Complex::with_val(prec, &delta * &half_l);
            let sinc = if arg.is_zero() {
                Complex::with_val(prec, 1)
            } else {
                Complex::with_val(prec, arg.sin_ref()) / arg
            };
            let mut term = sinc * &half_l * self.xi_at(j);
            if j % 2 != 0 {
                term = -term;
            }
            value += term;
        }
        let factor = Float::with_val(prec, l.sqrt_ref()).recip() * 2u32;
        value * factor
    }

    /// `λ^(−iz) = exp(−iz ln λ)`.
    fn lambda_power(&self, z: &Complex) -> Complex {
        let prec = self.prec();
        let ln_lambda = Float::with_val(prec, &self.params.l / 2u32);
        let mut e = Complex::with_val(prec, z * &ln_lambda);
        e *= Complex::with_val(prec, (0, -1));
        e.exp()
    }

    /// `det_reg(D_log^(λ,N) − z) = −i λ^(−iz) ξ̂(z)`.
    pub fn det_reg(&self, z: &Complex) -> Complex {
        let prec = self.prec();
        let minus_i = Complex::with_val(prec, (0, -1));
        self.lambda_power(z) * self.xi_hat(z) * minus_i
    }

    /// `(1 − e^(−izL)) L^(−1/2) Σ_j ξ_j / (2πj/L − z)`, valid away from the lattice.
    pub fn det_reg_product(&self, z: &Complex) -> Complex {
        let prec = self.prec();
        let step = self.step();
        let mut sum = Complex::new(prec);
        for (pos, xi) in self.xi.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            let j = self.params.index(pos);
            let denom = Complex::with_val(prec, Float::with_val(prec, &step * j) - z);
            sum += Complex::with_val(prec, xi / denom);
        }
        let inv_sqrt_l = Float::with_val(prec, self.params.l.sqrt_ref()).recip();
        det_reg_free(z, &self.params.l) * sum * inv_sqrt_l
    }

    /// Checks that `ξ̂` vanishes at every interior root and changes sign exactly at
    /// the merged zero set `interior ∪ {2πj/L : N < |j| ≤ J}` inside `|x| ≤ J·2π/L`,
    /// `J = N + extra_tail`.
    pub fn verify_det_spectrum(
        &self,
        spectrum: &SpectrumResult,
        extra_tail: usize,
    ) -> Result<VerificationReport> {
        let prec = self.prec();
        let step = &spectrum.tail_rule.step;
        let tol = self.ctx().tol_quarter();
        let mut worst = Float::new(prec);
        for r in &spectrum.interior {
            let value = cabs(&self.xi_hat(&Complex::with_val(prec, r)));
            let scale = self.local_scale(r);
            let ratio = value / &scale;
            if ratio > tol {
                return Err(Error::IdentityViolation(format!(
                    "|xi_hat| / scale = {:e} at spectrum point {}",
                    ratio.to_f64(),
                    r.to_f64()
                )));
            }
            if ratio > worst {
                worst = ratio;
            }
        }

        let reach = self.n() + extra_tail;
        let limit = Float::with_val(prec, step * (reach as u64));
        let mut zeros: Vec<Float> = spectrum
            .interior
            .iter()
            .filter(|r| Float::with_val(prec, r.abs_ref()) < limit)
            .cloned()
            .collect();
        for j in (self.n() + 1)..=reach {
            let point = Float::with_val(prec, step * (j as u64));
            zeros.push(Float::with_val(prec, -&point));
            zeros.push(point);
        }
        zeros.sort_by(|a, b| a.partial_cmp(b).expect("finite"));

        let mut previous: Option<bool> = None;
        for w in zeros.windows(2) {
            let gap_sign = self.gap_sign(&w[0], &w[1])?;
            if let Some(prev) = previous {
                if prev == gap_sign {
                    return Err(Error::IdentityViolation(format!(
                        "xi_hat keeps its sign across the zero at {}",
                        w[0].to_f64()
                    )));
                }
            }
            previous = Some(gap_sign);
        }
        Ok(VerificationReport {
            max_relative_residual: worst,
            zeros_checked: zeros.len(),
        })
    }

    /// `2 L^(−1/2) Σ_j |ξ_j| / |x − 2πj/L|`, the size of the terms of `ξ̂(x)`.
    fn local_scale(&self, x: &Float) -> Float {
        let prec = self.prec();
        let step = self.step();
        let mut acc = Float::new(prec);
        for (pos, xi) in self.xi.iter().enumerate() {
            let j = self.params.index(pos);
            let d = Float::with_val(prec, x - Float::with_val(prec, &step * j)).abs();
            if !d.is_zero() {
                acc += Float::with_val(prec, xi.abs_ref()) / d;
            }
        }
        acc * 2u32 / Float::with_val(prec, self.params.l.sqrt_ref())
    }

    /// Common sign of `ξ̂` at interior points of `(a, b)`; fails on a sign change.
    fn gap_sign(&self, a: &Float, b: &Float) -> Result<bool> {
        let prec = self.prec();
        let mut sign = None;
        for k in 1..=4u32 {
            let t = Float::with_val(prec, k) / 5u32;
            let x = Float::with_val(prec, a + Float::with_val(prec, b - a) * t);
            let v = self.xi_hat(&Complex::with_val(prec, &x));
            let neg = v.real().is_sign_negative();
            if *sign.get_or_insert(neg) != neg {
                return Err(Error::IdentityViolation(format!(
                    "xi_hat changes sign between consecutive zeros {} and {}",
                    a.to_f64(),
                    b.to_f64()
                )));
            }
        }
        Ok(sign.expect("four samples"))
    }
}

/// `det_reg(D_log − z) = 1 − e^(−izL)` for the unperturbed scaling operator.
pub fn det_reg_free(z: &Complex, l: &Float) -> Complex {
    let prec = l.prec();
    let mut e = Complex::with_val(prec, z * l);
    e *= Complex::with_val(prec, (0, -1));
    1u32 - e.exp()
}

/// A root-search region of the secular function.
enum Region {
    Left { pole: i64, bound: Float },
    Between(i64, i64),
    Right { pole: i64, bound: Float },
}

impl Region {
    /// Sample points strictly inside the region: Chebyshev-clustered between
    /// poles, geometric away from the outermost pole.
    fn sample_points(&self, samples: usize, prec: u32) -> Vec<Float> {
        match self {
            Region::Between(a, b) => {
                let width = Float::with_val(prec, b - a);
                let pi = Float::with_val(prec, rug::float::Constant::Pi);
                (1..samples)
                    .map(|k| {
                        let theta = Float::with_val(prec, &pi * k as u64) / samples as u64;
                        let t = (1u32 - theta.cos()) / 2u32;
                        Float::with_val(prec, &width * t) + *a
                    })
                    .collect()
            }
            Region::Left { pole, bound } | Region::Right { pole, bound } => {
                let reach = Float::with_val(prec, bound + pole.unsigned_abs())
                    .max(&Float::with_val(prec, 2));
                let min = Float::with_val(prec, OUTER_MIN_OFFSET);
                let ratio = Float::with_val(prec, &reach / &min);
                let mut offsets: Vec<Float> = (0..=samples)
                    .map(|k| {
                        let e = Float::with_val(prec, k as u64) / samples as u64;
                        Float::with_val(prec, (&ratio).pow(&e)) * &min
                    })
                    .collect();
                if let Region::Left { .. } = self {
                    offsets.reverse();
                    offsets
                        .into_iter()
                        .map(|d| Float::with_val(prec, *pole) - d)
                        .collect()
                } else {
                    offsets
                        .into_iter()
                        .map(|d| d + *pole)
                        .collect()
                }
            }
        }
    }
}

/// The points `2πj/L`, `|j| > N`, which stay in the spectrum unchanged.
#[derive(Clone, Debug)]
pub struct TailRule {
    pub step: Float,
    pub n: usize,
}

impl TailRule {
    /// `2πj/L` when `|j| > N`.
    pub fn point(&self, j: i64) -> Option<Float> {
        (j.unsigned_abs() as usize > self.n)
            .then(|| Float::with_val(self.step.prec(), &self.step * j))
    }

    pub fn describe(&self) -> String {
        format!("2*pi*j/L for |j| > {}", self.n)
    }
}

/// Real spectrum of `D_log^(λ,N)` restricted to `E_N`, plus the tail rule.
#[derive(Clone, Debug)]
pub struct SpectrumResult {
    /// Spectrum points `2π s/L`, ascending.
    pub interior: Vec<Float>,
    /// Roots `s` in index units, ascending.
    pub roots: Vec<Float>,
    /// `|S(s)|` at each root; zero for appended indices.
    pub residuals: Vec<Float>,
    /// Indices with vanishing coefficient, returned as roots unchanged.
    pub appended: Vec<i64>,
    pub tail_rule: TailRule,
}

impl SpectrumResult {
    /// Strictly positive spectrum points, ascending.
    pub fn positive(&self) -> Vec<Float> {
        self.interior
            .iter()
            .filter(|x| x.is_sign_positive() && !x.is_zero())
            .cloned()
            .collect()
    }

    /// `max |x + y|` over the pairs `(x, y)` matched by reversing the list.
    pub fn symmetry_defect(&self) -> Float {
        let prec = self.tail_rule.step.prec();
        let mut worst = Float::new(prec);
        for (a, b) in self.interior.iter().zip(self.interior.iter().rev()) {
            let d = Float::with_val(prec, a + b).abs();
            if d > worst {
                worst = d;
            }
        }
        worst
    }
}

/// Outcome of [`PerturbedOperator::verify_det_spectrum`].
#[derive(Clone, Debug)]
pub struct VerificationReport {
    pub max_relative_residual: Float,
    pub zeros_checked: usize,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weil_form::LambdaSpec;

    fn params(n: usize) -> WeilParams {
        WeilParams::new(LambdaSpec::Sqrt(13), n, PrecisionContext::new(160).unwrap()).unwrap()
    }

    fn concentrated(n: usize) -> PerturbedOperator {
        let p = params(n);
        let mut xi = vec![Float::new(p.prec()); p.dim()];
        xi[n] = Float::with_val(p.prec(), p.l.sqrt_ref());
        let zero = Float::new(p.prec());
        PerturbedOperator::new(p, xi, zero).unwrap()
    }

    #[test]
    fn concentrated_vector_spectrum() {
        let op = concentrated(3);
        let s = op.secular_roots(Execution::Sequential).unwrap();
        let expected: Vec<i64> = vec![-3, -2, -1, 1, 2, 3];
        assert_eq!(s.appended, expected);
        for (r, j) in s.roots.iter().zip(&expected) {
            assert_eq!(*r, *j);
        }
    }

    #[test]
    fn xi_hat_at_zero_is_l() {
        let op = concentrated(2);
        let v = op.xi_hat(&Complex::with_val(160, 0));
        let d = cabs(&(v - &op.params.l));
        assert!(d < 1e-40);
    }

    #[test]
    fn free_determinant_vanishes_on_lattice() {
        let op = concentrated(1);
        let l = &op.params.l;
        assert!(det_reg_free(&Complex::with_val(160, 0), l).is_zero());
        let z = Complex::with_val(160, op.step());
        assert!(cabs(&det_reg_free(&z, l)) < 1e-40);
    }

    #[test]
    fn rejects_bad_normalization() {
        let p = params(1);
        let xi = vec![Float::with_val(160, 1); 3];
        assert!(PerturbedOperator::new(p, xi, Float::new(160)).is_err());
    }

    #[test]
    fn tail_rule_points() {
        let op = concentrated(2);
        let s = op.secular_roots(Execution::Sequential).unwrap();
        assert!(s.tail_rule.point(2).is_none());
        let p = s.tail_rule.point(-3).unwrap();
        let expected = Float::with_val(160, op.step() * -3i32);
        assert_eq!(p, expected);
    }
}

use proptest::prelude::*;
use rug::{Complex, Float};
use weil_core::dirac_pert::PerturbedOperator;
use weil_core::matrix::SymMatrix;
use weil_core::quad::TanhSinh;
use weil_core::spectral::jacobi_eig;
use weil_core::weil_form::{LambdaSpec, WeilParams};
use weil_core::{Error, Execution, PrecisionContext};

const BITS: u32 = 192;

fn ctx() -> PrecisionContext {
    PrecisionContext::new(BITS).unwrap()
}

/// Determinant by Gaussian elimination with partial pivoting.
fn det(mut a: Vec<Vec<Float>>) -> Float {
    let n = a.len();
    let mut det = Float::with_val(BITS, 1);
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].cmp_abs(&a[j][col]).unwrap())
            .unwrap();
        if a[pivot][col].is_zero() {
            return Float::new(BITS);
        }
        if pivot != col {
            a.swap(pivot, col);
            det = -det;
        }
        det *= &a[col][col];
        for r in (col + 1)..n {
            let f = Float::with_val(BITS, &a[r][col] / &a[col][col]);
            let (top, bottom) = a.split_at_mut(r);
            for (x, p) in bottom[0][col..].iter_mut().zip(&top[col][col..]) {
                *x -= Float::with_val(BITS, &f * p);
            }
        }
    }
    det
}

/// Normalizes raw even coefficients so that they sum to `√L`.
fn operator(n: usize, half: &[f64]) -> PerturbedOperator {
    let params = WeilParams::new(LambdaSpec::Decimal("2".into()), n, ctx()).unwrap();
    let raw: Vec<f64> = (-(n as i64)..=n as i64)
        .map(|j| half[j.unsigned_abs() as usize])
        .collect();
    let sum: f64 = raw.iter().sum();
    let scale = Float::with_val(BITS, params.l.sqrt_ref()) / Float::with_val(BITS, sum);
    let mut xi: Vec<Float> = raw.iter().map(|v| Float::with_val(BITS, v * &scale)).collect();
    // Restore exact parity after rounding.
    for k in 0..n {
        let mirror = xi[2 * n - k].clone();
        xi[k] = mirror;
    }
    let total: Float = xi.iter().fold(Float::new(BITS), |acc, v| acc + v);
    let fix = Float::with_val(BITS, params.l.sqrt_ref()) - total;
    xi[n] += fix;
    PerturbedOperator::new(params, xi, Float::new(BITS)).unwrap()
}

fn symmetric_matrix() -> impl Strategy<Value = Vec<i32>> {
    prop::collection::vec(-20i32..=20, 21)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn jacobi_eigenvalues_are_roots_of_the_characteristic_polynomial(upper in symmetric_matrix()) {
        let ctx = ctx();
        let vals: Vec<Float> = upper.iter().map(|&v| Float::with_val(BITS, v)).collect();
        let m = SymMatrix::from_upper(6, vals).unwrap();
        let dec = jacobi_eig(&m, &ctx).unwrap();
        let norm = m.frobenius_norm().to_f64().max(1.0);
        for value in &dec.values {
            let rows: Vec<Vec<Float>> = (0..6)
                .map(|r| {
                    (0..6)
                        .map(|c| {
                            let mut x = m.get(r, c).clone();
                            if r == c {
                                x -= value;
                            }
                            x
                        })
                        .collect()
                })
                .collect();
            let d = det(rows).abs().to_f64();
            prop_assert!(d <= norm.powi(6) * 1e-40, "det {d} at {}", value.to_f64());
        }
        let trace: f64 = (0..6).map(|i| m.get(i, i).to_f64()).sum();
        let sum: f64 = dec.values.iter().map(Float::to_f64).sum();
        prop_assert!((trace - sum).abs() < 1e-9);
    }

    #[test]
    fn single_mode_roots_solve_the_quadratic(a in 0.05f64..2.0, b in 0.05f64..2.0) {
        let op = operator(1, &[b, a]);
        let spec = op.secular_roots(Execution::Sequential).unwrap();
        prop_assert_eq!(spec.roots.len(), 2);
        // a/(−1−s) + b/(−s) + a/(1−s) = 0  ⇔  s² = ξ₀/(ξ₋₁ + ξ₀ + ξ₁)
        let l = &op.params.l;
        let sqrt_l = Float::with_val(BITS, l.sqrt_ref());
        let expected = Float::with_val(BITS, op.xi_at(0) / sqrt_l).sqrt();
        let lo = Float::with_val(BITS, &spec.roots[0] + &expected).abs();
        let hi = Float::with_val(BITS, &spec.roots[1] - &expected).abs();
        prop_assert!(lo < 1e-40 && hi < 1e-40, "{} {}", lo.to_f64(), hi.to_f64());
    }

    #[test]
    fn positive_coefficients_interlace(half in prop::collection::vec(0.05f64..3.0, 4)) {
        let op = operator(3, &half);
        let spec = op.secular_roots(Execution::Sequential).unwrap();
        prop_assert_eq!(spec.roots.len(), 6);
        for (k, root) in spec.roots.iter().enumerate() {
            let left = k as f64 - 3.0;
            let r = root.to_f64();
            prop_assert!(left < r && r < left + 1.0, "root {k} = {r}");
        }
    }

    #[test]
    fn even_coefficients_give_a_symmetric_spectrum(
        half in prop::collection::vec(-2.0f64..2.0, 4)
    ) {
        let total = half[0] + 2.0 * half[1..].iter().sum::<f64>();
        prop_assume!(total.abs() > 0.2 && half.iter().all(|v| v.abs() > 1e-3));
        let op = operator(3, &half);
        // Mixed signs may push roots off the real axis.
        match op.secular_roots(Execution::Sequential) {
            Ok(spec) => {
                prop_assert_eq!(spec.interior.len(), 6);
                prop_assert!(spec.symmetry_defect() < 1e-40);
            }
            Err(Error::RootCountMismatch { expected, found }) => {
                prop_assert_eq!(expected, 6);
                prop_assert!(found < 6 && found % 2 == 0);
            }
            Err(e) => prop_assert!(false, "{e}"),
        }
    }

    #[test]
    fn xi_hat_is_the_fourier_transform(half in prop::collection::vec(-2.0f64..2.0, 3)) {
        let total = half[0] + 2.0 * (half[1] + half[2]);
        prop_assume!(total.abs() > 0.2);
        let op = operator(2, &half);
        let l = op.params.l.clone();
        let pi = op.params.ctx.pi();
        let z = Complex::with_val(BITS, (1, 1));
        let inv_sqrt_l = Float::with_val(BITS, l.sqrt_ref()).recip();
        // e^(−izx) L^(−1/2) Σ_j ξ_j e^(2πijx/L)
        let integrand = |x: &Float| {
            let mut f = Complex::new(BITS);
            for j in -2i64..=2 {
                let phase = Float::with_val(BITS, &pi * (2 * j)) * x / &l;
                f += Complex::with_val(BITS, (phase.cos_ref(), phase.sin_ref())) * op.xi_at(j);
            }
            let e = Complex::with_val(BITS, &z * x) * Complex::with_val(BITS, (0, -1));
            f * e.exp() * &inv_sqrt_l
        };
        let quad = TanhSinh::new(BITS);
        let tol = Float::with_val(BITS, 1e-45);
        let zero = Float::new(BITS);
        let re = quad.integrate(|x| integrand(x).real().clone(), &zero, &l, &tol).unwrap();
        let im = quad.integrate(|x| integrand(x).imag().clone(), &zero, &l, &tol).unwrap();
        let transform = Complex::with_val(BITS, (re.value, im.value));
        // ∫₀^L e^(−izx) f(x) dx = e^(−izL/2) ξ̂(z)
        let half_l = Float::with_val(BITS, &l / 2u32);
        let shift = (Complex::with_val(BITS, &z * &half_l) * Complex::with_val(BITS, (0, -1))).exp();
        let expected = shift * op.xi_hat(&z);
        let d = weil_core::precision::cabs(&(transform - expected)).to_f64();
        prop_assert!(d < 1e-35, "{d}");
    }
}

//! Symmetric eigendecomposition by cyclic Jacobi, the even-simple test and the
//! normalized minimal eigenvector `ξ`.

use rug::ops::NegAssign;
use rug::{Assign, Float};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::{dot, norm2, SymMatrix};
use crate::precision::PrecisionContext;
use crate::weil_form::WeilParams;

/// Sweep cap for [`jacobi_eig`].
pub const DEFAULT_MAX_SWEEPS: usize = 100;

/// Eigenvalues in ascending order with orthonormal eigenvectors.
#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    pub values: Vec<Float>,
    /// `vectors[k]` is the unit eigenvector of `values[k]`.
    pub vectors: Vec<Vec<Float>>,
    pub eps_n: Float,
    pub xi_raw: Vec<Float>,
    /// `values[1] − values[0]`, zero for a 1×1 matrix.
    pub gap: Float,
    /// `‖Pξ − ξ‖` with `P` reversing the coordinate order.
    pub parity_defect: Float,
    /// `‖M‖_F` of the decomposed matrix.
    pub norm: Float,
    pub sweeps: usize,
}

/// Cyclic Jacobi with the default sweep cap.
pub fn jacobi_eig(m: &SymMatrix, ctx: &PrecisionContext) -> Result<EigenDecomposition> {
    jacobi_eig_capped(m, ctx, DEFAULT_MAX_SWEEPS)
}

/// Cyclic Jacobi, row-major over the upper triangle, until the off-diagonal
/// Frobenius norm drops to `eps·‖M‖_F`. Only the upper triangle is stored in the
/// working copy.
pub fn jacobi_eig_capped(
    m: &SymMatrix,
    ctx: &PrecisionContext,
    max_sweeps: usize,
) -> Result<EigenDecomposition> {
    let n = m.dim();
    if n == 0 {
        return Err(Error::InvalidParams("empty matrix".into()));
    }
    let prec = ctx.bits();
    let mut a: Vec<Float> = (0..n * n)
        .map(|k| Float::with_val(prec, m.get(k / n, k % n)))
        .collect();
    // Row k of `v` is the k-th eigenvector.
    let mut v: Vec<Float> = (0..n * n)
        .map(|k| Float::with_val(prec, u32::from(k / n == k % n)))
        .collect();

    let norm = m.frobenius_norm();
    let target = Float::with_val(prec, &norm * ctx.eps());
    // Rotations with |a_pq| below this contribute less than target² in total.
    let skip = Float::with_val(prec, &target / n as u64);

    let mut sweeps = 0;
    let mut rot = Rotation::new(prec);
    loop {
        let off = off_diagonal_norm(&a, n);
        if off <= target {
            break;
        }
        if sweeps == max_sweeps {
            return Err(Error::NonConvergence {
                what: "Jacobi eigensolver",
                limit: max_sweeps,
            });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                if a[p * n + q].cmp_abs(&skip) != Some(std::cmp::Ordering::Greater) {
                    continue;
                }
                rot.compute(&a[p * n + p], &a[q * n + q], &a[p * n + q]);
                rot.apply(&mut a, &mut v, n, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i * n + i].partial_cmp(&a[j * n + j]).expect("finite"));
    let values: Vec<Float> = order.iter().map(|&i| a[i * n + i].clone()).collect();
    let vectors: Vec<Vec<Float>> = order
        .iter()
        .map(|&i| v[i * n..(i + 1) * n].to_vec())
        .collect();
    let eps_n = values[0].clone();
    let gap = if n > 1 {
        Float::with_val(prec, &values[1] - &values[0])
    } else {
        Float::new(prec)
    };
    let xi_raw = vectors[0].clone();
    let parity_defect = parity_defect(&xi_raw);
    Ok(EigenDecomposition {
        values,
        vectors,
        eps_n,
        xi_raw,
        gap,
        parity_defect,
        norm,
        sweeps,
    })
}

fn off_diagonal_norm(a: &[Float], n: usize) -> Float {
    let prec = a[0].prec();
    let mut acc = Float::new(prec);
    for p in 0..n {
        for q in (p + 1)..n {
            acc += Float::with_val(prec, a[p * n + q].square_ref());
        }
    }
    acc *= 2u32;
    acc.sqrt()
}

/// Scratch space for one Jacobi rotation.
struct Rotation {
    c: Float,
    s: Float,
    t: Float,
    theta: Float,
    g: Float,
    h: Float,
}

impl Rotation {
    fn new(prec: u32) -> Self {
        Rotation {
            c: Float::new(prec),
            s: Float::new(prec),
            t: Float::new(prec),
            theta: Float::new(prec),
            g: Float::new(prec),
            h: Float::new(prec),
        }
    }

    /// Rutishauser's choice of the smaller rotation angle.
    fn compute(&mut self, app: &Float, aqq: &Float, apq: &Float) {
        self.theta.assign(aqq - app);
        self.theta /= apq;
        self.theta /= 2u32;
        // t = sign(θ) / (|θ| + sqrt(θ² + 1))
        self.t.assign(self.theta.square_ref());
        self.t += 1u32;
        self.t.sqrt_mut();
        self.g.assign(self.theta.abs_ref());
        self.t += &self.g;
        self.t.recip_mut();
        if self.theta.is_sign_negative() {
            self.t.neg_assign();
        }
        self.c.assign(self.t.square_ref());
        self.c += 1u32;
        self.c.recip_sqrt_mut();
        self.s.assign(&self.t * &self.c);
    }

    fn apply(&mut self, a: &mut [Float], v: &mut [Float], n: usize, p: usize, q: usize) {
        self.g.assign(&self.t * &a[p * n + q]);
        a[p * n + p] -= &self.g;
        a[q * n + q] += &self.g;
        a[p * n + q].assign(0);
        for k in 0..n {
            if k == p || k == q {
                continue;
            }
            let (x, y) = pair_mut(a, upper(n, k, p), upper(n, k, q));
            self.rotate(x, y);
        }
        for k in 0..n {
            let (x, y) = pair_mut(v, p * n + k, q * n + k);
            self.rotate(x, y);
        }
    }

    /// `(x, y) ← (c x − s y, s x + c y)`.
    #[inline]
    fn rotate(&mut self, x: &mut Float, y: &mut Float) {
        self.g.assign(&*x);
        x.assign((&self.c * &self.g) - (&self.s * &*y));
        self.h.assign((&self.s * &self.g) + (&self.c * &*y));
        std::mem::swap(y, &mut self.h);
    }
}

/// Row-major index of `(i, j)` in the upper triangle.
#[inline]
fn upper(n: usize, i: usize, j: usize) -> usize {
    if i < j {
        i * n + j
    } else {
        j * n + i
    }
}

/// Two distinct mutable elements of a slice.
#[inline]
fn pair_mut(v: &mut [Float], i: usize, j: usize) -> (&mut Float, &mut Float) {
    debug_assert!(i != j);
    if i < j {
        let (lo, hi) = v.split_at_mut(j);
        (&mut lo[i], &mut hi[0])
    } else {
        let (lo, hi) = v.split_at_mut(i);
        (&mut hi[0], &mut lo[j])
    }
}

/// `‖Px − x‖` where `P` reverses the coordinates (the index flip `j ↦ −j`).
pub fn parity_defect(x: &[Float]) -> Float {
    let prec = x.first().map_or(64, |v| v.prec());
    let mut acc = Float::new(prec);
    for (a, b) in x.iter().zip(x.iter().rev()) {
        acc += Float::with_val(prec, a - b).square();
    }
    acc.sqrt()
}

impl EigenDecomposition {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// `max_k ‖M v_k − μ_k v_k‖`.
    pub fn max_residual(&self, m: &SymMatrix) -> Float {
        let prec = self.eps_n.prec();
        let mut worst = Float::new(prec);
        for (mu, vec) in self.values.iter().zip(&self.vectors) {
            let mut r = m.mul_vec(vec);
            for (ri, vi) in r.iter_mut().zip(vec) {
                *ri -= Float::with_val(prec, mu * vi);
            }
            let nr = norm2(&r);
            if nr > worst {
                worst = nr;
            }
        }
        worst
    }

    /// `‖VᵀV − I‖_F`.
    pub fn orthogonality_defect(&self) -> Float {
        let prec = self.eps_n.prec();
        let mut acc = Float::new(prec);
        for i in 0..self.dim() {
            for j in i..self.dim() {
                let mut d = dot(&self.vectors[i], &self.vectors[j]);
                if i == j {
                    d -= 1u32;
                }
                let sq = d.square();
                if i == j {
                    acc += sq;
                } else {
                    acc += sq * 2u32;
                }
            }
        }
        acc.sqrt()
    }

    /// `‖VᵀMV − diag(μ)‖_F`.
    pub fn reconstruction_defect(&self, m: &SymMatrix) -> Float {
        let prec = self.eps_n.prec();
        let images: Vec<Vec<Float>> = self.vectors.iter().map(|v| m.mul_vec(v)).collect();
        let mut acc = Float::new(prec);
        for i in 0..self.dim() {
            for (j, image) in images.iter().enumerate() {
                let mut d = dot(&self.vectors[i], image);
                if i == j {
                    d -= &self.values[i];
                }
                acc += d.square();
            }
        }
        acc.sqrt()
    }
}

/// Outcome of the even-simple test with the thresholds applied.
#[derive(Clone, Debug, Serialize)]
pub struct EvenSimpleReport {
    pub simple: bool,
    pub even: bool,
    #[serde(serialize_with = "ser_float")]
    pub gap: Float,
    #[serde(serialize_with = "ser_float")]
    pub parity_defect: Float,
    #[serde(serialize_with = "ser_float")]
    pub threshold_gap: Float,
    #[serde(serialize_with = "ser_float")]
    pub threshold_parity: Float,
}

fn ser_float<S: serde::Serializer>(x: &Float, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&crate::precision::to_decimal(x, 12))
}

impl EvenSimpleReport {
    pub fn passed(&self) -> bool {
        self.simple && self.even
    }
}

/// Gap and parity measurements.
///
/// The gap must exceed `2^(−bits/4)·max(|ε_N|, 2^(−bits/2)‖M‖_F)`, i.e. be large
/// relative to both the smallest eigenvalue and the round-off level of the solver.
/// The parity defect must stay below `2^(−bits/4)`.
pub fn even_simple_report(dec: &EigenDecomposition, ctx: &PrecisionContext) -> EvenSimpleReport {
    let prec = ctx.bits();
    let quarter = ctx.tol_quarter();
    let roundoff = Float::with_val(prec, &dec.norm * ctx.tol_half());
    let scale = Float::with_val(prec, dec.eps_n.abs_ref()).max(&roundoff);
    let threshold_gap = Float::with_val(prec, &quarter * &scale);
    EvenSimpleReport {
        simple: dec.gap > threshold_gap,
        even: dec.parity_defect < quarter,
        gap: dec.gap.clone(),
        parity_defect: dec.parity_defect.clone(),
        threshold_gap,
        threshold_parity: quarter,
    }
}

/// Like [`even_simple_report`] but fails with [`Error::EvenSimpleViolation`].
pub fn even_simple_check(
    dec: &EigenDecomposition,
    ctx: &PrecisionContext,
) -> Result<EvenSimpleReport> {
    let report = even_simple_report(dec, ctx);
    if !report.simple {
        return Err(Error::EvenSimpleViolation(format!(
            "smallest eigenvalue is not simple: gap {:e} <= {:e}",
            report.gap.to_f64(),
            report.threshold_gap.to_f64()
        )));
    }
    if !report.even {
        return Err(Error::EvenSimpleViolation(format!(
            "minimal eigenvector is not even: parity defect {:e} >= {:e}",
            report.parity_defect.to_f64(),
            report.threshold_parity.to_f64()
        )));
    }
    Ok(report)
}

/// `ξ` scaled so that `Σ_j ξ_j = √L`.
pub fn minimal_vector(dec: &EigenDecomposition, params: &WeilParams) -> Result<Vec<Float>> {
    normalize_sum(&dec.xi_raw, &params.l, &params.ctx)
}

/// Scales `x` so that its coordinates sum to `√L`.
pub fn normalize_sum(x: &[Float], l: &Float, ctx: &PrecisionContext) -> Result<Vec<Float>> {
    let prec = ctx.bits();
    let mut sum = Float::new(prec);
    for v in x {
        sum += v;
    }
    if Float::with_val(prec, sum.abs_ref()) < ctx.tol_half() {
        return Err(Error::DegenerateNormalization(format!(
            "coordinate sum {:e} is below 2^(-bits/2)",
            sum.to_f64()
        )));
    }
    let factor = Float::with_val(prec, l.sqrt_ref()) / sum;
    Ok(x.iter().map(|v| Float::with_val(prec, v * &factor)).collect())
}

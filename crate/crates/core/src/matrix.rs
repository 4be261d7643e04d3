//! Dense real symmetric matrices over [`rug::Float`].

use rug::{Assign, Float};

use crate::error::{Error, Result};

/// Full row-major storage of a real symmetric matrix; `set` writes both triangles.
#[derive(Clone, Debug, PartialEq)]
pub struct SymMatrix {
    dim: usize,
    data: Vec<Float>,
}

impl SymMatrix {
    pub fn zeros(dim: usize, prec: u32) -> Self {
        SymMatrix {
            dim,
            data: vec![Float::new(prec); dim * dim],
        }
    }

    pub fn identity(dim: usize, prec: u32) -> Self {
        let mut m = Self::zeros(dim, prec);
        for i in 0..dim {
            m.data[i * dim + i].assign(1);
        }
        m
    }

    pub fn diagonal(values: &[Float]) -> Self {
        let prec = values.first().map_or(64, |v| v.prec());
        let mut m = Self::zeros(values.len(), prec);
        for (i, v) in values.iter().enumerate() {
            m.set(i, i, v);
        }
        m
    }

    /// Builds from the upper triangle in row-major order (`dim (dim+1) / 2` values).
    pub fn from_upper(dim: usize, upper: Vec<Float>) -> Result<Self> {
        if upper.len() != dim * (dim + 1) / 2 {
            return Err(Error::InvalidParams(format!(
                "expected {} upper-triangle entries, got {}",
                dim * (dim + 1) / 2,
                upper.len()
            )));
        }
        let prec = upper.first().map_or(64, |v| v.prec());
        let mut m = Self::zeros(dim, prec);
        let mut it = upper.into_iter();
        for r in 0..dim {
            for c in r..dim {
                let v = it.next().expect("length checked");
                m.data[c * dim + r].assign(&v);
                m.data[r * dim + c] = v;
            }
        }
        Ok(m)
    }

    /// Builds from full rows, rejecting input that is not symmetric to `tol`.
    #[allow(clippy::needless_range_loop)]
    pub fn from_rows(rows: Vec<Vec<Float>>, tol: &Float) -> Result<Self> {
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::InvalidParams("matrix is not square".into()));
        }
        for r in 0..dim {
            for c in (r + 1)..dim {
                let d = Float::with_val(rows[r][c].prec(), &rows[r][c] - &rows[c][r]).abs();
                if d > *tol {
                    return Err(Error::Structure(format!(
                        "asymmetry {} at ({r}, {c})",
                        d.to_f64()
                    )));
                }
            }
        }
        let data = rows.into_iter().flatten().collect();
        Ok(SymMatrix { dim, data })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn prec(&self) -> u32 {
        self.data.first().map_or(64, |v| v.prec())
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> &Float {
        &self.data[r * self.dim + c]
    }

    pub fn set(&mut self, r: usize, c: usize, value: &Float) {
        self.data[r * self.dim + c].assign(value);
        self.data[c * self.dim + r].assign(value);
    }

    pub fn row(&self, r: usize) -> &[Float] {
        &self.data[r * self.dim..(r + 1) * self.dim]
    }

    pub fn frobenius_norm(&self) -> Float {
        let mut acc = Float::new(self.prec());
        for v in &self.data {
            acc += Float::with_val(acc.prec(), v.square_ref());
        }
        acc.sqrt()
    }

    pub fn max_abs(&self) -> Float {
        let mut best = Float::new(self.prec());
        for v in &self.data {
            if v.cmp_abs(&best) == Some(std::cmp::Ordering::Greater) {
                best.assign(v.abs_ref());
            }
        }
        best
    }

    pub fn scaled(&self, factor: &Float) -> Self {
        SymMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .map(|v| Float::with_val(v.prec(), v * factor))
                .collect(),
        }
    }

    pub fn mul_vec(&self, v: &[Float]) -> Vec<Float> {
        assert_eq!(v.len(), self.dim);
        let prec = self.prec();
        (0..self.dim)
            .map(|r| {
                let mut acc = Float::new(prec);
                for (a, x) in self.row(r).iter().zip(v) {
                    acc += Float::with_val(prec, a * x);
                }
                acc
            })
            .collect()
    }
}

/// Euclidean norm of a vector.
pub fn norm2(v: &[Float]) -> Float {
    let prec = v.first().map_or(64, |x| x.prec());
    let mut acc = Float::new(prec);
    for x in v {
        acc += Float::with_val(acc.prec(), x.square_ref());
    }
    acc.sqrt()
}

pub fn dot(a: &[Float], b: &[Float]) -> Float {
    let prec = a.first().map_or(64, |x| x.prec());
    let mut acc = Float::new(prec);
    for (x, y) in a.iter().zip(b) {
        acc += Float::with_val(prec, x * y);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn from_upper_mirrors() {
        let vals: Vec<Float> = (1..=6).map(|v| Float::with_val(128, v)).collect();
        let m = SymMatrix::from_upper(3, vals).unwrap();
        assert_eq!(*m.get(0, 2), 3);
        assert_eq!(*m.get(2, 0), 3);
        assert_eq!(*m.get(2, 1), 5);
    }

    #[test]
    fn from_rows_rejects_asymmetry() {
        let f = |v: f64| Float::with_val(128, v);
        let rows = vec![vec![f(1.0), f(2.0)], vec![f(2.5), f(1.0)]];
        assert!(SymMatrix::from_rows(rows, &f(1e-20)).is_err());
    }
}

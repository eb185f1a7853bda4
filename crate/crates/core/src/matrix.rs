//! Small dense square matrices over a [`Scalar`].

use crate::error::{Error, Result};
use crate::scalar::{Scalar, C64};

#[derive(Clone, Debug, PartialEq)]
pub struct Mat<S: Scalar> {
    pub n: usize,
    /// Row-major entries.
    pub data: Vec<S>,
}

impl<S: Scalar> Mat<S> {
    pub fn zeros(n: usize) -> Self {
        Mat { n, data: vec![S::zero(); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = S::one();
        }
        m
    }

    pub fn diag(d: &[S]) -> Self {
        let mut m = Self::zeros(d.len());
        for (i, &x) in d.iter().enumerate() {
            m.data[i * d.len() + i] = x;
        }
        m
    }

    /// The matrix unit `e_ij` (0-based indices).
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(n);
        m.data[i * n + j] = S::one();
        m
    }

    pub fn from_rows(rows: &[Vec<S>]) -> Self {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for r in rows {
            assert_eq!(r.len(), n, "matrix must be square");
            data.extend_from_slice(r);
        }
        Mat { n, data }
    }

    pub fn lift(m: &Mat<C64>) -> Self {
        Mat { n: m.n, data: m.data.iter().map(|&z| S::from_c64(z)).collect() }
    }

    pub fn get(&self, i: usize, j: usize) -> S {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: S) {
        self.data[i * self.n + j] = v;
    }

    fn check(&self, o: &Self) -> Result<()> {
        if self.n != o.n {
            return Err(Error::DimensionMismatch(self.n, o.n));
        }
        Ok(())
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        Ok(Mat { n: self.n, data: self.data.iter().zip(&o.data).map(|(&a, &b)| a + b).collect() })
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        Ok(Mat { n: self.n, data: self.data.iter().zip(&o.data).map(|(&a, &b)| a - b).collect() })
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        let n = self.n;
        let mut out = Self::zeros(n);
        mul_acc(&mut out.data, &self.data, &o.data, n);
        Ok(out)
    }

    pub fn scale(&self, s: S) -> Self {
        Mat { n: self.n, data: self.data.iter().map(|&a| a * s).collect() }
    }

    pub fn neg(&self) -> Self {
        Mat { n: self.n, data: self.data.iter().map(|&a| -a).collect() }
    }

    pub fn commutator(&self, o: &Self) -> Result<Self> {
        self.mul(o)?.sub(&o.mul(self)?)
    }

    pub fn trace(&self) -> S {
        (0..self.n).fold(S::zero(), |acc, i| acc + self.get(i, i))
    }

    pub fn transpose(&self) -> Self {
        let n = self.n;
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.data[j * n + i] = self.data[i * n + j];
            }
        }
        m
    }

    pub fn conj(&self) -> Self {
        Mat { n: self.n, data: self.data.iter().map(|&a| a.conj()).collect() }
    }

    pub fn adjoint(&self) -> Self {
        self.transpose().conj()
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, a| m.max(a.magnitude()))
    }

    pub fn is_exact_zero(&self) -> bool {
        self.data.iter().all(|a| a.is_exact_zero())
    }

    /// Gauss-Jordan inverse with partial pivoting on the primal component.
    pub fn inverse(&self) -> Result<Self> {
        let n = self.n;
        let mut a = self.data.clone();
        let mut inv = Self::identity(n).data;
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        for col in 0..n {
            let mut piv = col;
            let mut best = a[col * n + col].primal().norm();
            for r in col + 1..n {
                let v = a[r * n + col].primal().norm();
                if v > best {
                    best = v;
                    piv = r;
                }
            }
            if best <= 1e-14 * scale {
                return Err(Error::Singular);
            }
            if piv != col {
                for k in 0..n {
                    a.swap(col * n + k, piv * n + k);
                    inv.swap(col * n + k, piv * n + k);
                }
            }
            let p = a[col * n + col];
            for k in 0..n {
                a[col * n + k] = a[col * n + k] / p;
                inv[col * n + k] = inv[col * n + k] / p;
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = a[r * n + col];
                if f.is_exact_zero() {
                    continue;
                }
                for k in 0..n {
                    let t = a[col * n + k];
                    a[r * n + k] -= f * t;
                    let t = inv[col * n + k];
                    inv[r * n + k] -= f * t;
                }
            }
        }
        Ok(Mat { n, data: inv })
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(S) -> T) -> Mat<T> {
        Mat { n: self.n, data: self.data.iter().map(|&a| f(a)).collect() }
    }
}

/// `out += a·b` for row-major `n×n` slices.
#[inline]
pub fn mul_acc<S: Scalar>(out: &mut [S], a: &[S], b: &[S], n: usize) {
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            if aik.is_exact_zero() {
                continue;
            }
            let brow = &b[k * n..k * n + n];
            let orow = &mut out[i * n..i * n + n];
            for j in 0..n {
                orow[j] += aik * brow[j];
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c;

    #[test]
    fn inverse_roundtrip() {
        let m = Mat::from_rows(&[
            vec![c(1.0, 0.5), c(2.0, 0.0), c(0.0, -1.0)],
            vec![c(0.0, 0.0), c(1.0, 1.0), c(3.0, 0.0)],
            vec![c(-1.0, 0.0), c(0.5, 0.0), c(2.0, 2.0)],
        ]);
        let p = m.mul(&m.inverse().unwrap()).unwrap();
        assert!(p.sub(&Mat::identity(3)).unwrap().max_abs() < 1e-14);
    }

    #[test]
    fn singular_detected() {
        let m: Mat<C64> = Mat::unit(2, 1, 0);
        assert_eq!(m.inverse(), Err(Error::Singular));
    }
}

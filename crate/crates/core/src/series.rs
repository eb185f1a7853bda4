//! Truncated matrix Laurent series in λ with a trusted-degree window.
//!
//! A series stores the coefficients of degrees `start..=hi` densely. Every
//! coefficient at a degree `>= trusted_lo` is exact given exact inputs; reads
//! below `trusted_lo` fail instead of returning zero. A series whose
//! coefficients are all known (a Laurent polynomial) is marked exact and has
//! no lower trust bound.

use crate::error::{Error, Result};
use crate::matrix::{mul_acc, Mat};
use crate::scalar::{Dual, Scalar, C64};

/// Internal marker for "exact at every degree".
const EXACT: i32 = i32::MIN / 4;

#[derive(Clone, Debug, PartialEq)]
pub struct Series<S: Scalar> {
    n: usize,
    lo: i32,
    tl: i32,
    start: i32,
    hi: i32,
    data: Vec<S>,
}

pub type CSeries = Series<C64>;
pub type DSeries = Series<Dual>;

impl<S: Scalar> Series<S> {
    /// The zero series (exact).
    pub fn zero(n: usize, lo: i32) -> Self {
        Series { n, lo, tl: EXACT, start: 0, hi: -1, data: Vec::new() }
    }

    pub fn identity(n: usize, lo: i32) -> Self {
        Self::monomial(&Mat::identity(n), 0, lo)
    }

    pub fn constant(m: &Mat<S>, lo: i32) -> Self {
        Self::monomial(m, 0, lo)
    }

    /// `m·λ^deg` (exact).
    pub fn monomial(m: &Mat<S>, deg: i32, lo: i32) -> Self {
        Self::from_terms(m.n, lo, &[(deg, m.clone())])
    }

    /// An exact Laurent polynomial from `(degree, coefficient)` terms.
    /// Repeated degrees are summed; terms below the storage floor are rejected.
    pub fn from_terms(n: usize, lo: i32, terms: &[(i32, Mat<S>)]) -> Self {
        if terms.is_empty() {
            return Self::zero(n, lo);
        }
        let start = terms.iter().map(|t| t.0).min().unwrap();
        let hi = terms.iter().map(|t| t.0).max().unwrap();
        assert!(start >= lo, "term degree {start} below storage floor {lo}");
        let nn = n * n;
        let mut data = vec![S::zero(); ((hi - start + 1) as usize) * nn];
        for (d, m) in terms {
            assert_eq!(m.n, n);
            let off = ((d - start) as usize) * nn;
            for (k, &v) in m.data.iter().enumerate() {
                data[off + k] += v;
            }
        }
        let mut s = Series { n, lo, tl: EXACT, start, hi, data };
        s.trim();
        s
    }

    /// Reassign the trusted bound (used to model truncated inputs).
    pub fn with_trusted_lo(mut self, tl: i32) -> Self {
        let tl = tl.max(self.lo);
        if self.tl == EXACT || tl > self.tl {
            self.tl = tl;
        }
        if self.start < self.tl && !self.data.is_empty() {
            let cut = ((self.tl - self.start) as usize).min(self.len_degrees());
            self.data.drain(0..cut * self.n * self.n);
            self.start = self.tl;
        }
        self.trim();
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Storage bounds `[lo, hi]`.
    pub fn window(&self) -> (i32, i32) {
        (self.lo, self.hi.max(self.lo - 1))
    }

    pub fn lo(&self) -> i32 {
        self.lo
    }

    /// Highest stored degree (`None` for the zero series).
    pub fn top_degree(&self) -> Option<i32> {
        if self.data.is_empty() {
            None
        } else {
            Some(self.hi)
        }
    }

    /// Lowest stored degree (`None` for the zero series).
    pub fn bottom_degree(&self) -> Option<i32> {
        if self.data.is_empty() {
            None
        } else {
            Some(self.start)
        }
    }

    /// Lowest degree whose coefficient is exact. Exact series report their
    /// storage floor.
    pub fn trusted_lo(&self) -> i32 {
        if self.tl == EXACT {
            self.lo
        } else {
            self.tl
        }
    }

    pub fn is_exact(&self) -> bool {
        self.tl == EXACT
    }

    pub fn is_zero(&self) -> bool {
        self.data.is_empty()
    }

    fn len_degrees(&self) -> usize {
        if self.data.is_empty() {
            0
        } else {
            (self.hi - self.start + 1) as usize
        }
    }

    /// Effective top degree for trust propagation. An empty series that is not
    /// exact may hide unknown coefficients just below its trusted bound.
    fn trust_hi(&self) -> i32 {
        if self.data.is_empty() {
            if self.tl == EXACT {
                EXACT
            } else {
                self.tl - 1
            }
        } else {
            self.hi
        }
    }

    #[inline]
    fn slice(&self, deg: i32) -> &[S] {
        let nn = self.n * self.n;
        let off = ((deg - self.start) as usize) * nn;
        &self.data[off..off + nn]
    }

    /// Coefficient of `λ^deg`.
    pub fn coeff(&self, deg: i32) -> Result<Mat<S>> {
        if self.tl != EXACT && deg < self.tl {
            return Err(Error::BelowTrusted { degree: deg, trusted_lo: self.tl });
        }
        if self.data.is_empty() || deg < self.start || deg > self.hi {
            return Ok(Mat::zeros(self.n));
        }
        Ok(Mat { n: self.n, data: self.slice(deg).to_vec() })
    }

    /// Stored `(degree, coefficient)` pairs in increasing degree.
    pub fn terms(&self) -> Vec<(i32, Mat<S>)> {
        if self.data.is_empty() {
            return Vec::new();
        }
        (self.start..=self.hi).map(|d| (d, Mat { n: self.n, data: self.slice(d).to_vec() })).collect()
    }

    /// Drop exactly-zero coefficients at both ends.
    fn trim(&mut self) {
        let nn = self.n * self.n;
        if nn == 0 {
            return;
        }
        while !self.data.is_empty() && self.data[self.data.len() - nn..].iter().all(|v| v.is_exact_zero()) {
            self.data.truncate(self.data.len() - nn);
            self.hi -= 1;
        }
        let mut lead = 0;
        while lead * nn < self.data.len() && self.data[lead * nn..(lead + 1) * nn].iter().all(|v| v.is_exact_zero()) {
            lead += 1;
        }
        if lead > 0 {
            self.data.drain(0..lead * nn);
            self.start += lead as i32;
        }
        if self.data.is_empty() {
            self.start = 0;
            self.hi = -1;
        }
    }

    fn check_dim(&self, o: &Self) -> Result<()> {
        if self.n != o.n {
            return Err(Error::DimensionMismatch(self.n, o.n));
        }
        Ok(())
    }

    fn combine(&self, o: &Self, sign: S) -> Result<Self> {
        self.check_dim(o)?;
        let lo = self.lo.max(o.lo);
        let tl = self.tl.max(o.tl);
        let tl = if tl == EXACT { EXACT } else { tl.max(lo) };
        if self.data.is_empty() && o.data.is_empty() {
            return Ok(Series { n: self.n, lo, tl, start: 0, hi: -1, data: Vec::new() });
        }
        let mut start = i32::MAX;
        let mut hi = i32::MIN;
        for s in [self, o] {
            if !s.data.is_empty() {
                start = start.min(s.start);
                hi = hi.max(s.hi);
            }
        }
        if tl != EXACT {
            start = start.max(tl);
        }
        start = start.max(lo);
        if start > hi {
            return Ok(Series { n: self.n, lo, tl, start: 0, hi: -1, data: Vec::new() });
        }
        let nn = self.n * self.n;
        let mut data = vec![S::zero(); ((hi - start + 1) as usize) * nn];
        for (s, f) in [(self, S::one()), (o, sign)] {
            if s.data.is_empty() {
                continue;
            }
            for d in s.start.max(start)..=s.hi.min(hi) {
                let src = s.slice(d);
                let off = ((d - start) as usize) * nn;
                for k in 0..nn {
                    data[off + k] += f * src[k];
                }
            }
        }
        let mut r = Series { n: self.n, lo, tl, start, hi, data };
        r.trim();
        Ok(r)
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.combine(o, S::one())
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.combine(o, -S::one())
    }

    pub fn scale(&self, s: S) -> Self {
        let mut r = self.clone();
        for v in r.data.iter_mut() {
            *v *= s;
        }
        r.trim();
        r
    }

    pub fn neg(&self) -> Self {
        self.scale(-S::one())
    }

    /// Apply a coefficientwise map (must be additive, e.g. conjugation or transpose).
    pub fn map_coeffs(&self, f: impl Fn(&Mat<S>) -> Mat<S>) -> Self {
        let mut r = self.clone();
        let nn = self.n * self.n;
        for d in 0..self.len_degrees() {
            let m = Mat { n: self.n, data: self.data[d * nn..(d + 1) * nn].to_vec() };
            let fm = f(&m);
            r.data[d * nn..(d + 1) * nn].copy_from_slice(&fm.data);
        }
        r.trim();
        r
    }

    /// Coefficientwise map with degree available (e.g. the sign flip of λ → −λ).
    pub fn map_with_degree(&self, f: impl Fn(i32, &Mat<S>) -> Mat<S>) -> Self {
        let mut r = self.clone();
        let nn = self.n * self.n;
        for d in 0..self.len_degrees() {
            let deg = self.start + d as i32;
            let m = Mat { n: self.n, data: self.data[d * nn..(d + 1) * nn].to_vec() };
            let fm = f(deg, &m);
            r.data[d * nn..(d + 1) * nn].copy_from_slice(&fm.data);
        }
        r.trim();
        r
    }

    /// Change the scalar type coefficientwise.
    pub fn map_scalar<T: Scalar>(&self, f: impl Fn(S) -> T) -> Series<T> {
        let mut r = Series {
            n: self.n,
            lo: self.lo,
            tl: self.tl,
            start: self.start,
            hi: self.hi,
            data: self.data.iter().map(|&v| f(v)).collect(),
        };
        r.trim();
        r
    }

    /// Entrywise complex conjugation of every coefficient (conjugation of λ̄-evaluation).
    pub fn conj_coeffs(&self) -> Self {
        self.map_coeffs(|m| m.conj())
    }

    pub fn transpose_coeffs(&self) -> Self {
        self.map_coeffs(|m| m.transpose())
    }

    /// `λ → −λ`: odd-degree coefficients change sign.
    pub fn flip(&self) -> Self {
        self.map_with_degree(|d, m| if d.rem_euclid(2) == 1 { m.neg() } else { m.clone() })
    }

    /// Multiply by `λ^m`. Coefficients pushed below the storage floor are dropped
    /// and the trusted bound is raised accordingly.
    pub fn shift(&self, m: i32) -> Self {
        if self.data.is_empty() {
            let tl = if self.tl == EXACT { EXACT } else { (self.tl + m).max(self.lo) };
            return Series { tl, ..self.clone() };
        }
        let mut tl = if self.tl == EXACT { EXACT } else { (self.tl + m).max(self.lo) };
        let mut r = Series { n: self.n, lo: self.lo, tl, start: self.start + m, hi: self.hi + m, data: self.data.clone() };
        if r.start < r.lo {
            if tl == EXACT || tl < r.lo {
                tl = r.lo;
            }
            r.tl = tl;
            let cut = ((r.lo - r.start) as usize).min(r.len_degrees());
            r.data.drain(0..cut * self.n * self.n);
            r.start = r.lo;
            if r.data.is_empty() {
                r.start = 0;
                r.hi = -1;
            }
        }
        r.trim();
        r
    }

    /// Series product with trusted-window propagation:
    /// `trusted_lo = max(A.trusted_lo + B.hi, B.trusted_lo + A.hi)`.
    pub fn mul(&self, o: &Self) -> Result<Self> {
        self.check_dim(o)?;
        let n = self.n;
        let lo = self.lo.max(o.lo);
        let a_hi = self.trust_hi();
        let b_hi = o.trust_hi();
        let mut tl = if self.tl == EXACT && o.tl == EXACT {
            EXACT
        } else {
            let t1 = if self.tl == EXACT || b_hi == EXACT { EXACT } else { self.tl + b_hi };
            let t2 = if o.tl == EXACT || a_hi == EXACT { EXACT } else { o.tl + a_hi };
            let t = t1.max(t2);
            if t == EXACT {
                EXACT
            } else {
                t.max(lo)
            }
        };
        if self.data.is_empty() || o.data.is_empty() {
            if tl != EXACT && (self.is_exact() && self.data.is_empty() || o.is_exact() && o.data.is_empty()) {
                tl = EXACT;
            }
            return Ok(Series { n, lo, tl, start: 0, hi: -1, data: Vec::new() });
        }
        let hi = self.hi + o.hi;
        let full_start = self.start + o.start;
        let mut start = full_start;
        if start < lo {
            start = lo;
            if tl == EXACT || tl < lo {
                tl = lo;
            }
        }
        if tl != EXACT {
            if tl > hi {
                return Err(Error::EmptyTrustedWindow { trusted_lo: tl, hi });
            }
            start = start.max(tl);
        }
        let nn = n * n;
        let mut data = vec![S::zero(); ((hi - start + 1) as usize) * nn];
        for k in start..=hi {
            let i_lo = self.start.max(k - o.hi);
            let i_hi = self.hi.min(k - o.start);
            let off = ((k - start) as usize) * nn;
            for i in i_lo..=i_hi {
                mul_acc(&mut data[off..off + nn], self.slice(i), o.slice(k - i), n);
            }
        }
        let mut r = Series { n, lo, tl, start, hi, data };
        r.trim();
        Ok(r)
    }

    /// Left multiplication by a constant matrix (no trust loss).
    pub fn left_mul_const(&self, m: &Mat<S>) -> Result<Self> {
        if m.n != self.n {
            return Err(Error::DimensionMismatch(m.n, self.n));
        }
        Ok(self.map_coeffs(|c| m.mul(c).expect("dimension checked")))
    }

    /// Right multiplication by a constant matrix (no trust loss).
    pub fn right_mul_const(&self, m: &Mat<S>) -> Result<Self> {
        if m.n != self.n {
            return Err(Error::DimensionMismatch(m.n, self.n));
        }
        Ok(self.map_coeffs(|c| c.mul(m).expect("dimension checked")))
    }

    pub fn commutator(&self, o: &Self) -> Result<Self> {
        self.mul(o)?.sub(&o.mul(self)?)
    }

    /// `∂_λ`: the coefficient at `k − 1` becomes `k·A_k`.
    pub fn dlambda(&self) -> Self {
        let tl = if self.tl == EXACT { EXACT } else { (self.tl - 1).max(self.lo) };
        if self.data.is_empty() {
            return Series { tl, ..self.clone() };
        }
        let mut r = self.map_with_degree(|d, m| m.scale(S::from_f64(d as f64))).shift(-1);
        r.tl = if r.tl == EXACT { EXACT } else { tl.max(r.tl.min(tl)) };
        if self.tl != EXACT {
            r.tl = tl;
        }
        r.trim();
        r
    }

    /// Degrees `>= 0`. A series trusted down to degree 0 yields an exact polynomial.
    pub fn plus(&self) -> Self {
        let mut tl = self.tl;
        if tl == EXACT || tl <= 0 {
            tl = EXACT;
        }
        let mut r = Series { tl, ..self.clone() };
        if !r.data.is_empty() && r.start < 0 {
            let cut = ((0 - r.start) as usize).min(r.len_degrees());
            r.data.drain(0..cut * self.n * self.n);
            r.start = 0;
            if r.data.is_empty() {
                r.start = 0;
                r.hi = -1;
            }
        }
        r.trim();
        r
    }

    /// Degrees `< 0`.
    pub fn minus(&self) -> Self {
        let mut r = self.clone();
        if !r.data.is_empty() && r.hi >= 0 {
            let keep = ((0 - r.start).max(0) as usize).min(r.len_degrees());
            r.data.truncate(keep * self.n * self.n);
            r.hi = -1;
            if r.data.is_empty() {
                r.start = 0;
                r.hi = -1;
            }
        }
        r.trim();
        r
    }

    /// Trace of a single coefficient.
    pub fn trace_coeff(&self, deg: i32) -> Result<S> {
        Ok(self.coeff(deg)?.trace())
    }

    /// Largest entry magnitude over stored coefficients.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.magnitude()))
    }

    /// Largest coefficient difference on the common trusted window.
    pub fn max_diff(&self, o: &Self) -> Result<f64> {
        self.check_dim(o)?;
        let d = self.sub(o)?;
        Ok(d.max_abs())
    }

    /// Inverse of `A0(I + N)` with `N` strictly negative (Neumann series down to
    /// the storage floor) or strictly positive (only when the series terminates).
    pub fn inv(&self) -> Result<Self> {
        let n = self.n;
        if self.data.is_empty() {
            return Err(Error::Singular);
        }
        if self.hi == 0 {
            let a0 = self.coeff(0)?;
            let a0inv = a0.inverse()?;
            if self.start == 0 {
                return Ok(Self::constant(&a0inv, self.lo));
            }
            let bottom = self.trusted_lo();
            let mut coeffs: Vec<Mat<S>> = vec![a0inv.clone()];
            let depth = (-self.start) as usize;
            let mut zero_run = 0usize;
            let mut exact = self.tl == EXACT;
            let mut m = -1;
            while m >= bottom {
                let mut acc = Mat::zeros(n);
                for j in 1..=depth {
                    let idx = (-(m + j as i32)) as usize;
                    if idx >= coeffs.len() {
                        continue;
                    }
                    let aj = self.slice(-(j as i32));
                    mul_acc(&mut acc.data, aj, &coeffs[idx].data, n);
                }
                let bm = a0inv.mul(&acc)?.neg();
                zero_run = if bm.is_exact_zero() { zero_run + 1 } else { 0 };
                coeffs.push(bm);
                if exact && zero_run >= depth {
                    break;
                }
                m -= 1;
            }
            if m < bottom {
                exact = false;
            }
            let terms: Vec<(i32, Mat<S>)> = coeffs.into_iter().enumerate().map(|(k, c)| (-(k as i32), c)).collect();
            let r = Self::from_terms(n, self.lo, &terms);
            return Ok(if exact { r } else { r.with_trusted_lo(bottom) });
        }
        if self.start == 0 && self.hi > 0 {
            if self.tl != EXACT && self.tl > 0 {
                return Err(Error::BelowTrusted { degree: 0, trusted_lo: self.tl });
            }
            let a0inv = self.coeff(0)?.inverse()?;
            let h = self.hi as usize;
            let cap = h * n.max(1) + h;
            let mut coeffs: Vec<Mat<S>> = vec![a0inv.clone()];
            for m in 1..=cap {
                let mut acc = Mat::zeros(n);
                for j in 1..=h.min(m) {
                    mul_acc(&mut acc.data, self.slice(j as i32), &coeffs[m - j].data, n);
                }
                coeffs.push(a0inv.mul(&acc)?.neg());
            }
            let tail_zero = coeffs[cap + 1 - h..].iter().all(|m| m.max_abs() <= 1e-14 * (1.0 + self.max_abs()));
            if !tail_zero {
                return Err(Error::NotNormalizable);
            }
            let terms: Vec<(i32, Mat<S>)> =
                coeffs.into_iter().enumerate().take(cap + 1 - h).map(|(k, c)| (k as i32, c)).collect();
            return Ok(Self::from_terms(n, self.lo, &terms));
        }
        Err(Error::NotNormalizable)
    }

    /// `exp(X)` for `X` with only negative degrees, summed down to the storage floor.
    pub fn exp_negative(&self) -> Result<Self> {
        if let Some(t) = self.top_degree() {
            if t >= 0 {
                return Err(Error::InvalidArgument("exp_negative needs strictly negative degrees".into()));
            }
        }
        let mut out = Self::identity(self.n, self.lo);
        let mut term = Self::identity(self.n, self.lo);
        let mut k = 1.0;
        let step = match self.top_degree() {
            Some(t) => t,
            None => return Ok(out),
        };
        loop {
            if term.top_degree().is_some_and(|t| t + step < self.lo) {
                break;
            }
            term = term.mul(self)?.scale(S::from_f64(1.0 / k));
            if term.is_zero() {
                break;
            }
            out = out.add(&term)?;
            if let Some(t) = term.top_degree() {
                if t < self.lo {
                    break;
                }
            }
            k += 1.0;
        }
        Ok(out)
    }

    /// Lift into the perturbation scalar type with zero ε-part.
    pub fn lift_dual(&self) -> Series<Dual> {
        self.map_scalar(|v| Dual::from_c64(v.primal()))
    }
}

impl Series<C64> {
    /// `self + ε·dir`.
    pub fn with_direction(&self, dir: &Series<C64>) -> Result<Series<Dual>> {
        let a = self.lift_dual();
        let b = dir.map_scalar(|v| Dual::new(C64::new(0.0, 0.0), v));
        a.add(&b)
    }
}

impl Series<Dual> {
    pub fn primal_part(&self) -> Series<C64> {
        self.map_scalar(|v| v.re)
    }

    pub fn eps_part(&self) -> Series<C64> {
        self.map_scalar(|v| v.eps)
    }
}

/// Evaluate `DF(f)[δf]` exactly by running `F` on `f + ε·δf` and keeping the ε-part.
pub fn directional_derivative<F>(f: &CSeries, df: &CSeries, stage: F) -> Result<CSeries>
where
    F: Fn(&DSeries) -> Result<DSeries>,
{
    let lifted = f.with_direction(df)?;
    Ok(stage(&lifted)?.eps_part())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c;

    fn e(n: usize, i: usize, j: usize) -> Mat<C64> {
        Mat::unit(n, i, j)
    }

    #[test]
    fn nilpotent_product_is_identity() {
        let lo = -10;
        let a = Series::from_terms(2, lo, &[(0, Mat::identity(2)), (-1, e(2, 1, 0))]);
        let b = Series::from_terms(2, lo, &[(0, Mat::identity(2)), (-1, e(2, 1, 0).neg())]);
        let p = a.mul(&b).unwrap();
        assert!(p.is_exact());
        assert_eq!(p, Series::identity(2, lo));
    }

    #[test]
    fn reads_below_trust_fail() {
        let a: CSeries = Series::identity(2, -5).with_trusted_lo(-3);
        assert!(matches!(a.coeff(-4), Err(Error::BelowTrusted { .. })));
        assert!(a.coeff(-3).unwrap().is_exact_zero());
    }

    #[test]
    fn nilpotent_inverse_is_exact() {
        let a = Series::from_terms(2, -10, &[(0, Mat::identity(2)), (-1, e(2, 1, 0))]);
        let inv = a.inv().unwrap();
        assert!(inv.is_exact());
        let want = Series::from_terms(2, -10, &[(0, Mat::identity(2)), (-1, e(2, 1, 0).neg())]);
        assert_eq!(inv, want);
    }

    #[test]
    fn scalar_multiple_inverse() {
        let a = Series::constant(&Mat::identity(2).scale(c(2.0, 0.0)), -4);
        let inv = a.inv().unwrap();
        assert_eq!(inv.coeff(0).unwrap(), Mat::identity(2).scale(c(0.5, 0.0)));
    }

    #[test]
    fn positive_nilpotent_inverse() {
        let a = Series::from_terms(2, -4, &[(0, Mat::identity(2)), (1, e(2, 0, 1))]);
        let inv = a.inv().unwrap();
        assert_eq!(a.mul(&inv).unwrap(), Series::identity(2, -4));
    }

    #[test]
    fn positive_non_terminating_inverse_is_rejected() {
        let a = Series::from_terms(2, -4, &[(0, Mat::identity(2)), (1, e(2, 0, 0))]);
        assert_eq!(a.inv(), Err(Error::NotNormalizable));
    }

    #[test]
    fn dlambda_examples() {
        let lo = -6;
        assert!(Series::<C64>::identity(2, lo).dlambda().is_zero());
        let a = Mat::diag(&[c(0.0, 1.0), c(0.0, -1.0)]);
        let d = Series::monomial(&a, 2, lo).dlambda();
        assert_eq!(d, Series::monomial(&a.scale(c(2.0, 0.0)), 1, lo));
        let d = Series::monomial(&e(2, 1, 0), -1, lo).dlambda();
        assert_eq!(d, Series::monomial(&e(2, 1, 0).neg(), -2, lo));
    }

    #[test]
    fn projections() {
        let lo = -6;
        let a = e(2, 0, 1);
        let b = e(2, 1, 0);
        let cc = Mat::identity(2);
        let x = Series::from_terms(2, lo, &[(-1, a.clone()), (0, b.clone()), (1, cc.clone())]);
        assert_eq!(x.plus(), Series::from_terms(2, lo, &[(0, b), (1, cc)]));
        assert_eq!(x.minus(), Series::from_terms(2, lo, &[(-1, a)]));
    }
}

//! Multivariate truncated Taylor expansions ("jets") in the flow times.
//!
//! Multi-indices are dense exponent vectors over a shared variable list and are
//! enumerated once per [`JetSpace`]; coefficients are stored sparsely as
//! `Option<T>` where `None` means zero.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::matrix::Mat;
use crate::scalar::{Dual, Scalar, C64};
use crate::series::Series;

/// Enumerated multi-indices of total degree `<= order` over named variables.
pub struct JetSpace {
    vars: Vec<String>,
    order: usize,
    exps: Vec<Vec<u8>>,
    index: HashMap<Vec<u8>, usize>,
    /// `by_order[k]` is the index range of the monomials of total degree `k`.
    by_order: Vec<std::ops::Range<usize>>,
    /// `succ[a][j]` is the index of `a + e_j`, if still within the order.
    succ: Vec<Vec<Option<usize>>>,
    /// `pairs[g]` lists every `(a, b)` with `a + b = g`.
    pairs: Vec<Vec<(usize, usize)>>,
}

impl fmt::Debug for JetSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("JetSpace").field("vars", &self.vars).field("order", &self.order).finish()
    }
}

impl PartialEq for JetSpace {
    fn eq(&self, o: &Self) -> bool {
        self.vars == o.vars && self.order == o.order
    }
}

impl JetSpace {
    pub fn new(vars: Vec<String>, order: usize) -> Arc<Self> {
        let nv = vars.len();
        let mut exps: Vec<Vec<u8>> = Vec::new();
        let mut by_order = Vec::new();
        for k in 0..=order {
            let begin = exps.len();
            let mut cur = vec![0u8; nv];
            compositions(k, 0, &mut cur, &mut exps);
            by_order.push(begin..exps.len());
        }
        let index: HashMap<Vec<u8>, usize> = exps.iter().enumerate().map(|(i, e)| (e.clone(), i)).collect();
        let succ = exps
            .iter()
            .map(|e| {
                (0..nv)
                    .map(|j| {
                        let mut s = e.clone();
                        s[j] += 1;
                        index.get(&s).copied()
                    })
                    .collect()
            })
            .collect();
        let mut pairs = vec![Vec::new(); exps.len()];
        for (a, ea) in exps.iter().enumerate() {
            let da: usize = ea.iter().map(|&x| x as usize).sum();
            for (b, eb) in exps.iter().enumerate() {
                let db: usize = eb.iter().map(|&x| x as usize).sum();
                if da + db > order {
                    continue;
                }
                let g: Vec<u8> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                pairs[index[&g]].push((a, b));
            }
        }
        Arc::new(JetSpace { vars, order, exps, index, by_order, succ, pairs })
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn len(&self) -> usize {
        self.exps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn exps(&self, idx: usize) -> &[u8] {
        &self.exps[idx]
    }

    pub fn degree(&self, idx: usize) -> usize {
        self.exps[idx].iter().map(|&x| x as usize).sum()
    }

    pub fn index_of(&self, e: &[u8]) -> Option<usize> {
        self.index.get(e).copied()
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    pub fn range(&self, k: usize) -> std::ops::Range<usize> {
        self.by_order[k].clone()
    }

    pub fn succ(&self, idx: usize, j: usize) -> Option<usize> {
        self.succ[idx][j]
    }

    /// Index of `a − e_j` when `a_j >= 1`.
    pub fn pred(&self, idx: usize, j: usize) -> Option<usize> {
        let e = &self.exps[idx];
        if e[j] == 0 {
            return None;
        }
        let mut p = e.clone();
        p[j] -= 1;
        self.index_of(&p)
    }

    pub fn pairs(&self, idx: usize) -> &[(usize, usize)] {
        &self.pairs[idx]
    }

    /// Same variables, lower order. Coefficient indices of the smaller space
    /// coincide with the leading indices of this one.
    pub fn with_order(&self, order: usize) -> Arc<JetSpace> {
        JetSpace::new(self.vars.clone(), order)
    }
}

fn compositions(k: usize, pos: usize, cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
    let nv = cur.len();
    if nv == 0 {
        if k == 0 {
            out.push(Vec::new());
        }
        return;
    }
    if pos == nv - 1 {
        cur[pos] = k as u8;
        out.push(cur.clone());
        cur[pos] = 0;
        return;
    }
    for v in (0..=k).rev() {
        cur[pos] = v as u8;
        compositions(k - v, pos + 1, cur, out);
    }
    cur[pos] = 0;
}

/// Coefficient ring of a jet.
pub trait JetCoeff: Clone + fmt::Debug {
    type Sc: Scalar;
    fn add(&self, o: &Self) -> Result<Self>;
    fn sub(&self, o: &Self) -> Result<Self>;
    fn mul(&self, o: &Self) -> Result<Self>;
    fn scale(&self, s: Self::Sc) -> Self;
    fn max_abs(&self) -> f64;
}

macro_rules! scalar_coeff {
    ($t:ty) => {
        impl JetCoeff for $t {
            type Sc = $t;
            fn add(&self, o: &Self) -> Result<Self> {
                Ok(*self + *o)
            }
            fn sub(&self, o: &Self) -> Result<Self> {
                Ok(*self - *o)
            }
            fn mul(&self, o: &Self) -> Result<Self> {
                Ok(*self * *o)
            }
            fn scale(&self, s: Self::Sc) -> Self {
                *self * s
            }
            fn max_abs(&self) -> f64 {
                self.magnitude()
            }
        }
    };
}
scalar_coeff!(C64);
scalar_coeff!(Dual);

impl<S: Scalar> JetCoeff for Mat<S> {
    type Sc = S;
    fn add(&self, o: &Self) -> Result<Self> {
        Mat::add(self, o)
    }
    fn sub(&self, o: &Self) -> Result<Self> {
        Mat::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Result<Self> {
        Mat::mul(self, o)
    }
    fn scale(&self, s: S) -> Self {
        Mat::scale(self, s)
    }
    fn max_abs(&self) -> f64 {
        Mat::max_abs(self)
    }
}

impl<S: Scalar> JetCoeff for Series<S> {
    type Sc = S;
    fn add(&self, o: &Self) -> Result<Self> {
        Series::add(self, o)
    }
    fn sub(&self, o: &Self) -> Result<Self> {
        Series::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Result<Self> {
        Series::mul(self, o)
    }
    fn scale(&self, s: S) -> Self {
        Series::scale(self, s)
    }
    fn max_abs(&self) -> f64 {
        Series::max_abs(self)
    }
}

#[derive(Clone, Debug)]
pub struct Jet<T> {
    space: Arc<JetSpace>,
    coeffs: Vec<Option<T>>,
}

impl<T: JetCoeff> Jet<T> {
    pub fn zero(space: &Arc<JetSpace>) -> Self {
        Jet { space: space.clone(), coeffs: vec![None; space.len()] }
    }

    pub fn constant(space: &Arc<JetSpace>, v: T) -> Self {
        let mut j = Self::zero(space);
        j.coeffs[0] = Some(v);
        j
    }

    /// `v·t^α` for the monomial at `idx`.
    pub fn monomial(space: &Arc<JetSpace>, idx: usize, v: T) -> Self {
        let mut j = Self::zero(space);
        j.coeffs[idx] = Some(v);
        j
    }

    pub fn from_coeffs(space: &Arc<JetSpace>, coeffs: Vec<Option<T>>) -> Self {
        assert_eq!(coeffs.len(), space.len());
        Jet { space: space.clone(), coeffs }
    }

    pub fn space(&self) -> &Arc<JetSpace> {
        &self.space
    }

    pub fn get(&self, idx: usize) -> Option<&T> {
        self.coeffs.get(idx).and_then(|c| c.as_ref())
    }

    pub fn get_exp(&self, e: &[u8]) -> Option<&T> {
        self.space.index_of(e).and_then(|i| self.get(i))
    }

    pub fn set(&mut self, idx: usize, v: Option<T>) {
        self.coeffs[idx] = v;
    }

    pub fn coeffs(&self) -> &[Option<T>] {
        &self.coeffs
    }

    pub fn constant_term(&self) -> Option<&T> {
        self.get(0)
    }

    fn check(&self, o: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.space, &o.space) || *self.space == *o.space {
            Ok(())
        } else {
            Err(Error::VariableMismatch)
        }
    }

    fn zip(&self, o: &Self, f: impl Fn(&T, &T) -> Result<T>, neg: impl Fn(&T) -> T) -> Result<Self> {
        self.check(o)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&o.coeffs)
            .map(|(a, b)| match (a, b) {
                (Some(a), Some(b)) => f(a, b).map(Some),
                (Some(a), None) => Ok(Some(a.clone())),
                (None, Some(b)) => Ok(Some(neg(b))),
                (None, None) => Ok(None),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Jet { space: self.space.clone(), coeffs })
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.zip(o, |a, b| a.add(b), |b| b.clone())
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.zip(o, |a, b| a.sub(b), |b| b.scale(-<T::Sc as Scalar>::one()))
    }

    pub fn scale(&self, s: T::Sc) -> Self {
        Jet { space: self.space.clone(), coeffs: self.coeffs.iter().map(|c| c.as_ref().map(|c| c.scale(s))).collect() }
    }

    pub fn neg(&self) -> Self {
        self.scale(-<T::Sc as Scalar>::one())
    }

    /// Cauchy product truncated at the jet order.
    pub fn mul(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        let mut coeffs: Vec<Option<T>> = vec![None; self.space.len()];
        for (g, slot) in coeffs.iter_mut().enumerate() {
            for &(a, b) in self.space.pairs(g) {
                if let (Some(x), Some(y)) = (&self.coeffs[a], &o.coeffs[b]) {
                    let p = x.mul(y)?;
                    *slot = Some(match slot.take() {
                        Some(acc) => acc.add(&p)?,
                        None => p,
                    });
                }
            }
        }
        Ok(Jet { space: self.space.clone(), coeffs })
    }

    /// `∂/∂t_j`.
    pub fn partial(&self, j: usize) -> Self {
        let sp = &self.space;
        let coeffs = (0..sp.len())
            .map(|a| {
                let s = sp.succ(a, j)?;
                let c = self.coeffs[s].as_ref()?;
                let k = sp.exps(a)[j] as f64 + 1.0;
                Some(c.scale(<T::Sc as Scalar>::from_f64(k)))
            })
            .collect();
        Jet { space: sp.clone(), coeffs }
    }

    /// `exp(X)` for `X(0) = 0`; the series terminates at the jet order.
    pub fn exp(&self, one: T) -> Result<Self> {
        if self.coeffs[0].as_ref().is_some_and(|c| c.max_abs() != 0.0) {
            return Err(Error::NonzeroConstantTerm);
        }
        let mut out = Self::constant(&self.space, one.clone());
        let mut term = Self::constant(&self.space, one);
        for k in 1..=self.space.order() {
            term = term.mul(self)?.scale(<T::Sc as Scalar>::from_f64(1.0 / k as f64));
            out = out.add(&term)?;
        }
        Ok(out)
    }

    /// Multiplicative inverse given an inverse of the constant term.
    pub fn inv_with(&self, c0_inv: T) -> Result<Self> {
        let sp = self.space.clone();
        let mut out: Vec<Option<T>> = vec![None; sp.len()];
        out[0] = Some(c0_inv.clone());
        for k in 1..=sp.order() {
            for g in sp.range(k) {
                let mut acc: Option<T> = None;
                for &(a, b) in sp.pairs(g) {
                    if a == 0 {
                        continue;
                    }
                    if let (Some(x), Some(y)) = (&self.coeffs[a], &out[b]) {
                        let p = x.mul(y)?;
                        acc = Some(match acc {
                            Some(s) => s.add(&p)?,
                            None => p,
                        });
                    }
                }
                if let Some(s) = acc {
                    out[g] = Some(c0_inv.mul(&s)?.scale(-<T::Sc as Scalar>::one()));
                }
            }
        }
        Ok(Jet { space: sp, coeffs: out })
    }

    pub fn map<U: JetCoeff>(&self, f: impl Fn(&T) -> U) -> Jet<U> {
        Jet { space: self.space.clone(), coeffs: self.coeffs.iter().map(|c| c.as_ref().map(&f)).collect() }
    }

    pub fn try_map<U: JetCoeff>(&self, f: impl Fn(&T) -> Result<U>) -> Result<Jet<U>> {
        let coeffs = self.coeffs.iter().map(|c| c.as_ref().map(&f).transpose()).collect::<Result<Vec<_>>>()?;
        Ok(Jet { space: self.space.clone(), coeffs })
    }

    /// Largest coefficient magnitude over monomials of total degree `<= max_order`.
    pub fn max_abs_to(&self, max_order: usize) -> f64 {
        let hi = self.space.range(max_order.min(self.space.order())).end;
        self.coeffs[..hi].iter().flatten().fold(0.0, |m, c| m.max(c.max_abs()))
    }

    pub fn max_abs(&self) -> f64 {
        self.max_abs_to(self.space.order())
    }

    /// Truncate onto a space with the same variables and lower order.
    pub fn truncate(&self, space: &Arc<JetSpace>) -> Self {
        assert_eq!(space.vars(), self.space.vars());
        Jet { space: space.clone(), coeffs: self.coeffs[..space.len()].to_vec() }
    }
}

impl<T: JetCoeff<Sc = C64>> Jet<T> {
    /// Substitute `t_k = Σ_i lin[k][i]·s_i` into the jet, producing a jet over
    /// `target`'s variables (the linear change of flow coordinates).
    pub fn substitute_linear(&self, target: &Arc<JetSpace>, lin: &[Vec<C64>]) -> Result<Self> {
        let sp = &self.space;
        assert_eq!(lin.len(), sp.nvars());
        let var_jets: Vec<Jet<C64>> = lin
            .iter()
            .map(|row| {
                let mut j = Jet::zero(target);
                for (i, &z) in row.iter().enumerate() {
                    let mut e = vec![0u8; target.nvars()];
                    e[i] = 1;
                    if let Some(idx) = target.index_of(&e) {
                        j.coeffs[idx] = Some(z);
                    }
                }
                j
            })
            .collect();
        let mut out: Vec<Option<T>> = vec![None; target.len()];
        for a in 0..sp.len() {
            let Some(c) = &self.coeffs[a] else { continue };
            let mut p = Jet::constant(target, C64::new(1.0, 0.0));
            for (k, &m) in sp.exps(a).iter().enumerate() {
                for _ in 0..m {
                    p = p.mul(&var_jets[k])?;
                }
            }
            for (g, z) in p.coeffs.iter().enumerate() {
                if let Some(z) = z {
                    if *z == C64::new(0.0, 0.0) {
                        continue;
                    }
                    let term = c.scale(*z);
                    out[g] = Some(match out[g].take() {
                        Some(acc) => acc.add(&term)?,
                        None => term,
                    });
                }
            }
        }
        Ok(Jet { space: target.clone(), coeffs: out })
    }
}

impl<S: Scalar> Jet<Mat<S>> {
    /// Entry `(i, j)` as a scalar jet.
    pub fn entry(&self, i: usize, j: usize) -> Jet<S>
    where
        S: JetCoeff<Sc = S>,
    {
        self.map(|m| m.get(i, j))
    }
}

impl<S: Scalar> Jet<Series<S>> {
    /// Coefficient of `λ^deg` per jet coefficient.
    pub fn lambda_coeff(&self, deg: i32) -> Result<Jet<Mat<S>>> {
        self.try_map(|s| s.coeff(deg))
    }

    /// Apply a series map to every jet coefficient.
    pub fn map_series(&self, f: impl Fn(&Series<S>) -> Series<S>) -> Self {
        self.map(f)
    }

    pub fn try_map_series(&self, f: impl Fn(&Series<S>) -> Result<Series<S>>) -> Result<Self> {
        self.try_map(f)
    }
}

/// `⟨X, Y⟩_k` per jet coefficient: the `λ^k` coefficient of `tr(XY)` in the jet product.
pub fn jet_pairing<S>(x: &Jet<Series<S>>, y: &Jet<Series<S>>, k: i32) -> Result<Jet<S>>
where
    S: Scalar + JetCoeff<Sc = S>,
{
    x.check(y)?;
    let sp = x.space.clone();
    let mut out: Vec<Option<S>> = vec![None; sp.len()];
    for (g, slot) in out.iter_mut().enumerate() {
        let mut acc = S::zero();
        let mut any = false;
        for &(a, b) in sp.pairs(g) {
            if let (Some(p), Some(q)) = (&x.coeffs[a], &y.coeffs[b]) {
                acc += crate::splitting::pairing(p, q, k)?;
                any = true;
            }
        }
        if any {
            *slot = Some(acc);
        }
    }
    Ok(Jet { space: sp, coeffs: out })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c;

    fn space(nv: usize, d: usize) -> Arc<JetSpace> {
        JetSpace::new((1..=nv).map(|i| format!("t{i}")).collect(), d)
    }

    #[test]
    fn monomial_count() {
        // C(nv + d, d)
        assert_eq!(space(3, 3).len(), 20);
        assert_eq!(space(12, 3).len(), 455);
    }

    #[test]
    fn partial_of_square() {
        let sp = space(1, 2);
        let a = Mat::identity(2);
        let x = Jet::monomial(&sp, sp.index_of(&[2]).unwrap(), a.clone());
        let d = x.partial(0);
        assert_eq!(d.get_exp(&[1]), Some(&a.scale(c(2.0, 0.0))));
        assert!(d.get_exp(&[0]).is_none());
    }

    #[test]
    fn product_of_conjugate_linear_terms() {
        let sp = space(1, 2);
        let a = Mat::from_rows(&[vec![c(1.0, 0.0), c(2.0, 0.0)], vec![c(0.0, 1.0), c(-1.0, 0.0)]]);
        let one = Mat::identity(2);
        let mut x = Jet::constant(&sp, one.clone());
        x.set(1, Some(a.clone()));
        let mut y = Jet::constant(&sp, one.clone());
        y.set(1, Some(a.neg()));
        let p = x.mul(&y).unwrap();
        assert_eq!(p.get(0), Some(&one));
        assert!(p.get(1).unwrap().is_exact_zero());
        assert_eq!(p.get(2), Some(&a.mul(&a).unwrap().neg()));
    }

    #[test]
    fn exp_of_zero_is_one() {
        let sp = space(2, 3);
        let z: Jet<C64> = Jet::zero(&sp);
        let e = z.exp(c(1.0, 0.0)).unwrap();
        assert_eq!(e.get(0), Some(&c(1.0, 0.0)));
        assert!(e.coeffs[1..].iter().all(|v| v.is_none() || *v == Some(c(0.0, 0.0))));
    }

    #[test]
    fn exp_rejects_constant_term() {
        let sp = space(1, 2);
        let x = Jet::constant(&sp, c(1.0, 0.0));
        assert_eq!(x.exp(c(1.0, 0.0)).unwrap_err(), Error::NonzeroConstantTerm);
    }

    #[test]
    fn mismatched_spaces_rejected() {
        let a: Jet<C64> = Jet::zero(&space(1, 2));
        let b: Jet<C64> = Jet::zero(&space(2, 2));
        assert_eq!(a.add(&b).unwrap_err(), Error::VariableMismatch);
    }
}

//! Splittings of the loop algebra: projections, trace pairings, the 2-cocycle,
//! reality conditions and seeded sampling of negative loops.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Mat;
use crate::scalar::{c, Scalar, C64};
use crate::series::Series;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Standard,
    URealForm,
    SigmaTwisted,
    TauSigma,
    KdvTwisted,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::Standard => "standard",
            Variant::URealForm => "u_real",
            Variant::SigmaTwisted => "sigma_twisted",
            Variant::TauSigma => "tau_sigma",
            Variant::KdvTwisted => "kdv_twisted",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "standard" => Variant::Standard,
            "u_real" => Variant::URealForm,
            "sigma_twisted" | "sigma" => Variant::SigmaTwisted,
            "tau_sigma" => Variant::TauSigma,
            "kdv_twisted" => Variant::KdvTwisted,
            other => return Err(Error::InvalidArgument(format!("unknown splitting variant {other:?}"))),
        })
    }

    fn uses_tau(self) -> bool {
        matches!(self, Variant::URealForm | Variant::TauSigma)
    }

    fn uses_sigma(self) -> bool {
        matches!(self, Variant::SigmaTwisted | Variant::TauSigma)
    }
}

/// The complex-linear involution `σ` of the group.
#[derive(Clone, Debug, PartialEq)]
pub enum SigmaForm {
    /// `σ(g) = c·g·c⁻¹`.
    Conjugator(Mat<C64>),
    /// `σ(g) = (gᵗ)⁻¹`.
    InverseTranspose,
}

/// The conjugate-linear involution `τ` of the group.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TauForm {
    /// `τ(g) = (ḡᵗ)⁻¹`, fixing a unitary group.
    InverseConjTranspose,
    /// `τ(g) = ḡ`, fixing a real group.
    Conj,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SplittingSpec {
    pub variant: Variant,
    pub n: usize,
    pub sigma: SigmaForm,
    pub tau: TauForm,
    /// Restrict sampled loops to determinant one.
    pub traceless: bool,
}

impl SplittingSpec {
    pub fn standard(n: usize) -> Self {
        SplittingSpec { variant: Variant::Standard, n, sigma: SigmaForm::InverseTranspose, tau: TauForm::InverseConjTranspose, traceless: false }
    }

    pub fn new(variant: Variant, n: usize, sigma: SigmaForm, tau: TauForm, traceless: bool) -> Result<Self> {
        if variant == Variant::KdvTwisted && n != 2 {
            return Err(Error::InvalidArgument("kdv_twisted requires n = 2".into()));
        }
        if let SigmaForm::Conjugator(cm) = &sigma {
            if cm.n != n {
                return Err(Error::DimensionMismatch(cm.n, n));
            }
            let sq = cm.mul(cm)?;
            let s = sq.get(0, 0);
            if sq.sub(&Mat::identity(n).scale(s))?.max_abs() > 1e-12 * (1.0 + s.norm()) {
                return Err(Error::InvalidArgument("sigma conjugator squared is not scalar".into()));
            }
            cm.inverse()?;
        }
        Ok(SplittingSpec { variant, n, sigma, tau, traceless })
    }

    /// `σ` on the Lie algebra.
    pub fn sigma_alg<S: Scalar>(&self, x: &Mat<S>) -> Mat<S> {
        match &self.sigma {
            SigmaForm::Conjugator(cm) => {
                let cc = Mat::<S>::lift(cm);
                let ci = Mat::<S>::lift(&cm.inverse().expect("validated conjugator"));
                cc.mul(x).and_then(|m| m.mul(&ci)).expect("dimension validated")
            }
            SigmaForm::InverseTranspose => x.transpose().neg(),
        }
    }

    /// `τ` on the Lie algebra.
    pub fn tau_alg<S: Scalar>(&self, x: &Mat<S>) -> Mat<S> {
        match self.tau {
            TauForm::InverseConjTranspose => x.adjoint().neg(),
            TauForm::Conj => x.conj(),
        }
    }

    /// Largest defect of the variant's Lie-algebra condition on `ξ`.
    pub fn algebra_defect(&self, xi: &Series<C64>) -> f64 {
        let mut worst: f64 = 0.0;
        if self.variant.uses_tau() {
            let d = xi.map_coeffs(|m| self.tau_alg(m)).sub(xi).map(|s| s.max_abs()).unwrap_or(f64::INFINITY);
            worst = worst.max(d);
        }
        if self.variant.uses_sigma() {
            let t = xi.map_with_degree(|k, m| {
                let s = self.sigma_alg(m);
                if k.rem_euclid(2) == 1 {
                    s.neg()
                } else {
                    s
                }
            });
            worst = worst.max(t.sub(xi).map(|s| s.max_abs()).unwrap_or(f64::INFINITY));
        }
        if self.variant == Variant::KdvTwisted {
            let d = kdv_twist(xi).and_then(|t| t.sub(xi)).map(|s| s.max_abs()).unwrap_or(f64::INFINITY);
            worst = worst.max(d);
        }
        worst
    }

    /// `π₊` / `π₋`. Twisted variants use the standard rule after a membership check.
    pub fn project(&self, x: &Series<C64>, plus: bool, tol: f64) -> Result<Series<C64>> {
        if self.variant != Variant::Standard {
            let d = self.algebra_defect(x);
            if d > tol * (1.0 + x.max_abs()) {
                return Err(Error::Precondition(format!(
                    "element violates the {} algebra condition by {d:e}",
                    self.variant.name()
                )));
            }
        }
        Ok(if plus { x.plus() } else { x.minus() })
    }

    /// Largest defect of the variant's group condition on `g`.
    pub fn reality_defect(&self, g: &Series<C64>) -> Result<f64> {
        let n = g.n();
        let id = Series::identity(n, g.lo());
        let mut worst: f64 = 0.0;
        if self.variant.uses_tau() {
            let d = match self.tau {
                TauForm::InverseConjTranspose => g.conj_coeffs().transpose_coeffs().mul(g)?.sub(&id)?,
                TauForm::Conj => g.conj_coeffs().sub(g)?,
            };
            worst = worst.max(d.max_abs());
        }
        if self.variant.uses_sigma() {
            let d = match &self.sigma {
                SigmaForm::Conjugator(cm) => {
                    let t = g.flip().left_mul_const(cm)?.right_mul_const(&cm.inverse()?)?;
                    g.sub(&t)?
                }
                SigmaForm::InverseTranspose => g.flip().transpose_coeffs().mul(g)?.sub(&id)?,
            };
            worst = worst.max(d.max_abs());
        }
        if self.variant == Variant::KdvTwisted {
            let phi = kdv_phi(g.lo());
            let phi_inv = kdv_phi_inv(g.lo());
            let h = phi.mul(g)?.mul(&phi_inv)?;
            worst = worst.max(h.sub(&h.flip())?.max_abs());
        }
        Ok(worst)
    }

    /// Symmetrize a Lie-algebra element onto the variant's fixed subspace.
    pub fn symmetrize(&self, xi: &Series<C64>) -> Result<Series<C64>> {
        let half = c(0.5, 0.0);
        let mut x = xi.clone();
        if self.traceless {
            let n = self.n as f64;
            x = x.map_coeffs(|m| m.sub(&Mat::identity(m.n).scale(m.trace() / n)).expect("square"));
        }
        if self.variant.uses_tau() {
            x = x.add(&x.map_coeffs(|m| self.tau_alg(m)))?.scale(half);
        }
        if self.variant.uses_sigma() {
            let t = x.map_with_degree(|k, m| {
                let s = self.sigma_alg(m);
                if k.rem_euclid(2) == 1 {
                    s.neg()
                } else {
                    s
                }
            });
            x = x.add(&t)?.scale(half);
        }
        if self.variant == Variant::KdvTwisted {
            x = x.add(&kdv_twist(&x)?)?.scale(half).minus();
        }
        Ok(x)
    }
}

/// `φ(λ) = [[1,0],[λ,1]]`.
pub fn kdv_phi<S: Scalar>(lo: i32) -> Series<S> {
    Series::from_terms(2, lo, &[(0, Mat::identity(2)), (1, Mat::unit(2, 1, 0))])
}

pub fn kdv_phi_inv<S: Scalar>(lo: i32) -> Series<S> {
    Series::from_terms(2, lo, &[(0, Mat::identity(2)), (1, Mat::unit(2, 1, 0).neg())])
}

/// The involution fixing the KdV-twisted algebra: `ξ ↦ ψ·ξ(−λ)·ψ⁻¹` with
/// `ψ = φ(λ)⁻¹φ(−λ) = [[1,0],[−2λ,1]]`.
pub fn kdv_twist<S: Scalar>(xi: &Series<S>) -> Result<Series<S>> {
    let lo = xi.lo();
    let two = S::from_f64(2.0);
    let psi = Series::from_terms(2, lo, &[(0, Mat::identity(2)), (1, Mat::unit(2, 1, 0).scale(-two))]);
    let psi_inv = Series::from_terms(2, lo, &[(0, Mat::identity(2)), (1, Mat::unit(2, 1, 0).scale(two))]);
    psi.mul(&xi.flip())?.mul(&psi_inv)
}

/// `⟨X, Y⟩_k`: the `λ^k` coefficient of `tr(XY)`.
pub fn pairing<S: Scalar>(x: &Series<S>, y: &Series<S>, k: i32) -> Result<S> {
    if x.n() != y.n() {
        return Err(Error::DimensionMismatch(x.n(), y.n()));
    }
    let (Some(xs), Some(xh)) = (x.bottom_degree(), x.top_degree()) else { return Ok(S::zero()) };
    let (Some(ys), Some(yh)) = (y.bottom_degree(), y.top_degree()) else { return Ok(S::zero()) };
    if !x.is_exact() && k < x.trusted_lo() + yh {
        return Err(Error::BelowTrusted { degree: k - yh, trusted_lo: x.trusted_lo() });
    }
    if !y.is_exact() && k < y.trusted_lo() + xh {
        return Err(Error::BelowTrusted { degree: k - xh, trusted_lo: y.trusted_lo() });
    }
    let n = x.n();
    let mut acc = S::zero();
    for j in xs.max(k - yh)..=xh.min(k - ys) {
        let a = x.coeff(j)?;
        let b = y.coeff(k - j)?;
        for p in 0..n {
            for q in 0..n {
                acc += a.data[p * n + q] * b.data[q * n + p];
            }
        }
    }
    Ok(acc)
}

/// `w(X, Y) = ⟨∂_λX, Y⟩₋₁`.
pub fn cocycle<S: Scalar>(x: &Series<S>, y: &Series<S>) -> Result<S> {
    pairing(&x.dlambda(), y, -1)
}

/// Deterministic uniform draw on `[−1, 1)` from the top 53 bits of a ChaCha8 word.
pub fn uniform_pm1(rng: &mut ChaCha8Rng) -> f64 {
    ((rng.next_u64() >> 11) as f64) * (1.0 / (1u64 << 53) as f64) * 2.0 - 1.0
}

/// Seeded `f = exp(ξ)` with `ξ = Σ_{j=1..depth} ξ_{−j}λ^{−j}` constrained to the variant.
pub fn sample_negative_element(spec: &SplittingSpec, seed: u64, depth: usize, amplitude: f64, lo: i32) -> Result<Series<C64>> {
    let n = spec.n;
    if -(depth as i32) < lo {
        return Err(Error::BelowTrusted { degree: -(depth as i32), trusted_lo: lo });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut terms = Vec::with_capacity(depth);
    for j in 1..=depth {
        let mut m = Mat::zeros(n);
        for i in 0..n * n {
            let re = uniform_pm1(&mut rng);
            let im = uniform_pm1(&mut rng);
            m.data[i] = c(re * amplitude, im * amplitude);
        }
        terms.push((-(j as i32), m));
    }
    let xi = spec.symmetrize(&Series::from_terms(n, lo, &terms))?;
    xi.exp_negative()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cocycle_on_matching_units() {
        let lo = -6;
        let e = Mat::<C64>::unit(2, 0, 0);
        let x = Series::monomial(&e, 1, lo);
        let y = Series::monomial(&e, -1, lo);
        assert_eq!(cocycle(&x, &y).unwrap(), c(1.0, 0.0));
        assert_eq!(cocycle(&y, &x).unwrap(), c(-1.0, 0.0));
    }

    #[test]
    fn pairing_single_term() {
        let lo = -8;
        let a = Mat::from_rows(&[vec![c(1.0, 0.0), c(2.0, 0.0)], vec![c(0.0, 0.0), c(3.0, 0.0)]]);
        let b = Mat::from_rows(&[vec![c(0.5, 0.0), c(0.0, 0.0)], vec![c(1.0, 0.0), c(-1.0, 0.0)]]);
        let x = Series::monomial(&a, 2, lo);
        let y = Series::monomial(&b, -3, lo);
        assert_eq!(pairing(&x, &y, -1).unwrap(), a.mul(&b).unwrap().trace());
        let x = Series::monomial(&a, 1, lo);
        let y = Series::monomial(&b, -1, lo);
        assert_eq!(pairing(&x, &y, -1).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn kdv_generator_is_twist_invariant() {
        let j = Series::from_terms(
            2,
            -4,
            &[(1, Mat::diag(&[c(1.0, 0.0), c(-1.0, 0.0)])), (0, Mat::unit(2, 0, 1))],
        );
        let phi = kdv_phi::<C64>(-4);
        let conj = phi.mul(&j).unwrap().mul(&kdv_phi_inv(-4)).unwrap();
        let want = Series::from_terms(2, -4, &[(0, Mat::unit(2, 0, 1)), (2, Mat::unit(2, 1, 0))]);
        assert_eq!(conj, want);
        assert_eq!(kdv_twist(&j).unwrap(), j);
    }

    #[test]
    fn sampling_is_deterministic() {
        let spec = SplittingSpec::standard(2);
        let a = sample_negative_element(&spec, 7, 2, 0.3, -12).unwrap();
        let b = sample_negative_element(&spec, 7, 2, 0.3, -12).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.coeff(0).unwrap(), Mat::identity(2));
    }
}

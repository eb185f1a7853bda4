//! Positive-half Virasoro vector fields on negative loops and their induced
//! actions on reduced frames and on `ln τ`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hierarchy::{Family, Label, VacuumSequence};
use crate::jet::{jet_pairing, Jet, JetSpace};
use crate::matrix::Mat;
use crate::scalar::{c, Dual, Scalar, C64};
use crate::scattering::{factorize_jet, Factorization};
use crate::series::{directional_derivative, CSeries, Series};
use crate::splitting::{SigmaForm, SplittingSpec};
use crate::tau::{ln_tau_jet, maurer_cartan_lambda};

/// Presets for `Γ = C′(1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GammaPreset {
    Zero,
    Xi0,
}

impl GammaPreset {
    pub fn name(self) -> &'static str {
        match self {
            GammaPreset::Zero => "zero",
            GammaPreset::Xi0 => "xi0",
        }
    }

    /// `0` or `(1/n)·diag(0, 1, …, n−1)`.
    pub fn matrix(self, n: usize) -> Mat<C64> {
        match self {
            GammaPreset::Zero => Mat::zeros(n),
            GammaPreset::Xi0 => Mat::diag(&(0..n).map(|k| c(k as f64 / n as f64, 0.0)).collect::<Vec<_>>()),
        }
    }
}

fn check_index(l: i32) -> Result<()> {
    if l < -1 {
        return Err(Error::InvalidArgument(format!("Virasoro index {l} < −1")));
    }
    Ok(())
}

/// `λ^{ℓ+1}f_λf⁻¹ + λ^ℓ fΓf⁻¹`.
fn generator_density<S: Scalar>(f: &Series<S>, finv: &Series<S>, gamma: &Mat<C64>, l: i32) -> Result<Series<S>> {
    let a = f.dlambda().mul(finv)?.shift(l + 1);
    let g = Mat::<S>::lift(gamma);
    if gamma.is_exact_zero() {
        return Ok(a);
    }
    let b = f.right_mul_const(&g)?.mul(finv)?.shift(l);
    a.add(&b)
}

/// `Z_ℓ(f) = −(λ^{ℓ+1}f_λf⁻¹ + λ^ℓ fΓf⁻¹)₋·f`.
pub fn virasoro_field<S: Scalar>(f: &Series<S>, gamma: &Mat<C64>, l: i32) -> Result<Series<S>> {
    check_index(l)?;
    let finv = f.inv()?;
    generator_density(f, &finv, gamma, l)?.minus().neg().mul(f)
}

/// `DZ_k(f)[Z_j(f)] − DZ_j(f)[Z_k(f)]`.
pub fn field_bracket(f: &CSeries, gamma: &Mat<C64>, j: i32, k: i32) -> Result<CSeries> {
    let zj = virasoro_field(f, gamma, j)?;
    let zk = virasoro_field(f, gamma, k)?;
    let a = directional_derivative(f, &zj, |g: &Series<Dual>| virasoro_field(g, gamma, k))?;
    let b = directional_derivative(f, &zk, |g: &Series<Dual>| virasoro_field(g, gamma, j))?;
    a.sub(&b)
}

/// Defects of the bracket against `(k−j)Z_{j+k}` and against `−(k−j)Z_{j+k}`.
pub fn bracket_defects(f: &CSeries, gamma: &Mat<C64>, j: i32, k: i32) -> Result<(f64, f64)> {
    let br = field_bracket(f, gamma, j, k)?;
    if j == k {
        return Ok((br.max_abs(), br.max_abs()));
    }
    let z = virasoro_field(f, gamma, j + k)?.scale(c((k - j) as f64, 0.0));
    Ok((br.sub(&z)?.max_abs(), br.add(&z)?.max_abs()))
}

/// `E⁻¹` as a jet (E has polynomial coefficients and `E(0) = I`).
pub fn frame_inverse<S: Scalar>(fac: &Factorization<S>) -> Result<Jet<Series<S>>> {
    let e0 = fac.e.get(0).cloned().ok_or(Error::Singular)?;
    fac.e.inv_with(e0.inv()?)
}

/// `Ad_E(λ^ℓ(λf_λf⁻¹ + fΓf⁻¹))` as a jet.
fn dressed_density(fac: &Factorization<C64>, einv: &Jet<Series<C64>>, gamma: &Mat<C64>, l: i32) -> Result<Jet<Series<C64>>> {
    let dens = generator_density(&fac.f, &fac.finv, gamma, l)?;
    let e_d = fac.e.try_map(|s| s.mul(&dens))?;
    e_d.mul(einv)
}

/// `δ_ℓM·M⁻¹ = −(λ^ℓE(λf_λf⁻¹ + fΓf⁻¹)E⁻¹)₋`.
pub fn induced_frame_variation(fac: &Factorization<C64>, gamma: &Mat<C64>, l: i32) -> Result<Jet<Series<C64>>> {
    check_index(l)?;
    let einv = frame_inverse(fac)?;
    Ok(dressed_density(fac, &einv, gamma, l)?.map(|s| s.minus().neg()))
}

/// gl_n, `Γ = 0`: `−(λ^{ℓ+1}M_λM⁻¹ + λ^ℓ M𝒥M⁻¹)₋` with `𝒥 = Σ j·e_iiλ^j·t_{i,j}`.
pub fn induced_frame_variation_gl(seq: &VacuumSequence, fac: &Factorization<C64>, l: i32) -> Result<Jet<Series<C64>>> {
    check_index(l)?;
    if seq.family != Family::GlN {
        return Err(Error::InvalidArgument("the diagonal-coordinate frame formula needs gl_n".into()));
    }
    let sp = &fac.space;
    let mut jj: Jet<Series<C64>> = Jet::zero(sp);
    for (v, g) in seq.generators.iter().enumerate() {
        let Label::Diag { j, .. } = g.label else {
            return Err(Error::InvalidArgument("diagonal coordinates required".into()));
        };
        let idx = var_monomial(sp, v)?;
        let term = g.series::<C64>(seq.n, fac.lo).scale(c(j as f64, 0.0));
        let cur = jj.get(idx).cloned();
        jj.set(idx, Some(match cur {
            Some(x) => x.add(&term)?,
            None => term,
        }));
    }
    let mlm = fac.m.map(|s| s.dlambda()).mul(&fac.minv)?.map(|s| s.shift(l + 1));
    let mjm = fac.m.mul(&jj)?.mul(&fac.minv)?.map(|s| s.shift(l));
    Ok(mlm.add(&mjm)?.map(|s| s.minus().neg()))
}

fn var_monomial(sp: &JetSpace, v: usize) -> Result<usize> {
    let mut e = vec![0u8; sp.nvars()];
    e[v] = 1;
    sp.index_of(&e).ok_or_else(|| Error::InvalidArgument("jet order must be >= 1".into()))
}

/// Factorize `f + ε·δf` and return the ε-part of the frame, `δM·M⁻¹`, and of `ln τ`.
pub struct EpsilonRoute {
    pub dm_minv: Jet<Series<C64>>,
    pub dlntau: Jet<C64>,
    /// `−⟨δM·M⁻¹, E_λE⁻¹⟩₋₁`.
    pub general_variation: Jet<C64>,
}

pub fn epsilon_route(seq: &VacuumSequence, fac: &Factorization<C64>, df: &CSeries) -> Result<EpsilonRoute> {
    let d = fac.space.order();
    let fd = fac.f.with_direction(df)?;
    let facd: Factorization<Dual> = factorize_jet(seq, &fd, d).map_err(|e| e.at("perturbed factorization"))?;
    let dm = facd.m.map(|s| s.eps_part());
    let dm_minv = dm.mul(&fac.minv)?;
    let x = ln_tau_jet(seq, &facd)?;
    let dlntau = x.map(|z| z.eps);
    let einv = frame_inverse(fac)?;
    let el = fac.e.map(|s| s.dlambda()).mul(&einv)?;
    let general_variation = jet_pairing(&dm_minv, &el, -1)?.neg();
    Ok(EpsilonRoute { dm_minv, dlntau, general_variation })
}

/// `(δM)M⁻¹ − (E·δf·f⁻¹·E⁻¹)₋` for a tangent `δf`.
pub fn frame_variation_defect(seq: &VacuumSequence, fac: &Factorization<C64>, df: &CSeries) -> Result<f64> {
    let route = epsilon_route(seq, fac, df)?;
    let einv = frame_inverse(fac)?;
    let w = df.mul(&fac.finv)?;
    let rhs = fac.e.try_map(|s| s.mul(&w))?.mul(&einv)?.map(|s| s.minus());
    Ok(route.dm_minv.sub(&rhs)?.max_abs())
}

/// `⟨λ^ℓE(λf_λf⁻¹ + fΓf⁻¹)E⁻¹, λE_λE⁻¹⟩₀` and the index-`−1` reading
/// `⟨λ^ℓE(…)E⁻¹, E_λE⁻¹⟩₋₁`.
pub fn induced_lntau_variation(fac: &Factorization<C64>, gamma: &Mat<C64>, l: i32) -> Result<(Jet<C64>, Jet<C64>)> {
    check_index(l)?;
    let einv = frame_inverse(fac)?;
    let a = dressed_density(fac, &einv, gamma, l)?;
    let el = fac.e.map(|s| s.dlambda()).mul(&einv)?;
    let at0 = jet_pairing(&a, &el.map(|s| s.shift(1)), 0)?;
    let atm1 = jet_pairing(&a, &el, -1)?;
    Ok((at0, atm1))
}

/// `c_ℓ(f)`: the `λ⁰` coefficient of `tr(λ^{ℓ+2}(f_λf⁻¹)²)`.
pub fn c_ell(f: &CSeries, l: i32) -> Result<C64> {
    check_index(l)?;
    let w = f.dlambda().mul(&f.inv()?)?;
    w.mul(&w)?.trace_coeff(-(l + 2))
}

/// The differential-operator form on `X = ln τ` in the diagonal coordinates:
/// `Σ j·t_{i,j}·X_{t_{i,j+ℓ}} + [ℓ ≥ 2]·Σ_i Σ_{j=1}^{ℓ−1}(κ·X_{t_{i,j}}X_{t_{i,ℓ−j}} + ½X_{t_{i,j}t_{i,ℓ−j}}) − ½c_ℓ`.
/// Terms whose shifted variable is not configured are dropped; callers must
/// restrict comparisons with [`comparable_monomials`].
pub fn tau_virasoro_operator(seq: &VacuumSequence, x: &Jet<C64>, l: i32, c_l: C64, kappa: f64) -> Result<Jet<C64>> {
    check_index(l)?;
    if seq.family != Family::GlN {
        return Err(Error::InvalidArgument("the differential-operator form needs gl_n".into()));
    }
    let sp = x.space().clone();
    let mut out: Jet<C64> = Jet::zero(&sp);
    for (v, g) in seq.generators.iter().enumerate() {
        let Label::Diag { k: i, j } = g.label else {
            return Err(Error::InvalidArgument("diagonal coordinates required".into()));
        };
        let shifted = j as i32 + l;
        if shifted <= 0 {
            continue;
        }
        let Some(w) = seq.diag_var(i, shifted as u32) else { continue };
        let mut tv: Jet<C64> = Jet::zero(&sp);
        tv.set(var_monomial(&sp, v)?, Some(c(j as f64, 0.0)));
        out = out.add(&tv.mul(&x.partial(w))?)?;
    }
    if l >= 2 {
        for i in 1..=seq.n {
            for j in 1..l {
                let (Some(a), Some(b)) = (seq.diag_var(i, j as u32), seq.diag_var(i, (l - j) as u32)) else {
                    return Err(Error::Precondition(format!("t_{{{i},{j}}} or t_{{{i},{}}} is not configured", l - j)));
                };
                let xa = x.partial(a);
                let xb = x.partial(b);
                out = out.add(&xa.mul(&xb)?.scale(c(kappa, 0.0)))?.add(&xa.partial(b).scale(c(0.5, 0.0)))?;
            }
        }
    }
    let c0 = out.get(0).copied().unwrap_or(c(0.0, 0.0)) - c_l * c(0.5, 0.0);
    out.set(0, Some(c0));
    Ok(out)
}

/// Monomials of total degree `<= max_order` all of whose variables `t_{i,j}`
/// have `t_{i,j+ℓ}` configured.
pub fn comparable_monomials(seq: &VacuumSequence, sp: &JetSpace, l: i32, max_order: usize) -> Vec<usize> {
    let ok_var: Vec<bool> = seq
        .generators
        .iter()
        .map(|g| match g.label {
            Label::Diag { k, j } => {
                let s = j as i32 + l;
                s <= 0 || seq.diag_var(k, s as u32).is_some()
            }
            _ => false,
        })
        .collect();
    (0..sp.range(max_order.min(sp.order())).end)
        .filter(|&idx| sp.exps(idx).iter().enumerate().all(|(v, &e)| e == 0 || ok_var[v]))
        .collect()
}

pub fn masked_diff(a: &Jet<C64>, b: &Jet<C64>, mask: &[usize]) -> f64 {
    let zero = c(0.0, 0.0);
    mask.iter()
        .map(|&i| (a.get(i).copied().unwrap_or(zero) - b.get(i).copied().unwrap_or(zero)).norm())
        .fold(0.0, f64::max)
}

/// Defects of the identities used in the proof of the differential-operator
/// form, for `Q_i = Me_iiλM⁻¹`, `B_i = M(I − 2e_ii)λM⁻¹`, `P = λM_λM⁻¹`,
/// `ξ = M⁻¹M_λ`.
#[derive(Clone, Debug, Default, Serialize)]
pub struct ProofIdentities {
    pub constant_term: f64,
    pub tau_from_xi: f64,
    pub b_squared: f64,
    pub b_from_q: f64,
    pub b_lambda: f64,
    pub trace_b: f64,
}

pub fn proof_identities(seq: &VacuumSequence, fac: &Factorization<C64>, x: &Jet<C64>) -> Result<ProofIdentities> {
    if seq.family != Family::GlN {
        return Err(Error::InvalidArgument("proof identities need gl_n".into()));
    }
    let n = seq.n;
    let lo = fac.lo;
    let sp = &fac.space;
    let mut out = ProofIdentities::default();
    let xi = maurer_cartan_lambda(fac)?;
    let p = fac.m.map(|s| s.dlambda()).mul(&fac.minv)?.map(|s| s.shift(1));
    let lam2 = Jet::constant(sp, Series::monomial(&Mat::identity(n), 2, lo));
    let lam1 = Jet::constant(sp, Series::monomial(&Mat::identity(n), 1, lo));
    let cmp1 = sp.order().saturating_sub(1);
    for i in 0..n {
        let vi = seq.diag_var(i + 1, 1).ok_or_else(|| Error::Precondition("t_{i,1} required".into()))?;
        let q = fac.dressed_generator(seq, vi)?;
        let eii = Mat::<C64>::unit(n, i, i);
        let bi = Mat::identity(n).sub(&eii.scale(c(2.0, 0.0)))?;
        let b = crate::scattering::conjugate(&fac.m, &fac.minv, &Series::monomial(&bi, 1, lo))?;
        // Q_{i,0}² − Q_{i,−1} + e_iiQ_{i,−1} + Q_{i,−1}e_ii = 0
        let q0 = q.lambda_coeff(0)?;
        let qm1 = q.lambda_coeff(-1)?;
        let lhs = q0.mul(&q0)?.sub(&qm1)?.add(&qm1.try_map(|m| eii.mul(m))?)?.add(&qm1.try_map(|m| m.mul(&eii))?)?;
        out.constant_term = out.constant_term.max(lhs.max_abs());
        out.b_squared = out.b_squared.max(b.mul(&b)?.sub(&lam2)?.max_abs());
        out.b_from_q = out.b_from_q.max(b.sub(&lam1.sub(&q.scale(c(2.0, 0.0)))?)?.max_abs());
        let bl = b.map(|s| s.dlambda());
        let lhs = bl.map(|s| s.shift(1));
        let rhs = p.mul(&b)?.sub(&b.mul(&p)?)?.add(&b)?;
        out.b_lambda = out.b_lambda.max(lhs.sub(&rhs)?.max_abs());
        // tr(B_i∂_λB_i) = nλ
        for k in -4..=3 {
            let tr = jet_pairing(&b, &bl, k)?;
            let want = if k == 1 { c(n as f64, 0.0) } else { c(0.0, 0.0) };
            let expected = Jet::constant(sp, want);
            out.trace_b = out.trace_b.max(tr.sub(&expected)?.max_abs());
        }
        // X_{t_{i,j}} = (ξ_{−(j+1)})_{ii}
        for (v, g) in seq.generators.iter().enumerate() {
            if let Label::Diag { k, j } = g.label {
                if k == i + 1 {
                    let lhs = x.partial(v);
                    let rhs = xi.lambda_coeff(-(j as i32) - 1)?.entry(i, i);
                    out.tau_from_xi = out.tau_from_xi.max(lhs.sub(&rhs)?.max_abs_to(cmp1));
                }
            }
        }
    }
    Ok(out)
}

/// `η_j = ½ζ_{2j}` with `ζ_ℓ = Z_ℓ` at `Γ = 0`.
pub fn eta_field<S: Scalar>(f: &Series<S>, j: i32) -> Result<Series<S>> {
    Ok(virasoro_field(f, &Mat::zeros(f.n()), 2 * j)?.scale(S::from_f64(0.5)))
}

/// `−½(λ^{2j−1}f_λf⁻¹)₋·f`, an alternative exponent.
pub fn eta_field_alt<S: Scalar>(f: &Series<S>, j: i32) -> Result<Series<S>> {
    let w = f.dlambda().mul(&f.inv()?)?.shift(2 * j - 1);
    w.minus().scale(S::from_f64(-0.5)).mul(f)
}

/// First-order defect of the σ group condition along `δf` at `f`.
pub fn sigma_tangent_defect(spec: &SplittingSpec, f: &CSeries, df: &CSeries) -> Result<f64> {
    match &spec.sigma {
        SigmaForm::InverseTranspose => {
            // g(−λ)ᵗ·g(λ) = I, linearized.
            let a = df.flip().transpose_coeffs().mul(f)?;
            let b = f.flip().transpose_coeffs().mul(df)?;
            Ok(a.add(&b)?.max_abs())
        }
        SigmaForm::Conjugator(cm) => {
            let ci = cm.inverse()?;
            let t = df.flip().left_mul_const(cm)?.right_mul_const(&ci)?;
            Ok(df.sub(&t)?.max_abs())
        }
    }
}

/// `(bracket defect against (k−j)η_{j+k})` for `η_j = ½ζ_{2j}` and for the alternative exponent.
pub fn eta_bracket_defects(f: &CSeries, j: i32, k: i32) -> Result<(f64, f64)> {
    let run = |field: &dyn Fn(&Series<Dual>, i32) -> Result<Series<Dual>>, plain: &dyn Fn(&CSeries, i32) -> Result<CSeries>| -> Result<f64> {
        let ej = plain(f, j)?;
        let ek = plain(f, k)?;
        let a = directional_derivative(f, &ej, |g| field(g, k))?;
        let b = directional_derivative(f, &ek, |g| field(g, j))?;
        let target = plain(f, j + k)?.scale(c((k - j) as f64, 0.0));
        Ok(a.sub(&b)?.sub(&target)?.max_abs())
    };
    let ours = run(&|g, i| eta_field(g, i), &|g, i| eta_field(g, i))?;
    let alt = run(&|g, i| eta_field_alt(g, i), &|g, i| eta_field_alt(g, i))?;
    Ok((ours, alt))
}

/// Gamma as a jet-ready dimension check.
pub fn gamma_for(seq: &VacuumSequence, preset: GammaPreset) -> Mat<C64> {
    preset.matrix(seq.n)
}

//! `ln τ_f` as a jet through its logarithmic derivatives, second partials and
//! the explicit tau/solution identities.

use crate::error::{Error, Result};
use crate::hierarchy::{dx, Family, VacuumSequence};
use crate::jet::{jet_pairing, Jet, JetCoeff};
use crate::matrix::Mat;
use crate::scalar::{c, Scalar, C64};
use crate::scattering::{factorize_jet, Factorization, VarChoice};
use crate::series::Series;

/// `ξ = M⁻¹∂_λM`.
pub fn maurer_cartan_lambda<S: Scalar>(fac: &Factorization<S>) -> Result<Jet<Series<S>>> {
    fac.minv.mul(&fac.m.map(|s| s.dlambda()))
}

/// `W_v = ⟨J_v, M⁻¹M_λ⟩₋₁` for every generator.
pub fn one_form<S: Scalar + JetCoeff<Sc = S>>(seq: &VacuumSequence, fac: &Factorization<S>) -> Result<Vec<Jet<S>>> {
    let xi = maurer_cartan_lambda(fac)?;
    (0..seq.generators.len())
        .map(|v| {
            let j = Jet::constant(&fac.space, seq.generator_series::<S>(v, fac.lo));
            jet_pairing(&j, &xi, -1).map_err(|e| e.at("tau one-form"))
        })
        .collect()
}

/// Integrate the one-form with `X(0) = 0`.
pub fn integrate_one_form<S: Scalar + JetCoeff<Sc = S>>(w: &[Jet<S>], choice: VarChoice) -> Jet<S> {
    let sp = w[0].space().clone();
    let mut coeffs: Vec<Option<S>> = vec![None; sp.len()];
    coeffs[0] = Some(S::zero());
    for k in 1..=sp.order() {
        for g in sp.range(k) {
            let e = sp.exps(g);
            let v = match choice {
                VarChoice::Smallest => e.iter().position(|&x| x > 0),
                VarChoice::Largest => e.iter().rposition(|&x| x > 0),
            }
            .expect("nonzero multi-index");
            let beta = sp.pred(g, v).expect("predecessor");
            coeffs[g] = w[v].get(beta).map(|z| *z * S::from_f64(1.0 / e[v] as f64));
        }
    }
    Jet::from_coeffs(&sp, coeffs)
}

pub fn ln_tau_jet<S: Scalar + JetCoeff<Sc = S>>(seq: &VacuumSequence, fac: &Factorization<S>) -> Result<Jet<S>> {
    Ok(integrate_one_form(&one_form(seq, fac)?, VarChoice::Smallest))
}

/// `(‖∂_vX − W_v‖ up to order d−1, ‖X_smallest − X_largest‖)`.
pub fn one_form_defects(seq: &VacuumSequence, fac: &Factorization<C64>) -> Result<(f64, f64)> {
    let w = one_form(seq, fac)?;
    let x = integrate_one_form(&w, VarChoice::Smallest);
    let y = integrate_one_form(&w, VarChoice::Largest);
    let cmp = fac.space.order().saturating_sub(1);
    let mut def: f64 = 0.0;
    for (v, wv) in w.iter().enumerate() {
        def = def.max(x.partial(v).sub(wv)?.max_abs_to(cmp));
    }
    Ok((def, x.sub(&y)?.max_abs()))
}

/// `⟨MJ_jM⁻¹, ∂_λ(MJ_kM⁻¹)₊⟩₋₁`.
pub fn second_partial(seq: &VacuumSequence, fac: &Factorization<C64>, j: usize, k: usize) -> Result<Jet<C64>> {
    let qj = fac.dressed_generator(seq, j)?;
    let qk = fac.dressed_generator(seq, k)?.map(|s| s.plus().dlambda());
    jet_pairing(&qj, &qk, -1)
}

/// `⟨MJ_jM⁻¹, ∂_λJ_1⟩₋₁`.
pub fn second_partial_first_flow(seq: &VacuumSequence, fac: &Factorization<C64>, j: usize) -> Result<Jet<C64>> {
    let qj = fac.dressed_generator(seq, j)?;
    let dj1 = Jet::constant(&fac.space, seq.j1_series::<C64>(fac.lo).dlambda());
    jet_pairing(&qj, &dj1, -1)
}

/// Maximum over generator pairs of: jet second derivative vs the residue
/// pairing formula, and the pairing's `(j,k)` asymmetry. Compared up to order `d − 2`.
pub fn second_partial_defects(seq: &VacuumSequence, fac: &Factorization<C64>, x: &Jet<C64>) -> Result<(f64, f64)> {
    let cmp = fac.space.order().saturating_sub(2);
    let nv = seq.generators.len();
    let mut route: f64 = 0.0;
    let mut sym: f64 = 0.0;
    let mut pairs = vec![vec![None; nv]; nv];
    for j in 0..nv {
        for k in 0..nv {
            pairs[j][k] = Some(second_partial(seq, fac, j, k)?);
        }
    }
    for j in 0..nv {
        for k in 0..nv {
            let p = pairs[j][k].as_ref().expect("filled");
            let dd = x.partial(j).partial(k);
            route = route.max(dd.sub(p)?.max_abs_to(cmp));
            sym = sym.max(p.sub(pairs[k][j].as_ref().expect("filled"))?.max_abs_to(cmp));
        }
    }
    Ok((route, sym))
}

/// `⟨MJ_jM⁻¹, ∂_λJ_1⟩₋₁` against `∂_{t_1}∂_{t_j}X` for every `j` (first-flow specialization).
pub fn first_flow_partial_defect(seq: &VacuumSequence, fac: &Factorization<C64>, x: &Jet<C64>) -> Result<f64> {
    let cmp = fac.space.order().saturating_sub(2);
    let xx = dx(seq, x)?;
    let mut worst: f64 = 0.0;
    for j in 0..seq.generators.len() {
        let p = second_partial_first_flow(seq, fac, j)?;
        worst = worst.max(xx.partial(j).sub(&p)?.max_abs_to(cmp));
    }
    Ok(worst)
}

/// Outcome of the AKNS second-partial identities with the detected constant.
#[derive(Clone, Debug)]
pub struct AknsTauIdentities {
    /// `‖X_{11} + qr‖`.
    pub xx_defect: f64,
    /// Candidate constants `κ` in `X_{12} = κ(q_xr − r_xq)` with their defects.
    pub candidates: Vec<(String, f64)>,
    pub detected: Option<String>,
    pub detected_kappa: Option<C64>,
    /// Residual of the consistent first-order system using the detected `κ`.
    pub ode_consistent: Option<f64>,
    /// Residual of the first-order system with the alternative `κ = 1/2` and sign.
    pub ode_alt: Option<f64>,
}

/// `X_{t1t1} = −qr` and the detection of `κ` in `X_{t1t2} = κ(q_{t1}r − r_{t1}q)`,
/// plus the first-order system relating `q, r` to `y₁ = X_{t1t1}`, `y₂ = X_{t1t2}`.
pub fn akns_tau_identities(seq: &VacuumSequence, fac: &Factorization<C64>, x: &Jet<C64>, tol: f64) -> Result<AknsTauIdentities> {
    if seq.family != Family::AknsSl2 {
        return Err(Error::InvalidArgument("AKNS tau identities need the akns_sl2 family".into()));
    }
    let cmp = fac.space.order().saturating_sub(2);
    let u = &fac.u;
    let (q, r) = (u.entry(0, 1), u.entry(1, 0));
    let ux = dx(seq, u)?;
    let (qx, rx) = (ux.entry(0, 1), ux.entry(1, 0));
    let y1 = dx(seq, &dx(seq, x)?)?;
    let xx_defect = y1.add(&q.mul(&r)?)?.max_abs_to(cmp);
    let mut out = AknsTauIdentities { xx_defect, candidates: Vec::new(), detected: None, detected_kappa: None, ode_consistent: None, ode_alt: None };
    let Some(t2) = seq.var_index("t2") else { return Ok(out) };
    let y2 = dx(seq, &x.partial(t2))?;
    let base = qx.mul(&r)?.sub(&rx.mul(&q)?)?;
    let cands = [("1/2", c(0.5, 0.0)), ("-1/2", c(-0.5, 0.0)), ("i/2", c(0.0, 0.5)), ("-i/2", c(0.0, -0.5))];
    for (name, k) in cands {
        let d = y2.sub(&base.scale(k))?.max_abs_to(cmp);
        out.candidates.push((name.to_string(), d));
        if d <= tol && out.detected.is_none() {
            out.detected = Some(name.to_string());
            out.detected_kappa = Some(k);
        }
    }
    // The first-order system needs y₁(0) ≠ 0 and one more derivative.
    let y10 = y1.get(0).copied().unwrap_or(c(0.0, 0.0));
    if y10.norm() < 1e-6 || cmp == 0 {
        return Ok(out);
    }
    let cmp3 = fac.space.order().saturating_sub(3);
    let inv_y1 = y1.inv_with(c(1.0, 0.0) / y10)?;
    let y1p = dx(seq, &y1)?;
    let a = y2.mul(&inv_y1)?; // y₂/y₁
    let b = y1p.mul(&inv_y1)?.scale(c(0.5, 0.0)); // y₁'/(2y₁)
    // Alt: q_x = −(y₂/y₁ + y₁'/(2y₁))q, r_x = (y₂/y₁ − y₁'/(2y₁))r.
    let pq = qx.add(&a.add(&b)?.mul(&q)?)?;
    let pr = rx.sub(&a.sub(&b)?.mul(&r)?)?;
    out.ode_alt = Some(pq.max_abs_to(cmp3).max(pr.max_abs_to(cmp3)));
    if let Some(k) = out.detected_kappa {
        // From y₁ = −qr and y₂ = κ(q_xr − r_xq):
        // q_x = (y₁'/(2y₁) − y₂/(2κy₁))q, r_x = (y₁'/(2y₁) + y₂/(2κy₁))r.
        let s = a.scale(c(1.0, 0.0) / (k * c(2.0, 0.0)));
        let cq = qx.sub(&b.sub(&s)?.mul(&q)?)?;
        let cr = rx.sub(&b.add(&s)?.mul(&r)?)?;
        out.ode_consistent = Some(cq.max_abs_to(cmp3).max(cr.max_abs_to(cmp3)));
    }
    Ok(out)
}

/// gl_n second partials in the first-flow variables against `v_f` and `u_f`.
#[derive(Clone, Debug)]
pub struct GlTauIdentities {
    /// `X_{t_{i,1}t_{k,1}} + v_{ik}v_{ki}`.
    pub vv: f64,
    /// `X_{t_{i,1}t_{k,1}} − u_{ik}u_{ki}/(c_i − c_k)²`, the form implied by `u_ij = −(c_i−c_j)v_ij`.
    pub uu_scaled: f64,
    /// `X_{t_{i,1}t_{k,1}} − (c_i − c_k)²u_{ik}u_{ki}`, an alternative scaling.
    pub uu_alt: f64,
    /// `X_{t_{i,1}t_{k,1}} + v_{ik}²` (meaningful for symmetric `v`).
    pub vsq: f64,
}

pub fn gl_tau_identities(seq: &VacuumSequence, fac: &Factorization<C64>, x: &Jet<C64>) -> Result<GlTauIdentities> {
    if seq.family != Family::GlN {
        return Err(Error::InvalidArgument("gl_n tau identities need the gl_n family".into()));
    }
    let cmp = fac.space.order().saturating_sub(2);
    let v = fac.v_offdiag()?;
    let u = &fac.u;
    let n = seq.n;
    let mut out = GlTauIdentities { vv: 0.0, uu_scaled: 0.0, uu_alt: 0.0, vsq: 0.0 };
    for i in 0..n {
        for k in 0..n {
            if i == k {
                continue;
            }
            let (vi, vk) = (
                seq.diag_var(i + 1, 1).ok_or_else(|| Error::Precondition("gl_n tau identities need t_{k,1}".into()))?,
                seq.diag_var(k + 1, 1).ok_or_else(|| Error::Precondition("gl_n tau identities need t_{k,1}".into()))?,
            );
            let xik = x.partial(vi).partial(vk);
            let vv = v.entry(i, k).mul(&v.entry(k, i))?;
            let uu = u.entry(i, k).mul(&u.entry(k, i))?;
            let dc = seq.a.get(i, i) - seq.a.get(k, k);
            out.vv = out.vv.max(xik.add(&vv)?.max_abs_to(cmp));
            out.uu_scaled = out.uu_scaled.max(xik.sub(&uu.scale(c(1.0, 0.0) / (dc * dc)))?.max_abs_to(cmp));
            out.uu_alt = out.uu_alt.max(xik.sub(&uu.scale(dc * dc))?.max_abs_to(cmp));
            let v2 = v.entry(i, k).mul(&v.entry(i, k))?;
            out.vsq = out.vsq.max(xik.add(&v2)?.max_abs_to(cmp));
        }
    }
    Ok(out)
}

/// `X_{t_1t_1} + r` for the KdV-twisted family (`r = u_{21}`).
pub fn kdv_tau_defect(seq: &VacuumSequence, fac: &Factorization<C64>, x: &Jet<C64>) -> Result<f64> {
    let cmp = fac.space.order().saturating_sub(2);
    let xx = dx(seq, &dx(seq, x)?)?;
    Ok(xx.add(&fac.u.entry(1, 0))?.max_abs_to(cmp))
}

/// The gauge `P = I − ½λ⁻¹e₁₂` with `P(aλ)P⁻¹ = aλ + e₁₂`, `a = diag(1,−1)`.
pub fn kdv_gauge(lo: i32) -> Series<C64> {
    Series::from_terms(2, lo, &[(0, Mat::identity(2)), (-1, Mat::unit(2, 0, 1).scale(c(-0.5, 0.0)))])
}

/// The KdV-twisted data `f` viewed in the AKNS hierarchy with `a = diag(1,−1)`:
/// returns `(‖q − 1‖, ‖r_AKNS − r_KdV‖, ‖X_AKNS − X_KdV‖, ‖X^AKNS_{t1t1} + r‖)`.
pub fn kdv_two_constructions(exps: &[u32], f: &Series<C64>, d: usize) -> Result<(f64, f64, f64, f64)> {
    let kdv = VacuumSequence::kdv_twisted(exps)?;
    let akns = VacuumSequence::akns([c(1.0, 0.0), c(-1.0, 0.0)], exps)?;
    let fk = factorize_jet(&kdv, f, d)?;
    let xk = ln_tau_jet(&kdv, &fk)?;
    let g = f.mul(&kdv_gauge(f.lo()))?;
    let fa = factorize_jet(&akns, &g, d)?;
    let xa = ln_tau_jet(&akns, &fa)?;
    let one = Jet::constant(&fa.space, c(1.0, 0.0));
    let dq = fa.u.entry(0, 1).sub(&one)?.max_abs();
    let dr = fa.u.entry(1, 0).sub(&fk.u.entry(1, 0))?.max_abs();
    let dx_ = xa.sub(&xk)?.max_abs();
    let r = fa.u.entry(1, 0);
    let cmp = fa.space.order().saturating_sub(2);
    let xx = dx(&akns, &dx(&akns, &xa)?)?;
    Ok((dq, dr, dx_, xx.add(&r)?.max_abs_to(cmp)))
}

/// Right translation by the stabilizer: `∂_v(X_{fh} − X_f)` is the constant `⟨J_v, h⁻¹h_λ⟩₋₁`.
/// Returns `(non-constant part, constant mismatch)`.
pub fn tau_shift_defects(seq: &VacuumSequence, f: &Series<C64>, h: &Series<C64>, d: usize) -> Result<(f64, f64)> {
    let a = factorize_jet(seq, f, d)?;
    let b = factorize_jet(seq, &f.mul(h)?, d)?;
    let xa = ln_tau_jet(seq, &a)?;
    let xb = ln_tau_jet(seq, &b)?;
    let diff = xb.sub(&xa)?;
    let hl = h.inv()?.mul(&h.dlambda())?;
    let cmp = a.space.order().saturating_sub(1);
    let mut nonconst: f64 = 0.0;
    let mut mismatch: f64 = 0.0;
    for v in 0..seq.generators.len() {
        let p = diff.partial(v);
        let expected = crate::splitting::pairing(&seq.generator_series(v, f.lo()), &hl, -1)?;
        let c0 = p.get(0).copied().unwrap_or(c(0.0, 0.0));
        mismatch = mismatch.max((c0 - expected).norm());
        let mut rest = p.clone();
        rest.set(0, None);
        nonconst = nonconst.max(rest.max_abs_to(cmp));
    }
    Ok((nonconst, mismatch))
}

/// Conjugation by a constant commuting with `a`: all second partials agree for `f` and `kfk⁻¹`.
pub fn conjugation_tau_defect(seq: &VacuumSequence, f: &Series<C64>, k: &Mat<C64>, d: usize) -> Result<f64> {
    let kinv = k.inverse()?;
    let a = factorize_jet(seq, f, d)?;
    let b = factorize_jet(seq, &f.left_mul_const(k)?.right_mul_const(&kinv)?, d)?;
    let xa = ln_tau_jet(seq, &a)?;
    let xb = ln_tau_jet(seq, &b)?;
    let cmp = a.space.order().saturating_sub(2);
    let nv = seq.generators.len();
    let mut worst: f64 = 0.0;
    for j in 0..nv {
        for l in 0..nv {
            worst = worst.max(xa.partial(j).partial(l).sub(&xb.partial(j).partial(l))?.max_abs_to(cmp));
        }
    }
    Ok(worst)
}

/// Result of the vector AKNS recovery construction.
#[derive(Clone, Debug)]
pub enum Recovery {
    Degenerate(String),
    Checked {
        /// `‖q^{(m)} − WS‖` and the mirrored `r` relation.
        q_residual: f64,
        r_residual: f64,
        /// Entries of `C`, `b` (both mirrors) at `t = 0`.
        invariants: Vec<C64>,
    },
}

fn pad_rows(m: usize, rows: &[Jet<C64>], sp: &std::sync::Arc<crate::jet::JetSpace>) -> Result<Jet<Mat<C64>>> {
    // rows[i*m + j] is entry (i, j)
    let mut out: Jet<Mat<C64>> = Jet::zero(sp);
    for idx in 0..sp.len() {
        let mut mat = Mat::zeros(m);
        let mut any = false;
        for (p, r) in rows.iter().enumerate() {
            if let Some(z) = r.get(idx) {
                mat.set(p / m, p % m, *z);
                any = true;
            }
        }
        if any {
            out.set(idx, Some(mat));
        }
    }
    Ok(out)
}

/// Builds `S` (rows `x^{(i)}`), `R` (columns `y^{(j)}`), `C = SR`, `b = x^{(m)}R`,
/// `W = bC⁻¹` and returns `(‖x^{(m)} − WS‖, entries of C and b at t = 0)`.
fn recover_one(m: usize, xs: &[Vec<Jet<C64>>], ys: &[Vec<Jet<C64>>], cmp: usize) -> Result<(f64, Vec<C64>)> {
    let sp = xs[0][0].space().clone();
    let s_rows: Vec<Jet<C64>> = (0..m).flat_map(|i| xs[i].clone()).collect();
    let s = pad_rows(m, &s_rows, &sp)?;
    // R has columns y^{(j)}: entry (k, j) = y^{(j)}_k.
    let r_rows: Vec<Jet<C64>> = (0..m).flat_map(|k| (0..m).map(move |j| (k, j))).map(|(k, j)| ys[j][k].clone()).collect();
    let r = pad_rows(m, &r_rows, &sp)?;
    let cm = s.mul(&r)?;
    let c0 = cm.get(0).cloned().ok_or(Error::Singular)?;
    let c0inv = c0.inverse()?;
    let cinv = cm.inv_with(c0inv)?;
    let mut b_rows: Vec<Jet<C64>> = xs[m].clone();
    b_rows.extend((m..m * m).map(|_| Jet::zero(&sp)));
    let b = pad_rows(m, &b_rows, &sp)?.mul(&r)?;
    let w = b.mul(&cinv)?;
    let ws = w.mul(&s)?;
    let mut res: f64 = 0.0;
    for k in 0..m {
        res = res.max(ws.entry(0, k).sub(&xs[m][k])?.max_abs_to(cmp));
    }
    let mut inv = c0.data.clone();
    if let Some(b0) = b.get(0) {
        inv.extend((0..m).map(|k| b0.get(0, k)));
    }
    Ok((res, inv))
}

/// Constructive recovery of `q` from tau data for vector AKNS on `gl(m+1)`.
pub fn vector_akns_recovery(seq: &VacuumSequence, fac: &Factorization<C64>) -> Result<Recovery> {
    if seq.family != Family::VectorAkns {
        return Err(Error::InvalidArgument("recovery needs the vector_akns family".into()));
    }
    let m = seq.n - 1;
    let d = fac.space.order();
    if d < m + 1 {
        return Err(Error::Precondition(format!("recovery needs jet order >= {}", m + 1)));
    }
    let mut derivs = vec![fac.u.clone()];
    for _ in 0..m {
        let next = dx(seq, derivs.last().expect("nonempty"))?;
        derivs.push(next);
    }
    // q^{(i)} as a list of m entries (top-right block), r^{(i)} likewise.
    let qs: Vec<Vec<Jet<C64>>> = derivs.iter().map(|x| (0..m).map(|k| x.entry(k, m)).collect()).collect();
    let rs: Vec<Vec<Jet<C64>>> = derivs.iter().map(|x| (0..m).map(|k| x.entry(m, k)).collect()).collect();
    let cmp = d - m;
    let (qr, mut inv) = match recover_one(m, &qs, &rs, cmp) {
        Ok(x) => x,
        Err(Error::Singular) => return Ok(Recovery::Degenerate("S·R is singular (degenerate u)".into())),
        Err(e) => return Err(e),
    };
    let (rr, inv2) = match recover_one(m, &rs, &qs, cmp) {
        Ok(x) => x,
        Err(Error::Singular) => return Ok(Recovery::Degenerate("mirrored S·R is singular (degenerate u)".into())),
        Err(e) => return Err(e),
    };
    inv.extend(inv2);
    Ok(Recovery::Checked { q_residual: qr, r_residual: rr, invariants: inv })
}

/// `ξ_j = tr(u·a^j·u^{(j)})` for `j = 0..=jmax` (x-derivatives).
pub fn xi_helpers(seq: &VacuumSequence, u: &Jet<Mat<C64>>, jmax: usize) -> Result<Vec<Jet<C64>>> {
    let mut out = Vec::new();
    let mut deriv = u.clone();
    let mut apow = Mat::identity(seq.n);
    for j in 0..=jmax {
        if j > 0 {
            deriv = dx(seq, &deriv)?;
            apow = apow.mul(&seq.a)?;
        }
        let prod = u.try_map(|m| m.mul(&apow))?.mul(&deriv)?;
        out.push(prod.map(|m| m.trace()));
    }
    Ok(out)
}

/// `tr(u^{(i)}u^{(j)}) − (r^{(j)}q^{(i)} + r^{(i)}q^{(j)})` over `i, j ≤ jmax`.
pub fn trace_pairing_defect(seq: &VacuumSequence, u: &Jet<Mat<C64>>, jmax: usize) -> Result<f64> {
    let m = seq.n - 1;
    let mut derivs = vec![u.clone()];
    for _ in 0..jmax {
        let next = dx(seq, derivs.last().expect("nonempty"))?;
        derivs.push(next);
    }
    let dot = |x: &Jet<Mat<C64>>, y: &Jet<Mat<C64>>| -> Result<Jet<C64>> {
        let mut acc: Jet<C64> = Jet::zero(u.space());
        for k in 0..m {
            acc = acc.add(&y.entry(m, k).mul(&x.entry(k, m))?)?;
        }
        Ok(acc)
    };
    let cmp = u.space().order().saturating_sub(jmax);
    let mut worst: f64 = 0.0;
    for i in 0..=jmax {
        for j in 0..=jmax {
            let tr = derivs[i].mul(&derivs[j])?.map(|x| x.trace());
            let rhs = dot(&derivs[i], &derivs[j])?.add(&dot(&derivs[j], &derivs[i])?)?;
            worst = worst.max(tr.sub(&rhs)?.max_abs_to(cmp));
        }
    }
    Ok(worst)
}

/// `tr(v·a·v)` for the off-diagonal part `v = u`; vanishes for the vector AKNS grading.
pub fn trace_vav(seq: &VacuumSequence, u: &Jet<Mat<C64>>) -> Result<f64> {
    let av = u.try_map(|m| seq.a.mul(m))?;
    Ok(u.mul(&av)?.map(|m| m.trace()).max_abs())
}

/// Largest change of the recovery invariants (entries of `C` and `b` at
/// `t = 0`) under `f ↦ kfk⁻¹` for `k` commuting with `a`. `None` when either
/// side is degenerate.
pub fn recovery_k_invariance(seq: &VacuumSequence, f: &Series<C64>, k: &Mat<C64>, d: usize) -> Result<Option<f64>> {
    if seq.a.mul(k)?.sub(&k.mul(&seq.a)?)?.max_abs() > 1e-12 {
        return Err(Error::Precondition("k must commute with a".into()));
    }
    let kf = f.left_mul_const(k)?.right_mul_const(&k.inverse()?)?;
    let base = vector_akns_recovery(seq, &factorize_jet(seq, f, d)?)?;
    let moved = vector_akns_recovery(seq, &factorize_jet(seq, &kf, d)?)?;
    match (base, moved) {
        (Recovery::Checked { invariants: a, .. }, Recovery::Checked { invariants: b, .. }) => {
            Ok(Some(a.iter().zip(&b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)))
        }
        _ => Ok(None),
    }
}

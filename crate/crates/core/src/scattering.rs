//! Order-by-order Birkhoff factorization `V(t)f⁻¹ = M(t)⁻¹E(t)` on jets and
//! the properties of the map from scattering data to solutions.

use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::hierarchy::{dx, vacuum_frame, Family, VacuumSequence};
use crate::jet::{Jet, JetSpace};
use crate::matrix::Mat;
use crate::scalar::{Scalar, C64};
use crate::series::Series;
use crate::splitting::{SplittingSpec, Variant};

/// Which variable drives the recursion for a multi-index.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VarChoice {
    Smallest,
    Largest,
}

#[derive(Clone, Debug)]
pub struct Factorization<S: Scalar> {
    pub space: Arc<JetSpace>,
    pub lo: i32,
    pub f: Series<S>,
    pub finv: Series<S>,
    /// Reduced frame, `M(0) = f`.
    pub m: Jet<Series<S>>,
    pub minv: Jet<Series<S>>,
    /// Frame, `E(0) = I`.
    pub e: Jet<Series<S>>,
    /// `u_f = (MJ_1M⁻¹)₊ − J_1`.
    pub u: Jet<Mat<S>>,
}

/// Reject data outside `L₋`: positive degrees or `f(∞) ≠ I`.
pub fn check_negative_loop<S: Scalar>(f: &Series<S>) -> Result<()> {
    if f.top_degree().is_some_and(|t| t > 0) {
        return Err(Error::Precondition("scattering data has positive λ-degrees".into()));
    }
    let d = f.coeff(0)?.sub(&Mat::identity(f.n()))?.max_abs();
    if d > 1e-12 {
        return Err(Error::Precondition(format!("scattering data is not I at λ = ∞ (defect {d:e})")));
    }
    Ok(())
}

/// Factorize to jet order `d` using the smallest admissible variable.
pub fn factorize_jet<S: Scalar>(seq: &VacuumSequence, f: &Series<S>, d: usize) -> Result<Factorization<S>> {
    factorize_with(seq, f, d, VarChoice::Smallest)
}

pub fn factorize_with<S: Scalar>(seq: &VacuumSequence, f: &Series<S>, d: usize, choice: VarChoice) -> Result<Factorization<S>> {
    if f.n() != seq.n {
        return Err(Error::DimensionMismatch(f.n(), seq.n));
    }
    check_negative_loop(f)?;
    let space = seq.space(d);
    let lo = f.lo();
    let finv = f.inv().map_err(|e| e.at("f inverse"))?;
    let (m, minv) = reduced_frame(seq, &space, f, &finv, choice).map_err(|e| e.at("reduced frame"))?;
    let v = vacuum_frame::<S>(seq, &space, lo)?;
    let finv_jet = Jet::constant(&space, finv.clone());
    let full = m.mul(&v)?.mul(&finv_jet).map_err(|e| e.at("frame product"))?;
    let e = full.map(|s| s.plus());
    let u = formal_solution(seq, &m, &minv, lo).map_err(|e| e.at("formal solution"))?;
    Ok(Factorization { space, lo, f: f.clone(), finv, m, minv, e, u })
}

fn reduced_frame<S: Scalar>(
    seq: &VacuumSequence,
    space: &Arc<JetSpace>,
    f: &Series<S>,
    finv: &Series<S>,
    choice: VarChoice,
) -> Result<(Jet<Series<S>>, Jet<Series<S>>)> {
    let lo = f.lo();
    let len = space.len();
    let js: Vec<Series<S>> = (0..seq.generators.len()).map(|v| seq.generator_series(v, lo)).collect();
    let mut m: Vec<Option<Series<S>>> = vec![None; len];
    let mut mi: Vec<Option<Series<S>>> = vec![None; len];
    m[0] = Some(f.clone());
    mi[0] = Some(finv.clone());
    // R_v[β] = −π₋(Σ M[β1]·J_v·M⁻¹[β2]), filled lazily.
    let mut r_cache: HashMap<(usize, usize), Option<Series<S>>> = HashMap::new();
    for k in 1..=space.order() {
        for g in space.range(k) {
            let e = space.exps(g);
            let v = match choice {
                VarChoice::Smallest => e.iter().position(|&x| x > 0),
                VarChoice::Largest => e.iter().rposition(|&x| x > 0),
            }
            .expect("nonzero multi-index");
            let beta = space.pred(g, v).expect("predecessor exists");
            let mut acc: Option<Series<S>> = None;
            for &(b1, b2) in space.pairs(beta) {
                let Some(mb2) = &m[b2] else { continue };
                let key = (v, b1);
                if let std::collections::hash_map::Entry::Vacant(e) = r_cache.entry(key) {
                    let rv = r_coeff(space, &m, &mi, &js[v], b1)?;
                    e.insert(rv);
                }
                if let Some(rv) = &r_cache[&key] {
                    let p = rv.mul(mb2)?;
                    acc = Some(match acc {
                        Some(a) => a.add(&p)?,
                        None => p,
                    });
                }
            }
            m[g] = acc.map(|a| a.scale(S::from_f64(1.0 / e[v] as f64)));
            // M⁻¹_α = −f⁻¹·Σ_{α1 ≠ 0} M_{α1}·M⁻¹_{α−α1}
            let mut sum: Option<Series<S>> = None;
            for &(a1, a2) in space.pairs(g) {
                if a1 == 0 {
                    continue;
                }
                if let (Some(x), Some(y)) = (&m[a1], &mi[a2]) {
                    let p = x.mul(y)?;
                    sum = Some(match sum {
                        Some(s) => s.add(&p)?,
                        None => p,
                    });
                }
            }
            mi[g] = match sum {
                Some(s) => Some(finv.mul(&s)?.neg()),
                None => None,
            };
        }
    }
    Ok((Jet::from_coeffs(space, m), Jet::from_coeffs(space, mi)))
}

fn r_coeff<S: Scalar>(
    space: &Arc<JetSpace>,
    m: &[Option<Series<S>>],
    mi: &[Option<Series<S>>],
    j: &Series<S>,
    beta: usize,
) -> Result<Option<Series<S>>> {
    let mut acc: Option<Series<S>> = None;
    for &(b1, b2) in space.pairs(beta) {
        if let (Some(x), Some(y)) = (&m[b1], &mi[b2]) {
            let p = x.mul(j)?.mul(y)?;
            acc = Some(match acc {
                Some(a) => a.add(&p)?,
                None => p,
            });
        }
    }
    Ok(acc.map(|a| a.minus().neg()))
}

/// `MXM⁻¹` for a jet-constant series `X`.
pub fn conjugate<S: Scalar>(m: &Jet<Series<S>>, minv: &Jet<Series<S>>, x: &Series<S>) -> Result<Jet<Series<S>>> {
    let xm = m.try_map(|s| s.mul(x))?;
    xm.mul(minv)
}

fn formal_solution<S: Scalar>(seq: &VacuumSequence, m: &Jet<Series<S>>, minv: &Jet<Series<S>>, lo: i32) -> Result<Jet<Mat<S>>> {
    let q = conjugate(m, minv, &seq.j1_series(lo))?;
    let j10: Mat<S> = seq.j1.iter().find(|t| t.0 == 0).map(|t| Mat::lift(&t.1)).unwrap_or_else(|| Mat::zeros(seq.n));
    let mut u = q.lambda_coeff(0)?;
    if let Some(c0) = u.get(0).cloned() {
        u.set(0, Some(c0.sub(&j10)?));
    }
    Ok(u)
}

impl<S: Scalar> Factorization<S> {
    /// `MJ_vM⁻¹`.
    pub fn dressed_generator(&self, seq: &VacuumSequence, v: usize) -> Result<Jet<Series<S>>> {
        conjugate(&self.m, &self.minv, &seq.generator_series(v, self.lo))
    }

    /// `MJ_1M⁻¹`.
    pub fn dressed_j1(&self, seq: &VacuumSequence) -> Result<Jet<Series<S>>> {
        conjugate(&self.m, &self.minv, &seq.j1_series(self.lo))
    }

    /// gl_n: `v_f = π₁(m₋₁)`, the off-diagonal part of the `λ⁻¹` coefficient of `M`.
    pub fn v_offdiag(&self) -> Result<Jet<Mat<S>>> {
        let m1 = self.m.lambda_coeff(-1)?;
        Ok(m1.map(|x| {
            let mut y = x.clone();
            for i in 0..y.n {
                y.set(i, i, S::zero());
            }
            y
        }))
    }
}

/// `‖M⁻¹E − Vf⁻¹‖` over jet coefficients and trusted degrees.
pub fn factorization_defect(seq: &VacuumSequence, fac: &Factorization<C64>) -> Result<f64> {
    let v = vacuum_frame::<C64>(seq, &fac.space, fac.lo)?;
    let lhs = fac.minv.mul(&fac.e)?;
    let rhs = v.mul(&Jet::constant(&fac.space, fac.finv.clone()))?;
    Ok(lhs.sub(&rhs)?.max_abs())
}

/// Largest negative-degree part of `MVf⁻¹` (zero when `E ∈ L₊`).
pub fn frame_negative_defect(seq: &VacuumSequence, fac: &Factorization<C64>) -> Result<f64> {
    let v = vacuum_frame::<C64>(seq, &fac.space, fac.lo)?;
    let full = fac.m.mul(&v)?.mul(&Jet::constant(&fac.space, fac.finv.clone()))?;
    Ok(full.map(|s| s.minus()).max_abs())
}

/// Residuals of `[∂_x − (J_1 + u), MJ_1M⁻¹]` and `[∂_x + J_1 + u, MJ_1M⁻¹]`,
/// compared up to jet order `d − 1`.
pub fn lax_residuals(seq: &VacuumSequence, fac: &Factorization<C64>) -> Result<(f64, f64)> {
    let q = fac.dressed_j1(seq)?;
    let lo = fac.lo;
    let mut ju = fac.u.map(|m| Series::constant(m, lo));
    let j1 = seq.j1_series::<C64>(lo);
    let c0 = ju.get(0).cloned().unwrap_or_else(|| Series::zero(seq.n, lo)).add(&j1)?;
    ju.set(0, Some(c0));
    let qx = dx(seq, &q)?;
    let comm = ju.mul(&q)?.sub(&q.mul(&ju)?)?;
    let cmp = fac.space.order().saturating_sub(1);
    Ok((qx.sub(&comm)?.max_abs_to(cmp), qx.add(&comm)?.max_abs_to(cmp)))
}

/// `∂_vE − (MJ_vM⁻¹)₊E` for every generator, up to order `d − 1`.
pub fn frame_ode_defect(seq: &VacuumSequence, fac: &Factorization<C64>) -> Result<f64> {
    let cmp = fac.space.order().saturating_sub(1);
    let mut worst: f64 = 0.0;
    for v in 0..seq.generators.len() {
        let qp = fac.dressed_generator(seq, v)?.map(|s| s.plus());
        let r = fac.e.partial(v).sub(&qp.mul(&fac.e)?)?;
        worst = worst.max(r.max_abs_to(cmp));
    }
    Ok(worst)
}

/// `∂_{t_v}u − (degree-0 part of [∂_x − (J_1+u), (MJ_vM⁻¹)₊])` for every
/// generator, up to order `d − 1`.
pub fn flow_consistency_defect(seq: &VacuumSequence, fac: &Factorization<C64>) -> Result<f64> {
    let cmp = fac.space.order().saturating_sub(1);
    let mut worst: f64 = 0.0;
    for v in 0..seq.generators.len() {
        let qp = fac.dressed_generator(seq, v)?.map(|s| s.plus());
        let rhs = crate::hierarchy::flow_rhs(seq, &fac.u, &qp, fac.lo)?;
        let r0 = rhs.lambda_coeff(0)?;
        let other = rhs.map(|s| s.map_with_degree(|d, m| if d == 0 { Mat::zeros(m.n) } else { m.clone() }));
        worst = worst.max(fac.u.partial(v).sub(&r0)?.max_abs_to(cmp)).max(other.max_abs_to(cmp));
    }
    Ok(worst)
}

/// Largest coefficient difference between the two recursion orders.
pub fn recursion_consistency(seq: &VacuumSequence, f: &Series<C64>, d: usize) -> Result<f64> {
    let a = factorize_with(seq, f, d, VarChoice::Smallest)?;
    let b = factorize_with(seq, f, d, VarChoice::Largest)?;
    Ok(a.m.sub(&b.m)?.max_abs())
}

/// Right translation by the stabilizer: for `h ∈ L₋` commuting with `J_1`, returns
/// `(‖u_{fh} − u_f‖, ‖M_{fh} − M_f h‖)`.
pub fn stabilizer_defects(seq: &VacuumSequence, f: &Series<C64>, h: &Series<C64>, d: usize) -> Result<(f64, f64)> {
    let lo = f.lo();
    let comm = h.commutator(&seq.j1_series(lo))?.max_abs();
    if comm > 1e-12 {
        return Err(Error::Precondition(format!("h does not commute with J_1 (defect {comm:e})")));
    }
    let a = factorize_jet(seq, f, d)?;
    let fh = f.mul(h)?;
    let b = factorize_jet(seq, &fh, d)?;
    let du = b.u.sub(&a.u)?.max_abs();
    let mh = a.m.try_map(|s| s.mul(h))?;
    let dm = b.m.sub(&mh)?.max_abs();
    Ok((du, dm))
}

/// Constant `k` commuting with `a`: `(‖u_{kfk⁻¹} − ku_fk⁻¹‖, ‖M̃ − kMk⁻¹‖, ‖Ẽ − kEk⁻¹‖)`.
pub fn conjugation_defects(seq: &VacuumSequence, f: &Series<C64>, k: &Mat<C64>, d: usize) -> Result<(f64, f64, f64)> {
    let comm = k.commutator(&seq.a)?.max_abs();
    if comm > 1e-12 {
        return Err(Error::Precondition(format!("k does not commute with a (defect {comm:e})")));
    }
    let kinv = k.inverse()?;
    let a = factorize_jet(seq, f, d)?;
    let g = f.left_mul_const(k)?.right_mul_const(&kinv)?;
    let b = factorize_jet(seq, &g, d)?;
    let ku = a.u.try_map(|m| k.mul(m)?.mul(&kinv))?;
    let conj = |x: &Jet<Series<C64>>| x.try_map(|s| s.left_mul_const(k)?.right_mul_const(&kinv));
    Ok((
        b.u.sub(&ku)?.max_abs(),
        b.m.sub(&conj(&a.m)?)?.max_abs(),
        b.e.sub(&conj(&a.e)?)?.max_abs(),
    ))
}

/// Shape defect of `u_f` (or `v_f`) for the real form selected by `spec`.
pub fn reality_propagation_defect(spec: &SplittingSpec, seq: &VacuumSequence, fac: &Factorization<C64>) -> Result<f64> {
    let u = &fac.u;
    let mut worst: f64 = 0.0;
    let conj_jet = |x: &Jet<Mat<C64>>| x.map(|m| m.conj());
    match spec.variant {
        Variant::Standard => {}
        Variant::URealForm => {
            // τ(u) = u; with τ(X) = −X̄ᵗ this is r = −q̄ᵗ for the AKNS families.
            let t = u.map(|m| spec.tau_alg(m));
            worst = worst.max(u.sub(&t)?.max_abs());
        }
        Variant::SigmaTwisted | Variant::TauSigma => {
            if seq.family == Family::GlN {
                let v = fac.v_offdiag()?;
                worst = worst.max(v.sub(&v.map(|m| m.transpose()))?.max_abs());
                if spec.variant == Variant::TauSigma {
                    worst = worst.max(v.sub(&conj_jet(&v))?.max_abs());
                }
            } else {
                let s = u.map(|m| spec.sigma_alg(m));
                worst = worst.max(u.sub(&s)?.max_abs());
                if spec.variant == Variant::TauSigma {
                    let t = u.map(|m| spec.tau_alg(m));
                    worst = worst.max(u.sub(&t)?.max_abs());
                }
            }
        }
        Variant::KdvTwisted => {
            for m in u.coeffs().iter().flatten() {
                worst = worst.max(m.get(0, 0).norm()).max(m.get(0, 1).norm()).max(m.get(1, 1).norm());
            }
        }
    }
    Ok(worst)
}

/// Run the gl_n pipeline in power and diagonal coordinates and compare `u_f`
/// after the linear change of jet variables.
pub fn gl_coordinate_defect(cs: &[C64], exps: &[u32], f: &Series<C64>, d: usize) -> Result<f64> {
    let diag = VacuumSequence::gl_n(cs, exps)?;
    let power = VacuumSequence::gl_n_power(cs, exps)?;
    let fd = factorize_jet(&diag, f, d)?;
    let fp = factorize_jet(&power, f, d)?;
    let lin = diag.gl_power_to_diag(&power);
    let moved = fd.u.substitute_linear(&fp.space, &lin)?;
    Ok(moved.sub(&fp.u)?.max_abs())
}

/// Cross-checks of the AKNS `Q`-series `MJ_1M⁻¹` against the algebraic
/// recursion and the closed forms of its first coefficients.
#[derive(Clone, Debug, Default, serde::Serialize)]
pub struct QSeriesChecks {
    /// `Q_{−j}` from the recursion vs the `λ^{−j}` coefficient of `MJ_1M⁻¹`, compared up to order `d − j`.
    pub recursion: f64,
    /// `Q_{−1} = (a/2)(−u_x + u²)`.
    pub q_m1: f64,
    /// `Q_{−2} = −¼u_xx + ½u³ − ¼(uu_x − u_xu)`.
    pub q_m2: f64,
    /// `Q² + λ²I`.
    pub square: f64,
    /// 2×2 only: `Q_{−1} = (i/2)[[qr, −q_x], [r_x, −qr]]` and the matching `Q_{−2}` table.
    pub sl2_tables: Option<f64>,
}

pub fn q_series_checks(seq: &VacuumSequence, fac: &Factorization<C64>, depth: usize) -> Result<QSeriesChecks> {
    use crate::scalar::c;
    let rec = crate::hierarchy::q_recursion_vector_akns(seq, &fac.u, depth)?;
    let q = fac.dressed_j1(seq)?;
    let d = fac.space.order();
    let mut out = QSeriesChecks::default();
    for (j, qj) in rec.q.iter().enumerate() {
        let diff = q.lambda_coeff(-(j as i32))?.sub(qj)?;
        out.recursion = out.recursion.max(diff.max_abs_to(d.saturating_sub(j)));
    }
    let u = &fac.u;
    let ux = dx(seq, u)?;
    let uxx = dx(seq, &ux)?;
    let a = seq.a.clone();
    let half = c(0.5, 0.0);
    let qm1 = ux.neg().add(&u.mul(u)?)?.map(|m| a.mul(m).expect("dims").scale(half));
    out.q_m1 = q.lambda_coeff(-1)?.sub(&qm1)?.max_abs_to(d.saturating_sub(1));
    let u3 = u.mul(u)?.mul(u)?;
    let qm2 = uxx
        .scale(c(-0.25, 0.0))
        .add(&u3.scale(half))?
        .sub(&u.mul(&ux)?.sub(&ux.mul(u)?)?.scale(c(0.25, 0.0)))?;
    out.q_m2 = q.lambda_coeff(-2)?.sub(&qm2)?.max_abs_to(d.saturating_sub(2));
    let lam2 = Jet::constant(&fac.space, Series::monomial(&Mat::identity(seq.n), 2, fac.lo));
    out.square = q.mul(&q)?.add(&lam2)?.max_abs();
    if seq.n == 2 {
        let e = |m: &Jet<Mat<C64>>, i, j| m.entry(i, j);
        let (qq, r) = (e(u, 0, 1), e(u, 1, 0));
        let (qx, rx) = (e(&ux, 0, 1), e(&ux, 1, 0));
        let (qxx, rxx) = (e(&uxx, 0, 1), e(&uxx, 1, 0));
        let qr = qq.mul(&r)?;
        let hi = c(0.0, 0.5);
        let c1 = q.lambda_coeff(-1)?;
        let t1 = [
            (0, 0, qr.scale(hi)),
            (0, 1, qx.scale(-hi)),
            (1, 0, rx.scale(hi)),
            (1, 1, qr.scale(-hi)),
        ];
        let mut worst: f64 = 0.0;
        for (i, j, want) in t1 {
            worst = worst.max(c1.entry(i, j).sub(&want)?.max_abs_to(d.saturating_sub(1)));
        }
        let c2 = q.lambda_coeff(-2)?;
        let quarter = c(0.25, 0.0);
        let diag = qx.mul(&r)?.sub(&qq.mul(&rx)?)?.scale(quarter);
        let two = c(2.0, 0.0);
        let t2 = [
            (0, 0, diag.clone()),
            (0, 1, qxx.neg().add(&qq.mul(&qr)?.scale(two))?.scale(quarter)),
            (1, 0, rxx.neg().add(&qr.mul(&r)?.scale(two))?.scale(quarter)),
            (1, 1, diag.neg()),
        ];
        for (i, j, want) in t2 {
            worst = worst.max(c2.entry(i, j).sub(&want)?.max_abs_to(d.saturating_sub(2)));
        }
        out.sl2_tables = Some(worst);
    }
    Ok(out)
}

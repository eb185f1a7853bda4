//! Vacuum sequences, vacuum frames, flow right-hand sides, the vector AKNS
//! `Q(u)` recursion and closed-form named flows.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jet::{Jet, JetSpace};
use crate::matrix::Mat;
use crate::scalar::{c, Scalar, C64, I};
use crate::series::Series;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    AknsSl2,
    VectorAkns,
    GlN,
    KdvTwisted,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::AknsSl2 => "akns_sl2",
            Family::VectorAkns => "vector_akns",
            Family::GlN => "gl_n",
            Family::KdvTwisted => "kdv_twisted",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "akns_sl2" | "akns" => Family::AknsSl2,
            "vector_akns" => Family::VectorAkns,
            "gl_n" => Family::GlN,
            "kdv_twisted" | "kdv" => Family::KdvTwisted,
            other => return Err(Error::InvalidArgument(format!("unknown family {other:?}"))),
        })
    }
}

/// How a generator relates to the first one.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Label {
    /// `J_1·λ^{j−1}` (or `J^j` for the KdV-twisted family).
    Power(u32),
    /// `e_kk·λ^j` in the diagonal coordinates (1-based `k`).
    Diag { k: usize, j: u32 },
    /// `a^i·λ^j` in the power coordinates.
    APower { i: usize, j: u32 },
}

#[derive(Clone, Debug)]
pub struct Generator {
    pub name: String,
    pub label: Label,
    /// Exact polynomial `(degree, coefficient)` terms.
    pub terms: Vec<(i32, Mat<C64>)>,
}

impl Generator {
    pub fn top_degree(&self) -> i32 {
        self.terms.iter().map(|t| t.0).max().unwrap_or(0)
    }

    pub fn series<S: Scalar>(&self, n: usize, lo: i32) -> Series<S> {
        let terms: Vec<(i32, Mat<S>)> = self.terms.iter().map(|(d, m)| (*d, Mat::lift(m))).collect();
        Series::from_terms(n, lo, &terms)
    }
}

#[derive(Clone, Debug)]
pub struct VacuumSequence {
    pub family: Family,
    pub n: usize,
    pub a: Mat<C64>,
    pub generators: Vec<Generator>,
    /// `J_1`, which need not itself be a generator (diagonal coordinates).
    pub j1: Vec<(i32, Mat<C64>)>,
    /// `∂_x = Σ_v x_dir[v]·∂_{t_v}`.
    pub x_dir: Vec<C64>,
}

/// Storage window for series: `lo = −2(d·j_max + 4)`, `hi = d·j_max + 2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    pub lo: i32,
    pub hi: i32,
}

impl Window {
    pub fn for_order(jmax: i32, d: usize) -> Self {
        let top = d as i32 * jmax;
        Window { lo: -2 * (top + 4), hi: top + 2 }
    }
}

fn check_exps(exps: &[u32]) -> Result<Vec<u32>> {
    if !exps.contains(&1) {
        return Err(Error::InvalidArgument("the exponent list must contain 1 (the x-flow)".into()));
    }
    let mut sorted = exps.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    Ok(sorted)
}

fn power_sequence(family: Family, a: Mat<C64>, j1: Vec<(i32, Mat<C64>)>, exps: &[u32], gen: impl Fn(u32) -> Vec<(i32, Mat<C64>)>) -> Result<VacuumSequence> {
    let sorted = check_exps(exps)?;
    let generators: Vec<Generator> =
        sorted.iter().map(|&j| Generator { name: format!("t{j}"), label: Label::Power(j), terms: gen(j) }).collect();
    let mut x_dir = vec![c(0.0, 0.0); generators.len()];
    x_dir[0] = c(1.0, 0.0);
    Ok(VacuumSequence { family, n: a.n, a, generators, j1, x_dir })
}

impl VacuumSequence {
    /// 2×2 AKNS with `J_j = aλ^j`.
    pub fn akns(a_diag: [C64; 2], exps: &[u32]) -> Result<Self> {
        let a = Mat::diag(&a_diag);
        let j1 = vec![(1, a.clone())];
        let aa = a.clone();
        power_sequence(Family::AknsSl2, a, j1, exps, move |j| vec![(j as i32, aa.clone())])
    }

    /// Vector AKNS on `gl(m+1)` with `a = diag(i·I_m, −i)` and `J_j = aλ^j`.
    pub fn vector_akns(m: usize, exps: &[u32]) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidArgument("vector AKNS needs m >= 1".into()));
        }
        let mut d = vec![I; m];
        d.push(-I);
        let a = Mat::diag(&d);
        let j1 = vec![(1, a.clone())];
        let aa = a.clone();
        power_sequence(Family::VectorAkns, a, j1, exps, move |j| vec![(j as i32, aa.clone())])
    }

    /// KdV-twisted: `J = aλ + e₁₂` with `a = diag(1,−1)`; generators `J^e` for odd `e`.
    pub fn kdv_twisted(exps: &[u32]) -> Result<Self> {
        if exps.iter().any(|e| e % 2 == 0) {
            return Err(Error::InvalidArgument("kdv_twisted generators are odd powers of J".into()));
        }
        let a = Mat::diag(&[c(1.0, 0.0), c(-1.0, 0.0)]);
        let e12 = Mat::unit(2, 0, 1);
        let j1 = vec![(1, a.clone()), (0, e12.clone())];
        // J² = λ²I, so J^e = λ^{e−1}J.
        power_sequence(Family::KdvTwisted, a.clone(), j1, exps, move |e| {
            vec![(e as i32, a.clone()), (e as i32 - 1, e12.clone())]
        })
    }

    /// `gl(n)` in diagonal coordinates `t_{k,j}` with generators `e_kk·λ^j`
    /// for the listed exponents (which must include 1).
    pub fn gl_n(cs: &[C64], exps: &[u32]) -> Result<Self> {
        let n = check_distinct(cs)?;
        let exps = check_exps(exps)?;
        let a = Mat::diag(cs);
        let mut generators = Vec::new();
        let mut x_dir = Vec::new();
        for &j in &exps {
            for k in 1..=n {
                generators.push(Generator {
                    name: format!("t{k},{j}"),
                    label: Label::Diag { k, j },
                    terms: vec![(j as i32, Mat::unit(n, k - 1, k - 1))],
                });
                x_dir.push(if j == 1 { cs[k - 1] } else { c(0.0, 0.0) });
            }
        }
        Ok(VacuumSequence { family: Family::GlN, n, a: a.clone(), generators, j1: vec![(1, a)], x_dir })
    }

    /// `gl(n)` in power coordinates `s_{i,j}` with generators `a^i·λ^j`.
    pub fn gl_n_power(cs: &[C64], exps: &[u32]) -> Result<Self> {
        let n = check_distinct(cs)?;
        let exps = check_exps(exps)?;
        let a = Mat::diag(cs);
        let mut generators = Vec::new();
        let mut x_dir = Vec::new();
        for &j in &exps {
            let mut p = Mat::identity(n);
            for i in 1..=n {
                p = p.mul(&a)?;
                generators.push(Generator { name: format!("s{i},{j}"), label: Label::APower { i, j }, terms: vec![(j as i32, p.clone())] });
                x_dir.push(if i == 1 && j == 1 { c(1.0, 0.0) } else { c(0.0, 0.0) });
            }
        }
        Ok(VacuumSequence { family: Family::GlN, n, a: a.clone(), generators, j1: vec![(1, a)], x_dir })
    }

    /// Linear map `t_{k,j} = Σ_i s_{i,j}c_k^i` from power to diagonal coordinates,
    /// as rows over the power-coordinate variables.
    pub fn gl_power_to_diag(&self, power: &VacuumSequence) -> Vec<Vec<C64>> {
        let cs: Vec<C64> = (0..self.n).map(|i| self.a.get(i, i)).collect();
        self.generators
            .iter()
            .map(|g| {
                let Label::Diag { k, j } = g.label else { unreachable!("diagonal coordinates expected") };
                power
                    .generators
                    .iter()
                    .map(|h| match h.label {
                        Label::APower { i, j: jj } if jj == j => cs[k - 1].powu(i as u32),
                        _ => c(0.0, 0.0),
                    })
                    .collect()
            })
            .collect()
    }

    pub fn var_names(&self) -> Vec<String> {
        self.generators.iter().map(|g| g.name.clone()).collect()
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.generators.iter().position(|g| g.name == name)
    }

    /// Index of the diagonal-coordinate variable `t_{k,j}`.
    pub fn diag_var(&self, k: usize, j: u32) -> Option<usize> {
        self.generators.iter().position(|g| g.label == Label::Diag { k, j })
    }

    pub fn jmax(&self) -> i32 {
        self.generators.iter().map(|g| g.top_degree()).max().unwrap_or(1)
    }

    pub fn window(&self, d: usize) -> Window {
        Window::for_order(self.jmax(), d)
    }

    pub fn space(&self, d: usize) -> Arc<JetSpace> {
        JetSpace::new(self.var_names(), d)
    }

    pub fn j1_series<S: Scalar>(&self, lo: i32) -> Series<S> {
        let terms: Vec<(i32, Mat<S>)> = self.j1.iter().map(|(d, m)| (*d, Mat::lift(m))).collect();
        Series::from_terms(self.n, lo, &terms)
    }

    pub fn generator_series<S: Scalar>(&self, v: usize, lo: i32) -> Series<S> {
        self.generators[v].series(self.n, lo)
    }

    /// Largest commutator among generator pairs.
    pub fn commutation_defect(&self, lo: i32) -> Result<f64> {
        let gs: Vec<Series<C64>> = (0..self.generators.len()).map(|v| self.generator_series(v, lo)).collect();
        let mut worst: f64 = 0.0;
        for i in 0..gs.len() {
            for j in i + 1..gs.len() {
                worst = worst.max(gs[i].commutator(&gs[j])?.max_abs());
            }
        }
        Ok(worst)
    }
}

fn check_distinct(cs: &[C64]) -> Result<usize> {
    for i in 0..cs.len() {
        for j in i + 1..cs.len() {
            if (cs[i] - cs[j]).norm() < 1e-12 {
                return Err(Error::InvalidArgument("gl_n requires pairwise distinct diagonal entries".into()));
            }
        }
    }
    Ok(cs.len())
}

/// `V(t) = exp(Σ t_v J_v)` as a jet of series.
pub fn vacuum_frame<S: Scalar>(seq: &VacuumSequence, space: &Arc<JetSpace>, lo: i32) -> Result<Jet<Series<S>>> {
    let mut x = Jet::zero(space);
    for v in 0..seq.generators.len() {
        let mut e = vec![0u8; space.nvars()];
        e[v] = 1;
        let idx = space.index_of(&e).ok_or_else(|| Error::InvalidArgument("jet order must be >= 1".into()))?;
        x.set(idx, Some(seq.generator_series(v, lo)));
    }
    x.exp(Series::identity(seq.n, lo))
}

/// `∂_x` on jets.
pub fn dx<T: crate::jet::JetCoeff>(seq: &VacuumSequence, x: &Jet<T>) -> Result<Jet<T>> {
    let mut out: Option<Jet<T>> = None;
    for (v, &w) in seq.x_dir.iter().enumerate() {
        if w == c(0.0, 0.0) {
            continue;
        }
        let p = x.partial(v).scale(<T::Sc as Scalar>::from_c64(w));
        out = Some(match out {
            Some(o) => o.add(&p)?,
            None => p,
        });
    }
    out.ok_or_else(|| Error::InvalidArgument("no x direction".into()))
}

/// `[∂_x − (J_1 + u), Q]` per jet coefficient.
pub fn flow_rhs<S>(seq: &VacuumSequence, u: &Jet<Mat<S>>, q: &Jet<Series<S>>, lo: i32) -> Result<Jet<Series<S>>>
where
    S: Scalar,
{
    let mut ju = u.map(|m| Series::constant(m, lo));
    let j1 = seq.j1_series::<S>(lo);
    let c0 = ju.get(0).cloned().unwrap_or_else(|| Series::zero(seq.n, lo)).add(&j1)?;
    ju.set(0, Some(c0));
    let qx = dx(seq, q)?;
    let comm = ju.mul(q)?.sub(&q.mul(&ju)?)?;
    qx.sub(&comm)
}

/// The vector AKNS recursion. Returns `Q_0, Q_{−1}, …, Q_{−depth}` where
/// `Q = aλ + Σ_{j≥0} Q_{−j}λ^{−j}`, together with the `𝒢₁`/`𝒢₀` parts.
pub struct QRecursion {
    pub q: Vec<Jet<Mat<C64>>>,
    pub p: Vec<Jet<Mat<C64>>>,
    pub t: Vec<Jet<Mat<C64>>>,
}

pub fn q_recursion_vector_akns(seq: &VacuumSequence, u: &Jet<Mat<C64>>, depth: usize) -> Result<QRecursion> {
    if !matches!(seq.family, Family::VectorAkns | Family::AknsSl2) {
        return Err(Error::InvalidArgument("q recursion applies to the AKNS families".into()));
    }
    let n = seq.n;
    let a = &seq.a;
    // a² = −I and a anticommutes with the off-diagonal block.
    if a.mul(a)?.add(&Mat::identity(n))?.max_abs() > 1e-12 {
        return Err(Error::Precondition("q recursion requires a² = −I".into()));
    }
    let shape = block_shape_defect(seq, u);
    if shape > 1e-12 {
        return Err(Error::Precondition(format!("u is not block off-diagonal (defect {shape:e})")));
    }
    let sp = u.space().clone();
    let half_a = a.scale(c(0.5, 0.0));
    let mut p = vec![u.clone()];
    let mut t: Vec<Jet<Mat<C64>>> = vec![Jet::zero(&sp)];
    for j in 0..depth {
        let px = dx(seq, &p[j])?;
        let comm = t[j].mul(u)?.sub(&u.mul(&t[j])?)?;
        let pn = px.add(&comm)?.map(|m| half_a.mul(m).expect("dims").neg());
        let mut acc: Jet<Mat<C64>> = Jet::zero(&sp);
        for i in 0..=j {
            acc = acc.add(&p[i].mul(&p[j - i])?)?.add(&t[i].mul(&t[j - i])?)?;
        }
        // −2a·T = acc with a⁻¹ = −a.
        let tn = acc.map(|m| half_a.mul(m).expect("dims"));
        p.push(pn);
        t.push(tn);
    }
    let q = p.iter().zip(&t).map(|(x, y)| x.add(y)).collect::<Result<Vec<_>>>()?;
    Ok(QRecursion { q, p, t })
}

/// Largest entry of `u` outside the off-diagonal blocks of the `a`-grading.
pub fn block_shape_defect(seq: &VacuumSequence, u: &Jet<Mat<C64>>) -> f64 {
    let n = seq.n;
    let mut worst: f64 = 0.0;
    for m in u.coeffs().iter().flatten() {
        for i in 0..n {
            for j in 0..n {
                if (seq.a.get(i, i) - seq.a.get(j, j)).norm() < 1e-12 {
                    worst = worst.max(m.get(i, j).norm());
                }
            }
        }
    }
    worst
}

/// Closed-form evolution equations checked against jets of `u_f`.
///
/// The `*Alt` variants keep sign patterns that disagree with the flows
/// generated by `J_j = aλ^j`; they are evaluated to document the discrepancy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NamedFlow {
    AknsT2,
    AknsT3,
    AknsT3Alt,
    Nls,
    Mkdv,
    MkdvAlt,
    Cmkdv,
    Kdv,
    NWave,
    VectorNls,
    VectorNlsAlt,
    VectorMkdv,
    VectorMkdvAlt,
    VectorT2,
    VectorT3,
    VectorT3Alt,
}

impl NamedFlow {
    pub const ALL: [NamedFlow; 16] = [
        NamedFlow::AknsT2,
        NamedFlow::AknsT3,
        NamedFlow::AknsT3Alt,
        NamedFlow::Nls,
        NamedFlow::Mkdv,
        NamedFlow::MkdvAlt,
        NamedFlow::Cmkdv,
        NamedFlow::Kdv,
        NamedFlow::NWave,
        NamedFlow::VectorNls,
        NamedFlow::VectorNlsAlt,
        NamedFlow::VectorMkdv,
        NamedFlow::VectorMkdvAlt,
        NamedFlow::VectorT2,
        NamedFlow::VectorT3,
        NamedFlow::VectorT3Alt,
    ];

    pub fn name(self) -> &'static str {
        match self {
            NamedFlow::AknsT2 => "akns_t2",
            NamedFlow::AknsT3 => "akns_t3",
            NamedFlow::AknsT3Alt => "akns_t3_alt",
            NamedFlow::Nls => "nls",
            NamedFlow::Mkdv => "mkdv",
            NamedFlow::MkdvAlt => "mkdv_alt",
            NamedFlow::Cmkdv => "cmkdv",
            NamedFlow::Kdv => "kdv",
            NamedFlow::NWave => "n_wave",
            NamedFlow::VectorNls => "vector_nls",
            NamedFlow::VectorNlsAlt => "vector_nls_alt",
            NamedFlow::VectorMkdv => "vector_mkdv",
            NamedFlow::VectorMkdvAlt => "vector_mkdv_alt",
            NamedFlow::VectorT2 => "vector_t2",
            NamedFlow::VectorT3 => "vector_t3",
            NamedFlow::VectorT3Alt => "vector_t3_alt",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .iter()
            .copied()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown flow {s:?}")))
    }

    /// Highest x-derivative order in the equation.
    pub fn order(self) -> usize {
        match self {
            NamedFlow::AknsT2 | NamedFlow::Nls | NamedFlow::VectorNls | NamedFlow::VectorNlsAlt | NamedFlow::VectorT2 => 2,
            NamedFlow::NWave => 1,
            _ => 3,
        }
    }

    /// Name of the time variable carrying the flow.
    pub fn time_var(self) -> &'static str {
        match self.order() {
            2 => "t2",
            1 => "",
            _ => "t3",
        }
    }
}

type SJet = Jet<C64>;

fn sc(z: C64, x: &SJet) -> SJet {
    x.scale(z)
}

fn mul3(a: &SJet, b: &SJet, d: &SJet) -> Result<SJet> {
    a.mul(b)?.mul(d)
}

/// Residual jet(s) of a named closed-form flow. `u` must be the formal
/// solution over the variables of `seq`; residuals are compared up to total
/// order `d − order(flow)`.
pub fn named_flow_residual(seq: &VacuumSequence, flow: NamedFlow, u: &Jet<Mat<C64>>) -> Result<f64> {
    let sp = u.space().clone();
    let d = sp.order();
    let eq_order = flow.order().max(1);
    if d < eq_order {
        return Err(Error::Precondition(format!("jet order {d} too small for {}", flow.name())));
    }
    let cmp = d - eq_order;
    let half_i = c(0.0, 0.5);
    let quarter = c(0.25, 0.0);
    if flow == NamedFlow::NWave {
        return n_wave_residual(seq, u, cmp);
    }
    let tv = seq
        .var_index(flow.time_var())
        .ok_or_else(|| Error::Precondition(format!("flow {} needs time variable {}", flow.name(), flow.time_var())))?;
    let ut = u.partial(tv);
    let ux = dx(seq, u)?;
    let uxx = dx(seq, &ux)?;
    let uxxx = dx(seq, &uxx)?;
    let res: Vec<SJet> = match flow {
        NamedFlow::AknsT2
        | NamedFlow::AknsT3
        | NamedFlow::AknsT3Alt
        | NamedFlow::Nls
        | NamedFlow::Mkdv
        | NamedFlow::MkdvAlt
        | NamedFlow::Cmkdv
        | NamedFlow::Kdv => {
            let e = |m: &Jet<Mat<C64>>, i, j| m.entry(i, j);
            let (q, r) = (e(u, 0, 1), e(u, 1, 0));
            let (qx, rx) = (e(&ux, 0, 1), e(&ux, 1, 0));
            let (qxx, rxx) = (e(&uxx, 0, 1), e(&uxx, 1, 0));
            let (qxxx, rxxx) = (e(&uxxx, 0, 1), e(&uxxx, 1, 0));
            let (qt, rt) = (e(&ut, 0, 1), e(&ut, 1, 0));
            match flow {
                NamedFlow::AknsT2 => {
                    // q_t = −(i/2)(q_xx − 2q²r), r_t = (i/2)(r_xx − 2qr²)
                    let fq = sc(-half_i, &qxx.sub(&sc(c(2.0, 0.0), &mul3(&q, &q, &r)?))?);
                    let fr = sc(half_i, &rxx.sub(&sc(c(2.0, 0.0), &mul3(&q, &r, &r)?))?);
                    vec![qt.sub(&fq)?, rt.sub(&fr)?]
                }
                NamedFlow::AknsT3 | NamedFlow::AknsT3Alt => {
                    // q_t = −¼(q_xxx − 6qq_xr), r_t = −¼(r_xxx − 6qrr_x); the
                    // alternative carries +¼ on the r equation.
                    let rs = if flow == NamedFlow::AknsT3 { -quarter } else { quarter };
                    let fq = sc(-quarter, &qxxx.sub(&sc(c(6.0, 0.0), &mul3(&q, &qx, &r)?))?);
                    let fr = sc(rs, &rxxx.sub(&sc(c(6.0, 0.0), &mul3(&q, &r, &rx)?))?);
                    vec![qt.sub(&fq)?, rt.sub(&fr)?]
                }
                NamedFlow::Nls => {
                    // r_t = (i/2)(r_xx + 2|r|²r) with |r|² = r·r̄ on real times.
                    let rbar = r.map(|z| z.conj());
                    let fr = sc(half_i, &rxx.add(&sc(c(2.0, 0.0), &mul3(&r, &rbar, &r)?))?);
                    vec![rt.sub(&fr)?]
                }
                NamedFlow::Mkdv | NamedFlow::MkdvAlt => {
                    // r_t = −¼(r_xxx + 6r²r_x) for u = [[0,−r],[r,0]]; the alternative has +¼.
                    let s = if flow == NamedFlow::Mkdv { -quarter } else { quarter };
                    let fr = sc(s, &rxxx.add(&sc(c(6.0, 0.0), &mul3(&r, &r, &rx)?))?);
                    vec![rt.sub(&fr)?]
                }
                NamedFlow::Cmkdv => {
                    // q_t = ¼(q_xxx − 6q²q_x)
                    let fq = sc(quarter, &qxxx.sub(&sc(c(6.0, 0.0), &mul3(&q, &q, &qx)?))?);
                    vec![qt.sub(&fq)?]
                }
                NamedFlow::Kdv => {
                    // r_t = ¼(r_xxx − 6rr_x)
                    let fr = sc(quarter, &rxxx.sub(&sc(c(6.0, 0.0), &r.mul(&rx)?))?);
                    vec![rt.sub(&fr)?]
                }
                _ => unreachable!(),
            }
        }
        NamedFlow::VectorT2
        | NamedFlow::VectorT3
        | NamedFlow::VectorT3Alt
        | NamedFlow::VectorNls
        | NamedFlow::VectorNlsAlt
        | NamedFlow::VectorMkdv
        | NamedFlow::VectorMkdvAlt => {
            vector_residuals(seq, flow, u, &ut, &ux, &uxx, &uxxx)?
        }
        NamedFlow::NWave => unreachable!(),
    };
    Ok(res.iter().map(|j| j.max_abs_to(cmp)).fold(0.0, f64::max))
}

fn vector_residuals(
    seq: &VacuumSequence,
    flow: NamedFlow,
    u: &Jet<Mat<C64>>,
    ut: &Jet<Mat<C64>>,
    ux: &Jet<Mat<C64>>,
    uxx: &Jet<Mat<C64>>,
    uxxx: &Jet<Mat<C64>>,
) -> Result<Vec<SJet>> {
    let n = seq.n;
    let m = n - 1;
    let half_i = c(0.0, 0.5);
    let quarter = c(0.25, 0.0);
    let u2 = u.mul(u)?;
    let u3 = u2.mul(u)?;
    // Top-right block rows 0..m, column m: the q block. Bottom-left: the r block.
    let q_entries = |x: &Jet<Mat<C64>>| (0..m).map(|i| x.entry(i, m)).collect::<Vec<_>>();
    let r_entries = |x: &Jet<Mat<C64>>| (0..m).map(|i| x.entry(m, i)).collect::<Vec<_>>();
    let mut out = Vec::new();
    match flow {
        NamedFlow::VectorT2 => {
            // q_t = (i/2)(−q_xx + 2qrq), r_t = (i/2)(r_xx − 2rqr)
            let fq = uxx.neg().add(&u3.scale(c(2.0, 0.0)))?.scale(half_i);
            let fr = uxx.sub(&u3.scale(c(2.0, 0.0)))?.scale(half_i);
            let dq = ut.sub(&fq)?;
            let dr = ut.sub(&fr)?;
            out.extend(q_entries(&dq));
            out.extend(r_entries(&dr));
        }
        NamedFlow::VectorT3 | NamedFlow::VectorT3Alt => {
            // Generated: u_t = ¼(−u_xxx + 3u²u_x + 3u_xu²) on both blocks.
            // Alt: q_t = ¼(−q_xxx + 3qrq_x + qr_xq + 2q_xrq), same for r.
            let (w1, w2, w3) = if flow == NamedFlow::VectorT3 { (3.0, 0.0, 3.0) } else { (3.0, 1.0, 2.0) };
            let f = uxxx
                .neg()
                .add(&u2.mul(ux)?.scale(c(w1, 0.0)))?
                .add(&u.mul(ux)?.mul(u)?.scale(c(w2, 0.0)))?
                .add(&ux.mul(&u2)?.scale(c(w3, 0.0)))?
                .scale(quarter);
            let dq = ut.sub(&f)?;
            out.extend(q_entries(&dq));
            out.extend(r_entries(&dq));
        }
        NamedFlow::VectorNls | NamedFlow::VectorNlsAlt => {
            // q_t = −(i/2)(q_xx + 2‖q‖²q) under r = −q̄ᵗ; the alternative has +(i/2).
            let s = if flow == NamedFlow::VectorNls { -half_i } else { half_i };
            let q = q_entries(u);
            let qt = q_entries(ut);
            let qxx = q_entries(uxx);
            let mut norm2: SJet = Jet::zero(u.space());
            for qi in &q {
                norm2 = norm2.add(&qi.mul(&qi.map(|z| z.conj()))?)?;
            }
            for i in 0..m {
                let f = qxx[i].add(&norm2.mul(&q[i])?.scale(c(2.0, 0.0)))?.scale(s);
                out.push(qt[i].sub(&f)?);
            }
        }
        NamedFlow::VectorMkdv | NamedFlow::VectorMkdvAlt => {
            // Generated, for u = [[0,−rᵗ],[r,0]] real:
            //   r_t = −¼(r_xxx + 3|r|²r_x + 3(r·r_x)r).
            // Alt: r_t = ¼(r_xxx + 6|r|²r_x).
            let r = r_entries(u);
            let rt = r_entries(ut);
            let rx = r_entries(ux);
            let rxxx = r_entries(uxxx);
            let mut norm2: SJet = Jet::zero(u.space());
            let mut dot: SJet = Jet::zero(u.space());
            for (ri, rxi) in r.iter().zip(&rx) {
                norm2 = norm2.add(&ri.mul(ri)?)?;
                dot = dot.add(&ri.mul(rxi)?)?;
            }
            for i in 0..m {
                let f = if flow == NamedFlow::VectorMkdv {
                    rxxx[i]
                        .add(&norm2.mul(&rx[i])?.scale(c(3.0, 0.0)))?
                        .add(&dot.mul(&r[i])?.scale(c(3.0, 0.0)))?
                        .scale(-quarter)
                } else {
                    rxxx[i].add(&norm2.mul(&rx[i])?.scale(c(6.0, 0.0)))?.scale(quarter)
                };
                out.push(rt[i].sub(&f)?);
            }
        }
        _ => unreachable!(),
    }
    Ok(out)
}

fn n_wave_residual(seq: &VacuumSequence, u: &Jet<Mat<C64>>, cmp: usize) -> Result<f64> {
    if seq.family != Family::GlN {
        return Err(Error::InvalidArgument("n-wave applies to gl_n".into()));
    }
    let n = seq.n;
    let a1 = seq.j1.iter().find(|t| t.0 == 1).map(|t| t.1.clone()).expect("J_1 has a λ term");
    let ux = dx(seq, u)?;
    let mut worst: f64 = 0.0;
    for (v, g) in seq.generators.iter().enumerate() {
        if g.top_degree() != 1 {
            continue;
        }
        let ai = g.terms[0].1.clone();
        // w = ad(a_i)ad(a_1)⁻¹(·) acts entrywise on off-diagonal entries.
        let op = |m: &Mat<C64>| {
            let mut w = Mat::zeros(n);
            for p in 0..n {
                for q in 0..n {
                    if p != q {
                        let num = ai.get(p, p) - ai.get(q, q);
                        let den = a1.get(p, p) - a1.get(q, q);
                        w.set(p, q, m.get(p, q) * num / den);
                    }
                }
            }
            w
        };
        let w = u.map(op);
        let wx = ux.map(op);
        let rhs = wx.sub(&u.mul(&w)?.sub(&w.mul(u)?)?)?;
        let res = u.partial(v).sub(&rhs)?;
        worst = worst.max(res.max_abs_to(cmp));
    }
    Ok(worst)
}

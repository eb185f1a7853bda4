//! Runs the selected suites of a scenario and collects a [`Report`].

use std::collections::BTreeMap;
use std::time::Instant;

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::catalog::{lookup, Role};
use crate::hierarchy::{named_flow_residual, Family, Label, NamedFlow, VacuumSequence};
use crate::matrix::Mat;
use crate::scalar::{c, C64};
use crate::scattering::{
    conjugation_defects, factorization_defect, factorize_jet, flow_consistency_defect, frame_negative_defect, frame_ode_defect,
    gl_coordinate_defect, lax_residuals, q_series_checks, reality_propagation_defect, recursion_consistency, stabilizer_defects,
    Factorization,
};
use crate::scenario::{Scenario, ScenarioConfig, ScenarioError, Suite, SCHEMA_VERSION};
use crate::series::{CSeries, Series};
use crate::splitting::{sample_negative_element, uniform_pm1, SigmaForm, SplittingSpec, Variant};
use crate::tau::{
    akns_tau_identities, conjugation_tau_defect, first_flow_partial_defect, gl_tau_identities, kdv_tau_defect, kdv_two_constructions,
    ln_tau_jet, one_form_defects, recovery_k_invariance, second_partial_defects, tau_shift_defects, trace_pairing_defect, trace_vav,
    vector_akns_recovery, xi_helpers, Recovery,
};
use crate::virasoro::{
    bracket_defects, c_ell, comparable_monomials, epsilon_route, eta_bracket_defects, eta_field, frame_variation_defect,
    induced_frame_variation, induced_frame_variation_gl, induced_lntau_variation, masked_diff, sigma_tangent_defect, tau_virasoro_operator,
    virasoro_field,
};

#[derive(Clone, Debug, Serialize)]
pub struct Record {
    pub name: String,
    pub anchor: String,
    pub role: Role,
    /// Which instance of the check (indices, Γ preset, …); empty when unique.
    pub case: String,
    pub max_defect: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Summary {
    pub checks: usize,
    pub diagnostics: usize,
    pub failed: Vec<String>,
    pub pass: bool,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Timing {
    pub total_ms: f64,
    pub stages_ms: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub scenario: ScenarioConfig,
    pub records: Vec<Record>,
    /// Conventions detected during the run and other derived facts.
    pub notes: BTreeMap<String, String>,
    pub summary: Summary,
    pub timing: Timing,
}

impl Report {
    pub fn pass(&self) -> bool {
        self.summary.pass
    }

    /// The report body with timing removed, for determinism comparisons.
    pub fn body_json(&self) -> String {
        let mut v = serde_json::to_value(self).expect("report serializes");
        if let Some(o) = v.as_object_mut() {
            o.remove("timing");
        }
        serde_json::to_string_pretty(&v).expect("report serializes")
    }

    pub fn record(&self, name: &str) -> impl Iterator<Item = &Record> {
        let name = name.to_string();
        self.records.iter().filter(move |r| r.name == name)
    }
}

struct Collector<'a> {
    scn: &'a Scenario,
    records: Vec<Record>,
    notes: BTreeMap<String, String>,
    timing: Timing,
}

impl<'a> Collector<'a> {
    fn push(&mut self, name: &str, case: impl Into<String>, defect: f64) {
        let info = lookup(name).unwrap_or_else(|| panic!("check {name:?} missing from the catalog"));
        let tol = self.scn.tolerance(name);
        self.records.push(Record {
            name: name.to_string(),
            anchor: info.anchor.to_string(),
            role: info.role,
            case: case.into(),
            max_defect: defect,
            tolerance: tol,
            pass: defect.is_finite() && defect <= tol,
        });
    }

    fn note(&mut self, key: &str, value: impl Into<String>) {
        self.notes.insert(key.to_string(), value.into());
    }

    fn stage<T>(&mut self, name: &str, f: impl FnOnce(&mut Self) -> Result<T, ScenarioError>) -> Result<T, ScenarioError> {
        let t = Instant::now();
        let out = f(self);
        self.timing.stages_ms.insert(name.to_string(), t.elapsed().as_secs_f64() * 1e3);
        out
    }
}

fn num<T>(stage: &str, r: crate::Result<T>) -> Result<T, ScenarioError> {
    r.map_err(ScenarioError::numerical(stage))
}

/// A loop in `L₋` commuting with every `J_j`: `exp(Σ_v c_v·J_v·λ^{−top_v−1−s})`.
fn stabilizer_element(seq: &VacuumSequence, lo: i32) -> crate::Result<CSeries> {
    let mut acc = Series::zero(seq.n, lo);
    for (v, g) in seq.generators.iter().enumerate().take(2) {
        for s in 0..2 {
            let coef = c(0.2 / (1.0 + v as f64 + s as f64), 0.1 * (s as f64 - 0.5));
            let term = seq.generator_series::<C64>(v, lo).shift(-g.top_degree() - 1 - s).scale(coef);
            acc = acc.add(&term)?;
        }
    }
    acc.exp_negative()
}

/// Seed of the probe constant `k`. Fixed, so that a scenario's records depend
/// only on the frame `f` and not on how `f` was supplied.
pub const PROBE_SEED: u64 = 0;

/// A constant invertible `k` commuting with `a`.
fn commuting_constant(seq: &VacuumSequence, seed: u64) -> Mat<C64> {
    let n = seq.n;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6b5f_636f_6e6a);
    let mut k = Mat::identity(n);
    for i in 0..n {
        for j in 0..n {
            if (seq.a.get(i, i) - seq.a.get(j, j)).norm() < 1e-12 {
                let z = c(0.3 * uniform_pm1(&mut rng), 0.3 * uniform_pm1(&mut rng));
                k.set(i, j, k.get(i, j) + z);
            }
        }
    }
    k
}

fn a_is(seq: &VacuumSequence, d: [C64; 2]) -> bool {
    seq.n == 2 && (seq.a.get(0, 0) - d[0]).norm() < 1e-12 && (seq.a.get(1, 1) - d[1]).norm() < 1e-12
}

fn has_var(seq: &VacuumSequence, name: &str) -> bool {
    seq.var_index(name).is_some()
}

/// Closed-form flows whose hypotheses hold for this scenario.
pub fn applicable_flows(seq: &VacuumSequence, spec: &SplittingSpec) -> Vec<NamedFlow> {
    let i = c(0.0, 1.0);
    let one = c(1.0, 0.0);
    let (t2, t3) = (has_var(seq, "t2"), has_var(seq, "t3"));
    let v = spec.variant;
    let mut out = Vec::new();
    match seq.family {
        Family::AknsSl2 if a_is(seq, [i, -i]) => {
            if t2 {
                out.push(NamedFlow::AknsT2);
            }
            if t3 {
                out.extend([NamedFlow::AknsT3, NamedFlow::AknsT3Alt]);
            }
            if v == Variant::URealForm && t2 {
                out.push(NamedFlow::Nls);
            }
            if v == Variant::TauSigma && t3 {
                out.extend([NamedFlow::Mkdv, NamedFlow::MkdvAlt]);
            }
        }
        Family::AknsSl2 if a_is(seq, [one, -one]) => {
            if v == Variant::SigmaTwisted && matches!(spec.sigma, SigmaForm::Conjugator(_)) && t3 {
                out.push(NamedFlow::Cmkdv);
            }
        }
        Family::VectorAkns => {
            if t2 {
                out.push(NamedFlow::VectorT2);
            }
            if t3 {
                out.extend([NamedFlow::VectorT3, NamedFlow::VectorT3Alt]);
            }
            if v == Variant::URealForm && t2 {
                out.extend([NamedFlow::VectorNls, NamedFlow::VectorNlsAlt]);
            }
            if v == Variant::TauSigma && t3 {
                out.extend([NamedFlow::VectorMkdv, NamedFlow::VectorMkdvAlt]);
            }
        }
        Family::KdvTwisted if t3 => out.push(NamedFlow::Kdv),
        Family::GlN if seq.n >= 2 => out.push(NamedFlow::NWave),
        _ => {}
    }
    out
}

fn sigma_restricted(spec: &SplittingSpec) -> bool {
    matches!(spec.variant, Variant::SigmaTwisted | Variant::TauSigma)
}

/// Run a validated scenario. Check failures are reported in the returned
/// report; numerical failures abort with the failing stage named.
pub fn run_scenario(scn: &Scenario) -> Result<Report, ScenarioError> {
    let start = Instant::now();
    let mut col = Collector { scn, records: Vec::new(), notes: BTreeMap::new(), timing: Timing::default() };
    let seq = &scn.seq;
    let d = scn.config.order;
    let fac = col.stage("factorize", |_| num("factorization", factorize_jet(seq, &scn.f, d)))?;
    let needs_tau = scn.has_suite(Suite::Tau) || scn.has_suite(Suite::Virasoro) || scn.has_suite(Suite::ProofIdentities);
    let x = if needs_tau { Some(col.stage("ln_tau", |_| num("ln tau", ln_tau_jet(seq, &fac)))?) } else { None };
    for suite in Suite::ALL {
        if !scn.has_suite(suite) {
            continue;
        }
        let x = x.as_ref();
        col.stage(suite.name(), |col| match suite {
            Suite::Factorization => factorization_suite(col, &fac),
            Suite::Flows => flows_suite(col, &fac),
            Suite::Tau => tau_suite(col, &fac, x.expect("tau computed")),
            Suite::Virasoro => virasoro_suite(col, &fac, x.expect("tau computed")),
            Suite::ProofIdentities => proof_suite(col, &fac, x.expect("tau computed")),
            Suite::Recovery => recovery_suite(col, &fac),
        })?;
    }
    col.timing.total_ms = start.elapsed().as_secs_f64() * 1e3;
    let checks = col.records.iter().filter(|r| r.role == Role::Check).count();
    let failed: Vec<String> = col
        .records
        .iter()
        .filter(|r| r.role == Role::Check && !r.pass)
        .map(|r| if r.case.is_empty() { r.name.clone() } else { format!("{} [{}]", r.name, r.case) })
        .collect();
    let summary = Summary { checks, diagnostics: col.records.len() - checks, pass: failed.is_empty(), failed };
    Ok(Report {
        schema_version: SCHEMA_VERSION,
        scenario: scn.config.clone(),
        records: col.records,
        notes: col.notes,
        summary,
        timing: col.timing,
    })
}

fn factorization_suite(col: &mut Collector, fac: &Factorization<C64>) -> Result<(), ScenarioError> {
    let scn = col.scn;
    let seq = &scn.seq;
    let d = scn.config.order;
    let f = &scn.f;
    col.push("factorization", "", num("factorization check", factorization_defect(seq, fac))?);
    col.push("frame_positive", "", num("frame check", frame_negative_defect(seq, fac))?);
    col.push("recursion_order_independence", "", num("recursion order", recursion_consistency(seq, f, d))?);
    col.push("vacuum_commutation", "", num("vacuum", seq.commutation_defect(fac.lo))?);
    let (minus, plus) = num("lax bracket", lax_residuals(seq, fac))?;
    col.push("lax_bracket", "", minus);
    col.push("lax_bracket_plus_sign", "", plus);
    let sign = if minus <= plus { "[∂_x − (J_1 + u), Q] = 0" } else { "[∂_x + J_1 + u, Q] = 0" };
    col.note("lax_bracket_sign", format!("{sign} (residuals: minus {minus:.3e}, plus {plus:.3e})"));
    col.push("frame_ode", "", num("frame ode", frame_ode_defect(seq, fac))?);
    let u0 = fac.u.constant_term().cloned().unwrap_or_else(|| Mat::zeros(seq.n));
    let rows: Vec<String> = (0..seq.n).map(|i| (0..seq.n).map(|j| fmt_c(u0.get(i, j))).collect::<Vec<_>>().join(", ")).collect();
    col.note("u_at_origin", format!("[{}]", rows.join("; ")));
    let mut u_var = fac.u.clone();
    u_var.set(0, None);
    col.note("u_nonconstant_sup", format!("{:.3e}", u_var.max_abs()));
    if scn.spec.variant != Variant::Standard {
        col.push("reality_propagation", scn.spec.variant.name(), num("reality propagation", reality_propagation_defect(&scn.spec, seq, fac))?);
    }
    let h = num("stabilizer element", stabilizer_element(seq, fac.lo))?;
    let (du, dm) = num("stabilizer invariance", stabilizer_defects(seq, f, &h, d))?;
    col.push("stabilizer_invariance", "", du.max(dm));
    if seq.family != Family::KdvTwisted {
        let k = commuting_constant(seq, PROBE_SEED);
        let (du, dm, de) = num("conjugation covariance", conjugation_defects(seq, f, &k, d))?;
        col.push("conjugation_covariance", "", du.max(dm).max(de));
    }
    if seq.family == Family::GlN {
        let cs: Vec<C64> = (0..seq.n).map(|i| seq.a.get(i, i)).collect();
        let exps: Vec<u32> = seq
            .generators
            .iter()
            .filter_map(|g| match g.label {
                Label::Diag { k: 1, j } => Some(j),
                _ => None,
            })
            .collect();
        col.push("gl_coordinate_change", "", num("coordinate change", gl_coordinate_defect(&cs, &exps, f, d))?);
    }
    Ok(())
}

fn flows_suite(col: &mut Collector, fac: &Factorization<C64>) -> Result<(), ScenarioError> {
    let scn = col.scn;
    let seq = &scn.seq;
    col.push("flow_consistency", "", num("flow consistency", flow_consistency_defect(seq, fac))?);
    let a2 = num("a²", seq.a.mul(&seq.a))?;
    let a2_minus_one = a2.add(&Mat::identity(seq.n)).map(|m| m.max_abs()).unwrap_or(f64::INFINITY);
    if matches!(seq.family, Family::AknsSl2 | Family::VectorAkns) && a2_minus_one < 1e-12 {
        let depth = 4.min(scn.config.order);
        let q = num("q series", q_series_checks(seq, fac, depth))?;
        col.push("q_recursion", format!("depth {depth}"), q.recursion);
        col.push("q_closed_forms", "", q.q_m1.max(q.q_m2));
        if let Some(t) = q.sl2_tables {
            col.push("q_tables_2x2", "", t);
        }
        col.push("q_square", "", q.square);
    }
    for flow in applicable_flows(seq, &scn.spec) {
        if scn.config.order < flow.order().max(1) {
            continue;
        }
        let r = num(flow.name(), named_flow_residual(seq, flow, &fac.u))?;
        col.push(&format!("flow_{}", flow.name()), "", r);
    }
    Ok(())
}

fn tau_suite(col: &mut Collector, fac: &Factorization<C64>, x: &crate::jet::Jet<C64>) -> Result<(), ScenarioError> {
    let scn = col.scn;
    let seq = &scn.seq;
    let d = scn.config.order;
    let f = &scn.f;
    let (rel, closed) = num("tau one-form", one_form_defects(seq, fac))?;
    col.push("tau_defining_relation", "", rel);
    col.push("tau_closedness", "", closed);
    let (route, sym) = num("tau second partials", second_partial_defects(seq, fac, x))?;
    col.push("tau_second_partial", "", route);
    col.push("tau_second_partial_symmetry", "", sym);
    col.push("tau_first_flow_partial", "", num("tau first flow", first_flow_partial_defect(seq, fac, x))?);
    col.note("lntau_sup", format!("{:.3e}", x.max_abs()));
    let h = num("stabilizer element", stabilizer_element(seq, fac.lo))?;
    let (nonconst, mismatch) = num("tau shift", tau_shift_defects(seq, f, &h, d))?;
    col.push("tau_shift_constancy", "", nonconst.max(mismatch));
    if seq.family != Family::KdvTwisted {
        let k = commuting_constant(seq, PROBE_SEED);
        col.push("tau_conjugation_invariance", "", num("tau conjugation", conjugation_tau_defect(seq, f, &k, d))?);
    }
    match seq.family {
        Family::AknsSl2 => {
            let tol = scn.tolerance("akns_tau_xt2");
            let ids = num("akns tau identities", akns_tau_identities(seq, fac, x, tol))?;
            col.push("akns_tau_xx", "", ids.xx_defect);
            if !ids.candidates.is_empty() {
                let best = ids.candidates.iter().map(|c| c.1).fold(f64::INFINITY, f64::min);
                let kappa = ids.detected.clone().unwrap_or_else(|| "none".into());
                col.push("akns_tau_xt2", format!("κ = {kappa}"), best);
                let alt = ids.candidates.iter().find(|c| c.0 == "1/2").map(|c| c.1).unwrap_or(f64::NAN);
                col.push("akns_tau_xt2_alt", "κ = 1/2", alt);
                let a = format!("diag({}, {})", fmt_c(seq.a.get(0, 0)), fmt_c(seq.a.get(1, 1)));
                col.note("akns_tau_convention", format!("a = {a}: detected κ = {kappa}"));
            }
            if let Some(v) = ids.ode_consistent {
                col.push("akns_tau_ode", "", v);
            }
            if let Some(v) = ids.ode_alt {
                col.push("akns_tau_ode_alt", "", v);
            }
        }
        Family::GlN => {
            let ids = num("gl tau identities", gl_tau_identities(seq, fac, x))?;
            col.push("thm7.1_tau_uu", "", ids.vv.max(ids.uu_scaled));
            col.push("gl_tau_uu_alt", "", ids.uu_alt);
            if sigma_restricted(&scn.spec) {
                col.push("sigma_tau_vsq", "", ids.vsq);
            }
        }
        Family::KdvTwisted => {
            col.push("kdv_tau", "", num("kdv tau", kdv_tau_defect(seq, fac, x))?);
            let exps: Vec<u32> = seq
                .generators
                .iter()
                .filter_map(|g| match g.label {
                    Label::Power(j) => Some(j),
                    _ => None,
                })
                .collect();
            let (dq, dr, dxx, xr) = num("kdv two constructions", kdv_two_constructions(&exps, f, d))?;
            col.push("kdv_two_constructions", "", dq.max(dr).max(dxx).max(xr));
        }
        Family::VectorAkns => {}
    }
    Ok(())
}

fn fmt_c(z: C64) -> String {
    format!("{}{:+}i", z.re, z.im)
}

fn virasoro_suite(col: &mut Collector, fac: &Factorization<C64>, x: &crate::jet::Jet<C64>) -> Result<(), ScenarioError> {
    let scn = col.scn;
    let seq = &scn.seq;
    let f = &scn.f;
    let n = seq.n;
    let ells = scn.config.virasoro.ells.clone();
    let gammas = scn.config.virasoro.gammas.clone();
    for &g in &gammas {
        let gm = g.matrix(n);
        for (a, &j) in ells.iter().enumerate() {
            for &k in &ells[a + 1..] {
                let (plus, minus) = num("virasoro bracket", bracket_defects(f, &gm, j, k))?;
                col.push("virasoro_bracket", format!("j={j},k={k},gamma={}", g.name()), plus);
                if g == gammas[0] && a == 0 && j != k {
                    col.note("virasoro_bracket_sign", format!("[Z_j,Z_k] = +(k−j)Z_{{j+k}} (defect {plus:.3e}; opposite sign {minus:.3e})"));
                }
            }
        }
    }
    let finv = num("f inverse", f.inv())?;
    let mut cvals = Vec::new();
    for &l in &ells {
        for &g in &gammas {
            let gm = g.matrix(n);
            let case = format!("l={l},gamma={}", g.name());
            let z = num("virasoro field", virasoro_field(f, &gm, l))?;
            let zf = num("virasoro field", z.mul(&finv))?;
            let nonneg = zf.map_with_degree(|deg, m| if deg >= 0 { m.clone() } else { Mat::zeros(m.n) }).max_abs();
            col.push("virasoro_tangency", case.clone(), nonneg);
            let direct = num("frame variation", induced_frame_variation(fac, &gm, l))?;
            let route = num("epsilon route", epsilon_route(seq, fac, &z))?;
            col.push("virasoro_frame_variation", case.clone(), num("frame variation", direct.sub(&route.dm_minv))?.max_abs());
            col.push("virasoro_general_frame_variation", case.clone(), num("frame variation", frame_variation_defect(seq, fac, &z))?);
            let (at0, atm1) = num("tau variation", induced_lntau_variation(fac, &gm, l))?;
            col.push("virasoro_tau_variation", case.clone(), num("tau variation", at0.sub(&route.dlntau))?.max_abs());
            col.push("virasoro_general_tau_variation", case.clone(), num("tau variation", route.general_variation.sub(&route.dlntau))?.max_abs());
            col.push("virasoro_pairing_index", case.clone(), num("tau variation", at0.sub(&atm1))?.max_abs());
            if seq.family == Family::GlN && g == crate::virasoro::GammaPreset::Zero {
                let alt = num("frame variation (diagonal coordinates)", induced_frame_variation_gl(seq, fac, l))?;
                col.push("virasoro_frame_variation_gl", case.clone(), num("frame variation", alt.sub(&direct))?.max_abs());
                let cl = num("c_l", c_ell(f, l))?;
                cvals.push(format!("c_{l} = {}", fmt_c(cl)));
                let order = scn.config.order.saturating_sub(2);
                let mask = comparable_monomials(seq, &fac.space, l, order);
                match (tau_virasoro_operator(seq, x, l, cl, 0.5), tau_virasoro_operator(seq, x, l, cl, 1.0)) {
                    (Ok(op), Ok(op_alt)) => {
                        let mcase = format!("l={l},monomials={}", mask.len());
                        col.push("virasoro_operator", mcase.clone(), masked_diff(&op, &route.dlntau, &mask));
                        col.push("virasoro_operator_alt", mcase, masked_diff(&op_alt, &route.dlntau, &mask));
                    }
                    (Err(e), _) | (_, Err(e)) => col.note(&format!("virasoro_operator_l{l}"), format!("skipped: {e}")),
                }
            }
        }
    }
    if !cvals.is_empty() {
        col.note("c_ell", cvals.join("; "));
    }
    // A generic tangent vector δf = ηf with η ∈ 𝓛₋.
    let eta = num("tangent sample", sample_negative_element(&SplittingSpec::standard(n), PROBE_SEED ^ 0x7461_6e67, 2, 0.3, fac.lo))?;
    let eta_alg = num("tangent sample", eta.sub(&Series::identity(n, fac.lo)))?;
    let df = num("tangent sample", eta_alg.mul(f))?;
    col.push("virasoro_general_frame_variation", "generic tangent", num("frame variation", frame_variation_defect(seq, fac, &df))?);
    let route = num("epsilon route", epsilon_route(seq, fac, &df))?;
    col.push("virasoro_general_tau_variation", "generic tangent", num("tau variation", route.general_variation.sub(&route.dlntau))?.max_abs());
    if sigma_restricted(&scn.spec) {
        for j in 0..=2 {
            let e = num("eta field", eta_field(f, j))?;
            col.push("eta_tangency", format!("j={j}"), num("eta tangency", sigma_tangent_defect(&scn.spec, f, &e))?);
        }
        for (j, k) in [(0, 1), (0, 2), (1, 2)] {
            let (ours, alt) = num("eta bracket", eta_bracket_defects(f, j, k))?;
            col.push("eta_bracket", format!("j={j},k={k}"), ours);
            col.push("eta_bracket_alt", format!("j={j},k={k}"), alt);
        }
    }
    Ok(())
}

fn proof_suite(col: &mut Collector, fac: &Factorization<C64>, x: &crate::jet::Jet<C64>) -> Result<(), ScenarioError> {
    let seq = &col.scn.seq;
    let p = num("proof identities", crate::virasoro::proof_identities(seq, fac, x))?;
    col.push("proof_constant_term", "", p.constant_term);
    col.push("proof_tau_from_xi", "", p.tau_from_xi);
    col.push("proof_b_from_q", "", p.b_from_q);
    col.push("proof_b_squared", "", p.b_squared);
    col.push("proof_b_lambda", "", p.b_lambda);
    col.push("proof_trace_b", "", p.trace_b);
    Ok(())
}

fn recovery_suite(col: &mut Collector, fac: &Factorization<C64>) -> Result<(), ScenarioError> {
    let scn = col.scn;
    let seq = &scn.seq;
    let m = seq.n - 1;
    match num("recovery", vector_akns_recovery(seq, fac))? {
        Recovery::Checked { q_residual, r_residual, .. } => {
            col.push("recovery", "", q_residual.max(r_residual));
            let k = commuting_constant(seq, PROBE_SEED);
            if let Some(v) = num("recovery invariance", recovery_k_invariance(seq, &scn.f, &k, scn.config.order))? {
                col.push("recovery_k_invariance", "", v);
            }
            col.note("recovery", "checked");
        }
        Recovery::Degenerate(why) => col.note("recovery", format!("degenerate: {why}")),
    }
    let jmax = m.min(scn.config.order);
    col.push("trace_pairing", format!("i,j <= {jmax}"), num("trace pairing", trace_pairing_defect(seq, &fac.u, jmax))?);
    col.push("trace_vav", "", num("trace vav", trace_vav(seq, &fac.u))?);
    let xis = num("xi helpers", xi_helpers(seq, &fac.u, (2 * m).saturating_sub(1).min(scn.config.order)))?;
    let vals: Vec<String> = xis.iter().enumerate().map(|(j, x)| format!("xi_{j}(0) = {}", fmt_c(x.get(0).copied().unwrap_or(c(0.0, 0.0))))).collect();
    col.note("xi_helpers", vals.join("; "));
    Ok(())
}

/// Load, build and run a config file.
pub fn run_config_file(path: &std::path::Path, seed: Option<u64>, order: Option<usize>) -> Result<Report, ScenarioError> {
    let mut cfg = ScenarioConfig::load(path)?;
    apply_overrides(&mut cfg, seed, order)?;
    let base = path.parent().map(|p| p.to_path_buf()).unwrap_or_default();
    let scn = cfg.build(&base)?;
    run_scenario(&scn)
}

pub fn apply_overrides(cfg: &mut ScenarioConfig, seed: Option<u64>, order: Option<usize>) -> Result<(), ScenarioError> {
    if let Some(s) = seed {
        match &mut cfg.f {
            crate::scenario::FSource::Seeded(sd) => sd.seed = s,
            crate::scenario::FSource::Explicit(_) => return Err(ScenarioError::Config("--seed needs a seeded f".into())),
        }
    }
    if let Some(o) = order {
        cfg.order = o;
    }
    Ok(())
}

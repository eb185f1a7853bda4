//! Acceptance run: criteria 1–10 at their stated tolerances.
//!
//! Prints one `criterion N: PASS|FAIL …` line per criterion and exits
//! nonzero when any criterion fails.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use loopgroup::hierarchy::VacuumSequence;
use loopgroup::matrix::Mat;
use loopgroup::runner::{run_config_file, Report};
use loopgroup::scalar::{c, C64};
use loopgroup::scattering::{factorization_defect, factorize_jet};
use loopgroup::series::{CSeries, Series};
use loopgroup::splitting::{cocycle, pairing, sample_negative_element, uniform_pm1, SplittingSpec};
use loopgroup::tau::{vector_akns_recovery, Recovery};
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Outcome of one criterion: every item must hold.
#[derive(Default)]
struct Criterion {
    items: Vec<(String, f64, f64)>,
    facts: Vec<(String, bool)>,
}

impl Criterion {
    fn defect(&mut self, label: impl Into<String>, value: f64, tol: f64) {
        self.items.push((label.into(), value, tol));
    }

    fn fact(&mut self, label: impl Into<String>, ok: bool) {
        self.facts.push((label.into(), ok));
    }

    /// Every record named `name` in `rep`, at the criterion's tolerance.
    /// A missing record is a failure.
    fn records(&mut self, rep: &Report, scenario: &str, name: &str, tol: f64) {
        let worst = rep.record(name).map(|r| r.max_defect).fold(None, |m: Option<f64>, d| Some(m.map_or(d, |m| m.max(d))));
        match worst {
            Some(w) => self.defect(format!("{scenario}/{name}"), w, tol),
            None => self.fact(format!("{scenario}/{name} present"), false),
        }
    }

    fn pass(&self) -> bool {
        self.items.iter().all(|(_, v, t)| v.is_finite() && v <= t) && self.facts.iter().all(|f| f.1)
    }

    fn summary(&self) -> String {
        let failed: Vec<String> = self
            .items
            .iter()
            .filter(|(_, v, t)| !(v.is_finite() && v <= t))
            .map(|(l, v, t)| format!("{l} = {v:.2e} > {t:.0e}"))
            .chain(self.facts.iter().filter(|f| !f.1).map(|f| format!("{} does not hold", f.0)))
            .collect();
        if !failed.is_empty() {
            return failed.join("; ");
        }
        let worst = self.items.iter().max_by(|a, b| (a.1 / a.2).total_cmp(&(b.1 / b.2)));
        let mut s = format!("{} defects, {} facts", self.items.len(), self.facts.len());
        if let Some((l, v, t)) = worst {
            s += &format!("; tightest {l} = {v:.2e} (tol {t:.0e})");
        }
        s
    }
}

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(format!("{name}.json"))
}

fn i() -> C64 {
    c(0.0, 1.0)
}

fn seeded_factorization(seq: &VacuumSequence, d: usize, seed: u64) -> (f64, f64) {
    let start = Instant::now();
    let lo = seq.window(d).lo;
    let f = sample_negative_element(&SplittingSpec::standard(seq.n), seed, 3, 0.3, lo).expect("sample");
    let fac = factorize_jet(seq, &f, d).expect("factorization");
    let defect = factorization_defect(seq, &fac).expect("defect");
    (defect, start.elapsed().as_secs_f64())
}

fn criterion1() -> Criterion {
    let mut cr = Criterion::default();
    let cases: Vec<(&str, VacuumSequence)> = vec![
        ("akns_sl2", VacuumSequence::akns([i(), -i()], &[1, 2, 3]).unwrap()),
        ("vector_akns n=3", VacuumSequence::vector_akns(2, &[1, 2, 3]).unwrap()),
        ("gl_3", VacuumSequence::gl_n(&[c(1.0, 0.0), c(-0.5, 0.3), c(0.2, -1.0)], &[1, 2, 3]).unwrap()),
        ("kdv_twisted", VacuumSequence::kdv_twisted(&[1, 3]).unwrap()),
    ];
    for (name, seq) in cases {
        let (defect, secs) = seeded_factorization(&seq, 4, 41);
        cr.defect(format!("{name} ‖M⁻¹E − Vf⁻¹‖"), defect, 1e-9);
        cr.defect(format!("{name} seconds"), secs, 10.0);
    }
    cr
}

fn criterion2(reps: &BTreeMap<&str, Report>) -> Criterion {
    let mut cr = Criterion::default();
    for (scn, flows) in [
        ("akns_seeded", &["flow_akns_t2", "flow_akns_t3"][..]),
        ("nls", &["flow_nls"][..]),
        ("mkdv", &["flow_mkdv"][..]),
        ("cmkdv", &["flow_cmkdv"][..]),
        ("kdv", &["flow_kdv"][..]),
        ("vector_nls", &["flow_vector_nls", "flow_vector_t2", "flow_vector_t3"][..]),
        ("vector_mkdv", &["flow_vector_mkdv"][..]),
    ] {
        for flow in flows {
            cr.records(&reps[scn], scn, flow, 1e-8);
        }
    }
    // The unipotent fixture: u ≡ 2i·e₂₁, so r ≡ 2i and q ≡ 0.
    let seq = VacuumSequence::akns([i(), -i()], &[1, 2, 3]).unwrap();
    let d = 4;
    let f = Series::from_terms(2, seq.window(d).lo, &[(0, Mat::identity(2)), (-1, Mat::unit(2, 1, 0))]);
    let fac = factorize_jet(&seq, &f, d).expect("fixture factorization");
    let mut want = Mat::zeros(2);
    want.set(1, 0, c(0.0, 2.0));
    let mut u = fac.u.clone();
    let u0 = u.get(0).cloned().unwrap_or_else(|| Mat::zeros(2));
    u.set(0, None);
    cr.defect("e21 fixture u(0) − 2i·e₂₁", u0.sub(&want).unwrap().max_abs(), 1e-12);
    cr.defect("e21 fixture t-dependence of u", u.max_abs(), 1e-12);
    cr.records(&reps["akns_e21"], "akns_e21", "flow_akns_t2", 1e-12);
    cr
}

fn criterion3(reps: &BTreeMap<&str, Report>) -> Criterion {
    let mut cr = Criterion::default();
    for scn in ["vector_recovery", "akns_seeded"] {
        let rep = &reps[scn];
        cr.fact(format!("{scn} q recursion depth 4"), rep.record("q_recursion").any(|r| r.case == "depth 4"));
        cr.records(rep, scn, "q_recursion", 1e-8);
        cr.records(rep, scn, "q_closed_forms", 1e-8);
        cr.records(rep, scn, "q_square", 1e-9);
    }
    cr.records(&reps["akns_seeded"], "akns_seeded", "q_tables_2x2", 1e-8);
    // The bracket sign is resolved: one sign holds, the other visibly fails.
    for (scn, rep) in reps {
        cr.records(rep, scn, "lax_bracket", 1e-9);
    }
    let wrong = reps["akns_seeded"].record("lax_bracket_plus_sign").map(|r| r.max_defect).fold(0.0, f64::max);
    cr.fact("opposite Lax sign is rejected", wrong > 1e-3);
    cr.fact("Lax sign recorded", reps["akns_seeded"].notes.get("lax_bracket_sign").is_some_and(|s| s.starts_with("[∂_x − (J_1 + u), Q] = 0")));
    cr
}

fn criterion4(reps: &BTreeMap<&str, Report>) -> Criterion {
    let mut cr = Criterion::default();
    for (scn, rep) in reps {
        if rep.record("tau_closedness").next().is_none() {
            continue;
        }
        for name in ["tau_defining_relation", "tau_closedness", "tau_second_partial", "tau_second_partial_symmetry"] {
            cr.records(rep, scn, name, 1e-9);
        }
    }
    cr
}

fn criterion5(reps: &BTreeMap<&str, Report>) -> Criterion {
    let mut cr = Criterion::default();
    for scn in ["akns_seeded", "akns_e21"] {
        cr.records(&reps[scn], scn, "akns_tau_xx", 1e-8);
        cr.records(&reps[scn], scn, "akns_tau_xt2", 1e-8);
    }
    let conv = reps["akns_seeded"].notes.get("akns_tau_convention");
    cr.fact("AKNS a-convention detected and recorded", conv.is_some_and(|s| !s.ends_with("none")));
    cr.records(&reps["kdv"], "kdv", "kdv_tau", 1e-8);
    cr.records(&reps["kdv"], "kdv", "kdv_two_constructions", 1e-8);
    for scn in ["gl3_full", "gl2_virasoro", "gl3_sigma"] {
        cr.records(&reps[scn], scn, "thm7.1_tau_uu", 1e-8);
    }
    cr.records(&reps["gl3_sigma"], "gl3_sigma", "sigma_tau_vsq", 1e-8);
    cr
}

fn criterion6(reps: &BTreeMap<&str, Report>) -> Criterion {
    let mut cr = Criterion::default();
    for (scn, rep) in reps {
        cr.records(rep, scn, "stabilizer_invariance", 1e-9);
        cr.records(rep, scn, "tau_shift_constancy", 1e-9);
        if *scn != "kdv" {
            cr.records(rep, scn, "conjugation_covariance", 1e-9);
            cr.records(rep, scn, "tau_conjugation_invariance", 1e-9);
        }
    }
    for scn in ["nls", "mkdv", "cmkdv", "kdv", "vector_nls", "vector_mkdv", "gl3_sigma"] {
        cr.records(&reps[scn], scn, "reality_propagation", 1e-9);
    }
    cr
}

fn criterion7(reps: &BTreeMap<&str, Report>) -> Criterion {
    let mut cr = Criterion::default();
    let ells = [-1, 0, 1, 2, 3];
    for (scn, rep) in reps {
        if rep.record("virasoro_bracket").next().is_none() {
            continue;
        }
        for gamma in ["zero", "xi0"] {
            for (a, j) in ells.iter().enumerate() {
                for k in &ells[a + 1..] {
                    let case = format!("j={j},k={k},gamma={gamma}");
                    cr.fact(format!("{scn} bracket {case} checked"), rep.record("virasoro_bracket").any(|r| r.case == case));
                }
            }
        }
        cr.records(rep, scn, "virasoro_bracket", 1e-8);
        cr.records(rep, scn, "virasoro_tangency", 1e-8);
        for name in ["virasoro_frame_variation", "virasoro_general_frame_variation", "virasoro_tau_variation", "virasoro_general_tau_variation"] {
            cr.records(rep, scn, name, 1e-9);
        }
    }
    for scn in ["mkdv", "cmkdv", "vector_mkdv", "gl3_sigma"] {
        cr.records(&reps[scn], scn, "eta_tangency", 1e-8);
        cr.records(&reps[scn], scn, "eta_bracket", 1e-8);
    }
    cr
}

fn criterion8(reps: &BTreeMap<&str, Report>) -> Criterion {
    let mut cr = Criterion::default();
    for scn in ["gl2_virasoro", "gl3_full"] {
        let rep = &reps[scn];
        for l in -1..=3 {
            let prefix = format!("l={l},");
            cr.fact(format!("{scn} operator at ℓ = {l}"), rep.record("virasoro_operator").any(|r| r.case.starts_with(&prefix)));
        }
        // Direct vs ε-route, then ε-route vs the differential operator.
        cr.records(rep, scn, "virasoro_tau_variation", 1e-7);
        cr.records(rep, scn, "virasoro_operator", 1e-7);
        cr.records(rep, scn, "virasoro_frame_variation_gl", 1e-8);
        for name in ["proof_constant_term", "proof_tau_from_xi", "proof_b_from_q", "proof_b_squared", "proof_b_lambda", "proof_trace_b"] {
            cr.records(rep, scn, name, 1e-9);
        }
    }
    cr
}

fn criterion9(reps: &BTreeMap<&str, Report>) -> Criterion {
    let mut cr = Criterion::default();
    let rep = &reps["vector_recovery"];
    cr.records(rep, "vector_recovery", "recovery", 1e-6);
    cr.records(rep, "vector_recovery", "recovery_k_invariance", 1e-8);
    // u = 0 (f = I) must be reported as singular, not as a pass or a crash.
    let seq = VacuumSequence::vector_akns(2, &[1, 2, 3]).unwrap();
    let f = Series::identity(3, seq.window(4).lo);
    let fac = factorize_jet(&seq, &f, 4).expect("identity factorization");
    let degenerate = matches!(vector_akns_recovery(&seq, &fac), Ok(Recovery::Degenerate(_)));
    cr.fact("u = 0 reported as degenerate", degenerate);
    cr
}

fn random_poly(rng: &mut ChaCha8Rng, lo_deg: i32, hi_deg: i32, floor: i32) -> CSeries {
    let terms: Vec<(i32, Mat<C64>)> = (lo_deg..=hi_deg)
        .map(|d| {
            let mut m = Mat::zeros(3);
            for z in m.data.iter_mut() {
                *z = c(uniform_pm1(rng), uniform_pm1(rng));
            }
            (d, m)
        })
        .collect();
    Series::from_terms(3, floor, &terms)
}

fn criterion10() -> Criterion {
    let mut cr = Criterion::default();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let tol = 1e-12;
    let (mut cocycle_id, mut compat, mut adinv, mut deriv, mut deepen) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for _ in 0..40 {
        let x = random_poly(&mut rng, -3, 3, -16);
        let y = random_poly(&mut rng, -3, 3, -16);
        let z = random_poly(&mut rng, -3, 3, -16);
        let br = |a: &CSeries, b: &CSeries| a.commutator(b).unwrap();
        let w = |a: &CSeries, b: &CSeries| cocycle(a, b).unwrap();
        cocycle_id = cocycle_id.max((w(&br(&x, &y), &z) + w(&br(&y, &z), &x) + w(&br(&z, &x), &y)).norm());
        cocycle_id = cocycle_id.max((w(&x, &y) + w(&y, &x)).norm());
        compat = compat.max(w(&x.plus(), &y.plus()).norm()).max(w(&x.minus(), &y.minus()).norm());
        for k in -2..=2 {
            adinv = adinv.max((pairing(&br(&x, &y), &z, k).unwrap() - pairing(&x, &br(&y, &z), k).unwrap()).norm());
        }
        let lhs = x.mul(&y).unwrap().dlambda();
        let rhs = x.dlambda().mul(&y).unwrap().add(&x.mul(&y.dlambda()).unwrap()).unwrap();
        deriv = deriv.max(lhs.max_diff(&rhs).unwrap());
        // A truncated inverse computed on a shallow and a deep floor agrees on its trusted window.
        let spec = SplittingSpec::standard(3);
        let seed = rng.next_u64();
        let shallow = sample_negative_element(&spec, seed, 2, 0.4, -8).unwrap().inv().unwrap().mul(&y).unwrap();
        let deep = sample_negative_element(&spec, seed, 2, 0.4, -24).unwrap().inv().unwrap().mul(&y).unwrap();
        for d in shallow.trusted_lo()..=shallow.top_degree().unwrap() {
            deepen = deepen.max(shallow.coeff(d).unwrap().sub(&deep.coeff(d).unwrap()).unwrap().max_abs());
        }
    }
    cr.defect("2-cocycle identity and skew symmetry", cocycle_id, tol);
    cr.defect("cocycle vanishes on each half", compat, tol);
    cr.defect("ad-invariance of ⟨·,·⟩_k", adinv, tol);
    cr.defect("∂_λ derivation law", deriv, tol);
    cr.defect("trusted window under deepening", deepen, tol);
    cr
}

const SCENARIOS: [&str; 13] = [
    "akns_identity",
    "akns_e21",
    "akns_seeded",
    "nls",
    "mkdv",
    "cmkdv",
    "kdv",
    "vector_nls",
    "vector_mkdv",
    "vector_recovery",
    "gl2_virasoro",
    "gl3_full",
    "gl3_sigma",
];

fn main() -> ExitCode {
    let start = Instant::now();
    let mut reps: BTreeMap<&str, Report> = BTreeMap::new();
    let mut load_failures = Vec::new();
    for name in SCENARIOS {
        match run_config_file(&config(name), None, None) {
            Ok(r) => {
                if !r.pass() {
                    load_failures.push(format!("{name}: {:?}", r.summary.failed));
                }
                reps.insert(name, r);
            }
            Err(e) => {
                println!("scenario {name}: error: {e}");
                return ExitCode::from(2);
            }
        }
    }
    let results = [
        criterion1(),
        criterion2(&reps),
        criterion3(&reps),
        criterion4(&reps),
        criterion5(&reps),
        criterion6(&reps),
        criterion7(&reps),
        criterion8(&reps),
        criterion9(&reps),
        criterion10(),
    ];
    let mut ok = load_failures.is_empty();
    for f in &load_failures {
        println!("scenario report failed: {f}");
    }
    for (k, cr) in results.iter().enumerate() {
        let pass = cr.pass();
        ok &= pass;
        println!("criterion {}: {} {}", k + 1, if pass { "PASS" } else { "FAIL" }, cr.summary());
    }
    let secs = start.elapsed().as_secs_f64();
    let budget = secs < 300.0;
    println!("wall clock: {secs:.1} s ({})", if budget { "within the 5 minute budget" } else { "over the 5 minute budget" });
    if ok && budget {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

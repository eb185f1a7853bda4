//! Factorization, tau and Virasoro fields against closed forms and an
//! independently assembled vacuum frame.

use loopgroup::hierarchy::{named_flow_residual, NamedFlow, VacuumSequence};
use loopgroup::jet::Jet;
use loopgroup::matrix::Mat;
use loopgroup::scalar::{c, C64};
use loopgroup::scattering::factorize_jet;
use loopgroup::series::{CSeries, Series};
use loopgroup::splitting::{sample_negative_element, SplittingSpec};
use loopgroup::tau::ln_tau_jet;
use loopgroup::virasoro::{c_ell, virasoro_field, GammaPreset};

fn i() -> C64 {
    c(0.0, 1.0)
}

fn e21_frame(lo: i32) -> CSeries {
    Series::from_terms(2, lo, &[(0, Mat::identity(2)), (-1, Mat::unit(2, 1, 0))])
}

/// `Σ_{β+γ=α} x_β y_γ`, assembled index by index.
fn jet_product(x: &Jet<CSeries>, y: &Jet<CSeries>, n: usize, lo: i32) -> Vec<CSeries> {
    let sp = x.space();
    let mut out = vec![Series::zero(n, lo); sp.len()];
    for a in 0..sp.len() {
        for b in 0..sp.len() {
            let sum: Vec<u8> = sp.exps(a).iter().zip(sp.exps(b)).map(|(p, q)| p + q).collect();
            let Some(k) = sp.index_of(&sum) else { continue };
            if let (Some(p), Some(q)) = (x.get(a), y.get(b)) {
                out[k] = out[k].add(&p.mul(q).unwrap()).unwrap();
            }
        }
    }
    out
}

/// `V(t) = Π_v exp(t_v J_v)` with commuting `J_v`: coefficient `Π_v J_v^{α_v}/α_v!`.
fn vacuum_coefficient(seq: &VacuumSequence, alpha: &[u8], lo: i32) -> CSeries {
    let mut acc = Series::identity(seq.n, lo);
    for (v, &k) in alpha.iter().enumerate() {
        let j = seq.generator_series::<C64>(v, lo);
        let mut fact = 1.0;
        for m in 1..=k {
            acc = acc.mul(&j).unwrap();
            fact *= m as f64;
        }
        acc = acc.scale(c(1.0 / fact, 0.0));
    }
    acc
}

fn compare_trusted(a: &CSeries, b: &CSeries) -> f64 {
    let (Some(ta), Some(tb)) = (a.top_degree(), b.top_degree()) else {
        return a.max_abs().max(b.max_abs());
    };
    let floor = a.trusted_lo().max(b.trusted_lo());
    let mut worst: f64 = 0.0;
    for d in floor..=ta.max(tb) {
        worst = worst.max(a.coeff(d).unwrap().sub(&b.coeff(d).unwrap()).unwrap().max_abs());
    }
    worst
}

fn check_direct_splitting(seq: &VacuumSequence, d: usize, seed: u64) {
    let lo = seq.window(d).lo;
    let f = sample_negative_element(&SplittingSpec::standard(seq.n), seed, 3, 0.3, lo).unwrap();
    let fac = factorize_jet(seq, &f, d).unwrap();
    let sp = fac.space.clone();
    let finv = f.inv().unwrap();
    let lhs = jet_product(&fac.minv, &fac.e, seq.n, lo);
    let ident = jet_product(&fac.m, &fac.minv, seq.n, lo);
    for k in 0..sp.len() {
        let alpha = sp.exps(k);
        let want = vacuum_coefficient(seq, alpha, lo).mul(&finv).unwrap();
        assert!(compare_trusted(&lhs[k], &want) < 1e-10, "M⁻¹E ≠ Vf⁻¹ at {alpha:?}");
        let id = if k == 0 { Series::identity(seq.n, lo) } else { Series::zero(seq.n, lo) };
        assert!(compare_trusted(&ident[k], &id) < 1e-10, "M·M⁻¹ ≠ I at {alpha:?}");
        let m = fac.m.get(k).unwrap();
        let e = fac.e.get(k).unwrap();
        let m_shift = if k == 0 { m.sub(&f).unwrap() } else { m.clone() };
        if k == 0 {
            assert!(m_shift.max_abs() == 0.0, "M(0) must equal f exactly");
        } else {
            assert!(m_shift.top_degree().is_none_or(|t| t < 0), "M − f has a non-negative degree at {alpha:?}");
        }
        assert!(e.bottom_degree().is_none_or(|b| b >= 0), "E has a negative degree at {alpha:?}");
    }
    let e0 = fac.e.get(0).unwrap();
    assert!(e0.sub(&Series::identity(seq.n, lo)).unwrap().max_abs() == 0.0);
}

#[test]
fn factors_match_direct_vacuum_frame_akns() {
    let seq = VacuumSequence::akns([i(), -i()], &[1, 2]).unwrap();
    check_direct_splitting(&seq, 3, 5);
}

#[test]
fn factors_match_direct_vacuum_frame_gl3() {
    let seq = VacuumSequence::gl_n(&[c(1.0, 0.0), c(-0.5, 0.3), c(0.2, -1.0)], &[1, 2]).unwrap();
    check_direct_splitting(&seq, 3, 9);
}

#[test]
fn factors_match_direct_vacuum_frame_kdv() {
    let seq = VacuumSequence::kdv_twisted(&[1, 3]).unwrap();
    check_direct_splitting(&seq, 3, 4);
}

#[test]
fn unipotent_fixture_gives_constant_potential() {
    let seq = VacuumSequence::akns([i(), -i()], &[1, 2, 3]).unwrap();
    let d = 4;
    let f = e21_frame(seq.window(d).lo);
    let fac = factorize_jet(&seq, &f, d).unwrap();
    let mut want = Mat::zeros(2);
    want.set(1, 0, c(0.0, 2.0));
    let u0 = fac.u.get(0).unwrap();
    assert!(u0.sub(&want).unwrap().max_abs() <= 1e-12);
    let mut rest = fac.u.clone();
    rest.set(0, None);
    assert!(rest.max_abs() <= 1e-12);
    assert!(ln_tau_jet(&seq, &fac).unwrap().max_abs() <= 1e-12);
    assert!(named_flow_residual(&seq, NamedFlow::AknsT2, &fac.u).unwrap() <= 1e-12);
}

#[test]
fn stabilizer_data_is_the_vacuum() {
    // f = exp(λ⁻¹C), C = ca, commutes with every J_j: M = f, E = V, u = 0.
    // M⁻¹M_λ = −λ⁻²C, so ln τ = −tr(aC)·x is linear in the x-flow alone.
    let seq = VacuumSequence::akns([i(), -i()], &[1, 2]).unwrap();
    let d = 3;
    let lo = seq.window(d).lo;
    let cm = seq.a.scale(c(0.4, -0.2));
    let f = Series::monomial(&cm, -1, lo).exp_negative().unwrap();
    let fac = factorize_jet(&seq, &f, d).unwrap();
    assert!(fac.u.max_abs() < 1e-12);
    let mut x = ln_tau_jet(&seq, &fac).unwrap();
    let slope = -seq.a.mul(&cm).unwrap().trace();
    let ix = fac.space.index_of(&[1, 0]).unwrap();
    assert!((x.get(ix).copied().unwrap() - slope).norm() < 1e-12);
    x.set(ix, None);
    assert!(x.max_abs() < 1e-12);
    for k in 0..fac.space.len() {
        assert!(compare_trusted(fac.m.get(k).unwrap(), &if k == 0 { f.clone() } else { Series::zero(2, lo) }) < 1e-12);
    }
}

#[test]
fn virasoro_field_on_unipotent_fixture() {
    let lo = -12;
    let f = e21_frame(lo);
    let zero = GammaPreset::Zero.matrix(2);
    let e = Mat::unit(2, 1, 0);
    for (l, deg) in [(-1, -2), (0, -1)] {
        let z = virasoro_field(&f, &zero, l).unwrap();
        assert!(z.max_diff(&Series::monomial(&e, deg, lo)).unwrap() == 0.0, "ℓ = {l}");
    }
    // Positive indices push λ^{ℓ−1}e₂₁ into the non-negative half, where it is dropped.
    for l in 1..4 {
        assert!(virasoro_field(&f, &zero, l).unwrap().is_zero());
    }
}

#[test]
fn virasoro_field_and_central_term_on_exponentials() {
    // f = exp(λ⁻¹A): f_λf⁻¹ = −λ⁻²A, so Z_ℓ = λ^{ℓ−1}Af for ℓ ≤ 0, else 0,
    // and tr((f_λf⁻¹)²) = λ⁻⁴tr(A²).
    let lo = -24;
    let a = Mat::from_rows(&[vec![c(0.3, 0.1), c(-0.2, 0.0)], vec![c(0.5, -0.4), c(0.1, 0.2)]]);
    let f = Series::monomial(&a, -1, lo).exp_negative().unwrap();
    let zero = GammaPreset::Zero.matrix(2);
    for l in -1..=3 {
        let z = virasoro_field(&f, &zero, l).unwrap();
        if l <= 0 {
            let want = Series::monomial(&a, l - 1, lo).mul(&f).unwrap();
            assert!(compare_trusted(&z, &want) < 1e-12, "ℓ = {l}");
        } else {
            assert!(z.max_abs() < 1e-12, "ℓ = {l}");
        }
        let want = if l == 2 { a.mul(&a).unwrap().trace() } else { c(0.0, 0.0) };
        assert!((c_ell(&f, l).unwrap() - want).norm() < 1e-12, "c_ℓ at ℓ = {l}");
    }
}

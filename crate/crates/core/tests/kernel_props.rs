//! Series-kernel properties against brute-force oracles.

use std::collections::BTreeMap;

use loopgroup::matrix::Mat;
use loopgroup::scalar::{c, C64};
use loopgroup::series::{directional_derivative, CSeries, Series};
use loopgroup::splitting::{cocycle, pairing};
use proptest::prelude::*;

const N: usize = 2;

fn mat() -> impl Strategy<Value = Mat<C64>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), N * N).prop_map(|v| {
        let mut m = Mat::zeros(N);
        for (k, (re, im)) in v.into_iter().enumerate() {
            m.data[k] = c(re, im);
        }
        m
    })
}

/// Laurent polynomial with degrees in `lo_deg..=hi_deg`.
fn poly(lo_deg: i32, hi_deg: i32) -> impl Strategy<Value = BTreeMap<i32, Mat<C64>>> {
    prop::collection::vec(mat(), (hi_deg - lo_deg + 1) as usize)
        .prop_map(move |ms| ms.into_iter().enumerate().map(|(k, m)| (lo_deg + k as i32, m)).collect())
}

fn series(p: &BTreeMap<i32, Mat<C64>>, lo: i32) -> CSeries {
    let terms: Vec<(i32, Mat<C64>)> = p.iter().map(|(&d, m)| (d, m.clone())).collect();
    Series::from_terms(N, lo, &terms)
}

fn conv(a: &BTreeMap<i32, Mat<C64>>, b: &BTreeMap<i32, Mat<C64>>) -> BTreeMap<i32, Mat<C64>> {
    let mut out: BTreeMap<i32, Mat<C64>> = BTreeMap::new();
    for (&i, x) in a {
        for (&j, y) in b {
            let e = out.entry(i + j).or_insert_with(|| Mat::zeros(N));
            for p in 0..N {
                for q in 0..N {
                    let mut s = c(0.0, 0.0);
                    for r in 0..N {
                        s += x.get(p, r) * y.get(r, q);
                    }
                    e.set(p, q, e.get(p, q) + s);
                }
            }
        }
    }
    out
}

fn diff_from(s: &CSeries, p: &BTreeMap<i32, Mat<C64>>, from: i32, to: i32) -> f64 {
    let mut worst: f64 = 0.0;
    for d in from..=to {
        let got = s.coeff(d).unwrap();
        let want = p.get(&d).cloned().unwrap_or_else(|| Mat::zeros(N));
        worst = worst.max(got.sub(&want).unwrap().max_abs());
    }
    worst
}

fn trace_coeff_brute(a: &BTreeMap<i32, Mat<C64>>, b: &BTreeMap<i32, Mat<C64>>, k: i32) -> C64 {
    conv(a, b).get(&k).map(|m| m.trace()).unwrap_or(c(0.0, 0.0))
}

fn comm(a: &CSeries, b: &CSeries) -> CSeries {
    a.commutator(b).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn product_matches_convolution(a in poly(-3, 2), b in poly(-2, 3)) {
        let p = series(&a, -12).mul(&series(&b, -12)).unwrap();
        prop_assert!(p.is_exact());
        prop_assert!(diff_from(&p, &conv(&a, &b), -5, 5) < 1e-12);
    }

    #[test]
    fn negative_inverse_matches_geometric_series(nn in poly(-2, -1), scale in 0.05f64..0.4) {
        let lo = -10;
        let nn: BTreeMap<i32, Mat<C64>> = nn.into_iter().map(|(d, m)| (d, m.scale(c(scale, 0.0)))).collect();
        let mut f = nn.clone();
        f.insert(0, Mat::identity(N));
        let inv = series(&f, lo).inv().unwrap();
        // Σ (−N)^k, truncated once every new term lies below the floor.
        let mut want: BTreeMap<i32, Mat<C64>> = BTreeMap::from([(0, Mat::identity(N))]);
        let neg: BTreeMap<i32, Mat<C64>> = nn.iter().map(|(&d, m)| (d, m.neg())).collect();
        let mut power = want.clone();
        for _ in 0..(-lo) {
            power = conv(&power, &neg);
            for (d, m) in &power {
                let e = want.entry(*d).or_insert_with(|| Mat::zeros(N));
                *e = e.add(m).unwrap();
            }
        }
        prop_assert!(inv.trusted_lo() >= lo);
        prop_assert!(diff_from(&inv, &want, inv.trusted_lo(), 0) < 1e-12);
    }

    #[test]
    fn pairing_is_trace_coefficient(a in poly(-2, 2), b in poly(-2, 2), k in -3i32..3) {
        let got = pairing(&series(&a, -10), &series(&b, -10), k).unwrap();
        prop_assert!((got - trace_coeff_brute(&a, &b, k)).norm() < 1e-12);
    }

    #[test]
    fn pairing_is_ad_invariant(x in poly(-2, 2), y in poly(-2, 2), z in poly(-2, 2), k in -3i32..3) {
        let (x, y, z) = (series(&x, -12), series(&y, -12), series(&z, -12));
        let lhs = pairing(&comm(&x, &y), &z, k).unwrap();
        let rhs = pairing(&x, &comm(&y, &z), k).unwrap();
        prop_assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn cocycle_is_skew_and_closed(x in poly(-2, 2), y in poly(-2, 2), z in poly(-2, 2)) {
        let (x, y, z) = (series(&x, -12), series(&y, -12), series(&z, -12));
        let w = |a: &CSeries, b: &CSeries| cocycle(a, b).unwrap();
        prop_assert!((w(&x, &y) + w(&y, &x)).norm() < 1e-12);
        let cyc = w(&comm(&x, &y), &z) + w(&comm(&y, &z), &x) + w(&comm(&z, &x), &y);
        prop_assert!(cyc.norm() < 1e-12);
    }

    #[test]
    fn cocycle_vanishes_on_each_half(p1 in poly(0, 3), p2 in poly(0, 3), m1 in poly(-3, -1), m2 in poly(-3, -1)) {
        let w = |a: &BTreeMap<i32, Mat<C64>>, b: &BTreeMap<i32, Mat<C64>>| cocycle(&series(a, -12), &series(b, -12)).unwrap();
        prop_assert!(w(&p1, &p2).norm() < 1e-12);
        prop_assert!(w(&m1, &m2).norm() < 1e-12);
    }

    #[test]
    fn dlambda_is_a_derivation(a in poly(-3, 2), b in poly(-2, 3)) {
        let (a, b) = (series(&a, -12), series(&b, -12));
        let lhs = a.mul(&b).unwrap().dlambda();
        let rhs = a.dlambda().mul(&b).unwrap().add(&a.mul(&b.dlambda()).unwrap()).unwrap();
        prop_assert!(lhs.max_diff(&rhs).unwrap() < 1e-12);
    }

    #[test]
    fn projections_split_the_identity(a in poly(-3, 3)) {
        let a = series(&a, -12);
        prop_assert!(a.plus().add(&a.minus()).unwrap().max_diff(&a).unwrap() == 0.0);
        prop_assert!(a.minus().top_degree().is_none_or(|t| t < 0));
        prop_assert!(a.plus().bottom_degree().is_none_or(|b| b >= 0));
    }

    /// Deepening the storage floor never changes a coefficient that was trusted.
    #[test]
    fn trusted_window_survives_deepening(nn in poly(-2, -1), g in poly(-1, 2), scale in 0.05f64..0.5) {
        let mut f = nn.clone();
        for m in f.values_mut() {
            *m = m.scale(c(scale, 0.0));
        }
        f.insert(0, Mat::identity(N));
        let run = |lo: i32| series(&f, lo).inv().unwrap().mul(&series(&g, lo)).unwrap().mul(&series(&f, lo).inv().unwrap()).unwrap();
        let shallow = run(-8);
        let deep = run(-20);
        let top = shallow.top_degree().unwrap();
        prop_assert!(shallow.trusted_lo() <= top);
        for d in shallow.trusted_lo()..=top {
            prop_assert!(shallow.coeff(d).unwrap().sub(&deep.coeff(d).unwrap()).unwrap().max_abs() < 1e-12);
        }
    }

    /// The ε-route of the inverse equals −f⁻¹·df·f⁻¹ and a central difference.
    #[test]
    fn dual_route_matches_difference_quotient(nn in poly(-2, -1), dn in poly(-2, -1)) {
        let lo = -10;
        let mut f = nn;
        for m in f.values_mut() {
            *m = m.scale(c(0.3, 0.0));
        }
        f.insert(0, Mat::identity(N));
        let f = series(&f, lo);
        let df = series(&dn, lo);
        let d_inv = directional_derivative(&f, &df, |g| g.inv()).unwrap();
        let finv = f.inv().unwrap();
        let closed = finv.mul(&df).unwrap().mul(&finv).unwrap().neg();
        let h = 1e-5;
        let fd = f.add(&df.scale(c(h, 0.0))).unwrap().inv().unwrap()
            .sub(&f.sub(&df.scale(c(h, 0.0))).unwrap().inv().unwrap()).unwrap()
            .scale(c(0.5 / h, 0.0));
        let tl = d_inv.trusted_lo().max(closed.trusted_lo()).max(fd.trusted_lo());
        for d in tl..=0 {
            let a = d_inv.coeff(d).unwrap();
            prop_assert!(a.sub(&closed.coeff(d).unwrap()).unwrap().max_abs() < 1e-12);
            prop_assert!(a.sub(&fd.coeff(d).unwrap()).unwrap().max_abs() < 1e-7);
        }
    }
}

#[test]
fn reads_below_the_floor_fail_loudly() {
    let f: CSeries = Series::from_terms(N, -6, &[(0, Mat::identity(N)), (-1, Mat::unit(N, 0, 1).add(&Mat::unit(N, 1, 0)).unwrap())]);
    let inv = f.inv().unwrap();
    assert!(!inv.is_exact());
    assert!(inv.coeff(inv.trusted_lo() - 1).is_err());
}

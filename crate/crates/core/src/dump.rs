//! CSV coefficient dumps of `M`, `E`, `u_f`, `v_f` and `ln τ_f`.
//!
//! Columns: `multi_index` (exponents joined by `;`), `lambda_degree` (empty
//! for matrix and scalar jets), `row`, `col` (1-based), `re`, `im`. Rows are
//! sorted by multi-index (lexicographic on exponent tuples), then degree,
//! row and column. Every jet coefficient appears, zero entries included; a
//! series contributes its stored degrees from the trusted floor upward.

use std::path::Path;

use crate::hierarchy::Family;
use crate::jet::Jet;
use crate::matrix::Mat;
use crate::scalar::{c, C64};
use crate::scattering::factorize_jet;
use crate::scenario::{Scenario, ScenarioError};
use crate::series::Series;
use crate::tau::ln_tau_jet;

pub const TARGETS: [&str; 5] = ["M", "E", "u", "v", "lntau"];

const HEADER: [&str; 6] = ["multi_index", "lambda_degree", "row", "col", "re", "im"];

fn io_err(path: &Path) -> impl FnOnce(csv::Error) -> ScenarioError + '_ {
    move |e| ScenarioError::Io { path: path.display().to_string(), message: e.to_string() }
}

struct Row {
    key: Vec<u8>,
    degree: Option<i32>,
    i: usize,
    j: usize,
    z: C64,
}

fn matrix_rows(key: &[u8], degree: Option<i32>, m: &Mat<C64>, out: &mut Vec<Row>) {
    for i in 0..m.n {
        for j in 0..m.n {
            out.push(Row { key: key.to_vec(), degree, i, j, z: m.get(i, j) });
        }
    }
}

fn series_rows(key: &[u8], s: &Series<C64>, out: &mut Vec<Row>) -> crate::Result<()> {
    let (Some(bottom), Some(top)) = (s.bottom_degree(), s.top_degree()) else { return Ok(()) };
    let from = if s.is_exact() { bottom } else { s.trusted_lo() };
    for deg in from..=top {
        matrix_rows(key, Some(deg), &s.coeff(deg)?, out);
    }
    Ok(())
}

fn jet_rows<T>(jet: &Jet<T>, mut emit: impl FnMut(&[u8], Option<&T>, &mut Vec<Row>) -> crate::Result<()>) -> crate::Result<Vec<Row>>
where
    T: crate::jet::JetCoeff,
{
    let sp = jet.space().clone();
    let mut idx: Vec<usize> = (0..sp.len()).collect();
    idx.sort_by(|&a, &b| sp.exps(a).cmp(sp.exps(b)));
    let mut out = Vec::new();
    for g in idx {
        emit(sp.exps(g), jet.get(g), &mut out)?;
    }
    Ok(out)
}

/// Collect the rows of `target` for a built scenario.
fn collect(scn: &Scenario, target: &str) -> Result<Vec<Row>, ScenarioError> {
    if !TARGETS.contains(&target) {
        return Err(ScenarioError::Config(format!("unknown dump target {target:?} (expected one of {})", TARGETS.join(", "))));
    }
    let num = |stage: &'static str| ScenarioError::numerical(stage);
    let fac = factorize_jet(&scn.seq, &scn.f, scn.config.order).map_err(num("factorization"))?;
    let n = scn.seq.n;
    let rows = match target {
        "M" | "E" => {
            let jet = if target == "M" { &fac.m } else { &fac.e };
            jet_rows(jet, |k, s, out| match s {
                Some(s) => series_rows(k, s, out),
                None => Ok(()),
            })
        }
        "u" | "v" => {
            let jet = if target == "u" {
                fac.u.clone()
            } else {
                if scn.seq.family != Family::GlN {
                    return Err(ScenarioError::Config("dump target v applies to gl_n".into()));
                }
                fac.v_offdiag().map_err(num("v"))?
            };
            jet_rows(&jet, |k, m, out| {
                matrix_rows(k, None, &m.cloned().unwrap_or_else(|| Mat::zeros(n)), out);
                Ok(())
            })
        }
        _ => {
            let x = ln_tau_jet(&scn.seq, &fac).map_err(num("ln tau"))?;
            jet_rows(&x, |k, z, out| {
                out.push(Row { key: k.to_vec(), degree: None, i: 0, j: 0, z: z.copied().unwrap_or(c(0.0, 0.0)) });
                Ok(())
            })
        }
    };
    let mut rows = rows.map_err(num("dump"))?;
    rows.sort_by(|a, b| (&a.key, a.degree, a.i, a.j).cmp(&(&b.key, b.degree, b.i, b.j)));
    Ok(rows)
}

/// Write the dump of `target` to `out`.
pub fn write_dump(scn: &Scenario, target: &str, out: &Path) -> Result<usize, ScenarioError> {
    let rows = collect(scn, target)?;
    let mut w = csv::Writer::from_path(out).map_err(io_err(out))?;
    w.write_record(HEADER).map_err(io_err(out))?;
    for r in &rows {
        let key = r.key.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(";");
        let deg = r.degree.map(|d| d.to_string()).unwrap_or_default();
        w.write_record([key, deg, (r.i + 1).to_string(), (r.j + 1).to_string(), r.z.re.to_string(), r.z.im.to_string()])
            .map_err(io_err(out))?;
    }
    w.flush().map_err(|e| ScenarioError::Io { path: out.display().to_string(), message: e.to_string() })?;
    Ok(rows.len())
}

/// Read `f = M(0)` back from an `M` dump: the rows with an all-zero
/// multi-index. The result is trusted down to its lowest listed degree.
pub fn read_frame_at_origin(path: &Path, n: usize, lo: i32) -> Result<Series<C64>, ScenarioError> {
    let bad = |msg: String| ScenarioError::Config(format!("{}: {msg}", path.display()));
    let mut r = csv::Reader::from_path(path).map_err(io_err(path))?;
    let headers = r.headers().map_err(io_err(path))?.clone();
    if headers.iter().collect::<Vec<_>>() != HEADER {
        return Err(bad("unexpected header".into()));
    }
    let mut coeffs: std::collections::BTreeMap<i32, Mat<C64>> = Default::default();
    for rec in r.records() {
        let rec = rec.map_err(io_err(path))?;
        if rec[0].split(';').any(|e| e != "0") {
            continue;
        }
        let deg: i32 = rec[1].parse().map_err(|_| bad(format!("bad lambda_degree {:?}", &rec[1])))?;
        let i: usize = rec[2].parse().map_err(|_| bad("bad row".into()))?;
        let j: usize = rec[3].parse().map_err(|_| bad("bad col".into()))?;
        let re: f64 = rec[4].parse().map_err(|_| bad("bad re".into()))?;
        let im: f64 = rec[5].parse().map_err(|_| bad("bad im".into()))?;
        if i == 0 || j == 0 || i > n || j > n {
            return Err(bad(format!("entry ({i}, {j}) outside {n}×{n}")));
        }
        if deg < lo {
            return Err(bad(format!("degree {deg} below the window floor {lo}")));
        }
        coeffs.entry(deg).or_insert_with(|| Mat::zeros(n)).set(i - 1, j - 1, c(re, im));
    }
    let Some(&min_deg) = coeffs.keys().next() else { return Err(bad("no rows at the origin".into())) };
    let terms: Vec<(i32, Mat<C64>)> = coeffs.into_iter().collect();
    Ok(Series::from_terms(n, lo, &terms).with_trusted_lo(min_deg))
}

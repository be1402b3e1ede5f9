//! Instance files, JSON encoding of results, exit codes and human-readable
//! rendering of cones.

use std::io;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::applications::{HullOutcome, TrsSolution};
use crate::conditions::{
    Cond2Verdict, Cond4Verdict, Cond5Verdict, Cond6Verdict, ConditionReport, Overall,
};
use crate::cutgen::{ConeInstance, CutCone, CutResult};
use crate::disjunction::GPlusSet;
use crate::error::{Error, GateFailure, Result};
use crate::hullcert::CertReport;
use crate::options::Options;
use crate::socr::SocrCone;
use crate::spectral::SymMatrix;

pub const FORMAT_VERSION: &str = "1";

/// On-disk instance: `A0` or `B0` + `b0`, then `A1` and an optional `h`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub version: String,
    #[serde(rename = "A0", default, skip_serializing_if = "Option::is_none")]
    pub a0: Option<Vec<Vec<f64>>>,
    #[serde(rename = "B0", default, skip_serializing_if = "Option::is_none")]
    pub b0_mat: Option<Vec<Vec<f64>>>,
    #[serde(rename = "b0", default, skip_serializing_if = "Option::is_none")]
    pub b0: Option<Vec<f64>>,
    #[serde(rename = "A1")]
    pub a1: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<Vec<f64>>,
    #[serde(default)]
    pub options: Options,
}

fn dense(rows: &[Vec<f64>], what: &str) -> Result<DMatrix<f64>> {
    let r = rows.len();
    let c = rows.first().map_or(0, Vec::len);
    if r == 0 || rows.iter().any(|row| row.len() != c) {
        return Err(Error::Dimension(format!("{what} must be a non-empty rectangular matrix")));
    }
    Ok(DMatrix::from_fn(r, c, |i, j| rows[i][j]))
}

impl InstanceFile {
    pub fn parse(text: &str) -> Result<Self> {
        let f: InstanceFile = serde_json::from_str(text).map_err(|e| Error::Input(e.to_string()))?;
        if f.version != FORMAT_VERSION {
            return Err(Error::Input(format!("unsupported version {:?}", f.version)));
        }
        Ok(f)
    }

    pub fn read(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn to_instance(&self, opts: Options) -> Result<ConeInstance> {
        let a1 = SymMatrix::new(dense(&self.a1, "A1")?)?;
        let h = self.h.as_ref().map(|v| DVector::from_column_slice(v));
        match (&self.a0, &self.b0_mat, &self.b0) {
            (Some(a0), None, None) => ConeInstance::from_matrices(SymMatrix::new(dense(a0, "A0")?)?, a1, h, opts),
            (None, Some(bm), Some(b)) => {
                ConeInstance::from_bb(dense(bm, "B0")?, DVector::from_column_slice(b), a1, h, opts)
            }
            _ => Err(Error::Input("give either A0 or both B0 and b0".into())),
        }
    }
}

/// Writes every float with 17 significant digits.
struct Sig17;

impl serde_json::ser::Formatter for Sig17 {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, v: f64) -> io::Result<()> {
        write!(w, "{v:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, v: f32) -> io::Result<()> {
        write!(w, "{:.16e}", f64::from(v))
    }
}

pub fn to_json_string(v: &Value) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Sig17);
    v.serialize(&mut ser).expect("serializing a Value cannot fail");
    String::from_utf8(buf).expect("JSON output is UTF-8")
}

pub fn vec_value(v: &DVector<f64>) -> Value {
    json!(v.iter().copied().collect::<Vec<f64>>())
}

pub fn mat_value(m: &DMatrix<f64>) -> Value {
    json!((0..m.nrows())
        .map(|i| m.row(i).iter().copied().collect::<Vec<f64>>())
        .collect::<Vec<_>>())
}

pub fn value_to_vec(v: &Value) -> Option<DVector<f64>> {
    let xs: Option<Vec<f64>> = v.as_array()?.iter().map(Value::as_f64).collect();
    xs.map(DVector::from_vec)
}

pub fn value_to_mat(v: &Value) -> Option<DMatrix<f64>> {
    let rows: Option<Vec<Vec<f64>>> = v
        .as_array()?
        .iter()
        .map(|r| r.as_array()?.iter().map(Value::as_f64).collect())
        .collect();
    dense(&rows?, "matrix").ok()
}

pub fn report_value(r: &ConditionReport) -> Value {
    let cond2 = r.cond2.as_ref().map(|c| match c {
        Cond2Verdict::Found { x } => json!({"verdict": "Found", "x": vec_value(x)}),
        Cond2Verdict::Infeasible { t_star, lambda_min } => {
            json!({"verdict": "Infeasible", "t_star": t_star, "lambda_min": lambda_min})
        }
        Cond2Verdict::Indeterminate => json!({"verdict": "Indeterminate"}),
    });
    let cond3 = r.cond3.as_ref().map(|c| {
        json!({
            "verdict": c.kind,
            "null_basis": mat_value(&c.null_basis),
            "restricted": c.restricted.as_ref().map(|m| mat_value(m.matrix())),
        })
    });
    let cond4 = r.cond4.as_ref().map(|c| match c {
        Cond4Verdict::NotApplicable => json!({"verdict": "NotApplicable"}),
        Cond4Verdict::Verified { d } => json!({"verdict": "Verified", "d": vec_value(d)}),
        Cond4Verdict::Violated { m } => json!({"verdict": "Violated", "restricted": mat_value(m.matrix())}),
        Cond4Verdict::Indeterminate { m } => {
            json!({"verdict": "Indeterminate", "restricted": mat_value(m.matrix())})
        }
    });
    let cond5 = r.cond5.as_ref().map(|c| match c {
        Cond5Verdict::NotApplicable => json!({"verdict": "NotApplicable"}),
        Cond5Verdict::VerifiedApex { d } => json!({"verdict": "VerifiedApex", "d": vec_value(d)}),
        Cond5Verdict::VerifiedContainment { reason } => {
            json!({"verdict": "VerifiedContainment", "reason": reason})
        }
        Cond5Verdict::FalsifiedBySample { x } => json!({"verdict": "FalsifiedBySample", "x": vec_value(x)}),
        Cond5Verdict::Unknown => json!({"verdict": "Unknown"}),
    });
    let cond6 = r.cond6.as_ref().map(cond6_value);
    json!({
        "cond1": r.cond1,
        "cond2": cond2,
        "cond3": cond3,
        "cond4": cond4,
        "cond5": cond5,
        "cond6": cond6,
        "overall": r.overall(),
        "warnings": r.warnings,
    })
}

pub fn cond6_value(c: &Cond6Verdict) -> Value {
    match c {
        Cond6Verdict::Holds => json!({"verdict": "Holds"}),
        Cond6Verdict::Fails { x } => json!({"verdict": "Fails", "x": vec_value(x)}),
        Cond6Verdict::Unknown => json!({"verdict": "Unknown"}),
    }
}

const SUBSCRIPTS: [char; 10] = ['₀', '₁', '₂', '₃', '₄', '₅', '₆', '₇', '₈', '₉'];

fn var(i: usize) -> String {
    let digits: String = (i + 1).to_string().chars().map(|c| SUBSCRIPTS[c as usize - '0' as usize]).collect();
    format!("x{digits}")
}

fn coef(c: f64) -> String {
    let r = c.round();
    if (c - r).abs() <= 1e-9 * c.abs().max(1.0) {
        format!("{}", r.abs() as i64)
    } else {
        format!("{:.6}", c.abs()).trim_end_matches('0').to_string()
    }
}

fn linear_form(c: &[f64]) -> String {
    let big = c.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let mut out = String::new();
    for (i, &v) in c.iter().enumerate() {
        if v.abs() <= 1e-12 * big.max(1.0) {
            continue;
        }
        let k = coef(v);
        let term = if k == "1" { var(i) } else { format!("{k}{}", var(i)) };
        if out.is_empty() {
            if v < 0.0 {
                out.push('-');
            }
        } else {
            out.push_str(if v < 0.0 { " - " } else { " + " });
        }
        out.push_str(&term);
    }
    if out.is_empty() {
        "0".into()
    } else {
        out
    }
}

fn lead_index(c: &[f64]) -> usize {
    let big = c.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    c.iter().position(|v| v.abs() > 1e-12 * big.max(1.0)).unwrap_or(c.len())
}

/// Render `{‖Bᵀx‖ ≤ bᵀx}` as text, e.g. `‖(x₂;x₄)‖ ≤ x₃`.
pub fn render_cone(cone: &SocrCone) -> String {
    let b = cone.b();
    let scale = b.iter().fold(0.0f64, |a, v| if v.abs() > a.abs() { *v } else { a }).abs();
    let scale = if scale == 0.0 { 1.0 } else { scale };
    let bm = cone.b_mat() / scale;
    let gram = &bm * bm.transpose();
    let n = gram.nrows();
    let off = (0..n)
        .flat_map(|i| (0..n).filter(move |j| *j != i).map(move |j| (i, j)))
        .fold(0.0f64, |a, (i, j)| a.max(gram[(i, j)].abs()));
    let big = gram.amax().max(1e-300);
    let mut forms: Vec<Vec<f64>> = if off <= 1e-12 * big {
        (0..n)
            .filter(|&i| gram[(i, i)] > 1e-12 * big)
            .map(|i| {
                let mut c = vec![0.0; n];
                c[i] = gram[(i, i)].sqrt();
                c
            })
            .collect()
    } else {
        (0..bm.ncols())
            .map(|j| bm.column(j).iter().copied().collect::<Vec<f64>>())
            .filter(|c| c.iter().any(|v| v.abs() > 1e-12 * big.sqrt()))
            .collect()
    };
    forms.sort_by_key(|c| lead_index(c));
    let bn: Vec<f64> = b.iter().map(|v| v / scale).collect();
    if forms.is_empty() {
        return format!("0 ≤ {}", linear_form(&bn));
    }
    let lhs = forms.iter().map(|c| linear_form(c)).collect::<Vec<_>>().join(";");
    format!("‖({lhs})‖ ≤ {}", linear_form(&bn))
}

pub fn cone_value(cone: &SocrCone) -> Value {
    json!({
        "B": mat_value(cone.b_mat()),
        "b": vec_value(cone.b()),
        "A": mat_value(cone.a().matrix()),
        "inequality": render_cone(cone),
    })
}

pub fn cut_value(cut: &CutResult, tol: f64) -> Value {
    let cone = match &cut.cone_s {
        CutCone::Soc(c) | CutCone::Halfspace(c) => cone_value(c),
    };
    json!({
        "s": cut.s,
        "s_rational": cut.s_rational(tol.max(1e-12) * 10.0).map(|(p, q)| vec![p, q]),
        "T": cut.t_set,
        "epsilon": cut.epsilon_used,
        "A_s": mat_value(cut.a_s.matrix()),
        "halfspace": cut.is_halfspace(),
        "cone": cone,
        "xbar": vec_value(&cut.xbar),
        "report": report_value(&cut.report),
    })
}

pub fn gplus_value(g: &GPlusSet) -> Value {
    json!({
        "c1": vec_value(&g.c1),
        "d1": g.d1,
        "c2": vec_value(&g.c2),
        "d2": g.d2,
        "s": g.s,
        "b_s": g.b_s.as_ref().map(vec_value),
    })
}

pub fn trs_value(t: &TrsSolution) -> Value {
    json!({
        "value": t.value,
        "y": vec_value(&t.y),
        "l": t.l,
        "u": t.u,
        "s": t.s,
        "convex": t.convex,
        "recovered": t.recovered,
        "y_lifted": t.y_lifted.as_ref().map(vec_value),
        "certificates": t.certificates.iter().map(|d| json!({
            "x_l": vec_value(&d.x_l),
            "x_u": vec_value(&d.x_u),
            "weight": d.weight,
        })).collect::<Vec<_>>(),
        "warnings": t.warnings,
    })
}

pub fn hull_value(h: &HullOutcome, tol: f64) -> Value {
    match h {
        HullOutcome::Trivial(v) => json!({"trivial": v}),
        HullOutcome::Cut(c) => json!({
            "formula_s": c.formula_s,
            "cut": cut_value(&c.cut, tol),
        }),
    }
}

pub fn cert_value(r: &CertReport) -> Value {
    json!({
        "mode": r.mode,
        "heuristic": r.heuristic,
        "certified": r.n_certified,
        "failed": r.n_failed,
        "max_reconstruction": r.max_reconstruction,
        "max_endpoint_violation": r.max_endpoint_violation,
        "failures": r.failures.iter().take(20).map(|f| json!({
            "x": vec_value(&f.x),
            "reason": f.reason,
        })).collect::<Vec<_>>(),
    })
}

pub fn error_value(e: &Error) -> Value {
    let mut v = json!({"error": e.code(), "message": e.to_string()});
    if let Error::Gate { report, .. } = e {
        v["report"] = report_value(report);
    }
    v
}

/// Exit codes: 0 verified, 1 input, 2 failed, 3 indeterminate, 4 numerical.
pub fn exit_code_overall(o: Overall) -> i32 {
    match o {
        Overall::Verified => 0,
        Overall::Failed => 2,
        Overall::Indeterminate => 3,
    }
}

pub fn exit_code_error(e: &Error) -> i32 {
    match e {
        Error::Gate { kind, .. } => match kind {
            GateFailure::Cond1Failed | GateFailure::Cond2Infeasible { .. } | GateFailure::Cond3Failed => 2,
            GateFailure::Cond2Indeterminate => 3,
            GateFailure::DegenerateNumerics(_) => 4,
        },
        Error::Dimension(_)
        | Error::NonFinite
        | Error::InvalidCone(_)
        | Error::WrongInertia { .. }
        | Error::Input(_)
        | Error::Domain(_) => 1,
        Error::Precondition(_) | Error::EmptySet { .. } => 2,
        Error::SingularPencil
        | Error::EigenFailure
        | Error::EpsilonLadderExhausted
        | Error::InvalidWitness(_)
        | Error::EndpointOutsideCone(_)
        | Error::Socp(_) => 4,
    }
}

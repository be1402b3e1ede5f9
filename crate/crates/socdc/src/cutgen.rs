//! The aggregation cut. `s` is the first `t ∈ (0, 1]` where
//! `A_t = (1-t)A0 + tA1` turns singular, and the cut is the plus branch of
//! `A_s` oriented by an interior point `x̄`.

use nalgebra::{DMatrix, DVector};

use crate::conditions::{
    check_cond1, check_cond3, check_cond4, check_cond5, find_interior_point, Cond2Verdict,
    Cond3Kind, Cond3Variant, Cond5Input, ConditionReport, StructureHint,
};
use crate::error::{Error, GateFailure, Result};
use crate::options::Options;
use crate::socr::{socr_from_a, socr_from_bb, socr_halfspace, SocrCone};
use crate::spectral::{pencil_real_eigs, sym_eigen, SymMatrix};

/// `F0+ ∩ F1`, optionally intersected with `H1 = {hᵀx = 1}`.
#[derive(Debug, Clone)]
pub struct ConeInstance {
    pub a0: SymMatrix,
    pub cone0: SocrCone,
    pub a1: SymMatrix,
    pub h: Option<DVector<f64>>,
    pub opts: Options,
    pub hint: Option<StructureHint>,
    pub warnings: Vec<String>,
}

impl ConeInstance {
    /// `F0+` is the plus branch of `A0` under the default orientation
    /// (largest-magnitude entry of `b0` positive).
    pub fn from_matrices(a0: SymMatrix, a1: SymMatrix, h: Option<DVector<f64>>, opts: Options) -> Result<Self> {
        check_dims(a0.dim(), a1.dim(), h.as_ref())?;
        let cone0 = socr_from_a(&a0, None, opts.tol).map_err(|e| match e {
            Error::WrongInertia { .. } => Error::Gate {
                kind: GateFailure::Cond1Failed,
                report: Box::new(ConditionReport::new(false)),
            },
            other => other,
        })?;
        Ok(ConeInstance {
            a0,
            cone0,
            a1,
            h,
            opts,
            hint: None,
            warnings: Vec::new(),
        })
    }

    pub fn from_bb(
        b0_mat: DMatrix<f64>,
        b0: DVector<f64>,
        a1: SymMatrix,
        h: Option<DVector<f64>>,
        opts: Options,
    ) -> Result<Self> {
        let cone0 = socr_from_bb(b0_mat, b0, opts.tol)?;
        check_dims(cone0.dim(), a1.dim(), h.as_ref())?;
        Ok(ConeInstance {
            a0: cone0.a().clone(),
            cone0,
            a1,
            h,
            opts,
            hint: None,
            warnings: Vec::new(),
        })
    }

    pub fn dim(&self) -> usize {
        self.a0.dim()
    }

    pub fn with_hint(mut self, hint: StructureHint) -> Self {
        self.hint = Some(hint);
        self
    }
}

fn check_dims(n0: usize, n1: usize, h: Option<&DVector<f64>>) -> Result<()> {
    if n0 != n1 {
        return Err(Error::Dimension(format!("A0 is {n0}x{n0}, A1 is {n1}x{n1}")));
    }
    if let Some(h) = h {
        if h.len() != n0 {
            return Err(Error::Dimension(format!("h has length {}, expected {n0}", h.len())));
        }
        if h.iter().all(|v| *v == 0.0) {
            return Err(Error::Input("h must be nonzero".into()));
        }
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub enum CutCone {
    Soc(SocrCone),
    /// `A_s` has no positive eigenvalue; the cut is the halfspace `{bᵀx ≥ 0}`.
    Halfspace(SocrCone),
}

#[derive(Debug, Clone)]
pub struct CutResult {
    pub s: f64,
    pub t_set: Vec<f64>,
    pub a_s: SymMatrix,
    pub cone_s: CutCone,
    pub xbar: DVector<f64>,
    pub report: ConditionReport,
    pub epsilon_used: Option<f64>,
}

impl CutResult {
    pub fn cone(&self) -> Option<&SocrCone> {
        match &self.cone_s {
            CutCone::Soc(c) => Some(c),
            CutCone::Halfspace(c) => Some(c),
        }
    }

    pub fn is_halfspace(&self) -> bool {
        matches!(self.cone_s, CutCone::Halfspace(_))
    }

    /// `(k, d)` with `d ≤ 8` when `s` is within `tol` of `k/d`.
    pub fn s_rational(&self, tol: f64) -> Option<(i64, i64)> {
        snap_rational(self.s, tol)
    }
}

pub fn snap_rational(x: f64, tol: f64) -> Option<(i64, i64)> {
    (1..=8i64).find_map(|d| {
        let k = (x * d as f64).round();
        ((x - k / d as f64).abs() <= tol).then_some((k as i64, d))
    })
}

/// First `ε = 2^-k`, `k = 4..=40`, making `A_ε` nonsingular with exactly one
/// negative eigenvalue.
pub fn epsilon_probe(a0: &SymMatrix, a1: &SymMatrix, tol: f64) -> Result<f64> {
    let c3 = check_cond3(a0, a1, tol)?;
    if c3.kind != Cond3Kind::PosDefOnNull {
        return Err(Error::Precondition(format!(
            "epsilon shift needs A1 positive definite on Null(A0), found {:?}",
            c3.kind
        )));
    }
    for k in 4..=40 {
        let eps = (2.0f64).powi(-k);
        let spec = sym_eigen(&SymMatrix::pencil(a0, a1, eps))?;
        let i = spec.inertia(tol);
        if i.n_zero == 0 && i.n_neg == 1 {
            return Ok(eps);
        }
    }
    Err(Error::EpsilonLadderExhausted)
}

fn merge_close(mut t: Vec<f64>, gap: f64) -> Vec<f64> {
    t.sort_by(f64::total_cmp);
    let mut out: Vec<f64> = Vec::with_capacity(t.len());
    for v in t {
        match out.last() {
            Some(&last) if (v - last).abs() <= gap * last.abs().max(1.0) => {}
            _ => out.push(v),
        }
    }
    out
}

fn t_from_eigs(eigs: &[f64], tol: f64) -> Vec<f64> {
    eigs.iter()
        .filter(|e| (1.0 - **e).abs() > tol)
        .map(|e| 1.0 / (1.0 - e))
        .collect()
}

/// Singularity parameters of the pencil, ascending. Also returns the `ε` used
/// when `A0` is singular.
pub fn compute_t(a0: &SymMatrix, a1: &SymMatrix, variant: &Cond3Variant, tol: f64) -> Result<(Vec<f64>, Option<f64>)> {
    match variant.kind {
        Cond3Kind::Nonsingular => {
            let e = pencil_real_eigs(a0, a1, tol)?;
            Ok((merge_close(t_from_eigs(&e, tol), 10.0 * tol), None))
        }
        Cond3Kind::PosDefOnNull => {
            let eps = epsilon_probe(a0, a1, tol)?;
            let a_eps = SymMatrix::pencil(a0, a1, eps);
            let e = pencil_real_eigs(&a_eps, a1, tol)?;
            let t: Vec<f64> = t_from_eigs(&e, tol)
                .into_iter()
                .map(|tb| (1.0 - eps) * tb + eps)
                .collect();
            Ok((merge_close(t, 10.0 * tol), Some(eps)))
        }
        other => Err(Error::Precondition(format!(
            "singularity parameters are defined only for Condition 3(i)/(ii), found {other:?}"
        ))),
    }
}

pub fn compute_s(t_set: &[f64], variant: &Cond3Variant, tol: f64) -> f64 {
    if variant.kind == Cond3Kind::NegDefOnNull {
        return 0.0;
    }
    t_set
        .iter()
        .copied()
        .filter(|t| *t > tol && *t <= 1.0 + 10.0 * tol)
        .map(|t| t.min(1.0))
        .fold(None, |acc: Option<f64>, t| Some(acc.map_or(t, |a| a.min(t))))
        .unwrap_or(1.0)
}

fn gate(kind: GateFailure, report: ConditionReport) -> Error {
    Error::Gate {
        kind,
        report: Box::new(report),
    }
}

/// Run the condition gate and compute the cut.
pub fn build_cut(inst: &ConeInstance) -> Result<CutResult> {
    let tol = inst.opts.tol;
    let (a0, a1) = (&inst.a0, &inst.a1);

    let mut report = ConditionReport::new(check_cond1(a0, tol)?);
    report.warnings.extend(inst.warnings.iter().cloned());
    if !report.cond1 {
        return Err(gate(GateFailure::Cond1Failed, report));
    }

    let c2 = find_interior_point(a0, a1, Some(inst.cone0.b()), &inst.opts)?;
    report.cond2 = Some(c2.clone());
    let xbar = match c2 {
        Cond2Verdict::Found { x } => x,
        Cond2Verdict::Infeasible { t_star, lambda_min } => {
            return Err(gate(GateFailure::Cond2Infeasible { t_star, lambda_min }, report))
        }
        Cond2Verdict::Indeterminate => return Err(gate(GateFailure::Cond2Indeterminate, report)),
    };

    let c3 = check_cond3(a0, a1, tol)?;
    report.cond3 = Some(c3.clone());
    let (t_set, epsilon_used) = match c3.kind {
        Cond3Kind::Fails => return Err(gate(GateFailure::Cond3Failed, report)),
        Cond3Kind::NegDefOnNull => (Vec::new(), None),
        _ => match compute_t(a0, a1, &c3, tol) {
            Ok(r) => r,
            Err(e) => return Err(gate(GateFailure::DegenerateNumerics(e.to_string()), report)),
        },
    };
    let s = compute_s(&t_set, &c3, tol);
    let a_s = if s == 0.0 { a0.clone() } else { SymMatrix::pencil(a0, a1, s) };

    let spec_s = sym_eigen(&a_s)?;
    let inert = spec_s.inertia(tol);
    if inert.n_neg != 1 {
        return Err(gate(
            GateFailure::DegenerateNumerics(format!(
                "A_s at s = {s} has {} negative eigenvalues",
                inert.n_neg
            )),
            report,
        ));
    }
    let cone_s = if inert.n_pos == 0 {
        report
            .warnings
            .push("A_s has no positive eigenvalue; the cut is a halfspace".into());
        CutCone::Halfspace(socr_halfspace(&a_s, Some(&xbar), tol)?)
    } else {
        CutCone::Soc(socr_from_a(&a_s, Some(&xbar), tol)?)
    };

    report.cond4 = Some(check_cond4(&a_s, a1, s, tol)?);
    if let Some(h) = &inst.h {
        let cone_ref = match &cone_s {
            CutCone::Soc(c) | CutCone::Halfspace(c) => Some(c),
        };
        report.cond5 = Some(check_cond5(&Cond5Input {
            a0,
            a1,
            a_s: &a_s,
            s,
            h,
            cone0: &inst.cone0,
            cone_s: cone_ref,
            hint: inst.hint.as_ref(),
            opts: &inst.opts,
        })?);
    }

    Ok(CutResult {
        s,
        t_set,
        a_s,
        cone_s,
        xbar,
        report,
        epsilon_used,
    })
}

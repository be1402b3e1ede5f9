//! Checks for the sufficient conditions behind the aggregation cut, each
//! returning a verdict with a witness or counterexample when one exists.
//!
//! | condition | question |
//! |-----------|----------|
//! | 1 | `A0` has one negative and at least one positive eigenvalue |
//! | 2 | some `x̄` has `x̄ᵀA0x̄ < 0` and `x̄ᵀA1x̄ < 0` |
//! | 3 | `A0` nonsingular, or `A1` definite on `Null(A0)` |
//! | 4 | `apex(F_s+)` meets `int(F1)` |
//! | 5 | the same on `H0`, or `F0+ ∩ F_s+ ∩ H0 ⊆ F1` |
//! | 6 | the two pieces of a disjunction meet only on their boundaries |
//!
//! Condition 2 is decided through the concave function `t ↦ λ_min(A_t)`:
//! a nonnegative maximum is a certificate that no common negative direction
//! exists, and otherwise a direction is extracted from the minimizing
//! eigenspace.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::options::{rng, Options, Stream};
use crate::socr::{socr_from_a, SocrCone};
use crate::spectral::{complement_basis, restricted_form, sym_eigen, SymMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Cond3Kind {
    Nonsingular,
    PosDefOnNull,
    NegDefOnNull,
    Fails,
}

#[derive(Debug, Clone)]
pub struct Cond3Variant {
    pub kind: Cond3Kind,
    pub null_basis: DMatrix<f64>,
    /// `Z0ᵀA1Z0`, present when `A0` is singular.
    pub restricted: Option<SymMatrix>,
}

#[derive(Debug, Clone)]
pub enum Cond2Verdict {
    Found { x: DVector<f64> },
    Infeasible { t_star: f64, lambda_min: f64 },
    Indeterminate,
}

#[derive(Debug, Clone)]
pub enum Cond4Verdict {
    NotApplicable,
    Verified { d: DVector<f64> },
    Violated { m: SymMatrix },
    Indeterminate { m: SymMatrix },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ContainmentReason {
    /// `F0 ∩ H0 = {0}`.
    TrivialSection,
    /// `F0+ ∩ H0` is a single ray, and that ray is in `F1` or outside `F_s+`.
    RecessionRay,
    BetaSufficiency,
}

#[derive(Debug, Clone)]
pub enum Cond5Verdict {
    NotApplicable,
    VerifiedApex { d: DVector<f64> },
    VerifiedContainment { reason: ContainmentReason },
    FalsifiedBySample { x: DVector<f64> },
    Unknown,
}

#[derive(Debug, Clone)]
pub enum Cond6Verdict {
    Holds,
    Fails { x: DVector<f64> },
    Unknown,
}

/// Structure known to the caller that unlocks a containment proof.
#[derive(Debug, Clone, PartialEq)]
pub enum StructureHint {
    Ellipsoid,
    Paraboloid,
    BetaSufficient { beta1: f64, beta2: f64 },
}

#[derive(Debug, Clone)]
pub struct ConditionReport {
    pub cond1: bool,
    pub cond2: Option<Cond2Verdict>,
    pub cond3: Option<Cond3Variant>,
    pub cond4: Option<Cond4Verdict>,
    pub cond5: Option<Cond5Verdict>,
    pub cond6: Option<Cond6Verdict>,
    pub warnings: Vec<String>,
}

/// Aggregate verdict used for exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Overall {
    Verified,
    Indeterminate,
    Failed,
}

impl ConditionReport {
    pub fn new(cond1: bool) -> Self {
        ConditionReport {
            cond1,
            cond2: None,
            cond3: None,
            cond4: None,
            cond5: None,
            cond6: None,
            warnings: Vec::new(),
        }
    }

    pub fn xbar(&self) -> Option<&DVector<f64>> {
        match &self.cond2 {
            Some(Cond2Verdict::Found { x }) => Some(x),
            _ => None,
        }
    }

    pub fn cond4_witness(&self) -> Option<&DVector<f64>> {
        match &self.cond4 {
            Some(Cond4Verdict::Verified { d }) => Some(d),
            _ => None,
        }
    }

    pub fn cond5_witness(&self) -> Option<&DVector<f64>> {
        match &self.cond5 {
            Some(Cond5Verdict::VerifiedApex { d }) => Some(d),
            _ => None,
        }
    }

    /// Failed beats Indeterminate beats Verified.
    pub fn overall(&self) -> Overall {
        let mut worst = Overall::Verified;
        let mut bump = |o: Overall| worst = worst.max(o);
        if !self.cond1 {
            bump(Overall::Failed);
        }
        match &self.cond2 {
            Some(Cond2Verdict::Infeasible { .. }) => bump(Overall::Failed),
            Some(Cond2Verdict::Indeterminate) => bump(Overall::Indeterminate),
            _ => {}
        }
        if let Some(c3) = &self.cond3 {
            if c3.kind == Cond3Kind::Fails {
                bump(Overall::Failed);
            }
        }
        match &self.cond4 {
            Some(Cond4Verdict::Violated { .. }) => bump(Overall::Failed),
            Some(Cond4Verdict::Indeterminate { .. }) => bump(Overall::Indeterminate),
            _ => {}
        }
        match &self.cond5 {
            Some(Cond5Verdict::FalsifiedBySample { .. }) => bump(Overall::Failed),
            Some(Cond5Verdict::Unknown) => bump(Overall::Indeterminate),
            _ => {}
        }
        match &self.cond6 {
            Some(Cond6Verdict::Fails { .. }) => bump(Overall::Failed),
            Some(Cond6Verdict::Unknown) => bump(Overall::Indeterminate),
            _ => {}
        }
        worst
    }
}

fn pair_scale(a0: &SymMatrix, a1: &SymMatrix) -> Result<f64> {
    Ok(sym_eigen(a0)?.scale().max(sym_eigen(a1)?.scale()))
}

pub fn check_cond1(a0: &SymMatrix, tol: f64) -> Result<bool> {
    let i = sym_eigen(a0)?.inertia(tol);
    Ok(i.n_neg == 1 && i.n_pos >= 1)
}

fn lambda_min_at(a0: &SymMatrix, a1: &SymMatrix, t: f64) -> Result<f64> {
    Ok(sym_eigen(&SymMatrix::pencil(a0, a1, t))?.min())
}

/// Maximize the concave `t ↦ λ_min(A_t)` on `[0, 1]` by golden section.
pub fn dual_sweep(a0: &SymMatrix, a1: &SymMatrix) -> Result<(f64, f64)> {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = lambda_min_at(a0, a1, x1)?;
    let mut f2 = lambda_min_at(a0, a1, x2)?;
    for _ in 0..80 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = lambda_min_at(a0, a1, x2)?;
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = lambda_min_at(a0, a1, x1)?;
        }
    }
    let mut best = if f1 >= f2 { (x1, f1) } else { (x2, f2) };
    for t in [0.0, 1.0] {
        let f = lambda_min_at(a0, a1, t)?;
        if f > best.1 {
            best = (t, f);
        }
    }
    Ok(best)
}

fn joint_value(a0: &SymMatrix, a1: &SymMatrix, x: &DVector<f64>) -> f64 {
    a0.quad(x).max(a1.quad(x))
}

/// Unit vectors from the low eigenspace of `A_t*` on which `A1 - A0` vanishes
/// or has a definite sign.
fn eigenspace_candidates(a0: &SymMatrix, a1: &SymMatrix, t: f64, phi: f64) -> Result<Vec<DVector<f64>>> {
    let spec = sym_eigen(&SymMatrix::pencil(a0, a1, t))?;
    let idx: Vec<usize> = (0..spec.dim()).filter(|&j| spec.eigvals[j] <= 0.5 * phi).collect();
    let z = spec.eigvecs.select_columns(idx.iter());
    let diff = SymMatrix::new(a1.matrix() - a0.matrix())?;
    let m = restricted_form(&diff, &z)?;
    let ms = sym_eigen(&m)?;
    let mut out = vec![z.column(0).into_owned()];
    let (lo, hi) = (ms.min(), ms.max());
    out.push(&z * ms.vector(0));
    out.push(&z * ms.vector(ms.dim() - 1));
    if lo < 0.0 && hi > 0.0 {
        let w_lo = (hi / (hi - lo)).sqrt();
        let w_hi = (-lo / (hi - lo)).sqrt();
        out.push(&z * (ms.vector(0) * w_lo + ms.vector(ms.dim() - 1) * w_hi));
    }
    Ok(out.into_iter().map(|v| v.normalize()).collect())
}

fn descend(a0: &SymMatrix, a1: &SymMatrix, start: &DVector<f64>, iters: usize, scale: f64) -> DVector<f64> {
    let mut x = start.normalize();
    let mut best = x.clone();
    let mut best_val = joint_value(a0, a1, &x);
    for k in 0..iters {
        let (q0, q1) = (a0.quad(&x), a1.quad(&x));
        let g = if (q0 - q1).abs() <= 1e-12 * scale {
            (a0.mul_vec(&x) + a1.mul_vec(&x)) * 1.0
        } else if q0 > q1 {
            a0.mul_vec(&x) * 2.0
        } else {
            a1.mul_vec(&x) * 2.0
        };
        let tangent = &g - &x * g.dot(&x);
        let step = 0.5 / (scale * (1.0 + k as f64).sqrt());
        let cand = &x - tangent * step;
        if cand.norm() == 0.0 {
            break;
        }
        x = cand.normalize();
        let v = joint_value(a0, a1, &x);
        if v < best_val {
            best_val = v;
            best = x.clone();
        }
    }
    best
}

/// Search for `x̄` with both quadratics negative. With `orient`, the result
/// satisfies `orientᵀx̄ ≥ 0`.
pub fn find_interior_point(
    a0: &SymMatrix,
    a1: &SymMatrix,
    orient: Option<&DVector<f64>>,
    opts: &Options,
) -> Result<Cond2Verdict> {
    if a0.dim() != a1.dim() {
        return Err(Error::Dimension(format!("A0 is {}, A1 is {}", a0.dim(), a1.dim())));
    }
    let n = a0.dim();
    let scale = pair_scale(a0, a1)?;
    let margin = opts.tol * scale;
    let (t_star, phi) = dual_sweep(a0, a1)?;
    if phi >= -margin {
        return Ok(Cond2Verdict::Infeasible {
            t_star,
            lambda_min: phi,
        });
    }
    let accept = |x: &DVector<f64>| joint_value(a0, a1, x) < -margin;
    let finish = |mut x: DVector<f64>| {
        if let Some(o) = orient {
            if o.dot(&x) < 0.0 {
                x.neg_mut();
            }
        }
        Ok(Cond2Verdict::Found { x })
    };

    let mut seeds = eigenspace_candidates(a0, a1, t_star, phi)?;
    for k in 0..=8 {
        let t = k as f64 / 8.0;
        seeds.push(sym_eigen(&SymMatrix::pencil(a0, a1, t))?.vector(0));
    }
    let pick = seeds
        .iter()
        .enumerate()
        .map(|(i, x)| (joint_value(a0, a1, x), i))
        .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    if let Some((_, i)) = pick {
        if accept(&seeds[i]) {
            return finish(seeds[i].clone());
        }
    }

    let per_start = (opts.budget / (seeds.len() + 8)).max(10);
    let mut r = rng(opts.seed, Stream::Interior);
    let mut used = 0usize;
    let mut k = 0usize;
    while used < opts.budget.max(per_start) {
        let start = if k < seeds.len() {
            seeds[k].clone()
        } else {
            DVector::from_fn(n, |_, _| r.sample::<f64, _>(StandardNormal))
        };
        k += 1;
        let x = descend(a0, a1, &start, per_start, scale);
        used += per_start;
        if accept(&x) {
            return finish(x);
        }
    }
    Ok(Cond2Verdict::Indeterminate)
}

pub fn check_cond3(a0: &SymMatrix, a1: &SymMatrix, tol: f64) -> Result<Cond3Variant> {
    let spec0 = sym_eigen(a0)?;
    let z = spec0.null_basis(tol);
    if z.ncols() == 0 {
        return Ok(Cond3Variant {
            kind: Cond3Kind::Nonsingular,
            null_basis: z,
            restricted: None,
        });
    }
    let m = restricted_form(a1, &z)?;
    let scale = sym_eigen(a1)?.scale();
    let ms = sym_eigen(&m)?;
    let band = tol * scale;
    let kind = if ms.min() > band {
        Cond3Kind::PosDefOnNull
    } else if ms.max() < -band {
        Cond3Kind::NegDefOnNull
    } else {
        Cond3Kind::Fails
    };
    Ok(Cond3Variant {
        kind,
        null_basis: z,
        restricted: Some(m),
    })
}

pub fn check_cond4(a_s: &SymMatrix, a1: &SymMatrix, s: f64, tol: f64) -> Result<Cond4Verdict> {
    if s >= 1.0 {
        return Ok(Cond4Verdict::NotApplicable);
    }
    let z = sym_eigen(a_s)?.null_basis(tol);
    if z.ncols() == 0 {
        return Err(Error::Precondition(format!(
            "A_s is nonsingular at s = {s} < 1"
        )));
    }
    let m = restricted_form(a1, &z)?;
    let band = tol * sym_eigen(a1)?.scale();
    let ms = sym_eigen(&m)?;
    if ms.min() < -band {
        let d = (&z * ms.vector(0)).normalize();
        return Ok(Cond4Verdict::Verified { d });
    }
    if m.max_abs() <= band {
        Ok(Cond4Verdict::Violated { m })
    } else {
        Ok(Cond4Verdict::Indeterminate { m })
    }
}

pub struct Cond5Input<'a> {
    pub a0: &'a SymMatrix,
    pub a1: &'a SymMatrix,
    pub a_s: &'a SymMatrix,
    pub s: f64,
    pub h: &'a DVector<f64>,
    pub cone0: &'a SocrCone,
    /// `None` when the cut is trivial (`F_s = Rⁿ`).
    pub cone_s: Option<&'a SocrCone>,
    pub hint: Option<&'a StructureHint>,
    pub opts: &'a Options,
}

fn in_plus(cone: Option<&SocrCone>, x: &DVector<f64>, tol: f64) -> bool {
    cone.is_none_or(|c| c.contains(x, tol))
}

pub fn check_cond5(inp: &Cond5Input) -> Result<Cond5Verdict> {
    let tol = inp.opts.tol;
    let n = inp.a0.dim();
    if inp.h.len() != n {
        return Err(Error::Dimension(format!("h has length {}, instance dimension {}", inp.h.len(), n)));
    }
    if inp.h.norm() == 0.0 {
        return Err(Error::Input("h must be nonzero".into()));
    }
    if inp.s >= 1.0 {
        return Ok(Cond5Verdict::NotApplicable);
    }
    let scale1 = sym_eigen(inp.a1)?.scale();
    let band = tol * scale1;
    let hu = inp.h.normalize();

    // Apex branch: Null(A_s) ∩ h^⊥.
    let z = sym_eigen(inp.a_s)?.null_basis(tol);
    if z.ncols() > 0 {
        let proj = z.transpose() * &hu;
        let n_h = complement_basis(&proj, 1e-12);
        let w = &z * n_h;
        if w.ncols() > 0 {
            let ws = sym_eigen(&restricted_form(inp.a1, &w)?)?;
            if ws.min() < -band {
                let d = (&w * ws.vector(0)).normalize();
                return Ok(Cond5Verdict::VerifiedApex { d });
            }
        }
    }

    // Containment branch.
    let p = complement_basis(&hu, 0.0);
    let r0 = restricted_form(inp.a0, &p)?;
    let r0s = sym_eigen(&r0)?;
    let r0_band = tol * sym_eigen(inp.a0)?.scale();
    let r0i = r0s.inertia(tol);
    if r0s.min() > r0_band {
        return Ok(Cond5Verdict::VerifiedContainment {
            reason: ContainmentReason::TrivialSection,
        });
    }
    if r0i.n_neg == 0 && r0i.n_zero == 1 {
        let w = &p * r0s.vector(0);
        let rays: Vec<DVector<f64>> = [w.clone(), -w]
            .into_iter()
            .filter(|x| inp.cone0.contains(x, tol))
            .collect();
        let ok = rays
            .iter()
            .all(|x| inp.a1.quad(x) <= band || !in_plus(inp.cone_s, x, tol));
        if ok {
            return Ok(Cond5Verdict::VerifiedContainment {
                reason: ContainmentReason::RecessionRay,
            });
        }
    }
    if let Some(StructureHint::BetaSufficient { .. }) = inp.hint {
        return Ok(Cond5Verdict::VerifiedContainment {
            reason: ContainmentReason::BetaSufficiency,
        });
    }

    // Falsification by sampling F0+ ∩ F_s+ ∩ H0.
    let mut r = rng(inp.opts.seed, Stream::Cond5);
    let section = if r0i.n_neg == 1 && r0i.n_pos >= 1 {
        Some(socr_from_a(&r0, None, tol)?)
    } else {
        None
    };
    let mut worst: Option<(f64, DVector<f64>)> = None;
    for k in 0..inp.opts.samples {
        let zc = match &section {
            Some(c) => c.sample(&mut r, k % 3 == 0),
            None => DVector::from_fn(n - 1, |_, _| r.sample::<f64, _>(StandardNormal)),
        };
        let base = (&p * zc).normalize();
        for x in [base.clone(), -base] {
            if !inp.cone0.contains(&x, tol) || !in_plus(inp.cone_s, &x, tol) {
                continue;
            }
            let v = inp.a1.quad(&x);
            if v > band && worst.as_ref().is_none_or(|w| v > w.0) {
                worst = Some((v, x));
            }
        }
    }
    Ok(match worst {
        Some((_, x)) => Cond5Verdict::FalsifiedBySample { x },
        None => Cond5Verdict::Unknown,
    })
}

/// Range of `cᵀx` over `int(K)` with `K = {‖x̃‖ ≤ x_n}`: `(lo, hi)` open.
fn open_range_on_cone(c: &DVector<f64>) -> (f64, f64) {
    let n = c.len();
    let ct = c.rows(0, n - 1).norm();
    let cn = c[n - 1];
    if ct == 0.0 && cn == 0.0 {
        return (0.0, 0.0);
    }
    if cn - ct >= 0.0 {
        (0.0, f64::INFINITY)
    } else if cn + ct <= 0.0 {
        (f64::NEG_INFINITY, 0.0)
    } else {
        (f64::NEG_INFINITY, f64::INFINITY)
    }
}

/// A point of `int(K)` with `cᵀx = v`; `v` must lie in the open range.
fn interior_point_with_value(c: &DVector<f64>, v: f64) -> DVector<f64> {
    let n = c.len();
    let ct_vec = c.rows(0, n - 1).into_owned();
    let ct = ct_vec.norm();
    let cn = c[n - 1];
    let (wlo, whi) = (cn - ct, cn + ct);
    // pick w in (wlo, whi) with the sign of v, then x = (v/w)·(u, 1).
    let w = if v > 0.0 {
        0.5 * (wlo.max(0.0) + whi)
    } else if v < 0.0 {
        0.5 * (wlo + whi.min(0.0))
    } else {
        0.0
    };
    let mut x = DVector::zeros(n);
    x[n - 1] = 1.0;
    if ct > 0.0 {
        let u = &ct_vec * ((w - cn) / (ct * ct));
        x.rows_mut(0, n - 1).copy_from(&u);
    }
    if v != 0.0 {
        x *= v / w;
    }
    x
}

fn split_ratio(c1: &DVector<f64>, c2: &DVector<f64>, tol: f64) -> Option<f64> {
    let n1 = c1.norm_squared();
    if n1 == 0.0 || c2.norm() == 0.0 {
        return None;
    }
    let alpha = -c1.dot(c2) / n1;
    if alpha <= 0.0 {
        return None;
    }
    if (c2 + c1 * alpha).norm() <= tol * c2.norm().max(1.0) {
        Some(alpha)
    } else {
        None
    }
}

fn in_open_cone(x: &DVector<f64>) -> bool {
    let n = x.len();
    x.rows(0, n - 1).norm() < x[n - 1]
}

/// Condition 6 on `K = {‖x̃‖ ≤ x_n}` (intersected with `hᵀx = 1` when `h` is
/// given). `d1`, `d2` are expected normalized.
pub fn check_cond6(
    c1: &DVector<f64>,
    d1: f64,
    c2: &DVector<f64>,
    d2: f64,
    h: Option<&DVector<f64>>,
    opts: &Options,
) -> Result<Cond6Verdict> {
    let n = c1.len();
    if c2.len() != n || h.is_some_and(|h| h.len() != n) || n < 2 {
        return Err(Error::Dimension("disjunction vectors disagree in length".into()));
    }
    let tol = opts.tol;
    if let Some(alpha) = split_ratio(c1, c2, tol) {
        // c1ᵀx ≥ d1 and c1ᵀx ≤ -d2/α.
        let (lo, hi) = (d1, -d2 / alpha);
        if hi - lo <= tol * (1.0 + lo.abs().max(hi.abs())) {
            return Ok(Cond6Verdict::Holds);
        }
        if h.is_none() {
            let (rlo, rhi) = open_range_on_cone(c1);
            let a = lo.max(rlo);
            let b = hi.min(rhi);
            if a >= b {
                return Ok(Cond6Verdict::Holds);
            }
            let v = if a.is_finite() && b.is_finite() {
                0.5 * (a + b)
            } else if a.is_finite() {
                a + 1.0
            } else if b.is_finite() {
                b - 1.0
            } else {
                0.0
            };
            return Ok(Cond6Verdict::Fails {
                x: interior_point_with_value(c1, v),
            });
        }
    }
    Ok(match ascend_cond6(c1, d1, c2, d2, h, opts) {
        Some(x) => Cond6Verdict::Fails { x },
        None => Cond6Verdict::Unknown,
    })
}

/// Best value of `min(c1ᵀx - d1, c2ᵀx - d2)` along the ray through `(u, 1)`.
fn ray_value(
    c1: &DVector<f64>,
    d1: f64,
    c2: &DVector<f64>,
    d2: f64,
    h: Option<&DVector<f64>>,
    u: &DVector<f64>,
) -> Option<(f64, DVector<f64>)> {
    let n = c1.len();
    let mut y = DVector::zeros(n);
    y.rows_mut(0, n - 1).copy_from(u);
    y[n - 1] = 1.0;
    let (a1, a2) = (c1.dot(&y), c2.dot(&y));
    let f = |r: f64| (r * a1 - d1).min(r * a2 - d2);
    let r = match h {
        Some(h) => {
            let hy = h.dot(&y);
            if hy <= 0.0 {
                return None;
            }
            1.0 / hy
        }
        None if d1 == 0.0 && d2 == 0.0 => 1.0,
        None => {
            if a1 > 0.0 && a2 > 0.0 {
                ((d1 + 1.0) / a1).max((d2 + 1.0) / a2).max(1.0)
            } else {
                let mut cands = vec![1e-9, 1.0];
                if a1 != a2 {
                    let rc = (d1 - d2) / (a1 - a2);
                    if rc > 0.0 {
                        cands.push(rc);
                    }
                }
                cands
                    .into_iter()
                    .max_by(|p, q| f(*p).total_cmp(&f(*q)))
                    .unwrap()
            }
        }
    };
    Some((f(r), y * r))
}

fn ascend_cond6(
    c1: &DVector<f64>,
    d1: f64,
    c2: &DVector<f64>,
    d2: f64,
    h: Option<&DVector<f64>>,
    opts: &Options,
) -> Option<DVector<f64>> {
    let n = c1.len();
    let m = n - 1;
    let thresh = opts.tol * c1.norm().max(c2.norm()).max(1.0);
    let clip = |mut u: DVector<f64>| {
        let nu = u.norm();
        if nu >= 0.999 {
            u *= 0.999 / nu;
        }
        u
    };
    let mut starts: Vec<DVector<f64>> = vec![DVector::zeros(m)];
    for c in [c1, c2] {
        let ct = c.rows(0, m).into_owned();
        if ct.norm() > 0.0 {
            starts.push(ct.normalize() * 0.9);
        }
    }
    let sum = c1.rows(0, m) / c1.norm().max(1e-300) + c2.rows(0, m) / c2.norm().max(1e-300);
    if sum.norm() > 0.0 {
        starts.push(sum.normalize() * 0.9);
    }
    let mut r = rng(opts.seed, Stream::Cond6);
    let n_random = 16usize;
    for _ in 0..n_random {
        let g = DVector::from_fn(m, |_, _| r.sample::<f64, _>(StandardNormal));
        let rad: f64 = r.gen::<f64>().powf(1.0 / m as f64) * 0.99;
        starts.push(g.normalize() * rad);
    }
    let per_start = (opts.budget / starts.len()).max(20);
    for start in starts {
        let mut u = clip(start);
        let mut cur = ray_value(c1, d1, c2, d2, h, &u);
        let mut step = 0.25;
        for _ in 0..per_start {
            if let Some((v, x)) = &cur {
                if *v > thresh && in_open_cone(x) {
                    return Some(x.clone());
                }
            }
            let g = DVector::from_fn(m, |_, _| r.sample::<f64, _>(StandardNormal));
            let cand_u = clip(&u + g * step);
            let cand = ray_value(c1, d1, c2, d2, h, &cand_u);
            let better = match (&cand, &cur) {
                (Some(a), Some(b)) => a.0 > b.0,
                (Some(_), None) => true,
                _ => false,
            };
            if better {
                u = cand_u;
                cur = cand;
                step = (step * 1.5).min(0.5);
            } else {
                step = (step * 0.7).max(1e-6);
            }
        }
    }
    None
}

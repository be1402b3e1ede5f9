//! Two-term disjunctions `c1ᵀx ≥ d1 ∨ c2ᵀx ≥ d2` on the second-order cone
//! `K = {x : ‖x̃‖ ≤ x_n}` and on its sections `K ∩ {hᵀx = 1}`.
//!
//! Each builder either returns a `ConeInstance` for the cut generator or a
//! verdict naming the hull when it is trivial.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::conditions::{check_cond6, Cond6Verdict, StructureHint};
use crate::cutgen::ConeInstance;
use crate::error::{Error, Result};
use crate::options::Options;
use crate::spectral::SymMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DisjCase {
    /// `d1 = d2 = 0`.
    A,
    /// `d1 = d2 = ±1`.
    B,
    /// `d1 > d2`.
    C,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Disjunction {
    pub c1: DVector<f64>,
    pub d1: f64,
    pub c2: DVector<f64>,
    pub d2: f64,
    pub case: DisjCase,
    /// Positive factors applied to the original `(c_i, d_i)`, after any swap.
    pub scales: (f64, f64),
    pub swapped: bool,
    pub relaxation_only: bool,
}

impl Disjunction {
    /// Scale each side so `d_i ∈ {0, ±1}` and order them so `d1 ≥ d2`.
    pub fn new(c1: DVector<f64>, d1: f64, c2: DVector<f64>, d2: f64) -> Result<Self> {
        if c1.len() != c2.len() || c1.len() < 2 {
            return Err(Error::Dimension(format!(
                "disjunction vectors of lengths {} and {}; need equal lengths ≥ 2",
                c1.len(),
                c2.len()
            )));
        }
        if c1.iter().chain(c2.iter()).any(|v| !v.is_finite()) || !d1.is_finite() || !d2.is_finite() {
            return Err(Error::NonFinite);
        }
        let norm = |c: DVector<f64>, d: f64| {
            if d == 0.0 {
                (c, 0.0, 1.0)
            } else {
                let k = 1.0 / d.abs();
                (c * k, d.signum(), k)
            }
        };
        let (c1, d1, k1) = norm(c1, d1);
        let (c2, d2, k2) = norm(c2, d2);
        let (c1, d1, k1, c2, d2, k2, swapped) = if d1 < d2 {
            (c2, d2, k2, c1, d1, k1, true)
        } else {
            (c1, d1, k1, c2, d2, k2, false)
        };
        let case = if d1 == d2 {
            if d1 == 0.0 {
                DisjCase::A
            } else {
                DisjCase::B
            }
        } else {
            DisjCase::C
        };
        Ok(Disjunction {
            c1,
            d1,
            c2,
            d2,
            case,
            scales: (k1, k2),
            swapped,
            relaxation_only: false,
        })
    }

    pub fn n(&self) -> usize {
        self.c1.len()
    }

    pub fn check_cond6(&self, opts: &Options) -> Result<Cond6Verdict> {
        check_cond6(&self.c1, self.d1, &self.c2, self.d2, None, opts)
    }
}

/// `diag(1, …, 1, -1)`.
pub fn soc_matrix(n: usize) -> SymMatrix {
    let mut d = vec![1.0; n];
    d[n - 1] = -1.0;
    SymMatrix::from_diagonal(&d)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ConeSide {
    InK,
    InIntNegK,
    OnBdNegK,
    Outside,
}

fn cone_side(c: &DVector<f64>, tol: f64) -> ConeSide {
    let n = c.len();
    let ct = c.rows(0, n - 1).norm();
    let cn = c[n - 1];
    let band = tol * c.norm().max(1.0);
    if ct <= cn + band {
        ConeSide::InK
    } else if ct < -cn - band {
        ConeSide::InIntNegK
    } else if ct <= -cn + band {
        ConeSide::OnBdNegK
    } else {
        ConeSide::Outside
    }
}

/// What the convex hull is when no cut is needed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TrivialHull {
    /// The hull is the whole cone (or section).
    WholeCone,
    /// The hull is the given side (1 or 2) of the disjunction.
    Side(u8),
}

#[derive(Debug, Clone)]
pub enum DisjunctionBuild {
    Instance(Box<ConeInstance>),
    Trivial(TrivialHull),
}

impl DisjunctionBuild {
    pub fn instance(self) -> Option<ConeInstance> {
        match self {
            DisjunctionBuild::Instance(i) => Some(*i),
            DisjunctionBuild::Trivial(_) => None,
        }
    }
}

fn rank_two(c1: &DVector<f64>, c2: &DVector<f64>) -> DMatrix<f64> {
    c1 * c2.transpose() + c2 * c1.transpose()
}

fn homogeneous_trivial(c1: &DVector<f64>, c2: &DVector<f64>, tol: f64) -> (Option<TrivialHull>, Vec<String>) {
    let mut warnings = Vec::new();
    for (i, c) in [(1u8, c1), (2u8, c2)] {
        match cone_side(c, tol) {
            ConeSide::InK => return (Some(TrivialHull::WholeCone), warnings),
            ConeSide::InIntNegK => return (Some(TrivialHull::Side(3 - i)), warnings),
            ConeSide::OnBdNegK => warnings.push(format!(
                "c{i} lies on the boundary of -K; Condition 4 may fail"
            )),
            ConeSide::Outside => {}
        }
    }
    (None, warnings)
}

/// `c1ᵀx ≥ 0 ∨ c2ᵀx ≥ 0` on `K ⊂ Rⁿ`: `A0 = J`, `A1 = c1c2ᵀ + c2c1ᵀ`.
pub fn build_homogeneous(c1: &DVector<f64>, c2: &DVector<f64>, opts: Options) -> Result<DisjunctionBuild> {
    let n = c1.len();
    if c2.len() != n || n < 2 {
        return Err(Error::Dimension("c1 and c2 must have equal length ≥ 2".into()));
    }
    let (trivial, warnings) = homogeneous_trivial(c1, c2, opts.tol);
    if let Some(t) = trivial {
        return Ok(DisjunctionBuild::Trivial(t));
    }
    let a1 = SymMatrix::new(rank_two(c1, c2))?;
    let mut inst = ConeInstance::from_matrices(soc_matrix(n), a1, None, opts)?;
    inst.warnings = warnings;
    Ok(DisjunctionBuild::Instance(Box::new(inst)))
}

/// Cases (b) and (c), homogenized to `R^{n+1}` with `h = e_{n+1}`.
pub fn build_nonhomogeneous(disj: &Disjunction, opts: Options) -> Result<DisjunctionBuild> {
    if disj.case == DisjCase::A {
        return Err(Error::Precondition("case (a) is homogeneous; use build_homogeneous".into()));
    }
    let tol = opts.tol;
    let (c1, c2, d1, d2) = (&disj.c1, &disj.c2, disj.d1, disj.d2);
    let n = disj.n();
    let mut warnings = Vec::new();
    if disj.case == DisjCase::B {
        match cone_side(&(c1 - c2), tol) {
            ConeSide::InK => return Ok(DisjunctionBuild::Trivial(TrivialHull::Side(1))),
            _ => {
                if cone_side(&(c2 - c1), tol) == ConeSide::InK {
                    return Ok(DisjunctionBuild::Trivial(TrivialHull::Side(2)));
                }
            }
        }
    }
    for (c, d) in [(c1, d1), (c2, d2)] {
        if d <= 0.0 && cone_side(c, tol) == ConeSide::InK {
            return Ok(DisjunctionBuild::Trivial(TrivialHull::WholeCone));
        }
    }
    if disj.case == DisjCase::C {
        warnings.push("case d1 > d2: hull exactness is not guaranteed".into());
        if d1 * d2 == 0.0 {
            return Err(Error::Precondition(
                "d1·d2 = 0 violates Condition 3; weaken the disjunction first".into(),
            ));
        }
    }
    if disj.relaxation_only {
        warnings.push("weakened disjunction: the cut is a relaxation only".into());
    }

    let mut a0 = DMatrix::zeros(n + 1, n + 1);
    a0.view_mut((0, 0), (n, n)).copy_from(soc_matrix(n).matrix());
    let mut a1 = DMatrix::zeros(n + 1, n + 1);
    a1.view_mut((0, 0), (n, n)).copy_from(&rank_two(c1, c2));
    let off = -(c1 * d2) - c2 * d1;
    a1.view_mut((0, n), (n, 1)).copy_from(&off);
    a1.view_mut((n, 0), (1, n)).copy_from(&off.transpose());
    a1[(n, n)] = 2.0 * d1 * d2;
    let mut h = DVector::zeros(n + 1);
    h[n] = 1.0;

    let mut inst = ConeInstance::from_matrices(SymMatrix::new(a0)?, SymMatrix::new(a1)?, Some(h), opts)?;
    if let BetaVerdict::Holds { beta1, beta2 } = beta_sufficiency(c1, c2, tol) {
        inst.hint = Some(StructureHint::BetaSufficient { beta1, beta2 });
    }
    inst.warnings = warnings;
    Ok(DisjunctionBuild::Instance(Box::new(inst)))
}

/// Replace `d1` by `d2`; the result is a valid relaxation of the original.
pub fn weaken_case_c(disj: &Disjunction) -> Result<Disjunction> {
    if disj.case != DisjCase::C {
        return Err(Error::Precondition("weakening applies to case d1 > d2 only".into()));
    }
    let mut out = disj.clone();
    out.d1 = disj.d2;
    out.case = if out.d1 == 0.0 { DisjCase::A } else { DisjCase::B };
    out.relaxation_only = true;
    Ok(out)
}

/// Parameters of the convex fallback set used when Condition 6 fails.
#[derive(Debug, Clone, PartialEq)]
pub struct GPlusSet {
    pub c1: DVector<f64>,
    pub c2: DVector<f64>,
    pub d1: f64,
    pub d2: f64,
    pub s: f64,
    /// Orientation of the cut (length n, or n+1 for homogenized instances).
    pub b_s: Option<DVector<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GPlusEval {
    pub member: bool,
    /// `LHS - RHS` of the defining inequality.
    pub slack: f64,
}

pub fn gplus_membership(g: &GPlusSet, x: &DVector<f64>, strict: bool, tol: f64) -> Result<GPlusEval> {
    let n = g.c1.len();
    if x.len() != n {
        return Err(Error::Dimension(format!("x has length {}, expected {n}", x.len())));
    }
    if !(g.s > 0.0 && g.s <= 1.0) {
        return Err(Error::Input(format!("s = {} outside (0, 1]", g.s)));
    }
    let xjx = x.rows(0, n - 1).norm_squared() - x[n - 1] * x[n - 1];
    let lin = (&g.c1 - &g.c2).dot(x) - (g.d1 - g.d2);
    let mut rad = lin * lin - 2.0 * ((1.0 - g.s) / g.s) * xjx;
    let scale = 1.0 + lin * lin + x.norm_squared();
    if rad < 0.0 {
        if rad < -tol * scale {
            return Err(Error::Domain(format!(
                "negative radicand {rad:e}; x is outside the cone"
            )));
        }
        rad = 0.0;
    }
    let rhs = (g.d1 + g.d2) - (&g.c1 + &g.c2).dot(x);
    let slack = rad.sqrt() - rhs;
    let mut member = slack >= -tol * scale.sqrt();
    if strict {
        if let Some(b) = &g.b_s {
            let val = if b.len() == n + 1 {
                b.rows(0, n).dot(x) + b[n]
            } else {
                b.dot(x)
            };
            member &= val >= -tol * scale.sqrt();
        }
    }
    Ok(GPlusEval { member, slack })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BetaVerdict {
    Holds { beta1: f64, beta2: f64 },
    Fails,
}

/// Smallest `β ≥ 0` with `βc1 + c2 ∈ σK` (σ = ±1), if any.
fn beta_for_sign(c1: &DVector<f64>, c2: &DVector<f64>, sigma: f64, tol: f64) -> Option<f64> {
    let n = c1.len();
    let (t1, t2) = (c1.rows(0, n - 1), c2.rows(0, n - 1));
    let (e1, e2) = (c1[n - 1], c2[n - 1]);
    // q(β) = ‖βc̃1 + c̃2‖² - (βe1 + e2)² ≤ 0 and σ(βe1 + e2) ≥ 0.
    let a = t1.norm_squared() - e1 * e1;
    let b = t1.dot(&t2) - e1 * e2;
    let c = t2.norm_squared() - e2 * e2;
    let scale = c1.norm_squared().max(c2.norm_squared()).max(1.0);
    let feasible = |beta: f64| {
        let v = c1 * beta + c2;
        let vt = v.rows(0, n - 1).norm();
        beta >= 0.0 && vt <= sigma * v[n - 1] + tol * scale.sqrt() * (1.0 + beta)
    };
    let mut cands = vec![0.0];
    if a.abs() > tol * scale {
        let disc = b * b - a * c;
        cands.push(-b / a);
        if disc >= 0.0 {
            let r = disc.sqrt();
            cands.push((-b - r) / a);
            cands.push((-b + r) / a);
        }
    } else if b.abs() > tol * scale {
        cands.push(-c / (2.0 * b));
    }
    if e1 != 0.0 {
        cands.push(-e2 / e1);
    }
    cands.retain(|v| v.is_finite() && *v >= 0.0);
    cands.sort_by(f64::total_cmp);
    let mut probes = cands.clone();
    for w in cands.windows(2) {
        probes.push(0.5 * (w[0] + w[1]));
    }
    if let Some(&last) = cands.last() {
        probes.push(last + 1.0);
        probes.push(2.0 * last + 10.0);
    }
    probes.sort_by(f64::total_cmp);
    probes.into_iter().find(|b| feasible(*b))
}

pub fn beta_sufficiency(c1: &DVector<f64>, c2: &DVector<f64>, tol: f64) -> BetaVerdict {
    match (
        beta_for_sign(c1, c2, -1.0, tol),
        beta_for_sign(c1, c2, 1.0, tol),
    ) {
        (Some(beta1), Some(beta2)) => BetaVerdict::Holds { beta1, beta2 },
        _ => BetaVerdict::Fails,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SectionKind {
    Ellipsoid,
    Paraboloid,
    Hyperboloid,
}

pub fn classify_section(h: &DVector<f64>, tol: f64) -> Result<SectionKind> {
    let n = h.len();
    if n < 2 {
        return Err(Error::Dimension("h must have length ≥ 2".into()));
    }
    if h.iter().all(|v| *v == 0.0) {
        return Err(Error::Input("h must be nonzero".into()));
    }
    let ht = h.rows(0, n - 1).norm();
    let hn = h[n - 1].abs();
    let band = tol * h.norm().max(1.0);
    Ok(if ht < hn - band {
        SectionKind::Ellipsoid
    } else if ht <= hn + band {
        SectionKind::Paraboloid
    } else {
        SectionKind::Hyperboloid
    })
}

#[derive(Debug, Clone)]
pub struct SectionBuild {
    pub kind: SectionKind,
    pub build: DisjunctionBuild,
    /// Non-intersection on the section.
    pub cond7: Cond6Verdict,
}

/// `ρ1ᵀx ≥ d1 ∨ ρ2ᵀx ≥ d2` on `K ∩ {hᵀx = 1}`, rewritten with
/// `c_i = ρ_i - d_i h` as a homogeneous instance carrying `h`.
pub fn build_section_disjunction(
    h: &DVector<f64>,
    rho1: &DVector<f64>,
    d1: f64,
    rho2: &DVector<f64>,
    d2: f64,
    opts: Options,
) -> Result<SectionBuild> {
    let n = h.len();
    if rho1.len() != n || rho2.len() != n {
        return Err(Error::Dimension("h, ρ1 and ρ2 must share a length".into()));
    }
    let kind = classify_section(h, opts.tol)?;
    let c1 = rho1 - h * d1;
    let c2 = rho2 - h * d2;
    let cond7 = check_cond6(rho1, d1, rho2, d2, Some(h), &opts)?;
    let (trivial, warnings) = homogeneous_trivial(&c1, &c2, opts.tol);
    if let Some(t) = trivial {
        return Ok(SectionBuild {
            kind,
            build: DisjunctionBuild::Trivial(t),
            cond7,
        });
    }
    let a1 = SymMatrix::new(rank_two(&c1, &c2))?;
    let mut inst = ConeInstance::from_matrices(soc_matrix(n), a1, Some(h.clone()), opts)?;
    inst.warnings = warnings;
    inst.hint = match kind {
        SectionKind::Ellipsoid => Some(StructureHint::Ellipsoid),
        SectionKind::Paraboloid => Some(StructureHint::Paraboloid),
        SectionKind::Hyperboloid => match beta_sufficiency(rho1, rho2, opts.tol) {
            BetaVerdict::Holds { beta1, beta2 } => Some(StructureHint::BetaSufficient { beta1, beta2 }),
            BetaVerdict::Fails => None,
        },
    };
    Ok(SectionBuild {
        kind,
        build: DisjunctionBuild::Instance(Box::new(inst)),
        cond7,
    })
}

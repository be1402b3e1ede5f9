//! Ready-made pipelines: deleting a ball or a concentric ellipsoid from the
//! unit ball, intersecting a paraboloid with a quadratic, and the
//! trust-region subproblem solved through its convexified SOC form.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::cutgen::{build_cut, ConeInstance, CutResult};
use crate::error::{Error, Result};
use crate::hullcert::{decompose_point, Decomposition};
use crate::options::Options;
use crate::socp::{solve, SocpProblem, SocpSolution, SocpStatus};
use crate::socr::socr_from_a;
use crate::spectral::{sym_eigen, SymMatrix};

/// `[[Q, g], [gᵀ, f]]`.
pub fn quad_homogenize(q: &SymMatrix, g: &DVector<f64>, f: f64) -> Result<SymMatrix> {
    let n = q.dim();
    if g.len() != n {
        return Err(Error::Dimension(format!("g has length {}, Q is {n}×{n}", g.len())));
    }
    let mut m = DMatrix::zeros(n + 1, n + 1);
    m.view_mut((0, 0), (n, n)).copy_from(q.matrix());
    m.view_mut((0, n), (n, 1)).copy_from(g);
    m.view_mut((n, 0), (1, n)).copy_from(&g.transpose());
    m[(n, n)] = f;
    SymMatrix::new(m)
}

fn unit(n: usize, i: usize) -> DVector<f64> {
    let mut e = DVector::zeros(n);
    e[i] = 1.0;
    e
}

/// `diag(I_n, -1)`.
fn ball_matrix(n: usize) -> SymMatrix {
    let mut d = vec![1.0; n + 1];
    d[n] = -1.0;
    SymMatrix::from_diagonal(&d)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum HullVerdict {
    /// Nothing is cut away from the unit ball.
    UnitBall,
    /// The deleted set covers the unit ball, up to at most one point.
    Covered,
    /// Only points of the unit sphere survive, all in the top eigenspace of
    /// `E`; the hull is the unit ball of that eigenspace.
    BoundaryOnly,
}

#[derive(Debug, Clone)]
pub struct HullCut {
    pub instance: ConeInstance,
    pub cut: CutResult,
    /// Closed-form value of `s`, when one is known.
    pub formula_s: Option<f64>,
}

#[derive(Debug, Clone)]
pub enum HullOutcome {
    Cut(Box<HullCut>),
    Trivial(HullVerdict),
}

impl HullOutcome {
    pub fn cut(&self) -> Option<&HullCut> {
        match self {
            HullOutcome::Cut(c) => Some(c),
            HullOutcome::Trivial(_) => None,
        }
    }
}

fn finish(instance: ConeInstance, formula_s: Option<f64>) -> Result<HullOutcome> {
    let mut cut = build_cut(&instance)?;
    if let Some(fs) = formula_s {
        if (cut.s - fs).abs() > 1e-8 {
            cut.report
                .warnings
                .push(format!("computed s = {} differs from the closed form {fs}", cut.s));
        }
    }
    Ok(HullOutcome::Cut(Box::new(HullCut {
        instance,
        cut,
        formula_s,
    })))
}

/// Unit ball with the open ball of center `c` and radius `r` removed.
pub fn ball_deletion_hull(c: &DVector<f64>, r: f64, opts: Options) -> Result<HullOutcome> {
    let n = c.len();
    if n < 2 {
        return Err(Error::Dimension("ball deletion needs n ≥ 2".into()));
    }
    if !r.is_finite() || r <= 0.0 || c.iter().any(|v| !v.is_finite()) {
        return Err(Error::Input("radius must be positive and data finite".into()));
    }
    let nc = c.norm();
    if nc == 0.0 {
        return concentric_ellipsoid_hull(&SymMatrix::identity(n), r, opts);
    }
    if nc >= 1.0 + r || nc + r <= 1.0 {
        return Ok(HullOutcome::Trivial(HullVerdict::UnitBall));
    }
    if r >= nc + 1.0 {
        return Ok(HullOutcome::Trivial(HullVerdict::Covered));
    }
    let a1 = quad_homogenize(&SymMatrix::identity(n).scaled(-1.0), c, r * r - c.norm_squared())?;
    let inst = ConeInstance::from_matrices(ball_matrix(n), a1, Some(unit(n + 1, n)), opts)?;
    finish(inst, Some(0.5))
}

/// Unit ball with `{x : xᵀEx < r²}` removed, `E ≻ 0`.
pub fn concentric_ellipsoid_hull(e: &SymMatrix, r: f64, opts: Options) -> Result<HullOutcome> {
    let n = e.dim();
    if !r.is_finite() || r <= 0.0 {
        return Err(Error::Input("radius must be positive".into()));
    }
    let spec = sym_eigen(e)?;
    let tol = opts.tol * spec.scale();
    if spec.min() <= tol {
        return Err(Error::Input("E must be positive definite".into()));
    }
    let f = r * r;
    let lmax = spec.max();
    if lmax < f - tol {
        return Ok(HullOutcome::Trivial(HullVerdict::UnitBall));
    }
    if lmax <= f + tol {
        return Ok(HullOutcome::Trivial(HullVerdict::BoundaryOnly));
    }
    let a1 = quad_homogenize(&e.scaled(-1.0), &DVector::zeros(n), f)?;
    let inst = ConeInstance::from_matrices(ball_matrix(n), a1, Some(unit(n + 1, n)), opts)?;
    finish(inst, Some(1.0 / (1.0 + lmax)))
}

/// `{ỹᵀỹ ≤ y_n} ∩ {ỹᵀQ̃ỹ + 2gᵀy + f ≤ 0}` with `λ_min(Q̃) < 0` and
/// `2g_n ≤ -λ_min(Q̃)`.
pub fn paraboloid_hull(qt: &SymMatrix, g: &DVector<f64>, f: f64, opts: Options) -> Result<HullOutcome> {
    let m = qt.dim();
    let n = m + 1;
    if g.len() != n {
        return Err(Error::Dimension(format!("g has length {}, expected {n}", g.len())));
    }
    let spec = sym_eigen(qt)?;
    let lambda = spec.min();
    let tol = opts.tol * spec.scale().max(g.amax());
    if lambda >= -tol {
        return Err(Error::Precondition(format!(
            "λ_min(Q̃) = {lambda} is not negative; the set is already convex"
        )));
    }
    if 2.0 * g[m] > -lambda + tol {
        return Err(Error::Precondition(format!(
            "2·g_n = {} exceeds -λ_min(Q̃) = {}",
            2.0 * g[m],
            -lambda
        )));
    }
    let mut a0 = DMatrix::zeros(n + 1, n + 1);
    for i in 0..m {
        a0[(i, i)] = 1.0;
    }
    a0[(m, n)] = -0.5;
    a0[(n, m)] = -0.5;
    let mut a1 = DMatrix::zeros(n + 1, n + 1);
    a1.view_mut((0, 0), (m, m)).copy_from(qt.matrix());
    for i in 0..n {
        a1[(i, n)] = g[i];
        a1[(n, i)] = g[i];
    }
    a1[(n, n)] = f;
    let inst = ConeInstance::from_matrices(SymMatrix::new(a0)?, SymMatrix::new(a1)?, Some(unit(n + 1, n)), opts)?;
    finish(inst, Some(1.0 / (1.0 - lambda)))
}

/// `min { ỹᵀQ̃ỹ + 2g̃ᵀỹ : ‖ỹ‖ ≤ 1 }`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrsProblem {
    pub qt: SymMatrix,
    pub gt: DVector<f64>,
}

impl TrsProblem {
    pub fn new(qt: SymMatrix, gt: DVector<f64>) -> Result<Self> {
        if qt.dim() != gt.len() || gt.is_empty() {
            return Err(Error::Dimension(format!(
                "Q̃ is {0}×{0} but g̃ has length {1}",
                qt.dim(),
                gt.len()
            )));
        }
        if gt.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(TrsProblem { qt, gt })
    }

    pub fn objective(&self, y: &DVector<f64>) -> f64 {
        self.qt.quad(y) + 2.0 * self.gt.dot(y)
    }

    fn scale(&self) -> f64 {
        self.qt.max_abs().max(self.gt.amax()).max(1.0)
    }
}

/// Diagonalized problem with the smallest eigenvalue repeated once.
#[derive(Debug, Clone)]
pub struct TrsLift {
    /// `diag(μ_1, …, μ_{n-1}, μ_1)`, ascending except for the last entry.
    pub q: SymMatrix,
    pub g: DVector<f64>,
    /// Orthogonal change of variables: `ỹ = V·y[..n-1]`.
    pub v: DMatrix<f64>,
}

pub fn trs_lift(p: &TrsProblem) -> Result<TrsLift> {
    let spec = sym_eigen(&p.qt)?;
    let m = p.qt.dim();
    if spec.min() >= -p.qt.max_abs().max(1.0) * 1e-12 {
        return Err(Error::Precondition("Q̃ is positive semidefinite; solve the convex problem directly".into()));
    }
    let mut d: Vec<f64> = spec.eigvals.iter().copied().collect();
    d.push(spec.min());
    let gp = spec.eigvecs.transpose() * &p.gt;
    let mut g = DVector::zeros(m + 1);
    g.rows_mut(0, m).copy_from(&gp);
    Ok(TrsLift {
        q: SymMatrix::from_diagonal(&d),
        g,
        v: spec.eigvecs,
    })
}

#[derive(Debug, Clone)]
pub struct TrsSolution {
    pub value: f64,
    pub y: DVector<f64>,
    /// Minimum and maximum of the auxiliary coordinate over the relaxation.
    pub l: f64,
    pub u: f64,
    /// `s` of the cut used, absent on the convex route.
    pub s: Option<f64>,
    pub convex: bool,
    /// Whether the minimizer came from a hull decomposition.
    pub recovered: bool,
    /// Lifted minimizer in the eigenbasis, after moving the duplicated
    /// coordinate back to zero.
    pub y_lifted: Option<DVector<f64>>,
    pub certificates: Vec<Decomposition>,
    pub warnings: Vec<String>,
}

fn require_optimal(sol: &SocpSolution, what: &str) -> Result<()> {
    if sol.status != SocpStatus::Optimal {
        return Err(Error::Socp(format!("{what}: solver ended with {:?}", sol.status)));
    }
    Ok(())
}

fn trs_convex(p: &TrsProblem, opts: &Options) -> Result<TrsSolution> {
    let m = p.qt.dim();
    let dim = m + 2;
    let mut ball = DMatrix::zeros(dim, dim);
    for i in 0..m {
        ball[(i, i)] = 1.0;
    }
    ball[(m, m)] = -1.0;
    let mut epi = DMatrix::zeros(dim, dim);
    epi.view_mut((0, 0), (m, m)).copy_from(p.qt.matrix());
    for i in 0..m {
        epi[(i, m)] = p.gt[i];
        epi[(m, i)] = p.gt[i];
    }
    epi[(m, m + 1)] = -0.5;
    epi[(m + 1, m)] = -0.5;
    let mut x0 = unit(dim, m);
    x0[m + 1] = 1.0 + 2.0 * p.gt.norm();
    let cones = vec![
        socr_from_a(&SymMatrix::new(ball)?, Some(&x0), opts.tol)?,
        socr_from_a(&SymMatrix::new(epi)?, Some(&x0), opts.tol)?,
    ];
    let prob = SocpProblem {
        c: unit(dim, m + 1),
        cones,
        linears: vec![],
        h: unit(dim, m),
    };
    let sol = solve(&prob, Some(&x0))?;
    require_optimal(&sol, "convex trust-region solve")?;
    let mut y = sol.x.rows(0, m).into_owned();
    let ny = y.norm();
    if ny > 1.0 {
        y /= ny;
    }
    Ok(TrsSolution {
        value: p.objective(&y),
        y,
        l: sol.value,
        u: sol.value,
        s: None,
        convex: true,
        recovered: false,
        y_lifted: None,
        certificates: Vec::new(),
        warnings: Vec::new(),
    })
}

/// Solve the trust-region subproblem. Nonconvex inputs go through the lifted
/// cut and two SOCP solves; convex inputs are solved as an SOCP directly.
pub fn trs_solve(p: &TrsProblem, opts: Options) -> Result<TrsSolution> {
    let lift = match trs_lift(p) {
        Ok(l) => l,
        Err(Error::Precondition(_)) => return trs_convex(p, &opts),
        Err(e) => return Err(e),
    };
    let n = lift.q.dim();
    let dim = n + 2;
    let mut d0 = vec![1.0; dim];
    d0[n] = -1.0;
    d0[n + 1] = 0.0;
    let a0 = SymMatrix::from_diagonal(&d0);
    let mut a1 = DMatrix::zeros(dim, dim);
    let big = quad_homogenize(&lift.q, &lift.g, 0.0)?;
    a1.view_mut((0, 0), (n + 1, n + 1)).copy_from(big.matrix());
    a1[(n + 1, n + 1)] = 1.0;
    let h = unit(dim, n);
    let inst = ConeInstance::from_matrices(a0, SymMatrix::new(a1)?, Some(h.clone()), opts)?;
    let cut = build_cut(&inst)?;
    let cone_s = cut
        .cone()
        .ok_or_else(|| Error::Socp("the cut is trivial; the auxiliary coordinate is unbounded".into()))?
        .clone();
    let cones = vec![inst.cone0.clone(), cone_s];
    let lo = SocpProblem {
        c: unit(dim, n + 1),
        cones: cones.clone(),
        linears: vec![],
        h: h.clone(),
    };
    let hi = SocpProblem {
        c: -unit(dim, n + 1),
        cones,
        linears: vec![],
        h,
    };
    let sol_lo = solve(&lo, Some(&cut.xbar))?;
    require_optimal(&sol_lo, "minimizing the auxiliary coordinate")?;
    let sol_hi = solve(&hi, Some(&cut.xbar))?;
    require_optimal(&sol_hi, "maximizing the auxiliary coordinate")?;
    let (l, u) = (sol_lo.value, -sol_hi.value);
    let value = (-l * l).min(-u * u);
    let best = if l * l >= u * u { &sol_lo.x } else { &sol_hi.x };

    let mut out = TrsSolution {
        value,
        y: DVector::zeros(p.gt.len()),
        l,
        u,
        s: Some(cut.s),
        convex: false,
        recovered: false,
        y_lifted: None,
        certificates: Vec::new(),
        warnings: cut.report.warnings.clone(),
    };
    match recover_minimizer(p, &lift, &inst, &cut, best) {
        Ok((y, y_lifted, dec)) => {
            let obj = p.objective(&y);
            if (obj - value).abs() > 1e-6 * p.scale() {
                out.warnings
                    .push(format!("recovered objective {obj} differs from the staged value {value}"));
            }
            out.y = y;
            out.y_lifted = Some(y_lifted);
            out.certificates.push(dec);
            out.recovered = true;
        }
        Err(e) => out.warnings.push(format!("minimizer recovery failed: {e}")),
    }
    Ok(out)
}

/// Split the relaxation optimum into points of the original set, keep the
/// better one, rotate the duplicated coordinate away and undo the
/// diagonalization.
fn recover_minimizer(
    p: &TrsProblem,
    lift: &TrsLift,
    inst: &ConeInstance,
    cut: &CutResult,
    x: &DVector<f64>,
) -> Result<(DVector<f64>, DVector<f64>, Decomposition)> {
    let n = lift.q.dim();
    let h = inst.h.as_ref().expect("trust-region instance has h");
    let d = cut
        .report
        .cond5_witness()
        .or_else(|| cut.report.cond4_witness().filter(|d| h.dot(d).abs() <= 1e-9 * d.norm()))
        .ok_or_else(|| Error::Precondition("no witness direction inside H0".into()))?
        .clone();
    let dec = decompose_point(x, inst, &d)?;
    let lifted_obj = |e: &DVector<f64>| {
        let y = e.rows(0, n).into_owned() / e[n];
        (lift.q.quad(&y) + 2.0 * lift.g.dot(&y), y)
    };
    let (ol, yl) = lifted_obj(&dec.x_l);
    let (ou, yu) = lifted_obj(&dec.x_u);
    let mut y = if ol <= ou { yl } else { yu };
    let ny = y.norm();
    if ny > 1.0 {
        y /= ny;
    }
    // Coordinates 0 and n-1 share λ_min; only coordinate 0 sees g.
    let rho = (y[0] * y[0] + y[n - 1] * y[n - 1]).sqrt();
    let g0 = lift.g[0];
    let sign = if g0 > 0.0 {
        -1.0
    } else if g0 < 0.0 {
        1.0
    } else if y[0] < 0.0 {
        -1.0
    } else {
        1.0
    };
    y[0] = sign * rho;
    y[n - 1] = 0.0;
    let yt = &lift.v * y.rows(0, n - 1);
    debug_assert_eq!(yt.len(), p.gt.len());
    Ok((yt, y, dec))
}

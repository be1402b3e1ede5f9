//! Small dense barrier solver for `min cᵀx` over at most a few SOCr cones,
//! linear inequalities and the hyperplane `hᵀx = 1`.
//!
//! The hyperplane is eliminated by writing `x = h/‖h‖² + N z` with `N` an
//! orthonormal basis of `h⊥`, so Newton systems stay small and positive
//! definite.

use nalgebra::{Cholesky, DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::socr::SocrCone;
use crate::spectral::complement_basis;

const MU0: f64 = 1.0;
const SIGMA: f64 = 0.2;
const ARMIJO: f64 = 1e-4;
const GAP_TOL: f64 = 1e-8;
const MAX_NEWTON: usize = 200;
const MAX_OUTER: usize = 100;
const UNBOUNDED_NORM: f64 = 1e8;
const CENTER_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct SocpProblem {
    pub c: DVector<f64>,
    pub cones: Vec<SocrCone>,
    /// `(a, β)` meaning `aᵀx ≥ β`.
    pub linears: Vec<(DVector<f64>, f64)>,
    pub h: DVector<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SocpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    MaxIter,
}

#[derive(Debug, Clone)]
pub struct SocpSolution {
    pub status: SocpStatus,
    pub x: DVector<f64>,
    pub value: f64,
    pub kkt_residual: f64,
    /// Objective after each outer iteration.
    pub path: Vec<f64>,
    pub newton_steps: usize,
}

/// `‖F y + f‖ ≤ gᵀy + γ`.
#[derive(Debug, Clone)]
struct ConeRow {
    f_mat: DMatrix<f64>,
    f: DVector<f64>,
    g: DVector<f64>,
    gamma: f64,
}

#[derive(Debug, Clone)]
struct LinRow {
    a: DVector<f64>,
    beta: f64,
}

/// Problem in the reduced variable `y`, all constraints strict in the
/// barrier's domain.
#[derive(Debug, Clone)]
struct Reduced {
    c: DVector<f64>,
    cones: Vec<ConeRow>,
    lins: Vec<LinRow>,
}

impl Reduced {
    fn nu(&self) -> f64 {
        (2 * self.cones.len() + self.lins.len()) as f64
    }

    fn strictly_feasible(&self, y: &DVector<f64>) -> bool {
        self.cones.iter().all(|k| {
            let w = k.g.dot(y) + k.gamma;
            let u = &k.f_mat * y + &k.f;
            w > 0.0 && w * w - u.norm_squared() > 0.0
        }) && self.lins.iter().all(|l| l.a.dot(y) + l.beta > 0.0)
    }

    /// Barrier value, or `None` outside the domain.
    fn barrier(&self, y: &DVector<f64>) -> Option<f64> {
        let mut phi = 0.0;
        for k in &self.cones {
            let w = k.g.dot(y) + k.gamma;
            let u = &k.f_mat * y + &k.f;
            let q = w * w - u.norm_squared();
            if w <= 0.0 || q <= 0.0 {
                return None;
            }
            phi -= q.ln();
        }
        for l in &self.lins {
            let s = l.a.dot(y) + l.beta;
            if s <= 0.0 {
                return None;
            }
            phi -= s.ln();
        }
        Some(phi)
    }

    fn grad_hess(&self, y: &DVector<f64>) -> (DVector<f64>, DMatrix<f64>) {
        let m = y.len();
        let mut g = DVector::zeros(m);
        let mut hm = DMatrix::zeros(m, m);
        for k in &self.cones {
            let w = k.g.dot(y) + k.gamma;
            let u = &k.f_mat * y + &k.f;
            let q = w * w - u.norm_squared();
            let dq = (&k.g * w - k.f_mat.transpose() * &u) * 2.0;
            let d2q = (&k.g * k.g.transpose() - k.f_mat.transpose() * &k.f_mat) * 2.0;
            g -= &dq / q;
            hm += &dq * dq.transpose() / (q * q) - d2q / q;
        }
        for l in &self.lins {
            let s = l.a.dot(y) + l.beta;
            g -= &l.a / s;
            hm += &l.a * l.a.transpose() / (s * s);
        }
        (g, hm)
    }
}

fn solve_pd(hm: &DMatrix<f64>, rhs: &DVector<f64>) -> Option<DVector<f64>> {
    let scale = hm.diagonal().iter().fold(0.0f64, |a, v| a.max(v.abs())).max(1e-300);
    let mut reg = 0.0;
    for _ in 0..12 {
        let mut m = hm.clone();
        if reg > 0.0 {
            for i in 0..m.nrows() {
                m[(i, i)] += reg;
            }
        }
        if let Some(ch) = Cholesky::new(m) {
            return Some(ch.solve(rhs));
        }
        reg = if reg == 0.0 { 1e-14 * scale } else { reg * 100.0 };
    }
    None
}

enum Centering {
    Done,
    Unbounded,
    Stalled,
    EarlyStop,
}

/// Newton's method on `t·cᵀy + Φ(y)`.
fn center(
    p: &Reduced,
    y: &mut DVector<f64>,
    t: f64,
    lift_norm: &dyn Fn(&DVector<f64>) -> f64,
    stop: &dyn Fn(&DVector<f64>) -> bool,
    steps: &mut usize,
) -> Centering {
    let f = |y: &DVector<f64>| p.barrier(y).map(|b| t * p.c.dot(y) + b);
    for _ in 0..MAX_NEWTON {
        *steps += 1;
        let (g, hm) = p.grad_hess(y);
        let grad = &p.c * t + g;
        let Some(dy) = solve_pd(&hm, &(-&grad)) else {
            return Centering::Stalled;
        };
        let dec2 = -grad.dot(&dy);
        if dec2 / 2.0 <= CENTER_TOL {
            return Centering::Done;
        }
        let f0 = f(y).expect("iterate stays in the barrier domain");
        let mut alpha = 1.0;
        let mut accepted = false;
        while alpha > 1e-20 {
            let cand = &*y + &dy * alpha;
            if let Some(fc) = f(&cand) {
                if fc <= f0 - ARMIJO * alpha * dec2 {
                    *y = cand;
                    accepted = true;
                    break;
                }
            }
            alpha *= 0.5;
        }
        if !accepted {
            return Centering::Stalled;
        }
        if lift_norm(y) > UNBOUNDED_NORM {
            return Centering::Unbounded;
        }
        if stop(y) {
            return Centering::EarlyStop;
        }
    }
    Centering::Stalled
}

struct PathResult {
    status: SocpStatus,
    y: DVector<f64>,
    mu: f64,
    path: Vec<f64>,
    steps: usize,
}

fn follow_path(
    p: &Reduced,
    y0: DVector<f64>,
    lift_norm: &dyn Fn(&DVector<f64>) -> f64,
    stop: &dyn Fn(&DVector<f64>) -> bool,
) -> PathResult {
    let mut y = y0;
    let mut mu = MU0;
    let mut path = Vec::new();
    let mut steps = 0;
    let nu = p.nu().max(1.0);
    for _ in 0..MAX_OUTER {
        match center(p, &mut y, 1.0 / mu, lift_norm, stop, &mut steps) {
            Centering::Done => {}
            Centering::EarlyStop => {
                return PathResult { status: SocpStatus::Optimal, y, mu, path, steps };
            }
            Centering::Unbounded => {
                return PathResult { status: SocpStatus::Unbounded, y, mu, path, steps };
            }
            Centering::Stalled => {
                // Close to the end of the path a stalled line search only
                // means the iterate cannot be improved in floating point.
                let status = if nu * mu <= 1e3 * GAP_TOL { SocpStatus::Optimal } else { SocpStatus::MaxIter };
                return PathResult { status, y, mu, path, steps };
            }
        }
        path.push(p.c.dot(&y));
        if stop(&y) {
            return PathResult { status: SocpStatus::Optimal, y, mu, path, steps };
        }
        if nu * mu <= GAP_TOL {
            return PathResult { status: SocpStatus::Optimal, y, mu, path, steps };
        }
        mu *= SIGMA;
    }
    PathResult { status: SocpStatus::MaxIter, y, mu, path, steps }
}

impl SocpProblem {
    pub fn dim(&self) -> usize {
        self.h.len()
    }

    fn validate(&self) -> Result<()> {
        let n = self.dim();
        if self.cones.is_empty() {
            return Err(Error::Socp("at least one cone is required".into()));
        }
        if self.c.len() != n
            || self.cones.iter().any(|k| k.dim() != n)
            || self.linears.iter().any(|(a, _)| a.len() != n)
        {
            return Err(Error::Dimension(format!("SOCP data must all have dimension {n}")));
        }
        if self.h.norm() == 0.0 {
            return Err(Error::Socp("h must be nonzero".into()));
        }
        Ok(())
    }

    /// Particular point `h/‖h‖²` and basis of `h⊥`.
    fn frame(&self) -> (DVector<f64>, DMatrix<f64>) {
        let xp = &self.h / self.h.norm_squared();
        let nb = complement_basis(&self.h, 0.0);
        (xp, nb)
    }

    fn reduce(&self, xp: &DVector<f64>, nb: &DMatrix<f64>) -> Reduced {
        let cones = self
            .cones
            .iter()
            .map(|k| ConeRow {
                f_mat: k.b_mat().transpose() * nb,
                f: k.b_mat().transpose() * xp,
                g: nb.transpose() * k.b(),
                gamma: k.b().dot(xp),
            })
            .collect();
        let lins = self
            .linears
            .iter()
            .map(|(a, beta)| LinRow {
                a: nb.transpose() * a,
                beta: a.dot(xp) - beta,
            })
            .collect();
        Reduced {
            c: nb.transpose() * &self.c,
            cones,
            lins,
        }
    }

    /// Largest constraint violation at `x` (cones in `‖Bᵀx‖ - bᵀx` form).
    pub fn max_violation(&self, x: &DVector<f64>) -> f64 {
        let mut v = (self.h.dot(x) - 1.0).abs();
        for k in &self.cones {
            v = v.max((k.b_mat().transpose() * x).norm() - k.b().dot(x));
        }
        for (a, beta) in &self.linears {
            v = v.max(beta - a.dot(x));
        }
        v
    }
}

/// Phase 1: minimize a shared slack `τ ≥ -1` until the point is strictly
/// feasible.
fn phase_one(p: &Reduced) -> Option<DVector<f64>> {
    let m = p.c.len();
    let y0 = DVector::<f64>::zeros(m);
    let mut tau0: f64 = 1.0;
    for k in &p.cones {
        tau0 = tau0.max(k.f.norm() - k.gamma + 1.0);
    }
    for l in &p.lins {
        tau0 = tau0.max(-l.beta + 1.0);
    }
    let ext = |v: &DVector<f64>, last: f64| {
        let mut e = DVector::zeros(m + 1);
        e.rows_mut(0, m).copy_from(v);
        e[m] = last;
        e
    };
    let mut unit = DVector::zeros(m + 1);
    unit[m] = 1.0;
    let aux = Reduced {
        c: unit.clone(),
        cones: p
            .cones
            .iter()
            .map(|k| {
                let mut f_mat = DMatrix::zeros(k.f_mat.nrows(), m + 1);
                f_mat.view_mut((0, 0), (k.f_mat.nrows(), m)).copy_from(&k.f_mat);
                ConeRow {
                    f_mat,
                    f: k.f.clone(),
                    g: ext(&k.g, 1.0),
                    gamma: k.gamma,
                }
            })
            .collect(),
        lins: p
            .lins
            .iter()
            .map(|l| LinRow {
                a: ext(&l.a, 1.0),
                beta: l.beta,
            })
            .chain(std::iter::once(LinRow { a: unit, beta: 1.0 }))
            .collect(),
    };
    let start = ext(&y0, tau0);
    if !aux.strictly_feasible(&start) {
        return None;
    }
    let done = |v: &DVector<f64>| v[m] < 0.0 && p.strictly_feasible(&v.rows(0, m).into_owned());
    let res = follow_path(&aux, start, &|v| v.norm(), &done);
    let y = res.y.rows(0, m).into_owned();
    p.strictly_feasible(&y).then_some(y)
}

/// Solve the problem, starting from `x0` when it is strictly feasible after
/// rescaling onto `hᵀx = 1`.
pub fn solve(p: &SocpProblem, x0: Option<&DVector<f64>>) -> Result<SocpSolution> {
    p.validate()?;
    let (xp, nb) = p.frame();
    let red = p.reduce(&xp, &nb);
    let lift = |y: &DVector<f64>| &xp + &nb * y;

    let mut start = None;
    if let Some(x0) = x0 {
        if x0.len() != p.dim() {
            return Err(Error::Dimension("start point has the wrong length".into()));
        }
        let hx = p.h.dot(x0);
        if hx > 0.0 {
            let y = nb.transpose() * (x0 / hx - &xp);
            if red.strictly_feasible(&y) {
                start = Some(y);
            }
        }
    }
    let start = match start.or_else(|| phase_one(&red)) {
        Some(y) => y,
        None => {
            return Ok(SocpSolution {
                status: SocpStatus::Infeasible,
                x: xp.clone(),
                value: f64::NAN,
                kkt_residual: f64::INFINITY,
                path: Vec::new(),
                newton_steps: 0,
            })
        }
    };

    let res = follow_path(&red, start, &|y| lift(y).norm(), &|_| false);
    let x = lift(&res.y);
    let value = p.c.dot(&x);
    let (g, _) = red.grad_hess(&res.y);
    let stationarity = (&red.c + g * res.mu).norm() / (1.0 + red.c.norm());
    let kkt_residual = stationarity.max(red.nu() * res.mu);
    Ok(SocpSolution {
        status: res.status,
        x,
        value,
        kkt_residual,
        path: res.path,
        newton_steps: res.steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::socr::socr_from_a;
    use crate::spectral::{SymMatrix, DEFAULT_TOL};

    fn v(xs: &[f64]) -> DVector<f64> {
        DVector::from_column_slice(xs)
    }

    fn cone(d: &[f64], orient: &[f64]) -> SocrCone {
        socr_from_a(&SymMatrix::from_diagonal(d), Some(&v(orient)), DEFAULT_TOL).unwrap()
    }

    #[test]
    fn disc_minimum() {
        let p = SocpProblem {
            c: v(&[1.0, 0.0, 0.0]),
            cones: vec![cone(&[1.0, 1.0, -1.0], &[0.0, 0.0, 1.0])],
            linears: vec![],
            h: v(&[0.0, 0.0, 1.0]),
        };
        let sol = solve(&p, None).unwrap();
        assert_eq!(sol.status, SocpStatus::Optimal);
        assert!((sol.value + 1.0).abs() < 1e-7, "{}", sol.value);
        assert!(sol.kkt_residual <= 1e-6);
        assert!(sol.path.windows(2).all(|w| w[1] <= w[0] + 1e-12));
    }

    #[test]
    fn split_relaxation_minimum() {
        let p = SocpProblem {
            c: v(&[0.0, 0.0, 0.0, 1.0]),
            cones: vec![
                cone(&[1.0, 1.0, -1.0, 0.0], &[0.0, 0.0, 1.0, 0.0]),
                cone(&[0.0, 1.0, -1.0, 1.0], &[0.0, 0.0, 1.0, 0.0]),
            ],
            linears: vec![],
            h: v(&[0.0, 0.0, 1.0, 0.0]),
        };
        let sol = solve(&p, Some(&v(&[0.0, 0.0, 2.0, 0.0]))).unwrap();
        assert_eq!(sol.status, SocpStatus::Optimal);
        assert!((sol.value + 1.0).abs() < 1e-7);
        assert!(p.max_violation(&sol.x) < 1e-7);
    }

    #[test]
    fn linear_constraint_and_phase_one() {
        // min -x1 over the disc with x1 ≤ 0.5, started without a point.
        let p = SocpProblem {
            c: v(&[-1.0, 0.0, 0.0]),
            cones: vec![cone(&[1.0, 1.0, -1.0], &[0.0, 0.0, 1.0])],
            linears: vec![(v(&[-1.0, 0.0, 0.0]), -0.5)],
            h: v(&[0.0, 0.0, 1.0]),
        };
        let sol = solve(&p, None).unwrap();
        assert_eq!(sol.status, SocpStatus::Optimal);
        assert!((sol.value + 0.5).abs() < 1e-7);
    }

    #[test]
    fn infeasible_and_unbounded() {
        let p = SocpProblem {
            c: v(&[1.0, 0.0, 0.0]),
            cones: vec![cone(&[1.0, 1.0, -1.0], &[0.0, 0.0, 1.0])],
            linears: vec![(v(&[1.0, 0.0, 0.0]), 2.0)],
            h: v(&[0.0, 0.0, 1.0]),
        };
        assert_eq!(solve(&p, None).unwrap().status, SocpStatus::Infeasible);

        // Paraboloid x2 ≥ x1² on x3 = 1, minimize -x2.
        let para = socr_from_a(
            &SymMatrix::from_rows(&[
                vec![1.0, 0.0, 0.0],
                vec![0.0, 0.0, -0.5],
                vec![0.0, -0.5, 0.0],
            ])
            .unwrap(),
            Some(&v(&[0.0, 1.0, 1.0])),
            DEFAULT_TOL,
        )
        .unwrap();
        let p = SocpProblem {
            c: v(&[0.0, -1.0, 0.0]),
            cones: vec![para],
            linears: vec![],
            h: v(&[0.0, 0.0, 1.0]),
        };
        assert_eq!(solve(&p, None).unwrap().status, SocpStatus::Unbounded);
    }
}

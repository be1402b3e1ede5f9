//! Shared fixtures, generators and independent oracles for the integration
//! tests. Nothing here calls into the library's numerical routines.

#![allow(dead_code)]

use std::path::PathBuf;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use socdc::cutgen::ConeInstance;
use socdc::io::InstanceFile;
use socdc::{Options, SymMatrix};

pub fn v(xs: &[f64]) -> DVector<f64> {
    DVector::from_column_slice(xs)
}

pub fn m(rows: &[&[f64]]) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), rows[0].len(), |i, j| rows[i][j])
}

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn fixture(name: &str) -> ConeInstance {
    let f = InstanceFile::read(&fixture_path(name)).expect("fixture parses");
    f.to_instance(f.options).expect("fixture builds")
}

pub fn gauss<R: Rng>(r: &mut R) -> f64 {
    r.sample(StandardNormal)
}

pub fn gauss_vec<R: Rng>(r: &mut R, n: usize) -> DVector<f64> {
    DVector::from_fn(n, |_, _| gauss(r))
}

pub fn gauss_sym<R: Rng>(r: &mut R, n: usize) -> DMatrix<f64> {
    let g = DMatrix::from_fn(n, n, |_, _| gauss(r));
    (&g + g.transpose()) * 0.5
}

/// Angle between the lines spanned by `a` and `b`.
pub fn line_angle(a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    let (ua, ub) = (a / a.norm(), b / b.norm());
    let resid = &ua - &ub * ua.dot(&ub);
    resid.norm().min(1.0).asin()
}

/// Plain eigen-decomposition, ascending.
pub fn eig_sorted(a: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let e = SymmetricEigen::new(a.clone());
    let mut idx: Vec<usize> = (0..a.nrows()).collect();
    idx.sort_by(|&i, &j| e.eigenvalues[i].partial_cmp(&e.eigenvalues[j]).unwrap());
    let vals = idx.iter().map(|&i| e.eigenvalues[i]).collect();
    let vecs = DMatrix::from_fn(a.nrows(), a.nrows(), |r, c| e.eigenvectors[(r, idx[c])]);
    (vals, vecs)
}

/// Random instance with a known common interior direction: `A0 = B0B0ᵀ - b0b0ᵀ`,
/// `x̄` spans `Null(B0ᵀ)` scaled to `b0ᵀx̄ = 1`, and `A1 = M - αx̄x̄ᵀ` with
/// `x̄ᵀA1x̄ = -1`.
pub struct RandomInstance {
    pub b0_mat: DMatrix<f64>,
    pub b0: DVector<f64>,
    pub a1: DMatrix<f64>,
    pub xbar: DVector<f64>,
}

impl RandomInstance {
    pub fn generate<R: Rng>(r: &mut R, n: usize) -> Self {
        loop {
            let b0_mat = DMatrix::from_fn(n, n - 1, |_, _| gauss(r));
            let b0 = gauss_vec(r, n);
            // Null vector of B0ᵀ by cofactor expansion: zᵢ = (-1)ⁱ det(B0 without row i).
            let z = DVector::from_fn(n, |i, _| {
                let minor = b0_mat.clone().remove_row(i);
                let sgn = if i % 2 == 0 { 1.0 } else { -1.0 };
                sgn * minor.determinant()
            });
            if z.norm() < 1e-2 {
                continue;
            }
            let z = z.normalize();
            let bz = b0.dot(&z);
            if bz.abs() < 0.2 {
                continue;
            }
            let xbar = z / bz;
            let mm = gauss_sym(r, n);
            let nx = xbar.norm_squared();
            let alpha = (xbar.dot(&(&mm * &xbar)) + 1.0) / (nx * nx);
            let a1 = mm - &xbar * xbar.transpose() * alpha;
            return RandomInstance { b0_mat, b0, a1, xbar };
        }
    }

    pub fn a0(&self) -> DMatrix<f64> {
        &self.b0_mat * self.b0_mat.transpose() - &self.b0 * self.b0.transpose()
    }

    pub fn instance(&self, opts: Options) -> socdc::Result<ConeInstance> {
        ConeInstance::from_bb(
            self.b0_mat.clone(),
            self.b0.clone(),
            SymMatrix::new(self.a1.clone()).unwrap(),
            None,
            opts,
        )
    }

    /// `[B0 b0]`, invertible for the generated data.
    fn frame(&self) -> DMatrix<f64> {
        let n = self.b0.len();
        let mut p = DMatrix::zeros(n, n);
        p.view_mut((0, 0), (n, n - 1)).copy_from(&self.b0_mat);
        p.set_column(n - 1, &self.b0);
        p
    }

    /// Random point of `F0+`: `w = [B0 b0]ᵀx` ranges over the Lorentz cone.
    pub fn sample_f0<R: Rng>(&self, r: &mut R, boundary: bool) -> DVector<f64> {
        let n = self.b0.len();
        let mut u = gauss_vec(r, n - 1);
        let rad = if boundary { 1.0 } else { r.gen::<f64>().powf(1.0 / (n - 1) as f64) };
        u *= rad / u.norm();
        let mut w = DVector::zeros(n);
        w.rows_mut(0, n - 1).copy_from(&u);
        w[n - 1] = 1.0;
        let pt = self.frame().transpose();
        pt.lu().solve(&w).expect("frame is invertible")
    }

    /// Points of `F0+ ∩ F1`. Rejected draws are pulled towards `x̄` until
    /// they meet `bd(F1)`.
    pub fn sample_s<R: Rng>(&self, r: &mut R, n_pts: usize) -> Vec<DVector<f64>> {
        let mut out = Vec::with_capacity(n_pts);
        while out.len() < n_pts {
            let x = self.sample_f0(r, out.len() % 3 == 0);
            let q = x.dot(&(&self.a1 * &x));
            if q <= 0.0 {
                out.push(x);
                continue;
            }
            if let Some(y) = first_crossing(&self.a1, &self.xbar, &x) {
                out.push(y);
            }
        }
        out
    }
}

/// First point of the segment `p → q` where `zᵀAz` turns from negative to
/// zero, found by bisection on a fine grid.
pub fn first_crossing(a: &DMatrix<f64>, p: &DVector<f64>, q: &DVector<f64>) -> Option<DVector<f64>> {
    let f = |t: f64| {
        let z = p + (q - p) * t;
        z.dot(&(a * &z))
    };
    if f(0.0) > 0.0 {
        return None;
    }
    let grid = 64;
    let mut lo = 0.0;
    let mut hi = None;
    for k in 1..=grid {
        let t = k as f64 / grid as f64;
        if f(t) > 0.0 {
            hi = Some(t);
            break;
        }
        lo = t;
    }
    let mut hi = hi?;
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(p + (q - p) * lo)
}

/// Plus branch of `{xᵀAx ≤ 0}` containing `orient`, decided from a fresh
/// eigen-decomposition.
pub struct Branch {
    a: DMatrix<f64>,
    q1: DVector<f64>,
    root: f64,
}

impl Branch {
    pub fn new(a: &DMatrix<f64>, orient: &DVector<f64>) -> Self {
        let (vals, vecs) = eig_sorted(a);
        let q1 = vecs.column(0).into_owned();
        let q1 = if q1.dot(orient) < 0.0 { -q1 } else { q1 };
        Branch {
            a: a.clone(),
            q1,
            root: (-vals[0]).max(0.0).sqrt(),
        }
    }

    /// Signed margin relative to `‖x‖²`; negative means outside.
    pub fn margin(&self, x: &DVector<f64>) -> f64 {
        let nx2 = x.norm_squared().max(1e-300);
        let quad = -x.dot(&(&self.a * x)) / nx2;
        let lin = self.q1.dot(x) * self.root / nx2.sqrt();
        quad.min(lin)
    }
}

/// Global minimum of `yᵀQy + 2gᵀy` over `‖y‖ ≤ 1` from the secular equation.
pub fn trs_oracle(q: &DMatrix<f64>, g: &DVector<f64>) -> f64 {
    let (lam, vecs) = eig_sorted(q);
    let gh = vecs.transpose() * g;
    let n = lam.len();
    let obj = |y: &DVector<f64>| y.dot(&(q * y)) + 2.0 * g.dot(y);
    let y_of = |mu: f64| {
        let w = DVector::from_fn(n, |i, _| -gh[i] / (lam[i] + mu));
        &vecs * w
    };
    let mut best = f64::INFINITY;
    // Interior stationary point when Q ≻ 0.
    if lam[0] > 0.0 {
        let y = y_of(0.0);
        if y.norm() <= 1.0 {
            best = best.min(obj(&y));
        }
    }
    // Boundary: ‖y(μ)‖ = 1 with μ > max(0, -λ1), ‖y(μ)‖ decreasing in μ.
    let lo0 = (-lam[0]).max(0.0);
    let norm_at = |mu: f64| y_of(mu).norm();
    let mut lo = lo0;
    let mut hi = lo0 + 1.0;
    while norm_at(hi) > 1.0 {
        hi = lo0 + 2.0 * (hi - lo0);
    }
    if norm_at(lo0 + 1e-15 * (1.0 + lo0)) > 1.0 {
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if norm_at(mid) > 1.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let y = y_of(hi);
        best = best.min(obj(&(&y / y.norm().max(1.0))));
    } else {
        // Hard case: y(-λ1) restricted to the other eigenspaces, completed
        // along the bottom eigenvector.
        let w = DVector::from_fn(n, |i, _| {
            if (lam[i] - lam[0]).abs() <= 1e-12 * (1.0 + lam[0].abs()) {
                0.0
            } else {
                -gh[i] / (lam[i] + lo0)
            }
        });
        let rest = (1.0 - w.norm_squared()).max(0.0).sqrt();
        for sgn in [1.0, -1.0] {
            let mut w2 = w.clone();
            w2[0] += sgn * rest;
            best = best.min(obj(&(&vecs * w2)));
        }
    }
    best
}

/// Smallest objective over dense random points of the unit sphere and ball.
pub fn trs_sampled<R: Rng>(q: &DMatrix<f64>, g: &DVector<f64>, r: &mut R, n_pts: usize) -> f64 {
    let n = g.len();
    let obj = |y: &DVector<f64>| y.dot(&(q * y)) + 2.0 * g.dot(y);
    let mut best = obj(&DVector::zeros(n));
    for k in 0..n_pts {
        let mut y = gauss_vec(r, n);
        y /= y.norm();
        if k % 4 == 3 {
            y *= r.gen::<f64>();
        }
        best = best.min(obj(&y));
    }
    best
}

/// Whether `x` is a convex combination of two points of
/// `{‖y‖ ≤ 1} \ {‖y - c‖ < r}`, searched over lines through `x`. The
/// directions include a full circle orthogonal to `c`.
pub fn ball_two_point(x: &DVector<f64>, c: &DVector<f64>, r: f64, dirs: &[DVector<f64>]) -> bool {
    let in_s = |y: &DVector<f64>| y.norm() <= 1.0 && (y - c).norm() >= r;
    if in_s(x) {
        return true;
    }
    if x.norm() > 1.0 {
        return false;
    }
    // Chord of a ball along x + t·u: t ∈ [t_lo, t_hi].
    let chord = |center: &DVector<f64>, rad: f64, u: &DVector<f64>| {
        let p = x - center;
        let b = p.dot(u);
        let disc = b * b - (p.norm_squared() - rad * rad);
        if disc < 0.0 {
            None
        } else {
            Some((-b - disc.sqrt(), -b + disc.sqrt()))
        }
    };
    dirs.iter().any(|u| {
        let (a, b) = match chord(&DVector::zeros(x.len()), 1.0, u) {
            Some(t) => t,
            None => return false,
        };
        match chord(c, r, u) {
            // x is in the open deleted ball, so the deleted chord straddles 0.
            Some((g, d)) => a <= g && d <= b,
            None => true,
        }
    })
}

/// Directions for [`ball_two_point`] in ℝ³ around the axis `c`.
pub fn ball_directions<R: Rng>(c: &DVector<f64>, r: &mut R, n_random: usize) -> Vec<DVector<f64>> {
    let e = c / c.norm();
    let mut t = DVector::zeros(3);
    t[if e[0].abs() < 0.9 { 0 } else { 1 }] = 1.0;
    let p1 = (&t - &e * e.dot(&t)).normalize();
    let p2 = e.cross(&p1);
    let mut dirs: Vec<DVector<f64>> = (0..360)
        .map(|k| {
            let th = k as f64 * std::f64::consts::PI / 180.0;
            &p1 * th.cos() + &p2 * th.sin()
        })
        .collect();
    for _ in 0..n_random {
        let u = gauss_vec(r, 3);
        dirs.push(u.normalize());
    }
    dirs
}

pub fn seeded(seed: u64) -> ChaCha8Rng {
    use rand::SeedableRng;
    ChaCha8Rng::seed_from_u64(seed)
}

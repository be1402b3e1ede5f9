//! SOC-representable cones `F+ = {x : ‖Bᵀx‖ ≤ bᵀx}` and their mirror `F-`.
//!
//! A cone can be built from `(B, b)` directly or from a symmetric matrix with
//! exactly one negative eigenvalue. Either way the defining matrix
//! `A = BBᵀ - bbᵀ` is cached together with its spectrum, which also drives
//! the cone sampler used by the certification code.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{sym_eigen, Spectrum, SymMatrix};

#[derive(Debug, Clone)]
pub struct SocrCone {
    b_mat: DMatrix<f64>,
    b: DVector<f64>,
    a: SymMatrix,
    orientation: Option<DVector<f64>>,
    spectrum: Spectrum,
    tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Region {
    InteriorPlus,
    BoundaryPlus,
    Apex,
    InteriorMinus,
    BoundaryMinus,
    Outside,
}

impl Region {
    pub fn in_plus(self) -> bool {
        matches!(self, Region::InteriorPlus | Region::BoundaryPlus | Region::Apex)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConeMembership {
    pub region: Region,
    /// `bᵀx - ‖Bᵀx‖`.
    pub slack: f64,
}

fn numeric_rank(m: &DMatrix<f64>, tol: f64) -> usize {
    if m.ncols() == 0 || m.nrows() == 0 {
        return 0;
    }
    let sv = m.clone().svd(false, false).singular_values;
    let top = sv.iter().fold(0.0f64, |a, v| a.max(*v));
    sv.iter().filter(|v| **v > tol * top.max(1.0)).count()
}

fn check_inertia(spec: &Spectrum, tol: f64) -> Result<()> {
    let i = spec.inertia(tol);
    if i.n_neg != 1 || i.n_pos == 0 {
        return Err(Error::WrongInertia {
            neg: i.n_neg,
            zero: i.n_zero,
            pos: i.n_pos,
        });
    }
    Ok(())
}

/// Cone from explicit `(B, b)`; `B` is n×(n-1) and may contain zero columns.
pub fn socr_from_bb(b_mat: DMatrix<f64>, b: DVector<f64>, tol: f64) -> Result<SocrCone> {
    let n = b.len();
    if n < 2 || b_mat.nrows() != n || b_mat.ncols() != n - 1 {
        return Err(Error::Dimension(format!(
            "B is {}x{} and b has length {}; expected n x (n-1) and n",
            b_mat.nrows(),
            b_mat.ncols(),
            n
        )));
    }
    if b_mat.iter().chain(b.iter()).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    let scale = b_mat.amax().max(b.amax()).max(1.0);
    let live: Vec<usize> = (0..n - 1)
        .filter(|&j| b_mat.column(j).amax() > tol * scale)
        .collect();
    if live.is_empty() {
        return Err(Error::InvalidCone("B is identically zero".into()));
    }
    let nz = b_mat.select_columns(live.iter());
    let r = numeric_rank(&nz, tol);
    if r < live.len() {
        return Err(Error::InvalidCone("nonzero columns of B are dependent".into()));
    }
    let mut aug = nz.clone().insert_column(nz.ncols(), 0.0);
    aug.set_column(nz.ncols(), &b);
    if numeric_rank(&aug, tol) != r + 1 {
        return Err(Error::InvalidCone("b lies in the range of B".into()));
    }
    let a = SymMatrix::new(&b_mat * b_mat.transpose() - &b * b.transpose())?;
    let spectrum = sym_eigen(&a)?;
    check_inertia(&spectrum, tol)?;
    Ok(SocrCone {
        b_mat,
        b,
        a,
        orientation: None,
        spectrum,
        tol,
    })
}

/// Cone from a matrix with one negative eigenvalue. `b` points along the
/// negative eigenvector; with `orient` the sign makes `bᵀx̄ ≥ 0`, otherwise
/// the largest-magnitude entry of `b` is positive.
pub fn socr_from_a(a: &SymMatrix, orient: Option<&DVector<f64>>, tol: f64) -> Result<SocrCone> {
    from_a_inner(a, orient, tol, false)
}

/// Degenerate cone `{bᵀx ≥ 0}` from a matrix of inertia `(1, n-1, 0)`;
/// `B` is zero and `A = -bbᵀ`.
pub fn socr_halfspace(a: &SymMatrix, orient: Option<&DVector<f64>>, tol: f64) -> Result<SocrCone> {
    from_a_inner(a, orient, tol, true)
}

fn from_a_inner(
    a: &SymMatrix,
    orient: Option<&DVector<f64>>,
    tol: f64,
    halfspace: bool,
) -> Result<SocrCone> {
    let n = a.dim();
    if n < 2 {
        return Err(Error::Dimension("cone dimension must be at least 2".into()));
    }
    let spectrum = sym_eigen(a)?;
    if halfspace {
        let i = spectrum.inertia(tol);
        if i.n_neg != 1 || i.n_pos != 0 {
            return Err(Error::WrongInertia {
                neg: i.n_neg,
                zero: i.n_zero,
                pos: i.n_pos,
            });
        }
    } else {
        check_inertia(&spectrum, tol)?;
    }
    let band = tol * spectrum.scale();
    let mut b = spectrum.vector(0) * (-spectrum.eigvals[0]).sqrt();
    let mut b_mat = DMatrix::zeros(n, n - 1);
    for j in 1..n {
        let lam = spectrum.eigvals[j];
        if lam > band {
            b_mat.set_column(j - 1, &(spectrum.vector(j) * lam.sqrt()));
        }
    }
    if let Some(x) = orient {
        if x.len() != n {
            return Err(Error::Dimension(format!(
                "orientation point has length {}, cone dimension {}",
                x.len(),
                n
            )));
        }
        if b.dot(x) < 0.0 {
            b.neg_mut();
        }
    }
    Ok(SocrCone {
        b_mat,
        b,
        a: a.clone(),
        orientation: orient.cloned(),
        spectrum,
        tol,
    })
}

pub fn quad_value(a: &SymMatrix, x: &DVector<f64>) -> Result<f64> {
    if x.len() != a.dim() {
        return Err(Error::Dimension(format!(
            "vector of length {} against {}x{} matrix",
            x.len(),
            a.dim(),
            a.dim()
        )));
    }
    Ok(a.quad(x))
}

pub fn membership(cone: &SocrCone, x: &DVector<f64>, tol: f64) -> ConeMembership {
    cone.classify(x, tol)
}

impl SocrCone {
    pub fn dim(&self) -> usize {
        self.b.len()
    }

    pub fn b_mat(&self) -> &DMatrix<f64> {
        &self.b_mat
    }

    pub fn b(&self) -> &DVector<f64> {
        &self.b
    }

    pub fn a(&self) -> &SymMatrix {
        &self.a
    }

    pub fn orientation(&self) -> Option<&DVector<f64>> {
        self.orientation.as_ref()
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    /// `max(1, sqrt(spectral radius of A))`, the size of `‖Bᵀx‖` per unit `x`.
    pub fn scale(&self) -> f64 {
        self.spectrum.spectral_radius().sqrt().max(1.0)
    }

    /// The same point set with `b` negated.
    pub fn mirrored(&self) -> SocrCone {
        let mut c = self.clone();
        c.b.neg_mut();
        c
    }

    /// Basis of `apex = Null(A)`.
    pub fn apex_basis(&self) -> DMatrix<f64> {
        self.spectrum.null_basis(self.tol)
    }

    pub fn slack(&self, x: &DVector<f64>) -> f64 {
        self.b.dot(x) - (self.b_mat.transpose() * x).norm()
    }

    pub fn contains(&self, x: &DVector<f64>, tol: f64) -> bool {
        self.classify(x, tol).region.in_plus()
    }

    pub fn classify(&self, x: &DVector<f64>, tol: f64) -> ConeMembership {
        let band = tol * self.scale() * x.norm().max(1.0);
        let bx = self.b.dot(x);
        let nb = (self.b_mat.transpose() * x).norm();
        let slack = bx - nb;
        let region = if nb <= band && bx.abs() <= band {
            Region::Apex
        } else if slack > band {
            Region::InteriorPlus
        } else if slack >= -band && bx > 0.0 {
            Region::BoundaryPlus
        } else if -bx - nb > band {
            Region::InteriorMinus
        } else if -bx - nb >= -band && bx < 0.0 {
            Region::BoundaryMinus
        } else {
            Region::Outside
        };
        ConeMembership { region, slack }
    }

    /// Random point of `F+`. Coordinates follow the eigenbasis of `A`: unit
    /// weight on the negative direction, a ball (or sphere, for `boundary`)
    /// in the positive directions and Gaussian components along the apex.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, boundary: bool) -> DVector<f64> {
        let spec = &self.spectrum;
        let n = self.dim();
        let band = self.tol * spec.scale();
        let lam1 = -spec.eigvals[0];
        let pos: Vec<usize> = (1..n).filter(|&j| spec.eigvals[j] > band).collect();
        let mut u: Vec<f64> = pos.iter().map(|_| rng.sample(StandardNormal)).collect();
        let un = u.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-300);
        let radius: f64 = if boundary {
            1.0
        } else {
            rng.gen::<f64>().powf(1.0 / pos.len().max(1) as f64)
        };
        for v in u.iter_mut() {
            *v *= radius / un;
        }
        let mut x = spec.vector(0);
        for (k, &j) in pos.iter().enumerate() {
            x += spec.vector(j) * (u[k] * (lam1 / spec.eigvals[j]).sqrt());
        }
        for j in 1..n {
            if spec.eigvals[j] <= band {
                let g: f64 = rng.sample(StandardNormal);
                x += spec.vector(j) * g;
            }
        }
        if self.b.dot(&x) < 0.0 {
            x.neg_mut();
        }
        let r: f64 = 0.25 + 1.75 * rng.gen::<f64>();
        x * r
    }
}

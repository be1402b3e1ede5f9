//! Dense symmetric eigendecomposition, inertia, null spaces and the real
//! singular parameters of the pencil `A_t = (1-t)A0 + tA1`.
//!
//! Eigenvalues are always sorted ascending and each eigenvector is signed so
//! that its largest-magnitude entry is positive. That makes every downstream
//! result a deterministic function of the input matrix.

use faer::Side;
use nalgebra::{DMatrix, DVector, Schur};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default zero tolerance, relative to `max(1, spectral radius)`.
pub const DEFAULT_TOL: f64 = 1e-9;

/// A pencil eigenvalue counts as real when `|Im| <= IMAG_TOL * (1 + |Re|)`.
pub const IMAG_TOL: f64 = 1e-8;

/// Dense real symmetric matrix. Symmetrized as `(S + S^T)/2` on construction.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    m: DMatrix<f64>,
}

impl SymMatrix {
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::Dimension(format!(
                "matrix is {}x{}, expected square",
                m.nrows(),
                m.ncols()
            )));
        }
        if m.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        let sym = (&m + m.transpose()) * 0.5;
        Ok(SymMatrix { m: sym })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::Dimension(format!(
                "row of length {} in a {}-row matrix",
                bad.len(),
                n
            )));
        }
        Self::new(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    pub fn from_diagonal(d: &[f64]) -> Self {
        SymMatrix {
            m: DMatrix::from_diagonal(&DVector::from_column_slice(d)),
        }
    }

    pub fn identity(n: usize) -> Self {
        SymMatrix {
            m: DMatrix::identity(n, n),
        }
    }

    pub fn zeros(n: usize) -> Self {
        SymMatrix {
            m: DMatrix::zeros(n, n),
        }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.m
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.m[(i, j)]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.dim())
            .map(|i| (0..self.dim()).map(|j| self.m[(i, j)]).collect())
            .collect()
    }

    /// `(1-t)·a + t·b`, evaluated entrywise so the result is exactly symmetric.
    pub fn pencil(a: &SymMatrix, b: &SymMatrix, t: f64) -> SymMatrix {
        assert_eq!(a.dim(), b.dim(), "pencil of matrices with different sizes");
        let m = a.m.zip_map(&b.m, |x, y| (1.0 - t) * x + t * y);
        SymMatrix { m }
    }

    pub fn scaled(&self, r: f64) -> SymMatrix {
        SymMatrix { m: &self.m * r }
    }

    pub fn max_abs(&self) -> f64 {
        self.m.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    /// `x^T S x`.
    pub fn quad(&self, x: &DVector<f64>) -> f64 {
        x.dot(&(&self.m * x))
    }

    /// `x^T S y`.
    pub fn bilinear(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        x.dot(&(&self.m * y))
    }

    pub fn mul_vec(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.m * x
    }
}

impl Serialize for SymMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_rows().serialize(s)
    }
}

impl<'de> Deserialize<'de> for SymMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<f64>>::deserialize(d)?;
        SymMatrix::from_rows(&rows).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Inertia {
    pub n_neg: usize,
    pub n_zero: usize,
    pub n_pos: usize,
}

/// Eigenvalues ascending, eigenvectors as matching columns.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub eigvals: DVector<f64>,
    pub eigvecs: DMatrix<f64>,
}

impl Spectrum {
    pub fn dim(&self) -> usize {
        self.eigvals.len()
    }

    pub fn min(&self) -> f64 {
        self.eigvals[0]
    }

    pub fn max(&self) -> f64 {
        self.eigvals[self.dim() - 1]
    }

    pub fn spectral_radius(&self) -> f64 {
        self.eigvals.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    /// `max(1, spectral radius)`.
    pub fn scale(&self) -> f64 {
        self.spectral_radius().max(1.0)
    }

    pub fn vector(&self, j: usize) -> DVector<f64> {
        self.eigvecs.column(j).into_owned()
    }

    pub fn inertia(&self, tol: f64) -> Inertia {
        let band = tol * self.scale();
        let mut out = Inertia {
            n_neg: 0,
            n_zero: 0,
            n_pos: 0,
        };
        for &v in self.eigvals.iter() {
            if v < -band {
                out.n_neg += 1;
            } else if v > band {
                out.n_pos += 1;
            } else {
                out.n_zero += 1;
            }
        }
        out
    }

    /// Columns whose eigenvalue lies inside the zero band.
    pub fn null_basis(&self, tol: f64) -> DMatrix<f64> {
        let band = tol * self.scale();
        let idx: Vec<usize> = (0..self.dim())
            .filter(|&j| self.eigvals[j].abs() <= band)
            .collect();
        self.eigvecs.select_columns(idx.iter())
    }

    /// Smallest `|eigenvalue|`.
    pub fn min_abs(&self) -> f64 {
        self.eigvals.iter().fold(f64::INFINITY, |acc, v| acc.min(v.abs()))
    }
}

/// Flip `v` so its largest-magnitude entry (first one on ties) is positive.
pub(crate) fn canonical_sign(v: &mut DVector<f64>) {
    let mut best = 0usize;
    for i in 1..v.len() {
        if v[i].abs() > v[best].abs() * (1.0 + 1e-12) {
            best = i;
        }
    }
    if !v.is_empty() && v[best] < 0.0 {
        v.neg_mut();
    }
}

pub fn sym_eigen(s: &SymMatrix) -> Result<Spectrum> {
    let n = s.dim();
    if n == 0 {
        return Ok(Spectrum {
            eigvals: DVector::zeros(0),
            eigvecs: DMatrix::zeros(0, 0),
        });
    }
    let fm = faer::Mat::<f64>::from_fn(n, n, |i, j| s.m[(i, j)]);
    let eig = fm.selfadjoint_eigendecomposition(Side::Lower);
    let (u, d) = (eig.u(), eig.s().column_vector());
    if (0..n).any(|j| !d.read(j).is_finite()) {
        return Err(Error::EigenFailure);
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d.read(a).total_cmp(&d.read(b)));
    let eigvals = DVector::from_iterator(n, order.iter().map(|&j| d.read(j)));
    let mut eigvecs = DMatrix::zeros(n, n);
    for (k, &j) in order.iter().enumerate() {
        let mut v = DVector::from_fn(n, |i, _| u.read(i, j));
        canonical_sign(&mut v);
        eigvecs.set_column(k, &v);
    }
    Ok(Spectrum { eigvals, eigvecs })
}

pub fn inertia(s: &SymMatrix, tol: f64) -> Result<Inertia> {
    Ok(sym_eigen(s)?.inertia(tol))
}

/// Orthonormal basis (n×k) of the numerical null space of `s`.
pub fn nullspace_basis(s: &SymMatrix, tol: f64) -> Result<DMatrix<f64>> {
    Ok(sym_eigen(s)?.null_basis(tol))
}

/// `Z^T S Z`, symmetrized.
pub fn restricted_form(s: &SymMatrix, z: &DMatrix<f64>) -> Result<SymMatrix> {
    if z.nrows() != s.dim() {
        return Err(Error::Dimension(format!(
            "basis has {} rows, matrix is {}x{}",
            z.nrows(),
            s.dim(),
            s.dim()
        )));
    }
    SymMatrix::new(z.transpose() * &s.m * z)
}

/// Real eigenvalues of `A0^{-1} A1`, ascending, multiplicity preserved.
pub fn pencil_real_eigs(a0: &SymMatrix, a1: &SymMatrix, tol: f64) -> Result<Vec<f64>> {
    if a0.dim() != a1.dim() {
        return Err(Error::Dimension(format!(
            "pencil sizes {} and {}",
            a0.dim(),
            a1.dim()
        )));
    }
    let n = a0.dim();
    let spec0 = sym_eigen(a0)?;
    if spec0.min_abs() <= tol * spec0.scale() {
        return Err(Error::SingularPencil);
    }
    // A0^{-1} = Q diag(1/λ) Q^T; exact in the eigenbasis.
    let inv_diag = spec0.eigvals.map(|v| 1.0 / v);
    let a0_inv = &spec0.eigvecs * DMatrix::from_diagonal(&inv_diag) * spec0.eigvecs.transpose();
    let m = a0_inv * a1.matrix();
    let schur = Schur::try_new(m, f64::EPSILON, 1000 * n.max(10)).ok_or(Error::EigenFailure)?;
    let mut out: Vec<f64> = schur
        .complex_eigenvalues()
        .iter()
        .filter(|z| z.im.abs() <= IMAG_TOL * (1.0 + z.re.abs()))
        .map(|z| z.re)
        .collect();
    out.sort_by(f64::total_cmp);
    Ok(out)
}

/// Orthonormal basis of `v^⊥` (k×(k-1)), or the identity when `v` is
/// numerically zero.
pub fn complement_basis(v: &DVector<f64>, tol: f64) -> DMatrix<f64> {
    let k = v.len();
    let nv = v.norm();
    if nv <= tol {
        return DMatrix::identity(k, k);
    }
    // Householder reflector H with H v = ∓‖v‖ e_1; its last k-1 columns span v^⊥.
    let mut w = v / nv;
    let s = if w[0] >= 0.0 { 1.0 } else { -1.0 };
    w[0] += s;
    let wn = w.norm_squared();
    let h = DMatrix::identity(k, k) - (&w * w.transpose()) * (2.0 / wn);
    h.columns(1, k - 1).into_owned()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn fix_a_as() -> SymMatrix {
        SymMatrix::from_rows(&[
            vec![0.0, 0.0, 0.0, -2.0],
            vec![0.0, 0.0, 0.0, -1.0],
            vec![0.0, 0.0, 6.0, 0.0],
            vec![-2.0, -1.0, 0.0, -4.0],
        ])
        .unwrap()
        .scaled(0.125)
    }

    #[test]
    fn diagonal_eigenvalues_sorted() {
        let s = sym_eigen(&SymMatrix::from_diagonal(&[1.0, 1.0, 1.0, -1.0])).unwrap();
        assert_eq!(s.eigvals.as_slice(), &[-1.0, 1.0, 1.0, 1.0]);
        assert_eq!(s.vector(0), DVector::from_column_slice(&[0.0, 0.0, 0.0, 1.0]));
    }

    #[test]
    fn aggregated_matrix_has_expected_negative_pair() {
        let s = sym_eigen(&fix_a_as()).unwrap();
        assert_abs_diff_eq!(s.min(), -5.0 / 8.0, epsilon = 1e-12);
        let q = s.vector(0);
        let target = DVector::from_column_slice(&[2.0, 1.0, 0.0, 5.0]).normalize();
        assert_abs_diff_eq!(q.dot(&target).abs(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn inertia_examples() {
        let i = inertia(&SymMatrix::from_diagonal(&[1.0, 1.0, -1.0, 0.0]), DEFAULT_TOL).unwrap();
        assert_eq!((i.n_neg, i.n_zero, i.n_pos), (1, 1, 2));
        let i = inertia(&fix_a_as(), DEFAULT_TOL).unwrap();
        assert_eq!((i.n_neg, i.n_zero, i.n_pos), (1, 1, 2));
    }

    #[test]
    fn nullspace_examples() {
        let z = nullspace_basis(&SymMatrix::from_diagonal(&[1.0, 1.0, -1.0, 0.0]), DEFAULT_TOL)
            .unwrap();
        assert_eq!(z.ncols(), 1);
        assert_eq!(z.column(0).into_owned(), DVector::from_column_slice(&[0.0, 0.0, 0.0, 1.0]));

        let z = nullspace_basis(&fix_a_as(), DEFAULT_TOL).unwrap();
        assert_eq!(z.ncols(), 1);
        let d = DVector::from_column_slice(&[1.0, -2.0, 0.0, 0.0]).normalize();
        assert_abs_diff_eq!(z.column(0).dot(&d).abs(), 1.0, epsilon = 1e-12);

        let z = nullspace_basis(&SymMatrix::identity(3), DEFAULT_TOL).unwrap();
        assert_eq!(z.ncols(), 0);
    }

    #[test]
    fn pencil_examples() {
        let e = pencil_real_eigs(
            &SymMatrix::identity(2),
            &SymMatrix::from_diagonal(&[2.0, 3.0]),
            DEFAULT_TOL,
        )
        .unwrap();
        assert_abs_diff_eq!(e[0], 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(e[1], 3.0, epsilon = 1e-12);

        let eps = 0.125;
        let a_eps = SymMatrix::from_diagonal(&[1.0 - 2.0 * eps, 1.0 - eps, -1.0 + eps, eps]);
        let a1 = SymMatrix::from_diagonal(&[-1.0, 0.0, 0.0, 1.0]);
        let e = pencil_real_eigs(&a_eps, &a1, DEFAULT_TOL).unwrap();
        let want = [-4.0 / 3.0, 0.0, 0.0, 8.0];
        assert_eq!(e.len(), 4);
        for (x, y) in e.iter().zip(want) {
            assert_abs_diff_eq!(*x, y, epsilon = 1e-12);
        }
    }

    #[test]
    fn pencil_rejects_singular_base() {
        let r = pencil_real_eigs(
            &SymMatrix::from_diagonal(&[1.0, 0.0]),
            &SymMatrix::identity(2),
            DEFAULT_TOL,
        );
        assert!(matches!(r, Err(Error::SingularPencil)));
    }

    #[test]
    fn pencil_drops_complex_pairs() {
        // A0^{-1} A1 is a rotation generator: eigenvalues ±i.
        let a0 = SymMatrix::from_diagonal(&[1.0, -1.0]);
        let a1 = SymMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert!(pencil_real_eigs(&a0, &a1, DEFAULT_TOL).unwrap().is_empty());
    }

    #[test]
    fn restricted_examples() {
        let a1 = SymMatrix::from_diagonal(&[-1.0, 0.0, 0.0, 1.0]);
        let z = DMatrix::from_column_slice(4, 1, &[0.0, 0.0, 0.0, 1.0]);
        assert_eq!(restricted_form(&a1, &z).unwrap().to_rows(), vec![vec![1.0]]);

        let f1 = SymMatrix::from_rows(&[
            vec![0.0, -1.0, 1.0],
            vec![-1.0, 0.0, 2.0],
            vec![1.0, 2.0, -4.0],
        ])
        .unwrap()
        .scaled(0.5);
        let z = DMatrix::from_column_slice(3, 1, &[0.0, 0.0, 1.0]);
        assert_eq!(restricted_form(&f1, &z).unwrap().to_rows(), vec![vec![-2.0]]);

        let id = DMatrix::identity(3, 3);
        assert_eq!(restricted_form(&f1, &id).unwrap(), f1);
        assert!(restricted_form(&f1, &DMatrix::identity(2, 2)).is_err());
    }

    #[test]
    fn symmetrizes_and_rejects_bad_input() {
        let s = SymMatrix::from_rows(&[vec![1.0, 2.0], vec![0.0, 1.0]]).unwrap();
        assert_eq!(s.get(0, 1), 1.0);
        assert_eq!(s.get(1, 0), 1.0);
        assert!(matches!(
            SymMatrix::from_rows(&[vec![f64::NAN]]),
            Err(Error::NonFinite)
        ));
        assert!(SymMatrix::from_rows(&[vec![1.0, 2.0]]).is_err());
    }

    #[test]
    fn complement_is_orthonormal() {
        let v = DVector::from_column_slice(&[0.3, -1.2, 2.0, 0.5]);
        let w = complement_basis(&v, 1e-12);
        assert_eq!(w.shape(), (4, 3));
        assert!((w.transpose() * &w - DMatrix::identity(3, 3)).amax() < 1e-14);
        assert!((w.transpose() * &v).amax() < 1e-14);
    }
}

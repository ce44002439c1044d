//! Tolerance-aware dense complex linear algebra.
//!
//! Every "is this subspace closed / are these equal / what is the dimension"
//! question of the exact theory becomes a threshold decision on singular
//! values here. The two thresholds live in [`Tolerance`].

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::jacobi;
use crate::scalar::{is_finite, CMatrix, Real};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance<T> {
    rank_rel: T,
    gap_abs: T,
}

impl<T: Real> Tolerance<T> {
    pub fn new(rank_rel: T, gap_abs: T) -> Result<Self> {
        let one = T::one();
        let zero = T::zero();
        if !(rank_rel > zero && rank_rel < one) {
            return Err(Error::InvalidTolerance(format!(
                "rank_rel must lie in (0, 1), got {}",
                rank_rel
            )));
        }
        if !(gap_abs > zero && gap_abs < one) {
            return Err(Error::InvalidTolerance(format!(
                "gap_abs must lie in (0, 1), got {}",
                gap_abs
            )));
        }
        Ok(Self { rank_rel, gap_abs })
    }

    /// Relative singular-value threshold used for rank decisions.
    pub fn rank_rel(&self) -> T {
        self.rank_rel
    }

    /// Absolute threshold on projector-norm distances.
    pub fn gap_abs(&self) -> T {
        self.gap_abs
    }

    /// Smallest singular value still counted as nonzero for an
    /// `rows × cols` matrix whose largest singular value is `sigma_max`.
    pub fn rank_threshold(&self, rows: usize, cols: usize, sigma_max: T) -> T {
        self.rank_rel * T::lit(rows.max(cols) as f64) * sigma_max
    }

    /// Cosine above which two principal vectors are considered equal.
    pub(crate) fn cos_threshold(&self) -> T {
        T::one() - self.gap_abs
    }
}

impl<T: Real> Default for Tolerance<T> {
    fn default() -> Self {
        Self {
            rank_rel: T::lit(T::DEFAULT_RANK_REL),
            gap_abs: T::lit(T::DEFAULT_GAP_ABS),
        }
    }
}

/// Orthonormal column frame of a subspace of `C^ambient_dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame<T: Real> {
    columns: CMatrix<T>,
}

impl<T: Real> Frame<T> {
    /// Frame with no columns.
    pub fn empty(ambient_dim: usize) -> Self {
        Self {
            columns: CMatrix::zeros(ambient_dim, 0),
        }
    }

    /// Wraps columns that are already orthonormal. The caller is trusted.
    pub(crate) fn from_orthonormal(columns: CMatrix<T>) -> Self {
        Self { columns }
    }

    /// Wraps `columns` after checking `ColumnsᴴColumns = I` within `gap_abs`.
    pub fn try_from_orthonormal(columns: CMatrix<T>, tol: &Tolerance<T>) -> Result<Self> {
        check_finite(&columns)?;
        let frame = Self { columns };
        let defect = frame.orthonormality_defect();
        if defect > tol.gap_abs() {
            return Err(Error::InvalidInput(format!(
                "frame columns are not orthonormal (defect {:e})",
                defect.to_f64_lossy()
            )));
        }
        Ok(frame)
    }

    pub fn ambient_dim(&self) -> usize {
        self.columns.nrows()
    }

    pub fn dim(&self) -> usize {
        self.columns.ncols()
    }

    pub fn columns(&self) -> &CMatrix<T> {
        &self.columns
    }

    pub fn into_columns(self) -> CMatrix<T> {
        self.columns
    }

    /// `‖FᴴF − I‖₂`.
    pub fn orthonormality_defect(&self) -> T {
        let k = self.dim();
        if k == 0 {
            return T::zero();
        }
        let gram = self.columns.adjoint() * &self.columns;
        spectral_norm(&(gram - CMatrix::<T>::identity(k, k)))
    }
}

pub(crate) fn check_finite<T: Real>(m: &CMatrix<T>) -> Result<()> {
    if m.iter().all(is_finite) {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

/// Thin SVD with singular values sorted in decreasing order.
///
/// `u` is `rows × p` and `v` is `cols × p` with `p = min(rows, cols)`.
pub(crate) struct SortedSvd<T: Real> {
    pub u: CMatrix<T>,
    pub s: Vec<T>,
    pub v: CMatrix<T>,
}

pub(crate) fn svd_sorted<T: Real>(m: &CMatrix<T>) -> SortedSvd<T> {
    let (rows, cols) = m.shape();
    let p = rows.min(cols);
    if p == 0 {
        return SortedSvd {
            u: CMatrix::zeros(rows, 0),
            s: Vec::new(),
            v: CMatrix::zeros(cols, 0),
        };
    }
    let svd = jacobi::svd(m);
    let (u, v) = (svd.u, svd.v);
    let mut order: Vec<usize> = (0..p).collect();
    order.sort_by(|&a, &b| svd.s[b].partial_cmp(&svd.s[a]).unwrap_or(std::cmp::Ordering::Equal));
    let s = order.iter().map(|&i| svd.s[i]).collect();
    let u = CMatrix::from_fn(rows, p, |r, j| u[(r, order[j])]);
    let v = CMatrix::from_fn(cols, p, |r, j| v[(r, order[j])]);
    SortedSvd { u, s, v }
}

/// Singular values in decreasing order.
pub fn singular_values<T: Real>(m: &CMatrix<T>) -> Vec<T> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    svd_sorted(m).s
}

/// Largest singular value; zero for empty matrices.
pub fn spectral_norm<T: Real>(m: &CMatrix<T>) -> T {
    singular_values(m).first().copied().unwrap_or_else(T::zero)
}

/// Smallest singular value of a square matrix; zero for the empty matrix.
pub fn smallest_singular_value<T: Real>(m: &CMatrix<T>) -> T {
    let s = singular_values(m);
    if s.len() < m.nrows().max(m.ncols()) {
        return T::zero();
    }
    s.last().copied().unwrap_or_else(T::zero)
}

/// Number of leading entries of `s` above the rank threshold, where the
/// threshold scales with `max(σ_max, reference)`.
fn count_above<T: Real>(s: &[T], rows: usize, cols: usize, reference: T, tol: &Tolerance<T>) -> usize {
    let Some(&sigma_max) = s.first() else {
        return 0;
    };
    let scale = sigma_max.max(reference);
    if scale <= T::zero() {
        return 0;
    }
    let threshold = tol.rank_threshold(rows, cols, scale);
    s.iter().take_while(|&&x| x > threshold).count()
}

/// Number of singular values above `rank_rel · max(rows, cols) · σ_max`.
pub fn numerical_rank<T: Real>(m: &CMatrix<T>, tol: &Tolerance<T>) -> Result<usize> {
    check_finite(m)?;
    let s = singular_values(m);
    Ok(count_above(&s, m.nrows(), m.ncols(), T::zero(), tol))
}

/// Orthonormal frame for the column space of `m`.
pub fn orthonormalize<T: Real>(m: &CMatrix<T>, tol: &Tolerance<T>) -> Result<Frame<T>> {
    check_finite(m)?;
    Ok(orthonormalize_scaled(m, T::zero(), tol))
}

/// [`orthonormalize`] with the rank threshold scaled by
/// `max(σ_max(m), reference)` instead of `σ_max(m)`, so that a matrix that
/// is tiny relative to `reference` has rank zero.
pub(crate) fn orthonormalize_scaled<T: Real>(m: &CMatrix<T>, reference: T, tol: &Tolerance<T>) -> Frame<T> {
    let svd = svd_sorted(m);
    let rank = count_above(&svd.s, m.nrows(), m.ncols(), reference, tol);
    Frame::from_orthonormal(svd.u.columns(0, rank).into_owned())
}

/// The `k` leading left singular vectors of `m`, for callers that know the
/// dimension of the column space from a structural argument.
pub(crate) fn leading_left_vectors<T: Real>(m: &CMatrix<T>, k: usize) -> CMatrix<T> {
    if k == 0 {
        return CMatrix::zeros(m.nrows(), 0);
    }
    let svd = svd_sorted(m);
    assert!(k <= svd.s.len(), "requested {k} singular vectors of a rank-{} matrix", svd.s.len());
    svd.u.columns(0, k).into_owned()
}

/// Orthonormal basis of `{x : m x = 0}` (right null space) and the rank of
/// `m`, with the rank threshold scaled by `max(σ_max(m), reference)`.
pub(crate) fn null_space<T: Real>(m: &CMatrix<T>, reference: T, tol: &Tolerance<T>) -> (CMatrix<T>, usize) {
    let (rows, cols) = m.shape();
    if cols == 0 {
        return (CMatrix::zeros(0, 0), 0);
    }
    // pad to at least square so the thin SVD returns a full right basis
    let padded = if rows < cols {
        let mut p = CMatrix::zeros(cols, cols);
        p.rows_mut(0, rows).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = svd_sorted(&padded);
    let rank = count_above(&svd.s, rows, cols, reference, tol);
    (svd.v.columns(rank, cols - rank).into_owned(), rank)
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
pub(crate) fn hermitian_eigen<T: Real>(m: &CMatrix<T>) -> (Vec<T>, CMatrix<T>) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), CMatrix::zeros(0, 0));
    }
    let herm = (m + m.adjoint()) * Complex::new(T::lit(0.5), T::zero());
    let (eigenvalues, eigenvectors) = jacobi::hermitian_eigen(&herm);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eigenvalues[a].partial_cmp(&eigenvalues[b]).unwrap_or(std::cmp::Ordering::Equal));
    let values = order.iter().map(|&i| eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(n, n, |r, j| eigenvectors[(r, order[j])]);
    (values, vectors)
}

/// Replaces a full-column-rank matrix by the nearest matrix with
/// orthonormal columns (the unitary polar factor).
pub(crate) fn polar_orthonormal<T: Real>(m: &CMatrix<T>) -> CMatrix<T> {
    if m.ncols() == 0 {
        return m.clone();
    }
    let svd = svd_sorted(m);
    &svd.u * svd.v.adjoint()
}

/// `‖a − aᴴ‖₂`.
pub fn hermitian_defect<T: Real>(a: &CMatrix<T>) -> T {
    spectral_norm(&(a - a.adjoint()))
}

/// `‖uᴴu − 1‖₂`.
pub fn unitary_defect<T: Real>(u: &CMatrix<T>) -> T {
    let n = u.ncols();
    spectral_norm(&(u.adjoint() * u - CMatrix::<T>::identity(n, n)))
}

/// Orthogonal projector onto the range of an idempotent `t`, computed by
/// the closed formula `t (t + tᴴ − 1)⁻¹`.
pub fn idempotent_to_projector<T: Real>(t: &CMatrix<T>, tol: &Tolerance<T>) -> Result<CMatrix<T>> {
    check_finite(t)?;
    let n = t.nrows();
    if t.ncols() != n {
        return Err(Error::DimensionMismatch(format!(
            "idempotent must be square, got {}×{}",
            n,
            t.ncols()
        )));
    }
    let residual = spectral_norm(&(t * t - t));
    if residual > tol.gap_abs() {
        return Err(Error::NotIdempotent {
            residual: residual.to_f64_lossy(),
        });
    }
    if n == 0 {
        return Ok(t.clone());
    }
    let pivot = t + t.adjoint() - CMatrix::<T>::identity(n, n);
    let s = singular_values(&pivot);
    let sigma_max = s[0];
    let sigma_min = s[s.len() - 1];
    // for an idempotent the pivot is invertible with σ_min ≥ 1
    if sigma_max <= T::zero() || sigma_min <= tol.rank_threshold(n, n, sigma_max) {
        return Err(Error::SingularPivot);
    }
    let inverse = pivot.try_inverse().ok_or(Error::SingularPivot)?;
    Ok(t * inverse)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{c, cr};

    fn tol() -> Tolerance<f64> {
        Tolerance::default()
    }

    fn real(rows: usize, cols: usize, data: &[f64]) -> CMatrix<f64> {
        CMatrix::from_row_slice(rows, cols, &data.iter().map(|&x| cr(x)).collect::<Vec<_>>())
    }

    #[test]
    fn tolerance_validation() {
        assert!(Tolerance::new(0.0, 1e-8).is_err());
        assert!(Tolerance::new(1e-10, 1.0).is_err());
        assert!(Tolerance::new(1e-10, 1e-8).is_ok());
        let d: Tolerance<f64> = Tolerance::default();
        assert_eq!(d.rank_rel(), 1e-10);
        assert_eq!(d.gap_abs(), 1e-8);
    }

    #[test]
    fn normalizes_single_column() {
        let f = orthonormalize(&real(2, 1, &[3.0, 4.0]), &tol()).unwrap();
        assert_eq!(f.dim(), 1);
        // sign of a singular vector is arbitrary
        let phase = f.columns()[(0, 0)] / cr(0.6);
        assert!((f.columns()[(0, 0)] / phase - cr(0.6)).norm() < 1e-12);
        assert!((f.columns()[(1, 0)] / phase - cr(0.8)).norm() < 1e-12);
    }

    #[test]
    fn duplicate_columns_collapse() {
        let f = orthonormalize(&real(2, 2, &[1.0, 1.0, 0.0, 0.0]), &tol()).unwrap();
        assert_eq!(f.dim(), 1);
        assert!((f.columns()[(0, 0)].norm() - 1.0).abs() < 1e-12);
        assert!(f.columns()[(1, 0)].norm() < 1e-12);
    }

    #[test]
    fn rank_examples() {
        assert_eq!(numerical_rank(&CMatrix::<f64>::zeros(3, 4), &tol()).unwrap(), 0);
        let d = real(2, 2, &[1.0, 0.0, 0.0, 1e-14]);
        assert_eq!(numerical_rank(&d, &tol()).unwrap(), 1);
        let empty = CMatrix::<f64>::zeros(3, 0);
        assert_eq!(numerical_rank(&empty, &tol()).unwrap(), 0);
        assert_eq!(orthonormalize(&empty, &tol()).unwrap().dim(), 0);
    }

    #[test]
    fn non_finite_rejected() {
        let mut m = real(2, 2, &[1.0, 0.0, 0.0, 1.0]);
        m[(1, 1)] = c(f64::NAN, 0.0);
        assert_eq!(numerical_rank(&m, &tol()), Err(Error::NonFinite));
        assert_eq!(orthonormalize(&m, &tol()).unwrap_err(), Error::NonFinite);
    }

    #[test]
    fn projector_formula_examples() {
        let t = real(2, 2, &[1.0, 1.0, 0.0, 0.0]);
        let p = idempotent_to_projector(&t, &tol()).unwrap();
        let expected = real(2, 2, &[1.0, 0.0, 0.0, 0.0]);
        assert!(spectral_norm(&(p - expected)) < 1e-12);

        let zero = CMatrix::<f64>::zeros(3, 3);
        let p0 = idempotent_to_projector(&zero, &tol()).unwrap();
        assert!(spectral_norm(&p0) < 1e-15);

        let h = real(2, 2, &[0.5, 0.5, 0.5, 0.5]);
        let ph = idempotent_to_projector(&h, &tol()).unwrap();
        assert!(spectral_norm(&(ph - &h)) < 1e-12);
    }

    #[test]
    fn projector_formula_rejects_non_idempotent() {
        let t = real(2, 2, &[2.0, 0.0, 0.0, 0.0]);
        assert!(matches!(
            idempotent_to_projector(&t, &tol()),
            Err(Error::NotIdempotent { .. })
        ));
        let r = real(2, 3, &[1.0; 6]);
        assert!(matches!(
            idempotent_to_projector(&r, &tol()),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn null_space_of_wide_matrix() {
        let m = real(1, 3, &[1.0, 1.0, 0.0]);
        let (null, rank) = null_space(&m, 0.0, &tol());
        assert_eq!(rank, 1);
        assert_eq!(null.ncols(), 2);
        assert!(spectral_norm(&(&m * &null)) < 1e-12);
    }

    #[test]
    fn single_precision_defaults() {
        let t: Tolerance<f32> = Tolerance::default();
        let m = CMatrix::<f32>::from_row_slice(
            2,
            2,
            &[cr(1.0), cr(0.0), cr(0.0), cr(1e-7)],
        );
        assert_eq!(numerical_rank(&m, &t).unwrap(), 1);
        let p = idempotent_to_projector(
            &CMatrix::<f32>::from_row_slice(2, 2, &[cr(1.0), cr(1.0), cr(0.0), cr(0.0)]),
            &t,
        )
        .unwrap();
        assert!((p[(0, 0)].re - 1.0).abs() < 1e-5);
        assert!(p[(0, 1)].norm() < 1e-5);
    }
}

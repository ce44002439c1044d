//! Subspaces of `Cⁿ` and the elementary calculus on them: projectors,
//! complements, intersections, sums, the gap metric and the index of a pair.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::{
    hermitian_eigen, leading_left_vectors, orthonormalize, polar_orthonormal,
    singular_values, spectral_norm, Frame, Tolerance,
};
use crate::scalar::{CMatrix, Real};

/// A subspace of `C^ambient_dim`, stored as an orthonormal frame.
///
/// Frames are not unique, so equality of subspaces is a tolerance question;
/// use [`Subspace::approx_eq`] or [`gap_distance`].
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace<T: Real> {
    frame: Frame<T>,
}

impl<T: Real> Subspace<T> {
    /// Column space of `m`.
    pub fn span(m: &CMatrix<T>, tol: &Tolerance<T>) -> Result<Self> {
        Ok(Self {
            frame: orthonormalize(m, tol)?,
        })
    }

    pub fn from_frame(frame: Frame<T>) -> Self {
        Self { frame }
    }

    pub(crate) fn from_orthonormal(columns: CMatrix<T>) -> Self {
        Self {
            frame: Frame::from_orthonormal(columns),
        }
    }

    /// Column space of `m`, whose dimension is known to be exactly `k`.
    pub(crate) fn span_with_dim(m: &CMatrix<T>, k: usize) -> Self {
        Self::from_orthonormal(leading_left_vectors(m, k))
    }

    pub fn zero(ambient_dim: usize) -> Self {
        Self {
            frame: Frame::empty(ambient_dim),
        }
    }

    pub fn full(ambient_dim: usize) -> Self {
        Self::from_orthonormal(CMatrix::identity(ambient_dim, ambient_dim))
    }

    /// Span of the standard basis vectors with the given indices.
    pub fn coordinate(ambient_dim: usize, indices: &[usize]) -> Self {
        let mut m = CMatrix::zeros(ambient_dim, indices.len());
        for (j, &i) in indices.iter().enumerate() {
            m[(i, j)] = num_complex::Complex::new(T::one(), T::zero());
        }
        Self::from_orthonormal(m)
    }

    pub fn ambient_dim(&self) -> usize {
        self.frame.ambient_dim()
    }

    pub fn dim(&self) -> usize {
        self.frame.dim()
    }

    pub fn codim(&self) -> usize {
        self.ambient_dim() - self.dim()
    }

    pub fn frame(&self) -> &Frame<T> {
        &self.frame
    }

    /// The orthonormal basis as an `ambient_dim × dim` matrix.
    pub fn basis(&self) -> &CMatrix<T> {
        self.frame.columns()
    }

    pub fn projector(&self) -> CMatrix<T> {
        projector(self)
    }

    pub fn complement(&self) -> Self {
        complement(self)
    }

    /// `‖(1 − P_self) F_other‖₂`: how far `other` sticks out of `self`.
    pub fn containment_residual(&self, other: &Self) -> T {
        assert_same_ambient(self, other);
        if other.dim() == 0 {
            return T::zero();
        }
        let inside = self.basis() * (self.basis().adjoint() * other.basis());
        spectral_norm(&(other.basis() - inside))
    }

    /// `other ⊆ self` within `gap_abs`.
    pub fn contains(&self, other: &Self, tol: &Tolerance<T>) -> bool {
        self.containment_residual(other) <= tol.gap_abs()
    }

    pub fn approx_eq(&self, other: &Self, tol: &Tolerance<T>) -> bool {
        self.dim() == other.dim() && gap_distance(self, other) <= tol.gap_abs()
    }

    /// `self ⊕ other` inside `C^(n + n′)`.
    pub fn direct_sum(&self, other: &Self) -> Self {
        let (n1, k1) = (self.ambient_dim(), self.dim());
        let (n2, k2) = (other.ambient_dim(), other.dim());
        let mut m = CMatrix::zeros(n1 + n2, k1 + k2);
        m.view_mut((0, 0), (n1, k1)).copy_from(self.basis());
        m.view_mut((n1, k1), (n2, k2)).copy_from(other.basis());
        Self::from_orthonormal(m)
    }

    /// Coordinates of `self` with respect to the orthonormal basis of
    /// `host`, as a subspace of `C^(dim host)`. `self` is assumed to lie in
    /// `host`; the component outside is discarded.
    pub fn coordinates_in(&self, host: &Self) -> Self {
        assert_same_ambient(self, host);
        let coords = host.basis().adjoint() * self.basis();
        Self::from_orthonormal(polar_orthonormal(&coords))
    }

    /// Inverse of [`Subspace::coordinates_in`]: the subspace of the ambient
    /// space of `host` whose coordinates are `self`.
    pub fn embed_into(&self, host: &Self) -> Self {
        assert_eq!(
            self.ambient_dim(),
            host.dim(),
            "coordinate subspace does not match the host dimension"
        );
        Self::from_orthonormal(host.basis() * self.basis())
    }
}

fn assert_same_ambient<T: Real>(s: &Subspace<T>, t: &Subspace<T>) {
    assert_eq!(
        s.ambient_dim(),
        t.ambient_dim(),
        "subspaces live in different ambient spaces"
    );
}

/// Orthogonal projector `F Fᴴ`.
pub fn projector<T: Real>(s: &Subspace<T>) -> CMatrix<T> {
    s.basis() * s.basis().adjoint()
}

/// Orthogonal complement in the ambient space.
pub fn complement<T: Real>(s: &Subspace<T>) -> Subspace<T> {
    let n = s.ambient_dim();
    let k = s.dim();
    if k == 0 {
        return Subspace::full(n);
    }
    if k == n {
        return Subspace::zero(n);
    }
    // eigenvectors of P_s for its n − k smallest eigenvalues (all ≈ 0)
    let (_, vectors) = hermitian_eigen(&projector(s));
    Subspace::from_orthonormal(vectors.columns(0, n - k).into_owned())
}

/// Principal-vector split of `t` relative to `s`.
struct PrincipalSplit<T: Real> {
    /// Principal vectors of `t` (orthonormal, `n × dim t`).
    vectors: CMatrix<T>,
    /// Which principal vectors are counted as common to `s` and `t`.
    shared: Vec<bool>,
}

fn principal_split<T: Real>(s: &Subspace<T>, t: &Subspace<T>, tol: &Tolerance<T>) -> PrincipalSplit<T> {
    let cross = s.basis().adjoint() * t.basis();
    let gram = cross.adjoint() * &cross;
    let (cos2, v) = hermitian_eigen(&gram);
    let threshold = tol.cos_threshold() * tol.cos_threshold();
    let shared = cos2.iter().map(|&c2| c2 >= threshold).collect();
    PrincipalSplit {
        vectors: t.basis() * v,
        shared,
    }
}

/// `s ∩ t`: span of the principal vectors whose principal-angle cosine is at
/// least `1 − gap_abs`.
pub fn intersect<T: Real>(s: &Subspace<T>, t: &Subspace<T>, tol: &Tolerance<T>) -> Subspace<T> {
    assert_same_ambient(s, t);
    let n = s.ambient_dim();
    if s.dim() == 0 || t.dim() == 0 {
        return Subspace::zero(n);
    }
    let split = principal_split(s, t, tol);
    let cols: Vec<usize> = (0..t.dim()).filter(|&j| split.shared[j]).collect();
    Subspace::from_orthonormal(split.vectors.select_columns(cols.iter()))
}

/// `s + t`. Built from the frame of `s` and the normalized residuals of the
/// principal vectors of `t` that are not shared with `s`, so
/// `dim(s∩t) + dim(s+t) = dim s + dim t` holds exactly.
pub fn sum<T: Real>(s: &Subspace<T>, t: &Subspace<T>, tol: &Tolerance<T>) -> Subspace<T> {
    assert_same_ambient(s, t);
    let n = s.ambient_dim();
    if t.dim() == 0 {
        return s.clone();
    }
    if s.dim() == 0 {
        return t.clone();
    }
    let split = principal_split(s, t, tol);
    let fresh: Vec<usize> = (0..t.dim()).filter(|&j| !split.shared[j]).collect();
    let mut residual = CMatrix::zeros(n, fresh.len());
    let ps = projector(s);
    for (col, &j) in fresh.iter().enumerate() {
        let v = split.vectors.column(j);
        // non-shared means sin θ > 0 well above round-off
        let r = v - &ps * v;
        let norm = r.norm();
        residual.set_column(col, &(r / num_complex::Complex::new(norm, T::zero())));
    }
    let residual = polar_orthonormal(&residual);
    let k = s.dim() + fresh.len();
    let mut m = CMatrix::zeros(n, k);
    m.columns_mut(0, s.dim()).copy_from(s.basis());
    m.columns_mut(s.dim(), fresh.len()).copy_from(&residual);
    Subspace::from_orthonormal(m)
}

/// Gap metric `‖P_s − P_t‖₂`.
pub fn gap_distance<T: Real>(s: &Subspace<T>, t: &Subspace<T>) -> T {
    assert_same_ambient(s, t);
    spectral_norm(&(projector(s) - projector(t)))
}

/// Dimensions and index of a pair of subspaces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PairIndexReport {
    /// `dim(s ∩ t)`
    pub dim_cap: usize,
    /// `codim(s + t)`
    pub codim_sum: usize,
    pub index: i64,
    pub transversal: bool,
}

impl PairIndexReport {
    fn from_dims(dim_cap: usize, codim_sum: usize) -> Self {
        Self {
            dim_cap,
            codim_sum,
            index: dim_cap as i64 - codim_sum as i64,
            transversal: dim_cap == 0 && codim_sum == 0,
        }
    }
}

/// `ind(s, t) = dim(s∩t) − codim(s+t)`.
pub fn pair_index<T: Real>(s: &Subspace<T>, t: &Subspace<T>, tol: &Tolerance<T>) -> PairIndexReport {
    let cap = intersect(s, t, tol).dim();
    let total = sum(s, t, tol).dim();
    PairIndexReport::from_dims(cap, s.ambient_dim() - total)
}

/// Image `f(s)` of a subspace under an invertible map.
pub fn map_subspace<T: Real>(f: &CMatrix<T>, s: &Subspace<T>, tol: &Tolerance<T>) -> Result<Subspace<T>> {
    let n = s.ambient_dim();
    if f.nrows() != n || f.ncols() != n {
        return Err(Error::DimensionMismatch(format!(
            "map is {}×{}, subspace lives in C^{}",
            f.nrows(),
            f.ncols(),
            n
        )));
    }
    crate::numeric::check_finite(f)?;
    let sv = singular_values(f);
    let sigma_max = sv.first().copied().unwrap_or_else(T::zero);
    let sigma_min = sv.last().copied().unwrap_or_else(T::zero);
    if n > 0 && (sigma_max <= T::zero() || sigma_min <= tol.rank_threshold(n, n, sigma_max)) {
        return Err(Error::SingularMap {
            sigma_min: sigma_min.to_f64_lossy(),
        });
    }
    Ok(Subspace::span_with_dim(&(f * s.basis()), s.dim()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{c, cr};

    type S = Subspace<f64>;

    fn tol() -> Tolerance<f64> {
        Tolerance::default()
    }

    fn span_real(n: usize, cols: &[&[f64]]) -> S {
        let m = CMatrix::from_fn(n, cols.len(), |i, j| cr(cols[j][i]));
        S::span(&m, &tol()).unwrap()
    }

    fn close(a: &CMatrix<f64>, b: &CMatrix<f64>, eps: f64) -> bool {
        spectral_norm(&(a - b)) <= eps
    }

    #[test]
    fn projector_examples() {
        let e1 = S::coordinate(2, &[0]);
        let expected = CMatrix::from_row_slice(2, 2, &[cr(1.0), cr(0.0), cr(0.0), cr(0.0)]);
        assert!(close(&e1.projector(), &expected, 1e-15));

        let diag = span_real(2, &[&[1.0, 1.0]]);
        let half = CMatrix::from_element(2, 2, cr(0.5));
        assert!(close(&diag.projector(), &half, 1e-12));

        assert!(close(&S::full(3).projector(), &CMatrix::identity(3, 3), 1e-15));
    }

    #[test]
    fn complement_examples() {
        let t = tol();
        assert!(S::coordinate(2, &[0]).complement().approx_eq(&S::coordinate(2, &[1]), &t));
        assert!(S::zero(3).complement().approx_eq(&S::full(3), &t));
        assert_eq!(S::full(3).complement().dim(), 0);

        let s = S::span(&CMatrix::from_column_slice(2, 1, &[cr(1.0), c(0.0, 1.0)]), &t).unwrap();
        let expected =
            S::span(&CMatrix::from_column_slice(2, 1, &[cr(1.0), c(0.0, -1.0)]), &t).unwrap();
        assert!(s.complement().approx_eq(&expected, &t));
    }

    #[test]
    fn intersect_and_sum_examples() {
        let t = tol();
        let l = S::coordinate(4, &[0, 1]);
        let m = S::coordinate(4, &[1, 2]);
        assert!(intersect(&l, &m, &t).approx_eq(&S::coordinate(4, &[1]), &t));
        assert_eq!(sum(&l, &m, &t).dim(), 3);
        assert!(intersect(&l, &l, &t).approx_eq(&l, &t));
        assert_eq!(intersect(&S::coordinate(2, &[0]), &S::coordinate(2, &[1]), &t).dim(), 0);
        assert!(sum(&S::coordinate(2, &[0]), &S::coordinate(2, &[1]), &t).approx_eq(&S::full(2), &t));
        assert!(sum(&l, &S::zero(4), &t).approx_eq(&l, &t));
        assert_eq!(intersect(&l, &S::zero(4), &t).dim(), 0);
    }

    #[test]
    fn gap_examples() {
        let e1 = S::coordinate(2, &[0]);
        assert!(gap_distance(&e1, &e1) < 1e-15);
        assert!((gap_distance(&e1, &S::coordinate(2, &[1])) - 1.0).abs() < 1e-12);
        let theta: f64 = 0.3;
        let rotated = span_real(2, &[&[theta.cos(), theta.sin()]]);
        assert!((gap_distance(&e1, &rotated) - theta.sin().abs()).abs() < 1e-12);
    }

    #[test]
    fn pair_index_examples() {
        let t = tol();
        let r = pair_index(&S::coordinate(4, &[0, 1]), &S::coordinate(4, &[1, 2]), &t);
        assert_eq!((r.dim_cap, r.codim_sum, r.index, r.transversal), (1, 1, 0, false));
        let l = S::coordinate(5, &[0, 3]);
        assert_eq!(pair_index(&l, &l, &t).index, 2 * 2 - 5);
        let tr = pair_index(&S::coordinate(3, &[0]), &S::coordinate(3, &[1, 2]), &t);
        assert!(tr.transversal);
        assert_eq!(tr.index, 0);
    }

    #[test]
    fn map_subspace_examples() {
        let t = tol();
        let s = span_real(2, &[&[1.0, 1.0]]);
        let id = CMatrix::<f64>::identity(2, 2);
        assert!(map_subspace(&id, &s, &t).unwrap().approx_eq(&s, &t));
        let f = CMatrix::from_row_slice(2, 2, &[cr(2.0), cr(0.0), cr(0.0), cr(1.0)]);
        let image = map_subspace(&f, &s, &t).unwrap();
        assert!(image.approx_eq(&span_real(2, &[&[2.0, 1.0]]), &t));
        let singular = CMatrix::from_row_slice(2, 2, &[cr(1.0), cr(0.0), cr(0.0), cr(0.0)]);
        assert!(matches!(map_subspace(&singular, &s, &t), Err(Error::SingularMap { .. })));
    }

    #[test]
    fn coordinates_round_trip() {
        let t = tol();
        let host = S::coordinate(4, &[1, 3]);
        let inner = S::coordinate(4, &[3]);
        let coords = inner.coordinates_in(&host);
        assert_eq!(coords.ambient_dim(), 2);
        assert!(coords.embed_into(&host).approx_eq(&inner, &t));
    }

    #[test]
    fn direct_sum_dims() {
        let a = S::coordinate(2, &[0]);
        let b = S::coordinate(3, &[1, 2]);
        let d = a.direct_sum(&b);
        assert_eq!((d.ambient_dim(), d.dim()), (5, 3));
        assert!(d.frame().orthonormality_defect() < 1e-15);
    }
}

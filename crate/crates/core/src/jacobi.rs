//! Jacobi SVD and Hermitian eigensolver.
//!
//! nalgebra's complex SVD can stall or return factors that do not
//! reconstruct the input when the matrix is rank deficient, which is the
//! common case here (projected bases, graphs of low-rank maps). Jacobi
//! rotations are slower but converge unconditionally and give small
//! singular values to full relative accuracy.

use crate::scalar::{c, cr, modulus, CMatrix, Real, C};

const MAX_SWEEPS: usize = 80;

fn real<T: Real>(x: T) -> C<T> {
    c(x, T::zero())
}

/// Unsorted thin SVD `m = u·diag(s)·vᴴ`, `u` with orthonormal columns.
pub(crate) struct Decomposition<T: Real> {
    pub u: CMatrix<T>,
    pub s: Vec<T>,
    pub v: CMatrix<T>,
}

/// Rotation parameters `(cos, sin)` that make columns with squared norms
/// `alpha`, `beta` and real inner product `g > 0` orthogonal.
fn rotation<T: Real>(alpha: T, beta: T, g: T) -> (T, T) {
    let two = T::lit(2.0);
    let zeta = (beta - alpha) / (two * g);
    let root = (T::one() + zeta * zeta).sqrt();
    let t = if zeta >= T::zero() {
        T::one() / (zeta + root)
    } else {
        -T::one() / (-zeta + root)
    };
    let cs = T::one() / (T::one() + t * t).sqrt();
    (cs, cs * t)
}

/// `[x_p, x_q] ← [c·x_p − s·ē·x_q, s·x_p + c·ē·x_q]` on columns.
fn rotate_columns<T: Real>(x: &mut CMatrix<T>, p: usize, q: usize, cs: T, sn: T, e_bar: C<T>) {
    for r in 0..x.nrows() {
        let (xp, xq) = (x[(r, p)], x[(r, q)] * e_bar);
        x[(r, p)] = xp * real(cs) - xq * real(sn);
        x[(r, q)] = xp * real(sn) + xq * real(cs);
    }
}

fn column_dot<T: Real>(x: &CMatrix<T>, p: usize, q: usize) -> C<T> {
    x.column(p).dotc(&x.column(q))
}

/// One-sided (Hestenes) Jacobi SVD of a matrix with `rows ≥ cols`.
fn tall_svd<T: Real>(m: &CMatrix<T>) -> Decomposition<T> {
    let (rows, n) = m.shape();
    let mut u = m.clone();
    let mut v = CMatrix::<T>::identity(n, n);
    let eps = T::default_epsilon();
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = u.column(p).norm_squared();
                let beta = u.column(q).norm_squared();
                let gamma = column_dot(&u, p, q);
                let g = modulus(gamma);
                if g == T::zero() || g <= eps * T::lit(rows as f64) * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let e_bar = (gamma / real(g)).conj();
                let (cs, sn) = rotation(alpha, beta, g);
                rotate_columns(&mut u, p, q, cs, sn, e_bar);
                rotate_columns(&mut v, p, q, cs, sn, e_bar);
            }
        }
        if !rotated {
            break;
        }
    }
    let s: Vec<T> = (0..n).map(|j| u.column(j).norm()).collect();
    let scale = s.iter().fold(T::zero(), |a, &b| a.max(b));
    let mut basis = CMatrix::zeros(rows, n);
    let mut have = vec![false; n];
    for j in 0..n {
        if s[j] > scale * eps * T::lit(rows as f64) && s[j] > T::zero() {
            basis.set_column(j, &(u.column(j) / real(s[j])));
            have[j] = true;
        }
    }
    complete_columns(&mut basis, &have);
    Decomposition { u: basis, s, v }
}

/// Fills the columns not marked in `have` with unit vectors orthogonal to
/// all others: the standard basis vector with the largest residual, with
/// Gram–Schmidt applied twice.
fn complete_columns<T: Real>(x: &mut CMatrix<T>, have: &[bool]) {
    let rows = x.nrows();
    let mut filled: Vec<usize> = (0..have.len()).filter(|&j| have[j]).collect();
    for j in (0..have.len()).filter(|&j| !have[j]) {
        let mut best: Option<(T, CMatrix<T>)> = None;
        for candidate in 0..rows {
            let mut w = CMatrix::<T>::zeros(rows, 1);
            w[(candidate, 0)] = cr(1.0);
            for _ in 0..2 {
                for &k in &filled {
                    let coeff = x.column(k).dotc(&w.column(0));
                    let col = x.column(k).into_owned();
                    w.column_mut(0).axpy(-coeff, &col, real(T::one()));
                }
            }
            let norm = w.norm();
            if best.as_ref().is_none_or(|(b, _)| norm > *b) {
                best = Some((norm, w));
            }
        }
        let (norm, w) = best.expect("at least one row");
        x.set_column(j, &(w.column(0) / real(norm)));
        filled.push(j);
    }
}

pub(crate) fn svd<T: Real>(m: &CMatrix<T>) -> Decomposition<T> {
    if m.nrows() >= m.ncols() {
        tall_svd(m)
    } else {
        let d = tall_svd(&m.adjoint());
        Decomposition {
            u: d.v,
            s: d.s,
            v: d.u,
        }
    }
}

/// Cyclic Jacobi eigen-decomposition of a Hermitian matrix (unsorted).
pub(crate) fn hermitian_eigen<T: Real>(m: &CMatrix<T>) -> (Vec<T>, CMatrix<T>) {
    let n = m.nrows();
    let mut h = m.clone();
    let mut v = CMatrix::<T>::identity(n, n);
    let eps = T::default_epsilon();
    for _ in 0..MAX_SWEEPS {
        let total = h.norm();
        let off: T = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .fold(T::zero(), |acc, (i, j)| acc + h[(i, j)].norm_sqr());
        if off.sqrt() <= eps * total || total == T::zero() {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let hpq = h[(p, q)];
                let g = modulus(hpq);
                if g == T::zero() {
                    continue;
                }
                let e_bar = (hpq / real(g)).conj();
                let (cs, sn) = rotation(h[(p, p)].re, h[(q, q)].re, g);
                // H ← Gᴴ H G with G = diag(1, ē)·[[c, s], [−s, c]] on (p, q)
                rotate_columns(&mut h, p, q, cs, sn, e_bar);
                let e = e_bar.conj();
                for col in 0..n {
                    let (hp, hq) = (h[(p, col)], h[(q, col)] * e);
                    h[(p, col)] = hp * real(cs) - hq * real(sn);
                    h[(q, col)] = hp * real(sn) + hq * real(cs);
                }
                h[(p, q)] = cr(0.0);
                h[(q, p)] = cr(0.0);
                rotate_columns(&mut v, p, q, cs, sn, e_bar);
            }
        }
    }
    ((0..n).map(|i| h[(i, i)].re).collect(), v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{gaussian_matrix, random_low_rank, trial_rng};

    fn reconstruct(d: &Decomposition<f64>) -> CMatrix<f64> {
        let k = d.s.len();
        let sigma = CMatrix::from_fn(k, k, |i, j| if i == j { real(d.s[i]) } else { cr(0.0) });
        &d.u * sigma * d.v.adjoint()
    }

    #[test]
    fn svd_of_rank_deficient_matrices() {
        let mut rng = trial_rng(3, 0);
        for (rows, cols, rank) in [(10, 5, 3), (5, 10, 2), (8, 8, 0), (12, 6, 6), (3, 7, 3)] {
            let m = random_low_rank::<f64, _>(&mut rng, rows, cols, rank);
            let d = svd(&m);
            assert!((reconstruct(&d) - &m).norm() < 1e-12 * (1.0 + m.norm()));
            let k = rows.min(cols);
            assert!((d.u.adjoint() * &d.u - CMatrix::identity(k, k)).norm() < 1e-12);
            assert!((d.v.adjoint() * &d.v - CMatrix::identity(k, k)).norm() < 1e-12);
            let nonzero = d.s.iter().filter(|&&s| s > 1e-10).count();
            assert_eq!(nonzero, rank);
        }
    }

    #[test]
    fn eigen_reconstructs() {
        let mut rng = trial_rng(4, 0);
        let g = gaussian_matrix::<f64, _>(&mut rng, 7, 7);
        let h = &g + g.adjoint();
        let (vals, vecs) = hermitian_eigen(&h);
        let d = CMatrix::from_fn(7, 7, |i, j| if i == j { real(vals[i]) } else { cr(0.0) });
        assert!((&vecs * d * vecs.adjoint() - &h).norm() < 1e-12 * h.norm());
        assert!((vecs.adjoint() * &vecs - CMatrix::identity(7, 7)).norm() < 1e-12);
    }
}

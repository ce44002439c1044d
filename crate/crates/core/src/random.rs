//! Random instances for the verification suites and property tests.
//!
//! Everything is driven by an explicit `Rng`; [`trial_rng`] derives an
//! independent reproducible stream per trial from a master seed.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use rand_distr::StandardNormal;

use crate::extension::{NestedPair, OperatorPair};
use crate::grassmann::Subspace;
use crate::numeric::Tolerance;
use crate::scalar::{c, CMatrix, Real};
use crate::symplectic::SymplecticSpace;

/// The generator for trial `trial` of a run seeded with `master`.
pub fn trial_rng(master: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(trial);
    rng
}

/// Matrix with i.i.d. standard complex Gaussian entries.
pub fn gaussian_matrix<T: Real, R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix<T> {
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    CMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        c(T::lit(re * scale), T::lit(im * scale))
    })
}

/// Haar-distributed unitary (QR of a Gaussian matrix with the phases of
/// `diag(R)` divided out).
pub fn random_unitary<T: Real, R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix<T> {
    if n == 0 {
        return CMatrix::zeros(0, 0);
    }
    let qr = gaussian_matrix::<T, R>(rng, n, n).qr();
    let (mut q, r) = qr.unpack();
    for j in 0..n {
        let d = r[(j, j)];
        let norm = crate::scalar::modulus(d);
        if norm > T::zero() {
            let phase = d / c(norm, T::zero());
            let mut col = q.column_mut(j);
            col *= phase;
        }
    }
    q
}

/// Uniformly distributed `k`-dimensional subspace of `Cⁿ`.
pub fn random_subspace<T: Real, R: Rng + ?Sized>(rng: &mut R, n: usize, k: usize) -> Subspace<T> {
    let u = random_unitary::<T, R>(rng, n);
    Subspace::from_orthonormal(u.columns(0, k).into_owned())
}

/// Random `k`-dimensional subspace of `host`.
pub fn random_subspace_of<T: Real, R: Rng + ?Sized>(rng: &mut R, host: &Subspace<T>, k: usize) -> Subspace<T> {
    random_subspace::<T, R>(rng, host.dim(), k).embed_into(host)
}

/// Random subspace of `host` of uniformly chosen dimension.
pub fn random_subspace_in<T: Real, R: Rng + ?Sized>(rng: &mut R, host: &Subspace<T>) -> Subspace<T> {
    let k = rng.random_range(0..=host.dim());
    random_subspace_of(rng, host, k)
}

pub fn random_hermitian<T: Real, R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix<T> {
    let g = gaussian_matrix::<T, R>(rng, n, n);
    (&g + g.adjoint()) * c(T::lit(0.5), T::zero())
}

/// `B·C` with `B` of size `rows × rank` and `C` of size `rank × cols`.
pub fn random_low_rank<T: Real, R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize, rank: usize) -> CMatrix<T> {
    gaussian_matrix::<T, R>(rng, rows, rank) * gaussian_matrix::<T, R>(rng, rank, cols)
}

/// Random extension pair on `Cⁿ`: an action of random rank and random
/// nested domains.
pub fn random_operator_pair<T: Real, R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    tol: &Tolerance<T>,
) -> OperatorPair<T> {
    let rank = rng.random_range(0..=n);
    let action = random_low_rank::<T, R>(rng, n, n, rank);
    let dom_max = random_subspace_in(rng, &Subspace::full(n));
    let dom_min = random_subspace_in(rng, &dom_max);
    OperatorPair::new(action, dom_max, dom_min, tol).expect("nested by construction")
}

/// Random `Γ ⊆ Γ′ ⊆ Cⁿ`.
pub fn random_nested<T: Real, R: Rng + ?Sized>(rng: &mut R, n: usize, tol: &Tolerance<T>) -> NestedPair<T> {
    let gamma_max = random_subspace_in(rng, &Subspace::full(n));
    let gamma_min = random_subspace_in(rng, &gamma_max);
    NestedPair::new(gamma_min, gamma_max, tol).expect("nested by construction")
}

/// A random subspace transversal to `(Γ, Γ′)`: generic, of a dimension
/// between `codim Γ′` and `codim Γ`.
pub fn random_transversal<T: Real, R: Rng + ?Sized>(rng: &mut R, p: &NestedPair<T>) -> Subspace<T> {
    let n = p.ambient_dim();
    let lo = n - p.gamma_max().dim();
    let hi = n - p.gamma_min().dim();
    let d = rng.random_range(lo..=hi);
    random_subspace::<T, R>(rng, n, d)
}

/// A subspace `M` with planted `K = M ∩ Γ` of dimension `k` and
/// `K′ = Ĥ ⊖ (M + Γ′)` of dimension `k_prime`; generic otherwise.
///
/// Requires `k ≤ dim Γ` and `k_prime ≤ codim Γ′`.
pub fn random_with_defect<T: Real, R: Rng + ?Sized>(
    rng: &mut R,
    p: &NestedPair<T>,
    k: usize,
    k_prime: usize,
) -> Subspace<T> {
    let n = p.ambient_dim();
    let (g, g_max) = (p.gamma_min().dim(), p.gamma_max().dim());
    assert!(k <= g && k_prime <= n - g_max, "defect dimensions out of range");
    let kk = random_subspace_of(rng, p.gamma_min(), k);
    let kp = random_subspace_of(rng, p.f_comp(), k_prime);
    let w = crate::grassmann::sum(&kk, &kp, p.tolerance()).complement();
    // inside W the remaining part of M is generic and transversal
    let lo = n - k_prime - g_max;
    let hi = n - k_prime - g;
    let d0 = rng.random_range(lo..=hi);
    let m0 = random_subspace_of(rng, &w, d0);
    crate::grassmann::sum(&kk, &m0, p.tolerance())
}

/// Random Lagrangian subspace (graph of a Haar unitary `Λ⁺ → Λ⁻`).
pub fn random_lagrangian<T: Real, R: Rng + ?Sized>(rng: &mut R, sp: &SymplecticSpace<T>) -> Subspace<T> {
    let u = random_unitary::<T, R>(rng, sp.plus_basis().ncols());
    sp.lagrangian_from_unitary(&u).expect("Haar unitary")
}

/// Random `k`-dimensional isotropic subspace (inside a random Lagrangian).
pub fn random_isotropic<T: Real, R: Rng + ?Sized>(rng: &mut R, sp: &SymplecticSpace<T>, k: usize) -> Subspace<T> {
    let l = random_lagrangian(rng, sp);
    random_subspace_of(rng, &l, k)
}

//! Linear coordinates on the subspaces transversal to `(Γ, Γ′)` with a
//! fixed push-forward `N`, and the canonical straight-line paths to the
//! zero element `N ⊕ F`.
//!
//! A subspace `M` transversal to `(Γ, Γ′)` with `γ_!M = N` is the graph of a
//! unique map `μ: N ⊕ F → E ⊕ Γ` (with `E = β ⊖ N`, `F = Ĥ ⊖ Γ′`) whose
//! `N → E` block vanishes. In the Lagrangian case `E = JN`, `F = JΓ`, and
//! `ψ = μJ` is Hermitian on `JN ⊕ Γ`.

use crate::error::{Error, Result};
use crate::extension::NestedPair;
use crate::grassmann::Subspace;
use crate::numeric::{hermitian_defect, smallest_singular_value, spectral_norm, Tolerance};
use crate::scalar::{c, cr, CMatrix, Real};
use crate::symplectic::{boundary_form, SymplecticSpace};

/// `M` written as the graph of `μ: N ⊕ F → E ⊕ Γ`, all four spaces given
/// by orthonormal bases in `Ĥ`.
#[derive(Debug, Clone)]
pub struct TransversalCoordinates<T: Real> {
    nested: NestedPair<T>,
    n_target: Subspace<T>,
    /// `[N | F]`
    domain: CMatrix<T>,
    /// `[E | Γ]`
    codomain: CMatrix<T>,
    n_dim: usize,
    e_dim: usize,
    mu: CMatrix<T>,
}

impl<T: Real> TransversalCoordinates<T> {
    pub fn nested(&self) -> &NestedPair<T> {
        &self.nested
    }

    /// `N = γ_!M`
    pub fn n_target(&self) -> &Subspace<T> {
        &self.n_target
    }

    pub fn mu(&self) -> &CMatrix<T> {
        &self.mu
    }

    /// `‖P_E μ|_N‖`, zero up to round-off.
    pub fn zero_block_residual(&self) -> T {
        spectral_norm(&self.mu.view((0, 0), (self.e_dim, self.n_dim)).into_owned())
    }

    /// Graph of `s·μ`.
    pub fn graph_scaled(&self, s: T) -> Subspace<T> {
        graph_in(&self.domain, &self.codomain, &self.mu, s)
    }

    /// `N ⊕ F`, the zero element.
    pub fn zero_element(&self) -> Subspace<T> {
        Subspace::from_orthonormal(self.domain.clone())
    }
}

fn graph_in<T: Real>(domain: &CMatrix<T>, codomain: &CMatrix<T>, mu: &CMatrix<T>, s: T) -> Subspace<T> {
    let m = domain + codomain * (mu * c(s, T::zero()));
    // the graph map is injective with σ_min ≥ 1
    Subspace::span_with_dim(&m, domain.ncols())
}

fn concat<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> CMatrix<T> {
    let mut m = CMatrix::zeros(a.nrows(), a.ncols() + b.ncols());
    m.columns_mut(0, a.ncols()).copy_from(a);
    m.columns_mut(a.ncols(), b.ncols()).copy_from(b);
    m
}

/// Solves `M = graph(μ)` against the orthogonal split `(domain, codomain)`.
fn solve_graph<T: Real>(
    m: &Subspace<T>,
    domain: &CMatrix<T>,
    codomain: &CMatrix<T>,
    tol: &Tolerance<T>,
) -> Result<CMatrix<T>> {
    if m.dim() != domain.ncols() {
        return Err(Error::NotTransversal);
    }
    let x = domain.adjoint() * m.basis();
    let y = codomain.adjoint() * m.basis();
    let sigma_min = smallest_singular_value(&x);
    if m.dim() > 0 && sigma_min <= tol.rank_threshold(x.nrows(), x.ncols(), T::one()) {
        return Err(Error::NotTransversal);
    }
    let x_inv = x.try_inverse().ok_or(Error::NotTransversal)?;
    Ok(y * x_inv)
}

fn coordinates_with<T: Real>(
    p: &NestedPair<T>,
    m: &Subspace<T>,
    n_target: Subspace<T>,
    e_basis: CMatrix<T>,
    f_basis: CMatrix<T>,
) -> Result<TransversalCoordinates<T>> {
    let domain = concat(n_target.basis(), &f_basis);
    let codomain = concat(&e_basis, p.gamma_min().basis());
    let mu = solve_graph(m, &domain, &codomain, p.tolerance())?;
    Ok(TransversalCoordinates {
        nested: p.clone(),
        n_dim: n_target.dim(),
        e_dim: e_basis.ncols(),
        n_target,
        domain,
        codomain,
        mu,
    })
}

/// Coordinates of a subspace `m` transversal to `(Γ, Γ′)`.
pub fn tn_coordinates<T: Real>(p: &NestedPair<T>, m: &Subspace<T>) -> Result<TransversalCoordinates<T>> {
    if m.ambient_dim() != p.ambient_dim() {
        return Err(Error::DimensionMismatch(format!(
            "subspace lives in C^{}, nested pair in C^{}",
            m.ambient_dim(),
            p.ambient_dim()
        )));
    }
    if !p.classify(m).transversal {
        return Err(Error::NotTransversal);
    }
    let n = p.push_forward(m);
    let n_coords = p.to_beta_coords(&n)?;
    let e = p.from_beta_coords(&n_coords.complement());
    let f = p.f_comp().basis().clone();
    coordinates_with(p, m, n, e.basis().clone(), f)
}

/// The point at time `t` of the straight path from `M` (`t = 0`) to
/// `N ⊕ F` (`t = 1`): the graph of `(1 − t)μ`.
pub fn tn_path<T: Real>(c: &TransversalCoordinates<T>, t: T) -> Subspace<T> {
    c.graph_scaled(T::one() - t)
}

/// Coordinates of a Lagrangian `M` transversal to `(Γ, Γ^ω)`, with
/// `ψ = μJ` on `JN ⊕ Γ`.
#[derive(Debug, Clone)]
pub struct LagrangianCoordinates<T: Real> {
    coords: TransversalCoordinates<T>,
    psi: CMatrix<T>,
}

impl<T: Real> LagrangianCoordinates<T> {
    pub fn coords(&self) -> &TransversalCoordinates<T> {
        &self.coords
    }

    pub fn psi(&self) -> &CMatrix<T> {
        &self.psi
    }

    /// `‖ψ − ψᴴ‖`
    pub fn hermitian_residual(&self) -> T {
        hermitian_defect(&self.psi)
    }

    /// The `JN → JN` block of `ψ`.
    pub fn corner(&self) -> CMatrix<T> {
        let k = self.coords.e_dim;
        self.psi.view((0, 0), (k, k)).into_owned()
    }
}

/// `diag(−1_k, 1_rest)`
fn sign_split<T: Real>(k: usize, total: usize) -> CMatrix<T> {
    CMatrix::from_fn(total, total, |i, j| match (i == j, i < k) {
        (true, true) => cr(-1.0),
        (true, false) => cr(1.0),
        _ => cr(0.0),
    })
}

/// S_N coordinates. With `E = JN` and `F = JΓ` spanned by the images under
/// `J` of the bases of `N` and `Γ`, `J: E ⊕ Γ → N ⊕ F` is `diag(−1, 1)` and
/// `J: N ⊕ F → E ⊕ Γ` is `diag(1, −1)`, so `ψ = μ·diag(−1, 1)`.
pub fn sn_coordinates<T: Real>(
    sp: &SymplecticSpace<T>,
    p: &NestedPair<T>,
    m: &Subspace<T>,
) -> Result<LagrangianCoordinates<T>> {
    // validates isotropy of Γ and Γ′ = Γ^ω
    boundary_form(sp, p)?;
    if !sp.is_lagrangian(m) {
        return Err(Error::NotLagrangian);
    }
    if !p.classify(m).transversal {
        return Err(Error::NotTransversal);
    }
    let n = p.push_forward(m);
    let e = sp.j() * n.basis();
    let f = sp.j() * p.gamma_min().basis();
    let coords = coordinates_with(p, m, n, e, f)?;
    let total = coords.mu.ncols();
    let psi = &coords.mu * sign_split::<T>(coords.n_dim, total);
    Ok(LagrangianCoordinates { coords, psi })
}

/// Graph of `μ_t = −((1 − t)ψ)J`.
pub fn sn_path<T: Real>(c: &LagrangianCoordinates<T>, t: T) -> Subspace<T> {
    // μ = −ψ·diag(1, −1) = ψ·diag(−1, 1)
    let mu = &c.psi * sign_split::<T>(c.coords.n_dim, c.psi.ncols());
    graph_in(&c.coords.domain, &c.coords.codomain, &mu, T::one() - t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grassmann::gap_distance;
    use crate::symplectic::isotropic_nested;

    type S = Subspace<f64>;

    fn tol() -> Tolerance<f64> {
        Tolerance::default()
    }

    #[test]
    fn zero_element_has_zero_mu() {
        let t = tol();
        let p = NestedPair::new(S::coordinate(5, &[0]), S::coordinate(5, &[0, 1, 2]), &t).unwrap();
        let n = S::coordinate(5, &[1]);
        let m = crate::grassmann::sum(&n, p.f_comp(), &t);
        let c = tn_coordinates(&p, &m).unwrap();
        assert!(c.mu().norm() < 1e-12);
        assert!(matches!(tn_coordinates(&p, p.gamma_min()), Err(Error::NotTransversal)));
    }

    #[test]
    fn path_endpoints() {
        let t = tol();
        let p = NestedPair::new(S::coordinate(4, &[0]), S::coordinate(4, &[0, 1, 2]), &t).unwrap();
        // graph over span{e2, e4} tilted into e1 and e3
        let m = CMatrix::from_fn(4, 2, |i, j| {
            cr(match (i, j) {
                (1, 0) | (3, 1) => 1.0,
                (0, 0) => 0.5,
                (2, 0) => -0.3,
                (0, 1) => 0.7,
                (2, 1) => 0.2,
                _ => 0.0,
            })
        });
        let m = S::span(&m, &t).unwrap();
        let c = tn_coordinates(&p, &m).unwrap();
        assert!(c.zero_block_residual() < 1e-12);
        assert!(gap_distance(&tn_path(&c, 0.0), &m) < 1e-12);
        assert!(gap_distance(&tn_path(&c, 1.0), &c.zero_element()) < 1e-12);
        let mid = tn_path(&c, 0.5);
        assert!(p.classify(&mid).transversal);
        assert!(gap_distance(&p.push_forward(&mid), c.n_target()) < 1e-8);
    }

    #[test]
    fn lagrangian_zero_element() {
        let t = tol();
        let sp = SymplecticSpace::<f64>::standard(2, &t);
        // Γ = span{e1} ⊂ H ⊕ 0, Γ^ω = span{e1, e2, e4}
        let gamma = S::coordinate(4, &[0]);
        let p = isotropic_nested(&sp, &gamma).unwrap();
        let n = S::coordinate(4, &[1]);
        let jgamma = S::coordinate(4, &[2]);
        let m = crate::grassmann::sum(&n, &jgamma, &t);
        let c = sn_coordinates(&sp, &p, &m).unwrap();
        assert!(c.psi().norm() < 1e-12);
        let not_transversal = S::coordinate(4, &[0, 1]);
        assert!(matches!(sn_coordinates(&sp, &p, &not_transversal), Err(Error::NotTransversal)));
    }
}

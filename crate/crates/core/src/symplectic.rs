//! Symplectic spaces `(Λ, J)` with `ω(ξ, η) = ⟨Jξ, η⟩`, annihilators,
//! Lagrangian subspaces and their unitaries, Cayley transforms and the
//! self-adjoint realizations of a symmetric restriction.
//!
//! Unitaries of Lagrangian subspaces are reported in fixed orthonormal
//! bases of the two eigenspaces of `J`. `Λ⁺` is the eigenspace that, in the
//! standard space `H ⊕ H`, consists of the vectors `ξ ⊕ iξ`; with
//! `J = [[0, −1], [1, 0]]` that is `ker(J + i)`.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::extension::{graph_of, NestedPair, OperatorPair};
use crate::grassmann::{intersect, Subspace};
use crate::numeric::{
    check_finite, hermitian_defect, null_space, smallest_singular_value, spectral_norm, unitary_defect,
    Tolerance,
};
use crate::scalar::{ci, cr, CMatrix, Real};

/// A finite-dimensional space with a skew-adjoint unitary `J`.
#[derive(Debug, Clone)]
pub struct SymplecticSpace<T: Real> {
    j: CMatrix<T>,
    plus: CMatrix<T>,
    minus: CMatrix<T>,
    /// `Some(n)` for the standard space `Cⁿ ⊕ Cⁿ`.
    standard: Option<usize>,
    tol: Tolerance<T>,
}

impl<T: Real> SymplecticSpace<T> {
    pub fn new(j: CMatrix<T>, tol: &Tolerance<T>) -> Result<Self> {
        check_finite(&j)?;
        if j.nrows() != j.ncols() {
            return Err(Error::DimensionMismatch(format!(
                "J must be square, got {}×{}",
                j.nrows(),
                j.ncols()
            )));
        }
        let skew = spectral_norm(&(&j + j.adjoint()));
        if skew > tol.gap_abs() || unitary_defect(&j) > tol.gap_abs() {
            return Err(Error::NotSymplectic);
        }
        let n = j.nrows();
        let id = CMatrix::<T>::identity(n, n);
        let half = cr::<T>(0.5);
        // projectors onto ker(J + i) and ker(J − i)
        let p_plus = (&id + &j * ci::<T>()) * half;
        let p_minus = (&id - &j * ci::<T>()) * half;
        let plus = pivoted_basis(&p_plus);
        let minus = pivoted_basis(&p_minus);
        if plus.ncols() + minus.ncols() != n {
            return Err(Error::NotSymplectic);
        }
        Ok(Self {
            j,
            plus,
            minus,
            standard: None,
            tol: *tol,
        })
    }

    /// `H ⊕ H` with `H = Cⁿ` and `J = [[0, −1], [1, 0]]`.
    pub fn standard(n: usize, tol: &Tolerance<T>) -> Self {
        let mut j = CMatrix::zeros(2 * n, 2 * n);
        for k in 0..n {
            j[(k, n + k)] = cr(-1.0);
            j[(n + k, k)] = cr(1.0);
        }
        let mut sp = Self::new(j, tol).expect("standard J is a skew-adjoint unitary");
        sp.standard = Some(n);
        sp
    }

    pub fn ambient_dim(&self) -> usize {
        self.j.nrows()
    }

    pub fn j(&self) -> &CMatrix<T> {
        &self.j
    }

    /// Orthonormal basis of `Λ⁺`, one vector per column.
    pub fn plus_basis(&self) -> &CMatrix<T> {
        &self.plus
    }

    /// Orthonormal basis of `Λ⁻`.
    pub fn minus_basis(&self) -> &CMatrix<T> {
        &self.minus
    }

    pub fn lambda_plus(&self) -> Subspace<T> {
        Subspace::from_orthonormal(self.plus.clone())
    }

    pub fn lambda_minus(&self) -> Subspace<T> {
        Subspace::from_orthonormal(self.minus.clone())
    }

    /// `n` if this is the standard space `Cⁿ ⊕ Cⁿ`.
    pub fn standard_dim(&self) -> Option<usize> {
        self.standard
    }

    pub fn tolerance(&self) -> &Tolerance<T> {
        &self.tol
    }

    /// Whether Lagrangian subspaces exist, i.e. `dim Λ⁺ = dim Λ⁻`.
    pub fn admits_lagrangians(&self) -> bool {
        self.plus.ncols() == self.minus.ncols()
    }

    fn check_ambient(&self, l: &Subspace<T>) -> Result<()> {
        if l.ambient_dim() != self.ambient_dim() {
            return Err(Error::DimensionMismatch(format!(
                "subspace lives in C^{}, symplectic space has dimension {}",
                l.ambient_dim(),
                self.ambient_dim()
            )));
        }
        Ok(())
    }

    /// `ω(ξ, η) = ⟨Jξ, η⟩`, conjugate-linear in `ξ`.
    pub fn omega(&self, xi: &CMatrix<T>, eta: &CMatrix<T>) -> Complex<T> {
        (&self.j * xi).dotc(eta)
    }

    /// `L* = J·L⊥`.
    pub fn annihilator(&self, l: &Subspace<T>) -> Subspace<T> {
        Subspace::from_orthonormal(&self.j * l.complement().basis())
    }

    pub fn is_isotropic(&self, l: &Subspace<T>) -> bool {
        l.ambient_dim() == self.ambient_dim() && self.annihilator(l).contains(l, &self.tol)
    }

    pub fn is_lagrangian(&self, l: &Subspace<T>) -> bool {
        2 * l.dim() == self.ambient_dim() && self.is_isotropic(l)
    }

    /// The unitary `u: Λ⁺ → Λ⁻` whose graph is `l`.
    pub fn lagrangian_unitary(&self, l: &Subspace<T>) -> Result<LagrangianFrame<T>> {
        self.check_ambient(l)?;
        if !self.is_lagrangian(l) {
            return Err(Error::NotLagrangian);
        }
        let x = self.plus.adjoint() * l.basis();
        let y = self.minus.adjoint() * l.basis();
        // l ∩ Λ⁻ = 0, so x is invertible with σ_min = 1/√2
        let sigma_min = smallest_singular_value(&x);
        let x_inv = x.try_inverse().filter(|_| sigma_min > self.tol.gap_abs()).ok_or(Error::SingularMap {
            sigma_min: sigma_min.to_f64_lossy(),
        })?;
        Ok(LagrangianFrame {
            subspace: l.clone(),
            unitary: y * x_inv,
        })
    }

    /// The Lagrangian subspace `{ξ + uξ : ξ ∈ Λ⁺}`.
    pub fn lagrangian_from_unitary(&self, u: &CMatrix<T>) -> Result<Subspace<T>> {
        let k = self.plus.ncols();
        if !self.admits_lagrangians() || u.nrows() != k || u.ncols() != k {
            return Err(Error::DimensionMismatch(format!(
                "unitary is {}×{}, Λ± have dimensions {} and {}",
                u.nrows(),
                u.ncols(),
                k,
                self.minus.ncols()
            )));
        }
        let defect = unitary_defect(u);
        if defect > self.tol.gap_abs() {
            return Err(Error::NotUnitary {
                residual: defect.to_f64_lossy(),
            });
        }
        let m = (&self.plus + &self.minus * u) * cr::<T>(std::f64::consts::FRAC_1_SQRT_2);
        Ok(Subspace::span_with_dim(&m, k))
    }

    /// `κ(L; M) = u_M⁻¹ u_L`, a unitary on `Λ⁺`.
    pub fn kappa_rel(&self, l: &Subspace<T>, m: &Subspace<T>) -> Result<CMatrix<T>> {
        let ul = self.lagrangian_unitary(l)?.unitary;
        let um = self.lagrangian_unitary(m)?.unitary;
        Ok(um.adjoint() * ul)
    }

    /// Multiplicity of the eigenvalue `1` of `κ(L; M)`, i.e. the number of
    /// zero singular values of `1 − κ(L; M)`.
    pub fn kappa_kernel_dim(&self, l: &Subspace<T>, m: &Subspace<T>) -> Result<usize> {
        let kappa = self.kappa_rel(l, m)?;
        let k = kappa.nrows();
        let (null, _) = null_space(&(CMatrix::<T>::identity(k, k) - kappa), T::one(), &self.tol);
        Ok(null.ncols())
    }

    /// Whether `(l, m)` is transversal, decided on `1 − κ(L; M)`.
    pub fn lagrangian_transversal(&self, l: &Subspace<T>, m: &Subspace<T>) -> Result<bool> {
        Ok(self.kappa_kernel_dim(l, m)? == 0)
    }

    /// Extended Cayley transform `κ(L) = −ū_L` of a Lagrangian subspace of the
    /// standard space, where `ū_L` is `u_L` under `ξ ⊕ (±iξ) ↦ √2·ξ`.
    pub fn kappa(&self, l: &Subspace<T>) -> Result<CMatrix<T>> {
        if self.standard.is_none() {
            return Err(Error::InvalidInput(
                "the Cayley transform of a subspace needs the standard space H ⊕ H".into(),
            ));
        }
        Ok(-self.lagrangian_unitary(l)?.unitary)
    }
}

/// Columns of an orthogonal projector selected by pivoted Gram–Schmidt, with
/// ties broken by column order so that coordinate-aligned eigenspaces get
/// coordinate-aligned bases.
fn pivoted_basis<T: Real>(p: &CMatrix<T>) -> CMatrix<T> {
    let n = p.nrows();
    let rank = (0..n).map(|i| p[(i, i)].re).fold(T::zero(), |a, b| a + b);
    let rank = rank.to_f64_lossy().round().max(0.0) as usize;
    let mut residual = p.clone();
    let mut basis = CMatrix::zeros(n, rank);
    let tie = T::lit(1.0 - 1e-9);
    for k in 0..rank {
        let norms: Vec<T> = (0..n).map(|j| residual.column(j).norm()).collect();
        let best = norms.iter().copied().fold(T::zero(), |a, b| a.max(b));
        let pick = norms.iter().position(|&x| x >= best * tie).unwrap_or(0);
        let v = residual.column(pick) / Complex::new(norms[pick], T::zero());
        basis.set_column(k, &v);
        let coeffs = v.adjoint() * &residual;
        residual -= &v * coeffs;
    }
    basis
}

/// A Lagrangian subspace together with its unitary `u: Λ⁺ → Λ⁻`.
#[derive(Debug, Clone)]
pub struct LagrangianFrame<T: Real> {
    pub subspace: Subspace<T>,
    pub unitary: CMatrix<T>,
}

pub fn standard_symplectic<T: Real>(n: usize, tol: &Tolerance<T>) -> SymplecticSpace<T> {
    SymplecticSpace::standard(n, tol)
}

pub fn omega<T: Real>(sp: &SymplecticSpace<T>, xi: &CMatrix<T>, eta: &CMatrix<T>) -> Complex<T> {
    sp.omega(xi, eta)
}

pub fn annihilator<T: Real>(sp: &SymplecticSpace<T>, l: &Subspace<T>) -> Subspace<T> {
    sp.annihilator(l)
}

pub fn is_isotropic<T: Real>(sp: &SymplecticSpace<T>, l: &Subspace<T>) -> bool {
    sp.is_isotropic(l)
}

pub fn is_lagrangian<T: Real>(sp: &SymplecticSpace<T>, l: &Subspace<T>) -> bool {
    sp.is_lagrangian(l)
}

pub fn lagrangian_unitary<T: Real>(sp: &SymplecticSpace<T>, l: &Subspace<T>) -> Result<LagrangianFrame<T>> {
    sp.lagrangian_unitary(l)
}

pub fn kappa<T: Real>(sp: &SymplecticSpace<T>, l: &Subspace<T>) -> Result<CMatrix<T>> {
    sp.kappa(l)
}

pub fn kappa_rel<T: Real>(sp: &SymplecticSpace<T>, l: &Subspace<T>, m: &Subspace<T>) -> Result<CMatrix<T>> {
    sp.kappa_rel(l, m)
}

/// Cayley transform `(A − i)(A + i)⁻¹` of a Hermitian matrix.
pub fn cayley<T: Real>(a: &CMatrix<T>, tol: &Tolerance<T>) -> Result<CMatrix<T>> {
    check_finite(a)?;
    let defect = hermitian_defect(a);
    if a.nrows() != a.ncols() || defect > tol.gap_abs() {
        return Err(Error::NotHermitian {
            residual: defect.to_f64_lossy(),
        });
    }
    let n = a.nrows();
    let shift = CMatrix::<T>::identity(n, n) * ci::<T>();
    let inv = (a + &shift).try_inverse().expect("A + i is invertible for Hermitian A");
    Ok((a - shift) * inv)
}

/// The nested pair `Γ ⊂ Γ^ω` of an isotropic subspace.
pub fn isotropic_nested<T: Real>(sp: &SymplecticSpace<T>, gamma: &Subspace<T>) -> Result<NestedPair<T>> {
    sp.check_ambient(gamma)?;
    if !sp.is_isotropic(gamma) {
        return Err(Error::NotIsotropic);
    }
    NestedPair::new(gamma.clone(), sp.annihilator(gamma), &sp.tol)
}

/// The symplectic structure induced on `β = Γ^ω ⊖ Γ`, in the coordinates
/// of the fixed basis of `β` (see [`NestedPair::to_beta_coords`]).
pub fn boundary_form<T: Real>(sp: &SymplecticSpace<T>, p: &NestedPair<T>) -> Result<SymplecticSpace<T>> {
    sp.check_ambient(p.gamma_min())?;
    if !sp.is_isotropic(p.gamma_min()) {
        return Err(Error::NotIsotropic);
    }
    if !sp.annihilator(p.gamma_min()).approx_eq(p.gamma_max(), &sp.tol) {
        return Err(Error::NotAnnihilator);
    }
    let b = p.beta().basis();
    let j_beta = b.adjoint() * &sp.j * b;
    SymplecticSpace::new(j_beta, &sp.tol)
}

/// A self-adjoint realization of a symmetric restriction.
#[derive(Debug, Clone)]
pub struct SelfAdjointRealization<T: Real> {
    /// `γ⁻¹L ⊂ H ⊕ H`, always Lagrangian.
    pub graph: Subspace<T>,
    /// The Hermitian matrix whose graph is `graph`, or `None` when the
    /// realization is a linear relation (`graph ∩ (0 ⊕ H) ≠ 0`).
    pub operator: Option<CMatrix<T>>,
}

impl<T: Real> SelfAdjointRealization<T> {
    pub fn is_operator_graph(&self) -> bool {
        self.operator.is_some()
    }
}

/// The realization of `A = op.action|dom_min` with boundary condition `l`,
/// taken between `Γ_A` and its annihilator `Γ_A^ω` in the standard space.
/// `l` is a Lagrangian subspace of `β`, given in the ambient coordinates of
/// `H ⊕ H`.
pub fn self_adjoint_realization<T: Real>(
    op: &OperatorPair<T>,
    l: &Subspace<T>,
    tol: &Tolerance<T>,
) -> Result<SelfAdjointRealization<T>> {
    let n = op.space_dim();
    let sp = SymplecticSpace::standard(n, tol);
    let gamma = graph_of(op.action(), op.dom_min());
    let nested = isotropic_nested(&sp, &gamma)?;
    let sp_beta = boundary_form(&sp, &nested)?;
    if !sp_beta.is_lagrangian(&nested.to_beta_coords(l)?) {
        return Err(Error::NotLagrangian);
    }
    let graph = nested.pull_back(l)?;
    let vertical = crate::extension::vertical::<T>(n);
    let operator = if intersect(&graph, &vertical, tol).dim() == 0 {
        let x = graph.basis().rows(0, n).into_owned();
        let y = graph.basis().rows(n, n).into_owned();
        x.try_inverse().map(|x_inv| y * x_inv)
    } else {
        None
    };
    Ok(SelfAdjointRealization { graph, operator })
}

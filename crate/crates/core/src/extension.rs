//! Nested pairs `Γ ⊂ Γ′`, the boundary space `β = Γ′ ⊖ Γ`, the pull-back and
//! push-forward of subspaces, operator extension pairs and their
//! realizations.
//!
//! The trace map `γ: Γ′ → β` is the orthogonal projection onto `β`, so
//! `γ⁻¹L = L ⊕ Γ` and `γ_!M = P_β(M ∩ Γ′)`.

use crate::error::{Error, Result};
use crate::grassmann::{intersect, pair_index, sum, PairIndexReport, Subspace};
use crate::numeric::{check_finite, null_space, orthonormalize_scaled, spectral_norm, Tolerance};
use crate::report::{IdentityCheck, IdentityReport};
use crate::scalar::{CMatrix, Real};

/// A pair of subspaces `Γ ⊆ Γ′` of `Ĥ` with the derived spaces
/// `β = Γ′ ⊖ Γ` and `F = Ĥ ⊖ Γ′`.
#[derive(Debug, Clone)]
pub struct NestedPair<T: Real> {
    gamma_min: Subspace<T>,
    gamma_max: Subspace<T>,
    beta: Subspace<T>,
    f_comp: Subspace<T>,
    tol: Tolerance<T>,
}

impl<T: Real> NestedPair<T> {
    pub fn new(gamma_min: Subspace<T>, gamma_max: Subspace<T>, tol: &Tolerance<T>) -> Result<Self> {
        if gamma_min.ambient_dim() != gamma_max.ambient_dim() {
            return Err(Error::DimensionMismatch(format!(
                "Γ lives in C^{}, Γ′ in C^{}",
                gamma_min.ambient_dim(),
                gamma_max.ambient_dim()
            )));
        }
        let residual = gamma_max.containment_residual(&gamma_min);
        if residual > tol.gap_abs() || gamma_min.dim() > gamma_max.dim() {
            return Err(Error::NotNested {
                residual: residual.to_f64_lossy(),
            });
        }
        let inner = gamma_min.coordinates_in(&gamma_max);
        let beta = inner.complement().embed_into(&gamma_max);
        let f_comp = gamma_max.complement();
        Ok(Self {
            gamma_min,
            gamma_max,
            beta,
            f_comp,
            tol: *tol,
        })
    }

    pub fn ambient_dim(&self) -> usize {
        self.gamma_max.ambient_dim()
    }

    /// `Γ`
    pub fn gamma_min(&self) -> &Subspace<T> {
        &self.gamma_min
    }

    /// `Γ′`
    pub fn gamma_max(&self) -> &Subspace<T> {
        &self.gamma_max
    }

    /// `β = Γ′ ⊖ Γ`
    pub fn beta(&self) -> &Subspace<T> {
        &self.beta
    }

    /// `F = Ĥ ⊖ Γ′`
    pub fn f_comp(&self) -> &Subspace<T> {
        &self.f_comp
    }

    pub fn tolerance(&self) -> &Tolerance<T> {
        &self.tol
    }

    fn check_in_beta(&self, l: &Subspace<T>) -> Result<()> {
        let residual = self.beta.containment_residual(l);
        if residual > self.tol.gap_abs() {
            return Err(Error::NotInBeta {
                residual: residual.to_f64_lossy(),
            });
        }
        Ok(())
    }

    /// Coordinates of a subspace of `β` in the fixed orthonormal basis of `β`.
    pub fn to_beta_coords(&self, l: &Subspace<T>) -> Result<Subspace<T>> {
        self.check_in_beta(l)?;
        Ok(l.coordinates_in(&self.beta))
    }

    pub fn from_beta_coords(&self, coords: &Subspace<T>) -> Subspace<T> {
        coords.embed_into(&self.beta)
    }

    /// `γ⁻¹L = L ⊕ Γ`.
    pub fn pull_back(&self, l: &Subspace<T>) -> Result<Subspace<T>> {
        let coords = self.to_beta_coords(l)?;
        let l_in_beta = self.from_beta_coords(&coords);
        let (n, a, b) = (self.ambient_dim(), l_in_beta.dim(), self.gamma_min.dim());
        let mut m = CMatrix::zeros(n, a + b);
        m.columns_mut(0, a).copy_from(l_in_beta.basis());
        m.columns_mut(a, b).copy_from(self.gamma_min.basis());
        Ok(Subspace::from_orthonormal(m))
    }

    /// `γ_!M = γ(M ∩ Γ′)`.
    pub fn push_forward(&self, m: &Subspace<T>) -> Subspace<T> {
        let m_max = intersect(m, &self.gamma_max, &self.tol);
        // γ restricted to M ∩ Γ′ has kernel M ∩ Γ
        let k = m_max.dim() - intersect(&m_max, &self.gamma_min, &self.tol).dim();
        let projected = self.beta.projector() * m_max.basis();
        Subspace::span_with_dim(&projected, k)
    }

    /// Position of `m` relative to `(Γ, Γ′)`.
    pub fn classify(&self, m: &Subspace<T>) -> RelativePosition<T> {
        let k = intersect(m, &self.gamma_min, &self.tol);
        let k_prime = sum(m, &self.gamma_max, &self.tol).complement();
        let sum_with_min_dim = sum(m, &self.gamma_min, &self.tol).dim();
        RelativePosition {
            dim_cap_min: k.dim(),
            def_max: k_prime.dim(),
            transversal: k.dim() == 0 && k_prime.dim() == 0,
            sum_with_min_dim,
            k,
            k_prime,
        }
    }

    /// `ind_β(L, N)` for subspaces of `β`, computed in `β` coordinates.
    pub fn beta_pair_index(&self, l: &Subspace<T>, n: &Subspace<T>) -> Result<PairIndexReport> {
        let lc = self.to_beta_coords(l)?;
        let nc = self.to_beta_coords(n)?;
        Ok(pair_index(&lc, &nc, &self.tol))
    }
}

/// Free-function form of [`NestedPair::new`].
pub fn make_nested<T: Real>(
    gamma_min: Subspace<T>,
    gamma_max: Subspace<T>,
    tol: &Tolerance<T>,
) -> Result<NestedPair<T>> {
    NestedPair::new(gamma_min, gamma_max, tol)
}

pub fn pull_back<T: Real>(p: &NestedPair<T>, l: &Subspace<T>) -> Result<Subspace<T>> {
    p.pull_back(l)
}

pub fn push_forward<T: Real>(p: &NestedPair<T>, m: &Subspace<T>) -> Subspace<T> {
    p.push_forward(m)
}

pub fn classify_relative<T: Real>(p: &NestedPair<T>, m: &Subspace<T>) -> RelativePosition<T> {
    p.classify(m)
}

/// Relative position of a subspace `M` with respect to `(Γ, Γ′)`.
#[derive(Debug, Clone)]
pub struct RelativePosition<T: Real> {
    /// `dim(M ∩ Γ)`
    pub dim_cap_min: usize,
    /// `dim(Ĥ ⊖ (M + Γ′))`
    pub def_max: usize,
    pub transversal: bool,
    /// `dim(M + Γ)`
    pub sum_with_min_dim: usize,
    /// `K = M ∩ Γ`
    pub k: Subspace<T>,
    /// `K′ = Ĥ ⊖ (M + Γ′)`
    pub k_prime: Subspace<T>,
}

/// The defect identity `ind(γ⁻¹L, M) = ind_β(L, γ_!M) + dim K − dim K′`.
pub fn kk_defect<T: Real>(p: &NestedPair<T>, m: &Subspace<T>, l: &Subspace<T>) -> Result<IdentityReport> {
    let lifted = p.pull_back(l)?;
    let big = pair_index(&lifted, m, p.tolerance());
    let n = p.push_forward(m);
    let small = p.beta_pair_index(l, &n)?;
    let pos = p.classify(m);
    let mut report = IdentityReport::new();
    report.push(IdentityCheck::equal(
        "defect_identity",
        big.index,
        small.index + pos.k.dim() as i64 - pos.k_prime.dim() as i64,
    ));
    report.ensure()
}

/// Checks the relations between the pairs `(γ⁻¹L, M)` and `(L, γ_!M)`:
/// `γ_!γ⁻¹L = L`, the two dimension sequences, and (for `M` transversal to
/// `(Γ, Γ′)`) the transfer of transversality.
pub fn relative_pair_report<T: Real>(
    p: &NestedPair<T>,
    m: &Subspace<T>,
    l: &Subspace<T>,
) -> Result<IdentityReport> {
    let tol = p.tolerance();
    let lifted = p.pull_back(l)?;
    let n = p.push_forward(m);
    let pos = p.classify(m);
    let big = pair_index(&lifted, m, tol);
    let small = p.beta_pair_index(l, &n)?;
    let codim_max_sum = p.ambient_dim() - sum(&p.gamma_max, m, tol).dim();

    let mut report = IdentityReport::new();
    let round_trip = crate::grassmann::gap_distance(&p.push_forward(&lifted), l);
    report.push(IdentityCheck::equal("push_pull_dim", p.push_forward(&lifted).dim(), l.dim()));
    report.push(IdentityCheck::at_most(
        "push_pull_gap",
        round_trip.to_f64_lossy(),
        tol.gap_abs().to_f64_lossy(),
    ));
    report.push(IdentityCheck::equal(
        "intersection_sequence",
        big.dim_cap,
        pos.dim_cap_min + small.dim_cap,
    ));
    report.push(IdentityCheck::equal(
        "quotient_sequence",
        big.codim_sum,
        codim_max_sum + small.codim_sum,
    ));
    if pos.transversal {
        report.push(IdentityCheck::equal(
            "transversality_transfer",
            big.transversal,
            small.transversal,
        ));
    }
    Ok(report)
}

/// Extension pair `(A, A′)` in the restriction-of-a-matrix model:
/// `A′ = action|dom_max` and `A = action|dom_min`.
#[derive(Debug, Clone)]
pub struct OperatorPair<T: Real> {
    action: CMatrix<T>,
    dom_max: Subspace<T>,
    dom_min: Subspace<T>,
}

impl<T: Real> OperatorPair<T> {
    pub fn new(
        action: CMatrix<T>,
        dom_max: Subspace<T>,
        dom_min: Subspace<T>,
        tol: &Tolerance<T>,
    ) -> Result<Self> {
        check_finite(&action)?;
        let n = action.nrows();
        if action.ncols() != n || dom_max.ambient_dim() != n || dom_min.ambient_dim() != n {
            return Err(Error::DimensionMismatch(format!(
                "action is {}×{}, domains live in C^{} and C^{}",
                n,
                action.ncols(),
                dom_max.ambient_dim(),
                dom_min.ambient_dim()
            )));
        }
        let residual = dom_max.containment_residual(&dom_min);
        if residual > tol.gap_abs() || dom_min.dim() > dom_max.dim() {
            return Err(Error::NotNested {
                residual: residual.to_f64_lossy(),
            });
        }
        Ok(Self {
            action,
            dom_max,
            dom_min,
        })
    }

    /// `n = dim H`
    pub fn space_dim(&self) -> usize {
        self.action.nrows()
    }

    pub fn action(&self) -> &CMatrix<T> {
        &self.action
    }

    pub fn dom_max(&self) -> &Subspace<T> {
        &self.dom_max
    }

    pub fn dom_min(&self) -> &Subspace<T> {
        &self.dom_min
    }

    /// The graphs `Γ = Γ_A ⊂ Γ′ = Γ_A′` in `Ĥ = H ⊕ H`.
    pub fn graphs(&self, tol: &Tolerance<T>) -> Result<NestedPair<T>> {
        NestedPair::new(
            graph_of(&self.action, &self.dom_min),
            graph_of(&self.action, &self.dom_max),
            tol,
        )
    }

    /// `ker A` and `ran A`.
    pub fn min_kernel_range(&self, tol: &Tolerance<T>) -> (Subspace<T>, Subspace<T>) {
        kernel_and_range(&self.action, &self.dom_min, tol)
    }

    /// `ker A′` and `ran A′`.
    pub fn max_kernel_range(&self, tol: &Tolerance<T>) -> (Subspace<T>, Subspace<T>) {
        kernel_and_range(&self.action, &self.dom_max, tol)
    }
}

pub fn graphs<T: Real>(op: &OperatorPair<T>, tol: &Tolerance<T>) -> Result<NestedPair<T>> {
    op.graphs(tol)
}

/// `{(ξ, aξ) : ξ ∈ domain}` in `Cⁿ ⊕ Cⁿ`.
pub fn graph_of<T: Real>(a: &CMatrix<T>, domain: &Subspace<T>) -> Subspace<T> {
    let n = domain.ambient_dim();
    let k = domain.dim();
    let mut m = CMatrix::zeros(2 * n, k);
    m.rows_mut(0, n).copy_from(domain.basis());
    m.rows_mut(n, n).copy_from(&(a * domain.basis()));
    // the graph map is injective with σ_min ≥ 1
    Subspace::span_with_dim(&m, k)
}

/// `H ⊕ 0` inside `Cⁿ ⊕ Cⁿ`.
pub fn horizontal<T: Real>(n: usize) -> Subspace<T> {
    Subspace::coordinate(2 * n, &(0..n).collect::<Vec<_>>())
}

/// `0 ⊕ H` inside `Cⁿ ⊕ Cⁿ`.
pub fn vertical<T: Real>(n: usize) -> Subspace<T> {
    Subspace::coordinate(2 * n, &(n..2 * n).collect::<Vec<_>>())
}

/// Kernel and range of `a` restricted to `domain`, with a single rank
/// decision shared by both.
pub fn kernel_and_range<T: Real>(
    a: &CMatrix<T>,
    domain: &Subspace<T>,
    tol: &Tolerance<T>,
) -> (Subspace<T>, Subspace<T>) {
    let n = domain.ambient_dim();
    if domain.dim() == 0 {
        return (Subspace::zero(n), Subspace::zero(n));
    }
    let image = a * domain.basis();
    // rank decisions are relative to ‖a‖, not to ‖a|domain‖
    let (null, rank) = null_space(&image, spectral_norm(a), tol);
    let kernel = Subspace::from_orthonormal(domain.basis() * null);
    let range = Subspace::span_with_dim(&image, rank);
    (kernel, range)
}

/// A realization `A_L`: the restriction of `A′` to `dom A_L = γ⁻¹L`.
#[derive(Debug, Clone)]
pub struct Realization<T: Real> {
    pub domain: Subspace<T>,
    pub kernel: Subspace<T>,
    pub range: Subspace<T>,
    pub coker_dim: usize,
    pub index: i64,
}

impl<T: Real> Realization<T> {
    fn from_domain(a: &CMatrix<T>, domain: Subspace<T>, tol: &Tolerance<T>) -> Self {
        let (kernel, range) = kernel_and_range(a, &domain, tol);
        let coker_dim = domain.ambient_dim() - range.dim();
        let index = kernel.dim() as i64 - coker_dim as i64;
        Self {
            domain,
            kernel,
            range,
            coker_dim,
            index,
        }
    }

    pub fn is_invertible(&self) -> bool {
        self.kernel.dim() == 0 && self.coker_dim == 0
    }
}

/// Projection of a graph in `H ⊕ H` onto its first component.
pub(crate) fn graph_domain<T: Real>(graph: &Subspace<T>) -> Subspace<T> {
    let n = graph.ambient_dim() / 2;
    Subspace::span_with_dim(&graph.basis().rows(0, n).into_owned(), graph.dim())
}

/// The realization with boundary condition `l ⊆ β`.
pub fn realization<T: Real>(op: &OperatorPair<T>, l: &Subspace<T>, tol: &Tolerance<T>) -> Result<Realization<T>> {
    let nested = op.graphs(tol)?;
    realization_in(op, &nested, l, tol)
}

fn realization_in<T: Real>(
    op: &OperatorPair<T>,
    nested: &NestedPair<T>,
    l: &Subspace<T>,
    tol: &Tolerance<T>,
) -> Result<Realization<T>> {
    let graph = nested.pull_back(l)?;
    Ok(Realization::from_domain(&op.action, graph_domain(&graph), tol))
}

/// Cauchy data space `C = γ(ker A′)`, computed from the kernel of `A′`
/// directly (not through the push-forward).
pub fn cauchy_data<T: Real>(op: &OperatorPair<T>, tol: &Tolerance<T>) -> Result<Subspace<T>> {
    let nested = op.graphs(tol)?;
    Ok(cauchy_data_in(op, &nested, tol))
}

fn cauchy_data_in<T: Real>(op: &OperatorPair<T>, nested: &NestedPair<T>, tol: &Tolerance<T>) -> Subspace<T> {
    let n = op.space_dim();
    let (kernel, _) = op.max_kernel_range(tol);
    let mut lifted = CMatrix::zeros(2 * n, kernel.dim());
    lifted.rows_mut(0, n).copy_from(kernel.basis());
    let traced = nested.beta().projector() * lifted;
    Subspace::from_frame(orthonormalize_scaled(&traced, T::one(), tol))
}

/// Checks the index formula for a single realization together with the
/// kernel and cokernel sequences and the graph dictionary.
pub fn point_index_report<T: Real>(
    op: &OperatorPair<T>,
    l: &Subspace<T>,
    tol: &Tolerance<T>,
) -> Result<IdentityReport> {
    let nested = op.graphs(tol)?;
    let real = realization_in(op, &nested, l, tol)?;
    let c = cauchy_data_in(op, &nested, tol);
    let lc = nested.beta_pair_index(l, &c)?;
    let (ker_min, _) = op.min_kernel_range(tol);
    let (_, ran_max) = op.max_kernel_range(tol);
    let coker_max = op.space_dim() - ran_max.dim();
    let n = op.space_dim();

    let mut report = IdentityReport::new();
    report.push(IdentityCheck::equal(
        "index_formula",
        real.index,
        lc.index + ker_min.dim() as i64 - coker_max as i64,
    ));
    report.push(IdentityCheck::equal(
        "kernel_sequence",
        real.kernel.dim(),
        ker_min.dim() + lc.dim_cap,
    ));
    report.push(IdentityCheck::equal(
        "cokernel_sequence",
        real.coker_dim,
        coker_max + lc.codim_sum,
    ));
    let graph = nested.pull_back(l)?;
    report.push(IdentityCheck::equal(
        "graph_dictionary",
        real.index,
        pair_index(&graph, &horizontal(n), tol).index,
    ));
    if ker_min.dim() == 0 && coker_max == 0 {
        report.push(IdentityCheck::equal(
            "invertibility_criterion",
            real.is_invertible(),
            lc.transversal,
        ));
    }
    Ok(report)
}

/// [`point_index_report`], failing with `FormulaViolation` on any mismatch.
pub fn verify_point_index_formula<T: Real>(
    op: &OperatorPair<T>,
    l: &Subspace<T>,
    tol: &Tolerance<T>,
) -> Result<IdentityReport> {
    point_index_report(op, l, tol)?.ensure()
}

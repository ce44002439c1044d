//! Randomized verification trials, one function per family of identities,
//! and the suite runner behind `fredholm-lab verify`.
//!
//! Every trial draws its instance from its own reproducible stream, so a
//! run is determined by the master seed alone and does not depend on how
//! trials are scheduled across threads.

use std::f64::consts::TAU;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::extension::{
    cauchy_data, graph_of, horizontal, kk_defect, point_index_report, relative_pair_report, vertical,
};
use crate::family::{
    planted_lagrangian, verify_theorem_k0, verify_theorem_k1, winding_number, K0Instance, K0Options, SampledLoop,
};
use crate::grassmann::{complement, gap_distance, intersect, map_subspace, pair_index, sum, Subspace};
use crate::homotopy::{sn_coordinates, sn_path, tn_coordinates, tn_path};
use crate::numeric::{idempotent_to_projector, spectral_norm, Tolerance};
use crate::random::{
    gaussian_matrix, random_hermitian, random_isotropic, random_lagrangian, random_nested, random_operator_pair,
    random_subspace, random_subspace_in, random_subspace_of, random_transversal, random_unitary,
    random_with_defect, trial_rng,
};
use crate::report::{IdentityCheck, IdentityReport};
use crate::scalar::{c, cis, cr, CMatrix};
use crate::symplectic::{boundary_form, cayley, isotropic_nested, SymplecticSpace};

type Tol = Tolerance<f64>;
type S = Subspace<f64>;
type M = CMatrix<f64>;

fn gap_check(name: &str, a: &S, b: &S, tol: &Tol) -> IdentityCheck {
    IdentityCheck::at_most(name, gap_distance(a, b), tol.gap_abs())
}

fn bound(name: &str, value: f64, limit: f64) -> IdentityCheck {
    IdentityCheck::at_most(name, value, limit)
}

/// `‖P² − P‖ + ‖P − Pᴴ‖` of a projector, optionally corrupted first.
fn projector_check(p: &M, corrupt: bool, tol: &Tol) -> IdentityCheck {
    let mut p = p.clone();
    if corrupt && p.nrows() > 0 {
        p[(0, 0)] += cr(1e-3);
    }
    let defect = spectral_norm(&(&p * &p - &p)) + spectral_norm(&(&p - p.adjoint()));
    bound("projector_sanity", defect, tol.gap_abs())
}

/// Subspace calculus on a random pair `(s, t)` in `Cⁿ`.
pub fn grassmann_trial<R: Rng>(rng: &mut R, dim_max: usize, tol: &Tol) -> Result<IdentityReport> {
    let n = rng.random_range(2..=dim_max.max(2));
    let s = random_subspace_in(rng, &S::full(n));
    let t = random_subspace_in(rng, &S::full(n));
    let mut r = IdentityReport::new();

    let cap = intersect(&s, &t, tol);
    let total = sum(&s, &t, tol);
    r.push(IdentityCheck::equal("dimension_identity", cap.dim() + total.dim(), s.dim() + t.dim()));
    let idx = pair_index(&s, &t, tol);
    r.push(IdentityCheck::equal("index_dimension_count", idx.index, s.dim() as i64 + t.dim() as i64 - n as i64));
    r.push(gap_check("duality", &complement(&cap), &sum(&s.complement(), &t.complement(), tol), tol));
    r.push(bound("frame_orthonormality", total.frame().orthonormality_defect(), tol.gap_abs()));

    let u = random_unitary::<f64, _>(rng, n);
    let moved = pair_index(&map_subspace(&u, &s, tol)?, &map_subspace(&u, &t, tol)?, tol);
    r.push(IdentityCheck::equal("unitary_invariance", moved.index, idx.index));

    let extra_n = rng.random_range(1..=3);
    let (a, b) = (random_subspace_in(rng, &S::full(extra_n)), random_subspace_in(rng, &S::full(extra_n)));
    let stacked = pair_index(&s.direct_sum(&a), &t.direct_sum(&b), tol);
    r.push(IdentityCheck::equal("additivity", stacked.index, idx.index + pair_index(&a, &b, tol).index));

    // oblique idempotent onto s along a generic complement
    if s.dim() > 0 {
        let y = gaussian_matrix::<f64, _>(rng, n, s.dim());
        let x = s.basis();
        let inner = (y.adjoint() * x).try_inverse().ok_or(Error::SingularPivot)?;
        let idem = x * inner * y.adjoint();
        let proj = idempotent_to_projector(&idem, tol)?;
        r.push(bound("idempotent_projector", spectral_norm(&(proj - s.projector())), tol.gap_abs()));
    }
    Ok(r)
}

/// The realization index formula and the kernel/cokernel sequences for a
/// random extension pair on `Cⁿ`, `n ≤ dim_max`, with a random boundary
/// condition.
pub fn operator_trial<R: Rng>(rng: &mut R, dim_max: usize, tol: &Tol) -> Result<IdentityReport> {
    let n = rng.random_range(1..=dim_max.max(1));
    let op = random_operator_pair(rng, n, tol);
    let nested = op.graphs(tol)?;
    let l = random_subspace_in(rng, nested.beta());
    let mut r = point_index_report(&op, &l, tol)?;
    let c = cauchy_data(&op, tol)?;
    r.push(gap_check("cauchy_data_push_forward", &c, &nested.push_forward(&horizontal(n)), tol));
    Ok(r)
}

/// Pull-back/push-forward calculus for a random nested pair in `Ĥ = Cⁿ`
/// and a random `M`, transversal to `(Γ, Γ′)` in half of the trials.
pub fn nested_trial<R: Rng>(rng: &mut R, dim_max: usize, tol: &Tol) -> Result<IdentityReport> {
    let n = rng.random_range(2..=dim_max.max(2));
    let p = random_nested(rng, n, tol);
    let m = if rng.random_bool(0.5) {
        random_transversal(rng, &p)
    } else {
        random_subspace_in(rng, &S::full(n))
    };
    let l = random_subspace_in(rng, p.beta());
    let mut r = relative_pair_report(&p, &m, &l)?;
    r.extend(kk_defect(&p, &m, &l)?);
    Ok(r)
}

/// The defect identity for `M` with planted `K`, `K′` not both zero.
pub fn defect_trial<R: Rng>(rng: &mut R, dim_max: usize, tol: &Tol) -> Result<IdentityReport> {
    loop {
        let n = rng.random_range(2..=dim_max.max(2));
        let p = random_nested(rng, n, tol);
        let (g, f) = (p.gamma_min().dim(), p.f_comp().dim());
        if g + f == 0 {
            continue;
        }
        let k = rng.random_range(0..=g);
        let kp = rng.random_range(0..=f);
        if k + kp == 0 {
            continue;
        }
        let m = random_with_defect(rng, &p, k, kp);
        let l = random_subspace_in(rng, p.beta());
        let pos = p.classify(&m);
        let mut r = kk_defect(&p, &m, &l)?;
        r.push(IdentityCheck::equal("planted_k", pos.dim_cap_min, k));
        r.push(IdentityCheck::equal("planted_k_prime", pos.def_max, kp));
        return Ok(r);
    }
}

/// The straight-line deformation of a random transversal `M` to `N ⊕ F`.
pub fn tn_trial<R: Rng>(rng: &mut R, dim_max: usize, samples: usize, tol: &Tol) -> Result<IdentityReport> {
    let n = rng.random_range(2..=dim_max.max(2));
    let p = random_nested(rng, n, tol);
    let m = random_transversal(rng, &p);
    let l = random_subspace_in(rng, p.beta());
    let coords = tn_coordinates(&p, &m)?;
    let lifted = p.pull_back(&l)?;
    let target = coords.n_target().clone();
    let mut r = IdentityReport::new();
    r.push(bound("zero_block", coords.zero_block_residual(), tol.gap_abs()));
    r.push(gap_check("round_trip", &tn_path(&coords, 0.0), &m, tol));
    let start = pair_index(&lifted, &m, tol).index;
    let mut worst_gap: f64 = 0.0;
    let (mut transversal, mut constant) = (true, true);
    for s in 0..samples {
        let t = s as f64 / (samples - 1).max(1) as f64;
        let mt = tn_path(&coords, t);
        worst_gap = worst_gap.max(gap_distance(&p.push_forward(&mt), &target));
        transversal &= p.classify(&mt).transversal;
        constant &= pair_index(&lifted, &mt, tol).index == start;
    }
    r.push(bound("push_forward_fixed", worst_gap, tol.gap_abs()));
    r.push(IdentityCheck::equal("transversal_along_path", transversal, true));
    r.push(IdentityCheck::equal("index_constant_along_path", constant, true));

    // additivity at t = 1: Ĥ = β ⊕ (Γ ⊕ F)
    let end = pair_index(&lifted, &coords.zero_element(), tol).index;
    let small = p.beta_pair_index(&l, &target)?.index;
    let rest = p.beta().complement();
    let rest_pair = pair_index(&p.gamma_min().coordinates_in(&rest), &p.f_comp().coordinates_in(&rest), tol);
    r.push(IdentityCheck::equal("rest_transversal", rest_pair.transversal, true));
    r.push(IdentityCheck::equal("additivity_at_end", end, small + rest_pair.index));
    r.push(IdentityCheck::equal("transversal_identity", start, small));
    Ok(r)
}

/// S_N coordinates and path for a random Lagrangian `M` transversal to
/// `(Γ, Γ^ω)` in a standard space of dimension `2k ≤ dim_max`.
pub fn sn_trial<R: Rng>(rng: &mut R, dim_max: usize, samples: usize, tol: &Tol) -> Result<IdentityReport> {
    let k = rng.random_range(1..=(dim_max / 2).max(1));
    let sp = SymplecticSpace::standard(k, tol);
    let g = rng.random_range(0..=k);
    let gamma = random_isotropic(rng, &sp, g);
    let p = isotropic_nested(&sp, &gamma)?;
    let m = random_lagrangian(rng, &sp);
    let coords = sn_coordinates(&sp, &p, &m)?;
    let sp_beta = boundary_form(&sp, &p)?;
    let l = p.from_beta_coords(&random_lagrangian(rng, &sp_beta));
    let lifted = p.pull_back(&l)?;
    let target = coords.coords().n_target().clone();

    let mut r = IdentityReport::new();
    r.push(bound("psi_hermitian", coords.hermitian_residual(), tol.gap_abs()));
    r.push(bound("psi_corner", spectral_norm(&coords.corner()), tol.gap_abs()));
    r.push(gap_check("round_trip", &sn_path(&coords, 0.0), &m, tol));
    let start = pair_index(&lifted, &m, tol).index;
    let (mut lagrangian, mut constant) = (true, true);
    let mut worst_gap: f64 = 0.0;
    for s in 0..samples {
        let t = s as f64 / (samples - 1).max(1) as f64;
        let mt = sn_path(&coords, t);
        lagrangian &= sp.is_lagrangian(&mt);
        worst_gap = worst_gap.max(gap_distance(&p.push_forward(&mt), &target));
        constant &= pair_index(&lifted, &mt, tol).index == start;
    }
    r.push(IdentityCheck::equal("lagrangian_along_path", lagrangian, true));
    r.push(bound("push_forward_fixed", worst_gap, tol.gap_abs()));
    r.push(IdentityCheck::equal("index_constant_along_path", constant, true));
    Ok(r)
}

/// `κ(Γ_A) = cayley(A)` for a random Hermitian `A`, `n ≤ dim_max`.
pub fn cayley_trial<R: Rng>(rng: &mut R, dim_max: usize, tol: &Tol) -> Result<IdentityReport> {
    let n = rng.random_range(1..=dim_max.max(1));
    let sp = SymplecticSpace::standard(n, tol);
    let a = random_hermitian::<f64, _>(rng, n);
    let graph = graph_of(&a, &S::full(n));
    let diff = spectral_norm(&(sp.kappa(&graph)? - cayley(&a, tol)?));
    let mut r = IdentityReport::new();
    r.push(bound("cayley_coherence", diff, 1e-10));
    // −1 is never an eigenvalue of a Cayley transform
    let shifted = cayley(&a, tol)? + M::identity(n, n);
    r.push(IdentityCheck::equal(
        "no_eigenvalue_minus_one",
        crate::numeric::smallest_singular_value(&shifted) > tol.gap_abs(),
        true,
    ));
    Ok(r)
}

/// The fixed values `κ(H ⊕ 0) = −1` and `κ(0 ⊕ H) = 1`.
pub fn cayley_endpoints(n: usize, tol: &Tol) -> Result<IdentityReport> {
    let sp = SymplecticSpace::standard(n, tol);
    let id = M::identity(n, n);
    let mut r = IdentityReport::new();
    r.push(bound("horizontal_to_minus_one", spectral_norm(&(sp.kappa(&horizontal(n))? + &id)), 1e-12));
    r.push(bound("vertical_to_one", spectral_norm(&(sp.kappa(&vertical(n))? - &id)), 1e-12));
    Ok(r)
}

/// A random Lagrangian pair `(l, m)` with a planted intersection of
/// random dimension, in a standard space of dimension `2k ≤ dim_max`.
pub fn lagrangian_pair_trial<R: Rng>(rng: &mut R, dim_max: usize, tol: &Tol) -> Result<IdentityReport> {
    let k = rng.random_range(1..=(dim_max / 2).max(1));
    let sp = SymplecticSpace::standard(k, tol);
    let l = random_lagrangian(rng, &sp);
    let shared = rng.random_range(0..=k);
    let s = random_subspace_of(rng, &l, shared);
    let p = isotropic_nested(&sp, &s)?;
    let sp_beta = boundary_form(&sp, &p)?;
    let m = p.pull_back(&p.from_beta_coords(&random_lagrangian(rng, &sp_beta)))?;

    let cap = intersect(&l, &m, tol).dim();
    let total = sum(&l, &m, tol).dim();
    let mut r = IdentityReport::new();
    r.push(IdentityCheck::equal("planted_intersection", cap, shared));
    r.push(IdentityCheck::equal("cap_equals_cokernel", cap, sp.ambient_dim() - total));
    r.push(IdentityCheck::equal("kappa_kernel", sp.kappa_kernel_dim(&l, &m)?, cap));
    r.push(gap_check("annihilator_involution", &sp.annihilator(&sp.annihilator(&s)), &s, tol));
    let t_sub = random_subspace_in(rng, &S::full(sp.ambient_dim()));
    let lhs = sp.annihilator(&sum(&s, &t_sub, tol));
    let rhs = intersect(&sp.annihilator(&s), &sp.annihilator(&t_sub), tol);
    r.push(gap_check("annihilator_of_sum", &lhs, &rhs, tol));
    let frame = sp.lagrangian_unitary(&l)?;
    r.push(bound("unitary_defect", crate::numeric::unitary_defect(&frame.unitary), tol.gap_abs()));
    r.push(gap_check("unitary_round_trip", &sp.lagrangian_from_unitary(&frame.unitary)?, &l, tol));
    Ok(r)
}

/// `ω_β(γx, γy) = ⟨ξ, A′η⟩ − ⟨A′ξ, η⟩` for graph vectors of a random
/// symmetric restriction.
pub fn boundary_form_trial<R: Rng>(rng: &mut R, dim_max: usize, tol: &Tol) -> Result<IdentityReport> {
    let n = rng.random_range(1..=(dim_max / 2).max(1));
    let sp = SymplecticSpace::standard(n, tol);
    let a = random_hermitian::<f64, _>(rng, n);
    let dom = random_subspace_in(rng, &S::full(n));
    let p = isotropic_nested(&sp, &graph_of(&a, &dom))?;
    let sp_beta = boundary_form(&sp, &p)?;
    // elements of Γ^ω and their traces
    let pick = |rng: &mut R| -> M {
        let coeffs = gaussian_matrix::<f64, _>(rng, p.gamma_max().dim(), 1);
        p.gamma_max().basis() * coeffs
    };
    let (x, y) = (pick(rng), pick(rng));
    let b = p.beta().basis();
    let lhs = sp_beta.omega(&(b.adjoint() * &x), &(b.adjoint() * &y));
    // x = (ξ, ζ) with ζ = A′ξ
    let (xi, ax) = (x.rows(0, n).into_owned(), x.rows(n, n).into_owned());
    let (eta, ay) = (y.rows(0, n).into_owned(), y.rows(n, n).into_owned());
    let rhs = xi.dotc(&ay) - ax.dotc(&eta);
    let mut r = IdentityReport::new();
    r.push(bound("boundary_form_formula", (lhs - rhs).norm(), 1e-10));
    r.push(bound("boundary_j_unitary", crate::numeric::unitary_defect(sp_beta.j()), tol.gap_abs()));
    Ok(r)
}

/// A planted-winding loop for the K¹ theorem in a standard space of
/// dimension `2k`, with isotropic `Γ` of dimension `gamma_dim` and winding
/// `w`.
pub fn k1_planted_trial<R: Rng>(
    rng: &mut R,
    k: usize,
    gamma_dim: usize,
    w: i64,
    samples: usize,
    tol: &Tol,
) -> Result<IdentityReport> {
    let sp = SymplecticSpace::standard(k, tol);
    let gamma = random_isotropic(rng, &sp, gamma_dim);
    let m = random_lagrangian(rng, &sp);
    let p = isotropic_nested(&sp, &gamma)?;
    let sp_beta = boundary_form(&sp, &p)?;
    let q = sp_beta.plus_basis().ncols();
    let base = random_unitary::<f64, _>(rng, q);
    let w_basis = random_unitary::<f64, _>(rng, q);
    let gen = |x: f64| Ok(p.from_beta_coords(&planted_lagrangian(&sp_beta, &base, &w_basis, w, x)?));
    let l_loop = SampledLoop::try_from_fn(samples, gen)?;
    let report = verify_theorem_k1(&sp, &gamma, &m, &l_loop, Some(&gen))?;
    let mut r = report.identities;
    r.push(IdentityCheck::equal("planted_winding", report.ambient.winding, w));
    Ok(r)
}

/// The K¹ theorem for `A = 1` on `span{e1} ⊂ C²` with `M = H ⊕ 0` and a
/// planted loop in the two-dimensional boundary space.
pub fn k1_operator_instance(w: i64, samples: usize, tol: &Tol) -> Result<IdentityReport> {
    let sp = SymplecticSpace::standard(2, tol);
    let gamma = graph_of(&M::identity(2, 2), &S::coordinate(2, &[0]));
    let p = isotropic_nested(&sp, &gamma)?;
    let sp_beta = boundary_form(&sp, &p)?;
    let id = M::identity(1, 1);
    let gen = |x: f64| Ok(p.from_beta_coords(&planted_lagrangian(&sp_beta, &id, &id, w, x)?));
    let l_loop = SampledLoop::try_from_fn(samples, gen)?;
    let report = verify_theorem_k1(&sp, &gamma, &horizontal(2), &l_loop, Some(&gen))?;
    let mut r = report.identities;
    r.push(IdentityCheck::equal("planted_winding", report.boundary.winding, w));
    Ok(r)
}

fn diagonal_phase_loop(samples: usize, windings: &[i64], conj: &M) -> SampledLoop<M> {
    SampledLoop::from_fn(samples, |x| {
        let n = windings.len();
        let d = M::from_fn(n, n, |i, j| if i == j { cis(TAU * windings[i] as f64 * x) } else { cr(0.0) });
        conj * d * conj.adjoint()
    })
}

/// Winding of random conjugated diagonal phase loops, with reversal and
/// concatenation.
pub fn winding_trial<R: Rng>(rng: &mut R, dim_max: usize, tol: &Tol) -> Result<IdentityReport> {
    let n = rng.random_range(1..=dim_max.clamp(1, 4));
    let a: Vec<i64> = (0..n).map(|_| rng.random_range(-2..=2)).collect();
    let b: Vec<i64> = (0..n).map(|_| rng.random_range(-2..=2)).collect();
    let u = random_unitary::<f64, _>(rng, n);
    let la = diagonal_phase_loop(128, &a, &u);
    let lb = diagonal_phase_loop(128, &b, &u);
    let (wa, wb) = (a.iter().sum::<i64>(), b.iter().sum::<i64>());
    let ra = winding_number(&la, None, tol)?;
    let mut r = IdentityReport::new();
    r.push(IdentityCheck::equal("planted_winding", ra.winding, wa));
    r.push(bound("integrality", (ra.total_phase / TAU - wa as f64).abs(), 1e-6));
    r.push(IdentityCheck::equal("reversal", winding_number(&la.reversed(), None, tol)?.winding, -wa));
    r.push(IdentityCheck::equal("concatenation", winding_number(&la.concat(&lb), None, tol)?.winding, wa + wb));
    Ok(r)
}

/// Pointwise index identities along a closed loop of boundary conditions
/// for a random extension pair.
pub fn k0_trial<R: Rng>(rng: &mut R, dim_max: usize, samples: usize, tol: &Tol) -> Result<IdentityReport> {
    let n = rng.random_range(1..=dim_max.max(1));
    let op = random_operator_pair(rng, n, tol);
    let nested = op.graphs(tol)?;
    let beta = nested.beta().clone();
    let l0 = random_subspace_in(rng, &beta).coordinates_in(&beta);
    // exp(2πi x H) with integer spectrum returns to the identity at x = 1
    let q = beta.dim();
    let v = random_unitary::<f64, _>(rng, q);
    let ints: Vec<f64> = (0..q).map(|_| rng.random_range(-2..=2) as f64).collect();
    let l_loop = SampledLoop::try_from_fn(samples, |x| {
        let d = M::from_fn(q, q, |i, j| if i == j { cis(TAU * ints[i] * x) } else { c(0.0, 0.0) });
        let flow = &v * d * v.adjoint();
        Ok(map_subspace(&flow, &l0, tol)?.embed_into(&beta))
    })?;
    let report = verify_theorem_k0(&K0Instance::Operator(op), &l_loop, &K0Options::default(), tol)?;
    Ok(report.identities)
}

/// One of the randomized suites of `fredholm-lab verify`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Grassmann,
    Extension,
    Symplectic,
    Homotopy,
    Family,
}

impl Suite {
    pub const ALL: [Suite; 5] = [
        Suite::Grassmann,
        Suite::Extension,
        Suite::Symplectic,
        Suite::Homotopy,
        Suite::Family,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Grassmann => "grassmann",
            Suite::Extension => "extension",
            Suite::Symplectic => "symplectic",
            Suite::Homotopy => "homotopy",
            Suite::Family => "family",
        }
    }

    fn index(self) -> u64 {
        Suite::ALL.iter().position(|&s| s == self).expect("listed") as u64
    }
}

impl std::str::FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .iter()
            .copied()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown suite {s:?}")))
    }
}

#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub seed: u64,
    pub trials: usize,
    pub dim_max: usize,
    pub tol: Tol,
    pub suites: Vec<Suite>,
    /// Corrupt one projector in this trial of every selected suite.
    pub fault_trial: Option<usize>,
}

impl VerifyConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidInput("trials must be at least 1".into()));
        }
        if self.dim_max < 2 {
            return Err(Error::InvalidInput("dim_max must be at least 2".into()));
        }
        if self.suites.is_empty() {
            return Err(Error::InvalidInput("no suite selected".into()));
        }
        Ok(())
    }
}

/// Outcome of one trial; only failing checks are kept.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialOutcome {
    pub suite: Suite,
    pub trial: usize,
    /// Stream index of the trial's generator (see [`trial_rng`]).
    pub stream: u64,
    pub checks: usize,
    pub failures: Vec<IdentityCheck>,
    pub error: Option<String>,
}

impl TrialOutcome {
    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.error.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub trials: usize,
    pub dim_max: usize,
    pub rank_rel: f64,
    pub gap_abs: f64,
    pub suites: Vec<Suite>,
    pub total_checks: usize,
    pub failed_trials: usize,
    pub passed: bool,
    /// Failing trials only.
    pub failures: Vec<TrialOutcome>,
}

const PATH_SAMPLES: usize = 32;
const LOOP_SAMPLES: usize = 64;

fn suite_trial<R: Rng>(suite: Suite, rng: &mut R, dim_max: usize, tol: &Tol) -> Result<(IdentityReport, M)> {
    let mut r = IdentityReport::new();
    let projector = match suite {
        Suite::Grassmann => {
            r.extend(grassmann_trial(rng, dim_max, tol)?);
            random_subspace::<f64, _>(rng, dim_max, dim_max / 2).projector()
        }
        Suite::Extension => {
            r.extend(operator_trial(rng, dim_max.min(8), tol)?);
            r.extend(nested_trial(rng, dim_max, tol)?);
            r.extend(defect_trial(rng, dim_max, tol)?);
            random_nested(rng, dim_max, tol).beta().projector()
        }
        Suite::Symplectic => {
            r.extend(cayley_trial(rng, dim_max.min(8), tol)?);
            r.extend(lagrangian_pair_trial(rng, dim_max, tol)?);
            r.extend(boundary_form_trial(rng, dim_max, tol)?);
            let sp = SymplecticSpace::standard((dim_max / 2).max(1), tol);
            random_lagrangian(rng, &sp).projector()
        }
        Suite::Homotopy => {
            r.extend(tn_trial(rng, dim_max, PATH_SAMPLES, tol)?);
            r.extend(sn_trial(rng, dim_max, PATH_SAMPLES, tol)?);
            random_nested(rng, dim_max, tol).gamma_max().projector()
        }
        Suite::Family => {
            r.extend(winding_trial(rng, dim_max, tol)?);
            r.extend(k0_trial(rng, dim_max.min(6), LOOP_SAMPLES, tol)?);
            let k = (dim_max / 2).clamp(1, 4);
            let g = rng.random_range(0..k);
            let w = rng.random_range(-2..=2);
            r.extend(k1_planted_trial(rng, k, g, w, LOOP_SAMPLES, tol)?);
            random_subspace::<f64, _>(rng, dim_max, 1).projector()
        }
    };
    Ok((r, projector))
}

fn run_trial(suite: Suite, trial: usize, cfg: &VerifyConfig) -> TrialOutcome {
    let stream = (suite.index() << 32) | trial as u64;
    let mut rng = trial_rng(cfg.seed, stream);
    let corrupt = cfg.fault_trial == Some(trial);
    let outcome = suite_trial(suite, &mut rng, cfg.dim_max, &cfg.tol);
    let (checks, failures, error) = match outcome {
        Ok((mut report, projector)) => {
            report.push(projector_check(&projector, corrupt, &cfg.tol));
            let failures = report.failures().cloned().collect();
            (report.checks.len(), failures, None)
        }
        Err(e) => (0, Vec::new(), Some(e.to_string())),
    };
    TrialOutcome {
        suite,
        trial,
        stream,
        checks,
        failures,
        error,
    }
}

/// Runs every selected suite for `cfg.trials` trials.
pub fn run(cfg: &VerifyConfig) -> Result<VerifyReport> {
    cfg.validate()?;
    let jobs: Vec<(Suite, usize)> = cfg
        .suites
        .iter()
        .flat_map(|&s| (0..cfg.trials).map(move |t| (s, t)))
        .collect();
    let outcomes: Vec<TrialOutcome> = jobs.par_iter().map(|&(s, t)| run_trial(s, t, cfg)).collect();
    let total_checks = outcomes.iter().map(|o| o.checks).sum();
    let failures: Vec<TrialOutcome> = outcomes.into_iter().filter(|o| !o.passed()).collect();
    Ok(VerifyReport {
        seed: cfg.seed,
        trials: cfg.trials,
        dim_max: cfg.dim_max,
        rank_rel: cfg.tol.rank_rel(),
        gap_abs: cfg.tol.gap_abs(),
        suites: cfg.suites.clone(),
        total_checks,
        failed_trials: failures.len(),
        passed: failures.is_empty(),
        failures,
    })
}

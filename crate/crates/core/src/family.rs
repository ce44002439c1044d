//! Sampled families over an interval or a circle: continuity diagnostics,
//! pointwise index profiles, winding numbers of unitary loops, and the
//! end-to-end checks of the family index theorems.

use std::f64::consts::{PI, TAU};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::extension::{horizontal, point_index_report, NestedPair, OperatorPair};
use crate::grassmann::{gap_distance, intersect, pair_index, sum, Subspace};
use crate::homotopy::{tn_coordinates, tn_path};
use crate::numeric::{unitary_defect, Tolerance};
use crate::report::{IdentityCheck, IdentityReport};
use crate::scalar::{argument, CMatrix, Real};
use crate::symplectic::{boundary_form, isotropic_nested, SymplecticSpace};

/// Maximum bisection depth when a phase step is too large.
pub const MAX_REFINE_DEPTH: usize = 12;

/// Samples `x(t_0), …, x(t_{K−1})` of a family over `[0, 1]`. For a loop the
/// last sample is compared against the first.
#[derive(Debug, Clone)]
pub struct SampledLoop<X> {
    params: Vec<f64>,
    samples: Vec<X>,
}

impl<X> SampledLoop<X> {
    pub fn new(params: Vec<f64>, samples: Vec<X>) -> Result<Self> {
        if params.len() != samples.len() || samples.is_empty() {
            return Err(Error::InvalidInput(format!(
                "{} parameters for {} samples",
                params.len(),
                samples.len()
            )));
        }
        if params.iter().any(|t| !t.is_finite()) || params.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidInput("parameters must be finite and strictly increasing".into()));
        }
        Ok(Self { params, samples })
    }

    /// `k` samples at `t_j = j / (k − 1)`, endpoints included.
    pub fn from_fn(k: usize, f: impl Fn(f64) -> X) -> Self {
        let params = uniform_params(k);
        let samples = params.iter().map(|&t| f(t)).collect();
        Self { params, samples }
    }

    pub fn try_from_fn(k: usize, f: impl Fn(f64) -> Result<X>) -> Result<Self> {
        let params = uniform_params(k);
        let samples = params.iter().map(|&t| f(t)).collect::<Result<Vec<_>>>()?;
        Ok(Self { params, samples })
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn samples(&self) -> &[X] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn map<Y>(&self, f: impl Fn(&X) -> Y) -> SampledLoop<Y> {
        SampledLoop {
            params: self.params.clone(),
            samples: self.samples.iter().map(f).collect(),
        }
    }

    pub fn try_map<Y>(&self, f: impl Fn(&X) -> Result<Y>) -> Result<SampledLoop<Y>> {
        Ok(SampledLoop {
            params: self.params.clone(),
            samples: self.samples.iter().map(f).collect::<Result<Vec<_>>>()?,
        })
    }
}

impl<X: Clone> SampledLoop<X> {
    /// The same family traversed backwards, reparametrized by `t ↦ 1 − t`.
    pub fn reversed(&self) -> Self {
        let lo = self.params[0];
        let hi = self.params[self.params.len() - 1];
        Self {
            params: self.params.iter().rev().map(|&t| lo + hi - t).collect(),
            samples: self.samples.iter().rev().cloned().collect(),
        }
    }

    /// `self` followed by `other`, on `[0, 1]` with the junction at `1/2`.
    /// The first sample of `other` is dropped (it should repeat the last
    /// sample of `self`).
    pub fn concat(&self, other: &Self) -> Self {
        let rescale = |ps: &[f64], offset: f64| -> Vec<f64> {
            let (lo, hi) = (ps[0], ps[ps.len() - 1]);
            let width = if hi > lo { hi - lo } else { 1.0 };
            ps.iter().map(|&t| offset + 0.5 * (t - lo) / width).collect()
        };
        let mut params = rescale(&self.params, 0.0);
        params.extend(rescale(&other.params, 0.5).into_iter().skip(1));
        let mut samples = self.samples.clone();
        samples.extend(other.samples.iter().skip(1).cloned());
        Self { params, samples }
    }
}

fn uniform_params(k: usize) -> Vec<f64> {
    match k {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..k).map(|j| j as f64 / (k - 1) as f64).collect(),
    }
}

/// Largest gap between consecutive samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContinuityReport {
    pub max_gap: f64,
    /// `j` such that the largest gap is between samples `j` and `j + 1`.
    pub location: Option<usize>,
    pub pass: bool,
    /// Largest consecutive gap of the intersections with a reference
    /// subspace, if one was given.
    pub intersection_max_gap: Option<f64>,
    /// Same for the sums with the reference.
    pub sum_max_gap: Option<f64>,
}

fn max_consecutive_gap<T: Real>(samples: &[Subspace<T>]) -> (f64, Option<usize>) {
    let mut best = (0.0, None);
    for (j, w) in samples.windows(2).enumerate() {
        let g = gap_distance(&w[0], &w[1]).to_f64_lossy();
        if best.1.is_none() || g > best.0 {
            best = (g, Some(j));
        }
    }
    best
}

pub fn continuity_report<T: Real>(fam: &SampledLoop<Subspace<T>>, budget: f64) -> ContinuityReport {
    let (max_gap, location) = max_consecutive_gap(fam.samples());
    ContinuityReport {
        max_gap,
        location,
        pass: max_gap <= budget,
        intersection_max_gap: None,
        sum_max_gap: None,
    }
}

/// [`continuity_report`] together with the derived families `L_x ∩ R` and
/// `L_x + R`, which are continuous exactly when their dimensions are
/// locally constant. The verdict covers all three.
pub fn continuity_report_against<T: Real>(
    fam: &SampledLoop<Subspace<T>>,
    reference: &Subspace<T>,
    budget: f64,
    tol: &Tolerance<T>,
) -> ContinuityReport {
    let mut report = continuity_report(fam, budget);
    let caps: Vec<_> = fam.samples().iter().map(|l| intersect(l, reference, tol)).collect();
    let sums: Vec<_> = fam.samples().iter().map(|l| sum(l, reference, tol)).collect();
    let cap_gap = max_consecutive_gap(&caps).0;
    let sum_gap = max_consecutive_gap(&sums).0;
    report.intersection_max_gap = Some(cap_gap);
    report.sum_max_gap = Some(sum_gap);
    report.pass = report.pass && cap_gap <= budget && sum_gap <= budget;
    report
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IndexProfile {
    pub values: Vec<i64>,
    pub constant: bool,
}

impl IndexProfile {
    fn new(values: Vec<i64>) -> Self {
        let constant = values.windows(2).all(|w| w[0] == w[1]);
        Self { values, constant }
    }
}

fn pair_at<T: Real>(pairs: &[NestedPair<T>], j: usize, len: usize) -> Result<&NestedPair<T>> {
    match pairs.len() {
        1 => Ok(&pairs[0]),
        k if k == len => Ok(&pairs[j]),
        k => Err(Error::InvalidInput(format!("{k} nested pairs for {len} samples"))),
    }
}

/// `ind(γ⁻¹L_x, M)` at every sample. `pairs` holds either one nested pair
/// or one per sample.
pub fn index_profile<T: Real>(
    pairs: &[NestedPair<T>],
    m: &Subspace<T>,
    l_fam: &SampledLoop<Subspace<T>>,
) -> Result<IndexProfile> {
    let len = l_fam.len();
    let values = (0..len)
        .into_par_iter()
        .map(|j| {
            let p = pair_at(pairs, j, len)?;
            let lifted = p.pull_back(&l_fam.samples()[j])?;
            Ok(pair_index(&lifted, m, p.tolerance()).index)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(IndexProfile::new(values))
}

/// One step of the phase trace of a winding computation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhaseSample {
    pub param: f64,
    pub phase: f64,
    pub cumulative: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WindingReport {
    pub winding: i64,
    /// Sum of the phase steps, in radians.
    pub total_phase: f64,
    pub max_step_phase: f64,
    /// Whether any interval had to be bisected.
    pub refined: bool,
    #[serde(skip)]
    pub trace: Vec<PhaseSample>,
}

impl WindingReport {
    /// `param,phase,cumulative` rows, one per step.
    pub fn trace_csv(&self) -> String {
        let mut out = String::from("param,phase,cumulative\n");
        for s in &self.trace {
            out.push_str(&format!("{},{},{}\n", s.param, s.phase, s.cumulative));
        }
        out
    }
}

/// Generator used to bisect intervals whose phase step is too large.
pub type Refiner<'a, X> = &'a (dyn Fn(f64) -> Result<X> + Sync + Send);

fn check_unitary<T: Real>(u: &CMatrix<T>, tol: &Tolerance<T>) -> Result<()> {
    let defect = unitary_defect(u);
    if u.nrows() != u.ncols() || defect > tol.gap_abs() {
        return Err(Error::NotUnitary {
            residual: defect.to_f64_lossy(),
        });
    }
    Ok(())
}

/// `arg det(b a⁻¹)` in `(−π, π]`.
fn step_phase<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> f64 {
    if a.nrows() == 0 {
        return 0.0;
    }
    argument((b * a.adjoint()).determinant()).to_f64_lossy()
}

struct Walker<'a, T: Real> {
    refine: Option<Refiner<'a, CMatrix<T>>>,
    max_depth: usize,
    tol: &'a Tolerance<T>,
    trace: Vec<(f64, f64)>,
    refined: bool,
}

impl<T: Real> Walker<'_, T> {
    fn step(&mut self, index: usize, t0: f64, a: &CMatrix<T>, t1: f64, b: &CMatrix<T>, depth: usize) -> Result<()> {
        let phase = step_phase(a, b);
        if phase.abs() < PI / 2.0 {
            self.trace.push((t1, phase));
            return Ok(());
        }
        match self.refine {
            Some(gen) if depth < self.max_depth => {
                self.refined = true;
                let mid = 0.5 * (t0 + t1);
                let um = gen(mid)?;
                check_unitary(&um, self.tol)?;
                self.step(index, t0, a, mid, &um, depth + 1)?;
                self.step(index, mid, &um, t1, b, depth + 1)
            }
            _ => Err(Error::InsufficientSampling {
                index,
                step: phase.abs(),
            }),
        }
    }
}

/// Winding number of `t ↦ det u(t)` along a closed loop of unitaries.
pub fn winding_number<T: Real>(
    u_loop: &SampledLoop<CMatrix<T>>,
    refine: Option<Refiner<'_, CMatrix<T>>>,
    tol: &Tolerance<T>,
) -> Result<WindingReport> {
    winding_number_with_depth(u_loop, refine, MAX_REFINE_DEPTH, tol)
}

/// [`winding_number`] with at most `max_depth` bisections per interval.
pub fn winding_number_with_depth<T: Real>(
    u_loop: &SampledLoop<CMatrix<T>>,
    refine: Option<Refiner<'_, CMatrix<T>>>,
    max_depth: usize,
    tol: &Tolerance<T>,
) -> Result<WindingReport> {
    let samples = u_loop.samples();
    if samples.len() < 2 {
        return Err(Error::InvalidInput("a loop needs at least two samples".into()));
    }
    let size = samples[0].nrows();
    for u in samples {
        if u.nrows() != size {
            return Err(Error::DimensionMismatch("loop samples have different sizes".into()));
        }
        check_unitary(u, tol)?;
    }
    let closure = crate::numeric::spectral_norm(&(&samples[samples.len() - 1] - &samples[0]));
    if closure > tol.gap_abs() {
        return Err(Error::NotClosed {
            gap: closure.to_f64_lossy(),
        });
    }
    let mut walker = Walker {
        refine,
        max_depth,
        tol,
        trace: Vec::with_capacity(samples.len()),
        refined: false,
    };
    let params = u_loop.params();
    for j in 0..samples.len() - 1 {
        walker.step(j, params[j], &samples[j], params[j + 1], &samples[j + 1], 0)?;
    }
    let mut cumulative = 0.0;
    let mut max_step: f64 = 0.0;
    let trace: Vec<PhaseSample> = walker
        .trace
        .iter()
        .map(|&(param, phase)| {
            cumulative += phase;
            max_step = max_step.max(phase.abs());
            PhaseSample {
                param,
                phase,
                cumulative,
            }
        })
        .collect();
    let turns = cumulative / TAU;
    let winding = turns.round();
    if (turns - winding).abs() > 1e-6 {
        return Err(Error::NotClosed {
            gap: (turns - winding).abs(),
        });
    }
    Ok(WindingReport {
        winding: winding as i64,
        total_phase: cumulative,
        max_step_phase: max_step,
        refined: walker.refined,
        trace,
    })
}

/// `−κ(L; M)`, the unitary whose winding is the index of the pair.
fn minus_kappa<T: Real>(sp: &SymplecticSpace<T>, l: &Subspace<T>, m: &Subspace<T>) -> Result<CMatrix<T>> {
    Ok(-sp.kappa_rel(l, m)?)
}

/// K¹ index of a loop of Lagrangian pairs `(L_x, M)`: the winding of
/// `det(−κ(L_x; M))` in the direction of increasing parameter.
pub fn k1_lagrangian_loop_index<T: Real>(
    sp: &SymplecticSpace<T>,
    l_loop: &SampledLoop<Subspace<T>>,
    m: &Subspace<T>,
    refine: Option<Refiner<'_, Subspace<T>>>,
) -> Result<WindingReport> {
    k1_lagrangian_loop_index_with_depth(sp, l_loop, m, refine, MAX_REFINE_DEPTH)
}

pub fn k1_lagrangian_loop_index_with_depth<T: Real>(
    sp: &SymplecticSpace<T>,
    l_loop: &SampledLoop<Subspace<T>>,
    m: &Subspace<T>,
    refine: Option<Refiner<'_, Subspace<T>>>,
    max_depth: usize,
) -> Result<WindingReport> {
    let unitaries = par_try_map(l_loop, |l| minus_kappa(sp, l, m))?;
    match refine {
        Some(gen) => {
            let lifted = move |t: f64| minus_kappa(sp, &gen(t)?, m);
            winding_number_with_depth(&unitaries, Some(&lifted), max_depth, sp.tolerance())
        }
        None => winding_number_with_depth(&unitaries, None, max_depth, sp.tolerance()),
    }
}

fn par_try_map<X: Sync, Y: Send>(
    fam: &SampledLoop<X>,
    f: impl Fn(&X) -> Result<Y> + Sync + Send,
) -> Result<SampledLoop<Y>> {
    let samples = fam.samples().par_iter().map(f).collect::<Result<Vec<_>>>()?;
    Ok(SampledLoop {
        params: fam.params.clone(),
        samples,
    })
}

/// An instance of the K⁰ (pointwise) index theorem.
#[derive(Debug, Clone)]
pub enum K0Instance<T: Real> {
    /// A fixed extension pair; the boundary conditions vary.
    Operator(OperatorPair<T>),
    /// Nested pairs (one, or one per sample) and a fixed subspace `M`.
    Nested {
        pairs: Vec<NestedPair<T>>,
        m: Subspace<T>,
        /// Fail with `NonconstantDefect` if `dim K` or `dim K′` changes.
        constant_defect: bool,
    },
}

#[derive(Debug, Clone, Copy)]
pub struct K0Options {
    /// Number of samples along the deformation of `M`.
    pub path_samples: usize,
}

impl Default for K0Options {
    fn default() -> Self {
        Self { path_samples: 32 }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct K0Report {
    pub profile: IndexProfile,
    pub identities: IdentityReport,
}

fn prefixed(j: usize, report: IdentityReport) -> IdentityReport {
    IdentityReport {
        checks: report
            .checks
            .into_iter()
            .map(|mut c| {
                c.name = format!("sample {j}: {}", c.name);
                c
            })
            .collect(),
    }
}

/// Pointwise index identities at every sample of `l_loop`, constancy of the
/// index along the family, and constancy along the straight-line
/// deformation of `M` when `M` is transversal to `(Γ, Γ′)`.
pub fn verify_theorem_k0<T: Real>(
    instance: &K0Instance<T>,
    l_loop: &SampledLoop<Subspace<T>>,
    options: &K0Options,
    tol: &Tolerance<T>,
) -> Result<K0Report> {
    let len = l_loop.len();
    let (pairs, m, constant_defect) = match instance {
        K0Instance::Operator(op) => (vec![op.graphs(tol)?], horizontal(op.space_dim()), false),
        K0Instance::Nested {
            pairs,
            m,
            constant_defect,
        } => (pairs.clone(), m.clone(), *constant_defect),
    };

    let per_sample = (0..len)
        .into_par_iter()
        .map(|j| -> Result<(IdentityReport, i64, (usize, usize))> {
            let p = pair_at(&pairs, j, len)?;
            let l = &l_loop.samples()[j];
            let lifted = p.pull_back(l)?;
            let big = pair_index(&lifted, &m, tol);
            let n = p.push_forward(&m);
            let small = p.beta_pair_index(l, &n)?;
            let pos = p.classify(&m);
            let mut report = IdentityReport::new();
            report.push(IdentityCheck::equal(
                "defect_identity",
                big.index,
                small.index + pos.dim_cap_min as i64 - pos.def_max as i64,
            ));
            if pos.transversal {
                report.push(IdentityCheck::equal("transversal_identity", big.index, small.index));
            }
            if let K0Instance::Operator(op) = instance {
                report.extend(point_index_report(op, l, tol)?);
            }
            Ok((prefixed(j, report), big.index, (pos.dim_cap_min, pos.def_max)))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut identities = IdentityReport::new();
    let mut values = Vec::with_capacity(len);
    let first_defect = per_sample.first().map(|s| s.2);
    for (j, (report, value, defect)) in per_sample.into_iter().enumerate() {
        if constant_defect && Some(defect) != first_defect {
            return Err(Error::NonconstantDefect { index: j });
        }
        identities.extend(report);
        values.push(value);
    }
    let profile = IndexProfile::new(values);
    identities.push(IdentityCheck::equal("index_constancy", profile.constant, true));

    let p0 = pair_at(&pairs, 0, len)?;
    if p0.classify(&m).transversal {
        let coords = tn_coordinates(p0, &m)?;
        let lifted = p0.pull_back(&l_loop.samples()[0])?;
        let steps = options.path_samples.max(2);
        let deformed: Vec<i64> = (0..steps)
            .into_par_iter()
            .map(|s| {
                let t = T::lit(s as f64 / (steps - 1) as f64);
                pair_index(&lifted, &tn_path(&coords, t), tol).index
            })
            .collect();
        let constant = deformed.iter().all(|&v| v == profile.values[0]);
        identities.push(IdentityCheck::equal("deformation_constancy", constant, true));
    }
    Ok(K0Report {
        profile,
        identities: identities.ensure()?,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct K1Report {
    /// Winding of `det(−κ(γ⁻¹L_x; M))` in `Ĥ`.
    pub ambient: WindingReport,
    /// Winding of `det(−κ(L_x; γ_!M))` in `β`.
    pub boundary: WindingReport,
    pub identities: IdentityReport,
}

/// Checks `ind(γ⁻¹L, M) = ind_β(L, γ_!M)` for a loop of Lagrangian
/// boundary conditions `L_x ⊆ β` (given in the coordinates of `Ĥ`), an
/// isotropic `Γ` and a Lagrangian `M` transversal to `(Γ, Γ^ω)`. The two
/// windings are computed independently: one from unitaries on `Λ⁺(Ĥ)`, the
/// other from the induced structure on `β`.
pub fn verify_theorem_k1<T: Real>(
    sp: &SymplecticSpace<T>,
    gamma: &Subspace<T>,
    m: &Subspace<T>,
    l_loop: &SampledLoop<Subspace<T>>,
    refine: Option<Refiner<'_, Subspace<T>>>,
) -> Result<K1Report> {
    let p = isotropic_nested(sp, gamma)?;
    let sp_beta = boundary_form(sp, &p)?;
    if !sp.is_lagrangian(m) {
        return Err(Error::NotLagrangian);
    }
    if !p.classify(m).transversal {
        return Err(Error::NotTransversal);
    }
    let n = p.to_beta_coords(&p.push_forward(m))?;

    let big_loop = par_try_map(l_loop, |l| p.pull_back(l))?;
    let small_loop = par_try_map(l_loop, |l| p.to_beta_coords(l))?;
    let (ambient, boundary) = match refine {
        Some(gen) => {
            let big_gen = |t: f64| p.pull_back(&gen(t)?);
            let small_gen = |t: f64| p.to_beta_coords(&gen(t)?);
            (
                k1_lagrangian_loop_index(sp, &big_loop, m, Some(&big_gen))?,
                k1_lagrangian_loop_index(&sp_beta, &small_loop, &n, Some(&small_gen))?,
            )
        }
        None => (
            k1_lagrangian_loop_index(sp, &big_loop, m, None)?,
            k1_lagrangian_loop_index(&sp_beta, &small_loop, &n, None)?,
        ),
    };
    let mut identities = IdentityReport::new();
    identities.push(IdentityCheck::equal("push_forward_lagrangian", sp_beta.is_lagrangian(&n), true));
    identities.push(IdentityCheck::equal("winding_equality", ambient.winding, boundary.winding));
    Ok(K1Report {
        ambient,
        boundary,
        identities: identities.ensure()?,
    })
}

/// A loop of Lagrangian subspaces of `sp` with a known winding: `L_x` is
/// the image of `base` under the symplectic unitary that acts on `Λ⁻` by
/// `W·diag(e^{2πi·w·x}, 1, …, 1)·Wᴴ` and trivially on `Λ⁺`. Then
/// `u_{L_x} = W·diag(e^{2πiwx}, 1, …)·Wᴴ·u_base` and `det(−κ(L_x; M))`
/// winds `w` times for every fixed `M`.
pub fn planted_lagrangian<T: Real>(
    sp: &SymplecticSpace<T>,
    base_unitary: &CMatrix<T>,
    w_basis: &CMatrix<T>,
    w: i64,
    x: f64,
) -> Result<Subspace<T>> {
    let k = base_unitary.nrows();
    let mut phases = CMatrix::<T>::identity(k, k);
    if k > 0 {
        phases[(0, 0)] = crate::scalar::cis(T::lit(TAU * w as f64 * x));
    }
    let rotation = w_basis * phases * w_basis.adjoint();
    sp.lagrangian_from_unitary(&(rotation * base_unitary))
}

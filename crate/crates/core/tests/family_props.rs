use std::f64::consts::{PI, TAU};

use fredholm_core::family::{
    k1_lagrangian_loop_index, planted_lagrangian, verify_theorem_k0, verify_theorem_k1, winding_number, K0Options,
};
use fredholm_core::grassmann::{map_subspace, pair_index};
use fredholm_core::random::{
    random_isotropic, random_lagrangian, random_operator_pair, random_subspace_in, random_unitary, random_with_defect,
    trial_rng,
};
use fredholm_core::symplectic::isotropic_nested;
use fredholm_core::{
    Error, K0Instance, Matrix64, NestedPair64, SampledLoop, Subspace64, SymplecticSpace64, Tolerance64, C,
};
use proptest::prelude::*;
use rand::Rng;

fn tol() -> Tolerance64 {
    Tolerance64::default()
}

/// `V diag(e^{2πi w_j x}) Vᴴ`
fn phase_unitary(v: &Matrix64, windings: &[i64], x: f64) -> Matrix64 {
    let d: Vec<C<f64>> = windings.iter().map(|&w| C::from_polar(1.0, TAU * w as f64 * x)).collect();
    v * Matrix64::from_diagonal(&d.into()) * v.adjoint()
}

fn diagonal_loop(v: &Matrix64, windings: &[i64], samples: usize) -> SampledLoop<Matrix64> {
    SampledLoop::from_fn(samples, |x| phase_unitary(v, windings, x))
}

fn line(theta: f64) -> Subspace64 {
    let m = Matrix64::from_column_slice(2, 1, &[theta.cos().into(), theta.sin().into()]);
    Subspace64::span(&m, &tol()).unwrap()
}

/// A unitary commuting with `J`: independent rotations of `Λ⁺` and `Λ⁻`.
fn symplectic_unitary(rng: &mut impl Rng, sp: &SymplecticSpace64) -> Matrix64 {
    let k = sp.plus_basis().ncols();
    let x = random_unitary::<f64, _>(rng, k);
    let y = random_unitary::<f64, _>(rng, k);
    sp.plus_basis() * x * sp.plus_basis().adjoint() + sp.minus_basis() * y * sp.minus_basis().adjoint()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn winding_of_diagonal_phases(seed in any::<u64>(), n in 1usize..5) {
        let mut rng = trial_rng(seed, 40);
        let windings: Vec<i64> = (0..n).map(|_| rng.random_range(-2..=2)).collect();
        let total: i64 = windings.iter().sum();
        let v = random_unitary::<f64, _>(&mut rng, n);
        // |w| ≤ 2 per eigenvalue keeps every step well below π/2
        let fam = diagonal_loop(&v, &windings, 32 * n + 1);
        let r = winding_number(&fam, None, &tol()).unwrap();
        prop_assert_eq!(r.winding, total);
        prop_assert!((r.total_phase - TAU * total as f64).abs() < 1e-8);
        prop_assert_eq!(winding_number(&fam.reversed(), None, &tol()).unwrap().winding, -total);

        let other: Vec<i64> = (0..n).map(|_| rng.random_range(-2..=2)).collect();
        let fam2 = diagonal_loop(&v, &other, 32 * n + 1);
        let joined = winding_number(&fam.concat(&fam2), None, &tol()).unwrap().winding;
        prop_assert_eq!(joined, total + other.iter().sum::<i64>());

        let w = random_unitary::<f64, _>(&mut rng, n);
        let conj = fam.map(|u| &w * u * w.adjoint());
        prop_assert_eq!(winding_number(&conj, None, &tol()).unwrap().winding, total);
        // multiplying by a constant unitary leaves the winding unchanged
        let shifted = fam.map(|u| u * &w);
        prop_assert_eq!(winding_number(&shifted, None, &tol()).unwrap().winding, total);
    }

    /// Steps of true phase `2π/3`: too coarse for the unrefined walk, but
    /// not aliased.
    #[test]
    fn undersampled_loops_are_refined(w in (1i64..=4).prop_flat_map(|a| prop_oneof![Just(a), Just(-a)])) {
        let v = Matrix64::identity(1, 1);
        let fam = diagonal_loop(&v, &[w], 3 * w.unsigned_abs() as usize + 1);
        let gen = |x: f64| Ok(phase_unitary(&v, &[w], x));
        let r = winding_number(&fam, Some(&gen), &tol()).unwrap();
        prop_assert_eq!(r.winding, w);
        prop_assert!(r.refined);
        let unrefined = winding_number(&fam, None, &tol());
        let rejected = matches!(unrefined, Err(Error::InsufficientSampling { .. }));
        prop_assert!(rejected);
    }

    #[test]
    fn planted_lagrangian_loops(seed in any::<u64>(), k in 1usize..5, w in -2i64..=2) {
        let mut rng = trial_rng(seed, 41);
        let sp = SymplecticSpace64::standard(k, &tol());
        let base = random_unitary::<f64, _>(&mut rng, k);
        let basis = random_unitary::<f64, _>(&mut rng, k);
        let m = random_lagrangian(&mut rng, &sp);
        let gen = |x: f64| planted_lagrangian(&sp, &base, &basis, w, x);
        let fam = SampledLoop::try_from_fn(129, gen).unwrap();
        let r = k1_lagrangian_loop_index(&sp, &fam, &m, Some(&gen)).unwrap();
        prop_assert_eq!(r.winding, w);

        // transport by a unitary commuting with J
        let u = symplectic_unitary(&mut rng, &sp);
        let moved = fam.try_map(|l| map_subspace(&u, l, &tol())).unwrap();
        let um = map_subspace(&u, &m, &tol()).unwrap();
        prop_assert_eq!(k1_lagrangian_loop_index(&sp, &moved, &um, None).unwrap().winding, w);

        // the constant loop has index zero
        let constant = SampledLoop::from_fn(17, |_| m.clone());
        let other = random_lagrangian(&mut rng, &sp);
        prop_assert_eq!(k1_lagrangian_loop_index(&sp, &constant, &other, None).unwrap().winding, 0);
    }

    /// Boundary loops lifted through an isotropic `Γ` keep their winding.
    #[test]
    fn k1_through_isotropic_subspaces(seed in any::<u64>(), k in 2usize..5, w in -2i64..=2) {
        let mut rng = trial_rng(seed, 42);
        let sp = SymplecticSpace64::standard(k, &tol());
        let g = rng.random_range(1..k);
        let gamma = random_isotropic(&mut rng, &sp, g);
        let p = isotropic_nested(&sp, &gamma).unwrap();
        let sp_beta = fredholm_core::symplectic::boundary_form(&sp, &p).unwrap();
        let kb = k - g;
        let base = random_unitary::<f64, _>(&mut rng, kb);
        let basis = random_unitary::<f64, _>(&mut rng, kb);
        let m = random_lagrangian(&mut rng, &sp);
        let gen = |x: f64| Ok(p.from_beta_coords(&planted_lagrangian(&sp_beta, &base, &basis, w, x)?));
        let fam = SampledLoop::try_from_fn(129, gen).unwrap();
        let r = verify_theorem_k1(&sp, &gamma, &m, &fam, Some(&gen)).unwrap();
        prop_assert_eq!(r.ambient.winding, w);
        prop_assert_eq!(r.boundary.winding, w);
    }

    /// Boundary conditions moved around `β` by a loop of unitaries.
    #[test]
    fn k0_operator_loops(seed in any::<u64>(), n in 1usize..6) {
        let mut rng = trial_rng(seed, 43);
        let op = random_operator_pair::<f64, _>(&mut rng, n, &tol());
        let p = op.graphs(&tol()).unwrap();
        let b = p.beta().dim();
        let l0 = random_subspace_in(&mut rng, &Subspace64::full(b));
        let v = random_unitary::<f64, _>(&mut rng, b);
        let windings: Vec<i64> = (0..b).map(|_| rng.random_range(-2..=2)).collect();
        let fam = SampledLoop::from_fn(17, |x| {
            p.from_beta_coords(&map_subspace(&phase_unitary(&v, &windings, x), &l0, &tol()).unwrap())
        });
        let r = verify_theorem_k0(&K0Instance::Operator(op.clone()), &fam, &K0Options::default(), &tol()).unwrap();
        prop_assert!(r.profile.constant);
        let expected = (l0.dim() + op.dom_min().dim()) as i64 - n as i64;
        prop_assert!(r.profile.values.iter().all(|&v| v == expected));
    }
}

/// `Γ_x = U_x Γ` for a loop `U_x` that preserves `M`, with a planted
/// `(dim K, dim K′) = (1, 1)`.
#[test]
fn k0_nested_loop_with_planted_defect() {
    let t = tol();
    let mut rng = trial_rng(44, 0);
    let n = 7;
    let q = random_unitary::<f64, _>(&mut rng, n);
    let gmin = map_subspace(&q, &Subspace64::coordinate(n, &[0, 1]), &t).unwrap();
    let gmax = map_subspace(&q, &Subspace64::coordinate(n, &[0, 1, 2, 3, 4]), &t).unwrap();
    let p0 = NestedPair64::new(gmin, gmax, &t).unwrap();
    let m = random_with_defect(&mut rng, &p0, 1, 1);
    let pos = p0.classify(&m);
    assert_eq!((pos.dim_cap_min, pos.def_max), (1, 1));

    // block-diagonal for M ⊕ M⊥, integer spectrum
    let mut frame = Matrix64::zeros(n, n);
    frame.columns_mut(0, m.dim()).copy_from(m.basis());
    frame.columns_mut(m.dim(), n - m.dim()).copy_from(m.complement().basis());
    let mut v = Matrix64::zeros(n, n);
    v.view_mut((0, 0), (m.dim(), m.dim())).copy_from(&random_unitary::<f64, _>(&mut rng, m.dim()));
    v.view_mut((m.dim(), m.dim()), (n - m.dim(), n - m.dim()))
        .copy_from(&random_unitary::<f64, _>(&mut rng, n - m.dim()));
    let v = frame * v;
    let windings: Vec<i64> = (0..n as i64).map(|j| j % 3 - 1).collect();
    let u = |x: f64| phase_unitary(&v, &windings, x);

    let samples = 17;
    let l0 = random_subspace_in(&mut rng, p0.beta());
    let mut pairs = Vec::new();
    let fam = SampledLoop::from_fn(samples, |x| map_subspace(&u(x), &l0, &t).unwrap());
    for (j, &x) in fam.params().iter().enumerate() {
        let ux = u(x);
        let px = NestedPair64::new(
            map_subspace(&ux, p0.gamma_min(), &t).unwrap(),
            map_subspace(&ux, p0.gamma_max(), &t).unwrap(),
            &t,
        )
        .unwrap();
        assert!(px.beta().contains(&fam.samples()[j], &t));
        pairs.push(px);
    }
    let expected = pair_index(&p0.pull_back(&l0).unwrap(), &m, &t).index;
    let instance = K0Instance::Nested {
        pairs: pairs.clone(),
        m: m.clone(),
        constant_defect: true,
    };
    let r = verify_theorem_k0(&instance, &fam, &K0Options::default(), &t).unwrap();
    assert!(r.profile.values.iter().all(|&v| v == expected));

    // swap in a pair with a different defect halfway along
    pairs[samples / 2] = NestedPair64::new(Subspace64::zero(n), Subspace64::full(n), &t).unwrap();
    let broken = K0Instance::Nested {
        pairs,
        m,
        constant_defect: true,
    };
    match verify_theorem_k0(&broken, &fam, &K0Options::default(), &t) {
        Err(Error::NonconstantDefect { index }) => assert_eq!(index, samples / 2),
        other => panic!("expected a nonconstant defect, got {other:?}"),
    }
}

/// The line at angle `πwx` against `H ⊕ 0` crosses it `|w|` times.
#[test]
fn rotating_lines_count_crossings() {
    let sp = SymplecticSpace64::standard(1, &tol());
    for w in -3i64..=3 {
        let fam = SampledLoop::from_fn(65, |x| line(PI * w as f64 * x));
        let r = k1_lagrangian_loop_index(&sp, &fam, &line(0.0), None).unwrap();
        assert_eq!(r.winding, w);
    }
}

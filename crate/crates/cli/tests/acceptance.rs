//! Acceptance suite: ten numbered criteria with pinned sizes, tolerances and
//! time budgets. Each prints one `PASS`/`FAIL` line; the test fails if any
//! criterion does.

use std::f64::consts::TAU;
use std::process::Command;
use std::time::{Duration, Instant};

use fredholm_core::extension::{graph_of, point_index_report, realization, relative_pair_report};
use fredholm_core::family::{winding_number, SampledLoop};
use fredholm_core::grassmann::gap_distance;
use fredholm_core::numeric::{numerical_rank, spectral_norm};
use fredholm_core::random::{
    random_nested, random_operator_pair, random_subspace_in, random_transversal, random_unitary, trial_rng,
};
use fredholm_core::symplectic::cayley;
use fredholm_core::verify::{
    cayley_endpoints, defect_trial, k1_operator_instance, k1_planted_trial, lagrangian_pair_trial, tn_trial,
};
use fredholm_core::{IdentityReport, Matrix64, Subspace64, SymplecticSpace64, Tolerance64, C};
use rand::Rng;

const SEED: u64 = 20_240_917;

fn tol() -> Tolerance64 {
    Tolerance64::default()
}

struct Outcome {
    failures: Vec<String>,
    elapsed: Duration,
    budget: Option<Duration>,
}

fn criterion(id: usize, name: &str, budget: Option<u64>, body: impl FnOnce(&mut Vec<String>)) -> bool {
    let start = Instant::now();
    let mut failures = Vec::new();
    body(&mut failures);
    let outcome = Outcome {
        failures,
        elapsed: start.elapsed(),
        budget: budget.map(Duration::from_secs),
    };
    let over = outcome.budget.is_some_and(|b| outcome.elapsed > b);
    let ok = outcome.failures.is_empty() && !over;
    let timing = match outcome.budget {
        Some(b) => format!("{:.2?} / {:?}", outcome.elapsed, b),
        None => format!("{:.2?}", outcome.elapsed),
    };
    println!("[{}] {id:>2}. {name} ({timing})", if ok { "PASS" } else { "FAIL" });
    for f in outcome.failures.iter().take(5) {
        println!("       {f}");
    }
    if over {
        println!("       over the time budget");
    }
    ok
}

fn record(failures: &mut Vec<String>, label: String, report: fredholm_core::Result<IdentityReport>) {
    match report {
        Ok(r) => failures.extend(r.failures().map(|c| format!("{label}: {c}"))),
        Err(e) => failures.push(format!("{label}: {e}")),
    }
}

fn expect(failures: &mut Vec<String>, ok: bool, what: impl FnOnce() -> String) {
    if !ok {
        failures.push(what());
    }
}

fn stacked_rank(a: &Subspace64, b: &Subspace64) -> usize {
    let mut m = Matrix64::zeros(a.ambient_dim(), a.dim() + b.dim());
    m.columns_mut(0, a.dim()).copy_from(a.basis());
    m.columns_mut(a.dim(), b.dim()).copy_from(b.basis());
    numerical_rank(&m, &tol()).unwrap()
}

/// 500 random extension pairs: the index formula and the kernel/cokernel
/// sequences from the library, against rank–nullity of `A′` on the domain
/// of the realization.
fn operator_instances(failures: &mut Vec<String>, sequences: &mut Vec<String>) {
    let t = tol();
    for trial in 0..500 {
        let mut rng = trial_rng(SEED, 100 + trial);
        let n = rng.random_range(1..=8);
        let op = random_operator_pair::<f64, _>(&mut rng, n, &t);
        let p = op.graphs(&t).unwrap();
        let l = random_subspace_in(&mut rng, p.beta());
        let report = match point_index_report(&op, &l, &t) {
            Ok(r) => r,
            Err(e) => {
                failures.push(format!("trial {trial}: {e}"));
                continue;
            }
        };
        for c in report.failures() {
            let target = if c.name.ends_with("_sequence") { &mut *sequences } else { &mut *failures };
            target.push(format!("trial {trial}: {c}"));
        }
        // oracle: A_L = A′ restricted to the first components of γ⁻¹L
        let graph = p.pull_back(&l).unwrap();
        let dom = Subspace64::span(&graph.basis().rows(0, n).into_owned(), &t).unwrap();
        let image_rank = numerical_rank(&(op.action() * dom.basis()), &t).unwrap();
        let (ker, coker) = (dom.dim() - image_rank, n - image_rank);
        let real = realization(&op, &l, &t).unwrap();
        let expected = (l.dim() + op.dom_min().dim()) as i64 - n as i64;
        expect(failures, real.index == expected && ker as i64 - coker as i64 == expected, || {
            format!("trial {trial}: index {} vs rank–nullity {expected}", real.index)
        });
        expect(sequences, real.kernel.dim() == ker && real.coker_dim == coker, || {
            format!("trial {trial}: ker/coker {}/{} vs oracle {ker}/{coker}", real.kernel.dim(), real.coker_dim)
        });
    }
}

fn main() {
    let t = tol();
    let mut all = Vec::new();

    let mut sequence_failures = Vec::new();
    all.push(criterion(1, "index formula on 500 operator pairs, n <= 8", Some(10), |f| {
        operator_instances(f, &mut sequence_failures)
    }));
    all.push(criterion(2, "kernel and cokernel sequences on the same instances", None, |f| {
        f.append(&mut sequence_failures)
    }));

    all.push(criterion(3, "pull-back/push-forward calculus on 500 nested pairs, dim <= 12", None, |f| {
        for trial in 0..500 {
            let mut rng = trial_rng(SEED, 1_000 + trial);
            let n = rng.random_range(2..=12);
            let p = random_nested::<f64, _>(&mut rng, n, &t);
            let m = if trial % 2 == 0 {
                random_transversal(&mut rng, &p)
            } else {
                random_subspace_in(&mut rng, &Subspace64::full(n))
            };
            let l = random_subspace_in(&mut rng, p.beta());
            record(f, format!("trial {trial}"), relative_pair_report(&p, &m, &l));
            let lifted = p.pull_back(&l).unwrap();
            let nn = p.push_forward(&m);
            let gap = gap_distance(&p.push_forward(&lifted), &l);
            expect(f, gap <= 1e-8, || format!("trial {trial}: push-pull gap {gap:e}"));
            let cap = |a: &Subspace64, b: &Subspace64| a.dim() + b.dim() - stacked_rank(a, b);
            let big_cap = cap(&lifted, &m);
            let big_codim = n - stacked_rank(&lifted, &m);
            let small_cap = cap(&l, &nn);
            let small_codim = p.beta().dim() - stacked_rank(&l, &nn);
            let k = cap(&m, p.gamma_min());
            let kp = n - stacked_rank(p.gamma_max(), &m);
            expect(f, big_cap == k + small_cap && big_codim == kp + small_codim, || {
                format!("trial {trial}: sequences {big_cap}={k}+{small_cap}, {big_codim}={kp}+{small_codim}")
            });
            if k == 0 && kp == 0 {
                let big_fredholm = big_cap == 0 && big_codim == 0;
                let small_fredholm = small_cap == 0 && small_codim == 0;
                expect(f, big_fredholm == small_fredholm, || format!("trial {trial}: transversality transfer"));
            }
        }
    }));

    all.push(criterion(4, "straight-line homotopy on 100 transversal instances, 32 samples", None, |f| {
        for trial in 0..100 {
            let mut rng = trial_rng(SEED, 2_000 + trial);
            record(f, format!("trial {trial}"), tn_trial(&mut rng, 12, 32, &t));
        }
    }));

    all.push(criterion(5, "K/K' defect identity on 200 non-transversal instances", None, |f| {
        for trial in 0..200 {
            let mut rng = trial_rng(SEED, 3_000 + trial);
            record(f, format!("trial {trial}"), defect_trial(&mut rng, 12, &t));
        }
    }));

    all.push(criterion(6, "Cayley coherence on 100 Hermitian matrices, n <= 8", None, |f| {
        for trial in 0..100 {
            let mut rng = trial_rng(SEED, 4_000 + trial);
            let n = rng.random_range(1..=8);
            let eigs: Vec<f64> = (0..n).map(|_| rng.random_range(-10.0..10.0)).collect();
            let u = random_unitary::<f64, _>(&mut rng, n);
            let diag = |g: &dyn Fn(f64) -> C<f64>| {
                let d: Vec<C<f64>> = eigs.iter().map(|&x| g(x)).collect();
                &u * Matrix64::from_diagonal(&d.into()) * u.adjoint()
            };
            let a = diag(&|x| C::new(x, 0.0));
            let a = (&a + a.adjoint()) * C::new(0.5, 0.0);
            let i = C::new(0.0, 1.0);
            let expected = diag(&|x| (C::new(x, 0.0) - i) / (C::new(x, 0.0) + i));
            let sp = SymplecticSpace64::standard(n, &t);
            let graph = graph_of(&a, &Subspace64::full(n));
            let kappa = sp.kappa(&graph).unwrap();
            let c = cayley(&a, &t).unwrap();
            let (d1, d2) = (spectral_norm(&(&kappa - &c)), spectral_norm(&(&c - &expected)));
            expect(f, d1 <= 1e-10 && d2 <= 1e-10, || format!("trial {trial}: {d1:e}, {d2:e}"));
        }
        for n in 1..=8 {
            record(f, format!("endpoints n={n}"), cayley_endpoints(n, &t));
        }
    }));

    all.push(criterion(7, "Lagrangian pair arithmetic on 200 pairs", None, |f| {
        for trial in 0..200 {
            let mut rng = trial_rng(SEED, 5_000 + trial);
            record(f, format!("trial {trial}"), lagrangian_pair_trial(&mut rng, 12, &t));
        }
    }));

    all.push(criterion(8, "K1 theorem on 50 planted loops in C^8, 128 samples", Some(30), |f| {
        for trial in 0..50u64 {
            let mut rng = trial_rng(SEED, 6_000 + trial);
            let gamma_dim = 1 + (trial % 2) as usize;
            let w = (trial % 5) as i64 - 2;
            let label = format!("trial {trial} (dim Γ = {gamma_dim}, w = {w})");
            record(f, label, k1_planted_trial(&mut rng, 4, gamma_dim, w, 128, &t));
        }
        for w in -2..=2 {
            record(f, format!("A = 1 on span{{e1}}, w = {w}"), k1_operator_instance(w, 128, &t));
        }
    }));

    all.push(criterion(9, "winding engine", None, |f| {
        let scalar = |w: i64| {
            SampledLoop::from_fn(64, move |x| Matrix64::from_element(1, 1, C::from_polar(1.0, TAU * w as f64 * x)))
        };
        let pair = SampledLoop::from_fn(64, |x| {
            Matrix64::from_diagonal(&vec![C::from_polar(1.0, TAU * x), C::from_polar(1.0, -TAU * x)].into())
        });
        let cases = [
            ("e^{it}", winding_number(&scalar(1), None, &t), 1),
            ("diag(e^{it}, e^{-it})", winding_number(&pair, None, &t), 0),
            ("reversal", winding_number(&scalar(1).reversed(), None, &t), -1),
            ("concatenation", winding_number(&scalar(2).concat(&scalar(-1)), None, &t), 1),
            ("concatenation (matrix)", winding_number(&pair.concat(&scalar(1).map(|u| {
                Matrix64::from_diagonal(&vec![u[(0, 0)], C::new(1.0, 0.0)].into())
            })), None, &t), 1),
        ];
        for (name, r, want) in cases {
            match r {
                Ok(r) => {
                    let drift = (r.total_phase / TAU - want as f64).abs();
                    expect(f, r.winding == want && drift <= 1e-6, || {
                        format!("{name}: winding {} (drift {drift:e}), expected {want}", r.winding)
                    });
                }
                Err(e) => f.push(format!("{name}: {e}")),
            }
        }
    }));

    all.push(criterion(10, "determinism across runs and thread counts", None, |f| {
        let run = |threads: Option<&str>| {
            let mut cmd = Command::new(env!("CARGO_BIN_EXE_fredholm-lab"));
            if let Some(n) = threads {
                cmd.args(["--threads", n]);
            }
            cmd.args(["verify", "--seed", "11", "--trials", "20", "--dim-max", "8"]);
            cmd.env_remove("FREDHOLM_LAB_SEED");
            let out = cmd.output().expect("run fredholm-lab");
            (out.status.code(), out.stdout)
        };
        let reference = run(None);
        expect(f, reference.0 == Some(0), || format!("exit status {:?}", reference.0));
        for (label, threads) in [("rerun", None), ("1 thread", Some("1")), ("3 threads", Some("3"))] {
            let other = run(threads);
            expect(f, other == reference, || format!("{label}: report differs"));
        }
    }));

    let passed = all.iter().filter(|&&ok| ok).count();
    println!("acceptance: {passed}/{} criteria passed", all.len());
    if passed != all.len() {
        std::process::exit(1);
    }
}

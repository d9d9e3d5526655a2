mod common;

use std::sync::Arc;

use lbsphere::optim::prox::{quartic_residual, sis_residual, NormEquation};
use lbsphere::optim::search::{bb_step, BbVariant};
use lbsphere::optim::{
    minimize, minimize_observed, IterationEvent, Method, NewtonControl, Observer,
    OptimizerConfig, ProxEvent, ProxKind,
};
use lbsphere::pma::random_field;
use lbsphere::sht::ShtPlan;
use lbsphere::{Complex64, GradientVariant, Model, ModelParams, SpectralField};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn model() -> Model {
    let plan = Arc::new(ShtPlan::minimal(31));
    Model::new(plan, ModelParams::new(1.0, -1.0, 0.8, 42f64.sqrt()), GradientVariant::Squared)
}

fn start() -> SpectralField {
    let mut c = random_field(31, 2024);
    c.scale(4.0);
    c
}

fn config(method: Method) -> OptimizerConfig {
    let alpha0 = match method {
        Method::Sis | Method::Nesterov => 0.3,
        _ => 0.05,
    };
    OptimizerConfig {
        alpha0,
        max_iter: 150,
        ..Default::default()
    }
}

#[derive(Default)]
struct Recorder {
    mass_violations: usize,
    iterations: Vec<(f64, bool)>,
    worst_residual: f64,
    accepted_prox: usize,
}

struct Instrumented<'a> {
    model: &'a Model,
    rec: Recorder,
}

impl Observer for Instrumented<'_> {
    fn on_prox(&mut self, e: &ProxEvent<'_>) {
        if !e.accepted {
            return;
        }
        let r = match e.kind {
            ProxKind::SemiImplicit => sis_residual(e.psi, e.grad_f_psi, e.alpha, e.z, self.model),
            ProxKind::Quartic(b) => quartic_residual(e.psi, e.grad_f_psi, e.alpha, e.z, self.model, b),
        };
        self.rec.worst_residual = self.rec.worst_residual.max(r);
        self.rec.accepted_prox += 1;
        if e.z.coeffs()[0] != Complex64::new(0.0, 0.0) {
            self.rec.mass_violations += 1;
        }
    }

    fn on_iteration(&mut self, e: &IterationEvent<'_>) {
        if e.iterate.coeffs()[0] != Complex64::new(0.0, 0.0) {
            self.rec.mass_violations += 1;
        }
        self.rec.iterations.push((e.energy, e.restart));
    }
}

fn instrumented_run(method: Method) -> (Recorder, f64) {
    let m = model();
    let c0 = start();
    let mut obs = Instrumented {
        model: &m,
        rec: Recorder::default(),
    };
    let out = minimize_observed(&m, &c0, method, &config(method), &mut obs).unwrap();
    let e0 = m.energy(&lbsphere::model::project_mass(&c0)).unwrap().total;
    assert!(out.field.coeffs()[0] == Complex64::new(0.0, 0.0));
    (obs.rec, e0)
}

#[test]
fn mass_is_conserved_exactly_by_every_method() {
    for method in Method::ALL {
        let (rec, _) = instrumented_run(method);
        assert!(!rec.iterations.is_empty(), "{method} took no steps");
        assert_eq!(rec.mass_violations, 0, "{method} moved the (0, 0) coefficient");
    }
}

#[test]
fn accepted_proximal_steps_solve_their_equations() {
    for method in [
        Method::Sis,
        Method::Asis,
        Method::Nesterov,
        Method::ANesterov,
        Method::AaBpg2,
        Method::AaBpg4,
    ] {
        let (rec, _) = instrumented_run(method);
        assert!(rec.accepted_prox > 0);
        assert!(rec.worst_residual < 1e-10, "{method}: residual {:e}", rec.worst_residual);
    }
}

#[test]
fn aabpg_accepted_energies_never_increase() {
    for method in [Method::AaBpg2, Method::AaBpg4] {
        let (rec, e0) = instrumented_run(method);
        let mut last = e0;
        for (i, (e, restart)) in rec.iterations.iter().enumerate() {
            if *restart {
                continue;
            }
            assert!(*e <= last, "{method}: energy rose at iteration {}: {last} -> {e}", i + 1);
            last = *e;
        }
    }
}

#[test]
fn descent_baselines_never_increase_energy() {
    for method in [Method::Agd, Method::Asis] {
        let (rec, e0) = instrumented_run(method);
        let mut last = e0;
        for (e, _) in rec.iterations {
            assert!(e <= last + 1e-13, "{method}: {last} -> {e}");
            last = e;
        }
    }
}

#[test]
fn nesterov_without_momentum_is_sis() {
    let m = model();
    let c0 = start();
    let cfg = OptimizerConfig {
        w_bar: Some(0.0),
        ..config(Method::Nesterov)
    };
    let a = minimize(&m, &c0, Method::Nesterov, &cfg).unwrap();
    let b = minimize(&m, &c0, Method::Sis, &cfg).unwrap();
    assert_eq!(a.iterations, b.iterations);
    assert_eq!(a.field, b.field);
    for (x, y) in a.trace.records.iter().zip(&b.trace.records) {
        assert_eq!(x.energy, y.energy);
    }
}

#[test]
fn loose_tolerance_stops_before_the_first_step() {
    let m = model();
    let cfg = OptimizerConfig {
        tol: 1e3,
        ..Default::default()
    };
    for method in Method::ALL {
        let out = minimize(&m, &start(), method, &cfg).unwrap();
        assert!(out.converged);
        assert_eq!(out.iterations, 0);
    }
}

#[test]
fn convex_case_relaxes_to_zero() {
    let plan = Arc::new(ShtPlan::minimal(15));
    let m = Model::new(plan, ModelParams::new(1.0, 0.5, 0.0, 42f64.sqrt()), GradientVariant::Squared);
    let mut c0 = random_field(15, 3);
    c0.scale(0.1);
    let cfg = OptimizerConfig {
        alpha0: 0.5,
        ..Default::default()
    };
    for method in [Method::Sis, Method::Asis, Method::AaBpg2] {
        let out = minimize(&m, &c0, method, &cfg).unwrap();
        assert!(out.converged, "{method}");
        assert!(out.field.norm() < 1e-5, "{method}: {}", out.field.norm());
    }
}

/// Independent oracle: bisection on the monotone function `h` over `[0, h(0)]`.
fn bisect(weights: &[f64], offsets: &[f64], a: f64) -> f64 {
    let h = |r: f64| {
        weights
            .iter()
            .zip(offsets)
            .map(|(s, o)| s / ((o + a * r) * (o + a * r)))
            .sum::<f64>()
            - r
    };
    let (mut lo, mut hi) = (0.0f64, h(0.0));
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if h(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn newton_root_matches_bisection() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for case in 0..50 {
        let k = rng.gen_range(1..200);
        let weights: Vec<f64> = (0..k).map(|_| rng.gen_range(0.0..2.0)).collect();
        let offsets: Vec<f64> = (0..k).map(|_| rng.gen_range(0.2..5.0)).collect();
        let a = rng.gen_range(1e-3..1.0);
        let eq = NormEquation::new(weights.clone(), offsets.clone(), a);
        let newton = eq
            .solve_newton(0.0, NewtonControl::default())
            .expect("Newton converges");
        let oracle = bisect(&weights, &offsets, a);
        assert!(
            (newton - oracle).abs() <= 1e-12 * oracle.max(1.0),
            "case {case}: newton {newton} bisection {oracle}"
        );
        let own = eq.solve_bisection(1e-15).unwrap();
        assert!((own - oracle).abs() <= 1e-12 * oracle.max(1.0));
    }
}

#[test]
fn bb_steps_on_simple_quadratics() {
    let d = random_field(7, 1);
    assert_eq!(bb_step(&d, &d, BbVariant::Long), Some(1.0));
    assert_eq!(bb_step(&d, &d, BbVariant::Short), Some(1.0));
    let e = d.scaled(2.0);
    assert!((bb_step(&d, &e, BbVariant::Long).unwrap() - 0.5).abs() < 1e-15);
    assert_eq!(bb_step(&d, &d.scaled(-1.0), BbVariant::Long), None);
    assert_eq!(bb_step(&SpectralField::zeros(7), &d, BbVariant::Long), None);
}

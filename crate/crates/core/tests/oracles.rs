mod common;

use std::sync::Arc;

use lbsphere::model::project_mass;
use lbsphere::sht::{GridField, ShtPlan};
use lbsphere::wigner::{direct_nonlinear_energy, triple_coeff};
use lbsphere::{Complex64, GradientVariant, Model, ModelParams};

use common::random_coeffs;

#[test]
fn pseudo_spectral_polynomial_energy_matches_direct_convolution() {
    let params = ModelParams::new(1.0, -0.7, 0.8, 30f64.sqrt());
    for n in [4, 6, 8] {
        let plan = Arc::new(ShtPlan::minimal(n));
        let model = Model::new(plan, params, GradientVariant::Squared);
        for seed in 0..10 {
            let mut c = random_coeffs(n, 100 * n as u64 + seed, 0.5);
            if seed % 2 == 0 {
                c = project_mass(&c);
            }
            let direct = direct_nonlinear_energy(&c, &params).unwrap();
            let spectral = model.energy(&c).unwrap().f;
            let rel = (direct - spectral).abs() / spectral.abs();
            assert!(rel < 1e-10, "N={n} seed={seed}: {direct} vs {spectral} (rel {rel:e})");
        }
    }
}

/// `Y_l^m` values on the grid, as complex numbers in row-major order.
fn harmonic(p: &ShtPlan, l: usize, m: i64) -> Vec<Complex64> {
    let g = p.grid();
    let ma = m.unsigned_abs() as usize;
    let sign = if m < 0 && ma % 2 == 1 { -1.0 } else { 1.0 };
    let mut out = Vec::with_capacity(g.n_theta() * g.n_phi());
    for j in 0..g.n_theta() {
        let leg = sign * p.legendre(l, ma, j);
        for &phi in g.phis() {
            out.push(Complex64::from_polar(leg, m as f64 * phi));
        }
    }
    out
}

#[test]
fn triple_coefficients_match_quadrature() {
    let lmax = 5usize;
    let plan = ShtPlan::minimal(lmax);
    let g = plan.grid();
    let (nt, np) = (g.n_theta(), g.n_phi());
    let mut table = Vec::new();
    for l in 0..=lmax {
        for m in -(l as i64)..=(l as i64) {
            table.push((l, m, harmonic(&plan, l, m)));
        }
    }
    let integrate = |v: Vec<f64>| g.integrate(&GridField::from_values(nt, np, v).unwrap());
    let mut checked = 0;
    let mut worst: f64 = 0.0;
    for (l1, m1, y1) in &table {
        for (l2, m2, y2) in &table {
            let y12: Vec<Complex64> = y1.iter().zip(y2).map(|(a, b)| a * b).collect();
            for l3 in 0..=lmax {
                let m3 = -(m1 + m2);
                if m3.unsigned_abs() as usize > l3 {
                    continue;
                }
                let y3 = &table.iter().find(|t| t.0 == l3 && t.1 == m3).unwrap().2;
                let prod: Vec<Complex64> = y12.iter().zip(y3).map(|(a, b)| a * b).collect();
                let re = integrate(prod.iter().map(|v| v.re).collect());
                let im = integrate(prod.iter().map(|v| v.im).collect());
                let c = triple_coeff(*l1, *l2, l3, *m1, *m2, m3).unwrap();
                worst = worst.max((re - c).abs()).max(im.abs());
                checked += 1;
            }
        }
    }
    assert!(checked > 1000);
    assert!(worst < 1e-11, "worst deviation {worst:e}");
}

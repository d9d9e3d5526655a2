#![allow(dead_code)]

use lbsphere::{Complex64, SpectralField};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Uniform(-1, 1) real and imaginary parts on every stored coefficient,
/// each degree damped by `1 / (1 + l)^decay`.
pub fn random_coeffs(bandlimit: usize, seed: u64, decay: f64) -> SpectralField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut f = SpectralField::zeros(bandlimit);
    let degrees: Vec<usize> = f.degrees().collect();
    for (v, l) in f.coeffs_mut().iter_mut().zip(degrees) {
        let damp = (1.0 + l as f64).powf(-decay);
        *v = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * damp;
    }
    SpectralField::from_storage(bandlimit, f.coeffs().to_vec()).unwrap()
}

pub fn max_abs_diff(a: &SpectralField, b: &SpectralField) -> f64 {
    a.coeffs()
        .iter()
        .zip(b.coeffs())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

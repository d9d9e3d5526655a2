//! Proximal (Bregman) updates for the composite energy `G + F`, where the
//! quadratic operator `G` is treated implicitly.

use num_complex::Complex64;

use crate::model::Model;
use crate::sht::SpectralField;

/// Coefficients of the quartic Bregman generator `a/4 |x|^4 + b/2 |x|^2 + 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuarticBregman {
    pub a: f64,
    pub b: f64,
}

/// Controls for the scalar Newton solve inside [`prox_step_quartic`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonControl {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for NewtonControl {
    fn default() -> Self {
        Self {
            tol: 1e-14,
            max_iter: 50,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum ProxError {
    #[error("quartic proximal equation has no admissible root (denominator not positive)")]
    Singular,
    #[error("quartic proximal equation did not converge")]
    NoConvergence,
}

/// Semi-implicit step `z = (alpha D + I)^{-1} (psi - alpha grad_f)`, with the
/// `(0, 0)` entry pinned to zero (Lagrange multiplier of the mass constraint).
pub fn prox_step_sis(
    psi: &SpectralField,
    grad_f_psi: &SpectralField,
    alpha: f64,
    model: &Model,
) -> SpectralField {
    let mut z = psi.clone();
    for ((zv, g), d) in z
        .coeffs_mut()
        .iter_mut()
        .zip(grad_f_psi.coeffs())
        .zip(model.diagonal())
    {
        *zv = (*zv - g * alpha) / (alpha * d + 1.0);
    }
    z.coeffs_mut()[0] = Complex64::new(0.0, 0.0);
    z
}

/// Sup-norm residual of `alpha (D z + grad_f) + (z - psi) = 0` away from `(0, 0)`.
pub fn sis_residual(
    psi: &SpectralField,
    grad_f_psi: &SpectralField,
    alpha: f64,
    z: &SpectralField,
    model: &Model,
) -> f64 {
    z.coeffs()
        .iter()
        .zip(psi.coeffs())
        .zip(grad_f_psi.coeffs())
        .zip(model.diagonal())
        .skip(1)
        .map(|(((zv, p), g), d)| ((zv * d + g) * alpha + zv - p).norm())
        .fold(0.0, f64::max)
}

/// The scalar equation `h(r) = sum_k s_k / (o_k + a r)^2 - r = 0` satisfied by
/// `r = |z|^2` in the quartic proximal step. `s_k` already carries the
/// multiplicity of each stored coefficient.
#[derive(Debug, Clone)]
pub struct NormEquation {
    weights: Vec<f64>,
    offsets: Vec<f64>,
    a: f64,
}

impl NormEquation {
    pub fn new(weights: Vec<f64>, offsets: Vec<f64>, a: f64) -> Self {
        assert_eq!(weights.len(), offsets.len());
        Self {
            weights,
            offsets,
            a,
        }
    }

    /// Smallest denominator at `r = 0`; the equation is well posed when positive.
    pub fn min_offset(&self) -> f64 {
        self.offsets
            .iter()
            .zip(&self.weights)
            .filter(|(_, w)| **w > 0.0)
            .map(|(o, _)| *o)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn value(&self, r: f64) -> f64 {
        self.weights
            .iter()
            .zip(&self.offsets)
            .map(|(s, o)| s / (o + self.a * r).powi(2))
            .sum::<f64>()
            - r
    }

    pub fn derivative(&self, r: f64) -> f64 {
        -2.0 * self.a
            * self
                .weights
                .iter()
                .zip(&self.offsets)
                .map(|(s, o)| s / (o + self.a * r).powi(3))
                .sum::<f64>()
            - 1.0
    }

    /// Newton iteration from `r0`, clamped to `r >= 0`.
    pub fn solve_newton(&self, r0: f64, ctl: NewtonControl) -> Option<f64> {
        let mut r = r0.max(0.0);
        for _ in 0..ctl.max_iter {
            let h = self.value(r);
            let dh = self.derivative(r);
            if !h.is_finite() || !dh.is_finite() || dh == 0.0 {
                return None;
            }
            let next = (r - h / dh).max(0.0);
            let step = (next - r).abs();
            r = next;
            if step <= ctl.tol * r.max(1.0) {
                return Some(r);
            }
        }
        None
    }

    /// Bisection on `[0, h(0)]`, which brackets the root since `h(r) <= h(0) - r`.
    pub fn solve_bisection(&self, tol: f64) -> Option<f64> {
        let h0 = self.value(0.0);
        if !h0.is_finite() {
            return None;
        }
        if h0 <= 0.0 {
            return Some(0.0);
        }
        let (mut lo, mut hi) = (0.0, h0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.value(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= tol * hi.max(1.0) {
                break;
            }
        }
        Some(0.5 * (lo + hi))
    }
}

/// Quartic-Bregman proximal step: solves
/// `z = (alpha D + (a|z|^2 + b) I)^{-1} ((a|psi|^2 + b) psi - alpha grad_f)`
/// by reducing it to the scalar equation for `r = |z|^2`.
pub fn prox_step_quartic(
    psi: &SpectralField,
    grad_f_psi: &SpectralField,
    alpha: f64,
    model: &Model,
    bregman: QuarticBregman,
    ctl: NewtonControl,
) -> Result<SpectralField, ProxError> {
    let QuarticBregman { a, b } = bregman;
    let psi_sq = psi.norm_sqr();
    let scale = a * psi_sq + b;
    let n = psi.bandlimit();

    let mut rhs = psi.scaled(scale);
    rhs.axpy(-alpha, grad_f_psi);
    rhs.coeffs_mut()[0] = Complex64::new(0.0, 0.0);

    let offsets: Vec<f64> = model.diagonal().iter().map(|d| alpha * d + b).collect();
    let weights: Vec<f64> = rhs
        .coeffs()
        .iter()
        .enumerate()
        .map(|(k, v)| if k <= n { v.norm_sqr() } else { 2.0 * v.norm_sqr() })
        .collect();
    let eq = NormEquation::new(weights, offsets, a);
    if !(eq.min_offset() > 0.0) {
        return Err(ProxError::Singular);
    }
    let r = eq
        .solve_newton(psi_sq, ctl)
        .or_else(|| eq.solve_bisection(ctl.tol))
        .ok_or(ProxError::NoConvergence)?;

    let mut z = rhs;
    for (zv, o) in z.coeffs_mut().iter_mut().zip(&eq.offsets) {
        *zv /= o + a * r;
    }
    z.coeffs_mut()[0] = Complex64::new(0.0, 0.0);
    Ok(z)
}

/// Sup-norm residual of
/// `alpha D z + alpha grad_f + (a|z|^2 + b) z - (a|psi|^2 + b) psi = 0` away from `(0, 0)`.
pub fn quartic_residual(
    psi: &SpectralField,
    grad_f_psi: &SpectralField,
    alpha: f64,
    z: &SpectralField,
    model: &Model,
    bregman: QuarticBregman,
) -> f64 {
    let sz = bregman.a * z.norm_sqr() + bregman.b;
    let sp = bregman.a * psi.norm_sqr() + bregman.b;
    z.coeffs()
        .iter()
        .zip(psi.coeffs())
        .zip(grad_f_psi.coeffs())
        .zip(model.diagonal())
        .skip(1)
        .map(|(((zv, p), g), d)| (zv * (alpha * d) + g * alpha + zv * sz - p * sp).norm())
        .fold(0.0, f64::max)
}

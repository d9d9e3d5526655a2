//! Discretized Landau-Brazovskii energy on the sphere and its gradient.
//!
//! The optimization variable is a [`SpectralField`]. The quadratic operator
//! part is diagonal in `(l, m)`; the polynomial part is evaluated
//! pseudo-spectrally (synthesize, pointwise powers, quadrature / analyze).

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::Result;
use crate::sht::{GridField, ShtPlan, SpectralField};

/// Factor applied to the unit-sphere integrals `G_h + F_h` when reporting
/// energies: `1/sqrt(4 pi)`, the projection of the energy density onto
/// `Y_0^0`. Gradients are taken with respect to the unscaled sums, which is
/// the scale the step sizes and the stopping tolerance refer to.
pub const ENERGY_NORMALIZATION: f64 = 0.282_094_791_773_878_14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    /// Bare correlation length.
    pub xi: f64,
    /// Temperature-like coefficient of the quadratic term.
    pub epsilon: f64,
    /// Cubic coefficient.
    pub lambda: f64,
    /// Sphere radius; enters only through the Laplacian eigenvalues.
    pub radius: f64,
}

impl ModelParams {
    pub fn new(xi: f64, epsilon: f64, lambda: f64, radius: f64) -> Self {
        Self {
            xi,
            epsilon,
            lambda,
            radius,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.xi > 0.0) || !self.xi.is_finite() {
            return Err(crate::Error::Config(format!("xi must be positive, got {}", self.xi)));
        }
        if !(self.radius > 0.0) || !self.radius.is_finite() {
            return Err(crate::Error::Config(format!(
                "radius must be positive, got {}",
                self.radius
            )));
        }
        if !self.epsilon.is_finite() || !self.lambda.is_finite() {
            return Err(crate::Error::Config("epsilon and lambda must be finite".into()));
        }
        Ok(())
    }

    /// `1 - l(l+1)/R^2`
    pub fn operator_factor(&self, l: usize) -> f64 {
        let l = l as f64;
        1.0 - l * (l + 1.0) / (self.radius * self.radius)
    }
}

/// Which diagonal enters the gradient of the quadratic part and the
/// semi-implicit proximal operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GradientVariant {
    /// `xi^2 (1 - l(l+1)/R^2)^2`, the exact derivative of the energy.
    #[default]
    Squared,
    /// `xi^2 (1 - l(l+1)/R^2)`, as the update formula is sometimes printed.
    PaperLiteral,
}

impl std::str::FromStr for GradientVariant {
    type Err = crate::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "squared" => Ok(Self::Squared),
            "paper_literal" | "literal" => Ok(Self::PaperLiteral),
            _ => Err(crate::Error::Config(format!("unknown gradient variant '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyBreakdown {
    /// Quadratic operator part.
    pub g: f64,
    /// Polynomial part.
    pub f: f64,
    pub total: f64,
}

/// Energy evaluator bound to a transform plan and parameter set.
#[derive(Debug, Clone)]
pub struct Model {
    plan: Arc<ShtPlan>,
    params: ModelParams,
    variant: GradientVariant,
    /// `xi^2 (1 - l(l+1)/R^2)^2` per storage slot.
    energy_diag: Vec<f64>,
    /// Diagonal used by the gradient and proximal steps.
    grad_diag: Vec<f64>,
}

/// A point at which the energy has been evaluated; keeps the synthesized
/// grid so the gradient can reuse it.
#[derive(Debug, Clone)]
pub struct Evaluated {
    pub coeffs: SpectralField,
    pub energy: EnergyBreakdown,
    grid: GridField,
}

impl Evaluated {
    pub fn grid(&self) -> &GridField {
        &self.grid
    }
}

impl Model {
    pub fn new(plan: Arc<ShtPlan>, params: ModelParams, variant: GradientVariant) -> Self {
        let probe = SpectralField::zeros(plan.bandlimit());
        let xi2 = params.xi * params.xi;
        let energy_diag = probe
            .degrees()
            .map(|l| xi2 * params.operator_factor(l).powi(2))
            .collect();
        let grad_diag = probe
            .degrees()
            .map(|l| match variant {
                GradientVariant::Squared => xi2 * params.operator_factor(l).powi(2),
                GradientVariant::PaperLiteral => xi2 * params.operator_factor(l),
            })
            .collect();
        Self {
            plan,
            params,
            variant,
            energy_diag,
            grad_diag,
        }
    }

    pub fn plan(&self) -> &Arc<ShtPlan> {
        &self.plan
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn variant(&self) -> GradientVariant {
        self.variant
    }

    pub fn bandlimit(&self) -> usize {
        self.plan.bandlimit()
    }

    /// Per-slot diagonal of the linear operator used in gradients and proximal steps.
    pub fn diagonal(&self) -> &[f64] {
        &self.grad_diag
    }

    fn check(&self, c: &SpectralField) -> Result<()> {
        if c.bandlimit() != self.plan.bandlimit() {
            return Err(crate::Error::Bandlimit {
                plan: self.plan.bandlimit(),
                field: c.bandlimit(),
            });
        }
        Ok(())
    }

    /// Quadratic part from coefficients alone.
    pub fn quadratic_energy(&self, c: &SpectralField) -> f64 {
        let n = c.bandlimit();
        let coeffs = c.coeffs();
        let mut zonal = 0.0;
        let mut rest = 0.0;
        for (k, (v, d)) in coeffs.iter().zip(&self.energy_diag).enumerate() {
            if k <= n {
                zonal += d * v.norm_sqr();
            } else {
                rest += d * v.norm_sqr();
            }
        }
        0.5 * (zonal + 2.0 * rest) * ENERGY_NORMALIZATION
    }

    /// Polynomial part from grid samples.
    pub fn polynomial_energy(&self, grid: &GridField) -> f64 {
        let ModelParams {
            epsilon, lambda, ..
        } = self.params;
        let density = grid.map(|p| {
            let p2 = p * p;
            0.5 * epsilon * p2 - lambda / 6.0 * p2 * p + p2 * p2 / 24.0
        });
        self.plan.grid().integrate(&density) * ENERGY_NORMALIZATION
    }

    pub fn evaluate(&self, c: &SpectralField) -> Result<Evaluated> {
        self.check(c)?;
        let grid = self.plan.synthesize(c)?;
        let g = self.quadratic_energy(c);
        let f = self.polynomial_energy(&grid);
        Ok(Evaluated {
            coeffs: c.clone(),
            energy: EnergyBreakdown { g, f, total: g + f },
            grid,
        })
    }

    pub fn energy(&self, c: &SpectralField) -> Result<EnergyBreakdown> {
        Ok(self.evaluate(c)?.energy)
    }

    /// Gradient of the polynomial part: `eps c - (lambda/2) (phi^2)^ + (1/6) (phi^3)^`.
    pub fn nonlinear_gradient_at(&self, point: &Evaluated) -> SpectralField {
        let ModelParams {
            epsilon, lambda, ..
        } = self.params;
        let nl = point.grid.map(|p| {
            let p2 = p * p;
            -0.5 * lambda * p2 + p2 * p / 6.0
        });
        let mut out = self
            .plan
            .analyze(&nl)
            .expect("grid produced by this plan");
        out.axpy(epsilon, &point.coeffs);
        out
    }

    pub fn nonlinear_gradient(&self, c: &SpectralField) -> Result<SpectralField> {
        let point = self.evaluate(c)?;
        Ok(self.nonlinear_gradient_at(&point))
    }

    /// Full gradient at an already evaluated point.
    pub fn gradient_at(&self, point: &Evaluated) -> SpectralField {
        let mut out = self.nonlinear_gradient_at(point);
        self.add_linear(&point.coeffs, &mut out);
        out
    }

    pub fn gradient(&self, c: &SpectralField) -> Result<SpectralField> {
        let point = self.evaluate(c)?;
        Ok(self.gradient_at(&point))
    }

    /// `out += D c` with the variant's diagonal.
    pub fn add_linear(&self, c: &SpectralField, out: &mut SpectralField) {
        for ((o, v), d) in out
            .coeffs_mut()
            .iter_mut()
            .zip(c.coeffs())
            .zip(&self.grad_diag)
        {
            *o += v * d;
        }
    }
}

/// Zeroes the `(0, 0)` coefficient (zero spatial mean).
pub fn project_mass(c: &SpectralField) -> SpectralField {
    let mut out = c.clone();
    project_mass_in_place(&mut out);
    out
}

pub fn project_mass_in_place(c: &mut SpectralField) {
    c.coeffs_mut()[0] = Complex64::new(0.0, 0.0);
}

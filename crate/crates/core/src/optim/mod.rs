//! Minimizers for the discretized energy under the zero-mean constraint.
//!
//! Every method works on mass-projected coefficient vectors: the `(0, 0)`
//! coefficient is zero on input and stays exactly zero on every iterate.
//! Gradients used for stopping, step-size estimation and descent directions
//! are projected the same way.

mod methods;
pub mod prox;
pub mod search;
pub mod trace;

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::model::Model;
use crate::sht::SpectralField;

pub use methods::{minimize, minimize_observed};
pub use prox::{NewtonControl, ProxError, QuarticBregman};
pub use search::{BbVariant, ShrinkSchedule, StepBounds};
pub use trace::{EnergyTrace, TraceRecord, TRACE_HEADER};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    /// Gradient descent with BB steps and backtracking.
    Agd,
    /// Nonlinear conjugate gradient with a capped PRP coefficient.
    Acg,
    /// Extrapolated semi-implicit step with a fixed step size.
    Nesterov,
    /// Extrapolated semi-implicit step with an adaptive step size.
    ANesterov,
    /// Adaptive Bregman proximal gradient with the quadratic generator.
    AaBpg2,
    /// Adaptive Bregman proximal gradient with the quartic generator.
    AaBpg4,
    /// Semi-implicit scheme with a fixed step size.
    Sis,
    /// Semi-implicit scheme with backtracking on the step size.
    Asis,
}

impl Method {
    pub const ALL: [Method; 8] = [
        Method::Agd,
        Method::Acg,
        Method::Nesterov,
        Method::ANesterov,
        Method::AaBpg2,
        Method::AaBpg4,
        Method::Sis,
        Method::Asis,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Agd => "agd",
            Method::Acg => "acg",
            Method::Nesterov => "nesterov",
            Method::ANesterov => "anesterov",
            Method::AaBpg2 => "aabpg2",
            Method::AaBpg4 => "aabpg4",
            Method::Sis => "sis",
            Method::Asis => "asis",
        }
    }

    /// Methods whose step size is a fixed input rather than searched.
    pub fn fixed_step(self) -> bool {
        matches!(self, Method::Nesterov | Method::Sis)
    }

    /// The proximal-gradient methods take the short BB step; the others
    /// take the long one.
    pub fn default_bb(self) -> BbVariant {
        match self {
            Method::AaBpg2 | Method::AaBpg4 => BbVariant::Short,
            _ => BbVariant::Long,
        }
    }

    /// Without a restart the Nesterov pair needs a small weight cap to stay
    /// stable at large fixed steps.
    pub fn default_w_bar(self) -> f64 {
        match self {
            Method::Nesterov | Method::ANesterov => 0.3,
            _ => 1.0,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect::<String>()
            .to_ascii_lowercase();
        Method::ALL
            .into_iter()
            .find(|m| m.name() == key)
            .ok_or_else(|| Error::Config(format!("unknown method '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerConfig {
    /// Initial step; the fixed step for SIS and Nesterov.
    pub alpha0: f64,
    pub alpha_min: f64,
    pub alpha_max: f64,
    /// Sufficient-decrease constant of the proximal methods.
    pub eta: f64,
    /// Upper bound on the extrapolation weight; `None` takes the method default.
    pub w_bar: Option<f64>,
    pub bregman: QuarticBregman,
    /// Stopping tolerance on the sup-norm of the projected gradient.
    pub tol: f64,
    pub max_iter: usize,
    /// Conjugate-gradient direction reset threshold.
    pub direction_bound: f64,
    pub newton: NewtonControl,
    /// BB formula for the initial trial step; `None` takes the method default.
    pub bb: Option<BbVariant>,
    pub shrink: ShrinkSchedule,
    pub record_trace: bool,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            alpha0: 0.1,
            alpha_min: 1e-5,
            alpha_max: 5.0,
            eta: 1e-14,
            w_bar: None,
            bregman: QuarticBregman { a: 0.01, b: 1.0 },
            tol: 1e-6,
            max_iter: 100_000,
            direction_bound: 100.0,
            newton: NewtonControl::default(),
            bb: None,
            shrink: ShrinkSchedule::default(),
            record_trace: true,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self, method: Method) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} must be positive, got {v}")))
            }
        };
        positive("alpha0", self.alpha0)?;
        positive("tol", self.tol)?;
        if !method.fixed_step() {
            positive("alpha_min", self.alpha_min)?;
            positive("alpha_max", self.alpha_max)?;
            if self.alpha_min > self.alpha_max {
                return Err(Error::Config(format!(
                    "alpha_min ({}) exceeds alpha_max ({})",
                    self.alpha_min, self.alpha_max
                )));
            }
        }
        if !(self.eta >= 0.0) {
            return Err(Error::Config(format!("eta must be nonnegative, got {}", self.eta)));
        }
        let w_bar = self.w_bar(method);
        if !(0.0..=1.0).contains(&w_bar) {
            return Err(Error::Config(format!("w_bar must lie in [0, 1], got {w_bar}")));
        }
        if method == Method::AaBpg4 && !(self.bregman.a > 0.0 && self.bregman.b > 0.0) {
            return Err(Error::Config(
                "quartic Bregman coefficients a and b must be positive".into(),
            ));
        }
        positive("direction_bound", self.direction_bound)?;
        let s = self.shrink;
        if !(s.early > 0.0 && s.early < 1.0 && s.late > 0.0 && s.late < 1.0) {
            return Err(Error::Config("shrink factors must lie in (0, 1)".into()));
        }
        Ok(())
    }

    pub fn w_bar(&self, method: Method) -> f64 {
        self.w_bar.unwrap_or_else(|| method.default_w_bar())
    }

    pub fn bb(&self, method: Method) -> BbVariant {
        self.bb.unwrap_or_else(|| method.default_bb())
    }

    pub fn bounds(&self) -> StepBounds {
        StepBounds {
            initial: self.alpha0,
            min: self.alpha_min,
            max: self.alpha_max,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub method: Method,
    pub field: SpectralField,
    pub energy: f64,
    pub grad_sup: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Momentum restarts (proximal methods) or direction resets (ACG).
    pub restarts: usize,
    pub seconds: f64,
    pub trace: EnergyTrace,
}

/// Which proximal map produced a candidate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProxKind {
    SemiImplicit,
    Quartic(QuarticBregman),
}

/// A proximal step as taken by one iteration, reported after the
/// acceptance decision.
#[derive(Debug)]
pub struct ProxEvent<'a> {
    pub iter: usize,
    pub kind: ProxKind,
    pub psi: &'a SpectralField,
    pub grad_f_psi: &'a SpectralField,
    pub alpha: f64,
    pub z: &'a SpectralField,
    pub accepted: bool,
}

#[derive(Debug)]
pub struct IterationEvent<'a> {
    /// Number of completed iterations.
    pub iter: usize,
    pub iterate: &'a SpectralField,
    pub energy: f64,
    pub grad_sup: f64,
    pub alpha: f64,
    pub restart: bool,
    pub backtracks: usize,
    /// The step search ended on the lower step bound.
    pub floored: bool,
}

/// Instrumentation hooks; both default to no-ops.
pub trait Observer {
    fn on_prox(&mut self, _event: &ProxEvent<'_>) {}
    fn on_iteration(&mut self, _event: &IterationEvent<'_>) {}
}

impl Observer for () {}

pub fn run_agd(model: &Model, c0: &SpectralField, cfg: &OptimizerConfig) -> Result<RunOutcome> {
    minimize(model, c0, Method::Agd, cfg)
}

pub fn run_acg(model: &Model, c0: &SpectralField, cfg: &OptimizerConfig) -> Result<RunOutcome> {
    minimize(model, c0, Method::Acg, cfg)
}

pub fn run_nesterov(model: &Model, c0: &SpectralField, cfg: &OptimizerConfig) -> Result<RunOutcome> {
    minimize(model, c0, Method::Nesterov, cfg)
}

pub fn run_anesterov(
    model: &Model,
    c0: &SpectralField,
    cfg: &OptimizerConfig,
) -> Result<RunOutcome> {
    minimize(model, c0, Method::ANesterov, cfg)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BregmanOrder {
    M2,
    M4,
}

pub fn run_aabpg(
    model: &Model,
    c0: &SpectralField,
    cfg: &OptimizerConfig,
    order: BregmanOrder,
) -> Result<RunOutcome> {
    let method = match order {
        BregmanOrder::M2 => Method::AaBpg2,
        BregmanOrder::M4 => Method::AaBpg4,
    };
    minimize(model, c0, method, cfg)
}

pub fn run_sis(model: &Model, c0: &SpectralField, cfg: &OptimizerConfig) -> Result<RunOutcome> {
    minimize(model, c0, Method::Sis, cfg)
}

pub fn run_asis(model: &Model, c0: &SpectralField, cfg: &OptimizerConfig) -> Result<RunOutcome> {
    minimize(model, c0, Method::Asis, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
        assert_eq!("AA-BPG-4".parse::<Method>().unwrap(), Method::AaBpg4);
        assert!("newton".parse::<Method>().is_err());
    }

    #[test]
    fn validation_rejects_inverted_bounds() {
        let cfg = OptimizerConfig {
            alpha_min: 1.0,
            alpha_max: 0.5,
            ..Default::default()
        };
        assert!(cfg.validate(Method::AaBpg2).is_err());
        assert!(cfg.validate(Method::Sis).is_ok());
    }
}

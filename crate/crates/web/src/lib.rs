//! Browser demo: preview PMA initial fields and relax a small spherical
//! Landau-Brazovskii model step by step.

use std::sync::Arc;

use lbsphere::diagnostics::{count_features, FeatureKind};
use lbsphere::optim::{minimize, Method, OptimizerConfig};
use lbsphere::pma::{preset_field, radius_for_degree, random_field, single_operator_field, Preset};
use lbsphere::sht::{QuadratureGrid, ShtPlan};
use lbsphere::{GradientVariant, Model, ModelParams, SpectralField};
use wasm_bindgen::prelude::*;

/// Bandlimit of everything the demo computes.
pub const BANDLIMIT: usize = 31;
const MAP_ROWS: usize = 64;
const MAP_COLS: usize = 128;

fn js_err(e: impl std::fmt::Display) -> JsError {
    JsError::new(&e.to_string())
}

fn plan() -> Arc<ShtPlan> {
    let grid = QuadratureGrid::new(MAP_ROWS, MAP_COLS).expect("valid demo grid");
    Arc::new(ShtPlan::new(BANDLIMIT, grid).expect("demo grid resolves the bandlimit"))
}

/// Samples on a `rows x cols` Gauss-Legendre/equispaced grid, row-major,
/// north pole first.
#[wasm_bindgen]
pub struct SphereMap {
    rows: usize,
    cols: usize,
    values: Vec<f64>,
}

#[wasm_bindgen]
impl SphereMap {
    #[wasm_bindgen(getter)]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[wasm_bindgen(getter)]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn values(&self) -> Vec<f64> {
        self.values.clone()
    }

    pub fn min(&self) -> f64 {
        self.values.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }
}

fn sample(plan: &ShtPlan, c: &SpectralField) -> Result<SphereMap, JsError> {
    let g = plan.synthesize(c).map_err(js_err)?;
    Ok(SphereMap {
        rows: g.n_theta(),
        cols: g.n_phi(),
        values: g.values().to_vec(),
    })
}

/// Field generated by the invariant of `subgroup` (T, O, I or Zn) at `degree`.
#[wasm_bindgen(js_name = pmaPreview)]
pub fn pma_preview(subgroup: &str, degree: usize) -> Result<SphereMap, JsError> {
    let group = subgroup.parse().map_err(js_err)?;
    let c = single_operator_field(group, degree, BANDLIMIT, true).map_err(js_err)?;
    sample(&plan(), &c)
}

/// `sqrt(l (l + 1))`, the radius at which degree `l` is critical.
#[wasm_bindgen(js_name = radiusForDegree)]
pub fn radius_for(degree: usize) -> f64 {
    radius_for_degree(degree)
}

/// A minimization that the page advances in chunks so it can redraw.
#[wasm_bindgen]
pub struct Relaxation {
    model: Model,
    method: Method,
    config: OptimizerConfig,
    field: SpectralField,
    energies: Vec<f64>,
    iterations: usize,
    grad_sup: f64,
    converged: bool,
}

#[wasm_bindgen]
impl Relaxation {
    /// `init` is a preset name (S10, S15, L15, ...), `random`, or
    /// `GROUP:DEGREE` for a single invariant.
    #[wasm_bindgen(constructor)]
    pub fn new(
        init: &str,
        epsilon: f64,
        lambda: f64,
        radius: f64,
        method: &str,
        alpha0: f64,
        seed: u64,
    ) -> Result<Relaxation, JsError> {
        let params = ModelParams::new(1.0, epsilon, lambda, radius);
        params.validate().map_err(js_err)?;
        let method: Method = method.parse().map_err(js_err)?;
        let field = initial(init, seed)?;
        let config = OptimizerConfig {
            alpha0,
            record_trace: true,
            ..Default::default()
        };
        config.validate(method).map_err(js_err)?;
        let model = Model::new(plan(), params, GradientVariant::Squared);
        let energy = model.energy(&field).map_err(js_err)?.total;
        Ok(Self {
            model,
            method,
            config,
            field,
            energies: vec![energy],
            iterations: 0,
            grad_sup: f64::INFINITY,
            converged: false,
        })
    }

    /// Runs up to `iterations` more steps and returns the current energy.
    /// Each chunk restarts the method from the current iterate.
    pub fn advance(&mut self, iterations: usize) -> Result<f64, JsError> {
        if self.converged {
            return Ok(self.energy());
        }
        let cfg = OptimizerConfig {
            max_iter: iterations,
            ..self.config.clone()
        };
        let out = minimize(&self.model, &self.field, self.method, &cfg).map_err(js_err)?;
        self.energies
            .extend(out.trace.records.iter().skip(1).map(|r| r.energy));
        self.iterations += out.iterations;
        self.grad_sup = out.grad_sup;
        self.converged = out.converged;
        self.field = out.field;
        Ok(self.energy())
    }

    pub fn energy(&self) -> f64 {
        *self.energies.last().expect("initial energy recorded")
    }

    /// Energy after every step so far, starting with the initial state.
    pub fn energies(&self) -> Vec<f64> {
        self.energies.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn iterations(&self) -> usize {
        self.iterations
    }

    #[wasm_bindgen(getter, js_name = gradSup)]
    pub fn grad_sup(&self) -> f64 {
        self.grad_sup
    }

    #[wasm_bindgen(getter)]
    pub fn converged(&self) -> bool {
        self.converged
    }

    pub fn map(&self) -> Result<SphereMap, JsError> {
        sample(self.model.plan(), &self.field)
    }

    /// Spots (connected bright regions) or stripes (latitude bands).
    pub fn count(&self, kind: &str) -> Result<usize, JsError> {
        let kind: FeatureKind = kind.parse().map_err(js_err)?;
        let g = self.model.plan().synthesize(&self.field).map_err(js_err)?;
        Ok(count_features(&g, kind).count)
    }
}

fn initial(init: &str, seed: u64) -> Result<SpectralField, JsError> {
    if init == "random" {
        return Ok(random_field(BANDLIMIT, seed));
    }
    if let Some((group, degree)) = init.split_once(':') {
        let group = group.parse().map_err(js_err)?;
        let degree = degree
            .parse()
            .map_err(|_| JsError::new(&format!("bad degree in '{init}'")))?;
        return single_operator_field(group, degree, BANDLIMIT, true).map_err(js_err);
    }
    let preset: Preset = init.parse().map_err(js_err)?;
    Ok(preset_field(preset, seed, BANDLIMIT).map_err(js_err)?.0)
}

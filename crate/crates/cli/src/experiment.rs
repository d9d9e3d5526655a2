//! Run orchestration: single runs, method comparisons from a shared initial
//! field, and success-rate experiments over PMA and random starts.

use std::fs;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;
use std::sync::Arc;

use lbsphere::diagnostics::{count_features, FeatureKind};
use lbsphere::io::{read_coefficients, write_coefficients, write_grid_csv};
use lbsphere::optim::{minimize, Method, RunOutcome};
use lbsphere::pma::{preset_field, random_field, single_operator_field};
use lbsphere::sht::{QuadratureGrid, ShtPlan};
use lbsphere::{Model, SpectralField};

use crate::config::{InitSource, RadiusSpec, RunConfig};
use crate::error::{CliError, CliResult};
use crate::summary::{comparison_csv, comparison_table, RunSummary};

pub fn build_plan(cfg: &RunConfig) -> CliResult<Arc<ShtPlan>> {
    let plan = match cfg.grid {
        None => ShtPlan::minimal(cfg.bandlimit),
        Some((t, p)) => ShtPlan::new(cfg.bandlimit, QuadratureGrid::new(t, p)?)?,
    };
    Ok(Arc::new(plan))
}

pub fn initial_field(cfg: &RunConfig) -> CliResult<SpectralField> {
    let n = cfg.bandlimit;
    let field = match &cfg.init {
        InitSource::Preset(p) => preset_field(*p, cfg.seed, n)?.0,
        InitSource::Pma(group, degree) => single_operator_field(*group, *degree, n, true)?,
        InitSource::Random => random_field(n, cfg.seed),
        InitSource::File(path) => {
            let f = fs::File::open(path).map_err(|e| CliError::file(path, e))?;
            let c = read_coefficients(BufReader::new(f))?;
            if c.bandlimit() > n {
                return Err(CliError::Config(format!(
                    "{} has bandlimit {}, above the configured {n}",
                    path.display(),
                    c.bandlimit()
                )));
            }
            c.resized(n)
        }
    };
    Ok(field)
}

/// Everything a run produced.
pub struct RunReport {
    pub summary: RunSummary,
    pub outcome: RunOutcome,
    pub model: Model,
}

fn summarize(cfg: &RunConfig, model: &Model, outcome: &RunOutcome) -> CliResult<RunSummary> {
    let (mut spots, mut stripes) = (None, None);
    if let Some(kind) = cfg.count {
        let grid = model.plan().synthesize(&outcome.field)?;
        let n = count_features(&grid, kind).count;
        match kind {
            FeatureKind::Spots => spots = Some(n),
            FeatureKind::Stripes => stripes = Some(n),
        }
    }
    Ok(RunSummary {
        method: outcome.method,
        iterations: outcome.iterations,
        seconds: outcome.seconds,
        energy: outcome.energy,
        grad_sup: outcome.grad_sup,
        converged: outcome.converged,
        restarts: outcome.restarts,
        radius: model.params().radius,
        seed: cfg.seed,
        spots,
        stripes,
    })
}

/// Runs `cfg.method` from `c0` on `plan`.
pub fn run_from(cfg: &RunConfig, plan: Arc<ShtPlan>, c0: &SpectralField) -> CliResult<RunReport> {
    let model = Model::new(plan, cfg.model_params(), cfg.variant);
    let outcome = minimize(&model, c0, cfg.method, &cfg.optimizer)?;
    let summary = summarize(cfg, &model, &outcome)?;
    if let Some(dir) = &cfg.output {
        write_artifacts(cfg, dir, &model, &outcome, &summary)?;
    }
    Ok(RunReport {
        summary,
        outcome,
        model,
    })
}

pub fn run(cfg: &RunConfig) -> CliResult<RunReport> {
    cfg.validate()?;
    let plan = build_plan(cfg)?;
    let c0 = initial_field(cfg)?;
    run_from(cfg, plan, &c0)
}

fn create(path: &Path) -> CliResult<BufWriter<fs::File>> {
    fs::File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::file(path, e))
}

fn write_text(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|e| CliError::file(path, e))
}

fn write_artifacts(
    cfg: &RunConfig,
    dir: &Path,
    model: &Model,
    outcome: &RunOutcome,
    summary: &RunSummary,
) -> CliResult<()> {
    fs::create_dir_all(dir).map_err(|e| CliError::file(dir, e))?;
    write_text(&dir.join("config.txt"), &cfg.to_text())?;
    if cfg.emit.trace {
        let path = dir.join("trace.csv");
        let mut w = create(&path)?;
        outcome
            .trace
            .write_csv(&mut w)
            .map_err(|e| CliError::file(&path, e))?;
        w.flush().map_err(|e| CliError::file(&path, e))?;
    }
    if cfg.emit.coefficients {
        let path = dir.join("coefficients.txt");
        let mut w = create(&path)?;
        write_coefficients(&outcome.field, &mut w)?;
        w.flush().map_err(|e| CliError::file(&path, e))?;
    }
    if cfg.emit.grid {
        let path = dir.join("grid.csv");
        let mut w = create(&path)?;
        let grid = model.plan().synthesize(&outcome.field)?;
        write_grid_csv(model.plan().grid(), &grid, &mut w)?;
        w.flush().map_err(|e| CliError::file(&path, e))?;
    }
    if cfg.emit.summary {
        write_text(&dir.join("summary.txt"), &summary.to_text())?;
    }
    Ok(())
}

pub type ComparisonRow = (Method, Result<RunSummary, String>);

/// Runs every method from the same initial field. Per-method failures are
/// recorded in the table rather than aborting the comparison.
pub fn compare_methods(base: &RunConfig, methods: &[Method]) -> CliResult<Vec<ComparisonRow>> {
    base.validate()?;
    let plan = build_plan(base)?;
    let c0 = initial_field(base)?;
    let mut rows = Vec::with_capacity(methods.len());
    for &m in methods {
        let mut cfg = base.for_method(m)?;
        cfg.output = base.output.as_ref().map(|d| d.join(m.name()));
        let row = run_from(&cfg, plan.clone(), &c0)
            .map(|r| r.summary)
            .map_err(|e| e.to_string());
        rows.push((m, row));
    }
    if let Some(dir) = &base.output {
        fs::create_dir_all(dir).map_err(|e| CliError::file(dir, e))?;
        write_text(&dir.join("comparison.txt"), &comparison_table(&rows))?;
        write_text(&dir.join("comparison.csv"), &comparison_csv(&rows))?;
    }
    Ok(rows)
}

/// The state a success-rate trial should reach.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Expectation {
    pub kind: FeatureKind,
    pub count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StartKind {
    /// The configured PMA initial state or radius.
    Pma,
    Random,
}

impl std::fmt::Display for StartKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Pma => "pma",
            Self::Random => "random",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    pub seed: u64,
    pub radius: f64,
    pub converged: bool,
    pub count: usize,
    pub energy: f64,
    pub success: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CaseReport {
    pub init: StartKind,
    pub radius: StartKind,
    pub trials: Vec<TrialOutcome>,
}

impl CaseReport {
    pub fn successes(&self) -> usize {
        self.trials.iter().filter(|t| t.success).count()
    }

    pub fn rate(&self) -> f64 {
        self.successes() as f64 / self.trials.len().max(1) as f64
    }
}

pub const ALL_CASES: [(StartKind, StartKind); 4] = [
    (StartKind::Pma, StartKind::Pma),
    (StartKind::Pma, StartKind::Random),
    (StartKind::Random, StartKind::Pma),
    (StartKind::Random, StartKind::Random),
];

/// Runs `trials` seeds (`base.seed`, `base.seed + 1`, ...) for each case. A
/// trial succeeds when it converges to a state with the expected count;
/// runs that fail outright count as failures.
pub fn success_rate_experiment(
    base: &RunConfig,
    trials: usize,
    expectation: Expectation,
    cases: &[(StartKind, StartKind)],
) -> CliResult<Vec<CaseReport>> {
    if trials == 0 {
        return Err(CliError::Config("trials must be at least 1".into()));
    }
    if base.init.degree().is_none() {
        return Err(CliError::Config(
            "success-rate needs a PMA initial state (preset or pma:GROUP:DEGREE)".into(),
        ));
    }
    base.validate()?;
    let plan = build_plan(base)?;
    let pma_radius = match base.radius {
        RadiusSpec::Random => {
            return Err(CliError::Config(
                "success-rate draws random radii itself; configure the PMA radius".into(),
            ))
        }
        _ => base.radius(),
    };
    let mut reports = Vec::new();
    for &(init, radius) in cases {
        let mut outcomes = Vec::with_capacity(trials);
        for t in 0..trials {
            let mut cfg = base.clone();
            cfg.seed = base.seed.wrapping_add(t as u64);
            cfg.output = None;
            cfg.count = Some(expectation.kind);
            cfg.radius = match radius {
                StartKind::Pma => RadiusSpec::Value(pma_radius),
                StartKind::Random => RadiusSpec::Random,
            };
            if init == StartKind::Random {
                cfg.init = InitSource::Random;
            }
            let c0 = initial_field(&cfg)?;
            let outcome = match run_from(&cfg, plan.clone(), &c0) {
                Ok(r) => {
                    let count = r.summary.spots.or(r.summary.stripes).unwrap_or(0);
                    TrialOutcome {
                        seed: cfg.seed,
                        radius: r.summary.radius,
                        converged: r.summary.converged,
                        count,
                        energy: r.summary.energy,
                        success: r.summary.converged && count == expectation.count,
                    }
                }
                Err(_) => TrialOutcome {
                    seed: cfg.seed,
                    radius: cfg.radius(),
                    converged: false,
                    count: 0,
                    energy: f64::NAN,
                    success: false,
                },
            };
            outcomes.push(outcome);
        }
        reports.push(CaseReport {
            init,
            radius,
            trials: outcomes,
        });
    }
    if let Some(dir) = &base.output {
        fs::create_dir_all(dir).map_err(|e| CliError::file(dir, e))?;
        write_text(&dir.join("success_rate.txt"), &success_table(&reports, expectation))?;
        write_text(&dir.join("trials.csv"), &trials_csv(&reports))?;
    }
    Ok(reports)
}

pub fn success_table(reports: &[CaseReport], expectation: Expectation) -> String {
    let mut s = format!(
        "# target: {} {}\n{:<8} {:<8} {:>7} {:>9} {:>8}\n",
        expectation.count, expectation.kind, "init", "radius", "trials", "successes", "rate"
    );
    for r in reports {
        s += &format!(
            "{:<8} {:<8} {:>7} {:>9} {:>7.1}%\n",
            r.init.to_string(),
            r.radius.to_string(),
            r.trials.len(),
            r.successes(),
            100.0 * r.rate()
        );
    }
    s
}

/// One row per trial.
pub fn trials_csv(reports: &[CaseReport]) -> String {
    let mut s = String::from("init,radius_kind,seed,radius,converged,count,energy,success\n");
    for r in reports {
        for t in &r.trials {
            s += &format!(
                "{},{},{},{:.15e},{},{},{:.15e},{}\n",
                r.init, r.radius, t.seed, t.radius, t.converged, t.count, t.energy, t.success
            );
        }
    }
    s
}

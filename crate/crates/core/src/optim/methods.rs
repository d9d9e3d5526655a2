use web_time::Instant;

use crate::error::{Error, Result};
use crate::model::{project_mass_in_place, Evaluated, Model};
use crate::sht::SpectralField;

use super::prox::{prox_step_quartic, prox_step_sis};
use super::search::{backtrack, bb_step, BbVariant, SearchOutcome};
use super::{
    IterationEvent, Method, Observer, OptimizerConfig, ProxEvent, ProxKind, RunOutcome,
    TraceRecord,
};
use super::trace::EnergyTrace;

/// An evaluated iterate together with its projected gradients.
struct Point {
    eval: Evaluated,
    /// Gradient of the polynomial part.
    grad_f: SpectralField,
    /// Full gradient.
    grad: SpectralField,
}

impl Point {
    fn new(model: &Model, eval: Evaluated) -> Self {
        let mut grad_f = model.nonlinear_gradient_at(&eval);
        project_mass_in_place(&mut grad_f);
        let mut grad = grad_f.clone();
        model.add_linear(&eval.coeffs, &mut grad);
        project_mass_in_place(&mut grad);
        Self { eval, grad_f, grad }
    }

    fn coeffs(&self) -> &SpectralField {
        &self.eval.coeffs
    }

    fn energy(&self) -> f64 {
        self.eval.energy.total
    }
}

struct Ctx<'a> {
    model: &'a Model,
    cfg: &'a OptimizerConfig,
}

impl Ctx<'_> {
    fn evaluate(&self, mut c: SpectralField) -> Result<Evaluated> {
        project_mass_in_place(&mut c);
        self.model.evaluate(&c)
    }

    fn point(&self, c: SpectralField) -> Result<Point> {
        Ok(Point::new(self.model, self.evaluate(c)?))
    }

    fn search<T>(
        &self,
        start: f64,
        trial: impl FnMut(f64) -> Result<(T, bool)>,
    ) -> Result<SearchOutcome<T>> {
        backtrack(start, self.cfg.bounds(), self.cfg.shrink, trial)
    }
}

struct StepReport {
    /// `None` keeps the current iterate (restart).
    next: Option<Point>,
    alpha: f64,
    backtracks: usize,
    restart: bool,
    floored: bool,
}

trait Stepper {
    fn step(
        &mut self,
        ctx: &Ctx<'_>,
        cur: &Point,
        n: usize,
        obs: &mut dyn Observer,
    ) -> Result<StepReport>;
}

/// Iterate and gradient from the previous distinct iterate, for BB steps.
struct BbMemory {
    variant: BbVariant,
    prev: Option<(SpectralField, SpectralField)>,
    last: Option<f64>,
}

impl BbMemory {
    fn new(variant: BbVariant) -> Self {
        Self {
            variant,
            prev: None,
            last: None,
        }
    }

    /// BB estimate at `cur`. After a restart the iterate has not moved; the
    /// estimate from the last genuine move is kept.
    fn estimate(&mut self, cur: &Point) -> Option<f64> {
        if let Some((pc, pg)) = &self.prev {
            let d = cur.coeffs().sub(pc);
            if d.norm_sqr() > 0.0 {
                let e = cur.grad.sub(pg);
                self.last = bb_step(&d, &e, self.variant);
            }
        }
        self.last
    }

    fn remember(&mut self, cur: &Point) {
        self.prev = Some((cur.coeffs().clone(), cur.grad.clone()));
    }

    fn start(&mut self, ctx: &Ctx<'_>, cur: &Point) -> f64 {
        let bb = self.estimate(cur);
        self.remember(cur);
        ctx.cfg.bounds().start(bb)
    }
}

struct GradientDescent {
    bb: BbMemory,
}

impl Stepper for GradientDescent {
    fn step(&mut self, ctx: &Ctx<'_>, cur: &Point, n: usize, _: &mut dyn Observer) -> Result<StepReport> {
        let along = |a: f64| {
            let mut x = cur.coeffs().clone();
            x.axpy(-a, &cur.grad);
            x
        };
        // The first step has no BB history and starts from alpha0.
        let start = if n == 0 {
            self.bb.remember(cur);
            ctx.cfg.alpha0
        } else {
            self.bb.start(ctx, cur)
        };
        let e0 = cur.energy();
        let out = ctx.search(start, |a| {
            let ev = ctx.evaluate(along(a))?;
            let ok = ev.energy.total <= e0;
            Ok((ev, ok))
        })?;
        Ok(StepReport {
            next: Some(Point::new(ctx.model, out.candidate)),
            alpha: out.alpha,
            backtracks: out.backtracks,
            restart: false,
            floored: out.floored,
        })
    }
}

struct ConjugateGradient {
    direction: Option<SpectralField>,
    bb: BbMemory,
}

struct CgTrial {
    eval: Evaluated,
    /// Point and next direction, computed only when the energy test passed.
    ahead: Option<(Point, SpectralField)>,
}

impl ConjugateGradient {
    /// `-g1 + beta p` with `beta = min(|<g1 - g0, g1>|, |g1|^2) / |g0|^2`.
    fn next_direction(g0: &SpectralField, g1: &SpectralField, p: &SpectralField) -> SpectralField {
        let g0_sq = g0.norm_sqr();
        let g1_sq = g1.norm_sqr();
        let prp = (g1_sq - g0.dot(g1)).abs();
        let beta = if g0_sq > 0.0 { prp.min(g1_sq) / g0_sq } else { 0.0 };
        let mut out = p.scaled(beta);
        out.axpy(-1.0, g1);
        out
    }
}

impl Stepper for ConjugateGradient {
    fn step(&mut self, ctx: &Ctx<'_>, cur: &Point, n: usize, _: &mut dyn Observer) -> Result<StepReport> {
        let p = self
            .direction
            .take()
            .unwrap_or_else(|| cur.grad.scaled(-1.0));
        let e0 = cur.energy();
        let trial = |a: f64, check: bool| -> Result<(CgTrial, bool)> {
            let mut x = cur.coeffs().clone();
            x.axpy(a, &p);
            let eval = ctx.evaluate(x)?;
            if check && eval.energy.total > e0 {
                return Ok((CgTrial { eval, ahead: None }, false));
            }
            let point = Point::new(ctx.model, eval.clone());
            let dir = Self::next_direction(&cur.grad, &point.grad, &p);
            let ok = dir.dot(&point.grad) <= 0.0;
            Ok((
                CgTrial {
                    eval,
                    ahead: Some((point, dir)),
                },
                ok,
            ))
        };
        let start = if n == 0 {
            self.bb.remember(cur);
            ctx.cfg.alpha0
        } else {
            self.bb.start(ctx, cur)
        };
        let out = ctx.search(start, |a| trial(a, true))?;
        let (point, mut dir) = match out.candidate.ahead {
            Some(v) => v,
            None => {
                let point = Point::new(ctx.model, out.candidate.eval);
                let dir = Self::next_direction(&cur.grad, &point.grad, &p);
                (point, dir)
            }
        };
        let reset = dir.norm() > ctx.cfg.direction_bound || dir.dot(&point.grad) > 0.0;
        if reset {
            dir = point.grad.scaled(-1.0);
        }
        self.direction = Some(dir);
        Ok(StepReport {
            next: Some(point),
            alpha: out.alpha,
            backtracks: out.backtracks,
            restart: reset,
            floored: out.floored,
        })
    }
}

struct SemiImplicit {
    adaptive: bool,
    bb: BbMemory,
}

impl Stepper for SemiImplicit {
    fn step(
        &mut self,
        ctx: &Ctx<'_>,
        cur: &Point,
        n: usize,
        obs: &mut dyn Observer,
    ) -> Result<StepReport> {
        let prox = |a: f64| prox_step_sis(cur.coeffs(), &cur.grad_f, a, ctx.model);
        let e0 = cur.energy();
        let out = if !self.adaptive || n == 0 {
            self.bb.remember(cur);
            let a = ctx.cfg.alpha0;
            SearchOutcome {
                candidate: ctx.evaluate(prox(a))?,
                alpha: a,
                backtracks: 0,
                floored: false,
            }
        } else {
            let start = self.bb.start(ctx, cur);
            ctx.search(start, |a| {
                let ev = ctx.evaluate(prox(a))?;
                let ok = ev.energy.total <= e0;
                Ok((ev, ok))
            })?
        };
        obs.on_prox(&ProxEvent {
            iter: n,
            kind: ProxKind::SemiImplicit,
            psi: cur.coeffs(),
            grad_f_psi: &cur.grad_f,
            alpha: out.alpha,
            z: &out.candidate.coeffs,
            accepted: true,
        });
        Ok(StepReport {
            next: Some(Point::new(ctx.model, out.candidate)),
            alpha: out.alpha,
            backtracks: out.backtracks,
            restart: false,
            floored: out.floored,
        })
    }
}

/// Nesterov-style weights `w_n = (t_{n-1} - 1) / t_n`, capped.
struct Momentum {
    t: f64,
    w: f64,
    cap: f64,
}

impl Momentum {
    fn new(cap: f64) -> Self {
        Self { t: 1.0, w: 0.0, cap }
    }

    fn advance(&mut self) {
        let next = 0.5 * (1.0 + (1.0 + 4.0 * self.t * self.t).sqrt());
        self.w = ((self.t - 1.0) / next).min(self.cap);
        self.t = next;
    }

    fn reset(&mut self) {
        self.t = 1.0;
        self.w = 0.0;
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Acceptance {
    /// Always move to the proximal point (no energy-dissipation restart).
    Always,
    /// Move on sufficient decrease relative to the current iterate, else restart.
    Dissipative,
}

/// Sign of the extrapolation `psi = phi +/- w (phi - phi_prev)`.
#[derive(Clone, Copy, PartialEq)]
enum Extrapolation {
    /// Step past the current iterate along the last move.
    Ahead,
    /// Pull back toward the previous iterate, damping oscillating modes.
    Damped,
}

struct Extrapolated {
    kind: ProxKind,
    direction: Extrapolation,
    adaptive: bool,
    acceptance: Acceptance,
    prev: Option<SpectralField>,
    momentum: Momentum,
    bb: BbMemory,
}

impl Extrapolated {
    fn new(method: Method, cfg: &OptimizerConfig) -> Self {
        let (kind, adaptive, acceptance) = match method {
            Method::Nesterov => (ProxKind::SemiImplicit, false, Acceptance::Always),
            Method::ANesterov => (ProxKind::SemiImplicit, true, Acceptance::Always),
            Method::AaBpg2 => (ProxKind::SemiImplicit, true, Acceptance::Dissipative),
            Method::AaBpg4 => (ProxKind::Quartic(cfg.bregman), true, Acceptance::Dissipative),
            _ => unreachable!("not an extrapolated method"),
        };
        let direction = match acceptance {
            Acceptance::Always => Extrapolation::Damped,
            Acceptance::Dissipative => Extrapolation::Ahead,
        };
        Self {
            kind,
            direction,
            adaptive,
            acceptance,
            prev: None,
            momentum: Momentum::new(cfg.w_bar(method)),
            bb: BbMemory::new(cfg.bb(method)),
        }
    }
}

impl Stepper for Extrapolated {
    fn step(
        &mut self,
        ctx: &Ctx<'_>,
        cur: &Point,
        n: usize,
        obs: &mut dyn Observer,
    ) -> Result<StepReport> {
        let w = self.momentum.w;
        let shifted;
        let psi: &Point = match &self.prev {
            Some(prev) if w != 0.0 => {
                let mut y = cur.coeffs().clone();
                let w = match self.direction {
                    Extrapolation::Ahead => w,
                    Extrapolation::Damped => -w,
                };
                y.scale(1.0 + w);
                y.axpy(-w, prev);
                shifted = ctx.point(y)?;
                &shifted
            }
            _ => cur,
        };
        let at_current = std::ptr::eq(psi, cur);

        let kind = self.kind;
        let cfg = ctx.cfg;
        let prox = |a: f64| -> Result<SpectralField> {
            match kind {
                ProxKind::SemiImplicit => Ok(prox_step_sis(psi.coeffs(), &psi.grad_f, a, ctx.model)),
                ProxKind::Quartic(bregman) => prox_step_quartic(
                    psi.coeffs(),
                    &psi.grad_f,
                    a,
                    ctx.model,
                    bregman,
                    cfg.newton,
                )
                .map_err(Error::from),
            }
        };

        let out = if self.adaptive {
            let start = self.bb.start(ctx, cur);
            let e_psi = psi.energy();
            ctx.search(start, |a| {
                let ev = ctx.evaluate(prox(a)?)?;
                let gap = ev.coeffs.sub(psi.coeffs()).norm_sqr();
                let ok = e_psi - ev.energy.total >= cfg.eta * gap;
                Ok((ev, ok))
            })?
        } else {
            self.bb.remember(cur);
            SearchOutcome {
                candidate: ctx.evaluate(prox(cfg.alpha0)?)?,
                alpha: cfg.alpha0,
                backtracks: 0,
                floored: false,
            }
        };

        let accepted = match self.acceptance {
            Acceptance::Always => true,
            Acceptance::Dissipative => {
                let gap = out.candidate.coeffs.sub(cur.coeffs()).norm_sqr();
                let decrease = cur.energy() - out.candidate.energy.total >= cfg.eta * gap;
                // Without momentum a floored step cannot be improved by restarting.
                decrease || (out.floored && at_current)
            }
        };
        obs.on_prox(&ProxEvent {
            iter: n,
            kind,
            psi: psi.coeffs(),
            grad_f_psi: &psi.grad_f,
            alpha: out.alpha,
            z: &out.candidate.coeffs,
            accepted,
        });

        let report = if accepted {
            self.prev = Some(cur.coeffs().clone());
            self.momentum.advance();
            StepReport {
                next: Some(Point::new(ctx.model, out.candidate)),
                alpha: out.alpha,
                backtracks: out.backtracks,
                restart: false,
                floored: out.floored,
            }
        } else {
            self.momentum.reset();
            StepReport {
                next: None,
                alpha: out.alpha,
                backtracks: out.backtracks,
                restart: true,
                floored: out.floored,
            }
        };
        Ok(report)
    }
}

fn stepper_for(method: Method, cfg: &OptimizerConfig) -> Box<dyn Stepper> {
    match method {
        Method::Agd => Box::new(GradientDescent {
            bb: BbMemory::new(cfg.bb(method)),
        }),
        Method::Acg => Box::new(ConjugateGradient {
            direction: None,
            bb: BbMemory::new(cfg.bb(method)),
        }),
        Method::Sis | Method::Asis => Box::new(SemiImplicit {
            adaptive: method == Method::Asis,
            bb: BbMemory::new(cfg.bb(method)),
        }),
        Method::Nesterov | Method::ANesterov | Method::AaBpg2 | Method::AaBpg4 => {
            Box::new(Extrapolated::new(method, cfg))
        }
    }
}

pub fn minimize(
    model: &Model,
    c0: &SpectralField,
    method: Method,
    cfg: &OptimizerConfig,
) -> Result<RunOutcome> {
    minimize_observed(model, c0, method, cfg, &mut ())
}

/// Runs `method` from `c0` (mass-projected on entry) until the projected
/// gradient sup-norm drops below `cfg.tol` or `cfg.max_iter` iterations
/// have been taken.
pub fn minimize_observed(
    model: &Model,
    c0: &SpectralField,
    method: Method,
    cfg: &OptimizerConfig,
    obs: &mut dyn Observer,
) -> Result<RunOutcome> {
    cfg.validate(method)?;
    if c0.bandlimit() != model.bandlimit() {
        return Err(Error::Bandlimit {
            plan: model.bandlimit(),
            field: c0.bandlimit(),
        });
    }
    if !c0.is_finite() {
        return Err(Error::Config("initial field has non-finite coefficients".into()));
    }
    let clock = Instant::now();
    let ctx = Ctx { model, cfg };
    let mut cur = ctx.point(c0.clone())?;
    let mut trace = EnergyTrace::default();
    if cfg.record_trace {
        trace.push(TraceRecord {
            iter: 0,
            seconds: clock.elapsed().as_secs_f64(),
            energy: cur.energy(),
            grad_sup: cur.grad.sup_norm(),
            alpha: 0.0,
            restart: false,
            backtracks: 0,
        });
    }
    let mut stepper = stepper_for(method, cfg);
    let mut iterations = 0;
    let mut restarts = 0;
    let mut converged = false;
    loop {
        if !cur.energy().is_finite() || !cur.grad.is_finite() {
            break;
        }
        if cur.grad.sup_norm() < cfg.tol {
            converged = true;
            break;
        }
        if iterations >= cfg.max_iter {
            break;
        }
        let report = stepper.step(&ctx, &cur, iterations, obs)?;
        iterations += 1;
        if report.restart {
            restarts += 1;
        }
        if let Some(next) = report.next {
            cur = next;
        }
        let grad_sup = cur.grad.sup_norm();
        obs.on_iteration(&IterationEvent {
            iter: iterations,
            iterate: cur.coeffs(),
            energy: cur.energy(),
            grad_sup,
            alpha: report.alpha,
            restart: report.restart,
            backtracks: report.backtracks,
            floored: report.floored,
        });
        if cfg.record_trace {
            trace.push(TraceRecord {
                iter: iterations,
                seconds: clock.elapsed().as_secs_f64(),
                energy: cur.energy(),
                grad_sup,
                alpha: report.alpha,
                restart: report.restart,
                backtracks: report.backtracks,
            });
        }
    }
    Ok(RunOutcome {
        method,
        energy: cur.energy(),
        grad_sup: cur.grad.sup_norm(),
        field: cur.eval.coeffs,
        iterations,
        converged,
        restarts,
        seconds: clock.elapsed().as_secs_f64(),
        trace,
    })
}

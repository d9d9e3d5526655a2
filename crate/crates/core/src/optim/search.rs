//! Step-size initialization and backtracking shared by all adaptive methods.

use crate::sht::SpectralField;

/// Which Barzilai-Borwein quotient to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BbVariant {
    /// `<d, d> / <d, e>`
    #[default]
    Long,
    /// `<e, d> / <e, e>`
    Short,
}

/// Barzilai-Borwein step from the iterate difference `d` and gradient
/// difference `e`. `None` when the quotient is undefined, non-finite or
/// nonpositive; callers fall back to their initial step.
pub fn bb_step(d: &SpectralField, e: &SpectralField, variant: BbVariant) -> Option<f64> {
    let de = d.dot(e);
    let value = match variant {
        BbVariant::Long => d.norm_sqr() / de,
        BbVariant::Short => de / e.norm_sqr(),
    };
    (value.is_finite() && value > 0.0).then_some(value)
}

/// Shrink factor applied at the `i`-th backtrack: a gentle factor for the
/// first few trials, an aggressive one afterwards.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShrinkSchedule {
    pub early: f64,
    pub late: f64,
    pub switch_after: usize,
}

impl Default for ShrinkSchedule {
    fn default() -> Self {
        Self {
            early: (5f64.sqrt() - 1.0) / 2.0,
            late: 0.1,
            switch_after: 8,
        }
    }
}

impl ShrinkSchedule {
    pub fn factor(&self, backtrack: usize) -> f64 {
        if backtrack < self.switch_after {
            self.early
        } else {
            self.late
        }
    }
}

/// Bounds for the adaptive step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepBounds {
    pub initial: f64,
    pub min: f64,
    pub max: f64,
}

impl StepBounds {
    /// Initial trial step from an optional BB estimate, clamped to `[min, max]`.
    pub fn start(&self, bb: Option<f64>) -> f64 {
        bb.unwrap_or(self.initial).clamp(self.min, self.max)
    }
}

#[derive(Debug, Clone)]
pub struct SearchOutcome<T> {
    pub candidate: T,
    pub alpha: f64,
    pub backtracks: usize,
    /// The loop ended because the step reached the lower bound, not because
    /// the candidate passed its test.
    pub floored: bool,
}

/// Generic backtracking loop. `trial(alpha)` returns a candidate and whether
/// it is acceptable. On rejection the step is shrunk by the schedule; once it
/// would drop to `min` or below, the candidate at `min` is returned
/// unconditionally.
pub fn backtrack<T, E>(
    start: f64,
    bounds: StepBounds,
    schedule: ShrinkSchedule,
    mut trial: impl FnMut(f64) -> Result<(T, bool), E>,
) -> Result<SearchOutcome<T>, E> {
    let mut alpha = start;
    let mut backtracks = 0;
    loop {
        let (candidate, ok) = trial(alpha)?;
        if ok {
            return Ok(SearchOutcome {
                candidate,
                alpha,
                backtracks,
                floored: false,
            });
        }
        let next = alpha * schedule.factor(backtracks);
        backtracks += 1;
        if next <= bounds.min {
            if alpha <= bounds.min {
                return Ok(SearchOutcome {
                    candidate,
                    alpha,
                    backtracks,
                    floored: true,
                });
            }
            let (candidate, _) = trial(bounds.min)?;
            return Ok(SearchOutcome {
                candidate,
                alpha: bounds.min,
                backtracks,
                floored: true,
            });
        }
        alpha = next;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn field(vals: &[f64]) -> SpectralField {
        let mut f = SpectralField::zeros(3);
        for (k, v) in vals.iter().enumerate() {
            f.coeffs_mut()[k + 1] = Complex64::new(*v, 0.0);
        }
        f
    }

    #[test]
    fn bb_on_quadratic_recovers_inverse_curvature() {
        // gradient of 0.5 * k |x|^2 is k x, so e = k d
        let d = field(&[1.0, -2.0, 0.5]);
        let e = d.scaled(4.0);
        assert!((bb_step(&d, &e, BbVariant::Long).unwrap() - 0.25).abs() < 1e-15);
        assert!((bb_step(&d, &e, BbVariant::Short).unwrap() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn bb_rejects_negative_curvature_and_zero_difference() {
        let d = field(&[1.0, 0.0, 0.0]);
        assert!(bb_step(&d, &d.scaled(-1.0), BbVariant::Long).is_none());
        let z = SpectralField::zeros(3);
        assert!(bb_step(&z, &z, BbVariant::Long).is_none());
        assert!(bb_step(&z, &z, BbVariant::Short).is_none());
    }

    #[test]
    fn start_is_clamped_and_falls_back() {
        let b = StepBounds {
            initial: 0.5,
            min: 0.01,
            max: 5.0,
        };
        assert_eq!(b.start(None), 0.5);
        assert_eq!(b.start(Some(100.0)), 5.0);
        assert_eq!(b.start(Some(1e-9)), 0.01);
    }

    #[test]
    fn schedule_switches_after_eight() {
        let s = ShrinkSchedule::default();
        assert!((s.factor(7) - 0.618_033_988_749_894_8).abs() < 1e-15);
        assert_eq!(s.factor(8), 0.1);
    }

    #[test]
    fn backtrack_accepts_first_good_trial() {
        let b = StepBounds {
            initial: 1.0,
            min: 1e-3,
            max: 1.0,
        };
        let out = backtrack::<_, ()>(1.0, b, ShrinkSchedule::default(), |a| Ok((a, a < 0.5)))
            .unwrap();
        assert_eq!(out.backtracks, 2);
        assert!(!out.floored);
        assert!(out.alpha < 0.5);
    }

    #[test]
    fn backtrack_stops_at_floor() {
        let b = StepBounds {
            initial: 1.0,
            min: 0.01,
            max: 1.0,
        };
        let out =
            backtrack::<_, ()>(1.0, b, ShrinkSchedule::default(), |a| Ok((a, false))).unwrap();
        assert!(out.floored);
        assert_eq!(out.alpha, 0.01);
        assert_eq!(out.candidate, 0.01);
    }
}

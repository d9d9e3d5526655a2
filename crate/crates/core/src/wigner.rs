//! Wigner 3-j symbols and a direct (convolution) evaluation of the
//! polynomial energy. The direct path is an oracle for the pseudo-spectral
//! evaluation in [`crate::model`] and is only usable at small bandlimit.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{ModelParams, ENERGY_NORMALIZATION};
use crate::sht::SpectralField;

/// Largest bandlimit accepted by [`direct_nonlinear_energy`].
pub const DIRECT_MAX_BANDLIMIT: usize = 8;

const LOG_FACT_LEN: usize = 512;

pub(crate) fn log_factorial(n: i64) -> f64 {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    let t = TABLE.get_or_init(|| {
        let mut t = vec![0.0; LOG_FACT_LEN];
        for k in 1..LOG_FACT_LEN {
            t[k] = t[k - 1] + (k as f64).ln();
        }
        t
    });
    t[n as usize]
}

/// A triple-product coefficient together with its indices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TripleCoeff {
    pub l: [usize; 3],
    pub m: [i64; 3],
    pub value: f64,
}

impl TripleCoeff {
    pub fn new(l: [usize; 3], m: [i64; 3]) -> Result<Self> {
        let value = triple_coeff(l[0], l[1], l[2], m[0], m[1], m[2])?;
        Ok(Self { l, m, value })
    }
}

/// Triangle, parity-free selection: `|l1-l2| <= l3 <= l1+l2` and `m1+m2+m3 = 0`.
pub fn satisfies_triangle(l1: usize, l2: usize, l3: usize, m1: i64, m2: i64, m3: i64) -> bool {
    m1 + m2 + m3 == 0 && l3 + l1.min(l2) >= l1.max(l2) && l3 <= l1 + l2
}

fn check_orders(l: [usize; 3], m: [i64; 3]) -> Result<()> {
    for (li, mi) in l.iter().zip(m) {
        if mi.unsigned_abs() as usize > *li {
            return Err(Error::InvalidIndex {
                l: *li as i64,
                m: mi,
            });
        }
    }
    Ok(())
}

/// Wigner 3-j symbol by the Racah sum in log-factorial arithmetic.
///
/// Rejects `|m_i| > l_i`; returns 0 when a selection rule fails.
pub fn wigner3j(l1: usize, l2: usize, l3: usize, m1: i64, m2: i64, m3: i64) -> Result<f64> {
    check_orders([l1, l2, l3], [m1, m2, m3])?;
    Ok(wigner3j_unchecked(l1, l2, l3, m1, m2, m3))
}

fn wigner3j_unchecked(l1: usize, l2: usize, l3: usize, m1: i64, m2: i64, m3: i64) -> f64 {
    if !satisfies_triangle(l1, l2, l3, m1, m2, m3) {
        return 0.0;
    }
    let (j1, j2, j3) = (l1 as i64, l2 as i64, l3 as i64);
    if m1 == 0 && m2 == 0 && (j1 + j2 + j3) % 2 == 1 {
        return 0.0;
    }
    let log_delta = log_factorial(j1 + j2 - j3) + log_factorial(j1 - j2 + j3)
        + log_factorial(-j1 + j2 + j3)
        - log_factorial(j1 + j2 + j3 + 1);
    let log_pref = 0.5
        * (log_delta
            + log_factorial(j1 + m1)
            + log_factorial(j1 - m1)
            + log_factorial(j2 + m2)
            + log_factorial(j2 - m2)
            + log_factorial(j3 + m3)
            + log_factorial(j3 - m3));
    let kmin = 0.max(j2 - j3 - m1).max(j1 - j3 + m2);
    let kmax = (j1 + j2 - j3).min(j1 - m1).min(j2 + m2);
    let mut sum = 0.0;
    for k in kmin..=kmax {
        let log_den = log_factorial(k)
            + log_factorial(j3 - j2 + k + m1)
            + log_factorial(j3 - j1 + k - m2)
            + log_factorial(j1 + j2 - j3 - k)
            + log_factorial(j1 - k - m1)
            + log_factorial(j2 - k + m2);
        let term = (log_pref - log_den).exp();
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    if (j1 - j2 - m3).rem_euclid(2) == 1 {
        -sum
    } else {
        sum
    }
}

/// `C = sqrt((2l1+1)(2l2+1)(2l3+1)/4pi) (l1 l2 l3; 0 0 0)(l1 l2 l3; m1 m2 m3)`,
/// equal to the integral of `Y_{l1}^{m1} Y_{l2}^{m2} Y_{l3}^{m3}` over the unit sphere.
pub fn triple_coeff(l1: usize, l2: usize, l3: usize, m1: i64, m2: i64, m3: i64) -> Result<f64> {
    check_orders([l1, l2, l3], [m1, m2, m3])?;
    Ok(triple_coeff_unchecked(l1, l2, l3, m1, m2, m3))
}

fn triple_coeff_unchecked(l1: usize, l2: usize, l3: usize, m1: i64, m2: i64, m3: i64) -> f64 {
    if (l1 + l2 + l3) % 2 == 1 || !satisfies_triangle(l1, l2, l3, m1, m2, m3) {
        return 0.0;
    }
    let norm = (((2 * l1 + 1) * (2 * l2 + 1) * (2 * l3 + 1)) as f64 / (4.0 * PI)).sqrt();
    norm * wigner3j_unchecked(l1, l2, l3, 0, 0, 0) * wigner3j_unchecked(l1, l2, l3, m1, m2, m3)
}

/// Full-range coefficient list `(l, m, c_{l,m})` with negative orders reconstructed.
fn full_range(c: &SpectralField) -> Vec<(usize, i64, Complex64)> {
    let n = c.bandlimit();
    let mut out = Vec::with_capacity((n + 1) * (n + 1));
    for l in 0..=n {
        for m in -(l as i64)..=(l as i64) {
            let v = c.get(l, m);
            if v.norm_sqr() > 0.0 {
                out.push((l, m, v));
            }
        }
    }
    out
}

/// Polynomial energy by explicit coefficient convolution: the quadratic sum,
/// the triple sum weighted by `C`, and the quadruple sum through the
/// intermediate expansion of `phi^2`. Scaled like [`crate::model::Model::energy`].
pub fn direct_nonlinear_energy(c: &SpectralField, p: &ModelParams) -> Result<f64> {
    let n = c.bandlimit();
    if n > DIRECT_MAX_BANDLIMIT {
        return Err(Error::OracleBandlimit {
            max: DIRECT_MAX_BANDLIMIT,
            got: n,
        });
    }
    let modes = full_range(c);

    let quadratic: f64 = modes.iter().map(|(_, _, v)| v.norm_sqr()).sum();

    let mut cubic = Complex64::new(0.0, 0.0);
    if p.lambda != 0.0 {
        for &(l1, m1, a) in &modes {
            for &(l2, m2, b) in &modes {
                let m3 = -(m1 + m2);
                let lo = l1.abs_diff(l2).max(m3.unsigned_abs() as usize);
                let hi = (l1 + l2).min(n);
                for l3 in lo..=hi {
                    if (l1 + l2 + l3) % 2 == 1 {
                        continue;
                    }
                    let cc = triple_coeff_unchecked(l1, l2, l3, m1, m2, m3);
                    if cc != 0.0 {
                        cubic += a * b * c.get(l3, m3) * cc;
                    }
                }
            }
        }
    }

    // phi^2 = sum_{l,m} A_{l,m} Y_l^m with
    // A_{l,m} = sum c1 c2 <Y1 Y2, Y_l^m> = sum c1 c2 (-1)^m C^{l1 l2 l}_{m1 m2 -m}
    let lmax = 2 * n;
    let width = 2 * lmax + 1;
    let mut square = vec![Complex64::new(0.0, 0.0); (lmax + 1) * width];
    for &(l1, m1, a) in &modes {
        for &(l2, m2, b) in &modes {
            let m = m1 + m2;
            let lo = l1.abs_diff(l2).max(m.unsigned_abs() as usize);
            for l in lo..=(l1 + l2) {
                if (l1 + l2 + l) % 2 == 1 {
                    continue;
                }
                let cc = triple_coeff_unchecked(l1, l2, l, m1, m2, -m);
                if cc != 0.0 {
                    let sign = if m.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
                    square[l * width + (m + lmax as i64) as usize] += a * b * (sign * cc);
                }
            }
        }
    }
    let quartic: f64 = square.iter().map(|v| v.norm_sqr()).sum();

    let f = 0.5 * p.epsilon * quadratic - p.lambda / 6.0 * cubic.re + quartic / 24.0;
    Ok(f * ENERGY_NORMALIZATION)
}

//! Principal mode analysis: pick the sphere radius from the dominant degree
//! and build symmetric initial fields from that degree's harmonics.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::project_mass_in_place;
use crate::sht::SpectralField;
use crate::wigner::log_factorial;

/// Finite rotation subgroups whose invariant harmonics seed initial fields.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SymmetrySubgroup {
    Tetrahedral,
    Octahedral,
    Icosahedral,
    /// Cyclic group of order `n >= 1` about the polar axis.
    Cyclic(usize),
}

impl SymmetrySubgroup {
    pub fn cyclic(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Config("cyclic subgroup order must be at least 1".into()));
        }
        Ok(Self::Cyclic(n))
    }

    /// Degrees of the generating invariants, largest first: a degree is
    /// reachable as `s*d0 + p*d1 + q*d2` with `s` in {0, 1}.
    fn generator_degrees(self) -> Option<[usize; 3]> {
        match self {
            Self::Tetrahedral => Some([6, 4, 3]),
            Self::Octahedral => Some([9, 6, 4]),
            Self::Icosahedral => Some([15, 10, 6]),
            Self::Cyclic(_) => None,
        }
    }
}

impl fmt::Display for SymmetrySubgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Tetrahedral => f.write_str("T"),
            Self::Octahedral => f.write_str("O"),
            Self::Icosahedral => f.write_str("I"),
            Self::Cyclic(n) => write!(f, "Z{n}"),
        }
    }
}

impl FromStr for SymmetrySubgroup {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "T" | "t" => Ok(Self::Tetrahedral),
            "O" | "o" => Ok(Self::Octahedral),
            "I" | "i" => Ok(Self::Icosahedral),
            _ => {
                let n = s
                    .strip_prefix(['Z', 'z'])
                    .and_then(|n| n.parse::<usize>().ok())
                    .ok_or_else(|| Error::Config(format!("unknown subgroup '{s}'")))?;
                Self::cyclic(n)
            }
        }
    }
}

/// Exponents `(s, p, q)` of one invariant product of a given degree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Exponents {
    pub s: usize,
    pub p: usize,
    pub q: usize,
}

impl Exponents {
    pub fn factors(&self) -> usize {
        self.s + self.p + self.q
    }

    /// Degree of the product for `subgroup`.
    pub fn degree(&self, subgroup: SymmetrySubgroup) -> usize {
        match subgroup.generator_degrees() {
            Some([a, b, c]) => a * self.s + b * self.p + c * self.q,
            None => match subgroup {
                SymmetrySubgroup::Cyclic(n) => self.p + self.q * n,
                _ => unreachable!(),
            },
        }
    }
}

/// Radius at which degree `ell0` is the critical mode: `sqrt(ell0 (ell0 + 1))`.
pub fn radius_for_degree(ell0: usize) -> f64 {
    ((ell0 * (ell0 + 1)) as f64).sqrt()
}

/// All exponent triples producing degree `ell0`. For the cyclic groups the
/// product is `z^p C_{qn}` and `s` is always 0.
pub fn degree_decomposition(subgroup: SymmetrySubgroup, ell0: usize) -> Vec<Exponents> {
    let mut out = Vec::new();
    match subgroup.generator_degrees() {
        Some([a, b, c]) => {
            for s in 0..=1 {
                if s * a > ell0 {
                    continue;
                }
                let rest = ell0 - s * a;
                for p in 0..=rest / b {
                    let left = rest - p * b;
                    if left % c == 0 {
                        out.push(Exponents { s, p, q: left / c });
                    }
                }
            }
        }
        None => {
            let SymmetrySubgroup::Cyclic(n) = subgroup else {
                unreachable!()
            };
            for q in 0..=ell0 / n {
                out.push(Exponents {
                    s: 0,
                    p: ell0 - q * n,
                    q,
                });
            }
        }
    }
    out
}

/// One monomial of an invariant operator, `weight * z^(l-m) * (xi^m +- eta^m)`.
#[derive(Debug, Clone, Copy)]
enum Monomial {
    /// `z^l`
    Zonal(f64),
    /// `z^(l-m) (xi^m + eta^m)`
    Cosine(usize, f64),
    /// `i z^(l-m) (xi^m - eta^m)`
    Sine(usize, f64),
}

fn invariant_operator(subgroup: SymmetrySubgroup, degree: usize) -> Option<Vec<Monomial>> {
    use Monomial::*;
    let terms = match (subgroup, degree) {
        (SymmetrySubgroup::Tetrahedral, 3) => vec![Sine(2, 0.25)],
        (SymmetrySubgroup::Tetrahedral, 4) => vec![Zonal(3.5), Cosine(4, 0.25)],
        (SymmetrySubgroup::Tetrahedral, 6) => vec![Cosine(6, 1.0 / 32.0), Cosine(2, -33.0 / 32.0)],
        (SymmetrySubgroup::Octahedral, 4) => vec![Zonal(14.0), Cosine(4, 1.0)],
        (SymmetrySubgroup::Octahedral, 6) => vec![Cosine(4, 1.0), Zonal(-2.0)],
        (SymmetrySubgroup::Octahedral, 9) => vec![Sine(8, 1.0), Sine(4, -34.0)],
        (SymmetrySubgroup::Icosahedral, 6) => vec![Zonal(11.0), Cosine(5, 1.0)],
        (SymmetrySubgroup::Icosahedral, 10) => {
            vec![Zonal(494.0), Cosine(5, -228.0), Cosine(10, 1.0)]
        }
        (SymmetrySubgroup::Icosahedral, 15) => {
            vec![Sine(5, -10005.0), Sine(10, 522.0), Sine(15, 1.0)]
        }
        _ => return None,
    };
    Some(terms)
}

/// Coefficients of `c * Re Y_l^m` (cosine) or `c * Im Y_l^{-m}` (sine) in
/// stored form, with the operator-to-harmonic factor
/// `(-1)^(l-m) sqrt(2 (l-m)! (l+m)!)` (or `(-1)^l l!` for `m = 0`) applied
/// relative to `exp(log_scale)`.
fn add_monomial(field: &mut SpectralField, l: usize, term: Monomial, log_scale: f64) {
    let (m, weight) = match term {
        Monomial::Zonal(w) => (0, w),
        Monomial::Cosine(m, w) | Monomial::Sine(m, w) => (m, w),
    };
    let (log_mag, sign) = monomial_factor(l, m);
    let value = weight * sign * (log_mag - log_scale).exp();
    let stored = match term {
        Monomial::Zonal(_) => Complex64::new(value, 0.0),
        Monomial::Cosine(..) => Complex64::new(0.5 * value, 0.0),
        Monomial::Sine(..) => {
            let parity = if m % 2 == 0 { 1.0 } else { -1.0 };
            Complex64::new(0.0, 0.5 * parity * value)
        }
    };
    let current = field.get(l, m as i64);
    field.set(l, m as i64, current + stored);
}

fn monomial_factor(l: usize, m: usize) -> (f64, f64) {
    let sign = if (l - m) % 2 == 0 { 1.0 } else { -1.0 };
    let log_mag = if m == 0 {
        log_factorial(l as i64)
    } else {
        0.5 * (2f64.ln() + log_factorial((l - m) as i64) + log_factorial((l + m) as i64))
    };
    (log_mag, sign)
}

/// Field generated by a single invariant operator of degree `ell0` (or, for
/// cyclic groups, by `z^(ell0 - n) C_n`, falling back to `z^ell0`).
pub fn single_operator_field(
    subgroup: SymmetrySubgroup,
    ell0: usize,
    bandlimit: usize,
    normalize: bool,
) -> Result<SpectralField> {
    if ell0 == 0 || ell0 > bandlimit {
        return Err(Error::InvalidIndex {
            l: ell0 as i64,
            m: 0,
        });
    }
    let terms = match subgroup {
        SymmetrySubgroup::Cyclic(n) => {
            if n <= ell0 {
                vec![Monomial::Cosine(n, 1.0)]
            } else {
                vec![Monomial::Zonal(1.0)]
            }
        }
        _ => {
            let decomp = degree_decomposition(subgroup, ell0);
            if decomp.is_empty() {
                return Err(Error::NoDecomposition {
                    subgroup: subgroup.to_string(),
                    degree: ell0,
                });
            }
            if !decomp.iter().any(|e| e.factors() == 1) {
                let count = decomp.iter().map(Exponents::factors).min().unwrap_or(0);
                return Err(Error::UnsupportedComposition { count });
            }
            invariant_operator(subgroup, ell0).expect("single-factor degree has an operator")
        }
    };
    let log_scale = terms
        .iter()
        .map(|t| {
            let m = match *t {
                Monomial::Zonal(_) => 0,
                Monomial::Cosine(m, _) | Monomial::Sine(m, _) => m,
            };
            monomial_factor(ell0, m).0
        })
        .fold(f64::NEG_INFINITY, f64::max);
    let mut field = SpectralField::zeros(bandlimit);
    for t in terms {
        add_monomial(&mut field, ell0, t, log_scale);
    }
    if normalize {
        let n = field.norm();
        field.scale(1.0 / n);
    }
    Ok(field)
}

/// Named initial states.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// Degree 10, orders 0, 5, 10 with random amplitudes in (0, 1].
    S10,
    /// Degree 15, equal sine-type modes at orders 5, 10, 15, unit norm,
    /// turned about the polar axis by a seeded angle.
    S15,
    /// Single zonal harmonic of the given degree.
    Lamellar(usize),
}

impl FromStr for Preset {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "S10" | "s10" => Ok(Self::S10),
            "S15" | "s15" => Ok(Self::S15),
            _ => s
                .strip_prefix(['L', 'l'])
                .and_then(|l| l.parse::<usize>().ok())
                .filter(|l| *l >= 1)
                .map(Self::Lamellar)
                .ok_or_else(|| Error::Config(format!("unknown preset '{s}'"))),
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::S10 => f.write_str("S10"),
            Self::S15 => f.write_str("S15"),
            Self::Lamellar(l) => write!(f, "L{l}"),
        }
    }
}

impl Preset {
    pub fn degree(self) -> usize {
        match self {
            Self::S10 => 10,
            Self::S15 => 15,
            Self::Lamellar(l) => l,
        }
    }

    pub fn orders(self) -> Vec<i64> {
        match self {
            Self::S10 => vec![0, 5, 10],
            Self::S15 => vec![5, 10, 15],
            Self::Lamellar(_) => vec![0],
        }
    }
}

/// Amplitude draw in (0, 1].
fn open_unit(rng: &mut ChaCha8Rng) -> f64 {
    1.0 - rng.gen::<f64>()
}

/// Initial field and radius for a named preset.
pub fn preset_field(preset: Preset, seed: u64, bandlimit: usize) -> Result<(SpectralField, f64)> {
    let l = preset.degree();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if preset == Preset::S15 {
        let turn = rng.gen_range(0.0..std::f64::consts::TAU);
        let mut field = SpectralField::zeros(bandlimit);
        if l > bandlimit {
            return Err(Error::Bandlimit {
                plan: bandlimit,
                field: l,
            });
        }
        for m in preset.orders() {
            // i * e^{-i m turn}: the sine-type harmonic rotated by `turn`.
            let phase = Complex64::from_polar(1.0, -(m as f64) * turn);
            field.set(l, m, Complex64::i() * phase);
        }
        let n = field.norm();
        field.scale(1.0 / n);
        return Ok((field, radius_for_degree(l)));
    }
    let amplitudes: Vec<f64> = match preset {
        Preset::Lamellar(_) => vec![1.0],
        _ => preset.orders().iter().map(|_| open_unit(&mut rng)).collect(),
    };
    let cfg = PmaConfig {
        ell0: l,
        modes: ModeSelection::Orders(preset.orders()),
        amplitudes: Amplitudes::Explicit(amplitudes),
        normalize: false,
    };
    Ok((cfg.build(bandlimit)?, radius_for_degree(l)))
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModeSelection {
    Subgroup(SymmetrySubgroup),
    Orders(Vec<i64>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Amplitudes {
    Explicit(Vec<f64>),
    /// Uniform draws in (0, 1] from this seed.
    Seeded(u64),
}

/// Initial field built from degree-`ell0` harmonics.
#[derive(Debug, Clone, PartialEq)]
pub struct PmaConfig {
    pub ell0: usize,
    pub modes: ModeSelection,
    /// Used only for explicit order lists.
    pub amplitudes: Amplitudes,
    pub normalize: bool,
}

impl PmaConfig {
    pub fn radius(&self) -> f64 {
        radius_for_degree(self.ell0)
    }

    pub fn build(&self, bandlimit: usize) -> Result<SpectralField> {
        if self.ell0 == 0 || self.ell0 > bandlimit {
            return Err(Error::Config(format!(
                "principal degree {} must lie in 1..={bandlimit}",
                self.ell0
            )));
        }
        let mut field = match &self.modes {
            ModeSelection::Subgroup(g) => single_operator_field(*g, self.ell0, bandlimit, false)?,
            ModeSelection::Orders(orders) => {
                let amps = match &self.amplitudes {
                    Amplitudes::Explicit(a) => {
                        if a.len() != orders.len() {
                            return Err(Error::Config(format!(
                                "{} amplitudes given for {} orders",
                                a.len(),
                                orders.len()
                            )));
                        }
                        a.clone()
                    }
                    Amplitudes::Seeded(seed) => {
                        let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                        orders.iter().map(|_| open_unit(&mut rng)).collect()
                    }
                };
                let mut field = SpectralField::zeros(bandlimit);
                for (&m, &a) in orders.iter().zip(&amps) {
                    if m.unsigned_abs() as usize > self.ell0 {
                        return Err(Error::InvalidIndex {
                            l: self.ell0 as i64,
                            m,
                        });
                    }
                    if a == 0.0 || !a.is_finite() {
                        return Err(Error::Config(format!("amplitude for order {m} must be nonzero")));
                    }
                    field.set(self.ell0, m, Complex64::new(a, 0.0));
                }
                field
            }
        };
        project_mass_in_place(&mut field);
        if self.normalize {
            let n = field.norm();
            field.scale(1.0 / n);
        }
        Ok(field)
    }
}

/// Random baseline: independent uniform(-1, 1) draws on every coefficient up
/// to `bandlimit` (real and imaginary parts), mass-projected, unit norm.
pub fn random_field(bandlimit: usize, seed: u64) -> SpectralField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut field = SpectralField::zeros(bandlimit);
    for (k, v) in field.coeffs_mut().iter_mut().enumerate() {
        let re = rng.gen_range(-1.0..1.0);
        let im = rng.gen_range(-1.0..1.0);
        *v = if k <= bandlimit {
            Complex64::new(re, 0.0)
        } else {
            Complex64::new(re, im)
        };
    }
    project_mass_in_place(&mut field);
    let n = field.norm();
    field.scale(1.0 / n);
    field
}

pub const RANDOM_RADIUS_RANGE: (f64, f64) = (5.0, 80.0);

/// Random baseline radius, uniform on [5, 80].
pub fn random_radius(seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_0f_5a_d1u64);
    rng.gen_range(RANDOM_RADIUS_RANGE.0..=RANDOM_RADIUS_RANGE.1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sht::ShtPlan;

    #[test]
    fn radii() {
        assert_eq!(radius_for_degree(6), 42f64.sqrt());
        assert_eq!(radius_for_degree(10), 110f64.sqrt());
        assert_eq!(radius_for_degree(15), 240f64.sqrt());
        assert_eq!(radius_for_degree(60), 3660f64.sqrt());
    }

    #[test]
    fn decomposition_examples() {
        let i6 = degree_decomposition(SymmetrySubgroup::Icosahedral, 6);
        assert_eq!(i6, vec![Exponents { s: 0, p: 0, q: 1 }]);
        assert!(degree_decomposition(SymmetrySubgroup::Icosahedral, 7).is_empty());
        assert_eq!(
            degree_decomposition(SymmetrySubgroup::Octahedral, 10),
            vec![Exponents { s: 0, p: 1, q: 1 }]
        );
    }

    #[test]
    fn icosahedral_degree_six_structure() {
        let f = single_operator_field(SymmetrySubgroup::Icosahedral, 6, 8, false).unwrap();
        for (l, m) in f.modes() {
            let nonzero = f.get(l, m as i64).norm() > 0.0;
            assert_eq!(nonzero, l == 6 && (m == 0 || m == 5), "({l},{m})");
        }
        // 11 z^6 + z (xi^5 + eta^5) -> 11 * 6! Y_6^0 - sqrt(2 * 1! * 11!) Re Y_6^5
        let zonal = 11.0 * 720.0;
        let cosine = -(2.0 * 39_916_800.0f64).sqrt();
        let ratio = f.get(6, 0).re / f.get(6, 5).re;
        assert!((ratio - zonal / (0.5 * cosine)).abs() < 1e-12 * ratio.abs());
    }

    #[test]
    fn compound_requests_rejected() {
        // 12 = 2 * 6 for I: only (0, 0, 2)
        let err = single_operator_field(SymmetrySubgroup::Icosahedral, 12, 16, true).unwrap_err();
        assert!(matches!(err, Error::UnsupportedComposition { count: 2 }));
        let err = single_operator_field(SymmetrySubgroup::Icosahedral, 7, 16, true).unwrap_err();
        assert!(matches!(err, Error::NoDecomposition { .. }));
    }

    #[test]
    fn cyclic_field_support() {
        let f = single_operator_field(SymmetrySubgroup::Cyclic(15), 15, 20, true).unwrap();
        for (l, m) in f.modes() {
            let nonzero = f.get(l, m as i64).norm() > 0.0;
            assert_eq!(nonzero, l == 15 && m == 15);
        }
    }

    #[test]
    fn icosahedral_degree_ten_is_five_fold_symmetric() {
        let f = single_operator_field(SymmetrySubgroup::Icosahedral, 10, 12, true).unwrap();
        for (l, m) in f.modes() {
            let nonzero = f.get(l, m as i64).norm() > 0.0;
            assert_eq!(nonzero, l == 10 && [0, 5, 10].contains(&m));
        }
        let plan = ShtPlan::minimal(12);
        let a = plan.synthesize(&f).unwrap();
        let b = plan.synthesize(&f.rotate_z(2.0 * std::f64::consts::PI / 5.0)).unwrap();
        let diff = a
            .values()
            .iter()
            .zip(b.values())
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
        assert!(diff < 1e-10);
    }

    #[test]
    fn presets() {
        let (l60, r) = preset_field(Preset::Lamellar(60), 0, 127).unwrap();
        assert_eq!(r, 3660f64.sqrt());
        assert_eq!(l60.coeffs().iter().filter(|v| v.norm() > 0.0).count(), 1);

        let (a, _) = preset_field(Preset::S10, 7, 16).unwrap();
        let (b, _) = preset_field(Preset::S10, 7, 16).unwrap();
        assert_eq!(a, b);
        for m in [0, 5, 10] {
            let v = a.get(10, m).re;
            assert!(v > 0.0 && v <= 1.0);
        }

        let (s15, r) = preset_field(Preset::S15, 3, 31).unwrap();
        assert_eq!(r, 240f64.sqrt());
        assert!((s15.norm() - 1.0).abs() < 1e-13);
        let mags: Vec<f64> = [5, 10, 15].iter().map(|&m| s15.get(15, m).norm()).collect();
        assert!((mags[0] - mags[1]).abs() < 1e-14 && (mags[1] - mags[2]).abs() < 1e-14);
        let (s15_0, _) = preset_field(Preset::S15, 4, 31).unwrap();
        assert_ne!(s15, s15_0);
    }

    #[test]
    fn random_baselines() {
        let f = random_field(15, 4);
        assert_eq!(f.coeffs()[0], Complex64::new(0.0, 0.0));
        assert!((f.norm() - 1.0).abs() < 1e-13);
        for seed in 0..50 {
            let r = random_radius(seed);
            assert!((5.0..=80.0).contains(&r));
        }
    }

    #[test]
    fn subgroup_parsing() {
        assert_eq!("Z15".parse::<SymmetrySubgroup>().unwrap(), SymmetrySubgroup::Cyclic(15));
        assert!("Z0".parse::<SymmetrySubgroup>().is_err());
        assert_eq!("I".parse::<SymmetrySubgroup>().unwrap(), SymmetrySubgroup::Icosahedral);
        assert_eq!("L60".parse::<Preset>().unwrap(), Preset::Lamellar(60));
    }
}

//! Feature counts on synthesized fields: spots as connected superlevel
//! regions, stripes as latitude bands of the zonal mean.

use std::fmt;
use std::str::FromStr;

use crate::error::Error;
use crate::sht::GridField;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeatureKind {
    Spots,
    Stripes,
}

impl FromStr for FeatureKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "spots" => Ok(Self::Spots),
            "stripes" => Ok(Self::Stripes),
            _ => Err(Error::Config(format!("unknown feature kind '{s}'"))),
        }
    }
}

impl fmt::Display for FeatureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Spots => "spots",
            Self::Stripes => "stripes",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FeatureCount {
    pub count: usize,
    /// The field is numerically constant; `count` is 0.
    pub flat: bool,
}

/// Fraction of the maximum above which a grid point belongs to a spot.
pub const SPOT_THRESHOLD: f64 = 0.5;

const FLAT_TOLERANCE: f64 = 1e-8;

pub fn count_features(field: &GridField, kind: FeatureKind) -> FeatureCount {
    let (lo, hi) = (field.min(), field.max());
    if !(hi - lo > FLAT_TOLERANCE * hi.abs().max(lo.abs()).max(1.0)) {
        return FeatureCount {
            count: 0,
            flat: true,
        };
    }
    let count = match kind {
        FeatureKind::Spots => count_spots(field, SPOT_THRESHOLD * hi),
        FeatureKind::Stripes => count_stripes(field),
    };
    FeatureCount { count, flat: false }
}

/// Connected components of `{f > level}` with 4-neighbour adjacency,
/// periodic in longitude and joined across each pole.
pub fn count_spots(field: &GridField, level: f64) -> usize {
    let (nt, np) = (field.n_theta(), field.n_phi());
    let inside: Vec<bool> = field.values().iter().map(|v| *v > level).collect();
    let mut seen = vec![false; nt * np];
    let mut stack = Vec::new();
    let mut components = 0;
    for start in 0..nt * np {
        if !inside[start] || seen[start] {
            continue;
        }
        components += 1;
        seen[start] = true;
        stack.push(start);
        while let Some(idx) = stack.pop() {
            let (j, k) = (idx / np, idx % np);
            let mut visit = |jj: usize, kk: usize| {
                let id = jj * np + kk;
                if inside[id] && !seen[id] {
                    seen[id] = true;
                    stack.push(id);
                }
            };
            visit(j, (k + 1) % np);
            visit(j, (k + np - 1) % np);
            if j > 0 {
                visit(j - 1, k);
            }
            if j + 1 < nt {
                visit(j + 1, k);
            }
            if j == 0 || j + 1 == nt {
                visit(j, (k + np / 2) % np);
            }
        }
    }
    components
}

/// Sign changes of the longitude-averaged profile along latitude, plus one.
pub fn count_stripes(field: &GridField) -> usize {
    let np = field.n_phi() as f64;
    let scale = field.max().abs().max(field.min().abs());
    let mut last_sign = 0.0;
    let mut changes = 0;
    for j in 0..field.n_theta() {
        let mean = field.row(j).iter().sum::<f64>() / np;
        if mean.abs() <= 1e-12 * scale {
            continue;
        }
        let sign = mean.signum();
        if last_sign != 0.0 && sign != last_sign {
            changes += 1;
        }
        last_sign = sign;
    }
    changes + 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sht::QuadratureGrid;

    #[test]
    fn flat_field_is_flagged() {
        let g = QuadratureGrid::new(16, 32).unwrap();
        let f = GridField::from_fn(&g, |_, _| 0.3);
        let c = count_features(&f, FeatureKind::Spots);
        assert!(c.flat);
        assert_eq!(c.count, 0);
    }

    #[test]
    fn spots_wrap_in_longitude() {
        let g = QuadratureGrid::new(32, 64).unwrap();
        // two bumps on the equator, one straddling phi = 0
        let f = GridField::from_fn(&g, |t, p| {
            let eq = (-(t - std::f64::consts::FRAC_PI_2).powi(2) * 20.0).exp();
            eq * (p.cos().powi(2) * 8.0 - 7.0).exp()
        });
        assert_eq!(count_features(&f, FeatureKind::Spots).count, 2);
    }

    #[test]
    fn polar_cap_is_one_spot() {
        let g = QuadratureGrid::new(32, 64).unwrap();
        let f = GridField::from_fn(&g, |t, p| t.cos() + 0.05 * (p + t).sin());
        assert_eq!(count_features(&f, FeatureKind::Spots).count, 1);
    }

    #[test]
    fn zonal_bands_counted() {
        let g = QuadratureGrid::new(64, 8).unwrap();
        let f = GridField::from_fn(&g, |t, _| (4.5 * t).cos());
        // cos(4.5 t) changes sign at t = pi/9, 3pi/9, ..., 7pi/9: four zeros in (0, pi)
        assert_eq!(count_features(&f, FeatureKind::Stripes).count, 5);
    }
}

//! File utilities behind the `count` and `transform` subcommands.

use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use lbsphere::diagnostics::{count_features, FeatureCount, FeatureKind};
use lbsphere::io::{read_coefficients, read_grid_csv, write_coefficients, write_grid_csv};
use lbsphere::sht::{GridField, QuadratureGrid, ShtPlan};
use lbsphere::SpectralField;

use crate::error::{CliError, CliResult};

/// Whether a file holds grid samples (CSV with a `theta` header) or coefficients.
pub fn is_grid_file(path: &Path) -> CliResult<bool> {
    let f = fs::File::open(path).map_err(|e| CliError::file(path, e))?;
    let mut first = String::new();
    BufReader::new(f)
        .read_line(&mut first)
        .map_err(|e| CliError::file(path, e))?;
    Ok(first.trim_start().starts_with("theta"))
}

pub fn load_coefficients(path: &Path) -> CliResult<SpectralField> {
    let f = fs::File::open(path).map_err(|e| CliError::file(path, e))?;
    Ok(read_coefficients(BufReader::new(f))?)
}

/// Reads a grid CSV and checks that its rings are the Gauss-Legendre rings
/// of a grid of the same shape.
pub fn load_grid(path: &Path) -> CliResult<(QuadratureGrid, GridField)> {
    let f = fs::File::open(path).map_err(|e| CliError::file(path, e))?;
    let (field, thetas, phis) = read_grid_csv(BufReader::new(f))?;
    let grid = QuadratureGrid::new(thetas.len(), phis.len())?;
    let off = grid
        .thetas()
        .iter()
        .zip(&thetas)
        .map(|(a, b)| (a - b).abs())
        .chain(grid.phis().iter().zip(&phis).map(|(a, b)| (a - b).abs()))
        .fold(0.0, f64::max);
    if off > 1e-12 {
        return Err(CliError::Config(format!(
            "{}: nodes are not a Gauss-Legendre/equispaced grid (off by {off:e})",
            path.display()
        )));
    }
    Ok((grid, field))
}

fn plan_for(bandlimit: usize, grid: Option<(usize, usize)>) -> CliResult<ShtPlan> {
    Ok(match grid {
        Some((t, p)) => ShtPlan::new(bandlimit, QuadratureGrid::new(t, p)?)?,
        None => ShtPlan::minimal(bandlimit),
    })
}

/// Feature count of a saved field, either coefficients (synthesized on
/// `grid`, default the minimal grid) or grid samples.
pub fn count_file(
    path: &Path,
    kind: FeatureKind,
    grid: Option<(usize, usize)>,
) -> CliResult<FeatureCount> {
    let field = if is_grid_file(path)? {
        load_grid(path)?.1
    } else {
        let c = load_coefficients(path)?;
        plan_for(c.bandlimit(), grid)?.synthesize(&c)?
    };
    Ok(count_features(&field, kind))
}

/// Coefficients to grid CSV.
pub fn coefficients_to_grid(
    input: &Path,
    output: &Path,
    grid: Option<(usize, usize)>,
) -> CliResult<()> {
    let c = load_coefficients(input)?;
    let plan = plan_for(c.bandlimit(), grid)?;
    let values = plan.synthesize(&c)?;
    let f = fs::File::create(output).map_err(|e| CliError::file(output, e))?;
    let mut w = BufWriter::new(f);
    write_grid_csv(plan.grid(), &values, &mut w)?;
    w.flush().map_err(|e| CliError::file(output, e))
}

/// Grid CSV to coefficients up to `bandlimit`.
pub fn grid_to_coefficients(input: &Path, output: &Path, bandlimit: usize) -> CliResult<()> {
    let (grid, values) = load_grid(input)?;
    let plan = ShtPlan::new(bandlimit, grid)?;
    let c = plan.analyze(&values)?;
    let f = fs::File::create(output).map_err(|e| CliError::file(output, e))?;
    let mut w = BufWriter::new(f);
    write_coefficients(&c, &mut w)?;
    w.flush().map_err(|e| CliError::file(output, e))
}

//! Text formats for coefficient vectors and grid samples.

use std::io::{BufRead, Write};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::sht::{GridField, QuadratureGrid, SpectralField};

/// Writes `l m re im` per stored coefficient, `l` ascending then `m`
/// ascending, preceded by a `# bandlimit N` comment.
pub fn write_coefficients<W: Write>(field: &SpectralField, mut w: W) -> Result<()> {
    let n = field.bandlimit();
    writeln!(w, "# bandlimit {n}")?;
    for l in 0..=n {
        for m in 0..=l {
            let v = field.get(l, m as i64);
            writeln!(w, "{l} {m} {:.17e} {:.17e}", v.re, v.im)?;
        }
    }
    Ok(())
}

/// Reads the format of [`write_coefficients`]. Missing entries are zero;
/// without a header the bandlimit is the largest degree present.
pub fn read_coefficients<R: BufRead>(r: R) -> Result<SpectralField> {
    let mut header = None;
    let mut entries = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if let Some(rest) = t.strip_prefix('#') {
            if let Some(n) = rest.trim().strip_prefix("bandlimit") {
                header = Some(n.trim().parse::<usize>().map_err(|_| Error::Parse {
                    line: i + 1,
                    msg: "bad bandlimit header".into(),
                })?);
            }
            continue;
        }
        if t.is_empty() {
            continue;
        }
        let bad = |msg: &str| Error::Parse {
            line: i + 1,
            msg: msg.to_string(),
        };
        let cols: Vec<&str> = t.split_whitespace().collect();
        if cols.len() != 4 {
            return Err(bad("expected 'l m re im'"));
        }
        let l: usize = cols[0].parse().map_err(|_| bad("bad degree"))?;
        let m: i64 = cols[1].parse().map_err(|_| bad("bad order"))?;
        let re: f64 = cols[2].parse().map_err(|_| bad("bad real part"))?;
        let im: f64 = cols[3].parse().map_err(|_| bad("bad imaginary part"))?;
        if m.unsigned_abs() as usize > l {
            return Err(Error::InvalidIndex { l: l as i64, m });
        }
        entries.push((l, m, Complex64::new(re, im)));
    }
    let n = header
        .or_else(|| entries.iter().map(|e| e.0).max())
        .ok_or_else(|| Error::Parse {
            line: 0,
            msg: "no coefficients".into(),
        })?;
    let mut field = SpectralField::zeros(n);
    for (l, m, v) in entries {
        if l > n {
            return Err(Error::Bandlimit { plan: n, field: l });
        }
        field.set(l, m, v);
    }
    Ok(field)
}

/// CSV with a header row of longitudes and a leading colatitude column.
pub fn write_grid_csv<W: Write>(grid: &QuadratureGrid, field: &GridField, mut w: W) -> Result<()> {
    if field.n_theta() != grid.n_theta() || field.n_phi() != grid.n_phi() {
        return Err(Error::GridShape {
            expected_theta: grid.n_theta(),
            expected_phi: grid.n_phi(),
            got_theta: field.n_theta(),
            got_phi: field.n_phi(),
        });
    }
    write!(w, "theta")?;
    for p in grid.phis() {
        write!(w, ",{p:.17e}")?;
    }
    writeln!(w)?;
    for (j, t) in grid.thetas().iter().enumerate() {
        write!(w, "{t:.17e}")?;
        for v in field.row(j) {
            write!(w, ",{v:.17e}")?;
        }
        writeln!(w)?;
    }
    Ok(())
}

/// Reads a grid CSV; returns the sampled field and its colatitudes and longitudes.
pub fn read_grid_csv<R: BufRead>(r: R) -> Result<(GridField, Vec<f64>, Vec<f64>)> {
    let mut lines = r.lines();
    let header = lines.next().transpose()?.ok_or_else(|| Error::Parse {
        line: 1,
        msg: "empty grid file".into(),
    })?;
    let parse = |s: &str, line: usize| {
        s.trim().parse::<f64>().map_err(|_| Error::Parse {
            line,
            msg: format!("bad number '{s}'"),
        })
    };
    let phis = header
        .split(',')
        .skip(1)
        .map(|s| parse(s, 1))
        .collect::<Result<Vec<_>>>()?;
    let mut thetas = Vec::new();
    let mut values = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let mut cols = line.split(',');
        thetas.push(parse(cols.next().unwrap_or(""), i + 2)?);
        let row = cols.map(|s| parse(s, i + 2)).collect::<Result<Vec<_>>>()?;
        if row.len() != phis.len() {
            return Err(Error::Parse {
                line: i + 2,
                msg: format!("expected {} values, found {}", phis.len(), row.len()),
            });
        }
        values.extend(row);
    }
    let field = GridField::from_values(thetas.len(), phis.len(), values)?;
    Ok((field, thetas, phis))
}

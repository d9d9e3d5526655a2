use std::fmt::Write as _;

use lbsphere::optim::Method;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub method: Method,
    pub iterations: usize,
    pub seconds: f64,
    pub energy: f64,
    pub grad_sup: f64,
    pub converged: bool,
    pub restarts: usize,
    pub radius: f64,
    pub seed: u64,
    pub spots: Option<usize>,
    pub stripes: Option<usize>,
}

impl RunSummary {
    /// `key = value` lines.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "method = {}", self.method);
        let _ = writeln!(s, "converged = {}", self.converged);
        let _ = writeln!(s, "iterations = {}", self.iterations);
        let _ = writeln!(s, "seconds = {:.3}", self.seconds);
        let _ = writeln!(s, "energy = {:.15e}", self.energy);
        let _ = writeln!(s, "grad_sup = {:.6e}", self.grad_sup);
        let _ = writeln!(s, "restarts = {}", self.restarts);
        let _ = writeln!(s, "radius = {:.15e}", self.radius);
        let _ = writeln!(s, "seed = {}", self.seed);
        if let Some(n) = self.spots {
            let _ = writeln!(s, "spots = {n}");
        }
        if let Some(n) = self.stripes {
            let _ = writeln!(s, "stripes = {n}");
        }
        s
    }

    pub fn parse(text: &str) -> CliResult<Self> {
        let kv = crate::config::KeyValues::parse(text)?;
        let mut get = std::collections::HashMap::new();
        for (k, v) in kv.iter() {
            get.insert(k.to_string(), v.to_string());
        }
        let field = |k: &str| {
            get.get(k)
                .cloned()
                .ok_or_else(|| CliError::Config(format!("summary lacks '{k}'")))
        };
        let num = |k: &str| -> CliResult<f64> {
            field(k)?
                .parse()
                .map_err(|_| CliError::Config(format!("summary field '{k}' is not a number")))
        };
        let int = |k: &str| -> CliResult<usize> {
            field(k)?
                .parse()
                .map_err(|_| CliError::Config(format!("summary field '{k}' is not an integer")))
        };
        let opt = |k: &str| get.get(k).and_then(|v| v.parse().ok());
        Ok(Self {
            method: field("method")?.parse()?,
            iterations: int("iterations")?,
            seconds: num("seconds")?,
            energy: num("energy")?,
            grad_sup: num("grad_sup")?,
            converged: field("converged")? == "true",
            restarts: int("restarts")?,
            radius: num("radius")?,
            seed: int("seed")? as u64,
            spots: opt("spots"),
            stripes: opt("stripes"),
        })
    }
}

/// Aligned text table, one row per method, in the column order of a
/// method-comparison report.
pub fn comparison_table(rows: &[(Method, Result<RunSummary, String>)]) -> String {
    let mut s = format!(
        "{:<10} {:>10} {:>10} {:>12} {:>20} {:>9} {:>8}\n",
        "method", "iterations", "seconds", "grad_sup", "energy", "converged", "restarts"
    );
    for (m, row) in rows {
        match row {
            Ok(r) => {
                let _ = writeln!(
                    s,
                    "{:<10} {:>10} {:>10.2} {:>12.3e} {:>20.10} {:>9} {:>8}",
                    m.name(),
                    r.iterations,
                    r.seconds,
                    r.grad_sup,
                    r.energy,
                    r.converged,
                    r.restarts
                );
            }
            Err(e) => {
                let _ = writeln!(s, "{:<10} failed: {e}", m.name());
            }
        }
    }
    s
}

pub fn comparison_csv(rows: &[(Method, Result<RunSummary, String>)]) -> String {
    let mut s = String::from("method,iterations,seconds,grad_sup,energy,converged,restarts,error\n");
    for (m, row) in rows {
        match row {
            Ok(r) => {
                let _ = writeln!(
                    s,
                    "{},{},{:.6},{:.6e},{:.15e},{},{},",
                    m.name(),
                    r.iterations,
                    r.seconds,
                    r.grad_sup,
                    r.energy,
                    r.converged,
                    r.restarts
                );
            }
            Err(e) => {
                let _ = writeln!(s, "{},,,,,,,\"{}\"", m.name(), e.replace('"', "'"));
            }
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn summary_text_round_trips() {
        let s = RunSummary {
            method: Method::AaBpg4,
            iterations: 151,
            seconds: 2.5,
            energy: -4.239969034412345,
            grad_sup: 6.1e-7,
            converged: true,
            restarts: 4,
            radius: 240f64.sqrt(),
            seed: 3,
            spots: Some(60),
            stripes: None,
        };
        let back = RunSummary::parse(&s.to_text()).unwrap();
        assert_eq!(back.method, s.method);
        assert_eq!(back.energy, s.energy);
        assert_eq!(back.spots, Some(60));
        assert_eq!(back.stripes, None);
    }
}

use std::io::{self, BufRead, Write};

use crate::error::{Error, Result};

pub const TRACE_HEADER: &str = "iter,seconds,energy,grad_sup,alpha,restart,backtracks";

/// One row of the per-iteration log.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRecord {
    pub iter: usize,
    pub seconds: f64,
    pub energy: f64,
    pub grad_sup: f64,
    pub alpha: f64,
    pub restart: bool,
    pub backtracks: usize,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct EnergyTrace {
    pub records: Vec<TraceRecord>,
}

impl EnergyTrace {
    pub fn push(&mut self, r: TraceRecord) {
        self.records.push(r);
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn last(&self) -> Option<&TraceRecord> {
        self.records.last()
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "{TRACE_HEADER}")?;
        for r in &self.records {
            writeln!(
                w,
                "{},{:.6},{:.15e},{:.6e},{:.6e},{},{}",
                r.iter,
                r.seconds,
                r.energy,
                r.grad_sup,
                r.alpha,
                u8::from(r.restart),
                r.backtracks
            )?;
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines();
        let header = lines.next().transpose()?.unwrap_or_default();
        if header.trim() != TRACE_HEADER {
            return Err(Error::Parse {
                line: 1,
                msg: "missing trace header".into(),
            });
        }
        let mut out = Self::default();
        for (i, line) in lines.enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let bad = |msg: &str| Error::Parse {
                line: i + 2,
                msg: msg.to_string(),
            };
            let cols: Vec<&str> = line.split(',').collect();
            if cols.len() != 7 {
                return Err(bad("expected 7 columns"));
            }
            let f = |s: &str| s.trim().parse::<f64>().map_err(|_| bad("bad number"));
            let u = |s: &str| s.trim().parse::<usize>().map_err(|_| bad("bad integer"));
            out.push(TraceRecord {
                iter: u(cols[0])?,
                seconds: f(cols[1])?,
                energy: f(cols[2])?,
                grad_sup: f(cols[3])?,
                alpha: f(cols[4])?,
                restart: u(cols[5])? != 0,
                backtracks: u(cols[6])?,
            });
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip() {
        let mut t = EnergyTrace::default();
        t.push(TraceRecord {
            iter: 3,
            seconds: 0.25,
            energy: -4.239_969_034_412_345,
            grad_sup: 1.5e-7,
            alpha: 0.02,
            restart: true,
            backtracks: 2,
        });
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with(TRACE_HEADER));
        let back = EnergyTrace::read_csv(&buf[..]).unwrap();
        assert_eq!(back.records[0].iter, 3);
        assert!(back.records[0].restart);
        assert!((back.records[0].energy - t.records[0].energy).abs() < 1e-14);
    }
}

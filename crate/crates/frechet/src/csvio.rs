//! Curve file format: CSV with one point per line, coordinates as decimal
//! floats. Lines starting with '#' are comments. The dimension is inferred
//! from the first data line and enforced afterwards.

use crate::error::{FrechetError, Result};
use crate::geometry::Curve;
use std::io::{BufRead, Write};

pub fn read_curve<R: BufRead>(reader: R) -> Result<Curve> {
    let mut pts: Vec<Vec<f64>> = Vec::new();
    let mut dim: Option<usize> = None;
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| FrechetError::Parse {
            line: lineno,
            msg: e.to_string(),
        })?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let coords: Vec<f64> = trimmed
            .split(',')
            .map(|f| {
                f.trim().parse::<f64>().map_err(|_| FrechetError::Parse {
                    line: lineno,
                    msg: format!("bad float {:?}", f.trim()),
                })
            })
            .collect::<Result<_>>()?;
        if let Some(d) = dim {
            if coords.len() != d {
                return Err(FrechetError::Parse {
                    line: lineno,
                    msg: format!("expected {} fields, got {}", d, coords.len()),
                });
            }
        } else {
            dim = Some(coords.len());
        }
        if !coords.iter().all(|x| x.is_finite()) {
            return Err(FrechetError::Parse {
                line: lineno,
                msg: "non-finite coordinate".into(),
            });
        }
        pts.push(coords);
    }
    Curve::new(pts)
}

pub fn write_curve<W: Write>(mut w: W, curve: &Curve, header: Option<&str>) -> std::io::Result<()> {
    if let Some(h) = header {
        writeln!(w, "# {}", h)?;
    }
    for p in curve.vertices() {
        let line = p
            .iter()
            .map(|x| format!("{}", x))
            .collect::<Vec<_>>()
            .join(",");
        writeln!(w, "{}", line)?;
    }
    Ok(())
}

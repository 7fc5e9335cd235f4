//! Coefficient files: one `n value` pair per line, `n` strictly increasing from 1, gaps
//! meaning zero, and an optional `# alpha=<real> label=<text>` header.

use crate::error::{Error, Result};
use crate::series::CoefficientSeries;
use std::io::{BufRead, Write};

/// Parse a coefficient file. Without a header alpha defaults to `default_alpha`.
pub fn read_coefficients<R: BufRead>(reader: R, default_alpha: Option<f64>) -> Result<CoefficientSeries> {
    let mut alpha = None;
    let mut label = String::from("file");
    let mut coeffs: Vec<f64> = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = i + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix('#') {
            if coeffs.is_empty() {
                parse_header(rest, lineno, &mut alpha, &mut label)?;
            }
            continue;
        }
        let mut parts = trimmed.split_whitespace();
        let (Some(n), Some(v), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(Error::Parse { line: lineno, msg: format!("expected 'n value', got '{trimmed}'") });
        };
        let n: usize = n.parse().map_err(|_| Error::Parse { line: lineno, msg: format!("bad index '{n}'") })?;
        let v: f64 = v.parse().map_err(|_| Error::Parse { line: lineno, msg: format!("bad value '{v}'") })?;
        if n <= coeffs.len() {
            return Err(Error::Parse { line: lineno, msg: format!("index {n} not strictly increasing (and must start at 1)") });
        }
        coeffs.resize(n - 1, 0.0);
        coeffs.push(v);
    }
    if coeffs.is_empty() {
        return Err(Error::Parse { line: 0, msg: "no coefficients".into() });
    }
    let Some(alpha) = alpha.or(default_alpha) else {
        return Err(Error::Invalid("coefficient file has no alpha header; pass the abscissa explicitly".into()));
    };
    CoefficientSeries::new(coeffs, alpha, label)
}

fn parse_header(rest: &str, line: usize, alpha: &mut Option<f64>, label: &mut String) -> Result<()> {
    let rest = rest.trim();
    if let Some(a) = rest.strip_prefix("alpha=") {
        let (num, tail) = a.split_once(char::is_whitespace).unwrap_or((a, ""));
        *alpha = Some(num.parse().map_err(|_| Error::Parse { line, msg: format!("bad alpha '{num}'") })?);
        if let Some(l) = tail.trim().strip_prefix("label=") {
            *label = l.to_string();
        }
    }
    Ok(())
}

/// Write the header and every nonzero coefficient.
pub fn write_coefficients<W: Write>(mut w: W, series: &CoefficientSeries) -> Result<()> {
    writeln!(w, "# alpha={} label={}", series.alpha(), series.label())?;
    for (i, v) in series.as_slice().iter().enumerate() {
        if *v != 0.0 || i == 0 {
            writeln!(w, "{} {}", i + 1, v)?;
        }
    }
    // keep N visible when trailing coefficients vanish
    let n = series.len();
    if n > 1 && series.coeff(n) == 0.0 {
        writeln!(w, "{n} 0")?;
    }
    Ok(())
}

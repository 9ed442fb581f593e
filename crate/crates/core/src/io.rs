//! Deterministic text output: JSON and CSV with every float in
//! `{:.16e}` scientific notation, and Matrix Market export.
//!
//! Matrices are written in the Matrix Market coordinate format:
//!
//! ```text
//! %%MatrixMarket matrix coordinate complex general
//! % <comment lines>
//! <rows> <cols> <nonzeros>
//! <i> <j> <real> <imag>        (1-based, column-major order)
//! ```

use std::fmt::Write as _;
use std::io::{BufRead, Write};

use nalgebra::DMatrix;
use serde::Serialize;
use serde_json::Value;

use crate::clifford::C64;
use crate::error::{Error, Result};
use crate::operators::Cluster;

/// A float in full-precision scientific notation.
pub fn sci(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "NaN".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

/// Pretty JSON with sorted keys and scientific floats; non-finite floats
/// become `null`.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let v = serde_json::to_value(value)?;
    let mut out = String::new();
    write_value(&mut out, &v, 0);
    out.push('\n');
    Ok(out)
}

fn write_value(out: &mut String, v: &Value, indent: usize) {
    let pad = |n: usize| "  ".repeat(n);
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if n.is_f64() {
                match n.as_f64() {
                    Some(x) if x.is_finite() => out.push_str(&sci(x)),
                    _ => out.push_str("null"),
                }
            } else {
                out.push_str(&n.to_string());
            }
        }
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(a) => {
            if a.is_empty() {
                out.push_str("[]");
                return;
            }
            out.push_str("[\n");
            for (i, x) in a.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                write_value(out, x, indent + 1);
                out.push_str(if i + 1 < a.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push(']');
        }
        Value::Object(o) => {
            if o.is_empty() {
                out.push_str("{}");
                return;
            }
            out.push_str("{\n");
            for (i, (k, x)) in o.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                out.push_str(&Value::String(k.clone()).to_string());
                out.push_str(": ");
                write_value(out, x, indent + 1);
                out.push_str(if i + 1 < o.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push('}');
        }
    }
}

/// Spectrum CSV with columns `q,eigenvalue,multiplicity`.
pub fn spectrum_csv(rows: &[(usize, Cluster)]) -> String {
    let mut out = String::from("q,eigenvalue,multiplicity\n");
    for (q, c) in rows {
        let _ = writeln!(out, "{},{},{}", q, sci(c.eigenvalue), c.multiplicity);
    }
    out
}

/// Writes `a` in Matrix Market complex coordinate format, skipping exact
/// zeros.
pub fn write_matrix_market<W: Write>(mut w: W, a: &DMatrix<C64>, comment: &str) -> Result<()> {
    let zero = C64::new(0.0, 0.0);
    let nnz = a.iter().filter(|v| **v != zero).count();
    writeln!(w, "%%MatrixMarket matrix coordinate complex general")?;
    for line in comment.lines() {
        writeln!(w, "% {line}")?;
    }
    writeln!(w, "{} {} {}", a.nrows(), a.ncols(), nnz)?;
    for c in 0..a.ncols() {
        for r in 0..a.nrows() {
            let v = a[(r, c)];
            if v != zero {
                writeln!(w, "{} {} {} {}", r + 1, c + 1, sci(v.re), sci(v.im))?;
            }
        }
    }
    Ok(())
}

/// Reads a matrix written by [`write_matrix_market`].
pub fn read_matrix_market<R: BufRead>(r: R) -> Result<DMatrix<C64>> {
    let bad = |msg: &str| Error::Config(format!("matrix market: {msg}"));
    let mut lines = r.lines();
    let header = lines.next().ok_or_else(|| bad("empty input"))??;
    if header.trim() != "%%MatrixMarket matrix coordinate complex general" {
        return Err(bad("unsupported header"));
    }
    let mut size: Option<(usize, usize, usize)> = None;
    let mut a = DMatrix::zeros(0, 0);
    let mut seen = 0;
    for line in lines {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        let f: Vec<&str> = t.split_whitespace().collect();
        match size {
            None => {
                let p = |s: &str| s.parse::<usize>().map_err(|_| bad("bad size line"));
                if f.len() != 3 {
                    return Err(bad("bad size line"));
                }
                let (r, c, n) = (p(f[0])?, p(f[1])?, p(f[2])?);
                size = Some((r, c, n));
                a = DMatrix::zeros(r, c);
            }
            Some((nr, nc, _)) => {
                if f.len() != 4 {
                    return Err(bad("bad entry line"));
                }
                let i: usize = f[0].parse().map_err(|_| bad("bad row index"))?;
                let j: usize = f[1].parse().map_err(|_| bad("bad column index"))?;
                let re: f64 = f[2].parse().map_err(|_| bad("bad real part"))?;
                let im: f64 = f[3].parse().map_err(|_| bad("bad imaginary part"))?;
                if i == 0 || j == 0 || i > nr || j > nc {
                    return Err(bad("index out of range"));
                }
                a[(i - 1, j - 1)] = C64::new(re, im);
                seen += 1;
            }
        }
    }
    match size {
        Some((_, _, n)) if n == seen => Ok(a),
        Some(_) => Err(bad("entry count does not match header")),
        None => Err(bad("missing size line")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_floats_are_scientific_and_ints_are_not() {
        #[derive(Serialize)]
        struct S {
            a: f64,
            b: usize,
            c: Vec<f64>,
        }
        let s = to_json(&S { a: 0.1, b: 3, c: vec![1.0, f64::NAN] }).unwrap();
        assert!(s.contains("\"a\": 1.0000000000000001e-1"), "{s}");
        assert!(s.contains("\"b\": 3"));
        assert!(s.contains("null"));
        let v: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["a"].as_f64(), Some(0.1));
    }

    #[test]
    fn matrix_market_round_trip() {
        let a = DMatrix::from_fn(3, 2, |r, c| if r == c { C64::new(0.1 * r as f64, -1.0 / 3.0) } else { C64::new(0.0, 0.0) });
        let mut buf = Vec::new();
        write_matrix_market(&mut buf, &a, "test").unwrap();
        let b = read_matrix_market(std::io::Cursor::new(buf)).unwrap();
        assert_eq!(a, b);
    }
}

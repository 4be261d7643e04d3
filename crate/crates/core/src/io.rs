//! Plain-text exchange formats: `weilmatrix v1`, `weileig v1`, `zetazeros v1`, and
//! the spectrum CSV / JSON exports.
//!
//! Every text format starts with a `<kind> v1` line, then `key=value` header lines,
//! then whitespace-separated data lines. Numbers are decimal strings carrying the
//! full working precision.

use std::io::{BufRead, Write};

use rug::Float;
use serde::Serialize;

use crate::dirac_pert::SpectrumResult;
use crate::error::{Error, Result};
use crate::matrix::SymMatrix;
use crate::precision::{to_decimal, PrecisionContext};
use crate::spectral::EigenDecomposition;
use crate::weil_form::{LambdaSpec, WeilMatrix, WeilParams};
use crate::xi_oracle::{ZeroEntry, ZeroTable, ZeroTableMeta};

pub const MATRIX_KIND: &str = "weilmatrix";
pub const EIG_KIND: &str = "weileig";
pub const ZEROS_KIND: &str = "zetazeros";
pub const FORMAT_VERSION: &str = "v1";

/// Decimal digits that round-trip a `prec`-bit float.
pub fn digits_for(prec: u32) -> usize {
    (f64::from(prec) * std::f64::consts::LOG10_2).ceil() as usize + 2
}

fn dec(x: &Float) -> String {
    to_decimal(x, digits_for(x.prec()))
}

/// Parsed header and the data lines (with their 1-based line numbers).
struct Document {
    header: Vec<(String, String)>,
    data: Vec<(usize, Vec<String>)>,
}

impl Document {
    fn read<R: BufRead>(reader: R, kind: &str) -> Result<Self> {
        let mut lines = reader.lines().enumerate();
        let (_, first) = lines
            .next()
            .ok_or_else(|| Error::format(1, "empty input"))?;
        let first = first?;
        let mut parts = first.split_whitespace();
        match (parts.next(), parts.next(), parts.next()) {
            (Some(k), Some(v), None) if k == kind => {
                if v != FORMAT_VERSION {
                    return Err(Error::format(1, format!("unsupported {kind} version {v:?}")));
                }
            }
            _ => return Err(Error::format(1, format!("expected \"{kind} {FORMAT_VERSION}\""))),
        }
        let mut header = Vec::new();
        let mut data = Vec::new();
        for (idx, line) in lines {
            let line = line?;
            let line_no = idx + 1;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            if data.is_empty() {
                if let Some((k, v)) = trimmed.split_once('=') {
                    header.push((k.trim().to_string(), v.trim().to_string()));
                    continue;
                }
            }
            data.push((
                line_no,
                trimmed.split_whitespace().map(str::to_string).collect(),
            ));
        }
        Ok(Document { header, data })
    }

    fn get(&self, key: &str) -> Result<&str> {
        self.header
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
            .ok_or_else(|| Error::format(1, format!("missing header field {key:?}")))
    }

    fn get_parsed<T: std::str::FromStr>(&self, key: &str) -> Result<T> {
        self.get(key)?
            .parse()
            .map_err(|_| Error::format(1, format!("bad value for header field {key:?}")))
    }
}

fn field<T: std::str::FromStr>(line: usize, fields: &[String], k: usize, what: &str) -> Result<T> {
    fields
        .get(k)
        .ok_or_else(|| Error::format(line, format!("missing {what}")))?
        .parse()
        .map_err(|_| Error::format(line, format!("bad {what}")))
}

fn number(line: usize, fields: &[String], k: usize, prec: u32) -> Result<Float> {
    let text = fields
        .get(k)
        .ok_or_else(|| Error::format(line, "missing number"))?;
    let parsed =
        Float::parse(text).map_err(|e| Error::format(line, format!("bad number {text:?}: {e}")))?;
    Ok(Float::with_val(prec, parsed))
}

fn expect_fields(line: usize, fields: &[String], n: usize) -> Result<()> {
    if fields.len() != n {
        return Err(Error::format(
            line,
            format!("expected {n} fields, found {}", fields.len()),
        ));
    }
    Ok(())
}

/// Writes `τ` as `i j value` for `−N ≤ i ≤ j ≤ N`.
pub fn write_matrix<W: Write>(mut w: W, m: &WeilMatrix) -> Result<()> {
    let p = &m.params;
    writeln!(w, "{MATRIX_KIND} {FORMAT_VERSION}")?;
    writeln!(w, "lambda={}", p.lambda_spec)?;
    writeln!(w, "N={}", p.n)?;
    writeln!(w, "bits={}", p.ctx.bits())?;
    writeln!(w, "guard={}", p.ctx.guard())?;
    let n = p.n as i64;
    for i in -n..=n {
        for j in i..=n {
            writeln!(w, "{i} {j} {}", dec(m.entry(i, j)))?;
        }
    }
    Ok(())
}

/// Reads a `weilmatrix v1` document and re-runs the structure checks.
pub fn read_matrix<R: BufRead>(r: R) -> Result<WeilMatrix> {
    let doc = Document::read(r, MATRIX_KIND)?;
    let lambda: LambdaSpec = doc.get("lambda")?.parse()?;
    let n: usize = doc.get_parsed("N")?;
    let bits: u32 = doc.get_parsed("bits")?;
    let guard: u32 = match doc.get("guard") {
        Ok(_) => doc.get_parsed("guard")?,
        Err(_) => PrecisionContext::DEFAULT_GUARD,
    };
    let ctx = PrecisionContext::with_guard(bits, guard)?;
    let params = WeilParams::new(lambda, n, ctx)?;
    let dim = params.dim();
    let mut slots: Vec<Option<Float>> = vec![None; dim * dim];
    for (line, fields) in &doc.data {
        expect_fields(*line, fields, 3)?;
        let i: i64 = field(*line, fields, 0, "row index")?;
        let j: i64 = field(*line, fields, 1, "column index")?;
        if i > j || i.unsigned_abs() as usize > n || j.unsigned_abs() as usize > n {
            return Err(Error::format(*line, format!("index pair ({i}, {j}) out of range")));
        }
        let slot = &mut slots[params.pos(i) * dim + params.pos(j)];
        if slot.is_some() {
            return Err(Error::format(*line, format!("duplicate entry ({i}, {j})")));
        }
        *slot = Some(number(*line, fields, 2, bits)?);
    }
    let mut upper = Vec::with_capacity(dim * (dim + 1) / 2);
    for r in 0..dim {
        for c in r..dim {
            let v = slots[r * dim + c].take().ok_or_else(|| {
                Error::format(
                    doc.data.last().map_or(1, |d| d.0),
                    format!("missing entry ({}, {})", params.index(r), params.index(c)),
                )
            })?;
            upper.push(v);
        }
    }
    let tau = SymMatrix::from_upper(dim, upper)?;
    WeilMatrix::from_tau(params, tau)
}

/// Writes eigenvalues and eigenvectors: `value k μ_k` and `vector k p v_kp`.
pub fn write_eigen<W: Write>(mut w: W, params: &WeilParams, d: &EigenDecomposition) -> Result<()> {
    writeln!(w, "{EIG_KIND} {FORMAT_VERSION}")?;
    writeln!(w, "lambda={}", params.lambda_spec)?;
    writeln!(w, "N={}", params.n)?;
    writeln!(w, "bits={}", params.ctx.bits())?;
    writeln!(w, "sweeps={}", d.sweeps)?;
    writeln!(w, "norm={}", dec(&d.norm))?;
    for (k, v) in d.values.iter().enumerate() {
        writeln!(w, "value {k} {}", dec(v))?;
    }
    for (k, vec) in d.vectors.iter().enumerate() {
        for (p, x) in vec.iter().enumerate() {
            writeln!(w, "vector {k} {p} {}", dec(x))?;
        }
    }
    Ok(())
}

/// Header fields of a `weileig v1` document.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenHeader {
    pub lambda: LambdaSpec,
    pub n: usize,
    pub bits: u32,
}

pub fn read_eigen<R: BufRead>(r: R) -> Result<(EigenHeader, EigenDecomposition)> {
    let doc = Document::read(r, EIG_KIND)?;
    let header = EigenHeader {
        lambda: doc.get("lambda")?.parse()?,
        n: doc.get_parsed("N")?,
        bits: doc.get_parsed("bits")?,
    };
    let sweeps: usize = doc.get_parsed("sweeps")?;
    let bits = header.bits;
    let norm = Float::with_val(
        bits,
        Float::parse(doc.get("norm")?).map_err(|_| Error::format(1, "bad norm"))?,
    );
    let dim = 2 * header.n + 1;
    let mut values: Vec<Option<Float>> = vec![None; dim];
    let mut vectors: Vec<Vec<Option<Float>>> = vec![vec![None; dim]; dim];
    for (line, fields) in &doc.data {
        match fields.first().map(String::as_str) {
            Some("value") => {
                expect_fields(*line, fields, 3)?;
                let k: usize = field(*line, fields, 1, "eigen index")?;
                let slot = values
                    .get_mut(k)
                    .ok_or_else(|| Error::format(*line, "eigen index out of range"))?;
                *slot = Some(number(*line, fields, 2, bits)?);
            }
            Some("vector") => {
                expect_fields(*line, fields, 4)?;
                let k: usize = field(*line, fields, 1, "eigen index")?;
                let p: usize = field(*line, fields, 2, "coordinate")?;
                if k >= dim || p >= dim {
                    return Err(Error::format(*line, "vector index out of range"));
                }
                vectors[k][p] = Some(number(*line, fields, 3, bits)?);
            }
            _ => return Err(Error::format(*line, "expected \"value\" or \"vector\" record")),
        }
    }
    let incomplete = || Error::format(doc.data.last().map_or(1, |d| d.0), "incomplete eigendata");
    let values: Vec<Float> = values.into_iter().collect::<Option<_>>().ok_or_else(incomplete)?;
    let vectors: Vec<Vec<Float>> = vectors
        .into_iter()
        .map(|v| v.into_iter().collect::<Option<Vec<_>>>())
        .collect::<Option<_>>()
        .ok_or_else(incomplete)?;
    let prec = bits;
    let gap = if dim > 1 {
        Float::with_val(prec, &values[1] - &values[0])
    } else {
        Float::new(prec)
    };
    let xi_raw = vectors[0].clone();
    let dec = EigenDecomposition {
        eps_n: values[0].clone(),
        parity_defect: crate::spectral::parity_defect(&xi_raw),
        xi_raw,
        gap,
        values,
        vectors,
        norm,
        sweeps,
    };
    Ok((header, dec))
}

/// Writes `k value errbound` lines.
pub fn write_zeros<W: Write>(mut w: W, t: &ZeroTable) -> Result<()> {
    writeln!(w, "{ZEROS_KIND} {FORMAT_VERSION}")?;
    writeln!(w, "bits={}", t.meta.bits)?;
    writeln!(w, "n_max={}", t.meta.n_max)?;
    writeln!(w, "u_max={}", t.meta.u_max)?;
    writeln!(w, "version={}", t.meta.version)?;
    for e in &t.entries {
        writeln!(w, "{} {} {}", e.index, dec(&e.value), to_decimal(&e.error, 6))?;
    }
    Ok(())
}

pub fn read_zeros<R: BufRead>(r: R) -> Result<ZeroTable> {
    let doc = Document::read(r, ZEROS_KIND)?;
    let meta = ZeroTableMeta {
        bits: doc.get_parsed("bits")?,
        n_max: doc.get_parsed("n_max")?,
        u_max: doc.get_parsed("u_max")?,
        version: doc.get("version")?.to_string(),
    };
    let mut entries = Vec::with_capacity(doc.data.len());
    for (line, fields) in &doc.data {
        expect_fields(*line, fields, 3)?;
        entries.push(ZeroEntry {
            index: field(*line, fields, 0, "zero index")?,
            value: number(*line, fields, 1, meta.bits)?,
            error: number(*line, fields, 2, meta.bits)?,
        });
    }
    let table = ZeroTable { entries, meta };
    table
        .validate()
        .map_err(|e| Error::format(doc.data.last().map_or(1, |d| d.0), e.to_string()))?;
    Ok(table)
}

/// Writes `index,eigenvalue,residual` rows, one per interior spectrum point.
pub fn write_spectrum_csv<W: Write>(mut w: W, s: &SpectrumResult) -> Result<()> {
    writeln!(w, "index,eigenvalue,residual")?;
    for (k, (x, r)) in s.interior.iter().zip(&s.residuals).enumerate() {
        writeln!(w, "{k},{},{}", dec(x), to_decimal(r, 6))?;
    }
    Ok(())
}

#[derive(Serialize)]
struct SpectrumJson {
    lambda: String,
    #[serde(rename = "N")]
    n: usize,
    bits: u32,
    tail_rule: String,
    points: Vec<SpectrumPoint>,
}

#[derive(Serialize)]
struct SpectrumPoint {
    index: usize,
    eigenvalue: String,
    residual: String,
}

/// JSON mirror of [`write_spectrum_csv`] with a `(λ, N, bits)` header.
pub fn write_spectrum_json<W: Write>(w: W, params: &WeilParams, s: &SpectrumResult) -> Result<()> {
    let doc = SpectrumJson {
        lambda: params.lambda_spec.to_string(),
        n: params.n,
        bits: params.ctx.bits(),
        tail_rule: s.tail_rule.describe(),
        points: s
            .interior
            .iter()
            .zip(&s.residuals)
            .enumerate()
            .map(|(index, (x, r))| SpectrumPoint {
                index,
                eigenvalue: dec(x),
                residual: to_decimal(r, 6),
            })
            .collect(),
    };
    serde_json::to_writer_pretty(w, &doc)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::par::Execution;
    use crate::weil_form::assemble;

    fn small() -> WeilMatrix {
        let ctx = PrecisionContext::new(160).unwrap();
        let p = WeilParams::new(LambdaSpec::Sqrt(5), 2, ctx).unwrap();
        assemble(&p, Execution::Sequential).unwrap()
    }

    #[test]
    fn matrix_roundtrip_is_exact() {
        let m = small();
        let mut buf = Vec::new();
        write_matrix(&mut buf, &m).unwrap();
        let back = read_matrix(buf.as_slice()).unwrap();
        assert_eq!(back.tau, m.tau);
        assert_eq!(back.params.lambda_spec, m.params.lambda_spec);
    }

    #[test]
    fn unknown_version_is_rejected() {
        let text = "weilmatrix v2\nlambda=2\nN=1\nbits=128\n";
        assert!(matches!(
            read_matrix(text.as_bytes()),
            Err(Error::Format { line: 1, .. })
        ));
        assert!(read_zeros("weilmatrix v1\n".as_bytes()).is_err());
    }

    #[test]
    fn missing_entry_is_reported() {
        let m = small();
        let mut buf = Vec::new();
        write_matrix(&mut buf, &m).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let truncated: Vec<&str> = text.lines().take(8).collect();
        let err = read_matrix(truncated.join("\n").as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Format { .. }), "{err}");
    }

    #[test]
    fn bad_number_reports_line() {
        let text = "zetazeros v1\nbits=128\nn_max=5\nu_max=3.0\nversion=x\n1 14.13 1e-20\n2 abc 1e-20\n";
        match read_zeros(text.as_bytes()) {
            Err(Error::Format { line, .. }) => assert_eq!(line, 7),
            other => panic!("unexpected {other:?}"),
        }
    }
}

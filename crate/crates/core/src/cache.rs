//! Text persistence for [`ExtensionOperator`].
//!
//! One `key = value` pair per line. Floating-point numbers are written with 17
//! significant digits, which round-trips every `f64` exactly; complex arrays
//! are flat lists of `re,im` pairs in row-major order. The last line is a
//! SHA-256 digest of everything above it.
//!
//! ```text
//! format = fourier-extension-operator
//! version = 1
//! t_delta = 6.0000000000000000e0
//! m_delta = 25
//! gamma = 1.0000000000000000e0
//! tau = 1.0000000000000000e-14
//! n_delta = 24
//! l_delta = 288
//! rows = 50
//! cols = 49
//! sigma = 1.0000000000000000e0 …
//! u = 1.2e-1,3.4e-2 …
//! v = …
//! checksum = sha256:…
//! ```

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64 as C64;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::extension::{ExtensionConfig, ExtensionOperator, OPERATOR_FORMAT_VERSION};
use crate::linalg::{ComplexMatrix, SvdFactorization};

const FORMAT_TAG: &str = "fourier-extension-operator";
const CHECKSUM_KEY: &str = "checksum = sha256:";

fn digest_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .fold(String::with_capacity(64), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
}

fn push_complex(out: &mut String, key: &str, m: &ComplexMatrix) {
    out.push_str(key);
    out.push_str(" =");
    for z in m.as_slice() {
        let _ = write!(out, " {:.16e},{:.16e}", z.re, z.im);
    }
    out.push('\n');
}

/// Serializes `op`.
pub fn operator_to_string(op: &ExtensionOperator) -> String {
    let cfg = op.config();
    let f = op.factorization();
    let mut out = String::new();
    let _ = writeln!(out, "format = {FORMAT_TAG}");
    let _ = writeln!(out, "version = {OPERATOR_FORMAT_VERSION}");
    let _ = writeln!(out, "t_delta = {:.16e}", cfg.t_delta());
    let _ = writeln!(out, "m_delta = {}", cfg.m_delta());
    let _ = writeln!(out, "gamma = {:.16e}", cfg.gamma());
    let _ = writeln!(out, "tau = {:.16e}", cfg.tau());
    let _ = writeln!(out, "n_delta = {}", cfg.n_delta());
    let _ = writeln!(out, "l_delta = {}", op.geometry().l_delta());
    let _ = writeln!(out, "rows = {}", f.u.rows());
    let _ = writeln!(out, "cols = {}", f.v.rows());
    out.push_str("sigma =");
    for s in &f.singular_values {
        let _ = write!(out, " {s:.16e}");
    }
    out.push('\n');
    push_complex(&mut out, "u", &f.u);
    push_complex(&mut out, "v", &f.v);
    let sum = digest_hex(out.as_bytes());
    let _ = writeln!(out, "{CHECKSUM_KEY}{sum}");
    out
}

pub fn save_operator(op: &ExtensionOperator, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, operator_to_string(op))?;
    Ok(())
}

struct Fields<'a>(HashMap<&'a str, &'a str>);

impl<'a> Fields<'a> {
    fn get(&self, key: &str) -> Result<&'a str> {
        self.0
            .get(key)
            .copied()
            .ok_or_else(|| Error::Cache(format!("missing field `{key}`")))
    }

    fn parse<T: std::str::FromStr>(&self, key: &str) -> Result<T> {
        let raw = self.get(key)?;
        raw.parse()
            .map_err(|_| Error::Cache(format!("field `{key}` has unparseable value `{raw}`")))
    }

    fn reals(&self, key: &str) -> Result<Vec<f64>> {
        self.get(key)?
            .split_whitespace()
            .map(|t| {
                t.parse()
                    .map_err(|_| Error::Cache(format!("bad number `{t}` in `{key}`")))
            })
            .collect()
    }

    fn matrix(&self, key: &str, rows: usize, cols: usize) -> Result<ComplexMatrix> {
        let data = self
            .get(key)?
            .split_whitespace()
            .map(|t| {
                let bad = || Error::Cache(format!("bad complex entry `{t}` in `{key}`"));
                let (re, im) = t.split_once(',').ok_or_else(bad)?;
                Ok(C64::new(re.parse().map_err(|_| bad())?, im.parse().map_err(|_| bad())?))
            })
            .collect::<Result<Vec<_>>>()?;
        if data.len() != rows * cols {
            return Err(Error::Cache(format!(
                "`{key}` holds {} entries, expected {rows}x{cols}",
                data.len()
            )));
        }
        ComplexMatrix::new(rows, cols, data)
    }
}

fn mismatch(field: &'static str, stored: impl ToString, requested: impl ToString) -> Error {
    Error::CacheConfigMismatch {
        field,
        stored: stored.to_string(),
        requested: requested.to_string(),
    }
}

/// Parses and validates a serialized operator built for `expected`.
///
/// Checks, in order: format tag and version, checksum, configuration match,
/// factor shapes, and that the factors reproduce the system matrix.
pub fn operator_from_str(text: &str, expected: &ExtensionConfig) -> Result<ExtensionOperator> {
    let mut map = HashMap::new();
    for line in text.lines() {
        if let Some((k, v)) = line.split_once(" = ") {
            map.insert(k.trim(), v.trim());
        } else if let Some(k) = line.strip_suffix(" =") {
            map.insert(k.trim(), "");
        }
    }
    let fields = Fields(map);
    if fields.get("format")? != FORMAT_TAG {
        return Err(Error::Cache("not an operator cache file".into()));
    }
    let version: u32 = fields.parse("version")?;
    if version != OPERATOR_FORMAT_VERSION {
        return Err(Error::CacheVersion {
            found: version,
            expected: OPERATOR_FORMAT_VERSION,
        });
    }
    let pos = text
        .rfind(CHECKSUM_KEY)
        .ok_or_else(|| Error::Cache("missing checksum".into()))?;
    let stored = text[pos + CHECKSUM_KEY.len()..].trim();
    if stored != digest_hex(&text.as_bytes()[..pos]) {
        return Err(Error::CacheChecksum);
    }

    let t_delta: f64 = fields.parse("t_delta")?;
    let m_delta: usize = fields.parse("m_delta")?;
    let gamma: f64 = fields.parse("gamma")?;
    let tau: f64 = fields.parse("tau")?;
    if t_delta != expected.t_delta() {
        return Err(mismatch("t_delta", t_delta, expected.t_delta()));
    }
    if m_delta != expected.m_delta() {
        return Err(mismatch("m_delta", m_delta, expected.m_delta()));
    }
    if gamma != expected.gamma() {
        return Err(mismatch("gamma", gamma, expected.gamma()));
    }
    if tau != expected.tau() {
        return Err(mismatch("tau", tau, expected.tau()));
    }
    let n_delta: usize = fields.parse("n_delta")?;
    let l_delta: usize = fields.parse("l_delta")?;
    if n_delta != expected.n_delta() || l_delta != expected.geometry().l_delta() {
        return Err(Error::Cache(format!(
            "stored n = {n_delta}, L = {l_delta} disagree with the configuration"
        )));
    }

    let rows: usize = fields.parse("rows")?;
    let cols: usize = fields.parse("cols")?;
    let sigma = fields.reals("sigma")?;
    let r = sigma.len();
    let factorization = SvdFactorization {
        u: fields.matrix("u", rows, r)?,
        singular_values: sigma,
        v: fields.matrix("v", cols, r)?,
    };
    ExtensionOperator::from_parts(*expected, factorization)
}

pub fn load_operator(path: impl AsRef<Path>, expected: &ExtensionConfig) -> Result<ExtensionOperator> {
    operator_from_str(&std::fs::read_to_string(path)?, expected)
}

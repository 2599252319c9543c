use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use gtmm_core::matmul::IntMatrix;
use gtmm_core::puzzle::Puzzle;
use num_bigint::{BigInt, BigUint};
use serde_json::Value;
use sha2::{Digest, Sha256};

/// Files read during one run, by path, with their SHA-256.
#[derive(Default)]
pub struct InputLog(pub BTreeMap<String, String>);

impl InputLog {
    pub fn read(&mut self, path: &Path) -> Result<Vec<u8>> {
        let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
        self.0.insert(path.display().to_string(), hex::encode(Sha256::digest(&bytes)));
        Ok(bytes)
    }

    pub fn read_text(&mut self, path: &Path) -> Result<String> {
        String::from_utf8(self.read(path)?).with_context(|| format!("{} is not UTF-8", path.display()))
    }

    /// A JSON object, unwrapping `result.object` when given a `gtmm build` report.
    pub fn read_object(&mut self, path: &Path) -> Result<Value> {
        let text = self.read_text(path)?;
        let v: Value = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        Ok(match v.pointer("/result/object") {
            Some(obj) if v.get("schema").is_some() => obj.clone(),
            _ => v,
        })
    }

    /// A puzzle from a text file or from a JSON object with `rows`.
    pub fn read_puzzle(&mut self, path: &Path) -> Result<Puzzle> {
        let text = self.read_text(path)?;
        if text.trim_start().starts_with('{') {
            let v: Value = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
            let obj = v.pointer("/result/object").unwrap_or(&v);
            let rows = obj
                .get("rows")
                .and_then(Value::as_array)
                .context("puzzle JSON needs a \"rows\" array of strings")?;
            let lines: Vec<&str> = rows.iter().filter_map(Value::as_str).collect();
            return Ok(Puzzle::parse(&lines.join("\n"))?);
        }
        Ok(Puzzle::parse(&text)?)
    }

    pub fn read_matrix(&mut self, path: &Path) -> Result<IntMatrix> {
        let bytes = self.read(path)?;
        parse_matrix(&bytes).with_context(|| format!("reading matrix {}", path.display()))
    }
}

pub fn parse_matrix(bytes: &[u8]) -> Result<IntMatrix> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(bytes);
    let mut rows = Vec::new();
    for rec in reader.records() {
        let rec = rec?;
        let row = rec
            .iter()
            .map(|cell| cell.parse::<BigInt>().with_context(|| format!("not an integer: {cell:?}")))
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    Ok(IntMatrix::from_rows(&rows)?)
}

pub fn write_matrix(path: &Path, m: &IntMatrix) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("writing {}", path.display()))?;
    for row in m.to_rows() {
        w.write_record(row.iter().map(ToString::to_string))?;
    }
    w.flush()?;
    Ok(())
}

/// `k=3,m=6` (possibly repeated) into a map; later keys win.
pub fn parse_params(items: &[String]) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for item in items {
        for kv in item.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let Some((k, v)) = kv.split_once('=') else {
                bail!("parameter {kv:?} is not key=value");
            };
            out.insert(k.trim().to_owned(), v.trim().to_owned());
        }
    }
    Ok(out)
}

/// A nonnegative integer written as a product of powers, e.g. `2*17^6`.
pub fn parse_big(s: &str) -> Result<BigUint> {
    let mut acc = BigUint::from(1u32);
    for factor in s.split('*') {
        let (base, exp) = match factor.split_once('^') {
            Some((b, e)) => (b, e.trim().parse::<u32>().with_context(|| format!("bad exponent in {s:?}"))?),
            None => (factor, 1),
        };
        let base: BigUint = base.trim().parse().with_context(|| format!("not an integer: {s:?}"))?;
        acc *= base.pow(exp);
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn params_and_numbers() {
        let p = parse_params(&["k=3, m=6".into(), "m=7".into()]).unwrap();
        assert_eq!(p["k"], "3");
        assert_eq!(p["m"], "7");
        assert!(parse_params(&["k".into()]).is_err());
        assert_eq!(parse_big("2*17^6").unwrap(), BigUint::from(2 * 17u64.pow(6)));
        assert!(parse_big("x").is_err());
    }

    #[test]
    fn csv_round_trip() {
        let m = parse_matrix(b"1, 2\n-3,40000000000000000000000\n").unwrap();
        assert_eq!(m.shape(), (2, 2));
        assert!(parse_matrix(b"1,2\n3\n").is_err());
        assert!(parse_matrix(b"1,x\n").is_err());
    }
}

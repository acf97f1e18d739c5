//! Known-answer vectors for the byte-string hash.
//!
//! File format: one vector per line, `NAME <tab> input-hex <tab> expected`,
//! where `expected` is the digest in hex or the word `bottom`. Lines starting
//! with `#` and blank lines are ignored. A name starting with `p<prime>-` runs
//! at that explicit prime, `l<lambda>-` at the security level `lambda`.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use thiserror::Error;

use crate::hash::{HashContext, HashError, Outcome};

/// Vectors produced by the independent reference walk.
pub const EMBEDDED: &str = include_str!("../data/hash_kat.tsv");

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum KatError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum KatParams {
    Prime(BigUint),
    Security(u32),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KatVector {
    pub name: String,
    pub params: KatParams,
    pub input: Vec<u8>,
    /// `None` means the walk is expected to fail.
    pub expected: Option<Vec<u8>>,
}

pub fn parse(text: &str) -> Result<Vec<KatVector>, KatError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let err = |msg: &str| KatError::Parse { line, msg: msg.to_string() };
        if raw.trim().is_empty() || raw.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = raw.split('\t').collect();
        if cols.len() != 3 {
            return Err(err("expected three tab-separated columns"));
        }
        let name = cols[0].trim().to_string();
        let tag = name.split('-').next().unwrap_or_default();
        let params = if let Some(p) = tag.strip_prefix('p') {
            KatParams::Prime(p.parse().map_err(|_| err("bad prime in name"))?)
        } else if let Some(l) = tag.strip_prefix('l') {
            KatParams::Security(l.parse().map_err(|_| err("bad security level in name"))?)
        } else {
            return Err(err("name must start with p<prime>- or l<lambda>-"));
        };
        let input = hex::decode(cols[1].trim()).map_err(|_| err("input is not hex"))?;
        let expected = match cols[2].trim() {
            "bottom" => None,
            h => Some(hex::decode(h).map_err(|_| err("expected digest is not hex"))?),
        };
        out.push(KatVector { name, params, input, expected });
    }
    Ok(out)
}

/// Outcome of running one vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KatResult {
    pub name: String,
    pub passed: bool,
    pub got: Option<Vec<u8>>,
}

/// Runs every vector, sequentially or with intra-step parallelism.
pub fn run(vectors: &[KatVector], parallel: bool) -> Result<Vec<KatResult>, HashError> {
    let mut contexts: BTreeMap<KatParams, HashContext<BigUint>> = BTreeMap::new();
    let mut out = Vec::with_capacity(vectors.len());
    for v in vectors {
        if !contexts.contains_key(&v.params) {
            let ctx = match &v.params {
                KatParams::Prime(p) => HashContext::with_prime(p.clone())?,
                KatParams::Security(l) => HashContext::for_security(*l)?,
            };
            contexts.insert(v.params.clone(), ctx);
        }
        let ctx = &contexts[&v.params];
        let got = match ctx.hash_bytes_with(&v.input, parallel)? {
            Outcome::Value(d) => Some(d.as_bytes().to_vec()),
            Outcome::Bottom { .. } => None,
        };
        out.push(KatResult { name: v.name.clone(), passed: got == v.expected, got });
    }
    Ok(out)
}

//! Elliptic 2-isogeny walk hash and the timing harness that compares it with
//! the genus-2 hash.

use std::fmt::Write as _;
use std::str::FromStr;
use std::sync::Arc;
use std::time::Instant;

use num_bigint::BigUint;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{is_probable_prime, FieldContext, FieldError, FieldHandle, Fp2, Residue};
use crate::hash::{integer_digits, HashContext, HashError};
use crate::invariants::{cardona_quer_of, EllipticRootsForm, InvariantError};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum BaselineError {
    #[error("p = {0} must be a prime > 5 with p = 3 mod 4")]
    BadPrime(BigUint),
    #[error("bit value {0} is not 0 or 1")]
    BadBit(u8),
    #[error("unsupported security level {0}")]
    Security(u32),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Invariant(#[from] InvariantError),
    #[error(transparent)]
    Hash(#[from] HashError),
}

/// Smallest prime `p > 2^(2 lambda)` with `p = 3 mod 4`.
pub fn cgl_prime(lambda: u32) -> BigUint {
    let mut p = (BigUint::from(1u32) << (2 * lambda)) + 3u32;
    while !is_probable_prime(&p) {
        p += 4u32;
    }
    p
}

/// Final curve of the walk and the number of square roots taken.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CglWalk<U: Residue> {
    pub j: Fp2<U>,
    pub sqrt_calls: u64,
}

/// Non-backtracking 2-isogeny walk from `y^2 = x^3 + x` (`j = 1728`).
///
/// Curves are kept as `y^2 = x (x - r_1)(x - r_2)` with `0` the kernel of the
/// step just taken; bit `b` picks `r_b`, the roots in canonical order.
pub fn cgl_walk<U: Residue>(field: &Arc<FieldContext<U>>, bits: &[u8]) -> Result<CglWalk<U>, BaselineError> {
    let p = field.p_big();
    if p % 4u32 != BigUint::from(3u32) || p <= &BigUint::from(5u32) {
        return Err(BaselineError::BadPrime(p.clone()));
    }
    let i = field.from_i64(-1).sqrt().expect("square in F_p2");
    let sorted = |x: Fp2<U>, y: Fp2<U>| if y < x { [y, x] } else { [x, y] };
    let mut others = sorted(i.clone(), -&i);
    let mut sqrt_calls = 0;
    for &bit in bits {
        if bit > 1 {
            return Err(BaselineError::BadBit(bit));
        }
        let r = &others[bit as usize];
        let s1 = &others[1 - bit as usize] - r;
        let s2 = -r;
        let a = -&(&s1 + &s2);
        let b = &s1 * &s2;
        let sb = b.sqrt().expect("supersingular curves have rational 2-torsion");
        sqrt_calls += 1;
        let two_sb = &sb + &sb;
        others = sorted(&a + &two_sb, &a - &two_sb);
    }
    let [x, y] = others;
    let e = EllipticRootsForm::new([field.zero(), x, y])?;
    Ok(CglWalk { j: e.j_invariant(), sqrt_calls })
}

pub fn cgl_elliptic_hash<U: Residue>(field: &Arc<FieldContext<U>>, bits: &[u8]) -> Result<Fp2<U>, BaselineError> {
    Ok(cgl_walk(field, bits)?.j)
}

/// The message cut into three nearly equal chunks, each hashed on its own.
pub fn three_cgl_hash<U: Residue>(field: &Arc<FieldContext<U>>, bits: &[u8]) -> Result<[Fp2<U>; 3], BaselineError> {
    let n = bits.len();
    let cut = |k: usize| k * n / 3;
    Ok([
        cgl_elliptic_hash(field, &bits[cut(0)..cut(1)])?,
        cgl_elliptic_hash(field, &bits[cut(1)..cut(2)])?,
        cgl_elliptic_hash(field, &bits[cut(2)..cut(3)])?,
    ])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BenchMode {
    #[serde(rename = "g2-seq")]
    Genus2Sequential,
    #[serde(rename = "g2-par")]
    Genus2Parallel,
    #[serde(rename = "cgl")]
    Cgl,
    #[serde(rename = "3cgl")]
    ThreeCgl,
}

impl BenchMode {
    pub const ALL: [BenchMode; 4] = [Self::Genus2Sequential, Self::Genus2Parallel, Self::Cgl, Self::ThreeCgl];

    pub fn name(self) -> &'static str {
        match self {
            Self::Genus2Sequential => "g2-seq",
            Self::Genus2Parallel => "g2-par",
            Self::Cgl => "cgl",
            Self::ThreeCgl => "3cgl",
        }
    }
}

impl FromStr for BenchMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Self::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| format!("unknown mode {s:?}, expected one of g2-seq, g2-par, cgl, 3cgl"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BenchConfig {
    pub lambda: u32,
    pub message_bits: usize,
    pub samples: usize,
    pub seed: u64,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self { lambda: 128, message_bits: 100, samples: 20, seed: 0x5eed }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub mode: BenchMode,
    pub lambda: u32,
    pub prime_bits: u64,
    pub message_bits: usize,
    pub samples: usize,
    /// Bits actually walked, padding included.
    pub walked_bits: u64,
    pub steps: u64,
    pub sqrt_calls: u64,
    pub sqrt_per_step: f64,
    pub bits_per_step: u32,
    pub bottoms: u64,
    pub total_ms: f64,
    pub ms_per_bit: f64,
}

/// Random messages of exactly `bits` bits (top bit set).
fn random_messages(cfg: &BenchConfig) -> Vec<BigUint> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    (0..cfg.samples)
        .map(|_| {
            let mut bytes = vec![0u8; cfg.message_bits.div_ceil(8)];
            rng.fill_bytes(&mut bytes);
            let m = BigUint::from_bytes_be(&bytes);
            let m = m % (BigUint::from(1u32) << cfg.message_bits);
            m | (BigUint::from(1u32) << (cfg.message_bits - 1))
        })
        .collect()
}

fn bits_lsb_first(m: &BigUint, len: usize) -> Vec<u8> {
    (0..len as u64).map(|i| u8::from(m.bit(i))).collect()
}

/// Times one mode on `cfg.samples` random messages drawn from `cfg.seed`.
pub fn bench(cfg: &BenchConfig, mode: BenchMode) -> Result<BenchReport, BaselineError> {
    if cfg.lambda < 8 || cfg.message_bits == 0 || cfg.samples == 0 {
        return Err(BaselineError::Security(cfg.lambda));
    }
    let msgs = random_messages(cfg);
    let (mut steps, mut sqrt_calls, mut bottoms, mut walked) = (0u64, 0u64, 0u64, 0u64);
    let (prime_bits, bits_per_step, elapsed) = match mode {
        BenchMode::Genus2Sequential | BenchMode::Genus2Parallel => {
            let ctx = HashContext::<BigUint>::for_security(cfg.lambda)?;
            let parallel = mode == BenchMode::Genus2Parallel;
            let digits: Vec<Vec<u8>> = msgs.iter().map(integer_digits).collect();
            let t0 = Instant::now();
            for d in &digits {
                let t = ctx.trace(d, parallel)?;
                match t.bottom_at {
                    Some(_) => bottoms += 1,
                    None => {
                        let last = t.lists.last().expect("nonempty");
                        cardona_quer_of(last.factors(), ctx.field())?;
                    }
                }
                steps += t.lists.len() as u64 - 1;
                sqrt_calls += t.sqrt_calls;
                walked += 3 * d.len() as u64;
            }
            (ctx.field().p_big().bits(), 3, t0.elapsed())
        }
        BenchMode::Cgl | BenchMode::ThreeCgl => {
            let field = FieldContext::new(cgl_prime(cfg.lambda))?;
            let bits: Vec<Vec<u8>> = msgs.iter().map(|m| bits_lsb_first(m, cfg.message_bits)).collect();
            let t0 = Instant::now();
            for b in &bits {
                if mode == BenchMode::Cgl {
                    sqrt_calls += cgl_walk(&field, b)?.sqrt_calls;
                } else {
                    three_cgl_hash(&field, b)?;
                    sqrt_calls += b.len() as u64;
                }
                steps += b.len() as u64;
                walked += b.len() as u64;
            }
            (field.p_big().bits(), 1, t0.elapsed())
        }
    };
    let total_ms = elapsed.as_secs_f64() * 1e3;
    Ok(BenchReport {
        mode,
        lambda: cfg.lambda,
        prime_bits,
        message_bits: cfg.message_bits,
        samples: cfg.samples,
        walked_bits: walked,
        steps,
        sqrt_calls,
        sqrt_per_step: if steps == 0 { 0.0 } else { sqrt_calls as f64 / steps as f64 },
        bits_per_step,
        bottoms,
        total_ms,
        ms_per_bit: if walked == 0 { 0.0 } else { total_ms / walked as f64 },
    })
}

/// Plain-text table, one row per report.
pub fn render_table(reports: &[BenchReport]) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:<7} {:>6} {:>7} {:>8} {:>11} {:>9} {:>8} {:>12}",
        "mode", "lambda", "p bits", "samples", "walked bits", "sqrt/step", "bottoms", "ms/bit"
    );
    for r in reports {
        let _ = writeln!(
            s,
            "{:<7} {:>6} {:>7} {:>8} {:>11} {:>9.3} {:>8} {:>12.6}",
            r.mode.name(),
            r.lambda,
            r.prime_bits,
            r.samples,
            r.walked_bits,
            r.sqrt_per_step,
            r.bottoms,
            r.ms_per_bit
        );
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_walks() {
        let f = FieldContext::new(19u64).unwrap();
        assert_eq!(cgl_elliptic_hash(&f, &[]).unwrap(), f.from_u64(1728));
        assert_eq!(cgl_elliptic_hash(&f, &[0, 1, 0, 1]).unwrap(), f.from_u64(7));
        assert_eq!(cgl_elliptic_hash(&f, &[0, 1, 1, 0, 1, 0, 0]).unwrap(), f.from_u64(18));
        let f = FieldContext::new(1019u64).unwrap();
        let bits: Vec<u8> = "10110011100011".bytes().map(|b| b - b'0').collect();
        assert_eq!(cgl_elliptic_hash(&f, &bits).unwrap(), f.element(600, 791).unwrap());
        assert!(cgl_elliptic_hash(&FieldContext::new(13u64).unwrap(), &[]).is_err());
        assert_eq!(cgl_elliptic_hash(&f, &[2]), Err(BaselineError::BadBit(2)));
    }

    #[test]
    fn three_chunks() {
        let f = FieldContext::new(1019u64).unwrap();
        let bits = [1, 0, 1, 1, 0, 0, 1, 1];
        let t = three_cgl_hash(&f, &bits).unwrap();
        assert_eq!(t[0], cgl_elliptic_hash(&f, &bits[..2]).unwrap());
        assert_eq!(t[1], cgl_elliptic_hash(&f, &bits[2..5]).unwrap());
        assert_eq!(t[2], cgl_elliptic_hash(&f, &bits[5..]).unwrap());
    }

    #[test]
    fn cgl_primes() {
        assert_eq!(cgl_prime(8), BigUint::from(65539u32));
        assert_eq!(&cgl_prime(128) % 4u32, BigUint::from(3u32));
    }

    #[test]
    fn report_round_trip() {
        let cfg = BenchConfig { lambda: 16, message_bits: 12, samples: 2, seed: 1 };
        for mode in BenchMode::ALL {
            let r = bench(&cfg, mode).unwrap();
            let back: BenchReport = serde_json::from_str(&serde_json::to_string(&r).unwrap()).unwrap();
            assert_eq!(back, r);
            assert_eq!(mode.name().parse::<BenchMode>().unwrap(), mode);
        }
    }
}

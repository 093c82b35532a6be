//! Binary strings over {−1, +1}, the parameter of every random series.
//!
//! Two kinds of source implement [`BitSource`]:
//!
//! * [`SeededBits`], an unbounded lazily evaluated stream. Bit `i` is a pure
//!   function of `(seed, i)`, so sources are random-access, immutable and
//!   prefix-stable by construction.
//! * [`BitString`], a finite materialised prefix loaded from a seed, a file
//!   or a fixed pattern.
//!
//! The stream behind [`SeededBits`] is SplitMix64: word `w` is the `w`-th
//! output of a SplitMix64 generator seeded with `seed`, and bit `i` is bit
//! `63 − i mod 64` of word `i / 64` (MSB first). A set bit maps to +1.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Where a bit string came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Origin {
    Seed(u64),
    File { path: PathBuf, mode: FileMode },
    Pattern(String),
    /// The interleaved subsequence β_k of a parent string.
    Subsequence { parent: Box<Origin>, k: u64 },
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Origin::Seed(s) => write!(f, "seed:{s}"),
            Origin::File { path, mode } => write!(f, "file:{}:{mode}", path.display()),
            Origin::Pattern(p) => write!(f, "pattern:{p}"),
            Origin::Subsequence { parent, k } => write!(f, "beta[{k}]({parent})"),
        }
    }
}

/// Encoding of a bit file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum FileMode {
    /// Raw bytes, consumed MSB first.
    #[default]
    Raw,
    /// ASCII `'0'`/`'1'`, whitespace ignored.
    Ascii,
}

impl fmt::Display for FileMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FileMode::Raw => "raw",
            FileMode::Ascii => "ascii",
        })
    }
}

/// A read-only, random-access sequence over {−1, +1}.
pub trait BitSource: Send + Sync {
    /// Bit at `index`, as −1 or +1.
    fn bit(&self, index: u64) -> Result<i8>;

    /// Number of available bits, `None` for an unbounded source.
    fn available(&self) -> Option<u64>;

    fn origin(&self) -> Origin;

    /// The first `n` bits as an owned string.
    fn prefix(&self, n: u64) -> Result<BitString> {
        let bits = (0..n).map(|i| self.bit(i)).collect::<Result<Vec<_>>>()?;
        Ok(BitString {
            bits,
            origin: self.origin(),
        })
    }
}

impl<S: BitSource + ?Sized> BitSource for std::sync::Arc<S> {
    fn bit(&self, index: u64) -> Result<i8> {
        (**self).bit(index)
    }
    fn available(&self) -> Option<u64> {
        (**self).available()
    }
    fn origin(&self) -> Origin {
        (**self).origin()
    }
}

impl<S: BitSource + ?Sized> BitSource for &S {
    fn bit(&self, index: u64) -> Result<i8> {
        (**self).bit(index)
    }
    fn available(&self) -> Option<u64> {
        (**self).available()
    }
    fn origin(&self) -> Origin {
        (**self).origin()
    }
}

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// The `word`-th output of SplitMix64 seeded with `seed`.
#[inline]
pub fn splitmix64(seed: u64, word: u64) -> u64 {
    let mut z = seed.wrapping_add(word.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Unbounded seeded stream; see the module docs for the exact layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeededBits {
    seed: u64,
}

impl SeededBits {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    #[inline]
    fn raw(&self, index: u64) -> i8 {
        let word = splitmix64(self.seed, index >> 6);
        if (word >> (63 - (index & 63))) & 1 == 1 {
            1
        } else {
            -1
        }
    }
}

impl BitSource for SeededBits {
    #[inline]
    fn bit(&self, index: u64) -> Result<i8> {
        Ok(self.raw(index))
    }

    fn available(&self) -> Option<u64> {
        None
    }

    fn origin(&self) -> Origin {
        Origin::Seed(self.seed)
    }
}

/// A finite string over {−1, +1} with its provenance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitString {
    bits: Vec<i8>,
    origin: Origin,
}

impl BitString {
    /// Validates that every element is ±1.
    pub fn from_signs(bits: Vec<i8>, origin: Origin) -> Result<Self> {
        if let Some(pos) = bits.iter().position(|&b| b != 1 && b != -1) {
            return Err(Error::InvalidArgument(format!(
                "bit {pos} is {}, expected -1 or +1",
                bits[pos]
            )));
        }
        Ok(Self { bits, origin })
    }

    pub fn constant(sign: i8, n: usize) -> Self {
        let sign = if sign >= 0 { 1 } else { -1 };
        Self {
            bits: vec![sign; n],
            origin: Origin::Pattern(format!("constant{sign:+}")),
        }
    }

    /// (+1, −1, +1, …)
    pub fn alternating(n: usize) -> Self {
        Self {
            bits: (0..n).map(|i| if i % 2 == 0 { 1 } else { -1 }).collect(),
            origin: Origin::Pattern("alternating".into()),
        }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn as_slice(&self) -> &[i8] {
        &self.bits
    }

    pub fn into_vec(self) -> Vec<i8> {
        self.bits
    }
}

impl BitSource for BitString {
    #[inline]
    fn bit(&self, index: u64) -> Result<i8> {
        usize::try_from(index)
            .ok()
            .and_then(|i| self.bits.get(i).copied())
            .ok_or(Error::SourceExhausted {
                index,
                available: self.bits.len() as u64,
            })
    }

    fn available(&self) -> Option<u64> {
        Some(self.bits.len() as u64)
    }

    fn origin(&self) -> Origin {
        self.origin.clone()
    }
}

/// The first `n` bits of the seeded stream.
pub fn bits_from_seed(seed: u64, n: usize) -> BitString {
    let src = SeededBits::new(seed);
    BitString {
        bits: (0..n as u64).map(|i| src.raw(i)).collect(),
        origin: Origin::Seed(seed),
    }
}

/// Decodes `bytes` MSB first: bit 1 ↦ +1, bit 0 ↦ −1.
pub fn decode_raw(bytes: &[u8]) -> Vec<i8> {
    bytes
        .iter()
        .flat_map(|&b| (0..8).rev().map(move |s| if (b >> s) & 1 == 1 { 1 } else { -1 }))
        .collect()
}

fn decode_ascii(text: &[u8], path: &Path) -> Result<Vec<i8>> {
    let mut bits = Vec::with_capacity(text.len());
    for (offset, &c) in text.iter().enumerate() {
        match c {
            b'0' => bits.push(-1),
            b'1' => bits.push(1),
            c if c.is_ascii_whitespace() => {}
            c => {
                return Err(Error::BadAsciiBit {
                    path: path.to_path_buf(),
                    found: c as char,
                    offset,
                })
            }
        }
    }
    Ok(bits)
}

/// The first `n` bits stored in a file.
pub fn bits_from_file(path: impl AsRef<Path>, n: usize, mode: FileMode) -> Result<BitString> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|source| Error::FileRead {
        path: path.to_path_buf(),
        source,
    })?;
    let mut bits = match mode {
        FileMode::Raw => decode_raw(&bytes),
        FileMode::Ascii => decode_ascii(&bytes, path)?,
    };
    if bits.len() < n {
        return Err(Error::FileTooShort {
            path: path.to_path_buf(),
            requested: n as u64,
            available: bits.len() as u64,
        });
    }
    bits.truncate(n);
    Ok(BitString {
        bits,
        origin: Origin::File {
            path: path.to_path_buf(),
            mode,
        },
    })
}

/// A value of the Cantor pairing bijection ω² → ω.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PairingIndex {
    pub k: u64,
    pub j: u64,
    pub value: u64,
}

impl PairingIndex {
    pub fn new(k: u64, j: u64) -> Result<Self> {
        Ok(Self {
            k,
            j,
            value: pairing(k, j)?,
        })
    }

    pub fn from_value(value: u64) -> Self {
        let (k, j) = unpair(value);
        Self { k, j, value }
    }
}

/// Cantor pairing φ(k, j) = (k+j)(k+j+1)/2 + j.
pub fn pairing(k: u64, j: u64) -> Result<u64> {
    let s = k as u128 + j as u128;
    s.checked_mul(s + 1)
        .map(|t| t / 2 + j as u128)
        .and_then(|v| u64::try_from(v).ok())
        .ok_or(Error::PairingOverflow { k, j })
}

/// Inverse of [`pairing`].
pub fn unpair(z: u64) -> (u64, u64) {
    // w = floor((sqrt(8z+1) - 1) / 2), corrected for float rounding.
    let z128 = z as u128;
    let tri = |w: u128| w * (w + 1) / 2;
    let mut w = ((((8.0 * z as f64) + 1.0).sqrt() - 1.0) / 2.0) as u128;
    while tri(w) > z128 {
        w -= 1;
    }
    while tri(w + 1) <= z128 {
        w += 1;
    }
    let j = (z128 - tri(w)) as u64;
    let k = w as u64 - j;
    (k, j)
}

/// Bits φ(k, 0), …, φ(k, p−1) of `alpha`: the first `p` bits of β_k.
pub fn subsequence<S: BitSource + ?Sized>(alpha: &S, k: u64, p: usize) -> Result<BitString> {
    let mut bits = Vec::with_capacity(p);
    for j in 0..p as u64 {
        bits.push(alpha.bit(pairing(k, j)?)?);
    }
    Ok(BitString {
        bits,
        origin: Origin::Subsequence {
            parent: Box::new(alpha.origin()),
            k,
        },
    })
}

/// Largest double strictly below 1.
const BELOW_ONE: f64 = 1.0 - f64::EPSILON / 2.0;

/// Reads `bits` as binary digits (+1 ↦ 1, −1 ↦ 0) of an integer v and
/// returns the dyadic midpoint (v + 1/2)·2^{−p}.
///
/// Exact for p ≤ 52. Beyond that the value is rounded, and clamped to the
/// largest double below 1 when it would round up to 1.
pub fn bits_to_unit_real(bits: &[i8]) -> Result<f64> {
    if bits.is_empty() {
        return Err(Error::EmptyBits);
    }
    Ok(midpoint(bits).clamp(f64::MIN_POSITIVE, BELOW_ONE))
}

fn midpoint(bits: &[i8]) -> f64 {
    bits.iter()
        .rev()
        .fold(0.5, |acc, &b| (acc + if b > 0 { 1.0 } else { 0.0 }) * 0.5)
}

/// The midpoint folded into the lower half: returns `(min(q, 1 − q), q > 1/2)`
/// without ever forming `1 − q` in floating point.
pub(crate) fn lower_tail_midpoint(bits: &[i8]) -> Result<(f64, bool)> {
    let first = *bits.first().ok_or(Error::EmptyBits)?;
    if first > 0 {
        // 1 − (v + ½)2^{−p} is the midpoint of the complemented digits.
        let low: f64 = bits
            .iter()
            .rev()
            .fold(0.5, |acc, &b| (acc + if b > 0 { 0.0 } else { 1.0 }) * 0.5);
        Ok((low.max(f64::MIN_POSITIVE), true))
    } else {
        Ok((midpoint(bits).max(f64::MIN_POSITIVE), false))
    }
}

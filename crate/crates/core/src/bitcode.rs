//! Packed sign vectors and the two integer kernels every estimator reduces to.
//!
//! A sign `s_i` is stored as one bit: `0` encodes `+1`, `1` encodes `-1`.
//! Bit `j` of word `w` holds sign index `w * WORD_BITS + j`. Bits past the
//! code length are always zero, so XOR + popcount over whole words is exact.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of sign bits per storage word.
pub const WORD_BITS: usize = u64::BITS as usize;

#[inline]
fn words_for(len: usize) -> usize {
    len.div_ceil(WORD_BITS)
}

/// Mask selecting the valid bits of the last word of a code of length `len`.
#[inline]
fn tail_mask(len: usize) -> u64 {
    match len % WORD_BITS {
        0 => u64::MAX,
        r => (1u64 << r) - 1,
    }
}

/// The value assigned to `sign(0)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignZero {
    #[default]
    Plus,
    Minus,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuantizerConfig {
    pub sign_zero: SignZero,
}

impl QuantizerConfig {
    /// Returns `true` when `value` quantizes to `-1`.
    #[inline]
    pub fn is_negative(&self, value: f64) -> bool {
        value < 0.0 || (value == 0.0 && self.sign_zero == SignZero::Minus)
    }
}

/// A packed vector in `{-1, +1}^m`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BinaryCode {
    len: usize,
    words: Vec<u64>,
}

impl BinaryCode {
    /// Packs a slice of `+1`/`-1` values.
    pub fn pack(signs: &[i8]) -> Result<Self> {
        if signs.is_empty() {
            return Err(Error::invalid("a code needs at least one sign"));
        }
        if let Some(pos) = signs.iter().position(|&s| s != 1 && s != -1) {
            return Err(Error::invalid(format!(
                "sign at index {pos} is {}, expected -1 or +1",
                signs[pos]
            )));
        }
        Ok(Self::from_fn(signs.len(), |i| signs[i] == -1))
    }

    /// Builds a code of length `len` whose bit `i` is set (sign `-1`) when
    /// `negative(i)` holds.
    ///
    /// # Panics
    ///
    /// Panics if `len` is zero.
    pub fn from_fn(len: usize, mut negative: impl FnMut(usize) -> bool) -> Self {
        assert!(len > 0, "a code needs at least one sign");
        let mut words = vec![0u64; words_for(len)];
        for i in 0..len {
            if negative(i) {
                words[i / WORD_BITS] |= 1u64 << (i % WORD_BITS);
            }
        }
        BinaryCode { len, words }
    }

    /// Quantizes `values[i] + dither[i]` to signs.
    pub fn quantize(values: &[f64], dither: &[f64], config: QuantizerConfig) -> Result<Self> {
        if values.len() != dither.len() {
            return Err(Error::invalid(format!(
                "values have length {} but dither has length {}",
                values.len(),
                dither.len()
            )));
        }
        if values.is_empty() {
            return Err(Error::invalid("a code needs at least one sign"));
        }
        Ok(Self::from_fn(values.len(), |i| {
            config.is_negative(values[i] + dither[i])
        }))
    }

    /// Wraps raw storage words, rejecting a wrong word count or set padding bits.
    pub fn from_words(len: usize, words: Vec<u64>) -> Result<Self> {
        if len == 0 {
            return Err(Error::invalid("a code needs at least one sign"));
        }
        if words.len() != words_for(len) {
            return Err(Error::invalid(format!(
                "code of length {len} needs {} words, got {}",
                words_for(len),
                words.len()
            )));
        }
        let last = *words.last().expect("non-empty");
        if last & !tail_mask(len) != 0 {
            return Err(Error::invalid("padding bits beyond the code length are set"));
        }
        Ok(BinaryCode { len, words })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    /// Always `false`; codes have at least one sign.
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// Sign at position `i`.
    pub fn sign(&self, i: usize) -> i8 {
        assert!(i < self.len, "index {i} out of range for code of length {}", self.len);
        if self.words[i / WORD_BITS] >> (i % WORD_BITS) & 1 == 1 {
            -1
        } else {
            1
        }
    }

    pub fn unpack(&self) -> Vec<i8> {
        (0..self.len).map(|i| self.sign(i)).collect()
    }

    /// The code with every sign flipped.
    pub fn complement(&self) -> Self {
        let mut words: Vec<u64> = self.words.iter().map(|w| !w).collect();
        if let Some(last) = words.last_mut() {
            *last &= tail_mask(self.len);
        }
        BinaryCode { len: self.len, words }
    }

    fn check_len(&self, other: &Self) -> Result<()> {
        if self.len != other.len {
            return Err(Error::invalid(format!(
                "code lengths differ: {} vs {}",
                self.len, other.len
            )));
        }
        Ok(())
    }

    /// Number of positions where the two codes differ.
    pub fn hamming(&self, other: &Self) -> Result<u64> {
        self.check_len(other)?;
        Ok(self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| u64::from((a ^ b).count_ones()))
            .sum())
    }

    /// Inner product of the two `{-1, +1}` vectors, `m - 2 d_H`.
    pub fn signed_dot(&self, other: &Self) -> Result<i64> {
        let d = self.hamming(other)?;
        Ok(self.len as i64 - 2 * d as i64)
    }
}

/// Two codes of one point under independent dithers `tau` and `tau'`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DualCode {
    first: BinaryCode,
    second: BinaryCode,
}

impl DualCode {
    pub fn new(first: BinaryCode, second: BinaryCode) -> Result<Self> {
        first.check_len(&second)?;
        Ok(DualCode { first, second })
    }

    /// Code under the first dither.
    pub fn first(&self) -> &BinaryCode {
        &self.first
    }

    /// Code under the second dither.
    pub fn second(&self) -> &BinaryCode {
        &self.second
    }

    /// Bits per branch.
    pub fn len(&self) -> usize {
        self.first.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

//! The non-monotonic modulo quantizer and quantized codes.
//!
//! The scalar map is `v -> ceil(v) mod 2^B`, normalized to `{0, ..., 2^B - 1}`
//! for negative arguments. Non-contiguous regions quantize to the same symbol,
//! so the quantizer never saturates; only code consistency carries meaning.

use crate::error::{Error, Result};

/// Largest supported bit depth. `2^B` must stay exactly representable and
/// leave headroom for the modular arithmetic below.
pub const MAX_BITS: u32 = 32;

/// Quantize one scaled measurement to a symbol in `{0, ..., 2^B - 1}`.
///
/// At exact integers `n` the convention is `Q(n) = n mod 2^B` (a measure-zero
/// event under dither, but pinned so independent reimplementations agree
/// bit-for-bit).
pub fn quantize_scalar(value: f64, bits: u32) -> Result<u32> {
    if !value.is_finite() {
        return Err(Error::domain("quantizer input must be finite"));
    }
    if bits == 0 || bits > MAX_BITS {
        return Err(Error::parameter(format!(
            "bit depth must be in 1..={MAX_BITS}, got {bits}"
        )));
    }
    let levels = (1u64 << bits) as f64;
    // ceil(value) is an exact integer-valued f64; rem_euclid of two exact
    // integer-valued doubles is exact, so this holds for the whole f64 range.
    let symbol = value.ceil().rem_euclid(levels);
    Ok(symbol as u32)
}

/// Outcome of comparing two codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Consistency {
    /// True iff every symbol agrees.
    pub equal: bool,
    /// Number of differing symbols.
    pub hamming: usize,
}

/// The vector of quantizer outputs for one acquisition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuantizedCode {
    symbols: Vec<u32>,
    bits: u32,
}

impl QuantizedCode {
    /// Wrap raw symbols, checking the alphabet.
    pub fn new(symbols: Vec<u32>, bits: u32) -> Result<Self> {
        if bits == 0 || bits > MAX_BITS {
            return Err(Error::parameter(format!(
                "bit depth must be in 1..={MAX_BITS}, got {bits}"
            )));
        }
        let limit = if bits == 32 { u32::MAX } else { (1u32 << bits) - 1 };
        if let Some(bad) = symbols.iter().find(|&&s| s > limit) {
            return Err(Error::parameter(format!(
                "symbol {bad} outside alphabet 0..={limit}"
            )));
        }
        Ok(QuantizedCode { symbols, bits })
    }

    pub fn symbols(&self) -> &[u32] {
        &self.symbols
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// Compare against another code of the same length and bit depth.
    pub fn consistency(&self, other: &QuantizedCode) -> Result<Consistency> {
        if self.bits != other.bits {
            return Err(Error::dimension(format!(
                "bit depths differ: {} vs {}",
                self.bits, other.bits
            )));
        }
        if self.symbols.len() != other.symbols.len() {
            return Err(Error::dimension(format!(
                "code lengths differ: {} vs {}",
                self.symbols.len(),
                other.symbols.len()
            )));
        }
        let hamming = self
            .symbols
            .iter()
            .zip(&other.symbols)
            .filter(|(a, b)| a != b)
            .count();
        Ok(Consistency {
            equal: hamming == 0,
            hamming,
        })
    }
}

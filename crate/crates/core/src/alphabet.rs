//! Base64 alphabets and the constant tables derived from them.
//!
//! Every kernel constant is computed from an [`Alphabet`]; nothing in the
//! vector or scalar paths hard-codes characters. Alphabets are validated
//! once here, and the kernels trust the tables they are given.

use thiserror::Error;

use crate::wide_ops::Block;

pub const STANDARD_CHARS: &[u8; 64] =
    b"ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
pub const URL_SAFE_CHARS: &[u8; 64] =
    b"ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789-_";
pub const DEFAULT_PAD: u8 = b'=';

/// Translate-table entry for bytes outside the alphabet.
pub const SENTINEL: u8 = 0x80;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum AlphabetError {
    #[error("alphabet must have exactly 64 characters, got {0}")]
    WrongLength(usize),
    #[error("duplicate alphabet character {:?}", char::from(*.0))]
    DuplicateChar(u8),
    #[error("non-ASCII byte 0x{0:02x} in alphabet")]
    NonAsciiChar(u8),
    #[error("padding character {:?} is also an alphabet character", char::from(*.0))]
    PadInAlphabet(u8),
}

/// A bijection between 6-bit values and 64 distinct ASCII bytes, plus a
/// padding byte that is not one of them.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Alphabet {
    chars: [u8; 64],
    pad: u8,
}

impl Alphabet {
    pub const STANDARD: Alphabet = Alphabet {
        chars: *STANDARD_CHARS,
        pad: DEFAULT_PAD,
    };

    pub const URL_SAFE: Alphabet = Alphabet {
        chars: *URL_SAFE_CHARS,
        pad: DEFAULT_PAD,
    };

    /// Validates `chars` (index = 6-bit value) and `pad`.
    pub fn new(chars: &[u8], pad: u8) -> Result<Alphabet, AlphabetError> {
        let chars: [u8; 64] = chars
            .try_into()
            .map_err(|_| AlphabetError::WrongLength(chars.len()))?;
        let mut seen = [false; 128];
        for &c in &chars {
            if c >= 0x80 {
                return Err(AlphabetError::NonAsciiChar(c));
            }
            if seen[c as usize] {
                return Err(AlphabetError::DuplicateChar(c));
            }
            seen[c as usize] = true;
        }
        if pad >= 0x80 {
            return Err(AlphabetError::NonAsciiChar(pad));
        }
        if seen[pad as usize] {
            return Err(AlphabetError::PadInAlphabet(pad));
        }
        Ok(Alphabet { chars, pad })
    }

    pub fn chars(&self) -> &[u8; 64] {
        &self.chars
    }

    pub fn pad(&self) -> u8 {
        self.pad
    }

    /// Same characters, different padding byte.
    pub fn with_pad(&self, pad: u8) -> Result<Alphabet, AlphabetError> {
        Alphabet::new(&self.chars, pad)
    }

    /// 6-bit value of `c`, if it belongs to the alphabet.
    pub fn value_of(&self, c: u8) -> Option<u8> {
        self.chars.iter().position(|&x| x == c).map(|v| v as u8)
    }
}

impl Default for Alphabet {
    fn default() -> Self {
        Alphabet::STANDARD
    }
}

impl std::fmt::Debug for Alphabet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Alphabet")
            .field("chars", &String::from_utf8_lossy(&self.chars))
            .field("pad", &char::from(self.pad))
            .finish()
    }
}

/// Encoder constants: the 3-to-4 byte spreading permutation, the per-lane
/// rotate amounts that line each 6-bit field up at the bottom of a byte,
/// and the 64-character output lookup.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodeTables {
    pub shuffle_idx: Block,
    pub shift_bytes: Block,
    pub output_table: Block,
}

/// Rotate amounts for one 64-bit lane, least significant byte first. Each
/// 32-bit half holds bytes (s2, s1, s3, s2) and yields fields 0..3 in order.
pub const LANE_SHIFTS: [u8; 8] = [10, 4, 22, 16, 10 + 32, 4 + 32, 22 + 32, 16 + 32];

pub fn derive_encode_tables(alphabet: &Alphabet) -> EncodeTables {
    let mut shuffle_idx = Block::ZERO;
    for i in 0..16 {
        let base = 3 * i as u8;
        shuffle_idx.0[4 * i..4 * i + 4].copy_from_slice(&[base + 1, base, base + 2, base + 1]);
    }
    let mut shift_bytes = Block::ZERO;
    for lane in shift_bytes.0.chunks_exact_mut(8) {
        lane.copy_from_slice(&LANE_SHIFTS);
    }
    EncodeTables {
        shuffle_idx,
        shift_bytes,
        output_table: Block(alphabet.chars),
    }
}

/// Decoder constants.
///
/// `translate_lo`/`translate_hi` form a 128-entry ASCII-to-value table with
/// [`SENTINEL`] for every non-alphabet byte. `madd1` merges adjacent fields
/// into 12-bit words, `madd2` merges those into 24-bit groups, and
/// `pack_idx` compacts the sixteen 3-byte groups into the low 48 bytes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodeTables {
    pub translate_lo: Block,
    pub translate_hi: Block,
    pub madd1: Block,
    pub madd2: Block,
    pub pack_idx: Block,
}

impl DecodeTables {
    pub fn translate(&self, index: u8) -> u8 {
        let j = (index & 0x7f) as usize;
        if j < 64 {
            self.translate_lo.0[j]
        } else {
            self.translate_hi.0[j - 64]
        }
    }
}

pub fn derive_decode_tables(alphabet: &Alphabet) -> DecodeTables {
    let mut table = [SENTINEL; 128];
    for (v, &c) in alphabet.chars.iter().enumerate() {
        table[c as usize] = v as u8;
    }
    let mut translate_lo = Block::ZERO;
    let mut translate_hi = Block::ZERO;
    translate_lo.0.copy_from_slice(&table[..64]);
    translate_hi.0.copy_from_slice(&table[64..]);

    // Within each 16-bit pair the first character carries the high 6 bits.
    let madd1 = Block::from_u16s([0x0140; 32]);
    let madd2 = Block::from_u16s(std::array::from_fn(|i| if i % 2 == 0 { 0x1000 } else { 0x0001 }));

    // Each 32-bit group holds the 24-bit value little-endian, so the first
    // output byte of group g is at 4g+2.
    let mut pack_idx = Block::ZERO;
    for g in 0..16 {
        let b = 4 * g as u8;
        pack_idx.0[3 * g..3 * g + 3].copy_from_slice(&[b + 2, b + 1, b]);
    }

    DecodeTables {
        translate_lo,
        translate_hi,
        madd1,
        madd2,
        pack_idx,
    }
}

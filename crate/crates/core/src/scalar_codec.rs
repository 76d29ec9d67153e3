//! Table-driven scalar codec.
//!
//! This is the reference every vector path is checked against, and it also
//! handles the tails the vector loops leave behind and pinpoints errors
//! after the vector decoder reports that something went wrong.
//!
//! Decoding rules, checked in this order:
//!
//! 1. any byte that is neither an alphabet character nor the pad byte is an
//!    [`ErrorKind::InvalidByte`] at its offset;
//! 2. in [`Strictness::Strict`] the length must be a multiple of 4; in
//!    [`Strictness::Lenient`] it may not be `1 (mod 4)`. Violations are
//!    [`ErrorKind::InvalidLength`] at the start of the incomplete quantum
//!    (lenient: at the last byte);
//! 3. padding, when present, must be one or two pad bytes that end the
//!    text and complete its final quantum. Strict mode additionally
//!    requires the unused low bits of the last data character to be zero.
//!    Violations are [`ErrorKind::InvalidPadding`] at the first pad byte.

use std::fmt;

use thiserror::Error;

use crate::alphabet::Alphabet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Strictness {
    /// Length must be a multiple of 4, partial quanta padded, unused bits zero.
    #[default]
    Strict,
    /// Padding optional; unused trailing bits ignored.
    Lenient,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ErrorKind {
    InvalidByte,
    InvalidLength,
    InvalidPadding,
}

impl fmt::Display for ErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ErrorKind::InvalidByte => "invalid byte",
            ErrorKind::InvalidLength => "invalid length",
            ErrorKind::InvalidPadding => "invalid padding",
        })
    }
}

/// A decoding failure and the offset of the byte it is attributed to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Error)]
#[error("{kind} at offset {offset}")]
pub struct DecodeError {
    pub kind: ErrorKind,
    pub offset: usize,
}

impl DecodeError {
    pub fn new(kind: ErrorKind, offset: usize) -> Self {
        DecodeError { kind, offset }
    }

    /// Same error, offset moved by `delta` (for errors found in a suffix).
    pub fn shifted(self, delta: usize) -> Self {
        DecodeError {
            offset: self.offset + delta,
            ..self
        }
    }
}

const INVALID: u8 = 0xff;

/// Encoded length for `n` input bytes.
pub fn encoded_len(n: usize, pad_output: bool) -> usize {
    if pad_output {
        n.div_ceil(3) * 4
    } else {
        (4 * n).div_ceil(3)
    }
}

/// Upper bound on the decoded length of `n` text bytes; exact for unpadded
/// valid input.
pub fn decoded_len_max(n: usize) -> usize {
    n / 4 * 3 + [0, 0, 1, 2][n % 4]
}

/// Per-alphabet lookup tables for the scalar paths.
#[derive(Clone)]
pub struct ScalarTables {
    chars: [u8; 64],
    pad: u8,
    decode: [u8; 256],
}

impl fmt::Debug for ScalarTables {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarTables")
            .field("chars", &String::from_utf8_lossy(&self.chars))
            .field("pad", &char::from(self.pad))
            .finish_non_exhaustive()
    }
}

impl ScalarTables {
    pub fn new(alphabet: &Alphabet) -> Self {
        let mut decode = [INVALID; 256];
        for (v, &c) in alphabet.chars().iter().enumerate() {
            decode[c as usize] = v as u8;
        }
        ScalarTables {
            chars: *alphabet.chars(),
            pad: alphabet.pad(),
            decode,
        }
    }

    /// Exact decoded length of `text`, assuming it is valid.
    pub fn decoded_len(&self, text: &[u8]) -> usize {
        let n = text.len();
        let pads = text.iter().rev().take(2).take_while(|&&c| c == self.pad).count();
        decoded_len_max(n - pads)
    }

    /// Encodes into `out`, which must hold exactly `encoded_len(input.len(), pad_output)` bytes.
    pub fn encode_into(&self, input: &[u8], pad_output: bool, out: &mut [u8]) -> usize {
        let chars = &self.chars;
        let mut groups = input.chunks_exact(3);
        let mut o = 0;
        for g in groups.by_ref() {
            let (s1, s2, s3) = (g[0], g[1], g[2]);
            out[o] = chars[(s1 >> 2) as usize];
            out[o + 1] = chars[((s1 << 4 | s2 >> 4) & 63) as usize];
            out[o + 2] = chars[((s2 << 2 | s3 >> 6) & 63) as usize];
            out[o + 3] = chars[(s3 & 63) as usize];
            o += 4;
        }
        match *groups.remainder() {
            [s1] => {
                out[o] = chars[(s1 >> 2) as usize];
                out[o + 1] = chars[((s1 << 4) & 63) as usize];
                o += 2;
                if pad_output {
                    out[o..o + 2].fill(self.pad);
                    o += 2;
                }
            }
            [s1, s2] => {
                out[o] = chars[(s1 >> 2) as usize];
                out[o + 1] = chars[((s1 << 4 | s2 >> 4) & 63) as usize];
                out[o + 2] = chars[((s2 << 2) & 63) as usize];
                o += 3;
                if pad_output {
                    out[o] = self.pad;
                    o += 1;
                }
            }
            _ => {}
        }
        o
    }

    pub fn encode(&self, input: &[u8], pad_output: bool) -> Vec<u8> {
        let mut out = vec![0u8; encoded_len(input.len(), pad_output)];
        let n = self.encode_into(input, pad_output, &mut out);
        debug_assert_eq!(n, out.len());
        out
    }

    /// Decodes into `out` (at least `decoded_len_max(text.len())` bytes) and
    /// returns the number of bytes written.
    pub fn decode_into(&self, text: &[u8], mode: Strictness, out: &mut [u8]) -> Result<usize, DecodeError> {
        let n = text.len();
        // Every quantum except a final one that might hold padding.
        let body = if n.is_multiple_of(4) { n.saturating_sub(4) } else { n - n % 4 };
        let d = &self.decode;
        let mut o = 0;
        for q in text[..body].chunks_exact(4) {
            let a = d[q[0] as usize];
            let b = d[q[1] as usize];
            let c = d[q[2] as usize];
            let e = d[q[3] as usize];
            if (a | b | c | e) & 0x80 != 0 {
                return Err(self.find_error(text, mode).expect("invalid quantum must be reported"));
            }
            out[o] = a << 2 | b >> 4;
            out[o + 1] = b << 4 | c >> 2;
            out[o + 2] = c << 6 | e;
            o += 3;
        }
        match self.decode_final(&text[body..], mode, &mut out[o..]) {
            Some(k) => Ok(o + k),
            None => Err(self.find_error(text, mode).expect("invalid tail must be reported")),
        }
    }

    pub fn decode(&self, text: &[u8], mode: Strictness) -> Result<Vec<u8>, DecodeError> {
        let mut out = vec![0u8; decoded_len_max(text.len())];
        let n = self.decode_into(text, mode, &mut out)?;
        out.truncate(n);
        Ok(out)
    }

    /// The last 0..=4 bytes of a text whose preceding quanta are all valid
    /// data. `None` means the text is invalid; the caller locates why.
    fn decode_final(&self, tail: &[u8], mode: Strictness, out: &mut [u8]) -> Option<usize> {
        let d = &self.decode;
        let pad = self.pad;
        let strict = mode == Strictness::Strict;
        let data_len = match *tail {
            [] => return Some(0),
            [_, _, x, y] if x == pad && y == pad => 2,
            [_, _, _, y] if y == pad => 3,
            [_, _, _, _] => 4,
            [_, _] | [_, _, _] if !strict => tail.len(),
            _ => return None,
        };
        let v: Vec<u8> = tail[..data_len].iter().map(|&c| d[c as usize]).collect();
        if v.iter().any(|&x| x & 0x80 != 0) {
            return None;
        }
        let canonical_required = strict && data_len < 4;
        match data_len {
            4 => {
                out[0] = v[0] << 2 | v[1] >> 4;
                out[1] = v[1] << 4 | v[2] >> 2;
                out[2] = v[2] << 6 | v[3];
                Some(3)
            }
            3 => {
                if canonical_required && v[2] & 0x03 != 0 {
                    return None;
                }
                out[0] = v[0] << 2 | v[1] >> 4;
                out[1] = v[1] << 4 | v[2] >> 2;
                Some(2)
            }
            _ => {
                if canonical_required && v[1] & 0x0f != 0 {
                    return None;
                }
                out[0] = v[0] << 2 | v[1] >> 4;
                Some(1)
            }
        }
    }

    /// Applies the decoding rules in order and reports the first violation.
    pub fn find_error(&self, text: &[u8], mode: Strictness) -> Option<DecodeError> {
        let d = &self.decode;
        let pad = self.pad;
        if let Some(i) = text.iter().position(|&c| d[c as usize] == INVALID && c != pad) {
            return Some(DecodeError::new(ErrorKind::InvalidByte, i));
        }
        let n = text.len();
        let rem = n % 4;
        match mode {
            Strictness::Strict if rem != 0 => {
                return Some(DecodeError::new(ErrorKind::InvalidLength, n - rem));
            }
            Strictness::Lenient if rem == 1 => {
                return Some(DecodeError::new(ErrorKind::InvalidLength, n - 1));
            }
            _ => {}
        }
        let p = text.iter().position(|&c| c == pad)?;
        let bad = || Some(DecodeError::new(ErrorKind::InvalidPadding, p));
        if rem != 0 || n - p > 2 || text[p..].iter().any(|&c| c != pad) {
            return bad();
        }
        if mode == Strictness::Strict {
            let last = d[text[p - 1] as usize];
            let unused = if n - p == 2 { 0x0f } else { 0x03 };
            if last & unused != 0 {
                return bad();
            }
        }
        None
    }
}

pub fn scalar_encode(input: &[u8], alphabet: &Alphabet, pad_output: bool) -> Vec<u8> {
    ScalarTables::new(alphabet).encode(input, pad_output)
}

pub fn scalar_decode(text: &[u8], alphabet: &Alphabet, mode: Strictness) -> Result<Vec<u8>, DecodeError> {
    ScalarTables::new(alphabet).decode(text, mode)
}

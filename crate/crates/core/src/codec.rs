//! Public codec surface: configuration, backend dispatch and incremental
//! encoders/decoders.
//!
//! The backend is resolved once, in [`Codec::new`]. Every backend produces
//! byte-identical output and identical errors for the same configuration.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::alphabet::{derive_decode_tables, derive_encode_tables, Alphabet, DecodeTables, EncodeTables};
use crate::scalar_codec::{decoded_len_max, encoded_len, DecodeError, ErrorKind, ScalarTables, Strictness};
use crate::wide_ops::Emulated;
#[cfg(target_arch = "x86_64")]
use crate::wide_ops::Native;
use crate::{vector_decoder, vector_encoder};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Backend {
    /// Native wide kernels when the CPU has them, otherwise scalar.
    #[default]
    Auto,
    Scalar,
    /// Wide kernels on the portable emulation. Slow; meant for testing.
    Emulated,
    Native,
}

impl Backend {
    pub fn name(self) -> &'static str {
        match self {
            Backend::Auto => "auto",
            Backend::Scalar => "scalar",
            Backend::Emulated => "emulated",
            Backend::Native => "native",
        }
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Backend {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "auto" => Ok(Backend::Auto),
            "scalar" => Ok(Backend::Scalar),
            "emulated" | "emulated_wide" => Ok(Backend::Emulated),
            "native" | "native_wide" => Ok(Backend::Native),
            other => Err(format!("unknown backend {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum CodecError {
    #[error("backend {0} is not supported on this CPU")]
    UnsupportedBackend(Backend),
}

/// True when the CPU supports the native wide instruction subset
/// (AVX-512 F, BW and VBMI).
pub fn native_available() -> bool {
    #[cfg(target_arch = "x86_64")]
    {
        Native::detect().is_some()
    }
    #[cfg(not(target_arch = "x86_64"))]
    {
        false
    }
}

/// The fastest backend usable on this machine. Never fails.
pub fn detect_backend() -> Backend {
    if native_available() {
        Backend::Native
    } else {
        Backend::Scalar
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CodecConfig {
    pub alphabet: Alphabet,
    pub pad_output: bool,
    pub strictness: Strictness,
    pub backend: Backend,
}

impl Default for CodecConfig {
    fn default() -> Self {
        CodecConfig {
            alphabet: Alphabet::STANDARD,
            pad_output: true,
            strictness: Strictness::Strict,
            backend: Backend::Auto,
        }
    }
}

impl CodecConfig {
    pub fn with_backend(self, backend: Backend) -> Self {
        CodecConfig { backend, ..self }
    }
}

#[derive(Clone, Copy)]
enum Resolved {
    Scalar,
    Emulated,
    #[cfg(target_arch = "x86_64")]
    Native(Native),
}

/// A configured codec with its tables derived and its backend resolved.
#[derive(Clone)]
pub struct Codec {
    config: CodecConfig,
    resolved: Resolved,
    enc: EncodeTables,
    dec: DecodeTables,
    scalar: ScalarTables,
}

impl fmt::Debug for Codec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Codec")
            .field("config", &self.config)
            .field("backend", &self.backend())
            .finish()
    }
}

impl Codec {
    pub fn new(config: CodecConfig) -> Result<Codec, CodecError> {
        let resolved = match config.backend {
            Backend::Scalar => Resolved::Scalar,
            Backend::Emulated => Resolved::Emulated,
            Backend::Native | Backend::Auto => {
                #[cfg(target_arch = "x86_64")]
                let native = Native::detect().map(Resolved::Native);
                #[cfg(not(target_arch = "x86_64"))]
                let native: Option<Resolved> = None;
                match (native, config.backend) {
                    (Some(r), _) => r,
                    (None, Backend::Auto) => Resolved::Scalar,
                    (None, b) => return Err(CodecError::UnsupportedBackend(b)),
                }
            }
        };
        Ok(Codec {
            config,
            resolved,
            enc: derive_encode_tables(&config.alphabet),
            dec: derive_decode_tables(&config.alphabet),
            scalar: ScalarTables::new(&config.alphabet),
        })
    }

    pub fn config(&self) -> &CodecConfig {
        &self.config
    }

    /// The backend actually in use (never `Auto`).
    pub fn backend(&self) -> Backend {
        match self.resolved {
            Resolved::Scalar => Backend::Scalar,
            Resolved::Emulated => Backend::Emulated,
            #[cfg(target_arch = "x86_64")]
            Resolved::Native(_) => Backend::Native,
        }
    }

    pub fn encoded_len(&self, n: usize) -> usize {
        encoded_len(n, self.config.pad_output)
    }

    /// Upper bound on the decoded size of `n` characters.
    pub fn decoded_len_max(&self, n: usize) -> usize {
        decoded_len_max(n)
    }

    /// Exact decoded size of `text`, provided it is valid.
    pub fn decoded_len(&self, text: &[u8]) -> usize {
        self.scalar.decoded_len(text)
    }

    /// `out` must be exactly [`encoded_len`](Self::encoded_len) bytes.
    pub fn encode_into(&self, input: &[u8], out: &mut [u8]) -> usize {
        self.encode_with_padding(input, self.config.pad_output, out)
    }

    fn encode_with_padding(&self, input: &[u8], pad: bool, out: &mut [u8]) -> usize {
        match self.resolved {
            Resolved::Scalar => {
                assert_eq!(out.len(), encoded_len(input.len(), pad));
                self.scalar.encode_into(input, pad, out)
            }
            Resolved::Emulated => {
                vector_encoder::encode_into(&Emulated, &self.enc, &self.scalar, input, pad, out)
            }
            #[cfg(target_arch = "x86_64")]
            Resolved::Native(n) => {
                // SAFETY: `n` was produced by `Native::detect`.
                unsafe { native::encode_into(n, &self.enc, &self.scalar, input, pad, out) }
            }
        }
    }

    pub fn encode(&self, input: &[u8]) -> Vec<u8> {
        let mut out = vec![0u8; self.encoded_len(input.len())];
        self.encode_into(input, &mut out);
        out
    }

    /// Encodes to a `String`; base64 output is always ASCII.
    pub fn encode_to_string(&self, input: &[u8]) -> String {
        String::from_utf8(self.encode(input)).expect("alphabet is ASCII")
    }

    /// `out` must hold at least [`decoded_len_max`](Self::decoded_len_max)
    /// bytes; returns the decoded length. Bytes past it are unspecified.
    pub fn decode_into(&self, text: &[u8], out: &mut [u8]) -> Result<usize, DecodeError> {
        self.decode_with_mode(text, self.config.strictness, out)
    }

    fn decode_with_mode(&self, text: &[u8], mode: Strictness, out: &mut [u8]) -> Result<usize, DecodeError> {
        match self.resolved {
            Resolved::Scalar => {
                assert!(out.len() >= decoded_len_max(text.len()));
                self.scalar.decode_into(text, mode, out)
            }
            Resolved::Emulated => {
                vector_decoder::decode_into(&Emulated, &self.dec, &self.scalar, text, mode, out)
            }
            #[cfg(target_arch = "x86_64")]
            Resolved::Native(n) => {
                // SAFETY: `n` was produced by `Native::detect`.
                unsafe { native::decode_into(n, &self.dec, &self.scalar, text, mode, out) }
            }
        }
    }

    pub fn decode(&self, text: &[u8]) -> Result<Vec<u8>, DecodeError> {
        let mut out = vec![0u8; decoded_len_max(text.len())];
        let n = self.decode_into(text, &mut out)?;
        out.truncate(n);
        Ok(out)
    }

    pub fn stream_encoder(&self) -> StreamEncoder<'_> {
        StreamEncoder {
            codec: self,
            carry: [0; 3],
            carry_len: 0,
            consumed: 0,
            produced: 0,
        }
    }

    pub fn stream_decoder(&self) -> StreamDecoder<'_> {
        StreamDecoder {
            codec: self,
            carry: [0; 4],
            carry_len: 0,
            consumed: 0,
            produced: 0,
            pad_at: None,
            data_after_pad: false,
            failed: None,
        }
    }
}

#[cfg(target_arch = "x86_64")]
mod native {
    use super::*;

    #[target_feature(enable = "avx512f,avx512bw,avx512vbmi")]
    pub(super) fn encode_into(
        ops: Native,
        tables: &EncodeTables,
        scalar: &ScalarTables,
        input: &[u8],
        pad: bool,
        out: &mut [u8],
    ) -> usize {
        vector_encoder::encode_into(&ops, tables, scalar, input, pad, out)
    }

    #[target_feature(enable = "avx512f,avx512bw,avx512vbmi")]
    pub(super) fn decode_into(
        ops: Native,
        tables: &DecodeTables,
        scalar: &ScalarTables,
        text: &[u8],
        mode: Strictness,
        out: &mut [u8],
    ) -> Result<usize, DecodeError> {
        vector_decoder::decode_into(&ops, tables, scalar, text, mode, out)
    }
}

/// Incremental encoder. Feeding any chunking of an input and then calling
/// [`finish`](Self::finish) yields exactly [`Codec::encode`] of the whole.
pub struct StreamEncoder<'c> {
    codec: &'c Codec,
    carry: [u8; 3],
    carry_len: usize,
    consumed: usize,
    produced: usize,
}

impl StreamEncoder<'_> {
    pub fn consumed(&self) -> usize {
        self.consumed
    }

    pub fn produced(&self) -> usize {
        self.produced
    }

    /// Bytes held back until the next push or the finish.
    pub fn carry_len(&self) -> usize {
        self.carry_len
    }

    /// Appends the encoding of every complete 3-byte group to `out`.
    pub fn push(&mut self, mut chunk: &[u8], out: &mut Vec<u8>) {
        self.consumed += chunk.len();
        let start = out.len();
        if self.carry_len > 0 {
            let take = (3 - self.carry_len).min(chunk.len());
            self.carry[self.carry_len..self.carry_len + take].copy_from_slice(&chunk[..take]);
            self.carry_len += take;
            chunk = &chunk[take..];
            if self.carry_len < 3 {
                return;
            }
            let group = self.carry;
            self.emit(&group, out);
            self.carry_len = 0;
        }
        let whole = chunk.len() / 3 * 3;
        self.emit(&chunk[..whole], out);
        let rest = &chunk[whole..];
        self.carry[..rest.len()].copy_from_slice(rest);
        self.carry_len = rest.len();
        self.produced += out.len() - start;
    }

    fn emit(&self, groups: &[u8], out: &mut Vec<u8>) {
        if groups.is_empty() {
            return;
        }
        let at = out.len();
        out.resize(at + groups.len() / 3 * 4, 0);
        self.codec.encode_with_padding(groups, false, &mut out[at..]);
    }

    /// Encodes the held-back bytes, padding them if configured.
    pub fn finish(mut self, out: &mut Vec<u8>) -> usize {
        let tail = &self.carry[..self.carry_len];
        let at = out.len();
        out.resize(at + self.codec.encoded_len(tail.len()), 0);
        let n = self.codec.encode_into(tail, &mut out[at..]);
        self.produced += n;
        self.carry_len = 0;
        self.produced
    }
}

/// Incremental decoder. For every chunking, the concatenated output of
/// [`push`](Self::push) and [`finish`](Self::finish) equals
/// [`Codec::decode`] of the whole text, and the error reported (by the
/// first failing call) equals the one-shot error.
///
/// Invalid bytes are reported as soon as they arrive. Length and padding
/// errors can only be judged once the total length is known, so they are
/// reported by `finish`.
pub struct StreamDecoder<'c> {
    codec: &'c Codec,
    carry: [u8; 4],
    carry_len: usize,
    consumed: usize,
    produced: usize,
    /// Global offset of the first pad byte.
    pad_at: Option<usize>,
    data_after_pad: bool,
    failed: Option<DecodeError>,
}

impl StreamDecoder<'_> {
    pub fn consumed(&self) -> usize {
        self.consumed
    }

    pub fn produced(&self) -> usize {
        self.produced
    }

    pub fn carry_len(&self) -> usize {
        self.carry_len
    }

    fn fail(&mut self, e: DecodeError) -> Result<(), DecodeError> {
        self.failed = Some(e);
        Err(e)
    }

    fn is_data(&self, c: u8) -> bool {
        self.codec.dec.translate(c) != crate::alphabet::SENTINEL && c < 0x80
    }

    /// Decodes complete quanta of `chunk` (plus any carry) into `out`.
    pub fn push(&mut self, chunk: &[u8], out: &mut Vec<u8>) -> Result<(), DecodeError> {
        if let Some(e) = self.failed {
            return Err(e);
        }
        let base = self.consumed;
        self.consumed += chunk.len();
        let pad = self.codec.config.alphabet.pad();

        if self.pad_at.is_some() {
            return self.scan_after_pad(chunk, base);
        }

        let (data, rest) = match chunk.iter().position(|&c| c == pad) {
            Some(q) => chunk.split_at(q),
            None => (chunk, &chunk[chunk.len()..]),
        };
        self.push_data(data, base, out)?;
        if !rest.is_empty() {
            self.pad_at = Some(base + data.len());
            self.scan_after_pad(rest, base + data.len())?;
        }
        Ok(())
    }

    fn push_data(&mut self, mut data: &[u8], mut offset: usize, out: &mut Vec<u8>) -> Result<(), DecodeError> {
        let start = out.len();
        if self.carry_len > 0 {
            let take = (4 - self.carry_len).min(data.len());
            self.stash(&data[..take], offset)?;
            data = &data[take..];
            offset += take;
            if self.carry_len < 4 {
                return Ok(());
            }
            let quantum = self.carry;
            self.carry_len = 0;
            self.decode_region(&quantum, offset - 4, out)?;
        }
        let whole = data.len() / 4 * 4;
        self.decode_region(&data[..whole], offset, out)?;
        self.stash(&data[whole..], offset + whole)?;
        self.produced += out.len() - start;
        Ok(())
    }

    /// Holds back bytes of an incomplete quantum, rejecting invalid ones
    /// right away so errors surface in input order.
    fn stash(&mut self, bytes: &[u8], offset: usize) -> Result<(), DecodeError> {
        if let Some(i) = bytes.iter().position(|&c| !self.is_data(c)) {
            return self.fail(DecodeError::new(ErrorKind::InvalidByte, offset + i));
        }
        self.carry[self.carry_len..self.carry_len + bytes.len()].copy_from_slice(bytes);
        self.carry_len += bytes.len();
        Ok(())
    }

    /// Pad-free whole quanta; the only possible error is an invalid byte.
    fn decode_region(&mut self, region: &[u8], offset: usize, out: &mut Vec<u8>) -> Result<(), DecodeError> {
        if region.is_empty() {
            return Ok(());
        }
        let at = out.len();
        out.resize(at + decoded_len_max(region.len()), 0);
        match self.codec.decode_with_mode(region, Strictness::Strict, &mut out[at..]) {
            Ok(n) => {
                out.truncate(at + n);
                Ok(())
            }
            Err(e) => {
                out.truncate(at);
                self.fail(e.shifted(offset))
            }
        }
    }

    fn scan_after_pad(&mut self, bytes: &[u8], offset: usize) -> Result<(), DecodeError> {
        let pad = self.codec.config.alphabet.pad();
        for (i, &c) in bytes.iter().enumerate() {
            if c != pad {
                if !self.is_data(c) {
                    return self.fail(DecodeError::new(ErrorKind::InvalidByte, offset + i));
                }
                self.data_after_pad = true;
            }
        }
        Ok(())
    }

    /// Validates the total length and padding and decodes the final quantum.
    pub fn finish(mut self, out: &mut Vec<u8>) -> Result<usize, DecodeError> {
        if let Some(e) = self.failed {
            return Err(e);
        }
        let n = self.consumed;
        let rem = n % 4;
        let mode = self.codec.config.strictness;
        match mode {
            Strictness::Strict if rem != 0 => {
                return Err(DecodeError::new(ErrorKind::InvalidLength, n - rem));
            }
            Strictness::Lenient if rem == 1 => {
                return Err(DecodeError::new(ErrorKind::InvalidLength, n - 1));
            }
            _ => {}
        }
        let mut quantum = [0u8; 4];
        let (len, offset) = match self.pad_at {
            Some(p) => {
                if rem != 0 || n - p > 2 || self.data_after_pad {
                    return Err(DecodeError::new(ErrorKind::InvalidPadding, p));
                }
                quantum[..self.carry_len].copy_from_slice(&self.carry[..self.carry_len]);
                quantum[self.carry_len..].fill(self.codec.config.alphabet.pad());
                (4, p - self.carry_len)
            }
            None => {
                quantum[..self.carry_len].copy_from_slice(&self.carry[..self.carry_len]);
                (self.carry_len, n - self.carry_len)
            }
        };
        let decoded = self
            .codec
            .scalar
            .decode(&quantum[..len], mode)
            .map_err(|e| e.shifted(offset))?;
        out.extend_from_slice(&decoded);
        self.produced += decoded.len();
        Ok(self.produced)
    }
}

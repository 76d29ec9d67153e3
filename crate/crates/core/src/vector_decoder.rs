//! 64 characters to 48 bytes with five wide operations per block.
//!
//! Per block: `dual_table_permute` translates ASCII to 6-bit values (0x80
//! for anything outside the alphabet), `ternary_or3` folds the input and the
//! translation into a running error register, two multiply-adds merge four
//! fields into each 24-bit group, and `byte_permute` compacts the groups into
//! 48 contiguous bytes. The error register is inspected once, after the
//! loop; only if it shows a set high bit is the text re-scanned by the scalar
//! codec to find the exact offending offset.

use crate::alphabet::{derive_decode_tables, Alphabet, DecodeTables};
use crate::scalar_codec::{decoded_len_max, DecodeError, ScalarTables, Strictness};
use crate::wide_ops::{Block, WideOps};

pub const INPUT_BLOCK: usize = 64;
pub const OUTPUT_BLOCK: usize = 48;

pub struct DecodeRegs<R> {
    lo: R,
    hi: R,
    madd1: R,
    madd2: R,
    pack: R,
}

impl<R: Copy> DecodeRegs<R> {
    #[inline(always)]
    pub fn load<W: WideOps<Reg = R>>(ops: &W, t: &DecodeTables) -> Self {
        DecodeRegs {
            lo: ops.load(&t.translate_lo.0),
            hi: ops.load(&t.translate_hi.0),
            madd1: ops.load(&t.madd1.0),
            madd2: ops.load(&t.madd2.0),
            pack: ops.load(&t.pack_idx.0),
        }
    }
}

/// Running OR of every input block and its translation. A set high bit in
/// any byte means some input byte was outside the alphabet.
#[derive(Clone, Copy)]
pub struct ErrorAccumulator<R> {
    pub acc: R,
}

impl<R: Copy> ErrorAccumulator<R> {
    #[inline(always)]
    pub fn new<W: WideOps<Reg = R>>(ops: &W) -> Self {
        ErrorAccumulator { acc: ops.load(&[]) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Valid,
    Invalid,
}

/// Decodes one block; bytes 48..64 of the result are unspecified.
#[inline(always)]
pub fn decode_block<W: WideOps>(
    ops: &W,
    input: W::Reg,
    regs: &DecodeRegs<W::Reg>,
    errors: &mut ErrorAccumulator<W::Reg>,
) -> W::Reg {
    let translated = ops.dual_table_permute(input, regs.lo, regs.hi);
    errors.acc = ops.ternary_or3(errors.acc, input, translated);
    let pairs = ops.pairwise_dot_8to16(translated, regs.madd1);
    let groups = ops.pairwise_dot_16to32(pairs, regs.madd2);
    ops.byte_permute(regs.pack, groups)
}

/// Block-level convenience over [`decode_block`].
pub fn decode_block_64to48<W: WideOps>(
    ops: &W,
    input: &Block,
    tables: &DecodeTables,
    errors: &mut ErrorAccumulator<W::Reg>,
) -> Block {
    let regs = DecodeRegs::load(ops, tables);
    let mut out = Block::ZERO;
    ops.store(decode_block(ops, ops.load(&input.0), &regs, errors), &mut out.0);
    out
}

#[inline(always)]
pub fn finalize_errors<W: WideOps>(ops: &W, errors: &ErrorAccumulator<W::Reg>) -> Verdict {
    if ops.msb_mask(errors.acc).is_empty() {
        Verdict::Valid
    } else {
        Verdict::Invalid
    }
}

/// Number of vector blocks used for a text of `n` characters: blocks run
/// only while strictly more than 64 characters remain, so the final quantum
/// (and any padding) always reaches the scalar tail.
pub fn vector_blocks(n: usize) -> usize {
    n.saturating_sub(1) / INPUT_BLOCK
}

/// Decodes `text` into `out` (at least `decoded_len_max(text.len())` bytes)
/// and returns the decoded length. Bytes of `out` past that length are
/// unspecified.
#[inline(always)]
pub fn decode_into<W: WideOps>(
    ops: &W,
    tables: &DecodeTables,
    scalar: &ScalarTables,
    text: &[u8],
    mode: Strictness,
    out: &mut [u8],
) -> Result<usize, DecodeError> {
    assert!(
        out.len() >= decoded_len_max(text.len()),
        "output buffer too small for decoded text"
    );
    let blocks = vector_blocks(text.len());
    if blocks > 0 {
        let regs = DecodeRegs::load(ops, tables);
        let mut errors = ErrorAccumulator::new(ops);
        for i in 0..blocks {
            let v = ops.load(&text[i * INPUT_BLOCK..(i + 1) * INPUT_BLOCK]);
            let r = decode_block(ops, v, &regs, &mut errors);
            let dst = &mut out[i * OUTPUT_BLOCK..];
            let room = dst.len().min(INPUT_BLOCK);
            ops.store(r, &mut dst[..room]);
        }
        if finalize_errors(ops, &errors) == Verdict::Invalid {
            return Err(locate(scalar, text, mode));
        }
    }
    let head = blocks * OUTPUT_BLOCK;
    match scalar.decode_into(&text[blocks * INPUT_BLOCK..], mode, &mut out[head..]) {
        Ok(n) => Ok(head + n),
        Err(_) => Err(locate(scalar, text, mode)),
    }
}

#[cold]
fn locate(scalar: &ScalarTables, text: &[u8], mode: Strictness) -> DecodeError {
    scalar
        .find_error(text, mode)
        .expect("vector decoder flagged a text the scalar rules accept")
}

/// Allocating form of [`decode_into`].
pub fn decode_stream<W: WideOps>(
    ops: &W,
    text: &[u8],
    alphabet: &Alphabet,
    mode: Strictness,
) -> Result<Vec<u8>, DecodeError> {
    let tables = derive_decode_tables(alphabet);
    let scalar = ScalarTables::new(alphabet);
    let mut out = vec![0u8; decoded_len_max(text.len())];
    let n = decode_into(ops, &tables, &scalar, text, mode, &mut out)?;
    out.truncate(n);
    Ok(out)
}

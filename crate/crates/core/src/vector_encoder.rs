//! 48 input bytes to 64 characters with three wide operations.
//!
//! 1. `byte_permute` spreads each 3-byte group (s1, s2, s3) into the four
//!    bytes (s2, s1, s3, s2);
//! 2. `multishift` rotates each 64-bit lane so every output byte holds one
//!    6-bit field in its low bits (the top two bits are garbage);
//! 3. `byte_permute` looks the fields up in the 64-character alphabet,
//!    which discards the garbage bits for free.

use crate::alphabet::{Alphabet, EncodeTables};
use crate::scalar_codec::{encoded_len, ScalarTables};
use crate::wide_ops::{Block, WideOps};

/// Bytes consumed per block.
pub const INPUT_BLOCK: usize = 48;
/// Characters produced per block.
pub const OUTPUT_BLOCK: usize = 64;

/// Encode tables loaded into backend registers.
pub struct EncodeRegs<R> {
    shuffle: R,
    shifts: R,
    lut: R,
}

impl<R: Copy> EncodeRegs<R> {
    #[inline(always)]
    pub fn load<W: WideOps<Reg = R>>(ops: &W, t: &EncodeTables) -> Self {
        EncodeRegs {
            shuffle: ops.load(&t.shuffle_idx.0),
            shifts: ops.load(&t.shift_bytes.0),
            lut: ops.load(&t.output_table.0),
        }
    }
}

/// Only bytes 0..48 of `input` matter.
#[inline(always)]
pub fn encode_block<W: WideOps>(ops: &W, input: W::Reg, regs: &EncodeRegs<W::Reg>) -> W::Reg {
    let spread = ops.byte_permute(regs.shuffle, input);
    let fields = ops.multishift(spread, regs.shifts);
    ops.byte_permute(fields, regs.lut)
}

/// Block-level convenience over [`encode_block`].
pub fn encode_block_48to64<W: WideOps>(ops: &W, input: &Block, tables: &EncodeTables) -> Block {
    let regs = EncodeRegs::load(ops, tables);
    let mut out = Block::ZERO;
    ops.store(encode_block(ops, ops.load(&input.0), &regs), &mut out.0);
    out
}

/// Encodes `input` into `out`, which must be exactly
/// `encoded_len(input.len(), pad_output)` bytes. Whole 48-byte blocks go
/// through the vector kernel; the last 0..47 bytes through the scalar codec.
/// Never reads past the end of `input`: the final block is loaded with a
/// partial load when fewer than 64 bytes remain.
#[inline(always)]
pub fn encode_into<W: WideOps>(
    ops: &W,
    tables: &EncodeTables,
    scalar: &ScalarTables,
    input: &[u8],
    pad_output: bool,
    out: &mut [u8],
) -> usize {
    assert_eq!(
        out.len(),
        encoded_len(input.len(), pad_output),
        "output buffer must match the encoded length"
    );
    let blocks = input.len() / INPUT_BLOCK;
    if blocks > 0 {
        let regs = EncodeRegs::load(ops, tables);
        for (i, dst) in out.chunks_exact_mut(OUTPUT_BLOCK).take(blocks).enumerate() {
            let src = &input[i * INPUT_BLOCK..];
            let v = ops.load(&src[..src.len().min(OUTPUT_BLOCK)]);
            ops.store(encode_block(ops, v, &regs), dst);
        }
    }
    let done = blocks * INPUT_BLOCK;
    let written = blocks * OUTPUT_BLOCK;
    written + scalar.encode_into(&input[done..], pad_output, &mut out[written..])
}

/// Allocating form of [`encode_into`].
pub fn encode_stream<W: WideOps>(ops: &W, input: &[u8], alphabet: &Alphabet, pad_output: bool) -> Vec<u8> {
    let tables = crate::alphabet::derive_encode_tables(alphabet);
    let scalar = ScalarTables::new(alphabet);
    let mut out = vec![0u8; encoded_len(input.len(), pad_output)];
    encode_into(ops, &tables, &scalar, input, pad_output, &mut out);
    out
}

//! The seven 512-bit lane operations the codec kernels are written against.
//!
//! Kernels are generic over [`WideOps`], so the same kernel source runs on the
//! portable [`Emulated`] backend, on the AVX-512 [`Native`] backend when the
//! CPU has it, or on a [`Counting`] wrapper that tallies invocations. Loads
//! and stores are part of the trait but are never counted: only the seven
//! data-transforming operations are.
//!
//! Byte order: a [`Block`] is indexed 0..63 from the lowest address, and
//! within every 16/32/64-bit lane byte 0 is the least significant.

mod emulated;
#[cfg(target_arch = "x86_64")]
mod native;

use std::cell::Cell;
use std::fmt;

pub use emulated::Emulated;
#[cfg(target_arch = "x86_64")]
pub use native::Native;

/// Width of one lane group in bytes.
pub const BLOCK_LEN: usize = 64;

/// One 512-bit value as 64 bytes, lowest address first.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
#[repr(C, align(64))]
pub struct Block(pub [u8; BLOCK_LEN]);

impl Block {
    pub const ZERO: Block = Block([0; BLOCK_LEN]);

    pub const fn splat(b: u8) -> Block {
        Block([b; BLOCK_LEN])
    }

    /// Copies up to 64 bytes from `bytes`, zero-filling the rest.
    pub fn from_prefix(bytes: &[u8]) -> Block {
        let mut out = Block::ZERO;
        let n = bytes.len().min(BLOCK_LEN);
        out.0[..n].copy_from_slice(&bytes[..n]);
        out
    }

    /// Builds a block from 32 little-endian 16-bit words.
    pub fn from_u16s(words: [u16; 32]) -> Block {
        let mut out = Block::ZERO;
        for (chunk, w) in out.0.chunks_exact_mut(2).zip(words) {
            chunk.copy_from_slice(&w.to_le_bytes());
        }
        out
    }

    pub fn from_u64s(lanes: [u64; 8]) -> Block {
        let mut out = Block::ZERO;
        for (chunk, q) in out.0.chunks_exact_mut(8).zip(lanes) {
            chunk.copy_from_slice(&q.to_le_bytes());
        }
        out
    }

    pub fn u16_at(&self, i: usize) -> u16 {
        u16::from_le_bytes([self.0[2 * i], self.0[2 * i + 1]])
    }

    pub fn u32_at(&self, i: usize) -> u32 {
        let b = &self.0[4 * i..4 * i + 4];
        u32::from_le_bytes([b[0], b[1], b[2], b[3]])
    }

    pub fn u64_at(&self, i: usize) -> u64 {
        let mut q = [0u8; 8];
        q.copy_from_slice(&self.0[8 * i..8 * i + 8]);
        u64::from_le_bytes(q)
    }

    pub fn as_bytes(&self) -> &[u8; BLOCK_LEN] {
        &self.0
    }
}

impl Default for Block {
    fn default() -> Self {
        Block::ZERO
    }
}

impl fmt::Debug for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Block[")?;
        for (i, b) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{b:02x}")?;
        }
        write!(f, "]")
    }
}

impl From<[u8; BLOCK_LEN]> for Block {
    fn from(bytes: [u8; BLOCK_LEN]) -> Self {
        Block(bytes)
    }
}

/// One bit per block byte; bit `i` corresponds to byte `i`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Mask64(pub u64);

impl Mask64 {
    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_set(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    /// Index of the lowest set bit.
    pub fn first(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize)
    }
}

/// The wide-operation contract shared by every backend.
///
/// `Reg` is the backend's register type. Values move in and out only through
/// [`load`](WideOps::load) and [`store`](WideOps::store), which accept any
/// slice length up to 64 and never touch memory past the slice.
pub trait WideOps {
    type Reg: Copy;

    /// Loads `min(bytes.len(), 64)` bytes; lanes past the slice read as zero.
    fn load(&self, bytes: &[u8]) -> Self::Reg;

    /// Stores the first `min(out.len(), 64)` bytes of `reg`.
    fn store(&self, reg: Self::Reg, out: &mut [u8]);

    /// `out[i] = values[indexes[i] % 64]`.
    fn byte_permute(&self, indexes: Self::Reg, values: Self::Reg) -> Self::Reg;

    /// 128-entry lookup: `j = indexes[i] % 128`, taken from `lo` when
    /// `j < 64`, else from `hi[j - 64]`.
    fn dual_table_permute(&self, indexes: Self::Reg, lo: Self::Reg, hi: Self::Reg) -> Self::Reg;

    /// For each 64-bit lane and each of its eight shift bytes: the low byte
    /// of the lane rotated right by `shift % 64`.
    fn multishift(&self, words: Self::Reg, shifts: Self::Reg) -> Self::Reg;

    fn ternary_or3(&self, a: Self::Reg, b: Self::Reg, c: Self::Reg) -> Self::Reg;

    /// Gathers the most significant bit of every byte.
    fn msb_mask(&self, a: Self::Reg) -> Mask64;

    /// Unsigned bytes times signed bytes, adjacent products summed into a
    /// signed-saturated 16-bit word.
    fn pairwise_dot_8to16(&self, unsigned_vals: Self::Reg, signed_muls: Self::Reg) -> Self::Reg;

    /// Signed 16-bit words times signed 16-bit words, adjacent products
    /// summed into a wrapping 32-bit word.
    fn pairwise_dot_16to32(&self, vals: Self::Reg, muls: Self::Reg) -> Self::Reg;
}

/// Names the seven counted operations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum WideOp {
    BytePermute,
    DualTablePermute,
    Multishift,
    TernaryOr3,
    MsbMask,
    PairwiseDot8to16,
    PairwiseDot16to32,
}

impl WideOp {
    pub const ALL: [WideOp; 7] = [
        WideOp::BytePermute,
        WideOp::DualTablePermute,
        WideOp::Multishift,
        WideOp::TernaryOr3,
        WideOp::MsbMask,
        WideOp::PairwiseDot8to16,
        WideOp::PairwiseDot16to32,
    ];

    pub fn name(self) -> &'static str {
        match self {
            WideOp::BytePermute => "byte_permute",
            WideOp::DualTablePermute => "dual_table_permute",
            WideOp::Multishift => "multishift",
            WideOp::TernaryOr3 => "ternary_or3",
            WideOp::MsbMask => "msb_mask",
            WideOp::PairwiseDot8to16 => "pairwise_dot_8to16",
            WideOp::PairwiseDot16to32 => "pairwise_dot_16to32",
        }
    }
}

/// Invocation counts per [`WideOp`]. Single-threaded; read it after the
/// kernel returns.
#[derive(Debug, Default)]
pub struct OpCounter {
    counts: [Cell<u64>; 7],
}

impl OpCounter {
    pub fn new() -> Self {
        Self::default()
    }

    fn bump(&self, op: WideOp) {
        let c = &self.counts[op as usize];
        c.set(c.get() + 1);
    }

    pub fn get(&self, op: WideOp) -> u64 {
        self.counts[op as usize].get()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().map(Cell::get).sum()
    }

    /// Non-zero counts, in [`WideOp::ALL`] order.
    pub fn snapshot(&self) -> Vec<(WideOp, u64)> {
        WideOp::ALL
            .iter()
            .map(|&op| (op, self.get(op)))
            .filter(|&(_, n)| n > 0)
            .collect()
    }

    pub fn reset(&self) {
        for c in &self.counts {
            c.set(0);
        }
    }
}

/// Wraps a backend and counts every wide operation it executes.
///
/// Counting is selected by type, so uncounted kernels carry no bookkeeping.
#[derive(Debug, Clone, Copy)]
pub struct Counting<'a, W> {
    inner: W,
    counter: &'a OpCounter,
}

impl<'a, W: WideOps> Counting<'a, W> {
    pub fn new(inner: W, counter: &'a OpCounter) -> Self {
        Counting { inner, counter }
    }
}

impl<W: WideOps> WideOps for Counting<'_, W> {
    type Reg = W::Reg;

    #[inline(always)]
    fn load(&self, bytes: &[u8]) -> Self::Reg {
        self.inner.load(bytes)
    }

    #[inline(always)]
    fn store(&self, reg: Self::Reg, out: &mut [u8]) {
        self.inner.store(reg, out)
    }

    fn byte_permute(&self, indexes: Self::Reg, values: Self::Reg) -> Self::Reg {
        self.counter.bump(WideOp::BytePermute);
        self.inner.byte_permute(indexes, values)
    }

    fn dual_table_permute(&self, indexes: Self::Reg, lo: Self::Reg, hi: Self::Reg) -> Self::Reg {
        self.counter.bump(WideOp::DualTablePermute);
        self.inner.dual_table_permute(indexes, lo, hi)
    }

    fn multishift(&self, words: Self::Reg, shifts: Self::Reg) -> Self::Reg {
        self.counter.bump(WideOp::Multishift);
        self.inner.multishift(words, shifts)
    }

    fn ternary_or3(&self, a: Self::Reg, b: Self::Reg, c: Self::Reg) -> Self::Reg {
        self.counter.bump(WideOp::TernaryOr3);
        self.inner.ternary_or3(a, b, c)
    }

    fn msb_mask(&self, a: Self::Reg) -> Mask64 {
        self.counter.bump(WideOp::MsbMask);
        self.inner.msb_mask(a)
    }

    fn pairwise_dot_8to16(&self, unsigned_vals: Self::Reg, signed_muls: Self::Reg) -> Self::Reg {
        self.counter.bump(WideOp::PairwiseDot8to16);
        self.inner.pairwise_dot_8to16(unsigned_vals, signed_muls)
    }

    fn pairwise_dot_16to32(&self, vals: Self::Reg, muls: Self::Reg) -> Self::Reg {
        self.counter.bump(WideOp::PairwiseDot16to32);
        self.inner.pairwise_dot_16to32(vals, muls)
    }
}

/// Block-in, block-out adapters for running a single operation on any
/// backend. Used by the differential tests and handy for exploration.
pub mod blockwise {
    use super::{Block, Mask64, WideOps};

    fn out<W: WideOps>(ops: &W, r: W::Reg) -> Block {
        let mut b = Block::ZERO;
        ops.store(r, &mut b.0);
        b
    }

    pub fn byte_permute<W: WideOps>(ops: &W, indexes: &Block, values: &Block) -> Block {
        out(ops, ops.byte_permute(ops.load(&indexes.0), ops.load(&values.0)))
    }

    pub fn dual_table_permute<W: WideOps>(ops: &W, indexes: &Block, lo: &Block, hi: &Block) -> Block {
        out(
            ops,
            ops.dual_table_permute(ops.load(&indexes.0), ops.load(&lo.0), ops.load(&hi.0)),
        )
    }

    pub fn multishift<W: WideOps>(ops: &W, words: &Block, shifts: &Block) -> Block {
        out(ops, ops.multishift(ops.load(&words.0), ops.load(&shifts.0)))
    }

    pub fn ternary_or3<W: WideOps>(ops: &W, a: &Block, b: &Block, c: &Block) -> Block {
        out(
            ops,
            ops.ternary_or3(ops.load(&a.0), ops.load(&b.0), ops.load(&c.0)),
        )
    }

    pub fn msb_mask<W: WideOps>(ops: &W, a: &Block) -> Mask64 {
        ops.msb_mask(ops.load(&a.0))
    }

    pub fn pairwise_dot_8to16<W: WideOps>(ops: &W, vals: &Block, muls: &Block) -> Block {
        out(ops, ops.pairwise_dot_8to16(ops.load(&vals.0), ops.load(&muls.0)))
    }

    pub fn pairwise_dot_16to32<W: WideOps>(ops: &W, vals: &Block, muls: &Block) -> Block {
        out(ops, ops.pairwise_dot_16to32(ops.load(&vals.0), ops.load(&muls.0)))
    }
}

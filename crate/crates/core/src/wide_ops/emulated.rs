use super::{Block, Mask64, WideOps, BLOCK_LEN};

/// Portable, bit-exact model of the wide operations on plain byte arrays.
#[derive(Debug, Clone, Copy, Default)]
pub struct Emulated;

impl WideOps for Emulated {
    type Reg = Block;

    #[inline]
    fn load(&self, bytes: &[u8]) -> Block {
        if bytes.len() >= BLOCK_LEN {
            let mut b = Block::ZERO;
            b.0.copy_from_slice(&bytes[..BLOCK_LEN]);
            b
        } else {
            Block::from_prefix(bytes)
        }
    }

    #[inline]
    fn store(&self, reg: Block, out: &mut [u8]) {
        let n = out.len().min(BLOCK_LEN);
        out[..n].copy_from_slice(&reg.0[..n]);
    }

    #[inline]
    fn byte_permute(&self, indexes: Block, values: Block) -> Block {
        let mut out = Block::ZERO;
        for (o, &i) in out.0.iter_mut().zip(indexes.0.iter()) {
            *o = values.0[(i & 0x3f) as usize];
        }
        out
    }

    #[inline]
    fn dual_table_permute(&self, indexes: Block, lo: Block, hi: Block) -> Block {
        let mut out = Block::ZERO;
        for (o, &i) in out.0.iter_mut().zip(indexes.0.iter()) {
            let j = (i & 0x7f) as usize;
            *o = if j < 64 { lo.0[j] } else { hi.0[j - 64] };
        }
        out
    }

    #[inline]
    fn multishift(&self, words: Block, shifts: Block) -> Block {
        let mut out = Block::ZERO;
        for lane in 0..8 {
            let q = words.u64_at(lane);
            for k in 0..8 {
                let s = (shifts.0[8 * lane + k] & 0x3f) as u32;
                out.0[8 * lane + k] = q.rotate_right(s) as u8;
            }
        }
        out
    }

    #[inline]
    fn ternary_or3(&self, a: Block, b: Block, c: Block) -> Block {
        let mut out = Block::ZERO;
        for i in 0..BLOCK_LEN {
            out.0[i] = a.0[i] | b.0[i] | c.0[i];
        }
        out
    }

    #[inline]
    fn msb_mask(&self, a: Block) -> Mask64 {
        let mut bits = 0u64;
        for (i, &b) in a.0.iter().enumerate() {
            bits |= u64::from(b >> 7) << i;
        }
        Mask64(bits)
    }

    #[inline]
    fn pairwise_dot_8to16(&self, unsigned_vals: Block, signed_muls: Block) -> Block {
        let mut out = Block::ZERO;
        for p in 0..32 {
            let u0 = i32::from(unsigned_vals.0[2 * p]);
            let u1 = i32::from(unsigned_vals.0[2 * p + 1]);
            let m0 = i32::from(signed_muls.0[2 * p] as i8);
            let m1 = i32::from(signed_muls.0[2 * p + 1] as i8);
            let sum = (u0 * m0 + u1 * m1).clamp(i32::from(i16::MIN), i32::from(i16::MAX));
            out.0[2 * p..2 * p + 2].copy_from_slice(&(sum as i16).to_le_bytes());
        }
        out
    }

    #[inline]
    fn pairwise_dot_16to32(&self, vals: Block, muls: Block) -> Block {
        let mut out = Block::ZERO;
        for p in 0..16 {
            let v0 = i32::from(vals.u16_at(2 * p) as i16);
            let v1 = i32::from(vals.u16_at(2 * p + 1) as i16);
            let m0 = i32::from(muls.u16_at(2 * p) as i16);
            let m1 = i32::from(muls.u16_at(2 * p + 1) as i16);
            // (-2^15)^2 * 2 = 2^31 is the one case that leaves i32; the
            // instruction wraps it to i32::MIN.
            let sum = (v0 * m0).wrapping_add(v1 * m1);
            out.0[4 * p..4 * p + 4].copy_from_slice(&sum.to_le_bytes());
        }
        out
    }
}

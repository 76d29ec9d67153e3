use std::arch::x86_64::*;

use super::{Mask64, WideOps, BLOCK_LEN};

/// AVX-512 (F, BW, VBMI) backend. Only obtainable through
/// [`Native::detect`], so holding one proves the CPU supports every
/// instruction the methods issue.
///
/// Methods are `#[inline(always)]`: kernels reach full speed only when they
/// are instantiated inside a function compiled with
/// `#[target_feature(enable = "avx512f,avx512bw,avx512vbmi")]`.
#[derive(Debug, Clone, Copy)]
pub struct Native {
    _probe: (),
}

impl Native {
    pub fn detect() -> Option<Native> {
        (is_x86_feature_detected!("avx512f")
            && is_x86_feature_detected!("avx512bw")
            && is_x86_feature_detected!("avx512vbmi"))
        .then_some(Native { _probe: () })
    }
}

#[inline(always)]
fn prefix_mask(len: usize) -> u64 {
    if len >= 64 {
        u64::MAX
    } else {
        (1u64 << len) - 1
    }
}

// SAFETY (whole impl): a `Native` exists only after `detect` confirmed
// avx512f, avx512bw and avx512vbmi. Loads and stores go through byte masks
// limited to the slice length.
impl WideOps for Native {
    type Reg = __m512i;

    #[inline(always)]
    fn load(&self, bytes: &[u8]) -> __m512i {
        unsafe {
            if bytes.len() >= BLOCK_LEN {
                _mm512_loadu_si512(bytes.as_ptr().cast())
            } else {
                _mm512_maskz_loadu_epi8(prefix_mask(bytes.len()), bytes.as_ptr().cast())
            }
        }
    }

    #[inline(always)]
    fn store(&self, reg: __m512i, out: &mut [u8]) {
        unsafe {
            if out.len() >= BLOCK_LEN {
                _mm512_storeu_si512(out.as_mut_ptr().cast(), reg)
            } else {
                _mm512_mask_storeu_epi8(out.as_mut_ptr().cast(), prefix_mask(out.len()), reg)
            }
        }
    }

    #[inline(always)]
    fn byte_permute(&self, indexes: __m512i, values: __m512i) -> __m512i {
        unsafe { _mm512_permutexvar_epi8(indexes, values) }
    }

    #[inline(always)]
    fn dual_table_permute(&self, indexes: __m512i, lo: __m512i, hi: __m512i) -> __m512i {
        unsafe { _mm512_permutex2var_epi8(lo, indexes, hi) }
    }

    #[inline(always)]
    fn multishift(&self, words: __m512i, shifts: __m512i) -> __m512i {
        unsafe { _mm512_multishift_epi64_epi8(shifts, words) }
    }

    #[inline(always)]
    fn ternary_or3(&self, a: __m512i, b: __m512i, c: __m512i) -> __m512i {
        unsafe { _mm512_ternarylogic_epi32::<0xfe>(a, b, c) }
    }

    #[inline(always)]
    fn msb_mask(&self, a: __m512i) -> Mask64 {
        Mask64(unsafe { _mm512_movepi8_mask(a) })
    }

    #[inline(always)]
    fn pairwise_dot_8to16(&self, unsigned_vals: __m512i, signed_muls: __m512i) -> __m512i {
        unsafe { _mm512_maddubs_epi16(unsigned_vals, signed_muls) }
    }

    #[inline(always)]
    fn pairwise_dot_16to32(&self, vals: __m512i, muls: __m512i) -> __m512i {
        unsafe { _mm512_madd_epi16(vals, muls) }
    }
}

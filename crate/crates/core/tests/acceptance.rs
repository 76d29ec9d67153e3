//! Exit criteria. Run with `cargo test --test acceptance -- --nocapture`
//! to see one PASS/FAIL line per criterion.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use vbmi_base64::alphabet::{derive_decode_tables, derive_encode_tables, SENTINEL};
use vbmi_base64::bench::{self, Direction};
use vbmi_base64::codec::native_available;
use vbmi_base64::scalar_codec::{scalar_decode, scalar_encode, DecodeError, ErrorKind};
use vbmi_base64::vector_decoder::{self, ErrorAccumulator, Verdict};
use vbmi_base64::vector_encoder;
use vbmi_base64::wide_ops::{blockwise as bw, Block, Counting, Emulated, OpCounter, WideOp, WideOps};
use vbmi_base64::{Alphabet, Backend, Codec, CodecConfig, Strictness};

fn criterion(id: u32, name: &str, check: impl FnOnce() -> Result<String, String>) {
    match check() {
        Ok(detail) => println!("[PASS] criterion {id}: {name} ({detail})"),
        Err(why) => {
            println!("[FAIL] criterion {id}: {name}: {why}");
            panic!("criterion {id} failed: {why}");
        }
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn wide_codecs(alphabet: Alphabet, pad: bool, strictness: Strictness) -> Vec<Codec> {
    let mut backends = vec![Backend::Emulated];
    if native_available() {
        backends.push(Backend::Native);
    }
    backends
        .into_iter()
        .map(|backend| {
            Codec::new(CodecConfig {
                alphabet,
                pad_output: pad,
                strictness,
                backend,
            })
            .unwrap()
        })
        .collect()
}

fn random_alphabet(rng: &mut ChaCha8Rng) -> Alphabet {
    loop {
        let mut pool: Vec<u8> = (0..128).collect();
        for i in (1..128).rev() {
            pool.swap(i, rng.gen_range(0..=i));
        }
        if let Ok(a) = Alphabet::new(&pool[..64], pool[64]) {
            return a;
        }
    }
}

#[test]
fn c1_oracle_equivalence() {
    criterion(1, "emulated wide pipeline equals scalar oracle", || {
        const CASES: usize = 100_000;
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let std = Alphabet::STANDARD;
        let configs = [
            (true, Strictness::Strict),
            (false, Strictness::Lenient),
            (true, Strictness::Lenient),
        ];
        let codecs: Vec<Codec> = configs
            .iter()
            .map(|&(pad, strictness)| {
                Codec::new(CodecConfig {
                    alphabet: std,
                    pad_output: pad,
                    strictness,
                    backend: Backend::Emulated,
                })
                .unwrap()
            })
            .collect();
        let mut invalid = 0usize;
        for i in 0..CASES {
            let which = i % configs.len();
            let (pad, mode) = configs[which];
            let codec = &codecs[which];
            let len = rng.gen_range(0..=4096);
            let data: Vec<u8> = (0..len).map(|_| rng.gen()).collect();

            let oracle_text = scalar_encode(&data, &std, pad);
            let text = codec.encode(&data);
            ensure(text == oracle_text, || format!("encode mismatch, case {i}, len {len}"))?;

            let mut probe = text;
            match i % 8 {
                0 if !probe.is_empty() => {
                    let k = rng.gen_range(0..probe.len());
                    probe[k] = rng.gen();
                }
                1 => {
                    let n = rng.gen_range(0..300);
                    probe = (0..n).map(|_| rng.gen()).collect();
                }
                _ => {}
            }
            let got = codec.decode(&probe);
            let want = scalar_decode(&probe, &std, mode);
            ensure(got == want, || format!("decode mismatch, case {i}: {got:?} vs {want:?}"))?;
            invalid += want.is_err() as usize;
        }
        Ok(format!("{CASES} cases, {invalid} with errors"))
    });
}

#[test]
fn c2_reference_vectors() {
    criterion(2, "reference vectors", || {
        let vectors: [(&[u8], &[u8]); 7] = [
            (b"", b""),
            (b"f", b"Zg=="),
            (b"fo", b"Zm8="),
            (b"foo", b"Zm9v"),
            (b"foob", b"Zm9vYg=="),
            (b"fooba", b"Zm9vYmE="),
            (b"foobar", b"Zm9vYmFy"),
        ];
        let mut codecs = vec![Codec::new(CodecConfig::default().with_backend(Backend::Scalar)).unwrap()];
        codecs.extend(wide_codecs(Alphabet::STANDARD, true, Strictness::Strict));
        for (plain, text) in vectors {
            ensure(scalar_encode(plain, &Alphabet::STANDARD, true) == text, || {
                format!("scalar oracle disagrees on {plain:?}")
            })?;
            for c in &codecs {
                ensure(c.encode(plain) == text, || format!("{} encode {plain:?}", c.backend()))?;
                ensure(c.decode(text).as_deref() == Ok(plain), || {
                    format!("{} decode {text:?}", c.backend())
                })?;
            }
        }
        Ok(format!("7 vectors x {} backends", codecs.len()))
    });
}

#[test]
fn c3_worked_decode_example() {
    criterion(3, "translation and error mask of 'd','6',0xff,0xc3", || {
        let t = derive_decode_tables(&Alphabet::STANDARD);
        let mut input = Block::splat(b'A');
        input.0[..4].copy_from_slice(&[b'd', b'6', 0xff, 0xc3]);
        let translated = bw::dual_table_permute(&Emulated, &input, &t.translate_lo, &t.translate_hi);
        ensure(translated.0[..4] == [0x1d, 0x3a, SENTINEL, 0x02], || {
            format!("translated {:02x?}", &translated.0[..4])
        })?;
        let mut errors = ErrorAccumulator::new(&Emulated);
        vector_decoder::decode_block_64to48(&Emulated, &input, &t, &mut errors);
        let mask = Emulated.msb_mask(errors.acc);
        ensure(!mask.is_empty(), || "error mask empty".into())?;
        ensure(mask.0 == 0b1100, || format!("mask {:#x}", mask.0))?;
        ensure(vector_decoder::finalize_errors(&Emulated, &errors) == Verdict::Invalid, || {
            "verdict valid".into()
        })?;
        Ok("fields 1d 3a 80 02, mask bits 2,3".into())
    });
}

#[test]
fn c4_instruction_counts() {
    criterion(4, "3 ops per encoded block, 5 per decoded block, 1 mask per stream", || {
        let std = Alphabet::STANDARD;
        let counter = OpCounter::new();
        let ops = Counting::new(Emulated, &counter);

        let data: Vec<u8> = (0..48).collect();
        let out = vector_encoder::encode_block_48to64(&ops, &Block::from_prefix(&data), &derive_encode_tables(&std));
        ensure(out.0[..] == scalar_encode(&data, &std, true)[..], || "encode block output".into())?;
        ensure(counter.total() == 3, || format!("encode block: {:?}", counter.snapshot()))?;
        ensure(
            counter.snapshot() == vec![(WideOp::BytePermute, 2), (WideOp::Multishift, 1)],
            || format!("encode block mix: {:?}", counter.snapshot()),
        )?;

        counter.reset();
        let text = scalar_encode(&data, &std, true);
        let mut errors = ErrorAccumulator::new(&ops);
        let out = vector_decoder::decode_block_64to48(&ops, &Block::from_prefix(&text), &derive_decode_tables(&std), &mut errors);
        ensure(out.0[..48] == data[..], || "decode block output".into())?;
        ensure(counter.total() == 5, || format!("decode block: {:?}", counter.snapshot()))?;
        ensure(counter.get(WideOp::MsbMask) == 0, || "mask inside block".into())?;

        for blocks in [1usize, 2, 7, 40] {
            counter.reset();
            let data: Vec<u8> = (0..blocks * 48 + 30).map(|i| (i * 31) as u8).collect();
            let text = scalar_encode(&data, &std, true);
            let decoded = vector_decoder::decode_stream(&ops, &text, &std, Strictness::Strict);
            ensure(decoded.as_ref() == Ok(&data), || "stream decode output".into())?;
            let n = blocks as u64;
            ensure(counter.get(WideOp::MsbMask) == 1, || format!("{blocks} blocks: masks {}", counter.get(WideOp::MsbMask)))?;
            ensure(counter.total() == 5 * n + 1, || format!("{blocks} blocks: {:?}", counter.snapshot()))?;

            counter.reset();
            let enc = vector_encoder::encode_stream(&ops, &data, &std, true);
            ensure(enc == text, || "stream encode output".into())?;
            ensure(counter.total() == 3 * n, || format!("{blocks} blocks encode: {:?}", counter.snapshot()))?;
        }
        Ok("encode 3/block, decode 5/block + 1 msb_mask/stream".into())
    });
}

#[test]
fn c5_error_completeness() {
    criterion(5, "every single-byte substitution in a 256-char encoding", || {
        let std = Alphabet::STANDARD;
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let data: Vec<u8> = (0..192).map(|_| rng.gen()).collect();
        let text = scalar_encode(&data, &std, true);
        ensure(text.len() == 256, || "fixture length".into())?;
        let mut codecs = vec![Codec::new(CodecConfig::default().with_backend(Backend::Scalar)).unwrap()];
        codecs.extend(wide_codecs(std, true, Strictness::Strict));

        let mut flips = 0usize;
        let mut probe = text.clone();
        for k in 0..256 {
            for byte in 0..=255u8 {
                probe[k] = byte;
                // Expected verdict from the rules alone.
                let expected: Option<DecodeError> = if std.value_of(byte).is_some() {
                    None
                } else if byte != std.pad() {
                    Some(DecodeError::new(ErrorKind::InvalidByte, k))
                } else if k == 255 && std.value_of(text[254]).unwrap() & 0x03 == 0 {
                    None
                } else {
                    Some(DecodeError::new(ErrorKind::InvalidPadding, k))
                };
                for c in &codecs {
                    let got = c.decode(&probe);
                    ensure(got.as_ref().err() == expected.as_ref(), || {
                        format!("{} pos {k} byte {byte:#04x}: got {got:?}, want {expected:?}", c.backend())
                    })?;
                    if let Ok(out) = &got {
                        ensure(Ok(out) == scalar_decode(&probe, &std, Strictness::Strict).as_ref(), || {
                            format!("{} pos {k} byte {byte:#04x}: output", c.backend())
                        })?;
                    }
                }
                flips += expected.is_some() as usize;
            }
            probe[k] = text[k];
        }
        Ok(format!("65536 substitutions x {} backends, {flips} invalid", codecs.len()))
    });
}

#[test]
fn c6_alphabet_generality() {
    criterion(6, "standard, url-safe and random custom alphabets", || {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let mut alphabets = vec![Alphabet::STANDARD, Alphabet::URL_SAFE];
        alphabets.extend((0..8).map(|_| random_alphabet(&mut rng)));
        for a in &alphabets {
            for (pad, mode) in [(true, Strictness::Strict), (false, Strictness::Lenient)] {
                let codecs = wide_codecs(*a, pad, mode);
                for _ in 0..300 {
                    let len = rng.gen_range(0..=1500);
                    let data: Vec<u8> = (0..len).map(|_| rng.gen()).collect();
                    let oracle = scalar_encode(&data, a, pad);
                    for c in &codecs {
                        let text = c.encode(&data);
                        ensure(text == oracle, || format!("{a:?} {} encode len {len}", c.backend()))?;
                        ensure(c.decode(&text).as_ref() == Ok(&data), || {
                            format!("{a:?} {} round trip len {len}", c.backend())
                        })?;
                        let mut bad = text.clone();
                        if !bad.is_empty() {
                            let k = rng.gen_range(0..bad.len());
                            bad[k] = rng.gen();
                        }
                        ensure(c.decode(&bad) == scalar_decode(&bad, a, mode), || {
                            format!("{a:?} {} corrupted verdict", c.backend())
                        })?;
                    }
                }
            }
        }
        Ok(format!("{} alphabets ({} custom)", alphabets.len(), alphabets.len() - 2))
    });
}

fn check_packing<W: WideOps>(ops: &W, fields: &Block) -> Result<(), String> {
    let t = derive_decode_tables(&Alphabet::STANDARD);
    let mut merged = Block::ZERO;
    ops.store(
        ops.pairwise_dot_16to32(
            ops.pairwise_dot_8to16(ops.load(&fields.0), ops.load(&t.madd1.0)),
            ops.load(&t.madd2.0),
        ),
        &mut merged.0,
    );
    let mut packed = Block::ZERO;
    ops.store(ops.byte_permute(ops.load(&t.pack_idx.0), ops.load(&merged.0)), &mut packed.0);
    for g in 0..16 {
        let f = &fields.0[4 * g..4 * g + 4];
        let direct = u32::from(f[0]) << 18 | u32::from(f[1]) << 12 | u32::from(f[2]) << 6 | u32::from(f[3]);
        ensure(merged.u32_at(g) == direct, || {
            format!("group {g} fields {f:?}: {:#x} != {direct:#x}", merged.u32_at(g))
        })?;
        ensure(packed.0[3 * g..3 * g + 3] == direct.to_be_bytes()[1..], || format!("compaction of group {g}"))?;
    }
    Ok(())
}

#[test]
fn c7_packing_algebra() {
    criterion(7, "multiply-add packing equals a*2^18 + b*2^12 + c*2^6 + d", || {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut blocks = Vec::new();
        // 256 blocks that put every (x, y) pair at each adjacent field position
        for j in 0..256usize {
            let mut b = Block::ZERO;
            for g in 0..16 {
                let p = j * 16 + g;
                let (x, y) = ((p / 64) as u8, (p % 64) as u8);
                b.0[4 * g..4 * g + 4].copy_from_slice(&[x, y, x, y]);
            }
            blocks.push(b);
        }
        for _ in 0..10_000 {
            let mut b = Block::ZERO;
            for v in b.0.iter_mut() {
                *v = rng.gen_range(0..64);
            }
            blocks.push(b);
        }
        let mut seen: [HashSet<(u8, u8)>; 3] = Default::default();
        for b in &blocks {
            for g in 0..16 {
                for (pos, set) in seen.iter_mut().enumerate() {
                    set.insert((b.0[4 * g + pos], b.0[4 * g + pos + 1]));
                }
            }
            check_packing(&Emulated, b)?;
            #[cfg(target_arch = "x86_64")]
            if let Some(n) = vbmi_base64::wide_ops::Native::detect() {
                check_packing(&n, b)?;
            }
        }
        ensure(seen.iter().all(|s| s.len() == 4096), || "pair coverage incomplete".into())?;
        Ok(format!("{} blocks, all 4096 pairs at each adjacent position", blocks.len()))
    });
}

#[test]
fn c8_performance_and_sweep() {
    criterion(8, "wide >= 2x scalar at 64 kB; sweep CSV with memcpy baseline", || {
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        let scalar = Codec::new(CodecConfig::default().with_backend(Backend::Scalar)).unwrap();
        let mut codecs = vec![scalar];
        let native = native_available();
        if native {
            codecs.push(Codec::new(CodecConfig::default().with_backend(Backend::Native)).unwrap());
        }

        let sizes = bench::default_sizes();
        let samples = bench::run_sweep(&codecs, &sizes, 10).map_err(|e| e.to_string())?;
        let path = dir.path().join("sweep.csv");
        bench::emit_csv(&samples, &path).map_err(|e| e.to_string())?;
        let rows = bench::read_csv(std::fs::File::open(&path).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        ensure(rows.len() == sizes.len() * (1 + 2 * codecs.len()), || format!("{} rows", rows.len()))?;
        for &s in &sizes {
            ensure(
                rows.iter().any(|r| r.direction == Direction::Memcpy && r.size_bytes == s && r.gbps > 0.0),
                || format!("memcpy baseline missing at {s}"),
            )?;
        }

        if !native {
            println!("notice: native wide backend unavailable; throughput ratio not asserted");
            return Ok("sweep only; native backend unavailable".into());
        }
        let gbps = |imp: &str, dir: Direction| {
            samples
                .iter()
                .find(|s| s.implementation == imp && s.direction == dir && s.size_bytes == 65536)
                .map(|s| s.gbps())
                .unwrap_or(f64::NAN)
        };
        let mut detail = Vec::new();
        for dir in [Direction::Encode, Direction::Decode] {
            let (n, s) = (gbps("native", dir), gbps("scalar", dir));
            detail.push(format!("{dir}: native {n:.2} GB/s vs scalar {s:.2} GB/s ({:.1}x)", n / s));
            ensure(n >= 2.0 * s, || detail.join("; "))?;
        }
        Ok(detail.join("; "))
    });
}

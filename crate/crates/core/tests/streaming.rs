use proptest::prelude::*;
use vbmi_base64::{Backend, Codec, CodecConfig, DecodeError, Strictness};

fn codec(strictness: Strictness, backend: Backend) -> Codec {
    Codec::new(CodecConfig { strictness, ..CodecConfig::default() }.with_backend(backend)).unwrap()
}

fn backends() -> Vec<Backend> {
    let mut v = vec![Backend::Scalar, Backend::Emulated];
    if vbmi_base64::detect_backend() == Backend::Native {
        v.push(Backend::Native);
    }
    v
}

/// Splits `data` at the given cut points (taken modulo the length).
fn chunks<'a>(data: &'a [u8], cuts: &[usize]) -> Vec<&'a [u8]> {
    let mut points: Vec<usize> = cuts.iter().map(|c| c % (data.len() + 1)).collect();
    points.push(0);
    points.push(data.len());
    points.sort_unstable();
    points.windows(2).map(|w| &data[w[0]..w[1]]).collect()
}

fn stream_decode(c: &Codec, pieces: &[&[u8]]) -> Result<Vec<u8>, DecodeError> {
    let mut dec = c.stream_decoder();
    let mut out = Vec::new();
    for p in pieces {
        dec.push(p, &mut out)?;
    }
    dec.finish(&mut out)?;
    Ok(out)
}

fn stream_encode(c: &Codec, pieces: &[&[u8]]) -> Vec<u8> {
    let mut enc = c.stream_encoder();
    let mut out = Vec::new();
    for p in pieces {
        enc.push(p, &mut out);
    }
    let total = enc.finish(&mut out);
    assert_eq!(total, out.len());
    out
}

fn mode() -> impl Strategy<Value = Strictness> {
    prop_oneof![Just(Strictness::Strict), Just(Strictness::Lenient)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn chunked_encode_matches_one_shot(
        data in prop::collection::vec(any::<u8>(), 0..600),
        cuts in prop::collection::vec(any::<usize>(), 0..8),
    ) {
        for b in backends() {
            let c = codec(Strictness::Strict, b);
            prop_assert_eq!(stream_encode(&c, &chunks(&data, &cuts)), c.encode(&data));
        }
    }

    #[test]
    fn chunked_decode_of_valid_text_matches_one_shot(
        data in prop::collection::vec(any::<u8>(), 0..600),
        cuts in prop::collection::vec(any::<usize>(), 0..8),
        strictness in mode(),
    ) {
        let text = codec(Strictness::Strict, Backend::Scalar).encode(&data);
        for b in backends() {
            let c = codec(strictness, b);
            let got = stream_decode(&c, &chunks(&text, &cuts));
            prop_assert_eq!(got.as_deref(), Ok(&data[..]));
        }
    }

    #[test]
    fn chunked_decode_of_corrupt_text_matches_one_shot(
        data in prop::collection::vec(any::<u8>(), 0..400),
        edits in prop::collection::vec((any::<usize>(), prop_oneof![Just(b'='), Just(0xffu8), Just(b' '), any::<u8>()]), 1..4),
        truncate in 0usize..3,
        cuts in prop::collection::vec(any::<usize>(), 0..8),
        strictness in mode(),
    ) {
        let mut text = codec(Strictness::Strict, Backend::Scalar).encode(&data);
        for (at, byte) in edits {
            if !text.is_empty() {
                let i = at % text.len();
                text[i] = byte;
            }
        }
        text.truncate(text.len().saturating_sub(truncate));
        for b in backends() {
            let c = codec(strictness, b);
            let expected = c.decode(&text);
            prop_assert_eq!(stream_decode(&c, &chunks(&text, &cuts)), expected);
        }
    }

    #[test]
    fn chunked_decode_of_unpadded_text(
        data in prop::collection::vec(any::<u8>(), 0..300),
        cuts in prop::collection::vec(any::<usize>(), 0..6),
        strictness in mode(),
    ) {
        let unpadded = Codec::new(CodecConfig { pad_output: false, ..CodecConfig::default() }).unwrap();
        let text = unpadded.encode(&data);
        for b in backends() {
            let c = codec(strictness, b);
            prop_assert_eq!(stream_decode(&c, &chunks(&text, &cuts)), c.decode(&text));
        }
    }
}

#[test]
fn byte_at_a_time() {
    let data: Vec<u8> = (0..=255u8).cycle().take(1000).collect();
    for b in backends() {
        let c = codec(Strictness::Strict, b);
        let text = c.encode(&data);
        let single: Vec<&[u8]> = text.chunks(1).collect();
        assert_eq!(stream_decode(&c, &single).unwrap(), data);
        let single: Vec<&[u8]> = data.chunks(1).collect();
        assert_eq!(stream_encode(&c, &single), text);
    }
}

#[test]
fn decoder_stays_failed_after_error() {
    let c = codec(Strictness::Strict, Backend::Scalar);
    let mut dec = c.stream_decoder();
    let mut out = Vec::new();
    let first = dec.push(b"Zm9v!mFy", &mut out).unwrap_err();
    assert_eq!(first.offset, 4);
    assert_eq!(dec.push(b"Zm9v", &mut out), Err(first));
    assert_eq!(dec.finish(&mut out), Err(first));
}

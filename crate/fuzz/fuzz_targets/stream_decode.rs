#![no_main]

use libfuzzer_sys::fuzz_target;
use vbmi_base64::{Codec, CodecConfig, Strictness};

fuzz_target!(|data: &[u8]| {
    if data.len() < 2 {
        return;
    }
    let (head, text) = data.split_at(2);
    let strictness = if head[0] & 1 == 0 { Strictness::Strict } else { Strictness::Lenient };
    let step = usize::from(head[1]) + 1;
    let codec = Codec::new(CodecConfig { strictness, ..CodecConfig::default() }).unwrap();

    let mut dec = codec.stream_decoder();
    let mut out = Vec::new();
    let streamed = text
        .chunks(step)
        .try_for_each(|c| dec.push(c, &mut out))
        .and_then(|()| dec.finish(&mut out))
        .map(|_| out);
    assert_eq!(streamed, codec.decode(text));
});

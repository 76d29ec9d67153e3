#![no_main]

use libfuzzer_sys::fuzz_target;
use vbmi_base64::scalar_codec::scalar_decode;
use vbmi_base64::{detect_backend, Alphabet, Backend, Codec, CodecConfig, Strictness};

// Every wide backend must agree with the scalar decoder, errors included.
fuzz_target!(|data: &[u8]| {
    let Some((&flags, text)) = data.split_first() else { return };
    let strictness = if flags & 1 == 0 { Strictness::Strict } else { Strictness::Lenient };
    let alphabet = if flags & 2 == 0 { Alphabet::STANDARD } else { Alphabet::URL_SAFE };
    let expected = scalar_decode(text, &alphabet, strictness);

    let mut backends = vec![Backend::Emulated];
    if detect_backend() == Backend::Native {
        backends.push(Backend::Native);
    }
    for backend in backends {
        let codec = Codec::new(CodecConfig { alphabet, strictness, ..CodecConfig::default() }.with_backend(backend)).unwrap();
        assert_eq!(codec.decode(text), expected, "{backend:?}");
    }
});

#![no_main]

use libfuzzer_sys::fuzz_target;
use vbmi_base64::cli::parse_alphabet;
use vbmi_base64::{Backend, Codec, CodecConfig};

fuzz_target!(|data: &[u8]| {
    let Ok(spec) = std::str::from_utf8(data) else { return };
    let Ok(alphabet) = parse_alphabet(spec) else { return };
    // Any accepted alphabet must round-trip through the wide tables.
    let sample: Vec<u8> = (0..=255).collect();
    let wide = Codec::new(CodecConfig { alphabet, ..CodecConfig::default() }.with_backend(Backend::Emulated)).unwrap();
    let scalar = Codec::new(CodecConfig { alphabet, ..CodecConfig::default() }.with_backend(Backend::Scalar)).unwrap();
    let text = wide.encode(&sample);
    assert_eq!(text, scalar.encode(&sample));
    assert_eq!(wide.decode(&text).unwrap(), sample);
});

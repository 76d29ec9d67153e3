#![no_main]

use libfuzzer_sys::fuzz_target;
use vbmi_base64::scalar_codec::scalar_encode;
use vbmi_base64::{Alphabet, Backend, Codec, CodecConfig, Strictness};

fuzz_target!(|data: &[u8]| {
    for pad_output in [true, false] {
        let reference = scalar_encode(data, &Alphabet::STANDARD, pad_output);
        let codec = Codec::new(CodecConfig { pad_output, strictness: Strictness::Lenient, ..CodecConfig::default() }.with_backend(Backend::Auto)).unwrap();
        let encoded = codec.encode(data);
        assert_eq!(encoded, reference);
        assert_eq!(codec.decode(&encoded).unwrap(), data);
    }
});

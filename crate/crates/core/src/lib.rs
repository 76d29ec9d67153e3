//! Base64 encoding and decoding built on 512-bit byte-permute kernels.
//!
//! Encoding takes three wide operations per 48 input bytes and decoding five
//! per 64 characters, with invalid input detected once per stream instead of
//! once per block. The kernels are written against [`wide_ops::WideOps`] and
//! run either on AVX-512 VBMI hardware or on a portable bit-exact
//! emulation; a table-driven scalar codec serves as the reference and
//! handles tails.
//!
//! ```
//! use vbmi_base64::{Codec, CodecConfig};
//!
//! let codec = Codec::new(CodecConfig::default()).unwrap();
//! assert_eq!(codec.encode(b"foobar"), b"Zm9vYmFy");
//! assert_eq!(codec.decode(b"Zm9vYg==").unwrap(), b"foob");
//! ```

pub mod alphabet;
pub mod bench;
pub mod cli;
pub mod codec;
pub mod scalar_codec;
pub mod vector_decoder;
pub mod vector_encoder;
pub mod wide_ops;

pub use alphabet::{Alphabet, AlphabetError};
pub use codec::{detect_backend, Backend, Codec, CodecConfig, CodecError, StreamDecoder, StreamEncoder};
pub use scalar_codec::{DecodeError, ErrorKind, Strictness};

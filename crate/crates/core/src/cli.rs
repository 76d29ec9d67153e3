//! `vbmi64` command-line front end.
//!
//! Exit codes: 0 success, 1 decode or I/O failure, 2 usage error.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, Read, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::alphabet::{Alphabet, DEFAULT_PAD};
use crate::bench;
use crate::codec::{detect_backend, Backend, Codec, CodecConfig};
use crate::scalar_codec::Strictness;

/// Input is processed in pieces of this size.
pub const CHUNK_SIZE: usize = 64 * 1024;

const EXIT_FAILURE: i32 = 1;
const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "vbmi64", version, about = "Base64 encoder/decoder with AVX-512 VBMI kernels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Encode binary input to base64.
    Encode(CodecArgs),
    /// Decode base64 input to binary.
    Decode(CodecArgs),
    /// Measure throughput and write a CSV report.
    Bench(BenchArgs),
}

#[derive(Args, Debug)]
struct CodecArgs {
    /// std, url, or custom:<64 characters>
    #[arg(long, default_value = "std")]
    alphabet: String,
    /// Emit padding (default).
    #[arg(long, overrides_with = "no_pad")]
    pad: bool,
    /// Omit padding.
    #[arg(long = "no-pad", overrides_with = "pad")]
    no_pad: bool,
    /// Require canonical padded input (default).
    #[arg(long, overrides_with = "lenient")]
    strict: bool,
    /// Accept unpadded input.
    #[arg(long, overrides_with = "strict")]
    lenient: bool,
    /// Drop CR and LF bytes before decoding.
    #[arg(long)]
    ignore_newlines: bool,
    /// auto, scalar, emulated or native
    #[arg(long, default_value = "auto")]
    backend: Backend,
    /// Input file, or - for stdin.
    #[arg(long = "in", default_value = "-")]
    input: String,
    /// Output file, or - for stdout.
    #[arg(long = "out", default_value = "-")]
    output: String,
}

#[derive(Args, Debug)]
struct BenchArgs {
    /// Comma-separated base64 sizes in bytes.
    #[arg(long, value_delimiter = ',')]
    sizes: Vec<usize>,
    #[arg(long, default_value_t = bench::MIN_REPEATS)]
    repeats: usize,
    /// Where to write the sweep CSV.
    #[arg(long, default_value = "bench.csv")]
    csv: PathBuf,
    /// Files to benchmark for decoding; adds a corpus CSV next to --csv.
    #[arg(long, num_args = 1..)]
    corpus: Vec<PathBuf>,
    /// Comma-separated backends (default: scalar plus native when available).
    #[arg(long, value_delimiter = ',')]
    backends: Vec<Backend>,
}

pub fn parse_alphabet(spec: &str) -> Result<Alphabet, String> {
    match spec {
        "std" | "standard" => Ok(Alphabet::STANDARD),
        "url" => Ok(Alphabet::URL_SAFE),
        _ => match spec.strip_prefix("custom:") {
            Some(chars) => Alphabet::new(chars.as_bytes(), DEFAULT_PAD).map_err(|e| e.to_string()),
            None => Err(format!("unknown alphabet {spec:?} (expected std, url or custom:<64 chars>)")),
        },
    }
}

enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

/// Runs the tool with `args` (including the program name) and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { 0 };
        }
    };
    let result = match cli.command {
        Command::Encode(a) => transcode(&a, false),
        Command::Decode(a) => transcode(&a, true),
        Command::Bench(a) => run_bench(&a),
    };
    match result {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            EXIT_FAILURE
        }
    }
}

fn build_codec(a: &CodecArgs) -> Result<Codec, Failure> {
    let alphabet = parse_alphabet(&a.alphabet).map_err(Failure::Usage)?;
    let config = CodecConfig {
        alphabet,
        pad_output: !a.no_pad,
        strictness: if a.lenient { Strictness::Lenient } else { Strictness::Strict },
        backend: a.backend,
    };
    Codec::new(config).map_err(|e| Failure::Usage(e.to_string()))
}

fn open_input(path: &str) -> io::Result<Box<dyn Read>> {
    Ok(if path == "-" {
        Box::new(io::stdin().lock())
    } else {
        Box::new(File::open(path)?)
    })
}

fn open_output(path: &str) -> io::Result<Box<dyn Write>> {
    Ok(if path == "-" {
        Box::new(io::stdout().lock())
    } else {
        Box::new(File::create(path)?)
    })
}

/// Reads until `buf` is full or the input ends.
fn fill(r: &mut dyn Read, buf: &mut [u8]) -> io::Result<usize> {
    let mut n = 0;
    while n < buf.len() {
        match r.read(&mut buf[n..]) {
            Ok(0) => break,
            Ok(k) => n += k,
            Err(e) if e.kind() == io::ErrorKind::Interrupted => {}
            Err(e) => return Err(e),
        }
    }
    Ok(n)
}

fn transcode(a: &CodecArgs, decode: bool) -> Result<(), Failure> {
    let codec = build_codec(a)?;
    let mut input = open_input(&a.input)?;
    let mut output = open_output(&a.output)?;
    let mut buf = vec![0u8; CHUNK_SIZE];
    let mut out = Vec::with_capacity(CHUNK_SIZE * 4 / 3 + 8);
    let offset_note = if decode && a.ignore_newlines { " (line breaks removed)" } else { "" };
    let decode_failure = |e: crate::scalar_codec::DecodeError| Failure::Runtime(format!("{e}{offset_note}"));

    if decode {
        let mut dec = codec.stream_decoder();
        let mut stripped = Vec::new();
        loop {
            let n = fill(&mut input, &mut buf)?;
            if n == 0 {
                break;
            }
            let chunk = if a.ignore_newlines {
                stripped.clear();
                stripped.extend(buf[..n].iter().copied().filter(|&c| c != b'\n' && c != b'\r'));
                &stripped[..]
            } else {
                &buf[..n]
            };
            out.clear();
            dec.push(chunk, &mut out).map_err(decode_failure)?;
            output.write_all(&out)?;
        }
        out.clear();
        dec.finish(&mut out).map_err(decode_failure)?;
        output.write_all(&out)?;
    } else {
        let mut enc = codec.stream_encoder();
        loop {
            let n = fill(&mut input, &mut buf)?;
            if n == 0 {
                break;
            }
            out.clear();
            enc.push(&buf[..n], &mut out);
            output.write_all(&out)?;
        }
        out.clear();
        enc.finish(&mut out);
        output.write_all(&out)?;
    }
    output.flush()?;
    Ok(())
}

fn run_bench(a: &BenchArgs) -> Result<(), Failure> {
    let sizes = if a.sizes.is_empty() { bench::default_sizes() } else { a.sizes.clone() };
    let backends = if a.backends.is_empty() {
        let mut v = vec![Backend::Scalar];
        if detect_backend() == Backend::Native {
            v.push(Backend::Native);
        } else {
            eprintln!("note: native wide backend unavailable on this CPU; measuring scalar only");
        }
        v
    } else {
        a.backends.clone()
    };
    let codecs = backends
        .iter()
        .map(|&b| Codec::new(CodecConfig::default().with_backend(b)))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| Failure::Usage(e.to_string()))?;
    eprintln!("{}", bench::Environment::probe());

    let samples = bench::run_sweep(&codecs, &sizes, a.repeats).map_err(bench_failure)?;
    print_table(&samples);
    bench::emit_csv(&samples, &a.csv).map_err(bench_failure)?;
    eprintln!("wrote {}", a.csv.display());

    if !a.corpus.is_empty() {
        let corpus = bench::run_corpus(&codecs, &a.corpus, a.repeats).map_err(bench_failure)?;
        println!();
        print_table(&corpus);
        let path = a.csv.with_extension("corpus.csv");
        bench::emit_csv(&corpus, &path).map_err(bench_failure)?;
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

fn bench_failure(e: bench::BenchError) -> Failure {
    match e {
        bench::BenchError::EmptySizes | bench::BenchError::TooFewRepeats(_) => Failure::Usage(e.to_string()),
        _ => Failure::Runtime(e.to_string()),
    }
}

fn print_table(samples: &[bench::ThroughputSample]) {
    println!("{:<16} {:<9} {:<8} {:>10} {:>9}", "source", "impl", "dir", "bytes", "GB/s");
    for s in samples {
        println!(
            "{:<16} {:<9} {:<8} {:>10} {:>9.2}",
            s.source.as_deref().unwrap_or("random"),
            s.implementation,
            s.direction,
            s.size_bytes,
            s.gbps()
        );
    }
}

//! Throughput harness.
//!
//! Each sample is the median of at least ten timed measurements, after a
//! few warm-up runs. Volume is always counted in base64 bytes: the encoder's
//! output size, the decoder's input size, and the same byte count for the
//! memory-copy baseline. Every input is checked against the scalar oracle
//! before it is timed.

use std::fmt;
use std::hint::black_box;
use std::io;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use thiserror::Error;

use crate::alphabet::Alphabet;
use crate::codec::Codec;
use crate::scalar_codec::{ScalarTables, Strictness};

pub const MIN_REPEATS: usize = 10;
pub const DEFAULT_WARMUP: usize = 3;

/// Base64 sizes of the default sweep: 1 kB to 64 kB.
pub fn default_sizes() -> Vec<usize> {
    (0..=6).map(|k| 1024 << k).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Encode,
    Decode,
    Memcpy,
}

impl Direction {
    pub fn name(self) -> &'static str {
        match self {
            Direction::Encode => "encode",
            Direction::Decode => "decode",
            Direction::Memcpy => "memcpy",
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Direction {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "encode" => Ok(Direction::Encode),
            "decode" => Ok(Direction::Decode),
            "memcpy" => Ok(Direction::Memcpy),
            other => Err(format!("unknown direction {other:?}")),
        }
    }
}

/// One measured configuration. `timings` are seconds per call.
#[derive(Debug, Clone, PartialEq)]
pub struct ThroughputSample {
    pub implementation: String,
    pub direction: Direction,
    /// Base64 bytes processed per call.
    pub size_bytes: usize,
    pub timings: Vec<f64>,
    /// Corpus file the sample came from, if any.
    pub source: Option<String>,
}

impl ThroughputSample {
    fn sorted(&self) -> Vec<f64> {
        let mut t = self.timings.clone();
        t.sort_by(f64::total_cmp);
        t
    }

    pub fn median_s(&self) -> f64 {
        let t = self.sorted();
        let n = t.len();
        if n == 0 {
            return f64::NAN;
        }
        if n % 2 == 1 {
            t[n / 2]
        } else {
            (t[n / 2 - 1] + t[n / 2]) / 2.0
        }
    }

    pub fn min_s(&self) -> f64 {
        self.timings.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_s(&self) -> f64 {
        self.timings.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Base64 gigabytes per second at the median timing.
    pub fn gbps(&self) -> f64 {
        self.size_bytes as f64 / self.median_s() / 1e9
    }
}

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("no sizes given")]
    EmptySizes,
    #[error("at least {MIN_REPEATS} repeats are required, got {0}")]
    TooFewRepeats(usize),
    #[error("{implementation} {direction} output differs from the scalar oracle on {what}")]
    OracleMismatch {
        implementation: String,
        direction: Direction,
        what: String,
    },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, Copy)]
pub struct Protocol {
    pub repeats: usize,
    pub warmup: usize,
    /// Each measurement runs the call often enough to last at least this
    /// long, then reports the per-call time.
    pub min_measure: Duration,
}

impl Protocol {
    pub fn new(repeats: usize) -> Result<Protocol, BenchError> {
        if repeats < MIN_REPEATS {
            return Err(BenchError::TooFewRepeats(repeats));
        }
        Ok(Protocol {
            repeats,
            warmup: DEFAULT_WARMUP,
            min_measure: Duration::from_micros(200),
        })
    }
}

fn measure(protocol: &Protocol, mut call: impl FnMut()) -> Vec<f64> {
    for _ in 0..protocol.warmup {
        call();
    }
    let mut iters = 1u32;
    loop {
        let t = Instant::now();
        for _ in 0..iters {
            call();
        }
        if t.elapsed() >= protocol.min_measure || iters >= 1 << 20 {
            break;
        }
        iters *= 2;
    }
    (0..protocol.repeats)
        .map(|_| {
            let t = Instant::now();
            for _ in 0..iters {
                call();
            }
            t.elapsed().as_secs_f64() / f64::from(iters)
        })
        .collect()
}

fn time_memcpy(protocol: &Protocol, size: usize, source: Option<&str>) -> ThroughputSample {
    let src: Vec<u8> = (0..size).map(|i| i as u8).collect();
    let mut dst = vec![0u8; size];
    let timings = measure(protocol, || {
        dst.copy_from_slice(black_box(&src));
        black_box(&mut dst);
    });
    ThroughputSample {
        implementation: "memcpy".into(),
        direction: Direction::Memcpy,
        size_bytes: size,
        timings,
        source: source.map(str::to_owned),
    }
}

fn time_encode(protocol: &Protocol, codec: &Codec, data: &[u8], expected: &[u8]) -> Result<ThroughputSample, BenchError> {
    let mut out = vec![0u8; codec.encoded_len(data.len())];
    codec.encode_into(data, &mut out);
    if out != expected {
        return Err(BenchError::OracleMismatch {
            implementation: codec.backend().name().into(),
            direction: Direction::Encode,
            what: format!("{} input bytes", data.len()),
        });
    }
    let timings = measure(protocol, || {
        codec.encode_into(black_box(data), &mut out);
        black_box(&mut out);
    });
    Ok(ThroughputSample {
        implementation: codec.backend().name().into(),
        direction: Direction::Encode,
        size_bytes: expected.len(),
        timings,
        source: None,
    })
}

fn time_decode(
    protocol: &Protocol,
    codec: &Codec,
    text: &[u8],
    expected: &[u8],
    source: Option<&str>,
) -> Result<ThroughputSample, BenchError> {
    let mut out = vec![0u8; codec.decoded_len_max(text.len())];
    let ok = matches!(codec.decode_into(text, &mut out), Ok(n) if out[..n] == *expected);
    if !ok {
        return Err(BenchError::OracleMismatch {
            implementation: codec.backend().name().into(),
            direction: Direction::Decode,
            what: source.map_or_else(|| format!("{} base64 bytes", text.len()), str::to_owned),
        });
    }
    let timings = measure(protocol, || {
        let _ = black_box(codec.decode_into(black_box(text), &mut out));
    });
    Ok(ThroughputSample {
        implementation: codec.backend().name().into(),
        direction: Direction::Decode,
        size_bytes: text.len(),
        timings,
        source: source.map(str::to_owned),
    })
}

/// Encode and decode throughput for every codec at every base64 size, plus
/// a memory-copy baseline per size. Inputs are seeded random bytes.
pub fn run_sweep(codecs: &[Codec], sizes: &[usize], repeats: usize) -> Result<Vec<ThroughputSample>, BenchError> {
    if sizes.is_empty() {
        return Err(BenchError::EmptySizes);
    }
    let protocol = Protocol::new(repeats)?;
    let mut rng = rand::rngs::StdRng::seed_from_u64(0x0b64);
    let mut samples = Vec::new();
    for &size in sizes {
        let data: Vec<u8> = (0..size / 4 * 3).map(|_| rng.gen()).collect();
        samples.push(time_memcpy(&protocol, size / 4 * 4, None));
        for codec in codecs {
            let oracle = ScalarTables::new(&codec.config().alphabet);
            let text = oracle.encode(&data, codec.config().pad_output);
            samples.push(time_encode(&protocol, codec, &data, &text)?);
            samples.push(time_decode(&protocol, codec, &text, &data, None)?);
        }
    }
    Ok(samples)
}

/// Decode throughput on real files, each encoded with the standard
/// alphabet first. The decoded bytes must equal the file before timing.
pub fn run_corpus(codecs: &[Codec], files: &[PathBuf], repeats: usize) -> Result<Vec<ThroughputSample>, BenchError> {
    let protocol = Protocol::new(repeats)?;
    let mut samples = Vec::new();
    for path in files {
        let data = std::fs::read(path).map_err(|source| BenchError::Io {
            path: path.clone(),
            source,
        })?;
        let label = path
            .file_name()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string());
        let text = ScalarTables::new(&Alphabet::STANDARD).encode(&data, true);
        samples.push(time_memcpy(&protocol, text.len(), Some(&label)));
        for codec in codecs {
            let cfg = codec.config();
            // Corpus text is always standard padded base64.
            let codec = if cfg.alphabet != Alphabet::STANDARD || cfg.strictness != Strictness::Strict {
                Codec::new(crate::codec::CodecConfig {
                    alphabet: Alphabet::STANDARD,
                    strictness: Strictness::Strict,
                    ..*cfg
                })
                .expect("backend already resolved once")
            } else {
                codec.clone()
            };
            samples.push(time_decode(&protocol, &codec, &text, &data, Some(&label))?);
        }
    }
    Ok(samples)
}

pub const CSV_HEADER: [&str; 7] = ["impl", "direction", "size_bytes", "median_s", "min_s", "max_s", "gbps"];

/// One row per sample; a header-only file when there are none.
pub fn emit_csv(samples: &[ThroughputSample], path: &Path) -> Result<(), BenchError> {
    let file = std::fs::File::create(path).map_err(|source| BenchError::Io {
        path: path.to_owned(),
        source,
    })?;
    write_csv(samples, file)
}

pub fn write_csv<W: io::Write>(samples: &[ThroughputSample], w: W) -> Result<(), BenchError> {
    let mut w = csv::Writer::from_writer(w);
    w.write_record(CSV_HEADER)?;
    for s in samples {
        w.write_record([
            s.implementation.clone(),
            s.direction.name().to_owned(),
            s.size_bytes.to_string(),
            format!("{:e}", s.median_s()),
            format!("{:e}", s.min_s()),
            format!("{:e}", s.max_s()),
            format!("{:.4}", s.gbps()),
        ])?;
    }
    w.flush().map_err(|e| BenchError::Csv(e.into()))?;
    Ok(())
}

/// A parsed CSV row.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvRow {
    pub implementation: String,
    pub direction: Direction,
    pub size_bytes: usize,
    pub median_s: f64,
    pub min_s: f64,
    pub max_s: f64,
    pub gbps: f64,
}

pub fn read_csv<R: io::Read>(r: R) -> Result<Vec<CsvRow>, BenchError> {
    let mut rdr = csv::Reader::from_reader(r);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_owned).collect();
    if header != CSV_HEADER {
        return Err(BenchError::Csv(csv::Error::from(io::Error::new(
            io::ErrorKind::InvalidData,
            format!("unexpected header {header:?}"),
        ))));
    }
    let bad = |what: &str| BenchError::Csv(csv::Error::from(io::Error::new(io::ErrorKind::InvalidData, what.to_owned())));
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let f = |i: usize| rec.get(i).ok_or_else(|| bad("short row"));
        let num = |i: usize| -> Result<f64, BenchError> { f(i)?.parse().map_err(|_| bad("bad number")) };
        rows.push(CsvRow {
            implementation: f(0)?.to_owned(),
            direction: f(1)?.parse().map_err(|e: String| bad(&e))?,
            size_bytes: f(2)?.parse().map_err(|_| bad("bad size"))?,
            median_s: num(3)?,
            min_s: num(4)?,
            max_s: num(5)?,
            gbps: num(6)?,
        });
    }
    Ok(rows)
}

/// Machine description recorded alongside a run.
#[derive(Debug, Clone)]
pub struct Environment {
    pub cpu_model: String,
    pub features: Vec<&'static str>,
}

impl Environment {
    pub fn probe() -> Environment {
        let cpu_model = std::fs::read_to_string("/proc/cpuinfo")
            .ok()
            .and_then(|s| {
                s.lines()
                    .find(|l| l.starts_with("model name"))
                    .and_then(|l| l.split(':').nth(1))
                    .map(|m| m.trim().to_owned())
            })
            .unwrap_or_else(|| "unknown".into());
        Environment {
            cpu_model,
            features: detected_features(),
        }
    }
}

impl fmt::Display for Environment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "cpu: {}; features: {}", self.cpu_model, self.features.join(","))
    }
}

#[cfg(target_arch = "x86_64")]
fn detected_features() -> Vec<&'static str> {
    let mut v = Vec::new();
    macro_rules! probe {
        ($($f:tt),*) => {$(
            if is_x86_feature_detected!($f) {
                v.push($f);
            }
        )*};
    }
    probe!("sse4.2", "avx2", "avx512f", "avx512bw", "avx512vbmi", "avx512vbmi2");
    v
}

#[cfg(not(target_arch = "x86_64"))]
fn detected_features() -> Vec<&'static str> {
    Vec::new()
}

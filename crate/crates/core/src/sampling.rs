//! Seedable random generation and chunked Monte Carlo estimators.
//!
//! Work is cut into fixed-size chunks. Chunk `k` draws from substream `k` of the run's
//! [`RandomSource`] and results are reduced in chunk order, so every estimator returns
//! the same bits whatever [`ChunkExecutor`] runs the chunks.
use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};
use core::ops::Range;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::geometry::{angle_between, chord_frame_from_endpoints, segments_intersect, Point2, SegmentEndpoints};
use crate::{Error, Result};

/// Generator identity recorded in run reports.
pub const GENERATOR_ID: &str =
    "chacha8 (rand_chacha 0.9, seed_from_u64, stream = chunk index); f64 = (u64 >> 11) * 2^-53";

/// Samples (or segment pairs) per chunk. Part of the reproducibility contract.
pub const CHUNK_SIZE: u64 = 1 << 16;

/// Stream reserved for the root generator so it never overlaps a chunk substream.
const ROOT_STREAM: u64 = u64::MAX;

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// A ChaCha8 generator tied to a 64-bit seed.
#[derive(Debug, Clone)]
pub struct RandomSource {
    seed: u64,
    rng: ChaCha8Rng,
}

impl RandomSource {
    pub fn new(seed: u64) -> Self {
        Self::with_stream(seed, ROOT_STREAM)
    }

    fn with_stream(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self { seed, rng }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Substream `k` of this seed. Distinct `k` select distinct ChaCha streams of the
    /// same key and cannot overlap.
    pub fn substream(&self, k: u64) -> RandomSource {
        assert!(k != ROOT_STREAM, "stream index reserved");
        Self::with_stream(self.seed, k)
    }

    /// An independent source for a named sub-task of a run.
    pub fn fork(&self, label: u64) -> RandomSource {
        RandomSource::new(splitmix64(self.seed ^ splitmix64(label)))
    }

    /// Uniform in `[0, 1)` with 53 random bits.
    pub fn uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

/// Runs chunk jobs and returns their outputs in chunk order.
pub trait ChunkExecutor {
    fn map_chunks<T, F>(&self, chunks: Range<u64>, job: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64) -> T + Sync + Send;
}

/// Runs chunks one after the other on the calling thread.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl ChunkExecutor for Sequential {
    fn map_chunks<T, F>(&self, chunks: Range<u64>, job: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64) -> T + Sync + Send,
    {
        chunks.map(job).collect()
    }
}

/// `sqrt(R) (cos G, sin G)` with `R ~ U[0, 1)` and `G ~ U[0, 2pi)`.
pub fn sample_disk_point(rng: &mut RandomSource) -> Point2 {
    let r = libm::sqrt(rng.uniform());
    let g = TAU * rng.uniform();
    Point2 { x: r * libm::cos(g), y: r * libm::sin(g) }
}

pub fn sample_segment(rng: &mut RandomSource) -> SegmentEndpoints {
    loop {
        let a = sample_disk_point(rng);
        let b = sample_disk_point(rng);
        if let Ok(s) = SegmentEndpoints::new(a, b) {
            return s;
        }
    }
}

/// A Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct McEstimate {
    pub value: f64,
    pub std_error: f64,
    pub n: u64,
}

impl McEstimate {
    pub fn proportion(successes: u64, n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("proportion over zero trials".into()));
        }
        let p = successes as f64 / n as f64;
        Ok(Self { value: p, std_error: libm::sqrt(p * (1.0 - p) / n as f64), n })
    }

    pub fn within_sigmas(&self, target: f64, sigmas: f64) -> bool {
        (self.value - target).abs() <= sigmas * self.std_error
    }
}

fn chunk_len(n: u64, k: u64) -> u64 {
    CHUNK_SIZE.min(n - k * CHUNK_SIZE)
}

fn chunk_count(n: u64) -> u64 {
    n.div_ceil(CHUNK_SIZE)
}

/// Draws `n` values with `draw`, chunk by chunk, and concatenates them in chunk order.
pub fn sample_values<E, F>(src: &RandomSource, n: u64, exec: &E, draw: F) -> Vec<f64>
where
    E: ChunkExecutor,
    F: Fn(&mut RandomSource) -> f64 + Sync + Send,
{
    let parts = exec.map_chunks(0..chunk_count(n), |k| {
        let mut rng = src.substream(k);
        (0..chunk_len(n, k)).map(|_| draw(&mut rng)).collect::<Vec<f64>>()
    });
    parts.into_iter().flatten().collect()
}

/// Proportion of `n` independent segment pairs that cross.
pub fn estimate_intersection_probability<E: ChunkExecutor>(src: &RandomSource, n: u64, exec: &E) -> Result<McEstimate> {
    if n == 0 {
        return Err(Error::InvalidArgument("need at least one segment pair".into()));
    }
    let hits: u64 = exec
        .map_chunks(0..chunk_count(n), |k| {
            let mut rng = src.substream(k);
            (0..chunk_len(n, k))
                .filter(|_| {
                    let s1 = sample_segment(&mut rng);
                    let s2 = sample_segment(&mut rng);
                    segments_intersect(&s1, &s2)
                })
                .count() as u64
        })
        .into_iter()
        .sum();
    McEstimate::proportion(hits, n)
}

/// Output of the rejection sampler.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalAngles {
    pub angles: Vec<f64>,
    /// Pairs drawn, including those discarded after the last needed acceptance.
    pub attempts: u64,
}

impl ConditionalAngles {
    pub fn acceptance(&self) -> Result<McEstimate> {
        McEstimate::proportion(self.angles.len() as u64, self.attempts)
    }
}

/// Chunks evaluated per round of the rejection sampler. Fixed so that the set of
/// drawn pairs never depends on the executor.
const CHUNKS_PER_ROUND: u64 = 16;

/// Angle between crossing segment pairs, by rejection, until `n_accepted` are kept.
///
/// At most `10 * n_accepted` pairs are drawn.
pub fn sample_conditional_angles<E: ChunkExecutor>(
    src: &RandomSource,
    n_accepted: u64,
    exec: &E,
) -> Result<ConditionalAngles> {
    if n_accepted == 0 {
        return Err(Error::InvalidArgument("need at least one accepted angle".into()));
    }
    let cap = n_accepted.saturating_mul(10);
    let total_chunks = chunk_count(cap);
    let mut angles = Vec::with_capacity(n_accepted as usize);
    let mut attempts = 0u64;
    let mut next = 0u64;
    while next < total_chunks {
        let end = (next + CHUNKS_PER_ROUND).min(total_chunks);
        let parts = exec.map_chunks(next..end, |k| {
            let mut rng = src.substream(k);
            let len = chunk_len(cap, k);
            let mut kept = Vec::new();
            for _ in 0..len {
                let s1 = sample_segment(&mut rng);
                let s2 = sample_segment(&mut rng);
                if segments_intersect(&s1, &s2) {
                    let cf1 = chord_frame_from_endpoints(&s1);
                    let cf2 = chord_frame_from_endpoints(&s2);
                    kept.push(angle_between(&cf1, &cf2));
                }
            }
            (len, kept)
        });
        for (len, kept) in parts {
            attempts += len;
            angles.extend(kept);
            if angles.len() as u64 >= n_accepted {
                angles.truncate(n_accepted as usize);
                return Ok(ConditionalAngles { angles, attempts });
            }
        }
        next = end;
    }
    Err(Error::IterationCap { attempts, accepted: angles.len() as u64 })
}

/// Angle between independent segment pairs without conditioning on a crossing.
pub fn sample_unconditioned_angles<E: ChunkExecutor>(src: &RandomSource, n: u64, exec: &E) -> Vec<f64> {
    sample_values(src, n, exec, |rng| {
        let cf1 = chord_frame_from_endpoints(&sample_segment(rng));
        let cf2 = chord_frame_from_endpoints(&sample_segment(rng));
        angle_between(&cf1, &cf2)
    })
}

/// Equal-width histogram on `[lo, hi]`; bins are right-open except the last.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Histogram {
    pub lo: f64,
    pub hi: f64,
    pub bin_count: usize,
    pub counts: Vec<u64>,
    pub total: u64,
}

impl Histogram {
    pub fn empty(lo: f64, hi: f64, bins: usize) -> Result<Self> {
        if bins == 0 || !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::InvalidArgument(alloc::format!(
                "histogram needs bins >= 1 and finite lo < hi, got {bins} bins on [{lo}, {hi}]"
            )));
        }
        Ok(Self { lo, hi, bin_count: bins, counts: alloc::vec![0; bins], total: 0 })
    }

    pub fn width(&self) -> f64 {
        (self.hi - self.lo) / self.bin_count as f64
    }

    pub fn edges(&self, bin: usize) -> (f64, f64) {
        let w = self.width();
        let lo = self.lo + w * bin as f64;
        let hi = if bin + 1 == self.bin_count { self.hi } else { self.lo + w * (bin + 1) as f64 };
        (lo, hi)
    }

    pub fn add(&mut self, value: f64) -> Result<()> {
        if !(value >= self.lo && value <= self.hi) {
            return Err(Error::Domain(alloc::format!(
                "value {value} outside histogram range [{}, {}]",
                self.lo,
                self.hi
            )));
        }
        let idx = (((value - self.lo) / self.width()) as usize).min(self.bin_count - 1);
        self.counts[idx] += 1;
        self.total += 1;
        Ok(())
    }

    /// Empirical probability mass of each bin.
    pub fn masses(&self) -> Vec<f64> {
        let n = self.total.max(1) as f64;
        self.counts.iter().map(|&c| c as f64 / n).collect()
    }

    /// `count / (total * width)`.
    pub fn heights(&self) -> Vec<f64> {
        let w = self.width();
        self.masses().into_iter().map(|m| m / w).collect()
    }
}

pub fn histogram(values: &[f64], lo: f64, hi: f64, bins: usize) -> Result<Histogram> {
    let mut h = Histogram::empty(lo, hi, bins)?;
    for &v in values {
        h.add(v)?;
    }
    Ok(h)
}

/// Angle samples live in `[0, pi]`.
pub const ANGLE_RANGE: (f64, f64) = (0.0, PI);

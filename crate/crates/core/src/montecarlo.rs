//! Seeded Monte-Carlo estimators for the closed forms.
//!
//! Draws are split into fixed-size chunks; chunk `j` uses stream `j` of a
//! ChaCha8 generator seeded from the run seed. Chunk moments are merged in
//! chunk order, so any scheduler that evaluates chunks independently and
//! hands them back in order reproduces the serial result bit for bit.

use alloc::vec::Vec;
use core::f64::consts::LN_2;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::beam::RxBeam;
use crate::gml::{conditional_gml, HoverStats};
use crate::skr::ChannelBudget;
use crate::{Error, Result};

/// Draws per chunk.
pub const CHUNK_SIZE: u64 = 1 << 16;
/// Smallest accepted sample count.
pub const MIN_SAMPLES: u64 = 1000;

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McResult {
    pub mean: f64,
    pub stderr: f64,
    pub n: u64,
    pub seed: u64,
}

/// Running count, mean and sum of squared deviations.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Moments {
    pub n: u64,
    pub mean: f64,
    pub m2: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    /// Pairwise combination of two disjoint sample sets.
    pub fn merge(self, other: Moments) -> Moments {
        if other.n == 0 {
            return self;
        }
        if self.n == 0 {
            return other;
        }
        let n = self.n + other.n;
        let delta = other.mean - self.mean;
        let (na, nb, nf) = (self.n as f64, other.n as f64, n as f64);
        Moments { n, mean: self.mean + delta * (nb / nf), m2: self.m2 + other.m2 + delta * delta * (na * nb / nf) }
    }
}

/// One scalar observation per draw.
pub trait Sampler {
    fn draw(&self, rng: &mut ChaCha8Rng) -> f64;
}

/// Conditional GML at Gaussian hovering offsets.
#[derive(Debug, Clone, Copy)]
pub struct GmlSampler {
    pub rx: RxBeam,
    pub hover: HoverStats,
    pub aperture_radius: f64,
}

impl Sampler for GmlSampler {
    fn draw(&self, rng: &mut ChaCha8Rng) -> f64 {
        let zx: f64 = rng.sample(StandardNormal);
        let zy: f64 = rng.sample(StandardNormal);
        let h = &self.hover;
        conditional_gml(h.mu_x + h.sigma_x * zx, h.mu_y + h.sigma_y * zy, &self.rx, self.aperture_radius)
    }
}

/// Mean-one log-normal intensity `I = exp(−σ²/2 + σZ)`.
#[derive(Debug, Clone, Copy)]
pub struct IntensitySampler {
    pub sigma_sq: f64,
}

impl IntensitySampler {
    #[inline]
    fn intensity(&self, rng: &mut ChaCha8Rng) -> f64 {
        let z: f64 = rng.sample(StandardNormal);
        libm::exp(-0.5 * self.sigma_sq + libm::sqrt(self.sigma_sq) * z)
    }
}

impl Sampler for IntensitySampler {
    fn draw(&self, rng: &mut ChaCha8Rng) -> f64 {
        self.intensity(rng)
    }
}

/// PLOB bound `−log2(1 − cI)` at log-normal intensities, zero once `cI ≥ 1`.
#[derive(Debug, Clone, Copy)]
pub struct PlobSampler {
    pub c: f64,
    pub intensity: IntensitySampler,
}

impl PlobSampler {
    pub fn new(budget: &ChannelBudget) -> Self {
        Self { c: budget.mean_transmittance(), intensity: IntensitySampler { sigma_sq: budget.sigma_r_sq } }
    }
}

impl Sampler for PlobSampler {
    fn draw(&self, rng: &mut ChaCha8Rng) -> f64 {
        let t = self.c * self.intensity.intensity(rng);
        if t >= 1.0 {
            0.0
        } else {
            -libm::log1p(-t) / LN_2
        }
    }
}

/// Number of chunks covering `n` draws.
pub fn chunk_count(n: u64) -> u64 {
    n.div_ceil(CHUNK_SIZE)
}

/// Moments of chunk `chunk` of an `n`-draw run.
pub fn run_chunk<S: Sampler + ?Sized>(sampler: &S, n: u64, seed: u64, chunk: u64) -> Moments {
    let start = chunk * CHUNK_SIZE;
    let len = CHUNK_SIZE.min(n.saturating_sub(start));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    let mut m = Moments::default();
    for _ in 0..len {
        m.push(sampler.draw(&mut rng));
    }
    m
}

pub fn check_samples(n: u64) -> Result<()> {
    if n < MIN_SAMPLES {
        return Err(Error::InvalidArgument("Monte-Carlo runs need at least 1000 samples"));
    }
    Ok(())
}

/// Merges chunk moments, which must be in chunk order.
pub fn combine(chunks: &[Moments], seed: u64) -> McResult {
    let m = chunks.iter().fold(Moments::default(), |acc, c| acc.merge(*c));
    let n = m.n.max(1);
    let var = if m.n > 1 { m.m2 / (m.n - 1) as f64 } else { 0.0 };
    McResult { mean: m.mean, stderr: libm::sqrt(var / n as f64), n: m.n, seed }
}

/// Serial run over all chunks.
pub fn run<S: Sampler + ?Sized>(sampler: &S, n: u64, seed: u64) -> Result<McResult> {
    check_samples(n)?;
    let chunks: Vec<Moments> = (0..chunk_count(n)).map(|j| run_chunk(sampler, n, seed, j)).collect();
    Ok(combine(&chunks, seed))
}

pub fn mc_average_gml(rx: &RxBeam, hover: &HoverStats, a: f64, n: u64, seed: u64) -> Result<McResult> {
    run(&GmlSampler { rx: *rx, hover: *hover, aperture_radius: a }, n, seed)
}

pub fn mc_plob(budget: &ChannelBudget, n: u64, seed: u64) -> Result<McResult> {
    budget.validate()?;
    run(&PlobSampler::new(budget), n, seed)
}

/// Mean of raw log-normal intensity draws.
pub fn mc_intensity_mean(sigma_sq: f64, n: u64, seed: u64) -> Result<McResult> {
    run(&IntensitySampler { sigma_sq }, n, seed)
}

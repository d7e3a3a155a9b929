//! Rayleigh-fading channel generation.
//!
//! Every trial gets its own ChaCha stream keyed by a counter mix of
//! (seed, trial_index, substream), so any partitioning of trials across
//! workers reproduces the same matrices bit for bit.

use core::f64::consts::TAU;

use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::matrix::CMatrix;
use crate::model::SystemConfig;
use crate::{Error, Result};

/// One channel draw: K x M matrix H with row k = h_k^T, entries CN(0,1).
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelMatrix {
    matrix: CMatrix,
}

impl ChannelMatrix {
    /// Wraps an explicit matrix (row k = h_k^T). Mostly for tests and tools.
    pub fn from_matrix(matrix: CMatrix) -> Self {
        Self { matrix }
    }

    pub fn k_users(&self) -> usize {
        self.matrix.rows()
    }

    pub fn m_antennas(&self) -> usize {
        self.matrix.cols()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e3779b97f4a7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Derives a 32-byte ChaCha key from (seed, trial, substream).
fn trial_key(seed: u64, trial: u64, substream: u64) -> [u8; 32] {
    let mut state = seed ^ 0x6d696d6f2d636f72; // domain tag
    let mut key = [0u8; 32];
    // fold the counters in before squeezing
    state = splitmix64(&mut state) ^ trial.wrapping_mul(0xd1b54a32d192ed03);
    state = splitmix64(&mut state) ^ substream.wrapping_mul(0x8cb92ba72f3d8dd7);
    for chunk in key.chunks_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    key
}

fn uniform_open01(rng: &mut ChaCha8Rng) -> f64 {
    // 53 random bits in (0, 1]: never 0, so ln() below is finite
    ((rng.next_u64() >> 11) as f64 + 1.0) * (1.0 / 9007199254740992.0)
}

/// One CN(0,1) sample via polar Box-Muller: magnitude-squared ~ Exp(1),
/// each component variance 1/2.
fn complex_gaussian(rng: &mut ChaCha8Rng) -> Complex64 {
    let radius = libm::sqrt(-libm::log(uniform_open01(rng)));
    let angle = TAU * uniform_open01(rng);
    Complex64::new(radius * libm::cos(angle), radius * libm::sin(angle))
}

/// Generates the channel for one trial. Pure in (cfg.seed, trial_index):
/// the same arguments always yield the same matrix.
pub fn generate_channel(cfg: &SystemConfig, trial_index: u64) -> ChannelMatrix {
    generate_channel_substream(cfg, trial_index, 0)
}

/// As [`generate_channel`] but on an explicit substream; redraws after a
/// singular Gram matrix use substream = retry + 1 so rejection stays
/// deterministic.
pub fn generate_channel_substream(
    cfg: &SystemConfig,
    trial_index: u64,
    substream: u64,
) -> ChannelMatrix {
    let k = cfg.num_users;
    let m = cfg.m_antennas();
    let mut rng = ChaCha8Rng::from_seed(trial_key(cfg.seed, trial_index, substream));
    let mut h = CMatrix::zeros(k, m);
    for r in 0..k {
        for c in 0..m {
            h[(r, c)] = complex_gaussian(&mut rng);
        }
    }
    ChannelMatrix { matrix: h }
}

/// Empirical second and fourth absolute moments of the channel entries over
/// `trials` draws. For CN(0,1) the analytic values are 1 and 2.
pub fn channel_moments(cfg: &SystemConfig, trials: usize) -> Result<(f64, f64)> {
    if trials < 2 {
        return Err(Error::TrialsTooFew);
    }
    let mut sum2 = 0.0;
    let mut sum4 = 0.0;
    let mut count = 0usize;
    for t in 0..trials {
        let h = generate_channel(cfg, t as u64);
        for z in h.matrix().data() {
            let a2 = z.norm_sqr();
            sum2 += a2;
            sum4 += a2 * a2;
            count += 1;
        }
    }
    Ok((sum2 / count as f64, sum4 / count as f64))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(k: usize, m: usize, trials: usize, seed: u64) -> SystemConfig {
        SystemConfig {
            num_rus: 1,
            antennas_per_ru: m,
            num_users: k,
            snr_db: 0.0,
            trials,
            seed,
        }
    }

    #[test]
    fn same_seed_and_trial_is_bit_identical() {
        let c = cfg(4, 8, 10, 7);
        assert_eq!(generate_channel(&c, 3), generate_channel(&c, 3));
    }

    #[test]
    fn trials_and_substreams_are_separated() {
        let c = cfg(4, 8, 10, 7);
        assert_ne!(generate_channel(&c, 0), generate_channel(&c, 1));
        assert_ne!(
            generate_channel_substream(&c, 0, 0),
            generate_channel_substream(&c, 0, 1)
        );
    }

    #[test]
    fn seeds_are_separated() {
        assert_ne!(
            generate_channel(&cfg(4, 8, 10, 7), 0),
            generate_channel(&cfg(4, 8, 10, 8), 0)
        );
    }

    #[test]
    fn entries_are_finite() {
        let h = generate_channel(&cfg(8, 24, 10, 42), 0);
        assert!(h.matrix().is_finite());
    }

    #[test]
    fn unit_variance_and_fourth_moment() {
        // >= 1e5 entries
        let c = cfg(10, 10, 1000, 123);
        let (m2, m4) = channel_moments(&c, 1000).unwrap();
        assert!((m2 - 1.0).abs() < 0.02, "E|h|^2 = {m2}");
        assert!((m4 - 2.0).abs() < 0.05, "E|h|^4 = {m4}");
    }

    #[test]
    fn entry_mean_is_near_zero() {
        let c = cfg(10, 10, 1000, 9);
        let mut sum = Complex64::ZERO;
        let mut n = 0usize;
        for t in 0..1000u64 {
            for z in generate_channel(&c, t).matrix().data() {
                sum += z;
                n += 1;
            }
        }
        assert!((sum / n as f64).norm() < 0.02);
    }

    #[test]
    fn row_norms_match_antenna_count() {
        for m in [8usize, 24] {
            let c = cfg(4, m, 200, 5);
            let mut acc = 0.0;
            let mut rows = 0usize;
            for t in 0..2000u64 {
                let h = generate_channel(&c, t);
                for k in 0..h.k_users() {
                    acc += (0..h.m_antennas()).map(|j| h.matrix()[(k, j)].norm_sqr()).sum::<f64>();
                    rows += 1;
                }
            }
            let mean = acc / rows as f64;
            assert!((mean - m as f64).abs() / (m as f64) < 0.02, "M={m}: mean row norm {mean}");
        }
    }

    #[test]
    fn too_few_trials_for_moments() {
        assert_eq!(channel_moments(&cfg(2, 2, 10, 0), 1), Err(Error::TrialsTooFew));
    }
}

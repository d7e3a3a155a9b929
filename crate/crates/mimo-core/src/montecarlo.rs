//! Deterministic Monte Carlo estimation of ergodic quantities.
//!
//! Every trial is a pure function of (seed, trial index), and summaries
//! reduce the per-trial records in index order, so estimates are bitwise
//! identical no matter how the trials were scheduled. Parallel drivers call
//! [`run_trial`] per index and hand the ordered records to [`summarize`].

use alloc::vec::Vec;
use libm::sqrt;

use crate::channel::{generate_channel_substream, ChannelMatrix};
use crate::link::{compute_sinr, rates_from_sinr};
use crate::model::{Filter, PrecoderScheme, SystemConfig};
use crate::precoding::{build_precoder, zf_precoder, SINGULARITY_LIMIT};
use crate::{Error, Result};

/// Rejected singular draws are retried on substreams 1..=MAX_REDRAWS.
pub const MAX_REDRAWS: u64 = 16;

/// Sample mean with a normal-approximation confidence interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub trials: usize,
    pub ci95_halfwidth: f64,
}

impl MonteCarloEstimate {
    /// Summarizes samples in the given order; the reduction is a plain
    /// left-to-right sum so the result is reproducible.
    pub fn from_samples(samples: &[f64]) -> Result<Self> {
        let n = samples.len();
        if n < 2 {
            return Err(Error::TrialsTooFew);
        }
        let mean = samples.iter().sum::<f64>() / n as f64;
        let ss = samples.iter().map(|&x| (x - mean) * (x - mean)).sum::<f64>();
        let std_error = sqrt(ss / (n as f64 - 1.0)) / sqrt(n as f64);
        Ok(Self { mean, std_error, trials: n, ci95_halfwidth: 1.96 * std_error })
    }
}

/// Rates from a single channel draw, plus how many singular draws were
/// rejected before this one.
#[derive(Debug, Clone)]
pub struct TrialRecord {
    pub per_user_rates: Vec<f64>,
    pub sum_rate: f64,
    pub redraws: u64,
}

/// Estimates for one (config, scheme) point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErgodicEstimate {
    /// Average rate per user, pooled over users and trials.
    pub per_user: MonteCarloEstimate,
    /// Sum rate, one sample per trial.
    pub sum: MonteCarloEstimate,
    /// Total singular-channel rejections across all trials.
    pub redraws: u64,
}

/// Runs one trial: draw the channel, build the precoder, evaluate rates.
/// Singular ZF draws are redrawn on substreams 1, 2, ... so the outcome
/// stays a pure function of (cfg, scheme, trial).
pub fn run_trial(cfg: &SystemConfig, scheme: PrecoderScheme, trial: u64) -> Result<TrialRecord> {
    if scheme.filter == Filter::Zf && cfg.num_users > cfg.m_antennas() {
        return Err(Error::DimensionError);
    }
    let power = cfg.power();
    let mut redraws = 0u64;
    loop {
        let h = generate_channel_substream(cfg, trial, redraws);
        match build_precoder(&h, scheme) {
            Ok(g) => {
                let rates = rates_from_sinr(&compute_sinr(&h, &g, power)?);
                return Ok(TrialRecord {
                    per_user_rates: rates.per_user_rates,
                    sum_rate: rates.sum_rate,
                    redraws,
                });
            }
            Err(Error::SingularChannel) if redraws < MAX_REDRAWS => redraws += 1,
            Err(e) => return Err(e),
        }
    }
}

/// Reduces trial records (in trial-index order) to the two estimates.
pub fn summarize(records: &[TrialRecord]) -> Result<ErgodicEstimate> {
    let mut user_samples = Vec::new();
    let mut sum_samples = Vec::with_capacity(records.len());
    let mut redraws = 0u64;
    for r in records {
        user_samples.extend_from_slice(&r.per_user_rates);
        sum_samples.push(r.sum_rate);
        redraws += r.redraws;
    }
    Ok(ErgodicEstimate {
        per_user: MonteCarloEstimate::from_samples(&user_samples)?,
        sum: MonteCarloEstimate::from_samples(&sum_samples)?,
        redraws,
    })
}

/// Sequential reference estimator; parallel drivers must agree with it
/// bit for bit.
pub fn estimate_ergodic_rates(
    cfg: &SystemConfig,
    scheme: PrecoderScheme,
) -> Result<ErgodicEstimate> {
    let mut records = Vec::with_capacity(cfg.trials);
    for t in 0..cfg.trials as u64 {
        records.push(run_trial(cfg, scheme, t)?);
    }
    summarize(&records)
}

fn wishart_cfg(m: usize, k: usize, trials: usize, seed: u64) -> SystemConfig {
    SystemConfig {
        num_rus: 1,
        antennas_per_ru: m,
        num_users: k,
        snr_db: 0.0,
        trials,
        seed,
    }
}

/// MC mean of tr((HH*)^{-1}); the analytic value is K/(M-K).
pub fn estimate_wishart_trace(
    m: usize,
    k: usize,
    trials: usize,
    seed: u64,
) -> Result<MonteCarloEstimate> {
    if k == 0 || k >= m {
        return Err(Error::DomainError);
    }
    if trials < 2 {
        return Err(Error::TrialsTooFew);
    }
    let cfg = wishart_cfg(m, k, trials, seed);
    let mut samples = Vec::with_capacity(trials);
    for t in 0..trials as u64 {
        let h = draw_invertible(&cfg, t);
        let hm = h.matrix();
        let chol = hm.mul(&hm.hermitian()).cholesky(SINGULARITY_LIMIT).unwrap();
        samples.push(chol.inverse_trace());
    }
    MonteCarloEstimate::from_samples(&samples)
}

/// MC mean of ||f_k||^2 over ZF precoder columns; discriminates the
/// 1/(M-K+1) constant used by the ZF-vector bound from the Wishart diagonal
/// mean 1/(M-K).
pub fn estimate_zf_column_norm(
    m: usize,
    k: usize,
    trials: usize,
    seed: u64,
) -> Result<MonteCarloEstimate> {
    if k == 0 || k >= m {
        return Err(Error::DomainError);
    }
    if trials < 2 {
        return Err(Error::TrialsTooFew);
    }
    let cfg = wishart_cfg(m, k, trials, seed);
    let mut samples = Vec::with_capacity(trials * k);
    for t in 0..trials as u64 {
        let h = draw_invertible(&cfg, t);
        let f = zf_precoder(&h).unwrap();
        for c in 0..k {
            samples.push(f.columns().col_norm_sq(c));
        }
    }
    MonteCarloEstimate::from_samples(&samples)
}

fn draw_invertible(cfg: &SystemConfig, trial: u64) -> ChannelMatrix {
    let mut substream = 0;
    loop {
        let h = generate_channel_substream(cfg, trial, substream);
        let hm = h.matrix();
        if hm.mul(&hm.hermitian()).cholesky(SINGULARITY_LIMIT).is_ok() {
            return h;
        }
        substream += 1;
        assert!(substream <= MAX_REDRAWS, "persistent singular channel");
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn cfg(k: usize, m: usize, snr_db: f64, trials: usize, seed: u64) -> SystemConfig {
        SystemConfig {
            num_rus: 1,
            antennas_per_ru: m,
            num_users: k,
            snr_db,
            trials,
            seed,
        }
    }

    #[test]
    fn estimate_from_known_samples() {
        let e = MonteCarloEstimate::from_samples(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert!((e.mean - 2.5).abs() < 1e-15);
        // sample std = sqrt(5/3), std error = sqrt(5/3)/2
        let expect = sqrt(5.0 / 3.0) / 2.0;
        assert!((e.std_error - expect).abs() < 1e-15);
        assert!((e.ci95_halfwidth - 1.96 * expect).abs() < 1e-15);
        assert_eq!(e.trials, 4);
    }

    #[test]
    fn single_sample_rejected() {
        assert_eq!(MonteCarloEstimate::from_samples(&[1.0]).err(), Some(Error::TrialsTooFew));
    }

    #[test]
    fn zf_with_too_many_users_rejected() {
        let c = cfg(9, 8, 0.0, 10, 0);
        assert_eq!(
            run_trial(&c, PrecoderScheme::ZF_VECTOR, 0).err(),
            Some(Error::DimensionError)
        );
        // MF has no user limit
        assert!(run_trial(&c, PrecoderScheme::MF_MATRIX, 0).is_ok());
    }

    #[test]
    fn sequential_and_chunked_reductions_agree() {
        let c = cfg(4, 8, 0.0, 64, 21);
        let reference = estimate_ergodic_rates(&c, PrecoderScheme::MF_MATRIX).unwrap();
        // simulate a 4-worker partition: compute out of order, reduce in order
        let mut records: Vec<Option<TrialRecord>> = vec![None; 64];
        for worker in (0..4usize).rev() {
            for t in (worker..64).step_by(4) {
                records[t] = Some(run_trial(&c, PrecoderScheme::MF_MATRIX, t as u64).unwrap());
            }
        }
        let records: Vec<TrialRecord> = records.into_iter().map(|r| r.unwrap()).collect();
        let chunked = summarize(&records).unwrap();
        assert_eq!(reference.per_user.mean.to_bits(), chunked.per_user.mean.to_bits());
        assert_eq!(reference.sum.mean.to_bits(), chunked.sum.mean.to_bits());
        assert_eq!(reference.sum.std_error.to_bits(), chunked.sum.std_error.to_bits());
    }

    #[test]
    fn wishart_trace_matches_analytic_mean() {
        let e = estimate_wishart_trace(24, 12, 2000, 7).unwrap();
        assert!((e.mean - 1.0).abs() < 0.03, "{}", e.mean);
        let e = estimate_wishart_trace(2, 1, 5000, 7).unwrap();
        assert!((e.mean - 1.0).abs() < 0.05, "{}", e.mean);
        assert_eq!(estimate_wishart_trace(8, 8, 100, 0).err(), Some(Error::DomainError));
    }

    #[test]
    fn zf_column_norm_discriminates_the_two_constants() {
        // The ZF-vector bound uses 1/(M-K+1) for E||f_k||^2 while the
        // Wishart diagonal mean is 1/(M-K); since ||f_k||^2 is exactly the
        // k-th diagonal of (HH*)^{-1}, the empirical mean sides with
        // 1/(M-K). The estimator exists to make that call measurable.
        for (m, k) in [(24usize, 12usize), (4, 2)] {
            let e = estimate_zf_column_norm(m, k, 4000, 3).unwrap();
            let candidate_bound = 1.0 / (m - k + 1) as f64;
            let candidate_diag = 1.0 / (m - k) as f64;
            let d_bound = (e.mean - candidate_bound).abs();
            let d_diag = (e.mean - candidate_diag).abs();
            assert!(
                d_diag < d_bound,
                "M={m} K={k}: mean {} bound-const {} diag-const {}",
                e.mean,
                candidate_bound,
                candidate_diag
            );
            assert!(d_diag / candidate_diag < 0.05, "M={m} K={k}: mean {}", e.mean);
        }
        assert_eq!(estimate_zf_column_norm(8, 9, 100, 0).err(), Some(Error::DomainError));
    }

    #[test]
    fn sum_estimate_matches_k_times_per_user_loosely() {
        let c = cfg(4, 8, 0.0, 500, 13);
        let e = estimate_ergodic_rates(&c, PrecoderScheme::ZF_VECTOR).unwrap();
        assert!((e.sum.mean - 4.0 * e.per_user.mean).abs() < 1e-9);
        assert_eq!(e.redraws, 0);
    }

    #[test]
    fn ci_shrinks_with_trials() {
        let base = estimate_ergodic_rates(&cfg(4, 8, 0.0, 500, 99), PrecoderScheme::MF_VECTOR)
            .unwrap();
        let quad = estimate_ergodic_rates(&cfg(4, 8, 0.0, 2000, 99), PrecoderScheme::MF_VECTOR)
            .unwrap();
        let ratio = base.sum.std_error / quad.sum.std_error;
        assert!((ratio - 2.0).abs() < 0.4, "ratio {ratio}");
    }
}

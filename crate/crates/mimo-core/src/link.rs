//! Per-user SINR and instantaneous rates for one channel draw.
//!
//! Noise power is 1 and symbols carry unit power, so for user k
//! signal = P |h_k^T g_k|^2, interference = P sum_{l != k} |h_k^T g_l|^2 and
//! sinr = signal / (interference + 1). No symbol or noise realizations are
//! drawn.

use alloc::vec::Vec;

use crate::channel::ChannelMatrix;
use crate::precoding::PrecodingMatrix;
use crate::{Error, Result};

/// Signal/interference decomposition for every user, linear scale.
#[derive(Debug, Clone)]
pub struct SinrReport {
    pub sinr: Vec<f64>,
    pub signal_power: Vec<f64>,
    pub interference_power: Vec<f64>,
}

/// Instantaneous rates log2(1 + sinr_k) in bits/s/Hz.
#[derive(Debug, Clone)]
pub struct RateSample {
    pub per_user_rates: Vec<f64>,
    pub sum_rate: f64,
}

pub fn compute_sinr(h: &ChannelMatrix, g: &PrecodingMatrix, power: f64) -> Result<SinrReport> {
    let k = h.k_users();
    if g.columns().rows() != h.m_antennas() || g.columns().cols() != k {
        return Err(Error::DimensionError);
    }
    // (HG)_{kl} = h_k^T g_l
    let cross = h.matrix().mul(g.columns());
    let mut sinr = Vec::with_capacity(k);
    let mut signal = Vec::with_capacity(k);
    let mut interference = Vec::with_capacity(k);
    for u in 0..k {
        let s = power * cross[(u, u)].norm_sqr();
        let mut i = 0.0;
        for l in 0..k {
            if l != u {
                i += cross[(u, l)].norm_sqr();
            }
        }
        let i = power * i;
        signal.push(s);
        interference.push(i);
        sinr.push(s / (i + 1.0));
    }
    Ok(SinrReport { sinr, signal_power: signal, interference_power: interference })
}

pub fn rates_from_sinr(report: &SinrReport) -> RateSample {
    let per_user_rates: Vec<f64> =
        report.sinr.iter().map(|&s| libm::log2(1.0 + s)).collect();
    let sum_rate = per_user_rates.iter().sum();
    RateSample { per_user_rates, sum_rate }
}

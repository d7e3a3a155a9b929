//! Closed-form ergodic rate bounds for the four precoding schemes, the
//! ZF/MF crossing point, and the precoder-selection rule.
//!
//! Per-user bounds in bits/s/Hz, with M antennas, K users and total
//! transmit power P (noise power 1):
//!
//! * ZF + vector normalization, lower:  log2(1 + P(M-K+1)/K)
//! * ZF + matrix normalization, upper:  log2(1 + P(M-K)/K)
//! * MF + matrix normalization, lower:  log2(1 + P(M+1)/(P(K-1)+K))
//! * MF + vector normalization, upper:  same expression as the MF lower
//!
//! The ZF-vector and MF-matrix lower-bound curves intersect twice in K; the
//! larger root is the user count at which the recommended precoder switches
//! from ZF to MF. K is treated as a continuous variable throughout this
//! module.

use libm::{fabs, log2, sqrt};

use crate::model::PrecoderScheme;
use crate::{Error, Result};

/// The four per-user bound values at one (M, K, P) operating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateBoundSet {
    pub zf_vec_lower: f64,
    pub zf_mat_upper: f64,
    pub mf_mat_lower: f64,
    pub mf_vec_upper: f64,
    pub m_antennas: usize,
    pub k_users: usize,
    pub power: f64,
}

/// Crossing point of the ZF-vector and MF-matrix lower-bound curves.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossPoint {
    /// Large-M approximation P(M+1)/(1+P).
    pub k_approx: f64,
    /// Larger exact root, when real and in (1, M].
    pub k_exact: Option<f64>,
    /// Smaller exact root (slightly above K = 1), when real and in (0, M].
    pub k_lower_root: Option<f64>,
    pub exists: bool,
}

/// Closed-form vs. finite-difference gradient difference at the crossing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradientReport {
    pub paper_value: f64,
    pub numeric_value: f64,
    pub evaluated_at: f64,
}

/// Lower bound for ZF with vector normalization. Valid for 0 < K <= M.
pub fn zf_vector_lower(m: f64, k: f64, p: f64) -> Result<f64> {
    if !(k > 0.0) || k > m || !(p > 0.0) {
        return Err(Error::DomainError);
    }
    Ok(log2(1.0 + p * (m - k + 1.0) / k))
}

/// Upper bound for ZF with matrix normalization. Valid for 0 < K < M
/// (the Wishart mean K/(M-K) is undefined at K = M).
pub fn zf_matrix_upper(m: f64, k: f64, p: f64) -> Result<f64> {
    if !(k > 0.0) || k >= m || !(p > 0.0) {
        return Err(Error::DomainError);
    }
    Ok(log2(1.0 + p * (m - k) / k))
}

fn mf_bound(m: f64, k: f64, p: f64) -> Result<f64> {
    if !(k > 0.0) || !(m >= 1.0) || !(p > 0.0) {
        return Err(Error::DomainError);
    }
    Ok(log2(1.0 + p * (m + 1.0) / (p * (k - 1.0) + k)))
}

/// Lower bound for MF with matrix normalization.
pub fn mf_matrix_lower(m: f64, k: f64, p: f64) -> Result<f64> {
    mf_bound(m, k, p)
}

/// Upper bound for MF with vector normalization. Same expression as
/// [`mf_matrix_lower`]; the two must agree bit for bit.
pub fn mf_vector_upper(m: f64, k: f64, p: f64) -> Result<f64> {
    mf_bound(m, k, p)
}

/// All four bounds at integer (M, K).
pub fn rate_bound_set(m: usize, k: usize, p: f64) -> Result<RateBoundSet> {
    let (mf_, kf) = (m as f64, k as f64);
    Ok(RateBoundSet {
        zf_vec_lower: zf_vector_lower(mf_, kf, p)?,
        zf_mat_upper: zf_matrix_upper(mf_, kf, p)?,
        mf_mat_lower: mf_matrix_lower(mf_, kf, p)?,
        mf_vec_upper: mf_vector_upper(mf_, kf, p)?,
        m_antennas: m,
        k_users: k,
        power: p,
    })
}

/// Analytic E[tr((HH*)^{-1})] = K/(M-K) for a K x M complex Gaussian H.
pub fn wishart_inverse_trace_mean(m: usize, k: usize) -> Result<f64> {
    if k == 0 || k >= m {
        return Err(Error::DomainError);
    }
    Ok(k as f64 / (m - k) as f64)
}

/// Large-M crossing-point approximation P(M+1)/(1+P).
pub fn kcross_approx(m: f64, p: f64) -> f64 {
    p * (m + 1.0) / (1.0 + p)
}

/// Difference of the two lower-bound curves, the function whose roots are
/// the crossing points. Defined on 0 < K <= M.
fn bound_diff(m: f64, k: f64, p: f64) -> f64 {
    // both calls are in-domain for 0 < k <= m
    zf_vector_lower(m, k, p).unwrap() - mf_matrix_lower(m, k, p).unwrap()
}

fn bisect(m: f64, p: f64, mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = bound_diff(m, lo, p);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let fmid = bound_diff(m, mid, p);
        if fmid == 0.0 {
            return mid;
        }
        if (flo > 0.0) == (fmid > 0.0) {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-13 * hi.max(1.0) {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Quadratic (1+P)K^2 - P(M+2)K + P(M+1) = 0 equivalent to equating the two
/// lower bounds; used as a cross-check against the bisection result.
fn quadratic_roots(m: f64, p: f64) -> Option<(f64, f64)> {
    let a = 1.0 + p;
    let b = -p * (m + 2.0);
    let c = p * (m + 1.0);
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return None;
    }
    // stable form: avoid cancellation in the smaller root
    let q = -0.5 * (b - sqrt(disc)); // b < 0, so q > 0
    let r1 = c / q;
    let r2 = q / a;
    Some((r1.min(r2), r1.max(r2)))
}

/// Exact crossing points of the ZF-vector and MF-matrix lower bounds,
/// found by bisection on the bound difference with the closed-form
/// quadratic as a cross-check.
pub fn kcross_exact(m: usize, p: f64) -> Result<CrossPoint> {
    if m < 2 || !(p > 0.0) {
        return Err(Error::DomainError);
    }
    let mf_ = m as f64;
    let k_approx = kcross_approx(mf_, p);

    let mut roots: [Option<f64>; 2] = [None, None];
    if let Some((r_lo, r_hi)) = quadratic_roots(mf_, p) {
        for (slot, root) in roots.iter_mut().zip([r_lo, r_hi]) {
            if root <= 0.0 || root > mf_ {
                continue;
            }
            // bracket around the algebraic root and refine by bisection
            let width = 1e-3 * root.max(1.0);
            let lo = (root - width).max(f64::MIN_POSITIVE);
            let hi = (root + width).min(mf_);
            let refined = if bound_diff(mf_, lo, p) * bound_diff(mf_, hi, p) < 0.0 {
                bisect(mf_, p, lo, hi)
            } else {
                // tangency or bracket clipped at the domain edge
                root
            };
            *slot = Some(refined);
        }
    }
    let (k_lower_root, k_exact_candidate) = (roots[0], roots[1]);
    let k_exact = k_exact_candidate.filter(|&r| r > 1.0);
    Ok(CrossPoint { k_approx, k_exact, k_lower_root, exists: k_exact.is_some() })
}

/// Printed closed form for the gradient difference of the two sum-rate
/// lower-bound curves at the crossing point.
pub fn gradient_difference_paper(m: f64, p: f64) -> Result<f64> {
    let disc = (m * p - 2.0) * (m * p - 2.0) - 4.0 * (p + 1.0);
    if disc < 0.0 {
        return Err(Error::DomainError);
    }
    Ok((-disc + (m * p + p - 1.0) * sqrt(disc)) / ((m + 1.0) * (2.0 * m * p + p + 1.0)))
}

/// Central finite difference of the sum-rate curves K*R(K) at the exact
/// crossing point; the independent check on the closed form's sign.
pub fn gradient_difference_numeric(m: usize, p: f64, step: f64) -> Result<GradientReport> {
    if !(step > 0.0) || step >= 0.1 {
        return Err(Error::DomainError);
    }
    let cross = kcross_exact(m, p)?;
    let k0 = cross.k_exact.ok_or(Error::NoCrossPoint)?;
    let mf_ = m as f64;
    let sum_mf = |k: f64| k * mf_matrix_lower(mf_, k, p).unwrap();
    let sum_zf = |k: f64| k * zf_vector_lower(mf_, k, p).unwrap();
    let d_mf = (sum_mf(k0 + step) - sum_mf(k0 - step)) / (2.0 * step);
    let d_zf = (sum_zf(k0 + step) - sum_zf(k0 - step)) / (2.0 * step);
    let paper_value = gradient_difference_paper(mf_, p).unwrap_or(f64::NAN);
    Ok(GradientReport { paper_value, numeric_value: d_mf - d_zf, evaluated_at: k0 })
}

/// Precoder choice per the crossing rule: ZF with vector normalization up to
/// the crossing point, MF with matrix normalization beyond it. Ties go to ZF.
pub fn recommend_precoder(m: usize, k: usize, p: f64) -> PrecoderScheme {
    let threshold = match kcross_exact(m, p) {
        Ok(cross) => cross.k_exact.unwrap_or(cross.k_approx),
        Err(_) => kcross_approx(m as f64, p),
    };
    if (k as f64) <= threshold + 1e-9 {
        PrecoderScheme::ZF_VECTOR
    } else {
        PrecoderScheme::MF_MATRIX
    }
}

#[allow(dead_code)]
fn residual_at(m: f64, k: f64, p: f64) -> f64 {
    fabs(bound_diff(m, k, p))
}

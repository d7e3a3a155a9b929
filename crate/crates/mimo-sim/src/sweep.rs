//! Sweep and analysis drivers behind the CLI subcommands.

use mimo_core::bounds::{
    self, gradient_difference_numeric, gradient_difference_paper, kcross_exact,
    recommend_precoder,
};
use mimo_core::montecarlo::{run_trial, summarize, ErgodicEstimate, TrialRecord};
use mimo_core::{Filter, PrecoderScheme, SystemConfig};
use rayon::prelude::*;
use serde::Serialize;

use crate::{HarnessError, Result};

/// One analytic bound series in the sweep output.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundSeries {
    ZfVecLower,
    ZfMatUpper,
    MfMatLower,
    MfVecUpper,
}

impl BoundSeries {
    pub const ALL: [Self; 4] =
        [Self::ZfVecLower, Self::ZfMatUpper, Self::MfMatLower, Self::MfVecUpper];

    pub fn label(&self) -> &'static str {
        match self {
            Self::ZfVecLower => "bound-zf-vec-lower",
            Self::ZfMatUpper => "bound-zf-mat-upper",
            Self::MfMatLower => "bound-mf-mat-lower",
            Self::MfVecUpper => "bound-mf-vec-upper",
        }
    }

    fn per_user(&self, m: usize, k: usize, p: f64) -> mimo_core::Result<f64> {
        let (mf, kf) = (m as f64, k as f64);
        match self {
            Self::ZfVecLower => bounds::zf_vector_lower(mf, kf, p),
            Self::ZfMatUpper => bounds::zf_matrix_upper(mf, kf, p),
            Self::MfMatLower => bounds::mf_matrix_lower(mf, kf, p),
            Self::MfVecUpper => bounds::mf_vector_upper(mf, kf, p),
        }
    }
}

/// Closed enumeration of sweep series names.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Series {
    MonteCarlo(PrecoderScheme),
    Bound(BoundSeries),
}

impl Series {
    pub fn label(&self) -> &'static str {
        match self {
            Series::MonteCarlo(s) => s.label(),
            Series::Bound(b) => b.label(),
        }
    }
}

/// One CSV row of the sweep output.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub k: usize,
    pub series: Series,
    pub sum_rate: Option<f64>,
    pub per_user_rate: Option<f64>,
    pub ci95_halfwidth: Option<f64>,
    pub trials: usize,
    pub ok: bool,
}

/// Everything `sweep` needs: config template, user range, series selection.
#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub cfg: SystemConfig,
    pub k_min: usize,
    pub k_max: usize,
    pub schemes: Vec<PrecoderScheme>,
    pub include_bounds: bool,
    pub workers: usize,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        let cfg = SystemConfig { num_users: self.k_max.max(1), ..self.cfg };
        cfg.validate().map_err(|e| HarnessError::Validation(e.to_string()))?;
        if self.k_min < 1 || self.k_min > self.k_max {
            return Err(HarnessError::Validation(format!(
                "user range [{}, {}] is empty or starts below 1",
                self.k_min, self.k_max
            )));
        }
        if self.schemes.is_empty() {
            return Err(HarnessError::Validation("no schemes selected".into()));
        }
        let m = self.cfg.m_antennas();
        if self.schemes.iter().any(|s| s.filter == Filter::Zf) && self.k_max > m {
            return Err(HarnessError::Validation(format!(
                "ZF requires K <= M: k_max {} exceeds M = {m}",
                self.k_max
            )));
        }
        if self.workers == 0 {
            return Err(HarnessError::Validation("workers must be >= 1".into()));
        }
        Ok(())
    }
}

/// Run metadata and crossing-point data emitted next to the sweep CSV.
#[derive(Debug, Serialize)]
pub struct SweepSidecar {
    pub m_antennas: usize,
    pub k_min: usize,
    pub k_max: usize,
    pub snr_db: f64,
    pub power: f64,
    pub seed: u64,
    pub trials: usize,
    pub workers: usize,
    pub schemes: Vec<String>,
    pub kcross_approx: f64,
    pub k_exact: Option<f64>,
    pub k_lower_root: Option<f64>,
    pub cross_exists: bool,
    pub kcross_approx_rel_gap: Option<f64>,
    pub total_redraws: u64,
    pub timestamp_unix: u64,
}

/// Estimate for one (K, scheme) point; trials run in parallel inside the
/// current rayon pool, reduced in trial-index order so the result does not
/// depend on the worker count.
pub fn estimate_point(
    cfg: &SystemConfig,
    scheme: PrecoderScheme,
) -> mimo_core::Result<ErgodicEstimate> {
    let records: mimo_core::Result<Vec<TrialRecord>> = (0..cfg.trials as u64)
        .into_par_iter()
        .map(|t| run_trial(cfg, scheme, t))
        .collect();
    summarize(&records?)
}

/// Runs the full sweep. Row order is fixed: K ascending, MC series in the
/// requested scheme order, then bound series.
pub fn run_sweep(spec: &SweepSpec) -> Result<(Vec<SweepRow>, SweepSidecar)> {
    spec.validate()?;
    let m = spec.cfg.m_antennas();
    let p = spec.cfg.power();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(spec.workers)
        .build()
        .map_err(|e| HarnessError::Validation(e.to_string()))?;

    let mut rows = Vec::new();
    let mut total_redraws = 0u64;
    for k in spec.k_min..=spec.k_max {
        let cfg = SystemConfig { num_users: k, ..spec.cfg };
        for &scheme in &spec.schemes {
            match pool.install(|| estimate_point(&cfg, scheme)) {
                Ok(est) => {
                    total_redraws += est.redraws;
                    rows.push(SweepRow {
                        k,
                        series: Series::MonteCarlo(scheme),
                        sum_rate: Some(est.sum.mean),
                        per_user_rate: Some(est.per_user.mean),
                        ci95_halfwidth: Some(est.sum.ci95_halfwidth),
                        trials: cfg.trials,
                        ok: true,
                    });
                }
                Err(_) => rows.push(SweepRow {
                    k,
                    series: Series::MonteCarlo(scheme),
                    sum_rate: None,
                    per_user_rate: None,
                    ci95_halfwidth: None,
                    trials: cfg.trials,
                    ok: false,
                }),
            }
        }
        if spec.include_bounds {
            for b in BoundSeries::ALL {
                match b.per_user(m, k, p) {
                    Ok(per_user) => rows.push(SweepRow {
                        k,
                        series: Series::Bound(b),
                        sum_rate: Some(k as f64 * per_user),
                        per_user_rate: Some(per_user),
                        ci95_halfwidth: Some(0.0),
                        trials: 0,
                        ok: true,
                    }),
                    Err(_) => rows.push(SweepRow {
                        k,
                        series: Series::Bound(b),
                        sum_rate: None,
                        per_user_rate: None,
                        ci95_halfwidth: None,
                        trials: 0,
                        ok: false,
                    }),
                }
            }
        }
    }

    let cross = kcross_exact(m, p).ok();
    let (k_exact, k_lower_root, exists) = match &cross {
        Some(c) => (c.k_exact, c.k_lower_root, c.exists),
        None => (None, None, false),
    };
    let k_approx = bounds::kcross_approx(m as f64, p);
    let sidecar = SweepSidecar {
        m_antennas: m,
        k_min: spec.k_min,
        k_max: spec.k_max,
        snr_db: spec.cfg.snr_db,
        power: p,
        seed: spec.cfg.seed,
        trials: spec.cfg.trials,
        workers: spec.workers,
        schemes: spec.schemes.iter().map(|s| s.label().to_string()).collect(),
        kcross_approx: k_approx,
        k_exact,
        k_lower_root,
        cross_exists: exists,
        kcross_approx_rel_gap: k_exact.map(|k| (k_approx - k).abs() / k),
        total_redraws,
        timestamp_unix: std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
    };
    Ok((rows, sidecar))
}

/// One row of the analytic bounds table.
#[derive(Debug, Clone)]
pub struct BoundsRow {
    pub k: usize,
    pub zf_vec_lower: Option<f64>,
    pub zf_mat_upper: Option<f64>,
    pub mf_mat_lower: Option<f64>,
    pub mf_vec_upper: Option<f64>,
    /// ZF vector-lower minus matrix-upper gap.
    pub gap_zf: Option<f64>,
    /// MF matrix-lower minus vector-upper gap (identically zero).
    pub gap_mf: Option<f64>,
}

impl BoundsRow {
    pub fn ok(&self) -> bool {
        self.zf_vec_lower.is_some()
            && self.zf_mat_upper.is_some()
            && self.mf_mat_lower.is_some()
            && self.mf_vec_upper.is_some()
    }
}

/// Analytic-only per-user bound table over a user range.
pub fn run_bounds_table(m: usize, p: f64, k_min: usize, k_max: usize) -> Result<Vec<BoundsRow>> {
    if m < 1 || !(p > 0.0) || k_min < 1 || k_min > k_max || k_max > m {
        return Err(HarnessError::Validation(format!(
            "need 1 <= k_min <= k_max <= M and P > 0 (got M={m}, K=[{k_min},{k_max}], P={p})"
        )));
    }
    let mut rows = Vec::new();
    for k in k_min..=k_max {
        let (mf, kf) = (m as f64, k as f64);
        let zf_vec = bounds::zf_vector_lower(mf, kf, p).ok();
        let zf_mat = bounds::zf_matrix_upper(mf, kf, p).ok();
        let mf_mat = bounds::mf_matrix_lower(mf, kf, p).ok();
        let mf_vec = bounds::mf_vector_upper(mf, kf, p).ok();
        rows.push(BoundsRow {
            k,
            zf_vec_lower: zf_vec,
            zf_mat_upper: zf_mat,
            mf_mat_lower: mf_mat,
            mf_vec_upper: mf_vec,
            gap_zf: zf_vec.zip(zf_mat).map(|(a, b)| a - b),
            gap_mf: mf_mat.zip(mf_vec).map(|(a, b)| a - b),
        });
    }
    Ok(rows)
}

/// Crossing-point analysis as emitted by the `crosspoint` subcommand.
#[derive(Debug, Serialize)]
pub struct CrosspointReport {
    pub m_antennas: usize,
    pub snr_db: f64,
    pub power: f64,
    pub kcross_approx: f64,
    pub k_exact: Option<f64>,
    pub k_lower_root: Option<f64>,
    pub exists: bool,
    pub gradient_paper: Option<f64>,
    pub gradient_numeric: Option<f64>,
    pub recommendation_below: Option<String>,
    pub recommendation_above: Option<String>,
}

pub fn run_crosspoint(m: usize, snr_db: f64) -> Result<CrosspointReport> {
    let p = libm_pow10(snr_db);
    let cross = kcross_exact(m, p).map_err(|e| HarnessError::Validation(e.to_string()))?;
    let gradient_numeric =
        gradient_difference_numeric(m, p, 1e-4).ok().map(|g| g.numeric_value);
    let (below, above) = match cross.k_exact {
        Some(k) => {
            let lo = (k.floor() as usize).max(1);
            let hi = (k.ceil() as usize).min(m);
            (
                Some(recommend_precoder(m, lo, p).label().to_string()),
                Some(recommend_precoder(m, hi, p).label().to_string()),
            )
        }
        None => (None, None),
    };
    Ok(CrosspointReport {
        m_antennas: m,
        snr_db,
        power: p,
        kcross_approx: cross.k_approx,
        k_exact: cross.k_exact,
        k_lower_root: cross.k_lower_root,
        exists: cross.exists,
        gradient_paper: gradient_difference_paper(m as f64, p).ok(),
        gradient_numeric,
        recommendation_below: below,
        recommendation_above: above,
    })
}

fn libm_pow10(snr_db: f64) -> f64 {
    10f64.powf(snr_db / 10.0)
}

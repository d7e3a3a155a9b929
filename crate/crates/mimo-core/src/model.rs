//! System configuration and shared domain types.
//!
//! Symbol power and noise power are both fixed at 1, so the linear power `P`
//! derived from `snr_db` is the total transmit SNR. Symbols are never drawn:
//! SINR is a function of the channel, the precoder and `P` alone.

use crate::{Error, Result};

/// Linear precoding filter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Filter {
    /// Zero-forcing: F = H*(HH*)^{-1}.
    Zf,
    /// Matched filter: F = H*.
    Mf,
}

/// Power normalization applied to the raw precoder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Normalization {
    /// Each column scaled to squared norm 1/K.
    Vector,
    /// Whole matrix scaled by its Frobenius norm.
    Matrix,
}

/// One of the four filter/normalization combinations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrecoderScheme {
    pub filter: Filter,
    pub normalization: Normalization,
}

impl PrecoderScheme {
    pub const ZF_VECTOR: Self = Self { filter: Filter::Zf, normalization: Normalization::Vector };
    pub const ZF_MATRIX: Self = Self { filter: Filter::Zf, normalization: Normalization::Matrix };
    pub const MF_VECTOR: Self = Self { filter: Filter::Mf, normalization: Normalization::Vector };
    pub const MF_MATRIX: Self = Self { filter: Filter::Mf, normalization: Normalization::Matrix };

    pub const ALL: [Self; 4] =
        [Self::ZF_VECTOR, Self::ZF_MATRIX, Self::MF_VECTOR, Self::MF_MATRIX];

    /// Short identifier used in CSV output and CLI flags.
    pub fn label(&self) -> &'static str {
        match (self.filter, self.normalization) {
            (Filter::Zf, Normalization::Vector) => "zf-vec",
            (Filter::Zf, Normalization::Matrix) => "zf-mat",
            (Filter::Mf, Normalization::Vector) => "mf-vec",
            (Filter::Mf, Normalization::Matrix) => "mf-mat",
        }
    }

    pub fn from_label(label: &str) -> Option<Self> {
        match label {
            "zf-vec" => Some(Self::ZF_VECTOR),
            "zf-mat" => Some(Self::ZF_MATRIX),
            "mf-vec" => Some(Self::MF_VECTOR),
            "mf-mat" => Some(Self::MF_MATRIX),
            _ => None,
        }
    }
}

/// Experiment parameters. Immutable once validated; the derived antenna count
/// `M = num_rus * antennas_per_ru` and linear power `P = 10^(snr_db/10)` are
/// available through accessors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemConfig {
    pub num_rus: usize,
    pub antennas_per_ru: usize,
    pub num_users: usize,
    pub snr_db: f64,
    pub trials: usize,
    pub seed: u64,
}

impl SystemConfig {
    /// Total number of cloud BS antennas.
    pub fn m_antennas(&self) -> usize {
        self.num_rus * self.antennas_per_ru
    }

    /// Total transmit power in linear scale (equals total SNR, noise power 1).
    pub fn power(&self) -> f64 {
        libm::pow(10.0, self.snr_db / 10.0)
    }

    /// Checks all invariants, returning the config unchanged when they hold.
    pub fn validate(self) -> Result<Self> {
        if self.num_rus == 0 {
            return Err(Error::NonPositiveParameter("num_rus"));
        }
        if self.antennas_per_ru == 0 {
            return Err(Error::NonPositiveParameter("antennas_per_ru"));
        }
        if self.num_users == 0 {
            return Err(Error::NonPositiveParameter("num_users"));
        }
        if self.trials < 2 {
            return Err(Error::TrialsTooFew);
        }
        if !(self.power() > 0.0) || !self.power().is_finite() {
            return Err(Error::NonPositiveParameter("snr_db"));
        }
        Ok(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(rus: usize, ant: usize, k: usize, snr_db: f64, trials: usize, seed: u64) -> SystemConfig {
        SystemConfig { num_rus: rus, antennas_per_ru: ant, num_users: k, snr_db, trials, seed }
    }

    #[test]
    fn paper_default_config_is_valid() {
        let c = cfg(3, 8, 12, 0.0, 1000, 7).validate().unwrap();
        assert_eq!(c.m_antennas(), 24);
        assert!((c.power() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn minimal_config_is_valid() {
        let c = cfg(1, 1, 1, 0.0, 10, 0).validate().unwrap();
        assert_eq!(c.m_antennas(), 1);
        assert!((c.power() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn zero_users_rejected() {
        assert_eq!(
            cfg(3, 8, 0, 0.0, 1000, 7).validate(),
            Err(Error::NonPositiveParameter("num_users"))
        );
    }

    #[test]
    fn zero_counts_rejected() {
        assert!(matches!(cfg(0, 8, 4, 0.0, 10, 0).validate(), Err(Error::NonPositiveParameter(_))));
        assert!(matches!(cfg(3, 0, 4, 0.0, 10, 0).validate(), Err(Error::NonPositiveParameter(_))));
    }

    #[test]
    fn one_trial_rejected() {
        assert_eq!(cfg(3, 8, 4, 0.0, 1, 0).validate(), Err(Error::TrialsTooFew));
    }

    #[test]
    fn snr_round_trip() {
        for snr_db in [-20.0, -5.0, 0.0, 3.0, 10.0, 30.0] {
            let c = cfg(3, 8, 4, snr_db, 10, 0).validate().unwrap();
            let back = 10.0 * libm::log10(c.power());
            let rel = if snr_db == 0.0 { back.abs() } else { (back - snr_db).abs() / snr_db.abs() };
            assert!(rel < 1e-12, "snr {snr_db} -> {back}");
        }
    }

    #[test]
    fn scheme_labels_round_trip() {
        for s in PrecoderScheme::ALL {
            assert_eq!(PrecoderScheme::from_label(s.label()), Some(s));
        }
        assert_eq!(PrecoderScheme::from_label("zf"), None);
    }
}

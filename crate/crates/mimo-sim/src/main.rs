use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgAction, Args, Parser, Subcommand};
use mimo_core::{PrecoderScheme, SystemConfig};
use mimo_sim::config::ConfigFile;
use mimo_sim::report;
use mimo_sim::sweep::{run_bounds_table, run_crosspoint, run_sweep, SweepSpec};
use mimo_sim::HarnessError;

/// Link-level simulator for downlink network massive MIMO: ZF/MF precoding
/// under vector or matrix normalization, analytic rate bounds, and the
/// precoder crossing point.
#[derive(Parser)]
#[command(name = "mimo-sim", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonOpts {
    /// Flat `key = value` config file; CLI flags override file values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Number of radio units.
    #[arg(long)]
    rus: Option<usize>,
    /// Transmit antennas per radio unit.
    #[arg(long = "antennas-per-ru")]
    antennas_per_ru: Option<usize>,
    /// Total transmit SNR in dB.
    #[arg(long = "snr-db", allow_hyphen_values = true)]
    snr_db: Option<f64>,
    /// Monte Carlo trials per data point.
    #[arg(long)]
    trials: Option<usize>,
    /// Base RNG seed.
    #[arg(long)]
    seed: Option<u64>,
}

impl CommonOpts {
    /// Defaults (3 RUs x 8 antennas, 0 dB, 2000 trials, seed 1), overlaid by
    /// the config file, then by explicit flags.
    fn build_config(&self, num_users: usize) -> Result<SystemConfig, HarnessError> {
        let mut cfg = SystemConfig {
            num_rus: 3,
            antennas_per_ru: 8,
            num_users,
            snr_db: 0.0,
            trials: 2000,
            seed: 1,
        };
        if let Some(path) = &self.config {
            cfg = ConfigFile::load(path)?.apply(cfg);
        }
        if let Some(v) = self.rus {
            cfg.num_rus = v;
        }
        if let Some(v) = self.antennas_per_ru {
            cfg.antennas_per_ru = v;
        }
        if let Some(v) = self.snr_db {
            cfg.snr_db = v;
        }
        if let Some(v) = self.trials {
            cfg.trials = v;
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        cfg.num_users = num_users;
        Ok(cfg)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Monte Carlo sweep over user counts, CSV output plus JSON sidecar.
    Sweep {
        #[command(flatten)]
        common: CommonOpts,
        /// Smallest user count in the sweep.
        #[arg(long = "k-min", default_value_t = 1)]
        k_min: usize,
        /// Largest user count in the sweep (defaults to M).
        #[arg(long = "k-max")]
        k_max: Option<usize>,
        /// Comma list from {zf-vec, zf-mat, mf-vec, mf-mat}.
        #[arg(long, value_delimiter = ',')]
        schemes: Option<Vec<String>>,
        /// Include the analytic bound series in the CSV.
        #[arg(long = "bounds", action = ArgAction::SetTrue, overrides_with = "no_bounds")]
        bounds: bool,
        #[arg(long = "no-bounds", action = ArgAction::SetTrue)]
        no_bounds: bool,
        /// Worker threads for trial evaluation.
        #[arg(long, default_value_t = 1)]
        workers: usize,
        /// Output CSV path (sidecar written next to it with .json).
        #[arg(long, default_value = "sweep.csv")]
        out: PathBuf,
    },
    /// Analytic per-user bound table, no simulation.
    Bounds {
        #[command(flatten)]
        common: CommonOpts,
        #[arg(long = "k-min", default_value_t = 1)]
        k_min: usize,
        #[arg(long = "k-max")]
        k_max: Option<usize>,
        /// Output CSV path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Crossing-point analysis (approximate and exact), JSON output.
    Crosspoint {
        #[command(flatten)]
        common: CommonOpts,
        /// Output JSON path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the built-in invariant suite and print one pass/fail line each.
    Validate {
        #[command(flatten)]
        common: CommonOpts,
    },
}

fn parse_schemes(names: &Option<Vec<String>>) -> Result<Vec<PrecoderScheme>, HarnessError> {
    match names {
        None => Ok(PrecoderScheme::ALL.to_vec()),
        Some(list) => list
            .iter()
            .map(|n| {
                PrecoderScheme::from_label(n).ok_or_else(|| {
                    HarnessError::Validation(format!(
                        "unknown scheme `{n}` (expected zf-vec, zf-mat, mf-vec or mf-mat)"
                    ))
                })
            })
            .collect(),
    }
}

fn run(cli: Cli) -> Result<(), HarnessError> {
    match cli.command {
        Command::Sweep { common, k_min, k_max, schemes, bounds: _, no_bounds, workers, out } => {
            let cfg = common.build_config(1)?;
            let m = cfg.m_antennas();
            let spec = SweepSpec {
                cfg,
                k_min,
                k_max: k_max.unwrap_or(m),
                schemes: parse_schemes(&schemes)?,
                include_bounds: !no_bounds,
                workers,
            };
            let (rows, sidecar) = run_sweep(&spec)?;
            report::write_sweep(&out, &rows, &sidecar)?;
            eprintln!(
                "wrote {} rows to {} (sidecar {})",
                rows.len(),
                out.display(),
                out.with_extension("json").display()
            );
            Ok(())
        }
        Command::Bounds { common, k_min, k_max, out } => {
            let cfg = common.build_config(1)?;
            let m = cfg.m_antennas();
            let rows = run_bounds_table(m, cfg.power(), k_min, k_max.unwrap_or(m))?;
            match out {
                Some(path) => report::write_bounds(&path, &rows)?,
                None => print!("{}", report::bounds_csv(&rows)),
            }
            Ok(())
        }
        Command::Crosspoint { common, out } => {
            let cfg = common.build_config(1)?;
            let rep = run_crosspoint(cfg.m_antennas(), cfg.snr_db)?;
            let json = report::crosspoint_json(&rep)?;
            match out {
                Some(path) => std::fs::write(path, json)?,
                None => println!("{json}"),
            }
            Ok(())
        }
        Command::Validate { common } => {
            let cfg = common.build_config(1)?;
            if validate_suite(&cfg) {
                Ok(())
            } else {
                Err(HarnessError::Validation("invariant suite failed".into()))
            }
        }
    }
}

/// Quick invariant suite behind `mimo-sim validate`.
fn validate_suite(cfg: &SystemConfig) -> bool {
    use mimo_core::bounds::{kcross_exact, mf_matrix_lower, mf_vector_upper, zf_vector_lower};
    use mimo_core::channel::generate_channel;
    use mimo_core::montecarlo::estimate_wishart_trace;
    use mimo_core::precoding::build_precoder;

    let m = cfg.m_antennas();
    let k = (m / 2).max(1);
    let probe = SystemConfig { num_users: k, ..*cfg };
    let mut all_ok = true;
    let mut check = |name: &str, ok: bool| {
        println!("{}: {name}", if ok { "PASS" } else { "FAIL" });
        all_ok &= ok;
    };

    // total power = 1 and vector column power = 1/K over a few draws
    let mut power_ok = true;
    let mut zf_ok = true;
    for t in 0..50u64 {
        let h = generate_channel(&probe, t);
        for scheme in PrecoderScheme::ALL {
            let Ok(g) = build_precoder(&h, scheme) else {
                power_ok = false;
                continue;
            };
            power_ok &= (g.total_power() - 1.0).abs() < 1e-12;
            if scheme.normalization == mimo_core::Normalization::Vector {
                for c in 0..k {
                    power_ok &= (g.columns().col_norm_sq(c) - 1.0 / k as f64).abs() < 1e-12;
                }
            }
            if scheme.filter == mimo_core::Filter::Zf {
                let r = mimo_core::link::compute_sinr(&h, &g, probe.power()).unwrap();
                zf_ok &= r.interference_power.iter().all(|&i| i < 1e-9 * probe.power());
            }
        }
    }
    check("precoder total power is 1 (vector columns 1/K)", power_ok);
    check("ZF interference below 1e-9 * P", zf_ok);

    check(
        "channel generation is deterministic",
        generate_channel(&probe, 3) == generate_channel(&probe, 3),
    );

    let mf_gap_ok = (1..=m).all(|kk| {
        mf_matrix_lower(m as f64, kk as f64, probe.power()).unwrap().to_bits()
            == mf_vector_upper(m as f64, kk as f64, probe.power()).unwrap().to_bits()
    });
    check("MF matrix-lower equals vector-upper bitwise", mf_gap_ok);

    let cross_ok = match kcross_exact(m, probe.power()) {
        Ok(c) => match c.k_exact {
            Some(ke) => {
                let diff = zf_vector_lower(m as f64, ke, probe.power()).unwrap()
                    - mf_matrix_lower(m as f64, ke, probe.power()).unwrap();
                diff.abs() < 1e-9
            }
            None => true,
        },
        Err(_) => false,
    };
    check("crossing point solves the bound equality", cross_ok);

    let wishart_ok = if k < m {
        estimate_wishart_trace(m, k, 2000, probe.seed)
            .map(|e| {
                let analytic = k as f64 / (m - k) as f64;
                (e.mean - analytic).abs() / analytic < 0.05
            })
            .unwrap_or(false)
    } else {
        true
    };
    check("Wishart inverse-trace MC matches K/(M-K) within 5%", wishart_ok);

    all_ok
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

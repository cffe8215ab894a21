//! Run configuration: a single JSON document plus flag overrides.
//!
//! Frequency-like keys accept either angular units (`*_rad_s`) or plain
//! frequencies (`*_hz`, multiplied by 2π on ingestion); supplying both
//! variants of one key is a validation error. Direct atomic parameters and
//! physical field strengths are mutually exclusive inputs.

use std::f64::consts::TAU;
use std::fs;
use std::path::{Path, PathBuf};

use lyjump_core::atom::{self, AtomParams, He4Preset};
use lyjump_core::ratemodel::RateParams;
use serde::Deserialize;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot parse config {path}: {source}")]
    Parse {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error("`{0}` given in both rad/s and Hz; pick one")]
    AmbiguousUnits(&'static str),
    #[error("`{0}` is required but missing")]
    Missing(&'static str),
    #[error("`params` and `physical` are mutually exclusive")]
    ParamsAndPhysical,
    #[error("invalid parameters: {0}")]
    InvalidParams(#[from] atom::ParamError),
    #[error("invalid rate parameters: gamma > 0 and r_b, r_r >= 0 required")]
    InvalidRates,
    #[error("n_intervals must be at least 1")]
    ZeroIntervals,
    #[error("t0 must be positive")]
    NonPositiveT0,
}

#[derive(Debug, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub params: Option<ParamsSection>,
    pub physical: Option<PhysicalSection>,
    pub rate: Option<RateSection>,
    pub seed: Option<u64>,
    pub n_intervals: Option<u64>,
    pub t0_s: Option<f64>,
    pub td_s: Option<f64>,
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Deserialize, Default, Clone)]
#[serde(deny_unknown_fields)]
pub struct ParamsSection {
    pub gamma_rad_s: Option<f64>,
    pub gamma_hz: Option<f64>,
    pub delta2_rad_s: Option<f64>,
    pub delta2_hz: Option<f64>,
    pub delta3_rad_s: Option<f64>,
    pub delta3_hz: Option<f64>,
    pub delta4_rad_s: Option<f64>,
    pub delta4_hz: Option<f64>,
    pub omega_rad_s: Option<f64>,
    pub omega_hz: Option<f64>,
    pub omega_l_rad_s: Option<f64>,
    pub omega_l_hz: Option<f64>,
}

#[derive(Debug, Deserialize, Clone)]
#[serde(deny_unknown_fields)]
pub struct PhysicalSection {
    /// Static electric field F, V/m.
    pub static_field_v_per_m: f64,
    /// Laser field amplitude F_L, V/m.
    pub laser_field_v_per_m: f64,
    pub delta2_rad_s: Option<f64>,
    pub delta2_hz: Option<f64>,
}

#[derive(Debug, Deserialize, Default, Clone)]
#[serde(deny_unknown_fields)]
pub struct RateSection {
    pub gamma_rad_s: Option<f64>,
    pub gamma_hz: Option<f64>,
    pub r_b_rad_s: Option<f64>,
    pub r_b_hz: Option<f64>,
    pub r_r_rad_s: Option<f64>,
    pub r_r_hz: Option<f64>,
}

fn freq(
    name: &'static str,
    rad_s: Option<f64>,
    hz: Option<f64>,
) -> Result<Option<f64>, ConfigError> {
    match (rad_s, hz) {
        (Some(_), Some(_)) => Err(ConfigError::AmbiguousUnits(name)),
        (Some(r), None) => Ok(Some(r)),
        (None, Some(h)) => Ok(Some(h * TAU)),
        (None, None) => Ok(None),
    }
}

fn required(name: &'static str, value: Option<f64>) -> Result<f64, ConfigError> {
    value.ok_or(ConfigError::Missing(name))
}

/// How the atomic parameters were specified, echoed into every output.
#[derive(Debug, Clone, serde::Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ParamsSource {
    DeskScaleDefault,
    Direct,
    Physical {
        static_field_v_per_m: f64,
        laser_field_v_per_m: f64,
    },
}

/// Fully resolved run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub params: AtomParams,
    pub params_source: ParamsSource,
    pub rate: RateParams,
    pub seed: u64,
    pub n_intervals: u64,
    pub t0_s: Option<f64>,
    pub td_s: Option<f64>,
    pub out_dir: PathBuf,
}

/// Flag values that override the config file.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub n: Option<u64>,
    pub t0: Option<f64>,
    pub td: Option<f64>,
    pub out: Option<PathBuf>,
}

pub fn load_file(path: &Path) -> Result<ConfigFile, ConfigError> {
    let text = fs::read_to_string(path).map_err(|source| ConfigError::Read {
        path: path.to_owned(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| ConfigError::Parse {
        path: path.to_owned(),
        source,
    })
}

pub fn resolve(file: Option<ConfigFile>, overrides: &Overrides) -> Result<RunConfig, ConfigError> {
    let file = file.unwrap_or_default();
    if file.params.is_some() && file.physical.is_some() {
        return Err(ConfigError::ParamsAndPhysical);
    }
    let (params, params_source) = if let Some(section) = &file.params {
        let p = AtomParams::new(
            required(
                "gamma",
                freq("gamma", section.gamma_rad_s, section.gamma_hz)?,
            )?,
            required(
                "delta2",
                freq("delta2", section.delta2_rad_s, section.delta2_hz)?,
            )?,
            required(
                "delta3",
                freq("delta3", section.delta3_rad_s, section.delta3_hz)?,
            )?,
            required(
                "delta4",
                freq("delta4", section.delta4_rad_s, section.delta4_hz)?,
            )?,
            required(
                "omega",
                freq("omega", section.omega_rad_s, section.omega_hz)?,
            )?,
            required(
                "omega_l",
                freq("omega_l", section.omega_l_rad_s, section.omega_l_hz)?,
            )?,
        )?;
        (p, ParamsSource::Direct)
    } else if let Some(section) = &file.physical {
        let delta2 = freq("delta2", section.delta2_rad_s, section.delta2_hz)?.unwrap_or(0.0);
        let p = atom::from_physical(
            &He4Preset::default(),
            section.static_field_v_per_m,
            section.laser_field_v_per_m,
            delta2,
        )?;
        (
            p,
            ParamsSource::Physical {
                static_field_v_per_m: section.static_field_v_per_m,
                laser_field_v_per_m: section.laser_field_v_per_m,
            },
        )
    } else {
        (AtomParams::desk_scale(), ParamsSource::DeskScaleDefault)
    };

    let rate = if let Some(section) = &file.rate {
        let gamma =
            freq("rate.gamma", section.gamma_rad_s, section.gamma_hz)?.unwrap_or(params.gamma);
        RateParams::new(
            gamma,
            required(
                "rate.r_b",
                freq("rate.r_b", section.r_b_rad_s, section.r_b_hz)?,
            )?,
            required(
                "rate.r_r",
                freq("rate.r_r", section.r_r_rad_s, section.r_r_hz)?,
            )?,
        )
        .ok_or(ConfigError::InvalidRates)?
    } else {
        RateParams::figure_defaults(params.gamma)
    };

    let n_intervals = overrides.n.or(file.n_intervals).unwrap_or(100_000);
    if n_intervals == 0 {
        return Err(ConfigError::ZeroIntervals);
    }
    let t0_s = overrides.t0.or(file.t0_s);
    if let Some(t0) = t0_s {
        // Rejects NaN as well.
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !(t0 > 0.0) {
            return Err(ConfigError::NonPositiveT0);
        }
    }
    Ok(RunConfig {
        params,
        params_source,
        rate,
        seed: overrides.seed.or(file.seed).unwrap_or(1),
        n_intervals,
        t0_s,
        td_s: overrides.td.or(file.td_s),
        out_dir: overrides
            .out
            .clone()
            .or(file.out_dir)
            .unwrap_or_else(|| PathBuf::from(".")),
    })
}

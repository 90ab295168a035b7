use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::comb::CombSpec;
use crate::memory::{DecoherenceModel, SweepSettings};
use crate::multiplex::{ChannelPlan, FeedforwardSettings, FilterCavity};
use crate::quantumstats::PairSourceModel;
use crate::repeater::{fig1_scenario, ControlPulse, QubitTrain, RepeaterConfig, SpinWaveMemory};
use crate::{Error, Result};

/// Every section is optional; missing keys take the values printed by
/// `afcsim --print-defaults`. Unknown keys are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub comb: CombSpec,
    pub decoherence: DecoherenceModel,
    pub sweep: SweepConfig,
    pub fit: FitConfig,
    pub echo: EchoConfig,
    pub multiplex: MultiplexConfig,
    pub repeater: RepeaterSection,
    pub pair_source: PairSourceModel,
    pub g2: G2Config,
    pub project: ProjectConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    /// Storage times (s); each sets Δ = 1/τ.
    pub taus: Vec<f64>,
    pub probe: SweepSettings,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            taus: (1..=10).map(|i| i as f64 * 10e-6).collect(),
            probe: SweepSettings::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct FitConfig {
    /// `tau_s,efficiency` CSV; relative paths resolve against the config file.
    pub input: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EchoConfig {
    /// `t12_s,intensity` CSV. Without it a noiseless decay with `t2` is fitted.
    pub input: Option<PathBuf>,
    /// Fixed stretch exponent; omit to fit it.
    pub exponent: Option<f64>,
    pub t2: f64,
    pub t12: Vec<f64>,
}

impl Default for EchoConfig {
    fn default() -> Self {
        Self {
            input: None,
            exponent: Some(1.0),
            t2: 1.1e-3,
            t12: (0..12).map(|i| i as f64 * 50e-6).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MultiplexConfig {
    pub plan: ChannelPlan,
    pub cavity: FilterCavity,
    pub settings: FeedforwardSettings,
    /// Storage-input time of each channel's pulse (s); defaults to 20 µs steps.
    pub temporal_offsets: Option<Vec<f64>>,
    /// Channels to route through the cavity, one trace each.
    pub select: Vec<usize>,
    pub crosstalk_matrix: bool,
    /// Keep every n-th sample in trace CSVs.
    pub trace_stride: usize,
}

impl Default for MultiplexConfig {
    fn default() -> Self {
        Self {
            plan: ChannelPlan::default(),
            cavity: FilterCavity::default(),
            settings: FeedforwardSettings::default(),
            temporal_offsets: None,
            select: vec![0],
            crosstalk_matrix: true,
            trace_stride: 10,
        }
    }
}

impl MultiplexConfig {
    pub fn offsets(&self) -> Vec<f64> {
        self.temporal_offsets
            .clone()
            .unwrap_or_else(|| (0..self.plan.n_channels).map(|i| i as f64 * 20e-6).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RepeaterSection {
    pub memory: SpinWaveMemory,
    pub trains: Vec<QubitTrain>,
    pub pulses: Vec<ControlPulse>,
    pub rate: RepeaterConfig,
}

impl Default for RepeaterSection {
    fn default() -> Self {
        let (memory, trains, pulses) = fig1_scenario();
        Self {
            memory,
            trains,
            pulses,
            rate: RepeaterConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct G2Config {
    pub n_windows: u64,
}

impl Default for G2Config {
    fn default() -> Self {
        Self { n_windows: 10_000_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProjectConfig {
    /// Storage time for the headline projection (s).
    pub tau: f64,
    /// Storage times for the projection curve (s).
    pub taus: Vec<f64>,
}

impl Default for ProjectConfig {
    fn default() -> Self {
        Self {
            tau: 30e-6,
            taus: (1..=20).map(|i| i as f64 * 5e-6).collect(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    /// Parses a config file and resolves relative input paths against its directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg = Self::from_toml(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })?;
        let base = path.parent().unwrap_or(Path::new("."));
        for p in [&mut cfg.fit.input, &mut cfg.echo.input].into_iter().flatten() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serialises")
    }
}

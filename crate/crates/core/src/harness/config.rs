//! Experiment configuration: a TOML file whose every key is optional, plus
//! built-in presets for each published figure.
//!
//! ```toml
//! trials = 100
//! seed = 1
//! n_users = 20          # used when the sweep is not over users
//! n_vap = 16
//! n_rap = 9
//! blockage_rate = 0.1
//! cdf = false           # also write per-user rate CDFs
//! network_scope = "all_users"  # or "associated": rebuild clustering and
//!                              # precoders over each network's own users
//!
//! [room]
//! length = 10.0
//! width = 10.0
//! height = 3.0
//! user_altitude = 0.85
//!
//! [sweep]
//! param = "n_users"     # or "aps" / "fov_deg"
//! values = [5, 10, 15, 20, 25, 30]
//!
//! [[series]]
//! system = "hybrid"     # hybrid | vlc_only | rf_only
//! solver = "iterative"  # gibbs | iterative | random | exhaustive
//! clustering = "none"   # none | a1 | a2
//!
//! [clustering]
//! vlc_d_max = 4.0
//! rf_d_max = 6.0
//! vlc_n_max = 3
//! rf_n_max = 5
//!
//! [gibbs]
//! beta = 1e4
//! t_max = 500
//! weighting = "pseudocode"  # or "exponential"
//!
//! [vlc]                 # channel constants, see VlcParams
//! [rf]                  # channel constants, see RfParams
//! [link]                # bandwidths, noise PSDs and power budgets
//! ```
//!
//! An `aps` sweep takes `rows = [{ n_vap = 16, n_rap = 9, side = 10.0 }, …]`
//! (square rooms). A `fov_deg` sweep takes `values` in degrees and an
//! optional `n_users` list, producing one row group per user count.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::association::{GibbsOptions, EXHAUSTIVE_LIMIT};
use crate::channel::{RfParams, VlcParams};
use crate::clustering::ClusteringRule;
use crate::error::{Error, Result};
use crate::rates::{NetworkConfig, NetworkScope};
use crate::scenario::{deploy_aps, Room};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum System {
    Hybrid,
    VlcOnly,
    RfOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Solver {
    Gibbs,
    Iterative,
    Random,
    Exhaustive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClusteringMode {
    #[default]
    None,
    A1,
    A2,
}

impl System {
    pub fn name(self) -> &'static str {
        match self {
            System::Hybrid => "hybrid",
            System::VlcOnly => "vlc_only",
            System::RfOnly => "rf_only",
        }
    }
}

impl Solver {
    pub fn name(self) -> &'static str {
        match self {
            Solver::Gibbs => "gibbs",
            Solver::Iterative => "iterative",
            Solver::Random => "random",
            Solver::Exhaustive => "exhaustive",
        }
    }
}

impl ClusteringMode {
    pub fn name(self) -> &'static str {
        match self {
            ClusteringMode::None => "none",
            ClusteringMode::A1 => "a1",
            ClusteringMode::A2 => "a2",
        }
    }
}

/// One curve of a figure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Series {
    pub system: System,
    /// Ignored by standalone systems, which pin every user to their network.
    #[serde(default = "default_solver")]
    pub solver: Solver,
    #[serde(default)]
    pub clustering: ClusteringMode,
}

fn default_solver() -> Solver {
    Solver::Iterative
}

impl Series {
    pub fn new(system: System, solver: Solver, clustering: ClusteringMode) -> Self {
        Series {
            system,
            solver,
            clustering,
        }
    }

    pub fn standalone(system: System, clustering: ClusteringMode) -> Self {
        Series::new(system, Solver::Iterative, clustering)
    }

    /// Solver label for reports; standalone systems have none.
    pub fn solver_label(&self) -> &'static str {
        match self.system {
            System::Hybrid => self.solver.name(),
            _ => "none",
        }
    }
}

/// One column of the AP-density table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ApRow {
    pub n_vap: usize,
    pub n_rap: usize,
    /// Side of the square room in metres.
    pub side: f64,
}

/// Room sizes and AP counts used for the AP-density sweep.
pub fn table3_rows() -> Vec<ApRow> {
    [
        (16, 9, 10.0),
        (16, 16, 11.0),
        (36, 9, 14.0),
        (49, 16, 16.0),
        (64, 16, 19.0),
        (81, 16, 22.0),
        (100, 25, 25.0),
    ]
    .into_iter()
    .map(|(n_vap, n_rap, side)| ApRow { n_vap, n_rap, side })
    .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "param", rename_all = "snake_case", deny_unknown_fields)]
pub enum Sweep {
    NUsers {
        values: Vec<usize>,
    },
    Aps {
        #[serde(default = "table3_rows")]
        rows: Vec<ApRow>,
    },
    FovDeg {
        values: Vec<f64>,
        #[serde(default)]
        n_users: Vec<usize>,
    },
}

impl Default for Sweep {
    fn default() -> Self {
        Sweep::NUsers {
            values: vec![5, 10, 15, 20, 25, 30],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClusteringParams {
    pub vlc_d_max: f64,
    pub rf_d_max: f64,
    pub vlc_n_max: usize,
    pub rf_n_max: usize,
}

impl Default for ClusteringParams {
    fn default() -> Self {
        ClusteringParams {
            vlc_d_max: 4.0,
            rf_d_max: 6.0,
            vlc_n_max: 3,
            rf_n_max: 5,
        }
    }
}

impl ClusteringParams {
    /// Rules for the VLC and RF networks under `mode`.
    pub fn rules(&self, mode: ClusteringMode) -> (ClusteringRule, ClusteringRule) {
        match mode {
            ClusteringMode::None => (ClusteringRule::Full, ClusteringRule::Full),
            ClusteringMode::A1 => (
                ClusteringRule::Distance(self.vlc_d_max),
                ClusteringRule::Distance(self.rf_d_max),
            ),
            ClusteringMode::A2 => (
                ClusteringRule::TopN(self.vlc_n_max),
                ClusteringRule::TopN(self.rf_n_max),
            ),
        }
    }
}

/// Bandwidths, noise and power budgets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LinkParams {
    pub vlc_bandwidth_hz: f64,
    pub rf_bandwidth_hz: f64,
    pub vlc_noise_psd: f64,
    pub rf_noise_psd: f64,
    pub vlc_ap_power_w: f64,
    pub rf_ap_power_w: f64,
    /// Multiplier on σ_v² in the VLC SINR.
    pub vlc_noise_factor: f64,
}

impl Default for LinkParams {
    fn default() -> Self {
        LinkParams {
            vlc_bandwidth_hz: 40e6,
            rf_bandwidth_hz: 15e6,
            vlc_noise_psd: 1e-22,
            rf_noise_psd: 1e-19,
            vlc_ap_power_w: 5.0,
            rf_ap_power_w: 5.0,
            vlc_noise_factor: 9.0,
        }
    }
}

impl LinkParams {
    pub fn vlc_network(&self, vlc: &VlcParams) -> Result<NetworkConfig> {
        NetworkConfig::vlc(
            self.vlc_bandwidth_hz,
            self.vlc_ap_power_w,
            self.vlc_noise_psd,
            vlc.conversion_factor(),
            self.vlc_noise_factor,
        )
    }

    pub fn rf_network(&self) -> Result<NetworkConfig> {
        NetworkConfig::rf(self.rf_bandwidth_hz, self.rf_ap_power_w, self.rf_noise_psd)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub trials: usize,
    pub seed: u64,
    pub n_users: usize,
    pub n_vap: usize,
    pub n_rap: usize,
    pub blockage_rate: f64,
    pub cdf: bool,
    pub network_scope: NetworkScope,
    pub room: Room,
    pub sweep: Sweep,
    pub series: Vec<Series>,
    pub clustering: ClusteringParams,
    pub gibbs: GibbsOptions,
    pub vlc: VlcParams,
    pub rf: RfParams,
    pub link: LinkParams,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let mut cfg = ExperimentConfig {
            trials: 100,
            seed: 1,
            n_users: 20,
            n_vap: 16,
            n_rap: 9,
            blockage_rate: 0.1,
            cdf: false,
            network_scope: NetworkScope::AllUsers,
            room: Room::default(),
            sweep: Sweep::default(),
            series: Vec::new(),
            clustering: ClusteringParams::default(),
            gibbs: GibbsOptions::default(),
            vlc: VlcParams::default(),
            rf: RfParams::default(),
            link: LinkParams::default(),
        };
        Preset::Fig4.apply(&mut cfg);
        cfg
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml_str(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn validate(&self) -> Result<()> {
        let config_err = |msg: String| Err(Error::Config(msg));
        if self.trials == 0 {
            return config_err("trials must be at least 1".into());
        }
        if self.series.is_empty() {
            return config_err("at least one series is required".into());
        }
        if self.n_users == 0 {
            return config_err("n_users must be at least 1".into());
        }
        match &self.sweep {
            Sweep::NUsers { values } => {
                if values.is_empty() || values.contains(&0) {
                    return config_err("n_users sweep needs non-empty, non-zero values".into());
                }
            }
            Sweep::Aps { rows } => {
                if rows.is_empty() {
                    return config_err("aps sweep needs at least one row".into());
                }
            }
            Sweep::FovDeg { values, n_users } => {
                if values.is_empty() {
                    return config_err("fov_deg sweep needs at least one value".into());
                }
                if n_users.contains(&0) {
                    return config_err("fov_deg sweep n_users must be non-zero".into());
                }
            }
        }
        let max_users = match &self.sweep {
            Sweep::NUsers { values } => values.iter().copied().max(),
            Sweep::FovDeg { n_users, .. } if !n_users.is_empty() => n_users.iter().copied().max(),
            _ => Some(self.n_users),
        }
        .unwrap_or(self.n_users);
        if max_users > EXHAUSTIVE_LIMIT
            && self.series.iter().any(|s| s.system == System::Hybrid && s.solver == Solver::Exhaustive)
        {
            return Err(Error::TooManyUsers {
                n_users: max_users,
                limit: EXHAUSTIVE_LIMIT,
            });
        }
        let grids: Vec<(Room, usize, usize)> = match &self.sweep {
            Sweep::Aps { rows } => rows
                .iter()
                .map(|r| {
                    Room::new(r.side, r.side, self.room.height, self.room.user_altitude)
                        .map(|room| (room, r.n_vap, r.n_rap))
                })
                .collect::<Result<_>>()?,
            _ => vec![(self.room, self.n_vap, self.n_rap)],
        };
        for (room, n_vap, n_rap) in grids {
            for s in &self.series {
                match s.system {
                    System::Hybrid => deploy_aps(&room, n_vap, n_rap)?,
                    System::VlcOnly => deploy_aps(&room, n_vap + n_rap, 0)?,
                    System::RfOnly => deploy_aps(&room, 0, n_vap + n_rap)?,
                };
            }
        }
        if !(0.0..=1.0).contains(&self.blockage_rate) {
            return config_err(format!("blockage_rate {} outside [0, 1]", self.blockage_rate));
        }
        self.room
            .validate()
            .and_then(|_| self.vlc.validate())
            .and_then(|_| self.rf.validate())
            .and_then(|_| self.link.vlc_network(&self.vlc).map(|_| ()))
            .and_then(|_| self.link.rf_network().map(|_| ()))
            .map_err(|e| Error::Config(e.to_string()))
    }
}

/// Experiment designs for the published figures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Preset {
    /// Sum-rate vs users, no clustering, all five systems.
    Fig4,
    /// Sum-rate vs total APs (room grows with AP count), hybrid only.
    Fig5,
    /// Sum-rate vs FoV for three user counts.
    Fig6,
    /// Per-user rate CDFs at 10 and 20 users, no clustering.
    Fig7,
    /// Gibbs iterations to converge vs users.
    Fig8,
    /// Iterative-algorithm changes vs users.
    Fig9,
    /// Per-user rate CDFs under distance clustering.
    Fig10,
    /// Per-user rate CDFs under nearest-N clustering.
    Fig11,
    /// Gibbs vs iterative under distance clustering.
    Fig12,
    /// Gibbs vs iterative under nearest-N clustering.
    Fig13,
}

impl Preset {
    pub const ALL: [Preset; 10] = [
        Preset::Fig4,
        Preset::Fig5,
        Preset::Fig6,
        Preset::Fig7,
        Preset::Fig8,
        Preset::Fig9,
        Preset::Fig10,
        Preset::Fig11,
        Preset::Fig12,
        Preset::Fig13,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Fig4 => "fig4",
            Preset::Fig5 => "fig5",
            Preset::Fig6 => "fig6",
            Preset::Fig7 => "fig7",
            Preset::Fig8 => "fig8",
            Preset::Fig9 => "fig9",
            Preset::Fig10 => "fig10",
            Preset::Fig11 => "fig11",
            Preset::Fig12 => "fig12",
            Preset::Fig13 => "fig13",
        }
    }

    fn five_systems(clustering: ClusteringMode) -> Vec<Series> {
        vec![
            Series::new(System::Hybrid, Solver::Gibbs, clustering),
            Series::new(System::Hybrid, Solver::Iterative, clustering),
            Series::new(System::Hybrid, Solver::Random, clustering),
            Series::standalone(System::VlcOnly, clustering),
            Series::standalone(System::RfOnly, clustering),
        ]
    }

    fn both_algorithms(clustering: ClusteringMode) -> Vec<Series> {
        vec![
            Series::new(System::Hybrid, Solver::Gibbs, clustering),
            Series::new(System::Hybrid, Solver::Iterative, clustering),
        ]
    }

    /// Overwrites the sweep, series and CDF switch of `cfg`. Physical
    /// parameters, trial count and seed are left alone.
    pub fn apply(self, cfg: &mut ExperimentConfig) {
        let users_5_to_30 = Sweep::NUsers {
            values: vec![5, 10, 15, 20, 25, 30],
        };
        let cdf_users = Sweep::NUsers {
            values: vec![10, 20],
        };
        let (sweep, series, cdf) = match self {
            Preset::Fig4 => (users_5_to_30, Self::five_systems(ClusteringMode::None), false),
            Preset::Fig5 => {
                cfg.n_users = 30;
                (
                    Sweep::Aps { rows: table3_rows() },
                    Self::both_algorithms(ClusteringMode::None),
                    false,
                )
            }
            Preset::Fig6 => (
                Sweep::FovDeg {
                    values: vec![20.0, 30.0, 40.0, 50.0, 60.0, 70.0, 80.0, 90.0],
                    n_users: vec![5, 10, 20],
                },
                vec![
                    Series::new(System::Hybrid, Solver::Gibbs, ClusteringMode::None),
                    Series::new(System::Hybrid, Solver::Iterative, ClusteringMode::None),
                    Series::standalone(System::VlcOnly, ClusteringMode::None),
                ],
                false,
            ),
            Preset::Fig7 => (cdf_users, Self::five_systems(ClusteringMode::None), true),
            Preset::Fig8 => (
                users_5_to_30,
                vec![Series::new(System::Hybrid, Solver::Gibbs, ClusteringMode::None)],
                false,
            ),
            Preset::Fig9 => (
                Sweep::NUsers {
                    values: vec![10, 20, 30],
                },
                vec![Series::new(System::Hybrid, Solver::Iterative, ClusteringMode::None)],
                false,
            ),
            Preset::Fig10 => (cdf_users, Self::five_systems(ClusteringMode::A1), true),
            Preset::Fig11 => (cdf_users, Self::five_systems(ClusteringMode::A2), true),
            Preset::Fig12 => (users_5_to_30, Self::both_algorithms(ClusteringMode::A1), false),
            Preset::Fig13 => (users_5_to_30, Self::both_algorithms(ClusteringMode::A2), false),
        };
        cfg.sweep = sweep;
        cfg.series = series;
        cfg.cdf = cdf;
    }

    pub fn config(self) -> ExperimentConfig {
        let mut cfg = ExperimentConfig::default();
        self.apply(&mut cfg);
        cfg
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown preset {s:?}")))
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

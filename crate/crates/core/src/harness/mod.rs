//! Monte Carlo experiment runner: per-trial pipeline, sweeps and aggregation.

mod config;
mod report;

pub use config::{
    table3_rows, ApRow, ClusteringMode, ClusteringParams, ExperimentConfig, LinkParams, Preset,
    Series, Solver, Sweep, System,
};
pub use report::{cdf_path, write_cdf_csv, write_report, write_sweep_csv, CDF_HEADER, SWEEP_HEADER};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::association::{
    associate_exhaustive, associate_gibbs, associate_iterative, associate_random, GibbsOptions,
    SolveTrace,
};
use crate::channel::{build_channel_matrices, RfParams, VlcParams};
use crate::error::{Error, Result};
use crate::rates::{HybridState, NetworkScope, NetworkState, Rebuild};
use crate::scenario::{Room, Scenario};

/// Everything needed to run one trial of one curve at one sweep point.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialConfig {
    pub room: Room,
    pub n_vap: usize,
    pub n_rap: usize,
    pub n_users: usize,
    pub blockage_rate: f64,
    pub series: Series,
    pub clustering: ClusteringParams,
    pub gibbs: GibbsOptions,
    pub vlc: VlcParams,
    pub rf: RfParams,
    pub link: LinkParams,
    pub network_scope: NetworkScope,
    pub base_seed: u64,
}

impl TrialConfig {
    /// Baseline physics with the given curve and user count.
    pub fn new(series: Series, n_users: usize, base_seed: u64) -> Self {
        let cfg = ExperimentConfig::default();
        TrialConfig {
            room: cfg.room,
            n_vap: cfg.n_vap,
            n_rap: cfg.n_rap,
            n_users,
            blockage_rate: cfg.blockage_rate,
            series,
            clustering: cfg.clustering,
            gibbs: cfg.gibbs,
            vlc: cfg.vlc,
            rf: cfg.rf,
            link: cfg.link,
            network_scope: cfg.network_scope,
            base_seed,
        }
    }

    /// AP counts actually deployed. Standalone systems get the combined
    /// count of the single kind.
    pub fn deployed_aps(&self) -> (usize, usize) {
        let total = self.n_vap + self.n_rap;
        match self.series.system {
            System::Hybrid => (self.n_vap, self.n_rap),
            System::VlcOnly => (total, 0),
            System::RfOnly => (0, total),
        }
    }

    pub fn trial_seed(&self, trial_index: u64) -> u64 {
        self.base_seed ^ trial_index
    }
}

/// Outcome of one trial.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialResult {
    pub seed: u64,
    pub b: Vec<bool>,
    pub per_user_rate: Vec<f64>,
    pub vlc_rate: Vec<f64>,
    pub rf_rate: Vec<f64>,
    pub sum_rate: f64,
    pub iterations: usize,
    pub changes: usize,
    pub converged: bool,
    pub trace: SolveTrace,
}

/// Drop, channels, clusters, precoders and powers of one trial.
#[derive(Debug, Clone)]
pub struct TrialState {
    pub scenario: Scenario,
    pub state: HybridState,
}

/// Builds the scenario and both networks from `rng`. The RNG is left
/// positioned for the solver.
pub fn build_trial_state(cfg: &TrialConfig, rng: &mut ChaCha8Rng) -> Result<TrialState> {
    let (n_vap, n_rap) = cfg.deployed_aps();
    let scenario = Scenario::generate(cfg.room, n_vap, n_rap, cfg.n_users, cfg.blockage_rate, rng)?;
    let channels = build_channel_matrices(&scenario, &cfg.vlc, &cfg.rf, rng)?;
    let (vlc_rule, rf_rule) = cfg.clustering.rules(cfg.series.clustering);
    let users = &scenario.users.positions;
    let vlc = NetworkState::new(
        channels.hv,
        vlc_rule.apply(users, &scenario.aps.vlc_positions)?,
        cfg.link.vlc_network(&cfg.vlc)?,
    )?;
    let rf = NetworkState::new(
        channels.hr,
        rf_rule.apply(users, &scenario.aps.rf_positions)?,
        cfg.link.rf_network()?,
    )?;
    let mut state = HybridState::new(vlc, rf)?;
    if cfg.network_scope == NetworkScope::Associated {
        state = state.with_rebuild(Rebuild {
            users: users.clone(),
            vlc_aps: scenario.aps.vlc_positions.clone(),
            rf_aps: scenario.aps.rf_positions.clone(),
            vlc_rule,
            rf_rule,
        })?;
    }
    Ok(TrialState { scenario, state })
}

/// Runs trial `trial_index` with RNG seed `base_seed ^ trial_index`.
pub fn run_trial(cfg: &TrialConfig, trial_index: u64) -> Result<TrialResult> {
    let seed = cfg.trial_seed(trial_index);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let TrialState { state, .. } = build_trial_state(cfg, &mut rng)?;
    let n = cfg.n_users;

    let (b, trace) = match (cfg.series.system, cfg.series.solver) {
        (System::VlcOnly, _) => (vec![true; n], SolveTrace::default()),
        (System::RfOnly, _) => (vec![false; n], SolveTrace::default()),
        (System::Hybrid, Solver::Random) => (associate_random(n, &mut rng)?, SolveTrace::default()),
        (System::Hybrid, Solver::Iterative) => {
            let a = associate_iterative(&state);
            (a.b, a.trace)
        }
        (System::Hybrid, Solver::Gibbs) => {
            let a = associate_gibbs(&state, &cfg.gibbs, &mut rng)?;
            (a.b, a.trace)
        }
        (System::Hybrid, Solver::Exhaustive) => {
            let a = associate_exhaustive(&state)?;
            (a.b, a.trace)
        }
    };

    let report = state.evaluate(&b);
    if !report.sum_rate.is_finite() {
        return Err(Error::NonFinite("sum-rate"));
    }
    Ok(TrialResult {
        seed,
        b,
        per_user_rate: report.per_user_rate,
        vlc_rate: report.vlc_rate,
        rf_rate: report.rf_rate,
        sum_rate: report.sum_rate,
        iterations: trace.iterations,
        changes: trace.changes,
        converged: trace.converged,
        trace,
    })
}

/// One curve at one sweep point.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub sweep_param: String,
    pub sweep_value: f64,
    pub series: Series,
    pub n_users: usize,
    pub mean_sum_rate: f64,
    pub mean_iterations: f64,
    pub mean_changes: f64,
    /// Per-trial results in trial-index order.
    pub results: Vec<TrialResult>,
}

impl SweepRow {
    pub fn trials(&self) -> usize {
        self.results.len()
    }

    pub fn mean_per_user_rate(&self) -> f64 {
        self.mean_sum_rate / self.n_users as f64
    }

    /// Every per-user rate of every trial, in trial then user order.
    pub fn rate_pool(&self) -> Vec<f64> {
        self.results
            .iter()
            .flat_map(|r| r.per_user_rate.iter().copied())
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CdfCurve {
    pub series: Series,
    pub n_users: usize,
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub rows: Vec<SweepRow>,
    /// Filled when the config asks for CDFs.
    pub cdfs: Vec<CdfCurve>,
}

impl ExperimentReport {
    pub fn row(&self, sweep_value: f64, series: Series) -> Option<&SweepRow> {
        self.rows
            .iter()
            .find(|r| r.sweep_value == sweep_value && r.series == series)
    }

    pub fn rows_for(&self, series: Series) -> impl Iterator<Item = &SweepRow> {
        self.rows.iter().filter(move |r| r.series == series)
    }
}

/// A sweep point before the series are applied.
#[derive(Debug, Clone)]
struct Point {
    param: String,
    value: f64,
    base: TrialConfig,
}

fn sweep_points(cfg: &ExperimentConfig) -> Result<Vec<Point>> {
    let base = TrialConfig {
        room: cfg.room,
        n_vap: cfg.n_vap,
        n_rap: cfg.n_rap,
        n_users: cfg.n_users,
        blockage_rate: cfg.blockage_rate,
        series: cfg.series[0],
        clustering: cfg.clustering,
        gibbs: cfg.gibbs,
        vlc: cfg.vlc,
        rf: cfg.rf,
        link: cfg.link,
        network_scope: cfg.network_scope,
        base_seed: cfg.seed,
    };
    let mut points = Vec::new();
    match &cfg.sweep {
        Sweep::NUsers { values } => {
            for &n in values {
                points.push(Point {
                    param: "n_users".into(),
                    value: n as f64,
                    base: TrialConfig {
                        n_users: n,
                        ..base.clone()
                    },
                });
            }
        }
        Sweep::Aps { rows } => {
            for row in rows {
                let room = Room::new(row.side, row.side, cfg.room.height, cfg.room.user_altitude)
                    .map_err(|e| Error::Config(e.to_string()))?;
                points.push(Point {
                    param: "aps".into(),
                    value: (row.n_vap + row.n_rap) as f64,
                    base: TrialConfig {
                        room,
                        n_vap: row.n_vap,
                        n_rap: row.n_rap,
                        ..base.clone()
                    },
                });
            }
        }
        Sweep::FovDeg { values, n_users } => {
            let user_counts = if n_users.is_empty() {
                vec![cfg.n_users]
            } else {
                n_users.clone()
            };
            for &n in &user_counts {
                for &fov in values {
                    let vlc = VlcParams {
                        fov_semi_angle_deg: fov,
                        ..cfg.vlc
                    };
                    vlc.validate().map_err(|e| Error::Config(e.to_string()))?;
                    points.push(Point {
                        param: format!("fov_deg@n_users={n}"),
                        value: fov,
                        base: TrialConfig {
                            n_users: n,
                            vlc,
                            ..base.clone()
                        },
                    });
                }
            }
        }
    }
    Ok(points)
}

/// Runs `trials` trials of one curve in parallel and averages them in
/// trial-index order. The first failing trial (lowest index) aborts the run.
pub fn run_point(cfg: &TrialConfig, trials: usize) -> Result<Vec<TrialResult>> {
    let outcomes: Vec<Result<TrialResult>> = (0..trials as u64)
        .into_par_iter()
        .map(|t| run_trial(cfg, t))
        .collect();
    outcomes
        .into_iter()
        .enumerate()
        .map(|(t, r)| {
            r.map_err(|source| Error::Trial {
                seed: cfg.trial_seed(t as u64),
                source: Box::new(source),
            })
        })
        .collect()
}

fn mean(values: impl Iterator<Item = f64>, n: usize) -> f64 {
    values.sum::<f64>() / n as f64
}

/// Runs every sweep point for every series.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let mut rows = Vec::new();
    for point in sweep_points(cfg)? {
        for &series in &cfg.series {
            let tc = TrialConfig {
                series,
                ..point.base.clone()
            };
            let results = run_point(&tc, cfg.trials)?;
            let n = results.len();
            rows.push(SweepRow {
                sweep_param: point.param.clone(),
                sweep_value: point.value,
                series,
                n_users: tc.n_users,
                mean_sum_rate: mean(results.iter().map(|r| r.sum_rate), n),
                mean_iterations: mean(results.iter().map(|r| r.iterations as f64), n),
                mean_changes: mean(results.iter().map(|r| r.changes as f64), n),
                results,
            });
        }
    }
    let cdfs = if cfg.cdf {
        rows.iter()
            .map(|row| {
                Ok(CdfCurve {
                    series: row.series,
                    n_users: row.n_users,
                    points: compute_cdf(&row.rate_pool())?,
                })
            })
            .collect::<Result<Vec<_>>>()?
    } else {
        Vec::new()
    };
    Ok(ExperimentReport { rows, cdfs })
}

/// Empirical CDF: sorted values paired with `(i + 1) / n`.
pub fn compute_cdf(pool: &[f64]) -> Result<Vec<(f64, f64)>> {
    if pool.is_empty() {
        return Err(Error::EmptyPool);
    }
    if pool.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("rate pool"));
    }
    let mut sorted = pool.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    Ok(sorted
        .into_iter()
        .enumerate()
        .map(|(i, v)| (v, (i + 1) as f64 / n))
        .collect())
}

//! Python bindings for the `cfmimo` simulator.

use std::path::PathBuf;

use pyo3::exceptions::{PyOSError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use cfmimo::association::{
    associate_exhaustive, associate_gibbs, associate_iterative, associate_random, Association,
    GibbsOptions, GibbsWeighting,
};
use cfmimo::channel::{self, RfParams, VlcParams};
use cfmimo::error::Error;
use cfmimo::harness::{
    self, build_trial_state, ClusteringMode, ExperimentConfig, ExperimentReport, Preset, Series,
    Solver, System, TrialConfig, TrialState,
};
use cfmimo::rates::NetworkScope;
use cfmimo::scenario::{self, Room};

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Io { .. } => PyOSError::new_err(e.to_string()),
        e if e.is_config_error() => PyValueError::new_err(e.to_string()),
        e => PyRuntimeError::new_err(e.to_string()),
    }
}

fn parse<T: serde::de::DeserializeOwned>(what: &str, value: &str) -> PyResult<T> {
    #[derive(serde::Deserialize)]
    struct Wrap<T> {
        v: T,
    }
    toml::from_str::<Wrap<T>>(&format!("v = {value:?}"))
        .map(|w| w.v)
        .map_err(|_| PyValueError::new_err(format!("unknown {what} {value:?}")))
}

type Point = (f64, f64, f64);

fn point(p: Point) -> nalgebra::Point3<f64> {
    nalgebra::Point3::new(p.0, p.1, p.2)
}

fn tuple(p: &nalgebra::Point3<f64>) -> Point {
    (p.x, p.y, p.z)
}

/// Lambertian order for a half-intensity angle in radians.
#[pyfunction]
fn lambertian_order(half_intensity_angle: f64) -> PyResult<f64> {
    channel::lambertian_order(half_intensity_angle).map_err(to_py)
}

/// Optical concentrator gain; angles in radians.
#[pyfunction]
fn concentrator_gain(incidence: f64, fov_semi_angle: f64, refractive_index: f64) -> f64 {
    channel::concentrator_gain(incidence, fov_semi_angle, refractive_index)
}

/// LoS VLC gain between a receiver and a ceiling AP with baseline optics.
#[pyfunction]
#[pyo3(signature = (user, ap, blocked = false))]
fn vlc_channel_gain(user: Point, ap: Point, blocked: bool) -> PyResult<f64> {
    channel::vlc_channel_gain(&point(user), &point(ap), blocked, &VlcParams::default()).map_err(to_py)
}

/// RF path loss in dB.
#[pyfunction]
#[pyo3(signature = (distance, shadow_db = 0.0))]
fn path_loss_db(distance: f64, shadow_db: f64) -> PyResult<f64> {
    channel::path_loss_db(distance, shadow_db, &RfParams::default()).map_err(to_py)
}

/// Ceiling AP grids: returns `(vlc_positions, rf_positions)`.
#[pyfunction]
#[pyo3(signature = (n_vap, n_rap, length = 10.0, width = 10.0, height = 3.0))]
fn deploy_aps(
    n_vap: usize,
    n_rap: usize,
    length: f64,
    width: f64,
    height: f64,
) -> PyResult<(Vec<Point>, Vec<Point>)> {
    let room = Room::new(length, width, height, 0.85).map_err(to_py)?;
    let aps = scenario::deploy_aps(&room, n_vap, n_rap).map_err(to_py)?;
    Ok((
        aps.vlc_positions.iter().map(tuple).collect(),
        aps.rf_positions.iter().map(tuple).collect(),
    ))
}

/// Empirical CDF as `(value, fraction)` pairs.
#[pyfunction]
fn compute_cdf(pool: Vec<f64>) -> PyResult<Vec<(f64, f64)>> {
    harness::compute_cdf(&pool).map_err(to_py)
}

/// Outcome of an association solver.
#[pyclass(get_all, frozen)]
struct Solution {
    b: Vec<bool>,
    sum_rate: f64,
    iterations: usize,
    changes: usize,
    converged: bool,
    sum_rate_trace: Vec<f64>,
}

#[pymethods]
impl Solution {
    fn __repr__(&self) -> String {
        format!(
            "Solution(sum_rate={}, iterations={}, changes={}, converged={})",
            self.sum_rate, self.iterations, self.changes, self.converged
        )
    }
}

/// One drop with both networks built: channels, clusters, precoders, powers.
#[pyclass(frozen)]
struct Trial {
    cfg: TrialConfig,
    trial_index: u64,
    inner: TrialState,
}

impl Trial {
    fn solution(&self, a: Association) -> Solution {
        Solution {
            sum_rate: self.inner.state.sum_rate(&a.b),
            b: a.b,
            iterations: a.trace.iterations,
            changes: a.trace.changes,
            converged: a.trace.converged,
            sum_rate_trace: a.trace.sum_rates,
        }
    }
}

#[pymethods]
impl Trial {
    #[new]
    #[pyo3(signature = (
        n_users,
        seed = 1,
        trial_index = 0,
        system = "hybrid",
        solver = "iterative",
        clustering = "none",
        network_scope = "all_users",
    ))]
    fn new(
        n_users: usize,
        seed: u64,
        trial_index: u64,
        system: &str,
        solver: &str,
        clustering: &str,
        network_scope: &str,
    ) -> PyResult<Self> {
        let series = Series::new(
            parse::<System>("system", system)?,
            parse::<Solver>("solver", solver)?,
            parse::<ClusteringMode>("clustering", clustering)?,
        );
        let mut cfg = TrialConfig::new(series, n_users, seed);
        cfg.network_scope = parse::<NetworkScope>("network_scope", network_scope)?;
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.trial_seed(trial_index));
        let inner = build_trial_state(&cfg, &mut rng).map_err(to_py)?;
        Ok(Trial {
            cfg,
            trial_index,
            inner,
        })
    }

    #[getter]
    fn n_users(&self) -> usize {
        self.inner.state.n_users()
    }

    #[getter]
    fn user_positions(&self) -> Vec<Point> {
        self.inner.scenario.users.positions.iter().map(tuple).collect()
    }

    #[getter]
    fn vlc_blocked(&self) -> Vec<bool> {
        self.inner.scenario.users.vlc_blocked.clone()
    }

    /// VLC gains, one row per user.
    #[getter]
    fn vlc_channel(&self) -> Vec<Vec<f64>> {
        let h = &self.inner.state.vlc.channel;
        h.row_iter().map(|r| r.iter().copied().collect()).collect()
    }

    /// RF gains as complex numbers, one row per user.
    #[getter]
    fn rf_channel(&self) -> Vec<Vec<num_complex::Complex64>> {
        let h = &self.inner.state.rf.channel;
        h.row_iter().map(|r| r.iter().copied().collect()).collect()
    }

    fn sum_rate(&self, b: Vec<bool>) -> PyResult<f64> {
        self.check(&b)?;
        Ok(self.inner.state.sum_rate(&b))
    }

    /// Per-user rates and SINRs for an association vector (True = VLC).
    fn evaluate<'py>(&self, py: Python<'py>, b: Vec<bool>) -> PyResult<Bound<'py, PyDict>> {
        self.check(&b)?;
        let r = self.inner.state.evaluate(&b);
        let d = PyDict::new(py);
        d.set_item("per_user_rate", r.per_user_rate)?;
        d.set_item("per_user_sinr", r.per_user_sinr)?;
        d.set_item("vlc_rate", r.vlc_rate)?;
        d.set_item("rf_rate", r.rf_rate)?;
        d.set_item("sum_rate", r.sum_rate)?;
        Ok(d)
    }

    fn associate_iterative(&self, py: Python<'_>) -> Solution {
        let a = py.detach(|| associate_iterative(&self.inner.state));
        self.solution(a)
    }

    #[pyo3(signature = (seed = 0, beta = 1e4, t_max = 500, weighting = "pseudocode"))]
    fn associate_gibbs(
        &self,
        py: Python<'_>,
        seed: u64,
        beta: f64,
        t_max: usize,
        weighting: &str,
    ) -> PyResult<Solution> {
        let options = GibbsOptions {
            beta,
            t_max,
            weighting: parse::<GibbsWeighting>("weighting", weighting)?,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = py
            .detach(|| associate_gibbs(&self.inner.state, &options, &mut rng))
            .map_err(to_py)?;
        Ok(self.solution(a))
    }

    fn associate_exhaustive(&self, py: Python<'_>) -> PyResult<Solution> {
        let a = py
            .detach(|| associate_exhaustive(&self.inner.state))
            .map_err(to_py)?;
        Ok(self.solution(a))
    }

    #[pyo3(signature = (seed = 0))]
    fn associate_random(&self, seed: u64) -> PyResult<Vec<bool>> {
        associate_random(self.n_users(), &mut ChaCha8Rng::seed_from_u64(seed)).map_err(to_py)
    }

    /// Runs the configured solver exactly as the experiment harness does.
    fn run(&self, py: Python<'_>) -> PyResult<Solution> {
        let r = py
            .detach(|| harness::run_trial(&self.cfg, self.trial_index))
            .map_err(to_py)?;
        Ok(Solution {
            b: r.b,
            sum_rate: r.sum_rate,
            iterations: r.iterations,
            changes: r.changes,
            converged: r.converged,
            sum_rate_trace: r.trace.sum_rates,
        })
    }
}

impl Trial {
    fn check(&self, b: &[bool]) -> PyResult<()> {
        if b.len() != self.n_users() {
            return Err(PyValueError::new_err(format!(
                "association vector has {} entries for {} users",
                b.len(),
                self.n_users()
            )));
        }
        Ok(())
    }
}

/// Aggregated results of an experiment.
#[pyclass(frozen)]
struct Report {
    inner: ExperimentReport,
}

#[pymethods]
impl Report {
    /// One dict per curve and sweep point.
    fn rows<'py>(&self, py: Python<'py>) -> PyResult<Vec<Bound<'py, PyDict>>> {
        self.inner
            .rows
            .iter()
            .map(|r| {
                let d = PyDict::new(py);
                d.set_item("sweep_param", &r.sweep_param)?;
                d.set_item("sweep_value", r.sweep_value)?;
                d.set_item("system", r.series.system.name())?;
                d.set_item("solver", r.series.solver_label())?;
                d.set_item("clustering", r.series.clustering.name())?;
                d.set_item("n_users", r.n_users)?;
                d.set_item("mean_sum_rate_bps", r.mean_sum_rate)?;
                d.set_item("trials", r.trials())?;
                d.set_item("mean_iterations", r.mean_iterations)?;
                d.set_item("mean_changes", r.mean_changes)?;
                Ok(d)
            })
            .collect()
    }

    /// `(system, solver, clustering, n_users, [(rate, fraction), ...])` per curve.
    #[allow(clippy::type_complexity)]
    fn cdfs(&self) -> Vec<(String, String, String, usize, Vec<(f64, f64)>)> {
        self.inner
            .cdfs
            .iter()
            .map(|c| {
                (
                    c.series.system.name().to_string(),
                    c.series.solver_label().to_string(),
                    c.series.clustering.name().to_string(),
                    c.n_users,
                    c.points.clone(),
                )
            })
            .collect()
    }

    fn sweep_csv(&self) -> PyResult<String> {
        let mut buf = Vec::new();
        harness::write_sweep_csv(&self.inner, &mut buf).map_err(|e| PyOSError::new_err(e.to_string()))?;
        Ok(String::from_utf8(buf).expect("CSV is ASCII"))
    }

    /// Writes the sweep CSV (and `<stem>_cdf.csv` if present); returns the paths.
    fn write(&self, path: PathBuf) -> PyResult<Vec<PathBuf>> {
        harness::write_report(&self.inner, &path).map_err(to_py)
    }
}

/// Experiment built from a TOML config and/or a figure preset.
#[pyclass]
struct Experiment {
    cfg: ExperimentConfig,
}

#[pymethods]
impl Experiment {
    #[new]
    #[pyo3(signature = (toml = "", preset = None, trials = None, seed = None))]
    fn new(toml: &str, preset: Option<&str>, trials: Option<usize>, seed: Option<u64>) -> PyResult<Self> {
        let mut cfg = ExperimentConfig::from_toml_str(toml).map_err(to_py)?;
        if let Some(p) = preset {
            p.parse::<Preset>().map_err(to_py)?.apply(&mut cfg);
        }
        if let Some(t) = trials {
            cfg.trials = t;
        }
        if let Some(s) = seed {
            cfg.seed = s;
        }
        cfg.validate().map_err(to_py)?;
        Ok(Experiment { cfg })
    }

    #[staticmethod]
    fn from_file(path: PathBuf) -> PyResult<Self> {
        Ok(Experiment {
            cfg: ExperimentConfig::from_path(&path).map_err(to_py)?,
        })
    }

    #[getter]
    fn trials(&self) -> usize {
        self.cfg.trials
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.cfg.seed
    }

    fn run(&self, py: Python<'_>) -> PyResult<Report> {
        let inner = py.detach(|| harness::run_experiment(&self.cfg)).map_err(to_py)?;
        Ok(Report { inner })
    }
}

#[pymodule]
fn cfmimo_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(lambertian_order, m)?)?;
    m.add_function(wrap_pyfunction!(concentrator_gain, m)?)?;
    m.add_function(wrap_pyfunction!(vlc_channel_gain, m)?)?;
    m.add_function(wrap_pyfunction!(path_loss_db, m)?)?;
    m.add_function(wrap_pyfunction!(deploy_aps, m)?)?;
    m.add_function(wrap_pyfunction!(compute_cdf, m)?)?;
    m.add_class::<Trial>()?;
    m.add_class::<Solution>()?;
    m.add_class::<Experiment>()?;
    m.add_class::<Report>()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_snake_case_names() {
        assert_eq!(parse::<System>("system", "vlc_only").unwrap(), System::VlcOnly);
        assert_eq!(parse::<ClusteringMode>("clustering", "a2").unwrap(), ClusteringMode::A2);
        assert_eq!(
            parse::<NetworkScope>("network_scope", "associated").unwrap(),
            NetworkScope::Associated
        );
        assert!(parse::<Solver>("solver", "annealing").is_err());
    }
}

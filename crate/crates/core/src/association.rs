//! User association between the VLC and RF networks.
//!
//! `b[j] == true` puts user `j` on VLC, `false` on RF. All solvers work
//! against an [`Objective`], which for a real trial is the [`HybridState`]
//! with precoders and powers fixed.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rates::HybridState;

/// Everything a solver needs for one trial.
pub type AssociationContext = HybridState;

/// Largest user count accepted by [`associate_exhaustive`].
pub const EXHAUSTIVE_LIMIT: usize = 20;

/// Sum-rate objective over association vectors.
pub trait Objective: Sync {
    fn n_users(&self) -> usize;
    fn sum_rate(&self, b: &[bool]) -> f64;
    fn user_rates(&self, b: &[bool]) -> Vec<f64>;
}

impl Objective for HybridState {
    fn n_users(&self) -> usize {
        HybridState::n_users(self)
    }

    fn sum_rate(&self, b: &[bool]) -> f64 {
        HybridState::sum_rate(self, b)
    }

    fn user_rates(&self, b: &[bool]) -> Vec<f64> {
        self.evaluate(b).per_user_rate
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SolveTrace {
    /// Gibbs: sampling iterations. Iterative: sweeps over all users.
    pub iterations: usize,
    /// Times the association vector actually changed.
    pub changes: usize,
    /// Gibbs: sum-rate of the starting vector then of each sample.
    /// Iterative: starting sum-rate then the value after each accepted flip.
    pub sum_rates: Vec<f64>,
    /// Objective evaluations spent.
    pub evaluations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Association {
    pub b: Vec<bool>,
    pub trace: SolveTrace,
}

/// How the Gibbs sampler turns candidate sum-rates into probabilities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GibbsWeighting {
    /// Min-max normalise, divide by the total, square.
    #[default]
    Pseudocode,
    /// `exp(-β' / R)` with `β' = β · R_initial`.
    Exponential,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GibbsOptions {
    pub beta: f64,
    pub t_max: usize,
    pub weighting: GibbsWeighting,
}

impl Default for GibbsOptions {
    fn default() -> Self {
        GibbsOptions {
            beta: 1e4,
            t_max: 500,
            weighting: GibbsWeighting::Pseudocode,
        }
    }
}

/// I.i.d. fair bits.
pub fn associate_random<R: Rng + ?Sized>(n_users: usize, rng: &mut R) -> Result<Vec<bool>> {
    if n_users == 0 {
        return Err(Error::InvalidParameter("n_users must be at least 1".into()));
    }
    Ok((0..n_users).map(|_| rng.random::<bool>()).collect())
}

/// Sampling weights over the candidate set under the pseudocode transform.
pub fn pseudocode_weights(rates: &[f64]) -> Vec<f64> {
    let (min, max) = rates
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &r| {
            (lo.min(r), hi.max(r))
        });
    let spread = max - min;
    if !(spread > 0.0) {
        return vec![1.0 / rates.len() as f64; rates.len()];
    }
    let normalized: Vec<f64> = rates.iter().map(|r| (r - min) / spread).collect();
    let total: f64 = normalized.iter().sum();
    let squared: Vec<f64> = normalized.iter().map(|x| (x / total).powi(2)).collect();
    let mass: f64 = squared.iter().sum();
    squared.into_iter().map(|x| x / mass).collect()
}

/// Boltzmann weights `exp(-β / R)` over the candidate set.
pub fn exponential_weights(rates: &[f64], beta: f64) -> Vec<f64> {
    let log_w: Vec<f64> = rates
        .iter()
        .map(|&r| if r > 0.0 { -beta / r } else { f64::NEG_INFINITY })
        .collect();
    let top = log_w.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if top == f64::NEG_INFINITY {
        return vec![1.0 / rates.len() as f64; rates.len()];
    }
    let w: Vec<f64> = log_w.iter().map(|l| (l - top).exp()).collect();
    let total: f64 = w.iter().sum();
    w.into_iter().map(|x| x / total).collect()
}

/// Gibbs-sampling association.
///
/// Each iteration scores the incumbent and its `N_u` single-flip neighbours,
/// samples the next vector from the weighted candidates, and stops as soon
/// as the incumbent itself is drawn. If `t_max` is reached first, the best
/// sampled vector is returned with `converged == false`.
pub fn associate_gibbs<O, R>(ctx: &O, options: &GibbsOptions, rng: &mut R) -> Result<Association>
where
    O: Objective + ?Sized,
    R: Rng + ?Sized,
{
    if options.t_max == 0 {
        return Err(Error::InvalidParameter("t_max must be at least 1".into()));
    }
    if !(options.beta > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "beta must be positive, got {}",
            options.beta
        )));
    }
    let n = ctx.n_users();
    let mut current = associate_random(n, rng)?;
    let mut current_rate = ctx.sum_rate(&current);
    let mut trace = SolveTrace {
        sum_rates: vec![current_rate],
        evaluations: 1,
        ..SolveTrace::default()
    };
    let mut best = (current.clone(), current_rate);
    let beta = {
        let scale = if current_rate > 0.0 { current_rate } else { 1.0 };
        options.beta * scale
    };

    while trace.iterations < options.t_max && !trace.converged {
        trace.iterations += 1;
        let rates: Vec<f64> = (0..=n)
            .map(|m| {
                if m == 0 {
                    current_rate
                } else {
                    let mut cand = current.clone();
                    cand[m - 1] = !cand[m - 1];
                    ctx.sum_rate(&cand)
                }
            })
            .collect();
        trace.evaluations += n;

        let weights = match options.weighting {
            GibbsWeighting::Pseudocode => pseudocode_weights(&rates),
            GibbsWeighting::Exponential => exponential_weights(&rates, beta),
        };
        let pick = WeightedIndex::new(&weights)
            .map_err(|e| Error::InvalidParameter(format!("sampling weights: {e}")))?
            .sample(rng);
        trace.sum_rates.push(rates[pick]);

        if pick == 0 {
            trace.converged = true;
        } else {
            current[pick - 1] = !current[pick - 1];
            current_rate = rates[pick];
            trace.changes += 1;
            if current_rate > best.1 {
                best = (current.clone(), current_rate);
            }
        }
    }

    let b = if trace.converged { current } else { best.0 };
    Ok(Association { b, trace })
}

/// Iterative switching association.
///
/// Starts with everyone on VLC. Each sweep visits users in ascending order of
/// their current rate (ties by index), flips each one, and keeps the flip only
/// if the sum-rate strictly increases. Stops after a sweep with no accepted
/// flips, so the result is a single-flip local optimum.
pub fn associate_iterative<O: Objective + ?Sized>(ctx: &O) -> Association {
    let n = ctx.n_users();
    let mut b = vec![true; n];
    let mut best = ctx.sum_rate(&b);
    let mut trace = SolveTrace {
        sum_rates: vec![best],
        evaluations: 1,
        ..SolveTrace::default()
    };

    loop {
        trace.iterations += 1;
        let rates = ctx.user_rates(&b);
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&x, &y| rates[x].total_cmp(&rates[y]).then(x.cmp(&y)));

        let mut accepted = 0;
        for j in order {
            b[j] = !b[j];
            let candidate = ctx.sum_rate(&b);
            trace.evaluations += 1;
            if candidate > best {
                best = candidate;
                accepted += 1;
                trace.sum_rates.push(best);
            } else {
                b[j] = !b[j];
            }
        }
        trace.changes += accepted;
        if accepted == 0 {
            break;
        }
    }
    trace.converged = true;
    Association { b, trace }
}

/// Bits of `index` read little-endian: bit `j` is user `j`.
pub fn bits_of(index: u64, n_users: usize) -> Vec<bool> {
    (0..n_users).map(|j| (index >> j) & 1 == 1).collect()
}

/// Global optimum by enumerating all `2^N_u` vectors. Ties go to the smallest
/// vector read as a little-endian integer.
pub fn associate_exhaustive<O: Objective + ?Sized>(ctx: &O) -> Result<Association> {
    let n = ctx.n_users();
    if n > EXHAUSTIVE_LIMIT {
        return Err(Error::TooManyUsers {
            n_users: n,
            limit: EXHAUSTIVE_LIMIT,
        });
    }
    let count = 1u64 << n;
    let (rate, index) = (0..count)
        .into_par_iter()
        .map(|u| (ctx.sum_rate(&bits_of(u, n)), u))
        .reduce(
            || (f64::NEG_INFINITY, u64::MAX),
            |a, b| {
                if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
                    b
                } else {
                    a
                }
            },
        );
    Ok(Association {
        b: bits_of(index, n),
        trace: SolveTrace {
            iterations: 1,
            changes: 0,
            sum_rates: vec![rate],
            evaluations: count as usize,
            converged: true,
        },
    })
}

//! SINR and achievable-rate evaluation for the two networks.

use nalgebra::{ComplexField, DMatrix, Point3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::clustering::{ClusteringMatrix, ClusteringRule};
use crate::error::{Error, Result};
use crate::precoding::{allocate_powers, partial_zf, PowerAllocation};

/// SINRs are clamped here before `log2`.
pub const SINR_CAP: f64 = 1e30;

/// Link-budget constants of one network.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NetworkConfig {
    /// Hz.
    pub bandwidth: f64,
    /// Per-AP power budget ρ_f in W.
    pub ap_power: f64,
    /// σ² = noise PSD × bandwidth, in W.
    pub noise_variance: f64,
    /// Equivalent electro-optical conversion factor ρ; 1 for RF.
    pub conversion_factor: f64,
    /// Multiplier on σ² in the SINR denominator (9 for VLC).
    pub noise_factor: f64,
    /// Pre-log factor of the rate: 1/2 for IM/DD VLC, 1 for RF.
    pub prelog: f64,
}

impl NetworkConfig {
    pub fn vlc(
        bandwidth: f64,
        ap_power: f64,
        noise_psd: f64,
        conversion_factor: f64,
        noise_factor: f64,
    ) -> Result<Self> {
        NetworkConfig {
            bandwidth,
            ap_power,
            noise_variance: noise_psd * bandwidth,
            conversion_factor,
            noise_factor,
            prelog: 0.5,
        }
        .validated()
    }

    pub fn rf(bandwidth: f64, ap_power: f64, noise_psd: f64) -> Result<Self> {
        NetworkConfig {
            bandwidth,
            ap_power,
            noise_variance: noise_psd * bandwidth,
            conversion_factor: 1.0,
            noise_factor: 1.0,
            prelog: 1.0,
        }
        .validated()
    }

    fn validated(self) -> Result<Self> {
        let fields = [
            self.bandwidth,
            self.ap_power,
            self.noise_variance,
            self.conversion_factor,
            self.noise_factor,
        ];
        if fields.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::InvalidParameter(format!(
                "network parameters must be positive and finite: {self:?}"
            )));
        }
        Ok(self)
    }

    /// Default VLC link: 40 MHz, 5 W, 1e-22 W/Hz, ρ = 0.53 · 10.
    pub fn vlc_default() -> Self {
        Self::vlc(40e6, 5.0, 1e-22, 5.3, 9.0).expect("defaults are valid")
    }

    /// Default RF link: 15 MHz, 5 W, 1e-19 W/Hz.
    pub fn rf_default() -> Self {
        Self::rf(15e6, 5.0, 1e-19).expect("defaults are valid")
    }

    /// Rate for a given SINR.
    pub fn rate(&self, sinr: f64) -> f64 {
        self.prelog * self.bandwidth * (1.0 + sinr.min(SINR_CAP)).log2()
    }

    fn amplitude(&self) -> f64 {
        self.conversion_factor * self.ap_power.sqrt()
    }
}

/// `h_j^T A_{d,l} w_l`.
fn effective_gain<T>(h: &DMatrix<T>, w: &DMatrix<T>, a: &ClusteringMatrix, j: usize, l: usize) -> T
where
    T: ComplexField<RealField = f64> + Copy,
{
    let mut acc = T::zero();
    for i in 0..h.ncols() {
        if a.get(l, i) {
            acc += h[(j, i)] * w[(i, l)];
        }
    }
    acc
}

/// SINR of user `j` over one network, where `active[l]` says whether user
/// `l` is assigned to that network. Returns 0 when `j` itself is inactive.
pub fn network_sinr<T>(
    j: usize,
    h: &DMatrix<T>,
    w: &DMatrix<T>,
    a: &ClusteringMatrix,
    active: &[bool],
    powers: &PowerAllocation,
    cfg: &NetworkConfig,
) -> f64
where
    T: ComplexField<RealField = f64> + Copy,
{
    if !active[j] {
        return 0.0;
    }
    let amp = cfg.amplitude();
    let term = |l: usize| {
        (effective_gain(h, w, a, j, l).modulus() * amp * powers.powers[l].sqrt()).powi(2)
    };
    let signal = term(j);
    if signal == 0.0 {
        return 0.0;
    }
    let interference: f64 = (0..active.len())
        .filter(|&l| l != j && active[l])
        .map(term)
        .sum();
    signal / (interference + cfg.noise_factor * cfg.noise_variance)
}

/// VLC SINR of user `j`; `b[l]` is true for VLC users.
pub fn vlc_sinr(
    j: usize,
    hv: &DMatrix<f64>,
    wv: &DMatrix<f64>,
    av: &ClusteringMatrix,
    b: &[bool],
    pv: &PowerAllocation,
    cfg: &NetworkConfig,
) -> f64 {
    network_sinr(j, hv, wv, av, b, pv, cfg)
}

/// RF SINR of user `j`; RF users are those with `b[l] == false`.
pub fn rf_sinr(
    j: usize,
    hr: &DMatrix<Complex64>,
    wr: &DMatrix<Complex64>,
    ar: &ClusteringMatrix,
    b: &[bool],
    pr: &PowerAllocation,
    cfg: &NetworkConfig,
) -> f64 {
    let rf_users: Vec<bool> = b.iter().map(|x| !x).collect();
    network_sinr(j, hr, wr, ar, &rf_users, pr, cfg)
}

/// Channel, clustering, precoder and powers of one network for one trial,
/// with the pairwise received powers cached so that rates for any
/// association vector cost `O(N_u²)`.
#[derive(Debug, Clone)]
pub struct NetworkState<T: nalgebra::Scalar> {
    pub channel: DMatrix<T>,
    pub clustering: ClusteringMatrix,
    pub precoder: DMatrix<T>,
    pub powers: PowerAllocation,
    pub config: NetworkConfig,
    /// `received[(j, l)] = |ρ √ρ_f h_j^T A_{d,l} w_l √P_l|²`.
    received: DMatrix<f64>,
}

impl<T> NetworkState<T>
where
    T: ComplexField<RealField = f64> + Copy,
{
    pub fn new(channel: DMatrix<T>, clustering: ClusteringMatrix, config: NetworkConfig) -> Result<Self> {
        let precoder = partial_zf(&channel, &clustering)?;
        let powers = allocate_powers(&precoder);
        let mut state = NetworkState {
            channel,
            clustering,
            precoder,
            powers,
            config,
            received: DMatrix::zeros(0, 0),
        };
        state.refresh_received();
        Ok(state)
    }

    /// Swaps the clustering and recomputes the precoder and powers.
    pub fn set_clustering(&mut self, clustering: ClusteringMatrix) -> Result<()> {
        self.precoder = partial_zf(&self.channel, &clustering)?;
        self.powers = allocate_powers(&self.precoder);
        self.clustering = clustering;
        self.refresh_received();
        Ok(())
    }

    fn refresh_received(&mut self) {
        let n = self.channel.nrows();
        let amp = self.config.amplitude();
        self.received = DMatrix::from_fn(n, n, |j, l| {
            let g = effective_gain(&self.channel, &self.precoder, &self.clustering, j, l);
            (g.modulus() * amp * self.powers.powers[l].sqrt()).powi(2)
        });
    }

    pub fn n_users(&self) -> usize {
        self.channel.nrows()
    }

    pub fn n_aps(&self) -> usize {
        self.channel.ncols()
    }

    pub fn received_power(&self, j: usize, l: usize) -> f64 {
        self.received[(j, l)]
    }

    /// SINR of user `j` given the set of users on this network.
    pub fn sinr(&self, j: usize, active: &[bool]) -> f64 {
        if !active[j] {
            return 0.0;
        }
        let signal = self.received[(j, j)];
        if signal == 0.0 {
            return 0.0;
        }
        let interference: f64 = (0..active.len())
            .filter(|&l| l != j && active[l])
            .map(|l| self.received[(j, l)])
            .sum();
        signal / (interference + self.config.noise_factor * self.config.noise_variance)
    }
}

/// Per-user outcome of one association vector.
#[derive(Debug, Clone, PartialEq)]
pub struct RateReport {
    /// `R_j` in bit/s.
    pub per_user_rate: Vec<f64>,
    /// SINR on the network the user is assigned to.
    pub per_user_sinr: Vec<f64>,
    /// Copy of `b`: true for VLC.
    pub network_of_user: Vec<bool>,
    /// `R_j^(v)` and `R_j^(r)` before combining.
    pub vlc_rate: Vec<f64>,
    pub rf_rate: Vec<f64>,
    pub sum_rate: f64,
}

/// Users a network's clustering and precoder are built over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NetworkScope {
    /// Every user, once per trial; association only gates the rate terms.
    #[default]
    AllUsers,
    /// Only the users currently associated with the network. Clustering,
    /// precoders and powers are rebuilt for every association vector.
    Associated,
}

/// Geometry and rules needed to rebuild both networks for a given `b`.
#[derive(Debug, Clone)]
pub struct Rebuild {
    pub users: Vec<Point3<f64>>,
    pub vlc_aps: Vec<Point3<f64>>,
    pub rf_aps: Vec<Point3<f64>>,
    pub vlc_rule: ClusteringRule,
    pub rf_rule: ClusteringRule,
}

/// Both networks of one trial.
#[derive(Debug, Clone)]
pub struct HybridState {
    pub vlc: NetworkState<f64>,
    pub rf: NetworkState<Complex64>,
    rebuild: Option<Rebuild>,
}

fn evaluate_pair(vlc: &NetworkState<f64>, rf: &NetworkState<Complex64>, b: &[bool]) -> RateReport {
    let n = vlc.n_users();
    assert_eq!(b.len(), n, "association vector length");
    let on_rf: Vec<bool> = b.iter().map(|x| !x).collect();
    let mut report = RateReport {
        per_user_rate: Vec::with_capacity(n),
        per_user_sinr: Vec::with_capacity(n),
        network_of_user: b.to_vec(),
        vlc_rate: Vec::with_capacity(n),
        rf_rate: Vec::with_capacity(n),
        sum_rate: 0.0,
    };
    for j in 0..n {
        let sv = vlc.sinr(j, b);
        let sr = rf.sinr(j, &on_rf);
        let rv = if b[j] { vlc.config.rate(sv) } else { 0.0 };
        let rr = if b[j] { 0.0 } else { rf.config.rate(sr) };
        report.vlc_rate.push(rv);
        report.rf_rate.push(rr);
        report.per_user_sinr.push(if b[j] { sv } else { sr });
        report.per_user_rate.push(rv + rr);
    }
    report.sum_rate = report.per_user_rate.iter().sum();
    report
}

impl HybridState {
    pub fn new(vlc: NetworkState<f64>, rf: NetworkState<Complex64>) -> Result<Self> {
        if vlc.n_users() != rf.n_users() {
            return Err(Error::InvalidParameter(format!(
                "VLC has {} users but RF has {}",
                vlc.n_users(),
                rf.n_users()
            )));
        }
        Ok(HybridState {
            vlc,
            rf,
            rebuild: None,
        })
    }

    /// Switches to [`NetworkScope::Associated`]: every evaluation rebuilds
    /// both networks over their own users.
    pub fn with_rebuild(mut self, rebuild: Rebuild) -> Result<Self> {
        let n = self.n_users();
        if rebuild.users.len() != n
            || rebuild.vlc_aps.len() != self.vlc.n_aps()
            || rebuild.rf_aps.len() != self.rf.n_aps()
        {
            return Err(Error::InvalidParameter(
                "rebuild geometry does not match the channel matrices".into(),
            ));
        }
        let all = vec![true; n];
        rebuild.vlc_rule.apply_subset(&rebuild.users, &rebuild.vlc_aps, &all)?;
        rebuild.rf_rule.apply_subset(&rebuild.users, &rebuild.rf_aps, &all)?;
        self.rebuild = Some(rebuild);
        Ok(self)
    }

    pub fn scope(&self) -> NetworkScope {
        match self.rebuild {
            Some(_) => NetworkScope::Associated,
            None => NetworkScope::AllUsers,
        }
    }

    pub fn n_users(&self) -> usize {
        self.vlc.n_users()
    }

    /// Both networks rebuilt over the users `b` assigns to them.
    pub fn networks_for(&self, b: &[bool]) -> Option<(NetworkState<f64>, NetworkState<Complex64>)> {
        let r = self.rebuild.as_ref()?;
        let on_rf: Vec<bool> = b.iter().map(|x| !x).collect();
        // Rules and shapes were checked in `with_rebuild`, and the channels
        // in `NetworkState::new`, so nothing below can fail.
        let av = r
            .vlc_rule
            .apply_subset(&r.users, &r.vlc_aps, b)
            .expect("rule validated");
        let ar = r
            .rf_rule
            .apply_subset(&r.users, &r.rf_aps, &on_rf)
            .expect("rule validated");
        let vlc = NetworkState::new(self.vlc.channel.clone(), av, self.vlc.config).expect("validated");
        let rf = NetworkState::new(self.rf.channel.clone(), ar, self.rf.config).expect("validated");
        Some((vlc, rf))
    }

    /// `R_j = b_j R_j^(v) + (1 - b_j) R_j^(r)` for every user.
    pub fn evaluate(&self, b: &[bool]) -> RateReport {
        match self.networks_for(b) {
            Some((vlc, rf)) => evaluate_pair(&vlc, &rf, b),
            None => evaluate_pair(&self.vlc, &self.rf, b),
        }
    }

    pub fn user_rate(&self, j: usize, b: &[bool]) -> f64 {
        if self.rebuild.is_some() {
            return self.evaluate(b).per_user_rate[j];
        }
        if b[j] {
            self.vlc.config.rate(self.vlc.sinr(j, b))
        } else {
            let on_rf: Vec<bool> = b.iter().map(|x| !x).collect();
            self.rf.config.rate(self.rf.sinr(j, &on_rf))
        }
    }

    pub fn sum_rate(&self, b: &[bool]) -> f64 {
        self.evaluate(b).sum_rate
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{build_channel_matrices, RfParams, VlcParams};
    use crate::clustering::{cluster_full, cluster_top_n};
    use crate::scenario::{Room, Scenario};
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn hybrid(n_users: usize, blockage: f64, seed: u64) -> HybridState {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sc = Scenario::generate(Room::default(), 16, 9, n_users, blockage, &mut rng).unwrap();
        let ch = build_channel_matrices(&sc, &VlcParams::default(), &RfParams::default(), &mut rng)
            .unwrap();
        HybridState::new(
            NetworkState::new(ch.hv, cluster_full(n_users, 16), NetworkConfig::vlc_default()).unwrap(),
            NetworkState::new(ch.hr, cluster_full(n_users, 9), NetworkConfig::rf_default()).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn default_noise_variances() {
        assert_relative_eq!(NetworkConfig::vlc_default().noise_variance, 4e-15, max_relative = 1e-12);
        assert_relative_eq!(NetworkConfig::rf_default().noise_variance, 1.5e-12, max_relative = 1e-12);
    }

    #[test]
    fn single_vlc_user_sinr() {
        let h = DMatrix::from_element(1, 1, 2e-5);
        let a = cluster_full(1, 1);
        let w = partial_zf(&h, &a).unwrap();
        let p = PowerAllocation { powers: vec![1.0] };
        let cfg = NetworkConfig::vlc_default();
        let s = vlc_sinr(0, &h, &w, &a, &[true], &p, &cfg);
        // 5.3² · 5 / (9 · 4e-15)
        assert_relative_eq!(s, 3.901_388_888_888_889e15, max_relative = 1e-9);
        let s_blocked = vlc_sinr(0, &DMatrix::zeros(1, 1), &w, &a, &[true], &p, &cfg);
        assert_eq!(s_blocked, 0.0);
    }

    #[test]
    fn single_rf_user_sinr() {
        let h = DMatrix::from_element(1, 1, Complex64::new(3e-4, -1e-4));
        let a = cluster_full(1, 1);
        let w = partial_zf(&h, &a).unwrap();
        let p = PowerAllocation { powers: vec![1.0] };
        let cfg = NetworkConfig::rf_default();
        assert_relative_eq!(
            rf_sinr(0, &h, &w, &a, &[false], &p, &cfg),
            5.0 / 1.5e-12,
            max_relative = 1e-9
        );
        assert_eq!(rf_sinr(0, &h, &w, &a, &[true], &p, &cfg), 0.0);
        let zero = PowerAllocation { powers: vec![0.0] };
        assert_eq!(rf_sinr(0, &h, &w, &a, &[false], &zero, &cfg), 0.0);
    }

    #[test]
    fn zf_interference_negligible() {
        let h = DMatrix::from_row_slice(2, 3, &[2.0e-5, 0.4e-5, 0.1e-5, 0.3e-5, 1.7e-5, 0.9e-5]);
        let a = cluster_full(2, 3);
        let w = partial_zf(&h, &a).unwrap();
        let p = allocate_powers(&w);
        let cfg = NetworkConfig::vlc_default();
        let amp2 = cfg.conversion_factor.powi(2) * cfg.ap_power;
        let signal = (effective_gain(&h, &w, &a, 0, 0) * p.powers[0].sqrt()).powi(2) * amp2;
        let leak = (effective_gain(&h, &w, &a, 0, 1) * p.powers[1].sqrt()).powi(2) * amp2;
        assert!(leak < 1e-16 * signal);
    }

    #[test]
    fn rate_examples() {
        let vlc = NetworkConfig::vlc_default();
        let rf = NetworkConfig::rf_default();
        assert_eq!(vlc.rate(0.0), 0.0);
        assert_relative_eq!(vlc.rate(3.0), 40e6, max_relative = 1e-15);
        assert_relative_eq!(rf.rate(1.0), 15e6, max_relative = 1e-15);
        assert!(vlc.rate(f64::INFINITY).is_finite());
    }

    #[test]
    fn all_blocked_all_vlc_is_zero() {
        let st = hybrid(6, 1.0, 3);
        assert_eq!(st.sum_rate(&[true; 6]), 0.0);
        assert!(st.sum_rate(&[false; 6]) > 0.0);
    }

    #[test]
    fn unclustered_user_gets_zero() {
        let mut st = hybrid(4, 0.0, 5);
        let av = ClusteringMatrix::from_fn(4, 16, |j, _| j != 2);
        let ar = ClusteringMatrix::from_fn(4, 9, |j, _| j != 2);
        st.vlc.set_clustering(av).unwrap();
        st.rf.set_clustering(ar).unwrap();
        for b2 in [true, false] {
            let b = [true, false, b2, true];
            assert_eq!(st.evaluate(&b).per_user_rate[2], 0.0);
        }
    }

    #[test]
    fn cached_path_matches_direct_formula() {
        let mut st = hybrid(8, 0.1, 9);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let sc = Scenario::generate(Room::default(), 16, 9, 8, 0.1, &mut rng).unwrap();
        st.vlc
            .set_clustering(cluster_top_n(&sc.users.positions, &sc.aps.vlc_positions, 3).unwrap())
            .unwrap();
        let b = [true, false, true, true, false, false, true, false];
        let report = st.evaluate(&b);
        for j in 0..8 {
            let direct = if b[j] {
                vlc_sinr(j, &st.vlc.channel, &st.vlc.precoder, &st.vlc.clustering, &b, &st.vlc.powers, &st.vlc.config)
            } else {
                rf_sinr(j, &st.rf.channel, &st.rf.precoder, &st.rf.clustering, &b, &st.rf.powers, &st.rf.config)
            };
            assert_relative_eq!(report.per_user_sinr[j], direct, max_relative = 1e-12);
            assert_relative_eq!(report.per_user_rate[j], st.user_rate(j, &b), max_relative = 1e-12);
        }
    }

    fn rebuilt(n_users: usize, seed: u64, vlc_rule: ClusteringRule, rf_rule: ClusteringRule) -> HybridState {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sc = Scenario::generate(Room::default(), 16, 9, n_users, 0.1, &mut rng).unwrap();
        let ch = build_channel_matrices(&sc, &VlcParams::default(), &RfParams::default(), &mut rng)
            .unwrap();
        let users = sc.users.positions.clone();
        HybridState::new(
            NetworkState::new(
                ch.hv,
                vlc_rule.apply(&users, &sc.aps.vlc_positions).unwrap(),
                NetworkConfig::vlc_default(),
            )
            .unwrap(),
            NetworkState::new(
                ch.hr,
                rf_rule.apply(&users, &sc.aps.rf_positions).unwrap(),
                NetworkConfig::rf_default(),
            )
            .unwrap(),
        )
        .unwrap()
        .with_rebuild(Rebuild {
            users,
            vlc_aps: sc.aps.vlc_positions,
            rf_aps: sc.aps.rf_positions,
            vlc_rule,
            rf_rule,
        })
        .unwrap()
    }

    #[test]
    fn associated_scope_single_network_matches_fixed() {
        // with everyone on one network the rebuilt precoder is the fixed one
        let s = rebuilt(8, 3, ClusteringRule::TopN(3), ClusteringRule::TopN(5));
        assert_eq!(s.scope(), NetworkScope::Associated);
        let fixed = HybridState::new(s.vlc.clone(), s.rf.clone()).unwrap();
        for b in [vec![true; 8], vec![false; 8]] {
            assert_eq!(s.evaluate(&b), fixed.evaluate(&b));
        }
    }

    #[test]
    fn associated_scope_ignores_other_network_users() {
        let s = rebuilt(6, 9, ClusteringRule::Full, ClusteringRule::Full);
        let b = vec![true, true, false, true, false, false];
        let (vlc, rf) = s.networks_for(&b).unwrap();
        for j in 0..6 {
            let on_vlc = b[j];
            assert_eq!(vlc.clustering.row_sum(j) > 0, on_vlc);
            assert_eq!(rf.clustering.row_sum(j) > 0, !on_vlc);
        }
        let r = s.evaluate(&b);
        for j in 0..6 {
            assert!(r.per_user_rate[j] >= 0.0);
            assert_eq!(s.user_rate(j, &b), r.per_user_rate[j]);
        }
    }

    #[test]
    fn rebuild_geometry_must_match() {
        let s = hybrid(4, 0.0, 1);
        let bad = Rebuild {
            users: vec![Point3::origin(); 3],
            vlc_aps: vec![Point3::origin(); 16],
            rf_aps: vec![Point3::origin(); 9],
            vlc_rule: ClusteringRule::Full,
            rf_rule: ClusteringRule::Full,
        };
        assert!(s.with_rebuild(bad).is_err());
    }

    proptest! {
        #[test]
        fn exclusivity_and_sum(bits in prop::collection::vec(any::<bool>(), 7), seed in 0u64..50) {
            let st = hybrid(7, 0.1, seed);
            let r = st.evaluate(&bits);
            for j in 0..7 {
                prop_assert!(r.vlc_rate[j] == 0.0 || r.rf_rate[j] == 0.0);
                prop_assert!(r.per_user_rate[j] >= 0.0);
                if bits[j] {
                    prop_assert_eq!(r.rf_rate[j], 0.0);
                } else {
                    prop_assert_eq!(r.vlc_rate[j], 0.0);
                }
            }
            prop_assert_eq!(r.sum_rate, r.per_user_rate.iter().sum::<f64>());
        }

        #[test]
        fn more_noise_never_helps(bits in prop::collection::vec(any::<bool>(), 6), seed in 0u64..50, factor in 1.0f64..1e3) {
            let st = hybrid(6, 0.1, seed);
            let mut noisy = st.clone();
            noisy.vlc.config.noise_variance *= factor;
            noisy.rf.config.noise_variance *= factor;
            let a = st.evaluate(&bits);
            let b = noisy.evaluate(&bits);
            for j in 0..6 {
                prop_assert!(b.per_user_rate[j] <= a.per_user_rate[j]);
            }
        }

        #[test]
        fn rate_linear_in_bandwidth(sinr in 0.0f64..1e6, scale in 0.1f64..10.0) {
            let cfg = NetworkConfig::rf_default();
            let wider = NetworkConfig { bandwidth: cfg.bandwidth * scale, ..cfg };
            prop_assert!((wider.rate(sinr) - scale * cfg.rate(sinr)).abs() <= 1e-9 * wider.rate(sinr).max(1.0));
        }
    }
}

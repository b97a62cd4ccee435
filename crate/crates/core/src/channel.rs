//! VLC line-of-sight and RF Rician channel models.
//!
//! LEDs point straight down and photodetectors straight up, so the angle of
//! irradiance equals the angle of incidence and both cosines are `dz / d`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, Point3};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scenario::Scenario;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VlcParams {
    /// Photodetector area in m².
    pub pd_area: f64,
    pub half_intensity_angle_deg: f64,
    pub fov_semi_angle_deg: f64,
    pub refractive_index: f64,
    pub optical_filter_gain: f64,
    /// Electrical-to-optical conversion factor.
    pub eo_factor: f64,
    /// Optical-to-electrical conversion factor.
    pub oe_factor: f64,
}

impl Default for VlcParams {
    fn default() -> Self {
        VlcParams {
            pd_area: 1e-4,
            half_intensity_angle_deg: 60.0,
            fov_semi_angle_deg: 60.0,
            refractive_index: 1.5,
            optical_filter_gain: 1.0,
            eo_factor: 0.53,
            oe_factor: 10.0,
        }
    }
}

impl VlcParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if !(self.pd_area > 0.0) {
            return bad(format!("pd_area must be positive, got {}", self.pd_area));
        }
        if !(self.half_intensity_angle_deg > 0.0 && self.half_intensity_angle_deg < 90.0) {
            return bad(format!(
                "half-intensity angle must lie in (0, 90) degrees, got {}",
                self.half_intensity_angle_deg
            ));
        }
        if !(self.fov_semi_angle_deg > 0.0 && self.fov_semi_angle_deg <= 90.0) {
            return bad(format!(
                "FoV semi-angle must lie in (0, 90] degrees, got {}",
                self.fov_semi_angle_deg
            ));
        }
        if !(self.refractive_index >= 1.0) {
            return bad(format!(
                "refractive index must be at least 1, got {}",
                self.refractive_index
            ));
        }
        if !(self.optical_filter_gain > 0.0) {
            return bad(format!(
                "optical filter gain must be positive, got {}",
                self.optical_filter_gain
            ));
        }
        if !(self.eo_factor > 0.0 && self.oe_factor > 0.0) {
            return bad("conversion factors must be positive".into());
        }
        Ok(())
    }

    pub fn half_intensity_angle(&self) -> f64 {
        self.half_intensity_angle_deg.to_radians()
    }

    pub fn fov_semi_angle(&self) -> f64 {
        self.fov_semi_angle_deg.to_radians()
    }

    /// Equivalent conversion factor ρ = ρ_oe · ρ_eo.
    pub fn conversion_factor(&self) -> f64 {
        self.oe_factor * self.eo_factor
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RfParams {
    /// Rician K as a linear power ratio.
    pub rician_k: f64,
    pub ref_loss_db: f64,
    pub ref_distance: f64,
    pub pathloss_exp: f64,
    pub shadow_sigma_db: f64,
}

impl Default for RfParams {
    fn default() -> Self {
        RfParams {
            rician_k: 10.0,
            ref_loss_db: 68.0,
            ref_distance: 1.0,
            pathloss_exp: 1.6,
            shadow_sigma_db: 1.8,
        }
    }
}

impl RfParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.rician_k >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "rician_k must be non-negative, got {}",
                self.rician_k
            )));
        }
        if !(self.ref_distance > 0.0 && self.pathloss_exp > 0.0) {
            return Err(Error::InvalidParameter(
                "ref_distance and pathloss_exp must be positive".into(),
            ));
        }
        if !(self.shadow_sigma_db >= 0.0 && self.shadow_sigma_db.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "shadow_sigma_db must be finite and non-negative, got {}",
                self.shadow_sigma_db
            )));
        }
        if !self.ref_loss_db.is_finite() {
            return Err(Error::NonFinite("ref_loss_db"));
        }
        Ok(())
    }

    /// Amplitude weights of the LoS and scattered components.
    fn rician_weights(&self) -> (f64, f64) {
        if self.rician_k.is_infinite() {
            (1.0, 0.0)
        } else {
            let k = self.rician_k;
            ((k / (k + 1.0)).sqrt(), (1.0 / (k + 1.0)).sqrt())
        }
    }
}

/// Per-trial channel gains. Rows are users, columns are APs.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelMatrices {
    pub hv: DMatrix<f64>,
    pub hr: DMatrix<Complex64>,
}

/// Lambertian emission order `m = -1 / log2(cos θ½)`.
pub fn lambertian_order(half_intensity_angle: f64) -> Result<f64> {
    if !(half_intensity_angle > 0.0 && half_intensity_angle < PI / 2.0) {
        return Err(Error::InvalidParameter(format!(
            "half-intensity angle {half_intensity_angle} rad outside (0, π/2)"
        )));
    }
    let m = -1.0 / half_intensity_angle.cos().log2();
    // cos(π/3) rounds to 0.5000000000000001; snap values a few ulps off an
    // integer so textbook angles give textbook orders.
    let nearest = m.round();
    if (m - nearest).abs() <= 8.0 * f64::EPSILON * m {
        Ok(nearest)
    } else {
        Ok(m)
    }
}

/// Optical concentrator gain: `n² / sin²Θ` inside the field of view, zero
/// outside.
pub fn concentrator_gain(incidence: f64, fov_semi_angle: f64, refractive_index: f64) -> f64 {
    if incidence <= fov_semi_angle {
        let s = fov_semi_angle.sin();
        refractive_index * refractive_index / (s * s)
    } else {
        0.0
    }
}

/// LoS DC gain between a ceiling LED and an upward-facing photodetector.
pub fn vlc_channel_gain(
    user: &Point3<f64>,
    ap: &Point3<f64>,
    blocked: bool,
    params: &VlcParams,
) -> Result<f64> {
    let d = nalgebra::distance(user, ap);
    if d == 0.0 {
        return Err(Error::CoincidentPositions);
    }
    let dz = ap.z - user.z;
    if dz <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "AP at z = {} is not above the receiver at z = {}",
            ap.z, user.z
        )));
    }
    if blocked {
        return Ok(0.0);
    }
    let m = lambertian_order(params.half_intensity_angle())?;
    let cos_angle = (dz / d).min(1.0);
    let incidence = cos_angle.acos();
    let f = concentrator_gain(incidence, params.fov_semi_angle(), params.refractive_index);
    if f == 0.0 {
        return Ok(0.0);
    }
    Ok((m + 1.0) * params.pd_area / (2.0 * PI * d * d)
        * cos_angle.powf(m)
        * params.optical_filter_gain
        * f
        * cos_angle)
}

/// Log-distance path loss in dB with an additive shadowing sample.
pub fn path_loss_db(distance: f64, shadow_db: f64, params: &RfParams) -> Result<f64> {
    if !(distance > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "distance must be positive, got {distance}"
        )));
    }
    Ok(params.ref_loss_db
        + 10.0 * params.pathloss_exp * (distance / params.ref_distance).log10()
        + shadow_db)
}

/// LoS fading component `√0.5 (1 + j)`.
pub fn los_component() -> Complex64 {
    Complex64::new(0.5f64.sqrt(), 0.5f64.sqrt())
}

/// Rician gain for given shadowing and scattering draws.
pub fn rf_gain_from_draws(
    distance: f64,
    shadow_db: f64,
    scatter: Complex64,
    params: &RfParams,
) -> Result<Complex64> {
    let loss = path_loss_db(distance, shadow_db, params)?;
    let amplitude = 10f64.powf(-loss / 10.0).sqrt();
    let (los_w, nlos_w) = params.rician_weights();
    Ok((los_component() * los_w + scatter * nlos_w) * amplitude)
}

/// Draws `h_s ~ CN(0, 1)`.
pub fn sample_scatter<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im) * 0.5f64.sqrt()
}

/// Samples one RF gain: shadowing first, then the scattered component.
pub fn rf_channel_gain<R: Rng + ?Sized>(
    user: &Point3<f64>,
    ap: &Point3<f64>,
    params: &RfParams,
    rng: &mut R,
) -> Result<Complex64> {
    let d = nalgebra::distance(user, ap);
    if d == 0.0 {
        return Err(Error::CoincidentPositions);
    }
    let shadow = Normal::new(0.0, params.shadow_sigma_db)
        .map_err(|e| Error::InvalidParameter(e.to_string()))?
        .sample(rng);
    let scatter = sample_scatter(rng);
    rf_gain_from_draws(d, shadow, scatter, params)
}

/// Builds both gain matrices for a drop. Blocked users get all-zero VLC rows.
pub fn build_channel_matrices<R: Rng + ?Sized>(
    scenario: &Scenario,
    vlc: &VlcParams,
    rf: &RfParams,
    rng: &mut R,
) -> Result<ChannelMatrices> {
    vlc.validate()?;
    rf.validate()?;
    let users = &scenario.users;
    let n_users = users.n_users();
    let vlc_aps = &scenario.aps.vlc_positions;
    let rf_aps = &scenario.aps.rf_positions;

    let mut hv = DMatrix::zeros(n_users, vlc_aps.len());
    for (j, user) in users.positions.iter().enumerate() {
        for (i, ap) in vlc_aps.iter().enumerate() {
            hv[(j, i)] = vlc_channel_gain(user, ap, users.vlc_blocked[j], vlc)?;
        }
    }

    let mut hr = DMatrix::zeros(n_users, rf_aps.len());
    for (j, user) in users.positions.iter().enumerate() {
        for (i, ap) in rf_aps.iter().enumerate() {
            hr[(j, i)] = rf_channel_gain(user, ap, rf, rng)?;
        }
    }

    if hv.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("VLC channel matrix"));
    }
    if hr.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("RF channel matrix"));
    }
    Ok(ChannelMatrices { hv, hr })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::Room;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn lambertian_orders() {
        assert_eq!(lambertian_order(60f64.to_radians()).unwrap(), 1.0);
        assert_relative_eq!(lambertian_order(45f64.to_radians()).unwrap(), 2.0, epsilon = 1e-12);
        // -1/log2(cos 30°), evaluated at 30 digits.
        assert_relative_eq!(
            lambertian_order(30f64.to_radians()).unwrap(),
            4.818_841_679_306_418,
            epsilon = 1e-12
        );
        assert!(lambertian_order(0.0).is_err());
        assert!(lambertian_order(PI / 2.0).is_err());
    }

    #[test]
    fn concentrator() {
        let fov = 60f64.to_radians();
        assert_relative_eq!(concentrator_gain(0.0, fov, 1.5), 3.0, epsilon = 1e-12);
        assert_eq!(concentrator_gain(70f64.to_radians(), fov, 1.5), 0.0);
        assert_relative_eq!(concentrator_gain(45f64.to_radians(), PI / 2.0, 1.0), 1.0);
    }

    #[test]
    fn gain_directly_below() {
        let ap = Point3::new(2.5, 2.5, 3.0);
        let user = Point3::new(2.5, 2.5, 0.85);
        let h = vlc_channel_gain(&user, &ap, false, &VlcParams::default()).unwrap();
        // 2e-4 * 3 / (2π 2.15²), evaluated at 30 digits.
        assert_relative_eq!(h, 2.065_829_439_808_268e-5, max_relative = 1e-12);
        assert_eq!(vlc_channel_gain(&user, &ap, true, &VlcParams::default()).unwrap(), 0.0);
    }

    #[test]
    fn gain_outside_fov() {
        let ap = Point3::new(0.0, 0.0, 3.0);
        // horizontal offset 4 m over a 2.15 m gap is ~61.7°
        let user = Point3::new(4.0, 0.0, 0.85);
        assert_eq!(vlc_channel_gain(&user, &ap, false, &VlcParams::default()).unwrap(), 0.0);
    }

    #[test]
    fn coincident_and_inverted_geometry() {
        let p = Point3::new(1.0, 1.0, 1.0);
        assert!(vlc_channel_gain(&p, &p, false, &VlcParams::default()).is_err());
        let below = Point3::new(1.0, 1.0, 0.5);
        assert!(vlc_channel_gain(&p, &below, false, &VlcParams::default()).is_err());
    }

    #[test]
    fn doubling_distance_quarters_gain() {
        let params = VlcParams::default();
        let ap = Point3::new(0.0, 0.0, 3.0);
        let near = Point3::new(0.5, 0.4, 2.0);
        let far = Point3::new(1.0, 0.8, 1.0);
        let g1 = vlc_channel_gain(&near, &ap, false, &params).unwrap();
        let g2 = vlc_channel_gain(&far, &ap, false, &params).unwrap();
        assert_relative_eq!(g1 / g2, 4.0, epsilon = 1e-12);
    }

    #[test]
    fn path_loss_values() {
        let rf = RfParams::default();
        assert_eq!(path_loss_db(1.0, 0.0, &rf).unwrap(), 68.0);
        assert_relative_eq!(path_loss_db(10.0, 0.0, &rf).unwrap(), 84.0, epsilon = 1e-12);
        assert_relative_eq!(path_loss_db(1.0, 1.8, &rf).unwrap(), 69.8, epsilon = 1e-12);
        assert!(path_loss_db(0.0, 0.0, &rf).is_err());
    }

    #[test]
    fn los_only_limit() {
        let rf = RfParams {
            rician_k: f64::INFINITY,
            shadow_sigma_db: 0.0,
            ..RfParams::default()
        };
        let ap = Point3::new(0.0, 0.0, 1.0);
        let user = Point3::new(0.0, 0.0, 0.0);
        let h = rf_channel_gain(&user, &ap, &rf, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        assert_relative_eq!(h.norm(), 3.981_071_705_534_973e-4, max_relative = 1e-12);
    }

    #[test]
    fn pure_scattering_when_k_is_zero() {
        let rf = RfParams {
            rician_k: 0.0,
            ..RfParams::default()
        };
        let scatter = Complex64::new(0.3, -1.2);
        let h = rf_gain_from_draws(2.0, 0.7, scatter, &rf).unwrap();
        let amp = 10f64.powf(-path_loss_db(2.0, 0.7, &rf).unwrap() / 10.0).sqrt();
        assert_eq!(h, scatter * amp);
    }

    #[test]
    fn rician_second_moment() {
        let rf = RfParams {
            shadow_sigma_db: 0.0,
            ..RfParams::default()
        };
        let ap = Point3::new(0.0, 0.0, 3.0);
        let user = Point3::new(1.0, 2.0, 0.85);
        let d = nalgebra::distance(&user, &ap);
        let expected = 10f64.powf(-path_loss_db(d, 0.0, &rf).unwrap() / 10.0);
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let n = 100_000;
        let mean = (0..n)
            .map(|_| rf_channel_gain(&user, &ap, &rf, &mut rng).unwrap().norm_sqr())
            .sum::<f64>()
            / n as f64;
        assert!((mean / expected - 1.0).abs() < 0.02, "ratio {}", mean / expected);
    }

    #[test]
    fn los_fraction_for_k_10() {
        let (los, nlos) = RfParams::default().rician_weights();
        assert_relative_eq!(los * los, 10.0 / 11.0, epsilon = 1e-15);
        assert_relative_eq!(nlos * nlos, 1.0 / 11.0, epsilon = 1e-15);
    }

    fn scenario(n_users: usize, blockage: f64, seed: u64) -> Scenario {
        Scenario::generate(
            Room::default(),
            16,
            9,
            n_users,
            blockage,
            &mut ChaCha8Rng::seed_from_u64(seed),
        )
        .unwrap()
    }

    #[test]
    fn fully_blocked_scenario_has_zero_vlc() {
        let sc = scenario(12, 1.0, 4);
        let ch = build_channel_matrices(
            &sc,
            &VlcParams::default(),
            &RfParams::default(),
            &mut ChaCha8Rng::seed_from_u64(1),
        )
        .unwrap();
        assert!(ch.hv.iter().all(|v| *v == 0.0));
        assert!(ch.hr.iter().all(|v| v.norm() > 0.0));
    }

    #[test]
    fn matrices_reproducible_and_bounded() {
        let sc = scenario(20, 0.1, 8);
        let build = || {
            build_channel_matrices(
                &sc,
                &VlcParams::default(),
                &RfParams::default(),
                &mut ChaCha8Rng::seed_from_u64(21),
            )
            .unwrap()
        };
        let a = build();
        assert_eq!(a, build());
        assert_eq!(a.hv.shape(), (20, 16));
        assert_eq!(a.hr.shape(), (20, 9));
        assert!(a.hv.iter().all(|v| *v >= 0.0 && *v < 1e-3));
        for (j, blocked) in sc.users.vlc_blocked.iter().enumerate() {
            if *blocked {
                assert!(a.hv.row(j).iter().all(|v| *v == 0.0));
            }
        }
    }

    #[test]
    fn deterministic_without_shadowing() {
        let rf = RfParams {
            shadow_sigma_db: 0.0,
            ..RfParams::default()
        };
        assert_eq!(path_loss_db(3.0, 0.0, &rf).unwrap(), path_loss_db(3.0, 0.0, &rf).unwrap());
    }

    proptest! {
        #[test]
        fn vlc_gain_non_increasing_radially(r in 0.0f64..5.0, step in 0.0f64..2.0, ang in 0.0f64..std::f64::consts::TAU) {
            let params = VlcParams::default();
            let ap = Point3::new(5.0, 5.0, 3.0);
            let at = |rad: f64| Point3::new(5.0 + rad * ang.cos(), 5.0 + rad * ang.sin(), 0.85);
            let g_near = vlc_channel_gain(&at(r), &ap, false, &params).unwrap();
            let g_far = vlc_channel_gain(&at(r + step), &ap, false, &params).unwrap();
            prop_assert!(g_far <= g_near * (1.0 + 1e-12));
            prop_assert!(g_far >= 0.0);
        }
    }
}

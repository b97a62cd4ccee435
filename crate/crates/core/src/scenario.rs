//! Indoor geometry: the room, ceiling AP grids, user drops and the VLC
//! blockage mask.

use nalgebra::Point3;
use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Room {
    pub length: f64,
    pub width: f64,
    pub height: f64,
    pub user_altitude: f64,
}

impl Room {
    pub fn new(length: f64, width: f64, height: f64, user_altitude: f64) -> Result<Self> {
        let room = Room {
            length,
            width,
            height,
            user_altitude,
        };
        room.validate()?;
        Ok(room)
    }

    /// Square room of side `side` with the default 3 m ceiling and 0.85 m
    /// receiver plane.
    pub fn square(side: f64) -> Result<Self> {
        Room::new(side, side, 3.0, 0.85)
    }

    pub fn validate(&self) -> Result<()> {
        let dims = [self.length, self.width, self.height, self.user_altitude];
        if dims.iter().any(|v| !v.is_finite() || *v <= 0.0) {
            return Err(Error::InvalidRoom(format!(
                "all dimensions must be positive, got {self:?}"
            )));
        }
        if self.user_altitude >= self.height {
            return Err(Error::InvalidRoom(format!(
                "user altitude {} must be below the ceiling at {}",
                self.user_altitude, self.height
            )));
        }
        Ok(())
    }

    /// Vertical gap between the ceiling and the receiver plane.
    pub fn vertical_gap(&self) -> f64 {
        self.height - self.user_altitude
    }

    pub fn contains_footprint(&self, p: &Point3<f64>) -> bool {
        (0.0..=self.length).contains(&p.x) && (0.0..=self.width).contains(&p.y)
    }
}

impl Default for Room {
    fn default() -> Self {
        Room {
            length: 10.0,
            width: 10.0,
            height: 3.0,
            user_altitude: 0.85,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ApLayout {
    pub vlc_positions: Vec<Point3<f64>>,
    pub rf_positions: Vec<Point3<f64>>,
}

impl ApLayout {
    pub fn n_vap(&self) -> usize {
        self.vlc_positions.len()
    }

    pub fn n_rap(&self) -> usize {
        self.rf_positions.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UserState {
    pub positions: Vec<Point3<f64>>,
    pub vlc_blocked: Vec<bool>,
}

impl UserState {
    pub fn n_users(&self) -> usize {
        self.positions.len()
    }
}

/// One Monte Carlo drop.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub room: Room,
    pub aps: ApLayout,
    pub users: UserState,
}

impl Scenario {
    /// Deploys the AP grids, drops `n_users` users and samples the blockage
    /// mask, in that order, from `rng`.
    pub fn generate<R: Rng + ?Sized>(
        room: Room,
        n_vap: usize,
        n_rap: usize,
        n_users: usize,
        blockage_rate: f64,
        rng: &mut R,
    ) -> Result<Self> {
        let aps = deploy_aps(&room, n_vap, n_rap)?;
        let positions = place_users(&room, n_users, rng)?;
        let vlc_blocked = sample_blockage(n_users, blockage_rate, rng)?;
        Ok(Scenario {
            room,
            aps,
            users: UserState {
                positions,
                vlc_blocked,
            },
        })
    }
}

fn grid_side(what: &'static str, count: usize) -> Result<usize> {
    let side = (count as f64).sqrt().round() as usize;
    if side * side != count {
        return Err(Error::NonSquareApCount { what, count });
    }
    Ok(side)
}

fn ceiling_grid(room: &Room, side: usize) -> Vec<Point3<f64>> {
    let dx = room.length / side as f64;
    let dy = room.width / side as f64;
    let mut out = Vec::with_capacity(side * side);
    for ix in 0..side {
        for iy in 0..side {
            out.push(Point3::new(
                (ix as f64 + 0.5) * dx,
                (iy as f64 + 0.5) * dy,
                room.height,
            ));
        }
    }
    out
}

/// Places VLC and RF APs at the cell centres of square grids on the ceiling.
///
/// Positions are ordered x-major. A count of zero yields an empty grid, which
/// is how a standalone system disables the other network.
pub fn deploy_aps(room: &Room, n_vap: usize, n_rap: usize) -> Result<ApLayout> {
    room.validate()?;
    let vlc_side = grid_side("n_vap", n_vap)?;
    let rf_side = grid_side("n_rap", n_rap)?;
    Ok(ApLayout {
        vlc_positions: ceiling_grid(room, vlc_side),
        rf_positions: ceiling_grid(room, rf_side),
    })
}

/// Drops users uniformly over the floor at the receiver altitude.
pub fn place_users<R: Rng + ?Sized>(
    room: &Room,
    n_users: usize,
    rng: &mut R,
) -> Result<Vec<Point3<f64>>> {
    room.validate()?;
    if n_users == 0 {
        return Err(Error::InvalidParameter("n_users must be at least 1".into()));
    }
    Ok((0..n_users)
        .map(|_| {
            let x = rng.random_range(0.0..room.length);
            let y = rng.random_range(0.0..room.width);
            Point3::new(x, y, room.user_altitude)
        })
        .collect())
}

/// Marks exactly `round(rate * n_users)` users as VLC-blocked, chosen
/// uniformly without replacement.
pub fn sample_blockage<R: Rng + ?Sized>(
    n_users: usize,
    blockage_rate: f64,
    rng: &mut R,
) -> Result<Vec<bool>> {
    if !(0.0..=1.0).contains(&blockage_rate) {
        return Err(Error::InvalidParameter(format!(
            "blockage rate {blockage_rate} outside [0, 1]"
        )));
    }
    let count = blockage_count(n_users, blockage_rate);
    let mut mask = vec![false; n_users];
    for j in index::sample(rng, n_users, count) {
        mask[j] = true;
    }
    Ok(mask)
}

pub fn blockage_count(n_users: usize, blockage_rate: f64) -> usize {
    ((blockage_rate * n_users as f64).round() as usize).min(n_users)
}

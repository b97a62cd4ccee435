//! User-centric clustering: which APs of a network serve which users.

use nalgebra::{DMatrix, Point3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Binary `N_u × N_ap` serving matrix; entry `(j, i)` is set when AP `i`
/// serves user `j`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ClusteringMatrix {
    n_users: usize,
    n_aps: usize,
    entries: Vec<bool>,
}

impl ClusteringMatrix {
    pub fn from_fn(n_users: usize, n_aps: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut entries = Vec::with_capacity(n_users * n_aps);
        for j in 0..n_users {
            for i in 0..n_aps {
                entries.push(f(j, i));
            }
        }
        ClusteringMatrix {
            n_users,
            n_aps,
            entries,
        }
    }

    pub fn from_rows(rows: &[Vec<bool>]) -> Result<Self> {
        let n_aps = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n_aps) {
            return Err(Error::InvalidParameter("ragged clustering rows".into()));
        }
        Ok(Self::from_fn(rows.len(), n_aps, |j, i| rows[j][i]))
    }

    pub fn n_users(&self) -> usize {
        self.n_users
    }

    pub fn n_aps(&self) -> usize {
        self.n_aps
    }

    pub fn get(&self, user: usize, ap: usize) -> bool {
        self.entries[user * self.n_aps + ap]
    }

    pub fn row(&self, user: usize) -> &[bool] {
        &self.entries[user * self.n_aps..(user + 1) * self.n_aps]
    }

    /// Indices of the APs serving `user`.
    pub fn serving_aps(&self, user: usize) -> Vec<usize> {
        self.row(user)
            .iter()
            .enumerate()
            .filter_map(|(i, a)| a.then_some(i))
            .collect()
    }

    /// Indices of the users served by `ap`.
    pub fn served_users(&self, ap: usize) -> Vec<usize> {
        (0..self.n_users).filter(|&j| self.get(j, ap)).collect()
    }

    pub fn column_sum(&self, ap: usize) -> usize {
        (0..self.n_users).filter(|&j| self.get(j, ap)).count()
    }

    pub fn row_sum(&self, user: usize) -> usize {
        self.row(user).iter().filter(|a| **a).count()
    }

    pub fn rows_overlap(&self, a: usize, b: usize) -> bool {
        self.row(a).iter().zip(self.row(b)).any(|(x, y)| *x && *y)
    }
}

/// Clustering rule applied independently to each network.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClusteringRule {
    /// Every AP serves every user.
    Full,
    /// AP serves users within `d_max` metres.
    Distance(f64),
    /// AP serves its `n_max` nearest users.
    TopN(usize),
}

impl ClusteringRule {
    pub fn apply(&self, users: &[Point3<f64>], aps: &[Point3<f64>]) -> Result<ClusteringMatrix> {
        match *self {
            ClusteringRule::Full => Ok(cluster_full(users.len(), aps.len())),
            ClusteringRule::Distance(d_max) => cluster_distance(users, aps, d_max),
            ClusteringRule::TopN(n_max) => cluster_top_n(users, aps, n_max),
        }
    }

    /// Applies the rule to the users with `active[j]` only. Inactive users
    /// get all-zero rows and do not compete for nearest-N slots.
    pub fn apply_subset(
        &self,
        users: &[Point3<f64>],
        aps: &[Point3<f64>],
        active: &[bool],
    ) -> Result<ClusteringMatrix> {
        if active.len() != users.len() {
            return Err(Error::InvalidParameter(format!(
                "{} activity flags for {} users",
                active.len(),
                users.len()
            )));
        }
        let idx: Vec<usize> = (0..users.len()).filter(|&j| active[j]).collect();
        let sub: Vec<Point3<f64>> = idx.iter().map(|&j| users[j]).collect();
        let a = self.apply(&sub, aps)?;
        let mut row_of = vec![None; users.len()];
        for (r, &j) in idx.iter().enumerate() {
            row_of[j] = Some(r);
        }
        Ok(ClusteringMatrix::from_fn(users.len(), aps.len(), |j, i| {
            row_of[j].is_some_and(|r| a.get(r, i))
        }))
    }
}

/// Distance rule: `a_{j,i} = 1` iff `d_{j,i} <= d_max`.
pub fn cluster_distance(
    users: &[Point3<f64>],
    aps: &[Point3<f64>],
    d_max: f64,
) -> Result<ClusteringMatrix> {
    if !(d_max > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "d_max must be positive, got {d_max}"
        )));
    }
    Ok(ClusteringMatrix::from_fn(users.len(), aps.len(), |j, i| {
        nalgebra::distance(&users[j], &aps[i]) <= d_max
    }))
}

/// Top-N rule: each AP serves its `n_max` nearest users, ties going to the
/// lower user index.
pub fn cluster_top_n(
    users: &[Point3<f64>],
    aps: &[Point3<f64>],
    n_max: usize,
) -> Result<ClusteringMatrix> {
    if n_max == 0 {
        return Err(Error::InvalidParameter("n_max must be at least 1".into()));
    }
    let mut selected = vec![vec![false; aps.len()]; users.len()];
    let mut order: Vec<usize> = (0..users.len()).collect();
    for (i, ap) in aps.iter().enumerate() {
        let dist: Vec<f64> = users.iter().map(|u| nalgebra::distance(u, ap)).collect();
        // stable sort keeps lower indices first among equal distances
        order.sort_by(|&a, &b| dist[a].total_cmp(&dist[b]).then(a.cmp(&b)));
        for &j in order.iter().take(n_max) {
            selected[j][i] = true;
        }
    }
    Ok(ClusteringMatrix::from_fn(users.len(), aps.len(), |j, i| {
        selected[j][i]
    }))
}

pub fn cluster_full(n_users: usize, n_aps: usize) -> ClusteringMatrix {
    ClusteringMatrix::from_fn(n_users, n_aps, |_, _| true)
}

/// Diagonal selector `diag(a_{l,1}, …, a_{l,N_ap})`.
pub fn row_diag(a: &ClusteringMatrix, user: usize) -> Result<DMatrix<f64>> {
    if user >= a.n_users() {
        return Err(Error::IndexOutOfRange {
            index: user,
            len: a.n_users(),
        });
    }
    Ok(DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        a.n_aps(),
        a.row(user).iter().map(|&x| if x { 1.0 } else { 0.0 }),
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{deploy_aps, place_users, Room};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn drop(n: usize, seed: u64) -> (Vec<Point3<f64>>, Vec<Point3<f64>>, Vec<Point3<f64>>) {
        let room = Room::default();
        let aps = deploy_aps(&room, 16, 9).unwrap();
        let users = place_users(&room, n, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        (users, aps.vlc_positions, aps.rf_positions)
    }

    #[test]
    fn subset_excludes_inactive_users() {
        let (users, vlc, _) = drop(6, 4);
        let active = [true, false, true, true, false, true];
        let a = ClusteringRule::TopN(2).apply_subset(&users, &vlc, &active).unwrap();
        for j in [1, 4] {
            assert_eq!(a.row_sum(j), 0);
        }
        for i in 0..16 {
            assert_eq!(a.column_sum(i), 2);
        }
        let full = ClusteringRule::Distance(4.0).apply(&users, &vlc).unwrap();
        let sub = ClusteringRule::Distance(4.0).apply_subset(&users, &vlc, &active).unwrap();
        for j in 0..6 {
            for i in 0..16 {
                assert_eq!(sub.get(j, i), active[j] && full.get(j, i));
            }
        }
        assert!(ClusteringRule::Full.apply_subset(&users, &vlc, &[true]).is_err());
    }

    #[test]
    fn distance_extremes() {
        let (users, vlc, _) = drop(15, 1);
        let diag = (10f64.powi(2) * 2.0 + 3f64.powi(2)).sqrt();
        assert_eq!(cluster_distance(&users, &vlc, diag).unwrap(), cluster_full(15, 16));
        let none = cluster_distance(&users, &vlc, 2.0).unwrap();
        assert!((0..15).all(|j| none.row_sum(j) == 0));
        assert!(cluster_distance(&users, &vlc, 0.0).is_err());
    }

    #[test]
    fn distance_user_under_ap() {
        let users = [Point3::new(2.5, 2.5, 0.85)];
        let aps = [Point3::new(2.5, 2.5, 3.0), Point3::new(9.5, 9.5, 3.0)];
        let a = cluster_distance(&users, &aps, 4.0).unwrap();
        assert!(a.get(0, 0));
        assert!(!a.get(0, 1));
    }

    #[test]
    fn top_n_picks_nearest() {
        let ap = [Point3::new(0.0, 0.0, 3.0)];
        let users = [Point3::new(4.0, 3.0, 0.85), Point3::new(0.0, 0.0, 0.85)];
        let a = cluster_top_n(&users, &ap, 1).unwrap();
        assert_eq!(a.served_users(0), vec![1]);
    }

    #[test]
    fn top_n_ties_to_lower_index() {
        let ap = [Point3::new(0.0, 0.0, 3.0)];
        let users = [
            Point3::new(1.0, 0.0, 0.85),
            Point3::new(0.0, 1.0, 0.85),
            Point3::new(-1.0, 0.0, 0.85),
        ];
        let a = cluster_top_n(&users, &ap, 2).unwrap();
        assert_eq!(a.served_users(0), vec![0, 1]);
    }

    #[test]
    fn top_n_table_config_column_sums() {
        for n in [1, 3, 4, 10, 20] {
            let (users, vlc, rf) = drop(n, n as u64);
            let av = cluster_top_n(&users, &vlc, 3).unwrap();
            let ar = cluster_top_n(&users, &rf, 5).unwrap();
            assert!((0..16).all(|i| av.column_sum(i) == n.min(3)));
            assert!((0..9).all(|i| ar.column_sum(i) == n.min(5)));
        }
    }

    #[test]
    fn full_clustering() {
        let a = cluster_full(2, 3);
        assert!((0..2).all(|j| a.row_sum(j) == 3));
        let (users, vlc, _) = drop(7, 2);
        assert_eq!(cluster_distance(&users, &vlc, f64::INFINITY).unwrap(), cluster_full(7, 16));
        assert_eq!(cluster_top_n(&users, &vlc, 7).unwrap(), cluster_full(7, 16));
    }

    #[test]
    fn diag_selector() {
        assert_eq!(row_diag(&cluster_full(2, 3), 1).unwrap(), DMatrix::identity(3, 3));
        let a = ClusteringMatrix::from_rows(&[vec![true, false, true], vec![false; 3]]).unwrap();
        assert_eq!(
            row_diag(&a, 0).unwrap(),
            DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 0.0, 1.0]))
        );
        assert_eq!(row_diag(&a, 1).unwrap(), DMatrix::zeros(3, 3));
        assert!(row_diag(&a, 2).is_err());
    }

    proptest! {
        #[test]
        fn selector_idempotent(rows in prop::collection::vec(prop::collection::vec(any::<bool>(), 4), 1..6)) {
            let a = ClusteringMatrix::from_rows(&rows).unwrap();
            for l in 0..rows.len() {
                let d = row_diag(&a, l).unwrap();
                prop_assert_eq!(&d * &d, d);
            }
        }

        #[test]
        fn top_n_column_cardinality(n in 1usize..25, n_max in 1usize..30, seed in any::<u64>()) {
            let (users, vlc, _) = drop(n, seed);
            let a = cluster_top_n(&users, &vlc, n_max).unwrap();
            for i in 0..vlc.len() {
                prop_assert_eq!(a.column_sum(i), n.min(n_max));
            }
        }

        #[test]
        fn distance_rule_matches_definition(n in 1usize..25, d_max in 0.5f64..15.0, seed in any::<u64>()) {
            let (users, _, rf) = drop(n, seed);
            let a = cluster_distance(&users, &rf, d_max).unwrap();
            for j in 0..n {
                for i in 0..rf.len() {
                    prop_assert_eq!(a.get(j, i), nalgebra::distance(&users[j], &rf[i]) <= d_max);
                }
            }
        }
    }
}

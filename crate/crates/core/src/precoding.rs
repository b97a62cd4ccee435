//! Clustering-aware partial zero-forcing and equal-power allocation.
//!
//! For user `j` served by the AP set `𝒜_j`, the precoder solves
//!
//! ```text
//! w_j = ( Σ_{l ∈ 𝒮_j} D_j g_l (D_j g_l)^H )^+ D_j g_j
//! ```
//!
//! with `g_l = conj(h_l)` so that the received term `h_k^T w_j` vanishes for
//! `k ≠ j`. Stacking the rows `h_l^T` (restricted to `𝒜_j`) of every
//! `l ∈ 𝒮_j` into `M_j`, the expression reduces to `M_j^+ e_j`, which is what
//! is evaluated here via SVD. For real VLC gains the conjugation is a no-op.

use nalgebra::{ComplexField, DMatrix};

use crate::clustering::ClusteringMatrix;
use crate::error::{Error, Result};

/// Singular values below `σ_max / RANK_RATIO` are treated as zero. This is a
/// 1e12 condition-number cut on the Gram matrix.
pub const RANK_RATIO: f64 = 1e6;

/// Users whose serving sets overlap user `j`'s: `{l : A_{d,l} A_{d,j} ≠ 0}`.
pub fn shared_ap_set(a: &ClusteringMatrix, user: usize) -> Vec<usize> {
    (0..a.n_users())
        .filter(|&l| a.rows_overlap(l, user))
        .collect()
}

/// Moore-Penrose pseudo-inverse with the relative rank cut above.
pub fn pseudo_inverse<T>(m: &DMatrix<T>) -> DMatrix<T>
where
    T: ComplexField<RealField = f64> + Copy,
{
    let (rows, cols) = m.shape();
    if rows == 0 || cols == 0 {
        return DMatrix::zeros(cols, rows);
    }
    let svd = m.clone().svd(true, true);
    let sigma_max = svd.singular_values.max();
    if sigma_max == 0.0 {
        return DMatrix::zeros(cols, rows);
    }
    svd.pseudo_inverse(sigma_max / RANK_RATIO)
        .expect("U and V^T were computed")
}

/// Partial ZF precoder for one network. `h` is `N_u × N_ap`; the result is
/// `N_ap × N_u` with column `j` supported on user `j`'s serving APs.
pub fn partial_zf<T>(h: &DMatrix<T>, a: &ClusteringMatrix) -> Result<DMatrix<T>>
where
    T: ComplexField<RealField = f64> + Copy,
{
    let (n_users, n_aps) = h.shape();
    if a.n_users() != n_users || a.n_aps() != n_aps {
        return Err(Error::InvalidParameter(format!(
            "channel is {n_users}x{n_aps} but clustering is {}x{}",
            a.n_users(),
            a.n_aps()
        )));
    }
    if h.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("channel matrix"));
    }

    let mut w = DMatrix::zeros(n_aps, n_users);
    for j in 0..n_users {
        let serving = a.serving_aps(j);
        if serving.iter().all(|&i| h[(j, i)].is_zero()) {
            continue;
        }
        let shared = shared_ap_set(a, j);
        let own_row = shared
            .iter()
            .position(|&l| l == j)
            .expect("a user with serving APs shares them with itself");
        let m = DMatrix::from_fn(shared.len(), serving.len(), |r, c| h[(shared[r], serving[c])]);
        let pinv = pseudo_inverse(&m);
        for (c, &ap) in serving.iter().enumerate() {
            w[(ap, j)] = pinv[(c, own_row)];
        }
    }
    Ok(w)
}

/// Equal per-user power scaled so the most loaded AP meets its budget.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerAllocation {
    pub powers: Vec<f64>,
}

impl PowerAllocation {
    /// Transmit power of every AP, `p_i = Σ_j |w_{i,j}|² P_j`.
    pub fn ap_loads<T>(&self, w: &DMatrix<T>) -> Vec<f64>
    where
        T: ComplexField<RealField = f64> + Copy,
    {
        w.row_iter()
            .map(|row| {
                row.iter()
                    .zip(&self.powers)
                    .map(|(x, p)| x.modulus_squared() * p)
                    .sum()
            })
            .collect()
    }
}

/// `P_j = 1 / max_i Σ_j |w_{i,j}|²` for every user; all zero when `W = 0`.
pub fn allocate_powers<T>(w: &DMatrix<T>) -> PowerAllocation
where
    T: ComplexField<RealField = f64> + Copy,
{
    let n_users = w.ncols();
    let max_load = w
        .row_iter()
        .map(|row| row.iter().map(|x| x.modulus_squared()).sum::<f64>())
        .fold(0.0, f64::max);
    if max_load == 0.0 {
        return PowerAllocation {
            powers: vec![0.0; n_users],
        };
    }
    // 1/x rounded can leave the busiest AP a few ulps over budget.
    let mut alloc = PowerAllocation {
        powers: vec![1.0 / max_load; n_users],
    };
    while alloc.ap_loads(w).into_iter().any(|l| l > 1.0) {
        let p = alloc.powers[0].next_down();
        alloc.powers.fill(p);
    }
    alloc
}

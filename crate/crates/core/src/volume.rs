//! 2-volume of tall matrices and brute-force dominance oracles.
//!
//! The 2-volume of a `K x r` matrix with `K >= r` is `sqrt(det(AᵀA))`, the
//! product of its singular values. It is always evaluated from the singular
//! values so the condition number is never squared.

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::linalg::{det, singular_values};
use crate::matrix::DenseMatrix;

/// Relative slack absorbed when two computed volumes are compared. Volumes
/// from independent SVDs of equal-volume submatrices differ by a few ulps.
pub const VOLUME_ROUNDING: f64 = 1e-13;

/// Upper bound on the number of subsets [`brute_force_best_rows`] visits.
pub const BRUTE_FORCE_LIMIT: u128 = 1_000_000;

fn check_tall(a: &DenseMatrix) -> Result<()> {
    if a.n_rows() < a.n_cols() {
        return Err(Error::dim(format!("2-volume needs n_rows >= n_cols, got {}x{}", a.n_rows(), a.n_cols())));
    }
    Ok(())
}

pub fn vol2(a: &DenseMatrix) -> Result<f64> {
    check_tall(a)?;
    Ok(singular_values(a).iter().product())
}

/// Natural logarithm of [`vol2`]; `-inf` when the matrix is numerically rank
/// deficient (smallest singular value below `max(K, r) * eps * sigma_max`).
pub fn log_vol2(a: &DenseMatrix) -> Result<f64> {
    check_tall(a)?;
    let sv = singular_values(a);
    let top = sv.first().copied().unwrap_or(0.0);
    let floor = a.n_rows().max(a.n_cols()) as f64 * f64::EPSILON * top;
    if top == 0.0 || sv.iter().any(|&s| s <= floor) {
        return Ok(f64::NEG_INFINITY);
    }
    Ok(sv.iter().map(|s| s.ln()).sum())
}

/// Both sides of the determinant averaging identity
/// `det(AB) = 1/(M-N) * sum_i det(A_{-i} B_{-i})` for `A: N x M`, `B: M x N`,
/// where `A_{-i}` drops column `i` and `B_{-i}` drops row `i`.
pub fn minor_average_sides(a: &DenseMatrix, b: &DenseMatrix) -> Result<(f64, f64)> {
    let (n, m) = a.shape();
    if b.shape() != (m, n) {
        return Err(Error::dim(format!("B must be {m}x{n}, got {:?}", b.shape())));
    }
    if m <= n {
        return Err(Error::dim(format!("need M > N, got N = {n}, M = {m}")));
    }
    let lhs = det(&a.matmul(b)?)?;
    let mut total = 0.0;
    for i in 0..m {
        let keep: Vec<usize> = (0..m).filter(|&t| t != i).collect();
        let a_i = a.select_cols(&keep);
        let b_i = b.select_rows(&keep);
        total += det(&a_i.matmul(&b_i)?)?;
    }
    Ok((lhs, total / (m - n) as f64))
}

/// Brute-force single-swap dominance check in 2-volume: no exchange of one
/// selected row for one unselected row grows the volume beyond `(1 + tol)`
/// times the current one.
pub fn is_dominant_2vol(a: &DenseMatrix, rows: &[usize], tol: f64) -> Result<bool> {
    let n = a.n_rows();
    if rows.len() > n || rows.iter().any(|&i| i >= n) {
        return Err(Error::dim(format!("row set {rows:?} is invalid for {n} rows")));
    }
    let base = vol2(&a.select_rows(rows))?;
    let limit = (1.0 + tol) * base * (1.0 + VOLUME_ROUNDING);
    let mut trial = rows.to_vec();
    for pos in 0..rows.len() {
        for j in (0..n).filter(|j| !rows.contains(j)) {
            trial[pos] = j;
            if vol2(&a.select_rows(&trial))? > limit {
                return Ok(false);
            }
        }
        trial[pos] = rows[pos];
    }
    Ok(true)
}

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    acc
}

/// Exhaustive search for the `k`-row subset of largest 2-volume. Ties go to
/// the lexicographically smallest index set.
pub fn brute_force_best_rows(a: &DenseMatrix, k: usize) -> Result<Vec<usize>> {
    let n = a.n_rows();
    if k < a.n_cols() || k > n {
        return Err(Error::dim(format!("subset size {k} must lie in [{}, {n}]", a.n_cols())));
    }
    let count = binomial(n, k);
    if count > BRUTE_FORCE_LIMIT {
        return Err(Error::CombinatorialLimit { count, limit: BRUTE_FORCE_LIMIT });
    }
    let mut best: Option<(f64, Vec<usize>)> = None;
    for subset in (0..n).combinations(k) {
        let lv = log_vol2(&a.select_rows(&subset))?;
        let better = match &best {
            None => true,
            // an additive margin in log space is a relative one on volumes
            Some((b, _)) => lv > b + 1e-12,
        };
        if better {
            best = Some((lv, subset));
        }
    }
    Ok(best.map(|(_, s)| s).unwrap_or_default())
}

//! Pseudo-skeleton (CUR) approximation from maxvol-selected rows and columns,
//! and maximum-modulus search in low-rank matrices.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{pinv, singular_values, spectral_norm, svd, LowRankFactors, DEFAULT_RCOND};
use crate::matrix::{dot, DenseMatrix};
use crate::maxvol::{maxvol, MaxvolOptions, SelectionResult};
use crate::random::{max_element_factors, Rng64};
use crate::rect_maxvol::{rect_maxvol, RectMaxvolOptions};
use crate::Method;

/// `Ã = [A₁₁; A₂₁] A₁₁† [A₁₁ A₁₂]` stored as its three factors.
#[derive(Debug, Clone)]
pub struct SkeletonApprox {
    pub row_indices: Vec<usize>,
    pub col_indices: Vec<usize>,
    /// Selected columns of `A`, `N x m`.
    pub left_factor: DenseMatrix,
    /// Pseudo-inverse of the `n x m` intersection block, `m x n`.
    pub core: DenseMatrix,
    /// Selected rows of `A`, `n x M`.
    pub right_factor: DenseMatrix,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ApproxError {
    pub frobenius: f64,
    pub spectral: f64,
    pub relative_frobenius: f64,
}

impl SkeletonApprox {
    pub fn approximation(&self) -> DenseMatrix {
        self.left_factor
            .matmul(&self.core)
            .and_then(|lc| lc.matmul(&self.right_factor))
            .expect("factor shapes are consistent by construction")
    }

    pub fn error(&self, a: &DenseMatrix) -> Result<ApproxError> {
        let resid = a.sub(&self.approximation())?;
        let frobenius = resid.frobenius_norm();
        let norm = a.frobenius_norm();
        Ok(ApproxError {
            frobenius,
            spectral: spectral_norm(&resid),
            relative_frobenius: if norm > 0.0 { frobenius / norm } else { frobenius },
        })
    }
}

fn check_indices(indices: &[usize], bound: usize, what: &str) -> Result<()> {
    if indices.is_empty() {
        return Err(Error::dim(format!("no {what} selected")));
    }
    let mut seen = vec![false; bound];
    for &i in indices {
        if i >= bound || std::mem::replace(&mut seen[i], true) {
            return Err(Error::dim(format!("{what} index {i} is out of range or repeated")));
        }
    }
    Ok(())
}

pub fn build_pseudo_skeleton(a: &DenseMatrix, rows: &[usize], cols: &[usize]) -> Result<SkeletonApprox> {
    check_indices(rows, a.n_rows(), "row")?;
    check_indices(cols, a.n_cols(), "column")?;
    let intersection = a.submatrix(rows, cols);
    Ok(SkeletonApprox {
        row_indices: rows.to_vec(),
        col_indices: cols.to_vec(),
        left_factor: a.select_cols(cols),
        core: pinv(&intersection, DEFAULT_RCOND),
        right_factor: a.select_rows(rows),
    })
}

fn run_selection(a: &DenseMatrix, method: Method, tau: f64, min_k: usize) -> Result<SelectionResult> {
    match method {
        Method::Square => maxvol(a, &MaxvolOptions::default()),
        Method::Rect => {
            let (n, r) = a.shape();
            let min_k = min_k.clamp(r, n);
            let max_k = n.min(2 * r + 1).max(min_k);
            let opts = RectMaxvolOptions { tau, min_k: Some(min_k), max_k: Some(max_k), ..Default::default() };
            rect_maxvol(a, &opts)
        }
    }
}

/// Chooses skeleton rows and columns for a rank-`rank` approximation.
///
/// Rows come from (rect_)maxvol on the leading left singular vectors. Columns
/// come from (rect_)maxvol on the transpose of the selected-row submatrix; if
/// that submatrix is numerically rank deficient (more rows than the rank of
/// `A`), its leading right singular vectors stand in for it.
pub fn select_skeleton(a: &DenseMatrix, rank: usize, method: Method, tau: f64) -> Result<(Vec<usize>, Vec<usize>)> {
    let (n, m) = a.shape();
    if rank == 0 || rank > n.min(m) {
        return Err(Error::dim(format!("rank {rank} must lie in 1..={}", n.min(m))));
    }
    let factors = svd(a, Some(rank));
    let rows = run_selection(&factors.u, method, tau, rank)?.row_indices;

    let selected = a.select_rows(&rows);
    let sv = singular_values(&selected);
    let cutoff = DEFAULT_RCOND * sv.first().copied().unwrap_or(0.0);
    let numerical_rank = sv.iter().filter(|&&s| s > cutoff).count();
    let col_basis =
        if numerical_rank == rows.len() { selected.transpose() } else { svd(&selected, Some(numerical_rank)).v };
    let cols = run_selection(&col_basis, method, tau, rows.len())?.row_indices;
    Ok((rows, cols))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MaxElement {
    pub row: usize,
    pub col: usize,
    pub value: f64,
}

/// Entry `(i, j)` of `U diag(sigma) Vᵀ`, given `U diag(sigma)`.
#[inline]
fn entry(scaled_u: &DenseMatrix, v: &DenseMatrix, i: usize, j: usize) -> f64 {
    dot(scaled_u.row(i), v.row(j))
}

fn max_over(scaled_u: &DenseMatrix, v: &DenseMatrix, rows: &[usize], cols: &[usize]) -> MaxElement {
    let mut best = MaxElement { row: rows[0], col: cols[0], value: 0.0 };
    for &i in rows {
        for &j in cols {
            let x = entry(scaled_u, v, i, j);
            let better = x.abs() > best.value.abs() || (x.abs() == best.value.abs() && (i, j) < (best.row, best.col));
            if better {
                best = MaxElement { row: i, col: j, value: x };
            }
        }
    }
    best
}

/// Searches the intersection of maxvol rows of `U` and maxvol rows of `V`
/// for the entry of largest modulus, never forming the full matrix.
pub fn find_max_element(factors: &LowRankFactors, method: Method, tau: f64) -> Result<MaxElement> {
    let rank = factors.rank();
    let rows = run_selection(&factors.u, method, tau, rank)?.row_indices;
    let cols = run_selection(&factors.v, method, tau, rank)?.row_indices;
    Ok(max_over(&factors.scaled_u(), &factors.v, &rows, &cols))
}

/// Full scan of `U diag(sigma) Vᵀ`; the reference answer for
/// [`find_max_element`]. Entries are evaluated exactly as there, so the
/// intersection can never beat the scan through rounding.
pub fn full_scan_max(factors: &LowRankFactors) -> MaxElement {
    let rows: Vec<usize> = (0..factors.u.n_rows()).collect();
    let cols: Vec<usize> = (0..factors.v.n_rows()).collect();
    max_over(&factors.scaled_u(), &factors.v, &rows, &cols)
}

/// One randomized max-element experiment: ratio of the maxvol-found maximum
/// modulus to the true maximum modulus, per requested method.
pub fn max_element_trial(
    rng: &mut Rng64,
    n: usize,
    m: usize,
    rank: usize,
    methods: &[Method],
    tau: f64,
) -> Result<Vec<f64>> {
    let factors = max_element_factors(rng, n, m, rank);
    let truth = full_scan_max(&factors).value.abs();
    methods
        .iter()
        .map(|&method| {
            let found = find_max_element(&factors, method, tau)?.value.abs();
            Ok(if truth > 0.0 { found / truth } else { 1.0 })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::least_squares_min_norm;
    use crate::random::{gaussian_matrix, random_low_rank, rng_from_seed};

    fn rank_one() -> (DenseMatrix, LowRankFactors) {
        let u = DenseMatrix::column_vector(&[1.0, 2.0]).unwrap();
        let v = DenseMatrix::column_vector(&[3.0, 1.0]).unwrap();
        let a = u.matmul(&v.transpose()).unwrap();
        (a, LowRankFactors::new(u, vec![1.0], v).unwrap())
    }

    #[test]
    fn diagonal_selects_everything() {
        let a = DenseMatrix::diag(&[3.0, 2.0, 1.0]);
        let (mut rows, mut cols) = select_skeleton(&a, 3, Method::Square, 1.0).unwrap();
        rows.sort_unstable();
        cols.sort_unstable();
        assert_eq!(rows, vec![0, 1, 2]);
        assert_eq!(cols, vec![0, 1, 2]);
        let sk = build_pseudo_skeleton(&DenseMatrix::identity(3), &rows, &cols).unwrap();
        assert!(sk.approximation().sub(&DenseMatrix::identity(3)).unwrap().max_abs() < 1e-15);
    }

    #[test]
    fn rank_one_cross() {
        let (a, _) = rank_one();
        let (rows, cols) = select_skeleton(&a, 1, Method::Square, 1.0).unwrap();
        assert_eq!((rows.clone(), cols.clone()), (vec![1], vec![0]));
        let sk = build_pseudo_skeleton(&a, &rows, &cols).unwrap();
        assert!(sk.error(&a).unwrap().frobenius <= 1e-12);
    }

    #[test]
    fn rejects_bad_indices() {
        let a = DenseMatrix::identity(3);
        assert!(build_pseudo_skeleton(&a, &[0, 0], &[1]).is_err());
        assert!(build_pseudo_skeleton(&a, &[0], &[3]).is_err());
        assert!(build_pseudo_skeleton(&a, &[], &[1]).is_err());
        assert!(select_skeleton(&a, 4, Method::Square, 1.0).is_err());
    }

    #[test]
    fn exact_rank_recovery() {
        let mut rng = rng_from_seed(41);
        for method in [Method::Square, Method::Rect] {
            for _ in 0..5 {
                let a = random_low_rank(&mut rng, 20, 15, 3);
                let (rows, cols) = select_skeleton(&a, 3, method, 1.0).unwrap();
                let sk = build_pseudo_skeleton(&a, &rows, &cols).unwrap();
                let err = sk.error(&a).unwrap();
                assert!(err.relative_frobenius <= 1e-9, "{method:?}: {err:?}");
            }
        }
    }

    #[test]
    fn approximation_lives_in_selected_spans() {
        let mut rng = rng_from_seed(42);
        let a = random_low_rank(&mut rng, 25, 18, 4).sub(&gaussian_matrix(&mut rng, 25, 18).scale(1e-3)).unwrap();
        let (rows, cols) = select_skeleton(&a, 4, Method::Rect, 1.0).unwrap();
        let sk = build_pseudo_skeleton(&a, &rows, &cols).unwrap();
        let approx = sk.approximation();
        let err = sk.error(&a).unwrap();
        assert!(err.spectral.is_finite() && err.spectral < 1e-1);
        // columns of Ã in span of selected columns, rows in span of selected rows
        let c = a.select_cols(&cols);
        let coeff = least_squares_min_norm(&c, &approx).unwrap();
        assert!(c.matmul(&coeff).unwrap().sub(&approx).unwrap().frobenius_norm() <= 1e-9 * approx.frobenius_norm());
        let r = a.select_rows(&rows);
        let coeff = least_squares_min_norm(&r.transpose(), &approx.transpose()).unwrap();
        let back = r.transpose().matmul(&coeff).unwrap();
        assert!(back.sub(&approx.transpose()).unwrap().frobenius_norm() <= 1e-9 * approx.frobenius_norm());
    }

    #[test]
    fn max_element_examples() {
        let (_, f) = rank_one();
        assert_eq!(find_max_element(&f, Method::Square, 1.0).unwrap(), MaxElement { row: 1, col: 0, value: 6.0 });
        let f = LowRankFactors::new(DenseMatrix::identity(2), vec![5.0, 1.0], DenseMatrix::identity(2)).unwrap();
        assert_eq!(find_max_element(&f, Method::Rect, 1.0).unwrap(), MaxElement { row: 0, col: 0, value: 5.0 });
    }

    #[test]
    fn ratios_never_exceed_one() {
        let mut rng = rng_from_seed(43);
        for _ in 0..20 {
            let ratios = max_element_trial(&mut rng, 80, 60, 4, &[Method::Square, Method::Rect], 1.0).unwrap();
            assert!(ratios.iter().all(|&r| r > 0.0 && r <= 1.0), "{ratios:?}");
        }
        let ratios = max_element_trial(&mut rng, 50, 50, 1, &[Method::Square, Method::Rect], 1.0).unwrap();
        assert_eq!(ratios, vec![1.0, 1.0]);
    }
}

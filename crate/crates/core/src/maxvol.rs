//! Square maxvol: greedy row swaps towards a quasi-dominant `r x r` submatrix.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{lu_top_rows, Lu, DEFAULT_PIVOT_TOL};
use crate::matrix::{norm2, DenseMatrix};

pub const DEFAULT_EPS: f64 = 0.05;

/// How the rows of `C` at the selected indices are filled in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum HatMode {
    /// Unit rows: `C[row_indices[t]] = e_t`.
    Identity,
    /// Rows of the orthoprojector `Â Â†`, i.e. the minimum-norm coefficients.
    Projector,
}

/// Selected rows of a tall matrix `A` together with coefficients `C` such
/// that `A = C Â`, where `Â = A[row_indices]`. Column `t` of `C` belongs to
/// `row_indices[t]`.
#[derive(Debug, Clone)]
pub struct SelectionResult {
    pub row_indices: Vec<usize>,
    pub coefficients: DenseMatrix,
    pub hat_mode: HatMode,
    /// Row swaps performed by the square stage.
    pub iterations: usize,
}

impl SelectionResult {
    pub fn k(&self) -> usize {
        self.row_indices.len()
    }

    /// Largest coefficient in modulus.
    pub fn max_abs_coefficient(&self) -> f64 {
        self.coefficients.max_abs()
    }

    /// Largest Euclidean norm among rows of `C` that are not selected.
    pub fn max_unselected_row_norm(&self) -> f64 {
        let mut selected = vec![false; self.coefficients.n_rows()];
        for &i in &self.row_indices {
            selected[i] = true;
        }
        self.coefficients.rows().zip(&selected).filter(|(_, &s)| !s).fold(0.0_f64, |m, (row, _)| m.max(norm2(row)))
    }

    pub fn basis(&self, a: &DenseMatrix) -> DenseMatrix {
        a.select_rows(&self.row_indices)
    }

    pub fn is_selected(&self, i: usize) -> bool {
        self.row_indices.contains(&i)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct MaxvolOptions {
    pub eps: f64,
    /// Defaults to `10 r` when unset.
    pub max_iters: Option<usize>,
    pub pivot_tol: f64,
}

impl Default for MaxvolOptions {
    fn default() -> Self {
        MaxvolOptions { eps: DEFAULT_EPS, max_iters: None, pivot_tol: DEFAULT_PIVOT_TOL }
    }
}

impl MaxvolOptions {
    pub fn with_eps(eps: f64) -> Self {
        MaxvolOptions { eps, ..Default::default() }
    }
}

/// State after one accepted swap, handed to observers.
#[derive(Debug)]
pub struct SwapStep<'a> {
    pub iteration: usize,
    pub row_indices: &'a [usize],
    pub coefficients: &'a DenseMatrix,
    /// The coefficient that triggered the swap; `|pivot|` is the volume gain.
    pub pivot: f64,
}

pub fn maxvol(a: &DenseMatrix, opts: &MaxvolOptions) -> Result<SelectionResult> {
    maxvol_observed(a, opts, |_| {})
}

/// [`maxvol`] with a callback after every swap.
pub fn maxvol_observed(
    a: &DenseMatrix,
    opts: &MaxvolOptions,
    mut observer: impl FnMut(&SwapStep<'_>),
) -> Result<SelectionResult> {
    let (n, r) = a.shape();
    if opts.eps < 0.0 {
        return Err(Error::InvalidBounds(format!("eps must be non-negative, got {}", opts.eps)));
    }
    let mut rows = lu_top_rows(a, opts.pivot_tol)?;
    let max_iters = opts.max_iters.unwrap_or(10 * r);

    // C = A Â⁻¹, obtained as (Â⁻ᵀ Aᵀ)ᵀ
    let lu = Lu::new(&a.select_rows(&rows).transpose())?;
    let mut c = lu.solve(&a.transpose())?.transpose();
    for (t, &i) in rows.iter().enumerate() {
        let row = c.row_mut(i);
        row.fill(0.0);
        row[t] = 1.0;
    }

    let mut iterations = 0;
    let mut col_j = vec![0.0; n];
    loop {
        let (i, j, pivot) = argmax_abs(&c);
        if pivot.abs() <= 1.0 + opts.eps {
            break;
        }
        if iterations >= max_iters {
            let result =
                SelectionResult { row_indices: rows, coefficients: c, hat_mode: HatMode::Identity, iterations };
            return Err(Error::IterationLimit { max_iters, result: Box::new(result) });
        }
        // C ← C − C[:, j] (C[i, :] − e_jᵀ) / C[i, j]
        for (p, v) in col_j.iter_mut().enumerate() {
            *v = c[(p, j)] / pivot;
        }
        let mut row_i = c.row(i).to_vec();
        row_i[j] -= 1.0;
        for (p, &f) in col_j.iter().enumerate() {
            if f != 0.0 {
                for (x, &y) in c.row_mut(p).iter_mut().zip(&row_i) {
                    *x -= f * y;
                }
            }
        }
        let new_row = c.row_mut(i);
        new_row.fill(0.0);
        new_row[j] = 1.0;
        rows[j] = i;
        iterations += 1;
        observer(&SwapStep { iteration: iterations, row_indices: &rows, coefficients: &c, pivot });
    }
    Ok(SelectionResult { row_indices: rows, coefficients: c, hat_mode: HatMode::Identity, iterations })
}

/// Position and value of the entry of largest modulus; ties go to the
/// smallest row-major index.
fn argmax_abs(c: &DenseMatrix) -> (usize, usize, f64) {
    let mut best = (0, 0, 0.0_f64);
    for (i, row) in c.rows().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            if v.abs() > best.2.abs() {
                best = (i, j, v);
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{gaussian_matrix, rng_from_seed};
    use crate::volume::{is_dominant_2vol, log_vol2};

    fn m(rows: &[&[f64]]) -> DenseMatrix {
        DenseMatrix::from_rows(rows).unwrap()
    }

    fn reconstruction_error(a: &DenseMatrix, sel: &SelectionResult) -> f64 {
        sel.coefficients.matmul(&sel.basis(a)).unwrap().sub(a).unwrap().frobenius_norm()
    }

    #[test]
    fn single_column_picks_largest_entry() {
        let a = m(&[&[1.0], &[2.0], &[-3.0]]);
        let sel = maxvol(&a, &MaxvolOptions::with_eps(0.0)).unwrap();
        assert_eq!(sel.row_indices, vec![2]);
        let expected = [-1.0 / 3.0, -2.0 / 3.0, 1.0];
        for (i, e) in expected.iter().enumerate() {
            assert!((sel.coefficients[(i, 0)] - e).abs() < 1e-15);
        }
    }

    #[test]
    fn identity_over_zeros() {
        let r = 4;
        let a = DenseMatrix::from_fn(9, r, |i, j| if i == j { 1.0 } else { 0.0 });
        let sel = maxvol(&a, &MaxvolOptions::with_eps(0.0)).unwrap();
        let mut rows = sel.row_indices.clone();
        rows.sort_unstable();
        assert_eq!(rows, vec![0, 1, 2, 3]);
        assert_eq!(sel.max_abs_coefficient(), 1.0);
    }

    #[test]
    fn tied_minors() {
        let a = m(&[&[1.0, 0.0], &[0.0, 1.0], &[1.0, 1.0]]);
        let sel = maxvol(&a, &MaxvolOptions::with_eps(0.0)).unwrap();
        assert_eq!(sel.k(), 2);
        let det = crate::linalg::det(&sel.basis(&a)).unwrap();
        assert!((det.abs() - 1.0).abs() < 1e-14);
        assert!((sel.max_abs_coefficient() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn rank_deficient_input() {
        let a = m(&[&[1.0, 2.0], &[2.0, 4.0], &[-1.0, -2.0]]);
        assert!(matches!(maxvol(&a, &MaxvolOptions::default()), Err(Error::RankDeficient { .. })));
    }

    #[test]
    fn iteration_limit_keeps_last_iterate() {
        let mut rng = rng_from_seed(77);
        let a = gaussian_matrix(&mut rng, 200, 10);
        let opts = MaxvolOptions { eps: 0.0, max_iters: Some(0), ..Default::default() };
        match maxvol(&a, &opts) {
            Err(Error::IterationLimit { result, .. }) => {
                assert_eq!(result.iterations, 0);
                assert!(reconstruction_error(&a, &result) <= 1e-8 * a.frobenius_norm());
            }
            other => panic!("expected IterationLimit, got {other:?}"),
        }
    }

    #[test]
    fn contract_on_random_matrices() {
        let mut rng = rng_from_seed(5);
        for eps in [0.0, 0.05] {
            for _ in 0..10 {
                let a = gaussian_matrix(&mut rng, 50, 5);
                let opts = MaxvolOptions { eps, max_iters: Some(1000), ..Default::default() };
                let mut logs = vec![log_vol2(&a.select_rows(&lu_top_rows(&a, 1e-12).unwrap())).unwrap()];
                let sel = maxvol_observed(&a, &opts, |step| {
                    logs.push(log_vol2(&a.select_rows(step.row_indices)).unwrap());
                })
                .unwrap();
                assert!(sel.max_abs_coefficient() <= 1.0 + eps);
                assert!(logs.windows(2).all(|w| w[1] >= w[0]));
                assert!(reconstruction_error(&a, &sel) <= 1e-8 * a.frobenius_norm());
                for (t, &i) in sel.row_indices.iter().enumerate() {
                    let row = sel.coefficients.row(i);
                    assert!(row.iter().enumerate().all(|(s, &v)| v == if s == t { 1.0 } else { 0.0 }));
                }
                assert!(is_dominant_2vol(&a, &sel.row_indices, eps + 1e-12).unwrap());
            }
        }
    }
}

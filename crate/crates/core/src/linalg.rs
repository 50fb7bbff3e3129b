//! Factorizations: LU with partial pivoting (own), SVD and QR (nalgebra).

use nalgebra::{QR, SVD};

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;

/// Default relative pivot threshold for [`lu_top_rows`].
pub const DEFAULT_PIVOT_TOL: f64 = 1e-12;

/// Default singular-value cutoff, relative to the largest singular value.
pub const DEFAULT_RCOND: f64 = 1e-12;

/// Pivot rows chosen by Gaussian elimination with partial (row) pivoting on a
/// tall matrix, in elimination order.
///
/// A column is declared dependent when its best available pivot falls below
/// `pivot_tol` times the largest magnitude that column had before elimination.
pub fn lu_top_rows(a: &DenseMatrix, pivot_tol: f64) -> Result<Vec<usize>> {
    let (n, r) = a.shape();
    if n < r {
        return Err(Error::dim(format!("need at least as many rows as columns, got {n}x{r}")));
    }
    let col_scale: Vec<f64> = (0..r).map(|j| a.rows().fold(0.0_f64, |m, row| m.max(row[j].abs()))).collect();

    let mut work = a.clone();
    // perm[p] = original row sitting at position p
    let mut perm: Vec<usize> = (0..n).collect();
    for k in 0..r {
        let mut best = k;
        let mut best_val = work[(perm[k], k)].abs();
        for p in k + 1..n {
            let v = work[(perm[p], k)].abs();
            if v > best_val {
                best = p;
                best_val = v;
            }
        }
        let threshold = pivot_tol * col_scale[k];
        if best_val == 0.0 || best_val < threshold {
            return Err(Error::RankDeficient { step: k, pivot: best_val, threshold });
        }
        perm.swap(k, best);
        let pivot_row = work.row(perm[k])[k..].to_vec();
        let pivot = pivot_row[0];
        for &row in &perm[k + 1..] {
            let target = &mut work.row_mut(row)[k..];
            let factor = target[0] / pivot;
            if factor != 0.0 {
                for (t, &p) in target.iter_mut().zip(&pivot_row) {
                    *t -= factor * p;
                }
            }
        }
    }
    perm.truncate(r);
    Ok(perm)
}

/// LU factorization `P A = L U` of a square matrix.
#[derive(Debug, Clone)]
pub struct Lu {
    lu: DenseMatrix,
    perm: Vec<usize>,
    sign: f64,
    singular: bool,
}

impl Lu {
    pub fn new(a: &DenseMatrix) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::dim(format!("LU needs a square matrix, got {:?}", a.shape())));
        }
        let n = a.n_rows();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        let mut singular = false;
        for k in 0..n {
            let mut best = k;
            for p in k + 1..n {
                if lu[(p, k)].abs() > lu[(best, k)].abs() {
                    best = p;
                }
            }
            if best != k {
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(best, j)];
                    lu[(best, j)] = tmp;
                }
                perm.swap(k, best);
                sign = -sign;
            }
            let pivot = lu[(k, k)];
            if pivot == 0.0 {
                singular = true;
                continue;
            }
            for i in k + 1..n {
                let factor = lu[(i, k)] / pivot;
                lu[(i, k)] = factor;
                if factor != 0.0 {
                    for j in k + 1..n {
                        lu[(i, j)] -= factor * lu[(k, j)];
                    }
                }
            }
        }
        Ok(Lu { lu, perm, sign, singular })
    }

    pub fn det(&self) -> f64 {
        (0..self.lu.n_rows()).fold(self.sign, |d, i| d * self.lu[(i, i)])
    }

    pub fn is_singular(&self) -> bool {
        self.singular
    }

    /// Solves `A X = B`.
    pub fn solve(&self, b: &DenseMatrix) -> Result<DenseMatrix> {
        let n = self.lu.n_rows();
        if b.n_rows() != n {
            return Err(Error::dim(format!("right-hand side has {} rows, expected {n}", b.n_rows())));
        }
        if self.singular {
            return Err(Error::RankDeficient { step: 0, pivot: 0.0, threshold: 0.0 });
        }
        let m = b.n_cols();
        let mut x = b.select_rows(&self.perm);
        for i in 0..n {
            for k in 0..i {
                let l = self.lu[(i, k)];
                if l != 0.0 {
                    for j in 0..m {
                        x[(i, j)] -= l * x[(k, j)];
                    }
                }
            }
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                let u = self.lu[(i, k)];
                if u != 0.0 {
                    for j in 0..m {
                        x[(i, j)] -= u * x[(k, j)];
                    }
                }
            }
            let d = self.lu[(i, i)];
            for j in 0..m {
                x[(i, j)] /= d;
            }
        }
        Ok(x)
    }

    pub fn solve_vec(&self, b: &[f64]) -> Result<Vec<f64>> {
        let rhs = DenseMatrix::from_fn(b.len(), 1, |i, _| b[i]);
        Ok(self.solve(&rhs)?.into_vec())
    }
}

/// Determinant of a square matrix via LU.
pub fn det(a: &DenseMatrix) -> Result<f64> {
    Ok(Lu::new(a)?.det())
}

/// Truncated singular value decomposition `A ≈ U diag(sigma) Vᵀ`.
#[derive(Debug, Clone)]
pub struct LowRankFactors {
    pub u: DenseMatrix,
    pub sigma: Vec<f64>,
    pub v: DenseMatrix,
}

impl LowRankFactors {
    pub fn new(u: DenseMatrix, sigma: Vec<f64>, v: DenseMatrix) -> Result<Self> {
        let k = sigma.len();
        if u.n_cols() != k || v.n_cols() != k {
            return Err(Error::dim(format!(
                "factor shapes {:?} and {:?} do not match {k} singular values",
                u.shape(),
                v.shape()
            )));
        }
        Ok(LowRankFactors { u, sigma, v })
    }

    pub fn rank(&self) -> usize {
        self.sigma.len()
    }

    /// `U diag(sigma)`, the row factor whose rows dot with rows of `V`.
    pub fn scaled_u(&self) -> DenseMatrix {
        let mut us = self.u.clone();
        for i in 0..us.n_rows() {
            for (x, s) in us.row_mut(i).iter_mut().zip(&self.sigma) {
                *x *= s;
            }
        }
        us
    }

    pub fn reconstruct(&self) -> DenseMatrix {
        self.scaled_u().matmul(&self.v.transpose()).expect("factor shapes checked on construction")
    }

    pub fn truncate(mut self, k: usize) -> Self {
        let k = k.min(self.sigma.len());
        let keep: Vec<usize> = (0..k).collect();
        self.u = self.u.select_cols(&keep);
        self.v = self.v.select_cols(&keep);
        self.sigma.truncate(k);
        self
    }
}

/// Thin SVD with singular values sorted non-increasing, optionally truncated
/// to the leading `rank` triplets.
pub fn svd(a: &DenseMatrix, rank: Option<usize>) -> LowRankFactors {
    let dec = SVD::new(a.to_nalgebra(), true, true);
    let u = dec.u.expect("requested U");
    let v_t = dec.v_t.expect("requested Vt");
    let sv = dec.singular_values;
    let mut order: Vec<usize> = (0..sv.len()).collect();
    order.sort_by(|&i, &j| sv[j].total_cmp(&sv[i]).then(i.cmp(&j)));
    let k = rank.map_or(order.len(), |r| r.min(order.len()));
    order.truncate(k);
    let sigma = order.iter().map(|&i| sv[i].max(0.0)).collect();
    let u = DenseMatrix::from_fn(a.n_rows(), k, |i, t| u[(i, order[t])]);
    let v = DenseMatrix::from_fn(a.n_cols(), k, |j, t| v_t[(order[t], j)]);
    LowRankFactors { u, sigma, v }
}

/// Singular values in non-increasing order.
pub fn singular_values(a: &DenseMatrix) -> Vec<f64> {
    if a.n_rows() == 0 || a.n_cols() == 0 {
        return Vec::new();
    }
    let mut sv: Vec<f64> = a.to_nalgebra().singular_values().iter().map(|s| s.max(0.0)).collect();
    sv.sort_by(|x, y| y.total_cmp(x));
    sv
}

pub fn spectral_norm(a: &DenseMatrix) -> f64 {
    singular_values(a).first().copied().unwrap_or(0.0)
}

/// Ratio of the extreme singular values, infinite for singular input.
pub fn condition_number(a: &DenseMatrix) -> f64 {
    let sv = singular_values(a);
    match (sv.first(), sv.last()) {
        (Some(&hi), Some(&lo)) if lo > 0.0 => hi / lo,
        _ => f64::INFINITY,
    }
}

/// Moore-Penrose pseudo-inverse with singular values below
/// `rcond * sigma_max` treated as zero.
pub fn pinv(a: &DenseMatrix, rcond: f64) -> DenseMatrix {
    let f = svd(a, None);
    let cutoff = rcond * f.sigma.first().copied().unwrap_or(0.0);
    let (n, m) = a.shape();
    let mut out = DenseMatrix::zeros(m, n);
    for (t, &s) in f.sigma.iter().enumerate() {
        if s <= cutoff || s == 0.0 {
            continue;
        }
        for j in 0..m {
            let vj = f.v[(j, t)] / s;
            if vj == 0.0 {
                continue;
            }
            for i in 0..n {
                out[(j, i)] += vj * f.u[(i, t)];
            }
        }
    }
    out
}

/// Minimum-norm least-squares solution `X = A† B` using the default cutoff.
pub fn least_squares_min_norm(a: &DenseMatrix, b: &DenseMatrix) -> Result<DenseMatrix> {
    least_squares_min_norm_rcond(a, b, DEFAULT_RCOND)
}

pub fn least_squares_min_norm_rcond(a: &DenseMatrix, b: &DenseMatrix, rcond: f64) -> Result<DenseMatrix> {
    if a.n_rows() != b.n_rows() {
        return Err(Error::dim(format!("least squares: A has {} rows but B has {}", a.n_rows(), b.n_rows())));
    }
    pinv(a, rcond).matmul(b)
}

/// Orthonormal basis of the column space of a tall matrix (thin Householder Q).
pub fn thin_q(a: &DenseMatrix) -> DenseMatrix {
    let q = QR::new(a.to_nalgebra()).q();
    DenseMatrix::from_nalgebra(&q)
}

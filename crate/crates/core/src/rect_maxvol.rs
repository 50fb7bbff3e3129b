//! rect_maxvol: greedy growth of a `K x r` submatrix of large 2-volume.
//!
//! Starting from a square maxvol basis with `C = A Â⁻¹`, each step appends the
//! unselected row `i` whose coefficient row is longest. Appending `A_i`
//! multiplies the squared 2-volume by `1 + |C_i|²`, and the minimum-norm
//! coefficients follow from a rank-1 update
//!
//! ```text
//! C ← [ C − C C_iᵀ C_i / (1 + C_i C_iᵀ) | C C_iᵀ / (1 + C_i C_iᵀ) ]
//! L_j ← L_j − (C_j C_iᵀ)² / (1 + C_i C_iᵀ)
//! ```
//!
//! so every step costs `O(N K)` and nothing is refactorized.

use log::warn;

use crate::error::{Error, Result};
use crate::matrix::{dot, DenseMatrix};
use crate::maxvol::{maxvol, HatMode, MaxvolOptions, SelectionResult, DEFAULT_EPS};

pub const DEFAULT_TAU: f64 = 1.0;

#[derive(Debug, Clone, Copy)]
pub struct RectMaxvolOptions {
    /// Growth stops once every unselected row of `C` has norm at most `tau`.
    pub tau: f64,
    /// Growth floor; defaults to `r`.
    pub min_k: Option<usize>,
    /// Growth cap; defaults to `min(N, 2r + 1)`.
    pub max_k: Option<usize>,
    pub identity_hat: bool,
    /// Options of the square stage.
    pub square: MaxvolOptions,
}

impl Default for RectMaxvolOptions {
    fn default() -> Self {
        RectMaxvolOptions {
            tau: DEFAULT_TAU,
            min_k: None,
            max_k: None,
            identity_hat: false,
            square: MaxvolOptions::with_eps(DEFAULT_EPS),
        }
    }
}

impl RectMaxvolOptions {
    pub fn with_tau(tau: f64) -> Self {
        RectMaxvolOptions { tau, ..Default::default() }
    }

    /// Resolved `(min_k, max_k)` for an `n x r` input.
    pub fn bounds(&self, n: usize, r: usize) -> Result<(usize, usize)> {
        let max_k = self.max_k.unwrap_or_else(|| n.min(2 * r + 1));
        let min_k = self.min_k.unwrap_or(r);
        if !(r <= min_k && min_k <= max_k && max_k <= n) {
            return Err(Error::InvalidBounds(format!(
                "need r <= min_k <= max_k <= N, got r = {r}, min_k = {min_k}, max_k = {max_k}, N = {n}"
            )));
        }
        if !self.tau.is_finite() || self.tau <= 0.0 {
            return Err(Error::InvalidBounds(format!("tau must be positive, got {}", self.tau)));
        }
        Ok((min_k, max_k))
    }
}

/// State after one growth step, handed to observers.
pub struct GrowthStep<'a> {
    pub k: usize,
    pub added_row: usize,
    /// Squared coefficient length of the added row before the update; the
    /// squared 2-volume grew by `1 + added_length`.
    pub added_length: f64,
    pub row_indices: &'a [usize],
    /// Maintained squared row lengths of `C`.
    pub lengths: &'a [f64],
    buffer: &'a [f64],
    stride: usize,
}

impl GrowthStep<'_> {
    /// Copy of the current `N x K` minimum-norm coefficient matrix.
    pub fn coefficients(&self) -> DenseMatrix {
        coefficient_block(self.buffer, self.stride, self.k)
    }
}

fn coefficient_block(buffer: &[f64], stride: usize, k: usize) -> DenseMatrix {
    let n = buffer.len() / stride;
    DenseMatrix::from_fn(n, k, |i, t| buffer[i * stride + t])
}

pub fn rect_maxvol(a: &DenseMatrix, opts: &RectMaxvolOptions) -> Result<SelectionResult> {
    rect_maxvol_observed(a, opts, |_| {})
}

/// [`rect_maxvol`] with a callback after every growth step.
pub fn rect_maxvol_observed(
    a: &DenseMatrix,
    opts: &RectMaxvolOptions,
    mut observer: impl FnMut(&GrowthStep<'_>),
) -> Result<SelectionResult> {
    let (n, r) = a.shape();
    if n < r {
        return Err(Error::dim(format!("need N >= r, got {n}x{r}")));
    }
    let (min_k, max_k) = opts.bounds(n, r)?;
    let square = match maxvol(a, &opts.square) {
        Ok(sel) => sel,
        Err(Error::IterationLimit { max_iters, result }) => {
            warn!("square stage stopped at its limit of {max_iters} swaps; growing from the last iterate");
            *result
        }
        Err(e) => return Err(e),
    };
    let tau2 = opts.tau * opts.tau;

    let stride = max_k;
    let mut buf = vec![0.0; n * stride];
    for (i, row) in square.coefficients.rows().enumerate() {
        buf[i * stride..i * stride + r].copy_from_slice(row);
    }
    let mut lengths: Vec<f64> =
        (0..n).map(|i| dot(&buf[i * stride..i * stride + r], &buf[i * stride..i * stride + r])).collect();
    let mut selected = vec![false; n];
    for &i in &square.row_indices {
        selected[i] = true;
    }
    let mut rows = square.row_indices;
    let mut k = r;
    let mut proj = vec![0.0; n];

    while k < max_k {
        let Some(i) = argmax_unselected(&lengths, &selected) else { break };
        let li = lengths[i];
        if k >= min_k && li <= tau2 {
            break;
        }
        let ci = buf[i * stride..i * stride + k].to_vec();
        let denom = 1.0 + dot(&ci, &ci);
        for (j, p) in proj.iter_mut().enumerate() {
            *p = dot(&buf[j * stride..j * stride + k], &ci);
        }
        for (j, &p) in proj.iter().enumerate() {
            let row = &mut buf[j * stride..j * stride + k + 1];
            let f = p / denom;
            if f != 0.0 {
                for (x, &c) in row[..k].iter_mut().zip(&ci) {
                    *x -= f * c;
                }
            }
            row[k] = f;
            lengths[j] -= p * f;
        }
        selected[i] = true;
        rows.push(i);
        k += 1;
        observer(&GrowthStep {
            k,
            added_row: i,
            added_length: li,
            row_indices: &rows,
            lengths: &lengths,
            buffer: &buf,
            stride,
        });
    }

    let mut coefficients = coefficient_block(&buf, stride, k);
    let hat_mode = if opts.identity_hat || k == r {
        for (t, &i) in rows.iter().enumerate() {
            let row = coefficients.row_mut(i);
            row.fill(0.0);
            row[t] = 1.0;
        }
        HatMode::Identity
    } else {
        HatMode::Projector
    };
    Ok(SelectionResult { row_indices: rows, coefficients, hat_mode, iterations: square.iterations })
}

fn argmax_unselected(lengths: &[f64], selected: &[bool]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (j, (&l, &s)) in lengths.iter().zip(selected).enumerate() {
        if !s && best.is_none_or(|b| l > lengths[b]) {
            best = Some(j);
        }
    }
    best
}

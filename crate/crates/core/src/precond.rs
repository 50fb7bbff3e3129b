//! Preconditioning overdetermined least squares through a basic/non-basic row
//! split.
//!
//! With basic rows `Â` (chosen by maxvol or rect_maxvol), non-basic rows `B`
//! and coefficients `C̃ = B Â†`, the least-squares problem `min |Ax - b|` is
//! equivalent to the augmented system
//!
//! ```text
//! [ I   C̃ ] [ r_B ]   [  b_B      ]
//! [ C̃ᵀ -I ] [ Â x ] = [ -Ĉ b_Â    ]
//! ```
//!
//! whose 2-norm condition number is `sqrt(1 + |C̃|₂²)`.

use std::time::Instant;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{least_squares_min_norm, spectral_norm, Lu};
use crate::matrix::DenseMatrix;
use crate::maxvol::{maxvol, HatMode, MaxvolOptions};
use crate::rect_maxvol::{rect_maxvol, RectMaxvolOptions};
use crate::Method;

#[derive(Debug, Clone)]
pub struct AugmentedSystem {
    /// Basic rows in selection order; column `t` of `C̃` belongs to `basic_rows[t]`.
    pub basic_rows: Vec<usize>,
    /// Remaining rows in ascending order; row `s` of `C̃` belongs to `nonbasic_rows[s]`.
    pub nonbasic_rows: Vec<usize>,
    /// `C̃ = B Â†`, `(N - K) x K`.
    pub tilde_c: DenseMatrix,
    /// Coefficients of the basic rows, `K x K`.
    pub hat_c: DenseMatrix,
    pub hat_mode: HatMode,
    /// `Â`, `K x r`.
    pub basis: DenseMatrix,
}

impl AugmentedSystem {
    pub fn k(&self) -> usize {
        self.basic_rows.len()
    }

    pub fn n_rows(&self) -> usize {
        self.basic_rows.len() + self.nonbasic_rows.len()
    }

    /// Row permutation `P` with `P A = [Â; B]`: entry `p` is the row of `A`
    /// placed at position `p`.
    pub fn permutation(&self) -> Vec<usize> {
        self.basic_rows.iter().chain(&self.nonbasic_rows).copied().collect()
    }

    /// Full coefficient matrix in permuted order, `[Ĉ; C̃]`.
    pub fn coefficient_matrix(&self) -> DenseMatrix {
        self.hat_c.vstack(&self.tilde_c).expect("both blocks have K columns")
    }

    /// Dense `N x N` matrix `[[I, C̃], [C̃ᵀ, -I]]`.
    pub fn assemble_z(&self) -> DenseMatrix {
        let nb = self.nonbasic_rows.len();
        let k = self.k();
        let mut z = DenseMatrix::zeros(nb + k, nb + k);
        for s in 0..nb {
            z[(s, s)] = 1.0;
            for t in 0..k {
                let c = self.tilde_c[(s, t)];
                z[(s, nb + t)] = c;
                z[(nb + t, s)] = c;
            }
        }
        for t in 0..k {
            z[(nb + t, nb + t)] = -1.0;
        }
        z
    }

    /// Right-hand side `[b_B; -Ĉ b_Â]` of the augmented system.
    pub fn rhs(&self, b: &[f64]) -> Result<Vec<f64>> {
        if b.len() != self.n_rows() {
            return Err(Error::dim(format!("right-hand side has length {}, expected {}", b.len(), self.n_rows())));
        }
        let b_hat: Vec<f64> = self.basic_rows.iter().map(|&i| b[i]).collect();
        let mut out: Vec<f64> = self.nonbasic_rows.iter().map(|&i| b[i]).collect();
        out.extend(self.hat_c.matvec(&b_hat)?.into_iter().map(|v| -v));
        Ok(out)
    }

    /// Solves the augmented system by eliminating `r_B`, which leaves the
    /// `K x K` system `(I + C̃ᵀC̃) y = C̃ᵀ b_B + Ĉ b_Â` for `y = Â x`.
    /// Returns `(r_B, y)`.
    pub fn solve_z(&self, b: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        let rhs = self.rhs(b)?;
        let nb = self.nonbasic_rows.len();
        let (b_nb, minus_cb) = rhs.split_at(nb);
        let k = self.k();
        let mut schur = self.tilde_c.transpose().matmul(&self.tilde_c)?;
        for t in 0..k {
            schur[(t, t)] += 1.0;
        }
        let mut g = self.tilde_c.transpose().matvec(b_nb)?;
        for (gv, v) in g.iter_mut().zip(minus_cb) {
            *gv -= v;
        }
        let y = Lu::new(&schur)?.solve_vec(&g)?;
        let cy = self.tilde_c.matvec(&y)?;
        let r_b = b_nb.iter().zip(&cy).map(|(b, c)| b - c).collect();
        Ok((r_b, y))
    }
}

/// `sqrt(1 + |C̃|₂²)`.
pub fn cond_formula(sys: &AugmentedSystem) -> f64 {
    let c = spectral_norm(&sys.tilde_c);
    (1.0 + c * c).sqrt()
}

pub fn build_augmented(a: &DenseMatrix, method: Method, tau: f64) -> Result<AugmentedSystem> {
    build_augmented_with(a, method, tau, HatMode::Identity)
}

pub fn build_augmented_with(a: &DenseMatrix, method: Method, tau: f64, hat_mode: HatMode) -> Result<AugmentedSystem> {
    let (n, r) = a.shape();
    if n <= r {
        return Err(Error::dim(format!("need more rows than columns, got {n}x{r}")));
    }
    let sel = match method {
        Method::Square => maxvol(a, &MaxvolOptions::default())?,
        Method::Rect => rect_maxvol(a, &RectMaxvolOptions::with_tau(tau))?,
    };
    let k = sel.k();
    let mut is_basic = vec![false; n];
    for &i in &sel.row_indices {
        is_basic[i] = true;
    }
    let nonbasic_rows: Vec<usize> = (0..n).filter(|&i| !is_basic[i]).collect();
    let tilde_c = sel.coefficients.select_rows(&nonbasic_rows);
    // for K == r the projector is the identity
    let hat_c = match (hat_mode, sel.hat_mode) {
        (HatMode::Projector, HatMode::Projector) if k > r => sel.coefficients.select_rows(&sel.row_indices),
        _ => DenseMatrix::identity(k),
    };
    Ok(AugmentedSystem {
        basis: a.select_rows(&sel.row_indices),
        basic_rows: sel.row_indices,
        nonbasic_rows,
        tilde_c,
        hat_c,
        hat_mode,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct AugmentedSolution {
    pub x: Vec<f64>,
    pub residual_norm: f64,
    pub cond_z: f64,
}

/// Least squares through the augmented system. The basic block uses the
/// projector `Ĉ = Â Â†`, which makes `Â x = y` consistent so `x` is the exact
/// minimizer.
pub fn solve_via_augmented(a: &DenseMatrix, b: &[f64], method: Method, tau: f64) -> Result<AugmentedSolution> {
    if b.len() != a.n_rows() {
        return Err(Error::dim(format!("right-hand side has length {}, expected {}", b.len(), a.n_rows())));
    }
    if a.n_rows() == a.n_cols() {
        let x = Lu::new(a)?.solve_vec(b)?;
        return Ok(AugmentedSolution { residual_norm: residual_norm(a, &x, b)?, x, cond_z: 1.0 });
    }
    let sys = build_augmented_with(a, method, tau, HatMode::Projector)?;
    let (_, y) = sys.solve_z(b)?;
    let x = least_squares_min_norm(&sys.basis, &DenseMatrix::column_vector(&y)?)?.into_vec();
    Ok(AugmentedSolution { residual_norm: residual_norm(a, &x, b)?, cond_z: cond_formula(&sys), x })
}

fn residual_norm(a: &DenseMatrix, x: &[f64], b: &[f64]) -> Result<f64> {
    Ok(a.matvec(x)?.iter().zip(b).map(|(p, q)| (p - q) * (p - q)).sum::<f64>().sqrt())
}

#[derive(Debug, Clone, Serialize)]
pub struct PrecondStats {
    pub basis_rows: usize,
    /// Spectral norm of the full coefficient matrix with identity basic block.
    pub coef_norm: f64,
    pub cond_z: f64,
    pub seconds: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct MethodComparison {
    pub square: PrecondStats,
    pub rect: PrecondStats,
}

pub fn precond_stats(a: &DenseMatrix, method: Method, tau: f64) -> Result<PrecondStats> {
    let start = Instant::now();
    let sys = build_augmented(a, method, tau)?;
    let seconds = start.elapsed().as_secs_f64();
    Ok(PrecondStats {
        basis_rows: sys.k(),
        coef_norm: spectral_norm(&sys.coefficient_matrix()),
        cond_z: cond_formula(&sys),
        seconds,
    })
}

pub fn compare_methods(a: &DenseMatrix, tau: f64) -> Result<MethodComparison> {
    Ok(MethodComparison { square: precond_stats(a, Method::Square, tau)?, rect: precond_stats(a, Method::Rect, tau)? })
}

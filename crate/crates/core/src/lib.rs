//! Maximal-volume submatrix selection for dense real matrices.
//!
//! * [`maxvol()`] finds a quasi-dominant square submatrix by row swaps.
//! * [`rect_maxvol()`] grows it into a rectangular submatrix whose
//!   coefficient rows all have Euclidean norm at most `tau`.
//! * [`skeleton`], [`precond`] and [`recsys`] build pseudo-skeleton
//!   approximations, least-squares preconditioners and recommender
//!   representatives on top of those selections.

pub mod error;
pub mod linalg;
pub mod matrix;
pub mod maxvol;
pub mod mtx;
pub mod precond;
pub mod random;
pub mod recsys;
pub mod rect_maxvol;
pub mod skeleton;
pub mod volume;

pub use error::{Error, Result};
pub use linalg::{least_squares_min_norm, lu_top_rows, spectral_norm, svd, LowRankFactors};
pub use matrix::DenseMatrix;
pub use maxvol::{maxvol, HatMode, MaxvolOptions, SelectionResult};
pub use rect_maxvol::{rect_maxvol, RectMaxvolOptions};
pub use volume::{log_vol2, vol2};

use serde::{Deserialize, Serialize};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Which selection algorithm an application runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Square maxvol, `K = r`.
    Square,
    /// rect_maxvol with the given `tau`.
    Rect,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Square => "square",
            Method::Rect => "rect",
        }
    }
}

/// Runs the selection `method` on the rows of a tall matrix.
pub fn select_rows(a: &DenseMatrix, method: Method, tau: f64) -> Result<SelectionResult> {
    match method {
        Method::Square => maxvol(a, &MaxvolOptions::default()),
        Method::Rect => rect_maxvol(a, &RectMaxvolOptions::with_tau(tau)),
    }
}

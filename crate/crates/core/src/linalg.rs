//! Small dense linear solves at the fixed sizes the polynomial planners
//! need (2x2, 4x4, 6x6): explicit LU with partial pivoting over
//! const-generic arrays, no allocation.

use thiserror::Error;

/// Pivot-ratio threshold above which a system is reported as degenerate.
pub const CONDITION_LIMIT: f64 = 1e12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error("singular system: zero pivot at elimination step {step}")]
    Singular { step: usize },
    #[error("ill-conditioned system: pivot ratio {ratio:.3e} exceeds {CONDITION_LIMIT:.0e}")]
    IllConditioned { ratio: f64 },
    #[error("non-finite entry in system matrix or right-hand side")]
    NonFinite,
}

/// Solves `a * x = b` by LU decomposition with partial pivoting.
///
/// The condition of the system is estimated from the ratio of the largest to
/// the smallest pivot magnitude; ratios above [`CONDITION_LIMIT`] are
/// rejected so that degenerate boundary conditions (e.g. near-zero segment
/// durations) surface as errors instead of garbage coefficients.
pub fn lu_solve<const N: usize>(a: &[[f64; N]; N], b: &[f64; N]) -> Result<[f64; N], SolveError> {
    for row in a {
        for &v in row {
            if !v.is_finite() {
                return Err(SolveError::NonFinite);
            }
        }
    }
    if b.iter().any(|v| !v.is_finite()) {
        return Err(SolveError::NonFinite);
    }

    let mut lu = *a;
    let mut x = *b;
    let mut max_pivot = 0.0f64;
    let mut min_pivot = f64::INFINITY;

    for col in 0..N {
        // Partial pivoting: bring the largest remaining entry to the diagonal.
        let mut pivot_row = col;
        let mut pivot_mag = lu[col][col].abs();
        for row in col + 1..N {
            let mag = lu[row][col].abs();
            if mag > pivot_mag {
                pivot_mag = mag;
                pivot_row = row;
            }
        }
        if pivot_mag == 0.0 {
            return Err(SolveError::Singular { step: col });
        }
        if pivot_row != col {
            lu.swap(col, pivot_row);
            x.swap(col, pivot_row);
        }

        max_pivot = max_pivot.max(pivot_mag);
        min_pivot = min_pivot.min(pivot_mag);

        let inv = 1.0 / lu[col][col];
        for row in col + 1..N {
            let factor = lu[row][col] * inv;
            lu[row][col] = 0.0;
            for k in col + 1..N {
                lu[row][k] -= factor * lu[col][k];
            }
            x[row] -= factor * x[col];
        }
    }

    let ratio = max_pivot / min_pivot;
    if ratio > CONDITION_LIMIT {
        return Err(SolveError::IllConditioned { ratio });
    }

    // Back substitution on the upper-triangular factor.
    for col in (0..N).rev() {
        let mut sum = x[col];
        for k in col + 1..N {
            sum -= lu[col][k] * x[k];
        }
        x[col] = sum / lu[col][col];
    }

    Ok(x)
}

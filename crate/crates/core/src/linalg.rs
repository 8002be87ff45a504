//! Small dense linear-algebra helpers shared by the finite and graphon solvers.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Largest singular value `‖M‖₂` by power iteration on `MᵀM`.
///
/// Stops when the relative change of the estimate drops below `rel_tol`.
/// Returns the estimate and the iteration count.
pub fn spectral_norm(
    mat: &DMatrix<f64>,
    rel_tol: f64,
    max_iter: usize,
    seed: u64,
) -> Result<(f64, usize)> {
    let cols = mat.ncols();
    if cols == 0 || mat.nrows() == 0 {
        return Ok((0.0, 0));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = DVector::from_fn(cols, |_, _| rng.gen::<f64>() - 0.5);
    x /= x.norm();

    let mut estimate = 0.0;
    for iter in 1..=max_iter {
        let y = mat * &x;
        let sigma = y.norm();
        if sigma == 0.0 {
            return Ok((0.0, iter));
        }
        let mut z = mat.tr_mul(&y);
        let znorm = z.norm();
        if znorm == 0.0 {
            return Ok((sigma, iter));
        }
        z /= znorm;
        x = z;
        if iter > 1 && (sigma - estimate).abs() <= rel_tol * sigma {
            return Ok((sigma, iter));
        }
        estimate = sigma;
    }
    Err(Error::NonConvergence {
        what: "spectral norm power iteration",
        iterations: max_iter,
        residual: estimate,
    })
}

/// Spectral radius of an entrywise non-negative square matrix.
///
/// Power iteration runs on `B + I`, whose Perron root `ρ + 1` strictly
/// dominates every other eigenvalue in modulus even when `B` is periodic.
/// Termination uses the Collatz–Wielandt bracket
/// `min_i (Mx)_i/x_i ≤ ρ(M) ≤ max_i (Mx)_i/x_i`, falling back to the change
/// in the norm ratio for reducible matrices whose bracket need not close.
pub fn perron_radius(mat: &DMatrix<f64>, tol: f64, max_iter: usize) -> Result<f64> {
    let m = mat.nrows();
    if m == 0 {
        return Ok(0.0);
    }
    if mat.iter().any(|&v| v < 0.0 || !v.is_finite()) {
        return Err(Error::Parameter(
            "perron_radius expects a finite non-negative matrix".into(),
        ));
    }
    let shifted = mat + DMatrix::<f64>::identity(m, m);
    let mut x = DVector::from_element(m, 1.0);
    let mut last = f64::NAN;
    let mut stalled = 0;
    for _ in 0..max_iter {
        let y = &shifted * &x;
        let (lo, hi) = x.iter().zip(y.iter()).fold(
            (f64::INFINITY, f64::NEG_INFINITY),
            |(lo, hi), (&xi, &yi)| (lo.min(yi / xi), hi.max(yi / xi)),
        );
        let ratio = y.amax() / x.amax();
        if hi - lo <= tol {
            return Ok(0.5 * (lo + hi) - 1.0);
        }
        if (ratio - last).abs() <= 1e-3 * tol {
            stalled += 1;
            if stalled >= 10 {
                return Ok(ratio - 1.0);
            }
        } else {
            stalled = 0;
        }
        last = ratio;
        x = y / ratio;
    }
    Err(Error::NonConvergence {
        what: "spectral radius power iteration",
        iterations: max_iter,
        residual: last,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn singular_value_of_nilpotent() {
        let m = DMatrix::from_row_slice(2, 2, &[0.0, 0.1, 0.0, 0.0]);
        let (s, _) = spectral_norm(&m, 1e-12, 1000, 1).unwrap();
        assert!((s - 0.1).abs() < 1e-12);
    }

    #[test]
    fn zero_matrix_norm() {
        let (s, _) = spectral_norm(&DMatrix::zeros(3, 3), 1e-9, 10, 1).unwrap();
        assert_eq!(s, 0.0);
    }

    #[test]
    fn matches_svd() {
        let m = DMatrix::from_fn(6, 6, |i, j| ((i * 7 + j * 3) % 5) as f64 - 2.0);
        let (s, _) = spectral_norm(&m, 1e-13, 100_000, 9).unwrap();
        let svd = m.clone().svd(false, false);
        let top = svd.singular_values.max();
        assert!((s - top).abs() < 1e-9 * top);
    }

    #[test]
    fn perron_root_of_periodic_and_reducible() {
        let swap = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        assert!((perron_radius(&swap, 1e-12, 100_000).unwrap() - 1.0).abs() < 1e-10);
        let diag = DMatrix::from_row_slice(2, 2, &[0.4, 0.0, 0.0, 0.0]);
        assert!((perron_radius(&diag, 1e-12, 100_000).unwrap() - 0.4).abs() < 1e-10);
        assert_eq!(
            perron_radius(&DMatrix::zeros(2, 2), 1e-12, 10).unwrap(),
            0.0
        );
    }

    #[test]
    fn perron_root_matches_eigenvalues() {
        let b = DMatrix::from_row_slice(2, 2, &[0.24, 0.32, 0.16, 0.08]);
        let rho = perron_radius(&b, 1e-13, 100_000).unwrap();
        assert!((rho - 0.4).abs() < 1e-10);
        let eig = b.complex_eigenvalues();
        let top = eig.iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!((rho - top).abs() < 1e-10);
    }
}

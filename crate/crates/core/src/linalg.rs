//! Small dense linear-algebra helpers on top of faer.

use faer::linalg::solvers::Solve;
use faer::{c64, Mat};

use crate::error::{Error, Result};

/// Solves `A x = b` by LU with partial pivoting.
pub fn solve(a: &Mat<c64>, b: &[c64]) -> Vec<c64> {
    let rhs = Mat::from_fn(b.len(), 1, |i, _| b[i]);
    let x = a.partial_piv_lu().solve(&rhs);
    (0..b.len()).map(|i| x[(i, 0)]).collect()
}

/// 2-norm condition number from the singular values.
pub fn condition_number(a: &Mat<c64>) -> Result<f64> {
    let sv = a
        .singular_values()
        .map_err(|e| Error::EigenFailure(format!("{e:?}")))?;
    let max = sv.iter().copied().fold(0.0f64, f64::max);
    let min = sv.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(if min > 0.0 { max / min } else { f64::INFINITY })
}

/// Eigenvalues of a general complex matrix.
pub fn general_eigenvalues(a: &Mat<c64>) -> Result<Vec<c64>> {
    a.eigenvalues()
        .map_err(|e| Error::EigenFailure(format!("{e:?}")))
}

/// Roots of `sum_m coeffs[m] w^m` from the eigenvalues of the companion
/// matrix, each refined by a few Newton steps on the polynomial.
pub fn polynomial_roots(coeffs: &[c64]) -> Result<Vec<c64>> {
    let degree = coeffs.len() - 1;
    let lead = coeffs[degree];
    let mut companion = Mat::<c64>::zeros(degree, degree);
    for i in 1..degree {
        companion[(i, i - 1)] = c64::new(1.0, 0.0);
    }
    for i in 0..degree {
        companion[(i, degree - 1)] = -coeffs[i] / lead;
    }
    let mut roots = general_eigenvalues(&companion)?;
    for r in roots.iter_mut() {
        *r = newton_polish(coeffs, *r);
    }
    Ok(roots)
}

fn eval_with_derivative(coeffs: &[c64], w: c64) -> (c64, c64) {
    let mut p = c64::new(0.0, 0.0);
    let mut dp = c64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        dp = dp * w + p;
        p = p * w + c;
    }
    (p, dp)
}

fn newton_polish(coeffs: &[c64], mut w: c64) -> c64 {
    for _ in 0..4 {
        let (p, dp) = eval_with_derivative(coeffs, w);
        if dp.norm() == 0.0 {
            break;
        }
        let next = w - p / dp;
        if eval_with_derivative(coeffs, next).0.norm() < p.norm() {
            w = next;
        } else {
            break;
        }
    }
    w
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cubic_roots_are_recovered() {
        // (w - 1)(w + 2)(w - i) = w^3 + (1 - i) w^2 + (-2 - i) w + 2i
        let coeffs = [
            c64::new(0.0, 2.0),
            c64::new(-2.0, -1.0),
            c64::new(1.0, -1.0),
            c64::new(1.0, 0.0),
        ];
        let roots = polynomial_roots(&coeffs).unwrap();
        for target in [c64::new(1.0, 0.0), c64::new(-2.0, 0.0), c64::new(0.0, 1.0)] {
            assert!(roots.iter().any(|r| (r - target).norm() < 1e-12));
        }
    }

    #[test]
    fn solve_and_condition() {
        let a = Mat::from_fn(2, 2, |i, j| c64::new(if i == j { 2.0 } else { 0.0 }, 0.0));
        let x = solve(&a, &[c64::new(2.0, 0.0), c64::new(4.0, 0.0)]);
        assert!((x[1] - c64::new(2.0, 0.0)).norm() < 1e-15);
        assert!((condition_number(&a).unwrap() - 1.0).abs() < 1e-12);
    }
}

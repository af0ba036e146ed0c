//! Six-vertex R-matrix and its algebraic properties.
//!
//! Two-site matrices act on `aux ⊗ quantum` with the auxiliary space as the
//! leftmost (most significant) factor.

use faer::{c64, Mat};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::{max_abs, max_abs_diff, scaled};

fn zero() -> c64 {
    c64::new(0.0, 0.0)
}

fn one() -> c64 {
    c64::new(1.0, 0.0)
}

pub fn r_matrix(u: c64, crossing: c64) -> Result<Mat<c64>> {
    let sh = crossing.sinh();
    if sh.norm() < 1e-300 {
        return Err(Error::SingularCrossing);
    }
    let diag = (u + crossing).sinh() / sh;
    let weak = u.sinh() / sh;
    let mut r = Mat::zeros(4, 4);
    r[(0, 0)] = diag;
    r[(3, 3)] = diag;
    r[(1, 1)] = weak;
    r[(2, 2)] = weak;
    r[(1, 2)] = one();
    r[(2, 1)] = one();
    Ok(r)
}

/// `phi(u) = -sinh(u + eta) sinh(u - eta) / sinh^2 eta`.
pub fn unitarity_factor(u: c64, crossing: c64) -> c64 {
    -(u + crossing).sinh() * (u - crossing).sinh() / crossing.sinh().powi(2)
}

pub fn permutation() -> Mat<c64> {
    let mut p = Mat::zeros(4, 4);
    p[(0, 0)] = one();
    p[(3, 3)] = one();
    p[(1, 2)] = one();
    p[(2, 1)] = one();
    p
}

/// Rank-one antisymmetric projector `(1 - P) / 2`.
pub fn antisymmetric_projector() -> Mat<c64> {
    let mut m = Mat::<c64>::identity(4, 4) - permutation();
    for j in 0..4 {
        for i in 0..4 {
            m[(i, j)] *= 0.5;
        }
    }
    m
}

pub fn pauli_matrix(alpha: crate::pauli::Pauli) -> Mat<c64> {
    use crate::pauli::Pauli;
    let mut m = Mat::zeros(2, 2);
    match alpha {
        Pauli::X => {
            m[(0, 1)] = one();
            m[(1, 0)] = one();
        }
        Pauli::Y => {
            m[(0, 1)] = c64::new(0.0, -1.0);
            m[(1, 0)] = c64::new(0.0, 1.0);
        }
        Pauli::Z => {
            m[(0, 0)] = one();
            m[(1, 1)] = -one();
        }
    }
    m
}

pub fn kron(a: &Mat<c64>, b: &Mat<c64>) -> Mat<c64> {
    let (ar, ac, br, bc) = (a.nrows(), a.ncols(), b.nrows(), b.ncols());
    Mat::from_fn(ar * br, ac * bc, |i, j| a[(i / br, j / bc)] * b[(i % br, j % bc)])
}

/// Transpose in the second (quantum) factor.
pub fn partial_transpose_second(m: &Mat<c64>) -> Mat<c64> {
    Mat::from_fn(4, 4, |i, j| {
        let (a, q) = (i / 2, i % 2);
        let (a2, q2) = (j / 2, j % 2);
        m[(2 * a + q2, 2 * a2 + q)]
    })
}

/// `P M P`: the same operator with the two factors exchanged.
pub fn swap_factors(m: &Mat<c64>) -> Mat<c64> {
    let p = permutation();
    &p * m * &p
}

/// Embeds a two-site operator acting on `(first, second)` (0-based factor
/// positions, either order) into an `n`-factor qubit space.
pub fn embed_two_site(m: &Mat<c64>, n: usize, first: usize, second: usize) -> Mat<c64> {
    let dim = 1usize << n;
    let bit = |pos: usize| n - 1 - pos;
    let (bf, bs) = (bit(first), bit(second));
    let mut out = Mat::zeros(dim, dim);
    for col in 0..dim {
        let cl = ((col >> bf) & 1) * 2 + ((col >> bs) & 1);
        let rest = col & !(1 << bf) & !(1 << bs);
        for rl in 0..4 {
            let v = m[(rl, cl)];
            if v == zero() {
                continue;
            }
            let row = rest | ((rl >> 1) << bf) | ((rl & 1) << bs);
            out[(row, col)] += v;
        }
    }
    out
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct RPropertyReport {
    pub initial_condition: f64,
    pub unitarity: f64,
    pub crossing: f64,
    pub pt_symmetry: f64,
    pub z2_symmetry: f64,
    pub quasi_periodicity: f64,
    pub fusion: f64,
    pub yang_baxter: f64,
}

impl RPropertyReport {
    pub fn entries(&self) -> [(&'static str, f64); 8] {
        [
            ("initial_condition", self.initial_condition),
            ("unitarity", self.unitarity),
            ("crossing", self.crossing),
            ("pt_symmetry", self.pt_symmetry),
            ("z2_symmetry", self.z2_symmetry),
            ("quasi_periodicity", self.quasi_periodicity),
            ("fusion", self.fusion),
            ("yang_baxter", self.yang_baxter),
        ]
    }

    pub fn max_residual(&self) -> f64 {
        self.entries().iter().map(|e| e.1).fold(0.0, f64::max)
    }
}

/// Residual of the Yang-Baxter equation on three spaces at `(u1, u2, u3)`.
pub fn yang_baxter_residual(u: [c64; 3], crossing: c64) -> Result<f64> {
    let r01 = embed_two_site(&r_matrix(u[0] - u[1], crossing)?, 3, 0, 1);
    let r02 = embed_two_site(&r_matrix(u[0] - u[2], crossing)?, 3, 0, 2);
    let r12 = embed_two_site(&r_matrix(u[1] - u[2], crossing)?, 3, 1, 2);
    let lhs = &r01 * &r02 * &r12;
    let rhs = &r12 * &r02 * &r01;
    Ok(max_abs_diff(lhs.as_ref(), rhs.as_ref()))
}

/// Max residual of every R-matrix identity over the sample points; the
/// Yang-Baxter equation is tested on cyclic triples of samples.
pub fn r_property_suite(crossing: c64, samples: &[c64]) -> Result<RPropertyReport> {
    use crate::pauli::Pauli;
    let mut rep = RPropertyReport::default();
    let p = permutation();
    rep.initial_condition = max_abs_diff(r_matrix(zero(), crossing)?.as_ref(), p.as_ref());
    let fused = r_matrix(-crossing, crossing)?;
    let target = scaled(antisymmetric_projector().as_ref(), c64::new(-2.0, 0.0));
    rep.fusion = max_abs_diff(fused.as_ref(), target.as_ref());

    let id2 = Mat::<c64>::identity(2, 2);
    let v0 = scaled(kron(&pauli_matrix(Pauli::Y), &id2).as_ref(), c64::new(0.0, -1.0));
    let z0 = kron(&pauli_matrix(Pauli::Z), &id2);
    let scale = |u: c64| -> f64 { 1.0 + u.sinh().norm() + (u + crossing).sinh().norm() };

    for (k, &u) in samples.iter().enumerate() {
        let r = r_matrix(u, crossing)?;
        let s = scale(u) / crossing.sinh().norm().min(1.0);

        let phi = unitarity_factor(u, crossing);
        let prod = &r * swap_factors(&r_matrix(-u, crossing)?);
        let target = scaled(Mat::<c64>::identity(4, 4).as_ref(), phi);
        rep.unitarity = rep.unitarity.max(max_abs_diff(prod.as_ref(), target.as_ref()) / (s * s));

        let crossed = &v0 * partial_transpose_second(&r_matrix(-u - crossing, crossing)?) * &v0;
        rep.crossing = rep.crossing.max(max_abs_diff(r.as_ref(), crossed.as_ref()) / s);

        let swapped = swap_factors(&r);
        let transposed = r.transpose().to_owned();
        rep.pt_symmetry = rep
            .pt_symmetry
            .max(max_abs_diff(r.as_ref(), swapped.as_ref()) / s)
            .max(max_abs_diff(r.as_ref(), transposed.as_ref()) / s);

        for alpha in Pauli::ALL {
            let s2 = kron(&pauli_matrix(alpha), &pauli_matrix(alpha));
            let c = &s2 * &r - &r * &s2;
            rep.z2_symmetry = rep.z2_symmetry.max(max_abs(c.as_ref()) / s);
        }

        let shifted = r_matrix(u + c64::new(0.0, std::f64::consts::PI), crossing)?;
        let conj = scaled((&z0 * &r * &z0).as_ref(), c64::new(-1.0, 0.0));
        rep.quasi_periodicity = rep
            .quasi_periodicity
            .max(max_abs_diff(shifted.as_ref(), conj.as_ref()) / s);

        let u2 = samples[(k + 1) % samples.len()];
        let u3 = samples[(k + 2) % samples.len()];
        let ybe = yang_baxter_residual([u, u2, u3], crossing)?;
        let sy = scale(u - u2) * scale(u - u3) * scale(u2 - u3);
        rep.yang_baxter = rep.yang_baxter.max(ybe / sy);
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    const ETA: c64 = c64 { re: 0.8, im: 0.0 };

    #[test]
    fn initial_condition_is_permutation() {
        let r = r_matrix(zero(), ETA).unwrap();
        assert!(max_abs_diff(r.as_ref(), permutation().as_ref()) < 1e-15);
    }

    #[test]
    fn fusion_point_is_rank_one() {
        let r = r_matrix(-ETA, ETA).unwrap();
        let sv = r.singular_values().unwrap();
        let nonzero = sv.iter().filter(|s| **s > 1e-12).count();
        assert_eq!(nonzero, 1);
        assert!((sv[0] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn unitarity_factor_matches_product() {
        let u = c64::new(0.3, -0.2);
        let prod = r_matrix(u, ETA).unwrap() * r_matrix(-u, ETA).unwrap();
        let phi = unitarity_factor(u, ETA);
        for i in 0..4 {
            assert!((prod[(i, i)] - phi).norm() < 1e-12);
        }
    }

    #[test]
    fn yang_baxter_at_reference_point() {
        let u = [c64::new(0.3, 0.0), c64::new(0.0, 0.1), c64::new(-0.2, 0.0)];
        assert!(yang_baxter_residual(u, ETA).unwrap() < 1e-12);
    }

    #[test]
    fn quasi_periodicity_and_crossing_points() {
        let rep = r_property_suite(ETA, &[c64::new(0.7, 0.0), c64::new(0.4, 0.1)]).unwrap();
        assert!(rep.quasi_periodicity < 1e-12);
        assert!(rep.crossing < 1e-12);
    }

    #[test]
    fn embedding_reproduces_kron_for_adjacent_sites() {
        let r = r_matrix(c64::new(0.2, 0.1), ETA).unwrap();
        let id2 = Mat::<c64>::identity(2, 2);
        let direct = kron(&r, &id2);
        let embedded = embed_two_site(&r, 3, 0, 1);
        assert!(max_abs_diff(direct.as_ref(), embedded.as_ref()) < 1e-15);
    }

    #[test]
    fn singular_crossing_is_rejected() {
        assert!(matches!(
            r_matrix(one(), zero()),
            Err(Error::SingularCrossing)
        ));
    }
}

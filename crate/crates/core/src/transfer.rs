//! Twisted transfer matrices, Hamiltonian reconstruction and the shift operator.

use faer::{c64, Mat};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::{max_abs, scaled, OperatorMatrix};
use crate::params::ModelParams;
use crate::pauli::site_mask;
use crate::rmatrix::{r_property_suite, RPropertyReport};

/// Central-difference step for the derivative of `t(u)`.
pub const FD_STEP: f64 = 3e-4;
/// Largest tolerated disagreement between step and half-step derivatives.
pub const FD_DISAGREEMENT_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TransferKind {
    /// `tr_0 sigma^x_0 R_{0,1}(u - theta_1) ... R_{0,2N}(u - theta_2N)`.
    T,
    /// `tr_0 sigma^x_0 R_{0,2N}(u + theta_2N) ... R_{0,1}(u + theta_1)`.
    THat,
}

/// Spectral parameter together with the inhomogeneities.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralPoint {
    pub u: c64,
    pub thetas: Vec<c64>,
}

impl SpectralPoint {
    /// `u` with the staggered inhomogeneities `theta_j = (-1)^j a`.
    pub fn staggered(u: c64, p: &ModelParams) -> Self {
        Self {
            u,
            thetas: p.staggered_thetas(),
        }
    }

    pub fn new(u: c64, thetas: Vec<c64>, p: &ModelParams) -> Result<Self> {
        if thetas.len() != p.two_n() {
            return Err(Error::DimensionMismatch {
                expected: p.two_n(),
                found: thetas.len(),
            });
        }
        Ok(Self { u, thetas })
    }
}

/// Six-vertex weights `(sinh(w + eta), sinh w) / sinh eta`.
fn weights(w: c64, crossing: c64) -> (c64, c64) {
    let sh = crossing.sinh();
    ((w + crossing).sinh() / sh, w.sinh() / sh)
}

/// Applies `R_{0,site}` with the given weights in place to a state stored as
/// its two auxiliary components.
fn apply_r_weighted(aux: &mut [Vec<c64>; 2], mask: usize, diag: c64, weak: c64) {
    let [v0, v1] = aux;
    for s in 0..v0.len() {
        if s & mask != 0 {
            continue;
        }
        let t = s | mask;
        let (a00, a01, a10, a11) = (v0[s], v0[t], v1[s], v1[t]);
        v0[s] = diag * a00;
        v1[t] = diag * a11;
        v0[t] = weak * a01 + a10;
        v1[s] = a01 + weak * a10;
    }
}

/// `t(u)|psi>` or `t_hat(u)|psi>` without forming the matrix.
pub fn apply_transfer(p: &ModelParams, kind: TransferKind, sp: &SpectralPoint, psi: &[c64]) -> Vec<c64> {
    let two_n = p.two_n();
    assert_eq!(psi.len(), p.dim());
    let eta = p.crossing();
    // The rightmost factor acts first.
    let order: Vec<usize> = match kind {
        TransferKind::T => (1..=two_n).rev().collect(),
        TransferKind::THat => (1..=two_n).collect(),
    };
    let factors: Vec<(usize, c64, c64)> = order
        .iter()
        .map(|&j| {
            let w = match kind {
                TransferKind::T => sp.u - sp.thetas[j - 1],
                TransferKind::THat => sp.u + sp.thetas[j - 1],
            };
            let (d, b) = weights(w, eta);
            (site_mask(two_n, j), d, b)
        })
        .collect();
    let zero = vec![c64::new(0.0, 0.0); psi.len()];
    let mut out = vec![c64::new(0.0, 0.0); psi.len()];
    for start in 0..2 {
        let mut aux = [zero.clone(), zero.clone()];
        aux[start] = psi.to_vec();
        for &(mask, d, b) in &factors {
            apply_r_weighted(&mut aux, mask, d, b);
        }
        // sigma^x on the auxiliary space, then keep the diagonal component
        for (o, v) in out.iter_mut().zip(&aux[1 - start]) {
            *o += v;
        }
    }
    out
}

/// Dense transfer matrix built column by column.
pub fn transfer_matrix(sp: &SpectralPoint, p: &ModelParams, kind: TransferKind) -> Result<OperatorMatrix> {
    p.require_dense()?;
    if sp.thetas.len() != p.two_n() {
        return Err(Error::DimensionMismatch {
            expected: p.two_n(),
            found: sp.thetas.len(),
        });
    }
    let dim = p.dim();
    let cols: Vec<Vec<c64>> = (0..dim)
        .into_par_iter()
        .map(|c| {
            let mut e = vec![c64::new(0.0, 0.0); dim];
            e[c] = c64::new(1.0, 0.0);
            apply_transfer(p, kind, sp, &e)
        })
        .collect();
    Ok(OperatorMatrix::general(Mat::from_fn(dim, dim, |i, j| cols[j][i])))
}

fn staggered_t(p: &ModelParams, kind: TransferKind, u: c64) -> Result<Mat<c64>> {
    Ok(transfer_matrix(&SpectralPoint::staggered(u, p), p, kind)?.into_entries())
}

/// `dt/du` at `u` by central differences, Richardson-extrapolated from steps
/// `h` and `h/2`; fails when the two estimates disagree.
pub fn transfer_derivative(p: &ModelParams, u: c64, h: f64) -> Result<Mat<c64>> {
    let central = |step: f64| -> Result<Mat<c64>> {
        let plus = staggered_t(p, TransferKind::T, u + step)?;
        let minus = staggered_t(p, TransferKind::T, u - step)?;
        Ok(scaled((plus - minus).as_ref(), c64::new(0.5 / step, 0.0)))
    };
    let coarse = central(h)?;
    let fine = central(h / 2.0)?;
    let scale = max_abs(fine.as_ref()).max(1.0);
    let disagreement = max_abs((&fine - &coarse).as_ref()) / scale;
    if disagreement > FD_DISAGREEMENT_TOL || !disagreement.is_finite() {
        return Err(Error::FiniteDifference { disagreement });
    }
    let combined = scaled(fine.as_ref(), c64::new(4.0, 0.0)) - coarse;
    Ok(scaled(combined.as_ref(), c64::new(1.0 / 3.0, 0.0)))
}

/// Hamiltonian generated by the transfer matrices at the staggered point.
pub fn reconstruct_hamiltonian(p: &ModelParams) -> Result<OperatorMatrix> {
    reconstruct_hamiltonian_with_step(p, FD_STEP)
}

pub fn reconstruct_hamiltonian_with_step(p: &ModelParams, h: f64) -> Result<OperatorMatrix> {
    p.require_dense()?;
    let a = p.a();
    let n = p.n() as i32;
    let that_minus = staggered_t(p, TransferKind::THat, -a)?;
    let that_plus = staggered_t(p, TransferKind::THat, a)?;
    let d_plus = transfer_derivative(p, a, h)?;
    let d_minus = transfer_derivative(p, -a, h)?;
    let pref = -p.phi2a().powi(1 - n) * p.crossing().sinh();
    let mut m = scaled((&that_minus * &d_plus + &that_plus * &d_minus).as_ref(), pref);
    for i in 0..m.nrows() {
        m[(i, i)] += p.e0();
    }
    Ok(OperatorMatrix::general(m))
}

/// `U = phi(2a)^(-N) t(a) t(-a)` at the staggered point.
pub fn shift_operator(p: &ModelParams) -> Result<OperatorMatrix> {
    p.require_dense()?;
    let a = p.a();
    let tp = staggered_t(p, TransferKind::T, a)?;
    let tm = staggered_t(p, TransferKind::T, -a)?;
    let norm = p.phi2a().powi(-(p.n() as i32));
    OperatorMatrix::unitary(scaled((&tp * &tm).as_ref(), norm))
}

/// `d(u) = prod_j sinh(u - theta_j) / sinh eta`.
pub fn quantum_determinant_factor(u: c64, thetas: &[c64], crossing: c64) -> c64 {
    let sh = crossing.sinh();
    thetas.iter().map(|&t| (u - t).sinh() / sh).product()
}

/// Largest entry of `t(theta_j) t(theta_j - eta) + a(theta_j) d(theta_j - eta)`
/// over all `j`, with `a(u) = d(u + eta)`.
pub fn operator_product_identity_residual(p: &ModelParams, thetas: &[c64]) -> Result<f64> {
    let eta = p.crossing();
    let mut worst = 0.0f64;
    for &th in thetas {
        let t1 = transfer_matrix(&SpectralPoint::new(th, thetas.to_vec(), p)?, p, TransferKind::T)?;
        let t2 = transfer_matrix(&SpectralPoint::new(th - eta, thetas.to_vec(), p)?, p, TransferKind::T)?;
        let mut prod = t1.entries() * t2.entries();
        let scalar = quantum_determinant_factor(th + eta, thetas, eta)
            * quantum_determinant_factor(th - eta, thetas, eta);
        for i in 0..prod.nrows() {
            prod[(i, i)] += scalar;
        }
        worst = worst.max(max_abs(prod.as_ref()));
    }
    Ok(worst)
}

/// Relative residuals of the transfer-matrix identities for one model.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IdentityReport {
    pub two_n: usize,
    pub r_matrix: RPropertyReport,
    /// `max |[t(u), t(v)]|`, `[t_hat, t_hat]` and `[t, t_hat]` over the sample pairs.
    pub commutativity: f64,
    /// `t(u) + t_hat(-u - eta)`.
    pub reflection: f64,
    pub product_identity: f64,
    pub reconstruction: f64,
    /// `[U, H]`.
    pub shift_commutator: f64,
}

impl IdentityReport {
    pub fn entries(&self) -> Vec<(&'static str, f64)> {
        let mut out: Vec<(&'static str, f64)> = self.r_matrix.entries().to_vec();
        out.extend([
            ("commutativity", self.commutativity),
            ("reflection", self.reflection),
            ("product_identity", self.product_identity),
            ("reconstruction", self.reconstruction),
            ("shift_commutator", self.shift_commutator),
        ]);
        out
    }

    pub fn max_residual(&self) -> f64 {
        self.entries().iter().map(|e| e.1).fold(0.0, f64::max)
    }
}

fn relative(diff: f64, scale: f64) -> f64 {
    diff / scale.max(1.0)
}

/// Evaluates every identity at the given spectral parameters; residuals are
/// divided by the size of the terms involved.
pub fn identity_suite(p: &ModelParams, samples: &[c64]) -> Result<IdentityReport> {
    p.require_dense()?;
    let eta = p.crossing();
    let r_matrix = r_property_suite(eta, samples)?;
    let mats = |kind: TransferKind| -> Result<Vec<Mat<c64>>> {
        samples
            .iter()
            .map(|&u| Ok(staggered_t(p, kind, u)?))
            .collect()
    };
    let ts = mats(TransferKind::T)?;
    let hats = mats(TransferKind::THat)?;
    let mut commutativity = 0.0f64;
    let mut reflection = 0.0f64;
    for i in 0..samples.len() {
        let j = (i + 1) % samples.len();
        for (x, y) in [(&ts[i], &ts[j]), (&hats[i], &hats[j]), (&ts[i], &hats[i]), (&ts[i], &hats[j])] {
            let c = x * y - y * x;
            commutativity = commutativity.max(relative(max_abs(c.as_ref()), max_abs(x.as_ref()) * max_abs(y.as_ref())));
        }
        let mirrored = staggered_t(p, TransferKind::THat, -samples[i] - eta)?;
        let sum = &ts[i] + &mirrored;
        reflection = reflection.max(relative(max_abs(sum.as_ref()), max_abs(ts[i].as_ref())));
    }
    let perturbed: Vec<c64> = p
        .staggered_thetas()
        .iter()
        .enumerate()
        .map(|(j, t)| t + c64::new(0.0, 0.05 * (j + 1) as f64))
        .collect();
    let product_scale = perturbed
        .iter()
        .map(|&th| (quantum_determinant_factor(th + eta, &perturbed, eta) * quantum_determinant_factor(th - eta, &perturbed, eta)).norm())
        .fold(0.0, f64::max);
    let product_identity = relative(operator_product_identity_residual(p, &perturbed)?, product_scale);
    let h = crate::hamiltonian::build_hamiltonian(p)?;
    let reconstruction = relative(h.max_abs_diff(&reconstruct_hamiltonian(p)?), h.max_abs());
    let u = shift_operator(p)?;
    let shift_commutator = relative(u.commutator_norm(&h), h.max_abs());
    Ok(IdentityReport {
        two_n: p.two_n(),
        r_matrix,
        commutativity,
        reflection,
        product_identity,
        reconstruction,
        shift_commutator,
    })
}

//! Full diagonalization of hermitian operators.

use faer::{c64, Mat, Side};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::operator::OperatorMatrix;

/// Relative residual bound `||H v - E v|| < RESIDUAL_TOL ||H||` per eigenpair.
pub const RESIDUAL_TOL: f64 = 1e-9;
/// Default degeneracy tolerance relative to `||H||`.
pub const DEFAULT_REL_TOL_DEG: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct SpectrumResult {
    /// Ascending eigenvalues.
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors as columns, in eigenvalue order.
    pub eigenvectors: Mat<c64>,
    /// Consecutive index ranges whose eigenvalues are chained within `tol_deg`.
    pub degeneracy_groups: Vec<Vec<usize>>,
    pub tol_deg: f64,
    /// Largest relative residual over all eigenpairs.
    pub max_residual: f64,
}

impl SpectrumResult {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn vector(&self, i: usize) -> Vec<c64> {
        self.eigenvectors.col(i).iter().copied().collect()
    }

    /// Index of the group containing state `i`.
    pub fn group_of(&self, i: usize) -> usize {
        self.degeneracy_groups
            .iter()
            .position(|g| g.contains(&i))
            .expect("every state belongs to a group")
    }
}

/// Splits into the two sectors of the global spin flip when `h` commutes with it.
fn flip_symmetric(h: &OperatorMatrix) -> bool {
    let dim = h.dim();
    if dim < 4 || !dim.is_power_of_two() {
        return false;
    }
    let m = h.entries();
    let tol = 1e-14 * h.max_abs().max(f64::MIN_POSITIVE);
    let mask = dim - 1;
    (0..dim).all(|j| (0..dim).all(|i| (m[(i, j)] - m[(i ^ mask, j ^ mask)]).norm() <= tol))
}

/// Sector block `H_± = H[s, s'] ± H[s, !s']` on indices with the top bit clear.
fn sector_block(h: &OperatorMatrix, sign: f64) -> Mat<c64> {
    let dim = h.dim();
    let half = dim / 2;
    let mask = dim - 1;
    let m = h.entries();
    let mut out = Mat::zeros(half, half);
    for j in 0..half {
        for i in 0..half {
            out[(i, j)] = m[(i, j)] + m[(i, j ^ mask)] * sign;
        }
    }
    out
}

fn hermitian_values(m: &Mat<c64>) -> Result<Vec<f64>> {
    m.self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::EigenFailure(format!("{e:?}")))
}

fn hermitian_eigen(m: &Mat<c64>) -> Result<(Vec<f64>, Mat<c64>)> {
    let evd = m
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::EigenFailure(format!("{e:?}")))?;
    let s = evd.S().column_vector();
    let values = (0..s.nrows()).map(|i| s[i].re).collect();
    Ok((values, evd.U().to_owned()))
}

fn require_hermitian(h: &OperatorMatrix) -> Result<()> {
    if !h.is_hermitian() {
        return Err(Error::NotHermitian {
            deviation: h.hermiticity_defect(),
        });
    }
    Ok(())
}

/// Ascending eigenvalues without eigenvectors.
pub fn eigenvalues(h: &OperatorMatrix) -> Result<Vec<f64>> {
    require_hermitian(h)?;
    let mut values = if flip_symmetric(h) {
        let (even, odd) = rayon::join(
            || hermitian_values(&sector_block(h, 1.0)),
            || hermitian_values(&sector_block(h, -1.0)),
        );
        let mut v = even?;
        v.extend(odd?);
        v
    } else {
        hermitian_values(&h.entries().to_owned())?
    };
    values.sort_by(f64::total_cmp);
    Ok(values)
}

/// Full spectrum, eigenbasis and degeneracy groups.
///
/// `tol_deg` defaults to `1e-8 ||H||`. Every eigenpair is checked against the
/// relative residual bound and the phase of each vector is fixed so that its
/// largest-modulus amplitude (lowest index on ties) is real positive.
pub fn diagonalize(h: &OperatorMatrix, tol_deg: Option<f64>) -> Result<SpectrumResult> {
    require_hermitian(h)?;
    let dim = h.dim();
    let (values, vectors) = if flip_symmetric(h) {
        let half = dim / 2;
        let mask = dim - 1;
        let (even, odd) = rayon::join(
            || hermitian_eigen(&sector_block(h, 1.0)),
            || hermitian_eigen(&sector_block(h, -1.0)),
        );
        let mut values = Vec::with_capacity(dim);
        let mut vectors = Mat::zeros(dim, dim);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        for (offset, (sign, sector)) in [(1.0, even?), (-1.0, odd?)].into_iter().enumerate() {
            let (vals, u) = sector;
            for (k, v) in vals.into_iter().enumerate() {
                let col = offset * half + k;
                values.push(v);
                for s in 0..half {
                    let c = u[(s, k)] * r;
                    vectors[(s, col)] = c;
                    vectors[(s ^ mask, col)] = c * sign;
                }
            }
        }
        (values, vectors)
    } else {
        hermitian_eigen(&h.entries().to_owned())?
    };

    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| values[i]).collect();
    let mut eigenvectors = Mat::zeros(dim, dim);
    for (new, &old) in order.iter().enumerate() {
        let mut col: Vec<c64> = vectors.col(old).iter().copied().collect();
        fix_phase(&mut col);
        for (i, v) in col.into_iter().enumerate() {
            eigenvectors[(i, new)] = v;
        }
    }

    let h_norm = spectral_scale(&eigenvalues);
    let max_residual = max_relative_residual(h, &eigenvalues, &eigenvectors, h_norm);
    if max_residual > RESIDUAL_TOL {
        return Err(Error::NotConverged {
            residual: max_residual,
            tolerance: RESIDUAL_TOL,
        });
    }
    let tol_deg = tol_deg.unwrap_or(DEFAULT_REL_TOL_DEG * h_norm);
    let degeneracy_groups = group_levels(&eigenvalues, tol_deg);
    Ok(SpectrumResult {
        eigenvalues,
        eigenvectors,
        degeneracy_groups,
        tol_deg,
        max_residual,
    })
}

/// Eigen-decomposition of a small normal matrix `M`.
///
/// `M` commutes with its adjoint, so its eigenvectors diagonalize the
/// hermitian combination `Re M + g Im M` for a generic weight `g`.
pub fn resolve_normal_block(m: &Mat<c64>) -> Result<(Vec<c64>, Mat<c64>)> {
    const WEIGHT: f64 = 0.618_033_988_749_895;
    let n = m.nrows();
    let mut h = Mat::<c64>::zeros(n, n);
    for j in 0..n {
        for i in 0..n {
            let re = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
            let im = (m[(i, j)] - m[(j, i)].conj()) * c64::new(0.0, -0.5);
            h[(i, j)] = re + im * WEIGHT;
        }
    }
    let (_, w) = hermitian_eigen(&h)?;
    let mw = m * &w;
    let values = (0..n)
        .map(|k| (0..n).map(|i| w[(i, k)].conj() * mw[(i, k)]).sum())
        .collect();
    Ok((values, w))
}

/// `V^H A V` for the columns `V` of `group`, with `A` given by its action.
pub fn project_block<F>(spec: &SpectrumResult, group: &[usize], apply: F) -> Mat<c64>
where
    F: Fn(&[c64]) -> Vec<c64> + Sync,
{
    let images: Vec<Vec<c64>> = group
        .par_iter()
        .map(|&j| apply(&spec.vector(j)))
        .collect();
    let mut m = Mat::zeros(group.len(), group.len());
    for (a, &i) in group.iter().enumerate() {
        let vi = spec.eigenvectors.col(i);
        for (b, img) in images.iter().enumerate() {
            m[(a, b)] = vi.iter().zip(img).map(|(x, y)| x.conj() * y).sum();
        }
    }
    m
}

/// Rotates every degeneracy group onto the eigenbasis of a normal operator
/// commuting with `H`; returns the new spectrum and the operator eigenvalue
/// of each state.
pub fn resolve_degeneracies<F>(spec: &SpectrumResult, apply: F) -> Result<(SpectrumResult, Vec<c64>)>
where
    F: Fn(&[c64]) -> Vec<c64> + Sync,
{
    let dim = spec.dim();
    let mut out = spec.clone();
    let mut labels = vec![c64::new(0.0, 0.0); dim];
    for group in &spec.degeneracy_groups {
        let block = project_block(spec, group, &apply);
        let (values, w) = resolve_normal_block(&block)?;
        for (k, &target) in group.iter().enumerate() {
            let mut col = vec![c64::new(0.0, 0.0); dim];
            for (a, &src) in group.iter().enumerate() {
                let coeff = w[(a, k)];
                for (c, v) in col.iter_mut().zip(spec.eigenvectors.col(src).iter()) {
                    *c += coeff * v;
                }
            }
            fix_phase(&mut col);
            for (i, v) in col.into_iter().enumerate() {
                out.eigenvectors[(i, target)] = v;
            }
            labels[target] = values[k];
        }
    }
    Ok((out, labels))
}

/// `||H||_2` from the spectrum, floored away from zero.
pub fn spectral_scale(eigenvalues: &[f64]) -> f64 {
    eigenvalues
        .iter()
        .fold(0.0f64, |m, e| m.max(e.abs()))
        .max(f64::MIN_POSITIVE)
}

/// Chains ascending levels whose neighbours differ by less than `tol`.
pub fn group_levels(eigenvalues: &[f64], tol: f64) -> Vec<Vec<usize>> {
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (i, &e) in eigenvalues.iter().enumerate() {
        match groups.last_mut() {
            Some(g) if (e - eigenvalues[*g.last().unwrap()]).abs() < tol => g.push(i),
            _ => groups.push(vec![i]),
        }
    }
    groups
}

/// Rotates `v` so that its largest-modulus entry is real positive.
pub fn fix_phase(v: &mut [c64]) {
    let max = v.iter().fold(0.0f64, |m, z| m.max(z.norm()));
    if max == 0.0 {
        return;
    }
    let pivot = v
        .iter()
        .position(|z| z.norm() >= max * (1.0 - 1e-12))
        .expect("maximum is attained");
    let phase = v[pivot].conj() / v[pivot].norm();
    for z in v.iter_mut() {
        *z *= phase;
    }
}

fn max_relative_residual(h: &OperatorMatrix, values: &[f64], vectors: &Mat<c64>, h_norm: f64) -> f64 {
    let m = h.entries();
    let dim = h.dim();
    // Row-compressed copy of the nonzeros keeps the check at O(nnz * dim).
    let rows: Vec<Vec<(usize, c64)>> = (0..dim)
        .map(|i| {
            (0..dim)
                .filter_map(|j| {
                    let v = m[(i, j)];
                    (v != c64::new(0.0, 0.0)).then_some((j, v))
                })
                .collect()
        })
        .collect();
    (0..dim)
        .into_par_iter()
        .map(|k| {
            let col = vectors.col(k);
            let mut sq = 0.0;
            for (i, row) in rows.iter().enumerate() {
                let hv: c64 = row.iter().map(|&(j, v)| v * col[j]).sum();
                sq += (hv - col[i] * values[k]).norm_sqr();
            }
            sq.sqrt() / h_norm
        })
        .reduce(|| 0.0, f64::max)
}

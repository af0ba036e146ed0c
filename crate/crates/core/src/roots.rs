//! Zero roots of transfer-matrix eigenvalues, and energy and momentum from roots.

use std::cmp::Ordering;
use std::f64::consts::{FRAC_PI_2, PI};

use faer::{c64, Mat};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{condition_number, polynomial_roots, solve};
use crate::operator::{inner, norm};
use crate::params::{ModelParams, Regime};
use crate::spectrum::{project_block, resolve_degeneracies, resolve_normal_block, SpectrumResult};
use crate::transfer::{apply_transfer, SpectralPoint, TransferKind};

/// Real offset of the reference point used to split degenerate levels.
pub const REFERENCE_POINT: f64 = 0.37;
/// Sample offsets tried in turn when the sample matrix is ill conditioned.
pub const SAMPLE_OFFSETS: [f64; 5] = [0.37, 0.29, 0.45, 0.53, 0.21];
pub const MAX_CONDITION: f64 = 1e8;
/// Absolute tolerance of the `z -> -z*` pairing.
pub const TOL_PAIR: f64 = 1e-6;
/// Roots this close to `+i pi/2` are moved to `-i pi/2`.
const STRIP_SNAP: f64 = 1e-7;
const EIGEN_TOL: f64 = 1e-8;
const IMAG_RESIDUE_TOL: f64 = 1e-8;
const POLE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum RootTag {
    /// On the imaginary axis (real-eta regime).
    Imaginary,
    /// Member of a pair at real part `± n eta / 2`.
    ConjugatePair { n: u32 },
    /// On the imaginary axis in the shifted regime.
    BoundaryString,
    Unknown,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ZeroRootSet {
    pub lambda0: c64,
    /// Canonically ordered roots with `Im z` in `[-pi/2, pi/2)`.
    pub roots: Vec<c64>,
    /// Index pairs `(i, j)`, `i <= j`, with `z_j ≈ -conj(z_i)`.
    pub pairing: Vec<(usize, usize)>,
    pub tags: Vec<RootTag>,
    /// Largest distance between `-conj(z_i)` and its partner.
    pub pairing_defect: f64,
    /// Condition number of the sample matrix used for extraction.
    pub condition: f64,
}

impl ZeroRootSet {
    /// Builds a root set from raw roots: strip mapping, ordering, pairing, tags.
    pub fn from_roots(lambda0: c64, roots: &[c64], p: &ModelParams) -> Self {
        let mut roots: Vec<c64> = roots.iter().map(|&z| to_strip(z)).collect();
        roots.sort_by(canonical_cmp);
        let (pairing, pairing_defect) = pair_roots(&roots);
        let tags = roots.iter().map(|&z| tag_root(z, p)).collect();
        Self {
            lambda0,
            roots,
            pairing,
            tags,
            pairing_defect,
            condition: f64::NAN,
        }
    }

    pub fn is_paired(&self) -> bool {
        self.pairing_defect < TOL_PAIR
    }

    /// `Lambda(u) = Lambda0 prod_j sinh(u - z_j + eta/2)`.
    pub fn eval(&self, u: c64, p: &ModelParams) -> c64 {
        let half = p.crossing() * 0.5;
        self.lambda0 * self.roots.iter().map(|&z| (u - z + half).sinh()).product::<c64>()
    }
}

/// Maps the imaginary part into `[-pi/2, pi/2)`.
pub fn to_strip(z: c64) -> c64 {
    let mut im = (z.im + FRAC_PI_2).rem_euclid(PI) - FRAC_PI_2;
    if (im - FRAC_PI_2).abs() < STRIP_SNAP {
        im -= PI;
    }
    if (im + FRAC_PI_2).abs() < STRIP_SNAP {
        im = -FRAC_PI_2;
    }
    c64::new(z.re, im)
}

/// Ascending real part, then ascending imaginary part for equal real parts.
pub fn canonical_cmp(a: &c64, b: &c64) -> Ordering {
    if (a.re - b.re).abs() > 1e-6 {
        a.re.total_cmp(&b.re)
    } else {
        a.im.total_cmp(&b.im)
    }
}

/// Distance between two points of the strip modulo `i pi`.
pub fn strip_distance(a: c64, b: c64) -> f64 {
    let d = a - b;
    let im = (d.im + FRAC_PI_2).rem_euclid(PI) - FRAC_PI_2;
    c64::new(d.re, im).norm()
}

fn pair_roots(roots: &[c64]) -> (Vec<(usize, usize)>, f64) {
    let mut used = vec![false; roots.len()];
    let mut pairs = Vec::new();
    let mut defect = 0.0f64;
    for i in 0..roots.len() {
        if used[i] {
            continue;
        }
        let mirror = -roots[i].conj();
        let best = (0..roots.len())
            .filter(|&j| !used[j])
            .map(|j| (j, strip_distance(mirror, roots[j])))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("root i itself is unused");
        used[i] = true;
        used[best.0] = true;
        defect = defect.max(best.1);
        pairs.push((i.min(best.0), i.max(best.0)));
    }
    (pairs, defect)
}

/// Half-width of a pattern cluster, relative to the decay scale.
pub const CLUSTER_WIDTH: f64 = 0.1;

/// Tag from the real part: `0` is on-axis, `± n eta / 2` with `n >= 2` is a
/// pair, tested in increasing `n` with the first match winning.
pub fn tag_root(z: c64, p: &ModelParams) -> RootTag {
    let eta = p.eta();
    let width = CLUSTER_WIDTH * eta;
    let x = z.re.abs();
    if x < width {
        return match p.regime() {
            Regime::RealEta => RootTag::Imaginary,
            Regime::EtaPlusIPi => RootTag::BoundaryString,
        };
    }
    let max_n = (2.0 * x / eta).ceil() as u32 + 1;
    (2..=max_n.max(2))
        .find(|&n| (x - n as f64 * eta / 2.0).abs() < width)
        .map_or(RootTag::Unknown, |n| RootTag::ConjugatePair { n })
}

/// Sample points `u_k = offset + i pi (k - 1) / 2N`.
pub fn sample_points(p: &ModelParams, offset: f64) -> Vec<c64> {
    let two_n = p.two_n();
    (0..two_n)
        .map(|k| c64::new(offset, PI * k as f64 / two_n as f64))
        .collect()
}

/// Checks that `psi` is an eigenvector of `t(u0)` and returns its eigenvalue.
pub fn transfer_eigenvalue(p: &ModelParams, psi: &[c64], u0: c64) -> Result<c64> {
    let t_psi = apply_transfer(p, TransferKind::T, &SpectralPoint::staggered(u0, p), psi);
    let nrm2 = norm(psi).powi(2);
    let lambda = inner(psi, &t_psi) / nrm2;
    let residual: f64 = t_psi
        .iter()
        .zip(psi)
        .map(|(a, b)| (a - lambda * b).norm_sqr())
        .sum::<f64>()
        .sqrt();
    let scale = norm(&t_psi).max(1.0);
    if residual > EIGEN_TOL * scale {
        return Err(Error::NotTransferEigenstate { residual: residual / scale });
    }
    Ok(lambda)
}

/// `Lambda(u_k) = <psi| t(u_k) |psi>` for a normalized transfer eigenstate.
pub fn lambda_on_state(p: &ModelParams, psi: &[c64], samples: &[c64]) -> Result<Vec<c64>> {
    transfer_eigenvalue(p, psi, c64::new(REFERENCE_POINT, 0.0))?;
    let nrm2 = norm(psi).powi(2);
    Ok(samples
        .iter()
        .map(|&u| inner(psi, &apply_transfer(p, TransferKind::T, &SpectralPoint::staggered(u, p), psi)) / nrm2)
        .collect())
}

/// Rotates each degeneracy group of `spec` onto eigenvectors of `t(0.37)`.
pub fn transfer_eigenbasis(p: &ModelParams, spec: &SpectrumResult) -> Result<SpectrumResult> {
    let sp = SpectralPoint::staggered(c64::new(REFERENCE_POINT, 0.0), p);
    let (resolved, _) = resolve_degeneracies(spec, |v| apply_transfer(p, TransferKind::T, &sp, v))?;
    Ok(resolved)
}

/// Transfer eigenstates spanning one degeneracy group of `spec`.
pub fn resolve_group(p: &ModelParams, spec: &SpectrumResult, group: &[usize]) -> Result<Vec<Vec<c64>>> {
    let sp = SpectralPoint::staggered(c64::new(REFERENCE_POINT, 0.0), p);
    let block = project_block(spec, group, |v| apply_transfer(p, TransferKind::T, &sp, v));
    let (_, w) = resolve_normal_block(&block)?;
    Ok((0..group.len())
        .map(|k| {
            let mut col = vec![c64::new(0.0, 0.0); spec.dim()];
            for (a, &src) in group.iter().enumerate() {
                let coeff = w[(a, k)];
                for (c, v) in col.iter_mut().zip(spec.eigenvectors.col(src).iter()) {
                    *c += coeff * v;
                }
            }
            col
        })
        .collect())
}

const POLISH_SWEEPS: usize = 4;

/// Simultaneous Weierstrass refinement of the roots against `Lambda` evaluated
/// directly on the state; a sweep is kept only if it lowers the residual.
fn polish_roots(p: &ModelParams, psi: &[c64], lambda0: c64, mut roots: Vec<c64>) -> Vec<c64> {
    let half = p.crossing() * 0.5;
    let nrm2 = norm(psi).powi(2);
    let lambda_at = |u: c64| {
        inner(psi, &apply_transfer(p, TransferKind::T, &SpectralPoint::staggered(u, p), psi)) / nrm2
    };
    let residual = |roots: &[c64]| -> (Vec<c64>, f64) {
        let vals: Vec<c64> = roots.iter().map(|&z| lambda_at(z - half)).collect();
        let worst = roots
            .iter()
            .zip(&vals)
            .map(|(&z, v)| {
                let others: c64 = roots
                    .iter()
                    .filter(|&&w| w != z)
                    .map(|&w| (z - w).sinh())
                    .product();
                (v / (lambda0 * others)).norm()
            })
            .fold(0.0, f64::max);
        (vals, worst)
    };
    let (mut vals, mut worst) = residual(&roots);
    for _ in 0..POLISH_SWEEPS {
        if !worst.is_finite() || worst < 1e-15 {
            break;
        }
        let next: Vec<c64> = roots
            .iter()
            .zip(&vals)
            .map(|(&z, v)| {
                let others: c64 = roots
                    .iter()
                    .filter(|&&w| w != z)
                    .map(|&w| (z - w).sinh())
                    .product();
                z - (v / (lambda0 * others)).asinh()
            })
            .collect();
        let (next_vals, next_worst) = residual(&next);
        if !(next_worst < worst) {
            break;
        }
        roots = next;
        vals = next_vals;
        worst = next_worst;
    }
    roots
}

/// Zero roots and `Lambda0` of the transfer eigenvalue on `psi`.
pub fn extract_zero_roots(p: &ModelParams, psi: &[c64]) -> Result<ZeroRootSet> {
    let degree = p.two_n() - 1;
    let mut last_condition = f64::NAN;
    for &offset in &SAMPLE_OFFSETS {
        let us = sample_points(p, offset);
        let ws: Vec<c64> = us.iter().map(|u| (u * 2.0).exp()).collect();
        let vander = Mat::from_fn(us.len(), us.len(), |i, m| ws[i].powi(m as i32));
        let condition = condition_number(&vander)?;
        last_condition = condition;
        if condition > MAX_CONDITION {
            continue;
        }
        let lambdas = lambda_on_state(p, psi, &us)?;
        let ys: Vec<c64> = us
            .iter()
            .zip(&lambdas)
            .map(|(u, l)| (u * degree as f64).exp() * l)
            .collect();
        let coeffs = solve(&vander, &ys);
        let lead = coeffs[degree];
        let coeff_scale = coeffs.iter().fold(0.0f64, |m, c| m.max(c.norm()));
        if lead.norm() < 1e-13 * coeff_scale {
            return Err(Error::IllConditioned { condition: f64::INFINITY });
        }
        let half = p.crossing() * 0.5;
        let ws_roots = polynomial_roots(&coeffs)?;
        let raw: Vec<c64> = ws_roots.iter().map(|r| r.ln() * 0.5 + half).collect();
        let lambda0 = lead * 2f64.powi(degree as i32) * raw.iter().map(|&z| z - half).sum::<c64>().exp();
        let polished = polish_roots(p, psi, lambda0, raw);
        let mut set = ZeroRootSet::from_roots(c64::new(0.0, 0.0), &polished, p);
        let product: c64 = set.roots.iter().map(|&z| (us[0] - z + half).sinh()).product();
        set.lambda0 = lambdas[0] / product;
        set.condition = condition;
        return Ok(set);
    }
    Err(Error::IllConditioned { condition: last_condition })
}

fn coth(x: c64) -> c64 {
    x.cosh() / x.sinh()
}

/// Energy from zero roots at the staggered point.
pub fn energy_from_roots(roots: &[c64], p: &ModelParams) -> Result<f64> {
    let a = p.a();
    let half = p.crossing() * 0.5;
    let mut sum = c64::new(0.0, 0.0);
    for &z in roots {
        for arg in [z - a - half, z + a - half] {
            let s = arg.sinh();
            if s.norm() < POLE_TOL {
                return Err(Error::RootAtPole {
                    root: format!("{z}"),
                    distance: s.norm(),
                });
            }
            sum += coth(arg);
        }
    }
    let e = p.phi2a() * p.crossing().sinh() * sum + p.e0();
    let scale = e.norm().max(1.0);
    if e.im.abs() > IMAG_RESIDUE_TOL * scale {
        return Err(Error::ImaginaryResidue {
            quantity: "energy",
            residue: e.im,
        });
    }
    Ok(e.re)
}

/// Reduces an angle into `[-pi, pi)`.
pub fn wrap_angle(x: f64) -> f64 {
    let w = (x + PI).rem_euclid(2.0 * PI) - PI;
    if w >= PI {
        -PI
    } else {
        w
    }
}

/// Topological momentum from zero roots, principal-branch logarithms.
pub fn momentum_from_roots(roots: &[c64], p: &ModelParams) -> Result<f64> {
    let a = p.a();
    let half = p.crossing() * 0.5;
    let mut total = c64::new(0.0, 0.0);
    for &z in roots {
        let num = (a + z - half).sinh();
        let den = (a - z - half).sinh();
        if num.norm() < POLE_TOL || den.norm() < POLE_TOL {
            return Err(Error::BranchPoint { root: format!("{z}") });
        }
        total += (num / den).ln();
    }
    let k = total * c64::new(0.0, -1.0);
    if k.im.abs() > IMAG_RESIDUE_TOL * roots.len() as f64 {
        return Err(Error::ImaginaryResidue {
            quantity: "momentum",
            residue: k.im,
        });
    }
    Ok(wrap_angle(k.re))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyMomentum {
    pub energy: f64,
    /// In `[-pi, pi)`.
    pub momentum: f64,
}

/// Eigenphase of the shift operator on a transfer eigenstate, in `[-pi, pi)`.
pub fn shift_eigenphase(p: &ModelParams, psi: &[c64]) -> f64 {
    let a = p.a();
    let tm = apply_transfer(p, TransferKind::T, &SpectralPoint::staggered(-a, p), psi);
    let u_psi = apply_transfer(p, TransferKind::T, &SpectralPoint::staggered(a, p), &tm);
    let value = inner(psi, &u_psi) / (norm(psi).powi(2) * p.phi2a().powi(p.n() as i32));
    wrap_angle(value.arg())
}

/// Per-state results of the extraction route.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RootRow {
    pub index: usize,
    pub ed_energy: f64,
    pub roots: ZeroRootSet,
    pub root_energy: f64,
    pub root_momentum: f64,
    pub shift_phase: f64,
}

/// Extracts roots, energy and momentum for every state of a resolved spectrum.
pub fn root_table(p: &ModelParams, resolved: &SpectrumResult, states: &[usize]) -> Result<Vec<RootRow>> {
    use rayon::prelude::*;
    states
        .par_iter()
        .map(|&i| {
            let psi = resolved.vector(i);
            let roots = extract_zero_roots(p, &psi)?;
            Ok(RootRow {
                index: i,
                ed_energy: resolved.eigenvalues[i],
                root_energy: energy_from_roots(&roots.roots, p)?,
                root_momentum: momentum_from_roots(&roots.roots, p)?,
                shift_phase: shift_eigenphase(p, &psi),
                roots,
            })
        })
        .collect()
}

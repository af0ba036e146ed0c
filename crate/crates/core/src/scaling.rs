//! Finite-size scaling of analytic results against exact diagonalization.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::build_hamiltonian;
use crate::params::{ModelParams, Regime};
use crate::roots::{extract_zero_roots, resolve_group, RootTag, ZeroRootSet};
use crate::spectrum::{diagonalize, eigenvalues, SpectrumResult};
use crate::thermo::{
    excitation_energy_i, excitation_energy_ii_phase1, excitation_energy_ii_phase2, ground_energy_i,
    ground_state_ii, phase_of, Phase, Truncation,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FitModel {
    /// `A e^{-c x}`
    Exponential,
    /// `A x^{-c}`
    PowerLaw,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScalingFit {
    pub model: FitModel,
    pub amplitude: f64,
    pub rate: f64,
    /// Root-mean-square residual of the log-space fit.
    pub residual: f64,
    pub points: Vec<(f64, f64)>,
}

impl ScalingFit {
    pub fn predict(&self, x: f64) -> f64 {
        match self.model {
            FitModel::Exponential => self.amplitude * (-self.rate * x).exp(),
            FitModel::PowerLaw => self.amplitude * x.powf(-self.rate),
        }
    }
}

/// Least-squares line through `ln delta` against `x` or `ln x`.
pub fn scaling_fit(points: &[(f64, f64)], model: FitModel) -> Result<ScalingFit> {
    if points.len() < 3 {
        return Err(Error::TooFewPoints(points.len()));
    }
    if let Some(&(x, value)) = points.iter().find(|p| !(p.1 > 0.0)) {
        return Err(Error::NonPositiveData { x, value });
    }
    let xs: Vec<f64> = points
        .iter()
        .map(|&(x, _)| match model {
            FitModel::Exponential => x,
            FitModel::PowerLaw => x.ln(),
        })
        .collect();
    let ys: Vec<f64> = points.iter().map(|&(_, y)| y.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = (xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    Ok(ScalingFit {
        model,
        amplitude: intercept.exp(),
        rate: -slope,
        residual,
        points: points.to_vec(),
    })
}

/// Analytic value against its finite-size counterpart at one size.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SizePoint {
    pub two_n: usize,
    pub analytic: f64,
    pub numeric: f64,
    /// `analytic - numeric`
    pub delta: f64,
    /// Pair height or boundary-root position of the matched state.
    pub root_parameter: Option<f64>,
}

impl SizePoint {
    fn new(two_n: usize, analytic: f64, numeric: f64, root_parameter: Option<f64>) -> Self {
        Self {
            two_n,
            analytic,
            numeric,
            delta: analytic - numeric,
            root_parameter,
        }
    }
}

/// `(2N, |delta|)` pairs ready for fitting.
pub fn fit_points(points: &[SizePoint]) -> Vec<(f64, f64)> {
    points.iter().map(|s| (s.two_n as f64, s.delta.abs())).collect()
}

fn ed_ground(p: &ModelParams) -> Result<f64> {
    Ok(eigenvalues(&build_hamiltonian(p)?)?[0])
}

/// Ground energy for real eta against ED.
pub fn ground_point_real(p: &ModelParams) -> Result<SizePoint> {
    Ok(SizePoint::new(p.two_n(), ground_energy_i(p)?, ed_ground(p)?, None))
}

/// Ground energy of the shifted regime (lower of the two branches) against ED.
pub fn ground_point_shifted(p: &ModelParams) -> Result<SizePoint> {
    let g = ground_state_ii(p, Truncation::AUTO)?;
    Ok(SizePoint::new(p.two_n(), g.energy, ed_ground(p)?, None))
}

/// Walks the spectrum upwards from the first excited level and returns the
/// first state whose zero roots satisfy `accept`, with its excitation energy.
fn first_matching_state<T>(
    p: &ModelParams,
    spec: &SpectrumResult,
    max_groups: usize,
    accept: impl Fn(&ZeroRootSet) -> Option<T>,
) -> Result<(f64, T)> {
    let ground = spec.eigenvalues[0];
    for group in spec.degeneracy_groups.iter().skip(1).take(max_groups) {
        for psi in resolve_group(p, spec, group)? {
            let Ok(zrs) = extract_zero_roots(p, &psi) else {
                continue;
            };
            if let Some(v) = accept(&zrs) {
                return Ok((spec.eigenvalues[group[0]] - ground, v));
            }
        }
    }
    Err(Error::StateNotFound(format!("no matching root pattern in the lowest {max_groups} levels")))
}

const SEARCH_LEVELS: usize = 60;

/// Lowest state with one conjugate pair of order `n` and all other roots on
/// the imaginary axis; compares its gap with the pair excitation energy at the
/// measured height.
pub fn pair_excitation_point(p: &ModelParams, n: u32) -> Result<SizePoint> {
    p.require_regime(Regime::RealEta, "pair_excitation_point")?;
    let spec = diagonalize(&build_hamiltonian(p)?, None)?;
    let (gap, lambda) = first_matching_state(p, &spec, SEARCH_LEVELS, |zrs| {
        let pairs: Vec<usize> = (0..zrs.roots.len())
            .filter(|&i| zrs.tags[i] == RootTag::ConjugatePair { n })
            .collect();
        let on_axis = zrs.tags.iter().filter(|t| **t == RootTag::Imaginary).count();
        (pairs.len() == 2 && on_axis == zrs.roots.len() - 2).then(|| zrs.roots[pairs[0]].im)
    })?;
    Ok(SizePoint::new(p.two_n(), excitation_energy_i(p, n, lambda)?, gap, Some(lambda)))
}

/// Lowest state with the boundary root moved off its ground value and every
/// other root in a pair at `± eta_plus`.
pub fn boundary_excitation_point(p: &ModelParams) -> Result<SizePoint> {
    p.require_regime(Regime::EtaPlusIPi, "boundary_excitation_point")?;
    let phase = phase_of(p.b());
    let ground_mu = match phase {
        Phase::II => -std::f64::consts::FRAC_PI_2,
        _ => 0.0,
    };
    let spec = diagonalize(&build_hamiltonian(p)?, None)?;
    let (gap, mu) = first_matching_state(p, &spec, SEARCH_LEVELS, |zrs| {
        let axis: Vec<usize> = (0..zrs.roots.len())
            .filter(|&i| zrs.tags[i] == RootTag::BoundaryString)
            .collect();
        let pairs = zrs.tags.iter().filter(|t| **t == RootTag::ConjugatePair { n: 2 }).count();
        if axis.len() != 1 || pairs != zrs.roots.len() - 1 {
            return None;
        }
        let mu = zrs.roots[axis[0]].im;
        let d = (mu - ground_mu).rem_euclid(std::f64::consts::PI);
        (d.min(std::f64::consts::PI - d) > 1e-6).then_some(mu)
    })?;
    let analytic = match phase {
        Phase::II => excitation_energy_ii_phase2(p, mu, Truncation::AUTO)?,
        _ => excitation_energy_ii_phase1(p, mu, Truncation::AUTO)?,
    };
    Ok(SizePoint::new(p.two_n(), analytic, gap, Some(mu)))
}

/// Applies `f` at each size, keeping the remaining constants of `p`.
pub fn size_scan(
    p: &ModelParams,
    sizes: &[usize],
    f: impl Fn(&ModelParams) -> Result<SizePoint>,
) -> Result<Vec<SizePoint>> {
    sizes.iter().map(|&s| f(&p.with_two_n(s)?)).collect()
}

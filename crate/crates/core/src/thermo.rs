//! Thermodynamic-limit densities, energies and momenta.
//!
//! Fourier convention on `[-pi/2, pi/2)`:
//! `f(x) = (1/pi) sum_w f~(w) e^{2iwx}`, `f~(w) = int f(x) e^{-2iwx} dx`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use faer::c64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{ModelParams, Regime};
use crate::roots::wrap_angle;

/// Bound on the neglected tail of every series.
pub const TAIL_TOL: f64 = 1e-12;
const IMAGINARY_TOL: f64 = 1e-10;

/// `ceil(-ln(1e-14) / decay) + 4`.
pub fn default_omega_max(decay: f64) -> usize {
    (-(1e-14f64).ln() / decay).ceil() as usize + 4
}

/// Truncation policy for the Fourier series.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Truncation {
    /// Fixed cutoff; `None` picks one from the decay rate of each series.
    pub omega_max: Option<usize>,
}

impl Truncation {
    pub const AUTO: Self = Self { omega_max: None };

    pub fn fixed(omega_max: usize) -> Self {
        Self {
            omega_max: Some(omega_max),
        }
    }

    fn cutoff(self, decay: f64) -> usize {
        self.omega_max.unwrap_or_else(|| default_omega_max(decay))
    }
}

/// `sum_{w>=1} term(w)`, where `|term(w)| <= amplitude e^{-decay w}`.
///
/// With `alternating`, consecutive terms are combined before accumulation.
fn series(
    trunc: Truncation,
    decay: f64,
    amplitude: f64,
    alternating: bool,
    term: impl Fn(usize) -> f64,
) -> Result<f64> {
    let omega_max = trunc.cutoff(decay);
    let bound = amplitude.abs() * (-decay * (omega_max + 1) as f64).exp() / (1.0 - (-decay).exp());
    if !(bound < TAIL_TOL) {
        return Err(Error::SeriesNotConverged {
            omega_max,
            bound,
            tolerance: TAIL_TOL,
        });
    }
    let mut total = 0.0;
    if alternating {
        let mut w = 1;
        while w + 1 <= omega_max {
            total += term(w) + term(w + 1);
            w += 2;
        }
        if w == omega_max {
            total += term(w);
        }
    } else {
        for w in 1..=omega_max {
            total += term(w);
        }
    }
    Ok(total)
}

fn sign_alt(w: usize) -> f64 {
    if w % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Real part of a quantity that must be real; fails on a sizeable imaginary part.
fn real_part(quantity: &'static str, v: c64) -> Result<f64> {
    if v.im.abs() > IMAGINARY_TOL * v.re.abs().max(1.0) {
        return Err(Error::ImaginaryResidue {
            quantity,
            residue: v.im,
        });
    }
    Ok(v.re)
}

// ---------------------------------------------------------------- kernels

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum KernelFamily {
    /// `ln[sin(x - i n eta/2) sin(x + i n eta/2)]`
    Beta,
    /// `2 sin 2x / (cosh n eta - cos 2x)`
    B,
    /// `ln[cos(x - i n eta/2) cos(x + i n eta/2)]`
    Gamma,
    /// `tan(x + i n eta/2) + tan(x - i n eta/2)`
    C,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Kernel {
    pub family: KernelFamily,
    pub order: u32,
    pub eta: f64,
}

impl Kernel {
    pub fn new(family: KernelFamily, order: u32, eta: f64) -> Self {
        Self { family, order, eta }
    }

    fn half_width(&self) -> f64 {
        self.order as f64 * self.eta / 2.0
    }

    pub fn value(&self, x: f64) -> c64 {
        let y = c64::new(0.0, self.half_width());
        let x = c64::new(x, 0.0);
        match self.family {
            KernelFamily::Beta => ((x - y).sin() * (x + y).sin()).ln(),
            KernelFamily::B => {
                let d = (self.order as f64 * self.eta).cosh() - (2.0 * x.re).cos();
                c64::new(2.0 * (2.0 * x.re).sin() / d, 0.0)
            }
            KernelFamily::Gamma => ((x - y).cos() * (x + y).cos()).ln(),
            KernelFamily::C => (x + y).tan() + (x - y).tan(),
        }
    }

    pub fn transform(&self, w: i64) -> c64 {
        let decay = (-(self.order as f64) * self.eta * w.unsigned_abs() as f64).exp();
        let sign = w.signum() as f64;
        let parity = sign_alt(w.unsigned_abs() as usize);
        let beta = if w == 0 {
            c64::new(PI * (2.0 * self.half_width() - 2.0 * 2f64.ln()), 0.0)
        } else {
            c64::new(-PI * decay / w.unsigned_abs() as f64, 0.0)
        };
        match self.family {
            KernelFamily::Beta => beta,
            KernelFamily::B => c64::new(0.0, -2.0 * PI * sign * decay),
            KernelFamily::Gamma => beta * parity,
            KernelFamily::C => c64::new(0.0, 2.0 * PI * sign * parity * decay),
        }
    }
}

// ---------------------------------------------------------------- densities

/// Fourier representation of a root density, with an optional point mass
/// split off when a coefficient family does not decay.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DensityProfile {
    pub omega_max: usize,
    /// Coefficients for `w = -omega_max..=omega_max`.
    pub coefficients: Vec<c64>,
    /// `(position, weight)` of delta-function contributions.
    pub point_masses: Vec<(f64, f64)>,
}

impl DensityProfile {
    fn from_fn(omega_max: usize, zero: f64, f: impl Fn(i64) -> c64) -> Self {
        let m = omega_max as i64;
        let coefficients = (-m..=m)
            .map(|w| if w == 0 { c64::new(zero, 0.0) } else { f(w) })
            .collect();
        Self {
            omega_max,
            coefficients,
            point_masses: Vec::new(),
        }
    }

    /// Regular-part coefficient, zero beyond the cutoff.
    pub fn coefficient(&self, w: i64) -> c64 {
        let m = self.omega_max as i64;
        if w.abs() > m {
            c64::new(0.0, 0.0)
        } else {
            self.coefficients[(w + m) as usize]
        }
    }

    /// Full transform, point masses included.
    pub fn transform(&self, w: i64) -> c64 {
        self.point_masses
            .iter()
            .fold(self.coefficient(w), |acc, &(x, m)| {
                acc + c64::from_polar(m, -2.0 * w as f64 * x)
            })
    }

    /// Regular part in real space.
    pub fn eval(&self, x: f64) -> f64 {
        let mut s = self.coefficient(0).re;
        for w in 1..=self.omega_max as i64 {
            let e = c64::from_polar(1.0, 2.0 * w as f64 * x);
            s += 2.0 * (self.coefficient(w) * e).re;
        }
        s / PI
    }

    pub fn on_grid(&self, points: usize) -> Vec<(f64, f64)> {
        (0..points)
            .map(|k| {
                let x = -FRAC_PI_2 + PI * k as f64 / points as f64;
                (x, self.eval(x))
            })
            .collect()
    }

    /// `int rho dx`, point masses included.
    pub fn normalization(&self) -> f64 {
        self.transform(0).re
    }

    /// `max |rho~(-w) - rho~(w)*|`.
    pub fn reality_defect(&self) -> f64 {
        (1..=self.omega_max as i64)
            .map(|w| (self.coefficient(-w) - self.coefficient(w).conj()).norm())
            .fold(0.0, f64::max)
    }
}

/// Ground-state density for real `eta`.
pub fn ground_density_i(p: &ModelParams, trunc: Truncation) -> Result<DensityProfile> {
    p.require_regime(Regime::RealEta, "ground_density_i")?;
    let (eta, b) = (p.eta(), p.b());
    let zero = 1.0 - 1.0 / p.two_n() as f64;
    Ok(DensityProfile::from_fn(trunc.cutoff(eta), zero, |w| {
        c64::new((-eta * w.abs() as f64).exp() * (2.0 * w as f64 * b).cos(), 0.0)
    }))
}

/// Closed real-space form of the ground-state density for real `eta`.
pub fn ground_density_i_closed(p: &ModelParams, x: f64) -> f64 {
    let (q, b) = ((-p.eta()).exp(), p.b());
    let lorentz = |c: f64| (1.0 - q * c) / (1.0 - 2.0 * q * c + q * q);
    (lorentz((2.0 * x + 2.0 * b).cos()) + lorentz((2.0 * x - 2.0 * b).cos()) - 1.0) / PI
        - 1.0 / (p.two_n() as f64 * PI)
}

/// Density with one conjugate pair `± n eta / 2 + i lambda` removed from the
/// imaginary axis. For `n = 2` the non-decaying part is a point mass at `lambda`.
pub fn excited_density_i(p: &ModelParams, n: u32, lambda: f64, trunc: Truncation) -> Result<DensityProfile> {
    p.require_regime(Regime::RealEta, "excited_density_i")?;
    check_pair_order(n)?;
    let (eta, b) = (p.eta(), p.b());
    let inv = 1.0 / p.two_n() as f64;
    let delta_weight = if n == 2 { -inv } else { 0.0 };
    let zero = 1.0 - 3.0 * inv - delta_weight;
    let mut d = DensityProfile::from_fn(trunc.cutoff(eta), zero, |w| {
        let a = w.abs() as f64;
        let phase = c64::from_polar(1.0, -2.0 * w as f64 * lambda);
        let slow = if n == 2 {
            0.0
        } else {
            (-((n - 2) as f64) * eta * a).exp()
        };
        c64::new((-eta * a).exp() * (2.0 * w as f64 * b).cos(), 0.0)
            - phase * inv * ((-(n as f64) * eta * a).exp() + slow)
    });
    if n == 2 {
        d.point_masses.push((lambda, delta_weight));
    }
    Ok(d)
}

/// Ground-state density of the paired roots in the shifted regime, with the
/// boundary root at `i mu`.
pub fn ground_density_ii(p: &ModelParams, mu: f64, trunc: Truncation) -> Result<DensityProfile> {
    excitation_density_ii(p, &[mu], trunc)
}

/// Paired-root density with on-axis roots at `i mu_k` (one for the ground
/// branch, three for the second excitation branch). Each on-axis root leaves a
/// point mass of weight `-1/2N` at its position.
pub fn excitation_density_ii(p: &ModelParams, mus: &[f64], trunc: Truncation) -> Result<DensityProfile> {
    p.require_regime(Regime::EtaPlusIPi, "excitation_density_ii")?;
    let (eta, b) = (p.eta(), p.b());
    let inv = 1.0 / p.two_n() as f64;
    // one pair per two off-axis roots
    let total = (p.two_n() - 1 - mus.len()) as f64 * inv / 2.0;
    let zero = total + mus.len() as f64 * inv;
    let mut d = DensityProfile::from_fn(trunc.cutoff(eta), zero, |w| {
        let a = w.abs() as f64;
        let q = (-2.0 * eta * a).exp();
        let boundary: c64 = mus.iter().map(|&m| c64::from_polar(inv, -2.0 * w as f64 * m)).sum();
        let bulk = sign_alt(w.unsigned_abs() as usize) * (-eta * a).exp() * (2.0 * w as f64 * b).cos();
        (boundary * q + bulk) / (1.0 + q)
    });
    d.point_masses = mus.iter().map(|&m| (m, -inv)).collect();
    Ok(d)
}

fn check_pair_order(n: u32) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidParams(format!("pair order must be at least 2, got {n}")));
    }
    Ok(())
}

fn check_angle(name: &str, v: f64) -> Result<()> {
    if !(-FRAC_PI_2..FRAC_PI_2).contains(&v) {
        return Err(Error::InvalidParams(format!("{name} = {v} must lie in [-pi/2, pi/2)")));
    }
    Ok(())
}

// ---------------------------------------------------------------- regime I

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyMomentum {
    pub energy: f64,
    /// In `[-pi, pi)`.
    pub momentum: f64,
}

pub fn ground_energy_i(p: &ModelParams) -> Result<f64> {
    p.require_regime(Regime::RealEta, "ground_energy_i")?;
    let (eta, b) = (p.eta(), p.b());
    let n = p.n() as f64;
    Ok(-2.0 * n * eta.cosh() - n * eta.cosh() * (2.0 * b).sin().powi(2) / eta.sinh().powi(2)
        + ((2.0 * eta).cosh() - (4.0 * b).cos()) / eta.sinh())
}

pub fn excitation_energy_i(p: &ModelParams, n: u32, lambda: f64) -> Result<f64> {
    p.require_regime(Regime::RealEta, "excitation_energy_i")?;
    check_pair_order(n)?;
    let (eta, b) = (p.eta(), p.b());
    let pre = ((2.0 * eta).cosh() - (4.0 * b).cos()) / eta.sinh();
    let m = (n - 1) as f64 * eta;
    Ok(pre
        * (m.sinh() / (m.cosh() - (2.0 * lambda + 2.0 * b).cos())
            + m.sinh() / (m.cosh() - (2.0 * lambda - 2.0 * b).cos())))
}

pub fn excitation_momentum_i(p: &ModelParams, n: u32, lambda: f64, trunc: Truncation) -> Result<f64> {
    p.require_regime(Regime::RealEta, "excitation_momentum_i")?;
    check_pair_order(n)?;
    let (eta, b) = (p.eta(), p.b());
    let nf = n as f64;
    // e^{-n eta w} cosh(eta w) decays at rate (n - 1) eta
    let s = series(trunc, (nf - 1.0) * eta, 4.0, false, |w| {
        let wf = w as f64;
        4.0 * (2.0 * wf * lambda).sin() / wf * (2.0 * wf * b).cos() * (-nf * eta * wf).exp() * (eta * wf).cosh()
    })?;
    let lo = (nf - 1.0) / 2.0 * eta;
    let hi = (nf + 1.0) / 2.0 * eta;
    let sn = |re: f64, im: f64| c64::new(re, im).sin();
    let first = (sn(b + lambda, lo) * sn(b + lambda, -hi) / (sn(b - lambda, lo) * sn(b - lambda, -hi))).ln();
    let second = (sn(b + lambda, -lo) * sn(b + lambda, hi) / (sn(b - lambda, -lo) * sn(b - lambda, hi))).ln();
    let bracket = c64::new(0.0, 0.5) * (first - second);
    Ok(wrap_angle(s + real_part("k1", bracket)?))
}

pub fn excitation_i(p: &ModelParams, n: u32, lambda: f64, trunc: Truncation) -> Result<EnergyMomentum> {
    check_angle("lambda", lambda)?;
    Ok(EnergyMomentum {
        energy: excitation_energy_i(p, n, lambda)?,
        momentum: excitation_momentum_i(p, n, lambda, trunc)?,
    })
}

// ---------------------------------------------------------------- regime II

struct ShiftedConstants {
    eta: f64,
    b: f64,
    n: f64,
    /// `cosh 2 eta_+ - cos 4b`
    c: f64,
}

impl ShiftedConstants {
    fn new(p: &ModelParams, what: &str) -> Result<Self> {
        p.require_regime(Regime::EtaPlusIPi, what)?;
        let (eta, b) = (p.eta(), p.b());
        Ok(Self {
            eta,
            b,
            n: p.n() as f64,
            c: (2.0 * eta).cosh() - (4.0 * b).cos(),
        })
    }

    fn lorentz(&self, mu: f64) -> f64 {
        0.5 * self.c
            * (1.0 / (self.eta.cosh() + (2.0 * (mu + self.b)).cos())
                + 1.0 / (self.eta.cosh() + (2.0 * (mu - self.b)).cos()))
    }

    /// `sum_w (-1)^w e^{-eta w} cos(2bw) f(w) tanh(eta w)`, pairwise.
    fn alternating(&self, trunc: Truncation, f: impl Fn(f64) -> f64) -> Result<f64> {
        let amp = 2.0 * self.c / self.eta.sinh() * 2.0;
        series(trunc, self.eta, amp, true, |w| {
            let wf = w as f64;
            sign_alt(w) * (-self.eta * wf).exp() * (2.0 * self.b * wf).cos() * f(wf) * (self.eta * wf).tanh()
        })
    }

    fn bulk(&self, trunc: Truncation) -> Result<f64> {
        let amp = 4.0 * self.n * self.c / self.eta.sinh();
        let s1 = series(trunc, 2.0 * self.eta, amp, false, |w| {
            let wf = w as f64;
            (-2.0 * self.eta * wf).exp() * (2.0 * self.b * wf).cos().powi(2) * (self.eta * wf).tanh()
        })?;
        Ok(-amp * s1
            + self.n * self.eta.cosh() * ((2.0 * self.b).cos().powi(2) - (2.0 * self.eta).cosh())
                / self.eta.sinh().powi(2))
    }

    fn pref(&self) -> f64 {
        2.0 * self.c / self.eta.sinh()
    }
}

/// Energy of the ground branch with the boundary root at `i mu`.
pub fn boundary_energy(p: &ModelParams, mu: f64, trunc: Truncation) -> Result<f64> {
    let k = ShiftedConstants::new(p, "boundary_energy")?;
    let s2 = k.alternating(trunc, |w| (2.0 * mu * w).cos())?;
    Ok(k.bulk(trunc)? + k.pref() * s2 + k.lorentz(mu))
}

/// Ground energy for `b < pi/4` (boundary root at 0).
pub fn ground_energy_ii_phase1(p: &ModelParams, trunc: Truncation) -> Result<f64> {
    let k = ShiftedConstants::new(p, "ground_energy_ii_phase1")?;
    let s2 = k.alternating(trunc, |_| 1.0)?;
    Ok(k.bulk(trunc)? + k.pref() * s2 + k.c / (k.eta.cosh() + (2.0 * k.b).cos()))
}

/// Ground energy for `b > pi/4` (boundary root at `-i pi/2`).
pub fn ground_energy_ii_phase2(p: &ModelParams, trunc: Truncation) -> Result<f64> {
    let k = ShiftedConstants::new(p, "ground_energy_ii_phase2")?;
    let amp = k.pref() * 2.0;
    let s = series(trunc, k.eta, amp, false, |w| {
        let wf = w as f64;
        (-k.eta * wf).exp() * (2.0 * k.b * wf).cos() * (k.eta * wf).tanh()
    })?;
    Ok(k.bulk(trunc)? + k.pref() * s + k.c / (k.eta.cosh() - (2.0 * k.b).cos()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Phase {
    /// `b < pi/4`, boundary root at 0.
    I,
    /// `b > pi/4`, boundary root at `-i pi/2`.
    II,
    /// `b = pi/4`, both branches degenerate.
    Critical,
}

pub fn phase_of(b: f64) -> Phase {
    if (b - FRAC_PI_4).abs() < 1e-12 {
        Phase::Critical
    } else if b < FRAC_PI_4 {
        Phase::I
    } else {
        Phase::II
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroundStateII {
    pub phase: Phase,
    pub phase1_energy: f64,
    pub phase2_energy: f64,
    /// Minimum of the two; at the critical point both are reported and tied.
    pub energy: f64,
}

pub fn ground_state_ii(p: &ModelParams, trunc: Truncation) -> Result<GroundStateII> {
    let e1 = ground_energy_ii_phase1(p, trunc)?;
    let e2 = ground_energy_ii_phase2(p, trunc)?;
    Ok(GroundStateII {
        phase: phase_of(p.b()),
        phase1_energy: e1,
        phase2_energy: e2,
        energy: e1.min(e2),
    })
}

/// Grid point in `[-pi/2, pi/2)` minimizing the boundary energy.
pub fn boundary_minimizer(p: &ModelParams, points: usize, trunc: Truncation) -> Result<f64> {
    let grid: Vec<f64> = (0..points)
        .map(|k| -FRAC_PI_2 + PI * k as f64 / points as f64)
        .collect();
    let values: Vec<f64> = grid
        .par_iter()
        .map(|&mu| boundary_energy(p, mu, trunc))
        .collect::<Result<_>>()?;
    let best = values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .unwrap_or(0);
    Ok(grid[best])
}

/// Single on-axis root contribution shared by both excitation branches.
pub fn single_root_energy(p: &ModelParams, mu: f64, trunc: Truncation) -> Result<f64> {
    let k = ShiftedConstants::new(p, "single_root_energy")?;
    Ok(k.pref() * k.alternating(trunc, |w| (2.0 * mu * w).cos())? + k.lorentz(mu))
}

/// First-branch excitation energy in phase I.
pub fn excitation_energy_ii_phase1(p: &ModelParams, mu: f64, trunc: Truncation) -> Result<f64> {
    let k = ShiftedConstants::new(p, "excitation_energy_ii_phase1")?;
    let s = k.alternating(trunc, |w| (2.0 * mu * w).cos() - 1.0)?;
    Ok(k.pref() * s + k.lorentz(mu) - k.c / (k.eta.cosh() + (2.0 * k.b).cos()))
}

/// First-branch excitation energy in phase II.
pub fn excitation_energy_ii_phase2(p: &ModelParams, mu: f64, trunc: Truncation) -> Result<f64> {
    let k = ShiftedConstants::new(p, "excitation_energy_ii_phase2")?;
    let amp = k.pref() * 2.0;
    let s = series(trunc, k.eta, amp, false, |w| {
        let wf = w as f64;
        (-k.eta * wf).exp() * (sign_alt(w) * (2.0 * mu * wf).cos() - 1.0) * (2.0 * k.b * wf).cos() * (k.eta * wf).tanh()
    })?;
    Ok(k.pref() * s + k.lorentz(mu) - k.c / (k.eta.cosh() - (2.0 * k.b).cos()))
}

pub fn excitation_momentum_ii(p: &ModelParams, mu: f64, trunc: Truncation) -> Result<f64> {
    let k = ShiftedConstants::new(p, "excitation_momentum_ii")?;
    let s = series(trunc, k.eta, 2.0, false, |w| {
        let wf = w as f64;
        2.0 * (2.0 * wf * mu).sin() / wf * (2.0 * wf * k.b).cos() * (-k.eta * wf).exp() * (k.eta * wf).tanh()
    })?;
    let cs = |re: f64, im: f64| c64::new(re, im).cos();
    let h = k.eta / 2.0;
    let first = (cs(k.b + mu, -h) / cs(k.b - mu, -h)).ln();
    let second = (cs(k.b + mu, h) / cs(k.b - mu, h)).ln();
    let bracket = c64::new(0.0, 0.5) * (first - second);
    Ok(wrap_angle(s + real_part("k2", bracket)?))
}

/// Momentum of the phase-II branch: the phase-I momentum shifted by pi.
pub fn excitation_momentum_ii_phase2(p: &ModelParams, mu: f64, trunc: Truncation) -> Result<f64> {
    Ok(wrap_angle(excitation_momentum_ii(p, mu, trunc)? + PI))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ExcitationQuery {
    /// Conjugate pair of order `n` at height `lambda` (real eta).
    PairI { n: u32, lambda: f64 },
    /// Boundary root at `i mu`, phase I.
    BoundaryI { mu: f64 },
    /// Boundary root at `i mu`, phase II.
    BoundaryII { mu: f64 },
    /// Two on-axis roots from a broken pair.
    Spinon { mu1: f64, mu2: f64 },
}

impl ExcitationQuery {
    pub fn required_regime(&self) -> Regime {
        match self {
            ExcitationQuery::PairI { .. } => Regime::RealEta,
            _ => Regime::EtaPlusIPi,
        }
    }
}

pub fn excitation(q: ExcitationQuery, p: &ModelParams, trunc: Truncation) -> Result<EnergyMomentum> {
    p.require_regime(q.required_regime(), "excitation")?;
    match q {
        ExcitationQuery::PairI { n, lambda } => excitation_i(p, n, lambda, trunc),
        ExcitationQuery::BoundaryI { mu } => {
            check_angle("mu", mu)?;
            if phase_of(p.b()) == Phase::II {
                return Err(Error::RegimeMismatch("phase-I branch requested with b > pi/4".into()));
            }
            Ok(EnergyMomentum {
                energy: excitation_energy_ii_phase1(p, mu, trunc)?,
                momentum: excitation_momentum_ii(p, mu, trunc)?,
            })
        }
        ExcitationQuery::BoundaryII { mu } => {
            check_angle("mu", mu)?;
            if phase_of(p.b()) == Phase::I {
                return Err(Error::RegimeMismatch("phase-II branch requested with b < pi/4".into()));
            }
            Ok(EnergyMomentum {
                energy: excitation_energy_ii_phase2(p, mu, trunc)?,
                momentum: excitation_momentum_ii_phase2(p, mu, trunc)?,
            })
        }
        ExcitationQuery::Spinon { mu1, mu2 } => {
            check_angle("mu1", mu1)?;
            check_angle("mu2", mu2)?;
            Ok(EnergyMomentum {
                energy: single_root_energy(p, mu1, trunc)? + single_root_energy(p, mu2, trunc)?,
                momentum: wrap_angle(excitation_momentum_ii(p, mu1, trunc)? + excitation_momentum_ii(p, mu2, trunc)?),
            })
        }
    }
}

// ---------------------------------------------------------------- transition

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QptScan {
    pub b: Vec<f64>,
    /// `min(E_phase1, E_phase2) / 2N`
    pub energy_per_site: Vec<f64>,
    /// Forward differences at the midpoints `(b_i + b_{i+1}) / 2`.
    pub derivative: Vec<f64>,
    pub critical_b: f64,
    /// One-sided slopes of the two branches at `pi/4` (per site).
    pub slope_phase1: f64,
    pub slope_phase2: f64,
    /// `|slope_phase1 - slope_phase2|`
    pub derivative_jump: f64,
    /// Largest second difference of the derivative away from the kink.
    pub grid_noise: f64,
    /// Largest first difference of the derivative away from the kink.
    pub curvature_variation: f64,
    /// `|E_phase1 - E_phase2| / 2N` at `pi/4`.
    pub crossing_mismatch: f64,
    /// Largest change of the per-site energy between neighbouring grid points.
    pub max_energy_step: f64,
}

fn richardson_slope(f: impl Fn(f64) -> Result<f64>, x: f64, h: f64) -> Result<f64> {
    let d = |s: f64| -> Result<f64> { Ok((f(x + s)? - f(x - s)?) / (2.0 * s)) };
    Ok((4.0 * d(h / 2.0)? - d(h)?) / 3.0)
}

/// Per-site ground energy over a `b` grid in the shifted regime.
///
/// The kink is located from the derivative increments after removing the
/// smooth trend seen two intervals away on either side.
pub fn qpt_scan(p: &ModelParams, b_grid: &[f64], trunc: Truncation) -> Result<QptScan> {
    p.require_regime(Regime::EtaPlusIPi, "qpt_scan")?;
    let mut grid = b_grid.to_vec();
    grid.sort_by(f64::total_cmp);
    let below = grid.iter().rev().find(|&&b| b < FRAC_PI_4);
    let above = grid.iter().find(|&&b| b > FRAC_PI_4);
    match (below, above) {
        (Some(lo), Some(hi)) if hi - lo <= 0.1 + 1e-12 => {}
        (Some(lo), Some(hi)) => {
            return Err(Error::GridTooCoarse(format!("bracket [{lo}, {hi}] wider than 0.1")));
        }
        _ => return Err(Error::GridTooCoarse("grid does not straddle pi/4".into())),
    }
    if grid.len() < 7 {
        return Err(Error::GridTooCoarse(format!("{} points cannot separate a kink from its trend", grid.len())));
    }
    let sites = p.two_n() as f64;
    let energy_per_site: Vec<f64> = grid
        .par_iter()
        .map(|&b| Ok(ground_state_ii(&p.with_b(b)?, trunc)?.energy / sites))
        .collect::<Result<_>>()?;
    let derivative: Vec<f64> = grid
        .windows(2)
        .zip(energy_per_site.windows(2))
        .map(|(b, e)| (e[1] - e[0]) / (b[1] - b[0]))
        .collect();
    let increments: Vec<f64> = derivative.windows(2).map(|d| d[1] - d[0]).collect();
    let kink = (2..increments.len().saturating_sub(2))
        .max_by(|&i, &j| {
            let excess = |k: usize| (increments[k] - 0.5 * (increments[k - 2] + increments[k + 2])).abs();
            excess(i).total_cmp(&excess(j))
        })
        .unwrap_or(0);
    let critical_b = grid[kink + 1];
    let away = |i: usize| i.abs_diff(kink) > 3;
    let curvature_variation = increments
        .iter()
        .enumerate()
        .filter(|(i, _)| away(*i))
        .map(|(_, c)| c.abs())
        .fold(0.0, f64::max);
    let grid_noise = increments
        .windows(2)
        .enumerate()
        .filter(|(i, _)| away(*i) && away(i + 1))
        .map(|(_, w)| (w[1] - w[0]).abs())
        .fold(0.0, f64::max);
    let max_energy_step = energy_per_site
        .windows(2)
        .map(|e| (e[1] - e[0]).abs())
        .fold(0.0, f64::max);
    let g = ground_state_ii(&p.with_b(FRAC_PI_4)?, trunc)?;
    let h = 1e-3;
    let slope_phase1 = richardson_slope(|b| ground_energy_ii_phase1(&p.with_b(b)?, trunc), FRAC_PI_4, h)? / sites;
    let slope_phase2 = richardson_slope(|b| ground_energy_ii_phase2(&p.with_b(b)?, trunc), FRAC_PI_4, h)? / sites;
    Ok(QptScan {
        b: grid,
        energy_per_site,
        derivative,
        critical_b,
        slope_phase1,
        slope_phase2,
        derivative_jump: (slope_phase1 - slope_phase2).abs(),
        grid_noise,
        curvature_variation,
        crossing_mismatch: (g.phase1_energy - g.phase2_energy).abs() / sites,
        max_energy_step,
    })
}

/// Uniform grid on `[lo, hi]` with the given step, endpoints included.
pub fn uniform_grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let count = ((hi - lo) / step + 1e-9).floor() as usize;
    (0..=count).map(|k| lo + step * k as f64).collect()
}

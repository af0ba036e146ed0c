//! Model constants of the twisted J1-J2 chain.
//!
//! The chain has `two_n` sites, model parameter `a = i b` and crossing
//! parameter `eta` (real, or shifted by `i pi` in the antiferromagnetic
//! regime). Everything else is derived once at construction.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest chain handled by the dense operator routines.
pub const MAX_DENSE_SITES: usize = 14;

/// Tolerance used to decide whether a complex parameter is real / imaginary.
const HERMITICITY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    /// `eta` real and positive: ferromagnetic z coupling.
    RealEta,
    /// `eta = eta_plus + i pi` with `eta_plus > 0`: antiferromagnetic z coupling.
    EtaPlusIPi,
}

impl Regime {
    pub fn name(self) -> &'static str {
        match self {
            Regime::RealEta => "real-eta",
            Regime::EtaPlusIPi => "eta-plus-i-pi",
        }
    }
}

impl std::str::FromStr for Regime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "real-eta" | "real" | "I" | "1" => Ok(Regime::RealEta),
            "eta-plus-i-pi" | "eta-plus" | "II" | "2" => Ok(Regime::EtaPlusIPi),
            other => Err(Error::InvalidParams(format!("unknown regime '{other}'"))),
        }
    }
}

/// Nearest-neighbour, next-nearest-neighbour and chiral couplings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Couplings {
    pub j1x: Complex64,
    pub j1z: Complex64,
    pub j2: Complex64,
    pub j3x: Complex64,
    pub j3z: Complex64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    two_n: usize,
    b: f64,
    eta: f64,
    regime: Regime,
    a: Complex64,
    crossing: Complex64,
    phi2a: Complex64,
    e0: Complex64,
    couplings: Couplings,
}

impl ModelParams {
    /// Builds the parameter set from `(2N, b, eta, regime)`.
    ///
    /// In [`Regime::EtaPlusIPi`], `eta` is the real part `eta_plus` and the
    /// crossing parameter used everywhere is `eta + i pi`.
    pub fn new(two_n: usize, b: f64, eta: f64, regime: Regime) -> Result<Self> {
        if !b.is_finite() || !eta.is_finite() {
            return Err(Error::InvalidParams("b and eta must be finite".into()));
        }
        if eta <= 0.0 {
            return Err(Error::InvalidParams(format!(
                "eta must be positive, got {eta}"
            )));
        }
        if regime == Regime::EtaPlusIPi && !(b > 0.0 && b < FRAC_PI_2) {
            return Err(Error::InvalidParams(format!(
                "b must lie in (0, pi/2) when eta is shifted by i pi, got {b}"
            )));
        }
        let crossing = match regime {
            Regime::RealEta => Complex64::new(eta, 0.0),
            Regime::EtaPlusIPi => Complex64::new(eta, PI),
        };
        Self::from_complex(two_n, Complex64::new(0.0, b), crossing)
    }

    /// Builds the parameter set from complex `a` and crossing parameter.
    ///
    /// Rejects combinations for which the Hamiltonian is not hermitian: `a`
    /// must be purely imaginary while `eta` is real or lies on `R + i pi`.
    pub fn from_complex(two_n: usize, a: Complex64, crossing: Complex64) -> Result<Self> {
        if two_n < 4 || two_n % 2 != 0 {
            return Err(Error::InvalidParams(format!(
                "number of sites must be even and at least 4, got {two_n}"
            )));
        }
        if a.re.abs() > HERMITICITY_TOL {
            return Err(Error::NonHermitian(format!(
                "a = {a} must be purely imaginary for real eta"
            )));
        }
        let regime = if crossing.im.abs() <= HERMITICITY_TOL {
            Regime::RealEta
        } else if (crossing.im - PI).abs() <= HERMITICITY_TOL {
            Regime::EtaPlusIPi
        } else {
            return Err(Error::NonHermitian(format!(
                "eta = {crossing} is neither real nor on R + i pi"
            )));
        };
        if crossing.re <= 0.0 {
            return Err(Error::InvalidParams(format!(
                "real part of eta must be positive, got {}",
                crossing.re
            )));
        }
        let sh = crossing.sinh();
        if sh.norm() < 1e-300 {
            return Err(Error::SingularCrossing);
        }

        let n_half = (two_n / 2) as f64;
        let ch = crossing.cosh();
        let two_a = a * 2.0;
        let couplings = Couplings {
            j1x: two_a.cosh(),
            j1z: ch,
            j2: -two_a.sinh().powi(2) * ch / (sh.powi(2) * 2.0),
            j3x: Complex64::i() * two_a.sinh() * ch / (sh * 2.0),
            j3z: Complex64::i() * (a * 4.0).sinh() / (sh * 4.0),
        };
        let phi2a = -(two_a + crossing).sinh() * (two_a - crossing).sinh() / sh.powi(2);
        let e0 = -(ch * n_half) * (two_a.cosh().powi(2) - (crossing * 2.0).cosh()) / sh.powi(2);

        Ok(Self {
            two_n,
            b: a.im,
            eta: crossing.re,
            regime,
            a: Complex64::new(0.0, a.im),
            crossing,
            phi2a,
            e0,
            couplings,
        })
    }

    pub fn two_n(&self) -> usize {
        self.two_n
    }

    /// Half the number of sites.
    pub fn n(&self) -> usize {
        self.two_n / 2
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// Real part of the crossing parameter (`eta_plus` in the shifted regime).
    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    /// The model parameter `a = i b`.
    pub fn a(&self) -> Complex64 {
        self.a
    }

    /// Full complex crossing parameter entering the R-matrix.
    pub fn crossing(&self) -> Complex64 {
        self.crossing
    }

    /// `eta_plus = eta - i pi` in the shifted regime; `None` for real eta.
    pub fn eta_plus(&self) -> Option<f64> {
        match self.regime {
            Regime::EtaPlusIPi => Some(self.eta),
            Regime::RealEta => None,
        }
    }

    pub fn phi2a(&self) -> Complex64 {
        self.phi2a
    }

    pub fn e0(&self) -> Complex64 {
        self.e0
    }

    pub fn couplings(&self) -> &Couplings {
        &self.couplings
    }

    /// Staggered inhomogeneities `theta_j = (-1)^j a`, j = 1..2N.
    pub fn staggered_thetas(&self) -> Vec<Complex64> {
        (1..=self.two_n)
            .map(|j| if j % 2 == 0 { self.a } else { -self.a })
            .collect()
    }

    /// Hilbert-space dimension `2^(2N)`.
    pub fn dim(&self) -> usize {
        1usize << self.two_n
    }

    pub(crate) fn require_dense(&self) -> Result<()> {
        if self.two_n > MAX_DENSE_SITES {
            return Err(Error::SizeLimit {
                two_n: self.two_n,
                limit: MAX_DENSE_SITES,
            });
        }
        Ok(())
    }

    pub(crate) fn require_regime(&self, regime: Regime, what: &str) -> Result<()> {
        if self.regime != regime {
            return Err(Error::RegimeMismatch(format!(
                "{what} requires regime {}, got {}",
                regime.name(),
                self.regime.name()
            )));
        }
        Ok(())
    }

    /// Same constants at a different system size.
    pub fn with_two_n(&self, two_n: usize) -> Result<Self> {
        Self::from_complex(two_n, self.a, self.crossing)
    }

    /// Same constants at a different `b`.
    pub fn with_b(&self, b: f64) -> Result<Self> {
        Self::new(self.two_n, b, self.eta, self.regime)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_odd_and_small_sizes() {
        assert!(ModelParams::new(5, 0.2, 0.8, Regime::RealEta).is_err());
        assert!(ModelParams::new(2, 0.2, 0.8, Regime::RealEta).is_err());
        assert!(ModelParams::new(4, 0.2, 0.8, Regime::RealEta).is_ok());
    }

    #[test]
    fn rejects_non_hermitian_sets() {
        let err = ModelParams::from_complex(4, Complex64::new(0.2, 0.0), Complex64::new(0.8, 0.0));
        assert!(matches!(err, Err(Error::NonHermitian(_))));
        let err = ModelParams::from_complex(4, Complex64::new(0.0, 0.2), Complex64::new(0.8, 1.0));
        assert!(matches!(err, Err(Error::NonHermitian(_))));
    }

    #[test]
    fn shifted_regime_needs_b_in_open_quarter_period() {
        assert!(ModelParams::new(4, 0.0, 0.6, Regime::EtaPlusIPi).is_err());
        assert!(ModelParams::new(4, 1.6, 0.6, Regime::EtaPlusIPi).is_err());
        let p = ModelParams::new(4, 0.2, 0.6, Regime::EtaPlusIPi).unwrap();
        assert_eq!(p.eta_plus(), Some(0.6));
        assert!((p.crossing().im - PI).abs() < 1e-15);
    }

    #[test]
    fn couplings_are_real_for_hermitian_sets() {
        for regime in [Regime::RealEta, Regime::EtaPlusIPi] {
            let p = ModelParams::new(6, 0.3, 0.7, regime).unwrap();
            let c = p.couplings();
            for v in [c.j1x, c.j1z, c.j2, c.j3x, c.j3z, p.phi2a(), p.e0()] {
                assert!(v.im.abs() < 1e-12, "{v}");
            }
        }
    }

    #[test]
    fn heisenberg_limit_has_no_frustration() {
        let p = ModelParams::new(4, 0.0, 0.8, Regime::RealEta).unwrap();
        let c = p.couplings();
        assert!(c.j2.norm() < 1e-15 && c.j3x.norm() < 1e-15 && c.j3z.norm() < 1e-15);
        assert!((c.j1x.re - 1.0).abs() < 1e-15);
        assert!((p.phi2a().re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn staggered_thetas_alternate() {
        let p = ModelParams::new(4, 0.2, 0.8, Regime::RealEta).unwrap();
        let th = p.staggered_thetas();
        assert_eq!(th.len(), 4);
        assert!((th[0] + p.a()).norm() < 1e-15);
        assert!((th[1] - p.a()).norm() < 1e-15);
    }
}

//! Detection of the low-lying band of nearly degenerate states.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::hamiltonian::build_hamiltonian;
use crate::params::{ModelParams, Regime};
use crate::spectrum::{eigenvalues, spectral_scale};

/// The band-separating gap must exceed this multiple of the widest spacing
/// inside the band.
pub const GAP_RATIO_THRESHOLD: f64 = 3.0;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BandReport {
    pub found: bool,
    /// Number of states in the low band, ground states included.
    pub band_size: usize,
    /// Size of the ground-state multiplet.
    pub ground_count: usize,
    /// `E_d - E_1g` for each nearly degenerate state (ground states excluded).
    pub delta_e: Vec<f64>,
    pub delta_e_max: f64,
    /// Gap between the top of the band and the next level.
    pub gap: f64,
    /// `gap / widest spacing inside the band`.
    pub gap_ratio: f64,
    /// Distinct values in `delta_e`.
    pub distinct_levels: usize,
}

impl BandReport {
    pub fn nearly_degenerate_count(&self) -> usize {
        self.delta_e.len()
    }
}

/// Scans an ascending spectrum for the low band below the largest gap in the
/// lower half of the spectrum.
pub fn nearly_degenerate_scan(eigenvalues: &[f64]) -> BandReport {
    let scale = spectral_scale(eigenvalues);
    let tol = 1e-8 * scale;
    let upper = (eigenvalues.len() / 2 + 1).min(eigenvalues.len());
    let lower = &eigenvalues[..upper];
    let ground_count = lower
        .iter()
        .take_while(|&&e| e - eigenvalues[0] < tol)
        .count()
        .max(1);
    let not_found = |band_size, gap, gap_ratio| BandReport {
        found: false,
        band_size,
        ground_count,
        delta_e: Vec::new(),
        delta_e_max: f64::NAN,
        gap,
        gap_ratio,
        distinct_levels: 0,
    };
    if lower.len() < 2 {
        return not_found(0, 0.0, 0.0);
    }
    let (cut, gap) = lower
        .windows(2)
        .map(|w| w[1] - w[0])
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (i, g)| if g > best.1 { (i, g) } else { best });
    let band_size = cut + 1;
    let inner = lower[..band_size]
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(0.0f64, f64::max);
    let gap_ratio = if inner > 0.0 { gap / inner } else { f64::INFINITY };
    if gap_ratio < GAP_RATIO_THRESHOLD || band_size <= ground_count {
        return not_found(band_size, gap, gap_ratio);
    }
    let delta_e: Vec<f64> = eigenvalues[ground_count..band_size]
        .iter()
        .map(|e| e - eigenvalues[0])
        .collect();
    let delta_e_max = delta_e.iter().copied().fold(0.0, f64::max);
    let mut distinct_levels = 0;
    let mut last = f64::NEG_INFINITY;
    for &d in &delta_e {
        if d - last > tol {
            distinct_levels += 1;
            last = d;
        }
    }
    BandReport {
        found: true,
        band_size,
        ground_count,
        delta_e,
        delta_e_max,
        gap,
        gap_ratio,
        distinct_levels,
    }
}

/// Number of distinct `(delta E, k)` pairs among the nearly degenerate states,
/// given the momentum of every state in ascending-energy order.
pub fn distinct_level_momentum_pairs(report: &BandReport, momenta: &[f64], tol_e: f64, tol_k: f64) -> usize {
    let states = report.ground_count..report.ground_count + report.delta_e.len();
    let mut seen: Vec<(f64, f64)> = Vec::new();
    for (d, &k) in report.delta_e.iter().zip(&momenta[states]) {
        let same = |&(e, q): &(f64, f64)| {
            let dk = (k - q).rem_euclid(2.0 * PI);
            (d - e).abs() < tol_e && dk.min(2.0 * PI - dk) < tol_k
        };
        if !seen.iter().any(same) {
            seen.push((*d, k));
        }
    }
    seen.len()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BandScanPoint {
    pub b: f64,
    /// `None` when no clear two-band structure exists at this `b`.
    pub delta_e_max: Option<f64>,
    pub band_size: usize,
}

/// `Delta E_max` over a grid of `b` at fixed size and `eta` (real regime).
pub fn delta_e_max_scan(two_n: usize, eta: f64, b_grid: &[f64]) -> Result<Vec<BandScanPoint>> {
    b_grid
        .par_iter()
        .map(|&b| {
            let p = ModelParams::new(two_n, b, eta, Regime::RealEta)?;
            let w = eigenvalues(&build_hamiltonian(&p)?)?;
            let r = nearly_degenerate_scan(&w);
            Ok(BandScanPoint {
                b,
                delta_e_max: r.found.then_some(r.delta_e_max),
                band_size: r.band_size,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_spectrum_has_no_band() {
        let w: Vec<f64> = (0..16).map(|i| i as f64).collect();
        let r = nearly_degenerate_scan(&w);
        assert!(!r.found);
    }

    #[test]
    fn synthetic_two_band_spectrum() {
        let mut w = vec![-1.0, -1.0, -0.99, -0.99, -0.98, -0.98];
        w.extend((0..10).map(|i| 5.0 + i as f64));
        let r = nearly_degenerate_scan(&w);
        assert!(r.found);
        assert_eq!(r.band_size, 6);
        assert_eq!(r.ground_count, 2);
        assert_eq!(r.nearly_degenerate_count(), 4);
        assert_eq!(r.distinct_levels, 2);
        assert!((r.delta_e_max - 0.02).abs() < 1e-12);
    }
}

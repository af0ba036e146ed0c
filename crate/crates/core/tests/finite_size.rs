mod common;

use std::f64::consts::{FRAC_PI_2, PI};

use common::{root_set_distance, table1};
use proptest::prelude::*;
use twistchain::hamiltonian::build_hamiltonian;
use twistchain::roots::{root_table, transfer_eigenbasis, RootTag, ZeroRootSet};
use twistchain::spectrum::diagonalize;
use twistchain::{c64, ModelParams, Regime};

#[test]
fn table1_levels_roots_and_momenta() {
    let p = ModelParams::new(4, 0.2, 0.8, Regime::RealEta).unwrap();
    let spec = diagonalize(&build_hamiltonian(&p).unwrap(), None).unwrap();
    let resolved = transfer_eigenbasis(&p, &spec).unwrap();
    let rows = root_table(&p, &resolved, &(0..16).collect::<Vec<_>>()).unwrap();
    for r in &rows {
        println!(
            "{:3} E={:9.4} Er={:9.4} k={:7.4} U={:7.4} {:?}",
            r.index, r.ed_energy, r.root_energy, r.root_momentum, r.shift_phase, r.roots.roots
        );
    }
    for (level, (roots, energy)) in table1().iter().enumerate() {
        let hits = rows
            .iter()
            .filter(|r| root_set_distance(&r.roots.roots, roots) < 1e-3)
            .count();
        assert!(hits >= 1, "level {} roots not found", level + 1);
        assert!(rows.iter().any(|r| (r.ed_energy - energy).abs() < 5e-4));
    }
}

fn all_rows(p: &ModelParams) -> Vec<twistchain::roots::RootRow> {
    let spec = diagonalize(&build_hamiltonian(p).unwrap(), None).unwrap();
    let resolved = transfer_eigenbasis(p, &spec).unwrap();
    root_table(p, &resolved, &(0..resolved.len()).collect::<Vec<_>>()).unwrap()
}

fn phase_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(2.0 * PI);
    d.min(2.0 * PI - d)
}

#[test]
fn roots_reproduce_the_whole_spectrum() {
    for p in [
        ModelParams::new(4, 0.2, 0.8, Regime::RealEta).unwrap(),
        ModelParams::new(6, 0.2, 0.8, Regime::RealEta).unwrap(),
        ModelParams::new(6, 0.3, 0.6, Regime::EtaPlusIPi).unwrap(),
    ] {
        for r in all_rows(&p) {
            assert_eq!(r.roots.roots.len(), p.two_n() - 1);
            assert!((r.root_energy - r.ed_energy).abs() < 1e-6, "state {}", r.index);
            assert!(phase_gap(r.root_momentum, r.shift_phase) < 1e-6, "state {}", r.index);
            assert!(r.roots.pairing_defect < 1e-8);
            assert!(r.roots.roots.iter().all(|z| z.im >= -FRAC_PI_2 && z.im < FRAC_PI_2));
        }
    }
}

#[test]
fn ground_eigenvalue_factorizes_over_published_roots() {
    let p = ModelParams::new(4, 0.2, 0.8, Regime::RealEta).unwrap();
    let rows = all_rows(&p);
    let ground = &rows[0];
    let (published, _) = table1()[0];
    let published = ZeroRootSet::from_roots(ground.roots.lambda0, &published, &p);
    let u = c64::new(0.0, 0.0);
    let exact = ground.roots.eval(u, &p);
    assert!((published.eval(u, &p) - exact).norm() < 1e-3 * exact.norm().max(1.0));
}

#[test]
fn low_band_roots_lie_on_the_imaginary_axis() {
    let p = ModelParams::new(8, 0.2, 0.8, Regime::RealEta).unwrap();
    let rows = all_rows(&p);
    for r in &rows[..16] {
        assert!(r.roots.tags.iter().all(|t| *t == RootTag::Imaginary), "state {}", r.index);
    }
    assert!(rows[16].roots.tags.iter().any(|t| *t != RootTag::Imaginary));
}

#[test]
fn short_pair_real_parts_cluster_at_half_multiples_of_eta() {
    let p = ModelParams::new(8, 0.2, 2.0, Regime::RealEta).unwrap();
    let mut seen = 0;
    for r in all_rows(&p) {
        for (z, tag) in r.roots.roots.iter().zip(&r.roots.tags) {
            if let RootTag::ConjugatePair { n: n @ 2..=3 } = tag {
                seen += 1;
                assert!((z.re.abs() - *n as f64 * p.eta() / 2.0).abs() < 0.05, "state {} root {z}", r.index);
            }
        }
    }
    assert!(seen > 0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn every_state_has_mirror_paired_roots(b in 0.05f64..1.4, eta in 0.3f64..2.0, shifted in any::<bool>()) {
        let regime = if shifted { Regime::EtaPlusIPi } else { Regime::RealEta };
        let p = ModelParams::new(4, b, eta, regime).unwrap();
        for r in all_rows(&p) {
            prop_assert!(r.roots.is_paired(), "state {} defect {:e}", r.index, r.roots.pairing_defect);
            prop_assert!(phase_gap(r.root_momentum, r.shift_phase) < 1e-6);
        }
    }
}

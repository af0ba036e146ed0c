use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use proptest::prelude::*;
use twistchain::c64;
use twistchain::thermo::*;
use twistchain::{ModelParams, Regime};

/// Trapezoid rule for a pi-periodic integrand on [-pi/2, pi/2).
fn periodic_quad(f: impl Fn(f64) -> c64, points: usize) -> c64 {
    let h = PI / points as f64;
    (0..points).map(|k| f(-FRAC_PI_2 + h * k as f64)).sum::<c64>() * h
}

fn real(two_n: usize, b: f64, eta: f64) -> ModelParams {
    ModelParams::new(two_n, b, eta, Regime::RealEta).unwrap()
}

fn shifted(two_n: usize, b: f64, eta: f64) -> ModelParams {
    ModelParams::new(two_n, b, eta, Regime::EtaPlusIPi).unwrap()
}

const AUTO: Truncation = Truncation::AUTO;

#[test]
fn kernel_transforms_match_quadrature() {
    for family in [KernelFamily::Beta, KernelFamily::B, KernelFamily::Gamma, KernelFamily::C] {
        for order in 1..=3 {
            let k = Kernel::new(family, order, 0.7);
            for w in -3i64..=3 {
                let q = periodic_quad(|x| k.value(x) * c64::from_polar(1.0, -2.0 * w as f64 * x), 4096);
                let t = k.transform(w);
                assert!((q - t).norm() < 1e-10, "{family:?} n={order} w={w}: {q} vs {t}");
            }
        }
    }
}

#[test]
fn kernel_transforms_decay_exactly() {
    let k = Kernel::new(KernelFamily::C, 3, 0.5);
    for w in 1..10i64 {
        let ratio = k.transform(w + 1).norm() / k.transform(w).norm();
        assert!((ratio - (-1.5f64).exp()).abs() < 1e-14);
    }
}

#[test]
fn ground_density_series_matches_closed_form() {
    let p = real(8, 0.2, 0.6);
    let d = ground_density_i(&p, AUTO).unwrap();
    let worst = (0..101)
        .map(|k| -FRAC_PI_2 + PI * k as f64 / 101.0)
        .map(|x| (d.eval(x) - ground_density_i_closed(&p, x)).abs())
        .fold(0.0, f64::max);
    assert!(worst < 1e-10, "{worst:e}");
    assert!((d.normalization() - 7.0 / 8.0).abs() < 1e-12);
    assert!(d.reality_defect() == 0.0);
}

#[test]
fn densities_are_normalized_to_root_fractions() {
    let p = real(10, 0.3, 0.8);
    for n in [2, 3, 5] {
        let d = excited_density_i(&p, n, 0.4, AUTO).unwrap();
        assert!((d.normalization() - 7.0 / 10.0).abs() < 1e-12);
        assert!(d.reality_defect() < 1e-15);
    }
    let q = shifted(10, 0.3, 0.8);
    let d = ground_density_ii(&q, 0.2, AUTO).unwrap();
    assert!((d.normalization() - (0.5 - 0.1)).abs() < 1e-12);
    let d3 = excitation_density_ii(&q, &[0.2, -0.4, 0.9], AUTO).unwrap();
    assert!((d3.normalization() - (0.5 - 0.2)).abs() < 1e-12);
}

/// Bare energy of one on-axis root at `i x` for real eta.
fn root_energy_i(p: &ModelParams, x: f64) -> c64 {
    let (eta, b) = (p.eta(), p.b());
    let pref = p.phi2a() * eta.sinh();
    let coth = |z: c64| z.cosh() / z.sinh();
    pref * (coth(c64::new(-eta / 2.0, x - b)) + coth(c64::new(-eta / 2.0, x + b)))
}

#[test]
fn ground_energy_equals_density_integral() {
    for (b, eta) in [(0.2, 0.6), (0.5, 1.1), (1.0, 0.45)] {
        let p = real(12, b, eta);
        let d = ground_density_i(&p, AUTO).unwrap();
        let integral = periodic_quad(|x| root_energy_i(&p, x) * d.eval(x), 4096) * p.two_n() as f64 + p.e0();
        let closed = ground_energy_i(&p).unwrap();
        assert!((integral.re - closed).abs() < 1e-9, "{} vs {closed}", integral.re);
        assert!(integral.im.abs() < 1e-9);
    }
}

#[test]
fn pair_excitation_energy_equals_density_difference() {
    for n in [2u32, 3, 4] {
        let p = real(12, 0.25, 0.9);
        let lambda = 0.35;
        let g = ground_density_i(&p, AUTO).unwrap();
        let e = excited_density_i(&p, n, lambda, AUTO).unwrap();
        let sites = p.two_n() as f64;
        let mut integral = periodic_quad(|x| root_energy_i(&p, x) * (e.eval(x) - g.eval(x)), 4096) * sites;
        for &(x, w) in &e.point_masses {
            integral += root_energy_i(&p, x) * w * sites;
        }
        let (eta, b) = (p.eta(), p.b());
        let pref = p.phi2a() * eta.sinh();
        let coth = |z: c64| z.cosh() / z.sinh();
        let hi = (n as f64 - 1.0) / 2.0 * eta;
        let lo = -(n as f64 + 1.0) / 2.0 * eta;
        let pair = pref
            * (coth(c64::new(hi, lambda - b)) + coth(c64::new(hi, lambda + b))
                + coth(c64::new(lo, lambda - b)) + coth(c64::new(lo, lambda + b)));
        let total = integral + pair;
        let closed = excitation_energy_i(&p, n, lambda).unwrap();
        assert!((total.re - closed).abs() < 1e-9, "n={n}: {} vs {closed}", total.re);
    }
}

#[test]
fn boundary_energy_equals_density_integral() {
    for (b, eta, mu) in [(0.2, 0.6, 0.0), (0.2, 0.6, 0.7), (1.2, 0.9, -1.1)] {
        let p = shifted(10, b, eta);
        let d = ground_density_ii(&p, mu, AUTO).unwrap();
        let cr = p.crossing();
        let pref = p.phi2a() * cr.sinh();
        let coth = |z: c64| z.cosh() / z.sinh();
        let ib = c64::new(0.0, b);
        let paired = |x: f64| {
            let ix = c64::new(0.0, x);
            let ep = c64::new(eta, 0.0);
            pref * (coth(ix + ep - ib - cr / 2.0) + coth(ix - ep - ib - cr / 2.0)
                + coth(ix + ep + ib - cr / 2.0) + coth(ix - ep + ib - cr / 2.0))
        };
        let imu = c64::new(0.0, mu);
        let boundary = pref * (coth(imu - ib - cr / 2.0) + coth(imu + ib - cr / 2.0));
        let mut total = periodic_quad(|x| paired(x) * d.eval(x), 4096) * p.two_n() as f64 + boundary + p.e0();
        for &(x, w) in &d.point_masses {
            total += paired(x) * w * p.two_n() as f64;
        }
        let series = boundary_energy(&p, mu, AUTO).unwrap();
        assert!((total.re - series).abs() < 1e-9, "{} vs {series}", total.re);
    }
}

#[test]
fn ground_branches_are_the_boundary_energy_at_their_minima() {
    let p = shifted(12, 0.3, 0.7);
    assert!((ground_energy_ii_phase1(&p, AUTO).unwrap() - boundary_energy(&p, 0.0, AUTO).unwrap()).abs() < 1e-12);
    assert!((ground_energy_ii_phase2(&p, AUTO).unwrap() - boundary_energy(&p, -FRAC_PI_2, AUTO).unwrap()).abs() < 1e-12);
}

#[test]
fn boundary_minimizer_selects_phase() {
    assert_eq!(boundary_minimizer(&shifted(8, 0.2, 0.6), 400, AUTO).unwrap(), 0.0);
    assert_eq!(boundary_minimizer(&shifted(8, 1.2, 0.6), 400, AUTO).unwrap(), -FRAC_PI_2);
}

/// Away from `b = lambda`, where the `cos(2 lambda - 2 b) = 1` pole dominates small eta.
#[test]
fn pair_excitation_grows_with_eta() {
    for b in [0.1, 0.7, 0.75, 1.0] {
        let values: Vec<f64> = (0..=160)
            .map(|k| excitation_energy_i(&real(8, b, 0.4 + 0.01 * k as f64), 2, 0.2).unwrap())
            .collect();
        assert!(values.windows(2).all(|w| w[1] > w[0]), "b = {b}");
    }
}

#[test]
fn branch_momenta_relations() {
    let p = shifted(10, 1.0, 1.5);
    for k in 0..50 {
        let mu = -FRAC_PI_2 + PI * k as f64 / 50.0;
        let k2 = excitation_momentum_ii(&p, mu, AUTO).unwrap();
        let k3 = excitation_momentum_ii_phase2(&p, mu, AUTO).unwrap();
        let d = (k3 - k2 - PI).rem_euclid(2.0 * PI);
        assert!(d.min(2.0 * PI - d) < 1e-12);
        assert!((-PI..PI).contains(&k3));
    }
}

#[test]
fn spinon_energy_is_symmetric_and_gapped() {
    let p = shifted(10, 0.1, 1.5);
    let grid: Vec<f64> = (0..101).map(|k| -FRAC_PI_2 + PI * k as f64 / 101.0).collect();
    let eps: Vec<f64> = grid.iter().map(|&m| single_root_energy(&p, m, AUTO).unwrap()).collect();
    let mut min = f64::INFINITY;
    for (i, &m1) in grid.iter().enumerate() {
        for (j, &m2) in grid.iter().enumerate() {
            let q = excitation(ExcitationQuery::Spinon { mu1: m1, mu2: m2 }, &p, AUTO).unwrap();
            let r = excitation(ExcitationQuery::Spinon { mu1: m2, mu2: m1 }, &p, AUTO).unwrap();
            assert_eq!(q.energy, r.energy);
            assert!((q.energy - eps[i] - eps[j]).abs() < 1e-12);
            let k = excitation_momentum_ii(&p, m1, AUTO).unwrap() + excitation_momentum_ii(&p, m2, AUTO).unwrap();
            let d = (q.momentum - k).rem_euclid(2.0 * PI);
            assert!(d.min(2.0 * PI - d) < 1e-12);
            min = min.min(q.energy);
        }
    }
    assert!(min > 0.0, "{min}");
}

#[test]
fn qpt_scan_locates_the_transition() {
    for two_n in [8, 18, 40] {
        let p = shifted(two_n, 0.2, 0.6);
        let s = qpt_scan(&p, &uniform_grid(0.05, 1.5, 0.01), AUTO).unwrap();
        assert!((s.critical_b - FRAC_PI_4).abs() <= 0.01, "{two_n}: {}", s.critical_b);
        assert!(s.crossing_mismatch < 1e-10);
        assert!(s.derivative_jump > 10.0 * s.grid_noise, "{two_n}: {} {}", s.derivative_jump, s.grid_noise);
    }
}

#[test]
fn coarse_scan_is_rejected() {
    let p = shifted(8, 0.2, 0.6);
    assert!(qpt_scan(&p, &[0.2, 0.5, 1.0], AUTO).is_err());
    assert!(qpt_scan(&p, &[0.1, 0.2, 0.3], AUTO).is_err());
}

fn doubled(f: impl Fn(Truncation) -> f64, decay: f64) -> f64 {
    (f(AUTO) - f(Truncation::fixed(2 * default_omega_max(decay)))).abs()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn shifted_energies_are_even(b in 0.01f64..1.56, eta in 0.3f64..2.0, mu in -1.5f64..1.5) {
        let p = shifted(10, b, eta);
        let e = |m| boundary_energy(&p, m, AUTO).unwrap();
        prop_assert!((e(mu) - e(-mu)).abs() < 1e-10 * e(mu).abs().max(1.0));
        if b < FRAC_PI_4 {
            let f = |m| excitation_energy_ii_phase1(&p, m, AUTO).unwrap();
            prop_assert!((f(mu) - f(-mu)).abs() < 1e-10);
        }
    }

    #[test]
    fn energies_are_even_in_b(b in 0.01f64..1.5, eta in 0.3f64..2.0, lambda in -1.5f64..1.5) {
        let (p, q) = (real(10, b, eta), real(10, -b, eta));
        prop_assert!((ground_energy_i(&p).unwrap() - ground_energy_i(&q).unwrap()).abs() < 1e-10);
        // b -> -b pairs with lambda -> -lambda in the pair excitation
        let e = excitation_energy_i(&p, 2, lambda).unwrap();
        let f = excitation_energy_i(&q, 2, -lambda).unwrap();
        prop_assert!((e - f).abs() < 1e-10 * e.abs().max(1.0));
    }

    #[test]
    fn pair_excitation_is_positive(b in -1.5f64..1.5, eta in 0.1f64..3.0, lambda in -1.57f64..1.57, n in 2u32..8) {
        prop_assert!(excitation_energy_i(&real(8, b, eta), n, lambda).unwrap() > 0.0);
    }

    #[test]
    fn branch_energies_are_single_root_differences(b in 0.01f64..1.56, eta in 0.3f64..2.0, mu in -1.57f64..1.57) {
        let p = shifted(10, b, eta);
        let eps = |m| single_root_energy(&p, m, AUTO).unwrap();
        let e2 = excitation_energy_ii_phase1(&p, mu, AUTO).unwrap();
        let e3 = excitation_energy_ii_phase2(&p, mu, AUTO).unwrap();
        prop_assert!((e2 - (eps(mu) - eps(0.0))).abs() < 1e-12 * eps(mu).abs().max(1.0));
        prop_assert!((e3 - (eps(mu) - eps(-FRAC_PI_2))).abs() < 1e-12 * eps(mu).abs().max(1.0));
    }

    #[test]
    fn doubling_the_cutoff_changes_nothing(b in 0.01f64..1.56, eta in 0.3f64..2.0, mu in -1.57f64..1.57) {
        let p = shifted(10, b, eta);
        let r = real(10, b, eta);
        prop_assert!(doubled(|t| boundary_energy(&p, mu, t).unwrap(), eta) < 1e-12);
        prop_assert!(doubled(|t| excitation_momentum_ii(&p, mu, t).unwrap(), eta) < 1e-12);
        prop_assert!(doubled(|t| excitation_energy_ii_phase2(&p, mu, t).unwrap(), eta) < 1e-12);
        prop_assert!(doubled(|t| excitation_momentum_i(&r, 3, mu, t).unwrap(), 2.0 * eta) < 1e-12);
        prop_assert!(doubled(|t| ground_density_ii(&p, mu, t).unwrap().eval(0.3), eta) < 1e-12);
        prop_assert!(doubled(|t| excited_density_i(&r, 2, mu, t).unwrap().eval(-0.2), eta) < 1e-12);
    }

    #[test]
    fn momenta_are_in_principal_range(b in 0.01f64..1.56, eta in 0.3f64..2.0, mu in -1.57f64..1.57, n in 2u32..6) {
        let k1 = excitation_momentum_i(&real(10, b, eta), n, mu, AUTO).unwrap();
        let k2 = excitation_momentum_ii(&shifted(10, b, eta), mu, AUTO).unwrap();
        prop_assert!((-PI..PI).contains(&k1));
        prop_assert!((-PI..PI).contains(&k2));
    }
}

#![allow(dead_code)]

use std::f64::consts::FRAC_PI_2;

use twistchain::bae::{PairSeed, PatternSeed};
use twistchain::c64;

pub fn z(re: f64, im: f64) -> c64 {
    c64::new(re, im)
}

/// Published zero roots and energies at 2N = 4, b = 0.2, eta = 0.8, one row per level.
pub fn table1() -> Vec<([c64; 3], f64)> {
    let h = std::f64::consts::FRAC_PI_2;
    vec![
        ([z(0.0, -0.4614), z(0.0, 0.0), z(0.0, 0.4614)], -4.3679),
        ([z(0.0, -0.3430), z(0.0, 0.0949), z(0.0, 0.9096)], -3.4531),
        ([z(0.0, -0.9096), z(0.0, -0.0949), z(0.0, 0.3430)], -3.4531),
        ([z(0.0, -h), z(0.0, -0.2291), z(0.0, 0.2291)], -3.2656),
        ([z(-1.0545, -h), z(0.0, 0.0), z(1.0545, -h)], 0.6836),
        ([z(-0.8175, 0.2545), z(0.0, -0.2764), z(0.8175, 0.2545)], 3.4531),
        ([z(-0.8175, -0.2545), z(0.0, 0.2764), z(0.8175, -0.2545)], 3.4531),
        ([z(-0.8212, 0.0), z(0.0, -h), z(0.8212, 0.0)], 6.9499),
    ]
}

/// Distance between two root multisets after canonical ordering, modulo i pi.
pub fn root_set_distance(a: &[c64], b: &[c64]) -> f64 {
    use twistchain::roots::{canonical_cmp, strip_distance, to_strip};
    let mut a: Vec<c64> = a.iter().map(|&x| to_strip(x)).collect();
    let mut b: Vec<c64> = b.iter().map(|&x| to_strip(x)).collect();
    a.sort_by(canonical_cmp);
    b.sort_by(canonical_cmp);
    a.iter()
        .zip(&b)
        .map(|(x, y)| strip_distance(*x, *y))
        .fold(0.0, f64::max)
}

pub fn imaginary(xs: &[f64]) -> PatternSeed {
    PatternSeed {
        imaginary: xs.to_vec(),
        ..Default::default()
    }
}

pub fn pair_plus_axis(n: u32, lambda: f64, x: f64) -> PatternSeed {
    PatternSeed {
        imaginary: vec![x],
        pairs: vec![PairSeed { n, lambda }],
        ..Default::default()
    }
}

/// One seed per published level at 2N = 4, b = 0.2, eta = 0.8.
pub fn level_seeds() -> Vec<PatternSeed> {
    vec![
        imaginary(&[-0.5, 0.0, 0.5]),
        imaginary(&[-0.3, 0.1, 0.9]),
        imaginary(&[-0.9, -0.1, 0.3]),
        imaginary(&[-FRAC_PI_2, -0.2, 0.2]),
        pair_plus_axis(3, -FRAC_PI_2, 0.0),
        pair_plus_axis(2, 0.25, -0.3),
        pair_plus_axis(2, -0.25, 0.3),
        pair_plus_axis(2, 0.0, -FRAC_PI_2),
    ]
}

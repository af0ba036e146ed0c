//! Published tables and figures, regenerated with their reference values and
//! tolerances attached as checks.

use std::f64::consts::FRAC_PI_2;

use twistchain::bae::{solve, PairSeed, PatternSeed};
use twistchain::bands::{distinct_level_momentum_pairs, nearly_degenerate_scan};
use twistchain::kink::KinkKind;
use twistchain::roots::{canonical_cmp, energy_from_roots, root_table, strip_distance, to_strip, RootTag};
use twistchain::scaling::{
    boundary_excitation_point, fit_points, ground_point_real, ground_point_shifted, pair_excitation_point,
    scaling_fit, size_scan, FitModel, SizePoint,
};
use twistchain::thermo::{qpt_scan, uniform_grid, Truncation};
use twistchain::{c64, ModelParams, Regime};

use crate::commands::{qpt_outcome, resolved_spectrum, root_columns, scaling_outcome, tag_name, texture_outcome};
use crate::error::CliError;
use crate::record::{complex_cells, Cell, Check, Outcome, Table};

type Run = Result<Outcome, CliError>;

fn z(re: f64, im: f64) -> c64 {
    c64::new(re, im)
}

/// Zero roots and energy of each level at 2N = 4, b = 0.2, eta = 0.8.
fn table1_reference() -> Vec<([c64; 3], f64)> {
    let h = FRAC_PI_2;
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

fn axis(xs: &[f64]) -> PatternSeed {
    PatternSeed {
        imaginary: xs.to_vec(),
        ..Default::default()
    }
}

fn pair_and_axis(n: u32, lambda: f64, x: f64) -> PatternSeed {
    PatternSeed {
        imaginary: vec![x],
        pairs: vec![PairSeed { n, lambda }],
        ..Default::default()
    }
}

fn table1_seeds() -> Vec<PatternSeed> {
    vec![
        axis(&[-0.5, 0.0, 0.5]),
        axis(&[-0.3, 0.1, 0.9]),
        axis(&[-0.9, -0.1, 0.3]),
        axis(&[-FRAC_PI_2, -0.2, 0.2]),
        pair_and_axis(3, -FRAC_PI_2, 0.0),
        pair_and_axis(2, 0.25, -0.3),
        pair_and_axis(2, -0.25, 0.3),
        pair_and_axis(2, 0.0, -FRAC_PI_2),
    ]
}

const FERRO_DELTAS: [f64; 16] = [
    0.1702, 0.1702, 0.1302, 0.1302, 0.1302, 0.1302, 0.1062, 0.1062, 0.9854, 0.9854, 0.9915, 0.9915, 0.9915,
    0.9915, 0.9943, 0.9943,
];

const NEEL_DELTAS: [f64; 16] = [
    0.1062, 0.1062, 0.1302, 0.1302, 0.1302, 0.1302, 0.1702, 0.1702, 0.9943, 0.9943, 0.9915, 0.9915, 0.9915,
    0.9915, 0.9854, 0.9854,
];

/// Published texture values carry four decimals.
const TEXTURE_TOL: f64 = 5e-3;

pub fn run(target: &str) -> Run {
    match target {
        "table1" => table1(),
        "table2" => texture_table(Regime::RealEta, KinkKind::Ferro, &FERRO_DELTAS),
        "table3" => texture_table(Regime::EtaPlusIPi, KinkKind::Neel, &NEEL_DELTAS),
        "fig2b" => fig2b(),
        "fig3" => fig3(),
        "fig4b" => fig4b(),
        "fig5b" => fig5b(),
        "fig5d" => fig5d(),
        "fig6b" => report_only(ModelParams::new(8, 0.75, 1.0, Regime::EtaPlusIPi)?),
        "fig7a" => report_only(ModelParams::new(8, 0.8, 1.0, Regime::EtaPlusIPi)?),
        other => Err(CliError::invalid("target", other, "unknown reproduction target")),
    }
}

fn root_set_distance(a: &[c64], b: &[c64]) -> f64 {
    let sorted = |v: &[c64]| {
        let mut s: Vec<c64> = v.iter().map(|&x| to_strip(x)).collect();
        s.sort_by(canonical_cmp);
        s
    };
    sorted(a)
        .iter()
        .zip(&sorted(b))
        .map(|(x, y)| strip_distance(*x, *y))
        .fold(0.0, f64::max)
}

fn table1() -> Run {
    let p = ModelParams::new(4, 0.2, 0.8, Regime::RealEta)?;
    let resolved = resolved_spectrum(&p)?;
    let rows = root_table(&p, &resolved, &(0..resolved.len()).collect::<Vec<_>>())?;
    let reference = table1_reference();
    let solutions: Vec<_> = table1_seeds().iter().map(|s| solve(s, &p)).collect();

    let t = Table::new()
        .column("level", "input")
        .column("published_energy", "published")
        .column("ed_energy", "ed")
        .column("root_energy", "transfer")
        .column("root_distance", "transfer")
        .column("bae_energy", "bae")
        .column("bae_root_distance", "bae");
    let mut t = root_columns(t, 3);
    let (mut worst_e, mut worst_root, mut reached) = (0.0f64, 0.0f64, 0usize);
    for (level, (roots, energy)) in reference.iter().enumerate() {
        let ed = rows
            .iter()
            .map(|r| r.ed_energy)
            .min_by(|a, b| (a - energy).abs().total_cmp(&(b - energy).abs()))
            .expect("non-empty spectrum");
        let (dist, row) = rows
            .iter()
            .map(|r| (root_set_distance(&r.roots.roots, roots), r))
            .min_by(|a, b| a.0.total_cmp(&b.0))
            .expect("non-empty spectrum");
        worst_e = worst_e.max((ed - energy).abs()).max((row.root_energy - energy).abs());
        worst_root = worst_root.max(dist);
        let bae = solutions
            .iter()
            .filter_map(|s| s.as_ref().ok())
            .map(|s| (root_set_distance(roots, &s.roots.roots), s))
            .min_by(|a, b| a.0.total_cmp(&b.0))
            .filter(|(d, _)| *d < 1e-3);
        let (bae_e, bae_d) = match bae {
            Some((d, s)) => {
                reached += 1;
                let e = energy_from_roots(&s.roots.roots, &p)?;
                worst_e = worst_e.max((e - energy).abs());
                worst_root = worst_root.max(d);
                (Some(e), Some(d))
            }
            None => (None, None),
        };
        let mut cells = vec![
            level.into(),
            (*energy).into(),
            ed.into(),
            row.root_energy.into(),
            dist.into(),
            bae_e.into(),
            bae_d.into(),
        ];
        cells.extend(row.roots.roots.iter().flat_map(|&z| complex_cells(z)));
        t.push(cells);
    }
    let mut out = Outcome::new(t);
    out.check(Check::at_most("max_energy_error", worst_e, 5e-4));
    out.check(Check::at_most("max_root_distance", worst_root, 1e-3));
    out.check(Check::equals("levels_reached_by_solver", reached, reference.len()));
    Ok(out)
}

fn texture_table(regime: Regime, kind: KinkKind, published: &[f64; 16]) -> Run {
    let p = ModelParams::new(4, 0.2, 2.0, regime)?;
    let mut out = texture_outcome(&p, kind)?;
    let col = out.table.columns.iter().position(|c| c.name == "delta").expect("delta column");
    out.table.columns.insert(col + 1, crate::record::Column {
        name: "published_delta".into(),
        source: "published",
    });
    let mut worst = 0.0f64;
    for (row, &d) in out.table.rows.iter_mut().zip(published) {
        if let Cell::Num(x) = row[col] {
            worst = worst.max((x - d).abs());
        }
        row.insert(col + 1, d.into());
    }
    out.check(Check::at_most("max_delta_error", worst, TEXTURE_TOL));
    Ok(out)
}

fn fig2b() -> Run {
    let p = ModelParams::new(8, 0.2, 0.6, Regime::RealEta)?;
    let resolved = resolved_spectrum(&p)?;
    let band = nearly_degenerate_scan(&resolved.eigenvalues);
    let states: Vec<usize> = (0..band.band_size).collect();
    let rows = root_table(&p, &resolved, &states)?;
    let t = Table::new()
        .column("index", "input")
        .column("energy", "ed")
        .column("momentum", "shift_operator")
        .column("tags", "transfer");
    let mut t = root_columns(t, p.two_n() - 1);
    let mut on_axis = true;
    for r in &rows {
        on_axis &= r.roots.tags.iter().all(|t| *t == RootTag::Imaginary);
        let tags: Vec<String> = r.roots.tags.iter().map(tag_name).collect();
        let mut cells = vec![r.index.into(), r.ed_energy.into(), r.shift_phase.into(), tags.join(";").into()];
        cells.extend(r.roots.roots.iter().flat_map(|&z| complex_cells(z)));
        t.push(cells);
    }
    let momenta: Vec<f64> = (0..resolved.len())
        .map(|i| twistchain::roots::shift_eigenphase(&p, &resolved.vector(i)))
        .collect();
    let pairs = distinct_level_momentum_pairs(&band, &momenta, 1e-8, 1e-6);
    let mut out = Outcome::new(t);
    out.note("distinct_levels", band.distinct_levels)?;
    out.note("gap_ratio", band.gap_ratio)?;
    out.check(Check::equals("nearly_degenerate_states", band.nearly_degenerate_count(), 14));
    out.check(Check::equals("distinct_energy_momentum_pairs", pairs, 7));
    out.check(Check::holds("roots_on_imaginary_axis", on_axis));
    Ok(out)
}

fn decreasing(points: &[SizePoint]) -> bool {
    points.windows(2).all(|w| w[1].delta.abs() < w[0].delta.abs())
}

fn fig3() -> Run {
    let p = ModelParams::new(6, 0.2, 0.6, Regime::RealEta)?;
    let pts = size_scan(&p, &[6, 8, 10, 12], ground_point_real)?;
    let fit = scaling_fit(&fit_points(&pts), FitModel::Exponential)?;
    let mut out = scaling_outcome(&pts)?;
    out.check(Check::holds("monotone_decrease", decreasing(&pts)));
    out.check(Check::above("exponential_rate_min", fit.rate, 0.45));
    out.check(Check::at_most("exponential_rate_max", fit.rate, 0.70));
    Ok(out)
}

fn fig4b() -> Run {
    let p = ModelParams::new(8, 0.75, 1.0, Regime::RealEta)?;
    let pts = size_scan(&p, &[8, 10, 12], |q| pair_excitation_point(q, 2))?;
    let fit = scaling_fit(&fit_points(&pts), FitModel::Exponential)?;
    let mut out = scaling_outcome(&pts)?;
    out.check(Check::holds("monotone_decrease", decreasing(&pts)));
    out.check(Check::above("exponential_rate", fit.rate, 0.8));
    Ok(out)
}

fn fig5b() -> Run {
    let p = ModelParams::new(8, 0.2, 0.6, Regime::EtaPlusIPi)?;
    let pts = size_scan(&p, &[8, 10, 12], ground_point_shifted)?;
    let data = fit_points(&pts);
    let power = scaling_fit(&data, FitModel::PowerLaw)?;
    let expo = scaling_fit(&data, FitModel::Exponential)?;
    let mut out = scaling_outcome(&pts)?;
    out.check(Check::at_most("power_law_residual_below_exponential", power.residual, expo.residual));
    Ok(out)
}

fn fig5d() -> Run {
    let p = ModelParams::new(18, 0.2, 0.6, Regime::EtaPlusIPi)?;
    let step = 0.01;
    let s = qpt_scan(&p, &uniform_grid(0.05, 1.5, step), Truncation::AUTO)?;
    qpt_outcome(&s, step)
}

/// Size dependence of a boundary excitation; no published trend is enforced.
fn report_only(p: ModelParams) -> Run {
    let pts = size_scan(&p, &[8, 10, 12], boundary_excitation_point)?;
    scaling_outcome(&pts)
}

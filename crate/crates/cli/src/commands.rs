use std::f64::consts::{FRAC_PI_2, PI};

use twistchain::bae::{classify, solve, PatternSeed};
use twistchain::bands::nearly_degenerate_scan;
use twistchain::hamiltonian::build_hamiltonian;
use twistchain::kink::{kink_basis, texture_projections, KinkKind};
use twistchain::roots::{
    energy_from_roots, momentum_from_roots, root_table, shift_eigenphase, transfer_eigenbasis, RootRow, RootTag,
};
use twistchain::scaling::{
    boundary_excitation_point, fit_points, ground_point_real, ground_point_shifted, pair_excitation_point,
    scaling_fit, size_scan, FitModel, SizePoint,
};
use twistchain::spectrum::{diagonalize, SpectrumResult};
use twistchain::thermo::{
    boundary_energy, boundary_minimizer, excitation, ground_density_i, ground_density_ii, ground_energy_i,
    ground_state_ii, phase_of, qpt_scan, uniform_grid, DensityProfile, ExcitationQuery, Phase, QptScan,
};
use twistchain::transfer::identity_suite;
use twistchain::{c64, ModelParams, Regime};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::record::{complex_cells, Cell, Check, Outcome, Table};

type Run = Result<Outcome, CliError>;

pub fn run(cfg: &RunConfig) -> Run {
    match cfg.command {
        "ed" => ed(cfg),
        "transfer-check" => transfer_check(cfg),
        "roots" => roots(cfg),
        "bae-solve" => bae_solve(cfg),
        "thermo" => thermo(cfg),
        "excite" => excite(cfg),
        "qpt-scan" => qpt(cfg),
        "scaling" => scaling(cfg),
        "texture" => texture(cfg),
        "reproduce" => crate::reproduce::run(cfg.target.as_deref().unwrap_or_default()),
        other => Err(CliError::config(format!("unknown command {other}"))),
    }
}

pub fn resolved_spectrum(p: &ModelParams) -> Result<SpectrumResult, CliError> {
    let spec = diagonalize(&build_hamiltonian(p)?, None)?;
    Ok(transfer_eigenbasis(p, &spec)?)
}

pub fn all_rows(p: &ModelParams) -> Result<Vec<RootRow>, CliError> {
    let resolved = resolved_spectrum(p)?;
    Ok(root_table(p, &resolved, &(0..resolved.len()).collect::<Vec<_>>())?)
}

/// Half-open grid of `points` values on `[-pi/2, pi/2)`.
pub fn angle_grid(points: usize) -> Vec<f64> {
    (0..points).map(|k| -FRAC_PI_2 + PI * k as f64 / points as f64).collect()
}

pub fn tag_name(t: &RootTag) -> String {
    match t {
        RootTag::Imaginary => "imaginary".into(),
        RootTag::ConjugatePair { n } => format!("pair{n}"),
        RootTag::BoundaryString => "boundary".into(),
        RootTag::Unknown => "unknown".into(),
    }
}

pub fn root_columns(table: Table, count: usize) -> Table {
    (0..count).fold(table, |t, k| t.complex_column(&format!("z{}", k + 1), "transfer"))
}

fn ed(cfg: &RunConfig) -> Run {
    let p = cfg.model()?;
    let resolved = resolved_spectrum(&p)?;
    let band = nearly_degenerate_scan(&resolved.eigenvalues);
    let mut table = Table::new()
        .column("index", "input")
        .column("energy", "ed")
        .column("level", "ed")
        .column("momentum", "shift_operator");
    for i in 0..resolved.len() {
        let k = shift_eigenphase(&p, &resolved.vector(i));
        table.push(vec![i.into(), resolved.eigenvalues[i].into(), resolved.group_of(i).into(), k.into()]);
    }
    let mut out = Outcome::new(table);
    out.note("dimension", resolved.len())?;
    out.note("ground_energy", resolved.eigenvalues[0])?;
    out.note("levels", resolved.degeneracy_groups.len())?;
    out.note("max_eigen_residual", resolved.max_residual)?;
    out.note("low_band", &band)?;
    Ok(out)
}

fn transfer_check(cfg: &RunConfig) -> Run {
    let p = cfg.model()?;
    let tol = cfg.f64("tolerance")?;
    let samples = [c64::new(0.3, 0.0), c64::new(-0.1, 0.2), c64::new(0.45, -0.35), c64::new(-0.6, 1.1)];
    let rep = identity_suite(&p, &samples)?;
    let mut table = Table::new().column("identity", "input").column("relative_residual", "transfer");
    let mut checks = Vec::new();
    for (name, r) in rep.entries() {
        table.push(vec![name.into(), r.into()]);
        checks.push(Check::at_most(name, r, tol));
    }
    let mut out = Outcome::new(table);
    out.note("max_residual", rep.max_residual())?;
    out.checks = checks;
    Ok(out)
}

fn roots(cfg: &RunConfig) -> Run {
    let p = cfg.model()?;
    let rows = all_rows(&p)?;
    let count = p.two_n() - 1;
    let table = Table::new()
        .column("index", "input")
        .column("ed_energy", "ed")
        .column("root_energy", "transfer")
        .column("root_momentum", "transfer")
        .column("shift_phase", "shift_operator")
        .column("pairing_defect", "transfer")
        .column("tags", "transfer");
    let mut table = root_columns(table, count);
    let mut worst_e = 0.0f64;
    for r in &rows {
        worst_e = worst_e.max((r.root_energy - r.ed_energy).abs());
        let tags: Vec<String> = r.roots.tags.iter().map(tag_name).collect();
        let mut cells = vec![
            r.index.into(),
            r.ed_energy.into(),
            r.root_energy.into(),
            r.root_momentum.into(),
            r.shift_phase.into(),
            r.roots.pairing_defect.into(),
            tags.join(";").into(),
        ];
        cells.extend(r.roots.roots.iter().flat_map(|&z| complex_cells(z)));
        table.push(cells);
    }
    let mut out = Outcome::new(table);
    out.note("max_energy_disagreement", worst_e)?;
    Ok(out)
}

fn bae_solve(cfg: &RunConfig) -> Run {
    let p = cfg.model()?;
    let path = cfg.str("seeds")?;
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(format!("cannot read seeds file {path}"), e))?;
    let seeds: Vec<PatternSeed> = serde_json::from_str(&text)
        .or_else(|_| serde_json::from_str::<PatternSeed>(&text).map(|s| vec![s]))
        .map_err(|e| CliError::invalid("seeds", path, &format!("expected a pattern seed or a list of them: {e}")))?;
    let count = p.two_n() - 1;
    let table = Table::new()
        .column("seed", "input")
        .column("status", "bae")
        .column("energy", "bae")
        .column("momentum", "bae")
        .column("final_residual", "bae")
        .column("pattern", "bae");
    let mut table = root_columns(table, count);
    let mut converged = 0;
    for (i, seed) in seeds.iter().enumerate() {
        match solve(seed, &p) {
            Ok(sol) => {
                converged += 1;
                let pattern = serde_json::to_string(&classify(&sol.roots, &p)).unwrap_or_default();
                let mut cells = vec![
                    i.into(),
                    "converged".into(),
                    energy_from_roots(&sol.roots.roots, &p)?.into(),
                    momentum_from_roots(&sol.roots.roots, &p)?.into(),
                    sol.final_residual.into(),
                    pattern.into(),
                ];
                cells.extend(sol.roots.roots.iter().flat_map(|&z| complex_cells(z)));
                table.push(cells);
            }
            Err(e) => {
                let mut cells = vec![i.into(), format!("failed: {e}").into(), Cell::Empty, Cell::Empty, Cell::Empty, Cell::Empty];
                cells.extend((0..2 * count).map(|_| Cell::Empty));
                table.push(cells);
            }
        }
    }
    let mut out = Outcome::new(table);
    out.check(Check::equals("converged_seeds", converged, seeds.len()));
    Ok(out)
}

fn density_table(rho: &DensityProfile, points: usize) -> Table {
    let mut table = Table::new().column("x", "input").column("density", "analytic");
    for (x, y) in rho.on_grid(points) {
        table.push(vec![x.into(), y.into()]);
    }
    table
}

fn thermo(cfg: &RunConfig) -> Run {
    let p = cfg.model()?;
    let trunc = cfg.omega_max()?;
    let points = cfg.usize("points")?;
    let mut out;
    match p.regime() {
        Regime::RealEta => {
            let rho = ground_density_i(&p, trunc)?;
            out = Outcome::new(density_table(&rho, points));
            out.note("ground_energy", ground_energy_i(&p)?)?;
            out.note("omega_max", rho.omega_max)?;
            out.note("normalization", rho.normalization())?;
        }
        Regime::EtaPlusIPi => {
            let mu = match cfg.opt_f64("mu")? {
                Some(m) => m,
                None => boundary_minimizer(&p, 400, trunc)?,
            };
            let rho = ground_density_ii(&p, mu, trunc)?;
            let g = ground_state_ii(&p, trunc)?;
            out = Outcome::new(density_table(&rho, points));
            out.note("mu", mu)?;
            out.note("boundary_energy", boundary_energy(&p, mu, trunc)?)?;
            out.note("ground_energy", g.energy)?;
            out.note("phase1_energy", g.phase1_energy)?;
            out.note("phase2_energy", g.phase2_energy)?;
            out.note("phase", g.phase)?;
            out.note("omega_max", rho.omega_max)?;
            out.note("normalization", rho.normalization())?;
            out.note("point_masses", &rho.point_masses)?;
        }
    }
    Ok(out)
}

fn excite(cfg: &RunConfig) -> Run {
    let p = cfg.model()?;
    let trunc = cfg.omega_max()?;
    let points = cfg.usize("points")?;
    let fallback = match p.regime() {
        Regime::RealEta => "pair",
        Regime::EtaPlusIPi => "boundary",
    };
    let kind = cfg.choice("kind", &["pair", "boundary", "spinon"], fallback)?;
    let grid = angle_grid(points);
    let table = match kind.as_str() {
        "pair" => {
            let n = cfg.usize("n")? as u32;
            let mut t = Table::new().column("lambda", "input").column("energy", "analytic").column("momentum", "analytic");
            for &l in &grid {
                let em = excitation(ExcitationQuery::PairI { n, lambda: l }, &p, trunc)?;
                t.push(vec![l.into(), em.energy.into(), em.momentum.into()]);
            }
            t
        }
        "boundary" => {
            let mut t = Table::new().column("mu", "input").column("energy", "analytic").column("momentum", "analytic");
            for &m in &grid {
                let q = match phase_of(p.b()) {
                    Phase::II => ExcitationQuery::BoundaryII { mu: m },
                    _ => ExcitationQuery::BoundaryI { mu: m },
                };
                let em = excitation(q, &p, trunc)?;
                t.push(vec![m.into(), em.energy.into(), em.momentum.into()]);
            }
            t
        }
        _ => {
            let mut t = Table::new()
                .column("mu1", "input")
                .column("mu2", "input")
                .column("energy", "analytic")
                .column("momentum", "analytic");
            for &m1 in &grid {
                for &m2 in &grid {
                    let em = excitation(ExcitationQuery::Spinon { mu1: m1, mu2: m2 }, &p, trunc)?;
                    t.push(vec![m1.into(), m2.into(), em.energy.into(), em.momentum.into()]);
                }
            }
            t
        }
    };
    let energy_col = table.columns.iter().position(|c| c.name == "energy").expect("energy column");
    let min = table
        .rows
        .iter()
        .filter_map(|r| match r[energy_col] {
            Cell::Num(e) => Some(e),
            _ => None,
        })
        .fold(f64::INFINITY, f64::min);
    let mut out = Outcome::new(table);
    if kind != "spinon" {
        out.note("branch_jumps", branch_jumps(&out.table))?;
    }
    out.note("kind", &kind)?;
    out.note("min_energy", min)?;
    Ok(out)
}

/// Grid parameters where the principal-branch momentum jumps by about 2 pi
/// from the previous grid point.
fn branch_jumps(table: &Table) -> Vec<f64> {
    let num = |c: &Cell| match c {
        Cell::Num(x) => *x,
        _ => f64::NAN,
    };
    table
        .rows
        .windows(2)
        .filter(|w| (num(&w[1][2]) - num(&w[0][2])).abs() > PI)
        .map(|w| num(&w[1][0]))
        .collect()
}

pub fn qpt_outcome(s: &QptScan, step: f64) -> Result<Outcome, CliError> {
    let mut t = Table::new()
        .column("b", "input")
        .column("energy_per_site", "analytic")
        .column("derivative_left", "analytic");
    for (i, (&b, &e)) in s.b.iter().zip(&s.energy_per_site).enumerate() {
        let d = if i == 0 { None } else { Some(s.derivative[i - 1]) };
        t.push(vec![b.into(), e.into(), d.into()]);
    }
    let mut out = Outcome::new(t);
    out.note("critical_b", s.critical_b)?;
    out.note("slope_phase1", s.slope_phase1)?;
    out.note("slope_phase2", s.slope_phase2)?;
    out.note("derivative_jump", s.derivative_jump)?;
    out.note("grid_noise", s.grid_noise)?;
    out.note("curvature_variation", s.curvature_variation)?;
    out.note("crossing_mismatch", s.crossing_mismatch)?;
    out.check(Check::at_most("critical_b_offset", (s.critical_b - std::f64::consts::FRAC_PI_4).abs(), step + 1e-12));
    out.check(Check::above("jump_over_noise", s.derivative_jump / s.grid_noise, 10.0));
    out.check(Check::at_most("crossing_mismatch", s.crossing_mismatch, 1e-10));
    Ok(out)
}

fn qpt(cfg: &RunConfig) -> Run {
    let p = cfg.model()?;
    let trunc = cfg.omega_max()?;
    let (lo, hi, step) = (cfg.f64("b_min")?, cfg.f64("b_max")?, cfg.f64("step")?);
    if !(step > 0.0) || !(hi > lo) {
        return Err(CliError::invalid("step", &step.to_string(), "need step > 0 and b_max > b_min"));
    }
    let s = qpt_scan(&p, &uniform_grid(lo, hi, step), trunc)?;
    qpt_outcome(&s, step)
}

pub fn scaling_outcome(points: &[SizePoint]) -> Result<Outcome, CliError> {
    let mut t = Table::new()
        .column("two_n", "input")
        .column("analytic", "analytic")
        .column("numeric", "ed")
        .column("delta", "analytic-ed")
        .column("root_parameter", "transfer");
    for s in points {
        t.push(vec![s.two_n.into(), s.analytic.into(), s.numeric.into(), s.delta.into(), s.root_parameter.into()]);
    }
    let mut out = Outcome::new(t);
    let data = fit_points(points);
    for (label, model) in [("exponential_fit", FitModel::Exponential), ("power_law_fit", FitModel::PowerLaw)] {
        if let Ok(fit) = scaling_fit(&data, model) {
            out.note(label, serde_json::json!({"amplitude": fit.amplitude, "rate": fit.rate, "residual": fit.residual}))?;
        }
    }
    out.note("monotone", points.windows(2).all(|w| w[1].delta.abs() < w[0].delta.abs()))?;
    Ok(out)
}

fn scaling(cfg: &RunConfig) -> Run {
    let p = cfg.model()?;
    let sizes = cfg.usize_list("sizes")?;
    let quantity = cfg.choice("quantity", &["ground", "pair", "boundary"], "ground")?;
    let points = match (quantity.as_str(), p.regime()) {
        ("ground", Regime::RealEta) => size_scan(&p, &sizes, ground_point_real)?,
        ("ground", Regime::EtaPlusIPi) => size_scan(&p, &sizes, ground_point_shifted)?,
        ("pair", _) => {
            let n = cfg.usize("n")? as u32;
            size_scan(&p, &sizes, |q| pair_excitation_point(q, n))?
        }
        _ => size_scan(&p, &sizes, boundary_excitation_point)?,
    };
    let mut out = scaling_outcome(&points)?;
    out.note("quantity", &quantity)?;
    Ok(out)
}

pub fn texture_outcome(p: &ModelParams, kind: KinkKind) -> Result<Outcome, CliError> {
    let resolved = resolved_spectrum(p)?;
    let basis = kink_basis(p, kind);
    let rows = texture_projections(&resolved, &basis)?;
    let mut t = Table::new().column("index", "input").column("energy", "ed").column("delta", "kink");
    t = (0..basis.len()).fold(t, |t, j| t.complex_column(&format!("alpha{}", j + 1), "kink"));
    for (i, r) in rows.iter().enumerate() {
        let mut cells = vec![i.into(), r.energy.into(), r.delta.into()];
        cells.extend(r.alpha.iter().flat_map(|&a| complex_cells(a)));
        t.push(cells);
    }
    let mut out = Outcome::new(t);
    out.note("basis", kind)?;
    out.note("basis_indices", &basis.indices)?;
    Ok(out)
}

fn texture(cfg: &RunConfig) -> Run {
    let p = cfg.model()?;
    let fallback = match p.regime() {
        Regime::RealEta => "ferro",
        Regime::EtaPlusIPi => "neel",
    };
    let kind = match cfg.choice("basis", &["ferro", "neel"], fallback)?.as_str() {
        "ferro" => KinkKind::Ferro,
        _ => KinkKind::Neel,
    };
    texture_outcome(&p, kind)
}

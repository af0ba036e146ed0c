//! Direct solution of the homogeneous BAEs for `(Lambda0^2, z_1..z_{2N-1})`.
//!
//! The equations are imposed at inhomogeneities `theta_j(eps) = (-1)^j a + eps i delta_j`
//! and followed to the staggered limit `eps = 0`. Coinciding inhomogeneities make
//! the plain equations degenerate, so each group of nodes sharing a base value is
//! imposed through divided differences, which stay well posed as nodes merge and
//! become derivative conditions at `eps = 0`.

use std::f64::consts::PI;

use faer::{c64, Mat};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::solve as lin_solve;
use crate::params::ModelParams;
use crate::roots::{strip_distance, tag_root, to_strip, RootTag, ZeroRootSet};

/// Taylor order of the local expansions.
const SERIES_ORDER: usize = 40;
const NEWTON_TOL: f64 = 1e-12;
const NEWTON_MAX_ITER: usize = 60;
const LINE_SEARCH_MIN: f64 = 1e-4;
/// Final raw residual bound relative to the size of the two terms.
pub const FINAL_RESIDUAL_TOL: f64 = 1e-10;
/// Roots closer than this during continuation count as a collision.
pub const COLLISION_TOL: f64 = 1e-8;
const MAX_REFINEMENTS: usize = 10;

/// `eps` schedule `1, 1/2, ..., 2^-20, 0`.
pub fn default_schedule() -> Vec<f64> {
    let mut s: Vec<f64> = (0..=20).map(|k| 0.5f64.powi(k)).collect();
    s.push(0.0);
    s
}

/// Perturbation directions `delta_j = j / (10 * 2N)`.
pub fn default_deltas(two_n: usize) -> Vec<f64> {
    (1..=two_n).map(|j| j as f64 / (10.0 * two_n as f64)).collect()
}

fn log_sinh(x: c64) -> c64 {
    // ln sinh x = |x| + ln(1 - e^{-2|x|}) - ln 2, on the branch continuous with x.
    if x.re.abs() < 1.0 {
        return x.sinh().ln();
    }
    let (y, sign) = if x.re > 0.0 { (x, 1.0) } else { (-x, -1.0) };
    let v = y + (c64::new(1.0, 0.0) - (-y * 2.0).exp()).ln() - c64::new(2f64.ln(), 0.0);
    if sign > 0.0 {
        v
    } else {
        v + c64::new(0.0, PI)
    }
}

#[derive(Debug, Clone)]
pub struct BaeSystem {
    pub p: ModelParams,
    pub thetas: Vec<c64>,
}

impl BaeSystem {
    pub fn new(p: &ModelParams, thetas: Vec<c64>) -> Result<Self> {
        if thetas.len() != p.two_n() {
            return Err(Error::DimensionMismatch {
                expected: p.two_n(),
                found: thetas.len(),
            });
        }
        Ok(Self {
            p: p.clone(),
            thetas,
        })
    }

    pub fn staggered(p: &ModelParams) -> Self {
        Self {
            p: p.clone(),
            thetas: p.staggered_thetas(),
        }
    }

    /// Inhomogeneities on the homotopy path at `eps`.
    pub fn on_path(p: &ModelParams, deltas: &[f64], eps: f64) -> Self {
        let thetas = p
            .staggered_thetas()
            .iter()
            .zip(deltas)
            .map(|(t, d)| t + c64::new(0.0, eps * d))
            .collect();
        Self {
            p: p.clone(),
            thetas,
        }
    }

    pub fn unknown_count(&self) -> usize {
        self.p.two_n()
    }

    /// The two log-magnitude terms of equation `l`: `(ln Lambda0^2 + ln g, ln h)`.
    fn log_terms(&self, l: usize, log_l0_sq: c64, roots: &[c64]) -> (c64, c64) {
        let eta = self.p.crossing();
        let half = eta * 0.5;
        let th = self.thetas[l];
        let lg: c64 = roots
            .iter()
            .map(|&z| log_sinh(th - z + half) + log_sinh(th - z - half))
            .sum();
        let lh: c64 = self
            .thetas
            .iter()
            .map(|&t| log_sinh(th - t + eta) + log_sinh(th - t - eta))
            .sum::<c64>()
            - log_sinh(eta) * (2 * self.p.two_n()) as f64;
        (log_l0_sq + lg, lh)
    }

    /// Residuals `Lambda0^2 g(theta_l) + h(theta_l)`, each evaluated as a sum of
    /// exponentials sharing the larger of the two exponents.
    ///
    /// `unknowns = [ln Lambda0^2, z_1, ..., z_{2N-1}]`.
    pub fn residual(&self, unknowns: &[c64]) -> Result<Vec<c64>> {
        self.check_len(unknowns)?;
        (0..self.thetas.len())
            .map(|l| {
                let (a, b) = self.log_terms(l, unknowns[0], &unknowns[1..]);
                let offset = a.re.max(b.re);
                let v = ((a - offset).exp() + (b - offset).exp()) * offset.exp();
                if v.re.is_finite() && v.im.is_finite() {
                    Ok(v)
                } else {
                    Err(Error::Overflow { equation: l })
                }
            })
            .collect()
    }

    /// `max_l |residual_l| / (|Lambda0^2 g| + |h|)`, computed in log space.
    pub fn relative_residual(&self, unknowns: &[c64]) -> Result<f64> {
        self.check_len(unknowns)?;
        Ok((0..self.thetas.len())
            .map(|l| {
                let (a, b) = self.log_terms(l, unknowns[0], &unknowns[1..]);
                let offset = a.re.max(b.re);
                let (ea, eb) = ((a - offset).exp(), (b - offset).exp());
                (ea + eb).norm() / (ea.norm() + eb.norm())
            })
            .fold(0.0, f64::max))
    }

    fn check_len(&self, unknowns: &[c64]) -> Result<()> {
        if unknowns.len() != self.unknown_count() {
            return Err(Error::DimensionMismatch {
                expected: self.unknown_count(),
                found: unknowns.len(),
            });
        }
        Ok(())
    }
}

// ---- truncated power series in the local variable t = theta - base ----

fn sinh_series(c: c64) -> Vec<c64> {
    let (s, ch) = (c.sinh(), c.cosh());
    let mut out = Vec::with_capacity(SERIES_ORDER);
    let mut f = 1.0;
    for k in 0..SERIES_ORDER {
        if k > 0 {
            f /= k as f64;
        }
        out.push(if k % 2 == 0 { s } else { ch } * f);
    }
    out
}

fn cosh_series(c: c64) -> Vec<c64> {
    let (s, ch) = (c.sinh(), c.cosh());
    let mut out = Vec::with_capacity(SERIES_ORDER);
    let mut f = 1.0;
    for k in 0..SERIES_ORDER {
        if k > 0 {
            f /= k as f64;
        }
        out.push(if k % 2 == 0 { ch } else { s } * f);
    }
    out
}

fn series_mul(a: &[c64], b: &[c64]) -> Vec<c64> {
    let n = a.len();
    let mut out = vec![c64::new(0.0, 0.0); n];
    for (i, &ai) in a.iter().enumerate() {
        if ai == c64::new(0.0, 0.0) {
            continue;
        }
        for (o, &bj) in out[i..].iter_mut().zip(b) {
            *o += ai * bj;
        }
    }
    out
}

fn series_add(a: &[c64], b: &[c64]) -> Vec<c64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn unit_series() -> Vec<c64> {
    let mut v = vec![c64::new(0.0, 0.0); SERIES_ORDER];
    v[0] = c64::new(1.0, 0.0);
    v
}

/// Complete homogeneous symmetric polynomials `h_0..h_degree` of `nodes`.
fn complete_homogeneous(nodes: &[c64], degree: usize) -> Vec<c64> {
    let mut h = vec![c64::new(0.0, 0.0); degree + 1];
    h[0] = c64::new(1.0, 0.0);
    for &s in nodes {
        for k in 1..=degree {
            let prev = h[k - 1];
            h[k] += s * prev;
        }
    }
    h
}

/// Groups of equation indices sharing a staggered base value.
fn clusters(base: &[c64]) -> Vec<(c64, Vec<usize>)> {
    let mut out: Vec<(c64, Vec<usize>)> = Vec::new();
    for (i, &b) in base.iter().enumerate() {
        match out.iter_mut().find(|(c, _)| (c - b).norm() < 1e-12) {
            Some((_, idx)) => idx.push(i),
            None => out.push((b, vec![i])),
        }
    }
    out
}

/// Divided-difference form of the equations on the homotopy path, with its
/// analytic Jacobian. Rows are scaled by `|h(base)|` of their cluster.
struct ConfluentSystem<'a> {
    p: &'a ModelParams,
    base: Vec<c64>,
    deltas: &'a [f64],
}

impl ConfluentSystem<'_> {
    fn eval(&self, x: &[c64], eps: f64) -> (Vec<c64>, Mat<c64>) {
        let n = x.len();
        let eta = self.p.crossing();
        let half = eta * 0.5;
        let l0 = x[0].exp();
        let roots = &x[1..];
        let thetas: Vec<c64> = self
            .base
            .iter()
            .zip(self.deltas)
            .map(|(b, d)| b + c64::new(0.0, eps * d))
            .collect();
        let inv = eta.sinh().powi(-(2 * self.p.two_n() as i32));
        let mut res = vec![c64::new(0.0, 0.0); n];
        let mut jac = Mat::<c64>::zeros(n, n);
        let mut row = 0;
        for (beta, idx) in clusters(&self.base) {
            let factors: Vec<(Vec<c64>, Vec<c64>)> = roots
                .iter()
                .map(|&z| (sinh_series(beta - z + half), sinh_series(beta - z - half)))
                .collect();
            let pair_products: Vec<Vec<c64>> = factors.iter().map(|(a, b)| series_mul(a, b)).collect();
            // prefix and suffix products for the leave-one-out derivatives
            let mut prefix = vec![unit_series()];
            for pp in &pair_products {
                let next = series_mul(prefix.last().unwrap(), pp);
                prefix.push(next);
            }
            let mut suffix = vec![unit_series(); pair_products.len() + 1];
            for j in (0..pair_products.len()).rev() {
                suffix[j] = series_mul(&suffix[j + 1], &pair_products[j]);
            }
            let g = prefix[pair_products.len()].clone();
            let mut h = unit_series();
            h[0] = c64::new(inv.re, inv.im);
            for &t in &thetas {
                h = series_mul(&h, &series_mul(&sinh_series(beta - t + eta), &sinh_series(beta - t - eta)));
            }
            let scale = 1.0 / h[0].norm().max(f64::MIN_POSITIVE);
            let dg: Vec<Vec<c64>> = (0..roots.len())
                .map(|j| {
                    let z = roots[j];
                    let (s1, s2) = &factors[j];
                    let d1: Vec<c64> = cosh_series(beta - z + half).iter().map(|v| -v).collect();
                    let d2: Vec<c64> = cosh_series(beta - z - half).iter().map(|v| -v).collect();
                    let dpair = series_add(&series_mul(&d1, s2), &series_mul(s1, &d2));
                    series_mul(&series_mul(&prefix[j], &suffix[j + 1]), &dpair)
                })
                .collect();
            let f: Vec<c64> = g.iter().zip(&h).map(|(gv, hv)| l0 * gv + hv).collect();
            let nodes: Vec<c64> = idx.iter().map(|&i| thetas[i] - beta).collect();
            for k in 0..idx.len() {
                let hs = complete_homogeneous(&nodes[..=k], SERIES_ORDER - k - 1);
                let weigh = |ser: &[c64]| -> c64 { ser[k..].iter().zip(&hs).map(|(a, b)| a * b).sum() };
                res[row] = weigh(&f) * scale;
                jac[(row, 0)] = l0 * weigh(&g) * scale;
                for (j, d) in dg.iter().enumerate() {
                    jac[(row, 1 + j)] = l0 * weigh(d) * scale;
                }
                row += 1;
            }
        }
        (res, jac)
    }

    fn norm(&self, x: &[c64], eps: f64) -> f64 {
        self.eval(x, eps).0.iter().fold(0.0, |m, v| m.max(v.norm()))
    }

    /// Damped Newton iteration; returns the solution and the residual history.
    fn newton(&self, mut x: Vec<c64>, eps: f64) -> Result<(Vec<c64>, Vec<f64>)> {
        let mut history = Vec::new();
        for _ in 0..NEWTON_MAX_ITER {
            let (r, j) = self.eval(&x, eps);
            let nr = r.iter().fold(0.0f64, |m, v| m.max(v.norm()));
            history.push(nr);
            if !nr.is_finite() {
                break;
            }
            if nr < NEWTON_TOL {
                return Ok((x, history));
            }
            let minus_r: Vec<c64> = r.iter().map(|v| -v).collect();
            let dx = lin_solve(&j, &minus_r);
            if dx.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
                break;
            }
            let mut t = 1.0;
            let mut accepted = None;
            while t >= LINE_SEARCH_MIN {
                let trial: Vec<c64> = x.iter().zip(&dx).map(|(a, d)| a + d * t).collect();
                let nt = self.norm(&trial, eps);
                if nt < nr {
                    accepted = Some(trial);
                    break;
                }
                t *= 0.5;
            }
            match accepted {
                Some(next) => {
                    let step = next.iter().zip(&x).fold(0.0f64, |m, (a, b)| m.max((a - b).norm()));
                    x = next;
                    if step < 1e-15 * (1.0 + x.iter().fold(0.0f64, |m, v| m.max(v.norm()))) {
                        let nr = self.norm(&x, eps);
                        history.push(nr);
                        if nr < 1e3 * NEWTON_TOL {
                            return Ok((x, history));
                        }
                        break;
                    }
                }
                None => break,
            }
        }
        let residual = history.last().copied().unwrap_or(f64::INFINITY);
        Err(Error::NewtonDiverged { eps, residual })
    }
}

/// Composition of a root pattern, used as solver seed and as classifier output.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PatternSeed {
    /// Imaginary parts `x` of on-axis roots `z = i x` (real-eta regime).
    pub imaginary: Vec<f64>,
    /// Pairs `± n eta / 2 + i lambda`.
    pub pairs: Vec<PairSeed>,
    /// Imaginary parts `mu` of on-axis roots in the shifted regime.
    pub boundary: Vec<f64>,
    /// Roots that match no pattern, kept verbatim.
    pub unknown: Vec<c64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairSeed {
    pub n: u32,
    pub lambda: f64,
}

impl PatternSeed {
    pub fn root_count(&self) -> usize {
        self.imaginary.len() + 2 * self.pairs.len() + self.boundary.len() + self.unknown.len()
    }

    /// Initial root positions in the canonical strip.
    pub fn positions(&self, p: &ModelParams) -> Vec<c64> {
        let eta = p.eta();
        let mut z: Vec<c64> = self.imaginary.iter().map(|&x| c64::new(0.0, x)).collect();
        for pair in &self.pairs {
            let re = pair.n as f64 * eta / 2.0;
            z.push(to_strip(c64::new(-re, pair.lambda)));
            z.push(to_strip(c64::new(re, pair.lambda)));
        }
        z.extend(self.boundary.iter().map(|&mu| to_strip(c64::new(0.0, mu))));
        z.extend(self.unknown.iter().copied());
        z
    }
}

/// Reads off the pattern of a root set: on-axis roots, pairs at `± n eta / 2`
/// (first matching `n = 2, 3, ...` within `0.1 eta`) and leftovers.
pub fn classify(zrs: &ZeroRootSet, p: &ModelParams) -> PatternSeed {
    let mut seed = PatternSeed::default();
    let mut used = vec![false; zrs.roots.len()];
    for &(i, j) in &zrs.pairing {
        if i == j {
            continue;
        }
        let (zi, zj) = (zrs.roots[i], zrs.roots[j]);
        let tag = tag_root(if zi.re > zj.re { zi } else { zj }, p);
        if let RootTag::ConjugatePair { n } = tag {
            let lambda = 0.5 * (zi.im + zj.im);
            seed.pairs.push(PairSeed { n, lambda });
            used[i] = true;
            used[j] = true;
        }
    }
    for (k, &z) in zrs.roots.iter().enumerate() {
        if used[k] {
            continue;
        }
        match tag_root(z, p) {
            RootTag::Imaginary => seed.imaginary.push(z.im),
            RootTag::BoundaryString => seed.boundary.push(z.im),
            _ => seed.unknown.push(z),
        }
    }
    seed
}

/// Continuation record.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HomotopyPath {
    pub deltas: Vec<f64>,
    /// `eps` values actually visited, including refinements.
    pub schedule: Vec<f64>,
    /// Root positions after each step.
    pub solutions: Vec<Vec<c64>>,
    /// `z -> -z*` pairing defect after each step.
    pub pairing_defects: Vec<f64>,
    /// Scaled Newton residual history of each step.
    pub newton_histories: Vec<Vec<f64>>,
}

impl HomotopyPath {
    pub fn max_pairing_defect(&self) -> f64 {
        self.pairing_defects.iter().copied().fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BaeSolution {
    pub roots: ZeroRootSet,
    pub lambda0_sq: c64,
    /// Relative residual of the plain equations at the staggered point.
    pub final_residual: f64,
    pub path: HomotopyPath,
}

/// Ratios of successive Newton residuals over the last steps of a history,
/// ignoring entries already at the floor.
pub fn convergence_ratios(history: &[f64], floor: f64, last: usize) -> Vec<f64> {
    let ratios: Vec<f64> = history
        .windows(2)
        .filter(|w| w[0] > floor)
        .map(|w| w[1] / w[0])
        .collect();
    ratios[ratios.len().saturating_sub(last)..].to_vec()
}

fn min_separation(roots: &[c64]) -> (f64, usize, usize) {
    let mut best = (f64::INFINITY, 0, 0);
    for i in 0..roots.len() {
        for j in i + 1..roots.len() {
            let d = strip_distance(roots[i], roots[j]);
            if d < best.0 {
                best = (d, i, j);
            }
        }
    }
    best
}

fn pairing_defect(roots: &[c64]) -> f64 {
    roots
        .iter()
        .map(|z| {
            let m = -z.conj();
            roots.iter().map(|w| strip_distance(m, *w)).fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
}

/// Newton at `eps = 1` from the seed, continuation along the default schedule
/// and an extrapolated predictor with a confluent corrector at `eps = 0`.
pub fn solve(seed: &PatternSeed, p: &ModelParams) -> Result<BaeSolution> {
    solve_with_schedule(seed, p, &default_schedule())
}

pub fn solve_with_schedule(seed: &PatternSeed, p: &ModelParams, schedule: &[f64]) -> Result<BaeSolution> {
    let expected = p.two_n() - 1;
    if seed.root_count() != expected {
        return Err(Error::SeedSize {
            expected,
            found: seed.root_count(),
        });
    }
    let deltas = default_deltas(p.two_n());
    let sys = ConfluentSystem {
        p,
        base: p.staggered_thetas(),
        deltas: &deltas,
    };
    let z0 = seed.positions(p);
    let eps0 = schedule[0];

    // Least-squares initial Lambda0^2 from F = l0 g + h at the seed.
    let mut x: Vec<c64> = std::iter::once(c64::new(0.0, 0.0)).chain(z0.iter().copied()).collect();
    let (r, j) = sys.eval(&x, eps0);
    let g: Vec<c64> = (0..r.len()).map(|i| j[(i, 0)]).collect();
    let h: Vec<c64> = r.iter().zip(&g).map(|(a, b)| a - b).collect();
    let gg: f64 = g.iter().map(|v| v.norm_sqr()).sum();
    let gh: c64 = g.iter().zip(&h).map(|(a, b)| a.conj() * b).sum();
    let l0 = if gg > 0.0 { -gh / gg } else { c64::new(1.0, 0.0) };
    x[0] = if l0.norm() > 0.0 { l0.ln() } else { c64::new(0.0, 0.0) };

    let mut path = HomotopyPath {
        deltas: deltas.clone(),
        schedule: Vec::new(),
        solutions: Vec::new(),
        pairing_defects: Vec::new(),
        newton_histories: Vec::new(),
    };
    let (x1, hist) = sys.newton(x, eps0)?;
    record(&mut path, eps0, &x1, hist, eps0)?;
    let mut history: Vec<(f64, Vec<c64>)> = vec![(eps0, x1)];

    let mut targets: Vec<f64> = schedule[1..].to_vec();
    targets.reverse();
    let mut refinements = 0;
    while let Some(eps) = targets.pop() {
        let predicted = predict(&history, eps);
        let attempt = sys
            .newton(predicted, eps)
            .and_then(|(xn, hist)| record(&mut path, eps, &xn, hist, eps).map(|_| xn));
        match attempt {
            Ok(xn) => history.push((eps, xn)),
            Err(e) => {
                let prev = history.last().unwrap().0;
                if refinements >= MAX_REFINEMENTS || (prev - eps).abs() < 1e-12 {
                    return Err(e);
                }
                refinements += 1;
                targets.push(eps);
                targets.push(0.5 * (prev + eps));
            }
        }
    }

    let (_, xf) = history.pop().unwrap();
    let staggered = BaeSystem::staggered(p);
    let final_residual = staggered.relative_residual(&xf)?;
    if final_residual > FINAL_RESIDUAL_TOL || !final_residual.is_finite() {
        return Err(Error::NotConverged {
            residual: final_residual,
            tolerance: FINAL_RESIDUAL_TOL,
        });
    }
    let lambda0_sq = xf[0].exp();
    let mut roots = ZeroRootSet::from_roots(lambda0_sq.sqrt(), &xf[1..], p);
    // keep Lambda0 consistent with the strip representatives
    let shift: f64 = xf[1..]
        .iter()
        .map(|&z| ((to_strip(z).im - z.im) / PI).round())
        .sum();
    if shift.rem_euclid(2.0) != 0.0 {
        roots.lambda0 = -roots.lambda0;
    }
    Ok(BaeSolution {
        roots,
        lambda0_sq,
        final_residual,
        path,
    })
}

/// Linear extrapolation in `eps` from the last two accepted points.
fn predict(history: &[(f64, Vec<c64>)], eps: f64) -> Vec<c64> {
    match history {
        [.., (e1, x1), (e2, x2)] if (e2 - e1).abs() > 0.0 => {
            let t = (eps - e2) / (e2 - e1);
            x2.iter().zip(x1).map(|(b, a)| b + (b - a) * t).collect()
        }
        [.., (_, x)] => x.clone(),
        [] => unreachable!("continuation starts from a solved point"),
    }
}

fn record(path: &mut HomotopyPath, eps: f64, x: &[c64], hist: Vec<f64>, at: f64) -> Result<()> {
    let roots: Vec<c64> = x[1..].iter().map(|&z| to_strip(z)).collect();
    let (sep, i, j) = min_separation(&roots);
    if sep < COLLISION_TOL {
        return Err(Error::RootCollision {
            first: i,
            second: j,
            eps: at,
        });
    }
    path.schedule.push(eps);
    path.pairing_defects.push(pairing_defect(&roots));
    path.solutions.push(roots);
    path.newton_histories.push(hist);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::Regime;

    fn p4() -> ModelParams {
        ModelParams::new(4, 0.2, 0.8, Regime::RealEta).unwrap()
    }

    /// Plain products, no log stabilization.
    fn direct_residual(sys: &BaeSystem, x: &[c64]) -> Vec<c64> {
        let eta = sys.p.crossing();
        let half = eta * 0.5;
        sys.thetas
            .iter()
            .map(|&th| {
                let g: c64 = x[1..]
                    .iter()
                    .map(|&z| (th - z + half).sinh() * (th - z - half).sinh())
                    .product();
                let h: c64 = sys
                    .thetas
                    .iter()
                    .map(|&t| (th - t + eta).sinh() * (th - t - eta).sinh())
                    .product::<c64>()
                    * eta.sinh().powi(-(2 * sys.p.two_n() as i32));
                x[0].exp() * g + h
            })
            .collect()
    }

    #[test]
    fn stabilized_residual_matches_direct_products() {
        let p = p4();
        let sys = BaeSystem::on_path(&p, &default_deltas(4), 0.7);
        let x = [
            c64::new(0.3, -0.2),
            c64::new(0.1, 0.4),
            c64::new(-0.5, 0.2),
            c64::new(0.7, -1.1),
        ];
        let a = sys.residual(&x).unwrap();
        let b = direct_residual(&sys, &x);
        for (u, v) in a.iter().zip(&b) {
            assert!((u - v).norm() < 1e-12 * v.norm().max(1.0));
        }
    }

    #[test]
    fn residual_is_symmetric_in_roots() {
        let sys = BaeSystem::on_path(&p4(), &default_deltas(4), 0.3);
        let x = [c64::new(0.1, 0.0), c64::new(0.2, 0.3), c64::new(-0.4, 0.1), c64::new(0.0, 0.9)];
        let y = [x[0], x[3], x[1], x[2]];
        let (a, b) = (sys.residual(&x).unwrap(), sys.residual(&y).unwrap());
        for (u, v) in a.iter().zip(&b) {
            assert!((u - v).norm() < 1e-13 * u.norm().max(1.0));
        }
    }

    #[test]
    fn log_sinh_agrees_with_direct_formula() {
        for x in [c64::new(2.5, 0.3), c64::new(-3.0, 1.2), c64::new(0.2, -0.7)] {
            assert!((log_sinh(x).exp() - x.sinh()).norm() < 1e-12 * x.sinh().norm());
        }
    }

    #[test]
    fn confluent_rows_match_divided_differences_at_distinct_nodes() {
        let p = p4();
        let deltas = default_deltas(4);
        let sys = ConfluentSystem {
            p: &p,
            base: p.staggered_thetas(),
            deltas: &deltas,
        };
        let x = [c64::new(0.3, -0.2), c64::new(0.1, 0.4), c64::new(-0.5, 0.2), c64::new(0.7, -1.1)];
        let eps = 0.8;
        let (rows, _) = sys.eval(&x, eps);
        let plain = BaeSystem::on_path(&p, &deltas, eps);
        let f = direct_residual(&plain, &x);
        // cluster of odd sites: equations 0 and 2; first divided difference
        let t = &plain.thetas;
        let scale = |beta: c64| -> f64 {
            let eta = p.crossing();
            (t.iter().map(|&th| (beta - th + eta).sinh() * (beta - th - eta).sinh()).product::<c64>()
                * eta.sinh().powi(-8))
            .norm()
        };
        let s = scale(t[0] - c64::new(0.0, eps * deltas[0]));
        assert!((rows[0] - f[0] / s).norm() < 1e-10);
        let dd = (f[2] - f[0]) / (t[2] - t[0]);
        assert!((rows[1] - dd / s).norm() < 1e-9 * dd.norm().max(1.0) / s);
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let p = p4();
        let deltas = default_deltas(4);
        let sys = ConfluentSystem {
            p: &p,
            base: p.staggered_thetas(),
            deltas: &deltas,
        };
        let x = vec![c64::new(0.3, -0.2), c64::new(0.1, 0.4), c64::new(-0.5, 0.2), c64::new(0.7, -1.1)];
        let (_, jac) = sys.eval(&x, 0.0);
        let h = 1e-6;
        for k in 0..4 {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[k] += h;
            xm[k] -= h;
            let (rp, _) = sys.eval(&xp, 0.0);
            let (rm, _) = sys.eval(&xm, 0.0);
            for i in 0..4 {
                let fd = (rp[i] - rm[i]) / (2.0 * h);
                assert!((fd - jac[(i, k)]).norm() < 1e-6 * (1.0 + fd.norm()));
            }
        }
    }

    #[test]
    fn classify_inverts_generated_pair() {
        let p = p4();
        let seed = PatternSeed {
            imaginary: vec![0.0],
            pairs: vec![PairSeed { n: 3, lambda: 0.4 }],
            ..Default::default()
        };
        let set = ZeroRootSet::from_roots(c64::new(1.0, 0.0), &seed.positions(&p), &p);
        let back = classify(&set, &p);
        assert_eq!(back.pairs.len(), 1);
        assert_eq!(back.pairs[0].n, 3);
        assert!((back.pairs[0].lambda - 0.4).abs() < 1e-15);
        assert_eq!(back.imaginary, vec![0.0]);
    }

    #[test]
    fn seed_size_is_checked() {
        let seed = PatternSeed {
            imaginary: vec![0.0, 0.1],
            ..Default::default()
        };
        assert!(matches!(solve(&seed, &p4()), Err(Error::SeedSize { .. })));
    }
}

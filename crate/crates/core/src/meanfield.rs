//! Mean-field energy landscape over the resonator order parameters.
//!
//! Replacing the mode operators by their ground-state averages leaves an
//! Ising chain in the effective field `Ω(j)`, and the energy per particle is
//!
//! ```text
//! e_g(φ) = Σ_l (ω_l + 4 D_l) φ_l² - (1/2N) Σ_k Λ_k(φ)
//! ```
//!
//! which is even under `φ → -φ`. Its global minimum fixes the ground state;
//! at any stationary point `Σˣ_l = φ_l (ω_l + 4 D_l)`.

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::correlation::pair_contractions;
use crate::error::{ensure_len, Error, Result};
use crate::fermion::{chain_energy, ground_sector, SectorMode};
use crate::model::{effective_field, ChainSpec, ModeSet};

const INV_GOLDEN: f64 = 0.618_033_988_749_894_8;

/// Minima closer than this in energy are reported as degenerate.
pub const DEGENERACY_TOLERANCE: f64 = 1e-9;

/// Search controls for [`minimize_phi`] and [`stationary_points`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SearchGrid {
    /// Upper end of the scanned range `[0, phi_max]` (`[-phi_max, phi_max]`
    /// for all but the first mode of a multi-mode search).
    pub phi_max: f64,
    /// Coarse grid points for a single mode.
    pub points: usize,
    /// Golden-section tolerance on φ.
    pub tol: f64,
    /// Coarse grid points per mode for multi-mode searches.
    pub multi_points: usize,
    /// Coordinate descent stops once no component moves more than this.
    pub multi_tol: f64,
}

impl Default for SearchGrid {
    fn default() -> Self {
        SearchGrid {
            phi_max: 1.5,
            points: 151,
            tol: 1e-6,
            multi_points: 31,
            multi_tol: 1e-5,
        }
    }
}

impl SearchGrid {
    fn validate(&self) -> Result<()> {
        if !(self.phi_max > 0.0 && self.phi_max.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "phi_max = {}",
                self.phi_max
            )));
        }
        if self.points < 3 || self.multi_points < 3 {
            return Err(Error::InvalidParameter(
                "search grids need at least 3 points".into(),
            ));
        }
        if !(self.tol > 0.0 && self.multi_tol > 0.0) {
            return Err(Error::InvalidParameter(
                "search tolerances must be positive".into(),
            ));
        }
        Ok(())
    }

    fn step(&self) -> f64 {
        self.phi_max / (self.points - 1) as f64
    }
}

/// A converged mean-field ground state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeanFieldState {
    pub phi: Vec<f64>,
    /// `Σˣ_l = φ_l (ω_l + 4 D_l)`.
    pub sigma_x: Vec<f64>,
    pub e_g: f64,
    /// The minimizer sits within one grid step of `phi_max`.
    pub boundary_hit: bool,
    /// Other minima within [`DEGENERACY_TOLERANCE`] of the reported one.
    pub alternatives: Vec<Vec<f64>>,
}

impl MeanFieldState {
    pub fn degenerate(&self) -> bool {
        !self.alternatives.is_empty()
    }

    /// Largest `|φ_l|`.
    pub fn amplitude(&self) -> f64 {
        self.phi.iter().fold(0.0, |a: f64, p| a.max(p.abs()))
    }
}

/// `e_g(φ)`; the chain part comes from the even-sector vacuum.
pub fn energy_per_particle(chain: &ChainSpec, modes: &ModeSet, phi: &[f64]) -> Result<f64> {
    ensure_len("order-parameter vector", modes.len(), phi.len())?;
    let field = effective_field(chain, modes, phi)?;
    let chain_part = chain_energy(&field, chain.couplings())? / chain.n() as f64;
    let field_part: f64 = modes
        .modes()
        .iter()
        .zip(phi)
        .map(|(m, p)| m.stiffness() * p * p)
        .sum();
    Ok(field_part + chain_part)
}

/// `Σˣ_l = (1/N) Σ_j λ_l(j) ⟨σˣ_j⟩` measured in the chain ground state at `φ`,
/// independently of the stationarity relation.
pub fn measured_order_parameters(
    chain: &ChainSpec,
    modes: &ModeSet,
    phi: &[f64],
) -> Result<Vec<f64>> {
    let field = effective_field(chain, modes, phi)?;
    let solution = ground_sector(&field, chain.couplings(), SectorMode::Even)?;
    let contractions = pair_contractions(&solution);
    let sigma_x: Vec<f64> = (0..chain.n())
        .map(|j| field.theta[j].sin() * contractions.sigma_z(j))
        .collect();
    Ok(modes
        .modes()
        .iter()
        .map(|m| {
            m.coupling
                .iter()
                .zip(&sigma_x)
                .map(|(l, s)| l * s)
                .sum::<f64>()
                / chain.n() as f64
        })
        .collect())
}

/// Golden-section search for a minimum of `f` on `[lo, hi]`.
fn golden_min(
    mut f: impl FnMut(f64) -> Result<f64>,
    lo: f64,
    hi: f64,
    tol: f64,
) -> Result<(f64, f64)> {
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_GOLDEN * (b - a);
    let mut d = a + INV_GOLDEN * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    while b - a > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_GOLDEN * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_GOLDEN * (b - a);
            fd = f(d)?;
        }
    }
    Ok(if fc <= fd { (c, fc) } else { (d, fd) })
}

fn scan(chain: &ChainSpec, modes: &ModeSet, grid: &[f64]) -> Result<Vec<f64>> {
    grid.par_iter()
        .map(|&p| energy_per_particle(chain, modes, &[p]))
        .collect()
}

fn coarse_grid(search: &SearchGrid) -> Vec<f64> {
    let h = search.step();
    (0..search.points).map(|i| i as f64 * h).collect()
}

/// Global minimizer of `e_g` over the order parameters of every mode in `modes`.
pub fn minimize_phi(
    chain: &ChainSpec,
    modes: &ModeSet,
    search: &SearchGrid,
) -> Result<MeanFieldState> {
    search.validate()?;
    let state = if modes.len() == 1 {
        minimize_single(chain, modes, search)?
    } else {
        minimize_multi(chain, modes, search)?
    };
    if state.boundary_hit {
        log::warn!(
            "mean-field minimizer at the edge of the search range (phi = {:?}, phi_max = {}); increase phi_max",
            state.phi,
            search.phi_max
        );
    }
    Ok(state)
}

fn finish(
    modes: &ModeSet,
    phi: Vec<f64>,
    e_g: f64,
    boundary_hit: bool,
    alternatives: Vec<Vec<f64>>,
) -> MeanFieldState {
    let sigma_x = modes
        .modes()
        .iter()
        .zip(&phi)
        .map(|(m, p)| m.stiffness() * p)
        .collect();
    MeanFieldState {
        phi,
        sigma_x,
        e_g,
        boundary_hit,
        alternatives,
    }
}

fn minimize_single(
    chain: &ChainSpec,
    modes: &ModeSet,
    search: &SearchGrid,
) -> Result<MeanFieldState> {
    let grid = coarse_grid(search);
    let energies = scan(chain, modes, &grid)?;
    let last = grid.len() - 1;
    let mut candidates: Vec<(f64, f64)> = vec![(0.0, energies[0])];
    for i in 0..=last {
        // e_g is even, so the left neighbour of φ = 0 mirrors the right one.
        let left = if i == 0 { energies[1] } else { energies[i - 1] };
        let right = if i == last {
            f64::INFINITY
        } else {
            energies[i + 1]
        };
        if energies[i] > left || energies[i] > right {
            continue;
        }
        let lo = if i == 0 { 0.0 } else { grid[i - 1] };
        let hi = grid[(i + 1).min(last)];
        let (p, e) = golden_min(
            |p| energy_per_particle(chain, modes, &[p]),
            lo,
            hi,
            search.tol,
        )?;
        // A minimum in the last cell is kept even if higher, so the boundary
        // flag can see it.
        if (p > 2.0 * search.tol && e < energies[0]) || i == last {
            candidates.push((p, e));
        }
    }
    let (best, e_best) = candidates
        .iter()
        .copied()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("origin is always a candidate");
    let alternatives = candidates
        .iter()
        .filter(|(p, e)| {
            (p - best).abs() > 10.0 * search.tol && (e - e_best).abs() < DEGENERACY_TOLERANCE
        })
        .map(|(p, _)| vec![*p])
        .collect();
    let boundary_hit = best >= search.phi_max - search.step();
    Ok(finish(
        modes,
        vec![best],
        e_best,
        boundary_hit,
        alternatives,
    ))
}

fn minimize_multi(
    chain: &ChainSpec,
    modes: &ModeSet,
    search: &SearchGrid,
) -> Result<MeanFieldState> {
    let dims = modes.len();
    let m = search.multi_points;
    let axes: Vec<Vec<f64>> = (0..dims)
        .map(|d| {
            let lo = if d == 0 { 0.0 } else { -search.phi_max };
            let h = (search.phi_max - lo) / (m - 1) as f64;
            (0..m).map(|i| lo + i as f64 * h).collect()
        })
        .collect();
    let total = m.pow(dims as u32);
    let unravel = |mut flat: usize| -> Vec<usize> {
        let mut idx = vec![0; dims];
        for d in (0..dims).rev() {
            idx[d] = flat % m;
            flat /= m;
        }
        idx
    };
    let point =
        |idx: &[usize]| -> Vec<f64> { idx.iter().enumerate().map(|(d, &i)| axes[d][i]).collect() };
    let energies: Vec<f64> = (0..total)
        .into_par_iter()
        .map(|flat| energy_per_particle(chain, modes, &point(&unravel(flat))))
        .collect::<Result<_>>()?;

    // Seeds: grid points no higher than any axis neighbour.
    let mut seeds: Vec<(usize, f64)> = (0..total)
        .filter(|&flat| {
            let idx = unravel(flat);
            (0..dims).all(|d| {
                [-1isize, 1].iter().all(|&s| {
                    let k = idx[d] as isize + s;
                    if k < 0 || k >= m as isize {
                        return true;
                    }
                    let mut nb = idx.clone();
                    nb[d] = k as usize;
                    let nflat = nb.iter().fold(0, |acc, &i| acc * m + i);
                    energies[flat] <= energies[nflat]
                })
            })
        })
        .map(|flat| (flat, energies[flat]))
        .collect();
    seeds.sort_by(|a, b| a.1.total_cmp(&b.1));
    seeds.truncate(6);

    let steps: Vec<f64> = axes.iter().map(|a| a[1] - a[0]).collect();
    // The origin is stationary by symmetry but can be a saddle whose descent
    // direction mixes modes, invisible to one-mode-at-a-time moves.
    let mut results: Vec<(Vec<f64>, f64)> =
        vec![descend(chain, modes, vec![0.0; dims], &steps, search)?];
    for (flat, _) in seeds {
        let start = point(&unravel(flat));
        results.push(descend(chain, modes, start, &steps, search)?);
    }

    for (phi, e) in results.iter_mut() {
        canonical_sign(phi);
        let snapped: Vec<f64> = phi
            .iter()
            .map(|&p| {
                if p.abs() <= 10.0 * search.multi_tol * 0.1 {
                    0.0
                } else {
                    p
                }
            })
            .collect();
        if snapped != *phi {
            let es = energy_per_particle(chain, modes, &snapped)?;
            if es <= *e + 1e-13 {
                *phi = snapped;
                *e = es;
            }
        }
    }
    let (best, e_best) = results
        .iter()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .cloned()
        .expect("origin is always present");
    let mut alternatives: Vec<Vec<f64>> = Vec::new();
    for (phi, e) in &results {
        let far = phi
            .iter()
            .zip(&best)
            .any(|(a, b)| (a - b).abs() > 10.0 * search.multi_tol);
        let fresh = alternatives.iter().all(|q| {
            q.iter()
                .zip(phi)
                .any(|(a, b)| (a - b).abs() > 10.0 * search.multi_tol)
        });
        if far && fresh && (e - e_best).abs() < DEGENERACY_TOLERANCE {
            alternatives.push(phi.clone());
        }
    }
    let boundary_hit = best
        .iter()
        .zip(&steps)
        .any(|(p, h)| p.abs() >= search.phi_max - h);
    Ok(finish(modes, best, e_best, boundary_hit, alternatives))
}

/// Flip the global sign so the first clearly nonzero component is positive.
fn canonical_sign(phi: &mut [f64]) {
    if let Some(first) = phi.iter().copied().find(|p| p.abs() > 1e-12) {
        if first < 0.0 {
            phi.iter_mut().for_each(|p| *p = -*p);
        }
    }
}

/// Finite-difference step of [`hessian`].
const HESSIAN_STEP: f64 = 1e-3;
/// Curvatures below `-NEGATIVE_CURVATURE` trigger a line search.
const NEGATIVE_CURVATURE: f64 = 1e-7;

/// Coordinate descent, then a second-order check: along any direction of
/// negative curvature, line-search and polish with [`newton`].
fn descend(
    chain: &ChainSpec,
    modes: &ModeSet,
    start: Vec<f64>,
    steps: &[f64],
    search: &SearchGrid,
) -> Result<(Vec<f64>, f64)> {
    let (mut phi, mut e) = coordinate_descent(chain, modes, start, steps, search)?;
    for _ in 0..20 {
        let h = hessian(chain, modes, &phi, e)?;
        let eig = SymmetricEigen::new(h);
        let k = eig.eigenvalues.imin();
        if eig.eigenvalues[k] > -NEGATIVE_CURVATURE {
            break;
        }
        let dir: Vec<f64> = eig.eigenvectors.column(k).iter().copied().collect();
        log::debug!(
            "negative curvature {:.3e} at phi = {phi:?}, direction {dir:?}",
            eig.eigenvalues[k]
        );
        let (next, e_next) = line_search(chain, modes, &phi, e, &dir, search)?;
        if e_next >= e - 1e-13 {
            break;
        }
        (phi, e) = newton(chain, modes, next, e_next, search)?;
    }
    Ok((phi, e))
}

/// Finite-difference step of [`gradient`]; small enough that truncation stays
/// below the tolerance in flat valleys.
const GRADIENT_STEP: f64 = 1e-5;

fn gradient(chain: &ChainSpec, modes: &ModeSet, phi: &[f64]) -> Result<Vec<f64>> {
    (0..phi.len())
        .map(|d| {
            let mut p = phi.to_vec();
            p[d] = phi[d] + GRADIENT_STEP;
            let up = energy_per_particle(chain, modes, &p)?;
            p[d] = phi[d] - GRADIENT_STEP;
            let down = energy_per_particle(chain, modes, &p)?;
            Ok((up - down) / (2.0 * GRADIENT_STEP))
        })
        .collect()
}

/// Damped Newton with curvatures replaced by their magnitudes, so every step
/// goes downhill. Coordinate moves crawl along valleys that mix modes; this
/// does not.
fn newton(
    chain: &ChainSpec,
    modes: &ModeSet,
    mut phi: Vec<f64>,
    mut e: f64,
    search: &SearchGrid,
) -> Result<(Vec<f64>, f64)> {
    let floor = 1e-6;
    for _ in 0..200 {
        let g = gradient(chain, modes, &phi)?;
        let eig = SymmetricEigen::new(hessian(chain, modes, &phi, e)?);
        let mut step = vec![0.0; phi.len()];
        for (k, &lam) in eig.eigenvalues.iter().enumerate() {
            let v = eig.eigenvectors.column(k);
            let along: f64 = v.iter().zip(&g).map(|(a, b)| a * b).sum();
            let scale = along / lam.abs().max(floor);
            for (s, vi) in step.iter_mut().zip(v.iter()) {
                *s -= scale * vi;
            }
        }
        let mut alpha = 1.0;
        let mut accepted = None;
        while alpha > 1e-6 {
            let trial: Vec<f64> = phi
                .iter()
                .zip(&step)
                .map(|(p, s)| (p + alpha * s).clamp(-search.phi_max, search.phi_max))
                .collect();
            let et = energy_per_particle(chain, modes, &trial)?;
            if et < e {
                accepted = Some((trial, et));
                break;
            }
            alpha *= 0.5;
        }
        let Some((next, e_next)) = accepted else {
            break;
        };
        let moved = next
            .iter()
            .zip(&phi)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        phi = next;
        e = e_next;
        if moved < 0.1 * search.multi_tol {
            break;
        }
    }
    Ok((phi, e))
}

fn hessian(chain: &ChainSpec, modes: &ModeSet, phi: &[f64], e0: f64) -> Result<DMatrix<f64>> {
    let n = phi.len();
    let h = HESSIAN_STEP;
    let at = |shifts: &[(usize, f64)]| {
        let mut p = phi.to_vec();
        for &(d, s) in shifts {
            p[d] += s;
        }
        energy_per_particle(chain, modes, &p)
    };
    let mut m = DMatrix::zeros(n, n);
    for a in 0..n {
        m[(a, a)] = (at(&[(a, h)])? - 2.0 * e0 + at(&[(a, -h)])?) / (h * h);
        for b in 0..a {
            let v = (at(&[(a, h), (b, h)])? - at(&[(a, h), (b, -h)])? - at(&[(a, -h), (b, h)])?
                + at(&[(a, -h), (b, -h)])?)
                / (4.0 * h * h);
            m[(a, b)] = v;
            m[(b, a)] = v;
        }
    }
    Ok(m)
}

/// Best point on `phi + t·dir` inside the search box, scanning both signs of `t`.
fn line_search(
    chain: &ChainSpec,
    modes: &ModeSet,
    phi: &[f64],
    e0: f64,
    dir: &[f64],
    search: &SearchGrid,
) -> Result<(Vec<f64>, f64)> {
    let along = |t: f64| -> Vec<f64> { phi.iter().zip(dir).map(|(p, d)| p + t * d).collect() };
    let reach = |sign: f64| {
        phi.iter()
            .zip(dir)
            .filter(|(_, d)| d.abs() > 1e-12)
            .map(|(p, d)| ((sign * d).signum() * search.phi_max - p) / (sign * d))
            .fold(f64::INFINITY, f64::min)
    };
    let mut best = (phi.to_vec(), e0);
    for sign in [1.0, -1.0] {
        let t_max = reach(sign);
        if !(t_max > 0.0) {
            continue;
        }
        let ts: Vec<f64> = (0..=40).map(|i| sign * t_max * i as f64 / 40.0).collect();
        let es: Vec<f64> = ts
            .iter()
            .map(|&t| energy_per_particle(chain, modes, &along(t)))
            .collect::<Result<_>>()?;
        let i = (1..es.len())
            .min_by(|&a, &b| es[a].total_cmp(&es[b]))
            .unwrap_or(0);
        let (lo, hi) = (
            ts[i - 1].min(ts[(i + 1).min(40)]),
            ts[i - 1].max(ts[(i + 1).min(40)]),
        );
        let (t, e) = golden_min(
            |t| energy_per_particle(chain, modes, &along(t)),
            lo,
            hi,
            0.1 * search.multi_tol,
        )?;
        if e < best.1 {
            best = (along(t), e);
        }
    }
    Ok(best)
}

fn coordinate_descent(
    chain: &ChainSpec,
    modes: &ModeSet,
    mut phi: Vec<f64>,
    steps: &[f64],
    search: &SearchGrid,
) -> Result<(Vec<f64>, f64)> {
    let inner_tol = 0.1 * search.multi_tol;
    let mut e = energy_per_particle(chain, modes, &phi)?;
    let mut radius: Vec<f64> = steps.to_vec();
    for _sweep in 0..500 {
        let mut moved: f64 = 0.0;
        for d in 0..phi.len() {
            let mut centre = phi[d];
            for _ in 0..50 {
                let lo = (centre - radius[d]).max(-search.phi_max);
                let hi = (centre + radius[d]).min(search.phi_max);
                let mut trial = phi.clone();
                let (p, ep) = golden_min(
                    |x| {
                        trial[d] = x;
                        energy_per_particle(chain, modes, &trial)
                    },
                    lo,
                    hi,
                    inner_tol,
                )?;
                let at_edge = (p - lo) < 2.0 * inner_tol && lo > -search.phi_max
                    || (hi - p) < 2.0 * inner_tol && hi < search.phi_max;
                if ep <= e {
                    moved = moved.max((p - phi[d]).abs());
                    phi[d] = p;
                    e = ep;
                }
                if !at_edge {
                    break;
                }
                centre = p;
            }
            radius[d] = radius[d].min((4.0 * moved).max(20.0 * search.multi_tol));
        }
        if moved < search.multi_tol {
            break;
        }
    }
    Ok((phi, e))
}

/// Whether a stationary point is a minimum or a maximum of `e_g`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StationaryKind {
    Minimum,
    Maximum,
    Saddle,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StationaryPoint {
    pub phi: f64,
    pub e_g: f64,
    pub kind: StationaryKind,
    /// The lowest minimum.
    pub global: bool,
    /// `|Σˣ| = |φ| (ω + 4D)`.
    pub sigma_x: f64,
}

impl StationaryPoint {
    pub fn stable(&self) -> bool {
        self.kind == StationaryKind::Minimum
    }
}

/// Every local minimum and maximum of the one-mode landscape on `φ >= 0`.
///
/// `φ = 0` is always stationary by symmetry. A minimum at `φ > 0` stands for
/// the mirror pair `±φ`.
pub fn stationary_points(
    chain: &ChainSpec,
    modes: &ModeSet,
    search: &SearchGrid,
) -> Result<Vec<StationaryPoint>> {
    search.validate()?;
    if modes.len() != 1 {
        return Err(Error::InvalidParameter(format!(
            "stationary-point analysis is one-dimensional, got {} modes",
            modes.len()
        )));
    }
    let stiffness = modes.modes()[0].stiffness();
    let grid = coarse_grid(search);
    let e = scan(chain, modes, &grid)?;
    let last = grid.len() - 1;
    let mut points = Vec::new();
    let energy = |p: f64| energy_per_particle(chain, modes, &[p]);
    let mut origin_kind = if e[1] >= e[0] {
        StationaryKind::Minimum
    } else {
        StationaryKind::Maximum
    };
    if origin_kind == StationaryKind::Minimum {
        // A minimum closer to the origin than one grid step hides in the first cell.
        let (p, ep) = golden_min(energy, 0.0, grid[1], search.tol)?;
        if p > 2.0 * search.tol && ep < e[0] {
            origin_kind = StationaryKind::Maximum;
            points.push(StationaryPoint {
                phi: p,
                e_g: ep,
                kind: StationaryKind::Minimum,
                global: false,
                sigma_x: p * stiffness,
            });
        }
    }
    points.insert(
        0,
        StationaryPoint {
            phi: 0.0,
            e_g: e[0],
            kind: origin_kind,
            global: false,
            sigma_x: 0.0,
        },
    );
    for i in 1..last {
        let is_min = e[i - 1] > e[i] && e[i] <= e[i + 1];
        let is_max = e[i - 1] < e[i] && e[i] >= e[i + 1];
        if !(is_min || is_max) {
            continue;
        }
        let (p, ep) = if is_min {
            golden_min(energy, grid[i - 1], grid[i + 1], search.tol)?
        } else {
            let (p, neg) = golden_min(
                |p| energy(p).map(|v| -v),
                grid[i - 1],
                grid[i + 1],
                search.tol,
            )?;
            (p, -neg)
        };
        if p <= 2.0 * search.tol {
            continue;
        }
        let kind = if is_min {
            StationaryKind::Minimum
        } else {
            StationaryKind::Maximum
        };
        points.push(StationaryPoint {
            phi: p,
            e_g: ep,
            kind,
            global: false,
            sigma_x: p * stiffness,
        });
    }
    if let Some(best) = points
        .iter_mut()
        .filter(|s| s.kind == StationaryKind::Minimum)
        .min_by(|a, b| a.e_g.total_cmp(&b.e_g))
    {
        best.global = true;
    }
    Ok(points)
}

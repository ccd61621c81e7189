//! Ground-state spin expectations and `yy` correlators by Wick contraction.
//!
//! In the quasiparticle vacuum the only nonvanishing Majorana pairings are
//! `⟨C_i C_j⟩ = δ_ij`, `⟨D_i D_j⟩ = -δ_ij` and `G_ij = ⟨D_i C_j⟩ = -(ΨᵀΦ)_ij`.
//! The string `σ̄ʸ_j σ̄ʸ_{j+n} = D_j C_{j+1} D_{j+1} ⋯ D_{j+n-1} C_{j+n}`
//! contains no repeated `C` or `D`, so its Pfaffian collapses to an `n×n`
//! determinant of `G`.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_len, Error, Result};
use crate::fermion::QuasiparticleSolution;
use crate::model::EffectiveField;

/// `|ρ_{j,j+1}|` below this counts as no correlation at all.
pub const UNCORRELATED_THRESHOLD: f64 = 1e-12;

/// Pair contractions of one quasiparticle vacuum.
#[derive(Clone, Debug, PartialEq)]
pub struct Contractions {
    /// `G_ij = ⟨D_i C_j⟩`.
    pub g: DMatrix<f64>,
    /// Fermion parity of the state the contractions belong to.
    pub parity: f64,
}

impl Contractions {
    pub fn n(&self) -> usize {
        self.g.nrows()
    }

    /// `⟨σ̄ᶻ_j⟩ = -G_jj`.
    pub fn sigma_z(&self, j: usize) -> f64 {
        -self.g[(j, j)]
    }
}

pub fn pair_contractions(solution: &QuasiparticleSolution) -> Contractions {
    let g = -(solution.psi.transpose() * &solution.phi);
    Contractions {
        g,
        parity: solution.vacuum_parity,
    }
}

/// `ρ_{j,j+n} = ⟨σ̄ʸ_j σ̄ʸ_{j+n}⟩` with site indices taken modulo `N`.
///
/// The determinant runs over rows `j..j+n-1` and columns `j+1..j+n` of `G`.
/// A string that crosses the seam picks up the factor `-P`, `P` the state's
/// fermion parity.
pub fn yy_correlation(c: &Contractions, j: usize, n: usize) -> Result<f64> {
    let size = c.n();
    if j >= size {
        return Err(Error::Domain(format!("site {j} outside 0..{size}")));
    }
    if n == 0 || n >= size {
        return Err(Error::Domain(format!("separation {n} outside 1..{size}")));
    }
    let det = if n == 1 {
        c.g[(j, (j + 1) % size)]
    } else {
        DMatrix::from_fn(n, n, |a, b| c.g[((j + a) % size, (j + 1 + b) % size)])
            .lu()
            .determinant()
    };
    Ok(if j + n >= size { -c.parity * det } else { det })
}

/// How a correlation-length scan ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum XiStatus {
    /// `|ρ|` fell below `e⁻¹|ρ₁|` inside the scan window.
    Decayed,
    /// Never fell below the threshold; the length is the window size.
    Saturated,
    /// Nearest-neighbour correlation vanishes; the length is 0.
    Uncorrelated,
}

/// Distance at which `|ρ_n|` first drops to `e⁻¹|ρ_1|`, interpolating
/// `log|ρ|` linearly between the bracketing integers.
pub fn decay_length(
    mut rho: impl FnMut(usize) -> Result<f64>,
    n_max: usize,
) -> Result<(f64, XiStatus)> {
    let first = rho(1)?.abs();
    if first < UNCORRELATED_THRESHOLD {
        return Ok((0.0, XiStatus::Uncorrelated));
    }
    let target = first * (-1.0f64).exp();
    let mut prev = first;
    for n in 2..=n_max {
        let cur = rho(n)?.abs();
        if cur <= target {
            let frac = if cur > 0.0 {
                (prev.ln() - target.ln()) / (prev.ln() - cur.ln())
            } else {
                (prev - target) / (prev - cur)
            };
            return Ok(((n - 1) as f64 + frac, XiStatus::Decayed));
        }
        prev = cur;
    }
    Ok((n_max as f64, XiStatus::Saturated))
}

/// Right and left correlation lengths of one site.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SiteLengths {
    pub right: f64,
    pub left: f64,
    pub right_status: XiStatus,
    pub left_status: XiStatus,
}

impl SiteLengths {
    pub fn mean(&self) -> f64 {
        0.5 * (self.right + self.left)
    }
}

pub fn correlation_lengths(c: &Contractions, j: usize, n_max: usize) -> Result<SiteLengths> {
    let size = c.n();
    let n_max = n_max.min(size - 1).max(1);
    let (right, right_status) = decay_length(|n| yy_correlation(c, j, n), n_max)?;
    let (left, left_status) = decay_length(|n| yy_correlation(c, (j + size - n) % size, n), n_max)?;
    Ok(SiteLengths {
        right,
        left,
        right_status,
        left_status,
    })
}

/// Controls for [`correlation_report`].
#[derive(Default, Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportOptions {
    /// Scan window for the correlation lengths; `None` means `N/2`.
    pub xi_window: Option<usize>,
    /// Largest separation tabulated in `rho`; 0 disables the table.
    pub rho_max: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CorrelationReport {
    pub contractions: Contractions,
    pub sigma_z_rot: Vec<f64>,
    pub sigma_z_lab: Vec<f64>,
    pub sigma_x_lab: Vec<f64>,
    /// `(j, n, ρ_{j,j+n})` for `1 <= n <= rho_max`.
    pub rho: Vec<(usize, usize, f64)>,
    pub lengths: Vec<SiteLengths>,
}

impl CorrelationReport {
    pub fn xi_right(&self) -> Vec<f64> {
        self.lengths.iter().map(|l| l.right).collect()
    }

    pub fn xi_left(&self) -> Vec<f64> {
        self.lengths.iter().map(|l| l.left).collect()
    }

    pub fn xi_mean(&self) -> Vec<f64> {
        self.lengths.iter().map(SiteLengths::mean).collect()
    }
}

/// Spin expectations in both frames plus correlators and lengths for every site.
pub fn correlation_report(
    solution: &QuasiparticleSolution,
    field: &EffectiveField,
    options: ReportOptions,
) -> Result<CorrelationReport> {
    let n = solution.n();
    ensure_len("effective field", n, field.len())?;
    let contractions = pair_contractions(solution);
    let sigma_z_rot: Vec<f64> = (0..n).map(|j| contractions.sigma_z(j)).collect();
    // ⟨σ̄ˣ⟩ vanishes in a parity eigenstate, so the lab frame only sees σ̄ᶻ.
    let sigma_z_lab = (0..n)
        .map(|j| field.theta[j].cos() * sigma_z_rot[j])
        .collect();
    let sigma_x_lab = (0..n)
        .map(|j| field.theta[j].sin() * sigma_z_rot[j])
        .collect();

    let rho_max = options.rho_max.min(n - 1);
    let rho = (0..n)
        .into_par_iter()
        .map(|j| {
            (1..=rho_max)
                .map(|d| yy_correlation(&contractions, j, d).map(|v| (j, d, v)))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();

    let window = options.xi_window.unwrap_or(n / 2);
    let lengths = (0..n)
        .into_par_iter()
        .map(|j| correlation_lengths(&contractions, j, window))
        .collect::<Result<Vec<_>>>()?;

    Ok(CorrelationReport {
        contractions,
        sigma_z_rot,
        sigma_z_lab,
        sigma_x_lab,
        rho,
        lengths,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fermion::{ground_sector, SectorMode};
    use crate::oracle::{exact_expectations, exact_ground, DenseSpinProblem, ParityBlock};
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn flat(omega: Vec<f64>) -> EffectiveField {
        let n = omega.len();
        EffectiveField {
            omega,
            theta: vec![0.0; n],
        }
    }

    #[test]
    fn paramagnet_contractions() {
        let sol =
            ground_sector(&flat(vec![0.5, 0.3, 0.8, 0.4]), &[0.0; 4], SectorMode::Even).unwrap();
        let c = pair_contractions(&sol);
        assert!((&c.g + DMatrix::<f64>::identity(4, 4)).amax() < 1e-12);
        for j in 0..4 {
            assert_abs_diff_eq!(c.sigma_z(j), 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(yy_correlation(&c, j, 1).unwrap(), 0.0, epsilon = 1e-12);
            let lengths = correlation_lengths(&c, j, 2).unwrap();
            assert_eq!(lengths.right_status, XiStatus::Uncorrelated);
            assert_eq!(lengths.mean(), 0.0);
        }
    }

    #[test]
    fn contractions_are_orthogonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let omega: Vec<f64> = (0..9).map(|_| rng.gen_range(0.1..1.0)).collect();
        let j: Vec<f64> = (0..9).map(|_| rng.gen_range(0.0..1.0)).collect();
        let c = pair_contractions(&ground_sector(&flat(omega), &j, SectorMode::Even).unwrap());
        let gram = c.g.transpose() * &c.g;
        assert!((gram - DMatrix::<f64>::identity(9, 9)).amax() < 1e-9);
        for j in 0..9 {
            assert_eq!(
                yy_correlation(&c, j, 1).unwrap(),
                c.g[(j, (j + 1) % 9)] * if j == 8 { -1.0 } else { 1.0 }
            );
        }
    }

    #[test]
    fn separation_out_of_range() {
        let c = pair_contractions(
            &ground_sector(&flat(vec![0.5; 4]), &[0.1; 4], SectorMode::Even).unwrap(),
        );
        assert!(yy_correlation(&c, 0, 0).is_err());
        assert!(yy_correlation(&c, 0, 4).is_err());
        assert!(yy_correlation(&c, 4, 1).is_err());
    }

    #[test]
    fn matches_exact_diagonalization() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for n in [4usize, 5, 8] {
            for _ in 0..4 {
                let omega: Vec<f64> = (0..n).map(|_| rng.gen_range(0.1..1.0)).collect();
                let j: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
                let theta: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.2..1.2)).collect();
                let field = EffectiveField {
                    omega: omega.clone(),
                    theta: theta.clone(),
                };
                let sol = ground_sector(&field, &j, SectorMode::Even).unwrap();
                let report = correlation_report(
                    &sol,
                    &field,
                    ReportOptions {
                        xi_window: None,
                        rho_max: n - 1,
                    },
                )
                .unwrap();
                let problem = DenseSpinProblem::new(omega, j)
                    .unwrap()
                    .with_rotation(theta)
                    .unwrap();
                let ground = exact_ground(&problem, ParityBlock::Even).unwrap();
                let pairs: Vec<_> = report.rho.iter().map(|&(a, d, _)| (a, d)).collect();
                let exact = exact_expectations(&problem, &ground, &pairs).unwrap();
                for s in 0..n {
                    assert_abs_diff_eq!(
                        report.sigma_z_rot[s],
                        exact.sigma_z_rot[s],
                        epsilon = 1e-8
                    );
                    assert_abs_diff_eq!(
                        report.sigma_z_lab[s],
                        exact.sigma_z_lab[s],
                        epsilon = 1e-8
                    );
                    assert_abs_diff_eq!(
                        report.sigma_x_lab[s],
                        exact.sigma_x_lab[s],
                        epsilon = 1e-8
                    );
                }
                for (&(a, d, v), &(_, w)) in report.rho.iter().zip(&exact.yy) {
                    assert!((v - w).abs() < 1e-8, "n={n} j={a} d={d}: {v} vs {w}");
                }
            }
        }
    }

    #[test]
    fn deep_ferromagnet_is_long_range_ordered() {
        // J/Ω = 10 on a 10-site ring; compare against brute force as well.
        let n = 10;
        let sol = ground_sector(&flat(vec![0.1; n]), &vec![1.0; n], SectorMode::Even).unwrap();
        let c = pair_contractions(&sol);
        let problem = DenseSpinProblem::new(vec![0.1; n], vec![1.0; n]).unwrap();
        let ground = exact_ground(&problem, ParityBlock::Even).unwrap();
        let pairs: Vec<_> = (1..=5).map(|d| (0, d)).collect();
        let exact = exact_expectations(&problem, &ground, &pairs).unwrap();
        for (d, (_, w)) in (1..=5).zip(&exact.yy) {
            let v = yy_correlation(&c, 0, d).unwrap();
            assert!(v > 0.9);
            assert_abs_diff_eq!(v, *w, epsilon = 1e-8);
        }
        let lengths = correlation_lengths(&c, 3, 5).unwrap();
        assert_eq!(lengths.right_status, XiStatus::Saturated);
        assert_eq!(lengths.right, 5.0);
    }

    #[test]
    fn decay_length_interpolates_in_log() {
        // ρ_n = e^{-(n-1)/2.5}: crosses e⁻¹ρ₁ exactly at n = 3.5.
        let (xi, status) = decay_length(|n| Ok((-((n - 1) as f64) / 2.5).exp()), 10).unwrap();
        assert_eq!(status, XiStatus::Decayed);
        assert_abs_diff_eq!(xi, 3.5, epsilon = 1e-12);
        let (xi, status) = decay_length(|_| Ok(0.8), 6).unwrap();
        assert_eq!((xi, status), (6.0, XiStatus::Saturated));
        // Oscillating sign: magnitudes decide.
        let (xi, _) =
            decay_length(|n| Ok((-1f64).powi(n as i32) * 0.5f64.powi(n as i32)), 10).unwrap();
        assert!(xi > 2.0 && xi < 3.0);
    }

    #[test]
    fn homogeneous_chain_is_translation_invariant() {
        let n = 30;
        let sol = ground_sector(&flat(vec![0.4; n]), &vec![0.3; n], SectorMode::Even).unwrap();
        let report = correlation_report(
            &sol,
            &flat(vec![0.4; n]),
            ReportOptions {
                xi_window: None,
                rho_max: 4,
            },
        )
        .unwrap();
        for j in 1..n {
            assert_abs_diff_eq!(report.sigma_z_rot[j], report.sigma_z_rot[0], epsilon = 1e-9);
            assert_abs_diff_eq!(
                report.lengths[j].right,
                report.lengths[0].right,
                epsilon = 1e-9
            );
            assert_abs_diff_eq!(
                report.lengths[j].left,
                report.lengths[0].left,
                epsilon = 1e-9
            );
        }
        for &(j, d, v) in &report.rho {
            let reference = report.rho[d - 1].2;
            assert!((v - reference).abs() < 1e-9, "j={j} d={d}");
        }
    }
}

//! Free-fermion solution of the inhomogeneous transverse-field Ising ring.
//!
//! After the Jordan-Wigner map the rotated-frame chain
//! `H = -Σ Ω(j) σ̄ᶻ_j - Σ J(j) σ̄ʸ_j σ̄ʸ_{j+1}` is quadratic in the fermions
//! `c_j`. With `C_j = c†_j + c_j` and `D_j = c†_j - c_j` it reads
//! `H = Σ_ij D_i K_ij C_j` where `K = A - B` is upper bidiagonal plus one seam
//! entry. A singular value decomposition `K = Ψᵀ diag(Λ/2) Φ` then gives
//! `H = Σ_k Λ_k (η†_k η_k - 1/2)`.
//!
//! The seam bond picks up the fermion parity: in the even-parity sector it
//! enters with the opposite sign to the interior bonds (antiperiodic fermions),
//! in the odd sector with the same sign.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_len, Error, Result};
use crate::linalg::{cyclic_bidiagonal_singular_values, spectral_norm_symmetric, symmetric_eigen};
use crate::model::EffectiveField;

/// Relative threshold below which a quasiparticle energy is a zero mode.
pub const ZERO_MODE_THRESHOLD: f64 = 1e-8;

/// Most negative eigenvalue of the squared spectrum tolerated before clamping.
const NEGATIVE_SPECTRUM_TOLERANCE: f64 = 1e-12;

/// Fermion-parity sector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sector {
    /// Even fermion number, antiperiodic boundary condition.
    Even,
    /// Odd fermion number, periodic boundary condition.
    Odd,
}

impl Sector {
    /// Value of `e^{iπ𝒩}` in this sector.
    pub fn parity(self) -> f64 {
        match self {
            Sector::Even => 1.0,
            Sector::Odd => -1.0,
        }
    }

    /// Factor multiplying the seam bond relative to the interior pattern.
    pub fn seam_sign(self) -> f64 {
        -self.parity()
    }
}

/// `H = Σ c†_i A_ij c_j + Σ (c†_i B_ij c†_j + c_i B_ij c_j)` up to a constant.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadraticForm {
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
    pub sector: Sector,
}

impl QuadraticForm {
    pub fn n(&self) -> usize {
        self.a.nrows()
    }

    /// `K = A - B`, the kernel of `H = Σ D_i K_ij C_j`.
    pub fn kernel(&self) -> DMatrix<f64> {
        &self.a - &self.b
    }
}

pub fn build_quadratic_form(
    field: &EffectiveField,
    couplings: &[f64],
    sector: Sector,
) -> Result<QuadraticForm> {
    let n = field.len();
    ensure_len("Ising couplings", n, couplings.len())?;
    ensure_len("rotation angles", n, field.theta.len())?;
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "need at least 2 sites, got {n}"
        )));
    }
    let mut a = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(&field.omega));
    let mut b = DMatrix::zeros(n, n);
    for (j, &c) in couplings.iter().enumerate() {
        let (p, q, sign) = if j + 1 < n {
            (j, j + 1, 1.0)
        } else {
            (n - 1, 0, sector.seam_sign())
        };
        let half = sign * c / 2.0;
        a[(p, q)] -= half;
        a[(q, p)] -= half;
        b[(p, q)] += half;
        b[(q, p)] -= half;
    }
    Ok(QuadraticForm { a, b, sector })
}

/// Quasiparticle spectrum and Bogoliubov coefficients for one sector.
///
/// Rows of `phi` and `psi` are indexed by quasiparticle `k`:
/// `C_j = Σ_k Φ_kj (η†_k + η_k)` and `D_j = Σ_k Ψ_kj (η†_k - η_k)`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuasiparticleSolution {
    /// Quasiparticle energies, ascending, all `>= 0`.
    pub lambda: Vec<f64>,
    pub phi: DMatrix<f64>,
    pub psi: DMatrix<f64>,
    pub sector: Sector,
    /// `-½ Σ_k Λ_k`: energy of the quasiparticle vacuum.
    pub ground_energy_chain: f64,
    /// Fermion parity `Π_j σ̄ᶻ_j` of the quasiparticle vacuum, `±1`.
    pub vacuum_parity: f64,
    /// Number of quasiparticles treated as zero modes.
    pub zero_modes: usize,
}

impl QuasiparticleSolution {
    pub fn n(&self) -> usize {
        self.lambda.len()
    }

    /// Whether the vacuum has the parity this sector describes.
    pub fn parity_consistent(&self) -> bool {
        self.vacuum_parity == self.sector.parity()
    }

    /// Lowest energy of a state that really belongs to this sector: the
    /// vacuum, or the vacuum plus the softest quasiparticle when the vacuum
    /// has the wrong parity.
    pub fn physical_energy(&self) -> f64 {
        if self.parity_consistent() {
            self.ground_energy_chain
        } else {
            self.ground_energy_chain + self.lambda[0]
        }
    }
}

pub fn solve_quasiparticles(form: &QuadraticForm) -> Result<QuasiparticleSolution> {
    let n = form.n();
    let kernel = form.kernel();
    // KᵀK = (A+B)(A-B); its eigenvectors are the Φ rows.
    let mut gram = kernel.transpose() * &kernel;
    gram = (&gram + gram.transpose()) * 0.5;
    let (values, vectors) = symmetric_eigen(gram)?;
    let scale = values[n - 1].abs().max(1.0);
    if values[0] < -NEGATIVE_SPECTRUM_TOLERANCE * scale {
        return Err(Error::Solver(format!(
            "squared quasiparticle spectrum has negative eigenvalue {:e}",
            values[0]
        )));
    }
    let half: Vec<f64> = values.iter().map(|v| v.max(0.0).sqrt()).collect();

    let mut phi = vectors.transpose();
    for k in 0..n {
        let mut row = phi.row_mut(k);
        if let Some(first) = row.iter().copied().find(|x| x.abs() > 1e-9) {
            if first < 0.0 {
                row.neg_mut();
            }
        }
    }

    let norm_a = spectral_norm_symmetric(&form.a)?;
    let cutoff = ZERO_MODE_THRESHOLD * norm_a.max(f64::MIN_POSITIVE);
    let mut psi = DMatrix::zeros(n, n);
    let mut accepted: Vec<usize> = Vec::with_capacity(n);
    let mut zero_modes = Vec::new();
    // Largest gaps first: their Ψ rows are the best conditioned and anchor
    // the orthonormalization of the rest.
    for k in (0..n).rev() {
        if half[k] < cutoff {
            zero_modes.push(k);
            continue;
        }
        let mut row = (&kernel * phi.row(k).transpose()).transpose() / half[k];
        orthogonalize(&mut row, &psi, &accepted);
        row /= row.norm();
        psi.set_row(k, &row);
        accepted.push(k);
    }
    for &k in &zero_modes {
        let candidates = std::iter::once(phi.row(k).into_owned()).chain((0..n).map(|i| {
            let mut e = nalgebra::RowDVector::zeros(n);
            e[i] = 1.0;
            e
        }));
        let mut placed = false;
        for mut row in candidates {
            orthogonalize(&mut row, &psi, &accepted);
            let norm = row.norm();
            if norm > 1e-3 {
                row /= norm;
                psi.set_row(k, &row);
                accepted.push(k);
                placed = true;
                break;
            }
        }
        if !placed {
            return Err(Error::Solver("could not complete zero-mode basis".into()));
        }
    }

    let vacuum_parity = (phi.clone().lu().determinant() * psi.clone().lu().determinant()).signum();
    let lambda: Vec<f64> = half.iter().map(|h| 2.0 * h).collect();
    let ground_energy_chain = -half.iter().sum::<f64>();
    Ok(QuasiparticleSolution {
        lambda,
        phi,
        psi,
        sector: form.sector,
        ground_energy_chain,
        vacuum_parity,
        zero_modes: zero_modes.len(),
    })
}

fn orthogonalize(row: &mut nalgebra::RowDVector<f64>, basis: &DMatrix<f64>, rows: &[usize]) {
    for _ in 0..2 {
        for &r in rows {
            let b = basis.row(r);
            let overlap = row.dot(&b);
            *row -= b * overlap;
        }
    }
}

/// How [`ground_sector`] treats the two parity sectors.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SectorMode {
    /// Antiperiodic sector only.
    #[default]
    Even,
    /// Solve both sectors, return the one with the lower physical energy.
    Both,
}

pub fn ground_sector(
    field: &EffectiveField,
    couplings: &[f64],
    mode: SectorMode,
) -> Result<QuasiparticleSolution> {
    let even = solve_quasiparticles(&build_quadratic_form(field, couplings, Sector::Even)?)?;
    match mode {
        SectorMode::Even => Ok(even),
        SectorMode::Both => {
            let odd = solve_quasiparticles(&build_quadratic_form(field, couplings, Sector::Odd)?)?;
            if odd.physical_energy() < even.physical_energy() {
                Ok(odd)
            } else {
                Ok(even)
            }
        }
    }
}

/// Quasiparticle energies of one sector without the coefficient matrices.
///
/// `K = A - B` is cyclic upper bidiagonal (`Ω` on the diagonal, `-J` above it,
/// the seam bond in the corner) and `Λ = 2σ(K)`. Taking singular values
/// directly keeps full absolute accuracy on the nearly-zero modes that
/// localize at strong-bond domain walls; eigenvalues of `KᵀK` would lose
/// them to the square root.
pub fn spectrum(field: &EffectiveField, couplings: &[f64], sector: Sector) -> Result<Vec<f64>> {
    let n = field.len();
    ensure_len("Ising couplings", n, couplings.len())?;
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "need at least 2 sites, got {n}"
        )));
    }
    let upper: Vec<f64> = couplings[..n - 1].iter().map(|j| -j).collect();
    let corner = -sector.seam_sign() * couplings[n - 1];
    let sigma = cyclic_bidiagonal_singular_values(&field.omega, &upper, corner)?;
    Ok(sigma.iter().map(|s| 2.0 * s).collect())
}

/// Even-sector vacuum energy `-½ Σ_k Λ_k` via the structured solver.
pub fn chain_energy(field: &EffectiveField, couplings: &[f64]) -> Result<f64> {
    Ok(-0.5
        * spectrum(field, couplings, Sector::Even)?
            .iter()
            .sum::<f64>())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{exact_ground, DenseSpinProblem, ParityBlock};
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn field(omega: Vec<f64>) -> EffectiveField {
        let n = omega.len();
        EffectiveField {
            omega,
            theta: vec![0.0; n],
        }
    }

    fn random_instance(rng: &mut ChaCha8Rng, n: usize) -> (Vec<f64>, Vec<f64>) {
        let omega = (0..n).map(|_| rng.gen_range(0.1..1.0)).collect();
        let j = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
        (omega, j)
    }

    #[test]
    fn decoupled_pair_form() {
        let f = build_quadratic_form(&field(vec![1.0, 1.0]), &[0.0, 0.0], Sector::Even).unwrap();
        assert_eq!(f.a, DMatrix::identity(2, 2));
        assert_eq!(f.b, DMatrix::zeros(2, 2));
    }

    #[test]
    fn seam_sign_flips_in_even_sector() {
        let f = build_quadratic_form(&field(vec![0.4; 4]), &[0.05; 4], Sector::Even).unwrap();
        assert_eq!(f.a[(0, 1)], -0.025);
        assert_eq!(f.a[(1, 2)], -0.025);
        assert_eq!(f.b[(0, 1)], 0.025);
        assert_eq!(f.a[(3, 0)], 0.025);
        assert_eq!(f.a[(0, 3)], 0.025);
        assert_eq!(f.b[(3, 0)], -0.025);
        assert_eq!(f.b[(0, 3)], 0.025);
        let odd = build_quadratic_form(&field(vec![0.4; 4]), &[0.05; 4], Sector::Odd).unwrap();
        assert_eq!(odd.a[(3, 0)], -0.025);
        assert_eq!(odd.b[(3, 0)], 0.025);
    }

    #[test]
    fn form_symmetry_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in [2, 3, 7] {
            let (omega, j) = random_instance(&mut rng, n);
            for sector in [Sector::Even, Sector::Odd] {
                let f = build_quadratic_form(&field(omega.clone()), &j, sector).unwrap();
                assert_eq!(f.a, f.a.transpose());
                assert_eq!(f.b, -f.b.transpose());
            }
        }
    }

    #[test]
    fn form_rejects_length_mismatch() {
        assert!(matches!(
            build_quadratic_form(&field(vec![1.0; 3]), &[0.0; 2], Sector::Even),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn decoupled_spins_have_gaps_two_omega() {
        let sol = ground_sector(&field(vec![1.0, 1.0]), &[0.0, 0.0], SectorMode::Even).unwrap();
        assert_eq!(sol.lambda, vec![2.0, 2.0]);
        assert_abs_diff_eq!(sol.ground_energy_chain, -2.0, epsilon = 1e-15);

        let omega = vec![0.3, 0.9, 0.5, 0.2, 0.7];
        let sol = ground_sector(&field(omega.clone()), &[0.0; 5], SectorMode::Even).unwrap();
        let mut expected: Vec<f64> = omega.iter().map(|o| 2.0 * o).collect();
        expected.sort_by(f64::total_cmp);
        for (a, b) in sol.lambda.iter().zip(&expected) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-14);
        }
        assert_abs_diff_eq!(
            sol.ground_energy_chain,
            -omega.iter().sum::<f64>(),
            epsilon = 1e-14
        );
    }

    #[test]
    fn homogeneous_dispersion() {
        // Antiperiodic momenta k = (2m+1)π/N, Λ(k) = 2√(Ω² + J² - 2ΩJ cos k).
        let (n, omega, j) = (24, 0.4, 0.3);
        let sol = ground_sector(&field(vec![omega; n]), &vec![j; n], SectorMode::Even).unwrap();
        let mut exact: Vec<f64> = (0..n)
            .map(|m| {
                let k = (2 * m + 1) as f64 * PI / n as f64;
                2.0 * (omega * omega + j * j - 2.0 * omega * j * k.cos()).sqrt()
            })
            .collect();
        exact.sort_by(f64::total_cmp);
        for (a, b) in sol.lambda.iter().zip(&exact) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-12);
        }
    }

    #[test]
    fn quasiparticle_invariants() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in [2, 5, 8, 13] {
            let (omega, j) = random_instance(&mut rng, n);
            for sector in [Sector::Even, Sector::Odd] {
                let form = build_quadratic_form(&field(omega.clone()), &j, sector).unwrap();
                let sol = solve_quasiparticles(&form).unwrap();
                let apb = &form.a + &form.b;
                let amb = &form.a - &form.b;
                let norm_a = spectral_norm_symmetric(&form.a).unwrap();
                assert!(sol.lambda.windows(2).all(|w| w[0] <= w[1]));
                assert!(sol.lambda.iter().all(|&l| l >= 0.0));
                let id = DMatrix::<f64>::identity(n, n);
                assert!((&sol.phi * sol.phi.transpose() - &id).amax() < 1e-10);
                assert!((&sol.psi * sol.psi.transpose() - &id).amax() < 1e-10);
                for k in 0..n {
                    let half = sol.lambda[k] / 2.0;
                    let phi_k = sol.phi.row(k);
                    let psi_k = sol.psi.row(k);
                    let r1 = phi_k * &apb * &amb - phi_k * (half * half);
                    let r2 = psi_k * &amb * &apb - psi_k * (half * half);
                    assert!(r1.amax() <= 1e-9 * norm_a, "phi residual {}", r1.amax());
                    assert!(r2.amax() <= 1e-9 * norm_a, "psi residual {}", r2.amax());
                    let r3 = phi_k * &apb - psi_k * half;
                    assert!(r3.amax() <= 1e-9, "link residual {}", r3.amax());
                }
            }
        }
    }

    #[test]
    fn sectors_agree_without_seam_bond() {
        let omega = vec![0.3, 0.8, 0.5, 0.6];
        let j = vec![0.0; 4];
        let e = spectrum(&field(omega.clone()), &j, Sector::Even).unwrap();
        let o = spectrum(&field(omega), &j, Sector::Odd).unwrap();
        assert_eq!(e, o);
    }

    #[test]
    fn structured_spectrum_matches_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for n in [2, 3, 4, 9, 40] {
            let (omega, j) = random_instance(&mut rng, n);
            for sector in [Sector::Even, Sector::Odd] {
                let fast = spectrum(&field(omega.clone()), &j, sector).unwrap();
                let form = build_quadratic_form(&field(omega.clone()), &j, sector).unwrap();
                let dense = solve_quasiparticles(&form).unwrap();
                for (a, b) in fast.iter().zip(&dense.lambda) {
                    assert_abs_diff_eq!(a, b, epsilon = 1e-11);
                }
            }
        }
    }

    #[test]
    fn even_vacuum_matches_exact_ground_energy() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for n in 2..=9 {
            for _ in 0..3 {
                let (omega, j) = random_instance(&mut rng, n);
                let sol = ground_sector(&field(omega.clone()), &j, SectorMode::Even).unwrap();
                assert_eq!(sol.vacuum_parity, 1.0);
                let exact =
                    exact_ground(&DenseSpinProblem::new(omega, j).unwrap(), ParityBlock::Full)
                        .unwrap();
                let rel = (sol.ground_energy_chain - exact.energy).abs() / exact.energy.abs();
                assert!(
                    rel < 1e-9,
                    "n={n}: {} vs {}",
                    sol.ground_energy_chain,
                    exact.energy
                );
            }
        }
    }

    #[test]
    fn both_sectors_match_parity_blocks() {
        // Mixed-sign couplings put the ground state in either parity block;
        // each sector's physical energy must equal its block's exact ground.
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for n in [3, 4, 6, 8] {
            for _ in 0..4 {
                let omega: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..1.0)).collect();
                let j: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.5..1.5)).collect();
                let problem = DenseSpinProblem::new(omega.clone(), j.clone()).unwrap();
                for (sector, block) in [
                    (Sector::Even, ParityBlock::Even),
                    (Sector::Odd, ParityBlock::Odd),
                ] {
                    let form = build_quadratic_form(&field(omega.clone()), &j, sector).unwrap();
                    let sol = solve_quasiparticles(&form).unwrap();
                    let exact = exact_ground(&problem, block).unwrap().energy;
                    assert_abs_diff_eq!(sol.physical_energy(), exact, epsilon = 1e-10);
                }
                let best = ground_sector(&field(omega.clone()), &j, SectorMode::Both).unwrap();
                let full = exact_ground(&problem, ParityBlock::Full).unwrap().energy;
                assert_abs_diff_eq!(best.physical_energy(), full, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn both_sector_mode_never_worse_than_odd() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let (omega, j) = random_instance(&mut rng, 8);
        let best = ground_sector(&field(omega.clone()), &j, SectorMode::Both).unwrap();
        let odd =
            solve_quasiparticles(&build_quadratic_form(&field(omega), &j, Sector::Odd).unwrap())
                .unwrap();
        assert!(best.physical_energy() <= odd.physical_energy());
    }

    #[test]
    fn gap_closes_at_critical_coupling() {
        let n = 200;
        let omega = 0.4;
        let step = 0.005;
        let js: Vec<f64> = (0..=80).map(|i| 0.2 + step * i as f64).collect();
        let gaps: Vec<f64> = js
            .iter()
            .map(|&j| spectrum(&field(vec![omega; n]), &vec![j; n], Sector::Even).unwrap()[0])
            .collect();
        let (imin, _) = gaps
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .unwrap();
        assert!((js[imin] - omega).abs() <= step + 1e-12);
    }
}

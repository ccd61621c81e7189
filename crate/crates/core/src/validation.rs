//! Seeded comparison of the free-fermion solution against exact diagonalization.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::correlation::{pair_contractions, yy_correlation};
use crate::error::{Error, Result};
use crate::fermion::{ground_sector, SectorMode};
use crate::model::EffectiveField;
use crate::oracle::{exact_expectations, exact_ground, DenseSpinProblem, ParityBlock, MAX_SITES};

pub const ENERGY_TOLERANCE: f64 = 1e-9;
pub const EXPECTATION_TOLERANCE: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ValidationOptions {
    #[serde(rename = "N")]
    pub n: usize,
    pub instances: usize,
    pub seed: u64,
    pub omega_range: (f64, f64),
    pub j_range: (f64, f64),
    /// Largest separation `n` compared for `ρ_{j,j+n}`.
    pub rho_max: usize,
}

impl Default for ValidationOptions {
    fn default() -> Self {
        ValidationOptions {
            n: 8,
            instances: 20,
            seed: 20_240_601,
            omega_range: (0.1, 1.0),
            j_range: (0.0, 1.0),
            rho_max: 4,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceReport {
    pub omega: Vec<f64>,
    pub couplings: Vec<f64>,
    pub energy_fermion: f64,
    pub energy_exact: f64,
    /// `|ΔE| / |E_exact|`.
    pub energy_deviation: f64,
    pub sigma_z_deviation: f64,
    pub rho_deviation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub options: ValidationOptions,
    pub instances: Vec<InstanceReport>,
    pub max_energy_deviation: f64,
    pub max_sigma_z_deviation: f64,
    pub max_rho_deviation: f64,
    pub energy_tolerance: f64,
    pub expectation_tolerance: f64,
    pub passed: bool,
}

fn sample(rng: &mut ChaCha8Rng, (lo, hi): (f64, f64), n: usize) -> Vec<f64> {
    (0..n)
        .map(|_| if hi > lo { rng.gen_range(lo..hi) } else { lo })
        .collect()
}

/// Compare one chain against the oracle's even-parity ground state.
pub fn compare_instance(
    omega: &[f64],
    couplings: &[f64],
    rho_max: usize,
) -> Result<InstanceReport> {
    let n = omega.len();
    let field = EffectiveField {
        omega: omega.to_vec(),
        theta: vec![0.0; n],
    };
    let solution = ground_sector(&field, couplings, SectorMode::Even)?;
    let contractions = pair_contractions(&solution);

    let problem = DenseSpinProblem::new(omega.to_vec(), couplings.to_vec())?;
    let ground = exact_ground(&problem, ParityBlock::Even)?;
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|j| (1..=rho_max).map(move |d| (j, d)))
        .collect();
    let exact = exact_expectations(&problem, &ground, &pairs)?;

    let energy_fermion = solution.physical_energy();
    let energy_deviation =
        (energy_fermion - ground.energy).abs() / ground.energy.abs().max(f64::MIN_POSITIVE);
    let sigma_z_deviation = (0..n)
        .map(|j| (contractions.sigma_z(j) - exact.sigma_z_rot[j]).abs())
        .fold(0.0, f64::max);
    let mut rho_deviation: f64 = 0.0;
    for &((j, d), value) in &exact.yy {
        rho_deviation = rho_deviation.max((yy_correlation(&contractions, j, d)? - value).abs());
    }
    Ok(InstanceReport {
        omega: omega.to_vec(),
        couplings: couplings.to_vec(),
        energy_fermion,
        energy_exact: ground.energy,
        energy_deviation,
        sigma_z_deviation,
        rho_deviation,
    })
}

/// Draw `instances` random chains with `Ω(j)` and `J(j)` uniform in the given
/// ranges and report the largest deviations from exact diagonalization.
pub fn validate_random_instances(options: &ValidationOptions) -> Result<ValidationReport> {
    if options.n < 2 || options.n > MAX_SITES {
        return Err(Error::InvalidParameter(format!(
            "validation needs 2 <= N <= {MAX_SITES}, got {}",
            options.n
        )));
    }
    if options.rho_max >= options.n {
        return Err(Error::InvalidParameter(format!(
            "rho_max {} must be below N = {}",
            options.rho_max, options.n
        )));
    }
    if !(options.omega_range.0 > 0.0 && options.omega_range.1 >= options.omega_range.0) {
        return Err(Error::InvalidParameter(format!(
            "omega_range {:?}",
            options.omega_range
        )));
    }
    if !(options.j_range.0 >= 0.0 && options.j_range.1 >= options.j_range.0) {
        return Err(Error::InvalidParameter(format!(
            "j_range {:?}",
            options.j_range
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let mut instances = Vec::with_capacity(options.instances);
    for _ in 0..options.instances {
        let omega = sample(&mut rng, options.omega_range, options.n);
        let couplings = sample(&mut rng, options.j_range, options.n);
        instances.push(compare_instance(&omega, &couplings, options.rho_max)?);
    }
    let max = |f: fn(&InstanceReport) -> f64| instances.iter().map(f).fold(0.0, f64::max);
    let max_energy_deviation = max(|r| r.energy_deviation);
    let max_sigma_z_deviation = max(|r| r.sigma_z_deviation);
    let max_rho_deviation = max(|r| r.rho_deviation);
    let passed = max_energy_deviation <= ENERGY_TOLERANCE
        && max_sigma_z_deviation <= EXPECTATION_TOLERANCE
        && max_rho_deviation <= EXPECTATION_TOLERANCE;
    Ok(ValidationReport {
        options: *options,
        instances,
        max_energy_deviation,
        max_sigma_z_deviation,
        max_rho_deviation,
        energy_tolerance: ENERGY_TOLERANCE,
        expectation_tolerance: EXPECTATION_TOLERANCE,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suite_passes_and_is_reproducible() {
        let opts = ValidationOptions {
            n: 6,
            instances: 4,
            seed: 3,
            rho_max: 3,
            ..ValidationOptions::default()
        };
        let a = validate_random_instances(&opts).unwrap();
        assert!(a.passed, "{a:?}");
        assert_eq!(a.instances.len(), 4);
        let b = validate_random_instances(&opts).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_out_of_range_options() {
        let bad = |o: ValidationOptions| validate_random_instances(&o).is_err();
        assert!(bad(ValidationOptions {
            n: 15,
            ..ValidationOptions::default()
        }));
        assert!(bad(ValidationOptions {
            rho_max: 8,
            ..ValidationOptions::default()
        }));
        assert!(bad(ValidationOptions {
            omega_range: (0.0, 1.0),
            ..ValidationOptions::default()
        }));
    }
}

//! Parameterization of the qubit chain and the resonator modes.
//!
//! All energies are measured in units of the fundamental resonator frequency
//! ω₁, so mode `l` has frequency `l`. Sites are indexed `0..N` and the chain is
//! closed: the bond `J(N-1)` joins site `N-1` to site `0`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{ensure_len, Error, Result};

/// Position dependence of the nearest-neighbour Ising strength `J(j)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum IsingProfile {
    Uniform {
        #[serde(rename = "J")]
        j: f64,
    },
    /// `period` equal windows of strength `j_max` on a `j_min` background.
    ///
    /// Window `m` covers sites `floor((4m+1)N/4p) ..= floor((4m+3)N/4p)`, i.e.
    /// it has width `N/2p` and is centred on a node of `cos(pπj/N)`. Period 2
    /// gives the windows `[N/8, 3N/8]` and `[5N/8, 7N/8]`; period 3 gives
    /// `[N/12, 3N/12]`, `[5N/12, 7N/12]` and `[9N/12, 11N/12]`.
    Rectangular {
        #[serde(rename = "J_max")]
        j_max: f64,
        #[serde(rename = "J_min")]
        j_min: f64,
        period: usize,
    },
    Explicit {
        values: Vec<f64>,
    },
}

impl IsingProfile {
    /// Rectangular profile that favours mode `l = period`.
    pub fn rectangular(j_max: f64, j_min: f64, period: usize) -> Self {
        IsingProfile::Rectangular {
            j_max,
            j_min,
            period,
        }
    }

    /// Evaluate `J(j)` for every site of an `n`-site chain.
    pub fn couplings(&self, n: usize) -> Result<Vec<f64>> {
        let values = match self {
            IsingProfile::Uniform { j } => vec![*j; n],
            IsingProfile::Rectangular {
                j_max,
                j_min,
                period,
            } => {
                if *period == 0 {
                    return Err(Error::InvalidParameter(
                        "rectangular profile needs period >= 1".into(),
                    ));
                }
                let mut values = vec![*j_min; n];
                for (lo, hi) in rectangular_windows(n, *period) {
                    for v in &mut values[lo..=hi.min(n - 1)] {
                        *v = *j_max;
                    }
                }
                values
            }
            IsingProfile::Explicit { values } => {
                ensure_len("explicit Ising profile", n, values.len())?;
                values.clone()
            }
        };
        if let Some(bad) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "Ising coupling J({bad}) is not finite"
            )));
        }
        Ok(values)
    }
}

/// Inclusive site ranges carrying `J_max` in a rectangular profile.
pub fn rectangular_windows(n: usize, period: usize) -> Vec<(usize, usize)> {
    (0..period)
        .map(|m| {
            let lo = (4 * m + 1) * n / (4 * period);
            let hi = (4 * m + 3) * n / (4 * period);
            (lo, hi)
        })
        .collect()
}

/// Classical description of the qubit chain.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainSpec {
    n: usize,
    e_z: f64,
    e_c: f64,
    ising: IsingProfile,
    couplings: Vec<f64>,
}

impl ChainSpec {
    pub fn new(n: usize, e_z: f64, e_c: f64, ising: IsingProfile) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter(format!("need N >= 2, got {n}")));
        }
        if !(e_z > 0.0 && e_z.is_finite()) {
            return Err(Error::InvalidParameter(format!("need E_z > 0, got {e_z}")));
        }
        if !(e_c > 0.0 && e_c.is_finite()) {
            return Err(Error::InvalidParameter(format!("need E_c > 0, got {e_c}")));
        }
        let couplings = ising.couplings(n)?;
        Ok(ChainSpec {
            n,
            e_z,
            e_c,
            ising,
            couplings,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn e_z(&self) -> f64 {
        self.e_z
    }

    pub fn e_c(&self) -> f64 {
        self.e_c
    }

    pub fn ising(&self) -> &IsingProfile {
        &self.ising
    }

    /// `J(j)` for `j = 0..N`; entry `N-1` is the seam bond.
    pub fn couplings(&self) -> &[f64] {
        &self.couplings
    }
}

/// Everything needed to build a [`ChainSpec`] and [`ModeSet`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SystemParams {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "E_z")]
    pub e_z: f64,
    #[serde(rename = "E_c")]
    pub e_c: f64,
    pub ising: IsingProfile,
    /// Active resonator modes.
    pub modes: Vec<usize>,
    pub lambda0: f64,
}

impl Default for SystemParams {
    fn default() -> Self {
        SystemParams {
            n: 200,
            e_z: 0.8,
            e_c: 8.0,
            ising: IsingProfile::Uniform { j: 0.05 },
            modes: vec![1],
            lambda0: 0.0,
        }
    }
}

impl SystemParams {
    pub fn chain(&self) -> Result<ChainSpec> {
        ChainSpec::new(self.n, self.e_z, self.e_c, self.ising.clone())
    }

    pub fn build(&self) -> Result<(ChainSpec, ModeSet)> {
        let chain = self.chain()?;
        let modes = ModeSet::new(&chain, &self.modes, self.lambda0)?;
        Ok((chain, modes))
    }
}

/// `λ_l(j) = λ₀ √l cos(lπj/N)`.
pub fn coupling_strength(l: usize, j: usize, lambda0: f64, n: usize) -> Result<f64> {
    if l < 1 {
        return Err(Error::Domain(format!("mode index must be >= 1, got {l}")));
    }
    if j >= n {
        return Err(Error::Domain(format!("site {j} outside 0..{n}")));
    }
    Ok(coupling_unchecked(l, j, lambda0, n))
}

fn coupling_unchecked(l: usize, j: usize, lambda0: f64, n: usize) -> f64 {
    lambda0 * (l as f64).sqrt() * (l as f64 * PI * j as f64 / n as f64).cos()
}

/// Field self-interaction `D_l = (1/N) Σ_j λ_l(j)² / (4 E_c)`, summed exactly.
pub fn self_energy(l: usize, lambda0: f64, n: usize, e_c: f64) -> Result<f64> {
    if l < 1 {
        return Err(Error::Domain(format!("mode index must be >= 1, got {l}")));
    }
    if n == 0 {
        return Err(Error::Domain("empty chain".into()));
    }
    if !(e_c > 0.0) {
        return Err(Error::InvalidParameter(format!("need E_c > 0, got {e_c}")));
    }
    let sum: f64 = (0..n)
        .map(|j| coupling_unchecked(l, j, lambda0, n).powi(2))
        .sum();
    Ok(sum / (4.0 * e_c * n as f64))
}

/// One resonator mode with its site-resolved coupling.
#[derive(Clone, Debug, PartialEq)]
pub struct Mode {
    pub index: usize,
    pub omega: f64,
    pub coupling: Vec<f64>,
    pub self_energy: f64,
}

impl Mode {
    /// Restoring stiffness `ω_l + 4D_l` of the mode's mean field.
    pub fn stiffness(&self) -> f64 {
        self.omega + 4.0 * self.self_energy
    }
}

/// Resonator modes taking part in the calculation.
#[derive(Clone, Debug, PartialEq)]
pub struct ModeSet {
    lambda0: f64,
    modes: Vec<Mode>,
}

impl ModeSet {
    pub fn new(chain: &ChainSpec, indices: &[usize], lambda0: f64) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::InvalidParameter("mode set is empty".into()));
        }
        if !lambda0.is_finite() {
            return Err(Error::InvalidParameter(format!("lambda0 = {lambda0}")));
        }
        let mut seen = Vec::with_capacity(indices.len());
        let mut modes = Vec::with_capacity(indices.len());
        for &l in indices {
            if seen.contains(&l) {
                return Err(Error::InvalidParameter(format!("mode {l} listed twice")));
            }
            seen.push(l);
            let coupling = (0..chain.n())
                .map(|j| coupling_strength(l, j, lambda0, chain.n()))
                .collect::<Result<Vec<_>>>()?;
            let self_energy = self_energy(l, lambda0, chain.n(), chain.e_c())?;
            modes.push(Mode {
                index: l,
                omega: l as f64,
                coupling,
                self_energy,
            });
        }
        Ok(ModeSet { lambda0, modes })
    }

    /// Single-mode convenience constructor.
    pub fn single(chain: &ChainSpec, l: usize, lambda0: f64) -> Result<Self> {
        Self::new(chain, &[l], lambda0)
    }

    pub fn lambda0(&self) -> f64 {
        self.lambda0
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn indices(&self) -> Vec<usize> {
        self.modes.iter().map(|m| m.index).collect()
    }

    /// `2 Σ_l λ_l(j) φ_l`: the transverse drive the mean field exerts on each site.
    pub fn drive(&self, phi: &[f64]) -> Result<Vec<f64>> {
        ensure_len("order-parameter vector", self.modes.len(), phi.len())?;
        let n = self.modes[0].coupling.len();
        let mut drive = vec![0.0; n];
        for (mode, &p) in self.modes.iter().zip(phi) {
            if p == 0.0 {
                continue;
            }
            for (d, &c) in drive.iter_mut().zip(&mode.coupling) {
                *d += 2.0 * c * p;
            }
        }
        Ok(drive)
    }
}

/// Local transverse field seen by each spin once the mean field is applied,
/// and the rotation angle that aligns the spin frame with it.
#[derive(Clone, Debug, PartialEq)]
pub struct EffectiveField {
    pub omega: Vec<f64>,
    pub theta: Vec<f64>,
}

impl EffectiveField {
    /// Unrotated field: `Ω(j) = E_z/2`, `θ_j = 0`.
    pub fn uniform(n: usize, half_e_z: f64) -> Self {
        EffectiveField {
            omega: vec![half_e_z; n],
            theta: vec![0.0; n],
        }
    }

    pub fn len(&self) -> usize {
        self.omega.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omega.is_empty()
    }
}

/// `Ω(j) = √((E_z/2)² + (2Σ_l λ_l(j)φ_l)²)` and `θ_j = arctan(4Σ_l λ_l(j)φ_l / E_z)`.
pub fn effective_field(chain: &ChainSpec, modes: &ModeSet, phi: &[f64]) -> Result<EffectiveField> {
    ensure_len("mode couplings", chain.n(), modes.modes()[0].coupling.len())?;
    if let Some(bad) = phi.iter().find(|p| !p.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "order parameter {bad} is not finite"
        )));
    }
    let half = chain.e_z() / 2.0;
    let drive = modes.drive(phi)?;
    let omega = drive.iter().map(|d| half.hypot(*d)).collect();
    let theta = drive.iter().map(|d| d.atan2(half)).collect();
    Ok(EffectiveField { omega, theta })
}

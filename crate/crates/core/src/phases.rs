//! Parameter sweeps, transition-order analysis and magnetic-order labels.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::correlation::CorrelationReport;
use crate::error::{ensure_len, Error, Result};
use crate::meanfield::{
    minimize_phi, stationary_points, MeanFieldState, SearchGrid, StationaryPoint,
};
use crate::model::{ChainSpec, IsingProfile, SystemParams};

/// `φᵍ` below this counts as the normal phase.
pub const CONDENSED_THRESHOLD: f64 = 1e-5;

/// The parameter a sweep varies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Axis {
    #[serde(rename = "lambda0")]
    Lambda0,
    /// Weak-bond strength. A rectangular profile keeps `J_max - J_min`; a
    /// uniform one sets `J` itself.
    #[serde(rename = "J_min")]
    JMin,
    #[serde(rename = "E_z")]
    Ez,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::Lambda0 => "lambda0",
            Axis::JMin => "J_min",
            Axis::Ez => "E_z",
        }
    }

    /// `base` with this axis set to `value`.
    pub fn apply(self, base: &SystemParams, value: f64) -> Result<SystemParams> {
        let mut p = base.clone();
        match self {
            Axis::Lambda0 => p.lambda0 = value,
            Axis::Ez => p.e_z = value,
            Axis::JMin => {
                p.ising = match &base.ising {
                    IsingProfile::Uniform { .. } => IsingProfile::Uniform { j: value },
                    IsingProfile::Rectangular {
                        j_max,
                        j_min,
                        period,
                    } => IsingProfile::rectangular(value + (j_max - j_min), value, *period),
                    IsingProfile::Explicit { .. } => {
                        return Err(Error::InvalidParameter(
                            "cannot sweep J_min of an explicit coupling profile".into(),
                        ))
                    }
                }
            }
        }
        Ok(p)
    }
}

/// How `ΔJ = J_max - J_min` is chosen across a phase diagram.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeltaJRule {
    /// Constant `ΔJ`.
    Fixed(f64),
    /// `ΔJ = factor · E_z`.
    PerEz(f64),
}

impl DeltaJRule {
    pub fn delta(self, e_z: f64) -> f64 {
        match self {
            DeltaJRule::Fixed(d) => d,
            DeltaJRule::PerEz(f) => f * e_z,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub value: f64,
    pub state: Option<MeanFieldState>,
    pub stationary: Option<Vec<StationaryPoint>>,
    /// Set when the point failed; the sweep carries on regardless.
    pub error: Option<String>,
}

impl SweepPoint {
    pub fn condensed(&self) -> Option<bool> {
        self.state
            .as_ref()
            .map(|s| s.amplitude() > CONDENSED_THRESHOLD)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub axis: Axis,
    pub base: SystemParams,
    pub search: SearchGrid,
    pub points: Vec<SweepPoint>,
}

impl SweepResult {
    pub fn values(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.value).collect()
    }
}

fn solve(
    base: &SystemParams,
    axis: Axis,
    value: f64,
    search: &SearchGrid,
) -> Result<MeanFieldState> {
    let (chain, modes) = axis.apply(base, value)?.build()?;
    minimize_phi(&chain, &modes, search)
}

fn solve_point(
    base: &SystemParams,
    axis: Axis,
    value: f64,
    search: &SearchGrid,
    with_stationary: bool,
) -> SweepPoint {
    let run = || -> Result<(MeanFieldState, Option<Vec<StationaryPoint>>)> {
        let (chain, modes) = axis.apply(base, value)?.build()?;
        let state = minimize_phi(&chain, &modes, search)?;
        let stationary = if with_stationary && modes.len() == 1 {
            Some(stationary_points(&chain, &modes, search)?)
        } else {
            None
        };
        Ok((state, stationary))
    };
    match run() {
        Ok((state, stationary)) => SweepPoint {
            value,
            state: Some(state),
            stationary,
            error: None,
        },
        Err(e) => {
            log::warn!("{} = {value}: {e}", axis.name());
            SweepPoint {
                value,
                state: None,
                stationary: None,
                error: Some(e.to_string()),
            }
        }
    }
}

/// Minimize at every grid value. Points run in parallel and come back in
/// grid order; a failed point is recorded and the sweep continues.
pub fn sweep(
    base: &SystemParams,
    axis: Axis,
    values: &[f64],
    search: &SearchGrid,
    with_stationary: bool,
) -> Result<SweepResult> {
    if values.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidParameter(format!(
            "{} grid must be strictly increasing",
            axis.name()
        )));
    }
    if let Some(v) = values.iter().find(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "{} grid value {v}",
            axis.name()
        )));
    }
    let points = values
        .par_iter()
        .map(|&v| solve_point(base, axis, v, search, with_stationary))
        .collect();
    Ok(SweepResult {
        axis,
        base: base.clone(),
        search: *search,
        points,
    })
}

/// First λ₀ bracket `[lo, hi]` on the grid with the normal phase at `lo` and
/// the condensed phase at `hi`.
fn onset_bracket(result: &SweepResult) -> Result<(f64, f64)> {
    if result.axis != Axis::Lambda0 {
        return Err(Error::InvalidParameter(format!(
            "critical coupling needs a lambda0 sweep, got {}",
            result.axis.name()
        )));
    }
    let mut last_normal: Option<f64> = None;
    for p in &result.points {
        match p.condensed() {
            Some(false) => last_normal = Some(p.value),
            Some(true) => {
                return match last_normal {
                    Some(lo) => Ok((lo, p.value)),
                    None => Err(Error::Domain(format!(
                        "already condensed at the low end of the sweep (lambda0 = {})",
                        p.value
                    ))),
                }
            }
            None => {}
        }
    }
    let top = result.points.last().map_or(f64::NAN, |p| p.value);
    Err(Error::NoTransition(top))
}

fn refine_onset(
    result: &SweepResult,
    step: f64,
) -> Result<(f64, f64, MeanFieldState, MeanFieldState)> {
    let (mut lo, mut hi) = onset_bracket(result)?;
    let state_at = |v: f64| {
        result
            .points
            .iter()
            .find(|p| p.value == v)
            .and_then(|p| p.state.clone())
            .expect("bracket ends come from solved points")
    };
    let (mut s_lo, mut s_hi) = (state_at(lo), state_at(hi));
    while hi - lo > step {
        let mid = 0.5 * (lo + hi);
        let s = solve(&result.base, Axis::Lambda0, mid, &result.search)?;
        if s.amplitude() > CONDENSED_THRESHOLD {
            hi = mid;
            s_hi = s;
        } else {
            lo = mid;
            s_lo = s;
        }
    }
    Ok((lo, hi, s_lo, s_hi))
}

/// Bisection resolution of [`critical_coupling`].
pub const CRITICAL_COUPLING_STEP: f64 = 1e-4;

/// λ₀ᶜ: first grid point with `φᵍ > 1e-5`, refined by bisection against the
/// grid point before it.
pub fn critical_coupling(result: &SweepResult) -> Result<f64> {
    let (lo, hi, _, _) = refine_onset(result, CRITICAL_COUPLING_STEP)?;
    Ok(0.5 * (lo + hi))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TransitionOrder {
    First,
    Second,
    None,
    /// The jump test and the derivative/hysteresis tests disagree.
    Ambiguous,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TransitionOptions {
    /// `φᵍ` jump across the refined bracket that counts as discontinuous.
    pub jump_threshold: f64,
    /// Width the onset bracket is bisected down to.
    pub refine_step: f64,
    /// Finite-difference step for `e_gg(λ₀)`.
    pub fd_step: f64,
}

impl Default for TransitionOptions {
    fn default() -> Self {
        TransitionOptions {
            jump_threshold: 0.02,
            refine_step: 1e-4,
            fd_step: 2e-3,
        }
    }
}

/// Evidence behind a [`TransitionOrder`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransitionAnalysis {
    pub order: TransitionOrder,
    pub lambda_c: Option<f64>,
    /// Refined bracket `[lo, hi]` around λ₀ᶜ.
    pub bracket: Option<(f64, f64)>,
    pub jump: f64,
    pub jump_threshold: f64,
    /// One-sided `de_gg/dλ₀` at either end of the bracket.
    pub slope_below: f64,
    pub slope_above: f64,
    /// Largest slope mismatch a continuous first derivative would produce.
    pub slope_tolerance: f64,
    pub slope_discontinuous: bool,
    /// One-sided `d²e_gg/dλ₀²`.
    pub curvature_below: f64,
    pub curvature_above: f64,
    pub curvature_discontinuous: bool,
    /// Two stable stationary points coexist on both sides of λ₀ᶜ.
    pub hysteresis: bool,
    pub stable_below: usize,
    pub stable_above: usize,
}

impl TransitionAnalysis {
    fn none(options: &TransitionOptions) -> Self {
        TransitionAnalysis {
            order: TransitionOrder::None,
            lambda_c: None,
            bracket: None,
            jump: 0.0,
            jump_threshold: options.jump_threshold,
            slope_below: 0.0,
            slope_above: 0.0,
            slope_tolerance: 0.0,
            slope_discontinuous: false,
            curvature_below: 0.0,
            curvature_above: 0.0,
            curvature_discontinuous: false,
            hysteresis: false,
            stable_below: 1,
            stable_above: 1,
        }
    }
}

/// First or second order, from the `φᵍ` jump at the onset, corroborated by the
/// one-sided slopes of `e_gg(λ₀)` and by coexisting stable stationary points.
///
/// The sweep must be single-mode and over λ₀; `None` if nothing condenses.
pub fn classify_transition_order(
    result: &SweepResult,
    options: &TransitionOptions,
) -> Result<TransitionAnalysis> {
    if result.base.modes.len() != 1 {
        return Err(Error::InvalidParameter(
            "transition-order analysis needs a single mode".into(),
        ));
    }
    let (lo, hi, s_lo, s_hi) = match refine_onset(result, options.refine_step) {
        Ok(r) => r,
        Err(Error::NoTransition(_)) => return Ok(TransitionAnalysis::none(options)),
        Err(e) => return Err(e),
    };
    let jump = s_hi.amplitude() - s_lo.amplitude();

    let h = options.fd_step;
    let e = |v: f64| solve(&result.base, Axis::Lambda0, v, &result.search).map(|s| s.e_g);
    let (b1, b2) = (e(lo - h)?, e(lo - 2.0 * h)?);
    let (a1, a2) = (e(hi + h)?, e(hi + 2.0 * h)?);
    let slope_below = (3.0 * s_lo.e_g - 4.0 * b1 + b2) / (2.0 * h);
    let slope_above = (-3.0 * s_hi.e_g + 4.0 * a1 - a2) / (2.0 * h);
    let curvature_below = (s_lo.e_g - 2.0 * b1 + b2) / (h * h);
    let curvature_above = (s_hi.e_g - 2.0 * a1 + a2) / (h * h);
    // A continuous slope still drifts across the bracket, and the one-sided
    // stencils carry O(h²) error; both scale with the curvature.
    let curvature = curvature_below.abs().max(curvature_above.abs());
    let slope_tolerance = curvature * (hi - lo + h) + 1e-9;
    let slope_discontinuous = (slope_above - slope_below).abs() > slope_tolerance;
    let curvature_discontinuous = (curvature_above - curvature_below).abs() > 0.1 * curvature;

    let stable = |v: f64| -> Result<usize> {
        let (chain, modes) = Axis::Lambda0.apply(&result.base, v)?.build()?;
        Ok(stationary_points(&chain, &modes, &result.search)?
            .iter()
            .filter(|p| p.stable())
            .count())
    };
    let (stable_below, stable_above) = (stable(lo)?, stable(hi)?);
    let hysteresis = stable_below >= 2 && stable_above >= 2;

    let jumped = jump > options.jump_threshold;
    let order = match (
        jumped,
        slope_discontinuous && hysteresis,
        !slope_discontinuous && !hysteresis,
    ) {
        (true, true, _) => TransitionOrder::First,
        (false, _, true) => TransitionOrder::Second,
        _ => TransitionOrder::Ambiguous,
    };
    Ok(TransitionAnalysis {
        order,
        lambda_c: Some(0.5 * (lo + hi)),
        bracket: Some((lo, hi)),
        jump,
        jump_threshold: options.jump_threshold,
        slope_below,
        slope_above,
        slope_tolerance,
        slope_discontinuous,
        curvature_below,
        curvature_above,
        curvature_discontinuous,
        hysteresis,
        stable_below,
        stable_above,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FieldPhase {
    Normal,
    SuperRadiant,
}

impl FieldPhase {
    pub fn of(state: &MeanFieldState) -> Self {
        if state.amplitude() > CONDENSED_THRESHOLD {
            FieldPhase::SuperRadiant
        } else {
            FieldPhase::Normal
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MagneticOrder {
    NP,
    SP,
    NF,
    SF,
    NFP,
    SFP,
    #[serde(rename = "undetermined")]
    Undetermined,
}

impl MagneticOrder {
    pub fn label(self) -> &'static str {
        match self {
            MagneticOrder::NP => "NP",
            MagneticOrder::SP => "SP",
            MagneticOrder::NF => "NF",
            MagneticOrder::SF => "SF",
            MagneticOrder::NFP => "NFP",
            MagneticOrder::SFP => "SFP",
            MagneticOrder::Undetermined => "undetermined",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MagneticThresholds {
    /// Largest `ξ_RL` (sites) still counted as short-ranged.
    pub xi: f64,
    /// Smallest `⟨σ̄ᶻ⟩` still counted as polarized.
    pub sigma: f64,
    /// Relative peak-to-trough modulation that counts as oscillating.
    pub oscillation: f64,
}

impl Default for MagneticThresholds {
    fn default() -> Self {
        MagneticThresholds {
            xi: 5.0,
            sigma: 0.8,
            oscillation: 0.3,
        }
    }
}

/// The profile statistics a magnetic label is read from.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MagneticDiagnostics {
    pub xi_min: f64,
    pub xi_max: f64,
    pub sigma_min: f64,
    pub sigma_max: f64,
    /// `(max - min) / max` of `ξ_RL(j)`.
    pub xi_modulation: f64,
    /// `(max - min) / max` of `⟨σ̄ᶻ_j⟩`.
    pub sigma_modulation: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MagneticAssessment {
    pub order: MagneticOrder,
    pub diagnostics: MagneticDiagnostics,
}

fn modulation(min: f64, max: f64) -> f64 {
    if max > 0.0 {
        (max - min) / max
    } else {
        0.0
    }
}

/// Label the chain order from `ξ_RL(j)` and `⟨σ̄ᶻ_j⟩`.
///
/// Paramagnetic: short `ξ_RL` and large `⟨σ̄ᶻ⟩` everywhere. Mixed: both
/// profiles modulated by more than the oscillation threshold. Ferromagnetic:
/// long `ξ_RL` everywhere. Checked in that order.
pub fn classify_magnetic_order(
    report: &CorrelationReport,
    field_phase: FieldPhase,
    chain: &ChainSpec,
    thresholds: &MagneticThresholds,
) -> Result<MagneticAssessment> {
    ensure_len("correlation report", chain.n(), report.sigma_z_rot.len())?;
    let xi = report.xi_mean();
    let range = |v: &[f64]| {
        v.iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
                (lo.min(x), hi.max(x))
            })
    };
    let (xi_min, xi_max) = range(&xi);
    let (sigma_min, sigma_max) = range(&report.sigma_z_rot);
    let diagnostics = MagneticDiagnostics {
        xi_min,
        xi_max,
        sigma_min,
        sigma_max,
        xi_modulation: modulation(xi_min, xi_max),
        sigma_modulation: modulation(sigma_min, sigma_max),
    };
    let normal = field_phase == FieldPhase::Normal;
    let order = if xi_max <= thresholds.xi && sigma_min >= thresholds.sigma {
        if normal {
            MagneticOrder::NP
        } else {
            MagneticOrder::SP
        }
    } else if diagnostics.xi_modulation > thresholds.oscillation
        && diagnostics.sigma_modulation > thresholds.oscillation
    {
        if normal {
            MagneticOrder::NFP
        } else {
            MagneticOrder::SFP
        }
    } else if xi_min > thresholds.xi {
        if normal {
            MagneticOrder::NF
        } else {
            MagneticOrder::SF
        }
    } else {
        MagneticOrder::Undetermined
    };
    Ok(MagneticAssessment { order, diagnostics })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseLabel {
    pub field_phase: FieldPhase,
    pub transition_order: TransitionOrder,
    /// `None` when the magnetic analysis was not requested.
    pub magnetic_order: Option<MagneticOrder>,
}

/// Grid for [`phase_diagram`]. `e_z` empty means the base `E_z` only.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhaseDiagramSpec {
    pub j_min: Vec<f64>,
    pub lambda0: Vec<f64>,
    #[serde(default)]
    pub e_z: Vec<f64>,
    pub delta_j: DeltaJRule,
    /// Rectangular profile period; selects the mode `l = period`.
    #[serde(default = "default_period")]
    pub period: usize,
    #[serde(default)]
    pub transition: TransitionOptions,
    /// Label magnetic order in every cell (one correlation report per cell).
    #[serde(default)]
    pub magnetic: Option<MagneticThresholds>,
}

fn default_period() -> usize {
    2
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseCell {
    pub e_z: f64,
    pub j_min: f64,
    pub j_max: f64,
    pub lambda0: f64,
    pub phi: Vec<f64>,
    pub e_g: Option<f64>,
    pub label: Option<PhaseLabel>,
    pub error: Option<String>,
}

/// One `(E_z, J_min)` column of the diagram.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryPoint {
    pub e_z: f64,
    pub j_min: f64,
    pub analysis: Option<TransitionAnalysis>,
    pub error: Option<String>,
}

/// Where the transition turns first order at one `E_z`: the midpoint between
/// the last second-order column and the first-order column that follows it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Crossover {
    pub e_z: f64,
    pub j_min: Option<f64>,
    pub second_below: Option<f64>,
    pub first_above: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseDiagram {
    pub spec: PhaseDiagramSpec,
    pub cells: Vec<PhaseCell>,
    pub boundary: Vec<BoundaryPoint>,
    pub crossover: Vec<Crossover>,
}

fn strictly_increasing(name: &str, v: &[f64]) -> Result<()> {
    if v.windows(2).any(|w| !(w[1] > w[0])) || v.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "{name} grid must be finite and strictly increasing"
        )));
    }
    Ok(())
}

/// Label every `(E_z, J_min, λ₀)` cell and locate λ₀ᶜ(J_min) per `E_z`.
///
/// `base` supplies `N`, `E_c` and the mode; the profile is rebuilt as a
/// rectangular one with `J_max = J_min + ΔJ`.
pub fn phase_diagram(
    base: &SystemParams,
    spec: &PhaseDiagramSpec,
    search: &SearchGrid,
) -> Result<PhaseDiagram> {
    strictly_increasing("J_min", &spec.j_min)?;
    strictly_increasing("lambda0", &spec.lambda0)?;
    strictly_increasing("E_z", &spec.e_z)?;
    let e_zs = if spec.e_z.is_empty() {
        vec![base.e_z]
    } else {
        spec.e_z.clone()
    };
    let columns: Vec<(f64, f64)> = e_zs
        .iter()
        .flat_map(|&e| spec.j_min.iter().map(move |&j| (e, j)))
        .collect();

    let results: Vec<(Vec<PhaseCell>, BoundaryPoint)> = columns
        .par_iter()
        .map(|&(e_z, j_min)| phase_column(base, spec, search, e_z, j_min))
        .collect();
    let mut cells = Vec::new();
    let mut boundary = Vec::new();
    for (c, b) in results {
        cells.extend(c);
        boundary.push(b);
    }
    let crossover = e_zs
        .iter()
        .map(|&e_z| {
            let column: Vec<&BoundaryPoint> = boundary.iter().filter(|b| b.e_z == e_z).collect();
            locate_crossover(e_z, &column)
        })
        .collect();
    Ok(PhaseDiagram {
        spec: spec.clone(),
        cells,
        boundary,
        crossover,
    })
}

fn locate_crossover(e_z: f64, column: &[&BoundaryPoint]) -> Crossover {
    let mut last_second = None;
    for b in column {
        match b.analysis.as_ref().map(|a| a.order) {
            Some(TransitionOrder::Second) => last_second = Some(b.j_min),
            Some(TransitionOrder::First) => {
                if let Some(s) = last_second {
                    return Crossover {
                        e_z,
                        j_min: Some(0.5 * (s + b.j_min)),
                        second_below: Some(s),
                        first_above: Some(b.j_min),
                    };
                }
            }
            _ => {}
        }
    }
    Crossover {
        e_z,
        j_min: None,
        second_below: last_second,
        first_above: None,
    }
}

fn phase_column(
    base: &SystemParams,
    spec: &PhaseDiagramSpec,
    search: &SearchGrid,
    e_z: f64,
    j_min: f64,
) -> (Vec<PhaseCell>, BoundaryPoint) {
    let j_max = j_min + spec.delta_j.delta(e_z);
    let mut params = base.clone();
    params.e_z = e_z;
    params.ising = IsingProfile::rectangular(j_max, j_min, spec.period);
    let failed = |e: Error| {
        (
            Vec::new(),
            BoundaryPoint {
                e_z,
                j_min,
                analysis: None,
                error: Some(e.to_string()),
            },
        )
    };
    let result = match sweep(&params, Axis::Lambda0, &spec.lambda0, search, false) {
        Ok(r) => r,
        Err(e) => return failed(e),
    };
    let (analysis, error) = if params.modes.len() == 1 {
        match classify_transition_order(&result, &spec.transition) {
            Ok(a) => (Some(a), None),
            Err(e) => (None, Some(e.to_string())),
        }
    } else {
        (None, Some("transition order needs a single mode".into()))
    };
    let order = analysis.as_ref().map_or(TransitionOrder::None, |a| a.order);
    let cells = result
        .points
        .iter()
        .map(|p| {
            let mut cell = PhaseCell {
                e_z,
                j_min,
                j_max,
                lambda0: p.value,
                phi: Vec::new(),
                e_g: None,
                label: None,
                error: p.error.clone(),
            };
            if let Some(state) = &p.state {
                cell.phi = state.phi.clone();
                cell.e_g = Some(state.e_g);
                let field_phase = FieldPhase::of(state);
                let magnetic = match &spec.magnetic {
                    Some(th) => match magnetic_at(&params, p.value, state, th) {
                        Ok(m) => Some(m.order),
                        Err(e) => {
                            cell.error = Some(e.to_string());
                            None
                        }
                    },
                    None => None,
                };
                cell.label = Some(PhaseLabel {
                    field_phase,
                    transition_order: order,
                    magnetic_order: magnetic,
                });
            }
            cell
        })
        .collect();
    (
        cells,
        BoundaryPoint {
            e_z,
            j_min,
            analysis,
            error,
        },
    )
}

/// Correlation report and magnetic label of a solved state.
pub fn magnetic_at(
    params: &SystemParams,
    lambda0: f64,
    state: &MeanFieldState,
    thresholds: &MagneticThresholds,
) -> Result<MagneticAssessment> {
    use crate::correlation::{correlation_report, ReportOptions};
    use crate::fermion::{ground_sector, SectorMode};
    use crate::model::effective_field;

    let (chain, modes) = Axis::Lambda0.apply(params, lambda0)?.build()?;
    let field = effective_field(&chain, &modes, &state.phi)?;
    let solution = ground_sector(&field, chain.couplings(), SectorMode::Even)?;
    let report = correlation_report(&solution, &field, ReportOptions::default())?;
    classify_magnetic_order(&report, FieldPhase::of(state), &chain, thresholds)
}

//! Acceptance suite. Runs every criterion in order, prints one PASS/FAIL line
//! each, and exits non-zero if any failed.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use cavity_ising::fermion::{spectrum, Sector};
use cavity_ising::meanfield::{
    measured_order_parameters, minimize_phi, MeanFieldState, SearchGrid,
};
use cavity_ising::model::{EffectiveField, IsingProfile, SystemParams};
use cavity_ising::phases::{
    critical_coupling, magnetic_at, phase_diagram, sweep, Axis, DeltaJRule, MagneticOrder,
    MagneticThresholds, PhaseDiagramSpec, SweepResult, TransitionOptions, TransitionOrder,
    CONDENSED_THRESHOLD, CRITICAL_COUPLING_STEP,
};
use cavity_ising::validation::{validate_random_instances, ValidationOptions};

const ENERGY_REL_TOL: f64 = 1e-9;
const EXPECTATION_TOL: f64 = 1e-8;
const DISPERSION_TOL: f64 = 1e-10;
const SINGLE_MODE_AGREEMENT: f64 = 2e-3;
const JOINT_AGREEMENT: f64 = 5e-3;
const SWEEP_RESOLUTION: f64 = 2e-3;
const JUMP_THRESHOLD: f64 = 0.02;
const CROSSOVER: f64 = 0.35;
const CROSSOVER_TOL: f64 = 0.05;
const SELF_CONSISTENCY_TOL: f64 = 1e-4;

/// Converged minimizer kept for the self-consistency check.
struct Minimizer {
    params: SystemParams,
    phi: Vec<f64>,
    source: &'static str,
}

#[derive(Default)]
struct Check {
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Check {
    fn require(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.failures.push(what.into());
        }
    }

    fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }
}

fn report(id: usize, name: &str, budget: Option<Duration>, run: impl FnOnce(&mut Check)) -> bool {
    let mut c = Check::default();
    let start = Instant::now();
    run(&mut c);
    let elapsed = start.elapsed();
    if let Some(b) = budget {
        c.require(elapsed < b, format!("runtime {elapsed:.1?} exceeds {b:?}"));
    }
    let ok = c.failures.is_empty();
    println!(
        "criterion {id} ({name}): {} [{elapsed:.1?}] {}",
        if ok { "PASS" } else { "FAIL" },
        c.notes.join("; ")
    );
    for f in &c.failures {
        println!("    failed: {f}");
    }
    ok
}

fn lambda_grid(start: f64, stop: f64, step: f64) -> Vec<f64> {
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    (0..=n).map(|k| start + k as f64 * step).collect()
}

fn keep(sink: &mut Vec<Minimizer>, result: &SweepResult, source: &'static str) {
    for p in &result.points {
        if let Some(s) = &p.state {
            let params = Axis::Lambda0.apply(&result.base, p.value).unwrap();
            sink.push(Minimizer {
                params,
                phi: s.phi.clone(),
                source,
            });
        }
    }
}

/// λ₀ᶜ of each mode solved on its own.
fn single_mode_onsets(
    c: &mut Check,
    base: &SystemParams,
    modes: &[usize],
    grid: &[f64],
    sink: &mut Vec<Minimizer>,
    source: &'static str,
) -> Vec<Option<f64>> {
    modes
        .iter()
        .map(|&l| {
            let params = SystemParams {
                modes: vec![l],
                ..base.clone()
            };
            let r = sweep(&params, Axis::Lambda0, grid, &SearchGrid::default(), false).unwrap();
            keep(sink, &r, source);
            match critical_coupling(&r) {
                Ok(v) => Some(v),
                Err(e) => {
                    c.require(false, format!("mode {l}: {e}"));
                    None
                }
            }
        })
        .collect()
}

fn fmt_onsets(modes: &[usize], lc: &[Option<f64>]) -> String {
    modes
        .iter()
        .zip(lc)
        .map(|(l, v)| format!("l={l}: {}", v.map_or("none".into(), |v| format!("{v:.5}"))))
        .collect::<Vec<_>>()
        .join(", ")
}

fn criterion_1(c: &mut Check) {
    let opts = ValidationOptions {
        n: 8,
        instances: 20,
        omega_range: (0.1, 1.0),
        j_range: (0.0, 1.0),
        rho_max: 4,
        ..ValidationOptions::default()
    };
    let r = validate_random_instances(&opts).unwrap();
    c.require(r.instances.len() == 20, "20 instances");
    c.require(
        r.max_energy_deviation <= ENERGY_REL_TOL,
        format!("energy {:.2e}", r.max_energy_deviation),
    );
    c.require(
        r.max_sigma_z_deviation <= EXPECTATION_TOL,
        format!("sigma_z {:.2e}", r.max_sigma_z_deviation),
    );
    c.require(
        r.max_rho_deviation <= EXPECTATION_TOL,
        format!("rho {:.2e}", r.max_rho_deviation),
    );
    c.note(format!(
        "max deviations: energy {:.1e} rel, sigma_z {:.1e}, rho {:.1e}",
        r.max_energy_deviation, r.max_sigma_z_deviation, r.max_rho_deviation
    ));
}

fn criterion_2(c: &mut Check) {
    let n = 200;
    let omega = 0.4;
    let field = EffectiveField::uniform(n, omega);
    let mut worst: f64 = 0.0;
    for j in [0.0, 0.05, 0.2, 0.4, 0.7, 1.3] {
        let got = spectrum(&field, &vec![j; n], Sector::Even).unwrap();
        let mut want: Vec<f64> = (0..n)
            .map(|m| {
                let k = (2 * m + 1) as f64 * PI / n as f64;
                2.0 * (omega * omega + j * j - 2.0 * omega * j * k.cos()).sqrt()
            })
            .collect();
        want.sort_by(f64::total_cmp);
        for (a, b) in got.iter().zip(&want) {
            worst = worst.max((a - b).abs());
        }
    }
    c.require(
        worst <= DISPERSION_TOL,
        format!("dispersion deviation {worst:.2e}"),
    );

    let step = 0.01;
    let js = lambda_grid(0.2, 0.6, step);
    let gaps: Vec<f64> = js
        .iter()
        .map(|&j| spectrum(&field, &vec![j; n], Sector::Even).unwrap()[0])
        .collect();
    let (imin, _) = gaps
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .unwrap();
    let j_star = js[imin];
    c.require(
        (j_star - omega).abs() <= step + 1e-12,
        format!("gap minimum at J = {j_star}"),
    );
    c.note(format!(
        "max |Lambda - analytic| {worst:.1e}, gap minimum at J = {j_star:.2} (Omega = {omega})"
    ));
}

fn criterion_3(c: &mut Check, sink: &mut Vec<Minimizer>) {
    let base = SystemParams {
        n: 200,
        e_z: 0.8,
        e_c: 8.0,
        ising: IsingProfile::Uniform { j: 0.05 },
        ..SystemParams::default()
    };
    let modes = [1, 2, 3];
    let lc = single_mode_onsets(
        c,
        &base,
        &modes,
        &lambda_grid(0.0, 1.0, 0.02),
        sink,
        "uniform single-mode",
    );
    let found: Vec<f64> = lc.iter().flatten().copied().collect();
    if found.len() == 3 {
        let spread = found.iter().cloned().fold(f64::MIN, f64::max)
            - found.iter().cloned().fold(f64::MAX, f64::min);
        c.require(
            spread <= SINGLE_MODE_AGREEMENT,
            format!("single-mode spread {spread:.2e}"),
        );
    }

    // Joint solve of all three modes. The per-mode grid is coarser than the
    // default to fit the time budget; descent refines from every seed.
    let joint = SystemParams {
        modes: modes.to_vec(),
        ..base
    };
    let search = SearchGrid {
        multi_points: 11,
        ..SearchGrid::default()
    };
    let r = sweep(
        &joint,
        Axis::Lambda0,
        &lambda_grid(0.5, 0.8, 0.02),
        &search,
        false,
    )
    .unwrap();
    keep(sink, &r, "uniform joint");
    match critical_coupling(&r) {
        Ok(lj) => {
            let mean = found.iter().sum::<f64>() / found.len().max(1) as f64;
            c.require(
                (lj - mean).abs() <= JOINT_AGREEMENT,
                format!("joint {lj:.5} vs single {mean:.5}"),
            );
            c.note(format!("{}; joint {lj:.5}", fmt_onsets(&modes, &lc)));
        }
        Err(e) => c.require(false, format!("joint solve: {e}")),
    }
}

fn criterion_4(c: &mut Check, sink: &mut Vec<Minimizer>) {
    let modes = [1, 2, 3];
    let grid = lambda_grid(0.0, 1.0, 0.02);
    for period in [2, 3] {
        let base = SystemParams {
            n: 200,
            e_z: 0.8,
            e_c: 8.0,
            ising: IsingProfile::rectangular(0.35, 0.05, period),
            ..SystemParams::default()
        };
        let lc = single_mode_onsets(c, &base, &modes, &grid, sink, "rectangular single-mode");
        c.note(format!("p={period}: {}", fmt_onsets(&modes, &lc)));
        let Some(target) = lc[period - 1] else {
            continue;
        };
        for (i, other) in lc.iter().enumerate() {
            if i + 1 == period {
                continue;
            }
            if let Some(o) = other {
                c.require(
                    o - target > SWEEP_RESOLUTION,
                    format!("p={period}: l={} at {o:.5} not above l={period} at {target:.5} by {SWEEP_RESOLUTION}", i + 1),
                );
            }
        }
    }
}

fn criterion_5(c: &mut Check, sink: &mut Vec<Minimizer>) {
    let base = SystemParams {
        n: 200,
        e_z: 0.8,
        e_c: 8.0,
        ising: IsingProfile::rectangular(0.35, 0.05, 2),
        modes: vec![2],
        ..SystemParams::default()
    };
    let spec = PhaseDiagramSpec {
        j_min: vec![0.25, 0.30, 0.35, 0.40, 0.45, 0.50],
        lambda0: lambda_grid(0.5, 1.2, 0.05),
        e_z: Vec::new(),
        delta_j: DeltaJRule::Fixed(0.3),
        period: 2,
        transition: TransitionOptions {
            jump_threshold: JUMP_THRESHOLD,
            ..TransitionOptions::default()
        },
        magnetic: None,
    };
    let d = phase_diagram(&base, &spec, &SearchGrid::default()).unwrap();
    for cell in &d.cells {
        if cell.error.is_none() {
            let params = SystemParams {
                ising: IsingProfile::rectangular(cell.j_max, cell.j_min, 2),
                lambda0: cell.lambda0,
                ..base.clone()
            };
            sink.push(Minimizer {
                params,
                phi: cell.phi.clone(),
                source: "phase diagram",
            });
        }
    }
    let column = |j: f64| {
        d.boundary
            .iter()
            .find(|b| (b.j_min - j).abs() < 1e-12)
            .and_then(|b| b.analysis.clone())
    };
    let orders: Vec<String> = d
        .boundary
        .iter()
        .map(|b| format!("{:.2}:{:?}", b.j_min, b.analysis.as_ref().map(|a| a.order)))
        .collect();
    c.note(orders.join(" "));

    match column(0.30) {
        Some(a) => {
            c.require(
                a.order == TransitionOrder::Second,
                format!("J_min 0.3 is {:?}", a.order),
            );
            c.require(
                a.jump <= JUMP_THRESHOLD,
                format!("J_min 0.3 jump {:.3}", a.jump),
            );
            c.require(!a.slope_discontinuous, "J_min 0.3 slope discontinuous");
            c.require(a.curvature_discontinuous, "J_min 0.3 curvature continuous");
        }
        None => c.require(false, "J_min 0.3 not analysed"),
    }
    match column(0.50) {
        Some(a) => {
            c.require(
                a.order == TransitionOrder::First,
                format!("J_min 0.5 is {:?}", a.order),
            );
            c.require(
                a.jump > JUMP_THRESHOLD,
                format!("J_min 0.5 jump {:.3}", a.jump),
            );
            c.require(a.hysteresis, "J_min 0.5 without coexisting stable branches");
            c.note(format!(
                "J_min 0.5 jump {:.3}, stable branches {}/{}",
                a.jump, a.stable_below, a.stable_above
            ));
        }
        None => c.require(false, "J_min 0.5 not analysed"),
    }
    match d.crossover.first().and_then(|x| x.j_min) {
        Some(x) => {
            c.require(
                (x - CROSSOVER).abs() <= CROSSOVER_TOL,
                format!("crossover {x:.3}"),
            );
            c.note(format!("crossover J_min {x:.3}"));
        }
        None => c.require(false, "no crossover located"),
    }
}

fn criterion_6(c: &mut Check, sink: &mut Vec<Minimizer>) {
    let e_z = 0.1;
    let base = SystemParams {
        n: 40,
        e_z,
        e_c: 8.0,
        ising: IsingProfile::rectangular(0.26 * e_z, 0.01 * e_z, 2),
        modes: vec![1, 2, 3],
        ..SystemParams::default()
    };
    let modes = [1, 2, 3];
    let lc = single_mode_onsets(
        c,
        &base,
        &modes,
        &lambda_grid(0.0, 0.25, 0.01),
        sink,
        "desk-scale single-mode",
    );
    c.note(fmt_onsets(&modes, &lc));
    if let [Some(l1), Some(l2), Some(l3)] = lc[..] {
        c.require(l2 < l1 && l2 < l3, "mode 2 is not the first to condense");

        // The joint space contains every single-mode subspace, so the joint
        // solve must already be condensed just above λ₀ᶜ(2). The windowed
        // profile couples the modes at φ = 0, so it condenses as a mixture.
        let above = l2 + CRITICAL_COUPLING_STEP;
        let joint = solve_joint(&base, above);
        c.require(
            joint.amplitude() > CONDENSED_THRESHOLD,
            format!("joint solve normal at {above:.4}"),
        );
        c.note(format!(
            "joint phi at {above:.4}: [{}]",
            joint
                .phi
                .iter()
                .map(|p| format!("{p:.4}"))
                .collect::<Vec<_>>()
                .join(", ")
        ));
        sink.push(Minimizer {
            params: SystemParams {
                lambda0: above,
                ..base.clone()
            },
            phi: joint.phi,
            source: "desk-scale joint",
        });
    }

    let thresholds = MagneticThresholds::default();
    for (lambda0, want) in [(0.1, MagneticOrder::NP), (0.25, MagneticOrder::SP)] {
        let state = solve_joint(&base, lambda0);
        let m = magnetic_at(&base, lambda0, &state, &thresholds).unwrap();
        c.require(
            m.order == want,
            format!(
                "lambda0 {lambda0}: {} instead of {}",
                m.order.label(),
                want.label()
            ),
        );
        c.note(format!("lambda0 {lambda0}: {}", m.order.label()));
        sink.push(Minimizer {
            params: SystemParams {
                lambda0,
                ..base.clone()
            },
            phi: state.phi,
            source: "desk-scale joint",
        });
    }
}

fn solve_joint(base: &SystemParams, lambda0: f64) -> MeanFieldState {
    let (chain, modes) = SystemParams {
        lambda0,
        ..base.clone()
    }
    .build()
    .unwrap();
    minimize_phi(&chain, &modes, &SearchGrid::default()).unwrap()
}

fn criterion_7(c: &mut Check, sink: &[Minimizer]) {
    let mut worst: f64 = 0.0;
    let mut worst_at = "";
    for m in sink {
        let (chain, modes) = m.params.build().unwrap();
        let measured = measured_order_parameters(&chain, &modes, &m.phi).unwrap();
        for ((mode, phi), sx) in modes.modes().iter().zip(&m.phi).zip(&measured) {
            let dev = (sx - phi * mode.stiffness()).abs();
            if dev > worst {
                worst = dev;
                worst_at = m.source;
            }
        }
    }
    c.require(!sink.is_empty(), "no minimizers collected");
    c.require(
        worst <= SELF_CONSISTENCY_TOL,
        format!("max deviation {worst:.2e} ({worst_at})"),
    );
    c.note(format!(
        "{} minimizers, max |Sigma_x - phi*stiffness| {worst:.1e}",
        sink.len()
    ));
}

fn criterion_8(c: &mut Check) {
    let thresholds = MagneticThresholds::default();
    let points = [
        (0.02, 0.3, MagneticOrder::NP),
        (0.02, 1.2, MagneticOrder::SP),
        (0.25, 0.3, MagneticOrder::NFP),
        (0.25, 1.2, MagneticOrder::SFP),
        (0.5, 0.3, MagneticOrder::NF),
    ];
    let mut labels = Vec::new();
    for (j_min, lambda0, want) in points {
        let base = SystemParams {
            n: 200,
            e_z: 0.8,
            e_c: 8.0,
            ising: IsingProfile::rectangular(j_min + 0.3, j_min, 2),
            modes: vec![2],
            lambda0,
        };
        let (chain, modes) = base.build().unwrap();
        let state = minimize_phi(&chain, &modes, &SearchGrid::default()).unwrap();
        let m = magnetic_at(&base, lambda0, &state, &thresholds).unwrap();
        c.require(
            m.order == want,
            format!(
                "({j_min}, {lambda0}): {} instead of {}",
                m.order.label(),
                want.label()
            ),
        );
        c.require(
            m.order != MagneticOrder::SF,
            format!("({j_min}, {lambda0}) labelled SF"),
        );
        labels.push(m.order.label());
    }
    c.note(labels.join(" "));
}

fn main() {
    let mut sink = Vec::new();
    let min = |m: u64| Some(Duration::from_secs(60 * m));
    let results = [
        report(
            1,
            "oracle equivalence",
            Some(Duration::from_secs(10)),
            criterion_1,
        ),
        report(
            2,
            "homogeneous dispersion",
            Some(Duration::from_secs(30)),
            criterion_2,
        ),
        report(3, "common critical point", min(10), |c| {
            criterion_3(c, &mut sink)
        }),
        report(4, "mode selection", min(15), |c| criterion_4(c, &mut sink)),
        report(5, "transition order", min(30), |c| {
            criterion_5(c, &mut sink)
        }),
        report(6, "desk-scale chain", min(2), |c| criterion_6(c, &mut sink)),
        report(7, "self-consistency", None, |c| criterion_7(c, &sink)),
        report(8, "magnetic-order panel", min(10), criterion_8),
    ];
    let passed = results.iter().filter(|&&ok| ok).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    if passed != results.len() {
        std::process::exit(1);
    }
}

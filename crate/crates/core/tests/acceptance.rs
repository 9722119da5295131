//! Acceptance checks, one report line per criterion.
//!
//! Runs without the libtest harness so that every line is printed on each
//! run; the process exits nonzero if any criterion fails.

use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};
use std::process::ExitCode;
use std::time::Instant;

use eprsim_core::chsh::{optimize_settings, DisentangledModel, EntangledModel};
use eprsim_core::correlations::{
    correlation, disentangled_joint_probabilities_born, disentangled_joint_probabilities_checked,
    disentangled_joint_probabilities_fixed_axis, entangled_expectations,
    entangled_joint_probabilities, entangled_joint_probabilities_born, single_probabilities,
    single_probabilities_born,
};
use eprsim_core::disentangle::{branch_pair, decohere_offdiagonal, disentangled_mixture};
use eprsim_core::ensemble::{analytic_average_correlation, mc_average_correlation};
use eprsim_core::experiment::{fit_sweep, fit_visibility, run_sweep, sweep_angles};
use eprsim_core::qstate::{conditional_reduce, partial_trace};
use eprsim_core::states::{axis_spinor, bell_state, epr_density};
use eprsim_core::symmetry::{
    apply_parity, apply_r_perp, classify, parity_matrix, r_perp_matrix, Eigen, Helicity,
    HelicityState,
};
use eprsim_core::{
    AnalyzerPair, BellLabel, Branch, ComplexMatrix, CountsTable, DensityOperator, DirectionAxis,
    EnsembleGeometry, JointProbabilities, PairModel, ParticleKind, Sign, Subsystem, SweepConfig,
    SymmetryClassification, Vec3,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = fn() -> Outcome;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn random_axis(rng: &mut ChaCha8Rng) -> DirectionAxis {
    let theta = (2.0 * rng.random::<f64>() - 1.0).acos();
    let phi = 2.0 * PI * rng.random::<f64>();
    DirectionAxis::from_angles(theta, phi).unwrap()
}

fn random_unit(rng: &mut ChaCha8Rng) -> Vec3 {
    random_axis(rng).vector()
}

fn singlet_matrix() -> Outcome {
    let printed = [
        [0.0, 0.0, 0.0, 0.0],
        [0.0, 0.5, -0.5, 0.0],
        [0.0, -0.5, 0.5, 0.0],
        [0.0, 0.0, 0.0, 0.0],
    ];
    let rho = epr_density();
    let mut worst: f64 = 0.0;
    for (i, row) in printed.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            let e = rho.matrix().get(i, j);
            worst = worst.max((e.re - v).abs()).max(e.im.abs());
        }
    }
    outcome(
        worst <= 1e-15,
        format!("max entry deviation {worst:.1e} (tol 1e-15)"),
    )
}

fn decoherence_equals_mixture() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let rho = epr_density();
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let axis = random_axis(&mut rng);
        let d = decohere_offdiagonal(&rho, &axis).unwrap();
        worst = worst.max(
            d.matrix()
                .max_abs_diff(disentangled_mixture(&axis).matrix()),
        );
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        worst <= 1e-12 && secs < 1.0,
        format!("100 random axes, max deviation {worst:.1e} (tol 1e-12), {secs:.3} s"),
    )
}

fn conditional_reduction() -> Outcome {
    let minus_z = axis_spinor(&DirectionAxis::z(), Sign::Minus);
    let plus_z = axis_spinor(&DirectionAxis::z(), Sign::Plus);
    let (w1, rho1) = conditional_reduce(&epr_density(), &minus_z, Subsystem::Second).unwrap();
    let (w2, rho2) = conditional_reduce(&epr_density(), &plus_z, Subsystem::First).unwrap();
    let d1 = rho1.matrix().max_abs_diff(&plus_z.projector());
    let d2 = rho2.matrix().max_abs_diff(&minus_z.projector());
    let worst = (w1 - 0.5).abs().max((w2 - 0.5).abs()).max(d1).max(d2);
    outcome(
        worst <= 1e-12,
        format!("weights {w1} / {w2}, conditionals |+><+| and |-><-|, max deviation {worst:.1e} (tol 1e-12)"),
    )
}

fn entangled_correlation_grid() -> Outcome {
    let mut worst_e: f64 = 0.0;
    let mut worst_single: f64 = 0.0;
    for i in 0..37 {
        let theta = PI * i as f64 / 36.0;
        let pair = AnalyzerPair::with_angle(theta, ParticleKind::Fermion);
        let (e, one, two) = entangled_expectations(&pair);
        worst_e = worst_e.max((e + theta.cos()).abs());
        worst_single = worst_single.max(one.abs()).max(two.abs());
    }
    outcome(
        worst_e <= 1e-12 && worst_single <= 1e-12,
        format!(
            "37 angles, |E + cos| <= {worst_e:.1e}, |singles| <= {worst_single:.1e} (tol 1e-12)"
        ),
    )
}

fn mc_grid(geometry: EnsembleGeometry, k: f64, seed: u64) -> (f64, f64, f64) {
    let mut worst_z: f64 = 0.0;
    let mut max_se: f64 = 0.0;
    let mut worst_exact: f64 = 0.0;
    for theta in sweep_angles(12) {
        let pair = AnalyzerPair::with_angle(theta, ParticleKind::Fermion);
        let exact = analytic_average_correlation(&pair, &geometry).unwrap();
        worst_exact = worst_exact.max((exact - (-k * theta.cos())).abs());
        let est = mc_average_correlation(&pair, &geometry, 1_000_000, seed).unwrap();
        worst_z = worst_z.max(est.z_score(-k * theta.cos()).abs());
        max_se = max_se.max(est.std_error);
    }
    (worst_z, max_se, worst_exact)
}

fn sphere_average() -> Outcome {
    let start = Instant::now();
    let (z, se, _) = mc_grid(EnsembleGeometry::sphere(), 1.0 / 3.0, 7);
    let secs = start.elapsed().as_secs_f64();
    outcome(
        z <= 3.0 && se < 0.002,
        format!(
            "12 angles at n = 1e6, max |z| {z:.2} (tol 3), max std error {se:.2e}, {secs:.1} s"
        ),
    )
}

fn circle_average() -> Outcome {
    let (z, se, exact) = mc_grid(EnsembleGeometry::photon_default(), 0.5, 7);
    outcome(
        exact == 0.0 && z <= 3.0,
        format!("analytic deviation {exact:e} (exact), 12 angles at n = 1e6, max |z| {z:.2} (tol 3), max std error {se:.2e}"),
    )
}

fn chsh_contrast() -> Outcome {
    let (_, s_ent) = optimize_settings(&EntangledModel, false);
    let photon = DisentangledModel {
        geometry: EnsembleGeometry::photon_default(),
    };
    let (_, s_photon) = optimize_settings(&photon, true);
    let sphere = DisentangledModel {
        geometry: EnsembleGeometry::sphere(),
    };
    let (_, s_sphere) = optimize_settings(&sphere, false);
    let d1 = (s_ent - 2.0 * SQRT_2).abs();
    let d2 = (s_photon - SQRT_2).abs();
    let d3 = (s_sphere - 2.0 * SQRT_2 / 3.0).abs();
    outcome(
        d1 <= 1e-6 && d2 <= 1e-6 && d3 <= 1e-6,
        format!("|S| entangled {s_ent:.9}, disentangled photon {s_photon:.9}, disentangled sphere {s_sphere:.9} (tol 1e-6)"),
    )
}

fn visibility() -> Outcome {
    let start = Instant::now();
    let angles = sweep_angles(12);
    let ent = SweepConfig::new(PairModel::Entangled, ParticleKind::Fermion, 1_000_000, 7);
    let dis = SweepConfig::new(PairModel::Disentangled, ParticleKind::Photon, 1_000_000, 7);
    let v_ent = fit_sweep(&run_sweep(&ent, &angles).unwrap()).unwrap().v;
    let v_dis = fit_sweep(&run_sweep(&dis, &angles).unwrap()).unwrap().v;
    let secs = start.elapsed().as_secs_f64();

    // exact counts for E = -0.46 cos θ at 0, π/2, π with N = 1e8
    let n = 100_000_000u64;
    let same = |e: f64| ((1.0 + e) / 2.0 * n as f64).round() as u64;
    let table = |e: f64| {
        let s = same(e);
        CountsTable::new(s / 2, (n - s) / 2, (n - s) / 2, s / 2)
    };
    let fixture = [
        (0.0, table(-0.46)),
        (FRAC_PI_2, table(0.0)),
        (PI, table(0.46)),
    ];
    let v_fix = fit_visibility(&fixture).unwrap().v;

    let pass = (v_ent - 1.0).abs() <= 0.01
        && (v_dis - 0.5).abs() <= 0.01
        && (v_fix - 0.46).abs() <= 1e-12
        && secs < 60.0;
    outcome(
        pass,
        format!(
            "V entangled {v_ent:.4}, disentangled photon {v_dis:.4} (tol 0.01, {secs:.1} s); fixture V {v_fix} (tol 1e-12)"
        ),
    )
}

fn symmetry_tables() -> Outcome {
    use Helicity::{L, R};
    let hs = |a, b| HelicityState::new(a, b).ket();
    let mut failures = Vec::new();

    let parity_rows = [
        ((R, R), (L, L)),
        ((L, L), (R, R)),
        ((L, R), (R, L)),
        ((R, L), (L, R)),
    ];
    for ((a, b), (c, d)) in parity_rows {
        if apply_parity(&hs(a, b)) != hs(c, d) {
            failures.push(format!("P|{a:?}{b:?}> != |{c:?}{d:?}>"));
        }
    }
    let parity_plus = [hs(R, L), bell_state(BellLabel::PhiPlus), hs(L, R)];
    for k in &parity_plus {
        if classify(k).parity != Eigen::Even {
            failures.push(format!("parity +1 list: {:?} not even", k.amplitudes()));
        }
    }
    if classify(&bell_state(BellLabel::PhiMinus)).parity != Eigen::Odd {
        failures.push("Phi- not parity odd".into());
    }
    let r_rows = [
        ((R, R), (R, R)),
        ((L, L), (L, L)),
        ((L, R), (R, L)),
        ((R, L), (L, R)),
    ];
    for ((a, b), (c, d)) in r_rows {
        if apply_r_perp(&hs(a, b)) != hs(c, d) {
            failures.push(format!("R|{a:?}{b:?}> != |{c:?}{d:?}>"));
        }
    }
    if parity_matrix().commutator(&r_perp_matrix()) != ComplexMatrix::zeros(4, 4) {
        failures.push("[P, R] != 0".into());
    }
    let expect = [
        (BellLabel::PhiPlus, Eigen::Even, Eigen::Even),
        (BellLabel::PsiPlus, Eigen::Even, Eigen::Even),
        (BellLabel::PhiMinus, Eigen::Odd, Eigen::Even),
        (BellLabel::PsiMinus, Eigen::Even, Eigen::Odd),
    ];
    for (label, parity, r_perp) in expect {
        if classify(&bell_state(label)) != (SymmetryClassification { parity, r_perp }) {
            failures.push(format!("{} classification", label.name()));
        }
    }
    let detail = if failures.is_empty() {
        "basis actions, eigen-lists, commutator and Bell classification reproduced".to_string()
    } else {
        format!("mismatches: {}", failures.join("; "))
    };
    outcome(failures.is_empty(), detail)
}

fn density_invariants(rho: &DensityOperator) -> f64 {
    let m = rho.matrix();
    let herm = m.hermiticity_defect();
    let tr = (m.trace() - 1.0).norm();
    let neg = rho.eigenvalues().iter().fold(0.0_f64, |w, &l| w.max(-l));
    herm.max(tr).max(neg)
}

fn probabilities_ok(p: &JointProbabilities) -> f64 {
    let range = p
        .cells()
        .iter()
        .fold(0.0_f64, |w, &c| w.max(-c).max(c - 1.0));
    range.max((p.sum() - 1.0).abs())
}

fn property_suites() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);

    // density-operator invariants
    let mut states: Vec<DensityOperator> = BellLabel::ALL
        .iter()
        .map(|&l| DensityOperator::pure(&bell_state(l)))
        .collect();
    for _ in 0..100 {
        let axis = random_axis(&mut rng);
        let mix = disentangled_mixture(&axis);
        states.push(partial_trace(&mix, Subsystem::First).unwrap());
        states.push(partial_trace(&mix, Subsystem::Second).unwrap());
        states.push(branch_pair(&axis, Branch::PlusMinus));
        states.push(branch_pair(&axis, Branch::MinusPlus));
        states.push(decohere_offdiagonal(&epr_density(), &axis).unwrap());
        let (_, cond) = conditional_reduce(
            &epr_density(),
            &axis_spinor(&axis, Sign::Minus),
            Subsystem::Second,
        )
        .unwrap();
        states.push(cond);
        states.push(mix);
    }
    let inv = states.iter().map(density_invariants).fold(0.0, f64::max);

    // normalization and dual paths on random inputs
    let mut norm: f64 = 0.0;
    let mut dual: f64 = 0.0;
    let mut checked_failures = 0;
    for _ in 0..1000 {
        let kind = if rng.random::<bool>() {
            ParticleKind::Fermion
        } else {
            ParticleKind::Photon
        };
        let pair = AnalyzerPair::new(random_unit(&mut rng), random_unit(&mut rng), kind).unwrap();
        let axis = random_axis(&mut rng);
        let ent = entangled_joint_probabilities(&pair);
        let ent_born = entangled_joint_probabilities_born(&pair).unwrap();
        let dis = disentangled_joint_probabilities_fixed_axis(&pair, &axis);
        let dis_born = disentangled_joint_probabilities_born(&pair, &axis).unwrap();
        for p in [&ent, &ent_born, &dis, &dis_born] {
            norm = norm.max(probabilities_ok(p));
        }
        dual = dual
            .max(ent.max_abs_diff(&ent_born))
            .max(dis.max_abs_diff(&dis_born));
        dual = dual.max((correlation(&ent) + pair.a().dot(pair.b())).abs());
        if disentangled_joint_probabilities_checked(&pair, &axis).is_err() {
            checked_failures += 1;
        }
        for particle in [Subsystem::First, Subsystem::Second] {
            let closed = single_probabilities(&axis, pair.a(), particle).unwrap();
            let phase = 2.0 * PI * rng.random::<f64>();
            let born = single_probabilities_born(&axis, pair.a(), particle, phase).unwrap();
            dual = dual
                .max((closed.0 - born.0).abs())
                .max((closed.1 - born.1).abs());
            norm = norm.max((closed.0 + closed.1 - 1.0).abs());
        }
    }

    // determinism under seed fixing and worker count
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap();
        pool.install(|| {
            let pair = AnalyzerPair::with_angle(0.9, ParticleKind::Fermion);
            let mc =
                mc_average_correlation(&pair, &EnsembleGeometry::sphere(), 200_000, 3).unwrap();
            let cfg = SweepConfig::new(PairModel::Disentangled, ParticleKind::Photon, 100_000, 3);
            let rows = run_sweep(&cfg, &sweep_angles(5)).unwrap();
            (mc.mean.to_bits(), mc.std_error.to_bits(), rows)
        })
    };
    let one = run(1);
    let deterministic = one == run(4) && one == run(1);

    let pass =
        inv <= 1e-10 && norm <= 1e-12 && dual <= 1e-12 && checked_failures == 0 && deterministic;
    outcome(
        pass,
        format!(
            "{} states, invariant defect {inv:.1e}; 1000 random inputs, normalization {norm:.1e}, dual-path {dual:.1e} (tol 1e-12); bit-identical across 1/4 workers: {deterministic}",
            states.len()
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, Check); 10] = [
        ("singlet density matrix", singlet_matrix),
        (
            "decoherence equals branch mixture",
            decoherence_equals_mixture,
        ),
        ("conditional reduction", conditional_reduction),
        (
            "entangled correlation and singles",
            entangled_correlation_grid,
        ),
        ("sphere ensemble average", sphere_average),
        ("transverse circle ensemble average", circle_average),
        ("CHSH contrast", chsh_contrast),
        ("simulated visibility", visibility),
        ("photon symmetry tables", symmetry_tables),
        ("property suites", property_suites),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let r = check();
        if !r.pass {
            failed += 1;
        }
        println!(
            "criterion {:>2} {} {}: {}",
            i + 1,
            if r.pass { "PASS" } else { "FAIL" },
            name,
            r.detail
        );
    }
    println!(
        "acceptance: {} passed, {} failed",
        criteria.len() - failed,
        failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

//! Acceptance suite: one test per claim, each printing a PASS/FAIL line.
//! Run with `cargo test --test acceptance -- --nocapture` to see the table.

mod common;

use std::time::Instant;

use common::{
    interdigitation_by_polygon_overlap, lever_arm_by_line_intersection, linear_fit,
    max_disturbance_by_basis_enumeration, Rng,
};
use getgrasp::analysis::{
    compare_grippers, run_scenario, scenario, AnalysisConfig, Scenario, SiteSpec,
};
use getgrasp::contact::{close_jaws, Contact, ContactConfig, ContactKind, ContactSet};
use getgrasp::geometry::{FingerProfile, GripperConfig};
use getgrasp::shape::{ObjectModel, Pose, ShapePrimitive, G_ACCEL};
use getgrasp::wrench::{force_closure, grasp_matrix, max_disturbance, secure_grasp_check};
use nalgebra::{Unit, Vector3, Vector6};

fn verdict(criterion: &str, pass: bool, details: &str) {
    println!(
        "acceptance {criterion}: {} - {details}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "{criterion} failed: {details}");
}

fn gel_finger(width: f64, gel: f64) -> FingerProfile {
    FingerProfile::new(100.0, width, width, gel, gel, 0.0, 5.0, 3.0).unwrap()
}

fn rigid_finger(width: f64) -> FingerProfile {
    FingerProfile::new(100.0, width, width, 0.0, 0.0, 0.0, 5.0, 3.0).unwrap()
}

fn sphere(radius: f64, mass: f64, mu: f64) -> ObjectModel {
    ObjectModel::new(ShapePrimitive::Sphere { radius }, Pose::default(), mass, mu).unwrap()
}

fn cylinder(radius: f64, length: f64, mu: f64) -> ObjectModel {
    ObjectModel::new(ShapePrimitive::Cylinder { radius, length }, Pose::default(), 0.2, mu)
        .unwrap()
}

fn example_suite_path() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios/example.toml")
}

/// Two antipodal hard point contacts never close in 6D; upgrading them to
/// patches with torsional friction does.
#[test]
fn criterion_01_closure_counterexample() {
    let start = Instant::now();
    let cfg = ContactConfig::default();

    let rigid = GripperConfig::flat_pair([rigid_finger(12.0), rigid_finger(12.0)], 60.0, 15.0)
        .unwrap();
    let ball = sphere(15.0, 0.2, 0.5);
    let rigid_set = close_jaws(&rigid, &ball, 50.0, &cfg).unwrap();
    let mut point_ok = rigid_set
        .contacts
        .iter()
        .all(|c| c.kind == ContactKind::Point);
    let mut details = String::new();
    for mu in [0.0, 0.5, 1.0] {
        let gens = grasp_matrix(&rigid_set, mu, 8, 100.0).unwrap();
        let closed = force_closure(&gens).unwrap();
        point_ok &= !closed;
        details.push_str(&format!("mu={mu}: closure={closed}; "));
    }

    let soft = GripperConfig::flat_pair([gel_finger(12.0, 4.0), gel_finger(12.0, 4.0)], 60.0, 15.0)
        .unwrap();
    let soft_set = close_jaws(&soft, &ball, 50.0, &cfg).unwrap();
    let radius_ok = soft_set.contacts.iter().all(|c| c.torsional_radius >= 0.5);
    let gens = grasp_matrix(&soft_set, 0.1, 8, 100.0).unwrap();
    let patch_closed = force_closure(&gens).unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    details.push_str(&format!(
        "patch r_t>=0.5: {radius_ok}; patch closure at mu=0.1: {patch_closed}; {elapsed:.2}s"
    ));
    verdict(
        "C1 (closure counterexample)",
        point_ok && radius_ok && patch_closed && elapsed < 1.0,
        &details,
    );
}

/// Flat-pair torque resistance grows affinely with finger width.
#[test]
fn criterion_02_width_scaling() {
    let widths = [5.0, 10.0, 20.0, 40.0];
    let rod = cylinder(15.0, 200.0, 0.5);
    let mut cfg = AnalysisConfig::default();
    cfg.gel_stiffness = 5.0; // firm thin pad: patch width tracks the finger
    let mut tau_x = Vec::new();
    let mut tau_z = Vec::new();
    for &w in &widths {
        let g = GripperConfig::flat_pair([gel_finger(w, 3.0), gel_finger(w, 3.0)], 60.0, 15.0)
            .unwrap();
        let row = run_scenario(
            &scenario("c2", "flat", g, "rod", rod.clone(), SiteSpec::At(50.0)),
            &cfg,
        );
        let env = row.envelope.expect(&row.status);
        tau_x.push(env.tau_x);
        tau_z.push(env.tau_z);
    }
    let (_, bx, r2x) = linear_fit(&widths, &tau_x);
    let (_, bz, r2z) = linear_fit(&widths, &tau_z);
    let pass = r2x >= 0.99 && r2z >= 0.99 && bx > 0.0 && bz > 0.0;
    verdict(
        "C2 (width scaling)",
        pass,
        &format!(
            "tau_x={tau_x:.1?} R2={r2x:.5}; tau_z={tau_z:.1?} R2={r2z:.5}"
        ),
    );
}

/// Converging-pair torque resistance about the finger axis grows affinely
/// with the pair separation and beats the flat pair at equal width.
#[test]
fn criterion_03_lever_arm_scaling() {
    let site = 30.0;
    let rod = cylinder(10.0, 200.0, 0.1);
    let cfg = AnalysisConfig::default();
    let levers = [20.0, 40.0, 80.0];
    let mut tau_x = Vec::new();
    for &l in &levers {
        let base = l + 2.0 * site * (10.0_f64).to_radians().tan();
        let v = gel_finger(5.0, 4.0).with_compliant_backing(true);
        let g = GripperConfig::v_pair_plus_single(v.clone(), v, 10.0, base, 60.0, 15.0).unwrap();
        let row = run_scenario(
            &scenario("c3", "get", g, "rod", rod.clone(), SiteSpec::At(site)),
            &cfg,
        );
        tau_x.push(row.envelope.expect(&row.status).tau_x);
    }
    let flat = GripperConfig::flat_pair([gel_finger(5.0, 4.0), gel_finger(5.0, 4.0)], 60.0, 15.0)
        .unwrap();
    let flat_row = run_scenario(
        &scenario("c3f", "flat", flat, "rod", rod, SiteSpec::At(50.0)),
        &cfg,
    );
    let flat_tau_x = flat_row.envelope.expect(&flat_row.status).tau_x;
    let (_, slope, r2) = linear_fit(&levers, &tau_x);
    let exceeds = tau_x.iter().all(|&t| t > flat_tau_x);
    verdict(
        "C3 (lever-arm scaling)",
        r2 >= 0.99 && slope > 0.0 && exceeds,
        &format!("tau_x={tau_x:.1?} R2={r2:.5} slope={slope:.2}; flat pair {flat_tau_x:.1}"),
    );
}

/// Spin resistance of point contacts is purely frictional: proportional to
/// mu, exactly zero without friction.
#[test]
fn criterion_04_friction_scaling() {
    let cfg = ContactConfig::default();
    let mut g = GripperConfig::flat_pair([rigid_finger(14.0), rigid_finger(14.0)], 60.0, 15.0)
        .unwrap();
    g.studs = vec![30.0, 70.0];
    let block = ObjectModel::new(
        ShapePrimitive::Cuboid { x: 60.0, y: 40.0, z: 20.0 },
        Pose::default(),
        0.3,
        0.5,
    )
    .unwrap();
    let set = close_jaws(&g, &block, 50.0, &cfg).unwrap();
    let spin = Vector6::new(0.0, 0.0, 0.0, 0.0, 0.0, 1.0);

    let zero_gens = grasp_matrix(&set, 0.0, 8, 100.0).unwrap();
    let alpha_zero = max_disturbance(&zero_gens, &spin, 15.0).unwrap();

    let mus = [0.25, 0.5, 0.75, 1.0];
    let ratios: Vec<f64> = mus
        .iter()
        .map(|&mu| {
            let gens = grasp_matrix(&set, mu, 8, 100.0).unwrap();
            max_disturbance(&gens, &spin, 15.0).unwrap() / mu
        })
        .collect();
    let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
    let max_rel = ratios
        .iter()
        .map(|r| (r - mean).abs() / mean)
        .fold(0.0_f64, f64::max);
    verdict(
        "C4 (friction scaling)",
        alpha_zero == 0.0 && max_rel <= 0.02,
        &format!("tau_z/mu = {ratios:.2?} (spread {:.3}%); mu=0 -> {alpha_zero}", max_rel * 100.0),
    );
}

/// Torque resistance about the lateral axis is a property of the object,
/// not the finger arrangement.
#[test]
fn criterion_05_y_equivalence() {
    let cfg = AnalysisConfig::default();
    // Flat-sided handle held across the fingers.
    let handle = ObjectModel::new(
        ShapePrimitive::Cuboid { x: 60.0, y: 200.0, z: 20.0 },
        Pose::default(),
        0.4,
        0.5,
    )
    .unwrap();
    let v = gel_finger(10.0, 4.0).with_compliant_backing(true);
    let get = GripperConfig::v_pair_plus_single(v.clone(), v, 10.0, 40.0, 60.0, 15.0).unwrap();
    let flat = GripperConfig::flat_pair([gel_finger(10.0, 4.0), gel_finger(10.0, 4.0)], 60.0, 15.0)
        .unwrap();
    let get_row = run_scenario(
        &scenario("c5g", "get", get, "handle", handle.clone(), SiteSpec::At(30.0)),
        &cfg,
    );
    let flat_row = run_scenario(
        &scenario("c5f", "flat", flat, "handle", handle, SiteSpec::At(50.0)),
        &cfg,
    );
    let a = get_row.envelope.expect(&get_row.status).tau_y;
    let b = flat_row.envelope.expect(&flat_row.status).tau_y;
    let rel = (a - b).abs() / a.max(b);
    verdict(
        "C5 (y-axis equivalence)",
        rel <= 0.05,
        &format!("tau_y: converging {a:.1} vs flat {b:.1} N*mm ({:.2}% apart)", rel * 100.0),
    );
}

/// Over the shipped object suite the three-finger design is at least as
/// secure and its envelope dominates on at least three of four primitives.
#[test]
fn criterion_06_envelope_dominance() {
    let start = Instant::now();
    let suite = getgrasp::scenario::load_file(&example_suite_path()).unwrap();
    let primitives = ["get_ball", "get_hammer", "get_block", "get_wedge"];
    let scenarios: Vec<Scenario> = suite
        .scenarios
        .iter()
        .filter(|s| primitives.contains(&s.name.as_str()))
        .cloned()
        .collect();
    assert_eq!(scenarios.len(), 4, "shipped suite must contain the four primitives");
    let grippers: Vec<(String, GripperConfig)> = suite
        .grippers
        .iter()
        .filter(|(n, _)| n == "get" || n == "flat")
        .cloned()
        .collect();
    let report = compare_grippers(&scenarios, &grippers, &suite.config).unwrap();
    let frac = |name: &str| {
        report
            .secure_fractions
            .iter()
            .find(|f| f.gripper == name)
            .map(|f| f.fraction)
            .unwrap_or(0.0)
    };
    let dominance = report
        .dominance
        .iter()
        .find(|d| d.gripper_a == "get" && d.gripper_b == "flat")
        .unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    let pass = frac("get") >= frac("flat")
        && dominance.fraction >= 0.75 - 1e-9
        && dominance.excluded == 0
        && elapsed < 30.0;
    verdict(
        "C6 (envelope dominance)",
        pass,
        &format!(
            "secure: get {:.2} vs flat {:.2}; dominance {:.2} over {} objects; {elapsed:.1}s",
            frac("get"),
            frac("flat"),
            dominance.fraction,
            dominance.compared
        ),
    );
}

/// Static payload check at the friction-capacity boundary.
#[test]
fn criterion_07_payload_sanity() {
    let cfg = ContactConfig::default();
    let g = GripperConfig::flat_pair([gel_finger(12.0, 4.0), gel_finger(12.0, 4.0)], 60.0, 15.0)
        .unwrap();
    let gravity = Vector3::new(0.0, -1.0, 0.0);
    let weight = 0.75 * G_ACCEL;

    let hold = |mu: f64| -> bool {
        let ball = sphere(15.0, 0.75, mu);
        let set = close_jaws(&g, &ball, 50.0, &cfg).unwrap();
        let gens = grasp_matrix(&set, mu, 8, 100.0).unwrap();
        secure_grasp_check(&gens, &ball, 15.0, 3.0, &gravity)
            .unwrap()
            .weight_hold
    };
    let high = hold(0.5);
    let low = hold(0.2);
    let cap_high = 2.0 * 0.5 * 15.0;
    let cap_low = 2.0 * 0.2 * 15.0;
    verdict(
        "C7 (payload sanity)",
        high && !low && cap_high >= weight && cap_low < weight,
        &format!(
            "weight {weight:.2} N; mu=0.5 capacity {cap_high:.1} N -> hold={high}; mu=0.2 capacity {cap_low:.1} N -> hold={low}"
        ),
    );
}

/// The disturbance LP agrees with exhaustive basis enumeration on random
/// small instances.
#[test]
fn criterion_08_lp_vs_brute_force() {
    let mut rng = Rng::new(2024);
    let mut worst = 0.0_f64;
    let mut resisting = 0;
    for case in 0..100 {
        let set = random_point_set(&mut rng, case);
        let mu = rng.range(0.1, 1.0);
        let gens = grasp_matrix(&set, mu, 4, 100.0).unwrap();
        let dir = Vector6::new(
            rng.range(-1.0, 1.0),
            rng.range(-1.0, 1.0),
            rng.range(-1.0, 1.0),
            rng.range(-30.0, 30.0),
            rng.range(-30.0, 30.0),
            rng.range(-30.0, 30.0),
        );
        let lp = max_disturbance(&gens, &dir, 15.0).unwrap();
        let oracle = max_disturbance_by_basis_enumeration(&gens, &dir, 15.0);
        let scale = lp.abs().max(oracle.abs());
        if scale > 1e-9 {
            worst = worst.max((lp - oracle).abs() / scale);
        }
        if oracle > 1e-6 {
            resisting += 1;
        }
    }
    verdict(
        "C8 (LP vs brute force)",
        worst <= 0.02 && resisting >= 30,
        &format!("worst relative gap {:.2e} over 100 instances ({resisting} resisting)", worst),
    );
}

fn random_point_set(rng: &mut Rng, case: usize) -> ContactSet {
    let mk = |i: usize, pos: Vector3<f64>, normal: Vector3<f64>, f: f64| {
        let normal = Unit::new_normalize(normal);
        let seed = if normal.x.abs() < 0.9 { Vector3::x() } else { Vector3::y() };
        let tu = Unit::new_normalize(seed - normal.into_inner() * seed.dot(&normal));
        Contact {
            position: pos,
            normal,
            tangent_u: tu,
            tangent_v: Unit::new_normalize(normal.cross(&tu)),
            kind: ContactKind::Point,
            normal_force: f,
            torsional_radius: 0.0,
            finger: i,
            jaw_sign: 1.0,
        }
    };
    let mut contacts = vec![
        mk(
            0,
            Vector3::new(rng.range(-8.0, 8.0), rng.range(-8.0, 8.0), rng.range(-14.0, -6.0)),
            Vector3::new(rng.range(-0.3, 0.3), rng.range(-0.3, 0.3), 1.0),
            rng.range(4.0, 20.0),
        ),
        mk(
            1,
            Vector3::new(rng.range(-8.0, 8.0), rng.range(-8.0, 8.0), rng.range(6.0, 14.0)),
            Vector3::new(rng.range(-0.3, 0.3), rng.range(-0.3, 0.3), -1.0),
            rng.range(4.0, 20.0),
        ),
    ];
    if case % 5 >= 3 {
        // Tripod instead of pair-plus-side for a closure-rich mix.
        let r = 12.0;
        contacts = (0..3)
            .map(|i| {
                let th = 2.0 * std::f64::consts::PI * i as f64 / 3.0 + rng.range(-0.2, 0.2);
                let p = Vector3::new(r * th.cos(), r * th.sin(), rng.range(-1.0, 1.0));
                mk(i, p, -p, rng.range(5.0, 15.0))
            })
            .collect();
    } else if case % 5 != 0 {
        contacts.push(mk(
            2,
            Vector3::new(rng.range(-8.0, 8.0), rng.range(6.0, 14.0), rng.range(-6.0, 6.0)),
            Vector3::new(rng.range(-0.3, 0.3), -1.0, rng.range(-0.3, 0.3)),
            rng.range(4.0, 20.0),
        ));
    }
    ContactSet {
        contacts,
        actuation_force: 15.0,
        grasp_site_s: 50.0,
        residual_wrench: Vector6::zeros(),
    }
}

/// The two geometry operations agree with their construction oracles.
#[test]
fn criterion_09_geometry_oracles() {
    let mut rng = Rng::new(909);
    let mut worst = 0.0_f64;
    for _ in 0..1000 {
        let base = rng.range(10.0, 80.0);
        let angle = rng.range(0.0, 20.0);
        let len = rng.range(40.0, 160.0);
        let f = FingerProfile::new(len, 8.0, 4.0, 3.0, 1.0, 10.0, 5.0, 3.0).unwrap();
        let g = GripperConfig::v_pair_plus_single(f.clone(), f, angle, base, 120.0, 15.0).unwrap();
        let s = rng.range(0.0, len);
        let expect = lever_arm_by_line_intersection(base, angle, s);
        worst = worst.max((g.lever_arm(s).unwrap() - expect).abs());
    }

    let mut disagreements = 0;
    for _ in 0..1000 {
        let len_v = rng.range(40.0, 140.0);
        let len_s = rng.range(40.0, 140.0);
        let wb_v = rng.range(2.0, 18.0);
        let wt_v = rng.range(1.0, wb_v);
        let wb_s = rng.range(2.0, 24.0);
        let wt_s = rng.range(1.0, wb_s);
        let base = rng.range(8.0, 60.0);
        let angle = rng.range(0.0, 18.0);
        let v = FingerProfile::new(len_v, wb_v, wt_v, 3.0, 1.0, 5.0, 4.0, 2.0).unwrap();
        let s = FingerProfile::new(len_s, wb_s, wt_s, 3.0, 1.0, 5.0, 4.0, 2.0).unwrap();
        let g = GripperConfig::v_pair_plus_single(v, s, angle, base, 100.0, 15.0).unwrap();
        if g.interdigitation_check().unwrap() != interdigitation_by_polygon_overlap(&g) {
            disagreements += 1;
        }
    }
    verdict(
        "C9 (geometry oracles)",
        worst <= 1e-9 && disagreements == 0,
        &format!("lever arm worst error {worst:.2e} mm; interdigitation disagreements {disagreements}/1000"),
    );
}

/// Two identical CLI runs produce byte-identical machine reports.
#[test]
fn criterion_10_determinism() {
    let bin = env!("CARGO_BIN_EXE_getgrasp");
    let scenario_path = example_suite_path();
    let mut outputs = Vec::new();
    for run in 0..2 {
        let out = std::env::temp_dir().join(format!("getgrasp-accept-{run}-{}", std::process::id()));
        let _ = std::fs::remove_dir_all(&out);
        let status = std::process::Command::new(bin)
            .arg("analyze")
            .arg(&scenario_path)
            .arg("--out")
            .arg(&out)
            .status()
            .expect("binary runs");
        assert!(status.success(), "analyze run {run} failed");
        outputs.push(std::fs::read(out.join("report.jsonl")).expect("report written"));
        let _ = std::fs::remove_dir_all(&out);
    }
    let identical = outputs[0] == outputs[1];
    verdict(
        "C10 (determinism)",
        identical && !outputs[0].is_empty(),
        &format!("report.jsonl {} bytes, byte-identical: {identical}", outputs[0].len()),
    );
}

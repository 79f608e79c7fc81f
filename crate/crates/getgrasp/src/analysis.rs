//! Batch scenario runner: gripper-vs-object evaluations, secure-grasp
//! tallies and envelope dominance statistics. Rows are deterministic
//! functions of their inputs; failures become explicit rows and never abort
//! a batch.

use nalgebra::Vector3;
use serde::Serialize;

use crate::contact::{close_jaws, ContactConfig, ContactSet};
use crate::error::{GraspError, Result};
use crate::geometry::{Arrangement, GripperConfig};
use crate::shape::{ObjectModel, ShapePrimitive};
use crate::wrench::{
    epsilon_quality, force_closure, grasp_matrix, secure_grasp_check, torque_envelope,
};

/// Where to grasp: resolved automatically from the object size or pinned.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SiteSpec {
    Auto,
    At(f64),
}

/// One analysis case: a gripper closing on an object.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub gripper_name: String,
    pub gripper: GripperConfig,
    pub object_name: String,
    pub object: ObjectModel,
    pub site: SiteSpec,
    /// Override of the gripper's actuation budget, N.
    pub f_max: Option<f64>,
    /// Override of the secure-grasp disturbance threshold, N.
    pub threshold: Option<f64>,
}

/// Batch-level knobs shared by every row.
#[derive(Debug, Clone)]
pub struct AnalysisConfig {
    pub gel_stiffness: f64,
    pub cone_edges: usize,
    pub secure_threshold: f64,
    /// Gravity direction (normalized internally).
    pub gravity: Vector3<f64>,
    pub flatten_threshold: f64,
    pub grid_nx: usize,
    pub grid_ny: usize,
    /// Number of jittered poses per scenario for the secure-fraction sweep.
    pub pose_jitter: usize,
    pub jitter_pos_mm: f64,
    pub jitter_rot_deg: f64,
    pub seed: u64,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            gel_stiffness: 0.15,
            cone_edges: 8,
            secure_threshold: 3.0,
            gravity: Vector3::new(0.0, -1.0, 0.0),
            flatten_threshold: 1.0,
            grid_nx: 48,
            grid_ny: 16,
            pose_jitter: 0,
            jitter_pos_mm: 1.0,
            jitter_rot_deg: 2.0,
            seed: 42,
        }
    }
}

impl AnalysisConfig {
    pub fn contact_config(&self) -> ContactConfig {
        ContactConfig {
            gel_stiffness: self.gel_stiffness,
            grid_nx: self.grid_nx,
            grid_ny: self.grid_ny,
            flatten_threshold: self.flatten_threshold,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ContactSummary {
    pub finger: usize,
    pub jaw: &'static str,
    pub kind: &'static str,
    pub position: [f64; 3],
    pub normal: [f64; 3],
    pub normal_force: f64,
    pub torsional_radius: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct EnvelopeSummary {
    /// N*mm
    pub tau_x: f64,
    pub tau_y: f64,
    pub tau_z: f64,
    /// N, minimum over the 26-direction force sample.
    pub f_min: f64,
}

/// One report row: the full input echo plus every computed quantity, or the
/// failure that stopped the pipeline.
#[derive(Debug, Clone, Serialize)]
pub struct ReportRow {
    pub scenario: String,
    pub gripper: String,
    pub object: String,
    pub status: String,
    pub site: Option<f64>,
    pub f_max: f64,
    pub threshold: f64,
    pub mu: f64,
    pub mass_kg: f64,
    pub contacts: Vec<ContactSummary>,
    pub force_closure: Option<bool>,
    pub epsilon: Option<f64>,
    pub envelope: Option<EnvelopeSummary>,
    pub weight_hold: Option<bool>,
    pub min_force_resist: Option<f64>,
    pub secure: Option<bool>,
    pub jitter_secure_fraction: Option<f64>,
    /// Length used to normalize torques for the quality metric, mm.
    pub torque_scale_mm: f64,
    pub scenario_hash: String,
}

impl ReportRow {
    pub fn ok(&self) -> bool {
        self.status == "ok"
    }

    fn failed(s: &Scenario, cfg: &AnalysisConfig, err: &GraspError) -> Self {
        Self {
            scenario: s.name.clone(),
            gripper: s.gripper_name.clone(),
            object: s.object_name.clone(),
            status: err.to_string(),
            site: None,
            f_max: s.f_max.unwrap_or(s.gripper.f_max),
            threshold: s.threshold.unwrap_or(cfg.secure_threshold),
            mu: s.object.mu,
            mass_kg: s.object.mass_kg,
            contacts: Vec::new(),
            force_closure: None,
            epsilon: None,
            envelope: None,
            weight_hold: None,
            min_force_resist: None,
            secure: None,
            jitter_secure_fraction: None,
            torque_scale_mm: s.gripper.max_finger_length(),
            scenario_hash: scenario_hash(s, cfg),
        }
    }
}

/// FNV-1a hash of the fully resolved scenario inputs, for row provenance.
pub fn scenario_hash(s: &Scenario, cfg: &AnalysisConfig) -> String {
    let canonical = format!(
        "{:?}|{:?}|{:?}|{:?}|{:?}|{:?}|{:?}|{:?}|{:?}",
        s.gripper,
        s.object,
        s.site,
        s.f_max,
        s.threshold,
        cfg.gel_stiffness,
        cfg.cone_edges,
        cfg.secure_threshold,
        (cfg.gravity.x, cfg.gravity.y, cfg.gravity.z),
    );
    let mut h: u64 = 0xcbf29ce484222325;
    for b in canonical.as_bytes() {
        h ^= *b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    format!("{h:016x}")
}

/// Resolve the grasp site for a scenario: explicit sites pass through, auto
/// sites match the object's lateral extent on converging grippers and grasp
/// mid-finger on flat pairs.
pub fn resolve_site(gripper: &GripperConfig, object: &ObjectModel, site: SiteSpec) -> Result<f64> {
    match site {
        SiteSpec::At(s) => Ok(s),
        SiteSpec::Auto => match gripper.arrangement {
            Arrangement::VPairPlusSingle => gripper.grasp_site_for_size(object.y_extent()),
            Arrangement::FlatPair => Ok(gripper.fingers[0].length / 2.0),
        },
    }
}

fn contact_summaries(set: &ContactSet) -> Vec<ContactSummary> {
    set.contacts
        .iter()
        .map(|c| ContactSummary {
            finger: c.finger,
            jaw: if c.jaw_sign > 0.0 { "upper" } else { "lower" },
            kind: c.kind.label(),
            position: [c.position.x, c.position.y, c.position.z],
            normal: [c.normal.x, c.normal.y, c.normal.z],
            normal_force: c.normal_force,
            torsional_radius: c.torsional_radius,
        })
        .collect()
}

/// Run one scenario end to end. Domain failures are captured in the row's
/// status; only internal errors (unbounded LPs) propagate.
pub fn run_scenario(s: &Scenario, cfg: &AnalysisConfig) -> ReportRow {
    match run_scenario_inner(s, cfg) {
        Ok(row) => row,
        Err(e) => ReportRow::failed(s, cfg, &e),
    }
}

fn run_scenario_inner(s: &Scenario, cfg: &AnalysisConfig) -> Result<ReportRow> {
    let f_max = s.f_max.unwrap_or(s.gripper.f_max);
    let threshold = s.threshold.unwrap_or(cfg.secure_threshold);
    let mut gripper = s.gripper.clone();
    gripper.f_max = f_max;
    gripper.validate()?;

    let site = resolve_site(&gripper, &s.object, s.site)?;
    let ccfg = cfg.contact_config();
    let set = close_jaws(&gripper, &s.object, site, &ccfg)?;
    let char_length = gripper.max_finger_length();
    let gens = grasp_matrix(&set, s.object.mu, cfg.cone_edges, char_length)?;

    let closure = force_closure(&gens)?;
    let epsilon = epsilon_quality(&gens)?;
    let envelope = torque_envelope(&gens, f_max, &s.object.center(), threshold)?;
    let verdict = secure_grasp_check(&gens, &s.object, f_max, threshold, &cfg.gravity)?;

    let jitter_secure_fraction = if cfg.pose_jitter > 0 {
        Some(jitter_sweep(s, cfg, &gripper, site, threshold, f_max)?)
    } else {
        None
    };

    Ok(ReportRow {
        scenario: s.name.clone(),
        gripper: s.gripper_name.clone(),
        object: s.object_name.clone(),
        status: "ok".into(),
        site: Some(site),
        f_max,
        threshold,
        mu: s.object.mu,
        mass_kg: s.object.mass_kg,
        contacts: contact_summaries(&set),
        force_closure: Some(closure),
        epsilon: Some(epsilon),
        envelope: Some(EnvelopeSummary {
            tau_x: envelope.tau_x_max,
            tau_y: envelope.tau_y_max,
            tau_z: envelope.tau_z_max,
            f_min: envelope.f_min,
        }),
        weight_hold: Some(verdict.weight_hold),
        min_force_resist: Some(verdict.min_force_resist),
        secure: Some(verdict.secure),
        jitter_secure_fraction,
        torque_scale_mm: char_length,
        scenario_hash: scenario_hash(s, cfg),
    })
}

/// Deterministic xorshift-style generator for pose jitter.
pub struct SplitMix64(pub u64);

impl SplitMix64 {
    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// Uniform in [-1, 1).
    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
    }
}

fn jitter_sweep(
    s: &Scenario,
    cfg: &AnalysisConfig,
    gripper: &GripperConfig,
    site: f64,
    threshold: f64,
    f_max: f64,
) -> Result<f64> {
    let mut rng = SplitMix64(cfg.seed ^ fnv_str(&s.name));
    let mut secure_count = 0usize;
    for _ in 0..cfg.pose_jitter {
        let mut obj = s.object.clone();
        let dy = rng.unit() * cfg.jitter_pos_mm;
        let dz = rng.unit() * cfg.jitter_pos_mm;
        let dr = rng.unit() * cfg.jitter_rot_deg;
        obj.pose.position[1] += dy;
        obj.pose.position[2] += dz;
        if matches!(obj.shape, ShapePrimitive::Cuboid { .. } | ShapePrimitive::ConvexPrism { .. }) {
            obj.pose.rot_x_deg += dr;
        }
        let outcome = close_jaws(gripper, &obj, site, &cfg.contact_config())
            .and_then(|set| grasp_matrix(&set, obj.mu, cfg.cone_edges, gripper.max_finger_length()))
            .and_then(|gens| secure_grasp_check(&gens, &obj, f_max, threshold, &cfg.gravity));
        if let Ok(v) = outcome {
            if v.secure {
                secure_count += 1;
            }
        }
    }
    Ok(secure_count as f64 / cfg.pose_jitter as f64)
}

fn fnv_str(s: &str) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for b in s.as_bytes() {
        h ^= *b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

/// Pairwise envelope dominance between two grippers.
#[derive(Debug, Clone, Serialize)]
pub struct DominanceEntry {
    pub gripper_a: String,
    pub gripper_b: String,
    /// Fraction of compared scenarios where A's envelope dominates B's in
    /// every component (ties count as dominance).
    pub fraction: f64,
    pub compared: usize,
    pub excluded: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct SecureFraction {
    pub gripper: String,
    pub fraction: f64,
    pub rows: usize,
}

/// Cross-product comparison of grippers over a scenario suite.
#[derive(Debug, Clone, Serialize)]
pub struct ComparisonReport {
    pub rows: Vec<ReportRow>,
    pub secure_fractions: Vec<SecureFraction>,
    pub dominance: Vec<DominanceEntry>,
}

fn component_dominates(a: f64, b: f64) -> bool {
    a >= b - (1e-9 + 1e-6 * b.abs())
}

fn envelope_dominates(a: &EnvelopeSummary, b: &EnvelopeSummary) -> bool {
    component_dominates(a.tau_x, b.tau_x)
        && component_dominates(a.tau_y, b.tau_y)
        && component_dominates(a.tau_z, b.tau_z)
        && component_dominates(a.f_min, b.f_min)
}

/// Evaluate every scenario with every gripper and report secure-grasp
/// fractions plus pairwise envelope dominance. Failed rows are recorded and
/// excluded from dominance comparisons.
pub fn compare_grippers(
    scenarios: &[Scenario],
    grippers: &[(String, GripperConfig)],
    cfg: &AnalysisConfig,
) -> Result<ComparisonReport> {
    if scenarios.is_empty() || grippers.is_empty() {
        return Err(GraspError::InvalidConfig(
            "comparison needs at least one scenario and one gripper".into(),
        ));
    }
    let mut rows = Vec::new();
    for s in scenarios {
        for (gname, g) in grippers {
            let mut cloned = s.clone();
            cloned.gripper_name = gname.clone();
            cloned.gripper = g.clone();
            cloned.name = format!("{}+{}", s.name, gname);
            rows.push(run_scenario(&cloned, cfg));
        }
    }
    let per = grippers.len();
    let mut secure_fractions = Vec::new();
    for (gi, (gname, _)) in grippers.iter().enumerate() {
        let grows: Vec<&ReportRow> = rows.iter().skip(gi).step_by(per).collect();
        let secure = grows.iter().filter(|r| r.secure == Some(true)).count();
        secure_fractions.push(SecureFraction {
            gripper: gname.clone(),
            fraction: secure as f64 / grows.len() as f64,
            rows: grows.len(),
        });
    }
    let mut dominance = Vec::new();
    for (ai, (aname, _)) in grippers.iter().enumerate() {
        for (bi, (bname, _)) in grippers.iter().enumerate() {
            let mut compared = 0usize;
            let mut dominated = 0usize;
            let mut excluded = 0usize;
            for si in 0..scenarios.len() {
                let ra = &rows[si * per + ai];
                let rb = &rows[si * per + bi];
                match (&ra.envelope, &rb.envelope) {
                    (Some(ea), Some(eb)) => {
                        compared += 1;
                        if envelope_dominates(ea, eb) {
                            dominated += 1;
                        }
                    }
                    _ => excluded += 1,
                }
            }
            dominance.push(DominanceEntry {
                gripper_a: aname.clone(),
                gripper_b: bname.clone(),
                fraction: if compared > 0 { dominated as f64 / compared as f64 } else { 0.0 },
                compared,
                excluded,
            });
        }
    }
    Ok(ComparisonReport { rows, secure_fractions, dominance })
}

/// Convenience constructor for tests and sweeps.
pub fn scenario(
    name: &str,
    gripper_name: &str,
    gripper: GripperConfig,
    object_name: &str,
    object: ObjectModel,
    site: SiteSpec,
) -> Scenario {
    Scenario {
        name: name.into(),
        gripper_name: gripper_name.into(),
        gripper,
        object_name: object_name.into(),
        object,
        site,
        f_max: None,
        threshold: None,
    }
}

//! Wrench-space grasp analysis: friction-cone generators, force closure,
//! LP-based maximum resistible disturbances, and the inscribed-ball quality
//! metric.
//!
//! Contact forces are modeled by discretized Coulomb cones. A patch contact
//! additionally redistributes its normal pressure and friction within the
//! patch footprint (generators are emitted at the patch center and extreme
//! points) and carries torsional friction about its normal with capacity
//! `mu * torsional_radius` per Newton of normal force. The central modeling
//! rule: a 1-DoF actuator cannot push harder than its budget, so every
//! contact's total normal force is capped at its equilibrium allocation and
//! disturbances may only redistribute within those caps.

pub mod simplex;

use nalgebra::{Vector3, Vector6};

use crate::contact::{ContactKind, ContactSet};
use crate::error::{GraspError, Result};
use crate::shape::{ObjectModel, G_ACCEL};
use simplex::{Constraint, Lp, LpOutcome, Relation};

/// Generators spanning one contact's admissible wrench set, all normalized
/// to one Newton of contact normal force.
#[derive(Debug, Clone)]
pub struct ContactGenerators {
    /// Normal-force cap from the equilibrium allocation, N.
    pub cap: f64,
    /// Friction-cone edge wrenches at the contact's representative points.
    pub cone: Vec<Vector6<f64>>,
    /// Torsional generators (pure torque about the contact normal) and the
    /// spin capacity in N*mm per Newton of normal force.
    pub torsion: Option<(Vector6<f64>, Vector6<f64>, f64)>,
}

/// Wrench generators for a whole contact set.
#[derive(Debug, Clone)]
pub struct WrenchGenerators {
    pub contacts: Vec<ContactGenerators>,
    pub cone_edges: usize,
    /// Torque normalization length, mm (finger length).
    pub char_length: f64,
    /// Squeeze the caps were allocated at, N.
    pub allocated_at: f64,
}

impl WrenchGenerators {
    pub fn total_generators(&self) -> usize {
        self.contacts
            .iter()
            .map(|c| c.cone.len() + if c.torsion.is_some() { 2 } else { 0 })
            .sum()
    }

    fn total_cap(&self) -> f64 {
        self.contacts.iter().map(|c| c.cap).sum()
    }
}

/// Build the contact wrench generators in the grasp frame.
///
/// Point contacts emit one cone of `cone_edges` generators; line and patch
/// contacts emit cones at their center and extreme points so the LP can
/// redistribute pressure across the footprint; patches additionally carry
/// the two torsional generators.
pub fn grasp_matrix(set: &ContactSet, mu: f64, cone_edges: usize, char_length: f64) -> Result<WrenchGenerators> {
    if set.contacts.is_empty() {
        return Err(GraspError::EmptyContactSet);
    }
    if cone_edges < 3 {
        return Err(GraspError::InvalidConfig(format!(
            "friction cone needs at least 3 edges, got {cone_edges}"
        )));
    }
    if mu < 0.0 {
        return Err(GraspError::InvalidConfig("mu must be non-negative".into()));
    }
    let mut contacts = Vec::with_capacity(set.contacts.len());
    for c in &set.contacts {
        let n = c.normal.into_inner();
        let tu = c.tangent_u.into_inner();
        let tv = c.tangent_v.into_inner();
        let offsets: Vec<Vector3<f64>> = match &c.kind {
            ContactKind::Point => vec![Vector3::zeros()],
            ContactKind::Line { half_length, dir } => {
                let d = dir.into_inner();
                vec![Vector3::zeros(), d * *half_length, -d * *half_length]
            }
            ContactKind::Patch { half_u, half_v } => vec![
                Vector3::zeros(),
                tu * *half_u,
                -tu * *half_u,
                tv * *half_v,
                -tv * *half_v,
            ],
        };
        let mut cone = Vec::new();
        for off in &offsets {
            let p = c.position + off;
            if mu == 0.0 {
                cone.push(crate::contact::wrench_of(p, n));
            } else {
                for k in 0..cone_edges {
                    let phi = 2.0 * std::f64::consts::PI * k as f64 / cone_edges as f64;
                    let dir = n + (tu * phi.cos() + tv * phi.sin()) * mu;
                    cone.push(crate::contact::wrench_of(p, dir));
                }
            }
        }
        let torsion = match c.kind {
            ContactKind::Patch { .. } if mu > 0.0 && c.torsional_radius > 0.0 => {
                let plus = Vector6::new(0.0, 0.0, 0.0, n.x, n.y, n.z);
                Some((plus, -plus, mu * c.torsional_radius))
            }
            _ => None,
        };
        contacts.push(ContactGenerators { cap: c.normal_force, cone, torsion });
    }
    Ok(WrenchGenerators {
        contacts,
        cone_edges,
        char_length,
        allocated_at: set.actuation_force,
    })
}

fn scale_rows(w: &Vector6<f64>, char_length: f64) -> Vector6<f64> {
    let mut v = *w;
    for i in 3..6 {
        v[i] /= char_length;
    }
    v
}

/// Maximum magnitude `alpha` of a disturbance wrench along `direction` that
/// the grasp resists: a nonnegative combination of contact generators must
/// balance `alpha * direction` plus the `standing` wrench, with each
/// contact's normal force capped at its share of `f_max`.
///
/// Returns 0 when even the standing wrench cannot be held. `direction` need
/// not be normalized; `alpha` scales whatever wrench is passed.
pub fn max_disturbance_with_load(
    gens: &WrenchGenerators,
    direction: &Vector6<f64>,
    f_max: f64,
    standing: &Vector6<f64>,
) -> Result<f64> {
    if direction.norm() == 0.0 {
        return Err(GraspError::InvalidConfig("disturbance direction must be nonzero".into()));
    }
    if f_max < 0.0 {
        return Err(GraspError::OutOfRange {
            what: "f_max",
            value: f_max,
            min: 0.0,
            max: f64::INFINITY,
        });
    }
    let cap_scale = if gens.allocated_at > 0.0 { f_max / gens.allocated_at } else { 0.0 };

    // Column layout: all cone multipliers, then torsion pairs, then alpha.
    let mut cols: Vec<Vector6<f64>> = Vec::new();
    let mut cone_ranges = Vec::new();
    let mut torsion_cols = Vec::new();
    for c in &gens.contacts {
        let start = cols.len();
        for g in &c.cone {
            cols.push(scale_rows(g, gens.char_length));
        }
        cone_ranges.push((start, cols.len()));
        if let Some((plus, minus, _)) = &c.torsion {
            torsion_cols.push(cols.len());
            cols.push(scale_rows(plus, gens.char_length));
            cols.push(scale_rows(minus, gens.char_length));
        } else {
            torsion_cols.push(usize::MAX);
        }
    }
    let alpha_col = cols.len();
    cols.push(scale_rows(direction, gens.char_length));
    let nvars = cols.len();
    let rhs = -scale_rows(standing, gens.char_length);

    let mut constraints = Vec::new();
    for row in 0..6 {
        let coeffs: Vec<f64> = cols.iter().map(|c| c[row]).collect();
        constraints.push(Constraint { coeffs, relation: Relation::Eq, rhs: rhs[row] });
    }
    for (i, c) in gens.contacts.iter().enumerate() {
        let mut coeffs = vec![0.0; nvars];
        let (s, e) = cone_ranges[i];
        for j in s..e {
            coeffs[j] = 1.0;
        }
        constraints.push(Constraint {
            coeffs,
            relation: Relation::Le,
            rhs: c.cap * cap_scale,
        });
        if let Some((_, _, spin_per_newton)) = &c.torsion {
            let tc = torsion_cols[i];
            let mut coeffs = vec![0.0; nvars];
            coeffs[tc] = 1.0;
            coeffs[tc + 1] = 1.0;
            for j in s..e {
                coeffs[j] = -spin_per_newton;
            }
            constraints.push(Constraint { coeffs, relation: Relation::Le, rhs: 0.0 });
        }
    }
    let mut objective = vec![0.0; nvars];
    objective[alpha_col] = 1.0;

    match simplex::solve(&Lp { objective, constraints }) {
        LpOutcome::Optimal { x, .. } => Ok(x[alpha_col].max(0.0)),
        LpOutcome::Infeasible => Ok(0.0),
        LpOutcome::Unbounded => Err(GraspError::LpUnbounded(
            "disturbance LP unbounded; generators cannot span a finite budget".into(),
        )),
        LpOutcome::Stalled => Err(GraspError::LpUnbounded("disturbance LP stalled".into())),
    }
}

/// [`max_disturbance_with_load`] with no standing wrench.
pub fn max_disturbance(gens: &WrenchGenerators, direction: &Vector6<f64>, f_max: f64) -> Result<f64> {
    max_disturbance_with_load(gens, direction, f_max, &Vector6::zeros())
}

/// Strict 6D force closure: the origin lies strictly inside the generators'
/// wrench set, certified by resisting all twelve signed basis directions.
/// The reachable set under the caps is convex, so positive resistance along
/// every signed axis surrounds the origin.
pub fn force_closure(gens: &WrenchGenerators) -> Result<bool> {
    let total = gens.total_cap();
    if total <= 0.0 {
        return Ok(false);
    }
    let f_ref = gens.allocated_at.max(1e-12);
    for axis in 0..6 {
        for sign in [1.0, -1.0] {
            let mut d = Vector6::zeros();
            d[axis] = sign * if axis < 3 { 1.0 } else { gens.char_length };
            let alpha = max_disturbance(gens, &d, f_ref)?;
            if alpha <= 1e-9 * f_ref {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Per-axis maximum resistible torques plus sampled pure-force resistance.
#[derive(Debug, Clone)]
pub struct DisturbanceEnvelope {
    /// Worst-case resistible torque about each axis, N*mm (min over signs).
    pub tau_x_max: f64,
    pub tau_y_max: f64,
    pub tau_z_max: f64,
    /// Resistible force magnitude per sampled direction, N.
    pub force_dirs: Vec<(Vector3<f64>, f64)>,
    /// Minimum over the sampled force directions, N.
    pub f_min: f64,
    /// Whether `f_min` clears the secure-grasp threshold.
    pub secure: bool,
}

impl DisturbanceEnvelope {
    /// Resistible force magnitude along the sampled direction closest to
    /// `dir`, N.
    pub fn f_max_dir(&self, dir: &Vector3<f64>) -> Option<f64> {
        let d = dir.normalize();
        self.force_dirs
            .iter()
            .max_by(|a, b| a.0.dot(&d).partial_cmp(&b.0.dot(&d)).unwrap())
            .map(|(_, alpha)| *alpha)
    }
}

/// The 26 face, edge and corner directions of a cube, normalized.
pub fn force_direction_sample() -> Vec<Vector3<f64>> {
    let mut dirs = Vec::with_capacity(26);
    for ix in -1i32..=1 {
        for iy in -1i32..=1 {
            for iz in -1i32..=1 {
                if ix == 0 && iy == 0 && iz == 0 {
                    continue;
                }
                dirs.push(Vector3::new(ix as f64, iy as f64, iz as f64).normalize());
            }
        }
    }
    dirs
}

/// Evaluate the disturbance envelope: the six signed pure torques about the
/// grasp origin and the 26-direction force sample applied at
/// `application_point`, all without a standing load.
pub fn torque_envelope(
    gens: &WrenchGenerators,
    f_max: f64,
    application_point: &Vector3<f64>,
    threshold: f64,
) -> Result<DisturbanceEnvelope> {
    torque_envelope_with_dirs(gens, f_max, application_point, threshold, &force_direction_sample())
}

/// [`torque_envelope`] over a caller-supplied force direction sample.
pub fn torque_envelope_with_dirs(
    gens: &WrenchGenerators,
    f_max: f64,
    application_point: &Vector3<f64>,
    threshold: f64,
    dirs: &[Vector3<f64>],
) -> Result<DisturbanceEnvelope> {
    let mut tau = [0.0; 3];
    for (i, t) in tau.iter_mut().enumerate() {
        let mut best = f64::INFINITY;
        for sign in [1.0, -1.0] {
            let mut d = Vector6::zeros();
            d[3 + i] = sign;
            best = best.min(max_disturbance(gens, &d, f_max)?);
        }
        *t = best;
    }
    let mut force_dirs = Vec::new();
    let mut f_min = f64::INFINITY;
    for dir in dirs {
        let torque = application_point.cross(dir);
        let w = Vector6::new(dir.x, dir.y, dir.z, torque.x, torque.y, torque.z);
        let alpha = max_disturbance(gens, &w, f_max)?;
        f_min = f_min.min(alpha);
        force_dirs.push((*dir, alpha));
    }
    Ok(DisturbanceEnvelope {
        tau_x_max: tau[0],
        tau_y_max: tau[1],
        tau_z_max: tau[2],
        force_dirs,
        f_min,
        secure: f_min >= threshold,
    })
}

/// Secure-grasp verdict for an object held against gravity.
#[derive(Debug, Clone, Copy)]
pub struct SecureVerdict {
    /// The grasp statically holds the object's weight.
    pub weight_hold: bool,
    /// Minimum resistible extra force disturbance with the weight standing, N.
    pub min_force_resist: f64,
    /// `weight_hold` and `min_force_resist >= threshold`.
    pub secure: bool,
}

/// A grasp is secure when it holds the object's weight and additionally
/// resists a force disturbance of at least `threshold` Newtons applied at
/// the object centroid from any of the sampled directions.
pub fn secure_grasp_check(
    gens: &WrenchGenerators,
    object: &ObjectModel,
    f_max: f64,
    threshold: f64,
    gravity_dir: &Vector3<f64>,
) -> Result<SecureVerdict> {
    let com = object.center();
    let weight = object.mass_kg * G_ACCEL;
    let g_force = gravity_dir.normalize() * weight;
    let g_torque = com.cross(&g_force);
    let standing = Vector6::new(
        g_force.x, g_force.y, g_force.z, g_torque.x, g_torque.y, g_torque.z,
    );

    // Weight hold: some admissible contact combination balances gravity.
    // Probing along gravity suffices: any feasible point of that LP holds
    // the standing wrench.
    let probe = {
        let d = if weight > 0.0 { g_force / weight } else { Vector3::z() };
        let t = com.cross(&d);
        Vector6::new(d.x, d.y, d.z, t.x, t.y, t.z)
    };
    let weight_hold = if weight == 0.0 {
        true
    } else {
        max_disturbance_with_load(gens, &probe, f_max, &standing)? > 0.0
            || holds_exactly(gens, f_max, &standing)?
    };

    let mut min_force = f64::INFINITY;
    for dir in force_direction_sample() {
        let torque = com.cross(&dir);
        let w = Vector6::new(dir.x, dir.y, dir.z, torque.x, torque.y, torque.z);
        let alpha = max_disturbance_with_load(gens, &w, f_max, &standing)?;
        min_force = min_force.min(alpha);
        if min_force == 0.0 {
            break;
        }
    }
    Ok(SecureVerdict {
        weight_hold,
        min_force_resist: min_force,
        secure: weight_hold && min_force >= threshold,
    })
}

fn holds_exactly(gens: &WrenchGenerators, f_max: f64, standing: &Vector6<f64>) -> Result<bool> {
    // Feasibility at alpha = 0 for a degenerate direction probe: reuse the
    // disturbance LP with an axis direction; zero is a valid (held) outcome
    // only if the LP is feasible at all.
    let d = Vector6::new(0.0, 0.0, 1.0, 0.0, 0.0, 0.0);
    let alpha = max_disturbance_with_load(gens, &d, f_max, standing)?;
    if alpha > 0.0 {
        return Ok(true);
    }
    // alpha == 0 is ambiguous between "infeasible" and "feasible but cannot
    // resist more"; disambiguate with the opposite sign.
    let alpha_neg = max_disturbance_with_load(gens, &(-d), f_max, standing)?;
    Ok(alpha > 0.0 || alpha_neg > 0.0)
}

/// Radius of the largest origin-centered ball (torques scaled by the
/// characteristic length) inscribed in the convex hull of the per-Newton
/// generator wrenches. Zero for grasps without force closure.
///
/// Computed through the polar body: `1 / epsilon` is the farthest vertex of
/// `{ y : g . y <= 1 }` from the origin, found by iterated support LPs from
/// a deterministic set of starts. Exact on small generator sets; a tight
/// upper bound on large ones.
pub fn epsilon_quality(gens: &WrenchGenerators) -> Result<f64> {
    if !force_closure(gens)? {
        return Ok(0.0);
    }
    let points = normalized_generator_points(gens);
    if points.len() <= 20 {
        // Small sets: enumerate the polar body's vertices exactly. Each
        // vertex solves six active rows `p . y = 1`; the farthest feasible
        // one is the reciprocal of the inscribed radius.
        return Ok(epsilon_by_polar_vertices(&points));
    }
    // Candidate directions ranked by support: the inscribed radius is the
    // smallest support over the sphere, so the shallow directions are where
    // the polar body reaches farthest.
    let mut candidates: Vec<Vector6<f64>> = Vec::new();
    for axis in 0..6 {
        for sign in [1.0, -1.0] {
            let mut v = Vector6::zeros();
            v[axis] = sign;
            candidates.push(v);
        }
    }
    let mut rng = 0x5eed_cafe_d00d_f00du64;
    for _ in 0..80 {
        let mut v = Vector6::zeros();
        for i in 0..6 {
            v[i] = splitmix_unit(&mut rng);
        }
        if v.norm() > 1e-9 {
            candidates.push(v.normalize());
        }
    }
    let support = |u: &Vector6<f64>| points.iter().map(|p| p.dot(u)).fold(f64::NEG_INFINITY, f64::max);
    let mut ranked: Vec<(f64, Vector6<f64>)> =
        candidates.into_iter().map(|u| (support(&u), u)).collect();
    ranked.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let starts: Vec<Vector6<f64>> = ranked.into_iter().take(20).map(|(_, u)| u).collect();
    let mut best = 0.0_f64;
    for start in starts {
        let mut dir = start;
        let mut last = 0.0;
        for _ in 0..12 {
            let Some(y) = polar_support(&points, &dir) else {
                break;
            };
            let norm = y.norm();
            if norm <= last + 1e-12 {
                break;
            }
            last = norm;
            dir = y / norm;
        }
        best = best.max(last);
    }
    if best <= 0.0 {
        return Ok(0.0);
    }
    Ok(1.0 / best)
}

fn epsilon_by_polar_vertices(points: &[Vector6<f64>]) -> f64 {
    let mut best_norm: f64 = 0.0;
    let mut idx = [0usize; 6];
    enumerate_vertices(points, &mut idx, 0, 0, &mut best_norm);
    if best_norm > 0.0 {
        1.0 / best_norm
    } else {
        0.0
    }
}

fn enumerate_vertices(
    points: &[Vector6<f64>],
    idx: &mut [usize; 6],
    depth: usize,
    start: usize,
    best_norm: &mut f64,
) {
    if depth == 6 {
        let mut a = [[0.0f64; 6]; 6];
        let mut b = [1.0f64; 6];
        for (r, &i) in idx.iter().enumerate() {
            for c in 0..6 {
                a[r][c] = points[i][c];
            }
        }
        if let Some(y) = solve6(&mut a, &mut b) {
            let feasible = points
                .iter()
                .all(|p| (0..6).map(|k| p[k] * y[k]).sum::<f64>() <= 1.0 + 1e-9);
            if feasible {
                let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
                *best_norm = best_norm.max(norm);
            }
        }
        return;
    }
    for i in start..points.len() {
        idx[depth] = i;
        enumerate_vertices(points, idx, depth + 1, i + 1, best_norm);
    }
}

fn solve6(a: &mut [[f64; 6]; 6], b: &mut [f64; 6]) -> Option<[f64; 6]> {
    for col in 0..6 {
        let pivot = (col..6).max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())?;
        if a[pivot][col].abs() < 1e-10 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in (col + 1)..6 {
            let f = a[row][col] / a[col][col];
            for k in col..6 {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut y = [0.0f64; 6];
    for row in (0..6).rev() {
        let mut acc = b[row];
        for k in (row + 1)..6 {
            acc -= a[row][k] * y[k];
        }
        y[row] = acc / a[row][row];
    }
    Some(y)
}

fn splitmix_unit(state: &mut u64) -> f64 {
    *state = state.wrapping_add(0x9e3779b97f4a7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^= z >> 31;
    (z >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
}

/// All generator wrenches at one Newton of normal force, torques normalized.
pub fn normalized_generator_points(gens: &WrenchGenerators) -> Vec<Vector6<f64>> {
    let mut points = Vec::new();
    for c in &gens.contacts {
        for g in &c.cone {
            points.push(scale_rows(g, gens.char_length));
        }
        if let Some((plus, minus, spin)) = &c.torsion {
            points.push(scale_rows(&(plus * *spin), gens.char_length));
            points.push(scale_rows(&(minus * *spin), gens.char_length));
        }
    }
    points
}

/// Support LP over the polar body `{ y : p . y <= 1 for all points p }`.
fn polar_support(points: &[Vector6<f64>], dir: &Vector6<f64>) -> Option<Vector6<f64>> {
    // Free y split into positive and negative parts.
    let nvars = 12;
    let mut objective = vec![0.0; nvars];
    for i in 0..6 {
        objective[i] = dir[i];
        objective[i + 6] = -dir[i];
    }
    let constraints: Vec<Constraint> = points
        .iter()
        .map(|p| {
            let mut coeffs = vec![0.0; nvars];
            for i in 0..6 {
                coeffs[i] = p[i];
                coeffs[i + 6] = -p[i];
            }
            Constraint { coeffs, relation: Relation::Le, rhs: 1.0 }
        })
        .collect();
    match simplex::solve(&Lp { objective, constraints }) {
        LpOutcome::Optimal { x, .. } => {
            let mut y = Vector6::zeros();
            for i in 0..6 {
                y[i] = x[i] - x[i + 6];
            }
            Some(y)
        }
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contact::{Contact, ContactKind, ContactSet};
    use nalgebra::Unit;

    fn point_contact(pos: Vector3<f64>, normal: Vector3<f64>, force: f64) -> Contact {
        let n = Unit::new_normalize(normal);
        let seed = if n.x.abs() < 0.9 { Vector3::x() } else { Vector3::y() };
        let tu = Unit::new_normalize(seed - n.into_inner() * seed.dot(&n));
        let tv = Unit::new_normalize(n.cross(&tu));
        Contact {
            position: pos,
            normal: n,
            tangent_u: tu,
            tangent_v: tv,
            kind: ContactKind::Point,
            normal_force: force,
            torsional_radius: 0.0,
            finger: 0,
            jaw_sign: 1.0,
        }
    }

    fn patch_contact(
        pos: Vector3<f64>,
        normal: Vector3<f64>,
        force: f64,
        half_u: f64,
        half_v: f64,
        r_t: f64,
    ) -> Contact {
        let mut c = point_contact(pos, normal, force);
        c.kind = ContactKind::Patch { half_u, half_v };
        c.torsional_radius = r_t;
        c
    }

    fn antipodal_points(force: f64) -> ContactSet {
        ContactSet {
            contacts: vec![
                point_contact(Vector3::new(0.0, 0.0, -10.0), Vector3::z(), force),
                point_contact(Vector3::new(0.0, 0.0, 10.0), -Vector3::z(), force),
            ],
            actuation_force: force,
            grasp_site_s: 50.0,
            residual_wrench: Vector6::zeros(),
        }
    }

    fn antipodal_patches(force: f64) -> ContactSet {
        ContactSet {
            contacts: vec![
                patch_contact(Vector3::new(0.0, 0.0, -10.0), Vector3::z(), force, 3.0, 3.0, 1.0),
                patch_contact(Vector3::new(0.0, 0.0, 10.0), -Vector3::z(), force, 3.0, 3.0, 1.0),
            ],
            actuation_force: force,
            grasp_site_s: 50.0,
            residual_wrench: Vector6::zeros(),
        }
    }

    #[test]
    fn frictionless_cone_degenerates_to_normal_ray() {
        let set = ContactSet {
            contacts: vec![point_contact(Vector3::zeros(), Vector3::z(), 1.0)],
            actuation_force: 1.0,
            grasp_site_s: 0.0,
            residual_wrench: Vector6::zeros(),
        };
        let gens = grasp_matrix(&set, 0.0, 4, 100.0).unwrap();
        assert_eq!(gens.total_generators(), 1);
        let g = gens.contacts[0].cone[0];
        assert!((g - Vector6::new(0.0, 0.0, 1.0, 0.0, 0.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn generator_torque_is_cross_product() {
        let set = ContactSet {
            contacts: vec![point_contact(Vector3::new(10.0, 0.0, 0.0), Vector3::z(), 1.0)],
            actuation_force: 1.0,
            grasp_site_s: 0.0,
            residual_wrench: Vector6::zeros(),
        };
        let gens = grasp_matrix(&set, 0.0, 4, 100.0).unwrap();
        let g = gens.contacts[0].cone[0];
        // r x f = (10,0,0) x (0,0,1) = (0,-10,0)
        assert!((g[3] - 0.0).abs() < 1e-12);
        assert!((g[4] - (-10.0)).abs() < 1e-12);
        assert!((g[5] - 0.0).abs() < 1e-12);
    }

    #[test]
    fn antipodal_point_contacts_never_close_in_6d() {
        for mu in [0.0, 0.5, 1.0] {
            let gens = grasp_matrix(&antipodal_points(15.0), mu, 8, 100.0).unwrap();
            assert!(!force_closure(&gens).unwrap(), "mu = {mu}");
        }
    }

    #[test]
    fn patch_upgrade_restores_closure() {
        let gens = grasp_matrix(&antipodal_patches(15.0), 0.3, 8, 100.0).unwrap();
        assert!(force_closure(&gens).unwrap());
    }

    #[test]
    fn spin_torque_unresisted_by_points_on_axis() {
        let gens = grasp_matrix(&antipodal_points(15.0), 0.8, 8, 100.0).unwrap();
        let d = Vector6::new(0.0, 0.0, 0.0, 0.0, 0.0, 1.0);
        let alpha = max_disturbance(&gens, &d, 15.0).unwrap();
        assert_eq!(alpha, 0.0);
    }

    #[test]
    fn doubling_mu_doubles_frictional_resistance() {
        // Four stud-style point contacts off the grasp axis: spin resistance
        // is purely frictional, so it scales exactly with mu.
        let set = ContactSet {
            contacts: vec![
                point_contact(Vector3::new(10.0, 0.0, -10.0), Vector3::z(), 7.5),
                point_contact(Vector3::new(-10.0, 0.0, -10.0), Vector3::z(), 7.5),
                point_contact(Vector3::new(10.0, 0.0, 10.0), -Vector3::z(), 7.5),
                point_contact(Vector3::new(-10.0, 0.0, 10.0), -Vector3::z(), 7.5),
            ],
            actuation_force: 15.0,
            grasp_site_s: 50.0,
            residual_wrench: Vector6::zeros(),
        };
        let d = Vector6::new(0.0, 0.0, 0.0, 0.0, 0.0, 1.0);
        let a1 = max_disturbance(&grasp_matrix(&set, 0.25, 8, 100.0).unwrap(), &d, 15.0).unwrap();
        let a2 = max_disturbance(&grasp_matrix(&set, 0.5, 8, 100.0).unwrap(), &d, 15.0).unwrap();
        assert!(a1 > 0.0);
        assert!((a2 / a1 - 2.0).abs() < 1e-6, "ratio {}", a2 / a1);
    }

    #[test]
    fn alpha_scales_linearly_with_budget() {
        let gens = grasp_matrix(&antipodal_patches(15.0), 0.5, 8, 100.0).unwrap();
        let d = Vector6::new(1.0, 1.0, 0.0, 20.0, 0.0, 5.0).normalize();
        let a1 = max_disturbance(&gens, &d, 15.0).unwrap();
        let a3 = max_disturbance(&gens, &d, 45.0).unwrap();
        assert!(a1 > 0.0);
        assert!((a3 - 3.0 * a1).abs() <= 1e-9 * a3.abs().max(1.0));
    }

    #[test]
    fn envelope_symmetric_grasp_symmetric_tau() {
        let gens = grasp_matrix(&antipodal_patches(15.0), 0.5, 8, 100.0).unwrap();
        let plus = max_disturbance(&gens, &Vector6::new(0.0, 0.0, 0.0, 1.0, 0.0, 0.0), 15.0).unwrap();
        let minus = max_disturbance(&gens, &Vector6::new(0.0, 0.0, 0.0, -1.0, 0.0, 0.0), 15.0).unwrap();
        assert!((plus - minus).abs() < 1e-6 * plus.max(1.0));
    }

    #[test]
    fn secure_check_threshold_zero_always_passes_for_equilibrium() {
        let obj = ObjectModel::new(
            crate::shape::ShapePrimitive::Sphere { radius: 10.0 },
            crate::shape::Pose::default(),
            0.0,
            0.5,
        )
        .unwrap();
        let gens = grasp_matrix(&antipodal_patches(15.0), 0.5, 8, 100.0).unwrap();
        let v = secure_grasp_check(&gens, &obj, 15.0, 0.0, &Vector3::new(0.0, -1.0, 0.0)).unwrap();
        assert!(v.secure);
    }

    #[test]
    fn frictionless_points_insecure_against_tangential_pull() {
        let obj = ObjectModel::new(
            crate::shape::ShapePrimitive::Sphere { radius: 10.0 },
            crate::shape::Pose::default(),
            0.0,
            0.0,
        )
        .unwrap();
        let gens = grasp_matrix(&antipodal_points(15.0), 0.0, 8, 100.0).unwrap();
        let v = secure_grasp_check(&gens, &obj, 15.0, 0.5, &Vector3::new(0.0, -1.0, 0.0)).unwrap();
        assert!(!v.secure);
        assert_eq!(v.min_force_resist, 0.0);
    }

    #[test]
    fn epsilon_zero_without_closure_positive_with() {
        let points = grasp_matrix(&antipodal_points(15.0), 0.5, 8, 100.0).unwrap();
        assert_eq!(epsilon_quality(&points).unwrap(), 0.0);
        let patches = grasp_matrix(&antipodal_patches(15.0), 0.5, 8, 100.0).unwrap();
        let eps = epsilon_quality(&patches).unwrap();
        assert!(eps > 0.0);
    }

    #[test]
    fn permutation_invariance() {
        let mut set = antipodal_patches(15.0);
        let d = Vector6::new(0.3, -0.5, 0.1, 8.0, -2.0, 3.0);
        let a = max_disturbance(&grasp_matrix(&set, 0.5, 8, 100.0).unwrap(), &d, 15.0).unwrap();
        set.contacts.reverse();
        let b = max_disturbance(&grasp_matrix(&set, 0.5, 8, 100.0).unwrap(), &d, 15.0).unwrap();
        assert!((a - b).abs() < 1e-7 * a.max(1.0));
    }
}

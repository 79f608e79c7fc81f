//! Contact resolution under 1-DoF jaw closure.
//!
//! Both jaw surfaces are flat gel planes (fingers flatten to zero pitch
//! through contact once the squeeze exceeds the flattening threshold). Each
//! side closes independently along `z` until the elastic-foundation integral
//! over its finger footprints carries the full actuation budget; pressure is
//! `stiffness * local interpenetration` per unit area, so patch geometry,
//! pressure centroids and forces all fall out of one grid integral. Fingers
//! without gel contact rigidly at the geometric touch set instead.
//!
//! Closure is quasi-static and frictionless; the object pose is held fixed.
//! A 1-DoF jaw can only balance wrenches in the grasp cross-section, so
//! contact normals are evaluated in the `y`-`z` section plane and per-side
//! pressure centroids are aligned along the finger axis. Whatever residual
//! remains after that is real lateral or tilt imbalance and fails closure
//! with an unstable-pose error.

use nalgebra::{Unit, Vector3, Vector6};

use crate::error::{GraspError, Result};
use crate::geometry::GripperConfig;
use crate::shape::ObjectModel;

/// Patch extents below this collapse to a point or line contact, mm.
pub const KIND_EXTENT_EPS: f64 = 0.1;

/// Elastic foundation: independent springs per unit area, pressure
/// proportional to indentation depth up to the local gel thickness.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GelModel {
    /// Foundation modulus, N/mm^3 (pressure per mm of indentation).
    pub stiffness_k: f64,
    /// Maximum indentation before the rigid backing takes over, mm.
    pub max_indent: f64,
}

impl GelModel {
    pub fn new(stiffness_k: f64, max_indent: f64) -> Result<Self> {
        if !(stiffness_k > 0.0) {
            return Err(GraspError::InvalidConfig("gel stiffness must be positive".into()));
        }
        if max_indent < 0.0 {
            return Err(GraspError::InvalidConfig("gel max indent must be non-negative".into()));
        }
        Ok(Self { stiffness_k, max_indent })
    }
}

/// Local object surface presented to a gel pad, for the closed-form
/// indentation laws.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LocalSurface {
    /// Flat face fully covering a rectangular pad region.
    Flat { width: f64, length: f64 },
    /// Sphere pressed into the pad.
    Sphere { radius: f64 },
    /// Cylinder lying across the pad, axis in the pad plane.
    CylinderRidge { radius: f64, length: f64 },
}

/// Result of indenting a gel pad to a given depth.
#[derive(Debug, Clone, PartialEq)]
pub struct Indentation {
    pub kind: ContactKind,
    /// Patch half-extents (along the ridge/length axis, across it), mm.
    pub half_extents: (f64, f64),
    pub area: f64,
    pub normal_force: f64,
    pub torsional_radius: f64,
    pub peak_pressure: f64,
}

/// Indent a gel pad by `depth` into `surface`: the patch is the intersection
/// of the surface with the offset gel plane, pressure is depth-proportional,
/// and the normal force is the interpenetration volume times the foundation
/// modulus.
pub fn gel_indent(surface: LocalSurface, gel: &GelModel, depth: f64) -> Result<Indentation> {
    if depth < 0.0 {
        return Err(GraspError::OutOfRange {
            what: "indentation depth",
            value: depth,
            min: 0.0,
            max: gel.max_indent,
        });
    }
    if depth > gel.max_indent {
        return Err(GraspError::GelBottomOut { depth, max_indent: gel.max_indent });
    }
    let k = gel.stiffness_k;
    let pi = std::f64::consts::PI;
    let (he, area, force) = if depth == 0.0 {
        ((0.0, 0.0), 0.0, 0.0)
    } else {
        match surface {
            LocalSurface::Flat { width, length } => {
                let area = width * length;
                ((length / 2.0, width / 2.0), area, k * depth * area)
            }
            LocalSurface::Sphere { radius } => {
                let r = radius;
                // Past the hemisphere the patch stays the full shadow disk.
                let rho = if depth <= r { (2.0 * r * depth - depth * depth).sqrt() } else { r };
                // Spherical-cap interpenetration volume: pi d^2 (r - d/3).
                let force = k * pi * depth * depth * (r - depth / 3.0);
                ((rho, rho), pi * rho * rho, force)
            }
            LocalSurface::CylinderRidge { radius, length } => {
                let r = radius;
                let a = if depth <= r { (2.0 * r * depth - depth * depth).sqrt() } else { r };
                let half = (a.min(r) / r).asin();
                // Circular-segment area integrated along the ridge.
                let seg = if depth <= r {
                    a * (depth - r) + r * r * half
                } else {
                    // Full lower half plus the straight-walled band above it.
                    std::f64::consts::FRAC_PI_2 * r * r + 2.0 * r * (depth - r)
                };
                let force = k * length * seg;
                ((length / 2.0, a), 2.0 * a * length, force)
            }
        }
    };
    let kind = classify_extents(
        he.0,
        he.1,
        Unit::new_unchecked(Vector3::x()),
        Unit::new_unchecked(Vector3::y()),
    );
    let torsional_radius = match kind {
        ContactKind::Patch { .. } => (area / pi).sqrt(),
        _ => 0.0,
    };
    Ok(Indentation {
        kind,
        half_extents: he,
        area,
        normal_force: force,
        torsional_radius,
        peak_pressure: k * depth,
    })
}

/// Contact geometry classification.
#[derive(Debug, Clone, PartialEq)]
pub enum ContactKind {
    Point,
    Line { half_length: f64, dir: Unit<Vector3<f64>> },
    Patch { half_u: f64, half_v: f64 },
}

impl ContactKind {
    pub fn label(&self) -> &'static str {
        match self {
            ContactKind::Point => "point",
            ContactKind::Line { .. } => "line",
            ContactKind::Patch { .. } => "patch",
        }
    }
}

fn classify_extents(
    half_u: f64,
    half_v: f64,
    u_dir: Unit<Vector3<f64>>,
    v_dir: Unit<Vector3<f64>>,
) -> ContactKind {
    let u_small = half_u < KIND_EXTENT_EPS;
    let v_small = half_v < KIND_EXTENT_EPS;
    match (u_small, v_small) {
        (true, true) => ContactKind::Point,
        (false, true) => ContactKind::Line { half_length: half_u, dir: u_dir },
        (true, false) => ContactKind::Line { half_length: half_v, dir: v_dir },
        (false, false) => ContactKind::Patch { half_u, half_v },
    }
}

/// One resolved contact in the grasp frame.
#[derive(Debug, Clone)]
pub struct Contact {
    /// Contact position, mm.
    pub position: Vector3<f64>,
    /// Unit normal pointing into the object.
    pub normal: Unit<Vector3<f64>>,
    /// Tangent along the finger axis (patch `u` axis).
    pub tangent_u: Unit<Vector3<f64>>,
    /// Tangent completing the right-handed frame (patch `v` axis).
    pub tangent_v: Unit<Vector3<f64>>,
    pub kind: ContactKind,
    /// Force magnitude along the normal, N.
    pub normal_force: f64,
    /// Area-equivalent patch radius for torsional friction, mm (0 unless a
    /// patch formed).
    pub torsional_radius: f64,
    /// Index of the finger that produced this contact.
    pub finger: usize,
    /// +1 for the upper jaw (pushing -z), -1 for the lower jaw.
    pub jaw_sign: f64,
}

impl Contact {
    /// Force vector exerted on the object, N.
    pub fn force(&self) -> Vector3<f64> {
        self.normal.into_inner() * self.normal_force
    }

    /// Wrench (force, torque about the grasp origin) exerted on the object.
    pub fn wrench(&self) -> Vector6<f64> {
        wrench_of(self.position, self.force())
    }
}

pub(crate) fn wrench_of(position: Vector3<f64>, force: Vector3<f64>) -> Vector6<f64> {
    let torque = position.cross(&force);
    Vector6::new(force.x, force.y, force.z, torque.x, torque.y, torque.z)
}

/// Resolved contact set after jaw closure, in static equilibrium.
#[derive(Debug, Clone)]
pub struct ContactSet {
    pub contacts: Vec<Contact>,
    /// Jaw squeeze the set is in equilibrium at, N.
    pub actuation_force: f64,
    /// Axial distance of the grasp frame origin from the finger base, mm.
    pub grasp_site_s: f64,
    /// Net wrench of all contact forces on the object.
    pub residual_wrench: Vector6<f64>,
}

impl ContactSet {
    pub fn net_wrench(&self) -> Vector6<f64> {
        self.contacts.iter().map(|c| c.wrench()).sum()
    }
}

/// Solver knobs for closure.
#[derive(Debug, Clone)]
pub struct ContactConfig {
    /// Foundation modulus, N/mm^3. The default anchors a 10 x 10 mm flat
    /// patch at 1 mm depth to 15 N.
    pub gel_stiffness: f64,
    /// Grid columns along the finger axis.
    pub grid_nx: usize,
    /// Grid cells across each finger footprint.
    pub grid_ny: usize,
    /// Squeeze force above which pitched fingers are treated as bent flat.
    pub flatten_threshold: f64,
}

impl Default for ContactConfig {
    fn default() -> Self {
        Self { gel_stiffness: 0.15, grid_nx: 48, grid_ny: 16, flatten_threshold: 1.0 }
    }
}

struct FingerPatch {
    finger: usize,
    /// Jaw-axis force component carried by this finger, N.
    force_z: f64,
    centroid_x: f64,
    centroid_y: f64,
    bbox: (f64, f64, f64, f64),
    area: f64,
    /// Lateral half-width used when probing the section normal.
    normal_probe: f64,
}

struct SideSolution {
    patches: Vec<FingerPatch>,
}

/// Close the jaws on `object` at grasp site `site_s` and return the
/// equilibrium contact set at the gripper's full actuation budget.
pub fn close_jaws(
    gripper: &GripperConfig,
    object: &ObjectModel,
    site_s: f64,
    cfg: &ContactConfig,
) -> Result<ContactSet> {
    gripper.validate()?;
    object.validate()?;
    let max_len = gripper.max_finger_length();
    if !(0.0..=max_len).contains(&site_s) {
        return Err(GraspError::OutOfRange {
            what: "grasp site s",
            value: site_s,
            min: 0.0,
            max: max_len,
        });
    }
    if object.z_extent() > gripper.jaw_opening_max {
        return Err(GraspError::ObjectExceedsCapacity(format!(
            "object height {:.3} mm exceeds jaw opening {:.3} mm",
            object.z_extent(),
            gripper.jaw_opening_max
        )));
    }
    if !gripper.studs.is_empty() && gripper.fingers.iter().any(|f| !f.is_rigid()) {
        return Err(GraspError::InvalidConfig(
            "stud contact points require rigid (gel-free) fingers".into(),
        ));
    }

    let target = gripper.f_max;
    let (upper, lower) = gripper.jaw_fingers();
    let lower_sol = solve_side(gripper, object, site_s, &lower, false, target, cfg)?;
    let upper_sol = solve_side(gripper, object, site_s, &upper, true, target, cfg)?;

    // Align per-side pressure centroids along the finger axis: the grasp
    // station is the force-weighted mean over both sides, and each side is
    // shifted rigidly onto it so the squeeze transmits no tilt moment.
    let side_mean = |s: &SideSolution| -> f64 {
        s.patches.iter().map(|p| p.force_z * p.centroid_x).sum::<f64>() / target
    };
    let station = 0.5 * (side_mean(&lower_sol) + side_mean(&upper_sol));

    let mut contacts = Vec::new();
    for (sol, is_upper) in [(&lower_sol, false), (&upper_sol, true)] {
        let shift = station - side_mean(sol);
        for p in &sol.patches {
            contacts.push(build_contact(gripper, object, p, is_upper, shift, cfg)?);
        }
    }

    let set = ContactSet {
        contacts,
        actuation_force: target,
        grasp_site_s: site_s,
        residual_wrench: Vector6::zeros(),
    };
    finalize_equilibrium(set, gripper)
}

fn finalize_equilibrium(mut set: ContactSet, gripper: &GripperConfig) -> Result<ContactSet> {
    let residual = set.net_wrench();
    set.residual_wrench = residual;
    let f_res = residual.fixed_rows::<3>(0).norm();
    let t_res = residual.fixed_rows::<3>(3).norm();
    let f_tol = 1e-6 * set.actuation_force;
    let t_tol = 1e-6 * set.actuation_force * gripper.max_finger_length();
    if f_res > f_tol {
        return Err(GraspError::UnstablePose { residual: f_res, tolerance: f_tol });
    }
    if t_res > t_tol {
        return Err(GraspError::UnstablePose { residual: t_res, tolerance: t_tol });
    }
    Ok(set)
}

fn build_contact(
    gripper: &GripperConfig,
    object: &ObjectModel,
    patch: &FingerPatch,
    is_upper: bool,
    station_shift: f64,
    cfg: &ContactConfig,
) -> Result<Contact> {
    let (x0, x1, y0, y1) = patch.bbox;
    let half_u = (x1 - x0) / 2.0;
    let half_v = (y1 - y0) / 2.0;

    let mut normal = object.section_contact_normal(patch.centroid_y, !is_upper, patch.normal_probe);
    // Below the flattening threshold the backing keeps its pitch and the
    // contact normal tilts toward the finger base.
    let pitch = gripper.fingers[patch.finger].pitch_deg;
    if gripper.f_max < cfg.flatten_threshold && pitch > 0.0 {
        let a = pitch.to_radians();
        normal = normal * a.cos() - Vector3::x() * a.sin();
    }
    let normal = Unit::new_normalize(normal);
    let n_z = normal.z.abs();
    if n_z < 0.05 {
        return Err(GraspError::UnstablePose { residual: n_z, tolerance: 0.05 });
    }
    let normal_force = patch.force_z / n_z;

    let z = if is_upper {
        object.z_top(patch.centroid_x, patch.centroid_y)
    } else {
        object.z_bottom(patch.centroid_x, patch.centroid_y)
    }
    .ok_or(GraspError::NoContact)?;
    let position = Vector3::new(patch.centroid_x + station_shift, patch.centroid_y, z);

    let u_raw = Vector3::x() - normal.into_inner() * normal.x;
    let tangent_u = Unit::new_normalize(u_raw);
    let tangent_v = Unit::new_normalize(normal.cross(&tangent_u));

    let kind = classify_extents(half_u, half_v, tangent_u, tangent_v);
    let torsional_radius = match kind {
        ContactKind::Patch { .. } => (patch.area / std::f64::consts::PI).sqrt(),
        _ => 0.0,
    };

    Ok(Contact {
        position,
        normal,
        tangent_u,
        tangent_v,
        kind,
        normal_force,
        torsional_radius,
        finger: patch.finger,
        jaw_sign: if is_upper { 1.0 } else { -1.0 },
    })
}

fn solve_side(
    gripper: &GripperConfig,
    object: &ObjectModel,
    site_s: f64,
    fingers: &[usize],
    is_upper: bool,
    target: f64,
    cfg: &ContactConfig,
) -> Result<SideSolution> {
    if !gripper.studs.is_empty() {
        return solve_side_studs(gripper, object, site_s, fingers, is_upper, target);
    }
    if gripper.fingers[fingers[0]].is_rigid() {
        return solve_side_rigid(gripper, object, site_s, fingers, is_upper, target, cfg);
    }
    solve_side_gel(gripper, object, site_s, fingers, is_upper, target, cfg)
}

struct Cell {
    finger: usize,
    x: f64,
    y: f64,
    dx: f64,
    dy: f64,
    /// Object surface height facing this side.
    surface: f64,
    /// Gel thickness at this axial station.
    thickness: f64,
}

fn collect_cells(
    gripper: &GripperConfig,
    object: &ObjectModel,
    site_s: f64,
    fingers: &[usize],
    is_upper: bool,
    cfg: &ContactConfig,
    bounds: Option<(f64, f64, f64, f64)>,
) -> Vec<Cell> {
    let (ox0, ox1) = object.x_range();
    let (oy0, oy1) = object.y_range();
    let (bx0, bx1, by0, by1) = bounds.unwrap_or((f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY));
    let mut cells = Vec::new();
    for &fi in fingers {
        let finger = &gripper.fingers[fi];
        let x_lo = (-site_s).max(ox0).max(bx0);
        let x_hi = (finger.length - site_s).min(ox1).min(bx1);
        if x_hi <= x_lo {
            continue;
        }
        let dx = (x_hi - x_lo) / cfg.grid_nx as f64;
        for ix in 0..cfg.grid_nx {
            let x = x_lo + (ix as f64 + 0.5) * dx;
            let se = site_s + x;
            let Some((fy0, fy1)) = gripper.footprint_y_range(fi, se) else {
                continue;
            };
            let y_lo = fy0.max(oy0).max(by0);
            let y_hi = fy1.min(oy1).min(by1);
            if y_hi <= y_lo {
                continue;
            }
            let dy = (y_hi - y_lo) / cfg.grid_ny as f64;
            let thickness = finger.gel_thickness_at(se);
            for iy in 0..cfg.grid_ny {
                let y = y_lo + (iy as f64 + 0.5) * dy;
                let surface = if is_upper { object.z_top(x, y) } else { object.z_bottom(x, y) };
                if let Some(surface) = surface {
                    cells.push(Cell { finger: fi, x, y, dx, dy, surface, thickness });
                }
            }
        }
    }
    cells
}

fn solve_side_gel(
    gripper: &GripperConfig,
    object: &ObjectModel,
    site_s: f64,
    fingers: &[usize],
    is_upper: bool,
    target: f64,
    cfg: &ContactConfig,
) -> Result<SideSolution> {
    let cells = collect_cells(gripper, object, site_s, fingers, is_upper, cfg, None);
    if cells.is_empty() {
        return Err(GraspError::NoContact);
    }
    // Advance `a` moves the gel plane into the object past first touch;
    // penetration at a cell is `a` minus the cell's gap behind first touch.
    let first_touch = if is_upper {
        cells.iter().fold(f64::NEG_INFINITY, |m, c| m.max(c.surface))
    } else {
        cells.iter().fold(f64::INFINITY, |m, c| m.min(c.surface))
    };
    let gap = |c: &Cell| -> f64 {
        if is_upper {
            first_touch - c.surface
        } else {
            c.surface - first_touch
        }
    };
    let a_max = cells.iter().fold(f64::INFINITY, |m, c| m.min(gap(c) + c.thickness));
    if a_max <= 1e-12 {
        // Gel vanishes at the touch point; the side behaves rigidly.
        return solve_side_rigid(gripper, object, site_s, fingers, is_upper, target, cfg);
    }
    let k = cfg.gel_stiffness;
    let force_at = |a: f64| -> f64 {
        cells
            .iter()
            .map(|c| {
                let pen = a - gap(c);
                if pen > 0.0 {
                    k * pen * c.dx * c.dy
                } else {
                    0.0
                }
            })
            .sum()
    };
    let f_end = force_at(a_max);
    if f_end <= 0.0 {
        return Err(GraspError::NoContact);
    }
    let a_final = if f_end <= target {
        // Gel bottoms out below the budget; the rigid backing carries the
        // remainder at frozen patch geometry.
        a_max
    } else {
        let (mut lo, mut hi) = (0.0, a_max);
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if force_at(mid) < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };

    let mut patches: Vec<FingerPatch> = Vec::new();
    for &fi in fingers {
        let mut force = 0.0;
        let mut px = 0.0;
        let mut py = 0.0;
        let mut area = 0.0;
        let mut bbox = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for c in cells.iter().filter(|c| c.finger == fi) {
            let pen = a_final - gap(c);
            if pen <= 0.0 {
                continue;
            }
            let f = k * pen * c.dx * c.dy;
            force += f;
            px += f * c.x;
            py += f * c.y;
            area += c.dx * c.dy;
            bbox.0 = bbox.0.min(c.x - c.dx / 2.0);
            bbox.1 = bbox.1.max(c.x + c.dx / 2.0);
            bbox.2 = bbox.2.min(c.y - c.dy / 2.0);
            bbox.3 = bbox.3.max(c.y + c.dy / 2.0);
        }
        if force > 1e-12 * target {
            let mut patch = FingerPatch {
                finger: fi,
                force_z: force,
                centroid_x: px / force,
                centroid_y: py / force,
                bbox,
                area,
                normal_probe: (bbox.3 - bbox.2) / 2.0,
            };
            if gripper.fingers[fi].compliant_backing {
                extend_patch_lengthwise(&mut patch, gripper, object, site_s);
            }
            patches.push(patch);
        }
    }
    if patches.is_empty() {
        return Err(GraspError::NoContact);
    }
    // Normalize the side exactly onto the budget (cleans up both bisection
    // residue and any rigid bottom-out remainder).
    let total: f64 = patches.iter().map(|p| p.force_z).sum();
    for p in &mut patches {
        p.force_z *= target / total;
    }
    Ok(SideSolution { patches })
}

/// A compliant-backed finger bends along its length and wraps the object,
/// so the patch runs over the whole footprint-object overlap along `x` at
/// the patch's lateral station.
fn extend_patch_lengthwise(
    patch: &mut FingerPatch,
    gripper: &GripperConfig,
    object: &ObjectModel,
    site_s: f64,
) {
    let Some((ox0, ox1)) = object.x_extent_at_y(patch.centroid_y) else {
        return;
    };
    let finger = &gripper.fingers[patch.finger];
    let x0 = ox0.max(-site_s).min(patch.bbox.0);
    let x1 = ox1.min(finger.length - site_s).max(patch.bbox.1);
    if x1 <= x0 {
        return;
    }
    patch.bbox.0 = x0;
    patch.bbox.1 = x1;
    patch.centroid_x = 0.5 * (x0 + x1);
    let width = patch.bbox.3 - patch.bbox.2;
    patch.area = patch.area.max((x1 - x0) * width);
}

fn solve_side_rigid(
    gripper: &GripperConfig,
    object: &ObjectModel,
    site_s: f64,
    fingers: &[usize],
    is_upper: bool,
    target: f64,
    cfg: &ContactConfig,
) -> Result<SideSolution> {
    let conform_eps = 1e-6;
    let mut cells = collect_cells(gripper, object, site_s, fingers, is_upper, cfg, None);
    if cells.is_empty() {
        return Err(GraspError::NoContact);
    }
    // Refinement passes shrink the grid around the touch set so point and
    // line contacts classify at sub-threshold resolution.
    for _ in 0..3 {
        let extreme = extreme_surface(&cells, is_upper);
        let mut bx = (f64::INFINITY, f64::NEG_INFINITY);
        let mut by = (f64::INFINITY, f64::NEG_INFINITY);
        for c in cells.iter().filter(|c| (c.surface - extreme).abs() <= conform_eps) {
            bx.0 = bx.0.min(c.x - c.dx);
            bx.1 = bx.1.max(c.x + c.dx);
            by.0 = by.0.min(c.y - c.dy);
            by.1 = by.1.max(c.y + c.dy);
        }
        let refined = collect_cells(
            gripper,
            object,
            site_s,
            fingers,
            is_upper,
            cfg,
            Some((bx.0, bx.1, by.0, by.1)),
        );
        if refined.is_empty() {
            break;
        }
        cells = refined;
    }
    let extreme = extreme_surface(&cells, is_upper);
    let mut patches: Vec<FingerPatch> = Vec::new();
    for &fi in fingers {
        let touching: Vec<&Cell> = cells
            .iter()
            .filter(|c| c.finger == fi && (c.surface - extreme).abs() <= conform_eps)
            .collect();
        if touching.is_empty() {
            continue;
        }
        let n = touching.len() as f64;
        let cx = touching.iter().map(|c| c.x).sum::<f64>() / n;
        let cy = touching.iter().map(|c| c.y).sum::<f64>() / n;
        let mut bbox = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        let mut area = 0.0;
        let mut probe: f64 = 0.0;
        for c in &touching {
            bbox.0 = bbox.0.min(c.x - c.dx / 2.0);
            bbox.1 = bbox.1.max(c.x + c.dx / 2.0);
            bbox.2 = bbox.2.min(c.y - c.dy / 2.0);
            bbox.3 = bbox.3.max(c.y + c.dy / 2.0);
            area += c.dx * c.dy;
            probe = probe.max(1.5 * c.dy);
        }
        if bbox.1 - bbox.0 < KIND_EXTENT_EPS || bbox.3 - bbox.2 < KIND_EXTENT_EPS {
            area = 0.0;
        }
        patches.push(FingerPatch {
            finger: fi,
            force_z: 0.0,
            centroid_x: cx,
            centroid_y: cy,
            bbox,
            area,
            normal_probe: probe.max((bbox.3 - bbox.2) / 2.0),
        });
    }
    if patches.is_empty() {
        return Err(GraspError::NoContact);
    }
    allocate_rigid_forces(&mut patches, object, is_upper, target)?;
    patches.retain(|p| p.force_z > 1e-12 * target);
    if patches.is_empty() {
        return Err(GraspError::NoContact);
    }
    Ok(SideSolution { patches })
}

fn extreme_surface(cells: &[Cell], is_upper: bool) -> f64 {
    if is_upper {
        cells.iter().fold(f64::NEG_INFINITY, |m, c| m.max(c.surface))
    } else {
        cells.iter().fold(f64::INFINITY, |m, c| m.min(c.surface))
    }
}

fn solve_side_studs(
    gripper: &GripperConfig,
    object: &ObjectModel,
    site_s: f64,
    fingers: &[usize],
    is_upper: bool,
    target: f64,
) -> Result<SideSolution> {
    let conform_eps = 1e-6;
    let mut probes = Vec::new();
    for &fi in fingers {
        for &offset in &gripper.studs {
            let x = offset - site_s;
            let Some((fy0, fy1)) = gripper.footprint_y_range(fi, offset) else { continue };
            let y = 0.5 * (fy0 + fy1);
            let surface = if is_upper { object.z_top(x, y) } else { object.z_bottom(x, y) };
            if let Some(surface) = surface {
                probes.push((fi, x, y, surface));
            }
        }
    }
    if probes.is_empty() {
        return Err(GraspError::NoContact);
    }
    let extreme = if is_upper {
        probes.iter().fold(f64::NEG_INFINITY, |m, p| m.max(p.3))
    } else {
        probes.iter().fold(f64::INFINITY, |m, p| m.min(p.3))
    };
    let mut patches: Vec<FingerPatch> = probes
        .iter()
        .filter(|p| (p.3 - extreme).abs() <= conform_eps)
        .map(|&(fi, x, y, _)| FingerPatch {
            finger: fi,
            force_z: 0.0,
            centroid_x: x,
            centroid_y: y,
            bbox: (x, x, y, y),
            area: 0.0,
            normal_probe: 1e-9,
        })
        .collect();
    allocate_rigid_forces(&mut patches, object, is_upper, target)?;
    patches.retain(|p| p.force_z > 1e-12 * target);
    if patches.is_empty() {
        return Err(GraspError::NoContact);
    }
    Ok(SideSolution { patches })
}

/// Distribute a side's squeeze across rigid touch points so lateral force
/// balances in the cross-section: find the least-norm normal-force vector
/// with `sum f n_y = 0`, `sum f |n_z| = target` and `f >= 0`, preferring
/// solutions that share load over the most contacts.
fn allocate_rigid_forces(
    patches: &mut [FingerPatch],
    object: &ObjectModel,
    is_upper: bool,
    target: f64,
) -> Result<()> {
    let normals: Vec<(f64, f64)> = patches
        .iter()
        .map(|p| {
            let n = object.section_contact_normal(p.centroid_y, !is_upper, p.normal_probe);
            (n.y, n.z.abs())
        })
        .collect();
    let n = patches.len();
    if n == 1 {
        if normals[0].1 < 0.05 {
            return Err(GraspError::UnstablePose { residual: normals[0].1, tolerance: 0.05 });
        }
        patches[0].force_z = target;
        return Ok(());
    }
    if n > 16 {
        return Err(GraspError::InvalidConfig(format!(
            "rigid force allocation supports up to 16 simultaneous touch points, got {n}"
        )));
    }
    let mut best: Option<(usize, u32, Vec<f64>)> = None;
    for mask in 1u32..(1 << n) {
        let active: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        let mut a11 = 0.0;
        let mut a12 = 0.0;
        let mut a22 = 0.0;
        for &i in &active {
            a11 += normals[i].0 * normals[i].0;
            a12 += normals[i].0 * normals[i].1;
            a22 += normals[i].1 * normals[i].1;
        }
        let det = a11 * a22 - a12 * a12;
        let (l1, l2);
        if det.abs() > 1e-12 {
            l1 = -a12 * target / det;
            l2 = a11 * target / det;
        } else if a22 > 1e-12 && a11 <= 1e-12 {
            // Purely axial normals: lateral balance holds for free.
            l1 = 0.0;
            l2 = target / a22;
        } else {
            continue;
        }
        let f: Vec<f64> = active.iter().map(|&i| normals[i].0 * l1 + normals[i].1 * l2).collect();
        if f.iter().any(|&v| v < -1e-9 * target) {
            continue;
        }
        let fy: f64 = active.iter().zip(&f).map(|(&i, &fi)| normals[i].0 * fi).sum();
        let fz: f64 = active.iter().zip(&f).map(|(&i, &fi)| normals[i].1 * fi).sum();
        if fy.abs() > 1e-7 * target || (fz - target).abs() > 1e-7 * target {
            continue;
        }
        let better = match &best {
            None => true,
            Some((count, _, _)) => active.len() > *count,
        };
        if better {
            let mut full = vec![0.0; n];
            for (&i, &fi) in active.iter().zip(&f) {
                full[i] = fi.max(0.0);
            }
            best = Some((active.len(), mask, full));
        }
    }
    let Some((_, _, forces)) = best else {
        return Err(GraspError::UnstablePose { residual: f64::INFINITY, tolerance: 0.0 });
    };
    for ((p, f), nrm) in patches.iter_mut().zip(forces).zip(&normals) {
        p.force_z = f * nrm.1;
    }
    Ok(())
}

/// Rescale an equilibrium contact set to a different jaw squeeze. Patch
/// geometry is kept; forces and the residual scale linearly, so the
/// equilibrium invariant is preserved.
pub fn contact_force_distribution(set: &ContactSet, f_max: f64) -> Result<ContactSet> {
    if f_max < 0.0 {
        return Err(GraspError::OutOfRange {
            what: "f_max",
            value: f_max,
            min: 0.0,
            max: f64::INFINITY,
        });
    }
    let scale = if set.actuation_force > 0.0 { f_max / set.actuation_force } else { 0.0 };
    let mut out = set.clone();
    for c in &mut out.contacts {
        c.normal_force *= scale;
    }
    out.residual_wrench *= scale;
    out.actuation_force = f_max;
    Ok(out)
}

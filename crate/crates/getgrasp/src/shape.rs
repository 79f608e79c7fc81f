//! Rigid object models and the surface queries the contact solver needs.
//!
//! Jaws close along `z`, so contact resolution only ever asks an object for
//! its upper surface `z_top(x, y)`, its lower surface `z_bottom(x, y)` and
//! the outward surface normal in the `y`-`z` cross-section at a contact.
//! Cross-sections are what the grasp analysis reasons about; curvature along
//! the finger axis enters through the patch extents, not the contact normal.

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{GraspError, Result};

/// Standard gravity, m/s^2. Weight in N is `mass_kg * G_ACCEL`.
pub const G_ACCEL: f64 = 9.81;

/// Convex shape primitives. The cylinder's axis lies along `y` (across the
/// fingers); a prism's cross-section polygon lives in the `y`-`z` plane and
/// extrudes along `x` (along the fingers).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ShapePrimitive {
    Sphere { radius: f64 },
    Cylinder { radius: f64, length: f64 },
    #[serde(rename = "box")]
    Cuboid { x: f64, y: f64, z: f64 },
    ConvexPrism { section: Vec<[f64; 2]>, depth: f64 },
}

/// Object placement: centroid offset in the grasp frame plus an optional
/// rotation about the finger axis, which spins the `y`-`z` cross-section.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pose {
    #[serde(default)]
    pub position: [f64; 3],
    #[serde(default)]
    pub rot_x_deg: f64,
}

impl Default for Pose {
    fn default() -> Self {
        Self { position: [0.0; 3], rot_x_deg: 0.0 }
    }
}

/// A rigid object to be grasped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectModel {
    pub shape: ShapePrimitive,
    #[serde(default)]
    pub pose: Pose,
    pub mass_kg: f64,
    pub mu: f64,
}

/// Cross-section polygon in `(y, z)` with convexity helpers.
#[derive(Debug, Clone)]
struct SectionPolygon {
    /// CCW vertices.
    pts: Vec<(f64, f64)>,
}

impl SectionPolygon {
    fn y_range(&self) -> (f64, f64) {
        self.pts
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
                (lo.min(p.0), hi.max(p.0))
            })
    }

    fn z_range(&self) -> (f64, f64) {
        self.pts
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
                (lo.min(p.1), hi.max(p.1))
            })
    }

    /// Lower boundary z at lateral coordinate y, with the edge it lies on.
    fn z_bottom(&self, y: f64) -> Option<(f64, usize)> {
        self.z_extreme(y, true)
    }

    fn z_top(&self, y: f64) -> Option<(f64, usize)> {
        self.z_extreme(y, false)
    }

    fn z_extreme(&self, y: f64, lower: bool) -> Option<(f64, usize)> {
        let n = self.pts.len();
        let mut best: Option<(f64, usize)> = None;
        for i in 0..n {
            let (y0, z0) = self.pts[i];
            let (y1, z1) = self.pts[(i + 1) % n];
            let (ya, yb) = if y0 <= y1 { (y0, y1) } else { (y1, y0) };
            if y < ya || y > yb {
                continue;
            }
            let z = if (y1 - y0).abs() < 1e-15 {
                if lower {
                    z0.min(z1)
                } else {
                    z0.max(z1)
                }
            } else {
                z0 + (z1 - z0) * (y - y0) / (y1 - y0)
            };
            match &mut best {
                None => best = Some((z, i)),
                Some((bz, bi)) => {
                    if (lower && z < *bz) || (!lower && z > *bz) {
                        *bz = z;
                        *bi = i;
                    }
                }
            }
        }
        best
    }

    /// Outward normal of edge `i` in `(y, z)`.
    fn edge_outward_normal(&self, i: usize) -> (f64, f64) {
        let n = self.pts.len();
        let (y0, z0) = self.pts[i];
        let (y1, z1) = self.pts[(i + 1) % n];
        let (dy, dz) = (y1 - y0, z1 - z0);
        let len = (dy * dy + dz * dz).sqrt();
        // CCW orientation: outward normal is the edge direction rotated -90 deg.
        (dz / len, -dy / len)
    }
}

fn validate_convex_ccw(pts: &[(f64, f64)]) -> Result<()> {
    if pts.len() < 3 {
        return Err(GraspError::InvalidConfig(
            "prism section needs at least 3 vertices".into(),
        ));
    }
    let n = pts.len();
    for i in 0..n {
        let a = pts[i];
        let b = pts[(i + 1) % n];
        let c = pts[(i + 2) % n];
        let cross = (b.0 - a.0) * (c.1 - b.1) - (b.1 - a.1) * (c.0 - b.0);
        if cross <= 0.0 {
            return Err(GraspError::InvalidConfig(
                "prism section must be strictly convex with counter-clockwise vertices".into(),
            ));
        }
    }
    Ok(())
}

impl ObjectModel {
    pub fn new(shape: ShapePrimitive, pose: Pose, mass_kg: f64, mu: f64) -> Result<Self> {
        let o = Self { shape, pose, mass_kg, mu };
        o.validate()?;
        Ok(o)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mass_kg >= 0.0) || !self.mass_kg.is_finite() {
            return Err(GraspError::InvalidConfig("mass must be finite and non-negative".into()));
        }
        if !(self.mu >= 0.0) || !self.mu.is_finite() {
            return Err(GraspError::InvalidConfig(
                "friction coefficient must be finite and non-negative".into(),
            ));
        }
        if self.pose.position.iter().any(|v| !v.is_finite()) || !self.pose.rot_x_deg.is_finite() {
            return Err(GraspError::InvalidConfig("pose must be finite".into()));
        }
        match &self.shape {
            ShapePrimitive::Sphere { radius } => {
                if !(radius > &0.0) {
                    return Err(GraspError::InvalidConfig("sphere radius must be positive".into()));
                }
            }
            ShapePrimitive::Cylinder { radius, length } => {
                if !(radius > &0.0) || !(length > &0.0) {
                    return Err(GraspError::InvalidConfig(
                        "cylinder radius and length must be positive".into(),
                    ));
                }
                if self.pose.rot_x_deg != 0.0 {
                    return Err(GraspError::InvalidConfig(
                        "cylinder does not support rotation about the finger axis".into(),
                    ));
                }
            }
            ShapePrimitive::Cuboid { x, y, z } => {
                if !(x > &0.0 && y > &0.0 && z > &0.0) {
                    return Err(GraspError::InvalidConfig("box extents must be positive".into()));
                }
            }
            ShapePrimitive::ConvexPrism { section, depth } => {
                if !(depth > &0.0) {
                    return Err(GraspError::InvalidConfig("prism depth must be positive".into()));
                }
                let pts: Vec<(f64, f64)> = section.iter().map(|p| (p[0], p[1])).collect();
                validate_convex_ccw(&pts)?;
            }
        }
        Ok(())
    }

    pub fn weight_n(&self) -> f64 {
        self.mass_kg * G_ACCEL
    }

    pub fn center(&self) -> Vector3<f64> {
        // Pose position places the shape's centroid; prism sections are
        // shifted so their area centroid lands on the pose position.
        Vector3::new(self.pose.position[0], self.pose.position[1], self.pose.position[2])
    }

    /// The object's cross-section polygon in object-local `(y, z)`, rotated
    /// by the pose and translated to the pose position. Only for section
    /// shapes (box, prism).
    fn section_polygon(&self) -> Option<SectionPolygon> {
        let raw: Vec<(f64, f64)> = match &self.shape {
            ShapePrimitive::Cuboid { y, z, .. } => {
                let (hy, hz) = (y / 2.0, z / 2.0);
                vec![(-hy, -hz), (hy, -hz), (hy, hz), (-hy, hz)]
            }
            ShapePrimitive::ConvexPrism { section, .. } => {
                let pts: Vec<(f64, f64)> = section.iter().map(|p| (p[0], p[1])).collect();
                let c = polygon_centroid(&pts);
                pts.iter().map(|p| (p.0 - c.0, p.1 - c.1)).collect()
            }
            _ => return None,
        };
        let a = self.pose.rot_x_deg.to_radians();
        let (sin, cos) = a.sin_cos();
        let (cy, cz) = (self.pose.position[1], self.pose.position[2]);
        let pts = raw
            .iter()
            .map(|(y, z)| (cy + y * cos - z * sin, cz + y * sin + z * cos))
            .collect();
        Some(SectionPolygon { pts })
    }

    /// Extent of the shape along `x` as `(x_min, x_max)` in the grasp frame.
    pub fn x_range(&self) -> (f64, f64) {
        let cx = self.pose.position[0];
        let h = match &self.shape {
            ShapePrimitive::Sphere { radius } => *radius,
            ShapePrimitive::Cylinder { radius, .. } => *radius,
            ShapePrimitive::Cuboid { x, .. } => x / 2.0,
            ShapePrimitive::ConvexPrism { depth, .. } => depth / 2.0,
        };
        (cx - h, cx + h)
    }

    pub fn y_range(&self) -> (f64, f64) {
        match &self.shape {
            ShapePrimitive::Sphere { radius } => {
                let c = self.pose.position[1];
                (c - radius, c + radius)
            }
            ShapePrimitive::Cylinder { length, .. } => {
                let c = self.pose.position[1];
                (c - length / 2.0, c + length / 2.0)
            }
            _ => self.section_polygon().expect("section shape").y_range(),
        }
    }

    pub fn z_range(&self) -> (f64, f64) {
        match &self.shape {
            ShapePrimitive::Sphere { radius } => {
                let c = self.pose.position[2];
                (c - radius, c + radius)
            }
            ShapePrimitive::Cylinder { radius, .. } => {
                let c = self.pose.position[2];
                (c - radius, c + radius)
            }
            _ => self.section_polygon().expect("section shape").z_range(),
        }
    }

    pub fn y_extent(&self) -> f64 {
        let (lo, hi) = self.y_range();
        hi - lo
    }

    pub fn z_extent(&self) -> f64 {
        let (lo, hi) = self.z_range();
        hi - lo
    }

    /// Extent of the shape along `x` at lateral position `y`, or `None`
    /// when `y` misses the shadow entirely.
    pub fn x_extent_at_y(&self, y: f64) -> Option<(f64, f64)> {
        let c = self.center();
        match &self.shape {
            ShapePrimitive::Sphere { radius } => {
                let dy = y - c.y;
                let h2 = radius * radius - dy * dy;
                if h2 < 0.0 {
                    return None;
                }
                let h = h2.sqrt();
                Some((c.x - h, c.x + h))
            }
            ShapePrimitive::Cylinder { radius, length } => {
                if (y - c.y).abs() > length / 2.0 {
                    return None;
                }
                Some((c.x - radius, c.x + radius))
            }
            _ => {
                let (lo, hi) = self.y_range();
                if y < lo || y > hi {
                    return None;
                }
                Some(self.x_range())
            }
        }
    }

    /// Lower surface height under `(x, y)`, or `None` outside the shadow.
    pub fn z_bottom(&self, x: f64, y: f64) -> Option<f64> {
        self.z_surface(x, y, true)
    }

    /// Upper surface height over `(x, y)`, or `None` outside the shadow.
    pub fn z_top(&self, x: f64, y: f64) -> Option<f64> {
        self.z_surface(x, y, false)
    }

    fn z_surface(&self, x: f64, y: f64, lower: bool) -> Option<f64> {
        let c = self.center();
        match &self.shape {
            ShapePrimitive::Sphere { radius } => {
                let dx = x - c.x;
                let dy = y - c.y;
                let rho2 = dx * dx + dy * dy;
                if rho2 > radius * radius {
                    return None;
                }
                let h = (radius * radius - rho2).sqrt();
                Some(if lower { c.z - h } else { c.z + h })
            }
            ShapePrimitive::Cylinder { radius, length } => {
                let dx = x - c.x;
                if dx.abs() > *radius || (y - c.y).abs() > length / 2.0 {
                    return None;
                }
                let h = (radius * radius - dx * dx).sqrt();
                Some(if lower { c.z - h } else { c.z + h })
            }
            _ => {
                let (x0, x1) = self.x_range();
                if x < x0 || x > x1 {
                    return None;
                }
                let poly = self.section_polygon().expect("section shape");
                let res = if lower { poly.z_bottom(y) } else { poly.z_top(y) };
                res.map(|(z, _)| z)
            }
        }
    }

    /// Inward contact normal (pointing into the object) for a contact on the
    /// lower (`lower = true`) or upper surface, evaluated in the `y`-`z`
    /// cross-section at lateral position `y`. The `x` component is zero by
    /// construction: the planar grasp analysis resolves closure in the
    /// cross-section plane.
    ///
    /// `patch_y_half` is the lateral half-extent of the contact patch; a
    /// polygon vertex falling strictly inside the patch means the foundation
    /// pressure straddles the vertex and the resultant acts along the jaw
    /// axis.
    pub fn section_contact_normal(
        &self,
        y: f64,
        lower: bool,
        patch_y_half: f64,
    ) -> Vector3<f64> {
        let c = self.center();
        let jaw_normal = if lower {
            Vector3::new(0.0, 0.0, 1.0)
        } else {
            Vector3::new(0.0, 0.0, -1.0)
        };
        match &self.shape {
            ShapePrimitive::Sphere { .. } => {
                let z = match self.z_surface(c.x, y, lower) {
                    Some(z) => z,
                    None => return jaw_normal,
                };
                let v = Vector3::new(0.0, c.y - y, c.z - z);
                if v.norm() < 1e-12 {
                    jaw_normal
                } else {
                    v.normalize()
                }
            }
            ShapePrimitive::Cylinder { .. } => jaw_normal,
            _ => {
                let poly = self.section_polygon().expect("section shape");
                let hit = if lower { poly.z_bottom(y) } else { poly.z_top(y) };
                let Some((_, edge)) = hit else { return jaw_normal };
                // Check whether an adjacent vertex lies well inside the
                // patch: the pressure resultant then straddles it and acts
                // along z. Vertices at the patch rim keep the edge normal.
                let n = poly.pts.len();
                for &vi in &[edge, (edge + 1) % n] {
                    let (vy, vz) = poly.pts[vi];
                    if (vy - y).abs() < 0.8 * patch_y_half {
                        let other = if lower { poly.z_bottom(vy) } else { poly.z_top(vy) };
                        if let Some((z_at, _)) = other {
                            if (z_at - vz).abs() < 1e-9 {
                                // Vertex is on the contacting chain.
                                let (lo, hi) = poly.y_range();
                                if vy > lo + 1e-9 && vy < hi - 1e-9 {
                                    return jaw_normal;
                                }
                            }
                        }
                    }
                }
                let (ny, nz) = poly.edge_outward_normal(edge);
                -Vector3::new(0.0, ny, nz)
            }
        }
    }
}

fn polygon_centroid(pts: &[(f64, f64)]) -> (f64, f64) {
    let n = pts.len();
    let mut area2 = 0.0;
    let mut cx = 0.0;
    let mut cy = 0.0;
    for i in 0..n {
        let (x0, y0) = pts[i];
        let (x1, y1) = pts[(i + 1) % n];
        let cross = x0 * y1 - x1 * y0;
        area2 += cross;
        cx += (x0 + x1) * cross;
        cy += (y0 + y1) * cross;
    }
    (cx / (3.0 * area2), cy / (3.0 * area2))
}

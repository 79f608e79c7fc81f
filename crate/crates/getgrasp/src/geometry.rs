//! Parametric finger and gripper geometry.
//!
//! All lengths are millimetres, forces Newtons, angles degrees at the API
//! boundary. A finger runs along the `x` axis of the grasp frame from its
//! base at arclength 0 to its tip at arclength `length`; `s` always denotes
//! the axial distance from the finger base measured along the jaw plane.

use nalgebra::{Unit, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{GraspError, Result};

/// Margin applied when matching an object extent to a grasp site: the jaw
/// separation at the chosen site keeps 10% clearance over the object, except
/// at the capacity boundary where the margin tapers to zero so that an object
/// exactly as wide as the base separation is still assigned `s = 0`.
pub const SITE_MARGIN: f64 = 0.10;

fn deg_to_rad(deg: f64) -> f64 {
    deg * std::f64::consts::PI / 180.0
}

/// One finger's parametric geometry. Widths and gel thickness vary linearly
/// from base to tip; the backing pitch is the inward tilt of the unloaded
/// finger. Nail dimensions are carried as data for reporting and rendering.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FingerProfile {
    pub length: f64,
    pub width_base: f64,
    pub width_tip: f64,
    pub gel_thickness_base: f64,
    pub gel_thickness_tip: f64,
    pub pitch_deg: f64,
    pub nail_length: f64,
    pub nail_width: f64,
    /// Compliant backing: the finger flexes lengthwise and wraps the grasped
    /// object, so its contact patch spans the geometric overlap along the
    /// finger instead of being limited to the static indentation footprint.
    /// Rigid-backed fingers (the traditional baseline) leave this false.
    #[serde(default)]
    pub compliant_backing: bool,
}

/// How [`FingerProfile::scaled`] treats transverse dimensions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScaleMode {
    /// Only longitudinal dimensions (length, nail length) scale.
    Longitudinal,
    /// Every linear dimension scales; angles are preserved.
    Uniform,
}

impl FingerProfile {
    pub fn new(
        length: f64,
        width_base: f64,
        width_tip: f64,
        gel_thickness_base: f64,
        gel_thickness_tip: f64,
        pitch_deg: f64,
        nail_length: f64,
        nail_width: f64,
    ) -> Result<Self> {
        let p = Self {
            length,
            width_base,
            width_tip,
            gel_thickness_base,
            gel_thickness_tip,
            pitch_deg,
            nail_length,
            nail_width,
            compliant_backing: false,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let dims = [
            self.length,
            self.width_base,
            self.width_tip,
            self.gel_thickness_base,
            self.gel_thickness_tip,
            self.pitch_deg,
            self.nail_length,
            self.nail_width,
        ];
        if dims.iter().any(|v| !v.is_finite()) {
            return Err(GraspError::InvalidConfig("finger dimensions must be finite".into()));
        }
        if !(self.length > 0.0) {
            return Err(GraspError::InvalidConfig(format!(
                "finger length must be positive, got {}",
                self.length
            )));
        }
        if !(self.width_tip > 0.0) || self.width_base < self.width_tip {
            return Err(GraspError::InvalidConfig(format!(
                "finger widths must satisfy width_base >= width_tip > 0, got base {} tip {}",
                self.width_base, self.width_tip
            )));
        }
        if self.gel_thickness_tip < 0.0 || self.gel_thickness_base < self.gel_thickness_tip {
            return Err(GraspError::InvalidConfig(format!(
                "gel thickness must satisfy base >= tip >= 0, got base {} tip {}",
                self.gel_thickness_base, self.gel_thickness_tip
            )));
        }
        if !(0.0..45.0).contains(&self.pitch_deg) {
            return Err(GraspError::OutOfRange {
                what: "backing pitch (degrees)",
                value: self.pitch_deg,
                min: 0.0,
                max: 45.0,
            });
        }
        if self.nail_length < 0.0 || self.nail_width < 0.0 {
            return Err(GraspError::InvalidConfig(
                "nail dimensions must be non-negative".into(),
            ));
        }
        Ok(())
    }

    /// Finger width at axial distance `s` from the base (linear taper).
    pub fn width_at(&self, s: f64) -> f64 {
        let t = (s / self.length).clamp(0.0, 1.0);
        self.width_base + (self.width_tip - self.width_base) * t
    }

    /// Gel pad thickness at axial distance `s` from the base.
    pub fn gel_thickness_at(&self, s: f64) -> f64 {
        let t = (s / self.length).clamp(0.0, 1.0);
        self.gel_thickness_base + (self.gel_thickness_tip - self.gel_thickness_base) * t
    }

    /// True when the finger carries no gel pad and contacts rigidly.
    pub fn is_rigid(&self) -> bool {
        self.gel_thickness_base == 0.0 && self.gel_thickness_tip == 0.0
    }

    /// Resize the finger to `new_length`. Longitudinal dimensions always
    /// scale by `new_length / length`; transverse dimensions and gel
    /// thickness follow only in [`ScaleMode::Uniform`]. Angles never change.
    pub fn scaled(&self, new_length: f64, mode: ScaleMode) -> Result<Self> {
        if !(new_length > 0.0) {
            return Err(GraspError::OutOfRange {
                what: "new finger length",
                value: new_length,
                min: f64::MIN_POSITIVE,
                max: f64::INFINITY,
            });
        }
        let f = new_length / self.length;
        let (wf, gf) = match mode {
            ScaleMode::Longitudinal => (1.0, 1.0),
            ScaleMode::Uniform => (f, f),
        };
        let mut scaled = Self::new(
            new_length,
            self.width_base * wf,
            self.width_tip * wf,
            self.gel_thickness_base * gf,
            self.gel_thickness_tip * gf,
            self.pitch_deg,
            self.nail_length * f,
            self.nail_width * wf,
        )?;
        scaled.compliant_backing = self.compliant_backing;
        Ok(scaled)
    }

    /// Builder-style toggle for the backing flexibility.
    pub fn with_compliant_backing(mut self, compliant: bool) -> Self {
        self.compliant_backing = compliant;
        self
    }
}

/// Finger arrangement on the two jaws.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Arrangement {
    /// One flat finger per jaw.
    FlatPair,
    /// Two mirrored fingers converging toward the tip on the lower jaw,
    /// one centered finger on the upper jaw.
    VPairPlusSingle,
}

/// Full gripper: finger set, jaw geometry and actuation budget.
///
/// For `VPairPlusSingle` the fingers are ordered `[v_plus_y, v_minus_y,
/// single]`; the two converging fingers must be identical profiles and the
/// single finger sits centered on the symmetry plane of the pair. For
/// `FlatPair` there are exactly two fingers, one per jaw.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GripperConfig {
    pub arrangement: Arrangement,
    pub fingers: Vec<FingerProfile>,
    /// Angle of each converging finger from the gripper centerline, degrees.
    pub v_half_angle_deg: f64,
    /// Separation of the converging pair's centerlines at the base, mm.
    pub base_separation: f64,
    pub jaw_opening_max: f64,
    /// Actuation force budget of the parallel jaw, N.
    pub f_max: f64,
    /// Axial offsets (mm from the finger base) of rigid stud contact points
    /// on the finger centerline. Used to model fully rigid baseline fingers
    /// that touch at discrete points instead of conforming; empty for normal
    /// gel-padded fingers.
    #[serde(default)]
    pub studs: Vec<f64>,
}

impl GripperConfig {
    pub fn flat_pair(
        fingers: [FingerProfile; 2],
        jaw_opening_max: f64,
        f_max: f64,
    ) -> Result<Self> {
        let g = Self {
            arrangement: Arrangement::FlatPair,
            fingers: fingers.to_vec(),
            v_half_angle_deg: 0.0,
            base_separation: 0.0,
            jaw_opening_max,
            f_max,
            studs: Vec::new(),
        };
        g.validate()?;
        Ok(g)
    }

    pub fn v_pair_plus_single(
        v_finger: FingerProfile,
        single_finger: FingerProfile,
        v_half_angle_deg: f64,
        base_separation: f64,
        jaw_opening_max: f64,
        f_max: f64,
    ) -> Result<Self> {
        let g = Self {
            arrangement: Arrangement::VPairPlusSingle,
            fingers: vec![v_finger.clone(), v_finger, single_finger],
            v_half_angle_deg,
            base_separation,
            jaw_opening_max,
            f_max,
            studs: Vec::new(),
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        for f in &self.fingers {
            f.validate()?;
        }
        if !self.base_separation.is_finite()
            || !self.v_half_angle_deg.is_finite()
            || !self.jaw_opening_max.is_finite()
            || !self.f_max.is_finite()
        {
            return Err(GraspError::InvalidConfig("gripper dimensions must be finite".into()));
        }
        if !(self.f_max > 0.0) {
            return Err(GraspError::InvalidConfig(format!(
                "actuation budget f_max must be positive, got {}",
                self.f_max
            )));
        }
        if !(self.jaw_opening_max > 0.0) {
            return Err(GraspError::InvalidConfig(format!(
                "jaw_opening_max must be positive, got {}",
                self.jaw_opening_max
            )));
        }
        match self.arrangement {
            Arrangement::FlatPair => {
                if self.fingers.len() != 2 {
                    return Err(GraspError::InvalidConfig(format!(
                        "flat pair needs exactly 2 fingers, got {}",
                        self.fingers.len()
                    )));
                }
            }
            Arrangement::VPairPlusSingle => {
                if self.fingers.len() != 3 {
                    return Err(GraspError::InvalidConfig(format!(
                        "v-pair-plus-single needs exactly 3 fingers, got {}",
                        self.fingers.len()
                    )));
                }
                if self.fingers[0] != self.fingers[1] {
                    return Err(GraspError::InvalidConfig(
                        "the two converging fingers must be identical (mirrored) profiles".into(),
                    ));
                }
                if !(self.base_separation > 0.0) {
                    return Err(GraspError::InvalidConfig(format!(
                        "base_separation must be positive, got {}",
                        self.base_separation
                    )));
                }
                if !(0.0..45.0).contains(&self.v_half_angle_deg) {
                    return Err(GraspError::OutOfRange {
                        what: "v_half_angle (degrees)",
                        value: self.v_half_angle_deg,
                        min: 0.0,
                        max: 45.0,
                    });
                }
            }
        }
        if self.studs.iter().any(|&s| !(s >= 0.0) || !s.is_finite()) {
            return Err(GraspError::InvalidConfig(
                "stud offsets must be finite and non-negative".into(),
            ));
        }
        Ok(())
    }

    /// Length of the converging fingers (`VPairPlusSingle`) or of the first
    /// flat finger.
    pub fn v_finger_length(&self) -> f64 {
        self.fingers[0].length
    }

    /// Longest finger on the gripper; used as the characteristic length for
    /// torque normalization.
    pub fn max_finger_length(&self) -> f64 {
        self.fingers.iter().fold(0.0_f64, |m, f| m.max(f.length))
    }

    /// Separation of the converging pair's centerlines at axial distance `s`
    /// from the base, clamped at zero past the point where they meet:
    /// `L(s) = base_separation - 2 s tan(v_half_angle)`.
    pub fn lever_arm(&self, s: f64) -> Result<f64> {
        if self.arrangement == Arrangement::FlatPair {
            return Err(GraspError::NoLeverArm);
        }
        let len = self.v_finger_length();
        if !(0.0..=len).contains(&s) {
            return Err(GraspError::OutOfRange {
                what: "arclength s",
                value: s,
                min: 0.0,
                max: len,
            });
        }
        let l = self.base_separation - 2.0 * s * deg_to_rad(self.v_half_angle_deg).tan();
        Ok(l.max(0.0))
    }

    /// Most distal grasp site whose jaw separation still clears
    /// `object_extent` with [`SITE_MARGIN`]. Larger objects map to sites
    /// closer to the base; an object exactly as wide as the base separation
    /// maps to `s = 0`.
    pub fn grasp_site_for_size(&self, object_extent: f64) -> Result<f64> {
        if self.arrangement == Arrangement::FlatPair {
            return Err(GraspError::NoLeverArm);
        }
        if object_extent < 0.0 {
            return Err(GraspError::OutOfRange {
                what: "object extent",
                value: object_extent,
                min: 0.0,
                max: self.base_separation,
            });
        }
        if object_extent > self.base_separation {
            return Err(GraspError::ObjectExceedsCapacity(format!(
                "object extent {} mm exceeds base separation {} mm",
                object_extent, self.base_separation
            )));
        }
        let len = self.v_finger_length();
        let needed = object_extent / (1.0 - SITE_MARGIN);
        let tan_v = deg_to_rad(self.v_half_angle_deg).tan();
        if tan_v == 0.0 {
            // Parallel converging fingers: any site works if the margin
            // clears, otherwise fall back to the base.
            return Ok(if self.base_separation >= needed { len } else { 0.0 });
        }
        let s = (self.base_separation - needed) / (2.0 * tan_v);
        Ok(s.clamp(0.0, len))
    }

    /// True when the single finger and the converging pair, all bent flat to
    /// zero pitch, can pass each other without their planar footprints
    /// overlapping, so the jaw closes to zero gap.
    ///
    /// All footprint bounds are linear in `s`, so overlap is decided by
    /// evaluating the clearance at the ends of the shared span plus the
    /// breakpoints where the governing linear term changes.
    pub fn interdigitation_check(&self) -> Result<bool> {
        if self.arrangement == Arrangement::FlatPair {
            return Err(GraspError::NoLeverArm);
        }
        let v = &self.fingers[0];
        let single = &self.fingers[2];
        let span = v.length.min(single.length);

        // Overlap at s requires all three of these to be positive:
        //   ws(s)            (single finger has width)
        //   wv(s)            (v finger has width)
        //   ws(s)+wv(s)-L(s) (their footprints actually cross)
        let fs = [
            |g: &Self, s: f64| g.fingers[2].width_at(s),
            |g: &Self, s: f64| g.fingers[0].width_at(s),
            |g: &Self, s: f64| {
                g.fingers[2].width_at(s) + g.fingers[0].width_at(s) - g.lever_arm_unclamped(s)
            },
        ];
        let mut candidates = vec![0.0, span];
        for i in 0..fs.len() {
            for j in (i + 1)..fs.len() {
                let (a0, a1) = (fs[i](self, 0.0), fs[i](self, span));
                let (b0, b1) = (fs[j](self, 0.0), fs[j](self, span));
                let denom = (a1 - a0) - (b1 - b0);
                if denom.abs() > 1e-12 {
                    let t = (b0 - a0) / denom;
                    if (0.0..=1.0).contains(&t) {
                        candidates.push(t * span);
                    }
                }
            }
        }
        let overlaps = candidates.iter().any(|&s| {
            fs.iter()
                .map(|f| f(self, s))
                .fold(f64::INFINITY, f64::min)
                > 0.0
        });
        Ok(!overlaps)
    }

    fn lever_arm_unclamped(&self, s: f64) -> f64 {
        self.base_separation - 2.0 * s * deg_to_rad(self.v_half_angle_deg).tan()
    }

    /// Geometrically similar gripper scaled by `factor`: all lengths scale,
    /// angles and the actuation budget are preserved.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor > 0.0) {
            return Err(GraspError::OutOfRange {
                what: "scale factor",
                value: factor,
                min: f64::MIN_POSITIVE,
                max: f64::INFINITY,
            });
        }
        let fingers = self
            .fingers
            .iter()
            .map(|f| f.scaled(f.length * factor, ScaleMode::Uniform))
            .collect::<Result<Vec<_>>>()?;
        let g = Self {
            arrangement: self.arrangement,
            fingers,
            v_half_angle_deg: self.v_half_angle_deg,
            base_separation: self.base_separation * factor,
            jaw_opening_max: self.jaw_opening_max * factor,
            f_max: self.f_max,
            studs: self.studs.iter().map(|s| s * factor).collect(),
        };
        g.validate()?;
        Ok(g)
    }

    /// Lateral footprint interval `[y_lo, y_hi]` of finger `idx` at axial
    /// distance `s` from the base, in the flattened jaw plane.
    pub fn footprint_y_range(&self, idx: usize, s: f64) -> Option<(f64, f64)> {
        let finger = &self.fingers[idx];
        if s < 0.0 || s > finger.length {
            return None;
        }
        let hw = finger.width_at(s) / 2.0;
        match (self.arrangement, idx) {
            (Arrangement::FlatPair, _) => Some((-hw, hw)),
            (Arrangement::VPairPlusSingle, 2) => Some((-hw, hw)),
            (Arrangement::VPairPlusSingle, 0) => {
                let c = self.lever_arm_unclamped(s) / 2.0;
                Some((c - hw, c + hw))
            }
            (Arrangement::VPairPlusSingle, 1) => {
                let c = self.lever_arm_unclamped(s) / 2.0;
                Some((-(c + hw), -(c - hw)))
            }
            _ => None,
        }
    }

    /// Finger indices on each jaw: (upper jaw, lower jaw). The single finger
    /// of a `VPairPlusSingle` gripper sits on the upper jaw.
    pub fn jaw_fingers(&self) -> (Vec<usize>, Vec<usize>) {
        match self.arrangement {
            Arrangement::FlatPair => (vec![0], vec![1]),
            Arrangement::VPairPlusSingle => (vec![2], vec![0, 1]),
        }
    }
}

/// Right-handed orthonormal frame of a grasp: origin at the grasp centroid,
/// `z` along the jaw-closure axis, `x` along the finger length.
#[derive(Debug, Clone, PartialEq)]
pub struct GraspFrame {
    pub origin: Vector3<f64>,
    pub x_axis: Unit<Vector3<f64>>,
    pub y_axis: Unit<Vector3<f64>>,
    pub z_axis: Unit<Vector3<f64>>,
}

impl GraspFrame {
    /// The canonical frame all analyses are expressed in.
    pub fn canonical() -> Self {
        Self {
            origin: Vector3::zeros(),
            x_axis: Vector3::x_axis(),
            y_axis: Vector3::y_axis(),
            z_axis: Vector3::z_axis(),
        }
    }

    pub fn new(
        origin: Vector3<f64>,
        x_axis: Vector3<f64>,
        y_axis: Vector3<f64>,
        z_axis: Vector3<f64>,
    ) -> Result<Self> {
        let tol = 1e-9;
        for v in [&x_axis, &y_axis, &z_axis] {
            if (v.norm() - 1.0).abs() > tol {
                return Err(GraspError::InvalidConfig("frame axes must be unit length".into()));
            }
        }
        if x_axis.dot(&y_axis).abs() > tol
            || y_axis.dot(&z_axis).abs() > tol
            || x_axis.dot(&z_axis).abs() > tol
        {
            return Err(GraspError::InvalidConfig("frame axes must be orthogonal".into()));
        }
        if (x_axis.cross(&y_axis) - z_axis).norm() > 1e-8 {
            return Err(GraspError::InvalidConfig("frame must be right-handed".into()));
        }
        Ok(Self {
            origin,
            x_axis: Unit::new_unchecked(x_axis),
            y_axis: Unit::new_unchecked(y_axis),
            z_axis: Unit::new_unchecked(z_axis),
        })
    }
}

//! SVG emission: grasp cross-sections (fingers, object outline, contact
//! markers, friction cones) and envelope bar charts. Pure string building,
//! deterministic output.

use std::fmt::Write as _;

use crate::analysis::ReportRow;
use crate::contact::ContactSet;
use crate::geometry::GripperConfig;
use crate::shape::{ObjectModel, ShapePrimitive};

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

struct Mapper {
    y0: f64,
    z1: f64,
    scale: f64,
    pad: f64,
}

impl Mapper {
    fn x(&self, y: f64) -> f64 {
        self.pad + (y - self.y0) * self.scale
    }
    fn y(&self, z: f64) -> f64 {
        self.pad + (self.z1 - z) * self.scale
    }
}

/// Cross-section of a resolved grasp in the `y`-`z` plane at the grasp
/// station: finger pads, object outline, one marker per contact and the
/// friction cone wedge at each contact.
pub fn cross_section_svg(
    gripper: &GripperConfig,
    object: &ObjectModel,
    set: &ContactSet,
    mu: f64,
    title: &str,
) -> String {
    let station = if set.contacts.is_empty() {
        0.0
    } else {
        set.contacts.iter().map(|c| c.position.x).sum::<f64>() / set.contacts.len() as f64
    };
    let (oy0, oy1) = object.y_range();
    let (oz0, oz1) = object.z_range();
    let se = (set.grasp_site_s + station).max(0.0);

    // Finger pad rectangles in the section plane.
    let pad_h = 4.0;
    let mut rects: Vec<(f64, f64, f64, f64, &str)> = Vec::new();
    let (upper, lower) = gripper.jaw_fingers();
    for &fi in &lower {
        if let Some((
            y_lo, y_hi)) = gripper.footprint_y_range(fi, se.min(gripper.fingers[fi].length)) {
            let z_top = set
                .contacts
                .iter()
                .filter(|c| c.jaw_sign < 0.0)
                .map(|c| c.position.z)
                .fold(oz0, f64::min);
            rects.push((y_lo, y_hi, z_top - pad_h, z_top, "finger lower"));
        }
    }
    for &fi in &upper {
        if let Some((y_lo, y_hi)) = gripper.footprint_y_range(fi, se.min(gripper.fingers[fi].length)) {
            let z_bot = set
                .contacts
                .iter()
                .filter(|c| c.jaw_sign > 0.0)
                .map(|c| c.position.z)
                .fold(oz1, f64::max);
            rects.push((y_lo, y_hi, z_bot, z_bot + pad_h, "finger upper"));
        }
    }

    let mut wy0 = oy0;
    let mut wy1 = oy1;
    let mut wz0 = oz0 - pad_h;
    let mut wz1 = oz1 + pad_h;
    for r in &rects {
        wy0 = wy0.min(r.0);
        wy1 = wy1.max(r.1);
        wz0 = wz0.min(r.2);
        wz1 = wz1.max(r.3);
    }
    let span_y = (wy1 - wy0).max(1.0);
    let span_z = (wz1 - wz0).max(1.0);
    let scale = (360.0 / span_y).min(260.0 / span_z);
    let m = Mapper { y0: wy0, z1: wz1, scale, pad: 30.0 };
    let width = 2.0 * m.pad + span_y * scale;
    let height = 2.0 * m.pad + span_z * scale + 16.0;

    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}">"#
    );
    let _ = writeln!(s, r#"<title>{}</title>"#, esc(title));
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="14" font-size="11" font-family="monospace">{}</text>"#,
        m.pad,
        esc(title)
    );

    for (y_lo, y_hi, z_lo, z_hi, class) in &rects {
        let _ = writeln!(
            s,
            r##"<rect class="{class}" x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="#d8c8a8" stroke="#806030" stroke-width="1"/>"##,
            m.x(*y_lo),
            m.y(*z_hi),
            (y_hi - y_lo) * scale,
            (z_hi - z_lo) * scale,
        );
    }

    // Object outline at the grasp station.
    match &object.shape {
        ShapePrimitive::Sphere { radius } => {
            let c = object.center();
            let dx = station - c.x;
            let r2 = radius * radius - dx * dx;
            let r = r2.max(0.0).sqrt();
            let _ = writeln!(
                s,
                r##"<circle class="object" cx="{:.2}" cy="{:.2}" r="{:.2}" fill="#a8c4e0" fill-opacity="0.7" stroke="#305880" stroke-width="1.2"/>"##,
                m.x(c.y),
                m.y(c.z),
                r * scale
            );
        }
        ShapePrimitive::Cylinder { radius, length } => {
            let c = object.center();
            let dx = station - c.x;
            let h = (radius * radius - dx * dx).max(0.0).sqrt();
            let _ = writeln!(
                s,
                r##"<rect class="object" x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" rx="4" fill="#a8c4e0" fill-opacity="0.7" stroke="#305880" stroke-width="1.2"/>"##,
                m.x(c.y - length / 2.0),
                m.y(c.z + h),
                length * scale,
                2.0 * h * scale
            );
        }
        _ => {
            // Box and prism: polygon section.
            let pts = section_outline(object);
            let path: Vec<String> =
                pts.iter().map(|(y, z)| format!("{:.2},{:.2}", m.x(*y), m.y(*z))).collect();
            let _ = writeln!(
                s,
                r##"<polygon class="object" points="{}" fill="#a8c4e0" fill-opacity="0.7" stroke="#305880" stroke-width="1.2"/>"##,
                path.join(" ")
            );
        }
    }

    // Friction cones and contact markers.
    let half = mu.atan();
    for c in &set.contacts {
        let (py, pz) = (c.position.y, c.position.z);
        let (ny, nz) = (c.normal.y, c.normal.z);
        let len = 9.0 / scale;
        if mu > 0.0 {
            for sign in [-1.0, 1.0] {
                let a = half * sign;
                let (sa, ca) = a.sin_cos();
                let ey = py + (ny * ca - nz * sa) * len;
                let ez = pz + (ny * sa + nz * ca) * len;
                let _ = writeln!(
                    s,
                    r##"<line class="cone" x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#c04040" stroke-width="0.8" stroke-dasharray="2,1.5"/>"##,
                    m.x(py),
                    m.y(pz),
                    m.x(ey),
                    m.y(ez)
                );
            }
        }
        let _ = writeln!(
            s,
            r##"<line class="normal" x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#208020" stroke-width="1.1"/>"##,
            m.x(py),
            m.y(pz),
            m.x(py + ny * 9.0 / scale),
            m.y(pz + nz * 9.0 / scale)
        );
        let _ = writeln!(
            s,
            r##"<circle class="contact" cx="{:.2}" cy="{:.2}" r="2.6" fill="#c03030" stroke="#601010" stroke-width="0.8"/>"##,
            m.x(py),
            m.y(pz)
        );
    }
    s.push_str("</svg>\n");
    s
}

fn section_outline(object: &ObjectModel) -> Vec<(f64, f64)> {
    let c = object.center();
    match &object.shape {
        ShapePrimitive::Cuboid { y, z, .. } => {
            let (hy, hz) = (y / 2.0, z / 2.0);
            rotate_shift(
                &[(-hy, -hz), (hy, -hz), (hy, hz), (-hy, hz)],
                object.pose.rot_x_deg,
                c.y,
                c.z,
            )
        }
        ShapePrimitive::ConvexPrism { section, .. } => {
            let pts: Vec<(f64, f64)> = section.iter().map(|p| (p[0], p[1])).collect();
            let n = pts.len() as f64;
            // Match the solver's centroid shift: mean via polygon centroid.
            let (mut area2, mut cy, mut cz) = (0.0, 0.0, 0.0);
            for i in 0..pts.len() {
                let a = pts[i];
                let b = pts[(i + 1) % pts.len()];
                let cr = a.0 * b.1 - b.0 * a.1;
                area2 += cr;
                cy += (a.0 + b.0) * cr;
                cz += (a.1 + b.1) * cr;
            }
            let _ = n;
            let (gy, gz) = (cy / (3.0 * area2), cz / (3.0 * area2));
            let local: Vec<(f64, f64)> = pts.iter().map(|p| (p.0 - gy, p.1 - gz)).collect();
            rotate_shift(&local, object.pose.rot_x_deg, c.y, c.z)
        }
        _ => Vec::new(),
    }
}

fn rotate_shift(pts: &[(f64, f64)], rot_deg: f64, cy: f64, cz: f64) -> Vec<(f64, f64)> {
    let (sin, cos) = rot_deg.to_radians().sin_cos();
    pts.iter().map(|(y, z)| (cy + y * cos - z * sin, cz + y * sin + z * cos)).collect()
}

/// Grouped bar chart of envelope components per gripper.
pub fn envelope_chart_svg(rows: &[&ReportRow], title: &str) -> String {
    let components: [(&str, Box<dyn Fn(&ReportRow) -> f64>); 4] = [
        ("tau_x [N*mm]", Box::new(|r: &ReportRow| r.envelope.as_ref().map_or(0.0, |e| e.tau_x))),
        ("tau_y [N*mm]", Box::new(|r: &ReportRow| r.envelope.as_ref().map_or(0.0, |e| e.tau_y))),
        ("tau_z [N*mm]", Box::new(|r: &ReportRow| r.envelope.as_ref().map_or(0.0, |e| e.tau_z))),
        ("f_min [N]", Box::new(|r: &ReportRow| r.envelope.as_ref().map_or(0.0, |e| e.f_min))),
    ];
    let group_w = 150.0;
    let bar_w = (group_w - 30.0) / rows.len().max(1) as f64;
    let chart_h = 150.0;
    let width = 40.0 + group_w * components.len() as f64;
    let height = chart_h + 90.0;

    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}">"#
    );
    let _ = writeln!(s, r#"<title>{}</title>"#, esc(title));
    let _ = writeln!(s, r#"<text x="20" y="16" font-size="12" font-family="monospace">{}</text>"#, esc(title));
    let palette = ["#3a6ea5", "#c0703a", "#4a9a5a", "#9a4a8a", "#708090"];
    for (ci, (label, getter)) in components.iter().enumerate() {
        let x0 = 30.0 + ci as f64 * group_w;
        let max_v = rows.iter().map(|r| getter(r)).fold(0.0_f64, f64::max).max(1e-12);
        for (ri, row) in rows.iter().enumerate() {
            let v = getter(row);
            let h = v / max_v * chart_h;
            let x = x0 + ri as f64 * bar_w;
            let color = palette[ri % palette.len()];
            let _ = writeln!(
                s,
                r#"<rect class="bar" x="{:.1}" y="{:.1}" width="{:.1}" height="{:.1}" fill="{}"/>"#,
                x,
                30.0 + chart_h - h,
                bar_w - 3.0,
                h,
                color
            );
            let _ = writeln!(
                s,
                r#"<text x="{:.1}" y="{:.1}" font-size="8" font-family="monospace" transform="rotate(45 {:.1} {:.1})">{} {:.3}</text>"#,
                x,
                chart_h + 42.0,
                x,
                chart_h + 42.0,
                esc(&row.gripper),
                v
            );
        }
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" font-size="10" font-family="monospace">{}</text>"#,
            x0,
            28.0,
            label
        );
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{run_scenario, scenario, AnalysisConfig, SiteSpec};
    use crate::contact::{close_jaws, ContactConfig};
    use crate::geometry::FingerProfile;
    use crate::shape::Pose;

    fn finger() -> FingerProfile {
        FingerProfile::new(100.0, 12.0, 6.0, 4.0, 4.0, 10.0, 8.0, 6.0).unwrap()
    }

    fn count_contacts(svg: &str) -> usize {
        svg.matches(r#"class="contact""#).count()
    }

    /// Minimal well-formedness scan: every opened tag closes in order.
    fn xml_well_formed(svg: &str) -> bool {
        let mut stack: Vec<String> = Vec::new();
        let mut rest = svg;
        while let Some(start) = rest.find('<') {
            let Some(end_rel) = rest[start..].find('>') else { return false };
            let tag = &rest[start + 1..start + end_rel];
            rest = &rest[start + end_rel + 1..];
            if tag.starts_with('?') || tag.starts_with('!') {
                continue;
            }
            if let Some(name) = tag.strip_prefix('/') {
                match stack.pop() {
                    Some(open) if open == name => {}
                    _ => return false,
                }
            } else if !tag.ends_with('/') {
                let name: String =
                    tag.chars().take_while(|c| !c.is_whitespace()).collect();
                stack.push(name);
            }
        }
        stack.is_empty()
    }

    #[test]
    fn flat_pair_circle_has_two_markers() {
        let g = GripperConfig::flat_pair([finger(), finger()], 60.0, 15.0).unwrap();
        let obj = ObjectModel::new(
            ShapePrimitive::Sphere { radius: 15.0 },
            Pose::default(),
            0.2,
            0.5,
        )
        .unwrap();
        let set = close_jaws(&g, &obj, 50.0, &ContactConfig::default()).unwrap();
        let svg = cross_section_svg(&g, &obj, &set, 0.5, "flat sphere");
        assert_eq!(count_contacts(&svg), 2);
        assert!(xml_well_formed(&svg));
    }

    #[test]
    fn v_circle_has_three_markers() {
        let g = GripperConfig::v_pair_plus_single(finger(), finger(), 10.0, 40.0, 60.0, 15.0)
            .unwrap();
        let obj = ObjectModel::new(
            ShapePrimitive::Sphere { radius: 15.0 },
            Pose::default(),
            0.2,
            0.5,
        )
        .unwrap();
        let site = g.grasp_site_for_size(30.0).unwrap();
        let set = close_jaws(&g, &obj, site, &ContactConfig::default()).unwrap();
        let svg = cross_section_svg(&g, &obj, &set, 0.5, "v sphere");
        assert_eq!(count_contacts(&svg), 3);
        assert!(xml_well_formed(&svg));
    }

    #[test]
    fn chart_is_well_formed() {
        let g = GripperConfig::flat_pair([finger(), finger()], 60.0, 15.0).unwrap();
        let obj = ObjectModel::new(
            ShapePrimitive::Sphere { radius: 15.0 },
            Pose::default(),
            0.2,
            0.5,
        )
        .unwrap();
        let row = run_scenario(
            &scenario("s", "flat", g, "ball", obj, SiteSpec::At(50.0)),
            &AnalysisConfig::default(),
        );
        let svg = envelope_chart_svg(&[&row], "envelopes");
        assert!(xml_well_formed(&svg));
        assert!(svg.contains("bar"));
    }
}

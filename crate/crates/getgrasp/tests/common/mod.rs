//! Shared oracles for the integration and acceptance suites. Everything in
//! here recomputes expected values through independent routes: coordinate
//! geometry instead of the lever-arm formula, polygon clipping instead of
//! the interval test, quadrature instead of closed forms, and brute-force
//! enumeration instead of the simplex path.

#![allow(dead_code)]

use getgrasp::analysis::SplitMix64;
use getgrasp::geometry::{FingerProfile, GripperConfig};
use getgrasp::wrench::WrenchGenerators;
use nalgebra::{Vector2, Vector6};

pub fn finger(
    length: f64,
    width_base: f64,
    width_tip: f64,
    gel_base: f64,
    gel_tip: f64,
) -> FingerProfile {
    FingerProfile::new(length, width_base, width_tip, gel_base, gel_tip, 10.0, 8.0, 5.0).unwrap()
}

/// Lever arm by explicit 2D construction: build both finger centerlines as
/// lines in the jaw plane and measure their separation at axial distance s.
pub fn lever_arm_by_line_intersection(base_separation: f64, v_half_angle_deg: f64, s: f64) -> f64 {
    let a = v_half_angle_deg.to_radians();
    // Each centerline starts at (0, +-base/2) and advances one unit in x per
    // tan(angle) units toward the centerline.
    let p_plus = Vector2::new(0.0, base_separation / 2.0);
    let dir_plus = Vector2::new(1.0, -a.tan());
    let p_minus = Vector2::new(0.0, -base_separation / 2.0);
    let dir_minus = Vector2::new(1.0, a.tan());
    let y_plus = p_plus.y + s * dir_plus.y / dir_plus.x;
    let y_minus = p_minus.y + s * dir_minus.y / dir_minus.x;
    (y_plus - y_minus).max(0.0)
}

/// Sutherland-Hodgman clip of convex polygon `subject` against convex
/// clip polygon `clip` (both CCW), followed by the shoelace area.
pub fn convex_clip_area(subject: &[(f64, f64)], clip: &[(f64, f64)]) -> f64 {
    let mut poly: Vec<(f64, f64)> = subject.to_vec();
    let n = clip.len();
    for i in 0..n {
        if poly.is_empty() {
            return 0.0;
        }
        let a = clip[i];
        let b = clip[(i + 1) % n];
        let inside = |p: (f64, f64)| (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0) >= 0.0;
        let mut out = Vec::new();
        for j in 0..poly.len() {
            let c = poly[j];
            let d = poly[(j + 1) % poly.len()];
            let c_in = inside(c);
            let d_in = inside(d);
            if c_in {
                out.push(c);
            }
            if c_in != d_in {
                // p = c + t (d - c) with cross(b - a, p - a) = 0.
                let denom = (b.0 - a.0) * (d.1 - c.1) - (b.1 - a.1) * (d.0 - c.0);
                if denom.abs() > 1e-15 {
                    let t = ((b.1 - a.1) * (c.0 - a.0) - (b.0 - a.0) * (c.1 - a.1)) / denom;
                    out.push((c.0 + t * (d.0 - c.0), c.1 + t * (d.1 - c.1)));
                }
            }
        }
        poly = out;
    }
    shoelace_area(&poly)
}

pub fn shoelace_area(poly: &[(f64, f64)]) -> f64 {
    if poly.len() < 3 {
        return 0.0;
    }
    let mut acc = 0.0;
    for i in 0..poly.len() {
        let (x0, y0) = poly[i];
        let (x1, y1) = poly[(i + 1) % poly.len()];
        acc += x0 * y1 - x1 * y0;
    }
    acc.abs() / 2.0
}

/// Flattened footprint polygons (CCW, in the (s, y) plane) for the
/// interdigitation oracle: the single finger and the +y converging finger.
pub fn footprint_polygons(g: &GripperConfig) -> (Vec<(f64, f64)>, Vec<(f64, f64)>) {
    let single = &g.fingers[2];
    let v = &g.fingers[0];
    let s_len = single.length;
    let v_len = v.length;
    let single_poly = vec![
        (0.0, -single.width_at(0.0) / 2.0),
        (s_len, -single.width_at(s_len) / 2.0),
        (s_len, single.width_at(s_len) / 2.0),
        (0.0, single.width_at(0.0) / 2.0),
    ];
    let c0 = g.base_separation / 2.0;
    let tan_v = g.v_half_angle_deg.to_radians().tan();
    let c1 = c0 - v_len * tan_v;
    let v_poly = vec![
        (0.0, c0 - v.width_at(0.0) / 2.0),
        (v_len, c1 - v.width_at(v_len) / 2.0),
        (v_len, c1 + v.width_at(v_len) / 2.0),
        (0.0, c0 + v.width_at(0.0) / 2.0),
    ];
    (single_poly, v_poly)
}

/// Polygon-overlap interdigitation oracle: the jaw closes to zero gap iff
/// the single finger's footprint overlaps neither converging footprint with
/// positive area.
pub fn interdigitation_by_polygon_overlap(g: &GripperConfig) -> bool {
    let (single, v_plus) = footprint_polygons(g);
    let v_minus: Vec<(f64, f64)> = v_plus.iter().rev().map(|&(s, y)| (s, -y)).collect();
    let a_plus = convex_clip_area(&single, &v_plus);
    let a_minus = convex_clip_area(&single, &v_minus);
    a_plus < 1e-9 && a_minus < 1e-9
}

/// 2D midpoint quadrature of the foundation pressure over a sphere's
/// indentation patch: integrate k * depth(x, y) over the disk where the
/// sphere dips below the offset plane.
pub fn sphere_indent_force_by_quadrature(k: f64, radius: f64, depth: f64, cells: usize) -> f64 {
    let rho_max = (2.0 * radius * depth - depth * depth).max(0.0).sqrt();
    if rho_max == 0.0 {
        return 0.0;
    }
    let h = 2.0 * rho_max / cells as f64;
    let mut total = 0.0;
    for i in 0..cells {
        let x = -rho_max + (i as f64 + 0.5) * h;
        for j in 0..cells {
            let y = -rho_max + (j as f64 + 0.5) * h;
            let r2 = x * x + y * y;
            if r2 > radius * radius {
                continue;
            }
            // Sphere lower surface relative to its lowest point, plane at
            // `depth` above that point.
            let pen = depth - (radius - (radius * radius - r2).sqrt());
            if pen > 0.0 {
                total += k * pen * h * h;
            }
        }
    }
    total
}

/// Same for a cylinder ridge lying across the pad.
pub fn cylinder_indent_force_by_quadrature(
    k: f64,
    radius: f64,
    length: f64,
    depth: f64,
    cells: usize,
) -> f64 {
    let a = (2.0 * radius * depth - depth * depth).max(0.0).sqrt();
    if a == 0.0 {
        return 0.0;
    }
    let h = 2.0 * a / cells as f64;
    let mut line = 0.0;
    for i in 0..cells {
        let x = -a + (i as f64 + 0.5) * h;
        let pen = depth - (radius - (radius * radius - x * x).sqrt());
        if pen > 0.0 {
            line += k * pen * h;
        }
    }
    line * length
}

/// Gaussian elimination with partial pivoting; `None` when singular.
pub fn solve_linear(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| {
            a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap()
        })?;
        if a[pivot][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in (col + 1)..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for k in (row + 1)..n {
            acc -= a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    Some(x)
}

/// Exhaustive basis-enumeration solve of the disturbance LP, rebuilt from
/// the generators independently of the simplex path: maximize alpha such
/// that the generator combination balances `alpha * direction` under the
/// per-contact caps.
pub fn max_disturbance_by_basis_enumeration(
    gens: &WrenchGenerators,
    direction: &Vector6<f64>,
    f_max: f64,
) -> f64 {
    // Standard form: columns = cone multipliers + alpha + slack per cap row;
    // rows = 6 equalities + one cap row per contact.
    let cap_scale = if gens.allocated_at > 0.0 { f_max / gens.allocated_at } else { 0.0 };
    let mut cols: Vec<Vec<f64>> = Vec::new();
    let mut objective: Vec<f64> = Vec::new();
    let n_contacts = gens.contacts.len();
    let rows = 6 + n_contacts;
    let mut contact_of_col: Vec<Option<usize>> = Vec::new();
    let scale = |w: &Vector6<f64>| {
        let mut v = *w;
        for i in 3..6 {
            v[i] /= gens.char_length;
        }
        v
    };
    for (ci, c) in gens.contacts.iter().enumerate() {
        assert!(c.torsion.is_none(), "oracle covers point-contact sets");
        for g in &c.cone {
            let gs = scale(g);
            let mut col = vec![0.0; rows];
            for r in 0..6 {
                col[r] = gs[r];
            }
            col[6 + ci] = 1.0;
            cols.push(col);
            objective.push(0.0);
            contact_of_col.push(Some(ci));
        }
    }
    let ds = scale(direction);
    let mut alpha_col = vec![0.0; rows];
    for r in 0..6 {
        alpha_col[r] = ds[r];
    }
    cols.push(alpha_col);
    objective.push(1.0);
    contact_of_col.push(None);
    for ci in 0..n_contacts {
        let mut col = vec![0.0; rows];
        col[6 + ci] = 1.0;
        cols.push(col);
        objective.push(0.0);
        contact_of_col.push(None);
    }
    let mut rhs = vec![0.0; rows];
    for (ci, c) in gens.contacts.iter().enumerate() {
        rhs[6 + ci] = c.cap * cap_scale;
    }

    let ncols = cols.len();
    let mut best = 0.0_f64;
    let mut choice: Vec<usize> = (0..rows).collect();
    loop {
        // Solve for this basis.
        let a: Vec<Vec<f64>> = (0..rows)
            .map(|r| choice.iter().map(|&c| cols[c][r]).collect())
            .collect();
        if let Some(x) = solve_linear(a, rhs.clone()) {
            if x.iter().all(|&v| v >= -1e-7) {
                let obj: f64 = choice
                    .iter()
                    .zip(&x)
                    .map(|(&c, &v)| objective[c] * v)
                    .sum();
                best = best.max(obj);
            }
        }
        // Next combination in lexicographic order.
        let mut i = rows;
        loop {
            if i == 0 {
                return best;
            }
            i -= 1;
            if choice[i] != i + ncols - rows {
                break;
            }
        }
        choice[i] += 1;
        for j in (i + 1)..rows {
            choice[j] = choice[j - 1] + 1;
        }
    }
}

/// Inscribed-ball radius of the convex hull of 6D points by explicit facet
/// enumeration: every affinely independent 6-subset spans a candidate facet
/// plane u.x = 1; keep those with all points on the inner side and minimize
/// the plane distance. Valid when the origin lies strictly inside.
pub fn epsilon_by_facet_enumeration(points: &[Vector6<f64>]) -> f64 {
    let n = points.len();
    assert!(n <= 16, "facet enumeration is for small instances");
    let mut best = f64::INFINITY;
    let mut idx = [0usize; 6];
    fn rec(
        points: &[Vector6<f64>],
        idx: &mut [usize; 6],
        depth: usize,
        start: usize,
        best: &mut f64,
    ) {
        if depth == 6 {
            let a: Vec<Vec<f64>> = idx.iter().map(|&i| points[i].iter().copied().collect()).collect();
            let b = vec![1.0; 6];
            if let Some(u) = solve_linear(a, b) {
                let un = u.iter().map(|v| v * v).sum::<f64>().sqrt();
                if un < 1e-12 {
                    return;
                }
                let all_inside = points.iter().all(|p| {
                    let dot: f64 = p.iter().zip(&u).map(|(a, b)| a * b).sum();
                    dot <= 1.0 + 1e-9
                });
                if all_inside {
                    *best = (*best).min(1.0 / un);
                }
            }
            return;
        }
        for i in start..points.len() {
            idx[depth] = i;
            rec(points, idx, depth + 1, i + 1, best);
        }
    }
    rec(points, &mut idx, 0, 0, &mut best);
    if best.is_finite() {
        best
    } else {
        0.0
    }
}

/// Ordinary least squares fit y = a + b x, returning (a, b, r_squared).
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let b = sxy / sxx;
    let a = my - b * mx;
    let ss_res: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let e = y - (a + b * x);
            e * e
        })
        .sum();
    let r2 = if syy > 0.0 { 1.0 - ss_res / syy } else { 1.0 };
    (a, b, r2)
}

/// Deterministic pseudo-random stream for oracle sweeps.
pub struct Rng(pub SplitMix64);

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng(SplitMix64(seed))
    }

    /// Uniform in [lo, hi).
    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (self.0.unit() + 1.0) / 2.0 * (hi - lo)
    }
}

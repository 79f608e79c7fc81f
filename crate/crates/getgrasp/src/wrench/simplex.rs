//! Dense two-phase simplex for the small LPs of grasp analysis.
//!
//! Problem sizes stay under a few hundred variables, so a dense tableau with
//! Bland's anti-cycling rule is deterministic, dependency-free and fast
//! enough. Maximization over non-negative variables with `<=` / `=` / `>=`
//! rows; negative right-hand sides are normalized by row negation.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

/// Maximize `objective . x` subject to the constraints, `x >= 0`.
#[derive(Debug, Clone)]
pub struct Lp {
    pub objective: Vec<f64>,
    pub constraints: Vec<Constraint>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<f64>, objective: f64 },
    Infeasible,
    Unbounded,
    /// Pivot limit hit; returned separately so callers can distinguish a
    /// genuine unbounded ray from solver stalling.
    Stalled,
}

const EPS: f64 = 1e-10;
const MAX_PIVOTS: usize = 100_000;

/// Solve the LP; on degenerate cycling, retry with a deterministic
/// right-hand-side perturbation that breaks the ties (the induced objective
/// error is bounded by the perturbation itself).
pub fn solve(lp: &Lp) -> LpOutcome {
    match solve_once(lp) {
        LpOutcome::Stalled => {}
        out => return out,
    }
    let scale = lp
        .constraints
        .iter()
        .map(|c| c.rhs.abs())
        .fold(1.0_f64, f64::max);
    for magnitude in [1e-9, 1e-7] {
        let mut perturbed = lp.clone();
        for (i, c) in perturbed.constraints.iter_mut().enumerate() {
            c.rhs += magnitude * scale * (i + 1) as f64;
        }
        match solve_once(&perturbed) {
            LpOutcome::Stalled => {}
            out => return out,
        }
    }
    LpOutcome::Stalled
}

fn solve_once(lp: &Lp) -> LpOutcome {
    let n = lp.objective.len();
    let mut constraints = lp.constraints.clone();
    for c in &mut constraints {
        debug_assert_eq!(c.coeffs.len(), n);
        if c.rhs < 0.0 {
            c.rhs = -c.rhs;
            for v in &mut c.coeffs {
                *v = -*v;
            }
            c.relation = match c.relation {
                Relation::Le => Relation::Ge,
                Relation::Ge => Relation::Le,
                Relation::Eq => Relation::Eq,
            };
        }
    }
    let m = constraints.len();
    let slack_count = constraints.iter().filter(|c| c.relation == Relation::Le).count();
    let surplus_count = constraints.iter().filter(|c| c.relation == Relation::Ge).count();
    let artificial_count = constraints
        .iter()
        .filter(|c| matches!(c.relation, Relation::Ge | Relation::Eq))
        .count();

    let slack_offset = n;
    let surplus_offset = slack_offset + slack_count;
    let artificial_offset = surplus_offset + surplus_count;
    let total = artificial_offset + artificial_count;

    let mut tableau = vec![vec![0.0; total + 1]; m + 1];
    let mut basis = vec![0usize; m];
    let (mut si, mut pi, mut ai) = (0usize, 0usize, 0usize);
    for (row, c) in constraints.iter().enumerate() {
        tableau[row][..n].copy_from_slice(&c.coeffs);
        tableau[row][total] = c.rhs;
        match c.relation {
            Relation::Le => {
                let col = slack_offset + si;
                si += 1;
                tableau[row][col] = 1.0;
                basis[row] = col;
            }
            Relation::Ge => {
                tableau[row][surplus_offset + pi] = -1.0;
                pi += 1;
                let col = artificial_offset + ai;
                ai += 1;
                tableau[row][col] = 1.0;
                basis[row] = col;
            }
            Relation::Eq => {
                let col = artificial_offset + ai;
                ai += 1;
                tableau[row][col] = 1.0;
                basis[row] = col;
            }
        }
    }

    if artificial_count > 0 {
        // Phase one: maximize -sum(artificials); objective row holds the
        // reduced costs, canonicalized for the artificial basis.
        for col in artificial_offset..total {
            tableau[m][col] = -1.0;
        }
        for row in 0..m {
            if basis[row] >= artificial_offset {
                for col in 0..=total {
                    let v = tableau[row][col];
                    tableau[m][col] += v;
                }
            }
        }
        match iterate(&mut tableau, &mut basis, |col| col < total) {
            Status::Optimal => {}
            Status::Unbounded => return LpOutcome::Unbounded,
            Status::Stalled => return LpOutcome::Stalled,
        }
        // The objective row accumulates the negated phase-one value, so a
        // positive entry here is leftover infeasibility.
        if tableau[m][total] > 1e-7 {
            return LpOutcome::Infeasible;
        }
        // Pivot leftover artificials out of the basis where possible.
        for row in 0..m {
            if basis[row] >= artificial_offset {
                if let Some(col) = (0..artificial_offset)
                    .find(|&c| tableau[row][c].abs() > 1e-9)
                {
                    pivot(&mut tableau, &mut basis, row, col);
                }
            }
        }
    }

    // Phase two.
    for col in 0..=total {
        tableau[m][col] = if col < n { lp.objective[col] } else { 0.0 };
    }
    for row in 0..m {
        let b = basis[row];
        if b < total {
            let factor = tableau[m][b];
            if factor.abs() > 1e-12 {
                for col in 0..=total {
                    let v = tableau[row][col];
                    tableau[m][col] -= factor * v;
                }
            }
        }
    }
    let status = iterate(&mut tableau, &mut basis, |col| col < artificial_offset);
    match status {
        Status::Optimal => {}
        Status::Unbounded => return LpOutcome::Unbounded,
        Status::Stalled => return LpOutcome::Stalled,
    }

    let mut x = vec![0.0; n];
    for row in 0..m {
        if basis[row] < n {
            x[basis[row]] = tableau[row][total];
        }
    }
    let objective = lp.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
    LpOutcome::Optimal { x, objective }
}

enum Status {
    Optimal,
    Unbounded,
    Stalled,
}

fn iterate<F: Fn(usize) -> bool>(
    tableau: &mut [Vec<f64>],
    basis: &mut [usize],
    allow: F,
) -> Status {
    let m = basis.len();
    let total = tableau[0].len() - 1;
    for _ in 0..MAX_PIVOTS {
        // Bland's rule: the lowest-index improving column enters.
        let entering = (0..total).find(|&c| allow(c) && tableau[m][c] > EPS);
        let Some(entering) = entering else {
            return Status::Optimal;
        };
        // Exact min-ratio with Bland's tie-break on the smallest basic
        // variable index; negative right-hand noise counts as zero so
        // degenerate ties stay exact.
        let mut leaving: Option<usize> = None;
        let mut best = f64::INFINITY;
        for row in 0..m {
            let a = tableau[row][entering];
            if a > EPS {
                let ratio = tableau[row][total].max(0.0) / a;
                let replace = match leaving {
                    None => true,
                    Some(cur) => ratio < best || (ratio == best && basis[row] < basis[cur]),
                };
                if replace {
                    best = ratio;
                    leaving = Some(row);
                }
            }
        }
        let Some(leaving) = leaving else {
            return Status::Unbounded;
        };
        pivot(tableau, basis, leaving, entering);
    }
    Status::Stalled
}

fn pivot(tableau: &mut [Vec<f64>], basis: &mut [usize], leaving: usize, entering: usize) {
    let rows = tableau.len();
    let total = tableau[0].len() - 1;
    let pivot_val = tableau[leaving][entering];
    for col in 0..=total {
        tableau[leaving][col] /= pivot_val;
    }
    for row in 0..rows {
        if row == leaving {
            continue;
        }
        let factor = tableau[row][entering];
        if factor.abs() < 1e-13 {
            continue;
        }
        for col in 0..=total {
            let v = tableau[leaving][col];
            tableau[row][col] -= factor * v;
        }
        tableau[row][entering] = 0.0;
    }
    basis[leaving] = entering;
}

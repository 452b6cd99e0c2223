//! Dense two-phase primal simplex with Bland's anti-cycling rule.
//!
//! Sized for the small LPs that come out of matrix games; no sparsity, no
//! factorization updates.

use crate::error::{Error, Result};

const PIVOT_EPS: f64 = 1e-11;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Maximize,
    Minimize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

/// Variable bounds; `None` means unbounded on that side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds {
    pub lower: Option<f64>,
    pub upper: Option<f64>,
}

impl Bounds {
    pub const NONNEGATIVE: Bounds = Bounds {
        lower: Some(0.0),
        upper: None,
    };
    pub const FREE: Bounds = Bounds {
        lower: None,
        upper: None,
    };
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    pub sense: Sense,
    pub objective: Vec<f64>,
    pub constraints: Vec<Constraint>,
    pub bounds: Vec<Bounds>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
}

impl LinearProgram {
    /// Nonnegative variables, no constraints yet.
    pub fn new(sense: Sense, objective: Vec<f64>) -> Self {
        let n = objective.len();
        LinearProgram {
            sense,
            objective,
            constraints: Vec::new(),
            bounds: vec![Bounds::NONNEGATIVE; n],
        }
    }

    pub fn constraint(mut self, coeffs: Vec<f64>, relation: Relation, rhs: f64) -> Self {
        self.constraints.push(Constraint { coeffs, relation, rhs });
        self
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        if self.bounds.len() != n {
            return Err(Error::Shape(format!("{} bounds for {n} variables", self.bounds.len())));
        }
        for (k, c) in self.constraints.iter().enumerate() {
            if c.coeffs.len() != n {
                return Err(Error::Shape(format!(
                    "constraint {k} has {} coefficients for {n} variables",
                    c.coeffs.len()
                )));
            }
        }
        let finite = self.objective.iter().all(|v| v.is_finite())
            && self
                .constraints
                .iter()
                .all(|c| c.rhs.is_finite() && c.coeffs.iter().all(|v| v.is_finite()));
        if !finite {
            return Err(Error::Domain("non-finite LP data".into()));
        }
        Ok(())
    }

    pub fn solve(&self) -> Result<LpSolution> {
        lp_solve(self)
    }
}

/// How an original variable maps onto nonnegative standard-form columns.
enum VarMap {
    /// `x = offset + col`
    Shift { col: usize, offset: f64 },
    /// `x = offset − col`
    Mirror { col: usize, offset: f64 },
    /// `x = pos − neg`
    Split { pos: usize, neg: usize },
}

pub fn lp_solve(lp: &LinearProgram) -> Result<LpSolution> {
    lp.validate()?;

    // Standard form: minimize c·s subject to rows·s (rel) rhs, s ≥ 0.
    let mut maps = Vec::with_capacity(lp.num_vars());
    let mut ncols = 0;
    let mut extra_rows: Vec<(usize, f64)> = Vec::new(); // col ≤ bound
    for b in &lp.bounds {
        let map = match (b.lower, b.upper) {
            (Some(l), u) => {
                if let Some(u) = u {
                    if u < l {
                        return Err(Error::Infeasible);
                    }
                    extra_rows.push((ncols, u - l));
                }
                VarMap::Shift { col: ncols, offset: l }
            }
            (None, Some(u)) => VarMap::Mirror { col: ncols, offset: u },
            (None, None) => {
                ncols += 1;
                VarMap::Split {
                    pos: ncols - 1,
                    neg: ncols,
                }
            }
        };
        ncols += 1;
        maps.push(map);
    }

    let sign = match lp.sense {
        Sense::Minimize => 1.0,
        Sense::Maximize => -1.0,
    };
    let mut cost = vec![0.0; ncols];
    for (c, m) in lp.objective.iter().zip(&maps) {
        let c = sign * c;
        match *m {
            VarMap::Shift { col, .. } => cost[col] += c,
            VarMap::Mirror { col, .. } => cost[col] -= c,
            VarMap::Split { pos, neg } => {
                cost[pos] += c;
                cost[neg] -= c;
            }
        }
    }

    let mut rows: Vec<(Vec<f64>, Relation, f64)> = Vec::new();
    for con in &lp.constraints {
        let mut row = vec![0.0; ncols];
        let mut rhs = con.rhs;
        for (a, m) in con.coeffs.iter().zip(&maps) {
            match *m {
                VarMap::Shift { col, offset } => {
                    row[col] += a;
                    rhs -= a * offset;
                }
                VarMap::Mirror { col, offset } => {
                    row[col] -= a;
                    rhs -= a * offset;
                }
                VarMap::Split { pos, neg } => {
                    row[pos] += a;
                    row[neg] -= a;
                }
            }
        }
        rows.push((row, con.relation, rhs));
    }
    for (col, ub) in extra_rows {
        let mut row = vec![0.0; ncols];
        row[col] = 1.0;
        rows.push((row, Relation::Le, ub));
    }

    let s = solve_standard(&cost, rows)?;

    let x = maps
        .iter()
        .map(|m| match *m {
            VarMap::Shift { col, offset } => offset + s[col],
            VarMap::Mirror { col, offset } => offset - s[col],
            VarMap::Split { pos, neg } => s[pos] - s[neg],
        })
        .collect::<Vec<_>>();
    let objective = lp.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
    Ok(LpSolution { x, objective })
}

struct Tableau {
    /// `m` constraint rows followed by the objective row; last column is the rhs.
    t: Vec<Vec<f64>>,
    basis: Vec<usize>,
    ncols: usize,
}

impl Tableau {
    fn m(&self) -> usize {
        self.basis.len()
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.t[r][c];
        for v in self.t[r].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.t[r].clone();
        for (k, row) in self.t.iter_mut().enumerate() {
            if k == r {
                continue;
            }
            let f = row[c];
            if f != 0.0 {
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
                row[c] = 0.0;
            }
        }
        self.basis[r] = c;
    }

    /// Loads `cost` (over the first `cost.len()` columns) into the objective
    /// row, expressed in terms of the current basis.
    fn set_objective(&mut self, cost: &[f64]) {
        let m = self.m();
        let mut obj = vec![0.0; self.ncols + 1];
        obj[..cost.len()].copy_from_slice(cost);
        for r in 0..m {
            let cb = obj[self.basis[r]];
            if cb != 0.0 {
                for (o, v) in obj.iter_mut().zip(&self.t[r]) {
                    *o -= cb * v;
                }
            }
        }
        self.t[m] = obj;
    }

    /// Minimizes the loaded objective over columns `< allowed`. Bland's rule:
    /// lowest-index improving column enters, ties in the ratio test go to the
    /// lowest-index basic variable.
    fn optimize(&mut self, allowed: usize) -> Result<()> {
        let m = self.m();
        loop {
            let enter = (0..allowed).find(|&c| self.t[m][c] < -PIVOT_EPS);
            let Some(c) = enter else { return Ok(()) };
            let mut leave: Option<(usize, f64)> = None;
            for r in 0..m {
                let a = self.t[r][c];
                if a > PIVOT_EPS {
                    let ratio = self.t[r][self.ncols] / a;
                    leave = match leave {
                        None => Some((r, ratio)),
                        Some((br, bratio)) => {
                            if ratio < bratio - 1e-12
                                || (ratio <= bratio + 1e-12 && self.basis[r] < self.basis[br])
                            {
                                Some((r, ratio))
                            } else {
                                Some((br, bratio))
                            }
                        }
                    };
                }
            }
            match leave {
                Some((r, _)) => self.pivot(r, c),
                None => return Err(Error::Unbounded),
            }
        }
    }
}

/// Minimizes `cost · s` over `s ≥ 0` subject to the given rows.
fn solve_standard(cost: &[f64], rows: Vec<(Vec<f64>, Relation, f64)>) -> Result<Vec<f64>> {
    let n = cost.len();
    let m = rows.len();
    if m == 0 {
        return if cost.iter().any(|&c| c < 0.0) {
            Err(Error::Unbounded)
        } else {
            Ok(vec![0.0; n])
        };
    }

    // Normalize to nonnegative right-hand sides.
    let rows: Vec<_> = rows
        .into_iter()
        .map(|(row, rel, rhs)| {
            if rhs < 0.0 {
                let flipped = match rel {
                    Relation::Le => Relation::Ge,
                    Relation::Ge => Relation::Le,
                    Relation::Eq => Relation::Eq,
                };
                (row.into_iter().map(|v| -v).collect::<Vec<_>>(), flipped, -rhs)
            } else {
                (row, rel, rhs)
            }
        })
        .collect();

    let n_slack = rows.iter().filter(|(_, r, _)| *r != Relation::Eq).count();
    let n_art = rows.iter().filter(|(_, r, _)| *r != Relation::Le).count();
    let ncols = n + n_slack + n_art;
    let art_start = n + n_slack;

    let mut t = vec![vec![0.0; ncols + 1]; m + 1];
    let mut basis = vec![0; m];
    let (mut s_idx, mut a_idx) = (n, art_start);
    for (k, (row, rel, rhs)) in rows.iter().enumerate() {
        t[k][..n].copy_from_slice(row);
        t[k][ncols] = *rhs;
        match rel {
            Relation::Le => {
                t[k][s_idx] = 1.0;
                basis[k] = s_idx;
                s_idx += 1;
            }
            Relation::Ge => {
                t[k][s_idx] = -1.0;
                s_idx += 1;
                t[k][a_idx] = 1.0;
                basis[k] = a_idx;
                a_idx += 1;
            }
            Relation::Eq => {
                t[k][a_idx] = 1.0;
                basis[k] = a_idx;
                a_idx += 1;
            }
        }
    }
    let mut tab = Tableau { t, basis, ncols };

    if n_art > 0 {
        let mut phase1 = vec![0.0; ncols];
        phase1[art_start..].iter_mut().for_each(|c| *c = 1.0);
        tab.set_objective(&phase1);
        tab.optimize(ncols)?;
        let infeas = -tab.t[m][ncols];
        let scale = 1.0 + rows.iter().map(|(_, _, r)| r.abs()).fold(0.0, f64::max);
        if infeas > 1e-9 * scale {
            return Err(Error::Infeasible);
        }
        // Drive remaining artificial variables out of the basis.
        let mut r = 0;
        while r < tab.m() {
            if tab.basis[r] >= art_start {
                match (0..art_start).find(|&c| tab.t[r][c].abs() > PIVOT_EPS) {
                    Some(c) => tab.pivot(r, c),
                    None => {
                        // Redundant row.
                        tab.t.remove(r);
                        tab.basis.remove(r);
                        continue;
                    }
                }
            }
            r += 1;
        }
        // Artificial columns are never allowed to re-enter.
        for row in tab.t.iter_mut() {
            for v in row[art_start..ncols].iter_mut() {
                *v = 0.0;
            }
        }
    }

    let mut full_cost = vec![0.0; ncols];
    full_cost[..n].copy_from_slice(cost);
    tab.set_objective(&full_cost);
    tab.optimize(art_start)?;

    let mut s = vec![0.0; n];
    for (r, &b) in tab.basis.iter().enumerate() {
        if b < n {
            s[b] = tab.t[r][ncols].max(0.0);
        }
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn single_variable_max() {
        let lp = LinearProgram::new(Sense::Maximize, vec![1.0]).constraint(vec![1.0], Relation::Le, 3.0);
        let s = lp.solve().unwrap();
        assert_abs_diff_eq!(s.x[0], 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.objective, 3.0, epsilon = 1e-12);
    }

    #[test]
    fn infeasible_and_unbounded() {
        let lp = LinearProgram::new(Sense::Maximize, vec![1.0]).constraint(vec![1.0], Relation::Le, -1.0);
        assert_eq!(lp.solve(), Err(Error::Infeasible));
        let lp = LinearProgram::new(Sense::Maximize, vec![1.0]).constraint(vec![-1.0], Relation::Le, 1.0);
        assert_eq!(lp.solve(), Err(Error::Unbounded));
        let lp = LinearProgram::new(Sense::Minimize, vec![1.0, 1.0])
            .constraint(vec![1.0, 1.0], Relation::Eq, 1.0)
            .constraint(vec![1.0, 1.0], Relation::Ge, 2.0);
        assert_eq!(lp.solve(), Err(Error::Infeasible));
    }

    #[test]
    fn shape_errors() {
        let lp = LinearProgram::new(Sense::Maximize, vec![1.0, 2.0]).constraint(vec![1.0], Relation::Le, 1.0);
        assert!(matches!(lp.solve(), Err(Error::Shape(_))));
    }

    #[test]
    fn textbook_problem() {
        // max 3x + 5y s.t. x ≤ 4, 2y ≤ 12, 3x + 2y ≤ 18 → (2, 6), 36
        let lp = LinearProgram::new(Sense::Maximize, vec![3.0, 5.0])
            .constraint(vec![1.0, 0.0], Relation::Le, 4.0)
            .constraint(vec![0.0, 2.0], Relation::Le, 12.0)
            .constraint(vec![3.0, 2.0], Relation::Le, 18.0);
        let s = lp.solve().unwrap();
        assert_abs_diff_eq!(s.x[0], 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.x[1], 6.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.objective, 36.0, epsilon = 1e-12);
    }

    #[test]
    fn equality_ge_and_free_variables() {
        // min x + y, x + y = 2, x - y ≥ -4, y free, x ∈ [0.5, 1]
        let mut lp = LinearProgram::new(Sense::Minimize, vec![1.0, 2.0])
            .constraint(vec![1.0, 1.0], Relation::Eq, 2.0)
            .constraint(vec![1.0, -1.0], Relation::Ge, -4.0);
        lp.bounds = vec![
            Bounds {
                lower: Some(0.5),
                upper: Some(1.0),
            },
            Bounds::FREE,
        ];
        // objective x + 2(2 − x) = 4 − x → x = 1, y = 1
        let s = lp.solve().unwrap();
        assert_abs_diff_eq!(s.x[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.x[1], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.objective, 3.0, epsilon = 1e-12);

        let mut lp = LinearProgram::new(Sense::Maximize, vec![1.0]).constraint(vec![1.0], Relation::Ge, -10.0);
        lp.bounds = vec![Bounds {
            lower: None,
            upper: Some(-2.0),
        }];
        assert_abs_diff_eq!(lp.solve().unwrap().x[0], -2.0, epsilon = 1e-12);
    }

    #[test]
    fn redundant_equalities() {
        let lp = LinearProgram::new(Sense::Maximize, vec![1.0, 1.0])
            .constraint(vec![1.0, 1.0], Relation::Eq, 1.0)
            .constraint(vec![2.0, 2.0], Relation::Eq, 2.0)
            .constraint(vec![1.0, 0.0], Relation::Le, 0.25);
        let s = lp.solve().unwrap();
        assert_abs_diff_eq!(s.objective, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn degenerate_cycling_example() {
        // Beale's example cycles under the textbook rule; Bland's rule terminates.
        let lp = LinearProgram::new(Sense::Minimize, vec![-0.75, 150.0, -0.02, 6.0])
            .constraint(vec![0.25, -60.0, -0.04, 9.0], Relation::Le, 0.0)
            .constraint(vec![0.5, -90.0, -0.02, 3.0], Relation::Le, 0.0)
            .constraint(vec![0.0, 0.0, 1.0, 0.0], Relation::Le, 1.0);
        let s = lp.solve().unwrap();
        assert_abs_diff_eq!(s.objective, -0.05, epsilon = 1e-12);
    }
}

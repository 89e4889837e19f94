//! Exact LP solving, membership checks, fibers and vertex enumeration over
//! [`ConstraintSystem`]s.

mod simplex;
mod standard;
mod vertices;

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};
use serde_json::{json, Map, Value};

use crate::consys::{ConstraintSystem, Family, LinRow, Objective, Relation, VarId};
use crate::error::{Error, Result};
use crate::rational::{self, Rational};

use simplex::{two_phase, Outcome};
use standard::StandardForm;

pub use vertices::{
    enumerate_vertices, enumerate_vertices_by_pivoting, Vertex, VertexSet, DEFAULT_BASIS_GUARD,
};

/// A point given by variable values; absent variables read as zero.
pub type Point = BTreeMap<VarId, Rational>;

pub fn value_of(point: &Point, v: &VarId) -> Rational {
    point.get(v).cloned().unwrap_or_else(Rational::zero)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

impl LpStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            LpStatus::Optimal => "optimal",
            LpStatus::Infeasible => "infeasible",
            LpStatus::Unbounded => "unbounded",
        }
    }
}

/// Final tableau, emitted only when requested.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableauDump {
    pub columns: Vec<String>,
    pub basis: Vec<String>,
    pub rows: Vec<Vec<Rational>>,
    pub reduced_costs: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Value of every system variable when optimal.
    pub point: Point,
    pub objective_value: Option<Rational>,
    /// Names of the basic columns (variables, `-v` for negative parts of free
    /// variables, `slack[label]`).
    pub basis: Vec<String>,
    pub pivots: usize,
    pub tableau: Option<TableauDump>,
}

impl LpSolution {
    fn without_point(status: LpStatus, pivots: usize) -> Self {
        LpSolution {
            status,
            point: Point::new(),
            objective_value: None,
            basis: Vec::new(),
            pivots,
            tableau: None,
        }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }

    pub fn value(&self, v: &VarId) -> Rational {
        value_of(&self.point, v)
    }

    /// Values of one variable family.
    pub fn family_part(&self, f: Family) -> Point {
        self.point.iter().filter(|(v, _)| v.family() == f).map(|(v, q)| (*v, q.clone())).collect()
    }

    /// Checks, exactly, that the point satisfies every row and sign
    /// constraint and that the reported objective is `obj . point`.
    pub fn certify(&self, sys: &ConstraintSystem, obj: &Objective) -> Result<()> {
        if !self.is_optimal() {
            return Ok(());
        }
        let report = check_membership(sys, &self.point)?;
        if !report.is_member() {
            return Err(Error::InvalidArgument(format!(
                "optimal point violates {} rows, first: {}",
                report.violations.len(),
                report.violations[0].label
            )));
        }
        let v = obj.value(|x| self.value(x));
        if Some(&v) != self.objective_value.as_ref() {
            return Err(Error::InvalidArgument(format!(
                "objective mismatch: reported {:?}, recomputed {v}",
                self.objective_value
            )));
        }
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        let point: Map<String, Value> = self
            .point
            .iter()
            .map(|(v, q)| (v.to_string(), Value::String(rational::format(q))))
            .collect();
        let mut out = json!({
            "status": self.status.as_str(),
            "objective": self.objective_value.as_ref().map(rational::format),
            "point": point,
            "basis": self.basis,
            "pivots": self.pivots,
        });
        if let Some(t) = &self.tableau {
            let fmt_row = |r: &Vec<Rational>| r.iter().map(rational::format).collect::<Vec<_>>();
            out["tableau"] = json!({
                "columns": t.columns,
                "basis": t.basis,
                "rows": t.rows.iter().map(fmt_row).collect::<Vec<_>>(),
                "reduced_costs": fmt_row(&t.reduced_costs),
            });
        }
        out
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SolveOptions {
    pub dump_tableau: bool,
}

/// Minimizes `obj` over `sys` with the two-phase simplex.
pub fn solve(sys: &ConstraintSystem, obj: &Objective) -> Result<LpSolution> {
    solve_with(sys, obj, SolveOptions::default())
}

pub fn solve_with(sys: &ConstraintSystem, obj: &Objective, opts: SolveOptions) -> Result<LpSolution> {
    obj.check_against(sys)?;
    let sf = StandardForm::build(sys);
    let mut cost = vec![Rational::zero(); sf.width()];
    for (v, c) in &obj.coefficients {
        let k = sys.column(v).expect("checked against the system");
        cost[sf.plus_col[k]] = c.clone();
        if let Some(mc) = sf.minus_col[k] {
            cost[mc] = -c.clone();
        }
    }
    let (outcome, tab) = two_phase(&sf, &cost);
    let status = match outcome {
        Outcome::Optimal => LpStatus::Optimal,
        Outcome::Infeasible => LpStatus::Infeasible,
        Outcome::Unbounded => LpStatus::Unbounded,
    };
    log::debug!(
        "solve: {} vars, {} rows -> {} after {} pivots",
        sys.var_count(),
        sys.row_count(),
        status.as_str(),
        tab.pivots
    );
    if status != LpStatus::Optimal {
        return Ok(LpSolution::without_point(status, tab.pivots));
    }
    let z = tab.point(sf.width());
    let values = sf.recover(&z, sys.var_count());
    let point: Point = sys.variables().iter().copied().zip(values).collect();
    let objective_value = Some(obj.value(|v| value_of(&point, v)));
    debug_assert_eq!(objective_value.as_ref(), Some(&tab.objective_value()));
    let basis = tab.basis.iter().map(|&c| sf.column_name(c, sys)).collect();
    let tableau = opts.dump_tableau.then(|| TableauDump {
        columns: (0..sf.width()).map(|c| sf.column_name(c, sys)).collect(),
        basis: tab.basis.iter().map(|&c| sf.column_name(c, sys)).collect(),
        rows: (0..tab.basis.len())
            .map(|i| {
                (0..sf.width())
                    .chain([tab.width])
                    .map(|j| tab.entry(i, j).clone())
                    .collect()
            })
            .collect(),
        reduced_costs: (0..sf.width()).map(|j| tab.entry(tab.basis.len(), j).clone()).collect(),
    });
    Ok(LpSolution { status, point, objective_value, basis, pivots: tab.pivots, tableau })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub label: String,
    pub lhs: Rational,
    pub relation: Relation,
    pub rhs: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MembershipReport {
    /// Rows the point violates, in row order.
    pub violations: Vec<Violation>,
    /// Sign-constrained variables with a negative value.
    pub negative: Vec<VarId>,
}

impl MembershipReport {
    pub fn is_member(&self) -> bool {
        self.violations.is_empty() && self.negative.is_empty()
    }

    pub fn violated_labels(&self) -> Vec<&str> {
        self.violations.iter().map(|v| v.label.as_str()).collect()
    }
}

/// Lists, exactly, every row and sign constraint the point violates.
pub fn check_membership(sys: &ConstraintSystem, point: &Point) -> Result<MembershipReport> {
    if let Some(v) = point.keys().find(|v| !sys.contains(v)) {
        return Err(Error::UnknownVariable(v.to_string()));
    }
    let mut report = MembershipReport::default();
    for row in sys.rows() {
        let lhs = row.lhs(|v| value_of(point, v));
        if !row.is_satisfied_by(&lhs) {
            report.violations.push(Violation {
                label: row.label.clone(),
                lhs,
                relation: row.relation,
                rhs: row.rhs.clone(),
            });
        }
    }
    report.negative = sys
        .nonneg()
        .iter()
        .filter(|v| value_of(point, v).is_negative())
        .copied()
        .collect();
    Ok(report)
}

/// Substitutes `fixed` into `sys`, leaving a system over the remaining
/// variables. Rows left without variables are checked directly; the second
/// value lists the labels of those that fail.
pub fn restrict(sys: &ConstraintSystem, fixed: &Point) -> Result<(ConstraintSystem, Vec<String>)> {
    if let Some(v) = fixed.keys().find(|v| !sys.contains(v)) {
        return Err(Error::UnknownVariable(v.to_string()));
    }
    let mut out = ConstraintSystem::new();
    for v in sys.variables() {
        if !fixed.contains_key(v) {
            out.add_var(*v, sys.is_nonneg(v));
        }
    }
    let mut failed = Vec::new();
    for v in fixed.keys() {
        if sys.is_nonneg(v) && fixed[v].is_negative() {
            failed.push(format!("nonneg[{v}]"));
        }
    }
    for row in sys.rows() {
        let mut rhs = row.rhs.clone();
        let mut terms = Vec::new();
        for (v, c) in &row.coefficients {
            match fixed.get(v) {
                Some(val) => rhs -= c * val,
                None => terms.push((*v, c.clone())),
            }
        }
        if terms.is_empty() {
            let ok = match row.relation {
                Relation::Eq => rhs.is_zero(),
                Relation::Le => !rhs.is_negative(),
            };
            if !ok {
                failed.push(row.label.clone());
            }
            continue;
        }
        let cmp = match row.relation {
            Relation::Eq => crate::consys::Cmp::Eq,
            Relation::Le => crate::consys::Cmp::Le,
        };
        out.add_row(LinRow::new(row.label.clone(), terms, cmp, rhs))?;
    }
    Ok((out, failed))
}

/// Decides whether the fiber over `fixed` is nonempty. `fixed` must give a
/// value to every variable of each family it touches. On success the
/// returned point contains the fixed values and one member of the fiber.
pub fn fiber_feasible(sys: &ConstraintSystem, fixed: &Point) -> Result<LpSolution> {
    let families: Vec<Family> = {
        let mut f: Vec<Family> = fixed.keys().map(VarId::family).collect();
        f.dedup();
        f.sort();
        f.dedup();
        f
    };
    if let Some(v) = sys
        .variables()
        .iter()
        .find(|v| families.contains(&v.family()) && !fixed.contains_key(v))
    {
        return Err(Error::InvalidArgument(format!(
            "fixed values must cover whole families; `{v}` is missing"
        )));
    }
    let (rest, failed) = restrict(sys, fixed)?;
    if !failed.is_empty() {
        log::debug!("fiber empty: fixed values violate {failed:?}");
        return Ok(LpSolution::without_point(LpStatus::Infeasible, 0));
    }
    let mut sol = solve(&rest, &Objective::zero())?;
    if sol.is_optimal() {
        for (v, q) in fixed {
            sol.point.insert(*v, q.clone());
        }
        sol.objective_value = Some(Rational::zero());
    }
    Ok(sol)
}

/// Convenience: a point from `(variable, value)` pairs.
pub fn point_from(pairs: impl IntoIterator<Item = (VarId, Rational)>) -> Point {
    pairs.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::consys::{build_lap_polytope, build_q1bar, objective_on_w, Cmp};
    use crate::instances::{brute_force_lap, Matrix};
    use crate::rational::{frac, int};

    fn tiny() -> ConstraintSystem {
        // min -x - y  s.t.  x + 2y <= 4, 3x + y <= 6, x, y >= 0
        let mut s = ConstraintSystem::new();
        let (x, y) = (VarId::w(1, 1), VarId::w(1, 2));
        s.add_var(x, true);
        s.add_var(y, true);
        s.add_row(LinRow::new("a", [(x, int(1)), (y, int(2))], Cmp::Le, int(4))).unwrap();
        s.add_row(LinRow::new("b", [(x, int(3)), (y, int(1))], Cmp::Le, int(6))).unwrap();
        s
    }

    #[test]
    fn textbook_lp() {
        let s = tiny();
        let obj = Objective::new([(VarId::w(1, 1), int(-1)), (VarId::w(1, 2), int(-1))]);
        let sol = solve(&s, &obj).unwrap();
        assert!(sol.is_optimal());
        assert_eq!(sol.value(&VarId::w(1, 1)), frac(8, 5));
        assert_eq!(sol.value(&VarId::w(1, 2)), frac(6, 5));
        assert_eq!(sol.objective_value, Some(frac(-14, 5)));
        sol.certify(&s, &obj).unwrap();
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut s = ConstraintSystem::new();
        let x = VarId::w(1, 1);
        s.add_var(x, true);
        s.add_row(LinRow::new("ge", [(x, int(1))], Cmp::Ge, int(2))).unwrap();
        s.add_row(LinRow::new("le", [(x, int(1))], Cmp::Le, int(1))).unwrap();
        assert_eq!(solve(&s, &Objective::zero()).unwrap().status, LpStatus::Infeasible);

        let mut s = ConstraintSystem::new();
        s.add_var(x, true);
        s.add_row(LinRow::new("ge", [(x, int(1))], Cmp::Ge, int(2))).unwrap();
        let sol = solve(&s, &Objective::new([(x, int(-1))])).unwrap();
        assert_eq!(sol.status, LpStatus::Unbounded);
    }

    #[test]
    fn free_variables() {
        // min x  s.t.  x >= -3, x free
        let mut s = ConstraintSystem::new();
        let x = VarId::w(1, 1);
        s.add_var(x, false);
        s.add_row(LinRow::new("lb", [(x, int(1))], Cmp::Ge, int(-3))).unwrap();
        let sol = solve(&s, &Objective::new([(x, int(1))])).unwrap();
        assert_eq!(sol.value(&x), int(-3));
    }

    #[test]
    fn lap_identity_cost() {
        let a = build_lap_polytope(3).unwrap();
        let c = Matrix::from_fn(3, |i, j| if i == j { int(0) } else { int(1) });
        let obj = objective_on_w(&c);
        let sol = solve(&a, &obj).unwrap();
        assert_eq!(sol.objective_value, Some(int(0)));
        for l in 1..=3 {
            assert_eq!(sol.value(&VarId::w(l, l)), int(1));
        }
        sol.certify(&a, &obj).unwrap();
    }

    #[test]
    fn lap_matches_brute_force() {
        let c = Matrix::from_i64(&[&[8, 3, 7, 6], &[2, 9, 5, 7], &[6, 4, 9, 4], &[5, 8, 1, 3]]).unwrap();
        let sol = solve(&build_lap_polytope(4).unwrap(), &objective_on_w(&c)).unwrap();
        assert_eq!(sol.objective_value.unwrap(), brute_force_lap(&c).unwrap().1);
    }

    #[test]
    fn membership_reports() {
        let a = build_lap_polytope(3).unwrap();
        let report = check_membership(&a, &Point::new()).unwrap();
        assert_eq!(report.violations.len(), 6);
        let mut p = Point::new();
        p.insert(VarId::y(0, 1), int(1));
        assert!(matches!(check_membership(&a, &p), Err(Error::UnknownVariable(_))));
        p.clear();
        p.insert(VarId::w(1, 1), int(-1));
        assert_eq!(check_membership(&a, &p).unwrap().negative, vec![VarId::w(1, 1)]);
    }

    #[test]
    fn fiber_rejects_bad_rows_sums() {
        let q = build_q1bar(4).unwrap();
        let fixed: Point = (1..=3)
            .flat_map(|l| (1..=3).map(move |s| (VarId::w(l, s), int(1))))
            .collect();
        assert_eq!(fiber_feasible(&q, &fixed).unwrap().status, LpStatus::Infeasible);
        let partial: Point = [(VarId::w(1, 1), int(1))].into_iter().collect();
        assert!(fiber_feasible(&q, &partial).is_err());
    }

    #[test]
    fn tableau_dump_is_gated() {
        let s = tiny();
        let obj = Objective::new([(VarId::w(1, 1), int(-1))]);
        assert!(solve(&s, &obj).unwrap().tableau.is_none());
        let sol = solve_with(&s, &obj, SolveOptions { dump_tableau: true }).unwrap();
        let t = sol.tableau.as_ref().unwrap();
        assert_eq!(t.rows.len(), 2);
        assert_eq!(t.columns.len(), 4);
        assert!(sol.to_json().get("tableau").is_some());
    }
}

//! Lifting maps from assignment vertices into the extended spaces,
//! extension checks against the assignment polytope, Fourier–Motzkin
//! projection for toy systems, and an exact membership oracle for the
//! convex hull of tour leg vectors.

use std::collections::BTreeSet;

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::consys::{build_lap_polytope, Cmp, ConstraintSystem, Family, LinRow, Objective, Relation, VarId};
use crate::error::{Error, Result};
use crate::instances::{
    all_tours, assignment_to_tour, permutations, tour_to_assignment, tour_to_legs,
    AssignmentVector, LegVector, NodeId, Tour, Triplet, TripletVector,
};
use crate::lp::{check_membership, solve, LpStatus, Point};
use crate::rational::{self, int, Rational};

/// Largest `m` for which lifts of all `m!` vertices are checked.
pub const MAX_LIFT_ENUMERATION: usize = 8;
/// Largest `m` for the hull-membership programs (one multiplier per tour).
pub const MAX_HULL_SIZE: usize = 7;
/// Default limit on rows produced during Fourier–Motzkin elimination.
pub const DEFAULT_FM_ROW_GUARD: usize = 100_000;

fn require_vertex(w: &AssignmentVector) -> Result<Tour> {
    assignment_to_tour(w).map_err(|_| {
        Error::NotAVertex("lifts are defined only at integral permutation matrices".into())
    })
}

/// Leg values of an assignment vertex: the first and last stage give the
/// legs out of and back into the depot, consecutive stages give inner legs.
pub fn lift_w_to_y(w: &AssignmentVector) -> Result<LegVector> {
    require_vertex(w)?;
    let m = w.m();
    let n = m + 1;
    let one = |node: NodeId| w.get(node).is_one();
    let mut y = LegVector::zeros(n);
    for i in 1..=m {
        if one(NodeId::new(i, 1)) {
            y.set(0, i, Rational::one());
        }
        if one(NodeId::new(i, m)) {
            y.set(i, 0, Rational::one());
        }
        for j in (1..=m).filter(|&j| j != i) {
            if (1..m).any(|r| one(NodeId::new(i, r)) && one(NodeId::new(j, r + 1))) {
                y.set(i, j, Rational::one());
            }
        }
    }
    Ok(y)
}

/// Triplet values of an assignment vertex: one exactly on triplets whose
/// three nodes all lie on the vertex's path.
pub fn lift_w_to_x(w: &AssignmentVector) -> Result<TripletVector> {
    require_vertex(w)?;
    let m = w.m();
    if m < 4 {
        return Err(Error::Degenerate(format!("triplet lifts need m >= 4, got {m}")));
    }
    let mut x = TripletVector::zeros(m);
    let order = require_vertex(w)?;
    let nodes: Vec<NodeId> =
        order.order().iter().enumerate().map(|(r, &l)| NodeId::new(l, r + 1)).collect();
    for p in 0..m {
        for r in p + 1..m {
            for s in r + 1..m {
                x.set(Triplet::new(nodes[p], nodes[r], nodes[s])?, Rational::one())?;
            }
        }
    }
    Ok(x)
}

fn w_point(w: &AssignmentVector) -> Point {
    w.nodes().map(|n| (VarId::W(n), w.get(n).clone())).collect()
}

fn add_legs(p: &mut Point, y: &LegVector) {
    for (i, j) in LegVector::pairs(y.n()) {
        p.insert(VarId::Y(i, j), y.get(i, j).clone());
    }
}

fn add_triplets(p: &mut Point, x: &TripletVector) {
    for (t, v) in x.iter() {
        p.insert(VarId::X(*t), v.clone());
    }
}

/// `(w, y)` for the leg extension.
pub fn lift_to_legs(w: &AssignmentVector) -> Result<Point> {
    let mut p = w_point(w);
    add_legs(&mut p, &lift_w_to_y(w)?);
    Ok(p)
}

/// `(w, x)` for the triplet extension.
pub fn lift_to_triplets(w: &AssignmentVector) -> Result<Point> {
    let mut p = w_point(w);
    add_triplets(&mut p, &lift_w_to_x(w)?);
    Ok(p)
}

/// `(w, x, y)` for the combined extension.
pub fn lift_to_all(w: &AssignmentVector) -> Result<Point> {
    let mut p = lift_to_triplets(w)?;
    add_legs(&mut p, &lift_w_to_y(w)?);
    Ok(p)
}

/// Outcome of lifting one assignment vertex into an extended system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiftReport {
    pub source: Tour,
    pub lifted: Point,
    pub feasible: bool,
    pub violated: Vec<String>,
}

impl LiftReport {
    pub fn to_json(&self) -> Value {
        json!({
            "source": self.source.to_string(),
            "lifted": point_json(&self.lifted, true),
            "feasible": self.feasible,
            "violated": self.violated,
        })
    }
}

/// Variable/value map as JSON, optionally skipping zeros.
pub fn point_json(p: &Point, nonzero_only: bool) -> Value {
    Value::Object(
        p.iter()
            .filter(|(_, v)| !nonzero_only || !v.is_zero())
            .map(|(k, v)| (k.to_string(), Value::String(rational::format(v))))
            .collect(),
    )
}

/// Result of checking that a system is an extension of the assignment
/// polytope.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EfVerdict {
    pub m: usize,
    /// Assignment rows (and `w >= 0`) found verbatim in the system, so the
    /// projection lies inside the assignment polytope.
    pub embedded: bool,
    pub missing_rows: Vec<String>,
    pub lifts_checked: usize,
    pub lifts_feasible: usize,
    /// Reports for lifts that failed.
    pub failures: Vec<LiftReport>,
}

impl EfVerdict {
    pub fn is_ef(&self) -> bool {
        self.embedded && self.lifts_feasible == self.lifts_checked
    }

    pub fn to_json(&self) -> Value {
        json!({
            "m": self.m,
            "embedded": self.embedded,
            "missing_rows": self.missing_rows,
            "lifts_checked": self.lifts_checked,
            "lifts_feasible": self.lifts_feasible,
            "is_ef": self.is_ef(),
            "failures": self.failures.iter().map(LiftReport::to_json).collect::<Vec<_>>(),
        })
    }
}

/// Checks both inclusions: the assignment rows are embedded in `sys`, and
/// every permutation matrix lifts to a feasible point via `lift`.
pub fn verify_ef_of_lap<F>(sys: &ConstraintSystem, lift: F, m: usize) -> Result<EfVerdict>
where
    F: Fn(&AssignmentVector) -> Result<Point> + Sync,
{
    if m > MAX_LIFT_ENUMERATION {
        return Err(Error::EnumerationRefused(format!(
            "{m}! lifts exceed the limit m <= {MAX_LIFT_ENUMERATION}"
        )));
    }
    let lap = build_lap_polytope(m)?;
    let missing_rows: Vec<String> = lap
        .rows()
        .iter()
        .filter(|r| !sys.rows().contains(r))
        .map(|r| r.label.clone())
        .chain(
            lap.variables()
                .iter()
                .filter(|v| !sys.is_nonneg(v))
                .map(|v| format!("nonneg[{v}]")),
        )
        .collect();
    let tours = all_tours(m);
    let reports: Vec<Result<LiftReport>> = tours
        .par_iter()
        .map(|t| {
            let w = tour_to_assignment(t);
            let lifted = lift(&w)?;
            let report = check_membership(sys, &lifted)?;
            let mut violated: Vec<String> =
                report.violations.iter().map(|v| v.label.clone()).collect();
            violated.extend(report.negative.iter().map(|v| format!("nonneg[{v}]")));
            Ok(LiftReport { source: t.clone(), feasible: violated.is_empty(), lifted, violated })
        })
        .collect();
    let mut failures = Vec::new();
    let mut feasible = 0;
    for r in reports {
        let r = r?;
        if r.feasible {
            feasible += 1;
        } else {
            failures.push(r);
        }
    }
    Ok(EfVerdict {
        m,
        embedded: missing_rows.is_empty(),
        missing_rows,
        lifts_checked: tours.len(),
        lifts_feasible: feasible,
        failures,
    })
}

/// A row `a . v <= b` as coefficients plus bound, used during elimination.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct Ineq {
    coef: Vec<(VarId, Rational)>,
    rhs: Rational,
}

impl Ineq {
    fn coefficient(&self, v: &VarId) -> Rational {
        self.coef.iter().find(|(x, _)| x == v).map(|(_, c)| c.clone()).unwrap_or_else(Rational::zero)
    }

    /// Scales so the largest absolute coefficient is one.
    fn normalized(mut self) -> Self {
        self.coef.retain(|(_, c)| !c.is_zero());
        self.coef.sort();
        if let Some(scale) = self.coef.iter().map(|(_, c)| c.abs()).max() {
            let inv = scale.recip();
            self.coef.iter_mut().for_each(|(_, c)| *c *= &inv);
            self.rhs *= &inv;
        }
        self
    }
}

/// Projects `sys` onto the variables outside `eliminate` by Fourier–Motzkin
/// elimination. Equalities are split into two inequalities and the sign
/// constraints of eliminated variables become rows. Duplicate rows (after
/// scaling) and trivially true `0 <= c` rows are dropped; nothing else is.
pub fn fourier_motzkin(sys: &ConstraintSystem, eliminate: Family, row_guard: usize) -> Result<ConstraintSystem> {
    let targets: Vec<VarId> =
        sys.variables().iter().filter(|v| v.family() == eliminate).copied().collect();
    if targets.is_empty() {
        return Ok(sys.clone());
    }
    let mut rows: BTreeSet<Ineq> = BTreeSet::new();
    let push = |rows: &mut BTreeSet<Ineq>, coef: Vec<(VarId, Rational)>, rhs: Rational| {
        rows.insert(Ineq { coef, rhs }.normalized());
    };
    for r in sys.rows() {
        let coef: Vec<(VarId, Rational)> = r.coefficients.iter().map(|(v, c)| (*v, c.clone())).collect();
        push(&mut rows, coef.clone(), r.rhs.clone());
        if r.relation == Relation::Eq {
            push(&mut rows, coef.into_iter().map(|(v, c)| (v, -c)).collect(), -r.rhs.clone());
        }
    }
    for v in &targets {
        if sys.is_nonneg(v) {
            push(&mut rows, vec![(*v, int(-1))], Rational::zero());
        }
    }
    for v in &targets {
        let (mut pos, mut neg, mut keep) = (Vec::new(), Vec::new(), BTreeSet::new());
        for r in std::mem::take(&mut rows) {
            let c = r.coefficient(v);
            if c.is_positive() {
                pos.push((c, r));
            } else if c.is_negative() {
                neg.push((-c, r));
            } else {
                keep.insert(r);
            }
        }
        for (cp, p) in &pos {
            for (cn, n) in &neg {
                // p/cp + n/cn cancels v
                let mut coef: Vec<(VarId, Rational)> = Vec::new();
                for (x, a) in p.coef.iter().map(|(x, a)| (x, a / cp)).chain(n.coef.iter().map(|(x, a)| (x, a / cn))) {
                    match coef.iter_mut().find(|(y, _)| y == x) {
                        Some((_, b)) => *b += a,
                        None => coef.push((*x, a)),
                    }
                }
                let rhs = &p.rhs / cp + &n.rhs / cn;
                let row = Ineq { coef, rhs }.normalized();
                if row.coef.is_empty() && !row.rhs.is_negative() {
                    continue;
                }
                keep.insert(row);
                if keep.len() > row_guard {
                    return Err(Error::EnumerationRefused(format!(
                        "Fourier-Motzkin produced more than {row_guard} rows eliminating {v}"
                    )));
                }
            }
        }
        keep.retain(|r| !(r.coef.is_empty() && !r.rhs.is_negative()));
        rows = keep;
    }
    let mut out = ConstraintSystem::new();
    for v in sys.variables().iter().filter(|v| v.family() != eliminate) {
        out.add_var(*v, sys.is_nonneg(v));
    }
    for (k, r) in rows.into_iter().enumerate() {
        out.add_row(LinRow::new(format!("fm[{k}]"), r.coef, Cmp::Le, r.rhs))?;
    }
    Ok(out)
}

/// Drops inequality rows implied by the others: a row goes when its left
/// side, maximized over the remaining rows, cannot exceed its bound.
/// Costs one LP per inequality row.
pub fn remove_redundant(sys: &ConstraintSystem) -> Result<ConstraintSystem> {
    let mut kept: Vec<LinRow> = sys.rows().to_vec();
    let mut k = 0;
    while k < kept.len() {
        if kept[k].relation == Relation::Eq {
            k += 1;
            continue;
        }
        let mut rest = ConstraintSystem::new();
        for v in sys.variables() {
            rest.add_var(*v, sys.is_nonneg(v));
        }
        for (i, r) in kept.iter().enumerate() {
            if i != k {
                rest.add_row(r.clone())?;
            }
        }
        let row = &kept[k];
        let obj = Objective::new(row.coefficients.iter().map(|(v, c)| (*v, -c.clone())));
        let sol = solve(&rest, &obj)?;
        let implied = match sol.status {
            LpStatus::Infeasible => true,
            LpStatus::Unbounded => false,
            LpStatus::Optimal => -sol.objective_value.expect("optimal") <= row.rhs,
        };
        if implied {
            kept.remove(k);
        } else {
            k += 1;
        }
    }
    let mut out = ConstraintSystem::new();
    for v in sys.variables() {
        out.add_var(*v, sys.is_nonneg(v));
    }
    for r in kept {
        out.add_row(r)?;
    }
    Ok(out)
}

/// Whether every point of `inner` satisfies every row and sign constraint
/// of `outer`, decided by maximizing each row of `outer` over `inner`.
/// Both systems must be over the same variables.
pub fn contains(outer: &ConstraintSystem, inner: &ConstraintSystem) -> Result<bool> {
    if let Some(v) = outer.variables().iter().find(|v| !inner.contains(v)) {
        return Err(Error::UnknownVariable(v.to_string()));
    }
    for r in outer.rows() {
        let obj = Objective::new(r.coefficients.iter().map(|(v, c)| (*v, c.clone())));
        let max = solve(inner, &obj.negated())?;
        match max.status {
            LpStatus::Infeasible => return Ok(true),
            LpStatus::Unbounded => return Ok(false),
            LpStatus::Optimal => {
                if -max.objective_value.expect("optimal") > r.rhs {
                    return Ok(false);
                }
            }
        }
        if r.relation == Relation::Eq {
            let min = solve(inner, &obj)?;
            match min.status {
                LpStatus::Optimal if min.objective_value.expect("optimal") >= r.rhs => {}
                LpStatus::Infeasible => return Ok(true),
                _ => return Ok(false),
            }
        }
    }
    for v in outer.nonneg() {
        let min = solve(inner, &Objective::new([(*v, int(1))]))?;
        match min.status {
            LpStatus::Optimal if !min.objective_value.expect("optimal").is_negative() => {}
            LpStatus::Infeasible => return Ok(true),
            _ => return Ok(false),
        }
    }
    Ok(true)
}

/// Outcome of a convex-hull membership program.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HullVerdict {
    pub member: bool,
    /// Positive weights of a certifying convex combination, when a member.
    pub weights: Vec<(Tour, Rational)>,
    /// Coordinates outside `[0, 1]`, which alone rule out membership.
    pub box_violations: Vec<(VarId, Rational)>,
}

impl HullVerdict {
    pub fn to_json(&self) -> Value {
        json!({
            "member": self.member,
            "weights": self.weights.iter().map(|(t, q)| json!({"tour": t.to_string(), "weight": rational::format(q)})).collect::<Vec<_>>(),
            "box_violations": self.box_violations.iter().map(|(v, q)| json!({"var": v.to_string(), "value": rational::format(q)})).collect::<Vec<_>>(),
        })
    }
}

fn box_violations(p: &Point) -> Vec<(VarId, Rational)> {
    p.iter()
        .filter(|(_, q)| q.is_negative() || **q > Rational::one())
        .map(|(v, q)| (*v, q.clone()))
        .collect()
}

/// Solves `sum_k l_k * vertex_k = target, sum_k l_k = 1, l >= 0` exactly.
fn hull_program(vertices: &[Point], coords: &[VarId], target: &Point, tours: &[Tour]) -> Result<HullVerdict> {
    let mut sys = ConstraintSystem::new();
    for k in 0..vertices.len() {
        sys.add_var(VarId::L(k), true);
    }
    for c in coords {
        let terms = vertices
            .iter()
            .enumerate()
            .filter_map(|(k, p)| p.get(c).filter(|q| !q.is_zero()).map(|q| (VarId::L(k), q.clone())));
        let rhs = target.get(c).cloned().unwrap_or_else(Rational::zero);
        sys.add_row(LinRow::new(format!("coord[{c}]"), terms, Cmp::Eq, rhs))?;
    }
    sys.add_row(LinRow::new(
        "convexity",
        (0..vertices.len()).map(|k| (VarId::L(k), int(1))),
        Cmp::Eq,
        int(1),
    ))?;
    let sol = solve(&sys, &Objective::zero())?;
    let weights = if sol.is_optimal() {
        tours
            .iter()
            .enumerate()
            .filter_map(|(k, t)| {
                let q = sol.value(&VarId::L(k));
                (!q.is_zero()).then(|| (t.clone(), q))
            })
            .collect()
    } else {
        Vec::new()
    };
    Ok(HullVerdict { member: sol.is_optimal(), weights, box_violations: box_violations(target) })
}

fn require_hull_size(m: usize) -> Result<()> {
    if m > MAX_HULL_SIZE {
        Err(Error::EnumerationRefused(format!(
            "{m}! hull multipliers exceed the limit m <= {MAX_HULL_SIZE}"
        )))
    } else {
        Ok(())
    }
}

/// Whether `y` lies in the convex hull of the leg vectors of all tours on
/// `y.n()` cities.
pub fn tsp_polytope_member(y: &LegVector) -> Result<HullVerdict> {
    let n = y.n();
    require_hull_size(n - 1)?;
    let tours = all_tours(n - 1);
    let coords: Vec<VarId> = LegVector::pairs(n).into_iter().map(|(i, j)| VarId::Y(i, j)).collect();
    let vertices = tours
        .iter()
        .map(|t| {
            let yt = tour_to_legs(t, n)?;
            Ok(LegVector::pairs(n).into_iter().map(|(i, j)| (VarId::Y(i, j), yt.get(i, j).clone())).collect())
        })
        .collect::<Result<Vec<Point>>>()?;
    let target: Point = LegVector::pairs(n).into_iter().map(|(i, j)| (VarId::Y(i, j), y.get(i, j).clone())).collect();
    hull_program(&vertices, &coords, &target, &tours)
}

/// Writes `w` as a convex combination of permutation matrices when
/// possible. A basic solution uses at most `(m-1)^2 + 1` of them.
pub fn assignment_decomposition(w: &AssignmentVector) -> Result<HullVerdict> {
    let m = w.m();
    require_hull_size(m)?;
    let tours: Vec<Tour> = permutations(m).into_iter().map(Tour::new).collect::<Result<_>>()?;
    let coords: Vec<VarId> = w.nodes().map(VarId::W).collect();
    let vertices: Vec<Point> = tours.iter().map(|t| w_point(&tour_to_assignment(t))).collect();
    hull_program(&vertices, &coords, &w_point(w), &tours)
}

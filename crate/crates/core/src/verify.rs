//! Reproducible verification suites. Each suite runs a batch of exact
//! checks and condenses them into a [`TheoremReport`].

use std::time::Instant;

use num_traits::{One, Signed};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::consys::{
    build_lap_polytope, build_q0_triplet, build_q1bar, build_q2bar, objective_on_w, triplet_cost_vector,
    Family, Objective, VarId,
};
use crate::error::{Error, Result};
use crate::instances::{
    all_tours, assignment_to_tour, brute_force_lap, brute_force_tsp, matrix_to_json, tour_cost,
    tour_to_assignment, AssignmentVector, CostMatrix, LegVector, Matrix, NodeId, Tour, TspInstance,
};
use crate::lp::{
    check_membership, enumerate_vertices, fiber_feasible, restrict, solve, value_of, LpSolution, Point,
    DEFAULT_BASIS_GUARD,
};
use crate::projection::{
    assignment_decomposition, lift_to_legs, lift_w_to_x, point_json, tsp_polytope_member, verify_ef_of_lap,
};
use crate::rational::{format, frac, int, Rational};

/// Largest entry of a random cost matrix; entries are uniform integers in
/// `[0, RANDOM_COST_MAX]`.
pub const RANDOM_COST_MAX: i64 = 100;

/// Aggregate outcome of one suite.
#[derive(Debug, Clone, PartialEq)]
pub struct TheoremReport {
    pub theorem: String,
    pub params: Value,
    pub trials: usize,
    pub passed: usize,
    /// Exact data of the first failing trial, enough to replay it.
    pub counterexample: Option<Value>,
    pub ms: u128,
    /// Suite-specific output (per-instance gaps, echoed points, ...).
    pub details: Value,
}

impl TheoremReport {
    pub fn pass(&self) -> bool {
        self.counterexample.is_none() && self.passed == self.trials
    }

    pub fn to_json(&self) -> Value {
        json!({
            "theorem": self.theorem,
            "params": self.params,
            "trials": self.trials,
            "passed": self.passed,
            "counterexample": self.counterexample,
            "ms": self.ms as u64,
            "details": self.details,
        })
    }

    /// One line per report for terminal output.
    pub fn summary(&self) -> String {
        format!(
            "{:<16} {:>5}/{:<5} {}  ({} ms)",
            self.theorem,
            self.passed,
            self.trials,
            if self.pass() { "PASS" } else { "FAIL" },
            self.ms
        )
    }
}

struct Tally {
    trials: usize,
    passed: usize,
    counterexample: Option<Value>,
}

/// Runs `check` on every case in parallel. A case passes when `check`
/// returns `None`; the first failure in case order is kept.
fn run_cases<T, F>(cases: &[T], check: F) -> Result<Tally>
where
    T: Sync,
    F: Fn(usize, &T) -> Result<Option<Value>> + Sync,
{
    let outcomes: Vec<Result<Option<Value>>> =
        cases.par_iter().enumerate().map(|(k, c)| check(k, c)).collect();
    let mut tally = Tally { trials: cases.len(), passed: 0, counterexample: None };
    for o in outcomes {
        match o? {
            None => tally.passed += 1,
            Some(cx) => {
                tally.counterexample.get_or_insert(cx);
            }
        }
    }
    Ok(tally)
}

fn report(theorem: &str, params: Value, tally: Tally, start: Instant, details: Value) -> TheoremReport {
    TheoremReport {
        theorem: theorem.to_string(),
        params,
        trials: tally.trials,
        passed: tally.passed,
        counterexample: tally.counterexample,
        ms: start.elapsed().as_millis(),
        details,
    }
}

/// `count` seeded square matrices of the given size with entries in
/// `[0, RANDOM_COST_MAX]`; with `zero_diagonal` the diagonal is zero.
pub fn random_matrices(size: usize, count: usize, seed: u64, zero_diagonal: bool) -> Vec<Matrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            Matrix::from_fn(size, |i, j| {
                let v = rng.random_range(0..=RANDOM_COST_MAX);
                if zero_diagonal && i == j {
                    int(0)
                } else {
                    int(v)
                }
            })
        })
        .collect()
}

/// Random TSP instances on `n` cities.
pub fn random_instances(n: usize, count: usize, seed: u64) -> Result<Vec<TspInstance>> {
    random_matrices(n, count, seed, true).into_iter().map(TspInstance::new).collect()
}

fn certified(sys: &crate::consys::ConstraintSystem, obj: &Objective) -> Result<LpSolution> {
    let sol = solve(sys, obj)?;
    sol.certify(sys, obj)?;
    Ok(sol)
}

fn optimum(sol: &LpSolution, what: &str) -> Result<Rational> {
    sol.objective_value
        .clone()
        .ok_or_else(|| Error::InvalidArgument(format!("{what} is {}", sol.status.as_str())))
}

fn w_part(sol: &LpSolution, m: usize) -> AssignmentVector {
    let mut w = AssignmentVector::zeros(m);
    for l in 1..=m {
        for s in 1..=m {
            let n = NodeId::new(l, s);
            w.set(n, sol.value(&VarId::W(n)));
        }
    }
    w
}

fn w_to_point(w: &AssignmentVector) -> Point {
    w.nodes().map(|n| (VarId::W(n), w.get(n).clone())).collect()
}

/// Checks one cost matrix for the LAP / leg-extension equivalence. Returns
/// `None` when every check passes, otherwise the failing data.
pub fn lap_lp1_trial(c: &CostMatrix) -> Result<Option<Value>> {
    let m = c.size();
    let obj = objective_on_w(c);
    let (w_oracle, oracle) = brute_force_lap(c)?;
    let lap = certified(&build_lap_polytope(m)?, &obj)?;
    let q1 = build_q1bar(m + 1)?;
    let lp1 = certified(&q1, &obj)?;
    let lap_opt = optimum(&lap, "LAP")?;
    let lp1_opt = optimum(&lp1, "LP1")?;
    let fail = |why: &str, extra: Value| {
        Ok(Some(json!({
            "reason": why,
            "c": matrix_to_json(c),
            "oracle": format(&oracle),
            "lap": format(&lap_opt),
            "lp1": format(&lp1_opt),
            "extra": extra,
        })))
    };
    if lap_opt != oracle || lp1_opt != oracle {
        return fail("optimal values differ", Value::Null);
    }
    let w_star = w_part(&lp1, m);
    if w_star.dot(c) != oracle || !w_star.is_doubly_stochastic() {
        return fail("w-part of the LP1 optimizer is not LAP-optimal", point_json(&w_to_point(&w_star), true));
    }
    if !w_star.is_integral() {
        let dec = assignment_decomposition(&w_star)?;
        if !dec.member || dec.weights.len() > m * m - 2 * m + 2 {
            return fail("fractional optimizer has no small convex decomposition", dec.to_json());
        }
    }
    let fixed = w_to_point(&w_oracle);
    let fiber = fiber_feasible(&q1, &fixed)?;
    if !fiber.is_optimal() {
        return fail("fiber over the LAP optimizer is empty", point_json(&fixed, true));
    }
    let (rest, failed) = restrict(&q1, &fixed)?;
    let resolved = solve(&rest, &Objective::zero())?;
    if !failed.is_empty() || !resolved.is_optimal() || obj.value(|v| value_of(&fiber.point, v)) != oracle {
        return fail("objective not preserved with w fixed", point_json(&fiber.point, true));
    }
    Ok(None)
}

/// Exact equality of the assignment optimum and its leg-extended version on
/// `trials` random cost matrices of size `m`.
pub fn verify_equivalence_lap_lp1(m: usize, trials: usize, seed: u64) -> Result<TheoremReport> {
    if !(1..=5).contains(&m) {
        return Err(Error::InvalidArgument(format!("m must be in 1..=5, got {m}")));
    }
    let start = Instant::now();
    let cases = random_matrices(m, trials, seed, false);
    let tally = run_cases(&cases, |_, c| lap_lp1_trial(c))?;
    Ok(report(
        "equiv-lap-lp1",
        json!({"m": m, "seed": seed}),
        tally,
        start,
        Value::Null,
    ))
}

/// Optimal values over the triplet system, with and without the leg block.
pub struct Lp0Lp2 {
    pub lp0: LpSolution,
    pub lp2: LpSolution,
}

pub fn solve_lp0_lp2(inst: &TspInstance, extra_cost: &Objective) -> Result<Lp0Lp2> {
    let obj = triplet_cost_vector(inst)?;
    let lp0 = certified(&build_q0_triplet(inst.m())?, &obj)?;
    let obj2 = obj.plus(extra_cost);
    let lp2 = certified(&build_q2bar(inst.n())?, &obj2)?;
    Ok(Lp0Lp2 { lp0, lp2 })
}

fn lp0_lp2_check(inst: &TspInstance, extra_cost: &Objective) -> Result<Option<Value>> {
    let Lp0Lp2 { lp0, lp2 } = solve_lp0_lp2(inst, extra_cost)?;
    let (o0, o2) = (optimum(&lp0, "LP0")?, optimum(&lp2, "LP2")?);
    let fail = |why: &str| {
        Ok(Some(json!({
            "reason": why,
            "d": matrix_to_json(inst.costs()),
            "lp0": format(&o0),
            "lp2": format(&o2),
        })))
    };
    if o0 != o2 {
        return fail("optimal values differ");
    }
    let mut wx = lp2.family_part(Family::W);
    wx.extend(lp2.family_part(Family::X));
    let q0 = build_q0_triplet(inst.m())?;
    if !check_membership(&q0, &wx)?.is_member() {
        return fail("(w, x)-part of the LP2 optimizer is infeasible for LP0");
    }
    if triplet_cost_vector(inst)?.value(|v| value_of(&wx, v)) != o0 {
        return fail("(w, x)-part of the LP2 optimizer misses the LP0 optimum");
    }
    if !fiber_feasible(&build_q2bar(inst.n())?, &wx)?.is_optimal() {
        return fail("leg fiber over the LP2 optimizer is empty");
    }
    Ok(None)
}

/// `None` when LP0 and LP2 agree on `inst`, otherwise the failing data.
pub fn lp0_lp2_trial(inst: &TspInstance) -> Result<Option<Value>> {
    lp0_lp2_check(inst, &Objective::zero())
}

/// Runs the LP0/LP2 comparison with unit cost added to every leg out of
/// the depot. Those legs sum to one on the leg block, so the two optima
/// must differ by exactly one; returns whether the comparison flags it.
pub fn lp0_lp2_negative_control(inst: &TspInstance) -> Result<bool> {
    let extra = Objective::new((1..inst.n()).map(|i| (VarId::Y(0, i), int(1))));
    Ok(lp0_lp2_check(inst, &extra)?.is_some())
}

/// Exact equality of the triplet-system optimum with and without the leg
/// block on `trials` random instances on `n` cities.
pub fn verify_equivalence_lp0_lp2(n: usize, trials: usize, seed: u64) -> Result<TheoremReport> {
    if !(5..=6).contains(&n) {
        return Err(Error::InvalidArgument(format!("n must be 5 or 6, got {n}")));
    }
    let start = Instant::now();
    let cases = random_instances(n, trials, seed)?;
    let tally = run_cases(&cases, |_, inst| lp0_lp2_trial(inst))?;
    let control = match cases.first() {
        Some(inst) => lp0_lp2_negative_control(inst)?,
        None => true,
    };
    let mut rep = report("equiv-lp0-lp2", json!({"n": n, "seed": seed}), tally, start, json!({"negative_control_flagged": control}));
    if !control {
        rep.counterexample.get_or_insert(json!({"reason": "negative control went undetected"}));
    }
    Ok(rep)
}

/// For every tour, the triplet costs of its lift equal the tour cost.
pub fn verify_applied_costs(inst: &TspInstance) -> Result<TheoremReport> {
    let m = inst.m();
    if !(4..=6).contains(&m) {
        return Err(Error::InvalidArgument(format!("m must be in 4..=6, got {m}")));
    }
    let start = Instant::now();
    let tally = applied_costs_tally(inst)?;
    Ok(report("applied-costs", json!({"n": inst.n(), "d": matrix_to_json(inst.costs())}), tally, start, Value::Null))
}

fn applied_costs_tally(inst: &TspInstance) -> Result<Tally> {
    let obj = triplet_cost_vector(inst)?;
    let tours = all_tours(inst.m());
    run_cases(&tours, |_, t| {
        let x = lift_w_to_x(&tour_to_assignment(t))?;
        let lifted: Point = x.iter().map(|(t, v)| (VarId::X(*t), v.clone())).collect();
        let got = obj.value(|v| value_of(&lifted, v));
        let want = tour_cost(inst, t)?;
        Ok((got != want).then(|| {
            json!({"tour": t.to_string(), "d": matrix_to_json(inst.costs()), "triplet_cost": format(&got), "tour_cost": format(&want)})
        }))
    })
}

/// Applied-cost check on `count` random instances for each `n` in `ns`.
pub fn verify_applied_costs_random(ns: &[usize], count: usize, seed: u64) -> Result<TheoremReport> {
    let start = Instant::now();
    let mut total = Tally { trials: 0, passed: 0, counterexample: None };
    for &n in ns {
        if !(5..=7).contains(&n) {
            return Err(Error::InvalidArgument(format!("n must be in 5..=7, got {n}")));
        }
        for inst in random_instances(n, count, seed.wrapping_add(n as u64))? {
            let t = applied_costs_tally(&inst)?;
            total.trials += t.trials;
            total.passed += t.passed;
            if total.counterexample.is_none() {
                total.counterexample = t.counterexample;
            }
        }
    }
    Ok(report("applied-costs", json!({"n": ns, "instances_per_n": count, "seed": seed}), total, start, Value::Null))
}

/// LP0 value, tour optimum and gap for one instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundRow {
    pub lp0: Rational,
    pub tour: Rational,
    pub best_tour: Tour,
    pub w_integral: bool,
}

impl BoundRow {
    pub fn gap(&self) -> Rational {
        &self.tour - &self.lp0
    }

    pub fn holds(&self) -> bool {
        !self.lp0.is_negative() && self.lp0 <= self.tour
    }

    pub fn to_json(&self) -> Value {
        json!({
            "lp0": format(&self.lp0),
            "tour": format(&self.tour),
            "best_tour": self.best_tour.to_string(),
            "gap": format(&self.gap()),
            "w_integral": self.w_integral,
        })
    }
}

/// Solves LP0 on a nonnegative instance and compares it with the tour
/// optimum.
pub fn lp0_bound(inst: &TspInstance) -> Result<BoundRow> {
    if !inst.is_nonnegative() {
        return Err(Error::InvalidInstance("the bound study needs nonnegative costs".into()));
    }
    let m = inst.m();
    if !(4..=5).contains(&m) {
        return Err(Error::InvalidArgument(format!("m must be 4 or 5, got {m}")));
    }
    let obj = triplet_cost_vector(inst)?;
    let sol = certified(&build_q0_triplet(m)?, &obj)?;
    let lp0 = optimum(&sol, "LP0")?;
    let (best_tour, tour) = brute_force_tsp(inst)?;
    Ok(BoundRow { lp0, tour, best_tour, w_integral: w_part(&sol, m).is_integral() })
}

fn bound_report(params: Value, cases: &[TspInstance], start: Instant) -> Result<TheoremReport> {
    let rows: Vec<Result<BoundRow>> = cases.par_iter().map(lp0_bound).collect();
    let rows: Vec<BoundRow> = rows.into_iter().collect::<Result<_>>()?;
    let mut tally = Tally { trials: rows.len(), passed: 0, counterexample: None };
    for (inst, r) in cases.iter().zip(&rows) {
        if r.holds() {
            tally.passed += 1;
        } else if tally.counterexample.is_none() {
            tally.counterexample = Some(json!({"d": matrix_to_json(inst.costs()), "row": r.to_json()}));
        }
    }
    let details = json!({"instances": rows.iter().map(BoundRow::to_json).collect::<Vec<_>>()});
    Ok(report("bound-study", params, tally, start, details))
}

/// `0 <= LP0 <= tour optimum` on a single instance.
pub fn lp0_bound_study(inst: &TspInstance) -> Result<TheoremReport> {
    let start = Instant::now();
    bound_report(json!({"n": inst.n(), "d": matrix_to_json(inst.costs())}), std::slice::from_ref(inst), start)
}

/// `0 <= LP0 <= tour optimum` on `trials` random instances.
pub fn lp0_bound_study_random(n: usize, trials: usize, seed: u64) -> Result<TheoremReport> {
    let start = Instant::now();
    let cases = random_instances(n, trials, seed)?;
    bound_report(json!({"n": n, "seed": seed}), &cases, start)
}

/// Every permutation vertex lifts into the leg extension, for each size.
pub fn verify_lemma1(ms: &[usize]) -> Result<TheoremReport> {
    let start = Instant::now();
    let mut tally = Tally { trials: 0, passed: 0, counterexample: None };
    let mut details = Vec::new();
    for &m in ms {
        let verdict = verify_ef_of_lap(&build_q1bar(m + 1)?, lift_to_legs, m)?;
        tally.trials += verdict.lifts_checked;
        tally.passed += verdict.lifts_feasible;
        if !verdict.is_ef() && tally.counterexample.is_none() {
            tally.counterexample = Some(verdict.to_json());
        }
        details.push(json!({"m": m, "lifts": verdict.lifts_checked, "embedded": verdict.embedded, "is_ef": verdict.is_ef()}));
    }
    Ok(report("lemma1", json!({"m": ms}), tally, start, Value::Array(details)))
}

/// The fractional point of the leg extension at `n = 5` together with
/// the two tours whose mixture gives its `w` part.
pub struct FractionalPoint {
    pub w: AssignmentVector,
    pub y: LegVector,
    pub tours: [Tour; 2],
    pub weights: [Rational; 2],
}

pub fn fractional_point() -> FractionalPoint {
    let mut w = AssignmentVector::zeros(4);
    for (l, s) in [(1, 1), (2, 2), (4, 3), (3, 4)] {
        w.set(NodeId::new(l, s), frac(1, 4));
    }
    for (l, s) in [(4, 1), (3, 2), (1, 3), (2, 4)] {
        w.set(NodeId::new(l, s), frac(3, 4));
    }
    let mut y = LegVector::zeros(5);
    for (i, j, v) in [
        (0, 1, frac(1, 4)),
        (3, 0, frac(1, 4)),
        (0, 4, frac(3, 4)),
        (2, 0, frac(3, 4)),
        (3, 1, frac(1, 2)),
        (1, 2, frac(1, 2)),
        (4, 3, int(2)),
    ] {
        y.set(i, j, v);
    }
    FractionalPoint {
        w,
        y,
        tours: [Tour::new(vec![1, 2, 4, 3]).expect("tour"), Tour::new(vec![4, 3, 1, 2]).expect("tour")],
        weights: [frac(1, 4), frac(3, 4)],
    }
}

impl FractionalPoint {
    pub fn point(&self) -> Point {
        let mut p = w_to_point(&self.w);
        for (i, j) in LegVector::pairs(5) {
            p.insert(VarId::Y(i, j), self.y.get(i, j).clone());
        }
        p
    }
}

/// The fractional point lies in the leg extension, its legs are outside
/// the tour polytope, and its `w` part is the stated mixture of two tours.
pub fn verify_lemma2_counterexample() -> Result<TheoremReport> {
    let start = Instant::now();
    let pt = fractional_point();
    let q1 = build_q1bar(5)?;
    let membership = check_membership(&q1, &pt.point())?;
    let hull = tsp_polytope_member(&pt.y)?;
    let mix = tour_to_assignment(&pt.tours[0])
        .scaled(&pt.weights[0])
        .add(&tour_to_assignment(&pt.tours[1]).scaled(&pt.weights[1]));
    let residual = pt.w.sub(&mix);
    let box_flag = pt.y.get(4, 3) > &Rational::one();
    let hats: Vec<String> = pt.tours.iter().map(|t| assignment_to_tour(&tour_to_assignment(t)).map(|t| t.to_string())).collect::<Result<_>>()?;
    let checks = [
        ("feasible in leg extension", membership.is_member()),
        ("not in tour polytope", !hull.member),
        ("box check y[4,3] > 1", box_flag && hull.box_violations.iter().any(|(v, _)| *v == VarId::Y(4, 3))),
        ("w is the stated mixture", residual.is_zero()),
        ("tours", hats == ["0->1->2->4->3->0", "0->4->3->1->2->0"]),
    ];
    let failed: Vec<&str> = checks.iter().filter(|(_, ok)| !ok).map(|(c, _)| *c).collect();
    let tally = Tally {
        trials: checks.len(),
        passed: checks.len() - failed.len(),
        counterexample: (!failed.is_empty()).then(|| {
            json!({"failed": failed, "violated_rows": membership.violated_labels()})
        }),
    };
    let details = json!({
        "point": point_json(&pt.point(), true),
        "violated_rows": membership.violated_labels(),
        "hull": hull.to_json(),
        "tours": hats,
        "weights": pt.weights.iter().map(format).collect::<Vec<_>>(),
        "residual_zero": residual.is_zero(),
    });
    Ok(report("lemma2", json!({"n": 5}), tally, start, details))
}

/// Maximizes `y[4,3]` over the leg extension at `n = 5`. Any value above
/// one forces a fractional optimal vertex, since integral `w` allow at
/// most one unit on a leg; the fractional point certifies the value 2.
pub fn verify_nonintegrality() -> Result<TheoremReport> {
    let start = Instant::now();
    let q1 = build_q1bar(5)?;
    let obj = Objective::new([(VarId::Y(4, 3), int(-1))]);
    let sol = certified(&q1, &obj)?;
    let max = -optimum(&sol, "probe")?;
    let fractional: Vec<String> = sol
        .point
        .iter()
        .filter(|(_, q)| !q.is_integer())
        .map(|(v, q)| format!("{v}={}", format(q)))
        .collect();
    let certificate = check_membership(&q1, &fractional_point().point())?.is_member();
    let checks = [max >= int(2), !fractional.is_empty(), certificate];
    let passed = checks.iter().filter(|c| **c).count();
    let tally = Tally {
        trials: checks.len(),
        passed,
        counterexample: (passed != checks.len()).then(|| json!({"max": format(&max), "point": point_json(&sol.point, true)})),
    };
    let details = json!({
        "max_y43": format(&max),
        "vertex": point_json(&sol.point, true),
        "fractional_coordinates": fractional,
        "certified_by_fractional_point": certificate,
    });
    Ok(report("nonintegrality", json!({"n": 5}), tally, start, details))
}

/// The assignment polytope has exactly the permutation matrices as
/// vertices, checked by exhaustive basis enumeration.
pub fn verify_birkhoff(ms: &[usize]) -> Result<TheoremReport> {
    let start = Instant::now();
    let cases: Vec<usize> = ms.to_vec();
    let tally = run_cases(&cases, |_, &m| {
        let vs = enumerate_vertices(&build_lap_polytope(m)?, DEFAULT_BASIS_GUARD)?;
        let tours = all_tours(m);
        let all_perms = tours.iter().all(|t| vs.contains(&w_to_point(&tour_to_assignment(t))));
        let ok = vs.len() == tours.len() && vs.integral_count() == vs.len() && all_perms;
        Ok((!ok).then(|| json!({"m": m, "vertices": vs.len(), "integral": vs.integral_count()})))
    })?;
    Ok(report("birkhoff", json!({"m": ms}), tally, start, Value::Null))
}

/// Looks for fractional vertices of the triplet system at `m = 4` by
/// minimizing random objectives; reports how many optima were fractional.
/// Full enumeration is out of reach at this size.
pub fn probe_triplet_vertices(trials: usize, seed: u64) -> Result<Value> {
    let q0 = build_q0_triplet(4)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let objectives: Vec<Objective> = (0..trials)
        .map(|_| {
            Objective::new(q0.variables().iter().map(|v| (*v, int(rng.random_range(-RANDOM_COST_MAX..=RANDOM_COST_MAX)))))
        })
        .collect();
    let sols: Vec<Result<LpSolution>> = objectives.par_iter().map(|o| certified(&q0, o)).collect();
    let mut fractional = 0;
    for s in sols {
        if s?.point.values().any(|q| !q.is_integer()) {
            fractional += 1;
        }
    }
    Ok(json!({"m": 4, "probes": trials, "fractional_optima": fractional, "seed": seed}))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    #[test]
    fn seeded_matrices_are_reproducible() {
        let a = random_matrices(4, 3, 11, true);
        assert_eq!(a, random_matrices(4, 3, 11, true));
        assert_ne!(a, random_matrices(4, 3, 12, true));
        for m in &a {
            assert!(m.entries().iter().all(|q| q.is_integer() && !q.is_negative() && *q <= int(RANDOM_COST_MAX)));
            assert!((0..4).all(|i| m.get(i, i).is_zero()));
        }
    }

    #[test]
    fn zero_costs_give_zero_optima() {
        let c = Matrix::zeros(3);
        assert_eq!(lap_lp1_trial(&c).unwrap(), None);
        let sol = solve(&build_q1bar(4).unwrap(), &objective_on_w(&c)).unwrap();
        assert_eq!(sol.objective_value, Some(int(0)));
    }

    #[test]
    fn unique_minimum_is_returned_integral() {
        // cost 0 on the stage/level pairs of (3,1,2), 10 elsewhere
        let target = [(3, 1), (1, 2), (2, 3)];
        let c = Matrix::from_fn(3, |l, s| if target.contains(&(l + 1, s + 1)) { int(0) } else { int(10) });
        let sol = solve(&build_q1bar(4).unwrap(), &objective_on_w(&c)).unwrap();
        let w = w_part(&sol, 3);
        assert_eq!(assignment_to_tour(&w).unwrap().order(), &[3, 1, 2]);
    }

    #[test]
    fn lap_lp1_small_batch() {
        let r = verify_equivalence_lap_lp1(3, 5, 7).unwrap();
        assert!(r.pass(), "{}", r.to_json());
        assert_eq!(r.trials, 5);
    }

    #[test]
    fn lp0_lp2_unit_costs_and_negative_control() {
        let inst = TspInstance::unit(5).unwrap();
        assert_eq!(lp0_lp2_trial(&inst).unwrap(), None);
        assert!(lp0_lp2_negative_control(&inst).unwrap());
    }

    #[test]
    fn applied_costs_zero_matrix() {
        let r = verify_applied_costs(&TspInstance::zero(5).unwrap()).unwrap();
        assert!(r.pass());
        assert_eq!(r.trials, 24);
        assert!(verify_applied_costs(&TspInstance::zero(4).unwrap()).is_err());
    }

    #[test]
    fn bound_study_fixed_cases() {
        let row = lp0_bound(&TspInstance::zero(5).unwrap()).unwrap();
        assert_eq!((row.lp0.clone(), row.tour.clone()), (int(0), int(0)));
        let row = lp0_bound(&TspInstance::unit(5).unwrap()).unwrap();
        assert!(row.holds() && row.lp0 <= int(5));
        let mut d = Matrix::zeros(5);
        d.set(0, 1, int(-1));
        assert!(matches!(lp0_bound(&TspInstance::new(d).unwrap()), Err(Error::InvalidInstance(_))));
    }

    #[test]
    fn counterexample_suite_passes() {
        let r = verify_lemma2_counterexample().unwrap();
        assert!(r.pass(), "{}", r.to_json());
        assert_eq!(r.details["point"]["y[4,3]"], "2");
    }

    #[test]
    fn report_json_shape() {
        let r = verify_lemma1(&[3]).unwrap();
        let v = r.to_json();
        for k in ["theorem", "params", "trials", "passed", "counterexample", "ms"] {
            assert!(v.get(k).is_some(), "{k}");
        }
        assert_eq!(v["trials"], 6);
        assert!(v["counterexample"].is_null());
    }
}

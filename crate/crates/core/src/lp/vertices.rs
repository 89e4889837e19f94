//! Vertex enumeration for small systems where every variable is
//! sign-constrained.
//!
//! Two exact routes: exhaustive enumeration of every column basis of the
//! equality standard form, and a search over the graph of feasible bases
//! connected by single pivots. Both return basic feasible solutions mapped
//! back to the system's variables, deduplicated by exact equality.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::rc::Rc;

use num_traits::{Signed, Zero};

use crate::consys::{ConstraintSystem, VarId};
use crate::error::{Error, Result};
use crate::rational::{self, Rational};

use super::simplex::{two_phase, Outcome};
use super::standard::{solve_basis, StandardForm};
use super::Point;

/// Default limit on basis candidates (exhaustive) or feasible bases
/// visited (pivoting).
pub const DEFAULT_BASIS_GUARD: u64 = 2_000_000;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Vertex {
    pub values: Vec<Rational>,
    pub integral: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexSet {
    pub variables: Vec<VarId>,
    /// Sorted by value vector.
    pub vertices: Vec<Vertex>,
    /// Bases examined (candidates for the exhaustive route, feasible bases
    /// visited for the pivoting route).
    pub bases_examined: u64,
}

impl VertexSet {
    fn from_points(variables: Vec<VarId>, points: BTreeSet<Vec<Rational>>, bases: u64) -> Self {
        let vertices = points
            .into_iter()
            .map(|values| {
                let integral = values.iter().all(rational::is_integral);
                Vertex { values, integral }
            })
            .collect();
        VertexSet { variables, vertices, bases_examined: bases }
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn integral_count(&self) -> usize {
        self.vertices.iter().filter(|v| v.integral).count()
    }

    pub fn fractional(&self) -> impl Iterator<Item = &Vertex> {
        self.vertices.iter().filter(|v| !v.integral)
    }

    pub fn to_point(&self, v: &Vertex) -> Point {
        self.variables.iter().copied().zip(v.values.iter().cloned()).collect()
    }

    pub fn contains(&self, p: &Point) -> bool {
        let values: Vec<Rational> = self
            .variables
            .iter()
            .map(|v| p.get(v).cloned().unwrap_or_else(Rational::zero))
            .collect();
        self.vertices.binary_search_by(|v| v.values.cmp(&values)).is_ok()
    }
}

fn require_nonneg(sys: &ConstraintSystem) -> Result<()> {
    match sys.variables().iter().find(|v| !sys.is_nonneg(v)) {
        Some(v) => Err(Error::InvalidArgument(format!(
            "vertex enumeration needs every variable sign-constrained; `{v}` is free"
        ))),
        None => Ok(()),
    }
}

fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return acc;
        }
    }
    acc
}

/// Every basic feasible solution, found by trying all `C(columns, rank)`
/// column subsets of the standard form. Refuses when that count exceeds
/// `guard`.
pub fn enumerate_vertices(sys: &ConstraintSystem, guard: u64) -> Result<VertexSet> {
    require_nonneg(sys)?;
    let mut sf = StandardForm::build(sys);
    if !sf.reduce_rows() {
        return Ok(VertexSet::from_points(sys.variables().to_vec(), BTreeSet::new(), 0));
    }
    let (width, rank) = (sf.width(), sf.height());
    let candidates = binomial(width as u64, rank as u64);
    if candidates > guard as u128 {
        return Err(Error::EnumerationRefused(format!(
            "{candidates} basis candidates (C({width},{rank})) exceed the guard of {guard}; \
             use the pivoting enumerator or targeted LP probes instead"
        )));
    }
    let mut points = BTreeSet::new();
    let mut combo: Vec<usize> = (0..rank).collect();
    let mut examined = 0u64;
    loop {
        examined += 1;
        if let Some(xb) = solve_basis(&sf.a, &sf.b, &combo) {
            if xb.iter().all(|x| !x.is_negative()) {
                let mut z = vec![Rational::zero(); width];
                for (&c, x) in combo.iter().zip(xb) {
                    z[c] = x;
                }
                points.insert(sf.recover(&z, sys.var_count()));
            }
        }
        if !next_combination(&mut combo, width) {
            break;
        }
    }
    Ok(VertexSet::from_points(sys.variables().to_vec(), points, examined))
}

fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    let Some(i) = (0..k).rev().find(|&i| c[i] < n - k + i) else {
        return false;
    };
    c[i] += 1;
    for j in i + 1..k {
        c[j] = c[j - 1] + 1;
    }
    true
}

/// `B^-1 [A | b]` with row `k` carrying the unit column `basis[k]`.
fn tableau_for(a: &[Vec<Rational>], b: &[Rational], basis: &[usize]) -> Option<Vec<Vec<Rational>>> {
    let r = a.len();
    let width = a.first().map_or(0, Vec::len);
    let mut t: Vec<Vec<Rational>> =
        a.iter().zip(b).map(|(row, rhs)| row.iter().cloned().chain([rhs.clone()]).collect()).collect();
    for (k, &col) in basis.iter().enumerate() {
        let p = (k..r).find(|&i| !t[i][col].is_zero())?;
        t.swap(k, p);
        let inv = t[k][col].recip();
        t[k].iter_mut().for_each(|x| *x *= &inv);
        let pivot = t[k].clone();
        let nz: Vec<usize> = (0..=width).filter(|&j| !pivot[j].is_zero()).collect();
        for (i, row) in t.iter_mut().enumerate() {
            if i == k || row[col].is_zero() {
                continue;
            }
            let f = row[col].clone();
            for &j in &nz {
                let d = &f * &pivot[j];
                row[j] -= d;
            }
        }
    }
    Some(t)
}

fn pivot_in_place(t: &mut [Vec<Rational>], k: usize, col: usize) {
    let inv = t[k][col].recip();
    t[k].iter_mut().for_each(|x| *x *= &inv);
    let pivot = t[k].clone();
    let nz: Vec<usize> = (0..pivot.len()).filter(|&j| !pivot[j].is_zero()).collect();
    for (i, row) in t.iter_mut().enumerate() {
        if i == k || row[col].is_zero() {
            continue;
        }
        let f = row[col].clone();
        for &j in &nz {
            let d = &f * &pivot[j];
            row[j] -= d;
        }
    }
}

/// Basis in row order, the parent tableau, and the pivot leading here.
type QueueEntry = (Vec<usize>, Rc<Vec<Vec<Rational>>>, Option<(usize, usize)>);

/// Every vertex, found by exploring all feasible bases reachable from an
/// initial one by feasibility-preserving pivots (all entering columns, all
/// ratio-test ties). Refuses once more than `guard` feasible bases have
/// been visited.
pub fn enumerate_vertices_by_pivoting(sys: &ConstraintSystem, guard: u64) -> Result<VertexSet> {
    require_nonneg(sys)?;
    let mut sf = StandardForm::build(sys);
    if !sf.reduce_rows() {
        return Ok(VertexSet::from_points(sys.variables().to_vec(), BTreeSet::new(), 0));
    }
    for (row, rhs) in sf.a.iter_mut().zip(sf.b.iter_mut()) {
        if rhs.is_negative() {
            row.iter_mut().for_each(|x| *x = -x.clone());
            *rhs = -rhs.clone();
        }
    }
    let width = sf.width();
    let rank = sf.height();
    let (outcome, tab) = two_phase(&sf, &vec![Rational::zero(); width]);
    if outcome == Outcome::Infeasible {
        return Ok(VertexSet::from_points(sys.variables().to_vec(), BTreeSet::new(), 0));
    }
    debug_assert_eq!(tab.basis.len(), rank);
    let mut start = tab.basis.clone();
    start.sort_unstable();

    // Queue entries carry the parent's tableau and the pivot leading to the
    // child, so each child costs one pivot instead of a full elimination.
    let first = tableau_for(&sf.a, &sf.b, &tab.basis).expect("phase one basis is nonsingular");
    let mut seen: HashSet<Vec<usize>> = HashSet::from([start]);
    let mut queue: VecDeque<QueueEntry> =
        VecDeque::from([(tab.basis.clone(), Rc::new(first), None)]);
    let mut points = BTreeSet::new();
    while let Some((basis, parent, step)) = queue.pop_front() {
        let t = match step {
            None => parent,
            Some((k, j)) => {
                let mut t = (*parent).clone();
                drop(parent);
                pivot_in_place(&mut t, k, j);
                Rc::new(t)
            }
        };
        let mut z = vec![Rational::zero(); width];
        for (k, &c) in basis.iter().enumerate() {
            z[c] = t[k][width].clone();
        }
        points.insert(sf.recover(&z, sys.var_count()));
        let mut sorted = basis.clone();
        sorted.sort_unstable();
        for j in (0..width).filter(|j| sorted.binary_search(j).is_err()) {
            let mut best: Option<Rational> = None;
            let mut rows = Vec::new();
            for (k, row) in t.iter().enumerate() {
                if !row[j].is_positive() {
                    continue;
                }
                let ratio = &row[width] / &row[j];
                match &best {
                    Some(b) if ratio > *b => {}
                    Some(b) if ratio == *b => rows.push(k),
                    _ => {
                        best = Some(ratio);
                        rows = vec![k];
                    }
                }
            }
            for k in rows {
                let mut next = basis.clone();
                next[k] = j;
                let mut key = next.clone();
                key.sort_unstable();
                if seen.insert(key) {
                    if seen.len() as u64 > guard {
                        return Err(Error::EnumerationRefused(format!(
                            "more than {guard} feasible bases; use targeted LP probes instead"
                        )));
                    }
                    queue.push_back((next, Rc::clone(&t), Some((k, j))));
                }
            }
        }
    }
    Ok(VertexSet::from_points(sys.variables().to_vec(), points, seen.len() as u64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::consys::{build_lap_polytope, Cmp, LinRow};
    use crate::instances::{permutations, tour_to_assignment, Tour};
    use crate::rational::int;

    fn permutation_points(m: usize) -> BTreeSet<Vec<Rational>> {
        permutations(m)
            .into_iter()
            .map(|p| {
                let w = tour_to_assignment(&Tour::new(p).unwrap());
                w.nodes().map(|n| w.get(n).clone()).collect()
            })
            .collect()
    }

    #[test]
    fn birkhoff_vertices_are_permutations() {
        for m in 2..=3 {
            let vs = enumerate_vertices(&build_lap_polytope(m).unwrap(), DEFAULT_BASIS_GUARD).unwrap();
            let got: BTreeSet<Vec<Rational>> = vs.vertices.iter().map(|v| v.values.clone()).collect();
            assert_eq!(got, permutation_points(m));
            assert_eq!(vs.integral_count(), vs.len());
        }
    }

    #[test]
    fn pivoting_agrees_with_exhaustive() {
        for m in 2..=3 {
            let a = build_lap_polytope(m).unwrap();
            let ex = enumerate_vertices(&a, DEFAULT_BASIS_GUARD).unwrap();
            let pv = enumerate_vertices_by_pivoting(&a, DEFAULT_BASIS_GUARD).unwrap();
            assert_eq!(ex.vertices, pv.vertices);
        }
        // a square with one cut corner has five vertices
        let mut s = ConstraintSystem::new();
        let (x, y) = (VarId::w(1, 1), VarId::w(1, 2));
        s.add_var(x, true);
        s.add_var(y, true);
        s.add_row(LinRow::new("x", [(x, int(1))], Cmp::Le, int(2))).unwrap();
        s.add_row(LinRow::new("y", [(y, int(1))], Cmp::Le, int(2))).unwrap();
        s.add_row(LinRow::new("cut", [(x, int(1)), (y, int(1))], Cmp::Le, int(3))).unwrap();
        let ex = enumerate_vertices(&s, 1000).unwrap();
        let pv = enumerate_vertices_by_pivoting(&s, 1000).unwrap();
        assert_eq!(ex.len(), 5);
        assert_eq!(ex.vertices, pv.vertices);
    }

    #[test]
    fn guard_refuses() {
        let a = build_lap_polytope(4).unwrap();
        assert!(matches!(enumerate_vertices(&a, 10), Err(Error::EnumerationRefused(_))));
        assert!(matches!(enumerate_vertices_by_pivoting(&a, 3), Err(Error::EnumerationRefused(_))));
    }

    #[test]
    fn free_variables_refused() {
        let mut s = ConstraintSystem::new();
        s.add_var(VarId::w(1, 1), false);
        assert!(enumerate_vertices(&s, 10).is_err());
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(16, 7), 11440);
        assert_eq!(binomial(5, 0), 1);
        assert_eq!(binomial(33, 24), 38_567_100);
    }
}

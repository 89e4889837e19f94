//! TSP instances, the assignment-graph indexing, tours and their incidence
//! vectors, plus the brute-force oracles the rest of the crate is checked
//! against.
//!
//! Cities are `0..n` with city 0 the fixed depot. The remaining `m = n - 1`
//! cities are arranged on an `m x m` grid of nodes `(level, stage)`: node
//! `(l, s)` means city `l` is the `s`-th city visited after leaving the depot.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// Largest `m` the enumeration oracles accept.
pub const MAX_ENUMERATION_SIZE: usize = 10;

/// A node of the assignment graph: `level` is the city, `stage` the visit
/// position. Both are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct NodeId {
    pub level: usize,
    pub stage: usize,
}

impl NodeId {
    pub fn new(level: usize, stage: usize) -> Self {
        NodeId { level, stage }
    }

    pub fn check(&self, m: usize) -> Result<()> {
        if (1..=m).contains(&self.level) && (1..=m).contains(&self.stage) {
            Ok(())
        } else {
            Err(Error::Shape(format!("node {self} outside 1..={m}")))
        }
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.level, self.stage)
    }
}

/// Three nodes at strictly increasing stages on pairwise distinct levels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Triplet(pub NodeId, pub NodeId, pub NodeId);

impl Triplet {
    pub fn new(a: NodeId, b: NodeId, c: NodeId) -> Result<Self> {
        let t = Triplet(a, b, c);
        if t.is_valid() {
            Ok(t)
        } else {
            Err(Error::Shape(format!(
                "triplet ({a})({b})({c}) needs increasing stages and distinct levels"
            )))
        }
    }

    pub fn is_valid(&self) -> bool {
        let Triplet(a, b, c) = self;
        a.stage < b.stage
            && b.stage < c.stage
            && a.level != b.level
            && a.level != c.level
            && b.level != c.level
    }

    pub fn nodes(&self) -> [NodeId; 3] {
        [self.0, self.1, self.2]
    }

    pub fn stages(&self) -> (usize, usize, usize) {
        (self.0.stage, self.1.stage, self.2.stage)
    }

    /// Every valid triplet for an `m x m` grid, in lexicographic order.
    pub fn all(m: usize) -> Vec<Triplet> {
        let mut out = Vec::new();
        for p in 1..=m {
            for r in p + 1..=m {
                for s in r + 1..=m {
                    for i in 1..=m {
                        for j in (1..=m).filter(|&j| j != i) {
                            for k in (1..=m).filter(|&k| k != i && k != j) {
                                out.push(Triplet(
                                    NodeId::new(i, p),
                                    NodeId::new(j, r),
                                    NodeId::new(k, s),
                                ));
                            }
                        }
                    }
                }
            }
        }
        out
    }
}

impl fmt::Display for Triplet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}|{}|{}", self.0, self.1, self.2)
    }
}

/// A square matrix of exact values, stored row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    size: usize,
    entries: Vec<Rational>,
}

impl Matrix {
    pub fn zeros(size: usize) -> Self {
        Matrix { size, entries: vec![Rational::zero(); size * size] }
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let size = rows.len();
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != size) {
            return Err(Error::Shape(format!(
                "row {i} has {} entries, expected {size}",
                r.len()
            )));
        }
        Ok(Matrix { size, entries: rows.into_iter().flatten().collect() })
    }

    pub fn from_fn(size: usize, mut f: impl FnMut(usize, usize) -> Rational) -> Self {
        let mut entries = Vec::with_capacity(size * size);
        for i in 0..size {
            for j in 0..size {
                entries.push(f(i, j));
            }
        }
        Matrix { size, entries }
    }

    pub fn from_i64(rows: &[&[i64]]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| rational::int(v)).collect())
                .collect(),
        )
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// 0-based access.
    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.entries[i * self.size + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        self.entries[i * self.size + j] = v;
    }

    pub fn rows(&self) -> Vec<Vec<Rational>> {
        self.entries.chunks(self.size.max(1)).map(|c| c.to_vec()).collect()
    }

    pub fn entries(&self) -> &[Rational] {
        &self.entries
    }
}

/// Assignment costs indexed by node: entry `(level, stage)`.
pub type CostMatrix = Matrix;

impl Matrix {
    pub fn at(&self, node: NodeId) -> &Rational {
        self.get(node.level - 1, node.stage - 1)
    }
}

/// A TSP instance: `n` cities and an exact travel-cost matrix. The diagonal
/// of `d` is carried but never read.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TspInstance {
    n: usize,
    d: Matrix,
}

impl TspInstance {
    pub fn new(d: Matrix) -> Result<Self> {
        let n = d.size();
        if n < 2 {
            return Err(Error::InvalidInstance(format!("need at least 2 cities, got {n}")));
        }
        Ok(TspInstance { n, d })
    }

    /// All off-diagonal costs equal to one.
    pub fn unit(n: usize) -> Result<Self> {
        Self::new(Matrix::from_fn(n, |i, j| if i == j { Rational::zero() } else { Rational::one() }))
    }

    pub fn zero(n: usize) -> Result<Self> {
        Self::new(Matrix::zeros(n))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.n - 1
    }

    pub fn d(&self, i: usize, j: usize) -> &Rational {
        self.d.get(i, j)
    }

    pub fn costs(&self) -> &Matrix {
        &self.d
    }

    /// Whether every off-diagonal cost is nonnegative.
    pub fn is_nonnegative(&self) -> bool {
        (0..self.n).all(|i| {
            (0..self.n).all(|j| i == j || rational::is_nonneg(self.d(i, j)))
        })
    }

    /// Parses `{ "n": int, "d": [[int | "p/q"]] }`.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let v: serde_json::Value = serde_json::from_str(text).map_err(|e| {
            Error::Parse(format!("line {}, column {}: {e}", e.line(), e.column()))
        })?;
        Self::from_json(&v)
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let n = v
            .get("n")
            .and_then(|n| n.as_u64())
            .ok_or_else(|| Error::Parse("missing or non-integer field `n`".into()))?
            as usize;
        let d = parse_matrix(v.get("d").ok_or_else(|| Error::Parse("missing field `d`".into()))?, "d")?;
        if d.size() != n {
            return Err(Error::Parse(format!("`d` is {0}x{0} but n = {n}", d.size())));
        }
        Self::new(d)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({ "n": self.n, "d": matrix_to_json(&self.d) })
    }
}

/// Parses a square JSON matrix of integers or rational strings, reporting
/// the offending `[row][column]` on failure.
pub fn parse_matrix(v: &serde_json::Value, name: &str) -> Result<Matrix> {
    let rows = v
        .as_array()
        .ok_or_else(|| Error::Parse(format!("`{name}` must be an array of rows")))?;
    let mut out = Vec::with_capacity(rows.len());
    for (i, row) in rows.iter().enumerate() {
        let row = row
            .as_array()
            .ok_or_else(|| Error::Parse(format!("`{name}` row {i} is not an array")))?;
        let mut parsed = Vec::with_capacity(row.len());
        for (j, e) in row.iter().enumerate() {
            let q = rational::from_json(e).map_err(|err| {
                Error::Parse(format!("`{name}` row {i}, column {j}: {err}"))
            })?;
            parsed.push(q);
        }
        out.push(parsed);
    }
    Matrix::from_rows(out).map_err(|e| Error::Parse(format!("`{name}`: {e}")))
}

pub fn matrix_to_json(m: &Matrix) -> serde_json::Value {
    serde_json::Value::Array(
        m.rows()
            .iter()
            .map(|r| r.iter().map(|q| serde_json::Value::String(rational::format(q))).collect())
            .collect(),
    )
}

/// A tour `0 -> p1 -> ... -> pm -> 0`, stored as the visiting order of the
/// non-depot cities.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Tour(Vec<usize>);

impl Tour {
    pub fn new(order: Vec<usize>) -> Result<Self> {
        let m = order.len();
        if m == 0 {
            return Err(Error::InvalidTour("empty order".into()));
        }
        let mut seen = vec![false; m + 1];
        for &c in &order {
            if c == 0 || c > m || seen[c] {
                return Err(Error::InvalidTour(format!(
                    "{order:?} is not a permutation of 1..={m}"
                )));
            }
            seen[c] = true;
        }
        Ok(Tour(order))
    }

    pub fn order(&self) -> &[usize] {
        &self.0
    }

    pub fn m(&self) -> usize {
        self.0.len()
    }

    /// The closed city sequence `0, p1, ..., pm, 0`.
    pub fn cities(&self) -> Vec<usize> {
        let mut v = Vec::with_capacity(self.0.len() + 2);
        v.push(0);
        v.extend_from_slice(&self.0);
        v.push(0);
        v
    }

    /// Ordered legs `(from, to)` of the cycle.
    pub fn legs(&self) -> Vec<(usize, usize)> {
        self.cities().windows(2).map(|w| (w[0], w[1])).collect()
    }
}

impl fmt::Display for Tour {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.cities().iter().map(|c| c.to_string()).collect();
        write!(f, "{}", parts.join("->"))
    }
}

/// All permutations of `1..=m` in lexicographic order.
pub fn permutations(m: usize) -> Vec<Vec<usize>> {
    let mut cur: Vec<usize> = (1..=m).collect();
    let mut out = vec![cur.clone()];
    while next_permutation(&mut cur) {
        out.push(cur.clone());
    }
    out
}

fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// All tours on `m + 1` cities in lexicographic order.
pub fn all_tours(m: usize) -> Vec<Tour> {
    permutations(m).into_iter().map(Tour).collect()
}

/// Values `w[level][stage]` on the `m x m` node grid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AssignmentVector {
    m: usize,
    values: Vec<Rational>,
}

impl AssignmentVector {
    pub fn zeros(m: usize) -> Self {
        AssignmentVector { m, values: vec![Rational::zero(); m * m] }
    }

    pub fn from_matrix(mat: &Matrix) -> Self {
        AssignmentVector { m: mat.size(), values: mat.entries().to_vec() }
    }

    /// Sets the listed `(level, stage)` entries to one.
    pub fn from_ones(m: usize, ones: &[(usize, usize)]) -> Result<Self> {
        let mut w = Self::zeros(m);
        for &(l, s) in ones {
            let node = NodeId::new(l, s);
            node.check(m)?;
            w.set(node, Rational::one());
        }
        Ok(w)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn get(&self, node: NodeId) -> &Rational {
        &self.values[(node.level - 1) * self.m + node.stage - 1]
    }

    pub fn set(&mut self, node: NodeId, v: Rational) {
        self.values[(node.level - 1) * self.m + node.stage - 1] = v;
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> {
        let m = self.m;
        (1..=m).flat_map(move |l| (1..=m).map(move |s| NodeId::new(l, s)))
    }

    /// `(node, value)` pairs with nonzero value.
    pub fn support(&self) -> Vec<(NodeId, Rational)> {
        self.nodes()
            .filter(|&n| !self.get(n).is_zero())
            .map(|n| (n, self.get(n).clone()))
            .collect()
    }

    /// Nonnegative with unit row and column sums.
    pub fn is_doubly_stochastic(&self) -> bool {
        let m = self.m;
        self.values.iter().all(rational::is_nonneg)
            && (1..=m).all(|l| {
                (1..=m).map(|s| self.get(NodeId::new(l, s))).sum::<Rational>().is_one()
            })
            && (1..=m).all(|s| {
                (1..=m).map(|l| self.get(NodeId::new(l, s))).sum::<Rational>().is_one()
            })
    }

    pub fn is_permutation(&self) -> bool {
        self.values.iter().all(rational::is_zero_one) && self.is_doubly_stochastic()
    }

    pub fn is_integral(&self) -> bool {
        self.values.iter().all(rational::is_integral)
    }

    pub fn dot(&self, c: &CostMatrix) -> Rational {
        self.nodes().map(|n| self.get(n) * c.at(n)).sum()
    }

    pub fn scaled(&self, k: &Rational) -> Self {
        AssignmentVector { m: self.m, values: self.values.iter().map(|v| v * k).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        AssignmentVector {
            m: self.m,
            values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        AssignmentVector {
            m: self.m,
            values: self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(Zero::is_zero)
    }
}

/// Values `y[i][j]` over ordered city pairs with `i != j`, depot included.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LegVector {
    n: usize,
    values: Vec<Rational>,
}

impl LegVector {
    pub fn zeros(n: usize) -> Self {
        LegVector { n, values: vec![Rational::zero(); n * (n - 1)] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of legs, `n * (n - 1)`.
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    fn index(&self, i: usize, j: usize) -> usize {
        assert!(i != j && i < self.n && j < self.n, "leg ({i},{j}) out of range for n={}", self.n);
        i * (self.n - 1) + if j < i { j } else { j - 1 }
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.values[self.index(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        let k = self.index(i, j);
        self.values[k] = v;
    }

    /// Every ordered pair `(i, j)`, `i != j`, in lexicographic order.
    pub fn pairs(n: usize) -> Vec<(usize, usize)> {
        (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).collect()
    }

    pub fn support(&self) -> Vec<((usize, usize), Rational)> {
        Self::pairs(self.n)
            .into_iter()
            .filter(|&(i, j)| !self.get(i, j).is_zero())
            .map(|(i, j)| ((i, j), self.get(i, j).clone()))
            .collect()
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }
}

/// Values over valid triplets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TripletVector {
    m: usize,
    values: BTreeMap<Triplet, Rational>,
}

impl TripletVector {
    pub fn zeros(m: usize) -> Self {
        TripletVector {
            m,
            values: Triplet::all(m).into_iter().map(|t| (t, Rational::zero())).collect(),
        }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn get(&self, t: &Triplet) -> Option<&Rational> {
        self.values.get(t)
    }

    pub fn set(&mut self, t: Triplet, v: Rational) -> Result<()> {
        match self.values.get_mut(&t) {
            Some(slot) => {
                *slot = v;
                Ok(())
            }
            None => Err(Error::Shape(format!("triplet {t} not valid for m={}", self.m))),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Triplet, &Rational)> {
        self.values.iter()
    }

    pub fn support(&self) -> Vec<Triplet> {
        self.values.iter().filter(|(_, v)| !v.is_zero()).map(|(t, _)| *t).collect()
    }
}

pub fn tour_cost(inst: &TspInstance, t: &Tour) -> Result<Rational> {
    if t.m() != inst.m() {
        return Err(Error::InvalidTour(format!(
            "tour visits {} cities but the instance has m = {}",
            t.m(),
            inst.m()
        )));
    }
    Ok(t.legs().iter().map(|&(i, j)| inst.d(i, j)).sum())
}

pub fn tour_to_assignment(t: &Tour) -> AssignmentVector {
    let mut w = AssignmentVector::zeros(t.m());
    for (r, &city) in t.order().iter().enumerate() {
        w.set(NodeId::new(city, r + 1), Rational::one());
    }
    w
}

pub fn assignment_to_tour(w: &AssignmentVector) -> Result<Tour> {
    if !w.is_permutation() {
        return Err(Error::NotAVertex(format!(
            "assignment with support {:?} is not a permutation matrix",
            w.support().iter().map(|(n, v)| format!("w[{n}]={v}")).collect::<Vec<_>>()
        )));
    }
    let m = w.m();
    let order = (1..=m)
        .map(|s| {
            (1..=m)
                .find(|&l| w.get(NodeId::new(l, s)).is_one())
                .expect("permutation matrix has a one in every column")
        })
        .collect();
    Tour::new(order)
}

pub fn tour_to_legs(t: &Tour, n: usize) -> Result<LegVector> {
    if t.m() + 1 != n {
        return Err(Error::InvalidTour(format!("tour has {} cities, expected {}", t.m(), n - 1)));
    }
    let mut y = LegVector::zeros(n);
    for (i, j) in t.legs() {
        y.set(i, j, Rational::one());
    }
    Ok(y)
}

fn guard(m: usize) -> Result<()> {
    if m > MAX_ENUMERATION_SIZE {
        Err(Error::EnumerationRefused(format!(
            "m = {m} exceeds the enumeration limit of {MAX_ENUMERATION_SIZE}"
        )))
    } else {
        Ok(())
    }
}

/// Minimum-cost tour by enumerating all `m!` orders. Ties go to the
/// lexicographically smallest order.
pub fn brute_force_tsp(inst: &TspInstance) -> Result<(Tour, Rational)> {
    guard(inst.m())?;
    let mut best: Option<(Tour, Rational)> = None;
    for t in all_tours(inst.m()) {
        let c = tour_cost(inst, &t)?;
        if best.as_ref().is_none_or(|(_, b)| c < *b) {
            best = Some((t, c));
        }
    }
    Ok(best.expect("at least one tour"))
}

/// Minimum of `c . w` over permutation matrices, ties to the
/// lexicographically smallest permutation (read as stage -> level).
pub fn brute_force_lap(c: &CostMatrix) -> Result<(AssignmentVector, Rational)> {
    let m = c.size();
    if m == 0 {
        return Err(Error::EmptyInstance);
    }
    guard(m)?;
    let mut best: Option<(Vec<usize>, Rational)> = None;
    for p in permutations(m) {
        let v: Rational = p.iter().enumerate().map(|(r, &l)| c.at(NodeId::new(l, r + 1))).sum();
        if best.as_ref().is_none_or(|(_, b)| v < *b) {
            best = Some((p, v));
        }
    }
    let (p, v) = best.expect("at least one permutation");
    Ok((tour_to_assignment(&Tour(p)), v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn asym5() -> TspInstance {
        TspInstance::new(
            Matrix::from_i64(&[
                &[0, 3, 9, 4, 7],
                &[2, 0, 6, 1, 8],
                &[5, 4, 0, 7, 2],
                &[9, 3, 8, 0, 6],
                &[1, 7, 3, 5, 0],
            ])
            .unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn unit_tour_cost_is_n() {
        let inst = TspInstance::unit(5).unwrap();
        let t = Tour::new(vec![1, 2, 4, 3]).unwrap();
        assert_eq!(tour_cost(&inst, &t).unwrap(), int(5));
    }

    #[test]
    fn tour_cost_sums_the_cycle() {
        let inst = asym5();
        let t = Tour::new(vec![1, 2, 4, 3]).unwrap();
        // d01 + d12 + d24 + d43 + d30
        assert_eq!(tour_cost(&inst, &t).unwrap(), int(3 + 6 + 2 + 5 + 9));
        assert_eq!(tour_cost(&inst, &t).unwrap(), int(25));
    }

    #[test]
    fn tour_cost_rejects_wrong_length() {
        let inst = TspInstance::unit(5).unwrap();
        let t = Tour::new(vec![1, 2, 3]).unwrap();
        assert!(matches!(tour_cost(&inst, &t), Err(Error::InvalidTour(_))));
    }

    #[test]
    fn tour_validation() {
        assert!(Tour::new(vec![1, 1, 2]).is_err());
        assert!(Tour::new(vec![0, 1]).is_err());
        assert!(Tour::new(vec![]).is_err());
        assert!(Tour::new(vec![2, 3, 1]).is_ok());
    }

    #[test]
    fn assignment_of_example_tours() {
        let w1 = tour_to_assignment(&Tour::new(vec![1, 2, 4, 3]).unwrap());
        let ones: Vec<NodeId> = w1.support().into_iter().map(|(n, _)| n).collect();
        assert_eq!(
            ones,
            vec![NodeId::new(1, 1), NodeId::new(2, 2), NodeId::new(3, 4), NodeId::new(4, 3)]
        );
        let w2 = tour_to_assignment(&Tour::new(vec![4, 3, 1, 2]).unwrap());
        let ones: Vec<NodeId> = w2.support().into_iter().map(|(n, _)| n).collect();
        assert_eq!(
            ones,
            vec![NodeId::new(1, 3), NodeId::new(2, 4), NodeId::new(3, 2), NodeId::new(4, 1)]
        );
        let w = tour_to_assignment(&Tour::new(vec![1]).unwrap());
        assert_eq!(w.support(), vec![(NodeId::new(1, 1), int(1))]);
    }

    #[test]
    fn assignment_back_to_tour() {
        let w = AssignmentVector::from_ones(4, &[(1, 1), (2, 2), (4, 3), (3, 4)]).unwrap();
        assert_eq!(assignment_to_tour(&w).unwrap().order(), &[1, 2, 4, 3]);
        let id = AssignmentVector::from_ones(3, &[(1, 1), (2, 2), (3, 3)]).unwrap();
        assert_eq!(assignment_to_tour(&id).unwrap().order(), &[1, 2, 3]);
        let bad = AssignmentVector::from_ones(3, &[(1, 1), (1, 2), (3, 3)]).unwrap();
        assert!(matches!(assignment_to_tour(&bad), Err(Error::NotAVertex(_))));
        let mut half = AssignmentVector::zeros(2);
        for n in half.clone().nodes() {
            half.set(n, crate::rational::frac(1, 2));
        }
        assert!(assignment_to_tour(&half).is_err());
    }

    #[test]
    fn legs_of_tours() {
        let y = tour_to_legs(&Tour::new(vec![1, 2, 4, 3]).unwrap(), 5).unwrap();
        let legs: Vec<(usize, usize)> = y.support().into_iter().map(|(p, _)| p).collect();
        assert_eq!(legs, vec![(0, 1), (1, 2), (2, 4), (3, 0), (4, 3)]);
        let y = tour_to_legs(&Tour::new(vec![1]).unwrap(), 2).unwrap();
        assert_eq!(y.dim(), 2);
        assert!(y.get(0, 1).is_one() && y.get(1, 0).is_one());
    }

    #[test]
    fn brute_force_tsp_small_cases() {
        let (t, c) = brute_force_tsp(&TspInstance::unit(4).unwrap()).unwrap();
        assert_eq!(t.order(), &[1, 2, 3]);
        assert_eq!(c, int(4));

        let inst = TspInstance::new(Matrix::from_i64(&[&[0, 3], &[4, 0]]).unwrap()).unwrap();
        let (t, c) = brute_force_tsp(&inst).unwrap();
        assert_eq!(t.order(), &[1]);
        assert_eq!(c, int(7));
    }

    #[test]
    fn brute_force_tsp_asymmetric() {
        // Frozen from an independent scratch enumeration of the 24 orders:
        // 0->1->3->2->4->0 = 3 + 1 + 3 + 2 + 6.
        let inst = asym5();
        let (t, c) = brute_force_tsp(&inst).unwrap();
        assert_eq!(t.order(), &[1, 3, 2, 4]);
        assert_eq!(c, int(15));
    }

    #[test]
    fn brute_force_lap_small_cases() {
        let c = Matrix::from_fn(3, |i, j| if i == j { int(0) } else { int(1) });
        let (w, v) = brute_force_lap(&c).unwrap();
        assert_eq!(v, int(0));
        assert_eq!(assignment_to_tour(&w).unwrap().order(), &[1, 2, 3]);

        let c = Matrix::from_i64(&[&[7]]).unwrap();
        let (w, v) = brute_force_lap(&c).unwrap();
        assert_eq!(v, int(7));
        assert!(w.get(NodeId::new(1, 1)).is_one());
        assert!(brute_force_lap(&Matrix::zeros(11)).is_err());
    }

    #[test]
    fn brute_force_lap_random_matrix() {
        // Scratch enumeration over 24 permutations: minimum 10, attained
        // first by stage->level order (2,1,4,3): c21+c12+c43+c34 = 2+3+1+4.
        let c = Matrix::from_i64(&[
            &[8, 3, 7, 6],
            &[2, 9, 5, 7],
            &[6, 4, 9, 4],
            &[5, 8, 1, 3],
        ])
        .unwrap();
        let (w, v) = brute_force_lap(&c).unwrap();
        assert_eq!(v, int(10));
        assert_eq!(assignment_to_tour(&w).unwrap().order(), &[2, 1, 4, 3]);
    }

    #[test]
    fn triplet_counts() {
        assert_eq!(Triplet::all(4).len(), 96);
        assert_eq!(Triplet::all(5).len(), 600);
        assert!(Triplet::all(4).iter().all(Triplet::is_valid));
        assert!(Triplet::new(NodeId::new(1, 1), NodeId::new(1, 2), NodeId::new(2, 3)).is_err());
    }

    #[test]
    fn json_instance() {
        let inst = TspInstance::from_json_str(r#"{"n":2,"d":[[0,3],[4,0]]}"#).unwrap();
        let (_, c) = brute_force_tsp(&inst).unwrap();
        assert_eq!(c, int(7));
        let inst = TspInstance::from_json_str(r#"{"n":2,"d":[[0,"1/3"],[4,0]]}"#).unwrap();
        assert_eq!(inst.d(0, 1), &crate::rational::frac(1, 3));
        let err = TspInstance::from_json_str(r#"{"n":2,"d":[[0,0.5],[4,0]]}"#).unwrap_err();
        assert!(err.to_string().contains("row 0, column 1"), "{err}");
        let err = TspInstance::from_json_str("{\"n\":2,\n\"d\":[[0,").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
    }
}

//! Exact linear constraint systems over named variables, and the builders
//! for the assignment polytope and its extensions.
//!
//! Three variable families appear:
//! - `W` on assignment-graph nodes (`w[level,stage]`),
//! - `Y` on ordered city pairs (`y[i,j]`, travel legs, depot included),
//! - `X` on valid node triplets (`x[i,p|j,r|k,s]`).

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use num_traits::Zero;
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::instances::{CostMatrix, LegVector, NodeId, TspInstance, Triplet};
use crate::rational::{self, int, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Family {
    W,
    Y,
    X,
    /// Convex-combination multipliers used by hull-membership programs.
    L,
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "w" => Ok(Family::W),
            "y" => Ok(Family::Y),
            "x" => Ok(Family::X),
            "l" => Ok(Family::L),
            _ => Err(Error::Parse(format!("unknown variable family `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VarId {
    W(NodeId),
    Y(usize, usize),
    X(Triplet),
    L(usize),
}

impl VarId {
    pub fn w(level: usize, stage: usize) -> Self {
        VarId::W(NodeId::new(level, stage))
    }

    pub fn y(i: usize, j: usize) -> Self {
        VarId::Y(i, j)
    }

    pub fn family(&self) -> Family {
        match self {
            VarId::W(_) => Family::W,
            VarId::Y(..) => Family::Y,
            VarId::X(_) => Family::X,
            VarId::L(_) => Family::L,
        }
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VarId::W(n) => write!(f, "w[{n}]"),
            VarId::Y(i, j) => write!(f, "y[{i},{j}]"),
            VarId::X(t) => write!(f, "x[{t}]"),
            VarId::L(k) => write!(f, "l[{k}]"),
        }
    }
}

impl FromStr for VarId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("`{s}` is not a variable name"));
        let (head, rest) = s.split_once('[').ok_or_else(bad)?;
        let body = rest.strip_suffix(']').ok_or_else(bad)?;
        let pair = |p: &str| -> Result<(usize, usize)> {
            let (a, b) = p.split_once(',').ok_or_else(bad)?;
            Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
        };
        match head {
            "w" => {
                let (l, st) = pair(body)?;
                Ok(VarId::w(l, st))
            }
            "y" => {
                let (i, j) = pair(body)?;
                if i == j {
                    return Err(bad());
                }
                Ok(VarId::Y(i, j))
            }
            "x" => {
                let nodes = body
                    .split('|')
                    .map(|p| pair(p).map(|(l, st)| NodeId::new(l, st)))
                    .collect::<Result<Vec<_>>>()?;
                if nodes.len() != 3 {
                    return Err(bad());
                }
                Ok(VarId::X(Triplet::new(nodes[0], nodes[1], nodes[2])?))
            }
            "l" => Ok(VarId::L(body.trim().parse().map_err(|_| bad())?)),
            _ => Err(bad()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Eq,
    Le,
}

/// Comparison accepted when building a row; `Ge` is stored negated as `Le`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cmp {
    Eq,
    Le,
    Ge,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinRow {
    pub label: String,
    pub coefficients: BTreeMap<VarId, Rational>,
    pub relation: Relation,
    pub rhs: Rational,
}

impl LinRow {
    pub fn new(
        label: impl Into<String>,
        terms: impl IntoIterator<Item = (VarId, Rational)>,
        cmp: Cmp,
        rhs: Rational,
    ) -> Self {
        let mut coefficients: BTreeMap<VarId, Rational> = BTreeMap::new();
        for (v, c) in terms {
            *coefficients.entry(v).or_insert_with(Rational::zero) += c;
        }
        coefficients.retain(|_, c| !c.is_zero());
        let (relation, rhs) = match cmp {
            Cmp::Eq => (Relation::Eq, rhs),
            Cmp::Le => (Relation::Le, rhs),
            Cmp::Ge => {
                coefficients.values_mut().for_each(|c| *c = -c.clone());
                (Relation::Le, -rhs)
            }
        };
        LinRow { label: label.into(), coefficients, relation, rhs }
    }

    pub fn lhs(&self, value: impl Fn(&VarId) -> Rational) -> Rational {
        self.coefficients.iter().map(|(v, c)| c * value(v)).sum()
    }

    pub fn is_satisfied_by(&self, lhs: &Rational) -> bool {
        match self.relation {
            Relation::Eq => *lhs == self.rhs,
            Relation::Le => *lhs <= self.rhs,
        }
    }
}

impl fmt::Display for LinRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self.coefficients.iter().map(|(v, c)| format!("{c}*{v}")).collect();
        let rel = match self.relation {
            Relation::Eq => "=",
            Relation::Le => "<=",
        };
        write!(f, "{}: {} {rel} {}", self.label, terms.join(" + "), self.rhs)
    }
}

#[derive(Debug, Clone, Default)]
pub struct ConstraintSystem {
    variables: Vec<VarId>,
    index: HashMap<VarId, usize>,
    rows: Vec<LinRow>,
    nonneg: BTreeSet<VarId>,
}

impl PartialEq for ConstraintSystem {
    fn eq(&self, other: &Self) -> bool {
        self.variables == other.variables && self.rows == other.rows && self.nonneg == other.nonneg
    }
}

impl ConstraintSystem {
    pub fn new() -> Self {
        Self::default()
    }

    /// Declares a variable; returns its column. Re-declaring is a no-op.
    pub fn add_var(&mut self, v: VarId, nonneg: bool) -> usize {
        let k = match self.index.get(&v) {
            Some(&k) => k,
            None => {
                self.variables.push(v);
                self.index.insert(v, self.variables.len() - 1);
                self.variables.len() - 1
            }
        };
        if nonneg {
            self.nonneg.insert(v);
        }
        k
    }

    pub fn add_row(&mut self, row: LinRow) -> Result<()> {
        if let Some(v) = row.coefficients.keys().find(|v| !self.index.contains_key(v)) {
            return Err(Error::UnknownVariable(v.to_string()));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn variables(&self) -> &[VarId] {
        &self.variables
    }

    pub fn rows(&self) -> &[LinRow] {
        &self.rows
    }

    pub fn nonneg(&self) -> &BTreeSet<VarId> {
        &self.nonneg
    }

    pub fn is_nonneg(&self, v: &VarId) -> bool {
        self.nonneg.contains(v)
    }

    pub fn column(&self, v: &VarId) -> Option<usize> {
        self.index.get(v).copied()
    }

    pub fn contains(&self, v: &VarId) -> bool {
        self.index.contains_key(v)
    }

    pub fn var_count(&self) -> usize {
        self.variables.len()
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    pub fn eq_row_count(&self) -> usize {
        self.rows.iter().filter(|r| r.relation == Relation::Eq).count()
    }

    pub fn le_row_count(&self) -> usize {
        self.rows.iter().filter(|r| r.relation == Relation::Le).count()
    }

    pub fn count_family(&self, f: Family) -> usize {
        self.variables.iter().filter(|v| v.family() == f).count()
    }

    pub fn row(&self, label: &str) -> Option<&LinRow> {
        self.rows.iter().find(|r| r.label == label)
    }

    /// Replaces the right-hand side of the row named `label`.
    pub fn set_rhs(&mut self, label: &str, rhs: Rational) -> Result<()> {
        let row = self
            .rows
            .iter_mut()
            .find(|r| r.label == label)
            .ok_or_else(|| Error::InvalidArgument(format!("no row labelled `{label}`")))?;
        row.rhs = rhs;
        Ok(())
    }

    /// Rows whose every variable belongs to `family`.
    pub fn rows_within(&self, family: Family) -> Vec<&LinRow> {
        self.rows
            .iter()
            .filter(|r| r.coefficients.keys().all(|v| v.family() == family))
            .collect()
    }

    /// Adds the variables and rows of `other`, skipping rows already present
    /// verbatim.
    pub fn absorb(&mut self, other: &ConstraintSystem) {
        for v in &other.variables {
            self.add_var(*v, other.nonneg.contains(v));
        }
        for r in &other.rows {
            if !self.rows.contains(r) {
                self.rows.push(r.clone());
            }
        }
    }

    /// JSON H-representation.
    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                let coef: Map<String, Value> = r
                    .coefficients
                    .iter()
                    .map(|(v, c)| (v.to_string(), Value::String(rational::format(c))))
                    .collect();
                json!({
                    "label": r.label,
                    "coef": coef,
                    "rel": match r.relation { Relation::Eq => "eq", Relation::Le => "le" },
                    "rhs": rational::format(&r.rhs),
                })
            })
            .collect();
        json!({
            "vars": self.variables.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
            "rows": rows,
            "nonneg": self.nonneg.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let field = |name: &str| {
            v.get(name)
                .and_then(Value::as_array)
                .ok_or_else(|| Error::Parse(format!("missing array `{name}`")))
        };
        let name_of = |x: &Value| -> Result<VarId> {
            x.as_str().ok_or_else(|| Error::Parse(format!("{x} is not a variable name")))?.parse()
        };
        let nonneg: BTreeSet<VarId> = field("nonneg")?.iter().map(name_of).collect::<Result<_>>()?;
        let mut sys = ConstraintSystem::new();
        for x in field("vars")? {
            let var = name_of(x)?;
            sys.add_var(var, nonneg.contains(&var));
        }
        if let Some(v) = nonneg.iter().find(|v| !sys.contains(v)) {
            return Err(Error::UnknownVariable(v.to_string()));
        }
        for (k, r) in field("rows")?.iter().enumerate() {
            let coef = r
                .get("coef")
                .and_then(Value::as_object)
                .ok_or_else(|| Error::Parse(format!("row {k}: missing `coef` object")))?;
            let terms = coef
                .iter()
                .map(|(name, c)| Ok((name.parse::<VarId>()?, rational::from_json(c)?)))
                .collect::<Result<Vec<_>>>()?;
            let cmp = match r.get("rel").and_then(Value::as_str) {
                Some("eq") => Cmp::Eq,
                Some("le") => Cmp::Le,
                other => return Err(Error::Parse(format!("row {k}: bad relation {other:?}"))),
            };
            let rhs = rational::from_json(
                r.get("rhs").ok_or_else(|| Error::Parse(format!("row {k}: missing `rhs`")))?,
            )?;
            let label = r.get("label").and_then(Value::as_str).unwrap_or_default().to_string();
            sys.add_row(LinRow::new(label, terms, cmp, rhs))?;
        }
        Ok(sys)
    }
}

/// A linear objective, always minimized.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Objective {
    pub coefficients: BTreeMap<VarId, Rational>,
}

impl Objective {
    pub fn new(terms: impl IntoIterator<Item = (VarId, Rational)>) -> Self {
        let mut coefficients: BTreeMap<VarId, Rational> = BTreeMap::new();
        for (v, c) in terms {
            *coefficients.entry(v).or_insert_with(Rational::zero) += c;
        }
        coefficients.retain(|_, c| !c.is_zero());
        Objective { coefficients }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    /// Minimizing the negation maximizes the original.
    pub fn negated(&self) -> Self {
        Objective {
            coefficients: self.coefficients.iter().map(|(v, c)| (*v, -c.clone())).collect(),
        }
    }

    pub fn plus(&self, other: &Objective) -> Self {
        Self::new(self.coefficients.iter().chain(&other.coefficients).map(|(v, c)| (*v, c.clone())))
    }

    pub fn value(&self, value: impl Fn(&VarId) -> Rational) -> Rational {
        self.coefficients.iter().map(|(v, c)| c * value(v)).sum()
    }

    pub fn check_against(&self, sys: &ConstraintSystem) -> Result<()> {
        match self.coefficients.keys().find(|v| !sys.contains(v)) {
            Some(v) => Err(Error::UnknownVariable(v.to_string())),
            None => Ok(()),
        }
    }

    pub fn weight_on(&self, family: Family) -> usize {
        self.coefficients.keys().filter(|v| v.family() == family).count()
    }
}

fn add_assignment_block(sys: &mut ConstraintSystem, m: usize) -> Result<()> {
    for l in 1..=m {
        for s in 1..=m {
            sys.add_var(VarId::w(l, s), true);
        }
    }
    for l in 1..=m {
        sys.add_row(LinRow::new(
            format!("assign_level[{l}]"),
            (1..=m).map(|s| (VarId::w(l, s), int(1))),
            Cmp::Eq,
            int(1),
        ))?;
    }
    for s in 1..=m {
        sys.add_row(LinRow::new(
            format!("assign_stage[{s}]"),
            (1..=m).map(|l| (VarId::w(l, s), int(1))),
            Cmp::Eq,
            int(1),
        ))?;
    }
    Ok(())
}

/// The assignment (Birkhoff) polytope on `m x m` nodes: unit row and column
/// sums, `w >= 0`.
pub fn build_lap_polytope(m: usize) -> Result<ConstraintSystem> {
    if m == 0 {
        return Err(Error::EmptyInstance);
    }
    let mut sys = ConstraintSystem::new();
    add_assignment_block(&mut sys, m)?;
    Ok(sys)
}

/// The rows that tie leg variables `y` to the assignment `w`: departure and
/// return legs follow the first and last stage, consecutive-stage adjacency
/// lower-bounds inner legs, and inner legs sum to `m - 1`.
fn add_leg_block(sys: &mut ConstraintSystem, n: usize) -> Result<()> {
    let m = n - 1;
    for (i, j) in LegVector::pairs(n) {
        sys.add_var(VarId::Y(i, j), true);
    }
    for i in 1..=m {
        sys.add_row(LinRow::new(
            format!("depart[{i}]"),
            [(VarId::Y(0, i), int(1)), (VarId::w(i, 1), int(-1))],
            Cmp::Eq,
            int(0),
        ))?;
    }
    for i in 1..=m {
        sys.add_row(LinRow::new(
            format!("return[{i}]"),
            [(VarId::Y(i, 0), int(1)), (VarId::w(i, m), int(-1))],
            Cmp::Eq,
            int(0),
        ))?;
    }
    for i in 1..=m {
        for r in 1..m {
            for j in (1..=m).filter(|&j| j != i) {
                sys.add_row(LinRow::new(
                    format!("adjacent[{i},{j},{r}]"),
                    [
                        (VarId::w(i, r), int(1)),
                        (VarId::w(j, r + 1), int(1)),
                        (VarId::Y(i, j), int(-1)),
                    ],
                    Cmp::Le,
                    int(1),
                ))?;
            }
        }
    }
    let inner = (1..=m).flat_map(|i| (1..=m).filter(move |&j| j != i).map(move |j| (i, j)));
    sys.add_row(LinRow::new(
        "inner_legs",
        inner.map(|(i, j)| (VarId::Y(i, j), int(1))),
        Cmp::Eq,
        int(m as i64 - 1),
    ))?;
    Ok(())
}

/// The assignment polytope extended by travel-leg variables on `n` cities.
pub fn build_q1bar(n: usize) -> Result<ConstraintSystem> {
    if n < 3 {
        return Err(Error::InvalidInstance(format!("the leg extension needs n >= 3, got {n}")));
    }
    let mut sys = ConstraintSystem::new();
    add_assignment_block(&mut sys, n - 1)?;
    add_leg_block(&mut sys, n)?;
    Ok(sys)
}

fn require_triplet_size(m: usize) -> Result<()> {
    if m < 4 {
        Err(Error::Degenerate(format!(
            "m = {m}: the triplet cost cases overlap at stages (1,2,3) when m = 3 and the tour \
             cost is not covered; triplet constructions need m >= 4"
        )))
    } else {
        Ok(())
    }
}

fn add_triplet_block(sys: &mut ConstraintSystem, m: usize) -> Result<()> {
    let triplets = Triplet::all(m);
    for t in &triplets {
        sys.add_var(VarId::X(*t), true);
    }
    for t in &triplets {
        let x = VarId::X(*t);
        for (k, node) in t.nodes().iter().enumerate() {
            sys.add_row(LinRow::new(
                format!("x_below_w{}[{t}]", k + 1),
                [(x, int(1)), (VarId::W(*node), int(-1))],
                Cmp::Le,
                int(0),
            ))?;
        }
        sys.add_row(LinRow::new(
            format!("x_above_wsum[{t}]"),
            t.nodes()
                .iter()
                .map(|n| (VarId::W(*n), int(1)))
                .chain([(x, int(-1))]),
            Cmp::Le,
            int(2),
        ))?;
    }
    Ok(())
}

/// The assignment polytope extended by triplet variables. Only triplets
/// with increasing stages and distinct levels exist; each is bounded above
/// by its three node values and below by their sum minus two.
pub fn build_q0_triplet(m: usize) -> Result<ConstraintSystem> {
    require_triplet_size(m)?;
    let mut sys = ConstraintSystem::new();
    add_assignment_block(&mut sys, m)?;
    add_triplet_block(&mut sys, m)?;
    Ok(sys)
}

/// Triplet system plus the travel-leg block, sharing `w`.
pub fn build_q2bar(n: usize) -> Result<ConstraintSystem> {
    if n < 2 {
        return Err(Error::EmptyInstance);
    }
    let mut sys = build_q0_triplet(n - 1)?;
    sys.absorb(&build_q1bar(n)?);
    Ok(sys)
}

pub fn objective_on_w(c: &CostMatrix) -> Objective {
    let m = c.size();
    Objective::new(
        (1..=m).flat_map(|l| (1..=m).map(move |s| NodeId::new(l, s))).map(|n| (VarId::W(n), c.at(n).clone())),
    )
}

/// Costs on triplet variables whose sum over the lift of a permutation is
/// the cost of the corresponding tour. `w` and `y` carry no cost.
pub fn triplet_cost_vector(inst: &TspInstance) -> Result<Objective> {
    let m = inst.m();
    require_triplet_size(m)?;
    let d = |a: usize, b: usize| inst.d(a, b).clone();
    let terms = Triplet::all(m).into_iter().filter_map(|t| {
        let Triplet(a, b, c) = t;
        let (i, j, k) = (a.level, b.level, c.level);
        let cost = match t.stages() {
            (1, 2, 3) => d(0, i) + d(i, j) + d(j, k),
            (1, r, s) if r == m - 1 && s == m => d(j, k) + d(k, 0),
            (1, r, s) if (3..=m - 2).contains(&r) && s == r + 1 => d(j, k),
            _ => return None,
        };
        Some((VarId::X(t), cost))
    });
    Ok(Objective::new(terms))
}

//! Conversion of a [`ConstraintSystem`] into equality standard form
//! `A z = b, z >= 0, b >= 0`, shared by the simplex and the vertex
//! enumerators.

use num_traits::{Signed, Zero};

use crate::consys::{ConstraintSystem, Relation};
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Column {
    /// Positive part of a system variable (the whole variable when it is
    /// sign-constrained).
    Plus(usize),
    /// Negative part of a free variable.
    Minus(usize),
    /// Slack of an inequality row.
    Slack(usize),
}

#[derive(Debug, Clone)]
pub(crate) struct StandardForm {
    pub columns: Vec<Column>,
    /// Dense rows of `A`.
    pub a: Vec<Vec<Rational>>,
    pub b: Vec<Rational>,
    /// Source row for every standard-form row.
    pub source: Vec<usize>,
    /// Column of each system variable's positive part.
    pub plus_col: Vec<usize>,
    pub minus_col: Vec<Option<usize>>,
    /// Slack column of each system row.
    pub slack_col: Vec<Option<usize>>,
}

impl StandardForm {
    pub fn build(sys: &ConstraintSystem) -> Self {
        let vars = sys.variables();
        let mut columns = Vec::new();
        let mut plus_col = Vec::with_capacity(vars.len());
        let mut minus_col = Vec::with_capacity(vars.len());
        for (k, v) in vars.iter().enumerate() {
            plus_col.push(columns.len());
            columns.push(Column::Plus(k));
            if sys.is_nonneg(v) {
                minus_col.push(None);
            } else {
                minus_col.push(Some(columns.len()));
                columns.push(Column::Minus(k));
            }
        }
        let mut slack_of = vec![None; sys.row_count()];
        for (r, row) in sys.rows().iter().enumerate() {
            if row.relation == Relation::Le {
                slack_of[r] = Some(columns.len());
                columns.push(Column::Slack(r));
            }
        }
        let width = columns.len();
        let mut a = Vec::with_capacity(sys.row_count());
        let mut b = Vec::with_capacity(sys.row_count());
        for (r, row) in sys.rows().iter().enumerate() {
            let mut dense = vec![Rational::zero(); width];
            for (v, c) in &row.coefficients {
                let k = sys.column(v).expect("row variables are declared");
                dense[plus_col[k]] = c.clone();
                if let Some(mc) = minus_col[k] {
                    dense[mc] = -c.clone();
                }
            }
            if let Some(s) = slack_of[r] {
                dense[s] = Rational::from_integer(1.into());
            }
            let mut rhs = row.rhs.clone();
            if rhs.is_negative() {
                dense.iter_mut().for_each(|x| *x = -x.clone());
                rhs = -rhs;
            }
            a.push(dense);
            b.push(rhs);
        }
        StandardForm {
            columns,
            a,
            b,
            source: (0..sys.row_count()).collect(),
            plus_col,
            minus_col,
            slack_col: slack_of,
        }
    }

    pub fn width(&self) -> usize {
        self.columns.len()
    }

    pub fn height(&self) -> usize {
        self.a.len()
    }

    /// Maps a standard-form point back to the system's variables.
    pub fn recover(&self, z: &[Rational], nvars: usize) -> Vec<Rational> {
        (0..nvars)
            .map(|k| {
                let mut v = z[self.plus_col[k]].clone();
                if let Some(mc) = self.minus_col[k] {
                    v -= &z[mc];
                }
                v
            })
            .collect()
    }

    pub fn column_name(&self, c: usize, sys: &ConstraintSystem) -> String {
        match self.columns[c] {
            Column::Plus(k) => sys.variables()[k].to_string(),
            Column::Minus(k) => format!("-{}", sys.variables()[k]),
            Column::Slack(r) => format!("slack[{}]", sys.rows()[r].label),
        }
    }

    /// Replaces the rows by an equivalent full-row-rank set in reduced row
    /// echelon form. Returns `false` when the equalities are inconsistent.
    pub fn reduce_rows(&mut self) -> bool {
        let (rows, rhs, source, consistent) = rref(&self.a, &self.b, &self.source);
        self.a = rows;
        self.b = rhs;
        self.source = source;
        consistent
    }
}

/// Reduced row echelon form of `[a | b]` with zero rows dropped. The
/// returned `b` may have negative entries.
fn rref(
    a: &[Vec<Rational>],
    b: &[Rational],
    source: &[usize],
) -> (Vec<Vec<Rational>>, Vec<Rational>, Vec<usize>, bool) {
    let mut rows: Vec<Vec<Rational>> = a.to_vec();
    let mut rhs: Vec<Rational> = b.to_vec();
    let mut src: Vec<usize> = source.to_vec();
    let width = rows.first().map_or(0, Vec::len);
    let mut lead = 0;
    for col in 0..width {
        let Some(p) = (lead..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(lead, p);
        rhs.swap(lead, p);
        src.swap(lead, p);
        let inv = rows[lead][col].recip();
        rows[lead].iter_mut().for_each(|x| *x *= &inv);
        rhs[lead] *= &inv;
        let pivot_row = rows[lead].clone();
        let pivot_rhs = rhs[lead].clone();
        let nz: Vec<usize> = (0..width).filter(|&j| !pivot_row[j].is_zero()).collect();
        for i in 0..rows.len() {
            if i == lead || rows[i][col].is_zero() {
                continue;
            }
            let f = rows[i][col].clone();
            for &j in &nz {
                let t = &f * &pivot_row[j];
                rows[i][j] -= t;
            }
            rhs[i] -= &f * &pivot_rhs;
        }
        lead += 1;
        if lead == rows.len() {
            break;
        }
    }
    let consistent = rhs[lead..].iter().all(Zero::is_zero);
    rows.truncate(lead);
    rhs.truncate(lead);
    src.truncate(lead);
    (rows, rhs, src, consistent)
}

/// Solves `B x = b` for square `B` given as columns `cols` of `a`. Returns
/// `None` when singular.
pub(crate) fn solve_basis(a: &[Vec<Rational>], b: &[Rational], cols: &[usize]) -> Option<Vec<Rational>> {
    let r = a.len();
    debug_assert_eq!(cols.len(), r);
    let mut m: Vec<Vec<Rational>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| cols.iter().map(|&c| row[c].clone()).chain([rhs.clone()]).collect())
        .collect();
    for col in 0..r {
        let p = (col..r).find(|&i| !m[i][col].is_zero())?;
        m.swap(col, p);
        let inv = m[col][col].recip();
        m[col].iter_mut().for_each(|x| *x *= &inv);
        let pivot = m[col].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == col || row[col].is_zero() {
                continue;
            }
            let f = row[col].clone();
            for j in col..=r {
                if !pivot[j].is_zero() {
                    let t = &f * &pivot[j];
                    row[j] -= t;
                }
            }
        }
    }
    Some(m.into_iter().map(|mut row| row.pop().expect("augmented")).collect())
}

//! Two-phase primal simplex on a dense exact tableau with Bland's
//! smallest-index rule.

use num_traits::{Signed, Zero};

use crate::rational::Rational;

use super::standard::StandardForm;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Outcome {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Tableau rows `0..height` are constraints, the last row holds reduced
/// costs. The last column is the right-hand side; the objective row's rhs
/// is the negated objective value.
pub(crate) struct Tableau {
    pub t: Vec<Vec<Rational>>,
    pub basis: Vec<usize>,
    /// Standard-form row each tableau row came from.
    pub row_source: Vec<usize>,
    /// Columns allowed to enter (artificials are barred after phase one).
    pub allowed: Vec<bool>,
    pub width: usize,
    pub pivots: usize,
}

impl Tableau {
    fn rhs_col(&self) -> usize {
        self.width
    }

    fn height(&self) -> usize {
        self.t.len() - 1
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let inv = self.t[r][c].recip();
        let nz: Vec<usize> = (0..=self.width).filter(|&j| !self.t[r][j].is_zero()).collect();
        for &j in &nz {
            self.t[r][j] *= &inv;
        }
        let pivot_row = std::mem::take(&mut self.t[r]);
        for (i, row) in self.t.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for &j in &nz {
                let d = &f * &pivot_row[j];
                row[j] -= d;
            }
        }
        self.t[r] = pivot_row;
        self.basis[r] = c;
        self.pivots += 1;
    }

    /// Bland's rule: entering column is the smallest allowed index with a
    /// negative reduced cost; ties in the ratio test go to the smallest
    /// basic column index.
    fn run(&mut self) -> Outcome {
        let rhs = self.rhs_col();
        loop {
            let obj = self.height();
            let Some(c) = (0..self.width).find(|&j| self.allowed[j] && self.t[obj][j].is_negative())
            else {
                return Outcome::Optimal;
            };
            let mut best: Option<(usize, Rational)> = None;
            for i in 0..obj {
                let a = &self.t[i][c];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.t[i][rhs] / a;
                let better = match &best {
                    None => true,
                    Some((bi, br)) => ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi]),
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            match best {
                None => return Outcome::Unbounded,
                Some((r, _)) => self.pivot(r, c),
            }
        }
    }

    fn set_objective(&mut self, cost: &[Rational]) {
        let obj = self.height();
        let mut row = vec![Rational::zero(); self.width + 1];
        for (j, c) in cost.iter().enumerate() {
            row[j] = c.clone();
        }
        for i in 0..obj {
            let cb = &cost[self.basis[i]];
            if cb.is_zero() {
                continue;
            }
            for (r, t) in row.iter_mut().zip(&self.t[i]) {
                if !t.is_zero() {
                    *r -= cb * t;
                }
            }
        }
        self.t[obj] = row;
    }

    /// Value of every standard-form column at the current basis.
    pub fn point(&self, ncols: usize) -> Vec<Rational> {
        let mut z = vec![Rational::zero(); ncols];
        for (i, &b) in self.basis.iter().enumerate() {
            if b < ncols {
                z[b] = self.t[i][self.rhs_col()].clone();
            }
        }
        z
    }

    pub fn objective_value(&self) -> Rational {
        -self.t[self.height()][self.rhs_col()].clone()
    }

    pub fn entry(&self, i: usize, j: usize) -> &Rational {
        &self.t[i][j]
    }
}

/// Runs both phases. `cost` is indexed by standard-form column.
pub(crate) fn two_phase(sf: &StandardForm, cost: &[Rational]) -> (Outcome, Tableau) {
    let ncols = sf.width();
    let height = sf.height();
    // Rows whose slack has coefficient +1 start with the slack basic; the
    // rest get an artificial column.
    let mut basis = vec![usize::MAX; height];
    let mut art_rows = Vec::new();
    for (i, row) in sf.a.iter().enumerate() {
        let slack = sf.slack_col[sf.source[i]].filter(|&j| {
            row[j] == Rational::from_integer(1.into())
                && sf.a.iter().enumerate().all(|(k, r)| k == i || r[j].is_zero())
        });
        match slack {
            Some(j) => basis[i] = j,
            None => art_rows.push(i),
        }
    }
    let width = ncols + art_rows.len();
    let mut t: Vec<Vec<Rational>> = Vec::with_capacity(height + 1);
    for (i, row) in sf.a.iter().enumerate() {
        let mut r = Vec::with_capacity(width + 1);
        r.extend(row.iter().cloned());
        r.extend((0..art_rows.len()).map(|k| {
            if art_rows[k] == i {
                Rational::from_integer(1.into())
            } else {
                Rational::zero()
            }
        }));
        r.push(sf.b[i].clone());
        t.push(r);
    }
    for (k, &i) in art_rows.iter().enumerate() {
        basis[i] = ncols + k;
    }
    t.push(vec![Rational::zero(); width + 1]);
    let mut tab = Tableau {
        t,
        basis,
        row_source: sf.source.clone(),
        allowed: vec![true; width],
        width,
        pivots: 0,
    };

    if !art_rows.is_empty() {
        let mut phase_one = vec![Rational::zero(); width];
        for c in phase_one.iter_mut().skip(ncols) {
            *c = Rational::from_integer(1.into());
        }
        tab.set_objective(&phase_one);
        tab.run();
        if tab.objective_value().is_positive() {
            return (Outcome::Infeasible, tab);
        }
        // Drive artificials out of the basis; rows where that is impossible
        // are redundant and dropped.
        let mut i = 0;
        while i < tab.height() {
            if tab.basis[i] >= ncols {
                match (0..ncols).find(|&j| !tab.t[i][j].is_zero()) {
                    Some(j) => {
                        tab.pivot(i, j);
                        i += 1;
                    }
                    None => {
                        tab.t.remove(i);
                        tab.basis.remove(i);
                        tab.row_source.remove(i);
                    }
                }
            } else {
                i += 1;
            }
        }
        for a in tab.allowed.iter_mut().skip(ncols) {
            *a = false;
        }
    }
    let mut full = cost.to_vec();
    full.resize(width, Rational::zero());
    tab.set_objective(&full);
    let outcome = tab.run();
    (outcome, tab)
}

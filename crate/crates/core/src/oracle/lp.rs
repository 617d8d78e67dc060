//! Exact two-phase simplex over rationals with Bland's rule.

use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Maximize,
    Minimize,
}

/// Sparse row: `Σ coeffs · x  relation  rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<(usize, Rational)>,
    pub relation: Relation,
    pub rhs: Rational,
}

impl Constraint {
    fn lhs(&self, point: &[Rational]) -> Rational {
        self.coeffs.iter().fold(Rational::zero(), |acc, (k, c)| acc + c * &point[*k])
    }

    pub fn holds(&self, point: &[Rational]) -> bool {
        let lhs = self.lhs(point);
        match self.relation {
            Relation::Le => lhs <= self.rhs,
            Relation::Eq => lhs == self.rhs,
            Relation::Ge => lhs >= self.rhs,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct LinearProgram {
    pub names: Vec<String>,
    /// Variables restricted to `x ≥ 0`; the rest are free.
    pub nonneg: Vec<bool>,
    pub constraints: Vec<Constraint>,
    /// `None` asks for feasibility only.
    pub objective: Option<(Vec<(usize, Rational)>, Sense)>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpResult {
    Optimal { value: Rational, point: Vec<Rational> },
    Infeasible,
    Unbounded,
}

impl LpResult {
    pub fn point(&self) -> Option<&[Rational]> {
        match self {
            LpResult::Optimal { point, .. } => Some(point),
            _ => None,
        }
    }
}

impl LinearProgram {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn var(&mut self, name: impl Into<String>) -> usize {
        self.names.push(name.into());
        self.nonneg.push(false);
        self.names.len() - 1
    }

    pub fn nonneg_var(&mut self, name: impl Into<String>) -> usize {
        let k = self.var(name);
        self.nonneg[k] = true;
        k
    }

    pub fn constrain(&mut self, coeffs: Vec<(usize, Rational)>, relation: Relation, rhs: Rational) {
        self.constraints.push(Constraint { coeffs, relation, rhs });
    }

    pub fn set_objective(&mut self, coeffs: Vec<(usize, Rational)>, sense: Sense) {
        self.objective = Some((coeffs, sense));
    }

    pub fn num_vars(&self) -> usize {
        self.names.len()
    }

    pub fn solve(&self) -> LpResult {
        Tableau::build(self).run(self)
    }
}

impl fmt::Display for LinearProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let term = |coeffs: &[(usize, Rational)]| {
            coeffs.iter().map(|(k, c)| format!("{c}*{}", self.names[*k])).collect::<Vec<_>>().join(" + ")
        };
        match &self.objective {
            Some((c, Sense::Maximize)) => writeln!(f, "max {}", term(c))?,
            Some((c, Sense::Minimize)) => writeln!(f, "min {}", term(c))?,
            None => writeln!(f, "feasible")?,
        }
        for row in &self.constraints {
            let rel = match row.relation {
                Relation::Le => "<=",
                Relation::Eq => "=",
                Relation::Ge => ">=",
            };
            writeln!(f, "  {} {rel} {}", term(&row.coeffs), row.rhs)?;
        }
        Ok(())
    }
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    /// Column of the positive part of each variable, and of the negative
    /// part for free variables.
    columns: Vec<(usize, Option<usize>)>,
    first_artificial: usize,
    width: usize,
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Tableau {
        let mut columns = Vec::with_capacity(lp.num_vars());
        let mut next = 0;
        for &nonneg in &lp.nonneg {
            let neg = (!nonneg).then(|| next + 1);
            columns.push((next, neg));
            next += if nonneg { 1 } else { 2 };
        }
        let structural = next;
        let slacks = lp.constraints.iter().filter(|c| c.relation != Relation::Eq).count();
        let artificials = lp
            .constraints
            .iter()
            .filter(|c| match c.relation {
                Relation::Eq => true,
                Relation::Le => c.rhs.is_negative(),
                Relation::Ge => !c.rhs.is_negative(),
            })
            .count();
        let first_artificial = structural + slacks;
        let width = first_artificial + artificials;

        let mut rows = Vec::with_capacity(lp.constraints.len());
        let mut basis = Vec::with_capacity(lp.constraints.len());
        let (mut slack, mut art) = (structural, first_artificial);
        for c in &lp.constraints {
            let mut row = vec![Rational::zero(); width + 1];
            for (k, v) in &c.coeffs {
                let (pos, neg) = columns[*k];
                row[pos] += v;
                if let Some(neg) = neg {
                    row[neg] -= v;
                }
            }
            row[width] = c.rhs.clone();
            let mut slack_col = None;
            if c.relation != Relation::Eq {
                row[slack] = if c.relation == Relation::Le { Rational::one() } else { -Rational::one() };
                slack_col = Some(slack);
                slack += 1;
            }
            if row[width].is_negative() {
                for x in row.iter_mut() {
                    *x = -&*x;
                }
            }
            match slack_col {
                Some(s) if row[s].is_positive() => basis.push(s),
                _ => {
                    row[art] = Rational::one();
                    basis.push(art);
                    art += 1;
                }
            }
            rows.push(row);
        }
        Tableau { rows, basis, columns, first_artificial, width }
    }

    fn reduced_costs(&self, costs: &[Rational]) -> Vec<Rational> {
        let mut z: Vec<Rational> = costs.to_vec();
        z.push(Rational::zero());
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            let cb = &costs[b];
            if cb.is_zero() {
                continue;
            }
            for (k, x) in row.iter().enumerate() {
                if !x.is_zero() {
                    z[k] -= cb * x;
                }
            }
        }
        z
    }

    fn pivot(&mut self, p: usize, col: usize, objective: &mut [Rational]) {
        let inv = self.rows[p][col].recip();
        if !inv.is_one() {
            for x in self.rows[p].iter_mut() {
                if !x.is_zero() {
                    *x *= &inv;
                }
            }
        }
        let support: Vec<usize> = (0..=self.width).filter(|&k| !self.rows[p][k].is_zero()).collect();
        let pivot_row = std::mem::take(&mut self.rows[p]);
        let eliminate = |row: &mut [Rational]| {
            let factor = row[col].clone();
            if factor.is_zero() {
                return;
            }
            for &k in &support {
                row[k] -= &factor * &pivot_row[k];
            }
        };
        for row in self.rows.iter_mut() {
            if !row.is_empty() {
                eliminate(row);
            }
        }
        if !objective.is_empty() {
            eliminate(objective);
        }
        self.rows[p] = pivot_row;
        self.basis[p] = col;
    }

    /// Minimizes over columns `< limit`. Returns false when unbounded.
    fn optimize(&mut self, objective: &mut [Rational], limit: usize) -> bool {
        loop {
            let Some(col) = (0..limit).find(|&k| objective[k].is_negative()) else { return true };
            let mut best: Option<(usize, Rational)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if !row[col].is_positive() {
                    continue;
                }
                let ratio = &row[self.width] / &row[col];
                let better = match &best {
                    None => true,
                    Some((j, r)) => ratio < *r || (ratio == *r && self.basis[i] < self.basis[*j]),
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            let Some((p, _)) = best else { return false };
            self.pivot(p, col, objective);
        }
    }

    fn run(mut self, lp: &LinearProgram) -> LpResult {
        if self.first_artificial < self.width {
            let mut phase1: Vec<Rational> = (0..self.width)
                .map(|k| if k >= self.first_artificial { Rational::one() } else { Rational::zero() })
                .collect();
            phase1 = self.reduced_costs(&phase1);
            self.optimize(&mut phase1, self.width);
            if !phase1[self.width].is_zero() {
                return LpResult::Infeasible;
            }
            self.expel_artificials();
        }

        let mut costs = vec![Rational::zero(); self.width];
        let mut sign = Rational::one();
        if let Some((coeffs, sense)) = &lp.objective {
            if *sense == Sense::Maximize {
                sign = -Rational::one();
            }
            for (k, c) in coeffs {
                let (pos, neg) = self.columns[*k];
                costs[pos] += &sign * c;
                if let Some(neg) = neg {
                    costs[neg] -= &sign * c;
                }
            }
        }
        let mut objective = self.reduced_costs(&costs);
        if !self.optimize(&mut objective, self.first_artificial) {
            return LpResult::Unbounded;
        }

        let mut column_value = vec![Rational::zero(); self.width];
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            column_value[b] = row[self.width].clone();
        }
        let point: Vec<Rational> = self
            .columns
            .iter()
            .map(|&(pos, neg)| match neg {
                Some(neg) => &column_value[pos] - &column_value[neg],
                None => column_value[pos].clone(),
            })
            .collect();
        debug_assert!(lp.constraints.iter().all(|c| c.holds(&point)));
        let value = match &lp.objective {
            Some((coeffs, _)) => coeffs.iter().fold(Rational::zero(), |acc, (k, c)| acc + c * &point[*k]),
            None => Rational::zero(),
        };
        LpResult::Optimal { value, point }
    }

    /// Pivots zero-valued artificials out of the basis, dropping rows that
    /// turn out redundant.
    fn expel_artificials(&mut self) {
        let mut i = 0;
        while i < self.rows.len() {
            if self.basis[i] < self.first_artificial {
                i += 1;
                continue;
            }
            match (0..self.first_artificial).find(|&k| !self.rows[i][k].is_zero()) {
                Some(col) => {
                    self.pivot(i, col, &mut []);
                    i += 1;
                }
                None => {
                    self.rows.remove(i);
                    self.basis.remove(i);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    #[test]
    fn single_variable() {
        let mut lp = LinearProgram::new();
        let x = lp.var("x");
        lp.constrain(vec![(x, int(1))], Relation::Le, int(3));
        lp.set_objective(vec![(x, int(1))], Sense::Maximize);
        assert_eq!(lp.solve(), LpResult::Optimal { value: int(3), point: vec![int(3)] });
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut lp = LinearProgram::new();
        let x = lp.var("x");
        lp.constrain(vec![(x, int(1))], Relation::Ge, int(1));
        lp.constrain(vec![(x, int(1))], Relation::Le, int(0));
        assert_eq!(lp.solve(), LpResult::Infeasible);

        let mut lp = LinearProgram::new();
        let x = lp.var("x");
        lp.constrain(vec![(x, int(1))], Relation::Ge, int(1));
        lp.set_objective(vec![(x, int(1))], Sense::Maximize);
        assert_eq!(lp.solve(), LpResult::Unbounded);
        lp.set_objective(vec![(x, int(1))], Sense::Minimize);
        assert_eq!(lp.solve(), LpResult::Optimal { value: int(1), point: vec![int(1)] });
    }

    #[test]
    fn two_room_maximin() {
        let mut lp = LinearProgram::new();
        let r1 = lp.var("r1");
        let r2 = lp.var("r2");
        let t = lp.var("t");
        lp.constrain(vec![(r1, int(1)), (r2, int(1))], Relation::Eq, int(8));
        lp.constrain(vec![(r1, int(1)), (r2, int(-1))], Relation::Le, int(8));
        lp.constrain(vec![(r2, int(1)), (r1, int(-1))], Relation::Le, int(2));
        lp.constrain(vec![(t, int(1)), (r1, int(1))], Relation::Le, int(10));
        lp.constrain(vec![(t, int(1)), (r2, int(1))], Relation::Le, int(6));
        lp.set_objective(vec![(t, int(1))], Sense::Maximize);
        assert_eq!(lp.solve(), LpResult::Optimal { value: int(4), point: vec![int(6), int(2), int(4)] });
    }

    #[test]
    fn redundant_equalities_and_fractions() {
        let mut lp = LinearProgram::new();
        let x = lp.nonneg_var("x");
        let y = lp.nonneg_var("y");
        lp.constrain(vec![(x, int(1)), (y, int(1))], Relation::Eq, int(1));
        lp.constrain(vec![(x, int(2)), (y, int(2))], Relation::Eq, int(2));
        lp.constrain(vec![(x, int(3)), (y, int(-1))], Relation::Ge, int(0));
        lp.set_objective(vec![(x, int(1))], Sense::Minimize);
        assert_eq!(lp.solve(), LpResult::Optimal { value: ratio(1, 4), point: vec![ratio(1, 4), ratio(3, 4)] });
    }

    #[test]
    fn degenerate_cycling_example() {
        // Beale's example cycles under the textbook largest-coefficient rule
        let mut lp = LinearProgram::new();
        let x: Vec<usize> = (0..4).map(|k| lp.nonneg_var(format!("x{k}"))).collect();
        let row = |c: [Rational; 4]| x.iter().copied().zip(c).collect::<Vec<_>>();
        lp.constrain(row([ratio(1, 4), int(-60), ratio(-1, 25), int(9)]), Relation::Le, int(0));
        lp.constrain(row([ratio(1, 2), int(-90), ratio(-1, 50), int(3)]), Relation::Le, int(0));
        lp.constrain(row([int(0), int(0), int(1), int(0)]), Relation::Le, int(1));
        lp.set_objective(row([ratio(3, 4), int(-150), ratio(1, 50), int(-6)]), Sense::Maximize);
        let LpResult::Optimal { value, .. } = lp.solve() else { panic!("expected optimum") };
        assert_eq!(value, ratio(1, 20));
    }
}

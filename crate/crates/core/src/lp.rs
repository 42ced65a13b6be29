//! Exact linear feasibility over `x ≥ 0`.
//!
//! Dense phase-1 simplex with Bland's rule on a rational tableau. Infeasible
//! systems come back with Farkas multipliers (read off the artificial
//! columns) and can be shrunk to an irreducible infeasible subset.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

impl Sense {
    pub fn holds(self, lhs: &Rational, rhs: &Rational) -> bool {
        match self {
            Sense::Le => lhs <= rhs,
            Sense::Ge => lhs >= rhs,
            Sense::Eq => lhs == rhs,
        }
    }

    fn flipped(self) -> Sense {
        match self {
            Sense::Le => Sense::Ge,
            Sense::Ge => Sense::Le,
            Sense::Eq => Sense::Eq,
        }
    }
}

/// `Σ coeffs · x  (sense)  rhs`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub coeffs: Vec<(usize, Rational)>,
    pub sense: Sense,
    pub rhs: Rational,
    pub label: String,
}

impl Constraint {
    pub fn new(coeffs: Vec<(usize, Rational)>, sense: Sense, rhs: Rational, label: impl Into<String>) -> Self {
        Constraint { coeffs, sense, rhs, label: label.into() }
    }

    pub fn lhs(&self, x: &[Rational]) -> Rational {
        self.coeffs.iter().map(|(j, a)| a * &x[*j]).sum()
    }

    pub fn is_satisfied(&self, x: &[Rational]) -> bool {
        self.sense.holds(&self.lhs(x), &self.rhs)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LinearSystem {
    pub variables: usize,
    pub constraints: Vec<Constraint>,
}

impl LinearSystem {
    pub fn new(variables: usize) -> Self {
        LinearSystem { variables, constraints: Vec::new() }
    }

    pub fn push(&mut self, c: Constraint) {
        self.constraints.push(c);
    }

    /// The subsystem made of the constraints at `indices`.
    pub fn subsystem(&self, indices: &[usize]) -> LinearSystem {
        LinearSystem { variables: self.variables, constraints: indices.iter().map(|&k| self.constraints[k].clone()).collect() }
    }

    /// `x ≥ 0` and every constraint holds, exactly.
    pub fn is_satisfied_by(&self, x: &[Rational]) -> bool {
        x.len() == self.variables && x.iter().all(|v| !v.is_negative()) && self.constraints.iter().all(|c| c.is_satisfied(x))
    }

    /// Checks Farkas multipliers: `y_k ≥ 0` on `≥` rows, `y_k ≤ 0` on `≤`
    /// rows, `Σ y_k a_k ≤ 0` componentwise and `Σ y_k b_k > 0`. Any `x ≥ 0`
    /// satisfying the system would give `0 ≥ Σ y_k a_k x ≥ Σ y_k b_k > 0`.
    pub fn is_farkas_certificate(&self, y: &[Rational]) -> bool {
        if y.len() != self.constraints.len() {
            return false;
        }
        let signs_ok = self.constraints.iter().zip(y).all(|(c, yk)| match c.sense {
            Sense::Ge => !yk.is_negative(),
            Sense::Le => !yk.is_positive(),
            Sense::Eq => true,
        });
        let mut combo = vec![Rational::zero(); self.variables];
        let mut rhs = Rational::zero();
        for (c, yk) in self.constraints.iter().zip(y) {
            if yk.is_zero() {
                continue;
            }
            for (j, a) in &c.coeffs {
                combo[*j] += yk * a;
            }
            rhs += yk * &c.rhs;
        }
        signs_ok && combo.iter().all(|v| !v.is_positive()) && rhs.is_positive()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Feasibility {
    Feasible(Vec<Rational>),
    /// Farkas multipliers, one per constraint.
    Infeasible(Vec<Rational>),
}

impl Feasibility {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Feasibility::Feasible(_))
    }
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    /// Reduced costs, last entry is minus the objective value.
    costs: Vec<Rational>,
    basis: Vec<usize>,
    pivots: u64,
}

impl Tableau {
    fn rhs(&self, r: usize) -> &Rational {
        self.rows[r].last().expect("rhs column")
    }

    fn pivot(&mut self, r: usize, col: usize) {
        let p = self.rows[r][col].clone();
        for v in self.rows[r].iter_mut() {
            if !v.is_zero() {
                *v /= &p;
            }
        }
        let pivot_row = self.rows[r].clone();
        let nonzero: Vec<usize> = (0..pivot_row.len()).filter(|&j| !pivot_row[j].is_zero()).collect();
        for (k, row) in self.rows.iter_mut().enumerate() {
            if k == r || row[col].is_zero() {
                continue;
            }
            let f = row[col].clone();
            for &j in &nonzero {
                row[j] -= &f * &pivot_row[j];
            }
        }
        if !self.costs[col].is_zero() {
            let f = self.costs[col].clone();
            for &j in &nonzero {
                self.costs[j] -= &f * &pivot_row[j];
            }
        }
        self.basis[r] = col;
        self.pivots += 1;
    }

    /// Bland's rule: lowest-index entering column, ties in the ratio test go
    /// to the lowest-index basic variable.
    fn run(&mut self, columns: usize, max_pivots: u64) -> Result<()> {
        loop {
            let Some(col) = (0..columns).find(|&j| self.costs[j].is_negative()) else {
                return Ok(());
            };
            let mut best: Option<(Rational, usize)> = None;
            for r in 0..self.rows.len() {
                let a = &self.rows[r][col];
                if !a.is_positive() {
                    continue;
                }
                let ratio = self.rhs(r) / a;
                let better = match &best {
                    None => true,
                    Some((b, br)) => ratio < *b || (ratio == *b && self.basis[r] < self.basis[*br]),
                };
                if better {
                    best = Some((ratio, r));
                }
            }
            let (_, r) = best.ok_or_else(|| Error::Internal("phase-1 objective is bounded below by 0".into()))?;
            if self.pivots >= max_pivots {
                return Err(Error::BudgetExceeded { budget: max_pivots });
            }
            self.pivot(r, col);
        }
    }
}

/// Default pivot limit for [`solve`].
pub const DEFAULT_MAX_PIVOTS: u64 = 1_000_000;

/// Decides feasibility of `system` with `x ≥ 0`.
pub fn solve(system: &LinearSystem) -> Result<Feasibility> {
    solve_with_limit(system, DEFAULT_MAX_PIVOTS)
}

pub fn solve_with_limit(system: &LinearSystem, max_pivots: u64) -> Result<Feasibility> {
    let n = system.variables;
    let m = system.constraints.len();
    if m == 0 {
        return Ok(Feasibility::Feasible(vec![Rational::zero(); n]));
    }
    for c in &system.constraints {
        if let Some((j, _)) = c.coeffs.iter().find(|(j, _)| *j >= n) {
            return Err(Error::Dimension { expected: n, found: j + 1 });
        }
    }
    let slack_rows: Vec<usize> = (0..m).filter(|&k| system.constraints[k].sense != Sense::Eq).collect();
    let slacks = slack_rows.len();
    let artificial = n + slacks;
    let width = artificial + m + 1;

    let mut signs = Vec::with_capacity(m);
    let mut rows = Vec::with_capacity(m);
    for (k, c) in system.constraints.iter().enumerate() {
        let sign = if c.rhs.is_negative() { -Rational::one() } else { Rational::one() };
        let sense = if c.rhs.is_negative() { c.sense.flipped() } else { c.sense };
        let mut row = vec![Rational::zero(); width];
        for (j, a) in &c.coeffs {
            row[*j] += a * &sign;
        }
        if let Some(s) = slack_rows.iter().position(|&r| r == k) {
            row[n + s] = if sense == Sense::Le { Rational::one() } else { -Rational::one() };
        }
        row[artificial + k] = Rational::one();
        row[width - 1] = &c.rhs * &sign;
        signs.push(sign);
        rows.push(row);
    }
    let mut costs = vec![Rational::zero(); width];
    for row in &rows {
        for j in (0..artificial).chain(core::iter::once(width - 1)) {
            if !row[j].is_zero() {
                costs[j] -= &row[j];
            }
        }
    }
    let mut t = Tableau { rows, costs, basis: (artificial..artificial + m).collect(), pivots: 0 };
    t.run(artificial, max_pivots)?;

    let objective = -t.costs[width - 1].clone();
    if objective.is_zero() {
        let mut x = vec![Rational::zero(); n];
        for (r, &b) in t.basis.iter().enumerate() {
            if b < n {
                x[b] = t.rhs(r).clone();
            }
        }
        if !system.is_satisfied_by(&x) {
            return Err(Error::Internal("simplex witness does not satisfy the system".into()));
        }
        Ok(Feasibility::Feasible(x))
    } else {
        // reduced cost of artificial k is 1 − y_k
        let y: Vec<Rational> = (0..m).map(|k| (Rational::one() - &t.costs[artificial + k]) * &signs[k]).collect();
        if !system.is_farkas_certificate(&y) {
            return Err(Error::Internal("phase-1 duals are not a Farkas certificate".into()));
        }
        Ok(Feasibility::Infeasible(y))
    }
}

/// Shrinks an infeasible system to an irreducible infeasible subset: the
/// support of its Farkas multipliers, then a deletion filter. Returns
/// constraint indices into `system`.
pub fn irreducible_infeasible_subset(system: &LinearSystem) -> Result<Vec<usize>> {
    let Feasibility::Infeasible(y) = solve(system)? else {
        return Err(Error::Precondition("system is feasible".into()));
    };
    let mut kept: Vec<usize> = (0..y.len()).filter(|&k| !y[k].is_zero()).collect();
    let mut k = 0;
    while k < kept.len() {
        let mut trial = kept.clone();
        trial.remove(k);
        if solve(&system.subsystem(&trial))?.is_feasible() {
            k += 1;
        } else {
            kept = trial;
        }
    }
    Ok(kept)
}

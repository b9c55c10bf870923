//! Dense two-phase simplex with Bland's anti-cycling rule.
//!
//! Generic over [`Scalar`]: over [`Rational`](crate::num::Rational) every
//! pivot is exact, over `f64` pivots and sign tests use the scalar tolerance.
//! Variables are implicitly nonnegative.

use crate::num::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone)]
pub struct Constraint<T> {
    pub coeffs: Vec<(usize, T)>,
    pub sense: Sense,
    pub rhs: T,
}

/// `min c·x` subject to linear rows and `x >= 0`.
#[derive(Debug, Clone)]
pub struct LinearProgram<T> {
    num_vars: usize,
    objective: Vec<T>,
    constraints: Vec<Constraint<T>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution<T> {
    pub x: Vec<T>,
    pub objective: T,
    pub pivots: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpStatus<T> {
    Optimal(LpSolution<T>),
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LpError {
    #[error("simplex exceeded {0} pivots")]
    PivotLimit(usize),
    #[error("variable index {index} out of range (program has {num_vars} variables)")]
    BadVariable { index: usize, num_vars: usize },
}

pub const DEFAULT_PIVOT_LIMIT: usize = 200_000;

impl<T: Scalar> LinearProgram<T> {
    pub fn new(num_vars: usize) -> Self {
        LinearProgram { num_vars, objective: vec![T::zero(); num_vars], constraints: Vec::new() }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn set_objective(&mut self, var: usize, coeff: T) {
        self.objective[var] = coeff;
    }

    pub fn add_constraint(&mut self, coeffs: Vec<(usize, T)>, sense: Sense, rhs: T) {
        self.constraints.push(Constraint { coeffs, sense, rhs });
    }

    pub fn solve(&self) -> Result<LpStatus<T>, LpError> {
        self.solve_with_limit(DEFAULT_PIVOT_LIMIT)
    }

    pub fn solve_with_limit(&self, max_pivots: usize) -> Result<LpStatus<T>, LpError> {
        self.check_indices()?;
        Tableau::build(self).run(&self.objective, max_pivots)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Column {
    Structural,
    Slack,
    Artificial,
}

struct Tableau<T> {
    /// `rows[i]` has one entry per column plus the right-hand side last.
    rows: Vec<Vec<T>>,
    basis: Vec<usize>,
    kinds: Vec<Column>,
    num_structural: usize,
    pivots: usize,
}

impl<T: Scalar> Tableau<T> {
    fn build(lp: &LinearProgram<T>) -> Self {
        let n = lp.num_vars;
        let mut slack_count = 0;
        let mut art_count = 0;
        let mut normalized = Vec::with_capacity(lp.constraints.len());
        for c in &lp.constraints {
            let mut dense = vec![T::zero(); n];
            for (j, a) in &c.coeffs {
                dense[*j] = dense[*j].clone() + a.clone();
            }
            let (mut rhs, mut sense) = (c.rhs.clone(), c.sense);
            if rhs < T::zero() {
                for a in dense.iter_mut() {
                    *a = -a.clone();
                }
                rhs = -rhs;
                sense = match sense {
                    Sense::Le => Sense::Ge,
                    Sense::Ge => Sense::Le,
                    Sense::Eq => Sense::Eq,
                };
            }
            match sense {
                Sense::Le => slack_count += 1,
                Sense::Ge => {
                    slack_count += 1;
                    art_count += 1;
                }
                Sense::Eq => art_count += 1,
            }
            normalized.push((dense, sense, rhs));
        }

        let width = n + slack_count + art_count;
        let mut kinds = vec![Column::Structural; n];
        kinds.extend(std::iter::repeat_n(Column::Slack, slack_count));
        kinds.extend(std::iter::repeat_n(Column::Artificial, art_count));

        let mut rows = Vec::with_capacity(normalized.len());
        let mut basis = Vec::with_capacity(normalized.len());
        let (mut next_slack, mut next_art) = (n, n + slack_count);
        for (dense, sense, rhs) in normalized {
            let mut row = dense;
            row.resize(width + 1, T::zero());
            row[width] = rhs;
            match sense {
                Sense::Le => {
                    row[next_slack] = T::one();
                    basis.push(next_slack);
                    next_slack += 1;
                }
                Sense::Ge => {
                    row[next_slack] = -T::one();
                    next_slack += 1;
                    row[next_art] = T::one();
                    basis.push(next_art);
                    next_art += 1;
                }
                Sense::Eq => {
                    row[next_art] = T::one();
                    basis.push(next_art);
                    next_art += 1;
                }
            }
            rows.push(row);
        }
        Tableau { rows, basis, kinds, num_structural: n, pivots: 0 }
    }

    fn width(&self) -> usize {
        self.kinds.len()
    }

    /// Reduced-cost row for `cost` (indexed by column) under the current
    /// basis; the last entry holds minus the objective value.
    fn reduced_costs(&self, cost: &[T]) -> Vec<T> {
        let w = self.width();
        let mut d: Vec<T> = cost.to_vec();
        d.push(T::zero());
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            let cb = &cost[b];
            if cb.is_zero_tol() {
                continue;
            }
            for j in 0..=w {
                if !row[j].is_zero_tol() {
                    d[j] = d[j].clone() - cb.clone() * row[j].clone();
                }
            }
        }
        d
    }

    fn pivot(&mut self, r: usize, c: usize, d: &mut [T]) {
        let w = self.width();
        let p = self.rows[r][c].clone();
        for j in 0..=w {
            if !self.rows[r][j].is_zero_tol() {
                self.rows[r][j] = self.rows[r][j].clone() / p.clone();
            } else {
                self.rows[r][j] = T::zero();
            }
        }
        self.rows[r][c] = T::one();
        let pivot_row = self.rows[r].clone();
        let nonzero: Vec<usize> = (0..=w).filter(|&j| !pivot_row[j].is_zero_tol()).collect();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero_tol() {
                row[c] = if i == r { T::one() } else { T::zero() };
                continue;
            }
            let factor = row[c].clone();
            for &j in &nonzero {
                row[j] = row[j].clone() - factor.clone() * pivot_row[j].clone();
            }
            row[c] = T::zero();
        }
        if !d[c].is_zero_tol() {
            let factor = d[c].clone();
            for &j in &nonzero {
                d[j] = d[j].clone() - factor.clone() * pivot_row[j].clone();
            }
        }
        d[c] = T::zero();
        self.basis[r] = c;
        self.pivots += 1;
    }

    /// Runs Bland's rule until optimal; `Ok(false)` means unbounded.
    fn optimize(&mut self, d: &mut [T], allowed: &[bool], max_pivots: usize) -> Result<bool, LpError> {
        let w = self.width();
        loop {
            let Some(c) = (0..w).find(|&j| allowed[j] && d[j].is_neg()) else {
                return Ok(true);
            };
            let mut best: Option<(usize, T)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if !row[c].is_pos() {
                    continue;
                }
                let ratio = row[w].clone() / row[c].clone();
                best = match best {
                    None => Some((i, ratio)),
                    Some((bi, br)) => {
                        let better = ratio < br
                            && !(br.clone() - ratio.clone()).is_zero_tol();
                        let tie = (br.clone() - ratio.clone()).is_zero_tol();
                        if better || (tie && self.basis[i] < self.basis[bi]) {
                            Some((i, ratio))
                        } else {
                            Some((bi, br))
                        }
                    }
                };
            }
            let Some((r, _)) = best else {
                return Ok(false);
            };
            if self.pivots >= max_pivots {
                return Err(LpError::PivotLimit(max_pivots));
            }
            self.pivot(r, c, d);
        }
    }

    fn run(mut self, objective: &[T], max_pivots: usize) -> Result<LpStatus<T>, LpError> {
        if !self.phase1(max_pivots)? {
            return Ok(LpStatus::Infeasible);
        }
        let mut d = self.phase2_costs(objective);
        let allowed = vec![true; self.width()];
        if !self.optimize(&mut d, &allowed, max_pivots)? {
            return Ok(LpStatus::Unbounded);
        }
        Ok(LpStatus::Optimal(self.solution(objective)))
    }
    /// Phase 1 followed by removal of the artificial columns. `Ok(false)`
    /// means infeasible.
    fn phase1(&mut self, max_pivots: usize) -> Result<bool, LpError> {
        let w = self.width();
        if !self.kinds.contains(&Column::Artificial) {
            return Ok(true);
        }
        let phase1: Vec<T> =
            self.kinds.iter().map(|k| if *k == Column::Artificial { T::one() } else { T::zero() }).collect();
        let mut d = self.reduced_costs(&phase1);
        let allowed = vec![true; w];
        self.optimize(&mut d, &allowed, max_pivots)?;
        if (-d[w].clone()).is_pos() {
            return Ok(false);
        }
        // Drive zero-level artificials out of the basis; drop rows that turn
        // out to be redundant.
        let mut i = 0;
        while i < self.rows.len() {
            if self.kinds[self.basis[i]] == Column::Artificial {
                let entering =
                    (0..w).find(|&j| self.kinds[j] != Column::Artificial && !self.rows[i][j].is_zero_tol());
                match entering {
                    Some(c) => self.pivot(i, c, &mut d),
                    None => {
                        self.rows.remove(i);
                        self.basis.remove(i);
                        continue;
                    }
                }
            }
            i += 1;
        }
        let keep: Vec<usize> = (0..=w).filter(|&j| j == w || self.kinds[j] != Column::Artificial).collect();
        let mut new_index = vec![usize::MAX; w];
        for (k, &j) in keep.iter().enumerate() {
            if j < w {
                new_index[j] = k;
            }
        }
        for row in self.rows.iter_mut() {
            *row = keep.iter().map(|&j| row[j].clone()).collect();
        }
        for b in self.basis.iter_mut() {
            *b = new_index[*b];
        }
        self.kinds.retain(|k| *k != Column::Artificial);
        Ok(true)
    }

    fn phase2_costs(&self, objective: &[T]) -> Vec<T> {
        let mut cost = vec![T::zero(); self.width()];
        cost[..self.num_structural].clone_from_slice(objective);
        self.reduced_costs(&cost)
    }

    fn solution(&self, objective: &[T]) -> LpSolution<T> {
        let w = self.width();
        let mut x = vec![T::zero(); self.num_structural];
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            if b < self.num_structural {
                x[b] = row[w].clone();
            }
        }
        let value = x.iter().zip(objective).fold(T::zero(), |acc, (xi, ci)| acc + xi.clone() * ci.clone());
        LpSolution { x, objective: value, pivots: self.pivots }
    }

    /// Appends `Σ a_j x_j >= rhs` to an optimal tableau as
    /// `-Σ a_j x_j + s = -rhs` with a fresh slack `s` basic in the new row.
    fn append_ge(&mut self, coeffs: &[(usize, T)], rhs: T, d: &mut Vec<T>) {
        let w = self.width();
        for row in self.rows.iter_mut() {
            row.insert(w, T::zero());
        }
        d.insert(w, T::zero());
        self.kinds.push(Column::Slack);
        let mut row = vec![T::zero(); w + 2];
        for (j, a) in coeffs {
            row[*j] = row[*j].clone() - a.clone();
        }
        row[w] = T::one();
        row[w + 1] = -rhs;
        for (i, &b) in self.basis.iter().enumerate() {
            let alpha = row[b].clone();
            if alpha.is_zero_tol() {
                row[b] = T::zero();
                continue;
            }
            for (j, v) in self.rows[i].iter().enumerate() {
                if !v.is_zero_tol() {
                    row[j] = row[j].clone() - alpha.clone() * v.clone();
                }
            }
            row[b] = T::zero();
        }
        self.rows.push(row);
        self.basis.push(w);
    }

    /// Dual simplex from a dual-feasible basis. The leaving row is the
    /// infeasible one with the smallest basic index and the entering column
    /// the smallest index among minimum ratios, which rules out cycling.
    /// `Ok(false)` means the primal is infeasible.
    fn dual_optimize(&mut self, d: &mut [T], max_pivots: usize) -> Result<bool, LpError> {
        let w = self.width();
        loop {
            let leaving = (0..self.rows.len()).filter(|&i| self.rows[i][w].is_neg()).min_by_key(|&i| self.basis[i]);
            let Some(r) = leaving else {
                return Ok(true);
            };
            let mut best: Option<(usize, T)> = None;
            for (j, (a, dj)) in self.rows[r][..w].iter().zip(d.iter()).enumerate() {
                if !a.is_neg() {
                    continue;
                }
                let ratio = dj.clone() / -a.clone();
                let take = match &best {
                    None => true,
                    Some((_, br)) => ratio < *br && !(br.clone() - ratio.clone()).is_zero_tol(),
                };
                if take {
                    best = Some((j, ratio));
                }
            }
            let Some((c, _)) = best else {
                return Ok(false);
            };
            if self.pivots >= max_pivots {
                return Err(LpError::PivotLimit(max_pivots));
            }
            self.pivot(r, c, d);
        }
    }
}

/// An optimal simplex state that accepts additional `>=` rows and
/// re-optimizes with the dual simplex method instead of starting over.
pub struct WarmStart<T> {
    tab: Tableau<T>,
    objective: Vec<T>,
    d: Vec<T>,
    max_pivots: usize,
    infeasible: bool,
}

impl<T: Scalar> LinearProgram<T> {
    /// Solves and, when optimal, keeps the final tableau for
    /// [`WarmStart::add_ge`].
    pub fn solve_warm(&self, max_pivots: usize) -> Result<(LpStatus<T>, Option<WarmStart<T>>), LpError> {
        self.check_indices()?;
        let mut tab = Tableau::build(self);
        if !tab.phase1(max_pivots)? {
            return Ok((LpStatus::Infeasible, None));
        }
        let mut d = tab.phase2_costs(&self.objective);
        let allowed = vec![true; tab.width()];
        if !tab.optimize(&mut d, &allowed, max_pivots)? {
            return Ok((LpStatus::Unbounded, None));
        }
        let sol = tab.solution(&self.objective);
        let warm = WarmStart { tab, objective: self.objective.clone(), d, max_pivots, infeasible: false };
        Ok((LpStatus::Optimal(sol), Some(warm)))
    }

    fn check_indices(&self) -> Result<(), LpError> {
        for c in &self.constraints {
            if let Some(&(index, _)) = c.coeffs.iter().find(|(i, _)| *i >= self.num_vars) {
                return Err(LpError::BadVariable { index, num_vars: self.num_vars });
            }
        }
        Ok(())
    }
}

impl<T: Scalar> WarmStart<T> {
    /// Adds `Σ a_j x_j >= rhs` and re-optimizes. Once infeasible, stays
    /// infeasible.
    pub fn add_ge(&mut self, coeffs: &[(usize, T)], rhs: T) -> Result<LpStatus<T>, LpError> {
        if let Some(&(index, _)) = coeffs.iter().find(|(i, _)| *i >= self.tab.num_structural) {
            return Err(LpError::BadVariable { index, num_vars: self.tab.num_structural });
        }
        if self.infeasible {
            return Ok(LpStatus::Infeasible);
        }
        self.tab.append_ge(coeffs, rhs, &mut self.d);
        if !self.tab.dual_optimize(&mut self.d, self.max_pivots)? {
            self.infeasible = true;
            return Ok(LpStatus::Infeasible);
        }
        Ok(LpStatus::Optimal(self.tab.solution(&self.objective)))
    }

    /// Total pivots so far, including the initial solve.
    pub fn pivots(&self) -> usize {
        self.tab.pivots
    }
}

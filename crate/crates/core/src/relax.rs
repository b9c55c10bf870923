//! Cutting-plane solver for the Lovász-extension relaxation.
//!
//! The relaxation minimizes `ĥ(x)` over cover variables `x ∈ [0,1]^Ω` and
//! coverage variables `y ∈ [0,1]^E` subject to
//!
//! ```text
//!   Σ_e p_e y_e >= qP
//!   Σ_{𝒜∈Ω_e} x_𝒜 >= y_e        for every element e
//! ```
//!
//! `ĥ` is replaced by an epigraph variable `z` and greedy-vector cuts
//! `w·x <= z`, each tangent to the extension at the LP point that produced
//! it. The loop stops once the extension at the LP point is within `tol` of
//! `z`. The same machinery with the set variables of `ρ0` itself handles the
//! unit-requirement program.

use log::debug;
use serde::Serialize;

use crate::covers::{CoverFamily, InducedCost};
use crate::instance::Problem;
use crate::lovasz::{greedy_subgradient, lovasz_eval, mask_to_indices, LovaszError, SetFunction};
use crate::lp::{LinearProgram, LpError, LpStatus, Sense, DEFAULT_PIVOT_LIMIT};
use crate::num::{Rational, Scalar};
use crate::oracle::SetCost;

pub const DEFAULT_TOL: f64 = 1e-7;
/// Guard for the exhaustive `g`-minimization and convex-closure oracles.
pub const MAX_ENUMERATED_COVERS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Arithmetic {
    /// Exact when the cost oracle is rational-valued.
    Auto,
    Exact,
    Float,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelaxConfig {
    pub tol: f64,
    pub arithmetic: Arithmetic,
    /// Defaults to `10 · 2^min(n, 12)` for `n` variables.
    pub max_cuts: Option<usize>,
}

impl Default for RelaxConfig {
    fn default() -> Self {
        RelaxConfig { tol: DEFAULT_TOL, arithmetic: Arithmetic::Auto, max_cuts: None }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum RelaxError {
    #[error("LP subroutine failed: {0}")]
    Lp(#[from] LpError),
    #[error("relaxation LP reported {0}; this cannot happen for a valid instance")]
    Internal(&'static str),
    #[error("cutting-plane loop exceeded {0} cuts")]
    CutLimit(usize),
    #[error("unit-requirement relaxation needs r_e = 1 for every element")]
    NotUnitRequirement,
    #[error("{n} covers exceed the enumeration limit {max}")]
    TooLarge { n: usize, max: usize },
    #[error(transparent)]
    Lovasz(#[from] LovaszError),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RelaxDiagnostics {
    pub cuts: usize,
    pub lp_solves: usize,
    pub pivots: usize,
    /// `ĥ(x*) - z` at termination.
    pub final_gap: f64,
    pub exact: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FractionalSolution {
    /// One entry per cover (or per set for the unit-requirement program).
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    /// `ĥ(x*)`: the relaxation objective at the returned point.
    pub value: f64,
    /// Epigraph value `z`; `lower_bound <= opt_cp <= value`.
    pub lower_bound: f64,
    #[serde(skip)]
    pub value_exact: Option<Rational>,
    #[serde(skip)]
    pub x_exact: Option<Vec<Rational>>,
    #[serde(skip)]
    pub y_exact: Option<Vec<Rational>>,
    /// Every generated cut vector, in generation order.
    #[serde(skip)]
    pub cuts: Vec<Vec<f64>>,
    pub diagnostics: RelaxDiagnostics,
}

struct Raw<T> {
    x: Vec<T>,
    y: Vec<T>,
    value: T,
    z: T,
    cuts: Vec<Vec<T>>,
    lp_solves: usize,
    pivots: usize,
}

fn cutting_plane<T: Scalar, F: SetFunction<T>>(
    f: &F,
    groups: &[Vec<usize>],
    profits: &[Rational],
    q: &Rational,
    total_profit: &Rational,
    config: &RelaxConfig,
) -> Result<Raw<T>, RelaxError> {
    let n = f.ground_size();
    let m = groups.len();
    let z_var = n + m;
    let tol = T::from_f64(config.tol);
    let max_cuts = config.max_cuts.unwrap_or(10 << n.min(12));

    let mut base = LinearProgram::<T>::new(n + m + 1);
    base.set_objective(z_var, T::one());
    base.add_constraint(
        (0..m).map(|e| (n + e, T::from_rational(&profits[e]))).collect(),
        Sense::Ge,
        T::from_rational(&(q * total_profit)),
    );
    for (e, group) in groups.iter().enumerate() {
        let mut row: Vec<(usize, T)> = group.iter().map(|&a| (a, T::one())).collect();
        row.push((n + e, -T::one()));
        base.add_constraint(row, Sense::Ge, T::zero());
    }
    for j in 0..n + m {
        base.add_constraint(vec![(j, T::one())], Sense::Le, T::one());
    }

    let cut_row = |w: &[T]| {
        let mut row: Vec<(usize, T)> = vec![(z_var, T::one())];
        row.extend(w.iter().enumerate().filter(|(_, c)| !c.is_zero_tol()).map(|(j, c)| (j, -c.clone())));
        row
    };

    let mut lp = base;
    let mut cuts: Vec<Vec<T>> = Vec::new();
    let start = vec![T::one(); n];
    let w0 = greedy_subgradient(f, &start)?;
    lp.add_constraint(cut_row(&w0), Sense::Ge, T::zero());
    cuts.push(w0);

    // Later cuts are appended to the optimal tableau and re-optimized with
    // the dual simplex method.
    let (mut status, mut warm) = lp.solve_warm(DEFAULT_PIVOT_LIMIT)?;
    let mut lp_solves = 0usize;
    loop {
        let sol = match status {
            LpStatus::Optimal(sol) => sol,
            LpStatus::Infeasible => return Err(RelaxError::Internal("infeasible")),
            LpStatus::Unbounded => return Err(RelaxError::Internal("unbounded")),
        };
        lp_solves += 1;
        let pivots = sol.pivots;
        let mut x: Vec<T> = sol.x[..n].to_vec();
        for v in x.iter_mut() {
            if *v < T::zero() {
                *v = T::zero();
            }
        }
        let y = sol.x[n..n + m].to_vec();
        let z = sol.x[z_var].clone();
        let value = lovasz_eval(f, &x)?;
        let gap = value.clone() - z.clone();
        if !gap.exceeds(&tol) {
            return Ok(Raw { x, y, value, z, cuts, lp_solves, pivots });
        }
        let w = greedy_subgradient(f, &x)?;
        let duplicate = cuts.iter().any(|c| {
            c.iter().zip(&w).all(|(a, b)| (a.clone() - b.clone()).is_zero_tol())
        });
        if duplicate {
            // Only reachable through float round-off: the cut is already in
            // the LP yet reported violated.
            debug!("duplicate cut with gap {:e}; stopping", gap.to_f64());
            return Ok(Raw { x, y, value, z, cuts, lp_solves, pivots });
        }
        if cuts.len() >= max_cuts {
            return Err(RelaxError::CutLimit(max_cuts));
        }
        let tableau = warm.as_mut().ok_or(RelaxError::Internal("missing tableau"))?;
        status = tableau.add_ge(&cut_row(&w), T::zero())?;
        cuts.push(w);
    }
}

fn finish<T: Scalar>(raw: Raw<T>) -> FractionalSolution {
    let exact = T::EXACT;
    let to_f = |v: &[T]| v.iter().map(Scalar::to_f64).collect::<Vec<f64>>();
    let final_gap = (raw.value.clone() - raw.z.clone()).to_f64();
    let diagnostics =
        RelaxDiagnostics { cuts: raw.cuts.len(), lp_solves: raw.lp_solves, pivots: raw.pivots, final_gap, exact };
    FractionalSolution {
        x: to_f(&raw.x),
        y: to_f(&raw.y),
        value: raw.value.to_f64(),
        lower_bound: raw.z.to_f64(),
        value_exact: None,
        x_exact: None,
        y_exact: None,
        cuts: raw.cuts.iter().map(|c| to_f(c)).collect(),
        diagnostics,
    }
}

fn finish_exact(raw: Raw<Rational>) -> FractionalSolution {
    let value_exact = raw.value.clone();
    let x_exact = raw.x.clone();
    let y_exact = raw.y.clone();
    let mut sol = finish(raw);
    sol.value_exact = Some(value_exact);
    sol.x_exact = Some(x_exact);
    sol.y_exact = Some(y_exact);
    sol
}

fn use_exact(problem: &Problem, config: &RelaxConfig) -> bool {
    match config.arithmetic {
        Arithmetic::Auto => problem.oracle().is_exact(),
        Arithmetic::Exact => true,
        Arithmetic::Float => false,
    }
}

fn solve_with<F>(problem: &Problem, f: &F, groups: &[Vec<usize>], config: &RelaxConfig) -> Result<FractionalSolution, RelaxError>
where
    F: SetFunction<Rational> + SetFunction<f64>,
{
    let (profits, q, total) = (problem.profits(), problem.q(), problem.total_profit());
    let sol = if use_exact(problem, config) {
        finish_exact(cutting_plane::<Rational, _>(f, groups, profits, q, total, config)?)
    } else {
        finish(cutting_plane::<f64, _>(f, groups, profits, q, total, config)?)
    };
    debug!(
        "relaxation value {} after {} cuts, {} LP solves",
        sol.value, sol.diagnostics.cuts, sol.diagnostics.lp_solves
    );
    Ok(sol)
}

/// Relaxation over the cover family, objective `ρ̂` of the induced cost.
pub fn solve_relaxation(
    problem: &Problem,
    family: &CoverFamily,
    config: &RelaxConfig,
) -> Result<FractionalSolution, RelaxError> {
    let ic = InducedCost::new(problem.oracle(), family);
    solve_with(problem, &ic, family.groups(), config)
}

/// Set variables of `ρ0` directly, for unit requirements. Only needs `ρ0`
/// submodular, not monotone.
pub fn solve_scpsc_relaxation(problem: &Problem, config: &RelaxConfig) -> Result<FractionalSolution, RelaxError> {
    if !problem.is_unit_requirement() {
        return Err(RelaxError::NotUnitRequirement);
    }
    let groups: Vec<Vec<usize>> =
        (0..problem.num_elements()).map(|e| mask_to_indices(problem.element_sets(e))).collect();
    solve_with(problem, &SetCost::new(problem.oracle()), &groups, config)
}

/// Exhaustive minimizer of `g(Ω') = ρ(Ω') - Σ_{𝒜∈Ω'} c_𝒜`. The first
/// minimizer in mask order is returned.
pub fn dual_separation_g_min<T: Scalar>(
    family: &CoverFamily,
    induced: &InducedCost<'_>,
    weights: &[T],
) -> Result<(Vec<usize>, T), RelaxError> {
    let n = family.len();
    if n > MAX_ENUMERATED_COVERS {
        return Err(RelaxError::TooLarge { n, max: MAX_ENUMERATED_COVERS });
    }
    let size = 1usize << n;
    let mut union = vec![0u64; size];
    let mut csum: Vec<T> = vec![T::zero(); size];
    let mut best = (0usize, T::zero());
    for m in 1..size {
        let low = m.trailing_zeros() as usize;
        let rest = m & (m - 1);
        union[m] = union[rest] | family.cover(low).mask;
        csum[m] = csum[rest].clone() + weights[low].clone();
        let g = induced.oracle().eval_as::<T>(union[m]) - csum[m].clone();
        if g < best.1 && !(best.1.clone() - g.clone()).is_zero_tol() {
            best = (m, g);
        }
    }
    Ok((mask_to_indices(best.0 as u64), best.1))
}

/// The relaxation restated over convex-closure multipliers `λ_{Ω'}`, one per
/// sub-family, solved as a single LP. Independent of the extension code;
/// used to cross-check [`solve_relaxation`] on tiny families.
pub fn convex_closure_value<T: Scalar>(problem: &Problem, family: &CoverFamily) -> Result<T, RelaxError> {
    let n = family.len();
    if n > 10 {
        return Err(RelaxError::TooLarge { n, max: 10 });
    }
    let m = problem.num_elements();
    let subsets = 1usize << n;
    // Variables: λ (subsets) | x (n) | y (m)
    let (x0, y0) = (subsets, subsets + n);
    let mut lp = LinearProgram::<T>::new(subsets + n + m);
    for s in 0..subsets {
        let union = family.union_mask(&mask_to_indices(s as u64)).expect("indices in range");
        lp.set_objective(s, problem.oracle().eval_as(union));
    }
    lp.add_constraint((0..subsets).map(|s| (s, T::one())).collect(), Sense::Eq, T::one());
    lp.add_constraint(
        (0..m).map(|e| (y0 + e, T::from_rational(problem.profit(e)))).collect(),
        Sense::Ge,
        T::from_rational(&(problem.q() * problem.total_profit())),
    );
    for a in 0..n {
        let mut row: Vec<(usize, T)> =
            (0..subsets).filter(|s| s & (1 << a) != 0).map(|s| (s, T::one())).collect();
        row.push((x0 + a, -T::one()));
        lp.add_constraint(row, Sense::Eq, T::zero());
    }
    for e in 0..m {
        let mut row: Vec<(usize, T)> = family.element_covers(e).iter().map(|&a| (x0 + a, T::one())).collect();
        row.push((y0 + e, -T::one()));
        lp.add_constraint(row, Sense::Ge, T::zero());
        lp.add_constraint(vec![(y0 + e, T::one())], Sense::Le, T::one());
    }
    match lp.solve()? {
        LpStatus::Optimal(sol) => Ok(sol.objective),
        LpStatus::Infeasible => Err(RelaxError::Internal("infeasible")),
        LpStatus::Unbounded => Err(RelaxError::Internal("unbounded")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::covers::enumerate_covers;

    fn example1(m: i64) -> Problem {
        Problem::from_json(&format!(
            r#"{{"elements":[{{"id":"e1","requirement":2,"profit":1}},{{"id":"e2","requirement":2,"profit":1}}],
                "sets":[{{"id":"S1","members":["e1"]}},{{"id":"S2","members":["e2"]}},{{"id":"S3","members":["e1","e2"]}}],
                "q":"1/2","cost":{{"kind":"linear","weights":{{"S1":1,"S2":1,"S3":{m}}}}}}}"#
        ))
        .unwrap()
    }

    /// Grid search over the two cover variables. With covers
    /// {S1,S3}, {S2,S3} the induced cost is `(1+M)` on either single cover
    /// and `2+M` on both, and y is eliminated by `y_e = x_e`.
    fn example1_grid(m: f64) -> f64 {
        let steps = 2000;
        let mut best = f64::INFINITY;
        for i in 0..=steps {
            for j in 0..=steps {
                let (a, b) = (i as f64 / steps as f64, j as f64 / steps as f64);
                if a + b < 1.0 - 1e-12 {
                    continue;
                }
                let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
                let v = (hi - lo) * (1.0 + m) + lo * (2.0 + m);
                best = best.min(v);
            }
        }
        best
    }

    #[test]
    fn example1_relaxation_matches_grid_oracle() {
        let oracle = example1_grid(1000.0);
        assert!((oracle - 501.0).abs() < 1e-9);
        let p = example1(1000);
        let fam = enumerate_covers(&p).unwrap();
        let sol = solve_relaxation(&p, &fam, &RelaxConfig::default()).unwrap();
        assert!((sol.value - oracle).abs() < 1e-6, "{}", sol.value);
        assert_eq!(sol.value_exact, Some(Rational::from_integer(501)));
        assert!(sol.diagnostics.exact);
        let float = solve_relaxation(&p, &fam, &RelaxConfig { arithmetic: Arithmetic::Float, ..Default::default() })
            .unwrap();
        assert!((float.value - 501.0).abs() < 1e-6);
    }

    #[test]
    fn zero_cost_set_gives_zero() {
        let p = Problem::from_json(
            r#"{"elements":[{"id":"a","requirement":1,"profit":1},{"id":"b","requirement":1,"profit":2}],
                "sets":[{"id":"A","members":["a","b"]},{"id":"B","members":["a"]}],
                "q":0.9,"cost":{"kind":"linear","weights":{"A":0,"B":5}}}"#,
        )
        .unwrap();
        let fam = enumerate_covers(&p).unwrap();
        let sol = solve_relaxation(&p, &fam, &RelaxConfig::default()).unwrap();
        assert_eq!(sol.value, 0.0);
    }

    #[test]
    fn separable_linear_closed_form() {
        // One element per set, unit profits, weights c_i: the relaxation is a
        // fractional knapsack filling qn units from the cheapest sets.
        let weights = [3i64, 1, 4, 1, 5];
        let elements: Vec<String> =
            (0..5).map(|i| format!(r#"{{"id":"e{i}","requirement":1,"profit":1}}"#)).collect();
        let sets: Vec<String> = (0..5).map(|i| format!(r#"{{"id":"S{i}","members":["e{i}"]}}"#)).collect();
        let w: Vec<String> = (0..5).map(|i| format!(r#""S{i}":{}"#, weights[i])).collect();
        for (q, expected) in [("1/10", 0.5), ("3/10", 1.5), ("1/2", 3.5), ("9/10", 11.5)] {
            let p = Problem::from_json(&format!(
                r#"{{"elements":[{}],"sets":[{}],"q":"{q}","cost":{{"kind":"linear","weights":{{{}}}}}}}"#,
                elements.join(","),
                sets.join(","),
                w.join(",")
            ))
            .unwrap();
            let fam = enumerate_covers(&p).unwrap();
            let sol = solve_relaxation(&p, &fam, &RelaxConfig::default()).unwrap();
            assert!((sol.value - expected).abs() < 1e-9, "q = {q}: {}", sol.value);
            let direct = solve_scpsc_relaxation(&p, &RelaxConfig::default()).unwrap();
            assert!((direct.value - expected).abs() < 1e-9);
        }
    }

    #[test]
    fn scpsc_requires_unit_requirements() {
        let p = example1(10);
        assert!(matches!(solve_scpsc_relaxation(&p, &RelaxConfig::default()), Err(RelaxError::NotUnitRequirement)));
    }

    #[test]
    fn g_minimization() {
        let p = example1(1000);
        let fam = enumerate_covers(&p).unwrap();
        let ic = InducedCost::new(p.oracle(), &fam);
        let (arg, val) = dual_separation_g_min(&fam, &ic, &[0.0, 0.0]).unwrap();
        assert!(arg.is_empty());
        assert_eq!(val, 0.0);
        let sol = solve_relaxation(&p, &fam, &RelaxConfig::default()).unwrap();
        let w = sol.cuts.last().unwrap();
        let (_, val) = dual_separation_g_min(&fam, &ic, w).unwrap();
        assert!(val >= -1e-9);
    }

    #[test]
    fn modular_g_is_flat() {
        // Disjoint singleton covers make the induced cost modular.
        let p = Problem::from_json(
            r#"{"elements":[{"id":"a","requirement":1,"profit":1},{"id":"b","requirement":1,"profit":1}],
                "sets":[{"id":"A","members":["a"]},{"id":"B","members":["b"]}],
                "q":0.5,"cost":{"kind":"linear","weights":{"A":2,"B":7}}}"#,
        )
        .unwrap();
        let fam = enumerate_covers(&p).unwrap();
        let ic = InducedCost::new(p.oracle(), &fam);
        let c = [Rational::from_integer(2), Rational::from_integer(7)];
        let (arg, val) = dual_separation_g_min(&fam, &ic, &c).unwrap();
        assert!(arg.is_empty());
        assert!(val.is_zero());
    }

    #[test]
    fn convex_closure_agrees_on_example1() {
        let p = example1(1000);
        let fam = enumerate_covers(&p).unwrap();
        let v: Rational = convex_closure_value(&p, &fam).unwrap();
        assert_eq!(v, Rational::from_integer(501));
    }
}

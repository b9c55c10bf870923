//! Brute-force reference values for small instances.

use rayon::prelude::*;
use serde::Serialize;

use crate::covers::{enumerate_covers, fully_covered, shortlex_cmp, CoverError};
use crate::instance::{CostSpec, Problem};
use crate::lp::{LinearProgram, LpError, LpStatus, Sense};
use crate::num::Rational;
use crate::oracle::CostValue;
use crate::relax::{solve_relaxation, RelaxConfig, RelaxError};

pub const MAX_EXACT_SETS: usize = 20;

#[derive(Debug, thiserror::Error)]
pub enum ExactError {
    #[error("{n} sets exceed the enumeration limit {max}")]
    TooLarge { n: usize, max: usize },
    #[error("no sub-collection reaches the profit target")]
    NoFeasible,
    #[error("the natural program needs a linear cost, found {0}")]
    NotLinear(&'static str),
    #[error("natural program: {0}")]
    Lp(#[from] LpError),
    #[error("natural program reported {0}")]
    Internal(&'static str),
    #[error(transparent)]
    Covers(#[from] CoverError),
    #[error(transparent)]
    Relax(#[from] RelaxError),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExactResult {
    pub optimum: CostValue,
    /// The first optimal sub-collection in size-then-lexicographic order.
    pub subcollection: Vec<String>,
    #[serde(skip)]
    pub mask: u64,
    pub feasible_count: u64,
    pub enumerated: u64,
}

/// Minimum `ρ0` over every sub-collection whose fully covered profit reaches
/// `qP`. Non-monotone costs are handled as is, since every superset is
/// visited anyway.
pub fn exact_solve(problem: &Problem) -> Result<ExactResult, ExactError> {
    let n = problem.num_sets();
    if n > MAX_EXACT_SETS {
        return Err(ExactError::TooLarge { n, max: MAX_EXACT_SETS });
    }
    let target = problem.q() * problem.total_profit();
    let oracle = problem.oracle();
    let better = |a: &(CostValue, u64), b: &(CostValue, u64)| a.0.compare(&b.0).then_with(|| shortlex_cmp(a.1, b.1));
    let (best, feasible) = (0u64..1 << n)
        .into_par_iter()
        .filter(|&m| fully_covered(problem, m).profit >= target)
        .map(|m| (Some((oracle.eval_uncached(m), m)), 1u64))
        .reduce(
            || (None, 0),
            |(a, ca), (b, cb)| {
                let best = match (a, b) {
                    (Some(a), Some(b)) => Some(if better(&b, &a).is_lt() { b } else { a }),
                    (a, b) => a.or(b),
                };
                (best, ca + cb)
            },
        );
    let (optimum, mask) = best.ok_or(ExactError::NoFeasible)?;
    Ok(ExactResult { optimum, subcollection: problem.ids_of(mask), mask, feasible_count: feasible, enumerated: 1 << n })
}

/// The natural program over set variables for linear costs: minimize `c·x`
/// subject to `Σ p_e y_e >= qP`, `Σ_{S∋e} x_S >= r_e y_e`, `x >= 0` and
/// `0 <= y <= 1`. Solved exactly.
pub fn natural_lp_value(problem: &Problem) -> Result<Rational, ExactError> {
    let CostSpec::Linear { weights } = &problem.instance().cost else {
        return Err(ExactError::NotLinear(problem.oracle().kind_name()));
    };
    let (n, m) = (problem.num_sets(), problem.num_elements());
    let mut lp = LinearProgram::<Rational>::new(n + m);
    for (id, w) in weights {
        let s = problem.set_position(id).expect("validated weight key");
        lp.set_objective(s, w.clone());
    }
    lp.add_constraint(
        (0..m).map(|e| (n + e, problem.profit(e).clone())).collect(),
        Sense::Ge,
        problem.q() * problem.total_profit(),
    );
    for e in 0..m {
        let mut row: Vec<(usize, Rational)> =
            crate::lovasz::mask_to_indices(problem.element_sets(e)).into_iter().map(|s| (s, Rational::one())).collect();
        row.push((n + e, -Rational::from_integer(problem.requirement(e) as i64)));
        lp.add_constraint(row, Sense::Ge, Rational::zero());
        lp.add_constraint(vec![(n + e, Rational::one())], Sense::Le, Rational::one());
    }
    match lp.solve()? {
        LpStatus::Optimal(sol) => Ok(sol.objective),
        LpStatus::Infeasible => Err(ExactError::Internal("infeasible")),
        LpStatus::Unbounded => Err(ExactError::Internal("unbounded")),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapReport {
    pub natural_lp: Rational,
    pub reformulated_relaxation: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reformulated_exact: Option<Rational>,
    pub exact: CostValue,
    /// `exact / natural_lp`; infinite when the natural value is 0.
    pub natural_gap: f64,
    /// `exact / reformulated_relaxation`.
    pub reformulated_gap: f64,
}

fn ratio(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        if num == 0.0 {
            1.0
        } else {
            f64::INFINITY
        }
    } else {
        num / den
    }
}

pub fn gap_report(problem: &Problem, config: &RelaxConfig) -> Result<GapReport, ExactError> {
    let natural_lp = natural_lp_value(problem)?;
    let family = enumerate_covers(problem)?;
    let relax = solve_relaxation(problem, &family, config)?;
    let exact = exact_solve(problem)?.optimum;
    let e = exact.to_f64();
    Ok(GapReport {
        natural_gap: ratio(e, natural_lp.to_f64()),
        reformulated_gap: ratio(e, relax.value),
        natural_lp,
        reformulated_relaxation: relax.value,
        reformulated_exact: relax.value_exact,
        exact,
    })
}

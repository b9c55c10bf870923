//! Unit-requirement pipeline for costs that are submodular but possibly not
//! monotone.
//!
//! The relaxation runs over the sets themselves. After phase 1 the selected
//! collection is replaced by its cheapest superset, the minimizer of the
//! monotone closure `γ(𝒮′) = min{ρ0(𝒮″) : 𝒮′ ⊆ 𝒮″}`. Phase 2 is unchanged.

use log::warn;
use rand::Rng;
use serde::Serialize;

use crate::covers::shortlex_cmp;
use crate::instance::Problem;
use crate::lovasz::{indices_to_mask, SetFunction};
use crate::num::{Scalar, FLOAT_TOL};
use crate::oracle::{CostOracle, CostValue};
use crate::relax::FractionalSolution;
use crate::rounding::{
    complete_run, deterministic_round, whp_core, CoverSystem, RoundedOutcome, RoundingError, RoundingParams,
    WhpConfig, WhpReport,
};

/// Largest number of sets outside the argument that `γ` will enumerate.
pub const MAX_FREE_SETS: u32 = 20;

#[derive(Debug, thiserror::Error)]
pub enum ScpscError {
    #[error("every element needs requirement 1")]
    NotUnitRequirement,
    #[error("closure would enumerate 2^{free} supersets (limit 2^{MAX_FREE_SETS})")]
    GuardExceeded { free: u32 },
    #[error(transparent)]
    Rounding(#[from] RoundingError),
}

/// The monotone closure `γ` of a cost oracle.
#[derive(Debug, Clone, Copy)]
pub struct GammaClosure<'a> {
    oracle: &'a CostOracle,
}

impl<'a> GammaClosure<'a> {
    pub fn new(oracle: &'a CostOracle) -> Self {
        GammaClosure { oracle }
    }

    /// `γ(sub)` and its minimizer. Ties go to the superset that is first in
    /// size-then-lexicographic order.
    pub fn eval(&self, sub: u64) -> Result<(CostValue, u64), ScpscError> {
        let n = self.oracle.num_sets();
        let all = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        let free = all & !sub;
        if free.count_ones() > MAX_FREE_SETS {
            return Err(ScpscError::GuardExceeded { free: free.count_ones() });
        }
        let mut best = (self.oracle.eval(sub), sub);
        // Walk every submask of `free`.
        let mut extra = free;
        while extra != 0 {
            let cand = sub | extra;
            let cost = self.oracle.eval(cand);
            let ord = cost.compare(&best.0).then_with(|| shortlex_cmp(cand, best.1));
            if ord.is_lt() {
                best = (cost, cand);
            }
            extra = (extra - 1) & free;
        }
        Ok(best)
    }
}

impl<T: Scalar> SetFunction<T> for GammaClosure<'_> {
    fn ground_size(&self) -> usize {
        self.oracle.num_sets()
    }

    fn eval(&self, subset: &[usize]) -> T {
        let (v, _) = GammaClosure::eval(self, indices_to_mask(subset)).expect("closure within enumeration guard");
        v.to_scalar()
    }
}

pub fn gamma_eval(gc: &GammaClosure<'_>, sub: u64) -> Result<(CostValue, u64), ScpscError> {
    gc.eval(sub)
}

/// A rounding run plus the closure bookkeeping.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScpscRun {
    pub outcome: RoundedOutcome,
    /// `ρ0((S1)_0) = γ(S1)`.
    pub closure_cost: CostValue,
    /// `b·s·opt_cp` with `b = f`.
    pub closure_bound: f64,
    pub closure_within_bound: bool,
}

struct Prepared {
    system: CoverSystem,
    phase1: crate::rounding::Phase1,
    closed: u64,
    closure_cost: CostValue,
    closure_bound: f64,
    within: bool,
}

fn prepare(problem: &Problem, frac: &FractionalSolution, params: &RoundingParams) -> Result<Prepared, ScpscError> {
    if !problem.is_unit_requirement() {
        return Err(ScpscError::NotUnitRequirement);
    }
    params.validate(problem.q())?;
    let system = CoverSystem::singletons(problem);
    if frac.x.len() != system.len() {
        return Err(RoundingError::Mismatch { got: frac.x.len(), expected: system.len() }.into());
    }
    let phase1 = deterministic_round(&system, frac, params.s);
    let (closure_cost, closed) = GammaClosure::new(problem.oracle()).eval(phase1.mask)?;
    let closure_bound = system.b as f64 * params.s * frac.value;
    let within = closure_cost.to_f64() <= closure_bound + FLOAT_TOL * closure_bound.abs().max(1.0);
    if !within {
        warn!("closure cost {closure_cost} exceeds b·s·opt_cp = {closure_bound}");
    }
    Ok(Prepared { system, phase1, closed, closure_cost, closure_bound, within })
}

/// One run. `frac` must come from the set-variable relaxation.
pub fn solve_scpsc<R: Rng + ?Sized>(
    problem: &Problem,
    frac: &FractionalSolution,
    params: &RoundingParams,
    rng: &mut R,
) -> Result<ScpscRun, ScpscError> {
    let p = prepare(problem, frac, params)?;
    let outcome = complete_run(problem, &p.system, frac, params, &p.phase1, p.closed, rng);
    Ok(ScpscRun {
        outcome,
        closure_cost: p.closure_cost,
        closure_bound: p.closure_bound,
        closure_within_bound: p.within,
    })
}

/// Repeated runs, selected the same way as the multi-cover pipeline.
pub fn solve_scpsc_whp(
    problem: &Problem,
    frac: &FractionalSolution,
    params: &RoundingParams,
    config: &WhpConfig,
) -> Result<(WhpReport, ScpscRun), ScpscError> {
    let p = prepare(problem, frac, params)?;
    let report = whp_core(problem, p.system.b, frac, params, config, |rng| {
        complete_run(problem, &p.system, frac, params, &p.phase1, p.closed, rng)
    })?;
    let run = ScpscRun {
        outcome: report.best.clone(),
        closure_cost: p.closure_cost,
        closure_bound: p.closure_bound,
        closure_within_bound: p.within,
    };
    Ok((report, run))
}

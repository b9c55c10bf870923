//! Two-phase rounding of a fractional solution.
//!
//! Phase 1 keeps every cover with `x*_𝒜 >= 1/(bs)` belonging to an element
//! with `y*_e >= 1/s`. If that already reaches the profit target the run
//! stops; otherwise phase 2 repeats `⌈b·s·ln(s/(s−t))⌉` times: draw `θ`
//! uniformly from `(0,1]` and keep every remaining cover with `x*_𝒜 >= θ`.
//!
//! # Randomness
//!
//! Repetition `k` of a run seeded with `seed` uses
//! `ChaCha8Rng::seed_from_u64(seed)` switched to stream `k`. Each phase-2
//! iteration consumes one `f64` draw `u` and uses `θ = 1 − u`. Results are
//! therefore bit-reproducible and independent of the thread count.

use log::{info, warn};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::covers::{fully_covered, CoverFamily};
use crate::instance::Problem;
use crate::lovasz::mask_to_indices;
use crate::num::{Rational, FLOAT_TOL};
use crate::oracle::CostValue;
use crate::relax::FractionalSolution;

#[derive(Debug, thiserror::Error)]
pub enum RoundingError {
    #[error("invalid rounding parameters: {0}")]
    BadParams(String),
    #[error("all {reps} repetitions produced an infeasible outcome")]
    AllInfeasible { reps: usize },
    #[error("fractional solution has {got} cover entries, expected {expected}")]
    Mismatch { got: usize, expected: usize },
    #[error("thread pool: {0}")]
    Threads(String),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoundingParams {
    pub s: f64,
    pub t: f64,
    pub epsilon: Rational,
    /// Phase-2 loop count; `None` means `⌈b·s·ln(s/(s−t))⌉`.
    pub iterations: Option<u32>,
    /// Stop and judge feasibility at `qP` instead of `(q−ε)P`.
    pub expectation_mode: bool,
    pub seed: u64,
}

impl RoundingParams {
    /// `s = 1/q`, `t = 1/√q`, `ε = 0.05·q`.
    pub fn defaults(q: &Rational) -> Self {
        let qf = q.to_f64();
        RoundingParams {
            s: 1.0 / qf,
            t: 1.0 / qf.sqrt(),
            epsilon: q * &Rational::new(1, 20),
            iterations: None,
            expectation_mode: false,
            seed: 0,
        }
    }

    /// Checks `1 < t < s <= 1/q` and `0 < ε < q`.
    pub fn validate(&self, q: &Rational) -> Result<(), RoundingError> {
        let qf = q.to_f64();
        let bad = |msg: String| Err(RoundingError::BadParams(msg));
        if !(self.s.is_finite() && self.t.is_finite()) {
            return bad("parameters must be finite".into());
        }
        if !(1.0 < self.t && self.t < self.s) {
            return bad(format!("need 1 < t < s, got t = {}, s = {}", self.t, self.s));
        }
        if self.s * qf > 1.0 + FLOAT_TOL {
            return bad(format!("need s <= 1/q = {}, got s = {}", 1.0 / qf, self.s));
        }
        if !(self.epsilon.is_positive() && self.epsilon < *q) {
            return bad(format!("need 0 < epsilon < q = {q}, got {}", self.epsilon));
        }
        if self.iterations == Some(0) {
            return bad("iterations must be positive".into());
        }
        Ok(())
    }

    pub fn log_term(&self) -> f64 {
        (self.s / (self.s - self.t)).ln()
    }

    pub fn iterations_for(&self, b: u64) -> u32 {
        self.iterations.unwrap_or_else(|| {
            let v = b as f64 * self.s * self.log_term();
            ((v - FLOAT_TOL).ceil() as u32).max(1)
        })
    }

    /// `l = (1−q)/((t−1)ε)`.
    pub fn markov_factor(&self, q: &Rational) -> f64 {
        (1.0 - q.to_f64()) / ((self.t - 1.0) * self.epsilon.to_f64())
    }

    pub fn bounds(&self, q: &Rational, b: u64, opt_cp: f64) -> CostBounds {
        let bs = b as f64 * self.s;
        let l = self.markov_factor(q);
        let lt = self.log_term();
        CostBounds {
            b,
            l,
            log_term: lt,
            opt_cp,
            phase1: bs * opt_cp,
            phase2_expected: bs * lt * opt_cp,
            phase2_markov: l * bs * lt * opt_cp,
            total: bs * (1.0 + l * lt) * opt_cp,
        }
    }

    /// Profit target of the early stop and of the feasibility flag.
    pub fn target(&self, q: &Rational, total_profit: &Rational) -> Rational {
        if self.expectation_mode {
            q * total_profit
        } else {
            &(q - &self.epsilon) * total_profit
        }
    }
}

/// Cost guarantees implied by a parameter choice and `opt_cp`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CostBounds {
    pub b: u64,
    pub l: f64,
    pub log_term: f64,
    pub opt_cp: f64,
    /// `b·s·opt_cp`, bound on `ρ0(S1)`.
    pub phase1: f64,
    /// `b·s·ln(s/(s−t))·opt_cp`, bound on `E[ρ0(S2)]`.
    pub phase2_expected: f64,
    /// `l` times the expected bound; exceeding it is the Markov failure event.
    pub phase2_markov: f64,
    /// `b·s·(1 + l·ln(s/(s−t)))·opt_cp`.
    pub total: f64,
}

/// Covers as set masks plus per-element cover lists. Built from an
/// `r_e`-cover family or, for unit requirements, from the sets themselves.
#[derive(Debug, Clone)]
pub struct CoverSystem {
    pub masks: Vec<u64>,
    pub groups: Vec<Vec<usize>>,
    /// Upper bound on the size of any group.
    pub b: u64,
}

impl CoverSystem {
    pub fn from_family(problem: &Problem, family: &CoverFamily) -> Self {
        CoverSystem {
            masks: family.covers().iter().map(|c| c.mask).collect(),
            groups: family.groups().to_vec(),
            b: problem.frequency_stats().b,
        }
    }

    /// One singleton cover per set, so `b = f`.
    pub fn singletons(problem: &Problem) -> Self {
        CoverSystem {
            masks: (0..problem.num_sets()).map(|i| 1u64 << i).collect(),
            groups: (0..problem.num_elements()).map(|e| mask_to_indices(problem.element_sets(e))).collect(),
            b: problem.frequency_stats().f as u64,
        }
    }

    pub fn len(&self) -> usize {
        self.masks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masks.is_empty()
    }

    fn union(&self, covers: &[usize]) -> u64 {
        covers.iter().fold(0, |acc, &i| acc | self.masks[i])
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Phase1 {
    /// Selected cover indices, ascending.
    pub covers: Vec<usize>,
    pub mask: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Phase2 {
    /// Cover indices selected in at least one iteration, ascending.
    pub covers: Vec<usize>,
    pub mask: u64,
    /// `ŷ_e`: some cover of `e` was selected.
    pub yhat: Vec<bool>,
    pub thetas: Vec<f64>,
}

/// Phase 1. Comparisons allow `1e-9` slack so exact thresholds survive
/// float round-off.
pub fn deterministic_round(system: &CoverSystem, frac: &FractionalSolution, s: f64) -> Phase1 {
    let y_cut = 1.0 / s - FLOAT_TOL;
    let x_cut = 1.0 / (system.b as f64 * s) - FLOAT_TOL;
    let mut chosen = vec![false; system.len()];
    for (e, group) in system.groups.iter().enumerate() {
        if frac.y[e] >= y_cut {
            for &a in group {
                if frac.x[a] >= x_cut {
                    chosen[a] = true;
                }
            }
        }
    }
    let covers: Vec<usize> = (0..system.len()).filter(|&a| chosen[a]).collect();
    let mask = system.union(&covers);
    Phase1 { covers, mask }
}

/// Phase 2 over the `remaining` cover indices.
pub fn randomized_round<R: Rng + ?Sized>(
    system: &CoverSystem,
    frac: &FractionalSolution,
    remaining: &[usize],
    iterations: u32,
    rng: &mut R,
) -> Phase2 {
    let mut chosen = vec![false; system.len()];
    let mut thetas = Vec::with_capacity(iterations as usize);
    for _ in 0..iterations {
        let theta = 1.0 - rng.random::<f64>();
        thetas.push(theta);
        for &a in remaining {
            if frac.x[a] >= theta {
                chosen[a] = true;
            }
        }
    }
    let covers: Vec<usize> = (0..system.len()).filter(|&a| chosen[a]).collect();
    let yhat = system.groups.iter().map(|g| g.iter().any(|&a| chosen[a])).collect();
    Phase2 { mask: system.union(&covers), covers, yhat, thetas }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoundedOutcome {
    /// Phase-1 sets before any closure step. Equal to `s1` except in the
    /// unit-requirement pipeline with non-monotone costs.
    pub phase1_sets: Vec<String>,
    pub s1: Vec<String>,
    pub s2: Vec<String>,
    pub s_prime: Vec<String>,
    #[serde(skip)]
    pub s1_mask: u64,
    #[serde(skip)]
    pub s2_mask: u64,
    #[serde(skip)]
    pub s_prime_mask: u64,
    pub phase1_covers: Vec<usize>,
    pub phase2_covers: Vec<usize>,
    pub covered_profit: Rational,
    pub covered_profit_s1: Rational,
    /// `Σ p_e ŷ_e` over elements not covered by `S1`.
    pub credited_profit: Rational,
    pub cost: CostValue,
    pub cost_s1: CostValue,
    pub cost_s2: CostValue,
    pub q_prime: Rational,
    pub phase2_ran: bool,
    pub iterations: u32,
    pub yhat: Vec<bool>,
    pub thetas: Vec<f64>,
    pub feasible: bool,
}

/// Phase 2 and the bookkeeping after the early-stop check, given the
/// (possibly closed) phase-1 collection `s1`. Remaining covers are those not
/// selected in phase 1.
pub(crate) fn complete_run<R: Rng + ?Sized>(
    problem: &Problem,
    system: &CoverSystem,
    frac: &FractionalSolution,
    params: &RoundingParams,
    phase1: &Phase1,
    s1: u64,
    rng: &mut R,
) -> RoundedOutcome {
    let total = problem.total_profit();
    let target = params.target(problem.q(), total);
    let cov1 = fully_covered(problem, s1);
    let q_prime = &(&(problem.q() * total) - &cov1.profit) / total;
    let iterations = params.iterations_for(system.b);
    let oracle = problem.oracle();

    let (phase2, ran) = if cov1.profit >= target {
        let empty = Phase2 { covers: vec![], mask: 0, yhat: vec![false; problem.num_elements()], thetas: vec![] };
        (empty, false)
    } else {
        let remaining: Vec<usize> = {
            let mut picked = vec![false; system.len()];
            phase1.covers.iter().for_each(|&a| picked[a] = true);
            (0..system.len()).filter(|&a| !picked[a]).collect()
        };
        (randomized_round(system, frac, &remaining, iterations, rng), true)
    };

    let in_s1: Vec<bool> = {
        let mut v = vec![false; problem.num_elements()];
        cov1.elements.iter().for_each(|&e| v[e] = true);
        v
    };
    let credited_profit: Rational = (0..problem.num_elements())
        .filter(|&e| !in_s1[e] && phase2.yhat[e])
        .map(|e| problem.profit(e))
        .sum();
    let s_prime = s1 | phase2.mask;
    let covered = fully_covered(problem, s_prime).profit;
    RoundedOutcome {
        phase1_sets: problem.ids_of(phase1.mask),
        s1: problem.ids_of(s1),
        s2: problem.ids_of(phase2.mask),
        s_prime: problem.ids_of(s_prime),
        s1_mask: s1,
        s2_mask: phase2.mask,
        s_prime_mask: s_prime,
        phase1_covers: phase1.covers.clone(),
        phase2_covers: phase2.covers,
        feasible: covered >= target,
        covered_profit: covered,
        covered_profit_s1: cov1.profit,
        credited_profit,
        cost: oracle.eval(s_prime),
        cost_s1: oracle.eval(s1),
        cost_s2: oracle.eval(phase2.mask),
        q_prime,
        phase2_ran: ran,
        iterations,
        yhat: phase2.yhat,
        thetas: phase2.thetas,
    }
}

fn check_dims(system: &CoverSystem, frac: &FractionalSolution) -> Result<(), RoundingError> {
    if frac.x.len() != system.len() {
        return Err(RoundingError::Mismatch { got: frac.x.len(), expected: system.len() });
    }
    Ok(())
}

/// One full run of the two-phase rounding.
pub fn run_algorithm1<R: Rng + ?Sized>(
    problem: &Problem,
    family: &CoverFamily,
    frac: &FractionalSolution,
    params: &RoundingParams,
    rng: &mut R,
) -> Result<RoundedOutcome, RoundingError> {
    params.validate(problem.q())?;
    let system = CoverSystem::from_family(problem, family);
    check_dims(&system, frac)?;
    let phase1 = deterministic_round(&system, frac, params.s);
    Ok(complete_run(problem, &system, frac, params, &phase1, phase1.mask, rng))
}

/// The generator for repetition `rep`.
pub fn rep_rng(seed: u64, rep: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(rep);
    rng
}

/// `⌈4·ln(max(n, 2))⌉` for `n` elements.
pub fn default_reps(num_elements: usize) -> usize {
    (4.0 * (num_elements.max(2) as f64).ln()).ceil() as usize
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WhpConfig {
    pub reps: Option<usize>,
    pub threads: usize,
}

impl Default for WhpConfig {
    fn default() -> Self {
        WhpConfig { reps: None, threads: 1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RepRecord {
    pub rep: usize,
    pub cost: f64,
    pub feasible: bool,
    /// `ρ0(S2)` within the Markov bound.
    pub cost_event: bool,
    /// Credited phase-2 profit reaches `q′P`, or phase 2 never ran.
    pub profit_event: bool,
    /// Total cost within `b·s·(1 + l·ln(s/(s−t)))·opt_cp`.
    pub within_total_bound: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WhpReport {
    pub best: RoundedOutcome,
    pub best_rep: usize,
    pub reps: Vec<RepRecord>,
    pub bounds: CostBounds,
    /// Set when no feasible repetition met the cost event.
    pub warning: Option<String>,
    #[serde(skip)]
    pub outcomes: Vec<RoundedOutcome>,
}

fn within(value: f64, bound: f64) -> bool {
    value <= bound + FLOAT_TOL * bound.abs().max(1.0)
}

pub(crate) fn whp_core<F>(
    problem: &Problem,
    b: u64,
    frac: &FractionalSolution,
    params: &RoundingParams,
    config: &WhpConfig,
    one_rep: F,
) -> Result<WhpReport, RoundingError>
where
    F: Fn(&mut ChaCha8Rng) -> RoundedOutcome + Sync,
{
    let reps = config.reps.unwrap_or_else(|| default_reps(problem.num_elements())).max(1);
    let run = |rep: usize| one_rep(&mut rep_rng(params.seed, rep as u64));
    let outcomes: Vec<RoundedOutcome> = if config.threads <= 1 {
        (0..reps).map(run).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.threads)
            .build()
            .map_err(|e| RoundingError::Threads(e.to_string()))?;
        pool.install(|| (0..reps).into_par_iter().map(run).collect())
    };

    let bounds = params.bounds(problem.q(), b, frac.value);
    let total = problem.total_profit();
    let records: Vec<RepRecord> = outcomes
        .iter()
        .enumerate()
        .map(|(rep, o)| RepRecord {
            rep,
            cost: o.cost.to_f64(),
            feasible: o.feasible,
            cost_event: within(o.cost_s2.to_f64(), bounds.phase2_markov),
            profit_event: !o.phase2_ran || o.credited_profit >= &o.q_prime * total,
            within_total_bound: within(o.cost.to_f64(), bounds.total),
        })
        .collect();

    let cheapest = |pred: &dyn Fn(&RepRecord) -> bool| {
        records
            .iter()
            .filter(|r| pred(r))
            .min_by(|a, b| outcomes[a.rep].cost.compare(&outcomes[b.rep].cost).then(a.rep.cmp(&b.rep)))
            .map(|r| r.rep)
    };
    let (best_rep, warning) = match cheapest(&|r| r.feasible && r.cost_event) {
        Some(rep) => (rep, None),
        None => match cheapest(&|r| r.feasible) {
            Some(rep) => {
                let msg = "no feasible repetition met the phase-2 cost bound; returning the cheapest feasible one";
                warn!("{msg}");
                (rep, Some(msg.to_string()))
            }
            None => return Err(RoundingError::AllInfeasible { reps }),
        },
    };
    info!("best repetition {best_rep} of {reps}, cost {}", outcomes[best_rep].cost);
    Ok(WhpReport { best: outcomes[best_rep].clone(), best_rep, reps: records, bounds, warning, outcomes })
}

/// Repeats [`run_algorithm1`] with independent streams and keeps the cheapest
/// feasible outcome whose phase-2 cost meets the Markov bound.
pub fn solve_whp(
    problem: &Problem,
    family: &CoverFamily,
    frac: &FractionalSolution,
    params: &RoundingParams,
    config: &WhpConfig,
) -> Result<WhpReport, RoundingError> {
    params.validate(problem.q())?;
    let system = CoverSystem::from_family(problem, family);
    check_dims(&system, frac)?;
    let phase1 = deterministic_round(&system, frac, params.s);
    whp_core(problem, system.b, frac, params, config, |rng| {
        complete_run(problem, &system, frac, params, &phase1, phase1.mask, rng)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::covers::enumerate_covers;
    use crate::relax::{solve_relaxation, RelaxConfig, RelaxDiagnostics};

    fn example1() -> Problem {
        Problem::from_json(
            r#"{"elements":[{"id":"e1","requirement":2,"profit":1},{"id":"e2","requirement":2,"profit":1}],
                "sets":[{"id":"S1","members":["e1"]},{"id":"S2","members":["e2"]},{"id":"S3","members":["e1","e2"]}],
                "q":"1/2","cost":{"kind":"linear","weights":{"S1":1,"S2":1,"S3":1000}}}"#,
        )
        .unwrap()
    }

    fn frac(x: Vec<f64>, y: Vec<f64>) -> FractionalSolution {
        FractionalSolution {
            x,
            y,
            value: 0.0,
            lower_bound: 0.0,
            value_exact: None,
            x_exact: None,
            y_exact: None,
            cuts: vec![],
            diagnostics: RelaxDiagnostics { cuts: 0, lp_solves: 0, pivots: 0, final_gap: 0.0, exact: false },
        }
    }

    #[test]
    fn param_validation() {
        let q = Rational::new(1, 4);
        let d = RoundingParams::defaults(&q);
        assert!((d.s - 4.0).abs() < 1e-12 && (d.t - 2.0).abs() < 1e-12);
        d.validate(&q).unwrap();
        for bad in [
            RoundingParams { t: 1.0, ..d.clone() },
            RoundingParams { t: 4.0, ..d.clone() },
            RoundingParams { s: 4.5, ..d.clone() },
            RoundingParams { epsilon: Rational::new(1, 4), ..d.clone() },
            RoundingParams { epsilon: Rational::zero(), ..d.clone() },
            RoundingParams { iterations: Some(0), ..d.clone() },
        ] {
            assert!(bad.validate(&q).is_err(), "{bad:?}");
        }
    }

    #[test]
    fn iteration_count_is_ceiling() {
        let p = RoundingParams { s: 4.0, t: 2.0, epsilon: Rational::new(1, 100), iterations: None, expectation_mode: false, seed: 0 };
        // b·s·ln 2 = 3·4·0.693.. = 8.31..
        assert_eq!(p.iterations_for(3), 9);
        assert_eq!(p.iterations_for(1), 3);
        assert_eq!(RoundingParams { iterations: Some(5), ..p }.iterations_for(3), 5);
    }

    #[test]
    fn example1_phase1_takes_everything() {
        let p = example1();
        let fam = enumerate_covers(&p).unwrap();
        let sol = solve_relaxation(&p, &fam, &RelaxConfig::default()).unwrap();
        let sys = CoverSystem::from_family(&p, &fam);
        assert_eq!(sys.b, 1);
        let ph = deterministic_round(&sys, &sol, 2.0);
        assert_eq!(ph.covers, vec![0, 1]);
        assert_eq!(ph.mask, 0b111);
        assert_eq!(p.oracle().eval_f64(ph.mask), 1002.0);
        assert!(1002.0 <= 2.0 * sol.value + 1e-9);
    }

    #[test]
    fn phase1_empty_when_y_small() {
        let p = example1();
        let fam = enumerate_covers(&p).unwrap();
        let sys = CoverSystem::from_family(&p, &fam);
        let ph = deterministic_round(&sys, &frac(vec![1.0, 1.0], vec![0.4, 0.4]), 2.0);
        assert!(ph.covers.is_empty());
        assert_eq!(ph.mask, 0);
    }

    #[test]
    fn phase2_extremes() {
        let p = example1();
        let fam = enumerate_covers(&p).unwrap();
        let sys = CoverSystem::from_family(&p, &fam);
        let mut rng = rep_rng(3, 0);
        let none = randomized_round(&sys, &frac(vec![0.0, 0.0], vec![0.0, 0.0]), &[0, 1], 50, &mut rng);
        assert_eq!(none.mask, 0);
        assert!(none.thetas.iter().all(|&t| t > 0.0 && t <= 1.0));
        let one = randomized_round(&sys, &frac(vec![1.0, 0.0], vec![0.0, 0.0]), &[0, 1], 5, &mut rng);
        assert_eq!(one.covers, vec![0]);
        assert_eq!(one.yhat, vec![true, false]);
    }

    #[test]
    fn early_stop_when_phase1_suffices() {
        let p = example1();
        let fam = enumerate_covers(&p).unwrap();
        let sol = solve_relaxation(&p, &fam, &RelaxConfig::default()).unwrap();
        let params = RoundingParams { t: 1.2, ..RoundingParams::defaults(p.q()) };
        let out = run_algorithm1(&p, &fam, &sol, &params, &mut rep_rng(0, 0)).unwrap();
        assert!(!out.phase2_ran);
        assert!(out.s2.is_empty() && out.thetas.is_empty());
        assert!(out.feasible);
        assert_eq!(out.s_prime, vec!["S1", "S2", "S3"]);
        assert!(out.q_prime <= *p.q());
    }

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: Vec<f64> = (0..4).map(|_| rep_rng(9, 1).random::<f64>()).collect();
        assert!(a.windows(2).all(|w| w[0] == w[1]));
        assert_ne!(rep_rng(9, 1).random::<f64>(), rep_rng(9, 2).random::<f64>());
    }

    #[test]
    fn single_set_instance() {
        let p = Problem::from_json(
            r#"{"elements":[{"id":"e","requirement":1,"profit":1}],"sets":[{"id":"S","members":["e"]}],
                "q":0.5,"cost":{"kind":"linear","weights":{"S":3}}}"#,
        )
        .unwrap();
        let fam = enumerate_covers(&p).unwrap();
        let sol = solve_relaxation(&p, &fam, &RelaxConfig::default()).unwrap();
        let rep = solve_whp(&p, &fam, &sol, &RoundingParams::defaults(p.q()), &WhpConfig::default()).unwrap();
        assert_eq!(rep.best.s_prime, vec!["S"]);
        assert_eq!(rep.reps.len(), default_reps(1));
    }

    #[test]
    fn thread_count_does_not_change_results() {
        let p = example1();
        let fam = enumerate_covers(&p).unwrap();
        let sol = solve_relaxation(&p, &fam, &RelaxConfig::default()).unwrap();
        let params = RoundingParams { t: 1.2, seed: 5, ..RoundingParams::defaults(p.q()) };
        let one = solve_whp(&p, &fam, &sol, &params, &WhpConfig { reps: Some(6), threads: 1 }).unwrap();
        let four = solve_whp(&p, &fam, &sol, &params, &WhpConfig { reps: Some(6), threads: 4 }).unwrap();
        assert_eq!(one, four);
    }
}

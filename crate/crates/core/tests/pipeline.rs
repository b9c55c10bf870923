mod common;

use common::*;
use pmcover::covers::{enumerate_covers, fully_covered};
use pmcover::exact::exact_solve;
use pmcover::relax::{solve_relaxation, solve_scpsc_relaxation, RelaxConfig};
use pmcover::rounding::{rep_rng, run_algorithm1, solve_whp, RoundingParams, WhpConfig};
use pmcover::scpsc::{solve_scpsc, solve_scpsc_whp, GammaClosure};
use pmcover::{CostValue, Rational};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn closure_pipeline_on_nonmonotone_fixture() {
    let p = load_fixture("remark2_unit.json");
    let gc = GammaClosure::new(p.oracle());
    // {S1} costs 1 on its own but 0 once S2 joins.
    let (value, argmin) = gc.eval(0b001).unwrap();
    assert_eq!(value, CostValue::Exact(Rational::from_integer(0)));
    assert_eq!(argmin, 0b011);

    let frac = solve_scpsc_relaxation(&p, &RelaxConfig::default()).unwrap();
    let params = RoundingParams::defaults(p.q());
    let (report, run) = solve_scpsc_whp(&p, &frac, &params, &WhpConfig::default()).unwrap();
    assert!(report.best.feasible);
    assert_eq!(report.best.cost.to_f64(), 0.0);
    assert!(run.closure_within_bound);
    let target = params.target(p.q(), p.total_profit());
    assert!(fully_covered(&p, report.best.s_prime_mask).profit >= target);
}

#[test]
fn closure_matches_plain_runs_on_monotone_costs() {
    // On a monotone cost the closure is the identity, so both pipelines
    // draw the same randomness and pick the same sets.
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let cfg = GenConfig { r_max: 1, max_covers: 64, ..Default::default() };
    for k in 0..8 {
        let p = random_instance(&mut rng, &cfg);
        let fam = enumerate_covers(&p).unwrap();
        let frac = solve_relaxation(&p, &fam, &RelaxConfig::default()).unwrap();
        let params = RoundingParams { seed: k, ..RoundingParams::defaults(p.q()) };
        let plain = run_algorithm1(&p, &fam, &frac, &params, &mut rep_rng(k, 0)).unwrap();
        let closed = solve_scpsc(&p, &frac, &params, &mut rep_rng(k, 0)).unwrap();
        assert_eq!(plain.cost, closed.outcome.cost, "instance {k}");
    }
}

#[test]
fn whp_rounding_is_feasible_and_bounded_on_fixtures() {
    for name in ["example1.json", "example2.json"] {
        let p = load_fixture(name);
        let fam = enumerate_covers(&p).unwrap();
        let frac = solve_relaxation(&p, &fam, &RelaxConfig::default()).unwrap();
        let params = RoundingParams::defaults(p.q());
        let report = solve_whp(&p, &fam, &frac, &params, &WhpConfig { reps: Some(12), threads: 1 }).unwrap();
        assert!(report.best.feasible, "{name}");
        assert!(report.best.cost.to_f64() <= report.bounds.total + 1e-9, "{name}");
        assert!(report.best.cost.to_f64() + 1e-9 >= exact_solve(&p).unwrap().optimum.to_f64(), "{name}");
        assert_eq!(report.reps.len(), 12);
    }
}

#[test]
fn threads_do_not_change_the_choice() {
    let p = load_fixture("example2.json");
    let fam = enumerate_covers(&p).unwrap();
    let frac = solve_relaxation(&p, &fam, &RelaxConfig::default()).unwrap();
    let params = RoundingParams { seed: 5, ..RoundingParams::defaults(p.q()) };
    let one = solve_whp(&p, &fam, &frac, &params, &WhpConfig { reps: Some(9), threads: 1 }).unwrap();
    let four = solve_whp(&p, &fam, &frac, &params, &WhpConfig { reps: Some(9), threads: 4 }).unwrap();
    assert_eq!(one.best_rep, four.best_rep);
    assert_eq!(one.reps, four.reps);
}

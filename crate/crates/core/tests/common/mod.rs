//! Random instances and set functions shared by the integration tests.
#![allow(dead_code)]

use std::path::PathBuf;

use pmcover::covers::enumerate_covers;
use pmcover::lovasz::TableFunction;
use pmcover::{Instance, Problem, Rational};
use rand::seq::IndexedRandom;
use rand::Rng;
use serde_json::{json, Value};

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn load_fixture(name: &str) -> Problem {
    let text = std::fs::read_to_string(fixture(name)).unwrap();
    Problem::from_json(&text).unwrap()
}

fn subset_ids(mask: u64, n: usize) -> Vec<String> {
    (0..n).filter(|i| mask >> i & 1 == 1).map(|i| format!("S{i}")).collect()
}

/// Weighted coverage plus a budget-additive term: monotone, submodular,
/// integer valued, zero on the empty set.
pub fn monotone_table<R: Rng>(rng: &mut R, n: usize) -> Vec<i64> {
    let items = rng.random_range(3..=7);
    let item_w: Vec<i64> = (0..items).map(|_| rng.random_range(1..=4)).collect();
    let covers: Vec<u64> = (0..n).map(|_| rng.random_range(0..1u64 << items)).collect();
    let set_w: Vec<i64> = (0..n).map(|_| rng.random_range(0..=3)).collect();
    let budget = rng.random_range(1..=6);
    (0..1u64 << n)
        .map(|m| {
            let union = (0..n).filter(|i| m >> i & 1 == 1).fold(0u64, |u, i| u | covers[i]);
            let cov: i64 = (0..items).filter(|j| union >> j & 1 == 1).map(|j| item_w[j]).sum();
            let lin: i64 = (0..n).filter(|i| m >> i & 1 == 1).map(|i| set_w[i]).sum();
            cov + lin.min(budget)
        })
        .collect()
}

/// Undirected weighted cut plus a monotone part: nonnegative, submodular,
/// usually not monotone.
pub fn cut_table<R: Rng>(rng: &mut R, n: usize) -> Vec<i64> {
    let mut edges = vec![];
    for u in 0..n {
        for v in u + 1..n {
            if rng.random_bool(0.5) {
                edges.push((u, v, rng.random_range(1..=5i64)));
            }
        }
    }
    let mono = if rng.random_bool(0.5) { monotone_table(rng, n) } else { vec![0; 1 << n] };
    (0..1u64 << n)
        .map(|m| {
            let cut: i64 = edges.iter().filter(|(u, v, _)| (m >> u & 1) != (m >> v & 1)).map(|e| e.2).sum();
            cut + mono[m as usize]
        })
        .collect()
}

pub fn rational_table(values: &[i64]) -> TableFunction<Rational> {
    let n = values.len().trailing_zeros() as usize;
    TableFunction::new(n, values.iter().map(|&v| Rational::from_integer(v)).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CostMix {
    Linear,
    Concave,
    Table,
    /// One of the three, uniformly.
    Mixed,
}

#[derive(Debug, Clone)]
pub struct GenConfig {
    pub sets: (usize, usize),
    pub elements: (usize, usize),
    pub r_max: u32,
    pub max_covers: usize,
    pub cost: CostMix,
    /// Candidate values of `q`.
    pub qs: Vec<&'static str>,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            sets: (3, 8),
            elements: (2, 10),
            r_max: 3,
            max_covers: 16,
            cost: CostMix::Mixed,
            qs: vec!["1/4", "1/3", "1/2", "3/5", "2/3", "3/4"],
        }
    }
}

pub fn cost_json<R: Rng>(rng: &mut R, n: usize, mix: CostMix) -> Value {
    let mix = match mix {
        CostMix::Mixed => *[CostMix::Linear, CostMix::Concave, CostMix::Table].choose(rng).unwrap(),
        m => m,
    };
    match mix {
        CostMix::Linear => {
            let w: serde_json::Map<String, Value> =
                (0..n).map(|i| (format!("S{i}"), json!(rng.random_range(0..=9)))).collect();
            json!({"kind": "linear", "weights": w})
        }
        CostMix::Concave => {
            let exponent = [0.5, 0.75, 1.0][rng.random_range(0..3)];
            json!({"kind": "concave-cardinality", "scale": rng.random_range(1..=5), "exponent": exponent})
        }
        _ => {
            let table = monotone_table(rng, n);
            let entries: Vec<Value> = (0..1u64 << n)
                .map(|m| json!({"subset": subset_ids(m, n), "value": table[m as usize]}))
                .collect();
            json!({"kind": "explicit-table", "monotone": true, "entries": entries})
        }
    }
}

/// Random valid instance. Every element lies in at least one set and
/// `r_e <= min(r_max, frequency)`. Resamples until `|Ω| <= max_covers`.
pub fn random_instance<R: Rng>(rng: &mut R, cfg: &GenConfig) -> Problem {
    loop {
        let n = rng.random_range(cfg.sets.0..=cfg.sets.1);
        let m = rng.random_range(cfg.elements.0..=cfg.elements.1);
        let mut members: Vec<Vec<String>> = vec![vec![]; n];
        let mut elements = vec![];
        for e in 0..m {
            let mut mask = 0u64;
            while mask == 0 {
                mask = (0..n).filter(|_| rng.random_bool(0.4)).fold(0, |a, i| a | 1 << i);
            }
            for (i, list) in members.iter_mut().enumerate() {
                if mask >> i & 1 == 1 {
                    list.push(format!("e{e}"));
                }
            }
            let freq = mask.count_ones().min(cfg.r_max);
            elements.push(json!({
                "id": format!("e{e}"),
                "requirement": rng.random_range(1..=freq),
                "profit": rng.random_range(1..=5),
            }));
        }
        if members.iter().any(|l| l.is_empty()) {
            continue;
        }
        let sets: Vec<Value> =
            members.iter().enumerate().map(|(i, l)| json!({"id": format!("S{i}"), "members": l})).collect();
        let doc = json!({
            "elements": elements,
            "sets": sets,
            "q": cfg.qs.choose(rng).unwrap(),
            "cost": cost_json(rng, n, cfg.cost),
        });
        let Ok(problem) = Problem::from_json(&doc.to_string()) else { continue };
        match enumerate_covers(&problem) {
            Ok(f) if f.len() <= cfg.max_covers => return problem,
            _ => continue,
        }
    }
}

/// Unit-requirement instance on `n` sets with the given cost table, which
/// need not be monotone.
pub fn unit_instance_with_table<R: Rng>(rng: &mut R, n: usize, table: &[i64], q: &str) -> Problem {
    loop {
        let m = rng.random_range(2..=6);
        let mut members: Vec<Vec<String>> = vec![vec![]; n];
        for e in 0..m {
            let mut mask = 0u64;
            while mask == 0 {
                mask = (0..n).filter(|_| rng.random_bool(0.45)).fold(0, |a, i| a | 1 << i);
            }
            for (i, list) in members.iter_mut().enumerate() {
                if mask >> i & 1 == 1 {
                    list.push(format!("e{e}"));
                }
            }
        }
        if members.iter().any(|l| l.is_empty()) {
            continue;
        }
        let elements: Vec<Value> = (0..m)
            .map(|e| json!({"id": format!("e{e}"), "requirement": 1, "profit": rng.random_range(1..=5)}))
            .collect();
        let sets: Vec<Value> =
            members.iter().enumerate().map(|(i, l)| json!({"id": format!("S{i}"), "members": l})).collect();
        let entries: Vec<Value> = (0..1u64 << n)
            .map(|mk| json!({"subset": subset_ids(mk, n), "value": table[mk as usize]}))
            .collect();
        let doc = json!({
            "elements": elements,
            "sets": sets,
            "q": q,
            "cost": {"kind": "explicit-table", "monotone": false, "entries": entries},
        });
        let inst = Instance::from_json(&doc.to_string()).unwrap();
        if let Ok(p) = Problem::new(inst) {
            return p;
        }
    }
}

/// The three-set cost table with `ρ0({S1}) = ρ0({S1,S3}) = 1` and zero
/// elsewhere, indexed by bitmask.
pub fn remark_table() -> Vec<i64> {
    let mut t = vec![0; 8];
    t[0b001] = 1;
    t[0b101] = 1;
    t
}

//! Cost oracles over sub-collections of sets.
//!
//! Sub-collections are bitmasks over set indices (at most 64 sets). Values
//! are normalized so the empty sub-collection costs zero; the raw value is
//! still available through [`CostOracle::eval_raw`].

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering as AtomicOrdering};

use parking_lot::RwLock;
use serde::{Serialize, Serializer};

use crate::lovasz::SetFunction;
use crate::num::{Rational, Scalar};

/// A cost value: exact for linear and table costs, floating otherwise.
#[derive(Clone, PartialEq)]
pub enum CostValue {
    Exact(Rational),
    Float(f64),
}

impl CostValue {
    pub fn to_f64(&self) -> f64 {
        match self {
            CostValue::Exact(r) => r.to_f64(),
            CostValue::Float(v) => *v,
        }
    }

    pub fn as_exact(&self) -> Option<&Rational> {
        match self {
            CostValue::Exact(r) => Some(r),
            CostValue::Float(_) => None,
        }
    }

    pub fn to_scalar<T: Scalar>(&self) -> T {
        match self {
            CostValue::Exact(r) => T::from_rational(r),
            CostValue::Float(v) => T::from_f64(*v),
        }
    }

    /// Exact comparison when both sides are exact, float otherwise.
    pub fn compare(&self, other: &CostValue) -> Ordering {
        match (self, other) {
            (CostValue::Exact(a), CostValue::Exact(b)) => a.cmp(b),
            _ => self.to_f64().total_cmp(&other.to_f64()),
        }
    }

    fn sub(&self, other: &CostValue) -> CostValue {
        match (self, other) {
            (CostValue::Exact(a), CostValue::Exact(b)) => CostValue::Exact(a - b),
            _ => CostValue::Float(self.to_f64() - other.to_f64()),
        }
    }
}

impl fmt::Debug for CostValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for CostValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CostValue::Exact(r) => write!(f, "{}", r),
            CostValue::Float(v) => write!(f, "{}", v),
        }
    }
}

impl Serialize for CostValue {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            CostValue::Exact(r) => r.serialize(serializer),
            CostValue::Float(v) => serializer.serialize_f64(*v),
        }
    }
}

#[derive(Debug, Clone)]
enum Kind {
    Linear(Vec<Rational>),
    ConcaveCardinality { scale: f64, exponent: f64 },
    Table(Vec<Rational>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct OracleStats {
    /// Calls to [`CostOracle::eval`].
    pub calls: u64,
    /// Calls that missed the memo and computed a value.
    pub computed: u64,
}

/// Memoizing evaluator of `ρ0`. Readers share the memo through a read lock;
/// a miss takes the write lock only to insert a finished value.
#[derive(Debug)]
pub struct CostOracle {
    kind: Kind,
    num_sets: usize,
    monotone: bool,
    offset: CostValue,
    memo: RwLock<HashMap<u64, CostValue>>,
    calls: AtomicU64,
    computed: AtomicU64,
}

impl Clone for CostOracle {
    fn clone(&self) -> Self {
        CostOracle::from_kind(self.kind.clone(), self.num_sets, self.monotone)
    }
}

impl CostOracle {
    /// Modular cost `Σ_{S∈𝒮'} c(S)`.
    pub fn linear(weights: Vec<Rational>) -> Self {
        let n = weights.len();
        CostOracle::from_kind(Kind::Linear(weights), n, true)
    }

    /// `scale · |𝒮'|^exponent`.
    pub fn concave_cardinality(num_sets: usize, scale: f64, exponent: f64) -> Self {
        CostOracle::from_kind(Kind::ConcaveCardinality { scale, exponent }, num_sets, true)
    }

    /// Explicit table indexed by bitmask; `values.len()` must be `2^num_sets`.
    pub fn table(num_sets: usize, values: Vec<Rational>, monotone: bool) -> Self {
        assert_eq!(values.len(), 1usize << num_sets, "table needs 2^n entries");
        CostOracle::from_kind(Kind::Table(values), num_sets, monotone)
    }

    fn from_kind(kind: Kind, num_sets: usize, monotone: bool) -> Self {
        assert!(num_sets <= 64, "at most 64 sets are supported");
        let offset = compute(&kind, 0);
        CostOracle {
            kind,
            num_sets,
            monotone,
            offset,
            memo: RwLock::new(HashMap::new()),
            calls: AtomicU64::new(0),
            computed: AtomicU64::new(0),
        }
    }

    pub fn num_sets(&self) -> usize {
        self.num_sets
    }

    /// Whether values are exact rationals.
    pub fn is_exact(&self) -> bool {
        !matches!(self.kind, Kind::ConcaveCardinality { .. })
    }

    /// Monotone by construction (linear, concave) or as declared and
    /// verified for tables.
    pub fn is_monotone(&self) -> bool {
        self.monotone
    }

    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            Kind::Linear(_) => "linear",
            Kind::ConcaveCardinality { .. } => "concave-cardinality",
            Kind::Table(_) => "explicit-table",
        }
    }

    /// Normalized, memoized `ρ0(mask) - ρ0(∅)`.
    pub fn eval(&self, mask: u64) -> CostValue {
        self.calls.fetch_add(1, AtomicOrdering::Relaxed);
        if let Some(v) = self.memo.read().get(&mask) {
            return v.clone();
        }
        let v = self.eval_uncached(mask);
        self.computed.fetch_add(1, AtomicOrdering::Relaxed);
        self.memo.write().entry(mask).or_insert_with(|| v.clone());
        v
    }

    pub fn eval_uncached(&self, mask: u64) -> CostValue {
        compute(&self.kind, mask).sub(&self.offset)
    }

    /// Unshifted `ρ0(mask)`.
    pub fn eval_raw(&self, mask: u64) -> CostValue {
        compute(&self.kind, mask)
    }

    pub fn eval_f64(&self, mask: u64) -> f64 {
        self.eval(mask).to_f64()
    }

    pub fn eval_as<T: Scalar>(&self, mask: u64) -> T {
        self.eval(mask).to_scalar()
    }

    /// `ρ0(∅)` before normalization.
    pub fn offset(&self) -> &CostValue {
        &self.offset
    }

    pub fn stats(&self) -> OracleStats {
        OracleStats {
            calls: self.calls.load(AtomicOrdering::Relaxed),
            computed: self.computed.load(AtomicOrdering::Relaxed),
        }
    }
}

fn compute(kind: &Kind, mask: u64) -> CostValue {
    match kind {
        Kind::Linear(w) => {
            let mut total = Rational::zero();
            let mut m = mask;
            while m != 0 {
                total += w[m.trailing_zeros() as usize].clone();
                m &= m - 1;
            }
            CostValue::Exact(total)
        }
        Kind::ConcaveCardinality { scale, exponent } => {
            let k = mask.count_ones();
            if k == 0 {
                CostValue::Float(0.0)
            } else {
                CostValue::Float(scale * (k as f64).powf(*exponent))
            }
        }
        Kind::Table(values) => CostValue::Exact(values[mask as usize].clone()),
    }
}

/// `ρ0` viewed as a set function on set indices.
pub struct SetCost<'a> {
    oracle: &'a CostOracle,
}

impl<'a> SetCost<'a> {
    pub fn new(oracle: &'a CostOracle) -> Self {
        SetCost { oracle }
    }
}

impl<T: Scalar> SetFunction<T> for SetCost<'_> {
    fn ground_size(&self) -> usize {
        self.oracle.num_sets()
    }

    fn eval(&self, subset: &[usize]) -> T {
        self.oracle.eval_as(crate::lovasz::indices_to_mask(subset))
    }

    fn eval_chain(&self, order: &[usize]) -> Vec<T> {
        let mut mask = 0u64;
        order
            .iter()
            .map(|&i| {
                mask |= 1 << i;
                self.oracle.eval_as(mask)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lovasz::{check_submodular, TableFunction};
    use proptest::prelude::*;

    fn subadditive_and_submodular<T: Scalar>(table: &TableFunction<T>, n: usize) {
        let full = (1u64 << n) - 1;
        for x in 0..=full {
            for y in 0..=full {
                let lhs = table.value(x | y).clone();
                let rhs = table.value(x).clone() + table.value(y).clone();
                assert!(!lhs.exceeds(&rhs), "subadditivity fails at {x:b} {y:b}");
            }
        }
        assert!(check_submodular(table).unwrap().is_submodular());
    }

    #[test]
    fn linear_is_modular_and_exact() {
        let o = CostOracle::linear(vec![Rational::from_integer(1), Rational::from_integer(1), Rational::from_integer(1000)]);
        assert!(o.is_exact());
        assert_eq!(o.eval(0b011), CostValue::Exact(Rational::from_integer(2)));
        assert_eq!(o.eval(0), CostValue::Exact(Rational::zero()));
        for a in 0..8u64 {
            for b in 0..8u64 {
                if a & b == 0 {
                    let lhs = o.eval(a | b).as_exact().unwrap().clone();
                    let rhs = o.eval(a).as_exact().unwrap() + o.eval(b).as_exact().unwrap();
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn table_is_normalized_but_raw_is_kept() {
        let values: Vec<Rational> = (0..4).map(|m| Rational::from_integer(5 + m)).collect();
        let o = CostOracle::table(2, values, true);
        assert_eq!(o.eval(0), CostValue::Exact(Rational::zero()));
        assert_eq!(o.eval(0b11), CostValue::Exact(Rational::from_integer(3)));
        assert_eq!(o.eval_raw(0b11), CostValue::Exact(Rational::from_integer(8)));
        assert_eq!(o.offset(), &CostValue::Exact(Rational::from_integer(5)));
    }

    #[test]
    fn memo_counts() {
        let o = CostOracle::concave_cardinality(4, 2.0, 0.5);
        assert!(!o.is_exact());
        let a = o.eval(0b1011);
        let b = o.eval(0b1011);
        assert_eq!(a, b);
        assert_eq!(o.stats(), OracleStats { calls: 2, computed: 1 });
        assert!((a.to_f64() - 2.0 * 3f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn builtin_kinds_are_submodular_and_subadditive() {
        let n = 10;
        let lin = CostOracle::linear((0..n).map(|i| Rational::new(i as i64 * 3 % 7, 2)).collect());
        let table = TableFunction::tabulate(&SetCost::new(&lin) as &dyn SetFunction<Rational>).unwrap();
        subadditive_and_submodular(&table, n);
        let conc = CostOracle::concave_cardinality(n, 1.5, 0.3);
        let table = TableFunction::<f64>::tabulate(&SetCost::new(&conc)).unwrap();
        subadditive_and_submodular(&table, n);
    }

    #[test]
    fn concurrent_reads_agree() {
        let o = CostOracle::concave_cardinality(12, 1.0, 0.7);
        std::thread::scope(|s| {
            for t in 0..4u64 {
                let o = &o;
                s.spawn(move || {
                    for m in 0..4096u64 {
                        let m = m.rotate_left(t as u32) & 0xfff;
                        assert_eq!(o.eval(m), o.eval_uncached(m));
                    }
                });
            }
        });
        assert_eq!(o.stats().computed, 4096);
    }

    proptest! {
        #[test]
        fn memoized_matches_uncached(
            weights in proptest::collection::vec(0i64..50, 1..12),
            masks in proptest::collection::vec(any::<u64>(), 1..40),
        ) {
            let n = weights.len();
            let o = CostOracle::linear(weights.iter().map(|w| Rational::from_integer(*w)).collect());
            let full = (1u64 << n) - 1;
            for m in masks {
                let m = m & full;
                prop_assert_eq!(o.eval(m), o.eval_uncached(m));
                prop_assert_eq!(o.eval(m), o.eval_uncached(m));
            }
        }
    }
}

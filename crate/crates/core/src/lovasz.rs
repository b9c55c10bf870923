//! Lovász extension of normalized set functions, greedy subgradients and
//! exhaustive property checks on small ground sets.

use std::cmp::Ordering;

use rand::Rng;
use serde::Serialize;

use crate::num::{Scalar, FLOAT_TOL};

/// Largest ground set accepted by the exhaustive checkers.
pub const MAX_CHECK_GROUND: usize = 16;

/// Up to this ground size the submodularity checker enumerates every triple
/// `(E'', E', E0)`; above it only the equivalent pairwise form is scanned.
pub const MAX_TRIPLE_GROUND: usize = 8;

const MAX_REPORTED_VIOLATIONS: usize = 256;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LovaszError {
    #[error("coordinate {index} is negative ({value})")]
    NegativeCoordinate { index: usize, value: f64 },
    #[error("coordinate {index} = {value} lies outside [0, 1]")]
    OutsideUnitCube { index: usize, value: f64 },
    #[error("point has {got} coordinates, ground set has {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("ground set of size {n} exceeds the exhaustive-check limit {max}")]
    GroundTooLarge { n: usize, max: usize },
}

/// A set function on `{0, .., ground_size()-1}` with `f(∅) = 0`.
pub trait SetFunction<T: Scalar> {
    fn ground_size(&self) -> usize;

    fn eval(&self, subset: &[usize]) -> T;

    /// Values on the nested prefixes `order[..1]`, `order[..2]`, ...
    fn eval_chain(&self, order: &[usize]) -> Vec<T> {
        (1..=order.len()).map(|i| self.eval(&order[..i])).collect()
    }
}

impl<T: Scalar, F: SetFunction<T> + ?Sized> SetFunction<T> for &F {
    fn ground_size(&self) -> usize {
        (**self).ground_size()
    }
    fn eval(&self, subset: &[usize]) -> T {
        (**self).eval(subset)
    }
    fn eval_chain(&self, order: &[usize]) -> Vec<T> {
        (**self).eval_chain(order)
    }
}

pub fn mask_to_indices(mask: u64) -> Vec<usize> {
    let mut out = Vec::with_capacity(mask.count_ones() as usize);
    let mut m = mask;
    while m != 0 {
        out.push(m.trailing_zeros() as usize);
        m &= m - 1;
    }
    out
}

pub fn indices_to_mask(indices: &[usize]) -> u64 {
    indices.iter().fold(0u64, |m, &i| m | (1u64 << i))
}

/// Set function given by a closure over bitmasks (`n <= 64`).
pub struct MaskFunction<F> {
    n: usize,
    f: F,
}

impl<F> MaskFunction<F> {
    pub fn new(n: usize, f: F) -> Self {
        assert!(n <= 64, "mask functions are limited to 64 elements");
        MaskFunction { n, f }
    }
}

impl<T: Scalar, F: Fn(u64) -> T> SetFunction<T> for MaskFunction<F> {
    fn ground_size(&self) -> usize {
        self.n
    }
    fn eval(&self, subset: &[usize]) -> T {
        (self.f)(indices_to_mask(subset))
    }
    fn eval_chain(&self, order: &[usize]) -> Vec<T> {
        let mut mask = 0u64;
        order
            .iter()
            .map(|&i| {
                mask |= 1 << i;
                (self.f)(mask)
            })
            .collect()
    }
}

/// Explicit value table indexed by bitmask.
#[derive(Debug, Clone, PartialEq)]
pub struct TableFunction<T> {
    n: usize,
    values: Vec<T>,
}

impl<T: Scalar> TableFunction<T> {
    pub fn new(n: usize, values: Vec<T>) -> Self {
        assert_eq!(values.len(), 1usize << n, "table needs 2^n entries");
        TableFunction { n, values }
    }

    /// Tabulates any set function on a small ground set.
    pub fn tabulate<F: SetFunction<T> + ?Sized>(f: &F) -> Result<Self, LovaszError> {
        let n = f.ground_size();
        if n > 24 {
            return Err(LovaszError::GroundTooLarge { n, max: 24 });
        }
        let values = (0..1u64 << n).map(|m| f.eval(&mask_to_indices(m))).collect();
        Ok(TableFunction { n, values })
    }

    pub fn value(&self, mask: u64) -> &T {
        &self.values[mask as usize]
    }
}

impl<T: Scalar> SetFunction<T> for TableFunction<T> {
    fn ground_size(&self) -> usize {
        self.n
    }
    fn eval(&self, subset: &[usize]) -> T {
        self.values[indices_to_mask(subset) as usize].clone()
    }
}

/// Coordinates sorted non-increasingly, ties by ascending index.
pub fn sorted_order<T: Scalar>(x: &[T]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| match x[b].partial_cmp(&x[a]) {
        Some(Ordering::Equal) | None => a.cmp(&b),
        Some(o) => o,
    });
    order
}

fn check_point<T: Scalar>(n: usize, x: &[T], unit: bool) -> Result<(), LovaszError> {
    if x.len() != n {
        return Err(LovaszError::DimensionMismatch { expected: n, got: x.len() });
    }
    for (index, v) in x.iter().enumerate() {
        if *v < T::zero() {
            return Err(LovaszError::NegativeCoordinate { index, value: v.to_f64() });
        }
        if unit && *v > T::one() {
            return Err(LovaszError::OutsideUnitCube { index, value: v.to_f64() });
        }
    }
    Ok(())
}

/// Lovász extension by the sorted-prefix telescoping sum.
pub fn lovasz_eval<T: Scalar, F: SetFunction<T>>(f: &F, x: &[T]) -> Result<T, LovaszError> {
    check_point(f.ground_size(), x, false)?;
    if x.is_empty() {
        return Ok(T::zero());
    }
    let order = sorted_order(x);
    let chain = f.eval_chain(&order);
    let n = order.len();
    let mut total = T::zero();
    for i in 0..n - 1 {
        let step = x[order[i]].clone() - x[order[i + 1]].clone();
        total = total + step * chain[i].clone();
    }
    total = total + x[order[n - 1]].clone() * chain[n - 1].clone();
    Ok(total)
}

/// Lovász extension as `∫_0^1 f({i : x_i >= θ}) dθ`, summed exactly over the
/// breakpoint intervals of the piecewise-constant integrand.
pub fn lovasz_eval_theta<T: Scalar, F: SetFunction<T>>(
    f: &F,
    x: &[T],
) -> Result<T, LovaszError> {
    check_point(f.ground_size(), x, true)?;
    let mut levels: Vec<T> = x.iter().filter(|v| **v > T::zero()).cloned().collect();
    levels.sort_by(|a, b| a.total_cmp(b));
    levels.dedup_by(|a, b| a.total_cmp(b) == Ordering::Equal);
    let mut total = T::zero();
    let mut lower = T::zero();
    for level in levels {
        // On (lower, level] the threshold set is {i : x_i >= level}.
        let above: Vec<usize> = (0..x.len()).filter(|&i| x[i] >= level).collect();
        total = total + (level.clone() - lower) * f.eval(&above);
        lower = level;
    }
    // Above the largest coordinate the threshold set is empty.
    total = total + (T::one() - lower) * f.eval(&[]);
    Ok(total)
}

/// Greedy (Edmonds) vector at `x`: prefix marginals along the same
/// tie-broken order as [`lovasz_eval`].
pub fn greedy_subgradient<T: Scalar, F: SetFunction<T>>(
    f: &F,
    x: &[T],
) -> Result<Vec<T>, LovaszError> {
    check_point(f.ground_size(), x, false)?;
    let order = sorted_order(x);
    let chain = f.eval_chain(&order);
    let mut w = vec![T::zero(); x.len()];
    let mut prev = T::zero();
    for (pos, &j) in order.iter().enumerate() {
        w[j] = chain[pos].clone() - prev;
        prev = chain[pos].clone();
    }
    Ok(w)
}

/// One failure of `f(E'∪E0) - f(E') <= f(E''∪E0) - f(E'')`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubmodularViolation<T> {
    pub smaller: Vec<usize>,
    pub larger: Vec<usize>,
    pub added: Vec<usize>,
    /// `f(E'∪E0) - f(E')`
    pub larger_gain: T,
    /// `f(E''∪E0) - f(E'')`
    pub smaller_gain: T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubmodularityReport<T> {
    pub ground_size: usize,
    /// Whether every `(E'', E', E0)` triple was scanned (small ground sets)
    /// or only the pairwise form `E'' = A, E' = A+i, E0 = {j}`.
    pub exhaustive_triples: bool,
    pub violation_count: usize,
    pub violations: Vec<SubmodularViolation<T>>,
    pub monotone: bool,
    pub nonnegative: bool,
    pub normalized: bool,
}

impl<T> SubmodularityReport<T> {
    pub fn is_submodular(&self) -> bool {
        self.violation_count == 0
    }
}

/// Exhaustive submodularity, monotonicity and nonnegativity scan.
pub fn check_submodular<T: Scalar, F: SetFunction<T>>(
    f: &F,
) -> Result<SubmodularityReport<T>, LovaszError> {
    let n = f.ground_size();
    if n > MAX_CHECK_GROUND {
        return Err(LovaszError::GroundTooLarge { n, max: MAX_CHECK_GROUND });
    }
    let table = TableFunction::tabulate(f)?;
    Ok(check_table(&table))
}

pub fn check_table<T: Scalar>(table: &TableFunction<T>) -> SubmodularityReport<T> {
    let n = table.n;
    let full: u64 = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let v = |m: u64| table.value(m).clone();

    let normalized = v(0).is_zero_tol();
    let nonnegative = (0..=full).all(|m| !v(m).is_neg());
    let mut monotone = true;
    'outer: for m in 0..=full {
        for i in 0..n {
            if m & (1 << i) == 0 && v(m).exceeds(&v(m | 1 << i)) {
                monotone = false;
                break 'outer;
            }
        }
    }

    let mut violations = Vec::new();
    let mut violation_count = 0usize;
    let mut record = |smaller: u64, larger: u64, added: u64, lg: T, sg: T| {
        violation_count += 1;
        if violations.len() < MAX_REPORTED_VIOLATIONS {
            violations.push(SubmodularViolation {
                smaller: mask_to_indices(smaller),
                larger: mask_to_indices(larger),
                added: mask_to_indices(added),
                larger_gain: lg,
                smaller_gain: sg,
            });
        }
    };

    let exhaustive_triples = n <= MAX_TRIPLE_GROUND;
    if exhaustive_triples {
        for larger in 0..=full {
            let rest = full & !larger;
            let mut smaller = larger;
            loop {
                if smaller != larger {
                    let mut added = rest;
                    while added != 0 {
                        let lg = v(larger | added) - v(larger);
                        let sg = v(smaller | added) - v(smaller);
                        if lg.exceeds(&sg) {
                            record(smaller, larger, added, lg, sg);
                        }
                        added = (added - 1) & rest;
                    }
                }
                if smaller == 0 {
                    break;
                }
                smaller = (smaller - 1) & larger;
            }
        }
    } else {
        for base in 0..=full {
            for i in 0..n {
                if base & (1 << i) != 0 {
                    continue;
                }
                for j in 0..n {
                    if j == i || base & (1 << j) != 0 {
                        continue;
                    }
                    let larger = base | 1 << i;
                    let lg = v(larger | 1 << j) - v(larger);
                    let sg = v(base | 1 << j) - v(base);
                    if lg.exceeds(&sg) {
                        record(base, larger, 1 << j, lg, sg);
                    }
                }
            }
        }
    }

    SubmodularityReport {
        ground_size: n,
        exhaustive_triples,
        violation_count,
        violations,
        monotone,
        nonnegative,
        normalized,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvexityVerdict {
    pub trials: usize,
    pub violations: usize,
    /// Largest `ĥ(λx+(1-λ)y) - λĥ(x) - (1-λ)ĥ(y)` observed.
    pub worst_excess: f64,
    pub witness: Option<ConvexityWitness>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvexityWitness {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub lambda: f64,
}

impl ConvexityVerdict {
    pub fn is_convex(&self) -> bool {
        self.violations == 0
    }
}

struct AsFloat<'a, F, T> {
    inner: &'a F,
    _marker: std::marker::PhantomData<T>,
}

impl<T: Scalar, F: SetFunction<T>> SetFunction<f64> for AsFloat<'_, F, T> {
    fn ground_size(&self) -> usize {
        self.inner.ground_size()
    }
    fn eval(&self, subset: &[usize]) -> f64 {
        self.inner.eval(subset).to_f64()
    }
    fn eval_chain(&self, order: &[usize]) -> Vec<f64> {
        self.inner.eval_chain(order).iter().map(Scalar::to_f64).collect()
    }
}

fn sample_point<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    (0..n)
        .map(|_| match rng.random_range(0..4u8) {
            0 => 0.0,
            1 => 1.0,
            _ => rng.random::<f64>(),
        })
        .collect()
}

/// Randomized midpoint-convexity test of the extension on `[0,1]^n`.
pub fn check_convexity_samples<T: Scalar, F: SetFunction<T>, R: Rng + ?Sized>(
    f: &F,
    trials: usize,
    rng: &mut R,
) -> ConvexityVerdict {
    let g = AsFloat { inner: f, _marker: std::marker::PhantomData };
    let n = g.ground_size();
    let mut verdict =
        ConvexityVerdict { trials, violations: 0, worst_excess: f64::NEG_INFINITY, witness: None };
    for _ in 0..trials {
        let x = sample_point(n, rng);
        let y = sample_point(n, rng);
        let lambda: f64 = rng.random();
        let mid: Vec<f64> = x.iter().zip(&y).map(|(a, b)| lambda * a + (1.0 - lambda) * b).collect();
        let (Ok(hm), Ok(hx), Ok(hy)) =
            (lovasz_eval(&g, &mid), lovasz_eval(&g, &x), lovasz_eval(&g, &y))
        else {
            unreachable!("sampled points are nonnegative");
        };
        let excess = hm - (lambda * hx + (1.0 - lambda) * hy);
        if excess > verdict.worst_excess {
            verdict.worst_excess = excess;
        }
        if excess > FLOAT_TOL {
            verdict.violations += 1;
            if verdict.witness.is_none() {
                verdict.witness = Some(ConvexityWitness { x, y, lambda });
            }
        }
    }
    verdict
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::Rational;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn modular(weights: Vec<f64>) -> MaskFunction<impl Fn(u64) -> f64> {
        let n = weights.len();
        MaskFunction::new(n, move |m| mask_to_indices(m).iter().map(|&i| weights[i]).sum())
    }

    fn sqrt_card(n: usize) -> MaskFunction<impl Fn(u64) -> f64> {
        MaskFunction::new(n, |m: u64| (m.count_ones() as f64).sqrt())
    }

    /// remark2 fixture: 1 on {0} and {0,2}, 0 elsewhere.
    fn remark_table() -> TableFunction<Rational> {
        let values = (0..8u64)
            .map(|m| if m == 0b001 || m == 0b101 { Rational::one() } else { Rational::zero() })
            .collect();
        TableFunction::new(3, values)
    }

    #[test]
    fn indicator_gives_set_value() {
        let f = sqrt_card(4);
        let x = [1.0, 0.0, 1.0, 1.0];
        assert!((lovasz_eval(&f, &x).unwrap() - 3f64.sqrt()).abs() < 1e-12);
        assert!((lovasz_eval_theta(&f, &x).unwrap() - 3f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn modular_is_dot_product() {
        let f = modular(vec![1.0, 2.0]);
        assert!((lovasz_eval(&f, &[0.5, 0.25]).unwrap() - 1.0).abs() < 1e-12);
        assert!((lovasz_eval_theta(&f, &[0.5, 0.25]).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(greedy_subgradient(&f, &[0.3, 0.9]).unwrap(), vec![1.0, 2.0]);
    }

    #[test]
    fn zero_point_is_zero() {
        let f = sqrt_card(3);
        assert_eq!(lovasz_eval(&f, &[0.0; 3]).unwrap(), 0.0);
        assert_eq!(lovasz_eval_theta(&f, &[0.0; 3]).unwrap(), 0.0);
    }

    #[test]
    fn constant_point_scales_full_set() {
        let f = sqrt_card(3);
        let v = lovasz_eval_theta(&f, &[0.4; 3]).unwrap();
        assert!((v - 0.4 * 3f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_points() {
        let f = sqrt_card(2);
        assert!(matches!(lovasz_eval(&f, &[-0.1, 0.0]), Err(LovaszError::NegativeCoordinate { index: 0, .. })));
        assert!(matches!(lovasz_eval_theta(&f, &[0.5, 1.5]), Err(LovaszError::OutsideUnitCube { index: 1, .. })));
        assert!(matches!(greedy_subgradient(&f, &[0.0, -1.0]), Err(LovaszError::NegativeCoordinate { .. })));
        assert!(matches!(lovasz_eval(&f, &[0.5]), Err(LovaszError::DimensionMismatch { .. })));
        // The sorted-prefix form needs no upper bound.
        assert!(lovasz_eval(&f, &[2.0, 3.0]).is_ok());
    }

    #[test]
    fn greedy_vector_concave_cardinality() {
        let w = greedy_subgradient(&sqrt_card(2), &[0.9, 0.1]).unwrap();
        assert!((w[0] - 1.0).abs() < 1e-12);
        assert!((w[1] - (2f64.sqrt() - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn greedy_vector_uniform_point_uses_index_order() {
        let f = MaskFunction::new(3, |m: u64| [0.0, 3.0, 1.0, 3.5, 2.0, 4.0, 2.5, 4.2][m as usize]);
        let w = greedy_subgradient(&f, &[0.5, 0.5, 0.5]).unwrap();
        // f({0}) = 3, f({0,1}) = 3.5, f({0,1,2}) = 4.2
        assert!((w[0] - 3.0).abs() < 1e-12);
        assert!((w[1] - 0.5).abs() < 1e-12);
        assert!((w[2] - 0.7).abs() < 1e-12);
    }

    #[test]
    fn remark_table_is_submodular_but_not_monotone() {
        let report = check_submodular(&remark_table()).unwrap();
        assert!(report.is_submodular(), "{:?}", report.violations);
        assert!(!report.monotone);
        assert!(report.nonnegative);
        assert!(report.normalized);
    }

    #[test]
    fn modular_and_coverage_pass() {
        assert!(check_submodular(&modular(vec![1.0, 0.0, 2.5, 4.0])).unwrap().is_submodular());
        // coverage |∪ members| with members {0,1}, {1,2}, {2}, {0,3}
        let members = [0b0011u64, 0b0110, 0b0100, 0b1001];
        let cov = MaskFunction::new(4, move |m: u64| {
            let u = mask_to_indices(m).iter().fold(0u64, |a, &i| a | members[i]);
            u.count_ones() as f64
        });
        let report = check_submodular(&cov).unwrap();
        assert!(report.is_submodular());
        assert!(report.monotone);
    }

    #[test]
    fn supermodular_is_caught_both_ways() {
        let sq = MaskFunction::new(9, |m: u64| (m.count_ones() as f64).powi(2));
        let report = check_submodular(&sq).unwrap();
        assert!(!report.exhaustive_triples);
        assert!(report.violation_count > 0);
        let sq = MaskFunction::new(3, |m: u64| (m.count_ones() as f64).powi(2));
        let report = check_submodular(&sq).unwrap();
        assert!(report.exhaustive_triples);
        assert!(report.violation_count > 0);
    }

    #[test]
    fn ground_guard() {
        let f = sqrt_card(17);
        assert!(matches!(check_submodular(&f), Err(LovaszError::GroundTooLarge { n: 17, .. })));
    }

    #[test]
    fn convexity_samples() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let v = check_convexity_samples(&modular(vec![1.0, -2.0, 3.0]), 500, &mut rng);
        assert!(v.is_convex());
        assert!(v.worst_excess.abs() < 1e-12);
        let v = check_convexity_samples(&sqrt_card(4), 1000, &mut rng);
        assert!(v.is_convex());
        let sq = MaskFunction::new(3, |m: u64| (m.count_ones() as f64).powi(2));
        let v = check_convexity_samples(&sq, 1000, &mut rng);
        assert!(!v.is_convex());
        assert!(v.witness.is_some());
    }

    #[test]
    fn exact_mode_identities() {
        let t = remark_table();
        let x = vec![Rational::new(1, 3), Rational::new(1, 3), Rational::new(3, 4)];
        let a = lovasz_eval(&t, &x).unwrap();
        let b = lovasz_eval_theta(&t, &x).unwrap();
        assert_eq!(a, b);
        let w = greedy_subgradient(&t, &x).unwrap();
        let dot: Rational = w.iter().zip(&x).map(|(a, b)| a * b).sum();
        assert_eq!(dot, a);
    }
}

//! Instance data model, JSON schema and validation.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::lovasz::{check_table, TableFunction};
use crate::num::{binomial, Rational};
use crate::oracle::{CostOracle, CostValue};

/// Default bound on every covering requirement.
pub const DEFAULT_R_MAX_CAP: u32 = 4;
/// Sub-collections are stored as `u64` bitmasks.
pub const MAX_SETS: usize = 64;
/// Explicit tables hold `2^|𝒮|` values.
pub const MAX_TABLE_SETS: usize = 16;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Instance {
    pub elements: Vec<ElementSpec>,
    pub sets: Vec<SetSpec>,
    pub q: Rational,
    pub cost: CostSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElementSpec {
    pub id: String,
    pub requirement: u32,
    pub profit: Rational,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SetSpec {
    pub id: String,
    pub members: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum CostSpec {
    /// Per-set weights keyed by set id.
    Linear { weights: BTreeMap<String, Rational> },
    /// `scale · |𝒮'|^exponent`.
    ConcaveCardinality { scale: f64, exponent: f64 },
    /// Value of every sub-collection; `default` fills unlisted ones.
    ExplicitTable {
        monotone: bool,
        entries: Vec<TableEntry>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        default: Option<Rational>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableEntry {
    pub subset: Vec<String>,
    pub value: Rational,
}

#[derive(Debug, thiserror::Error)]
pub enum InstanceError {
    #[error("malformed instance document: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid instance: {0}")]
    Invalid(ValidationReport),
    #[error("unknown set id `{0}`")]
    UnknownSet(String),
    #[error("unknown element id `{0}`")]
    UnknownElement(String),
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "code", rename_all = "kebab-case")]
pub enum Violation {
    QOutOfRange { q: Rational },
    NoElements,
    TooManySets { count: usize, max: usize },
    DuplicateElementId { id: String },
    DuplicateSetId { id: String },
    EmptySet { set: String },
    UnknownMember { set: String, member: String },
    DuplicateMember { set: String, member: String },
    ElementNotCovered { element: String },
    ZeroRequirement { element: String },
    RequirementExceedsFrequency { element: String, requirement: u32, frequency: u32 },
    RequirementAboveCap { element: String, requirement: u32, cap: u32 },
    NonPositiveProfit { element: String, profit: Rational },
    MissingWeight { set: String },
    UnknownWeight { set: String },
    NegativeWeight { set: String, weight: Rational },
    BadScale { scale: f64 },
    BadExponent { exponent: f64 },
    TableTooLarge { sets: usize, max: usize },
    TableUnknownSet { set: String },
    TableDuplicateEntry { subset: Vec<String> },
    TableMissingEntries { missing: usize },
    TableNegative { subset: Vec<String> },
    TableNotSubmodular { violations: usize },
    TableMonotonicityMismatch { declared: bool, actual: bool },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Violation::*;
        match self {
            QOutOfRange { q } => write!(f, "covering ratio q = {q} must satisfy 0 < q < 1 (full covering, q = 1, is not supported)"),
            NoElements => write!(f, "instance has no elements"),
            TooManySets { count, max } => write!(f, "{count} sets exceed the supported maximum of {max}"),
            DuplicateElementId { id } => write!(f, "duplicate element id `{id}`"),
            DuplicateSetId { id } => write!(f, "duplicate set id `{id}`"),
            EmptySet { set } => write!(f, "set `{set}` has no members"),
            UnknownMember { set, member } => write!(f, "set `{set}` names unknown element `{member}`"),
            DuplicateMember { set, member } => write!(f, "set `{set}` lists element `{member}` twice"),
            ElementNotCovered { element } => write!(f, "element `{element}` belongs to no set: union of sets must equal E"),
            ZeroRequirement { element } => write!(f, "element `{element}` has requirement 0; requirements must be >= 1"),
            RequirementExceedsFrequency { element, requirement, frequency } => write!(
                f,
                "requirement exceeds frequency: element `{element}` needs {requirement} sets but lies in {frequency}"
            ),
            RequirementAboveCap { element, requirement, cap } => {
                write!(f, "element `{element}` requirement {requirement} exceeds the cap {cap}")
            }
            NonPositiveProfit { element, profit } => write!(f, "element `{element}` has non-positive profit {profit}"),
            MissingWeight { set } => write!(f, "linear cost has no weight for set `{set}`"),
            UnknownWeight { set } => write!(f, "linear cost names unknown set `{set}`"),
            NegativeWeight { set, weight } => write!(f, "set `{set}` has negative weight {weight}"),
            BadScale { scale } => write!(f, "concave-cardinality scale {scale} must be finite and > 0"),
            BadExponent { exponent } => write!(f, "concave-cardinality exponent {exponent} must lie in (0, 1]"),
            TableTooLarge { sets, max } => write!(f, "explicit-table costs allow at most {max} sets, instance has {sets}"),
            TableUnknownSet { set } => write!(f, "table entry names unknown set `{set}`"),
            TableDuplicateEntry { subset } => write!(f, "table lists sub-collection {subset:?} twice"),
            TableMissingEntries { missing } => write!(f, "table is missing {missing} sub-collections and has no default"),
            TableNegative { subset } => write!(f, "table value of {subset:?} is below the empty-collection value"),
            TableNotSubmodular { violations } => write!(f, "table cost is not submodular ({violations} violated triples)"),
            TableMonotonicityMismatch { declared, actual } => {
                write!(f, "table declares monotone = {declared} but the values give monotone = {actual}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    /// `P = Σ p_e`.
    pub total_profit: Rational,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
        write!(f, "{}", parts.join("; "))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ValidationConfig {
    pub r_max_cap: u32,
}

impl Default for ValidationConfig {
    fn default() -> Self {
        ValidationConfig { r_max_cap: DEFAULT_R_MAX_CAP }
    }
}

impl Instance {
    pub fn from_json(text: &str) -> Result<Instance, InstanceError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance serializes")
    }

    pub fn validate(&self) -> ValidationReport {
        validate(self, ValidationConfig::default())
    }
}

pub fn validate(instance: &Instance, config: ValidationConfig) -> ValidationReport {
    let mut v = Vec::new();
    let total_profit: Rational = instance.elements.iter().map(|e| &e.profit).sum();

    if !(instance.q.is_positive() && instance.q < Rational::one()) {
        v.push(Violation::QOutOfRange { q: instance.q.clone() });
    }
    if instance.elements.is_empty() {
        v.push(Violation::NoElements);
    }
    if instance.sets.len() > MAX_SETS {
        v.push(Violation::TooManySets { count: instance.sets.len(), max: MAX_SETS });
    }

    let mut element_ids = HashSet::new();
    for e in &instance.elements {
        if !element_ids.insert(e.id.as_str()) {
            v.push(Violation::DuplicateElementId { id: e.id.clone() });
        }
    }
    let mut set_ids = HashSet::new();
    for s in &instance.sets {
        if !set_ids.insert(s.id.as_str()) {
            v.push(Violation::DuplicateSetId { id: s.id.clone() });
        }
    }

    let mut frequency: HashMap<&str, u32> = HashMap::new();
    for s in &instance.sets {
        if s.members.is_empty() {
            v.push(Violation::EmptySet { set: s.id.clone() });
        }
        let mut seen = HashSet::new();
        for m in &s.members {
            if !element_ids.contains(m.as_str()) {
                v.push(Violation::UnknownMember { set: s.id.clone(), member: m.clone() });
            } else if !seen.insert(m.as_str()) {
                v.push(Violation::DuplicateMember { set: s.id.clone(), member: m.clone() });
            } else {
                *frequency.entry(m.as_str()).or_default() += 1;
            }
        }
    }

    for e in &instance.elements {
        let f = frequency.get(e.id.as_str()).copied().unwrap_or(0);
        if f == 0 {
            v.push(Violation::ElementNotCovered { element: e.id.clone() });
        }
        if e.requirement == 0 {
            v.push(Violation::ZeroRequirement { element: e.id.clone() });
        } else if e.requirement > f && f > 0 {
            v.push(Violation::RequirementExceedsFrequency {
                element: e.id.clone(),
                requirement: e.requirement,
                frequency: f,
            });
        }
        if e.requirement > config.r_max_cap {
            v.push(Violation::RequirementAboveCap {
                element: e.id.clone(),
                requirement: e.requirement,
                cap: config.r_max_cap,
            });
        }
        if !e.profit.is_positive() {
            v.push(Violation::NonPositiveProfit { element: e.id.clone(), profit: e.profit.clone() });
        }
    }

    validate_cost(instance, &set_ids, &mut v);
    ValidationReport { violations: v, total_profit }
}

fn validate_cost(instance: &Instance, set_ids: &HashSet<&str>, v: &mut Vec<Violation>) {
    match &instance.cost {
        CostSpec::Linear { weights } => {
            for s in &instance.sets {
                if !weights.contains_key(&s.id) {
                    v.push(Violation::MissingWeight { set: s.id.clone() });
                }
            }
            for (id, w) in weights {
                if !set_ids.contains(id.as_str()) {
                    v.push(Violation::UnknownWeight { set: id.clone() });
                }
                if w.is_negative() {
                    v.push(Violation::NegativeWeight { set: id.clone(), weight: w.clone() });
                }
            }
        }
        CostSpec::ConcaveCardinality { scale, exponent } => {
            if !(scale.is_finite() && *scale > 0.0) {
                v.push(Violation::BadScale { scale: *scale });
            }
            if !(exponent.is_finite() && *exponent > 0.0 && *exponent <= 1.0) {
                v.push(Violation::BadExponent { exponent: *exponent });
            }
        }
        CostSpec::ExplicitTable { monotone, .. } => {
            let n = instance.sets.len();
            if n > MAX_TABLE_SETS {
                v.push(Violation::TableTooLarge { sets: n, max: MAX_TABLE_SETS });
                return;
            }
            let index: HashMap<&str, usize> =
                instance.sets.iter().enumerate().map(|(i, s)| (s.id.as_str(), i)).collect();
            let before = v.len();
            let Some(values) = table_values(instance, &index, v) else {
                return;
            };
            if v.len() > before {
                return;
            }
            let offset = values[0].clone();
            let normalized: Vec<Rational> = values.iter().map(|x| x - &offset).collect();
            if let Some(m) = (0..normalized.len()).find(|&m| normalized[m].is_negative()) {
                v.push(Violation::TableNegative { subset: ids_of_mask(&instance.sets, m as u64) });
            }
            let report = check_table(&TableFunction::new(n, normalized));
            if !report.is_submodular() {
                v.push(Violation::TableNotSubmodular { violations: report.violation_count });
            }
            if report.monotone != *monotone {
                v.push(Violation::TableMonotonicityMismatch { declared: *monotone, actual: report.monotone });
            }
        }
    }
}

/// Dense table of raw values, or `None` (with violations pushed) when the
/// entries cannot be resolved.
fn table_values(
    instance: &Instance,
    index: &HashMap<&str, usize>,
    v: &mut Vec<Violation>,
) -> Option<Vec<Rational>> {
    let CostSpec::ExplicitTable { entries, default, .. } = &instance.cost else {
        return None;
    };
    let n = instance.sets.len();
    let mut values: Vec<Option<Rational>> = vec![None; 1 << n];
    let mut ok = true;
    for entry in entries {
        let mut mask = 0u64;
        for id in &entry.subset {
            match index.get(id.as_str()) {
                Some(&i) => mask |= 1 << i,
                None => {
                    v.push(Violation::TableUnknownSet { set: id.clone() });
                    ok = false;
                }
            }
        }
        let slot = &mut values[mask as usize];
        if slot.is_some() {
            v.push(Violation::TableDuplicateEntry { subset: entry.subset.clone() });
            ok = false;
        }
        *slot = Some(entry.value.clone());
    }
    if !ok {
        return None;
    }
    let missing = values.iter().filter(|x| x.is_none()).count();
    if missing > 0 && default.is_none() {
        v.push(Violation::TableMissingEntries { missing });
        return None;
    }
    Some(values.into_iter().map(|x| x.unwrap_or_else(|| default.clone().unwrap())).collect())
}

fn ids_of_mask(sets: &[SetSpec], mask: u64) -> Vec<String> {
    crate::lovasz::mask_to_indices(mask).into_iter().map(|i| sets[i].id.clone()).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FrequencyStats {
    /// Maximum number of sets containing a common element.
    pub f: u32,
    /// `max_e C(f, r_e)` with the global `f`.
    pub b: u64,
}

/// A validated instance with dense indices and its cost oracle. Immutable.
#[derive(Debug, Clone)]
pub struct Problem {
    instance: Instance,
    element_sets: Vec<u64>,
    set_members: Vec<Vec<usize>>,
    requirements: Vec<u32>,
    profits: Vec<Rational>,
    total_profit: Rational,
    oracle: CostOracle,
    set_index: HashMap<String, usize>,
    element_index: HashMap<String, usize>,
}

impl Problem {
    pub fn new(instance: Instance) -> Result<Problem, InstanceError> {
        Problem::with_config(instance, ValidationConfig::default())
    }

    pub fn with_config(instance: Instance, config: ValidationConfig) -> Result<Problem, InstanceError> {
        let report = validate(&instance, config);
        if !report.is_valid() {
            return Err(InstanceError::Invalid(report));
        }
        let element_index: HashMap<String, usize> =
            instance.elements.iter().enumerate().map(|(i, e)| (e.id.clone(), i)).collect();
        let set_index: HashMap<String, usize> =
            instance.sets.iter().enumerate().map(|(i, s)| (s.id.clone(), i)).collect();
        let mut element_sets = vec![0u64; instance.elements.len()];
        let mut set_members = Vec::with_capacity(instance.sets.len());
        for (j, s) in instance.sets.iter().enumerate() {
            let mut members: Vec<usize> = s.members.iter().map(|m| element_index[m]).collect();
            members.sort_unstable();
            for &e in &members {
                element_sets[e] |= 1 << j;
            }
            set_members.push(members);
        }
        let oracle = build_oracle(&instance, &set_index);
        Ok(Problem {
            requirements: instance.elements.iter().map(|e| e.requirement).collect(),
            profits: instance.elements.iter().map(|e| e.profit.clone()).collect(),
            total_profit: report.total_profit,
            instance,
            element_sets,
            set_members,
            oracle,
            set_index,
            element_index,
        })
    }

    pub fn from_json(text: &str) -> Result<Problem, InstanceError> {
        Problem::new(Instance::from_json(text)?)
    }

    pub fn instance(&self) -> &Instance {
        &self.instance
    }

    pub fn oracle(&self) -> &CostOracle {
        &self.oracle
    }

    pub fn num_elements(&self) -> usize {
        self.requirements.len()
    }

    pub fn num_sets(&self) -> usize {
        self.set_members.len()
    }

    pub fn q(&self) -> &Rational {
        &self.instance.q
    }

    pub fn total_profit(&self) -> &Rational {
        &self.total_profit
    }

    pub fn requirement(&self, element: usize) -> u32 {
        self.requirements[element]
    }

    pub fn requirements(&self) -> &[u32] {
        &self.requirements
    }

    pub fn profit(&self, element: usize) -> &Rational {
        &self.profits[element]
    }

    pub fn profits(&self) -> &[Rational] {
        &self.profits
    }

    /// Bitmask of the sets containing `element`.
    pub fn element_sets(&self, element: usize) -> u64 {
        self.element_sets[element]
    }

    pub fn set_members(&self, set: usize) -> &[usize] {
        &self.set_members[set]
    }

    pub fn frequency(&self, element: usize) -> u32 {
        self.element_sets[element].count_ones()
    }

    pub fn set_id(&self, set: usize) -> &str {
        &self.instance.sets[set].id
    }

    pub fn element_id(&self, element: usize) -> &str {
        &self.instance.elements[element].id
    }

    pub fn set_position(&self, id: &str) -> Option<usize> {
        self.set_index.get(id).copied()
    }

    pub fn element_position(&self, id: &str) -> Option<usize> {
        self.element_index.get(id).copied()
    }

    pub fn all_sets(&self) -> u64 {
        if self.num_sets() == 64 {
            u64::MAX
        } else {
            (1u64 << self.num_sets()) - 1
        }
    }

    pub fn mask_of<S: AsRef<str>>(&self, ids: &[S]) -> Result<u64, InstanceError> {
        ids.iter().try_fold(0u64, |m, id| {
            let id = id.as_ref();
            self.set_position(id).map(|j| m | 1 << j).ok_or_else(|| InstanceError::UnknownSet(id.to_string()))
        })
    }

    pub fn ids_of(&self, mask: u64) -> Vec<String> {
        ids_of_mask(&self.instance.sets, mask)
    }

    pub fn element_ids(&self, elements: &[usize]) -> Vec<String> {
        elements.iter().map(|&e| self.element_id(e).to_string()).collect()
    }

    /// Whether every requirement equals one.
    pub fn is_unit_requirement(&self) -> bool {
        self.requirements.iter().all(|&r| r == 1)
    }

    pub fn frequency_stats(&self) -> FrequencyStats {
        let f = (0..self.num_elements()).map(|e| self.frequency(e)).max().unwrap_or(0);
        let b = self.requirements.iter().map(|&r| binomial(f as u64, r as u64)).max().unwrap_or(0);
        FrequencyStats { f, b }
    }

    /// Normalized cost of a sub-collection given by set ids.
    pub fn cost_eval<S: AsRef<str>>(&self, ids: &[S]) -> Result<CostValue, InstanceError> {
        Ok(self.oracle.eval(self.mask_of(ids)?))
    }
}

fn build_oracle(instance: &Instance, set_index: &HashMap<String, usize>) -> CostOracle {
    let n = instance.sets.len();
    match &instance.cost {
        CostSpec::Linear { weights } => {
            CostOracle::linear(instance.sets.iter().map(|s| weights[&s.id].clone()).collect())
        }
        CostSpec::ConcaveCardinality { scale, exponent } => CostOracle::concave_cardinality(n, *scale, *exponent),
        CostSpec::ExplicitTable { monotone, .. } => {
            let index: HashMap<&str, usize> = set_index.iter().map(|(k, v)| (k.as_str(), *v)).collect();
            let mut sink = Vec::new();
            let values = table_values(instance, &index, &mut sink).expect("validated table");
            CostOracle::table(n, values, *monotone)
        }
    }
}

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::model::{Model, Signature};
use super::StructureError;

/// Outcome of the single-relation (set-reception, broadcast) model check:
/// the signature must have exactly one binary symbol whose interpretation is
/// symmetric and irreflexive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SbReport {
    pub violations: Vec<SbViolation>,
}

impl SbReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SbViolation {
    NotSingleBinaryRelation { count: usize },
    Reflexive { node: String },
    MissingSymmetric { from: String, to: String },
}

impl fmt::Display for SbViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SbViolation::NotSingleBinaryRelation { count } => {
                write!(f, "expected exactly one binary relation, found {count}")
            }
            SbViolation::Reflexive { node } => write!(f, "irreflexivity at {node}"),
            SbViolation::MissingSymmetric { from, to } => {
                write!(f, "symmetry at ({from},{to}): reverse pair missing")
            }
        }
    }
}

/// Check that `model` is a valid single-relation broadcast structure.
/// Violations are data, not errors.
pub fn validate_sb(model: &Model) -> SbReport {
    let mut violations = Vec::new();
    let count = model.signature().binary().len();
    if count != 1 {
        violations.push(SbViolation::NotSingleBinaryRelation { count });
        return SbReport { violations };
    }
    for (from, to) in model.binary_pairs(0) {
        if from == to {
            violations.push(SbViolation::Reflexive {
                node: model.node_name(from).to_owned(),
            });
        } else if !model.has_edge_ix(0, to, from) {
            violations.push(SbViolation::MissingSymmetric {
                from: model.node_name(from).to_owned(),
                to: model.node_name(to).to_owned(),
            });
        }
    }
    SbReport { violations }
}

/// The node or ordered pair a port-numbering violation is attributed to.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Subject {
    Node(String),
    Pair(String, String),
}

impl fmt::Display for Subject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Subject::Node(n) => write!(f, "{n}"),
            Subject::Pair(u, v) => write!(f, "({u},{v})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PnViolation {
    /// Condition index, 1 through 7.
    pub condition: u8,
    pub subject: Subject,
    pub detail: String,
}

impl fmt::Display for PnViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "condition {} at {}: {}",
            self.condition, self.subject, self.detail
        )
    }
}

/// Outcome of the port-numbering structure check. Each offending node or pair
/// carries the first (lowest-numbered) condition it violates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PnReport {
    pub violations: Vec<PnViolation>,
}

impl PnReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn violated_conditions(&self) -> BTreeSet<u8> {
        self.violations.iter().map(|v| v.condition).collect()
    }
}

/// The expected vocabulary of a degree-`n` port-numbering structure:
/// unary symbols `P_0..P_n` and binary symbols `R_i_j` for i,j in 1..=n.
pub fn pn_signature(n: u32) -> Signature {
    let unary: Vec<String> = (0..=n).map(|i| format!("P_{i}")).collect();
    let mut binary = Vec::with_capacity((n * n) as usize);
    for i in 1..=n {
        for j in 1..=n {
            binary.push(format!("R_{i}_{j}"));
        }
    }
    Signature::new(unary, binary).expect("generated names are distinct")
}

/// Check the seven degree-`n` port-numbering conditions:
///
/// 1. the union of the `R_i_j` is symmetric and irreflexive;
/// 2. no ordered pair lies in two distinct relations;
/// 3. `R_i_j(u,v)` implies `R_j_i(v,u)`;
/// 4. each `R_i_j` has out- and in-degree at most one at each node;
/// 5. an out-port `i` at a node implies out-ports at every `k < i`;
/// 6. an in-port `j` at a node implies in-ports at every `k < j`;
/// 7. `P_i` holds at a node exactly when its union out-degree is `i`.
///
/// Symmetry failures of the union are attributed to the missing reverse pair,
/// so a pair present in some `R_i_j` without its port-swapped mirror shows up
/// under condition 3 at the pair itself.
pub fn validate_pn(model: &Model, n: u32) -> Result<PnReport, StructureError> {
    let expected = pn_signature(n);
    check_signature(model.signature(), &expected)?;

    // rel_ports[k] = (i, j) for the k-th binary symbol.
    let rel_ports: Vec<(u32, u32)> = (1..=n)
        .flat_map(|i| (1..=n).map(move |j| (i, j)))
        .collect();
    let rel_of = |i: u32, j: u32| -> usize { ((i - 1) * n + (j - 1)) as usize };

    // Keyed by subject; kept at the lowest violating condition.
    let mut found: BTreeMap<Subject, PnViolation> = BTreeMap::new();
    let mut record = |subject: Subject, condition: u8, detail: String| {
        let slot = found.entry(subject.clone()).or_insert(PnViolation {
            condition,
            subject,
            detail: detail.clone(),
        });
        if condition < slot.condition {
            slot.condition = condition;
            slot.detail = detail;
        }
    };

    let name = |id| model.node_name(id).to_owned();

    // Union of all relations, as ordered pairs.
    let mut union: BTreeSet<(u32, u32)> = BTreeSet::new();
    for rel in 0..rel_ports.len() {
        for (f, t) in model.binary_pairs(rel) {
            union.insert((f.index() as u32, t.index() as u32));
        }
    }

    // Condition 1: union symmetric and irreflexive.
    for &(f, t) in &union {
        let (fu, tu) = (crate::structures::NodeId(f), crate::structures::NodeId(t));
        if f == t {
            record(
                Subject::Pair(name(fu), name(tu)),
                1,
                "union relation has a reflexive pair".into(),
            );
        } else if !union.contains(&(t, f)) {
            record(
                Subject::Pair(name(tu), name(fu)),
                1,
                format!(
                    "union relation contains ({},{}) but not ({},{})",
                    name(fu),
                    name(tu),
                    name(tu),
                    name(fu)
                ),
            );
        }
    }

    // Condition 2: a pair lies in at most one relation.
    let mut owner: BTreeMap<(u32, u32), usize> = BTreeMap::new();
    for rel in 0..rel_ports.len() {
        for (f, t) in model.binary_pairs(rel) {
            let key = (f.index() as u32, t.index() as u32);
            if let Some(&prev) = owner.get(&key) {
                record(
                    Subject::Pair(name(f), name(t)),
                    2,
                    format!(
                        "pair lies in both {} and {}",
                        model.signature().binary()[prev],
                        model.signature().binary()[rel]
                    ),
                );
            } else {
                owner.insert(key, rel);
            }
        }
    }

    // Condition 3: R_i_j(u,v) implies R_j_i(v,u).
    for (rel, &(i, j)) in rel_ports.iter().enumerate() {
        for (f, t) in model.binary_pairs(rel) {
            let mirror = rel_of(j, i);
            if !model.has_edge_ix(mirror, t, f) {
                record(
                    Subject::Pair(name(f), name(t)),
                    3,
                    format!(
                        "R_{i}_{j}({},{}) without R_{j}_{i}({},{})",
                        name(f),
                        name(t),
                        name(t),
                        name(f)
                    ),
                );
            }
        }
    }

    // Condition 4: per-relation out- and in-degree at most one.
    for (rel, &(i, j)) in rel_ports.iter().enumerate() {
        for node in model.nodes() {
            let out = model.successors_ix(rel, node).len();
            if out > 1 {
                record(
                    Subject::Node(name(node)),
                    4,
                    format!("out-degree {out} in R_{i}_{j}"),
                );
            }
            let inn = model.predecessors_ix(rel, node).len();
            if inn > 1 {
                record(
                    Subject::Node(name(node)),
                    4,
                    format!("in-degree {inn} in R_{i}_{j}"),
                );
            }
        }
    }

    // Out-ports and in-ports in use at each node.
    let num_nodes = model.len();
    let mut out_ports: Vec<BTreeSet<u32>> = vec![BTreeSet::new(); num_nodes];
    let mut in_ports: Vec<BTreeSet<u32>> = vec![BTreeSet::new(); num_nodes];
    for (rel, &(i, j)) in rel_ports.iter().enumerate() {
        for (f, t) in model.binary_pairs(rel) {
            out_ports[f.index()].insert(i);
            in_ports[t.index()].insert(j);
        }
    }

    // Conditions 5 and 6: ports are used consecutively from 1.
    for (rel, &(i, j)) in rel_ports.iter().enumerate() {
        for (f, t) in model.binary_pairs(rel) {
            for k in 1..i {
                if !out_ports[f.index()].contains(&k) {
                    record(
                        Subject::Pair(name(f), name(t)),
                        5,
                        format!(
                            "R_{i}_{j}({},{}) but no R_{k}_l edge leaves {}",
                            name(f),
                            name(t),
                            name(f)
                        ),
                    );
                }
            }
            for k in 1..j {
                if !in_ports[t.index()].contains(&k) {
                    record(
                        Subject::Pair(name(f), name(t)),
                        6,
                        format!(
                            "R_{i}_{j}({},{}) but no R_l_{k} edge enters {}",
                            name(f),
                            name(t),
                            name(t)
                        ),
                    );
                }
            }
        }
    }

    // Condition 7: P_i membership matches union out-degree.
    for node in model.nodes() {
        let ix = node.index() as u32;
        let degree = union.iter().filter(|&&(f, _)| f == ix).count() as u32;
        for i in 0..=n {
            let labelled = model.has_label_ix(i as usize, node);
            if labelled && i != degree {
                record(
                    Subject::Node(name(node)),
                    7,
                    format!("labelled P_{i} but union out-degree is {degree}"),
                );
            }
            if !labelled && i == degree {
                record(
                    Subject::Node(name(node)),
                    7,
                    format!("union out-degree {degree} but P_{degree} does not hold"),
                );
            }
        }
    }

    let mut violations: Vec<PnViolation> = found.into_values().collect();
    violations.sort_by(|a, b| (a.condition, &a.subject).cmp(&(b.condition, &b.subject)));
    Ok(PnReport { violations })
}

fn check_signature(actual: &Signature, expected: &Signature) -> Result<(), StructureError> {
    let actual_syms: BTreeSet<&String> =
        actual.unary().iter().chain(actual.binary().iter()).collect();
    let expected_syms: BTreeSet<&String> = expected
        .unary()
        .iter()
        .chain(expected.binary().iter())
        .collect();
    if actual_syms == expected_syms
        && actual.unary().len() == expected.unary().len()
        && actual.binary().len() == expected.binary().len()
    {
        return Ok(());
    }
    let missing: Vec<&str> = expected_syms
        .difference(&actual_syms)
        .map(|s| s.as_str())
        .collect();
    let extra: Vec<&str> = actual_syms
        .difference(&expected_syms)
        .map(|s| s.as_str())
        .collect();
    Err(StructureError::SignatureMismatch(format!(
        "missing symbols [{}], extra symbols [{}]",
        missing.join(", "),
        extra.join(", ")
    )))
}

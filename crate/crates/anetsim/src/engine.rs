//! Synchronous execution of message-passing automata over models.
//!
//! An automaton is placed at every node. Round 0 assigns each node the
//! initial state for its label set. In every later round each node gathers,
//! per binary symbol, the deduplicated set of messages emitted by its
//! successors under that symbol, and applies the transition function.
//! Messages are sets, never multisets: two successors emitting the same
//! message are indistinguishable from one.
//!
//! Runs are capped: the engine executes a fixed number of rounds and records
//! every configuration in a [`Trace`]. An automaton may keep changing state
//! after reaching an accepting or rejecting state, so verdict scanning always
//! inspects the whole trace; whether a final state actually persists is a
//! separate trace predicate ([`Trace::final_state_persists`]).

use std::cell::RefCell;
use std::collections::BTreeSet;
use std::fmt::Debug;
use std::hash::Hash;
use std::io::Write;

use thiserror::Error;

use crate::logic::{TypeId, TypeTable};
use crate::structures::{Model, NodeId, PointedModel, Signature, StructureError};

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("automaton and model use different signatures")]
    SignatureMismatch,
    #[error("automaton execution needs at least one binary relation symbol")]
    NoBinaryRelations,
    #[error("accepting and rejecting sets overlap on {0} ids")]
    OverlappingFinalSets(usize),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error("trace I/O failed: {0}")]
    Io(#[from] std::io::Error),
}

/// Behavioral interface of a message-passing automaton: an initial state per
/// label set, a transition on per-relation received message sets, a message
/// per relation, and accepting/rejecting state predicates. All functions are
/// pure; accepting and rejecting must be disjoint.
pub trait Automaton {
    type State: Clone + Eq + Hash + Debug;
    type Message: Clone + Ord + Eq + Hash + Debug;

    fn signature(&self) -> &Signature;

    /// The round-0 state of a node whose label set (unary-symbol indices in
    /// signature order) is `labels`.
    fn init(&self, labels: &BTreeSet<usize>) -> Self::State;

    /// The next state given the per-relation received message sets (indexed
    /// like the signature's binary symbols) and the current state.
    fn transit(&self, received: &[BTreeSet<Self::Message>], current: &Self::State)
        -> Self::State;

    /// The message a node in `state` broadcasts along the given relation.
    fn emit(&self, state: &Self::State, rel_ix: usize) -> Self::Message;

    fn is_accepting(&self, state: &Self::State) -> bool;

    fn is_rejecting(&self, state: &Self::State) -> bool;

    /// Stable one-line rendering used by trace export.
    fn render_state(&self, state: &Self::State) -> String;
}

/// The states of every node after some round.
#[derive(Debug, Clone)]
pub struct Configuration<S> {
    pub round: usize,
    pub states: Vec<S>,
}

impl<S> Configuration<S> {
    pub fn state(&self, node: NodeId) -> &S {
        &self.states[node.index()]
    }
}

/// Outcome at one node: the first accepting round with no earlier rejecting
/// state, the first rejecting round with no earlier accepting state, or
/// neither within the cap.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Accept { round: usize },
    Reject { round: usize },
    Undecided { cap: usize },
}

impl Verdict {
    pub fn is_decided(&self) -> bool {
        !matches!(self, Verdict::Undecided { .. })
    }

    pub fn round(&self) -> Option<usize> {
        match self {
            Verdict::Accept { round } | Verdict::Reject { round } => Some(*round),
            Verdict::Undecided { .. } => None,
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Verdict::Accept { round } => write!(f, "accept({round})"),
            Verdict::Reject { round } => write!(f, "reject({round})"),
            Verdict::Undecided { cap } => write!(f, "undecided({cap})"),
        }
    }
}

impl serde::Serialize for Verdict {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = serializer.serialize_map(Some(2))?;
        match self {
            Verdict::Accept { round } => {
                map.serialize_entry("outcome", "accept")?;
                map.serialize_entry("round", round)?;
            }
            Verdict::Reject { round } => {
                map.serialize_entry("outcome", "reject")?;
                map.serialize_entry("round", round)?;
            }
            Verdict::Undecided { cap } => {
                map.serialize_entry("outcome", "undecided")?;
                map.serialize_entry("cap", cap)?;
            }
        }
        map.end()
    }
}

/// The full run of an automaton on a model: configurations for rounds
/// `0..=cap`.
#[derive(Debug)]
pub struct Trace<'a, A: Automaton> {
    model: &'a Model,
    automaton: &'a A,
    configurations: Vec<Configuration<A::State>>,
}

impl<'a, A: Automaton> Trace<'a, A> {
    pub fn model(&self) -> &'a Model {
        self.model
    }

    pub fn cap(&self) -> usize {
        self.configurations.len() - 1
    }

    pub fn configurations(&self) -> &[Configuration<A::State>] {
        &self.configurations
    }

    pub fn state(&self, round: usize, node: NodeId) -> &A::State {
        self.configurations[round].state(node)
    }

    /// Scan rounds in order: the first accepting state with no earlier
    /// rejecting state yields an accept, the first rejecting state with no
    /// earlier accepting state a reject.
    pub fn verdict(&self, node: NodeId) -> Verdict {
        let mut seen_accepting = false;
        let mut seen_rejecting = false;
        for config in &self.configurations {
            let state = config.state(node);
            let accepting = self.automaton.is_accepting(state);
            let rejecting = self.automaton.is_rejecting(state);
            debug_assert!(
                !(accepting && rejecting),
                "accepting and rejecting must be disjoint"
            );
            if accepting && !seen_rejecting {
                return Verdict::Accept {
                    round: config.round,
                };
            }
            if rejecting && !seen_accepting {
                return Verdict::Reject {
                    round: config.round,
                };
            }
            seen_accepting |= accepting;
            seen_rejecting |= rejecting;
        }
        Verdict::Undecided { cap: self.cap() }
    }

    /// Whether every accepting or rejecting state reached at `node` persists
    /// unchanged for the rest of the trace.
    pub fn final_state_persists(&self, node: NodeId) -> bool {
        let states: Vec<&A::State> = self
            .configurations
            .iter()
            .map(|c| c.state(node))
            .collect();
        for (round, state) in states.iter().enumerate() {
            if self.automaton.is_accepting(state) || self.automaton.is_rejecting(state) {
                return states[round..].iter().all(|s| *s == *state);
            }
        }
        true
    }

    /// Write the trace as JSON lines, one record per round:
    /// `{"round": n, "states": {node: rendered-state}}` with nodes in domain
    /// order.
    pub fn write_jsonl(&self, out: &mut dyn Write) -> Result<(), EngineError> {
        for config in &self.configurations {
            let mut line = String::new();
            line.push_str(&format!("{{\"round\": {}, \"states\": {{", config.round));
            for (i, node) in self.model.nodes().enumerate() {
                if i > 0 {
                    line.push_str(", ");
                }
                let name = serde_json::to_string(self.model.node_name(node))
                    .expect("string serializes");
                let state = serde_json::to_string(
                    &self.automaton.render_state(config.state(node)),
                )
                .expect("string serializes");
                line.push_str(&format!("{name}: {state}"));
            }
            line.push_str("}}\n");
            out.write_all(line.as_bytes())?;
        }
        Ok(())
    }
}

fn check_compatible<A: Automaton>(model: &Model, automaton: &A) -> Result<(), EngineError> {
    if automaton.signature() != model.signature() {
        return Err(EngineError::SignatureMismatch);
    }
    if model.signature().binary().is_empty() {
        return Err(EngineError::NoBinaryRelations);
    }
    Ok(())
}

/// The round-0 configuration: each node starts in the initial state for its
/// label set.
pub fn init_configuration<A: Automaton>(
    model: &Model,
    automaton: &A,
) -> Result<Configuration<A::State>, EngineError> {
    check_compatible(model, automaton)?;
    let states = model
        .nodes()
        .map(|node| automaton.init(&model.labels(node)))
        .collect();
    Ok(Configuration { round: 0, states })
}

/// One synchronous round: for every node and every binary symbol, gather the
/// set of messages emitted by the node's successors under that symbol, then
/// apply the transition.
pub fn step<A: Automaton>(
    model: &Model,
    automaton: &A,
    config: &Configuration<A::State>,
) -> Configuration<A::State> {
    let rel_count = model.signature().binary().len();
    let mut received: Vec<BTreeSet<A::Message>> = vec![BTreeSet::new(); rel_count];
    let states = model
        .nodes()
        .map(|node| {
            for (rel, set) in received.iter_mut().enumerate() {
                set.clear();
                for &v in model.successors_ix(rel, node) {
                    set.insert(automaton.emit(&config.states[v as usize], rel));
                }
            }
            automaton.transit(&received, config.state(node))
        })
        .collect();
    Configuration {
        round: config.round + 1,
        states,
    }
}

/// Run `automaton` on `model` for exactly `cap` rounds, recording every
/// configuration.
pub fn run<'a, A: Automaton>(
    model: &'a Model,
    automaton: &'a A,
    cap: usize,
) -> Result<Trace<'a, A>, EngineError> {
    let mut configurations = Vec::with_capacity(cap + 1);
    configurations.push(init_configuration(model, automaton)?);
    for _ in 0..cap {
        let next = step(model, automaton, configurations.last().expect("nonempty"));
        configurations.push(next);
    }
    Ok(Trace {
        model,
        automaton,
        configurations,
    })
}

/// The smallest round by which every pointed model in `family` is accepted
/// or rejected, provided all of them decide within `cap` rounds. The empty
/// family has effective running time 0.
pub fn effective_running_time<A: Automaton>(
    automaton: &A,
    family: &[PointedModel],
    cap: usize,
) -> Result<Option<usize>, EngineError> {
    let mut worst = 0usize;
    for pm in family {
        let trace = run(pm.model, automaton, cap)?;
        match trace.verdict(pm.point) {
            Verdict::Accept { round } | Verdict::Reject { round } => worst = worst.max(round),
            Verdict::Undecided { .. } => return Ok(None),
        }
    }
    Ok(Some(worst))
}

/// Result of a type-determines-state probe: when the two points share a
/// level-`n` type (computed in one table over the disjoint union of their
/// models), `holds` says whether the automaton's states at the two points
/// coincided at every round up to `n`. When the types differ the probe is
/// inapplicable and holds vacuously.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TypeStateCheck {
    pub applicable: bool,
    pub holds: bool,
}

/// Check that sharing a level-`n` type forces an automaton to walk through
/// identical states at two points for the first `n` rounds.
pub fn check_type_determines_state<A: Automaton>(
    m1: &PointedModel,
    m2: &PointedModel,
    n: usize,
    automaton: &A,
) -> Result<TypeStateCheck, EngineError> {
    let (union, left, right) = Model::disjoint_union(m1.model, m2.model)?;
    let mut table = TypeTable::new(union.signature().clone());
    let ids = crate::logic::compute_types(&union, n as u32, &mut table)
        .map_err(|_| EngineError::SignatureMismatch)?;
    let t1 = ids[left[m1.point.index()].index()];
    let t2 = ids[right[m2.point.index()].index()];
    if t1 != t2 {
        return Ok(TypeStateCheck {
            applicable: false,
            holds: true,
        });
    }
    let trace1 = run(m1.model, automaton, n)?;
    let trace2 = run(m2.model, automaton, n)?;
    let holds =
        (0..=n).all(|round| trace1.state(round, m1.point) == trace2.state(round, m2.point));
    Ok(TypeStateCheck {
        applicable: true,
        holds,
    })
}

/// The automaton whose state at a node after `n` rounds is the node's
/// level-`n` type id: the initial state is the level-0 type of the label
/// set, each transition refines the current id with the received id sets,
/// and every state is broadcast unchanged. Accepting and rejecting are
/// arbitrary disjoint id sets chosen at construction.
pub struct TypeAutomaton {
    signature: Signature,
    accepting: BTreeSet<TypeId>,
    rejecting: BTreeSet<TypeId>,
    table: RefCell<TypeTable>,
}

impl TypeAutomaton {
    pub fn table(&self) -> std::cell::Ref<'_, TypeTable> {
        self.table.borrow()
    }

    pub fn into_table(self) -> TypeTable {
        self.table.into_inner()
    }
}

/// Build a type automaton over `table`'s signature with the given accepting
/// and rejecting id sets, which must be disjoint.
pub fn make_type_automaton(
    accepting: BTreeSet<TypeId>,
    rejecting: BTreeSet<TypeId>,
    table: TypeTable,
) -> Result<TypeAutomaton, EngineError> {
    let overlap = accepting.intersection(&rejecting).count();
    if overlap > 0 {
        return Err(EngineError::OverlappingFinalSets(overlap));
    }
    Ok(TypeAutomaton {
        signature: table.signature().clone(),
        accepting,
        rejecting,
        table: RefCell::new(table),
    })
}

impl Automaton for TypeAutomaton {
    type State = TypeId;
    type Message = TypeId;

    fn signature(&self) -> &Signature {
        &self.signature
    }

    fn init(&self, labels: &BTreeSet<usize>) -> TypeId {
        self.table.borrow_mut().base_type(labels)
    }

    fn transit(&self, received: &[BTreeSet<TypeId>], current: &TypeId) -> TypeId {
        let children = received
            .iter()
            .map(|set| set.iter().copied().collect())
            .collect();
        self.table
            .borrow_mut()
            .refine_type(*current, children)
            .expect("current id was produced by this table")
    }

    fn emit(&self, state: &TypeId, _rel_ix: usize) -> TypeId {
        *state
    }

    fn is_accepting(&self, state: &TypeId) -> bool {
        self.accepting.contains(state)
    }

    fn is_rejecting(&self, state: &TypeId) -> bool {
        self.rejecting.contains(state)
    }

    fn render_state(&self, state: &TypeId) -> String {
        state.to_string()
    }
}

/// A pure automaton with no meaningful structure: states and messages are
/// 64-bit digests mixed from the inputs. Deterministic across runs and
/// platforms; useful for exercising engine properties with "arbitrary"
/// behaviour.
pub struct ScrambleAutomaton {
    signature: Signature,
    seed: u64,
}

impl ScrambleAutomaton {
    pub fn new(signature: Signature, seed: u64) -> Self {
        ScrambleAutomaton { signature, seed }
    }
}

const FNV_OFFSET: u64 = 0xcbf29ce484222325;
const FNV_PRIME: u64 = 0x100000001b3;

fn fnv_mix(acc: u64, value: u64) -> u64 {
    let mut acc = acc;
    for byte in value.to_le_bytes() {
        acc ^= u64::from(byte);
        acc = acc.wrapping_mul(FNV_PRIME);
    }
    acc
}

impl Automaton for ScrambleAutomaton {
    type State = u64;
    type Message = u64;

    fn signature(&self) -> &Signature {
        &self.signature
    }

    fn init(&self, labels: &BTreeSet<usize>) -> u64 {
        let mut acc = fnv_mix(FNV_OFFSET, self.seed);
        for &ix in labels {
            acc = fnv_mix(acc, ix as u64 + 1);
        }
        acc
    }

    fn transit(&self, received: &[BTreeSet<u64>], current: &u64) -> u64 {
        let mut acc = fnv_mix(FNV_OFFSET, *current);
        for (rel, set) in received.iter().enumerate() {
            acc = fnv_mix(acc, rel as u64 ^ 0xa5a5);
            for &message in set {
                acc = fnv_mix(acc, message);
            }
        }
        acc
    }

    fn emit(&self, state: &u64, rel_ix: usize) -> u64 {
        fnv_mix(fnv_mix(FNV_OFFSET, *state), rel_ix as u64)
    }

    fn is_accepting(&self, state: &u64) -> bool {
        state & 0xF == 0
    }

    fn is_rejecting(&self, state: &u64) -> bool {
        state & 0xF == 1
    }

    fn render_state(&self, state: &u64) -> String {
        format!("{state:016x}")
    }
}

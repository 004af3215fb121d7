//! Modal and first-order formulas over a relational vocabulary, their
//! finite-model semantics, the standard translation from modal into
//! first-order logic, and the modal type machinery built by neighbourhood
//! refinement (see [`types`]).

mod parse;
pub mod types;

pub use parse::{parse_fo_formula, parse_modal_formula, FormulaParseError};
pub use types::{compute_type_levels, compute_types, type_to_formula, TypeId, TypeTable};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::structures::{Model, NodeId, PointedModel};

#[derive(Debug, Error)]
pub enum LogicError {
    #[error("unknown unary symbol '{0}'")]
    UnknownUnarySymbol(String),
    #[error("unknown binary symbol '{0}'")]
    UnknownBinarySymbol(String),
    #[error("free variable '{0}' is not assigned")]
    UnassignedVariable(String),
    #[error("node '{0}' is not in the model's domain")]
    UnknownNode(String),
    #[error("type id {0} is not in the table")]
    InvalidTypeId(u32),
    #[error("signature mismatch: {0}")]
    SignatureMismatch(String),
}

/// A modal formula: truth, a unary symbol, negation, conjunction, or a
/// diamond step along a binary symbol.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ModalFormula {
    Top,
    Prop(String),
    Not(Box<ModalFormula>),
    And(Box<ModalFormula>, Box<ModalFormula>),
    Diamond(String, Box<ModalFormula>),
}

impl ModalFormula {
    pub fn not(phi: ModalFormula) -> ModalFormula {
        ModalFormula::Not(Box::new(phi))
    }

    pub fn and(lhs: ModalFormula, rhs: ModalFormula) -> ModalFormula {
        ModalFormula::And(Box::new(lhs), Box::new(rhs))
    }

    pub fn diamond(rel: impl Into<String>, phi: ModalFormula) -> ModalFormula {
        ModalFormula::Diamond(rel.into(), Box::new(phi))
    }

    pub fn prop(sym: impl Into<String>) -> ModalFormula {
        ModalFormula::Prop(sym.into())
    }

    /// Number of constructors in the tree.
    pub fn size(&self) -> usize {
        match self {
            ModalFormula::Top | ModalFormula::Prop(_) => 1,
            ModalFormula::Not(p) | ModalFormula::Diamond(_, p) => 1 + p.size(),
            ModalFormula::And(l, r) => 1 + l.size() + r.size(),
        }
    }
}

impl fmt::Display for ModalFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModalFormula::Top => write!(f, "T"),
            ModalFormula::Prop(p) => write!(f, "{p}"),
            ModalFormula::Not(p) => write!(f, "~{p}"),
            ModalFormula::And(l, r) => write!(f, "({l} & {r})"),
            ModalFormula::Diamond(rel, p) => write!(f, "<{rel}>{p}"),
        }
    }
}

/// The nesting depth of diamonds: 0 for truth and unary symbols, transparent
/// through negation, the maximum over conjunctions, and one more than the
/// body for a diamond.
pub fn modal_depth(phi: &ModalFormula) -> usize {
    match phi {
        ModalFormula::Top | ModalFormula::Prop(_) => 0,
        ModalFormula::Not(p) => modal_depth(p),
        ModalFormula::And(l, r) => modal_depth(l).max(modal_depth(r)),
        ModalFormula::Diamond(_, p) => modal_depth(p) + 1,
    }
}

/// Resolved form of a modal formula: symbols replaced by signature indices.
enum ResolvedModal {
    Top,
    Prop(usize),
    Not(Box<ResolvedModal>),
    And(Box<ResolvedModal>, Box<ResolvedModal>),
    Diamond(usize, Box<ResolvedModal>),
}

fn resolve_modal(model: &Model, phi: &ModalFormula) -> Result<ResolvedModal, LogicError> {
    Ok(match phi {
        ModalFormula::Top => ResolvedModal::Top,
        ModalFormula::Prop(sym) => ResolvedModal::Prop(
            model
                .signature()
                .unary_index(sym)
                .ok_or_else(|| LogicError::UnknownUnarySymbol(sym.clone()))?,
        ),
        ModalFormula::Not(p) => ResolvedModal::Not(Box::new(resolve_modal(model, p)?)),
        ModalFormula::And(l, r) => ResolvedModal::And(
            Box::new(resolve_modal(model, l)?),
            Box::new(resolve_modal(model, r)?),
        ),
        ModalFormula::Diamond(rel, p) => ResolvedModal::Diamond(
            model
                .signature()
                .binary_index(rel)
                .ok_or_else(|| LogicError::UnknownBinarySymbol(rel.clone()))?,
            Box::new(resolve_modal(model, p)?),
        ),
    })
}

fn eval_resolved(model: &Model, node: NodeId, phi: &ResolvedModal) -> bool {
    match phi {
        ResolvedModal::Top => true,
        ResolvedModal::Prop(ix) => model.has_label_ix(*ix, node),
        ResolvedModal::Not(p) => !eval_resolved(model, node, p),
        ResolvedModal::And(l, r) => {
            eval_resolved(model, node, l) && eval_resolved(model, node, r)
        }
        ResolvedModal::Diamond(rel, p) => model
            .successor_nodes(*rel, node)
            .any(|v| eval_resolved(model, v, p)),
    }
}

/// Truth of `phi` at the pointed model, by the usual clauses: a diamond
/// `<R>psi` holds at `w` when some `R`-successor of `w` satisfies `psi`.
pub fn eval_modal(pm: &PointedModel, phi: &ModalFormula) -> Result<bool, LogicError> {
    let resolved = resolve_modal(pm.model, phi)?;
    Ok(eval_resolved(pm.model, pm.point, &resolved))
}

/// Truth of `phi` at every node at once, bottom-up over subformulas.
/// Agrees with [`eval_modal`] pointwise; the two are cross-checked in tests.
pub fn eval_modal_all(model: &Model, phi: &ModalFormula) -> Result<Vec<bool>, LogicError> {
    let resolved = resolve_modal(model, phi)?;
    if model.len() <= 64 {
        let mut unary_masks = Vec::with_capacity(model.signature().unary().len());
        for ix in 0..model.signature().unary().len() {
            let mut mask = 0u64;
            for n in model.unary_members(ix) {
                mask |= 1 << n.index();
            }
            unary_masks.push(mask);
        }
        let full = if model.len() == 64 {
            u64::MAX
        } else {
            (1u64 << model.len()) - 1
        };
        let mask = eval_mask(model, &unary_masks, full, &resolved);
        Ok((0..model.len()).map(|i| mask >> i & 1 == 1).collect())
    } else {
        Ok(model
            .nodes()
            .map(|n| eval_resolved(model, n, &resolved))
            .collect())
    }
}

fn eval_mask(model: &Model, unary_masks: &[u64], full: u64, phi: &ResolvedModal) -> u64 {
    match phi {
        ResolvedModal::Top => full,
        ResolvedModal::Prop(ix) => unary_masks[*ix],
        ResolvedModal::Not(p) => full & !eval_mask(model, unary_masks, full, p),
        ResolvedModal::And(l, r) => {
            eval_mask(model, unary_masks, full, l) & eval_mask(model, unary_masks, full, r)
        }
        ResolvedModal::Diamond(rel, p) => {
            let body = eval_mask(model, unary_masks, full, p);
            let mut mask = 0u64;
            for node in model.nodes() {
                if model
                    .successors_ix(*rel, node)
                    .iter()
                    .any(|&v| body >> v & 1 == 1)
                {
                    mask |= 1 << node.index();
                }
            }
            mask
        }
    }
}

/// A first-order formula over the same vocabulary, with equality and
/// existential quantification. Variables are plain identifiers.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum FoFormula {
    Top,
    Eq(String, String),
    Pred(String, String),
    Rel(String, String, String),
    Not(Box<FoFormula>),
    And(Box<FoFormula>, Box<FoFormula>),
    Exists(String, Box<FoFormula>),
}

impl FoFormula {
    pub fn not(phi: FoFormula) -> FoFormula {
        FoFormula::Not(Box::new(phi))
    }

    pub fn and(lhs: FoFormula, rhs: FoFormula) -> FoFormula {
        FoFormula::And(Box::new(lhs), Box::new(rhs))
    }

    pub fn exists(var: impl Into<String>, phi: FoFormula) -> FoFormula {
        FoFormula::Exists(var.into(), Box::new(phi))
    }

    /// Variables occurring free in the formula.
    pub fn free_variables(&self) -> BTreeSet<String> {
        fn walk(phi: &FoFormula, bound: &mut Vec<String>, free: &mut BTreeSet<String>) {
            fn record(var: &String, bound: &[String], free: &mut BTreeSet<String>) {
                if !bound.contains(var) {
                    free.insert(var.clone());
                }
            }
            match phi {
                FoFormula::Top => {}
                FoFormula::Eq(x, y) => {
                    record(x, bound, free);
                    record(y, bound, free);
                }
                FoFormula::Pred(_, x) => record(x, bound, free),
                FoFormula::Rel(_, x, y) => {
                    record(x, bound, free);
                    record(y, bound, free);
                }
                FoFormula::Not(p) => walk(p, bound, free),
                FoFormula::And(l, r) => {
                    walk(l, bound, free);
                    walk(r, bound, free);
                }
                FoFormula::Exists(x, p) => {
                    bound.push(x.clone());
                    walk(p, bound, free);
                    bound.pop();
                }
            }
        }
        let mut free = BTreeSet::new();
        walk(self, &mut Vec::new(), &mut free);
        free
    }
}

impl fmt::Display for FoFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FoFormula::Top => write!(f, "T"),
            FoFormula::Eq(x, y) => write!(f, "{x}={y}"),
            FoFormula::Pred(p, x) => write!(f, "{p}({x})"),
            FoFormula::Rel(r, x, y) => write!(f, "{r}({x},{y})"),
            FoFormula::Not(p) => write!(f, "~{p}"),
            FoFormula::And(l, r) => write!(f, "({l} & {r})"),
            FoFormula::Exists(x, p) => write!(f, "exists {x} {p}"),
        }
    }
}

/// A partial map from variables to nodes of one model.
#[derive(Debug, Clone, Default)]
pub struct Assignment {
    map: BTreeMap<String, NodeId>,
}

impl Assignment {
    pub fn new() -> Self {
        Assignment::default()
    }

    pub fn bind(mut self, var: impl Into<String>, node: NodeId) -> Self {
        self.map.insert(var.into(), node);
        self
    }

    pub fn get(&self, var: &str) -> Option<NodeId> {
        self.map.get(var).copied()
    }
}

/// Truth of `phi` in `model` under `assignment`. Every free variable of the
/// formula must be assigned, and every symbol must be in the signature.
pub fn eval_fo(
    model: &Model,
    assignment: &Assignment,
    phi: &FoFormula,
) -> Result<bool, LogicError> {
    for var in phi.free_variables() {
        match assignment.get(&var) {
            Some(node) if node.index() < model.len() => {}
            Some(_) => return Err(LogicError::UnknownNode(var)),
            None => return Err(LogicError::UnassignedVariable(var)),
        }
    }
    check_fo_symbols(model, phi)?;
    let mut scope: Vec<(String, NodeId)> = assignment
        .map
        .iter()
        .map(|(k, v)| (k.clone(), *v))
        .collect();
    Ok(eval_fo_scoped(model, &mut scope, phi))
}

fn check_fo_symbols(model: &Model, phi: &FoFormula) -> Result<(), LogicError> {
    match phi {
        FoFormula::Top | FoFormula::Eq(..) => Ok(()),
        FoFormula::Pred(sym, _) => model
            .signature()
            .unary_index(sym)
            .map(|_| ())
            .ok_or_else(|| LogicError::UnknownUnarySymbol(sym.clone())),
        FoFormula::Rel(sym, _, _) => model
            .signature()
            .binary_index(sym)
            .map(|_| ())
            .ok_or_else(|| LogicError::UnknownBinarySymbol(sym.clone())),
        FoFormula::Not(p) | FoFormula::Exists(_, p) => check_fo_symbols(model, p),
        FoFormula::And(l, r) => {
            check_fo_symbols(model, l)?;
            check_fo_symbols(model, r)
        }
    }
}

fn lookup(scope: &[(String, NodeId)], var: &str) -> NodeId {
    scope
        .iter()
        .rev()
        .find(|(name, _)| name == var)
        .map(|(_, node)| *node)
        .expect("free variables checked before evaluation")
}

fn eval_fo_scoped(model: &Model, scope: &mut Vec<(String, NodeId)>, phi: &FoFormula) -> bool {
    match phi {
        FoFormula::Top => true,
        FoFormula::Eq(x, y) => lookup(scope, x) == lookup(scope, y),
        FoFormula::Pred(sym, x) => {
            let ix = model.signature().unary_index(sym).expect("checked");
            model.has_label_ix(ix, lookup(scope, x))
        }
        FoFormula::Rel(sym, x, y) => {
            let ix = model.signature().binary_index(sym).expect("checked");
            model.has_edge_ix(ix, lookup(scope, x), lookup(scope, y))
        }
        FoFormula::Not(p) => !eval_fo_scoped(model, scope, p),
        FoFormula::And(l, r) => {
            eval_fo_scoped(model, scope, l) && eval_fo_scoped(model, scope, r)
        }
        FoFormula::Exists(x, p) => {
            for node in model.nodes() {
                scope.push((x.clone(), node));
                let holds = eval_fo_scoped(model, scope, p);
                scope.pop();
                if holds {
                    return true;
                }
            }
            false
        }
    }
}

/// The standard translation of a modal formula into first-order logic with
/// one free variable `var`: unary symbols become predicates of the current
/// variable and a diamond `<R>psi` becomes `exists y (R(x,y) & St_y(psi))`.
/// Fresh variables are drawn deterministically as `y_0, y_1, ...`, skipping
/// any name equal to `var`.
pub fn standard_translation(phi: &ModalFormula, var: &str) -> FoFormula {
    let mut counter = 0usize;
    translate(phi, var, &mut counter)
}

fn fresh_var(avoid: &str, counter: &mut usize) -> String {
    loop {
        let candidate = format!("y_{counter}");
        *counter += 1;
        if candidate != avoid {
            return candidate;
        }
    }
}

fn translate(phi: &ModalFormula, var: &str, counter: &mut usize) -> FoFormula {
    match phi {
        ModalFormula::Top => FoFormula::Top,
        ModalFormula::Prop(sym) => FoFormula::Pred(sym.clone(), var.to_owned()),
        ModalFormula::Not(p) => FoFormula::not(translate(p, var, counter)),
        ModalFormula::And(l, r) => {
            let left = translate(l, var, counter);
            let right = translate(r, var, counter);
            FoFormula::and(left, right)
        }
        ModalFormula::Diamond(rel, p) => {
            let y = fresh_var(var, counter);
            let body = translate(p, &y, counter);
            FoFormula::exists(
                y.clone(),
                FoFormula::and(FoFormula::Rel(rel.clone(), var.to_owned(), y), body),
            )
        }
    }
}

/// Whether the two pointed models give `phi` the same truth value. The two
/// models must share a signature.
pub fn agree_on_formula(
    m1: &PointedModel,
    m2: &PointedModel,
    phi: &ModalFormula,
) -> Result<bool, LogicError> {
    if m1.model.signature() != m2.model.signature() {
        return Err(LogicError::SignatureMismatch(
            "agreement check requires equal signatures".into(),
        ));
    }
    Ok(eval_modal(m1, phi)? == eval_modal(m2, phi)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structures::Signature;

    fn two_node_model() -> Model {
        let sig = Signature::new(["P"], ["R"]).unwrap();
        Model::new(
            sig,
            vec!["a".into(), "b".into()],
            &[("P".into(), vec!["b".into()])],
            &[("R".into(), vec![("a".into(), "b".into())])],
        )
        .unwrap()
    }

    #[test]
    fn modal_depth_clauses() {
        assert_eq!(modal_depth(&ModalFormula::prop("P")), 0);
        let phi = ModalFormula::diamond("R", ModalFormula::diamond("R", ModalFormula::prop("P")));
        assert_eq!(modal_depth(&phi), 2);
        let phi = ModalFormula::not(ModalFormula::and(
            ModalFormula::prop("P"),
            ModalFormula::diamond("R", ModalFormula::Top),
        ));
        assert_eq!(modal_depth(&phi), 1);
    }

    #[test]
    fn eval_modal_clauses() {
        let m = two_node_model();
        let at_a = m.pointed("a").unwrap();
        let at_b = m.pointed("b").unwrap();
        let diamond_p = ModalFormula::diamond("R", ModalFormula::prop("P"));
        assert!(eval_modal(&at_a, &diamond_p).unwrap());
        let diamond_top = ModalFormula::diamond("R", ModalFormula::Top);
        assert!(!eval_modal(&at_b, &diamond_top).unwrap());
        assert!(eval_modal(&at_a, &ModalFormula::Top).unwrap());
        assert!(eval_modal(&at_b, &ModalFormula::Top).unwrap());
    }

    #[test]
    fn eval_modal_rejects_unknown_symbols() {
        let m = two_node_model();
        let at_a = m.pointed("a").unwrap();
        assert!(eval_modal(&at_a, &ModalFormula::prop("Q")).is_err());
        assert!(eval_modal(&at_a, &ModalFormula::diamond("S", ModalFormula::Top)).is_err());
    }

    #[test]
    fn eval_fo_clauses() {
        let sig = Signature::new(["P"], ["R"]).unwrap();
        let single = Model::new(
            sig,
            vec!["a".into()],
            &[("P".into(), vec!["a".into()])],
            &[],
        )
        .unwrap();
        let f = Assignment::new().bind("x", single.node("a").unwrap());
        assert!(eval_fo(&single, &f, &FoFormula::Pred("P".into(), "x".into())).unwrap());

        let m = two_node_model();
        let f = Assignment::new()
            .bind("x", m.node("a").unwrap())
            .bind("y", m.node("b").unwrap());
        assert!(!eval_fo(&m, &f, &FoFormula::Eq("x".into(), "y".into())).unwrap());

        let f = Assignment::new().bind("x", m.node("a").unwrap());
        let exists = FoFormula::exists("y", FoFormula::Rel("R".into(), "x".into(), "y".into()));
        assert!(eval_fo(&m, &f, &exists).unwrap());
    }

    #[test]
    fn eval_fo_requires_free_variables() {
        let m = two_node_model();
        let err = eval_fo(
            &m,
            &Assignment::new(),
            &FoFormula::Pred("P".into(), "x".into()),
        )
        .unwrap_err();
        assert!(matches!(err, LogicError::UnassignedVariable(_)));
    }

    #[test]
    fn translation_clauses() {
        assert_eq!(standard_translation(&ModalFormula::Top, "x"), FoFormula::Top);
        assert_eq!(
            standard_translation(&ModalFormula::not(ModalFormula::prop("P")), "x"),
            FoFormula::not(FoFormula::Pred("P".into(), "x".into()))
        );
        let phi = ModalFormula::diamond("R", ModalFormula::prop("P"));
        assert_eq!(
            standard_translation(&phi, "x"),
            FoFormula::exists(
                "y_0",
                FoFormula::and(
                    FoFormula::Rel("R".into(), "x".into(), "y_0".into()),
                    FoFormula::Pred("P".into(), "y_0".into())
                )
            )
        );
    }

    #[test]
    fn translation_avoids_variable_capture() {
        let phi = ModalFormula::diamond("R", ModalFormula::prop("P"));
        let translated = standard_translation(&phi, "y_0");
        assert_eq!(translated.to_string(), "exists y_1 (R(y_0,y_1) & P(y_1))");
    }

    #[test]
    fn agreement_examples() {
        let m = two_node_model();
        let at_a = m.pointed("a").unwrap();
        let at_b = m.pointed("b").unwrap();
        let p = ModalFormula::prop("P");
        assert!(agree_on_formula(&at_a, &at_a, &p).unwrap());
        assert!(!agree_on_formula(&at_a, &at_b, &p).unwrap());
    }

    #[test]
    fn eval_modal_all_matches_pointwise() {
        let m = two_node_model();
        let phi = ModalFormula::and(
            ModalFormula::diamond("R", ModalFormula::prop("P")),
            ModalFormula::not(ModalFormula::prop("P")),
        );
        let all = eval_modal_all(&m, &phi).unwrap();
        for node in m.nodes() {
            let pm = m.pointed_at(node);
            assert_eq!(all[node.index()], eval_modal(&pm, &phi).unwrap());
        }
    }
}

//! Modal types as hash-consed DAG records.
//!
//! A level-0 record is the set of unary symbols holding at a node; a
//! level-(n+1) record pairs the node's own level-n type with, per binary
//! symbol, the set of level-n types realized by its successors. Structurally
//! identical records receive the same [`TypeId`], so two nodes share a
//! level-n id exactly when they satisfy the same depth-n type formula.
//!
//! Records are never expanded internally; [`type_to_formula`] materializes
//! the canonical conjunction on demand. Expanded type formulas grow
//! super-exponentially with the level, which is why the table stores DAG
//! records and why the negative conjuncts of a materialized formula range
//! over the types realized in the table (all subsets of the unary vocabulary
//! are pre-interned at level 0, so level-1 formulas match the textbook shape
//! exactly). Formulas produced from equal ids are identical trees.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::structures::{Model, Signature};

use super::{LogicError, ModalFormula};

/// Handle to a record in a [`TypeTable`]. Ids are only canonical within the
/// table that produced them; cross-model comparison therefore computes both
/// models' types in one shared table (usually over their disjoint union).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TypeId(u32);

impl TypeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for TypeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "t{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Record {
    /// Level 0: bitmask over the signature's unary symbols.
    Base(u32),
    /// Level n+1: the node's own level-n id plus, per binary symbol, the
    /// sorted set of level-n ids realized by its successors.
    Refine {
        prev: TypeId,
        children: Box<[Box<[TypeId]>]>,
    },
}

/// Append-only, hash-consing store of type records over one signature.
#[derive(Debug, Clone)]
pub struct TypeTable {
    signature: Signature,
    records: Vec<Record>,
    levels: Vec<u32>,
    index: HashMap<Record, TypeId>,
    by_level: Vec<Vec<TypeId>>,
}

impl TypeTable {
    /// Create a table for `signature`, pre-interning all level-0 types (one
    /// per subset of the unary symbols, in bitmask order). The unary
    /// vocabulary is capped at 20 symbols to keep that enumeration sane.
    pub fn new(signature: Signature) -> Self {
        assert!(
            signature.unary().len() <= 20,
            "type tables support at most 20 unary symbols"
        );
        let mut table = TypeTable {
            signature,
            records: Vec::new(),
            levels: Vec::new(),
            index: HashMap::new(),
            by_level: vec![Vec::new()],
        };
        for mask in 0..(1u32 << table.signature.unary().len()) {
            table.intern(Record::Base(mask), 0);
        }
        table
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn level(&self, t: TypeId) -> Result<u32, LogicError> {
        self.levels
            .get(t.index())
            .copied()
            .ok_or(LogicError::InvalidTypeId(t.0))
    }

    /// Ids interned so far at `level`, in interning (= id) order.
    pub fn ids_at_level(&self, level: u32) -> &[TypeId] {
        self.by_level
            .get(level as usize)
            .map(|v| v.as_slice())
            .unwrap_or(&[])
    }

    fn intern(&mut self, record: Record, level: u32) -> TypeId {
        if let Some(&id) = self.index.get(&record) {
            return id;
        }
        let id = TypeId(self.records.len() as u32);
        self.records.push(record.clone());
        self.levels.push(level);
        self.index.insert(record, id);
        if self.by_level.len() <= level as usize {
            self.by_level.resize(level as usize + 1, Vec::new());
        }
        self.by_level[level as usize].push(id);
        id
    }

    /// The level-0 id for the given set of unary-symbol indices.
    pub fn base_type(&mut self, labels: &BTreeSet<usize>) -> TypeId {
        let mut mask = 0u32;
        for &ix in labels {
            debug_assert!(ix < self.signature.unary().len());
            mask |= 1 << ix;
        }
        self.intern(Record::Base(mask), 0)
    }

    /// The refined id for a node with own type `prev` whose successors
    /// realize `children_per_rel[i]` under the i-th binary symbol. The input
    /// sets are deduplicated and sorted; all children are expected one level
    /// below `prev`'s successor level.
    pub fn refine_type(
        &mut self,
        prev: TypeId,
        children_per_rel: Vec<Vec<TypeId>>,
    ) -> Result<TypeId, LogicError> {
        let prev_level = self.level(prev)?;
        debug_assert_eq!(children_per_rel.len(), self.signature.binary().len());
        let mut children = Vec::with_capacity(children_per_rel.len());
        for mut ids in children_per_rel {
            ids.sort_unstable();
            ids.dedup();
            for &id in &ids {
                debug_assert_eq!(self.level(id).ok(), Some(prev_level));
            }
            children.push(ids.into_boxed_slice());
        }
        Ok(self.intern(
            Record::Refine {
                prev,
                children: children.into_boxed_slice(),
            },
            prev_level + 1,
        ))
    }

    /// Compact one-line rendering of a record, for listings and traces.
    pub fn render(&self, t: TypeId) -> Result<String, LogicError> {
        match self.records.get(t.index()) {
            None => Err(LogicError::InvalidTypeId(t.0)),
            Some(Record::Base(mask)) => {
                let labels: Vec<&str> = self
                    .signature
                    .unary()
                    .iter()
                    .enumerate()
                    .filter(|(ix, _)| mask >> ix & 1 == 1)
                    .map(|(_, s)| s.as_str())
                    .collect();
                Ok(format!("{t} = {{{}}}", labels.join(",")))
            }
            Some(Record::Refine { prev, children }) => {
                let parts: Vec<String> = self
                    .signature
                    .binary()
                    .iter()
                    .zip(children.iter())
                    .map(|(sym, ids)| {
                        let ids: Vec<String> = ids.iter().map(|i| i.to_string()).collect();
                        format!("{sym}:{{{}}}", ids.join(","))
                    })
                    .collect();
                Ok(format!("{t} = ({prev}; {})", parts.join("; ")))
            }
        }
    }

    /// All records reachable from `t`, rendered one per line in id order.
    pub fn render_dag(&self, t: TypeId) -> Result<String, LogicError> {
        let mut reachable = BTreeSet::new();
        let mut stack = vec![t];
        while let Some(id) = stack.pop() {
            if !reachable.insert(id) {
                continue;
            }
            if let Some(Record::Refine { prev, children }) = self.records.get(id.index()) {
                stack.push(*prev);
                for ids in children.iter() {
                    stack.extend(ids.iter().copied());
                }
            } else if self.records.get(id.index()).is_none() {
                return Err(LogicError::InvalidTypeId(id.0));
            }
        }
        let lines: Vec<String> = reachable
            .iter()
            .map(|&id| self.render(id))
            .collect::<Result<_, _>>()?;
        Ok(lines.join("\n"))
    }

    /// Size of the fully expanded formula for `t`, saturating.
    pub fn formula_size(&self, t: TypeId) -> Result<u64, LogicError> {
        let mut memo: HashMap<TypeId, u64> = HashMap::new();
        self.formula_size_memo(t, &mut memo)
    }

    fn formula_size_memo(
        &self,
        t: TypeId,
        memo: &mut HashMap<TypeId, u64>,
    ) -> Result<u64, LogicError> {
        if let Some(&s) = memo.get(&t) {
            return Ok(s);
        }
        let record = self
            .records
            .get(t.index())
            .ok_or(LogicError::InvalidTypeId(t.0))?
            .clone();
        let size = match record {
            Record::Base(mask) => {
                let n = self.signature.unary().len() as u64;
                if n == 0 {
                    1
                } else {
                    // one leaf per symbol, plus negations, plus the And spine
                    let negs = n - u64::from(mask.count_ones());
                    n + negs + (n - 1)
                }
            }
            Record::Refine { prev, children } => {
                let mut conjuncts: u64 = 1;
                let mut total = self.formula_size_memo(prev, memo)?;
                let level = self.levels[t.index()] - 1;
                for present in children.iter() {
                    for &c in present.iter() {
                        total = total
                            .saturating_add(self.formula_size_memo(c, memo)?.saturating_add(1));
                        conjuncts += 1;
                    }
                    for c in self.ids_at_level(level).to_vec() {
                        if !present.contains(&c) {
                            total = total.saturating_add(
                                self.formula_size_memo(c, memo)?.saturating_add(2),
                            );
                            conjuncts += 1;
                        }
                    }
                }
                total.saturating_add(conjuncts - 1)
            }
        };
        memo.insert(t, size);
        Ok(size)
    }
}

/// Per-node type ids of every level `0..=level`, refined one level per step:
/// level 0 groups nodes by their exact label set, and level m+1 combines a
/// node's level-m id with the level-m ids its successors realize.
pub fn compute_type_levels(
    model: &Model,
    level: u32,
    table: &mut TypeTable,
) -> Result<Vec<Vec<TypeId>>, LogicError> {
    if model.signature() != table.signature() {
        return Err(LogicError::SignatureMismatch(
            "model and type table use different signatures".into(),
        ));
    }
    let rel_count = model.signature().binary().len();
    let mut current: Vec<TypeId> = model
        .nodes()
        .map(|node| table.base_type(&model.labels(node)))
        .collect();
    let mut levels = vec![current.clone()];
    for _ in 0..level {
        let next: Vec<TypeId> = model
            .nodes()
            .map(|node| {
                let children: Vec<Vec<TypeId>> = (0..rel_count)
                    .map(|rel| {
                        model
                            .successors_ix(rel, node)
                            .iter()
                            .map(|&v| current[v as usize])
                            .collect()
                    })
                    .collect();
                table.refine_type(current[node.index()], children)
            })
            .collect::<Result<_, _>>()?;
        levels.push(next.clone());
        current = next;
    }
    Ok(levels)
}

/// Per-node type ids at exactly `level`. See [`compute_type_levels`].
pub fn compute_types(
    model: &Model,
    level: u32,
    table: &mut TypeTable,
) -> Result<Vec<TypeId>, LogicError> {
    Ok(compute_type_levels(model, level, table)?
        .pop()
        .expect("at least level 0"))
}

/// Materialize the canonical formula of a type: at level 0 the conjunction of
/// the node's labels and the negations of the rest (in signature order, empty
/// conjunction = T); at level n+1 the level-n formula conjoined with positive
/// diamonds for the child types present and negative diamonds for every other
/// level-n type in the table, per relation, in table-id order.
pub fn type_to_formula(t: TypeId, table: &TypeTable) -> Result<ModalFormula, LogicError> {
    let mut memo: HashMap<TypeId, ModalFormula> = HashMap::new();
    formula_memo(t, table, &mut memo)
}

fn conjoin(conjuncts: Vec<ModalFormula>) -> ModalFormula {
    let mut iter = conjuncts.into_iter();
    match iter.next() {
        None => ModalFormula::Top,
        Some(first) => iter.fold(first, ModalFormula::and),
    }
}

fn formula_memo(
    t: TypeId,
    table: &TypeTable,
    memo: &mut HashMap<TypeId, ModalFormula>,
) -> Result<ModalFormula, LogicError> {
    if let Some(f) = memo.get(&t) {
        return Ok(f.clone());
    }
    let record = table
        .records
        .get(t.index())
        .ok_or(LogicError::InvalidTypeId(t.0))?;
    let formula = match record {
        Record::Base(mask) => {
            let mut conjuncts = Vec::new();
            for (ix, sym) in table.signature.unary().iter().enumerate() {
                if mask >> ix & 1 == 1 {
                    conjuncts.push(ModalFormula::prop(sym.clone()));
                }
            }
            for (ix, sym) in table.signature.unary().iter().enumerate() {
                if mask >> ix & 1 == 0 {
                    conjuncts.push(ModalFormula::not(ModalFormula::prop(sym.clone())));
                }
            }
            conjoin(conjuncts)
        }
        Record::Refine { prev, children } => {
            let prev = *prev;
            let children = children.clone();
            let child_level = table.level(t)? - 1;
            let mut conjuncts = vec![formula_memo(prev, table, memo)?];
            for (rel_ix, present) in children.iter().enumerate() {
                let rel = table.signature.binary()[rel_ix].clone();
                for &c in present.iter() {
                    let body = formula_memo(c, table, memo)?;
                    conjuncts.push(ModalFormula::diamond(rel.clone(), body));
                }
                for &c in table.ids_at_level(child_level) {
                    if !present.contains(&c) {
                        let body = formula_memo(c, table, memo)?;
                        conjuncts.push(ModalFormula::not(ModalFormula::diamond(
                            rel.clone(),
                            body,
                        )));
                    }
                }
            }
            conjoin(conjuncts)
        }
    };
    memo.insert(t, formula.clone());
    Ok(formula)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structures::Model;

    fn sig_p() -> Signature {
        Signature::new(["P"], ["R"]).unwrap()
    }

    #[test]
    fn base_types_preinterned_in_mask_order() {
        let table = TypeTable::new(Signature::new(["P0", "P1"], ["R"]).unwrap());
        assert_eq!(table.ids_at_level(0).len(), 4);
        assert_eq!(table.len(), 4);
    }

    #[test]
    fn single_labelled_node_level_0() {
        let m = Model::new(
            sig_p(),
            vec!["w".into()],
            &[("P".into(), vec!["w".into()])],
            &[],
        )
        .unwrap();
        let mut table = TypeTable::new(sig_p());
        let ids = compute_types(&m, 0, &mut table).unwrap();
        let formula = type_to_formula(ids[0], &table).unwrap();
        assert_eq!(formula.to_string(), "P");
    }

    #[test]
    fn base_formula_orders_conjuncts_by_signature() {
        let sig = Signature::new(["P0", "P1"], ["R"]).unwrap();
        let mut table = TypeTable::new(sig);
        let t = table.base_type(&[0usize].into_iter().collect());
        assert_eq!(
            type_to_formula(t, &table).unwrap().to_string(),
            "(P0 & ~P1)"
        );
    }

    #[test]
    fn empty_vocabulary_base_type_is_top() {
        let sig = Signature::new::<String>([], []).unwrap();
        let mut table = TypeTable::new(sig);
        let t = table.base_type(&BTreeSet::new());
        assert_eq!(type_to_formula(t, &table).unwrap(), ModalFormula::Top);
    }

    #[test]
    fn reflexive_labelled_node_level_1() {
        let m = Model::new(
            sig_p(),
            vec!["w".into()],
            &[("P".into(), vec!["w".into()])],
            &[("R".into(), vec![("w".into(), "w".into())])],
        )
        .unwrap();
        let mut table = TypeTable::new(sig_p());
        let ids = compute_types(&m, 1, &mut table).unwrap();
        let formula = type_to_formula(ids[0], &table).unwrap();
        assert_eq!(formula.to_string(), "((P & <R>P) & ~<R>~P)");
    }

    #[test]
    fn bare_path_nodes_share_types_at_every_level() {
        let sig = Signature::new::<&str>([], ["R"]).unwrap();
        let m = Model::new(
            sig.clone(),
            vec!["a".into(), "b".into(), "c".into()],
            &[],
            &[(
                "R".into(),
                vec![
                    ("a".into(), "b".into()),
                    ("b".into(), "a".into()),
                    ("b".into(), "c".into()),
                    ("c".into(), "b".into()),
                ],
            )],
        )
        .unwrap();
        let mut table = TypeTable::new(sig);
        let levels = compute_type_levels(&m, 6, &mut table).unwrap();
        for ids in &levels {
            assert!(ids.iter().all(|&t| t == ids[0]), "levels: {levels:?}");
        }
    }

    #[test]
    fn refinement_only_splits_classes() {
        // A 4-node model where refinement separates nodes level by level.
        let sig = Signature::new::<&str>([], ["R"]).unwrap();
        let m = Model::new(
            sig.clone(),
            vec!["a".into(), "b".into(), "c".into(), "d".into()],
            &[],
            &[(
                "R".into(),
                vec![
                    ("a".into(), "b".into()),
                    ("b".into(), "c".into()),
                    ("c".into(), "d".into()),
                ],
            )],
        )
        .unwrap();
        let mut table = TypeTable::new(sig);
        let levels = compute_type_levels(&m, 5, &mut table).unwrap();
        for window in levels.windows(2) {
            let (coarse, fine) = (&window[0], &window[1]);
            for i in 0..coarse.len() {
                for j in 0..coarse.len() {
                    if fine[i] == fine[j] {
                        assert_eq!(coarse[i], coarse[j], "refinement must not merge");
                    }
                }
            }
        }
    }

    #[test]
    fn invalid_id_is_an_error() {
        let table = TypeTable::new(sig_p());
        assert!(type_to_formula(TypeId(999), &table).is_err());
        assert!(table.render(TypeId(999)).is_err());
    }

    #[test]
    fn unique_type_law_small_model() {
        let sig = sig_p();
        let m = Model::new(
            sig.clone(),
            vec!["a".into(), "b".into(), "c".into()],
            &[("P".into(), vec!["a".into()])],
            &[(
                "R".into(),
                vec![
                    ("a".into(), "b".into()),
                    ("b".into(), "c".into()),
                    ("c".into(), "a".into()),
                ],
            )],
        )
        .unwrap();
        let mut table = TypeTable::new(sig);
        for level in 0..=3u32 {
            let ids = compute_types(&m, level, &mut table).unwrap();
            for w in m.nodes() {
                let formula = type_to_formula(ids[w.index()], &table).unwrap();
                for v in m.nodes() {
                    let holds =
                        crate::logic::eval_modal(&m.pointed_at(v), &formula).unwrap();
                    assert_eq!(
                        holds,
                        ids[v.index()] == ids[w.index()],
                        "level {level}, type of {w} evaluated at {v}"
                    );
                }
            }
        }
    }

    #[test]
    fn formula_size_counts_nodes() {
        let mut table = TypeTable::new(sig_p());
        let t = table.base_type(&[0usize].into_iter().collect());
        let f = type_to_formula(t, &table).unwrap();
        assert_eq!(f.size() as u64, table.formula_size(t).unwrap());
    }
}

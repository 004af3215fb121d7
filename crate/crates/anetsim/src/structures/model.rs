use std::collections::{BTreeSet, HashMap};
use std::fmt;

use super::StructureError;

/// The vocabulary of a model: ordered lists of unary and binary relation
/// symbols. Symbol names are unique within and across the two lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Signature {
    unary: Vec<String>,
    binary: Vec<String>,
}

impl Signature {
    pub fn new<S: Into<String>>(
        unary: impl IntoIterator<Item = S>,
        binary: impl IntoIterator<Item = S>,
    ) -> Result<Self, StructureError> {
        let unary: Vec<String> = unary.into_iter().map(Into::into).collect();
        let binary: Vec<String> = binary.into_iter().map(Into::into).collect();
        let mut seen = BTreeSet::new();
        for sym in unary.iter().chain(binary.iter()) {
            if !seen.insert(sym.clone()) {
                return Err(StructureError::DuplicateSymbol(sym.clone()));
            }
        }
        Ok(Signature { unary, binary })
    }

    pub fn unary(&self) -> &[String] {
        &self.unary
    }

    pub fn binary(&self) -> &[String] {
        &self.binary
    }

    pub fn unary_index(&self, sym: &str) -> Option<usize> {
        self.unary.iter().position(|s| s == sym)
    }

    pub fn binary_index(&self, sym: &str) -> Option<usize> {
        self.binary.iter().position(|s| s == sym)
    }
}

/// Index of a node within a model's domain. Only meaningful for the model
/// that produced it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub(crate) u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A finite relational structure: a nonempty ordered domain of named nodes,
/// one node subset per unary symbol, and one set of ordered node pairs per
/// binary symbol. Immutable after construction.
#[derive(Debug, Clone)]
pub struct Model {
    signature: Signature,
    domain: Vec<String>,
    node_index: HashMap<String, u32>,
    unary: Vec<BTreeSet<u32>>,
    binary: Vec<BTreeSet<(u32, u32)>>,
    succ: Vec<Vec<Vec<u32>>>,
    pred: Vec<Vec<Vec<u32>>>,
}

impl Model {
    /// Build a model from name-based interpretations. Every listed symbol must
    /// belong to the signature; symbols without an entry get the empty
    /// interpretation. Duplicate nodes, pairs, or symbol entries are rejected.
    pub fn new(
        signature: Signature,
        domain: Vec<String>,
        unary_interp: &[(String, Vec<String>)],
        binary_interp: &[(String, Vec<(String, String)>)],
    ) -> Result<Self, StructureError> {
        if domain.is_empty() {
            return Err(StructureError::EmptyDomain);
        }
        let mut node_index = HashMap::with_capacity(domain.len());
        for (i, name) in domain.iter().enumerate() {
            if node_index.insert(name.clone(), i as u32).is_some() {
                return Err(StructureError::DuplicateNode(name.clone()));
            }
        }

        let mut unary = vec![BTreeSet::new(); signature.unary().len()];
        let mut seen_syms = BTreeSet::new();
        for (sym, members) in unary_interp {
            let ix = signature
                .unary_index(sym)
                .ok_or_else(|| StructureError::UnknownUnarySymbol(sym.clone()))?;
            if !seen_syms.insert(sym.clone()) {
                return Err(StructureError::DuplicateInterpretation(sym.clone()));
            }
            for node in members {
                let n = *node_index
                    .get(node)
                    .ok_or_else(|| StructureError::UnknownNode(node.clone()))?;
                if !unary[ix].insert(n) {
                    return Err(StructureError::DuplicateMember {
                        symbol: sym.clone(),
                        node: node.clone(),
                    });
                }
            }
        }

        let mut binary = vec![BTreeSet::new(); signature.binary().len()];
        let mut seen_syms = BTreeSet::new();
        for (sym, pairs) in binary_interp {
            let ix = signature
                .binary_index(sym)
                .ok_or_else(|| StructureError::UnknownBinarySymbol(sym.clone()))?;
            if !seen_syms.insert(sym.clone()) {
                return Err(StructureError::DuplicateInterpretation(sym.clone()));
            }
            for (from, to) in pairs {
                let f = *node_index
                    .get(from)
                    .ok_or_else(|| StructureError::UnknownNode(from.clone()))?;
                let t = *node_index
                    .get(to)
                    .ok_or_else(|| StructureError::UnknownNode(to.clone()))?;
                if !binary[ix].insert((f, t)) {
                    return Err(StructureError::DuplicatePair {
                        symbol: sym.clone(),
                        from: from.clone(),
                        to: to.clone(),
                    });
                }
            }
        }

        let n = domain.len();
        let mut succ = vec![vec![Vec::new(); n]; signature.binary().len()];
        let mut pred = vec![vec![Vec::new(); n]; signature.binary().len()];
        for (ix, pairs) in binary.iter().enumerate() {
            for &(f, t) in pairs {
                succ[ix][f as usize].push(t);
                pred[ix][t as usize].push(f);
            }
            // BTreeSet iteration is sorted by (from, to), so succ lists come
            // out in domain order already; pred lists need a sort.
            for list in pred[ix].iter_mut() {
                list.sort_unstable();
            }
        }

        Ok(Model {
            signature,
            domain,
            node_index,
            unary,
            binary,
            succ,
            pred,
        })
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn len(&self) -> usize {
        self.domain.len()
    }

    pub fn is_empty(&self) -> bool {
        false // the domain is nonempty by construction
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.domain.len() as u32).map(NodeId)
    }

    pub fn node_names(&self) -> &[String] {
        &self.domain
    }

    pub fn node_name(&self, node: NodeId) -> &str {
        &self.domain[node.index()]
    }

    pub fn node(&self, name: &str) -> Result<NodeId, StructureError> {
        self.node_index
            .get(name)
            .map(|&i| NodeId(i))
            .ok_or_else(|| StructureError::UnknownNode(name.to_owned()))
    }

    /// Whether `node` is in the interpretation of the unary symbol with the
    /// given index.
    pub fn has_label_ix(&self, sym_ix: usize, node: NodeId) -> bool {
        self.unary[sym_ix].contains(&node.0)
    }

    pub fn has_label(&self, sym: &str, node: NodeId) -> Result<bool, StructureError> {
        let ix = self
            .signature
            .unary_index(sym)
            .ok_or_else(|| StructureError::UnknownUnarySymbol(sym.to_owned()))?;
        Ok(self.has_label_ix(ix, node))
    }

    /// The set of unary-symbol indices holding at `node`, in signature order.
    pub fn labels(&self, node: NodeId) -> BTreeSet<usize> {
        (0..self.signature.unary().len())
            .filter(|&ix| self.has_label_ix(ix, node))
            .collect()
    }

    pub fn unary_members(&self, sym_ix: usize) -> impl Iterator<Item = NodeId> + '_ {
        self.unary[sym_ix].iter().map(|&i| NodeId(i))
    }

    pub fn binary_pairs(&self, sym_ix: usize) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.binary[sym_ix].iter().map(|&(f, t)| (NodeId(f), NodeId(t)))
    }

    pub fn has_edge_ix(&self, sym_ix: usize, from: NodeId, to: NodeId) -> bool {
        self.binary[sym_ix].contains(&(from.0, to.0))
    }

    /// Successors of `node` under the binary symbol with the given index,
    /// in domain order.
    pub fn successors_ix(&self, sym_ix: usize, node: NodeId) -> &[u32] {
        &self.succ[sym_ix][node.index()]
    }

    pub fn predecessors_ix(&self, sym_ix: usize, node: NodeId) -> &[u32] {
        &self.pred[sym_ix][node.index()]
    }

    pub fn successor_nodes(
        &self,
        sym_ix: usize,
        node: NodeId,
    ) -> impl Iterator<Item = NodeId> + '_ {
        self.succ[sym_ix][node.index()].iter().map(|&i| NodeId(i))
    }

    pub fn predecessor_nodes(
        &self,
        sym_ix: usize,
        node: NodeId,
    ) -> impl Iterator<Item = NodeId> + '_ {
        self.pred[sym_ix][node.index()].iter().map(|&i| NodeId(i))
    }

    /// Name-based successor query: the nodes `u` with `(node, u)` in the
    /// interpretation of `rel`, in domain order.
    pub fn successors(&self, rel: &str, node: &str) -> Result<Vec<&str>, StructureError> {
        let ix = self
            .signature
            .binary_index(rel)
            .ok_or_else(|| StructureError::UnknownBinarySymbol(rel.to_owned()))?;
        let w = self.node(node)?;
        Ok(self
            .successors_ix(ix, w)
            .iter()
            .map(|&i| self.domain[i as usize].as_str())
            .collect())
    }

    /// Name-based predecessor query: mirror of [`Model::successors`] with the
    /// pair order reversed.
    pub fn predecessors(&self, rel: &str, node: &str) -> Result<Vec<&str>, StructureError> {
        let ix = self
            .signature
            .binary_index(rel)
            .ok_or_else(|| StructureError::UnknownBinarySymbol(rel.to_owned()))?;
        let w = self.node(node)?;
        Ok(self
            .predecessors_ix(ix, w)
            .iter()
            .map(|&i| self.domain[i as usize].as_str())
            .collect())
    }

    pub fn pointed(&self, node: &str) -> Result<PointedModel<'_>, StructureError> {
        Ok(PointedModel {
            model: self,
            point: self.node(node)?,
        })
    }

    pub fn pointed_at(&self, point: NodeId) -> PointedModel<'_> {
        debug_assert!(point.index() < self.len());
        PointedModel { model: self, point }
    }

    /// Disjoint union of two models over the same signature. Node names are
    /// prefixed to keep the two halves apart; returns the union model and the
    /// two images of the original nodes.
    pub fn disjoint_union(
        left: &Model,
        right: &Model,
    ) -> Result<(Model, Vec<NodeId>, Vec<NodeId>), StructureError> {
        if left.signature != right.signature {
            return Err(StructureError::SignatureMismatch(
                "disjoint union requires equal signatures".into(),
            ));
        }
        let mut domain = Vec::with_capacity(left.len() + right.len());
        for name in &left.domain {
            domain.push(format!("l:{name}"));
        }
        for name in &right.domain {
            domain.push(format!("r:{name}"));
        }
        let rename = |side: char, m: &Model, set: &BTreeSet<u32>| -> Vec<String> {
            set.iter()
                .map(|&i| format!("{side}:{}", m.domain[i as usize]))
                .collect()
        };
        let unary_interp: Vec<(String, Vec<String>)> = left
            .signature
            .unary()
            .iter()
            .enumerate()
            .map(|(ix, sym)| {
                let mut members = rename('l', left, &left.unary[ix]);
                members.extend(rename('r', right, &right.unary[ix]));
                (sym.clone(), members)
            })
            .collect();
        let pairs = |side: char, m: &Model, set: &BTreeSet<(u32, u32)>| {
            set.iter()
                .map(|&(f, t)| {
                    (
                        format!("{side}:{}", m.domain[f as usize]),
                        format!("{side}:{}", m.domain[t as usize]),
                    )
                })
                .collect::<Vec<_>>()
        };
        let binary_interp: Vec<(String, Vec<(String, String)>)> = left
            .signature
            .binary()
            .iter()
            .enumerate()
            .map(|(ix, sym)| {
                let mut ps = pairs('l', left, &left.binary[ix]);
                ps.extend(pairs('r', right, &right.binary[ix]));
                (sym.clone(), ps)
            })
            .collect();
        let union = Model::new(
            left.signature.clone(),
            domain,
            &unary_interp,
            &binary_interp,
        )?;
        let left_ids = (0..left.len() as u32).map(NodeId).collect();
        let right_ids = (left.len() as u32..(left.len() + right.len()) as u32)
            .map(NodeId)
            .collect();
        Ok((union, left_ids, right_ids))
    }
}

/// A model together with a distinguished node at which acceptance or truth
/// is observed.
#[derive(Debug, Clone, Copy)]
pub struct PointedModel<'a> {
    pub model: &'a Model,
    pub point: NodeId,
}

impl<'a> PointedModel<'a> {
    pub fn point_name(&self) -> &str {
        self.model.node_name(self.point)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> Model {
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
    fn successors_follow_pairs() {
        let m = small();
        assert_eq!(m.successors("R", "a").unwrap(), vec!["b"]);
        assert_eq!(m.successors("R", "b").unwrap(), Vec::<&str>::new());
    }

    #[test]
    fn predecessors_mirror_successors() {
        let m = small();
        assert_eq!(m.predecessors("R", "b").unwrap(), vec!["a"]);
        assert_eq!(m.predecessors("R", "a").unwrap(), Vec::<&str>::new());
    }

    #[test]
    fn undirected_path_neighbours() {
        let sig = Signature::new(["P"], ["R"]).unwrap();
        let m = Model::new(
            sig,
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
        assert_eq!(m.successors("R", "b").unwrap(), vec!["a", "c"]);
        assert_eq!(m.predecessors("R", "b").unwrap(), vec!["a", "c"]);
    }

    #[test]
    fn rejects_duplicates_and_unknowns() {
        let sig = Signature::new(["P"], ["R"]).unwrap();
        assert!(matches!(
            Model::new(
                sig.clone(),
                vec!["a".into(), "a".into()],
                &[],
                &[]
            ),
            Err(StructureError::DuplicateNode(_))
        ));
        assert!(matches!(
            Model::new(
                sig.clone(),
                vec!["a".into()],
                &[("Q".into(), vec![])],
                &[]
            ),
            Err(StructureError::UnknownUnarySymbol(_))
        ));
        assert!(matches!(
            Model::new(
                sig.clone(),
                vec!["a".into()],
                &[("P".into(), vec!["x".into()])],
                &[]
            ),
            Err(StructureError::UnknownNode(_))
        ));
        assert!(matches!(
            Model::new(sig, vec![], &[], &[]),
            Err(StructureError::EmptyDomain)
        ));
    }

    #[test]
    fn signature_rejects_shared_names() {
        assert!(Signature::new(["P", "P"], ["R"]).is_err());
        assert!(Signature::new(["P"], ["P"]).is_err());
    }
}

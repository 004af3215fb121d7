use super::model::{Model, Signature};
use super::word::Word;
use super::StructureError;

/// The vocabulary used by labelled path and cycle graphs: bit labels P0/P1
/// and the three orientation labels Q1/Q2/Q3 over a single edge relation.
pub(crate) fn path_signature() -> Signature {
    Signature::new(["P0", "P1", "Q1", "Q2", "Q3"], ["R"]).expect("fixed signature")
}

fn q_interps(len: usize) -> Vec<(String, Vec<String>)> {
    (1..=3usize)
        .map(|j| {
            let members = (0..len)
                .filter(|i| i % 3 == (j - 1) % 3)
                .map(|i| i.to_string())
                .collect();
            (format!("Q{j}"), members)
        })
        .collect()
}

fn p_interps(word: &Word) -> Vec<(String, Vec<String>)> {
    (0..=1u8)
        .map(|bit| {
            let members = (0..word.len())
                .filter(|&i| word.bit(i) == bit)
                .map(|i| i.to_string())
                .collect();
            (format!("P{bit}"), members)
        })
        .collect()
}

/// A labelled path graph encoding the word `v`: nodes `0..v.len()-1` named by
/// index, symmetric edges between consecutive indices, `P0`/`P1` holding at
/// node `i` according to bit `i`, and `Qj` holding at `i` iff `i = j-1 mod 3`.
pub fn build_path_model(v: &Word) -> Result<Model, StructureError> {
    if v.is_empty() {
        return Err(StructureError::EmptyWord);
    }
    let len = v.len();
    let domain: Vec<String> = (0..len).map(|i| i.to_string()).collect();
    let mut unary = p_interps(v);
    unary.extend(q_interps(len));
    let mut edges = Vec::with_capacity(2 * len.saturating_sub(1));
    for i in 0..len.saturating_sub(1) {
        edges.push((i.to_string(), (i + 1).to_string()));
        edges.push(((i + 1).to_string(), i.to_string()));
    }
    Model::new(
        path_signature(),
        domain,
        &unary,
        &[("R".to_string(), edges)],
    )
}

/// A labelled cycle graph over the same vocabulary as [`build_path_model`]:
/// symmetric edges between consecutive indices mod `v.len()`, same P and Q
/// labelling scheme. Every node ends up properly labelled exactly when the
/// length is divisible by 3. Other proper cyclic labellings are rotations or
/// reflections of this one, hence isomorphic relabelings.
pub fn build_cycle_model(v: &Word) -> Result<Model, StructureError> {
    let len = v.len();
    if len < 3 {
        return Err(StructureError::CycleTooShort(len));
    }
    let domain: Vec<String> = (0..len).map(|i| i.to_string()).collect();
    let mut unary = p_interps(v);
    unary.extend(q_interps(len));
    let mut edges = Vec::with_capacity(2 * len);
    for i in 0..len {
        let j = (i + 1) % len;
        edges.push((i.to_string(), j.to_string()));
        edges.push((j.to_string(), i.to_string()));
    }
    Model::new(
        path_signature(),
        domain,
        &unary,
        &[("R".to_string(), edges)],
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structures::validate::validate_sb;

    fn members(m: &Model, sym: &str) -> Vec<String> {
        let ix = m.signature().unary_index(sym).unwrap();
        m.unary_members(ix)
            .map(|n| m.node_name(n).to_owned())
            .collect()
    }

    #[test]
    fn path_011_matches_definition() {
        let m = build_path_model(&"011".parse().unwrap()).unwrap();
        assert_eq!(m.node_names(), &["0", "1", "2"]);
        let rel = m.signature().binary_index("R").unwrap();
        let pairs: Vec<(String, String)> = m
            .binary_pairs(rel)
            .map(|(f, t)| (m.node_name(f).to_owned(), m.node_name(t).to_owned()))
            .collect();
        assert_eq!(
            pairs,
            vec![
                ("0".into(), "1".into()),
                ("1".into(), "0".into()),
                ("1".into(), "2".into()),
                ("2".into(), "1".into()),
            ]
        );
        assert_eq!(members(&m, "P0"), ["0"]);
        assert_eq!(members(&m, "P1"), ["1", "2"]);
        assert_eq!(members(&m, "Q1"), ["0"]);
        assert_eq!(members(&m, "Q2"), ["1"]);
        assert_eq!(members(&m, "Q3"), ["2"]);
    }

    #[test]
    fn path_single_node() {
        let m = build_path_model(&"0".parse().unwrap()).unwrap();
        assert_eq!(m.len(), 1);
        assert_eq!(m.successors("R", "0").unwrap(), Vec::<&str>::new());
        assert_eq!(members(&m, "P0"), ["0"]);
        assert_eq!(members(&m, "Q1"), ["0"]);
    }

    #[test]
    fn path_0110_q_labels_cycle() {
        let m = build_path_model(&"0110".parse().unwrap()).unwrap();
        assert_eq!(members(&m, "Q1"), ["0", "3"]);
        assert_eq!(members(&m, "Q2"), ["1"]);
        assert_eq!(members(&m, "Q3"), ["2"]);
    }

    #[test]
    fn path_rejects_empty_word() {
        assert!(build_path_model(&Word::from_bits([]).unwrap()).is_err());
    }

    #[test]
    fn paths_are_sb_models() {
        for k in 1..=24 {
            let w = crate::structures::thue_morse_prefix(k).unwrap();
            let m = build_path_model(&w).unwrap();
            assert!(validate_sb(&m).ok(), "path of length {k}");
        }
    }

    #[test]
    fn each_node_has_one_p_and_one_q_label() {
        let m = build_path_model(&"011010".parse().unwrap()).unwrap();
        for node in m.nodes() {
            let p_count = ["P0", "P1"]
                .iter()
                .filter(|s| m.has_label(s, node).unwrap())
                .count();
            let q_count = ["Q1", "Q2", "Q3"]
                .iter()
                .filter(|s| m.has_label(s, node).unwrap())
                .count();
            assert_eq!(p_count, 1);
            assert_eq!(q_count, 1);
        }
    }

    #[test]
    fn cycle_edges_wrap() {
        let m = build_cycle_model(&"011".parse().unwrap()).unwrap();
        assert_eq!(m.successors("R", "0").unwrap(), vec!["1", "2"]);
        assert!(validate_sb(&m).ok());
        assert!(build_cycle_model(&"01".parse().unwrap()).is_err());
    }
}

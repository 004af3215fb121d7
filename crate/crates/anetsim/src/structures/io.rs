use std::collections::BTreeSet;
use std::fmt;

use serde::de::{Deserializer, MapAccess, Visitor};
use serde::Deserialize;
use serde_json::{json, Map, Value};

use super::model::{Model, Signature};
use super::StructureError;

/// JSON object entries in document order, duplicates included. The standard
/// map collections silently collapse repeated keys; the loader must reject
/// them instead.
struct Entries(Vec<(String, Value)>);

impl<'de> Deserialize<'de> for Entries {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct EntriesVisitor;

        impl<'de> Visitor<'de> for EntriesVisitor {
            type Value = Entries;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a JSON object")
            }

            fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> Result<Self::Value, A::Error> {
                let mut entries = Vec::new();
                while let Some((key, value)) = map.next_entry::<String, Value>()? {
                    entries.push((key, value));
                }
                Ok(Entries(entries))
            }
        }

        deserializer.deserialize_map(EntriesVisitor)
    }
}

#[derive(Deserialize)]
struct RawSignature {
    unary: Vec<String>,
    binary: Vec<String>,
}

#[derive(Deserialize)]
struct RawFile {
    signature: RawSignature,
    domain: Vec<String>,
    #[serde(default = "empty_entries")]
    unary_interp: Entries,
    #[serde(default = "empty_entries")]
    binary_interp: Entries,
}

fn empty_entries() -> Entries {
    Entries(Vec::new())
}

fn parse_err(path: impl Into<String>, message: impl Into<String>) -> StructureError {
    StructureError::Parse {
        path: path.into(),
        message: message.into(),
    }
}

/// Parse a model from its JSON file representation. Arrays preserve order;
/// duplicate symbols, nodes, pairs, or object keys are rejected, as are
/// references to symbols or nodes that were not declared.
pub fn load_model(text: &str) -> Result<Model, StructureError> {
    let raw: RawFile =
        serde_json::from_str(text).map_err(|e| parse_err("$", e.to_string()))?;

    let signature = Signature::new(raw.signature.unary, raw.signature.binary)
        .map_err(|e| parse_err("signature", e.to_string()))?;

    let domain_set: BTreeSet<&String> = raw.domain.iter().collect();
    if domain_set.len() != raw.domain.len() {
        return Err(parse_err("domain", "duplicate node"));
    }

    let mut unary_interp: Vec<(String, Vec<String>)> = Vec::new();
    let mut seen = BTreeSet::new();
    for (sym, value) in raw.unary_interp.0 {
        let path = format!("unary_interp.{sym}");
        if signature.unary_index(&sym).is_none() {
            return Err(parse_err(path, "unknown unary symbol"));
        }
        if !seen.insert(sym.clone()) {
            return Err(parse_err(path, "duplicate symbol entry"));
        }
        let members = value
            .as_array()
            .ok_or_else(|| parse_err(&path, "expected an array of node names"))?;
        let mut names = Vec::with_capacity(members.len());
        for (i, member) in members.iter().enumerate() {
            let name = member
                .as_str()
                .ok_or_else(|| parse_err(format!("{path}[{i}]"), "expected a node name"))?;
            if !domain_set.contains(&name.to_string()) {
                return Err(parse_err(
                    format!("{path}[{i}]"),
                    format!("unknown node '{name}'"),
                ));
            }
            names.push(name.to_owned());
        }
        let distinct: BTreeSet<&String> = names.iter().collect();
        if distinct.len() != names.len() {
            return Err(parse_err(path, "duplicate node in interpretation"));
        }
        unary_interp.push((sym, names));
    }

    let mut binary_interp: Vec<(String, Vec<(String, String)>)> = Vec::new();
    let mut seen = BTreeSet::new();
    for (sym, value) in raw.binary_interp.0 {
        let path = format!("binary_interp.{sym}");
        if signature.binary_index(&sym).is_none() {
            return Err(parse_err(path, "unknown binary symbol"));
        }
        if !seen.insert(sym.clone()) {
            return Err(parse_err(path, "duplicate symbol entry"));
        }
        let entries = value
            .as_array()
            .ok_or_else(|| parse_err(&path, "expected an array of node pairs"))?;
        let mut pairs = Vec::with_capacity(entries.len());
        for (i, entry) in entries.iter().enumerate() {
            let pair_path = format!("{path}[{i}]");
            let pair = entry
                .as_array()
                .filter(|a| a.len() == 2)
                .ok_or_else(|| parse_err(&pair_path, "expected a [from, to] pair"))?;
            let mut ends = Vec::with_capacity(2);
            for end in pair {
                let name = end
                    .as_str()
                    .ok_or_else(|| parse_err(&pair_path, "expected a node name"))?;
                if !domain_set.contains(&name.to_string()) {
                    return Err(parse_err(&pair_path, format!("unknown node '{name}'")));
                }
                ends.push(name.to_owned());
            }
            pairs.push((ends.remove(0), ends.remove(0)));
        }
        let distinct: BTreeSet<&(String, String)> = pairs.iter().collect();
        if distinct.len() != pairs.len() {
            return Err(parse_err(path, "duplicate pair in interpretation"));
        }
        binary_interp.push((sym, pairs));
    }

    Model::new(signature, raw.domain, &unary_interp, &binary_interp)
        .map_err(|e| parse_err("$", e.to_string()))
}

/// Serialize a model to its canonical JSON file form: signature order for
/// symbols, domain order for nodes and pairs.
pub fn save_model(model: &Model) -> String {
    let mut unary = Map::new();
    for (ix, sym) in model.signature().unary().iter().enumerate() {
        let members: Vec<Value> = model
            .unary_members(ix)
            .map(|n| Value::String(model.node_name(n).to_owned()))
            .collect();
        unary.insert(sym.clone(), Value::Array(members));
    }
    let mut binary = Map::new();
    for (ix, sym) in model.signature().binary().iter().enumerate() {
        let pairs: Vec<Value> = model
            .binary_pairs(ix)
            .map(|(f, t)| {
                json!([
                    model.node_name(f),
                    model.node_name(t)
                ])
            })
            .collect();
        binary.insert(sym.clone(), Value::Array(pairs));
    }
    let doc = json!({
        "signature": {
            "unary": model.signature().unary(),
            "binary": model.signature().binary(),
        },
        "domain": model.node_names(),
        "unary_interp": Value::Object(unary),
        "binary_interp": Value::Object(binary),
    });
    let mut text = serde_json::to_string_pretty(&doc).expect("model serializes");
    text.push('\n');
    text
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structures::{build_path_model, thue_morse_prefix};

    fn models_equal(a: &Model, b: &Model) -> bool {
        save_model(a) == save_model(b)
    }

    #[test]
    fn round_trip_path_model() {
        let m = build_path_model(&"0".parse().unwrap()).unwrap();
        let loaded = load_model(&save_model(&m)).unwrap();
        assert!(models_equal(&m, &loaded));

        let m = build_path_model(&thue_morse_prefix(9).unwrap()).unwrap();
        let loaded = load_model(&save_model(&m)).unwrap();
        assert!(models_equal(&m, &loaded));
    }

    #[test]
    fn unknown_node_reference_fails_with_location() {
        let text = r#"{
            "signature": {"unary": ["P"], "binary": ["R"]},
            "domain": ["a"],
            "unary_interp": {"P": ["x"]},
            "binary_interp": {}
        }"#;
        let err = load_model(text).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("unary_interp.P[0]"), "{msg}");
        assert!(msg.contains("unknown node 'x'"), "{msg}");
    }

    #[test]
    fn duplicate_unary_entry_fails() {
        let text = r#"{
            "signature": {"unary": ["P"], "binary": ["R"]},
            "domain": ["a"],
            "unary_interp": {"P": [], "P": ["a"]},
            "binary_interp": {}
        }"#;
        let err = load_model(text).unwrap_err();
        assert!(err.to_string().contains("duplicate symbol entry"));
    }

    #[test]
    fn duplicate_domain_node_fails() {
        let text = r#"{
            "signature": {"unary": [], "binary": ["R"]},
            "domain": ["a", "a"],
            "unary_interp": {},
            "binary_interp": {}
        }"#;
        assert!(load_model(text).is_err());
    }

    #[test]
    fn duplicate_pair_fails() {
        let text = r#"{
            "signature": {"unary": [], "binary": ["R"]},
            "domain": ["a", "b"],
            "unary_interp": {},
            "binary_interp": {"R": [["a","b"], ["a","b"]]}
        }"#;
        let err = load_model(text).unwrap_err();
        assert!(err.to_string().contains("duplicate pair"));
    }

    #[test]
    fn malformed_json_fails() {
        assert!(load_model("{").is_err());
        assert!(load_model(r#"{"domain": []}"#).is_err());
    }
}

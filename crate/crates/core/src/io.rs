//! JSON documents and `corpus.jsonl` files. Every document carries a
//! `kind` tag; maps are ordered so output is byte-stable.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bea::BeaOracle;
use crate::convexity::BiConvexity;
use crate::error::{Error, Result};
use crate::mask::{self, Mask, MASK_BITS};
use crate::model::{FiniteStructure, SetFamily, Signature, Symbol, TwoTemplate};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymbolDoc {
    pub name: String,
    pub arity: usize,
    #[serde(default)]
    pub functional: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureDoc {
    pub universe: usize,
    pub signature: Vec<SymbolDoc>,
    #[serde(default)]
    pub relations: BTreeMap<String, Vec<Vec<usize>>>,
    #[serde(default)]
    pub constants: BTreeMap<String, usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyDoc {
    pub base: usize,
    pub sets: Vec<Vec<usize>>,
    #[serde(default)]
    pub zero: bool,
    #[serde(default)]
    pub one: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BeaDoc {
    pub universe: usize,
    /// Every positive pair `[s, t]`.
    pub pairs: Vec<(Vec<usize>, Vec<usize>)>,
    #[serde(default)]
    pub zero: Option<usize>,
    #[serde(default)]
    pub one: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BiconvexityDoc {
    pub universe: usize,
    #[serde(rename = "L")]
    pub l: Vec<Vec<usize>>,
    #[serde(rename = "U")]
    pub u: Vec<Vec<usize>>,
    #[serde(default)]
    pub zero: Option<usize>,
    #[serde(default)]
    pub one: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusMeta {
    pub seed: u64,
    pub generator: String,
    pub prng: String,
    #[serde(default)]
    pub params: BTreeMap<String, u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Document {
    Structure(StructureDoc),
    Family(FamilyDoc),
    Bea(BeaDoc),
    Biconvexity(BiconvexityDoc),
    CorpusMeta(CorpusMeta),
}

impl Document {
    pub fn kind(&self) -> &'static str {
        match self {
            Document::Structure(_) => "structure",
            Document::Family(_) => "family",
            Document::Bea(_) => "bea",
            Document::Biconvexity(_) => "biconvexity",
            Document::CorpusMeta(_) => "corpus-meta",
        }
    }

    pub fn to_structure(&self) -> Result<FiniteStructure> {
        match self {
            Document::Structure(d) => structure_from_doc(d),
            other => Err(wrong_kind("structure", other)),
        }
    }

    pub fn to_family(&self) -> Result<SetFamily> {
        match self {
            Document::Family(d) => family_from_doc(d),
            other => Err(wrong_kind("family", other)),
        }
    }

    pub fn to_bea(&self) -> Result<BeaOracle> {
        match self {
            Document::Bea(d) => bea_from_doc(d),
            other => Err(wrong_kind("bea", other)),
        }
    }

    pub fn to_biconvexity(&self) -> Result<BiConvexity> {
        match self {
            Document::Biconvexity(d) => biconvexity_from_doc(d),
            other => Err(wrong_kind("biconvexity", other)),
        }
    }
}

fn wrong_kind(want: &str, got: &Document) -> Error {
    Error::Parse(format!("expected a {want} document, found {}", got.kind()))
}

fn set_from_indices(indices: &[usize], n: usize) -> Result<Mask> {
    if let Some(&i) = indices.iter().find(|&&i| i >= n) {
        return Err(Error::Parse(format!("index {i} outside a universe of {n}")));
    }
    Ok(mask::from_indices(indices.iter().copied()))
}

fn check_universe(n: usize) -> Result<()> {
    if n > MASK_BITS {
        return Err(Error::UniverseTooLarge {
            what: "document universe",
            size: n,
            cap: MASK_BITS,
        });
    }
    Ok(())
}

pub fn structure_doc(x: &FiniteStructure) -> StructureDoc {
    let sig = &x.signature;
    StructureDoc {
        universe: x.size,
        signature: sig
            .symbols
            .iter()
            .map(|s| SymbolDoc {
                name: s.name.clone(),
                arity: s.arity,
                functional: s.functional,
            })
            .collect(),
        relations: sig
            .symbols
            .iter()
            .enumerate()
            .map(|(i, s)| (s.name.clone(), x.tuples(i).to_vec()))
            .collect(),
        constants: sig.constants.iter().zip(x.constant_values()).map(|(c, &v)| (c.clone(), v)).collect(),
    }
}

/// Builds and validates the structure. Constants take the map's (sorted)
/// order; signatures compare regardless of order.
pub fn structure_from_doc(d: &StructureDoc) -> Result<FiniteStructure> {
    let symbols: Vec<Symbol> = d
        .signature
        .iter()
        .map(|s| Symbol {
            name: s.name.clone(),
            arity: s.arity,
            functional: s.functional,
        })
        .collect();
    let constants: Vec<&str> = d.constants.keys().map(String::as_str).collect();
    let signature = Signature::new(symbols, constants);
    if let Some(name) = d.relations.keys().find(|r| signature.symbol_index(r).is_none()) {
        return Err(Error::Parse(format!("relation `{name}` is not in the signature")));
    }
    let relations = signature
        .symbols
        .iter()
        .map(|s| d.relations.get(&s.name).cloned().unwrap_or_default())
        .collect();
    let x = FiniteStructure::new(signature, d.universe, relations, d.constants.values().copied().collect());
    x.ensure_valid()?;
    Ok(x)
}

pub fn family_doc(f: &SetFamily) -> FamilyDoc {
    FamilyDoc {
        base: f.base,
        sets: f.sets.iter().map(|&s| mask::to_indices(s)).collect(),
        zero: f.zero,
        one: f.one,
    }
}

pub fn family_from_doc(d: &FamilyDoc) -> Result<SetFamily> {
    check_universe(d.base)?;
    let sets = d.sets.iter().map(|s| set_from_indices(s, d.base)).collect::<Result<Vec<_>>>()?;
    SetFamily::new(d.base, sets, d.zero, d.one)
}

pub fn bea_doc(o: &BeaOracle) -> Result<BeaDoc> {
    Ok(BeaDoc {
        universe: o.n,
        pairs: o
            .positive_pairs()?
            .into_iter()
            .map(|(s, t)| (mask::to_indices(s), mask::to_indices(t)))
            .collect(),
        zero: o.zero,
        one: o.one,
    })
}

pub fn bea_from_doc(d: &BeaDoc) -> Result<BeaOracle> {
    check_universe(d.universe)?;
    let pairs = d
        .pairs
        .iter()
        .map(|(s, t)| Ok((set_from_indices(s, d.universe)?, set_from_indices(t, d.universe)?)))
        .collect::<Result<Vec<_>>>()?;
    BeaOracle::from_pairs(d.universe, &pairs, d.zero, d.one)
}

pub fn biconvexity_doc(s: &BiConvexity) -> BiconvexityDoc {
    let sets = |f: &SetFamily| f.sets.iter().map(|&m| mask::to_indices(m)).collect();
    BiconvexityDoc {
        universe: s.n,
        l: sets(&s.l),
        u: sets(&s.u),
        zero: s.zero,
        one: s.one,
    }
}

pub fn biconvexity_from_doc(d: &BiconvexityDoc) -> Result<BiConvexity> {
    check_universe(d.universe)?;
    let sets = |v: &[Vec<usize>]| v.iter().map(|s| set_from_indices(s, d.universe)).collect::<Result<Vec<_>>>();
    BiConvexity::new(d.universe, sets(&d.l)?, sets(&d.u)?, d.zero, d.one)
}

pub fn parse_document(text: &str) -> Result<Document> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

pub fn read_document(path: &Path) -> Result<Document> {
    let text = fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    parse_document(&text)
}

/// Pretty-printed JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::Parse(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// A template read from a structure document on a 2-element universe,
/// named after the file stem.
pub fn read_template(path: &Path) -> Result<TwoTemplate> {
    let x = read_document(path)?.to_structure()?;
    let name = path
        .file_stem()
        .and_then(|s| s.to_str())
        .map(|s| s.split('.').next().unwrap_or(s))
        .unwrap_or("template");
    TwoTemplate::new(name, x)
}

/// One compact document per line, the metadata header first.
pub fn corpus_to_jsonl(meta: &CorpusMeta, docs: &[Document]) -> Result<String> {
    let mut out = String::new();
    let header = Document::CorpusMeta(meta.clone());
    for d in std::iter::once(&header).chain(docs) {
        out.push_str(&serde_json::to_string(d).map_err(|e| Error::Parse(e.to_string()))?);
        out.push('\n');
    }
    Ok(out)
}

/// The header (if present) and the remaining documents; blank lines are
/// skipped.
pub fn parse_corpus(text: &str) -> Result<(Option<CorpusMeta>, Vec<Document>)> {
    let mut meta = None;
    let mut docs = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let doc = parse_document(line).map_err(|e| Error::Parse(format!("line {}: {e}", i + 1)))?;
        match doc {
            Document::CorpusMeta(m) if i == 0 => meta = Some(m),
            Document::CorpusMeta(_) => return Err(Error::Parse(format!("line {}: corpus-meta must come first", i + 1))),
            d => docs.push(d),
        }
    }
    Ok((meta, docs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bea::family_bea;
    use crate::convexity::chain_convexity;
    use crate::instances::{catalog, generators};

    #[test]
    fn structure_round_trip() {
        for t in catalog::all_relational() {
            let doc = structure_doc(&t.structure);
            let back = structure_from_doc(&doc).unwrap();
            assert_eq!(structure_doc(&back), doc);
            back.signature.ensure_same(t.signature()).unwrap();
        }
    }

    #[test]
    fn structure_document_fields() {
        let doc = Document::Structure(structure_doc(&generators::chain_poset(2)));
        let v: serde_json::Value = serde_json::from_str(&to_json(&doc).unwrap()).unwrap();
        assert_eq!(v["kind"], "structure");
        assert_eq!(v["universe"], 2);
        assert_eq!(v["signature"][0]["name"], "leq");
        assert_eq!(v["signature"][0]["functional"], false);
        assert_eq!(v["relations"]["leq"], serde_json::json!([[0, 0], [0, 1], [1, 1]]));
    }

    #[test]
    fn rejects_unknown_relation_and_bad_index() {
        let text = r#"{"kind":"structure","universe":2,"signature":[],"relations":{"r":[[0]]}}"#;
        assert!(matches!(parse_document(text).unwrap().to_structure(), Err(Error::Parse(_))));
        let text = r#"{"kind":"family","base":2,"sets":[[2]]}"#;
        assert!(matches!(parse_document(text).unwrap().to_family(), Err(Error::Parse(_))));
        assert!(matches!(parse_document("{\"kind\":\"nope\"}"), Err(Error::Parse(_))));
        let text = r#"{"kind":"family","base":2,"sets":[]}"#;
        assert!(matches!(parse_document(text).unwrap().to_bea(), Err(Error::Parse(_))));
    }

    #[test]
    fn bea_round_trip() {
        let f = SetFamily::new(3, vec![0b001, 0b011, 0b110], false, false).unwrap();
        let o = family_bea(&f).unwrap();
        let doc = Document::Bea(bea_doc(&o).unwrap());
        let back = parse_document(&to_json(&doc).unwrap()).unwrap().to_bea().unwrap();
        assert!(back.same_relation(&o).unwrap());
    }

    #[test]
    fn chain2_bea_document() {
        let text = r#"{"kind":"bea","universe":2,"pairs":[[[0],[1]],[[0],[0,1]],[[0,1],[1]],[[0,1],[0,1]],[[0],[0]],[[1],[1]],[[0,1],[0]],[[1],[0,1]]],"zero":null,"one":null}"#;
        let o = parse_document(text).unwrap().to_bea().unwrap();
        assert!(o.query(0b01, 0b10));
        assert!(!o.query(0b10, 0b01));
    }

    #[test]
    fn family_and_biconvexity_round_trip() {
        let f = SetFamily::new(3, vec![0, 0b101, 0b111], true, true).unwrap();
        let doc = Document::Family(family_doc(&f));
        assert_eq!(parse_document(&to_json(&doc).unwrap()).unwrap().to_family().unwrap(), f);
        let s = chain_convexity(3);
        let doc = Document::Biconvexity(biconvexity_doc(&s));
        let json = to_json(&doc).unwrap();
        assert!(json.contains("\"L\""));
        assert_eq!(parse_document(&json).unwrap().to_biconvexity().unwrap(), s);
    }

    #[test]
    fn corpus_round_trip() {
        let meta = CorpusMeta {
            seed: 7,
            generator: "poset".into(),
            prng: generators::PRNG_ALGORITHM.into(),
            params: BTreeMap::from([("size".into(), 2)]),
        };
        let docs: Vec<Document> = generators::exhaustive_posets(2)
            .unwrap()
            .iter()
            .map(|p| Document::Structure(structure_doc(p)))
            .collect();
        let text = corpus_to_jsonl(&meta, &docs).unwrap();
        assert!(text.starts_with("{\"kind\":\"corpus-meta\""));
        assert_eq!(text.lines().count(), 4);
        let (m, back) = parse_corpus(&text).unwrap();
        assert_eq!(m, Some(meta));
        assert_eq!(back, docs);
        assert!(parse_corpus(&text.lines().skip(1).chain(text.lines().take(1)).collect::<Vec<_>>().join("\n")).is_err());
    }
}

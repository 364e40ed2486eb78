//! JSON input formats and deterministic report rendering.
//!
//! Inputs are small declarative documents: a subgroup is an alphabet plus
//! generator words; a partition names its subgroups once and lists parts
//! as (subgroup, representative) pairs, so parts of one subgroup share a
//! single graph. Outputs are `serde_json` values built in a fixed key
//! order with exact integers throughout — big integers are emitted as
//! plain JSON numbers (arbitrary precision), rationals as `num`/`den`
//! pairs, never floats — so equal data always serializes to equal bytes.

use std::collections::BTreeMap;
use std::str::FromStr;
use std::sync::Arc;

use num::{BigInt, BigRational, BigUint};
use serde::Deserialize;
use serde_json::{json, Map, Number, Value};
use thiserror::Error;

use crate::partition::{
    CosetPartition, DensityReport, GenFunReport, PartitionError, PartitionPart,
    PartitionReport, Witness,
};
use crate::poly::{Poly, RationalFunction};
use crate::schreier::{build_schreier, SchreierError, SchreierGraph};
use crate::search::SearchState;
use crate::words::{Alphabet, Word, WordError};

/// Errors from input parsing and checkpoint decoding.
#[derive(Debug, Error)]
pub enum IoError {
    /// A part references a subgroup name that was never declared.
    #[error("part references unknown subgroup {name:?}")]
    UnknownSubgroup {
        /// The missing name.
        name: String,
    },
    /// Two subgroup declarations share a name.
    #[error("duplicate subgroup name {name:?}")]
    DuplicateSubgroup {
        /// The repeated name.
        name: String,
    },
    /// Word-level failure.
    #[error(transparent)]
    Word(#[from] WordError),
    /// Graph-level failure.
    #[error(transparent)]
    Schreier(#[from] SchreierError),
    /// Partition-level failure.
    #[error(transparent)]
    Partition(#[from] PartitionError),
    /// Malformed JSON document.
    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

/// An alphabet given either as a rank or as explicit generator names.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum AlphabetSpec {
    /// `"alphabet": 2` — generators a, b, … (x1, x2, … beyond 26).
    Rank(usize),
    /// `"alphabet": ["a", "b"]` — explicit names.
    Names(Vec<String>),
}

/// Resolves an alphabet specification.
pub fn alphabet_from_spec(spec: &AlphabetSpec) -> Result<Arc<Alphabet>, IoError> {
    match spec {
        AlphabetSpec::Rank(n) => Alphabet::with_rank(*n).map_err(Into::into),
        AlphabetSpec::Names(names) => Alphabet::new(names.clone()).map_err(Into::into),
    }
}

/// Input document for a single subgroup.
#[derive(Debug, Clone, Deserialize)]
pub struct SubgroupInput {
    /// The alphabet.
    pub alphabet: AlphabetSpec,
    /// Generator words (free-group text: lowercase generators, uppercase
    /// inverses, optional `^k` exponents).
    pub generators: Vec<String>,
}

/// Builds the subgroup graph of an input document.
pub fn build_subgroup(input: &SubgroupInput) -> Result<SchreierGraph, IoError> {
    let alphabet = alphabet_from_spec(&input.alphabet)?;
    let generators = input
        .generators
        .iter()
        .map(|text| Word::parse(&alphabet, text))
        .collect::<Result<Vec<_>, _>>()?;
    build_schreier(&alphabet, &generators).map_err(Into::into)
}

/// A named subgroup declaration inside a partition document.
#[derive(Debug, Clone, Deserialize)]
pub struct SubgroupDef {
    /// Name referenced by parts.
    pub name: String,
    /// Generator words.
    pub generators: Vec<String>,
}

/// One part of a partition document.
#[derive(Debug, Clone, Deserialize)]
pub struct PartDef {
    /// Name of a declared subgroup.
    pub subgroup: String,
    /// Representative word (empty for the subgroup itself).
    #[serde(default)]
    pub rep: String,
}

/// Input document for a coset partition.
#[derive(Debug, Clone, Deserialize)]
pub struct PartitionInput {
    /// The shared alphabet.
    pub alphabet: AlphabetSpec,
    /// Subgroups, declared once each.
    pub subgroups: Vec<SubgroupDef>,
    /// Parts as (subgroup, representative) pairs.
    pub parts: Vec<PartDef>,
}

/// Builds a partition candidate from an input document. Parts referring
/// to one subgroup share a single graph.
pub fn build_partition(input: &PartitionInput) -> Result<CosetPartition, IoError> {
    let alphabet = alphabet_from_spec(&input.alphabet)?;
    let mut graphs: BTreeMap<&str, Arc<SchreierGraph>> = BTreeMap::new();
    for def in &input.subgroups {
        let generators = def
            .generators
            .iter()
            .map(|text| Word::parse(&alphabet, text))
            .collect::<Result<Vec<_>, _>>()?;
        let graph = Arc::new(build_schreier(&alphabet, &generators)?);
        if graphs.insert(&def.name, graph).is_some() {
            return Err(IoError::DuplicateSubgroup { name: def.name.clone() });
        }
    }
    let parts = input
        .parts
        .iter()
        .map(|part| {
            let graph = graphs
                .get(part.subgroup.as_str())
                .ok_or_else(|| IoError::UnknownSubgroup { name: part.subgroup.clone() })?;
            let rep = Word::parse(&alphabet, &part.rep)?;
            PartitionPart::from_rep(&part.subgroup, graph, rep).map_err(Into::into)
        })
        .collect::<Result<Vec<_>, IoError>>()?;
    CosetPartition::new(parts).map_err(Into::into)
}

// ---------------------------------------------------------------------
// Deterministic JSON rendering
// ---------------------------------------------------------------------

/// A big integer as a plain JSON number (exact, arbitrary precision).
pub fn bigint_value(x: &BigInt) -> Value {
    Value::Number(Number::from_str(&x.to_string()).expect("integer literal"))
}

/// A big unsigned integer as a plain JSON number.
pub fn biguint_value(x: &BigUint) -> Value {
    Value::Number(Number::from_str(&x.to_string()).expect("integer literal"))
}

/// An exact rational as a `{"num": …, "den": …}` pair.
pub fn rational_value(q: &BigRational) -> Value {
    json!({
        "num": bigint_value(q.numer()),
        "den": bigint_value(q.denom()),
    })
}

/// A rational matrix, row-major.
pub fn rational_matrix_value(rows: &[Vec<BigRational>]) -> Value {
    Value::Array(
        rows.iter()
            .map(|row| Value::Array(row.iter().map(rational_value).collect()))
            .collect(),
    )
}

/// A polynomial as its ascending coefficient list.
pub fn poly_value(p: &Poly) -> Value {
    Value::Array(p.coeffs().iter().map(bigint_value).collect())
}

/// A rational function as coefficient lists plus a human-readable form.
pub fn rational_function_value(f: &RationalFunction) -> Value {
    json!({
        "num": poly_value(f.num()),
        "den": poly_value(f.den()),
        "display": f.to_string(),
    })
}

/// A graph as `{"d", "alphabet", "action": {letter: [targets]}}`, letters
/// in alphabet order.
pub fn graph_value(g: &SchreierGraph) -> Value {
    let mut action = Map::new();
    for (letter, row) in g.action().iter().enumerate() {
        action.insert(
            g.alphabet().name(letter).to_string(),
            Value::Array(row.iter().map(|&t| Value::from(t as u64)).collect()),
        );
    }
    json!({
        "d": g.d(),
        "alphabet": g.alphabet().names(),
        "action": Value::Object(action),
    })
}

fn witness_value(w: &Witness) -> Value {
    json!({
        "word": w.word.to_string(),
        "covered_by": w.covered_by,
        "count": w.covered_by.len(),
    })
}

/// The verification report as JSON.
pub fn partition_report_value(r: &PartitionReport) -> Value {
    json!({
        "valid": r.valid,
        "witness": r.witness.as_ref().map(witness_value),
        "density": rational_value(&r.density),
        "multiplicity": r.multiplicity,
        "parts": r.parts,
        "indices": r.indices,
        "reachable_tuples": r.reachable_tuples,
    })
}

/// The density report as JSON.
pub fn density_report_value(r: &DensityReport) -> Value {
    json!({
        "terms": r.terms.iter().map(rational_value).collect::<Vec<_>>(),
        "sum": rational_value(&r.sum),
        "is_one": r.is_one,
    })
}

/// The generating-function identity report as JSON.
pub fn genfun_report_value(r: &GenFunReport) -> Value {
    json!({
        "parts": r.part_functions.iter().map(rational_function_value).collect::<Vec<_>>(),
        "sum": rational_function_value(&r.sum),
        "expected": rational_function_value(&r.expected),
        "identity": r.identity,
        "checked_to": r.checked_to,
        "coefficients_ok": r.coefficients_ok,
        "holds": r.holds,
    })
}

/// Serializes a search checkpoint.
pub fn search_state_value(state: &SearchState) -> Value {
    serde_json::to_value(state).expect("plain data serializes")
}

/// Decodes a search checkpoint.
pub fn search_state_from_value(value: Value) -> Result<SearchState, IoError> {
    serde_json::from_value(value).map_err(Into::into)
}

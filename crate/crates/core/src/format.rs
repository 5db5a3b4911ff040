//! JSON file formats for nets and automata.
//!
//! Vectors are written as maps from place name to count in place order, omitting
//! zeros; ω is written as the string `"w"`. Writers are deterministic, so a file
//! written by this module parses and re-serializes to identical bytes.

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::fa::{Nfa, State, StateAnnotation};
use crate::order::{Marking, OmegaMarking, OmegaNat};
use crate::petri::{LabeledPetriNet, Transition};

pub(crate) fn plain_map(places: &[String], m: &Marking) -> Map<String, Value> {
    places
        .iter()
        .zip(m.values())
        .filter(|(_, &v)| v != 0)
        .map(|(p, &v)| (p.clone(), Value::from(v)))
        .collect()
}

pub(crate) fn omega_map(places: &[String], u: &OmegaMarking) -> Map<String, Value> {
    places
        .iter()
        .zip(u.values())
        .filter(|(_, v)| **v != OmegaNat::Fin(0))
        .map(|(p, v)| {
            let value = match v {
                OmegaNat::Fin(n) => Value::from(*n),
                OmegaNat::Omega => Value::from("w"),
            };
            (p.clone(), value)
        })
        .collect()
}

fn place_index(places: &[String], name: &str) -> Result<usize> {
    places
        .iter()
        .position(|p| p == name)
        .ok_or_else(|| Error::InvalidNet(format!("unknown place `{name}`")))
}

fn read_plain(places: &[String], map: &Map<String, Value>) -> Result<Marking> {
    let mut v = vec![0; places.len()];
    for (k, x) in map {
        let n = x
            .as_u64()
            .ok_or_else(|| Error::InvalidNet(format!("count for `{k}` must be a non-negative integer")))?;
        v[place_index(places, k)?] = n;
    }
    Ok(Marking::new(v))
}

fn read_omega(places: &[String], map: &Map<String, Value>) -> Result<OmegaMarking> {
    let mut v = vec![OmegaNat::Fin(0); places.len()];
    for (k, x) in map {
        let value = match x {
            Value::String(s) if s == "w" => OmegaNat::Omega,
            other => OmegaNat::Fin(other.as_u64().ok_or_else(|| {
                Error::InvalidAutomaton(format!("coordinate `{k}` must be a count or \"w\""))
            })?),
        };
        v[place_index(places, k)?] = value;
    }
    Ok(OmegaMarking::new(v))
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TransitionDoc {
    name: String,
    label: String,
    #[serde(default)]
    pre: Map<String, Value>,
    #[serde(default)]
    post: Map<String, Value>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NetDoc {
    places: Vec<String>,
    alphabet: Vec<String>,
    transitions: Vec<TransitionDoc>,
    #[serde(default)]
    initial: Map<String, Value>,
    #[serde(rename = "final", default)]
    final_marking: Map<String, Value>,
}

pub fn net_to_json(net: &LabeledPetriNet) -> String {
    let places = net.places();
    let doc = NetDoc {
        places: places.to_vec(),
        alphabet: net.alphabet().to_vec(),
        transitions: net
            .transitions()
            .iter()
            .map(|t| TransitionDoc {
                name: t.name.clone(),
                label: t.label.clone(),
                pre: plain_map(places, &t.pre),
                post: plain_map(places, &t.post),
            })
            .collect(),
        initial: plain_map(places, net.initial()),
        final_marking: plain_map(places, net.final_marking()),
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("net documents always serialize");
    s.push('\n');
    s
}

pub fn net_from_json(text: &str) -> Result<LabeledPetriNet> {
    let doc: NetDoc = serde_json::from_str(text)?;
    let places = &doc.places;
    let transitions = doc
        .transitions
        .iter()
        .map(|t| {
            Ok(Transition {
                name: t.name.clone(),
                label: t.label.clone(),
                pre: read_plain(places, &t.pre)?,
                post: read_plain(places, &t.post)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    LabeledPetriNet::new(
        doc.places.clone(),
        doc.alphabet.clone(),
        transitions,
        read_plain(places, &doc.initial)?,
        read_plain(places, &doc.final_marking)?,
    )
}

/// SHA-256 of the canonical serialization.
pub fn net_digest(net: &LabeledPetriNet) -> String {
    hex::encode(Sha256::digest(net_to_json(net).as_bytes()))
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StateDoc {
    name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    ideal: Option<Map<String, Value>>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    dead: bool,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AutomatonDoc {
    alphabet: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    places: Vec<String>,
    states: Vec<StateDoc>,
    initial: Vec<String>,
    #[serde(rename = "final")]
    accepting: Vec<String>,
    transitions: Vec<(String, String, String)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    provenance: Option<Value>,
}

/// Serializes an automaton, optionally with a provenance block.
pub fn automaton_to_json(a: &Nfa, provenance: Option<&Value>) -> String {
    let places = a.annotation_places();
    let name = |i: usize| a.states()[i].name.clone();
    let doc = AutomatonDoc {
        alphabet: a.alphabet().to_vec(),
        places: places.to_vec(),
        states: a
            .states()
            .iter()
            .map(|s| StateDoc {
                name: s.name.clone(),
                ideal: match &s.annotation {
                    Some(StateAnnotation::Ideal(u)) => Some(omega_map(places, u)),
                    _ => None,
                },
                dead: matches!(s.annotation, Some(StateAnnotation::Dead)),
            })
            .collect(),
        initial: a.initial().iter().map(|&i| name(i)).collect(),
        accepting: a.accepting().iter().map(|&i| name(i)).collect(),
        transitions: a
            .transitions()
            .iter()
            .map(|&(p, l, q)| (name(p), a.alphabet()[l].clone(), name(q)))
            .collect(),
        provenance: provenance.cloned(),
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("automaton documents always serialize");
    s.push('\n');
    s
}

/// Parses an automaton file, returning the automaton and its provenance block if any.
pub fn automaton_from_json(text: &str) -> Result<(Nfa, Option<Value>)> {
    let doc: AutomatonDoc = serde_json::from_str(text)?;
    let index = |n: &str| {
        doc.states
            .iter()
            .position(|s| s.name == n)
            .ok_or_else(|| Error::InvalidAutomaton(format!("unknown state `{n}`")))
    };
    let letter = |l: &str| {
        doc.alphabet
            .iter()
            .position(|a| a == l)
            .ok_or_else(|| Error::InvalidAutomaton(format!("unknown letter `{l}`")))
    };
    let states = doc
        .states
        .iter()
        .map(|s| {
            let annotation = match (&s.ideal, s.dead) {
                (Some(_), true) => {
                    return Err(Error::InvalidAutomaton(format!("state `{}` is both ideal and dead", s.name)))
                }
                (Some(m), false) => Some(StateAnnotation::Ideal(read_omega(&doc.places, m)?)),
                (None, true) => Some(StateAnnotation::Dead),
                (None, false) => None,
            };
            Ok(State { name: s.name.clone(), annotation })
        })
        .collect::<Result<Vec<_>>>()?;
    let transitions = doc
        .transitions
        .iter()
        .map(|(p, l, q)| Ok((index(p)?, letter(l)?, index(q)?)))
        .collect::<Result<Vec<_>>>()?;
    let initial = doc.initial.iter().map(|n| index(n)).collect::<Result<Vec<_>>>()?;
    let accepting = doc.accepting.iter().map(|n| index(n)).collect::<Result<Vec<_>>>()?;
    let nfa = Nfa::new(doc.alphabet.clone(), states, transitions, initial, accepting)?
        .with_annotation_places(doc.places.clone());
    Ok((nfa, doc.provenance))
}

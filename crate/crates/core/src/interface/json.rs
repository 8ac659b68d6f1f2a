//! JSON encoding of states, enabled sets and nets.
//!
//! All sets are emitted sorted and every place of the net is listed, so equal
//! states always encode to identical bytes.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::interface::dsl::print_net;
use crate::model::{ArcLabel, Bond, History, Marking, ModelError, Net, State, Tokens};
use crate::semantics::EnabledSets;

#[derive(Debug, Error)]
pub enum JsonError {
    #[error("malformed state JSON: {0}")]
    Syntax(#[from] serde_json::Error),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("history does not list transition {0}")]
    MissingTransition(String),
}

#[derive(Serialize, Deserialize, Clone, PartialEq, Eq, Debug, Default)]
pub struct TokensJson {
    pub bases: Vec<String>,
    pub bonds: Vec<[String; 2]>,
}

impl From<&Tokens> for TokensJson {
    fn from(t: &Tokens) -> Self {
        TokensJson {
            bases: t.bases.iter().map(|b| b.to_string()).collect(),
            bonds: t.bonds.iter().map(bond_pair).collect(),
        }
    }
}

fn bond_pair(b: &Bond) -> [String; 2] {
    let (x, y) = b.endpoints();
    [x.to_string(), y.to_string()]
}

#[derive(Serialize, Deserialize, Clone, PartialEq, Eq, Debug)]
pub struct StateJson {
    pub marking: BTreeMap<String, TokensJson>,
    pub history: BTreeMap<String, Option<u64>>,
}

impl StateJson {
    pub fn new(net: &Net, s: &State) -> Self {
        StateJson {
            marking: net
                .places()
                .iter()
                .map(|p| (p.to_string(), TokensJson::from(s.marking.get(p))))
                .collect(),
            history: net
                .transitions()
                .iter()
                .map(|t| (t.to_string(), s.history.get(t)))
                .collect(),
        }
    }
}

#[derive(Serialize, Deserialize, Clone, PartialEq, Eq, Debug)]
pub struct EnabledJson {
    pub forward: Vec<String>,
    pub bt: Vec<String>,
    pub co: Vec<String>,
    pub o: Vec<String>,
}

impl From<&EnabledSets> for EnabledJson {
    fn from(e: &EnabledSets) -> Self {
        let names =
            |s: &std::collections::BTreeSet<_>| s.iter().map(|t: &crate::model::TransId| t.to_string()).collect();
        EnabledJson {
            forward: names(&e.forward),
            bt: names(&e.bt),
            co: names(&e.co),
            o: names(&e.o),
        }
    }
}

#[derive(Serialize, Deserialize, Clone, PartialEq, Eq, Debug)]
pub struct LabelJson {
    pub bases: Vec<String>,
    pub bonds: Vec<[String; 2]>,
    pub neg_bases: Vec<String>,
    pub neg_bonds: Vec<[String; 2]>,
}

impl From<&ArcLabel> for LabelJson {
    fn from(l: &ArcLabel) -> Self {
        let pos = TokensJson::from(&l.positive);
        let neg = TokensJson::from(&l.negative);
        LabelJson {
            bases: pos.bases,
            bonds: pos.bonds,
            neg_bases: neg.bases,
            neg_bonds: neg.bonds,
        }
    }
}

#[derive(Serialize, Deserialize, Clone, PartialEq, Eq, Debug)]
pub struct ArcJson {
    pub from: String,
    pub to: String,
    pub label: LabelJson,
}

#[derive(Serialize, Deserialize, Clone, PartialEq, Eq, Debug)]
pub struct NetJson {
    pub name: String,
    pub bases: Vec<String>,
    pub places: Vec<String>,
    pub transitions: Vec<String>,
    pub arcs: Vec<ArcJson>,
    pub initial: BTreeMap<String, TokensJson>,
    /// The net in its canonical text form.
    pub text: String,
}

impl NetJson {
    pub fn new(net: &Net, m0: &Marking) -> Self {
        let mut arcs = Vec::new();
        for (t, view) in net.views() {
            for (p, l) in &view.inputs {
                arcs.push(ArcJson {
                    from: p.to_string(),
                    to: t.to_string(),
                    label: l.into(),
                });
            }
            for (p, l) in &view.outputs {
                arcs.push(ArcJson {
                    from: t.to_string(),
                    to: p.to_string(),
                    label: l.into(),
                });
            }
        }
        NetJson {
            name: net.name().to_string(),
            bases: net.bases().iter().map(|b| b.to_string()).collect(),
            places: net.places().iter().map(|p| p.to_string()).collect(),
            transitions: net.transitions().iter().map(|t| t.to_string()).collect(),
            arcs,
            initial: m0.iter().map(|(p, t)| (p.to_string(), t.into())).collect(),
            text: print_net(net, m0),
        }
    }
}

/// Compact, byte-stable JSON for a state.
pub fn encode_state(net: &Net, s: &State) -> String {
    serde_json::to_string(&StateJson::new(net, s)).expect("state JSON is always serializable")
}

/// Inverse of [`encode_state`]; identifiers are resolved against `net`.
pub fn decode_state(net: &Net, text: &str) -> Result<State, JsonError> {
    let raw: StateJson = serde_json::from_str(text)?;
    let mut marking = Marking::new();
    for (place, tokens) in &raw.marking {
        let p = net.place(place)?;
        let bases = tokens
            .bases
            .iter()
            .map(|b| net.base(b))
            .collect::<Result<Vec<_>, _>>()?;
        let mut bonds = Vec::new();
        for [x, y] in &tokens.bonds {
            bonds.push(Bond::new(net.base(x)?, net.base(y)?)?);
        }
        marking.add(&p, &Tokens::from_parts(bases, bonds));
    }
    let mut keys = Vec::new();
    for t in net.transitions() {
        match raw.history.get(t.as_str()) {
            Some(k) => keys.push((t.clone(), *k)),
            None => return Err(JsonError::MissingTransition(t.to_string())),
        }
    }
    for name in raw.history.keys() {
        net.transition(name)?;
    }
    Ok(State::new(marking, History::from_keys(keys)))
}

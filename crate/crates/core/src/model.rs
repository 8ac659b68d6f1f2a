//! Domain types for reversing Petri nets.
//!
//! A net is built from *bases* (persistent, individually named tokens),
//! *places*, *transitions* and arcs labelled with sets of bases and bonds.
//! Labels on arcs entering a transition may also carry negated items, which
//! require the absence of a base or bond in that particular in-place.
//!
//! Every value here is immutable once constructed; execution produces new
//! [`State`]s rather than mutating old ones.

use std::borrow::Borrow;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use thiserror::Error;

/// Errors raised while constructing model values.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("invalid identifier `{0}`")]
    InvalidIdent(String),
    #[error("a base cannot be bonded to itself (`{0}-{0}`)")]
    SelfBond(String),
    #[error("unknown base `{0}`")]
    UnknownBase(String),
    #[error("unknown place `{0}`")]
    UnknownPlace(String),
    #[error("unknown transition `{0}`")]
    UnknownTransition(String),
    #[error("`{0}` is declared both as a place and as a transition")]
    PlaceTransitionClash(String),
    #[error("label on arc {arc} mentions `{item}` both positively and negatively")]
    ConflictingLabel { arc: String, item: String },
    #[error("history does not cover transition `{0}`")]
    HistoryUniverse(String),
}

/// True when `s` matches `[A-Za-z_][A-Za-z0-9_]*`.
pub fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

macro_rules! ident_type {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub struct $name(Arc<str>);

        impl $name {
            pub fn new(name: &str) -> Result<Self, ModelError> {
                if is_ident(name) {
                    Ok(Self(Arc::from(name)))
                } else {
                    Err(ModelError::InvalidIdent(name.to_string()))
                }
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl fmt::Debug for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl Borrow<str> for $name {
            fn borrow(&self) -> &str {
                &self.0
            }
        }

        impl FromStr for $name {
            type Err = ModelError;
            fn from_str(s: &str) -> Result<Self, Self::Err> {
                Self::new(s)
            }
        }
    };
}

ident_type!(
    /// Name of a base (token). Exactly one instance of each base exists.
    BaseId
);
ident_type!(
    /// Name of a place.
    PlaceId
);
ident_type!(
    /// Name of a transition.
    TransId
);

/// An undirected bond between two distinct bases.
///
/// Endpoints are kept in ascending order so `a-b` and `b-a` are the same value.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Bond {
    lo: BaseId,
    hi: BaseId,
}

impl Bond {
    pub fn new(a: BaseId, b: BaseId) -> Result<Self, ModelError> {
        match a.cmp(&b) {
            std::cmp::Ordering::Less => Ok(Bond { lo: a, hi: b }),
            std::cmp::Ordering::Greater => Ok(Bond { lo: b, hi: a }),
            std::cmp::Ordering::Equal => Err(ModelError::SelfBond(a.to_string())),
        }
    }

    pub fn endpoints(&self) -> (&BaseId, &BaseId) {
        (&self.lo, &self.hi)
    }

    pub fn touches(&self, a: &BaseId) -> bool {
        &self.lo == a || &self.hi == a
    }

    /// The endpoint opposite to `a`, if `a` is an endpoint.
    pub fn other(&self, a: &BaseId) -> Option<&BaseId> {
        if &self.lo == a {
            Some(&self.hi)
        } else if &self.hi == a {
            Some(&self.lo)
        } else {
            None
        }
    }
}

impl fmt::Display for Bond {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.lo, self.hi)
    }
}

impl fmt::Debug for Bond {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A set of bases together with a set of bonds.
///
/// Used for place contents, connected components, and the positive or
/// negative half of an arc label.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Tokens {
    pub bases: BTreeSet<BaseId>,
    pub bonds: BTreeSet<Bond>,
}

/// A connected component: the unit relocated by every firing rule.
pub type Component = Tokens;

static NO_TOKENS: Tokens = Tokens {
    bases: BTreeSet::new(),
    bonds: BTreeSet::new(),
};

impl Tokens {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn empty_ref() -> &'static Tokens {
        &NO_TOKENS
    }

    pub fn from_parts(bases: impl IntoIterator<Item = BaseId>, bonds: impl IntoIterator<Item = Bond>) -> Self {
        Tokens {
            bases: bases.into_iter().collect(),
            bonds: bonds.into_iter().collect(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.bases.is_empty() && self.bonds.is_empty()
    }

    pub fn len(&self) -> usize {
        self.bases.len() + self.bonds.len()
    }

    pub fn extend(&mut self, other: &Tokens) {
        self.bases.extend(other.bases.iter().cloned());
        self.bonds.extend(other.bonds.iter().cloned());
    }

    pub fn union(&self, other: &Tokens) -> Tokens {
        let mut out = self.clone();
        out.extend(other);
        out
    }

    pub fn remove_all(&mut self, other: &Tokens) {
        self.bases.retain(|b| !other.bases.contains(b));
        self.bonds.retain(|b| !other.bonds.contains(b));
    }

    pub fn difference(&self, other: &Tokens) -> Tokens {
        Tokens {
            bases: self.bases.difference(&other.bases).cloned().collect(),
            bonds: self.bonds.difference(&other.bonds).cloned().collect(),
        }
    }

    pub fn intersection(&self, other: &Tokens) -> Tokens {
        Tokens {
            bases: self.bases.intersection(&other.bases).cloned().collect(),
            bonds: self.bonds.intersection(&other.bonds).cloned().collect(),
        }
    }

    pub fn intersects(&self, other: &Tokens) -> bool {
        self.bases.iter().any(|b| other.bases.contains(b)) || self.bonds.iter().any(|b| other.bonds.contains(b))
    }

    pub fn is_subset(&self, other: &Tokens) -> bool {
        self.bases.is_subset(&other.bases) && self.bonds.is_subset(&other.bonds)
    }

    /// Copy of `self` with the given bonds removed.
    pub fn without_bonds(&self, bonds: &BTreeSet<Bond>) -> Tokens {
        Tokens {
            bases: self.bases.clone(),
            bonds: self.bonds.difference(bonds).cloned().collect(),
        }
    }

    /// Bonds whose endpoints are not both present.
    pub fn dangling_bonds(&self) -> impl Iterator<Item = &Bond> {
        self.bonds
            .iter()
            .filter(|b| !(self.bases.contains(&b.lo) && self.bases.contains(&b.hi)))
    }
}

impl fmt::Display for Tokens {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        let mut first = true;
        for b in &self.bases {
            if !first {
                f.write_str(", ")?;
            }
            first = false;
            write!(f, "{b}")?;
        }
        for b in &self.bonds {
            if !first {
                f.write_str(", ")?;
            }
            first = false;
            write!(f, "{b}")?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for Tokens {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Label of one arc: required items and, on incoming arcs only, forbidden items.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct ArcLabel {
    pub positive: Tokens,
    pub negative: Tokens,
}

impl ArcLabel {
    pub fn is_empty(&self) -> bool {
        self.positive.is_empty() && self.negative.is_empty()
    }

    pub fn extend(&mut self, other: &ArcLabel) {
        self.positive.extend(&other.positive);
        self.negative.extend(&other.negative);
    }

    fn conflict(&self) -> Option<String> {
        if let Some(b) = self.positive.bases.intersection(&self.negative.bases).next() {
            return Some(b.to_string());
        }
        self.positive
            .bonds
            .intersection(&self.negative.bonds)
            .next()
            .map(|b| b.to_string())
    }
}

/// Derived per-transition data: pre/postsets, arc labels, guard, effects and effect.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransitionView {
    /// Labels of incoming arcs, keyed by in-place. Empty labels are never stored.
    pub inputs: BTreeMap<PlaceId, ArcLabel>,
    /// Labels of outgoing arcs, keyed by out-place.
    pub outputs: BTreeMap<PlaceId, ArcLabel>,
    /// Union of all incoming labels.
    pub guard: ArcLabel,
    /// Union of all outgoing labels.
    pub effects: ArcLabel,
    /// `effects - guard`: the bonds the transition creates.
    pub effect: Tokens,
}

impl TransitionView {
    /// Whether some in-arc carries a negated base or bond.
    pub fn has_negations(&self) -> bool {
        !self.guard.negative.is_empty()
    }

    fn new(inputs: BTreeMap<PlaceId, ArcLabel>, outputs: BTreeMap<PlaceId, ArcLabel>) -> Self {
        let mut guard = ArcLabel::default();
        for label in inputs.values() {
            guard.extend(label);
        }
        let mut effects = ArcLabel::default();
        for label in outputs.values() {
            effects.extend(label);
        }
        let effect = effects.positive.difference(&guard.positive);
        TransitionView {
            inputs,
            outputs,
            guard,
            effects,
            effect,
        }
    }

    pub fn preset(&self) -> impl Iterator<Item = &PlaceId> {
        self.inputs.keys()
    }

    pub fn postset(&self) -> impl Iterator<Item = &PlaceId> {
        self.outputs.keys()
    }
}

/// The static structure of a reversing Petri net.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Net {
    name: String,
    bases: BTreeSet<BaseId>,
    places: BTreeSet<PlaceId>,
    transitions: BTreeSet<TransId>,
    views: BTreeMap<TransId, TransitionView>,
}

impl Net {
    /// Builds a net, checking that every arc refers to declared identifiers.
    ///
    /// Structural rules (well-formedness, acyclicity, ...) are not enforced
    /// here; see [`crate::validate::validate`]. Empty labels mean "no arc" and
    /// are dropped.
    pub fn new(
        name: impl Into<String>,
        bases: BTreeSet<BaseId>,
        places: BTreeSet<PlaceId>,
        transitions: BTreeSet<TransId>,
        arcs_in: BTreeMap<(PlaceId, TransId), ArcLabel>,
        arcs_out: BTreeMap<(TransId, PlaceId), ArcLabel>,
    ) -> Result<Net, ModelError> {
        if let Some(p) = places.iter().find(|p| transitions.contains(p.as_str())) {
            return Err(ModelError::PlaceTransitionClash(p.to_string()));
        }
        let check_label = |arc: String, label: &ArcLabel| -> Result<(), ModelError> {
            for tokens in [&label.positive, &label.negative] {
                for b in &tokens.bases {
                    if !bases.contains(b) {
                        return Err(ModelError::UnknownBase(b.to_string()));
                    }
                }
                for bond in &tokens.bonds {
                    for b in [&bond.lo, &bond.hi] {
                        if !bases.contains(b) {
                            return Err(ModelError::UnknownBase(b.to_string()));
                        }
                    }
                }
            }
            match label.conflict() {
                Some(item) => Err(ModelError::ConflictingLabel { arc, item }),
                None => Ok(()),
            }
        };

        let mut inputs: BTreeMap<TransId, BTreeMap<PlaceId, ArcLabel>> = BTreeMap::new();
        let mut outputs: BTreeMap<TransId, BTreeMap<PlaceId, ArcLabel>> = BTreeMap::new();
        for ((p, t), label) in arcs_in {
            if !places.contains(&p) {
                return Err(ModelError::UnknownPlace(p.to_string()));
            }
            if !transitions.contains(&t) {
                return Err(ModelError::UnknownTransition(t.to_string()));
            }
            check_label(format!("{p} -> {t}"), &label)?;
            if !label.is_empty() {
                inputs.entry(t).or_default().insert(p, label);
            }
        }
        for ((t, p), label) in arcs_out {
            if !places.contains(&p) {
                return Err(ModelError::UnknownPlace(p.to_string()));
            }
            if !transitions.contains(&t) {
                return Err(ModelError::UnknownTransition(t.to_string()));
            }
            check_label(format!("{t} -> {p}"), &label)?;
            if !label.is_empty() {
                outputs.entry(t).or_default().insert(p, label);
            }
        }
        let views = transitions
            .iter()
            .map(|t| {
                let view = TransitionView::new(
                    inputs.remove(t).unwrap_or_default(),
                    outputs.remove(t).unwrap_or_default(),
                );
                (t.clone(), view)
            })
            .collect();
        Ok(Net {
            name: name.into(),
            bases,
            places,
            transitions,
            views,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn bases(&self) -> &BTreeSet<BaseId> {
        &self.bases
    }

    pub fn places(&self) -> &BTreeSet<PlaceId> {
        &self.places
    }

    pub fn transitions(&self) -> &BTreeSet<TransId> {
        &self.transitions
    }

    pub fn view(&self, t: &TransId) -> Result<&TransitionView, ModelError> {
        self.views
            .get(t)
            .ok_or_else(|| ModelError::UnknownTransition(t.to_string()))
    }

    pub fn views(&self) -> impl Iterator<Item = (&TransId, &TransitionView)> {
        self.views.iter()
    }

    /// `F(x, t)`, if non-empty.
    pub fn arc_in(&self, place: &PlaceId, t: &TransId) -> Option<&ArcLabel> {
        self.views.get(t)?.inputs.get(place)
    }

    /// `F(t, x)`, if non-empty.
    pub fn arc_out(&self, t: &TransId, place: &PlaceId) -> Option<&ArcLabel> {
        self.views.get(t)?.outputs.get(place)
    }

    /// All incoming arcs, ordered by (place, transition).
    pub fn arcs_in(&self) -> BTreeMap<(PlaceId, TransId), ArcLabel> {
        self.views
            .iter()
            .flat_map(|(t, v)| v.inputs.iter().map(move |(p, l)| ((p.clone(), t.clone()), l.clone())))
            .collect()
    }

    /// All outgoing arcs, ordered by (transition, place).
    pub fn arcs_out(&self) -> BTreeMap<(TransId, PlaceId), ArcLabel> {
        self.views
            .iter()
            .flat_map(|(t, v)| v.outputs.iter().map(move |(p, l)| ((t.clone(), p.clone()), l.clone())))
            .collect()
    }

    pub fn base(&self, name: &str) -> Result<BaseId, ModelError> {
        self.bases
            .get(name)
            .cloned()
            .ok_or_else(|| ModelError::UnknownBase(name.to_string()))
    }

    pub fn place(&self, name: &str) -> Result<PlaceId, ModelError> {
        self.places
            .get(name)
            .cloned()
            .ok_or_else(|| ModelError::UnknownPlace(name.to_string()))
    }

    pub fn transition(&self, name: &str) -> Result<TransId, ModelError> {
        self.transitions
            .get(name)
            .cloned()
            .ok_or_else(|| ModelError::UnknownTransition(name.to_string()))
    }
}

/// Distribution of bases and bonds over places.
///
/// Places holding nothing are not stored, so two markings that agree on every
/// place compare equal regardless of how they were built.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Marking {
    contents: BTreeMap<PlaceId, Tokens>,
}

impl Marking {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_places(places: impl IntoIterator<Item = (PlaceId, Tokens)>) -> Self {
        let mut m = Marking::new();
        for (p, tokens) in places {
            m.add(&p, &tokens);
        }
        m
    }

    /// Contents of `place` (empty if nothing is there).
    pub fn get(&self, place: &PlaceId) -> &Tokens {
        self.contents.get(place).unwrap_or(Tokens::empty_ref())
    }

    pub fn set(&mut self, place: PlaceId, tokens: Tokens) {
        if tokens.is_empty() {
            self.contents.remove(&place);
        } else {
            self.contents.insert(place, tokens);
        }
    }

    pub fn add(&mut self, place: &PlaceId, tokens: &Tokens) {
        if tokens.is_empty() {
            return;
        }
        self.contents.entry(place.clone()).or_default().extend(tokens);
    }

    pub fn remove(&mut self, place: &PlaceId, tokens: &Tokens) {
        if let Some(here) = self.contents.get_mut(place) {
            here.remove_all(tokens);
            if here.is_empty() {
                self.contents.remove(place);
            }
        }
    }

    /// Removes the given bonds from every place.
    pub fn remove_bonds_everywhere(&mut self, bonds: &BTreeSet<Bond>) {
        if bonds.is_empty() {
            return;
        }
        for here in self.contents.values_mut() {
            here.bonds.retain(|b| !bonds.contains(b));
        }
        self.contents.retain(|_, t| !t.is_empty());
    }

    /// Non-empty places and their contents.
    pub fn iter(&self) -> impl Iterator<Item = (&PlaceId, &Tokens)> {
        self.contents.iter()
    }

    /// Places holding `base`.
    pub fn places_of(&self, base: &BaseId) -> Vec<&PlaceId> {
        self.contents
            .iter()
            .filter(|(_, t)| t.bases.contains(base))
            .map(|(p, _)| p)
            .collect()
    }

    /// Places holding `bond`.
    pub fn places_of_bond(&self, bond: &Bond) -> Vec<&PlaceId> {
        self.contents
            .iter()
            .filter(|(_, t)| t.bonds.contains(bond))
            .map(|(p, _)| p)
            .collect()
    }

    /// The unique place holding `base`, if there is exactly one.
    pub fn place_of(&self, base: &BaseId) -> Option<&PlaceId> {
        let places = self.places_of(base);
        match places.as_slice() {
            [p] => Some(p),
            _ => None,
        }
    }

    pub fn all_bonds(&self) -> BTreeSet<Bond> {
        self.contents.values().flat_map(|t| t.bonds.iter().cloned()).collect()
    }
}

/// Non-empty places as `u:{c} y:{a, b, a-b}`.
impl fmt::Display for Marking {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (p, t)) in self.contents.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{p}:{t}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Marking {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.contents.iter()).finish()
    }
}

/// Per-transition execution keys. `None` is the empty history (never executed,
/// or reversed); `Some(k)` orders the executed, not-yet-reversed transitions.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct History {
    keys: BTreeMap<TransId, Option<u64>>,
}

impl History {
    /// The all-empty history over the net's transitions.
    pub fn initial(net: &Net) -> Self {
        History {
            keys: net.transitions().iter().map(|t| (t.clone(), None)).collect(),
        }
    }

    pub fn from_keys(keys: impl IntoIterator<Item = (TransId, Option<u64>)>) -> Self {
        History {
            keys: keys.into_iter().collect(),
        }
    }

    /// Key of `t`; `None` for the empty history or an unknown transition.
    pub fn get(&self, t: &TransId) -> Option<u64> {
        self.keys.get(t).copied().flatten()
    }

    pub fn covers(&self, t: &TransId) -> bool {
        self.keys.contains_key(t)
    }

    pub fn transitions(&self) -> impl Iterator<Item = &TransId> {
        self.keys.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&TransId, Option<u64>)> {
        self.keys.iter().map(|(t, k)| (t, *k))
    }

    /// Executed transitions with their keys.
    pub fn executed(&self) -> impl Iterator<Item = (&TransId, u64)> {
        self.keys.iter().filter_map(|(t, k)| k.map(|k| (t, k)))
    }

    /// Largest key present, 0 when nothing has been executed.
    pub fn max_key(&self) -> u64 {
        self.executed().map(|(_, k)| k).max().unwrap_or(0)
    }

    pub fn with_key(&self, t: &TransId, key: Option<u64>) -> History {
        let mut out = self.clone();
        out.keys.insert(t.clone(), key);
        out
    }

    /// Whether all present keys are pairwise distinct.
    pub fn keys_distinct(&self) -> bool {
        let mut seen = BTreeSet::new();
        self.executed().all(|(_, k)| seen.insert(k))
    }
}

impl fmt::Debug for History {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut m = f.debug_map();
        for (t, k) in &self.keys {
            match k {
                Some(k) => m.entry(t, k),
                None => m.entry(t, &"ε"),
            };
        }
        m.finish()
    }
}

/// A marking paired with a history.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct State {
    pub marking: Marking,
    pub history: History,
}

impl State {
    pub fn new(marking: Marking, history: History) -> Self {
        State { marking, history }
    }

    /// `(m0, H0)`.
    pub fn initial(net: &Net, m0: &Marking) -> Self {
        State {
            marking: m0.clone(),
            history: History::initial(net),
        }
    }
}

/// Reversal strategy.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Mode {
    /// Backtracking: only the most recent transition.
    Bt,
    /// Causal order: any transition whose consequences were already undone.
    Co,
    /// Out of causal order: any executed transition.
    O,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::Bt, Mode::Co, Mode::O];

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Bt => "bt",
            Mode::Co => "co",
            Mode::O => "o",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = ActionParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "bt" => Ok(Mode::Bt),
            "co" => Ok(Mode::Co),
            "o" => Ok(Mode::O),
            other => Err(ActionParseError::UnknownMode(other.to_string())),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Direction {
    Forward,
    Reverse(Mode),
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Direction::Forward => f.write_str("forward"),
            Direction::Reverse(m) => write!(f, "{m}"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ActionParseError {
    #[error("unknown reversal mode `{0}` (expected bt, co or o)")]
    UnknownMode(String),
    #[error("malformed action `{0}`")]
    Malformed(String),
}

/// One step of a trace: fire `transition` forward, or reverse it under a mode.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Action {
    pub transition: TransId,
    pub direction: Direction,
}

impl Action {
    pub fn forward(t: TransId) -> Self {
        Action {
            transition: t,
            direction: Direction::Forward,
        }
    }

    pub fn reverse(t: TransId, mode: Mode) -> Self {
        Action {
            transition: t,
            direction: Direction::Reverse(mode),
        }
    }

    pub fn is_forward(&self) -> bool {
        self.direction == Direction::Forward
    }

    /// The cancelling action: `t` for `~t:m`, and `~t:mode` for `t`.
    pub fn inverse(&self, mode: Mode) -> Action {
        match self.direction {
            Direction::Forward => Action::reverse(self.transition.clone(), mode),
            Direction::Reverse(_) => Action::forward(self.transition.clone()),
        }
    }

    /// Parses `t` or `~t:mode`; a bare `~t` takes `default_mode`.
    pub fn parse(s: &str, default_mode: Mode) -> Result<Action, ActionParseError> {
        let s = s.trim();
        let malformed = || ActionParseError::Malformed(s.to_string());
        if let Some(rest) = s.strip_prefix('~') {
            let (name, mode) = match rest.split_once(':') {
                Some((name, mode)) => (name.trim(), mode.trim().parse()?),
                None => (rest.trim(), default_mode),
            };
            let t = TransId::new(name).map_err(|_| malformed())?;
            Ok(Action::reverse(t, mode))
        } else {
            let t = TransId::new(s).map_err(|_| malformed())?;
            Ok(Action::forward(t))
        }
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.direction {
            Direction::Forward => write!(f, "{}", self.transition),
            Direction::Reverse(m) => write!(f, "~{}:{}", self.transition, m),
        }
    }
}

impl fmt::Debug for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Action {
    type Err = ActionParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Action::parse(s, Mode::Co)
    }
}

/// A sequence of actions.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Trace(pub Vec<Action>);

impl Trace {
    pub fn new(actions: Vec<Action>) -> Self {
        Trace(actions)
    }

    pub fn empty() -> Self {
        Trace(Vec::new())
    }

    /// Parses a comma-separated trace such as `t1,t2,~t1:o`.
    pub fn parse(s: &str, default_mode: Mode) -> Result<Trace, ActionParseError> {
        if s.trim().is_empty() {
            return Ok(Trace::empty());
        }
        s.split(',')
            .map(|a| Action::parse(a, default_mode))
            .collect::<Result<Vec<_>, _>>()
            .map(Trace)
    }

    pub fn actions(&self) -> &[Action] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_forward(&self) -> bool {
        self.0.iter().all(Action::is_forward)
    }
}

impl fmt::Display for Trace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{a}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Trace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "⟨{self}⟩")
    }
}

impl FromStr for Trace {
    type Err = ActionParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Trace::parse(s, Mode::Co)
    }
}

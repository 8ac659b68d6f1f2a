//! Properties checked over every state and edge of an explored space.
//!
//! States are visited in discovery order, so the first counterexample found
//! lies at minimal depth.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::connectivity::components;
use crate::equivalence::history_equiv;
use crate::explorer::literal::fire_reverse_o_literal;
use crate::explorer::{ExploreMode, StateSpace};
use crate::model::{Action, Direction, History, Mode, State, Trace};
use crate::semantics::{
    canonicalize, co_enabled, co_enabled_outplace, fire_forward, fire_reverse_btco, last_transition, step, EnabledSets,
    SemanticsError,
};

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Property {
    /// Each base in exactly one place, each bond in at most one, bonds only
    /// with their endpoints, history keys distinct.
    Preservation,
    /// A step creates exactly the bonds its transition creates when going
    /// forward, destroys exactly those when reversing, and leaves the presence
    /// of every other bond unchanged.
    Bonds,
    /// Firing then reversing (bt and co) restores the state exactly; reversing
    /// a transition without negated guard items then firing it again restores
    /// the marking and the executed set.
    Loop,
    /// Causal-order enabledness agrees with the out-place formulation.
    Outplace,
    /// bt-enabled within co-enabled within o-enabled, with equal results
    /// wherever two modes apply.
    Inclusions,
    /// Every component sits in an out-place of the last transition that
    /// touched it, or in its initial place if there is none.
    Homes,
    /// Enabled sets and successors are unchanged by order-preserving key
    /// relabelling.
    Canonical,
    /// Out-of-causal-order reversal agrees with its place-by-place formulation.
    Literal,
}

impl Property {
    pub const ALL: [Property; 8] = [
        Property::Preservation,
        Property::Bonds,
        Property::Loop,
        Property::Outplace,
        Property::Inclusions,
        Property::Homes,
        Property::Canonical,
        Property::Literal,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Property::Preservation => "preservation",
            Property::Bonds => "bonds",
            Property::Loop => "loop",
            Property::Outplace => "prop4",
            Property::Inclusions => "inclusions",
            Property::Homes => "homes",
            Property::Canonical => "canonical",
            Property::Literal => "literal",
        }
    }

    /// Exploration modes the property is meaningful for.
    pub fn modes(self) -> &'static [ExploreMode] {
        use ExploreMode::*;
        match self {
            Property::Preservation | Property::Bonds | Property::Homes | Property::Canonical => &[Forward, Bt, Co, O],
            Property::Loop | Property::Outplace | Property::Inclusions => &[Forward, Bt, Co],
            Property::Literal => &[O],
        }
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Property {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Property::ALL.into_iter().find(|p| p.as_str() == s).ok_or_else(|| {
            let names: Vec<_> = Property::ALL.iter().map(|p| p.as_str()).collect();
            format!("unknown property `{s}` (expected one of {})", names.join(", "))
        })
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PropertyError {
    #[error("property {property} cannot be checked on a {mode} exploration")]
    ModeMismatch { property: Property, mode: ExploreMode },
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Counterexample {
    /// A shortest trace reaching `state`.
    pub trace: Trace,
    pub state: State,
    pub action: Option<Action>,
    pub clause: String,
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "after [{}]", self.trace)?;
        if let Some(a) = &self.action {
            write!(f, " then {a}")?;
        }
        write!(f, ": {} (marking {})", self.clause, self.state.marking)
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Report {
    pub property: Property,
    /// Number of states and edges inspected.
    pub checked: usize,
    pub counterexample: Option<Counterexample>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.counterexample {
            None => write!(f, "{}: pass ({} checks)", self.property, self.checked),
            Some(c) => write!(f, "{}: FAIL {c}", self.property),
        }
    }
}

struct Checker<'a> {
    space: &'a StateSpace,
    checked: usize,
}

type Found = Option<(usize, Option<Action>, String)>;

impl Checker<'_> {
    fn states(
        &mut self,
        mut f: impl FnMut(&State) -> Result<Option<String>, SemanticsError>,
    ) -> Result<Found, SemanticsError> {
        for (i, s) in self.space.states().iter().enumerate() {
            self.checked += 1;
            if let Some(clause) = f(s)? {
                return Ok(Some((i, None, clause)));
            }
        }
        Ok(None)
    }

    fn edges(
        &mut self,
        mut f: impl FnMut(&State, &Action, &State) -> Result<Option<String>, SemanticsError>,
    ) -> Result<Found, SemanticsError> {
        // Edges are grouped by source in discovery order already.
        for e in self.space.edges() {
            self.checked += 1;
            let states = self.space.states();
            if let Some(clause) = f(&states[e.from], &e.action, &states[e.to])? {
                return Ok(Some((e.from, Some(e.action.clone()), clause)));
            }
        }
        Ok(None)
    }
}

pub fn check_property(space: &StateSpace, property: Property) -> Result<Report, PropertyError> {
    if !property.modes().contains(&space.mode()) {
        return Err(PropertyError::ModeMismatch {
            property,
            mode: space.mode(),
        });
    }
    let net = space.net();
    let m0 = space.initial_marking();
    let mut c = Checker { space, checked: 0 };
    let found = match property {
        Property::Preservation => c.states(|s| {
            for a in net.bases() {
                let n = s.marking.places_of(a).len();
                if n != 1 {
                    return Ok(Some(format!("base {a} occurs in {n} places")));
                }
            }
            for b in s.marking.all_bonds() {
                let n = s.marking.places_of_bond(&b).len();
                if n > 1 {
                    return Ok(Some(format!("bond {b} occurs in {n} places")));
                }
            }
            for (x, tokens) in s.marking.iter() {
                if let Some(b) = tokens.dangling_bonds().next() {
                    return Ok(Some(format!("bond {b} in {x} lacks an endpoint")));
                }
            }
            Ok((!s.history.keys_distinct()).then(|| "history keys repeat".to_string()))
        })?,
        Property::Bonds => c.edges(|before, a, after| {
            let effect = &net.view(&a.transition)?.effect.bonds;
            let (b0, b1) = (before.marking.all_bonds(), after.marking.all_bonds());
            for bond in b0.union(&b1) {
                let (was, is) = (b0.contains(bond), b1.contains(bond));
                let ok = match (effect.contains(bond), a.is_forward()) {
                    (true, true) => !was && is,
                    (true, false) => was && !is,
                    (false, _) => was == is,
                };
                if !ok {
                    return Ok(Some(format!(
                        "bond {bond}: present before {was}, after {is}, created by the transition {}",
                        effect.contains(bond)
                    )));
                }
            }
            Ok(None)
        })?,
        Property::Loop => c.edges(|before, a, after| {
            let t = &a.transition;
            if a.is_forward() {
                for mode in [Mode::Bt, Mode::Co] {
                    match fire_reverse_btco(net, after, t, mode) {
                        Ok(back) if canonicalize(&back) == *before => {}
                        Ok(_) => return Ok(Some(format!("reversing under {mode} does not restore the state"))),
                        Err(_) => return Ok(Some(format!("reversal under {mode} is not enabled"))),
                    }
                }
            } else if !net.view(t).map_err(SemanticsError::from)?.has_negations() {
                // A reversal can put back a token that a negated guard forbids,
                // so the converse only holds for transitions without negations.
                match fire_forward(net, after, t) {
                    Ok(again) => {
                        if again.marking != before.marking {
                            return Ok(Some("firing again does not restore the marking".into()));
                        }
                        if !history_equiv(&again.history, &before.history).unwrap_or(false) {
                            return Ok(Some("firing again does not restore the executed set".into()));
                        }
                    }
                    Err(_) => return Ok(Some("firing again is not enabled".into())),
                }
            }
            Ok(None)
        })?,
        Property::Outplace => c.states(|s| {
            for t in net.transitions() {
                let (a, b) = (co_enabled(net, s, t)?, co_enabled_outplace(net, s, t)?);
                if a != b {
                    return Ok(Some(format!("{t}: causal enabledness {a}, out-place formulation {b}")));
                }
            }
            Ok(None)
        })?,
        Property::Inclusions => c.states(|s| {
            let e = EnabledSets::of(net, s)?;
            if !e.bt.is_subset(&e.co) {
                return Ok(Some("bt-enabled set not within co-enabled set".into()));
            }
            if !e.co.is_subset(&e.o) {
                return Ok(Some("co-enabled set not within o-enabled set".into()));
            }
            for t in &e.co {
                let co = step(net, s, m0, &Action::reverse(t.clone(), Mode::Co))?;
                let o = step(net, s, m0, &Action::reverse(t.clone(), Mode::O))?;
                if co != o {
                    return Ok(Some(format!("{t}: co and o reversal disagree")));
                }
                if e.bt.contains(t) {
                    let bt = step(net, s, m0, &Action::reverse(t.clone(), Mode::Bt))?;
                    if bt != co {
                        return Ok(Some(format!("{t}: bt and co reversal disagree")));
                    }
                }
            }
            Ok(None)
        })?,
        Property::Homes => c.states(|s| {
            for (x, contents) in s.marking.iter() {
                let comps = components(contents).map_err(|e| SemanticsError::BondClosure(e.to_string()))?;
                for comp in comps {
                    let home = match last_transition(net, &comp, &s.history) {
                        Some(t) => net.arc_out(&t, x).is_some_and(|l| l.positive.intersects(&comp)),
                        None => comp.bases.is_subset(&m0.get(x).bases),
                    };
                    if !home {
                        return Ok(Some(format!("component {comp} in {x} is away from home")));
                    }
                }
            }
            Ok(None)
        })?,
        Property::Canonical => c.states(|s| {
            let stretched = State::new(s.marking.clone(), stretch(&s.history));
            if EnabledSets::of(net, s)? != EnabledSets::of(net, &stretched)? {
                return Ok(Some("enabled sets change under key relabelling".into()));
            }
            for t in net.transitions() {
                for d in [
                    Direction::Forward,
                    Direction::Reverse(Mode::Bt),
                    Direction::Reverse(Mode::Co),
                    Direction::Reverse(Mode::O),
                ] {
                    let a = Action {
                        transition: t.clone(),
                        direction: d,
                    };
                    if let (Ok(x), Ok(y)) = (step(net, s, m0, &a), step(net, &stretched, m0, &a)) {
                        if canonicalize(&x) != canonicalize(&y) {
                            return Ok(Some(format!("{a} gives different results under key relabelling")));
                        }
                    }
                }
            }
            Ok(None)
        })?,
        Property::Literal => c.edges(|before, a, after| {
            if a.direction != Direction::Reverse(Mode::O) {
                return Ok(None);
            }
            let literal = fire_reverse_o_literal(net, before, m0, &a.transition)?;
            Ok((canonicalize(&literal) != *after)
                .then(|| format!("place-by-place formulation gives {}", literal.marking)))
        })?,
    };
    Ok(Report {
        property,
        checked: c.checked,
        counterexample: found.map(|(i, action, clause)| Counterexample {
            trace: space.trace_to(i),
            state: space.states()[i].clone(),
            action,
            clause,
        }),
    })
}

/// Order-preserving relabelling `k -> 3k + 1`.
fn stretch(h: &History) -> History {
    History::from_keys(h.iter().map(|(t, k)| (t.clone(), k.map(|k| 3 * k + 1))))
}

/// Checks several properties, skipping those not meaningful for the mode.
pub fn check_all(space: &StateSpace, properties: &BTreeSet<Property>) -> Result<Vec<Report>, PropertyError> {
    properties
        .iter()
        .filter(|p| p.modes().contains(&space.mode()))
        .map(|p| check_property(space, *p))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::explorer::explore;
    use crate::nets;

    #[test]
    fn bundled_nets_satisfy_all_properties() {
        for (name, src) in nets::ALL {
            let (net, m0) = crate::parse_net(src).unwrap();
            for mode in ExploreMode::ALL {
                let space = explore(&net, &m0, mode, 8).unwrap();
                for p in Property::ALL {
                    if !p.modes().contains(&mode) {
                        assert!(matches!(
                            check_property(&space, p),
                            Err(PropertyError::ModeMismatch { .. })
                        ));
                        continue;
                    }
                    let r = check_property(&space, p).unwrap();
                    assert!(r.passed(), "{name} {mode}: {r}");
                    assert!(r.checked > 0);
                }
            }
        }
    }

    #[test]
    fn property_names_round_trip() {
        for p in Property::ALL {
            assert_eq!(p.as_str().parse::<Property>().unwrap(), p);
        }
        assert!("nope".parse::<Property>().is_err());
    }
}

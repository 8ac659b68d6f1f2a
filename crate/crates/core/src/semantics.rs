//! Transition relations: forward firing and the three reversal strategies.
//!
//! Every function is a pure `State -> State` map; nothing is mutated in place.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::connectivity::{components, connected, connected_all};
use crate::model::{
    Action, Component, Direction, History, Marking, Mode, ModelError, Net, PlaceId, State, Tokens, TransId,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SemanticsError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("transition `{transition}` is not enabled ({direction})")]
    NotEnabled { transition: TransId, direction: Direction },
    #[error(
        "component {component} has no home: no executed transition touches it and its bases start in different places"
    )]
    HomelessComponent { component: Component },
    #[error("component {component} could return to several out-places of `{transition}`")]
    AmbiguousHome { component: Component, transition: TransId },
    #[error("bond {0} is present without both of its endpoints")]
    BondClosure(String),
}

/// Whether `t` may fire forward in `s`.
///
/// On top of the four label/connectivity clauses, a transition that is
/// currently executed (non-empty history) cannot fire again: a history holds a
/// single key per transition.
pub fn forward_enabled(net: &Net, s: &State, t: &TransId) -> Result<bool, SemanticsError> {
    let view = net.view(t)?;
    if s.history.get(t).is_some() {
        return Ok(false);
    }
    let m = &s.marking;

    // Required items present, forbidden items absent, in each in-place.
    for (x, label) in &view.inputs {
        let here = m.get(x);
        if !label.positive.is_subset(here) || label.negative.intersects(here) {
            return Ok(false);
        }
    }

    // Bases sent to different out-places must not be connected in an in-place.
    if view.outputs.len() > 1 {
        for x in view.preset() {
            for comp in components(m.get(x)).map_err(|e| SemanticsError::BondClosure(e.to_string()))? {
                let targets = view
                    .outputs
                    .values()
                    .filter(|l| l.positive.bases.iter().any(|a| comp.bases.contains(a)))
                    .count();
                if targets > 1 {
                    return Ok(false);
                }
            }
        }
    }

    // An output bond already present in an in-place must be required there.
    for bond in &view.effects.positive.bonds {
        for (y, label) in &view.inputs {
            if m.get(y).bonds.contains(bond) && !label.positive.bonds.contains(bond) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

pub fn fire_forward(net: &Net, s: &State, t: &TransId) -> Result<State, SemanticsError> {
    if !forward_enabled(net, s, t)? {
        return Err(SemanticsError::NotEnabled {
            transition: t.clone(),
            direction: Direction::Forward,
        });
    }
    let view = net.view(t)?;
    let before = &s.marking;
    let mut m = before.clone();
    for (x, label) in &view.inputs {
        let taken = connected_all(&label.positive.bases, before.get(x));
        m.remove(x, &taken);
    }
    for (y, label) in &view.outputs {
        let mut gained = label.positive.clone();
        for x in view.preset() {
            gained.extend(&connected_all(&label.positive.bases, before.get(x)));
        }
        m.add(y, &gained);
    }
    let history = s.history.with_key(t, Some(s.history.max_key() + 1));
    Ok(State::new(m, history))
}

/// `t` carries the largest key in the history.
pub fn bt_enabled(net: &Net, s: &State, t: &TransId) -> Result<bool, SemanticsError> {
    net.view(t)?;
    Ok(match s.history.get(t) {
        Some(k) => k == s.history.max_key(),
        None => false,
    })
}

/// Causal-order enabledness: every transition whose guard meets the current
/// component of one of `t`'s output bases was executed no later than `t`.
pub fn co_enabled(net: &Net, s: &State, t: &TransId) -> Result<bool, SemanticsError> {
    let view = net.view(t)?;
    let Some(key) = s.history.get(t) else {
        return Ok(false);
    };
    for a in &view.effects.positive.bases {
        for y in s.marking.places_of(a) {
            let comp = connected(a, s.marking.get(y));
            for (other, other_view) in net.views() {
                if other_view.guard.positive.intersects(&comp) {
                    if let Some(k) = s.history.get(other) {
                        if k > key {
                            return Ok(false);
                        }
                    }
                }
            }
        }
    }
    Ok(true)
}

/// Causal-order enabledness via out-place availability: every base and bond
/// on each outgoing arc of `t` is still in that out-place.
pub fn co_enabled_outplace(net: &Net, s: &State, t: &TransId) -> Result<bool, SemanticsError> {
    let view = net.view(t)?;
    if s.history.get(t).is_none() {
        return Ok(false);
    }
    Ok(view
        .outputs
        .iter()
        .all(|(x, label)| label.positive.is_subset(s.marking.get(x))))
}

pub fn o_enabled(net: &Net, s: &State, t: &TransId) -> Result<bool, SemanticsError> {
    net.view(t)?;
    Ok(s.history.get(t).is_some())
}

/// Enabledness of `t` in the given direction.
pub fn enabled(net: &Net, s: &State, t: &TransId, direction: Direction) -> Result<bool, SemanticsError> {
    match direction {
        Direction::Forward => forward_enabled(net, s, t),
        Direction::Reverse(Mode::Bt) => bt_enabled(net, s, t),
        Direction::Reverse(Mode::Co) => co_enabled(net, s, t),
        Direction::Reverse(Mode::O) => o_enabled(net, s, t),
    }
}

/// The most recently executed transition whose effects meet `component`.
pub fn last_transition(net: &Net, component: &Tokens, h: &History) -> Option<TransId> {
    net.views()
        .filter_map(|(t, view)| {
            let key = h.get(t)?;
            view.effects.positive.intersects(component).then_some((key, t))
        })
        .max_by_key(|(key, _)| *key)
        .map(|(_, t)| t.clone())
}

/// Backtracking or causal-order reversal (both share one update rule).
pub fn fire_reverse_btco(net: &Net, s: &State, t: &TransId, mode: Mode) -> Result<State, SemanticsError> {
    let ok = match mode {
        Mode::Bt => bt_enabled(net, s, t)?,
        Mode::Co => co_enabled(net, s, t)?,
        Mode::O => {
            return Err(SemanticsError::NotEnabled {
                transition: t.clone(),
                direction: Direction::Reverse(mode),
            })
        }
    };
    if !ok {
        return Err(SemanticsError::NotEnabled {
            transition: t.clone(),
            direction: Direction::Reverse(mode),
        });
    }
    Ok(reverse_to_inputs(net, s, t)?)
}

fn reverse_to_inputs(net: &Net, s: &State, t: &TransId) -> Result<State, ModelError> {
    let view = net.view(t)?;
    let before = &s.marking;
    let mut m = before.clone();
    for (y, label) in &view.outputs {
        let taken = connected_all(&label.positive.bases, before.get(y));
        m.remove(y, &taken);
    }
    for (x, in_label) in &view.inputs {
        let mut gained = Tokens::new();
        for (y, out_label) in &view.outputs {
            let released = before.get(y).without_bonds(&view.effect.bonds);
            let seeds = in_label.positive.bases.intersection(&out_label.positive.bases);
            gained.extend(&connected_all(seeds, &released));
        }
        m.add(x, &gained);
    }
    Ok(State::new(m, s.history.with_key(t, None)))
}

/// Out-of-causal-order reversal.
///
/// Destroys the bonds `t` created, clears `t`'s key, then sends every
/// component to its home: the out-place of the last executed transition that
/// touched it, or its initial place if there is none.
pub fn fire_reverse_o(net: &Net, s: &State, m0: &Marking, t: &TransId) -> Result<State, SemanticsError> {
    if !o_enabled(net, s, t)? {
        return Err(SemanticsError::NotEnabled {
            transition: t.clone(),
            direction: Direction::Reverse(Mode::O),
        });
    }
    let view = net.view(t)?;
    let history = s.history.with_key(t, None);
    let mut broken = s.marking.clone();
    broken.remove_bonds_everywhere(&view.effect.bonds);

    let mut m = Marking::new();
    for (place, contents) in broken.iter() {
        let comps = components(contents).map_err(|e| SemanticsError::BondClosure(e.to_string()))?;
        for comp in comps {
            let home = home_of(net, &comp, &history, m0, place)?;
            m.add(&home, &comp);
        }
    }
    Ok(State::new(m, history))
}

/// Where a component belongs under `h`. A component already sitting in one
/// of its candidate homes stays put.
pub fn home_of(
    net: &Net,
    comp: &Component,
    h: &History,
    m0: &Marking,
    current: &PlaceId,
) -> Result<PlaceId, SemanticsError> {
    match last_transition(net, comp, h) {
        Some(last) => {
            let view = net.view(&last)?;
            let candidates: Vec<&PlaceId> = view
                .outputs
                .iter()
                .filter(|(_, l)| l.positive.intersects(comp))
                .map(|(x, _)| x)
                .collect();
            match candidates.as_slice() {
                [x] => Ok((*x).clone()),
                _ if candidates.contains(&current) => Ok(current.clone()),
                _ => Err(SemanticsError::AmbiguousHome {
                    component: comp.clone(),
                    transition: last,
                }),
            }
        }
        None => m0
            .iter()
            .find(|(_, tokens)| comp.bases.is_subset(&tokens.bases))
            .map(|(x, _)| x.clone())
            .ok_or_else(|| SemanticsError::HomelessComponent {
                component: comp.clone(),
            }),
    }
}

/// Applies one action.
pub fn step(net: &Net, s: &State, m0: &Marking, action: &Action) -> Result<State, SemanticsError> {
    let t = &action.transition;
    match action.direction {
        Direction::Forward => fire_forward(net, s, t),
        Direction::Reverse(Mode::O) => fire_reverse_o(net, s, m0, t),
        Direction::Reverse(mode) => fire_reverse_btco(net, s, t, mode),
    }
}

/// Applies a sequence of actions, stopping at the first that is not enabled.
pub fn run(net: &Net, start: &State, m0: &Marking, actions: &[Action]) -> Result<State, (usize, SemanticsError)> {
    let mut s = start.clone();
    for (i, a) in actions.iter().enumerate() {
        s = step(net, &s, m0, a).map_err(|e| (i, e))?;
    }
    Ok(s)
}

/// Rank-compresses present keys to `1..=k`, keeping their order.
pub fn canonicalize_history(h: &History) -> History {
    let mut executed: Vec<(u64, &TransId)> = h.executed().map(|(t, k)| (k, t)).collect();
    executed.sort();
    let mut out = h.clone();
    for (rank, (_, t)) in executed.into_iter().enumerate() {
        out = out.with_key(t, Some(rank as u64 + 1));
    }
    out
}

pub fn canonicalize(s: &State) -> State {
    State::new(s.marking.clone(), canonicalize_history(&s.history))
}

/// Transitions enabled in each direction.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EnabledSets {
    pub forward: BTreeSet<TransId>,
    pub bt: BTreeSet<TransId>,
    pub co: BTreeSet<TransId>,
    pub o: BTreeSet<TransId>,
}

impl EnabledSets {
    pub fn of(net: &Net, s: &State) -> Result<EnabledSets, SemanticsError> {
        let mut out = EnabledSets::default();
        for t in net.transitions() {
            if forward_enabled(net, s, t)? {
                out.forward.insert(t.clone());
            }
            if bt_enabled(net, s, t)? {
                out.bt.insert(t.clone());
            }
            if co_enabled(net, s, t)? {
                out.co.insert(t.clone());
            }
            if o_enabled(net, s, t)? {
                out.o.insert(t.clone());
            }
        }
        Ok(out)
    }

    pub fn for_mode(&self, mode: Mode) -> &BTreeSet<TransId> {
        match mode {
            Mode::Bt => &self.bt,
            Mode::Co => &self.co,
            Mode::O => &self.o,
        }
    }
}

/// Forward actions plus reversals under `mode` (if any) enabled in `s`,
/// ordered by transition name with forward actions first.
pub fn enabled_actions(net: &Net, s: &State, mode: Option<Mode>) -> Result<Vec<Action>, SemanticsError> {
    let mut out = Vec::new();
    for t in net.transitions() {
        if forward_enabled(net, s, t)? {
            out.push(Action::forward(t.clone()));
        }
    }
    if let Some(mode) = mode {
        for t in net.transitions() {
            if enabled(net, s, t, Direction::Reverse(mode))? {
                out.push(Action::reverse(t.clone(), mode));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Trace;
    use crate::nets;

    struct Fixture {
        net: Net,
        m0: Marking,
    }

    impl Fixture {
        fn new(src: &str) -> Self {
            let (net, m0) = crate::parse_net(src).unwrap();
            Fixture { net, m0 }
        }

        fn run(&self, trace: &str) -> State {
            let trace = Trace::parse(trace, Mode::Co).unwrap();
            run(
                &self.net,
                &State::initial(&self.net, &self.m0),
                &self.m0,
                trace.actions(),
            )
            .unwrap()
        }

        fn t(&self, name: &str) -> TransId {
            self.net.transition(name).unwrap()
        }

        fn set(&self, s: &State, mode: Option<Mode>) -> Vec<String> {
            let e = EnabledSets::of(&self.net, s).unwrap();
            let set = match mode {
                None => &e.forward,
                Some(m) => e.for_mode(m),
            };
            set.iter().map(|t| t.to_string()).collect()
        }
    }

    fn tokens(text: &str) -> Tokens {
        // `a b a-b` style: whitespace separated bases and bonds.
        let mut out = Tokens::new();
        for item in text.split_whitespace() {
            match item.split_once('-') {
                Some((x, y)) => {
                    out.bonds
                        .insert(crate::model::Bond::new(x.parse().unwrap(), y.parse().unwrap()).unwrap());
                }
                None => {
                    out.bases.insert(item.parse().unwrap());
                }
            }
        }
        out
    }

    #[test]
    fn catalysis_forward_run() {
        let f = Fixture::new(nets::CATALYSIS);
        let s0 = State::initial(&f.net, &f.m0);
        assert!(forward_enabled(&f.net, &s0, &f.t("t1")).unwrap());
        assert!(!forward_enabled(&f.net, &s0, &f.t("t2")).unwrap());

        let s1 = fire_forward(&f.net, &s0, &f.t("t1")).unwrap();
        assert_eq!(s1.marking.to_string(), "w:{b} x:{a, c, a-c}");
        assert_eq!(s1.history.get(&f.t("t1")), Some(1));
        let s2 = fire_forward(&f.net, &s1, &f.t("t2")).unwrap();
        assert_eq!(s2.marking.to_string(), "y:{a, b, c, a-b, a-c}");
        assert_eq!(s2.history.get(&f.t("t2")), Some(2));
    }

    #[test]
    fn transition_views_of_catalysis() {
        let f = Fixture::new(nets::CATALYSIS);
        let t2 = f.net.view(&f.t("t2")).unwrap();
        assert_eq!(t2.guard.positive, tokens("a b"));
        assert_eq!(t2.effects.positive, tokens("a b a-b"));
        assert_eq!(t2.effect, tokens("a-b"));
        assert_eq!(f.net.view(&f.t("t1")).unwrap().effect, tokens("a-c"));
        let causal = Fixture::new(nets::CAUSAL);
        assert!(causal.net.view(&causal.t("t1")).unwrap().effect.is_empty());
    }

    #[test]
    fn single_token_move() {
        let f = Fixture::new(
            "net n { bases: a; places: p, q; transitions: t; arc p -> t { a } arc t -> q { a } initial { p: { a } } }",
        );
        let s = f.run("t");
        assert_eq!(s.marking.to_string(), "q:{a}");
    }

    #[test]
    fn forward_keys_follow_max_plus_one() {
        let f = Fixture::new(nets::CAUSAL);
        // Independent ledger: each forward step takes one more than the largest live key.
        let mut ledger: BTreeMap<String, u64> = BTreeMap::new();
        let mut s = State::initial(&f.net, &f.m0);
        for act in ["t1", "~t1:co", "t2", "t1"] {
            let a = Action::parse(act, Mode::Co).unwrap();
            s = step(&f.net, &s, &f.m0, &a).unwrap();
            let name = a.transition.to_string();
            if a.is_forward() {
                let next = ledger.values().max().copied().unwrap_or(0) + 1;
                ledger.insert(name, next);
            } else {
                ledger.remove(&name);
            }
        }
        assert_eq!(s.history.get(&f.t("t1")), ledger.get("t1").copied());
        assert_eq!(s.history.get(&f.t("t1")), Some(2));
        assert_eq!(s.history.get(&f.t("t2")), Some(1));
    }

    use std::collections::BTreeMap;

    #[test]
    fn forking_output_blocked_by_bond() {
        let src = |initial: &str| {
            format!(
                "net n {{ bases: a, b; places: x, y1, y2, w; transitions: t;
                 arc x -> t {{ a, b }} arc t -> y1 {{ a }} arc t -> y2 {{ b }}
                 initial {{ {initial} }} }}"
            )
        };
        let bonded = Fixture::new(&src("x: { a, b, a-b }"));
        let s = State::initial(&bonded.net, &bonded.m0);
        // Presence clauses hold; only the fork clause fails.
        let view = bonded.net.view(&bonded.t("t")).unwrap();
        let x = bonded.net.place("x").unwrap();
        assert!(view.inputs[&x].positive.is_subset(s.marking.get(&x)));
        assert!(!forward_enabled(&bonded.net, &s, &bonded.t("t")).unwrap());

        let loose = Fixture::new(&src("x: { a, b }"));
        let s = State::initial(&loose.net, &loose.m0);
        assert!(forward_enabled(&loose.net, &s, &loose.t("t")).unwrap());
        assert_eq!(loose.run("t").marking.to_string(), "y1:{a} y2:{b}");
    }

    #[test]
    fn output_bond_already_present_must_be_required() {
        // t creates a-b on y, but a-b already sits in x without being asked for.
        let f = Fixture::new(
            "net n { bases: a, b; places: x, y; transitions: t;
             arc x -> t { a, b } arc t -> y { a, b, a-b }
             initial { x: { a, b, a-b } } }",
        );
        let s = State::initial(&f.net, &f.m0);
        assert!(!forward_enabled(&f.net, &s, &f.t("t")).unwrap());
    }

    #[test]
    fn empty_transition_fires_once() {
        let f = Fixture::new("net n { places: p; transitions: t; }");
        let s = State::initial(&f.net, &f.m0);
        assert!(forward_enabled(&f.net, &s, &f.t("t")).unwrap());
        let s = f.run("t");
        assert_eq!(s.history.get(&f.t("t")), Some(1));
        assert!(!forward_enabled(&f.net, &s, &f.t("t")).unwrap());
    }

    #[test]
    fn backtracking_order() {
        let f = Fixture::new(nets::BACKTRACK);
        assert!(f.set(&State::initial(&f.net, &f.m0), Some(Mode::Bt)).is_empty());
        let s = f.run("t1,t2");
        assert_eq!(f.set(&s, Some(Mode::Bt)), ["t2"]);
        let s = f.run("t1,t2,~t2:bt");
        assert!(bt_enabled(&f.net, &s, &f.t("t1")).unwrap());
        assert_eq!(f.run("t1,t2,~t2:bt,~t1:bt"), State::initial(&f.net, &f.m0));
    }

    #[test]
    fn causal_order() {
        let f = Fixture::new(nets::CAUSAL);
        let s = f.run("t1,t2,t3");
        assert_eq!(f.set(&s, Some(Mode::Co)), ["t3"]);
        assert!(co_enabled_outplace(&f.net, &s, &f.t("t3")).unwrap());
        assert!(!co_enabled_outplace(&f.net, &s, &f.t("t1")).unwrap());
        let s = f.run("t1,t2,t3,~t3:co");
        assert_eq!(f.set(&s, Some(Mode::Co)), ["t1", "t2"]);
        let initial = State::initial(&f.net, &f.m0);
        assert_eq!(f.run("t1,t2,t3,~t3:co,~t1:co,~t2:co"), initial);
        assert_eq!(f.run("t1,t2,t3,~t3:co,~t2:co,~t1:co"), initial);
        assert!(!co_enabled(&f.net, &initial, &f.t("t1")).unwrap());
        assert!(!co_enabled_outplace(&f.net, &initial, &f.t("t1")).unwrap());
    }

    #[test]
    fn reversing_without_effect_only_relocates() {
        let f = Fixture::new(nets::CAUSAL);
        let s = f.run("t1,~t1:bt");
        assert_eq!(s.marking, f.m0);
    }

    #[test]
    fn loop_forward_then_backtrack() {
        let f = Fixture::new(nets::CATALYSIS);
        assert_eq!(f.run("t1,~t1:bt"), State::initial(&f.net, &f.m0));
        assert_eq!(f.run("t1,~t1:co"), State::initial(&f.net, &f.m0));
    }

    #[test]
    fn out_of_order_enabledness() {
        let f = Fixture::new(nets::CATALYSIS);
        assert!(f.set(&State::initial(&f.net, &f.m0), Some(Mode::O)).is_empty());
        let s = f.run("t1,t2");
        assert_eq!(f.set(&s, Some(Mode::O)), ["t1", "t2"]);
        let s = f.run("t1,t2,~t2:o");
        assert!(!o_enabled(&f.net, &s, &f.t("t2")).unwrap());
    }

    #[test]
    fn catalyst_released_out_of_order() {
        let f = Fixture::new(nets::CATALYSIS);
        let s = f.run("t1,t2,~t1:o");
        assert_eq!(s.marking.to_string(), "u:{c} y:{a, b, a-b}");
        assert_eq!(s.history.get(&f.t("t1")), None);
        assert_eq!(last_transition(&f.net, &tokens("c"), &s.history), None);
        assert_eq!(last_transition(&f.net, &tokens("a b a-b"), &s.history), Some(f.t("t2")));
        assert_eq!(last_transition(&f.net, &tokens("a"), &History::initial(&f.net)), None);
        assert_eq!(f.run("t1,t2,~t1:o,~t2:o").marking, f.m0);
    }

    #[test]
    fn out_of_order_chain_splits() {
        let f = Fixture::new(nets::OUT_OF_ORDER);
        let s = f.run("t1,t2,t3,~t1:o");
        assert_eq!(s.marking.to_string(), "y:{b, c, b-c} z:{a, d, a-d}");
        assert_eq!(last_transition(&f.net, &tokens("b c b-c"), &s.history), Some(f.t("t2")));
        assert_eq!(last_transition(&f.net, &tokens("a d a-d"), &s.history), Some(f.t("t3")));
        let s = f.run("t1,t2,t3,~t1:o,~t2:o");
        assert_eq!(s.marking.to_string(), "ub:{b} uc:{c} z:{a, d, a-d}");
        let s = f.run("t1,t2,t3,~t1:o,~t2:o,~t3:o");
        assert_eq!(s.marking, f.m0);
    }

    #[test]
    fn transaction_commits_after_release() {
        let f = Fixture::new(nets::TRANSACTION);
        let s = f.run("a,f1,f2");
        assert!(!forward_enabled(&f.net, &s, &f.t("c")).unwrap());
        let s = f.run("a,f1,f2,~a:o");
        assert_eq!(s.marking.to_string(), "uc:{c} us:{s} w:{a, f, i, a-f, f-i}");
        let s = f.run("a,f1,f2,~a:o,~f1:o");
        assert_eq!(s.marking.to_string(), "ua:{a} uc:{c} us:{s} w:{f, i, f-i}");
        assert!(forward_enabled(&f.net, &s, &f.t("c")).unwrap());
        let s = f.run("a,f1,f2,~a:o,~f1:o,c");
        assert_eq!(s.marking.to_string(), "ua:{a} us:{s} z:{c, f, i, c-i, f-i}");
        let s = f.run("a,f1,f2,~a:o,~f1:o,c,~f2:o");
        assert_eq!(s.marking.to_string(), "ua:{a} uf:{f} us:{s} z:{c, i, c-i}");
    }

    #[test]
    fn dispatch_matches_direct_calls() {
        let f = Fixture::new(nets::CATALYSIS);
        let s0 = State::initial(&f.net, &f.m0);
        let t1 = f.t("t1");
        assert_eq!(
            step(&f.net, &s0, &f.m0, &Action::forward(t1.clone())).unwrap(),
            fire_forward(&f.net, &s0, &t1).unwrap()
        );
        let s = f.run("t1,t2");
        assert_eq!(
            step(&f.net, &s, &f.m0, &Action::reverse(t1.clone(), Mode::O)).unwrap(),
            fire_reverse_o(&f.net, &s, &f.m0, &t1).unwrap()
        );
        let err = step(&f.net, &s0, &f.m0, &Action::reverse(t1.clone(), Mode::Bt)).unwrap_err();
        assert_eq!(
            err,
            SemanticsError::NotEnabled {
                transition: t1.clone(),
                direction: Direction::Reverse(Mode::Bt)
            }
        );
        assert!(fire_reverse_btco(&f.net, &s, &t1, Mode::O).is_err());
    }

    #[test]
    fn history_rank_compression() {
        let f = Fixture::new(nets::CATALYSIS);
        let (t1, t2) = (f.t("t1"), f.t("t2"));
        let h = History::from_keys([(t1.clone(), Some(3)), (t2.clone(), Some(7))]);
        assert_eq!(
            canonicalize_history(&h),
            History::from_keys([(t1.clone(), Some(1)), (t2.clone(), Some(2))])
        );
        let h = History::from_keys([(t1.clone(), None), (t2.clone(), Some(4))]);
        assert_eq!(
            canonicalize_history(&h),
            History::from_keys([(t1, None), (t2, Some(1))])
        );
    }

    #[test]
    fn homeless_component_is_an_error() {
        let f = Fixture::new(nets::CATALYSIS);
        let u = f.net.place("u").unwrap();
        let err = home_of(&f.net, &tokens("a c"), &History::initial(&f.net), &f.m0, &u).unwrap_err();
        assert!(matches!(err, SemanticsError::HomelessComponent { .. }));
    }
}

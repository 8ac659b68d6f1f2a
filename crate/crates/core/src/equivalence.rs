//! Concurrency of actions, causal equivalence of traces, history equivalence,
//! and equivalence relative to one component.
//!
//! Causal equivalence is decided by a bounded search over rewritings of the
//! two traces. The moves are: swapping two adjacent actions that are
//! concurrent at the point where they occur, deleting an adjacent action and
//! its inverse, and inserting such a pair. Every intermediate trace must stay
//! executable from the initial state.

use std::collections::{HashMap, VecDeque};

use thiserror::Error;

use crate::explorer::{explore, ExploreMode};
use crate::model::{Action, Component, Direction, History, Marking, Mode, Net, PlaceId, State, Trace};
use crate::semantics::{enabled, enabled_actions, last_transition, run, step, SemanticsError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EquivalenceError {
    #[error("trace {which} is not executable: action {index}: {source}")]
    NotExecutable {
        which: usize,
        index: usize,
        source: SemanticsError,
    },
    #[error("action {0} is not enabled in the given state")]
    NotEnabled(Action),
    #[error("histories range over different transitions")]
    UniverseMismatch,
    #[error("component {0} is split across places")]
    ComponentSplit(Component),
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
}

/// Whether `a1` and `a2`, both enabled in `s`, can run in either order and
/// end in the same marking.
pub fn concurrent_at(net: &Net, s: &State, m0: &Marking, a1: &Action, a2: &Action) -> Result<bool, EquivalenceError> {
    for a in [a1, a2] {
        if !enabled(net, s, &a.transition, a.direction)? {
            return Err(EquivalenceError::NotEnabled(a.clone()));
        }
    }
    Ok(commute(net, s, m0, a1, a2))
}

/// Like [`concurrent_at`] but false instead of an error when either action is
/// not enabled.
fn commute(net: &Net, s: &State, m0: &Marking, a1: &Action, a2: &Action) -> bool {
    let both = |x: &Action, y: &Action| -> Option<State> {
        let mid = step(net, s, m0, x).ok()?;
        step(net, &mid, m0, y).ok()
    };
    match (both(a1, a2), both(a2, a1)) {
        (Some(s12), Some(s21)) => s12.marking == s21.marking,
        _ => false,
    }
}

/// [`concurrent_at`] at every state reachable within `depth` steps where both
/// actions are enabled. Reachability uses the most permissive reversal mode
/// among the two actions, or causal order if both are forward.
pub fn concurrent(net: &Net, m0: &Marking, a1: &Action, a2: &Action, depth: usize) -> Result<bool, EquivalenceError> {
    let mode = [a1, a2]
        .iter()
        .filter_map(|a| match a.direction {
            Direction::Reverse(m) => Some(m),
            Direction::Forward => None,
        })
        .max()
        .unwrap_or(Mode::Co);
    let space = explore(net, m0, ExploreMode::from(mode), depth)?;
    for s in space.states() {
        let both = enabled(net, s, &a1.transition, a1.direction)? && enabled(net, s, &a2.transition, a2.direction)?;
        if both && !commute(net, s, m0, a1, a2) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The same transitions are executed in both histories.
pub fn history_equiv(h1: &History, h2: &History) -> Result<bool, EquivalenceError> {
    if !h1.transitions().eq(h2.transitions()) {
        return Err(EquivalenceError::UniverseMismatch);
    }
    Ok(h1
        .iter()
        .zip(h2.iter())
        .all(|((_, k1), (_, k2))| k1.is_some() == k2.is_some()))
}

/// Why two traces are known not to be equivalent.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Difference {
    Marking,
    History,
}

/// Why the search gave up.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Unknown {
    /// More rewritten traces were visited than the budget allows.
    Budget,
    /// Every rewriting within the length bound was tried without a match.
    LengthBound,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Equivalence {
    Equivalent,
    Inequivalent(Difference),
    Unknown(Unknown),
}

#[derive(Clone, Debug)]
pub struct SearchConfig {
    /// Maximum number of distinct traces visited.
    pub budget: usize,
    /// How much longer than the longer input a rewritten trace may become.
    pub slack: usize,
    /// Reversal modes used when inserting an action and its inverse. Empty
    /// means: the modes occurring in the inputs, or causal order if none do.
    pub insert_modes: Vec<Mode>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            budget: 10_000,
            slack: 2,
            insert_modes: Vec::new(),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SearchResult {
    Met,
    Exhausted,
    Budget,
}

/// Outcome of a rewriting search, with every trace visited from each side.
#[derive(Clone, Debug)]
pub struct SearchOutcome {
    pub result: SearchResult,
    pub visited: [Vec<Trace>; 2],
}

/// Decides causal equivalence of two executable traces from `(m0, H0)`.
///
/// Equal final markings and equivalent histories are necessary; when they
/// fail the answer is immediate. Otherwise a rewriting search runs.
pub fn causal_equivalent(
    net: &Net,
    m0: &Marking,
    s1: &Trace,
    s2: &Trace,
    config: &SearchConfig,
) -> Result<Equivalence, EquivalenceError> {
    let (f1, f2) = finals(net, m0, s1, s2)?;
    if s1 == s2 {
        return Ok(Equivalence::Equivalent);
    }
    if f1.marking != f2.marking {
        return Ok(Equivalence::Inequivalent(Difference::Marking));
    }
    if !history_equiv(&f1.history, &f2.history)? {
        return Ok(Equivalence::Inequivalent(Difference::History));
    }
    Ok(match search_equivalent(net, m0, s1, s2, config)?.result {
        SearchResult::Met => Equivalence::Equivalent,
        SearchResult::Exhausted => Equivalence::Unknown(Unknown::LengthBound),
        SearchResult::Budget => Equivalence::Unknown(Unknown::Budget),
    })
}

fn finals(net: &Net, m0: &Marking, s1: &Trace, s2: &Trace) -> Result<(State, State), EquivalenceError> {
    let start = State::initial(net, m0);
    let exec = |which, t: &Trace| {
        run(net, &start, m0, t.actions()).map_err(|(index, source)| EquivalenceError::NotExecutable {
            which,
            index,
            source,
        })
    };
    Ok((exec(1, s1)?, exec(2, s2)?))
}

/// Bidirectional rewriting search between two traces, without the
/// final-state shortcut of [`causal_equivalent`].
pub fn search_equivalent(
    net: &Net,
    m0: &Marking,
    s1: &Trace,
    s2: &Trace,
    config: &SearchConfig,
) -> Result<SearchOutcome, EquivalenceError> {
    finals(net, m0, s1, s2)?;
    let rewriter = Rewriter::new(net, m0, [s1, s2], config);
    let mut seen: HashMap<Vec<Action>, usize> = HashMap::new();
    let mut visited: [Vec<Trace>; 2] = [Vec::new(), Vec::new()];
    let mut frontier: [VecDeque<Vec<Action>>; 2] = [VecDeque::new(), VecDeque::new()];
    for (side, t) in [s1, s2].into_iter().enumerate() {
        if let Some(&other) = seen.get(&t.0) {
            if other != side {
                visited[side].push(t.clone());
                return Ok(SearchOutcome {
                    result: SearchResult::Met,
                    visited,
                });
            }
        }
        seen.insert(t.0.clone(), side);
        visited[side].push(t.clone());
        frontier[side].push_back(t.0.clone());
    }
    loop {
        let side = match (frontier[0].is_empty(), frontier[1].is_empty()) {
            (true, true) => {
                return Ok(SearchOutcome {
                    result: SearchResult::Exhausted,
                    visited,
                })
            }
            (false, true) => 0,
            (true, false) => 1,
            (false, false) => usize::from(frontier[1].len() < frontier[0].len()),
        };
        let current = frontier[side].pop_front().expect("non-empty frontier");
        for next in rewriter.neighbours(&current) {
            match seen.get(&next) {
                Some(&s) if s == side => continue,
                Some(_) => {
                    visited[side].push(Trace::new(next));
                    return Ok(SearchOutcome {
                        result: SearchResult::Met,
                        visited,
                    });
                }
                None => {
                    if seen.len() >= config.budget {
                        return Ok(SearchOutcome {
                            result: SearchResult::Budget,
                            visited,
                        });
                    }
                    seen.insert(next.clone(), side);
                    visited[side].push(Trace::new(next.clone()));
                    frontier[side].push_back(next);
                }
            }
        }
    }
}

/// How a [`rewrite_search`] ended.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum ClosureEnd {
    /// A visited trace satisfied the stop predicate.
    Found(Trace),
    /// Every rewriting within the length bound was visited.
    Complete,
    Budget,
}

/// Breadth-first search over rewritings of `start`, stopping at the first
/// trace satisfying `stop`. Returns every visited trace, `start` first.
pub fn rewrite_search(
    net: &Net,
    m0: &Marking,
    start: &Trace,
    config: &SearchConfig,
    mut stop: impl FnMut(&Trace) -> bool,
) -> Result<(Vec<Trace>, ClosureEnd), EquivalenceError> {
    finals(net, m0, start, start)?;
    if stop(start) {
        return Ok((vec![start.clone()], ClosureEnd::Found(start.clone())));
    }
    let rewriter = Rewriter::new(net, m0, [start, start], config);
    let mut seen: HashMap<Vec<Action>, ()> = HashMap::from([(start.0.clone(), ())]);
    let mut out = vec![start.clone()];
    let mut queue = VecDeque::from([start.0.clone()]);
    while let Some(current) = queue.pop_front() {
        for next in rewriter.neighbours(&current) {
            if seen.contains_key(&next) {
                continue;
            }
            if seen.len() >= config.budget {
                return Ok((out, ClosureEnd::Budget));
            }
            seen.insert(next.clone(), ());
            let trace = Trace::new(next.clone());
            out.push(trace.clone());
            if stop(&trace) {
                return Ok((out, ClosureEnd::Found(trace)));
            }
            queue.push_back(next);
        }
    }
    Ok((out, ClosureEnd::Complete))
}

struct Rewriter<'a> {
    net: &'a Net,
    m0: &'a Marking,
    start: State,
    max_len: usize,
    modes: Vec<Mode>,
}

impl<'a> Rewriter<'a> {
    fn new(net: &'a Net, m0: &'a Marking, traces: [&Trace; 2], config: &SearchConfig) -> Self {
        let mut modes = config.insert_modes.clone();
        if modes.is_empty() {
            for t in traces {
                for a in t.actions() {
                    if let Direction::Reverse(m) = a.direction {
                        modes.push(m);
                    }
                }
            }
        }
        if modes.is_empty() {
            modes.push(Mode::Co);
        }
        modes.sort();
        modes.dedup();
        Rewriter {
            net,
            m0,
            start: State::initial(net, m0),
            max_len: traces[0].len().max(traces[1].len()) + config.slack,
            modes,
        }
    }

    fn states(&self, trace: &[Action]) -> Option<Vec<State>> {
        let mut out = Vec::with_capacity(trace.len() + 1);
        out.push(self.start.clone());
        for a in trace {
            let next = step(self.net, out.last().expect("non-empty"), self.m0, a).ok()?;
            out.push(next);
        }
        Some(out)
    }

    fn executable(&self, trace: &[Action]) -> bool {
        run(self.net, &self.start, self.m0, trace).is_ok()
    }

    fn neighbours(&self, trace: &[Action]) -> Vec<Vec<Action>> {
        let Some(states) = self.states(trace) else {
            return Vec::new();
        };
        let mut out = Vec::new();
        let n = trace.len();
        for i in 0..n.saturating_sub(1) {
            let (x, y) = (&trace[i], &trace[i + 1]);
            if x.transition == y.transition && x.is_forward() != y.is_forward() {
                let mut next = trace.to_vec();
                next.drain(i..i + 2);
                if self.executable(&next) {
                    out.push(next);
                }
            }
            if x != y && commute(self.net, &states[i], self.m0, x, y) {
                let mut next = trace.to_vec();
                next.swap(i, i + 1);
                if self.executable(&next) {
                    out.push(next);
                }
            }
        }
        if n + 2 <= self.max_len {
            for (i, s) in states.iter().enumerate() {
                let mut candidates = Vec::new();
                for mode in &self.modes {
                    for a in enabled_actions(self.net, s, Some(*mode)).unwrap_or_default() {
                        if !candidates.contains(&a) {
                            candidates.push(a);
                        }
                    }
                }
                for a in candidates {
                    let inverses: Vec<Action> = if a.is_forward() {
                        self.modes.iter().map(|m| a.inverse(*m)).collect()
                    } else {
                        vec![Action::forward(a.transition.clone())]
                    };
                    for inv in inverses {
                        let mut next = trace.to_vec();
                        next.splice(i..i, [a.clone(), inv]);
                        if self.executable(&next) {
                            out.push(next);
                        }
                    }
                }
            }
        }
        out
    }
}

/// Where `component` sits in `m`: `Some(x)` if wholly inside `x`, `None` if
/// its bases share a place but some of its bonds are missing or a base is
/// absent.
pub fn locate(m: &Marking, component: &Component) -> Result<Option<PlaceId>, EquivalenceError> {
    let mut places = component.bases.iter().map(|a| m.places_of(a));
    let Some(first) = places.next() else {
        return Ok(None);
    };
    let [x] = first.as_slice() else {
        return Ok(None);
    };
    for other in places {
        match other.as_slice() {
            [y] if y == x => {}
            [] => return Ok(None),
            _ => return Err(EquivalenceError::ComponentSplit(component.clone())),
        }
    }
    Ok(component.is_subset(m.get(x)).then(|| (*x).clone()))
}

/// Histories agree on the last transition that touched `component`.
pub fn c_equiv_histories(net: &Net, h1: &History, h2: &History, component: &Component) -> bool {
    last_transition(net, component, h1) == last_transition(net, component, h2)
}

/// Traces agree on the last transition that touched `component`.
pub fn c_equiv_traces(
    net: &Net,
    m0: &Marking,
    s1: &Trace,
    s2: &Trace,
    component: &Component,
) -> Result<bool, EquivalenceError> {
    let (f1, f2) = finals(net, m0, s1, s2)?;
    Ok(c_equiv_histories(net, &f1.history, &f2.history, component))
}

/// `component` sits wholly in the same place in both markings.
pub fn c_equiv_markings(m1: &Marking, m2: &Marking, component: &Component) -> Result<bool, EquivalenceError> {
    Ok(match (locate(m1, component)?, locate(m2, component)?) {
        (Some(x), Some(y)) => x == y,
        _ => false,
    })
}

pub fn c_equiv_states(net: &Net, s1: &State, s2: &State, component: &Component) -> Result<bool, EquivalenceError> {
    Ok(c_equiv_histories(net, &s1.history, &s2.history, component)
        && c_equiv_markings(&s1.marking, &s2.marking, component)?)
}

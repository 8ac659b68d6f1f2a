//! Bounded state-space exploration.
//!
//! States are stored with rank-compressed histories so that fire/reverse
//! cycles, which keep growing raw keys, still revisit finitely many states.

pub mod generate;
pub mod literal;
pub mod properties;
pub mod theorems;

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use crate::model::{Action, Direction, Marking, Mode, Net, State, Trace, TransId};
use crate::semantics::{self, canonicalize, SemanticsError};

pub use generate::{generate_net, GenConfig};
pub use properties::{check_property, Counterexample, Property, PropertyError, Report};

/// Which steps an exploration admits: forward firing always, plus reversal
/// under the named mode.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum ExploreMode {
    Forward,
    Bt,
    Co,
    O,
}

impl ExploreMode {
    pub const ALL: [ExploreMode; 4] = [ExploreMode::Forward, ExploreMode::Bt, ExploreMode::Co, ExploreMode::O];

    pub fn reverse_mode(self) -> Option<Mode> {
        match self {
            ExploreMode::Forward => None,
            ExploreMode::Bt => Some(Mode::Bt),
            ExploreMode::Co => Some(Mode::Co),
            ExploreMode::O => Some(Mode::O),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ExploreMode::Forward => "forward",
            ExploreMode::Bt => "bt",
            ExploreMode::Co => "co",
            ExploreMode::O => "o",
        }
    }
}

impl From<Mode> for ExploreMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Bt => ExploreMode::Bt,
            Mode::Co => ExploreMode::Co,
            Mode::O => ExploreMode::O,
        }
    }
}

impl fmt::Display for ExploreMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExploreMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ExploreMode::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| format!("unknown mode `{s}` (expected forward, bt, co or o)"))
    }
}

/// The transition relation an exploration runs on. [`Standard`] delegates to
/// [`crate::semantics`]; other implementations exist to test the checkers.
pub trait Engine {
    fn enabled(&self, net: &Net, s: &State, t: &TransId, direction: Direction) -> Result<bool, SemanticsError> {
        semantics::enabled(net, s, t, direction)
    }

    fn step(&self, net: &Net, s: &State, m0: &Marking, action: &Action) -> Result<State, SemanticsError> {
        semantics::step(net, s, m0, action)
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct Standard;

impl Engine for Standard {}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Edge {
    pub from: usize,
    pub action: Action,
    pub to: usize,
}

/// States reachable from `(m0, H0)` within a number of steps.
#[derive(Clone, Debug)]
pub struct StateSpace {
    net: Net,
    m0: Marking,
    mode: ExploreMode,
    depth: usize,
    states: Vec<State>,
    index: HashMap<State, usize>,
    depths: Vec<usize>,
    parents: Vec<Option<(usize, Action)>>,
    edges: Vec<Edge>,
    truncated: bool,
    stuck: Vec<(usize, SemanticsError)>,
}

impl StateSpace {
    pub fn net(&self) -> &Net {
        &self.net
    }

    pub fn initial_marking(&self) -> &Marking {
        &self.m0
    }

    pub fn mode(&self) -> ExploreMode {
        self.mode
    }

    pub fn depth_limit(&self) -> usize {
        self.depth
    }

    /// States in discovery order; index 0 is the initial state.
    pub fn states(&self) -> &[State] {
        &self.states
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Whether some state at the depth limit still had unexplored successors.
    pub fn truncated(&self) -> bool {
        self.truncated
    }

    /// States whose successors could not be computed, with the error raised.
    pub fn stuck(&self) -> &[(usize, SemanticsError)] {
        &self.stuck
    }

    pub fn index_of(&self, s: &State) -> Option<usize> {
        self.index.get(&canonicalize(s)).copied()
    }

    pub fn contains(&self, s: &State) -> bool {
        self.index_of(s).is_some()
    }

    pub fn depth_of(&self, i: usize) -> usize {
        self.depths[i]
    }

    /// A shortest trace from the initial state to state `i`.
    pub fn trace_to(&self, mut i: usize) -> Trace {
        let mut out = Vec::new();
        while let Some((p, a)) = &self.parents[i] {
            out.push(a.clone());
            i = *p;
        }
        out.reverse();
        Trace::new(out)
    }

    /// Distinct markings among the states.
    pub fn markings(&self) -> std::collections::BTreeSet<&Marking> {
        self.states.iter().map(|s| &s.marking).collect()
    }

    /// First state (in discovery order, so at minimal depth) satisfying `pred`.
    pub fn find(&self, pred: impl FnMut(&State) -> bool) -> Option<(usize, Trace)> {
        self.states.iter().position(pred).map(|i| (i, self.trace_to(i)))
    }
}

/// Breadth-first exploration with the standard semantics. A semantics error
/// in any reachable state is returned as an error.
pub fn explore(net: &Net, m0: &Marking, mode: ExploreMode, depth: usize) -> Result<StateSpace, SemanticsError> {
    let mut space = explore_with(&Standard, net, m0, mode, depth);
    if space.stuck.is_empty() {
        Ok(space)
    } else {
        Err(space.stuck.swap_remove(0).1)
    }
}

/// Breadth-first exploration using `engine`. Transitions are tried in name
/// order, forward before reverse, so the result is deterministic. States where
/// the engine fails are kept but not expanded, and listed in
/// [`StateSpace::stuck`].
pub fn explore_with(engine: &dyn Engine, net: &Net, m0: &Marking, mode: ExploreMode, depth: usize) -> StateSpace {
    let initial = canonicalize(&State::initial(net, m0));
    let mut space = StateSpace {
        net: net.clone(),
        m0: m0.clone(),
        mode,
        depth,
        states: vec![initial.clone()],
        index: HashMap::from([(initial, 0)]),
        depths: vec![0],
        parents: vec![None],
        edges: Vec::new(),
        truncated: false,
        stuck: Vec::new(),
    };
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        let s = space.states[i].clone();
        let d = space.depths[i];
        let successors = actions(engine, net, &s, mode).and_then(|acts| {
            acts.into_iter()
                .map(|a| Ok((canonicalize(&engine.step(net, &s, m0, &a)?), a)))
                .collect::<Result<Vec<_>, SemanticsError>>()
        });
        let successors = match successors {
            Ok(v) => v,
            Err(e) => {
                space.stuck.push((i, e));
                continue;
            }
        };
        for (next, action) in successors {
            if d == depth {
                if !space.index.contains_key(&next) {
                    space.truncated = true;
                }
                continue;
            }
            let j = match space.index.get(&next) {
                Some(&j) => j,
                None => {
                    let j = space.states.len();
                    space.index.insert(next.clone(), j);
                    space.states.push(next);
                    space.depths.push(d + 1);
                    space.parents.push(Some((i, action.clone())));
                    queue.push_back(j);
                    j
                }
            };
            space.edges.push(Edge { from: i, action, to: j });
        }
    }
    space
}

fn actions(engine: &dyn Engine, net: &Net, s: &State, mode: ExploreMode) -> Result<Vec<Action>, SemanticsError> {
    let mut out = Vec::new();
    for t in net.transitions() {
        if engine.enabled(net, s, t, Direction::Forward)? {
            out.push(Action::forward(t.clone()));
        }
    }
    if let Some(m) = mode.reverse_mode() {
        for t in net.transitions() {
            if engine.enabled(net, s, t, Direction::Reverse(m))? {
                out.push(Action::reverse(t.clone(), m));
            }
        }
    }
    Ok(out)
}

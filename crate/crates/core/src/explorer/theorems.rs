//! Exhaustive checks of the equivalence results over all short traces.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use crate::connectivity::{connected, DisjointSets};
use crate::equivalence::{
    c_equiv_states, history_equiv, rewrite_search, search_equivalent, ClosureEnd, EquivalenceError, SearchConfig,
    SearchResult, Unknown,
};
use crate::explorer::{explore, ExploreMode};
use crate::model::{Action, Direction, Marking, Mode, Net, State, Trace, TransId};
use crate::semantics::{enabled, enabled_actions, run, step};

/// Every trace of at most `max_len` actions executable from `(m0, H0)`,
/// using forward steps and reversals under `mode`, with its final state.
/// Traces come out in length-then-lexicographic order, starting with the
/// empty trace.
pub fn enumerate_traces(
    net: &Net,
    m0: &Marking,
    mode: ExploreMode,
    max_len: usize,
) -> Result<Vec<(Trace, State)>, EquivalenceError> {
    let mut level = vec![(Vec::<Action>::new(), State::initial(net, m0))];
    let mut out: Vec<(Trace, State)> = vec![(Trace::empty(), level[0].1.clone())];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for (trace, s) in &level {
            for a in enabled_actions(net, s, mode.reverse_mode())? {
                let s2 = step(net, s, m0, &a)?;
                let mut t2 = trace.clone();
                t2.push(a);
                out.push((Trace::new(t2.clone()), s2.clone()));
                next.push((t2, s2));
            }
        }
        level = next;
    }
    Ok(out)
}

fn executed(s: &State) -> BTreeSet<TransId> {
    s.history.executed().map(|(t, _)| t.clone()).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Discrepancy {
    pub first: Trace,
    pub second: Trace,
    pub detail: String,
}

impl fmt::Display for Discrepancy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] vs [{}]: {}", self.first, self.second, self.detail)
    }
}

#[derive(Clone, Debug, Default)]
pub struct CausalReport {
    pub traces: usize,
    pub pairs: usize,
    /// Pairs with equal final marking and equivalent histories.
    pub matching_pairs: usize,
    pub searches: usize,
    pub discrepancies: Vec<Discrepancy>,
    pub unknown: Vec<(Trace, Trace, Unknown)>,
}

impl CausalReport {
    pub fn passed(&self) -> bool {
        self.discrepancies.is_empty() && self.unknown.is_empty()
    }
}

impl fmt::Display for CausalReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} traces, {} pairs ({} with matching final states), {} searches, {} discrepancies, {} unknown",
            self.traces,
            self.pairs,
            self.matching_pairs,
            self.searches,
            self.discrepancies.len(),
            self.unknown.len()
        )
    }
}

/// For all pairs of causal-order traces of length at most `max_len`: the
/// traces are causally equivalent iff their final markings are equal and
/// their histories equivalent.
///
/// Traces are grouped by final marking and executed set. Inside a group the
/// rewriting search must connect every pair; union-find over everything a
/// search visits avoids repeating work. Every trace a search visits must land
/// in the group it started from, which checks the converse direction.
pub fn causal_equivalence_theorem(
    net: &Net,
    m0: &Marking,
    max_len: usize,
    config: &SearchConfig,
) -> Result<CausalReport, EquivalenceError> {
    let traces = enumerate_traces(net, m0, ExploreMode::Co, max_len)?;
    let n = traces.len();
    let mut report = CausalReport {
        traces: n,
        pairs: n * n.saturating_sub(1) / 2,
        ..CausalReport::default()
    };
    let index: HashMap<&[Action], usize> = traces.iter().enumerate().map(|(i, (t, _))| (t.actions(), i)).collect();
    let mut groups: BTreeMap<(&Marking, BTreeSet<TransId>), Vec<usize>> = BTreeMap::new();
    for (i, (_, s)) in traces.iter().enumerate() {
        groups.entry((&s.marking, executed(s))).or_default().push(i);
    }
    let mut sets = DisjointSets::new(n);
    let start = State::initial(net, m0);
    for members in groups.values() {
        report.matching_pairs += members.len() * (members.len() - 1) / 2;
        for (k, &i) in members.iter().enumerate() {
            for &j in &members[k + 1..] {
                if sets.same(i, j) {
                    continue;
                }
                let (ti, si) = &traces[i];
                let (tj, _) = &traces[j];
                report.searches += 1;
                let outcome = search_equivalent(net, m0, ti, tj, config)?;
                for t in outcome.visited.iter().flatten() {
                    let end = run(net, &start, m0, t.actions()).map_err(|(index, source)| {
                        EquivalenceError::NotExecutable {
                            which: 1,
                            index,
                            source,
                        }
                    })?;
                    if end.marking != si.marking || !history_equiv(&end.history, &si.history)? {
                        report.discrepancies.push(Discrepancy {
                            first: ti.clone(),
                            second: t.clone(),
                            detail: "rewriting reached a trace with a different final state".into(),
                        });
                    }
                }
                match outcome.result {
                    SearchResult::Met => {
                        for t in outcome.visited.iter().flatten() {
                            if let Some(&v) = index.get(t.actions()) {
                                sets.union(i, v);
                            }
                        }
                        sets.union(i, j);
                    }
                    SearchResult::Exhausted => report.unknown.push((ti.clone(), tj.clone(), Unknown::LengthBound)),
                    SearchResult::Budget => report.unknown.push((ti.clone(), tj.clone(), Unknown::Budget)),
                }
            }
        }
    }
    Ok(report)
}

#[derive(Clone, Debug, Default)]
pub struct ComponentReport {
    pub traces: usize,
    pub pairs: usize,
    /// Sets `C` checked where `C` is a whole component of both final markings.
    pub components: usize,
    /// Sets `C` checked that are only part of a component in some final marking.
    pub partial_components: usize,
    pub discrepancies: Vec<Discrepancy>,
    /// Failures on partial components. There the last transition touching
    /// `C` may not be the one that moved it: a later transition can drag `C`
    /// along by consuming other bases bonded to it.
    pub partial: Vec<Discrepancy>,
}

impl ComponentReport {
    pub fn passed(&self) -> bool {
        self.discrepancies.is_empty()
    }
}

impl fmt::Display for ComponentReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} traces, {} pairs, {} components, {} discrepancies ({} partial components, {} failing)",
            self.traces,
            self.pairs,
            self.components,
            self.discrepancies.len(),
            self.partial_components,
            self.partial.len()
        )
    }
}

/// For all pairs of out-of-causal-order traces of length at most `max_len`
/// and every base `a`, with `C` the common part of `a`'s components in the two
/// final markings: the traces agree on the last transition touching `C` iff
/// the final states do (same last transition and `C` in the same place).
/// Whenever the traces agree, `C` is also contained in exactly the same places.
///
/// Results are split by whether `C` is a whole component of both markings;
/// only that case is expected to hold (see [`ComponentReport::partial`]).
pub fn component_equivalence_theorem(
    net: &Net,
    m0: &Marking,
    max_len: usize,
) -> Result<ComponentReport, EquivalenceError> {
    let traces = enumerate_traces(net, m0, ExploreMode::O, max_len)?;
    let n = traces.len();
    let mut report = ComponentReport {
        traces: n,
        pairs: n * (n + 1) / 2,
        ..ComponentReport::default()
    };
    for i in 0..n {
        for j in i..n {
            let (t1, s1) = &traces[i];
            let (t2, s2) = &traces[j];
            for a in net.bases() {
                let (Some(x), Some(y)) = (s1.marking.place_of(a), s2.marking.place_of(a)) else {
                    continue;
                };
                let (c1, c2) = (connected(a, s1.marking.get(x)), connected(a, s2.marking.get(y)));
                let c = c1.intersection(&c2);
                let whole = c == c1 && c == c2;
                if whole {
                    report.components += 1;
                } else {
                    report.partial_components += 1;
                }
                let traces_agree = crate::equivalence::c_equiv_histories(net, &s1.history, &s2.history, &c);
                let states_agree = c_equiv_states(net, s1, s2, &c)?;
                let sink = if whole {
                    &mut report.discrepancies
                } else {
                    &mut report.partial
                };
                let mut push = |detail: String| {
                    sink.push(Discrepancy {
                        first: t1.clone(),
                        second: t2.clone(),
                        detail,
                    })
                };
                if traces_agree != states_agree {
                    push(format!(
                        "component {c}: traces agree {traces_agree}, final states agree {states_agree}"
                    ));
                }
                if traces_agree {
                    for z in net.places() {
                        if c.is_subset(s1.marking.get(z)) != c.is_subset(s2.marking.get(z)) {
                            push(format!("component {c} is contained in {z} in only one final marking"));
                        }
                    }
                }
            }
        }
    }
    Ok(report)
}

#[derive(Clone, Debug, Default)]
pub struct NormalFormReport {
    pub traces: usize,
    pub failures: Vec<Trace>,
    pub unknown: Vec<Trace>,
}

impl NormalFormReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.unknown.is_empty()
    }
}

/// Every causal-order trace from the initial state rewrites to a forward-only
/// trace. (From the initial state nothing can be reversed first, so the
/// general "reversals then forwards" normal form has no reversal part.)
pub fn forward_normal_form(
    net: &Net,
    m0: &Marking,
    max_len: usize,
    config: &SearchConfig,
) -> Result<NormalFormReport, EquivalenceError> {
    let traces = enumerate_traces(net, m0, ExploreMode::Co, max_len)?;
    let mut report = NormalFormReport {
        traces: traces.len(),
        ..NormalFormReport::default()
    };
    for (t, _) in &traces {
        let (_, end) = rewrite_search(net, m0, t, config, |c| c.is_forward())?;
        match end {
            ClosureEnd::Found(_) => {}
            ClosureEnd::Complete => report.failures.push(t.clone()),
            ClosureEnd::Budget => report.unknown.push(t.clone()),
        }
    }
    Ok(report)
}

/// States reachable with forward and causal-order steps have the same
/// markings and executed sets as those reachable by forward steps alone.
/// Returns a state of the larger space without a forward-only counterpart.
pub fn forward_reachability(net: &Net, m0: &Marking, depth: usize) -> Result<Option<(Trace, State)>, EquivalenceError> {
    let fwd = explore(net, m0, ExploreMode::Forward, depth)?;
    let co = explore(net, m0, ExploreMode::Co, depth)?;
    let keys: BTreeSet<(&Marking, BTreeSet<TransId>)> =
        fwd.states().iter().map(|s| (&s.marking, executed(s))).collect();
    Ok(co
        .find(|s| !keys.contains(&(&s.marking, executed(s))))
        .map(|(i, t)| (t, co.states()[i].clone())))
}

/// Traces reachable by rewriting an out-of-causal-order trace end in the same
/// marking with an equivalent history. Returns the first offending pair.
pub fn rewriting_preserves_final_state(
    net: &Net,
    m0: &Marking,
    max_len: usize,
    config: &SearchConfig,
) -> Result<Option<Discrepancy>, EquivalenceError> {
    let start = State::initial(net, m0);
    for (t, s) in enumerate_traces(net, m0, ExploreMode::O, max_len)? {
        let (visited, _) = rewrite_search(net, m0, &t, config, |_| false)?;
        for v in visited {
            let end = run(net, &start, m0, v.actions()).map_err(|(index, source)| EquivalenceError::NotExecutable {
                which: 1,
                index,
                source,
            })?;
            if end.marking != s.marking || !history_equiv(&end.history, &s.history)? {
                return Ok(Some(Discrepancy {
                    first: t,
                    second: v,
                    detail: "rewritten trace ends elsewhere".into(),
                }));
            }
        }
    }
    Ok(None)
}

/// A shortest trace reaching a state where `t` is enabled for reversal under
/// `wider` but not under `narrower`, exploring with `wider`.
pub fn strictness_witness(
    net: &Net,
    m0: &Marking,
    t: &TransId,
    narrower: Mode,
    wider: Mode,
    depth: usize,
) -> Result<Option<Trace>, EquivalenceError> {
    let space = explore(net, m0, ExploreMode::from(wider), depth)?;
    let mut err = None;
    let found = space.find(|s| {
        let check = || -> Result<bool, crate::semantics::SemanticsError> {
            Ok(enabled(net, s, t, Direction::Reverse(wider))? && !enabled(net, s, t, Direction::Reverse(narrower))?)
        };
        check().unwrap_or_else(|e| {
            err = Some(e);
            false
        })
    });
    if let Some(e) = err {
        return Err(e.into());
    }
    Ok(found.map(|(_, trace)| trace))
}

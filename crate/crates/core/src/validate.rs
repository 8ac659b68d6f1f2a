//! Structural validation of a net and its initial marking.
//!
//! Violations are returned as data. The report is sorted and de-duplicated, so
//! it does not depend on declaration order.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use crate::model::{Marking, Net, PlaceId, TransId};

/// Rule a violation refers to.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Rule {
    /// Bases in the guard equal bases in the effects.
    Wf1,
    /// Every bond required on input is preserved on some output.
    Wf2,
    /// Outgoing labels of a transition are pairwise disjoint.
    Wf3,
    /// The arc graph contains no directed cycle.
    Acyclic,
    /// Each base sits in exactly one place; each bond in at most one.
    UniqueToken,
    /// A bond only appears together with both of its endpoints.
    BondClosure,
    /// Negated items only appear on arcs into a transition.
    NegOnOutArc,
}

impl Rule {
    pub fn code(self) -> &'static str {
        match self {
            Rule::Wf1 => "WF1",
            Rule::Wf2 => "WF2",
            Rule::Wf3 => "WF3",
            Rule::Acyclic => "ACYCLIC",
            Rule::UniqueToken => "UNIQUE-TOKEN",
            Rule::BondClosure => "BOND-CLOSURE",
            Rule::NegOnOutArc => "NEG-ON-OUT-ARC",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

/// The net element a violation is attached to.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Subject {
    Transition(TransId),
    Place(PlaceId),
    Base(String),
}

impl fmt::Display for Subject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Subject::Transition(t) => write!(f, "transition {t}"),
            Subject::Place(p) => write!(f, "place {p}"),
            Subject::Base(b) => write!(f, "{b}"),
        }
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Violation {
    pub rule: Rule,
    pub subject: Subject,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}: {}", self.rule, self.subject, self.detail)
    }
}

#[derive(Clone, Default, PartialEq, Eq, Debug)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn rules(&self) -> BTreeSet<Rule> {
        self.violations.iter().map(|v| v.rule).collect()
    }

    pub fn has(&self, rule: Rule) -> bool {
        self.violations.iter().any(|v| v.rule == rule)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            return f.write_str("ok");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Checks well-formedness, acyclicity, token uniqueness and bond closure.
pub fn validate(net: &Net, m0: &Marking) -> ValidationReport {
    let mut out = BTreeSet::new();
    let mut push = |rule, subject, detail: String| {
        out.insert(Violation { rule, subject, detail });
    };

    for (t, view) in net.views() {
        let subject = || Subject::Transition(t.clone());
        if view.guard.positive.bases != view.effects.positive.bases {
            let missing: Vec<_> = view
                .guard
                .positive
                .bases
                .symmetric_difference(&view.effects.positive.bases)
                .map(|b| b.to_string())
                .collect();
            push(
                Rule::Wf1,
                subject(),
                format!("bases on input and output differ: {}", missing.join(", ")),
            );
        }
        for bond in &view.guard.positive.bonds {
            if !view.effects.positive.bonds.contains(bond) {
                push(
                    Rule::Wf2,
                    subject(),
                    format!("required bond {bond} is not preserved by any output"),
                );
            }
        }
        let outs: Vec<_> = view.outputs.iter().collect();
        for (i, (x, lx)) in outs.iter().enumerate() {
            for (y, ly) in &outs[i + 1..] {
                let shared = lx.positive.intersection(&ly.positive);
                if !shared.is_empty() {
                    push(Rule::Wf3, subject(), format!("outputs to {x} and {y} share {shared}"));
                }
            }
        }
        for (place, label) in view.inputs.iter().chain(view.outputs.iter()) {
            let all = label.positive.union(&label.negative);
            for bond in &label.positive.bonds {
                let (a, b) = bond.endpoints();
                if !label.positive.bases.contains(a) || !label.positive.bases.contains(b) {
                    push(
                        Rule::BondClosure,
                        subject(),
                        format!("bond {bond} on arc with {place} lacks an endpoint"),
                    );
                }
            }
            for bond in &label.negative.bonds {
                let (a, b) = bond.endpoints();
                if !all.bases.contains(a) || !all.bases.contains(b) {
                    push(
                        Rule::BondClosure,
                        subject(),
                        format!("negated bond {bond} on arc with {place} lacks an endpoint"),
                    );
                }
            }
        }
        for (place, label) in &view.outputs {
            if !label.negative.is_empty() {
                push(
                    Rule::NegOnOutArc,
                    subject(),
                    format!("arc {t} -> {place} carries negated items {}", label.negative),
                );
            }
        }
    }

    if let Some(cycle_nodes) = cyclic_nodes(net) {
        push(
            Rule::Acyclic,
            Subject::Base("net".into()),
            format!("cycle through {}", cycle_nodes.join(", ")),
        );
    }

    for base in net.bases() {
        let n = m0.places_of(base).len();
        if n != 1 {
            push(
                Rule::UniqueToken,
                Subject::Base(format!("base {base}")),
                format!("occurs in {n} places initially"),
            );
        }
    }
    for bond in m0.all_bonds() {
        let n = m0.places_of_bond(&bond).len();
        if n > 1 {
            push(
                Rule::UniqueToken,
                Subject::Base(format!("bond {bond}")),
                format!("occurs in {n} places initially"),
            );
        }
    }
    for (place, tokens) in m0.iter() {
        for bond in tokens.dangling_bonds() {
            push(
                Rule::BondClosure,
                Subject::Place(place.clone()),
                format!("bond {bond} present without both endpoints"),
            );
        }
    }

    ValidationReport {
        violations: out.into_iter().collect(),
    }
}

/// Nodes left over by Kahn's algorithm, i.e. on or behind a cycle.
fn cyclic_nodes(net: &Net) -> Option<Vec<String>> {
    // Places and transitions share one namespace once prefixed.
    let mut succ: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    for p in net.places() {
        succ.entry(format!("place {p}")).or_default();
    }
    for (t, view) in net.views() {
        let tn = format!("transition {t}");
        succ.entry(tn.clone()).or_default();
        for p in view.preset() {
            succ.entry(format!("place {p}")).or_default().insert(tn.clone());
        }
        for p in view.postset() {
            succ.get_mut(&tn).unwrap().insert(format!("place {p}"));
        }
    }
    let mut indegree: BTreeMap<&str, usize> = succ.keys().map(|k| (k.as_str(), 0)).collect();
    for targets in succ.values() {
        for t in targets {
            *indegree.get_mut(t.as_str()).unwrap() += 1;
        }
    }
    let mut queue: VecDeque<&str> = indegree.iter().filter(|(_, d)| **d == 0).map(|(k, _)| *k).collect();
    let mut seen = 0;
    while let Some(n) = queue.pop_front() {
        seen += 1;
        for t in &succ[n] {
            let d = indegree.get_mut(t.as_str()).unwrap();
            *d -= 1;
            if *d == 0 {
                queue.push_back(t);
            }
        }
    }
    if seen == succ.len() {
        None
    } else {
        Some(
            indegree
                .into_iter()
                .filter(|(_, d)| *d > 0)
                .map(|(k, _)| k.to_string())
                .collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interface::dsl::parse_unchecked;
    use crate::nets;

    fn report(text: &str) -> ValidationReport {
        parse_unchecked(text).unwrap().validate()
    }

    #[test]
    fn bundled_nets_pass() {
        for (_, src) in nets::ALL {
            assert!(report(src).is_ok(), "{}", report(src));
        }
    }

    #[test]
    fn base_created_from_nothing_breaks_wf1() {
        let r = report(
            "net n { bases: a, c; places: v, x, u; transitions: t1;
             arc v -> t1 { a } arc t1 -> x { a, c } initial { v: { a }, u: { c } } }",
        );
        assert_eq!(r.rules(), [Rule::Wf1].into());
    }

    #[test]
    fn dropped_bond_breaks_wf2() {
        let r = report(
            "net n { bases: a, b; places: x, y; transitions: t;
             arc x -> t { a, b, a-b } arc t -> y { a, b } initial { x: { a, b, a-b } } }",
        );
        assert_eq!(r.rules(), [Rule::Wf2].into());
    }

    #[test]
    fn overlapping_outputs_break_wf3() {
        let r = report(
            "net n { bases: a; places: x, y, z; transitions: t;
             arc x -> t { a } arc t -> y { a } arc t -> z { a } initial { x: { a } } }",
        );
        assert_eq!(r.rules(), [Rule::Wf3].into());
    }

    #[test]
    fn self_loop_is_cyclic() {
        let r = report(
            "net n { bases: a; places: x; transitions: t;
             arc x -> t { a } arc t -> x { a } initial { x: { a } } }",
        );
        assert_eq!(r.rules(), [Rule::Acyclic].into());
    }

    #[test]
    fn duplicated_base_breaks_uniqueness() {
        let r = report(
            "net n { bases: a; places: x, y; transitions: t;
             arc x -> t { a } arc t -> y { a } initial { x: { a }, y: { a } } }",
        );
        assert_eq!(r.rules(), [Rule::UniqueToken].into());
        let r = report("net n { bases: a; places: x; }");
        assert_eq!(r.rules(), [Rule::UniqueToken].into());
    }

    #[test]
    fn label_bond_without_endpoint() {
        let r = report(
            "net n { bases: a, b; places: x, y; transitions: t;
             arc x -> t { a, !a-b } arc t -> y { a } initial { x: { a }, y: { b } } }",
        );
        assert_eq!(r.rules(), [Rule::BondClosure].into());
    }

    #[test]
    fn negation_on_output() {
        let r = report(
            "net n { bases: a, b; places: x, y; transitions: t;
             arc x -> t { a } arc t -> y { a, !b } initial { x: { a, b } } }",
        );
        assert_eq!(r.rules(), [Rule::NegOnOutArc].into());
    }

    #[test]
    fn report_ignores_declaration_order() {
        let a = report(
            "net n { bases: a, b; places: x, y, z; transitions: t, s;
             arc x -> t { a } arc t -> y { a, b } arc t -> z { a }
             arc y -> s { b } arc s -> x { b } initial { x: { a }, z: { b } } }",
        );
        let b = report(
            "net n { transitions: s, t; places: z, y, x; bases: b, a;
             initial { z: { b }, x: { a } } arc s -> x { b } arc y -> s { b }
             arc t -> z { a } arc t -> y { b, a } arc x -> t { a } }",
        );
        assert!(a.violations.len() >= 3);
        assert_eq!(a, b);
    }
}

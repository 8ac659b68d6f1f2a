//! Connected components of a place's contents.
//!
//! Bases are the vertices and bonds the edges. Components are recomputed on
//! every query; nothing is cached across marking changes.

#[cfg(test)]
use std::collections::BTreeSet;
use std::collections::{BTreeMap, VecDeque};

use thiserror::Error;

use crate::model::{BaseId, Bond, Component, Tokens};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConnectivityError {
    #[error("bond {0} is present without both of its endpoints")]
    BondClosure(Bond),
}

/// The maximal component of `contents` containing `a`, with every bond on a
/// connecting path. Empty when `a` is not in `contents`.
pub fn connected(a: &BaseId, contents: &Tokens) -> Component {
    let mut out = Component::new();
    if !contents.bases.contains(a) {
        return out;
    }
    let adjacency = adjacency(contents);
    let mut queue = VecDeque::from([a.clone()]);
    out.bases.insert(a.clone());
    while let Some(x) = queue.pop_front() {
        for (y, bond) in adjacency.get(&x).into_iter().flatten() {
            out.bonds.insert((*bond).clone());
            if out.bases.insert((*y).clone()) {
                queue.push_back((*y).clone());
            }
        }
    }
    out
}

/// Union of `connected(a, contents)` over every `a` in `seeds`.
pub fn connected_all<'a>(seeds: impl IntoIterator<Item = &'a BaseId>, contents: &Tokens) -> Tokens {
    let mut out = Tokens::new();
    for a in seeds {
        if !out.bases.contains(a) {
            out.extend(&connected(a, contents));
        }
    }
    out
}

/// Partition of `contents` into maximal components, ordered by smallest base.
pub fn components(contents: &Tokens) -> Result<Vec<Component>, ConnectivityError> {
    if let Some(b) = contents.dangling_bonds().next() {
        return Err(ConnectivityError::BondClosure(b.clone()));
    }
    let index: BTreeMap<&BaseId, usize> = contents.bases.iter().enumerate().map(|(i, b)| (b, i)).collect();
    let mut sets = DisjointSets::new(index.len());
    for bond in &contents.bonds {
        let (a, b) = bond.endpoints();
        sets.union(index[a], index[b]);
    }
    let mut groups: BTreeMap<usize, Component> = BTreeMap::new();
    for (b, &i) in &index {
        groups.entry(sets.find(i)).or_default().bases.insert((*b).clone());
    }
    for bond in &contents.bonds {
        let (a, _) = bond.endpoints();
        groups
            .get_mut(&sets.find(index[a]))
            .expect("endpoint indexed")
            .bonds
            .insert(bond.clone());
    }
    let mut out: Vec<Component> = groups.into_values().collect();
    out.sort_by(|x, y| x.bases.iter().next().cmp(&y.bases.iter().next()));
    Ok(out)
}

fn adjacency(contents: &Tokens) -> BTreeMap<&BaseId, Vec<(&BaseId, &Bond)>> {
    let mut adj: BTreeMap<&BaseId, Vec<(&BaseId, &Bond)>> = BTreeMap::new();
    for bond in &contents.bonds {
        let (a, b) = bond.endpoints();
        if contents.bases.contains(a) && contents.bases.contains(b) {
            adj.entry(a).or_default().push((b, bond));
            adj.entry(b).or_default().push((a, bond));
        }
    }
    adj
}

/// Union-find over `0..n` with path compression and union by rank.
#[derive(Clone, Debug)]
pub struct DisjointSets {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl DisjointSets {
    pub fn new(n: usize) -> Self {
        DisjointSets {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    pub fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut cur = x;
        while self.parent[cur] != root {
            let next = self.parent[cur];
            self.parent[cur] = root;
            cur = next;
        }
        root
    }

    /// Merges the sets of `a` and `b`; returns false if already merged.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
        true
    }

    pub fn same(&mut self, a: usize, b: usize) -> bool {
        self.find(a) == self.find(b)
    }
}

/// Bases reachable from `a` by transitive closure of the bond relation,
/// computed by naive fixpoint iteration.
#[cfg(test)]
pub(crate) fn closure_oracle(a: &BaseId, contents: &Tokens) -> BTreeSet<BaseId> {
    let mut reach = BTreeSet::new();
    if !contents.bases.contains(a) {
        return reach;
    }
    reach.insert(a.clone());
    loop {
        let before = reach.len();
        for bond in &contents.bonds {
            let (x, y) = bond.endpoints();
            if !contents.bases.contains(x) || !contents.bases.contains(y) {
                continue;
            }
            if reach.contains(x) || reach.contains(y) {
                reach.insert(x.clone());
                reach.insert(y.clone());
            }
        }
        if reach.len() == before {
            return reach;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn b(s: &str) -> BaseId {
        BaseId::new(s).unwrap()
    }

    fn bond(x: &str, y: &str) -> Bond {
        Bond::new(b(x), b(y)).unwrap()
    }

    fn tokens(bases: &[&str], bonds: &[(&str, &str)]) -> Tokens {
        Tokens::from_parts(bases.iter().map(|s| b(s)), bonds.iter().map(|(x, y)| bond(x, y)))
    }

    #[test]
    fn three_bonded_tokens_form_one_component() {
        let c = tokens(&["a", "b", "c"], &[("a", "c"), ("a", "b")]);
        assert_eq!(connected(&b("a"), &c), c);
    }

    #[test]
    fn absent_base_gives_empty_component() {
        assert!(connected(&b("a"), &Tokens::new()).is_empty());
        let c = tokens(&["b"], &[]);
        assert!(connected(&b("a"), &c).is_empty());
    }

    #[test]
    fn unbonded_base_is_alone() {
        // Enumerating every bond sequence from b: the only bond a-c never touches b.
        let c = tokens(&["a", "b", "c"], &[("a", "c")]);
        assert_eq!(connected(&b("b"), &c), tokens(&["b"], &[]));
    }

    #[test]
    fn components_split_on_missing_bonds() {
        let c = tokens(&["a", "b", "c", "d"], &[("d", "a"), ("b", "c")]);
        let comps = components(&c).unwrap();
        assert_eq!(
            comps,
            vec![tokens(&["a", "d"], &[("a", "d")]), tokens(&["b", "c"], &[("b", "c")])]
        );
    }

    #[test]
    fn components_of_empty_and_unbonded() {
        assert!(components(&Tokens::new()).unwrap().is_empty());
        let c = tokens(&["a", "b", "c"], &[]);
        let comps = components(&c).unwrap();
        assert_eq!(comps.len(), 3);
        // Oracle: per-base connected() calls, pairwise disjoint.
        for base in &c.bases {
            let single = connected(base, &c);
            assert_eq!(single.bases.len(), 1);
            assert!(comps.contains(&single));
        }
    }

    #[test]
    fn components_reject_dangling_bonds() {
        let c = tokens(&["a"], &[("a", "b")]);
        assert_eq!(components(&c), Err(ConnectivityError::BondClosure(bond("a", "b"))));
    }

    #[test]
    fn disjoint_sets_basics() {
        let mut s = DisjointSets::new(4);
        assert!(s.union(0, 1));
        assert!(!s.union(1, 0));
        assert!(s.same(0, 1));
        assert!(!s.same(2, 3));
        s.union(2, 3);
        s.union(1, 3);
        assert!(s.same(0, 2));
    }

    const NAMES: [&str; 8] = ["a", "b", "c", "d", "e", "f", "g", "h"];

    fn arb_contents() -> impl Strategy<Value = Tokens> {
        (
            proptest::collection::btree_set(0usize..8, 0..=8),
            proptest::collection::vec((0usize..8, 0usize..8), 0..10),
        )
            .prop_map(|(bases, pairs)| {
                let bonds = pairs
                    .into_iter()
                    .filter(|(x, y)| x != y && bases.contains(x) && bases.contains(y))
                    .map(|(x, y)| bond(NAMES[x], NAMES[y]))
                    .collect::<Vec<_>>();
                Tokens::from_parts(bases.into_iter().map(|i| b(NAMES[i])), bonds)
            })
    }

    proptest! {
        #[test]
        fn connected_matches_closure_oracle(c in arb_contents(), start in 0usize..8) {
            let a = b(NAMES[start]);
            let comp = connected(&a, &c);
            prop_assert_eq!(&comp.bases, &closure_oracle(&a, &c));
            for bond in &comp.bonds {
                let (x, y) = bond.endpoints();
                prop_assert!(comp.bases.contains(x) && comp.bases.contains(y));
            }
        }

        #[test]
        fn connected_is_closed(c in arb_contents()) {
            for a in &c.bases {
                let comp = connected(a, &c);
                for other in &comp.bases {
                    prop_assert_eq!(&connected(other, &c), &comp);
                }
            }
        }

        #[test]
        fn components_partition_contents(c in arb_contents()) {
            let comps = components(&c).unwrap();
            let mut seen = Tokens::new();
            for comp in &comps {
                prop_assert!(!comp.intersects(&seen));
                seen.extend(comp);
            }
            prop_assert_eq!(seen, c);
        }
    }
}

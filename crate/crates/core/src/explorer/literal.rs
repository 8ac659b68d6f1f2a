//! A second, place-by-place formulation of out-of-causal-order reversal.
//!
//! [`crate::semantics::fire_reverse_o`] first breaks bonds everywhere and then
//! re-homes whole components. This version instead computes, for every place,
//! what leaves and what arrives, using per-base connected sets of each place's
//! contents minus the reversed transition's bonds. The explorer compares the
//! two on reachable states.

use crate::connectivity::connected;
use crate::model::{Component, History, Marking, Net, PlaceId, State, TransId};
use crate::model::{Direction, Mode};
use crate::semantics::{last_transition, o_enabled, SemanticsError};

/// Places the component `c` would be sent to under `h`.
fn targets(net: &Net, c: &Component, h: &History, m0: &Marking) -> Vec<PlaceId> {
    match last_transition(net, c, h) {
        Some(t) => net
            .view(&t)
            .map(|v| {
                v.outputs
                    .iter()
                    .filter(|(_, l)| l.positive.intersects(c))
                    .map(|(x, _)| x.clone())
                    .collect()
            })
            .unwrap_or_default(),
        None => m0
            .iter()
            .filter(|(_, tokens)| c.bases.is_subset(&tokens.bases))
            .map(|(x, _)| x.clone())
            .collect(),
    }
}

pub fn fire_reverse_o_literal(net: &Net, s: &State, m0: &Marking, t: &TransId) -> Result<State, SemanticsError> {
    if !o_enabled(net, s, t)? {
        return Err(SemanticsError::NotEnabled {
            transition: t.clone(),
            direction: Direction::Reverse(Mode::O),
        });
    }
    let effect = &net.view(t)?.effect.bonds;
    let h = s.history.with_key(t, None);

    // Every (place, connected set) pair of the bond-reduced marking.
    let mut pieces: Vec<(PlaceId, Component)> = Vec::new();
    for (y, contents) in s.marking.iter() {
        let reduced = contents.without_bonds(effect);
        for a in &reduced.bases {
            let c = connected(a, &reduced);
            if !pieces.iter().any(|(p, q)| p == y && *q == c) {
                pieces.push((y.clone(), c));
            }
        }
    }

    let mut m = Marking::new();
    for x in net.places() {
        let mut here = s.marking.get(x).without_bonds(effect);
        for (y, c) in &pieces {
            let goes = targets(net, c, &h, m0);
            if y == x && !goes.contains(x) {
                here.remove_all(c);
            }
            if y != x && goes.contains(x) {
                here.extend(c);
            }
        }
        m.set(x.clone(), here);
    }
    Ok(State::new(m, h))
}

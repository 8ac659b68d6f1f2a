//! An interactive execution session over one net.
//!
//! `undo` is an editor-style undo: it restores the exact previous state and
//! drops the last logged action. It is unrelated to reversing a transition.

use thiserror::Error;

use crate::model::{Action, ActionParseError, Marking, Mode, Net, State, Trace, TransId};
use crate::semantics::{enabled, step, EnabledSets, SemanticsError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SessionError {
    #[error("action {index} ({action}) is not enabled")]
    NotEnabled {
        index: usize,
        action: Action,
        enabled: Box<EnabledSets>,
    },
    #[error("unknown transition `{0}`")]
    UnknownTransition(String),
    #[error(transparent)]
    Parse(#[from] ActionParseError),
    #[error(transparent)]
    Semantics(SemanticsError),
    #[error("nothing to undo")]
    NothingToUndo,
}

#[derive(Clone, Debug)]
pub struct Session {
    net: Net,
    m0: Marking,
    current: State,
    log: Vec<Action>,
    undo: Vec<State>,
}

impl Session {
    pub fn new(net: Net, m0: Marking) -> Self {
        let current = State::initial(&net, &m0);
        Session {
            net,
            m0,
            current,
            log: Vec::new(),
            undo: Vec::new(),
        }
    }

    pub fn net(&self) -> &Net {
        &self.net
    }

    pub fn initial_marking(&self) -> &Marking {
        &self.m0
    }

    pub fn state(&self) -> &State {
        &self.current
    }

    pub fn log(&self) -> Trace {
        Trace::new(self.log.clone())
    }

    pub fn enabled(&self) -> EnabledSets {
        EnabledSets::of(&self.net, &self.current).expect("session net is fixed and validated")
    }

    pub fn fire(&mut self, transition: &str) -> Result<&State, SessionError> {
        let t = self.transition(transition)?;
        self.apply(Action::forward(t), self.log.len())
    }

    pub fn reverse(&mut self, transition: &str, mode: Mode) -> Result<&State, SessionError> {
        let t = self.transition(transition)?;
        self.apply(Action::reverse(t, mode), self.log.len())
    }

    /// Applies an action given in trace syntax.
    pub fn act(&mut self, action: &str, default_mode: Mode) -> Result<&State, SessionError> {
        let action = Action::parse(action, default_mode)?;
        self.transition(action.transition.as_str())?;
        self.apply(action, self.log.len())
    }

    /// Applies every action of `trace` or none of them. On failure the
    /// reported index is the position within `trace`.
    pub fn run_trace(&mut self, trace: &str, default_mode: Mode) -> Result<&State, SessionError> {
        let trace = Trace::parse(trace, default_mode)?;
        for a in trace.actions() {
            self.transition(a.transition.as_str())?;
        }
        let saved = self.clone();
        for (i, a) in trace.actions().iter().enumerate() {
            if let Err(e) = self.apply(a.clone(), i) {
                *self = saved;
                return Err(e);
            }
        }
        Ok(&self.current)
    }

    pub fn undo(&mut self) -> Result<&State, SessionError> {
        let prev = self.undo.pop().ok_or(SessionError::NothingToUndo)?;
        self.log.pop();
        self.current = prev;
        Ok(&self.current)
    }

    pub fn reset(&mut self) -> &State {
        self.current = State::initial(&self.net, &self.m0);
        self.log.clear();
        self.undo.clear();
        &self.current
    }

    /// Replays the log from the initial state.
    pub fn replay(&self) -> Result<State, SemanticsError> {
        crate::semantics::run(&self.net, &State::initial(&self.net, &self.m0), &self.m0, &self.log).map_err(|(_, e)| e)
    }

    fn transition(&self, name: &str) -> Result<TransId, SessionError> {
        self.net
            .transition(name)
            .map_err(|_| SessionError::UnknownTransition(name.to_string()))
    }

    fn apply(&mut self, action: Action, index: usize) -> Result<&State, SessionError> {
        let ok =
            enabled(&self.net, &self.current, &action.transition, action.direction).map_err(SessionError::Semantics)?;
        if !ok {
            return Err(SessionError::NotEnabled {
                index,
                action,
                enabled: Box::new(self.enabled()),
            });
        }
        let next = step(&self.net, &self.current, &self.m0, &action).map_err(SessionError::Semantics)?;
        self.undo.push(std::mem::replace(&mut self.current, next));
        self.log.push(action);
        Ok(&self.current)
    }
}

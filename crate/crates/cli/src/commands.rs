//! Subcommand bodies. Each writes its report to `out` and returns whether the
//! checked object passed.

use std::collections::BTreeSet;
use std::io::{BufRead, Write};

use anyhow::{bail, Context, Result};

use rpn_core::equivalence::SearchConfig;
use rpn_core::explorer::theorems::{causal_equivalence_theorem, component_equivalence_theorem};
use rpn_core::explorer::{check_property, explore, ExploreMode, Property};
use rpn_core::interface::dsl::parse_unchecked;
use rpn_core::interface::json::encode_state;
use rpn_core::interface::session::{Session, SessionError};
use rpn_core::model::{Marking, Mode, Net, State};
use rpn_core::parse_net;
use rpn_core::semantics::EnabledSets;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Status {
    Pass,
    Violation,
}

impl Status {
    pub fn exit_code(self) -> u8 {
        match self {
            Status::Pass => 0,
            Status::Violation => 1,
        }
    }

    fn and(self, other: Status) -> Status {
        if self == Status::Pass {
            other
        } else {
            self
        }
    }
}

/// A usage problem: bad arguments or an unreadable file. Exit code 2.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct Usage(pub String);

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Theorem {
    Main,
    Second,
    Inclusions,
    Loop,
    Prop4,
    Preservation,
}

impl std::str::FromStr for Theorem {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "main" => Theorem::Main,
            "second" => Theorem::Second,
            "inclusions" => Theorem::Inclusions,
            "loop" => Theorem::Loop,
            "prop4" => Theorem::Prop4,
            "preservation" => Theorem::Preservation,
            _ => return Err(format!("unknown theorem `{s}`")),
        })
    }
}

pub fn read(path: &std::path::Path) -> Result<String> {
    std::fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))
        .map_err(|e| Usage(format!("{e:#}")).into())
}

/// Parses a file, reporting a parse or validation failure as a violation.
pub fn load(text: &str, out: &mut dyn Write) -> Result<Option<(Net, Marking)>> {
    match parse_net(text) {
        Ok(n) => Ok(Some(n)),
        Err(e) => {
            writeln!(out, "{e}")?;
            Ok(None)
        }
    }
}

pub fn validate(text: &str, out: &mut dyn Write) -> Result<Status> {
    let parsed = match parse_unchecked(text) {
        Ok(p) => p,
        Err(e) => {
            writeln!(out, "{e}")?;
            return Ok(Status::Violation);
        }
    };
    let report = parsed.validate();
    if report.is_ok() {
        let net = &parsed.net;
        writeln!(
            out,
            "ok: net {} ({} bases, {} places, {} transitions)",
            net.name(),
            net.bases().len(),
            net.places().len(),
            net.transitions().len()
        )?;
        return Ok(Status::Pass);
    }
    for v in &report.violations {
        writeln!(out, "{}: {v}", parsed.locate(&v.subject))?;
    }
    Ok(Status::Violation)
}

fn write_enabled(out: &mut dyn Write, e: &EnabledSets) -> Result<()> {
    let list = |s: &BTreeSet<rpn_core::TransId>| s.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(" ");
    writeln!(out, "  forward: {}", list(&e.forward))?;
    writeln!(out, "  bt:      {}", list(&e.bt))?;
    writeln!(out, "  co:      {}", list(&e.co))?;
    writeln!(out, "  o:       {}", list(&e.o))?;
    Ok(())
}

fn describe_session_error(e: &SessionError, out: &mut dyn Write) -> Result<()> {
    match e {
        SessionError::NotEnabled { index, action, enabled } => {
            writeln!(out, "NOT-ENABLED: action {index} ({action}); enabled were:")?;
            write_enabled(out, enabled)
        }
        other => Ok(writeln!(out, "{other}")?),
    }
}

/// Runs `trace` and prints the final state as JSON.
pub fn run(net: Net, m0: Marking, trace: &str, mode: Mode, out: &mut dyn Write, err: &mut dyn Write) -> Result<Status> {
    let mut session = Session::new(net, m0);
    match session.run_trace(trace, mode) {
        Ok(_) => {
            writeln!(out, "{}", encode_state(session.net(), session.state()))?;
            Ok(Status::Pass)
        }
        Err(SessionError::Parse(e)) => bail!(Usage(format!("bad trace: {e}"))),
        Err(e) => {
            describe_session_error(&e, err)?;
            Ok(Status::Violation)
        }
    }
}

fn show_state(out: &mut dyn Write, net: &Net, s: &State) -> Result<()> {
    writeln!(out, "marking: {}", s.marking)?;
    let keys: Vec<String> = net
        .transitions()
        .iter()
        .map(|t| match s.history.get(t) {
            Some(k) => format!("{t}[{k}]"),
            None => format!("{t}[-]"),
        })
        .collect();
    writeln!(out, "history: {}", keys.join(" "))?;
    Ok(())
}

const STEP_HELP: &str = "\
commands:
  t1, ~t1:o, t1,t2   apply actions (bare ~t uses the default mode)
  enabled            list enabled transitions per direction
  state              show the current marking and history
  json               print the current state as JSON
  trace              print the actions applied so far
  undo               restore the state before the last action
  reset              return to the initial state
  help, quit";

/// Interactive stepping. Reads commands from `input` until end of input.
pub fn step(net: Net, m0: Marking, mode: Mode, input: &mut dyn BufRead, out: &mut dyn Write) -> Result<Status> {
    let mut session = Session::new(net, m0);
    writeln!(out, "net {}; type `help` for commands", session.net().name())?;
    show_state(out, session.net(), session.state())?;
    let mut line = String::new();
    loop {
        write!(out, "> ")?;
        out.flush()?;
        line.clear();
        if input.read_line(&mut line)? == 0 {
            writeln!(out)?;
            break;
        }
        match line.trim() {
            "" => {}
            "quit" | "exit" => break,
            "help" => writeln!(out, "{STEP_HELP}")?,
            "enabled" => write_enabled(out, &session.enabled())?,
            "state" => show_state(out, session.net(), session.state())?,
            "json" => writeln!(out, "{}", encode_state(session.net(), session.state()))?,
            "trace" => writeln!(out, "{}", session.log())?,
            "reset" => {
                session.reset();
                show_state(out, session.net(), session.state())?;
            }
            "undo" => match session.undo() {
                Ok(_) => show_state(out, session.net(), session.state())?,
                Err(e) => writeln!(out, "{e}")?,
            },
            actions => match session.run_trace(actions, mode) {
                Ok(_) => show_state(out, session.net(), session.state())?,
                Err(e) => describe_session_error(&e, out)?,
            },
        }
    }
    Ok(Status::Pass)
}

pub fn explore_cmd(
    net: &Net,
    m0: &Marking,
    mode: ExploreMode,
    depth: usize,
    checks: &[Property],
    out: &mut dyn Write,
) -> Result<Status> {
    for p in checks {
        if !p.modes().contains(&mode) {
            bail!(Usage(format!("property {p} cannot be checked on a {mode} exploration")));
        }
    }
    let space = explore(net, m0, mode, depth)?;
    writeln!(
        out,
        "{} states, {} edges, {} markings (mode {mode}, depth {depth}{})",
        space.len(),
        space.edges().len(),
        space.markings().len(),
        if space.truncated() { ", truncated" } else { "" }
    )?;
    let mut status = Status::Pass;
    for p in checks {
        let report = check_property(&space, *p)?;
        writeln!(out, "{report}")?;
        if !report.passed() {
            status = Status::Violation;
        }
    }
    Ok(status)
}

pub fn check(net: &Net, m0: &Marking, theorem: Theorem, max_len: usize, out: &mut dyn Write) -> Result<Status> {
    let property = match theorem {
        Theorem::Main => {
            let r = causal_equivalence_theorem(net, m0, max_len, &SearchConfig::default())?;
            writeln!(out, "causal equivalence, traces up to {max_len}: {r}")?;
            for d in &r.discrepancies {
                writeln!(out, "  discrepancy: {d}")?;
            }
            for (a, b, why) in &r.unknown {
                writeln!(out, "  unknown: [{a}] vs [{b}] ({why:?})")?;
            }
            return Ok(if r.passed() { Status::Pass } else { Status::Violation });
        }
        Theorem::Second => {
            let r = component_equivalence_theorem(net, m0, max_len)?;
            writeln!(out, "component equivalence, traces up to {max_len}: {r}")?;
            for d in &r.discrepancies {
                writeln!(out, "  discrepancy: {d}")?;
            }
            return Ok(if r.passed() { Status::Pass } else { Status::Violation });
        }
        Theorem::Inclusions => Property::Inclusions,
        Theorem::Loop => Property::Loop,
        Theorem::Prop4 => Property::Outplace,
        Theorem::Preservation => Property::Preservation,
    };
    let mut status = Status::Pass;
    for &mode in property.modes() {
        status = status.and(explore_cmd(net, m0, mode, max_len, &[property], out)?);
    }
    Ok(status)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rpn_core::nets;

    fn text(out: Vec<u8>) -> String {
        String::from_utf8(out).unwrap()
    }

    #[test]
    fn validate_lists_violations_with_positions() {
        let mut out = Vec::new();
        let src = "net n {\n  bases: a, b;\n  places: p, q;\n  transitions: t;\n  arc p -> t { a }\n  arc t -> q { a, !b }\n  initial { p: { a }, q: { b } }\n}";
        assert_eq!(validate(src, &mut out).unwrap(), Status::Violation);
        let out = text(out);
        assert_eq!(out.lines().collect::<Vec<_>>().len(), 1, "{out}");
        assert!(out.starts_with("4:16: NEG-ON-OUT-ARC"), "{out}");
    }

    #[test]
    fn run_reports_not_enabled_with_snapshot() {
        let (net, m0) = parse_net(nets::CATALYSIS).unwrap();
        let (mut out, mut err) = (Vec::new(), Vec::new());
        assert_eq!(
            run(net, m0, "t2", Mode::Co, &mut out, &mut err).unwrap(),
            Status::Violation
        );
        let err = text(err);
        assert!(err.starts_with("NOT-ENABLED: action 0 (t2)"), "{err}");
        assert!(err.contains("forward: t1"), "{err}");
    }

    #[test]
    fn step_session_applies_and_undoes() {
        let (net, m0) = parse_net(nets::CATALYSIS).unwrap();
        let mut input: &[u8] = b"t1\nt2\n~t1:o\ntrace\nundo\nundo\nenabled\nquit\n";
        let mut out = Vec::new();
        step(net, m0, Mode::Co, &mut input, &mut out).unwrap();
        let out = text(out);
        assert!(out.contains("marking: u:{c} y:{a, b, a-b}"), "{out}");
        assert!(out.contains("t1,t2,~t1:o"));
        assert!(out.contains("marking: w:{b} x:{a, c, a-c}"));
        assert!(out.contains("  forward: t2"));
    }

    #[test]
    fn check_modes_cover_the_named_properties() {
        let (net, m0) = parse_net(nets::OUT_OF_ORDER).unwrap();
        for th in ["main", "second", "inclusions", "loop", "prop4", "preservation"] {
            let mut out = Vec::new();
            let status = check(&net, &m0, th.parse().unwrap(), 4, &mut out).unwrap();
            assert_eq!(status, Status::Pass, "{th}: {}", text(out));
        }
    }

    #[test]
    fn explore_rejects_mismatched_property() {
        let (net, m0) = parse_net(nets::CATALYSIS).unwrap();
        let err = explore_cmd(&net, &m0, ExploreMode::O, 4, &[Property::Loop], &mut Vec::new()).unwrap_err();
        assert!(err.downcast_ref::<Usage>().is_some());
    }
}

//! Finite state machines with event-triggered, optionally guarded
//! transitions, and a scripted runner that records a trace.
//!
//! State bodies are symbolic action ids: firing a transition records the
//! target's action in the trace, and the host decides what it means.

mod syntax;

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use crate::diagnostic::{Code, Diagnostic};
use crate::model::{ClassModel, ObjectModel, Value};
use crate::ocl::{evaluate_expression, Binding, OclExpr, OclValue};

pub use syntax::{
    parse_machine, parse_machine_file, parse_scenario, parse_scenario_file, render_trace,
};

#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub name: String,
    pub body_action: Option<String>,
}

impl State {
    pub fn new(name: impl Into<String>) -> Self {
        State {
            name: name.into(),
            body_action: None,
        }
    }

    pub fn action(mut self, action: impl Into<String>) -> Self {
        self.body_action = Some(action.into());
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Transition {
    pub source: String,
    pub target: String,
    pub event: String,
    /// Evaluated over the session variables; absent means always.
    pub guard: Option<OclExpr>,
}

impl Transition {
    pub fn new(
        source: impl Into<String>,
        target: impl Into<String>,
        event: impl Into<String>,
    ) -> Self {
        Transition {
            source: source.into(),
            target: target.into(),
            event: event.into(),
            guard: None,
        }
    }

    pub fn when(mut self, guard: OclExpr) -> Self {
        self.guard = Some(guard);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct StateMachine {
    pub name: String,
    pub states: Vec<State>,
    /// Declared events in declaration order.
    pub events: Vec<String>,
    pub transitions: Vec<Transition>,
    pub initial_state: String,
}

impl StateMachine {
    pub fn new(name: impl Into<String>) -> Self {
        StateMachine {
            name: name.into(),
            ..Default::default()
        }
    }

    pub fn with_state(mut self, state: State) -> Self {
        self.states.push(state);
        self
    }

    pub fn with_event(mut self, event: impl Into<String>) -> Self {
        self.events.push(event.into());
        self
    }

    pub fn with_transition(mut self, t: Transition) -> Self {
        self.transitions.push(t);
        self
    }

    pub fn initial(mut self, state: impl Into<String>) -> Self {
        self.initial_state = state.into();
        self
    }

    pub fn state(&self, name: &str) -> Option<&State> {
        self.states.iter().find(|s| s.name == name)
    }

    pub fn has_event(&self, name: &str) -> bool {
        self.events.iter().any(|e| e == name)
    }
}

/// Structural checks plus the determinism approximation: at most one
/// guardless transition per (source, event), and nothing after it.
pub fn validate_machine(m: &StateMachine) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    let mut seen = HashSet::new();
    for s in &m.states {
        if !seen.insert(s.name.as_str()) {
            diags.push(Diagnostic::error(
                Code::DupState,
                format!("state `{}` declared twice", s.name),
            ));
        }
    }
    let mut seen = HashSet::new();
    for e in &m.events {
        if !seen.insert(e.as_str()) {
            diags.push(Diagnostic::error(
                Code::DupEvent,
                format!("event `{e}` declared twice"),
            ));
        }
    }
    if m.initial_state.is_empty() {
        diags.push(Diagnostic::error(
            Code::NoInitial,
            "no initial state declared",
        ));
    } else if m.state(&m.initial_state).is_none() {
        diags.push(Diagnostic::error(
            Code::UnknownState,
            format!("initial state `{}` is not declared", m.initial_state),
        ));
    }
    // (source, event) -> index of the first guardless transition.
    let mut catch_all: HashMap<(&str, &str), usize> = HashMap::new();
    for (i, t) in m.transitions.iter().enumerate() {
        let label = format!("transition #{} `{} -> {}`", i + 1, t.source, t.target);
        for s in [&t.source, &t.target] {
            if m.state(s).is_none() {
                diags.push(Diagnostic::error(
                    Code::UnknownState,
                    format!("{label}: state `{s}` is not declared"),
                ));
            }
        }
        if !m.has_event(&t.event) {
            diags.push(Diagnostic::error(
                Code::UnknownEvent,
                format!("{label}: event `{}` is not declared", t.event),
            ));
        }
        let key = (t.source.as_str(), t.event.as_str());
        match (catch_all.get(&key), &t.guard) {
            (Some(&first), None) => diags.push(Diagnostic::error(
                Code::Nondeterministic,
                format!(
                    "{label}: second guardless transition from `{}` on `{}` (first is #{})",
                    t.source,
                    t.event,
                    first + 1
                ),
            )),
            (Some(&first), Some(_)) => diags.push(Diagnostic::warning(
                Code::UnreachableTransition,
                format!(
                    "{label}: never fires, shadowed by guardless transition #{}",
                    first + 1
                ),
            )),
            (None, None) => {
                catch_all.insert(key, i);
            }
            (None, Some(_)) => {}
        }
    }
    diags
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceEntry {
    pub event: String,
    pub from: String,
    pub to: String,
    pub actions_fired: Vec<String>,
    /// False for a no-op step where no transition matched.
    pub fired: bool,
}

impl fmt::Display for TraceEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} -> {} [{}]",
            self.event,
            self.from,
            self.to,
            self.actions_fired.join(", ")
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Session {
    pub current_state: String,
    pub variables: BTreeMap<String, Value>,
    pub trace: Vec<TraceEntry>,
}

pub type Payload = BTreeMap<String, Value>;

impl Session {
    pub fn start(m: &StateMachine) -> Self {
        Session {
            current_state: m.initial_state.clone(),
            variables: BTreeMap::new(),
            trace: Vec::new(),
        }
    }

    /// Applies one event in place. On error the session is left untouched.
    pub fn apply(
        &mut self,
        m: &StateMachine,
        event: &str,
        payload: &Payload,
    ) -> Result<&TraceEntry, Diagnostic> {
        if !m.has_event(event) {
            return Err(Diagnostic::error(
                Code::UnknownEvent,
                format!("event `{event}` is not declared"),
            ));
        }
        let mut vars = self.variables.clone();
        vars.extend(payload.iter().map(|(k, v)| (k.clone(), v.clone())));
        let fired = select_transition(m, &self.current_state, event, &vars)?;
        let entry = match fired {
            Some(t) => TraceEntry {
                event: event.to_string(),
                from: self.current_state.clone(),
                to: t.target.clone(),
                actions_fired: m
                    .state(&t.target)
                    .and_then(|s| s.body_action.clone())
                    .into_iter()
                    .collect(),
                fired: true,
            },
            None => TraceEntry {
                event: event.to_string(),
                from: self.current_state.clone(),
                to: self.current_state.clone(),
                actions_fired: Vec::new(),
                fired: false,
            },
        };
        self.variables = vars;
        self.current_state = entry.to.clone();
        self.trace.push(entry);
        Ok(self.trace.last().expect("just pushed"))
    }
}

fn select_transition<'m>(
    m: &'m StateMachine,
    current: &str,
    event: &str,
    vars: &Payload,
) -> Result<Option<&'m Transition>, Diagnostic> {
    let env = vars.iter().fold(Binding::new(), |b, (k, v)| {
        b.with_var(k, OclValue::from_value(v))
    });
    let (no_classes, no_objects) = (ClassModel::default(), ObjectModel::default());
    for (i, t) in m.transitions.iter().enumerate() {
        if t.source != current || t.event != event {
            continue;
        }
        let Some(guard) = &t.guard else {
            return Ok(Some(t));
        };
        match evaluate_expression(guard, &env, &no_objects, &no_classes) {
            Ok(OclValue::Bool(true)) => return Ok(Some(t)),
            Ok(OclValue::Bool(false)) => {}
            Ok(other) => {
                return Err(Diagnostic::error(
                    Code::GuardError,
                    format!(
                        "guard of transition #{} evaluated to {other:?}, not Boolean",
                        i + 1
                    ),
                ))
            }
            Err(e) => {
                return Err(Diagnostic::error(
                    Code::GuardError,
                    format!("guard of transition #{}: {e}", i + 1),
                ))
            }
        }
    }
    Ok(None)
}

/// Functional form of [`Session::apply`].
pub fn step(
    m: &StateMachine,
    session: &Session,
    event: &str,
    payload: &Payload,
) -> Result<Session, Diagnostic> {
    let mut next = session.clone();
    next.apply(m, event, payload)?;
    Ok(next)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioRun {
    pub session: Session,
    /// Index of the failing event and why; the trace holds the steps before it.
    pub failure: Option<(usize, Diagnostic)>,
}

impl ScenarioRun {
    pub fn completed(&self) -> bool {
        self.failure.is_none()
    }
}

pub fn run_scenario(m: &StateMachine, events: &[(String, Payload)]) -> ScenarioRun {
    let mut session = Session::start(m);
    for (i, (event, payload)) in events.iter().enumerate() {
        if let Err(d) = session.apply(m, event, payload) {
            return ScenarioRun {
                session,
                failure: Some((i, d)),
            };
        }
    }
    ScenarioRun {
        session,
        failure: None,
    }
}

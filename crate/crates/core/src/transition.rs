//! Extraction of the probabilistic transition system from a compiled
//! description and checks of the three modelling assumptions.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::engine::{self, EngineError, StableModelRecord, TOLERANCE};
use crate::lang::{Atom, CausalLaw, ConstantKind, ConstantRef, Formula, Term, TimedAtom};
use crate::translator::{translate, translate_part, CompiledDescription, GroundConstant, GroundProgram, Part};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TransitionError {
    #[error("description has no states")]
    NoStates,
    #[error("state index {0} out of range")]
    StateIndex(usize),
    #[error("action index {0} out of range")]
    ActionIndex(usize),
    #[error("impossible condition: {0}")]
    Impossible(String),
    #[error("assumption 2 violated: {0}")]
    Successor(String),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

/// A value assignment to a fixed, name-ordered list of ground constants.
/// Ordering compares values position by position.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Assignment {
    pub entries: Vec<(String, String)>,
}

impl Assignment {
    fn from_record(r: &StableModelRecord, p: &GroundProgram, vars: &[usize]) -> Self {
        let entries = vars
            .iter()
            .map(|&v| {
                let sv = &p.signature.vars[v];
                (sv.name.clone(), sv.values[r.interpretation.values[v]].clone())
            })
            .collect();
        Assignment { entries }
    }

    pub fn get(&self, name: &str) -> Option<&str> {
        self.entries.iter().find(|(n, _)| n == name).map(|(_, v)| v.as_str())
    }

    /// Names of the constants set to `true`.
    pub fn true_constants(&self) -> Vec<&str> {
        self.entries.iter().filter(|(_, v)| v == "true").map(|(n, _)| n.as_str()).collect()
    }

    /// The conjunction of the assignment's atoms at `step`.
    pub fn formula(&self, step: usize) -> Formula<TimedAtom> {
        Formula::and(
            self.entries
                .iter()
                .map(|(n, v)| Formula::Atom(TimedAtom { step, atom: ground_atom(n, v) }))
                .collect(),
        )
    }

    /// Does the assignment satisfy an untimed ground formula?
    pub fn satisfies(&self, f: &Formula<Atom>) -> bool {
        f.eval(&|a: &Atom| self.get(&a.constant.ground_name()) == Some(a.value.name()))
    }
}

/// An atom for a ground constant name such as `In(B1)`.
fn ground_atom(name: &str, value: &str) -> Atom {
    let (base, args) = match name.find('(') {
        Some(i) => (&name[..i], name[i + 1..name.len() - 1].split(',').map(|s| Term::obj(s.trim())).collect()),
        None => (name, Vec::new()),
    };
    Atom::new(ConstantRef::with_args(base, args), Term::obj(value))
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .entries
            .iter()
            .map(|(n, v)| match v.as_str() {
                "true" => n.clone(),
                "false" => format!("~{}", n),
                _ => format!("{}={}", n, v),
            })
            .collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

pub type State = Assignment;
pub type ActionProfile = Assignment;
pub type PfAssignment = Assignment;

impl Assignment {
    /// Display form of an action profile: the true actions, or `none`.
    pub fn action_label(&self) -> String {
        let t = self.true_constants();
        if t.is_empty() {
            "none".into()
        } else {
            t.join("+")
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Edge {
    pub from: usize,
    pub action: usize,
    pub to: usize,
    pub probability: f64,
    pub reward: f64,
}

/// `T(D)`: states, action profiles and (p, u)-labelled edges, together with
/// the pf-transitions they were derived from.
#[derive(Clone, Debug, Serialize)]
pub struct TransitionSystem {
    pub states: Vec<State>,
    pub actions: Vec<ActionProfile>,
    pub edges: Vec<Edge>,
    /// Successor states for every observed (state, action, pf) triple.
    #[serde(skip)]
    pub pf_transitions: BTreeMap<(usize, usize, PfAssignment), BTreeSet<usize>>,
    /// Step-0 or step-1 fluent assignments of one-step models that are not states.
    #[serde(skip)]
    pub non_states: Vec<State>,
    #[serde(skip)]
    cells: HashMap<(usize, usize, usize), (f64, f64)>,
    #[serde(skip)]
    rows: HashMap<(usize, usize), f64>,
}

fn vars_of(p: &GroundProgram, step: usize, kinds: &[ConstantKind]) -> Vec<usize> {
    let mut vs: Vec<usize> = p
        .signature
        .vars
        .iter()
        .enumerate()
        .filter(|(_, v)| v.step == Some(step) && v.kind.is_some_and(|k| kinds.contains(&k)))
        .map(|(i, _)| i)
        .collect();
    vs.sort_by(|a, b| p.signature.vars[*a].name.cmp(&p.signature.vars[*b].name));
    vs
}

const FLUENTS: [ConstantKind; 2] = [ConstantKind::RegularFluent, ConstantKind::StaticFluent];

/// States: fluent projections of the stable models of the horizon-0
/// transition part, deduplicated and sorted.
pub fn enumerate_states(c: &CompiledDescription) -> Result<Vec<State>, TransitionError> {
    let p = translate_part(c, 0, Part::TransitionsOnly);
    let models = match engine::enumerate_stable_models(&p) {
        Ok(ms) => ms,
        Err(EngineError::NoStableModel) => return Err(TransitionError::NoStates),
        Err(e) => return Err(e.into()),
    };
    let vars = vars_of(&p, 0, &FLUENTS);
    let set: BTreeSet<State> = models.iter().map(|r| Assignment::from_record(r, &p, &vars)).collect();
    Ok(set.into_iter().collect())
}

/// Action profiles: step-0 action projections of the one-step models.
pub fn enumerate_actions(c: &CompiledDescription) -> Result<Vec<ActionProfile>, TransitionError> {
    Ok(TransitionSystem::build(c)?.actions)
}

impl TransitionSystem {
    /// Enumerates all stable models of the one-step transition part once and
    /// aggregates them into edges.
    pub fn build(c: &CompiledDescription) -> Result<Self, TransitionError> {
        let states = enumerate_states(c)?;
        let p = translate_part(c, 1, Part::TransitionsOnly);
        let models = engine::enumerate_stable_models(&p)?;
        let s_vars = vars_of(&p, 0, &FLUENTS);
        let t_vars = vars_of(&p, 1, &FLUENTS);
        let a_vars = vars_of(&p, 0, &[ConstantKind::Action]);
        let pf_vars = vars_of(&p, 0, &[ConstantKind::Pf]);

        let state_index: HashMap<&State, usize> = states.iter().enumerate().map(|(i, s)| (s, i)).collect();
        let mut actions_set = BTreeSet::new();
        let mut projected = Vec::with_capacity(models.len());
        let mut non_states = BTreeSet::new();
        for r in &models {
            let s = Assignment::from_record(r, &p, &s_vars);
            let t = Assignment::from_record(r, &p, &t_vars);
            let a = Assignment::from_record(r, &p, &a_vars);
            let pf = Assignment::from_record(r, &p, &pf_vars);
            actions_set.insert(a.clone());
            projected.push((s, a, t, pf, r.probability, r.utility));
        }
        let actions: Vec<ActionProfile> = actions_set.into_iter().collect();
        let action_index: HashMap<&ActionProfile, usize> = actions.iter().enumerate().map(|(i, a)| (a, i)).collect();

        let mut cells: HashMap<(usize, usize, usize), (f64, f64)> = HashMap::new();
        let mut rows: HashMap<(usize, usize), f64> = HashMap::new();
        let mut pf_transitions: BTreeMap<(usize, usize, PfAssignment), BTreeSet<usize>> = BTreeMap::new();
        for (s, a, t, pf, prob, util) in &projected {
            let (Some(&si), Some(&ti)) = (state_index.get(s), state_index.get(t)) else {
                for x in [s, t] {
                    if !state_index.contains_key(x) {
                        non_states.insert(x.clone());
                    }
                }
                continue;
            };
            let ai = action_index[a];
            let cell = cells.entry((si, ai, ti)).or_insert((0.0, 0.0));
            cell.0 += prob;
            cell.1 += prob * util;
            *rows.entry((si, ai)).or_insert(0.0) += prob;
            pf_transitions.entry((si, ai, pf.clone())).or_default().insert(ti);
        }
        let mut keys: Vec<_> = cells.keys().copied().collect();
        keys.sort_unstable();
        let edges = keys
            .into_iter()
            .map(|(s, a, t)| {
                let (w, wu) = cells[&(s, a, t)];
                Edge { from: s, action: a, to: t, probability: w / rows[&(s, a)], reward: wu / w }
            })
            .collect();
        Ok(TransitionSystem { states, actions, edges, pf_transitions, non_states: non_states.into_iter().collect(), cells, rows })
    }

    fn check(&self, s: usize, e: usize) -> Result<(), TransitionError> {
        if s >= self.states.len() {
            return Err(TransitionError::StateIndex(s));
        }
        if e >= self.actions.len() {
            return Err(TransitionError::ActionIndex(e));
        }
        Ok(())
    }

    /// `P(1:s' | 0:s & 0:e)`; zero when no stable model links them.
    pub fn transition_probability(&self, s: usize, e: usize, t: usize) -> Result<f64, TransitionError> {
        self.check(s, e)?;
        if t >= self.states.len() {
            return Err(TransitionError::StateIndex(t));
        }
        let row = self.rows.get(&(s, e)).copied().unwrap_or(0.0);
        if row <= 0.0 {
            return Err(TransitionError::Impossible(format!("0:{} & 0:{}", self.states[s], self.actions[e])));
        }
        Ok(self.cells.get(&(s, e, t)).map(|c| c.0 / row).unwrap_or(0.0))
    }

    /// `E[U(0:s & 0:e & 1:s')]`; an error for zero-probability triples.
    pub fn transition_reward(&self, s: usize, e: usize, t: usize) -> Result<f64, TransitionError> {
        self.check(s, e)?;
        match self.cells.get(&(s, e, t)) {
            Some(&(w, wu)) if w > 0.0 => Ok(wu / w),
            _ => Err(TransitionError::Impossible(format!(
                "0:{} & 0:{} & 1:{}",
                self.states[s],
                self.actions[e],
                self.states.get(t).map(|x| x.to_string()).unwrap_or_default()
            ))),
        }
    }

    /// The unique successor of `s` under `e` for the pf assignment `pf`.
    pub fn successor(&self, s: usize, e: usize, pf: &PfAssignment) -> Result<usize, TransitionError> {
        self.check(s, e)?;
        match self.pf_transitions.get(&(s, e, pf.clone())) {
            Some(ts) if ts.len() == 1 => Ok(*ts.iter().next().unwrap()),
            Some(ts) => Err(TransitionError::Successor(format!(
                "{} successors of {} under {} with {}",
                ts.len(),
                self.states[s],
                self.actions[e].action_label(),
                pf
            ))),
            None => Err(TransitionError::Successor(format!(
                "no successor of {} under {} with {}",
                self.states[s],
                self.actions[e].action_label(),
                pf
            ))),
        }
    }

    pub fn find_state(&self, f: &Formula<Atom>) -> Vec<usize> {
        (0..self.states.len()).filter(|&i| self.states[i].satisfies(f)).collect()
    }

    pub fn find_action(&self, label: &str) -> Option<usize> {
        self.actions.iter().position(|a| a.action_label() == label)
    }
}

// ---------------------------------------------------------------- assumptions

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AssumptionViolation {
    pub assumption: u8,
    pub message: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct AssumptionReport {
    pub violations: Vec<AssumptionViolation>,
    /// Observations that are not violations, e.g. unexecutable action profiles.
    pub notes: Vec<String>,
}

impl AssumptionReport {
    pub fn holds(&self, assumption: u8) -> bool {
        !self.violations.iter().any(|v| v.assumption == assumption)
    }

    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// All value assignments to `constants`, in lexicographic value order.
fn all_assignments(constants: &[&GroundConstant]) -> Vec<Assignment> {
    let mut out = vec![Assignment { entries: vec![] }];
    for c in constants {
        let mut vals = c.values.clone();
        vals.sort();
        out = out
            .into_iter()
            .flat_map(|a| {
                vals.iter().map(move |v| {
                    let mut a = a.clone();
                    a.entries.push((c.name.clone(), v.clone()));
                    a
                })
            })
            .collect();
    }
    out
}

/// Checks no concurrency, unique successors per pf assignment, and unique
/// initial states per initpf assignment.
pub fn check_assumptions(c: &CompiledDescription, ts: &TransitionSystem) -> Result<AssumptionReport, TransitionError> {
    let mut report = AssumptionReport::default();
    let mut violate = |n: u8, message: String| report.violations.push(AssumptionViolation { assumption: n, message });

    for a in &ts.actions {
        let t = a.true_constants();
        if t.len() > 1 {
            violate(1, format!("actions {} can occur together", t.join(" and ")));
        }
    }
    for s in &ts.non_states {
        violate(2, format!("transition mentions {} which is not a state", s));
    }

    // every profile with at most one true action, over every state and pf assignment
    let act_consts = c.actions();
    let mut profiles = vec![Assignment { entries: act_consts.iter().map(|g| (g.name.clone(), "false".to_string())).collect() }];
    for i in 0..act_consts.len() {
        let mut p = profiles[0].clone();
        p.entries[i].1 = "true".into();
        profiles.push(p);
    }
    let pfs = all_assignments(&c.pfs());
    for profile in &profiles {
        let Some(e) = ts.actions.iter().position(|a| a == profile) else {
            violate(2, format!("action {} is not executable in any state", profile.action_label()));
            continue;
        };
        for s in 0..ts.states.len() {
            for pf in &pfs {
                if let Err(TransitionError::Successor(m)) = ts.successor(s, e, pf) {
                    violate(2, m);
                }
            }
        }
    }
    let expected = (act_consts.len() + 1) as f64;
    let executable = ts.actions.iter().filter(|a| a.true_constants().len() <= 1).count();
    if (executable as f64) < expected {
        report.notes.push(format!(
            "{} of {} action profiles are executable; action-sequence probabilities still use {}",
            executable, expected, expected
        ));
    }

    // initial states; with no initpf constants and no initial laws the
    // initial state is supplied by the caller
    let has_init = !c.initpfs().is_empty()
        || c.description.laws.iter().any(|l| matches!(l.law, CausalLaw::InitialStatic { .. }));
    if !has_init {
        report.notes.push("no initial-state laws; every state is a candidate initial state".into());
        return Ok(report);
    }
    let p0 = translate(c, 0);
    let init_vars = vars_of(&p0, 0, &[ConstantKind::InitPf]);
    let fl_vars = vars_of(&p0, 0, &FLUENTS);
    match engine::enumerate_stable_models(&p0) {
        Ok(models) => {
            let mut by_init: BTreeMap<Assignment, BTreeSet<Assignment>> = BTreeMap::new();
            for r in &models {
                by_init
                    .entry(Assignment::from_record(r, &p0, &init_vars))
                    .or_default()
                    .insert(Assignment::from_record(r, &p0, &fl_vars));
            }
            for init in all_assignments(&c.initpfs()) {
                let n = by_init.get(&init).map_or(0, |s| s.len());
                if n != 1 {
                    violate(3, format!("initpf assignment {} yields {} initial states", init, n));
                }
            }
        }
        Err(EngineError::NoStableModel) => violate(3, "no initial state exists".into()),
        Err(e) => return Err(e.into()),
    }
    Ok(report)
}

// ------------------------------------------------------------------- formulas

/// `0:s0 & 0:a0 & 1:s1 & ... & m:sm`.
pub fn history_formula(ts: &TransitionSystem, states: &[usize], actions: &[usize]) -> Result<Formula<TimedAtom>, TransitionError> {
    let mut items = Vec::new();
    for (i, &s) in states.iter().enumerate() {
        let st = ts.states.get(s).ok_or(TransitionError::StateIndex(s))?;
        items.push(st.formula(i));
        if let Some(&a) = actions.get(i) {
            let ac = ts.actions.get(a).ok_or(TransitionError::ActionIndex(a))?;
            items.push(ac.formula(i));
        }
    }
    Ok(Formula::and(items))
}

/// `C_{pi,m}`: for every step `i < m` and state `s`, `i:s -> i:pi(s, i)`.
pub fn policy_formula(ts: &TransitionSystem, m: usize, pi: impl Fn(usize, usize) -> usize) -> Result<Formula<TimedAtom>, TransitionError> {
    let mut items = Vec::new();
    for i in 0..m {
        for s in 0..ts.states.len() {
            let a = pi(s, i);
            let ac = ts.actions.get(a).ok_or(TransitionError::ActionIndex(a))?;
            items.push(Formula::implies(ts.states[s].formula(i), ac.formula(i)));
        }
    }
    Ok(Formula::and(items))
}

/// Row sums of the edge probabilities, for sanity checks.
pub fn row_sums(ts: &TransitionSystem) -> BTreeMap<(usize, usize), f64> {
    let mut sums = BTreeMap::new();
    for e in &ts.edges {
        *sums.entry((e.from, e.action)).or_insert(0.0) += e.probability;
    }
    sums
}

pub fn is_row_stochastic(ts: &TransitionSystem) -> bool {
    row_sums(ts).values().all(|s| (s - 1.0).abs() <= TOLERANCE)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_description;
    use crate::translator::compile;

    fn ts_of(text: &str) -> (CompiledDescription, TransitionSystem) {
        let c = compile(&parse_description(text).unwrap()).unwrap();
        let ts = TransitionSystem::build(&c).unwrap();
        (c, ts)
    }

    #[test]
    fn inertial_fluent_without_actions() {
        let (c, ts) = ts_of("fluent F. inertial F.");
        assert_eq!(ts.states.len(), 2);
        assert_eq!(ts.actions.len(), 1);
        assert_eq!(ts.edges.len(), 2);
        assert!(ts.edges.iter().all(|e| e.from == e.to && (e.probability - 1.0).abs() < TOLERANCE));
        let r = check_assumptions(&c, &ts).unwrap();
        assert!(r.ok());
        assert!(r.notes.iter().any(|n| n.contains("candidate initial state")));
    }

    #[test]
    fn ambiguous_initial_state_is_reported() {
        let (c, ts) = ts_of("fluent F, G. inertial F, G. initially F.");
        let r = check_assumptions(&c, &ts).unwrap();
        assert!(r.holds(1) && r.holds(2));
        // nothing fixes the initial value of G
        assert!(!r.holds(3));
    }

    #[test]
    fn no_fluents_gives_one_empty_state() {
        let (_, ts) = ts_of("action A.");
        assert_eq!(ts.states.len(), 1);
        assert!(ts.states[0].entries.is_empty());
        assert_eq!(ts.actions.len(), 2);
    }

    #[test]
    fn concurrency_is_reported() {
        let (c, ts) = ts_of("fluent F. action A, B. inertial F. A causes F.");
        let r = check_assumptions(&c, &ts).unwrap();
        assert!(!r.holds(1));
        assert!(r.violations.iter().any(|v| v.message.contains("A and B")));
    }

    #[test]
    fn nondeterministic_successor_is_reported() {
        // F may or may not become true after A: two successors for one pf assignment
        let (c, ts) = ts_of("fluent F. action A. inertial F. caused {F} after A.");
        let r = check_assumptions(&c, &ts).unwrap();
        assert!(!r.holds(2));
        assert!(r.holds(1));
    }

    #[test]
    fn history_formula_shape() {
        let (_, ts) = ts_of("fluent F. inertial F.");
        let f = history_formula(&ts, &[0], &[]).unwrap();
        assert_eq!(f, ts.states[0].formula(0));
        let c = policy_formula(&ts, 1, |_, _| 0).unwrap();
        assert!(matches!(c, Formula::And(ref v) if v.len() == 2));
    }
}

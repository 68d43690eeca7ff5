//! Serializable dumps and their text/TSV renderings.

use std::collections::BTreeMap;

use serde::Serialize;

use pbcplus::mdp::Mdp;
use pbcplus::transition::{Assignment, TransitionSystem};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Json,
    Tsv,
}

/// Shortest decimal rendering within 1e-9: `5.6`, `0.8`, `-1`.
pub fn num(x: f64) -> String {
    let s = format!("{:.9}", x);
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

pub fn json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("dumps serialize") + "\n"
}

#[derive(Serialize)]
pub struct Entry {
    pub index: usize,
    pub label: String,
    pub assignment: BTreeMap<String, String>,
}

impl Entry {
    fn new(index: usize, a: &Assignment, label: String) -> Self {
        Entry { index, label, assignment: a.entries.iter().cloned().collect() }
    }
}

pub fn state_entries(ts: &TransitionSystem) -> Vec<Entry> {
    ts.states.iter().enumerate().map(|(i, s)| Entry::new(i, s, s.to_string())).collect()
}

pub fn action_entries(ts: &TransitionSystem) -> Vec<Entry> {
    ts.actions.iter().enumerate().map(|(i, a)| Entry::new(i, a, a.action_label())).collect()
}

pub fn listing(entries: &[Entry], noun: &str, format: Format) -> String {
    match format {
        Format::Json => json(&entries),
        Format::Tsv => entries.iter().map(|e| format!("{}\t{}\n", e.index, e.label)).collect(),
        Format::Text => {
            let mut out: String = entries.iter().map(|e| format!("{:>4}  {}\n", e.index, e.label)).collect();
            out.push_str(&format!("{} {} detected.\n", entries.len(), noun));
            out
        }
    }
}

#[derive(Serialize)]
pub struct EdgeEntry {
    pub from: usize,
    pub action: usize,
    pub to: usize,
    pub probability: f64,
    pub reward: f64,
}

#[derive(Serialize)]
pub struct TransitionDump {
    pub states: Vec<Entry>,
    pub actions: Vec<Entry>,
    pub edges: Vec<EdgeEntry>,
}

pub fn transitions(ts: &TransitionSystem, format: Format) -> String {
    let edges: Vec<EdgeEntry> = ts
        .edges
        .iter()
        .map(|e| EdgeEntry { from: e.from, action: e.action, to: e.to, probability: e.probability, reward: e.reward })
        .collect();
    match format {
        Format::Json => json(&TransitionDump { states: state_entries(ts), actions: action_entries(ts), edges }),
        Format::Tsv => edges
            .iter()
            .map(|e| format!("{}\t{}\t{}\t{}\t{}\n", e.from, e.action, e.to, num(e.probability), num(e.reward)))
            .collect(),
        Format::Text => {
            let mut out = String::new();
            for e in &edges {
                out.push_str(&format!(
                    "{} --{}: p={}, u={}--> {}\n",
                    ts.states[e.from],
                    ts.actions[e.action].action_label(),
                    num(e.probability),
                    num(e.reward),
                    ts.states[e.to]
                ));
            }
            out.push_str(&format!("{} states, {} actions, {} edges.\n", ts.states.len(), ts.actions.len(), edges.len()));
            out
        }
    }
}

#[derive(Serialize)]
pub struct MdpDump<'a> {
    pub states: Vec<Entry>,
    pub actions: Vec<Entry>,
    /// `transitions[a][s][s']`.
    pub transitions: &'a [Vec<Vec<f64>>],
    /// `rewards[a][s][s']`.
    pub rewards: &'a [Vec<Vec<f64>>],
}

pub fn mdp(m: &Mdp, ts: &TransitionSystem, format: Format) -> String {
    match format {
        Format::Json => json(&MdpDump { states: state_entries(ts), actions: action_entries(ts), transitions: &m.transitions, rewards: &m.rewards }),
        Format::Tsv => {
            let mut out = String::new();
            for a in 0..m.n_actions() {
                for s in 0..m.n_states() {
                    for t in 0..m.n_states() {
                        out.push_str(&format!("{}\t{}\t{}\t{}\t{}\n", a, s, t, num(m.transitions[a][s][t]), num(m.rewards[a][s][t])));
                    }
                }
            }
            out
        }
        Format::Text => {
            let mut out = format!("MDP with {} states and {} actions.\n", m.n_states(), m.n_actions());
            for a in 0..m.n_actions() {
                out.push_str(&format!("action {} ({}):\n", a, m.actions[a]));
                for s in 0..m.n_states() {
                    let row: Vec<String> = (0..m.n_states())
                        .filter(|&t| m.transitions[a][s][t] > 0.0)
                        .map(|t| format!("{}: p={} r={}", t, num(m.transitions[a][s][t]), num(m.rewards[a][s][t])))
                        .collect();
                    let row = if row.is_empty() { "not executable".to_string() } else { row.join(", ") };
                    out.push_str(&format!("  {} -> {}\n", s, row));
                }
            }
            out
        }
    }
}

#[derive(Serialize)]
pub struct InitialValue {
    pub state: usize,
    pub label: String,
    pub value: f64,
}

#[derive(Serialize)]
pub struct FinitePolicyDump {
    pub kind: &'static str,
    pub horizon: usize,
    pub states: Vec<String>,
    pub actions: Vec<String>,
    /// `policy[i][s]`: action index at step `i` in state `s`.
    pub policy: Vec<Vec<usize>>,
    /// `values[i][s]` for `i` in `0..=horizon`.
    pub values: Vec<Vec<f64>>,
    pub initial: Vec<InitialValue>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verified: Option<bool>,
}

pub fn finite_policy(d: &FinitePolicyDump, format: Format) -> String {
    match format {
        Format::Json => json(d),
        Format::Tsv => {
            let mut out = String::new();
            for (i, row) in d.policy.iter().enumerate() {
                for (s, &a) in row.iter().enumerate() {
                    out.push_str(&format!("{}\t{}\t{}\t{}\n", i, s, a, num(d.values[i][s])));
                }
            }
            out
        }
        Format::Text => {
            let mut out = format!("Optimal non-stationary policy, horizon {}.\n", d.horizon);
            for (i, row) in d.policy.iter().enumerate() {
                out.push_str(&format!("step {}:\n", i));
                for (s, &a) in row.iter().enumerate() {
                    out.push_str(&format!("  {} -> {} (value {})\n", d.states[s], d.actions[a], num(d.values[i][s])));
                }
            }
            for v in &d.initial {
                out.push_str(&format!("value from {} at step 0: {}\n", v.label, num(v.value)));
            }
            if let Some(ok) = d.verified {
                out.push_str(&format!("program-side optimum {}.\n", if ok { "agrees" } else { "DISAGREES" }));
            }
            out
        }
    }
}

#[derive(Serialize)]
pub struct StationaryPolicyDump {
    pub kind: &'static str,
    pub gamma: f64,
    pub epsilon: f64,
    pub iterations: usize,
    pub states: Vec<String>,
    pub actions: Vec<String>,
    pub policy: Vec<usize>,
    pub values: Vec<f64>,
    pub initial: Vec<InitialValue>,
}

pub fn stationary_policy(d: &StationaryPolicyDump, format: Format) -> String {
    match format {
        Format::Json => json(d),
        Format::Tsv => d.policy.iter().enumerate().map(|(s, a)| format!("{}\t{}\t{}\n", s, a, num(d.values[s]))).collect(),
        Format::Text => {
            let mut out = format!("Stationary policy, discount {}, {} sweeps.\n", num(d.gamma), d.iterations);
            for (s, &a) in d.policy.iter().enumerate() {
                out.push_str(&format!("  {} -> {} (value {})\n", d.states[s], d.actions[a], num(d.values[s])));
            }
            for v in &d.initial {
                out.push_str(&format!("value from {}: {}\n", v.label, num(v.value)));
            }
            out
        }
    }
}

#[derive(Serialize)]
pub struct EvalDump {
    pub horizon: usize,
    pub evidence: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub query: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub probability: Option<f64>,
    pub expected_utility: f64,
    pub models: usize,
}

pub fn eval(d: &EvalDump, format: Format) -> String {
    match format {
        Format::Json => json(d),
        Format::Tsv => {
            let mut out = String::new();
            if let Some(p) = d.probability {
                out.push_str(&format!("probability\t{}\n", num(p)));
            }
            out.push_str(&format!("expected_utility\t{}\n", num(d.expected_utility)));
            out
        }
        Format::Text => {
            let mut out = String::new();
            if let (Some(q), Some(p)) = (&d.query, d.probability) {
                out.push_str(&format!("P({} | {}) = {}\n", q, d.evidence, num(p)));
            }
            out.push_str(&format!("E[U | {}] = {}\n", d.evidence, num(d.expected_utility)));
            out
        }
    }
}

#[derive(Serialize)]
pub struct DecisionValue {
    pub assignment: Vec<bool>,
    pub expected_utility: f64,
}

#[derive(Serialize)]
pub struct MeuDump {
    pub decisions: Vec<String>,
    pub assignment: Vec<bool>,
    /// Decision atoms set to true by the primary maximizer.
    pub chosen: Vec<String>,
    pub expected_utility: f64,
    pub ties: Vec<Vec<bool>>,
    pub all: Vec<DecisionValue>,
}

fn bits(a: &[bool]) -> String {
    a.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

pub fn meu(d: &MeuDump, format: Format) -> String {
    match format {
        Format::Json => json(d),
        Format::Tsv => d.all.iter().map(|v| format!("{}\t{}\n", bits(&v.assignment), num(v.expected_utility))).collect(),
        Format::Text => {
            let chosen = if d.chosen.is_empty() { "nothing".to_string() } else { d.chosen.join(", ") };
            let mut out = format!("MEU decision: {}\nexpected utility: {}\n", chosen, num(d.expected_utility));
            if d.ties.len() > 1 {
                out.push_str(&format!("{} maximizing assignments in total.\n", d.ties.len()));
            }
            out.push_str(&format!("{} feasible of {} assignments over {} decision atoms.\n", d.all.len(), 1u64 << d.decisions.len(), d.decisions.len()));
            out
        }
    }
}

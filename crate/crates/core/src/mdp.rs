//! The MDP induced by a transition system, its finite- and infinite-horizon
//! solvers, and a program-side evaluator of policies used as an oracle.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;
use thiserror::Error;

use crate::engine::{self, EngineError, TOLERANCE};
use crate::lang::{ConstantKind, Formula};
use crate::transition::{check_assumptions, history_formula, policy_formula, AssumptionReport, TransitionError, TransitionSystem};
use crate::translator::{translate, CompiledDescription, GroundProgram, TranslateError};

/// Refuse exhaustive policy search beyond this many candidate policies.
pub const MAX_POLICIES: f64 = 1e6;
/// Refuse literal history enumeration beyond this many histories.
pub const MAX_HISTORIES: f64 = 1e7;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MdpError {
    #[error("assumptions violated: {}", .0.violations.iter().map(|v| format!("[{}] {}", v.assumption, v.message)).collect::<Vec<_>>().join("; "))]
    Assumptions(AssumptionReport),
    #[error("discount must lie in (0,1), got {0}")]
    BadDiscount(f64),
    #[error("tolerance must be positive, got {0}")]
    BadEpsilon(f64),
    #[error("search space of {0:e} exceeds the limit")]
    TooLarge(f64),
    #[error("index out of range: {0}")]
    Index(String),
    #[error(transparent)]
    Transition(#[from] TransitionError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Translate(#[from] TranslateError),
}

/// `M = <S, A, T, R>` with dense tensors indexed `[action][from][to]`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Mdp {
    pub states: Vec<String>,
    pub actions: Vec<String>,
    pub transitions: Vec<Vec<Vec<f64>>>,
    pub rewards: Vec<Vec<Vec<f64>>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Check {
    Enforce,
    Skip,
}

impl Mdp {
    pub fn from_transition_system(ts: &TransitionSystem) -> Self {
        let (ns, na) = (ts.states.len(), ts.actions.len());
        let mut t = vec![vec![vec![0.0; ns]; ns]; na];
        let mut r = vec![vec![vec![0.0; ns]; ns]; na];
        for e in &ts.edges {
            t[e.action][e.from][e.to] = e.probability;
            r[e.action][e.from][e.to] = e.reward;
        }
        Mdp {
            states: ts.states.iter().map(|s| s.to_string()).collect(),
            actions: ts.actions.iter().map(|a| a.action_label()).collect(),
            transitions: t,
            rewards: r,
        }
    }

    pub fn n_states(&self) -> usize {
        self.states.len()
    }

    pub fn n_actions(&self) -> usize {
        self.actions.len()
    }

    /// `(action, state)` pairs whose outgoing probabilities do not sum to one.
    pub fn non_stochastic_rows(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (a, rows) in self.transitions.iter().enumerate() {
            for (s, row) in rows.iter().enumerate() {
                if (row.iter().sum::<f64>() - 1.0).abs() > TOLERANCE {
                    out.push((a, s));
                }
            }
        }
        out
    }

    /// `sum_s' T(s,a,s') (R(s,a,s') + v(s'))`
    fn backup(&self, s: usize, a: usize, v: &[f64]) -> f64 {
        let t = &self.transitions[a][s];
        let r = &self.rewards[a][s];
        (0..self.n_states()).filter(|&x| t[x] > 0.0).map(|x| t[x] * (r[x] + v[x])).sum()
    }

    /// Best action by value with lowest-index tie-break.
    fn greedy(&self, s: usize, v: &[f64]) -> (usize, f64) {
        let mut best = (0, f64::NEG_INFINITY);
        for a in 0..self.n_actions() {
            let q = self.backup(s, a, v);
            if q > best.1 + TOLERANCE * 1e-3 {
                best = (a, q);
            }
        }
        best
    }
}

/// Builds `M(D)`; with [`Check::Enforce`] the assumptions must hold.
pub fn build_mdp(c: &CompiledDescription, check: Check) -> Result<(Mdp, TransitionSystem), MdpError> {
    let ts = TransitionSystem::build(c)?;
    if check == Check::Enforce {
        let report = check_assumptions(c, &ts)?;
        if !report.ok() {
            return Err(MdpError::Assumptions(report));
        }
    }
    Ok((Mdp::from_transition_system(&ts), ts))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NonStationaryPolicy {
    pub horizon: usize,
    /// `actions[i][s]` is the action taken in state `s` at step `i`.
    pub actions: Vec<Vec<usize>>,
    /// `values[i][s]` for `i` in `0..=horizon`; the last row is zero.
    pub values: Vec<Vec<f64>>,
}

impl NonStationaryPolicy {
    pub fn action(&self, s: usize, i: usize) -> usize {
        self.actions[i][s]
    }

    /// A policy from a table, with values left at zero.
    pub fn from_table(actions: Vec<Vec<usize>>, n_states: usize) -> Self {
        let horizon = actions.len();
        NonStationaryPolicy { horizon, actions, values: vec![vec![0.0; n_states]; horizon + 1] }
    }

    pub fn constant(action: usize, n_states: usize, horizon: usize) -> Self {
        Self::from_table(vec![vec![action; n_states]; horizon], n_states)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StationaryPolicy {
    pub actions: Vec<usize>,
    pub values: Vec<f64>,
    pub gamma: f64,
    pub iterations: usize,
    /// Sup-norm difference between successive value vectors.
    pub residuals: Vec<f64>,
}

fn check_index(mdp: &Mdp, states: &[usize], actions: &[usize]) -> Result<(), MdpError> {
    if states.is_empty() || actions.len() + 1 != states.len() {
        return Err(MdpError::Index(format!("history with {} states and {} actions", states.len(), actions.len())));
    }
    if let Some(s) = states.iter().find(|&&s| s >= mdp.n_states()) {
        return Err(MdpError::Index(format!("state {}", s)));
    }
    if let Some(a) = actions.iter().find(|&&a| a >= mdp.n_actions()) {
        return Err(MdpError::Index(format!("action {}", a)));
    }
    Ok(())
}

/// Total reward of `<s0, a0, s1, ..., sm>`.
pub fn history_reward(mdp: &Mdp, states: &[usize], actions: &[usize]) -> Result<f64, MdpError> {
    check_index(mdp, states, actions)?;
    Ok(actions.iter().enumerate().map(|(i, &a)| mdp.rewards[a][states[i]][states[i + 1]]).sum())
}

/// Probability of `<s0, a0, s1, ..., sm>`: product of the transition probabilities.
pub fn history_probability(mdp: &Mdp, states: &[usize], actions: &[usize]) -> Result<f64, MdpError> {
    check_index(mdp, states, actions)?;
    Ok(actions.iter().enumerate().map(|(i, &a)| mdp.transitions[a][states[i]][states[i + 1]]).product())
}

/// Expected total reward of following `pi` from `s0`, by forward dynamic
/// programming over the state distribution.
pub fn expected_total_reward(mdp: &Mdp, pi: &NonStationaryPolicy, s0: usize) -> Result<f64, MdpError> {
    if s0 >= mdp.n_states() {
        return Err(MdpError::Index(format!("state {}", s0)));
    }
    let n = mdp.n_states();
    let mut dist = vec![0.0; n];
    dist[s0] = 1.0;
    let mut total = 0.0;
    for i in 0..pi.horizon {
        let mut next = vec![0.0; n];
        for s in (0..n).filter(|&s| dist[s] > 0.0) {
            let a = pi.action(s, i);
            for x in 0..n {
                let t = mdp.transitions[a][s][x];
                if t > 0.0 {
                    next[x] += dist[s] * t;
                    total += dist[s] * t * mdp.rewards[a][s][x];
                }
            }
        }
        dist = next;
    }
    Ok(total)
}

/// The same quantity by literally enumerating every state sequence.
pub fn expected_total_reward_by_enumeration(mdp: &Mdp, pi: &NonStationaryPolicy, s0: usize) -> Result<f64, MdpError> {
    let count = (mdp.n_states() as f64).powi(pi.horizon as i32);
    if count > MAX_HISTORIES {
        return Err(MdpError::TooLarge(count));
    }
    let mut total = 0.0;
    let mut seq = vec![0usize; pi.horizon];
    loop {
        let mut states = vec![s0];
        states.extend(seq.iter().copied());
        let actions: Vec<usize> = (0..pi.horizon).map(|i| pi.action(states[i], i)).collect();
        total += history_reward(mdp, &states, &actions)? * history_probability(mdp, &states, &actions)?;
        // odometer increment
        let mut k = 0;
        loop {
            if k == seq.len() {
                return Ok(total);
            }
            seq[k] += 1;
            if seq[k] < mdp.n_states() {
                break;
            }
            seq[k] = 0;
            k += 1;
        }
    }
}

/// Backward induction over `m` steps with lowest-index tie-break.
pub fn solve_finite(mdp: &Mdp, m: usize) -> NonStationaryPolicy {
    let n = mdp.n_states();
    let mut values = vec![vec![0.0; n]; m + 1];
    let mut actions = vec![vec![0; n]; m];
    for i in (0..m).rev() {
        for s in 0..n {
            let (a, v) = mdp.greedy(s, &values[i + 1]);
            actions[i][s] = a;
            values[i][s] = v;
        }
    }
    NonStationaryPolicy { horizon: m, actions, values }
}

/// Value iteration for the discounted criterion in which the reward of the
/// `i`-th transition is weighted by `gamma^(i+1)`:
/// `V(s) = gamma * max_a sum_s' T (R + V)`.
/// Stops once the sup-norm residual drops below `eps (1 - gamma) / (2 gamma)`.
pub fn solve_infinite(mdp: &Mdp, gamma: f64, eps: f64) -> Result<StationaryPolicy, MdpError> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(MdpError::BadDiscount(gamma));
    }
    if !(eps > 0.0) {
        return Err(MdpError::BadEpsilon(eps));
    }
    let n = mdp.n_states();
    let threshold = eps * (1.0 - gamma) / (2.0 * gamma);
    let mut v = vec![0.0; n];
    let mut residuals = Vec::new();
    loop {
        let next: Vec<f64> = (0..n).map(|s| gamma * mdp.greedy(s, &v).1).collect();
        let next: Vec<f64> = next.into_iter().map(|x| if x.is_finite() { x } else { 0.0 }).collect();
        let res = v.iter().zip(&next).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        residuals.push(res);
        v = next;
        if res < threshold {
            break;
        }
    }
    let actions = (0..n).map(|s| mdp.greedy(s, &v).0).collect();
    Ok(StationaryPolicy { actions, values: v, gamma, iterations: residuals.len(), residuals })
}

/// Discounted value of a fixed stationary policy by iterating its own
/// Bellman operator to the same tolerance.
pub fn evaluate_stationary(mdp: &Mdp, actions: &[usize], gamma: f64, eps: f64) -> Result<Vec<f64>, MdpError> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(MdpError::BadDiscount(gamma));
    }
    let threshold = eps * (1.0 - gamma) / (2.0 * gamma);
    let n = mdp.n_states();
    let mut v = vec![0.0; n];
    loop {
        let next: Vec<f64> = (0..n).map(|s| gamma * mdp.backup(s, actions[s], &v)).collect();
        let res = v.iter().zip(&next).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        v = next;
        if res < threshold {
            return Ok(v);
        }
    }
}

// --------------------------------------------------------- program side

/// Stable models of the full `m`-step program conditioned on
/// `C_{pi,m} & 0:s0`, as (state sequence, probability, utility) triples,
/// merged per state sequence.
pub fn trajectories_via_lpmln(
    c: &CompiledDescription,
    ts: &TransitionSystem,
    pi: &NonStationaryPolicy,
    s0: usize,
) -> Result<Vec<(Vec<usize>, f64, f64)>, MdpError> {
    let m = pi.horizon;
    let p = translate(c, m);
    let cond = condition(ts, &p, pi, s0)?;
    let models = engine::enumerate_conditioned(&p, &cond)?;
    let index = StepIndex::new(ts, &p, m);
    let mut out: BTreeMap<Vec<usize>, (f64, f64)> = BTreeMap::new();
    for r in &models {
        let (states, _) = index.trajectory(&r.interpretation.values)?;
        let e = out.entry(states).or_insert((0.0, 0.0));
        e.0 += r.probability;
        e.1 += r.probability * r.utility;
    }
    Ok(out.into_iter().map(|(k, (p, pu))| (k, p, pu / p)).collect())
}

fn condition(ts: &TransitionSystem, p: &GroundProgram, pi: &NonStationaryPolicy, s0: usize) -> Result<Formula<crate::translator::GAtom>, MdpError> {
    let start = history_formula(ts, &[s0], &[])?;
    let c = policy_formula(ts, pi.horizon, |s, i| pi.action(s, i))?;
    Ok(p.lower(&Formula::and(vec![c, start]))?)
}

/// `E[U(C_{pi,m} & 0:s0)]` computed from the stable models of the full
/// `m`-step program.
pub fn policy_value_via_lpmln(c: &CompiledDescription, ts: &TransitionSystem, pi: &NonStationaryPolicy, s0: usize) -> Result<f64, MdpError> {
    if s0 >= ts.states.len() {
        return Err(MdpError::Index(format!("state {}", s0)));
    }
    let p = translate(c, pi.horizon);
    let cond = condition(ts, &p, pi, s0)?;
    Ok(engine::expected_utility(&p, &cond)?)
}

/// Maps the timed fluent/action variables of an `m`-step program back to
/// state and action indices.
struct StepIndex {
    fluent_vars: Vec<Vec<usize>>,
    action_vars: Vec<Vec<usize>>,
    states: HashMap<Vec<String>, usize>,
    actions: HashMap<Vec<String>, usize>,
    values: Vec<Vec<String>>,
}

impl StepIndex {
    fn new(ts: &TransitionSystem, p: &GroundProgram, m: usize) -> Self {
        let vars = |step: usize, kinds: &[ConstantKind]| {
            let mut vs: Vec<usize> = (0..p.signature.vars.len())
                .filter(|&i| {
                    let v = &p.signature.vars[i];
                    v.step == Some(step) && v.kind.is_some_and(|k| kinds.contains(&k))
                })
                .collect();
            vs.sort_by(|a, b| p.signature.vars[*a].name.cmp(&p.signature.vars[*b].name));
            vs
        };
        let fl = [ConstantKind::RegularFluent, ConstantKind::StaticFluent];
        StepIndex {
            fluent_vars: (0..=m).map(|i| vars(i, &fl)).collect(),
            action_vars: (0..m).map(|i| vars(i, &[ConstantKind::Action])).collect(),
            states: ts.states.iter().enumerate().map(|(i, s)| (s.entries.iter().map(|e| e.1.clone()).collect(), i)).collect(),
            actions: ts.actions.iter().enumerate().map(|(i, a)| (a.entries.iter().map(|e| e.1.clone()).collect(), i)).collect(),
            values: p.signature.vars.iter().map(|v| v.values.clone()).collect(),
        }
    }

    fn trajectory(&self, values: &[usize]) -> Result<(Vec<usize>, Vec<usize>), MdpError> {
        let key = |vs: &[usize]| -> Vec<String> { vs.iter().map(|&v| self.values[v][values[v]].clone()).collect() };
        let states = self
            .fluent_vars
            .iter()
            .map(|vs| self.states.get(&key(vs)).copied().ok_or_else(|| MdpError::Index("model leaves the state set".into())))
            .collect::<Result<Vec<_>, _>>()?;
        let actions = self
            .action_vars
            .iter()
            .map(|vs| self.actions.get(&key(vs)).copied().ok_or_else(|| MdpError::Index("model uses an unknown action".into())))
            .collect::<Result<Vec<_>, _>>()?;
        Ok((states, actions))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LpmlnOptimum {
    pub policy: NonStationaryPolicy,
    pub value: f64,
    /// Number of policies whose value is within tolerance of the optimum.
    pub ties: usize,
    pub policies_examined: usize,
}

/// Exhaustive search over all non-stationary policies, each evaluated as
/// `E[U(C_{pi,m} & 0:s0)]` on the stable models of the full `m`-step program.
///
/// The models satisfying `0:s0` are enumerated once; each policy then
/// selects the models that satisfy its policy formula.
pub fn optimal_policy_via_lpmln(c: &CompiledDescription, ts: &TransitionSystem, s0: usize, m: usize) -> Result<LpmlnOptimum, MdpError> {
    let (ns, na) = (ts.states.len(), ts.actions.len());
    if s0 >= ns {
        return Err(MdpError::Index(format!("state {}", s0)));
    }
    let count = (na as f64).powf((ns * m) as f64);
    if count > MAX_POLICIES {
        return Err(MdpError::TooLarge(count));
    }
    let p = translate(c, m);
    let start = p.lower(&history_formula(ts, &[s0], &[])?)?;
    let models = engine::enumerate_conditioned(&p, &start)?;

    let cells = ns * m;
    let mut digits = vec![0usize; cells];
    let mut best: Option<(Vec<usize>, f64)> = None;
    let mut values = Vec::new();
    let mut examined = 0;
    loop {
        let table: Vec<Vec<usize>> = (0..m).map(|i| digits[i * ns..(i + 1) * ns].to_vec()).collect();
        let formula = p.lower(&policy_formula(ts, m, |s, i| table[i][s])?)?;
        let (mut w, mut wu) = (0.0, 0.0);
        for r in &models {
            if r.interpretation.satisfies(&formula) {
                w += r.probability;
                wu += r.probability * r.utility;
            }
        }
        examined += 1;
        if w > 0.0 {
            let v = wu / w;
            values.push(v);
            if best.as_ref().is_none_or(|b| v > b.1 + TOLERANCE) {
                best = Some((digits.clone(), v));
            }
        }
        let mut k = cells;
        loop {
            if k == 0 {
                let (d, value) = best.ok_or_else(|| EngineError::ZeroProbability("every policy".into()))?;
                let table = (0..m).map(|i| d[i * ns..(i + 1) * ns].to_vec()).collect();
                let ties = values.iter().filter(|&&x| (x - value).abs() <= TOLERANCE).count();
                return Ok(LpmlnOptimum { policy: NonStationaryPolicy::from_table(table, ns), value, ties, policies_examined: examined });
            }
            k -= 1;
            digits[k] += 1;
            if digits[k] < na {
                break;
            }
            digits[k] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn absorbing(r: f64) -> Mdp {
        Mdp {
            states: vec!["s".into()],
            actions: vec!["none".into()],
            transitions: vec![vec![vec![1.0]]],
            rewards: vec![vec![vec![r]]],
        }
    }

    #[test]
    fn empty_history() {
        let m = absorbing(3.0);
        assert_eq!(history_reward(&m, &[0], &[]).unwrap(), 0.0);
        assert_eq!(history_probability(&m, &[0], &[]).unwrap(), 1.0);
    }

    #[test]
    fn zero_rewards_give_zero_values() {
        let m = absorbing(0.0);
        let pi = solve_finite(&m, 3);
        assert!(pi.values[0].iter().all(|&v| v == 0.0));
        let sp = solve_infinite(&m, 0.9, 1e-6).unwrap();
        assert_eq!(sp.iterations, 1);
        assert_eq!(sp.values, vec![0.0]);
    }

    #[test]
    fn absorbing_reward_geometric_series() {
        let (r, g, eps) = (2.0, 0.9, 1e-8);
        let sp = solve_infinite(&absorbing(r), g, eps).unwrap();
        assert!((sp.values[0] - g * r / (1.0 - g)).abs() < eps);
    }

    #[test]
    fn bad_discount_is_rejected() {
        assert!(matches!(solve_infinite(&absorbing(1.0), 1.0, 1e-3), Err(MdpError::BadDiscount(_))));
        assert!(matches!(solve_infinite(&absorbing(1.0), 0.5, 0.0), Err(MdpError::BadEpsilon(_))));
    }

    #[test]
    fn dp_matches_enumeration() {
        let m = Mdp {
            states: vec!["a".into(), "b".into()],
            actions: vec!["x".into(), "y".into()],
            transitions: vec![vec![vec![0.5, 0.5], vec![0.0, 1.0]], vec![vec![1.0, 0.0], vec![0.3, 0.7]]],
            rewards: vec![vec![vec![1.0, 2.0], vec![0.0, -1.0]], vec![vec![0.5, 0.0], vec![4.0, 0.0]]],
        };
        let pi = solve_finite(&m, 3);
        for s in 0..2 {
            let dp = expected_total_reward(&m, &pi, s).unwrap();
            let en = expected_total_reward_by_enumeration(&m, &pi, s).unwrap();
            assert!((dp - en).abs() < 1e-12);
            assert!((dp - pi.values[0][s]).abs() < 1e-12);
        }
    }
}

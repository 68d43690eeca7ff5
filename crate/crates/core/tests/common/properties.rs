//! Distributional properties of the `m`-step program checked against the
//! induced MDP. Each check returns a description of the first failure.

use std::collections::BTreeMap;

use pbcplus::engine::enumerate_stable_models;
use pbcplus::lang::CausalLaw;
use pbcplus::mdp::{Check, Mdp};
use pbcplus::translator::{translate, CompiledDescription};

use super::{total_choice_product, trajectory, TOL};

pub type Outcome = Result<(), String>;

pub struct Properties {
    pub model_probability: Outcome,
    pub action_sequences: Outcome,
    pub state_sequences: Outcome,
    pub stationarity: Outcome,
    pub utility_constancy: Outcome,
}

impl Properties {
    pub fn all(&self) -> [(&'static str, &Outcome); 5] {
        [
            ("model probability", &self.model_probability),
            ("action sequences", &self.action_sequences),
            ("state sequences", &self.state_sequences),
            ("stationarity", &self.stationarity),
            ("utility constancy", &self.utility_constancy),
        ]
    }
}

fn has_initial_laws(c: &CompiledDescription) -> bool {
    !c.initpfs().is_empty() || c.description.laws.iter().any(|l| matches!(l.law, CausalLaw::InitialStatic { .. }))
}

fn first_failure(mut it: impl Iterator<Item = Option<String>>) -> Outcome {
    match it.find_map(|x| x) {
        Some(msg) => Err(msg),
        None => Ok(()),
    }
}

/// Checks, on the stable models of the `m`-step program:
/// the probability of a model is its total-choice product over the number
/// of action sequences; every action sequence is equally likely; state
/// sequences given the start and actions form a distribution equal to the
/// product of transition probabilities; transitions at every step match the
/// one-step transition table; and models sharing a trajectory share utility.
///
/// Without initial-state laws every state is an equally likely start.
pub fn check(c: &CompiledDescription, m: usize) -> Properties {
    let (mdp, ts) = pbcplus::mdp::build_mdp(c, Check::Enforce).expect("assumptions hold");
    let mdp = &mdp;
    let p = translate(c, m);
    let models = enumerate_stable_models(&p).expect("consistent");
    let profiles = (c.actions().len() + 1) as f64;
    let starts = if has_initial_laws(c) { 1.0 } else { ts.states.len() as f64 };
    let sequences = profiles.powi(m as i32);

    let traj: Vec<(Vec<usize>, Vec<usize>)> = models.iter().map(|r| trajectory(&ts, &p, m, &r.interpretation.values)).collect();

    let model_probability = first_failure(models.iter().map(|r| {
        let expect = total_choice_product(c, &p, &r.interpretation.values) / (starts * sequences);
        ((r.probability - expect).abs() > TOL).then(|| format!("model probability {} expected {}", r.probability, expect))
    }));

    let mut by_actions: BTreeMap<Vec<usize>, f64> = BTreeMap::new();
    for (r, (_, a)) in models.iter().zip(&traj) {
        *by_actions.entry(a.clone()).or_default() += r.probability;
    }
    let action_sequences = if by_actions.len() as f64 != sequences {
        Err(format!("{} action sequences occur, expected {}", by_actions.len(), sequences))
    } else {
        first_failure(by_actions.iter().map(|(a, pr)| {
            ((pr - 1.0 / sequences).abs() > TOL).then(|| format!("actions {:?} have probability {}", a, pr))
        }))
    };

    // P(s1..sm | s0, actions)
    let mut joint: BTreeMap<(usize, Vec<usize>), BTreeMap<Vec<usize>, f64>> = BTreeMap::new();
    for (r, (s, a)) in models.iter().zip(&traj) {
        *joint.entry((s[0], a.clone())).or_default().entry(s.clone()).or_default() += r.probability;
    }
    let state_sequences = first_failure(joint.iter().flat_map(|((s0, a), seqs)| {
        let total: f64 = seqs.values().sum();
        let sum_check = std::iter::once(
            ((seqs.values().map(|x| x / total).sum::<f64>() - 1.0).abs() > TOL)
                .then(|| format!("state sequences from {} under {:?} do not sum to one", s0, a)),
        );
        let product = seqs.iter().map(move |(s, pr)| {
            let expect = history_product(mdp, s, a);
            let got = pr / total;
            ((got - expect).abs() > TOL).then(|| format!("sequence {:?} under {:?}: {} vs {}", s, a, got, expect))
        });
        sum_check.chain(product).collect::<Vec<_>>()
    }));

    let stationarity = first_failure((0..m).flat_map(|i| {
        let mut cond: BTreeMap<(usize, usize), BTreeMap<usize, f64>> = BTreeMap::new();
        for (r, (s, a)) in models.iter().zip(&traj) {
            *cond.entry((s[i], a[i])).or_default().entry(s[i + 1]).or_default() += r.probability;
        }
        cond.into_iter()
            .flat_map(move |((s, a), next)| {
                let total: f64 = next.values().sum();
                (0..mdp.n_states())
                    .map(|t| {
                        let got = next.get(&t).copied().unwrap_or(0.0) / total;
                        let expect = mdp.transitions[a][s][t];
                        ((got - expect).abs() > TOL).then(|| format!("step {}: T({}, {}, {}) = {} vs {}", i, s, a, t, got, expect))
                    })
                    .collect::<Vec<_>>()
            })
            .collect::<Vec<_>>()
    }));

    let mut utilities: BTreeMap<&(Vec<usize>, Vec<usize>), f64> = BTreeMap::new();
    let utility_constancy = first_failure(models.iter().zip(&traj).map(|(r, t)| {
        let u = *utilities.entry(t).or_insert(r.utility);
        ((u - r.utility).abs() > TOL).then(|| format!("trajectory {:?} has utilities {} and {}", t, u, r.utility))
    }));

    Properties { model_probability, action_sequences, state_sequences, stationarity, utility_constancy }
}

fn history_product(mdp: &Mdp, states: &[usize], actions: &[usize]) -> f64 {
    actions.iter().enumerate().map(|(i, &a)| mdp.transitions[a][states[i]][states[i + 1]]).product()
}

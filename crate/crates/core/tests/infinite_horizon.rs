//! Discounted value iteration on random and hand-built MDPs.

use pbcplus::mdp::{evaluate_stationary, solve_infinite, Mdp, MdpError};
use proptest::prelude::*;

fn random_mdp() -> impl Strategy<Value = Mdp> {
    (1usize..5, 1usize..4).prop_flat_map(|(ns, na)| {
        let row = prop::collection::vec(0.01..1.0f64, ns).prop_map(|r| {
            let s: f64 = r.iter().sum();
            r.into_iter().map(|x| x / s).collect::<Vec<_>>()
        });
        let t = prop::collection::vec(prop::collection::vec(row, ns), na);
        let r = prop::collection::vec(prop::collection::vec(prop::collection::vec(-5.0..5.0f64, ns), ns), na);
        (t, r).prop_map(move |(transitions, rewards)| Mdp {
            states: (0..ns).map(|i| format!("s{}", i)).collect(),
            actions: (0..na).map(|i| format!("a{}", i)).collect(),
            transitions,
            rewards,
        })
    })
}

fn absorbing(r: f64) -> Mdp {
    Mdp { states: vec!["s".into()], actions: vec!["none".into()], transitions: vec![vec![vec![1.0]]], rewards: vec![vec![vec![r]]] }
}

#[test]
fn geometric_series() {
    for (gamma, r) in [(0.5, 1.0), (0.9, 2.0), (0.99, -3.0)] {
        let eps = 1e-6;
        let sp = solve_infinite(&absorbing(r), gamma, eps).unwrap();
        assert!((sp.values[0] - gamma * r / (1.0 - gamma)).abs() < eps);
    }
}

#[test]
fn zero_rewards_converge_in_one_sweep() {
    let sp = solve_infinite(&absorbing(0.0), 0.9, 1e-6).unwrap();
    assert_eq!(sp.iterations, 1);
    assert_eq!(sp.values, vec![0.0]);
    assert_eq!(sp.actions, vec![0]);
}

#[test]
fn bad_parameters() {
    assert!(matches!(solve_infinite(&absorbing(1.0), 1.0, 1e-6), Err(MdpError::BadDiscount(_))));
    assert!(matches!(solve_infinite(&absorbing(1.0), 0.0, 1e-6), Err(MdpError::BadDiscount(_))));
    assert!(matches!(solve_infinite(&absorbing(1.0), 0.5, 0.0), Err(MdpError::BadEpsilon(_))));
}

proptest! {
    #[test]
    fn residuals_contract(mdp in random_mdp(), gamma in 0.1..0.95f64) {
        let sp = solve_infinite(&mdp, gamma, 1e-8).unwrap();
        for w in sp.residuals.windows(2) {
            prop_assert!(w[1] <= gamma * w[0] + 1e-12, "{:?}", sp.residuals);
        }
    }

    #[test]
    fn greedy_policy_is_near_optimal(mdp in random_mdp(), gamma in 0.1..0.95f64) {
        let eps = 1e-6;
        let sp = solve_infinite(&mdp, gamma, eps).unwrap();
        let v = evaluate_stationary(&mdp, &sp.actions, gamma, eps * 1e-3).unwrap();
        for s in 0..mdp.n_states() {
            prop_assert!((v[s] - sp.values[s]).abs() < eps);
        }
        // no single-state deviation improves on the greedy policy by more than eps
        for s in 0..mdp.n_states() {
            for a in 0..mdp.n_actions() {
                let q: f64 = (0..mdp.n_states())
                    .map(|t| mdp.transitions[a][s][t] * (mdp.rewards[a][s][t] + v[t]))
                    .sum::<f64>() * gamma;
                prop_assert!(q <= v[s] + eps);
            }
        }
    }
}

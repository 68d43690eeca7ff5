//! The blocks-world domain at one to three blocks.

mod common;

use common::*;
use pbcplus::mdp::{build_mdp, solve_finite, Check};
use pbcplus::parser::parse_formula;
use pbcplus::transition::{check_assumptions, is_row_stochastic, TransitionSystem};

#[test]
fn state_and_action_counts() {
    for (n, states, actions) in [(1, 2, 4), (2, 8, 9), (3, 44, 16)] {
        let c = blocks(n);
        let ts = TransitionSystem::build(&c).unwrap();
        assert_eq!((ts.states.len(), ts.actions.len()), (states, actions), "{} blocks", n);
        assert!(is_row_stochastic(&ts));
    }
}

#[test]
fn assumptions_hold_up_to_two_blocks() {
    for n in 1..=2 {
        let c = blocks(n);
        let ts = TransitionSystem::build(&c).unwrap();
        let r = check_assumptions(&c, &ts).unwrap();
        assert!(r.ok(), "{:?}", r);
    }
}

#[test]
fn every_move_costs_one() {
    let c = blocks(2);
    let (mdp, ts) = build_mdp(&c, Check::Enforce).unwrap();
    let d = &c.description;
    let start = ts.find_state(&parse_formula("In(B1) = R1 & In(B2) = R1 & ~OnTopOf(B1, B2) & ~OnTopOf(B2, B1)", d).unwrap());
    assert_eq!(start.len(), 1);
    let s = start[0];
    let mv = ts.find_action("MoveTo(B1,R1)").unwrap();
    for t in 0..ts.states.len() {
        if mdp.transitions[mv][s][t] > 0.0 {
            assert!(close(mdp.rewards[mv][s][t], -1.0));
        }
    }
}

#[test]
fn goal_reward() {
    let c = blocks(1);
    let (mdp, ts) = build_mdp(&c, Check::Enforce).unwrap();
    let d = &c.description;
    let away = ts.find_state(&parse_formula("In(B1) = R1", d).unwrap())[0];
    let home = ts.find_state(&parse_formula("In(B1) = R2", d).unwrap())[0];
    let mv = ts.find_action("MoveTo(B1,R2)").unwrap();
    assert!(close(mdp.transitions[mv][away][home], 0.8));
    assert!(close(mdp.rewards[mv][away][home], 9.0));
    assert!(close(mdp.rewards[mv][away][away], -1.0));
    // once the goal holds, moving is pointless
    let pi = solve_finite(&mdp, 3);
    assert_eq!(pi.action(home, 0), ts.find_action("none").unwrap());
    assert_eq!(pi.action(away, 0), mv);
}

#[test]
fn stacked_blocks_move_together() {
    let c = blocks(2);
    let (mdp, ts) = build_mdp(&c, Check::Enforce).unwrap();
    let d = &c.description;
    let s = ts.find_state(&parse_formula("OnTopOf(B1, B2) & In(B2) = R1", d).unwrap())[0];
    let mv = ts.find_action("MoveTo(B2,R2)").unwrap();
    let t = ts.find_state(&parse_formula("OnTopOf(B1, B2) & In(B2) = R2", d).unwrap())[0];
    assert!(close(mdp.transitions[mv][s][t], 0.8));
    let t2 = ts.find_state(&parse_formula("In(B1) = R2", d).unwrap());
    assert!(t2.contains(&t));
}

#[test]
fn three_blocks_builds_quickly() {
    let start = std::time::Instant::now();
    let c = blocks(3);
    let (mdp, _) = build_mdp(&c, Check::Enforce).unwrap();
    assert_eq!((mdp.n_states(), mdp.n_actions()), (44, 16));
    assert!(mdp.non_stochastic_rows().is_empty());
    assert!(start.elapsed().as_secs() < 60);
}

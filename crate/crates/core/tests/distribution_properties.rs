//! Distributional properties of multi-step programs.

mod common;

use common::properties::check;
use common::*;

fn assert_all(c: &pbcplus::translator::CompiledDescription, m: usize) {
    let props = check(c, m);
    for (name, outcome) in props.all() {
        assert!(outcome.is_ok(), "m = {}, {}: {:?}", m, name, outcome);
    }
}

#[test]
fn simple_domain_up_to_two_steps() {
    let c = simple();
    for m in 0..=2 {
        assert_all(&c, m);
    }
}

#[test]
fn one_block_up_to_two_steps() {
    let c = blocks(1);
    for m in 0..=2 {
        assert_all(&c, m);
    }
}

#[test]
fn two_blocks_one_step() {
    assert_all(&blocks(2), 1);
}

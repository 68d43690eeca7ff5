//! Compiler and exact solver for probabilistic action descriptions with
//! utility laws.
//!
//! Pipeline: [`parser`] text to [`lang::ActionDescription`];
//! [`translator::compile`] validates and grounds it; [`translator::translate`]
//! emits a weighted program; [`engine`] enumerates its stable models;
//! [`transition`] extracts the transition system; [`mdp`] builds and solves
//! the induced MDP. [`dtlpmln`] adds decision atoms and MEU search.

pub mod dtlpmln;
pub mod engine;
pub mod lang;
pub mod mdp;
pub mod parser;
pub mod transition;
pub mod translator;

use thiserror::Error;

/// Any failure on the way from source text to a compiled description.
#[derive(Debug, Error)]
pub enum LoadError {
    #[error("parse error at {0}")]
    Parse(#[from] parser::ParseError),
    #[error(transparent)]
    Compile(#[from] translator::CompileError),
}

/// Parses, validates and grounds a description.
pub fn load(text: &str) -> Result<translator::CompiledDescription, LoadError> {
    let d = parser::parse_description(text)?;
    Ok(translator::compile(&d)?)
}

/// Bundled example domains.
pub mod domains {
    pub const SIMPLE: &str = include_str!("../domains/simple.pbcp");
    pub const BLOCKS1: &str = include_str!("../domains/blocks1.pbcp");
    pub const BLOCKS2: &str = include_str!("../domains/blocks2.pbcp");
    pub const BLOCKS3: &str = include_str!("../domains/blocks3.pbcp");

    /// Blocks world source for `n` blocks (1 to 3).
    pub fn blocks(n: usize) -> Option<&'static str> {
        match n {
            1 => Some(BLOCKS1),
            2 => Some(BLOCKS2),
            3 => Some(BLOCKS3),
            _ => None,
        }
    }
}

use std::fmt;
use std::process::ExitCode;

use pbcplus::dtlpmln::{DecisionError, MarketingError};
use pbcplus::engine::EngineError;
use pbcplus::mdp::MdpError;
use pbcplus::parser::ParseError;
use pbcplus::transition::TransitionError;
use pbcplus::translator::{CompileError, TranslateError};
use pbcplus::LoadError;

/// Failure class; each maps to a distinct exit code.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Io,
    Usage,
    Parse,
    Validation,
    Assumption,
    Infeasible,
    Resource,
}

impl Kind {
    pub fn code(self) -> u8 {
        match self {
            Kind::Io | Kind::Usage | Kind::Parse => 1,
            Kind::Validation => 2,
            Kind::Assumption => 3,
            Kind::Infeasible => 4,
            Kind::Resource => 5,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Kind::Io => "io",
            Kind::Usage => "usage",
            Kind::Parse => "parse",
            Kind::Validation => "validation",
            Kind::Assumption => "assumption",
            Kind::Infeasible => "infeasible",
            Kind::Resource => "resource",
        }
    }
}

#[derive(Debug)]
pub struct CliError {
    pub kind: Kind,
    pub message: String,
}

impl CliError {
    pub fn new(kind: Kind, message: impl Into<String>) -> Self {
        CliError { kind, message: message.into() }
    }

    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(self.kind.code())
    }
}

/// Single line: `error[kind]: message`.
impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let one_line = self.message.replace('\n', " ");
        write!(f, "error[{}]: {}", self.kind.name(), one_line)
    }
}

impl From<ParseError> for CliError {
    fn from(e: ParseError) -> Self {
        CliError::new(Kind::Parse, e.to_string())
    }
}

impl From<LoadError> for CliError {
    fn from(e: LoadError) -> Self {
        match e {
            LoadError::Parse(p) => p.into(),
            LoadError::Compile(c) => c.into(),
        }
    }
}

impl From<CompileError> for CliError {
    fn from(e: CompileError) -> Self {
        CliError::new(Kind::Validation, e.to_string())
    }
}

impl From<TranslateError> for CliError {
    fn from(e: TranslateError) -> Self {
        CliError::new(Kind::Validation, e.to_string())
    }
}

impl From<EngineError> for CliError {
    fn from(e: EngineError) -> Self {
        let kind = match e {
            EngineError::NoStableModel | EngineError::ZeroProbability(_) => Kind::Infeasible,
            EngineError::DomainTooLarge(_) => Kind::Resource,
        };
        CliError::new(kind, e.to_string())
    }
}

impl From<TransitionError> for CliError {
    fn from(e: TransitionError) -> Self {
        match e {
            TransitionError::Engine(e) => e.into(),
            TransitionError::Successor(_) => CliError::new(Kind::Assumption, e.to_string()),
            TransitionError::NoStates | TransitionError::Impossible(_) => CliError::new(Kind::Infeasible, e.to_string()),
            TransitionError::StateIndex(_) | TransitionError::ActionIndex(_) => CliError::new(Kind::Usage, e.to_string()),
        }
    }
}

impl From<MdpError> for CliError {
    fn from(e: MdpError) -> Self {
        match e {
            MdpError::Assumptions(_) => CliError::new(Kind::Assumption, e.to_string()),
            MdpError::BadDiscount(_) | MdpError::BadEpsilon(_) | MdpError::Index(_) => CliError::new(Kind::Usage, e.to_string()),
            MdpError::TooLarge(_) => CliError::new(Kind::Resource, e.to_string()),
            MdpError::Transition(t) => t.into(),
            MdpError::Engine(x) => x.into(),
            MdpError::Translate(t) => t.into(),
        }
    }
}

impl From<DecisionError> for CliError {
    fn from(e: DecisionError) -> Self {
        match e {
            DecisionError::BadDecisionAtom(_) | DecisionError::WrongArity { .. } => CliError::new(Kind::Validation, e.to_string()),
            DecisionError::TooManyDecisions(_) => CliError::new(Kind::Resource, e.to_string()),
            DecisionError::Infeasible => CliError::new(Kind::Infeasible, e.to_string()),
            DecisionError::Engine(x) => x.into(),
        }
    }
}

impl From<MarketingError> for CliError {
    fn from(e: MarketingError) -> Self {
        CliError::new(Kind::Validation, e.to_string())
    }
}

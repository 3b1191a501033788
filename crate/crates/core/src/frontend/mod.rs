//! Surface language front end.
//!
//! `parse` → `desugar` (simple, complete pattern matches) → `infer`
//! (types of the polymorphic program) → `instantiate` (first-order,
//! monomorphic core) → `core::typecheck`.

pub mod core;
pub mod desugar;
pub mod infer;
pub mod instantiate;
pub mod lexer;
pub mod parser;
pub mod surface_eval;
pub mod syntax;

use std::fmt;

use thiserror::Error;

pub use self::core::Program;
pub use desugar::DProgram;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum FrontendError {
    #[error("{pos}: syntax error: {msg}")]
    Syntax { pos: Pos, msg: String },
    #[error("{pos}: duplicate definition of `{name}`")]
    Duplicate { pos: Pos, name: String },
    #[error("1:1: no main")]
    NoMain,
    #[error("{pos}: incomplete pattern match: constructor `{ctor}` is not covered")]
    Incomplete { pos: Pos, ctor: String },
    #[error("{pos}: overlapping pattern: this alternative can never match")]
    Redundant { pos: Pos },
    #[error("{pos}: {msg}")]
    Scope { pos: Pos, msg: String },
    #[error("{pos}: type error: {msg}")]
    Type { pos: Pos, msg: String },
    #[error("{pos}: instantiation error: {msg}")]
    Instantiation { pos: Pos, msg: String },
}

impl FrontendError {
    pub fn syntax(pos: Pos, msg: impl Into<String>) -> Self {
        FrontendError::Syntax {
            pos,
            msg: msg.into(),
        }
    }

    pub fn scope(pos: Pos, msg: impl Into<String>) -> Self {
        FrontendError::Scope {
            pos,
            msg: msg.into(),
        }
    }

    pub fn ty(pos: Pos, msg: impl Into<String>) -> Self {
        FrontendError::Type {
            pos,
            msg: msg.into(),
        }
    }

    pub fn inst(pos: Pos, msg: impl Into<String>) -> Self {
        FrontendError::Instantiation {
            pos,
            msg: msg.into(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct FrontendOptions {
    /// Maximum number of specializations of one polymorphic function (and of
    /// one polymorphic data type) before instantiation gives up.
    pub max_specializations: usize,
}

impl Default for FrontendOptions {
    fn default() -> Self {
        FrontendOptions {
            max_specializations: 100,
        }
    }
}

/// Resolves a type written in source syntax, synonyms included, to the
/// name of its monomorphic instance.
pub fn type_name(module: &syntax::Module, src: &str) -> Result<String, FrontendError> {
    let t = parser::parse_type(src)?;
    let t = desugar::expand_in_module(module, &t)?;
    Ok(infer::Ty::from_type_expr(&t).to_string())
}

pub fn parse(src: &str) -> Result<syntax::Module, FrontendError> {
    parser::parse_module(src)
}

/// Runs the whole front end on program text.
pub fn compile(src: &str, options: &FrontendOptions) -> Result<Program, FrontendError> {
    compile_module(&parse(src)?, options)
}

pub fn compile_module(
    module: &syntax::Module,
    options: &FrontendOptions,
) -> Result<Program, FrontendError> {
    let desugared = desugar::desugar(module)?;
    let typed = infer::infer(&desugared)?;
    let program = instantiate::instantiate(&desugared, &typed, options)?;
    core::typecheck(&program)?;
    Ok(program)
}

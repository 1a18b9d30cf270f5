//! The `.kvs` scenario language: parser, serializer and semantic model.

mod ast;
mod parser;
mod semantic;
mod serialize;

pub use ast::{CheckDirective, CheckOptions, Declaration, Expectation, LieForm, Scenario};
pub use parser::{parse_syntax, KEYWORDS};
pub use semantic::{Model, ObjectKind, SemanticError};
pub use serialize::serialize;

pub use crate::symexpr::ParseError;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum DslError {
    #[error("parse error: {0}")]
    Parse(#[from] ParseError),
    #[error("semantic error: {0}")]
    Semantic(#[from] SemanticError),
}

/// Parses a scenario and resolves its declarations; check directives are
/// validated against the check registry.
pub fn parse_scenario(text: &str) -> Result<Scenario, DslError> {
    Ok(load_scenario(text)?.0)
}

pub fn load_scenario(text: &str) -> Result<(Scenario, Model), DslError> {
    let sc = parse_syntax(text)?;
    let model = resolve(&sc)?;
    Ok((sc, model))
}

/// Semantic analysis of an already parsed scenario.
pub fn resolve(sc: &Scenario) -> Result<Model, SemanticError> {
    let model = Model::build(sc)?;
    let registry = crate::checks::Registry::standard();
    for (i, c) in sc.checks.iter().enumerate() {
        registry
            .validate(c, &model)
            .map_err(|msg| SemanticError::new(sc.check_position(i), format!("check {}: {msg}", c.display_name())))?;
    }
    Ok(model)
}

//! Allocator descriptions: `Type { TypeExpr = depth, ..., default = depth }`.
//!
//! The leading type names the unknown. Each entry bounds one recursive
//! type, written in source syntax (synonyms allowed). A bare type name
//! without braces asks for a complete allocator.

use thiserror::Error;

use crate::domain::Bounds;
use crate::frontend::core::{Program, TypeId};
use crate::frontend::syntax::Module;
use crate::frontend::{type_name, FrontendError};

#[derive(Debug, Error)]
pub enum AllocSpecError {
    #[error("allocator spec: {0}")]
    Syntax(String),
    #[error("allocator spec: in type `{text}`: {source}")]
    Type {
        text: String,
        #[source]
        source: FrontendError,
    },
    #[error("allocator spec: type `{0}` does not occur in the program")]
    UnknownType(String),
    #[error("allocator spec: type `{0}` is bounded twice")]
    Duplicate(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AllocSpec {
    pub root: String,
    pub bounds: Vec<(String, usize)>,
    pub default: Option<usize>,
    /// Whether the braces were present.
    pub bounded: bool,
}

impl AllocSpec {
    pub fn parse(text: &str) -> Result<AllocSpec, AllocSpecError> {
        let text = strip_comments(text);
        let text = text.trim();
        let Some(open) = text.find('{') else {
            if text.is_empty() {
                return Err(AllocSpecError::Syntax("empty description".into()));
            }
            return Ok(AllocSpec {
                root: text.to_string(),
                bounds: Vec::new(),
                default: None,
                bounded: false,
            });
        };
        let root = text[..open].trim();
        if root.is_empty() {
            return Err(AllocSpecError::Syntax("missing type before `{`".into()));
        }
        let rest = &text[open + 1..];
        let close = rest
            .rfind('}')
            .ok_or_else(|| AllocSpecError::Syntax("missing `}`".into()))?;
        if !rest[close + 1..].trim().is_empty() {
            return Err(AllocSpecError::Syntax("text after `}`".into()));
        }
        let mut spec = AllocSpec {
            root: root.to_string(),
            bounds: Vec::new(),
            default: None,
            bounded: true,
        };
        for entry in rest[..close].split(',') {
            let entry = entry.trim();
            if entry.is_empty() {
                continue;
            }
            let (lhs, rhs) = entry.rsplit_once('=').ok_or_else(|| {
                AllocSpecError::Syntax(format!("expected `Type = depth` in `{entry}`"))
            })?;
            let (lhs, rhs) = (lhs.trim(), rhs.trim());
            let depth: usize = rhs
                .parse()
                .map_err(|_| AllocSpecError::Syntax(format!("`{rhs}` is not a depth")))?;
            if lhs == "default" {
                if spec.default.replace(depth).is_some() {
                    return Err(AllocSpecError::Duplicate("default".into()));
                }
            } else if lhs.is_empty() {
                return Err(AllocSpecError::Syntax(format!("missing type in `{entry}`")));
            } else {
                spec.bounds.push((lhs.to_string(), depth));
            }
        }
        Ok(spec)
    }

    /// Resolves type names against the compiled program.
    pub fn resolve(
        &self,
        module: &Module,
        prog: &Program,
    ) -> Result<(TypeId, Option<Bounds>), AllocSpecError> {
        let root = resolve_type(module, prog, &self.root)?;
        if !self.bounded {
            return Ok((root, None));
        }
        let mut bounds = Bounds {
            default: self.default,
            ..Bounds::default()
        };
        for (text, d) in &self.bounds {
            let ty = resolve_type(module, prog, text)?;
            if bounds.per_type.insert(ty, *d).is_some() {
                return Err(AllocSpecError::Duplicate(prog.types[ty].name.clone()));
            }
        }
        Ok((root, Some(bounds)))
    }
}

fn resolve_type(module: &Module, prog: &Program, text: &str) -> Result<TypeId, AllocSpecError> {
    let name = type_name(module, text).map_err(|source| AllocSpecError::Type {
        text: text.to_string(),
        source,
    })?;
    prog.type_id(&name).ok_or(AllocSpecError::UnknownType(name))
}

fn strip_comments(text: &str) -> String {
    text.lines()
        .map(|l| l.split_once("--").map_or(l, |(a, _)| a))
        .collect::<Vec<_>>()
        .join("\n")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::{compile_module, parse, FrontendOptions};

    #[test]
    fn parses_entries() {
        let s = AllocSpec::parse("Loop { List Step = 3, Term = 2, default = 1 } -- note").unwrap();
        assert_eq!(s.root, "Loop");
        assert_eq!(
            s.bounds,
            vec![("List Step".to_string(), 3), ("Term".to_string(), 2)]
        );
        assert_eq!(s.default, Some(1));
        assert!(s.bounded);
        assert!(!AllocSpec::parse("Bool").unwrap().bounded);
        assert!(AllocSpec::parse("N { N = x }").is_err());
        assert!(AllocSpec::parse("N { N = 1 ").is_err());
        assert!(AllocSpec::parse("{ N = 1 }").is_err());
    }

    #[test]
    fn resolves_synonyms_and_instances() {
        let m = parse(
            "data List a = Nil | Cons a (List a)\n\
             data N = Z | S N\n\
             type Ns = List N\n\
             len :: Ns -> N\n\
             len xs = case xs of { Nil -> Z; Cons x r -> S (len r) }\n\
             main :: N -> Ns -> Bool\n\
             main k u = case len u of { Z -> False; S n -> True }\n",
        )
        .unwrap();
        let p = compile_module(&m, &FrontendOptions::default()).unwrap();
        let (root, bounds) = AllocSpec::parse("Ns { List N = 2, N = 1 }")
            .unwrap()
            .resolve(&m, &p)
            .unwrap();
        assert_eq!(p.types[root].name, "List N");
        let bounds = bounds.unwrap();
        assert_eq!(bounds.per_type[&root], 2);
        assert_eq!(bounds.per_type[&p.type_id("N").unwrap()], 1);
        let e = AllocSpec::parse("Ns { List Bool = 2 }")
            .unwrap()
            .resolve(&m, &p);
        assert!(matches!(e, Err(AllocSpecError::UnknownType(_))));
    }
}

use thiserror::Error;
use veriodd::OddSpec;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SelectError {
    #[error("unknown module `{0}`")]
    UnknownModule(String),
    #[error("no module selected and the ODD has no unique top-level module; pass --modules")]
    NoTopLevel,
}

/// The requested modules, or the unique top-level module when none are
/// requested.
pub fn select_modules(odd: &OddSpec, requested: &[String]) -> Result<Vec<String>, SelectError> {
    if requested.is_empty() {
        return odd.top_level().map(|m| vec![m.to_string()]).ok_or(SelectError::NoTopLevel);
    }
    for name in requested {
        if odd.module(name).is_none() {
            return Err(SelectError::UnknownModule(name.clone()));
        }
    }
    Ok(requested.to_vec())
}

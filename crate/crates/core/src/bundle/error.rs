use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{file}:{line}: {message}")]
pub struct ParseError {
    pub file: String,
    pub line: u32,
    pub message: String,
}

#[derive(Debug, Error)]
pub enum BundleError {
    #[error("bundle {0} has no manifest.xml or manifest.json")]
    MissingManifest(PathBuf),
    #[error("bundle {0} has no code.model.json")]
    MissingCodeModel(PathBuf),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Link(#[from] LinkError),
    #[error("reading {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// References that name classes, methods, or layouts absent from the bundle.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unresolved references: {}", unresolved.join(", "))]
pub struct LinkError {
    pub unresolved: Vec<String>,
}

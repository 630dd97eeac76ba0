//! Static storyboard generation for decompiled Android apps.
//!
//! The pipeline runs in stages over an immutable [`AppBundle`]:
//! transition-graph extraction ([`atg`]), static layout synthesis
//! ([`synth`]), wireframe rendering ([`render`]), obfuscated-name inference
//! ([`infer`]), and storyboard assembly ([`storyboard`]).

pub mod atg;
pub mod bundle;
pub mod infer;
pub mod pipeline;
pub mod render;
pub mod storyboard;
pub mod synth;
mod warning;

pub use bundle::{load_bundle, AppBundle, LayoutKind};
pub use pipeline::{run_pipeline, PipelineOptions, PipelineOutput};
pub use warning::{Warning, WarningKind};

#[cfg(test)]
#[path = "../tests/support/ted_oracle.rs"]
mod ted_oracle;

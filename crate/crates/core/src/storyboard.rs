//! The storyboard document: one card per activity with its rendered page,
//! layout code, class code, and intra-class call edges, plus the activity
//! transitions.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::atg::TransitionGraph;
use crate::bundle::{render_class_listing, AppBundle, ClassModel, Statement};
use crate::infer::{InferenceResult, MatchedBy};
use crate::warning::{Warning, WarningKind};

pub const STORYBOARD_FILE: &str = "storyboard.json";
/// Page shown for nodes that could not be rendered.
pub const MISSING_PAGE: &str = "pages/_missing.svg";

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FragmentPage {
    pub class_name: String,
    pub page: String,
    pub layout_code: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ActivityCard {
    pub class_name: String,
    pub display_name: String,
    /// Path of the page SVG, relative to the storyboard directory.
    pub page: String,
    pub layout_code: String,
    pub activity_code: String,
    /// `[caller, callee]` method pairs within the class.
    pub method_hierarchy: Vec<(String, String)>,
    /// Fragments hosted by this activity, each with its own page.
    pub fragments: Vec<FragmentPage>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Storyboard {
    pub app_id: String,
    pub main_activity: Option<String>,
    pub nodes: Vec<ActivityCard>,
    pub edges: Vec<(String, String)>,
    pub warnings: Vec<Warning>,
}

impl Storyboard {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("storyboard serializes");
        s.push('\n');
        s
    }
}

/// A rendered page and the synthesized layout it came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PageArtifact {
    pub svg: String,
    pub layout_xml: String,
}

/// The storyboard plus every file it references, keyed by relative path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StoryboardBundle {
    pub storyboard: Storyboard,
    pub files: BTreeMap<String, Vec<u8>>,
}

/// File stem for a class name: characters outside `[A-Za-z0-9._$-]`
/// become `_`.
pub fn file_stem(class_name: &str) -> String {
    class_name
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || matches!(c, '.' | '_' | '$' | '-') {
                c
            } else {
                '_'
            }
        })
        .collect()
}

/// `[caller, callee]` for each call from one method of `cls` to another,
/// in statement order, duplicates dropped.
pub fn emit_method_hierarchy(cls: &ClassModel) -> Vec<(String, String)> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for m in &cls.methods {
        for s in &m.statements {
            if let Statement::Call { class, method } = s {
                if *class == cls.name && seen.insert((m.name.clone(), method.clone())) {
                    out.push((m.name.clone(), method.clone()));
                }
            }
        }
    }
    out
}

fn missing_page_svg() -> String {
    let spec = crate::render::RenderSpec::default();
    crate::render::render_svg("", &[], &spec).svg
}

/// Build the storyboard from upstream results. Nodes without a page get
/// [`MISSING_PAGE`] and a warning.
pub fn assemble_storyboard(
    bundle: &AppBundle,
    graph: &TransitionGraph,
    pages: &BTreeMap<String, PageArtifact>,
    inferences: &BTreeMap<String, InferenceResult>,
) -> StoryboardBundle {
    let mut files: BTreeMap<String, Vec<u8>> = BTreeMap::new();
    let mut warnings = Vec::new();
    let mut page_for = |name: &str, files: &mut BTreeMap<String, Vec<u8>>| -> (String, String) {
        match pages.get(name) {
            Some(p) => {
                let path = format!("pages/{}.svg", file_stem(name));
                files.insert(path.clone(), p.svg.clone().into_bytes());
                files.insert(
                    format!("layouts/{}.xml", file_stem(name)),
                    p.layout_xml.clone().into_bytes(),
                );
                (path, p.layout_xml.clone())
            }
            None => {
                warnings.push(Warning::new(
                    WarningKind::MissingPage,
                    name,
                    "no rendered page; using a placeholder",
                ));
                files.insert(MISSING_PAGE.to_string(), missing_page_svg().into_bytes());
                (MISSING_PAGE.to_string(), String::new())
            }
        }
    };

    let mut nodes = Vec::new();
    for name in graph.activities() {
        let (page, layout_code) = page_for(name, &mut files);
        let class = bundle.class(name);
        let activity_code = class.map(render_class_listing).unwrap_or_default();
        files.insert(
            format!("code/{}.txt", file_stem(name)),
            activity_code.clone().into_bytes(),
        );
        let display_name = match inferences.get(name) {
            Some(r) if matches!(r.matched_by, MatchedBy::Keyword | MatchedBy::TopFrequency) => {
                r.inferred_name.clone()
            }
            _ => name.to_string(),
        };
        let mut fragments = Vec::new();
        let hosted: BTreeSet<&str> = graph
            .fragment_relations
            .iter()
            .filter(|r| r.host.as_deref() == Some(name))
            .map(|r| r.fragment.as_str())
            .collect();
        for f in hosted {
            let (page, layout_code) = page_for(f, &mut files);
            fragments.push(FragmentPage {
                class_name: f.to_string(),
                page,
                layout_code,
            });
        }
        nodes.push(ActivityCard {
            class_name: name.to_string(),
            display_name,
            page,
            layout_code,
            activity_code,
            method_hierarchy: class.map(emit_method_hierarchy).unwrap_or_default(),
            fragments,
        });
    }
    let main = &bundle.manifest.main_activity;
    let storyboard = Storyboard {
        app_id: bundle.app_id.clone(),
        main_activity: graph.nodes.contains_key(main).then(|| main.clone()),
        nodes,
        edges: graph.pairs().into_iter().collect(),
        warnings,
    };
    files.insert(
        STORYBOARD_FILE.to_string(),
        storyboard.to_json().into_bytes(),
    );
    StoryboardBundle { storyboard, files }
}

fn copy_dir(from: &Path, to: &Path) -> io::Result<()> {
    fs::create_dir_all(to)?;
    let mut entries: Vec<_> = fs::read_dir(from)?.collect::<Result<_, _>>()?;
    entries.sort_by_key(|e| e.file_name());
    for e in entries {
        let target = to.join(e.file_name());
        if e.file_type()?.is_dir() {
            copy_dir(&e.path(), &target)?;
        } else {
            fs::copy(e.path(), target)?;
        }
    }
    Ok(())
}

/// Write every file of the bundle under `out_dir`, then copy static viewer
/// assets when given. Returns the path of `storyboard.json`.
pub fn emit_storyboard_bundle(
    sb: &StoryboardBundle,
    out_dir: &Path,
    viewer_assets: Option<&Path>,
) -> io::Result<PathBuf> {
    if let Some(v) = viewer_assets {
        copy_dir(v, out_dir)?;
    }
    for (rel, bytes) in &sb.files {
        let path = out_dir.join(rel);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        fs::write(&path, bytes)?;
    }
    Ok(out_dir.join(STORYBOARD_FILE))
}

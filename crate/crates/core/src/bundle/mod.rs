//! Loading a decompiled-app bundle from disk.
//!
//! A bundle directory holds:
//!
//! ```text
//! manifest.xml | manifest.json
//! res/layout/*.xml
//! res/values/{strings,colors,dimens}.xml   (each optional)
//! code.model.json
//! ```

mod callgraph;
mod code;
mod error;
mod layout;
mod manifest;
mod resources;

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

pub use callgraph::{build_call_graph, CallGraph};
pub use code::{
    describe_statement, render_class_listing, simple_class_name, AdapterSource, AdapterViewType,
    ClassKind, ClassModel, CodeModel, CommitVia, IntentTarget, MethodModel, MethodRef, StartApi,
    Statement, ValueRef, ROOT_VAR,
};
pub use error::{BundleError, LinkError, ParseError};
pub(crate) use layout::escape_xml;
pub use layout::{
    is_leaf_widget, is_view_group, serialize_xml, simple_tag, AttributeSet, ComponentNode,
    LayoutDocument, NodePath,
};
pub use manifest::ManifestInfo;
pub use resources::{
    format_dp, normalize_color, parse_dp, ResourceError, ResourceRef, ResourceTable,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LayoutKind {
    Static,
    Dynamic,
    Hybrid,
}

/// Hybrid if any statement inflates a layout; dynamic if components are
/// created or added in code without inflation; static otherwise.
pub fn classify_statements<'a>(stmts: impl IntoIterator<Item = &'a Statement>) -> LayoutKind {
    let mut dynamic = false;
    for s in stmts {
        match s {
            Statement::Inflate { .. } => return LayoutKind::Hybrid,
            Statement::AddView { .. } | Statement::NewComponent { .. } => dynamic = true,
            _ => {}
        }
    }
    if dynamic {
        LayoutKind::Dynamic
    } else {
        LayoutKind::Static
    }
}

/// App-wide layout type over every decompiled class.
pub fn detect_layout_type(bundle: &AppBundle) -> LayoutKind {
    classify_statements(
        bundle
            .code
            .classes
            .iter()
            .filter(|c| !c.undecompiled)
            .flat_map(ClassModel::statements),
    )
}

/// Layout type of a single class, from its own methods.
pub fn class_layout_kind(class: &ClassModel) -> LayoutKind {
    classify_statements(class.statements())
}

/// One app, fully parsed and linked. Immutable after loading.
#[derive(Debug, Clone, PartialEq)]
pub struct AppBundle {
    pub app_id: String,
    pub manifest: ManifestInfo,
    pub layouts: BTreeMap<String, LayoutDocument>,
    pub resources: ResourceTable,
    pub code: CodeModel,
    pub call_graph: CallGraph,
}

impl AppBundle {
    /// Link already-parsed parts with a `code.model.json` text.
    pub fn assemble(
        app_id: impl Into<String>,
        mut manifest: ManifestInfo,
        layouts: BTreeMap<String, LayoutDocument>,
        resources: ResourceTable,
        code_json: &str,
    ) -> Result<Self, BundleError> {
        let raw: code::RawCodeModel = serde_json::from_str(code_json).map_err(|e| ParseError {
            file: "code.model.json".into(),
            line: e.line() as u32,
            message: e.to_string(),
        })?;
        let mut unresolved = BTreeSet::new();

        let raw_names: BTreeSet<&str> = raw.classes.iter().map(|c| c.name.as_str()).collect();
        let mut declared = Vec::new();
        for name in &manifest.declared_activities {
            match manifest.resolve_name(name, |n| raw_names.contains(n)) {
                Some(resolved) => declared.push(resolved),
                None => {
                    unresolved.insert(format!("activity {name}"));
                }
            }
        }
        if !manifest.main_activity.is_empty() {
            if let Some(m) =
                manifest.resolve_name(&manifest.main_activity, |n| raw_names.contains(n))
            {
                manifest.main_activity = m;
            }
        }
        manifest.declared_activities = declared;
        let declared_set: BTreeSet<String> = manifest.declared_activities.iter().cloned().collect();

        let classes = code::build_classes(raw.classes, &declared_set);
        let code = CodeModel::new(classes).map_err(|message| ParseError {
            file: "code.model.json".into(),
            line: 0,
            message,
        })?;

        for class in &code.classes {
            if let Some(outer) = &class.outer_class {
                if !code.contains(outer) {
                    unresolved.insert(format!("class {outer}"));
                }
            }
            if let Some(layout) = &class.layout {
                if !layouts.contains_key(layout) {
                    unresolved.insert(format!("layout {layout}"));
                }
            }
            for stmt in class.statements() {
                let (classes, methods, layout_refs) = code::statement_refs(stmt);
                for c in classes {
                    if !code.contains(c) {
                        unresolved.insert(format!("class {c}"));
                    }
                }
                for m in methods {
                    let ok = code
                        .class(&m.class)
                        .is_some_and(|c| c.undecompiled || c.method(&m.method).is_some());
                    if !ok {
                        unresolved.insert(format!("method {m}"));
                    }
                }
                for l in layout_refs {
                    if !layouts.contains_key(l) {
                        unresolved.insert(format!("layout {l}"));
                    }
                }
            }
        }
        if !unresolved.is_empty() {
            return Err(LinkError {
                unresolved: unresolved.into_iter().collect(),
            }
            .into());
        }
        let call_graph = build_call_graph(&code)?;
        Ok(AppBundle {
            app_id: app_id.into(),
            manifest,
            layouts,
            resources,
            code,
            call_graph,
        })
    }

    pub fn class(&self, name: &str) -> Option<&ClassModel> {
        self.code.class(name)
    }

    pub fn layout(&self, name: &str) -> Option<&LayoutDocument> {
        self.layouts.get(name)
    }
}

fn read(path: &Path) -> Result<String, BundleError> {
    fs::read_to_string(path).map_err(|source| BundleError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Parse a bundle directory. Loading the same directory twice yields
/// equal models.
pub fn load_bundle(dir: &Path) -> Result<AppBundle, BundleError> {
    let xml = dir.join("manifest.xml");
    let json = dir.join("manifest.json");
    let manifest = if xml.is_file() {
        ManifestInfo::parse_xml("manifest.xml", &read(&xml)?)?
    } else if json.is_file() {
        ManifestInfo::parse_json("manifest.json", &read(&json)?)?
    } else {
        return Err(BundleError::MissingManifest(dir.to_path_buf()));
    };

    let mut layouts = BTreeMap::new();
    let layout_dir = dir.join("res").join("layout");
    if layout_dir.is_dir() {
        let mut files: Vec<_> = fs::read_dir(&layout_dir)
            .map_err(|source| BundleError::Io {
                path: layout_dir.clone(),
                source,
            })?
            .filter_map(Result::ok)
            .map(|e| e.path())
            .filter(|p| p.extension().is_some_and(|e| e == "xml"))
            .collect();
        files.sort();
        for path in files {
            let stem = path
                .file_stem()
                .and_then(|s| s.to_str())
                .unwrap_or_default()
                .to_string();
            let label = format!("res/layout/{stem}.xml");
            let doc = LayoutDocument::parse(&stem, &label, &read(&path)?)?;
            layouts.insert(stem, doc);
        }
    }

    let mut resources = ResourceTable::default();
    for file in ["strings.xml", "colors.xml", "dimens.xml"] {
        let path = dir.join("res").join("values").join(file);
        if path.is_file() {
            resources.parse_into(&format!("res/values/{file}"), &read(&path)?)?;
        }
    }

    let code_path = dir.join("code.model.json");
    if !code_path.is_file() {
        return Err(BundleError::MissingCodeModel(dir.to_path_buf()));
    }
    let code_json = read(&code_path)?;

    let app_id = manifest.package.clone().unwrap_or_else(|| {
        dir.file_name()
            .and_then(|n| n.to_str())
            .unwrap_or("app")
            .to_string()
    });
    AppBundle::assemble(app_id, manifest, layouts, resources, &code_json)
}

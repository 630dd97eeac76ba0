use serde::{Deserialize, Serialize};

use super::error::ParseError;

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ManifestInfo {
    /// Application package, if the manifest names one.
    pub package: Option<String>,
    /// Activity class names as written in the manifest, with any
    /// package-relative leading dot removed.
    pub declared_activities: Vec<String>,
    /// The launcher activity; empty when no activities are declared.
    pub main_activity: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ManifestJson {
    #[serde(default)]
    package: Option<String>,
    #[serde(default)]
    activities: Vec<String>,
    #[serde(default)]
    main_activity: Option<String>,
}

fn strip_relative(name: &str) -> String {
    name.strip_prefix('.').unwrap_or(name).to_string()
}

impl ManifestInfo {
    pub fn parse_json(file: &str, text: &str) -> Result<Self, ParseError> {
        let raw: ManifestJson = serde_json::from_str(text).map_err(|e| ParseError {
            file: file.to_string(),
            line: e.line() as u32,
            message: e.to_string(),
        })?;
        let declared: Vec<String> = raw.activities.iter().map(|a| strip_relative(a)).collect();
        let main = match raw.main_activity {
            Some(m) => strip_relative(&m),
            None => declared.first().cloned().unwrap_or_default(),
        };
        Self::finish(file, raw.package, declared, main)
    }

    /// Read `<activity android:name>` entries; the main activity is the one
    /// with a `MAIN` action filter, else the first declared.
    pub fn parse_xml(file: &str, text: &str) -> Result<Self, ParseError> {
        let doc = roxmltree::Document::parse(text).map_err(|e| ParseError {
            file: file.to_string(),
            line: e.pos().row,
            message: e.to_string(),
        })?;
        let root = doc.root_element();
        if root.tag_name().name() != "manifest" {
            return Err(ParseError {
                file: file.to_string(),
                line: 1,
                message: "expected <manifest> root".into(),
            });
        }
        let android_name = |n: roxmltree::Node<'_, '_>| {
            n.attributes()
                .find(|a| a.name() == "name")
                .map(|a| a.value().to_string())
        };
        let mut declared = Vec::new();
        let mut main = None;
        for act in root
            .descendants()
            .filter(|n| n.has_tag_name("activity") || n.has_tag_name("activity-alias"))
        {
            let Some(name) = android_name(act) else {
                return Err(ParseError {
                    file: file.to_string(),
                    line: doc.text_pos_at(act.range().start).row,
                    message: "<activity> without android:name".into(),
                });
            };
            let name = strip_relative(&name);
            let is_main = act
                .descendants()
                .filter(|n| n.has_tag_name("action"))
                .any(|a| android_name(a).as_deref() == Some("android.intent.action.MAIN"));
            if is_main && main.is_none() {
                main = Some(name.clone());
            }
            declared.push(name);
        }
        let main = main
            .or_else(|| declared.first().cloned())
            .unwrap_or_default();
        let package = root.attribute("package").map(str::to_string);
        Self::finish(file, package, declared, main)
    }

    fn finish(
        file: &str,
        package: Option<String>,
        declared: Vec<String>,
        main: String,
    ) -> Result<Self, ParseError> {
        if !declared.is_empty() && !declared.contains(&main) {
            return Err(ParseError {
                file: file.to_string(),
                line: 0,
                message: format!("main activity `{main}` is not declared"),
            });
        }
        Ok(ManifestInfo {
            package,
            declared_activities: declared,
            main_activity: main,
        })
    }

    /// Map a manifest name onto a code-model class name: exact match, or
    /// with the package prefix removed.
    pub(crate) fn resolve_name(
        &self,
        name: &str,
        exists: impl Fn(&str) -> bool,
    ) -> Option<String> {
        if exists(name) {
            return Some(name.to_string());
        }
        let pkg = self.package.as_deref()?;
        let stripped = name.strip_prefix(pkg)?.strip_prefix('.')?;
        exists(stripped).then(|| stripped.to_string())
    }
}

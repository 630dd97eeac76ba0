use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use super::error::ParseError;

/// String, color, and dimension values from `res/values/`.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ResourceTable {
    pub strings: BTreeMap<String, String>,
    /// Normalized to `#RRGGBB`.
    pub colors: BTreeMap<String, String>,
    /// Values in dp.
    pub dimens: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ResourceError {
    #[error("`{0}` is not a resource reference")]
    NotAReference(String),
    #[error("unsupported resource type in `{0}`")]
    UnsupportedType(String),
    #[error("undeclared resource `{0}`")]
    Undeclared(String),
}

/// A parsed `@type/name` reference.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ResourceRef<'a> {
    pub kind: &'a str,
    pub name: &'a str,
}

impl<'a> ResourceRef<'a> {
    pub fn parse(value: &'a str) -> Option<Self> {
        let rest = value.strip_prefix('@')?;
        let (kind, name) = rest.split_once('/')?;
        let kind = kind.strip_prefix('+').unwrap_or(kind);
        if kind.is_empty() || name.is_empty() {
            return None;
        }
        Some(ResourceRef { kind, name })
    }
}

impl ResourceTable {
    pub fn string(&self, name: &str) -> Result<&str, ResourceError> {
        self.strings
            .get(name)
            .map(String::as_str)
            .ok_or_else(|| ResourceError::Undeclared(format!("@string/{name}")))
    }

    pub fn color(&self, name: &str) -> Result<&str, ResourceError> {
        self.colors
            .get(name)
            .map(String::as_str)
            .ok_or_else(|| ResourceError::Undeclared(format!("@color/{name}")))
    }

    pub fn dimen(&self, name: &str) -> Result<f64, ResourceError> {
        self.dimens
            .get(name)
            .copied()
            .ok_or_else(|| ResourceError::Undeclared(format!("@dimen/{name}")))
    }

    /// Resolve a `@string/`, `@color/`, or `@dimen/` reference to its value
    /// text. Dimensions come back with a `dp` suffix.
    pub fn resolve(&self, reference: &str) -> Result<String, ResourceError> {
        let r = ResourceRef::parse(reference)
            .ok_or_else(|| ResourceError::NotAReference(reference.to_string()))?;
        match r.kind {
            "string" => self.string(r.name).map(str::to_string),
            "color" => self.color(r.name).map(str::to_string),
            "dimen" => self.dimen(r.name).map(format_dp),
            _ => Err(ResourceError::UnsupportedType(reference.to_string())),
        }
    }

    /// Merge one `<resources>` file into the table.
    pub fn parse_into(&mut self, file: &str, text: &str) -> Result<(), ParseError> {
        let doc = roxmltree::Document::parse(text).map_err(|e| ParseError {
            file: file.to_string(),
            line: e.pos().row,
            message: e.to_string(),
        })?;
        let err = |node: roxmltree::Node<'_, '_>, message: String| ParseError {
            file: file.to_string(),
            line: doc.text_pos_at(node.range().start).row,
            message,
        };
        let root = doc.root_element();
        if root.tag_name().name() != "resources" {
            return Err(err(root, "expected <resources> root".to_string()));
        }
        for el in root.children().filter(|n| n.is_element()) {
            let kind = el.tag_name().name();
            let name = el
                .attribute("name")
                .ok_or_else(|| err(el, format!("<{kind}> without a name")))?
                .to_string();
            let value = el.text().unwrap_or("").trim().to_string();
            let duplicate = match kind {
                "string" => self.strings.insert(name.clone(), value).is_some(),
                "color" => {
                    let color = normalize_color(&value)
                        .ok_or_else(|| err(el, format!("bad color value `{value}`")))?;
                    self.colors.insert(name.clone(), color).is_some()
                }
                "dimen" => {
                    let dp = parse_dp(&value)
                        .ok_or_else(|| err(el, format!("bad dimension value `{value}`")))?;
                    self.dimens.insert(name.clone(), dp).is_some()
                }
                _ => continue,
            };
            if duplicate {
                return Err(err(el, format!("duplicate {kind} resource `{name}`")));
            }
        }
        Ok(())
    }
}

pub fn format_dp(dp: f64) -> String {
    format!("{dp}dp")
}

/// Parse `16dp`, `16dip`, `16sp`, or a bare number as dp.
pub fn parse_dp(value: &str) -> Option<f64> {
    let v = value.trim();
    let number = v
        .strip_suffix("dip")
        .or_else(|| v.strip_suffix("dp"))
        .or_else(|| v.strip_suffix("sp"))
        .unwrap_or(v);
    let dp: f64 = number.trim().parse().ok()?;
    (dp.is_finite() && dp >= 0.0).then_some(dp)
}

/// `#RGB`, `#RRGGBB`, and `#AARRGGBB` to upper-case `#RRGGBB` (alpha dropped).
pub fn normalize_color(value: &str) -> Option<String> {
    let hex = value.trim().strip_prefix('#')?;
    if !hex.chars().all(|c| c.is_ascii_hexdigit()) {
        return None;
    }
    let rgb = match hex.len() {
        3 => hex.chars().flat_map(|c| [c, c]).collect::<String>(),
        6 => hex.to_string(),
        8 => hex[2..].to_string(),
        _ => return None,
    };
    Some(format!("#{}", rgb.to_ascii_uppercase()))
}

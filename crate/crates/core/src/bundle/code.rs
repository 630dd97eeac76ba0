//! The code model: classes, methods, and the statement forms the
//! extractor and synthesizer consume. Read from `code.model.json`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

/// Framework base classes whose subclasses are activities.
const ACTIVITY_BASES: &[&str] = &[
    "Activity",
    "AppCompatActivity",
    "FragmentActivity",
    "ComponentActivity",
    "ListActivity",
    "PreferenceActivity",
    "TabActivity",
    "ExpandableListActivity",
];

const FRAGMENT_BASES: &[&str] = &[
    "Fragment",
    "DialogFragment",
    "ListFragment",
    "PreferenceFragment",
    "PreferenceFragmentCompat",
    "BottomSheetDialogFragment",
];

/// The variable name bound to the page's parent layout in `onCreate`.
pub const ROOT_VAR: &str = "root";

/// Last `.`/`$`-separated segment of a class name.
pub fn simple_class_name(name: &str) -> &str {
    name.rsplit(['.', '$']).next().unwrap_or(name)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassKind {
    Activity,
    Fragment,
    Inner,
    Plain,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StartApi {
    #[default]
    #[serde(rename = "startActivity")]
    StartActivity,
    #[serde(rename = "startActivityForResult")]
    StartActivityForResult,
    #[serde(rename = "startActivityIfNeeded")]
    StartActivityIfNeeded,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CommitVia {
    #[default]
    Replace,
    Add,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum AdapterViewType {
    ListView,
    GridView,
    RecyclerView,
    ViewPager,
}

impl AdapterViewType {
    pub fn as_str(self) -> &'static str {
        match self {
            AdapterViewType::ListView => "ListView",
            AdapterViewType::GridView => "GridView",
            AdapterViewType::RecyclerView => "RecyclerView",
            AdapterViewType::ViewPager => "ViewPager",
        }
    }
}

impl fmt::Display for AdapterViewType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IntentTarget {
    Class(String),
    Var(String),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct MethodRef {
    pub class: String,
    pub method: String,
}

impl MethodRef {
    pub fn new(class: impl Into<String>, method: impl Into<String>) -> Self {
        MethodRef {
            class: class.into(),
            method: method.into(),
        }
    }
}

impl fmt::Display for MethodRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.class, self.method)
    }
}

/// An attribute or return value: a literal, a resource reference
/// (`@string/name`), or the value returned by another method.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ValueRef {
    Literal(String),
    Resource(String),
    Call(MethodRef),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AdapterSource {
    Layout(String),
    Fragment(String),
    Var(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Statement {
    StartActivity {
        target: IntentTarget,
        #[serde(default)]
        api: StartApi,
    },
    NewIntent {
        var: String,
        target: String,
    },
    FragmentCommit {
        fragment: String,
        #[serde(default)]
        via: CommitVia,
    },
    SetAdapter {
        view: String,
        view_type: AdapterViewType,
        source: AdapterSource,
    },
    /// `new XAdapter(ctx, R.layout.row, data)`: binds `var` to a row layout.
    NewAdapter {
        var: String,
        layout: String,
    },
    AddView {
        parent: String,
        child: String,
    },
    Inflate {
        layout: String,
        var: String,
    },
    NewComponent {
        var: String,
        tag: String,
    },
    SetAttr {
        var: String,
        attr: String,
        value: ValueRef,
    },
    Call {
        class: String,
        method: String,
    },
    ReturnValue {
        value: ValueRef,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MethodModel {
    pub name: String,
    #[serde(default)]
    pub statements: Vec<Statement>,
}

/// Wire form of a class entry; `kind` is derived at load time.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct RawClass {
    pub name: String,
    #[serde(default)]
    pub superclass: Option<String>,
    #[serde(default)]
    pub outer_class: Option<String>,
    #[serde(default)]
    pub layout: Option<String>,
    #[serde(default)]
    pub undecompiled: bool,
    #[serde(default)]
    pub source: Option<String>,
    #[serde(default)]
    pub methods: Vec<MethodModel>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct RawCodeModel {
    #[serde(default)]
    pub classes: Vec<RawClass>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassModel {
    pub name: String,
    pub kind: ClassKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub superclass: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub outer_class: Option<String>,
    /// Layout set as the content view, if declared statically.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub layout: Option<String>,
    pub undecompiled: bool,
    /// Decompiled source text, when the front end supplied it.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
    pub methods: Vec<MethodModel>,
}

impl ClassModel {
    pub fn method(&self, name: &str) -> Option<&MethodModel> {
        self.methods.iter().find(|m| m.name == name)
    }

    pub fn simple_name(&self) -> &str {
        simple_class_name(&self.name)
    }

    pub fn statements(&self) -> impl Iterator<Item = &Statement> {
        self.methods.iter().flat_map(|m| m.statements.iter())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct CodeModel {
    pub classes: Vec<ClassModel>,
    #[serde(skip)]
    index: BTreeMap<String, usize>,
}

impl CodeModel {
    pub fn new(classes: Vec<ClassModel>) -> Result<Self, String> {
        let mut index = BTreeMap::new();
        for (i, c) in classes.iter().enumerate() {
            if index.insert(c.name.clone(), i).is_some() {
                return Err(format!("duplicate class `{}`", c.name));
            }
        }
        Ok(CodeModel { classes, index })
    }

    pub fn class(&self, name: &str) -> Option<&ClassModel> {
        self.index.get(name).map(|&i| &self.classes[i])
    }

    pub fn contains(&self, name: &str) -> bool {
        self.index.contains_key(name)
    }

    pub fn kind_of(&self, name: &str) -> Option<ClassKind> {
        self.class(name).map(|c| c.kind)
    }

    /// Outer classes from the immediate one outwards. Stops on a cycle or
    /// an unknown name.
    pub fn outer_chain(&self, name: &str) -> Vec<&ClassModel> {
        let mut out = Vec::new();
        let mut seen = BTreeSet::new();
        let mut cur = self.class(name).and_then(|c| c.outer_class.as_deref());
        while let Some(n) = cur {
            if !seen.insert(n) {
                break;
            }
            let Some(c) = self.class(n) else { break };
            out.push(c);
            cur = c.outer_class.as_deref();
        }
        out
    }

    pub fn method(&self, m: &MethodRef) -> Option<&MethodModel> {
        self.class(&m.class).and_then(|c| c.method(&m.method))
    }
}

/// Derive class kinds: activity if declared in the manifest or a subclass
/// of an activity base; fragment if a subclass of a fragment base; inner
/// if nested; plain otherwise.
pub(crate) fn derive_kinds(raw: &[RawClass], declared: &BTreeSet<String>) -> Vec<ClassKind> {
    let by_name: BTreeMap<&str, &RawClass> = raw.iter().map(|c| (c.name.as_str(), c)).collect();
    let extends = |start: &RawClass, bases: &[&str]| -> bool {
        let mut seen = BTreeSet::new();
        let mut cur = start.superclass.as_deref();
        while let Some(sup) = cur {
            if !seen.insert(sup) {
                return false;
            }
            match by_name.get(sup) {
                Some(c) => cur = c.superclass.as_deref(),
                None => return bases.contains(&simple_class_name(sup)),
            }
        }
        false
    };
    raw.iter()
        .map(|c| {
            if declared.contains(&c.name) || extends(c, ACTIVITY_BASES) {
                ClassKind::Activity
            } else if extends(c, FRAGMENT_BASES) {
                ClassKind::Fragment
            } else if c.outer_class.is_some() {
                ClassKind::Inner
            } else {
                ClassKind::Plain
            }
        })
        .collect()
}

/// Kinds are settled in rounds because a class extending a
/// manifest-declared activity is an activity too.
pub(crate) fn build_classes(raw: Vec<RawClass>, declared: &BTreeSet<String>) -> Vec<ClassModel> {
    let mut kinds = derive_kinds(&raw, declared);
    // A class extending a declared activity is an activity as well.
    loop {
        let activity_names: BTreeSet<&str> = raw
            .iter()
            .zip(&kinds)
            .filter(|(_, k)| **k == ClassKind::Activity)
            .map(|(c, _)| c.name.as_str())
            .collect();
        let mut changed = false;
        let updated: Vec<ClassKind> = raw
            .iter()
            .zip(&kinds)
            .map(|(c, &k)| {
                if k != ClassKind::Activity
                    && c.superclass
                        .as_deref()
                        .is_some_and(|s| activity_names.contains(s))
                {
                    changed = true;
                    ClassKind::Activity
                } else {
                    k
                }
            })
            .collect();
        kinds = updated;
        if !changed {
            break;
        }
    }
    raw.into_iter()
        .zip(kinds)
        .map(|(c, kind)| ClassModel {
            name: c.name,
            kind,
            superclass: c.superclass,
            outer_class: c.outer_class,
            layout: c.layout,
            undecompiled: c.undecompiled,
            source: c.source,
            methods: c.methods,
        })
        .collect()
}

/// Every class, method, and layout a statement names.
pub(crate) fn statement_refs(stmt: &Statement) -> (Vec<&str>, Vec<MethodRef>, Vec<&str>) {
    let mut classes = Vec::new();
    let mut methods = Vec::new();
    let mut layouts = Vec::new();
    let value = |v: &ValueRef, methods: &mut Vec<MethodRef>| {
        if let ValueRef::Call(m) = v {
            methods.push(m.clone());
        }
    };
    match stmt {
        Statement::StartActivity {
            target: IntentTarget::Class(c),
            ..
        } => classes.push(c.as_str()),
        Statement::NewIntent { target, .. } => classes.push(target.as_str()),
        Statement::FragmentCommit { fragment, .. } => classes.push(fragment.as_str()),
        Statement::SetAdapter { source, .. } => match source {
            AdapterSource::Layout(l) => layouts.push(l.as_str()),
            AdapterSource::Fragment(f) => classes.push(f.as_str()),
            AdapterSource::Var(_) => {}
        },
        Statement::NewAdapter { layout, .. } | Statement::Inflate { layout, .. } => {
            layouts.push(layout.as_str())
        }
        Statement::SetAttr { value: v, .. } | Statement::ReturnValue { value: v } => {
            value(v, &mut methods)
        }
        Statement::Call { class, method } => methods.push(MethodRef::new(class, method)),
        _ => {}
    }
    (classes, methods, layouts)
}

/// One-line pseudo-Java rendering of a statement, used for code excerpts
/// when no decompiled source is available.
pub fn describe_statement(stmt: &Statement) -> String {
    fn value(v: &ValueRef) -> String {
        match v {
            ValueRef::Literal(s) => format!("{s:?}"),
            ValueRef::Resource(r) => r.clone(),
            ValueRef::Call(m) => format!("{}.{}()", m.class, m.method),
        }
    }
    match stmt {
        Statement::StartActivity { target, api } => {
            let api = match api {
                StartApi::StartActivity => "startActivity",
                StartApi::StartActivityForResult => "startActivityForResult",
                StartApi::StartActivityIfNeeded => "startActivityIfNeeded",
            };
            match target {
                IntentTarget::Class(c) => format!("{api}(new Intent(this, {c}.class));"),
                IntentTarget::Var(v) => format!("{api}({v});"),
            }
        }
        Statement::NewIntent { var, target } => {
            format!("Intent {var} = new Intent(this, {target}.class);")
        }
        Statement::FragmentCommit { fragment, via } => {
            let via = match via {
                CommitVia::Replace => "replace",
                CommitVia::Add => "add",
            };
            format!("getFragmentManager().beginTransaction().{via}(R.id.content, new {fragment}()).commit();")
        }
        Statement::SetAdapter {
            view,
            view_type,
            source,
        } => {
            let src = match source {
                AdapterSource::Layout(l) => format!("new ArrayAdapter(this, R.layout.{l}, data)"),
                AdapterSource::Fragment(f) => format!("getSupportFragmentManager(), new {f}()"),
                AdapterSource::Var(v) => v.clone(),
            };
            format!("(({view_type}) {view}).setAdapter({src});")
        }
        Statement::NewAdapter { var, layout } => {
            format!("ArrayAdapter {var} = new ArrayAdapter(this, R.layout.{layout}, data);")
        }
        Statement::AddView { parent, child } => format!("{parent}.addView({child});"),
        Statement::Inflate { layout, var } => {
            format!("View {var} = getLayoutInflater().inflate(R.layout.{layout}, null);")
        }
        Statement::NewComponent { var, tag } => format!("{tag} {var} = new {tag}(this);"),
        Statement::SetAttr {
            var,
            attr,
            value: v,
        } => {
            format!("{var}.set{}({});", capitalize(attr), value(v))
        }
        Statement::Call { class, method } => format!("{class}.{method}();"),
        Statement::ReturnValue { value: v } => format!("return {};", value(v)),
    }
}

fn capitalize(s: &str) -> String {
    let mut parts = s.split('_').filter(|p| !p.is_empty());
    let mut out = String::new();
    if let Some(first) = parts.next() {
        out.extend(first.chars().next().map(|c| c.to_ascii_uppercase()));
        out.push_str(&first[first.chars().next().map_or(0, char::len_utf8)..]);
    }
    for p in parts {
        out.extend(p.chars().next().map(|c| c.to_ascii_uppercase()));
        out.push_str(&p[p.chars().next().map_or(0, char::len_utf8)..]);
    }
    out
}

/// A readable listing of a class body built from its statements.
pub fn render_class_listing(class: &ClassModel) -> String {
    if let Some(src) = &class.source {
        return src.clone();
    }
    let mut out = String::new();
    let ext = class
        .superclass
        .as_deref()
        .map(|s| format!(" extends {s}"))
        .unwrap_or_default();
    out.push_str(&format!("class {}{ext} {{\n", class.name));
    if class.undecompiled {
        out.push_str("    // body not decompiled\n");
    }
    for m in &class.methods {
        out.push_str(&format!("    void {}() {{\n", m.name));
        for s in &m.statements {
            out.push_str("        ");
            out.push_str(&describe_statement(s));
            out.push('\n');
        }
        out.push_str("    }\n");
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn raw(name: &str, sup: Option<&str>, outer: Option<&str>) -> RawClass {
        RawClass {
            name: name.into(),
            superclass: sup.map(Into::into),
            outer_class: outer.map(Into::into),
            layout: None,
            undecompiled: false,
            source: None,
            methods: vec![],
        }
    }

    #[test]
    fn kinds_follow_declaration_and_superclass() {
        let declared: BTreeSet<String> = ["Main".to_string()].into();
        let classes = build_classes(
            vec![
                raw("Main", None, None),
                raw("Base", Some("android.app.Activity"), None),
                raw("Child", Some("Base"), None),
                raw("Sub", Some("Main"), None),
                raw("Frag", Some("androidx.fragment.app.Fragment"), None),
                raw("Main$1", Some("java.lang.Object"), Some("Main")),
                raw("Util", None, None),
            ],
            &declared,
        );
        let kinds: Vec<_> = classes.iter().map(|c| c.kind).collect();
        assert_eq!(
            kinds,
            vec![
                ClassKind::Activity,
                ClassKind::Activity,
                ClassKind::Activity,
                ClassKind::Activity,
                ClassKind::Fragment,
                ClassKind::Inner,
                ClassKind::Plain
            ]
        );
    }

    #[test]
    fn statements_deserialize_from_wire_form() {
        let json = r#"[
            {"op":"new_intent","var":"i","target":"PartList"},
            {"op":"start_activity","target":{"var":"i"},"api":"startActivityForResult"},
            {"op":"set_attr","var":"tv","attr":"text","value":{"call":{"class":"A","method":"label"}}},
            {"op":"set_adapter","view":"lv","view_type":"ListView","source":{"layout":"list_view"}}
        ]"#;
        let stmts: Vec<Statement> = serde_json::from_str(json).unwrap();
        assert_eq!(
            stmts[1],
            Statement::StartActivity {
                target: IntentTarget::Var("i".into()),
                api: StartApi::StartActivityForResult
            }
        );
        assert!(matches!(
            &stmts[2],
            Statement::SetAttr { value: ValueRef::Call(m), .. } if m.method == "label"
        ));
    }

    #[test]
    fn outer_chain_stops_on_cycles() {
        let classes = build_classes(
            vec![raw("A$B", None, Some("A")), raw("A", None, Some("A$B"))],
            &BTreeSet::new(),
        );
        let code = CodeModel::new(classes).unwrap();
        let chain: Vec<_> = code
            .outer_chain("A$B")
            .iter()
            .map(|c| c.name.clone())
            .collect();
        assert_eq!(chain, vec!["A".to_string(), "A$B".to_string()]);
    }

    #[test]
    fn simple_names() {
        assert_eq!(
            simple_class_name("org.demo.SearchPanel$SearchByPartName"),
            "SearchByPartName"
        );
        assert_eq!(simple_class_name("a"), "a");
    }

    #[test]
    fn listing_falls_back_to_statements() {
        let c = ClassModel {
            name: "A".into(),
            kind: ClassKind::Activity,
            superclass: Some("Activity".into()),
            outer_class: None,
            layout: None,
            undecompiled: false,
            source: None,
            methods: vec![MethodModel {
                name: "onCreate".into(),
                statements: vec![Statement::SetAttr {
                    var: "tv".into(),
                    attr: "text".into(),
                    value: ValueRef::Literal("Password".into()),
                }],
            }],
        };
        let text = render_class_listing(&c);
        assert!(text.contains("tv.setText(\"Password\");"), "{text}");
    }
}

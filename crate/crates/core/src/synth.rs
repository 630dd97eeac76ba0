//! Static layout synthesis: one fully static component tree per activity
//! or fragment, with dynamically built views folded in and adapter views
//! filled with dummy rows.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;
use thiserror::Error;

use crate::atg::{AdapterBinding, TransitionGraph};
use crate::bundle::{
    class_layout_kind, serialize_xml, AppBundle, ClassKind, ComponentNode, LayoutKind, MethodModel,
    MethodRef, NodePath, ResourceError, Statement, ValueRef, ROOT_VAR,
};
use crate::warning::{Warning, WarningKind};

/// Maximum number of method calls followed when resolving an attribute.
pub const MAX_CALL_DEPTH: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Static,
    ConvertedDynamic,
    AdapterDummy,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StaticLayoutTree {
    pub owner: String,
    pub root: ComponentNode,
    /// Origin of every node, keyed by path from the root.
    pub provenance: BTreeMap<NodePath, Provenance>,
}

impl StaticLayoutTree {
    /// A tree whose nodes are all static.
    pub fn from_static(owner: impl Into<String>, root: ComponentNode) -> Self {
        let mut provenance = BTreeMap::new();
        root.walk(&mut |p, _| {
            provenance.insert(p.clone(), Provenance::Static);
        });
        StaticLayoutTree {
            owner: owner.into(),
            root,
            provenance,
        }
    }

    pub fn provenance_of(&self, path: &NodePath) -> Provenance {
        self.provenance
            .get(path)
            .copied()
            .unwrap_or(Provenance::Static)
    }

    pub fn count(&self, kind: Provenance) -> usize {
        self.provenance.values().filter(|p| **p == kind).count()
    }

    pub fn to_xml(&self) -> String {
        serialize_xml(&self.root)
    }
}

/// Placeholder content for adapter-backed views.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DummyDataSpec {
    row_count: usize,
    text_template: String,
}

impl Default for DummyDataSpec {
    fn default() -> Self {
        DummyDataSpec {
            row_count: 5,
            text_template: "Item {i}".to_string(),
        }
    }
}

impl DummyDataSpec {
    /// `text_template` may contain `{i}`, replaced by the 1-based row number.
    pub fn new(row_count: usize, text_template: impl Into<String>) -> Result<Self, SynthError> {
        if row_count == 0 {
            return Err(SynthError::InvalidDummySpec);
        }
        Ok(DummyDataSpec {
            row_count,
            text_template: text_template.into(),
        })
    }

    pub fn row_count(&self) -> usize {
        self.row_count
    }

    pub fn row_text(&self, i: usize) -> String {
        self.text_template.replace("{i}", &i.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SynthError {
    #[error("`{0}` is not an activity or fragment of the transition graph")]
    NotAPage(String),
    #[error("`{0}` uses a static layout but declares no layout file")]
    MissingLayout(String),
    #[error("dummy row count must be at least 1")]
    InvalidDummySpec,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UnresolvedAttribute {
    #[error("call chain longer than {MAX_CALL_DEPTH} hops")]
    DepthExceeded,
    #[error("method {0} is not in the code model")]
    NoDefinition(MethodRef),
    #[error("method {0} returns no value")]
    NoReturn(MethodRef),
    #[error(transparent)]
    Resource(#[from] ResourceError),
}

/// Resolve a `set_attr` value: literals as-is, resource references through
/// the resource table, call references by following return values.
pub fn resolve_attribute(
    value: &ValueRef,
    bundle: &AppBundle,
) -> Result<String, UnresolvedAttribute> {
    let mut current = value;
    let mut hops = 0;
    loop {
        match current {
            ValueRef::Literal(s) => return Ok(s.clone()),
            ValueRef::Resource(r) => return Ok(bundle.resources.resolve(r)?),
            ValueRef::Call(m) => {
                hops += 1;
                if hops > MAX_CALL_DEPTH {
                    return Err(UnresolvedAttribute::DepthExceeded);
                }
                let method = bundle
                    .code
                    .method(m)
                    .ok_or_else(|| UnresolvedAttribute::NoDefinition(m.clone()))?;
                current = method
                    .statements
                    .iter()
                    .find_map(|s| match s {
                        Statement::ReturnValue { value } => Some(value),
                        _ => None,
                    })
                    .ok_or_else(|| UnresolvedAttribute::NoReturn(m.clone()))?;
            }
        }
    }
}

/// Where a dynamic component is attached.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InsertionParent {
    /// The page's parent layout.
    Root,
    /// Another dynamic component, identified by its defining statement.
    Component { var: String, defined_at: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DynamicComponent {
    /// Statement index that attaches the component (`add_view`, or the
    /// `inflate` itself when the inflated layout goes straight into root).
    pub statement: usize,
    /// Statement index that created the component.
    pub defined_at: usize,
    pub var: String,
    pub node: ComponentNode,
    pub parent: InsertionParent,
    /// Inflated into root: the layout's children are attached, not its root.
    pub graft_children: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DynamicComponents {
    pub components: Vec<DynamicComponent>,
    /// `set_attr` on the root variable.
    pub root_attributes: Vec<(String, String)>,
    pub warnings: Vec<Warning>,
}

enum DefKind {
    Component(String),
    Inflated(String),
}

struct Def {
    var: String,
    stmt: usize,
    kind: DefKind,
    attrs: Vec<(String, String)>,
}

/// Forward data flow over a method body: every component attached with
/// `add_view` or inflated into the page, with its final attribute values.
pub fn resolve_dynamic_components(method: &MethodModel, bundle: &AppBundle) -> DynamicComponents {
    let mut out = DynamicComponents::default();
    let mut defs: Vec<Def> = Vec::new();
    let mut current: HashMap<&str, usize> = HashMap::new();
    // (attach statement, child def, parent def or None for root)
    let mut attachments: Vec<(usize, usize, Option<usize>)> = Vec::new();
    let mut parent_of: HashMap<usize, Option<usize>> = HashMap::new();
    let mut used_as_parent: BTreeSet<usize> = BTreeSet::new();
    let subject = |i: usize| format!("{}[{i}]", method.name);

    for (i, stmt) in method.statements.iter().enumerate() {
        match stmt {
            Statement::NewComponent { var, tag } => {
                current.insert(var, defs.len());
                defs.push(Def {
                    var: var.clone(),
                    stmt: i,
                    kind: DefKind::Component(tag.clone()),
                    attrs: Vec::new(),
                });
            }
            Statement::Inflate { layout, var } => {
                current.insert(var, defs.len());
                defs.push(Def {
                    var: var.clone(),
                    stmt: i,
                    kind: DefKind::Inflated(layout.clone()),
                    attrs: Vec::new(),
                });
            }
            Statement::SetAttr { var, attr, value } => {
                let resolved = resolve_attribute(value, bundle).unwrap_or_else(|e| {
                    out.warnings.push(Warning::new(
                        WarningKind::UnresolvedAttribute,
                        subject(i),
                        format!("{var}.{attr}: {e}; using an empty placeholder"),
                    ));
                    String::new()
                });
                if var == ROOT_VAR && !current.contains_key(var.as_str()) {
                    out.root_attributes.push((attr.clone(), resolved));
                } else if let Some(&d) = current.get(var.as_str()) {
                    defs[d].attrs.push((attr.clone(), resolved));
                } else {
                    out.warnings.push(Warning::new(
                        WarningKind::UndefinedComponent,
                        subject(i),
                        format!("set_attr on undefined component `{var}`"),
                    ));
                }
            }
            Statement::AddView { parent, child } => {
                let Some(&c) = current.get(child.as_str()) else {
                    out.warnings.push(Warning::new(
                        WarningKind::UndefinedComponent,
                        subject(i),
                        format!("add_view of undefined component `{child}`"),
                    ));
                    continue;
                };
                let p = if let Some(&p) = current.get(parent.as_str()) {
                    Some(p)
                } else if parent == ROOT_VAR {
                    None
                } else {
                    out.warnings.push(Warning::new(
                        WarningKind::UndefinedComponent,
                        subject(i),
                        format!("add_view into undefined parent `{parent}`"),
                    ));
                    continue;
                };
                if parent_of.contains_key(&c) {
                    out.warnings.push(Warning::new(
                        WarningKind::UndefinedComponent,
                        subject(i),
                        format!("`{child}` already has a parent; skipped"),
                    ));
                    continue;
                }
                // Reject cycles: the child may not be an ancestor of the parent.
                let mut anc = p;
                let mut cyclic = false;
                while let Some(a) = anc {
                    if a == c {
                        cyclic = true;
                        break;
                    }
                    anc = parent_of.get(&a).copied().flatten();
                }
                if cyclic {
                    out.warnings.push(Warning::new(
                        WarningKind::UndefinedComponent,
                        subject(i),
                        format!("adding `{child}` under `{parent}` would form a cycle; skipped"),
                    ));
                    continue;
                }
                parent_of.insert(c, p);
                if let Some(p) = p {
                    used_as_parent.insert(p);
                }
                attachments.push((i, c, p));
            }
            _ => {}
        }
    }

    // Containers that hold children but are never attached themselves go
    // under root; inflated layouts never attached are inflated into root.
    let mut graft = BTreeSet::new();
    for (d, def) in defs.iter().enumerate() {
        if parent_of.contains_key(&d) {
            continue;
        }
        if used_as_parent.contains(&d) {
            out.warnings.push(Warning::new(
                WarningKind::UndefinedComponent,
                subject(def.stmt),
                format!(
                    "container `{}` is never attached; placed under root",
                    def.var
                ),
            ));
            parent_of.insert(d, None);
            attachments.push((def.stmt, d, None));
        } else if matches!(def.kind, DefKind::Inflated(_)) {
            graft.insert(d);
            attachments.push((def.stmt, d, None));
        }
    }
    attachments.sort_by_key(|&(stmt, _, _)| stmt);

    for (stmt, d, p) in attachments {
        let def = &defs[d];
        let mut node = match &def.kind {
            DefKind::Component(tag) => ComponentNode::new(tag.clone()),
            DefKind::Inflated(layout) => match bundle.layout(layout) {
                Some(doc) => doc.root.clone(),
                None => continue,
            },
        };
        for (k, v) in &def.attrs {
            node.attributes.set(k.clone(), v.clone());
        }
        out.components.push(DynamicComponent {
            statement: stmt,
            defined_at: def.stmt,
            var: def.var.clone(),
            node,
            parent: match p {
                None => InsertionParent::Root,
                Some(p) => InsertionParent::Component {
                    var: defs[p].var.clone(),
                    defined_at: defs[p].stmt,
                },
            },
            graft_children: graft.contains(&d),
        });
    }
    out
}

/// Root used when a dynamic page has no layout file.
pub fn synthetic_root() -> ComponentNode {
    ComponentNode::new("LinearLayout")
        .with_attr("layout_width", "match_parent")
        .with_attr("layout_height", "match_parent")
        .with_attr("orientation", "vertical")
}

struct ArenaNode {
    node: ComponentNode,
    extra: Vec<usize>,
    provenance: Provenance,
}

/// Attach dynamic components to `parent` and flatten to a tree.
fn assemble(
    owner: &str,
    mut parent: ComponentNode,
    dynamic: &DynamicComponents,
) -> StaticLayoutTree {
    for (k, v) in &dynamic.root_attributes {
        parent.attributes.set(k.clone(), v.clone());
    }
    let mut arena = vec![ArenaNode {
        node: parent,
        extra: Vec::new(),
        provenance: Provenance::Static,
    }];
    let mut by_def: HashMap<usize, usize> = HashMap::new();
    for c in &dynamic.components {
        if c.graft_children {
            continue;
        }
        by_def.insert(c.defined_at, arena.len());
        arena.push(ArenaNode {
            node: c.node.clone(),
            extra: Vec::new(),
            provenance: Provenance::ConvertedDynamic,
        });
    }
    for c in &dynamic.components {
        let parent_idx = match &c.parent {
            InsertionParent::Root => 0,
            InsertionParent::Component { defined_at, .. } => by_def[defined_at],
        };
        if c.graft_children {
            for child in &c.node.children {
                let idx = arena.len();
                arena.push(ArenaNode {
                    node: child.clone(),
                    extra: Vec::new(),
                    provenance: Provenance::ConvertedDynamic,
                });
                arena[parent_idx].extra.push(idx);
            }
        } else {
            let idx = by_def[&c.defined_at];
            arena[parent_idx].extra.push(idx);
        }
    }

    fn build(
        arena: &[ArenaNode],
        idx: usize,
        path: NodePath,
        prov: &mut BTreeMap<NodePath, Provenance>,
    ) -> ComponentNode {
        let a = &arena[idx];
        let mut node = a.node.clone();
        node.walk(&mut |p, _| {
            let mut full = path.0.clone();
            full.extend_from_slice(&p.0);
            prov.insert(NodePath(full), a.provenance);
        });
        let base = node.children.len();
        for (k, &child) in a.extra.iter().enumerate() {
            node.children
                .push(build(arena, child, path.child(base + k), prov));
        }
        node
    }
    let mut provenance = BTreeMap::new();
    let root = build(&arena, 0, NodePath::root(), &mut provenance);
    StaticLayoutTree {
        owner: owner.to_string(),
        root,
        provenance,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Synthesis {
    pub tree: StaticLayoutTree,
    pub warnings: Vec<Warning>,
}

/// Lifecycle methods mined for dynamic views; fragments build theirs in
/// `onCreateView`.
fn ui_method(class: &crate::bundle::ClassModel) -> Option<&MethodModel> {
    class.method("onCreate").or_else(|| {
        (class.kind == ClassKind::Fragment)
            .then(|| class.method("onCreateView"))
            .flatten()
    })
}

/// Produce the static layout tree for one activity or fragment.
pub fn synthesize_static_layout(
    owner: &str,
    bundle: &AppBundle,
    graph: &TransitionGraph,
) -> Result<Synthesis, SynthError> {
    if !graph.nodes.contains_key(owner) {
        return Err(SynthError::NotAPage(owner.to_string()));
    }
    let class = bundle
        .class(owner)
        .ok_or_else(|| SynthError::NotAPage(owner.to_string()))?;
    let file_root = class
        .layout
        .as_deref()
        .and_then(|l| bundle.layout(l))
        .map(|d| d.root.clone());
    let mut warnings = Vec::new();

    if class.undecompiled {
        warnings.push(Warning::new(
            WarningKind::EmptyPage,
            owner,
            "class not decompiled; page left blank",
        ));
        let root = file_root.unwrap_or_else(synthetic_root);
        return Ok(Synthesis {
            tree: StaticLayoutTree::from_static(owner, root),
            warnings,
        });
    }

    let kind = graph
        .layout_kind
        .get(owner)
        .copied()
        .unwrap_or_else(|| class_layout_kind(class));
    if kind == LayoutKind::Static {
        let root = file_root.ok_or_else(|| SynthError::MissingLayout(owner.to_string()))?;
        return Ok(Synthesis {
            tree: StaticLayoutTree::from_static(owner, root),
            warnings,
        });
    }

    let parent = file_root.unwrap_or_else(synthetic_root);
    let Some(method) = ui_method(class) else {
        warnings.push(Warning::new(
            WarningKind::EmptyPage,
            owner,
            "dynamic layout without onCreate; nothing to convert",
        ));
        return Ok(Synthesis {
            tree: StaticLayoutTree::from_static(owner, parent),
            warnings,
        });
    };
    let dynamic = resolve_dynamic_components(method, bundle);
    warnings.extend(dynamic.warnings.iter().cloned().map(|mut w| {
        w.subject = format!("{owner}.{}", w.subject);
        w
    }));
    Ok(Synthesis {
        tree: assemble(owner, parent, &dynamic),
        warnings,
    })
}

fn fill_dummy(node: &mut ComponentNode, text: &str) {
    let textual = matches!(
        node.simple_tag(),
        "TextView" | "Button" | "EditText" | "CheckBox" | "RadioButton" | "Switch" | "ToggleButton"
    );
    if textual || node.attributes.contains("text") {
        node.attributes.set("text", text);
    }
    for c in &mut node.children {
        fill_dummy(c, text);
    }
}

fn matches_view_type(tag: &str, view_type: &str) -> bool {
    tag == view_type || (view_type == "ViewPager" && tag == "ViewPager2")
}

/// Fill adapter-backed views of `tree` with `spec.row_count` copies of
/// their row layout. The k-th binding of a view type fills the k-th node of
/// that type in document order.
pub fn inject_adapter_views(
    mut tree: StaticLayoutTree,
    adapters: &[AdapterBinding],
    spec: &DummyDataSpec,
    bundle: &AppBundle,
) -> Synthesis {
    let mut warnings = Vec::new();
    let mut used: BTreeMap<&str, usize> = BTreeMap::new();
    for binding in adapters.iter().filter(|b| b.activity == tree.owner) {
        let Some(row_doc) = bundle.layout(&binding.layout) else {
            warnings.push(Warning::new(
                WarningKind::UnresolvedAdapter,
                &tree.owner,
                format!("row layout `{}` not found", binding.layout),
            ));
            continue;
        };
        let view_type = binding.view_type.as_str();
        let mut candidates = Vec::new();
        tree.root.walk(&mut |p, n| {
            if matches_view_type(n.simple_tag(), view_type) {
                candidates.push(p.clone());
            }
        });
        let k = used.entry(view_type).or_default();
        let target = match candidates.get(*k) {
            Some(p) => p.clone(),
            None => {
                warnings.push(Warning::new(
                    WarningKind::MissingAdapterView,
                    &tree.owner,
                    format!("no {view_type} in layout; appended one to the root"),
                ));
                let path = NodePath::root().child(tree.root.children.len());
                tree.root.children.push(
                    ComponentNode::new(view_type)
                        .with_attr("layout_width", "match_parent")
                        .with_attr("layout_height", "wrap_content"),
                );
                tree.provenance
                    .insert(path.clone(), Provenance::AdapterDummy);
                path
            }
        };
        *k += 1;
        let view = tree.root.get_mut(&target).expect("path from walk");
        for i in 1..=spec.row_count {
            let mut row = row_doc.root.clone();
            fill_dummy(&mut row, &spec.row_text(i));
            let row_path = target.child(view.children.len());
            row.walk(&mut |p, _| {
                let mut full = row_path.0.clone();
                full.extend_from_slice(&p.0);
                tree.provenance
                    .insert(NodePath(full), Provenance::AdapterDummy);
            });
            view.children.push(row);
        }
    }
    Synthesis { tree, warnings }
}

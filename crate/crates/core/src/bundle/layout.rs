//! Layout XML documents: the component tree, its attributes, and the
//! parse/serialize pair for the layout dialect.

use std::fmt::{self, Write as _};

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use super::error::ParseError;

pub const ANDROID_NS: &str = "http://schemas.android.com/apk/res/android";
const APP_NS: &str = "http://schemas.android.com/apk/res-auto";
const TOOLS_NS: &str = "http://schemas.android.com/tools";

/// Containers that may hold children.
const VIEW_GROUPS: &[&str] = &[
    "LinearLayout",
    "RelativeLayout",
    "FrameLayout",
    "ScrollView",
    "HorizontalScrollView",
    "NestedScrollView",
    "TableLayout",
    "TableRow",
    "GridLayout",
    "ConstraintLayout",
    "CoordinatorLayout",
    "DrawerLayout",
    "ListView",
    "GridView",
    "RecyclerView",
    "ViewPager",
    "ViewPager2",
    "RadioGroup",
    "CardView",
    "Toolbar",
];

/// Widgets that must not carry children.
const LEAF_WIDGETS: &[&str] = &[
    "TextView",
    "EditText",
    "Button",
    "ImageView",
    "ImageButton",
    "CheckBox",
    "RadioButton",
    "Switch",
    "ToggleButton",
    "ProgressBar",
    "SeekBar",
    "RatingBar",
    "Spinner",
    "View",
    "Space",
    "WebView",
];

/// The unqualified widget name, e.g. `RecyclerView` for
/// `androidx.recyclerview.widget.RecyclerView`.
pub fn simple_tag(tag: &str) -> &str {
    tag.rsplit('.').next().unwrap_or(tag)
}

pub fn is_view_group(tag: &str) -> bool {
    let simple = simple_tag(tag);
    VIEW_GROUPS.contains(&simple) || simple.ends_with("Layout")
}

pub fn is_leaf_widget(tag: &str) -> bool {
    LEAF_WIDGETS.contains(&simple_tag(tag))
}

/// Attribute names mapped to string values, in document order.
///
/// Names in the `android:` namespace are stored without the prefix; other
/// namespaces keep theirs (`app:layout_behavior`).
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AttributeSet(IndexMap<String, String>);

impl AttributeSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Insert a new attribute; returns `false` if the name was already present.
    pub fn try_insert(&mut self, name: impl Into<String>, value: impl Into<String>) -> bool {
        let name = name.into();
        if self.0.contains_key(&name) {
            return false;
        }
        self.0.insert(name, value.into());
        true
    }

    /// Insert or overwrite.
    pub fn set(&mut self, name: impl Into<String>, value: impl Into<String>) {
        self.0.insert(name.into(), value.into());
    }

    pub fn get(&self, name: &str) -> Option<&str> {
        self.0.get(name).map(String::as_str)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.0.contains_key(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.0.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl<K: Into<String>, V: Into<String>> FromIterator<(K, V)> for AttributeSet {
    fn from_iter<I: IntoIterator<Item = (K, V)>>(iter: I) -> Self {
        let mut set = AttributeSet::new();
        for (k, v) in iter {
            set.set(k, v);
        }
        set
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentNode {
    pub tag: String,
    #[serde(default, skip_serializing_if = "AttributeSet::is_empty")]
    pub attributes: AttributeSet,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<ComponentNode>,
}

impl ComponentNode {
    pub fn new(tag: impl Into<String>) -> Self {
        ComponentNode {
            tag: tag.into(),
            attributes: AttributeSet::new(),
            children: Vec::new(),
        }
    }

    pub fn with_attr(mut self, name: &str, value: &str) -> Self {
        self.attributes.set(name, value);
        self
    }

    pub fn with_child(mut self, child: ComponentNode) -> Self {
        self.children.push(child);
        self
    }

    pub fn simple_tag(&self) -> &str {
        simple_tag(&self.tag)
    }

    /// Number of nodes in this subtree.
    pub fn size(&self) -> usize {
        1 + self.children.iter().map(ComponentNode::size).sum::<usize>()
    }

    /// Preorder visit with the child-index path of every node.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&NodePath, &'a ComponentNode)) {
        fn go<'a>(
            node: &'a ComponentNode,
            path: &mut Vec<usize>,
            f: &mut impl FnMut(&NodePath, &'a ComponentNode),
        ) {
            f(&NodePath(path.clone()), node);
            for (i, child) in node.children.iter().enumerate() {
                path.push(i);
                go(child, path, f);
                path.pop();
            }
        }
        go(self, &mut Vec::new(), f)
    }

    pub fn get(&self, path: &NodePath) -> Option<&ComponentNode> {
        path.0
            .iter()
            .try_fold(self, |node, &i| node.children.get(i))
    }

    pub fn get_mut(&mut self, path: &NodePath) -> Option<&mut ComponentNode> {
        path.0
            .iter()
            .try_fold(self, |node, &i| node.children.get_mut(i))
    }
}

/// Position of a node as the child indices leading to it from the root.
/// The root is the empty path.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodePath(pub Vec<usize>);

impl NodePath {
    pub fn root() -> Self {
        NodePath(Vec::new())
    }

    pub fn child(&self, index: usize) -> Self {
        let mut v = self.0.clone();
        v.push(index);
        NodePath(v)
    }

    pub fn depth(&self) -> usize {
        self.0.len()
    }
}

impl fmt::Display for NodePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("0")?;
        for i in &self.0 {
            write!(f, ".{i}")?;
        }
        Ok(())
    }
}

impl Serialize for NodePath {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayoutDocument {
    pub name: String,
    pub root: ComponentNode,
}

impl LayoutDocument {
    /// Parse a layout file. `file` is only used for error messages.
    pub fn parse(name: &str, file: &str, text: &str) -> Result<Self, ParseError> {
        let doc = roxmltree::Document::parse(text).map_err(|e| ParseError {
            file: file.to_string(),
            line: e.pos().row,
            message: e.to_string(),
        })?;
        let root_el = doc.root_element();
        let root = convert_element(&doc, root_el, file)?;
        if !is_view_group(&root.tag) {
            return Err(ParseError {
                file: file.to_string(),
                line: line_of(&doc, root_el),
                message: format!("root element <{}> is not a ViewGroup", root.tag),
            });
        }
        Ok(LayoutDocument {
            name: name.to_string(),
            root,
        })
    }

    pub fn to_xml(&self) -> String {
        serialize_xml(&self.root)
    }
}

fn line_of(doc: &roxmltree::Document<'_>, node: roxmltree::Node<'_, '_>) -> u32 {
    doc.text_pos_at(node.range().start).row
}

fn convert_element(
    doc: &roxmltree::Document<'_>,
    el: roxmltree::Node<'_, '_>,
    file: &str,
) -> Result<ComponentNode, ParseError> {
    let mut node = ComponentNode::new(el.tag_name().name());
    for attr in el.attributes() {
        let name = match attr.namespace() {
            None | Some(ANDROID_NS) => attr.name().to_string(),
            Some(ns) => {
                let prefix = el.lookup_prefix(ns).unwrap_or("ns");
                format!("{prefix}:{}", attr.name())
            }
        };
        if !node.attributes.try_insert(name.clone(), attr.value()) {
            return Err(ParseError {
                file: file.to_string(),
                line: line_of(doc, el),
                message: format!("duplicate attribute `{name}` on <{}>", node.tag),
            });
        }
    }
    for child in el.children().filter(|c| c.is_element()) {
        node.children.push(convert_element(doc, child, file)?);
    }
    if is_leaf_widget(&node.tag) && !node.children.is_empty() {
        return Err(ParseError {
            file: file.to_string(),
            line: line_of(doc, el),
            message: format!("leaf widget <{}> cannot have children", node.tag),
        });
    }
    Ok(node)
}

fn namespace_for(prefix: &str) -> String {
    match prefix {
        "app" => APP_NS.to_string(),
        "tools" => TOOLS_NS.to_string(),
        other => format!("urn:storyboard:{other}"),
    }
}

pub(crate) fn escape_xml(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            '\n' => out.push_str("&#10;"),
            '\t' => out.push_str("&#9;"),
            c => out.push(c),
        }
    }
    out
}

/// Serialize a component tree in the layout dialect. Bare attribute names
/// are written in the `android:` namespace.
pub fn serialize_xml(root: &ComponentNode) -> String {
    let mut prefixes = std::collections::BTreeSet::new();
    root.walk(&mut |_, n| {
        for (name, _) in n.attributes.iter() {
            if let Some((p, _)) = name.split_once(':') {
                prefixes.insert(p.to_string());
            }
        }
    });
    let mut out = String::from("<?xml version=\"1.0\" encoding=\"utf-8\"?>\n");
    let mut ns_decl = format!(" xmlns:android=\"{ANDROID_NS}\"");
    for p in &prefixes {
        let _ = write!(ns_decl, " xmlns:{p}=\"{}\"", namespace_for(p));
    }
    write_node(root, 0, Some(&ns_decl), &mut out);
    out
}

fn write_node(node: &ComponentNode, depth: usize, ns_decl: Option<&str>, out: &mut String) {
    let indent = "    ".repeat(depth);
    let _ = write!(out, "{indent}<{}", node.tag);
    if let Some(ns) = ns_decl {
        out.push_str(ns);
    }
    for (name, value) in node.attributes.iter() {
        let qualified = if name.contains(':') {
            name.to_string()
        } else {
            format!("android:{name}")
        };
        let _ = write!(out, "\n{indent}    {qualified}=\"{}\"", escape_xml(value));
    }
    if node.children.is_empty() {
        out.push_str(" />\n");
    } else {
        out.push_str(">\n");
        for child in &node.children {
            write_node(child, depth + 1, None, out);
        }
        let _ = writeln!(out, "{indent}</{}>", node.tag);
    }
}

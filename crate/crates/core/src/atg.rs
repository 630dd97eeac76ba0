//! Activity transition graph extraction.
//!
//! Every `start_activity` statement is attributed to the activity that
//! actually shows on screen when it runs:
//!
//! * code in an activity belongs to that activity (and to any activity that
//!   reaches the method through the call graph);
//! * code in an inner class belongs to its outer activity;
//! * code in a fragment, or in a class nested inside one, produces a
//!   fragment relation that is merged onto every activity hosting the
//!   fragment;
//! * code anywhere else is attributed by walking the call graph backwards
//!   to the activities (and fragments) that reach it.
//!
//! Alongside the graph the extractor records adapter bindings and the
//! layout kind of every page-owning class.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use crate::bundle::{
    class_layout_kind, AdapterSource, AdapterViewType, AppBundle, CallGraph, ClassKind, CodeModel,
    IntentTarget, LayoutKind, MethodModel, MethodRef, Statement,
};
use crate::warning::{Warning, WarningKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeKind {
    Activity,
    Fragment,
}

/// Which extraction branch discovered an edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeOrigin {
    Direct,
    InnerClass,
    FragmentMerged,
    BackwardCg,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TransitionEdge {
    pub source: String,
    pub target: String,
    /// Union of every branch that found this pair.
    pub origins: BTreeSet<EdgeOrigin>,
}

/// ⟨page owner, view type, row layout⟩.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct AdapterBinding {
    pub activity: String,
    pub view_type: AdapterViewType,
    pub layout: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FragmentRelation {
    /// Hosting activity, or `None` when no host could be identified.
    pub host: Option<String>,
    pub fragment: String,
    pub started_targets: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct TransitionGraph {
    pub nodes: BTreeMap<String, NodeKind>,
    edges: BTreeMap<(String, String), BTreeSet<EdgeOrigin>>,
    pub fragment_relations: Vec<FragmentRelation>,
    pub adapters: Vec<AdapterBinding>,
    pub layout_kind: BTreeMap<String, LayoutKind>,
    pub warnings: Vec<Warning>,
}

impl TransitionGraph {
    /// Adds both endpoints as nodes if absent; activity kind is assumed.
    pub fn add_edge(&mut self, source: &str, target: &str, origin: EdgeOrigin) {
        for n in [source, target] {
            self.nodes
                .entry(n.to_string())
                .or_insert(NodeKind::Activity);
        }
        self.edges
            .entry((source.to_string(), target.to_string()))
            .or_default()
            .insert(origin);
    }

    pub fn has_edge(&self, source: &str, target: &str) -> bool {
        self.edges
            .contains_key(&(source.to_string(), target.to_string()))
    }

    pub fn origins(&self, source: &str, target: &str) -> Option<&BTreeSet<EdgeOrigin>> {
        self.edges.get(&(source.to_string(), target.to_string()))
    }

    /// Activity-level transitions, sorted by (source, target).
    pub fn edges(&self) -> impl Iterator<Item = TransitionEdge> + '_ {
        self.edges.iter().map(|((s, t), o)| TransitionEdge {
            source: s.clone(),
            target: t.clone(),
            origins: o.clone(),
        })
    }

    pub fn pairs(&self) -> BTreeSet<(String, String)> {
        self.edges.keys().cloned().collect()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn activities(&self) -> impl Iterator<Item = &str> {
        self.nodes_of(NodeKind::Activity)
    }

    pub fn fragments(&self) -> impl Iterator<Item = &str> {
        self.nodes_of(NodeKind::Fragment)
    }

    fn nodes_of(&self, kind: NodeKind) -> impl Iterator<Item = &str> {
        self.nodes
            .iter()
            .filter(move |(_, k)| **k == kind)
            .map(|(n, _)| n.as_str())
    }

    /// Activities hosting `fragment`.
    pub fn hosts_of(&self, fragment: &str) -> BTreeSet<&str> {
        self.fragment_relations
            .iter()
            .filter(|r| r.fragment == fragment)
            .filter_map(|r| r.host.as_deref())
            .collect()
    }

    /// The transitions over activities and fragments used for rendering:
    /// activity edges plus host→fragment pairs.
    pub fn rendering_pairs(&self) -> BTreeSet<(String, String)> {
        let mut pairs = self.pairs();
        for r in &self.fragment_relations {
            if let Some(h) = &r.host {
                pairs.insert((h.clone(), r.fragment.clone()));
            }
        }
        pairs
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("intent variable `{var}` is never bound to a class")]
pub struct UnresolvedTransition {
    pub var: String,
}

/// The class a `start_activity` at `index` launches. Variable targets are
/// resolved by walking back to the nearest `new_intent` binding.
pub fn resolve_intent_target(
    method: &MethodModel,
    index: usize,
) -> Result<String, UnresolvedTransition> {
    let target = match method.statements.get(index) {
        Some(Statement::StartActivity { target, .. }) => target,
        _ => {
            return Err(UnresolvedTransition {
                var: format!("<statement {index}>"),
            })
        }
    };
    match target {
        IntentTarget::Class(c) => Ok(c.clone()),
        IntentTarget::Var(v) => method.statements[..index]
            .iter()
            .rev()
            .find_map(|s| match s {
                Statement::NewIntent { var, target } if var == v => Some(target.clone()),
                _ => None,
            })
            .ok_or_else(|| UnresolvedTransition { var: v.clone() }),
    }
}

/// The activity or fragment whose page a class's code runs on.
#[derive(Debug, Clone, PartialEq, Eq)]
enum Owner<'a> {
    Activity(&'a str),
    Fragment(&'a str),
    /// An inner class whose outer chain reaches this activity.
    InnerOf(&'a str),
    None,
}

/// A fragment anywhere in the outer chain wins over an activity.
fn owner_of<'a>(code: &'a CodeModel, class: &'a str) -> Owner<'a> {
    match code.kind_of(class) {
        Some(ClassKind::Activity) => return Owner::Activity(class),
        Some(ClassKind::Fragment) => return Owner::Fragment(class),
        None => return Owner::None,
        _ => {}
    }
    let chain = code.outer_chain(class);
    if let Some(f) = chain.iter().find(|c| c.kind == ClassKind::Fragment) {
        return Owner::Fragment(&f.name);
    }
    if let Some(a) = chain.iter().find(|c| c.kind == ClassKind::Activity) {
        return Owner::InnerOf(&a.name);
    }
    Owner::None
}

#[derive(Debug, Default)]
struct Callers {
    activities: BTreeSet<String>,
    fragments: BTreeSet<String>,
}

fn backward_callers(start: &MethodRef, cg: &CallGraph, code: &CodeModel) -> Callers {
    let mut out = Callers::default();
    for m in cg.backward_reachable(start) {
        match owner_of(code, &m.class) {
            Owner::Activity(a) | Owner::InnerOf(a) => {
                out.activities.insert(a.to_string());
            }
            Owner::Fragment(f) => {
                out.fragments.insert(f.to_string());
            }
            Owner::None => {}
        }
    }
    out
}

/// Activities from which `method` is reachable over reversed call edges,
/// including the method's own class. Code in an inner class counts for its
/// outer activity. Terminates on cyclic graphs.
pub fn resolve_caller_activities(
    method: &MethodRef,
    cg: &CallGraph,
    code: &CodeModel,
) -> BTreeSet<String> {
    backward_callers(method, cg, code).activities
}

/// Add host→target edges for every fragment relation with a known host.
pub fn merge_fragment_relations(
    mut graph: TransitionGraph,
    relations: Vec<FragmentRelation>,
) -> TransitionGraph {
    for rel in &relations {
        graph
            .nodes
            .entry(rel.fragment.clone())
            .or_insert(NodeKind::Fragment);
        match &rel.host {
            Some(host) => {
                for t in &rel.started_targets {
                    graph.add_edge(host, t, EdgeOrigin::FragmentMerged);
                }
            }
            None if !rel.started_targets.is_empty() => graph.warnings.push(Warning::new(
                WarningKind::UnhostedFragment,
                &rel.fragment,
                format!(
                    "no hosting activity found; transitions to {} not merged",
                    rel.started_targets.join(", ")
                ),
            )),
            None => graph.warnings.push(Warning::new(
                WarningKind::UnhostedFragment,
                &rel.fragment,
                "no hosting activity found",
            )),
        }
    }
    graph.fragment_relations.extend(relations);
    graph
}

/// Resolve the row layout of a `set_adapter` at `index`: a literal layout,
/// or a variable bound by an earlier `new_adapter`.
fn adapter_layout(method: &MethodModel, index: usize, source: &AdapterSource) -> Option<String> {
    match source {
        AdapterSource::Layout(l) => Some(l.clone()),
        AdapterSource::Fragment(_) => None,
        AdapterSource::Var(v) => method.statements[..index]
            .iter()
            .rev()
            .find_map(|s| match s {
                Statement::NewAdapter { var, layout } if var == v => Some(layout.clone()),
                _ => None,
            }),
    }
}

/// Bindings for every `set_adapter` whose source resolves to a layout.
/// Identical tuples are reported once.
pub fn extract_adapters(bundle: &AppBundle) -> (Vec<AdapterBinding>, Vec<Warning>) {
    let mut bindings = Vec::new();
    let mut seen = BTreeSet::new();
    let mut warnings = Vec::new();
    for class in bundle.code.classes.iter().filter(|c| !c.undecompiled) {
        for method in &class.methods {
            for (i, stmt) in method.statements.iter().enumerate() {
                let Statement::SetAdapter {
                    view_type, source, ..
                } = stmt
                else {
                    continue;
                };
                if matches!(source, AdapterSource::Fragment(_)) {
                    continue;
                }
                let subject = format!("{}.{}", class.name, method.name);
                let Some(layout) = adapter_layout(method, i, source) else {
                    warnings.push(Warning::new(
                        WarningKind::UnresolvedAdapter,
                        subject,
                        format!("adapter source of {view_type} does not resolve to a layout"),
                    ));
                    continue;
                };
                let owner = match owner_of(&bundle.code, &class.name) {
                    Owner::Activity(a) | Owner::InnerOf(a) | Owner::Fragment(a) => a,
                    Owner::None => {
                        warnings.push(Warning::new(
                            WarningKind::UnresolvedAdapter,
                            subject,
                            "adapter set outside any activity or fragment",
                        ));
                        continue;
                    }
                };
                let binding = AdapterBinding {
                    activity: owner.to_string(),
                    view_type: *view_type,
                    layout,
                };
                if seen.insert(binding.clone()) {
                    bindings.push(binding);
                }
            }
        }
    }
    (bindings, warnings)
}

/// Build the complete transition graph for a bundle.
pub fn extract_transitions(bundle: &AppBundle) -> TransitionGraph {
    let code = &bundle.code;
    let cg = &bundle.call_graph;
    let mut graph = TransitionGraph::default();

    for class in &code.classes {
        let kind = match class.kind {
            ClassKind::Activity => NodeKind::Activity,
            ClassKind::Fragment => NodeKind::Fragment,
            _ => continue,
        };
        graph.nodes.insert(class.name.clone(), kind);
        graph
            .layout_kind
            .insert(class.name.clone(), class_layout_kind(class));
    }

    // fragment -> started activities, fragment -> hosts, in discovery order
    let mut fragment_targets: BTreeMap<String, Vec<String>> = BTreeMap::new();
    let mut fragment_hosts: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();

    for class in &code.classes {
        if class.undecompiled {
            graph.warnings.push(Warning::new(
                WarningKind::Undecompiled,
                &class.name,
                "class body not decompiled; skipped",
            ));
            continue;
        }
        let owner = owner_of(code, &class.name);
        for method in &class.methods {
            let here = MethodRef::new(&class.name, &method.name);
            let subject = here.to_string();
            for (i, stmt) in method.statements.iter().enumerate() {
                match stmt {
                    Statement::StartActivity { .. } => {
                        let target = match resolve_intent_target(method, i) {
                            Ok(t) => t,
                            Err(e) => {
                                graph.warnings.push(Warning::new(
                                    WarningKind::UnresolvedTransition,
                                    &subject,
                                    e.to_string(),
                                ));
                                continue;
                            }
                        };
                        if code.kind_of(&target) != Some(ClassKind::Activity) {
                            graph.warnings.push(Warning::new(
                                WarningKind::NonActivityTarget,
                                &subject,
                                format!("start target `{target}` is not an activity"),
                            ));
                            continue;
                        }
                        match owner {
                            Owner::Fragment(f) => {
                                let ts = fragment_targets.entry(f.to_string()).or_default();
                                if !ts.contains(&target) {
                                    ts.push(target);
                                }
                            }
                            Owner::InnerOf(a) => {
                                graph.add_edge(a, &target, EdgeOrigin::InnerClass);
                            }
                            Owner::Activity(_) | Owner::None => {
                                let callers = backward_callers(&here, cg, code);
                                for a in &callers.activities {
                                    let origin = if *a == class.name {
                                        EdgeOrigin::Direct
                                    } else {
                                        EdgeOrigin::BackwardCg
                                    };
                                    graph.add_edge(a, &target, origin);
                                }
                                for f in &callers.fragments {
                                    let ts = fragment_targets.entry(f.clone()).or_default();
                                    if !ts.contains(&target) {
                                        ts.push(target.clone());
                                    }
                                }
                                if callers.activities.is_empty() && callers.fragments.is_empty() {
                                    graph.warnings.push(Warning::new(
                                        WarningKind::UnresolvedTransition,
                                        &subject,
                                        format!("no activity reaches this start of `{target}`"),
                                    ));
                                }
                            }
                        }
                    }
                    Statement::FragmentCommit { fragment, .. }
                    | Statement::SetAdapter {
                        source: AdapterSource::Fragment(fragment),
                        ..
                    } => {
                        let hosts: BTreeSet<String> = match owner {
                            Owner::Activity(a) | Owner::InnerOf(a) => [a.to_string()].into(),
                            Owner::Fragment(f) => {
                                graph.warnings.push(Warning::new(
                                    WarningKind::NestedFragment,
                                    fragment,
                                    format!("started from fragment `{f}`; not chain-merged"),
                                ));
                                BTreeSet::new()
                            }
                            Owner::None => backward_callers(&here, cg, code).activities,
                        };
                        fragment_hosts
                            .entry(fragment.clone())
                            .or_default()
                            .extend(hosts);
                    }
                    _ => {}
                }
            }
        }
    }

    let (adapters, adapter_warnings) = extract_adapters(bundle);
    graph.adapters = adapters;
    graph.warnings.extend(adapter_warnings);

    let fragments: BTreeSet<&String> = fragment_targets
        .keys()
        .chain(fragment_hosts.keys())
        .collect();
    let mut relations = Vec::new();
    for f in fragments {
        let targets = fragment_targets.get(f).cloned().unwrap_or_default();
        let hosts = fragment_hosts.get(f).cloned().unwrap_or_default();
        if hosts.is_empty() {
            relations.push(FragmentRelation {
                host: None,
                fragment: f.clone(),
                started_targets: targets,
            });
        } else {
            for h in hosts {
                relations.push(FragmentRelation {
                    host: Some(h),
                    fragment: f.clone(),
                    started_targets: targets.clone(),
                });
            }
        }
    }
    merge_fragment_relations(graph, relations)
}

#[derive(Debug, Clone, Serialize)]
pub struct AtgNode {
    pub name: String,
    pub kind: NodeKind,
    pub layout_kind: Option<LayoutKind>,
    pub inferred_name: Option<String>,
}

/// The `atg.json` document. Field order is fixed.
#[derive(Debug, Clone, Serialize)]
pub struct AtgDocument {
    pub app_id: String,
    pub nodes: Vec<AtgNode>,
    pub edges: Vec<TransitionEdge>,
    pub fragment_relations: Vec<FragmentRelation>,
    pub adapters: Vec<AdapterBinding>,
    pub warnings: Vec<Warning>,
}

impl AtgDocument {
    pub fn new(app_id: &str, graph: &TransitionGraph, inferred: &BTreeMap<String, String>) -> Self {
        AtgDocument {
            app_id: app_id.to_string(),
            nodes: graph
                .nodes
                .iter()
                .map(|(name, kind)| AtgNode {
                    name: name.clone(),
                    kind: *kind,
                    layout_kind: graph.layout_kind.get(name).copied(),
                    inferred_name: inferred.get(name).cloned(),
                })
                .collect(),
            edges: graph.edges().collect(),
            fragment_relations: graph.fragment_relations.clone(),
            adapters: graph.adapters.clone(),
            warnings: graph.warnings.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("atg document serializes");
        s.push('\n');
        s
    }
}

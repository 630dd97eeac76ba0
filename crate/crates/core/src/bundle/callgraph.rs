use std::collections::{BTreeMap, BTreeSet, VecDeque};

use super::code::{CodeModel, MethodRef, Statement};
use super::error::LinkError;

/// Directed call edges between methods, with a reverse index for backward
/// traversal. May contain cycles and self-loops.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CallGraph {
    forward: BTreeMap<MethodRef, BTreeSet<MethodRef>>,
    reverse: BTreeMap<MethodRef, BTreeSet<MethodRef>>,
}

impl CallGraph {
    pub fn add_edge(&mut self, caller: MethodRef, callee: MethodRef) {
        self.reverse
            .entry(callee.clone())
            .or_default()
            .insert(caller.clone());
        self.forward.entry(caller).or_default().insert(callee);
    }

    pub fn callees(&self, m: &MethodRef) -> impl Iterator<Item = &MethodRef> {
        self.forward.get(m).into_iter().flatten()
    }

    pub fn callers(&self, m: &MethodRef) -> impl Iterator<Item = &MethodRef> {
        self.reverse.get(m).into_iter().flatten()
    }

    pub fn edges(&self) -> impl Iterator<Item = (&MethodRef, &MethodRef)> {
        self.forward
            .iter()
            .flat_map(|(a, bs)| bs.iter().map(move |b| (a, b)))
    }

    pub fn edge_count(&self) -> usize {
        self.forward.values().map(BTreeSet::len).sum()
    }

    pub fn nodes(&self) -> BTreeSet<&MethodRef> {
        self.forward.keys().chain(self.reverse.keys()).collect()
    }

    /// Every method from which `start` is reachable along call edges,
    /// `start` included. Cycles are visited once.
    pub fn backward_reachable(&self, start: &MethodRef) -> BTreeSet<MethodRef> {
        let mut seen = BTreeSet::from([start.clone()]);
        let mut queue = VecDeque::from([start.clone()]);
        while let Some(m) = queue.pop_front() {
            for caller in self.callers(&m) {
                if seen.insert(caller.clone()) {
                    queue.push_back(caller.clone());
                }
            }
        }
        seen
    }
}

/// One edge per `call` statement, deduplicated. Calls into undecompiled
/// classes are accepted without a method check.
pub fn build_call_graph(code: &CodeModel) -> Result<CallGraph, LinkError> {
    let mut graph = CallGraph::default();
    let mut unresolved = BTreeSet::new();
    for class in &code.classes {
        for method in &class.methods {
            let caller = MethodRef::new(&class.name, &method.name);
            for stmt in &method.statements {
                let Statement::Call {
                    class: cc,
                    method: cm,
                } = stmt
                else {
                    continue;
                };
                let callee = MethodRef::new(cc, cm);
                match code.class(cc) {
                    Some(target) if target.undecompiled || target.method(cm).is_some() => {
                        graph.add_edge(caller.clone(), callee)
                    }
                    _ => {
                        unresolved.insert(callee.to_string());
                    }
                }
            }
        }
    }
    if unresolved.is_empty() {
        Ok(graph)
    } else {
        Err(LinkError {
            unresolved: unresolved.into_iter().collect(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundle::code::{ClassKind, ClassModel, MethodModel};

    fn class(name: &str, methods: &[(&str, &[(&str, &str)])]) -> ClassModel {
        ClassModel {
            name: name.into(),
            kind: ClassKind::Plain,
            superclass: None,
            outer_class: None,
            layout: None,
            undecompiled: false,
            source: None,
            methods: methods
                .iter()
                .map(|(m, calls)| MethodModel {
                    name: m.to_string(),
                    statements: calls
                        .iter()
                        .map(|(c, mm)| Statement::Call {
                            class: c.to_string(),
                            method: mm.to_string(),
                        })
                        .collect(),
                })
                .collect(),
        }
    }

    #[test]
    fn direct_call_maps_to_edge() {
        let code = CodeModel::new(vec![
            class("A", &[("onCreate", &[("B", "helper")])]),
            class("B", &[("helper", &[])]),
        ])
        .unwrap();
        let cg = build_call_graph(&code).unwrap();
        let edges: Vec<_> = cg
            .edges()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect();
        assert_eq!(
            edges,
            vec![("A.onCreate".to_string(), "B.helper".to_string())]
        );
    }

    #[test]
    fn self_recursion_is_a_self_loop() {
        let code = CodeModel::new(vec![class("A", &[("f", &[("A", "f")])])]).unwrap();
        let cg = build_call_graph(&code).unwrap();
        let f = MethodRef::new("A", "f");
        assert_eq!(cg.callees(&f).collect::<Vec<_>>(), vec![&f]);
        assert_eq!(cg.backward_reachable(&f).len(), 1);
    }

    #[test]
    fn duplicate_calls_collapse() {
        let stmts: &[(&str, &str)] = &[("B", "g"), ("B", "g"), ("B", "h"), ("B", "g")];
        let code = CodeModel::new(vec![
            class("A", &[("f", stmts)]),
            class("B", &[("g", &[]), ("h", &[])]),
        ])
        .unwrap();
        let cg = build_call_graph(&code).unwrap();
        // Oracle: the set of distinct call payloads.
        let distinct: BTreeSet<_> = stmts.iter().collect();
        assert_eq!(cg.edge_count(), distinct.len());
    }

    #[test]
    fn undeclared_callee_is_a_link_error() {
        let code = CodeModel::new(vec![class(
            "A",
            &[("f", &[("Nope", "x"), ("A", "missing")])],
        )])
        .unwrap();
        let err = build_call_graph(&code).unwrap_err();
        assert_eq!(
            err.unresolved,
            vec!["A.missing".to_string(), "Nope.x".to_string()]
        );
    }
}

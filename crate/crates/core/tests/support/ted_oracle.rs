//! Reference tree edit distance, written independently of the library:
//! its own parser for the parenthesized notation and a memoized recursion
//! on ordered forests that removes rightmost roots.

use std::collections::HashMap;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Node {
    pub label: String,
    pub children: Vec<Node>,
}

pub fn parse(s: &str) -> Node {
    fn node(b: &[u8], i: &mut usize) -> Node {
        let start = *i;
        while *i < b.len() && !matches!(b[*i], b'(' | b')' | b',') {
            *i += 1;
        }
        let label = String::from_utf8(b[start..*i].to_vec()).unwrap();
        let mut children = Vec::new();
        if *i < b.len() && b[*i] == b'(' {
            *i += 1;
            loop {
                children.push(node(b, i));
                let c = b[*i];
                *i += 1;
                if c == b')' {
                    break;
                }
            }
        }
        Node { label, children }
    }
    let mut i = 0;
    let n = node(s.as_bytes(), &mut i);
    assert_eq!(i, s.len(), "trailing input in {s}");
    n
}

fn size(f: &[Node]) -> usize {
    f.iter().map(|n| 1 + size(&n.children)).sum()
}

fn forest(f: &[Node], g: &[Node], memo: &mut HashMap<(Vec<Node>, Vec<Node>), usize>) -> usize {
    if f.is_empty() {
        return size(g);
    }
    if g.is_empty() {
        return size(f);
    }
    let key = (f.to_vec(), g.to_vec());
    if let Some(&d) = memo.get(&key) {
        return d;
    }
    let (v, f_rest) = f.split_last().unwrap();
    let (w, g_rest) = g.split_last().unwrap();
    let mut f_del: Vec<Node> = f_rest.to_vec();
    f_del.extend(v.children.iter().cloned());
    let mut g_ins: Vec<Node> = g_rest.to_vec();
    g_ins.extend(w.children.iter().cloned());
    let delete = forest(&f_del, g, memo) + 1;
    let insert = forest(f, &g_ins, memo) + 1;
    let relabel = forest(&v.children, &w.children, memo)
        + forest(f_rest, g_rest, memo)
        + usize::from(v.label != w.label);
    let d = delete.min(insert).min(relabel);
    memo.insert(key, d);
    d
}

/// Unit-cost edit distance between two trees in `A(B,C(D))` notation.
pub fn ted(a: &str, b: &str) -> usize {
    let (a, b) = (parse(a), parse(b));
    forest(&[a], &[b], &mut HashMap::new())
}

#[allow(dead_code)]
pub fn node_count(s: &str) -> usize {
    size(&[parse(s)])
}

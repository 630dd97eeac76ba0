//! Inputs shared by the benchmarks in `benches/`.

use std::path::PathBuf;

use storyboard_core::infer::LayoutTree;
use storyboard_core::{load_bundle, AppBundle};

const LABELS: [&str; 6] = [
    "LinearLayout",
    "TextView",
    "Button",
    "ImageView",
    "EditText",
    "ListView",
];

pub fn fixture(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(rel)
}

pub fn demo_bundle() -> AppBundle {
    load_bundle(&fixture("demo")).expect("demo fixture loads")
}

/// A tree of `n` nodes where node `i` hangs under node `(i - 1) / fanout`,
/// labelled by cycling through common widget tags from `offset`.
pub fn layout_tree(n: usize, fanout: usize, offset: usize) -> LayoutTree {
    assert!(n > 0 && fanout > 0);
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 1..n {
        children[(i - 1) / fanout].push(i);
    }
    fn build(i: usize, children: &[Vec<usize>], offset: usize) -> LayoutTree {
        LayoutTree {
            label: LABELS[(i + offset) % LABELS.len()].to_string(),
            children: children[i]
                .iter()
                .map(|&c| build(c, children, offset))
                .collect(),
        }
    }
    build(0, &children, offset)
}

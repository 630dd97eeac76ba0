//! The full bundle-to-storyboard run.

use std::collections::BTreeMap;

use crate::atg::{extract_transitions, AtgDocument, TransitionGraph};
use crate::bundle::AppBundle;
use crate::infer::{infer_semantic_name, Corpus, InferenceConfig, InferenceResult, LayoutTree};
use crate::render::{encode_pgm, render_page, RenderSpec, RenderedPage};
use crate::storyboard::{
    assemble_storyboard, file_stem, PageArtifact, StoryboardBundle, STORYBOARD_FILE,
};
use crate::synth::{
    inject_adapter_views, synthesize_static_layout, DummyDataSpec, StaticLayoutTree,
};
use crate::warning::{Warning, WarningKind};

pub const ATG_FILE: &str = "atg.json";

#[derive(Debug, Clone, Default)]
pub struct PipelineOptions {
    pub render: RenderSpec,
    pub dummy: DummyDataSpec,
    pub inference: InferenceConfig,
    /// Also write `pages/<Class>.pgm` rasters.
    pub rasters: bool,
}

#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub graph: TransitionGraph,
    /// Synthesized trees with adapter rows, per activity and fragment.
    pub trees: BTreeMap<String, StaticLayoutTree>,
    pub pages: BTreeMap<String, RenderedPage>,
    pub inferences: BTreeMap<String, InferenceResult>,
    pub bundle: StoryboardBundle,
    /// Everything reported by every stage, also written to storyboard.json.
    pub warnings: Vec<Warning>,
}

/// Synthesize, fill adapters, and render every activity and fragment page.
/// Returns the trees before adapter filling too, for name inference.
pub fn synthesize_pages(
    bundle: &AppBundle,
    graph: &TransitionGraph,
    options: &PipelineOptions,
    warnings: &mut Vec<Warning>,
) -> (
    BTreeMap<String, StaticLayoutTree>,
    BTreeMap<String, StaticLayoutTree>,
) {
    let mut plain = BTreeMap::new();
    let mut filled = BTreeMap::new();
    for name in graph.nodes.keys() {
        let synth = match synthesize_static_layout(name, bundle, graph) {
            Ok(s) => s,
            Err(e) => {
                warnings.push(Warning::new(WarningKind::EmptyPage, name, e.to_string()));
                continue;
            }
        };
        warnings.extend(synth.warnings);
        plain.insert(name.clone(), synth.tree.clone());
        let injected = inject_adapter_views(synth.tree, &graph.adapters, &options.dummy, bundle);
        warnings.extend(injected.warnings);
        filled.insert(name.clone(), injected.tree);
    }
    (plain, filled)
}

/// Infer display names for obfuscated activities.
pub fn infer_names(
    bundle: &AppBundle,
    graph: &TransitionGraph,
    plain_trees: &BTreeMap<String, StaticLayoutTree>,
    corpus: &Corpus,
    config: &InferenceConfig,
) -> BTreeMap<String, InferenceResult> {
    let mut out = BTreeMap::new();
    for name in graph.activities() {
        let Some(tree) = plain_trees.get(name) else {
            continue;
        };
        let layout = bundle.class(name).and_then(|c| c.layout.as_deref());
        let result = infer_semantic_name(
            name,
            &LayoutTree::from_node(&tree.root),
            layout,
            corpus,
            config,
        );
        out.insert(name.to_string(), result);
    }
    out
}

pub fn run_pipeline(
    bundle: &AppBundle,
    corpus: Option<&Corpus>,
    options: &PipelineOptions,
) -> PipelineOutput {
    let graph = extract_transitions(bundle);
    let mut warnings = graph.warnings.clone();
    let (plain, trees) = synthesize_pages(bundle, &graph, options, &mut warnings);
    let pages: BTreeMap<String, RenderedPage> = trees
        .iter()
        .map(|(n, t)| {
            (
                n.clone(),
                render_page(t, &options.render, &bundle.resources, options.rasters),
            )
        })
        .collect();
    let inferences = corpus
        .map(|c| infer_names(bundle, &graph, &plain, c, &options.inference))
        .unwrap_or_default();

    let artifacts: BTreeMap<String, PageArtifact> = pages
        .iter()
        .map(|(n, p)| {
            (
                n.clone(),
                PageArtifact {
                    svg: p.svg.clone(),
                    layout_xml: trees[n].to_xml(),
                },
            )
        })
        .collect();
    let mut sb = assemble_storyboard(bundle, &graph, &artifacts, &inferences);
    warnings.extend(sb.storyboard.warnings.iter().cloned());
    sb.storyboard.warnings = warnings.clone();
    sb.files.insert(
        STORYBOARD_FILE.to_string(),
        sb.storyboard.to_json().into_bytes(),
    );

    let inferred: BTreeMap<String, String> = inferences
        .iter()
        .filter(|(n, r)| r.inferred_name != **n)
        .map(|(n, r)| (n.clone(), r.inferred_name.clone()))
        .collect();
    let atg = AtgDocument::new(&bundle.app_id, &graph, &inferred);
    sb.files
        .insert(ATG_FILE.to_string(), atg.to_json().into_bytes());
    if options.rasters {
        for (n, p) in &pages {
            if let Some(r) = &p.raster {
                sb.files
                    .insert(format!("pages/{}.pgm", file_stem(n)), encode_pgm(r));
            }
        }
    }
    PipelineOutput {
        graph,
        trees,
        pages,
        inferences,
        bundle: sb,
        warnings,
    }
}

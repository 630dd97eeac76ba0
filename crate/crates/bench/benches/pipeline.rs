use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use storyboard_bench::{demo_bundle, layout_tree};
use storyboard_core::atg::extract_transitions;
use storyboard_core::infer::tree_edit_distance;
use storyboard_core::pipeline::synthesize_pages;
use storyboard_core::render::render_page;
use storyboard_core::{run_pipeline, PipelineOptions};

fn ted(c: &mut Criterion) {
    let mut group = c.benchmark_group("tree_edit_distance");
    for n in [8, 32, 128] {
        let a = layout_tree(n, 3, 0);
        let b = layout_tree(n, 2, 1);
        group.bench_with_input(BenchmarkId::from_parameter(n), &(a, b), |bench, (a, b)| {
            bench.iter(|| tree_edit_distance(black_box(a), black_box(b)))
        });
    }
    group.finish();
}

fn extraction(c: &mut Criterion) {
    let bundle = demo_bundle();
    c.bench_function("extract_transitions/demo", |b| {
        b.iter(|| extract_transitions(black_box(&bundle)))
    });
}

fn layout_and_render(c: &mut Criterion) {
    let bundle = demo_bundle();
    let graph = extract_transitions(&bundle);
    let opts = PipelineOptions::default();
    c.bench_function("synthesize_pages/demo", |b| {
        b.iter(|| synthesize_pages(&bundle, &graph, &opts, &mut Vec::new()))
    });
    let (_, trees) = synthesize_pages(&bundle, &graph, &opts, &mut Vec::new());
    for raster in [false, true] {
        let name = if raster {
            "render/demo+raster"
        } else {
            "render/demo"
        };
        c.bench_function(name, |b| {
            b.iter(|| {
                for t in trees.values() {
                    black_box(render_page(t, &opts.render, &bundle.resources, raster));
                }
            })
        });
    }
}

fn end_to_end(c: &mut Criterion) {
    let bundle = demo_bundle();
    let opts = PipelineOptions::default();
    c.bench_function("run_pipeline/demo", |b| {
        b.iter(|| run_pipeline(&bundle, None, &opts))
    });
}

criterion_group!(benches, ted, extraction, layout_and_render, end_to_end);
criterion_main!(benches);

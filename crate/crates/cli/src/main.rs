use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use log::{info, warn};
use storyboard_core::atg::{extract_transitions, AtgDocument};
use storyboard_core::infer::{build_corpus, Corpus, InferenceConfig};
use storyboard_core::pipeline::{infer_names, synthesize_pages};
use storyboard_core::render::{
    encode_pgm, image_similarity, mean_similarity, render_page, GrayImage, RenderSpec, Similarity,
};
use storyboard_core::storyboard::{emit_storyboard_bundle, file_stem};
use storyboard_core::synth::DummyDataSpec;
use storyboard_core::{load_bundle, run_pipeline, AppBundle, PipelineOptions, Warning};

#[derive(Parser)]
#[command(
    name = "storyboard",
    version,
    about = "Generate app storyboards from decompiled bundles"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full pipeline and write storyboard.json with its pages.
    Build {
        bundle: PathBuf,
        #[arg(long)]
        corpus: Option<PathBuf>,
        #[arg(short, long)]
        out: PathBuf,
        #[command(flatten)]
        render: RenderArgs,
        #[arg(long, default_value_t = storyboard_core::infer::DEFAULT_THRESHOLD)]
        threshold: usize,
        /// Copy a built viewer into the output directory.
        #[arg(long)]
        viewer: Option<PathBuf>,
    },
    /// Extract the activity transition graph as JSON.
    ExtractAtg {
        bundle: PathBuf,
        /// Write here instead of stdout.
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Synthesize and render every page.
    Render {
        bundle: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
        #[command(flatten)]
        render: RenderArgs,
    },
    /// Infer names for obfuscated activities against a corpus.
    InferNames {
        bundle: PathBuf,
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long, default_value_t = storyboard_core::infer::DEFAULT_THRESHOLD)]
        threshold: usize,
    },
    /// Collect (activity name, layout tree) entries from bundles into a JSONL corpus.
    BuildCorpus {
        #[arg(required = true)]
        bundles: Vec<PathBuf>,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Compare two grayscale images (PGM or PNG), or two directories of them.
    EvalSimilarity { a: PathBuf, b: PathBuf },
}

#[derive(Args)]
struct RenderArgs {
    #[arg(long, default_value_t = 5)]
    dummy_rows: usize,
    /// Text for dummy rows; `{i}` becomes the row number.
    #[arg(long, default_value = "Item {i}")]
    dummy_text: String,
    /// Screen size in dp.
    #[arg(long, value_parser = parse_screen, default_value = "360x640")]
    screen: (u32, u32),
    /// Also write binary PGM rasters next to the SVGs.
    #[arg(long)]
    pgm: bool,
}

impl RenderArgs {
    fn options(&self, threshold: usize) -> Result<PipelineOptions> {
        let render = RenderSpec {
            screen_width_dp: self.screen.0,
            screen_height_dp: self.screen.1,
            ..RenderSpec::default()
        };
        render.validate()?;
        Ok(PipelineOptions {
            render,
            dummy: DummyDataSpec::new(self.dummy_rows, self.dummy_text.clone())?,
            inference: InferenceConfig {
                threshold,
                ..InferenceConfig::default()
            },
            rasters: self.pgm,
        })
    }
}

fn parse_screen(s: &str) -> Result<(u32, u32), String> {
    let (w, h) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected WxH, got {s:?}"))?;
    let w: u32 = w.trim().parse().map_err(|e| format!("width: {e}"))?;
    let h: u32 = h.trim().parse().map_err(|e| format!("height: {e}"))?;
    if w == 0 || h == 0 {
        return Err("screen dimensions must be positive".into());
    }
    Ok((w, h))
}

fn load(dir: &Path) -> Result<AppBundle> {
    load_bundle(dir).with_context(|| format!("loading bundle {}", dir.display()))
}

fn load_corpus(path: &Path) -> Result<Corpus> {
    Corpus::load(path).with_context(|| format!("loading corpus {}", path.display()))
}

fn log_warnings(warnings: &[Warning]) {
    for w in warnings {
        warn!("{w}");
    }
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match Cli::parse().command {
        Command::Build {
            bundle,
            corpus,
            out,
            render,
            threshold,
            viewer,
        } => {
            let started = Instant::now();
            let b = load(&bundle)?;
            let corpus = corpus.as_deref().map(load_corpus).transpose()?;
            let opts = render.options(threshold)?;
            let result = run_pipeline(&b, corpus.as_ref(), &opts);
            log_warnings(&result.warnings);
            let path = emit_storyboard_bundle(&result.bundle, &out, viewer.as_deref())
                .with_context(|| format!("writing {}", out.display()))?;
            info!(
                "{} activities, {} edges in {:.2?}",
                result.bundle.storyboard.nodes.len(),
                result.bundle.storyboard.edges.len(),
                started.elapsed()
            );
            println!("{}", path.display());
        }
        Command::ExtractAtg { bundle, out } => {
            let b = load(&bundle)?;
            let graph = extract_transitions(&b);
            log_warnings(&graph.warnings);
            let json = AtgDocument::new(&b.app_id, &graph, &BTreeMap::new()).to_json();
            match out {
                Some(path) => {
                    fs::write(&path, json).with_context(|| format!("writing {}", path.display()))?
                }
                None => print!("{json}"),
            }
        }
        Command::Render {
            bundle,
            out,
            render,
        } => {
            let b = load(&bundle)?;
            let opts = render.options(storyboard_core::infer::DEFAULT_THRESHOLD)?;
            let graph = extract_transitions(&b);
            let mut warnings = graph.warnings.clone();
            let (_, trees) = synthesize_pages(&b, &graph, &opts, &mut warnings);
            log_warnings(&warnings);
            let pages_dir = out.join("pages");
            fs::create_dir_all(&pages_dir)
                .with_context(|| format!("creating {}", pages_dir.display()))?;
            for (name, tree) in &trees {
                let page = render_page(tree, &opts.render, &b.resources, opts.rasters);
                let stem = file_stem(name);
                fs::write(pages_dir.join(format!("{stem}.svg")), &page.svg)?;
                if let Some(r) = &page.raster {
                    fs::write(pages_dir.join(format!("{stem}.pgm")), encode_pgm(r))?;
                }
            }
            println!("{} pages written to {}", trees.len(), pages_dir.display());
        }
        Command::InferNames {
            bundle,
            corpus,
            threshold,
        } => {
            let b = load(&bundle)?;
            let corpus = load_corpus(&corpus)?;
            let config = InferenceConfig {
                threshold,
                ..InferenceConfig::default()
            };
            let graph = extract_transitions(&b);
            let mut warnings = graph.warnings.clone();
            let (plain, _) =
                synthesize_pages(&b, &graph, &PipelineOptions::default(), &mut warnings);
            log_warnings(&warnings);
            let results = infer_names(&b, &graph, &plain, &corpus, &config);
            let list: Vec<_> = results.values().collect();
            println!("{}", serde_json::to_string_pretty(&list)?);
        }
        Command::BuildCorpus { bundles, out } => {
            let loaded = bundles
                .iter()
                .map(|p| load(p))
                .collect::<Result<Vec<_>>>()?;
            let corpus = build_corpus(loaded.iter());
            corpus
                .save(&out)
                .with_context(|| format!("writing {}", out.display()))?;
            println!("{} entries written to {}", corpus.len(), out.display());
        }
        Command::EvalSimilarity { a, b } => eval_similarity(&a, &b)?,
    }
    Ok(())
}

fn read_gray(path: &Path) -> Result<GrayImage> {
    Ok(image::open(path)
        .with_context(|| format!("reading {}", path.display()))?
        .to_luma8())
}

fn format_similarity(s: &Similarity) -> String {
    format!(
        "mae={:.4} mse={:.4} similarity={:.4}%",
        s.mae, s.mse, s.similarity_pct
    )
}

fn images_in(dir: &Path) -> Result<BTreeMap<String, PathBuf>> {
    let mut out = BTreeMap::new();
    for entry in fs::read_dir(dir).with_context(|| format!("listing {}", dir.display()))? {
        let path = entry?.path();
        let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("");
        if matches!(ext, "pgm" | "png") {
            if let Some(name) = path.file_name().and_then(|n| n.to_str()) {
                out.insert(name.to_string(), path.clone());
            }
        }
    }
    Ok(out)
}

fn eval_similarity(a: &Path, b: &Path) -> Result<()> {
    if a.is_dir() != b.is_dir() {
        bail!("compare two files or two directories, not one of each");
    }
    if !a.is_dir() {
        let s = image_similarity(&read_gray(a)?, &read_gray(b)?)?;
        println!("{}", format_similarity(&s));
        return Ok(());
    }
    let left = images_in(a)?;
    let right = images_in(b)?;
    let mut scores = Vec::new();
    for (name, pa) in &left {
        let Some(pb) = right.get(name) else {
            warn!("{name} has no counterpart in {}", b.display());
            continue;
        };
        let s = image_similarity(&read_gray(pa)?, &read_gray(pb)?)
            .with_context(|| format!("comparing {name}"))?;
        println!("{name} {}", format_similarity(&s));
        scores.push(s);
    }
    match mean_similarity(&scores) {
        Some(m) => println!("mean {}", format_similarity(&m)),
        None => bail!(
            "no matching images between {} and {}",
            a.display(),
            b.display()
        ),
    }
    Ok(())
}

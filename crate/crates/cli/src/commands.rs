use std::collections::HashSet;
use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use serde::Deserialize;
use xmodal::boc::{Assignment, BocConfig, SoftAssignment};
use xmodal::codebook::{
    build_pool, build_word_codebook, kmeans, load_codebook, read_word_list, write_codebook, Codebook, KmeansParams,
};
use xmodal::eval::{write_reports_csv, write_reports_json, EvalReport, Experiment};
use xmodal::features::{generate_synthetic, load_feature_pack, write_feature_pack, FeaturePack, SyntheticConfig};
use xmodal::index::{build_index_skipping_empty, load_index, save_index};
use xmodal::sparse::{read_vectors, write_vectors, EncodedVectors};
use xmodal::transform::{keep_for_sparsity, transform_pack, GlobalMethod, TransformConfig};
use xmodal::{Error, Exec, SparseVector};

use crate::config::{parse_list, require_file, RunConfig};
use crate::{CodebookArgs, CodebookKind, EvaluateArgs, QueryArgs, TransformArgs, TransformKind};

fn load_pack(path: &Path) -> Result<FeaturePack> {
    load_feature_pack(path).with_context(|| format!("loading {}", path.display()))
}

pub fn synth(config: &Path, out_dir: &Path) -> Result<()> {
    let text = fs::read_to_string(config).with_context(|| format!("reading {}", config.display()))?;
    let cfg = SyntheticConfig::from_json(&text).with_context(|| format!("parsing {}", config.display()))?;
    let (images, sentences) = generate_synthetic(&cfg)?;
    fs::create_dir_all(out_dir)?;
    write_feature_pack(&images, out_dir.join("images.xmfp"))?;
    write_feature_pack(&sentences, out_dir.join("sentences.xmfp"))?;
    println!("images: {} items, {} concepts", images.len(), images.concept_count());
    println!(
        "sentences: {} items, {} concepts",
        sentences.len(),
        sentences.concept_count()
    );
    Ok(())
}

pub fn codebook(args: CodebookArgs) -> Result<()> {
    let packs = args.packs.iter().map(|p| load_pack(p)).collect::<Result<Vec<_>>>()?;
    let refs: Vec<&FeaturePack> = packs.iter().collect();
    let cb = match args.method {
        CodebookKind::Kmeans => {
            let pool = build_pool(&refs, args.pool_size, args.exclude_stop_words, args.seed)?;
            eprintln!("pool: {} concepts", pool.len());
            let params = KmeansParams {
                seed: args.seed,
                max_iters: args.max_iters,
                tol: args.tol,
                exec: Exec::default(),
            };
            kmeans(&pool, args.p, &params)?
        }
        CodebookKind::Words => {
            let dictionary = match &args.dictionary {
                Some(path) => read_word_list(path).with_context(|| format!("reading {}", path.display()))?,
                // Without a dictionary every labelled concept qualifies.
                None => refs
                    .iter()
                    .flat_map(|p| p.items.iter())
                    .flat_map(|i| i.concepts.iter())
                    .filter_map(|c| c.word.clone())
                    .collect(),
            };
            let stop = match &args.stopwords {
                Some(path) => read_word_list(path).with_context(|| format!("reading {}", path.display()))?,
                None => HashSet::new(),
            };
            build_word_codebook(&refs, args.p, &dictionary, &stop)?
        }
    };
    write_codebook(&cb, &args.out)?;
    println!(
        "codebook: {} centroids of dim {} -> {}",
        cb.p(),
        cb.dim,
        args.out.display()
    );
    Ok(())
}

fn load_cb(path: Option<&Path>) -> Result<Codebook> {
    let path = path.ok_or_else(|| Error::Config("--codebook is required for BoC methods".into()))?;
    load_codebook(path).with_context(|| format!("loading {}", path.display()))
}

pub fn transform(args: TransformArgs) -> Result<()> {
    let pack = load_pack(&args.pack)?;
    let exec = Exec::default();
    let encoded: EncodedVectors = match args.method {
        TransformKind::Dp | TransformKind::Sq => {
            let method = match args.method {
                TransformKind::Dp => GlobalMethod::DeepPermutation,
                _ => GlobalMethod::ScalarQuantization { scale: args.scale },
            };
            let apply_crelu = !args.no_crelu;
            let cfg = match (args.keep_z, args.sparsity) {
                (_, Some(f)) => TransformConfig::with_sparsity(method, pack.dim, f, apply_crelu)?,
                (keep_z, None) => {
                    let mut cfg = TransformConfig::with_sparsity(method, pack.dim, 0.0, apply_crelu)?;
                    if let Some(z) = keep_z {
                        cfg.keep_z = z;
                    }
                    cfg
                }
            };
            transform_pack(&pack, &cfg, exec)?
        }
        TransformKind::BocHard | TransformKind::BocSoft => {
            let cb = load_cb(args.codebook.as_deref())?;
            let assignment = match args.method {
                TransformKind::BocHard => Assignment::Hard,
                _ => {
                    let row_keep_z = match (args.row_keep_z, args.sparsity) {
                        (Some(z), _) => z,
                        (None, Some(f)) => keep_for_sparsity(cb.p(), f)?,
                        (None, None) => cb.p(),
                    };
                    Assignment::Soft(SoftAssignment {
                        aggregation: args.aggregation.into(),
                        row_keep_z,
                        similarity: args.similarity.into(),
                    })
                }
            };
            let cfg = BocConfig {
                assignment,
                exclude_stop_words_at_indexing: args.exclude_stop_words,
            };
            xmodal::boc::encode_pack(&pack, &cb, &cfg, exec)?
        }
    };
    write_vectors(&encoded, &args.out)?;
    println!(
        "encoded {} items (dim {}), {} empty -> {}",
        encoded.vectors.len(),
        encoded.dim,
        encoded.empty_count(),
        args.out.display()
    );
    Ok(())
}

pub fn index(vectors: &Path, out: &Path) -> Result<()> {
    let set = read_vectors(vectors).with_context(|| format!("loading {}", vectors.display()))?;
    let (index, skipped) = build_index_skipping_empty(&set)?;
    for id in &skipped {
        eprintln!("skipped empty vector `{id}`");
    }
    save_index(&index, out)?;
    println!(
        "indexed {} items, skipped {} empty -> {}",
        index.len(),
        skipped.len(),
        out.display()
    );
    Ok(())
}

#[derive(Deserialize)]
struct VectorFile {
    dim: usize,
    entries: Vec<(u32, f64)>,
}

pub fn query(args: QueryArgs) -> Result<()> {
    let index = load_index(&args.index).with_context(|| format!("loading {}", args.index.display()))?;
    let q = match (&args.vectors, &args.id, &args.vector_file) {
        (Some(path), Some(id), _) => {
            let set = read_vectors(path).with_context(|| format!("loading {}", path.display()))?;
            set.get(id).cloned().ok_or_else(|| Error::UnknownId(id.clone()))?
        }
        (_, _, Some(path)) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let v: VectorFile = serde_json::from_str(&text).map_err(|e| Error::Format(e.to_string()))?;
            SparseVector::new(v.dim, v.entries)?
        }
        _ => unreachable!("clap enforces one query source"),
    };
    for (rank, (id, score)) in index.query_topk(&q, args.k)?.into_iter().enumerate() {
        println!("{}\t{id}\t{score:.6}", rank + 1);
    }
    Ok(())
}

fn apply_overrides(cfg: &mut RunConfig, args: &EvaluateArgs) -> Result<()> {
    if let Some(v) = &args.images {
        cfg.images = v.clone();
    }
    if let Some(v) = &args.sentences {
        cfg.sentences = v.clone();
    }
    if let Some(v) = args.method {
        cfg.method = v;
    }
    if let Some(v) = args.scale {
        cfg.scale = v;
    }
    if let Some(v) = args.sparsity {
        cfg.sparsity = v;
    }
    if let Some(v) = &args.sparsity_list {
        cfg.sparsity_list = parse_list(v).map_err(|e| Error::Config(format!("--sparsity-list {e}")))?;
    }
    if let Some(v) = &args.rm_list {
        cfg.rm_list = parse_list(v).map_err(|e| Error::Config(format!("--rm-list {e}")))?;
    }
    if let Some(v) = args.rerank_k {
        cfg.rerank_k = v;
    }
    if let Some(v) = &args.codebook {
        cfg.codebook = Some(v.clone());
    }
    if let Some(v) = args.aggregation {
        cfg.aggregation = v.into();
    }
    if let Some(v) = args.similarity {
        cfg.similarity = v.into();
    }
    cfg.exact_baseline |= args.exact_baseline;
    if let Some(v) = &args.out_json {
        cfg.out_json = v.clone();
    }
    if let Some(v) = &args.out_csv {
        cfg.out_csv = Some(v.clone());
    }
    Ok(())
}

/// Writes every report gathered so far, so a failing run still leaves its partial results.
fn flush(cfg: &RunConfig, reports: &[EvalReport]) -> Result<()> {
    write_reports_json(reports, &cfg.out_json)?;
    if let Some(csv) = &cfg.out_csv {
        write_reports_csv(reports, csv)?;
    }
    Ok(())
}

pub fn evaluate(args: EvaluateArgs) -> Result<()> {
    let mut cfg = RunConfig::load(&args.config)?;
    apply_overrides(&mut cfg, &args)?;
    cfg.check()?;
    require_file(&cfg.images, "image pack")?;
    require_file(&cfg.sentences, "sentence pack")?;
    let images = load_pack(&cfg.images)?;
    let sentences = load_pack(&cfg.sentences)?;

    let codebook = if !cfg.uses_codebook() {
        None
    } else if let Some(path) = &cfg.codebook {
        Some(load_cb(Some(path))?)
    } else {
        let pool = build_pool(
            &[&images, &sentences],
            cfg.pool_size,
            cfg.exclude_stop_words_codebook,
            cfg.seed,
        )?;
        let params = KmeansParams {
            seed: cfg.seed,
            ..KmeansParams::default()
        };
        eprintln!("building codebook: p={} from {} pooled concepts", cfg.p, pool.len());
        Some(kmeans(&pool, cfg.p, &params)?)
    };

    let exp = Experiment::new(&images, &sentences, cfg.method_spec(), codebook.as_ref())?
        .with_ks(&cfg.ks)
        .with_hit_rule(cfg.hit_rule);
    let mut reports: Vec<EvalReport> = Vec::new();
    let outcome = (|| -> Result<()> {
        if cfg.exact_baseline {
            reports.extend(exp.exact_baseline()?);
            flush(&cfg, &reports)?;
        }
        for f in cfg.levels() {
            let reps = exp.evaluate(f)?;
            for r in &reps {
                eprintln!("{} {} f={f}: {:?}", r.method, r.task.name(), r.recall);
            }
            reports.extend(reps);
            flush(&cfg, &reports)?;
            if !cfg.rm_list.is_empty() {
                reports.extend(exp.rerank_curve(f, &cfg.rm_list, cfg.rerank_k)?);
                flush(&cfg, &reports)?;
            }
        }
        Ok(())
    })();
    if outcome.is_err() {
        // Best effort; the original error is what matters.
        let _ = flush(&cfg, &reports);
    }
    outcome?;
    println!("{} reports -> {}", reports.len(), cfg.out_json.display());
    Ok(())
}

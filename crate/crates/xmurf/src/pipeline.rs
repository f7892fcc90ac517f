//! One function per pipeline step. Every step reads and writes files only.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use xmurf_core::classify::{fit_classifier, oob_thresholds, predict_all};
use xmurf_core::ordering::{
    apply_cluster_ranges, heatmap_ppm, ranges_from_clusters, reorder, seriate,
};
use xmurf_core::scenario::{detect_scenarios, extract_all, feature_names};
use xmurf_core::sim::run_simulation;
use xmurf_core::xmurf::{fit, proximity_matrix};
use xmurf_core::{Dataset, FeatureVector};

use crate::config::PipelineConfig;
use crate::error::{Error, Result};
use crate::io::{self, MatrixFormat, Model, Permutation};

/// Runs the configured number of simulations; run `k` is written to
/// `out_dir/trace_{k}.jsonl`.
pub fn simulate(cfg: &PipelineConfig, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let traces = (0..cfg.sim.runs)
        .into_par_iter()
        .map(|k| run_simulation(&cfg.road, &cfg.sim_config(k)))
        .collect::<Result<Vec<_>, _>>()?;
    let mut paths = Vec::with_capacity(traces.len());
    for (k, trace) in traces.iter().enumerate() {
        let path = out_dir.join(format!("trace_{k}.jsonl"));
        io::save_trace(trace, &path)?;
        log::info!(
            "run {k}: {} vehicles, {} collisions -> {}",
            trace.n_vehicles(),
            trace.collisions().len(),
            path.display()
        );
        paths.push(path);
    }
    Ok(paths)
}

/// Trace files (`*.jsonl`) in `dir`, sorted by run index, then name.
pub fn trace_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let entries = std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == "jsonl"))
        .collect();
    let run = |p: &PathBuf| {
        p.file_stem()
            .and_then(|s| s.to_str())
            .and_then(|s| s.rsplit('_').next())
            .and_then(|s| s.parse::<u64>().ok())
            .unwrap_or(u64::MAX)
    };
    files.sort_by(|a, b| run(a).cmp(&run(b)).then(a.cmp(b)));
    Ok(files)
}

/// Per-scenario provenance written next to the scenario table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioMeta {
    pub id: String,
    pub trace: String,
    pub ego_id: usize,
    pub t_start: usize,
    pub t_end: usize,
    pub thw_min: f64,
}

/// Detects scenarios in every trace and writes one feature row per scenario
/// to `out`, with ids `<trace stem>_v<ego>_t<start>`. Returns the row count.
pub fn extract(traces: &[PathBuf], out: &Path) -> Result<usize> {
    let mut ids = Vec::new();
    let mut rows: Vec<FeatureVector> = Vec::new();
    let mut meta = Vec::new();
    for path in traces {
        let trace = io::load_trace(path)?;
        let stem = path
            .file_stem()
            .and_then(|s| s.to_str())
            .ok_or_else(|| Error::input(path, "file name is not valid UTF-8"))?;
        let scenarios = detect_scenarios(&trace);
        rows.extend(extract_all(&scenarios, &trace));
        for sc in &scenarios {
            let id = format!("{stem}_v{}_t{}", sc.ego, sc.t_start);
            meta.push(ScenarioMeta {
                id: id.clone(),
                trace: stem.to_string(),
                ego_id: sc.ego,
                t_start: sc.t_start,
                t_end: sc.t_end,
                thw_min: sc.thw_min,
            });
            ids.push(id);
        }
        log::info!("{}: {} scenarios", path.display(), scenarios.len());
    }
    if rows.is_empty() {
        return Err(Error::Empty(format!(
            "no scenarios found in {} trace file(s)",
            traces.len()
        )));
    }
    let data = Dataset::new(ids, feature_names(), rows)?;
    io::save_dataset(&data, out)?;
    io::write_json(&out.with_extension("meta.json"), &meta)?;
    Ok(data.len())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterOutput {
    pub matrix: PathBuf,
    pub matrix_csv: PathBuf,
    pub forest: PathBuf,
}

/// Fits the unsupervised forest on `scenarios` and writes the proximity
/// matrix (raw and CSV) and the forest to `out_dir`.
pub fn cluster(cfg: &PipelineConfig, scenarios: &Path, out_dir: &Path) -> Result<ClusterOutput> {
    let data = io::load_dataset(scenarios)?;
    let forest = fit(&data, cfg.xmurf.trees, cfg.xmurf_seed())?;
    let p = proximity_matrix(&forest, &data)?;
    let out = ClusterOutput {
        matrix: out_dir.join("proximity.bin"),
        matrix_csv: out_dir.join("proximity.csv"),
        forest: out_dir.join("forest.json"),
    };
    io::save_matrix(&p, &out.matrix, MatrixFormat::Raw)?;
    io::save_matrix(&p, &out.matrix_csv, MatrixFormat::Csv)?;
    io::save_forest(&forest, &out.forest)?;
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrderOutput {
    pub seriated: PathBuf,
    pub heatmap: PathBuf,
    pub dendrogram: PathBuf,
    pub permutation: PathBuf,
    pub ranges: Option<PathBuf>,
}

/// Seriates a proximity matrix and writes the reordered matrix, its heatmap,
/// the dendrogram and the permutation; with `ordering.suggest = k` also
/// cluster ranges from a cut into `k` clusters.
pub fn order(cfg: &PipelineConfig, matrix: &Path, out_dir: &Path) -> Result<OrderOutput> {
    let p = io::load_matrix(matrix, MatrixFormat::from_path(matrix))?;
    let (dendrogram, order) = seriate(&p, cfg.ordering.linkage, cfg.ordering.optimal)?;
    let seriated = reorder(&p, &order)?;
    let out = OrderOutput {
        seriated: out_dir.join("seriated.bin"),
        heatmap: out_dir.join("heatmap.ppm"),
        dendrogram: out_dir.join("dendrogram.json"),
        permutation: out_dir.join("permutation.json"),
        ranges: cfg.ordering.suggest.map(|_| out_dir.join("ranges.json")),
    };
    io::save_matrix(&seriated, &out.seriated, MatrixFormat::Raw)?;
    io::write_bytes(&out.heatmap, &heatmap_ppm(&seriated))?;
    io::save_dendrogram(&dendrogram, &out.dendrogram)?;
    io::save_permutation(
        &Permutation {
            ids: seriated.ids().to_vec(),
            order: order.clone(),
        },
        &out.permutation,
    )?;
    if let (Some(k), Some(path)) = (cfg.ordering.suggest, &out.ranges) {
        let labels = dendrogram.cut(k);
        let ranges = ranges_from_clusters(&order, &labels, cfg.ordering.min_size);
        io::save_ranges(&ranges, path)?;
    }
    Ok(out)
}

/// Heatmap of a matrix, optionally seriated by a stored permutation.
pub fn render(matrix: &Path, permutation: Option<&Path>, out: &Path) -> Result<()> {
    let mut p = io::load_matrix(matrix, MatrixFormat::from_path(matrix))?;
    if let Some(path) = permutation {
        let perm = io::load_permutation(path)?;
        if perm.order.len() != p.len() {
            return Err(Error::input(path, format!("permutation of {} for an M = {} matrix", perm.order.len(), p.len())));
        }
        p = reorder(&p, &perm.order)?;
    }
    io::write_bytes(out, &heatmap_ppm(&p))
}

/// Labels scenarios covered by cluster ranges over the seriated order;
/// uncovered scenarios are left out. Returns the labelled row count.
pub fn label(scenarios: &Path, permutation: &Path, ranges: &Path, out: &Path) -> Result<usize> {
    let data = io::load_dataset(scenarios)?;
    let perm = io::load_permutation(permutation)?;
    if perm.order.len() != data.len() {
        return Err(Error::input(
            permutation,
            format!("permutation of {} for {} scenarios", perm.order.len(), data.len()),
        ));
    }
    if let Some(k) = (0..perm.order.len()).find(|&k| perm.ids[k] != data.ids()[perm.order[k]]) {
        return Err(Error::input(
            permutation,
            format!("position {k} names {:?}, the scenario table has {:?}", perm.ids[k], data.ids()[perm.order[k]]),
        ));
    }
    let r = io::load_ranges(ranges)?;
    let labeled = apply_cluster_ranges(&data, &perm.order, &r).map_err(|e| Error::input(ranges, e))?;
    if labeled.is_empty() {
        return Err(Error::Empty("cluster ranges cover no scenario".into()));
    }
    io::save_labeled(&labeled, out)?;
    Ok(labeled.len())
}

/// Trains the classifier and its out-of-bag thresholds.
pub fn train(cfg: &PipelineConfig, labeled: &Path, out: &Path) -> Result<Model> {
    let data = io::load_labeled(labeled)?;
    let forest = fit_classifier(&data, cfg.classify.trees, cfg.classify_seed())?;
    let thresholds = oob_thresholds(&forest, &data)?;
    let model = Model {
        forest,
        thresholds,
        feature_names: data.base().feature_names().to_vec(),
    };
    io::save_model(&model, out)?;
    Ok(model)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifySummary {
    pub rows: usize,
    pub assigned: usize,
}

/// Classifies every row of `input` (a label column, if present, is ignored)
/// and writes the predictions CSV.
pub fn classify(model: &Path, input: &Path, ratio: f64, out: &Path) -> Result<ClassifySummary> {
    if !(ratio >= 0.0) {
        return Err(Error::Config(format!("ratio {ratio} must be non-negative")));
    }
    let model_data = io::load_model(model)?;
    let (data, _) = io::load_table(input)?;
    if data.feature_names() != model_data.feature_names.as_slice() {
        return Err(Error::input(input, "feature columns differ from the model's training data"));
    }
    let predictions = predict_all(&model_data.forest, &model_data.thresholds, &data, ratio)?;
    io::save_predictions(data.ids(), &predictions, out)?;
    Ok(ClassifySummary {
        rows: predictions.len(),
        assigned: predictions.iter().filter(|p| p.assigned).count(),
    })
}

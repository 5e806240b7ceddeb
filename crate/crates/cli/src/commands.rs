use std::collections::HashMap;
use std::path::{Path, PathBuf};

use bridgeness::embedding::{train_deepwalk, train_line};
use bridgeness::eval::{make_split_stratified, markdown_table, ni_metric, pc_metric, spearman, EvalReport, MlpConfig};
use bridgeness::explain::{
    bridgeness_scores, default_m, degree_scores, graph_gd_scores, graph_wgd_scores, ppr_scores,
};
use bridgeness::graph::{load_edge_list, perturb};
use bridgeness::spectral::spectral_clustering_embedding;
use bridgeness::verify::{self, Suite, VerifyOptions};
use bridgeness::{ClusterAssignment, EmbeddingMatrix, Execution, Graph, ScoreVector};
use log::info;
use ndarray::Axis;
use serde::Serialize;

use crate::config::{Method, Metric, Model, RunConfig};
use crate::manifest::Manifest;
use crate::CliError;

pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))
}

fn out_dir(cfg: &RunConfig) -> Result<PathBuf, CliError> {
    let dir = cfg.out.clone().unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&dir).map_err(|e| CliError::Usage(format!("cannot create {}: {e}", dir.display())))?;
    Ok(dir)
}

fn graph_path(cfg: &RunConfig) -> Result<&Path, CliError> {
    cfg.graph.as_deref().ok_or_else(|| CliError::Usage("--graph is required".into()))
}

fn load_graph(cfg: &RunConfig) -> Result<(PathBuf, Graph), CliError> {
    let path = graph_path(cfg)?;
    let g = load_edge_list(path, cfg.weighted)?;
    if g.num_nodes() == 0 {
        return Err(CliError::Usage(format!("{} contains no edges", path.display())));
    }
    info!("loaded {}: {} nodes, {} edges", path.display(), g.num_nodes(), g.num_edges());
    Ok((path.to_path_buf(), g))
}

fn labels_of(g: &Graph) -> Vec<String> {
    (0..g.num_nodes()).map(|v| g.label(v)).collect()
}

fn train(g: &Graph, cfg: &RunConfig, seed: u64) -> bridgeness::Result<EmbeddingMatrix> {
    let tc = cfg.train.with_seed(seed);
    match cfg.model {
        Model::Deepwalk => train_deepwalk(g, &tc),
        Model::Line => train_line(g, &tc),
    }
}

/// Read an embedding CSV and put its rows in the graph's node order.
fn read_embedding(path: &Path, g: &Graph) -> Result<EmbeddingMatrix, CliError> {
    let (emb, nodes) = EmbeddingMatrix::read_csv(path)?;
    let index: HashMap<&str, usize> = nodes.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
    let order = (0..g.num_nodes())
        .map(|v| {
            let label = g.label(v);
            index
                .get(label.as_str())
                .copied()
                .ok_or_else(|| CliError::Usage(format!("{}: no row for node {label}", path.display())))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(EmbeddingMatrix::from_target(emb.target().select(Axis(0), &order)))
}

/// `node,label` rows (an optional `node,label` header is skipped). Class names
/// become ids in order of first appearance.
fn read_labels(path: &Path, g: &Graph) -> Result<(Vec<usize>, Vec<String>), CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| CliError::Usage(format!("cannot read labels {}: {e}", path.display())))?;
    let index = g.label_index();
    let mut classes: Vec<String> = Vec::new();
    let mut labels = vec![None; g.num_nodes()];
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        if rec.len() != 2 {
            return Err(CliError::Usage(format!("{}:{}: expected node,label", path.display(), i + 1)));
        }
        if i == 0 && &rec[0] == "node" && &rec[1] == "label" {
            continue;
        }
        let Some(&v) = index.get(&rec[0]) else {
            return Err(CliError::Usage(format!("{}:{}: unknown node {:?}", path.display(), i + 1, &rec[0])));
        };
        let class = classes.iter().position(|c| c == &rec[1]).unwrap_or_else(|| {
            classes.push(rec[1].to_string());
            classes.len() - 1
        });
        labels[v] = Some(class);
    }
    let missing: Vec<String> = (0..g.num_nodes()).filter(|&v| labels[v].is_none()).map(|v| g.label(v)).take(5).collect();
    if !missing.is_empty() {
        return Err(CliError::Usage(format!("{}: no label for node(s) {}", path.display(), missing.join(", "))));
    }
    Ok((labels.into_iter().map(Option::unwrap).collect(), classes))
}

fn clusters(emb: &EmbeddingMatrix, cfg: &RunConfig, seed: u64) -> bridgeness::Result<ClusterAssignment> {
    spectral_clustering_embedding(emb.target().view(), cfg.k, seed)
}

struct Context<'a> {
    g: &'a Graph,
    cfg: &'a RunConfig,
    seed: u64,
    emb: &'a EmbeddingMatrix,
    clusters: &'a ClusterAssignment,
    labels: Option<&'a [usize]>,
}

fn score(method: Method, cx: &Context<'_>) -> Result<ScoreVector, CliError> {
    let (g, cfg, seed) = (cx.g, cx.cfg, cx.seed);
    let exec = Execution::Parallel;
    Ok(match method {
        Method::GraphGd => graph_gd_scores(g, cx.emb, cfg.psi, seed, exec)?,
        Method::GraphWgd => graph_wgd_scores(g, cx.emb, cfg.psi, cfg.variant, seed, exec)?,
        Method::Bridgeness => bridgeness_scores(g, cx.clusters)?,
        Method::Degree => degree_scores(g),
        Method::Ppr => ppr_scores(g)?,
        Method::Greedy => {
            let labels = cx.labels.ok_or_else(|| CliError::Usage("method greedy needs --labels".into()))?;
            let split = make_split_stratified(g, labels, seed)?;
            let embed = |h: &Graph, s: u64| train(h, cfg, s);
            let mlp = MlpConfig::default();
            bridgeness::eval::greedy_scores(g, labels, &split, &embed, cx.clusters, cfg.alpha, seed, &mlp, exec)?
        }
    })
}

pub fn embed(cfg: &RunConfig) -> Result<(), CliError> {
    let (path, g) = load_graph(cfg)?;
    let dir = out_dir(cfg)?;
    let mut manifest = Manifest::new("embed", cfg).with_graph(&path, &g)?;
    let labels = labels_of(&g);
    for &seed in &cfg.seeds {
        let emb = train(&g, cfg, seed)?;
        let name = if cfg.seeds.len() == 1 { "embedding.csv".to_string() } else { format!("embedding_seed{seed}.csv") };
        emb.write_csv(dir.join(&name), Some(&labels))?;
        info!("wrote {name} ({} x {})", emb.rows(), emb.dim());
        manifest.outputs.push(name);
    }
    manifest.write(&dir)
}

#[derive(Serialize)]
struct Explanation<'a> {
    method: String,
    q: usize,
    seed: u64,
    top_nodes: Vec<String>,
    top_scores: Vec<f64>,
    scores_path: String,
    config: &'a RunConfig,
}

pub fn explain(cfg: &RunConfig) -> Result<(), CliError> {
    let (path, g) = load_graph(cfg)?;
    let dir = out_dir(cfg)?;
    let mut manifest = Manifest::new("explain", cfg).with_graph(&path, &g)?;
    let seed = cfg.seeds[0];
    let emb = match &cfg.embedding {
        Some(p) => {
            manifest.input(p)?;
            read_embedding(p, &g)?
        }
        None => train(&g, cfg, seed)?,
    };
    let labels = match &cfg.labels {
        Some(p) => {
            manifest.input(p)?;
            Some(read_labels(p, &g)?.0)
        }
        None => None,
    };
    let clusters = clusters(&emb, cfg, seed)?;
    let names = labels_of(&g);
    let cx = Context { g: &g, cfg, seed, emb: &emb, clusters: &clusters, labels: labels.as_deref() };
    let mut reports = Vec::new();
    for &method in &cfg.methods {
        let scores = score(method, &cx)?;
        let scores_path = format!("scores_{method}.csv");
        scores.write_csv(dir.join(&scores_path), Some(&names))?;
        let top = scores.top_q(cfg.q);
        reports.push(Explanation {
            method: method.to_string(),
            q: cfg.q,
            seed,
            top_nodes: top.iter().map(|&v| names[v].clone()).collect(),
            top_scores: top.iter().map(|&v| scores.score(v)).collect(),
            scores_path: scores_path.clone(),
            config: cfg,
        });
        manifest.outputs.push(scores_path);
        println!("{method}: top {} = [{}]", top.len(), reports.last().unwrap().top_nodes.join(", "));
    }
    let json = if reports.len() == 1 {
        serde_json::to_string_pretty(&reports[0])
    } else {
        serde_json::to_string_pretty(&reports)
    }
    .map_err(|e| CliError::Runtime(e.to_string()))?;
    write_text(&dir.join("explanation.json"), &json)?;
    manifest.outputs.push("explanation.json".into());
    manifest.write(&dir)
}

pub fn evaluate(cfg: &RunConfig) -> Result<(), CliError> {
    let (path, g) = load_graph(cfg)?;
    let metrics = cfg.metrics.clone().unwrap_or_else(|| {
        let mut m = vec![Metric::Spearman, Metric::Ni];
        if cfg.labels.is_some() {
            m.push(Metric::Pc);
        }
        m
    });
    let wants = |m: Metric| metrics.contains(&m);
    if (wants(Metric::Pc) || cfg.methods.contains(&Method::Greedy)) && cfg.labels.is_none() {
        return Err(CliError::Usage("prediction change and the greedy method need --labels".into()));
    }
    let dir = out_dir(cfg)?;
    let mut manifest = Manifest::new("evaluate", cfg).with_graph(&path, &g)?;
    let labels = match &cfg.labels {
        Some(p) => {
            manifest.input(p)?;
            Some(read_labels(p, &g)?.0)
        }
        None => None,
    };
    let m = cfg.m.unwrap_or_else(|| default_m(g.num_nodes()));
    let config = serde_json::to_value(cfg).map_err(|e| CliError::Runtime(e.to_string()))?;
    let mut reports: Vec<EvalReport> =
        cfg.methods.iter().map(|m| EvalReport::new(m.to_string(), config.clone(), cfg.seeds.clone())).collect();
    let runs = cfg.seeds.len() as f64;
    let embed = |h: &Graph, s: u64| train(h, cfg, s);
    for &seed in &cfg.seeds {
        info!("seed {seed}");
        let emb = train(&g, cfg, seed)?;
        let clusters = clusters(&emb, cfg, seed)?;
        let reference = bridgeness_scores(&g, &clusters)?;
        let split = match &labels {
            Some(l) if wants(Metric::Pc) => Some(make_split_stratified(&g, l, seed)?),
            _ => None,
        };
        let cx = Context { g: &g, cfg, seed, emb: &emb, clusters: &clusters, labels: labels.as_deref() };
        for (report, &method) in reports.iter_mut().zip(&cfg.methods) {
            let scores = score(method, &cx)?;
            if wants(Metric::Spearman) {
                let rho = spearman(&scores, &reference)?;
                *report.spearman.get_or_insert(0.0) += rho / runs;
            }
            for &z in &cfg.z {
                if wants(Metric::Ni) {
                    let ni = ni_metric(&g, &scores, z, &embed, &clusters, cfg.alpha, m, &[seed])?;
                    *report.ni.entry(EvalReport::key(z)).or_insert(0.0) += ni / runs;
                }
                if let (Some(split), Some(l)) = (&split, &labels) {
                    let mlp = MlpConfig::default();
                    let pc = pc_metric(&g, l, split, &scores, z, &embed, &clusters, cfg.alpha, &[seed], &mlp)?;
                    *report.pc.entry(EvalReport::key(z)).or_insert(0.0) += pc / runs;
                }
            }
        }
    }
    let json = serde_json::to_string_pretty(&reports).map_err(|e| CliError::Runtime(e.to_string()))?;
    write_text(&dir.join("report.json"), &json)?;
    let table = markdown_table(&reports);
    write_text(&dir.join("report.md"), &table)?;
    print!("{table}");
    manifest.outputs.extend(["report.json".to_string(), "report.md".to_string()]);
    manifest.write(&dir)
}

/// Runs the property suites; `Ok(false)` when any suite fails.
pub fn verify(cfg: &RunConfig) -> Result<bool, CliError> {
    let suites = if cfg.suites.is_empty() { Suite::all().to_vec() } else { cfg.suites.clone() };
    let opts = VerifyOptions { instances: cfg.instances, seed: cfg.seeds[0], execution: Execution::Parallel };
    let report = verify::run_suites(&suites, &opts)?;
    for s in &report.suites {
        eprintln!("{:<13} {} ({:.2}s)", s.suite.name(), if s.passed { "pass" } else { "FAIL" }, s.seconds);
        for c in s.checks.iter().filter(|c| !c.ok()) {
            eprintln!("    {}: {}/{} (need {})", c.name, c.passed, c.total, c.required);
        }
    }
    let json = report.to_json()?;
    println!("{json}");
    if cfg.out.is_some() {
        let dir = out_dir(cfg)?;
        write_text(&dir.join("verify.json"), &json)?;
        let mut manifest = Manifest::new("verify", cfg);
        manifest.outputs.push("verify.json".into());
        manifest.write(&dir)?;
    }
    Ok(report.passed)
}

/// Raw material for external plotting: the embedding, its clusters with
/// bridgeness, the edge list with an inter-cluster flag and, with
/// `--perturb NODE`, the perturbation of that node.
pub fn export(cfg: &RunConfig) -> Result<(), CliError> {
    let (path, g) = load_graph(cfg)?;
    let dir = out_dir(cfg)?;
    let mut manifest = Manifest::new("export", cfg).with_graph(&path, &g)?;
    let seed = cfg.seeds[0];
    let emb = match &cfg.embedding {
        Some(p) => {
            manifest.input(p)?;
            read_embedding(p, &g)?
        }
        None => train(&g, cfg, seed)?,
    };
    let c = clusters(&emb, cfg, seed)?;
    let names = labels_of(&g);
    let bridge = bridgeness_scores(&g, &c)?;
    emb.write_csv(dir.join("embedding.csv"), Some(&names))?;

    let csv_err = |e: csv::Error| CliError::Usage(e.to_string());
    let mut w = csv::Writer::from_path(dir.join("clusters.csv")).map_err(csv_err)?;
    w.write_record(["node", "cluster", "bridgeness"]).map_err(csv_err)?;
    for (v, name) in names.iter().enumerate() {
        w.write_record([name.clone(), c.cluster_of(v).to_string(), bridge.score(v).to_string()]).map_err(csv_err)?;
    }
    w.flush().map_err(|e| CliError::Usage(e.to_string()))?;

    let write_edges = |file: &str, h: &Graph| -> Result<(), CliError> {
        let mut w = csv::Writer::from_path(dir.join(file)).map_err(csv_err)?;
        w.write_record(["source", "target", "weight", "inter_cluster"]).map_err(csv_err)?;
        for (u, v, wt) in h.edges() {
            let inter = c.cluster_of(u) != c.cluster_of(v);
            w.write_record([names[u].clone(), names[v].clone(), wt.to_string(), inter.to_string()]).map_err(csv_err)?;
        }
        w.flush().map_err(|e| CliError::Usage(e.to_string()))
    };
    write_edges("edges.csv", &g)?;
    manifest.outputs.extend(["embedding.csv", "clusters.csv", "edges.csv"].map(String::from));

    if let Some(node) = &cfg.perturb {
        let v = g.node_index(node).ok_or_else(|| CliError::Usage(format!("--perturb: unknown node {node:?}")))?;
        let (gp, record) = perturb(&g, v, cfg.alpha, &c, seed)?;
        write_edges("perturbed_edges.csv", &gp)?;
        write_text(&dir.join("perturbation.json"), &record.to_json()?)?;
        info!("perturbed node {node}: {} edge(s) removed", record.removed_edges.len());
        manifest.outputs.extend(["perturbed_edges.csv", "perturbation.json"].map(String::from));
    }
    manifest.write(&dir)
}

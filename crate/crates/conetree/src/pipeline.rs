//! The end-to-end run: generate, build and separate a characteristic
//! sequence, build the trees, embed the cone grid, check the radial bound
//! and fit quasi-isometry constants.
//!
//! Each stage re-checks what it is handed before using it, so a corrupted
//! intermediate is caught at the next stage rather than passed along.

use std::collections::BTreeMap;
use std::path::Path;

use conetree_core::charseq::{
    build_base, separate_unverified, verify_char_seq, CharSequence, PreconditionPolicy, PropertyReport,
};
use conetree_core::cone::{build_grid, ConeGrid};
use conetree_core::metric::FiniteMetricSpace;
use conetree_core::qi::{fit_qi, tree_twice_delta, QiFit};
use conetree_core::tree::{build_tree, embed_grid, radial_check, ProductEmbedding, RootedTree};
use conetree_core::Error as CoreError;
use serde::{Deserialize, Serialize};

use crate::config::PipelineConfig;
use crate::error::{AtStage, Error, Result, Stage};
use crate::formats::{self, fin, CharSeqFile, PropertyReportFile, SpaceFile, TreeFile};

pub const QIREPORT_FORMAT: &str = "conetree-qireport-v1";
pub const TIE_RULE: &str = "nearest member, ties to the smallest member index";

/// Λ values at which σ is also reported.
pub const SIGMA_PROFILE: [f64; 6] = [1.0, 2.0, 5.0, 10.0, 20.0, 50.0];

// ---------------------------------------------------------------- stages

pub fn stage_generate(config: &PipelineConfig) -> Result<FiniteMetricSpace> {
    config.validate()?;
    config.generator.generate(config.seed)
}

/// `build_base` followed by the shrink-and-merge recursion; the result is
/// not yet verified.
pub fn stage_separate(space: &FiniteMetricSpace, config: &PipelineConfig) -> Result<CharSequence> {
    let base = build_base(space, config.r, config.colors, config.depth, config.strategy()?, config.delta)
        .at(Stage::Base)?;
    let policy = if config.strict {
        PreconditionPolicy::Enforce
    } else {
        PreconditionPolicy::Certify
    };
    separate_unverified(space, &base, policy).at(Stage::Separate)
}

/// Properties (1)–(3) against the sequence's declared constants.
pub fn stage_verify(space: &FiniteMetricSpace, seq: &CharSequence) -> Result<PropertyReport> {
    let report = verify_char_seq(space, seq);
    if report.passed() {
        Ok(report)
    } else {
        Err(Error::check(Stage::Verify, report.summary()))
    }
}

fn check_sequence_shape(space: &FiniteMetricSpace, seq: &CharSequence, stage: Stage) -> Result<()> {
    if seq.depth() == 0 || seq.colors() == 0 {
        return Err(Error::check(stage, "empty sequence"));
    }
    for (j, cov) in seq.levels.iter().enumerate() {
        if cov.colors() != seq.colors() {
            return Err(Error::check(stage, format!("level {} has {} colors", j + 1, cov.colors())));
        }
        if cov.members().any(|(_, _, m)| m.universe() != space.len()) {
            return Err(Error::check(stage, format!("level {} has members over another space", j + 1)));
        }
        if !cov.is_covering(space) {
            return Err(Error::check(stage, format!("level {} does not cover the space", j + 1)));
        }
    }
    Ok(())
}

/// One tree per color, each checked for validity and `δ = 0`.
pub fn stage_trees(space: &FiniteMetricSpace, seq: &CharSequence) -> Result<Vec<(RootedTree, u32)>> {
    check_sequence_shape(space, seq, Stage::Trees)?;
    (0..seq.colors())
        .map(|a| {
            let tree = build_tree(seq, a).at(Stage::Trees)?;
            tree.validate(seq).at(Stage::Trees)?;
            let twice = tree_twice_delta(&tree).at(Stage::Trees)?;
            if twice != 0 {
                return Err(Error::check(Stage::Trees, format!("tree {a} has δ = {}", twice as f64 / 2.0)));
            }
            Ok((tree, twice))
        })
        .collect()
}

pub fn stage_grid(space: &FiniteMetricSpace, config: &PipelineConfig) -> Result<ConeGrid> {
    build_grid(space, config.r, config.depth).at(Stage::Grid)
}

pub fn stage_embed(
    space: &FiniteMetricSpace,
    grid: &ConeGrid,
    seq: &CharSequence,
    trees: Vec<RootedTree>,
) -> Result<ProductEmbedding> {
    check_sequence_shape(space, seq, Stage::Embed)?;
    if trees.len() != seq.colors() {
        return Err(Error::check(Stage::Embed, format!("{} trees for {} colors", trees.len(), seq.colors())));
    }
    for t in &trees {
        t.validate(seq).at(Stage::Embed)?;
    }
    let emb = embed_grid(space, grid, seq, trees).at(Stage::Embed)?;
    // Each color class is a λ r^j-net, so images are that close.
    if emb.nearest_ratio > seq.lambda * (1.0 + 1e-12) {
        return Err(Error::check(
            Stage::Embed,
            format!("nearest member at {} r^j, beyond λ = {}", emb.nearest_ratio, seq.lambda),
        ));
    }
    Ok(emb)
}

fn check_table(grid: &ConeGrid, emb: &ProductEmbedding, stage: Stage) -> Result<()> {
    if emb.table.len() != grid.len() {
        return Err(Error::check(stage, format!("{} rows for {} grid points", emb.table.len(), grid.len())));
    }
    for (x, row) in emb.table.iter().enumerate() {
        let (level, _) = grid.locate(x).at(stage)?;
        if row.len() != emb.colors() {
            return Err(Error::check(stage, format!("row {x} has {} images", row.len())));
        }
        for (a, (&v, tree)) in row.iter().zip(&emb.trees).enumerate() {
            if v >= tree.len() || tree.level(v) != level {
                return Err(Error::check(
                    stage,
                    format!("point {x} (level {level}) maps to vertex {v} of tree {a}, not a level-{level} vertex"),
                ));
            }
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialSummary {
    pub checks: usize,
    pub failures: usize,
    /// Smallest `(M + 1)|A| − (j − i + 1)`.
    pub min_slack: i64,
    pub first_failure: Option<String>,
}

/// `M + 1 ≥ (j − i + 1)/|A|` for every grid point and every `i ≤ j`.
pub fn stage_radial(grid: &ConeGrid, emb: &ProductEmbedding) -> Result<RadialSummary> {
    check_table(grid, emb, Stage::Radial)?;
    let colors = emb.colors().max(1) as i64;
    let mut summary = RadialSummary {
        checks: 0,
        failures: 0,
        min_slack: i64::MAX,
        first_failure: None,
    };
    for x in 1..grid.len() {
        let (level, _) = grid.locate(x).at(Stage::Radial)?;
        for i in 0..=level {
            summary.checks += 1;
            match radial_check(emb, grid, x, i) {
                Ok(w) => {
                    let slack = (w.m as i64 + 1) * colors - (level - i + 1) as i64;
                    summary.min_slack = summary.min_slack.min(slack);
                }
                Err(e @ CoreError::Radial { best, .. }) => {
                    let slack = (best as i64 + 1) * colors - (level - i + 1) as i64;
                    summary.min_slack = summary.min_slack.min(slack);
                    summary.failures += 1;
                    summary.first_failure.get_or_insert_with(|| e.to_string());
                }
                Err(e) => return Err(e).at(Stage::Radial),
            }
        }
    }
    if summary.checks == 0 {
        summary.min_slack = 0;
    }
    if summary.failures > 0 {
        return Err(Error::check(
            Stage::Radial,
            format!("{} of {} checks fail; first: {}", summary.failures, summary.checks, summary.first_failure.as_deref().unwrap_or("")),
        ));
    }
    Ok(summary)
}

/// The pair `(x, y)`, `x < y`, at position `k` of the row-major listing.
pub fn pair_at(n: usize, mut k: usize) -> (usize, usize) {
    let mut x = 0;
    while k >= n - 1 - x {
        k -= n - 1 - x;
        x += 1;
    }
    (x, x + 1 + k)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairWitness {
    pub x: usize,
    pub y: usize,
    pub d_source: f64,
    pub d_target: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub lambda: f64,
    pub sigma: f64,
    pub verified: bool,
    pub upper_violations: usize,
    pub lower_violations: usize,
    /// Attains `max(d_target − Λ d_source)`.
    pub upper_witness: Option<PairWitness>,
    /// Attains `max(d_source/Λ − d_target)`.
    pub lower_witness: Option<PairWitness>,
}

impl FitReport {
    fn new(fit: &QiFit, n: usize) -> Self {
        let w = |w: Option<conetree_core::qi::FitWitness>| {
            w.map(|w| {
                let (x, y) = pair_at(n, w.index);
                PairWitness {
                    x,
                    y,
                    d_source: w.source,
                    d_target: w.target,
                }
            })
        };
        Self {
            lambda: fit.lambda,
            sigma: fit.sigma,
            verified: fit.verified(),
            upper_violations: fit.upper_violations,
            lower_violations: fit.lower_violations,
            upper_witness: w(fit.upper_witness),
            lower_witness: w(fit.lower_witness),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SigmaAt {
    pub lambda: f64,
    pub sigma: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TreeFit {
    pub color: usize,
    pub fit: FitReport,
}

/// Distances over every pair of grid points: cone distances, and tree
/// distances per color.
pub struct PairData {
    pub n: usize,
    pub source: Vec<f64>,
    pub per_tree: Vec<Vec<u32>>,
}

impl PairData {
    pub fn len(&self) -> usize {
        self.source.len()
    }

    pub fn is_empty(&self) -> bool {
        self.source.is_empty()
    }

    pub fn product(&self) -> Vec<(f64, f64)> {
        (0..self.len())
            .map(|k| (self.source[k], self.per_tree.iter().map(|t| t[k] as f64).sum()))
            .collect()
    }

    pub fn tree(&self, a: usize) -> Vec<(f64, f64)> {
        self.source.iter().zip(&self.per_tree[a]).map(|(&s, &t)| (s, t as f64)).collect()
    }
}

pub fn pair_data(space: &FiniteMetricSpace, grid: &ConeGrid, emb: &ProductEmbedding) -> Result<PairData> {
    let n = grid.len();
    let count = n * (n - 1) / 2;
    let points: Vec<_> = (0..n).map(|x| grid.point(x)).collect::<conetree_core::Result<_>>().at(Stage::Fit)?;
    let cone = conetree_core::cone::HyperbolicCone { space, mu: grid.mu };
    let mut source = Vec::with_capacity(count);
    let mut per_tree = vec![Vec::with_capacity(count); emb.colors()];
    for x in 0..n {
        for y in x + 1..n {
            source.push(cone.dist(points[x], points[y]));
            for (a, col) in per_tree.iter_mut().enumerate() {
                let d = emb.tree_dist(a, x, y).at(Stage::Fit)?;
                col.push(d as u32);
            }
        }
    }
    Ok(PairData { n, source, per_tree })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitSummary {
    pub pairs: usize,
    pub product: FitReport,
    pub sigma_profile: Vec<SigmaAt>,
    pub per_tree: Vec<TreeFit>,
}

/// Fits `(Λ, σ)` for the product map and for each tree map over all pairs.
pub fn stage_fit(data: &PairData) -> Result<FitSummary> {
    if data.is_empty() {
        return Err(Error::check(Stage::Fit, "the grid has a single point"));
    }
    let product = data.product();
    let fit = fit_qi(&product).at(Stage::Fit)?;
    if !fit.verified() {
        return Err(Error::check(
            Stage::Fit,
            format!("{} upper and {} lower violations", fit.upper_violations, fit.lower_violations),
        ));
    }
    let sigma_profile = SIGMA_PROFILE
        .iter()
        .map(|&lambda| SigmaAt {
            lambda,
            sigma: product
                .iter()
                .map(|&(s, t)| (t - lambda * s).max(s / lambda - t))
                .fold(0.0, f64::max),
        })
        .collect();
    drop(product);
    let per_tree = (0..data.per_tree.len())
        .map(|a| {
            let fit = fit_qi(&data.tree(a)).at(Stage::Fit)?;
            Ok(TreeFit {
                color: a,
                fit: FitReport::new(&fit, data.n),
            })
        })
        .collect::<Result<_>>()?;
    Ok(FitSummary {
        pairs: data.len(),
        product: FitReport::new(&fit, data.n),
        sigma_profile,
        per_tree,
    })
}

// ---------------------------------------------------------------- report

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridInfo {
    pub r: f64,
    pub big_r: f64,
    pub depth: usize,
    pub points: usize,
    pub mu: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TreeSummary {
    pub color: usize,
    pub vertices: usize,
    pub edges: usize,
    pub max_level: usize,
    pub twice_delta: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingSummary {
    /// `max_x dist(π_j(x), f_a(x)) / r^j`.
    pub nearest_ratio: f64,
    pub lambda: f64,
    pub tie_rule: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QiReport {
    pub format: String,
    pub passed: bool,
    pub product_metric: String,
    pub config: PipelineConfig,
    pub grid: GridInfo,
    pub fit: FitSummary,
    pub sequence: PropertyReportFile,
    pub trees: Vec<TreeSummary>,
    pub embedding: EmbeddingSummary,
    pub radial: RadialSummary,
}

// ---------------------------------------------------------------- bundle

/// Output files by name, in memory.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Bundle {
    pub files: BTreeMap<String, Vec<u8>>,
}

impl Bundle {
    pub fn get(&self, name: &str) -> Option<&[u8]> {
        self.files.get(name).map(Vec::as_slice)
    }

    pub fn write_to(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        for (name, bytes) in &self.files {
            std::fs::write(dir.join(name), bytes)?;
        }
        Ok(())
    }
}

/// Everything a run produced. On failure the bundle holds the files
/// written before the failing stage and a log naming it.
pub struct Run {
    pub bundle: Bundle,
    pub log: Vec<String>,
    pub report: Option<QiReport>,
    pub error: Option<Error>,
}

impl Run {
    pub fn passed(&self) -> bool {
        self.error.is_none() && self.report.as_ref().is_some_and(|r| r.passed)
    }
}

struct Recorder {
    bundle: Bundle,
    log: Vec<String>,
}

impl Recorder {
    fn log(&mut self, stage: Stage, line: impl AsRef<str>) {
        self.log.push(format!("{stage}: {}", line.as_ref()));
    }

    fn file(&mut self, name: impl Into<String>, bytes: Vec<u8>) {
        self.bundle.files.insert(name.into(), bytes);
    }
}

pub fn run_pipeline(config: &PipelineConfig) -> Run {
    let mut rec = Recorder {
        bundle: Bundle::default(),
        log: Vec::new(),
    };
    let outcome = run_stages(config, &mut rec);
    let (report, error) = match outcome {
        Ok(report) => {
            rec.log.push("result: pass".into());
            (Some(report), None)
        }
        Err(e) => {
            rec.log.push(format!("result: fail: {e}"));
            (None, Some(e))
        }
    };
    let mut text = rec.log.join("\n");
    text.push('\n');
    rec.bundle.files.insert("log.txt".into(), text.into_bytes());
    Run {
        bundle: rec.bundle,
        log: rec.log,
        report,
        error,
    }
}

fn run_stages(config: &PipelineConfig, rec: &mut Recorder) -> Result<QiReport> {
    rec.log(Stage::Config, format!("run {}", config.run_name()));
    let space = stage_generate(config)?;
    rec.log(Stage::Generate, format!("{} points, diameter {}", space.len(), space.diam()));
    rec.file("space.json", formats::to_json(&SpaceFile::from_generator(&space, &config.generator, config.seed))?);

    let seq = stage_separate(&space, config)?;
    rec.log(
        Stage::Separate,
        format!(
            "{} levels, {} colors, strategy {}, base δ = {}, base λ = {}",
            seq.depth(),
            seq.colors(),
            seq.provenance.strategy,
            seq.base_delta,
            seq.base_lambda
        ),
    );
    for v in &seq.violated_preconditions {
        rec.log(Stage::Separate, format!("standing assumption fails, output certified instead: {v}"));
    }
    for note in &seq.provenance.notes {
        rec.log(Stage::Separate, format!("note: {note}"));
    }
    rec.file("charseq.json", formats::to_json(&CharSeqFile::new(&space, &seq))?);

    let report = stage_verify(&space, &seq)?;
    rec.log(Stage::Verify, report.summary());

    let trees = stage_trees(&space, &seq)?;
    let tree_summaries: Vec<TreeSummary> = trees
        .iter()
        .map(|(t, twice)| TreeSummary {
            color: t.color,
            vertices: t.len(),
            edges: t.parent.iter().flatten().count(),
            max_level: t.max_level(),
            twice_delta: *twice,
        })
        .collect();
    for (t, _) in &trees {
        rec.log(Stage::Trees, format!("tree {}: {} vertices, δ = 0", t.color, t.len()));
        rec.file(format!("tree_{}.json", t.color), formats::to_json(&TreeFile::new(t))?);
    }

    let grid = stage_grid(&space, config)?;
    rec.log(Stage::Grid, format!("{} points, R = {}", grid.len(), grid.big_r));
    let emb = stage_embed(&space, &grid, &seq, trees.into_iter().map(|(t, _)| t).collect())?;
    rec.log(Stage::Embed, format!("nearest member within {} r^j", emb.nearest_ratio));
    let mut csv = Vec::new();
    formats::write_embedding(&mut csv, &space, &grid, &emb)?;
    rec.file("embedding.csv", csv);

    let radial = stage_radial(&grid, &emb)?;
    rec.log(Stage::Radial, format!("{} checks, {} failures", radial.checks, radial.failures));

    check_table(&grid, &emb, Stage::Fit)?;
    let data = pair_data(&space, &grid, &emb)?;
    if config.write_pairs {
        let product = data.product();
        let pairs: Vec<(usize, usize)> = (0..data.len()).map(|k| pair_at(data.n, k)).collect();
        let mut csv = Vec::new();
        formats::write_pairs(&mut csv, &pairs, &product)?;
        rec.file("pairs.csv", csv);
    }
    let fit = stage_fit(&data)?;
    rec.log(
        Stage::Fit,
        format!("{} pairs, Λ = {}, σ = {}, verified", fit.pairs, fit.product.lambda, fit.product.sigma),
    );

    let qi = QiReport {
        format: QIREPORT_FORMAT.into(),
        passed: true,
        product_metric: config.product_metric.as_str().into(),
        config: config.clone(),
        grid: GridInfo {
            r: grid.r,
            big_r: grid.big_r,
            depth: grid.depth,
            points: grid.len(),
            mu: grid.mu.and_then(fin),
        },
        fit,
        sequence: PropertyReportFile::new(&space, &report),
        trees: tree_summaries,
        embedding: EmbeddingSummary {
            nearest_ratio: emb.nearest_ratio,
            lambda: seq.lambda,
            tie_rule: TIE_RULE.into(),
        },
        radial,
    };
    rec.file("qireport.json", formats::to_json(&qi)?);
    Ok(qi)
}

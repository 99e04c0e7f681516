//! Re-runs every check on a written bundle.

use std::io::BufReader;
use std::path::Path;

use conetree_core::charseq::verify_char_seq;
use conetree_core::cone::build_grid;
use conetree_core::metric::FiniteMetricSpace;
use conetree_core::qi::tree_twice_delta;
use conetree_core::tree::{build_tree, ProductEmbedding};
use serde::de::DeserializeOwned;

use crate::error::{AtStage, Error, Result, Stage};
use crate::formats::{read_embedding, CharSeqFile, SpaceFile, TreeFile};
use crate::pipeline::{pair_data, stage_fit, stage_radial, QiReport, QIREPORT_FORMAT};

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub ok: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct BundleReport {
    pub checks: Vec<Check>,
}

impl BundleReport {
    pub fn passed(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|c| c.ok)
    }

    fn push(&mut self, name: impl Into<String>, ok: bool, detail: impl Into<String>) -> bool {
        self.checks.push(Check {
            name: name.into(),
            ok,
            detail: detail.into(),
        });
        ok
    }
}

fn read_json<T: DeserializeOwned>(dir: &Path, name: &str) -> Result<T> {
    let text = std::fs::read(dir.join(name)).map_err(|e| Error::Format {
        path: name.into(),
        message: e.to_string(),
    })?;
    serde_json::from_slice(&text).map_err(|e| Error::Format {
        path: name.into(),
        message: e.to_string(),
    })
}

/// Loads the bundle in `dir` and checks the sequence, the trees, the
/// embedding table, the radial bound and the fitted constants. Stops at
/// the first check whose failure makes the later ones meaningless.
pub fn verify_bundle(dir: &Path) -> Result<BundleReport> {
    let mut out = BundleReport::default();
    let space: FiniteMetricSpace = read_json::<SpaceFile>(dir, "space.json")?.to_space()?;
    out.push("space", true, format!("{} points", space.len()));

    let seq = read_json::<CharSeqFile>(dir, "charseq.json")?.to_sequence(&space)?;
    let report = verify_char_seq(&space, &seq);
    if !out.push("sequence", report.passed(), report.summary()) {
        return Ok(out);
    }

    let mut trees = Vec::with_capacity(seq.colors());
    for a in 0..seq.colors() {
        let tree = read_json::<TreeFile>(dir, &format!("tree_{a}.json"))?.to_tree()?;
        let valid = tree.validate(&seq);
        let rebuilt = build_tree(&seq, a).at(Stage::Trees)?;
        let twice = tree_twice_delta(&tree).at(Stage::Trees)?;
        let ok = valid.is_ok() && rebuilt == tree && twice == 0;
        let detail = match (&valid, rebuilt == tree) {
            (Err(e), _) => e.to_string(),
            (Ok(()), false) => "differs from the tree built from the sequence".into(),
            (Ok(()), true) => format!("{} vertices, 2δ = {twice}", tree.len()),
        };
        out.push(format!("tree_{a}"), ok, detail);
        trees.push(tree);
    }
    if !out.passed() {
        return Ok(out);
    }

    let qi: QiReport = read_json(dir, "qireport.json")?;
    if qi.format != QIREPORT_FORMAT {
        return Err(Error::Format {
            path: "qireport.json".into(),
            message: format!("format {:?}", qi.format),
        });
    }
    let grid = build_grid(&space, seq.r, qi.grid.depth).at(Stage::Grid)?;
    let file = std::fs::File::open(dir.join("embedding.csv"))?;
    let table = read_embedding(BufReader::new(file), &space, &grid, seq.colors())?;
    let expected = conetree_core::tree::embed_grid(&space, &grid, &seq, trees.clone()).at(Stage::Embed)?;
    let same = expected.table == table;
    out.push(
        "embedding",
        same,
        if same { format!("{} rows", table.len()) } else { "differs from the recomputed embedding".into() },
    );
    let emb = ProductEmbedding {
        trees,
        table,
        nearest_ratio: expected.nearest_ratio,
    };
    match stage_radial(&grid, &emb) {
        Ok(r) => out.push("radial", true, format!("{} checks", r.checks)),
        Err(e) => out.push("radial", false, e.to_string()),
    };
    if !out.passed() {
        return Ok(out);
    }

    let fit = stage_fit(&pair_data(&space, &grid, &emb)?);
    match fit {
        Ok(f) => {
            let same = f.product.lambda == qi.fit.product.lambda && f.product.sigma == qi.fit.product.sigma;
            out.push(
                "fit",
                same && f.product.verified,
                format!(
                    "Λ = {}, σ = {} (reported Λ = {}, σ = {})",
                    f.product.lambda, f.product.sigma, qi.fit.product.lambda, qi.fit.product.sigma
                ),
            );
        }
        Err(e) => {
            out.push("fit", false, e.to_string());
        }
    }
    Ok(out)
}

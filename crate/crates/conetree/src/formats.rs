//! On-disk formats. JSON files carry a `format` tag with a version; the
//! CSV files start with a `#`-comment line naming theirs.
//!
//! Points are referred to by their ids, members of coverings by id lists.
//! Non-finite numbers in reports are written as `null`.

use std::io::{BufRead, Write};

use conetree_core::capacity::CapacityProfile;
use conetree_core::charseq::{CharSequence, PropertyReport, Provenance, SeparationWitness};
use conetree_core::cone::ConeGrid;
use conetree_core::covering::{ColoredCovering, Family};
use conetree_core::metric::FiniteMetricSpace;
use conetree_core::tree::{ProductEmbedding, RootedTree, Vertex};
use conetree_core::PointSet;
use serde::{Deserialize, Serialize};

use crate::error::{AtStage, Error, Result, Stage};
use crate::generate::Generator;

pub const SPACE_FORMAT: &str = "conetree-space-v1";
pub const CHARSEQ_FORMAT: &str = "conetree-charseq-v1";
pub const TREE_FORMAT: &str = "conetree-tree-v1";
pub const PROFILE_FORMAT: &str = "conetree-profile-v1";
pub const EMBEDDING_HEADER: &str = "#conetree-embedding-v1";
pub const PAIRS_HEADER: &str = "#conetree-pairs-v1";

pub(crate) fn fin(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

fn check_format(path: &str, found: &str, expected: &str) -> Result<()> {
    if found == expected {
        Ok(())
    } else {
        Err(Error::Format {
            path: path.into(),
            message: format!("format {found:?}, expected {expected:?}"),
        })
    }
}

/// Serializes with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut out = serde_json::to_vec_pretty(value)?;
    out.push(b'\n');
    Ok(out)
}

// ---------------------------------------------------------------- spaces

/// A space given by a generator descriptor, a full distance matrix, or
/// both (the matrix wins when both are present).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceFile {
    pub format: String,
    pub ids: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<Generator>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distances: Option<Vec<Vec<f64>>>,
}

impl SpaceFile {
    pub fn from_generator(space: &FiniteMetricSpace, generator: &Generator, seed: u64) -> Self {
        Self {
            format: SPACE_FORMAT.into(),
            ids: space.ids().to_vec(),
            generator: Some(generator.clone()),
            seed: generator.is_random().then_some(seed),
            distances: None,
        }
    }

    pub fn from_matrix(space: &FiniteMetricSpace) -> Self {
        Self {
            format: SPACE_FORMAT.into(),
            ids: space.ids().to_vec(),
            generator: None,
            seed: None,
            distances: Some((0..space.len()).map(|i| space.row(i).to_vec()).collect()),
        }
    }

    pub fn to_space(&self) -> Result<FiniteMetricSpace> {
        check_format("space", &self.format, SPACE_FORMAT)?;
        let space = match (&self.distances, &self.generator) {
            (Some(rows), _) => FiniteMetricSpace::from_matrix(self.ids.clone(), rows).at(Stage::Load)?,
            (None, Some(g)) => g.generate(self.seed.unwrap_or(0))?,
            (None, None) => {
                return Err(Error::Format {
                    path: "space".into(),
                    message: "neither a distance matrix nor a generator".into(),
                })
            }
        };
        if space.ids() != self.ids.as_slice() {
            return Err(Error::Format {
                path: "space".into(),
                message: "ids do not match the generated space".into(),
            });
        }
        Ok(space)
    }
}

// ------------------------------------------------------------- sequences

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Constants {
    pub delta: f64,
    pub gamma: f64,
    pub lambda: f64,
    pub base_delta: f64,
    pub base_lambda: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProvenanceFile {
    pub strategy: String,
    pub requested_colors: usize,
    pub colors_used: usize,
    pub requested_delta: Option<f64>,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShrinkTotal {
    pub applied: f64,
    pub bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelFile {
    pub level: usize,
    pub scale: f64,
    /// `colors[a]` lists the members of color `a` as id lists.
    pub colors: Vec<Vec<Vec<String>>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CharSeqFile {
    pub format: String,
    pub r: f64,
    pub depth: usize,
    pub colors: usize,
    pub constants: Constants,
    pub provenance: ProvenanceFile,
    pub violated_preconditions: Vec<String>,
    pub gamma_trace: Vec<Vec<f64>>,
    pub shrink_totals: Vec<ShrinkTotal>,
    pub levels: Vec<LevelFile>,
}

fn ids_of(space: &FiniteMetricSpace, set: &PointSet) -> Vec<String> {
    set.iter().map(|i| space.id(i).to_string()).collect()
}

fn set_of(space: &FiniteMetricSpace, ids: &[String]) -> Result<PointSet> {
    let mut set = space.empty_set();
    for id in ids {
        let i = space.index_of(id).ok_or_else(|| Error::Format {
            path: "charseq".into(),
            message: format!("unknown point id {id:?}"),
        })?;
        set.insert(i);
    }
    Ok(set)
}

impl CharSeqFile {
    pub fn new(space: &FiniteMetricSpace, seq: &CharSequence) -> Self {
        let p = &seq.provenance;
        Self {
            format: CHARSEQ_FORMAT.into(),
            r: seq.r,
            depth: seq.depth(),
            colors: seq.colors(),
            constants: Constants {
                delta: seq.delta,
                gamma: seq.gamma,
                lambda: seq.lambda,
                base_delta: seq.base_delta,
                base_lambda: seq.base_lambda,
            },
            provenance: ProvenanceFile {
                strategy: p.strategy.clone(),
                requested_colors: p.requested_colors,
                colors_used: p.colors_used,
                requested_delta: p.requested_delta,
                notes: p.notes.clone(),
            },
            violated_preconditions: seq.violated_preconditions.clone(),
            gamma_trace: seq.gamma_trace.clone(),
            shrink_totals: seq
                .shrink_totals
                .iter()
                .map(|&(applied, bound)| ShrinkTotal { applied, bound })
                .collect(),
            levels: seq
                .levels
                .iter()
                .enumerate()
                .map(|(j, cov)| LevelFile {
                    level: j + 1,
                    scale: cov.scale,
                    colors: cov
                        .classes
                        .iter()
                        .map(|f| f.iter().map(|m| ids_of(space, m)).collect())
                        .collect(),
                })
                .collect(),
        }
    }

    pub fn to_sequence(&self, space: &FiniteMetricSpace) -> Result<CharSequence> {
        check_format("charseq", &self.format, CHARSEQ_FORMAT)?;
        let bad = |message: String| Error::Format {
            path: "charseq".into(),
            message,
        };
        if self.levels.len() != self.depth {
            return Err(bad(format!("{} levels, depth {}", self.levels.len(), self.depth)));
        }
        let mut levels = Vec::with_capacity(self.depth);
        for (j, l) in self.levels.iter().enumerate() {
            if l.level != j + 1 || l.colors.len() != self.colors {
                return Err(bad(format!("level entry {j} is malformed")));
            }
            let classes = l
                .colors
                .iter()
                .map(|members| Ok(Family::new(members.iter().map(|m| set_of(space, m)).collect::<Result<_>>()?)))
                .collect::<Result<Vec<_>>>()?;
            levels.push(ColoredCovering::new(classes, l.scale));
        }
        let p = &self.provenance;
        Ok(CharSequence {
            r: self.r,
            levels,
            delta: self.constants.delta,
            gamma: self.constants.gamma,
            lambda: self.constants.lambda,
            provenance: Provenance {
                strategy: p.strategy.clone(),
                requested_colors: p.requested_colors,
                colors_used: p.colors_used,
                requested_delta: p.requested_delta,
                notes: p.notes.clone(),
            },
            base_delta: self.constants.base_delta,
            base_lambda: self.constants.base_lambda,
            gamma_trace: self.gamma_trace.clone(),
            shrink_totals: self.shrink_totals.iter().map(|s| (s.applied, s.bound)).collect(),
            violated_preconditions: self.violated_preconditions.clone(),
        })
    }
}

// ---------------------------------------------------------------- reports

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelReportFile {
    pub level: usize,
    pub scale: f64,
    pub mesh: Option<f64>,
    pub lebesgue: Option<f64>,
    pub lebesgue_mode: String,
    pub net_radius: Vec<Option<f64>>,
    pub disjointness: Vec<Option<f64>>,
    pub mesh_ok: bool,
    pub lebesgue_ok: bool,
    pub net_ok: bool,
    pub covering_ok: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessFile {
    pub kind: String,
    pub color: usize,
    pub level: usize,
    /// `null` for a missing-descendant witness.
    pub member: Option<usize>,
    pub other_level: usize,
    pub other_member: usize,
    pub margin: Option<f64>,
    pub point: Option<String>,
}

impl WitnessFile {
    fn new(space: &FiniteMetricSpace, w: &SeparationWitness) -> Self {
        Self {
            kind: w.kind.as_str().into(),
            color: w.color,
            level: w.level,
            member: (w.member != usize::MAX).then_some(w.member),
            other_level: w.other_level,
            other_member: w.other_member,
            margin: fin(w.margin),
            point: w.point.map(|p| space.id(p).to_string()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropertyReportFile {
    pub passed: bool,
    pub property1: bool,
    pub property2: bool,
    pub property3: bool,
    pub summary: String,
    pub achieved_delta: Option<f64>,
    pub achieved_lambda: Option<f64>,
    pub achieved_disjoint: Option<f64>,
    pub required_gamma: Option<f64>,
    pub achieved_gamma: Option<f64>,
    pub constraints_checked: usize,
    pub worst: Option<WitnessFile>,
    pub levels: Vec<LevelReportFile>,
}

impl PropertyReportFile {
    pub fn new(space: &FiniteMetricSpace, report: &PropertyReport) -> Self {
        let s = &report.separation;
        Self {
            passed: report.passed(),
            property1: report.property1,
            property2: report.property2,
            property3: report.property3,
            summary: report.summary(),
            achieved_delta: fin(report.achieved_delta),
            achieved_lambda: fin(report.achieved_lambda),
            achieved_disjoint: fin(report.achieved_disjoint),
            required_gamma: fin(s.required_gamma),
            achieved_gamma: fin(s.achieved_gamma),
            constraints_checked: s.constraints_checked,
            worst: s.worst.as_ref().map(|w| WitnessFile::new(space, w)),
            levels: report
                .levels
                .iter()
                .map(|l| LevelReportFile {
                    level: l.level,
                    scale: l.scale,
                    mesh: fin(l.mesh),
                    lebesgue: fin(l.lebesgue),
                    lebesgue_mode: l.lebesgue_mode.as_str().into(),
                    net_radius: l.net_radius.iter().copied().map(fin).collect(),
                    disjointness: l.disjointness.iter().copied().map(fin).collect(),
                    mesh_ok: l.mesh_ok,
                    lebesgue_ok: l.lebesgue_ok,
                    net_ok: l.net_ok,
                    covering_ok: l.covering_ok,
                })
                .collect(),
        }
    }
}

// ------------------------------------------------------------------ trees

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TreeVertexFile {
    pub id: usize,
    pub level: usize,
    pub color: usize,
    /// Index of the member in its level's color class; 0 for the root.
    pub member: usize,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TreeFile {
    pub format: String,
    pub color: usize,
    pub root: usize,
    pub vertices: Vec<TreeVertexFile>,
}

impl TreeFile {
    pub fn new(tree: &RootedTree) -> Self {
        let mut children = vec![Vec::new(); tree.len()];
        for (v, p) in tree.parent.iter().enumerate() {
            if let Some(p) = p {
                children[*p].push(v);
            }
        }
        Self {
            format: TREE_FORMAT.into(),
            color: tree.color,
            root: tree.root(),
            vertices: tree
                .vertices
                .iter()
                .zip(children)
                .enumerate()
                .map(|(id, (v, children))| TreeVertexFile {
                    id,
                    level: v.level,
                    color: tree.color,
                    member: v.member,
                    parent: tree.parent[id],
                    children,
                })
                .collect(),
        }
    }

    /// Rebuilds the tree from the parent links; the child lists must agree.
    pub fn to_tree(&self) -> Result<RootedTree> {
        check_format("tree", &self.format, TREE_FORMAT)?;
        if self.root != 0 || self.vertices.iter().enumerate().any(|(i, v)| v.id != i || v.color != self.color) {
            return Err(Error::Format {
                path: format!("tree_{}", self.color),
                message: "vertex ids, colors or root are inconsistent".into(),
            });
        }
        let vertices = self.vertices.iter().map(|v| Vertex { level: v.level, member: v.member }).collect();
        let parent = self.vertices.iter().map(|v| v.parent).collect();
        let tree = RootedTree::from_parts(self.color, vertices, parent).at(Stage::Load)?;
        if TreeFile::new(&tree) != *self {
            return Err(Error::Format {
                path: format!("tree_{}", self.color),
                message: "child lists disagree with parent links".into(),
            });
        }
        Ok(tree)
    }
}

// -------------------------------------------------------------- embedding

/// `point,level,z,t,f_0,…,f_{k-1}`: one row per grid point, `z` empty for
/// the vertex, `f_a` the vertex id of the image in tree `a`.
pub fn write_embedding<W: Write>(
    out: W,
    space: &FiniteMetricSpace,
    grid: &ConeGrid,
    emb: &ProductEmbedding,
) -> Result<()> {
    let mut out = out;
    writeln!(out, "{EMBEDDING_HEADER}")?;
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["point".to_string(), "level".into(), "z".into(), "t".into()];
    header.extend((0..emb.colors()).map(|a| format!("f_{a}")));
    w.write_record(&header)?;
    for x in 0..grid.len() {
        let (level, z) = grid.locate(x).at(Stage::Embed)?;
        let t = grid.point(x).at(Stage::Embed)?.t;
        let mut row = vec![x.to_string(), level.to_string(), z.map_or(String::new(), |z| space.id(z).into()), t.to_string()];
        row.extend(emb.table[x].iter().map(usize::to_string));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads the image table back, checking rows against the grid.
pub fn read_embedding<R: BufRead>(
    mut input: R,
    space: &FiniteMetricSpace,
    grid: &ConeGrid,
    colors: usize,
) -> Result<Vec<Vec<usize>>> {
    let bad = |message: String| Error::Format {
        path: "embedding.csv".into(),
        message,
    };
    let mut first = String::new();
    input.read_line(&mut first)?;
    if first.trim_end() != EMBEDDING_HEADER {
        return Err(bad(format!("first line {:?}, expected {EMBEDDING_HEADER}", first.trim_end())));
    }
    let mut r = csv::Reader::from_reader(input);
    if r.headers()?.len() != 4 + colors {
        return Err(bad(format!("expected {} columns", 4 + colors)));
    }
    let mut table = Vec::with_capacity(grid.len());
    for (x, rec) in r.records().enumerate() {
        let rec = rec?;
        let (level, z) = grid.locate(x).map_err(|e| bad(e.to_string()))?;
        let z_id = z.map_or("", |z| space.id(z));
        if rec[0] != *x.to_string() || rec[1] != *level.to_string() || &rec[2] != z_id {
            return Err(bad(format!("row {x} does not describe grid point {x}")));
        }
        let images = (0..colors)
            .map(|a| rec[4 + a].parse::<usize>().map_err(|e| bad(format!("row {x}: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        table.push(images);
    }
    if table.len() != grid.len() {
        return Err(bad(format!("{} rows for {} grid points", table.len(), grid.len())));
    }
    Ok(table)
}

/// `x,y,d_source,d_target` for external plotting.
pub fn write_pairs<W: Write>(out: W, pairs: &[(usize, usize)], values: &[(f64, f64)]) -> Result<()> {
    let mut out = out;
    writeln!(out, "{PAIRS_HEADER}")?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["x", "y", "d_source", "d_target"])?;
    for (&(x, y), &(s, t)) in pairs.iter().zip(values) {
        w.write_record([x.to_string(), y.to_string(), s.to_string(), t.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

// --------------------------------------------------------------- profiles

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileEntryFile {
    pub tau: f64,
    pub m: usize,
    pub capacity: f64,
    pub candidates: usize,
    pub admissible: usize,
    pub best_mesh: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileFile {
    pub format: String,
    pub strategy: String,
    pub delta: f64,
    pub budget: usize,
    pub caveat: String,
    pub entries: Vec<ProfileEntryFile>,
}

impl ProfileFile {
    pub fn new(p: &CapacityProfile) -> Self {
        Self {
            format: PROFILE_FORMAT.into(),
            strategy: p.strategy.name().into(),
            delta: p.delta,
            budget: p.budget,
            caveat: p.caveat.into(),
            entries: p
                .entries
                .iter()
                .map(|e| ProfileEntryFile {
                    tau: e.tau,
                    m: e.m,
                    capacity: e.capacity,
                    candidates: e.candidates,
                    admissible: e.admissible,
                    best_mesh: e.best_mesh,
                })
                .collect(),
        }
    }
}

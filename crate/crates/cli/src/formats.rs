//! File formats. Every format is JSON; the exact field names are pinned in
//! FORMATS.md at the repository root. Scalars serialize as objects with
//! decimal-fraction strings: {"re": "p/q"} with "im" omitted when zero.

use std::collections::BTreeMap;

use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};

use holkit_core::embedding::{Dart, Rotations};
use holkit_core::gate::Gate;
use holkit_core::genus::{BunchEdge, CrossCap, Handle, PlaneModel};
use holkit_core::graph::WeightedGraph;
use holkit_core::gridtiling::GridTilingInstance;
use holkit_core::matrix::Matrix;
use holkit_core::psub::{ColoredGraph, PartitionedSubInstance};
use holkit_core::scalar::{Rational, Scalar};
use holkit_core::sig_graph::{EdgeEnds, SEdge, SignatureGraph};
use holkit_core::signature::{Builtin, CellKind, CellSignature, Signature};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScalarDto {
    pub re: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub im: Option<String>,
}

impl ScalarDto {
    pub fn from_scalar(s: &Scalar) -> Self {
        ScalarDto {
            re: s.re.to_decimal_string(),
            im: (!s.im.is_zero()).then(|| s.im.to_decimal_string()),
        }
    }

    pub fn to_scalar(&self) -> Result<Scalar> {
        let re = Rational::parse(&self.re).map_err(|e| anyhow!("{e}"))?;
        let im = match &self.im {
            None => Rational::zero(),
            Some(s) => Rational::parse(s).map_err(|e| anyhow!("{e}"))?,
        };
        Ok(Scalar::new(re, im))
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SignatureDto {
    Hw0,
    Hw1,
    Pass,
    Pre,
    Act,
    Even,
    Odd,
    Dense { arity: usize, table: Vec<ScalarDto> },
    Propagate { n: usize },
    PropagateCheck { n: usize, pairs: Vec<(usize, usize)> },
}

impl SignatureDto {
    pub fn from_signature(s: &Signature) -> Self {
        match s {
            Signature::Builtin { kind, .. } => match kind {
                Builtin::HwEq0 => SignatureDto::Hw0,
                Builtin::HwEq1 => SignatureDto::Hw1,
                Builtin::Pass => SignatureDto::Pass,
                Builtin::Pre => SignatureDto::Pre,
                Builtin::Act => SignatureDto::Act,
                Builtin::Even => SignatureDto::Even,
                Builtin::Odd => SignatureDto::Odd,
            },
            Signature::Dense { arity, table } => SignatureDto::Dense {
                arity: *arity,
                table: table.iter().map(ScalarDto::from_scalar).collect(),
            },
            Signature::Lazy(c) => match &c.kind {
                CellKind::Propagate => SignatureDto::Propagate { n: c.n },
                CellKind::PropagateCheck(set) => SignatureDto::PropagateCheck {
                    n: c.n,
                    pairs: set.iter().copied().collect(),
                },
            },
        }
    }

    pub fn to_signature(&self, arity: usize) -> Result<Signature> {
        let b = |kind| Signature::builtin(kind, arity).map_err(|e| anyhow!("{e}"));
        Ok(match self {
            SignatureDto::Hw0 => b(Builtin::HwEq0)?,
            SignatureDto::Hw1 => b(Builtin::HwEq1)?,
            SignatureDto::Pass => b(Builtin::Pass)?,
            SignatureDto::Pre => b(Builtin::Pre)?,
            SignatureDto::Act => b(Builtin::Act)?,
            SignatureDto::Even => b(Builtin::Even)?,
            SignatureDto::Odd => b(Builtin::Odd)?,
            SignatureDto::Dense { arity: a, table } => {
                let table = table.iter().map(ScalarDto::to_scalar).collect::<Result<_>>()?;
                Signature::dense(*a, table).map_err(|e| anyhow!("{e}"))?
            }
            SignatureDto::Propagate { n } => {
                Signature::Lazy(CellSignature { n: *n, kind: CellKind::Propagate })
            }
            SignatureDto::PropagateCheck { n, pairs } => Signature::Lazy(CellSignature {
                n: *n,
                kind: CellKind::PropagateCheck(pairs.iter().copied().collect()),
            }),
        })
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VertexDto {
    pub id: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub signature: Option<SignatureDto>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EdgeDto {
    pub id: usize,
    pub u: usize,
    /// `null` marks a dangling edge.
    pub v: Option<usize>,
    pub weight: ScalarDto,
}

/// The shared graph file: a signature graph, plain weighted graph, or
/// gate, depending on which optional fields are present.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GraphFile {
    pub version: u32,
    pub vertices: Vec<VertexDto>,
    pub edges: Vec<EdgeDto>,
    /// Ordered incident edge ids per vertex; self-loops listed twice.
    /// Defaults to edge-id order when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub incidence: Option<Vec<Vec<usize>>>,
    /// Rotation system: per vertex a counterclockwise list of [edge, end],
    /// or null for vertices excluded from the witness (apices).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub embedding: Option<Vec<Option<Vec<(usize, u8)>>>>,
    /// Ordered dangling edge ids; present on gate files.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dangling: Option<Vec<usize>>,
    /// Apex vertices for the apex-aware matching commands.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub apices: Option<Vec<usize>>,
    /// Optional expected signature table for gate verification.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target: Option<Vec<ScalarDto>>,
}

impl GraphFile {
    pub fn parse(text: &str) -> Result<Self> {
        let file: GraphFile = serde_json::from_str(text).context("parsing graph file")?;
        if file.version != 1 {
            bail!("unsupported graph file version {}", file.version);
        }
        for (i, v) in file.vertices.iter().enumerate() {
            if v.id != i {
                bail!("vertex ids must be 0..n in order, found {} at {}", v.id, i);
            }
        }
        for (i, e) in file.edges.iter().enumerate() {
            if e.id != i {
                bail!("edge ids must be 0..m in order, found {} at {}", e.id, i);
            }
        }
        Ok(file)
    }

    pub fn to_signature_graph(&self) -> Result<SignatureGraph> {
        let n = self.vertices.len();
        let mut edges = Vec::with_capacity(self.edges.len());
        for e in &self.edges {
            let ends = match e.v {
                Some(v) => EdgeEnds::Internal(e.u, v),
                None => EdgeEnds::Dangling(e.u),
            };
            edges.push(SEdge { ends, weight: e.weight.to_scalar()? });
        }
        let incidence: Vec<Vec<usize>> = match &self.incidence {
            Some(inc) => inc.clone(),
            None => {
                let mut inc = vec![Vec::new(); n];
                for (eid, e) in edges.iter().enumerate() {
                    match e.ends {
                        EdgeEnds::Internal(u, v) => {
                            inc[u].push(eid);
                            if v != u {
                                inc[v].push(eid);
                            } else {
                                inc[u].push(eid);
                            }
                        }
                        EdgeEnds::Dangling(u) => inc[u].push(eid),
                    }
                }
                inc
            }
        };
        let mut sigs = Vec::with_capacity(n);
        for (v, vd) in self.vertices.iter().enumerate() {
            let arity = incidence[v].len();
            let sig = match &vd.signature {
                Some(dto) => dto.to_signature(arity)?,
                None => Signature::hw1(arity),
            };
            sigs.push(sig);
        }
        let rotations = self.embedding.as_ref().map(|rows| {
            Rotations(
                rows.iter()
                    .map(|r| r.as_ref().map(|l| l.iter().map(|&(e, s)| (e, s) as Dart).collect()))
                    .collect(),
            )
        });
        SignatureGraph::new(sigs, edges, incidence, rotations).map_err(|e| anyhow!("{e}"))
    }

    pub fn to_gate(&self) -> Result<Gate> {
        let graph = self.to_signature_graph()?;
        let dangling = self
            .dangling
            .clone()
            .ok_or_else(|| anyhow!("gate file needs a dangling list"))?;
        Gate::new(graph, dangling).map_err(|e| anyhow!("{e}"))
    }

    /// Plain weighted view for the matching commands; signatures must all
    /// be HW=1 (or absent) and the graph closed.
    pub fn to_weighted(&self) -> Result<(WeightedGraph, Vec<usize>, Option<Rotations>)> {
        let sg = self.to_signature_graph()?;
        let rot = sg.rotations.clone();
        let (g, _) = sg.to_weighted().map_err(|e| anyhow!("{e}"))?;
        Ok((g, self.apices.clone().unwrap_or_default(), rot))
    }

    pub fn from_signature_graph(sg: &SignatureGraph, apices: Option<&[usize]>) -> Self {
        GraphFile {
            version: 1,
            vertices: (0..sg.vertex_count())
                .map(|id| VertexDto {
                    id,
                    signature: Some(SignatureDto::from_signature(&sg.sigs[id])),
                })
                .collect(),
            edges: sg
                .edges
                .iter()
                .enumerate()
                .map(|(id, e)| {
                    let (u, v) = match e.ends {
                        EdgeEnds::Internal(u, v) => (u, Some(v)),
                        EdgeEnds::Dangling(u) => (u, None),
                    };
                    EdgeDto { id, u, v, weight: ScalarDto::from_scalar(&e.weight) }
                })
                .collect(),
            incidence: Some(sg.incidence.clone()),
            embedding: sg
                .rotations
                .as_ref()
                .map(|r| r.0.iter().map(|row| row.clone()).collect()),
            dangling: None,
            apices: apices.map(<[usize]>::to_vec),
            target: None,
        }
    }

    pub fn from_weighted(
        g: &WeightedGraph,
        apices: &[usize],
        rotations: Option<&Rotations>,
    ) -> Self {
        GraphFile {
            version: 1,
            vertices: (0..g.n).map(|id| VertexDto { id, signature: None }).collect(),
            edges: g
                .edges
                .iter()
                .enumerate()
                .map(|(id, e)| EdgeDto {
                    id,
                    u: e.u,
                    v: Some(e.v),
                    weight: ScalarDto::from_scalar(&e.weight),
                })
                .collect(),
            incidence: None,
            embedding: rotations.map(|r| r.0.clone()),
            dangling: None,
            apices: if apices.is_empty() { None } else { Some(apices.to_vec()) },
            target: None,
        }
    }
}

/// Matrix file: {"rows": [[scalar, ...], ...]}.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MatrixFile {
    pub rows: Vec<Vec<ScalarDto>>,
}

impl MatrixFile {
    pub fn parse(text: &str) -> Result<Matrix> {
        let file: MatrixFile = serde_json::from_str(text).context("parsing matrix file")?;
        let rows = file
            .rows
            .iter()
            .map(|r| r.iter().map(ScalarDto::to_scalar).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Matrix::from_rows(rows).map_err(|e| anyhow!("{e}"))
    }
}

/// Grid-tiling instance file: n, k, the constraint cells C, and the pair
/// sets T keyed by "i,j".
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GridTilingFile {
    pub n: usize,
    pub k: usize,
    #[serde(rename = "C")]
    pub cells: Vec<(usize, usize)>,
    #[serde(rename = "T")]
    pub sets: BTreeMap<String, Vec<(usize, usize)>>,
}

impl GridTilingFile {
    pub fn parse(text: &str) -> Result<GridTilingInstance> {
        let file: GridTilingFile = serde_json::from_str(text).context("parsing instance file")?;
        let mut constraints = BTreeMap::new();
        for &(i, j) in &file.cells {
            let key = format!("{i},{j}");
            let pairs = file
                .sets
                .get(&key)
                .ok_or_else(|| anyhow!("constraint cell ({i},{j}) missing from T"))?;
            constraints.insert((i, j), pairs.iter().copied().collect());
        }
        GridTilingInstance::new(file.n, file.k, constraints).map_err(|e| anyhow!("{e}"))
    }

    pub fn from_instance(t: &GridTilingInstance) -> Self {
        GridTilingFile {
            n: t.n,
            k: t.k,
            cells: t.constraint_cells(),
            sets: t
                .constraints
                .iter()
                .map(|(&(i, j), set)| (format!("{i},{j}"), set.iter().copied().collect()))
                .collect(),
        }
    }
}

/// Colored graph: per-vertex color field plus an edge list.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ColoredGraphFile {
    pub vertices: Vec<ColoredVertexDto>,
    pub edges: Vec<(usize, usize)>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ColoredVertexDto {
    pub id: usize,
    pub color: usize,
}

impl ColoredGraphFile {
    pub fn to_colored(&self) -> Result<ColoredGraph> {
        for (i, v) in self.vertices.iter().enumerate() {
            if v.id != i {
                bail!("vertex ids must be 0..n in order");
            }
        }
        ColoredGraph::new(
            self.vertices.iter().map(|v| v.color).collect(),
            self.edges.iter().copied().collect(),
        )
        .map_err(|e| anyhow!("{e}"))
    }

    pub fn from_colored(g: &ColoredGraph) -> Self {
        ColoredGraphFile {
            vertices: g
                .colors
                .iter()
                .enumerate()
                .map(|(id, &color)| ColoredVertexDto { id, color })
                .collect(),
            edges: g.edges.iter().copied().collect(),
        }
    }
}

/// Partitioned-subgraph instance: colorful pattern + colored host.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PsubFile {
    pub k: usize,
    pub pattern: ColoredGraphFile,
    pub host: ColoredGraphFile,
}

impl PsubFile {
    pub fn parse(text: &str) -> Result<PartitionedSubInstance> {
        let file: PsubFile = serde_json::from_str(text).context("parsing psub file")?;
        PartitionedSubInstance::new(file.k, file.pattern.to_colored()?, file.host.to_colored()?)
            .map_err(|e| anyhow!("{e}"))
    }

    pub fn from_instance(p: &PartitionedSubInstance) -> Self {
        PsubFile {
            k: p.k,
            pattern: ColoredGraphFile::from_colored(&p.pattern),
            host: ColoredGraphFile::from_colored(&p.host),
        }
    }
}

/// Plain (uncolored) graph file for the clique reduction input:
/// {"n": 4, "edges": [[0,1], ...]}.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PlainGraphFile {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
}

/// Plane model file: the graph with its disk rotation system, plus the
/// handle and cross-cap bunches (ordered edge lists with exit ends).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PlaneModelFile {
    pub version: u32,
    pub graph: GraphFile,
    pub handles: Vec<HandleDto>,
    pub crosscaps: Vec<BunchDto>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HandleDto {
    pub bunch_a: Vec<BunchEdgeDto>,
    pub bunch_b: Vec<BunchEdgeDto>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BunchDto {
    pub bunch: Vec<BunchEdgeDto>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BunchEdgeDto {
    pub edge: usize,
    pub exit_end: u8,
}

impl BunchEdgeDto {
    fn to_core(&self) -> BunchEdge {
        BunchEdge { edge: self.edge, exit_end: self.exit_end }
    }

    fn from_core(b: &BunchEdge) -> Self {
        BunchEdgeDto { edge: b.edge, exit_end: b.exit_end }
    }
}

impl PlaneModelFile {
    pub fn parse(text: &str) -> Result<PlaneModel> {
        let file: PlaneModelFile = serde_json::from_str(text).context("parsing plane model")?;
        if file.version != 1 {
            bail!("unsupported plane model version {}", file.version);
        }
        let (graph, _, rotations) = file.graph.to_weighted()?;
        let rotations = rotations.ok_or_else(|| anyhow!("plane model needs an embedding"))?;
        let pm = PlaneModel {
            graph,
            rotations,
            handles: file
                .handles
                .iter()
                .map(|h| Handle {
                    bunch_a: h.bunch_a.iter().map(BunchEdgeDto::to_core).collect(),
                    bunch_b: h.bunch_b.iter().map(BunchEdgeDto::to_core).collect(),
                })
                .collect(),
            crosscaps: file
                .crosscaps
                .iter()
                .map(|c| CrossCap { bunch: c.bunch.iter().map(BunchEdgeDto::to_core).collect() })
                .collect(),
        };
        pm.validate().map_err(|e| anyhow!("{e}"))?;
        Ok(pm)
    }

    pub fn from_model(pm: &PlaneModel) -> Self {
        PlaneModelFile {
            version: 1,
            graph: GraphFile::from_weighted(&pm.graph, &[], Some(&pm.rotations)),
            handles: pm
                .handles
                .iter()
                .map(|h| HandleDto {
                    bunch_a: h.bunch_a.iter().map(BunchEdgeDto::from_core).collect(),
                    bunch_b: h.bunch_b.iter().map(BunchEdgeDto::from_core).collect(),
                })
                .collect(),
            crosscaps: pm
                .crosscaps
                .iter()
                .map(|c| BunchDto {
                    bunch: c.bunch.iter().map(BunchEdgeDto::from_core).collect(),
                })
                .collect(),
        }
    }
}

pub fn to_json_pretty<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)?)
}

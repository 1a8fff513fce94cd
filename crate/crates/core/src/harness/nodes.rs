//! Node sources: files, seeded uniform draws and jittered grids.

use crate::domain::{BoxDomain, Point};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use thiserror::Error;

/// Draws tried before giving up on a requested covering radius.
pub const MAX_REJECTIONS: usize = 10_000;

#[derive(Debug, Error)]
pub enum NodeError {
    #[error("cannot read node file {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("node file {path}, record {record}: {message}")]
    Format {
        path: PathBuf,
        record: usize,
        message: String,
    },
    #[error("no draw of {count} nodes reached covering radius {radius} in {MAX_REJECTIONS} attempts")]
    Rejected { count: usize, radius: f64 },
    #[error("bad node source '{0}': expected random:<count>, jitter:<count> or a file path")]
    BadSource(String),
}

#[derive(Debug, Clone, PartialEq)]
pub enum NodeSource {
    /// CSV with `x[,y][,value]` records.
    File(PathBuf),
    /// Uniform draws, redrawn until the covering radius is met.
    Random { count: usize },
    /// One uniform point per cell of a regular grid with `count` cells.
    Jitter { count: usize },
}

impl fmt::Display for NodeSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NodeSource::File(p) => write!(f, "{}", p.display()),
            NodeSource::Random { count } => write!(f, "random:{count}"),
            NodeSource::Jitter { count } => write!(f, "jitter:{count}"),
        }
    }
}

impl FromStr for NodeSource {
    type Err = NodeError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let count = |rest: &str| rest.parse::<usize>().map_err(|_| NodeError::BadSource(s.to_string()));
        if let Some(rest) = s.strip_prefix("random:") {
            Ok(NodeSource::Random { count: count(rest)? })
        } else if let Some(rest) = s.strip_prefix("jitter:") {
            Ok(NodeSource::Jitter { count: count(rest)? })
        } else if s.is_empty() {
            Err(NodeError::BadSource(s.to_string()))
        } else {
            Ok(NodeSource::File(PathBuf::from(s.strip_prefix("file:").unwrap_or(s))))
        }
    }
}

/// Nodes with optional sample values.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeData {
    pub nodes: Vec<Point>,
    pub values: Option<Vec<f64>>,
}

/// Reads `x[,y][,value]` records; a header row is skipped when it does not parse.
pub fn read_node_file(path: &Path, dim: usize) -> Result<NodeData, NodeError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .flexible(true)
        .from_path(path)
        .map_err(|e| NodeError::Io {
            path: path.to_path_buf(),
            source: e.into(),
        })?;
    let mut nodes = Vec::new();
    let mut values = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let fmt_err = |message: String| NodeError::Format {
            path: path.to_path_buf(),
            record: i + 1,
            message,
        };
        let rec = rec.map_err(|e| fmt_err(e.to_string()))?;
        let parsed: Result<Vec<f64>, _> = rec.iter().map(str::parse::<f64>).collect();
        let fields = match parsed {
            Ok(f) => f,
            Err(_) if i == 0 => continue,
            Err(e) => return Err(fmt_err(e.to_string())),
        };
        if fields.len() != dim && fields.len() != dim + 1 {
            return Err(fmt_err(format!("expected {dim} or {} fields, found {}", dim + 1, fields.len())));
        }
        let p = if dim == 1 {
            [fields[0], 0.0]
        } else {
            [fields[0], fields[1]]
        };
        nodes.push(p);
        if let Some(&v) = fields.get(dim) {
            values.push(v);
        }
    }
    let values = match values.len() {
        0 => None,
        n if n == nodes.len() => Some(values),
        _ => {
            return Err(NodeError::Format {
                path: path.to_path_buf(),
                record: 0,
                message: "values given for some nodes only".into(),
            })
        }
    };
    Ok(NodeData { nodes, values })
}

fn uniform(rng: &mut ChaCha8Rng, domain: &BoxDomain) -> Point {
    let mut p = [0.0; 2];
    for (d, &(a, b)) in domain.axes().iter().enumerate() {
        p[d] = rng.random_range(a..b);
    }
    p
}

/// `count` uniform nodes; with a `covering` radius, whole sets are redrawn until every
/// probe point within spacing `radius/4` lies within `radius` of a node.
pub fn random_nodes(domain: &BoxDomain, count: usize, seed: u64, covering: Option<f64>) -> Result<Vec<Point>, NodeError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_REJECTIONS {
        let nodes: Vec<Point> = (0..count).map(|_| uniform(&mut rng, domain)).collect();
        match covering {
            None => return Ok(nodes),
            Some(r) => {
                let c = crate::sampling::check_delta_dense(&nodes, domain, r, r / 4.0)
                    .expect("probe spacing is δ/4");
                if c.passed {
                    return Ok(nodes);
                }
            }
        }
    }
    Err(NodeError::Rejected {
        count,
        radius: covering.unwrap_or(f64::INFINITY),
    })
}

/// One uniform node in each cell of a grid with `count` cells in 1-D and
/// `⌈√count⌉²` cells in 2-D.
pub fn jittered_nodes(domain: &BoxDomain, count: usize, seed: u64) -> Vec<Point> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let per_axis = if domain.dim() == 1 {
        count
    } else {
        (count as f64).sqrt().ceil() as usize
    };
    let cell = |rng: &mut ChaCha8Rng, (a, b): (f64, f64), i: usize| {
        a + (b - a) * (i as f64 + rng.random_range(0.0..1.0)) / per_axis as f64
    };
    match domain.dim() {
        1 => (0..per_axis).map(|i| [cell(&mut rng, domain.axis(0), i), 0.0]).collect(),
        _ => {
            let mut out = Vec::with_capacity(per_axis * per_axis);
            for i in 0..per_axis {
                for j in 0..per_axis {
                    let x = cell(&mut rng, domain.axis(0), i);
                    let y = cell(&mut rng, domain.axis(1), j);
                    out.push([x, y]);
                }
            }
            out
        }
    }
}

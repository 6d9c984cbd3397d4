//! Experiment configuration: a TOML document describing the sieve range,
//! a list of orbit-average jobs and a list of bound checks.
//!
//! Scalar fields (seed, workers, output dir, sieve limit) can be
//! overridden by command-line flags; the seed fixes every sampled point.

use std::path::PathBuf;
use std::sync::Arc;

use serde::Deserialize;

use mobius_lab::analyzer::{Region, TestFunction};
use mobius_lab::rng::SplitMix64;
use mobius_lab::systems::{BranchMotion, DynSystem};
use mobius_lab::topology::{text, EdgeId, Point, SpaceRef, VertexId};
use mobius_lab::{Error, Result};

/// Golden-ratio rotation angle, spelled as a name in configs.
pub const GOLDEN_ANGLE: f64 = 0.618_033_988_749_894_9;

/// Default logarithmic checkpoint schedule.
pub fn default_checkpoints() -> Vec<u64> {
    vec![1_000, 3_000, 10_000, 30_000, 100_000, 300_000, 1_000_000]
}

fn default_seed() -> u64 {
    42
}

fn default_workers() -> usize {
    4
}

fn default_sample() -> PointSpec {
    PointSpec::Sample { count: 1 }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub sieve_limit: u64,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_workers")]
    pub workers: usize,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default = "default_checkpoints")]
    pub checkpoints: Vec<u64>,
    #[serde(default, rename = "job")]
    pub jobs: Vec<JobConfig>,
    #[serde(default, rename = "check")]
    pub checks: Vec<crate::checks::CheckConfig>,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> std::result::Result<Self, String> {
        let config: ExperimentConfig = toml::from_str(text).map_err(|e| e.to_string())?;
        if config.sieve_limit == 0 {
            return Err("sieve_limit must be positive".into());
        }
        if config.workers == 0 {
            return Err("workers must be positive".into());
        }
        if config.checkpoints.is_empty() {
            return Err("checkpoint schedule must be nonempty".into());
        }
        let max = *config.checkpoints.last().unwrap();
        if !config.checkpoints.windows(2).all(|w| w[0] < w[1]) {
            return Err("checkpoints must be strictly increasing".into());
        }
        if max > config.sieve_limit {
            return Err(format!(
                "checkpoint {max} exceeds sieve_limit {}",
                config.sieve_limit
            ));
        }
        let mut names = std::collections::BTreeSet::new();
        for job in &config.jobs {
            if job.name.is_empty()
                || !job
                    .name
                    .chars()
                    .all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_')
            {
                return Err(format!("job name `{}` is not a valid file stem", job.name));
            }
            if !names.insert(job.name.clone()) {
                return Err(format!("duplicate job name `{}`", job.name));
            }
        }
        Ok(config)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    pub name: String,
    pub system: SystemSpec,
    #[serde(default = "default_sample")]
    pub point: PointSpec,
    pub function: FunctionSpec,
    #[serde(default)]
    pub checks: Vec<BoundCheck>,
    /// Per-job override of the global schedule.
    #[serde(default)]
    pub checkpoints: Option<Vec<u64>>,
}

/// System descriptor tag plus parameters.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SystemSpec {
    Periodic {
        m: usize,
    },
    Rotation {
        theta: Angle,
    },
    Tent {
        slope: f64,
    },
    Odometer {
        primes: Vec<u64>,
    },
    Solenoid {
        chain: Vec<u64>,
    },
    Nested {
        factors: Vec<u64>,
    },
    MonotoneStar {
        arms: usize,
        /// Cyclic shift applied to the branches (1 = rotate by one arm).
        #[serde(default)]
        shift: Option<usize>,
        /// Radial contraction rate; omit for the isometric permutation.
        #[serde(default)]
        rate: Option<f64>,
    },
    ContractingStar {
        arms: usize,
        rate: f64,
    },
    /// Contraction on a space loaded from a text document.
    ContractingSpace {
        space_file: PathBuf,
        origin_vertex: usize,
        rate: f64,
    },
}

/// Known system tags, for diagnostics.
pub const KNOWN_SYSTEM_TAGS: &[&str] = &[
    "periodic",
    "rotation",
    "tent",
    "odometer",
    "solenoid",
    "nested",
    "monotone-star",
    "contracting-star",
    "contracting-space",
];

/// A rotation angle: a number or the name `"golden"`.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Angle {
    Named(String),
    Value(f64),
}

impl Angle {
    pub fn resolve(&self) -> Result<f64> {
        match self {
            Angle::Value(v) => Ok(*v),
            Angle::Named(name) if name == "golden" => Ok(GOLDEN_ANGLE),
            Angle::Named(other) => Err(Error::InvalidArgument(format!(
                "unknown angle name `{other}` (known: golden)"
            ))),
        }
    }
}

impl SystemSpec {
    pub fn build(&self) -> Result<DynSystem> {
        match self {
            SystemSpec::Periodic { m } => DynSystem::periodic_interval(*m),
            SystemSpec::Rotation { theta } => DynSystem::rotation(theta.resolve()?),
            SystemSpec::Tent { slope } => DynSystem::tent(*slope),
            SystemSpec::Odometer { primes } => DynSystem::odometer(primes),
            SystemSpec::Solenoid { chain } => DynSystem::solenoid(chain),
            SystemSpec::Nested { factors } => DynSystem::nested_decomposition(factors),
            SystemSpec::MonotoneStar { arms, shift, rate } => {
                let tree = Arc::new(mobius_lab::topology::MetricTree::star(&vec![1.0; *arms])?);
                let arm_count = (*arms).max(1);
                let shift = shift.unwrap_or(1) % arm_count;
                let perm: Vec<usize> = (0..*arms).map(|i| (i + shift) % arm_count).collect();
                let motion = match rate {
                    Some(r) => BranchMotion::RadialContraction(*r),
                    None => BranchMotion::Identity,
                };
                DynSystem::monotone_dendrite(tree, VertexId(0), perm, motion)
            }
            SystemSpec::ContractingStar { arms, rate } => {
                let tree = Arc::new(mobius_lab::topology::MetricTree::star(&vec![1.0; *arms])?);
                let origin = tree.vertex_point(VertexId(0))?;
                DynSystem::contracting(tree, origin, *rate)
            }
            SystemSpec::ContractingSpace {
                space_file,
                origin_vertex,
                rate,
            } => {
                let text = std::fs::read_to_string(space_file)?;
                match text::space_from_text(&text)? {
                    SpaceRef::Tree(tree) => {
                        let origin = tree.vertex_point(VertexId(*origin_vertex))?;
                        DynSystem::contracting(tree, origin, *rate)
                    }
                    SpaceRef::Dendrite(model) => {
                        let tree = model.shared_tree();
                        let origin = tree.vertex_point(VertexId(*origin_vertex))?;
                        DynSystem::contracting(tree, origin, *rate)
                    }
                    SpaceRef::Graph(_) => Err(Error::InvalidArgument(
                        "contraction requires a tree-shaped space".into(),
                    )),
                }
            }
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PointSpec {
    /// Seeded uniform samples (the job seed derives from the config seed
    /// and the job index).
    Sample {
        count: usize,
    },
    /// Explicit locator on an edge.
    Edge {
        edge: usize,
        t: f64,
    },
    Vertex {
        id: usize,
    },
    /// Circle coordinate (rotation systems).
    Circle {
        position: f64,
    },
    /// Interval coordinate (tent systems).
    Interval {
        x: f64,
    },
    /// Petal point of a solenoid / nested system.
    Petal {
        class: u64,
        t: f64,
    },
}

impl PointSpec {
    pub fn resolve(&self, sys: &DynSystem, seed: u64) -> Result<Vec<Point>> {
        match self {
            PointSpec::Sample { count } => {
                if *count == 0 {
                    return Err(Error::InvalidArgument(
                        "sample count must be positive".into(),
                    ));
                }
                Ok(sys.sample_points(*count, seed))
            }
            PointSpec::Edge { edge, t } => Ok(vec![sys.space().edge_point(EdgeId(*edge), *t)?]),
            PointSpec::Vertex { id } => Ok(vec![sys.space().vertex_point(VertexId(*id))?]),
            PointSpec::Circle { position } => match sys {
                DynSystem::Rotation(r) => Ok(vec![r.point_at(*position)]),
                _ => Err(Error::InvalidArgument(
                    "circle points only apply to rotation systems".into(),
                )),
            },
            PointSpec::Interval { x } => match sys {
                DynSystem::Tent(t) => Ok(vec![t.point_at(*x)?]),
                _ => Err(Error::InvalidArgument(
                    "interval points only apply to tent systems".into(),
                )),
            },
            PointSpec::Petal { class, t } => match sys.hierarchy() {
                Some(h) => Ok(vec![h.petal_point(*class, *t)?]),
                None => Err(Error::InvalidArgument(
                    "petal points only apply to solenoid/nested systems".into(),
                )),
            },
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FunctionSpec {
    /// Order-smoothed indicator of an open arc of one edge.
    Indicator {
        edge: usize,
        lo: f64,
        hi: f64,
    },
    /// Same, with the edge picked as a petal of a solenoid/nested system.
    IndicatorPetal {
        class: u64,
        lo: f64,
        hi: f64,
    },
    /// Indicator of the component of the complement of a cut point.
    IndicatorSplit {
        cut_edge: usize,
        cut_t: f64,
        side_edge: usize,
        side_t: f64,
    },
    /// Indicator of the subtree hanging below the first-letter arc of a
    /// dendrite (odometer cylinder observable).
    Cylinder {
        letter: usize,
    },
    /// Normalized distance from a vertex (defaults to the fixed point /
    /// vertex 0).
    Distance {
        #[serde(default)]
        vertex: Option<usize>,
        #[serde(default)]
        scale: Option<f64>,
    },
    Constant {
        value: f64,
    },
}

impl FunctionSpec {
    pub fn build(&self, sys: &DynSystem) -> Result<TestFunction> {
        let space = sys.space();
        match self {
            FunctionSpec::Indicator { edge, lo, hi } => TestFunction::region_indicator(
                space,
                Region::FreeArc {
                    edge: EdgeId(*edge),
                    lo: *lo,
                    hi: *hi,
                },
            ),
            FunctionSpec::IndicatorPetal { class, lo, hi } => {
                let hierarchy = sys.hierarchy().ok_or_else(|| {
                    Error::InvalidArgument(
                        "petal indicators only apply to solenoid/nested systems".into(),
                    )
                })?;
                TestFunction::region_indicator(
                    space,
                    Region::FreeArc {
                        edge: hierarchy.petal_edge(*class)?,
                        lo: *lo,
                        hi: *hi,
                    },
                )
            }
            FunctionSpec::IndicatorSplit {
                cut_edge,
                cut_t,
                side_edge,
                side_t,
            } => {
                let cut = space.edge_point(EdgeId(*cut_edge), *cut_t)?;
                let side = space.edge_point(EdgeId(*side_edge), *side_t)?;
                TestFunction::region_indicator(space, Region::ComplementComponent { cut, side })
            }
            FunctionSpec::Cylinder { letter } => {
                let model = match space {
                    SpaceRef::Dendrite(d) => d,
                    _ => {
                        return Err(Error::InvalidArgument(
                            "cylinder functions require a dendrite space".into(),
                        ))
                    }
                };
                let letters = model.letters();
                if *letter >= letters.len() {
                    return Err(Error::InvalidArgument(format!(
                        "letter index {letter} out of range (alphabet size {})",
                        letters.len()
                    )));
                }
                let address = mobius_lab::topology::DyadicAddress::root().child(letters[*letter]);
                let cut = model.point_at(&address, 0.01)?;
                let side = model.tip(&address)?;
                TestFunction::region_indicator(space, Region::ComplementComponent { cut, side })
            }
            FunctionSpec::Distance { vertex, scale } => {
                let base = match vertex {
                    Some(v) => space.vertex_point(VertexId(*v))?,
                    None => sys
                        .fixed_point()
                        .map(Ok)
                        .unwrap_or_else(|| space.vertex_point(VertexId(0)))?,
                };
                TestFunction::distance_from(space, base, *scale)
            }
            FunctionSpec::Constant { value } => TestFunction::constant(*value),
        }
    }
}

/// Per-job verdicts over the convergence report.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum BoundCheck {
    /// `|S_N|` at the final checkpoint stays below `max`.
    FinalAbsBelow { max: f64 },
    /// Max of `|S_N|` over the last decade stays below `max`.
    LastDecadeBelow { max: f64 },
    /// `|S_N|` is non-increasing after checkpoint `n`, up to a relative
    /// slack (0.2 = 20%): past `n`, no value may exceed the running peak
    /// of the sequence by more than the slack.
    NonIncreasingAfter { n: u64, slack: f64 },
}

impl BoundCheck {
    pub fn describe(&self) -> String {
        match self {
            BoundCheck::FinalAbsBelow { max } => format!("final-abs-below({max})"),
            BoundCheck::LastDecadeBelow { max } => format!("last-decade-below({max})"),
            BoundCheck::NonIncreasingAfter { n, slack } => {
                format!("non-increasing-after({n},slack={slack})")
            }
        }
    }

    pub fn evaluate(&self, report: &mobius_lab::analyzer::ConvergenceReport) -> bool {
        match self {
            BoundCheck::FinalAbsBelow { max } => report.final_value().abs() < *max,
            BoundCheck::LastDecadeBelow { max } => report.last_decade_max() <= *max,
            BoundCheck::NonIncreasingAfter { n, slack } => {
                let mut peak: f64 = 0.0;
                for (cp, value) in report.checkpoints.iter().zip(&report.values) {
                    if cp >= n && value.abs() > peak * (1.0 + slack) {
                        return false;
                    }
                    peak = peak.max(value.abs());
                }
                true
            }
        }
    }
}

/// Deterministic per-job seed derived from the config seed.
pub fn job_seed(config_seed: u64, job_index: usize) -> u64 {
    let mut rng = SplitMix64::new(config_seed ^ 0x6a09_e667_f3bc_c908);
    let mut seed = rng.next_u64();
    for _ in 0..=job_index {
        seed = rng.next_u64();
    }
    seed
}

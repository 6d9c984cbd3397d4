//! Catalog of concrete dynamical systems behind a uniform interface.
//!
//! Every system is an immutable pair (space, step rule). Stepping is pure
//! and deterministic, so independent orbits can run concurrently and always
//! reproduce. Orbit iteration goes through [`OrbitCursor`], which lets each
//! system keep a cheap internal state (an index, a coordinate, a position
//! on a precomputed path) instead of re-deriving it from the point on every
//! step.

mod contracting;
mod hierarchy;
mod monotone;
mod odometer;

pub use contracting::ContractingSystem;
pub use hierarchy::HierarchySystem;
pub use monotone::{BranchMotion, MonotoneSystem};
pub use odometer::{OdometerState, OdometerSystem};

use std::sync::Arc;

use crate::rng::SplitMix64;
use crate::topology::{EdgeId, Locator, MetricGraph, MetricTree, Point, SpaceRef, VertexId};
use crate::{Error, Result, POINT_TOLERANCE};

/// Class tag of a catalog system.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SystemClass {
    Periodic,
    Rotation,
    Tent,
    Odometer,
    Solenoid,
    NestedDecomposition,
    MonotoneDendrite,
    ContractingDendrite,
}

impl SystemClass {
    pub fn tag(&self) -> &'static str {
        match self {
            SystemClass::Periodic => "periodic",
            SystemClass::Rotation => "rotation",
            SystemClass::Tent => "tent",
            SystemClass::Odometer => "odometer",
            SystemClass::Solenoid => "solenoid",
            SystemClass::NestedDecomposition => "nested",
            SystemClass::MonotoneDendrite => "monotone-dendrite",
            SystemClass::ContractingDendrite => "contracting-dendrite",
        }
    }
}

/// A self-map of a metric model.
#[derive(Debug, Clone)]
pub enum DynSystem {
    Periodic(PeriodicSystem),
    Rotation(RotationSystem),
    Tent(TentSystem),
    Odometer(OdometerSystem),
    Solenoid(HierarchySystem),
    Nested(HierarchySystem),
    Monotone(MonotoneSystem),
    Contracting(ContractingSystem),
}

impl DynSystem {
    /// Cyclic permutation of a finite set of distinct points.
    pub fn periodic(space: SpaceRef, orbit: Vec<Point>) -> Result<Self> {
        Ok(DynSystem::Periodic(PeriodicSystem::new(space, orbit)?))
    }

    /// Periodic system with `m` equally spaced points on the unit interval.
    pub fn periodic_interval(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::invalid("period must be at least 1"));
        }
        let space = SpaceRef::from_tree(MetricTree::unit_interval());
        let mut orbit = Vec::with_capacity(m);
        for i in 0..m {
            let t = (i as f64 + 0.5) / (m as f64 + 1.0);
            orbit.push(space.edge_point(EdgeId(0), t)?);
        }
        DynSystem::periodic(space, orbit)
    }

    /// Rigid rotation by `theta ∈ [0, 1)` on the two-arc circle model.
    pub fn rotation(theta: f64) -> Result<Self> {
        Ok(DynSystem::Rotation(RotationSystem::new(theta)?))
    }

    /// Tent map `x ↦ slope · min(x, 1-x)` on the unit interval.
    pub fn tent(slope: f64) -> Result<Self> {
        Ok(DynSystem::Tent(TentSystem::new(slope)?))
    }

    /// Add-one-with-carry over the given prime radices, embedded into the
    /// universal dendrite truncation.
    pub fn odometer(primes: &[u64]) -> Result<Self> {
        Ok(DynSystem::Odometer(OdometerSystem::new(primes)?))
    }

    /// Nested cycles of subtrees with the given cumulative period chain
    /// `k_1 | k_2 | … | k_J` (each quotient ≥ 2).
    pub fn solenoid(chain: &[u64]) -> Result<Self> {
        Ok(DynSystem::Solenoid(HierarchySystem::solenoid(chain)?))
    }

    /// Nested decomposition with per-level factors `n_k ≥ 2`; the level-k
    /// pieces have return time `n_1⋯n_k`.
    pub fn nested_decomposition(factors: &[u64]) -> Result<Self> {
        Ok(DynSystem::Nested(HierarchySystem::nested(factors)?))
    }

    /// Branch permutation of a tree around a center vertex, optionally
    /// composed with a radial contraction toward the center.
    pub fn monotone_dendrite(
        tree: Arc<MetricTree>,
        center: VertexId,
        branch_perm: Vec<usize>,
        motion: BranchMotion,
    ) -> Result<Self> {
        Ok(DynSystem::Monotone(MonotoneSystem::new(
            tree,
            center,
            branch_perm,
            motion,
        )?))
    }

    /// Contraction toward a designated point: `x ↦` the point on
    /// `arc(o, x)` at distance `rate · d(o, x)` from `o`.
    pub fn contracting(tree: Arc<MetricTree>, origin: Point, rate: f64) -> Result<Self> {
        Ok(DynSystem::Contracting(ContractingSystem::new(
            tree, origin, rate,
        )?))
    }

    pub fn class(&self) -> SystemClass {
        match self {
            DynSystem::Periodic(_) => SystemClass::Periodic,
            DynSystem::Rotation(_) => SystemClass::Rotation,
            DynSystem::Tent(_) => SystemClass::Tent,
            DynSystem::Odometer(_) => SystemClass::Odometer,
            DynSystem::Solenoid(_) => SystemClass::Solenoid,
            DynSystem::Nested(_) => SystemClass::NestedDecomposition,
            DynSystem::Monotone(_) => SystemClass::MonotoneDendrite,
            DynSystem::Contracting(_) => SystemClass::ContractingDendrite,
        }
    }

    pub fn descriptor(&self) -> String {
        match self {
            DynSystem::Periodic(s) => format!("periodic(m={})", s.orbit.len()),
            DynSystem::Rotation(s) => format!("rotation(theta={})", s.theta),
            DynSystem::Tent(s) => format!("tent(slope={})", s.slope),
            DynSystem::Odometer(s) => s.descriptor(),
            DynSystem::Solenoid(s) => format!("solenoid({})", s.chain_descriptor()),
            DynSystem::Nested(s) => format!("nested({})", s.factor_descriptor()),
            DynSystem::Monotone(s) => s.descriptor(),
            DynSystem::Contracting(s) => format!("contracting(rate={})", s.rate()),
        }
    }

    pub fn space(&self) -> &SpaceRef {
        match self {
            DynSystem::Periodic(s) => &s.space,
            DynSystem::Rotation(s) => &s.space,
            DynSystem::Tent(s) => &s.space,
            DynSystem::Odometer(s) => s.space(),
            DynSystem::Solenoid(s) | DynSystem::Nested(s) => s.space(),
            DynSystem::Monotone(s) => s.space(),
            DynSystem::Contracting(s) => s.space(),
        }
    }

    /// One application of the map.
    pub fn step(&self, x: &Point) -> Result<Point> {
        let mut cursor = self.orbit(x)?;
        cursor.advance();
        Ok(cursor.current())
    }

    /// `n`-fold composition; `iterate(x, 0) = x`.
    pub fn iterate(&self, x: &Point, n: u64) -> Result<Point> {
        let mut cursor = self.orbit(x)?;
        for _ in 0..n {
            cursor.advance();
        }
        Ok(cursor.current())
    }

    /// Cursor starting at `x` (time 0).
    pub fn orbit(&self, x: &Point) -> Result<OrbitCursor<'_>> {
        if !self.space().contains(x) {
            return Err(Error::InvalidPoint(format!(
                "point {} is not on the system's space",
                x.describe()
            )));
        }
        let state = match self {
            DynSystem::Periodic(s) => OrbitState::Cycle {
                points: &s.orbit,
                idx: s.snap_index(x)?,
                start: if s.on_orbit(x) { None } else { Some(*x) },
            },
            DynSystem::Rotation(s) => OrbitState::Circle {
                sys: s,
                theta: s.position(x)?,
            },
            DynSystem::Tent(s) => OrbitState::Interval {
                sys: s,
                x: s.coordinate(x)?,
            },
            DynSystem::Odometer(s) => OrbitState::Cycle {
                points: s.state_points(),
                idx: s.snap_index(x)?,
                start: if s.is_state_point(x) { None } else { Some(*x) },
            },
            DynSystem::Solenoid(s) | DynSystem::Nested(s) => {
                OrbitState::Mapped { sys: s, point: *x }
            }
            DynSystem::Monotone(s) => OrbitState::Monotone { sys: s, point: *x },
            DynSystem::Contracting(s) => OrbitState::Slide(s.slide_from(x)?),
        };
        Ok(OrbitCursor { state })
    }

    /// Metric of the underlying space, with O(1) fast paths for the
    /// coordinate models.
    pub fn distance(&self, x: &Point, y: &Point) -> Result<f64> {
        match self {
            DynSystem::Rotation(s) => {
                let a = s.position(x)?;
                let b = s.position(y)?;
                let d = (a - b).abs();
                Ok(d.min(1.0 - d))
            }
            DynSystem::Tent(s) => Ok((s.coordinate(x)? - s.coordinate(y)?).abs()),
            _ => self.space().distance(x, y),
        }
    }

    /// Seeded point sample. Most systems sample uniformly by arclength; the
    /// odometer samples its carrier states, which is where its dynamics
    /// lives.
    pub fn sample_points(&self, count: usize, seed: u64) -> Vec<Point> {
        let mut rng = SplitMix64::new(seed);
        let mut points = Vec::with_capacity(count);
        for _ in 0..count {
            let p = match self {
                DynSystem::Odometer(s) => s.sample_state(&mut rng),
                _ => self.space().sample_point(&mut rng),
            };
            points.push(p);
        }
        points
    }

    /// The designated fixed point, for systems that have one.
    pub fn fixed_point(&self) -> Option<Point> {
        match self {
            DynSystem::Contracting(s) => Some(s.origin()),
            DynSystem::Monotone(s) => Some(s.center_point()),
            _ => None,
        }
    }

    /// Access to the cycle hierarchy for solenoid / nested systems.
    pub fn hierarchy(&self) -> Option<&HierarchySystem> {
        match self {
            DynSystem::Solenoid(s) | DynSystem::Nested(s) => Some(s),
            _ => None,
        }
    }
}

/// Walks an orbit one step at a time. `current` is `fⁿ(x)` after `n` calls
/// to `advance`.
pub struct OrbitCursor<'a> {
    state: OrbitState<'a>,
}

enum OrbitState<'a> {
    /// Finite cycle of precomputed points (periodic systems, odometers).
    /// `start` preserves the exact starting point when it is not one of the
    /// cycle points; it snaps away on the first step.
    Cycle {
        points: &'a [Point],
        idx: usize,
        start: Option<Point>,
    },
    Circle {
        sys: &'a RotationSystem,
        theta: f64,
    },
    Interval {
        sys: &'a TentSystem,
        x: f64,
    },
    /// Combinatorial edge/vertex permutation (solenoid, nested).
    Mapped {
        sys: &'a HierarchySystem,
        point: Point,
    },
    Monotone {
        sys: &'a MonotoneSystem,
        point: Point,
    },
    /// Sliding along a fixed path toward the contraction origin.
    Slide(contracting::Slide),
}

impl OrbitCursor<'_> {
    pub fn advance(&mut self) {
        match &mut self.state {
            OrbitState::Cycle { points, idx, start } => {
                *start = None;
                *idx = (*idx + 1) % points.len();
            }
            OrbitState::Circle { sys, theta } => {
                *theta = sys.advance_theta(*theta);
            }
            OrbitState::Interval { sys, x } => {
                *x = sys.apply(*x);
            }
            OrbitState::Mapped { sys, point } => {
                *point = sys.step_mapped(point);
            }
            OrbitState::Monotone { sys, point } => {
                *point = sys.step_in_space(point);
            }
            OrbitState::Slide(slide) => slide.advance(),
        }
    }

    pub fn current(&self) -> Point {
        match &self.state {
            OrbitState::Cycle { points, idx, start } => start.unwrap_or(points[*idx]),
            OrbitState::Circle { sys, theta } => sys.point_at(*theta),
            OrbitState::Interval { sys, x } => sys.point_at(*x).expect("interval coordinate"),
            OrbitState::Mapped { point, .. } => *point,
            OrbitState::Monotone { point, .. } => *point,
            OrbitState::Slide(slide) => slide.current(),
        }
    }
}

/// Cyclic permutation of a finite orbit. The map extends to the whole
/// space by snapping to the nearest orbit point (lowest index on ties)
/// before stepping, which keeps the step total and deterministic.
#[derive(Debug, Clone)]
pub struct PeriodicSystem {
    space: SpaceRef,
    orbit: Vec<Point>,
}

impl PeriodicSystem {
    fn new(space: SpaceRef, orbit: Vec<Point>) -> Result<Self> {
        if orbit.is_empty() {
            return Err(Error::invalid("periodic orbit must be nonempty"));
        }
        for p in &orbit {
            if !space.contains(p) {
                return Err(Error::InvalidPoint(format!(
                    "orbit point {} not on the space",
                    p.describe()
                )));
            }
        }
        for i in 0..orbit.len() {
            for j in i + 1..orbit.len() {
                if space.distance(&orbit[i], &orbit[j])? <= POINT_TOLERANCE {
                    return Err(Error::invalid(format!("orbit points {i} and {j} coincide")));
                }
            }
        }
        Ok(PeriodicSystem { space, orbit })
    }

    pub fn orbit_points(&self) -> &[Point] {
        &self.orbit
    }

    fn on_orbit(&self, x: &Point) -> bool {
        self.orbit
            .iter()
            .any(|p| self.space.distance(p, x).map(|d| d <= POINT_TOLERANCE) == Ok(true))
    }

    fn snap_index(&self, x: &Point) -> Result<usize> {
        let mut best = (0usize, f64::INFINITY);
        for (i, p) in self.orbit.iter().enumerate() {
            let d = self.space.distance(p, x)?;
            if d < best.1 {
                best = (i, d);
            }
        }
        Ok(best.0)
    }
}

/// Rigid rotation on the two-arc circle model.
#[derive(Debug, Clone)]
pub struct RotationSystem {
    space: SpaceRef,
    theta: f64,
}

impl RotationSystem {
    fn new(theta: f64) -> Result<Self> {
        if !(theta.is_finite() && (0.0..1.0).contains(&theta)) {
            return Err(Error::invalid(format!(
                "rotation angle must lie in [0, 1), got {theta}"
            )));
        }
        Ok(RotationSystem {
            space: SpaceRef::from_graph(MetricGraph::unit_circle()),
            theta,
        })
    }

    pub fn angle(&self) -> f64 {
        self.theta
    }

    /// Circle coordinate of a point, in `[0, 1)`. Edge parameters are
    /// halved exactly, so coordinate and point form round-trip losslessly.
    pub fn position(&self, p: &Point) -> Result<f64> {
        if !self.space.contains(p) {
            return Err(Error::InvalidPoint("point not on the circle".into()));
        }
        Ok(match p.loc {
            Locator::Vertex(VertexId(0)) => 0.0,
            Locator::Vertex(_) => 0.5,
            Locator::OnEdge(EdgeId(0), t) => t / 2.0,
            Locator::OnEdge(_, t) => 0.5 + t / 2.0,
        })
    }

    /// Point at a circle coordinate.
    pub fn point_at(&self, theta: f64) -> Point {
        let theta = theta.rem_euclid(1.0);
        if theta < 0.5 {
            self.space
                .edge_point(EdgeId(0), theta * 2.0)
                .expect("valid circle parameter")
        } else {
            self.space
                .edge_point(EdgeId(1), theta * 2.0 - 1.0)
                .expect("valid circle parameter")
        }
    }

    fn advance_theta(&self, theta: f64) -> f64 {
        let next = theta + self.theta;
        if next >= 1.0 {
            next - 1.0
        } else {
            next
        }
    }
}

/// Tent map on the unit interval.
#[derive(Debug, Clone)]
pub struct TentSystem {
    space: SpaceRef,
    slope: f64,
}

impl TentSystem {
    fn new(slope: f64) -> Result<Self> {
        if !(slope.is_finite() && slope > 0.0 && slope <= 2.0) {
            return Err(Error::invalid(format!(
                "tent slope must lie in (0, 2], got {slope}"
            )));
        }
        Ok(TentSystem {
            space: SpaceRef::from_tree(MetricTree::unit_interval()),
            slope,
        })
    }

    pub fn slope(&self) -> f64 {
        self.slope
    }

    pub fn coordinate(&self, p: &Point) -> Result<f64> {
        if !self.space.contains(p) {
            return Err(Error::InvalidPoint("point not on the interval".into()));
        }
        Ok(match p.loc {
            Locator::Vertex(VertexId(0)) => 0.0,
            Locator::Vertex(_) => 1.0,
            Locator::OnEdge(_, t) => t,
        })
    }

    pub fn point_at(&self, x: f64) -> Result<Point> {
        self.space.edge_point(EdgeId(0), x.clamp(0.0, 1.0))
    }

    pub fn apply(&self, x: f64) -> f64 {
        self.slope * x.min(1.0 - x)
    }
}

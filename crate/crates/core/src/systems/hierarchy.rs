//! Nested cycles of subtrees: the common carrier behind the solenoid and
//! nested-decomposition models.
//!
//! The space is a tree of hubs: a root, then `k_1` level-1 hubs, each
//! holding `k_2/k_1` level-2 hubs, and so on down to `k_J` petal arcs.
//! The map advances every class index by one (mod its level period) and
//! acts isometrically edge to edge, so stepping is a table lookup.
//!
//! The closed subtree hanging at a level-`j` hub is a component of the
//! level-`j` cycle: its iterates are pairwise disjoint, return to
//! themselves after exactly `k_j` steps, and each contains `k_{j+1}/k_j`
//! components of the next level. A generic orbit lives on the petals and
//! its level-`j` itinerary is the cyclic `+1` on `Z/k_j`.

use crate::topology::{EdgeId, Locator, MetricTree, Point, SpaceRef, VertexId};
use crate::{Error, Result};

/// Petal budget; period chains beyond this are rejected.
const MAX_PETALS: u64 = 100_000;

#[derive(Debug, Clone)]
pub struct HierarchySystem {
    space: SpaceRef,
    /// Cumulative periods `k_1 | k_2 | … | k_J`.
    periods: Vec<u64>,
    /// Per-level factors (`k_1, k_2/k_1, …`); the nested-decomposition
    /// parameterization.
    factors: Vec<u64>,
    vertex_map: Vec<u32>,
    edge_map: Vec<u32>,
    /// Per vertex: (deepest level whose component contains it, class).
    vertex_levels: Vec<(u32, u64)>,
    /// Per edge: same for edge interiors.
    edge_levels: Vec<(u32, u64)>,
    /// Petal edge per class `c ∈ [0, k_J)`.
    petal_edges: Vec<EdgeId>,
    /// Connector edge into each hub: `connectors[j - 1][c]` leads into the
    /// level-`j` hub of class `c`.
    connectors: Vec<Vec<EdgeId>>,
}

impl HierarchySystem {
    /// Build from a cumulative period chain (validates divisibility and
    /// quotients ≥ 2).
    pub fn solenoid(chain: &[u64]) -> Result<Self> {
        if chain.is_empty() {
            return Err(Error::invalid("period chain must be nonempty"));
        }
        if chain[0] == 0 {
            return Err(Error::invalid("periods must be positive"));
        }
        let mut factors = vec![chain[0]];
        for w in chain.windows(2) {
            if w[1] % w[0] != 0 {
                return Err(Error::invalid(format!(
                    "period {} does not divide {}",
                    w[0], w[1]
                )));
            }
            let q = w[1] / w[0];
            if q < 2 {
                return Err(Error::invalid(format!(
                    "consecutive periods {} | {} must grow by a factor ≥ 2",
                    w[0], w[1]
                )));
            }
            factors.push(q);
        }
        Self::build(chain.to_vec(), factors)
    }

    /// Build from per-level factors `n_k ≥ 2`; the cumulative periods are
    /// `α_k = n_1⋯n_k`.
    pub fn nested(factors: &[u64]) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::invalid("factor list must be nonempty"));
        }
        let mut periods = Vec::with_capacity(factors.len());
        let mut acc: u64 = 1;
        for &n in factors {
            if n < 2 {
                return Err(Error::invalid(format!("factor {n} must be at least 2")));
            }
            acc = acc
                .checked_mul(n)
                .ok_or_else(|| Error::capacity("period chain overflow"))?;
            periods.push(acc);
        }
        Self::build(periods, factors.to_vec())
    }

    fn build(periods: Vec<u64>, factors: Vec<u64>) -> Result<Self> {
        let depth = periods.len();
        let leaf_count = *periods.last().expect("nonempty");
        if leaf_count > MAX_PETALS {
            return Err(Error::capacity(format!(
                "{leaf_count} petals exceed the budget of {MAX_PETALS}"
            )));
        }

        // Vertex layout: root, then hubs level by level, then petal tips.
        let mut hub_base = vec![0usize; depth + 1];
        let mut next = 1usize; // root = 0
        for j in 1..=depth {
            hub_base[j] = next;
            next += periods[j - 1] as usize;
        }
        let tip_base = next;
        next += leaf_count as usize;
        let vertex_count = next;

        let hub = |j: usize, c: u64| -> usize { hub_base[j] + c as usize };
        let tip = |c: u64| -> usize { tip_base + c as usize };

        let mut edges: Vec<(usize, usize, f64)> = Vec::new();
        let mut edge_levels: Vec<(u32, u64)> = Vec::new();
        let mut connectors: Vec<Vec<EdgeId>> = vec![Vec::new(); depth];
        let mut petal_edges: Vec<EdgeId> = Vec::new();

        // Connectors into level-1 hubs hang at the root; their interiors
        // belong to no cycle component.
        for c in 0..periods[0] {
            connectors[0].push(EdgeId(edges.len()));
            edges.push((0, hub(1, c), 0.5));
            edge_levels.push((0, 0));
        }
        for j in 2..=depth {
            let len = 0.5f64.powi(j as i32);
            for c in 0..periods[j - 1] {
                let parent_class = c % periods[j - 2];
                connectors[j - 1].push(EdgeId(edges.len()));
                edges.push((hub(j - 1, parent_class), hub(j, c), len));
                // The connector hangs below its parent hub, inside the
                // level j-1 component of that hub.
                edge_levels.push((j as u32 - 1, parent_class));
            }
        }
        let petal_len = 0.5f64.powi(depth as i32 + 1);
        for c in 0..leaf_count {
            petal_edges.push(EdgeId(edges.len()));
            edges.push((hub(depth, c), tip(c), petal_len));
            edge_levels.push((depth as u32, c));
        }

        let mut vertex_levels = vec![(0u32, 0u64); vertex_count];
        for j in 1..=depth {
            for c in 0..periods[j - 1] {
                vertex_levels[hub(j, c)] = (j as u32, c);
            }
        }
        for c in 0..leaf_count {
            vertex_levels[tip(c)] = (depth as u32, c);
        }

        // The step permutes classes by +1 at every level simultaneously.
        let mut vertex_map = vec![0u32; vertex_count];
        for j in 1..=depth {
            let k = periods[j - 1];
            for c in 0..k {
                vertex_map[hub(j, c)] = hub(j, (c + 1) % k) as u32;
            }
        }
        for c in 0..leaf_count {
            vertex_map[tip(c)] = tip((c + 1) % leaf_count) as u32;
        }

        let mut edge_map = vec![0u32; edges.len()];
        for j in 1..=depth {
            let k = periods[j - 1];
            for c in 0..k {
                edge_map[connectors[j - 1][c as usize].0] =
                    connectors[j - 1][((c + 1) % k) as usize].0 as u32;
            }
        }
        for c in 0..leaf_count {
            edge_map[petal_edges[c as usize].0] =
                petal_edges[((c + 1) % leaf_count) as usize].0 as u32;
        }

        let tree = MetricTree::new(vertex_count, edges)?;
        Ok(HierarchySystem {
            space: SpaceRef::from_tree(tree),
            periods,
            factors,
            vertex_map,
            edge_map,
            vertex_levels,
            edge_levels,
            petal_edges,
            connectors,
        })
    }

    pub fn space(&self) -> &SpaceRef {
        &self.space
    }

    pub fn depth(&self) -> usize {
        self.periods.len()
    }

    /// Cumulative periods `k_1, …, k_J`.
    pub fn periods(&self) -> &[u64] {
        &self.periods
    }

    pub fn factors(&self) -> &[u64] {
        &self.factors
    }

    pub fn chain_descriptor(&self) -> String {
        self.periods
            .iter()
            .map(|k| k.to_string())
            .collect::<Vec<_>>()
            .join("|")
    }

    pub fn factor_descriptor(&self) -> String {
        self.factors
            .iter()
            .map(|k| k.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }

    /// One application of the combinatorial map.
    pub(crate) fn step_mapped(&self, p: &Point) -> Point {
        let loc = match p.loc {
            Locator::Vertex(v) => Locator::Vertex(VertexId(self.vertex_map[v.0] as usize)),
            Locator::OnEdge(e, t) => Locator::OnEdge(EdgeId(self.edge_map[e.0] as usize), t),
        };
        Point {
            space: p.space,
            loc,
        }
    }

    /// Class of the level-`level` component containing the point, or
    /// `None` for points above every component of that level.
    pub fn component_of(&self, p: &Point, level: usize) -> Result<Option<u64>> {
        if level == 0 || level > self.depth() {
            return Err(Error::invalid(format!(
                "level {level} outside 1..={}",
                self.depth()
            )));
        }
        if !self.space.contains(p) {
            return Err(Error::InvalidPoint(
                "point not on the hierarchy tree".into(),
            ));
        }
        let (avail, class) = match p.loc {
            Locator::Vertex(v) => self.vertex_levels[v.0],
            Locator::OnEdge(e, _) => self.edge_levels[e.0],
        };
        if (level as u32) <= avail {
            Ok(Some(class % self.periods[level - 1]))
        } else {
            Ok(None)
        }
    }

    pub fn petal_count(&self) -> u64 {
        *self.periods.last().expect("nonempty")
    }

    pub fn petal_edge(&self, class: u64) -> Result<EdgeId> {
        self.petal_edges
            .get(class as usize)
            .copied()
            .ok_or_else(|| Error::invalid(format!("petal class {class} out of range")))
    }

    /// A point on the petal of the given class at parameter `t` from the
    /// hub end.
    pub fn petal_point(&self, class: u64, t: f64) -> Result<Point> {
        self.space.edge_point(self.petal_edge(class)?, t)
    }

    /// Connector edge into the level-`level` hub of the given class; its
    /// interior lies above every component of that level.
    pub fn connector_edge(&self, level: usize, class: u64) -> Result<EdgeId> {
        if level == 0 || level > self.depth() {
            return Err(Error::invalid(format!(
                "level {level} outside 1..={}",
                self.depth()
            )));
        }
        self.connectors[level - 1]
            .get(class as usize)
            .copied()
            .ok_or_else(|| Error::invalid(format!("class {class} out of range")))
    }

    /// All edges of the level-`level` component of the given class (the
    /// closed subtree at its hub).
    pub fn component_edges(&self, level: usize, class: u64) -> Result<Vec<EdgeId>> {
        if level == 0 || level > self.depth() {
            return Err(Error::invalid(format!(
                "level {level} outside 1..={}",
                self.depth()
            )));
        }
        let k = self.periods[level - 1];
        if class >= k {
            return Err(Error::invalid(format!("class {class} out of range")));
        }
        let mut edges = Vec::new();
        for (i, &(avail, c)) in self.edge_levels.iter().enumerate() {
            if avail >= level as u32 && c % k == class {
                edges.push(EdgeId(i));
            }
        }
        Ok(edges)
    }
}

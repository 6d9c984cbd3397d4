//! Finite truncation of the universal dendrite of order 3.
//!
//! The model starts from a base arc of length 1 and, for every address
//! word α of depth `k ≤ m` over the dyadic alphabet, glues an arc `A_α` of
//! length `decay^k` whose attachment point sits on the parent arc at the
//! arclength fraction given by the final letter of α. Truncation is twofold:
//! the alphabet keeps only letters with denominator `≤ denom_bound`, and
//! words stop at depth `m`. Points of the full space that correspond to
//! infinite words have no finite representation here; only their
//! finite-depth approximants (the arc tips `b_α`) are addressable.
//!
//! Every finite truncation is an honest metric tree, so all tree operations
//! (arcs, distance, order, retraction) apply unchanged.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::topology::address::{Dyadic, DyadicAddress};
use crate::topology::space::{EdgeId, MetricTree, Point, VertexId};
use crate::{Error, Result};

/// Cap on the number of glued arcs; depth/denominator combinations beyond
/// this blow up combinatorially.
pub const MAX_DENDRITE_ARCS: u64 = 250_000;

/// One glued arc `A_α = [a_α, b_α]` with its subdivision bookkeeping.
#[derive(Debug, Clone)]
pub struct DendriteArc {
    pub address: DyadicAddress,
    /// Attachment vertex `a_α` (lies on the parent arc).
    pub base: VertexId,
    /// Free end `b_α`.
    pub tip: VertexId,
    pub length: f64,
    /// Subdivision pieces in order from base to tip.
    pub pieces: Vec<EdgeId>,
    /// Cumulative arclength at piece boundaries; `cuts[0] = 0`, last = length.
    pub cuts: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct UniversalDendriteModel {
    depth: usize,
    denom_bound: u32,
    decay: f64,
    tree: Arc<MetricTree>,
    arcs: Vec<DendriteArc>,
    lookup: BTreeMap<DyadicAddress, usize>,
    letters: Vec<Dyadic>,
}

impl UniversalDendriteModel {
    /// Build the truncation with `depth` levels of gluing, letters with
    /// denominator `≤ denom_bound`, and arc lengths `decay^k` at depth `k`.
    pub fn build(depth: usize, denom_bound: u32, decay: f64) -> Result<Self> {
        if !(decay > 0.0 && decay < 1.0) {
            return Err(Error::invalid(format!(
                "decay parameter must lie in (0, 1), got {decay}"
            )));
        }
        let letters = Dyadic::alphabet(denom_bound);
        if denom_bound < 2 || letters.is_empty() {
            return Err(Error::invalid(
                "denominator bound must admit at least one dyadic letter",
            ));
        }

        let fanout = letters.len() as u64;
        let mut projected: u64 = 0;
        let mut level: u64 = 1;
        for _ in 0..=depth {
            projected = projected.saturating_add(level);
            level = level.saturating_mul(fanout);
            if projected > MAX_DENDRITE_ARCS {
                return Err(Error::capacity(format!(
                    "dendrite with depth {depth} and {fanout} letters exceeds {MAX_DENDRITE_ARCS} arcs"
                )));
            }
        }

        let mut builder = Builder::default();
        let mut arcs: Vec<DendriteArc> = Vec::new();
        let mut lookup = BTreeMap::new();

        let root_base = builder.new_vertex();
        let mut queue: Vec<(DyadicAddress, usize, usize)> =
            vec![(DyadicAddress::root(), root_base, 0)];

        while let Some((address, base, k)) = queue.pop() {
            let length = decay.powi(k as i32);
            let tip = builder.new_vertex();

            let mut cuts = vec![0.0];
            let mut piece_starts = vec![base];
            if k < depth {
                for letter in &letters {
                    cuts.push(letter.value() * length);
                    piece_starts.push(builder.new_vertex());
                }
            }
            cuts.push(length);

            let mut pieces = Vec::with_capacity(cuts.len() - 1);
            for i in 0..cuts.len() - 1 {
                let from = piece_starts[i];
                let to = if i + 1 == cuts.len() - 1 {
                    tip
                } else {
                    piece_starts[i + 1]
                };
                pieces.push(builder.new_edge(from, to, cuts[i + 1] - cuts[i]));
            }

            if k < depth {
                // Children attach at the interior cut vertices, deepest
                // (smallest letter) first so ids stay deterministic.
                for (j, letter) in letters.iter().enumerate() {
                    queue.push((address.child(*letter), piece_starts[j + 1], k + 1));
                }
            }

            let idx = arcs.len();
            lookup.insert(address.clone(), idx);
            arcs.push(DendriteArc {
                address,
                base: VertexId(base),
                tip: VertexId(tip),
                length,
                pieces,
                cuts,
            });
        }

        let tree = MetricTree::new(builder.vertex_count, builder.edges)?;
        Ok(UniversalDendriteModel {
            depth,
            denom_bound,
            decay,
            tree: Arc::new(tree),
            arcs,
            lookup,
            letters,
        })
    }

    /// The standard truncation used throughout: depth 4, denominators up to
    /// 8, decay 1/2.
    pub fn standard() -> Result<Self> {
        Self::build(4, 8, 0.5)
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn denom_bound(&self) -> u32 {
        self.denom_bound
    }

    pub fn decay(&self) -> f64 {
        self.decay
    }

    pub fn tree(&self) -> &MetricTree {
        &self.tree
    }

    pub fn shared_tree(&self) -> Arc<MetricTree> {
        Arc::clone(&self.tree)
    }

    pub fn letters(&self) -> &[Dyadic] {
        &self.letters
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn arcs(&self) -> &[DendriteArc] {
        &self.arcs
    }

    pub fn arc_info(&self, address: &DyadicAddress) -> Result<&DendriteArc> {
        self.lookup
            .get(address)
            .map(|&i| &self.arcs[i])
            .ok_or_else(|| Error::invalid(format!("address {address} not in this truncation")))
    }

    /// Addresses at a given depth, in deterministic (lexicographic) order.
    pub fn addresses_at_depth(&self, k: usize) -> Vec<&DyadicAddress> {
        self.arcs
            .iter()
            .filter(|a| a.address.len() == k)
            .map(|a| &a.address)
            .collect()
    }

    /// Point at arclength fraction `t ∈ [0, 1]` along the arc `A_α`,
    /// measured from `a_α`; `t = 1` is the tip `b_α`.
    pub fn point_at(&self, address: &DyadicAddress, t: f64) -> Result<Point> {
        if !(t.is_finite() && (0.0..=1.0).contains(&t)) {
            return Err(Error::InvalidPoint(format!(
                "arc parameter {t} outside [0, 1]"
            )));
        }
        let arc = self.arc_info(address)?;
        if t == 0.0 {
            return self.tree.vertex_point(arc.base);
        }
        if t == 1.0 {
            return self.tree.vertex_point(arc.tip);
        }
        let pos = t * arc.length;
        let mut piece = arc.cuts.len() - 2;
        for i in 0..arc.cuts.len() - 1 {
            if pos <= arc.cuts[i + 1] {
                piece = i;
                break;
            }
        }
        let lo = arc.cuts[piece];
        let hi = arc.cuts[piece + 1];
        let local = ((pos - lo) / (hi - lo)).clamp(0.0, 1.0);
        self.tree.edge_point(arc.pieces[piece], local)
    }

    /// The tip `b_α`.
    pub fn tip(&self, address: &DyadicAddress) -> Result<Point> {
        let arc = self.arc_info(address)?;
        self.tree.vertex_point(arc.tip)
    }

    /// The attachment point `a_α`.
    pub fn base(&self, address: &DyadicAddress) -> Result<Point> {
        let arc = self.arc_info(address)?;
        self.tree.vertex_point(arc.base)
    }

    pub fn total_length(&self) -> f64 {
        self.tree.total_length()
    }
}

#[derive(Default)]
struct Builder {
    vertex_count: usize,
    edges: Vec<(usize, usize, f64)>,
}

impl Builder {
    fn new_vertex(&mut self) -> usize {
        let v = self.vertex_count;
        self.vertex_count += 1;
        v
    }

    fn new_edge(&mut self, a: usize, b: usize, length: f64) -> EdgeId {
        let id = EdgeId(self.edges.len());
        self.edges.push((a, b, length));
        id
    }
}

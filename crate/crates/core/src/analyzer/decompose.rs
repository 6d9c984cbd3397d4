//! Diagnostic decompositions of the weighted averages.
//!
//! * [`ergodic_bound_decomposition`] splits `|S_N(x, φ)|` against the
//!   triangle bound `(1/N) Σ |φ - φ(o)|(fⁿx) + |φ(o)| · |(1/N) Σ μ(n)|`
//!   available when the system has a designated fixed point `o`. The
//!   inequality is a pointwise triangle inequality, so it must hold at
//!   every checkpoint with no tolerance.
//! * [`component_case_split`] decomposes `S_N(x, ψ_U)` over the components
//!   of a chosen level of a cycle hierarchy. Components fully inside `U`
//!   contribute progression means of μ, components missing `U` contribute
//!   nothing, and straddling components (which can only be entered every
//!   `k` steps) contribute means over a k-separated support, giving the
//!   `2/k` tail bound for the total.

use serde::Serialize;

use crate::arithmetic::MobiusTable;
use crate::systems::DynSystem;
use crate::topology::Point;
use crate::{Error, Result};

use super::average::{validate_checkpoints, WeightedAccumulator};
use super::{Region, TestFunction};

#[derive(Debug, Clone, Serialize)]
pub struct BoundDecomposition {
    pub checkpoints: Vec<u64>,
    /// `|S_N(x, φ)|`.
    pub weighted_abs: Vec<f64>,
    /// `(1/N) Σ_{n≤N} |φ(fⁿx) - φ(o)|`.
    pub birkhoff_abs: Vec<f64>,
    /// `|φ(o)| · |(1/N) Σ_{n≤N} μ(n)|`.
    pub fixed_term: Vec<f64>,
}

impl BoundDecomposition {
    /// Triangle inequality `weighted ≤ birkhoff + fixed`, checked with no
    /// tolerance at every checkpoint.
    pub fn inequality_holds(&self) -> bool {
        self.weighted_abs
            .iter()
            .zip(self.birkhoff_abs.iter().zip(&self.fixed_term))
            .all(|(w, (b, f))| *w <= b + f)
    }

    /// Slack `birkhoff + fixed - weighted` at each checkpoint.
    pub fn slack(&self) -> Vec<f64> {
        self.weighted_abs
            .iter()
            .zip(self.birkhoff_abs.iter().zip(&self.fixed_term))
            .map(|(w, (b, f))| b + f - w)
            .collect()
    }
}

/// Decompose `S_N(x, φ)` around the value of φ at the system's fixed
/// point. Requires a system with a designated fixed point.
pub fn ergodic_bound_decomposition(
    table: &MobiusTable,
    sys: &DynSystem,
    x: &Point,
    phi: &TestFunction,
    checkpoints: &[u64],
) -> Result<BoundDecomposition> {
    validate_checkpoints(checkpoints, table.limit())?;
    let origin = sys.fixed_point().ok_or_else(|| {
        Error::invalid("bound decomposition requires a system with a designated fixed point")
    })?;
    let space = sys.space();
    let phi_o = phi.evaluate(space, &origin);

    let mut cursor = sys.orbit(x)?;
    let mut centered = WeightedAccumulator::new(); // Σ μ(n) (φ - φ(o))
    let mut birkhoff = WeightedAccumulator::new(); // Σ |φ - φ(o)|
    let mut mu_sum: i64 = 0;

    let mut weighted_abs = Vec::with_capacity(checkpoints.len());
    let mut birkhoff_abs = Vec::with_capacity(checkpoints.len());
    let mut fixed_term = Vec::with_capacity(checkpoints.len());

    let mut next = 0usize;
    let max_n = *checkpoints.last().expect("nonempty");
    for n in 1..=max_n {
        cursor.advance();
        let value = phi.evaluate(space, &cursor.current());
        let delta = value - phi_o;
        let mu = table.mu(n);
        mu_sum += mu as i64;
        if mu != 0 {
            centered.add(delta, mu as i64);
        }
        birkhoff.add(delta.abs(), 1);
        if checkpoints[next] == n {
            let n_f = n as f64;
            let m_f = mu_sum as f64;
            weighted_abs.push((centered.total() + phi_o * m_f).abs() / n_f);
            birkhoff_abs.push(birkhoff.total() / n_f);
            // Same operation order as the weighted term so the inequality
            // degenerates to bit-exact equality when φ is constant.
            fixed_term.push((phi_o * m_f).abs() / n_f);
            next += 1;
            if next == checkpoints.len() {
                break;
            }
        }
    }

    Ok(BoundDecomposition {
        checkpoints: checkpoints.to_vec(),
        weighted_abs,
        birkhoff_abs,
        fixed_term,
    })
}

/// Set relation of one cycle component against the region.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ComponentClass {
    /// Component contained in the region.
    Inside,
    /// Component meets the region without being contained in it.
    Straddling,
    /// Component disjoint from the region.
    Outside,
}

#[derive(Debug, Clone, Serialize)]
pub struct ComponentRow {
    pub index: u64,
    pub class: ComponentClass,
    /// `(1/N) Σ over visits to this component of μ(n) ψ_U(fⁿx)` at the
    /// final checkpoint.
    pub average: f64,
    pub visits: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CaseSplitReport {
    pub level: usize,
    /// Cycle length `k` of the chosen level.
    pub modulus: u64,
    pub components: Vec<ComponentRow>,
    pub checkpoints: Vec<u64>,
    /// `S_N(x, ψ_U)` at each checkpoint (all components plus off-cycle
    /// visits combined).
    pub totals: Vec<f64>,
    /// Contribution of orbit times spent above the chosen level.
    pub off_cycle_average: f64,
    /// Tail bound `2/k` for straddling contributions.
    pub bound: f64,
}

impl CaseSplitReport {
    pub fn last_decade_max(&self) -> f64 {
        let max_n = *self.checkpoints.last().expect("nonempty");
        let floor = max_n / 10;
        self.checkpoints
            .iter()
            .zip(&self.totals)
            .filter(|(n, _)| **n >= floor)
            .map(|(_, v)| v.abs())
            .fold(0.0, f64::max)
    }
}

/// Split `S_N(x, ψ_U)` by the level-`level` components of a solenoid or
/// nested-decomposition system.
pub fn component_case_split(
    table: &MobiusTable,
    sys: &DynSystem,
    x: &Point,
    region: Region,
    level: usize,
    checkpoints: &[u64],
) -> Result<CaseSplitReport> {
    validate_checkpoints(checkpoints, table.limit())?;
    let hierarchy = sys
        .hierarchy()
        .ok_or_else(|| Error::invalid("case split requires a solenoid or nested system"))?;
    if level == 0 || level > hierarchy.depth() {
        return Err(Error::invalid(format!(
            "level {level} outside 1..={}",
            hierarchy.depth()
        )));
    }
    let space = sys.space();
    let psi = TestFunction::region_indicator(space, region)?;
    let modulus = hierarchy.periods()[level - 1];

    // Set-level classification of each component against the region, by
    // probing its edges at the endpoints and interior.
    let mut classes = Vec::with_capacity(modulus as usize);
    for class in 0..modulus {
        let edges = hierarchy.component_edges(level, class)?;
        let mut any_inside = false;
        let mut all_inside = true;
        for e in edges {
            for t in [0.0, 0.25, 0.5, 0.75, 1.0] {
                let p = space.edge_point(e, t)?;
                if psi.evaluate(space, &p) == 1.0 {
                    any_inside = true;
                } else {
                    all_inside = false;
                }
            }
        }
        classes.push(if all_inside {
            ComponentClass::Inside
        } else if any_inside {
            ComponentClass::Straddling
        } else {
            ComponentClass::Outside
        });
    }

    let mut per_component: Vec<WeightedAccumulator> =
        (0..modulus).map(|_| WeightedAccumulator::new()).collect();
    let mut visits = vec![0u64; modulus as usize];
    let mut off_cycle = WeightedAccumulator::new();

    let mut totals = Vec::with_capacity(checkpoints.len());
    let mut cursor = sys.orbit(x)?;
    let mut next = 0usize;
    let max_n = *checkpoints.last().expect("nonempty");
    for n in 1..=max_n {
        cursor.advance();
        let point = cursor.current();
        let component = hierarchy.component_of(&point, level)?;
        if let Some(c) = component {
            visits[c as usize] += 1;
        }
        let mu = table.mu(n);
        if mu != 0 {
            let value = psi.evaluate(space, &point);
            match component {
                Some(c) => per_component[c as usize].add(value, mu as i64),
                None => off_cycle.add(value, mu as i64),
            }
        }
        if checkpoints[next] == n {
            let mut sum = off_cycle.total();
            for acc in &per_component {
                sum += acc.total();
            }
            totals.push(sum / n as f64);
            next += 1;
            if next == checkpoints.len() {
                break;
            }
        }
    }

    let n_f = max_n as f64;
    let components = (0..modulus)
        .map(|c| ComponentRow {
            index: c,
            class: classes[c as usize],
            average: per_component[c as usize].total() / n_f,
            visits: visits[c as usize],
        })
        .collect();

    Ok(CaseSplitReport {
        level,
        modulus,
        components,
        checkpoints: checkpoints.to_vec(),
        totals,
        off_cycle_average: off_cycle.total() / n_f,
        bound: 2.0 / modulus as f64,
    })
}

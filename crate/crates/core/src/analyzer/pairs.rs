//! Finite-horizon pair classification and the asymptotic transfer check.
//!
//! A pair is proximal when its orbit distance dips arbitrarily low,
//! asymptotic when the distance converges to zero, and Li-Yorke when it is
//! proximal but not asymptotic. Finite runs can only produce evidence for
//! these properties, never proof, and the verdict names say so.

use serde::Serialize;

use crate::arithmetic::MobiusTable;
use crate::systems::DynSystem;
use crate::topology::Point;
use crate::{Error, Result, POINT_TOLERANCE};

use super::average::{mobius_average, validate_checkpoints, ConvergenceReport};
use super::TestFunction;

/// How much larger than ε the running max must be before a proximal pair
/// is upgraded to Li-Yorke evidence.
const LI_YORKE_FACTOR: f64 = 10.0;

/// Default ε used when gating the transfer check.
const TRANSFER_GATE_EPSILON: f64 = 1e-6;

/// Horizon used when gating the transfer check.
const TRANSFER_GATE_HORIZON: u64 = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PairVerdict {
    AsymptoticEvidence,
    ProximalEvidence,
    LiYorkeEvidence,
    Separated,
}

#[derive(Debug, Clone, Serialize)]
pub struct PairClassification {
    pub verdict: PairVerdict,
    /// Running min/max of the orbit distance over the window `[N/2, N]`.
    pub min_distance: f64,
    pub max_distance: f64,
    pub horizon: u64,
    pub epsilon: f64,
}

/// Classify a pair from the tail window `[horizon/2, horizon]` of its
/// orbit distances.
pub fn classify_pair(
    sys: &DynSystem,
    x: &Point,
    y: &Point,
    horizon: u64,
    epsilon: f64,
) -> Result<PairClassification> {
    if horizon < 2 {
        return Err(Error::invalid("horizon must be at least 2"));
    }
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(Error::invalid("epsilon must be positive"));
    }
    let mut orbit_x = sys.orbit(x)?;
    let mut orbit_y = sys.orbit(y)?;
    let window_start = horizon / 2;
    let mut min_d = f64::INFINITY;
    let mut max_d: f64 = 0.0;
    for n in 1..=horizon {
        orbit_x.advance();
        orbit_y.advance();
        if n >= window_start {
            let d = sys.distance(&orbit_x.current(), &orbit_y.current())?;
            min_d = min_d.min(d);
            max_d = max_d.max(d);
        }
    }
    let verdict = if max_d < epsilon {
        PairVerdict::AsymptoticEvidence
    } else if min_d < epsilon {
        if max_d >= LI_YORKE_FACTOR * epsilon {
            PairVerdict::LiYorkeEvidence
        } else {
            PairVerdict::ProximalEvidence
        }
    } else {
        PairVerdict::Separated
    };
    Ok(PairClassification {
        verdict,
        min_distance: min_d,
        max_distance: max_d,
        horizon,
        epsilon,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct TransferReport {
    pub x_report: ConvergenceReport,
    pub y_report: ConvergenceReport,
    /// Sup of `|S_N(x) - S_N(y)|` over checkpoints past the burn-in.
    pub max_deviation: f64,
    pub burn_in: u64,
}

/// Compare `S_N(x, φ)` and `S_N(y, φ)` for a pair that is asymptotic (by
/// construction or by finite-horizon evidence). Checkpoints below the
/// burn-in `N_max/10` are excluded from the deviation sup, mirroring the
/// split of the tail estimate at a finite transient.
pub fn transfer_deviation(
    table: &MobiusTable,
    sys: &DynSystem,
    x: &Point,
    y: &Point,
    phi: &TestFunction,
    checkpoints: &[u64],
) -> Result<TransferReport> {
    validate_checkpoints(checkpoints, table.limit())?;
    let same_point = sys.distance(x, y)? <= POINT_TOLERANCE;
    if !same_point {
        let horizon = TRANSFER_GATE_HORIZON.min(*checkpoints.last().expect("nonempty"));
        let class = classify_pair(sys, x, y, horizon.max(2), TRANSFER_GATE_EPSILON)?;
        if class.verdict != PairVerdict::AsymptoticEvidence {
            return Err(Error::invalid(format!(
                "pair is not asymptotic at the gate horizon (verdict {:?})",
                class.verdict
            )));
        }
    }
    let x_report = mobius_average(table, sys, x, phi, checkpoints)?;
    let y_report = mobius_average(table, sys, y, phi, checkpoints)?;
    let max_n = *checkpoints.last().expect("nonempty");
    let burn_in = max_n / 10;
    let max_deviation = checkpoints
        .iter()
        .enumerate()
        .filter(|(_, n)| **n >= burn_in)
        .map(|(i, _)| (x_report.values[i] - y_report.values[i]).abs())
        .fold(0.0, f64::max);
    Ok(TransferReport {
        x_report,
        y_report,
        max_deviation,
        burn_in,
    })
}

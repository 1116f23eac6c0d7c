//! The default parameter grid swept by table commands and the acceptance suite.

use crate::classify::JanowskiParams;
use crate::error::Result;
use crate::qarith::{LambdaConvention, QContext};

pub const Q_VALUES: [f64; 5] = [0.3, 0.5, 0.7, 0.9, 0.99];
pub const P_VALUES: [u32; 3] = [1, 2, 3];
pub const MU_VALUES: [f64; 3] = [0.0, 1.0, 2.5];
/// `(A, B)` pairs; the last is the `A = 1 - α`, `B = -1` case with `α = 0.25`.
pub const AB_VALUES: [(f64, f64); 4] = [(1.0, -1.0), (1.0, 0.0), (0.5, -0.5), (0.75, -1.0)];

/// One point of the grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub ctx: QContext,
    pub jp: JanowskiParams,
}

/// Every combination of the default values, q varying slowest.
pub fn default_grid(convention: LambdaConvention) -> Result<Vec<GridPoint>> {
    let mut out = Vec::with_capacity(Q_VALUES.len() * P_VALUES.len() * MU_VALUES.len() * AB_VALUES.len());
    for q in Q_VALUES {
        for p in P_VALUES {
            for mu in MU_VALUES {
                for (a, b) in AB_VALUES {
                    out.push(GridPoint {
                        ctx: QContext::with_convention(p, q, mu, convention)?,
                        jp: JanowskiParams::new(a, b)?,
                    });
                }
            }
        }
    }
    Ok(out)
}

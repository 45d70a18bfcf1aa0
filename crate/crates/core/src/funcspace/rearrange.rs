//! Schwarz rearrangement of nonnegative radial profiles.

use super::function::RadialFunction;
use crate::error::{domain, Result};

/// Decreasing rearrangement in the hyperbolic volume coordinate.
///
/// Node values are sorted in decreasing order together with their dual-cell
/// volumes, laid out as a step function of volume, and averaged over each
/// node's dual cell. The result is nonincreasing and equimeasurable with the
/// input at the resolution of one cell.
pub fn schwarz_rearrange(u: &RadialFunction) -> Result<RadialFunction> {
    if let Some(v) = u.values().iter().find(|v| **v < 0.0) {
        return Err(domain(format!(
            "rearrangement needs a nonnegative profile (found {v}); apply it to the absolute value"
        )));
    }
    let grid = u.grid().clone();
    let weights = grid.weights();
    let values = u.values();
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    // Stable sort keeps already nonincreasing input in place.
    order.sort_by(|&i, &j| values[j].total_cmp(&values[i]));

    let mut out = vec![0.0; n];
    let mut src = 0;
    let mut src_left = weights[order[0]];
    for (k, slot) in out.iter_mut().enumerate() {
        let mut need = weights[k];
        if need <= 0.0 {
            *slot = values[order[src.min(n - 1)]];
            continue;
        }
        let total = need;
        let mut acc = 0.0;
        while need > 0.0 && src < n {
            let take = need.min(src_left);
            acc += take * values[order[src]];
            need -= take;
            src_left -= take;
            if src_left <= 0.0 {
                src += 1;
                if src < n {
                    src_left = weights[order[src]];
                }
            }
        }
        // Rounding can leave a sliver of volume unfilled at the very end.
        if need > 0.0 {
            acc += need * values[order[n - 1]];
        }
        *slot = acc / total;
    }
    // Averaging a nonincreasing step function keeps the order, up to rounding.
    for k in 1..n {
        if out[k] > out[k - 1] {
            out[k] = out[k - 1];
        }
    }
    u.with_values(out)
}

use crate::error::{EmptySide, Error, Result};
use crate::scalar::Real;

use super::config::EdgePolicy;
use super::Metric;

/// Value reported for `metric` when at least one mask is empty, with the
/// warning that must accompany it. Returns `None` when neither is empty.
pub fn edge_case<T: Real>(
    metric: Metric,
    empty_a: bool,
    empty_b: bool,
    policy: EdgePolicy,
) -> Option<Result<(T, EmptySide)>> {
    let side = match (empty_a, empty_b) {
        (false, false) => return None,
        (true, false) => EmptySide::A,
        (false, true) => EmptySide::B,
        (true, true) => EmptySide::Both,
    };
    Some(match policy {
        EdgePolicy::Reloaded => {
            let value = match (side, metric.is_absolute()) {
                (EmptySide::Both, true) => T::zero(),
                (EmptySide::Both, false) => T::one(),
                (_, true) => T::infinity(),
                (_, false) => T::zero(),
            };
            Ok((value, side))
        }
        EdgePolicy::NaN => Ok((T::nan(), side)),
        EdgePolicy::Error => Err(Error::EmptyInput {
            metric,
            which: side,
        }),
    })
}

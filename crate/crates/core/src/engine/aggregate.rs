use crate::engine::program::{AggregatorSpec, Contribution};

/// Name of the aggregator the engine maintains on its own: the L1 change of
/// vertex values during a superstep.
pub const L1_DELTA: &str = "l1_delta";

/// Folds contributions in the given order, starting from each identity.
pub(crate) fn fold_contributions(
    specs: &[AggregatorSpec],
    contributions: &[Contribution],
) -> Vec<f64> {
    let mut acc: Vec<f64> = specs.iter().map(|s| s.identity).collect();
    for c in contributions {
        let spec = &specs[c.aggregator];
        acc[c.aggregator] = (spec.reduce)(acc[c.aggregator], c.value);
    }
    acc
}

/// Reduces per-worker partials (`partials[worker][aggregator]`) in
/// worker-index order. No partials yields the identities.
pub fn reduce_aggregators(specs: &[AggregatorSpec], partials: &[Vec<f64>]) -> Vec<f64> {
    let mut acc: Vec<f64> = specs.iter().map(|s| s.identity).collect();
    for partial in partials {
        debug_assert_eq!(partial.len(), specs.len());
        for (i, spec) in specs.iter().enumerate() {
            acc[i] = (spec.reduce)(acc[i], partial[i]);
        }
    }
    acc
}

/// |new - old|, treating equal infinities as unchanged.
pub(crate) fn value_change(old: f64, new: f64) -> f64 {
    if old == new || (old.is_nan() && new.is_nan()) {
        0.0
    } else {
        let d = (new - old).abs();
        if d.is_nan() {
            f64::INFINITY
        } else {
            d
        }
    }
}

//! Deterministic reductions.
//!
//! Every quadrature and norm in the crate funnels through these helpers so
//! the floating-point association order is fixed by the input length alone,
//! independent of call site or thread count.

const PAIRWISE_BASE: usize = 32;

/// Pairwise (tree) summation with a fixed split at the midpoint.
pub fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= PAIRWISE_BASE {
        let mut acc = 0.0;
        for &x in v {
            acc += x;
        }
        acc
    } else {
        let mid = v.len() / 2;
        pairwise_sum(&v[..mid]) + pairwise_sum(&v[mid..])
    }
}

/// Maximum of |v| over a slice, 0 for an empty slice.
pub fn max_abs(v: &[f64]) -> f64 {
    let mut m = 0.0f64;
    for &x in v {
        let a = x.abs();
        if a > m {
            m = a;
        }
    }
    m
}

/// Minimum over a slice, +inf for an empty slice.
pub fn min(v: &[f64]) -> f64 {
    let mut m = f64::INFINITY;
    for &x in v {
        if x < m {
            m = x;
        }
    }
    m
}

/// Maximum over a slice, -inf for an empty slice.
pub fn max(v: &[f64]) -> f64 {
    let mut m = f64::NEG_INFINITY;
    for &x in v {
        if x > m {
            m = x;
        }
    }
    m
}

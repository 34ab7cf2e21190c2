//! Fixtures shared by the benchmarks.

use std::sync::Arc;

use rosen_core::{GroupElement, QContext, Vertex};

pub fn context(q: u32) -> Arc<QContext> {
    QContext::finite(q).expect("valid q")
}

/// The vertex reached by the continued fraction `coeffs`.
pub fn vertex(ctx: &Arc<QContext>, coeffs: &[i64]) -> Vertex {
    Vertex::from_group(&GroupElement::from_cf(ctx, coeffs).expect("valid coefficients"))
}

/// A deterministic, moderately long coefficient sequence.
pub fn sample_coeffs(len: usize) -> Vec<i64> {
    (0..len as i64)
        .map(|i| [3, -2, 5, 2, -4, 3][(i % 6) as usize])
        .collect()
}

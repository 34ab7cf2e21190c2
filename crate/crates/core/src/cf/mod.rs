//! Rosen continued fractions `[b_1, …, b_n]_q = b_1λ - 1/(b_2λ - 1/(…))`.

mod automaton;
mod enumerate;
mod infinite;
mod rewrite;
mod text;

use std::fmt;
use std::sync::Arc;

use num_traits::ToPrimitive;
use serde::{Serialize, Serializer};

use crate::algebraic::{HeckeIndex, QContext};
use crate::error::{Error, Result};
use crate::farey::{adjacent, nearest_integer_walk, phi, Vertex};
use crate::moebius::{BoundaryPoint, GroupElement};
use crate::oracle;

pub use automaton::{build_pattern_automaton, PatternAutomaton, PatternKind, PatternMatch, Symbol};
pub use enumerate::{
    enumerate_geodesic_expansions, expansion_count_bounds, geodesic_distance, CountBounds,
};
pub use infinite::{
    convergence_estimate, infinite_convergents, is_geodesic_infinite_prefix, CoefficientStream,
    ConvergenceReport, InfiniteRosenCF,
};
pub use rewrite::{
    insert_relation, insert_zero, reduce_to_geodesic, reduce_to_geodesic_with_trace, remove_zero,
    rewrite_interleaved_block, rewrite_ones_block, RewriteStep,
};
pub use text::{parse_cf, parse_q_prefix, ParsedCF};

/// A finite Rosen continued fraction.
#[derive(Clone, PartialEq, Eq)]
pub struct RosenCF {
    ctx: Arc<QContext>,
    coeffs: Vec<i64>,
}

impl RosenCF {
    pub fn new(ctx: &Arc<QContext>, coeffs: Vec<i64>) -> Result<RosenCF> {
        if coeffs.is_empty() {
            return Err(Error::EmptySequence);
        }
        Ok(RosenCF {
            ctx: Arc::clone(ctx),
            coeffs,
        })
    }

    pub fn context(&self) -> &Arc<QContext> {
        &self.ctx
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<i64> {
        self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// T_{b_1} ⋯ T_{b_n}.
    pub fn matrix(&self) -> GroupElement {
        GroupElement::from_cf(&self.ctx, &self.coeffs).expect("non-empty")
    }

    /// The exact value, which is ∞ when the lower-left matrix entry vanishes.
    pub fn evaluate(&self) -> BoundaryPoint {
        self.matrix().apply(&BoundaryPoint::Infinity)
    }

    /// The path ⟨∞, v_1, …, v_n⟩ of convergents.
    pub fn convergents(&self) -> PathOfConvergents {
        let mut g = GroupElement::identity(&self.ctx);
        let mut vertices = Vec::with_capacity(self.coeffs.len() + 1);
        vertices.push(Vertex::infinity(&self.ctx));
        for &b in &self.coeffs {
            g = g.mul_t(&b.into());
            vertices.push(Vertex::from_group(&g));
        }
        PathOfConvergents { vertices }
    }

    /// `[-b_1, …, -b_n]`, whose path is the mirror image under κ.
    pub fn negated(&self) -> Result<RosenCF> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|&b| {
                b.checked_neg()
                    .ok_or_else(|| Error::CoefficientOverflow(b.to_string()))
            })
            .collect::<Result<_>>()?;
        RosenCF::new(&self.ctx, coeffs)
    }
}

impl fmt::Display for RosenCF {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "q={} [", self.ctx.q())?;
        for (i, b) in self.coeffs.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{b}")?;
        }
        f.write_str("]")
    }
}

impl fmt::Debug for RosenCF {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for RosenCF {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            q: HeckeIndex,
            coeffs: &'a [i64],
            text: String,
        }
        Repr {
            q: self.ctx.q(),
            coeffs: &self.coeffs,
            text: self.to_string(),
        }
        .serialize(s)
    }
}

/// A path in F_q that starts at ∞.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PathOfConvergents {
    vertices: Vec<Vertex>,
}

impl PathOfConvergents {
    /// Checks that the path starts at ∞ and that consecutive vertices are
    /// adjacent.
    pub fn new(vertices: Vec<Vertex>) -> Result<PathOfConvergents> {
        match vertices.first() {
            None => return Err(Error::EmptySequence),
            Some(v) if !v.is_infinity() => {
                return Err(Error::InvalidParameter(
                    "path must start at infinity".into(),
                ))
            }
            _ => {}
        }
        for w in vertices.windows(2) {
            if !adjacent(&w[0], &w[1]) {
                return Err(Error::NotAdjacent(w[0].to_string(), w[1].to_string()));
            }
        }
        Ok(PathOfConvergents { vertices })
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    /// Number of edges.
    pub fn len(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn last(&self) -> &Vertex {
        self.vertices.last().expect("non-empty")
    }
}

/// The continued fraction whose convergents are the vertices of `path`.
pub fn path_to_cf(path: &PathOfConvergents) -> Result<RosenCF> {
    let v = path.vertices();
    let ctx = v[0].context();
    if v.len() < 2 {
        return Err(Error::EmptySequence);
    }
    let mut coeffs = Vec::with_capacity(v.len() - 1);
    let first = v[1]
        .point()
        .finite()
        .and_then(|x| x.as_lambda_multiple())
        .ok_or_else(|| Error::NotAdjacent("inf".into(), v[1].to_string()))?;
    coeffs.push(
        first
            .to_i64()
            .ok_or_else(|| Error::CoefficientOverflow(first.to_string()))?,
    );
    for w in v.windows(3) {
        coeffs.push(phi(&w[0], &w[1], &w[2])?);
    }
    RosenCF::new(ctx, coeffs)
}

/// The nearest-integer expansion of a vertex.
pub fn nearest_integer_expansion(ctx: &Arc<QContext>, y: &BoundaryPoint) -> Result<RosenCF> {
    let x = match y {
        BoundaryPoint::Infinity => return Err(Error::InfiniteTarget),
        BoundaryPoint::Finite(x) => x,
    };
    let v = Vertex::from_point(ctx, y)?;
    let (coeffs, _) = nearest_integer_walk(x).ok_or_else(|| Error::NotAVertex(v.to_string()))?;
    let coeffs = coeffs
        .into_iter()
        .map(|b| {
            b.to_i64()
                .ok_or_else(|| Error::CoefficientOverflow(b.to_string()))
        })
        .collect::<Result<Vec<_>>>()?;
    RosenCF::new(ctx, coeffs)
}

/// Outcome of a geodesic test, with the first forbidden pattern if any.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GeodesicReport {
    pub geodesic: bool,
    pub violation: Option<PatternMatch>,
    /// True when the answer came from the brute-force distance check.
    pub via_oracle: bool,
}

impl GeodesicReport {
    pub fn reason(&self) -> Option<String> {
        match (&self.violation, self.geodesic) {
            (Some(m), _) => Some(m.to_string()),
            (None, false) => Some("shorter expansion exists".into()),
            (None, true) => None,
        }
    }
}

/// Decides whether `cf` is a geodesic expansion of its value.
///
/// For q ≥ 4 and q = ∞ this scans `b_2, …, b_n` with the forbidden-pattern
/// automaton. For q = 3 it falls back to the distance oracle.
pub fn check_geodesic(cf: &RosenCF) -> Result<GeodesicReport> {
    if cf.context().q() == HeckeIndex::Finite(3) {
        return Ok(GeodesicReport {
            geodesic: oracle::is_geodesic_oracle(cf)?,
            violation: None,
            via_oracle: true,
        });
    }
    let automaton = build_pattern_automaton(cf.context())?;
    let violation = automaton.find(cf.coeffs());
    Ok(GeodesicReport {
        geodesic: violation.is_none(),
        violation,
        via_oracle: false,
    })
}

pub fn is_geodesic(cf: &RosenCF) -> Result<bool> {
    Ok(check_geodesic(cf)?.geodesic)
}

/// The shifted Fibonacci numbers F_0 = 1, F_1 = 2, F_{n+1} = F_n + F_{n-1}.
///
/// Saturates at `u128::MAX` (from n = 184 on).
pub fn fibonacci(n: u32) -> u128 {
    let (mut a, mut b) = (1u128, 2u128);
    for _ in 0..n {
        let next = a.saturating_add(b);
        a = b;
        b = next;
    }
    a
}

//! Infinite Rosen continued fractions given by a finite description.

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Serialize, Serializer};

use super::automaton::build_pattern_automaton;
use crate::algebraic::{FieldElement, QContext, RealInterval};
use crate::error::{Error, Result};
use crate::moebius::{BoundaryPoint, GroupElement};

/// A lazily evaluated coefficient sequence.
#[derive(Clone)]
pub enum CoefficientStream {
    /// `preperiod` followed by `period` repeated forever.
    Periodic {
        preperiod: Vec<i64>,
        period: Vec<i64>,
    },
    /// `b_{i+1} = f(i)`, for streams that are not eventually periodic.
    Generated {
        description: String,
        f: Arc<dyn Fn(usize) -> i64 + Send + Sync>,
    },
}

impl CoefficientStream {
    pub fn periodic(preperiod: Vec<i64>, period: Vec<i64>) -> Result<CoefficientStream> {
        if period.is_empty() {
            return Err(Error::EmptySequence);
        }
        Ok(CoefficientStream::Periodic { preperiod, period })
    }

    pub fn generated(
        description: impl Into<String>,
        f: impl Fn(usize) -> i64 + Send + Sync + 'static,
    ) -> CoefficientStream {
        CoefficientStream::Generated {
            description: description.into(),
            f: Arc::new(f),
        }
    }

    /// The coefficient at 0-based index `i`.
    pub fn get(&self, i: usize) -> i64 {
        match self {
            CoefficientStream::Periodic { preperiod, period } => {
                if i < preperiod.len() {
                    preperiod[i]
                } else {
                    period[(i - preperiod.len()) % period.len()]
                }
            }
            CoefficientStream::Generated { f, .. } => f(i),
        }
    }

    pub fn prefix(&self, n: usize) -> Vec<i64> {
        (0..n).map(|i| self.get(i)).collect()
    }
}

impl fmt::Display for CoefficientStream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[i64]| v.iter().map(i64::to_string).collect::<Vec<_>>().join(",");
        match self {
            CoefficientStream::Periodic { preperiod, period } => {
                write!(f, "[{};({})]", join(preperiod), join(period))
            }
            CoefficientStream::Generated { description, .. } => f.write_str(description),
        }
    }
}

impl fmt::Debug for CoefficientStream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// An infinite Rosen continued fraction.
#[derive(Clone, Debug)]
pub struct InfiniteRosenCF {
    ctx: Arc<QContext>,
    stream: CoefficientStream,
}

impl InfiniteRosenCF {
    pub fn new(ctx: &Arc<QContext>, stream: CoefficientStream) -> InfiniteRosenCF {
        InfiniteRosenCF {
            ctx: Arc::clone(ctx),
            stream,
        }
    }

    pub fn periodic(ctx: &Arc<QContext>, preperiod: Vec<i64>, period: Vec<i64>) -> Result<Self> {
        Ok(Self::new(
            ctx,
            CoefficientStream::periodic(preperiod, period)?,
        ))
    }

    pub fn context(&self) -> &Arc<QContext> {
        &self.ctx
    }

    pub fn stream(&self) -> &CoefficientStream {
        &self.stream
    }
}

impl fmt::Display for InfiniteRosenCF {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "q={} {}", self.ctx.q(), self.stream)
    }
}

impl Serialize for InfiniteRosenCF {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_string().serialize(s)
    }
}

/// The first `n` convergents, exactly.
pub fn infinite_convergents(cf: &InfiniteRosenCF, n: usize) -> Vec<BoundaryPoint> {
    let mut g = GroupElement::identity(&cf.ctx);
    (0..n)
        .map(|i| {
            g = g.mul_t(&BigInt::from(cf.stream.get(i)));
            g.apply(&BoundaryPoint::Infinity)
        })
        .collect()
}

/// True when `[b_1, …, b_n]` has no forbidden pattern.
pub fn is_geodesic_infinite_prefix(cf: &InfiniteRosenCF, n: usize) -> Result<bool> {
    let automaton = build_pattern_automaton(&cf.ctx)?;
    Ok(automaton.accepts_as_geodesic(&cf.stream.prefix(n)))
}

/// Result of [`convergence_estimate`].
#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceReport {
    /// Number of convergents computed.
    pub terms: usize,
    /// True when two consecutive finite convergents came within `tol`.
    pub converged: bool,
    /// Interval hull of the last two convergents, widened by the
    /// approximation error; `None` if either was ∞.
    pub interval: Option<RealInterval>,
    /// The last convergent.
    pub last: BoundaryPoint,
    /// A convergent value seen more than once, if any.
    pub repeated: Option<BoundaryPoint>,
}

impl ConvergenceReport {
    /// A point estimate of the limit.
    pub fn estimate(&self) -> Option<f64> {
        self.interval.as_ref().map(RealInterval::midpoint_f64)
    }
}

fn enclosure(p: &BoundaryPoint, bits: u64) -> Option<RealInterval> {
    p.finite().map(|x: &FieldElement| x.approximate(bits))
}

/// Computes convergents until two consecutive ones differ by at most `tol`,
/// or `max_n` have been computed. Also reports the first convergent value
/// that recurs within the window.
pub fn convergence_estimate(
    cf: &InfiniteRosenCF,
    tol: f64,
    max_n: usize,
) -> Result<ConvergenceReport> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    if max_n == 0 {
        return Err(Error::InvalidParameter("max_n must be at least 1".into()));
    }
    let tol_r = BigRational::from_float(tol)
        .ok_or_else(|| Error::InvalidParameter(format!("tolerance {tol}")))?;
    // Enough bits that the enclosure width is far below tol.
    let bits = (64.0 - tol.log2()).clamp(64.0, 4096.0) as u64;

    let mut seen = HashSet::new();
    let mut repeated = None;
    let mut g = GroupElement::identity(&cf.ctx);
    let mut prev: Option<BoundaryPoint> = None;
    let mut terms = 0;
    let mut converged = false;
    let mut interval = None;
    let mut last = BoundaryPoint::Infinity;
    for i in 0..max_n {
        g = g.mul_t(&BigInt::from(cf.stream.get(i)));
        let c = g.apply(&BoundaryPoint::Infinity);
        terms = i + 1;
        if repeated.is_none() && !seen.insert(c.clone()) {
            repeated = Some(c.clone());
        }
        if let (Some(p), BoundaryPoint::Finite(x)) = (&prev, &c) {
            if let BoundaryPoint::Finite(y) = p {
                let gap = (x - y).abs();
                let close = gap.approximate(bits).hi <= tol_r;
                if close || i + 1 == max_n {
                    let a = enclosure(p, bits).expect("finite");
                    let b = enclosure(&c, bits).expect("finite");
                    interval = Some(a.hull(&b));
                }
                if close {
                    converged = true;
                    last = c;
                    break;
                }
            }
        }
        prev = Some(c.clone());
        last = c;
    }
    Ok(ConvergenceReport {
        terms,
        converged,
        interval,
        last,
        repeated,
    })
}

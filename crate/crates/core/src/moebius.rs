//! Hecke group elements as unit-determinant matrices over Z[λ] acting on the
//! boundary circle R ∪ {∞}.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::algebraic::{FieldElement, QContext};
use crate::error::{Error, Result};

/// A point of the ideal boundary R ∪ {∞}.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum BoundaryPoint {
    Infinity,
    Finite(FieldElement),
}

impl BoundaryPoint {
    pub fn is_infinite(&self) -> bool {
        matches!(self, BoundaryPoint::Infinity)
    }

    pub fn finite(&self) -> Option<&FieldElement> {
        match self {
            BoundaryPoint::Infinity => None,
            BoundaryPoint::Finite(x) => Some(x),
        }
    }

    /// The reflection κ(z) = -z̄, which on the boundary is negation.
    pub fn kappa(&self) -> BoundaryPoint {
        match self {
            BoundaryPoint::Infinity => BoundaryPoint::Infinity,
            BoundaryPoint::Finite(x) => BoundaryPoint::Finite(-x),
        }
    }

    /// Orders the boundary as a line with ∞ placed above every real.
    pub fn cmp_line(&self, other: &BoundaryPoint) -> Ordering {
        match (self, other) {
            (BoundaryPoint::Infinity, BoundaryPoint::Infinity) => Ordering::Equal,
            (BoundaryPoint::Infinity, _) => Ordering::Greater,
            (_, BoundaryPoint::Infinity) => Ordering::Less,
            (BoundaryPoint::Finite(a), BoundaryPoint::Finite(b)) => a.cmp_value(b),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            BoundaryPoint::Infinity => f64::INFINITY,
            BoundaryPoint::Finite(x) => x.to_f64(),
        }
    }

    /// Parses `inf` or a field literal.
    pub fn parse(ctx: &Arc<QContext>, s: &str) -> Result<BoundaryPoint> {
        match s.trim() {
            "inf" | "infinity" | "∞" | "oo" => Ok(BoundaryPoint::Infinity),
            t => FieldElement::parse(ctx, t).map(BoundaryPoint::Finite),
        }
    }
}

impl From<FieldElement> for BoundaryPoint {
    fn from(x: FieldElement) -> Self {
        BoundaryPoint::Finite(x)
    }
}

impl fmt::Display for BoundaryPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundaryPoint::Infinity => f.write_str("inf"),
            BoundaryPoint::Finite(x) => x.fmt(f),
        }
    }
}

impl Serialize for BoundaryPoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            BoundaryPoint::Infinity => s.serialize_str("inf"),
            BoundaryPoint::Finite(x) => x.serialize(s),
        }
    }
}

impl<'de> Deserialize<'de> for BoundaryPoint {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Str(String),
            Elem(FieldElement),
        }
        match Raw::deserialize(d)? {
            Raw::Str(s) if s == "inf" => Ok(BoundaryPoint::Infinity),
            Raw::Str(s) => Err(serde::de::Error::custom(format!("unexpected {s:?}"))),
            Raw::Elem(x) => Ok(BoundaryPoint::Finite(x)),
        }
    }
}

/// Orientation of three boundary points.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CyclicOrder {
    Clockwise,
    Anticlockwise,
    Degenerate,
}

impl CyclicOrder {
    pub fn reversed(self) -> CyclicOrder {
        match self {
            CyclicOrder::Clockwise => CyclicOrder::Anticlockwise,
            CyclicOrder::Anticlockwise => CyclicOrder::Clockwise,
            CyclicOrder::Degenerate => CyclicOrder::Degenerate,
        }
    }
}

/// Orientation of `(a, b, c)` on R ∪ {∞}. Increasing reals are anticlockwise.
pub fn cyclic_order(a: &BoundaryPoint, b: &BoundaryPoint, c: &BoundaryPoint) -> CyclicOrder {
    let ab = a.cmp_line(b);
    let bc = b.cmp_line(c);
    let ac = a.cmp_line(c);
    if ab == Ordering::Equal || bc == Ordering::Equal || ac == Ordering::Equal {
        return CyclicOrder::Degenerate;
    }
    // A cyclic rotation of an increasing triple has an even number of
    // inversions.
    let inversions = [ab, bc, ac]
        .iter()
        .filter(|&&o| o == Ordering::Greater)
        .count();
    if inversions % 2 == 0 {
        CyclicOrder::Anticlockwise
    } else {
        CyclicOrder::Clockwise
    }
}

/// Named generators of G_q.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Generator {
    Sigma,
    Tau,
    Rho,
    /// T_b = τ^b σ, i.e. z ↦ bλ - 1/z.
    T(i64),
}

impl FromStr for Generator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "sigma" | "σ" => Ok(Generator::Sigma),
            "tau" | "τ" => Ok(Generator::Tau),
            "rho" | "ρ" => Ok(Generator::Rho),
            t => {
                let inner = t
                    .strip_prefix("t(")
                    .or_else(|| t.strip_prefix("T("))
                    .and_then(|r| r.strip_suffix(')'))
                    .ok_or_else(|| Error::parse(0, format!("unknown generator {t:?}")))?;
                inner
                    .trim()
                    .parse()
                    .map(Generator::T)
                    .map_err(|_| Error::parse(2, format!("bad integer in {t:?}")))
            }
        }
    }
}

/// The matrix `[[a, b], [c, d]]` with determinant one.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct GroupElement {
    a: FieldElement,
    b: FieldElement,
    c: FieldElement,
    d: FieldElement,
}

impl GroupElement {
    /// Builds a matrix, checking the determinant and that every entry lies in
    /// Z[λ].
    pub fn new(
        a: FieldElement,
        b: FieldElement,
        c: FieldElement,
        d: FieldElement,
    ) -> Result<GroupElement> {
        for e in [&b, &c, &d] {
            if e.context().q() != a.context().q() {
                return Err(Error::ContextMismatch {
                    left: a.context().q().to_string(),
                    right: e.context().q().to_string(),
                });
            }
        }
        if [&a, &b, &c, &d]
            .iter()
            .any(|e| !e.is_algebraic_integer_coords())
        {
            return Err(Error::InvalidParameter(
                "matrix entries must lie in Z[lambda]".into(),
            ));
        }
        let g = GroupElement { a, b, c, d };
        if !g.det().is_one() {
            return Err(Error::InvalidParameter(format!(
                "determinant is {}, expected 1",
                g.det()
            )));
        }
        Ok(g)
    }

    fn raw(a: FieldElement, b: FieldElement, c: FieldElement, d: FieldElement) -> Self {
        GroupElement { a, b, c, d }
    }

    pub fn identity(ctx: &Arc<QContext>) -> GroupElement {
        let one = FieldElement::one(ctx);
        let zero = FieldElement::zero(ctx);
        Self::raw(one.clone(), zero.clone(), zero, one)
    }

    pub fn generator(ctx: &Arc<QContext>, g: Generator) -> GroupElement {
        match g {
            Generator::Sigma => Self::t(ctx, 0),
            Generator::Tau => Self::tau_power(ctx, 1),
            Generator::Rho => Self::t(ctx, 1),
            Generator::T(b) => Self::t(ctx, b),
        }
    }

    pub fn sigma(ctx: &Arc<QContext>) -> GroupElement {
        Self::t(ctx, 0)
    }

    pub fn tau(ctx: &Arc<QContext>) -> GroupElement {
        Self::tau_power(ctx, 1)
    }

    pub fn rho(ctx: &Arc<QContext>) -> GroupElement {
        Self::t(ctx, 1)
    }

    /// T_b = [[bλ, -1], [1, 0]].
    pub fn t(ctx: &Arc<QContext>, b: i64) -> GroupElement {
        Self::t_big(ctx, &BigInt::from(b))
    }

    pub fn t_big(ctx: &Arc<QContext>, b: &BigInt) -> GroupElement {
        Self::raw(
            FieldElement::lambda(ctx).scale(b),
            FieldElement::from_integer(ctx, -1),
            FieldElement::one(ctx),
            FieldElement::zero(ctx),
        )
    }

    /// τ^k = [[1, kλ], [0, 1]].
    pub fn tau_power(ctx: &Arc<QContext>, k: i64) -> GroupElement {
        Self::tau_power_big(ctx, &BigInt::from(k))
    }

    pub fn tau_power_big(ctx: &Arc<QContext>, k: &BigInt) -> GroupElement {
        Self::raw(
            FieldElement::one(ctx),
            FieldElement::lambda(ctx).scale(k),
            FieldElement::zero(ctx),
            FieldElement::one(ctx),
        )
    }

    /// T_{b_1} ⋯ T_{b_n}.
    pub fn from_cf(ctx: &Arc<QContext>, coeffs: &[i64]) -> Result<GroupElement> {
        if coeffs.is_empty() {
            return Err(Error::EmptySequence);
        }
        let mut g = Self::identity(ctx);
        for &b in coeffs {
            g = g.mul_t(&BigInt::from(b));
        }
        Ok(g)
    }

    pub fn context(&self) -> &Arc<QContext> {
        self.a.context()
    }

    pub fn entries(&self) -> [&FieldElement; 4] {
        [&self.a, &self.b, &self.c, &self.d]
    }

    pub fn det(&self) -> FieldElement {
        &(&self.a * &self.d) - &(&self.b * &self.c)
    }

    fn check_ctx(&self, other: &GroupElement) -> Result<()> {
        if self.context().q() != other.context().q() {
            return Err(Error::ContextMismatch {
                left: self.context().q().to_string(),
                right: other.context().q().to_string(),
            });
        }
        Ok(())
    }

    /// The product `self · h`, acting as z ↦ self(h(z)).
    pub fn compose(&self, h: &GroupElement) -> Result<GroupElement> {
        self.check_ctx(h)?;
        Ok(self.mul(h))
    }

    pub(crate) fn mul(&self, h: &GroupElement) -> GroupElement {
        Self::raw(
            &(&self.a * &h.a) + &(&self.b * &h.c),
            &(&self.a * &h.b) + &(&self.b * &h.d),
            &(&self.c * &h.a) + &(&self.d * &h.c),
            &(&self.c * &h.b) + &(&self.d * &h.d),
        )
    }

    /// `self · T_b`, cheaper than a general product.
    pub fn mul_t(&self, b: &BigInt) -> GroupElement {
        let bl = FieldElement::lambda(self.context()).scale(b);
        Self::raw(
            &(&self.a * &bl) + &self.b,
            -&self.a,
            &(&self.c * &bl) + &self.d,
            -&self.c,
        )
    }

    /// The adjugate, which is the inverse since det = 1.
    pub fn inverse(&self) -> GroupElement {
        Self::raw(self.d.clone(), -&self.b, -&self.c, self.a.clone())
    }

    pub fn power(&self, e: i64) -> GroupElement {
        let base = if e < 0 { self.inverse() } else { self.clone() };
        let mut n = e.unsigned_abs();
        let mut acc = Self::identity(self.context());
        let mut sq = base;
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&sq);
            }
            sq = sq.mul(&sq);
            n >>= 1;
        }
        acc
    }

    pub fn negated(&self) -> GroupElement {
        Self::raw(-&self.a, -&self.b, -&self.c, -&self.d)
    }

    /// The Möbius action z ↦ (az + b)/(cz + d).
    pub fn apply(&self, p: &BoundaryPoint) -> BoundaryPoint {
        match p {
            BoundaryPoint::Infinity => {
                if self.c.is_zero() {
                    BoundaryPoint::Infinity
                } else {
                    BoundaryPoint::Finite(
                        self.a.checked_div(&self.c).expect("non-zero denominator"),
                    )
                }
            }
            BoundaryPoint::Finite(z) => {
                let den = &(&self.c * z) + &self.d;
                if den.is_zero() {
                    BoundaryPoint::Infinity
                } else {
                    let num = &(&self.a * z) + &self.b;
                    BoundaryPoint::Finite(num.checked_div(&den).expect("non-zero denominator"))
                }
            }
        }
    }

    /// Equality as transformations: the matrices agree up to sign.
    pub fn projectively_equal(&self, h: &GroupElement) -> Result<bool> {
        self.check_ctx(h)?;
        Ok(self == h || *self == h.negated())
    }

    pub fn is_projective_identity(&self) -> bool {
        self.b.is_zero()
            && self.c.is_zero()
            && self.a == self.d
            && (self.a.is_one() || (-&self.a).is_one())
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a, self.b, self.c, self.d)
    }
}

impl<'de> Deserialize<'de> for GroupElement {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            a: FieldElement,
            b: FieldElement,
            c: FieldElement,
            d: FieldElement,
        }
        let r = Raw::deserialize(d)?;
        GroupElement::new(r.a, r.b, r.c, r.d).map_err(serde::de::Error::custom)
    }
}

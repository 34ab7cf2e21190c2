//! Exact arithmetic in the real field Q(λ), where λ = 2cos(π/q).
//!
//! A [`QContext`] fixes q, the minimal polynomial of λ over Q and a nested
//! family of dyadic intervals isolating λ among the real roots of that
//! polynomial. A [`FieldElement`] is a residue modulo the minimal polynomial
//! in the power basis 1, λ, λ², … with rational coefficients, so equality is
//! syntactic and zero tests never touch floating point. Signs are decided by
//! interval evaluation over the isolating intervals, doubling the precision
//! until the interval excludes zero.
//!
//! For q = 3 (λ = 1) and for the theta group q = ∞ (λ = 2) the field is Q
//! itself and every element is a single rational coordinate.

mod literal;
pub(crate) mod poly;

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use poly::IntPoly;

/// Largest finite q accepted by [`QContext::new`].
pub const MAX_Q: u32 = 1000;

/// Precision of the coarsest cached isolating interval for λ.
const BASE_BITS: u64 = 64;
/// Number of cached precision levels (64, 128, …, 2048 bits).
const CACHED_LEVELS: usize = 6;

/// The Hecke group index: a finite q ≥ 3 or the theta group q = ∞.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum HeckeIndex {
    Finite(u32),
    Infinity,
}

impl HeckeIndex {
    pub fn finite(self) -> Option<u32> {
        match self {
            HeckeIndex::Finite(q) => Some(q),
            HeckeIndex::Infinity => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, HeckeIndex::Infinity)
    }
}

impl fmt::Display for HeckeIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HeckeIndex::Finite(q) => write!(f, "{q}"),
            HeckeIndex::Infinity => f.write_str("inf"),
        }
    }
}

impl FromStr for HeckeIndex {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        match t {
            "inf" | "infinity" | "∞" | "oo" => Ok(HeckeIndex::Infinity),
            _ => t.parse::<u32>().map(HeckeIndex::Finite).map_err(|_| {
                Error::parse(0, format!("expected an integer q or 'inf', found {t:?}"))
            }),
        }
    }
}

impl Serialize for HeckeIndex {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            HeckeIndex::Finite(q) => s.serialize_u32(*q),
            HeckeIndex::Infinity => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for HeckeIndex {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(u32),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(q) => Ok(HeckeIndex::Finite(q)),
            Raw::Str(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// λ ∈ [lo, lo + 1] / 2^bits, with the monomials needed for interval
/// evaluation pre-scaled to a common denominator 2^((d-1) bits).
#[derive(Debug, Clone)]
struct Enclosure {
    bits: u64,
    lo: BigInt,
    lower: Vec<BigInt>,
    upper: Vec<BigInt>,
}

impl Enclosure {
    fn new(bits: u64, lo: BigInt, degree: usize) -> Self {
        let hi = &lo + 1u32;
        let mut lower = Vec::with_capacity(degree);
        let mut upper = Vec::with_capacity(degree);
        let mut lp = BigInt::one();
        let mut hp = BigInt::one();
        for i in 0..degree {
            let shift = (degree - 1 - i) as u64 * bits;
            lower.push(&lp << shift);
            upper.push(&hp << shift);
            lp *= &lo;
            hp *= &hi;
        }
        Enclosure {
            bits,
            lo,
            lower,
            upper,
        }
    }

    /// Integer bounds on `Σ nums[i] λ^i · 2^((d-1) bits)`.
    fn bounds(&self, nums: &[BigInt]) -> (BigInt, BigInt) {
        let mut lo = BigInt::zero();
        let mut hi = BigInt::zero();
        for (i, n) in nums.iter().enumerate() {
            if n.is_zero() {
                continue;
            }
            if n.is_positive() {
                lo += n * &self.lower[i];
                hi += n * &self.upper[i];
            } else {
                lo += n * &self.upper[i];
                hi += n * &self.lower[i];
            }
        }
        (lo, hi)
    }
}

/// The ambient parameter q together with exact data describing λ_q.
pub struct QContext {
    q: HeckeIndex,
    min_poly: IntPoly,
    /// λ^-1 as (numerators, denominator) in the power basis.
    lambda_inv: (Vec<BigInt>, BigInt),
    /// Sign of the minimal polynomial just left of λ.
    left_sign: Sign,
    enclosures: Vec<Enclosure>,
}

impl fmt::Debug for QContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("QContext")
            .field("q", &self.q)
            .field("min_poly", &self.min_poly)
            .finish()
    }
}

impl PartialEq for QContext {
    fn eq(&self, other: &Self) -> bool {
        self.q == other.q
    }
}

impl Eq for QContext {}

fn context_cache() -> &'static Mutex<HashMap<HeckeIndex, Arc<QContext>>> {
    static CACHE: OnceLock<Mutex<HashMap<HeckeIndex, Arc<QContext>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Shorthand for [`QContext::new`].
pub fn make_context(q: HeckeIndex) -> Result<Arc<QContext>> {
    QContext::new(q)
}

impl QContext {
    /// Returns the (shared, immutable) context for `q`.
    pub fn new(q: HeckeIndex) -> Result<Arc<QContext>> {
        if let HeckeIndex::Finite(n) = q {
            if n < 3 {
                return Err(Error::InvalidParameter(format!(
                    "q must be at least 3, got {n}"
                )));
            }
            if n > MAX_Q {
                return Err(Error::InvalidParameter(format!(
                    "q must be at most {MAX_Q}, got {n}"
                )));
            }
        }
        let mut cache = context_cache().lock().expect("context cache poisoned");
        if let Some(ctx) = cache.get(&q) {
            return Ok(Arc::clone(ctx));
        }
        let ctx = Arc::new(Self::build(q));
        cache.insert(q, Arc::clone(&ctx));
        Ok(ctx)
    }

    /// Convenience constructor for finite q.
    pub fn finite(q: u32) -> Result<Arc<QContext>> {
        Self::new(HeckeIndex::Finite(q))
    }

    /// Context of the theta group (λ = 2).
    pub fn theta() -> Arc<QContext> {
        Self::new(HeckeIndex::Infinity).expect("theta context")
    }

    fn build(q: HeckeIndex) -> QContext {
        let min_poly = match q {
            HeckeIndex::Infinity => vec![BigInt::from(-2), BigInt::one()],
            HeckeIndex::Finite(n) => poly::lambda_minimal_polynomial(n),
        };
        let degree = min_poly.len() - 1;

        if degree == 1 {
            let lambda = -&min_poly[0];
            return QContext {
                q,
                lambda_inv: (vec![BigInt::one()], lambda),
                min_poly,
                left_sign: Sign::Minus,
                enclosures: Vec::new(),
            };
        }

        let n = q.finite().expect("degree > 1 only for finite q");
        let approx = 2.0 * (std::f64::consts::PI / f64::from(n)).cos();
        // Coarse bracket at 2^-48, refined by exact bisection. The bracket
        // width is far below the gap to the next conjugate 2cos(3π/q).
        let k0: u64 = 48;
        let center = BigInt::from((approx * (1u64 << k0) as f64).round() as i64);
        let mut lo = &center - 256;
        let mut hi = &center + 256;
        let left_sign = poly::eval_dyadic_scaled(&min_poly, &lo, k0).sign();
        let right_sign = poly::eval_dyadic_scaled(&min_poly, &hi, k0).sign();
        assert!(
            left_sign != right_sign && left_sign != Sign::NoSign && right_sign != Sign::NoSign,
            "failed to bracket 2cos(pi/{n})"
        );
        while &hi - &lo > BigInt::one() {
            let mid: BigInt = (&lo + &hi) >> 1u32;
            if poly::eval_dyadic_scaled(&min_poly, &mid, k0).sign() == left_sign {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let mut bits = k0;
        let mut enclosures = Vec::with_capacity(CACHED_LEVELS);
        let mut target = BASE_BITS;
        for _ in 0..CACHED_LEVELS {
            while bits < target {
                lo = bisect_step(&min_poly, left_sign, &lo, bits);
                bits += 1;
            }
            enclosures.push(Enclosure::new(bits, lo.clone(), degree));
            target *= 2;
        }

        // λ^-1 from the minimal polynomial: λ (λ^(d-1) + … + m_1) = -m_0.
        let m0 = min_poly[0].clone();
        let mut inv_nums: Vec<BigInt> = min_poly[1..].iter().map(|c| -c).collect();
        let mut den = m0;
        if den.is_negative() {
            den = -den;
            for c in &mut inv_nums {
                *c = -&*c;
            }
        }
        QContext {
            q,
            min_poly,
            lambda_inv: (inv_nums, den),
            left_sign,
            enclosures,
        }
    }

    pub fn q(&self) -> HeckeIndex {
        self.q
    }

    /// Degree of λ over Q.
    pub fn degree(&self) -> usize {
        self.min_poly.len() - 1
    }

    /// Monic minimal polynomial of λ, ascending coefficients.
    pub fn min_poly(&self) -> &[BigInt] {
        &self.min_poly
    }

    /// Half of q for finite q (`r` with q = 2r or q = 2r + 1).
    pub fn half(&self) -> Option<u32> {
        self.q.finite().map(|q| q / 2)
    }

    pub fn is_even(&self) -> bool {
        matches!(self.q, HeckeIndex::Finite(q) if q % 2 == 0)
    }

    /// Dyadic interval of width 2^-bits (or finer) containing λ.
    pub fn lambda_interval(&self, precision_bits: u64) -> RealInterval {
        if self.degree() == 1 {
            let v = BigRational::from_integer(-&self.min_poly[0]);
            return RealInterval::point(v);
        }
        let mut level = 0;
        while let Some(e) = self.enclosure(level) {
            if e.bits >= precision_bits {
                let den = BigInt::one() << e.bits;
                return RealInterval {
                    lo: BigRational::new(e.lo.clone(), den.clone()),
                    hi: BigRational::new(&e.lo + 1u32, den),
                };
            }
            level += 1;
        }
        unreachable!("enclosure levels are unbounded")
    }

    /// Isolating interval at `level`: cached for small levels, refined on the
    /// fly beyond. Returns `None` only for degree-one contexts.
    fn enclosure(&self, level: usize) -> Option<std::borrow::Cow<'_, Enclosure>> {
        use std::borrow::Cow;
        if self.enclosures.is_empty() {
            return None;
        }
        if level < self.enclosures.len() {
            return Some(Cow::Borrowed(&self.enclosures[level]));
        }
        let last = self.enclosures.last().expect("non-empty");
        let target = last.bits << (level + 1 - self.enclosures.len());
        let mut lo = last.lo.clone();
        let mut bits = last.bits;
        while bits < target {
            lo = bisect_step(&self.min_poly, self.left_sign, &lo, bits);
            bits += 1;
        }
        Some(Cow::Owned(Enclosure::new(bits, lo, self.degree())))
    }
}

/// Refines λ ∈ [lo, lo+1]/2^bits to the half interval at bits + 1.
fn bisect_step(min_poly: &[BigInt], left_sign: Sign, lo: &BigInt, bits: u64) -> BigInt {
    let lo2: BigInt = lo << 1u32;
    let mid = &lo2 + 1u32;
    if poly::eval_dyadic_scaled(min_poly, &mid, bits + 1).sign() == left_sign {
        mid
    } else {
        lo2
    }
}

/// A closed interval with exact rational endpoints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RealInterval {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl RealInterval {
    pub fn point(v: BigRational) -> Self {
        RealInterval {
            lo: v.clone(),
            hi: v,
        }
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, v: &BigRational) -> bool {
        &self.lo <= v && v <= &self.hi
    }

    /// True when `other` lies inside `self`.
    pub fn encloses(&self, other: &RealInterval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn midpoint_f64(&self) -> f64 {
        let mid = (&self.lo + &self.hi) / BigRational::from_integer(BigInt::from(2));
        ratio_to_f64(&mid)
    }

    /// The midpoint rounded to `digits` decimal places.
    pub fn decimal(&self, digits: usize) -> String {
        let two = BigInt::from(2);
        let mid = (&self.lo + &self.hi) / BigRational::from_integer(two);
        let scale = num_traits::pow(BigInt::from(10), digits);
        let scaled = (mid.abs() * BigRational::from_integer(scale.clone()))
            .round()
            .to_integer();
        let (int, frac) = scaled.div_rem(&scale);
        let sign = if mid.is_negative() && !scaled.is_zero() {
            "-"
        } else {
            ""
        };
        if digits == 0 {
            return format!("{sign}{int}");
        }
        format!("{sign}{int}.{:0>width$}", frac.to_string(), width = digits)
    }

    /// Smallest interval containing both.
    pub fn hull(&self, other: &RealInterval) -> RealInterval {
        RealInterval {
            lo: self.lo.clone().min(other.lo.clone()),
            hi: self.hi.clone().max(other.hi.clone()),
        }
    }
}

/// Serialized as exact endpoint strings plus decimal renderings.
impl Serialize for RealInterval {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr {
            lo: String,
            hi: String,
            lo_decimal: f64,
            hi_decimal: f64,
        }
        Repr {
            lo: self.lo.to_string(),
            hi: self.hi.to_string(),
            lo_decimal: ratio_to_f64(&self.lo),
            hi_decimal: ratio_to_f64(&self.hi),
        }
        .serialize(s)
    }
}

pub(crate) fn ratio_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // Fall back to a scaled division for huge numerators/denominators.
        let n = r.numer().bits() as i64;
        let d = r.denom().bits() as i64;
        let shift = (n.max(d) - 60).max(0) as u64;
        let nf = (r.numer() >> shift).to_f64().unwrap_or(f64::NAN);
        let df = (r.denom() >> shift).to_f64().unwrap_or(f64::NAN);
        nf / df
    })
}

/// An exact element of Q(λ).
///
/// Stored as integer numerators over a common positive denominator, reduced
/// so that the representation is unique.
#[derive(Clone)]
pub struct FieldElement {
    ctx: Arc<QContext>,
    nums: Vec<BigInt>,
    den: BigInt,
}

impl FieldElement {
    fn from_parts(ctx: &Arc<QContext>, mut nums: Vec<BigInt>, mut den: BigInt) -> Self {
        let d = ctx.degree();
        reduce_mod_min_poly(&mut nums, &ctx.min_poly);
        nums.resize(d, BigInt::zero());
        if den.is_negative() {
            den = -den;
            for n in &mut nums {
                *n = -&*n;
            }
        }
        let mut g = den.clone();
        for n in &nums {
            if g.is_one() {
                break;
            }
            g = g.gcd(n);
        }
        if nums.iter().all(Zero::is_zero) {
            den = BigInt::one();
        } else if !g.is_one() {
            den /= &g;
            for n in &mut nums {
                *n /= &g;
            }
        }
        FieldElement {
            ctx: Arc::clone(ctx),
            nums,
            den,
        }
    }

    pub fn zero(ctx: &Arc<QContext>) -> Self {
        Self::from_integer(ctx, 0)
    }

    pub fn one(ctx: &Arc<QContext>) -> Self {
        Self::from_integer(ctx, 1)
    }

    pub fn from_integer(ctx: &Arc<QContext>, n: i64) -> Self {
        Self::from_bigint(ctx, BigInt::from(n))
    }

    pub fn from_bigint(ctx: &Arc<QContext>, n: BigInt) -> Self {
        let mut nums = vec![BigInt::zero(); ctx.degree()];
        nums[0] = n;
        FieldElement {
            ctx: Arc::clone(ctx),
            nums,
            den: BigInt::one(),
        }
    }

    pub fn from_rational(ctx: &Arc<QContext>, r: &BigRational) -> Self {
        let mut nums = vec![BigInt::zero(); ctx.degree()];
        nums[0] = r.numer().clone();
        Self::from_parts(ctx, nums, r.denom().clone())
    }

    /// Builds `Σ coeffs[i] λ^i`, reducing modulo the minimal polynomial.
    pub fn from_coeffs(ctx: &Arc<QContext>, coeffs: &[BigRational]) -> Self {
        if coeffs.is_empty() {
            return Self::zero(ctx);
        }
        let mut den = BigInt::one();
        for c in coeffs {
            den = den.lcm(c.denom());
        }
        let nums = coeffs
            .iter()
            .map(|c| c.numer() * (&den / c.denom()))
            .collect();
        Self::from_parts(ctx, nums, den)
    }

    /// Builds `Σ coeffs[i] λ^i` with integer coefficients.
    pub fn from_int_coeffs(ctx: &Arc<QContext>, coeffs: &[i64]) -> Self {
        let nums = coeffs.iter().map(|&c| BigInt::from(c)).collect();
        Self::from_parts(ctx, nums, BigInt::one())
    }

    /// λ itself.
    pub fn lambda(ctx: &Arc<QContext>) -> Self {
        if ctx.degree() == 1 {
            Self::from_bigint(ctx, -&ctx.min_poly[0])
        } else {
            let mut nums = vec![BigInt::zero(); ctx.degree()];
            nums[1] = BigInt::one();
            FieldElement {
                ctx: Arc::clone(ctx),
                nums,
                den: BigInt::one(),
            }
        }
    }

    /// k·λ.
    pub fn lambda_multiple(ctx: &Arc<QContext>, k: i64) -> Self {
        Self::lambda(ctx).scale(&BigInt::from(k))
    }

    pub fn context(&self) -> &Arc<QContext> {
        &self.ctx
    }

    /// Coordinates in the power basis 1, λ, …, λ^(d-1).
    pub fn coeffs(&self) -> Vec<BigRational> {
        self.nums
            .iter()
            .map(|n| BigRational::new(n.clone(), self.den.clone()))
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.nums.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.den.is_one() && self.nums[0].is_one() && self.nums[1..].iter().all(Zero::is_zero)
    }

    /// The value as a rational, when it lies in Q.
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.nums[1..].iter().all(Zero::is_zero) {
            Some(BigRational::new(self.nums[0].clone(), self.den.clone()))
        } else {
            None
        }
    }

    /// The value as an integer, when it is one.
    pub fn as_integer(&self) -> Option<BigInt> {
        self.as_rational()
            .filter(|r| r.is_integer())
            .map(|r| r.to_integer())
    }

    /// True when all coordinates are integers, i.e. the element lies in Z[λ].
    pub fn is_algebraic_integer_coords(&self) -> bool {
        self.den.is_one()
    }

    fn check_ctx(&self, other: &FieldElement) -> Result<()> {
        if self.ctx.q != other.ctx.q {
            return Err(Error::ContextMismatch {
                left: self.ctx.q.to_string(),
                right: other.ctx.q.to_string(),
            });
        }
        Ok(())
    }

    fn add_impl(&self, other: &FieldElement, negate_other: bool) -> FieldElement {
        let nums: Vec<BigInt> = if self.den == other.den {
            self.nums
                .iter()
                .zip(&other.nums)
                .map(|(a, b)| if negate_other { a - b } else { a + b })
                .collect()
        } else {
            self.nums
                .iter()
                .zip(&other.nums)
                .map(|(a, b)| {
                    let l = a * &other.den;
                    let r = b * &self.den;
                    if negate_other {
                        l - r
                    } else {
                        l + r
                    }
                })
                .collect()
        };
        let den = if self.den == other.den {
            self.den.clone()
        } else {
            &self.den * &other.den
        };
        Self::from_parts(&self.ctx, nums, den)
    }

    pub fn checked_add(&self, other: &FieldElement) -> Result<FieldElement> {
        self.check_ctx(other)?;
        Ok(self.add_impl(other, false))
    }

    pub fn checked_sub(&self, other: &FieldElement) -> Result<FieldElement> {
        self.check_ctx(other)?;
        Ok(self.add_impl(other, true))
    }

    pub fn checked_mul(&self, other: &FieldElement) -> Result<FieldElement> {
        self.check_ctx(other)?;
        let d = self.ctx.degree();
        let mut prod = vec![BigInt::zero(); 2 * d - 1];
        for (i, a) in self.nums.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.nums.iter().enumerate() {
                if !b.is_zero() {
                    prod[i + j] += a * b;
                }
            }
        }
        Ok(Self::from_parts(&self.ctx, prod, &self.den * &other.den))
    }

    pub fn checked_div(&self, other: &FieldElement) -> Result<FieldElement> {
        self.check_ctx(other)?;
        self.checked_mul(&other.invert()?)
    }

    /// Multiplicative inverse via the extended Euclidean algorithm against the
    /// minimal polynomial.
    pub fn invert(&self) -> Result<FieldElement> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if self.ctx.degree() == 1 {
            let mut nums = vec![self.den.clone()];
            let den = self.nums[0].clone();
            nums.truncate(1);
            return Ok(Self::from_parts(&self.ctx, nums, den));
        }
        let a: Vec<BigRational> = self
            .nums
            .iter()
            .map(|n| BigRational::from_integer(n.clone()))
            .collect();
        let m: Vec<BigRational> = self
            .ctx
            .min_poly
            .iter()
            .map(|c| BigRational::from_integer(c.clone()))
            .collect();
        let inv = poly::rat_inverse_mod(&a, &m).ok_or(Error::DivisionByZero)?;
        // (Σ n_i λ^i / den)^-1 = den · (Σ n_i λ^i)^-1
        let scaled: Vec<BigRational> = inv
            .into_iter()
            .map(|c| c * BigRational::from_integer(self.den.clone()))
            .collect();
        Ok(Self::from_coeffs(&self.ctx, &scaled))
    }

    /// Multiplies by an integer.
    pub fn scale(&self, k: &BigInt) -> FieldElement {
        let nums = self.nums.iter().map(|n| n * k).collect();
        Self::from_parts(&self.ctx, nums, self.den.clone())
    }

    /// Multiplies by a rational.
    pub fn scale_rational(&self, r: &BigRational) -> FieldElement {
        let nums = self.nums.iter().map(|n| n * r.numer()).collect();
        Self::from_parts(&self.ctx, nums, &self.den * r.denom())
    }

    pub fn pow(&self, mut e: u32) -> FieldElement {
        let mut base = self.clone();
        let mut acc = FieldElement::one(&self.ctx);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Sign of the real value: -1, 0 or +1.
    pub fn signum(&self) -> i8 {
        if self.is_zero() {
            return 0;
        }
        if self.ctx.degree() == 1 {
            return sign_to_i8(self.nums[0].sign());
        }
        let mut level = 0;
        loop {
            let e = self.ctx.enclosure(level).expect("degree > 1");
            let (lo, hi) = e.bounds(&self.nums);
            if lo.is_positive() {
                return 1;
            }
            if hi.is_negative() {
                return -1;
            }
            level += 1;
        }
    }

    /// Compares real values.
    pub fn cmp_value(&self, other: &FieldElement) -> Ordering {
        match (self - other).signum() {
            -1 => Ordering::Less,
            0 => Ordering::Equal,
            _ => Ordering::Greater,
        }
    }

    pub fn abs(&self) -> FieldElement {
        if self.signum() < 0 {
            -self
        } else {
            self.clone()
        }
    }

    /// Interval of width at most 2^-precision_bits containing the value.
    pub fn approximate(&self, precision_bits: u64) -> RealInterval {
        if let Some(r) = self.as_rational() {
            return RealInterval::point(r);
        }
        let target = BigRational::new(BigInt::one(), BigInt::one() << precision_bits);
        let mut level = 0;
        loop {
            let e = self.ctx.enclosure(level).expect("degree > 1");
            let (lo, hi) = e.bounds(&self.nums);
            let scale = &self.den << ((self.ctx.degree() - 1) as u64 * e.bits);
            let iv = RealInterval {
                lo: BigRational::new(lo, scale.clone()),
                hi: BigRational::new(hi, scale),
            };
            if iv.width() <= target {
                return iv;
            }
            level += 1;
        }
    }

    /// Floating point rendering, for display only.
    pub fn to_f64(&self) -> f64 {
        self.approximate(64).midpoint_f64()
    }

    /// Greatest integer not exceeding the value.
    pub fn floor(&self) -> BigInt {
        if let Some(r) = self.as_rational() {
            return r.floor().to_integer();
        }
        // Irrational values are never integers, so the interval eventually
        // falls strictly between two integers.
        let mut level = 0;
        loop {
            let e = self.ctx.enclosure(level).expect("degree > 1");
            let (lo, hi) = e.bounds(&self.nums);
            let scale = &self.den << ((self.ctx.degree() - 1) as u64 * e.bits);
            let fl = lo.div_floor(&scale);
            let fh = hi.div_floor(&scale);
            if fl == fh {
                return fl;
            }
            level += 1;
        }
    }

    /// The value divided by λ.
    pub fn div_lambda(&self) -> FieldElement {
        let (inv_nums, inv_den) = &self.ctx.lambda_inv;
        let inv = Self::from_parts(&self.ctx, inv_nums.clone(), inv_den.clone());
        self * &inv
    }

    /// The integer b minimising |x - bλ|; ties go to the lesser integer.
    pub fn nearest_lambda_multiple(&self) -> BigInt {
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        let shifted = &self.div_lambda() + &FieldElement::from_rational(&self.ctx, &half);
        let f = shifted.floor();
        match shifted.as_integer() {
            Some(_) => f - 1,
            None => f,
        }
    }

    /// When the value is an integer multiple kλ, returns k.
    pub fn as_lambda_multiple(&self) -> Option<BigInt> {
        self.div_lambda().as_integer()
    }

    /// `a + b·sqrt(D)` rendering for quadratic contexts.
    pub fn radical_form(&self) -> Option<String> {
        let ctx = &self.ctx;
        match ctx.degree() {
            1 => Some(fmt_ratio(&self.coeffs()[0])),
            2 => {
                // λ = (-p + sqrt(p² - 4s)) / 2 for x² + p x + s.
                let s = &ctx.min_poly[0];
                let p = &ctx.min_poly[1];
                let disc: BigInt = p * p - s * 4;
                let (outer, inner) = split_square(&disc);
                let c = self.coeffs();
                let two = BigRational::from_integer(BigInt::from(2));
                let rational = &c[0] - &c[1] * BigRational::from_integer(p.clone()) / &two;
                let surd = &c[1] * BigRational::from_integer(outer) / &two;
                Some(format_surd(&rational, &surd, &inner))
            }
            _ => None,
        }
    }

    /// Parses a literal such as `3/2*lambda - 1` or `5/7`.
    pub fn parse(ctx: &Arc<QContext>, s: &str) -> Result<FieldElement> {
        literal::parse_field_literal(ctx, s)
    }
}

fn sign_to_i8(s: Sign) -> i8 {
    match s {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

/// Reduces an integer polynomial modulo a monic integer polynomial in place.
fn reduce_mod_min_poly(nums: &mut Vec<BigInt>, min_poly: &[BigInt]) {
    let d = min_poly.len() - 1;
    while nums.len() > d {
        let c = nums.pop().expect("non-empty");
        if c.is_zero() {
            continue;
        }
        let shift = nums.len() - d;
        for (i, m) in min_poly[..d].iter().enumerate() {
            nums[shift + i] -= &c * m;
        }
    }
}

/// Splits n = outer² · inner with inner square-free (trial division).
fn split_square(n: &BigInt) -> (BigInt, BigInt) {
    let mut outer = BigInt::one();
    let mut inner = n.clone();
    let mut f = BigInt::from(2);
    while &f * &f <= inner {
        let sq = &f * &f;
        while (&inner % &sq).is_zero() {
            inner /= &sq;
            outer *= &f;
        }
        f += 1;
    }
    (outer, inner)
}

fn fmt_ratio(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn format_surd(rational: &BigRational, surd: &BigRational, inner: &BigInt) -> String {
    if surd.is_zero() {
        return fmt_ratio(rational);
    }
    let root = format!("sqrt({inner})");
    let surd_part = if surd.is_one() {
        root
    } else if (-surd).is_one() {
        format!("-{root}")
    } else {
        format!("{}*{root}", fmt_ratio(surd))
    };
    if rational.is_zero() {
        return surd_part;
    }
    if let Some(stripped) = surd_part.strip_prefix('-') {
        format!("{} - {stripped}", fmt_ratio(rational))
    } else {
        format!("{} + {surd_part}", fmt_ratio(rational))
    }
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        self.ctx.q == other.ctx.q && self.den == other.den && self.nums == other.nums
    }
}

impl Eq for FieldElement {}

impl Hash for FieldElement {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.ctx.q.hash(state);
        self.nums.hash(state);
        self.den.hash(state);
    }
}

impl PartialOrd for FieldElement {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Orders by context first, then by real value.
impl Ord for FieldElement {
    fn cmp(&self, other: &Self) -> Ordering {
        self.ctx
            .q
            .cmp(&other.ctx.q)
            .then_with(|| self.cmp_value(other))
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl std::ops::$trait<&FieldElement> for &FieldElement {
            type Output = FieldElement;

            /// # Panics
            ///
            /// Panics when the operands belong to different contexts.
            fn $method(self, rhs: &FieldElement) -> FieldElement {
                self.$checked(rhs)
                    .expect("field elements from different contexts")
            }
        }

        impl std::ops::$trait<FieldElement> for FieldElement {
            type Output = FieldElement;

            fn $method(self, rhs: FieldElement) -> FieldElement {
                (&self).$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, checked_add);
forward_binop!(Sub, sub, checked_sub);
forward_binop!(Mul, mul, checked_mul);

impl std::ops::Neg for &FieldElement {
    type Output = FieldElement;

    fn neg(self) -> FieldElement {
        FieldElement {
            ctx: Arc::clone(&self.ctx),
            nums: self.nums.iter().map(|n| -n).collect(),
            den: self.den.clone(),
        }
    }
}

impl std::ops::Neg for FieldElement {
    type Output = FieldElement;

    fn neg(self) -> FieldElement {
        -&self
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FieldElement(q={}, {})", self.ctx.q, self)
    }
}

/// Renders as a polynomial in `lambda`, e.g. `1/2 + 3*lambda`.
impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let coeffs = self.coeffs();
        let mut wrote = false;
        for (i, c) in coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let negative = c.is_negative();
            let mag = c.abs();
            if wrote {
                f.write_str(if negative { " - " } else { " + " })?;
            } else if negative {
                f.write_str("-")?;
            }
            let monomial = match i {
                0 => String::new(),
                1 => "lambda".to_string(),
                _ => format!("lambda^{i}"),
            };
            if i == 0 {
                f.write_str(&fmt_ratio(&mag))?;
            } else if mag.is_one() {
                f.write_str(&monomial)?;
            } else {
                write!(f, "{}*{monomial}", fmt_ratio(&mag))?;
            }
            wrote = true;
        }
        if !wrote {
            f.write_str("0")?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct FieldElementRepr {
    q: HeckeIndex,
    coeffs: Vec<String>,
}

impl Serialize for FieldElement {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FieldElementRepr {
            q: self.ctx.q,
            coeffs: self.coeffs().iter().map(fmt_ratio).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FieldElement {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = FieldElementRepr::deserialize(d)?;
        let ctx = QContext::new(repr.q).map_err(D::Error::custom)?;
        let coeffs = repr
            .coeffs
            .iter()
            .map(|s| parse_ratio(s).ok_or_else(|| D::Error::custom(format!("bad rational {s:?}"))))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        if coeffs.len() > ctx.degree() {
            return Err(D::Error::custom("too many coefficients for this q"));
        }
        Ok(FieldElement::from_coeffs(&ctx, &coeffs))
    }
}

/// Parses `n` or `n/d`.
pub(crate) fn parse_ratio(s: &str) -> Option<BigRational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                None
            } else {
                Some(BigRational::new(n, d))
            }
        }
        None => s.parse::<BigInt>().ok().map(BigRational::from_integer),
    }
}

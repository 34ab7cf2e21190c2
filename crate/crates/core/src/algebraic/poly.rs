//! Small dense polynomial helpers. Coefficients are stored in ascending order.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub(crate) type IntPoly = Vec<BigInt>;
pub(crate) type RatPoly = Vec<BigRational>;

fn trim_int(p: &mut IntPoly) {
    while p.len() > 1 && p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
}

fn trim_rat(p: &mut RatPoly) {
    while p.len() > 1 && p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
}

fn rat_is_zero(p: &RatPoly) -> bool {
    p.iter().all(Zero::is_zero)
}

/// Divides `num` by the monic polynomial `den`, which must divide it exactly.
fn divide_exact_monic(num: &[BigInt], den: &[BigInt]) -> IntPoly {
    let dd = den.len() - 1;
    let mut rem = num.to_vec();
    if rem.len() <= dd {
        return vec![BigInt::zero()];
    }
    let mut quot = vec![BigInt::zero(); rem.len() - dd];
    for i in (0..quot.len()).rev() {
        let c = rem[i + dd].clone();
        if !c.is_zero() {
            for (j, dj) in den.iter().enumerate() {
                rem[i + j] -= &c * dj;
            }
        }
        quot[i] = c;
    }
    debug_assert!(rem.iter().all(Zero::is_zero), "inexact cyclotomic division");
    trim_int(&mut quot);
    quot
}

fn cyclotomic_memo(n: u32, memo: &mut HashMap<u32, IntPoly>) -> IntPoly {
    if let Some(p) = memo.get(&n) {
        return p.clone();
    }
    let mut p = vec![BigInt::zero(); n as usize + 1];
    p[0] = BigInt::from(-1);
    p[n as usize] = BigInt::one();
    for d in 1..n {
        if n.is_multiple_of(d) {
            let phi_d = cyclotomic_memo(d, memo);
            p = divide_exact_monic(&p, &phi_d);
        }
    }
    memo.insert(n, p.clone());
    p
}

/// The n-th cyclotomic polynomial.
pub(crate) fn cyclotomic(n: u32) -> IntPoly {
    cyclotomic_memo(n, &mut HashMap::new())
}

/// Rewrites a palindromic polynomial f of degree 2d as x^d P(x + 1/x) and
/// returns P.
///
/// Uses x^j + x^-j = D_j(x + 1/x) with D_0 = 2, D_1 = t and
/// D_{j+1} = t D_j - D_{j-1}.
pub(crate) fn trace_polynomial(f: &[BigInt]) -> IntPoly {
    let d = (f.len() - 1) / 2;
    debug_assert_eq!(f.len(), 2 * d + 1);
    debug_assert!((0..=2 * d).all(|i| f[i] == f[2 * d - i]), "not palindromic");

    let mut result = vec![BigInt::zero(); d + 1];
    result[0] = f[d].clone();
    let mut prev: IntPoly = vec![BigInt::from(2)];
    let mut cur: IntPoly = vec![BigInt::zero(), BigInt::one()];
    for j in 1..=d {
        let c = &f[d + j];
        for (i, ci) in cur.iter().enumerate() {
            result[i] += c * ci;
        }
        // next = t * cur - prev
        let mut next = vec![BigInt::zero(); cur.len() + 1];
        for (i, ci) in cur.iter().enumerate() {
            next[i + 1] += ci;
        }
        for (i, pi) in prev.iter().enumerate() {
            next[i] -= pi;
        }
        prev = cur;
        cur = next;
    }
    trim_int(&mut result);
    result
}

/// Minimal polynomial of 2cos(pi/q) over Q, from the 2q-th cyclotomic
/// polynomial under the substitution t = z + 1/z.
pub(crate) fn lambda_minimal_polynomial(q: u32) -> IntPoly {
    trace_polynomial(&cyclotomic(2 * q))
}

/// Evaluates `p(m / 2^k) * 2^(deg p * k)`, an integer with the sign of p(m / 2^k).
pub(crate) fn eval_dyadic_scaled(p: &[BigInt], m: &BigInt, k: u64) -> BigInt {
    let deg = p.len() - 1;
    let mut acc = p[deg].clone();
    for i in (0..deg).rev() {
        acc = acc * m + (&p[i] << ((deg - i) as u64 * k));
    }
    acc
}

pub(crate) fn rat_divrem(a: &[BigRational], b: &[BigRational]) -> (RatPoly, RatPoly) {
    let mut b = b.to_vec();
    trim_rat(&mut b);
    let mut rem = a.to_vec();
    trim_rat(&mut rem);
    let db = b.len() - 1;
    let lead = b[db].clone();
    assert!(!lead.is_zero(), "polynomial division by zero");
    if rem.len() <= db {
        return (vec![BigRational::zero()], rem);
    }
    let mut quot = vec![BigRational::zero(); rem.len() - db];
    for i in (0..quot.len()).rev() {
        let c = &rem[i + db] / &lead;
        if !c.is_zero() {
            for (j, bj) in b.iter().enumerate() {
                rem[i + j] -= &c * bj;
            }
        }
        quot[i] = c;
    }
    rem.truncate(db.max(1));
    trim_rat(&mut rem);
    trim_rat(&mut quot);
    (quot, rem)
}

fn rat_mul(a: &[BigRational], b: &[BigRational]) -> RatPoly {
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, ai) in a.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            out[i + j] += ai * bj;
        }
    }
    trim_rat(&mut out);
    out
}

fn rat_sub(a: &[BigRational], b: &[BigRational]) -> RatPoly {
    let n = a.len().max(b.len());
    let mut out = vec![BigRational::zero(); n];
    for (i, ai) in a.iter().enumerate() {
        out[i] += ai;
    }
    for (i, bi) in b.iter().enumerate() {
        out[i] -= bi;
    }
    trim_rat(&mut out);
    out
}

/// Inverse of `a` modulo the irreducible polynomial `m` by the extended
/// Euclidean algorithm. Returns `None` when `a` is zero modulo `m`.
pub(crate) fn rat_inverse_mod(a: &[BigRational], m: &[BigRational]) -> Option<RatPoly> {
    let (_, a) = rat_divrem(a, m);
    if rat_is_zero(&a) {
        return None;
    }
    let mut r0 = m.to_vec();
    let mut r1 = a;
    let mut s0: RatPoly = vec![BigRational::zero()];
    let mut s1: RatPoly = vec![BigRational::one()];
    while !rat_is_zero(&r1) {
        let (q, r) = rat_divrem(&r0, &r1);
        let s_next = rat_sub(&s0, &rat_mul(&q, &s1));
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s_next);
    }
    if r0.len() != 1 {
        return None;
    }
    let g = r0[0].clone();
    let inv: RatPoly = s0.iter().map(|c| c / &g).collect();
    Some(rat_divrem(&inv, m).1)
}

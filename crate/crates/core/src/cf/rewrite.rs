//! Value-preserving rewrites of coefficient sequences.
//!
//! Positions are 1-based, matching the usual `[b_1, …, b_n]` notation. Block
//! rewrites take the index `i` of the coefficient just before the block, so
//! the block itself occupies positions `i + 1 ..= j`.
//!
//! The block rewrites rest on the relations
//!
//! - `T_1^r = στ⁻¹σ T_{-1}^{r-2} τ⁻¹` for q = 2r,
//! - `T_1^r = στ⁻¹σ T_{-1}^{r-1} τ⁻¹` for q = 2r + 1,
//!
//! and their interleaved analogues, together with `T_b σ τ⁻¹ σ = ±T_{b-1}` and
//! `τ⁻¹ T_c = T_{c-1}`, which absorb the outer factors into the neighbouring
//! coefficients. For even q a block rewrite shortens the sequence by two;
//! for odd q by one.

use std::sync::Arc;

use serde::Serialize;

use super::automaton::{build_pattern_automaton, PatternKind};
use super::RosenCF;
use crate::algebraic::{HeckeIndex, QContext};
use crate::error::{Error, Result};

fn half(ctx: &Arc<QContext>) -> Result<(usize, bool)> {
    match ctx.q() {
        HeckeIndex::Finite(q) if q >= 4 => Ok(((q / 2) as usize, q % 2 == 0)),
        HeckeIndex::Finite(_) => Err(Error::Unsupported {
            q: "3".into(),
            reason: "block rewrites need q >= 4",
        }),
        HeckeIndex::Infinity => Err(Error::Unsupported {
            q: "inf".into(),
            reason: "the theta group has no ones or interleaved rewrites",
        }),
    }
}

fn overflow(b: i64) -> Error {
    Error::CoefficientOverflow(b.to_string())
}

fn negate_all(coeffs: &[i64]) -> Result<Vec<i64>> {
    coeffs
        .iter()
        .map(|&b| b.checked_neg().ok_or_else(|| overflow(b)))
        .collect()
}

/// Removes the zero at position `i`.
///
/// For `2 ≤ i ≤ n - 1`, `(…, a, 0, c, …)` becomes `(…, a + c, …)` since
/// `T_a T_0 T_c = -T_{a+c}`. A trailing zero drops the last two coefficients,
/// since `T_a T_0(∞) = T_a(0) = ∞` pulls the value back to the convergent
/// before them.
pub fn remove_zero(coeffs: &[i64], i: usize) -> Result<Vec<i64>> {
    let n = coeffs.len();
    if i < 2 || i > n {
        return Err(Error::InvalidIndex {
            index: i,
            len: n,
            reason: "a removable zero must sit at position 2..=n",
        });
    }
    if coeffs[i - 1] != 0 {
        return Err(Error::PatternNotPresent(format!(
            "coefficient {i} is {}, not 0",
            coeffs[i - 1]
        )));
    }
    if i == n {
        if n == 2 {
            return Err(Error::InfiniteValue);
        }
        return Ok(coeffs[..n - 2].to_vec());
    }
    let merged = coeffs[i - 2]
        .checked_add(coeffs[i])
        .ok_or_else(|| overflow(coeffs[i - 2]))?;
    let mut out = coeffs[..i - 2].to_vec();
    out.push(merged);
    out.extend_from_slice(&coeffs[i + 1..]);
    Ok(out)
}

/// Splits `b_i` as `split + (b_i - split)` with a zero between, the inverse
/// of [`remove_zero`] at position `i + 1`.
pub fn insert_zero(coeffs: &[i64], i: usize, split: i64) -> Result<Vec<i64>> {
    let n = coeffs.len();
    if i < 1 || i > n {
        return Err(Error::InvalidIndex {
            index: i,
            len: n,
            reason: "zero insertion splits a coefficient at position 1..=n",
        });
    }
    let rest = coeffs[i - 1]
        .checked_sub(split)
        .ok_or_else(|| overflow(coeffs[i - 1]))?;
    let mut out = coeffs[..i - 1].to_vec();
    out.extend([split, 0, rest]);
    out.extend_from_slice(&coeffs[i..]);
    Ok(out)
}

/// Inserts `sign · 1^{[q]}` after position `i` (0 ≤ i ≤ n). Since
/// `T_1^q = ±I` the value is unchanged; used to manufacture long,
/// non-geodesic expansions.
pub fn insert_relation(cf: &RosenCF, i: usize, sign: i8) -> Result<RosenCF> {
    let q = match cf.context().q() {
        HeckeIndex::Finite(q) => q as usize,
        HeckeIndex::Infinity => {
            return Err(Error::Unsupported {
                q: "inf".into(),
                reason: "T_1 has infinite order in the theta group",
            })
        }
    };
    let n = cf.len();
    if i > n {
        return Err(Error::InvalidIndex {
            index: i,
            len: n,
            reason: "insertion point must be 0..=n",
        });
    }
    let unit = if sign < 0 { -1 } else { 1 };
    let mut out = cf.coeffs()[..i].to_vec();
    out.extend(std::iter::repeat_n(unit, q));
    out.extend_from_slice(&cf.coeffs()[i..]);
    RosenCF::new(cf.context(), out)
}

/// Replaces positions `i..=j` (with the block at `i + 1..=j`) by
/// `b_i - 1, middle, b_{j+1} - 1`, dropping the last term when `j = n`.
fn splice(coeffs: &[i64], i: usize, j: usize, middle: &[i64]) -> Result<Vec<i64>> {
    let n = coeffs.len();
    let mut out = coeffs[..i - 1].to_vec();
    out.push(
        coeffs[i - 1]
            .checked_sub(1)
            .ok_or_else(|| overflow(coeffs[i - 1]))?,
    );
    out.extend_from_slice(middle);
    if j < n {
        out.push(
            coeffs[j]
                .checked_sub(1)
                .ok_or_else(|| overflow(coeffs[j]))?,
        );
        out.extend_from_slice(&coeffs[j + 1..]);
    }
    Ok(out)
}

fn check_block_bounds(n: usize, i: usize, j: usize) -> Result<()> {
    if i < 1 || j <= i || j > n {
        return Err(Error::InvalidIndex {
            index: i,
            len: n,
            reason: "the block must sit inside b_2..b_n",
        });
    }
    Ok(())
}

/// Applies `rewrite` to the sign-normalised sequence.
fn with_sign(
    coeffs: &[i64],
    sign: i8,
    rewrite: impl FnOnce(&[i64]) -> Result<Vec<i64>>,
) -> Result<Vec<i64>> {
    if sign < 0 {
        negate_all(&rewrite(&negate_all(coeffs)?)?)
    } else {
        rewrite(coeffs)
    }
}

fn sign_word(sign: i8, word: &[i64]) -> String {
    let items: Vec<String> = word
        .iter()
        .map(|&b| (b * i64::from(sign)).to_string())
        .collect();
    format!("({})", items.join(","))
}

/// Rewrites `sign · 1^{[r]}` at positions `i + 1 ..= i + r`.
pub fn rewrite_ones_block(cf: &RosenCF, i: usize, sign: i8) -> Result<RosenCF> {
    let (r, even) = half(cf.context())?;
    let n = cf.len();
    check_block_bounds(n, i, i + r)?;
    let out = with_sign(cf.coeffs(), sign, |c| {
        if c[i..i + r].iter().any(|&b| b != 1) {
            return Err(Error::PatternNotPresent(format!(
                "{} at position {}",
                sign_word(sign, &vec![1; r]),
                i + 1
            )));
        }
        let middle = vec![-1; if even { r - 2 } else { r - 1 }];
        splice(c, i, i + r, &middle)
    })?;
    RosenCF::new(cf.context(), out)
}

/// The positive interleaved block with `k` repeats of the inner period.
fn interleaved_word(r: usize, even: bool, k: usize) -> Vec<i64> {
    let ones = |d: usize| std::iter::repeat_n(1, d);
    let mut w: Vec<i64> = ones(r - 1).collect();
    w.push(2);
    if even {
        for _ in 0..k {
            w.extend(ones(r - 2));
            w.push(2);
        }
    } else {
        w.extend(ones(r - 1));
        for _ in 0..k {
            w.push(2);
            w.extend(ones(r - 2));
            w.push(2);
            w.extend(ones(r - 1));
        }
        w.push(2);
    }
    w.extend(ones(r - 1));
    w
}

/// The replacement for [`interleaved_word`], before the outer ±1 shifts.
fn interleaved_replacement(r: usize, even: bool, k: usize) -> Vec<i64> {
    let ones = |d: usize| std::iter::repeat_n(-1, d);
    let mut w = Vec::new();
    for _ in 0..=k {
        if even {
            w.extend(ones(r - 2));
            w.push(-2);
        } else {
            w.extend(ones(r - 1));
            w.push(-2);
            w.extend(ones(r - 2));
            w.push(-2);
        }
    }
    w.extend(ones(if even { r - 2 } else { r - 1 }));
    w
}

/// Rewrites the interleaved block `sign · (1^{[r-1]}, 2, …, 2, 1^{[r-1]})` at
/// positions `i + 1 ..= j`.
pub fn rewrite_interleaved_block(cf: &RosenCF, i: usize, j: usize, sign: i8) -> Result<RosenCF> {
    let (r, even) = half(cf.context())?;
    let n = cf.len();
    check_block_bounds(n, i, j)?;
    let out = with_sign(cf.coeffs(), sign, |c| {
        let window = &c[i..j];
        let twos = window.iter().filter(|&&b| b == 2).count();
        let k = if even {
            twos.checked_sub(1)
        } else if twos % 2 == 0 {
            (twos / 2).checked_sub(1)
        } else {
            None
        };
        match k {
            Some(k) if window == interleaved_word(r, even, k).as_slice() => {
                splice(c, i, j, &interleaved_replacement(r, even, k))
            }
            _ => Err(Error::PatternNotPresent(format!(
                "no interleaved block {} at positions {}..={j}",
                sign_word(sign, window),
                i + 1
            ))),
        }
    })?;
    RosenCF::new(cf.context(), out)
}

/// One step of a reduction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RewriteStep {
    pub kind: PatternKind,
    pub sign: i8,
    pub start: usize,
    pub end: usize,
    pub before: Vec<i64>,
    pub after: Vec<i64>,
}

/// Applies rewrites at the leftmost forbidden pattern until none remains.
pub fn reduce_to_geodesic(cf: &RosenCF) -> Result<RosenCF> {
    reduce_to_geodesic_with_trace(cf).map(|(out, _)| out)
}

/// [`reduce_to_geodesic`] together with the list of rewrites applied.
pub fn reduce_to_geodesic_with_trace(cf: &RosenCF) -> Result<(RosenCF, Vec<RewriteStep>)> {
    let automaton = build_pattern_automaton(cf.context())?;
    let mut cur = cf.clone();
    let mut steps = Vec::new();
    while let Some(m) = automaton.find(cur.coeffs()) {
        let next = match m.kind {
            PatternKind::Zero => RosenCF::new(cur.context(), remove_zero(cur.coeffs(), m.start)?)?,
            PatternKind::Ones => rewrite_ones_block(&cur, m.start - 1, m.sign)?,
            PatternKind::Interleaved => {
                rewrite_interleaved_block(&cur, m.start - 1, m.end, m.sign)?
            }
        };
        if next.len() >= cur.len() {
            return Err(Error::Internal(format!("rewrite did not shorten {cur}")));
        }
        steps.push(RewriteStep {
            kind: m.kind,
            sign: m.sign,
            start: m.start,
            end: m.end,
            before: cur.coeffs().to_vec(),
            after: next.coeffs().to_vec(),
        });
        cur = next;
    }
    Ok((cur, steps))
}

//! All geodesic expansions of a vertex, and the Fibonacci bounds on their
//! number.
//!
//! The search walks from ∞ towards y. At a vertex x at distance d from y,
//! every geodesic continues through one of the two y-parents of x, so the
//! search only branches over those parents that sit at distance d - 1. The
//! theta graph has no polygonal faces; there the candidates are the few
//! neighbours of x whose translates sit next to y' = g(y).

use std::collections::HashMap;
use std::sync::Arc;

use num_bigint::BigInt;
use serde::Serialize;

use super::{fibonacci, path_to_cf, PathOfConvergents, RosenCF};
use crate::algebraic::{HeckeIndex, QContext};
use crate::error::{Error, Result};
use crate::farey::{adjacent, chain_length_d, nearest_integer_walk, parents, Vertex};
use crate::moebius::BoundaryPoint;

/// d(x, y), read off the length of the nearest-integer expansion of g(y)
/// where g(x) = ∞.
pub fn geodesic_distance(x: &Vertex, y: &Vertex) -> Result<usize> {
    if x == y {
        return Ok(0);
    }
    match x.map_to_infinity().apply(y.point()) {
        BoundaryPoint::Infinity => {
            Err(Error::Internal("distinct vertex mapped to infinity".into()))
        }
        BoundaryPoint::Finite(yp) => nearest_integer_walk(&yp)
            .map(|(c, _)| c.len())
            .ok_or_else(|| Error::NotAVertex(y.to_string())),
    }
}

struct Search {
    y: Vertex,
    distance: HashMap<Vertex, usize>,
    suffixes: HashMap<Vertex, Arc<Vec<Vec<Vertex>>>>,
}

impl Search {
    fn distance(&mut self, v: &Vertex) -> Result<usize> {
        if let Some(&d) = self.distance.get(v) {
            return Ok(d);
        }
        let d = geodesic_distance(v, &self.y)?;
        self.distance.insert(v.clone(), d);
        Ok(d)
    }

    /// Neighbours of `x` that can start a geodesic to y.
    fn candidates(&self, x: &Vertex) -> Result<Vec<Vertex>> {
        if x.context().q().is_infinite() {
            let g = x.map_to_infinity();
            let yp = g
                .apply(self.y.point())
                .finite()
                .cloned()
                .ok_or_else(|| Error::Internal("distinct vertex mapped to infinity".into()))?;
            let base = yp.div_lambda().floor();
            let back = g.inverse();
            Ok((-1..=2)
                .map(|k| Vertex::from_group(&back.mul_t(&(&base + BigInt::from(k)))))
                .collect())
        } else {
            let (a, b) = parents(x, &self.y)?;
            Ok(if a == b { vec![a] } else { vec![a, b] })
        }
    }

    /// Every geodesic from `x` to y, as vertex lists starting after `x`.
    fn suffixes(&mut self, x: &Vertex) -> Result<Arc<Vec<Vec<Vertex>>>> {
        if let Some(s) = self.suffixes.get(x) {
            return Ok(Arc::clone(s));
        }
        let out = if *x == self.y {
            vec![Vec::new()]
        } else if adjacent(x, &self.y) {
            vec![vec![self.y.clone()]]
        } else {
            let d = self.distance(x)?;
            let mut out = Vec::new();
            for p in self.candidates(x)? {
                if !adjacent(x, &p) || self.distance(&p)? + 1 != d {
                    continue;
                }
                for tail in self.suffixes(&p)?.iter() {
                    let mut path = Vec::with_capacity(tail.len() + 1);
                    path.push(p.clone());
                    path.extend_from_slice(tail);
                    out.push(path);
                }
            }
            if out.is_empty() {
                return Err(Error::Internal(format!(
                    "no geodesic step from {x} towards {}",
                    self.y
                )));
            }
            out
        };
        let out = Arc::new(out);
        self.suffixes.insert(x.clone(), Arc::clone(&out));
        Ok(out)
    }
}

/// All geodesic Rosen continued fraction expansions of `y`, sorted
/// lexicographically by coefficients.
pub fn enumerate_geodesic_expansions(y: &Vertex) -> Result<Vec<RosenCF>> {
    if y.is_infinity() {
        return Err(Error::InfiniteTarget);
    }
    let ctx = y.context();
    let start = Vertex::infinity(ctx);
    let mut search = Search {
        y: y.clone(),
        distance: HashMap::new(),
        suffixes: HashMap::new(),
    };
    let mut out = Vec::new();
    for tail in search.suffixes(&start)?.iter() {
        let mut vertices = Vec::with_capacity(tail.len() + 1);
        vertices.push(start.clone());
        vertices.extend_from_slice(tail);
        out.push(path_to_cf(&PathOfConvergents::new(vertices)?)?);
    }
    out.sort_by(|a, b| a.coeffs().cmp(b.coeffs()));
    Ok(out)
}

/// Upper bounds on the number of geodesic expansions of a vertex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CountBounds {
    /// d(∞, y), the common length of the geodesic expansions.
    pub length: usize,
    /// D(∞, y), the number of faces in the chain; absent for q = ∞.
    pub d_chain: Option<usize>,
    /// F_D.
    pub fibonacci_bound: Option<u128>,
    /// The sharper bound available for odd q when D > 1.
    pub refined: Option<u128>,
}

impl CountBounds {
    /// The smallest of the available bounds.
    pub fn best(&self) -> Option<u128> {
        match (self.fibonacci_bound, self.refined) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        }
    }
}

/// The refined bound for odd q and D = n > 1.
fn odd_bound(q: u32, n: usize) -> u128 {
    let half = |m: usize| fibonacci(u32::try_from(m).unwrap_or(u32::MAX));
    if n.is_multiple_of(2) {
        half(n / 2)
    } else if q == 3 {
        half((n - 1) / 2)
    } else {
        half((n - 3) / 2).saturating_mul(2)
    }
}

pub fn expansion_count_bounds(y: &Vertex) -> Result<CountBounds> {
    if y.is_infinity() {
        return Err(Error::InfiniteTarget);
    }
    let ctx: &Arc<QContext> = y.context();
    let start = Vertex::infinity(ctx);
    let length = geodesic_distance(&start, y)?;
    let q = match ctx.q() {
        HeckeIndex::Infinity => {
            return Ok(CountBounds {
                length,
                d_chain: None,
                fibonacci_bound: Some(1),
                refined: None,
            })
        }
        HeckeIndex::Finite(q) => q,
    };
    let d = chain_length_d(&start, y)?;
    let fib = fibonacci(u32::try_from(d).unwrap_or(u32::MAX));
    let refined = (q % 2 == 1 && d > 1).then(|| odd_bound(q, d));
    Ok(CountBounds {
        length,
        d_chain: Some(d),
        fibonacci_bound: Some(fib),
        refined,
    })
}

//! Brute-force ground truth, kept independent of the pattern automaton.
//!
//! Distances in F_q (q finite) come from iterating x ↦ α_y(x), which walks
//! a geodesic. F_∞ is a tree, so there the distance is computed by freely
//! reducing the nearest-integer walks from ∞ to each endpoint and cancelling
//! the common prefix.

use std::collections::{HashMap, VecDeque};

use serde::Serialize;

use crate::cf::RosenCF;
use crate::error::{Error, Result};
use crate::farey::{adjacent, nearest_integer_walk, parents, q_chain, QChain, Vertex};
use crate::moebius::{BoundaryPoint, GroupElement};

/// Upper limit on α-iteration steps before declaring a bug.
const MAX_ALPHA_STEPS: usize = 1_000_000;

/// d_q(x, y).
pub fn distance(x: &Vertex, y: &Vertex) -> Result<usize> {
    if x.context().q() != y.context().q() {
        return Err(Error::ContextMismatch {
            left: x.context().q().to_string(),
            right: y.context().q().to_string(),
        });
    }
    if x.context().q().is_infinite() {
        return theta_distance(x, y);
    }
    let mut cur = x.clone();
    for steps in 0..MAX_ALPHA_STEPS {
        if cur == *y {
            return Ok(steps);
        }
        if adjacent(&cur, y) {
            return Ok(steps + 1);
        }
        cur = parents(&cur, y)?.0;
    }
    Err(Error::Internal(format!(
        "alpha iteration from {x} to {y} exceeded {MAX_ALPHA_STEPS} steps"
    )))
}

/// The vertices of the backtrack-free walk from ∞ to `v` in F_∞.
fn theta_reduced_path(v: &Vertex) -> Result<Vec<Vertex>> {
    let ctx = v.context();
    let mut stack = vec![Vertex::infinity(ctx)];
    let x = match v.point() {
        BoundaryPoint::Infinity => return Ok(stack),
        BoundaryPoint::Finite(x) => x,
    };
    let (coeffs, _) = nearest_integer_walk(x).ok_or_else(|| Error::NotAVertex(v.to_string()))?;
    let mut g = GroupElement::identity(ctx);
    for b in &coeffs {
        g = g.mul_t(b);
        let w = Vertex::from_group(&g);
        if stack.len() >= 2 && stack[stack.len() - 2] == w {
            stack.pop();
        } else {
            stack.push(w);
        }
    }
    if stack.last() != Some(v) {
        return Err(Error::Internal(format!("walk to {v} ended elsewhere")));
    }
    Ok(stack)
}

fn theta_distance(x: &Vertex, y: &Vertex) -> Result<usize> {
    let px = theta_reduced_path(x)?;
    let py = theta_reduced_path(y)?;
    let common = px.iter().zip(&py).take_while(|(a, b)| a == b).count();
    Ok(px.len() + py.len() - 2 * common)
}

/// The plane graph formed by the faces of a q-chain.
#[derive(Clone, Debug, Serialize)]
pub struct ChainGraph {
    pub vertices: Vec<Vertex>,
    /// Undirected edges as index pairs with the smaller index first.
    pub edges: Vec<(usize, usize)>,
    pub adjacency: Vec<Vec<usize>>,
    pub x: usize,
    pub y: usize,
}

/// The union of the boundary edges of the faces of `chain`.
pub fn chain_graph(chain: &QChain) -> ChainGraph {
    let mut index: HashMap<Vertex, usize> = HashMap::new();
    let mut vertices = Vec::new();
    let mut id = |v: &Vertex, vertices: &mut Vec<Vertex>| {
        *index.entry(v.clone()).or_insert_with(|| {
            vertices.push(v.clone());
            vertices.len() - 1
        })
    };
    let mut edges = Vec::new();
    for face in chain.faces() {
        for (a, b) in face.edges() {
            let (i, j) = (id(a, &mut vertices), id(b, &mut vertices));
            edges.push((i.min(j), i.max(j)));
        }
    }
    edges.sort_unstable();
    edges.dedup();
    let mut adjacency = vec![Vec::new(); vertices.len()];
    for &(i, j) in &edges {
        adjacency[i].push(j);
        adjacency[j].push(i);
    }
    let x = id(chain.x(), &mut vertices);
    let y = id(chain.y(), &mut vertices);
    ChainGraph {
        vertices,
        edges,
        adjacency,
        x,
        y,
    }
}

impl ChainGraph {
    /// Breadth-first distances to `target`.
    fn distances_to(&self, target: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.vertices.len()];
        dist[target] = Some(0);
        let mut queue = VecDeque::from([target]);
        while let Some(u) = queue.pop_front() {
            let du = dist[u].expect("visited");
            for &w in &self.adjacency[u] {
                if dist[w].is_none() {
                    dist[w] = Some(du + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }
}

/// Every geodesic path from `x` to `y`, as vertex lists, in a deterministic
/// order. The search runs inside the chain graph and steps only to
/// vertices one closer to `y`.
pub fn all_geodesic_paths(x: &Vertex, y: &Vertex) -> Result<Vec<Vec<Vertex>>> {
    if x == y {
        return Ok(vec![vec![x.clone()]]);
    }
    if adjacent(x, y) {
        return Ok(vec![vec![x.clone(), y.clone()]]);
    }
    let graph = chain_graph(&q_chain(x, y)?);
    let dist = graph.distances_to(graph.y);
    let d = distance(x, y)?;
    if dist[graph.x] != Some(d) {
        return Err(Error::Internal(format!(
            "chain graph distance {:?} disagrees with alpha distance {d}",
            dist[graph.x]
        )));
    }
    let mut out = Vec::new();
    let mut path = vec![graph.x];
    fn walk(
        g: &ChainGraph,
        dist: &[Option<usize>],
        path: &mut Vec<usize>,
        out: &mut Vec<Vec<Vertex>>,
    ) {
        let u = *path.last().expect("non-empty");
        if u == g.y {
            out.push(path.iter().map(|&i| g.vertices[i].clone()).collect());
            return;
        }
        let du = dist[u].expect("reachable");
        for &w in &g.adjacency[u] {
            if dist[w] == Some(du - 1) {
                path.push(w);
                walk(g, dist, path, out);
                path.pop();
            }
        }
    }
    walk(&graph, &dist, &mut path, &mut out);
    Ok(out)
}

/// True when no shorter expansion of the value of `cf` exists.
pub fn is_geodesic_oracle(cf: &RosenCF) -> Result<bool> {
    let ctx = cf.context();
    let y = Vertex::from_group(&cf.matrix());
    if y.is_infinity() {
        return Ok(false);
    }
    Ok(distance(&Vertex::infinity(ctx), &y)? == cf.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebraic::{FieldElement, QContext};
    use num_rational::BigRational;
    use std::sync::Arc;

    fn ctx(q: u32) -> Arc<QContext> {
        QContext::finite(q).unwrap()
    }

    fn cf(q: u32, c: &[i64]) -> RosenCF {
        RosenCF::new(&ctx(q), c.to_vec()).unwrap()
    }

    fn cf_vertex(c: &Arc<QContext>, coeffs: &[i64]) -> Vertex {
        Vertex::from_group(&GroupElement::from_cf(c, coeffs).unwrap())
    }

    #[test]
    fn distances() {
        let c3 = ctx(3);
        let inf = Vertex::infinity(&c3);
        assert_eq!(distance(&inf, &inf).unwrap(), 0);
        assert_eq!(distance(&inf, &Vertex::lambda_multiple(&c3, 4)).unwrap(), 1);
        let y = Vertex::from_element(&FieldElement::from_rational(
            &c3,
            &BigRational::new(5.into(), 7.into()),
        ))
        .unwrap();
        assert_eq!(distance(&inf, &y).unwrap(), 3);
        assert_eq!(distance(&y, &inf).unwrap(), 3);
    }

    #[test]
    fn chain_graphs() {
        let c4 = ctx(4);
        let inf = Vertex::infinity(&c4);
        let g = chain_graph(&q_chain(&inf, &cf_vertex(&c4, &[0, 1])).unwrap());
        assert_eq!((g.vertices.len(), g.edges.len()), (4, 4));
        let g = chain_graph(&q_chain(&inf, &cf_vertex(&c4, &[0, 2])).unwrap());
        assert_eq!((g.vertices.len(), g.edges.len()), (6, 7));
        let c5 = ctx(5);
        let chain = q_chain(&Vertex::infinity(&c5), &cf_vertex(&c5, &[0, 3])).unwrap();
        assert_eq!(chain.len(), 3);
        let g = chain_graph(&chain);
        assert_eq!(g.vertices.len(), 3 * (5 - 2) + 2);
    }

    #[test]
    fn geodesic_paths() {
        for q in [4, 5, 6] {
            let c = ctx(q);
            let y = cf_vertex(&c, &[0, 4]);
            let paths = all_geodesic_paths(&Vertex::infinity(&c), &y).unwrap();
            assert_eq!(paths.len(), 1);
            assert_eq!(paths[0][1], cf_vertex(&c, &[0]));
        }
        let c6 = ctx(6);
        let opp = Vertex::from_group(&GroupElement::rho(&c6).power(3));
        let paths = all_geodesic_paths(&Vertex::infinity(&c6), &opp).unwrap();
        assert_eq!(paths.len(), 2);
        assert!(paths.iter().all(|p| p.len() == 4));
    }

    #[test]
    fn oracle_geodesic_checks() {
        assert!(!is_geodesic_oracle(&cf(4, &[2, 1, 1])).unwrap());
        assert!(is_geodesic_oracle(&cf(4, &[5, -2, 3])).unwrap());
        assert!(is_geodesic_oracle(&cf(7, &[-3])).unwrap());
        assert!(is_geodesic_oracle(&cf(3, &[1, 3, -2])).unwrap());
        assert!(!is_geodesic_oracle(&cf(3, &[1, 1, 1])).unwrap());
    }

    #[test]
    fn theta_tree_distance() {
        let t = QContext::theta();
        let v = |s: &str| Vertex::from_element(&FieldElement::parse(&t, s).unwrap()).unwrap();
        let inf = Vertex::infinity(&t);
        assert_eq!(distance(&inf, &v("0")).unwrap(), 1);
        assert_eq!(distance(&inf, &v("1/2")).unwrap(), 2);
        assert_eq!(distance(&v("1/2"), &v("-1/2")).unwrap(), 2);
        assert_eq!(distance(&v("2"), &v("4")).unwrap(), 2);
        assert!(!is_geodesic_oracle(&RosenCF::new(&t, vec![2, 0, 2]).unwrap()).unwrap());
        assert!(is_geodesic_oracle(&RosenCF::new(&t, vec![2, 1, -3]).unwrap()).unwrap());
    }
}

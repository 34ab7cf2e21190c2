//! The Farey graph F_q: vertices, adjacency, faces, y-parents, the turn
//! function and q-chains.
//!
//! Nothing is stored globally. Every face is the image `frame(E)` of the
//! fundamental q-gon E = ⟨∞, 0, …, λ⟩ under a group element, and questions
//! about a face are answered by pulling points back through its frame.

use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::algebraic::{FieldElement, HeckeIndex, QContext};
use crate::error::{Error, Result};
use crate::moebius::{cyclic_order, BoundaryPoint, CyclicOrder, GroupElement};

/// Longest nearest-integer walk attempted before a point is declared not to
/// be a vertex.
const MAX_EXPANSION_STEPS: usize = 4096;
/// Guard against non-terminating chain construction.
const MAX_CHAIN_FACES: usize = 100_000;

/// A vertex of F_q, carrying a group element that sends it to ∞.
#[derive(Clone)]
pub struct Vertex {
    point: BoundaryPoint,
    to_infinity: GroupElement,
}

impl Vertex {
    pub fn infinity(ctx: &Arc<QContext>) -> Vertex {
        Vertex {
            point: BoundaryPoint::Infinity,
            to_infinity: GroupElement::identity(ctx),
        }
    }

    /// The vertex `h(∞)`.
    pub fn from_group(h: &GroupElement) -> Vertex {
        Vertex {
            point: h.apply(&BoundaryPoint::Infinity),
            to_infinity: h.inverse(),
        }
    }

    /// Validates that `p` lies in the orbit of ∞ and records a witness.
    pub fn from_point(ctx: &Arc<QContext>, p: &BoundaryPoint) -> Result<Vertex> {
        let x = match p {
            BoundaryPoint::Infinity => return Ok(Vertex::infinity(ctx)),
            BoundaryPoint::Finite(x) => x,
        };
        if x.context().q() != ctx.q() {
            return Err(Error::ContextMismatch {
                left: ctx.q().to_string(),
                right: x.context().q().to_string(),
            });
        }
        if ctx.q().is_infinite() && !is_theta_vertex(x) {
            return Err(Error::NotAVertex(x.to_string()));
        }
        let (_, product) =
            nearest_integer_walk(x).ok_or_else(|| Error::NotAVertex(x.to_string()))?;
        Ok(Vertex {
            point: p.clone(),
            to_infinity: product.inverse(),
        })
    }

    pub fn from_element(x: &FieldElement) -> Result<Vertex> {
        Self::from_point(x.context(), &BoundaryPoint::Finite(x.clone()))
    }

    /// kλ, a neighbour of ∞.
    pub fn lambda_multiple(ctx: &Arc<QContext>, k: i64) -> Vertex {
        Vertex::from_group(&GroupElement::t(ctx, k))
    }

    pub fn point(&self) -> &BoundaryPoint {
        &self.point
    }

    pub fn context(&self) -> &Arc<QContext> {
        self.to_infinity.context()
    }

    pub fn is_infinity(&self) -> bool {
        self.point.is_infinite()
    }

    /// A group element g with g(self) = ∞.
    pub fn map_to_infinity(&self) -> &GroupElement {
        &self.to_infinity
    }

    /// The image of this vertex under `g`.
    pub fn image(&self, g: &GroupElement) -> Vertex {
        Vertex {
            point: g.apply(&self.point),
            to_infinity: self.to_infinity.mul(&g.inverse()),
        }
    }

    /// The mirror image under κ(z) = -z̄.
    pub fn kappa(&self) -> Vertex {
        // κ T_b κ = T_{-b}, so conjugating the witness by z ↦ -z keeps it in
        // the group: [[a, b], [c, d]] ↦ [[a, -b], [-c, d]].
        let [a, b, c, d] = self.to_infinity.entries();
        let g = GroupElement::new(a.clone(), -b, -c, d.clone()).expect("conjugate by kappa");
        Vertex {
            point: self.point.kappa(),
            to_infinity: g,
        }
    }
}

impl PartialEq for Vertex {
    fn eq(&self, other: &Self) -> bool {
        self.point == other.point
    }
}

impl Eq for Vertex {}

impl Hash for Vertex {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.point.hash(state);
    }
}

impl fmt::Debug for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Vertex({})", self.point)
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.point.fmt(f)
    }
}

impl Serialize for Vertex {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.point.serialize(s)
    }
}

/// Theta-group vertices are ∞ and the fractions a/b in lowest terms with a
/// and b of opposite parity.
fn is_theta_vertex(x: &FieldElement) -> bool {
    match x.as_rational() {
        Some(r) => r.numer().is_odd() != r.denom().is_odd(),
        None => false,
    }
}

/// Runs the nearest-integer algorithm on `x`, returning the coefficients and
/// their product T_{b_1}⋯T_{b_n}, or `None` if ∞ is not reached within the
/// step limit.
pub(crate) fn nearest_integer_walk(x: &FieldElement) -> Option<(Vec<BigInt>, GroupElement)> {
    let ctx = x.context();
    let mut coeffs = Vec::new();
    let mut product = GroupElement::identity(ctx);
    let mut y = x.clone();
    for _ in 0..MAX_EXPANSION_STEPS {
        let b = y.nearest_lambda_multiple();
        product = product.mul_t(&b);
        let rem = &y - &FieldElement::lambda(ctx).scale(&b);
        coeffs.push(b);
        if rem.is_zero() {
            return Some((coeffs, product));
        }
        y = -rem.invert().expect("non-zero remainder");
    }
    None
}

/// True when `{u, v}` is an edge of F_q.
pub fn adjacent(u: &Vertex, v: &Vertex) -> bool {
    if u == v || u.context().q() != v.context().q() {
        return false;
    }
    if u.context().q().is_infinite() {
        let (a, b) = theta_fraction(&u.point);
        let (c, d) = theta_fraction(&v.point);
        return (a * &d - b * &c).abs().is_one();
    }
    match u.to_infinity.apply(&v.point) {
        BoundaryPoint::Infinity => false,
        BoundaryPoint::Finite(w) => w.as_lambda_multiple().is_some(),
    }
}

/// `(numerator, denominator)` with ∞ = 1/0.
fn theta_fraction(p: &BoundaryPoint) -> (BigInt, BigInt) {
    match p {
        BoundaryPoint::Infinity => (BigInt::one(), BigInt::zero()),
        BoundaryPoint::Finite(x) => {
            let r = x.as_rational().expect("theta vertices are rational");
            (r.numer().clone(), r.denom().clone())
        }
    }
}

/// A group element sending `x` to ∞.
pub fn map_to_infinity(x: &Vertex) -> GroupElement {
    x.to_infinity.clone()
}

/// The turn integer φ(a, b, c) = (c' - a')/λ after sending b to ∞.
pub fn phi(a: &Vertex, b: &Vertex, c: &Vertex) -> Result<i64> {
    for (u, v) in [(a, b), (b, c)] {
        if !adjacent(u, v) {
            return Err(Error::NotAdjacent(u.to_string(), v.to_string()));
        }
    }
    let g = &b.to_infinity;
    let (BoundaryPoint::Finite(ap), BoundaryPoint::Finite(cp)) =
        (g.apply(&a.point), g.apply(&c.point))
    else {
        return Err(Error::Internal("neighbour mapped to infinity".into()));
    };
    let k = (&cp - &ap)
        .as_lambda_multiple()
        .ok_or_else(|| Error::Internal("turn is not an integer".into()))?;
    k.to_i64()
        .ok_or_else(|| Error::CoefficientOverflow(k.to_string()))
}

/// Data attached to the fundamental face E, computed once per q.
struct Fundamental {
    /// `vertex_maps[j](∞) = E_j`, namely ρ^(q-j) (identity for j = 0).
    vertex_maps: Vec<GroupElement>,
    /// `E_j` as points.
    points: Vec<BoundaryPoint>,
    /// `cross[j] = ρ^(-j) τ^(-1)` sends E to the face across edge (E_j, E_{j+1}).
    cross: Vec<GroupElement>,
    /// The reference vertex used to label y-parents.
    opposite: FieldElement,
}

fn fundamental(ctx: &Arc<QContext>) -> Result<Arc<Fundamental>> {
    let q = match ctx.q() {
        HeckeIndex::Finite(q) => q as usize,
        HeckeIndex::Infinity => {
            return Err(Error::Unsupported {
                q: "inf".into(),
                reason: "the theta Farey graph is a tree without polygonal faces",
            })
        }
    };
    static CACHE: OnceLock<Mutex<HashMap<HeckeIndex, Arc<Fundamental>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(f) = cache.lock().expect("face cache poisoned").get(&ctx.q()) {
        return Ok(Arc::clone(f));
    }
    let rho = GroupElement::rho(ctx);
    let rho_inv = rho.inverse();
    let tau_inv = GroupElement::tau(ctx).inverse();

    let mut vertex_maps = vec![GroupElement::identity(ctx)];
    let mut pow = GroupElement::identity(ctx);
    let mut rho_pows = vec![pow.clone()];
    for _ in 1..q {
        pow = pow.mul(&rho);
        rho_pows.push(pow.clone());
    }
    for j in 1..q {
        vertex_maps.push(rho_pows[q - j].clone());
    }
    let points: Vec<BoundaryPoint> = vertex_maps
        .iter()
        .map(|g| g.apply(&BoundaryPoint::Infinity))
        .collect();
    let mut cross = Vec::with_capacity(q);
    let mut inv_pow = GroupElement::identity(ctx);
    for _ in 0..q {
        cross.push(inv_pow.mul(&tau_inv));
        inv_pow = inv_pow.mul(&rho_inv);
    }

    // Even q: the vertex of E opposite ∞. Odd q: merge E with the face across
    // the edge opposite ∞ and take the vertex of the resulting (2q-2)-gon
    // opposite ∞.
    let opposite_point = if q % 2 == 0 {
        points[q / 2].clone()
    } else {
        let r = (q - 1) / 2;
        cross[r]
            .mul(&vertex_maps[r])
            .apply(&BoundaryPoint::Infinity)
    };
    let opposite = opposite_point
        .finite()
        .cloned()
        .ok_or_else(|| Error::Internal("opposite vertex at infinity".into()))?;

    let f = Arc::new(Fundamental {
        vertex_maps,
        points,
        cross,
        opposite,
    });
    cache
        .lock()
        .expect("face cache poisoned")
        .insert(ctx.q(), Arc::clone(&f));
    Ok(f)
}

/// The vertex of F_q used to break ties between y-parents of ∞: the vertex
/// of E opposite ∞ for even q, and the vertex opposite ∞ in the union of E
/// with its neighbour across the far edge for odd q.
pub fn reference_opposite_vertex(ctx: &Arc<QContext>) -> Result<FieldElement> {
    Ok(fundamental(ctx)?.opposite.clone())
}

/// Where a point sits relative to a face.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Location {
    Vertex(usize),
    /// Strictly inside the arc from vertex j anticlockwise to vertex j + 1.
    Arc(usize),
}

fn locate_in_fundamental(fund: &Fundamental, p: &BoundaryPoint) -> Location {
    let z = match p {
        BoundaryPoint::Infinity => return Location::Vertex(0),
        BoundaryPoint::Finite(z) => z,
    };
    let q = fund.points.len();
    // E_1 = 0 < E_2 < … < E_{q-1} = λ.
    let (mut lo, mut hi) = (1usize, q - 1);
    let first = fund.points[1].finite().expect("finite");
    match z.cmp_value(first) {
        std::cmp::Ordering::Less => return Location::Arc(0),
        std::cmp::Ordering::Equal => return Location::Vertex(1),
        std::cmp::Ordering::Greater => {}
    }
    let last = fund.points[q - 1].finite().expect("finite");
    match z.cmp_value(last) {
        std::cmp::Ordering::Greater => return Location::Arc(q - 1),
        std::cmp::Ordering::Equal => return Location::Vertex(q - 1),
        std::cmp::Ordering::Less => {}
    }
    // Invariant: E_lo < z < E_hi.
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        match z.cmp_value(fund.points[mid].finite().expect("finite")) {
            std::cmp::Ordering::Less => hi = mid,
            std::cmp::Ordering::Equal => return Location::Vertex(mid),
            std::cmp::Ordering::Greater => lo = mid,
        }
    }
    Location::Arc(lo)
}

/// A face of F_q, stored as `frame(E)`.
#[derive(Clone)]
pub struct Face {
    vertices: Vec<Vertex>,
    frame: GroupElement,
}

impl Face {
    fn from_frame(frame: GroupElement, fund: &Fundamental) -> Face {
        let vertices = fund
            .vertex_maps
            .iter()
            .map(|m| Vertex::from_group(&frame.mul(m)))
            .collect();
        Face { vertices, frame }
    }

    /// The face `g(E)`.
    pub fn image_of_fundamental(g: &GroupElement) -> Result<Face> {
        let fund = fundamental(g.context())?;
        Ok(Self::from_frame(g.clone(), &fund))
    }

    /// Vertices in anticlockwise order, starting at `frame(∞)`.
    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn frame(&self) -> &GroupElement {
        &self.frame
    }

    pub fn contains(&self, v: &Vertex) -> bool {
        self.vertices.contains(v)
    }

    pub fn position(&self, v: &Vertex) -> Option<usize> {
        self.vertices.iter().position(|w| w == v)
    }

    /// Boundary edges as index pairs `(j, j + 1 mod q)`.
    pub fn edges(&self) -> impl Iterator<Item = (&Vertex, &Vertex)> {
        let n = self.vertices.len();
        (0..n).map(move |j| (&self.vertices[j], &self.vertices[(j + 1) % n]))
    }

    /// The vertex list rotated to start at the vertex whose JSON rendering is
    /// least.
    pub fn canonical_vertices(&self) -> Vec<Vertex> {
        let keys: Vec<String> = self
            .vertices
            .iter()
            .map(|v| serde_json::to_string(v.point()).expect("serializable"))
            .collect();
        let start = (0..keys.len())
            .min_by(|&i, &j| keys[i].cmp(&keys[j]))
            .unwrap_or(0);
        let mut out = self.vertices[start..].to_vec();
        out.extend_from_slice(&self.vertices[..start]);
        out
    }

    /// The other face sharing the edge from vertex `j` to vertex `j + 1`.
    pub fn across_edge(&self, j: usize) -> Result<Face> {
        let fund = fundamental(self.frame.context())?;
        if j >= self.vertices.len() {
            return Err(Error::InvalidIndex {
                index: j,
                len: self.vertices.len(),
                reason: "edge index out of range",
            });
        }
        Ok(Self::from_frame(self.frame.mul(&fund.cross[j]), &fund))
    }
}

impl PartialEq for Face {
    fn eq(&self, other: &Self) -> bool {
        self.canonical_vertices() == other.canonical_vertices()
    }
}

impl Eq for Face {}

impl fmt::Debug for Face {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.vertices.iter()).finish()
    }
}

impl Serialize for Face {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr {
            vertices: Vec<Vertex>,
        }
        Repr {
            vertices: self.canonical_vertices(),
        }
        .serialize(s)
    }
}

/// τ^b(E), the face with vertices ∞, bλ, …, (b + 1)λ.
pub fn face_of_fundamental(ctx: &Arc<QContext>, b: i64) -> Result<Face> {
    let fund = fundamental(ctx)?;
    Ok(Face::from_frame(GroupElement::tau_power(ctx, b), &fund))
}

fn require_separated(x: &Vertex, y: &Vertex) -> Result<()> {
    if x == y {
        return Err(Error::EqualOrAdjacent("the vertices coincide"));
    }
    if adjacent(x, y) {
        return Err(Error::EqualOrAdjacent("the vertices are adjacent"));
    }
    Ok(())
}

/// `(g, y', b)` with g(x) = ∞, y' = g(y) and bλ < y' < (b + 1)λ.
fn conjugate_to_infinity(x: &Vertex, y: &Vertex) -> Result<(GroupElement, FieldElement, BigInt)> {
    let g = x.to_infinity.clone();
    let yp = g
        .apply(&y.point)
        .finite()
        .cloned()
        .ok_or_else(|| Error::Internal("distinct vertex mapped to infinity".into()))?;
    let b = yp.div_lambda().floor();
    Ok((g, yp, b))
}

/// The face incident to `x` whose two x-neighbours separate `x` from `y`.
pub fn face_p(x: &Vertex, y: &Vertex) -> Result<Face> {
    let fund = fundamental(x.context())?;
    require_separated(x, y)?;
    let (g, _, b) = conjugate_to_infinity(x, y)?;
    let frame = g
        .inverse()
        .mul(&GroupElement::tau_power_big(x.context(), &b));
    Ok(Face::from_frame(frame, &fund))
}

/// The y-parents `(α, β)` of `x`. Both equal `y` when `x = y` or when the two
/// are adjacent.
pub fn parents(x: &Vertex, y: &Vertex) -> Result<(Vertex, Vertex)> {
    if x == y || adjacent(x, y) {
        return Ok((y.clone(), y.clone()));
    }
    let fund = fundamental(x.context())?;
    let (g, yp, b) = conjugate_to_infinity(x, y)?;
    let ctx = x.context();
    // Position of y' inside the translated face τ^b(E), compared with the
    // reference vertex. A tie picks bλ, the parent u with (u, ∞, v)
    // clockwise.
    let rel = &yp - &FieldElement::lambda(ctx).scale(&b);
    let b_alpha = if rel.cmp_value(&fund.opposite).is_gt() {
        &b + 1
    } else {
        b.clone()
    };
    let b_beta = if b_alpha == b { &b + 1 } else { b };
    let back = g.inverse();
    let alpha = Vertex::from_group(&back.mul(&GroupElement::t_big(ctx, &b_alpha)));
    let beta = Vertex::from_group(&back.mul(&GroupElement::t_big(ctx, &b_beta)));
    Ok((alpha, beta))
}

/// The chain of faces from `x` to `y`.
#[derive(Clone, Debug, Serialize)]
pub struct QChain {
    x: Vertex,
    y: Vertex,
    faces: Vec<Face>,
    bridges: Vec<(Vertex, Vertex)>,
}

impl QChain {
    pub fn x(&self) -> &Vertex {
        &self.x
    }

    pub fn y(&self) -> &Vertex {
        &self.y
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    /// Shared edges `{a_i, b_i}` between consecutive faces.
    pub fn bridges(&self) -> &[(Vertex, Vertex)] {
        &self.bridges
    }

    pub fn len(&self) -> usize {
        self.faces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.faces.is_empty()
    }
}

/// Frames of the chain faces and, for each crossing, the edge index crossed.
fn chain_frames(x: &Vertex, y: &Vertex) -> Result<(Vec<GroupElement>, Vec<usize>)> {
    let fund = fundamental(x.context())?;
    require_separated(x, y)?;
    let (g, _, b) = conjugate_to_infinity(x, y)?;
    let mut frame = g
        .inverse()
        .mul(&GroupElement::tau_power_big(x.context(), &b));
    let mut frames = Vec::new();
    let mut crossings = Vec::new();
    loop {
        if frames.len() >= MAX_CHAIN_FACES {
            return Err(Error::Internal(format!(
                "q-chain from {x} to {y} exceeded {MAX_CHAIN_FACES} faces"
            )));
        }
        let pulled = frame.inverse().apply(&y.point);
        let loc = locate_in_fundamental(&fund, &pulled);
        frames.push(frame.clone());
        match loc {
            Location::Vertex(_) => return Ok((frames, crossings)),
            Location::Arc(j) => {
                crossings.push(j);
                frame = frame.mul(&fund.cross[j]);
            }
        }
    }
}

/// The q-chain from `x` to `y`.
pub fn q_chain(x: &Vertex, y: &Vertex) -> Result<QChain> {
    let fund = fundamental(x.context())?;
    let (frames, crossings) = chain_frames(x, y)?;
    let faces: Vec<Face> = frames
        .into_iter()
        .map(|f| Face::from_frame(f, &fund))
        .collect();
    let q = fund.points.len();
    let bridges = faces
        .iter()
        .zip(&crossings)
        .map(|(f, &j)| (f.vertices[(j + 1) % q].clone(), f.vertices[j].clone()))
        .collect();
    Ok(QChain {
        x: x.clone(),
        y: y.clone(),
        faces,
        bridges,
    })
}

/// D(x, y): 0 for equal vertices, 1 for adjacent ones and otherwise the
/// number of faces in the q-chain.
pub fn chain_length_d(x: &Vertex, y: &Vertex) -> Result<usize> {
    if x == y {
        return Ok(0);
    }
    if adjacent(x, y) {
        return Ok(1);
    }
    Ok(chain_frames(x, y)?.0.len())
}

/// True when the edge `{a, b}` separates `x` from `y` on the boundary circle.
pub fn separates(a: &Vertex, b: &Vertex, x: &Vertex, y: &Vertex) -> bool {
    let ox = cyclic_order(&a.point, &x.point, &b.point);
    let oy = cyclic_order(&a.point, &y.point, &b.point);
    ox != CyclicOrder::Degenerate && oy != CyclicOrder::Degenerate && ox != oy
}

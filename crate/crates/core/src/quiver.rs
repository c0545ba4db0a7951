//! Finite quivers with loops, the lattice `K(R)` and the Euler forms.
//!
//! Vertices are stored in a topological order of the loop-free part, so the
//! change-of-basis matrix `C` (row `i` is `Ŝ_i` in the projective basis) is
//! upper triangular with diagonal `1 - c_i`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, AddAssign, Neg, Sub};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{HallError, Result};
use crate::fp::is_prime;
use crate::scalar::{Exponent, ScalarRing};

/// An element of `K(R)` in the projective basis `{P̂_i}`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct KVector(pub Vec<i64>);

impl KVector {
    pub fn zero(n: usize) -> Self {
        KVector(vec![0; n])
    }

    pub fn unit(n: usize, i: usize) -> Self {
        let mut v = vec![0; n];
        v[i] = 1;
        KVector(v)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn scaled(&self, k: i64) -> KVector {
        KVector(self.0.iter().map(|x| x * k).collect())
    }
}

impl fmt::Debug for KVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for KVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl Add for &KVector {
    type Output = KVector;
    fn add(self, rhs: &KVector) -> KVector {
        KVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &KVector {
    type Output = KVector;
    fn sub(self, rhs: &KVector) -> KVector {
        KVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &KVector {
    type Output = KVector;
    fn neg(self) -> KVector {
        KVector(self.0.iter().map(|a| -a).collect())
    }
}

impl AddAssign<&KVector> for KVector {
    fn add_assign(&mut self, rhs: &KVector) {
        for (a, b) in self.0.iter_mut().zip(&rhs.0) {
            *a += b;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vertex {
    pub id: String,
    pub loops: u32,
    pub charge: u32,
}

/// An arrow `tail -> head` (a loop when the two agree), by vertex index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Arrow {
    pub tail: usize,
    pub head: usize,
}

/// The symmetric Borcherds–Cartan matrix `a_ij = (Ŝ_i, Ŝ_j)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BorcherdsCartan {
    pub matrix: Vec<Vec<i64>>,
}

impl BorcherdsCartan {
    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.matrix[i][j]
    }

    pub fn is_real(&self, i: usize) -> bool {
        self.matrix[i][i] == 2
    }

    /// Symmetric, even diagonal at most 2, nonpositive off the diagonal.
    pub fn is_valid(&self) -> bool {
        let n = self.matrix.len();
        (0..n).all(|i| {
            let d = self.matrix[i][i];
            d <= 2
                && d % 2 == 0
                && (0..n).all(|j| self.matrix[i][j] == self.matrix[j][i] && (i == j || self.matrix[i][j] <= 0))
        })
    }
}

#[derive(Debug, Clone)]
pub struct Quiver {
    field: Option<u32>,
    vertices: Vec<Vertex>,
    edges: Vec<Arrow>,
    arrows: Vec<Arrow>,
    /// `C`, rows `Ŝ_i` in projective coordinates.
    cmat: Vec<Vec<i64>>,
    /// `C^{-T}`, used by the Euler form.
    cinv_t: Vec<Vec<Exponent>>,
    hash: String,
}

impl Quiver {
    /// Parses the line-based quiver format.
    ///
    /// ```
    /// let q = hallq::Quiver::parse("field p=2\nvertex a loops=0\nvertex b loops=0\nedge a b\n").unwrap();
    /// assert_eq!(q.num_vertices(), 2);
    /// ```
    pub fn parse(text: &str) -> Result<Self> {
        let mut field = None;
        let mut vertices: Vec<Vertex> = Vec::new();
        let mut raw_edges: Vec<(String, String, usize)> = Vec::new();
        for (ln, raw) in text.lines().enumerate() {
            let line_no = ln + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| HallError::Parse { line: line_no, msg };
            let mut words = line.split_whitespace();
            match words.next() {
                Some("field") => {
                    let spec = words.next().ok_or_else(|| err("expected p=<prime>".into()))?;
                    let p: u32 = spec
                        .strip_prefix("p=")
                        .and_then(|s| s.parse().ok())
                        .ok_or_else(|| err(format!("bad field `{spec}`")))?;
                    if !is_prime(p) {
                        return Err(err(format!("{p} is not prime")));
                    }
                    if words.next().is_some() || field.is_some() {
                        return Err(err("duplicate or trailing field data".into()));
                    }
                    field = Some(p);
                }
                Some("vertex") => {
                    let id = words.next().ok_or_else(|| err("expected a vertex id".into()))?;
                    let mut loops = None;
                    let mut charge = 1u32;
                    for w in words {
                        let (k, v) = w.split_once('=').ok_or_else(|| err(format!("bad attribute `{w}`")))?;
                        let n: u32 = v.parse().map_err(|_| err(format!("bad number `{v}`")))?;
                        match k {
                            "loops" => loops = Some(n),
                            "charge" => charge = n,
                            _ => return Err(err(format!("unknown attribute `{k}`"))),
                        }
                    }
                    let loops = loops.ok_or_else(|| err("missing loops=<c>".into()))?;
                    if vertices.iter().any(|v| v.id == id) {
                        return Err(err(format!("duplicate vertex `{id}`")));
                    }
                    if charge == 0 {
                        return Err(err("charge must be positive".into()));
                    }
                    vertices.push(Vertex { id: id.to_string(), loops, charge });
                }
                Some("edge") => {
                    let t = words.next().ok_or_else(|| err("expected tail".into()))?;
                    let h = words.next().ok_or_else(|| err("expected head".into()))?;
                    if words.next().is_some() {
                        return Err(err("trailing data after edge".into()));
                    }
                    if t == h {
                        return Err(err("loops are declared with loops=<c>, not as edges".into()));
                    }
                    raw_edges.push((t.to_string(), h.to_string(), line_no));
                }
                Some(other) => return Err(err(format!("unknown directive `{other}`"))),
                None => unreachable!(),
            }
        }
        let index: HashMap<&str, usize> = vertices.iter().enumerate().map(|(i, v)| (v.id.as_str(), i)).collect();
        let mut edges = Vec::new();
        for (t, h, line) in &raw_edges {
            let ti = *index
                .get(t.as_str())
                .ok_or_else(|| HallError::Parse { line: *line, msg: format!("unknown vertex `{t}`") })?;
            let hi = *index
                .get(h.as_str())
                .ok_or_else(|| HallError::Parse { line: *line, msg: format!("unknown vertex `{h}`") })?;
            edges.push((ti, hi));
        }
        Self::from_parts(field, vertices, edges)
    }

    /// Validates and builds a quiver from vertices and edges given by index.
    pub fn from_parts(field: Option<u32>, vertices: Vec<Vertex>, edges: Vec<(usize, usize)>) -> Result<Self> {
        for v in &vertices {
            if v.loops == 1 {
                return Err(HallError::ConditionB(v.id.clone()));
            }
            if v.loops == 0 && v.charge != 1 {
                return Err(HallError::Parse {
                    line: 0,
                    msg: format!("vertex `{}` has no loops, so its charge must be 1", v.id),
                });
            }
        }
        if let Some(p) = field {
            if !is_prime(p) {
                return Err(HallError::Parse { line: 0, msg: format!("{p} is not prime") });
            }
        }
        let order = topological_order(&vertices, &edges)?;
        let mut position = vec![0; vertices.len()];
        for (new, &old) in order.iter().enumerate() {
            position[old] = new;
        }
        let sorted: Vec<Vertex> = order.iter().map(|&i| vertices[i].clone()).collect();
        let mut sorted_edges: Vec<Arrow> = edges
            .iter()
            .map(|&(t, h)| Arrow { tail: position[t], head: position[h] })
            .collect();
        sorted_edges.sort_by_key(|a| (a.tail, a.head));

        let mut arrows = Vec::new();
        for (i, v) in sorted.iter().enumerate() {
            for _ in 0..v.loops {
                arrows.push(Arrow { tail: i, head: i });
            }
        }
        arrows.extend(sorted_edges.iter().copied());

        let n = sorted.len();
        let mut cmat = vec![vec![0i64; n]; n];
        for (i, row) in cmat.iter_mut().enumerate() {
            row[i] = 1;
        }
        for a in &arrows {
            cmat[a.tail][a.head] -= 1;
        }
        let cinv_t = invert_upper_triangular(&cmat)
            .into_iter()
            .collect::<Vec<_>>();
        let cinv_t = transpose(&cinv_t);

        let mut q = Quiver { field, vertices: sorted, edges: sorted_edges, arrows, cmat, cinv_t, hash: String::new() };
        q.hash = q.content_hash();
        Ok(q)
    }

    fn content_hash(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.render().as_bytes());
        hex::encode(h.finalize())
    }

    /// Canonical text rendering; parsing it yields the same quiver.
    pub fn render(&self) -> String {
        let mut out = String::new();
        if let Some(p) = self.field {
            out.push_str(&format!("field p={p}\n"));
        }
        for v in &self.vertices {
            out.push_str(&format!("vertex {} loops={} charge={}\n", v.id, v.loops, v.charge));
        }
        for e in &self.edges {
            out.push_str(&format!("edge {} {}\n", self.vertices[e.tail].id, self.vertices[e.head].id));
        }
        out
    }

    /// SHA-256 of the canonical rendering.
    pub fn hash(&self) -> &str {
        &self.hash
    }

    pub fn field(&self) -> Option<u32> {
        self.field
    }

    /// The same quiver with a different charge at one vertex.
    pub fn with_charge(&self, vertex: &str, charge: u32) -> Result<Quiver> {
        let mut vs = self.vertices.clone();
        let v = vs
            .iter_mut()
            .find(|v| v.id == vertex)
            .ok_or_else(|| HallError::Mismatch(format!("no vertex `{vertex}`")))?;
        v.charge = charge;
        let edges = self.edges.iter().map(|a| (a.tail, a.head)).collect();
        Quiver::from_parts(self.field, vs, edges)
    }

    pub fn with_field(&self, p: u32) -> Result<Quiver> {
        let edges = self.edges.iter().map(|a| (a.tail, a.head)).collect();
        Quiver::from_parts(Some(p), self.vertices.clone(), edges)
    }

    /// Checks `m_i ≤ p^{c_i}` for every vertex.
    pub fn check_charge(&self, p: u32) -> Result<()> {
        for v in &self.vertices {
            let available = (p as u64).checked_pow(v.loops).unwrap_or(u64::MAX);
            if v.charge as u64 > available {
                return Err(HallError::ChargeTooLarge { vertex: v.id.clone(), charge: v.charge as u64, available, p });
            }
        }
        Ok(())
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn vertex_index(&self, id: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v.id == id)
    }

    /// Edges between distinct vertices.
    pub fn edges(&self) -> &[Arrow] {
        &self.edges
    }

    /// All arrows: each vertex's loops in vertex order, then the edges.
    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    pub fn is_loop_free(&self) -> bool {
        self.vertices.iter().all(|v| v.loops == 0)
    }

    /// Denominator bound `N = 2·|∏(1 - c_i)|` for exponents of `v`.
    pub fn exponent_denominator(&self) -> i64 {
        2 * self.vertices.iter().map(|v| (1 - v.loops as i64).abs()).product::<i64>()
    }

    pub fn scalar_ring(&self) -> ScalarRing {
        ScalarRing::new(self.exponent_denominator()).expect("N is positive")
    }

    pub fn change_of_basis(&self) -> &[Vec<i64>] {
        &self.cmat
    }

    /// `Ŝ_i` in projective coordinates.
    pub fn simple_class(&self, i: usize) -> KVector {
        KVector(self.cmat[i].clone())
    }

    pub fn projective_class(&self, i: usize) -> KVector {
        KVector::unit(self.num_vertices(), i)
    }

    /// `Â = Σ d_i P̂_i − Σ_σ d_{t(σ)} P̂_{h(σ)}`.
    pub fn class_of_dimvec(&self, d: &[usize]) -> KVector {
        assert_eq!(d.len(), self.num_vertices(), "dimension vector has the wrong length");
        let mut out: Vec<i64> = d.iter().map(|&x| x as i64).collect();
        for a in &self.arrows {
            out[a.head] -= d[a.tail] as i64;
        }
        KVector(out)
    }

    /// Rational coordinates in the simple basis: `x = Σ r_i Ŝ_i`.
    pub fn simple_coordinates(&self, x: &KVector) -> Vec<Exponent> {
        // r = x C^{-1}, i.e. r_j = Σ_i x_i (C^{-1})_{ij} = Σ_i x_i (C^{-T})_{ji}
        let n = self.num_vertices();
        (0..n)
            .map(|j| {
                (0..n).fold(Exponent::zero(), |acc, i| acc + self.cinv_t[j][i] * Exponent::from_integer(x.0[i]))
            })
            .collect()
    }

    /// The Ringel form `⟨a, b⟩_Q` on dimension vectors.
    pub fn ringel_form(&self, a: &[usize], b: &[usize]) -> i64 {
        let mut s: i64 = a.iter().zip(b).map(|(&x, &y)| (x * y) as i64).sum();
        for arr in &self.arrows {
            s -= (a[arr.tail] * b[arr.head]) as i64;
        }
        s
    }

    /// The generalized Euler form `⟨x, y⟩ = x C^{-T} yᵀ`.
    pub fn euler_form(&self, x: &KVector, y: &KVector) -> Exponent {
        let n = self.num_vertices();
        let mut acc = Exponent::zero();
        for i in 0..n {
            if x.0[i] == 0 {
                continue;
            }
            for j in 0..n {
                if y.0[j] != 0 {
                    acc += self.cinv_t[i][j] * Exponent::from_integer(x.0[i] * y.0[j]);
                }
            }
        }
        acc
    }

    /// `(x, y) = ⟨x, y⟩ + ⟨y, x⟩`.
    pub fn sym_form(&self, x: &KVector, y: &KVector) -> Exponent {
        self.euler_form(x, y) + self.euler_form(y, x)
    }

    pub fn borcherds_cartan(&self) -> BorcherdsCartan {
        let n = self.num_vertices();
        let matrix = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let v = self.sym_form(&self.simple_class(i), &self.simple_class(j));
                        assert!(v.is_integer(), "Cartan entries are integral");
                        v.to_integer()
                    })
                    .collect()
            })
            .collect();
        BorcherdsCartan { matrix }
    }
}

fn topological_order(vertices: &[Vertex], edges: &[(usize, usize)]) -> Result<Vec<usize>> {
    let n = vertices.len();
    let mut indeg = vec![0usize; n];
    let mut out: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &(t, h) in edges {
        indeg[h] += 1;
        out.entry(t).or_default().push(h);
    }
    let mut order = Vec::with_capacity(n);
    let mut done = vec![false; n];
    // Kahn's algorithm, always taking the earliest declared ready vertex.
    while order.len() < n {
        let Some(next) = (0..n).find(|&i| !done[i] && indeg[i] == 0) else {
            let stuck = (0..n).find(|&i| !done[i]).expect("some vertex remains");
            return Err(HallError::ConditionA(vertices[stuck].id.clone()));
        };
        done[next] = true;
        order.push(next);
        for &h in out.get(&next).into_iter().flatten() {
            indeg[h] -= 1;
        }
    }
    Ok(order)
}

/// Exact inverse of an upper triangular integer matrix with nonzero diagonal.
fn invert_upper_triangular(c: &[Vec<i64>]) -> Vec<Vec<Exponent>> {
    let n = c.len();
    let mut inv = vec![vec![Exponent::zero(); n]; n];
    for j in 0..n {
        // solve C x = e_j by back substitution
        for i in (0..n).rev() {
            let mut s = if i == j { Exponent::one() } else { Exponent::zero() };
            for k in i + 1..n {
                s -= Exponent::from_integer(c[i][k]) * inv[k][j];
            }
            inv[i][j] = s / Exponent::from_integer(c[i][i]);
        }
    }
    inv
}

fn transpose<T: Clone>(m: &[Vec<T>]) -> Vec<Vec<T>> {
    let n = m.len();
    (0..n).map(|i| (0..n).map(|j| m[j][i].clone()).collect()).collect()
}

/// Small quivers used throughout the tests, the book and the CLI.
pub mod zoo {
    use super::*;

    fn v(id: &str, loops: u32, charge: u32) -> Vertex {
        Vertex { id: id.to_string(), loops, charge }
    }

    /// One vertex, no arrows.
    pub fn a1(p: u32) -> Quiver {
        Quiver::from_parts(Some(p), vec![v("1", 0, 1)], vec![]).expect("valid")
    }

    /// `1 -> 2`.
    pub fn a2(p: u32) -> Quiver {
        Quiver::from_parts(Some(p), vec![v("1", 0, 1), v("2", 0, 1)], vec![(0, 1)]).expect("valid")
    }

    /// Two vertices joined by two parallel arrows.
    pub fn kronecker(p: u32) -> Quiver {
        Quiver::from_parts(Some(p), vec![v("1", 0, 1), v("2", 0, 1)], vec![(0, 1), (0, 1)]).expect("valid")
    }

    /// One vertex with `loops` loops and the given charge.
    pub fn loops(n: u32, charge: u32, p: u32) -> Result<Quiver> {
        Quiver::from_parts(Some(p), vec![v("1", n, charge)], vec![])
    }

    /// The two-loop quiver `L₂`.
    pub fn l2(charge: u32, p: u32) -> Quiver {
        loops(2, charge, p).expect("valid")
    }
}

//! Z₂-graded complexes of projective representations of a loop-free quiver,
//! their Hall product, and the localized `E_{A,B}` basis.
//!
//! This is an independent realization of `DH(R)` built directly from
//! complexes and cones. It only works without loops, where projectives are
//! finite dimensional, and serves as an oracle for the straightening engine
//! in [`crate::dh`].
//!
//! A complex is `M₁ ⇄ M₀` with `d₁: M₁ → M₀`, `d₀: M₀ → M₁` and `d d = 0`.
//! Its shift `M†` swaps the two terms and negates both differentials.

mod linalg;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, RwLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;

use crate::dh::{DhElement, DoubleHall};
use crate::error::{HallError, Result};
use crate::fp::Matrix;
use crate::quiver::{KVector, Quiver};
use crate::repcat::{rep, ClassId, Morphism, Rep, RepCategory};
use crate::report::{check_with, Check};
use crate::scalar::{Exponent, Scalar};

use linalg::*;

/// A free module `⊕_g P_{v(g)}` with its path basis.
#[derive(Debug, Clone)]
pub struct Projective {
    rep: Rep,
    /// Vertex of each generator.
    gens: Vec<usize>,
    /// Per vertex, basis elements as (generator, arrow path).
    basis: Vec<Vec<(usize, Vec<usize>)>>,
    index: Vec<HashMap<(usize, Vec<usize>), usize>>,
}

impl Projective {
    /// `⊕_g P_{gens[g]}` where `P_i` has the paths starting at `i` as basis.
    pub fn free(q: &Quiver, gens: &[usize]) -> Result<Projective> {
        if !q.is_loop_free() {
            return Err(HallError::Unsupported("complexes of projectives need a quiver without loops".into()));
        }
        let n = q.num_vertices();
        let mut basis: Vec<Vec<(usize, Vec<usize>)>> = vec![Vec::new(); n];
        for (g, &i) in gens.iter().enumerate() {
            let mut stack = vec![(i, Vec::new())];
            while let Some((v, path)) = stack.pop() {
                for (k, a) in q.arrows().iter().enumerate().rev() {
                    if a.tail == v {
                        let mut next = path.clone();
                        next.push(k);
                        stack.push((a.head, next));
                    }
                }
                basis[v].push((g, path));
            }
        }
        for b in &mut basis {
            b.sort();
        }
        let index: Vec<HashMap<(usize, Vec<usize>), usize>> =
            basis.iter().map(|b| b.iter().cloned().enumerate().map(|(k, x)| (x, k)).collect()).collect();
        let dims: Vec<usize> = basis.iter().map(Vec::len).collect();
        let mats = q
            .arrows()
            .iter()
            .enumerate()
            .map(|(k, a)| {
                let mut m = Matrix::zeros(dims[a.head], dims[a.tail]);
                for (c, (g, path)) in basis[a.tail].iter().enumerate() {
                    let mut longer = path.clone();
                    longer.push(k);
                    m.set(index[a.head][&(*g, longer)], c, 1);
                }
                m
            })
            .collect();
        Ok(Projective { rep: Rep::from_parts_unchecked(dims, mats), gens: gens.to_vec(), basis, index })
    }

    pub fn rep(&self) -> &Rep {
        &self.rep
    }

    pub fn generators(&self) -> &[usize] {
        &self.gens
    }

    /// Basis index of generator `g` followed by `path`, at the path's end vertex.
    fn position(&self, v: usize, g: usize, path: &[usize]) -> usize {
        self.index[v][&(g, path.to_vec())]
    }

    /// The morphism sending generator `g` to `images[g] ∈ target_{v(g)}`.
    pub fn morphism_to(&self, target: &Rep, images: &[Vec<u32>], p: u32) -> Morphism {
        self.basis
            .iter()
            .enumerate()
            .map(|(v, elems)| {
                let mut m = Matrix::zeros(target.dims()[v], elems.len());
                for (c, (g, path)) in elems.iter().enumerate() {
                    let mut w = images[*g].clone();
                    for &k in path {
                        w = target.mats()[k].apply(&w, p);
                    }
                    for (r, x) in w.into_iter().enumerate() {
                        m.set(r, c, x);
                    }
                }
                m
            })
            .collect()
    }
}

/// A Z₂-graded complex of projectives.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Complex {
    pub m1: Rep,
    pub m0: Rep,
    /// `M₁ → M₀`.
    pub d1: Morphism,
    /// `M₀ → M₁`.
    pub d0: Morphism,
}

/// JSON form of a complex.
#[derive(Debug, Clone, Serialize)]
pub struct ComplexDump {
    pub m1_dims: Vec<usize>,
    pub m0_dims: Vec<usize>,
    pub d1: Vec<String>,
    pub d0: Vec<String>,
}

impl Complex {
    /// Validates shapes, `d d = 0` and projectivity of both terms.
    pub fn new(q: &Quiver, m1: Rep, m0: Rep, d1: Morphism, d0: Morphism, p: u32) -> Result<Complex> {
        if !q.is_loop_free() {
            return Err(HallError::Unsupported("complexes of projectives need a quiver without loops".into()));
        }
        if !Rep::is_morphism(q, &m1, &m0, &d1, p) || !Rep::is_morphism(q, &m0, &m1, &d0, p) {
            return Err(HallError::Mismatch("differentials are not morphisms".into()));
        }
        let c = Complex { m1, m0, d1, d0 };
        if !is_zero(&compose(&c.d0, &c.d1, p)) || !is_zero(&compose(&c.d1, &c.d0, p)) {
            return Err(HallError::Mismatch("d∘d ≠ 0".into()));
        }
        for m in [&c.m1, &c.m0] {
            if !is_projective(q, m, p) {
                return Err(HallError::Mismatch("complex term is not projective".into()));
            }
        }
        Ok(c)
    }

    pub fn zero(q: &Quiver) -> Complex {
        let z = Rep::zero(q);
        Complex { d1: zero_morphism(&z, &z), d0: zero_morphism(&z, &z), m1: z.clone(), m0: z }
    }

    /// `C_f = (P →f Q, d₀ = 0)`.
    pub fn c_f(src: &Rep, dst: &Rep, f: Morphism) -> Complex {
        Complex { d0: zero_morphism(dst, src), m1: src.clone(), m0: dst.clone(), d1: f }
    }

    /// `K_P = (P →id P)`.
    pub fn k(rep: &Rep) -> Complex {
        Complex::c_f(rep, rep, identity_morphism(rep))
    }

    /// `K_P† = (P ←−id P)`.
    pub fn k_dagger(rep: &Rep, p: u32) -> Complex {
        Complex::k(rep).dagger(p)
    }

    pub fn dagger(&self, p: u32) -> Complex {
        Complex { m1: self.m0.clone(), m0: self.m1.clone(), d1: neg(&self.d0, p), d0: neg(&self.d1, p) }
    }

    pub fn direct_sum(&self, q: &Quiver, other: &Complex) -> Complex {
        Complex {
            m1: self.m1.direct_sum(q, &other.m1),
            m0: self.m0.direct_sum(q, &other.m0),
            d1: diag(&self.d1, &other.d1),
            d0: diag(&self.d0, &other.d0),
        }
    }

    /// `(H₀, H₁) = (ker d₀ / im d₁, ker d₁ / im d₀)`.
    pub fn homology(&self, q: &Quiver, p: u32) -> (Rep, Rep) {
        let ker0: Vec<Matrix> = self.d0.iter().map(|m| kernel_rows(m, p)).collect();
        let im1: Vec<Matrix> = self.d1.iter().map(|m| image_rows(m, p)).collect();
        let ker1: Vec<Matrix> = self.d1.iter().map(|m| kernel_rows(m, p)).collect();
        let im0: Vec<Matrix> = self.d0.iter().map(|m| image_rows(m, p)).collect();
        (subquotient(q, &self.m0, &ker0, &im1, p), subquotient(q, &self.m1, &ker1, &im0, p))
    }

    /// `M = M⁺ ⊕ M⁻` with `M⁺ = (im d₁ ↪ ker d₀)` and `M⁻ = (ker d₁ ↩ im d₀)`.
    pub fn decompose(&self, q: &Quiver, p: u32) -> (Complex, Complex) {
        let ker0: Vec<Matrix> = self.d0.iter().map(|m| kernel_rows(m, p)).collect();
        let im1: Vec<Matrix> = self.d1.iter().map(|m| image_rows(m, p)).collect();
        let ker1: Vec<Matrix> = self.d1.iter().map(|m| kernel_rows(m, p)).collect();
        let im0: Vec<Matrix> = self.d0.iter().map(|m| image_rows(m, p)).collect();
        let (a, _) = subrep(q, &self.m0, &im1, p);
        let (b, _) = subrep(q, &self.m0, &ker0, p);
        let f: Morphism = im1.iter().zip(&ker0).map(|(s, t)| inclusion_matrix(s, t, p)).collect();
        let plus = Complex::c_f(&a, &b, f);
        let (c, _) = subrep(q, &self.m1, &ker1, p);
        let (d, _) = subrep(q, &self.m1, &im0, p);
        let g: Morphism = im0.iter().zip(&ker1).map(|(s, t)| inclusion_matrix(s, t, p)).collect();
        let minus = Complex { d1: zero_morphism(&c, &d), m1: c, m0: d, d0: g };
        (plus, minus)
    }

    pub fn dump(&self) -> ComplexDump {
        ComplexDump {
            m1_dims: self.m1.dims().to_vec(),
            m0_dims: self.m0.dims().to_vec(),
            d1: self.d1.iter().map(|m| format!("{m:?}")).collect(),
            d0: self.d0.iter().map(|m| format!("{m:?}")).collect(),
        }
    }
}

impl fmt::Display for Complex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} ⇄ {:?} d1={:?} d0={:?}", self.m1.dims(), self.m0.dims(), self.d1, self.d0)
    }
}

fn diag(a: &Morphism, d: &Morphism) -> Morphism {
    a.iter()
        .zip(d)
        .map(|(a, d)| Matrix::block(a, &Matrix::zeros(a.rows(), d.cols()), &Matrix::zeros(d.rows(), a.cols()), d))
        .collect()
}

/// A representation without loops is projective iff `Ext¹(M, S_i) = 0` for every simple.
pub fn is_projective(q: &Quiver, m: &Rep, p: u32) -> bool {
    (0..q.num_vertices()).all(|i| rep::ext_dim_by_cokernel(q, m, &Rep::simple(q, i, &[]), p) == 0)
}

/// The standard resolution `0 → ⊕_σ P_{h(σ)} ⊗ A_{t(σ)} → ⊕_i P_i ⊗ A_i → A → 0` as `C_A`.
pub fn standard_resolution(q: &Quiver, a: &Rep, p: u32) -> Result<Complex> {
    let mut qgens = Vec::new();
    let mut qpos = HashMap::new();
    for (i, &d) in a.dims().iter().enumerate() {
        for c in 0..d {
            qpos.insert((i, c), qgens.len());
            qgens.push(i);
        }
    }
    let mut pgens = Vec::new();
    let mut pdata = Vec::new();
    for (k, s) in q.arrows().iter().enumerate() {
        for c in 0..a.dims()[s.tail] {
            pgens.push(s.head);
            pdata.push((k, c));
        }
    }
    let qp = Projective::free(q, &qgens)?;
    let pp = Projective::free(q, &pgens)?;
    let images: Vec<Vec<u32>> = pdata
        .iter()
        .map(|&(k, c)| {
            let s = q.arrows()[k];
            let mut w = vec![0u32; qp.rep.dims()[s.head]];
            // σ ⊗ x − e_h ⊗ x_σ(x)
            w[qp.position(s.head, qpos[&(s.tail, c)], &[k])] = 1;
            for r in 0..a.dims()[s.head] {
                let pos = qp.position(s.head, qpos[&(s.head, r)], &[]);
                w[pos] = (w[pos] + p - a.mats()[k].get(r, c)) % p;
            }
            w
        })
        .collect();
    let f = pp.morphism_to(&qp.rep, &images, p);
    Complex::new(q, pp.rep.clone(), qp.rep.clone(), f, zero_morphism(&qp.rep, &pp.rep), p)
}

/// A pair of morphisms `(f₁, f₀)` between complexes.
pub type ChainMap = (Morphism, Morphism);

/// Basis of chain maps `M → X`: `f₀ d₁ = d₁ f₁` and `f₁ d₀ = d₀ f₀`.
pub fn chain_maps(q: &Quiver, m: &Complex, x: &Complex, p: u32) -> Vec<ChainMap> {
    let b1 = rep::hom_basis(q, &m.m1, &x.m1, p);
    let b0 = rep::hom_basis(q, &m.m0, &x.m0, p);
    let z1 = zero_morphism(&m.m1, &x.m1);
    let z0 = zero_morphism(&m.m0, &x.m0);
    let cands: Vec<ChainMap> = b1
        .iter()
        .map(|f1| (f1.clone(), z0.clone()))
        .chain(b0.iter().map(|f0| (z1.clone(), f0.clone())))
        .collect();
    let defect = |(f1, f0): &ChainMap| -> Vec<u32> {
        let a = add(&compose(f0, &m.d1, p), &neg(&compose(&x.d1, f1, p), p), p);
        let b = add(&compose(f1, &m.d0, p), &neg(&compose(&x.d0, f0, p), p), p);
        flatten(&[&a, &b])
    };
    let cols: Vec<Vec<u32>> = cands.iter().map(defect).collect();
    let rows = cols.first().map_or(0, Vec::len);
    let mut mat = Matrix::zeros(rows, cands.len());
    for (c, col) in cols.iter().enumerate() {
        for (r, &v) in col.iter().enumerate() {
            mat.set(r, c, v);
        }
    }
    mat.kernel(p)
        .into_iter()
        .map(|coef| {
            let mut f1 = z1.clone();
            let mut f0 = z0.clone();
            for (k, &c) in coef.iter().enumerate() {
                if c != 0 {
                    f1 = add(&f1, &scale(&cands[k].0, c, p), p);
                    f0 = add(&f0, &scale(&cands[k].1, c, p), p);
                }
            }
            (f1, f0)
        })
        .collect()
}

/// Spanning set of null-homotopic chain maps `M → X`:
/// `f₀ = d₁ h₀ + h₁ d₀`, `f₁ = d₀ h₁ + h₀ d₁` with `h₀: M₀ → X₁`, `h₁: M₁ → X₀`.
pub fn null_homotopic(q: &Quiver, m: &Complex, x: &Complex, p: u32) -> Vec<ChainMap> {
    let mut out = Vec::new();
    for h0 in rep::hom_basis(q, &m.m0, &x.m1, p) {
        out.push((compose(&h0, &m.d1, p), compose(&x.d1, &h0, p)));
    }
    for h1 in rep::hom_basis(q, &m.m1, &x.m0, p) {
        out.push((compose(&x.d0, &h1, p), compose(&h1, &m.d0, p)));
    }
    out
}

/// Chain maps completing the null-homotopic ones to all chain maps; their
/// `F_p`-combinations are one representative per homotopy class.
pub fn homotopy_classes(q: &Quiver, m: &Complex, x: &Complex, p: u32) -> Vec<ChainMap> {
    let z = chain_maps(q, m, x, p);
    let b = null_homotopic(q, m, x, p);
    let Some(first) = z.first() else { return Vec::new() };
    let width = flatten(&[&first.0, &first.1]).len();
    let mut acc = Matrix::zeros(0, width);
    for (f1, f0) in &b {
        acc = acc.vstack(&Matrix::from_vec(1, width, flatten(&[f1, f0])));
    }
    let mut rank = acc.rank(p);
    let mut out = Vec::new();
    for c in z {
        let trial = acc.vstack(&Matrix::from_vec(1, width, flatten(&[&c.0, &c.1])));
        let r = trial.rank(p);
        if r > rank {
            acc = trial;
            rank = r;
            out.push(c);
        }
    }
    out
}

/// `Cone(s)` for `s = (s₁, s₀): M → N†`, the middle term of `0 → N → Cone → M → 0`.
pub fn cone(q: &Quiver, m: &Complex, n: &Complex, s: &ChainMap) -> Complex {
    Complex {
        m1: n.m1.direct_sum(q, &m.m1),
        m0: n.m0.direct_sum(q, &m.m0),
        d1: upper_block(&n.d1, &s.0, &m.d1),
        d0: upper_block(&n.d0, &s.1, &m.d0),
    }
}

/// Brute-force search for an invertible chain map `M → N`.
pub fn is_isomorphic(q: &Quiver, m: &Complex, n: &Complex, p: u32, max: u64) -> Result<bool> {
    if m.m1.dims() != n.m1.dims() || m.m0.dims() != n.m0.dims() {
        return Ok(false);
    }
    let basis = chain_maps(q, m, n, p);
    let total = (p as u64)
        .checked_pow(basis.len() as u32)
        .filter(|&t| t <= max)
        .ok_or_else(|| HallError::EnumerationTooLarge(format!("{} chain maps to search", basis.len())))?;
    let mut coef = vec![0u32; basis.len()];
    for code in 0..total {
        let mut c = code;
        for x in coef.iter_mut() {
            *x = (c % p as u64) as u32;
            c /= p as u64;
        }
        let (mut f1, mut f0) = (zero_morphism(&m.m1, &n.m1), zero_morphism(&m.m0, &n.m0));
        for (b, &k) in basis.iter().zip(&coef) {
            if k != 0 {
                f1 = add(&f1, &scale(&b.0, k, p), p);
                f0 = add(&f0, &scale(&b.1, k, p), p);
            }
        }
        if f1.iter().chain(&f0).all(|x| x.is_invertible(p)) {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Isomorphism invariants of a complex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Invariants {
    pub h0: ClassId,
    pub h1: ClassId,
    pub m1: KVector,
    pub m0: KVector,
    /// `M̂₁⁺ = [im d₁]`.
    pub m1_plus: KVector,
    /// `M̂₀⁻ = [im d₀]`.
    pub m0_minus: KVector,
}

impl Invariants {
    pub fn m0_plus(&self, cat: &RepCategory) -> KVector {
        &self.m1_plus + &cat.kclass(self.h0)
    }

    pub fn m1_minus(&self, cat: &RepCategory) -> KVector {
        &self.m0_minus + &cat.kclass(self.h1)
    }

    /// `M̂ = M̂₀ − M̂₁`.
    pub fn class(&self) -> KVector {
        &self.m0 - &self.m1
    }
}

/// Canonical key of a complex up to isomorphism: homology, both term classes and `[im d₁]`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct ComplexClass {
    pub h0: String,
    pub h1: String,
    pub m1: Vec<i64>,
    pub m0: Vec<i64>,
    pub im_d1: Vec<i64>,
}

pub fn invariants(cat: &RepCategory, m: &Complex) -> Result<Invariants> {
    let q = cat.quiver();
    let p = cat.p();
    let (h0, h1) = m.homology(q, p);
    Ok(Invariants {
        h0: cat.class_of(&h0)?,
        h1: cat.class_of(&h1)?,
        m1: q.class_of_dimvec(m.m1.dims()),
        m0: q.class_of_dimvec(m.m0.dims()),
        m1_plus: q.class_of_dimvec(&rank_dims(&m.d1, p)),
        m0_minus: q.class_of_dimvec(&rank_dims(&m.d0, p)),
    })
}

pub fn complex_class(cat: &RepCategory, inv: &Invariants) -> ComplexClass {
    ComplexClass {
        h0: cat.class(inv.h0).key.clone(),
        h1: cat.class(inv.h1).key.clone(),
        m1: inv.m1.0.clone(),
        m0: inv.m0.0.clone(),
        im_d1: inv.m1_plus.0.clone(),
    }
}

/// `μ(M, N) = ⟨M̂₀⁺,N̂₁⁺⟩ + ⟨M̂₁⁺,N̂₁⁻⟩ + ⟨M̂₀⁻,N̂₀⁺⟩ + ⟨M̂₁⁻,N̂₀⁻⟩`.
pub fn mu(cat: &RepCategory, m: &Invariants, n: &Invariants) -> Exponent {
    let q = cat.quiver();
    q.euler_form(&m.m0_plus(cat), &n.m1_plus)
        + q.euler_form(&m.m1_plus, &n.m1_minus(cat))
        + q.euler_form(&m.m0_minus, &n.m0_plus(cat))
        + q.euler_form(&m.m1_minus(cat), &n.m0_minus)
}

/// `h(M, N) = q^μ |Hom(H₀M, H₀N)| |Hom(H₁M, H₁N)|`.
pub fn h(cat: &RepCategory, m: &Invariants, n: &Invariants) -> Scalar {
    let homs = cat.hom_dim(m.h0, n.h0) + cat.hom_dim(m.h1, n.h1);
    let count = BigRational::from_integer(BigInt::from(cat.q()).pow(homs as u32));
    Scalar::v_pow(mu(cat, m, n) * Exponent::from_integer(2)).scale(&count)
}

/// `⟨M⟩⟨N⟩ = prefactor · Σ_P e_P ⟨P⟩`: the prefactor `v^{⟨M̂₀,N̂₀⟩+⟨M̂₁,N̂₁⟩}/h(M,N)`
/// and one representative cone per class with its number of homotopy classes.
#[derive(Debug, Clone)]
pub struct ComplexProduct {
    pub prefactor: Scalar,
    pub terms: BTreeMap<ComplexClass, (u64, Complex, Invariants)>,
}

pub fn complex_product(cat: &RepCategory, m: &Complex, n: &Complex) -> Result<ComplexProduct> {
    let q = cat.quiver();
    let p = cat.p();
    let (im, inn) = (invariants(cat, m)?, invariants(cat, n)?);
    let twist = q.euler_form(&im.m0, &inn.m0) + q.euler_form(&im.m1, &inn.m1);
    let hval = h(cat, &im, &inn);
    let (hexp, hcoef) = single_term(&hval)?;
    let prefactor = Scalar::v_pow(twist - hexp).scale(&hcoef.recip());
    let nd = n.dagger(p);
    let reps = homotopy_classes(q, m, &nd, p);
    let total = (p as u64)
        .checked_pow(reps.len() as u32)
        .filter(|&t| t <= cat.bounds().max_brute_force)
        .ok_or_else(|| HallError::EnumerationTooLarge(format!("{} homotopy classes", reps.len())))?;
    let p64 = p as u64;
    let terms = (0..total)
        .into_par_iter()
        .map(|code| -> Result<(ComplexClass, Complex, Invariants)> {
            let (mut s1, mut s0) = (zero_morphism(&m.m1, &nd.m1), zero_morphism(&m.m0, &nd.m0));
            let mut c = code;
            for b in &reps {
                let k = (c % p64) as u32;
                c /= p64;
                if k != 0 {
                    s1 = add(&s1, &scale(&b.0, k, p), p);
                    s0 = add(&s0, &scale(&b.1, k, p), p);
                }
            }
            let cone = cone(q, m, n, &(s1, s0));
            let inv = invariants(cat, &cone)?;
            Ok((complex_class(cat, &inv), cone, inv))
        })
        .try_fold(BTreeMap::new, |mut acc: BTreeMap<ComplexClass, (u64, Complex, Invariants)>, item| {
            let (key, cone, inv) = item?;
            acc.entry(key).or_insert((0, cone, inv)).0 += 1;
            Ok::<_, HallError>(acc)
        })
        .try_reduce(BTreeMap::new, |mut a, b| {
            for (key, (n, cone, inv)) in b {
                a.entry(key).or_insert((0, cone, inv)).0 += n;
            }
            Ok(a)
        })?;
    Ok(ComplexProduct { prefactor, terms })
}

fn single_term(s: &Scalar) -> Result<(Exponent, BigRational)> {
    let mut it = s.terms();
    match (it.next(), it.next()) {
        (Some((e, c)), None) => Ok((*e, c.clone())),
        _ => Err(HallError::Internal(format!("expected a monomial, got {s}"))),
    }
}

/// `E_{X,Y} K_k K†_kd`, a basis element of the localized algebra.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OracleBasis {
    pub x: ClassId,
    pub y: ClassId,
    pub k: KVector,
    pub kd: KVector,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct OracleElement {
    terms: BTreeMap<OracleBasis, Scalar>,
}

impl OracleElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn basis(b: OracleBasis, c: Scalar) -> Self {
        let mut out = Self::zero();
        out.add_term(b, &c);
        out
    }

    pub fn add_term(&mut self, b: OracleBasis, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(b.clone()).or_default();
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&b);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&OracleBasis, &Scalar)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_assign(&mut self, other: &Self) {
        for (b, c) in &other.terms {
            self.add_term(b.clone(), c);
        }
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        let mut out = Self::zero();
        for (b, x) in &self.terms {
            out.add_term(b.clone(), &(x * c));
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.clone().tap_add(&other.scale(&Scalar::from_int(-1)))
    }

    fn tap_add(mut self, other: &Self) -> Self {
        self.add_assign(other);
        self
    }

    pub fn normalize(&self, q: u64) -> Self {
        let mut out = Self::zero();
        for (b, x) in &self.terms {
            out.add_term(b.clone(), &x.reduce_mod_q(q));
        }
        out
    }

    /// Terms sorted by their text, `E{X,Y}` and trivial `K` factors omitted when zero.
    pub fn render(&self, cat: &RepCategory) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut items: Vec<(String, String)> = self.terms.iter().map(|(b, c)| (b.render(cat), c.to_string())).collect();
        items.sort();
        items
            .into_iter()
            .map(|(b, c)| if c == "1" { b } else if b == "1" { format!("({c})") } else { format!("({c})*{b}") })
            .collect::<Vec<_>>()
            .join(" + ")
    }

    pub fn dump(&self, cat: &RepCategory) -> Vec<OracleTermDump> {
        self.terms
            .iter()
            .map(|(b, c)| OracleTermDump {
                x: cat.class(b.x).key.clone(),
                y: cat.class(b.y).key.clone(),
                k: b.k.clone(),
                kd: b.kd.clone(),
                coeff: c.to_string(),
            })
            .collect()
    }
}

/// JSON form of one oracle basis term.
#[derive(Debug, Clone, Serialize)]
pub struct OracleTermDump {
    pub x: String,
    pub y: String,
    pub k: KVector,
    pub kd: KVector,
    pub coeff: String,
}

impl OracleBasis {
    pub fn render(&self, cat: &RepCategory) -> String {
        let mut parts = Vec::new();
        if self.x != ClassId::ZERO || self.y != ClassId::ZERO {
            parts.push(format!("E{{{},{}}}", cat.class(self.x).key, cat.class(self.y).key));
        }
        if !self.k.is_zero() {
            parts.push(format!("K({})", self.k));
        }
        if !self.kd.is_zero() {
            parts.push(format!("Kd({})", self.kd));
        }
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join(" ")
        }
    }
}

type PairKey = (ClassId, ClassId, ClassId, ClassId);

/// The localized Hall algebra of complexes, in the basis `E_{X,Y} K_α K†_β`.
#[derive(Debug)]
pub struct Oracle {
    cat: Arc<RepCategory>,
    resolutions: RwLock<HashMap<ClassId, Arc<Complex>>>,
    products: RwLock<HashMap<PairKey, Arc<OracleElement>>>,
}

impl Oracle {
    pub fn new(cat: Arc<RepCategory>) -> Result<Self> {
        if !cat.quiver().is_loop_free() {
            return Err(HallError::Unsupported("the complex oracle needs a quiver without loops".into()));
        }
        Ok(Oracle { cat, resolutions: RwLock::default(), products: RwLock::default() })
    }

    pub fn category(&self) -> &Arc<RepCategory> {
        &self.cat
    }

    fn n(&self) -> usize {
        self.cat.quiver().num_vertices()
    }

    fn sym(&self, x: &KVector, y: &KVector) -> Exponent {
        self.cat.quiver().sym_form(x, y)
    }

    /// `C_A` from the standard resolution.
    pub fn resolution(&self, a: ClassId) -> Result<Arc<Complex>> {
        if let Some(c) = self.resolutions.read().expect("resolution lock").get(&a) {
            return Ok(c.clone());
        }
        let c = Arc::new(standard_resolution(self.cat.quiver(), &self.cat.class(a).rep, self.cat.p())?);
        Ok(self.resolutions.write().expect("resolution lock").entry(a).or_insert(c).clone())
    }

    /// `C_A ⊕ C_B†`.
    pub fn pair_complex(&self, a: ClassId, b: ClassId) -> Result<Complex> {
        let cb = self.resolution(b)?.dagger(self.cat.p());
        Ok(self.resolution(a)?.direct_sum(self.cat.quiver(), &cb))
    }

    /// `w(M)` in `E_M = w(M) ⟨M⟩ K_{−M̂₁⁺} K†_{−M̂₀⁻}`.
    fn weight(&self, inv: &Invariants) -> Exponent {
        let q = self.cat.quiver();
        let d = &inv.m1_plus - &inv.m0_minus;
        q.euler_form(&d, &inv.class()) - q.sym_form(&d, &inv.class())
    }

    /// `⟨M⟩ = w(M)⁻¹ E_{H₀,H₁} K_{M̂₁⁺} K†_{M̂₀⁻}`.
    pub fn localize(&self, m: &Complex) -> Result<OracleElement> {
        let inv = invariants(&self.cat, m)?;
        Ok(self.localize_invariants(&inv))
    }

    fn localize_invariants(&self, inv: &Invariants) -> OracleElement {
        let b = OracleBasis { x: inv.h0, y: inv.h1, k: inv.m1_plus.clone(), kd: inv.m0_minus.clone() };
        OracleElement::basis(b, Scalar::v_pow(-self.weight(inv)))
    }

    /// `E_M = v^{⟨M̂₁⁺−M̂₀⁻, M̂⟩} K_{−M̂₁⁺} K†_{−M̂₀⁻} ⟨M⟩`, which depends only on the homology.
    pub fn normalize_complex(&self, m: &Complex) -> Result<OracleElement> {
        let inv = invariants(&self.cat, m)?;
        let q = self.cat.quiver();
        let c = Scalar::v_pow(q.euler_form(&(&inv.m1_plus - &inv.m0_minus), &inv.class()));
        let k = self.product(&self.k(-&inv.m1_plus), &self.kd(-&inv.m0_minus))?;
        Ok(self.product(&k, &self.localize_invariants(&inv))?.scale(&c).normalize(self.cat.q()))
    }

    /// `E_{X,Y} E_{X',Y'}` through the complex Hall product of `C_X ⊕ C_Y†` and `C_{X'} ⊕ C_{Y'}†`.
    fn pair_product(&self, key: PairKey) -> Result<Arc<OracleElement>> {
        if let Some(x) = self.products.read().expect("product lock").get(&key) {
            return Ok(x.clone());
        }
        let (x, y, x2, y2) = key;
        let m = self.pair_complex(x, y)?;
        let n = self.pair_complex(x2, y2)?;
        let (im, inn) = (invariants(&self.cat, &m)?, invariants(&self.cat, &n)?);
        let prod = complex_product(&self.cat, &m, &n)?;
        // E_M E_N = w_M w_N v^{(M̂₀⁻−M̂₁⁺, N̂)} ⟨M⟩⟨N⟩ K_{−a_M−a_N} K†_{−b_M−b_N}
        let lead = self.weight(&im) + self.weight(&inn) + self.sym(&(&im.m0_minus - &im.m1_plus), &inn.class());
        let shift_k = -&(&im.m1_plus + &inn.m1_plus);
        let shift_kd = -&(&im.m0_minus + &inn.m0_minus);
        let base = &Scalar::v_pow(lead) * &prod.prefactor;
        let mut out = OracleElement::zero();
        for (count, _, inv) in prod.terms.values() {
            let c = base.scale(&BigRational::from_integer(BigInt::from(*count)));
            for (b, y) in self.localize_invariants(inv).terms() {
                let b = OracleBasis { k: &b.k + &shift_k, kd: &b.kd + &shift_kd, ..b.clone() };
                out.add_term(b, &(&c * y));
            }
        }
        let out = Arc::new(out.normalize(self.cat.q()));
        Ok(self.products.write().expect("product lock").entry(key).or_insert(out).clone())
    }

    fn basis_product(&self, a: &OracleBasis, b: &OracleBasis) -> Result<OracleElement> {
        let twist = Scalar::v_pow(self.sym(&(&a.k - &a.kd), &(&self.cat.kclass(b.x) - &self.cat.kclass(b.y))));
        let (k, kd) = (&a.k + &b.k, &a.kd + &b.kd);
        let mut out = OracleElement::zero();
        for (t, c) in self.pair_product((a.x, a.y, b.x, b.y))?.terms() {
            let t = OracleBasis { k: &t.k + &k, kd: &t.kd + &kd, ..t.clone() };
            out.add_term(t, &(&twist * c));
        }
        Ok(out)
    }

    pub fn product(&self, x: &OracleElement, y: &OracleElement) -> Result<OracleElement> {
        let mut out = OracleElement::zero();
        for (a, ca) in x.terms() {
            for (b, cb) in y.terms() {
                out.add_assign(&self.basis_product(a, b)?.scale(&(ca * cb)));
            }
        }
        Ok(out.normalize(self.cat.q()))
    }

    pub fn one(&self) -> OracleElement {
        self.e_ab(ClassId::ZERO, ClassId::ZERO)
    }

    pub fn e_ab(&self, a: ClassId, b: ClassId) -> OracleElement {
        let z = KVector::zero(self.n());
        OracleElement::basis(OracleBasis { x: a, y: b, k: z.clone(), kd: z }, Scalar::one())
    }

    pub fn e(&self, a: ClassId) -> OracleElement {
        self.e_ab(a, ClassId::ZERO)
    }

    pub fn f(&self, b: ClassId) -> OracleElement {
        self.e_ab(ClassId::ZERO, b)
    }

    pub fn k(&self, alpha: KVector) -> OracleElement {
        OracleElement::basis(
            OracleBasis { x: ClassId::ZERO, y: ClassId::ZERO, k: alpha, kd: KVector::zero(self.n()) },
            Scalar::one(),
        )
    }

    pub fn kd(&self, beta: KVector) -> OracleElement {
        OracleElement::basis(
            OracleBasis { x: ClassId::ZERO, y: ClassId::ZERO, k: KVector::zero(self.n()), kd: beta },
            Scalar::one(),
        )
    }

    /// Rewrites a normal-ordered element of the full `DH(R)`:
    /// `E_X K_μ F_Y K†_ν = v^{−(μ,Ŷ)} (E_X F_Y) K_μ K†_ν`.
    pub fn from_dh(&self, x: &DhElement) -> Result<OracleElement> {
        let mut out = OracleElement::zero();
        for (m, c) in x.terms() {
            let twist = Scalar::v_pow(-self.sym(&m.k, &self.cat.kclass(m.f)));
            let ef = self.pair_product((m.e, ClassId::ZERO, ClassId::ZERO, m.f))?;
            for (t, y) in ef.terms() {
                let t = OracleBasis { k: &t.k + &m.k, kd: &t.kd + &m.kd, ..t.clone() };
                out.add_term(t, &(&(c * &twist) * y));
            }
        }
        Ok(out.normalize(self.cat.q()))
    }
}

/// Rewrites `E_{X,Y} K_μ K†_ν` as the straightened product `E_{X,Y} ∘ K_μ ∘ K†_ν`.
pub fn to_dh(dh: &DoubleHall, x: &OracleElement) -> Result<DhElement> {
    let mut out = DhElement::zero();
    for (b, c) in x.terms() {
        let t = dh.product_all(&[dh.e_ab(b.x, b.y)?, dh.k(b.k.clone()), dh.kd(b.kd.clone())])?;
        out.add_assign(&t.scale(c));
    }
    Ok(out.normalize(dh.category().q()))
}

/// A generator of the localized algebra, realized on both sides.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Generator {
    E(ClassId),
    F(ClassId),
    K(KVector),
    Kd(KVector),
}

impl Generator {
    pub fn label(&self, cat: &RepCategory) -> String {
        match self {
            Generator::E(a) => format!("E[{}]", cat.class(*a).key),
            Generator::F(a) => format!("F[{}]", cat.class(*a).key),
            Generator::K(a) => format!("K({a})"),
            Generator::Kd(a) => format!("Kd({a})"),
        }
    }

    pub fn in_dh(&self, dh: &DoubleHall) -> DhElement {
        match self {
            Generator::E(a) => dh.e(*a),
            Generator::F(a) => dh.f(*a),
            Generator::K(a) => dh.k(a.clone()),
            Generator::Kd(a) => dh.kd(a.clone()),
        }
    }

    pub fn in_oracle(&self, o: &Oracle) -> OracleElement {
        match self {
            Generator::E(a) => o.e(*a),
            Generator::F(a) => o.f(*a),
            Generator::K(a) => o.k(a.clone()),
            Generator::Kd(a) => o.kd(a.clone()),
        }
    }
}

/// `E_A`, `F_A` for nonzero classes of total dimension at most `max_dim`, and `K^{±1}`, `K†^{±1}` at simples.
pub fn generators(cat: &RepCategory, max_dim: usize) -> Result<Vec<Generator>> {
    let mut out = Vec::new();
    for c in cat.classes_up_to(max_dim)? {
        if c.id != ClassId::ZERO {
            out.push(Generator::E(c.id));
            out.push(Generator::F(c.id));
        }
    }
    for i in 0..cat.quiver().num_vertices() {
        let s = cat.quiver().simple_class(i);
        out.push(Generator::K(s.clone()));
        out.push(Generator::K(-&s));
        out.push(Generator::Kd(s.clone()));
        out.push(Generator::Kd(-&s));
    }
    Ok(out)
}

/// Compares `x y` computed by straightening with the complex Hall product.
pub fn check_product(dh: &DoubleHall, o: &Oracle, x: &Generator, y: &Generator) -> Check {
    let cat = o.category();
    let id = format!("oracle[{} {}]", x.label(cat), y.label(cat));
    check_with(id, || {
        let lhs = o.from_dh(&dh.product(&x.in_dh(dh), &y.in_dh(dh))?)?;
        let rhs = o.product(&x.in_oracle(o), &y.in_oracle(o))?;
        let res = lhs.sub(&rhs).normalize(cat.q());
        Ok((lhs.render(cat), rhs.render(cat), res.render(cat), res.is_zero()))
    })
}

/// Compares the straightened expansion of `E_{A,B}` with the basis element itself.
pub fn check_e_ab(dh: &DoubleHall, o: &Oracle, a: ClassId, b: ClassId) -> Check {
    let cat = o.category();
    let id = format!("oracle[E{{{},{}}}]", cat.class(a).key, cat.class(b).key);
    check_with(id, || {
        let lhs = o.from_dh(&dh.e_ab(a, b)?)?;
        let rhs = o.e_ab(a, b);
        let res = lhs.sub(&rhs).normalize(cat.q());
        Ok((lhs.render(cat), rhs.render(cat), res.render(cat), res.is_zero()))
    })
}

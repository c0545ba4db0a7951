//! The finitary category `rep_{F_p}(Q)`: classification, `Hom`, `Ext¹`,
//! automorphism groups and Hall numbers.
//!
//! A [`RepCategory`] owns every memo table for one quiver and one prime:
//! orbit tables per dimension vector, the class registry, subspace lists and
//! Hall-number profiles. All tables are `RwLock`ed maps that are filled
//! outside the lock and never hold it across a computation.

mod classify;
pub mod rep;
mod subspace;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, RwLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

use crate::cache::{Cache, CacheKey};
use crate::error::{HallError, Result};
use crate::fp::{all_subspaces, is_prime, Matrix};
use crate::quiver::{KVector, Quiver};

pub use rep::{Morphism, Rep, RepDump};

use classify::OrbitTable;

/// Resource limits for the enumeration kernels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Bounds {
    pub max_total_dim: usize,
    pub max_p: u32,
    /// Largest number of representation tuples or subspace tuples enumerated at once.
    pub max_candidates: u64,
    /// Largest endomorphism space searched by brute force.
    pub max_brute_force: u64,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds { max_total_dim: 6, max_p: 5, max_candidates: 100_000_000, max_brute_force: 1 << 22 }
    }
}

/// Handle to an isomorphism class registered in a [`RepCategory`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ClassId(pub u32);

impl ClassId {
    /// The zero representation.
    pub const ZERO: ClassId = ClassId(0);
}

/// An isomorphism class with its canonical representative.
#[derive(Debug, Clone, Serialize)]
pub struct IsoClass {
    #[serde(skip)]
    pub id: ClassId,
    /// Stable key: dimension vector, then the digits of the least tuple in the orbit.
    pub key: String,
    pub dims: Vec<usize>,
    #[serde(skip)]
    pub rep: Rep,
    pub aut_order: u128,
    pub kclass: KVector,
}

/// Hall numbers `g^C_{A,B}` for fixed `C`, keyed by `(A, B)` = (quotient, sub).
pub type Profile = BTreeMap<(ClassId, ClassId), u64>;

struct Table {
    orbits: OrbitTable,
    base: u32,
}

pub struct RepCategory {
    quiver: Quiver,
    p: u32,
    bounds: Bounds,
    tables: RwLock<HashMap<Vec<usize>, Arc<Table>>>,
    classes: RwLock<Vec<Arc<IsoClass>>>,
    subspaces: RwLock<HashMap<usize, Arc<Vec<Matrix>>>>,
    profiles: RwLock<HashMap<ClassId, Arc<Profile>>>,
    cache: Option<Arc<Cache>>,
}

impl fmt::Debug for RepCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RepCategory").field("p", &self.p).field("quiver", &self.quiver.render()).finish()
    }
}

impl RepCategory {
    pub fn new(quiver: Quiver, p: u32) -> Result<Self> {
        Self::with_bounds(quiver, p, Bounds::default())
    }

    pub fn with_bounds(quiver: Quiver, p: u32, bounds: Bounds) -> Result<Self> {
        if !is_prime(p) {
            return Err(HallError::Mismatch(format!("{p} is not prime")));
        }
        if p > bounds.max_p {
            return Err(HallError::EnumerationTooLarge(format!("p = {p} exceeds the bound {}", bounds.max_p)));
        }
        let cat = RepCategory {
            quiver,
            p,
            bounds,
            tables: RwLock::new(HashMap::new()),
            classes: RwLock::new(Vec::new()),
            subspaces: RwLock::new(HashMap::new()),
            profiles: RwLock::new(HashMap::new()),
            cache: None,
        };
        let zero = cat.classify(&vec![0; cat.quiver.num_vertices()])?;
        debug_assert_eq!(zero[0].id, ClassId::ZERO);
        Ok(cat)
    }

    /// Uses the quiver's own `field` line for `p`.
    pub fn from_quiver(quiver: Quiver) -> Result<Self> {
        let p = quiver
            .field()
            .ok_or_else(|| HallError::Parse { line: 0, msg: "quiver file has no `field p=<prime>` line".into() })?;
        Self::new(quiver, p)
    }

    pub fn with_cache(mut self, cache: Arc<Cache>) -> Self {
        self.cache = Some(cache);
        self
    }

    pub fn cache(&self) -> Option<&Arc<Cache>> {
        self.cache.as_ref()
    }

    pub fn quiver(&self) -> &Quiver {
        &self.quiver
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    /// The field size `q` (equal to `p`).
    pub fn q(&self) -> u64 {
        self.p as u64
    }

    pub fn bounds(&self) -> Bounds {
        self.bounds
    }

    fn table(&self, dims: &[usize]) -> Result<Arc<Table>> {
        if let Some(t) = self.tables.read().expect("table lock").get(dims) {
            return Ok(t.clone());
        }
        if dims.len() != self.quiver.num_vertices() {
            return Err(HallError::Mismatch(format!("dimension vector {dims:?} has the wrong length")));
        }
        let total: usize = dims.iter().sum();
        if total > self.bounds.max_total_dim {
            return Err(HallError::EnumerationTooLarge(format!(
                "total dimension {total} exceeds the bound {}",
                self.bounds.max_total_dim
            )));
        }
        let orbits = classify::build_table(&self.quiver, dims, self.p, self.bounds.max_candidates)?;
        let mut tables = self.tables.write().expect("table lock");
        if let Some(t) = tables.get(dims) {
            return Ok(t.clone());
        }
        let mut classes = self.classes.write().expect("class lock");
        let base = classes.len() as u32;
        let kclass = self.quiver.class_of_dimvec(dims);
        for (k, (&code, &size)) in orbits.reps.iter().zip(&orbits.orbit_sizes).enumerate() {
            let mut digits = vec![0u32; orbits.len];
            classify::decode(code, orbits.len, self.p, &mut digits);
            let rep = Rep::from_digits(&self.quiver, dims, &digits);
            classes.push(Arc::new(IsoClass {
                id: ClassId(base + k as u32),
                key: class_key(dims, &digits),
                dims: dims.to_vec(),
                rep,
                aut_order: orbits.group_order / size as u128,
                kclass: kclass.clone(),
            }));
        }
        let t = Arc::new(Table { orbits, base });
        tables.insert(dims.to_vec(), t.clone());
        Ok(t)
    }

    /// All isomorphism classes with dimension vector `dims`, least representative first.
    pub fn classify(&self, dims: &[usize]) -> Result<Vec<Arc<IsoClass>>> {
        let t = self.table(dims)?;
        let classes = self.classes.read().expect("class lock");
        Ok((0..t.orbits.reps.len()).map(|k| classes[t.base as usize + k].clone()).collect())
    }

    /// All classes of total dimension at most `n`, by dimension vector.
    pub fn classes_up_to(&self, n: usize) -> Result<Vec<Arc<IsoClass>>> {
        let mut out = Vec::new();
        for dims in dim_vectors_up_to(self.quiver.num_vertices(), n) {
            out.extend(self.classify(&dims)?);
        }
        Ok(out)
    }

    pub fn class(&self, id: ClassId) -> Arc<IsoClass> {
        self.classes.read().expect("class lock")[id.0 as usize].clone()
    }

    pub fn class_of(&self, rep: &Rep) -> Result<ClassId> {
        let t = self.table(rep.dims())?;
        let code = classify::encode(&rep.digits(), self.p);
        Ok(ClassId(t.base + t.orbits.class_of[code as usize]))
    }

    /// Resolves a stable key produced by [`IsoClass::key`].
    pub fn class_by_key(&self, key: &str) -> Result<ClassId> {
        let bad = || HallError::Parse { line: 0, msg: format!("bad class key `{key}`") };
        let (dims_part, digit_part) = key.split_once('/').unwrap_or((key, ""));
        let dims: Vec<usize> = dims_part.split('.').map(|s| s.parse().map_err(|_| bad())).collect::<Result<_>>()?;
        if dims.len() != self.quiver.num_vertices() {
            return Err(bad());
        }
        let digits: Vec<u32> = digit_part.chars().map(|c| c.to_digit(36).ok_or_else(bad)).collect::<Result<_>>()?;
        if digits.len() != Rep::data_len(&self.quiver, &dims) || digits.iter().any(|&d| d >= self.p) {
            return Err(bad());
        }
        let rep = Rep::from_digits(&self.quiver, &dims, &digits);
        self.class_of(&rep)
    }

    /// The simple at vertex `i` with loop eigenvalues `lambda`.
    pub fn simple(&self, i: usize, lambda: &[u32]) -> Result<ClassId> {
        if lambda.len() != self.quiver.vertices()[i].loops as usize || lambda.iter().any(|&x| x >= self.p) {
            return Err(HallError::Mismatch(format!("simple at vertex {i} needs {} loop scalars in F_{}", self.quiver.vertices()[i].loops, self.p)));
        }
        self.class_of(&Rep::simple(&self.quiver, i, lambda))
    }

    pub fn direct_sum(&self, a: ClassId, b: ClassId) -> Result<ClassId> {
        let r = self.class(a).rep.direct_sum(&self.quiver, &self.class(b).rep);
        self.class_of(&r)
    }

    pub fn kclass(&self, a: ClassId) -> KVector {
        self.class(a).kclass.clone()
    }

    pub fn aut(&self, a: ClassId) -> u128 {
        self.class(a).aut_order
    }

    fn check_same(&self, rep: &Rep) -> Result<()> {
        if rep.dims().len() != self.quiver.num_vertices() || rep.mats().len() != self.quiver.arrows().len() {
            return Err(HallError::Mismatch("representation belongs to another quiver".into()));
        }
        if rep.mats().iter().any(|m| m.data().iter().any(|&x| x >= self.p)) {
            return Err(HallError::Mismatch(format!("representation is not over F_{}", self.p)));
        }
        Ok(())
    }

    pub fn hom_basis(&self, a: &Rep, b: &Rep) -> Result<Vec<Morphism>> {
        self.check_same(a)?;
        self.check_same(b)?;
        Ok(rep::hom_basis(&self.quiver, a, b, self.p))
    }

    pub fn hom_dim(&self, a: ClassId, b: ClassId) -> usize {
        rep::hom_dim(&self.quiver, &self.class(a).rep, &self.class(b).rep, self.p)
    }

    /// `dim Ext¹(A, B) = dim Hom(A, B) − ⟨Â, B̂⟩`.
    pub fn ext_dim(&self, a: ClassId, b: ClassId) -> Result<usize> {
        let (ca, cb) = (self.class(a), self.class(b));
        let euler = self.quiver.euler_form(&ca.kclass, &cb.kclass);
        let e = BigRational::from_integer(BigInt::from(self.hom_dim(a, b) as i64))
            - BigRational::new(BigInt::from(*euler.numer()), BigInt::from(*euler.denom()));
        if !e.is_integer() || e < BigRational::from_integer(BigInt::from(0)) {
            return Err(HallError::Internal(format!("Ext¹({}, {}) would have dimension {e}", ca.key, cb.key)));
        }
        Ok(e.to_integer().try_into().expect("small dimension"))
    }

    /// `|Aut(A)|` by testing every endomorphism for invertibility.
    pub fn aut_order_brute_force(&self, rep: &Rep) -> Result<u128> {
        let basis = self.hom_basis(rep, rep)?;
        let count = (self.p as u64)
            .checked_pow(basis.len() as u32)
            .filter(|&c| c <= self.bounds.max_brute_force)
            .ok_or_else(|| HallError::EnumerationTooLarge(format!("End has dimension {}", basis.len())))?;
        if basis.is_empty() {
            return Ok(1);
        }
        let mut coeffs = vec![0u32; basis.len()];
        let mut autos = 0u128;
        for code in 0..count {
            classify::decode(code, basis.len(), self.p, &mut coeffs);
            let phi = rep::combine(&basis, &coeffs, self.p).expect("nonempty basis");
            if phi.iter().all(|m| m.is_invertible(self.p)) {
                autos += 1;
            }
        }
        Ok(autos)
    }

    fn subspaces(&self, n: usize) -> Arc<Vec<Matrix>> {
        if let Some(s) = self.subspaces.read().expect("subspace lock").get(&n) {
            return s.clone();
        }
        let s = Arc::new(all_subspaces(n, self.p));
        self.subspaces.write().expect("subspace lock").entry(n).or_insert(s).clone()
    }

    /// Counts every subrepresentation of `C` by (quotient class, sub class).
    pub fn compute_profile(&self, c: ClassId) -> Result<Profile> {
        let rep = self.class(c).rep.clone();
        let sub = |n: usize| self.subspaces(n);
        let tuples = subspace::stable_tuples(&self.quiver, &rep, self.p, &sub, self.bounds.max_candidates)?;
        let mut out = Profile::new();
        for t in &tuples {
            let (s, q) = subspace::sub_and_quotient(&self.quiver, &rep, t, self.p);
            *out.entry((self.class_of(&q)?, self.class_of(&s)?)).or_insert(0) += 1;
        }
        Ok(out)
    }

    /// Memoized [`RepCategory::compute_profile`], backed by the on-disk cache when present.
    pub fn profile(&self, c: ClassId) -> Result<Arc<Profile>> {
        if let Some(p) = self.profiles.read().expect("profile lock").get(&c) {
            return Ok(p.clone());
        }
        let key = self.cache_key("profile", &self.class(c).key);
        let cached = match (&self.cache, &key) {
            (Some(cache), key) => cache.get(key).map(|v| self.parse_profile(&v)).transpose()?,
            _ => None,
        };
        let prof = match cached {
            Some(p) => p,
            None => {
                let p = self.compute_profile(c)?;
                if let Some(cache) = &self.cache {
                    cache.put(key, self.render_profile(&p))?;
                }
                p
            }
        };
        let prof = Arc::new(prof);
        Ok(self.profiles.write().expect("profile lock").entry(c).or_insert(prof).clone())
    }

    fn cache_key(&self, op: &str, args: &str) -> CacheKey {
        CacheKey { quiver: self.quiver.hash().to_string(), p: self.p, op: op.into(), args: args.into() }
    }

    /// Canonical text of a profile: `quotient|sub|count` entries sorted by key.
    pub fn render_profile(&self, p: &Profile) -> String {
        let mut items: Vec<String> = p
            .iter()
            .map(|((a, b), n)| format!("{}|{}|{}", self.class(*a).key, self.class(*b).key, n))
            .collect();
        items.sort();
        items.join(";")
    }

    fn parse_profile(&self, s: &str) -> Result<Profile> {
        let mut out = Profile::new();
        for item in s.split(';').filter(|x| !x.is_empty()) {
            let bad = || HallError::Internal(format!("corrupt cached profile entry `{item}`"));
            let mut parts = item.split('|');
            let a = self.class_by_key(parts.next().ok_or_else(bad)?)?;
            let b = self.class_by_key(parts.next().ok_or_else(bad)?)?;
            let n: u64 = parts.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
            out.insert((a, b), n);
        }
        Ok(out)
    }

    /// Records `|Aut|` of every class of the given dimension vectors in the cache.
    pub fn record_auts(&self, dims: &[Vec<usize>]) -> Result<()> {
        let Some(cache) = &self.cache else { return Ok(()) };
        for d in dims {
            for c in self.classify(d)? {
                cache.put(self.cache_key("aut", &c.key), c.aut_order.to_string())?;
            }
        }
        Ok(())
    }

    /// Recomputes every cache record for this quiver and prime from scratch.
    ///
    /// Returns `(op, args, cached, recomputed)` for each record that disagrees.
    pub fn audit_cache(&self) -> Result<Vec<(String, String, String, String)>> {
        let Some(cache) = &self.cache else { return Ok(Vec::new()) };
        let mut bad = Vec::new();
        for rec in cache.records() {
            if rec.key.quiver != self.quiver.hash() || rec.key.p != self.p {
                continue;
            }
            let fresh = match rec.key.op.as_str() {
                "aut" => {
                    let c = self.class_by_key(&rec.key.args)?;
                    self.aut_order_brute_force(&self.class(c).rep)?.to_string()
                }
                "profile" => {
                    let c = self.class_by_key(&rec.key.args)?;
                    self.render_profile(&self.compute_profile(c)?)
                }
                other => format!("<unknown op {other}>"),
            };
            if fresh != rec.value {
                bad.push((rec.key.op.clone(), rec.key.args.clone(), rec.value.clone(), fresh));
            }
        }
        Ok(bad)
    }

    /// `g^C_{A,B}`: subrepresentations of `C` isomorphic to `B` with quotient `A`.
    pub fn hall_number(&self, a: ClassId, b: ClassId, c: ClassId) -> Result<u64> {
        let (ca, cb, cc) = (self.class(a), self.class(b), self.class(c));
        if ca.dims.iter().zip(&cb.dims).zip(&cc.dims).any(|((x, y), z)| x + y != *z) {
            return Ok(0);
        }
        Ok(self.profile(c)?.get(&(a, b)).copied().unwrap_or(0))
    }

    /// `|Ext¹(A, B)_C| = g^C_{A,B} a_A a_B |Hom(A, B)| / a_C`.
    pub fn ext_count_with_middle(&self, a: ClassId, b: ClassId, c: ClassId) -> Result<u128> {
        let g = self.hall_number(a, b, c)? as u128;
        let num = g * self.aut(a) * self.aut(b) * (self.q() as u128).pow(self.hom_dim(a, b) as u32);
        let den = self.aut(c);
        if num % den != 0 {
            return Err(HallError::Internal(format!(
                "|Ext¹({}, {})_{}| = {num}/{den} is not integral",
                self.class(a).key,
                self.class(b).key,
                self.class(c).key
            )));
        }
        Ok(num / den)
    }

    /// Classes `C` with `dim C = dim A + dim B`, the possible middle terms.
    pub fn middle_candidates(&self, a: ClassId, b: ClassId) -> Result<Vec<Arc<IsoClass>>> {
        let dims: Vec<usize> = self.class(a).dims.iter().zip(&self.class(b).dims).map(|(x, y)| x + y).collect();
        self.classify(&dims)
    }
}

fn class_key(dims: &[usize], digits: &[u32]) -> String {
    let d: Vec<String> = dims.iter().map(|x| x.to_string()).collect();
    let mut key = d.join(".");
    if !digits.is_empty() {
        key.push('/');
        key.extend(digits.iter().map(|&x| std::char::from_digit(x, 36).expect("digit below 36")));
    }
    key
}

/// Dimension vectors with `n` entries and total at most `max`, by total then lexicographically.
pub fn dim_vectors_up_to(n: usize, max: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for total in 0..=max {
        let mut cur = vec![0; n];
        fn go(i: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if i + 1 == cur.len() {
                cur[i] = left;
                out.push(cur.clone());
                return;
            }
            for k in (0..=left).rev() {
                cur[i] = k;
                go(i + 1, left - k, cur, out);
            }
        }
        if n == 0 {
            if total == 0 {
                out.push(Vec::new());
            }
            continue;
        }
        go(0, total, &mut cur, &mut out);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quiver::zoo;

    #[test]
    fn zero_class_is_registered_first() {
        let cat = RepCategory::new(zoo::a2(2), 2).unwrap();
        let z = cat.class(ClassId::ZERO);
        assert_eq!(z.key, "0.0");
        assert_eq!(z.aut_order, 1);
        assert_eq!(cat.class_by_key("0.0").unwrap(), ClassId::ZERO);
    }

    #[test]
    fn classify_examples() {
        let a1 = RepCategory::new(zoo::a1(5), 5).unwrap();
        assert_eq!(a1.classify(&[2]).unwrap().len(), 1);
        let l2 = RepCategory::new(zoo::l2(1, 2), 2).unwrap();
        let keys: Vec<String> = l2.classify(&[1]).unwrap().iter().map(|c| c.key.clone()).collect();
        assert_eq!(keys, vec!["1/00", "1/01", "1/10", "1/11"]);
        let a2 = RepCategory::new(zoo::a2(2), 2).unwrap();
        assert_eq!(a2.classify(&[1, 1]).unwrap().len(), 2);
    }

    #[test]
    fn aut_examples() {
        let a1 = RepCategory::new(zoo::a1(2), 2).unwrap();
        let s = a1.simple(0, &[]).unwrap();
        let ss = a1.direct_sum(s, s).unwrap();
        assert_eq!(a1.aut(s), 1);
        assert_eq!(a1.aut(ss), 6);
        assert_eq!(a1.aut_order_brute_force(&a1.class(ss).rep).unwrap(), 6);
        let a1p3 = RepCategory::new(zoo::a1(3), 3).unwrap();
        assert_eq!(a1p3.aut(a1p3.simple(0, &[]).unwrap()), 2);
    }

    #[test]
    fn ext_examples() {
        let l2 = RepCategory::new(zoo::l2(1, 2), 2).unwrap();
        let s00 = l2.simple(0, &[0, 0]).unwrap();
        let s01 = l2.simple(0, &[0, 1]).unwrap();
        assert_eq!(l2.ext_dim(s00, s00).unwrap(), 2);
        assert_eq!(l2.ext_dim(s00, s01).unwrap(), 1);
        let a2 = RepCategory::new(zoo::a2(2), 2).unwrap();
        let (s1, s2) = (a2.simple(0, &[]).unwrap(), a2.simple(1, &[]).unwrap());
        assert_eq!(a2.ext_dim(s2, s1).unwrap(), 0);
    }

    #[test]
    fn hall_number_examples() {
        let a1 = RepCategory::new(zoo::a1(2), 2).unwrap();
        let s = a1.simple(0, &[]).unwrap();
        let ss = a1.direct_sum(s, s).unwrap();
        assert_eq!(a1.hall_number(s, s, ss).unwrap(), 3);
        assert_eq!(a1.hall_number(s, s, s).unwrap(), 0);
        assert_eq!(a1.ext_count_with_middle(s, s, ss).unwrap(), 1);

        let a2 = RepCategory::new(zoo::a2(2), 2).unwrap();
        let (s1, s2) = (a2.simple(0, &[]).unwrap(), a2.simple(1, &[]).unwrap());
        let m = a2.class_by_key("1.1/1").unwrap();
        let split = a2.direct_sum(s1, s2).unwrap();
        assert_eq!(a2.hall_number(s1, s2, m).unwrap(), 1);
        assert_eq!(a2.hall_number(s2, s1, m).unwrap(), 0);
        assert_eq!(a2.ext_count_with_middle(s1, s2, m).unwrap(), 1);
        assert_eq!(a2.ext_count_with_middle(s1, s2, split).unwrap(), 1);
    }

    #[test]
    fn keys_resolve_to_their_classes() {
        let cat = RepCategory::new(zoo::kronecker(3), 3).unwrap();
        for c in cat.classes_up_to(3).unwrap() {
            assert_eq!(cat.class_by_key(&c.key).unwrap(), c.id);
        }
        assert!(cat.class_by_key("1.1/9").is_err());
        assert!(cat.class_by_key("1/0").is_err());
    }

    #[test]
    fn dim_vector_enumeration() {
        assert_eq!(dim_vectors_up_to(2, 1), vec![vec![0, 0], vec![1, 0], vec![0, 1]]);
        assert_eq!(dim_vectors_up_to(1, 2).len(), 3);
    }

    #[test]
    fn bounds_are_enforced() {
        let b = Bounds { max_total_dim: 2, ..Bounds::default() };
        let cat = RepCategory::with_bounds(zoo::a1(2), 2, b).unwrap();
        assert!(cat.classify(&[3]).unwrap_err().is_bound());
        assert!(RepCategory::new(zoo::a1(7), 7).unwrap_err().is_bound());
    }
}

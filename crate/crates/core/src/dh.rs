//! The localized Hall algebra `DH(R)` and its reduced quotient `DH_red(R)`,
//! realized on the normal-ordered basis `E_A K_α F_B K†_β` by straightening.
//!
//! No complexes are built here, so quivers with loops are fine. The only
//! inputs are Hall numbers and automorphism orders from [`RepCategory`]:
//!
//! ```text
//! E_A E_B   = v^{⟨Â,B̂⟩} Σ_C g^C_{A,B} a_A a_B / a_C  E_C          (F F alike)
//! F_B E_A   = Σ v^{⟨Â₂,B̂−Â⟩} g^A_{A₁,A₂} g^B_{A₂,B₁} a_{A₂}  K_{Â₂} E_{A₁,B₁}
//! E_A F_B   = Σ v^{⟨B̂₂,Â−B̂⟩} g^B_{B₁,B₂} g^A_{B₂,A₁} a_{B₂}  K†_{B̂₂} E_{A₁,B₁}
//! K_γ E_{X,Y} = v^{(γ, X̂−Ŷ)} E_{X,Y} K_γ,   K†_γ E_{X,Y} = v^{−(γ, X̂−Ŷ)} E_{X,Y} K†_γ
//! ```
//!
//! The third line, read backwards, expresses `E_{A,B}` through `E_A F_B` and
//! terms of strictly smaller dimension; the recursion is memoized per pair.
//! The reduced algebra sets `K†_β = K_{−β}`.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, RwLock};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{HallError, Result};
use crate::hall::{big, HallAlgebra};
use crate::quiver::KVector;
use crate::repcat::{ClassId, RepCategory};
use crate::scalar::Scalar;

/// `E_e K_k F_f K†_kd`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    pub e: ClassId,
    pub k: KVector,
    pub f: ClassId,
    pub kd: KVector,
}

impl Monomial {
    pub fn one(n: usize) -> Self {
        Monomial { e: ClassId::ZERO, k: KVector::zero(n), f: ClassId::ZERO, kd: KVector::zero(n) }
    }

    pub fn render(&self, cat: &RepCategory) -> String {
        let mut parts = Vec::new();
        if self.e != ClassId::ZERO {
            parts.push(format!("E[{}]", cat.class(self.e).key));
        }
        if !self.k.is_zero() {
            parts.push(format!("K({})", self.k));
        }
        if self.f != ClassId::ZERO {
            parts.push(format!("F[{}]", cat.class(self.f).key));
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

/// JSON form of one normal-ordered term.
#[derive(Debug, Clone, Serialize)]
pub struct MonomialDump {
    pub e: String,
    pub k: KVector,
    pub f: String,
    pub kd: KVector,
    pub coeff: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DhElement {
    terms: BTreeMap<Monomial, Scalar>,
}

impl DhElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn monomial(m: Monomial, c: Scalar) -> Self {
        let mut out = Self::zero();
        out.add_term(m, &c);
        out
    }

    pub fn add_term(&mut self, m: Monomial, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(m.clone()).or_default();
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: &Monomial) -> Scalar {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        let mut out = Self::zero();
        for (m, x) in &self.terms {
            out.add_term(m.clone(), &(x * c));
        }
        out
    }

    pub fn add_assign(&mut self, other: &Self) {
        for (m, x) in &other.terms {
            self.add_term(m.clone(), x);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, x) in &other.terms {
            out.add_term(m.clone(), &(-x));
        }
        out
    }

    pub fn normalize(&self, q: u64) -> Self {
        let mut out = Self::zero();
        for (m, x) in &self.terms {
            out.add_term(m.clone(), &x.reduce_mod_q(q));
        }
        out
    }

    /// `(c)*E[A] K(α) F[B] Kd(β) + …`, sorted by rendering.
    pub fn render(&self, cat: &RepCategory) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut items: Vec<(String, String)> =
            self.terms.iter().map(|(m, c)| (m.render(cat), c.to_string())).collect();
        items.sort();
        items
            .into_iter()
            .map(|(m, c)| if c == "1" { m } else if m == "1" { format!("({c})") } else { format!("({c})*{m}") })
            .collect::<Vec<_>>()
            .join(" + ")
    }

    pub fn dump(&self, cat: &RepCategory) -> Vec<MonomialDump> {
        let mut out: Vec<MonomialDump> = self
            .terms
            .iter()
            .map(|(m, c)| MonomialDump {
                e: cat.class(m.e).key.clone(),
                k: m.k.clone(),
                f: cat.class(m.f).key.clone(),
                kd: m.kd.clone(),
                coeff: c.to_string(),
            })
            .collect();
        out.sort_by(|a, b| (&a.e, &a.k.0, &a.f, &a.kd.0).cmp(&(&b.e, &b.k.0, &b.f, &b.kd.0)));
        out
    }
}

type Memo = RwLock<HashMap<(ClassId, ClassId), Arc<DhElement>>>;

/// The straightening engine for one representation category.
#[derive(Debug)]
pub struct DoubleHall {
    hall: HallAlgebra,
    reduced: bool,
    /// `E_{A,B}` in normal form, keyed by `(A, B)`.
    ab: Memo,
    /// `F_B E_A` in normal form, keyed by `(B, A)`.
    fe: Memo,
}

impl DoubleHall {
    pub fn new(cat: Arc<RepCategory>, reduced: bool) -> Self {
        DoubleHall { hall: HallAlgebra::new(cat), reduced, ab: RwLock::default(), fe: RwLock::default() }
    }

    pub fn category(&self) -> &Arc<RepCategory> {
        self.hall.category()
    }

    pub fn hall(&self) -> &HallAlgebra {
        &self.hall
    }

    pub fn is_reduced(&self) -> bool {
        self.reduced
    }

    fn n(&self) -> usize {
        self.category().quiver().num_vertices()
    }

    fn q(&self) -> u64 {
        self.category().q()
    }

    fn kc(&self, a: ClassId) -> KVector {
        self.category().kclass(a)
    }

    fn sym(&self, x: &KVector, y: &KVector) -> Scalar {
        Scalar::v_pow(self.category().quiver().sym_form(x, y))
    }

    fn sym_inv(&self, x: &KVector, y: &KVector) -> Scalar {
        Scalar::v_pow(-self.category().quiver().sym_form(x, y))
    }

    fn euler(&self, x: &KVector, y: &KVector) -> Scalar {
        Scalar::v_pow(self.category().quiver().euler_form(x, y))
    }

    pub fn one(&self) -> DhElement {
        DhElement::monomial(Monomial::one(self.n()), Scalar::one())
    }

    pub fn scalar(&self, c: Scalar) -> DhElement {
        DhElement::monomial(Monomial::one(self.n()), c)
    }

    pub fn e(&self, a: ClassId) -> DhElement {
        DhElement::monomial(Monomial { e: a, ..Monomial::one(self.n()) }, Scalar::one())
    }

    pub fn f(&self, b: ClassId) -> DhElement {
        DhElement::monomial(Monomial { f: b, ..Monomial::one(self.n()) }, Scalar::one())
    }

    pub fn k(&self, alpha: KVector) -> DhElement {
        DhElement::monomial(Monomial { k: alpha, ..Monomial::one(self.n()) }, Scalar::one())
    }

    /// `K†_β`; in reduced mode this is `K_{−β}`.
    pub fn kd(&self, beta: KVector) -> DhElement {
        if self.reduced {
            self.k(-&beta)
        } else {
            DhElement::monomial(Monomial { kd: beta, ..Monomial::one(self.n()) }, Scalar::one())
        }
    }

    /// `E_{A,B}` in normal form.
    pub fn e_ab(&self, a: ClassId, b: ClassId) -> Result<DhElement> {
        let x = self.expand(a, b)?;
        Ok(if self.reduced { self.reduce(&x) } else { (*x).clone() })
    }

    /// `E_A E_B` coefficients, shared by `F_A F_B`.
    fn ee(&self, a: ClassId, b: ClassId) -> Result<Vec<(ClassId, Scalar)>> {
        let twist = self.euler(&self.kc(a), &self.kc(b));
        Ok(self.hall.raw_product(a, b)?.into_iter().map(|(c, x)| (c, twist.scale(&x))).collect())
    }

    fn memo_get(memo: &Memo, key: (ClassId, ClassId)) -> Option<Arc<DhElement>> {
        memo.read().expect("dh memo lock").get(&key).cloned()
    }

    fn memo_put(memo: &Memo, key: (ClassId, ClassId), x: DhElement) -> Arc<DhElement> {
        memo.write().expect("dh memo lock").entry(key).or_insert_with(|| Arc::new(x)).clone()
    }

    fn total_dim(&self, a: ClassId) -> usize {
        self.category().class(a).dims.iter().sum()
    }

    /// `E_{A,B}` in the full algebra.
    fn expand(&self, a: ClassId, b: ClassId) -> Result<Arc<DhElement>> {
        if let Some(x) = Self::memo_get(&self.ab, (a, b)) {
            return Ok(x);
        }
        let cat = self.category();
        let (ka, kb) = (self.kc(a), self.kc(b));
        let mut out = DhElement::monomial(Monomial { e: a, f: b, ..Monomial::one(self.n()) }, Scalar::one());
        let prof_a = cat.profile(a)?;
        for (&(b1, b2), &g1) in cat.profile(b)?.iter() {
            if b2 == ClassId::ZERO {
                continue;
            }
            let kb2 = self.kc(b2);
            for (&(x, a1), &g2) in prof_a.iter() {
                if x != b2 {
                    continue;
                }
                if self.total_dim(a1) >= self.total_dim(a) || self.total_dim(b1) >= self.total_dim(b) {
                    return Err(HallError::Internal("E_{A,B} recursion did not decrease dimension".into()));
                }
                let (ka1, kb1) = (self.kc(a1), self.kc(b1));
                let c = &self.euler(&kb2, &(&ka - &kb)) * &self.sym_inv(&kb2, &(&ka1 - &kb1));
                let c = c.scale(&big(g1 as u128 * g2 as u128 * cat.aut(b2)));
                for (m, y) in self.expand(a1, b1)?.terms() {
                    let shifted = Monomial { kd: &m.kd + &kb2, ..m.clone() };
                    out.add_term(shifted, &-(y * &c));
                }
            }
        }
        Ok(Self::memo_put(&self.ab, (a, b), out.normalize(self.q())))
    }

    /// `F_B E_A` in the full algebra.
    fn fe(&self, b: ClassId, a: ClassId) -> Result<Arc<DhElement>> {
        if let Some(x) = Self::memo_get(&self.fe, (b, a)) {
            return Ok(x);
        }
        let cat = self.category();
        let (ka, kb) = (self.kc(a), self.kc(b));
        let mut out = DhElement::zero();
        let prof_b = cat.profile(b)?;
        for (&(a1, a2), &g1) in cat.profile(a)?.iter() {
            let ka2 = self.kc(a2);
            for (&(x, b1), &g2) in prof_b.iter() {
                if x != a2 {
                    continue;
                }
                let (ka1, kb1) = (self.kc(a1), self.kc(b1));
                let c = &self.euler(&ka2, &(&kb - &ka)) * &self.sym(&ka2, &(&ka1 - &kb1));
                let c = c.scale(&big(g1 as u128 * g2 as u128 * cat.aut(a2)));
                for (m, y) in self.expand(a1, b1)?.terms() {
                    let twist = self.sym(&ka2, &self.kc(m.f));
                    let shifted = Monomial { k: &m.k + &ka2, ..m.clone() };
                    out.add_term(shifted, &(&(y * &c) * &twist));
                }
            }
        }
        Ok(Self::memo_put(&self.fe, (b, a), out.normalize(self.q())))
    }

    fn monomial_product(&self, x: &Monomial, y: &Monomial) -> Result<DhElement> {
        let (kc_y, kd_y) = (self.kc(y.e), self.kc(y.f));
        let lead = self.sym_inv(&x.kd, &kc_y);
        let mut out = DhElement::zero();
        for (mid, c) in self.fe(x.f, y.e)?.terms() {
            let k = &(&x.k + &mid.k) + &y.k;
            let kd = &(&mid.kd + &x.kd) + &y.kd;
            let twist = &(&self.sym(&x.k, &self.kc(mid.e)) * &self.sym(&y.k, &self.kc(mid.f)))
                * &self.sym(&(&mid.kd + &x.kd), &kd_y);
            let base = &(&lead * &twist) * c;
            for (e, ce) in self.ee(x.e, mid.e)? {
                for (f, cf) in self.ee(mid.f, y.f)? {
                    let m = Monomial { e, k: k.clone(), f, kd: kd.clone() };
                    out.add_term(m, &(&base * &(&ce * &cf)));
                }
            }
        }
        Ok(out)
    }

    /// Normal form of `x y`.
    pub fn product(&self, x: &DhElement, y: &DhElement) -> Result<DhElement> {
        let pairs: Vec<(&Monomial, &Scalar, &Monomial, &Scalar)> = x
            .terms()
            .flat_map(|(mx, cx)| y.terms().map(move |(my, cy)| (mx, cx, my, cy)))
            .collect();
        let parts = pairs
            .par_iter()
            .map(|(mx, cx, my, cy)| Ok(self.monomial_product(mx, my)?.scale(&(*cx * *cy))))
            .collect::<Result<Vec<_>>>()?;
        let mut out = DhElement::zero();
        for p in &parts {
            out.add_assign(p);
        }
        let out = out.normalize(self.q());
        Ok(if self.reduced { self.reduce(&out) } else { out })
    }

    /// Left-to-right product of a sequence; the empty product is 1.
    pub fn product_all(&self, xs: &[DhElement]) -> Result<DhElement> {
        let mut acc = self.one();
        for x in xs {
            acc = self.product(&acc, x)?;
        }
        Ok(acc)
    }

    /// `x y − y x`.
    pub fn commutator(&self, x: &DhElement, y: &DhElement) -> Result<DhElement> {
        Ok(self.product(x, y)?.sub(&self.product(y, x)?).normalize(self.q()))
    }

    /// Image in `DH_red`: `E_A K_α F_B K†_β ↦ v^{−(β,B̂)} E_A K_{α−β} F_B`.
    pub fn reduce(&self, x: &DhElement) -> DhElement {
        let mut out = DhElement::zero();
        for (m, c) in x.terms() {
            let twist = self.sym_inv(&m.kd, &self.kc(m.f));
            let r = Monomial { k: &m.k - &m.kd, kd: KVector::zero(self.n()), ..m.clone() };
            out.add_term(r, &(c * &twist));
        }
        out.normalize(self.q())
    }

    /// The shift involution: `E_A ↔ F_A`, `K_α ↔ K†_α`.
    pub fn dagger(&self, x: &DhElement) -> Result<DhElement> {
        let mut out = DhElement::zero();
        for (m, c) in x.terms() {
            let img = self.product_all(&[self.f(m.e), self.kd(m.k.clone()), self.e(m.f), self.k(m.kd.clone())])?;
            out.add_assign(&img.scale(c));
        }
        Ok(out.normalize(self.q()))
    }

    /// Whether normal forms are equal after folding `v² = q`.
    pub fn equal(&self, x: &DhElement, y: &DhElement) -> bool {
        x.sub(y).normalize(self.q()).is_empty()
    }
}

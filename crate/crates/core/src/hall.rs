//! The extended twisted Hall algebra `H̃_v`, its coproduct and Hopf pairing.
//!
//! Basis elements are `⟨A⟩ * K_α` with `A` an isomorphism class and `α ∈ K(R)`.
//!
//! ```text
//! (⟨A⟩K_α)(⟨B⟩K_β) = v^{⟨Â,B̂⟩+(α,B̂)} Σ_C g^C_{A,B} a_A a_B / a_C ⟨C⟩K_{α+β}
//! Δ(⟨A⟩K_α)        = Σ_{B,C} v^{⟨B̂,Ĉ⟩} g^A_{B,C} ⟨B⟩K_{Ĉ+α} ⊗ ⟨C⟩K_α
//! (⟨A⟩K_α, ⟨B⟩K_β) = v^{(α,β)} a_A δ_{A,B}
//! ```
//!
//! Every result is normalized modulo `v² = q`.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

use crate::dh::{DhElement, DoubleHall};
use crate::error::Result;
use crate::quiver::KVector;
use crate::repcat::{ClassId, RepCategory};
use crate::report::{check_with, Check};
use crate::scalar::{Exponent, Scalar};

/// A basis label `⟨A⟩K_α`.
pub type HallBasis = (ClassId, KVector);

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct HallElement {
    terms: BTreeMap<HallBasis, Scalar>,
}

impl HallElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn basis(a: ClassId, alpha: KVector) -> Self {
        Self::term(a, alpha, Scalar::one())
    }

    pub fn term(a: ClassId, alpha: KVector, c: Scalar) -> Self {
        let mut e = Self::zero();
        e.add_term((a, alpha), &c);
        e
    }

    pub fn add_term(&mut self, b: HallBasis, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(b.clone()).or_default();
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&b);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&HallBasis, &Scalar)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        let mut out = Self::zero();
        for (b, x) in &self.terms {
            out.add_term(b.clone(), &(x * c));
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (b, x) in &other.terms {
            out.add_term(b.clone(), x);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&Scalar::from_int(-1)))
    }

    pub fn normalize(&self, q: u64) -> Self {
        let mut out = Self::zero();
        for (b, x) in &self.terms {
            out.add_term(b.clone(), &x.reduce_mod_q(q));
        }
        out
    }

    /// `v^(r)*[A; α] + …`, terms sorted by class key.
    pub fn render(&self, cat: &RepCategory) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut items: Vec<(String, String, &Scalar)> = self
            .terms
            .iter()
            .map(|((a, alpha), c)| (cat.class(*a).key.clone(), alpha.to_string(), c))
            .collect();
        items.sort();
        items.iter().map(|(k, al, c)| format!("({c})*[{k}; {al}]")).collect::<Vec<_>>().join(" + ")
    }

    pub fn dump(&self, cat: &RepCategory) -> Vec<TermDump> {
        self.terms
            .iter()
            .map(|((a, alpha), c)| TermDump { class: vec![cat.class(*a).key.clone()], k: vec![alpha.clone()], coeff: c.to_string() })
            .collect()
    }
}

/// JSON form of one term.
#[derive(Debug, Clone, Serialize)]
pub struct TermDump {
    pub class: Vec<String>,
    pub k: Vec<KVector>,
    pub coeff: String,
}

/// An element of `H̃^{⊗n}` for any `n`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TensorElement {
    terms: BTreeMap<Vec<HallBasis>, Scalar>,
}

impl TensorElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn add_term(&mut self, b: Vec<HallBasis>, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(b.clone()).or_default();
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&b);
        }
    }

    /// `x ⊗ y`.
    pub fn pure(x: &HallElement, y: &HallElement) -> Self {
        let mut out = Self::zero();
        for (bx, cx) in x.terms() {
            for (by, cy) in y.terms() {
                out.add_term(vec![bx.clone(), by.clone()], &(cx * cy));
            }
        }
        out
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<HallBasis>, &Scalar)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn normalize(&self, q: u64) -> Self {
        let mut out = Self::zero();
        for (b, x) in &self.terms {
            out.add_term(b.clone(), &x.reduce_mod_q(q));
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (b, x) in &other.terms {
            out.add_term(b.clone(), &(-x));
        }
        out
    }

    pub fn render(&self, cat: &RepCategory) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut items: Vec<String> = self
            .terms
            .iter()
            .map(|(bs, c)| {
                let factors: Vec<String> =
                    bs.iter().map(|(a, al)| format!("[{}; {}]", cat.class(*a).key, al)).collect();
                format!("({c})*{}", factors.join("⊗"))
            })
            .collect();
        items.sort();
        items.join(" + ")
    }
}

/// `v^e` for an exponent coming from the Euler forms.
pub(crate) fn vpow(e: Exponent) -> Scalar {
    Scalar::v_pow(e)
}

pub(crate) fn big(n: u128) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

#[derive(Debug, Clone)]
pub struct HallAlgebra {
    cat: Arc<RepCategory>,
}

impl HallAlgebra {
    pub fn new(cat: Arc<RepCategory>) -> Self {
        HallAlgebra { cat }
    }

    pub fn category(&self) -> &Arc<RepCategory> {
        &self.cat
    }

    fn q(&self) -> u64 {
        self.cat.q()
    }

    pub fn one(&self) -> HallElement {
        HallElement::basis(ClassId::ZERO, KVector::zero(self.cat.quiver().num_vertices()))
    }

    /// `⟨A⟩` with trivial `K` part.
    pub fn class(&self, a: ClassId) -> HallElement {
        HallElement::basis(a, KVector::zero(self.cat.quiver().num_vertices()))
    }

    pub fn k(&self, alpha: KVector) -> HallElement {
        HallElement::basis(ClassId::ZERO, alpha)
    }

    /// `Σ_C g^C_{A,B} a_A a_B / a_C ⟨C⟩`, the untwisted Hall product of two classes.
    pub fn raw_product(&self, a: ClassId, b: ClassId) -> Result<Vec<(ClassId, BigRational)>> {
        let cat = &self.cat;
        let mut out = Vec::new();
        for c in cat.middle_candidates(a, b)? {
            let g = cat.hall_number(a, b, c.id)?;
            if g > 0 {
                out.push((c.id, big(g as u128 * cat.aut(a) * cat.aut(b)) / big(c.aut_order)));
            }
        }
        Ok(out)
    }

    pub fn basis_product(&self, x: &HallBasis, y: &HallBasis) -> Result<HallElement> {
        let quiver = self.cat.quiver();
        let (a, alpha) = x;
        let (b, beta) = y;
        let (ka, kb) = (self.cat.kclass(*a), self.cat.kclass(*b));
        let twist = vpow(quiver.euler_form(&ka, &kb) + quiver.sym_form(alpha, &kb));
        let mut out = HallElement::zero();
        let k = alpha + beta;
        for (c, coeff) in self.raw_product(*a, *b)? {
            out.add_term((c, k.clone()), &twist.scale(&coeff));
        }
        Ok(out)
    }

    pub fn product(&self, x: &HallElement, y: &HallElement) -> Result<HallElement> {
        let mut out = HallElement::zero();
        for (bx, cx) in x.terms() {
            for (by, cy) in y.terms() {
                let p = self.basis_product(bx, by)?;
                out = out.add(&p.scale(&(cx * cy)));
            }
        }
        Ok(out.normalize(self.q()))
    }

    fn basis_coproduct(&self, x: &HallBasis) -> Result<Vec<(HallBasis, HallBasis, Scalar)>> {
        let quiver = self.cat.quiver();
        let (a, alpha) = x;
        let mut out = Vec::new();
        for (&(b, c), &g) in self.cat.profile(*a)?.iter() {
            let (kb, kc) = (self.cat.kclass(b), self.cat.kclass(c));
            let coeff = vpow(quiver.euler_form(&kb, &kc)).scale(&big(g as u128));
            out.push(((b, &kc + alpha), (c, alpha.clone()), coeff));
        }
        Ok(out)
    }

    pub fn coproduct(&self, x: &HallElement) -> Result<TensorElement> {
        let mut out = TensorElement::zero();
        for (bx, cx) in x.terms() {
            for (l, r, c) in self.basis_coproduct(bx)? {
                out.add_term(vec![l, r], &(&c * cx));
            }
        }
        Ok(out.normalize(self.q()))
    }

    /// Applies `Δ` to tensor factor `pos`.
    pub fn coproduct_at(&self, t: &TensorElement, pos: usize) -> Result<TensorElement> {
        let mut out = TensorElement::zero();
        for (bs, c) in t.terms() {
            for (l, r, d) in self.basis_coproduct(&bs[pos])? {
                let mut nb = bs[..pos].to_vec();
                nb.push(l);
                nb.push(r);
                nb.extend_from_slice(&bs[pos + 1..]);
                out.add_term(nb, &(c * &d));
            }
        }
        Ok(out.normalize(self.q()))
    }

    /// `ε(⟨A⟩K_α) = δ_{A,0}`.
    pub fn counit(&self, x: &HallElement) -> Scalar {
        let mut s = Scalar::zero();
        for ((a, _), c) in x.terms() {
            if *a == ClassId::ZERO {
                s += c;
            }
        }
        s
    }

    /// The Hopf pairing, extended bilinearly.
    pub fn pair(&self, x: &HallElement, y: &HallElement) -> Scalar {
        let quiver = self.cat.quiver();
        let mut s = Scalar::zero();
        for ((a, alpha), cx) in x.terms() {
            for ((b, beta), cy) in y.terms() {
                if a == b {
                    let v = vpow(quiver.sym_form(alpha, beta)).scale(&big(self.cat.aut(*a)));
                    s += &(&v * &(cx * cy));
                }
            }
        }
        s.reduce_mod_q(self.q())
    }

    /// Pairing of tensors factor by factor.
    pub fn pair_tensor(&self, x: &TensorElement, y: &TensorElement) -> Scalar {
        let mut s = Scalar::zero();
        for (bx, cx) in x.terms() {
            for (by, cy) in y.terms() {
                if bx.len() != by.len() {
                    continue;
                }
                let mut prod = cx * cy;
                for (u, w) in bx.iter().zip(by) {
                    if prod.is_zero() {
                        break;
                    }
                    prod = &prod * &self.pair(&HallElement::basis(u.0, u.1.clone()), &HallElement::basis(w.0, w.1.clone()));
                }
                s += &prod;
            }
        }
        s.reduce_mod_q(self.q())
    }

    /// `(x*y, z) = (x⊗y, Δz)`.
    pub fn check_hopf_compat(&self, x: &HallElement, y: &HallElement, z: &HallElement) -> Check {
        let cat = &self.cat;
        let id = format!("hopf[{} | {} | {}]", x.render(cat), y.render(cat), z.render(cat));
        check_with(id, || {
            let lhs = self.pair(&self.product(x, y)?, z);
            let rhs = self.pair_tensor(&TensorElement::pure(x, y), &self.coproduct(z)?);
            let res = (&lhs - &rhs).reduce_mod_q(self.q());
            Ok((lhs.to_string(), rhs.to_string(), res.to_string(), res.is_zero()))
        })
    }

    /// `(Δ⊗id)Δ(x) = (id⊗Δ)Δ(x)`.
    pub fn check_coassociativity(&self, x: &HallElement) -> Check {
        let cat = &self.cat;
        check_with(format!("coassoc[{}]", x.render(cat)), || {
            let d = self.coproduct(x)?;
            let lhs = self.coproduct_at(&d, 0)?;
            let rhs = self.coproduct_at(&d, 1)?;
            let res = lhs.sub(&rhs).normalize(self.q());
            Ok((lhs.render(cat), rhs.render(cat), res.render(cat), res.is_zero()))
        })
    }

    /// `(x*y)*z = x*(y*z)`.
    pub fn check_associativity(&self, x: &HallElement, y: &HallElement, z: &HallElement) -> Check {
        let cat = &self.cat;
        let id = format!("assoc[{} | {} | {}]", x.render(cat), y.render(cat), z.render(cat));
        check_with(id, || {
            let lhs = self.product(&self.product(x, y)?, z)?;
            let rhs = self.product(x, &self.product(y, z)?)?;
            let res = lhs.sub(&rhs).normalize(self.q());
            Ok((lhs.render(cat), rhs.render(cat), res.render(cat), res.is_zero()))
        })
    }
}

/// Both sides of the double compatibility identity for a pair of classes:
///
/// ```text
/// Σ v^{⟨A₁,A₂⟩+⟨B₂,B₁⟩} g^A_{A₁,A₂} g^B_{B₂,B₁} ([A₂],[B₂])_H  E_{A₁} K_{Â₂} F_{B₁}
///   = Σ v^{⟨A₁,A₂⟩+⟨B₂,B₁⟩} g^A_{A₁,A₂} g^B_{B₂,B₁} ([A₁],[B₁])_H  F_{B₂} K†_{B̂₁} E_{A₂}
/// ```
pub fn dd_identity_sides(dh: &DoubleHall, a: ClassId, b: ClassId) -> Result<(DhElement, DhElement)> {
    let cat = dh.category();
    let quiver = cat.quiver();
    let mut lhs = DhElement::zero();
    let mut rhs = DhElement::zero();
    let (pa, pb) = (cat.profile(a)?, cat.profile(b)?);
    for (&(a1, a2), &ga) in pa.iter() {
        for (&(b2, b1), &gb) in pb.iter() {
            let (l, r) = (a2 == b2, a1 == b1);
            if !l && !r {
                continue;
            }
            let e = quiver.euler_form(&cat.kclass(a1), &cat.kclass(a2)) + quiver.euler_form(&cat.kclass(b2), &cat.kclass(b1));
            let c = vpow(e).scale(&big(ga as u128 * gb as u128));
            if l {
                let x = dh.product_all(&[dh.e(a1), dh.k(cat.kclass(a2)), dh.f(b1)])?;
                lhs.add_assign(&x.scale(&c.scale(&big(cat.aut(a2)))));
            }
            if r {
                let x = dh.product_all(&[dh.f(b2), dh.kd(cat.kclass(b1)), dh.e(a2)])?;
                rhs.add_assign(&x.scale(&c.scale(&big(cat.aut(a1)))));
            }
        }
    }
    Ok((lhs.normalize(cat.q()), rhs.normalize(cat.q())))
}

/// Reports whether [`dd_identity_sides`] agree.
pub fn check_dd_identity(dh: &DoubleHall, a: ClassId, b: ClassId) -> Check {
    let cat = dh.category();
    let id = format!("drinfeld[{} | {}]", cat.class(a).key, cat.class(b).key);
    check_with(id, || {
        let (l, r) = dd_identity_sides(dh, a, b)?;
        let res = l.sub(&r).normalize(cat.q());
        Ok((l.render(cat), r.render(cat), res.render(cat), res.is_empty()))
    })
}

//! Exact coefficients in `Q[v^{1/N}, v^{-1/N}]`.
//!
//! A [`Scalar`] is a finite sum `Σ c_e · v^e` with rational exponents `e`
//! and rational coefficients `c_e`. Arithmetic is purely formal; the ring
//! knows nothing about `q` until [`Scalar::reduce_mod_q`] folds `v^2 = q`
//! into the coefficients, which is how elements computed from point counts
//! over a fixed `F_q` are compared.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{HallError, Result};

/// Exponent of `v`, a rational number.
pub type Exponent = Ratio<i64>;

/// Converts an exact integer-valued or rational number into a coefficient.
pub fn rational(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// The ring `Q[v^{±1/N}]` for a fixed `N`.
///
/// Only exponents whose denominator divides `N` may be produced through
/// [`ScalarRing::v_pow`]; everything else in the crate builds exponents from
/// Euler-form values, whose denominators divide `N` by construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScalarRing {
    denom: i64,
}

impl ScalarRing {
    pub fn new(denom: i64) -> Result<Self> {
        if denom <= 0 {
            return Err(HallError::Ring(format!("exponent denominator must be positive, got {denom}")));
        }
        Ok(Self { denom })
    }

    pub fn denominator(&self) -> i64 {
        self.denom
    }

    /// The monomial `v^r`.
    pub fn v_pow(&self, r: Exponent) -> Result<Scalar> {
        if self.denom % r.denom() != 0 {
            return Err(HallError::Ring(format!(
                "exponent {r} is not representable with denominator {}",
                self.denom
            )));
        }
        Ok(Scalar::v_pow(r))
    }
}

/// A finite `Q`-linear combination of rational powers of `v`.
///
/// Zero coefficients are never stored, so structural equality is equality
/// in the ring.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Scalar {
    terms: BTreeMap<Exponent, BigRational>,
}

impl Scalar {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_rational(BigRational::one())
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_rational(c: BigRational) -> Self {
        Self::monomial(Exponent::zero(), c)
    }

    pub fn monomial(e: Exponent, c: BigRational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(e, c);
        }
        Self { terms }
    }

    /// `v^r` without a denominator check.
    pub fn v_pow(r: Exponent) -> Self {
        Self::monomial(r, BigRational::one())
    }

    /// `v^n` for an integer `n`.
    pub fn v_int(n: i64) -> Self {
        Self::v_pow(Exponent::from_integer(n))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .get(&Exponent::zero())
                .map(|c| c.is_one())
                .unwrap_or(false)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &BigRational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, e: Exponent, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(e).or_insert_with(BigRational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&e);
        }
    }

    /// Multiplies every coefficient by `c`.
    pub fn scale(&self, c: &BigRational) -> Scalar {
        if c.is_zero() {
            return Scalar::zero();
        }
        Scalar {
            terms: self.terms.iter().map(|(e, x)| (*e, x * c)).collect(),
        }
    }

    /// Multiplies by `v^e`.
    pub fn shift(&self, e: Exponent) -> Scalar {
        Scalar {
            terms: self.terms.iter().map(|(x, c)| (*x + e, c.clone())).collect(),
        }
    }

    /// Numerical value at `v = √q`.
    pub fn evaluate(&self, q: u64) -> f64 {
        let qf = q as f64;
        self.terms
            .iter()
            .map(|(e, c)| {
                let coeff = c.to_f64().unwrap_or(f64::NAN);
                let exp = *e.numer() as f64 / *e.denom() as f64;
                coeff * qf.powf(exp / 2.0)
            })
            .sum()
    }

    /// Canonical representative modulo `v^2 = q`.
    ///
    /// Every exponent is moved into `(-1, 1]` by trading `v^2` for the
    /// rational `q`. For prime `q` the monomials `v^e`, `e ∈ (-1, 1] ∩ (1/N)Z`,
    /// are linearly independent over `Q` (`x^{2N} - q` is Eisenstein), so two
    /// reduced scalars are equal as real numbers iff they are identical.
    pub fn reduce_mod_q(&self, q: u64) -> Scalar {
        let mut out = Scalar::zero();
        let qq = BigRational::from_integer(BigInt::from(q));
        for (e, c) in &self.terms {
            // k = ceil((e - 1) / 2), so that e - 2k lies in (-1, 1].
            let k = ((*e - Exponent::one()) / Exponent::from_integer(2)).ceil().to_integer();
            let factor = if k >= 0 {
                pow_rational(&qq, k as u32)
            } else {
                pow_rational(&qq, (-k) as u32).recip()
            };
            out.add_term(*e - Exponent::from_integer(2 * k), c * factor);
        }
        out
    }

    /// Largest denominator among exponents (1 for a Laurent polynomial in `v`).
    pub fn exponent_lcm(&self) -> i64 {
        self.terms.keys().fold(1i64, |acc, e| acc.lcm(e.denom()))
    }
}

fn pow_rational(x: &BigRational, n: u32) -> BigRational {
    let mut acc = BigRational::one();
    for _ in 0..n {
        acc *= x;
    }
    acc
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            let one = BigRational::from_integer(1.into());
            let coeff = if *c == one {
                String::new()
            } else if *c == -one {
                "-".into()
            } else {
                format!("{c}*")
            };
            if e.is_zero() {
                write!(f, "{c}")?;
            } else if *e == Exponent::from_integer(1) {
                write!(f, "{coeff}v")?;
            } else {
                write!(f, "{coeff}v^({e})")?;
            }
        }
        Ok(())
    }
}

impl FromStr for Scalar {
    type Err = HallError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "0" {
            return Ok(Scalar::zero());
        }
        let mut out = Scalar::zero();
        for part in s.split(" + ") {
            let (c, e) = match part.split_once('v') {
                Some((c, e)) => {
                    let c = match c.trim().trim_end_matches('*') {
                        "" => "1",
                        "-" => "-1",
                        c => c,
                    };
                    let e = match e.trim() {
                        "" => "1",
                        e => e
                            .strip_prefix("^(")
                            .and_then(|e| e.strip_suffix(')'))
                            .ok_or_else(|| HallError::Ring(format!("malformed exponent in `{part}`")))?,
                    };
                    (c, e)
                }
                None => (part, "0"),
            };
            let c: BigRational = c
                .trim()
                .parse()
                .map_err(|_| HallError::Ring(format!("bad coefficient `{c}`")))?;
            let e: Exponent = e
                .trim()
                .parse()
                .map_err(|_| HallError::Ring(format!("bad exponent `{e}`")))?;
            out.add_term(e, c);
        }
        Ok(out)
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_int(n)
    }
}

impl From<BigRational> for Scalar {
    fn from(c: BigRational) -> Self {
        Scalar::from_rational(c)
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        for (e, c) in &rhs.terms {
            self.add_term(*e, c.clone());
        }
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        for (e, c) in &rhs.terms {
            self.add_term(*e, -c.clone());
        }
    }
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(mut self, rhs: Scalar) -> Scalar {
        self += &rhs;
        self
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(mut self, rhs: Scalar) -> Scalar {
        self -= &rhs;
        self
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar {
            terms: self.terms.iter().map(|(e, c)| (*e, -c.clone())).collect(),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        let mut out = Scalar::zero();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                out.add_term(*e1 + *e2, c1 * c2);
            }
        }
        out
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: Scalar) -> Scalar {
        &self * &rhs
    }
}

/// Quantum integer `[n] = (v^n - v^{-n}) / (v - v^{-1})` as a Laurent polynomial.
pub fn quantum_int(n: i64) -> Scalar {
    let mut out = Scalar::zero();
    if n == 0 {
        return out;
    }
    let m = n.abs();
    for k in 0..m {
        out += &Scalar::v_int(m - 1 - 2 * k);
    }
    if n < 0 {
        -out
    } else {
        out
    }
}

/// Quantum binomial coefficient via the two-sided Pascal rule
/// `[n, k] = v^k [n-1, k] + v^{-(n-k)} [n-1, k-1]`.
pub fn quantum_binomial(n: u32, k: u32) -> Scalar {
    if k > n {
        return Scalar::zero();
    }
    if k == 0 || k == n {
        return Scalar::one();
    }
    let a = &Scalar::v_int(k as i64) * &quantum_binomial(n - 1, k);
    let b = &Scalar::v_int(-((n - k) as i64)) * &quantum_binomial(n - 1, k - 1);
    a + b
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn e(n: i64, d: i64) -> Exponent {
        Exponent::new(n, d)
    }

    #[test]
    fn v_pow_zero_is_one() {
        let ring = ScalarRing::new(2).unwrap();
        assert!(ring.v_pow(e(0, 1)).unwrap().is_one());
    }

    #[test]
    fn v_squared_evaluates_to_q() {
        let ring = ScalarRing::new(2).unwrap();
        let q = ring.v_pow(e(2, 1)).unwrap();
        assert_eq!(q.evaluate(2), 2.0);
    }

    #[test]
    fn half_power_evaluates_to_fourth_root() {
        let ring = ScalarRing::new(2).unwrap();
        let s = ring.v_pow(e(1, 2)).unwrap();
        assert!((s.evaluate(4) - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn denominator_not_dividing_n_is_rejected() {
        let ring = ScalarRing::new(2).unwrap();
        assert!(matches!(ring.v_pow(e(1, 3)), Err(HallError::Ring(_))));
    }

    #[test]
    fn evaluate_examples() {
        assert_eq!(Scalar::one().evaluate(2), 1.0);
        let s = &Scalar::v_int(1) - &Scalar::v_int(-1);
        assert!((s.evaluate(4) - 1.5).abs() < 1e-12);
        let t = &Scalar::v_int(2) - &Scalar::one();
        assert!((t.evaluate(3) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn reduce_folds_q() {
        // v^{-1} = v / q at q = 2
        let r = Scalar::v_int(-1).reduce_mod_q(2);
        assert_eq!(r, Scalar::monomial(e(1, 1), rational(1, 2)));
        // v^3 = 2 v
        let r = Scalar::v_int(3).reduce_mod_q(2);
        assert_eq!(r, Scalar::monomial(e(1, 1), rational(2, 1)));
        // v - v^{-1} - v/2 = 0 at q = 2
        let s = &(&Scalar::v_int(1) - &Scalar::v_int(-1)) - &Scalar::monomial(e(1, 1), rational(1, 2));
        assert!(s.reduce_mod_q(2).is_zero());
        let h = Scalar::v_pow(e(-1, 2)).reduce_mod_q(3);
        assert_eq!(h, Scalar::v_pow(e(-1, 2)));
    }

    #[test]
    fn quantum_numbers() {
        let two = quantum_int(2);
        assert_eq!(two, &Scalar::v_int(1) + &Scalar::v_int(-1));
        // [3 choose 1] = [3]
        assert_eq!(quantum_binomial(3, 1), quantum_int(3));
        assert_eq!(quantum_binomial(3, 2), quantum_int(3));
        // [4 choose 2] = [4][3]/[2] = v^4 + v^2 + 2 + v^-2 + v^-4
        let mut expect = Scalar::from_int(2);
        for k in [4, 2, -2, -4] {
            expect += &Scalar::v_int(k);
        }
        assert_eq!(quantum_binomial(4, 2), expect);
    }

    #[test]
    fn display_round_trip_simple() {
        let s = &Scalar::monomial(e(-1, 2), rational(-3, 4)) + &Scalar::from_int(5);
        let text = s.to_string();
        assert_eq!(text, "-3/4*v^(-1/2) + 5");
        assert_eq!(text.parse::<Scalar>().unwrap(), s);
        assert_eq!("0".parse::<Scalar>().unwrap(), Scalar::zero());
        let t = &Scalar::v_int(1) - &Scalar::v_int(2);
        assert_eq!(t.to_string(), "v + -v^(2)");
        assert_eq!(t.to_string().parse::<Scalar>().unwrap(), t);
    }

    fn arb_scalar() -> impl Strategy<Value = Scalar> {
        proptest::collection::vec((-8i64..8, 1i64..3, -20i64..20, 1i64..5), 0..5).prop_map(|ts| {
            let mut s = Scalar::zero();
            for (en, ed, cn, cd) in ts {
                s += &Scalar::monomial(e(en, ed), rational(cn, cd));
            }
            s
        })
    }

    proptest! {
        #[test]
        fn ring_axioms(a in arb_scalar(), b in arb_scalar(), c in arb_scalar()) {
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert!((&a - &a).is_empty());
        }

        #[test]
        fn evaluate_is_homomorphism(a in arb_scalar(), b in arb_scalar(), q in 2u64..6) {
            let lhs = (&a * &b).evaluate(q);
            let rhs = a.evaluate(q) * b.evaluate(q);
            prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + lhs.abs().max(rhs.abs())));
            let sum = (&a + &b).evaluate(q);
            prop_assert!((sum - a.evaluate(q) - b.evaluate(q)).abs() <= 1e-9 * (1.0 + sum.abs()));
        }

        #[test]
        fn reduction_preserves_value(a in arb_scalar(), q in prop::sample::select(vec![2u64, 3, 5])) {
            let r = a.reduce_mod_q(q);
            let (x, y) = (a.evaluate(q), r.evaluate(q));
            prop_assert!((x - y).abs() <= 1e-9 * (1.0 + x.abs()));
            prop_assert_eq!(r.reduce_mod_q(q), r.clone());
        }

        #[test]
        fn text_round_trip(a in arb_scalar()) {
            let back: Scalar = a.to_string().parse().unwrap();
            prop_assert_eq!(back, a);
        }
    }
}

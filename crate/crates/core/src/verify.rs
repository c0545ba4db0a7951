//! Verification suites. Each one produces a [`Report`] whose checks appear in
//! a fixed order, whatever the thread scheduling.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::cplx::{self, Oracle};
use crate::dh::{DhElement, DoubleHall};
use crate::error::{HallError, Result};
use crate::hall::{self, HallAlgebra};
use crate::repcat::{ClassId, IsoClass, RepCategory};
use crate::report::{check_with, Check, Report};
use crate::scalar::Exponent;
use crate::uq::{self, XiConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Relations,
    Serre,
    Drinfeld,
    Assoc,
    Oracle,
    All,
}

impl Suite {
    pub const ALL: [Suite; 6] = [Suite::Relations, Suite::Serre, Suite::Drinfeld, Suite::Assoc, Suite::Oracle, Suite::All];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Relations => "relations",
            Suite::Serre => "serre",
            Suite::Drinfeld => "drinfeld",
            Suite::Assoc => "assoc",
            Suite::Oracle => "oracle",
            Suite::All => "all",
        }
    }

    /// Default dimension cap when none is configured.
    pub fn default_max_dim(self) -> usize {
        match self {
            Suite::Drinfeld => 1,
            Suite::Assoc => 3,
            _ => 2,
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = HallError;

    fn from_str(s: &str) -> Result<Suite> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| HallError::Parse { line: 0, msg: format!("unknown suite `{s}`") })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyConfig {
    /// Dimension cap; `None` picks [`Suite::default_max_dim`].
    pub max_dim: Option<usize>,
    pub xi: XiConfig,
    /// Seed of the random associativity triples.
    pub seed: u64,
    pub random_triples: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig { max_dim: None, xi: XiConfig::default(), seed: 0, random_triples: 100 }
    }
}

impl VerifyConfig {
    fn dim(&self, suite: Suite) -> usize {
        self.max_dim.unwrap_or_else(|| suite.default_max_dim())
    }
}

/// Runs a suite. The oracle suite refuses quivers with loops; `all` skips it there.
pub fn run(cat: &Arc<RepCategory>, suite: Suite, config: &VerifyConfig) -> Result<Report> {
    if matches!(suite, Suite::Relations | Suite::Serre | Suite::All) {
        // the generators need one simple per loop label
        cat.quiver().check_charge(cat.p())?;
    }
    let checks = match suite {
        Suite::Relations => relations(cat, config),
        Suite::Serre => serre(cat, config),
        Suite::Drinfeld => drinfeld(cat, config.dim(suite))?,
        Suite::Assoc => assoc(cat, config)?,
        Suite::Oracle => oracle(cat, config.dim(suite))?,
        Suite::All => {
            let mut out = Vec::new();
            for s in [Suite::Relations, Suite::Serre, Suite::Drinfeld, Suite::Assoc] {
                out.extend(run(cat, s, config)?.checks);
            }
            if cat.quiver().is_loop_free() {
                out.extend(run(cat, Suite::Oracle, config)?.checks);
            }
            out
        }
    };
    let quiver = cat.quiver();
    let cfg = serde_json::json!({
        "quiver": quiver.hash(),
        "p": cat.p(),
        "max_dim": config.max_dim.unwrap_or_else(|| suite.default_max_dim()),
        "f_prefactor": config.xi.f_prefactor,
        "serre_max_dim": config.xi.serre_max_dim,
        "seed": config.seed,
    });
    Ok(Report { suite: suite.name().into(), checks, config: cfg })
}

fn relations(cat: &Arc<RepCategory>, config: &VerifyConfig) -> Vec<Check> {
    let dh = DoubleHall::new(cat.clone(), true);
    match uq::build_generators(&dh, &config.xi) {
        Ok(t) => uq::verify_relations(&dh, &t),
        Err(e) => vec![Check::from_error("generators", &e)],
    }
}

fn serre(cat: &Arc<RepCategory>, config: &VerifyConfig) -> Vec<Check> {
    let dh = DoubleHall::new(cat.clone(), true);
    match uq::build_generators(&dh, &config.xi) {
        Ok(t) => uq::verify_serre(&dh, &t, &config.xi),
        Err(e) => vec![Check::from_error("generators", &e)],
    }
}

fn nonzero(cat: &RepCategory, max: usize) -> Result<Vec<Arc<IsoClass>>> {
    Ok(cat.classes_up_to(max)?.into_iter().filter(|c| c.id != ClassId::ZERO).collect())
}

fn total(c: &IsoClass) -> usize {
    c.dims.iter().sum()
}

/// The double compatibility identity on pairs of nonzero classes of dimension at most `max`.
fn drinfeld(cat: &Arc<RepCategory>, max: usize) -> Result<Vec<Check>> {
    let dh = DoubleHall::new(cat.clone(), true);
    let cls = nonzero(cat, max)?;
    let pairs: Vec<(ClassId, ClassId)> = cls.iter().flat_map(|a| cls.iter().map(move |b| (a.id, b.id))).collect();
    Ok(pairs.par_iter().map(|&(a, b)| hall::check_dd_identity(&dh, a, b)).collect())
}

/// Nonzero `g^D_{A,B}` over all middle terms `D`.
fn products(cat: &RepCategory, a: ClassId, b: ClassId) -> Result<BTreeMap<ClassId, u128>> {
    let mut out = BTreeMap::new();
    for d in cat.middle_candidates(a, b)? {
        let g = cat.hall_number(a, b, d.id)?;
        if g != 0 {
            out.insert(d.id, g as u128);
        }
    }
    Ok(out)
}

fn render_counts(cat: &RepCategory, m: &BTreeMap<ClassId, u128>) -> String {
    let items: Vec<String> = m.iter().map(|(d, g)| format!("{}:{g}", cat.class(*d).key)).collect();
    format!("{{{}}}", items.join(", "))
}

/// `Σ_{C₁} g^{C₁}_{A,B} g^D_{C₁,C} = Σ_{D₁} g^D_{A,D₁} g^{D₁}_{B,C}` for every `D` at once.
pub fn check_hall_number_associativity(cat: &RepCategory, a: ClassId, b: ClassId, c: ClassId) -> Check {
    let id = format!("g-assoc[{} {} {}]", cat.class(a).key, cat.class(b).key, cat.class(c).key);
    check_with(id, || {
        let mut lhs = BTreeMap::new();
        for (c1, g) in products(cat, a, b)? {
            for (d, h) in products(cat, c1, c)? {
                *lhs.entry(d).or_insert(0u128) += g * h;
            }
        }
        let mut rhs = BTreeMap::new();
        for (d1, g) in products(cat, b, c)? {
            for (d, h) in products(cat, a, d1)? {
                *rhs.entry(d).or_insert(0u128) += g * h;
            }
        }
        let mut diff: Vec<String> = Vec::new();
        for d in lhs.keys().chain(rhs.keys()).collect::<BTreeSet<_>>() {
            let (l, r) = (lhs.get(d).copied().unwrap_or(0), rhs.get(d).copied().unwrap_or(0));
            if l != r {
                diff.push(format!("{}:{}", cat.class(*d).key, l as i128 - r as i128));
            }
        }
        let ok = diff.is_empty();
        Ok((render_counts(cat, &lhs), render_counts(cat, &rhs), format!("{{{}}}", diff.join(", ")), ok))
    })
}

/// `Σ_C g^C_{A,B} a_A a_B |Hom(A,B)| / a_C = |Ext¹(A,B)| = q^{hom − ⟨Â,B̂⟩}`.
pub fn check_counting(cat: &RepCategory, a: ClassId, b: ClassId) -> Check {
    let id = format!("count[{} {}]", cat.class(a).key, cat.class(b).key);
    check_with(id, || {
        let hom = cat.hom_dim(a, b) as u32;
        let q = BigInt::from(cat.q());
        let ab = BigInt::from(cat.aut(a)) * BigInt::from(cat.aut(b)) * q.pow(hom);
        let mut lhs = BigRational::from_integer(BigInt::from(0));
        for c in cat.middle_candidates(a, b)? {
            lhs += BigRational::new(BigInt::from(cat.hall_number(a, b, c.id)?) * &ab, BigInt::from(c.aut_order));
        }
        let euler = cat.quiver().euler_form(&cat.kclass(a), &cat.kclass(b));
        let ext = Exponent::from_integer(hom as i64) - euler;
        if !ext.is_integer() || *ext.numer() < 0 {
            return Err(HallError::Internal(format!("dim Ext¹ = {ext} is not a nonnegative integer")));
        }
        let rhs = BigRational::from_integer(q.pow(*ext.numer() as u32));
        let res = &lhs - &rhs;
        Ok((lhs.to_string(), rhs.to_string(), res.to_string(), res == BigRational::from_integer(0.into())))
    })
}

/// Generators `E_S`, `F_S`, `K_{±Ŝ}` (and `K†_{±Ŝ}` in full mode) at every simple.
pub fn dh_generators(dh: &DoubleHall) -> Result<Vec<DhElement>> {
    let cat = dh.category();
    let quiver = cat.quiver();
    let mut out = Vec::new();
    for c in cat.classes_up_to(1)? {
        if c.id != ClassId::ZERO {
            out.push(dh.e(c.id));
            out.push(dh.f(c.id));
        }
    }
    for i in 0..quiver.num_vertices() {
        let s = quiver.simple_class(i);
        out.push(dh.k(s.clone()));
        out.push(dh.k(-&s));
        if !dh.is_reduced() {
            out.push(dh.kd(s.clone()));
            out.push(dh.kd(-&s));
        }
    }
    Ok(out)
}

fn dh_associativity(dh: &DoubleHall, tag: &str, x: &DhElement, y: &DhElement, z: &DhElement) -> Check {
    let cat = dh.category();
    let id = format!("dh-assoc[{tag}][{} | {} | {}]", x.render(cat), y.render(cat), z.render(cat));
    check_with(id, || {
        let lhs = dh.product(&dh.product(x, y)?, z)?;
        let rhs = dh.product(x, &dh.product(y, z)?)?;
        let res = lhs.sub(&rhs).normalize(cat.q());
        Ok((lhs.render(cat), rhs.render(cat), res.render(cat), res.is_empty()))
    })
}

/// A random normal monomial `E_A K_α F_B K†_β` with `A`, `B` of dimension at most one.
fn random_monomial(dh: &DoubleHall, cls: &[ClassId], rng: &mut ChaCha8Rng) -> DhElement {
    let cat = dh.category();
    let quiver = cat.quiver();
    let n = quiver.num_vertices();
    let mut kv = || {
        let mut v = crate::quiver::KVector::zero(n);
        for i in 0..n {
            let k = rng.gen_range(-1..=1);
            v += &quiver.simple_class(i).scaled(k);
        }
        v
    };
    let (alpha, beta) = (kv(), kv());
    let a = cls[rng.gen_range(0..cls.len())];
    let b = cls[rng.gen_range(0..cls.len())];
    let mut parts = vec![dh.e(a), dh.k(alpha), dh.f(b)];
    if !dh.is_reduced() {
        parts.push(dh.kd(beta));
    }
    dh.product_all(&parts).expect("monomials within bounds")
}

fn assoc(cat: &Arc<RepCategory>, config: &VerifyConfig) -> Result<Vec<Check>> {
    let max = config.dim(Suite::Assoc);
    let cls = cat.classes_up_to(max)?;
    let mut out = Vec::new();

    // structure constants: triples and pairs of total dimension ≤ max
    let mut triples = Vec::new();
    let mut pairs = Vec::new();
    for a in &cls {
        for b in &cls {
            if total(a) + total(b) > max {
                continue;
            }
            pairs.push((a.id, b.id));
            for c in &cls {
                if total(a) + total(b) + total(c) > max {
                    continue;
                }
                triples.push((a.id, b.id, c.id));
            }
        }
    }
    out.par_extend(triples.par_iter().map(|&(a, b, c)| check_hall_number_associativity(cat, a, b, c)));
    out.par_extend(pairs.par_iter().map(|&(a, b)| check_counting(cat, a, b)));

    // Hall algebra: triples, coproduct and pairing of total dimension ≤ min(max, 2)
    let h = HallAlgebra::new(cat.clone());
    let small: Vec<&Arc<IsoClass>> = cls.iter().filter(|c| total(c) <= max.min(2)).collect();
    let lim = max.min(2);
    triples.clear();
    for a in &small {
        for b in &small {
            for c in &small {
                if total(a) + total(b) + total(c) <= lim {
                    triples.push((a.id, b.id, c.id));
                }
            }
        }
    }
    out.par_extend(triples.par_iter().map(|&(a, b, c)| h.check_associativity(&h.class(a), &h.class(b), &h.class(c))));
    out.par_extend(small.par_iter().map(|c| h.check_coassociativity(&h.class(c.id))));
    let mut hopf = Vec::new();
    for a in &small {
        for b in &small {
            if total(a) + total(b) > lim {
                continue;
            }
            let dims: Vec<usize> = a.dims.iter().zip(&b.dims).map(|(x, y)| x + y).collect();
            for c in cat.classify(&dims)? {
                hopf.push((a.id, b.id, c.id));
            }
        }
    }
    out.par_extend(hopf.par_iter().map(|&(a, b, c)| h.check_hopf_compat(&h.class(a), &h.class(b), &h.class(c))));

    // straightening: generator triples and seeded random monomial triples, in both modes
    for reduced in [false, true] {
        let dh = DoubleHall::new(cat.clone(), reduced);
        let tag = if reduced { "red" } else { "full" };
        let gens = dh_generators(&dh)?;
        let mut jobs = Vec::new();
        for x in &gens {
            for y in &gens {
                for z in &gens {
                    jobs.push((x, y, z));
                }
            }
        }
        out.par_extend(jobs.par_iter().map(|(x, y, z)| dh_associativity(&dh, tag, x, y, z)));
        let ids: Vec<ClassId> = cat.classes_up_to(1)?.iter().map(|c| c.id).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let random: Vec<[DhElement; 3]> = (0..config.random_triples)
            .map(|_| std::array::from_fn(|_| random_monomial(&dh, &ids, &mut rng)))
            .collect();
        out.par_extend(random.par_iter().map(|[x, y, z]| dh_associativity(&dh, tag, x, y, z)));
    }
    Ok(out)
}

/// Straightening against the complex oracle on classes of dimension at most `max`.
fn oracle(cat: &Arc<RepCategory>, max: usize) -> Result<Vec<Check>> {
    let o = Oracle::new(cat.clone())?;
    let dh = DoubleHall::new(cat.clone(), false);
    let gens = cplx::generators(cat, max)?;
    let mut pairs = Vec::new();
    for x in &gens {
        for y in &gens {
            pairs.push((x, y));
        }
    }
    let mut out: Vec<Check> = pairs.par_iter().map(|(x, y)| cplx::check_product(&dh, &o, x, y)).collect();
    let cls = cat.classes_up_to(max)?;
    let ab: Vec<(ClassId, ClassId)> = cls.iter().flat_map(|a| cls.iter().map(move |b| (a.id, b.id))).collect();
    out.par_extend(ab.par_iter().map(|&(a, b)| cplx::check_e_ab(&dh, &o, a, b)));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quiver::zoo;
    use crate::uq::FPrefactor;

    fn cat(q: crate::Quiver, p: u32) -> Arc<RepCategory> {
        Arc::new(RepCategory::new(q, p).unwrap())
    }

    #[test]
    fn suites_parse_by_name() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("bogus".parse::<Suite>().is_err());
    }

    #[test]
    fn everything_passes_on_a1() {
        let r = run(&cat(zoo::a1(2), 2), Suite::All, &VerifyConfig::default()).unwrap();
        assert!(r.all_passed(), "{}", r.table());
        assert!(r.checks.iter().any(|c| c.id.starts_with("oracle")));
    }

    #[test]
    fn wrong_prefactor_is_caught() {
        let mut config = VerifyConfig::default();
        config.xi.f_prefactor = FPrefactor::MinusOne;
        let r = run(&cat(zoo::a1(3), 3), Suite::Relations, &config).unwrap();
        assert!(r.any_failed());
    }

    #[test]
    fn oracle_refuses_loops_but_all_skips_it() {
        let c = cat(zoo::l2(2, 2), 2);
        assert!(run(&c, Suite::Oracle, &VerifyConfig::default()).is_err());
        let config = VerifyConfig { max_dim: Some(1), random_triples: 5, ..VerifyConfig::default() };
        let r = run(&c, Suite::All, &config).unwrap();
        assert!(r.all_passed(), "{}", r.table());
    }

    #[test]
    fn too_few_simples_is_an_input_error() {
        let c = cat(zoo::l2(5, 2), 2);
        for suite in [Suite::Relations, Suite::Serre, Suite::All] {
            assert!(matches!(run(&c, suite, &VerifyConfig::default()), Err(HallError::ChargeTooLarge { .. })));
        }
        let config = VerifyConfig { max_dim: Some(1), ..VerifyConfig::default() };
        assert!(run(&c, Suite::Drinfeld, &config).unwrap().all_passed());
    }

    #[test]
    fn reports_are_deterministic() {
        let c = cat(zoo::a2(2), 2);
        let config = VerifyConfig { max_dim: Some(2), random_triples: 10, ..VerifyConfig::default() };
        let a = run(&c, Suite::Assoc, &config).unwrap();
        let b = run(&c, Suite::Assoc, &config).unwrap();
        assert_eq!(a, b);
    }
}

//! Realization of the quantum generalized Kac–Moody algebra inside `DH_red`
//! and exact verification of its defining relations.
//!
//! For each vertex `i` and `1 ≤ l ≤ m_i` a simple `S_il` is chosen (distinct
//! loop eigenvalues, lexicographically first), and
//!
//! ```text
//! Ξ(E_il) = E_{S_il} / (q−1)     Ξ(F_il) = −v F_{S_il} / (q−1)     Ξ(K_i^{±1}) = K_{±Ŝ_i}
//! ```

use rayon::prelude::*;
use serde::Serialize;

use crate::dh::{DhElement, DoubleHall};
use crate::error::{HallError, Result};
use crate::quiver::KVector;
use crate::repcat::ClassId;
use crate::report::{check_with, Check};
use crate::scalar::{quantum_binomial, rational, Scalar};

/// Prefactor of `Ξ(F)`; only `MinusV` gives a homomorphism.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FPrefactor {
    #[default]
    MinusV,
    /// Deliberately wrong; used as a negative control.
    MinusOne,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct XiConfig {
    pub f_prefactor: FPrefactor,
    /// Largest total dimension `(1−a_ij) + 1` for which a Serre relation is checked.
    pub serre_max_dim: usize,
}

impl Default for XiConfig {
    fn default() -> Self {
        XiConfig { f_prefactor: FPrefactor::MinusV, serre_max_dim: 4 }
    }
}

#[derive(Debug, Clone)]
pub struct Generator {
    pub vertex: usize,
    /// 1-based index `l ≤ m_i`.
    pub l: usize,
    pub lambda: Vec<u32>,
    pub simple: ClassId,
    pub e: DhElement,
    pub f: DhElement,
}

impl Generator {
    fn label(&self, ids: &[String]) -> String {
        format!("{}:{}", ids[self.vertex], self.l)
    }
}

#[derive(Debug, Clone)]
pub struct GeneratorTable {
    pub generators: Vec<Generator>,
    pub k: Vec<DhElement>,
    pub k_inv: Vec<DhElement>,
    /// Borcherds–Cartan matrix of the quiver.
    pub cartan: Vec<Vec<i64>>,
    ids: Vec<String>,
}

impl GeneratorTable {
    pub fn for_vertex(&self, i: usize) -> impl Iterator<Item = &Generator> {
        self.generators.iter().filter(move |g| g.vertex == i)
    }
}

/// The first `m` tuples of `F_p^c` in lexicographic order.
fn lex_tuples(c: u32, p: u32, m: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; c as usize];
    while (out.len() as u32) < m {
        out.push(cur.clone());
        // increment, last coordinate fastest
        let mut k = cur.len();
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            cur[k] += 1;
            if cur[k] < p {
                break;
            }
            cur[k] = 0;
        }
    }
    out
}

/// Builds `Ξ` on generators. `dh` must be in reduced mode.
pub fn build_generators(dh: &DoubleHall, config: &XiConfig) -> Result<GeneratorTable> {
    if !dh.is_reduced() {
        return Err(HallError::Mismatch("the quantum group lives in the reduced algebra".into()));
    }
    let cat = dh.category();
    let quiver = cat.quiver();
    let p = cat.p();
    quiver.check_charge(p)?;
    let q_minus_one = Scalar::from_rational(rational(1, cat.q() as i64 - 1));
    let f_scale = match config.f_prefactor {
        FPrefactor::MinusV => Scalar::v_int(1),
        FPrefactor::MinusOne => Scalar::one(),
    };
    let f_scale = -(&f_scale * &q_minus_one);
    let mut generators = Vec::new();
    let n = quiver.num_vertices();
    for (i, v) in quiver.vertices().iter().enumerate() {
        for (l, lambda) in lex_tuples(v.loops, p, v.charge).into_iter().enumerate() {
            let simple = cat.simple(i, &lambda)?;
            generators.push(Generator {
                vertex: i,
                l: l + 1,
                lambda,
                simple,
                e: dh.e(simple).scale(&q_minus_one),
                f: dh.f(simple).scale(&f_scale),
            });
        }
    }
    let k = (0..n).map(|i| dh.k(quiver.simple_class(i))).collect();
    let k_inv = (0..n).map(|i| dh.k(-&quiver.simple_class(i))).collect();
    let ids = quiver.vertices().iter().map(|v| v.id.clone()).collect();
    Ok(GeneratorTable { generators, k, k_inv, cartan: quiver.borcherds_cartan().matrix, ids })
}

fn compare(dh: &DoubleHall, id: String, f: impl FnOnce() -> Result<(DhElement, DhElement)>) -> Check {
    let cat = dh.category();
    check_with(id, || {
        let (l, r) = f()?;
        let res = l.sub(&r).normalize(cat.q());
        Ok((l.render(cat), r.render(cat), res.render(cat), res.is_empty()))
    })
}

type Job<'a> = Box<dyn Fn() -> Check + Send + Sync + 'a>;

fn run(jobs: Vec<Job<'_>>) -> Vec<Check> {
    jobs.par_iter().map(|j| j()).collect()
}

/// Relations for the `K`'s, conjugation, the commutator and commuting generators.
pub fn verify_relations(dh: &DoubleHall, t: &GeneratorTable) -> Vec<Check> {
    let n = t.k.len();
    let ids = &t.ids;
    let mut jobs: Vec<Job<'_>> = Vec::new();
    for i in 0..n {
        jobs.push(Box::new(move || {
            compare(dh, format!("E01[{}] K K^-1", ids[i]), || Ok((dh.product(&t.k[i], &t.k_inv[i])?, dh.one())))
        }));
        jobs.push(Box::new(move || {
            compare(dh, format!("E01[{}] K^-1 K", ids[i]), || Ok((dh.product(&t.k_inv[i], &t.k[i])?, dh.one())))
        }));
        for j in i + 1..n {
            jobs.push(Box::new(move || {
                compare(dh, format!("E01[{},{}] commute", ids[i], ids[j]), || {
                    Ok((dh.product(&t.k[i], &t.k[j])?, dh.product(&t.k[j], &t.k[i])?))
                })
            }));
        }
    }
    for i in 0..n {
        for g in &t.generators {
            let a = t.cartan[i][g.vertex];
            jobs.push(Box::new(move || {
                compare(dh, format!("E02[{}; {}] E", ids[i], g.label(ids)), || {
                    let lhs = dh.product_all(&[t.k[i].clone(), g.e.clone(), t.k_inv[i].clone()])?;
                    Ok((lhs, g.e.scale(&Scalar::v_int(a)).normalize(dh.category().q())))
                })
            }));
            jobs.push(Box::new(move || {
                compare(dh, format!("E02[{}; {}] F", ids[i], g.label(ids)), || {
                    let lhs = dh.product_all(&[t.k[i].clone(), g.f.clone(), t.k_inv[i].clone()])?;
                    Ok((lhs, g.f.scale(&Scalar::v_int(-a)).normalize(dh.category().q())))
                })
            }));
        }
    }
    for x in &t.generators {
        for y in &t.generators {
            jobs.push(Box::new(move || {
                compare(dh, format!("E03[{}, {}]", x.label(ids), y.label(ids)), || {
                    // multiplied through by v − v⁻¹
                    let lhs = dh.commutator(&x.e, &y.f)?.scale(&(&Scalar::v_int(1) - &Scalar::v_int(-1)));
                    let rhs = if x.vertex == y.vertex && x.l == y.l {
                        t.k[x.vertex].sub(&t.k_inv[x.vertex])
                    } else {
                        DhElement::zero()
                    };
                    Ok((lhs.normalize(dh.category().q()), rhs))
                })
            }));
        }
    }
    for (a, x) in t.generators.iter().enumerate() {
        for y in &t.generators[a + 1..] {
            if t.cartan[x.vertex][y.vertex] != 0 {
                continue;
            }
            jobs.push(Box::new(move || {
                compare(dh, format!("E05[{}, {}] E", x.label(ids), y.label(ids)), || {
                    Ok((dh.commutator(&x.e, &y.e)?, DhElement::zero()))
                })
            }));
            jobs.push(Box::new(move || {
                compare(dh, format!("E05[{}, {}] F", x.label(ids), y.label(ids)), || {
                    Ok((dh.commutator(&x.f, &y.f)?, DhElement::zero()))
                })
            }));
        }
    }
    run(jobs)
}

/// `Σ_n (−1)^n [N; n] x^{N−n} y x^n` with `N = 1 − a_ij`.
pub fn serre_element(dh: &DoubleHall, x: &DhElement, y: &DhElement, big_n: u32) -> Result<DhElement> {
    let mut out = DhElement::zero();
    for n in 0..=big_n {
        let mut factors = vec![x.clone(); (big_n - n) as usize];
        factors.push(y.clone());
        factors.extend(std::iter::repeat(x.clone()).take(n as usize));
        let sign = if n % 2 == 0 { Scalar::one() } else { Scalar::from_int(-1) };
        let c = &sign * &quantum_binomial(big_n, n);
        out.add_assign(&dh.product_all(&factors)?.scale(&c));
    }
    Ok(out.normalize(dh.category().q()))
}

/// Quantum Serre relations for real `i ≠ j`, both `E` and `F` type.
pub fn verify_serre(dh: &DoubleHall, t: &GeneratorTable, config: &XiConfig) -> Vec<Check> {
    let ids = &t.ids;
    let mut jobs: Vec<Job<'_>> = Vec::new();
    for x in &t.generators {
        if t.cartan[x.vertex][x.vertex] != 2 {
            continue;
        }
        for y in &t.generators {
            if y.vertex == x.vertex {
                continue;
            }
            let big_n = (1 - t.cartan[x.vertex][y.vertex]) as u32;
            for (kind, gx, gy) in [("E", &x.e, &y.e), ("F", &x.f, &y.f)] {
                let id = format!("E04[{}, {}] {kind}", x.label(ids), y.label(ids));
                jobs.push(Box::new(move || {
                    if big_n as usize + 1 > config.serre_max_dim {
                        let e = HallError::EnumerationTooLarge(format!(
                            "Serre relation of degree {} exceeds the cap {}",
                            big_n as usize + 1,
                            config.serre_max_dim
                        ));
                        return Check::from_error(id.clone(), &e);
                    }
                    compare(dh, id.clone(), || Ok((serre_element(dh, gx, gy, big_n)?, DhElement::zero())))
                }));
            }
        }
    }
    run(jobs)
}

/// `K(R)`-degree of a homogeneous element, if it is homogeneous.
pub fn degree(dh: &DoubleHall, x: &DhElement) -> Option<KVector> {
    let cat = dh.category();
    let mut deg: Option<KVector> = None;
    for (m, _) in x.terms() {
        let d = &cat.kclass(m.e) - &cat.kclass(m.f);
        match &deg {
            None => deg = Some(d),
            Some(e) if *e == d => {}
            Some(_) => return None,
        }
    }
    deg
}

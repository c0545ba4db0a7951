//! Representations, morphisms and the linear algebra of `Hom` and `Ext¹`.

use serde::Serialize;

use crate::error::{HallError, Result};
use crate::fp::Matrix;
use crate::quiver::Quiver;

/// A finite-dimensional representation: one space per vertex, one matrix per arrow.
///
/// The matrix of an arrow `σ` has shape `d_{h(σ)} × d_{t(σ)}` and acts on
/// column vectors. Arrows follow [`Quiver::arrows`] order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rep {
    dims: Vec<usize>,
    mats: Vec<Matrix>,
}

/// A morphism of representations, one matrix per vertex.
pub type Morphism = Vec<Matrix>;

impl Rep {
    pub fn new(q: &Quiver, dims: Vec<usize>, mats: Vec<Matrix>, p: u32) -> Result<Rep> {
        if dims.len() != q.num_vertices() {
            return Err(HallError::Mismatch(format!(
                "dimension vector has {} entries, quiver has {} vertices",
                dims.len(),
                q.num_vertices()
            )));
        }
        if mats.len() != q.arrows().len() {
            return Err(HallError::Mismatch(format!("expected {} arrow matrices, got {}", q.arrows().len(), mats.len())));
        }
        for (k, (a, m)) in q.arrows().iter().zip(&mats).enumerate() {
            if m.shape() != (dims[a.head], dims[a.tail]) {
                return Err(HallError::Mismatch(format!("arrow {k} has shape {:?}", m.shape())));
            }
            if m.data().iter().any(|&x| x >= p) {
                return Err(HallError::Mismatch(format!("arrow {k} has entries outside F_{p}")));
            }
        }
        Ok(Rep { dims, mats })
    }

    pub(crate) fn from_parts_unchecked(dims: Vec<usize>, mats: Vec<Matrix>) -> Rep {
        Rep { dims, mats }
    }

    pub fn zero(q: &Quiver) -> Rep {
        Self::with_zero_maps(q, vec![0; q.num_vertices()])
    }

    /// All arrow matrices zero.
    pub fn with_zero_maps(q: &Quiver, dims: Vec<usize>) -> Rep {
        let mats = q.arrows().iter().map(|a| Matrix::zeros(dims[a.head], dims[a.tail])).collect();
        Rep { dims, mats }
    }

    /// The simple at vertex `i` whose loops act by the scalars `lambda`.
    pub fn simple(q: &Quiver, i: usize, lambda: &[u32]) -> Rep {
        let mut dims = vec![0; q.num_vertices()];
        dims[i] = 1;
        let mut k = 0;
        let mats = q
            .arrows()
            .iter()
            .map(|a| {
                let mut m = Matrix::zeros(dims[a.head], dims[a.tail]);
                if a.tail == i && a.head == i {
                    m.set(0, 0, lambda.get(k).copied().unwrap_or(0));
                    k += 1;
                }
                m
            })
            .collect();
        Rep { dims, mats }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn mats(&self) -> &[Matrix] {
        &self.mats
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.total_dim() == 0
    }

    pub fn direct_sum(&self, q: &Quiver, other: &Rep) -> Rep {
        let dims: Vec<usize> = self.dims.iter().zip(&other.dims).map(|(a, b)| a + b).collect();
        let mats = q
            .arrows()
            .iter()
            .zip(self.mats.iter().zip(&other.mats))
            .map(|(a, (x, y))| {
                let mut m = Matrix::zeros(dims[a.head], dims[a.tail]);
                m.paste(0, 0, x);
                m.paste(x.rows(), x.cols(), y);
                m
            })
            .collect();
        Rep { dims, mats }
    }

    /// `x_σ ↦ g_{h(σ)} x_σ g_{t(σ)}^{-1}`.
    pub fn base_change(&self, q: &Quiver, g: &[Matrix], p: u32) -> Result<Rep> {
        let inv: Vec<Matrix> = g
            .iter()
            .map(|m| m.inverse(p).ok_or_else(|| HallError::Mismatch("base change is not invertible".into())))
            .collect::<Result<_>>()?;
        let mats = q
            .arrows()
            .iter()
            .zip(&self.mats)
            .map(|(a, x)| g[a.head].mul(x, p).mul(&inv[a.tail], p))
            .collect();
        Ok(Rep { dims: self.dims.clone(), mats })
    }

    /// Number of matrix entries, the length of [`Rep::digits`].
    pub fn data_len(q: &Quiver, dims: &[usize]) -> usize {
        q.arrows().iter().map(|a| dims[a.head] * dims[a.tail]).sum()
    }

    /// All matrix entries, arrow by arrow, row-major.
    pub fn digits(&self) -> Vec<u32> {
        self.mats.iter().flat_map(|m| m.data().iter().copied()).collect()
    }

    pub fn from_digits(q: &Quiver, dims: &[usize], digits: &[u32]) -> Rep {
        let mut k = 0;
        let mats = q
            .arrows()
            .iter()
            .map(|a| {
                let (r, c) = (dims[a.head], dims[a.tail]);
                let m = Matrix::from_vec(r, c, digits[k..k + r * c].to_vec());
                k += r * c;
                m
            })
            .collect();
        Rep { dims: dims.to_vec(), mats }
    }

    pub fn is_morphism(q: &Quiver, a: &Rep, b: &Rep, phi: &[Matrix], p: u32) -> bool {
        q.arrows().iter().enumerate().all(|(k, arr)| {
            phi[arr.head].mul(&a.mats[k], p) == b.mats[k].mul(&phi[arr.tail], p)
        })
    }
}

/// JSON-friendly rendering of a representation.
#[derive(Debug, Clone, Serialize)]
pub struct RepDump {
    pub dims: Vec<usize>,
    pub mats: Vec<Vec<Vec<u32>>>,
}

impl From<&Rep> for RepDump {
    fn from(r: &Rep) -> Self {
        RepDump {
            dims: r.dims.clone(),
            mats: r.mats.iter().map(|m| (0..m.rows()).map(|i| m.row(i).to_vec()).collect()).collect(),
        }
    }
}

/// Offsets of the per-vertex blocks of `⊕_i Hom(A_i, B_i)` in coordinates.
fn hom_offsets(a: &Rep, b: &Rep) -> Vec<usize> {
    let mut off = vec![0];
    for i in 0..a.dims.len() {
        let last = *off.last().unwrap();
        off.push(last + b.dims[i] * a.dims[i]);
    }
    off
}

/// The map `⊕_i Hom(A_i, B_i) → ⊕_σ Hom(A_{t(σ)}, B_{h(σ)})`,
/// `φ ↦ (φ_h x^A_σ − x^B_σ φ_t)_σ`. Its kernel is `Hom(A, B)`, its cokernel `Ext¹(A, B)`.
pub fn hom_constraint_matrix(q: &Quiver, a: &Rep, b: &Rep, p: u32) -> Matrix {
    let off = hom_offsets(a, b);
    let nvars = *off.last().unwrap();
    let neqs: usize = q.arrows().iter().map(|s| b.dims[s.head] * a.dims[s.tail]).sum();
    let mut m = Matrix::zeros(neqs, nvars);
    let mut row = 0;
    for (k, s) in q.arrows().iter().enumerate() {
        let (t, h) = (s.tail, s.head);
        let xa = &a.mats[k];
        let xb = &b.mats[k];
        for r in 0..b.dims[h] {
            for c in 0..a.dims[t] {
                // (φ_h x^A)[r,c] = Σ_k φ_h[r,k] xa[k,c]
                for kk in 0..a.dims[h] {
                    let var = off[h] + r * a.dims[h] + kk;
                    let v = (m.get(row, var) + xa.get(kk, c)) % p;
                    m.set(row, var, v);
                }
                // (x^B φ_t)[r,c] = Σ_k xb[r,k] φ_t[k,c]
                for kk in 0..b.dims[t] {
                    let var = off[t] + kk * a.dims[t] + c;
                    let v = (m.get(row, var) + p - xb.get(r, kk)) % p;
                    m.set(row, var, v);
                }
                row += 1;
            }
        }
    }
    m
}

fn unpack_morphism(a: &Rep, b: &Rep, v: &[u32]) -> Morphism {
    let off = hom_offsets(a, b);
    (0..a.dims.len())
        .map(|i| Matrix::from_vec(b.dims[i], a.dims[i], v[off[i]..off[i + 1]].to_vec()))
        .collect()
}

/// Basis of `Hom(A, B)`.
pub fn hom_basis(q: &Quiver, a: &Rep, b: &Rep, p: u32) -> Vec<Morphism> {
    let m = hom_constraint_matrix(q, a, b, p);
    m.kernel(p).iter().map(|v| unpack_morphism(a, b, v)).collect()
}

pub fn hom_dim(q: &Quiver, a: &Rep, b: &Rep, p: u32) -> usize {
    let m = hom_constraint_matrix(q, a, b, p);
    m.cols() - m.rank(p)
}

/// `dim Ext¹(A, B)` as the cokernel of the standard-resolution map.
pub fn ext_dim_by_cokernel(q: &Quiver, a: &Rep, b: &Rep, p: u32) -> usize {
    let m = hom_constraint_matrix(q, a, b, p);
    m.rows() - m.rank(p)
}

/// Linear combination `Σ c_k φ_k` of morphisms.
pub fn combine(basis: &[Morphism], coeffs: &[u32], p: u32) -> Option<Morphism> {
    let first = basis.first()?;
    let mut out: Morphism = first.iter().map(|m| Matrix::zeros(m.rows(), m.cols())).collect();
    for (phi, &c) in basis.iter().zip(coeffs) {
        if c == 0 {
            continue;
        }
        for (o, m) in out.iter_mut().zip(phi) {
            *o = o.add(&m.scale(c, p), p);
        }
    }
    Some(out)
}

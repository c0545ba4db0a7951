//! Subspaces, subrepresentations and morphism arithmetic used by the complex oracle.

use crate::fp::Matrix;
use crate::quiver::Quiver;
use crate::repcat::{Morphism, Rep};

/// Row basis of `{x : m x = 0}`.
pub(crate) fn kernel_rows(m: &Matrix, p: u32) -> Matrix {
    let k = m.kernel(p);
    let mut out = Matrix::zeros(k.len(), m.cols());
    for (r, v) in k.iter().enumerate() {
        for (c, &x) in v.iter().enumerate() {
            out.set(r, c, x);
        }
    }
    out
}

/// Row basis of the column space of `m`.
pub(crate) fn image_rows(m: &Matrix, p: u32) -> Matrix {
    m.transpose().row_space(p)
}

/// Coordinates of `v` in the row basis `basis`.
pub(crate) fn coords(basis: &Matrix, v: &[u32], p: u32) -> Vec<u32> {
    basis.transpose().solve(v, p).expect("vector lies in the span")
}

/// Rows of `outer` completing `inner` to a basis of their joint span.
pub(crate) fn complement(outer: &Matrix, inner: &Matrix, p: u32) -> Matrix {
    let mut acc = inner.clone();
    let mut keep = Vec::new();
    for r in 0..outer.rows() {
        let trial = acc.vstack(&outer.select_rows(&[r]));
        if trial.rank(p) > acc.rank(p) {
            acc = trial;
            keep.push(r);
        }
    }
    outer.select_rows(&keep)
}

/// The subrepresentation spanned by arrow-stable row bases, with its inclusion.
pub(crate) fn subrep(q: &Quiver, rep: &Rep, basis: &[Matrix], p: u32) -> (Rep, Morphism) {
    let dims: Vec<usize> = basis.iter().map(Matrix::rows).collect();
    let mats = q
        .arrows()
        .iter()
        .zip(rep.mats())
        .map(|(a, x)| {
            let mut m = Matrix::zeros(dims[a.head], dims[a.tail]);
            for j in 0..dims[a.tail] {
                let w = x.apply(basis[a.tail].row(j), p);
                for (r, c) in coords(&basis[a.head], &w, p).into_iter().enumerate() {
                    m.set(r, j, c);
                }
            }
            m
        })
        .collect();
    let incl = basis.iter().map(Matrix::transpose).collect();
    (Rep::from_parts_unchecked(dims, mats), incl)
}

/// `outer / inner` for arrow-stable row bases with `inner ⊆ outer`.
pub(crate) fn subquotient(q: &Quiver, rep: &Rep, outer: &[Matrix], inner: &[Matrix], p: u32) -> Rep {
    let comp: Vec<Matrix> = outer.iter().zip(inner).map(|(o, i)| complement(o, i, p)).collect();
    let full: Vec<Matrix> = inner.iter().zip(&comp).map(|(i, c)| i.vstack(c)).collect();
    let dims: Vec<usize> = comp.iter().map(Matrix::rows).collect();
    let mats = q
        .arrows()
        .iter()
        .zip(rep.mats())
        .map(|(a, x)| {
            let skip = inner[a.head].rows();
            let mut m = Matrix::zeros(dims[a.head], dims[a.tail]);
            for j in 0..dims[a.tail] {
                let w = x.apply(comp[a.tail].row(j), p);
                let z = coords(&full[a.head], &w, p);
                for r in 0..dims[a.head] {
                    m.set(r, j, z[skip + r]);
                }
            }
            m
        })
        .collect();
    Rep::from_parts_unchecked(dims, mats)
}

/// Coordinates of the rows of `sub` in the row basis `sup`, as a `sup.rows() × sub.rows()` matrix.
pub(crate) fn inclusion_matrix(sub: &Matrix, sup: &Matrix, p: u32) -> Matrix {
    let mut m = Matrix::zeros(sup.rows(), sub.rows());
    for j in 0..sub.rows() {
        for (r, c) in coords(sup, sub.row(j), p).into_iter().enumerate() {
            m.set(r, j, c);
        }
    }
    m
}

pub(crate) fn zero_morphism(src: &Rep, dst: &Rep) -> Morphism {
    src.dims().iter().zip(dst.dims()).map(|(&s, &d)| Matrix::zeros(d, s)).collect()
}

pub(crate) fn identity_morphism(rep: &Rep) -> Morphism {
    rep.dims().iter().map(|&d| Matrix::identity(d)).collect()
}

/// `a ∘ b`.
pub(crate) fn compose(a: &Morphism, b: &Morphism, p: u32) -> Morphism {
    a.iter().zip(b).map(|(x, y)| x.mul(y, p)).collect()
}

pub(crate) fn add(a: &Morphism, b: &Morphism, p: u32) -> Morphism {
    a.iter().zip(b).map(|(x, y)| x.add(y, p)).collect()
}

pub(crate) fn neg(a: &Morphism, p: u32) -> Morphism {
    a.iter().map(|x| x.neg(p)).collect()
}

pub(crate) fn scale(a: &Morphism, c: u32, p: u32) -> Morphism {
    a.iter().map(|x| x.scale(c, p)).collect()
}

pub(crate) fn is_zero(a: &Morphism) -> bool {
    a.iter().all(Matrix::is_zero)
}

pub(crate) fn flatten(parts: &[&Morphism]) -> Vec<u32> {
    parts.iter().flat_map(|m| m.iter().flat_map(|x| x.data().iter().copied())).collect()
}

/// Block morphism `[[a, b], [0, d]]` between direct sums.
pub(crate) fn upper_block(a: &Morphism, b: &Morphism, d: &Morphism) -> Morphism {
    a.iter()
        .zip(b)
        .zip(d)
        .map(|((a, b), d)| Matrix::block(a, b, &Matrix::zeros(d.rows(), a.cols()), d))
        .collect()
}

/// Rank vector of a morphism, vertex by vertex.
pub(crate) fn rank_dims(a: &Morphism, p: u32) -> Vec<usize> {
    a.iter().map(|x| x.rank(p)).collect()
}

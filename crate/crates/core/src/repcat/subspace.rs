//! Subrepresentations as arrow-stable tuples of subspaces.
//!
//! Each vertex space is given all its subspaces as reduced echelon row
//! bases; tuples are built vertex by vertex and pruned as soon as an arrow
//! between two assigned vertices fails to preserve them.

use crate::error::{HallError, Result};
use crate::fp::Matrix;
use crate::quiver::Quiver;

use super::rep::Rep;

/// Pivot columns of a reduced echelon basis.
fn pivots(basis: &Matrix) -> Vec<usize> {
    (0..basis.rows())
        .map(|r| basis.row(r).iter().position(|&x| x != 0).expect("echelon rows are nonzero"))
        .collect()
}

/// Reduces `v` modulo the span of `basis`; the result vanishes on pivot columns.
fn reduce(basis: &Matrix, piv: &[usize], v: &mut [u32], p: u32) {
    for (r, &c) in piv.iter().enumerate() {
        let f = v[c];
        if f == 0 {
            continue;
        }
        for (k, x) in v.iter_mut().enumerate() {
            *x = (*x + (p - f) * basis.get(r, k)) % p;
        }
    }
}

fn column(m: &Matrix, c: usize) -> Vec<u32> {
    (0..m.rows()).map(|r| m.get(r, c)).collect()
}

/// Whether `x` maps the row span of `src` into the row span of `dst`.
fn preserves(x: &Matrix, src: &Matrix, dst: &Matrix, p: u32) -> bool {
    let piv = pivots(dst);
    (0..src.rows()).all(|r| {
        let mut w = x.apply(src.row(r), p);
        reduce(dst, &piv, &mut w, p);
        w.iter().all(|&e| e == 0)
    })
}

/// All arrow-stable subspace tuples of `rep`.
pub(crate) fn stable_tuples(
    q: &Quiver,
    rep: &Rep,
    p: u32,
    subspaces: &dyn Fn(usize) -> std::sync::Arc<Vec<Matrix>>,
    max_candidates: u64,
) -> Result<Vec<Vec<Matrix>>> {
    let n = q.num_vertices();
    let lists: Vec<_> = rep.dims().iter().map(|&d| subspaces(d)).collect();
    let candidates = lists.iter().try_fold(1u64, |acc, l| acc.checked_mul(l.len() as u64));
    if candidates.map_or(true, |c| c > max_candidates) {
        return Err(HallError::EnumerationTooLarge(format!(
            "subspace tuples of a representation with dimension vector {:?}",
            rep.dims()
        )));
    }
    // arrows checked once both endpoints are assigned, i.e. at max(tail, head)
    let mut checks: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (k, a) in q.arrows().iter().enumerate() {
        checks[a.tail.max(a.head)].push(k);
    }
    let mut out = Vec::new();
    let mut cur: Vec<Matrix> = Vec::with_capacity(n);
    fn go(
        i: usize,
        q: &Quiver,
        rep: &Rep,
        p: u32,
        lists: &[std::sync::Arc<Vec<Matrix>>],
        checks: &[Vec<usize>],
        cur: &mut Vec<Matrix>,
        out: &mut Vec<Vec<Matrix>>,
    ) {
        if i == lists.len() {
            out.push(cur.clone());
            return;
        }
        for u in lists[i].iter() {
            cur.push(u.clone());
            let ok = checks[i].iter().all(|&k| {
                let a = q.arrows()[k];
                preserves(&rep.mats()[k], &cur[a.tail], &cur[a.head], p)
            });
            if ok {
                go(i + 1, q, rep, p, lists, checks, cur, out);
            }
            cur.pop();
        }
    }
    go(0, q, rep, p, &lists, &checks, &mut cur, &mut out);
    Ok(out)
}

/// The subrepresentation on a stable tuple and the quotient by it.
pub(crate) fn sub_and_quotient(q: &Quiver, rep: &Rep, tuple: &[Matrix], p: u32) -> (Rep, Rep) {
    let piv: Vec<Vec<usize>> = tuple.iter().map(pivots).collect();
    let free: Vec<Vec<usize>> = rep
        .dims()
        .iter()
        .zip(&piv)
        .map(|(&d, pv)| (0..d).filter(|c| !pv.contains(c)).collect())
        .collect();
    let sub_dims: Vec<usize> = tuple.iter().map(|u| u.rows()).collect();
    let quo_dims: Vec<usize> = free.iter().map(|f| f.len()).collect();
    let mut sub_mats = Vec::new();
    let mut quo_mats = Vec::new();
    for (k, a) in q.arrows().iter().enumerate() {
        let x = &rep.mats()[k];
        let (t, h) = (a.tail, a.head);
        // coordinates of an element of U_h are its pivot entries
        let mut s = Matrix::zeros(sub_dims[h], sub_dims[t]);
        for j in 0..sub_dims[t] {
            let w = x.apply(tuple[t].row(j), p);
            for (r, &c) in piv[h].iter().enumerate() {
                s.set(r, j, w[c]);
            }
        }
        // quotient basis: images of the standard vectors at free columns
        let mut m = Matrix::zeros(quo_dims[h], quo_dims[t]);
        for (j, &c) in free[t].iter().enumerate() {
            let mut w = column(x, c);
            reduce(&tuple[h], &piv[h], &mut w, p);
            for (r, &fc) in free[h].iter().enumerate() {
                m.set(r, j, w[fc]);
            }
        }
        sub_mats.push(s);
        quo_mats.push(m);
    }
    (Rep::from_parts_unchecked(sub_dims, sub_mats), Rep::from_parts_unchecked(quo_dims, quo_mats))
}

//! Isomorphism classification by orbit enumeration.
//!
//! A representation with fixed dimension vector is a tuple of matrices,
//! encoded as a base-`p` integer with the first entry most significant, so
//! numeric order on codes is lexicographic order on tuples. Scanning codes
//! upwards and flooding each new orbit under generators of `∏ GL_{d_i}`
//! visits every orbit exactly once, starting from its least element.

use std::collections::VecDeque;

use crate::error::{HallError, Result};
use crate::fp::{gl_order, primitive_root, Matrix};
use crate::quiver::Quiver;

use super::rep::Rep;

/// A linear map on digit vectors, stored as sparse columns.
struct DigitMap {
    cols: Vec<Vec<(usize, u32)>>,
}

pub(crate) struct OrbitTable {
    pub len: usize,
    /// Class index of every code.
    pub class_of: Vec<u32>,
    /// Least code of each orbit, in increasing order.
    pub reps: Vec<u64>,
    pub orbit_sizes: Vec<u64>,
    pub group_order: u128,
}

pub(crate) fn encode(digits: &[u32], p: u32) -> u64 {
    digits.iter().fold(0u64, |acc, &d| acc * p as u64 + d as u64)
}

pub(crate) fn decode(mut code: u64, len: usize, p: u32, out: &mut [u32]) {
    for k in (0..len).rev() {
        out[k] = (code % p as u64) as u32;
        code /= p as u64;
    }
}

/// Generators of `GL_n(F_p)`: elementary transvections and, for odd `p`,
/// one diagonal matrix with a primitive root.
fn gl_generators(n: usize, p: u32) -> Vec<Matrix> {
    let mut gens = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let mut g = Matrix::identity(n);
                g.set(i, j, 1);
                gens.push(g);
            }
        }
    }
    if p > 2 && n > 0 {
        let mut g = Matrix::identity(n);
        g.set(0, 0, primitive_root(p));
        gens.push(g);
    }
    gens
}

fn digit_map(q: &Quiver, dims: &[usize], vertex: usize, g: &Matrix, p: u32) -> DigitMap {
    let len = Rep::data_len(q, dims);
    let ginv = g.inverse(p).expect("generator is invertible");
    let mut cols = Vec::with_capacity(len);
    let mut unit = vec![0u32; len];
    for pos in 0..len {
        unit[pos] = 1;
        let rep = Rep::from_digits(q, dims, &unit);
        let mats: Vec<Matrix> = q
            .arrows()
            .iter()
            .zip(rep.mats())
            .map(|(a, x)| {
                let mut y = x.clone();
                if a.head == vertex {
                    y = g.mul(&y, p);
                }
                if a.tail == vertex {
                    y = y.mul(&ginv, p);
                }
                y
            })
            .collect();
        let image = Rep::from_parts_unchecked(dims.to_vec(), mats).digits();
        cols.push(image.iter().enumerate().filter(|(_, &x)| x != 0).map(|(k, &x)| (k, x)).collect());
        unit[pos] = 0;
    }
    DigitMap { cols }
}

pub(crate) fn candidate_count(len: usize, p: u32) -> Option<u64> {
    (p as u64).checked_pow(len as u32)
}

pub(crate) fn build_table(q: &Quiver, dims: &[usize], p: u32, max_candidates: u64) -> Result<OrbitTable> {
    let len = Rep::data_len(q, dims);
    let total = candidate_count(len, p)
        .filter(|&n| n <= max_candidates)
        .ok_or_else(|| {
            HallError::EnumerationTooLarge(format!(
                "dimension vector {dims:?} has {p}^{len} representation tuples (bound {max_candidates})"
            ))
        })?;
    let mut maps = Vec::new();
    for (i, &d) in dims.iter().enumerate() {
        for g in gl_generators(d, p) {
            let m = digit_map(q, dims, i, &g, p);
            // generators acting trivially (no arrows touch the vertex) are skipped
            let trivial = m.cols.iter().enumerate().all(|(k, c)| c.len() == 1 && c[0] == (k, 1));
            if !trivial {
                maps.push(m);
            }
        }
    }
    let group_order: u128 = dims.iter().map(|&d| gl_order(d, p as u64)).product();

    const UNSEEN: u32 = u32::MAX;
    let mut class_of = vec![UNSEEN; total as usize];
    let mut reps = Vec::new();
    let mut orbit_sizes = Vec::new();
    let mut queue = VecDeque::new();
    let mut digits = vec![0u32; len];
    let mut image = vec![0u64; len];
    let mut out = vec![0u32; len];
    for start in 0..total {
        if class_of[start as usize] != UNSEEN {
            continue;
        }
        let idx = reps.len() as u32;
        reps.push(start);
        class_of[start as usize] = idx;
        queue.push_back(start);
        let mut size = 0u64;
        while let Some(code) = queue.pop_front() {
            size += 1;
            decode(code, len, p, &mut digits);
            for m in &maps {
                image.iter_mut().for_each(|x| *x = 0);
                for (pos, &d) in digits.iter().enumerate() {
                    if d == 0 {
                        continue;
                    }
                    for &(k, c) in &m.cols[pos] {
                        image[k] += d as u64 * c as u64;
                    }
                }
                for (o, &x) in out.iter_mut().zip(&image) {
                    *o = (x % p as u64) as u32;
                }
                let next = encode(&out, p);
                if class_of[next as usize] == UNSEEN {
                    class_of[next as usize] = idx;
                    queue.push_back(next);
                }
            }
        }
        if group_order % size as u128 != 0 {
            return Err(HallError::Internal(format!("orbit of size {size} does not divide the group order")));
        }
        orbit_sizes.push(size);
    }
    Ok(OrbitTable { len, class_of, reps, orbit_sizes, group_order })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quiver::zoo;

    #[test]
    fn counts_match_known_classifications() {
        // A1 has one class per dimension
        assert_eq!(build_table(&zoo::a1(3), &[2], 3, 1 << 20).unwrap().reps.len(), 1);
        // L2 simples over F2 are indexed by F2^2
        assert_eq!(build_table(&zoo::l2(1, 2), &[1], 2, 1 << 20).unwrap().reps.len(), 4);
        // A2 at (1,1): split and indecomposable
        assert_eq!(build_table(&zoo::a2(2), &[1, 1], 2, 1 << 20).unwrap().reps.len(), 2);
        // Kronecker at (1,1): zero map plus the projective line P^1(F_q)
        assert_eq!(build_table(&zoo::kronecker(3), &[1, 1], 3, 1 << 20).unwrap().reps.len(), 5);
    }

    #[test]
    fn orbits_partition_all_tuples() {
        for (q, dims, p) in [(zoo::l2(1, 2), vec![2], 2u32), (zoo::kronecker(2), vec![2, 1], 2), (zoo::a2(3), vec![2, 2], 3)] {
            let t = build_table(&q, &dims, p, 1 << 24).unwrap();
            let total: u64 = t.orbit_sizes.iter().sum();
            assert_eq!(total, (p as u64).pow(t.len as u32));
            for (k, &r) in t.reps.iter().enumerate() {
                assert_eq!(t.class_of[r as usize], k as u32);
                assert!(t.class_of[..r as usize].iter().all(|&c| c != k as u32), "representative is the least code");
            }
        }
    }

    #[test]
    fn respects_candidate_bound() {
        let err = build_table(&zoo::l2(1, 2), &[3], 2, 1000).err().unwrap();
        assert!(err.is_bound());
    }
}

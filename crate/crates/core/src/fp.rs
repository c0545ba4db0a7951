//! Dense linear algebra over a prime field `F_p`.
//!
//! Matrices do not carry their modulus; every operation that reduces takes
//! `p` explicitly. Entries are always kept in `0..p`.

use std::fmt;

/// Multiplicative inverse of a nonzero `a` modulo prime `p`.
pub fn inv_mod(a: u32, p: u32) -> u32 {
    debug_assert!(a % p != 0, "zero has no inverse");
    pow_mod(a, p - 2, p)
}

pub fn pow_mod(a: u32, mut e: u32, p: u32) -> u32 {
    let mut acc = 1u64;
    let mut base = (a % p) as u64;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p as u64;
        }
        base = base * base % p as u64;
        e >>= 1;
    }
    acc as u32
}

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Smallest generator of `F_p^×`.
pub fn primitive_root(p: u32) -> u32 {
    if p == 2 {
        return 1;
    }
    let phi = p - 1;
    let mut factors = Vec::new();
    let mut n = phi;
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            factors.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        factors.push(n);
    }
    (2..p)
        .find(|&g| factors.iter().all(|&f| pow_mod(g, phi / f, p) != 1))
        .expect("prime fields have primitive roots")
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for r in 0..self.rows {
            if r > 0 {
                write!(f, "; ")?;
            }
            let row: Vec<String> = self.row(r).iter().map(|x| x.to_string()).collect();
            write!(f, "{}", row.join(" "))?;
        }
        write!(f, "]({}x{})", self.rows, self.cols)
    }
}

/// Result of row reduction: the reduced matrix and its pivot columns.
#[derive(Debug, Clone)]
pub struct Echelon {
    pub matrix: Matrix,
    pub pivots: Vec<usize>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn scalar(n: usize, c: u32) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, c);
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<u32>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data has the wrong length");
        Self { rows, cols, data }
    }

    /// Builds a matrix from rows, reducing entries modulo `p`.
    pub fn from_rows(rows: &[Vec<i64>], cols: usize, p: u32) -> Self {
        let mut m = Self::zeros(rows.len(), cols);
        for (r, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), cols);
            for (c, &x) in row.iter().enumerate() {
                m.set(r, c, x.rem_euclid(p as i64) as u32);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn data(&self) -> &[u32] {
        &self.data
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, x: u32) {
        self.data[r * self.cols + c] = x;
    }

    pub fn row(&self, r: usize) -> &[u32] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    pub fn mul(&self, other: &Matrix, p: u32) -> Matrix {
        assert_eq!(self.cols, other.rows, "shape mismatch in product");
        let mut out = Matrix::zeros(self.rows, other.cols);
        let p64 = p as u64;
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k) as u64;
                if a == 0 {
                    continue;
                }
                for c in 0..other.cols {
                    let idx = r * out.cols + c;
                    out.data[idx] = ((out.data[idx] as u64 + a * other.get(k, c) as u64) % p64) as u32;
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Matrix, p: u32) -> Matrix {
        assert_eq!(self.shape(), other.shape(), "shape mismatch in sum");
        let data = self.data.iter().zip(&other.data).map(|(a, b)| (a + b) % p).collect();
        Matrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, other: &Matrix, p: u32) -> Matrix {
        self.add(&other.neg(p), p)
    }

    pub fn neg(&self, p: u32) -> Matrix {
        let data = self.data.iter().map(|&a| (p - a) % p).collect();
        Matrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn scale(&self, c: u32, p: u32) -> Matrix {
        let data = self.data.iter().map(|&a| ((a as u64 * c as u64) % p as u64) as u32).collect();
        Matrix { rows: self.rows, cols: self.cols, data }
    }

    /// `[self | other]`.
    pub fn hstack(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.rows, other.rows);
        let mut out = Matrix::zeros(self.rows, self.cols + other.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(r, c, self.get(r, c));
            }
            for c in 0..other.cols {
                out.set(r, self.cols + c, other.get(r, c));
            }
        }
        out
    }

    /// `[self; other]`.
    pub fn vstack(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Matrix { rows: self.rows + other.rows, cols: self.cols, data }
    }

    /// Block matrix `[[a, b], [c, d]]`.
    pub fn block(a: &Matrix, b: &Matrix, c: &Matrix, d: &Matrix) -> Matrix {
        a.hstack(b).vstack(&c.hstack(d))
    }

    /// Copies `src` into `self` with its top-left corner at `(r0, c0)`.
    pub fn paste(&mut self, r0: usize, c0: usize, src: &Matrix) {
        for r in 0..src.rows {
            for c in 0..src.cols {
                self.set(r0 + r, c0 + c, src.get(r, c));
            }
        }
    }

    pub fn submatrix(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Matrix {
        let mut out = Matrix::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                out.set(r, c, self.get(r0 + r, c0 + c));
            }
        }
        out
    }

    pub fn select_rows(&self, idx: &[usize]) -> Matrix {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &r in idx {
            data.extend_from_slice(self.row(r));
        }
        Matrix { rows: idx.len(), cols: self.cols, data }
    }

    /// Reduced row echelon form.
    pub fn rref(&self, p: u32) -> Echelon {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        let p64 = p as u64;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(piv) = (row..m.rows).find(|&r| m.get(r, col) != 0) else {
                continue;
            };
            if piv != row {
                for c in 0..m.cols {
                    m.data.swap(piv * m.cols + c, row * m.cols + c);
                }
            }
            let inv = inv_mod(m.get(row, col), p) as u64;
            for c in 0..m.cols {
                let idx = row * m.cols + c;
                m.data[idx] = ((m.data[idx] as u64 * inv) % p64) as u32;
            }
            for r in 0..m.rows {
                if r == row {
                    continue;
                }
                let f = m.get(r, col) as u64;
                if f == 0 {
                    continue;
                }
                for c in 0..m.cols {
                    let sub = (f * m.get(row, c) as u64) % p64;
                    let idx = r * m.cols + c;
                    m.data[idx] = ((m.data[idx] as u64 + p64 - sub) % p64) as u32;
                }
            }
            pivots.push(col);
            row += 1;
        }
        Echelon { matrix: m, pivots }
    }

    pub fn rank(&self, p: u32) -> usize {
        self.rref(p).pivots.len()
    }

    /// Basis of `{x : self · x = 0}`, one vector per free column.
    pub fn kernel(&self, p: u32) -> Vec<Vec<u32>> {
        let Echelon { matrix, pivots } = self.rref(p);
        let mut is_pivot = vec![false; self.cols];
        for &c in &pivots {
            is_pivot[c] = true;
        }
        let mut basis = Vec::new();
        for free in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut v = vec![0u32; self.cols];
            v[free] = 1;
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = (p - matrix.get(r, free)) % p;
            }
            basis.push(v);
        }
        basis
    }

    pub fn inverse(&self, p: u32) -> Option<Matrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        if n == 0 {
            return Some(Matrix::zeros(0, 0));
        }
        let ech = self.hstack(&Matrix::identity(n)).rref(p);
        if ech.pivots.len() < n || ech.pivots[n - 1] >= n {
            return None;
        }
        Some(ech.matrix.submatrix(0, n, n, n))
    }

    pub fn is_invertible(&self, p: u32) -> bool {
        self.rows == self.cols && self.rank(p) == self.rows
    }

    /// Some `x` with `self · x = b`, if one exists.
    pub fn solve(&self, b: &[u32], p: u32) -> Option<Vec<u32>> {
        assert_eq!(b.len(), self.rows);
        let col = Matrix::from_vec(self.rows, 1, b.to_vec());
        let Echelon { matrix, pivots } = self.hstack(&col).rref(p);
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![0u32; self.cols];
        for (r, &pc) in pivots.iter().enumerate() {
            x[pc] = matrix.get(r, self.cols);
        }
        Some(x)
    }

    /// Row space basis in reduced echelon form (zero rows dropped).
    pub fn row_space(&self, p: u32) -> Matrix {
        let Echelon { matrix, pivots } = self.rref(p);
        let keep: Vec<usize> = (0..pivots.len()).collect();
        matrix.select_rows(&keep)
    }

    /// Applies the matrix to a column vector.
    pub fn apply(&self, v: &[u32], p: u32) -> Vec<u32> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|r| {
                let s: u64 = self.row(r).iter().zip(v).map(|(&a, &b)| a as u64 * b as u64).sum();
                (s % p as u64) as u32
            })
            .collect()
    }
}

/// Gaussian binomial `[n choose k]_q`, the number of `k`-dimensional subspaces of `F_q^n`.
pub fn gaussian_binomial(n: u32, k: u32, q: u64) -> u128 {
    if k > n {
        return 0;
    }
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for i in 0..k {
        num *= (q as u128).pow(n - i) - 1;
        den *= (q as u128).pow(i + 1) - 1;
    }
    num / den
}

/// `|GL_n(F_q)|`.
pub fn gl_order(n: usize, q: u64) -> u128 {
    let qn = (q as u128).pow(n as u32);
    (0..n as u32).map(|i| qn - (q as u128).pow(i)).product()
}

/// All subspaces of `F_p^n`, as reduced echelon row bases, ordered by dimension
/// and then lexicographically by the free entries.
pub fn all_subspaces(n: usize, p: u32) -> Vec<Matrix> {
    let mut out = Vec::new();
    for k in 0..=n {
        subspaces_of_dim(n, k, p, &mut out);
    }
    out
}

fn subspaces_of_dim(n: usize, k: usize, p: u32, out: &mut Vec<Matrix>) {
    for pivots in combinations(n, k) {
        // free slots: row r, columns c > pivots[r] that are not pivots
        let mut slots = Vec::new();
        for (r, &pc) in pivots.iter().enumerate() {
            for c in pc + 1..n {
                if !pivots.contains(&c) {
                    slots.push((r, c));
                }
            }
        }
        let total = (p as u64).pow(slots.len() as u32);
        for code in 0..total {
            let mut m = Matrix::zeros(k, n);
            for (r, &pc) in pivots.iter().enumerate() {
                m.set(r, pc, 1);
            }
            let mut x = code;
            for &(r, c) in slots.iter().rev() {
                m.set(r, c, (x % p as u64) as u32);
                x /= p as u64;
            }
            out.push(m);
        }
    }
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    go(0, n, k, &mut cur, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(rows: usize, cols: usize, p: u32, rng: &mut ChaCha8Rng) -> Matrix {
        let data = (0..rows * cols).map(|_| rng.gen_range(0..p)).collect();
        Matrix::from_vec(rows, cols, data)
    }

    #[test]
    fn empty_matrix_is_invertible() {
        assert_eq!(Matrix::zeros(0, 0).inverse(3), Some(Matrix::zeros(0, 0)));
    }

    #[test]
    fn inverse_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for p in [2, 3, 5, 7] {
            for _ in 0..50 {
                let m = random(3, 3, p, &mut rng);
                match m.inverse(p) {
                    Some(inv) => {
                        assert_eq!(m.mul(&inv, p), Matrix::identity(3));
                        assert_eq!(inv.mul(&m, p), Matrix::identity(3));
                    }
                    None => assert!(m.rank(p) < 3),
                }
            }
        }
    }

    #[test]
    fn kernel_is_annihilated() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for p in [2, 3, 5] {
            for _ in 0..50 {
                let m = random(3, 5, p, &mut rng);
                let ker = m.kernel(p);
                assert_eq!(ker.len() + m.rank(p), 5);
                for v in ker {
                    assert!(m.apply(&v, p).iter().all(|&x| x == 0));
                }
            }
        }
    }

    #[test]
    fn solve_finds_preimages() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let m = random(4, 3, 5, &mut rng);
            let x: Vec<u32> = (0..3).map(|_| rng.gen_range(0..5)).collect();
            let b = m.apply(&x, 5);
            let y = m.solve(&b, 5).unwrap();
            assert_eq!(m.apply(&y, 5), b);
        }
        let m = Matrix::from_rows(&[vec![1, 0], vec![1, 0]], 2, 2);
        assert!(m.solve(&[0, 1], 2).is_none());
    }

    #[test]
    fn subspace_counts_are_gaussian() {
        for p in [2u32, 3] {
            for n in 0..=4 {
                let subs = all_subspaces(n, p);
                let expect: u128 = (0..=n as u32).map(|k| gaussian_binomial(n as u32, k, p as u64)).sum();
                assert_eq!(subs.len() as u128, expect, "n={n} p={p}");
                for s in &subs {
                    assert_eq!(s.rank(p), s.rows());
                    assert_eq!(&s.row_space(p), s);
                }
            }
        }
    }

    #[test]
    fn gl_orders() {
        assert_eq!(gl_order(1, 2), 1);
        assert_eq!(gl_order(2, 2), 6);
        assert_eq!(gl_order(3, 2), 168);
        assert_eq!(gl_order(2, 3), 48);
        assert_eq!(gl_order(0, 5), 1);
    }

    #[test]
    fn primitive_roots() {
        assert_eq!(primitive_root(2), 1);
        assert_eq!(primitive_root(3), 2);
        assert_eq!(primitive_root(5), 2);
        assert_eq!(primitive_root(7), 3);
    }
}

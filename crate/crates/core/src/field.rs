//! Prime-field arithmetic and dense linear algebra over it.
//!
//! Every arithmetic operation performed through [`Field`] bumps a
//! thread-local counter (see [`ops_performed`]). The repair code uses it to
//! demonstrate that helpers move symbols without touching the field.

use std::cell::Cell;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest admissible modulus (exclusive). Keeps every product inside `u64`.
pub const MAX_MODULUS: u64 = 1 << 31;

thread_local! {
    static OPS: Cell<u64> = const { Cell::new(0) };
}

#[inline]
fn tick() {
    OPS.with(|c| c.set(c.get() + 1));
}

/// Number of field operations performed on this thread so far.
pub fn ops_performed() -> u64 {
    OPS.with(|c| c.get())
}

/// Trial-division primality test, adequate for moduli below 2^31.
pub fn is_prime(q: u64) -> bool {
    if q < 2 {
        return false;
    }
    if q < 4 {
        return true;
    }
    if q.is_multiple_of(2) {
        return false;
    }
    let mut d = 3;
    while d * d <= q {
        if q.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Smallest prime `>= from`.
pub fn next_prime(from: u64) -> u64 {
    let mut p = from.max(2);
    while !is_prime(p) {
        p += 1;
    }
    p
}

/// Arithmetic context for the prime field of order `q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct Field {
    q: u64,
}

impl TryFrom<u64> for Field {
    type Error = Error;

    fn try_from(q: u64) -> Result<Self> {
        Field::new(q)
    }
}

impl From<Field> for u64 {
    fn from(f: Field) -> u64 {
        f.q
    }
}

impl Field {
    pub fn new(q: u64) -> Result<Self> {
        if !(2..MAX_MODULUS).contains(&q) {
            return Err(Error::ModulusOutOfRange(q));
        }
        if !is_prime(q) {
            return Err(Error::NonPrimeModulus(q));
        }
        Ok(Field { q })
    }

    #[inline]
    pub fn modulus(&self) -> u64 {
        self.q
    }

    /// Lifts an arbitrary integer into the field.
    pub fn elem(&self, v: u64) -> FieldElement {
        FieldElement {
            value: v % self.q,
            modulus: self.q,
        }
    }

    #[inline]
    pub fn reduce(&self, v: u64) -> u64 {
        v % self.q
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        tick();
        let s = a + b;
        if s >= self.q {
            s - self.q
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        tick();
        if a >= b {
            a - b
        } else {
            a + self.q - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        tick();
        if a == 0 {
            0
        } else {
            self.q - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        tick();
        a * b % self.q
    }

    pub fn pow(&self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1 % self.q;
        base %= self.q;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse by Fermat's little theorem.
    pub fn inv(&self, a: u64) -> Result<u64> {
        if a.is_multiple_of(self.q) {
            return Err(Error::DivideByZero);
        }
        Ok(self.pow(a, self.q - 2))
    }

    pub fn div(&self, a: u64, b: u64) -> Result<u64> {
        let inv = self.inv(b)?;
        Ok(self.mul(a, inv))
    }
}

/// The four field operations accepted by [`arith`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Op {
    Add,
    Sub,
    Mul,
    Div,
}

/// A residue together with its modulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldElement {
    value: u64,
    modulus: u64,
}

impl FieldElement {
    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self.value, self.modulus)
    }
}

/// Applies `op` to two elements of the same field.
pub fn arith(a: FieldElement, b: FieldElement, op: Op) -> Result<FieldElement> {
    if a.modulus != b.modulus {
        return Err(Error::ModulusMismatch {
            left: a.modulus,
            right: b.modulus,
        });
    }
    let f = Field { q: a.modulus };
    let value = match op {
        Op::Add => f.add(a.value, b.value),
        Op::Sub => f.sub(a.value, b.value),
        Op::Mul => f.mul(a.value, b.value),
        Op::Div => f.div(a.value, b.value)?,
    };
    Ok(FieldElement {
        value,
        modulus: a.modulus,
    })
}

/// Dense row-major matrix over a prime field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

impl Matrix {
    pub fn zeros(field: Field, rows: usize, cols: usize) -> Self {
        Matrix {
            field,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(field: Field, size: usize) -> Self {
        let mut m = Self::zeros(field, size, size);
        for i in 0..size {
            m.data[i * size + i] = 1;
        }
        m
    }

    /// Builds a matrix from row-major data; entries are reduced mod q.
    pub fn from_vec(field: Field, rows: usize, cols: usize, data: Vec<u64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        let data = data.into_iter().map(|v| field.reduce(v)).collect();
        Ok(Matrix {
            field,
            rows,
            cols,
            data,
        })
    }

    pub fn from_rows(field: Field, rows: &[Vec<u64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Self::from_vec(field, rows.len(), cols, rows.concat())
    }

    /// `rows x points.len()` Vandermonde matrix: entry `(r, c)` is `points[c]^r`.
    pub fn vandermonde(field: Field, rows: usize, points: &[u64]) -> Self {
        let mut m = Self::zeros(field, rows, points.len());
        for (c, &x) in points.iter().enumerate() {
            let mut p = 1 % field.modulus();
            for r in 0..rows {
                m.data[r * points.len() + c] = p;
                p = field.mul(p, field.reduce(x));
            }
        }
        m
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u64) {
        self.data[r * self.cols + c] = self.field.reduce(v);
    }

    pub fn row(&self, r: usize) -> &[u64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<u64> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<u64>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.field, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.data[c * self.rows + r] = self.get(r, c);
            }
        }
        t
    }

    /// Submatrix made of the given columns, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> Matrix {
        let mut m = Matrix::zeros(self.field, self.rows, cols.len());
        for r in 0..self.rows {
            for (k, &c) in cols.iter().enumerate() {
                m.data[r * cols.len() + k] = self.get(r, c);
            }
        }
        m
    }

    pub fn mul(&self, rhs: &Matrix) -> Result<Matrix> {
        if self.field != rhs.field {
            return Err(Error::ModulusMismatch {
                left: self.field.modulus(),
                right: rhs.field.modulus(),
            });
        }
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let f = self.field;
        let mut out = Matrix::zeros(f, self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a == 0 {
                    continue;
                }
                for c in 0..rhs.cols {
                    let idx = r * rhs.cols + c;
                    out.data[idx] = f.add(out.data[idx], f.mul(a, rhs.get(k, c)));
                }
            }
        }
        Ok(out)
    }

    /// Row vector times matrix.
    pub fn left_mul_vec(&self, v: &[u64]) -> Result<Vec<u64>> {
        if v.len() != self.rows {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} times {}x{}",
                v.len(),
                self.rows,
                self.cols
            )));
        }
        let f = self.field;
        let mut out = vec![0; self.cols];
        for (r, &a) in v.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (c, o) in out.iter_mut().enumerate() {
                *o = f.add(*o, f.mul(a, self.get(r, c)));
            }
        }
        Ok(out)
    }

    /// Reduces the matrix in place to reduced row echelon form and returns
    /// the pivot columns. Pivots are taken leftmost-first, and within a
    /// column from the topmost remaining row.
    fn rref_in_place(&mut self, pivot_limit: usize) -> Vec<usize> {
        let f = self.field;
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..pivot_limit.min(self.cols) {
            if row == self.rows {
                break;
            }
            let Some(p) = (row..self.rows).find(|&r| self.get(r, col) != 0) else {
                continue;
            };
            if p != row {
                for c in 0..self.cols {
                    self.data.swap(p * self.cols + c, row * self.cols + c);
                }
            }
            let inv = f.inv(self.get(row, col)).expect("pivot is nonzero");
            for c in col..self.cols {
                let idx = row * self.cols + c;
                self.data[idx] = f.mul(self.data[idx], inv);
            }
            for r in 0..self.rows {
                if r == row {
                    continue;
                }
                let factor = self.get(r, col);
                if factor == 0 {
                    continue;
                }
                for c in col..self.cols {
                    let v = f.mul(factor, self.get(row, c));
                    let idx = r * self.cols + c;
                    self.data[idx] = f.sub(self.data[idx], v);
                }
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        // Eliminate along the shorter dimension.
        let mut m = if self.rows > self.cols {
            self.transpose()
        } else {
            self.clone()
        };
        let limit = m.cols;
        m.rref_in_place(limit).len()
    }

    /// Reduced row echelon form (pivot columns returned alongside).
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let pivots = m.rref_in_place(self.cols);
        (m, pivots)
    }
}

/// Rank of a matrix over its field.
pub fn rank(m: &Matrix) -> usize {
    m.rank()
}

/// Solves `a * x = rhs` for `x` when `a` has full column rank.
pub fn solve(a: &Matrix, rhs: &Matrix) -> Result<Matrix> {
    if a.field != rhs.field {
        return Err(Error::ModulusMismatch {
            left: a.field.modulus(),
            right: rhs.field.modulus(),
        });
    }
    if a.rows != rhs.rows {
        return Err(Error::DimensionMismatch(format!(
            "system with {} rows, right-hand side with {}",
            a.rows, rhs.rows
        )));
    }
    let n = a.cols;
    let mut aug = Matrix::zeros(a.field, a.rows, n + rhs.cols);
    for r in 0..a.rows {
        aug.data[r * aug.cols..r * aug.cols + n].copy_from_slice(a.row(r));
        aug.data[r * aug.cols + n..(r + 1) * aug.cols].copy_from_slice(rhs.row(r));
    }
    let pivots = aug.rref_in_place(n);
    if pivots.len() < n {
        return Err(Error::SingularSystem {
            rank: pivots.len(),
            needed: n,
        });
    }
    for r in n..aug.rows {
        if aug.row(r)[n..].iter().any(|&v| v != 0) {
            return Err(Error::InconsistentSystem);
        }
    }
    let mut x = Matrix::zeros(a.field, n, rhs.cols);
    for r in 0..n {
        x.data[r * rhs.cols..(r + 1) * rhs.cols].copy_from_slice(&aug.row(r)[n..]);
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(q: u64) -> Field {
        Field::new(q).unwrap()
    }

    #[test]
    fn context_accepts_primes_only() {
        assert!(Field::new(53).is_ok());
        assert!(Field::new(2).is_ok());
        assert_eq!(Field::new(49), Err(Error::NonPrimeModulus(49)));
        assert!(matches!(Field::new(1), Err(Error::ModulusOutOfRange(1))));
        assert!(matches!(
            Field::new(MAX_MODULUS + 11),
            Err(Error::ModulusOutOfRange(_))
        ));
    }

    #[test]
    fn primality_agrees_with_sieve() {
        let limit = 2000usize;
        let mut sieve = vec![true; limit];
        sieve[0] = false;
        sieve[1] = false;
        for i in 2..limit {
            if sieve[i] {
                let mut j = i * i;
                while j < limit {
                    sieve[j] = false;
                    j += i;
                }
            }
        }
        for (q, &p) in sieve.iter().enumerate() {
            assert_eq!(is_prime(q as u64), p, "q={q}");
        }
        assert_eq!(next_prime(50), 53);
        assert_eq!(next_prime(182), 191);
        assert_eq!(next_prime(53), 53);
    }

    #[test]
    fn arith_examples() {
        let f53 = f(53);
        let a = f53.elem(40);
        assert_eq!(arith(a, a, Op::Mul).unwrap().value(), 1600 % 53);
        assert_eq!(arith(a, a, Op::Mul).unwrap().value(), 10);
        assert_eq!(arith(a, f53.elem(0), Op::Add).unwrap(), a);

        let f7 = f(7);
        assert_eq!(
            arith(f7.elem(3), f7.elem(5), Op::Div).unwrap().value(),
            2
        );
        assert_eq!(
            arith(f7.elem(3), f7.elem(0), Op::Div),
            Err(Error::DivideByZero)
        );
        assert!(matches!(
            arith(f7.elem(3), f53.elem(3), Op::Add),
            Err(Error::ModulusMismatch { .. })
        ));
    }

    #[test]
    fn exhaustive_field_axioms_small_primes() {
        for q in [2u64, 3, 5, 7, 11, 13, 53, 97] {
            let f = f(q);
            for a in 0..q {
                if a != 0 {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
                }
                assert_eq!(f.add(a, f.neg(a)), 0);
                for b in 0..q {
                    assert_eq!(f.add(a, b), f.add(b, a));
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    assert_eq!(f.sub(f.add(a, b), b), a);
                    assert_eq!(f.mul(a, b), (a * b) % q);
                }
            }
        }
    }

    #[test]
    fn rank_examples() {
        let f53 = f(53);
        assert_eq!(Matrix::identity(f53, 5).rank(), 5);
        assert_eq!(Matrix::zeros(f53, 3, 4).rank(), 0);
        assert_eq!(Matrix::zeros(f53, 0, 4).rank(), 0);
    }

    #[test]
    fn vandermonde_every_square_submatrix_full_rank() {
        let f53 = f(53);
        let points: Vec<u64> = (1..=8).collect();
        let v = Matrix::vandermonde(f53, 5, &points);
        assert_eq!(v.rank(), 5);
        let mut count = 0;
        for mask in 0u32..256 {
            if mask.count_ones() != 5 {
                continue;
            }
            let cols: Vec<usize> = (0..8).filter(|c| mask >> c & 1 == 1).collect();
            assert_eq!(v.select_columns(&cols).rank(), 5);
            count += 1;
        }
        assert_eq!(count, 56);
    }

    #[test]
    fn solve_identity_and_singular() {
        let f53 = f(53);
        let id = Matrix::identity(f53, 3);
        let v = Matrix::from_rows(f53, &[vec![4], vec![5], vec![6]]).unwrap();
        assert_eq!(solve(&id, &v).unwrap(), v);

        let singular =
            Matrix::from_rows(f53, &[vec![1, 2, 3], vec![0, 0, 0], vec![4, 5, 6]]).unwrap();
        assert!(matches!(
            solve(&singular, &v),
            Err(Error::SingularSystem { rank: 2, needed: 3 })
        ));
    }

    #[test]
    fn solve_detects_inconsistency() {
        let f7 = f(7);
        let a = Matrix::from_rows(f7, &[vec![1, 0], vec![0, 1], vec![1, 1]]).unwrap();
        let good = Matrix::from_rows(f7, &[vec![2], vec![3], vec![5]]).unwrap();
        let bad = Matrix::from_rows(f7, &[vec![2], vec![3], vec![6]]).unwrap();
        assert_eq!(solve(&a, &good).unwrap().column(0), vec![2, 3]);
        assert_eq!(solve(&a, &bad), Err(Error::InconsistentSystem));
    }

    #[test]
    fn op_counter_moves_only_on_arithmetic() {
        let f7 = f(7);
        let before = ops_performed();
        let _copy = [1u64, 2, 3].to_vec();
        assert_eq!(ops_performed(), before);
        f7.mul(3, 4);
        assert_eq!(ops_performed(), before + 1);
    }
}

//! Table-driven arithmetic in GF(q) for prime powers q <= 32, and small
//! matrices over those fields.
//!
//! Elements of GF(p^k) are encoded as integers `0..q` by reading the
//! coefficient list of a polynomial of degree < k as base-p digits
//! (constant term least significant). Extension fields are built modulo a
//! fixed irreducible polynomial per order, so encodings are reproducible.

use std::fmt;
use std::sync::Arc;

use crate::error::{MdlError, Result};
use crate::subset::Subset;

pub type Elem = u8;

pub const MAX_ORDER: usize = 32;

/// Fixed moduli, coefficients from the constant term upward (monic).
fn modulus_for(q: usize) -> Option<&'static [u8]> {
    Some(match q {
        4 => &[1, 1, 1],          // x^2 + x + 1
        8 => &[1, 1, 0, 1],       // x^3 + x + 1
        9 => &[1, 0, 1],          // x^2 + 1
        16 => &[1, 1, 0, 0, 1],   // x^4 + x + 1
        25 => &[2, 1, 1],         // x^2 + x + 2
        27 => &[1, 2, 0, 1],      // x^3 + 2x + 1
        32 => &[1, 0, 1, 0, 0, 1], // x^5 + x^2 + 1
        _ => return None,
    })
}

fn is_prime(n: usize) -> bool {
    n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

/// `(p, k)` with `q = p^k`, if `q` is a prime power.
pub fn prime_power(q: usize) -> Option<(usize, usize)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q % d == 0)?;
    let (mut m, mut k) = (q, 0);
    while m % p == 0 {
        m /= p;
        k += 1;
    }
    (m == 1 && is_prime(p)).then_some((p, k))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldOp {
    Add,
    Mul,
    Neg,
    Inv,
}

#[derive(Clone, PartialEq, Eq)]
pub struct FiniteField {
    q: usize,
    p: usize,
    k: usize,
    modulus: Option<Vec<u8>>,
    add: Vec<Elem>,
    mul: Vec<Elem>,
    neg: Vec<Elem>,
    inv: Vec<Elem>,
}

impl fmt::Debug for FiniteField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({})", self.q)
    }
}

impl FiniteField {
    pub fn new(q: usize) -> Result<Self> {
        if q > MAX_ORDER {
            return Err(MdlError::InvalidFieldOrder(q));
        }
        let (p, k) = prime_power(q).ok_or(MdlError::InvalidFieldOrder(q))?;
        let modulus = if k > 1 {
            Some(modulus_for(q).ok_or(MdlError::InvalidFieldOrder(q))?.to_vec())
        } else {
            None
        };

        let digits = |mut x: usize| -> Vec<usize> {
            (0..k)
                .map(|_| {
                    let d = x % p;
                    x /= p;
                    d
                })
                .collect()
        };
        let encode = |ds: &[usize]| -> usize { ds.iter().rev().fold(0, |acc, &d| acc * p + d) };

        let mut add = vec![0; q * q];
        let mut mul = vec![0; q * q];
        for x in 0..q {
            let dx = digits(x);
            for y in 0..q {
                let dy = digits(y);
                let sum: Vec<usize> = dx.iter().zip(&dy).map(|(a, b)| (a + b) % p).collect();
                add[x * q + y] = encode(&sum) as Elem;

                // schoolbook product, then reduce by the monic modulus
                let mut prod = vec![0usize; 2 * k - 1];
                for (i, a) in dx.iter().enumerate() {
                    for (j, b) in dy.iter().enumerate() {
                        prod[i + j] = (prod[i + j] + a * b) % p;
                    }
                }
                if let Some(m) = &modulus {
                    for deg in (k..prod.len()).rev() {
                        let c = prod[deg];
                        if c == 0 {
                            continue;
                        }
                        for (i, &mi) in m.iter().enumerate() {
                            let pos = deg - k + i;
                            prod[pos] = (prod[pos] + p * p - c * mi as usize % p) % p;
                        }
                    }
                }
                mul[x * q + y] = encode(&prod[..k]) as Elem;
            }
        }

        let mut neg = vec![0; q];
        let mut inv = vec![0; q];
        for x in 0..q {
            neg[x] = (0..q).find(|&y| add[x * q + y] == 0).expect("additive inverse") as Elem;
            if x != 0 {
                // a missing inverse means the modulus is reducible
                inv[x] = (1..q)
                    .find(|&y| mul[x * q + y] == 1)
                    .ok_or(MdlError::InvalidFieldOrder(q))? as Elem;
            }
        }

        Ok(FiniteField {
            q,
            p,
            k,
            modulus,
            add,
            mul,
            neg,
            inv,
        })
    }

    pub fn order(&self) -> usize {
        self.q
    }

    pub fn characteristic(&self) -> usize {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.k
    }

    pub fn modulus(&self) -> Option<&[u8]> {
        self.modulus.as_deref()
    }

    #[inline]
    pub fn add(&self, x: Elem, y: Elem) -> Elem {
        self.add[x as usize * self.q + y as usize]
    }

    #[inline]
    pub fn sub(&self, x: Elem, y: Elem) -> Elem {
        self.add(x, self.neg[y as usize])
    }

    #[inline]
    pub fn mul(&self, x: Elem, y: Elem) -> Elem {
        self.mul[x as usize * self.q + y as usize]
    }

    #[inline]
    pub fn neg(&self, x: Elem) -> Elem {
        self.neg[x as usize]
    }

    /// Multiplicative inverse; `x` must be nonzero.
    #[inline]
    pub fn inv(&self, x: Elem) -> Elem {
        debug_assert!(x != 0);
        self.inv[x as usize]
    }

    pub fn pow(&self, x: Elem, mut e: usize) -> Elem {
        let (mut base, mut acc) = (x, 1);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    fn check(&self, x: usize) -> Result<Elem> {
        if x < self.q {
            Ok(x as Elem)
        } else {
            Err(MdlError::ElementOutOfRange {
                value: x,
                q: self.q,
            })
        }
    }

    /// Checked arithmetic entry point. `y` is ignored by the unary ops.
    pub fn arith(&self, op: FieldOp, x: usize, y: usize) -> Result<Elem> {
        let x = self.check(x)?;
        Ok(match op {
            FieldOp::Add => self.add(x, self.check(y)?),
            FieldOp::Mul => self.mul(x, self.check(y)?),
            FieldOp::Neg => self.neg(x),
            FieldOp::Inv => {
                if x == 0 {
                    return Err(MdlError::ZeroInverse);
                }
                self.inv(x)
            }
        })
    }

    /// An element generating the multiplicative group.
    pub fn primitive_element(&self) -> Elem {
        (1..self.q as Elem)
            .find(|&g| {
                let mut x = g;
                let mut ord = 1;
                while x != 1 {
                    x = self.mul(x, g);
                    ord += 1;
                }
                ord == self.q - 1
            })
            .expect("multiplicative group is cyclic")
    }

    /// Field homomorphism from `self` into `big`, when `self` is a subfield
    /// of `big` of the same characteristic. Returns the image of every
    /// element of `self`.
    pub fn embedding_into(&self, big: &FiniteField) -> Option<Vec<Elem>> {
        if self.p != big.p || big.k % self.k != 0 {
            return None;
        }
        // prime-field digits embed as constants
        let root = match &self.modulus {
            None => 0,
            Some(m) => (0..big.q as Elem).find(|&w| {
                let mut acc = 0;
                for &c in m.iter().rev() {
                    acc = big.add(big.mul(acc, w), c);
                }
                acc == 0
            })?,
        };
        let image = (0..self.q)
            .map(|x| {
                let mut digits = Vec::with_capacity(self.k);
                let mut v = x;
                for _ in 0..self.k {
                    digits.push((v % self.p) as Elem);
                    v /= self.p;
                }
                let mut acc = 0;
                for &d in digits.iter().rev() {
                    acc = big.add(big.mul(acc, root), d);
                }
                acc
            })
            .collect();
        Some(image)
    }
}

/// Row-echelon span of a set of vectors, for rank and membership queries.
#[derive(Clone, Debug)]
pub struct Span<'f> {
    field: &'f FiniteField,
    dim: usize,
    basis: Vec<Elem>,
    pivots: Vec<usize>,
}

impl<'f> Span<'f> {
    pub fn new(field: &'f FiniteField, dim: usize) -> Self {
        Span {
            field,
            dim,
            basis: Vec::with_capacity(dim * dim),
            pivots: Vec::with_capacity(dim),
        }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    fn reduce(&self, v: &mut [Elem]) {
        let f = self.field;
        for (b, &p) in self.pivots.iter().enumerate() {
            let c = v[p];
            if c != 0 {
                let row = &self.basis[b * self.dim..(b + 1) * self.dim];
                for (x, &r) in v.iter_mut().zip(row) {
                    if r != 0 {
                        *x = f.sub(*x, f.mul(c, r));
                    }
                }
            }
        }
    }

    pub fn contains(&self, v: &[Elem]) -> bool {
        if self.pivots.len() == self.dim {
            return true;
        }
        let mut w = v.to_vec();
        self.reduce(&mut w);
        w.iter().all(|&x| x == 0)
    }

    /// Adds `v`; returns whether the span grew.
    pub fn insert(&mut self, v: &[Elem]) -> bool {
        if self.pivots.len() == self.dim {
            return false;
        }
        let mut w = v.to_vec();
        self.reduce(&mut w);
        let Some(p) = w.iter().position(|&x| x != 0) else {
            return false;
        };
        let s = self.field.inv(w[p]);
        for x in w.iter_mut() {
            *x = self.field.mul(*x, s);
        }
        self.basis.extend_from_slice(&w);
        self.pivots.push(p);
        true
    }
}

/// A matrix over a finite field; linear matroids use its columns.
#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    field: Arc<FiniteField>,
    rows: usize,
    cols: usize,
    /// column-major, so each column is a contiguous vector
    data: Vec<Elem>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}x{} over {:?}", self.rows, self.cols, self.field)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "  {}", row.join(" "))?;
        }
        Ok(())
    }
}

impl Matrix {
    pub fn zeros(field: Arc<FiniteField>, rows: usize, cols: usize) -> Self {
        Matrix {
            field,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    /// Builds from row-major entries.
    pub fn from_rows(field: Arc<FiniteField>, rows: usize, cols: usize, entries: &[usize]) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(MdlError::Precondition(format!(
                "expected {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        let mut m = Matrix::zeros(field, rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                let v = m.field.check(entries[i * cols + j])?;
                m.set(i, j, v);
            }
        }
        Ok(m)
    }

    pub fn from_columns(field: Arc<FiniteField>, rows: usize, columns: &[Vec<usize>]) -> Result<Self> {
        let mut m = Matrix::zeros(field, rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            if c.len() != rows {
                return Err(MdlError::Precondition(format!(
                    "column {j} has {} entries, expected {rows}",
                    c.len()
                )));
            }
            for (i, &v) in c.iter().enumerate() {
                let v = m.field.check(v)?;
                m.set(i, j, v);
            }
        }
        Ok(m)
    }

    pub fn field(&self) -> &Arc<FiniteField> {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Elem {
        self.data[j * self.rows + i]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Elem) {
        self.data[j * self.rows + i] = v;
    }

    #[inline]
    pub fn column(&self, j: usize) -> &[Elem] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn span_of(&self, columns: Subset) -> Span<'_> {
        let mut s = Span::new(&self.field, self.rows);
        for j in columns.iter() {
            s.insert(self.column(j));
            if s.rank() == self.rows {
                break;
            }
        }
        s
    }

    /// Rank of the selected columns by Gaussian elimination.
    pub fn rank_of_columns(&self, columns: Subset) -> usize {
        debug_assert!(columns.max().map_or(true, |m| m < self.cols));
        self.span_of(columns).rank()
    }

    /// Appends a column.
    pub fn push_column(&mut self, col: &[Elem]) {
        assert_eq!(col.len(), self.rows);
        self.data.extend_from_slice(col);
        self.cols += 1;
    }
}

//! Dense vectors and square matrices over GF(p), the companion matrix of a
//! monic polynomial, and the hopping vector sequence `b(t)`.
//!
//! Text forms: a vector is comma separated (`1,0`), a matrix is rows
//! separated by `;` with comma separated entries (`0,1;1,1`). Negative
//! entries are reduced mod p.

use std::fmt;

use thiserror::Error;

use crate::ff_poly::{satisfies_condition_g, FpPoly, PolyError, Prime};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("vector must have at least one entry")]
    EmptyVector,
    #[error("matrix must be square and non-empty")]
    NotSquare,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("fields differ (p={0} vs p={1})")]
    FieldMismatch(u64, u64),
    #[error("seed vector b must be nonzero")]
    ZeroSeed,
    #[error("polynomial does not satisfy condition (G)")]
    NotPrimitive,
    #[error("cannot parse `{input}`: {reason}")]
    Parse { input: String, reason: String },
    #[error(transparent)]
    Poly(#[from] PolyError),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FpVec {
    p: Prime,
    entries: Vec<u64>,
}

impl FpVec {
    pub fn new(p: Prime, entries: &[i64]) -> Result<Self, LinalgError> {
        if entries.is_empty() {
            return Err(LinalgError::EmptyVector);
        }
        Ok(FpVec {
            p,
            entries: entries.iter().map(|&v| p.reduce(v)).collect(),
        })
    }

    pub(crate) fn from_reduced(p: Prime, entries: Vec<u64>) -> Self {
        debug_assert!(!entries.is_empty() && entries.iter().all(|&v| v < p.get()));
        FpVec { p, entries }
    }

    pub fn zeros(p: Prime, len: usize) -> Result<Self, LinalgError> {
        if len == 0 {
            return Err(LinalgError::EmptyVector);
        }
        Ok(FpVec {
            p,
            entries: vec![0; len],
        })
    }

    /// `(1, 0, ..., 0)`.
    pub fn unit(p: Prime, len: usize) -> Result<Self, LinalgError> {
        let mut v = Self::zeros(p, len)?;
        v.entries[0] = 1;
        Ok(v)
    }

    pub fn field(&self) -> Prime {
        self.p
    }

    pub fn entries(&self) -> &[u64] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&v| v == 0)
    }

    /// Row vector times column vector.
    pub fn dot(&self, other: &[u64]) -> u64 {
        self.entries
            .iter()
            .zip(other)
            .fold(0, |acc, (&a, &b)| self.p.add(acc, self.p.mul(a, b)))
    }

    pub fn parse(p: Prime, input: &str) -> Result<Self, LinalgError> {
        let entries = parse_row(input)?;
        FpVec::new(p, &entries)
    }
}

impl fmt::Display for FpVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_row(f, &self.entries)
    }
}

/// Square matrix over GF(p), row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FpMatrix {
    p: Prime,
    dim: usize,
    entries: Vec<u64>,
}

impl FpMatrix {
    pub fn from_rows(p: Prime, rows: &[Vec<i64>]) -> Result<Self, LinalgError> {
        let dim = rows.len();
        if dim == 0 || rows.iter().any(|r| r.len() != dim) {
            return Err(LinalgError::NotSquare);
        }
        let entries = rows.iter().flatten().map(|&v| p.reduce(v)).collect();
        Ok(FpMatrix { p, dim, entries })
    }

    pub fn identity(p: Prime, dim: usize) -> Self {
        let mut entries = vec![0; dim * dim];
        for k in 0..dim {
            entries[k * dim + k] = 1;
        }
        FpMatrix { p, dim, entries }
    }

    pub fn zeros(p: Prime, dim: usize) -> Self {
        FpMatrix {
            p,
            dim,
            entries: vec![0; dim * dim],
        }
    }

    pub fn field(&self) -> Prime {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> u64 {
        self.entries[row * self.dim + col]
    }

    pub fn rows(&self) -> Vec<Vec<u64>> {
        self.entries.chunks(self.dim).map(<[u64]>::to_vec).collect()
    }

    fn check_compatible(&self, other_p: Prime, other_dim: usize) -> Result<(), LinalgError> {
        if self.p != other_p {
            return Err(LinalgError::FieldMismatch(self.p.get(), other_p.get()));
        }
        if self.dim != other_dim {
            return Err(LinalgError::DimensionMismatch {
                expected: self.dim,
                got: other_dim,
            });
        }
        Ok(())
    }

    pub fn mul(&self, other: &FpMatrix) -> Result<FpMatrix, LinalgError> {
        self.check_compatible(other.p, other.dim)?;
        let n = self.dim;
        let p = self.p;
        let mut out = vec![0u64; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.entries[i * n + k];
                if a == 0 {
                    continue;
                }
                for j in 0..n {
                    out[i * n + j] = p.add(out[i * n + j], p.mul(a, other.entries[k * n + j]));
                }
            }
        }
        Ok(FpMatrix {
            p,
            dim: n,
            entries: out,
        })
    }

    pub fn mul_vec(&self, v: &FpVec) -> Result<FpVec, LinalgError> {
        self.check_compatible(v.p, v.len())?;
        let mut out = vec![0u64; self.dim];
        self.mul_vec_into(&v.entries, &mut out);
        Ok(FpVec {
            p: self.p,
            entries: out,
        })
    }

    /// `out = self * v` without allocation; dimensions are the caller's job.
    pub(crate) fn mul_vec_into(&self, v: &[u64], out: &mut [u64]) {
        let n = self.dim;
        for (i, slot) in out.iter_mut().enumerate() {
            *slot = self.entries[i * n..(i + 1) * n]
                .iter()
                .zip(v)
                .fold(0, |acc, (&a, &b)| self.p.add(acc, self.p.mul(a, b)));
        }
    }

    pub fn parse(p: Prime, input: &str) -> Result<Self, LinalgError> {
        let rows = input
            .split(';')
            .map(parse_row)
            .collect::<Result<Vec<_>, _>>()?;
        FpMatrix::from_rows(p, &rows)
    }
}

impl fmt::Display for FpMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, row) in self.entries.chunks(self.dim).enumerate() {
            if k > 0 {
                write!(f, ";")?;
            }
            write_row(f, row)?;
        }
        Ok(())
    }
}

fn parse_row(input: &str) -> Result<Vec<i64>, LinalgError> {
    input
        .split(',')
        .map(|tok| {
            tok.trim().parse::<i64>().map_err(|_| LinalgError::Parse {
                input: input.to_string(),
                reason: format!("`{}` is not an integer", tok.trim()),
            })
        })
        .collect()
}

fn write_row(f: &mut fmt::Formatter<'_>, row: &[u64]) -> fmt::Result {
    for (k, v) in row.iter().enumerate() {
        if k > 0 {
            write!(f, ",")?;
        }
        write!(f, "{v}")?;
    }
    Ok(())
}

/// Companion matrix of `f = x^r + a_1 x^{r-1} + ... + a_r`: ones on the
/// sub-diagonal, last column `(-a_r, ..., -a_1)` top to bottom. For `r = 1`
/// this is the 1x1 matrix `(-a_1)`.
pub fn companion_matrix(f: &FpPoly) -> Result<FpMatrix, LinalgError> {
    let r = match f.degree() {
        None | Some(0) => return Err(PolyError::ZeroDegree.into()),
        Some(_) if !f.is_monic() => return Err(PolyError::NotMonic.into()),
        Some(r) => r,
    };
    let p = f.field();
    let mut m = FpMatrix::zeros(p, r);
    for row in 1..r {
        m.entries[row * r + row - 1] = 1;
    }
    // coefficient of x^row sits in row `row` of the last column
    for row in 0..r {
        m.entries[row * r + r - 1] = p.neg(f.coeff(row));
    }
    Ok(m)
}

/// `a^e` by square-and-multiply; `a^0` is the identity.
pub fn mat_pow(a: &FpMatrix, mut e: u64) -> FpMatrix {
    let mut acc = FpMatrix::identity(a.p, a.dim);
    let mut base = a.clone();
    while e > 0 {
        if e & 1 == 1 {
            acc = acc.mul(&base).expect("same shape");
        }
        e >>= 1;
        if e > 0 {
            base = base.mul(&base).expect("same shape");
        }
    }
    acc
}

/// Gaussian elimination over GF(p); returns the rank.
pub fn rank(m: &FpMatrix) -> usize {
    let n = m.dim;
    let p = m.p;
    let mut a = m.entries.clone();
    let mut rank = 0;
    for col in 0..n {
        let Some(pivot) = (rank..n).find(|&row| a[row * n + col] != 0) else {
            continue;
        };
        if pivot != rank {
            for j in 0..n {
                a.swap(pivot * n + j, rank * n + j);
            }
        }
        let inv = p.inv(a[rank * n + col]);
        for row in rank + 1..n {
            let factor = p.mul(a[row * n + col], inv);
            if factor == 0 {
                continue;
            }
            for j in col..n {
                a[row * n + j] = p.sub(a[row * n + j], p.mul(factor, a[rank * n + j]));
            }
        }
        rank += 1;
    }
    rank
}

pub fn is_nonsingular(m: &FpMatrix) -> bool {
    rank(m) == m.dim
}

/// Precomputed data for evaluating `b(t)` for one `(f, b)` pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BSequence {
    companion: FpMatrix,
    seed: FpVec,
    /// `p^r`
    period: u64,
}

impl BSequence {
    /// Checks `b != 0`, `len(b) == deg f` and, when `enforce_g` is set, that
    /// `f` satisfies condition (G).
    pub fn new(f: &FpPoly, b: &FpVec, enforce_g: bool) -> Result<Self, LinalgError> {
        let companion = companion_matrix(f)?;
        if b.p != f.field() {
            return Err(LinalgError::FieldMismatch(f.field().get(), b.p.get()));
        }
        if b.len() != companion.dim {
            return Err(LinalgError::DimensionMismatch {
                expected: companion.dim,
                got: b.len(),
            });
        }
        if b.is_zero() {
            return Err(LinalgError::ZeroSeed);
        }
        if enforce_g && !satisfies_condition_g(f)? {
            return Err(LinalgError::NotPrimitive);
        }
        let r = companion.dim as u32;
        let period = f.field().checked_pow(r).ok_or(PolyError::Overflow {
            p: f.field().get(),
            r,
        })?;
        Ok(BSequence {
            companion,
            seed: b.clone(),
            period,
        })
    }

    pub fn period(&self) -> u64 {
        self.period
    }

    pub fn companion(&self) -> &FpMatrix {
        &self.companion
    }

    pub fn seed(&self) -> &FpVec {
        &self.seed
    }

    /// Random access: `0` when `t ≡ 0 (mod p^r)`, else `A^((t mod p^r) - 1) b`.
    /// Negative `t` is reduced into `[0, p^r)` first.
    pub fn at(&self, t: i64) -> FpVec {
        let phase = (t as i128).rem_euclid(self.period as i128) as u64;
        if phase == 0 {
            return FpVec::from_reduced(self.seed.p, vec![0; self.seed.len()]);
        }
        mat_pow(&self.companion, phase - 1)
            .mul_vec(&self.seed)
            .expect("dimensions checked at construction")
    }

    /// Incremental evaluation of `b(0), b(1), ...` (one matrix-vector product
    /// per step). The iterator is infinite.
    pub fn iter(&self) -> BSequenceIter<'_> {
        BSequenceIter {
            seq: self,
            phase: 0,
            current: vec![0; self.seed.len()],
        }
    }

    /// One full period `b(0..p^r)`, flattened row by row (`r` entries each).
    pub fn period_table(&self) -> Vec<u64> {
        let r = self.seed.len();
        let mut out = Vec::with_capacity(self.period as usize * r);
        for v in self.iter().take(self.period as usize) {
            out.extend_from_slice(v.entries());
        }
        out
    }
}

pub struct BSequenceIter<'a> {
    seq: &'a BSequence,
    phase: u64,
    current: Vec<u64>,
}

impl Iterator for BSequenceIter<'_> {
    type Item = FpVec;

    fn next(&mut self) -> Option<FpVec> {
        let p = self.seq.seed.p;
        let out = if self.phase == 0 {
            vec![0; self.current.len()]
        } else if self.phase == 1 {
            self.current.copy_from_slice(&self.seq.seed.entries);
            self.current.clone()
        } else {
            let mut next = vec![0; self.current.len()];
            self.seq.companion.mul_vec_into(&self.current, &mut next);
            self.current = next;
            self.current.clone()
        };
        self.phase = (self.phase + 1) % self.seq.period;
        Some(FpVec::from_reduced(p, out))
    }
}

/// `b(t)` for the given `f` and seed `b`, enforcing condition (G) when
/// `enforce_g` is set.
pub fn b_sequence(f: &FpPoly, b: &FpVec, t: i64, enforce_g: bool) -> Result<FpVec, LinalgError> {
    Ok(BSequence::new(f, b, enforce_g)?.at(t))
}

/// The `(r+1) x (r+1)` matrix whose column `c` is `(1, b(t+c))`.
pub fn window_matrix(seq: &BSequence, t: i64) -> FpMatrix {
    let r = seq.seed.len();
    let n = r + 1;
    let mut m = FpMatrix::zeros(seq.seed.p, n);
    for c in 0..n {
        m.entries[c] = 1;
        let v = seq.at(t + c as i64);
        for (row, &val) in v.entries().iter().enumerate() {
            m.entries[(row + 1) * n + c] = val;
        }
    }
    m
}

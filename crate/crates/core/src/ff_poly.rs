//! Polynomials over the prime field GF(p).
//!
//! Coefficients are stored lowest degree first with trailing zeros trimmed,
//! so the zero polynomial is the empty coefficient list. Text form prints
//! highest degree first (`x^2+3x+6`).
//!
//! Besides ring arithmetic this module answers the two questions the
//! hopping construction needs about a monic `f`: is it irreducible, and does
//! `x` generate the multiplicative group of `GF(p)[x]/(f)` (i.e. is `f`
//! primitive). Field sizes are desk scale (`p <= 47`, `r <= 6`), so both
//! tests are done the direct way.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("p must be prime (got {0})")]
    NotPrime(u64),
    #[error("polynomials are over different fields (p={0} vs p={1})")]
    FieldMismatch(u64, u64),
    #[error("polynomial is not monic")]
    NotMonic,
    #[error("modulus must have degree >= 1")]
    ConstantModulus,
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("degree must be >= 1")]
    ZeroDegree,
    #[error("m must be >= 1")]
    ZeroCount,
    #[error("{p}^{r} does not fit in 64 bits")]
    Overflow { p: u64, r: u32 },
    #[error("cannot parse polynomial `{input}`: {reason}")]
    Parse { input: String, reason: String },
}

/// A prime modulus, checked at construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Prime(u64);

impl Prime {
    pub fn new(p: u64) -> Result<Self, PolyError> {
        if is_prime(p) {
            Ok(Prime(p))
        } else {
            Err(PolyError::NotPrime(p))
        }
    }

    #[inline]
    pub fn get(self) -> u64 {
        self.0
    }

    /// `p^e`, or `None` on overflow.
    pub fn checked_pow(self, e: u32) -> Option<u64> {
        self.0.checked_pow(e)
    }

    /// Reduce a signed integer into `[0, p)`.
    #[inline]
    pub fn reduce(self, v: i64) -> u64 {
        v.rem_euclid(self.0 as i64) as u64
    }

    #[inline]
    pub(crate) fn add(self, a: u64, b: u64) -> u64 {
        ((a as u128 + b as u128) % self.0 as u128) as u64
    }

    #[inline]
    pub(crate) fn sub(self, a: u64, b: u64) -> u64 {
        self.add(a, self.0 - b % self.0)
    }

    #[inline]
    pub(crate) fn mul(self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.0 as u128) as u64
    }

    #[inline]
    pub(crate) fn neg(self, a: u64) -> u64 {
        (self.0 - a % self.0) % self.0
    }

    pub(crate) fn pow(self, mut base: u64, mut e: u64) -> u64 {
        let mut acc = 1 % self.0;
        base %= self.0;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse of a nonzero element (Fermat).
    pub(crate) fn inv(self, a: u64) -> u64 {
        debug_assert!(!a.is_multiple_of(self.0));
        self.pow(a, self.0 - 2)
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Prime factors of `n` without multiplicity, ascending.
pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Polynomial over GF(p), lowest degree coefficient first.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FpPoly {
    p: Prime,
    coeffs: Vec<u64>,
}

impl FpPoly {
    /// Builds a polynomial from signed coefficients (lowest degree first),
    /// reducing each one mod p.
    pub fn from_coeffs(p: Prime, coeffs: &[i64]) -> Self {
        let mut out = FpPoly {
            p,
            coeffs: coeffs.iter().map(|&c| p.reduce(c)).collect(),
        };
        out.trim();
        out
    }

    /// `x^r + a_1 x^{r-1} + ... + a_r`, taking `tail = [a_1, ..., a_r]`.
    pub fn monic(p: Prime, tail: &[i64]) -> Self {
        let r = tail.len();
        let mut coeffs = vec![0u64; r + 1];
        coeffs[r] = 1 % p.get();
        for (k, &a) in tail.iter().enumerate() {
            coeffs[r - 1 - k] = p.reduce(a);
        }
        let mut out = FpPoly { p, coeffs };
        out.trim();
        out
    }

    pub fn zero(p: Prime) -> Self {
        FpPoly {
            p,
            coeffs: Vec::new(),
        }
    }

    pub fn one(p: Prime) -> Self {
        FpPoly { p, coeffs: vec![1] }
    }

    /// The monomial `x`.
    pub fn x(p: Prime) -> Self {
        FpPoly {
            p,
            coeffs: vec![0, 1],
        }
    }

    fn from_raw(p: Prime, coeffs: Vec<u64>) -> Self {
        let mut out = FpPoly { p, coeffs };
        out.trim();
        out
    }

    fn trim(&mut self) {
        while self.coeffs.last() == Some(&0) {
            self.coeffs.pop();
        }
    }

    pub fn field(&self) -> Prime {
        self.p
    }

    /// Coefficients, lowest degree first. Empty for the zero polynomial.
    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    /// Coefficient of `x^k` (zero past the degree).
    pub fn coeff(&self, k: usize) -> u64 {
        self.coeffs.get(k).copied().unwrap_or(0)
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs == [1]
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last() == Some(&1)
    }

    /// The tail `[a_1, ..., a_r]` of a monic `x^r + a_1 x^(r-1) + ... + a_r`.
    pub fn monic_tail(&self) -> Vec<u64> {
        let r = self.degree().unwrap_or(0);
        (1..=r).map(|k| self.coeff(r - k)).collect()
    }

    pub fn eval(&self, x: u64) -> u64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0, |acc, &c| self.p.add(self.p.mul(acc, x), c))
    }

    fn check_field(&self, other: &FpPoly) -> Result<(), PolyError> {
        if self.p != other.p {
            Err(PolyError::FieldMismatch(self.p.get(), other.p.get()))
        } else {
            Ok(())
        }
    }

    pub fn add(&self, other: &FpPoly) -> Result<FpPoly, PolyError> {
        self.check_field(other)?;
        let len = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..len)
            .map(|k| self.p.add(self.coeff(k), other.coeff(k)))
            .collect();
        Ok(FpPoly::from_raw(self.p, coeffs))
    }

    pub fn sub(&self, other: &FpPoly) -> Result<FpPoly, PolyError> {
        self.check_field(other)?;
        let len = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..len)
            .map(|k| self.p.sub(self.coeff(k), other.coeff(k)))
            .collect();
        Ok(FpPoly::from_raw(self.p, coeffs))
    }

    pub fn mul(&self, other: &FpPoly) -> Result<FpPoly, PolyError> {
        self.check_field(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(FpPoly::zero(self.p));
        }
        let mut coeffs = vec![0u64; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] = self.p.add(coeffs[i + j], self.p.mul(a, b));
            }
        }
        Ok(FpPoly::from_raw(self.p, coeffs))
    }

    /// Euclidean division: `self = q * divisor + rem` with `deg rem < deg divisor`.
    pub fn div_rem(&self, divisor: &FpPoly) -> Result<(FpPoly, FpPoly), PolyError> {
        self.check_field(divisor)?;
        let dd = divisor.degree().ok_or(PolyError::DivisionByZero)?;
        let p = self.p;
        let lead_inv = p.inv(divisor.coeffs[dd]);
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Ok((FpPoly::zero(p), self.clone()));
        }
        let mut quot = vec![0u64; rem.len() - dd];
        for k in (dd..rem.len()).rev() {
            let c = p.mul(rem[k], lead_inv);
            if c == 0 {
                continue;
            }
            quot[k - dd] = c;
            for (j, &d) in divisor.coeffs.iter().enumerate() {
                let idx = k - dd + j;
                rem[idx] = p.sub(rem[idx], p.mul(c, d));
            }
        }
        rem.truncate(dd);
        Ok((FpPoly::from_raw(p, quot), FpPoly::from_raw(p, rem)))
    }

    pub fn rem(&self, divisor: &FpPoly) -> Result<FpPoly, PolyError> {
        self.div_rem(divisor).map(|(_, r)| r)
    }

    /// `self^e mod modulus` by square-and-multiply.
    pub fn pow_mod(&self, mut e: u64, modulus: &FpPoly) -> Result<FpPoly, PolyError> {
        check_modulus(modulus)?;
        self.check_field(modulus)?;
        let mut base = self.rem(modulus)?;
        let mut acc = FpPoly::one(self.p).rem(modulus)?;
        while e > 0 {
            if e & 1 == 1 {
                acc = poly_mul_mod(&acc, &base, modulus)?;
            }
            base = poly_mul_mod(&base, &base, modulus)?;
            e >>= 1;
        }
        Ok(acc)
    }

    /// Parses the `x^2+3x+6` text form. Coefficients are decimal integers,
    /// `-` is accepted and normalized mod p, `*` between coefficient and `x`
    /// is optional, whitespace is ignored.
    pub fn parse(p: Prime, input: &str) -> Result<FpPoly, PolyError> {
        let err = |reason: &str| PolyError::Parse {
            input: input.to_string(),
            reason: reason.to_string(),
        };
        let s: String = input.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(err("empty input"));
        }
        let bytes = s.as_bytes();
        let mut pos = 0;
        let mut acc: Vec<i128> = Vec::new();
        let modulus = p.get() as i128;
        while pos < bytes.len() {
            let mut sign = 1i128;
            if bytes[pos] == b'+' || bytes[pos] == b'-' {
                if bytes[pos] == b'-' {
                    sign = -1;
                }
                pos += 1;
            } else if pos != 0 {
                return Err(err("expected `+` or `-` between terms"));
            }
            let start = pos;
            while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                pos += 1;
            }
            let coef: Option<i128> = if pos > start {
                Some(
                    s[start..pos]
                        .parse::<i128>()
                        .map_err(|_| err("coefficient out of range"))?
                        % modulus,
                )
            } else {
                None
            };
            if pos < bytes.len() && bytes[pos] == b'*' {
                if coef.is_none() {
                    return Err(err("`*` without a coefficient"));
                }
                pos += 1;
                if pos >= bytes.len() || bytes[pos] != b'x' {
                    return Err(err("expected `x` after `*`"));
                }
            }
            let exp = if pos < bytes.len() && bytes[pos] == b'x' {
                pos += 1;
                if pos < bytes.len() && bytes[pos] == b'^' {
                    pos += 1;
                    let es = pos;
                    while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                        pos += 1;
                    }
                    if es == pos {
                        return Err(err("missing exponent after `^`"));
                    }
                    s[es..pos]
                        .parse::<usize>()
                        .map_err(|_| err("exponent out of range"))?
                } else {
                    1
                }
            } else {
                if coef.is_none() {
                    return Err(err("empty term"));
                }
                0
            };
            if exp > 4096 {
                return Err(err("exponent too large"));
            }
            if acc.len() <= exp {
                acc.resize(exp + 1, 0);
            }
            acc[exp] = (acc[exp] + sign * coef.unwrap_or(1)) % modulus;
        }
        let coeffs = acc
            .into_iter()
            .map(|c| c.rem_euclid(modulus) as u64)
            .collect();
        Ok(FpPoly::from_raw(p, coeffs))
    }
}

impl fmt::Display for FpPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, "+")?;
            }
            first = false;
            match (k, c) {
                (0, c) => write!(f, "{c}")?,
                (1, 1) => write!(f, "x")?,
                (1, c) => write!(f, "{c}x")?,
                (k, 1) => write!(f, "x^{k}")?,
                (k, c) => write!(f, "{c}x^{k}")?,
            }
        }
        Ok(())
    }
}

fn check_modulus(modulus: &FpPoly) -> Result<(), PolyError> {
    match modulus.degree() {
        None | Some(0) => Err(PolyError::ConstantModulus),
        Some(_) if !modulus.is_monic() => Err(PolyError::NotMonic),
        Some(_) => Ok(()),
    }
}

fn check_monic_positive_degree(f: &FpPoly) -> Result<usize, PolyError> {
    match f.degree() {
        None | Some(0) => Err(PolyError::ZeroDegree),
        Some(_) if !f.is_monic() => Err(PolyError::NotMonic),
        Some(r) => Ok(r),
    }
}

/// `(a * b) mod modulus`. The modulus must be monic of degree >= 1.
pub fn poly_mul_mod(a: &FpPoly, b: &FpPoly, modulus: &FpPoly) -> Result<FpPoly, PolyError> {
    a.check_field(b)?;
    a.check_field(modulus)?;
    check_modulus(modulus)?;
    a.mul(b)?.rem(modulus)
}

/// Every monic polynomial of the given degree over GF(p), in lexicographic
/// order of the tail `(a_1, ..., a_r)`.
pub fn monic_polys(p: Prime, r: u32) -> impl Iterator<Item = FpPoly> {
    let count = p.checked_pow(r).unwrap_or(u64::MAX);
    let pv = p.get();
    (0..count).map(move |mut idx| {
        let mut tail = vec![0i64; r as usize];
        for slot in tail.iter_mut().rev() {
            *slot = (idx % pv) as i64;
            idx /= pv;
        }
        FpPoly::monic(p, &tail)
    })
}

/// Trial division by every monic polynomial of degree `1..=r/2`.
pub fn is_irreducible(f: &FpPoly) -> Result<bool, PolyError> {
    let r = check_monic_positive_degree(f)?;
    for d in 1..=(r / 2) as u32 {
        for g in monic_polys(f.p, d) {
            if f.rem(&g)?.is_zero() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Evidence for the primitivity decision: `x^((p^r-1)/q) mod f` for each
/// prime `q | p^r - 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimitivityCheck {
    pub poly: FpPoly,
    pub irreducible: bool,
    /// `p^r - 1`.
    pub group_order: u64,
    pub prime_factors: Vec<u64>,
    /// `(q, (p^r-1)/q, x^((p^r-1)/q) mod f)`; populated only when `f` is
    /// irreducible.
    pub witnesses: Vec<(u64, u64, FpPoly)>,
    /// `x^(p^r-1) mod f` (should be 1 for an irreducible `f` with `f(0) != 0`).
    pub full_power: Option<FpPoly>,
    pub primitive: bool,
}

/// Runs the factor-witness primitivity test and keeps the transcript.
pub fn primitivity_check(f: &FpPoly) -> Result<PrimitivityCheck, PolyError> {
    let r = check_monic_positive_degree(f)? as u32;
    let p = f.p;
    let group_order = p
        .checked_pow(r)
        .ok_or(PolyError::Overflow { p: p.get(), r })?
        - 1;
    let prime_factors = prime_factors(group_order);
    let irreducible = is_irreducible(f)?;
    let mut check = PrimitivityCheck {
        poly: f.clone(),
        irreducible,
        group_order,
        prime_factors: prime_factors.clone(),
        witnesses: Vec::new(),
        full_power: None,
        primitive: false,
    };
    if !irreducible {
        return Ok(check);
    }
    let x = FpPoly::x(p);
    let full = x.pow_mod(group_order, f)?;
    let mut primitive = full.is_one();
    for &q in &prime_factors {
        let e = group_order / q;
        let w = x.pow_mod(e, f)?;
        if w.is_one() {
            primitive = false;
        }
        check.witnesses.push((q, e, w));
    }
    check.full_power = Some(full);
    check.primitive = primitive;
    Ok(check)
}

/// Condition (G): `x` has multiplicative order exactly `p^r - 1` mod `f`.
/// Reducible input yields `false`.
pub fn satisfies_condition_g(f: &FpPoly) -> Result<bool, PolyError> {
    primitivity_check(f).map(|c| c.primitive)
}

/// First monic degree-`r` polynomial satisfying condition (G), scanning the
/// tail `(a_1, ..., a_r)` in lexicographic order.
pub fn find_condition_g_poly(p: Prime, r: u32) -> Result<FpPoly, PolyError> {
    if r == 0 {
        return Err(PolyError::ZeroDegree);
    }
    p.checked_pow(r)
        .ok_or(PolyError::Overflow { p: p.get(), r })?;
    for f in monic_polys(p, r) {
        if satisfies_condition_g(&f)? {
            return Ok(f);
        }
    }
    unreachable!("a primitive polynomial exists for every degree over every prime field")
}

/// Smallest `r` with `base^r >= m`, in integer arithmetic. `base` need not
/// be prime; `base >= 2` and `m >= 1`.
pub fn min_exponent(base: u64, m: u64) -> Result<u32, PolyError> {
    if m == 0 {
        return Err(PolyError::ZeroCount);
    }
    assert!(base >= 2, "base must be >= 2");
    let mut r = 0u32;
    let mut pow = 1u64;
    while pow < m {
        pow = pow.saturating_mul(base);
        r += 1;
    }
    Ok(r)
}

/// Smallest `r` with `p^r >= m`.
pub fn minimal_r(p: Prime, m: u64) -> Result<u32, PolyError> {
    min_exponent(p.get(), m)
}

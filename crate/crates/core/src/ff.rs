//! Prime-field arithmetic and dense univariate polynomials over GF(p).
//!
//! Fields are small (p < 2^31), so products fit comfortably in `u64`.
//! Polynomials are stored lowest degree first and always kept trimmed, so the
//! zero polynomial has no coefficients and degree `None` (minus infinity).

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use thiserror::Error;

/// Largest modulus accepted by [`PrimeField::new`].
pub const MAX_MODULUS: u64 = (1 << 31) - 1;

/// Cap on the number of coefficient tuples enumerated by [`independence_check`].
pub const INDEPENDENCE_ENUMERATION_LIMIT: u128 = 100_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("modulus {0} is not prime")]
    NotPrime(u64),
    #[error("modulus {0} exceeds the supported maximum {MAX_MODULUS}")]
    ModulusTooLarge(u64),
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("division by the zero polynomial")]
    ZeroDivisor,
    #[error("operands live in different fields (GF({0}) vs GF({1}))")]
    FieldMismatch(u64, u64),
    #[error("index {index} out of range for a vector of length {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("invalid degree budgets: {0}")]
    InvalidBudgets(String),
    #[error("enumeration of {0} coefficient tuples exceeds the limit")]
    TooLarge(u128),
}

/// Deterministic Miller-Rabin. The witness set is exact for every `u64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const SMALL: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &p in &SMALL {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    let mul = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let pow = |mut b: u64, mut e: u64| {
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = mul(acc, b);
            }
            b = mul(b, b);
            e >>= 1;
        }
        acc
    };
    'witness: for &a in &SMALL {
        let mut x = pow(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// The prime field GF(p).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self, FieldError> {
        if p > MAX_MODULUS {
            return Err(FieldError::ModulusTooLarge(p));
        }
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        Ok(PrimeField { p })
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    /// The element `value mod p`.
    pub fn elem(&self, value: u64) -> FieldElement {
        FieldElement {
            value: (value % self.p) as u32,
            modulus: self.p as u32,
        }
    }

    /// The element `value mod p` for a possibly negative integer.
    pub fn elem_i64(&self, value: i64) -> FieldElement {
        self.elem(value.rem_euclid(self.p as i64) as u64)
    }

    pub fn zero(&self) -> FieldElement {
        self.elem(0)
    }

    pub fn one(&self) -> FieldElement {
        self.elem(1)
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        (0..self.p).map(move |v| self.elem(v))
    }
}

impl fmt::Display for PrimeField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({})", self.p)
    }
}

/// An element of some GF(p); carries its modulus so mixed-field use is caught.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElement {
    value: u32,
    modulus: u32,
}

impl FieldElement {
    pub fn value(self) -> u64 {
        self.value as u64
    }

    pub fn modulus(self) -> u64 {
        self.modulus as u64
    }

    pub fn field(self) -> PrimeField {
        PrimeField {
            p: self.modulus as u64,
        }
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    fn check(self, other: FieldElement) -> Result<(), FieldError> {
        if self.modulus == other.modulus {
            Ok(())
        } else {
            Err(FieldError::FieldMismatch(self.modulus(), other.modulus()))
        }
    }

    fn same_field(self, other: FieldElement) {
        if let Err(e) = self.check(other) {
            panic!("{e}");
        }
    }

    pub fn pow(self, mut e: u64) -> FieldElement {
        let mut base = self;
        let mut acc = self.field().one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse via the extended Euclidean algorithm.
    pub fn inv(self) -> Result<FieldElement, FieldError> {
        if self.value == 0 {
            return Err(FieldError::ZeroInverse);
        }
        let p = self.modulus as i64;
        let (mut old_r, mut r) = (self.value as i64, p);
        let (mut old_s, mut s) = (1i64, 0i64);
        while r != 0 {
            let quot = old_r / r;
            (old_r, r) = (r, old_r - quot * r);
            (old_s, s) = (s, old_s - quot * s);
        }
        debug_assert_eq!(old_r, 1);
        Ok(self.field().elem_i64(old_s))
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl Add for FieldElement {
    type Output = FieldElement;
    fn add(self, rhs: FieldElement) -> FieldElement {
        self.same_field(rhs);
        let s = self.value as u64 + rhs.value as u64;
        let m = self.modulus as u64;
        FieldElement {
            value: if s >= m { s - m } else { s } as u32,
            modulus: self.modulus,
        }
    }
}

impl Sub for FieldElement {
    type Output = FieldElement;
    fn sub(self, rhs: FieldElement) -> FieldElement {
        self + (-rhs)
    }
}

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        FieldElement {
            value: if self.value == 0 {
                0
            } else {
                self.modulus - self.value
            },
            modulus: self.modulus,
        }
    }
}

impl Mul for FieldElement {
    type Output = FieldElement;
    fn mul(self, rhs: FieldElement) -> FieldElement {
        self.same_field(rhs);
        FieldElement {
            value: ((self.value as u64 * rhs.value as u64) % self.modulus as u64) as u32,
            modulus: self.modulus,
        }
    }
}

/// A polynomial over GF(p), coefficients lowest degree first, trailing zeros trimmed.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Polynomial {
    field: PrimeField,
    coeffs: Vec<u32>,
}

impl Polynomial {
    /// Builds a polynomial from integer coefficients (lowest degree first), reducing mod p.
    pub fn new(field: PrimeField, coeffs: &[u64]) -> Self {
        let p = field.modulus();
        let mut poly = Polynomial {
            field,
            coeffs: coeffs.iter().map(|&c| (c % p) as u32).collect(),
        };
        poly.trim();
        poly
    }

    pub fn from_elements(field: PrimeField, coeffs: &[FieldElement]) -> Result<Self, FieldError> {
        for c in coeffs {
            if c.modulus() != field.modulus() {
                return Err(FieldError::FieldMismatch(field.modulus(), c.modulus()));
            }
        }
        let raw: Vec<u64> = coeffs.iter().map(|c| c.value()).collect();
        Ok(Self::new(field, &raw))
    }

    pub fn zero(field: PrimeField) -> Self {
        Polynomial {
            field,
            coeffs: Vec::new(),
        }
    }

    pub fn one(field: PrimeField) -> Self {
        Self::new(field, &[1])
    }

    /// `x - root`.
    pub fn linear(root: FieldElement) -> Self {
        let field = root.field();
        Self::new(field, &[(-root).value(), 1])
    }

    /// The `index`-th polynomial of degree below `k` in the canonical order used
    /// for matrix columns: the coefficient vector read as a base-p number with the
    /// constant coefficient most significant.
    pub fn from_index(field: PrimeField, k: usize, mut index: u64) -> Self {
        let p = field.modulus();
        let mut coeffs = vec![0u64; k];
        for slot in coeffs.iter_mut().rev() {
            *slot = index % p;
            index /= p;
        }
        Self::new(field, &coeffs)
    }

    /// All `p^k` polynomials of degree below `k`, in canonical order.
    pub fn all_below_degree(field: PrimeField, k: usize) -> impl Iterator<Item = Polynomial> {
        let count = field.modulus().pow(k as u32);
        (0..count).map(move |i| Self::from_index(field, k, i))
    }

    fn trim(&mut self) {
        while self.coeffs.last() == Some(&0) {
            self.coeffs.pop();
        }
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, i: usize) -> FieldElement {
        self.field.elem(self.coeffs.get(i).copied().unwrap_or(0) as u64)
    }

    /// Coefficients lowest degree first (trimmed).
    pub fn coefficients(&self) -> Vec<FieldElement> {
        (0..self.coeffs.len()).map(|i| self.coeff(i)).collect()
    }

    /// Horner evaluation.
    pub fn eval(&self, at: FieldElement) -> Result<FieldElement, FieldError> {
        if at.modulus() != self.field.modulus() {
            return Err(FieldError::FieldMismatch(self.field.modulus(), at.modulus()));
        }
        Ok(self.field.elem(self.eval_raw(at.value())))
    }

    /// Horner evaluation on raw residues; `at` must already be reduced.
    pub(crate) fn eval_raw(&self, at: u64) -> u64 {
        let p = self.field.modulus();
        self.coeffs
            .iter()
            .rev()
            .fold(0u64, |acc, &c| (acc * at + c as u64) % p)
    }

    fn check(&self, other: &Polynomial) -> Result<(), FieldError> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(FieldError::FieldMismatch(
                self.field.modulus(),
                other.field.modulus(),
            ))
        }
    }

    pub fn scale(&self, c: FieldElement) -> Polynomial {
        let p = self.field.modulus();
        let coeffs: Vec<u64> = self
            .coeffs
            .iter()
            .map(|&a| a as u64 * c.value() % p)
            .collect();
        Polynomial::new(self.field, &coeffs)
    }

    /// Multiplication by `x^shift`.
    pub fn shift(&self, shift: usize) -> Polynomial {
        if self.is_zero() {
            return self.clone();
        }
        let mut coeffs = vec![0u32; shift];
        coeffs.extend_from_slice(&self.coeffs);
        Polynomial {
            field: self.field,
            coeffs,
        }
    }

    /// Polynomial long division.
    pub fn div_rem(&self, divisor: &Polynomial) -> Result<(Polynomial, Polynomial), FieldError> {
        self.check(divisor)?;
        let Some(dd) = divisor.degree() else {
            return Err(FieldError::ZeroDivisor);
        };
        let p = self.field.modulus();
        let lead_inv = divisor.coeff(dd).inv()?.value();
        let mut rem: Vec<u64> = self.coeffs.iter().map(|&c| c as u64).collect();
        let mut quot = vec![0u64; rem.len().saturating_sub(dd)];
        for i in (dd..rem.len()).rev() {
            let c = rem[i] * lead_inv % p;
            if c == 0 {
                continue;
            }
            quot[i - dd] = c;
            for (j, &dc) in divisor.coeffs.iter().enumerate() {
                let sub = c * dc as u64 % p;
                rem[i - dd + j] = (rem[i - dd + j] + p - sub) % p;
            }
        }
        rem.truncate(dd);
        Ok((Polynomial::new(self.field, &quot), Polynomial::new(self.field, &rem)))
    }

    /// True iff `self` divides `f`.
    pub fn divides(&self, f: &Polynomial) -> Result<bool, FieldError> {
        let (_, r) = f.div_rem(self)?;
        Ok(r.is_zero())
    }

    /// The annihilator `prod_{i in subset} (x - points[i])`; the empty product is 1.
    /// Indices are 0-based positions into `points`.
    pub fn annihilator(
        field: PrimeField,
        points: &[FieldElement],
        subset: &[usize],
    ) -> Result<Polynomial, FieldError> {
        let mut acc = Polynomial::one(field);
        for &i in subset {
            let alpha = *points.get(i).ok_or(FieldError::IndexOutOfRange {
                index: i,
                len: points.len(),
            })?;
            if alpha.modulus() != field.modulus() {
                return Err(FieldError::FieldMismatch(field.modulus(), alpha.modulus()));
            }
            acc = &acc * &Polynomial::linear(alpha);
        }
        Ok(acc)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match (i, c) {
                (0, _) => write!(f, "{c}")?,
                (1, 1) => write!(f, "x")?,
                (1, _) => write!(f, "{c}x")?,
                (_, 1) => write!(f, "x^{i}")?,
                _ => write!(f, "{c}x^{i}")?,
            }
        }
        Ok(())
    }
}

fn combine(a: &Polynomial, b: &Polynomial, sign: bool) -> Polynomial {
    if let Err(e) = a.check(b) {
        panic!("{e}");
    }
    let p = a.field.modulus();
    let len = a.coeffs.len().max(b.coeffs.len());
    let coeffs: Vec<u64> = (0..len)
        .map(|i| {
            let x = a.coeffs.get(i).copied().unwrap_or(0) as u64;
            let y = b.coeffs.get(i).copied().unwrap_or(0) as u64;
            if sign {
                (x + y) % p
            } else {
                (x + p - y) % p
            }
        })
        .collect();
    Polynomial::new(a.field, &coeffs)
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        combine(self, rhs, true)
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        combine(self, rhs, false)
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        if let Err(e) = self.check(rhs) {
            panic!("{e}");
        }
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero(self.field);
        }
        let p = self.field.modulus();
        let mut out = vec![0u64; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = (out[i + j] + a as u64 * b as u64) % p;
            }
        }
        Polynomial::new(self.field, &out)
    }
}

/// Decides `(k1,k2,k3)`-independence of three polynomials inside the space of
/// polynomials of degree below `k`: true iff `q1 p1 + q2 p2 + q3 p3 = 0` with
/// `deg q_i < k_i` forces every `q_i = 0`.
///
/// Exhaustive: walks all `p^(k1+k2+k3)` coefficient tuples with an odometer,
/// updating the combination incrementally (each digit step adds one basis vector
/// `x^j p_i`, wrap-around included, since `p * b = 0`).
pub fn independence_check(
    polys: [&Polynomial; 3],
    budgets: [usize; 3],
    k: usize,
) -> Result<bool, FieldError> {
    let field = polys[0].field();
    for poly in &polys[1..] {
        polys[0].check(poly)?;
    }
    if budgets.contains(&0) {
        return Err(FieldError::InvalidBudgets("every budget must be at least 1".into()));
    }
    let total: usize = budgets.iter().sum();
    if total > k {
        return Err(FieldError::InvalidBudgets(format!(
            "budgets sum to {total}, exceeding k = {k}"
        )));
    }
    for (poly, &b) in polys.iter().zip(&budgets) {
        if let Some(d) = poly.degree() {
            if b + d > k {
                return Err(FieldError::InvalidBudgets(format!(
                    "budget {b} exceeds k - deg = {}",
                    k as i64 - d as i64
                )));
            }
        }
    }
    let p = field.modulus();
    let count = (p as u128).checked_pow(total as u32).unwrap_or(u128::MAX);
    if count > INDEPENDENCE_ENUMERATION_LIMIT {
        return Err(FieldError::TooLarge(count));
    }

    // basis[d] = x^j p_i as a length-k coefficient vector, one per odometer digit
    let basis: Vec<Vec<u64>> = polys
        .iter()
        .zip(&budgets)
        .flat_map(|(poly, &b)| {
            (0..b).map(move |j| {
                let shifted = poly.shift(j);
                (0..k).map(|c| shifted.coeff(c).value()).collect()
            })
        })
        .collect();

    let mut digits = vec![0u64; total];
    let mut combo = vec![0u64; k];
    let mut nonzero = 0usize;
    loop {
        // advance the odometer
        let mut pos = 0;
        loop {
            if pos == total {
                return Ok(true);
            }
            for (c, &b) in combo.iter_mut().zip(&basis[pos]) {
                let was_zero = *c == 0;
                *c = (*c + b) % p;
                match (was_zero, *c == 0) {
                    (true, false) => nonzero += 1,
                    (false, true) => nonzero -= 1,
                    _ => {}
                }
            }
            digits[pos] += 1;
            if digits[pos] == p {
                digits[pos] = 0;
                pos += 1;
            } else {
                break;
            }
        }
        if nonzero == 0 {
            // digits is nonzero here: the all-zero tuple only recurs at termination
            return Ok(false);
        }
    }
}

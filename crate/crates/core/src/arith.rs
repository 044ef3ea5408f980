//! Integer arithmetic underlying everything else: squarefree factorization,
//! Jacobi symbols and their `F_2`-valued exponents.
//!
//! For odd `n` we write `(-1/n) = (-1)^beta(n)`, `(u/p) = (-1)^beta_u(u, p)` and
//! `(a/b) = (-1)^alpha(a, b)`. These exponents are what the affine systems in
//! [`crate::affine`] are assembled from.

use std::fmt;
use std::ops::{Add, AddAssign, Mul};

use crate::{Error, Result};

/// An element of the two-element field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct F2(bool);

impl F2 {
    pub const ZERO: F2 = F2(false);
    pub const ONE: F2 = F2(true);

    pub fn is_one(self) -> bool {
        self.0
    }

    pub fn bit(self) -> u64 {
        self.0 as u64
    }

    /// `(-1)^self`.
    pub fn sign(self) -> i64 {
        if self.0 {
            -1
        } else {
            1
        }
    }
}

impl From<bool> for F2 {
    fn from(b: bool) -> Self {
        F2(b)
    }
}

#[allow(clippy::suspicious_arithmetic_impl, clippy::suspicious_op_assign_impl)]
impl Add for F2 {
    type Output = F2;
    fn add(self, rhs: F2) -> F2 {
        F2(self.0 ^ rhs.0)
    }
}

#[allow(clippy::suspicious_arithmetic_impl, clippy::suspicious_op_assign_impl)]
impl AddAssign for F2 {
    fn add_assign(&mut self, rhs: F2) {
        self.0 ^= rhs.0;
    }
}

#[allow(clippy::suspicious_arithmetic_impl, clippy::suspicious_op_assign_impl)]
impl Mul for F2 {
    type Output = F2;
    fn mul(self, rhs: F2) -> F2 {
        F2(self.0 & rhs.0)
    }
}

impl fmt::Display for F2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.bit())
    }
}

/// A positive odd squarefree integer together with its prime factorization
/// `p_1 < ... < p_omega`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FactoredOddSquarefree {
    value: u64,
    primes: Vec<u64>,
}

impl FactoredOddSquarefree {
    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn omega(&self) -> usize {
        self.primes.len()
    }

    /// The divisor whose prime support is selected by `mask`
    /// (bit `i` set iff `p_{i+1}` divides it).
    pub fn divisor(&self, mask: u64) -> u64 {
        self.primes
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &p)| p)
            .product()
    }

    /// Bitmask with every prime selected.
    pub fn full_mask(&self) -> u64 {
        if self.primes.is_empty() {
            0
        } else {
            u64::MAX >> (64 - self.primes.len())
        }
    }

    /// All `2^omega` ordered pairs `(a, b)` with `ab = D`, ordered by the
    /// subset bitmask of primes dividing `a`.
    pub fn divisor_pairs(&self) -> Vec<(u64, u64)> {
        divisor_pairs(self)
    }
}

impl fmt::Display for FactoredOddSquarefree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

/// Factor `n` by trial division, requiring it to be positive, odd and
/// squarefree.
pub fn factor_squarefree_odd(n: i64) -> Result<FactoredOddSquarefree> {
    if n <= 0 || n % 2 == 0 {
        return Err(Error::NotOddSquarefree(n.into()));
    }
    let value = n as u64;
    let mut rest = value;
    let mut primes = Vec::new();
    let mut p = 3u64;
    while p <= rest / p {
        if rest.is_multiple_of(p) {
            rest /= p;
            if rest.is_multiple_of(p) {
                return Err(Error::NotOddSquarefree(n.into()));
            }
            primes.push(p);
        }
        p += 2;
    }
    if rest > 1 {
        primes.push(rest);
    }
    Ok(FactoredOddSquarefree { value, primes })
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// The Jacobi symbol `(m/n)` for odd positive `n`.
///
/// Returns 0 when `gcd(m, n) > 1`. Negative `m` is handled as
/// `(-1/n) * (|m|/n)`.
pub fn jacobi(m: i64, n: i64) -> Result<i8> {
    if n < 1 || n % 2 == 0 {
        return Err(Error::InvalidModulus(n.into()));
    }
    let n = n as u64;
    let mut sign = 1i8;
    if m < 0 && n % 4 == 3 {
        sign = -1;
    }
    Ok(sign * jacobi_unsigned(m.unsigned_abs(), n))
}

/// Jacobi symbol `(m/n)` for odd `n`, with `m` already non-negative.
pub(crate) fn jacobi_unsigned(m: u64, n: u64) -> i8 {
    debug_assert!(n % 2 == 1);
    let mut a = m % n;
    let mut n = n;
    let mut t = 1i8;
    while a != 0 {
        let tz = a.trailing_zeros();
        a >>= tz;
        if tz % 2 == 1 && (n % 8 == 3 || n % 8 == 5) {
            t = -t;
        }
        if a % 4 == 3 && n % 4 == 3 {
            t = -t;
        }
        (a, n) = (n % a, a);
    }
    if n == 1 {
        t
    } else {
        0
    }
}

/// Jacobi symbol of `x` modulo the odd prime (or odd modulus) `p`, for
/// arbitrary signed `x` without overflow concerns.
pub(crate) fn jacobi_i128(x: i128, p: u64) -> i8 {
    let r = x.rem_euclid(p as i128) as u64;
    jacobi_unsigned(r, p)
}

fn symbol_to_f2(symbol: i8, a: i128, b: i128) -> Result<F2> {
    match symbol {
        1 => Ok(F2::ZERO),
        -1 => Ok(F2::ONE),
        _ => Err(Error::NotCoprime { a, b }),
    }
}

/// `beta(n)` with `(-1/n) = (-1)^beta(n)`, i.e. `(n - 1)/2 mod 2`.
pub fn beta(n: i64) -> Result<F2> {
    if n < 1 || n % 2 == 0 {
        return Err(Error::InvalidModulus(n.into()));
    }
    Ok(F2::from((n - 1) / 2 % 2 == 1))
}

/// `beta_u(p)` with `(u/p) = (-1)^beta_u(p)`.
pub fn beta_u(u: i64, p: i64) -> Result<F2> {
    symbol_to_f2(jacobi(u, p)?, u.into(), p.into())
}

/// `alpha(a, b)` with `(a/b) = (-1)^alpha(a, b)`.
pub fn alpha(a: i64, b: i64) -> Result<F2> {
    if a < 1 || a % 2 == 0 {
        return Err(Error::InvalidModulus(a.into()));
    }
    symbol_to_f2(jacobi(a, b)?, a.into(), b.into())
}

pub fn divisor_pairs(d: &FactoredOddSquarefree) -> Vec<(u64, u64)> {
    let full = d.full_mask();
    (0..=full)
        .map(|mask| {
            let a = d.divisor(mask);
            (a, d.value / a)
        })
        .collect()
}

//! Jacobi character sums over divisors of `D`.
//!
//! ```text
//! sigma_D(s,t,u,v) = sum_{ab=D} prod_{p|b} ((s/p) + (ua/p)) prod_{p|a} ((t/p) + (vb/p))
//! S_D(u,v)         = sigma_D(1,1,u,v) = 2^omega(D) E_D(u,v)
//! ```
//!
//! [`sigma`] evaluates the double-product definition with direct Jacobi
//! symbol calls. [`sigma_quad`] and [`averaged_rhs`] evaluate the
//! quadruple-divisor forms over all `abcd = D` using a precomputed table of
//! symbols between the prime divisors, so the two routes share nothing but
//! the factorization.

use std::fmt;

use crate::arith::{jacobi_i128, FactoredOddSquarefree};
use crate::counting::check_coprime_all;
use crate::{Error, Result};

/// Quadruple sums cost `4^omega`; beyond this they are refused.
pub const QUAD_OMEGA_LIMIT: usize = 12;

/// The four twisting parameters of `sigma_D(s, t, u, v)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SigmaParams {
    pub s: i64,
    pub t: i64,
    pub u: i64,
    pub v: i64,
}

impl SigmaParams {
    pub const fn new(s: i64, t: i64, u: i64, v: i64) -> Self {
        Self { s, t, u, v }
    }

    /// `(t, s, v, u)`.
    pub fn swapped(self) -> Self {
        Self::new(self.t, self.s, self.v, self.u)
    }

    fn check(&self, d: &FactoredOddSquarefree) -> Result<()> {
        check_coprime_all(d, &[self.s, self.t, self.u, self.v])
    }
}

impl fmt::Display for SigmaParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{},{})", self.s, self.t, self.u, self.v)
    }
}

fn symbol(x: i128, p: u64) -> i64 {
    jacobi_i128(x, p) as i64
}

/// `sigma_D(s, t, u, v)` from its defining double product.
pub fn sigma(d: &FactoredOddSquarefree, params: SigmaParams) -> Result<i64> {
    params.check(d)?;
    let SigmaParams { s, t, u, v } = params;
    let primes = d.primes();
    let mut total = 0i64;
    for mask in 0..=d.full_mask() {
        let a = d.divisor(mask) as i128;
        let b = d.value() as i128 / a;
        let mut term = 1i64;
        for (i, &p) in primes.iter().enumerate() {
            term *= if mask >> i & 1 == 1 {
                symbol(t.into(), p) + symbol(v as i128 * b, p)
            } else {
                symbol(s.into(), p) + symbol(u as i128 * a, p)
            };
            if term == 0 {
                break;
            }
        }
        total += term;
    }
    Ok(total)
}

/// `S_D(u, v) = sigma_D(1, 1, u, v)`.
pub fn s_value(d: &FactoredOddSquarefree, u: i64, v: i64) -> Result<i64> {
    sigma(d, SigmaParams::new(1, 1, u, v))
}

/// Signs of Jacobi symbols between the prime divisors of `D`, stored as
/// `F_2` bitmasks so that products of symbols become parities.
struct SymbolTable {
    omega: usize,
    /// Bit `j` of `rows[i]` is set iff `(p_j / p_i) = -1`.
    rows: Vec<u64>,
    /// Bit `i` is set iff `p_i = 3 mod 4`.
    minus_one: u64,
}

impl SymbolTable {
    fn new(d: &FactoredOddSquarefree) -> Self {
        let primes = d.primes();
        let rows = primes
            .iter()
            .map(|&pi| {
                primes
                    .iter()
                    .enumerate()
                    .filter(|&(_, &pj)| pj != pi && symbol(pj.into(), pi) == -1)
                    .fold(0u64, |acc, (j, _)| acc | 1 << j)
            })
            .collect();
        Self {
            omega: primes.len(),
            rows,
            minus_one: primes
                .iter()
                .enumerate()
                .filter(|(_, &p)| p % 4 == 3)
                .fold(0, |acc, (i, _)| acc | 1 << i),
        }
    }

    /// Mask of primes `p` with `(x/p) = -1`.
    fn character(&self, d: &FactoredOddSquarefree, x: i64) -> u64 {
        d.primes()
            .iter()
            .enumerate()
            .filter(|(_, &p)| symbol(x.into(), p) == -1)
            .fold(0, |acc, (i, _)| acc | 1 << i)
    }

    /// Parity of `(num / den)` for divisors given as masks.
    fn jacobi_parity(&self, num: u64, den: u64) -> u32 {
        let mut parity = 0;
        let mut rest = den;
        while rest != 0 {
            let i = rest.trailing_zeros() as usize;
            parity ^= (self.rows[i] & num).count_ones();
            rest &= rest - 1;
        }
        parity & 1
    }

    fn beta(&self, mask: u64) -> u32 {
        (self.minus_one & mask).count_ones() & 1
    }

    /// Calls `f(a, b, c, d)` for every ordered factorization into four
    /// divisors, each prime assigned to exactly one slot.
    fn for_each_quadruple(&self, mut f: impl FnMut(u64, u64, u64, u64)) {
        let total = 1u64 << (2 * self.omega);
        for code in 0..total {
            let mut slots = [0u64; 4];
            for i in 0..self.omega {
                slots[(code >> (2 * i) & 3) as usize] |= 1 << i;
            }
            f(slots[0], slots[1], slots[2], slots[3]);
        }
    }
}

fn pm(parity: u32) -> i64 {
    1 - 2 * (parity & 1) as i64
}

fn check_quad_omega(d: &FactoredOddSquarefree) -> Result<()> {
    if d.omega() > QUAD_OMEGA_LIMIT {
        return Err(Error::OmegaTooLarge {
            omega: d.omega(),
            limit: QUAD_OMEGA_LIMIT,
        });
    }
    Ok(())
}

/// `sigma_D(s,t,u,v)` as the quadruple sum
/// `sum_{abcd=D} (-1)^{beta(c)beta(d)} (a/d)(b/c)(s/b)(t/a)(u/d)(v/c)`.
pub fn sigma_quad(d: &FactoredOddSquarefree, params: SigmaParams) -> Result<i64> {
    params.check(d)?;
    check_quad_omega(d)?;
    let table = SymbolTable::new(d);
    let [cs, ct, cu, cv] = [params.s, params.t, params.u, params.v].map(|x| table.character(d, x));
    let mut total = 0i64;
    table.for_each_quadruple(|a, b, c, dd| {
        let parity = table.beta(c) * table.beta(dd)
            + table.jacobi_parity(a, dd)
            + table.jacobi_parity(b, c)
            + (cs & b).count_ones()
            + (ct & a).count_ones()
            + (cu & dd).count_ones()
            + (cv & c).count_ones();
        total += pm(parity);
    });
    Ok(total)
}

/// Right-hand side of the eight-fold averaged identity for `8 S_D(u, v)`:
///
/// ```text
/// sum_{abcd=D} (-1)^{beta(c)beta(d)} (a/d)(b/c) [ 2(u/d)(v/c)
///     + (u/a)(v/c) (m(a) + m(c) + m(d) - m(acd))
///     + (u/d)(v/b) (m(b) + m(c) + m(d) - m(bcd))
///     + (u/a)(v/b) (1 + m(ac) + m(bd) - m(D)) ]
/// ```
///
/// with `m(x) = (-1/x)`.
pub fn averaged_rhs(d: &FactoredOddSquarefree, u: i64, v: i64) -> Result<i64> {
    check_coprime_all(d, &[u, v])?;
    check_quad_omega(d)?;
    let table = SymbolTable::new(d);
    let cu = table.character(d, u);
    let cv = table.character(d, v);
    let full = d.full_mask();
    let m = |mask: u64| pm(table.beta(mask));
    let chi = |c: u64, mask: u64| pm((c & mask).count_ones());
    let mut total = 0i64;
    table.for_each_quadruple(|a, b, c, dd| {
        let base = pm(table.beta(c) * table.beta(dd)
            + table.jacobi_parity(a, dd)
            + table.jacobi_parity(b, c));
        let bracket = 2 * chi(cu, dd) * chi(cv, c)
            + chi(cu, a) * chi(cv, c) * (m(a) + m(c) + m(dd) - m(a | c | dd))
            + chi(cu, dd) * chi(cv, b) * (m(b) + m(c) + m(dd) - m(b | c | dd))
            + chi(cu, a) * chi(cv, b) * (1 + m(a | c) + m(b | dd) - m(full));
        total += base * bracket;
    });
    Ok(total)
}

/// `S_D(u, v)` recovered from the averaged identity, checked against the
/// direct value.
pub fn s_value_averaged(d: &FactoredOddSquarefree, u: i64, v: i64) -> Result<i64> {
    let rhs = averaged_rhs(d, u, v)?;
    if rhs % 8 != 0 {
        return Err(Error::InternalInconsistency(format!(
            "averaged sum {rhs} for D={d}, (u,v)=({u},{v}) is not divisible by 8"
        )));
    }
    let direct = s_value(d, u, v)?;
    if rhs / 8 != direct {
        return Err(Error::InternalInconsistency(format!(
            "averaged S_D({u},{v}) = {} but direct S_D = {direct} for D={d}",
            rhs / 8
        )));
    }
    Ok(rhs / 8)
}

/// The identities checked numerically by [`identity_report`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Identity {
    /// `sigma(s,t,u,v) = sigma(t,s,v,u)`
    Symmetry,
    /// `|sigma(s,t,u,v)| <= S(su, tv)`
    AbsoluteBound,
    /// `S(-1,1) = S(1,1)` when `D = 1 mod 4`
    OneModFourEquality,
    /// `S(1,1) = 2 S(-1,1)` when `D = 3 mod 4`
    ThreeModFourDoubling,
    /// `S(u,1) <= S(-u,1) + S(u,-1) <= 2 S(u,1)`
    TwistedSandwich,
}

impl Identity {
    pub const ALL: [Identity; 5] = [
        Identity::Symmetry,
        Identity::AbsoluteBound,
        Identity::OneModFourEquality,
        Identity::ThreeModFourDoubling,
        Identity::TwistedSandwich,
    ];

    pub fn formula(self) -> &'static str {
        match self {
            Identity::Symmetry => "sigma(s,t,u,v) = sigma(t,s,v,u)",
            Identity::AbsoluteBound => "|sigma(s,t,u,v)| <= S(su,tv)",
            Identity::OneModFourEquality => "D = 1 mod 4 => S(-1,1) = S(1,1)",
            Identity::ThreeModFourDoubling => "D = 3 mod 4 => S(1,1) = 2 S(-1,1)",
            Identity::TwistedSandwich => "S(u,1) <= S(-u,1) + S(u,-1) <= 2 S(u,1)",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdentityOutcome {
    pub identity: Identity,
    /// False when the congruence condition on `D` excludes the identity.
    pub applicable: bool,
    pub cases: usize,
    pub failures: Vec<String>,
}

impl IdentityOutcome {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdentityReport {
    pub d: u64,
    pub outcomes: Vec<IdentityOutcome>,
}

impl IdentityReport {
    pub fn all_passed(&self) -> bool {
        self.outcomes.iter().all(IdentityOutcome::passed)
    }

    pub fn outcome(&self, identity: Identity) -> &IdentityOutcome {
        self.outcomes
            .iter()
            .find(|o| o.identity == identity)
            .expect("every identity is evaluated")
    }
}

/// Parameter values the rank formulas use.
pub const UNITS: [i64; 4] = [-2, -1, 1, 2];

/// Evaluates every identity of [`Identity::ALL`] for `D` over parameters in
/// `{-2, -1, 1, 2}`. Failures are recorded, never raised.
pub fn identity_report(d: &FactoredOddSquarefree) -> IdentityReport {
    // D is odd, so every parameter in UNITS (and every product of two) is coprime to it.
    let s = |u: i64, v: i64| s_value(d, u, v).expect("units are coprime to odd D");
    let sig = |p: SigmaParams| sigma(d, p).expect("units are coprime to odd D");

    let mut symmetry = IdentityOutcome::new(Identity::Symmetry, true);
    let mut bound = IdentityOutcome::new(Identity::AbsoluteBound, true);
    for s_ in UNITS {
        for t in UNITS {
            for u in UNITS {
                for v in UNITS {
                    let p = SigmaParams::new(s_, t, u, v);
                    let value = sig(p);
                    let swapped = sig(p.swapped());
                    symmetry.record(value == swapped, || {
                        format!("sigma{p} = {value} but sigma{} = {swapped}", p.swapped())
                    });
                    let cap = s(s_ * u, t * v);
                    bound.record(value.abs() <= cap, || {
                        format!(
                            "|sigma{p}| = {} > S({},{}) = {cap}",
                            value.abs(),
                            s_ * u,
                            t * v
                        )
                    });
                }
            }
        }
    }

    let (s11, sm11) = (s(1, 1), s(-1, 1));
    let one_mod_four = d.value() % 4 == 1;
    let mut cor_one = IdentityOutcome::new(Identity::OneModFourEquality, one_mod_four);
    let mut cor_three = IdentityOutcome::new(Identity::ThreeModFourDoubling, !one_mod_four);
    if one_mod_four {
        cor_one.record(sm11 == s11, || {
            format!("S(-1,1) = {sm11} != S(1,1) = {s11}")
        });
    } else {
        cor_three.record(s11 == 2 * sm11, || {
            format!("S(1,1) = {s11} != 2 S(-1,1) = {}", 2 * sm11)
        });
    }

    let mut sandwich = IdentityOutcome::new(Identity::TwistedSandwich, true);
    for u in UNITS {
        let lower = s(u, 1);
        let middle = s(-u, 1) + s(u, -1);
        sandwich.record(lower <= middle && middle <= 2 * lower, || {
            format!("u={u}: S(u,1) = {lower}, S(-u,1)+S(u,-1) = {middle}")
        });
    }

    IdentityReport {
        d: d.value(),
        outcomes: vec![symmetry, bound, cor_one, cor_three, sandwich],
    }
}

impl IdentityOutcome {
    fn new(identity: Identity, applicable: bool) -> Self {
        Self {
            identity,
            applicable,
            cases: 0,
            failures: Vec::new(),
        }
    }

    fn record(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures.push(describe());
        }
    }
}

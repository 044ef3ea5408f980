//! `E_D(u, v)` straight from its definition: the number of ordered pairs
//! `(a, b)` with `ab = D`, `ua` a square modulo `b` and `vb` a square modulo
//! `a`. This is the reference the other two methods are checked against.

use crate::arith::{factor_squarefree_odd, gcd, jacobi_i128, FactoredOddSquarefree};
use crate::{Error, Result};

/// Largest modulus [`SquareTest::Enumerate`] will scan.
pub const ENUMERATION_LIMIT: u64 = 1_000_000;

/// How "x is a square modulo m" is decided.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SquareTest {
    /// Scan every residue `t` in `[0, m)`.
    Enumerate,
    /// `(x/p) = 1` for every prime `p | m`.
    #[default]
    Legendre,
}

/// Whether `x` is a square modulo the odd squarefree `m`, with `gcd(x, m) = 1`.
pub fn is_square_mod(x: i64, m: i64, mode: SquareTest) -> Result<bool> {
    let factored = factor_squarefree_odd(m)?;
    is_square_mod_factored(x as i128, factored.value(), factored.primes(), mode)
}

pub(crate) fn is_square_mod_factored(
    x: i128,
    m: u64,
    primes: &[u64],
    mode: SquareTest,
) -> Result<bool> {
    let r = x.rem_euclid(m as i128) as u64;
    if gcd(r, m) != 1 {
        return Err(Error::NotCoprime { a: x, b: m.into() });
    }
    match mode {
        SquareTest::Legendre => Ok(primes.iter().all(|&p| jacobi_i128(x, p) == 1)),
        SquareTest::Enumerate => {
            if m > ENUMERATION_LIMIT {
                return Err(Error::EnumerationTooLarge(m));
            }
            let mut sq = 0u64;
            // (t+1)^2 = t^2 + 2t + 1
            for t in 0..m {
                if sq == r {
                    return Ok(true);
                }
                sq = (sq + 2 * t + 1) % m;
            }
            Ok(false)
        }
    }
}

fn check_coprime(d: &FactoredOddSquarefree, u: i64) -> Result<()> {
    let r = (u as i128).rem_euclid(d.value() as i128) as u64;
    if gcd(r, d.value()) != 1 {
        return Err(Error::NotCoprime {
            a: u.into(),
            b: d.value().into(),
        });
    }
    Ok(())
}

pub(crate) fn check_coprime_all(d: &FactoredOddSquarefree, values: &[i64]) -> Result<()> {
    values.iter().try_for_each(|&x| check_coprime(d, x))
}

/// `E_D(u, v)` with Legendre-mode square tests.
pub fn e_direct(d: &FactoredOddSquarefree, u: i64, v: i64) -> Result<u64> {
    e_direct_with(d, u, v, SquareTest::Legendre)
}

pub fn e_direct_with(d: &FactoredOddSquarefree, u: i64, v: i64, mode: SquareTest) -> Result<u64> {
    check_coprime_all(d, &[u, v])?;
    let mut count = 0;
    let primes = d.primes();
    for mask in 0..=d.full_mask() {
        let a = d.divisor(mask);
        let b = d.value() / a;
        let a_primes: Vec<u64> = select(primes, mask);
        let b_primes: Vec<u64> = select(primes, !mask);
        let ua = u as i128 * a as i128;
        let vb = v as i128 * b as i128;
        if is_square_mod_factored(ua, b, &b_primes, mode)?
            && is_square_mod_factored(vb, a, &a_primes, mode)?
        {
            count += 1;
        }
    }
    Ok(count)
}

fn select(primes: &[u64], mask: u64) -> Vec<u64> {
    primes
        .iter()
        .enumerate()
        .filter(|(i, _)| mask >> i & 1 == 1)
        .map(|(_, &p)| p)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::factor_squarefree_odd;

    fn fd(n: i64) -> FactoredOddSquarefree {
        factor_squarefree_odd(n).unwrap()
    }

    const UV: [i64; 4] = [-2, -1, 1, 2];

    #[test]
    fn square_mod_examples() {
        for mode in [SquareTest::Enumerate, SquareTest::Legendre] {
            assert_eq!(is_square_mod(7, 1, mode), Ok(true));
            assert_eq!(is_square_mod(-3, 1, mode), Ok(true));
            assert_eq!(is_square_mod(2, 5, mode), Ok(false));
            assert_eq!(is_square_mod(-1, 5, mode), Ok(true));
            assert!(matches!(
                is_square_mod(5, 15, mode),
                Err(Error::NotCoprime { .. })
            ));
            assert!(is_square_mod(1, 9, mode).is_err());
        }
        assert_eq!(
            is_square_mod(1, 1_000_003, SquareTest::Enumerate),
            Err(Error::EnumerationTooLarge(1_000_003))
        );
        assert_eq!(is_square_mod(1, 1_000_003, SquareTest::Legendre), Ok(true));
    }

    #[test]
    fn square_modes_agree_on_composites() {
        for m in [15i64, 21, 105, 1155, 3 * 5 * 7 * 11 * 13] {
            for x in -200i64..200 {
                if gcd(x.rem_euclid(m) as u64, m as u64) != 1 {
                    continue;
                }
                assert_eq!(
                    is_square_mod(x, m, SquareTest::Enumerate),
                    is_square_mod(x, m, SquareTest::Legendre),
                    "x={x} m={m}"
                );
            }
        }
    }

    #[test]
    fn e_direct_examples() {
        for u in UV {
            for v in UV {
                assert_eq!(e_direct(&fd(1), u, v), Ok(1));
            }
        }
        assert_eq!(e_direct(&fd(5), 1, 1), Ok(2));
        assert_eq!(e_direct(&fd(5), 2, 2), Ok(0));
        assert_eq!(e_direct_with(&fd(5), 2, 2, SquareTest::Enumerate), Ok(0));
        assert_eq!(e_direct(&fd(5), 2, 1), Ok(1));
        assert!(matches!(
            e_direct(&fd(15), 3, 1),
            Err(Error::NotCoprime { .. })
        ));
        assert!(matches!(
            e_direct(&fd(15), 1, 10),
            Err(Error::NotCoprime { .. })
        ));
    }

    #[test]
    fn modes_agree_small_d() {
        for n in (1..=3000i64).step_by(2) {
            let Ok(d) = factor_squarefree_odd(n) else {
                continue;
            };
            for u in UV {
                for v in UV {
                    assert_eq!(
                        e_direct_with(&d, u, v, SquareTest::Enumerate).unwrap(),
                        e_direct_with(&d, u, v, SquareTest::Legendre).unwrap(),
                        "D={n} u={u} v={v}"
                    );
                }
            }
        }
    }

    #[test]
    fn symmetry_and_lower_bounds() {
        for n in (1..=2000i64).step_by(2) {
            let Ok(d) = factor_squarefree_odd(n) else {
                continue;
            };
            assert!(e_direct(&d, 1, 1).unwrap() >= 1);
            assert!(e_direct(&d, -1, 1).unwrap() >= 1);
            for u in UV {
                for v in UV {
                    let e = e_direct(&d, u, v).unwrap();
                    assert_eq!(e, e_direct(&d, v, u).unwrap());
                    assert!(e == 0 || e.is_power_of_two(), "D={n}: E({u},{v})={e}");
                }
            }
        }
    }

    #[test]
    fn depends_only_on_residues() {
        for n in [15i64, 105, 1001, 1155, 4199] {
            let d = fd(n);
            for u in UV {
                for v in UV {
                    for k in [-3i64, 1, 7] {
                        assert_eq!(
                            e_direct(&d, u, v).unwrap(),
                            e_direct(&d, u + 2 * n * k, v - 2 * n * k).unwrap()
                        );
                    }
                }
            }
        }
    }
}

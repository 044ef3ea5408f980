//! `E_D(u, v)` as the number of points of an affine subspace of `F_2^omega`.
//!
//! A divisor `a | D` is encoded by its indicator vector `x` (`x_i = 1` iff
//! `p_i | a`). The pair `(a, D/a)` satisfies both square conditions exactly
//! when `x` solves, for every `i`,
//!
//! ```text
//! (beta_u(p_i) + beta_v(p_i) + sum_{j != i} alpha(p_j, p_i)) x_i
//!     + sum_{j != i} alpha(p_j, p_i) x_j = beta_u(p_i)
//! ```
//!
//! Rows are stored as `u64` bitsets (bit `j` = coefficient of `x_j`), which is
//! enough since a 63-bit `D` has at most 15 prime factors.

use std::fmt;

use crate::arith::{alpha, beta_u, FactoredOddSquarefree, F2};
use crate::counting::check_coprime_all;
use crate::Result;

/// A square system `M x = rhs` over `F_2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct F2AffineSystem {
    n: usize,
    rows: Vec<u64>,
    rhs: u64,
}

impl F2AffineSystem {
    pub fn new(n: usize, rows: Vec<u64>, rhs: u64) -> Self {
        assert!(n <= 64 && rows.len() == n);
        let mask = low_mask(n);
        assert!(rows.iter().all(|r| r & !mask == 0) && rhs & !mask == 0);
        Self { n, rows, rhs }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> &[u64] {
        &self.rows
    }

    pub fn entry(&self, i: usize, j: usize) -> F2 {
        F2::from(self.rows[i] >> j & 1 == 1)
    }

    pub fn rhs(&self, i: usize) -> F2 {
        F2::from(self.rhs >> i & 1 == 1)
    }

    pub fn is_homogeneous(&self) -> bool {
        self.rhs == 0
    }

    /// Whether the vector with bits `x` satisfies every equation.
    pub fn is_solution(&self, x: u64) -> bool {
        self.rows
            .iter()
            .enumerate()
            .all(|(i, row)| (row & x).count_ones() & 1 == (self.rhs >> i & 1) as u32)
    }

    pub fn same_matrix(&self, other: &F2AffineSystem) -> bool {
        self.n == other.n && self.rows == other.rows
    }
}

/// Debug dump: one row per line as `0`/`1` characters, then ` | ` and the
/// right-hand side bit.
impl fmt::Display for F2AffineSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, row) in self.rows.iter().enumerate() {
            for j in 0..self.n {
                write!(f, "{}", row >> j & 1)?;
            }
            writeln!(f, " | {}", self.rhs >> i & 1)?;
        }
        Ok(())
    }
}

fn low_mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Number of solutions of an affine system: empty, or `2^dim` points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SolutionCount {
    Empty,
    Affine { dim: u32 },
}

impl SolutionCount {
    pub fn count(self) -> u64 {
        match self {
            SolutionCount::Empty => 0,
            SolutionCount::Affine { dim } => 1 << dim,
        }
    }

    pub fn dim(self) -> Option<u32> {
        match self {
            SolutionCount::Empty => None,
            SolutionCount::Affine { dim } => Some(dim),
        }
    }
}

/// Matrix of `alpha(p_j, p_i)` with row `i`, column `j` and a zero diagonal.
fn off_diagonal(d: &FactoredOddSquarefree) -> Vec<u64> {
    let primes = d.primes();
    primes
        .iter()
        .enumerate()
        .map(|(i, &pi)| {
            primes
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .fold(0u64, |row, (j, &pj)| {
                    let a = alpha(pj as i64, pi as i64).expect("distinct primes are coprime");
                    row | a.bit() << j
                })
        })
        .collect()
}

pub fn build_system(d: &FactoredOddSquarefree, u: i64, v: i64) -> Result<F2AffineSystem> {
    check_coprime_all(d, &[u, v])?;
    let mut rows = off_diagonal(d);
    let mut rhs = 0u64;
    for (i, &p) in d.primes().iter().enumerate() {
        let bu = beta_u(u, p as i64)?;
        let bv = beta_u(v, p as i64)?;
        let row_sum = F2::from(rows[i].count_ones() % 2 == 1);
        let diag = bu + bv + row_sum;
        rows[i] |= diag.bit() << i;
        rhs |= bu.bit() << i;
    }
    Ok(F2AffineSystem::new(d.omega(), rows, rhs))
}

/// Gaussian elimination on a copy of the system. Pivots are taken in column
/// order, using the first row (top-down) with a nonzero entry.
pub fn solve_count(sys: &F2AffineSystem) -> SolutionCount {
    let n = sys.n;
    // Augmented rows: bit n carries the right-hand side.
    let mut rows: Vec<u128> = sys
        .rows
        .iter()
        .enumerate()
        .map(|(i, &r)| r as u128 | ((sys.rhs >> i & 1) as u128) << n)
        .collect();
    let mut rank = 0usize;
    for col in 0..n {
        let Some(pivot) = (rank..n).find(|&r| rows[r] >> col & 1 == 1) else {
            continue;
        };
        rows.swap(rank, pivot);
        let prow = rows[rank];
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && *row >> col & 1 == 1 {
                *row ^= prow;
            }
        }
        rank += 1;
    }
    // Rows below the rank have a zero coefficient part.
    if rows[rank..].iter().any(|&r| r != 0) {
        SolutionCount::Empty
    } else {
        SolutionCount::Affine {
            dim: (n - rank) as u32,
        }
    }
}

/// `E_D(u, v)` as the size of the solution set of [`build_system`].
pub fn e_affine(d: &FactoredOddSquarefree, u: i64, v: i64) -> Result<u64> {
    Ok(solve_count(&build_system(d, u, v)?).count())
}

/// The classical Rédei-style matrix: same off-diagonal entries as
/// [`build_system`], diagonal `omega + 1 + sum_{l != i} alpha(p_l, p_i)`.
pub fn redei_matrix(d: &FactoredOddSquarefree) -> F2AffineSystem {
    let mut rows = off_diagonal(d);
    let base = F2::from((d.omega() + 1) % 2 == 1);
    for (i, row) in rows.iter_mut().enumerate() {
        let diag = base + F2::from(row.count_ones() % 2 == 1);
        *row |= diag.bit() << i;
    }
    F2AffineSystem::new(d.omega(), rows, 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::factor_squarefree_odd;
    use crate::counting::{e_direct, is_square_mod};

    fn fd(n: i64) -> FactoredOddSquarefree {
        factor_squarefree_odd(n).unwrap()
    }

    #[test]
    fn build_examples() {
        let s = build_system(&fd(1), 3, -7).unwrap();
        assert_eq!(s.dim(), 0);
        assert_eq!(s.to_string(), "");

        let s = build_system(&fd(5), -1, 1).unwrap();
        assert_eq!(s.to_string(), "0 | 0\n");
        let s = build_system(&fd(5), 2, 2).unwrap();
        assert_eq!(s.to_string(), "0 | 1\n");
        assert!(build_system(&fd(15), 5, 1).is_err());
    }

    #[test]
    fn solve_examples() {
        assert_eq!(
            solve_count(&F2AffineSystem::new(0, vec![], 0)),
            SolutionCount::Affine { dim: 0 }
        );
        assert_eq!(solve_count(&F2AffineSystem::new(0, vec![], 0)).count(), 1);
        assert_eq!(
            solve_count(&F2AffineSystem::new(1, vec![0], 0)),
            SolutionCount::Affine { dim: 1 }
        );
        assert_eq!(
            solve_count(&F2AffineSystem::new(1, vec![0], 1)),
            SolutionCount::Empty
        );
        assert_eq!(SolutionCount::Empty.count(), 0);
        assert_eq!(SolutionCount::Empty.dim(), None);
    }

    /// Counts solutions by trying all 2^n vectors.
    fn brute_count(sys: &F2AffineSystem) -> u64 {
        (0..1u64 << sys.dim())
            .filter(|&x| sys.is_solution(x))
            .count() as u64
    }

    #[test]
    fn elimination_matches_brute_force() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        for _ in 0..3000 {
            let n = rng.gen_range(0..=10usize);
            let mask = low_mask(n);
            let rows: Vec<u64> = (0..n)
                .map(|_| rng.gen::<u64>() & rng.gen::<u64>() & mask)
                .collect();
            let sys = F2AffineSystem::new(n, rows, rng.gen::<u64>() & mask);
            assert_eq!(solve_count(&sys).count(), brute_count(&sys), "{sys}");
        }
    }

    #[test]
    fn wide_system() {
        let identity: Vec<u64> = (0..64).map(|i| 1u64 << i).collect();
        let sys = F2AffineSystem::new(64, identity.clone(), u64::MAX);
        assert_eq!(solve_count(&sys), SolutionCount::Affine { dim: 0 });
        let mut singular = identity;
        singular[63] = 0;
        assert_eq!(
            solve_count(&F2AffineSystem::new(64, singular.clone(), 1 << 63)),
            SolutionCount::Empty
        );
        assert_eq!(
            solve_count(&F2AffineSystem::new(64, singular, 1)),
            SolutionCount::Affine { dim: 1 }
        );
    }

    #[test]
    fn e_affine_examples() {
        assert_eq!(e_affine(&fd(5), -1, 1), Ok(2));
        assert_eq!(e_affine(&fd(5), 2, 2), Ok(0));
        assert_eq!(e_affine(&fd(1), -2, 2), Ok(1));
    }

    #[test]
    fn redei_examples() {
        assert_eq!(redei_matrix(&fd(1)).dim(), 0);
        assert_eq!(redei_matrix(&fd(5)).rows(), &[0]);
        let r = redei_matrix(&fd(15));
        let s = build_system(&fd(15), 1, 1).unwrap();
        assert_eq!(r.entry(0, 1), s.entry(0, 1));
        assert_eq!(r.entry(1, 0), s.entry(1, 0));
        assert_eq!(r.entry(0, 1), alpha(5, 3).unwrap());
        assert_eq!(r.entry(1, 0), alpha(3, 5).unwrap());
    }

    #[test]
    fn structural_properties() {
        for n in (1..=5000i64).step_by(2) {
            let Ok(d) = factor_squarefree_odd(n) else {
                continue;
            };
            let all_ones = d.full_mask();
            let s11 = build_system(&d, 1, 1).unwrap();
            let sm11 = build_system(&d, -1, 1).unwrap();
            let s22 = build_system(&d, 2, 2).unwrap();
            let sm22 = build_system(&d, -2, 2).unwrap();
            assert!(s11.is_homogeneous());
            assert!(s11.is_solution(all_ones));
            assert!(sm11.is_solution(all_ones));
            assert!(s22.same_matrix(&s11));
            assert!(sm22.same_matrix(&sm11));
            let e22 = solve_count(&s22).count();
            assert!(e22 == 0 || e22 == solve_count(&s11).count());
            let em22 = solve_count(&sm22).count();
            assert!(em22 == 0 || em22 == solve_count(&sm11).count());
        }
    }

    #[test]
    fn membership_matches_square_conditions() {
        for n in [1i64, 15, 105, 1155, 3 * 7 * 17 * 41, 5 * 13 * 29 * 37 * 53] {
            let d = fd(n);
            for u in [-2i64, -1, 1, 2] {
                for v in [-2i64, -1, 1, 2] {
                    let sys = build_system(&d, u, v).unwrap();
                    for mask in 0..=d.full_mask() {
                        let a = d.divisor(mask) as i64;
                        let b = n / a;
                        let direct = is_square_mod(u * a, b, Default::default()).unwrap()
                            && is_square_mod(v * b, a, Default::default()).unwrap();
                        assert_eq!(sys.is_solution(mask), direct, "D={n} a={a} u={u} v={v}");
                    }
                    assert_eq!(solve_count(&sys).count(), e_direct(&d, u, v).unwrap());
                }
            }
        }
    }
}

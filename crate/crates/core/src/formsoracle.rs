//! Narrow class groups as form class groups of primitive binary quadratic
//! forms `ax^2 + bxy + cy^2`, used as an independent check on the rank
//! formulas.
//!
//! For a negative discriminant every class has a unique reduced positive
//! definite representative. For a positive discriminant the reduced forms of
//! a proper equivalence class make up exactly one cycle under the reduction
//! operator [`rho`], so classes are cycles and the group obtained is the
//! narrow class group.

use std::collections::HashMap;
use std::fmt;

use crate::{Error, Result};

/// Default limit on `|disc|` accepted by [`class_group`].
pub const DEFAULT_BOUND: u64 = 1_000_000;

/// Largest class number for which a full composition table is built.
pub const TABLE_LIMIT: usize = 5000;

const REDUCTION_STEP_LIMIT: usize = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QuadForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl QuadForm {
    pub const fn new(a: i64, b: i64, c: i64) -> Self {
        Self { a, b, c }
    }

    pub fn disc(&self) -> i64 {
        let d = self.b as i128 * self.b as i128 - 4 * self.a as i128 * self.c as i128;
        i64::try_from(d).expect("discriminant fits in i64")
    }

    pub fn is_primitive(&self) -> bool {
        gcd(gcd(self.a, self.b), self.c) == 1
    }

    /// The inverse class is represented by `(a, -b, c)`.
    pub fn inverse(&self) -> Self {
        Self::new(self.a, -self.b, self.c)
    }

    fn from_wide(a: i128, b: i128, c: i128) -> Result<Self> {
        let narrow = |x: i128| {
            i64::try_from(x)
                .map_err(|_| Error::InternalInconsistency(format!("coefficient {x} overflows")))
        };
        Ok(Self::new(narrow(a)?, narrow(b)?, narrow(c)?))
    }
}

impl fmt::Display for QuadForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.a, self.b, self.c)
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.unsigned_abs(), b.unsigned_abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a as i64
}

/// `(g, x, y)` with `ax + by = g = gcd(a, b) >= 0`.
fn xgcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut r0, mut r1) = (a, b);
    let (mut x0, mut x1) = (1i128, 0i128);
    let (mut y0, mut y1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (x0, x1) = (x1, x0 - q * x1);
        (y0, y1) = (y1, y0 - q * y1);
    }
    if r0 < 0 {
        (-r0, -x0, -y0)
    } else {
        (r0, x0, y0)
    }
}

fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

fn is_square(n: i64) -> bool {
    n >= 0 && isqrt(n as u64).pow(2) == n as u64
}

fn is_squarefree(n: u64) -> bool {
    let mut rest = n;
    let mut p = 2u64;
    while p <= rest / p {
        if rest.is_multiple_of(p) {
            rest /= p;
            if rest.is_multiple_of(p) {
                return false;
            }
        }
        p += 1;
    }
    true
}

/// Whether `disc` is the discriminant of a quadratic field.
pub fn is_fundamental(disc: i64) -> bool {
    if disc == 0 || disc == 1 {
        return false;
    }
    match disc.rem_euclid(4) {
        1 => is_squarefree(disc.unsigned_abs()),
        0 => {
            let m = disc / 4;
            matches!(m.rem_euclid(4), 2 | 3) && is_squarefree(m.unsigned_abs())
        }
        _ => false,
    }
}

/// The identity of the class group: `(1, 0, -disc/4)` or `(1, 1, (1-disc)/4)`.
pub fn principal_form(disc: i64) -> QuadForm {
    if disc.rem_euclid(4) == 0 {
        QuadForm::new(1, 0, -disc / 4)
    } else {
        QuadForm::new(1, 1, (1 - disc) / 4)
    }
}

fn validate(f: &QuadForm) -> Result<i64> {
    let disc = f.disc();
    if is_square(disc) {
        return Err(Error::SquareDiscriminant(disc));
    }
    if !f.is_primitive() || (disc < 0 && f.a <= 0) {
        return Err(Error::NotPrimitive {
            a: f.a,
            b: f.b,
            c: f.c,
        });
    }
    Ok(disc)
}

/// Reduced condition for positive discriminants:
/// `0 < b < sqrt(disc)` and `sqrt(disc) - b < 2|a| < sqrt(disc) + b`.
pub fn is_reduced(f: &QuadForm) -> bool {
    let disc = f.disc() as i128;
    let (a, b, c) = (f.a as i128, f.b as i128, f.c as i128);
    if disc < 0 {
        return b.abs() <= a && a <= c && (b >= 0 || (b.abs() != a && a != c));
    }
    let two_a = 2 * a.abs();
    b > 0
        && b * b < disc
        && disc < (two_a + b).pow(2)
        && (two_a - b <= 0 || (two_a - b).pow(2) < disc)
}

/// The reduction operator on indefinite forms:
/// `(a, b, c) -> (c, b', (b'^2 - disc)/(4c))` with `b' = -b mod 2|c|`, taken in
/// `(-|c|, |c|]` when `|c| > sqrt(disc)` and in `(sqrt(disc) - 2|c|, sqrt(disc))`
/// otherwise.
pub fn rho(f: &QuadForm) -> QuadForm {
    let disc = f.disc() as i128;
    debug_assert!(disc > 0);
    let c = f.c as i128;
    let modulus = 2 * c.abs();
    let b = f.b as i128;
    let b_new = if c * c > disc {
        let mut r = (-b).rem_euclid(modulus);
        if r > c.abs() {
            r -= modulus;
        }
        r
    } else {
        let sq = isqrt(disc as u64) as i128;
        sq - (sq + b).rem_euclid(modulus)
    };
    let a_new = (b_new * b_new - disc) / (4 * c);
    QuadForm::from_wide(c, b_new, a_new).expect("reduction shrinks coefficients")
}

fn reduce_definite(f: &QuadForm) -> QuadForm {
    let disc = f.disc() as i128;
    let (mut a, mut b, mut c) = (f.a as i128, f.b as i128, f.c as i128);
    loop {
        if !(-a < b && b <= a) {
            let mut r = b.rem_euclid(2 * a);
            if r > a {
                r -= 2 * a;
            }
            b = r;
            c = (b * b - disc) / (4 * a);
        }
        if a > c {
            (a, b, c) = (c, -b, a);
            continue;
        }
        break;
    }
    if b < 0 && a == c {
        b = -b;
    }
    QuadForm::from_wide(a, b, c).expect("reduced coefficients are bounded by the input")
}

/// A reduced form equivalent to `f`: the unique one for `disc < 0`, the first
/// one reached by iterating [`rho`] for `disc > 0`.
pub fn reduce(f: &QuadForm) -> Result<QuadForm> {
    let disc = validate(f)?;
    if disc < 0 {
        return Ok(reduce_definite(f));
    }
    let mut g = *f;
    for _ in 0..REDUCTION_STEP_LIMIT {
        if is_reduced(&g) {
            return Ok(g);
        }
        g = rho(&g);
    }
    Err(Error::InternalInconsistency(format!(
        "reduction of {f} did not terminate"
    )))
}

/// The reduced forms on the cycle of the reduced indefinite form `f`.
pub fn cycle(f: &QuadForm) -> Vec<QuadForm> {
    let mut out = vec![*f];
    let mut g = rho(f);
    while g != *f {
        out.push(g);
        g = rho(&g);
    }
    out
}

/// The reduced representative of `f` for `disc < 0`; the smallest form on its
/// cycle for `disc > 0`.
pub fn canonical(f: &QuadForm) -> Result<QuadForm> {
    let r = reduce(f)?;
    if r.disc() < 0 {
        Ok(r)
    } else {
        Ok(cycle(&r).into_iter().min().expect("cycles are nonempty"))
    }
}

/// A form in the product class (not reduced).
fn compose_raw(f: &QuadForm, g: &QuadForm) -> Result<QuadForm> {
    let disc = f.disc() as i128;
    let (a1, b1) = (f.a as i128, f.b as i128);
    let (a2, b2) = (g.a as i128, g.b as i128);
    let half_sum = (b1 + b2) / 2;
    let (e1, x1, y1) = xgcd(a1, a2);
    let (e, x2, z) = xgcd(e1, half_sum);
    let (x, y) = (x2 * x1, x2 * y1);
    let a3 = a1 * a2 / (e * e);
    let numerator = x * a1 * b2 + y * a2 * b1 + z * (b1 * b2 + disc) / 2;
    if numerator % e != 0 {
        return Err(Error::InternalInconsistency(format!(
            "composition of {f} and {g}: B not integral"
        )));
    }
    let modulus = 2 * a3.abs();
    let b3 = (numerator / e).rem_euclid(modulus);
    let c_num = b3 * b3 - disc;
    if c_num % (4 * a3) != 0 {
        return Err(Error::InternalInconsistency(format!(
            "composition of {f} and {g}: C not integral"
        )));
    }
    QuadForm::from_wide(a3, b3, c_num / (4 * a3))
}

/// Composition of classes, returned as the [`canonical`] representative.
pub fn compose(f: &QuadForm, g: &QuadForm, disc: i64) -> Result<QuadForm> {
    for h in [f, g] {
        if h.disc() != disc {
            return Err(Error::DiscriminantMismatch(h.disc(), disc));
        }
        validate(h)?;
    }
    canonical(&compose_raw(f, g)?)
}

fn reduced_forms(disc: i64) -> Vec<QuadForm> {
    let mut out = Vec::new();
    if disc < 0 {
        let n = disc.unsigned_abs() as i64;
        let mut a = 1i64;
        while 3 * a * a <= n {
            for b in -a + 1..=a {
                if (b - disc).rem_euclid(2) != 0 {
                    continue;
                }
                let num = b * b - disc;
                if num % (4 * a) != 0 {
                    continue;
                }
                let f = QuadForm::new(a, b, num / (4 * a));
                if is_reduced(&f) && f.is_primitive() {
                    out.push(f);
                }
            }
            a += 1;
        }
    } else {
        let sq = isqrt(disc as u64) as i64;
        for b in 1..=sq {
            if (b - disc).rem_euclid(2) != 0 {
                continue;
            }
            // ac = (b^2 - disc)/4 < 0
            let n = (disc - b * b) / 4;
            let mut small = 1i64;
            while small * small <= n {
                if n % small == 0 {
                    let large = n / small;
                    let divisors = if large == small {
                        vec![small]
                    } else {
                        vec![small, large]
                    };
                    for a in divisors.into_iter().flat_map(|a0| [a0, -a0]) {
                        let f = QuadForm::new(a, b, -n / a);
                        if is_reduced(&f) && f.is_primitive() {
                            out.push(f);
                        }
                    }
                }
                small += 1;
            }
        }
    }
    out
}

/// The narrow class group of a fundamental discriminant, as a list of class
/// representatives with a lookup from every reduced form to its class.
#[derive(Debug, Clone)]
pub struct ClassGroup {
    disc: i64,
    elements: Vec<QuadForm>,
    identity: usize,
    index: HashMap<QuadForm, usize>,
    reduced_count: usize,
}

impl ClassGroup {
    pub fn disc(&self) -> i64 {
        self.disc
    }

    pub fn class_number(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[QuadForm] {
        &self.elements
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    /// Number of reduced forms (equals the class number when `disc < 0`).
    pub fn reduced_form_count(&self) -> usize {
        self.reduced_count
    }

    /// Index of the class containing `f`.
    pub fn index_of(&self, f: &QuadForm) -> Result<usize> {
        if f.disc() != self.disc {
            return Err(Error::DiscriminantMismatch(f.disc(), self.disc));
        }
        let r = reduce(f)?;
        self.index.get(&r).copied().ok_or_else(|| {
            Error::InternalInconsistency(format!("reduced form {r} missing from the class list"))
        })
    }

    pub fn compose_idx(&self, i: usize, j: usize) -> Result<usize> {
        self.index_of(&compose_raw(&self.elements[i], &self.elements[j])?)
    }

    pub fn inverse_idx(&self, i: usize) -> Result<usize> {
        self.index_of(&self.elements[i].inverse())
    }

    /// `x -> x^2` as an index map.
    pub fn square_map(&self) -> Result<Vec<usize>> {
        (0..self.class_number())
            .map(|i| self.compose_idx(i, i))
            .collect()
    }

    /// `N_2 = #{x : x^2 = 1}` and `N_4 = #{x : x^4 = 1}`.
    pub fn torsion_counts(&self) -> Result<(u64, u64)> {
        let sq = self.square_map()?;
        let n2 = sq.iter().filter(|&&y| y == self.identity).count() as u64;
        let n4 = sq.iter().filter(|&&y| sq[y] == self.identity).count() as u64;
        Ok((n2, n4))
    }

    /// Full composition table; refused above [`TABLE_LIMIT`] classes.
    pub fn table(&self) -> Result<ClassGroupTable> {
        let h = self.class_number();
        if h > TABLE_LIMIT {
            return Err(Error::BoundExceeded {
                disc: self.disc,
                bound: TABLE_LIMIT as u64,
            });
        }
        let mut op = Vec::with_capacity(h * h);
        for i in 0..h {
            for j in 0..h {
                op.push(self.compose_idx(i, j)? as u32);
            }
        }
        Ok(ClassGroupTable {
            disc: self.disc,
            elements: self.elements.clone(),
            identity: self.identity,
            op,
        })
    }
}

/// A finite abelian group given by its full multiplication table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassGroupTable {
    pub disc: i64,
    pub elements: Vec<QuadForm>,
    pub identity: usize,
    op: Vec<u32>,
}

impl ClassGroupTable {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn op(&self, i: usize, j: usize) -> usize {
        self.op[i * self.len() + j] as usize
    }
}

pub fn class_group(disc: i64) -> Result<ClassGroup> {
    class_group_bounded(disc, DEFAULT_BOUND)
}

pub fn class_group_bounded(disc: i64, bound: u64) -> Result<ClassGroup> {
    if !is_fundamental(disc) {
        return Err(Error::NotFundamental {
            d: disc.into(),
            reason: "not a fundamental discriminant".into(),
        });
    }
    if disc.unsigned_abs() > bound {
        return Err(Error::BoundExceeded { disc, bound });
    }
    let forms = reduced_forms(disc);
    let reduced_count = forms.len();
    let mut index = HashMap::with_capacity(forms.len());
    let mut elements = Vec::new();
    if disc < 0 {
        for f in forms {
            index.insert(f, elements.len());
            elements.push(f);
        }
    } else {
        for f in forms {
            if index.contains_key(&f) {
                continue;
            }
            let members = cycle(&f);
            let class = elements.len();
            elements.push(*members.iter().min().expect("cycles are nonempty"));
            for g in members {
                index.insert(g, class);
            }
        }
    }
    let mut group = ClassGroup {
        disc,
        elements,
        identity: 0,
        index,
        reduced_count,
    };
    group.identity = group.index_of(&principal_form(disc))?;
    Ok(group)
}

/// `rk4` of the narrow class group: `log2(N_4 / N_2)`.
pub fn rk4_oracle(disc: i64) -> Result<u32> {
    rk4_of(&class_group(disc)?)
}

pub fn rk4_of(group: &ClassGroup) -> Result<u32> {
    let (n2, n4) = group.torsion_counts()?;
    if !n2.is_power_of_two() || !n4.is_power_of_two() || n4 % n2 != 0 {
        return Err(Error::InternalInconsistency(format!(
            "disc {}: N2 = {n2}, N4 = {n4} do not come from an abelian group",
            group.disc
        )));
    }
    Ok((n4 / n2).trailing_zeros())
}

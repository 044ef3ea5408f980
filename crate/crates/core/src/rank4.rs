//! 4-ranks of a real quadratic field `K` and its reflection `K#`.
//!
//! Every positive fundamental discriminant `d_K` falls in one of three shapes,
//! each tied to an odd squarefree `D`:
//!
//! | case       | `d_K` | `D mod 4` | `d_K#` |
//! |------------|-------|-----------|--------|
//! | `OneMod4`  | `D`   | 1         | `-4D`  |
//! | `ZeroMod8` | `8D`  | any       | `-8D`  |
//! | `FourMod8` | `4D`  | 3         | `-D`   |
//!
//! and in each case `2^rk4` of both fields is a short combination of the
//! counts `E_D(u, v)` with `u, v` in `{+-1, +-2}`.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::affine::e_affine;
use crate::arith::{factor_squarefree_odd, FactoredOddSquarefree};
use crate::charsum::s_value;
use crate::counting::e_direct;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum CaseTag {
    OneMod4,
    ZeroMod8,
    FourMod8,
}

impl fmt::Display for CaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CaseTag::OneMod4 => "OneMod4",
            CaseTag::ZeroMod8 => "ZeroMod8",
            CaseTag::FourMod8 => "FourMod8",
        };
        f.write_str(s)
    }
}

/// A real quadratic field identified by its discriminant, with the odd
/// squarefree core `D` and the discriminant of its reflection.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DiscriminantCase {
    pub tag: CaseTag,
    pub core: FactoredOddSquarefree,
    pub d_k: u64,
    pub d_sharp: i64,
}

fn not_fundamental(d: i64, reason: impl Into<String>) -> Error {
    Error::NotFundamental {
        d: d.into(),
        reason: reason.into(),
    }
}

fn squarefree_core(d: i64, core: i64, shape: &str) -> Result<FactoredOddSquarefree> {
    factor_squarefree_odd(core)
        .map_err(|_| not_fundamental(d, format!("{shape} requires D = {core} to be squarefree")))
}

/// Matches `d` against the three shapes `D`, `8D`, `4D`.
pub fn classify(d: i64) -> Result<DiscriminantCase> {
    if d <= 0 {
        return Err(not_fundamental(d, "d must be positive"));
    }
    if d == 1 {
        return Err(not_fundamental(
            d,
            "1 is not the discriminant of a quadratic field",
        ));
    }
    let (tag, core, d_sharp) = match d % 8 {
        1 | 5 => (
            CaseTag::OneMod4,
            squarefree_core(d, d, "d = D = 1 mod 4")?,
            -4 * d,
        ),
        3 | 7 => {
            return Err(not_fundamental(
                d,
                format!(
                    "odd d must be 1 mod 4; for D = {d} = 3 mod 4 use d = 4D = {}",
                    4 * d
                ),
            ))
        }
        0 => {
            let core = d / 8;
            if core % 2 == 0 {
                return Err(not_fundamental(d, "d = 8D requires D odd"));
            }
            (CaseTag::ZeroMod8, squarefree_core(d, core, "d = 8D")?, -d)
        }
        4 => {
            let core = d / 4;
            if core % 4 == 1 {
                return Err(not_fundamental(
                    d,
                    format!(
                        "d = 4D requires D = 3 mod 4, but D = {core} = 1 mod 4 (use d = {core})"
                    ),
                ));
            }
            (
                CaseTag::FourMod8,
                squarefree_core(d, core, "d = 4D")?,
                -core,
            )
        }
        _ => return Err(not_fundamental(d, "d = 2 mod 4 is never a discriminant")),
    };
    Ok(DiscriminantCase {
        tag,
        core,
        d_k: d as u64,
        d_sharp,
    })
}

/// How the counts `E_D(u, v)` are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Method {
    #[default]
    Affine,
    Direct,
    CharSum,
    /// Affine, with every value recomputed by the other two methods.
    CrossCheck,
}

/// `E_D(u, v)` by the requested method.
pub fn e_term(d: &FactoredOddSquarefree, u: i64, v: i64, method: Method) -> Result<u64> {
    let by_charsum = || -> Result<u64> {
        let s = s_value(d, u, v)?;
        let scale = 1i64 << d.omega();
        if s < 0 || s % scale != 0 {
            return Err(Error::InternalInconsistency(format!(
                "S_D({u},{v}) = {s} for D={d} is not a nonnegative multiple of 2^omega"
            )));
        }
        Ok((s / scale) as u64)
    };
    match method {
        Method::Affine => e_affine(d, u, v),
        Method::Direct => e_direct(d, u, v),
        Method::CharSum => by_charsum(),
        Method::CrossCheck => {
            let affine = e_affine(d, u, v)?;
            let direct = e_direct(d, u, v)?;
            let charsum = by_charsum()?;
            if affine != direct || affine != charsum {
                return Err(Error::InternalInconsistency(format!(
                    "E_D({u},{v}) for D={d}: affine {affine}, direct {direct}, character sum {charsum}"
                )));
            }
            Ok(affine)
        }
    }
}

/// A labelled value `E_D(u, v)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct ETerm {
    pub u: i64,
    pub v: i64,
    pub value: u64,
}

impl fmt::Display for ETerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "E({},{})={}", self.u, self.v, self.value)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Equality {
    Equal,
    PlusOne,
}

impl fmt::Display for Equality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Equality::Equal => "Equal",
            Equality::PlusOne => "PlusOne",
        })
    }
}

/// The `(u, v)` pairs entering each side of the rank formulas:
/// `2^rk4 = (sum of terms) / divisor`.
pub struct RankFormula {
    pub terms: &'static [(i64, i64)],
    pub divisor: u64,
}

impl CaseTag {
    pub fn field_formula(self) -> RankFormula {
        match self {
            CaseTag::OneMod4 => RankFormula {
                terms: &[(-1, 1)],
                divisor: 2,
            },
            CaseTag::ZeroMod8 => RankFormula {
                terms: &[(-2, 1), (-1, 2)],
                divisor: 2,
            },
            CaseTag::FourMod8 => RankFormula {
                terms: &[(-1, 1), (-2, 2)],
                divisor: 2,
            },
        }
    }

    pub fn reflection_formula(self) -> RankFormula {
        match self {
            CaseTag::OneMod4 => RankFormula {
                terms: &[(1, 1), (2, 2)],
                divisor: 2,
            },
            CaseTag::ZeroMod8 => RankFormula {
                terms: &[(2, 1)],
                divisor: 1,
            },
            CaseTag::FourMod8 => RankFormula {
                terms: &[(1, 1)],
                divisor: 2,
            },
        }
    }

    /// The single count deciding the equality case, when there is one.
    pub fn criterion_term(self) -> Option<(i64, i64)> {
        match self {
            CaseTag::OneMod4 => Some((2, 2)),
            CaseTag::FourMod8 => Some((-2, 2)),
            CaseTag::ZeroMod8 => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankReport {
    pub case: DiscriminantCase,
    pub e_terms: Vec<ETerm>,
    pub rk4_k: u32,
    pub rk4_sharp: u32,
    pub equality: Equality,
    pub criterion: Option<ETerm>,
}

impl RankReport {
    pub fn e(&self, u: i64, v: i64) -> Option<u64> {
        self.e_terms
            .iter()
            .find(|t| t.u == u && t.v == v)
            .map(|t| t.value)
    }

    pub fn row(&self) -> ReportRow {
        ReportRow {
            d: self.case.d_k,
            case: self.case.tag,
            core: self.case.core.value(),
            omega: self.case.core.omega(),
            rk4_k: self.rk4_k,
            rk4_sharp: self.rk4_sharp,
            equality: self.equality,
            criterion: self.criterion.map(|c| c.to_string()),
        }
    }
}

/// Flat record written to CSV and JSON lines, fields in output order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReportRow {
    pub d: u64,
    pub case: CaseTag,
    #[serde(rename = "D")]
    pub core: u64,
    pub omega: usize,
    #[serde(rename = "rk4_K")]
    pub rk4_k: u32,
    pub rk4_sharp: u32,
    pub equality: Equality,
    pub criterion: Option<String>,
}

pub const CSV_HEADER: &str = "d,case,D,omega,rk4_K,rk4_sharp,equality,criterion";

/// Writes report rows as CSV with the fixed header.
pub fn write_csv<W: Write>(out: W, rows: impl IntoIterator<Item = ReportRow>) -> csv::Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    for row in rows {
        writer.serialize(row)?;
    }
    writer.flush()?;
    Ok(())
}

/// Serializes one row as a single CSV line without header.
pub fn csv_line(row: &ReportRow) -> String {
    let mut writer = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(Vec::new());
    writer.serialize(row).expect("in-memory CSV write");
    String::from_utf8(writer.into_inner().expect("in-memory CSV flush")).expect("CSV is UTF-8")
}

pub fn json_line(row: &ReportRow) -> String {
    serde_json::to_string(row).expect("report rows serialize")
}

fn log2_exact(value: u64, what: &str, case: &DiscriminantCase) -> Result<u32> {
    if value == 0 || !value.is_power_of_two() {
        return Err(Error::InternalInconsistency(format!(
            "2^rk4({what}) = {value} for d={} is not a positive power of 2",
            case.d_k
        )));
    }
    Ok(value.trailing_zeros())
}

fn evaluate(
    formula: &RankFormula,
    values: &BTreeMap<(i64, i64), u64>,
    what: &str,
    case: &DiscriminantCase,
) -> Result<u32> {
    let sum: u64 = formula.terms.iter().map(|k| values[k]).sum();
    if !sum.is_multiple_of(formula.divisor) {
        return Err(Error::InternalInconsistency(format!(
            "rank formula for {what} at d={}: {sum} is not divisible by {}",
            case.d_k, formula.divisor
        )));
    }
    log2_exact(sum / formula.divisor, what, case)
}

pub fn rank_pair(case: &DiscriminantCase) -> Result<RankReport> {
    rank_pair_with(case, Method::Affine)
}

pub fn rank_pair_with(case: &DiscriminantCase, method: Method) -> Result<RankReport> {
    let field = case.tag.field_formula();
    let reflection = case.tag.reflection_formula();
    let mut values = BTreeMap::new();
    for &(u, v) in field
        .terms
        .iter()
        .chain(reflection.terms)
        .chain(case.tag.criterion_term().as_ref())
    {
        if let std::collections::btree_map::Entry::Vacant(slot) = values.entry((u, v)) {
            slot.insert(e_term(&case.core, u, v, method)?);
        }
    }
    let rk4_k = evaluate(&field, &values, "K", case)?;
    let rk4_sharp = evaluate(&reflection, &values, "K#", case)?;
    let equality = match rk4_sharp.checked_sub(rk4_k) {
        Some(0) => Equality::Equal,
        Some(1) => Equality::PlusOne,
        _ => {
            return Err(Error::InternalInconsistency(format!(
            "d={}: rk4(K) = {rk4_k}, rk4(K#) = {rk4_sharp} violates rk4(K) <= rk4(K#) <= rk4(K)+1",
            case.d_k
        )))
        }
    };
    let e_terms: Vec<ETerm> = values
        .iter()
        .map(|(&(u, v), &value)| ETerm { u, v, value })
        .collect();
    let criterion = case.tag.criterion_term().map(|(u, v)| ETerm {
        u,
        v,
        value: values[&(u, v)],
    });
    Ok(RankReport {
        case: case.clone(),
        e_terms,
        rk4_k,
        rk4_sharp,
        equality,
        criterion,
    })
}

/// Verdict from the single-count equality criterion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EqualityVerdict {
    pub equality: Equality,
    pub criterion: Option<ETerm>,
}

/// Equality classification: `E_D(2,2) = 0` decides `Equal` for `OneMod4`,
/// `E_D(-2,2) = 0` decides `PlusOne` for `FourMod8`. `ZeroMod8` has no such
/// criterion and falls back to the rank pair.
pub fn equality_case(case: &DiscriminantCase) -> Result<EqualityVerdict> {
    match case.tag.criterion_term() {
        Some((u, v)) => {
            let value = e_affine(&case.core, u, v)?;
            let vanishes = value == 0;
            let equality = match (case.tag, vanishes) {
                (CaseTag::OneMod4, true) | (CaseTag::FourMod8, false) => Equality::Equal,
                _ => Equality::PlusOne,
            };
            Ok(EqualityVerdict {
                equality,
                criterion: Some(ETerm { u, v, value }),
            })
        }
        None => Ok(EqualityVerdict {
            equality: rank_pair(case)?.equality,
            criterion: None,
        }),
    }
}

/// The four clauses for `D` with every prime divisor `= +-1 mod 8`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UeharaClause {
    /// `d_K = 1 mod 4`: plus one.
    OneMod4,
    /// `d_K = 0 mod 8`, `D = 3 mod 4`: plus one.
    ZeroMod8ThreeMod4,
    /// `d_K = 0 mod 8`, `D = 1 mod 4`: equal.
    ZeroMod8OneMod4,
    /// `d_K = 4 mod 8`: equal.
    FourMod8,
}

impl UeharaClause {
    pub fn predicted(self) -> Equality {
        match self {
            UeharaClause::OneMod4 | UeharaClause::ZeroMod8ThreeMod4 => Equality::PlusOne,
            UeharaClause::ZeroMod8OneMod4 | UeharaClause::FourMod8 => Equality::Equal,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UeharaOutcome {
    NotApplicable,
    Confirmed {
        clause: UeharaClause,
        equality: Equality,
    },
}

pub fn uehara_applies(core: &FactoredOddSquarefree) -> bool {
    core.primes().iter().all(|p| p % 8 == 1 || p % 8 == 7)
}

pub fn uehara_check(case: &DiscriminantCase) -> Result<UeharaOutcome> {
    if !uehara_applies(&case.core) {
        return Ok(UeharaOutcome::NotApplicable);
    }
    let clause = match case.tag {
        CaseTag::OneMod4 => UeharaClause::OneMod4,
        CaseTag::ZeroMod8 if case.core.value() % 4 == 3 => UeharaClause::ZeroMod8ThreeMod4,
        CaseTag::ZeroMod8 => UeharaClause::ZeroMod8OneMod4,
        CaseTag::FourMod8 => UeharaClause::FourMod8,
    };
    let observed = rank_pair(case)?.equality;
    if observed != clause.predicted() {
        return Err(Error::AssertionFailed(format!(
            "d={} ({clause:?}): predicted {}, observed {observed}",
            case.d_k,
            clause.predicted()
        )));
    }
    Ok(UeharaOutcome::Confirmed {
        clause,
        equality: observed,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ScanOptions {
    /// Worker threads; `0` uses the global pool.
    pub jobs: usize,
    pub cross_check: bool,
}

/// Joint distribution of `(rk4(K), rk4(K#))` over a scan.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ScanAggregate {
    pub total: u64,
    /// Reports satisfying `rk4(K) <= rk4(K#) <= rk4(K) + 1`.
    pub reflection_ok: u64,
    pub joint: BTreeMap<(u32, u32), u64>,
}

impl ScanAggregate {
    pub fn add(&mut self, report: &RankReport) {
        self.total += 1;
        if report.rk4_k <= report.rk4_sharp && report.rk4_sharp <= report.rk4_k + 1 {
            self.reflection_ok += 1;
        }
        *self
            .joint
            .entry((report.rk4_k, report.rk4_sharp))
            .or_default() += 1;
    }

    pub fn merge(&mut self, other: &ScanAggregate) {
        self.total += other.total;
        self.reflection_ok += other.reflection_ok;
        for (k, n) in &other.joint {
            *self.joint.entry(*k).or_default() += n;
        }
    }

    /// Number of reports with `rk4(K) = r`.
    pub fn conditioned(&self, r: u32) -> u64 {
        self.joint
            .iter()
            .filter(|((k, _), _)| *k == r)
            .map(|(_, n)| n)
            .sum()
    }

    /// Empirical `P(rk4(K#) = s | rk4(K) = r)`, or `None` without data.
    pub fn frequency(&self, r: u32, s: u32) -> Option<f64> {
        let base = self.conditioned(r);
        (base > 0).then(|| self.joint.get(&(r, s)).copied().unwrap_or(0) as f64 / base as f64)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ScanResult {
    pub reports: Vec<RankReport>,
    pub aggregate: ScanAggregate,
}

const SCAN_CHUNK: i64 = 1 << 14;

/// Calls `sink` on the report of every Table-1 discriminant in
/// `[d_min, d_max]`, in ascending order. Work is split into chunks computed
/// in parallel and delivered in order.
pub fn scan_each(
    d_min: i64,
    d_max: i64,
    options: ScanOptions,
    mut sink: impl FnMut(&RankReport),
) -> Result<ScanAggregate> {
    if d_min <= 0 || d_min > d_max {
        return Err(Error::NotFundamental {
            d: d_min.into(),
            reason: format!("invalid scan range [{d_min}, {d_max}]"),
        });
    }
    let method = if options.cross_check {
        Method::CrossCheck
    } else {
        Method::Affine
    };
    let pool = match options.jobs {
        0 => None,
        jobs => Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(jobs)
                .build()
                .map_err(|e| Error::InternalInconsistency(format!("thread pool: {e}")))?,
        ),
    };
    let compute = |start: i64, end: i64| -> Result<Vec<RankReport>> {
        (start..=end)
            .into_par_iter()
            .filter_map(|d| classify(d).ok())
            .map(|case| rank_pair_with(&case, method))
            .collect()
    };
    let mut aggregate = ScanAggregate::default();
    let mut start = d_min;
    loop {
        let end = start.saturating_add(SCAN_CHUNK - 1).min(d_max);
        let chunk = match &pool {
            Some(pool) => pool.install(|| compute(start, end))?,
            None => compute(start, end)?,
        };
        for report in &chunk {
            aggregate.add(report);
            sink(report);
        }
        if end == d_max {
            break;
        }
        start = end + 1;
    }
    Ok(aggregate)
}

pub fn scan(d_min: i64, d_max: i64, options: ScanOptions) -> Result<ScanResult> {
    let mut reports = Vec::new();
    let aggregate = scan_each(d_min, d_max, options, |r| reports.push(r.clone()))?;
    Ok(ScanResult { reports, aggregate })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityRow {
    pub r: u32,
    /// Number of fields with `rk4(K) = r`.
    pub conditioned: u64,
    /// Empirical `P(rk4(K#) = r | rk4(K) = r)`; `None` means insufficient data.
    pub same: Option<f64>,
    /// Empirical `P(rk4(K#) = r + 1 | rk4(K) = r)`.
    pub plus_one: Option<f64>,
}

impl DensityRow {
    pub fn theory_same(&self) -> f64 {
        1.0 - 0.5f64.powi(self.r as i32 + 1)
    }

    pub fn theory_plus_one(&self) -> f64 {
        0.5f64.powi(self.r as i32 + 1)
    }

    pub fn insufficient(&self) -> bool {
        self.conditioned == 0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityTable {
    pub x: i64,
    pub fields: u64,
    pub rows: Vec<DensityRow>,
}

pub fn density_rows(
    aggregate: &ScanAggregate,
    ranks: std::ops::RangeInclusive<u32>,
) -> Vec<DensityRow> {
    ranks
        .map(|r| DensityRow {
            r,
            conditioned: aggregate.conditioned(r),
            same: aggregate.frequency(r, r),
            plus_one: aggregate.frequency(r, r + 1),
        })
        .collect()
}

/// Conditional frequencies of `rk4(K#)` given `rk4(K) = r` for `r` in
/// `0..=2`, over all Table-1 discriminants in `(0, x]`.
pub fn density_compare(x: i64, options: ScanOptions) -> Result<DensityTable> {
    if x < 1 {
        return Err(Error::NotFundamental {
            d: x.into(),
            reason: "X must be at least 1".into(),
        });
    }
    let aggregate = scan_each(1, x, options, |_| {})?;
    Ok(DensityTable {
        x,
        fields: aggregate.total,
        rows: density_rows(&aggregate, 0..=2),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classify_examples() {
        let c = classify(5).unwrap();
        assert_eq!(
            (c.tag, c.core.value(), c.d_sharp),
            (CaseTag::OneMod4, 5, -20)
        );
        let c = classify(40).unwrap();
        assert_eq!(
            (c.tag, c.core.value(), c.d_sharp),
            (CaseTag::ZeroMod8, 5, -40)
        );
        let c = classify(12).unwrap();
        assert_eq!(
            (c.tag, c.core.value(), c.d_sharp),
            (CaseTag::FourMod8, 3, -3)
        );
        let c = classify(8).unwrap();
        assert_eq!(
            (c.tag, c.core.value(), c.d_sharp),
            (CaseTag::ZeroMod8, 1, -8)
        );
        for bad in [20, 1, 2, 3, 4, 6, 7, 16, 0, -5, 45, 72, 36] {
            assert!(
                matches!(classify(bad), Err(Error::NotFundamental { .. })),
                "{bad}"
            );
        }
    }

    #[test]
    fn classify_messages() {
        let msg = classify(7).unwrap_err().to_string();
        assert!(msg.contains("28"), "{msg}");
        let msg = classify(20).unwrap_err().to_string();
        assert!(msg.contains("3 mod 4"), "{msg}");
    }

    #[test]
    fn rank_examples() {
        let r = rank_pair(&classify(5).unwrap()).unwrap();
        assert_eq!(
            (r.e(-1, 1), r.e(1, 1), r.e(2, 2)),
            (Some(2), Some(2), Some(0))
        );
        assert_eq!((r.rk4_k, r.rk4_sharp, r.equality), (0, 0, Equality::Equal));

        let r = rank_pair(&classify(40).unwrap()).unwrap();
        assert_eq!(
            (r.e(-2, 1), r.e(-1, 2), r.e(2, 1)),
            (Some(1), Some(1), Some(1))
        );
        assert_eq!((r.rk4_k, r.rk4_sharp), (0, 0));
        assert_eq!(r.criterion, None);

        let r = rank_pair(&classify(12).unwrap()).unwrap();
        assert_eq!(r.e(1, 1), Some(2));
        assert_eq!((r.rk4_k, r.rk4_sharp), (0, 0));

        let r = rank_pair(&classify(8).unwrap()).unwrap();
        assert!(r.e_terms.iter().all(|t| t.value == 1));
        assert_eq!((r.rk4_k, r.rk4_sharp, r.equality), (0, 0, Equality::Equal));
    }

    #[test]
    fn methods_agree() {
        for d in 1..3000 {
            let Ok(case) = classify(d) else { continue };
            let affine = rank_pair(&case).unwrap();
            assert_eq!(rank_pair_with(&case, Method::Direct).unwrap(), affine);
            assert_eq!(rank_pair_with(&case, Method::CharSum).unwrap(), affine);
            assert_eq!(rank_pair_with(&case, Method::CrossCheck).unwrap(), affine);
        }
    }

    #[test]
    fn equality_examples() {
        let v = equality_case(&classify(5).unwrap()).unwrap();
        assert_eq!(v.equality, Equality::Equal);
        assert_eq!(
            v.criterion,
            Some(ETerm {
                u: 2,
                v: 2,
                value: 0
            })
        );
        let v = equality_case(&classify(12).unwrap()).unwrap();
        assert_eq!(v.equality, Equality::Equal);
        assert!(v.criterion.unwrap().value != 0);
        let v = equality_case(&classify(8).unwrap()).unwrap();
        assert_eq!(v.equality, Equality::Equal);
        assert_eq!(v.criterion, None);
    }

    #[test]
    fn uehara_examples() {
        let check = |d| uehara_check(&classify(d).unwrap()).unwrap();
        assert_eq!(
            check(17),
            UeharaOutcome::Confirmed {
                clause: UeharaClause::OneMod4,
                equality: Equality::PlusOne
            }
        );
        assert_eq!(
            check(56),
            UeharaOutcome::Confirmed {
                clause: UeharaClause::ZeroMod8ThreeMod4,
                equality: Equality::PlusOne
            }
        );
        assert_eq!(
            check(136),
            UeharaOutcome::Confirmed {
                clause: UeharaClause::ZeroMod8OneMod4,
                equality: Equality::Equal
            }
        );
        assert_eq!(
            check(28),
            UeharaOutcome::Confirmed {
                clause: UeharaClause::FourMod8,
                equality: Equality::Equal
            }
        );
        assert_eq!(check(5), UeharaOutcome::NotApplicable);
        // D = 1 has no prime divisors, so every clause applies vacuously.
        assert!(matches!(check(8), UeharaOutcome::Confirmed { .. }));
    }

    #[test]
    fn scan_examples() {
        let r = scan(5, 5, ScanOptions::default()).unwrap();
        assert_eq!(r.reports.len(), 1);
        assert_eq!(r.reports[0].case.d_k, 5);

        let r = scan(1, 4, ScanOptions::default()).unwrap();
        assert!(r.reports.is_empty());
        let r = scan(1, 8, ScanOptions::default()).unwrap();
        assert_eq!(
            r.reports.iter().map(|r| r.case.d_k).collect::<Vec<_>>(),
            vec![5, 8]
        );

        let r = scan(1, 100, ScanOptions::default()).unwrap();
        assert_eq!(r.aggregate.reflection_ok, r.aggregate.total);
        assert!(r.reports.windows(2).all(|w| w[0].case.d_k < w[1].case.d_k));

        assert!(scan(10, 5, ScanOptions::default()).is_err());
        assert!(scan(0, 5, ScanOptions::default()).is_err());
    }

    #[test]
    fn scan_is_independent_of_jobs_and_chunking() {
        let a = scan(
            1,
            40_000,
            ScanOptions {
                jobs: 1,
                cross_check: false,
            },
        )
        .unwrap();
        let b = scan(
            1,
            40_000,
            ScanOptions {
                jobs: 4,
                cross_check: false,
            },
        )
        .unwrap();
        assert_eq!(a, b);
        let count = (1..=40_000).filter(|&d| classify(d).is_ok()).count();
        assert_eq!(a.reports.len(), count);
    }

    #[test]
    fn aggregate_merge_is_additive() {
        let mut all = ScanAggregate::default();
        let mut left = ScanAggregate::default();
        let mut right = ScanAggregate::default();
        for (i, r) in scan(1, 2000, ScanOptions::default())
            .unwrap()
            .reports
            .iter()
            .enumerate()
        {
            all.add(r);
            if i % 3 == 0 {
                left.add(r)
            } else {
                right.add(r)
            }
        }
        left.merge(&right);
        assert_eq!(left, all);
    }

    #[test]
    fn density_small() {
        let t = density_compare(100, ScanOptions::default()).unwrap();
        assert_eq!(t.rows.len(), 3);
        assert!(t.rows[2].insufficient());
        assert_eq!(t.rows[2].same, None);
        assert_eq!(t.rows[0].theory_same(), 0.5);
        assert_eq!(t.rows[1].theory_same(), 0.75);
        assert_eq!(t.rows[1].theory_plus_one(), 0.25);
        assert!(density_compare(0, ScanOptions::default()).is_err());
    }

    #[test]
    fn rows_serialize_in_fixed_order() {
        let row = rank_pair(&classify(5).unwrap()).unwrap().row();
        assert_eq!(csv_line(&row), "5,OneMod4,5,1,0,0,Equal,\"E(2,2)=0\"\n");
        assert_eq!(
            json_line(&row),
            r#"{"d":5,"case":"OneMod4","D":5,"omega":1,"rk4_K":0,"rk4_sharp":0,"equality":"Equal","criterion":"E(2,2)=0"}"#
        );
        let mut out = Vec::new();
        write_csv(&mut out, [row]).unwrap();
        assert!(String::from_utf8(out)
            .unwrap()
            .starts_with(&format!("{CSV_HEADER}\n")));
    }
}

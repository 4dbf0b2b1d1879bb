//! Assembles the left- and right-hand sides of every identity as exact
//! rationals (or Laurent polynomials), runs truncation sweeps, and produces
//! pass/fail reports.
//!
//! Numeric identities compare a truncated sum over group types against an
//! exact closed form at `q = 1/ell`, at a caller-chosen tolerance (the CLI
//! default is 1/1000 at truncation 8). Exact identities (`autid`, `q1`,
//! `qme`) are checked with zero tolerance; `q1` and `qme` symbolically as
//! polynomials in `q`, which is strictly stronger than any sampled check.
//! `converge4` carries no exact derivation and is confirmed numerically, so
//! its text report is labeled as conjectural.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::chains::{sigma_i, IntervalCache};
use crate::error::{Error, Result};
use crate::group_types::{
    aut_order, enumerate_order_exponent, enumerate_rank_tower, weight_of_order, GroupType,
    RankConstraint,
};
use crate::qseries::{check_q1, check_qme, eval_at, gauss_binomial, poch, PrimeEll};
use crate::rational::Rational;
use crate::report::{ParamValue, RhsValue, VerificationReport};
use crate::subgroup_count::sub_count;

/// Every identity the verifier knows, named by its report id.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum IdentityId {
    Subg4,
    Subg5,
    Converge3,
    Converge4,
    Autid,
    Ell2,
    Sagain,
    Q1,
    Qme,
    Hall,
    WeightSum,
}

impl IdentityId {
    pub const ALL: [IdentityId; 11] = [
        IdentityId::Subg4,
        IdentityId::Subg5,
        IdentityId::Converge3,
        IdentityId::Converge4,
        IdentityId::Autid,
        IdentityId::Ell2,
        IdentityId::Sagain,
        IdentityId::Q1,
        IdentityId::Qme,
        IdentityId::Hall,
        IdentityId::WeightSum,
    ];

    pub fn name(self) -> &'static str {
        match self {
            IdentityId::Subg4 => "subg4",
            IdentityId::Subg5 => "subg5",
            IdentityId::Converge3 => "converge3",
            IdentityId::Converge4 => "converge4",
            IdentityId::Autid => "autid",
            IdentityId::Ell2 => "ell2",
            IdentityId::Sagain => "sagain",
            IdentityId::Q1 => "q1",
            IdentityId::Qme => "qme",
            IdentityId::Hall => "hall",
            IdentityId::WeightSum => "weight-sum",
        }
    }

    /// Exact identities are checked with zero tolerance.
    pub fn is_exact(self) -> bool {
        matches!(self, IdentityId::Autid | IdentityId::Q1 | IdentityId::Qme)
    }

    /// `converge4` is confirmed numerically without an exact derivation.
    pub fn is_conjectural(self) -> bool {
        matches!(self, IdentityId::Converge4)
    }

    /// The purely symbolic identities take no `ell` parameter.
    pub fn uses_ell(self) -> bool {
        !matches!(self, IdentityId::Q1 | IdentityId::Qme)
    }
}

impl fmt::Display for IdentityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

impl FromStr for IdentityId {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        IdentityId::ALL
            .into_iter()
            .find(|id| id.name() == text)
            .ok_or_else(|| Error::Precondition(format!("unknown identity `{text}`")))
    }
}

fn type_params(a: &GroupType, ell: &PrimeEll, e: Option<u32>) -> BTreeMap<String, ParamValue> {
    let mut params = BTreeMap::new();
    params.insert("A".to_string(), ParamValue::group_type(a));
    params.insert(
        "ell".to_string(),
        ParamValue::Integer(BigInt::from(ell.value().clone())),
    );
    if let Some(e) = e {
        params.insert("E".to_string(), ParamValue::integer(e));
    }
    params
}

fn truncated_report(
    identity: IdentityId,
    params: BTreeMap<String, ParamValue>,
    levels: Vec<u32>,
    partials: Vec<Rational>,
    rhs: Rational,
    tolerance: &Rational,
) -> VerificationReport {
    let abs_error = (partials.last().expect("nonempty partials") - &rhs).abs();
    let passed = abs_error <= *tolerance;
    VerificationReport {
        identity_id: identity.name().to_string(),
        params,
        truncation_levels: levels,
        lhs_partials: partials,
        rhs: RhsValue::Rational(rhs),
        abs_error,
        tolerance: tolerance.clone(),
        passed,
    }
}

fn exact_report(
    identity: IdentityId,
    params: BTreeMap<String, ParamValue>,
    lhs: Rational,
    rhs: Rational,
) -> VerificationReport {
    let abs_error = (&lhs - &rhs).abs();
    let passed = abs_error.is_zero();
    VerificationReport {
        identity_id: identity.name().to_string(),
        params,
        truncation_levels: vec![0],
        lhs_partials: vec![lhs],
        rhs: RhsValue::Rational(rhs),
        abs_error,
        tolerance: Rational::zero(),
        passed,
    }
}

/// Sums `term` over the family selected by `tower` with parts `<= max_level`,
/// returning the running partial sums at every level in
/// `min_level..=max_level`. The partial at level `e` includes every member
/// whose largest part is `<= e`.
fn truncated_series<F>(
    tower: &[u32],
    min_level: u32,
    max_level: u32,
    mut term: F,
) -> Result<(Vec<u32>, Vec<Rational>)>
where
    F: FnMut(&GroupType) -> Rational,
{
    if max_level < min_level {
        return Err(Error::TruncationTooSmall {
            bound: max_level,
            needed: min_level,
        });
    }
    let constraint = RankConstraint::new(tower.to_vec())?;
    let mut by_level: BTreeMap<u32, Rational> = BTreeMap::new();
    for member in enumerate_rank_tower(&constraint, max_level)? {
        let value = term(&member);
        if !value.is_zero() {
            *by_level
                .entry(member.max_part())
                .or_insert_with(Rational::zero) += value;
        }
    }
    let mut levels = Vec::new();
    let mut partials = Vec::new();
    let mut running = Rational::zero();
    let mut buckets = by_level.into_iter().peekable();
    for level in min_level..=max_level {
        while let Some((key, _)) = buckets.peek() {
            if *key > level {
                break;
            }
            let (_, value) = buckets.next().expect("peeked entry");
            running += value;
        }
        levels.push(level);
        partials.push(running.clone());
    }
    Ok((levels, partials))
}

fn aut_rational(a: &GroupType, ell: &PrimeEll) -> Rational {
    Rational::from_integer(BigInt::from(aut_order(a, ell)))
}

fn rational_pow(base: &Rational, exponent: u32) -> Rational {
    let mut out = Rational::one();
    for _ in 0..exponent {
        out *= base;
    }
    out
}

/// Average of `sub(A, B) / |Aut B|` over the rank class of `A`, truncated at
/// parts `<= e`, against the closed form `1 / ((q)_r |Aut A|)`.
pub fn verify_subg4(
    a: &GroupType,
    ell: &PrimeEll,
    e: u32,
    tolerance: &Rational,
) -> Result<VerificationReport> {
    let rank = a.rank();
    let (levels, partials) = truncated_series(&[rank], a.max_part(), e, |b| {
        Rational::new(
            BigInt::from(sub_count(a, b, ell)),
            BigInt::from(aut_order(b, ell)),
        )
    })?;
    let rhs = Rational::one() / (eval_at(&poch(rank), ell) * aut_rational(a, ell));
    Ok(truncated_report(
        IdentityId::Subg4,
        type_params(a, ell, Some(e)),
        levels,
        partials,
        rhs,
        tolerance,
    ))
}

/// Truncated chain sum `sigma_i(A)` against `((q)_r^-1 - 1)^i / |Aut A|`.
pub fn verify_subg5(
    a: &GroupType,
    i: u32,
    ell: &PrimeEll,
    e: u32,
    tolerance: &Rational,
) -> Result<VerificationReport> {
    if i > 3 {
        return Err(Error::Precondition(format!(
            "subg5 chain length {i} exceeds the cost guard of 3"
        )));
    }
    if e < a.max_part() {
        return Err(Error::TruncationTooSmall {
            bound: e,
            needed: a.max_part(),
        });
    }
    let mut levels = Vec::new();
    let mut partials = Vec::new();
    for level in a.max_part()..=e {
        levels.push(level);
        partials.push(sigma_i(a, i, ell, level)?);
    }
    let base = Rational::one() / eval_at(&poch(a.rank()), ell) - Rational::one();
    let rhs = rational_pow(&base, i) / aut_rational(a, ell);
    let mut params = type_params(a, ell, Some(e));
    params.insert("i".to_string(), ParamValue::integer(i));
    Ok(truncated_report(
        IdentityId::Subg5,
        params,
        levels,
        partials,
        rhs,
        tolerance,
    ))
}

/// Signed chain-sum average `sum S(A, B) / |Aut B|` over the rank class,
/// against `(q)_r / |Aut A|`.
pub fn verify_converge3(
    a: &GroupType,
    ell: &PrimeEll,
    e: u32,
    tolerance: &Rational,
) -> Result<VerificationReport> {
    let cache = IntervalCache::new(ell.clone());
    let rank = a.rank();
    let (levels, partials) = truncated_series(&[rank], a.max_part(), e, |b| {
        Rational::new(cache.s_value(a, b), BigInt::from(aut_order(b, ell)))
    })?;
    let rhs = eval_at(&poch(rank), ell) / aut_rational(a, ell);
    Ok(truncated_report(
        IdentityId::Converge3,
        type_params(a, ell, Some(e)),
        levels,
        partials,
        rhs,
        tolerance,
    ))
}

/// Unsigned chain-sum average `sum S_plus(A, B) / |Aut B|` against
/// `(q)_r / ((2 (q)_r - 1) |Aut A|)`.
pub fn verify_converge4(
    a: &GroupType,
    ell: &PrimeEll,
    e: u32,
    tolerance: &Rational,
) -> Result<VerificationReport> {
    let cache = IntervalCache::new(ell.clone());
    let rank = a.rank();
    let (levels, partials) = truncated_series(&[rank], a.max_part(), e, |b| {
        Rational::new(
            BigInt::from(cache.s_plus_value(a, b)),
            BigInt::from(aut_order(b, ell)),
        )
    })?;
    let poch_value = eval_at(&poch(rank), ell);
    let denominator = Rational::from_integer(2.into()) * &poch_value - Rational::one();
    assert!(
        denominator.is_positive(),
        "2(q)_r - 1 must be positive for odd ell"
    );
    let rhs = poch_value / (denominator * aut_rational(a, ell));
    Ok(truncated_report(
        IdentityId::Converge4,
        type_params(a, ell, Some(e)),
        levels,
        partials,
        rhs,
        tolerance,
    ))
}

/// Exact check that padding by `i` elementary factors scales `|Aut|` by
/// `ell^(i(2s+i)) (q)_i` on types whose parts are all at least 2.
pub fn verify_autid(a: &GroupType, i: u32, ell: &PrimeEll) -> Result<VerificationReport> {
    let s = a.rank();
    if a.rank_at(2) != s {
        return Err(Error::Precondition(format!(
            "autid requires every part of {a} to be at least 2"
        )));
    }
    let lhs = aut_rational(&a.pad_elementary(i), ell);
    let scale = ell.pow_rational(i64::from(i) * (2 * i64::from(s) + i64::from(i)));
    let rhs = scale * eval_at(&poch(i), ell) * aut_rational(a, ell);
    let mut params = type_params(a, ell, None);
    params.insert("i".to_string(), ParamValue::integer(i));
    Ok(exact_report(IdentityId::Autid, params, lhs, rhs))
}

fn two_rank_preconditions(a: &GroupType, i: u32, e: u32) -> Result<(u32, u32, u32)> {
    let rank = a.rank();
    let second_rank = a.rank_at(2);
    if i < second_rank || i > rank {
        return Err(Error::Precondition(format!(
            "index {i} must lie between the second rank {second_rank} and the rank {rank} of {a}"
        )));
    }
    let min_level = if rank == 0 {
        0
    } else if i == 0 {
        a.max_part().max(1)
    } else {
        a.max_part().max(2)
    };
    if e < min_level {
        return Err(Error::TruncationTooSmall {
            bound: e,
            needed: min_level,
        });
    }
    Ok((rank, second_rank, min_level))
}

/// Average of `sub(A, B) / |Aut B|` over the two-rank class `(r, i)`,
/// against `binom(r-s, r-i)_q q^(i(i-s)) / ((q)_i |Aut A|)`.
pub fn verify_ell2(
    a: &GroupType,
    i: u32,
    ell: &PrimeEll,
    e: u32,
    tolerance: &Rational,
) -> Result<VerificationReport> {
    let (rank, second_rank, min_level) = two_rank_preconditions(a, i, e)?;
    let (levels, partials) = truncated_series(&[rank, i], min_level, e, |b| {
        Rational::new(
            BigInt::from(sub_count(a, b, ell)),
            BigInt::from(aut_order(b, ell)),
        )
    })?;
    let binomial = eval_at(&gauss_binomial(rank - second_rank, rank - i), ell);
    let power = ell.pow_rational(-(i64::from(i) * (i64::from(i) - i64::from(second_rank))));
    let rhs = binomial * power / (eval_at(&poch(i), ell) * aut_rational(a, ell));
    let mut params = type_params(a, ell, Some(e));
    params.insert("i".to_string(), ParamValue::integer(i));
    params.insert("r".to_string(), ParamValue::integer(rank));
    params.insert("s".to_string(), ParamValue::integer(second_rank));
    Ok(truncated_report(
        IdentityId::Ell2,
        params,
        levels,
        partials,
        rhs,
        tolerance,
    ))
}

/// Signed chain-sum average over the two-rank class `(r, i)`, against
/// `(-1)^(i-s) q^(i(i+1)/2 - s(s+1)/2) binom(r-s, r-i)_q (q)_s / |Aut A|`.
pub fn verify_sagain(
    a: &GroupType,
    i: u32,
    ell: &PrimeEll,
    e: u32,
    tolerance: &Rational,
) -> Result<VerificationReport> {
    let (rank, second_rank, min_level) = two_rank_preconditions(a, i, e)?;
    let cache = IntervalCache::new(ell.clone());
    let (levels, partials) = truncated_series(&[rank, i], min_level, e, |b| {
        Rational::new(cache.s_value(a, b), BigInt::from(aut_order(b, ell)))
    })?;
    let binomial = eval_at(&gauss_binomial(rank - second_rank, rank - i), ell);
    let exponent = i64::from(i) * (i64::from(i) + 1) / 2
        - i64::from(second_rank) * (i64::from(second_rank) + 1) / 2;
    let mut rhs = ell.pow_rational(-exponent)
        * binomial
        * eval_at(&poch(second_rank), ell)
        / aut_rational(a, ell);
    if (i - second_rank) % 2 == 1 {
        rhs = -rhs;
    }
    let mut params = type_params(a, ell, Some(e));
    params.insert("i".to_string(), ParamValue::integer(i));
    params.insert("r".to_string(), ParamValue::integer(rank));
    params.insert("s".to_string(), ParamValue::integer(second_rank));
    Ok(truncated_report(
        IdentityId::Sagain,
        params,
        levels,
        partials,
        rhs,
        tolerance,
    ))
}

/// The mass identity: `sum 1/|Aut A|` over all types, truncated at order
/// exponent `e_sum`, against the partial product
/// `prod_(i=1..n_prod) (1 - ell^-i)^-1`.
pub fn verify_hall(
    ell: &PrimeEll,
    e_sum: u32,
    n_prod: u32,
    tolerance: &Rational,
) -> Result<VerificationReport> {
    let mut levels = Vec::new();
    let mut partials = Vec::new();
    let mut running = Rational::zero();
    for exponent in 0..=e_sum {
        for a in enumerate_order_exponent(exponent) {
            running += Rational::new(BigInt::one(), BigInt::from(aut_order(&a, ell)));
        }
        levels.push(exponent);
        partials.push(running.clone());
    }
    let mut rhs = Rational::one();
    for index in 1..=n_prod {
        let power = Rational::from_integer(BigInt::from(ell.pow(index)));
        rhs *= &power / (&power - Rational::one());
    }
    let mut params = BTreeMap::new();
    params.insert("E_sum".to_string(), ParamValue::integer(e_sum));
    params.insert("N_prod".to_string(), ParamValue::integer(n_prod));
    params.insert(
        "ell".to_string(),
        ParamValue::Integer(BigInt::from(ell.value().clone())),
    );
    Ok(truncated_report(
        IdentityId::Hall,
        params,
        levels,
        partials,
        rhs,
        tolerance,
    ))
}

/// Truncated weight sum `sum_(j=0..e) w_r(ell^j)` against `(q)_r^-1`.
pub fn verify_weight_sum(
    r: u32,
    ell: &PrimeEll,
    e: u32,
    tolerance: &Rational,
) -> Result<VerificationReport> {
    let mut levels = Vec::new();
    let mut partials = Vec::new();
    let mut running = Rational::zero();
    for j in 0..=e {
        running += weight_of_order(r, j, ell);
        levels.push(j);
        partials.push(running.clone());
    }
    let rhs = Rational::one() / eval_at(&poch(r), ell);
    let mut params = BTreeMap::new();
    params.insert("E".to_string(), ParamValue::integer(e));
    params.insert(
        "ell".to_string(),
        ParamValue::Integer(BigInt::from(ell.value().clone())),
    );
    params.insert("r".to_string(), ParamValue::integer(r));
    Ok(truncated_report(
        IdentityId::WeightSum,
        params,
        levels,
        partials,
        rhs,
        tolerance,
    ))
}

/// One point of a sweep grid; which variants an identity accepts is decided
/// by [`sweep`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GridPoint {
    /// No per-point parameter (hall).
    Unit,
    /// A group type (subg4, converge3, converge4).
    Type(GroupType),
    /// A group type plus a small index (subg5, autid, ell2, sagain).
    TypeWithIndex(GroupType, u32),
    /// A bare index (q1's k, weight-sum's r).
    Index(u32),
    /// A pair of indices (qme's m and k).
    IndexPair { m: u32, k: u32 },
}

/// A full sweep request: one identity, a list of primes, a parameter grid,
/// and the shared truncation/tolerance settings.
#[derive(Clone, Debug)]
pub struct SweepSpec {
    pub identity: IdentityId,
    pub ells: Vec<PrimeEll>,
    pub points: Vec<GridPoint>,
    pub max_exponent: u32,
    /// Product truncation for hall only.
    pub prod_bound: u32,
    pub tolerance: Rational,
}

/// Reports in deterministic grid order plus any per-point errors (which are
/// also folded into failed placeholder reports rather than aborting the
/// sweep).
#[derive(Debug)]
pub struct SweepOutcome {
    pub reports: Vec<VerificationReport>,
    pub errors: Vec<String>,
    pub passed: bool,
}

pub fn sweep(spec: &SweepSpec) -> Result<SweepOutcome> {
    if spec.points.is_empty() {
        return Err(Error::EmptyGrid);
    }
    if spec.identity.uses_ell() && spec.ells.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let mut reports = Vec::new();
    let mut errors = Vec::new();
    if spec.identity.uses_ell() {
        for ell in &spec.ells {
            for point in &spec.points {
                collect_point(spec, Some(ell), point, &mut reports, &mut errors);
            }
        }
    } else {
        for point in &spec.points {
            collect_point(spec, None, point, &mut reports, &mut errors);
        }
    }
    let passed = reports.iter().all(|report| report.passed);
    Ok(SweepOutcome {
        reports,
        errors,
        passed,
    })
}

fn collect_point(
    spec: &SweepSpec,
    ell: Option<&PrimeEll>,
    point: &GridPoint,
    reports: &mut Vec<VerificationReport>,
    errors: &mut Vec<String>,
) {
    match run_point(spec, ell, point) {
        Ok(report) => reports.push(report),
        Err(error) => {
            errors.push(format!(
                "{} at {:?} (ell = {}): {error}",
                spec.identity,
                point,
                ell.map(|l| l.to_string()).unwrap_or_default()
            ));
            reports.push(failed_placeholder(spec, ell, point));
        }
    }
}

fn run_point(
    spec: &SweepSpec,
    ell: Option<&PrimeEll>,
    point: &GridPoint,
) -> Result<VerificationReport> {
    let id = spec.identity;
    let tol = &spec.tolerance;
    let e = spec.max_exponent;
    let wrong_point = || {
        Error::Precondition(format!(
            "grid point {point:?} does not fit identity {id}"
        ))
    };
    match id {
        IdentityId::Subg4 | IdentityId::Converge3 | IdentityId::Converge4 => {
            let a = match point {
                GridPoint::Type(a) => a,
                _ => return Err(wrong_point()),
            };
            let ell = ell.expect("ell-based identity");
            match id {
                IdentityId::Subg4 => verify_subg4(a, ell, e, tol),
                IdentityId::Converge3 => verify_converge3(a, ell, e, tol),
                _ => verify_converge4(a, ell, e, tol),
            }
        }
        IdentityId::Subg5 | IdentityId::Autid | IdentityId::Ell2 | IdentityId::Sagain => {
            let (a, i) = match point {
                GridPoint::TypeWithIndex(a, i) => (a, *i),
                _ => return Err(wrong_point()),
            };
            let ell = ell.expect("ell-based identity");
            match id {
                IdentityId::Subg5 => verify_subg5(a, i, ell, e, tol),
                IdentityId::Autid => verify_autid(a, i, ell),
                IdentityId::Ell2 => verify_ell2(a, i, ell, e, tol),
                _ => verify_sagain(a, i, ell, e, tol),
            }
        }
        IdentityId::Q1 => match point {
            GridPoint::Index(k) => check_q1(*k),
            _ => Err(wrong_point()),
        },
        IdentityId::Qme => match point {
            GridPoint::IndexPair { m, k } => Ok(check_qme(*m, *k)),
            _ => Err(wrong_point()),
        },
        IdentityId::Hall => match point {
            GridPoint::Unit => verify_hall(ell.expect("ell-based identity"), e, spec.prod_bound, tol),
            _ => Err(wrong_point()),
        },
        IdentityId::WeightSum => match point {
            GridPoint::Index(r) => verify_weight_sum(*r, ell.expect("ell-based identity"), e, tol),
            _ => Err(wrong_point()),
        },
    }
}

fn failed_placeholder(
    spec: &SweepSpec,
    ell: Option<&PrimeEll>,
    point: &GridPoint,
) -> VerificationReport {
    let mut params = BTreeMap::new();
    if let Some(ell) = ell {
        params.insert(
            "ell".to_string(),
            ParamValue::Integer(BigInt::from(ell.value().clone())),
        );
    }
    match point {
        GridPoint::Unit => {}
        GridPoint::Type(a) => {
            params.insert("A".to_string(), ParamValue::group_type(a));
        }
        GridPoint::TypeWithIndex(a, i) => {
            params.insert("A".to_string(), ParamValue::group_type(a));
            params.insert("i".to_string(), ParamValue::integer(*i));
        }
        GridPoint::Index(k) => {
            params.insert("k".to_string(), ParamValue::integer(*k));
        }
        GridPoint::IndexPair { m, k } => {
            params.insert("k".to_string(), ParamValue::integer(*k));
            params.insert("m".to_string(), ParamValue::integer(*m));
        }
    }
    VerificationReport {
        identity_id: spec.identity.name().to_string(),
        params,
        truncation_levels: vec![0],
        lhs_partials: vec![Rational::zero()],
        rhs: RhsValue::Rational(Rational::zero()),
        abs_error: Rational::one(),
        tolerance: spec.tolerance.clone(),
        passed: false,
    }
}

/// Options for building the standard sweep grids.
#[derive(Clone, Copy, Debug)]
pub struct GridOptions {
    pub max_rank: u32,
    pub max_part: u32,
    pub max_index: u32,
    pub max_k: u32,
    pub max_m: u32,
}

impl Default for GridOptions {
    fn default() -> Self {
        GridOptions {
            max_rank: 2,
            max_part: 2,
            max_index: 2,
            max_k: 25,
            max_m: 20,
        }
    }
}

/// The standard grid of an identity: all types with rank and parts within
/// bounds, paired with whatever indices the identity requires.
pub fn standard_grid(identity: IdentityId, options: &GridOptions) -> Vec<GridPoint> {
    use crate::group_types::types_up_to;
    let types = types_up_to(options.max_rank, options.max_part);
    match identity {
        IdentityId::Subg4 | IdentityId::Converge3 | IdentityId::Converge4 => {
            types.into_iter().map(GridPoint::Type).collect()
        }
        IdentityId::Subg5 => types
            .into_iter()
            .flat_map(|a| {
                (0..=options.max_index).map(move |i| GridPoint::TypeWithIndex(a.clone(), i))
            })
            .collect(),
        IdentityId::Autid => types
            .into_iter()
            .filter(|a| a.rank_at(2) == a.rank())
            .flat_map(|a| {
                (0..=options.max_index).map(move |i| GridPoint::TypeWithIndex(a.clone(), i))
            })
            .collect(),
        IdentityId::Ell2 | IdentityId::Sagain => types
            .into_iter()
            .flat_map(|a| {
                let second = a.rank_at(2);
            (second..=a.rank()).map(move |i| GridPoint::TypeWithIndex(a.clone(), i))
            })
            .collect(),
        IdentityId::Q1 => (1..=options.max_k).map(GridPoint::Index).collect(),
        IdentityId::Qme => (0..=options.max_m)
            .flat_map(|m| (0..=options.max_k).map(move |k| GridPoint::IndexPair { m, k }))
            .collect(),
        IdentityId::Hall => vec![GridPoint::Unit],
        IdentityId::WeightSum => (0..=options.max_rank).map(GridPoint::Index).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::parse_rational;

    fn t(parts: &[u32]) -> GroupType {
        GroupType::new(parts.to_vec()).unwrap()
    }

    fn ell(v: u64) -> PrimeEll {
        PrimeEll::from_u64(v).unwrap()
    }

    fn tol(text: &str) -> Rational {
        parse_rational(text).unwrap()
    }

    fn rat(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn subg4_trivial_type_is_exact() {
        let report = verify_subg4(&GroupType::trivial(), &ell(3), 0, &tol("1/1000")).unwrap();
        assert!(report.passed);
        assert_eq!(report.abs_error, Rational::zero());
        assert_eq!(report.lhs_partials, vec![Rational::one()]);
        assert_eq!(report.rhs, RhsValue::Rational(Rational::one()));
    }

    #[test]
    fn subg4_rank_one_matches_geometric_series() {
        let report = verify_subg4(&t(&[1]), &ell(3), 8, &tol("1/1000")).unwrap();
        assert!(report.passed);
        assert_eq!(report.rhs, RhsValue::Rational(rat(3, 4)));
        // Error is exactly (3/4) * 3^-8.
        assert_eq!(report.abs_error, rat(3, 4 * 3i64.pow(8)));
        assert_eq!(report.truncation_levels, (1..=8).collect::<Vec<_>>());
    }

    #[test]
    fn subg4_rank_two_error_shrinks_with_truncation() {
        let prime = ell(3);
        let at6 = verify_subg4(&t(&[1, 1]), &prime, 6, &tol("1/1000")).unwrap();
        let at7 = verify_subg4(&t(&[1, 1]), &prime, 7, &tol("1/1000")).unwrap();
        assert!(at6.passed);
        assert!(at7.abs_error < at6.abs_error);
        let expected_rhs =
            Rational::one() / (eval_at(&poch(2), &prime) * Rational::from_integer(48.into()));
        assert_eq!(at6.rhs, RhsValue::Rational(expected_rhs));
    }

    #[test]
    fn subg5_examples() {
        let report = verify_subg5(&t(&[1]), 0, &ell(3), 4, &tol("1/1000")).unwrap();
        assert_eq!(report.abs_error, Rational::zero());

        let report = verify_subg5(&t(&[1]), 1, &ell(3), 12, &tol("1/100")).unwrap();
        assert_eq!(report.rhs, RhsValue::Rational(rat(1, 4)));
        assert_eq!(report.abs_error, rat(1, 4 * 3i64.pow(11)));

        let report = verify_subg5(&GroupType::trivial(), 2, &ell(5), 3, &tol("1/1000")).unwrap();
        assert_eq!(report.lhs_partials.last().unwrap(), &Rational::zero());
        assert_eq!(report.rhs, RhsValue::Rational(Rational::zero()));
        assert!(report.passed);

        assert!(verify_subg5(&t(&[1]), 4, &ell(3), 8, &tol("1")).is_err());
    }

    #[test]
    fn converge3_stabilizes_exactly_for_rank_one() {
        let report = verify_converge3(&t(&[1]), &ell(3), 8, &tol("1/1000")).unwrap();
        assert!(report.passed);
        assert_eq!(report.abs_error, Rational::zero());
        assert_eq!(report.rhs, RhsValue::Rational(rat(1, 3)));
        // Partials: 1/2 at level 1, then exactly 1/3 from level 2 on.
        assert_eq!(report.lhs_partials[0], rat(1, 2));
        for partial in &report.lhs_partials[1..] {
            assert_eq!(partial, &rat(1, 3));
        }
    }

    #[test]
    fn converge4_examples() {
        let report = verify_converge4(&GroupType::trivial(), &ell(3), 0, &tol("1/1000")).unwrap();
        assert_eq!(report.abs_error, Rational::zero());

        let report = verify_converge4(&t(&[1]), &ell(3), 12, &tol("1/100")).unwrap();
        assert_eq!(report.rhs, RhsValue::Rational(Rational::one()));
        // Tail of the doubling chain series: (1/2)(2/3)^11.
        assert_eq!(report.abs_error, rat(1024, 177147));
        assert!(report.passed);

        let report = verify_converge4(&t(&[2]), &ell(5), 10, &tol("1/10000")).unwrap();
        assert_eq!(report.rhs, RhsValue::Rational(rat(1, 15)));
        assert!(report.passed);
    }

    #[test]
    fn autid_examples() {
        let report = verify_autid(&GroupType::trivial(), 1, &ell(3)).unwrap();
        assert!(report.passed);
        assert_eq!(report.lhs_partials, vec![rat(2, 1)]);

        let report = verify_autid(&t(&[2]), 1, &ell(3)).unwrap();
        assert!(report.passed);
        assert_eq!(report.lhs_partials, vec![rat(108, 1)]);

        let report = verify_autid(&t(&[2]), 0, &ell(5)).unwrap();
        assert!(report.passed);
        assert_eq!(report.lhs_partials, vec![rat(20, 1)]);

        assert!(verify_autid(&t(&[1]), 1, &ell(3)).is_err());
        assert!(verify_autid(&t(&[2, 1]), 1, &ell(3)).is_err());
    }

    #[test]
    fn ell2_examples() {
        let report = verify_ell2(&t(&[1]), 1, &ell(3), 12, &tol("1/1000")).unwrap();
        assert_eq!(report.rhs, RhsValue::Rational(rat(1, 4)));
        assert!(report.passed);

        // i = 0 collapses to the single elementary type.
        let report = verify_ell2(&t(&[1]), 0, &ell(3), 1, &tol("1/1000")).unwrap();
        assert_eq!(report.rhs, RhsValue::Rational(rat(1, 2)));
        assert_eq!(report.lhs_partials, vec![rat(1, 2)]);
        assert_eq!(report.abs_error, Rational::zero());

        // i = r = s reproduces the fixed-rank average restricted to parts >= 2.
        let report = verify_ell2(&t(&[2]), 1, &ell(3), 8, &tol("1/1000")).unwrap();
        assert_eq!(report.rhs, RhsValue::Rational(rat(1, 4)));
        assert!(report.passed);

        assert!(verify_ell2(&t(&[2]), 0, &ell(3), 8, &tol("1")).is_err());
        assert!(verify_ell2(&t(&[1]), 2, &ell(3), 8, &tol("1")).is_err());
    }

    #[test]
    fn sagain_examples() {
        // i = s: single exact term at the base type.
        let report = verify_sagain(&t(&[1]), 0, &ell(3), 4, &tol("1/1000")).unwrap();
        assert_eq!(report.rhs, RhsValue::Rational(rat(1, 2)));
        assert_eq!(report.abs_error, Rational::zero());

        let report = verify_sagain(&t(&[1]), 1, &ell(3), 8, &tol("1/1000")).unwrap();
        assert_eq!(report.rhs, RhsValue::Rational(rat(-1, 6)));
        assert_eq!(report.abs_error, Rational::zero());

        let report = verify_sagain(&t(&[2]), 1, &ell(3), 8, &tol("1/1000")).unwrap();
        assert_eq!(report.rhs, RhsValue::Rational(rat(1, 9)));
        assert_eq!(report.abs_error, Rational::zero());
    }

    #[test]
    fn hall_examples() {
        let report = verify_hall(&ell(3), 0, 0, &tol("1/1000")).unwrap();
        assert_eq!(report.lhs_partials, vec![Rational::one()]);
        assert_eq!(report.rhs, RhsValue::Rational(Rational::one()));
        assert!(report.passed);

        let report = verify_hall(&ell(3), 1, 40, &tol("1")).unwrap();
        assert_eq!(report.lhs_partials[1], rat(3, 2));

        let report = verify_hall(&ell(3), 12, 40, &tol("1/1000")).unwrap();
        assert!(report.passed);
    }

    #[test]
    fn weight_sum_examples() {
        let report = verify_weight_sum(0, &ell(3), 0, &tol("1/1000")).unwrap();
        assert_eq!(report.abs_error, Rational::zero());

        let report = verify_weight_sum(1, &ell(3), 12, &tol("1/1000")).unwrap();
        assert_eq!(report.rhs, RhsValue::Rational(rat(3, 2)));
        assert!(report.passed);
        // Partial at level 1 is 1 + 1/3.
        assert_eq!(report.lhs_partials[1], rat(4, 3));
    }

    #[test]
    fn sweep_runs_grid_in_order() {
        let spec = SweepSpec {
            identity: IdentityId::Subg4,
            ells: vec![ell(3), ell(5)],
            points: standard_grid(IdentityId::Subg4, &GridOptions::default()),
            max_exponent: 8,
            prod_bound: 40,
            tolerance: tol("1/1000"),
        };
        let outcome = sweep(&spec).unwrap();
        assert_eq!(outcome.reports.len(), 12);
        assert!(outcome.passed);
        assert!(outcome.errors.is_empty());
    }

    #[test]
    fn sweep_rejects_empty_grid() {
        let spec = SweepSpec {
            identity: IdentityId::Subg4,
            ells: vec![ell(3)],
            points: Vec::new(),
            max_exponent: 8,
            prod_bound: 40,
            tolerance: tol("1/1000"),
        };
        assert!(matches!(sweep(&spec), Err(Error::EmptyGrid)));
    }

    #[test]
    fn sweep_converts_point_errors_into_failed_reports() {
        let spec = SweepSpec {
            identity: IdentityId::Autid,
            ells: vec![ell(3)],
            // (1) is not a valid autid base type.
            points: vec![GridPoint::TypeWithIndex(t(&[1]), 1)],
            max_exponent: 8,
            prod_bound: 40,
            tolerance: tol("1/1000"),
        };
        let outcome = sweep(&spec).unwrap();
        assert_eq!(outcome.reports.len(), 1);
        assert!(!outcome.passed);
        assert_eq!(outcome.errors.len(), 1);
        assert!(!outcome.reports[0].passed);
    }

    #[test]
    fn identity_names_round_trip() {
        for id in IdentityId::ALL {
            assert_eq!(id.name().parse::<IdentityId>().unwrap(), id);
        }
        assert!("nope".parse::<IdentityId>().is_err());
    }
}

//! Sparse Laurent-polynomial arithmetic in the formal variable `q`, the
//! q-Pochhammer products and Gaussian binomials built from it, and the two
//! symbolic identity checks that reduce to "this polynomial is zero / one".
//!
//! Polynomials are kept in canonical sparse form (no stored zero
//! coefficients), so equality, `is_zero` and `is_one` are structural.
//! Everything is exact: coefficients are big integers, evaluation at
//! `q = 1/ell` produces big rationals, and Gaussian binomials are obtained by
//! polynomial division with a hard assertion that the remainder vanishes.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Mutex, OnceLock};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::report::{ParamValue, RhsValue, VerificationReport};

/// An integer-coefficient Laurent polynomial in `q`, stored as a sparse map
/// from exponent to nonzero coefficient.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct LaurentPoly {
    coeffs: BTreeMap<i64, BigInt>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        LaurentPoly::default()
    }

    pub fn one() -> Self {
        LaurentPoly::monomial(0, 1)
    }

    /// The variable `q` itself.
    pub fn q() -> Self {
        LaurentPoly::monomial(1, 1)
    }

    /// `coeff * q^exponent`; collapses to zero if `coeff` is zero.
    pub fn monomial(exponent: i64, coeff: impl Into<BigInt>) -> Self {
        let coeff = coeff.into();
        let mut coeffs = BTreeMap::new();
        if !coeff.is_zero() {
            coeffs.insert(exponent, coeff);
        }
        LaurentPoly { coeffs }
    }

    pub fn from_terms<I, C>(terms: I) -> Self
    where
        I: IntoIterator<Item = (i64, C)>,
        C: Into<BigInt>,
    {
        let mut poly = LaurentPoly::zero();
        for (exponent, coeff) in terms {
            poly.add_term(exponent, coeff.into());
        }
        poly
    }

    fn add_term(&mut self, exponent: i64, coeff: BigInt) {
        if coeff.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.coeffs.entry(exponent) {
            Entry::Vacant(slot) => {
                slot.insert(coeff);
            }
            Entry::Occupied(mut slot) => {
                *slot.get_mut() += coeff;
                if slot.get().is_zero() {
                    slot.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1
            && self
                .coeffs
                .get(&0)
                .map(|c| c.is_one())
                .unwrap_or(false)
    }

    pub fn coeff(&self, exponent: i64) -> BigInt {
        self.coeffs.get(&exponent).cloned().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &BigInt)> {
        self.coeffs.iter().map(|(e, c)| (*e, c))
    }

    pub fn num_terms(&self) -> usize {
        self.coeffs.len()
    }

    pub fn min_exponent(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }

    pub fn max_exponent(&self) -> Option<i64> {
        self.coeffs.keys().next_back().copied()
    }

    /// Multiplies by `q^delta`.
    pub fn shifted(&self, delta: i64) -> Self {
        LaurentPoly {
            coeffs: self
                .coeffs
                .iter()
                .map(|(e, c)| (e + delta, c.clone()))
                .collect(),
        }
    }

    pub fn scaled(&self, factor: &BigInt) -> Self {
        if factor.is_zero() {
            return LaurentPoly::zero();
        }
        LaurentPoly {
            coeffs: self
                .coeffs
                .iter()
                .map(|(e, c)| (*e, c * factor))
                .collect(),
        }
    }

    /// Sum of absolute values of all coefficients; zero exactly for the zero
    /// polynomial. Used as the defect measure of the symbolic checks.
    pub fn coeff_norm(&self) -> BigUint {
        self.coeffs
            .values()
            .map(|c| c.abs().to_biguint().expect("abs is nonnegative"))
            .sum()
    }

    /// Exact division: returns `self / divisor` when the remainder is zero,
    /// `None` otherwise (including division by zero).
    pub fn exact_div(&self, divisor: &LaurentPoly) -> Option<LaurentPoly> {
        if divisor.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(LaurentPoly::zero());
        }
        let divisor_top = divisor.max_exponent().expect("nonzero divisor");
        let divisor_lead = divisor.coeffs.get(&divisor_top).expect("leading term");
        // Exponents of an exact quotient are bounded below by the difference
        // of the minimal exponents; crossing that bound proves inexactness.
        let quotient_floor = self.min_exponent().unwrap() - divisor.min_exponent().unwrap();
        let mut remainder = self.clone();
        let mut quotient = LaurentPoly::zero();
        while !remainder.is_zero() {
            let top = remainder.max_exponent().unwrap();
            let lead = remainder.coeffs.get(&top).unwrap();
            let exponent = top - divisor_top;
            if exponent < quotient_floor {
                return None;
            }
            let (factor, rem) = lead.div_rem(divisor_lead);
            if !rem.is_zero() {
                return None;
            }
            remainder = &remainder - &divisor.shifted(exponent).scaled(&factor);
            quotient.add_term(exponent, factor);
        }
        Some(quotient)
    }

    fn mul_impl(&self, other: &LaurentPoly) -> LaurentPoly {
        if self.is_zero() || other.is_zero() {
            return LaurentPoly::zero();
        }
        let a: Vec<(i64, &BigInt)> = self.terms().collect();
        let b: Vec<(i64, &BigInt)> = other.terms().collect();
        let offset = a[0].0 + b[0].0;
        let span = (a[a.len() - 1].0 + b[b.len() - 1].0 - offset + 1) as usize;
        if let Some(dense) = mul_fast(&a, &b, offset, span) {
            return dense;
        }
        let mut acc: Vec<BigInt> = vec![BigInt::zero(); span];
        for (ea, ca) in &a {
            for (eb, cb) in &b {
                acc[(ea + eb - offset) as usize] += *ca * *cb;
            }
        }
        collect_dense(&acc, offset)
    }
}

/// Convolution over machine integers for the common case of word-sized
/// coefficients. Exactness is preserved by checked arithmetic: any overflow
/// or oversized input falls back to the big-integer path.
fn mul_fast(
    a: &[(i64, &BigInt)],
    b: &[(i64, &BigInt)],
    offset: i64,
    span: usize,
) -> Option<LaurentPoly> {
    let small_a: Option<Vec<(i64, i64)>> =
        a.iter().map(|(e, c)| c.to_i64().map(|v| (*e, v))).collect();
    let small_b: Option<Vec<(i64, i64)>> =
        b.iter().map(|(e, c)| c.to_i64().map(|v| (*e, v))).collect();
    let (small_a, small_b) = (small_a?, small_b?);
    let mut acc: Vec<i128> = vec![0; span];
    for (ea, ca) in &small_a {
        for (eb, cb) in &small_b {
            let slot = &mut acc[(ea + eb - offset) as usize];
            *slot = slot.checked_add(i128::from(*ca) * i128::from(*cb))?;
        }
    }
    let dense: Vec<BigInt> = acc.into_iter().map(BigInt::from).collect();
    Some(collect_dense(&dense, offset))
}

fn collect_dense(dense: &[BigInt], offset: i64) -> LaurentPoly {
    LaurentPoly {
        coeffs: dense
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (offset + i as i64, c.clone()))
            .collect(),
    }
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;

    fn add(self, other: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (e, c) in other.terms() {
            out.add_term(e, c.clone());
        }
        out
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;

    fn sub(self, other: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (e, c) in other.terms() {
            out.add_term(e, -c.clone());
        }
        out
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;

    fn mul(self, other: &LaurentPoly) -> LaurentPoly {
        self.mul_impl(other)
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;

    fn neg(self) -> LaurentPoly {
        LaurentPoly {
            coeffs: self.coeffs.iter().map(|(e, c)| (*e, -c)).collect(),
        }
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (index, (exponent, coeff)) in self.terms().enumerate() {
            let negative = coeff.is_negative();
            let magnitude = coeff.abs();
            if index == 0 {
                if negative {
                    write!(f, "-")?;
                }
            } else if negative {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let unit = magnitude.is_one();
            match (exponent, unit) {
                (0, _) => write!(f, "{magnitude}")?,
                (1, true) => write!(f, "q")?,
                (1, false) => write!(f, "{magnitude}*q")?,
                (e, true) => write!(f, "q^{e}")?,
                (e, false) => write!(f, "{magnitude}*q^{e}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LaurentPoly({self})")
    }
}

/// An odd prime, the modulus `ell` of every group-side computation; all
/// numeric identity checks evaluate polynomials at `q = 1/ell`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PrimeEll {
    value: BigUint,
}

impl PrimeEll {
    /// Accepts odd primes only (so `value >= 3`). Primality is decided by
    /// Miller-Rabin with a fixed witness set, deterministic below 3.3e24.
    pub fn new(value: BigUint) -> Result<Self> {
        let three = BigUint::from(3u32);
        if value < three || (&value % 2u32).is_zero() || !is_prime(&value) {
            return Err(Error::InvalidPrime(value.to_string()));
        }
        Ok(PrimeEll { value })
    }

    pub fn from_u64(value: u64) -> Result<Self> {
        PrimeEll::new(BigUint::from(value))
    }

    pub fn value(&self) -> &BigUint {
        &self.value
    }

    pub fn to_u64(&self) -> Option<u64> {
        self.value.to_u64()
    }

    /// `ell^exponent` as a big integer.
    pub fn pow(&self, exponent: u32) -> BigUint {
        self.value.pow(exponent)
    }

    /// `ell^exponent` as an exact rational, allowing negative exponents.
    pub fn pow_rational(&self, exponent: i64) -> Rational {
        let magnitude = BigInt::from(self.value.pow(exponent.unsigned_abs() as u32));
        if exponent >= 0 {
            Rational::from_integer(magnitude)
        } else {
            Rational::new(BigInt::one(), magnitude)
        }
    }
}

impl fmt::Display for PrimeEll {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

fn is_prime(n: &BigUint) -> bool {
    let two = BigUint::from(2u32);
    if *n < two {
        return false;
    }
    for w in [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let witness = BigUint::from(w);
        if *n == witness {
            return true;
        }
        if (n % &witness).is_zero() {
            return false;
        }
    }
    let n_minus_one = n - 1u32;
    let trailing = n_minus_one.trailing_zeros().unwrap_or(0);
    let odd_part = &n_minus_one >> trailing;
    'witness: for w in [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = BigUint::from(w).modpow(&odd_part, n);
        if x.is_one() || x == n_minus_one {
            continue;
        }
        for _ in 1..trailing {
            x = x.modpow(&two, n);
            if x == n_minus_one {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// `(q)_i`, the product of `1 - q^j` for `j = 1..=i`; the empty product is 1.
pub fn poch(i: u32) -> LaurentPoly {
    static CACHE: OnceLock<Mutex<Vec<LaurentPoly>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(vec![LaurentPoly::one()]));
    let mut table = cache.lock().expect("poch cache poisoned");
    while table.len() <= i as usize {
        let j = table.len() as i64;
        let factor = &LaurentPoly::one() - &LaurentPoly::monomial(j, 1);
        let next = table.last().expect("nonempty table") * &factor;
        table.push(next);
    }
    table[i as usize].clone()
}

/// `(z; q)_i`, the product of `1 - q^j * z` for `j = 0..i`, for an arbitrary
/// Laurent-polynomial argument `z`.
pub fn poch_z(z: &LaurentPoly, i: u32) -> LaurentPoly {
    let mut out = LaurentPoly::one();
    for j in 0..i as i64 {
        let factor = &LaurentPoly::one() - &z.shifted(j);
        out = &out * &factor;
    }
    out
}

/// The Gaussian binomial `(q)_k / ((q)_m (q)_{k-m})` as an exact polynomial;
/// zero when `k < m`.
///
/// Panics if the division leaves a remainder: that can only happen through an
/// arithmetic bug, never through valid input.
pub fn gauss_binomial(k: u32, m: u32) -> LaurentPoly {
    if k < m {
        return LaurentPoly::zero();
    }
    static CACHE: OnceLock<Mutex<HashMap<(u32, u32), LaurentPoly>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    // Symmetric in m <-> k-m; normalize the key.
    let key = (k, m.min(k - m));
    if let Some(hit) = cache.lock().expect("binomial cache poisoned").get(&key) {
        return hit.clone();
    }
    let divisor = &poch(key.1) * &poch(k - key.1);
    let value = poch(k)
        .exact_div(&divisor)
        .expect("Gaussian binomial division must be exact");
    cache
        .lock()
        .expect("binomial cache poisoned")
        .insert(key, value.clone());
    value
}

/// Exact value of `p` at `q = 1/ell`.
pub fn eval_at(p: &LaurentPoly, ell: &PrimeEll) -> Rational {
    if p.is_zero() {
        return Rational::zero();
    }
    // Over the common denominator ell^top (clamped at ell^0 when every
    // exponent is negative), each term contributes coeff * ell^(top - e).
    let top = p.max_exponent().unwrap().max(0);
    let base = BigInt::from(ell.value().clone());
    let mut numerator = BigInt::zero();
    for (exponent, coeff) in p.terms() {
        numerator += coeff * base.pow((top - exponent) as u32);
    }
    Rational::new(numerator, base.pow(top as u32))
}

fn symbolic_report(
    identity_id: &str,
    params: BTreeMap<String, ParamValue>,
    defect: &LaurentPoly,
    rhs: RhsValue,
) -> VerificationReport {
    let norm = Rational::from_integer(BigInt::from(defect.coeff_norm()));
    VerificationReport {
        identity_id: identity_id.to_string(),
        params,
        truncation_levels: vec![0],
        lhs_partials: vec![norm.clone()],
        rhs,
        abs_error: norm.clone(),
        tolerance: Rational::zero(),
        passed: norm.is_zero(),
    }
}

/// Checks, as a Laurent-polynomial identity, that the alternating sum of
/// `binom(k,i)_q * q^(i(i+1)/2 - ik)` over `i = 0..=k` vanishes.
pub fn check_q1(k: u32) -> Result<VerificationReport> {
    if k == 0 {
        return Err(Error::Precondition(
            "q1 requires a positive integer k".to_string(),
        ));
    }
    let mut sum = LaurentPoly::zero();
    for i in 0..=k {
        let shift = i64::from(i) * (i64::from(i) + 1) / 2 - i64::from(i) * i64::from(k);
        let term = gauss_binomial(k, i).shifted(shift);
        sum = if i % 2 == 0 { &sum + &term } else { &sum - &term };
    }
    let mut params = BTreeMap::new();
    params.insert("k".to_string(), ParamValue::integer(k));
    Ok(symbolic_report("q1", params, &sum, RhsValue::ZeroPolynomial))
}

/// Checks, as a Laurent-polynomial identity, that
/// `sum_i binom(m,i)_q binom(k,i)_q (q)_i q^((m-i)(k-i)) = 1`;
/// the sum is finite because the binomials vanish beyond `min(m, k)`.
pub fn check_qme(m: u32, k: u32) -> VerificationReport {
    let mut sum = LaurentPoly::zero();
    for i in 0..=m.min(k) {
        let shift = i64::from(m - i) * i64::from(k - i);
        let term = &(&gauss_binomial(m, i) * &gauss_binomial(k, i)) * &poch(i);
        sum = &sum + &term.shifted(shift);
    }
    let defect = &sum - &LaurentPoly::one();
    let mut params = BTreeMap::new();
    params.insert("k".to_string(), ParamValue::integer(k));
    params.insert("m".to_string(), ParamValue::integer(m));
    symbolic_report("qme", params, &defect, RhsValue::OnePolynomial)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn poly(terms: &[(i64, i64)]) -> LaurentPoly {
        LaurentPoly::from_terms(terms.iter().copied())
    }

    #[test]
    fn poch_small_values() {
        assert!(poch(0).is_one());
        assert_eq!(poch(1), poly(&[(0, 1), (1, -1)]));
        // (1-q)(1-q^2) expanded by hand.
        assert_eq!(poch(2), poly(&[(0, 1), (1, -1), (2, -1), (3, 1)]));
    }

    #[test]
    fn poch_degree_and_constant_term() {
        for i in 0..=10u32 {
            let p = poch(i);
            assert_eq!(p.max_exponent().unwrap(), i64::from(i) * (i64::from(i) + 1) / 2);
            assert_eq!(p.coeff(0), BigInt::one());
        }
    }

    #[test]
    fn gauss_binomial_small_values() {
        // (1-q^2)/(1-q)(1-q) ... hand division of (q)_2 / ((q)_1 (q)_1).
        assert_eq!(gauss_binomial(2, 1), poly(&[(0, 1), (1, 1)]));
        assert!(gauss_binomial(3, 3).is_one());
        assert!(gauss_binomial(1, 2).is_zero());
    }

    #[test]
    fn gauss_binomial_symmetry_and_pascal_recursion() {
        for k in 0..=12u32 {
            for m in 0..=k {
                let direct = gauss_binomial(k, m);
                assert_eq!(direct, gauss_binomial(k, k - m), "symmetry at ({k},{m})");
                if k >= 1 && m >= 1 {
                    let pascal = &gauss_binomial(k - 1, m - 1)
                        + &gauss_binomial(k - 1, m).shifted(i64::from(m));
                    assert_eq!(direct, pascal, "Pascal recursion at ({k},{m})");
                }
            }
        }
    }

    #[test]
    fn rothe_expansion_matches_pochhammer_product() {
        let candidates = [
            LaurentPoly::q(),
            LaurentPoly::monomial(2, 1),
            LaurentPoly::monomial(0, -1),
        ];
        for z in &candidates {
            for k in 0..=10u32 {
                let mut sum = LaurentPoly::zero();
                let mut z_power = LaurentPoly::one();
                for i in 0..=k {
                    let shift = i64::from(i) * (i64::from(i) - 1) / 2;
                    let term = (&gauss_binomial(k, i) * &z_power).shifted(shift);
                    sum = if i % 2 == 0 { &sum + &term } else { &sum - &term };
                    z_power = &z_power * z;
                }
                assert_eq!(sum, poch_z(z, k), "Rothe expansion at k={k}, z={z}");
            }
        }
    }

    #[test]
    fn q1_vanishes_for_small_k() {
        assert!(check_q1(1).unwrap().passed);
        // k = 2 by hand: 1 - (1+q) q^{-1} + q^{-1} = 0.
        let report = check_q1(2).unwrap();
        assert!(report.passed);
        assert_eq!(report.abs_error, Rational::zero());
        for k in 3..=8 {
            assert!(check_q1(k).unwrap().passed, "q1 failed at k={k}");
        }
        assert!(check_q1(0).is_err());
    }

    #[test]
    fn qme_equals_one_for_small_parameters() {
        // (m,k) = (0,5): single i=0 term q^0.
        assert!(check_qme(0, 5).passed);
        // (1,1): q + (1-q).
        assert!(check_qme(1, 1).passed);
        // (2,1): q^2 + (1+q)(1-q).
        assert!(check_qme(2, 1).passed);
        for m in 0..=6 {
            for k in 0..=6 {
                assert!(check_qme(m, k).passed, "qme failed at ({m},{k})");
            }
        }
    }

    #[test]
    fn eval_at_examples() {
        let ell3 = PrimeEll::from_u64(3).unwrap();
        let ell5 = PrimeEll::from_u64(5).unwrap();
        assert_eq!(
            eval_at(&poch(1), &ell3),
            Rational::new(2.into(), 3.into())
        );
        assert_eq!(eval_at(&LaurentPoly::zero(), &ell3), Rational::zero());
        assert_eq!(
            eval_at(&LaurentPoly::monomial(-2, 1), &ell5),
            Rational::from_integer(25.into())
        );
    }

    #[test]
    fn exact_div_rejects_inexact_quotients() {
        let p = poly(&[(0, 1), (1, 1)]);
        let d = poly(&[(0, 1), (1, -1)]);
        assert!(p.exact_div(&d).is_none());
        assert!(p.exact_div(&LaurentPoly::zero()).is_none());
        let product = &p * &d;
        assert_eq!(product.exact_div(&d).unwrap(), p);
    }

    #[test]
    fn display_is_readable() {
        assert_eq!(poch(2).to_string(), "1 - q - q^2 + q^3");
        assert_eq!(LaurentPoly::monomial(-2, 3).to_string(), "3*q^-2");
        assert_eq!(LaurentPoly::zero().to_string(), "0");
    }

    #[test]
    fn prime_ell_validation() {
        assert!(PrimeEll::from_u64(2).is_err());
        assert!(PrimeEll::from_u64(4).is_err());
        assert!(PrimeEll::from_u64(9).is_err());
        assert!(PrimeEll::from_u64(1).is_err());
        for ok in [3, 5, 7, 97, 1009] {
            assert!(PrimeEll::from_u64(ok).is_ok(), "{ok} should be accepted");
        }
    }

    #[test]
    fn big_coefficient_multiplication_falls_back_exactly() {
        // Coefficients around 2^80 exceed the machine-word fast path.
        let huge = BigInt::from(1u128 << 80);
        let a = LaurentPoly::from_terms([(0i64, huge.clone()), (1, huge.clone())]);
        let b = a.clone();
        let product = &a * &b;
        assert_eq!(product.coeff(1), 2 * (&huge * &huge));
    }

    fn small_poly() -> impl Strategy<Value = LaurentPoly> {
        proptest::collection::vec(((-6i64..=6), (-9i64..=9)), 0..6)
            .prop_map(|terms| LaurentPoly::from_terms(terms))
    }

    proptest! {
        #[test]
        fn eval_at_is_a_ring_homomorphism(a in small_poly(), b in small_poly()) {
            let ell = PrimeEll::from_u64(3).unwrap();
            prop_assert_eq!(eval_at(&(&a * &b), &ell), eval_at(&a, &ell) * eval_at(&b, &ell));
            prop_assert_eq!(eval_at(&(&a + &b), &ell), eval_at(&a, &ell) + eval_at(&b, &ell));
        }

        #[test]
        fn ring_axioms_on_samples(a in small_poly(), b in small_poly(), c in small_poly()) {
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        }

        #[test]
        fn no_zero_coefficients_survive(a in small_poly(), b in small_poly()) {
            for poly in [&a + &b, &a - &b, &a * &b] {
                prop_assert!(poly.terms().all(|(_, coeff)| !coeff.is_zero()));
            }
        }

        #[test]
        fn exact_div_inverts_multiplication(a in small_poly(), b in small_poly()) {
            prop_assume!(!b.is_zero());
            let product = &a * &b;
            prop_assert_eq!(product.exact_div(&b), Some(a));
        }
    }
}

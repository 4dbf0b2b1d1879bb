//! Subgroup counting: `sub_count(A, B)` is the number of subgroups of `B`
//! isomorphic to `A`, computed by the classical product formula over
//! conjugate partitions, with Gaussian binomials evaluated exactly at
//! `q = 1/ell`. An exhaustive census over small materialized groups serves
//! as the independent oracle.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::sync::{Mutex, OnceLock};

use num_bigint::{BigInt, BigUint};
use num_traits::One;

use crate::error::{Error, Result};
use crate::group_types::GroupType;
use crate::qseries::{eval_at, gauss_binomial, PrimeEll};
use crate::rational::Rational;

/// Number of subgroups of `B` isomorphic to `A`.
///
/// With conjugates `c = conj(B)` and `d = conj(A)`, the count is the product
/// over rows `i` of `ell^(d_i (c_i - d_i)) * binom(c_i - d_(i+1), d_i - d_(i+1))`
/// with the binomial evaluated at `q = 1/ell`. The rational product is
/// cleared to an integer, with a hard integrality assertion.
///
/// The chain recursions evaluate the same pairs over and over, so results
/// are memoized globally.
pub fn sub_count(a: &GroupType, b: &GroupType, ell: &PrimeEll) -> BigUint {
    if !a.embeds_in(b) {
        return BigUint::ZERO;
    }
    type Key = (GroupType, GroupType, BigUint);
    static CACHE: OnceLock<Mutex<HashMap<Key, BigUint>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let key = (a.clone(), b.clone(), ell.value().clone());
    if let Some(hit) = cache.lock().expect("sub_count cache poisoned").get(&key) {
        return hit.clone();
    }
    let value = sub_count_uncached(a, b, ell);
    cache
        .lock()
        .expect("sub_count cache poisoned")
        .insert(key, value.clone());
    value
}

fn sub_count_uncached(a: &GroupType, b: &GroupType, ell: &PrimeEll) -> BigUint {
    let c = b.conjugate();
    let d = a.conjugate();
    let mut product = Rational::from_integer(BigInt::one());
    for i in 0..c.len() {
        let c_i = c[i];
        let d_i = d.get(i).copied().unwrap_or(0);
        let d_next = d.get(i + 1).copied().unwrap_or(0);
        product *= ell.pow_rational(i64::from(d_i) * i64::from(c_i - d_i));
        product *= eval_at(&gauss_binomial(c_i - d_next, d_i - d_next), ell);
    }
    assert!(
        product.denom().is_one(),
        "subgroup count must clear to an integer: {product} for {a} in {b}"
    );
    product
        .to_integer()
        .to_biguint()
        .expect("subgroup counts are nonnegative")
}

/// Size limits for the enumeration oracle. The census materializes the whole
/// group, so it is only available for small instances.
#[derive(Clone, Copy, Debug)]
pub struct CensusBounds {
    pub max_order_exponent: u32,
    pub max_rank: u32,
    /// Hard cap on the number of elements, independent of ell.
    pub max_elements: u64,
}

impl Default for CensusBounds {
    fn default() -> Self {
        CensusBounds {
            max_order_exponent: 4,
            max_rank: 3,
            max_elements: 1 << 20,
        }
    }
}

/// An element of a materialized group, as a vector of residues, one per
/// cyclic factor of `B` (reduced modulo `ell^part`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ElementVector {
    pub residues: Vec<u64>,
}

/// The full subgroup census of one group: how many subgroups of each type it
/// contains. Types that do not embed never appear.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubgroupTypeCensus {
    counts: BTreeMap<GroupType, BigUint>,
}

impl SubgroupTypeCensus {
    pub fn count(&self, a: &GroupType) -> BigUint {
        self.counts.get(a).cloned().unwrap_or(BigUint::ZERO)
    }

    pub fn total(&self) -> BigUint {
        self.counts.values().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&GroupType, &BigUint)> {
        self.counts.iter()
    }
}

impl fmt::Display for SubgroupTypeCensus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rendered: Vec<String> = self
            .counts
            .iter()
            .map(|(t, n)| format!("{t}: {n}"))
            .collect();
        write!(f, "{{{}}}", rendered.join(", "))
    }
}

/// Enumerates every subgroup of `B` exactly once — spans of generator tuples
/// of length up to `rank(B)`, deduplicated by element set — and classifies
/// each one by its torsion profile.
pub fn subgroup_census(
    b: &GroupType,
    ell: &PrimeEll,
    bounds: CensusBounds,
) -> Result<SubgroupTypeCensus> {
    if b.order_exponent() > bounds.max_order_exponent || b.rank() > bounds.max_rank {
        return Err(Error::OracleBound(format!(
            "census of {b} exceeds exponent {} / rank {}",
            bounds.max_order_exponent, bounds.max_rank
        )));
    }
    let group = Materialized::new(b, ell, bounds.max_elements)?;
    let size = group.size as usize;

    let mut zero_only = BitSet::new(size);
    zero_only.insert(0);
    let mut seen: HashSet<BitSet> = HashSet::new();
    seen.insert(zero_only.clone());
    let mut frontier = vec![zero_only];

    for _generator in 0..b.rank() {
        let mut next = Vec::new();
        for subgroup in &frontier {
            for x in 1..group.size as u32 {
                if subgroup.contains(x) {
                    continue;
                }
                let span = group.span(subgroup, x);
                if seen.insert(span.clone()) {
                    next.push(span);
                }
            }
        }
        frontier = next;
    }

    let mut counts: BTreeMap<GroupType, BigUint> = BTreeMap::new();
    for subgroup in &seen {
        let group_type = group.type_of(subgroup)?;
        *counts.entry(group_type).or_insert(BigUint::ZERO) += BigUint::one();
    }
    Ok(SubgroupTypeCensus { counts })
}

/// Recovers the type of a subgroup, presented as an explicit set of element
/// vectors of `B`, from its torsion profile: the number of elements killed by
/// `ell^k` must be `ell^(sum_j min(part_j, k))`, which pins the conjugate
/// partition.
pub fn type_of_subgroup(
    elements: &[ElementVector],
    b: &GroupType,
    ell: &PrimeEll,
) -> Result<GroupType> {
    let group = Materialized::new(b, ell, CensusBounds::default().max_elements)?;
    let mut set = BitSet::new(group.size as usize);
    for element in elements {
        if element.residues.len() != b.parts().len() {
            return Err(Error::InconsistentTorsion(format!(
                "element {:?} does not live in {b}",
                element.residues
            )));
        }
        for (residue, &modulus) in element.residues.iter().zip(&group.moduli) {
            if *residue >= modulus {
                return Err(Error::InconsistentTorsion(format!(
                    "residue {residue} out of range for modulus {modulus}"
                )));
            }
        }
        set.insert(group.index(&element.residues));
    }
    if set.count() != elements.len() as u64 {
        return Err(Error::InconsistentTorsion(
            "duplicate elements in subgroup listing".to_string(),
        ));
    }
    group.type_of(&set)
}

/// A concrete direct sum of cyclic groups with mixed-radix element indexing.
pub(crate) struct Materialized {
    pub(crate) moduli: Vec<u64>,
    strides: Vec<u64>,
    pub(crate) size: u64,
    parts: Vec<u32>,
    ell: u64,
    /// Small groups get a dense addition table; larger ones add on the fly.
    add_table: Option<Vec<u32>>,
}

impl Materialized {
    pub(crate) fn new(b: &GroupType, ell: &PrimeEll, max_elements: u64) -> Result<Self> {
        let ell_small = ell.to_u64().ok_or_else(|| {
            Error::OracleBound(format!("ell = {ell} is too large to materialize a group"))
        })?;
        let mut moduli = Vec::with_capacity(b.parts().len());
        let mut size: u64 = 1;
        for &part in b.parts() {
            let modulus = ell_small
                .checked_pow(part)
                .ok_or_else(|| Error::OracleBound(format!("{b} at ell = {ell} overflows")))?;
            size = size
                .checked_mul(modulus)
                .filter(|&s| s <= max_elements)
                .ok_or_else(|| {
                    Error::OracleBound(format!("{b} at ell = {ell} exceeds {max_elements} elements"))
                })?;
            moduli.push(modulus);
        }
        let mut strides = Vec::with_capacity(moduli.len());
        let mut stride = 1u64;
        for modulus in &moduli {
            strides.push(stride);
            stride *= modulus;
        }
        let mut group = Materialized {
            moduli,
            strides,
            size,
            parts: b.parts().to_vec(),
            ell: ell_small,
            add_table: None,
        };
        if size <= 1024 {
            let n = size as usize;
            let mut table = vec![0u32; n * n];
            for x in 0..n as u32 {
                for y in 0..=x {
                    let sum = group.add_slow(x, y);
                    table[x as usize * n + y as usize] = sum;
                    table[y as usize * n + x as usize] = sum;
                }
            }
            group.add_table = Some(table);
        }
        Ok(group)
    }

    pub(crate) fn index(&self, residues: &[u64]) -> u32 {
        residues
            .iter()
            .zip(&self.strides)
            .map(|(r, s)| r * s)
            .sum::<u64>() as u32
    }

    pub(crate) fn decode(&self, index: u32) -> Vec<u64> {
        let mut rest = u64::from(index);
        self.moduli
            .iter()
            .map(|modulus| {
                let residue = rest % modulus;
                rest /= modulus;
                residue
            })
            .collect()
    }

    fn add_slow(&self, x: u32, y: u32) -> u32 {
        let mut rest_x = u64::from(x);
        let mut rest_y = u64::from(y);
        let mut out = 0u64;
        for (modulus, stride) in self.moduli.iter().zip(&self.strides) {
            let rx = rest_x % modulus;
            let ry = rest_y % modulus;
            out += ((rx + ry) % modulus) * stride;
            rest_x /= modulus;
            rest_y /= modulus;
        }
        out as u32
    }

    #[inline]
    pub(crate) fn add(&self, x: u32, y: u32) -> u32 {
        match &self.add_table {
            Some(table) => table[x as usize * self.size as usize + y as usize],
            None => self.add_slow(x, y),
        }
    }

    /// Order exponent of an element: the least `k` with `ell^k * x = 0`.
    fn order_exponent(&self, index: u32) -> u32 {
        self.decode(index)
            .iter()
            .zip(&self.parts)
            .map(|(&residue, &part)| {
                if residue == 0 {
                    0
                } else {
                    // part minus the ell-adic valuation of the residue.
                    let mut v = 0u32;
                    let mut r = residue;
                    while r % self.ell == 0 {
                        r /= self.ell;
                        v += 1;
                    }
                    part - v
                }
            })
            .max()
            .unwrap_or(0)
    }

    /// Span of `subgroup` and one extra element: the union of all translates
    /// of `subgroup` by multiples of `x`.
    pub(crate) fn span(&self, subgroup: &BitSet, x: u32) -> BitSet {
        let mut out = subgroup.clone();
        let mut multiple = x;
        while multiple != 0 {
            for element in subgroup.iter() {
                out.insert(self.add(element, multiple));
            }
            multiple = self.add(multiple, x);
        }
        out
    }

    pub(crate) fn type_of(&self, subgroup: &BitSet) -> Result<GroupType> {
        let max_part = self.parts.first().copied().unwrap_or(0);
        let mut torsion_counts = vec![0u64; max_part as usize + 1];
        for element in subgroup.iter() {
            torsion_counts[self.order_exponent(element) as usize] += 1;
        }
        if torsion_counts[0] != 1 {
            return Err(Error::InconsistentTorsion(
                "subgroup must contain exactly the zero element at order 0".to_string(),
            ));
        }
        // Cumulative counts must be powers of ell whose exponents have
        // weakly decreasing increments: those increments are the conjugate.
        let mut conjugate = Vec::new();
        let mut cumulative = 0u64;
        let mut previous_log = 0u32;
        for (k, &count) in torsion_counts.iter().enumerate() {
            cumulative += count;
            if k == 0 {
                continue;
            }
            let log = exact_log(cumulative, self.ell).ok_or_else(|| {
                Error::InconsistentTorsion(format!(
                    "{cumulative} elements killed by ell^{k} is not a power of ell"
                ))
            })?;
            let increment = log.checked_sub(previous_log).ok_or_else(|| {
                Error::InconsistentTorsion("torsion counts decreased".to_string())
            })?;
            if let Some(&last) = conjugate.last() {
                if increment > last {
                    return Err(Error::InconsistentTorsion(
                        "conjugate increments must be weakly decreasing".to_string(),
                    ));
                }
            }
            conjugate.push(increment);
            previous_log = log;
        }
        let rank = conjugate.first().copied().unwrap_or(0);
        let parts: Vec<u32> = (1..=rank)
            .map(|j| conjugate.iter().filter(|&&c| c >= j).count() as u32)
            .collect();
        GroupType::new(parts).map_err(|_| {
            Error::InconsistentTorsion("torsion profile produced an invalid type".to_string())
        })
    }
}

fn exact_log(value: u64, base: u64) -> Option<u32> {
    let mut rest = value;
    let mut log = 0;
    while rest > 1 {
        if rest % base != 0 {
            return None;
        }
        rest /= base;
        log += 1;
    }
    (rest == 1).then_some(log)
}

/// A fixed-capacity set of element indices.
#[derive(Clone, PartialEq, Eq, Hash)]
pub(crate) struct BitSet {
    words: Vec<u64>,
}

impl BitSet {
    pub(crate) fn new(capacity: usize) -> Self {
        BitSet {
            words: vec![0; capacity.div_ceil(64)],
        }
    }

    #[inline]
    pub(crate) fn insert(&mut self, index: u32) {
        self.words[(index / 64) as usize] |= 1 << (index % 64);
    }

    #[inline]
    pub(crate) fn contains(&self, index: u32) -> bool {
        self.words[(index / 64) as usize] & (1 << (index % 64)) != 0
    }

    pub(crate) fn count(&self) -> u64 {
        self.words.iter().map(|w| u64::from(w.count_ones())).sum()
    }

    pub(crate) fn iter(&self) -> impl Iterator<Item = u32> + '_ {
        self.words.iter().enumerate().flat_map(|(slot, &word)| {
            let mut rest = word;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let bit = rest.trailing_zeros();
                rest &= rest - 1;
                Some(slot as u32 * 64 + bit)
            })
        })
    }
}

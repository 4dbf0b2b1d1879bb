//! Interval machinery on the embedding order: chains above a base type, the
//! signed chain sum `S(A, B)`, its unsigned companion `S_plus(A, B)`, and the
//! truncated rank-preserving chain sums `sigma_i`.
//!
//! `S` and `S_plus` are computed by the memoized first-link recursion
//! `S(A, B) = -sum_(A < C <= B) sub(A, C) S(C, B)` (drop the sign for
//! `S_plus`): grouping chains by their first link turns the exponential chain
//! sum into a quadratic pass over the interval. Direct chain enumeration is
//! kept as the oracle.

use std::collections::HashMap;
use std::sync::Mutex;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::group_types::{enumerate_rank_tower, GroupType, RankConstraint};
use crate::qseries::PrimeEll;
use crate::rational::Rational;
use crate::subgroup_count::sub_count;
use crate::group_types::aut_order;

/// A strictly increasing sequence of group types above a base type; the
/// empty chain is allowed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chain {
    base: GroupType,
    links: Vec<GroupType>,
}

impl Chain {
    pub fn new(base: GroupType, links: Vec<GroupType>) -> Result<Self> {
        let mut previous = &base;
        for link in &links {
            let strictly_above = previous.embeds_in(link) && previous != link;
            if !strictly_above {
                return Err(Error::Precondition(format!(
                    "chain link {link} does not strictly extend {previous}"
                )));
            }
            previous = link;
        }
        Ok(Chain { base, links })
    }

    pub fn base(&self) -> &GroupType {
        &self.base
    }

    pub fn links(&self) -> &[GroupType] {
        &self.links
    }

    pub fn len(&self) -> usize {
        self.links.len()
    }

    pub fn is_empty(&self) -> bool {
        self.links.is_empty()
    }

    pub fn max(&self) -> Option<&GroupType> {
        self.links.last()
    }

    /// `sub(base, first) * prod sub(link_j, link_(j+1))`; the empty chain
    /// contributes 1.
    pub fn sub_product(&self, ell: &PrimeEll) -> BigUint {
        let mut product = BigUint::one();
        let mut previous = &self.base;
        for link in &self.links {
            product *= sub_count(previous, link, ell);
            previous = link;
        }
        product
    }

    /// The signed version: `(-1)^len * sub_product`.
    pub fn signed_sub_product(&self, ell: &PrimeEll) -> BigInt {
        let unsigned = BigInt::from(self.sub_product(ell));
        if self.links.len() % 2 == 0 {
            unsigned
        } else {
            -unsigned
        }
    }
}

/// All types `C` with `A <= C <= B` in the embedding order, each once, in
/// lexicographic order; empty when `A` does not embed in `B`.
pub fn interval(a: &GroupType, b: &GroupType) -> Vec<GroupType> {
    if !a.embeds_in(b) {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut current: Vec<u32> = Vec::new();
    grow_interval(a, b, 0, &mut current, &mut out);
    out.sort_unstable();
    out
}

fn grow_interval(
    a: &GroupType,
    b: &GroupType,
    position: usize,
    current: &mut Vec<u32>,
    out: &mut Vec<GroupType>,
) {
    // Parts of C are squeezed between the parts of A and B positionwise;
    // that is exactly diagram containment on both sides.
    let a_parts = a.parts();
    let b_parts = b.parts();
    if position == b_parts.len() {
        out.push(GroupType::new(current.clone()).expect("positive parts"));
        return;
    }
    let low = a_parts.get(position).copied().unwrap_or(0);
    let high = b_parts[position].min(current.last().copied().unwrap_or(u32::MAX));
    if low == 0 {
        // C may stop here, provided A has no more parts to cover.
        out.push(GroupType::new(current.clone()).expect("positive parts"));
    }
    for part in low.max(1)..=high {
        current.push(part);
        grow_interval(a, b, position + 1, current, out);
        current.pop();
    }
}

/// Enumerates every chain above `a` whose maximum is exactly `b` (the chain
/// `{b}` included). This is the definitional object; callers that only need
/// the sums should use [`IntervalCache`].
pub fn enumerate_chains(a: &GroupType, b: &GroupType) -> Vec<Chain> {
    if a == b || !a.embeds_in(b) {
        return Vec::new();
    }
    let between: Vec<GroupType> = interval(a, b)
        .into_iter()
        .filter(|c| c != a && c != b)
        .collect();
    let mut out = Vec::new();
    let mut selected = Vec::new();
    pick_chain_links(a, b, &between, 0, &mut selected, &mut out);
    out
}

fn pick_chain_links(
    a: &GroupType,
    b: &GroupType,
    between: &[GroupType],
    from: usize,
    selected: &mut Vec<GroupType>,
    out: &mut Vec<Chain>,
) {
    let mut links = selected.clone();
    links.push(b.clone());
    if let Ok(chain) = Chain::new(a.clone(), links) {
        out.push(chain);
    }
    for index in from..between.len() {
        let candidate = &between[index];
        let extends = selected
            .last()
            .map(|last| last.embeds_in(candidate) && last != candidate)
            .unwrap_or(true);
        if extends {
            selected.push(candidate.clone());
            pick_chain_links(a, b, between, index + 1, selected, out);
            selected.pop();
        }
    }
}

/// Memoized `S` and `S_plus` values for one fixed `ell`. The cache behaves
/// as a single logical map with get-or-compute semantics and is safe to
/// share across threads.
pub struct IntervalCache {
    ell: PrimeEll,
    signed: Mutex<HashMap<(GroupType, GroupType), BigInt>>,
    unsigned: Mutex<HashMap<(GroupType, GroupType), BigUint>>,
}

impl IntervalCache {
    pub fn new(ell: PrimeEll) -> Self {
        IntervalCache {
            ell,
            signed: Mutex::new(HashMap::new()),
            unsigned: Mutex::new(HashMap::new()),
        }
    }

    pub fn ell(&self) -> &PrimeEll {
        &self.ell
    }

    /// The signed chain sum `S(A, B)`: zero unless `A` embeds in `B`, one at
    /// `A = B`, otherwise the memoized first-link recursion.
    pub fn s_value(&self, a: &GroupType, b: &GroupType) -> BigInt {
        if a == b {
            return BigInt::one();
        }
        if !a.embeds_in(b) {
            return BigInt::zero();
        }
        let key = (a.clone(), b.clone());
        if let Some(hit) = self.signed.lock().expect("cache poisoned").get(&key) {
            return hit.clone();
        }
        let mut sum = BigInt::zero();
        for c in interval(a, b) {
            if &c == a {
                continue;
            }
            sum += BigInt::from(sub_count(a, &c, &self.ell)) * self.s_value(&c, b);
        }
        let value = -sum;
        self.signed
            .lock()
            .expect("cache poisoned")
            .insert(key, value.clone());
        value
    }

    /// The unsigned chain sum `S_plus(A, B)`: same recursion without the sign.
    pub fn s_plus_value(&self, a: &GroupType, b: &GroupType) -> BigUint {
        if a == b {
            return BigUint::one();
        }
        if !a.embeds_in(b) {
            return BigUint::ZERO;
        }
        let key = (a.clone(), b.clone());
        if let Some(hit) = self.unsigned.lock().expect("cache poisoned").get(&key) {
            return hit.clone();
        }
        let mut sum = BigUint::ZERO;
        for c in interval(a, b) {
            if &c == a {
                continue;
            }
            sum += sub_count(a, &c, &self.ell) * self.s_plus_value(&c, b);
        }
        self.unsigned
            .lock()
            .expect("cache poisoned")
            .insert(key, sum.clone());
        sum
    }
}

/// One-shot convenience wrapper around [`IntervalCache::s_value`].
pub fn s_value(a: &GroupType, b: &GroupType, ell: &PrimeEll) -> BigInt {
    IntervalCache::new(ell.clone()).s_value(a, b)
}

/// One-shot convenience wrapper around [`IntervalCache::s_plus_value`].
pub fn s_plus_value(a: &GroupType, b: &GroupType, ell: &PrimeEll) -> BigUint {
    IntervalCache::new(ell.clone()).s_plus_value(a, b)
}

/// The truncated chain sum `sigma_i(A)`: over chains of length exactly `i`
/// above `A`, confined to types with parts `<= max_part` (all links share
/// `A`'s rank, since ranks are squeezed between `A`'s and the maximum's),
/// each chain contributing `sub_plus(chain) / |Aut(max chain)|`. The empty
/// chain term at `i = 0` is `1 / |Aut A|`.
pub fn sigma_i(a: &GroupType, i: u32, ell: &PrimeEll, max_part: u32) -> Result<Rational> {
    if max_part < a.max_part() {
        return Err(Error::TruncationTooSmall {
            bound: max_part,
            needed: a.max_part(),
        });
    }
    if i == 0 {
        return Ok(Rational::new(
            BigInt::one(),
            BigInt::from(aut_order(a, ell)),
        ));
    }
    let constraint = RankConstraint::new(vec![a.rank()]).expect("single-entry tower");
    let candidates: Vec<GroupType> = enumerate_rank_tower(&constraint, max_part)?
        .into_iter()
        .filter(|c| c != a && a.embeds_in(c))
        .collect();

    // weighted[j] = sum over length-t chains with max = candidates[j] of the
    // chain's unsigned subgroup-count product.
    let mut weighted: Vec<BigUint> = candidates
        .iter()
        .map(|c| sub_count(a, c, ell))
        .collect();
    for _extension in 1..i {
        let mut next = vec![BigUint::ZERO; candidates.len()];
        for (j, top) in candidates.iter().enumerate() {
            let mut total = BigUint::ZERO;
            for (k, mid) in candidates.iter().enumerate() {
                if mid != top && mid.embeds_in(top) && !weighted[k].is_zero() {
                    total += &weighted[k] * sub_count(mid, top, ell);
                }
            }
            next[j] = total;
        }
        weighted = next;
    }

    let mut sum = Rational::zero();
    for (j, top) in candidates.iter().enumerate() {
        if weighted[j].is_zero() {
            continue;
        }
        sum += Rational::new(
            BigInt::from(weighted[j].clone()),
            BigInt::from(aut_order(top, ell)),
        );
    }
    Ok(sum)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(parts: &[u32]) -> GroupType {
        GroupType::new(parts.to_vec()).unwrap()
    }

    fn ell(v: u64) -> PrimeEll {
        PrimeEll::from_u64(v).unwrap()
    }

    #[test]
    fn interval_examples() {
        assert_eq!(
            interval(&GroupType::trivial(), &t(&[1, 1])),
            vec![GroupType::trivial(), t(&[1]), t(&[1, 1])]
        );
        assert_eq!(interval(&t(&[2]), &t(&[2])), vec![t(&[2])]);
        assert_eq!(interval(&t(&[2]), &t(&[1, 1])), Vec::<GroupType>::new());
        assert_eq!(
            interval(&t(&[1]), &t(&[2, 1])),
            vec![t(&[1]), t(&[1, 1]), t(&[2]), t(&[2, 1])]
        );
    }

    #[test]
    fn interval_is_exactly_the_two_sided_embedding_range() {
        let bases = [GroupType::trivial(), t(&[1]), t(&[2, 1])];
        let tops = [t(&[2, 1]), t(&[2, 2]), t(&[3, 1])];
        for a in &bases {
            for b in &tops {
                let in_interval = interval(a, b);
                for j in 0..=b.order_exponent() {
                    for c in crate::group_types::enumerate_order_exponent(j) {
                        let expected = a.embeds_in(&c) && c.embeds_in(b);
                        assert_eq!(in_interval.contains(&c), expected, "A={a} C={c} B={b}");
                    }
                }
            }
        }
    }

    #[test]
    fn s_value_examples() {
        assert_eq!(s_value(&t(&[1]), &t(&[1]), &ell(3)), BigInt::one());
        assert_eq!(s_value(&t(&[1]), &t(&[2]), &ell(3)), BigInt::from(-1));
        assert_eq!(s_value(&t(&[1]), &t(&[3]), &ell(3)), BigInt::zero());
        assert_eq!(s_value(&t(&[2]), &t(&[3]), &ell(3)), BigInt::from(-1));
        assert_eq!(s_value(&t(&[2]), &t(&[4]), &ell(3)), BigInt::zero());
        assert_eq!(s_value(&t(&[2]), &t(&[1, 1]), &ell(3)), BigInt::zero());
    }

    #[test]
    fn s_plus_value_examples() {
        assert_eq!(s_plus_value(&t(&[2, 1]), &t(&[2, 1]), &ell(3)), BigUint::one());
        assert_eq!(s_plus_value(&t(&[1]), &t(&[2]), &ell(3)), BigUint::one());
        assert_eq!(s_plus_value(&t(&[1]), &t(&[3]), &ell(3)), BigUint::from(2u32));
        // Chains up the cyclic tower double with each extra level.
        assert_eq!(s_plus_value(&t(&[1]), &t(&[5]), &ell(3)), BigUint::from(8u32));
    }

    #[test]
    fn chain_constructor_rejects_non_increasing_links() {
        assert!(Chain::new(t(&[1]), vec![t(&[2]), t(&[2])]).is_err());
        assert!(Chain::new(t(&[1]), vec![t(&[1])]).is_err());
        assert!(Chain::new(t(&[2]), vec![t(&[1, 1])]).is_err());
        let ok = Chain::new(t(&[1]), vec![t(&[2]), t(&[2, 1])]).unwrap();
        assert_eq!(ok.len(), 2);
        assert_eq!(ok.max(), Some(&t(&[2, 1])));
    }

    #[test]
    fn recursion_matches_direct_chain_enumeration() {
        for l in [3u64, 5] {
            let prime = ell(l);
            let cache = IntervalCache::new(prime.clone());
            for j in 0..=4u32 {
                for b in crate::group_types::enumerate_order_exponent(j) {
                    for k in 0..j {
                        for a in crate::group_types::enumerate_order_exponent(k) {
                            if !a.embeds_in(&b) {
                                continue;
                            }
                            let chains = enumerate_chains(&a, &b);
                            let signed: BigInt = chains
                                .iter()
                                .map(|chain| chain.signed_sub_product(&prime))
                                .sum();
                            let unsigned: BigUint = chains
                                .iter()
                                .map(|chain| chain.sub_product(&prime))
                                .sum();
                            assert_eq!(cache.s_value(&a, &b), signed, "S({a},{b}) ell={l}");
                            assert_eq!(
                                cache.s_plus_value(&a, &b),
                                unsigned,
                                "S_plus({a},{b}) ell={l}"
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn sigma_examples() {
        // Empty chain only.
        assert_eq!(
            sigma_i(&t(&[1]), 0, &ell(3), 4).unwrap(),
            Rational::new(1.into(), 2.into())
        );
        // Geometric series sum_(e=2..12) 1/(2*3^(e-1)).
        let expected = Rational::new(
            BigInt::from(3u32.pow(11) - 1),
            BigInt::from(4u64 * 3u64.pow(11)),
        );
        assert_eq!(sigma_i(&t(&[1]), 1, &ell(3), 12).unwrap(), expected);
        // Nothing sits above the trivial type at rank 0.
        assert_eq!(
            sigma_i(&GroupType::trivial(), 1, &ell(3), 6).unwrap(),
            Rational::zero()
        );
    }

    #[test]
    fn sigma_rejects_too_small_truncation() {
        assert!(matches!(
            sigma_i(&t(&[3, 1]), 1, &ell(3), 2),
            Err(Error::TruncationTooSmall { .. })
        ));
    }

    #[test]
    fn sigma_is_monotone_in_the_truncation_bound() {
        let prime = ell(3);
        for i in 0..=2u32 {
            let mut previous = Rational::zero();
            for bound in 1..=8u32 {
                let value = sigma_i(&t(&[1]), i, &prime, bound).unwrap();
                assert!(value >= previous, "sigma_{i} dropped at bound {bound}");
                previous = value;
            }
        }
    }

    #[test]
    fn sigma_matches_direct_chain_enumeration() {
        let prime = ell(3);
        let base = t(&[1]);
        for i in 1..=2u32 {
            let bound = 5u32;
            let constraint = RankConstraint::new(vec![base.rank()]).unwrap();
            let candidates = enumerate_rank_tower(&constraint, bound).unwrap();
            let mut direct = Rational::zero();
            for top in candidates {
                if top == base || !base.embeds_in(&top) {
                    continue;
                }
                for chain in enumerate_chains(&base, &top) {
                    if chain.len() == i as usize {
                        direct += Rational::new(
                            BigInt::from(chain.sub_product(&prime)),
                            BigInt::from(aut_order(&top, &prime)),
                        );
                    }
                }
            }
            assert_eq!(sigma_i(&base, i, &prime, bound).unwrap(), direct, "i = {i}");
        }
    }
}

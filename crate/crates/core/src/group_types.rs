//! Group types: partitions indexing isomorphism classes of finite abelian
//! ell-groups, the embedding order between them, automorphism orders,
//! surjection counts and weights, and truncated enumeration of
//! rank-constrained families.
//!
//! A type with parts `(a, b, ...)` stands for the direct sum
//! `Z/ell^a + Z/ell^b + ...`; the conjugate partition is the tower of ranks
//! of `ell^(i-1) A / ell^i A`, and `A` embeds in `B` exactly when the
//! conjugate of `A` is dominated pointwise by the conjugate of `B`.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_traits::One;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::qseries::PrimeEll;
use crate::rational::Rational;

/// An isomorphism class of finite abelian ell-groups, canonically stored as
/// its weakly decreasing partition of cyclic-factor exponents. The empty
/// partition is the trivial group.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupType {
    parts: Vec<u32>,
}

impl GroupType {
    /// Canonicalizes (sorts descending) and rejects zero parts.
    pub fn new(mut parts: Vec<u32>) -> Result<Self> {
        if parts.iter().any(|&p| p == 0) {
            return Err(Error::ParseType(format!("{parts:?}")));
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Ok(GroupType { parts })
    }

    pub fn trivial() -> Self {
        GroupType { parts: Vec::new() }
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    pub fn is_trivial(&self) -> bool {
        self.parts.is_empty()
    }

    /// Number of cyclic factors, i.e. the ell-rank.
    pub fn rank(&self) -> u32 {
        self.parts.len() as u32
    }

    /// `log_ell` of the group order: the sum of all parts.
    pub fn order_exponent(&self) -> u32 {
        self.parts.iter().sum()
    }

    pub fn max_part(&self) -> u32 {
        self.parts.first().copied().unwrap_or(0)
    }

    /// The conjugate partition; its `i`-th entry (1-based) is
    /// `rank_{ell^i}` of the group, the number of parts that are `>= i`.
    pub fn conjugate(&self) -> Vec<u32> {
        let mut out = vec![0u32; self.max_part() as usize];
        for &part in &self.parts {
            for slot in out.iter_mut().take(part as usize) {
                *slot += 1;
            }
        }
        out
    }

    /// `rank_{ell^i}`: the `i`-th conjugate entry, zero beyond the first part
    /// (and the plain rank at `i = 1`). `i = 0` counts all parts as well.
    pub fn rank_at(&self, i: u32) -> u32 {
        if i <= 1 {
            return self.rank();
        }
        self.parts.iter().filter(|&&p| p >= i).count() as u32
    }

    /// True when this group injects into `other`: pointwise domination of
    /// conjugate partitions.
    pub fn embeds_in(&self, other: &GroupType) -> bool {
        let bound = self.max_part().max(other.max_part());
        (1..=bound).all(|i| self.rank_at(i) <= other.rank_at(i))
    }

    /// Direct sum with `i` copies of `Z/ell`: appends `i` parts equal to 1.
    pub fn pad_elementary(&self, i: u32) -> GroupType {
        let mut parts = self.parts.clone();
        parts.extend(std::iter::repeat(1).take(i as usize));
        GroupType { parts }
    }
}

impl fmt::Display for GroupType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.parts.is_empty() {
            return write!(f, "[]");
        }
        let rendered: Vec<String> = self.parts.iter().map(u32::to_string).collect();
        write!(f, "{}", rendered.join(","))
    }
}

impl FromStr for GroupType {
    type Err = Error;

    /// Parses `[]` (the trivial group) or a comma-separated list of positive
    /// integers; an optional surrounding `[...]` is tolerated.
    fn from_str(text: &str) -> Result<Self> {
        let trimmed = text.trim();
        if trimmed == "[]" {
            return Ok(GroupType::trivial());
        }
        let inner = trimmed
            .strip_prefix('[')
            .and_then(|rest| rest.strip_suffix(']'))
            .unwrap_or(trimmed);
        if inner.trim().is_empty() {
            return Err(Error::ParseType(text.to_string()));
        }
        let parts = inner
            .split(',')
            .map(|token| {
                let token = token.trim();
                token
                    .parse::<u32>()
                    .ok()
                    .filter(|&p| p > 0)
                    .ok_or_else(|| Error::ParseType(text.to_string()))
            })
            .collect::<Result<Vec<u32>>>()?;
        GroupType::new(parts)
    }
}

impl Serialize for GroupType {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        self.parts.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for GroupType {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let parts = Vec::<u32>::deserialize(de)?;
        GroupType::new(parts).map_err(serde::de::Error::custom)
    }
}

/// A prefix `(r_1, ..., r_i)` of a rank tower, selecting the group types
/// whose first `i` tower ranks match exactly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankConstraint {
    tower: Vec<u32>,
}

impl RankConstraint {
    /// Rank towers are weakly decreasing; anything else is rejected.
    pub fn new(tower: Vec<u32>) -> Result<Self> {
        if tower.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::NonMonotoneTower(tower));
        }
        Ok(RankConstraint { tower })
    }

    pub fn tower(&self) -> &[u32] {
        &self.tower
    }

    pub fn matches(&self, group_type: &GroupType) -> bool {
        self.tower
            .iter()
            .enumerate()
            .all(|(index, &rank)| group_type.rank_at(index as u32 + 1) == rank)
    }
}

/// `|Aut A|` by the standard closed product over the partition: with
/// conjugate `c` and part multiplicities `m_k`,
/// `ell^(sum c_j^2 - sum_k m_k(m_k+1)/2) * prod_k prod_{j=1..m_k} (ell^j - 1)`.
///
/// Matches the brute-force count of invertible endomorphisms on every small
/// group (see the oracle suites).
pub fn aut_order(a: &GroupType, ell: &PrimeEll) -> BigUint {
    let conjugate = a.conjugate();
    let mut exponent: u64 = conjugate.iter().map(|&c| u64::from(c) * u64::from(c)).sum();
    let mut unit_product = BigUint::one();
    for k in 0..conjugate.len() {
        let next = conjugate.get(k + 1).copied().unwrap_or(0);
        let multiplicity = conjugate[k] - next;
        exponent -= u64::from(multiplicity) * u64::from(multiplicity + 1) / 2;
        for j in 1..=multiplicity {
            unit_product *= ell.pow(j) - BigUint::one();
        }
    }
    ell.pow(exponent as u32) * unit_product
}

/// Number of surjective homomorphisms `Z^i -> A`: zero when `i < rank(A)`,
/// otherwise `|A|^i * prod_{j=0..rank-1} (1 - ell^(j-i))` cleared to an
/// integer.
pub fn surj_count(i: u32, a: &GroupType, ell: &PrimeEll) -> BigUint {
    let rank = a.rank();
    if rank > i {
        return BigUint::ZERO;
    }
    // ell^(n*i - r*i + r(r-1)/2) * prod_{j=0..r-1} (ell^(i-j) - 1).
    let n = u64::from(a.order_exponent());
    let exponent =
        n * u64::from(i) - u64::from(rank) * u64::from(i) + u64::from(rank) * (u64::from(rank).saturating_sub(1)) / 2;
    let mut product = BigUint::one();
    for j in 0..rank {
        product *= ell.pow(i - j) - BigUint::one();
    }
    ell.pow(exponent as u32) * product
}

/// The `i`-weight of `A`: `|Surj(Z^i, A)| / (|A|^i |Aut A|)`, which reduces
/// to `prod_{j=0..rank-1} (1 - ell^(j-i)) / |Aut A|`; zero exactly when the
/// rank exceeds `i`.
pub fn weight(i: u32, a: &GroupType, ell: &PrimeEll) -> Rational {
    let rank = a.rank();
    if rank > i {
        return Rational::from_integer(0.into());
    }
    let mut fraction = Rational::new(BigInt::one(), BigInt::from(aut_order(a, ell)));
    for j in 0..rank {
        let factor = Rational::from_integer(1.into()) - ell.pow_rational(i64::from(j) - i64::from(i));
        fraction *= factor;
    }
    fraction
}

/// The `i`-weight of the order `ell^j`: the sum of `weight(i, A)` over the
/// finitely many types with order exponent `j`.
pub fn weight_of_order(i: u32, j: u32, ell: &PrimeEll) -> Rational {
    enumerate_order_exponent(j)
        .iter()
        .map(|a| weight(i, a, ell))
        .sum()
}

/// All types matching the rank-tower prefix whose parts are all `<= max_part`
/// (equivalently, killed by `ell^max_part`), sorted lexicographically by
/// parts. The tower must be nonempty: without a rank bound the family is
/// infinite.
pub fn enumerate_rank_tower(
    constraint: &RankConstraint,
    max_part: u32,
) -> Result<Vec<GroupType>> {
    let tower = constraint.tower();
    if tower.is_empty() {
        return Err(Error::Precondition(
            "rank tower must be nonempty for enumeration".to_string(),
        ));
    }
    // Conjugate side: fixed prefix, then any weakly decreasing tail, with
    // entries beyond index max_part forced to zero.
    let width = max_part as usize;
    if tower.len() > width && tower[width..].iter().any(|&r| r > 0) {
        return Ok(Vec::new());
    }
    let prefix: Vec<u32> = tower.iter().copied().take(width).collect();
    let mut out = Vec::new();
    let mut conjugate = prefix.clone();
    extend_conjugate_tails(&mut conjugate, width, &mut out);
    out.sort_unstable();
    Ok(out)
}

fn extend_conjugate_tails(conjugate: &mut Vec<u32>, width: usize, out: &mut Vec<GroupType>) {
    if conjugate.len() == width {
        out.push(from_conjugate(conjugate));
        return;
    }
    let cap = conjugate.last().copied().unwrap_or(0);
    for value in (0..=cap).rev() {
        conjugate.push(value);
        extend_conjugate_tails(conjugate, width, out);
        conjugate.pop();
    }
}

fn from_conjugate(conjugate: &[u32]) -> GroupType {
    let rank = conjugate.first().copied().unwrap_or(0);
    let parts: Vec<u32> = (1..=rank)
        .map(|j| conjugate.iter().filter(|&&c| c >= j).count() as u32)
        .collect();
    GroupType { parts }
}

/// All partitions of `j`, i.e. all types of order `ell^j`, sorted
/// lexicographically by parts.
pub fn enumerate_order_exponent(j: u32) -> Vec<GroupType> {
    let mut out = Vec::new();
    let mut current = Vec::new();
    descend_partitions(j, j, &mut current, &mut out);
    out.sort_unstable();
    out
}

fn descend_partitions(remaining: u32, cap: u32, current: &mut Vec<u32>, out: &mut Vec<GroupType>) {
    if remaining == 0 {
        out.push(GroupType {
            parts: current.clone(),
        });
        return;
    }
    for part in (1..=cap.min(remaining)).rev() {
        current.push(part);
        descend_partitions(remaining - part, part, current, out);
        current.pop();
    }
}

/// All types with rank `<= max_rank` and parts `<= max_part`, sorted
/// lexicographically. This is the standard parameter grid of the
/// verification sweeps.
pub fn types_up_to(max_rank: u32, max_part: u32) -> Vec<GroupType> {
    let mut out = vec![GroupType::trivial()];
    let mut current = Vec::new();
    bounded_partitions(max_rank, max_part, &mut current, &mut out);
    out.sort_unstable();
    out
}

fn bounded_partitions(
    rank_left: u32,
    cap: u32,
    current: &mut Vec<u32>,
    out: &mut Vec<GroupType>,
) {
    if rank_left == 0 {
        return;
    }
    for part in (1..=cap).rev() {
        current.push(part);
        out.push(GroupType {
            parts: current.clone(),
        });
        bounded_partitions(rank_left - 1, part, current, out);
        current.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn t(parts: &[u32]) -> GroupType {
        GroupType::new(parts.to_vec()).unwrap()
    }

    fn ell(v: u64) -> PrimeEll {
        PrimeEll::from_u64(v).unwrap()
    }

    #[test]
    fn parse_canonicalizes_and_rejects_zero() {
        assert_eq!("[]".parse::<GroupType>().unwrap(), GroupType::trivial());
        assert_eq!("1,3,1".parse::<GroupType>().unwrap(), t(&[3, 1, 1]));
        assert!("2,0".parse::<GroupType>().is_err());
        assert!("".parse::<GroupType>().is_err());
        assert!("2,x".parse::<GroupType>().is_err());
        assert_eq!("[2,1]".parse::<GroupType>().unwrap(), t(&[2, 1]));
    }

    #[test]
    fn display_round_trips() {
        for parts in [vec![], vec![3, 1, 1], vec![2]] {
            let group_type = GroupType::new(parts).unwrap();
            let parsed: GroupType = group_type.to_string().parse().unwrap();
            assert_eq!(parsed, group_type);
        }
    }

    #[test]
    fn conjugate_examples() {
        assert_eq!(t(&[3, 1, 1]).conjugate(), vec![3, 1, 1]);
        assert_eq!(GroupType::trivial().conjugate(), Vec::<u32>::new());
        assert_eq!(t(&[2, 2]).conjugate(), vec![2, 2]);
        assert_eq!(t(&[4, 2, 1]).conjugate(), vec![3, 2, 1, 1]);
    }

    #[test]
    fn conjugation_is_an_involution_up_to_size_12() {
        for j in 0..=12 {
            for group_type in enumerate_order_exponent(j) {
                let double = GroupType::new(from_conjugate(&group_type.conjugate()).parts).unwrap();
                assert_eq!(double, group_type);
            }
        }
    }

    #[test]
    fn embedding_examples() {
        assert!(t(&[1]).embeds_in(&t(&[2])));
        assert!(!t(&[1, 1]).embeds_in(&t(&[3])));
        assert!(t(&[2, 1]).embeds_in(&t(&[2, 1])));
        assert!(t(&[2, 2]).embeds_in(&t(&[3, 2])));
        assert!(!t(&[2, 2]).embeds_in(&t(&[3, 1])));
    }

    #[test]
    fn embedding_is_a_partial_order() {
        let all: Vec<GroupType> = (0..=6).flat_map(enumerate_order_exponent).collect();
        for a in &all {
            assert!(a.embeds_in(a));
            for b in &all {
                if a.embeds_in(b) && b.embeds_in(a) {
                    assert_eq!(a, b);
                }
                for c in &all {
                    if a.embeds_in(b) && b.embeds_in(c) {
                        assert!(a.embeds_in(c));
                    }
                }
            }
        }
    }

    #[test]
    fn pad_elementary_examples() {
        assert_eq!(GroupType::trivial().pad_elementary(2), t(&[1, 1]));
        assert_eq!(t(&[2]).pad_elementary(1), t(&[2, 1]));
        assert_eq!(t(&[3, 1]).pad_elementary(0), t(&[3, 1]));
        let padded = t(&[2, 2]).pad_elementary(3);
        assert_eq!(padded.rank(), 5);
        assert_eq!(padded.rank_at(2), 2);
    }

    #[test]
    fn aut_order_examples() {
        assert_eq!(aut_order(&GroupType::trivial(), &ell(3)), BigUint::one());
        // (9-1)(9-3), the invertible 2x2 matrices over F_3.
        assert_eq!(aut_order(&t(&[1, 1]), &ell(3)), BigUint::from(48u32));
        assert_eq!(aut_order(&t(&[2, 1]), &ell(3)), BigUint::from(108u32));
        assert_eq!(aut_order(&t(&[2]), &ell(3)), BigUint::from(6u32));
        assert_eq!(aut_order(&t(&[1, 1]), &ell(5)), BigUint::from(480u32));
        assert_eq!(aut_order(&t(&[2, 2, 1]), &ell(3)), BigUint::from(629_856u32));
    }

    #[test]
    fn surj_count_examples() {
        assert_eq!(surj_count(1, &t(&[1]), &ell(3)), BigUint::from(2u32));
        assert_eq!(surj_count(0, &GroupType::trivial(), &ell(3)), BigUint::one());
        assert_eq!(surj_count(1, &t(&[1, 1]), &ell(3)), BigUint::ZERO);
        // Ordered bases of F_3^2: (9-1)(9-3).
        assert_eq!(surj_count(2, &t(&[1, 1]), &ell(3)), BigUint::from(48u32));
    }

    #[test]
    fn weight_examples() {
        assert_eq!(weight(1, &t(&[1]), &ell(3)), Rational::new(1.into(), 3.into()));
        assert_eq!(weight(5, &GroupType::trivial(), &ell(3)), Rational::from_integer(1.into()));
        assert_eq!(weight(1, &t(&[1, 1]), &ell(3)), Rational::from_integer(0.into()));
    }

    #[test]
    fn weight_vanishes_exactly_when_rank_exceeds_index() {
        use num_traits::Zero;
        for i in 0..=3u32 {
            for j in 0..=4u32 {
                for a in enumerate_order_exponent(j) {
                    let value = weight(i, &a, &ell(3));
                    assert_eq!(value.is_zero(), a.rank() > i, "i={i}, A={a}");
                }
            }
        }
    }

    #[test]
    fn weight_of_order_examples() {
        assert_eq!(weight_of_order(1, 0, &ell(3)), Rational::from_integer(1.into()));
        assert_eq!(weight_of_order(1, 1, &ell(3)), Rational::new(1.into(), 3.into()));
        assert_eq!(weight_of_order(1, 2, &ell(3)), Rational::new(1.into(), 9.into()));
    }

    #[test]
    fn enumerate_rank_tower_examples() {
        let rank1 = RankConstraint::new(vec![1]).unwrap();
        assert_eq!(
            enumerate_rank_tower(&rank1, 3).unwrap(),
            vec![t(&[1]), t(&[2]), t(&[3])]
        );
        let tower21 = RankConstraint::new(vec![2, 1]).unwrap();
        assert_eq!(enumerate_rank_tower(&tower21, 2).unwrap(), vec![t(&[2, 1])]);
        let rank0 = RankConstraint::new(vec![0]).unwrap();
        assert_eq!(enumerate_rank_tower(&rank0, 5).unwrap(), vec![GroupType::trivial()]);
        assert!(RankConstraint::new(vec![1, 2]).is_err());
    }

    #[test]
    fn enumerate_rank_tower_respects_constraint() {
        let tower = RankConstraint::new(vec![3, 1]).unwrap();
        let types = enumerate_rank_tower(&tower, 4).unwrap();
        assert!(!types.is_empty());
        for group_type in &types {
            assert!(tower.matches(group_type));
            assert!(group_type.max_part() <= 4);
        }
        // Deterministic and duplicate-free.
        let mut dedup = types.clone();
        dedup.dedup();
        assert_eq!(dedup, types);
    }

    #[test]
    fn enumerate_order_exponent_examples() {
        assert_eq!(
            enumerate_order_exponent(3),
            vec![t(&[1, 1, 1]), t(&[2, 1]), t(&[3])]
        );
        assert_eq!(enumerate_order_exponent(0), vec![GroupType::trivial()]);
        // Partition counts p(0)..p(8).
        for (j, expected) in [1, 1, 2, 3, 5, 7, 11, 15, 22].into_iter().enumerate() {
            assert_eq!(enumerate_order_exponent(j as u32).len(), expected);
        }
    }

    #[test]
    fn types_up_to_matches_acceptance_grid() {
        let grid = types_up_to(2, 2);
        assert_eq!(
            grid,
            vec![
                GroupType::trivial(),
                t(&[1]),
                t(&[1, 1]),
                t(&[2]),
                t(&[2, 1]),
                t(&[2, 2]),
            ]
        );
    }

    proptest! {
        #[test]
        fn parse_display_round_trip(parts in proptest::collection::vec(1u32..=9, 0..6)) {
            let group_type = GroupType::new(parts).unwrap();
            prop_assert_eq!(group_type.to_string().parse::<GroupType>().unwrap(), group_type);
        }

        #[test]
        fn conjugate_preserves_weight(parts in proptest::collection::vec(1u32..=9, 0..6)) {
            let group_type = GroupType::new(parts).unwrap();
            let conjugate_sum: u32 = group_type.conjugate().iter().sum();
            prop_assert_eq!(conjugate_sum, group_type.order_exponent());
        }
    }
}

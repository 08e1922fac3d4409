//! Multisets of rational values, multiplicity profiles, the diversity
//! statistic M, staircase constructions and the frequent-block decomposition.

use std::cmp::Reverse;

use num_bigint::{BigInt, BigUint};
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{ln_product_at_least, parse_rational, rational_from_u64, Rational};

/// A multiset of rational values stored as `(value, multiplicity)` entries.
///
/// Entries are kept sorted by value with pairwise-distinct values, so two
/// multisets are equal as values iff they are structurally equal. The empty
/// multiset is not representable; constructors reject it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedMultiset {
    entries: Vec<(Rational, u64)>,
    size: u64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MultisetJson {
    values: Vec<String>,
}

impl WeightedMultiset {
    /// Build from a list of values; repetition encodes multiplicity.
    pub fn from_values(values: &[Rational]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidInput("multiset must be nonempty".into()));
        }
        let mut sorted = values.to_vec();
        sorted.sort();
        let mut entries: Vec<(Rational, u64)> = Vec::new();
        for v in sorted {
            match entries.last_mut() {
                Some((last, mult)) if *last == v => *mult += 1,
                _ => entries.push((v, 1)),
            }
        }
        let size = entries.iter().map(|(_, m)| m).sum();
        Ok(Self { entries, size })
    }

    /// Build from `(value, multiplicity)` pairs; duplicate values merge.
    pub fn from_entries(entries: Vec<(Rational, u64)>) -> Result<Self> {
        if entries.iter().any(|(_, m)| *m == 0) {
            return Err(Error::InvalidInput("zero multiplicity entry".into()));
        }
        let mut sorted = entries;
        sorted.sort_by(|a, b| a.0.cmp(&b.0));
        let mut merged: Vec<(Rational, u64)> = Vec::new();
        for (v, m) in sorted {
            match merged.last_mut() {
                Some((last, mult)) if *last == v => *mult += m,
                _ => merged.push((v, m)),
            }
        }
        if merged.is_empty() {
            return Err(Error::InvalidInput("multiset must be nonempty".into()));
        }
        let size = merged.iter().map(|(_, m)| m).sum();
        Ok(Self {
            entries: merged,
            size,
        })
    }

    /// Parse the shared text format `{"values": ["3", "1/2", "0", "0"]}`.
    pub fn parse_json(text: &str) -> Result<Self> {
        let raw: MultisetJson = serde_json::from_str(text)
            .map_err(|e| Error::Parse(format!("multiset JSON: {e}")))?;
        let values = raw
            .values
            .iter()
            .map(|s| parse_rational(s))
            .collect::<Result<Vec<_>>>()?;
        Self::from_values(&values)
    }

    /// Emit the shared text format with multiplicities expanded.
    pub fn to_json(&self) -> String {
        let values: Vec<String> = self
            .expanded()
            .iter()
            .map(|v| v.to_string())
            .collect();
        serde_json::to_string(&MultisetJson { values }).expect("serializing plain strings")
    }

    pub fn size(&self) -> u64 {
        self.size
    }

    pub fn entries(&self) -> &[(Rational, u64)] {
        &self.entries
    }

    pub fn distinct_count(&self) -> usize {
        self.entries.len()
    }

    /// True when every value occurs exactly once.
    pub fn is_set(&self) -> bool {
        self.entries.iter().all(|(_, m)| *m == 1)
    }

    /// True when there is a single distinct value (equivalently M = 0).
    pub fn is_constant(&self) -> bool {
        self.entries.len() == 1
    }

    /// Values with multiplicity expanded, ascending.
    pub fn expanded(&self) -> Vec<Rational> {
        let mut out = Vec::with_capacity(self.size as usize);
        for (v, m) in &self.entries {
            for _ in 0..*m {
                out.push(v.clone());
            }
        }
        out
    }

    /// Sum of all elements with multiplicity.
    pub fn sum(&self) -> Rational {
        self.entries
            .iter()
            .map(|(v, m)| v * rational_from_u64(*m))
            .sum()
    }

    /// The multiplicity profile: multiplicities of the distinct values,
    /// sorted nonincreasing, together with the diversity statistic M.
    pub fn multiplicity_profile(&self) -> MultiplicityProfile {
        let mut parts: Vec<u64> = self.entries.iter().map(|(_, m)| *m).collect();
        parts.sort_unstable_by_key(|&m| Reverse(m));
        MultiplicityProfile::from_sorted_parts(parts)
    }

    /// Diversity statistic M of this multiset.
    pub fn diversity(&self) -> BigUint {
        self.multiplicity_profile().diversity().clone()
    }
}

/// The partition of n given by the multiplicities of a multiset's distinct
/// values, plus the derived statistic `M = sum (i-1)^2 * mu_i`.
///
/// `M = 0` exactly when there is a single distinct value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiplicityProfile {
    parts: Vec<u64>,
    size: u64,
    diversity: BigUint,
}

impl MultiplicityProfile {
    /// Build from parts in any order; they are sorted nonincreasing.
    pub fn new(parts: Vec<u64>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::InvalidInput("profile must be nonempty".into()));
        }
        if parts.iter().any(|&p| p == 0) {
            return Err(Error::InvalidInput("profile parts must be positive".into()));
        }
        let mut sorted = parts;
        sorted.sort_unstable_by_key(|&m| Reverse(m));
        Ok(Self::from_sorted_parts(sorted))
    }

    fn from_sorted_parts(parts: Vec<u64>) -> Self {
        let size = parts.iter().sum();
        let diversity = diversity_statistic(&parts);
        Self {
            parts,
            size,
            diversity,
        }
    }

    pub fn parts(&self) -> &[u64] {
        &self.parts
    }

    pub fn size(&self) -> u64 {
        self.size
    }

    /// Number of distinct values.
    pub fn distinct_count(&self) -> usize {
        self.parts.len()
    }

    pub fn diversity(&self) -> &BigUint {
        &self.diversity
    }
}

/// `M = sum_i (i-1)^2 * mu_i` over 1-indexed parts.
pub fn diversity_statistic(parts: &[u64]) -> BigUint {
    let mut m = BigUint::zero();
    for (idx, &mu) in parts.iter().enumerate() {
        let i = idx as u64;
        m += BigUint::from(i * i) * BigUint::from(mu);
    }
    m
}

/// The multiset containing `lambda[i]` copies of the value `i-1` for a
/// nonincreasing partition `lambda`; its multiplicity profile is `lambda`.
pub fn staircase(lambda: &[u64]) -> Result<WeightedMultiset> {
    if lambda.is_empty() {
        return Err(Error::InvalidInput("partition must be nonempty".into()));
    }
    if lambda.iter().any(|&p| p == 0) {
        return Err(Error::InvalidInput("partition parts must be positive".into()));
    }
    if lambda.windows(2).any(|w| w[0] < w[1]) {
        return Err(Error::InvalidInput(
            "partition parts must be nonincreasing".into(),
        ));
    }
    let entries = lambda
        .iter()
        .enumerate()
        .map(|(idx, &mult)| (rational_from_u64(idx as u64), mult))
        .collect();
    WeightedMultiset::from_entries(entries)
}

/// The grid set `{1, .., n}`.
pub fn uniform_grid(n: u64) -> Result<WeightedMultiset> {
    if n == 0 {
        return Err(Error::InvalidInput("grid requires n >= 1".into()));
    }
    WeightedMultiset::from_entries((1..=n).map(|v| (rational_from_u64(v), 1)).collect())
}

/// The pair A = {1, .., floor(n/2)} plus ceil(n/2) zeroes, B = {1, 0, .., 0}.
///
/// The permutation sum is then a uniformly random element of A, so its max
/// point mass is at least 1/2 while M(B) = 1.
pub fn counterexample_pair(n: u64) -> Result<(WeightedMultiset, WeightedMultiset)> {
    if n < 2 {
        return Err(Error::InvalidInput(
            "counterexample family requires n >= 2".into(),
        ));
    }
    let half = n / 2;
    let mut a_entries = vec![(rational_from_u64(0), n - half)];
    a_entries.extend((1..=half).map(|v| (rational_from_u64(v), 1)));
    let a = WeightedMultiset::from_entries(a_entries)?;
    let b = WeightedMultiset::from_entries(vec![
        (rational_from_u64(0), n - 1),
        (rational_from_u64(1), 1),
    ])?;
    Ok((a, b))
}

/// A submultiset certificate: `m` disjoint copies of a witness set of `r`
/// distinct values, with `m * r^3 * ln n >= M`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    pub m: u64,
    pub r: u64,
    /// The `r` most frequent distinct values, most frequent first;
    /// ties broken by ascending value.
    pub witness: Vec<Rational>,
    /// The 1-based profile index that was chosen (equals `r`).
    pub chosen_index: u64,
}

/// Find the smallest index `i >= 2` with `i^3 * mu_i * ln n >= M`, and
/// return the corresponding block certificate. The comparison against the
/// irrational `ln n` is decided exactly via interval refinement.
pub fn decompose(a: &WeightedMultiset) -> Result<Decomposition> {
    let n = a.size();
    if n < 3 {
        return Err(Error::InvalidInput("decompose requires n >= 3".into()));
    }
    let mut ranked: Vec<(u64, &Rational)> = a.entries().iter().map(|(v, m)| (*m, v)).collect();
    ranked.sort_by(|(ma, va), (mb, vb)| mb.cmp(ma).then_with(|| va.cmp(vb)));
    if ranked.len() < 2 {
        return Err(Error::NoDiversity);
    }
    let parts: Vec<u64> = ranked.iter().map(|(m, _)| *m).collect();
    let m_stat = Rational::from_integer(BigInt::from(diversity_statistic(&parts)));
    for i in 2..=parts.len() as u64 {
        let mu_i = parts[(i - 1) as usize];
        let factor = Rational::from_integer(BigInt::from(i).pow(3) * BigInt::from(mu_i));
        if ln_product_at_least(&factor, n, &m_stat, 25) {
            return Ok(Decomposition {
                m: mu_i,
                r: i,
                witness: ranked[..i as usize].iter().map(|(_, v)| (*v).clone()).collect(),
                chosen_index: i,
            });
        }
    }
    // The harmonic-sum comparison guarantees some index qualifies.
    unreachable!("a qualifying index exists whenever M > 0 and n >= 3");
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rational_from_i64;

    fn ms(vals: &[i64]) -> WeightedMultiset {
        let v: Vec<Rational> = vals.iter().map(|&x| rational_from_i64(x)).collect();
        WeightedMultiset::from_values(&v).unwrap()
    }

    #[test]
    fn profile_of_counterexample_instance() {
        let a = ms(&[1, 2, 3, 0, 0, 0]);
        let p = a.multiplicity_profile();
        assert_eq!(p.parts(), &[3, 1, 1, 1]);
        assert_eq!(p.size(), 6);
        assert_eq!(p.diversity(), &BigUint::from(14u32));
    }

    #[test]
    fn profile_of_constant_multiset() {
        let p = ms(&[5, 5, 5]).multiplicity_profile();
        assert_eq!(p.parts(), &[3]);
        assert!(p.diversity().is_zero());
    }

    #[test]
    fn profile_with_unit_diversity() {
        let p = ms(&[1, 0, 0, 0, 0, 0, 0]).multiplicity_profile();
        assert_eq!(p.parts(), &[6, 1]);
        assert_eq!(p.diversity(), &BigUint::from(1u32));
    }

    #[test]
    fn diversity_of_explicit_parts() {
        assert_eq!(diversity_statistic(&[3, 1, 1, 1]), BigUint::from(14u32));
        assert_eq!(diversity_statistic(&[9]), BigUint::zero());
        assert_eq!(diversity_statistic(&[1, 1, 1, 1]), BigUint::from(14u32));
    }

    #[test]
    fn distinct_set_diversity_formula() {
        // For n distinct values, M = (n-1)n(2n-1)/6.
        for n in 1u64..=40 {
            let parts = vec![1u64; n as usize];
            let expect = BigUint::from((n - 1) * n * (2 * n - 1) / 6);
            assert_eq!(diversity_statistic(&parts), expect);
        }
    }

    #[test]
    fn staircase_matches_definition() {
        assert_eq!(staircase(&[3, 1, 1, 1]).unwrap(), ms(&[0, 0, 0, 1, 2, 3]));
        assert_eq!(staircase(&[4]).unwrap(), ms(&[0, 0, 0, 0]));
        assert_eq!(staircase(&[2, 2]).unwrap(), ms(&[0, 0, 1, 1]));
        assert!(staircase(&[]).is_err());
        assert!(staircase(&[1, 2]).is_err());
        assert!(staircase(&[2, 0]).is_err());
    }

    #[test]
    fn staircase_profile_roundtrip() {
        for lambda in [vec![3, 1, 1, 1], vec![5], vec![2, 2, 1], vec![4, 4, 4]] {
            let s = staircase(&lambda).unwrap();
            assert_eq!(s.multiplicity_profile().parts(), lambda.as_slice());
        }
    }

    #[test]
    fn decompose_distinct_eight() {
        // all distinct, M = 140, threshold M/ln 8 ~ 67.3: first cube past it is 5^3
        let a = ms(&[1, 2, 3, 4, 5, 6, 7, 8]);
        let d = decompose(&a).unwrap();
        assert_eq!((d.m, d.r, d.chosen_index), (1, 5, 5));
        assert_eq!(d.witness.len(), 5);
        // ties on multiplicity break by ascending value
        assert_eq!(d.witness[0], rational_from_i64(1));
        assert_eq!(d.witness[4], rational_from_i64(5));
    }

    #[test]
    fn decompose_small_mixed() {
        // M = 14, threshold ~ 7.81, i = 2 qualifies since 8 >= 7.81
        let a = ms(&[0, 0, 0, 1, 2, 3]);
        let d = decompose(&a).unwrap();
        assert_eq!((d.m, d.r), (1, 2));
        assert_eq!(d.witness, vec![rational_from_i64(0), rational_from_i64(1)]);
    }

    #[test]
    fn decompose_rejects_degenerate_inputs() {
        assert!(matches!(decompose(&ms(&[7, 7, 7])), Err(Error::NoDiversity)));
        assert!(decompose(&ms(&[1, 2])).is_err());
    }

    #[test]
    fn json_roundtrip_and_aggregation() {
        let a = WeightedMultiset::parse_json(r#"{"values": ["3", "1/2", "0", "0"]}"#).unwrap();
        assert_eq!(a.size(), 4);
        assert_eq!(a.distinct_count(), 3);
        assert_eq!(a.entries()[0], (rational_from_i64(0), 2));
        let again = WeightedMultiset::parse_json(&a.to_json()).unwrap();
        assert_eq!(a, again);
    }

    #[test]
    fn json_rejects_bad_input() {
        assert!(WeightedMultiset::parse_json(r#"{"values": []}"#).is_err());
        assert!(WeightedMultiset::parse_json(r#"{"values": ["0.5"]}"#).is_err());
        assert!(WeightedMultiset::parse_json(r#"{"vals": ["1"]}"#).is_err());
        assert!(WeightedMultiset::parse_json("not json").is_err());
    }

    #[test]
    fn counterexample_pair_shape() {
        let (a, b) = counterexample_pair(6).unwrap();
        assert_eq!(a, ms(&[0, 0, 0, 1, 2, 3]));
        assert_eq!(b, ms(&[1, 0, 0, 0, 0, 0]));
        assert_eq!(b.diversity(), BigUint::from(1u32));
    }
}

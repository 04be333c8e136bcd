//! Multisets of positive integers: the index set of the basis `s_w`,
//! and equally of the monomials in the generators `s*_k`.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

/// An unordered collection of positive integers, stored sorted descending.
#[derive(Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn empty() -> Self {
        MultiIndex(Vec::new())
    }

    pub fn single(k: u32) -> Self {
        assert!(k > 0, "parts must be positive");
        MultiIndex(vec![k])
    }

    /// Builds from parts in any order. Panics on a zero part.
    pub fn new(mut parts: Vec<u32>) -> Self {
        assert!(parts.iter().all(|&k| k > 0), "parts must be positive");
        parts.sort_unstable_by(|a, b| b.cmp(a));
        MultiIndex(parts)
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    pub fn weight(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Multiset union `self ⊎ other`.
    pub fn union(&self, other: &MultiIndex) -> MultiIndex {
        let mut parts = self.0.clone();
        parts.extend_from_slice(&other.0);
        MultiIndex::new(parts)
    }

    /// `(part, multiplicity)` pairs, largest part first.
    pub fn multiplicities(&self) -> Vec<(u32, u32)> {
        let mut out: Vec<(u32, u32)> = Vec::new();
        for &k in &self.0 {
            match out.last_mut() {
                Some((p, m)) if *p == k => *m += 1,
                _ => out.push((k, 1)),
            }
        }
        out
    }

    pub fn count(&self, k: u32) -> u32 {
        self.0.iter().filter(|&&p| p == k).count() as u32
    }

    /// All ordered pairs `(a, b)` of multisets with `a ⊎ b = self`, each once.
    pub fn splittings(&self) -> Vec<(MultiIndex, MultiIndex)> {
        let mult = self.multiplicities();
        let mut out = Vec::new();
        let mut choice = vec![0u32; mult.len()];
        loop {
            let mut left = Vec::new();
            let mut right = Vec::new();
            for (i, &(k, m)) in mult.iter().enumerate() {
                left.extend(std::iter::repeat(k).take(choice[i] as usize));
                right.extend(std::iter::repeat(k).take((m - choice[i]) as usize));
            }
            out.push((MultiIndex(left), MultiIndex(right)));
            // odometer
            let mut i = 0;
            loop {
                if i == mult.len() {
                    return out;
                }
                if choice[i] < mult[i].1 {
                    choice[i] += 1;
                    break;
                }
                choice[i] = 0;
                i += 1;
            }
        }
    }

    /// `self` minus the multiset `other`; `None` unless `other ⊆ self`.
    pub fn difference(&self, other: &MultiIndex) -> Option<MultiIndex> {
        let mut out = self.clone();
        for &k in other.parts() {
            out = out.remove_part(k)?;
        }
        Some(out)
    }

    /// Removes one copy of `k`; `None` if absent.
    pub fn remove_part(&self, k: u32) -> Option<MultiIndex> {
        let pos = self.0.iter().position(|&p| p == k)?;
        let mut parts = self.0.clone();
        parts.remove(pos);
        Some(MultiIndex(parts))
    }
}

impl Ord for MultiIndex {
    /// Graded order: by weight, then lexicographically on the descending parts.
    fn cmp(&self, other: &Self) -> Ordering {
        self.weight()
            .cmp(&other.weight())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl TryFrom<Vec<u32>> for MultiIndex {
    type Error = String;
    fn try_from(parts: Vec<u32>) -> Result<Self, Self::Error> {
        if parts.contains(&0) {
            return Err("multi-index parts must be positive".into());
        }
        Ok(MultiIndex::new(parts))
    }
}

impl From<MultiIndex> for Vec<u32> {
    fn from(w: MultiIndex) -> Vec<u32> {
        w.0
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "()");
        }
        write!(f, "(")?;
        for (i, k) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{k}")?;
        }
        write!(f, ")")
    }
}

/// Partitions of `n` (as multi-indices), in decreasing lexicographic order.
pub fn partitions(n: u32) -> Vec<MultiIndex> {
    fn rec(n: u32, max: u32, prefix: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
        if n == 0 {
            out.push(MultiIndex(prefix.clone()));
            return;
        }
        for k in (1..=max.min(n)).rev() {
            prefix.push(k);
            rec(n - k, k, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n, &mut Vec::new(), &mut out);
    out
}

/// Every multi-index of weight at most `max_weight`, grouped by weight.
pub fn basis_up_to(max_weight: u32) -> Vec<MultiIndex> {
    (0..=max_weight).flat_map(partitions).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn partition_count(n: u32) -> usize {
        // p(n) through the pentagonal-number recurrence, independent of the enumerator.
        let n = n as i64;
        let mut p = vec![0i64; (n + 1) as usize];
        p[0] = 1;
        for m in 1..=n {
            let mut k = 1i64;
            let mut total = 0i64;
            loop {
                let g1 = k * (3 * k - 1) / 2;
                if g1 > m {
                    break;
                }
                let sign = if k % 2 == 1 { 1 } else { -1 };
                total += sign * p[(m - g1) as usize];
                let g2 = k * (3 * k + 1) / 2;
                if g2 <= m {
                    total += sign * p[(m - g2) as usize];
                }
                k += 1;
            }
            p[m as usize] = total;
        }
        p[n as usize] as usize
    }

    #[test]
    fn small_bases() {
        assert_eq!(basis_up_to(0), vec![MultiIndex::empty()]);
        let b2 = basis_up_to(2);
        assert_eq!(
            b2,
            vec![
                MultiIndex::empty(),
                MultiIndex::single(1),
                MultiIndex::single(2),
                MultiIndex::new(vec![1, 1])
            ]
        );
        assert_eq!(basis_up_to(4).len(), 12);
    }

    #[test]
    fn partition_counts_match_recurrence() {
        for n in 0..=12 {
            assert_eq!(partitions(n).len(), partition_count(n), "n = {n}");
        }
        let total: usize = (0..=4).map(partition_count).sum();
        assert_eq!(total, 12);
    }

    #[test]
    fn splittings_of_repeated_parts() {
        let w = MultiIndex::new(vec![1, 1]);
        let s = w.splittings();
        assert_eq!(s.len(), 3);
        let w = MultiIndex::new(vec![2, 1, 1]);
        assert_eq!(w.splittings().len(), 6);
        for (a, b) in w.splittings() {
            assert_eq!(a.union(&b), w);
        }
    }

    #[test]
    fn serde_is_descending_list() {
        let w = MultiIndex::new(vec![1, 3, 2]);
        assert_eq!(serde_json::to_string(&w).unwrap(), "[3,2,1]");
        let back: MultiIndex = serde_json::from_str("[1,2,3]").unwrap();
        assert_eq!(back, w);
        assert!(serde_json::from_str::<MultiIndex>("[0,1]").is_err());
    }
}

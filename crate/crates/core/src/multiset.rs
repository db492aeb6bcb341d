//! Finite multisets of point indices.
//!
//! A [`Multiset`] is stored in canonical run-length form: a list of
//! `(point, multiplicity)` pairs, strictly increasing in `point`, with no zero
//! multiplicities. Structural equality is therefore multiset equality.
//!
//! Ordering is lexicographic on the sorted expansion (the multiset written as
//! a non-decreasing sequence of points), which is also the order produced by
//! [`enumerate_multisets`].

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};

#[derive(Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<[usize; 2]>", into = "Vec<[usize; 2]>")]
pub struct Multiset {
    entries: Vec<(usize, usize)>,
    degree: usize,
}

impl Multiset {
    /// The empty multiset (degree 0).
    pub fn empty() -> Self {
        Multiset::default()
    }

    /// `r·x`: the multiset with the single entry `x` of multiplicity `r`.
    pub fn scale_point(r: usize, x: usize) -> Result<Self> {
        if r == 0 {
            return Err(GeomError::ZeroMultiplicity);
        }
        Ok(Multiset {
            entries: vec![(x, r)],
            degree: r,
        })
    }

    /// `1·x`.
    pub fn point(x: usize) -> Self {
        Multiset {
            entries: vec![(x, 1)],
            degree: 1,
        }
    }

    /// Builds the multiset with the given expansion; order and repetition
    /// of the input are irrelevant beyond multiplicity.
    pub fn from_points<I: IntoIterator<Item = usize>>(points: I) -> Self {
        let mut pts: Vec<usize> = points.into_iter().collect();
        pts.sort_unstable();
        let degree = pts.len();
        let mut entries: Vec<(usize, usize)> = Vec::new();
        for p in pts {
            match entries.last_mut() {
                Some((q, m)) if *q == p => *m += 1,
                _ => entries.push((p, 1)),
            }
        }
        Multiset { entries, degree }
    }

    /// Builds a multiset from `(point, multiplicity)` pairs in any order.
    /// Repeated points accumulate; zero multiplicities are rejected.
    pub fn from_pairs<I: IntoIterator<Item = (usize, usize)>>(pairs: I) -> Result<Self> {
        let mut acc = std::collections::BTreeMap::new();
        for (p, m) in pairs {
            if m == 0 {
                return Err(GeomError::ZeroMultiplicity);
            }
            *acc.entry(p).or_insert(0) += m;
        }
        let entries: Vec<(usize, usize)> = acc.into_iter().collect();
        let degree = entries.iter().map(|&(_, m)| m).sum();
        Ok(Multiset { entries, degree })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_empty(&self) -> bool {
        self.degree == 0
    }

    pub fn entries(&self) -> &[(usize, usize)] {
        &self.entries
    }

    pub fn multiplicity(&self, x: usize) -> usize {
        match self.entries.binary_search_by_key(&x, |&(p, _)| p) {
            Ok(i) => self.entries[i].1,
            Err(_) => 0,
        }
    }

    pub fn support(&self) -> BTreeSet<usize> {
        self.entries.iter().map(|&(p, _)| p).collect()
    }

    pub fn support_len(&self) -> usize {
        self.entries.len()
    }

    /// The sorted expansion, e.g. `2·0 + 1` expands to `[0, 0, 1]`.
    pub fn expansion(&self) -> Vec<usize> {
        self.expansion_iter().collect()
    }

    fn expansion_iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries
            .iter()
            .flat_map(|&(p, m)| std::iter::repeat_n(p, m))
    }

    /// Pointwise sum of multiplicity functions.
    pub fn add(&self, other: &Multiset) -> Multiset {
        let mut entries = Vec::with_capacity(self.entries.len() + other.entries.len());
        let (mut i, mut j) = (0, 0);
        while i < self.entries.len() && j < other.entries.len() {
            let (a, ma) = self.entries[i];
            let (b, mb) = other.entries[j];
            match a.cmp(&b) {
                Ordering::Less => {
                    entries.push((a, ma));
                    i += 1;
                }
                Ordering::Greater => {
                    entries.push((b, mb));
                    j += 1;
                }
                Ordering::Equal => {
                    entries.push((a, ma + mb));
                    i += 1;
                    j += 1;
                }
            }
        }
        entries.extend_from_slice(&self.entries[i..]);
        entries.extend_from_slice(&other.entries[j..]);
        Multiset {
            entries,
            degree: self.degree + other.degree,
        }
    }

    /// `self + r·x`; `r = 0` returns a copy of `self`.
    pub fn plus_scaled(&self, r: usize, x: usize) -> Multiset {
        if r == 0 {
            return self.clone();
        }
        self.add(&Multiset {
            entries: vec![(x, r)],
            degree: r,
        })
    }

    /// `r·self`.
    pub fn scaled(&self, r: usize) -> Multiset {
        if r == 0 {
            return Multiset::empty();
        }
        Multiset {
            entries: self.entries.iter().map(|&(p, m)| (p, m * r)).collect(),
            degree: self.degree * r,
        }
    }

    /// `self - other` when `other` is a sub-multiset of `self`.
    pub fn checked_sub(&self, other: &Multiset) -> Option<Multiset> {
        let mut out = Vec::with_capacity(self.entries.len());
        let mut j = 0;
        for &(p, m) in &self.entries {
            let mut m = m;
            if j < other.entries.len() && other.entries[j].0 == p {
                let mo = other.entries[j].1;
                if mo > m {
                    return None;
                }
                m -= mo;
                j += 1;
            } else if j < other.entries.len() && other.entries[j].0 < p {
                return None;
            }
            if m > 0 {
                out.push((p, m));
            }
        }
        if j < other.entries.len() {
            return None;
        }
        Some(Multiset {
            entries: out,
            degree: self.degree - other.degree,
        })
    }

    /// Maps every point through `f`, re-canonicalizing.
    pub fn map_points<F: Fn(usize) -> usize>(&self, f: F) -> Multiset {
        Multiset::from_pairs(self.entries.iter().map(|&(p, m)| (f(p), m)))
            .expect("multiplicities stay positive")
    }
}

impl Ord for Multiset {
    fn cmp(&self, other: &Self) -> Ordering {
        self.expansion_iter().cmp(other.expansion_iter())
    }
}

impl PartialOrd for Multiset {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl TryFrom<Vec<[usize; 2]>> for Multiset {
    type Error = GeomError;

    fn try_from(pairs: Vec<[usize; 2]>) -> Result<Self> {
        Multiset::from_pairs(pairs.into_iter().map(|[p, m]| (p, m)))
    }
}

impl From<Multiset> for Vec<[usize; 2]> {
    fn from(m: Multiset) -> Self {
        m.entries.iter().map(|&(p, k)| [p, k]).collect()
    }
}

impl fmt::Display for Multiset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.entries.is_empty() {
            return write!(f, "0");
        }
        for (i, &(p, m)) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, "+")?;
            }
            if m == 1 {
                write!(f, "{p}")?;
            } else {
                write!(f, "{m}·{p}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Multiset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Multiset({self})")
    }
}

/// All degree-`k` multisets over `{0, .., n-1}`, in lexicographic order of
/// their expansions. There are `C(n+k-1, k)` of them.
pub fn enumerate_multisets(n: usize, k: usize) -> Result<Vec<Multiset>> {
    if n == 0 {
        if k == 0 {
            return Ok(vec![Multiset::empty()]);
        }
        return Err(GeomError::EmptyUniverse { degree: k });
    }
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(k);
    fn rec(n: usize, k: usize, start: usize, current: &mut Vec<usize>, out: &mut Vec<Multiset>) {
        if current.len() == k {
            out.push(Multiset::from_points(current.iter().copied()));
            return;
        }
        for x in start..n {
            current.push(x);
            rec(n, k, x, current, out);
            current.pop();
        }
    }
    rec(n, k, 0, &mut current, &mut out);
    Ok(out)
}

/// All multisets of degree strictly below `k` over `{0, .., n-1}`, ordered by
/// degree and then lexicographically.
pub fn enumerate_lower_multisets(n: usize, k: usize) -> Result<Vec<Multiset>> {
    let mut out = Vec::new();
    for l in 0..k {
        out.extend(enumerate_multisets(n, l)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pascal(n: usize, k: usize) -> u64 {
        let mut row = vec![1u64];
        for _ in 0..n {
            let mut next = vec![1u64; row.len() + 1];
            for i in 1..row.len() {
                next[i] = row[i - 1] + row[i];
            }
            row = next;
        }
        if k <= n {
            row[k]
        } else {
            0
        }
    }

    #[test]
    fn three_points_degree_two() {
        let all = enumerate_multisets(3, 2).unwrap();
        let expected: Vec<Multiset> = [[0, 0], [0, 1], [0, 2], [1, 1], [1, 2], [2, 2]]
            .iter()
            .map(|p| Multiset::from_points(p.iter().copied()))
            .collect();
        assert_eq!(all, expected);
    }

    #[test]
    fn degree_zero_is_single_empty() {
        for n in 1..5 {
            let all = enumerate_multisets(n, 0).unwrap();
            assert_eq!(all, vec![Multiset::empty()]);
        }
    }

    #[test]
    fn four_points_degree_two_count() {
        let all = enumerate_multisets(4, 2).unwrap();
        assert_eq!(all.len() as u64, pascal(5, 2));
        assert_eq!(all.len(), 10);
        let distinct: BTreeSet<_> = all.iter().cloned().collect();
        assert_eq!(distinct.len(), 10);
    }

    #[test]
    fn empty_universe_rejected() {
        assert_eq!(
            enumerate_multisets(0, 2),
            Err(GeomError::EmptyUniverse { degree: 2 })
        );
    }

    #[test]
    fn enumeration_counts_match_pascal() {
        for n in 1..8 {
            for k in 0..5 {
                let all = enumerate_multisets(n, k).unwrap();
                assert_eq!(all.len() as u64, pascal(n + k - 1, k), "n={n} k={k}");
                assert!(all.windows(2).all(|w| w[0] < w[1]));
            }
        }
    }

    #[test]
    fn addition_examples() {
        let a = Multiset::from_points([0, 1]);
        let b = Multiset::point(1);
        assert_eq!(a.add(&b), Multiset::from_pairs([(0, 1), (1, 2)]).unwrap());
        assert_eq!(a.add(&Multiset::empty()), a);
        let c = Multiset::scale_point(2, 0)
            .unwrap()
            .add(&Multiset::point(2));
        assert_eq!(c.entries(), &[(0, 2), (2, 1)]);
        assert_eq!(c.degree(), 3);
    }

    #[test]
    fn scale_point_examples() {
        let m = Multiset::scale_point(2, 5).unwrap();
        assert_eq!(m.entries(), &[(5, 2)]);
        assert_eq!(Multiset::scale_point(1, 0).unwrap(), Multiset::point(0));
        assert_eq!(
            Multiset::scale_point(0, 3),
            Err(GeomError::ZeroMultiplicity)
        );
        for r in 1..6 {
            for x in 0..6 {
                assert_eq!(Multiset::scale_point(r, x).unwrap().degree(), r);
            }
        }
    }

    #[test]
    fn support_and_degree() {
        let f = Multiset::from_points([0, 0, 1]);
        assert_eq!(f.support(), BTreeSet::from([0, 1]));
        assert!(Multiset::empty().support().is_empty());
        assert_eq!(Multiset::empty().degree(), 0);
        for f in enumerate_multisets(5, 3).unwrap() {
            assert_eq!(f.degree(), 3);
            assert!(f.support().len() <= 3);
        }
    }

    #[test]
    fn sub_and_scale() {
        let f = Multiset::from_points([0, 0, 1, 3]);
        let e = Multiset::from_points([0, 3]);
        assert_eq!(f.checked_sub(&e), Some(Multiset::from_points([0, 1])));
        assert_eq!(e.checked_sub(&f), None);
        assert_eq!(
            Multiset::from_points([2]).checked_sub(&Multiset::from_points([1])),
            None
        );
        assert_eq!(e.scaled(2), Multiset::from_points([0, 0, 3, 3]));
    }

    #[test]
    fn json_textual_form() {
        let m = Multiset::scale_point(2, 0).unwrap();
        assert_eq!(serde_json::to_string(&m).unwrap(), "[[0,2]]");
        let parsed: Multiset = serde_json::from_str("[[3,1],[0,2]]").unwrap();
        assert_eq!(parsed, Multiset::from_points([0, 3, 0]));
        assert!(serde_json::from_str::<Multiset>("[[1,0]]").is_err());
    }

    #[test]
    fn add_commutative_associative_on_small_universe() {
        let all = enumerate_multisets(4, 2).unwrap();
        for a in &all {
            for b in &all {
                assert_eq!(a.add(b), b.add(a));
                for c in &all {
                    assert_eq!(a.add(b).add(c), a.add(&b.add(c)));
                }
            }
        }
    }

    proptest! {
        #[test]
        fn permuted_expansions_canonicalize(mut pts in proptest::collection::vec(0usize..6, 0..8), seed in any::<u64>()) {
            let reference = Multiset::from_points(pts.iter().copied());
            // deterministic shuffle from the seed
            let mut s = seed;
            for i in (1..pts.len()).rev() {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let j = (s >> 33) as usize % (i + 1);
                pts.swap(i, j);
            }
            let shuffled = Multiset::from_points(pts.iter().copied());
            prop_assert_eq!(&reference, &shuffled);
            prop_assert_eq!(reference.expansion().len(), reference.degree());
            let json = serde_json::to_string(&reference).unwrap();
            let back: Multiset = serde_json::from_str(&json).unwrap();
            prop_assert_eq!(back, reference);
        }
    }
}

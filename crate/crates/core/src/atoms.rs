//! Atoms of the infinite individual domain, finite atom sets, and
//! finite-support permutations.
//!
//! Atoms are the naturals `0, 1, 2, ...`. A [`FinPerm`] stores only the points
//! it moves, so membership in a pointwise stabilizer is a walk over the moved
//! points.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An individual of the atom domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Atom(pub u32);

impl Atom {
    pub fn id(self) -> u32 {
        self.0
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<u32> for Atom {
    fn from(id: u32) -> Self {
        Atom(id)
    }
}

/// Convenience for writing tuples in tests and examples.
pub fn tuple(ids: &[u32]) -> Vec<Atom> {
    ids.iter().copied().map(Atom).collect()
}

/// A finite set of atoms.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AtomSet(BTreeSet<Atom>);

impl AtomSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, a: Atom) -> bool {
        self.0.insert(a)
    }

    pub fn contains(&self, a: Atom) -> bool {
        self.0.contains(&a)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = Atom> + '_ {
        self.0.iter().copied()
    }

    pub fn union(&self, other: &AtomSet) -> AtomSet {
        AtomSet(self.0.union(&other.0).copied().collect())
    }

    pub fn extend<I: IntoIterator<Item = Atom>>(&mut self, atoms: I) {
        self.0.extend(atoms);
    }

    pub fn is_subset(&self, other: &AtomSet) -> bool {
        self.0.is_subset(&other.0)
    }

    /// The `count` least atoms not in this set, ascending.
    pub fn fresh(&self, count: usize) -> Vec<Atom> {
        fresh_atoms(|a| self.contains(a), count)
    }

    /// Least atom not in this set.
    pub fn least_fresh(&self) -> Atom {
        self.fresh(1)[0]
    }
}

impl FromIterator<Atom> for AtomSet {
    fn from_iter<I: IntoIterator<Item = Atom>>(iter: I) -> Self {
        AtomSet(iter.into_iter().collect())
    }
}

impl<'a> FromIterator<&'a Atom> for AtomSet {
    fn from_iter<I: IntoIterator<Item = &'a Atom>>(iter: I) -> Self {
        AtomSet(iter.into_iter().copied().collect())
    }
}

impl IntoIterator for AtomSet {
    type Item = Atom;
    type IntoIter = std::collections::btree_set::IntoIter<Atom>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.into_iter()
    }
}

/// The `count` least atoms rejected by `avoid`, ascending.
pub fn fresh_atoms(avoid: impl Fn(Atom) -> bool, count: usize) -> Vec<Atom> {
    let mut out = Vec::with_capacity(count);
    let mut next = 0u32;
    while out.len() < count {
        let a = Atom(next);
        if !avoid(a) {
            out.push(a);
        }
        next += 1;
    }
    out
}

/// A permutation of the atoms moving only finitely many points.
///
/// Canonical form: the map never contains a fixed point, so structural
/// equality is equality of permutations.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct FinPerm {
    moved: BTreeMap<Atom, Atom>,
}

impl FinPerm {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn transposition(a: Atom, b: Atom) -> Result<Self> {
        if a == b {
            return Err(Error::DegenerateTransposition(a));
        }
        Ok(FinPerm {
            moved: BTreeMap::from([(a, b), (b, a)]),
        })
    }

    /// Builds a permutation from an explicit finite map, which must be a
    /// bijection of its key set onto itself. Fixed points are dropped.
    pub fn from_map<I: IntoIterator<Item = (Atom, Atom)>>(pairs: I) -> Option<Self> {
        let mut moved = BTreeMap::new();
        for (from, to) in pairs {
            if let Some(prev) = moved.insert(from, to) {
                if prev != to {
                    return None;
                }
            }
        }
        let keys: BTreeSet<Atom> = moved.keys().copied().collect();
        let values: BTreeSet<Atom> = moved.values().copied().collect();
        if keys != values || values.len() != moved.len() {
            return None;
        }
        moved.retain(|k, v| k != v);
        Some(FinPerm { moved })
    }

    /// The cycle `c[0] -> c[1] -> ... -> c[last] -> c[0]`.
    pub fn cycle(c: &[Atom]) -> Option<Self> {
        let pairs = (0..c.len()).map(|i| (c[i], c[(i + 1) % c.len()]));
        Self::from_map(pairs)
    }

    pub fn apply(&self, a: Atom) -> Atom {
        self.moved.get(&a).copied().unwrap_or(a)
    }

    pub fn apply_tuple(&self, t: &[Atom]) -> Vec<Atom> {
        t.iter().map(|&a| self.apply(a)).collect()
    }

    /// `self ∘ other`: first `other`, then `self`.
    pub fn compose(&self, other: &FinPerm) -> FinPerm {
        let mut moved = BTreeMap::new();
        for &x in self.moved.keys().chain(other.moved.keys()) {
            let y = self.apply(other.apply(x));
            if x != y {
                moved.insert(x, y);
            }
        }
        FinPerm { moved }
    }

    pub fn inverse(&self) -> FinPerm {
        FinPerm {
            moved: self.moved.iter().map(|(&k, &v)| (v, k)).collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.moved.is_empty()
    }

    /// Moved points with their images, ascending by point.
    pub fn moved(&self) -> impl Iterator<Item = (Atom, Atom)> + '_ {
        self.moved.iter().map(|(&k, &v)| (k, v))
    }

    pub fn support(&self) -> AtomSet {
        self.moved.keys().collect()
    }

    /// Whether this permutation lies in the pointwise stabilizer of `set`.
    pub fn fixes_pointwise(&self, set: &AtomSet) -> bool {
        if self.moved.len() <= set.len() {
            self.moved.keys().all(|a| !set.contains(*a))
        } else {
            set.iter().all(|a| !self.moved.contains_key(&a))
        }
    }
}

impl fmt::Display for FinPerm {
    /// Disjoint-cycle notation, `()` for the identity.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.moved.is_empty() {
            return write!(f, "()");
        }
        let mut seen = BTreeSet::new();
        for &start in self.moved.keys() {
            if !seen.insert(start) {
                continue;
            }
            write!(f, "({start}")?;
            let mut cur = self.apply(start);
            while cur != start {
                seen.insert(cur);
                write!(f, " {cur}")?;
                cur = self.apply(cur);
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl Serialize for FinPerm {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.moved.iter())
    }
}

impl<'de> Deserialize<'de> for FinPerm {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let pairs: Vec<(Atom, Atom)> = Vec::deserialize(d)?;
        FinPerm::from_map(pairs).ok_or_else(|| serde::de::Error::custom("not a bijection"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn a(i: u32) -> Atom {
        Atom(i)
    }

    #[test]
    fn transposition_swaps() {
        let p = FinPerm::transposition(a(2), a(5)).unwrap();
        assert_eq!(p.apply_tuple(&tuple(&[2, 5, 7])), tuple(&[5, 2, 7]));
        assert_eq!(p.apply(a(9)), a(9));
        let q = FinPerm::transposition(a(0), a(1)).unwrap();
        assert!(q.compose(&q).is_identity());
    }

    #[test]
    fn degenerate_transposition_rejected() {
        assert_eq!(
            FinPerm::transposition(a(3), a(3)),
            Err(Error::DegenerateTransposition(a(3)))
        );
    }

    #[test]
    fn compose_is_function_composition() {
        let p = FinPerm::transposition(a(0), a(1)).unwrap();
        let q = FinPerm::transposition(a(1), a(2)).unwrap();
        assert_eq!(p.compose(&q).apply(a(2)), a(0));
        assert!(p.compose(&p.inverse()).is_identity());
        assert_eq!(FinPerm::identity().compose(&q), q);
    }

    #[test]
    fn apply_tuple_cases() {
        let p = FinPerm::transposition(a(2), a(5)).unwrap();
        assert_eq!(p.apply_tuple(&tuple(&[2, 2, 5])), tuple(&[5, 5, 2]));
        assert_eq!(FinPerm::identity().apply_tuple(&tuple(&[4, 7])), tuple(&[4, 7]));
        let c = FinPerm::cycle(&tuple(&[2, 3, 5])).unwrap();
        assert_eq!(c.apply_tuple(&tuple(&[2, 3])), tuple(&[3, 5]));
    }

    #[test]
    fn fixes_pointwise_cases() {
        let p = FinPerm::transposition(a(2), a(5)).unwrap();
        assert!(p.fixes_pointwise(&tuple(&[0, 1]).into_iter().collect()));
        assert!(!p.fixes_pointwise(&[a(2)].into_iter().collect()));
        assert!(FinPerm::identity().fixes_pointwise(&tuple(&[0, 2, 5]).into_iter().collect()));
    }

    #[test]
    fn from_map_rejects_non_bijections() {
        assert!(FinPerm::from_map([(a(0), a(1))]).is_none());
        assert!(FinPerm::from_map([(a(0), a(1)), (a(2), a(1))]).is_none());
        let p = FinPerm::from_map([(a(0), a(0)), (a(1), a(2)), (a(2), a(1))]).unwrap();
        assert_eq!(p.moved().count(), 2);
    }

    #[test]
    fn display_cycles() {
        let p = FinPerm::cycle(&tuple(&[2, 3, 5])).unwrap();
        assert_eq!(p.to_string(), "(2 3 5)");
        assert_eq!(FinPerm::identity().to_string(), "()");
    }

    #[test]
    fn fresh_is_least_outside() {
        let s: AtomSet = tuple(&[0, 2, 3]).into_iter().collect();
        assert_eq!(s.fresh(3), tuple(&[1, 4, 5]));
    }

    fn perm_strategy() -> impl Strategy<Value = FinPerm> {
        (Just(()), prop::collection::vec(0u32..12, 0..12)).prop_map(|(_, ids)| {
            let mut seen = BTreeSet::new();
            let pts: Vec<Atom> = ids.into_iter().filter(|i| seen.insert(*i)).map(Atom).collect();
            let mut rotated = pts.clone();
            rotated.rotate_left(if pts.is_empty() { 0 } else { 1 });
            FinPerm::from_map(pts.into_iter().zip(rotated)).unwrap()
        })
    }

    proptest! {
        #[test]
        fn group_laws(p in perm_strategy(), q in perm_strategy(), r in perm_strategy(),
                      t in prop::collection::vec(0u32..14, 0..6)) {
            let t: Vec<Atom> = t.into_iter().map(Atom).collect();
            prop_assert_eq!(p.compose(&q).compose(&r), p.compose(&q.compose(&r)));
            prop_assert!(p.compose(&p.inverse()).is_identity());
            prop_assert_eq!(p.compose(&q).apply_tuple(&t), p.apply_tuple(&q.apply_tuple(&t)));
            let image = p.apply_tuple(&t);
            for i in 0..t.len() {
                for j in 0..t.len() {
                    prop_assert_eq!(t[i] == t[j], image[i] == image[j]);
                }
            }
        }

        #[test]
        fn stabilizer_of_union(p in perm_strategy(),
                               ps in prop::collection::btree_set(0u32..14, 0..4),
                               qs in prop::collection::btree_set(0u32..14, 0..4)) {
            let ps: AtomSet = ps.into_iter().map(Atom).collect();
            let qs: AtomSet = qs.into_iter().map(Atom).collect();
            prop_assert_eq!(
                p.fixes_pointwise(&ps.union(&qs)),
                p.fixes_pointwise(&ps) && p.fixes_pointwise(&qs)
            );
        }
    }
}

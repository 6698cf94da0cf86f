//! Finitely supported predicates.
//!
//! A predicate of arity `n` with support `P` is invariant under every
//! permutation fixing `P` pointwise, so it is a union of cells of `P`'s
//! partition of `I^n`. [`FinSuppPredicate`] stores exactly that: the frame
//! `P` and the set of cells it contains. Membership is classification.

use std::collections::BTreeSet;
use std::fmt;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::atoms::{Atom, AtomSet, FinPerm};
use crate::error::{Error, Result};
use crate::partition::{classify, enumerate_cells, representative, CellDescriptor, SetPartition, SupportFrame};

/// An `n`-ary predicate of the permutation model, given by an ordered
/// support frame and the cells of that frame it contains.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FinSuppPredicate {
    arity: usize,
    frame: SupportFrame,
    cells: BTreeSet<CellDescriptor>,
}

/// Boolean operations for [`combine`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SetOp {
    Union,
    Intersection,
    Complement,
}

impl FinSuppPredicate {
    pub fn new<I>(arity: usize, frame: SupportFrame, cells: I) -> Result<Self>
    where
        I: IntoIterator<Item = CellDescriptor>,
    {
        if arity == 0 {
            return Err(Error::ZeroArity);
        }
        let cells: BTreeSet<CellDescriptor> = cells.into_iter().collect();
        for c in &cells {
            c.check(arity, frame.q())?;
        }
        Ok(FinSuppPredicate { arity, frame, cells })
    }

    pub fn empty(arity: usize) -> Self {
        FinSuppPredicate {
            arity,
            frame: SupportFrame::empty(),
            cells: BTreeSet::new(),
        }
    }

    pub fn full(arity: usize) -> Self {
        let cells = enumerate_cells(arity, 0).expect("positive arity").into_iter().collect();
        FinSuppPredicate {
            arity,
            frame: SupportFrame::empty(),
            cells,
        }
    }

    /// The finite predicate whose extension is exactly `tuples`.
    pub fn from_tuples(arity: usize, tuples: &[Vec<Atom>]) -> Result<Self> {
        if arity == 0 {
            return Err(Error::ZeroArity);
        }
        let frame = SupportFrame::new(tuples.iter().flatten().copied());
        let mut cells = BTreeSet::new();
        for t in tuples {
            if t.len() != arity {
                return Err(Error::ArityMismatch {
                    expected: arity,
                    found: t.len(),
                });
            }
            cells.insert(classify(t, &frame)?);
        }
        Ok(FinSuppPredicate { arity, frame, cells })
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn frame(&self) -> &SupportFrame {
        &self.frame
    }

    pub fn cells(&self) -> &BTreeSet<CellDescriptor> {
        &self.cells
    }

    pub fn contains(&self, t: &[Atom]) -> Result<bool> {
        if t.len() != self.arity {
            return Err(Error::ArityMismatch {
                expected: self.arity,
                found: t.len(),
            });
        }
        Ok(self.cells.contains(&classify(t, &self.frame)?))
    }

    /// The image predicate `{ p(t) : t ∈ self }`.
    pub fn apply_perm(&self, p: &FinPerm) -> FinSuppPredicate {
        let images: Vec<Atom> = self.frame.atoms().iter().map(|&a| p.apply(a)).collect();
        let frame = SupportFrame::new(images.iter().copied());
        let q = frame.q();
        let cells = self
            .cells
            .iter()
            .map(|c| {
                let e = c
                    .e()
                    .iter()
                    .map(|&ej| {
                        if ej <= q {
                            frame.position(images[ej - 1]).expect("image lies in frame")
                        } else {
                            q + 1
                        }
                    })
                    .collect();
                CellDescriptor::new(q, e, c.k().clone()).expect("relabelled cell stays valid")
            })
            .collect();
        FinSuppPredicate {
            arity: self.arity,
            frame,
            cells,
        }
    }

    /// Re-expresses the predicate over a larger frame.
    pub fn extend_support(&self, target: &SupportFrame) -> Result<FinSuppPredicate> {
        if !self.frame.is_subset(target) {
            return Err(Error::NotASuperset {
                current: self.frame.atoms().to_vec(),
                target: target.atoms().to_vec(),
            });
        }
        if target == &self.frame {
            return Ok(self.clone());
        }
        let mu = target.fresh(self.arity);
        let mut cells = BTreeSet::new();
        for c in enumerate_cells(self.arity, target.q())? {
            let rep = representative(target, &mu, &c)?;
            if self.contains(&rep)? {
                cells.insert(c);
            }
        }
        Ok(FinSuppPredicate {
            arity: self.arity,
            frame: target.clone(),
            cells,
        })
    }

    /// Extensional equality.
    pub fn same_extension(&self, other: &FinSuppPredicate) -> bool {
        if self.arity != other.arity {
            return false;
        }
        if self.frame == other.frame {
            return self.cells == other.cells;
        }
        let frame = self.frame.union(&other.frame);
        let a = self.extend_support(&frame).expect("union frame is a superset");
        let b = other.extend_support(&frame).expect("union frame is a superset");
        a.cells == b.cells
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// The extension as a list of tuples, when it is finite.
    pub fn finite_extension(&self) -> Option<Vec<Vec<Atom>>> {
        if !self.cells.iter().all(CellDescriptor::is_singleton) {
            return None;
        }
        let tuples = self
            .cells
            .iter()
            .map(|c| representative(&self.frame, &[], c).expect("singleton cell"))
            .collect();
        Some(tuples)
    }

    /// `{ η : prefix . η ∈ self }` as a predicate of the remaining arity.
    pub fn section(&self, prefix: &[Atom]) -> Result<FinSuppPredicate> {
        if prefix.len() >= self.arity {
            return Err(Error::ArityMismatch {
                expected: self.arity - 1,
                found: prefix.len(),
            });
        }
        let frame = self.frame.union(&SupportFrame::new(prefix.iter().copied()));
        let rest = self.arity - prefix.len();
        from_semantic(rest, &frame, |eta| {
            let mut t = prefix.to_vec();
            t.extend_from_slice(eta);
            self.contains(&t).expect("arity checked")
        })
    }
}

impl fmt::Display for FinSuppPredicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "⟨n={}, frame={}, cells={{", self.arity, self.frame)?;
        for (i, c) in self.cells.iter().enumerate() {
            if i > 0 {
                write!(f, " | ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "}}⟩")
    }
}

#[derive(Serialize, Deserialize)]
struct PredicateRepr {
    arity: usize,
    frame: Vec<Atom>,
    cells: Vec<String>,
}

impl Serialize for FinSuppPredicate {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PredicateRepr {
            arity: self.arity,
            frame: self.frame.atoms().to_vec(),
            cells: self.cells.iter().map(ToString::to_string).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FinSuppPredicate {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = PredicateRepr::deserialize(d)?;
        let frame = SupportFrame::new(repr.frame.iter().copied());
        if frame.q() != repr.frame.len() {
            return Err(D::Error::custom("frame atoms must be distinct"));
        }
        let cells = repr
            .cells
            .iter()
            .map(|s| CellDescriptor::parse(s, frame.q()))
            .collect::<Result<Vec<_>>>()
            .map_err(D::Error::custom)?;
        FinSuppPredicate::new(repr.arity, frame, cells).map_err(D::Error::custom)
    }
}

/// Cellwise Boolean combination over the union frame. `b` is ignored for
/// [`SetOp::Complement`] and required otherwise.
pub fn combine(op: SetOp, a: &FinSuppPredicate, b: Option<&FinSuppPredicate>) -> Result<FinSuppPredicate> {
    if op == SetOp::Complement {
        let all = enumerate_cells(a.arity, a.frame.q())?;
        let cells = all.into_iter().filter(|c| !a.cells.contains(c)).collect();
        return Ok(FinSuppPredicate {
            arity: a.arity,
            frame: a.frame.clone(),
            cells,
        });
    }
    let b = b.expect("binary set operation needs two operands");
    if a.arity != b.arity {
        return Err(Error::ArityMismatch {
            expected: a.arity,
            found: b.arity,
        });
    }
    let frame = a.frame.union(&b.frame);
    let a = a.extend_support(&frame)?;
    let b = b.extend_support(&frame)?;
    let cells = match op {
        SetOp::Union => a.cells.union(&b.cells).cloned().collect(),
        SetOp::Intersection => a.cells.intersection(&b.cells).cloned().collect(),
        SetOp::Complement => unreachable!(),
    };
    Ok(FinSuppPredicate {
        arity: a.arity,
        frame,
        cells,
    })
}

pub fn union(a: &FinSuppPredicate, b: &FinSuppPredicate) -> Result<FinSuppPredicate> {
    combine(SetOp::Union, a, Some(b))
}

pub fn intersection(a: &FinSuppPredicate, b: &FinSuppPredicate) -> Result<FinSuppPredicate> {
    combine(SetOp::Intersection, a, Some(b))
}

pub fn complement(a: &FinSuppPredicate) -> FinSuppPredicate {
    combine(SetOp::Complement, a, None).expect("complement cannot fail")
}

const SPOT_CHECKS_PER_CELL: usize = 3;

/// Reifies a membership test that is invariant under the pointwise
/// stabilizer of `frame`. One representative per cell is probed, with fresh
/// atoms chosen least outside the frame, and every cell is spot-checked
/// against a few random stabilizer transpositions.
pub fn from_semantic<F>(n: usize, frame: &SupportFrame, member: F) -> Result<FinSuppPredicate>
where
    F: Fn(&[Atom]) -> bool,
{
    if n == 0 {
        return Err(Error::ZeroArity);
    }
    let mu = frame.fresh(n);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed ^ ((n as u64) << 32) ^ frame.q() as u64);
    let window: Vec<Atom> = frame.fresh(n + 3);
    let mut cells = BTreeSet::new();
    for c in enumerate_cells(n, frame.q())? {
        let rep = representative(frame, &mu, &c)?;
        let inside = member(&rep);
        let moved: Vec<Atom> = rep.iter().copied().filter(|&a| !frame.contains(a)).collect();
        for _ in 0..SPOT_CHECKS_PER_CELL {
            // prefer transpositions that actually move the representative
            let a = if moved.is_empty() {
                window[rng.gen_range(0..window.len())]
            } else {
                moved[rng.gen_range(0..moved.len())]
            };
            let others: Vec<Atom> = window.iter().copied().filter(|&b| b != a).collect();
            let b = others[rng.gen_range(0..others.len())];
            let p = FinPerm::transposition(a, b)?;
            if member(&p.apply_tuple(&rep)) != inside {
                return Err(Error::NotSupported(format!(
                    "cell {c}: {p} changes membership of {rep:?}"
                )));
            }
        }
        if inside {
            cells.insert(c);
        }
    }
    Ok(FinSuppPredicate {
        arity: n,
        frame: frame.clone(),
        cells,
    })
}

/// The support-adequate partition of the atoms: `{ν₁}, …, {ν_q}` and the
/// complement of the frame.
pub fn adequate_unary(frame: &SupportFrame) -> Vec<FinSuppPredicate> {
    let q = frame.q();
    (1..=q + 1)
        .map(|j| {
            let k = if j <= q {
                SetPartition::empty()
            } else {
                SetPartition::new(vec![vec![1]]).expect("single block")
            };
            let cell = CellDescriptor::new(q, vec![j], k).expect("valid unary cell");
            FinSuppPredicate {
                arity: 1,
                frame: frame.clone(),
                cells: BTreeSet::from([cell]),
            }
        })
        .collect()
}

/// `β_{e₁} × ⋯ × β_{e_n}` for unary factors.
pub fn product(factors: &[FinSuppPredicate]) -> Result<FinSuppPredicate> {
    if factors.is_empty() {
        return Err(Error::ZeroArity);
    }
    let mut frame = SupportFrame::empty();
    for f in factors {
        if f.arity != 1 {
            return Err(Error::ArityMismatch {
                expected: 1,
                found: f.arity,
            });
        }
        frame = frame.union(&f.frame);
    }
    from_semantic(factors.len(), &frame, |t| {
        t.iter().zip(factors).all(|(&a, f)| f.contains(&[a]).expect("unary"))
    })
}

/// `α_{I,K}`: the `n`-tuples whose equality pattern on the positions in `K`
/// is exactly `K`.
pub fn pattern_predicate(k: &SetPartition, n: usize) -> Result<FinSuppPredicate> {
    if let Some(&index) = k.ground().iter().find(|&&i| i == 0 || i > n) {
        return Err(Error::BlockIndexOutOfRange { index, n });
    }
    from_semantic(n, &SupportFrame::empty(), |t| equality_pattern_matches(t, k))
}

/// Whether `t`'s equality pattern restricted to `⋃K` is `K`.
pub fn equality_pattern_matches(t: &[Atom], k: &SetPartition) -> bool {
    let blocks = k.blocks();
    let same_within = blocks
        .iter()
        .all(|b| b.iter().all(|&i| t[i - 1] == t[b[0] - 1]));
    let distinct_across = (0..blocks.len())
        .all(|v| (v + 1..blocks.len()).all(|w| t[blocks[v][0] - 1] != t[blocks[w][0] - 1]));
    same_within && distinct_across
}

/// `α_μ`: the finite set holding the canonical representative of every cell
/// of `frame`'s partition of `I^n`. Its frame is `P ∪ P_μ`.
pub fn choice_set_predicate(frame: &SupportFrame, mu: &[Atom], n: usize) -> Result<FinSuppPredicate> {
    if mu.len() != n {
        return Err(Error::InvalidFreshTuple(format!(
            "needs exactly {n} atoms, got {}",
            mu.len()
        )));
    }
    crate::partition::check_fresh_tuple(frame, mu, n)?;
    let reps = enumerate_cells(n, frame.q())?
        .iter()
        .map(|c| representative(frame, mu, c))
        .collect::<Result<Vec<_>>>()?;
    let target = frame.union(&SupportFrame::new(mu.iter().copied()));
    FinSuppPredicate::from_tuples(n, &reps)?.extend_support(&target)
}

/// Tests whether every permutation fixing `set` pointwise fixes `d`.
///
/// All transpositions within a window (the frame atoms outside `set` plus
/// three fresh atoms) are tried, followed by `trials` random transpositions
/// of atoms outside `set`.
pub fn stabilizer_superset_check<R: Rng>(d: &FinSuppPredicate, set: &AtomSet, trials: usize, rng: &mut R) -> bool {
    let fixes = |p: &FinPerm| d.apply_perm(p).same_extension(d);
    let avoid = set.union(&d.frame.to_set());
    let mut window: Vec<Atom> = d.frame.atoms().iter().copied().filter(|&a| !set.contains(a)).collect();
    window.extend(avoid.fresh(3));
    for i in 0..window.len() {
        for j in i + 1..window.len() {
            let p = FinPerm::transposition(window[i], window[j]).expect("distinct window atoms");
            if !fixes(&p) {
                return false;
            }
        }
    }
    let ceiling = avoid.iter().map(Atom::id).max().map_or(8, |m| m + 8);
    let pool: Vec<Atom> = (0..=ceiling).map(Atom).filter(|&a| !set.contains(a)).collect();
    for _ in 0..trials {
        let a = pool[rng.gen_range(0..pool.len())];
        let b = pool[rng.gen_range(0..pool.len())];
        if a == b {
            continue;
        }
        let p = FinPerm::transposition(a, b).expect("distinct");
        if !fixes(&p) {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atoms::tuple;
    use proptest::prelude::*;

    fn frame(ids: &[u32]) -> SupportFrame {
        SupportFrame::from_ids(ids)
    }

    fn cell(q: usize, e: &[usize], k: &[&[usize]]) -> CellDescriptor {
        let k = SetPartition::new(k.iter().map(|b| b.to_vec()).collect()).unwrap();
        CellDescriptor::new(q, e.to_vec(), k).unwrap()
    }

    fn singleton(a: u32) -> FinSuppPredicate {
        FinSuppPredicate::from_tuples(1, &[tuple(&[a])]).unwrap()
    }

    fn set(ids: &[u32]) -> AtomSet {
        tuple(ids).into_iter().collect()
    }

    #[test]
    fn contains_examples() {
        let d = FinSuppPredicate::new(1, frame(&[3]), [cell(1, &[1], &[])]).unwrap();
        assert!(d.contains(&tuple(&[3])).unwrap());
        assert!(!d.contains(&tuple(&[5])).unwrap());
        let co = FinSuppPredicate::new(1, frame(&[3]), [cell(1, &[2], &[&[1]])]).unwrap();
        assert!(!co.contains(&tuple(&[3])).unwrap());
        assert!(co.contains(&tuple(&[5])).unwrap());
        assert!(matches!(d.contains(&tuple(&[3, 3])), Err(Error::ArityMismatch { .. })));
    }

    #[test]
    fn apply_perm_examples() {
        let p = FinPerm::transposition(Atom(3), Atom(4)).unwrap();
        assert_eq!(singleton(3).apply_perm(&p), singleton(4));
        let stab = FinPerm::transposition(Atom(0), Atom(9)).unwrap();
        assert!(singleton(3).apply_perm(&stab).same_extension(&singleton(3)));
        let full = FinSuppPredicate::full(1);
        assert_eq!(full.apply_perm(&p), full);
    }

    #[test]
    fn extend_support_examples() {
        let full = FinSuppPredicate::full(1).extend_support(&frame(&[5])).unwrap();
        let expected = [cell(1, &[1], &[]), cell(1, &[2], &[&[1]])];
        assert_eq!(full.cells().iter().cloned().collect::<Vec<_>>(), expected);
        let s = singleton(3).extend_support(&frame(&[3, 8])).unwrap();
        assert_eq!(s.cells().iter().cloned().collect::<Vec<_>>(), [cell(2, &[1], &[])]);
        assert_eq!(singleton(3).extend_support(&frame(&[3])).unwrap(), singleton(3));
        assert!(matches!(
            singleton(3).extend_support(&frame(&[4])),
            Err(Error::NotASuperset { .. })
        ));
    }

    #[test]
    fn combine_examples() {
        let s = singleton(3);
        let co = complement(&s);
        let u = union(&s, &co).unwrap();
        assert_eq!(u.frame(), &frame(&[3]));
        assert!(u.same_extension(&FinSuppPredicate::full(1)));
        assert!(intersection(&s, &co).unwrap().is_empty());
        assert!(matches!(
            union(&s, &FinSuppPredicate::full(2)),
            Err(Error::ArityMismatch { .. })
        ));
    }

    #[test]
    fn from_semantic_examples() {
        let p = frame(&[7]);
        let b1 = from_semantic(1, &p, |t| t[0] == Atom(7)).unwrap();
        assert_eq!(b1.cells().iter().cloned().collect::<Vec<_>>(), [cell(1, &[1], &[])]);
        let diag = from_semantic(2, &SupportFrame::empty(), |t| t[0] == t[1]).unwrap();
        assert_eq!(diag.cells().iter().cloned().collect::<Vec<_>>(), [cell(0, &[1, 1], &[&[1, 2]])]);
        assert!(from_semantic(2, &p, |_| false).unwrap().is_empty());
    }

    #[test]
    fn from_semantic_detects_unsupported_membership() {
        // {0} is not supported by the empty frame
        let err = from_semantic(1, &SupportFrame::empty(), |t| t[0] == Atom(0));
        assert!(matches!(err, Err(Error::NotSupported(_))));
    }

    #[test]
    fn adequate_unary_examples() {
        let b = adequate_unary(&frame(&[7]));
        assert_eq!(b.len(), 2);
        assert_eq!(b[0], singleton(7).extend_support(&frame(&[7])).unwrap());
        assert!(b[1].same_extension(&complement(&singleton(7))));
        let b = adequate_unary(&SupportFrame::empty());
        assert_eq!(b, vec![FinSuppPredicate::full(1)]);
        let b = adequate_unary(&frame(&[2, 9]));
        assert_eq!(b.len(), 3);
        assert!(b[0].same_extension(&singleton(2)));
        assert!(b[1].same_extension(&singleton(9)));
        let rest = complement(&union(&singleton(2), &singleton(9)).unwrap());
        assert!(b[2].same_extension(&rest));
    }

    #[test]
    fn adequate_unary_blocks_partition_atoms() {
        let p = frame(&[1, 4, 6]);
        let blocks = adequate_unary(&p);
        for a in 0..12 {
            let hits = blocks.iter().filter(|b| b.contains(&[Atom(a)]).unwrap()).count();
            assert_eq!(hits, 1, "atom {a}");
        }
    }

    #[test]
    fn choice_set_examples() {
        let d = choice_set_predicate(&frame(&[7]), &tuple(&[0, 1]), 2).unwrap();
        let mut ext = d.finite_extension().unwrap();
        ext.sort();
        let mut expected = vec![
            tuple(&[7, 7]),
            tuple(&[7, 0]),
            tuple(&[0, 7]),
            tuple(&[0, 0]),
            tuple(&[0, 1]),
        ];
        expected.sort();
        assert_eq!(ext, expected);
        let d = choice_set_predicate(&SupportFrame::empty(), &tuple(&[0]), 1).unwrap();
        assert_eq!(d.finite_extension().unwrap(), vec![tuple(&[0])]);
        let d = choice_set_predicate(&frame(&[7]), &tuple(&[0]), 1).unwrap();
        let mut ext = d.finite_extension().unwrap();
        ext.sort();
        assert_eq!(ext, vec![tuple(&[0]), tuple(&[7])]);
        assert!(choice_set_predicate(&frame(&[7]), &tuple(&[7]), 1).is_err());
    }

    #[test]
    fn stabilizer_check_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let d = choice_set_predicate(&frame(&[7]), &tuple(&[0, 1]), 2).unwrap();
        assert!(stabilizer_superset_check(&d, &set(&[7, 0, 1]), 100, &mut rng));
        assert!(!stabilizer_superset_check(&singleton(3), &AtomSet::new(), 100, &mut rng));
        assert!(stabilizer_superset_check(&FinSuppPredicate::full(1), &AtomSet::new(), 100, &mut rng));
        // the choice set is not supported by P alone
        assert!(!stabilizer_superset_check(&d, &set(&[7]), 100, &mut rng));
    }

    #[test]
    fn section_of_diagonal() {
        let diag = from_semantic(2, &SupportFrame::empty(), |t| t[0] == t[1]).unwrap();
        assert!(diag.section(&tuple(&[4])).unwrap().same_extension(&singleton(4)));
    }

    #[test]
    fn product_and_pattern() {
        let b = adequate_unary(&frame(&[3]));
        let prod = product(&[b[0].clone(), b[1].clone()]).unwrap();
        assert!(prod.contains(&tuple(&[3, 0])).unwrap());
        assert!(!prod.contains(&tuple(&[3, 3])).unwrap());
        assert!(!prod.contains(&tuple(&[0, 3])).unwrap());
        let k = SetPartition::new(vec![vec![1, 3], vec![2]]).unwrap();
        let alpha = pattern_predicate(&k, 3).unwrap();
        assert!(alpha.contains(&tuple(&[5, 6, 5])).unwrap());
        assert!(!alpha.contains(&tuple(&[5, 5, 5])).unwrap());
        assert!(pattern_predicate(&k, 2).is_err());
    }

    #[test]
    fn json_shape() {
        let d = singleton(3);
        let v = serde_json::to_value(&d).unwrap();
        assert_eq!(v, serde_json::json!({"arity": 1, "frame": [3], "cells": ["e=[1];K=[]"]}));
        let back: FinSuppPredicate = serde_json::from_value(v).unwrap();
        assert_eq!(back, d);
    }

    fn predicate_strategy() -> impl Strategy<Value = FinSuppPredicate> {
        (1usize..=2, prop::collection::btree_set(0u32..10, 0..3), any::<u64>()).prop_map(|(n, fr, bits)| {
            let frame = SupportFrame::new(fr.into_iter().map(Atom));
            let cells = enumerate_cells(n, frame.q()).unwrap();
            let chosen = cells.into_iter().enumerate().filter(|(i, _)| bits >> (i % 64) & 1 == 1).map(|(_, c)| c);
            FinSuppPredicate::new(n, frame, chosen).unwrap()
        })
    }

    proptest! {
        #[test]
        fn membership_laws(
            d in predicate_strategy(),
            other in predicate_strategy(),
            t in prop::collection::vec(0u32..14, 2),
            swaps in prop::collection::vec((0u32..14, 0u32..14), 0..4),
        ) {
            let t: Vec<Atom> = t[..d.arity()].iter().copied().map(Atom).collect();
            let mut p = FinPerm::identity();
            let mut stab = FinPerm::identity();
            for (a, b) in swaps {
                if a == b { continue; }
                let tr = FinPerm::transposition(Atom(a), Atom(b)).unwrap();
                p = tr.compose(&p);
                if !d.frame().contains(Atom(a)) && !d.frame().contains(Atom(b)) {
                    stab = tr.compose(&stab);
                }
            }
            let inside = d.contains(&t).unwrap();
            prop_assert_eq!(d.contains(&stab.apply_tuple(&t)).unwrap(), inside);
            prop_assert_eq!(d.apply_perm(&p).contains(&p.apply_tuple(&t)).unwrap(), inside);
            let bigger = d.frame().union(&SupportFrame::from_ids(&[11, 12]));
            prop_assert_eq!(d.extend_support(&bigger).unwrap().contains(&t).unwrap(), inside);
            prop_assert_eq!(complement(&d).contains(&t).unwrap(), !inside);
            if other.arity() == d.arity() {
                let o = other.contains(&t).unwrap();
                prop_assert_eq!(union(&d, &other).unwrap().contains(&t).unwrap(), inside || o);
                prop_assert_eq!(intersection(&d, &other).unwrap().contains(&t).unwrap(), inside && o);
            }
            let reified = from_semantic(d.arity(), d.frame(), |u| d.contains(u).unwrap()).unwrap();
            prop_assert_eq!(&reified, &d);
        }
    }
}

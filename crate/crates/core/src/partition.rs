//! Set partitions of index sets and the cell system of `I^n` relative to a
//! finite support.
//!
//! A cell `(e, K)` is determined by two pieces of data. The index vector `e`
//! says, for each component, which support atom it equals (`1..=q`) or that
//! it is fresh (`q + 1`). The partition `K` of the fresh positions records
//! which fresh components are equal to each other. Every tuple lies in
//! exactly one cell, and permutations fixing the support map each cell onto
//! itself.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::atoms::{Atom, AtomSet};
use crate::error::{Error, Result};

/// A partition of a finite set of positive indices.
///
/// Canonical form: every block is sorted ascending and blocks are sorted by
/// their minimum, so structural equality is set equality.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SetPartition {
    blocks: Vec<Vec<usize>>,
}

impl SetPartition {
    /// The empty partition, the only partition of the empty set.
    pub fn empty() -> Self {
        Self::default()
    }

    /// Builds a partition from arbitrary blocks; `None` if a block is empty
    /// or two blocks overlap.
    pub fn new(blocks: Vec<Vec<usize>>) -> Option<Self> {
        let mut blocks: Vec<Vec<usize>> = blocks
            .into_iter()
            .map(|mut b| {
                b.sort_unstable();
                b
            })
            .collect();
        if blocks.iter().any(|b| b.is_empty() || b.windows(2).any(|w| w[0] == w[1])) {
            return None;
        }
        blocks.sort_by_key(|b| b[0]);
        let mut all: Vec<usize> = blocks.iter().flatten().copied().collect();
        let total = all.len();
        all.sort_unstable();
        all.dedup();
        if all.len() != total {
            return None;
        }
        Some(SetPartition { blocks })
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Number of blocks.
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    /// Blocks in canonical order (ascending minima).
    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    /// The partitioned set, ascending.
    pub fn ground(&self) -> Vec<usize> {
        let mut g: Vec<usize> = self.blocks.iter().flatten().copied().collect();
        g.sort_unstable();
        g
    }

    /// 0-based position of the block containing `index`.
    pub fn block_of(&self, index: usize) -> Option<usize> {
        self.blocks.iter().position(|b| b.contains(&index))
    }
}

impl fmt::Display for SetPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, b) in self.blocks.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "[")?;
            for (j, x) in b.iter().enumerate() {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{x}")?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

/// All partitions of `idx`, each exactly once, in restricted-growth-string
/// order. The empty index set has exactly one partition, the empty one.
pub fn enumerate_partitions(idx: &[usize]) -> Vec<SetPartition> {
    let mut elems = idx.to_vec();
    elems.sort_unstable();
    elems.dedup();
    let mut out = Vec::new();
    let mut growth = vec![0usize; elems.len()];
    rgs_recurse(&elems, &mut growth, 0, 0, &mut out);
    out
}

fn rgs_recurse(
    elems: &[usize],
    growth: &mut [usize],
    pos: usize,
    used: usize,
    out: &mut Vec<SetPartition>,
) {
    if pos == elems.len() {
        let mut blocks = vec![Vec::new(); used];
        for (i, &g) in growth.iter().enumerate() {
            blocks[g].push(elems[i]);
        }
        out.push(SetPartition { blocks });
        return;
    }
    for g in 0..=used {
        growth[pos] = g;
        rgs_recurse(elems, growth, pos + 1, used.max(g + 1), out);
    }
}

/// The blocks of a non-empty partition ordered by ascending minimum.
pub fn ordered_blocks(k: &SetPartition) -> Result<Vec<Vec<usize>>> {
    if k.is_empty() {
        return Err(Error::EmptyPartition);
    }
    Ok(k.blocks.clone())
}

/// The finite support `P = (ν₁, …, ν_q)`, kept strictly ascending.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SupportFrame {
    atoms: Vec<Atom>,
}

impl SupportFrame {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn new<I: IntoIterator<Item = Atom>>(atoms: I) -> Self {
        let mut atoms: Vec<Atom> = atoms.into_iter().collect();
        atoms.sort_unstable();
        atoms.dedup();
        SupportFrame { atoms }
    }

    pub fn from_ids(ids: &[u32]) -> Self {
        Self::new(ids.iter().copied().map(Atom))
    }

    pub fn q(&self) -> usize {
        self.atoms.len()
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    /// `ν_j` for a 1-based `j`.
    pub fn nu(&self, j: usize) -> Atom {
        self.atoms[j - 1]
    }

    /// 1-based position of `a` in the frame.
    pub fn position(&self, a: Atom) -> Option<usize> {
        self.atoms.binary_search(&a).ok().map(|i| i + 1)
    }

    pub fn contains(&self, a: Atom) -> bool {
        self.atoms.binary_search(&a).is_ok()
    }

    pub fn to_set(&self) -> AtomSet {
        self.atoms.iter().collect()
    }

    pub fn union(&self, other: &SupportFrame) -> SupportFrame {
        Self::new(self.atoms.iter().chain(other.atoms.iter()).copied())
    }

    pub fn is_subset(&self, other: &SupportFrame) -> bool {
        self.atoms.iter().all(|&a| other.contains(a))
    }

    /// The `count` least atoms outside the frame.
    pub fn fresh(&self, count: usize) -> Vec<Atom> {
        crate::atoms::fresh_atoms(|a| self.contains(a), count)
    }
}

impl From<&AtomSet> for SupportFrame {
    fn from(s: &AtomSet) -> Self {
        SupportFrame::new(s.iter())
    }
}

impl fmt::Display for SupportFrame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, a) in self.atoms.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ")")
    }
}

/// One cell `(e, K)` of the partition of `I^n` induced by a support of size
/// `q`. `e` has entries in `1..=q+1`; `K` partitions the 1-based positions
/// `j` with `e_j = q + 1`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CellDescriptor {
    q: usize,
    e: Vec<usize>,
    k: SetPartition,
}

impl CellDescriptor {
    /// Checked constructor.
    pub fn new(q: usize, e: Vec<usize>, k: SetPartition) -> Result<Self> {
        let cell = CellDescriptor { q, e, k };
        if cell.e.is_empty()
            || cell.e.iter().any(|&x| x == 0 || x > q + 1)
            || cell.k.ground() != cell.fresh_positions()
        {
            return Err(Error::InvalidCell {
                cell: cell.to_string(),
                n: cell.e.len(),
                q,
            });
        }
        Ok(cell)
    }

    pub fn n(&self) -> usize {
        self.e.len()
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn e(&self) -> &[usize] {
        &self.e
    }

    pub fn k(&self) -> &SetPartition {
        &self.k
    }

    /// `idx_e`: the 1-based positions holding fresh atoms.
    pub fn fresh_positions(&self) -> Vec<usize> {
        (1..=self.e.len()).filter(|&j| self.e[j - 1] == self.q + 1).collect()
    }

    pub fn is_fresh(&self, j: usize) -> bool {
        self.e[j - 1] == self.q + 1
    }

    /// Whether the cell holds a single tuple (no fresh positions).
    pub fn is_singleton(&self) -> bool {
        self.k.is_empty()
    }

    pub fn check(&self, n: usize, q: usize) -> Result<()> {
        if self.n() != n || self.q != q {
            return Err(Error::InvalidCell {
                cell: self.to_string(),
                n,
                q,
            });
        }
        Ok(())
    }

    /// Parses the report form `e=[..];K=[[..],..]` for a support of size `q`.
    pub fn parse(s: &str, q: usize) -> Result<Self> {
        let bad = || Error::InvalidCell {
            cell: s.to_string(),
            n: 0,
            q,
        };
        let (e_part, k_part) = s.split_once(';').ok_or_else(bad)?;
        let e_json = e_part.strip_prefix("e=").ok_or_else(bad)?;
        let k_json = k_part.strip_prefix("K=").ok_or_else(bad)?;
        let e: Vec<usize> = serde_json::from_str(e_json).map_err(|_| bad())?;
        let k: Vec<Vec<usize>> = serde_json::from_str(k_json).map_err(|_| bad())?;
        let k = SetPartition::new(k).ok_or_else(bad)?;
        CellDescriptor::new(q, e, k)
    }
}

impl fmt::Display for CellDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e=[")?;
        for (i, x) in self.e.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, "];K={}", self.k)
    }
}

/// All cells for arity `n` and support size `q`: lexicographic in `e`, then
/// restricted-growth order of `K`.
pub fn enumerate_cells(n: usize, q: usize) -> Result<Vec<CellDescriptor>> {
    if n == 0 {
        return Err(Error::ZeroArity);
    }
    let mut out = Vec::new();
    let mut e = vec![1usize; n];
    loop {
        let idx: Vec<usize> = (1..=n).filter(|&j| e[j - 1] == q + 1).collect();
        for k in enumerate_partitions(&idx) {
            out.push(CellDescriptor { q, e: e.clone(), k });
        }
        // odometer increment, last position fastest
        let mut pos = n;
        loop {
            if pos == 0 {
                return Ok(out);
            }
            pos -= 1;
            if e[pos] < q + 1 {
                e[pos] += 1;
                break;
            }
            e[pos] = 1;
        }
    }
}

/// The unique cell of `frame`'s partition of `I^n` containing `t`.
pub fn classify(t: &[Atom], frame: &SupportFrame) -> Result<CellDescriptor> {
    if t.is_empty() {
        return Err(Error::ZeroArity);
    }
    let q = frame.q();
    let mut e = Vec::with_capacity(t.len());
    let mut groups: BTreeMap<Atom, Vec<usize>> = BTreeMap::new();
    for (j, &a) in t.iter().enumerate() {
        match frame.position(a) {
            Some(p) => e.push(p),
            None => {
                e.push(q + 1);
                groups.entry(a).or_default().push(j + 1);
            }
        }
    }
    let mut blocks: Vec<Vec<usize>> = groups.into_values().collect();
    blocks.sort_by_key(|b| b[0]);
    Ok(CellDescriptor {
        q,
        e,
        k: SetPartition { blocks },
    })
}

/// Checks that `mu` can serve as the fresh tuple for cells of `frame` with
/// up to `needed` blocks.
pub(crate) fn check_fresh_tuple(frame: &SupportFrame, mu: &[Atom], needed: usize) -> Result<()> {
    if mu.len() < needed {
        return Err(Error::InvalidFreshTuple(format!(
            "needs {needed} atoms, got {}",
            mu.len()
        )));
    }
    for (i, &a) in mu.iter().enumerate() {
        if frame.contains(a) {
            return Err(Error::InvalidFreshTuple(format!("{a} lies in the support")));
        }
        if mu[..i].contains(&a) {
            return Err(Error::InvalidFreshTuple(format!("{a} repeats")));
        }
    }
    Ok(())
}

/// The canonical representative `ξ_{μ,e,K}` of `cell`: support positions get
/// `ν_{e_j}`, positions in the `i`-th ordered block of `K` get `μ_i`.
pub fn representative(frame: &SupportFrame, mu: &[Atom], cell: &CellDescriptor) -> Result<Vec<Atom>> {
    if cell.q != frame.q() {
        return Err(Error::InvalidCell {
            cell: cell.to_string(),
            n: cell.n(),
            q: frame.q(),
        });
    }
    check_fresh_tuple(frame, mu, cell.k.len())?;
    let mut t = Vec::with_capacity(cell.n());
    for j in 1..=cell.n() {
        let ej = cell.e[j - 1];
        if ej <= frame.q() {
            t.push(frame.nu(ej));
        } else {
            let b = cell.k.block_of(j).expect("fresh position lies in a block");
            t.push(mu[b]);
        }
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atoms::{tuple, FinPerm};
    use proptest::prelude::*;

    fn part(blocks: &[&[usize]]) -> SetPartition {
        SetPartition::new(blocks.iter().map(|b| b.to_vec()).collect()).unwrap()
    }

    fn cell(q: usize, e: &[usize], k: &[&[usize]]) -> CellDescriptor {
        CellDescriptor::new(q, e.to_vec(), part(k)).unwrap()
    }

    /// Independent count via the recurrence B_{n+1} = Σ C(n,k) B_k.
    fn bell_by_recurrence(upto: usize) -> Vec<usize> {
        let mut bell = vec![1usize];
        for n in 0..upto {
            let mut binom = 1usize;
            let mut next = 0;
            for k in 0..=n {
                next += binom * bell[k];
                binom = binom * (n - k) / (k + 1);
            }
            bell.push(next);
        }
        bell
    }

    fn binomial(n: usize, k: usize) -> usize {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn partitions_of_small_sets() {
        assert_eq!(enumerate_partitions(&[]), vec![SetPartition::empty()]);
        assert_eq!(enumerate_partitions(&[7]), vec![part(&[&[7]])]);
        let three = enumerate_partitions(&[1, 2, 3]);
        assert_eq!(three.len(), 5);
        let mut dedup = three.clone();
        dedup.sort();
        dedup.dedup();
        assert_eq!(dedup.len(), 5);
    }

    #[test]
    fn partition_counts_match_bell_recurrence() {
        let bell = bell_by_recurrence(6);
        for n in 0..=6 {
            let idx: Vec<usize> = (1..=n).collect();
            assert_eq!(enumerate_partitions(&idx).len(), bell[n], "n = {n}");
        }
    }

    #[test]
    fn ordered_blocks_sorts_by_minimum() {
        let k = SetPartition::new(vec![vec![5, 2], vec![1, 3]]).unwrap();
        assert_eq!(ordered_blocks(&k).unwrap(), vec![vec![1, 3], vec![2, 5]]);
        assert_eq!(ordered_blocks(&part(&[&[4]])).unwrap(), vec![vec![4]]);
        let k = SetPartition::new(vec![vec![2], vec![1], vec![3]]).unwrap();
        assert_eq!(ordered_blocks(&k).unwrap(), vec![vec![1], vec![2], vec![3]]);
        assert_eq!(ordered_blocks(&SetPartition::empty()), Err(Error::EmptyPartition));
    }

    #[test]
    fn invalid_partitions_rejected() {
        assert!(SetPartition::new(vec![vec![1, 2], vec![2]]).is_none());
        assert!(SetPartition::new(vec![vec![]]).is_none());
    }

    #[test]
    fn cell_enumeration_examples() {
        assert_eq!(enumerate_cells(1, 0).unwrap(), vec![cell(0, &[1], &[&[1]])]);
        assert_eq!(enumerate_cells(2, 1).unwrap().len(), 5);
        let two = enumerate_cells(2, 0).unwrap();
        assert_eq!(two, vec![cell(0, &[1, 1], &[&[1, 2]]), cell(0, &[1, 1], &[&[1], &[2]])]);
        assert_eq!(enumerate_cells(0, 2), Err(Error::ZeroArity));
    }

    #[test]
    fn cell_counts_match_formula() {
        let bell = bell_by_recurrence(5);
        for n in 1..=4 {
            for q in 0usize..=3 {
                let expected: usize = (0..=n)
                    .map(|k| binomial(n, k) * q.pow((n - k) as u32) * bell[k])
                    .sum();
                let cells = enumerate_cells(n, q).unwrap();
                assert_eq!(cells.len(), expected, "n={n} q={q}");
                let mut dedup = cells.clone();
                dedup.sort();
                dedup.dedup();
                assert_eq!(dedup.len(), cells.len());
            }
        }
    }

    #[test]
    fn classify_examples() {
        let p = SupportFrame::from_ids(&[7]);
        assert_eq!(classify(&tuple(&[7, 7]), &p).unwrap(), cell(1, &[1, 1], &[]));
        assert_eq!(classify(&tuple(&[9, 9]), &p).unwrap(), cell(1, &[2, 2], &[&[1, 2]]));
        assert_eq!(classify(&tuple(&[7, 9]), &p).unwrap(), cell(1, &[1, 2], &[&[2]]));
    }

    #[test]
    fn representative_examples() {
        let p = SupportFrame::from_ids(&[7]);
        let mu = tuple(&[0, 1]);
        let rep = |c| representative(&p, &mu, &c).unwrap();
        assert_eq!(rep(cell(1, &[2, 2], &[&[1], &[2]])), tuple(&[0, 1]));
        assert_eq!(rep(cell(1, &[1, 2], &[&[2]])), tuple(&[7, 0]));
        assert_eq!(rep(cell(1, &[2, 2], &[&[1, 2]])), tuple(&[0, 0]));
    }

    #[test]
    fn representative_rejects_bad_mu() {
        let p = SupportFrame::from_ids(&[7]);
        let c = cell(1, &[2, 2], &[&[1], &[2]]);
        assert!(matches!(
            representative(&p, &tuple(&[0]), &c),
            Err(Error::InvalidFreshTuple(_))
        ));
        assert!(matches!(
            representative(&p, &tuple(&[7, 1]), &c),
            Err(Error::InvalidFreshTuple(_))
        ));
        assert!(matches!(
            representative(&p, &tuple(&[1, 1]), &c),
            Err(Error::InvalidFreshTuple(_))
        ));
    }

    #[test]
    fn cell_text_round_trip() {
        let c = cell(2, &[3, 1, 3], &[&[1], &[3]]);
        assert_eq!(c.to_string(), "e=[3,1,3];K=[[1],[3]]");
        assert_eq!(CellDescriptor::parse(&c.to_string(), 2).unwrap(), c);
        assert!(CellDescriptor::parse("e=[3,1];K=[]", 2).is_err());
    }

    #[test]
    fn round_trip_representatives_are_distinct() {
        for n in 1..=3 {
            for q in 0..=3 {
                let p = SupportFrame::new((0..q as u32).map(|i| Atom(3 * i + 2)));
                let mu = p.fresh(n);
                let cells = enumerate_cells(n, q).unwrap();
                let mut reps = Vec::new();
                for c in &cells {
                    let r = representative(&p, &mu, c).unwrap();
                    assert_eq!(&classify(&r, &p).unwrap(), c);
                    reps.push(r);
                }
                reps.sort();
                reps.dedup();
                assert_eq!(reps.len(), cells.len());
            }
        }
    }

    proptest! {
        #[test]
        fn classify_is_stabilizer_invariant(
            t in prop::collection::vec(0u32..20, 1..5),
            frame in prop::collection::btree_set(0u32..20, 0..4),
            swaps in prop::collection::vec((0u32..25, 0u32..25), 0..5),
        ) {
            let t: Vec<Atom> = t.into_iter().map(Atom).collect();
            let frame = SupportFrame::new(frame.into_iter().map(Atom));
            let mut p = FinPerm::identity();
            for (a, b) in swaps {
                let (a, b) = (Atom(a), Atom(b));
                if a != b && !frame.contains(a) && !frame.contains(b) {
                    p = FinPerm::transposition(a, b).unwrap().compose(&p);
                }
            }
            prop_assert!(p.fixes_pointwise(&frame.to_set()));
            let c = classify(&t, &frame).unwrap();
            prop_assert_eq!(classify(&p.apply_tuple(&t), &frame).unwrap(), c.clone());
            c.check(t.len(), frame.q()).unwrap();
            prop_assert!(enumerate_cells(t.len(), frame.q()).unwrap().contains(&c));
        }
    }
}

//! The transporter permutation `π_ξ`, mapping a cell representative onto an
//! arbitrary member `ξ` of the same cell while fixing the frame.

use crate::atoms::{Atom, FinPerm};
use crate::error::{Error, Result};
use crate::partition::{classify, ordered_blocks, representative, CellDescriptor, SupportFrame};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransportPlan {
    pub zeta: Vec<Atom>,
    pub perm: FinPerm,
    pub cell: CellDescriptor,
    pub target: Vec<Atom>,
}

impl TransportPlan {
    /// `s_ξ`, the length of the ζ-sequence.
    pub fn s(&self) -> usize {
        self.zeta.len()
    }
}

/// Builds `π_ξ` by the two-stage ζ recursion.
///
/// `ζ_1..ζ_|K|` are `μ_1..μ_|K|`; the later entries are the fresh values of
/// `ξ` not yet listed, in index order. `ζ_j` for `j ≤ |K|` is sent to the
/// value of `ξ` on the j-th block, and every later `ζ_j` to the least `μ_t`
/// not yet used as an image.
pub fn transport_perm(frame: &SupportFrame, mu: &[Atom], cell: &CellDescriptor, xi: &[Atom]) -> Result<TransportPlan> {
    let rep = representative(frame, mu, cell)?;
    if classify(xi, frame)? != *cell {
        return Err(Error::TupleNotInCell);
    }
    if cell.k().is_empty() {
        return Ok(TransportPlan {
            zeta: Vec::new(),
            perm: FinPerm::identity(),
            cell: cell.clone(),
            target: xi.to_vec(),
        });
    }
    let blocks = ordered_blocks(cell.k())?;
    let l = blocks.len();
    let mut zeta: Vec<Atom> = mu[..l].to_vec();
    let mut image: Vec<Atom> = blocks.iter().map(|b| xi[b[0] - 1]).collect();
    for j in cell.fresh_positions() {
        let v = xi[j - 1];
        if !zeta.contains(&v) {
            zeta.push(v);
        }
    }
    for _ in l..zeta.len() {
        let next = mu[..l]
            .iter()
            .copied()
            .find(|m| !image.contains(m))
            .expect("ζ and its image have the same size");
        image.push(next);
    }
    let perm = FinPerm::from_map(zeta.iter().copied().zip(image.iter().copied()))
        .expect("ζ recursion yields a bijection");
    debug_assert_eq!(perm.apply_tuple(&rep), xi);
    Ok(TransportPlan {
        zeta,
        perm,
        cell: cell.clone(),
        target: xi.to_vec(),
    })
}

//! Replay of the choice construction: from a formula `H(x, D)` with a true
//! antecedent `∀x∃D H`, build a selector `σ` cell by cell and check that it
//! witnesses `∃S∀x∃D(∀y(Dy ↔ Sxy) ∧ H)`.
//!
//! The pipeline is [`compute_support`] → [`build_choice_table`] →
//! [`build_sigma`] → [`verify_choice_instance`]; [`replay`] runs all four.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::atoms::{Atom, AtomSet};
use crate::error::{Error, Result};
use crate::eval::{enumerate_predicates, eval_nominal, Bounds, Evaluator, Hint, TriBool};
use crate::logic::{build_choice_instance, d_var, parse, s_var, xs, Assignment, Formula, PredVar};
use crate::nominal::{from_semantic, stabilizer_superset_check, union, FinSuppPredicate};
use crate::partition::{classify, enumerate_cells, representative, CellDescriptor, SupportFrame};
use crate::transporter::transport_perm;

mod refute;
mod suites;

pub use refute::*;
pub use suites::*;

const STABILIZER_TRIALS: usize = 200;

/// Union of the frames of the values `f` gives to the free variables of `h`.
pub fn compute_support(h: &Formula, f: &Assignment) -> SupportFrame {
    let mut atoms = AtomSet::new();
    for v in h.free_ind() {
        if let Some(&a) = f.ind.get(&v) {
            atoms.insert(a);
        }
    }
    for p in h.free_pred() {
        if let Some(d) = f.pred.get(&p) {
            atoms.extend(d.frame().atoms().iter().copied());
        }
    }
    SupportFrame::new(atoms)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChoiceEntry {
    pub cell: CellDescriptor,
    pub representative: Vec<Atom>,
    pub witness: FinSuppPredicate,
}

impl ChoiceEntry {
    pub fn witness_frame(&self) -> &SupportFrame {
        self.witness.frame()
    }
}

/// One chosen witness per cell of `I^n` relative to `frame`.
#[derive(Debug, Clone)]
pub struct ChoiceTable {
    pub h: Formula,
    pub params: Assignment,
    pub n: usize,
    pub m: usize,
    pub frame: SupportFrame,
    pub mu: Vec<Atom>,
    pub entries: Vec<ChoiceEntry>,
}

impl ChoiceTable {
    /// `P₀`, the union of the witness frames.
    pub fn p0(&self) -> SupportFrame {
        self.entries
            .iter()
            .fold(SupportFrame::empty(), |acc, e| acc.union(e.witness_frame()))
    }

    pub fn frame_with_mu(&self) -> SupportFrame {
        self.frame.union(&SupportFrame::new(self.mu.iter().copied()))
    }

    /// `P ∪ P_μ ∪ P₀`.
    pub fn closure(&self) -> AtomSet {
        self.frame_with_mu().union(&self.p0()).to_set()
    }

    pub fn entry(&self, cell: &CellDescriptor) -> Option<&ChoiceEntry> {
        self.entries.iter().find(|e| &e.cell == cell)
    }
}

/// Assignment `f` extended by `x ↦ xi` and `D ↦ d`.
pub(crate) fn at_point(f: &Assignment, n: usize, xi: &[Atom], d: &FinSuppPredicate) -> Result<Assignment> {
    let mut a = f.clone().with_pred(&d_var(d.arity()), d.clone())?;
    a.bind_tuple(&xs(n), xi);
    Ok(a)
}

/// Picks, for every cell, the first predicate in enumeration order that
/// satisfies `H` at the cell's representative.
pub fn build_choice_table(
    h: &Formula,
    f: &Assignment,
    n: usize,
    m: usize,
    frame: &SupportFrame,
    b: Bounds,
) -> Result<ChoiceTable> {
    let inst = build_choice_instance(h, n, m)?;
    if eval_nominal(&inst.antecedent, f, b)?.is_false() {
        return Err(Error::AntecedentFails);
    }
    let mu = frame.fresh(n);
    let search = frame.union(&SupportFrame::new(mu.iter().copied())).to_set();
    let ev = Evaluator::new(b);
    let mut entries = Vec::new();
    for cell in enumerate_cells(n, frame.q())? {
        let rep = representative(frame, &mu, &cell)?;
        let mut found = None;
        for d in enumerate_predicates(&search, m, b) {
            if ev.eval(h, &at_point(f, n, &rep, &d)?)?.is_true() {
                found = Some(d);
                break;
            }
        }
        let witness = found.ok_or_else(|| Error::NoWitness(cell.to_string()))?;
        entries.push(ChoiceEntry {
            cell,
            representative: rep,
            witness,
        });
    }
    Ok(ChoiceTable {
        h: h.clone(),
        params: f.clone(),
        n,
        m,
        frame: frame.clone(),
        mu,
        entries,
    })
}

#[derive(Debug, Clone)]
pub struct SigmaPiece {
    pub cell: CellDescriptor,
    /// The witness graph over the representative alone.
    pub base: FinSuppPredicate,
    /// The witness transported to every member of the cell.
    pub transported: FinSuppPredicate,
}

#[derive(Debug, Clone)]
pub struct Sigma {
    pub sigma0: FinSuppPredicate,
    pub pieces: Vec<SigmaPiece>,
    pub sigma: FinSuppPredicate,
}

pub fn build_sigma(table: &ChoiceTable) -> Result<Sigma> {
    let (n, m) = (table.n, table.m);
    let pm = table.frame_with_mu();
    let mut sigma0 = FinSuppPredicate::empty(n + m);
    let mut sigma = FinSuppPredicate::empty(n + m);
    let mut pieces = Vec::new();
    for entry in &table.entries {
        let frame = pm.union(entry.witness_frame());
        let rep = &entry.representative;
        let delta = &entry.witness;
        let base = from_semantic(n + m, &frame, |t| {
            t[..n] == rep[..] && delta.contains(&t[n..]).expect("arity m")
        })?;
        let transported = from_semantic(n + m, &frame, |t| {
            let xi = &t[..n];
            if classify(xi, &table.frame).ok().as_ref() != Some(&entry.cell) {
                return false;
            }
            let plan = transport_perm(&table.frame, &table.mu, &entry.cell, xi).expect("xi lies in the cell");
            delta.apply_perm(&plan.perm).contains(&t[n..]).expect("arity m")
        })?;
        sigma0 = union(&sigma0, &base)?;
        sigma = union(&sigma, &transported)?;
        pieces.push(SigmaPiece {
            cell: entry.cell.clone(),
            base,
            transported,
        });
    }
    Ok(Sigma { sigma0, pieces, sigma })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Verdicts {
    pub antecedent: TriBool,
    pub consequent: TriBool,
    pub stabilizer: bool,
}

impl Verdicts {
    pub fn passed(&self) -> bool {
        !self.antecedent.is_false() && self.consequent.is_true() && self.stabilizer
    }
}

/// Evaluates the consequent with `S ↦ sigma`, answering the inner `∃D` with
/// the section of `sigma` at the current `x`, and checks that `sigma` is
/// fixed by every permutation fixing `support`.
pub fn verify_choice_instance(
    h: &Formula,
    f: &Assignment,
    n: usize,
    m: usize,
    sigma: &FinSuppPredicate,
    support: &AtomSet,
    b: Bounds,
    seed: u64,
) -> Result<Verdicts> {
    let inst = build_choice_instance(h, n, m)?;
    let antecedent = eval_nominal(&inst.antecedent, f, b)?;
    let d = d_var(m);
    let x = xs(n);
    let hint = |p: &PredVar, env: &Assignment| -> Option<Hint> {
        if *p != d || env.pred.contains_key(p) {
            return None;
        }
        let at: Option<Vec<Atom>> = x.iter().map(|v| env.ind.get(v).copied()).collect();
        Some(Hint {
            value: sigma.section(&at?).ok()?,
            forced: true,
        })
    };
    let with_sigma = f.clone().with_pred(&s_var(n, m), sigma.clone())?;
    let consequent = Evaluator::new(b).with_hint(&hint).eval(&inst.consequent_body, &with_sigma)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let stabilizer = stabilizer_superset_check(sigma, support, STABILIZER_TRIALS, &mut rng);
    Ok(Verdicts {
        antecedent,
        consequent,
        stabilizer,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct CellReport {
    pub cell: String,
    pub representative: Vec<Atom>,
    pub witness: FinSuppPredicate,
    pub sigma0: FinSuppPredicate,
    pub sigma: FinSuppPredicate,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReplayReport {
    pub h: String,
    pub n: usize,
    pub m: usize,
    pub bounds: Bounds,
    /// How a permutation acts on a predicate: `image` means `π·δ = {π(t) : t ∈ δ}`.
    pub action: &'static str,
    pub support: SupportFrame,
    pub mu: Vec<Atom>,
    pub p0: SupportFrame,
    pub cells: Vec<CellReport>,
    pub sigma0: FinSuppPredicate,
    pub sigma: FinSuppPredicate,
    pub sabotaged: bool,
    pub verdicts: Verdicts,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub millis: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReplayOptions {
    pub bounds: Bounds,
    pub seed: u64,
    /// Replace `σ` by the empty predicate before verification.
    pub sabotage: bool,
    pub timings: bool,
}

impl Default for ReplayOptions {
    fn default() -> Self {
        ReplayOptions {
            bounds: Bounds::default(),
            seed: 42,
            sabotage: false,
            timings: false,
        }
    }
}

pub fn replay(h: &Formula, f: &Assignment, n: usize, m: usize, opts: ReplayOptions) -> Result<ReplayReport> {
    let start = Instant::now();
    let frame = compute_support(h, f);
    let table = build_choice_table(h, f, n, m, &frame, opts.bounds)?;
    let built = build_sigma(&table)?;
    let sigma = if opts.sabotage {
        FinSuppPredicate::empty(n + m)
    } else {
        built.sigma.clone()
    };
    let support = table.closure();
    let verdicts = verify_choice_instance(h, f, n, m, &sigma, &support, opts.bounds, opts.seed)?;
    let cells = table
        .entries
        .iter()
        .zip(&built.pieces)
        .map(|(e, p)| CellReport {
            cell: e.cell.to_string(),
            representative: e.representative.clone(),
            witness: e.witness.clone(),
            sigma0: p.base.clone(),
            sigma: p.transported.clone(),
        })
        .collect();
    Ok(ReplayReport {
        h: h.to_string(),
        n,
        m,
        bounds: opts.bounds,
        action: "image",
        support: frame,
        mu: table.mu.clone(),
        p0: table.p0(),
        cells,
        sigma0: built.sigma0,
        sigma,
        sabotaged: opts.sabotage,
        passed: verdicts.passed(),
        verdicts,
        millis: opts.timings.then(|| start.elapsed().as_millis() as u64),
    })
}

/// A shipped test formula `H(x, D)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CatalogEntry {
    pub key: &'static str,
    pub text: &'static str,
    pub n: usize,
    pub m: usize,
}

pub const CATALOG: [CatalogEntry; 5] = [
    CatalogEntry { key: "dx", text: "D1 x1", n: 1, m: 1 },
    CatalogEntry { key: "not-dx", text: "~D1 x1", n: 1, m: 1 },
    CatalogEntry { key: "singleton", text: "all y1 (D1 y1 <-> y1 = x1)", n: 1, m: 1 },
    CatalogEntry { key: "other", text: "ex y1 (D1 y1 & ~y1 = x1)", n: 1, m: 1 },
    CatalogEntry { key: "dx-or-eq", text: "(D1 x1 | x1 = x2)", n: 2, m: 1 },
];

impl CatalogEntry {
    pub fn formula(&self) -> Formula {
        parse(self.text).expect("catalog formulas parse")
    }
}

/// Looks `s` up as a catalog key, falling back to parsing it as a formula.
pub fn resolve_formula(s: &str) -> Result<(Formula, Option<CatalogEntry>)> {
    match CATALOG.iter().find(|e| e.key == s) {
        Some(e) => Ok((e.formula(), Some(*e))),
        None => Ok((parse(s)?, None)),
    }
}

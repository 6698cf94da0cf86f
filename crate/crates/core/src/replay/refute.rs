//! No finitely supported binary predicate linearly orders the atoms.
//!
//! Two distinct atoms `a, b` outside the frame of `τ` fall into the same
//! cell in both orders, so `τ` relates them both ways or neither way.

use rayon::prelude::*;
use serde::Serialize;

use crate::atoms::{Atom, AtomSet};
use crate::error::{Error, Result};
use crate::eval::{enumerate_predicates, eval_nominal, Bounds, TriBool};
use crate::logic::{build_order_formulas, parse, x_var, Assignment, Formula, OrderFormulas};
use crate::nominal::FinSuppPredicate;
use crate::oracle::{eval_finite, FiniteStructure};
use crate::partition::{classify, CellDescriptor, SetPartition, SupportFrame};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LoViolation {
    /// `a τ b`, `b τ a` and `a ≠ b`.
    Antisymmetry,
    /// Neither `a τ b` nor `b τ a`, with both in the domain.
    Totality,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LoRefutation {
    pub a: Atom,
    pub b: Atom,
    pub related: bool,
    pub violated: LoViolation,
}

/// The pair is the two least atoms above every atom of `τ`'s frame.
pub fn refute_linear_order(tau: &FinSuppPredicate) -> Result<LoRefutation> {
    if tau.arity() != 2 {
        return Err(Error::ArityMismatch {
            expected: 2,
            found: tau.arity(),
        });
    }
    let start = tau.frame().atoms().iter().map(|a| a.id() + 1).max().unwrap_or(0);
    let (a, b) = (Atom(start), Atom(start + 1));
    let forward = tau.contains(&[a, b])?;
    let backward = tau.contains(&[b, a])?;
    debug_assert_eq!(forward, backward);
    Ok(LoRefutation {
        a,
        b,
        related: forward,
        violated: if forward {
            LoViolation::Antisymmetry
        } else {
            LoViolation::Totality
        },
    })
}

fn order_formulas() -> OrderFormulas {
    build_order_formulas(1).expect("unary order formulas")
}

fn full_domain(o: &OrderFormulas, tau: &FinSuppPredicate) -> Result<Assignment> {
    Assignment::new()
        .with_pred(&o.order, tau.clone())?
        .with_pred(&o.domain, FinSuppPredicate::full(1))
}

/// `lo(τ, ℕ)` evaluated from the formula alone.
pub fn lo_verdict(tau: &FinSuppPredicate) -> Result<TriBool> {
    let o = order_formulas();
    eval_nominal(&o.lo, &full_domain(&o, tau)?, Bounds::default())
}

/// Whether the violated conjunct, instantiated at the pair, holds.
pub fn pair_violates(tau: &FinSuppPredicate, r: &LoRefutation) -> Result<bool> {
    let text = match r.violated {
        LoViolation::Antisymmetry => "((T2 x1 x2 & T2 x2 x1) & ~x1 = x2)",
        LoViolation::Totality => "((~T2 x1 x2 & ~T2 x2 x1) & ~x1 = x2)",
    };
    let f = parse(text)?;
    let a = full_domain(&order_formulas(), tau)?
        .with_ind(&x_var(1), r.a)
        .with_ind(&x_var(2), r.b);
    Ok(eval_nominal(&f, &a, Bounds::default())?.is_true())
}

/// The distinct-fresh-pair cell over a frame of size `q`.
pub fn fresh_pair_cell(q: usize) -> CellDescriptor {
    let k = SetPartition::new(vec![vec![1], vec![2]]).expect("two singletons");
    CellDescriptor::new(q, vec![q + 1, q + 1], k).expect("valid cell")
}

#[derive(Debug, Clone, Serialize)]
pub struct FreshPairCase {
    pub q: usize,
    pub present: bool,
    pub refutation: LoRefutation,
    /// Both orders of the pair classify into the fresh-pair cell, the
    /// violated conjunct holds at the pair, and `lo` evaluates false.
    pub confirmed: bool,
}

/// Both statuses of the fresh-pair cell for every frame size up to `max_q`.
pub fn fresh_pair_cases(max_q: usize) -> Result<Vec<FreshPairCase>> {
    let mut out = Vec::new();
    for q in 0..=max_q {
        let frame = SupportFrame::from_ids(&(0..q as u32).collect::<Vec<_>>());
        let cell = fresh_pair_cell(q);
        for present in [false, true] {
            let cells = if present { vec![cell.clone()] } else { vec![] };
            let tau = FinSuppPredicate::new(2, frame.clone(), cells)?;
            let r = refute_linear_order(&tau)?;
            let same_cell = classify(&[r.a, r.b], &frame)? == cell && classify(&[r.b, r.a], &frame)? == cell;
            let confirmed = same_cell
                && r.related == present
                && pair_violates(&tau, &r)?
                && lo_verdict(&tau)?.is_false();
            out.push(FreshPairCase {
                q,
                present,
                refutation: r,
                confirmed,
            });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepResult {
    pub bounds: Bounds,
    pub checked: usize,
    /// Predicates the refuter or the formula failed to reject, as text.
    pub survivors: Vec<String>,
}

/// Every binary predicate with frame inside `{0, …, max_q − 1}`.
pub fn sweep_binary_predicates(max_q: usize) -> Result<SweepResult> {
    let s: AtomSet = (0..max_q as u32).map(Atom).collect();
    let bounds = Bounds {
        max_extra_fresh: 0,
        max_support: max_q,
    };
    let all: Vec<FinSuppPredicate> = enumerate_predicates(&s, 2, bounds).collect();
    let verdicts: Vec<Result<Option<String>>> = all
        .par_iter()
        .map(|tau| {
            let r = refute_linear_order(tau)?;
            let ok = pair_violates(tau, &r)? && lo_verdict(tau)?.is_false();
            Ok((!ok).then(|| tau.to_string()))
        })
        .collect();
    let mut survivors = Vec::new();
    for v in verdicts {
        if let Some(s) = v? {
            survivors.push(s);
        }
    }
    Ok(SweepResult {
        bounds,
        checked: all.len(),
        survivors,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ProbeResult {
    pub bounds: Bounds,
    pub verdict: TriBool,
}

pub const PROBE_BOUNDS: [Bounds; 4] = [
    Bounds { max_extra_fresh: 0, max_support: 0 },
    Bounds { max_extra_fresh: 1, max_support: 1 },
    Bounds { max_extra_fresh: 1, max_support: 2 },
    Bounds { max_extra_fresh: 2, max_support: 2 },
];

/// `∃T lo(T, ℕ)` by bounded search; it must never come out true.
pub fn lo_existence_probes() -> Result<Vec<ProbeResult>> {
    let o = order_formulas();
    let f = Formula::exists_pred(&o.order, o.lo.clone());
    let a = Assignment::new().with_pred(&o.domain, FinSuppPredicate::full(1))?;
    PROBE_BOUNDS
        .par_iter()
        .map(|&bounds| {
            Ok(ProbeResult {
                bounds,
                verdict: eval_nominal(&f, &a, bounds)?,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct FiniteCheck {
    pub size: u32,
    pub holds: bool,
}

/// `∀A∀T(wo(T, A) → lo(T, A))` in the full finite structures of size 1..=`max_size`.
pub fn wo_implies_lo(max_size: u32) -> Result<Vec<FiniteCheck>> {
    let o = order_formulas();
    let f = Formula::forall_pred(
        &o.domain,
        Formula::forall_pred(&o.order, Formula::implies(o.wo.clone(), o.lo.clone())),
    );
    (1..=max_size)
        .map(|size| {
            Ok(FiniteCheck {
                size,
                holds: eval_finite(&FiniteStructure::new(size)?, &f, &Assignment::new())?,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct NotLo1Report {
    pub max_q: usize,
    pub cases: Vec<FreshPairCase>,
    pub sweep: SweepResult,
    pub probes: Vec<ProbeResult>,
    pub wo_implies_lo: Vec<FiniteCheck>,
    pub conclusion: String,
    pub passed: bool,
}

pub fn check_not_lo1(max_q: usize) -> Result<NotLo1Report> {
    let cases = fresh_pair_cases(max_q)?;
    let sweep = sweep_binary_predicates(max_q)?;
    let probes = lo_existence_probes()?;
    let wo_lo = wo_implies_lo(3)?;
    let cases_ok = cases.iter().all(|c| c.confirmed);
    let sweep_ok = sweep.survivors.is_empty();
    let probes_ok = probes.iter().all(|p| !p.verdict.is_true());
    let wo_lo_ok = wo_lo.iter().all(|c| c.holds);
    let passed = cases_ok && sweep_ok && probes_ok && wo_lo_ok;
    let conclusion = if passed {
        format!(
            "not LO1: the fresh-pair cell refutes lo in all {} cases (q <= {max_q}) and all {} predicates of the sweep; \
             wo -> lo holds in every finite structure of size <= 3; together these are evidence for not WO1",
            cases.len(),
            sweep.checked
        )
    } else {
        format!(
            "incomplete: cases {}, sweep {} ({} survivors), probes {}, wo -> lo {}",
            ok(cases_ok),
            ok(sweep_ok),
            sweep.survivors.len(),
            ok(probes_ok),
            ok(wo_lo_ok)
        )
    };
    Ok(NotLo1Report {
        max_q,
        cases,
        sweep,
        probes,
        wo_implies_lo: wo_lo,
        conclusion,
        passed,
    })
}

fn ok(b: bool) -> &'static str {
    if b {
        "ok"
    } else {
        "failed"
    }
}

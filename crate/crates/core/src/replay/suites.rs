//! Named batches of checks with machine-readable reports.

use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::atoms::{Atom, AtomSet};
use crate::error::{Error, Result};
use crate::eval::{eval_nominal, Bounds};
use crate::logic::{
    beta_assignment, build_cell_formula, build_order_formulas, build_swap, build_transport_formula, build_wo_axiom, d_var,
    x0s, xs, y0s, ys, Assignment, Formula,
};
use crate::nominal::{choice_set_predicate, stabilizer_superset_check};
use crate::oracle::{check_finite_choice, eval_finite, FiniteStructure};
use crate::partition::{classify, enumerate_cells, enumerate_partitions, representative, SupportFrame};
use crate::transporter::transport_perm;

use super::{at_point, build_choice_table, build_sigma, check_not_lo1, replay, ReplayOptions, CATALOG};

pub const SUITES: [&str; 8] = [
    "partitions",
    "choice-set",
    "transporter",
    "swap",
    "finite-choice",
    "prop41",
    "replay",
    "lo-refuter",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SuiteOptions {
    pub seed: u64,
    pub bounds: Bounds,
    pub max_q: usize,
    pub timings: bool,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            seed: 42,
            bounds: Bounds::default(),
            max_q: 3,
            timings: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Debug, Clone, Serialize)]
pub struct CaseReport {
    pub name: String,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub millis: Option<u64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub suite: String,
    pub cases: Vec<CaseReport>,
    pub bounds: Bounds,
    pub seed: u64,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.cases.iter().all(|c| c.verdict == Verdict::Pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CaseReport> {
        self.cases.iter().filter(|c| c.verdict == Verdict::Fail)
    }
}

/// Result of one unit: pass or fail, with an optional witness (a
/// counterexample on failure, a summary otherwise).
struct Outcome {
    pass: bool,
    witness: Option<Value>,
}

impl Outcome {
    fn pass() -> Self {
        Outcome {
            pass: true,
            witness: None,
        }
    }

    fn check(pass: bool, witness: Value) -> Self {
        Outcome {
            pass,
            witness: Some(witness),
        }
    }

    fn fail(witness: Value) -> Self {
        Outcome::check(false, witness)
    }
}

type Unit = (String, Box<dyn Fn() -> Result<Outcome> + Send + Sync>);

fn unit<F>(name: impl Into<String>, f: F) -> Unit
where
    F: Fn() -> Result<Outcome> + Send + Sync + 'static,
{
    (name.into(), Box::new(f))
}

pub fn run_suite(name: &str, opts: SuiteOptions) -> Result<Report> {
    let units = match name {
        "partitions" => partitions_units(opts),
        "choice-set" => choice_set_units(opts),
        "transporter" => transporter_units(opts),
        "swap" => swap_units(opts),
        "finite-choice" => finite_choice_units(),
        "prop41" => transported_witness_units(opts),
        "replay" => replay_units(opts),
        "lo-refuter" => lo_units(opts),
        _ => return Err(Error::UnknownSuite(name.to_string())),
    };
    let mut cases: Vec<CaseReport> = units
        .par_iter()
        .map(|(name, f)| {
            let start = Instant::now();
            let outcome = f().unwrap_or_else(|e| Outcome::fail(json!({ "error": e.to_string() })));
            CaseReport {
                name: name.clone(),
                verdict: if outcome.pass { Verdict::Pass } else { Verdict::Fail },
                witness: outcome.witness,
                millis: opts.timings.then(|| start.elapsed().as_millis() as u64),
            }
        })
        .collect();
    cases.sort_by(|a, b| a.name.cmp(&b.name));
    Ok(Report {
        suite: name.to_string(),
        cases,
        bounds: opts.bounds,
        seed: opts.seed,
    })
}

fn rng_for(seed: u64, salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Bell numbers by the recurrence `B(n+1) = Σ C(n,k) B(k)`.
pub fn bell_numbers(upto: usize) -> Vec<usize> {
    let mut b = vec![1];
    for n in 0..upto {
        b.push((0..=n).map(|k| binomial(n, k) * b[k]).sum());
    }
    b
}

/// `Σ_k C(n,k) q^(n-k) B(k)`: choose the fresh positions, place the rest in
/// the frame, partition the fresh ones.
pub fn cell_count(n: usize, q: usize) -> usize {
    let bell = bell_numbers(n);
    (0..=n).map(|k| binomial(n, k) * q.pow((n - k) as u32) * bell[k]).sum()
}

/// A random frame of `q` atoms below `pool`.
fn random_frame<R: Rng>(rng: &mut R, q: usize, pool: u32) -> SupportFrame {
    let mut atoms: Vec<u32> = (0..pool).collect();
    atoms.shuffle(rng);
    SupportFrame::from_ids(&atoms[..q])
}

fn random_tuple<R: Rng>(rng: &mut R, n: usize, pool: u32) -> Vec<Atom> {
    (0..n).map(|_| Atom(rng.gen_range(0..pool))).collect()
}

/// Classifies a random tuple and checks that exactly its cell's membership
/// formula holds.
pub fn exactly_one_cell<R: Rng>(rng: &mut R) -> Result<Option<Value>> {
    let n = rng.gen_range(1..=4);
    let q = rng.gen_range(0..=3);
    let frame = random_frame(rng, q, 20);
    let t = random_tuple(rng, n, 20);
    let own = classify(&t, &frame)?;
    let mut a = beta_assignment(&frame);
    a.bind_tuple(&xs(n), &t);
    for c in enumerate_cells(n, q)? {
        let holds = eval_nominal(&build_cell_formula(&c, n, q)?, &a, Bounds::default())?;
        if holds.is_true() != (c == own) {
            return Ok(Some(json!({
                "frame": frame, "tuple": t, "cell": c.to_string(), "classified": own.to_string()
            })));
        }
    }
    Ok(None)
}

fn partitions_units(opts: SuiteOptions) -> Vec<Unit> {
    let mut units = Vec::new();
    for (k, expected) in bell_numbers(6).into_iter().enumerate() {
        units.push(unit(format!("bell-{k}"), move || {
            let idx: Vec<usize> = (1..=k).collect();
            let got = enumerate_partitions(&idx).len();
            Ok(Outcome::check(got == expected, json!({ "expected": expected, "got": got })))
        }));
    }
    for n in 1..=4 {
        for q in 0..=3 {
            units.push(unit(format!("cells-n{n}-q{q}"), move || {
                let frame = SupportFrame::from_ids(&(10..10 + q as u32).collect::<Vec<_>>());
                let mu = frame.fresh(n);
                let cells = enumerate_cells(n, q)?;
                if cells.len() != cell_count(n, q) {
                    return Ok(Outcome::fail(json!({ "expected": cell_count(n, q), "got": cells.len() })));
                }
                for c in &cells {
                    let rep = representative(&frame, &mu, c)?;
                    if classify(&rep, &frame)? != *c {
                        return Ok(Outcome::fail(json!({ "cell": c.to_string(), "representative": rep })));
                    }
                }
                Ok(Outcome::pass())
            }));
        }
    }
    for batch in 0..10u64 {
        units.push(unit(format!("exactly-one-{batch}"), move || {
            let mut rng = rng_for(opts.seed, batch + 1);
            for _ in 0..100 {
                if let Some(w) = exactly_one_cell(&mut rng)? {
                    return Ok(Outcome::fail(w));
                }
            }
            Ok(Outcome::pass())
        }));
    }
    units
}

/// The choice set over `frame` has one tuple per cell and is fixed by the
/// stabilizer of `P ∪ P_μ` but not by that of `P`.
pub fn check_choice_set<R: Rng>(frame: &SupportFrame, n: usize, trials: usize, rng: &mut R) -> Result<Option<Value>> {
    let mu = frame.fresh(n);
    let d = choice_set_predicate(frame, &mu, n)?;
    let tuples = d.finite_extension().unwrap_or_default();
    let mut seen: Vec<_> = tuples.iter().map(|t| classify(t, frame)).collect::<Result<_>>()?;
    seen.sort();
    seen.dedup();
    let cells = enumerate_cells(n, frame.q())?;
    if tuples.len() != cells.len() || seen.len() != cells.len() {
        return Ok(Some(json!({ "frame": frame, "n": n, "tuples": tuples.len(), "cells": cells.len() })));
    }
    let with_mu = frame.union(&SupportFrame::new(mu.iter().copied())).to_set();
    if !stabilizer_superset_check(&d, &with_mu, trials, rng) {
        return Ok(Some(json!({ "frame": frame, "n": n, "error": "not fixed by the stabilizer of P and mu" })));
    }
    if stabilizer_superset_check(&d, &frame.to_set(), trials, rng) {
        return Ok(Some(json!({ "frame": frame, "n": n, "error": "fixed by the stabilizer of P alone" })));
    }
    Ok(None)
}

fn choice_set_units(opts: SuiteOptions) -> Vec<Unit> {
    let mut units = Vec::new();
    for n in 1..=3 {
        for q in 0..=3usize {
            units.push(unit(format!("n{n}-q{q}"), move || {
                let mut rng = rng_for(opts.seed, (n * 10 + q) as u64);
                let frame = random_frame(&mut rng, q, 12);
                Ok(match check_choice_set(&frame, n, 100, &mut rng)? {
                    Some(w) => Outcome::fail(w),
                    None => Outcome::pass(),
                })
            }));
        }
    }
    units
}

/// A random tuple in a random cell: `π_ξ` maps the representative to `ξ`,
/// fixes the frame, and moves only atoms of `ζ`.
pub fn check_transport<R: Rng>(rng: &mut R) -> Result<Option<Value>> {
    let n = rng.gen_range(1..=3);
    let q = rng.gen_range(0..=3);
    let frame = random_frame(rng, q, 12);
    let xi = random_tuple(rng, n, 20);
    let cell = classify(&xi, &frame)?;
    let mu = frame.fresh(n);
    let plan = transport_perm(&frame, &mu, &cell, &xi)?;
    let rep = representative(&frame, &mu, &cell)?;
    let zeta: AtomSet = plan.zeta.iter().copied().collect();
    let ok = plan.perm.apply_tuple(&rep) == xi
        && plan.perm.fixes_pointwise(&frame.to_set())
        && plan.perm.support().is_subset(&zeta);
    Ok((!ok).then(|| json!({ "frame": frame, "xi": xi, "cell": cell.to_string(), "perm": plan.perm })))
}

fn transporter_units(opts: SuiteOptions) -> Vec<Unit> {
    (0..10u64)
        .map(|batch| {
            unit(format!("batch-{batch}"), move || {
                let mut rng = rng_for(opts.seed, 100 + batch);
                for _ in 0..50 {
                    if let Some(w) = check_transport(&mut rng)? {
                        return Ok(Outcome::fail(w));
                    }
                }
                Ok(Outcome::pass())
            })
        })
        .collect()
}

/// A random instance of the swap formula: among all `η` over the atoms in
/// play plus one fresh atom, it holds exactly at `π_ξ(η₀)`.
pub fn check_swap<R: Rng>(rng: &mut R) -> Result<Option<Value>> {
    let n = rng.gen_range(1..=3);
    let m = rng.gen_range(1..=3);
    let q = rng.gen_range(0..=2);
    let frame = random_frame(rng, q, 8);
    let mu = frame.fresh(n);
    let xi = random_tuple(rng, n, 10);
    let cell = classify(&xi, &frame)?;
    let rep = representative(&frame, &mu, &cell)?;
    let plan = transport_perm(&frame, &mu, &cell, &xi)?;
    let eta0 = random_tuple(rng, m, 10);
    let expected = plan.perm.apply_tuple(&eta0);
    let mut atoms: AtomSet = frame.atoms().iter().chain(&mu).chain(&xi).chain(&eta0).chain(&expected).copied().collect();
    let extra = atoms.least_fresh();
    atoms.insert(extra);
    let window: Vec<Atom> = atoms.iter().collect();

    let swap = build_swap(cell.e(), n, m, q)?;
    let mut base = beta_assignment(&frame);
    base.bind_tuple(&x0s(n), &rep);
    base.bind_tuple(&xs(n), &xi);
    base.bind_tuple(&y0s(m), &eta0);
    let mut eta = vec![window[0]; m];
    let mut idx = vec![0usize; m];
    loop {
        for (k, &i) in idx.iter().enumerate() {
            eta[k] = window[i];
        }
        let mut a = base.clone();
        a.bind_tuple(&ys(m), &eta);
        let holds = eval_nominal(&swap, &a, Bounds::default())?.is_true();
        if holds != (eta == expected) {
            return Ok(Some(json!({
                "frame": frame, "cell": cell.to_string(), "xi": xi, "eta0": eta0, "eta": eta, "holds": holds
            })));
        }
        let mut k = 0;
        while k < m {
            idx[k] += 1;
            if idx[k] < window.len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
        if k == m {
            return Ok(None);
        }
    }
}

fn swap_units(opts: SuiteOptions) -> Vec<Unit> {
    (0..20u64)
        .map(|batch| {
            unit(format!("batch-{batch:02}"), move || {
                let mut rng = rng_for(opts.seed, 200 + batch);
                for _ in 0..10 {
                    if let Some(w) = check_swap(&mut rng)? {
                        return Ok(Outcome::fail(w));
                    }
                }
                Ok(Outcome::pass())
            })
        })
        .collect()
}

/// `WO¹ ↔ WO²`.
pub fn wo_equivalence() -> Result<Formula> {
    Ok(Formula::iff(build_wo_axiom(1)?, build_wo_axiom(2)?))
}

fn finite_choice_units() -> Vec<Unit> {
    let mut units = Vec::new();
    for e in CATALOG {
        let max_size = if e.n == 1 { 3 } else { 2 };
        for size in 1..=max_size {
            units.push(unit(format!("choice-{}-N{size}", e.key), move || {
                let holds = check_finite_choice(&FiniteStructure::new(size)?, &e.formula(), e.n, e.m)?;
                Ok(Outcome::check(holds, json!({ "h": e.text, "size": size })))
            }));
        }
    }
    for size in 1..=3 {
        units.push(unit(format!("wo1-N{size}"), move || {
            let holds = eval_finite(&FiniteStructure::new(size)?, &build_wo_axiom(1)?, &Assignment::new())?;
            Ok(Outcome::check(holds, json!({ "size": size })))
        }));
        units.push(unit(format!("wo1-iff-wo2-N{size}"), move || {
            let holds = eval_finite(&FiniteStructure::new(size)?, &wo_equivalence()?, &Assignment::new())?;
            Ok(Outcome::check(holds, json!({ "size": size })))
        }));
        units.push(unit(format!("wo-implies-lo-N{size}"), move || {
            let o = build_order_formulas(1)?;
            let f = Formula::forall_pred(&o.domain, Formula::forall_pred(&o.order, Formula::implies(o.wo, o.lo)));
            let holds = eval_finite(&FiniteStructure::new(size)?, &f, &Assignment::new())?;
            Ok(Outcome::check(holds, json!({ "size": size })))
        }));
    }
    units
}

/// For every cell of the catalog entry's table: the witness moved by `π_ξ`
/// satisfies `H` at sampled `ξ` of the cell, `σ` agrees with the transport
/// formula `G_{e,K}` on a window, and `σ`'s section at the representative is
/// the chosen witness.
fn transported_witness_check(key: &'static str, opts: SuiteOptions) -> Result<Outcome> {
    let e = CATALOG.iter().find(|e| e.key == key).expect("catalog key");
    let (h, n, m) = (e.formula(), e.n, e.m);
    let f = Assignment::new();
    let table = build_choice_table(&h, &f, n, m, &SupportFrame::empty(), opts.bounds)?;
    let sigma = build_sigma(&table)?;
    let mut rng = rng_for(opts.seed, 300 + n as u64);
    let pool = 8u32;
    let q = table.frame.q();
    for (entry, piece) in table.entries.iter().zip(&sigma.pieces) {
        let section = sigma.sigma.section(&entry.representative)?;
        if !section.same_extension(&entry.witness) {
            return Ok(Outcome::fail(json!({ "cell": entry.cell.to_string(), "error": "section differs from witness" })));
        }
        let g = build_transport_formula(&entry.cell, n, m, q)?;
        let mut sampled = 0;
        for _ in 0..200 {
            let xi = random_tuple(&mut rng, n, pool);
            if classify(&xi, &table.frame)? != entry.cell {
                continue;
            }
            sampled += 1;
            let plan = transport_perm(&table.frame, &table.mu, &entry.cell, &xi)?;
            let moved = entry.witness.apply_perm(&plan.perm);
            if !eval_nominal(&h, &at_point(&f, n, &xi, &moved)?, opts.bounds)?.is_true() {
                return Ok(Outcome::fail(json!({ "cell": entry.cell.to_string(), "xi": xi, "error": "H fails" })));
            }
            let eta = random_tuple(&mut rng, m, pool);
            let mut a = beta_assignment(&table.frame).with_pred(&d_var(m), entry.witness.clone())?;
            a.bind_tuple(&x0s(n), &entry.representative);
            a.bind_tuple(&xs(n), &xi);
            a.bind_tuple(&ys(m), &eta);
            let t: Vec<Atom> = xi.iter().chain(&eta).copied().collect();
            let by_formula = eval_nominal(&g, &a, opts.bounds)?;
            if by_formula.is_true() != piece.transported.contains(&t)? {
                return Ok(Outcome::fail(json!({ "cell": entry.cell.to_string(), "tuple": t, "error": "G disagrees" })));
            }
        }
        if sampled == 0 {
            return Ok(Outcome::fail(json!({ "cell": entry.cell.to_string(), "error": "no samples" })));
        }
    }
    Ok(Outcome::check(true, json!({ "h": e.text, "cells": table.entries.len() })))
}

fn transported_witness_units(opts: SuiteOptions) -> Vec<Unit> {
    CATALOG
        .iter()
        .map(|e| {
            let key = e.key;
            unit(key, move || transported_witness_check(key, opts))
        })
        .collect()
}

fn replay_units(opts: SuiteOptions) -> Vec<Unit> {
    let ropts = ReplayOptions {
        bounds: opts.bounds,
        seed: opts.seed,
        sabotage: false,
        timings: false,
    };
    let mut units: Vec<Unit> = CATALOG
        .iter()
        .map(|e| {
            let e = *e;
            unit(e.key, move || {
                let r = replay(&e.formula(), &Assignment::new(), e.n, e.m, ropts)?;
                Ok(Outcome::check(r.passed, json!({ "h": e.text, "sigma": r.sigma, "verdicts": r.verdicts })))
            })
        })
        .collect();
    units.push(unit("sabotage-dx", move || {
        let e = CATALOG[0];
        let r = replay(
            &e.formula(),
            &Assignment::new(),
            e.n,
            e.m,
            ReplayOptions { sabotage: true, ..ropts },
        )?;
        // passes when the empty selector is rejected
        Ok(Outcome::check(!r.passed, json!({ "h": e.text, "verdicts": r.verdicts })))
    }));
    units
}

fn lo_units(opts: SuiteOptions) -> Vec<Unit> {
    vec![unit("not-lo1", move || {
        let r = check_not_lo1(opts.max_q)?;
        Ok(Outcome::check(
            r.passed,
            json!({
                "conclusion": r.conclusion,
                "cases": r.cases.len(),
                "swept": r.sweep.checked,
                "survivors": r.sweep.survivors,
                "probes": r.probes,
                "wo_implies_lo": r.wo_implies_lo,
            }),
        ))
    })]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts() {
        assert_eq!(bell_numbers(6), [1, 1, 2, 5, 15, 52, 203]);
        assert_eq!(cell_count(2, 1), 5);
        assert_eq!(cell_count(3, 0), 5);
        assert_eq!(cell_count(2, 3), 17);
    }

    #[test]
    fn unknown_suite() {
        assert_eq!(
            run_suite("nope", SuiteOptions::default()).unwrap_err(),
            Error::UnknownSuite("nope".into())
        );
    }

    #[test]
    fn fast_suites_pass() {
        for name in ["partitions", "choice-set", "transporter", "replay"] {
            let r = run_suite(name, SuiteOptions::default()).unwrap();
            assert!(r.passed(), "{name}: {:?}", r.failures().collect::<Vec<_>>());
        }
    }
}

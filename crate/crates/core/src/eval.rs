//! Evaluation in the permutation model.
//!
//! Individual quantifiers are decided exactly: outside the atoms mentioned by
//! the body's free variables every atom is alike, so one fresh atom stands
//! for all of them. Predicate quantifiers are searched over a bounded family
//! of finitely supported predicates and may end in [`TriBool::Unknown`].

use std::cell::RefCell;
use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::atoms::{Atom, AtomSet};
use crate::error::{Error, Result};
use crate::logic::{Assignment, Formula, IndVar, PredVar};
use crate::nominal::FinSuppPredicate;
use crate::partition::{enumerate_cells, CellDescriptor, SupportFrame};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Bounds {
    pub max_extra_fresh: usize,
    pub max_support: usize,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds {
            max_extra_fresh: 1,
            max_support: 2,
        }
    }
}

impl fmt::Display for Bounds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "extra-fresh={} support≤{}", self.max_extra_fresh, self.max_support)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TriBool {
    True,
    False,
    Unknown { bound: Bounds },
}

impl TriBool {
    pub fn from_bool(b: bool) -> TriBool {
        if b {
            TriBool::True
        } else {
            TriBool::False
        }
    }

    pub fn is_true(self) -> bool {
        self == TriBool::True
    }

    pub fn is_false(self) -> bool {
        self == TriBool::False
    }

    pub fn is_unknown(self) -> bool {
        matches!(self, TriBool::Unknown { .. })
    }

    pub fn not(self) -> TriBool {
        match self {
            TriBool::True => TriBool::False,
            TriBool::False => TriBool::True,
            u => u,
        }
    }

    pub fn and(self, other: TriBool) -> TriBool {
        match (self, other) {
            (TriBool::False, _) | (_, TriBool::False) => TriBool::False,
            (TriBool::True, TriBool::True) => TriBool::True,
            (u @ TriBool::Unknown { .. }, _) | (_, u) => u,
        }
    }

    pub fn or(self, other: TriBool) -> TriBool {
        self.not().and(other.not()).not()
    }
}

impl fmt::Display for TriBool {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TriBool::True => f.write_str("true"),
            TriBool::False => f.write_str("false"),
            TriBool::Unknown { bound } => write!(f, "unknown ({bound})"),
        }
    }
}

/// Lazily enumerates finitely supported `arity`-ary predicates whose frame
/// lies inside `S` plus the first `max_extra_fresh` atoms outside `S`, with
/// at most `max_support` frame atoms.
///
/// Frames using fewer extra fresh atoms come first; among those, larger
/// frames first. For each frame the cell subsets follow binary counting over
/// the cell order, so the empty predicate is first.
pub struct PredicateEnumerator {
    arity: usize,
    frames: Vec<SupportFrame>,
    frame_idx: usize,
    cells: Vec<CellDescriptor>,
    counter: Vec<bool>,
    exhausted_frame: bool,
}

impl PredicateEnumerator {
    fn load_frame(&mut self) {
        let frame = &self.frames[self.frame_idx];
        self.cells = enumerate_cells(self.arity, frame.q()).expect("positive arity");
        self.counter = vec![false; self.cells.len()];
        self.exhausted_frame = false;
    }
}

impl Iterator for PredicateEnumerator {
    type Item = FinSuppPredicate;

    fn next(&mut self) -> Option<FinSuppPredicate> {
        loop {
            if self.frame_idx >= self.frames.len() {
                return None;
            }
            if !self.exhausted_frame {
                let chosen = self
                    .cells
                    .iter()
                    .zip(&self.counter)
                    .filter(|(_, &on)| on)
                    .map(|(c, _)| c.clone());
                let d = FinSuppPredicate::new(self.arity, self.frames[self.frame_idx].clone(), chosen)
                    .expect("cells enumerated for this frame");
                // binary increment, least significant cell first
                let mut carry = true;
                for bit in self.counter.iter_mut() {
                    if !carry {
                        break;
                    }
                    carry = *bit;
                    *bit = !*bit;
                }
                self.exhausted_frame = carry;
                return Some(d);
            }
            self.frame_idx += 1;
            if self.frame_idx < self.frames.len() {
                self.load_frame();
            }
        }
    }
}

fn subsets_of_size(pool: &[Atom], k: usize) -> Vec<Vec<Atom>> {
    fn go(pool: &[Atom], k: usize, start: usize, cur: &mut Vec<Atom>, out: &mut Vec<Vec<Atom>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..pool.len() {
            cur.push(pool[i]);
            go(pool, k, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(pool, k, 0, &mut Vec::new(), &mut out);
    out
}

pub fn enumerate_predicates(s: &AtomSet, arity: usize, b: Bounds) -> PredicateEnumerator {
    let known: Vec<Atom> = s.iter().collect();
    let extra = s.fresh(b.max_extra_fresh);
    let mut frames = Vec::new();
    for k in 0..=extra.len() {
        for size in (k..=b.max_support.min(known.len() + k)).rev() {
            for fresh in subsets_of_size(&extra, k) {
                for atoms in subsets_of_size(&known, size - k) {
                    frames.push(SupportFrame::new(atoms.into_iter().chain(fresh.iter().copied())));
                }
            }
        }
    }
    let mut e = PredicateEnumerator {
        arity,
        frames,
        frame_idx: 0,
        cells: Vec::new(),
        counter: Vec::new(),
        exhausted_frame: true,
    };
    if arity > 0 && !e.frames.is_empty() {
        e.load_frame();
    } else {
        e.frame_idx = e.frames.len();
    }
    e
}

/// A suggested value for a predicate quantifier. A forced hint replaces the
/// search: the quantifier's value is the body's value at the hint.
#[derive(Debug, Clone)]
pub struct Hint {
    pub value: FinSuppPredicate,
    pub forced: bool,
}

pub type HintFn<'a> = dyn Fn(&PredVar, &Assignment) -> Option<Hint> + 'a;

#[derive(Default)]
struct FreeVars {
    ind: Vec<IndVar>,
    pred: Vec<PredVar>,
}

pub struct Evaluator<'h> {
    bounds: Bounds,
    hint: Option<&'h HintFn<'h>>,
    cache: RefCell<HashMap<*const Formula, std::rc::Rc<FreeVars>>>,
}

impl<'h> Evaluator<'h> {
    pub fn new(bounds: Bounds) -> Self {
        Evaluator {
            bounds,
            hint: None,
            cache: RefCell::new(HashMap::new()),
        }
    }

    pub fn with_hint(mut self, hint: &'h HintFn<'h>) -> Self {
        self.hint = Some(hint);
        self
    }

    pub fn bounds(&self) -> Bounds {
        self.bounds
    }

    pub fn eval(&self, f: &Formula, a: &Assignment) -> Result<TriBool> {
        // keys are node addresses, only valid while `f` is borrowed
        self.cache.borrow_mut().clear();
        let mut env = a.clone();
        self.go(f, &mut env)
    }

    fn free_of(&self, body: &Formula) -> std::rc::Rc<FreeVars> {
        let key = body as *const Formula;
        if let Some(fv) = self.cache.borrow().get(&key) {
            return fv.clone();
        }
        let fv = std::rc::Rc::new(FreeVars {
            ind: body.free_ind().into_iter().collect(),
            pred: body.free_pred().into_iter().collect(),
        });
        self.cache.borrow_mut().insert(key, fv.clone());
        fv
    }

    /// Atoms named by the values of the body's free variables, minus the
    /// quantified one.
    fn relevant_atoms(&self, body: &Formula, skip_ind: Option<&IndVar>, skip_pred: Option<&PredVar>, env: &Assignment) -> Result<AtomSet> {
        let fv = self.free_of(body);
        let mut s = AtomSet::new();
        for v in fv.ind.iter().filter(|v| Some(*v) != skip_ind) {
            s.insert(*env.ind.get(v).ok_or_else(|| Error::UnboundVariable(v.to_string()))?);
        }
        for p in fv.pred.iter().filter(|p| Some(*p) != skip_pred) {
            let d = env.pred.get(p).ok_or_else(|| Error::UnboundVariable(p.to_string()))?;
            s.extend(d.frame().atoms().iter().copied());
        }
        Ok(s)
    }

    fn ind(env: &Assignment, v: &IndVar) -> Result<Atom> {
        env.ind.get(v).copied().ok_or_else(|| Error::UnboundVariable(v.to_string()))
    }

    fn go(&self, f: &Formula, env: &mut Assignment) -> Result<TriBool> {
        Ok(match f {
            Formula::Eq(a, b) => TriBool::from_bool(Self::ind(env, a)? == Self::ind(env, b)?),
            Formula::Pred(p, args) => {
                let d = env.pred.get(p).ok_or_else(|| Error::UnboundVariable(p.to_string()))?;
                let t = args.iter().map(|v| Self::ind(env, v)).collect::<Result<Vec<_>>>()?;
                TriBool::from_bool(d.contains(&t)?)
            }
            Formula::Not(g) => self.go(g, env)?.not(),
            Formula::And(a, b) => {
                let l = self.go(a, env)?;
                if l.is_false() {
                    return Ok(l);
                }
                l.and(self.go(b, env)?)
            }
            Formula::Or(a, b) => {
                let l = self.go(a, env)?;
                if l.is_true() {
                    return Ok(l);
                }
                l.or(self.go(b, env)?)
            }
            Formula::Implies(a, b) => {
                let l = self.go(a, env)?.not();
                if l.is_true() {
                    return Ok(l);
                }
                l.or(self.go(b, env)?)
            }
            Formula::Iff(a, b) => {
                let l = self.go(a, env)?;
                let r = self.go(b, env)?;
                match (l, r) {
                    (TriBool::Unknown { .. }, _) => l,
                    (_, TriBool::Unknown { .. }) => r,
                    _ => TriBool::from_bool(l == r),
                }
            }
            Formula::ForallInd(v, body) => self.quantify_ind(v, body, env, true)?,
            Formula::ExistsInd(v, body) => self.quantify_ind(v, body, env, false)?,
            Formula::ForallPred(p, body) => self.quantify_pred(p, body, env, true)?,
            Formula::ExistsPred(p, body) => self.quantify_pred(p, body, env, false)?,
        })
    }

    fn quantify_ind(&self, v: &IndVar, body: &Formula, env: &mut Assignment, universal: bool) -> Result<TriBool> {
        let s = self.relevant_atoms(body, Some(v), None, env)?;
        let mut domain: Vec<Atom> = s.iter().collect();
        domain.push(s.least_fresh());
        let saved = env.ind.get(v).copied();
        let mut acc = TriBool::from_bool(universal);
        for a in domain {
            env.ind.insert(v.clone(), a);
            let r = self.go(body, env);
            let r = match r {
                Ok(r) => r,
                Err(e) => {
                    restore_ind(env, v, saved);
                    return Err(e);
                }
            };
            acc = if universal { acc.and(r) } else { acc.or(r) };
            if (universal && acc.is_false()) || (!universal && acc.is_true()) {
                break;
            }
        }
        restore_ind(env, v, saved);
        Ok(acc)
    }

    fn quantify_pred(&self, p: &PredVar, body: &Formula, env: &mut Assignment, universal: bool) -> Result<TriBool> {
        let saved = env.pred.get(p).cloned();
        let result = self.search_pred(p, body, env, universal);
        match saved {
            Some(d) => {
                env.pred.insert(p.clone(), d);
            }
            None => {
                env.pred.remove(p);
            }
        }
        result
    }

    fn search_pred(&self, p: &PredVar, body: &Formula, env: &mut Assignment, universal: bool) -> Result<TriBool> {
        if !self.free_of(body).pred.contains(p) {
            // vacuous quantifier: every value gives the same answer
            env.pred.remove(p);
            return self.go(body, env);
        }
        let decisive = |r: TriBool| if universal { r.is_false() } else { r.is_true() };
        let hint = self.hint.and_then(|h| h(p, env));
        if let Some(h) = hint {
            env.pred.insert(p.clone(), h.value);
            let r = self.go(body, env)?;
            if h.forced || decisive(r) {
                return Ok(r);
            }
        }
        let s = self.relevant_atoms(body, None, Some(p), env)?;
        for d in enumerate_predicates(&s, p.arity, self.bounds) {
            env.pred.insert(p.clone(), d);
            let r = self.go(body, env)?;
            if decisive(r) {
                return Ok(r);
            }
        }
        Ok(TriBool::Unknown { bound: self.bounds })
    }
}

fn restore_ind(env: &mut Assignment, v: &IndVar, saved: Option<Atom>) {
    match saved {
        Some(a) => {
            env.ind.insert(v.clone(), a);
        }
        None => {
            env.ind.remove(v);
        }
    }
}

pub fn eval_nominal(f: &Formula, a: &Assignment, b: Bounds) -> Result<TriBool> {
    Evaluator::new(b).eval(f, a)
}

/// Atoms occurring in the values of an assignment.
pub fn assignment_atoms(a: &Assignment) -> BTreeSet<Atom> {
    let mut s: BTreeSet<Atom> = a.ind.values().copied().collect();
    for d in a.pred.values() {
        s.extend(d.frame().atoms().iter().copied());
    }
    s
}

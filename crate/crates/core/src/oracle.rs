//! Brute-force semantics over finite full structures: the domain is
//! `{0, …, N-1}` and predicate quantifiers range over every relation.
//!
//! Two strategies are provided. [`Strategy::Exhaustive`] enumerates every
//! relation by bitmask over the lexicographic tuple order. [`Strategy::Lazy`]
//! starts a quantified relation with every bit undetermined, evaluates in
//! three-valued logic, and branches (false, then true) only on a bit the
//! partial evaluation actually depends on. Both are complete; the lazy one is
//! what makes `WO²` at `N = 3` feasible.

use std::collections::HashMap;

use crate::atoms::Atom;
use crate::error::{Error, Result};
use crate::logic::{build_guarded_choice_instance, xs, Assignment, Formula, IndVar, PredVar};
use crate::nominal::FinSuppPredicate;

pub const MAX_DOMAIN: u32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FiniteStructure {
    size: u32,
}

impl FiniteStructure {
    pub fn new(size: u32) -> Result<Self> {
        if size == 0 || size > MAX_DOMAIN {
            return Err(Error::DomainSize(size));
        }
        Ok(FiniteStructure { size })
    }

    pub fn size(&self) -> u32 {
        self.size
    }

    /// All `arity`-tuples in lexicographic order.
    pub fn tuples(&self, arity: usize) -> Vec<Vec<Atom>> {
        let n = self.size as usize;
        (0..n.pow(arity as u32))
            .map(|mut code| {
                let mut t = vec![Atom(0); arity];
                for slot in t.iter_mut().rev() {
                    *slot = Atom((code % n) as u32);
                    code /= n;
                }
                t
            })
            .collect()
    }

    /// The relation with the given membership bits, as a predicate value.
    pub fn relation(&self, arity: usize, member: impl Fn(usize) -> bool) -> FinSuppPredicate {
        let chosen: Vec<Vec<Atom>> = self
            .tuples(arity)
            .into_iter()
            .enumerate()
            .filter(|(i, _)| member(*i))
            .map(|(_, t)| t)
            .collect();
        FinSuppPredicate::from_tuples(arity, &chosen).expect("tuples of the stated arity")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strategy {
    #[default]
    Lazy,
    Exhaustive,
}

#[derive(Debug)]
enum Node {
    Eq(usize, usize),
    Rel(usize, Vec<usize>),
    Not(Box<Node>),
    And(Box<Node>, Box<Node>),
    Or(Box<Node>, Box<Node>),
    Implies(Box<Node>, Box<Node>),
    Iff(Box<Node>, Box<Node>),
    Ind(bool, usize, Box<Node>),
    Pred(bool, usize, Box<Node>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum V {
    T,
    F,
    /// Undetermined, first blocked on bit `.1` of relation slot `.0`.
    U(usize, usize),
}

impl V {
    fn of(b: bool) -> V {
        if b {
            V::T
        } else {
            V::F
        }
    }

    fn not(self) -> V {
        match self {
            V::T => V::F,
            V::F => V::T,
            u => u,
        }
    }

    fn and(self, o: V) -> V {
        match (self, o) {
            (V::F, _) | (_, V::F) => V::F,
            (V::T, V::T) => V::T,
            (u @ V::U(..), _) | (_, u) => u,
        }
    }

    fn or(self, o: V) -> V {
        self.not().and(o.not()).not()
    }
}

struct Compiler {
    ind_slots: usize,
    rel_arity: Vec<usize>,
    free_ind: Vec<(IndVar, usize)>,
    free_rel: Vec<(PredVar, usize)>,
}

impl Compiler {
    fn compile(&mut self, f: &Formula, ind: &mut Vec<(IndVar, usize)>, rel: &mut Vec<(PredVar, usize)>) -> Node {
        match f {
            Formula::Eq(a, b) => Node::Eq(self.ind(a, ind), self.ind(b, ind)),
            Formula::Pred(p, args) => {
                let slot = self.rel(p, rel);
                Node::Rel(slot, args.iter().map(|a| self.ind(a, ind)).collect())
            }
            Formula::Not(g) => Node::Not(Box::new(self.compile(g, ind, rel))),
            Formula::And(a, b) => Node::And(Box::new(self.compile(a, ind, rel)), Box::new(self.compile(b, ind, rel))),
            Formula::Or(a, b) => Node::Or(Box::new(self.compile(a, ind, rel)), Box::new(self.compile(b, ind, rel))),
            Formula::Implies(a, b) => {
                Node::Implies(Box::new(self.compile(a, ind, rel)), Box::new(self.compile(b, ind, rel)))
            }
            Formula::Iff(a, b) => Node::Iff(Box::new(self.compile(a, ind, rel)), Box::new(self.compile(b, ind, rel))),
            Formula::ForallInd(v, g) | Formula::ExistsInd(v, g) => {
                let slot = self.ind_slots;
                self.ind_slots += 1;
                ind.push((v.clone(), slot));
                let body = self.compile(g, ind, rel);
                ind.pop();
                Node::Ind(matches!(f, Formula::ForallInd(..)), slot, Box::new(body))
            }
            Formula::ForallPred(p, g) | Formula::ExistsPred(p, g) => {
                let slot = self.rel_arity.len();
                self.rel_arity.push(p.arity);
                rel.push((p.clone(), slot));
                let body = self.compile(g, ind, rel);
                rel.pop();
                Node::Pred(matches!(f, Formula::ForallPred(..)), slot, Box::new(body))
            }
        }
    }

    fn ind(&mut self, v: &IndVar, scope: &[(IndVar, usize)]) -> usize {
        if let Some((_, s)) = scope.iter().rev().find(|(w, _)| w == v) {
            return *s;
        }
        if let Some((_, s)) = self.free_ind.iter().find(|(w, _)| w == v) {
            return *s;
        }
        let s = self.ind_slots;
        self.ind_slots += 1;
        self.free_ind.push((v.clone(), s));
        s
    }

    fn rel(&mut self, p: &PredVar, scope: &[(PredVar, usize)]) -> usize {
        if let Some((_, s)) = scope.iter().rev().find(|(w, _)| w == p) {
            return *s;
        }
        if let Some((_, s)) = self.free_rel.iter().find(|(w, _)| w == p) {
            return *s;
        }
        let s = self.rel_arity.len();
        self.rel_arity.push(p.arity);
        self.free_rel.push((p.clone(), s));
        s
    }
}

struct Machine {
    n: usize,
    strategy: Strategy,
    ind: Vec<usize>,
    rel: Vec<Vec<Option<bool>>>,
}

impl Machine {
    fn index(&self, args: &[usize]) -> usize {
        args.iter().fold(0, |acc, &s| acc * self.n + self.ind[s])
    }

    fn eval(&mut self, node: &Node) -> V {
        match node {
            Node::Eq(a, b) => V::of(self.ind[*a] == self.ind[*b]),
            Node::Rel(slot, args) => {
                let i = self.index(args);
                match self.rel[*slot][i] {
                    Some(b) => V::of(b),
                    None => V::U(*slot, i),
                }
            }
            Node::Not(g) => self.eval(g).not(),
            Node::And(a, b) => {
                let l = self.eval(a);
                if l == V::F {
                    return l;
                }
                l.and(self.eval(b))
            }
            Node::Or(a, b) => {
                let l = self.eval(a);
                if l == V::T {
                    return l;
                }
                l.or(self.eval(b))
            }
            Node::Implies(a, b) => {
                let l = self.eval(a).not();
                if l == V::T {
                    return l;
                }
                l.or(self.eval(b))
            }
            Node::Iff(a, b) => {
                let l = self.eval(a);
                let r = self.eval(b);
                match (l, r) {
                    (V::U(..), _) => l,
                    (_, V::U(..)) => r,
                    _ => V::of(l == r),
                }
            }
            Node::Ind(universal, slot, body) => {
                let mut acc = V::of(*universal);
                for a in 0..self.n {
                    self.ind[*slot] = a;
                    let r = self.eval(body);
                    acc = if *universal { acc.and(r) } else { acc.or(r) };
                    if acc == V::of(!*universal) {
                        break;
                    }
                }
                acc
            }
            Node::Pred(universal, slot, body) => match self.strategy {
                Strategy::Lazy => {
                    let len = self.rel[*slot].len();
                    self.rel[*slot] = vec![None; len];
                    self.search(*universal, *slot, body)
                }
                Strategy::Exhaustive => {
                    let len = self.rel[*slot].len();
                    assert!(len < 32, "exhaustive strategy limited to 31 tuples per relation");
                    let mut acc = V::of(*universal);
                    for mask in 0u64..(1u64 << len) {
                        self.rel[*slot] = (0..len).map(|i| Some(mask >> i & 1 == 1)).collect();
                        acc = if *universal { acc.and(self.eval(body)) } else { acc.or(self.eval(body)) };
                        if acc == V::of(!*universal) {
                            break;
                        }
                    }
                    acc
                }
            },
        }
    }

    fn search(&mut self, universal: bool, slot: usize, body: &Node) -> V {
        let r = self.eval(body);
        let (s, i) = match r {
            V::U(s, i) if s == slot => (s, i),
            _ => return r,
        };
        let decisive = V::of(!universal);
        self.rel[s][i] = Some(false);
        let r0 = self.search(universal, slot, body);
        if r0 == decisive {
            self.rel[s][i] = None;
            return r0;
        }
        self.rel[s][i] = Some(true);
        let r1 = self.search(universal, slot, body);
        self.rel[s][i] = None;
        if universal {
            r0.and(r1)
        } else {
            r0.or(r1)
        }
    }
}

fn check_atom(a: Atom, size: u32) -> Result<usize> {
    if a.id() >= size {
        return Err(Error::OutOfDomain { atom: a.id(), size });
    }
    Ok(a.id() as usize)
}

pub fn eval_finite_with(s: &FiniteStructure, f: &Formula, a: &Assignment, strategy: Strategy) -> Result<bool> {
    let mut c = Compiler {
        ind_slots: 0,
        rel_arity: Vec::new(),
        free_ind: Vec::new(),
        free_rel: Vec::new(),
    };
    let root = c.compile(f, &mut Vec::new(), &mut Vec::new());
    let n = s.size as usize;
    let mut m = Machine {
        n,
        strategy,
        ind: vec![0; c.ind_slots],
        rel: c.rel_arity.iter().map(|&k| vec![None; n.pow(k as u32)]).collect(),
    };
    for (v, slot) in &c.free_ind {
        let atom = *a.ind.get(v).ok_or_else(|| Error::UnboundVariable(v.to_string()))?;
        m.ind[*slot] = check_atom(atom, s.size)?;
    }
    for (p, slot) in &c.free_rel {
        let d = a.pred.get(p).ok_or_else(|| Error::UnboundVariable(p.to_string()))?;
        m.rel[*slot] = s.tuples(p.arity).iter().map(|t| d.contains(t).map(Some)).collect::<Result<Vec<_>>>()?;
    }
    match m.eval(&root) {
        V::T => Ok(true),
        V::F => Ok(false),
        V::U(..) => unreachable!("free relations are fully determined"),
    }
}

/// Classical truth in the full structure of size `s`, restricting predicate
/// values of `a` to the domain.
pub fn eval_finite(s: &FiniteStructure, f: &Formula, a: &Assignment) -> Result<bool> {
    eval_finite_with(s, f, a, Strategy::Lazy)
}

/// Outcome of [`check_finite_choice`] for one family `α`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteChoiceCase {
    pub alpha: Vec<Vec<Atom>>,
    pub antecedent: bool,
    pub selector: Option<FinSuppPredicate>,
    pub consequent: Option<bool>,
}

/// Checks the `A`-guarded choice instance for every `α ⊆ N^n`: whenever the
/// antecedent holds, the selector built from the first witness (in bitmask
/// order) for each `ξ ∈ α` satisfies the consequent.
pub fn finite_choice_cases(s: &FiniteStructure, h: &Formula, n: usize, m: usize) -> Result<Vec<FiniteChoiceCase>> {
    let inst = build_guarded_choice_instance(h, n, m)?;
    let a_var = PredVar::new("A", n);
    let d_var = inst.witness.clone();
    let tuples_n = s.tuples(n);
    let tuples_m = s.tuples(m);
    if tuples_n.len() > 20 || tuples_m.len() > 20 {
        return Err(Error::DomainSize(s.size));
    }
    let mut witness_cache: HashMap<Vec<Atom>, Option<u64>> = HashMap::new();
    let mut out = Vec::new();
    for alpha_mask in 0u64..(1u64 << tuples_n.len()) {
        let alpha: Vec<Vec<Atom>> = (0..tuples_n.len())
            .filter(|i| alpha_mask >> i & 1 == 1)
            .map(|i| tuples_n[i].clone())
            .collect();
        let base = Assignment::new().with_pred(&a_var, FinSuppPredicate::from_tuples(n, &alpha)?)?;
        let antecedent = eval_finite(s, &inst.antecedent, &base)?;
        if !antecedent {
            out.push(FiniteChoiceCase {
                alpha,
                antecedent,
                selector: None,
                consequent: None,
            });
            continue;
        }
        let mut graph = Vec::new();
        for xi in &alpha {
            let found = match witness_cache.get(xi) {
                Some(w) => *w,
                None => {
                    let mut found = None;
                    for mask in 0u64..(1u64 << tuples_m.len()) {
                        let d = s.relation(m, |i| mask >> i & 1 == 1);
                        let mut f = base.clone().with_pred(&d_var, d)?;
                        f.bind_tuple(&xs(n), xi);
                        if eval_finite(s, h, &f)? {
                            found = Some(mask);
                            break;
                        }
                    }
                    witness_cache.insert(xi.clone(), found);
                    found
                }
            };
            let mask = found.ok_or(Error::AntecedentFails)?;
            for (i, eta) in tuples_m.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    let mut t = xi.clone();
                    t.extend_from_slice(eta);
                    graph.push(t);
                }
            }
        }
        let sigma = FinSuppPredicate::from_tuples(n + m, &graph)?;
        let f = base.with_pred(&inst.selector, sigma.clone())?;
        let consequent = eval_finite(s, &inst.consequent_body, &f)?;
        out.push(FiniteChoiceCase {
            alpha,
            antecedent,
            selector: Some(sigma),
            consequent: Some(consequent),
        });
    }
    Ok(out)
}

pub fn check_finite_choice(s: &FiniteStructure, h: &Formula, n: usize, m: usize) -> Result<bool> {
    Ok(finite_choice_cases(s, h, n, m)?.iter().all(|c| c.consequent != Some(false)))
}

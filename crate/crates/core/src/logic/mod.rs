//! Second-order formulas over a relational language with equality.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::atoms::Atom;
use crate::error::{Error, Result};
use crate::nominal::FinSuppPredicate;

pub mod families;
mod parse;

pub use families::*;
pub use parse::parse;

/// An individual variable such as `x1`, `y0_2`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IndVar(pub String);

impl IndVar {
    pub fn new(name: impl Into<String>) -> Self {
        IndVar(name.into())
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for IndVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A predicate variable. The arity is part of the printed name: `A1`, `T2`,
/// and indexed families print as `B1_3`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PredVar {
    pub stem: String,
    pub arity: usize,
    pub index: Option<u32>,
}

impl PredVar {
    pub fn new(stem: &str, arity: usize) -> Self {
        PredVar {
            stem: stem.to_string(),
            arity,
            index: None,
        }
    }

    pub fn indexed(stem: &str, arity: usize, index: u32) -> Self {
        PredVar {
            stem: stem.to_string(),
            arity,
            index: Some(index),
        }
    }
}

impl fmt::Display for PredVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.stem, self.arity)?;
        if let Some(i) = self.index {
            write!(f, "_{i}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Eq(IndVar, IndVar),
    Pred(PredVar, Vec<IndVar>),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    ForallInd(IndVar, Box<Formula>),
    ExistsInd(IndVar, Box<Formula>),
    ForallPred(PredVar, Box<Formula>),
    ExistsPred(PredVar, Box<Formula>),
}

impl Formula {
    pub fn eq(a: &IndVar, b: &IndVar) -> Formula {
        Formula::Eq(a.clone(), b.clone())
    }

    pub fn pred(p: &PredVar, args: &[IndVar]) -> Formula {
        Formula::Pred(p.clone(), args.to_vec())
    }

    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn neq(a: &IndVar, b: &IndVar) -> Formula {
        Formula::not(Formula::eq(a, b))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::Iff(Box::new(a), Box::new(b))
    }

    pub fn forall(v: &IndVar, body: Formula) -> Formula {
        Formula::ForallInd(v.clone(), Box::new(body))
    }

    pub fn exists(v: &IndVar, body: Formula) -> Formula {
        Formula::ExistsInd(v.clone(), Box::new(body))
    }

    pub fn forall_pred(p: &PredVar, body: Formula) -> Formula {
        Formula::ForallPred(p.clone(), Box::new(body))
    }

    pub fn exists_pred(p: &PredVar, body: Formula) -> Formula {
        Formula::ExistsPred(p.clone(), Box::new(body))
    }

    /// `∀v₁ … ∀v_k body`, outermost first.
    pub fn forall_all(vars: &[IndVar], body: Formula) -> Formula {
        vars.iter().rev().fold(body, |acc, v| Formula::forall(v, acc))
    }

    pub fn exists_all(vars: &[IndVar], body: Formula) -> Formula {
        vars.iter().rev().fold(body, |acc, v| Formula::exists(v, acc))
    }

    /// Left-nested conjunction; `None` for an empty list.
    pub fn conj<I: IntoIterator<Item = Formula>>(parts: I) -> Option<Formula> {
        parts.into_iter().reduce(Formula::and)
    }

    pub fn disj<I: IntoIterator<Item = Formula>>(parts: I) -> Option<Formula> {
        parts.into_iter().reduce(Formula::or)
    }

    pub fn free_ind(&self) -> BTreeSet<IndVar> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut Vec::new(), &mut out, &mut BTreeSet::new());
        out
    }

    pub fn free_pred(&self) -> BTreeSet<PredVar> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut Vec::new(), &mut BTreeSet::new(), &mut out);
        out
    }

    fn collect_free(
        &self,
        bound_ind: &mut Vec<IndVar>,
        bound_pred: &mut Vec<PredVar>,
        ind: &mut BTreeSet<IndVar>,
        pred: &mut BTreeSet<PredVar>,
    ) {
        let mut note = |v: &IndVar, bound: &Vec<IndVar>| {
            if !bound.contains(v) {
                ind.insert(v.clone());
            }
        };
        match self {
            Formula::Eq(a, b) => {
                note(a, bound_ind);
                note(b, bound_ind);
            }
            Formula::Pred(p, args) => {
                for a in args {
                    note(a, bound_ind);
                }
                if !bound_pred.contains(p) {
                    pred.insert(p.clone());
                }
            }
            Formula::Not(f) => f.collect_free(bound_ind, bound_pred, ind, pred),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.collect_free(bound_ind, bound_pred, ind, pred);
                b.collect_free(bound_ind, bound_pred, ind, pred);
            }
            Formula::ForallInd(v, f) | Formula::ExistsInd(v, f) => {
                bound_ind.push(v.clone());
                f.collect_free(bound_ind, bound_pred, ind, pred);
                bound_ind.pop();
            }
            Formula::ForallPred(p, f) | Formula::ExistsPred(p, f) => {
                bound_pred.push(p.clone());
                f.collect_free(bound_ind, bound_pred, ind, pred);
                bound_pred.pop();
            }
        }
    }

    /// Every predicate variable occurring anywhere, bound or free.
    pub fn all_pred_vars(&self) -> BTreeSet<PredVar> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| match f {
            Formula::Pred(p, _) | Formula::ForallPred(p, _) | Formula::ExistsPred(p, _) => {
                out.insert(p.clone());
            }
            _ => {}
        });
        out
    }

    /// Pre-order traversal.
    pub fn visit<F: FnMut(&Formula)>(&self, g: &mut F) {
        g(self);
        match self {
            Formula::Eq(..) | Formula::Pred(..) => {}
            Formula::Not(f)
            | Formula::ForallInd(_, f)
            | Formula::ExistsInd(_, f)
            | Formula::ForallPred(_, f)
            | Formula::ExistsPred(_, f) => f.visit(g),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.visit(g);
                b.visit(g);
            }
        }
    }

    /// Whether any second-order quantifier occurs.
    pub fn is_first_order(&self) -> bool {
        let mut first_order = true;
        self.visit(&mut |f| {
            if matches!(f, Formula::ForallPred(..) | Formula::ExistsPred(..)) {
                first_order = false;
            }
        });
        first_order
    }

    pub fn size(&self) -> usize {
        let mut n = 0;
        self.visit(&mut |_| n += 1);
        n
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Eq(a, b) => write!(f, "{a} = {b}"),
            Formula::Pred(p, args) => {
                write!(f, "{p}")?;
                for a in args {
                    write!(f, " {a}")?;
                }
                Ok(())
            }
            Formula::Not(g) => write!(f, "~{g}"),
            Formula::And(a, b) => write!(f, "({a} & {b})"),
            Formula::Or(a, b) => write!(f, "({a} | {b})"),
            Formula::Implies(a, b) => write!(f, "({a} -> {b})"),
            Formula::Iff(a, b) => write!(f, "({a} <-> {b})"),
            Formula::ForallInd(v, g) => write!(f, "all {v} {g}"),
            Formula::ExistsInd(v, g) => write!(f, "ex {v} {g}"),
            Formula::ForallPred(p, g) => write!(f, "all {p} {g}"),
            Formula::ExistsPred(p, g) => write!(f, "ex {p} {g}"),
        }
    }
}

/// Values for free variables.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Assignment {
    pub ind: BTreeMap<IndVar, Atom>,
    pub pred: BTreeMap<PredVar, FinSuppPredicate>,
}

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_ind(mut self, v: &IndVar, a: Atom) -> Self {
        self.ind.insert(v.clone(), a);
        self
    }

    pub fn with_pred(mut self, p: &PredVar, d: FinSuppPredicate) -> Result<Self> {
        self.set_pred(p, d)?;
        Ok(self)
    }

    pub fn set_pred(&mut self, p: &PredVar, d: FinSuppPredicate) -> Result<()> {
        if d.arity() != p.arity {
            return Err(Error::ArityMismatch {
                expected: p.arity,
                found: d.arity(),
            });
        }
        self.pred.insert(p.clone(), d);
        Ok(())
    }

    /// Binds `vars[i]` to `values[i]`.
    pub fn bind_tuple(&mut self, vars: &[IndVar], values: &[Atom]) {
        for (v, &a) in vars.iter().zip(values) {
            self.ind.insert(v.clone(), a);
        }
    }

    /// Applies `p` to every individual and predicate value.
    pub fn permuted(&self, p: &crate::atoms::FinPerm) -> Assignment {
        Assignment {
            ind: self.ind.iter().map(|(v, &a)| (v.clone(), p.apply(a))).collect(),
            pred: self.pred.iter().map(|(v, d)| (v.clone(), d.apply_perm(p))).collect(),
        }
    }
}

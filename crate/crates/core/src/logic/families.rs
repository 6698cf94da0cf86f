//! Generators for the formula families used by the construction.

use super::{Assignment, Formula, IndVar, PredVar};
use crate::error::{Error, Result};
use crate::nominal::adequate_unary;
#[cfg(test)]
use crate::nominal::FinSuppPredicate;
use crate::partition::{CellDescriptor, SetPartition, SupportFrame};

pub fn x_var(i: usize) -> IndVar {
    IndVar(format!("x{i}"))
}

pub fn x0_var(i: usize) -> IndVar {
    IndVar(format!("x0_{i}"))
}

pub fn y_var(k: usize) -> IndVar {
    IndVar(format!("y{k}"))
}

pub fn y0_var(k: usize) -> IndVar {
    IndVar(format!("y0_{k}"))
}

/// `(x1, …, xn)`
pub fn xs(n: usize) -> Vec<IndVar> {
    (1..=n).map(x_var).collect()
}

/// `(x0_1, …, x0_n)`
pub fn x0s(n: usize) -> Vec<IndVar> {
    (1..=n).map(x0_var).collect()
}

pub fn ys(m: usize) -> Vec<IndVar> {
    (1..=m).map(y_var).collect()
}

pub fn y0s(m: usize) -> Vec<IndVar> {
    (1..=m).map(y0_var).collect()
}

/// The unary block variable `B_j`, printed `B1_j`.
pub fn beta_var(j: usize) -> PredVar {
    PredVar::indexed("B", 1, j as u32)
}

/// The witness variable `D` of arity `m`.
pub fn d_var(m: usize) -> PredVar {
    PredVar::new("D", m)
}

/// The selector variable `S` of arity `n + m`.
pub fn s_var(n: usize, m: usize) -> PredVar {
    PredVar::new("S", n + m)
}

/// Assigns `B_j ↦ β_j` for the adequate partition of `frame`.
pub fn beta_assignment(frame: &SupportFrame) -> Assignment {
    let mut f = Assignment::new();
    for (j, beta) in adequate_unary(frame).into_iter().enumerate() {
        f.set_pred(&beta_var(j + 1), beta).expect("unary");
    }
    f
}

fn vec_eq(a: &[IndVar], b: &[IndVar]) -> Formula {
    Formula::conj(a.iter().zip(b).map(|(u, v)| Formula::eq(u, v))).expect("non-empty tuple")
}

fn args(parts: &[&[IndVar]]) -> Vec<IndVar> {
    parts.iter().flat_map(|p| p.iter().cloned()).collect()
}

/// `F_K` over the variables `vars` (1-based indices into `vars`).
pub fn pattern_over(k: &SetPartition, vars: &[IndVar]) -> Result<Formula> {
    let n = vars.len();
    if let Some(&index) = k.ground().iter().find(|&&i| i == 0 || i > n) {
        return Err(Error::BlockIndexOutOfRange { index, n });
    }
    let x = |i: usize| &vars[i - 1];
    let blocks = k.blocks();
    let mut parts = Vec::new();
    for b in blocks {
        for &i in &b[1..] {
            parts.push(Formula::eq(x(b[0]), x(i)));
        }
    }
    for v in 0..blocks.len() {
        for w in v + 1..blocks.len() {
            parts.push(Formula::neq(x(blocks[v][0]), x(blocks[w][0])));
        }
    }
    Ok(match Formula::conj(parts) {
        Some(f) => f,
        None if blocks.len() == 1 => Formula::eq(x(blocks[0][0]), x(blocks[0][0])),
        None => Formula::eq(x(1), x(1)),
    })
}

/// `F_K(x)`.
pub fn build_pattern(k: &SetPartition, n: usize) -> Result<Formula> {
    pattern_over(k, &xs(n))
}

/// `F_{e,K}` over the variables `vars`.
pub fn cell_formula_over(cell: &CellDescriptor, vars: &[IndVar]) -> Result<Formula> {
    let beta = cell
        .e()
        .iter()
        .zip(vars)
        .map(|(&ej, v)| Formula::pred(&beta_var(ej), std::slice::from_ref(v)));
    let beta = Formula::conj(beta).expect("positive arity");
    Ok(Formula::and(beta, pattern_over(cell.k(), vars)?))
}

/// `F_{e,K}(x) = B_{e1} x1 ∧ ⋯ ∧ B_{en} xn ∧ F_K(x)`.
pub fn build_cell_formula(cell: &CellDescriptor, n: usize, q: usize) -> Result<Formula> {
    cell.check(n, q)?;
    cell_formula_over(cell, &xs(n))
}

/// Subsets of `1..=upto` of size `k`, as increasing sequences in
/// lexicographic order.
fn increasing_subsets(upto: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, upto: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for s in start..=upto {
            cur.push(s);
            go(s + 1, upto, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(1, upto, k, &mut Vec::new(), &mut out);
    out
}

/// `enum(t, i, v, w)`: `v_i` is the `t`-th distinct entry of `(v_1, …, v_i)`
/// that does not occur in `w`.
///
/// For `t > 1` the disjunction runs over `s_1 < ⋯ < s_{t-1} < s_t = i`.
pub fn build_enum(t: usize, i: usize, v: &[IndVar], w: &[IndVar]) -> Result<Formula> {
    let n = v.len();
    if t == 0 || t > i || i > n || w.len() != n {
        return Err(Error::EnumRange { t, i, n });
    }
    let not_in_w = |s: usize| Formula::conj(w.iter().map(|wj| Formula::neq(&v[s - 1], wj))).expect("n ≥ 1");
    let in_w = |s: usize| Formula::disj(w.iter().map(|wj| Formula::eq(&v[s - 1], wj))).expect("n ≥ 1");
    if t == 1 {
        let old = Formula::conj((1..i).map(in_w));
        return Ok(match old {
            Some(old) => Formula::and(not_in_w(i), old),
            None => not_in_w(i),
        });
    }
    let mut cases = Vec::new();
    for mut s in increasing_subsets(i - 1, t - 1) {
        s.push(i);
        let mut parts: Vec<Formula> = s.iter().map(|&sl| not_in_w(sl)).collect();
        for l in 0..t {
            for j in l + 1..t {
                parts.push(Formula::neq(&v[s[l] - 1], &v[s[j] - 1]));
            }
        }
        for r in (1..i).filter(|r| !s.contains(r)) {
            let repeat = Formula::disj(s[..t - 1].iter().map(|&sj| Formula::eq(&v[r - 1], &v[sj - 1])))
                .expect("t ≥ 2");
            parts.push(Formula::or(in_w(r), repeat));
        }
        cases.push(Formula::conj(parts).expect("non-empty"));
    }
    Ok(Formula::disj(cases).expect("t ≤ i leaves at least one choice"))
}

fn check_e(e: &[usize], n: usize, q: usize) -> Result<()> {
    if e.len() != n || n == 0 || e.iter().any(|&ej| ej == 0 || ej > q + 1) {
        return Err(Error::InvalidCell {
            cell: format!("e={e:?}"),
            n,
            q,
        });
    }
    Ok(())
}

fn swap_impl(e: &[usize], n: usize, m: usize, q: usize, first_occurrence_guard: bool) -> Result<Formula> {
    check_e(e, n, q)?;
    if m == 0 {
        return Err(Error::ZeroArity);
    }
    let (x, x0, y, y0) = (xs(n), x0s(n), ys(m), y0s(m));
    let x_eq = vec_eq(&x, &x0);
    let y_eq = vec_eq(&y, &y0);
    let idx: Vec<usize> = (1..=n).filter(|&j| e[j - 1] == q + 1).collect();
    if idx.is_empty() {
        return Ok(Formula::and(x_eq, y_eq));
    }
    let mut per_k = Vec::new();
    for k in 1..=m {
        let (yk, y0k) = (&y[k - 1], &y0[k - 1]);
        let untouched = Formula::conj(
            idx.iter()
                .map(|&i| Formula::and(Formula::neq(y0k, &x0[i - 1]), Formula::neq(y0k, &x[i - 1]))),
        )
        .expect("idx non-empty");
        let c1 = Formula::implies(untouched, Formula::eq(yk, y0k));
        let c2 = Formula::conj(
            idx.iter()
                .map(|&i| Formula::implies(Formula::eq(y0k, &x0[i - 1]), Formula::eq(yk, &x[i - 1]))),
        )
        .expect("idx non-empty");
        let mut c3_parts = Vec::new();
        for &i in &idx {
            let mut hyp = vec![Formula::eq(y0k, &x[i - 1])];
            hyp.extend(x0.iter().map(|x0j| Formula::neq(&x[i - 1], x0j)));
            if first_occurrence_guard {
                hyp.extend(idx.iter().filter(|&&j| j < i).map(|&j| Formula::neq(&x[i - 1], &x[j - 1])));
            }
            let mut options = Vec::new();
            for t in 1..=i {
                for i0 in t..=n {
                    options.push(Formula::conj([
                        build_enum(t, i, &x, &x0)?,
                        build_enum(t, i0, &x0, &x)?,
                        Formula::eq(yk, &x0[i0 - 1]),
                    ])
                    .expect("three parts"));
                }
            }
            c3_parts.push(Formula::implies(
                Formula::conj(hyp).expect("non-empty"),
                Formula::disj(options).expect("t = 1, i0 = n is always present"),
            ));
        }
        let c3 = Formula::conj(c3_parts).expect("idx non-empty");
        per_k.push(Formula::conj([c1, c2, c3]).expect("three parts"));
    }
    Ok(Formula::and(
        Formula::implies(x_eq.clone(), y_eq),
        Formula::implies(Formula::not(x_eq), Formula::conj(per_k).expect("m ≥ 1")),
    ))
}

/// `swap_e(x0, y0, x, y)`: holds for `(ξ_{e,K}, η₀, ξ, η)` exactly when
/// `η = π_ξ(η₀)`.
///
/// The back-image clause only fires at the first position of `x` carrying a
/// given fresh value; see [`build_swap_literal`] for the unguarded form,
/// which is falsified when `ξ` repeats a fresh value outside `M_{e,K}` that
/// also occurs in `η₀`.
pub fn build_swap(e: &[usize], n: usize, m: usize, q: usize) -> Result<Formula> {
    swap_impl(e, n, m, q, true)
}

/// `swap_e` with the back-image clause required at every position of `x`.
pub fn build_swap_literal(e: &[usize], n: usize, m: usize, q: usize) -> Result<Formula> {
    swap_impl(e, n, m, q, false)
}

/// `G_{e,K}(x, y) = F_{e,K}(x) ∧ ∃y0 (D y0 ∧ swap_e(x0, y0, x, y))`, with
/// `x0` free (bound to the representative) and `D` of arity `m`.
pub fn build_transport_formula(cell: &CellDescriptor, n: usize, m: usize, q: usize) -> Result<Formula> {
    let f = build_cell_formula(cell, n, q)?;
    let swap = build_swap(cell.e(), n, m, q)?;
    let y0 = y0s(m);
    let inner = Formula::exists_all(&y0, Formula::and(Formula::pred(&d_var(m), &y0), swap));
    Ok(Formula::and(f, inner))
}

/// Variables for the `s`-th n-tuple of an order formula: `x{s}` when
/// `n = 1`, otherwise `x{s}_{j}`.
pub fn order_tuple(s: usize, n: usize) -> Vec<IndVar> {
    if n == 1 {
        vec![IndVar(format!("x{s}"))]
    } else {
        (1..=n).map(|j| IndVar(format!("x{s}_{j}"))).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderFormulas {
    pub po: Formula,
    pub lo: Formula,
    pub wo: Formula,
    /// `T`, of arity `2n`.
    pub order: PredVar,
    /// `A`, of arity `n`.
    pub domain: PredVar,
}

/// `po(T, A)`, `lo(T, A)` and `wo(T, A)` for n-tuples.
///
/// `po` is reflexivity, antisymmetry and transitivity, each relativized to
/// `A`.
pub fn build_order_formulas(n: usize) -> Result<OrderFormulas> {
    if n == 0 {
        return Err(Error::ZeroArity);
    }
    let t = PredVar::new("T", 2 * n);
    let a = PredVar::new("A", n);
    let b = PredVar::new("B", n);
    let (x0, x1, x2, x3) = (order_tuple(0, n), order_tuple(1, n), order_tuple(2, n), order_tuple(3, n));
    let in_a = |v: &[IndVar]| Formula::pred(&a, v);
    let tt = |u: &[IndVar], v: &[IndVar]| Formula::pred(&t, &args(&[u, v]));
    let within = |vs: &[&[IndVar]]| Formula::conj(vs.iter().map(|v| in_a(v))).expect("non-empty");

    let refl = Formula::forall_all(&x1, Formula::implies(in_a(&x1), tt(&x1, &x1)));
    let antisym = Formula::forall_all(
        &args(&[&x1, &x2]),
        Formula::implies(
            within(&[&x1, &x2]),
            Formula::implies(Formula::and(tt(&x1, &x2), tt(&x2, &x1)), vec_eq(&x1, &x2)),
        ),
    );
    let trans = Formula::forall_all(
        &args(&[&x1, &x2, &x3]),
        Formula::implies(
            within(&[&x1, &x2, &x3]),
            Formula::implies(Formula::and(tt(&x1, &x2), tt(&x2, &x3)), tt(&x1, &x3)),
        ),
    );
    let po = Formula::conj([refl, antisym, trans]).expect("three parts");
    let total = Formula::forall_all(
        &args(&[&x1, &x2]),
        Formula::implies(within(&[&x1, &x2]), Formula::or(tt(&x1, &x2), tt(&x2, &x1))),
    );
    let lo = Formula::and(po.clone(), total);
    let in_b = |v: &[IndVar]| Formula::pred(&b, v);
    let subset = Formula::forall_all(&x1, Formula::implies(in_b(&x1), in_a(&x1)));
    let inhabited = Formula::exists_all(&x1, in_b(&x1));
    let least = Formula::exists_all(
        &x0,
        Formula::and(
            in_b(&x0),
            Formula::forall_all(&x1, Formula::implies(in_b(&x1), tt(&x0, &x1))),
        ),
    );
    let minimum = Formula::forall_pred(&b, Formula::implies(Formula::and(subset, inhabited), least));
    let wo = Formula::and(lo.clone(), minimum);
    Ok(OrderFormulas {
        po,
        lo,
        wo,
        order: t,
        domain: a,
    })
}

/// `WO^n = ∀A ∃T wo(T, A)`.
pub fn build_wo_axiom(n: usize) -> Result<Formula> {
    let o = build_order_formulas(n)?;
    Ok(Formula::forall_pred(&o.domain, Formula::exists_pred(&o.order, o.wo)))
}

/// `LO^n = ∀A ∃T lo(T, A)`.
pub fn build_lo_axiom(n: usize) -> Result<Formula> {
    let o = build_order_formulas(n)?;
    Ok(Formula::forall_pred(&o.domain, Formula::exists_pred(&o.order, o.lo)))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChoiceInstance {
    pub antecedent: Formula,
    pub consequent: Formula,
    pub full: Formula,
    /// The consequent without its leading `∃S`.
    pub consequent_body: Formula,
    pub selector: PredVar,
    pub witness: PredVar,
}

fn check_reserved(h: &Formula, n: usize, m: usize) -> Result<()> {
    let s = s_var(n, m);
    if h.all_pred_vars().contains(&s) {
        return Err(Error::ReservedVariable(s.to_string()));
    }
    let free = h.free_ind();
    if let Some(y) = ys(m).into_iter().find(|y| free.contains(y)) {
        return Err(Error::ReservedVariable(y.to_string()));
    }
    Ok(())
}

fn choice_impl(h: &Formula, n: usize, m: usize, guard: Option<&PredVar>) -> Result<ChoiceInstance> {
    if n == 0 || m == 0 {
        return Err(Error::ZeroArity);
    }
    check_reserved(h, n, m)?;
    let (x, y) = (xs(n), ys(m));
    let (d, s) = (d_var(m), s_var(n, m));
    let guarded = |f: Formula| match guard {
        Some(a) => Formula::implies(Formula::pred(a, &x), f),
        None => f,
    };
    let antecedent = Formula::forall_all(&x, Formula::exists_pred(&d, guarded(h.clone())));
    let section = Formula::forall_all(
        &y,
        Formula::iff(Formula::pred(&d, &y), Formula::pred(&s, &args(&[&x, &y]))),
    );
    let consequent_body = Formula::forall_all(
        &x,
        Formula::exists_pred(&d, guarded(Formula::and(section, h.clone()))),
    );
    let consequent = Formula::exists_pred(&s, consequent_body.clone());
    Ok(ChoiceInstance {
        full: Formula::implies(antecedent.clone(), consequent.clone()),
        antecedent,
        consequent,
        consequent_body,
        selector: s,
        witness: d,
    })
}

/// `choice_h^{n,m}(H) = ∀x∃D H → ∃S∀x∃D(∀y(Dy ↔ Sxy) ∧ H)`.
pub fn build_choice_instance(h: &Formula, n: usize, m: usize) -> Result<ChoiceInstance> {
    choice_impl(h, n, m, None)
}

/// The variant relativized to `A` (arity `n`):
/// `∀x∃D(Ax → H) → ∃S∀x∃D(Ax → ∀y(Dy ↔ Sxy) ∧ H)`.
pub fn build_guarded_choice_instance(h: &Formula, n: usize, m: usize) -> Result<ChoiceInstance> {
    choice_impl(h, n, m, Some(&PredVar::new("A", n)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse;

    fn k(blocks: &[&[usize]]) -> SetPartition {
        SetPartition::new(blocks.iter().map(|b| b.to_vec()).collect()).unwrap()
    }

    fn v(names: &[&str]) -> Vec<IndVar> {
        names.iter().map(|s| IndVar::new(*s)).collect()
    }

    #[test]
    fn pattern_examples() {
        assert_eq!(build_pattern(&k(&[&[1, 2]]), 2).unwrap().to_string(), "x1 = x2");
        assert_eq!(build_pattern(&k(&[&[1], &[2]]), 2).unwrap().to_string(), "~x1 = x2");
        assert_eq!(build_pattern(&SetPartition::empty(), 3).unwrap().to_string(), "x1 = x1");
        assert_eq!(build_pattern(&k(&[&[2]]), 3).unwrap().to_string(), "x2 = x2");
        assert_eq!(
            build_pattern(&k(&[&[1, 3], &[2]]), 3).unwrap().to_string(),
            "(x1 = x3 & ~x1 = x2)"
        );
        assert!(matches!(
            build_pattern(&k(&[&[1, 4]]), 3),
            Err(Error::BlockIndexOutOfRange { index: 4, n: 3 })
        ));
    }

    #[test]
    fn cell_formula_examples() {
        let c = CellDescriptor::new(1, vec![2], k(&[&[1]])).unwrap();
        assert_eq!(build_cell_formula(&c, 1, 1).unwrap().to_string(), "(B1_2 x1 & x1 = x1)");
        let c = CellDescriptor::new(0, vec![1, 1], k(&[&[1, 2]])).unwrap();
        assert_eq!(
            build_cell_formula(&c, 2, 0).unwrap().to_string(),
            "((B1_1 x1 & B1_1 x2) & x1 = x2)"
        );
        assert!(build_cell_formula(&c, 2, 1).is_err());
    }

    #[test]
    fn enum_base_case() {
        let f = build_enum(1, 1, &v(&["v1", "v2"]), &v(&["w1", "w2"])).unwrap();
        assert_eq!(f.to_string(), "(~v1 = w1 & ~v1 = w2)");
        let f = build_enum(1, 2, &v(&["v1", "v2"]), &v(&["w1", "w2"])).unwrap();
        assert_eq!(f.to_string(), "((~v2 = w1 & ~v2 = w2) & (v1 = w1 | v1 = w2))");
        assert!(matches!(
            build_enum(3, 2, &v(&["v1", "v2"]), &v(&["w1", "w2"])),
            Err(Error::EnumRange { .. })
        ));
    }

    #[test]
    fn swap_empty_index_set() {
        let f = build_swap(&[1, 2], 2, 1, 2).unwrap();
        assert_eq!(f.to_string(), "((x1 = x0_1 & x2 = x0_2) & y1 = y0_1)");
        assert!(build_swap(&[1, 4], 2, 1, 2).is_err());
    }

    #[test]
    fn guard_only_differs_on_repeats() {
        // with a single fresh position there is nothing to guard
        assert_eq!(build_swap(&[2], 1, 2, 1).unwrap(), build_swap_literal(&[2], 1, 2, 1).unwrap());
        assert_ne!(build_swap(&[1, 1], 2, 1, 0).unwrap(), build_swap_literal(&[1, 1], 2, 1, 0).unwrap());
    }

    #[test]
    fn choice_instance_text() {
        let h = parse("D1 x1").unwrap();
        let c = build_choice_instance(&h, 1, 1).unwrap();
        assert_eq!(c.antecedent.to_string(), "all x1 ex D1 D1 x1");
        assert_eq!(
            c.consequent.to_string(),
            "ex S2 all x1 ex D1 (all y1 (D1 y1 <-> S2 x1 y1) & D1 x1)"
        );
        assert_eq!(c.full, Formula::implies(c.antecedent.clone(), c.consequent.clone()));
        let g = build_guarded_choice_instance(&h, 1, 1).unwrap();
        assert_eq!(g.antecedent.to_string(), "all x1 ex D1 (A1 x1 -> D1 x1)");
        assert_eq!(
            g.consequent.to_string(),
            "ex S2 all x1 ex D1 (A1 x1 -> (all y1 (D1 y1 <-> S2 x1 y1) & D1 x1))"
        );
    }

    #[test]
    fn choice_instance_rejects_reserved_names() {
        let h = parse("D1 y1").unwrap();
        assert_eq!(build_choice_instance(&h, 1, 1), Err(Error::ReservedVariable("y1".into())));
        let h = parse("S2 x1 x1").unwrap();
        assert_eq!(build_choice_instance(&h, 1, 1), Err(Error::ReservedVariable("S2".into())));
        // bound y is fine
        let h = parse("all y1 (D1 y1 <-> y1 = x1)").unwrap();
        assert!(build_choice_instance(&h, 1, 1).is_ok());
    }

    #[test]
    fn order_formulas_shape() {
        let o = build_order_formulas(1).unwrap();
        assert_eq!(
            o.lo.to_string(),
            "(((all x1 (A1 x1 -> T2 x1 x1) & all x1 all x2 ((A1 x1 & A1 x2) -> ((T2 x1 x2 & T2 x2 x1) -> x1 = x2))) \
             & all x1 all x2 all x3 (((A1 x1 & A1 x2) & A1 x3) -> ((T2 x1 x2 & T2 x2 x3) -> T2 x1 x3))) \
             & all x1 all x2 ((A1 x1 & A1 x2) -> (T2 x1 x2 | T2 x2 x1)))"
        );
        assert!(o.wo.to_string().ends_with(
            "all B1 ((all x1 (B1 x1 -> A1 x1) & ex x1 B1 x1) -> ex x0 (B1 x0 & all x1 (B1 x1 -> T2 x0 x1))))"
        ));
        let o2 = build_order_formulas(2).unwrap();
        assert_eq!(o2.order, PredVar::new("T", 4));
        assert!(o2.po.to_string().starts_with("((all x1_1 all x1_2 (A2 x1_1 x1_2 -> T4 x1_1 x1_2 x1_1 x1_2)"));
        assert_eq!(build_wo_axiom(1).unwrap().to_string(), format!("all A1 ex T2 {}", build_order_formulas(1).unwrap().wo));
    }

    #[test]
    fn generated_families_round_trip() {
        let mut all = vec![build_wo_axiom(2).unwrap(), build_lo_axiom(1).unwrap()];
        all.push(build_swap(&[3, 3, 1], 3, 2, 2).unwrap());
        all.push(build_swap_literal(&[2, 2], 2, 2, 1).unwrap());
        all.push(build_enum(3, 3, &xs(3), &x0s(3)).unwrap());
        let c = CellDescriptor::new(1, vec![2, 2], k(&[&[1], &[2]])).unwrap();
        all.push(build_transport_formula(&c, 2, 1, 1).unwrap());
        all.push(build_choice_instance(&parse("ex y1 (D1 y1 & ~y1 = x1)").unwrap(), 1, 1).unwrap().full);
        for f in all {
            assert_eq!(parse(&f.to_string()).unwrap(), f);
        }
    }

    mod semantics {
        use super::*;
        use crate::atoms::{tuple, Atom};
        use crate::eval::{eval_nominal, Bounds};
        use crate::partition::{classify, enumerate_cells, representative};
        use crate::transporter::transport_perm;

        fn holds(f: &Formula, a: &Assignment) -> bool {
            eval_nominal(f, a, Bounds::default()).unwrap().is_true()
        }

        fn bind(vars: &[IndVar], vals: &[u32]) -> Assignment {
            let mut a = Assignment::new();
            a.bind_tuple(vars, &tuple(vals));
            a
        }

        fn vw(v: &[u32], w: &[u32]) -> (Vec<IndVar>, Vec<IndVar>, Assignment) {
            let vv: Vec<IndVar> = (1..=v.len()).map(|i| IndVar(format!("v{i}"))).collect();
            let ww: Vec<IndVar> = (1..=w.len()).map(|i| IndVar(format!("w{i}"))).collect();
            let mut a = bind(&vv, v);
            a.bind_tuple(&ww, &tuple(w));
            (vv, ww, a)
        }

        /// Position-by-position count of new values, straight from the
        /// definition.
        fn is_tth_new(t: usize, i: usize, v: &[u32], w: &[u32]) -> bool {
            let mut seen: Vec<u32> = Vec::new();
            for (s, &val) in v[..i].iter().enumerate() {
                let new = !w.contains(&val) && !seen.contains(&val);
                if new {
                    seen.push(val);
                }
                if s + 1 == i {
                    return new && seen.len() == t;
                }
            }
            false
        }

        #[test]
        fn enum_examples() {
            let (v, w, a) = vw(&[3, 5], &[3, 4]);
            assert!(holds(&build_enum(1, 2, &v, &w).unwrap(), &a));
            let (v, w, a) = vw(&[5, 5], &[3, 4]);
            assert!(!holds(&build_enum(2, 2, &v, &w).unwrap(), &a));
            // a repeated value before the second new one
            let (v, w, a) = vw(&[0, 9, 0, 7], &[1, 2, 3, 4]);
            assert!(holds(&build_enum(3, 4, &v, &w).unwrap(), &a));
            assert!(!holds(&build_enum(3, 3, &v, &w).unwrap(), &a));
        }

        #[test]
        fn enum_matches_definition_exhaustively() {
            let pool = [0u32, 1, 2, 3];
            for n in 1..=3usize {
                let tuples: Vec<Vec<u32>> = (0..pool.len().pow(n as u32))
                    .map(|mut c| {
                        (0..n)
                            .map(|_| {
                                let d = pool[c % pool.len()];
                                c /= pool.len();
                                d
                            })
                            .collect()
                    })
                    .collect();
                for v in &tuples {
                    for w in tuples.iter().step_by(3) {
                        let (vv, ww, a) = vw(v, w);
                        for i in 1..=n {
                            for t in 1..=i {
                                let f = build_enum(t, i, &vv, &ww).unwrap();
                                assert_eq!(holds(&f, &a), is_tth_new(t, i, v, w), "t={t} i={i} v={v:?} w={w:?}");
                            }
                        }
                    }
                }
            }
        }

        #[test]
        fn pattern_and_cell_coherence() {
            let frame = SupportFrame::from_ids(&[2, 6]);
            let mut base = beta_assignment(&frame);
            let cells = enumerate_cells(2, 2).unwrap();
            for a in 0..8u32 {
                for b in 0..8u32 {
                    base.bind_tuple(&xs(2), &tuple(&[a, b]));
                    let t = tuple(&[a, b]);
                    let own = classify(&t, &frame).unwrap();
                    for c in &cells {
                        let f = build_cell_formula(c, 2, 2).unwrap();
                        assert_eq!(holds(&f, &base), *c == own, "{c} at {t:?}");
                        let restricted: Vec<Atom> = c.k().ground().iter().map(|&i| t[i - 1]).collect();
                        let expected = restricted.is_empty() || crate::nominal::equality_pattern_matches(&t, c.k());
                        assert_eq!(holds(&build_pattern(c.k(), 2).unwrap(), &base), expected);
                    }
                }
            }
        }

        fn swap_setup(
            frame: &SupportFrame,
            cell: &CellDescriptor,
            xi: &[Atom],
            eta0: &[Atom],
            eta: &[Atom],
        ) -> Assignment {
            let n = cell.n();
            let mu = frame.fresh(n);
            let rep = representative(frame, &mu, cell).unwrap();
            let mut a = Assignment::new();
            a.bind_tuple(&x0s(n), &rep);
            a.bind_tuple(&xs(n), xi);
            a.bind_tuple(&y0s(eta0.len()), eta0);
            a.bind_tuple(&ys(eta.len()), eta);
            a
        }

        #[test]
        fn swap_lemma_instance() {
            let frame = SupportFrame::from_ids(&[0, 1]);
            let cell = CellDescriptor::new(2, vec![3, 3], k(&[&[1], &[2]])).unwrap();
            let xi = tuple(&[3, 5]);
            let plan = transport_perm(&frame, &frame.fresh(2), &cell, &xi).unwrap();
            let swap = build_swap(cell.e(), 2, 2, 2).unwrap();
            let eta0 = tuple(&[2, 7]);
            let eta = plan.perm.apply_tuple(&eta0);
            assert_eq!(eta, tuple(&[3, 7]));
            assert!(holds(&swap, &swap_setup(&frame, &cell, &xi, &eta0, &eta)));
            assert!(!holds(&swap, &swap_setup(&frame, &cell, &xi, &eta0, &tuple(&[2, 7]))));
            assert!(!holds(&swap, &swap_setup(&frame, &cell, &xi, &eta0, &tuple(&[3, 5]))));
        }

        #[test]
        fn literal_swap_fails_on_repeated_fresh_value() {
            let frame = SupportFrame::empty();
            let cell = CellDescriptor::new(0, vec![1, 1], k(&[&[1, 2]])).unwrap();
            let xi = tuple(&[5, 5]);
            let eta0 = tuple(&[5]);
            let plan = transport_perm(&frame, &frame.fresh(2), &cell, &xi).unwrap();
            let eta = plan.perm.apply_tuple(&eta0);
            assert_eq!(eta, tuple(&[0]));
            let a = swap_setup(&frame, &cell, &xi, &eta0, &eta);
            assert!(!holds(&build_swap_literal(cell.e(), 2, 1, 0).unwrap(), &a));
            assert!(holds(&build_swap(cell.e(), 2, 1, 0).unwrap(), &a));
        }

        #[test]
        fn swap_uniqueness_small_sweep() {
            let frame = SupportFrame::from_ids(&[4]);
            for cell in enumerate_cells(2, 1).unwrap() {
                let swap = build_swap(cell.e(), 2, 1, 1).unwrap();
                let pool: Vec<Atom> = (0..7).map(Atom).collect();
                for a in &pool {
                    for b in &pool {
                        let xi = vec![*a, *b];
                        if classify(&xi, &frame).unwrap() != cell {
                            continue;
                        }
                        let plan = transport_perm(&frame, &frame.fresh(2), &cell, &xi).unwrap();
                        for y0 in &pool {
                            let expected = plan.perm.apply(*y0);
                            for y in &pool {
                                let asg = swap_setup(&frame, &cell, &xi, &[*y0], &[*y]);
                                assert_eq!(holds(&swap, &asg), *y == expected, "{cell} xi={xi:?} y0={y0} y={y}");
                            }
                        }
                    }
                }
            }
        }

        #[test]
        fn order_formulas_on_examples() {
            let o = build_order_formulas(1).unwrap();
            let dom = FinSuppPredicate::from_tuples(1, &[tuple(&[0]), tuple(&[1])]).unwrap();
            let le = FinSuppPredicate::from_tuples(2, &[tuple(&[0, 0]), tuple(&[0, 1]), tuple(&[1, 1])]).unwrap();
            let a = Assignment::new()
                .with_pred(&o.domain, dom.clone())
                .unwrap()
                .with_pred(&o.order, le)
                .unwrap();
            assert!(holds(&o.po, &a));
            assert!(holds(&o.lo, &a));
            // the universal predicate quantifier can only be refuted by search
            assert!(eval_nominal(&o.wo, &a, Bounds::default()).unwrap().is_unknown());
            let a = Assignment::new()
                .with_pred(&o.domain, dom)
                .unwrap()
                .with_pred(&o.order, FinSuppPredicate::empty(2))
                .unwrap();
            assert!(!holds(&o.wo, &a));
        }
    }
}

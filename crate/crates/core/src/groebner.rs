//! Division, S-polynomials, reduced Gröbner bases and elimination ideals.
//!
//! The public division routine works over the rationals and records
//! quotients. Buchberger's algorithm runs on an internal integer
//! representation with fraction-free reduction steps, keeping every basis
//! element primitive.

use std::cmp::Ordering;
use std::collections::HashSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::cancel::Deadline;
use crate::error::{Error, Result};
use crate::poly::{Context, Monomial, MonomialOrder, Polynomial};
use crate::rational::Rational;

/// Outcome of multivariate division: `p = Σ quotients[i]·divisors[i] + remainder`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Division {
    pub quotients: Vec<Polynomial>,
    pub remainder: Polynomial,
}

fn shared_context<'a>(p: &'a Polynomial, others: &[Polynomial]) -> Result<&'a Context> {
    if others.iter().any(|g| g.context() != p.context()) {
        return Err(Error::ContextMismatch);
    }
    Ok(p.context())
}

/// Multivariate division. Divisors are tried in list order and the current
/// leading term is always reduced first; zero divisors are skipped.
pub fn divide(p: &Polynomial, divisors: &[Polynomial], ord: MonomialOrder) -> Result<Division> {
    let ctx = shared_context(p, divisors)?;
    let leads: Vec<Option<(Monomial, Rational)>> =
        divisors.iter().map(|g| g.leading_term(ord).ok()).collect();
    let mut quotients = vec![Polynomial::zero(ctx); divisors.len()];
    let mut remainder = Polynomial::zero(ctx);
    let mut rest = p.clone();
    while !rest.is_zero() {
        let (m, c) = rest.leading_term(ord)?;
        let hit = leads.iter().enumerate().find_map(|(i, lt)| {
            let (lm, lc) = lt.as_ref()?;
            lm.quotient_of(&m).map(|q| (i, q, &c / lc))
        });
        match hit {
            Some((i, q, coef)) => {
                quotients[i] = &quotients[i] + &Polynomial::monomial(ctx, q.clone(), coef.clone());
                rest = rest.checked_sub(&divisors[i].mul_term(&q, &coef)?)?;
            }
            None => {
                let lt = Polynomial::monomial(ctx, m, c);
                remainder = &remainder + &lt;
                rest = &rest - &lt;
            }
        }
    }
    Ok(Division { quotients, remainder })
}

/// Remainder of [`divide`]: no term is divisible by a leading monomial of
/// `divisors`.
pub fn normal_form(p: &Polynomial, divisors: &[Polynomial], ord: MonomialOrder) -> Result<Polynomial> {
    Ok(divide(p, divisors, ord)?.remainder)
}

/// `S(f, g) = (L/lt(f))·f − (L/lt(g))·g` with `L` the lcm of the leading
/// monomials and leading coefficients normalized to one.
pub fn s_polynomial(f: &Polynomial, g: &Polynomial, ord: MonomialOrder) -> Result<Polynomial> {
    if f.context() != g.context() {
        return Err(Error::ContextMismatch);
    }
    let (mf, cf) = f.leading_term(ord)?;
    let (mg, cg) = g.leading_term(ord)?;
    let l = mf.lcm(&mg);
    let tf = mf.quotient_of(&l).expect("lcm is a multiple");
    let tg = mg.quotient_of(&l).expect("lcm is a multiple");
    let one = Rational::one();
    f.mul_term(&tf, &(&one / cf))?.checked_sub(&g.mul_term(&tg, &(&one / cg))?)
}

/// Buchberger's criterion: every pairwise S-polynomial reduces to zero.
pub fn is_groebner_basis(basis: &[Polynomial], ord: MonomialOrder) -> Result<bool> {
    for (i, f) in basis.iter().enumerate() {
        for g in &basis[i + 1..] {
            if !normal_form(&s_polynomial(f, g, ord)?, basis, ord)?.is_zero() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

// ---------------------------------------------------------------------------
// Integer engine

type Term = (Monomial, BigInt);

/// Nonzero polynomial with integer coefficients, terms sorted descending.
#[derive(Clone, Debug)]
struct Row {
    terms: Vec<Term>,
}

impl Row {
    fn from_poly(p: &Polynomial, ord: MonomialOrder) -> Option<Row> {
        if p.is_zero() {
            return None;
        }
        let prim = p.primitive(ord).ok()?;
        let mut terms: Vec<Term> =
            prim.terms().map(|(m, c)| (m.clone(), c.numer().clone())).collect();
        terms.sort_by(|a, b| ord.cmp(&b.0, &a.0));
        Some(Row { terms })
    }

    fn to_poly(&self, ctx: &Context) -> Polynomial {
        Polynomial::from_terms(
            ctx,
            self.terms.iter().map(|(m, c)| (m.clone(), Rational::from_integer(c.clone()))),
        )
    }

    fn lm(&self) -> &Monomial {
        &self.terms[0].0
    }

    fn lc(&self) -> &BigInt {
        &self.terms[0].1
    }

    fn is_constant(&self) -> bool {
        self.lm().is_one()
    }

    fn normalize(&mut self) {
        make_primitive(&mut self.terms, &mut []);
    }
}

/// Divides `a` and `b` jointly by their content and makes the leading
/// coefficient of `a` (or of `b` when `a` is empty) positive.
fn make_primitive(a: &mut [Term], b: &mut [Term]) {
    let mut g = BigInt::zero();
    for (_, c) in a.iter().chain(b.iter()) {
        g = g.gcd(c);
        if g.is_one() {
            break;
        }
    }
    let lead_negative = a
        .first()
        .or_else(|| b.first())
        .map(|(_, c)| c.is_negative())
        .unwrap_or(false);
    if lead_negative {
        g = -g;
    }
    if g.is_zero() || g.is_one() {
        return;
    }
    for (_, c) in a.iter_mut().chain(b.iter_mut()) {
        *c = &*c / &g;
    }
}

/// `ca·p[start..] − cg·q·g` with both leading terms dropped, merged in order.
fn combine(
    p: &[Term],
    ca: &BigInt,
    g: &Row,
    q: &Monomial,
    cg: &BigInt,
    ord: MonomialOrder,
) -> Result<Vec<Term>> {
    let mut out = Vec::with_capacity(p.len() + g.terms.len());
    let mut left = p.iter().skip(1).peekable();
    let mut right = g.terms[1..]
        .iter()
        .map(|(m, c)| Ok((m.mul(q)?, c)))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .peekable();
    let scale_left = !ca.is_one();
    loop {
        let which = match (left.peek(), right.peek()) {
            (None, None) => break,
            (Some(_), None) => Ordering::Greater,
            (None, Some(_)) => Ordering::Less,
            (Some(a), Some(b)) => ord.cmp(&a.0, &b.0),
        };
        match which {
            Ordering::Greater => {
                let (m, c) = left.next().unwrap();
                out.push((m.clone(), if scale_left { c * ca } else { c.clone() }));
            }
            Ordering::Less => {
                let (m, c) = right.next().unwrap();
                out.push((m, -(c * cg)));
            }
            Ordering::Equal => {
                let (m, a) = left.next().unwrap();
                let (_, b) = right.next().unwrap();
                let v = a * ca - b * cg;
                if !v.is_zero() {
                    out.push((m.clone(), v));
                }
            }
        }
    }
    Ok(out)
}

const CONTENT_EVERY: usize = 16;

/// Fully reduces `p` modulo `basis` (first divisible element wins). The
/// result is a nonzero scalar multiple of the rational normal form, made
/// primitive, or `None` for zero.
fn reduce(mut cur: Vec<Term>, basis: &[Row], ord: MonomialOrder, deadline: &Deadline) -> Result<Option<Row>> {
    let mut rem: Vec<Term> = Vec::new();
    let mut steps = 0usize;
    while let Some((m, c)) = cur.first() {
        let hit = basis.iter().find_map(|g| g.lm().quotient_of(m).map(|q| (g, q)));
        match hit {
            Some((g, q)) => {
                let d = c.gcd(g.lc());
                let ca = g.lc() / &d;
                let cg = c / &d;
                let next = combine(&cur, &ca, g, &q, &cg, ord)?;
                if !ca.is_one() {
                    for (_, r) in rem.iter_mut() {
                        *r *= &ca;
                    }
                }
                cur = next;
                steps += 1;
                if steps.is_multiple_of(CONTENT_EVERY) {
                    make_primitive(&mut rem, &mut cur);
                }
                deadline.check()?;
            }
            None => {
                // Irreducible leading term moves to the remainder.
                let t = cur.remove(0);
                rem.push(t);
            }
        }
    }
    if rem.is_empty() {
        return Ok(None);
    }
    let mut row = Row { terms: rem };
    row.normalize();
    Ok(Some(row))
}

fn s_row(f: &Row, g: &Row, ord: MonomialOrder) -> Result<Vec<Term>> {
    let l = f.lm().lcm(g.lm());
    let tf = f.lm().quotient_of(&l).expect("lcm");
    let tg = g.lm().quotient_of(&l).expect("lcm");
    let d = f.lc().gcd(g.lc());
    let ca = g.lc() / &d;
    let cg = f.lc() / &d;
    // ca·tf·f − cg·tg·g: lift f by tf first, then reuse `combine`.
    let lifted: Vec<Term> = f
        .terms
        .iter()
        .map(|(m, c)| Ok((m.mul(&tf)?, c.clone())))
        .collect::<Result<_>>()?;
    combine(&lifted, &ca, g, &tg, &cg, ord)
}

#[derive(Clone, Debug)]
struct Pair {
    i: usize,
    j: usize,
    lcm: Monomial,
}

/// Reduced Gröbner basis of the ideal spanned by `gens` under `ord`.
///
/// Elements are primitive integer polynomials with positive leading
/// coefficient, listed in descending order of their leading monomials.
/// `deadline` is polled after every reduction step.
pub fn buchberger(gens: &[Polynomial], ord: MonomialOrder, deadline: &Deadline) -> Result<Vec<Polynomial>> {
    let Some(first) = gens.first() else {
        return Err(Error::EmptyIdeal);
    };
    let ctx = shared_context(first, gens)?.clone();
    let mut basis: Vec<Row> = Vec::new();
    for g in gens {
        if let Some(row) = Row::from_poly(g, ord) {
            basis.push(row);
        }
    }
    if basis.is_empty() {
        return Err(Error::EmptyIdeal);
    }
    let unit = || Ok(vec![Polynomial::one(&ctx)]);
    if basis.iter().any(Row::is_constant) {
        return unit();
    }

    let mut pending: Vec<Pair> = Vec::new();
    let mut pending_set: HashSet<(usize, usize)> = HashSet::new();
    let push_pairs = |basis: &[Row], k: usize, pending: &mut Vec<Pair>, set: &mut HashSet<(usize, usize)>| {
        for i in 0..k {
            pending.push(Pair { i, j: k, lcm: basis[i].lm().lcm(basis[k].lm()) });
            set.insert((i, k));
        }
    };
    for k in 1..basis.len() {
        push_pairs(&basis, k, &mut pending, &mut pending_set);
    }

    while !pending.is_empty() {
        deadline.check()?;
        // Normal selection: smallest lcm, ties by pair index.
        let (pos, _) = pending
            .iter()
            .enumerate()
            .min_by(|(_, a), (_, b)| ord.cmp(&a.lcm, &b.lcm).then((a.j, a.i).cmp(&(b.j, b.i))))
            .expect("nonempty");
        let pair = pending.swap_remove(pos);
        pending_set.remove(&(pair.i, pair.j));

        let (fi, fj) = (&basis[pair.i], &basis[pair.j]);
        if fi.lm().is_coprime(fj.lm()) {
            continue;
        }
        let key = |a: usize, b: usize| if a < b { (a, b) } else { (b, a) };
        let chain = (0..basis.len()).any(|k| {
            k != pair.i
                && k != pair.j
                && basis[k].lm().divides(&pair.lcm)
                && !pending_set.contains(&key(pair.i, k))
                && !pending_set.contains(&key(pair.j, k))
        });
        if chain {
            continue;
        }

        let s = s_row(fi, fj, ord)?;
        if let Some(h) = reduce(s, &basis, ord, deadline)? {
            if h.is_constant() {
                return unit();
            }
            basis.push(h);
            let k = basis.len() - 1;
            push_pairs(&basis, k, &mut pending, &mut pending_set);
        }
    }

    // Minimalize: drop elements whose leading monomial is a multiple of
    // another's (earliest survives among equal leads).
    let keep: Vec<usize> = (0..basis.len())
        .filter(|&i| {
            !(0..basis.len()).any(|j| {
                j != i
                    && basis[j].lm().divides(basis[i].lm())
                    && (basis[j].lm() != basis[i].lm() || j < i)
            })
        })
        .collect();
    let minimal: Vec<Row> = keep.iter().map(|&i| basis[i].clone()).collect();

    let mut reduced = Vec::with_capacity(minimal.len());
    for (i, g) in minimal.iter().enumerate() {
        let others: Vec<Row> =
            minimal.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, r)| r.clone()).collect();
        // Leading term is irreducible by the others, so only the tail moves.
        let row = reduce(g.terms.clone(), &others, ord, deadline)?.expect("minimal element survives");
        reduced.push(row);
    }
    reduced.sort_by(|a, b| ord.cmp(b.lm(), a.lm()));
    Ok(reduced.iter().map(|r| r.to_poly(&ctx)).collect())
}

/// Result of eliminating variables: the full basis (in the reordered context,
/// eliminated variables first) and the generators of the elimination ideal.
#[derive(Clone, Debug)]
pub struct Elimination {
    pub full_context: Context,
    pub full_basis: Vec<Polynomial>,
    pub retained_context: Context,
    pub ideal: Vec<Polynomial>,
}

/// Generators of `⟨gens⟩ ∩ ℚ[retained]`, expressed in the retained context.
pub fn eliminate(gens: &[Polynomial], elim_vars: &[&str], deadline: &Deadline) -> Result<Vec<Polynomial>> {
    Ok(eliminate_full(gens, elim_vars, deadline)?.ideal)
}

pub fn eliminate_full(gens: &[Polynomial], elim_vars: &[&str], deadline: &Deadline) -> Result<Elimination> {
    let Some(first) = gens.first() else {
        return Err(Error::EmptyIdeal);
    };
    let ctx = shared_context(first, gens)?;
    let mut elim = Vec::new();
    for v in elim_vars {
        let i = ctx.index_of(v).ok_or_else(|| Error::UnknownVariable(v.to_string()))?;
        if !elim.contains(&i) {
            elim.push(i);
        }
    }
    elim.sort_unstable();
    let retained: Vec<usize> = (0..ctx.len()).filter(|i| !elim.contains(i)).collect();
    let order: Vec<usize> = elim.iter().chain(&retained).copied().collect();
    let full_context = Context::new(order.iter().map(|&i| ctx.name(i).to_string()));
    let retained_context = Context::new(retained.iter().map(|&i| ctx.name(i).to_string()));

    let mut map = vec![None; ctx.len()];
    for (new, &old) in order.iter().enumerate() {
        map[old] = Some(new);
    }
    let moved = gens.iter().map(|g| g.remap(&full_context, &map)).collect::<Result<Vec<_>>>()?;

    let full_basis = match buchberger(&moved, MonomialOrder::Block(elim.len()), deadline) {
        Ok(b) => b,
        Err(Error::EmptyIdeal) => {
            return Ok(Elimination { full_context, full_basis: vec![], retained_context, ideal: vec![] });
        }
        Err(e) => return Err(e),
    };
    let k = elim.len();
    let mut back = vec![None; full_context.len()];
    for (pos, slot) in back.iter_mut().enumerate().skip(k) {
        *slot = Some(pos - k);
    }
    let ideal = full_basis
        .iter()
        .filter(|g| (0..k).all(|v| !g.involves(v)))
        .map(|g| g.remap(&retained_context, &back))
        .collect::<Result<Vec<_>>>()?;
    Ok(Elimination { full_context, full_basis, retained_context, ideal })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_system;
    use crate::rational::int;

    fn sys(exprs: &[&str]) -> (Context, Vec<Polynomial>) {
        parse_system(exprs).unwrap()
    }

    #[test]
    fn thales_remainder_is_zero() {
        let (_, ps) = sys(&["(x+1)*(x-1) + y^2", "x^2 + y^2 - 1"]);
        let r = normal_form(&ps[0], &ps[1..], MonomialOrder::GrLex).unwrap();
        assert!(r.is_zero());
    }

    #[test]
    fn nothing_divides() {
        let (_, ps) = sys(&["x", "y"]);
        assert_eq!(normal_form(&ps[0], &ps[1..], MonomialOrder::Lex).unwrap(), ps[0]);
    }

    #[test]
    fn hand_division_circle_by_line() {
        // x^2 + y^2 - 1 by x - y under lex x > y:
        //   step 1: lt x^2 = x*(x - y) -> rest x*y + y^2 - 1
        //   step 2: lt x*y = y*(x - y) -> rest 2*y^2 - 1, irreducible.
        let (_, ps) = sys(&["x^2 + y^2 - 1", "x - y"]);
        let d = divide(&ps[0], &ps[1..], MonomialOrder::Lex).unwrap();
        assert_eq!(d.remainder.to_string(), "2*y^2 - 1");
        assert_eq!(d.quotients[0].to_string(), "x + y");
    }

    #[test]
    fn division_rejects_foreign_context() {
        let (_, a) = sys(&["x"]);
        let (_, b) = sys(&["y"]);
        assert_eq!(normal_form(&a[0], &b, MonomialOrder::Lex), Err(Error::ContextMismatch));
    }

    #[test]
    fn s_polynomial_examples() {
        let (_, ps) = sys(&["x^2 + y^2 - 1", "x - y"]);
        let s = s_polynomial(&ps[0], &ps[0], MonomialOrder::Lex).unwrap();
        assert!(s.is_zero());
        // x^2 + y^2 - 1 - x*(x - y) = x*y + y^2 - 1
        let s = s_polynomial(&ps[0], &ps[1], MonomialOrder::Lex).unwrap();
        assert_eq!(s.to_string(), "x*y + y^2 - 1");
        let zero = Polynomial::zero(ps[0].context());
        assert_eq!(s_polynomial(&zero, &ps[1], MonomialOrder::Lex), Err(Error::ZeroPolynomial));
    }

    #[test]
    fn coprime_leads_reduce_to_zero() {
        let (_, ps) = sys(&["x^2 + x", "y^2 - y"]);
        let s = s_polynomial(&ps[0], &ps[1], MonomialOrder::GrLex).unwrap();
        assert!(normal_form(&s, &ps, MonomialOrder::GrLex).unwrap().is_zero());
    }

    #[test]
    fn buchberger_examples() {
        let none = Deadline::none();
        let (_, ps) = sys(&["x^2 + y^2 - 1"]);
        assert_eq!(buchberger(&ps, MonomialOrder::GrLex, &none).unwrap(), ps);

        let (_, ps) = sys(&["x^2 + y^2 - 1", "x - y"]);
        let gb = buchberger(&ps, MonomialOrder::Lex, &none).unwrap();
        let strs: Vec<String> = gb.iter().map(|p| p.to_string()).collect();
        assert_eq!(strs, ["x - y", "2*y^2 - 1"]);

        let (ctx, _) = sys(&["x"]);
        let one = Polynomial::constant(&ctx, int(1));
        assert_eq!(buchberger(std::slice::from_ref(&one), MonomialOrder::Lex, &none).unwrap(), vec![one]);
    }

    #[test]
    fn buchberger_errors() {
        let (ctx, _) = sys(&["x"]);
        let zero = Polynomial::zero(&ctx);
        assert_eq!(buchberger(&[zero], MonomialOrder::Lex, &Deadline::none()), Err(Error::EmptyIdeal));
        assert_eq!(buchberger(&[], MonomialOrder::Lex, &Deadline::none()), Err(Error::EmptyIdeal));
        let (_, ps) = sys(&["x^2 - y", "x*y - 1"]);
        let expired = Deadline::after_ms(0);
        std::thread::sleep(std::time::Duration::from_millis(2));
        assert_eq!(buchberger(&ps, MonomialOrder::Lex, &expired), Err(Error::Cancelled));
    }

    #[test]
    fn eliminate_examples() {
        let none = Deadline::none();
        let (_, ps) = sys(&["x^2 + y^2 - 1"]);
        assert_eq!(eliminate(&ps, &[], &none).unwrap(), ps);

        // x = t^2, y = t  =>  x = y^2
        let (_, ps) = sys(&["x - t^2", "y - t"]);
        let e = eliminate(&ps, &["t"], &none).unwrap();
        assert_eq!(e.len(), 1);
        assert_eq!(e[0].context().names(), &["x", "y"]);
        assert_eq!(e[0].to_string(), "y^2 - x");

        assert!(matches!(eliminate(&ps, &["q"], &none), Err(Error::UnknownVariable(_))));
    }
}

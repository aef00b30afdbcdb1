use std::cmp::Ordering;

use super::Monomial;

/// Admissible term orders. Variables earlier in the context rank higher.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MonomialOrder {
    Lex,
    GrLex,
    GRevLex,
    /// The first `n` variables compared by graded reverse lex, ties broken by
    /// graded lex on the rest. Any monomial involving one of the first `n`
    /// variables beats every monomial free of them.
    Block(usize),
}

impl MonomialOrder {
    pub fn cmp(&self, a: &Monomial, b: &Monomial) -> Ordering {
        let (a, b) = (a.exponents(), b.exponents());
        match *self {
            MonomialOrder::Lex => lex(a, b),
            MonomialOrder::GrLex => grlex(a, b),
            MonomialOrder::GRevLex => grevlex(a, b),
            MonomialOrder::Block(n) => {
                let n = n.min(a.len());
                grevlex(&a[..n], &b[..n]).then_with(|| grlex(&a[n..], &b[n..]))
            }
        }
    }
}

fn degree(e: &[u32]) -> u64 {
    e.iter().map(|&x| x as u64).sum()
}

fn lex(a: &[u32], b: &[u32]) -> Ordering {
    a.cmp(b)
}

fn grlex(a: &[u32], b: &[u32]) -> Ordering {
    degree(a).cmp(&degree(b)).then_with(|| lex(a, b))
}

fn grevlex(a: &[u32], b: &[u32]) -> Ordering {
    degree(a).cmp(&degree(b)).then_with(|| {
        for (x, y) in a.iter().zip(b).rev() {
            if x != y {
                return y.cmp(x);
            }
        }
        Ordering::Equal
    })
}

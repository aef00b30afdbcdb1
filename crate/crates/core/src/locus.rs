//! Symbolic locus equations and ideal-membership proofs.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::cancel::Deadline;
use crate::error::{Error, Result};
use crate::groebner::{buchberger, divide, eliminate};
use crate::linkage::{build_constraints, reduce_variables, LinkageSpec};
use crate::poly::{Monomial, MonomialOrder, Polynomial};
use crate::rational::{self, Rational};

#[derive(Clone, Debug, PartialEq)]
pub struct LocusResult {
    /// Canonical generators of the elimination ideal in `(x, y)`.
    pub generators: Vec<Polynomial>,
    pub principal: bool,
    pub total_degree: u64,
    /// The elimination ideal is the unit ideal or has finitely many zeros.
    pub degenerate: bool,
    pub elapsed_ms: u64,
}

impl LocusResult {
    pub fn canonical_strings(&self) -> Vec<String> {
        self.generators.iter().map(|g| g.to_string()).collect()
    }
}

/// Implicit equation(s) of the path of `M`.
///
/// Uses the reduced four-variable system unless `M = E`, in which case the
/// full system is eliminated directly.
pub fn locus_equation(spec: &LinkageSpec, deadline: &Deadline) -> Result<LocusResult> {
    let start = Instant::now();
    let full = build_constraints(spec)?;
    let system = if spec.coupler_is_e() { full } else { reduce_variables(&full, spec)? };
    let ideal = eliminate(&system.polynomials, &system.eliminate_refs(), deadline)?;
    let generators = ideal.iter().map(Polynomial::canonicalize).collect::<Result<Vec<_>>>()?;
    let total_degree = generators.iter().map(Polynomial::total_degree).max().unwrap_or(0);
    let degenerate = is_degenerate(&generators);
    Ok(LocusResult {
        principal: generators.len() == 1,
        total_degree,
        degenerate,
        generators,
        elapsed_ms: start.elapsed().as_millis() as u64,
    })
}

/// Unit ideal, or a bivariate Gröbner basis with pure powers of both
/// variables among its leading monomials.
fn is_degenerate(generators: &[Polynomial]) -> bool {
    if generators.iter().any(Polynomial::is_constant) {
        return true;
    }
    let leads: Vec<Monomial> = generators
        .iter()
        .filter_map(|g| g.leading_term(MonomialOrder::GrLex).ok().map(|(m, _)| m))
        .collect();
    let nvars = generators.first().map(|g| g.context().len()).unwrap_or(0);
    nvars > 0
        && (0..nvars).all(|v| {
            leads.iter().any(|m| {
                m.exponents().iter().enumerate().all(|(i, &e)| if i == v { e > 0 } else { e == 0 })
            })
        })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// The thesis lies in the hypothesis ideal.
    HoldsPlain,
    /// The thesis lies in the radical of the hypothesis ideal.
    HoldsRadical,
    /// Not proven. This is not a disproof.
    Unknown,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::HoldsPlain => "holds_plain",
            Verdict::HoldsRadical => "holds_radical",
            Verdict::Unknown => "unknown",
        }
    }
}

/// `thesis = Σ quotients[i]·basis[i]` with `basis` a Gröbner basis of the
/// hypotheses.
#[derive(Clone, Debug, PartialEq)]
pub struct Certificate {
    pub basis: Vec<Polynomial>,
    pub quotients: Vec<Polynomial>,
}

impl Certificate {
    pub fn recombine(&self) -> Result<Polynomial> {
        let ctx = self.basis.first().map(|b| b.context().clone());
        let Some(ctx) = ctx else {
            return Err(Error::EmptyIdeal);
        };
        let mut sum = Polynomial::zero(&ctx);
        for (q, b) in self.quotients.iter().zip(&self.basis) {
            sum = sum.checked_add(&q.checked_mul(b)?)?;
        }
        Ok(sum)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Proof {
    pub verdict: Verdict,
    /// Present for `HoldsPlain` with a nonzero thesis.
    pub certificate: Option<Certificate>,
}

const PROVE_ORDER: MonomialOrder = MonomialOrder::GRevLex;

/// Decides `thesis ∈ ⟨hypotheses⟩`, falling back to the Rabinowitsch test
/// `1 ∈ ⟨hypotheses, 1 − t·thesis⟩` for radical membership.
pub fn prove_membership(hypotheses: &[Polynomial], thesis: &Polynomial, deadline: &Deadline) -> Result<Proof> {
    let ctx = thesis.context();
    if hypotheses.iter().any(|h| h.context() != ctx) {
        return Err(Error::ContextMismatch);
    }
    if thesis.is_zero() {
        return Ok(Proof { verdict: Verdict::HoldsPlain, certificate: None });
    }
    let basis = match buchberger(hypotheses, PROVE_ORDER, deadline) {
        Ok(b) => b,
        Err(Error::EmptyIdeal) => Vec::new(),
        Err(e) => return Err(e),
    };
    if !basis.is_empty() {
        let division = divide(thesis, &basis, PROVE_ORDER)?;
        if division.remainder.is_zero() {
            return Ok(Proof {
                verdict: Verdict::HoldsPlain,
                certificate: Some(Certificate { basis, quotients: division.quotients }),
            });
        }
    }

    let t = ctx.fresh_name("t");
    let extended = ctx.extended(&t);
    let mut gens = hypotheses.iter().map(|h| h.to_context(&extended)).collect::<Result<Vec<_>>>()?;
    let tvar = Polynomial::var(&extended, &t)?;
    gens.push(Polynomial::one(&extended) - tvar * thesis.to_context(&extended)?);
    let gb = buchberger(&gens, PROVE_ORDER, deadline)?;
    let verdict = if gb.len() == 1 && gb[0].is_constant() { Verdict::HoldsRadical } else { Verdict::Unknown };
    Ok(Proof { verdict, certificate: None })
}

// ---------------------------------------------------------------------------
// Wire form

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermWire {
    pub coeff: String,
    pub exps: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolynomialWire {
    pub string: String,
    pub terms: Vec<TermWire>,
}

impl PolynomialWire {
    /// Terms in the same descending graded-lex order as `string`.
    pub fn from_polynomial(p: &Polynomial) -> Self {
        Self {
            string: p.to_string(),
            terms: p
                .sorted_terms(MonomialOrder::GrLex)
                .into_iter()
                .map(|(m, c)| TermWire { coeff: rational::to_string(c), exps: m.exponents().to_vec() })
                .collect(),
        }
    }

    pub fn to_polynomial(&self, ctx: &crate::poly::Context) -> Result<Polynomial> {
        let terms = self
            .terms
            .iter()
            .map(|t| {
                if t.exps.len() != ctx.len() {
                    return Err(Error::Parse("term arity does not match context".into()));
                }
                Ok((Monomial::new(t.exps.clone()), rational::parse(&t.coeff)?))
            })
            .collect::<Result<Vec<(Monomial, Rational)>>>()?;
        Ok(Polynomial::from_terms(ctx, terms))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocusWire {
    pub generators: Vec<PolynomialWire>,
    pub degree: u64,
    pub principal: bool,
    pub degenerate: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u64>,
}

impl LocusResult {
    /// JSON-ready form. Timing is optional so identical requests can produce
    /// byte-identical bodies.
    pub fn to_wire(&self, include_timing: bool) -> LocusWire {
        LocusWire {
            generators: self.generators.iter().map(PolynomialWire::from_polynomial).collect(),
            degree: self.total_degree,
            principal: self.principal,
            degenerate: self.degenerate,
            elapsed_ms: include_timing.then_some(self.elapsed_ms),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_system;
    use crate::rational::{frac, int};

    fn none() -> Deadline {
        Deadline::none()
    }

    #[test]
    fn circle_when_m_is_e() {
        let spec = LinkageSpec::camel().with_coupler(int(0), int(0));
        let r = locus_equation(&spec, &none()).unwrap();
        assert_eq!(r.canonical_strings(), ["4*x^2 + 4*y^2 - 121"]);
        assert_eq!(r.total_degree, 2);
        assert!(r.principal && !r.degenerate);
    }

    #[test]
    fn circle_when_m_is_h() {
        let spec = LinkageSpec::camel().with_coupler(int(1), int(0));
        let r = locus_equation(&spec, &none()).unwrap();
        // 4(x - 15)^2 + 4y^2 = 121
        assert_eq!(r.canonical_strings(), ["4*x^2 + 4*y^2 - 120*x + 779"]);
    }

    #[test]
    fn midpoint_of_parallelogram_is_a_circle() {
        // With g = |AB| and equal cranks the coupler translates, so every
        // coupler point moves on a circle of radius f1.
        let mut spec = LinkageSpec::camel().with_coupler(frac(1, 2), int(0));
        spec.g = int(15);
        let r = locus_equation(&spec, &none()).unwrap();
        let ctx = r.generators[0].context().clone();
        let circle = crate::poly::parse_polynomial("4x^2 + 4y^2 - 60x + 104", &ctx).unwrap();
        // The parallelogram branch's circle is a component of the locus.
        assert!(r.generators.iter().all(|g| {
            crate::groebner::normal_form(g, std::slice::from_ref(&circle), MonomialOrder::GrLex)
                .unwrap()
                .is_zero()
        }));
    }

    #[test]
    fn wire_shape() {
        let spec = LinkageSpec::camel().with_coupler(int(0), int(0));
        let r = locus_equation(&spec, &none()).unwrap();
        let json = serde_json::to_string(&r.to_wire(false)).unwrap();
        assert_eq!(
            json,
            r#"{"generators":[{"string":"4*x^2 + 4*y^2 - 121","terms":[{"coeff":"4","exps":[2,0]},{"coeff":"4","exps":[0,2]},{"coeff":"-121","exps":[0,0]}]}],"degree":2,"principal":true,"degenerate":false}"#
        );
        assert!(serde_json::to_string(&r.to_wire(true)).unwrap().contains("\"elapsed_ms\":"));
        let back = r.to_wire(false).generators[0].to_polynomial(r.generators[0].context()).unwrap();
        assert_eq!(back, r.generators[0]);
    }

    #[test]
    fn degeneracy_detection() {
        let (_, g) = parse_system(&["x^2 - 1", "y"]).unwrap();
        assert!(is_degenerate(&g));
        let (_, g) = parse_system(&["x^2 + y^2 - 1"]).unwrap();
        assert!(!is_degenerate(&g));
        let (_, g) = parse_system(&["1 + 0*x"]).unwrap();
        assert!(is_degenerate(&g));
    }

    #[test]
    fn thales_holds_plain() {
        let (_, ps) = parse_system(&["x^2 + y^2 - 1", "(x - (-1))*(x - 1) + (y - 0)*(y - 0)"]).unwrap();
        let proof = prove_membership(&ps[..1], &ps[1], &none()).unwrap();
        assert_eq!(proof.verdict, Verdict::HoldsPlain);
        assert_eq!(proof.certificate.unwrap().recombine().unwrap(), ps[1]);
    }

    #[test]
    fn plain_and_radical_membership() {
        let (_, ps) = parse_system(&["x", "x^2"]).unwrap();
        assert_eq!(prove_membership(&ps[..1], &ps[1], &none()).unwrap().verdict, Verdict::HoldsPlain);
        // x ∉ (x^2) but x ∈ √(x^2): {x^2, 1 - t*x} contains 1 = (1 + t*x)(1 - t*x) + t^2*x^2.
        assert_eq!(prove_membership(&ps[1..], &ps[0], &none()).unwrap().verdict, Verdict::HoldsRadical);
    }

    #[test]
    fn unprovable_is_unknown() {
        let (_, ps) = parse_system(&["x^2 + y^2 - 1", "x - y"]).unwrap();
        assert_eq!(prove_membership(&ps[..1], &ps[1], &none()).unwrap().verdict, Verdict::Unknown);
        // Fresh variable must not collide with a user variable named t.
        let (_, ps) = parse_system(&["t^2", "t"]).unwrap();
        assert_eq!(prove_membership(&ps[..1], &ps[1], &none()).unwrap().verdict, Verdict::HoldsRadical);
    }

    #[test]
    fn prove_rejects_mixed_contexts() {
        let (_, a) = parse_system(&["x"]).unwrap();
        let (_, b) = parse_system(&["y"]).unwrap();
        assert_eq!(prove_membership(&a, &b[0], &none()), Err(Error::ContextMismatch));
    }
}

//! Four-bar linkage description and its polynomial constraint system.
//!
//! Pivots `A` and `B` are fixed. Crank `AE` has length `f1`, crank `BH` has
//! length `f2` and the coupler `EH` has length `g`. The tracked point is
//! `M = E + u·(H − E) + v·R90(H − E)` with `R90(a, b) = (−b, a)`.

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{Context, Polynomial};
use crate::rational::{self, frac, int, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkageSpec {
    #[serde(rename = "A", with = "rational::serde_point")]
    pub a: (Rational, Rational),
    #[serde(rename = "B", with = "rational::serde_point")]
    pub b: (Rational, Rational),
    #[serde(with = "rational::serde_str")]
    pub f1: Rational,
    #[serde(with = "rational::serde_str")]
    pub f2: Rational,
    #[serde(with = "rational::serde_str")]
    pub g: Rational,
    #[serde(with = "rational::serde_str")]
    pub u: Rational,
    #[serde(with = "rational::serde_str")]
    pub v: Rational,
}

impl LinkageSpec {
    /// The rocking-camel default: `A = (0, 0)`, `B = (15, 0)`, equal cranks of
    /// length 11/2, coupler 12, and the coupler point at `(u, v) = (1/2, 2)`.
    pub fn camel() -> Self {
        Self {
            a: (int(0), int(0)),
            b: (int(15), int(0)),
            f1: frac(11, 2),
            f2: frac(11, 2),
            g: int(12),
            u: frac(1, 2),
            v: int(2),
        }
    }

    pub fn with_coupler(mut self, u: Rational, v: Rational) -> Self {
        self.u = u;
        self.v = v;
        self
    }

    pub fn validate(&self) -> Result<()> {
        for (name, len) in [("f1", &self.f1), ("f2", &self.f2), ("g", &self.g)] {
            if !len.is_positive() {
                return Err(Error::InvalidSpec(format!("{name} must be positive")));
            }
        }
        if self.a == self.b {
            return Err(Error::InvalidSpec("pivots A and B coincide".into()));
        }
        Ok(())
    }

    pub fn coupler_is_e(&self) -> bool {
        self.u.is_zero() && self.v.is_zero()
    }

    /// Every length and pivot coordinate multiplied by `s`; `(u, v)` kept.
    pub fn scaled(&self, s: &Rational) -> Self {
        Self {
            a: (&self.a.0 * s, &self.a.1 * s),
            b: (&self.b.0 * s, &self.b.1 * s),
            f1: &self.f1 * s,
            f2: &self.f2 * s,
            g: &self.g * s,
            u: self.u.clone(),
            v: self.v.clone(),
        }
    }
}

pub const FULL_VARIABLES: [&str; 6] = ["Ex", "Ey", "Hx", "Hy", "x", "y"];
pub const REDUCED_VARIABLES: [&str; 4] = ["Ex", "Ey", "x", "y"];

/// Polynomial equations whose zero set, projected to `(x, y)`, is the
/// coupler curve.
#[derive(Clone, Debug, PartialEq)]
pub struct ConstraintSystem {
    pub context: Context,
    pub polynomials: Vec<Polynomial>,
    /// Variables to eliminate, in context order.
    pub eliminate: Vec<String>,
    pub retained: [String; 2],
}

impl ConstraintSystem {
    pub fn is_reduced(&self) -> bool {
        self.context.len() == REDUCED_VARIABLES.len()
    }

    pub fn eliminate_refs(&self) -> Vec<&str> {
        self.eliminate.iter().map(String::as_str).collect()
    }
}

fn c(ctx: &Context, r: &Rational) -> Polynomial {
    Polynomial::constant(ctx, r.clone())
}

fn circle(px: &Polynomial, py: &Polynomial, cx: &Polynomial, cy: &Polynomial, r: &Polynomial) -> Polynomial {
    let dx = px - cx;
    let dy = py - cy;
    &dx * &dx + &dy * &dy - r * r
}

/// The three distance constraints and the two coupler-point equations in
/// `(Ex, Ey, Hx, Hy, x, y)`.
pub fn build_constraints(spec: &LinkageSpec) -> Result<ConstraintSystem> {
    spec.validate()?;
    let ctx = Context::new(FULL_VARIABLES);
    let v = |name| Polynomial::var(&ctx, name).expect("fixed context");
    let (ex, ey, hx, hy, x, y) = (v("Ex"), v("Ey"), v("Hx"), v("Hy"), v("x"), v("y"));
    let (u, w) = (c(&ctx, &spec.u), c(&ctx, &spec.v));

    let polynomials = vec![
        circle(&ex, &ey, &c(&ctx, &spec.a.0), &c(&ctx, &spec.a.1), &c(&ctx, &spec.f1)),
        circle(&hx, &hy, &c(&ctx, &spec.b.0), &c(&ctx, &spec.b.1), &c(&ctx, &spec.f2)),
        circle(&hx, &hy, &ex, &ey, &c(&ctx, &spec.g)),
        &x - (&ex + &u * (&hx - &ex) - &w * (&hy - &ey)),
        &y - (&ey + &u * (&hy - &ey) + &w * (&hx - &ex)),
    ];
    Ok(ConstraintSystem {
        context: ctx,
        polynomials,
        eliminate: ["Ex", "Ey", "Hx", "Hy"].map(String::from).to_vec(),
        retained: ["x".into(), "y".into()],
    })
}

/// Solves the coupler-point equations for `H` and substitutes, leaving only
/// `Ex, Ey` to eliminate. Requires `(u, v) ≠ (0, 0)`.
pub fn reduce_variables(cs: &ConstraintSystem, spec: &LinkageSpec) -> Result<ConstraintSystem> {
    if spec.coupler_is_e() {
        return Err(Error::DegenerateCoupler);
    }
    if cs.context.names() != FULL_VARIABLES {
        return Err(Error::InvalidSpec("expected an unreduced constraint system".into()));
    }
    let ctx = Context::new(REDUCED_VARIABLES);
    let v = |name| Polynomial::var(&ctx, name).expect("fixed context");
    let (ex, ey, x, y) = (v("Ex"), v("Ey"), v("x"), v("y"));
    let (hx, hy) = h_from_coupler(&ctx, &ex, &ey, &x, &y, &spec.u, &spec.v);
    let images = [ex, ey, hx, hy, x, y];
    let mut polynomials = Vec::new();
    for p in &cs.polynomials {
        let q = p.compose(&images)?;
        if !q.is_zero() {
            polynomials.push(q);
        }
    }
    Ok(ConstraintSystem {
        context: ctx,
        polynomials,
        eliminate: vec!["Ex".into(), "Ey".into()],
        retained: ["x".into(), "y".into()],
    })
}

/// Inverse of `M − E = [[u, −v], [v, u]]·(H − E)`; the determinant is
/// `u² + v²`.
fn h_from_coupler(
    ctx: &Context,
    ex: &Polynomial,
    ey: &Polynomial,
    x: &Polynomial,
    y: &Polynomial,
    u: &Rational,
    v: &Rational,
) -> (Polynomial, Polynomial) {
    let det = u * u + v * v;
    let iu = c(ctx, &(u / &det));
    let iv = c(ctx, &(v / &det));
    let dx = x - ex;
    let dy = y - ey;
    let hx = ex + &iu * &dx + &iv * &dy;
    let hy = ey - &iv * &dx + &iu * &dy;
    (hx, hy)
}

/// `H` implied by a coupler point for the given `(u, v)`, exactly.
pub fn solve_h(spec: &LinkageSpec, e: (&Rational, &Rational), m: (&Rational, &Rational)) -> Result<(Rational, Rational)> {
    if spec.coupler_is_e() {
        return Err(Error::DegenerateCoupler);
    }
    let det = &spec.u * &spec.u + &spec.v * &spec.v;
    let dx = m.0 - e.0;
    let dy = m.1 - e.1;
    let hx = e.0 + (&spec.u * &dx + &spec.v * &dy) / &det;
    let hy = e.1 + (-(&spec.v * &dx) + &spec.u * &dy) / &det;
    Ok((hx, hy))
}

/// `M` for given `E`, `H`, exactly.
pub fn coupler_point(spec: &LinkageSpec, e: (&Rational, &Rational), h: (&Rational, &Rational)) -> (Rational, Rational) {
    let dx = h.0 - e.0;
    let dy = h.1 - e.1;
    (
        e.0 + &spec.u * &dx - &spec.v * &dy,
        e.1 + &spec.u * &dy + &spec.v * &dx,
    )
}

/// `u² + v²`, the squared scale of `M − E` relative to `H − E`.
pub fn coupler_scale(spec: &LinkageSpec) -> Rational {
    &spec.u * &spec.u + &spec.v * &spec.v
}

use std::collections::BTreeSet;

use locusforge_core::cancel::Deadline;
use locusforge_core::linkage::{build_constraints, coupler_point, reduce_variables, LinkageSpec};
use locusforge_core::locus::locus_equation;
use locusforge_core::poly::{Context, Polynomial};
use locusforge_core::rational::{frac, int, Rational};
use locusforge_core::tracer::{residual, trace, Branch, Point};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use proptest::prelude::*;

fn locus(spec: &LinkageSpec) -> Vec<Polynomial> {
    locus_equation(spec, &Deadline::none()).unwrap().generators
}

fn strings(ps: &[Polynomial]) -> Vec<String> {
    ps.iter().map(|p| p.canonicalize().unwrap().to_string()).collect()
}

fn small_rat(lo: i64, hi: i64, den: i64) -> impl Strategy<Value = Rational> {
    (lo..=hi, 1..=den).prop_map(|(n, d)| Rational::new(BigInt::from(n), BigInt::from(d)))
}

/// Rational point on the unit circle.
fn unit(t: &Rational) -> (Rational, Rational) {
    let one = Rational::one();
    let den = &one + t * t;
    ((&one - t * t) / &den, (t + t) / den)
}

/// Rational spec together with a rational assembly `(E, H)` of it.
fn rational_assembly() -> impl Strategy<Value = (LinkageSpec, (Rational, Rational), (Rational, Rational))> {
    (
        small_rat(-4, 4, 2),
        small_rat(-4, 4, 2),
        small_rat(2, 9, 1),
        small_rat(2, 9, 1),
        small_rat(4, 14, 1),
        small_rat(-6, 6, 3),
        small_rat(-6, 6, 3),
        small_rat(-6, 6, 3),
        small_rat(-4, 4, 2),
        small_rat(-4, 4, 2),
    )
        .prop_map(|(ax, ay, f1, f2, g, t1, t2, t3, u, v)| {
            let (c1, s1) = unit(&t1);
            let (c2, s2) = unit(&t2);
            let (c3, s3) = unit(&t3);
            let e = (&ax + &f1 * c1, &ay + &f1 * s1);
            let h = (&e.0 + &g * c2, &e.1 + &g * s2);
            let b = (&h.0 - &f2 * c3, &h.1 - &f2 * s3);
            (LinkageSpec { a: (ax, ay), b, f1, f2, g, u, v }, e, h)
        })
        .prop_filter("distinct pivots and a nondegenerate coupler", |(s, _, _)| s.a != s.b && !s.coupler_is_e())
}

#[test]
fn camel_trace_lies_on_the_sextic_from_both_branches() {
    let spec = LinkageSpec::camel();
    let gens = locus(&spec);
    let t = trace(&spec, 360, &Branch::BOTH).unwrap();
    for branch in Branch::BOTH {
        let pts: Vec<Point> = t.poses.iter().filter(|p| p.branch == branch).map(|p| p.m).collect();
        assert!(!pts.is_empty());
        for g in &gens {
            for &p in &pts {
                assert!(residual(g, p).unwrap() <= 1e-6, "{branch} {p:?}");
            }
        }
    }
}

#[test]
fn reduced_system_vanishes_on_traced_samples() {
    let spec = LinkageSpec::camel();
    let reduced = reduce_variables(&build_constraints(&spec).unwrap(), &spec).unwrap();
    for p in trace(&spec, 180, &Branch::BOTH).unwrap().poses {
        let at = [p.e.x, p.e.y, p.m.x, p.m.y];
        for q in &reduced.polynomials {
            assert!(q.eval_f64(&at).abs() <= 1e-9, "{} at {:?}", q, at);
        }
    }
}

#[test]
fn circle_degenerations_match_the_pivots() {
    let spec = LinkageSpec {
        a: (frac(-3, 2), int(2)),
        b: (int(7), frac(1, 3)),
        f1: int(3),
        f2: frac(9, 2),
        g: int(8),
        u: int(0),
        v: int(0),
    };
    let ctx = Context::new(["x", "y"]);
    let circle = |c: &(Rational, Rational), r: &Rational| {
        let x = Polynomial::var(&ctx, "x").unwrap() - Polynomial::constant(&ctx, c.0.clone());
        let y = Polynomial::var(&ctx, "y").unwrap() - Polynomial::constant(&ctx, c.1.clone());
        (&x * &x + &y * &y - Polynomial::constant(&ctx, r * r)).canonicalize().unwrap().to_string()
    };
    assert_eq!(strings(&locus(&spec)), vec![circle(&spec.a, &spec.f1)]);
    let on_h = spec.clone().with_coupler(int(1), int(0));
    assert_eq!(strings(&locus(&on_h)), vec![circle(&spec.b, &spec.f2)]);
}

fn mirrored_x(p: &Polynomial) -> Polynomial {
    let ctx = p.context().clone();
    let x = Polynomial::var(&ctx, "x").unwrap();
    let y = Polynomial::var(&ctx, "y").unwrap();
    p.compose(&[-x, y]).unwrap().canonicalize().unwrap()
}

#[test]
fn symmetric_camel_locus_is_even_in_x() {
    let spec = LinkageSpec { a: (frac(-15, 2), int(0)), b: (frac(15, 2), int(0)), ..LinkageSpec::camel() };
    let gens = locus(&spec);
    assert_eq!(gens.len(), 1);
    assert_eq!(gens[0].total_degree(), 6);
    assert_eq!(mirrored_x(&gens[0]).to_string(), gens[0].to_string());
}

fn constraint_set(ps: &[Polynomial]) -> BTreeSet<String> {
    ps.iter().map(|p| p.canonicalize().unwrap().to_string()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn rational_assemblies_satisfy_every_system((spec, e, h) in rational_assembly()) {
        let m = coupler_point(&spec, (&e.0, &e.1), (&h.0, &h.1));
        let full = build_constraints(&spec).unwrap();
        let at = [e.0.clone(), e.1.clone(), h.0.clone(), h.1.clone(), m.0.clone(), m.1.clone()];
        for p in &full.polynomials {
            prop_assert!(p.eval(&at).is_zero());
        }
        let reduced = reduce_variables(&full, &spec).unwrap();
        let at = [e.0.clone(), e.1.clone(), m.0.clone(), m.1.clone()];
        for p in &reduced.polynomials {
            prop_assert!(p.eval(&at).is_zero());
        }
        for g in locus(&spec) {
            prop_assert!(g.eval(&[m.0.clone(), m.1.clone()]).is_zero());
        }
    }

    #[test]
    fn traces_of_rational_specs_lie_on_their_locus((spec, _, _) in rational_assembly()) {
        let gens = locus(&spec);
        for p in trace(&spec, 90, &Branch::BOTH).unwrap().poses {
            for g in &gens {
                prop_assert!(residual(g, p.m).unwrap() <= 1e-6);
            }
        }
    }

    #[test]
    fn locus_scales_with_the_linkage(s in small_rat(1, 7, 3), u in small_rat(-3, 3, 2), v in small_rat(-3, 3, 2)) {
        prop_assume!(!(u.is_zero() && v.is_zero()));
        let spec = LinkageSpec::camel().with_coupler(u, v);
        let base = locus(&spec);
        let scaled = locus(&spec.scaled(&s));
        let ctx = base[0].context().clone();
        let inv = Polynomial::constant(&ctx, Rational::one() / &s);
        let xs = &Polynomial::var(&ctx, "x").unwrap() * &inv;
        let ys = &Polynomial::var(&ctx, "y").unwrap() * &inv;
        let expected: Vec<String> = base.iter().map(|g| g.compose(&[xs.clone(), ys.clone()]).unwrap().canonicalize().unwrap().to_string()).collect();
        prop_assert_eq!(strings(&scaled), expected);
    }

    #[test]
    fn equal_crank_constraints_are_mirror_symmetric(a in small_rat(1, 12, 2), f in small_rat(1, 12, 2), g in small_rat(1, 12, 1), v in small_rat(-4, 4, 3)) {
        let spec = LinkageSpec { a: (-a.clone(), int(0)), b: (a, int(0)), f1: f.clone(), f2: f, g, u: frac(1, 2), v };
        let cs = build_constraints(&spec).unwrap();
        let ctx = cs.context.clone();
        let var = |n: &str| Polynomial::var(&ctx, n).unwrap();
        // (Ex, Ey, Hx, Hy, x, y) -> (-Hx, Hy, -Ex, Ey, -x, y)
        let images = [-var("Hx"), var("Hy"), -var("Ex"), var("Ey"), -var("x"), var("y")];
        let mirrored: Vec<Polynomial> = cs.polynomials.iter().map(|p| p.compose(&images).unwrap()).collect();
        prop_assert_eq!(constraint_set(&mirrored), constraint_set(&cs.polynomials));
    }

    #[test]
    fn symmetric_loci_are_even_in_x(v in small_rat(-5, 5, 2)) {
        prop_assume!(!v.is_zero());
        let spec = LinkageSpec { a: (frac(-15, 2), int(0)), b: (frac(15, 2), int(0)), v, ..LinkageSpec::camel() };
        for g in locus(&spec) {
            prop_assert_eq!(mirrored_x(&g).to_string(), g.canonicalize().unwrap().to_string());
        }
    }
}

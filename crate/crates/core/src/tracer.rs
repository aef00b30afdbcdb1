//! Floating-point forward kinematics and residuals against symbolic loci.

use std::f64::consts::TAU;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linkage::LinkageSpec;
use crate::poly::Polynomial;
use crate::rational;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dist(self, o: Point) -> f64 {
        (self.x - o.x).hypot(self.y - o.y)
    }

    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }

    fn add_scaled(self, d: Point, s: f64) -> Point {
        Point::new(self.x + s * d.x, self.y + s * d.y)
    }

    fn rot90(self) -> Point {
        Point::new(-self.y, self.x)
    }

    pub fn cross(self, o: Point) -> f64 {
        self.x * o.y - self.y * o.x
    }
}

/// Assembly mode: which side of `E → B` the joint `H` sits on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Ccw,
    Cw,
}

impl Branch {
    pub const BOTH: [Branch; 2] = [Branch::Ccw, Branch::Cw];

    pub fn as_str(self) -> &'static str {
        match self {
            Branch::Ccw => "ccw",
            Branch::Cw => "cw",
        }
    }

    pub fn parse_set(s: &str) -> Result<Vec<Branch>> {
        match s {
            "both" => Ok(Branch::BOTH.to_vec()),
            "ccw" => Ok(vec![Branch::Ccw]),
            "cw" => Ok(vec![Branch::Cw]),
            other => Err(Error::Parse(format!("unknown branch set `{other}`"))),
        }
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Linkage dimensions converted to floats.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dimensions {
    pub a: Point,
    pub b: Point,
    pub f1: f64,
    pub f2: f64,
    pub g: f64,
    pub u: f64,
    pub v: f64,
}

impl Dimensions {
    pub fn from_spec(spec: &LinkageSpec) -> Result<Self> {
        spec.validate()?;
        let f = rational::to_f64;
        Ok(Self {
            a: Point::new(f(&spec.a.0), f(&spec.a.1)),
            b: Point::new(f(&spec.b.0), f(&spec.b.1)),
            f1: f(&spec.f1),
            f2: f(&spec.f2),
            g: f(&spec.g),
            u: f(&spec.u),
            v: f(&spec.v),
        })
    }

    pub fn crank_point(&self, theta: f64) -> Point {
        Point::new(self.a.x + self.f1 * theta.cos(), self.a.y + self.f1 * theta.sin())
    }

    /// Whether `H` exists for the given `E`: `|f2 − g| ≤ |EB| ≤ f2 + g`.
    pub fn assembles(&self, e: Point) -> bool {
        let d = e.dist(self.b);
        let tol = ASSEMBLY_TOLERANCE * (self.f2 + self.g).max(1.0);
        d > 0.0 && d <= self.f2 + self.g + tol && d >= (self.f2 - self.g).abs() - tol
    }
}

/// Slack on the triangle inequalities at the feasibility boundary.
pub const ASSEMBLY_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Pose {
    pub theta: f64,
    pub branch: Branch,
    pub e: Point,
    pub h: Point,
    pub m: Point,
}

/// Intersections of circle `(c0, r0)` and circle `(c1, r1)` as `[ccw, cw]`,
/// where `ccw` has `cross(c1 − c0, p − c0) ≥ 0`. `None` when the circles are
/// disjoint, nested or concentric (beyond [`ASSEMBLY_TOLERANCE`]).
pub fn circle_intersections(c0: Point, r0: f64, c1: Point, r1: f64) -> Option<[Point; 2]> {
    let d = c0.dist(c1);
    let tol = ASSEMBLY_TOLERANCE * (r0 + r1).max(1.0);
    if d == 0.0 || d > r0 + r1 + tol || d < (r0 - r1).abs() - tol {
        return None;
    }
    let axis = c1.sub(c0);
    let unit = Point::new(axis.x / d, axis.y / d);
    let along = (d * d + r0 * r0 - r1 * r1) / (2.0 * d);
    let h2 = r0 * r0 - along * along;
    // Grazing tangency: the feasibility gate above bounds how negative h2 can get.
    let h = if h2 > 0.0 { h2.sqrt() } else { 0.0 };
    let foot = c0.add_scaled(unit, along);
    let normal = unit.rot90();
    Some([foot.add_scaled(normal, h), foot.add_scaled(normal, -h)])
}

/// Pose at crank angle `theta` (E about A) on the requested branch.
pub fn solve_position(spec: &LinkageSpec, theta: f64, branch: Branch) -> Result<Pose> {
    solve_with(&Dimensions::from_spec(spec)?, theta, branch)
}

pub fn solve_with(dims: &Dimensions, theta: f64, branch: Branch) -> Result<Pose> {
    let e = dims.crank_point(theta);
    if !dims.assembles(e) {
        return Err(Error::NoAssembly { theta });
    }
    let [ccw, cw] =
        circle_intersections(e, dims.g, dims.b, dims.f2).ok_or(Error::NoAssembly { theta })?;
    let h = match branch {
        Branch::Ccw => ccw,
        Branch::Cw => cw,
    };
    Ok(Pose { theta, branch, e, h, m: coupler(dims, e, h) })
}

fn coupler(dims: &Dimensions, e: Point, h: Point) -> Point {
    let w = h.sub(e);
    let r = w.rot90();
    Point::new(e.x + dims.u * w.x + dims.v * r.x, e.y + dims.u * w.y + dims.v * r.y)
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Trace {
    pub poses: Vec<Pose>,
    pub skipped: Vec<(f64, Branch)>,
}

/// The uniform crank grid `2πk / samples`, `k = 0..samples`.
pub fn theta_grid(samples: usize) -> impl Iterator<Item = f64> {
    (0..samples).map(move |k| TAU * k as f64 / samples as f64)
}

/// Samples every `(theta, branch)` of the grid, in grid order with branches
/// in `Ccw, Cw` order.
pub fn trace(spec: &LinkageSpec, samples: usize, branches: &[Branch]) -> Result<Trace> {
    let dims = Dimensions::from_spec(spec)?;
    let mut wanted: Vec<Branch> = branches.to_vec();
    wanted.sort();
    wanted.dedup();
    let mut out = Trace::default();
    for theta in theta_grid(samples) {
        for &branch in &wanted {
            match solve_with(&dims, theta, branch) {
                Ok(p) => out.poses.push(p),
                Err(_) => out.skipped.push((theta, branch)),
            }
        }
    }
    Ok(out)
}

enum Row<'a> {
    Pose(&'a Pose),
    Skipped(f64, Branch),
}

impl Trace {
    pub fn points(&self) -> impl Iterator<Item = Point> + '_ {
        self.poses.iter().map(|p| p.m)
    }

    fn rows(&self) -> Vec<Row<'_>> {
        let mut rows: Vec<Row<'_>> = self
            .poses
            .iter()
            .map(Row::Pose)
            .chain(self.skipped.iter().map(|&(t, b)| Row::Skipped(t, b)))
            .collect();
        let key = |r: &Row<'_>| match r {
            Row::Pose(p) => (p.theta, p.branch),
            Row::Skipped(t, b) => (*t, *b),
        };
        rows.sort_by(|a, b| {
            let (ta, ba) = key(a);
            let (tb, bb) = key(b);
            ta.total_cmp(&tb).then(ba.cmp(&bb))
        });
        rows
    }

    /// `theta,branch,Ex,Ey,Hx,Hy,Mx,My` with a header; skipped samples keep
    /// empty coordinate fields.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["theta", "branch", "Ex", "Ey", "Hx", "Hy", "Mx", "My"]).expect("in-memory write");
        for row in self.rows() {
            let rec: Vec<String> = match row {
                Row::Pose(p) => {
                    let mut r = vec![p.theta.to_string(), p.branch.to_string()];
                    r.extend([p.e.x, p.e.y, p.h.x, p.h.y, p.m.x, p.m.y].iter().map(f64::to_string));
                    r
                }
                Row::Skipped(t, b) => {
                    let mut r = vec![t.to_string(), b.to_string()];
                    r.extend(std::iter::repeat_n(String::new(), 6));
                    r
                }
            };
            w.write_record(&rec).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8 csv")
    }

    pub fn to_wire(&self) -> TraceWire {
        let s = |v: f64| v.to_string();
        let pt = |p: Point| [s(p.x), s(p.y)];
        TraceWire {
            poses: self
                .poses
                .iter()
                .map(|p| PoseWire { theta: s(p.theta), branch: p.branch, e: pt(p.e), h: pt(p.h), m: pt(p.m) })
                .collect(),
            skipped: self.skipped.iter().map(|&(t, b)| SkippedWire { theta: s(t), branch: b }).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PoseWire {
    pub theta: String,
    pub branch: Branch,
    #[serde(rename = "E")]
    pub e: [String; 2],
    #[serde(rename = "H")]
    pub h: [String; 2],
    #[serde(rename = "M")]
    pub m: [String; 2],
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkippedWire {
    pub theta: String,
    pub branch: Branch,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceWire {
    pub poses: Vec<PoseWire>,
    pub skipped: Vec<SkippedWire>,
}

/// Bivariate polynomial with float coefficients, `(coeff, [ex, ey])`.
#[derive(Clone, Debug, PartialEq)]
pub struct FloatPoly {
    pub terms: Vec<(f64, [u32; 2])>,
}

impl FloatPoly {
    pub fn from_polynomial(p: &Polynomial) -> Result<Self> {
        if p.context().len() != 2 {
            return Err(Error::ContextMismatch);
        }
        Ok(Self {
            terms: p
                .terms()
                .map(|(m, c)| (rational::to_f64(c), [m.exponents()[0], m.exponents()[1]]))
                .collect(),
        })
    }

    pub fn degree(&self) -> u32 {
        self.terms.iter().map(|(_, [a, b])| a + b).max().unwrap_or(0)
    }

    pub fn eval(&self, pt: Point) -> f64 {
        self.terms.iter().map(|(c, [a, b])| c * pt.x.powi(*a as i32) * pt.y.powi(*b as i32)).sum()
    }

    /// `|p(pt)| / (Σ|c| · max(1, |x|, |y|)^deg)`.
    pub fn residual(&self, pt: Point) -> Result<f64> {
        let mass: f64 = self.terms.iter().map(|(c, _)| c.abs()).sum();
        if self.terms.is_empty() || mass == 0.0 {
            return Err(Error::ZeroPolynomial);
        }
        let scale = 1f64.max(pt.x.abs()).max(pt.y.abs()).powi(self.degree() as i32);
        Ok(self.eval(pt).abs() / (mass * scale))
    }
}

/// Scale-normalized residual of a bivariate polynomial at a float point.
pub fn residual(p: &Polynomial, pt: Point) -> Result<f64> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    FloatPoly::from_polynomial(p)?.residual(pt)
}

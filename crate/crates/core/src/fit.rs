//! Implicit curve fitting: the polynomial of a given degree through a set of
//! points, exactly (rational nullspace) or in the least-squares sense.

use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::locus::PolynomialWire;
use crate::poly::{Context, Monomial, Polynomial};
use crate::rational::{self, Rational};
use crate::tracer::Point;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FitMode {
    Exact,
    Leastsq,
}

impl std::str::FromStr for FitMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(FitMode::Exact),
            "leastsq" => Ok(FitMode::Leastsq),
            other => Err(Error::Parse(format!("unknown fit mode `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum FitPoints {
    Exact(Vec<(Rational, Rational)>),
    Float(Vec<Point>),
}

impl FitPoints {
    pub fn len(&self) -> usize {
        match self {
            FitPoints::Exact(p) => p.len(),
            FitPoints::Float(p) => p.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn to_float(&self) -> Vec<Point> {
        match self {
            FitPoints::Exact(p) => {
                p.iter().map(|(x, y)| Point::new(rational::to_f64(x), rational::to_f64(y))).collect()
            }
            FitPoints::Float(p) => p.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FitProblem {
    pub degree: u32,
    pub points: FitPoints,
    pub mode: FitMode,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FitReport {
    /// Canonical curve. In least-squares mode each coefficient is rounded to
    /// 12 significant digits and those below 1e-12 of the largest are dropped.
    pub polynomial: Polynomial,
    pub degree: u32,
    pub total_degree: u64,
    /// Exact-mode rank of the evaluation matrix.
    pub rank: Option<usize>,
    pub nullity: Option<usize>,
    /// Least-squares coefficients in `monomials(degree)` order, unit norm.
    pub coefficients: Option<Vec<f64>>,
    /// Least-squares `‖Vc‖` in normalized coordinates.
    pub sigma_min: Option<f64>,
}

/// `n(n+3)/2`, the number of points in general position that pin down a
/// curve of degree `n`.
pub fn required_points(n: i64) -> Result<usize> {
    if n < 1 {
        return Err(Error::InvalidDegree(n));
    }
    let n = n as usize;
    Ok(n * (n + 3) / 2)
}

/// Exponents `[a, b]` of every `x^a y^b` with `a + b ≤ n`, graded-lex descending.
pub fn monomials(n: u32) -> Vec<[u32; 2]> {
    (0..=n).rev().flat_map(|d| (0..=d).rev().map(move |a| [a, d - a])).collect()
}

pub fn xy_context() -> Context {
    Context::new(["x", "y"])
}

pub fn fit_implicit(prob: &FitProblem) -> Result<FitReport> {
    let needed = required_points(prob.degree as i64)?;
    if prob.points.len() < needed {
        return Err(Error::InsufficientPoints { degree: prob.degree, needed, got: prob.points.len() });
    }
    match (prob.mode, &prob.points) {
        (FitMode::Exact, FitPoints::Exact(pts)) => fit_exact(prob.degree, pts),
        (FitMode::Exact, FitPoints::Float(_)) => {
            Err(Error::Parse("exact mode needs rational points".into()))
        }
        (FitMode::Leastsq, pts) => fit_leastsq(prob.degree, &pts.to_float()),
    }
}

fn fit_exact(n: u32, pts: &[(Rational, Rational)]) -> Result<FitReport> {
    let cols = monomials(n);
    let rows: Vec<Vec<BigInt>> = pts.iter().map(|(x, y)| integer_row(&cols, x, y)).collect();
    let (echelon, pivots) = bareiss(rows, cols.len());
    let rank = pivots.len();
    let nullity = cols.len() - rank;
    match nullity {
        0 => return Err(Error::NoCurve),
        1 => {}
        _ => return Err(Error::RankDeficient { nullity }),
    }
    let free = (0..cols.len()).find(|c| !pivots.contains(c)).expect("one free column");
    let mut c = vec![Rational::zero(); cols.len()];
    c[free] = Rational::one();
    for (k, &p) in pivots.iter().enumerate().rev() {
        let row = &echelon[k];
        let mut acc = Rational::zero();
        for j in p + 1..cols.len() {
            if !row[j].is_zero() && !c[j].is_zero() {
                acc += Rational::from_integer(row[j].clone()) * &c[j];
            }
        }
        c[p] = -acc / Rational::from_integer(row[p].clone());
    }
    let ctx = xy_context();
    let poly = Polynomial::from_terms(&ctx, cols.iter().zip(c).map(|(e, c)| (Monomial::new(e.to_vec()), c)))
        .canonicalize()?;
    Ok(FitReport {
        total_degree: poly.total_degree(),
        polynomial: poly,
        degree: n,
        rank: Some(rank),
        nullity: Some(nullity),
        coefficients: None,
        sigma_min: None,
    })
}

fn integer_row(cols: &[[u32; 2]], x: &Rational, y: &Rational) -> Vec<BigInt> {
    let vals: Vec<Rational> = cols.iter().map(|[a, b]| pow(x, *a) * pow(y, *b)).collect();
    let lcm = vals.iter().fold(BigInt::one(), |l, v| l.lcm(v.denom()));
    vals.into_iter().map(|v| (v * Rational::from_integer(lcm.clone())).to_integer()).collect()
}

fn pow(r: &Rational, e: u32) -> Rational {
    num_traits::pow(r.clone(), e as usize)
}

/// Fraction-free row echelon form; returns the reduced rows and pivot columns.
fn bareiss(mut a: Vec<Vec<BigInt>>, ncols: usize) -> (Vec<Vec<BigInt>>, Vec<usize>) {
    let mut prev = BigInt::one();
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        if r == a.len() {
            break;
        }
        let Some(i) = (r..a.len()).find(|&i| !a[i][col].is_zero()) else {
            continue;
        };
        a.swap(r, i);
        let (top, rest) = a.split_at_mut(r + 1);
        let pivot_row = &top[r];
        for row in rest.iter_mut() {
            let lead = std::mem::take(&mut row[col]);
            for j in col + 1..ncols {
                let (q, rem) = (&pivot_row[col] * &row[j] - &lead * &pivot_row[j]).div_rem(&prev);
                debug_assert!(rem.is_zero());
                row[j] = q;
            }
        }
        prev = a[r][col].clone();
        pivots.push(col);
        r += 1;
    }
    a.truncate(r);
    (a, pivots)
}

const POWER_TOLERANCE: f64 = 1e-12;
const POWER_MAX_ITERATIONS: usize = 1000;
const DISPLAY_DIGITS: i32 = 12;
/// Coefficients below this fraction of the largest are treated as zero.
const NOISE_FLOOR: f64 = 1e-12;

fn fit_leastsq(n: u32, pts: &[Point]) -> Result<FitReport> {
    if pts.iter().any(|p| !p.x.is_finite() || !p.y.is_finite()) {
        return Err(Error::Parse("non-finite point".into()));
    }
    let cols = monomials(n);
    let m = cols.len();
    let count = pts.len() as f64;
    let cx = pts.iter().map(|p| p.x).sum::<f64>() / count;
    let cy = pts.iter().map(|p| p.y).sum::<f64>() / count;
    let spread = pts.iter().map(|p| (p.x - cx).abs().max((p.y - cy).abs())).fold(0.0, f64::max);
    let s = if spread > 0.0 { spread } else { 1.0 };

    let v = DMatrix::from_fn(pts.len(), m, |i, j| {
        let [a, b] = cols[j];
        ((pts[i].x - cx) / s).powi(a as i32) * ((pts[i].y - cy) / s).powi(b as i32)
    });
    let shift = (f64::EPSILON * v.norm()).max(f64::MIN_POSITIVE);
    let mut stacked = DMatrix::zeros(pts.len() + m, m);
    stacked.view_mut((0, 0), (pts.len(), m)).copy_from(&v);
    for j in 0..m {
        stacked[(pts.len() + j, j)] = shift;
    }
    // RᵀR = VᵀV + shift²·I
    let r = stacked.qr().r();

    let mut c = DVector::from_element(m, 1.0 / (m as f64).sqrt());
    for _ in 0..POWER_MAX_ITERATIONS {
        let w = r.tr_solve_upper_triangular(&c).ok_or(Error::RankDeficient { nullity: m })?;
        let mut z = r.solve_upper_triangular(&w).ok_or(Error::RankDeficient { nullity: m })?;
        z /= z.norm();
        if z.dot(&c) < 0.0 {
            z = -z;
        }
        let delta = (&z - &c).norm();
        c = z;
        if delta < POWER_TOLERANCE {
            break;
        }
    }
    let sigma_min = (&v * &c).norm();

    let mut coeffs = denormalize(&cols, c.as_slice(), cx, cy, s);
    let norm = coeffs.iter().map(|c| c * c).sum::<f64>().sqrt();
    coeffs.iter_mut().for_each(|c| *c /= norm);

    let ctx = xy_context();
    let poly = rounded_polynomial(&ctx, &cols, &coeffs)?;
    Ok(FitReport {
        total_degree: poly.total_degree(),
        polynomial: poly,
        degree: n,
        rank: None,
        nullity: None,
        coefficients: Some(coeffs),
        sigma_min: Some(sigma_min),
    })
}

/// Expands `Σ c_ab ((x−cx)/s)^a ((y−cy)/s)^b` back into plain monomials.
fn denormalize(cols: &[[u32; 2]], c: &[f64], cx: f64, cy: f64, s: f64) -> Vec<f64> {
    let index = |a: u32, b: u32| cols.iter().position(|e| *e == [a, b]).expect("column present");
    let shifted = |t: f64, a: u32| -> Vec<f64> {
        // coefficients of ((z − t)/s)^a in powers of z
        (0..=a).map(|i| binomial(a, i) * (-t).powi((a - i) as i32) / s.powi(a as i32)).collect()
    };
    let mut out = vec![0.0; cols.len()];
    for (&[a, b], &coef) in cols.iter().zip(c) {
        let px = shifted(cx, a);
        let py = shifted(cy, b);
        for (i, &xi) in px.iter().enumerate() {
            for (j, &yj) in py.iter().enumerate() {
                out[index(i as u32, j as u32)] += coef * xi * yj;
            }
        }
    }
    out
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn rounded_polynomial(ctx: &Context, cols: &[[u32; 2]], coeffs: &[f64]) -> Result<Polynomial> {
    let big = coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    if big == 0.0 {
        return Err(Error::NoCurve);
    }
    let lead = coeffs.iter().copied().find(|c| c.abs() >= 1e-3 * big).expect("largest qualifies");
    let floor = NOISE_FLOOR * big / lead.abs();
    let terms = cols.iter().zip(coeffs).filter_map(|(e, &c)| {
        let c = c / lead;
        (c.abs() >= floor).then(|| (Monomial::new(e.to_vec()), round_significant(c)))
    });
    let p = Polynomial::from_terms(ctx, terms.collect::<Vec<_>>());
    if p.is_zero() {
        return Err(Error::NoCurve);
    }
    p.canonicalize()
}

/// `c` rounded to [`DISPLAY_DIGITS`] significant decimal digits, exactly.
fn round_significant(c: f64) -> Rational {
    let exp = c.abs().log10().floor() as i32 - (DISPLAY_DIGITS - 1);
    let mantissa = BigInt::from((c / 10f64.powi(exp)).round() as i64);
    let scale = num_traits::pow(BigInt::from(10), exp.unsigned_abs() as usize);
    if exp >= 0 {
        Rational::from_integer(mantissa * scale)
    } else {
        Rational::new(mantissa, scale)
    }
}

/// Reads comma-separated `x,y` rows. Exact mode accepts `p/q`, integers and
/// plain decimals; least-squares mode also accepts any float literal.
pub fn parse_points(text: &str, mode: FitMode) -> Result<FitPoints> {
    points_from_strings(&read_point_rows(text)?, mode)
}

/// The raw `x,y` fields of a points file, trimmed; blank and `#` lines skipped.
pub fn read_point_rows(text: &str) -> Result<Vec<[String; 2]>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::Parse(e.to_string()))?;
        if rec.iter().all(str::is_empty) {
            continue;
        }
        if rec.len() != 2 {
            return Err(Error::Parse(format!("expected `x,y`, got {} fields", rec.len())));
        }
        rows.push([rec[0].to_string(), rec[1].to_string()]);
    }
    Ok(rows)
}

pub fn points_from_strings(rows: &[[String; 2]], mode: FitMode) -> Result<FitPoints> {
    match mode {
        FitMode::Exact => rows
            .iter()
            .map(|[x, y]| Ok((rational::parse(x)?, rational::parse(y)?)))
            .collect::<Result<_>>()
            .map(FitPoints::Exact),
        FitMode::Leastsq => rows
            .iter()
            .map(|[x, y]| Ok(Point::new(parse_float(x)?, parse_float(y)?)))
            .collect::<Result<_>>()
            .map(FitPoints::Float),
    }
}

fn parse_float(s: &str) -> Result<f64> {
    s.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .map(Ok)
        .unwrap_or_else(|| rational::parse(s).map(|r| rational::to_f64(&r)))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitRequest {
    pub degree: i64,
    pub mode: FitMode,
    pub points: Vec<[String; 2]>,
}

impl FitRequest {
    pub fn to_problem(&self) -> Result<FitProblem> {
        required_points(self.degree)?;
        let degree = u32::try_from(self.degree).map_err(|_| Error::InvalidDegree(self.degree))?;
        Ok(FitProblem { degree, points: points_from_strings(&self.points, self.mode)?, mode: self.mode })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitWire {
    pub polynomial: PolynomialWire,
    pub degree: u32,
    pub total_degree: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nullity: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coefficients: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma_min: Option<String>,
}

impl FitReport {
    pub fn to_wire(&self) -> FitWire {
        FitWire {
            polynomial: PolynomialWire::from_polynomial(&self.polynomial),
            degree: self.degree,
            total_degree: self.total_degree,
            rank: self.rank,
            nullity: self.nullity,
            coefficients: self.coefficients.as_ref().map(|c| c.iter().map(f64::to_string).collect()),
            sigma_min: self.sigma_min.map(|s| s.to_string()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};
    use crate::tracer::{residual, trace, Branch};
    use crate::linkage::LinkageSpec;

    fn exact(n: u32, pts: &[(Rational, Rational)]) -> Result<FitReport> {
        fit_implicit(&FitProblem { degree: n, points: FitPoints::Exact(pts.to_vec()), mode: FitMode::Exact })
    }

    fn unit_circle_points() -> Vec<(Rational, Rational)> {
        vec![
            (int(1), int(0)),
            (int(-1), int(0)),
            (int(0), int(1)),
            (int(0), int(-1)),
            (frac(3, 5), frac(4, 5)),
        ]
    }

    #[test]
    fn point_counts() {
        assert_eq!(required_points(1).unwrap(), 2);
        assert_eq!(required_points(2).unwrap(), 5);
        assert_eq!(required_points(6).unwrap(), 27);
        assert_eq!(required_points(0), Err(Error::InvalidDegree(0)));
        assert_eq!(required_points(-3), Err(Error::InvalidDegree(-3)));
        for n in 1..=10u32 {
            assert_eq!(monomials(n).len(), required_points(n as i64).unwrap() + 1);
        }
    }

    #[test]
    fn column_order() {
        assert_eq!(monomials(2), vec![[2, 0], [1, 1], [0, 2], [1, 0], [0, 1], [0, 0]]);
    }

    #[test]
    fn diagonal_line() {
        let r = exact(1, &[(int(0), int(0)), (int(1), int(1))]).unwrap();
        assert_eq!(r.polynomial.to_string(), "x - y");
        assert_eq!((r.rank, r.nullity), (Some(2), Some(1)));
    }

    #[test]
    fn unit_circle() {
        let r = exact(2, &unit_circle_points()).unwrap();
        assert_eq!(r.polynomial.to_string(), "x^2 + y^2 - 1");
        assert_eq!(r.total_degree, 2);
    }

    #[test]
    fn exact_errors() {
        let too_few = exact(2, &unit_circle_points()[..4]);
        assert_eq!(too_few, Err(Error::InsufficientPoints { degree: 2, needed: 5, got: 4 }));
        let collinear: Vec<_> = (0..5).map(|i| (int(i), int(2 * i))).collect();
        assert!(matches!(exact(2, &collinear), Err(Error::RankDeficient { nullity: 3 })));
        let mut six = unit_circle_points();
        six.push((int(2), int(3)));
        six.push((int(5), int(-1)));
        six.push((int(7), int(11)));
        assert_eq!(exact(2, &six), Err(Error::NoCurve));
    }

    #[test]
    fn line_pair_is_reported_at_its_degree() {
        let pts = vec![(int(1), int(0)), (int(2), int(0)), (int(-3), int(0)), (int(0), int(1)), (int(0), int(5))];
        let r = exact(2, &pts).unwrap();
        assert_eq!(r.polynomial.to_string(), "x*y");
    }

    #[test]
    fn leastsq_recovers_circle() {
        let pts: Vec<Point> = (0..12)
            .map(|k| {
                let t = k as f64 * 0.5;
                Point::new(3.0 + 2.0 * t.cos(), -1.0 + 2.0 * t.sin())
            })
            .collect();
        let r = fit_implicit(&FitProblem { degree: 2, points: FitPoints::Float(pts.clone()), mode: FitMode::Leastsq })
            .unwrap();
        // (x-3)^2 + (y+1)^2 - 4 = x^2 + y^2 - 6x + 2y + 6
        assert_eq!(r.polynomial.to_string(), "x^2 + y^2 - 6*x + 2*y + 6");
        assert!(r.sigma_min.unwrap() < 1e-12);
        for p in pts {
            assert!(residual(&r.polynomial, p).unwrap() < 1e-12);
        }
    }

    #[test]
    fn leastsq_sextic_through_camel_trace() {
        let t = trace(&LinkageSpec::camel(), 127, &Branch::BOTH).unwrap();
        let pts: Vec<Point> = t.points().collect();
        let (train, held): (Vec<_>, Vec<_>) = pts.iter().enumerate().partition(|(i, _)| i % 4 == 0);
        let train: Vec<Point> = train.into_iter().map(|(_, p)| *p).take(27).collect();
        assert_eq!(train.len(), 27);
        let r = fit_implicit(&FitProblem { degree: 6, points: FitPoints::Float(train), mode: FitMode::Leastsq })
            .unwrap();
        assert_eq!(r.total_degree, 6);
        for (_, p) in held {
            assert!(residual(&r.polynomial, *p).unwrap() <= 1e-12);
        }
        // leading form of the exact locus is 64·(x² + y²)³
        let lead = rational::to_f64(&r.polynomial.coeff(&Monomial::new(vec![6, 0])));
        for (e, want) in [([4, 2], 3.0), ([2, 4], 3.0), ([0, 6], 1.0), ([5, 1], 0.0), ([3, 3], 0.0)] {
            let got = rational::to_f64(&r.polynomial.coeff(&Monomial::new(e.to_vec()))) / lead;
            assert!((got - want).abs() < 1e-3, "{e:?}: {got}");
        }
    }

    #[test]
    fn points_file() {
        let text = "1,0\n-1, 0\n\n0,1\n0,-1\n3/5,4/5\n";
        assert_eq!(parse_points(text, FitMode::Exact).unwrap(), FitPoints::Exact(unit_circle_points()));
        let f = parse_points("0.5,1e-3\n3/4,2\n", FitMode::Leastsq).unwrap();
        assert_eq!(f, FitPoints::Float(vec![Point::new(0.5, 1e-3), Point::new(0.75, 2.0)]));
        assert!(parse_points("1,2,3\n", FitMode::Exact).is_err());
        assert!(parse_points("1e3,2\n", FitMode::Exact).is_err());
    }

    #[test]
    fn request_validation() {
        let req = FitRequest { degree: 0, mode: FitMode::Exact, points: vec![] };
        assert_eq!(req.to_problem(), Err(Error::InvalidDegree(0)));
        let json = r#"{"degree":1,"mode":"exact","points":[["0","0"],["1","1"]]}"#;
        let req: FitRequest = serde_json::from_str(json).unwrap();
        let wire = fit_implicit(&req.to_problem().unwrap()).unwrap().to_wire();
        assert_eq!(wire.polynomial.string, "x - y");
    }
}

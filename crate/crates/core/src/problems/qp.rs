//! Sparse convex QPs `min ½xᵀHx + cᵀx + c₀  s.t.  Ax = b, l <= x <= u`.
//!
//! Finite bounds become inequalities; infinite ones are dropped. The
//! equality block is handed to the solvers, which project every direction
//! onto the null space of `A`.
//!
//! # Text format
//!
//! ```text
//! # comment
//! n 2
//! p 1
//! c0 0
//! fstar 0.5
//! [H]
//! 0 0 2
//! 1 1 2
//! [c]
//! 0
//! 0
//! [A]
//! 0 0 1
//! 0 1 1
//! [b]
//! 1
//! [l]
//! -inf
//! -inf
//! [u]
//! inf
//! inf
//! ```
//!
//! Header lines `n`, `p` are required, `c0` and `fstar` optional. Matrix
//! sections hold 0-indexed `row col value` triplets (all entries of `H`, both
//! triangles); vector sections hold one value per line. Omitted sections
//! default to zero (`H`, `c`, `A`, `b`), `-inf` (`l`) and `inf` (`u`).

use std::fmt::Write as _;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::barrier::{BarrierProblem, Problem, Vector};
use crate::error::{Error, Result};
use crate::linalg::{CsrMatrix, EqualityProjector, LinearEqualities, Triplet};

#[derive(Debug, Clone, PartialEq)]
pub struct QpProblem {
    pub h: CsrMatrix,
    pub c: Vector,
    pub c0: f64,
    pub equalities: LinearEqualities,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub reference: Option<f64>,
    // (variable, is_upper) for every finite bound, in constraint order
    bounds: Vec<(usize, bool)>,
}

impl QpProblem {
    pub fn new(
        h: CsrMatrix,
        c: Vector,
        c0: f64,
        equalities: LinearEqualities,
        lower: Vec<f64>,
        upper: Vec<f64>,
    ) -> Result<Self> {
        let n = c.len();
        for found in [h.nrows(), h.ncols(), equalities.a.ncols(), lower.len(), upper.len()] {
            if found != n {
                return Err(Error::DimensionMismatch { expected: n, found });
            }
        }
        if !c0.is_finite() {
            return Err(Error::Domain("c0 must be finite".into()));
        }
        if let Some(i) = (0..n).find(|&i| !(lower[i] <= upper[i])) {
            return Err(Error::Domain(format!("bounds of x{i} are inverted or NaN")));
        }
        let mut bounds = Vec::new();
        for i in 0..n {
            if lower[i].is_finite() {
                bounds.push((i, false));
            }
            if upper[i].is_finite() {
                bounds.push((i, true));
            }
        }
        Ok(Self {
            h,
            c,
            c0,
            equalities,
            lower,
            upper,
            reference: None,
            bounds,
        })
    }

    pub fn with_reference(mut self, f: f64) -> Self {
        self.reference = Some(f);
        self
    }

    pub fn num_equalities(&self) -> usize {
        self.equalities.a.nrows()
    }

    /// Strictly feasible start: the box midpoint moved onto `{Ax = b}`, then
    /// alternately clamped into a shrunken box and re-projected when that
    /// point violates a bound. The shrink margin halves up to 60 times.
    pub fn feasible_start(&self) -> Result<Vector> {
        let n = self.c.len();
        let mid = Vector::from_iterator(
            n,
            (0..n).map(|i| match (self.lower[i].is_finite(), self.upper[i].is_finite()) {
                (true, true) => 0.5 * (self.lower[i] + self.upper[i]),
                (true, false) => self.lower[i] + 1.0,
                (false, true) => self.upper[i] - 1.0,
                (false, false) => 0.0,
            }),
        );
        let projector = if self.num_equalities() > 0 {
            Some(EqualityProjector::new(&self.equalities.a)?)
        } else {
            None
        };
        let onto_affine = |x: &Vector| match &projector {
            Some(p) => p.project_affine(x, &self.equalities.b),
            None => x.clone(),
        };
        let x = onto_affine(&mid);
        if BarrierProblem::is_strictly_interior(self, &x) {
            return Ok(x);
        }
        let width: Vec<f64> = (0..n)
            .map(|i| {
                let w = self.upper[i] - self.lower[i];
                if w.is_finite() {
                    w
                } else {
                    1.0
                }
            })
            .collect();
        let mut margin_scale = 0.25;
        for _ in 0..60 {
            let mut z = x.clone();
            for _ in 0..500 {
                for i in 0..n {
                    let m = margin_scale * width[i];
                    z[i] = z[i].max(self.lower[i] + m).min(self.upper[i] - m);
                }
                z = onto_affine(&z);
                if BarrierProblem::is_strictly_interior(self, &z) {
                    return Ok(z);
                }
            }
            margin_scale *= 0.5;
        }
        Err(Error::NoInteriorPoint(
            "no point strictly inside the bounds satisfies the equalities".into(),
        ))
    }
}

impl Problem for QpProblem {
    fn dim(&self) -> usize {
        self.c.len()
    }

    fn num_constraints(&self) -> usize {
        self.bounds.len()
    }

    fn objective(&self, x: &Vector) -> f64 {
        0.5 * x.dot(&self.h.mul_vec(x)) + self.c.dot(x) + self.c0
    }

    fn objective_gradient(&self, x: &Vector) -> Vector {
        self.h.mul_vec(x) + &self.c
    }

    fn constraint(&self, i: usize, x: &Vector) -> f64 {
        let (j, upper) = self.bounds[i];
        if upper {
            x[j] - self.upper[j]
        } else {
            self.lower[j] - x[j]
        }
    }

    fn add_constraint_gradient(&self, i: usize, _x: &Vector, weight: f64, out: &mut Vector) {
        let (j, upper) = self.bounds[i];
        out[j] += if upper { weight } else { -weight };
    }

    fn equality(&self) -> Option<&LinearEqualities> {
        (self.num_equalities() > 0).then_some(&self.equalities)
    }

    fn reference_optimum(&self) -> Option<f64> {
        self.reference
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    Header,
    H,
    C,
    A,
    B,
    L,
    U,
}

fn parse_f64(tok: &str, line: usize) -> Result<f64> {
    let v: f64 = tok.parse().map_err(|_| Error::Parse {
        line,
        message: format!("`{tok}` is not a number"),
    })?;
    if v.is_nan() {
        return Err(Error::Parse {
            line,
            message: "NaN is not allowed".into(),
        });
    }
    Ok(v)
}

fn parse_usize(tok: &str, line: usize) -> Result<usize> {
    tok.parse().map_err(|_| Error::Parse {
        line,
        message: format!("`{tok}` is not a non-negative integer"),
    })
}

/// Parses the text format described in the module documentation.
pub fn load_qp(source: &str) -> Result<QpProblem> {
    let mut n = None;
    let mut p = None;
    let mut c0 = 0.0;
    let mut fstar = None;
    let mut section = Section::Header;
    let mut h: Vec<Triplet> = Vec::new();
    let mut a: Vec<Triplet> = Vec::new();
    let mut vecs: [Option<Vec<f64>>; 4] = Default::default();
    let mut seen = Vec::new();

    for (idx, raw) in source.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            section = match name.trim() {
                "H" => Section::H,
                "c" => Section::C,
                "A" => Section::A,
                "b" => Section::B,
                "l" => Section::L,
                "u" => Section::U,
                other => {
                    return Err(Error::Parse {
                        line: line_no,
                        message: format!("unknown section [{other}]"),
                    })
                }
            };
            if seen.contains(&name.to_string()) {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("section [{name}] repeated"),
                });
            }
            seen.push(name.to_string());
            if let Some(k) = vec_slot(section) {
                vecs[k] = Some(Vec::new());
            }
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        match section {
            Section::Header => {
                let [key, value] = toks[..] else {
                    return Err(Error::Parse {
                        line: line_no,
                        message: "expected `key value`".into(),
                    });
                };
                match key {
                    "n" => n = Some(parse_usize(value, line_no)?),
                    "p" => p = Some(parse_usize(value, line_no)?),
                    "c0" => c0 = parse_f64(value, line_no)?,
                    "fstar" => fstar = Some(parse_f64(value, line_no)?),
                    other => {
                        return Err(Error::Parse {
                            line: line_no,
                            message: format!("unknown header key `{other}`"),
                        })
                    }
                }
            }
            Section::H | Section::A => {
                let [r, c, v] = toks[..] else {
                    return Err(Error::Parse {
                        line: line_no,
                        message: "expected `row col value`".into(),
                    });
                };
                let (nrows, ncols) = match (n, p) {
                    (Some(n), Some(p)) => (if section == Section::H { n } else { p }, n),
                    _ => {
                        return Err(Error::Parse {
                            line: line_no,
                            message: "`n` and `p` must precede the sections".into(),
                        })
                    }
                };
                let t = (parse_usize(r, line_no)?, parse_usize(c, line_no)?, parse_f64(v, line_no)?);
                if t.0 >= nrows || t.1 >= ncols {
                    return Err(Error::Parse {
                        line: line_no,
                        message: format!("entry ({}, {}) outside a {nrows}x{ncols} matrix", t.0, t.1),
                    });
                }
                if section == Section::H { &mut h } else { &mut a }.push(t);
            }
            _ => {
                let [v] = toks[..] else {
                    return Err(Error::Parse {
                        line: line_no,
                        message: "expected one value per line".into(),
                    });
                };
                let k = vec_slot(section).expect("vector section");
                vecs[k].as_mut().expect("opened").push(parse_f64(v, line_no)?);
            }
        }
    }

    let n = n.ok_or(Error::Parse {
        line: 0,
        message: "missing `n`".into(),
    })?;
    let p = p.unwrap_or(0);
    let [c, b, l, u] = vecs;
    let take = |v: Option<Vec<f64>>, len: usize, fill: f64| -> Result<Vec<f64>> {
        match v {
            None => Ok(vec![fill; len]),
            Some(v) if v.len() == len => Ok(v),
            Some(v) => Err(Error::DimensionMismatch {
                expected: len,
                found: v.len(),
            }),
        }
    };
    let c = take(c, n, 0.0)?;
    let b = take(b, p, 0.0)?;
    let l = take(l, n, f64::NEG_INFINITY)?;
    let u = take(u, n, f64::INFINITY)?;
    let eq = LinearEqualities::new(CsrMatrix::from_triplets(p, n, &a)?, Vector::from_vec(b))?;
    let qp = QpProblem::new(
        CsrMatrix::from_triplets(n, n, &h)?,
        Vector::from_vec(c),
        c0,
        eq,
        l,
        u,
    )?;
    Ok(match fstar {
        Some(f) => qp.with_reference(f),
        None => qp,
    })
}

fn vec_slot(s: Section) -> Option<usize> {
    match s {
        Section::C => Some(0),
        Section::B => Some(1),
        Section::L => Some(2),
        Section::U => Some(3),
        _ => None,
    }
}

pub fn load_qp_file(path: impl AsRef<Path>) -> Result<QpProblem> {
    load_qp(&std::fs::read_to_string(path)?)
}

fn fmt_f64(v: f64) -> String {
    if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{v:.16e}")
    }
}

/// Serializes with 17 significant digits, so [`load_qp`] restores every
/// value exactly.
pub fn write_qp(qp: &QpProblem) -> String {
    let mut s = String::new();
    let n = qp.c.len();
    let _ = writeln!(s, "n {n}");
    let _ = writeln!(s, "p {}", qp.num_equalities());
    let _ = writeln!(s, "c0 {}", fmt_f64(qp.c0));
    if let Some(f) = qp.reference {
        let _ = writeln!(s, "fstar {}", fmt_f64(f));
    }
    let mut triplets = |name: &str, m: &CsrMatrix| {
        let _ = writeln!(s, "[{name}]");
        for (i, j, v) in m.triplets() {
            let _ = writeln!(s, "{i} {j} {}", fmt_f64(v));
        }
    };
    triplets("H", &qp.h);
    triplets("A", &qp.equalities.a);
    for (name, values) in [
        ("c", qp.c.as_slice()),
        ("b", qp.equalities.b.as_slice()),
        ("l", &qp.lower[..]),
        ("u", &qp.upper[..]),
    ] {
        let _ = writeln!(s, "[{name}]");
        for v in values {
            let _ = writeln!(s, "{}", fmt_f64(*v));
        }
    }
    s
}

/// A random strictly convex QP whose optimum is planted through its KKT
/// conditions.
#[derive(Debug, Clone)]
pub struct PlantedQp {
    pub problem: QpProblem,
    pub x_star: Vector,
    pub f_star: f64,
}

/// Builds `H = BᵀB + 0.1 I`, box bounds `[-1, 1]` (about one variable in ten
/// left free), a point `x★` with some coordinates on their bounds, and
/// `c = -Hx★ - Aᵀν + μ_l - μ_u` with positive multipliers on the active
/// bounds. Draws are repeated until the feasible set has a strict interior
/// reachable by [`QpProblem::feasible_start`].
pub fn planted_qp(n: usize, p: usize, seed: u64) -> Result<PlantedQp> {
    if n == 0 || p >= n {
        return Err(Error::Domain(format!("planted QP needs 0 <= p < n, got n = {n}, p = {p}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..100 {
        let normal = |rng: &mut ChaCha8Rng| -> f64 { rng.sample(StandardNormal) };
        let scale = 1.0 / (n as f64).sqrt();
        let bmat = nalgebra::DMatrix::from_fn(n, n, |_, _| normal(&mut rng) * scale);
        let hd = bmat.transpose() * &bmat + nalgebra::DMatrix::identity(n, n) * 0.1;
        let h = CsrMatrix::from_dense(&hd);

        let mut lower = vec![-1.0; n];
        let mut upper = vec![1.0; n];
        let max_active = (n - p) / 2;
        let mut active = 0;
        let mut x_star = Vector::zeros(n);
        let mut mu = Vector::zeros(n);
        for i in 0..n {
            let u: f64 = rng.random();
            if u < 0.1 {
                lower[i] = f64::NEG_INFINITY;
                upper[i] = f64::INFINITY;
                x_star[i] = rng.random_range(-0.8..0.8);
            } else if u < 0.55 && active < max_active {
                active += 1;
                let at_upper = rng.random_bool(0.5);
                x_star[i] = if at_upper { 1.0 } else { -1.0 };
                let m = rng.random_range(0.1..1.0);
                mu[i] = if at_upper { -m } else { m };
            } else {
                x_star[i] = rng.random_range(-0.8..0.8);
            }
        }
        let ad = nalgebra::DMatrix::from_fn(p, n, |_, _| normal(&mut rng));
        let nu = Vector::from_fn(p, |_, _| normal(&mut rng));
        let b = &ad * &x_star;
        let c = -(&hd * &x_star) - ad.transpose() * &nu + &mu;
        let eq = LinearEqualities::new(CsrMatrix::from_dense(&ad), b)?;
        let problem = QpProblem::new(h, c, 0.0, eq, lower, upper)?;
        let f_star = Problem::objective(&problem, &x_star);
        let problem = problem.with_reference(f_star);
        if problem.feasible_start().is_ok() {
            return Ok(PlantedQp {
                problem,
                x_star,
                f_star,
            });
        }
    }
    Err(Error::NoInteriorPoint(format!("seed {seed}: no planted QP with an interior")))
}

#![allow(dead_code)]

use gdam::linalg::EqualityProjector;
use gdam::problems::QpProblem;
use gdam::snl::SnlInstance;
use gdam::{BarrierProblem, Vector};
use nalgebra::{DMatrix, DVector};

/// Fourth-order central differences with a fixed step.
pub fn central_fd(f: impl Fn(&Vector) -> f64, x: &Vector, h: f64) -> Vector {
    let mut g = Vector::zeros(x.len());
    for i in 0..x.len() {
        let at = |t: f64| {
            let mut y = x.clone();
            y[i] += t;
            f(&y)
        };
        g[i] = (-at(2.0 * h) + 8.0 * at(h) - 8.0 * at(-h) + at(-2.0 * h)) / (12.0 * h);
    }
    g
}

/// Smallest `-g_i(x)`.
pub fn min_slack<P: gdam::Problem + ?Sized>(p: &P, x: &Vector) -> f64 {
    (0..p.num_constraints()).map(|i| -p.constraint(i, x)).fold(f64::INFINITY, f64::min)
}

pub fn relative_error(a: &Vector, b: &Vector) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

/// Slack built term by term from explicit outer products.
pub fn dense_slack(inst: &SnlInstance, z: &Vector) -> DMatrix<f64> {
    let m = inst.n + 2;
    let mut s = DMatrix::zeros(m, m);
    s[(0, 0)] -= z[0];
    s[(0, 1)] -= z[1];
    s[(1, 0)] -= z[1];
    s[(1, 1)] -= z[2];
    let mut k = 3;
    for e in &inst.edges_ss {
        let mut v = DVector::zeros(m);
        v[e.i + 2] = 1.0;
        v[e.j + 2] = -1.0;
        s -= &v * v.transpose() * z[k];
        k += 1;
    }
    for e in &inst.edges_sa {
        let mut v = DVector::zeros(m);
        v[0] = inst.anchors[e.k][0];
        v[1] = inst.anchors[e.k][1];
        v[e.j + 2] = -1.0;
        s -= &v * v.transpose() * z[k];
        k += 1;
    }
    s
}

/// `-log det S` through nalgebra's Cholesky, `+inf` outside the cone.
pub fn dense_neg_log_det(s: &DMatrix<f64>) -> f64 {
    match s.clone().cholesky() {
        Some(c) => -2.0 * c.l().diagonal().iter().map(|d| d.ln()).sum::<f64>(),
        None => f64::INFINITY,
    }
}

pub fn qp_dense_objective(qp: &QpProblem, x: &Vector) -> f64 {
    let h = qp.h.to_dense();
    0.5 * x.dot(&(&h * x)) + qp.c.dot(x) + qp.c0
}

/// Largest violation of the KKT conditions at `x`: feasibility, stationarity
/// with least-squares multipliers on the active bounds, and multiplier signs.
pub fn qp_kkt_violation(qp: &QpProblem, x: &Vector) -> f64 {
    let n = x.len();
    let h = qp.h.to_dense();
    let a = qp.equalities.a.to_dense();
    let b = &qp.equalities.b;
    let tol = 1e-10;
    let mut worst: f64 = 0.0;
    for i in 0..n {
        worst = worst.max(qp.lower[i] - x[i]).max(x[i] - qp.upper[i]);
    }
    if a.nrows() > 0 {
        worst = worst.max((&a * x - b).amax());
    }
    let at_lower: Vec<usize> = (0..n).filter(|&i| (x[i] - qp.lower[i]).abs() <= tol).collect();
    let at_upper: Vec<usize> = (0..n).filter(|&i| (qp.upper[i] - x[i]).abs() <= tol).collect();
    // grad + Aᵀν - Σ μ_l e_i + Σ μ_u e_i = 0
    let grad = &h * x + &qp.c;
    let p = a.nrows();
    let cols = p + at_lower.len() + at_upper.len();
    let mut k = DMatrix::zeros(n, cols);
    for r in 0..p {
        for c in 0..n {
            k[(c, r)] = a[(r, c)];
        }
    }
    for (j, &i) in at_lower.iter().enumerate() {
        k[(i, p + j)] = -1.0;
    }
    for (j, &i) in at_upper.iter().enumerate() {
        k[(i, p + at_lower.len() + j)] = 1.0;
    }
    let rhs = -&grad;
    let mult = if cols > 0 {
        k.clone().svd(true, true).solve(&rhs, 1e-12).expect("svd solve")
    } else {
        DVector::zeros(0)
    };
    let stationarity = (&k * &mult - rhs).amax();
    worst = worst.max(stationarity / (1.0 + grad.amax()));
    for j in p..cols {
        worst = worst.max(-mult[j]);
    }
    worst
}

/// Exhaustive active-set search: every variable at its lower bound, its
/// upper bound or free, the free part solved from the equality-constrained
/// KKT system. The smallest objective over feasible candidates is the
/// optimum of a convex QP. Exponential in `n`.
pub fn qp_brute_force(qp: &QpProblem) -> (Vector, f64) {
    let n = qp.c.len();
    let h = qp.h.to_dense();
    let a = qp.equalities.a.to_dense();
    let b = qp.equalities.b.clone();
    let p = a.nrows();
    let mut best: Option<(Vector, f64)> = None;
    let total = 3usize.pow(n as u32);
    for code in 0..total {
        let mut state = vec![0u8; n];
        let mut c = code;
        let mut skip = false;
        for s in state.iter_mut() {
            *s = (c % 3) as u8;
            c /= 3;
        }
        let mut x = Vector::zeros(n);
        for i in 0..n {
            match state[i] {
                1 => x[i] = qp.lower[i],
                2 => x[i] = qp.upper[i],
                _ => {}
            }
            if state[i] != 0 && !x[i].is_finite() {
                skip = true;
            }
        }
        if skip {
            continue;
        }
        let free: Vec<usize> = (0..n).filter(|&i| state[i] == 0).collect();
        let nf = free.len();
        // [H_ff A_fᵀ; A_f 0] [x_f; ν] = [-(c_f + H_fb x_b); b - A_b x_b]
        let mut kkt = DMatrix::zeros(nf + p, nf + p);
        let mut rhs = DVector::zeros(nf + p);
        let hx = &h * &x;
        for (r, &i) in free.iter().enumerate() {
            for (c, &j) in free.iter().enumerate() {
                kkt[(r, c)] = h[(i, j)];
            }
            for e in 0..p {
                kkt[(r, nf + e)] = a[(e, i)];
                kkt[(nf + e, r)] = a[(e, i)];
            }
            rhs[r] = -(qp.c[i] + hx[i]);
        }
        let ax = &a * &x;
        for e in 0..p {
            rhs[nf + e] = b[e] - ax[e];
        }
        if nf + p > 0 {
            let Some(sol) = kkt.clone().lu().solve(&rhs) else { continue };
            if (&kkt * &sol - &rhs).amax() > 1e-8 {
                continue;
            }
            for (r, &i) in free.iter().enumerate() {
                x[i] = sol[r];
            }
        }
        let feasible = (0..n).all(|i| x[i] >= qp.lower[i] - 1e-9 && x[i] <= qp.upper[i] + 1e-9)
            && (p == 0 || (&a * &x - &b).amax() <= 1e-8);
        if !feasible {
            continue;
        }
        let f = qp_dense_objective(qp, &x);
        if best.as_ref().is_none_or(|(_, fb)| f < *fb) {
            best = Some((x, f));
        }
    }
    best.expect("no feasible vertex pattern")
}

/// Normalized gradients and the field at `x`, computed here rather than by
/// the library. `None` outside the interior.
pub struct Field {
    pub uf: Vector,
    pub uphi: Vector,
    pub s: Vector,
}

pub fn field_at<P: BarrierProblem + ?Sized>(
    problem: &P,
    x: &Vector,
    zeta: f64,
    projector: Option<&EqualityProjector>,
) -> Option<Field> {
    let (_, mut gphi) = problem.barrier(x).ok()?;
    let mut gf = problem.objective_gradient(x);
    if let Some(p) = projector {
        gf = p.project(&gf);
        gphi = p.project(&gphi);
    }
    let (nf, np) = (gf.norm(), gphi.norm());
    if nf == 0.0 || np == 0.0 {
        return None;
    }
    let uf = gf / nf;
    let uphi = gphi / np;
    let s = -&uf - &uphi * zeta;
    Some(Field { uf, uphi, s })
}

pub struct Centrality {
    pub cos_theta: f64,
    pub residual: f64,
    pub lipschitz: f64,
    pub delta: f64,
}

/// `cos θ`, `ε` and `δ = 10 β L̂` at `x`, with `L̂` the largest difference
/// quotient of `cos θ` over short steps back along the field direction.
pub fn centrality_with_margin<P: BarrierProblem + ?Sized>(
    problem: &P,
    x: &Vector,
    zeta: f64,
    beta: f64,
    projector: Option<&EqualityProjector>,
) -> Option<Centrality> {
    let f0 = field_at(problem, x, zeta, projector)?;
    let cos0 = f0.uf.dot(&f0.uphi);
    let residual = (&f0.uf + &f0.uphi).norm();
    let dir = &f0.s / f0.s.norm();
    let mut lipschitz: f64 = 0.0;
    let mut h = beta;
    let mut samples = 0;
    while samples < 3 && h > beta * 1e-9 {
        let xh = x - &dir * h;
        if problem.is_strictly_interior(&xh) {
            if let Some(fh) = field_at(problem, &xh, zeta, projector) {
                lipschitz = lipschitz.max((fh.uf.dot(&fh.uphi) - cos0).abs() / h);
                samples += 1;
            }
        }
        h *= 0.5;
    }
    Some(Centrality {
        cos_theta: cos0,
        residual,
        lipschitz,
        delta: 10.0 * beta * lipschitz,
    })
}

pub fn projector_for<P: BarrierProblem + ?Sized>(problem: &P) -> Option<EqualityProjector> {
    problem
        .equality()
        .filter(|e| e.a.nrows() > 0)
        .map(|e| EqualityProjector::new(&e.a).expect("full row rank"))
}

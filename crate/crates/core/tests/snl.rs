mod common;

use common::*;
use gdam::snl::*;
use gdam::solver::SolverConfig;
use gdam::{BarrierProblem, Error, Vector};
use nalgebra::{DMatrix, DVector};

#[test]
fn phase1_reaches_a_positive_definite_slack() {
    let inst = generate_instance(&GenerateOptions::new(20, 0.4, 11)).unwrap().instance;
    let opts = Phase1Options { lambda: 10.0, max_steps: 500 };
    let out = phase1_initialize(&inst, &opts).unwrap();
    assert!(out.steps <= 500);
    let s = dense_slack(&inst, &out.z);
    assert!(s.clone().cholesky().is_some());
    assert!(nalgebra::SymmetricEigen::new(s).eigenvalues.min() > 0.0);
}

#[test]
fn phase1_rejects_a_nonpositive_shift() {
    let inst = generate_instance(&GenerateOptions::new(5, 0.5, 0)).unwrap().instance;
    let opts = Phase1Options { lambda: 0.0, max_steps: 10 };
    assert!(phase1_initialize(&inst, &opts).is_err());
}

fn final_cos_theta(n: usize, seed: u64) -> f64 {
    let inst = generate_instance(&GenerateOptions::new(n, 10.0, seed)).unwrap().instance;
    assert_eq!(inst.num_edges(), n * (n - 1) / 2 + n * 4);
    let scaled = presolve_scale(&inst, 10.0).unwrap();
    let p1 = phase1_initialize(&scaled, &Phase1Options::default()).unwrap();
    let out = snl_main_solve(&scaled, &p1.z, &SnlConfig::default().solver).unwrap();
    let dual = SnlDual::new(&scaled);
    let (_, gphi) = dual.barrier(&out.x).unwrap();
    let gf = dual.objective_gradient(&out.x);
    gf.dot(&gphi) / (gf.norm() * gphi.norm())
}

#[test]
fn tiny_complete_instance_ends_deep_in_the_central_neighborhood() {
    let cos = final_cos_theta(3, 0);
    assert!(cos <= -0.99, "cos theta {cos}");
}

#[test]
fn tiny_instances_end_in_the_central_neighborhood() {
    // across seeds the final angle varies; -0.9 is the floor observed on these
    for seed in 0..8 {
        let cos = final_cos_theta(3, seed);
        assert!(cos <= -0.9, "seed {seed}: cos theta {cos}");
    }
}

#[test]
fn main_solve_iterates_keep_a_positive_definite_slack() {
    let inst = generate_instance(&GenerateOptions::new(30, 0.4, 2)).unwrap().instance;
    let scaled = presolve_scale(&inst, 10.0).unwrap();
    let p1 = phase1_initialize(&scaled, &Phase1Options::default()).unwrap();
    let cfg = SolverConfig {
        record_trajectory: true,
        trajectory_stride: Some(1),
        ..SnlConfig::default().solver
    };
    let out = snl_main_solve(&scaled, &p1.z, &cfg).unwrap();
    assert_eq!(out.stats.infeasible_accepted, 0);
    let tr = out.trajectory.unwrap();
    assert!(tr.len() > 10);
    for p in &tr {
        let z = Vector::from_vec(p.x.clone());
        assert!(dense_slack(&scaled, &z).cholesky().is_some(), "iterate {} left the cone", p.k);
        if let (Some(e), Some(c)) = (p.residual, p.cos_theta) {
            assert!((e * e - 2.0 * (1.0 + c)).abs() <= 1e-12);
        }
    }
}

#[test]
fn zeta_zero_main_solve_is_monotone() {
    let inst = generate_instance(&GenerateOptions::new(10, 0.5, 1)).unwrap().instance;
    let scaled = presolve_scale(&inst, 10.0).unwrap();
    let p1 = phase1_initialize(&scaled, &Phase1Options::default()).unwrap();
    let cfg = SolverConfig {
        zeta: 0.0,
        beta: 1.0,
        max_iters: 300,
        record_trajectory: true,
        trajectory_stride: Some(1),
        ..SolverConfig::default()
    };
    let out = gdam::vanilla_solve(&SnlDual::new(&scaled), &cfg, &p1.z).unwrap();
    let tr = out.trajectory.unwrap();
    assert!(tr.len() > 2);
    assert!(tr.windows(2).all(|w| w[1].f < w[0].f));
}

#[test]
fn eta_from_gradient_norms() {
    let (zeta, nf, nphi) = (0.9999, 2.0, 1000.0);
    let eta: f64 = zeta * nf / nphi;
    assert!((eta - 1.9998e-3).abs() < 1e-15);
    let gf = Vector::from_vec(vec![nf, 0.0]);
    let gphi = Vector::from_vec(vec![0.0, -nphi]);
    let d = gdam::barrier::centrality(&gf, &gphi, zeta).unwrap();
    assert!((d.eta - eta).abs() < 1e-15);
}

/// Dual point whose slack is `target`, by least squares over the edge basis.
fn dual_point_for(inst: &SnlInstance, target: &DMatrix<f64>) -> Vector {
    let m = V_ENTRIES + inst.num_edges();
    let k = inst.n + 2;
    let cols: Vec<DVector<f64>> = (0..m)
        .map(|i| {
            let mut e = Vector::zeros(m);
            e[i] = 1.0;
            let s = dense_slack(inst, &e);
            DVector::from_iterator(k * k, s.iter().copied())
        })
        .collect();
    let a = DMatrix::from_columns(&cols);
    let rhs = DVector::from_iterator(k * k, target.iter().copied());
    let z = a.clone().svd(true, true).solve(&rhs, 1e-12).unwrap();
    assert!((&a * &z - rhs).amax() <= 1e-9, "target slack not in the range of the edge operator");
    z
}

#[test]
fn recovery_inverts_an_exactly_central_slack() {
    let inst = generate_instance(&GenerateOptions::new(3, 10.0, 8)).unwrap().instance;
    let x = inst.sensors.clone().unwrap();
    let n = inst.n;
    let delta = 1e-3;
    // Z = [I X; Xᵀ XᵀX] + δI, rank two plus a small ridge
    let mut z = DMatrix::<f64>::identity(n + 2, n + 2) * delta;
    let mut u = DMatrix::<f64>::zeros(2, n + 2);
    u[(0, 0)] = 1.0;
    u[(1, 1)] = 1.0;
    for j in 0..n {
        u[(0, j + 2)] = x[j][0];
        u[(1, j + 2)] = x[j][1];
    }
    z += u.transpose() * &u;
    let eta = 0.37;
    let s = z.clone().try_inverse().unwrap() * eta;
    let dual_z = dual_point_for(&inst, &s);
    // ζ = 1: η is then |∇f|/|∇Φ|, which equals the fixture's η up to O(δ)
    let rec = postsolve_recover(&inst, &dual_z, 1.0).unwrap();
    assert!((rec.eta - eta).abs() <= 10.0 * delta * eta, "eta {} vs {eta}", rec.eta);
    let err = rmsd(&rec.positions, &x).unwrap();
    assert!(err <= delta, "rmsd {err}");
    assert!(rec.rank_proxy <= 10.0 * delta);
    let corner = rec.z.view((0, 0), (2, 2)).into_owned();
    assert!((corner - DMatrix::identity(2, 2)).amax() <= 1e-6);
}

#[test]
fn recovery_is_equivariant_under_presolve_scaling() {
    let inst = generate_instance(&GenerateOptions::new(5, 0.8, 6)).unwrap().instance;
    let p1 = phase1_initialize(&inst, &Phase1Options::default()).unwrap();
    let cfg = SnlConfig::default().solver;
    let unscaled = snl_main_solve(&inst, &p1.z, &cfg).unwrap();
    for sigma in [2.0, 10.0] {
        let scaled = presolve_scale(&inst, sigma).unwrap();
        // V is unchanged, edge multipliers scale by 1/σ²
        let mut z = unscaled.x.clone();
        for k in V_ENTRIES..z.len() {
            z[k] /= sigma * sigma;
        }
        let s1 = dense_slack(&inst, &unscaled.x);
        let s2 = dense_slack(&scaled, &z);
        let mut d = DMatrix::<f64>::identity(inst.n + 2, inst.n + 2);
        for i in 2..inst.n + 2 {
            d[(i, i)] = sigma;
        }
        assert!((&d * &s2 * &d - &s1).amax() <= 1e-12 * s1.amax());

        // S⁻¹ maps exactly; η = ζ|∇f|/|∇Φ| depends on the coordinates, and
        // positions scale with √η after the corner normalization
        let a = postsolve_recover(&inst, &unscaled.x, cfg.zeta).unwrap();
        let b = postsolve_recover(&scaled, &z, cfg.zeta).unwrap();
        let ratio = (b.eta / a.eta).sqrt();
        for (p, q) in a.positions.iter().zip(&b.positions) {
            let d = (p[0] * ratio - q[0]).abs().max((p[1] * ratio - q[1]).abs());
            assert!(d <= 1e-9, "sigma {sigma}: {d:e}");
        }
    }
}

#[test]
fn refinement_from_a_perturbed_truth() {
    let inst = generate_instance(&GenerateOptions::new(20, 0.5, 9)).unwrap().instance;
    let truth = inst.sensors.clone().unwrap();
    assert_eq!(refine_positions(&inst, &truth, &RefineOptions::default()), truth);
    let start: Vec<Point> = truth
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let a = i as f64 * 2.399;
            [p[0] + 1e-3 * a.cos(), p[1] + 1e-3 * a.sin()]
        })
        .collect();
    let refined = refine_positions(&inst, &start, &RefineOptions::default());
    assert!(rmsd(&refined, &truth).unwrap() <= 1e-6);
}

#[test]
fn generated_instance_size_matches_the_published_one() {
    let g = generate_instance(&GenerateOptions::new(100, 0.3, 0)).unwrap();
    let m = g.instance.num_edges() as f64;
    assert!((m - 1058.0).abs() <= 0.3 * 1058.0, "edge count {m}");
    assert!(g.warning.is_none());
    let empty = generate_instance(&GenerateOptions::new(10, 0.0, 0)).unwrap();
    assert_eq!(empty.instance.num_edges(), 0);
    assert!(empty.warning.is_some());
}

#[test]
fn slack_operator_examples() {
    let inst = generate_instance(&GenerateOptions::new(2, 10.0, 0)).unwrap().instance;
    let m = inst.num_edges();
    // y = 0, V = -I: only the corner block survives
    let s = assemble_slack(&inst, &vec![0.0; m], [-1.0, 0.0, -1.0]).unwrap();
    let mut expected = DMatrix::zeros(4, 4);
    expected[(0, 0)] = 1.0;
    expected[(1, 1)] = 1.0;
    assert_eq!(s, expected);
    let z = Vector::from_iterator(V_ENTRIES + m, [-1.0, 0.0, -1.0].into_iter().chain(vec![0.0; m]));
    assert!(matches!(
        dual_barrier_objective(&inst, &z),
        Err(Error::NotPositiveDefinite { .. })
    ));
    assert!(matches!(assemble_slack(&inst, &vec![0.0; m + 1], [0.0; 3]), Err(Error::IndexMismatch(_))));
}

#[test]
fn full_pipeline_at_both_presolve_scales() {
    let inst = generate_instance(&GenerateOptions::new(5, 0.8, 6)).unwrap().instance;
    for scale in [1.0, 10.0] {
        let cfg = SnlConfig { scale, ..SnlConfig::default() };
        let res = localize(&inst, &cfg).unwrap();
        assert!(res.is_solved());
        assert!(res.rmsd_refined.unwrap() <= 1e-6, "scale {scale}: {:?}", res.rmsd_refined);
        assert_eq!(res.infeasible_accepted, 0);
    }
}

//! Acceptance gate: the eight end-to-end criteria for the laboratory, each
//! reported as a single pass/fail line with its measured worst case.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.

use hesslab::{parameter_matrix, run_property_suites, suite_dual_paths, suite_reduced_expressions};
use hesslab_core::geometry::SpaceForm;
use hesslab_core::pohozaev::{negative_control, verify_identity, IdentityId, QuadratureGrid};
use hesslab_core::radial::{
    explicit_solution, ode_closed_form, ode_solve, shoot_radius, ProblemParams, RadialSolution,
};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

struct Gate {
    lines: Vec<String>,
    failed: usize,
}

impl Gate {
    fn new() -> Self {
        Gate {
            lines: Vec::new(),
            failed: 0,
        }
    }

    fn record(&mut self, id: usize, name: &str, outcome: Result<String, String>) {
        let line = match outcome {
            Ok(detail) => format!("[PASS] criterion {id}: {name} - {detail}"),
            Err(detail) => {
                self.failed += 1;
                format!("[FAIL] criterion {id}: {name} - {detail}")
            }
        };
        println!("{line}");
        self.lines.push(line);
    }
}

fn solutions(include_quotient: bool) -> Vec<RadialSolution> {
    parameter_matrix(include_quotient)
        .into_iter()
        .map(|p| explicit_solution(p).expect("standard matrix case is admissible"))
        .collect()
}

fn within(name: &str, worst: f64, tol: f64, extra: &str) -> Result<String, String> {
    if worst < tol {
        Ok(format!("{name} {worst:.3e} < {tol:.0e}{extra}"))
    } else {
        Err(format!("{name} {worst:.3e} >= {tol:.0e}{extra}"))
    }
}

fn c1_pde_residual(gate: &mut Gate) {
    let t0 = Instant::now();
    let mut worst = 0.0f64;
    let sols = solutions(true);
    let cases = sols.len();
    for sol in &sols {
        worst = worst.max(sol.max_pde_residual(500).unwrap());
    }
    let dt = t0.elapsed().as_secs_f64();
    let extra = format!(" ({cases} cases, {dt:.2}s)");
    let mut res = within(
        "max |sigma_k/sigma_l - C(n,k)/C(n,l)|",
        worst,
        1e-10,
        &extra,
    );
    if res.is_ok() && dt >= 5.0 {
        res = Err(format!("runtime {dt:.2}s exceeds 5s budget"));
    }
    gate.record(1, "explicit-solution PDE residual", res);
}

fn c2_rigidity(gate: &mut Gate) {
    let mut worst = 0.0f64;
    for sol in solutions(true) {
        let radius = sol.radius();
        for i in 0..=500 {
            let r = radius * i as f64 / 500.0;
            let b = sol.b_tensor(r).unwrap();
            worst = worst.max((b.lambda_radial - 1.0).abs());
            worst = worst.max((b.lambda_tangential - 1.0).abs());
        }
    }
    gate.record(
        2,
        "rigidity b = g",
        within("max |lambda - 1|", worst, 1e-10, ""),
    );
}

fn c3_p_functions(gate: &mut Gate) {
    let mut worst_p = 0.0f64;
    let mut worst_pt = 0.0f64;
    for sol in solutions(true) {
        let p = sol.params();
        let curv = p.sf.curvature();
        let expected = curv.powi(3) * p.c1 * p.c1 + p.c2 * p.c2 - 2.0 * curv * p.c1;
        let radius = sol.radius();
        for i in 0..=500 {
            let r = radius * i as f64 / 500.0;
            worst_p = worst_p.max((sol.p_function(r).unwrap() - expected).abs());
        }
        // P-tilde is constant: its finite-difference derivative vanishes
        let h = 1e-5 * radius;
        for i in 1..100 {
            let r = radius * i as f64 / 100.0 - h;
            if r - h <= 0.0 || r + h >= radius {
                continue;
            }
            let d = (sol.p_tilde_function(r + h).unwrap() - sol.p_tilde_function(r - h).unwrap())
                / (2.0 * h);
            worst_pt = worst_pt.max(d.abs());
        }
    }
    let res = within("max |P - const|", worst_p, 1e-10, "")
        .and_then(|d| within("max |dP~/dr|", worst_pt, 1e-8, "").map(|d2| format!("{d}; {d2}")));
    gate.record(3, "P and P~ first integrals", res);
}

fn c4_pohozaev(gate: &mut Gate) {
    let t0 = Instant::now();
    let grid = QuadratureGrid::default();
    let mut worst = 0.0f64;
    let mut unconverged = 0usize;
    let sols = solutions(false);
    for sol in &sols {
        for id in IdentityId::ALL_INTEGRAL {
            let rep = verify_identity(sol, id, &grid).unwrap();
            worst = worst.max(rep.rel_residual);
            if !rep.converged {
                unconverged += 1;
            }
        }
    }
    // negative control on the flat base case: residual blows up, ~linear in eps
    let base = &sols
        .iter()
        .find(|s| s.params().sf.curvature() == 0.0 && s.params().k == 2 && s.params().sf.dim() == 3)
        .unwrap();
    let res_at = |eps: f64| {
        negative_control(base, eps, IdentityId::L6_3, &grid)
            .unwrap()
            .rel_residual
    };
    let (r4, r3, r2) = (res_at(1e-4), res_at(1e-3), res_at(1e-2));
    let dt = t0.elapsed().as_secs_f64();
    let mut res = within(
        "max rel_residual over L6_1/L6_2_i/L6_2_ii/L6_3",
        worst,
        1e-8,
        &format!(" ({} cases, {dt:.2}s)", sols.len()),
    );
    if res.is_ok() && unconverged > 0 {
        res = Err(format!("{unconverged} identity runs did not converge"));
    }
    if res.is_ok() && r3 <= 1e-6 {
        res = Err(format!(
            "negative control at eps=1e-3 only reached {r3:.3e}"
        ));
    }
    for ratio in [r3 / r4, r2 / r3] {
        if res.is_ok() && !(5.0..=20.0).contains(&ratio) {
            res = Err(format!("eps-scaling ratio {ratio:.2} outside [5, 20]"));
        }
    }
    if res.is_ok() && dt >= 30.0 {
        res = Err(format!("runtime {dt:.2}s exceeds 30s budget"));
    }
    res = res.map(|d| format!("{d}; control residuals {r4:.2e}/{r3:.2e}/{r2:.2e}"));
    gate.record(4, "Rellich-Pohozaev identity suite", res);
}

fn c5_elemsym_properties(gate: &mut Gate) {
    let t0 = Instant::now();
    let results = run_property_suites(1000, 42, 8);
    let dt = t0.elapsed().as_secs_f64();
    let failing: Vec<&str> = results.iter().filter(|r| !r.pass).map(|r| r.name).collect();
    let res = if !failing.is_empty() {
        Err(format!("failing suites: {failing:?}"))
    } else if dt >= 60.0 {
        Err(format!("runtime {dt:.2}s exceeds 60s budget"))
    } else {
        Ok(format!(
            "{} suites x 1000 trials, all pass ({dt:.2}s)",
            results.len()
        ))
    };
    gate.record(5, "symmetric-function property suites", res);
}

fn c6_ode_cross_check(gate: &mut Gate) {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut worst_r = 0.0f64;
    let mut count = 0usize;
    while count < 50 {
        let curvature = [-1.0, 0.0, 1.0][count % 3];
        let (c1, c2) = match curvature as i64 {
            0 => (rng.gen_range(-0.5..0.8), rng.gen_range(0.2..2.0)),
            1 => (rng.gen_range(-0.5..0.8), rng.gen_range(0.2..1.5)),
            _ => {
                let c1 = rng.gen_range(-0.5..0.8);
                (c1, rng.gen_range(0.1..0.9 * (1.0 - c1)))
            }
        };
        let sf = SpaceForm::new(3, curvature).unwrap();
        let params = ProblemParams::new(sf, 2, 0, c1, c2).unwrap();
        let expected = match explicit_solution(params) {
            Ok(sol) => sol.radius(),
            Err(_) => continue, // sampled outside the admissible region
        };
        let (shot, _) = shoot_radius(&params).unwrap();
        worst_r = worst_r.max((shot - expected).abs());
        count += 1;
    }
    // RK4 trajectory against the closed-form solution at a coarse step
    let step = 0.01;
    let mut worst_traj = 0.0f64;
    for (curvature, v0) in [(0.0, -1.125), (1.0, -0.4), (-1.0, -0.6)] {
        let sf = SpaceForm::new(3, curvature).unwrap();
        for pt in ode_solve(sf, v0, 1.2, step).unwrap() {
            let (v, _) = ode_closed_form(curvature, v0, pt.r);
            worst_traj = worst_traj.max((pt.v - v).abs());
        }
    }
    let res = within("max |R_shoot - R_closed|", worst_r, 1e-10, " (50 triples)").and_then(|d| {
        within(
            "max RK4 trajectory error",
            worst_traj,
            step.powi(4) * 1e3,
            "",
        )
        .map(|d2| format!("{d}; {d2}"))
    });
    gate.record(6, "ODE shooting cross-check", res);
}

fn c7_dual_paths(gate: &mut Gate) {
    let r = suite_dual_paths(1000, 42, 8);
    gate.record(
        7,
        "sigma_k dual-path agreement",
        within("max rel disagreement", r.worst, 1e-9, " (1000 matrices)"),
    );
}

fn c8_reduced_expressions(gate: &mut Gate) {
    let r = suite_reduced_expressions(1000, 42, 8);
    let res = if r.pass {
        Ok(format!(
            "min expression value {:.3e} >= -1e-10 (1000 spectra, Ku ~ U[0,1])",
            r.worst
        ))
    } else {
        Err(format!("min expression value {:.3e} < -1e-10", r.worst))
    };
    gate.record(8, "reduced ellipticity expressions", res);
}

#[test]
fn acceptance() {
    let mut gate = Gate::new();
    c1_pde_residual(&mut gate);
    c2_rigidity(&mut gate);
    c3_p_functions(&mut gate);
    c4_pohozaev(&mut gate);
    c5_elemsym_properties(&mut gate);
    c6_ode_cross_check(&mut gate);
    c7_dual_paths(&mut gate);
    c8_reduced_expressions(&mut gate);
    assert_eq!(gate.failed, 0, "\n{}", gate.lines.join("\n"));
}

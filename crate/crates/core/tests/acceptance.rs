//! Acceptance checks, one PASS/FAIL line per criterion.
//!
//!     cargo test --release --test acceptance
//!     cargo test --release --test acceptance -- --include-ignored   # adds the h = k = 1/128 norm check
//!
//! Setting `VISCODAMAGE_SLOW=1` also enables the slow check.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use common::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use viscodamage::assembly::{assemble_damage_operators, v_norm, z0_norm, LoadSpec};
use viscodamage::config::{Scenario, SimConfig};
use viscodamage::convergence::{ConvergenceReport, ConvergenceStudy, Sweep};
use viscodamage::friction::FrictionModel;
use viscodamage::material::{apply_viscosity, project_von_mises, MaterialParams};
use viscodamage::mesh::Mesh;
use viscodamage::solvers::{solve_box_qp, solve_velocity_step, SolverTolerances};
use viscodamage::tensor::SymTensor2;

enum Verdict {
    Pass(String),
    Fail(String),
    Skip(String),
}

type Check = Result<(bool, String), String>;

fn verdict(check: Check) -> Verdict {
    match check {
        Ok((true, d)) => Verdict::Pass(d),
        Ok((false, d)) => Verdict::Fail(d),
        Err(e) => Verdict::Fail(format!("error: {e}")),
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn orders(report: &ConvergenceReport, damage: bool) -> Vec<f64> {
    report
        .rows
        .iter()
        .filter_map(|r| if damage { r.order_zeta } else { r.order_w })
        .collect()
}

fn fmt_orders(v: &[f64]) -> String {
    v.iter().map(|o| format!("{o:.3}")).collect::<Vec<_>>().join(", ")
}

fn study(sweep: Sweep) -> ConvergenceStudy {
    let values = vec![0.25, 0.125, 0.0625];
    let r = 1.0 / 64.0;
    ConvergenceStudy::new(SimConfig::scenario(Scenario::Square), sweep, values, r, r)
}

fn h_convergence(reference: &viscodamage::convergence::StudyRun) -> Check {
    let report = study(Sweep::H).run_against(reference).map_err(err)?;
    let w = orders(&report, false);
    let z = orders(&report, true);
    let ok = w.len() == 2 && z.len() == 2 && w.iter().all(|o| (0.6..=1.3).contains(o)) && z.iter().all(|&o| o >= 0.9);
    Ok((ok, format!("velocity orders [{}] in [0.6, 1.3], damage orders [{}] >= 0.9", fmt_orders(&w), fmt_orders(&z))))
}

fn k_convergence(reference: &viscodamage::convergence::StudyRun) -> Check {
    let report = study(Sweep::K).run_against(reference).map_err(err)?;
    let w = orders(&report, false);
    let z = orders(&report, true);
    let ok = w.len() == 2 && z.len() == 2 && w.iter().all(|o| (0.7..=1.5).contains(o)) && z.iter().all(|o| (0.7..=2.0).contains(o));
    Ok((ok, format!("velocity orders [{}] in [0.7, 1.5], damage orders [{}] in [0.7, 2.0]", fmt_orders(&w), fmt_orders(&z))))
}

fn reference_norms() -> Check {
    let config = SimConfig::scenario(Scenario::Square).with_resolution(1.0 / 128.0, 1.0 / 128.0);
    let sim = config.simulation().map_err(err)?;
    let last = sim.run_with(config.initial_state(&sim).map_err(err)?, |_| Ok(())).map_err(err)?;
    let w = v_norm(&last.w, sim.mesh()).map_err(err)?;
    let z = z0_norm(&last.zeta, sim.mesh()).map_err(err)?;
    let dw = (w - 0.23525).abs() / 0.23525;
    let dz = (z - 0.75375).abs() / 0.75375;
    Ok((
        dw <= 0.15 && dz <= 0.15,
        format!("|w|_V = {w:.5} ({:.1}% from 0.23525), |zeta|_Z0 = {z:.5} ({:.1}% from 0.75375)", 100.0 * dw, 100.0 * dz),
    ))
}

fn strip_mean(mesh: &Mesh, values: &[f64], lo: f64, hi: f64) -> f64 {
    let picked: Vec<f64> = mesh
        .vertices()
        .iter()
        .zip(values)
        .filter(|(p, _)| p[0] >= lo - 1e-12 && p[0] <= hi + 1e-12)
        .map(|(_, &v)| v)
        .collect();
    picked.iter().sum::<f64>() / picked.len() as f64
}

fn final_damage(id: &str, m: f64) -> Result<(Mesh, Vec<f64>), String> {
    let config = SimConfig::experiment(id).map_err(err)?.with_resolution(1.0 / m, 1.0 / m);
    let sim = config.simulation().map_err(err)?;
    let last = sim.run_with(config.initial_state(&sim).map_err(err)?, |_| Ok(())).map_err(err)?;
    Ok((sim.mesh().clone(), last.zeta.values))
}

fn experiment1() -> Check {
    let (mesh, zeta) = final_damage("1", 32.0)?;
    let left = strip_mean(&mesh, &zeta, 0.0, 0.2);
    let right = strip_mean(&mesh, &zeta, 1.8, 2.0);
    Ok((left < right, format!("mean damage {left:.5} on x in [0, 0.2] vs {right:.5} on x in [1.8, 2]")))
}

fn experiment2() -> Check {
    let (mesh, zeta) = final_damage("2", 32.0)?;
    let worst = (0..zeta.len()).min_by(|&a, &b| zeta[a].total_cmp(&zeta[b])).unwrap();
    let p = mesh.vertices()[worst];
    let dist = (p[0] - 1.0).hypot(p[1]);
    Ok((dist <= 0.3, format!("minimum damage {:.5} at ({:.4}, {:.4}), distance {dist:.4} from (1, 0)", zeta[worst], p[0], p[1])))
}

fn random_tensor(rng: &mut StdRng) -> SymTensor2 {
    SymTensor2::new(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0))
}

fn random_vec(rng: &mut StdRng) -> [f64; 2] {
    [rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)]
}

fn properties() -> Check {
    let mut failures = Vec::new();

    let mut steps = 0;
    for id in ["1", "2", "3", "square"] {
        for z0 in ["1", "0.3"] {
            let mut config = SimConfig::experiment(id).map_err(err)?.with_resolution(0.125, 0.125);
            config.set("zeta0", z0).map_err(err)?;
            let sim = config.simulation().map_err(err)?;
            sim.run_with(config.initial_state(&sim).map_err(err)?, |s| {
                steps += 1;
                if !(s.zeta.min() >= 0.0 && s.zeta.max() <= 1.0) {
                    failures.push(format!("damage bounds, experiment {id}, step {}", s.step));
                }
                Ok(())
            })
            .map_err(err)?;
        }
    }

    let mut rng = StdRng::seed_from_u64(2024);
    let j = FrictionModel::default();
    let params = MaterialParams::default();
    let m_a = params.viscosity_monotonicity();
    let (mut homog, mut subadd, mut relmon, mut mono, mut nonexp) = (0, 0, 0, 0, 0);
    for i in 0..10_000 {
        let xi = if i % 10 == 0 { [0.0, 0.0] } else { random_vec(&mut rng) };
        let x2 = random_vec(&mut rng);
        let e1 = random_vec(&mut rng);
        let e2 = random_vec(&mut rng);
        let t: f64 = rng.gen_range(0.0..5.0);
        let lhs = j.clarke_derivative(xi, [t * e1[0], t * e1[1]]);
        if (lhs - t * j.clarke_derivative(xi, e1)).abs() > 1e-10 * (1.0 + lhs.abs()) {
            homog += 1;
        }
        if j.clarke_derivative(xi, [e1[0] + e2[0], e1[1] + e2[1]]) > j.clarke_derivative(xi, e1) + j.clarke_derivative(xi, e2) + 1e-10 {
            subadd += 1;
        }
        let d = [x2[0] - xi[0], x2[1] - xi[1]];
        if j.clarke_derivative(xi, d) + j.clarke_derivative(x2, [-d[0], -d[1]]) > 1e-10 {
            relmon += 1;
        }

        let a = random_tensor(&mut rng);
        let b = random_tensor(&mut rng);
        let diff = a - b;
        let gap = (apply_viscosity(a, &params) - apply_viscosity(b, &params)).ddot(&diff) - m_a * diff.norm_squared();
        if gap < -1e-10 * (1.0 + diff.norm_squared()) {
            mono += 1;
        }
        let z: f64 = rng.gen_range(0.0..1.0);
        if (project_von_mises(a, z, 1.0) - project_von_mises(b, z, 1.0)).norm() > diff.norm() * (1.0 + 1e-12) + 1e-12 {
            nonexp += 1;
        }
    }
    for (name, count) in [
        ("homogeneity", homog),
        ("subadditivity", subadd),
        ("relaxed monotonicity", relmon),
        ("viscosity monotonicity", mono),
        ("von Mises nonexpansiveness", nonexp),
    ] {
        if count > 0 {
            failures.push(format!("{name}: {count} violations"));
        }
    }

    let mesh = Mesh::structured(2.0, 1.0, 1.0 / 32.0).map_err(err)?;
    let ops = assemble_damage_operators(&mesh, &params);
    let ones = vec![1.0; mesh.num_vertices()];
    let row_sum = ops.stiffness.matvec(&ones).iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mass_total: f64 = ops.mass.matvec(&ones).iter().sum();
    if row_sum > 1e-12 {
        failures.push(format!("stiffness row sum {row_sum:e}"));
    }
    if (mass_total - 2.0).abs() > 1e-12 {
        failures.push(format!("mass total {mass_total} vs 2"));
    }

    let detail = if failures.is_empty() {
        format!("{steps} states within [0, 1]; 10^4 samples per identity; stiffness row sums <= {row_sum:.1e}; mass total {mass_total}")
    } else {
        failures.join("; ")
    };
    Ok((failures.is_empty(), detail))
}

fn oracles() -> Check {
    let mut step_dev = 0.0f64;
    for load in slipping_loads() {
        for k in [0.5, 0.125] {
            let (d, oracle) = two_triangle_discrepancy(load, k);
            if oracle.slip.abs() <= 1e-3 {
                return Err("oracle load does not produce slip".into());
            }
            step_dev = step_dev.max(d);
        }
    }

    let tol = SolverTolerances::default();
    let mut rng = StdRng::seed_from_u64(77);
    let mut qp_dev = 0.0f64;
    for trial in 0..400 {
        let n = 1 + trial % 8;
        let h = random_spd(n, &mut rng, 0.6);
        let b: Vec<f64> = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let warm: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
        let x = solve_box_qp(&h, &b, 0.0, 1.0, &warm, &tol).map_err(err)?;
        let exact = enumerate_box_qp(&dense(&h), &b, 0.0, 1.0);
        qp_dev = x.iter().zip(&exact).fold(qp_dev, |m, (a, e)| m.max((a - e).abs()));
    }

    let p = square_problem(0.5);
    let model = FrictionModel::default();
    let (mut w_dev, mut e_dev) = (0.0f64, 0.0f64);
    for trial in 0..40 {
        let scale = [0.1, 1.0, 10.0, 100.0][trial % 4];
        let r: Vec<f64> = (0..p.k.dim()).map(|_| rng.gen_range(-scale..scale)).collect();
        let w = solve_velocity_step(&p.k, &r, &p.contact, &model, None, &tol).map_err(err)?.w;
        let exact = dual_velocity_oracle(&p.k, &p.contact, &model, &r);
        let size = exact.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        w_dev = w.iter().zip(&exact).fold(w_dev, |m, (a, e)| m.max((a - e).abs() / size));
        let ea = exact_energy(&p.k, &p.contact, &model, &r, &w);
        let eb = exact_energy(&p.k, &p.contact, &model, &r, &exact);
        e_dev = e_dev.max((ea - eb).abs() / eb.abs().max(1.0));
    }

    let ok = step_dev <= 1e-9 && qp_dev <= 1e-8 && w_dev <= 1e-5 && e_dev <= 1e-8;
    Ok((
        ok,
        format!(
            "two-triangle step {step_dev:.1e} (<= 1e-9); box QP {qp_dev:.1e} (<= 1e-8); velocity {w_dev:.1e} (<= 1e-5), energy {e_dev:.1e} (<= 1e-8) on {} free dofs",
            p.k.dim()
        ),
    ))
}

fn stationarity() -> Check {
    let mut worst = 0.0f64;
    let mut states = 0;
    for id in ["square", "2"] {
        for steps in [1usize, 8, 32] {
            let mut config = SimConfig::experiment(id).map_err(err)?;
            config.h = 0.125;
            config.set("steps", &steps.to_string()).map_err(err)?;
            config.load = LoadSpec::default();
            let sim = config.simulation().map_err(err)?;
            sim.run_with(sim.constant_initial_state(1.0).map_err(err)?, |s| {
                states += 1;
                worst = worst.max(s.w.max_abs()).max(s.u.max_abs());
                worst = s.zeta.values.iter().fold(worst, |m, z| m.max((z - 1.0).abs()));
                Ok(())
            })
            .map_err(err)?;
        }
    }
    Ok((worst <= 1e-12, format!("largest deviation from (0, 0, 1) over {states} states: {worst:e}")))
}

fn slow_enabled() -> bool {
    std::env::args().any(|a| a == "--ignored" || a == "--include-ignored")
        || std::env::var("VISCODAMAGE_SLOW").is_ok_and(|v| v == "1")
}

fn main() -> ExitCode {
    let start = Instant::now();
    let slow = slow_enabled();
    let mut results: Vec<(u32, &str, Verdict)> = std::thread::scope(|scope| {
        let convergence = scope.spawn(|| {
            let reference = study(Sweep::H).compute_reference();
            match reference {
                Ok(r) => (verdict(h_convergence(&r)), verdict(k_convergence(&r))),
                Err(e) => (Verdict::Fail(format!("reference run: {e}")), Verdict::Fail(format!("reference run: {e}"))),
            }
        });
        let norms = scope.spawn(move || {
            if slow {
                verdict(reference_norms())
            } else {
                Verdict::Skip("slow; run with --include-ignored or VISCODAMAGE_SLOW=1".into())
            }
        });
        let exp1 = scope.spawn(|| verdict(experiment1()));
        let exp2 = scope.spawn(|| verdict(experiment2()));
        let props = scope.spawn(|| verdict(properties()));
        let oracle = scope.spawn(|| verdict(oracles()));
        let still = scope.spawn(|| verdict(stationarity()));

        let join = |h: std::thread::ScopedJoinHandle<'_, Verdict>| h.join().unwrap_or_else(|_| Verdict::Fail("panicked".into()));
        let (c1, c2) = convergence.join().unwrap_or_else(|_| (Verdict::Fail("panicked".into()), Verdict::Fail("panicked".into())));
        vec![
            (1, "h-convergence", c1),
            (2, "k-convergence", c2),
            (3, "reference norms at h = k = 1/128", join(norms)),
            (4, "experiment 1 damage profile", join(exp1)),
            (5, "experiment 2 damage location", join(exp2)),
            (6, "property suites", join(props)),
            (7, "oracle equivalence", join(oracle)),
            (8, "stationarity", join(still)),
        ]
    });
    results.sort_by_key(|r| r.0);
    let mut failed = 0;
    for (n, name, v) in &results {
        match v {
            Verdict::Pass(d) => println!("PASS criterion {n} ({name}): {d}"),
            Verdict::Fail(d) => {
                failed += 1;
                println!("FAIL criterion {n} ({name}): {d}")
            }
            Verdict::Skip(d) => println!("SKIP criterion {n} ({name}): {d}"),
        }
    }
    println!("acceptance finished in {:.1} s, {failed} failed", start.elapsed().as_secs_f64());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

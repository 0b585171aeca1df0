//! Acceptance criteria, one PASS/FAIL line each. Exits nonzero if any fails.

use std::process::ExitCode;
use std::time::Instant;

use etdrk4rdp::harness::{
    bench, run_convergence, run_damping_demo, run_self_convergence, stability_check, ConvergenceReport, RunConfig,
    Scheme,
};
use etdrk4rdp::problems::ProblemKind;
use etdrk4rdp::rational::stage_weights;

mod common;
use common::{dense_equivalence_gap, exact_one_step_gap, rk4_reduction_gap};

struct Verdict {
    checks: Vec<(String, bool)>,
}

impl Verdict {
    fn new() -> Self {
        Self { checks: Vec::new() }
    }

    fn check(&mut self, label: impl Into<String>, ok: bool) {
        self.checks.push((label.into(), ok));
    }

    fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.1)
    }

    fn summary(&self) -> String {
        self.checks
            .iter()
            .map(|(l, ok)| if *ok { l.clone() } else { format!("{l} [x]") })
            .collect::<Vec<_>>()
            .join("; ")
    }
}

fn within_factor(value: Option<f64>, target: f64, factor: f64) -> bool {
    value.is_some_and(|v| v >= target / factor && v <= target * factor)
}

fn fmt_list(values: &[Option<f64>], precision: usize) -> String {
    let items: Vec<String> = values
        .iter()
        .map(|v| v.map_or_else(|| "-".into(), |x| format!("{x:.precision$e}")))
        .collect();
    format!("[{}]", items.join(", "))
}

fn fmt_orders(r: &ConvergenceReport) -> String {
    let items: Vec<String> = r.orders().iter().flatten().map(|p| format!("{p:.2}")).collect();
    format!("[{}]", items.join(", "))
}

fn no_failures(v: &mut Verdict, r: &ConvergenceReport) {
    let failed: Vec<&str> = r.rows.iter().filter_map(|row| row.failure.as_deref()).collect();
    v.check(format!("row failures {}", failed.len()), failed.is_empty());
}

fn table_study(v: &mut Verdict, kind: ProblemKind, target: [f64; 3], orders_ok: impl Fn(f64) -> bool) {
    let report = run_convergence(&RunConfig::new(kind), 3).expect("study runs");
    no_failures(v, &report);
    let errors = report.errors();
    let ms: Vec<String> = report.rows.iter().map(|r| r.m.to_string()).collect();
    v.check(format!("m = [{}]", ms.join(", ")), true);
    for (i, (e, p)) in errors.iter().zip(target).enumerate() {
        let ratio = e.map_or(f64::NAN, |e| e / p);
        v.check(
            format!("row {} error {} vs {p:.2e} (x{ratio:.2})", i + 1, fmt_list(&[*e], 3)),
            within_factor(*e, p, 3.0),
        );
    }
    let orders: Vec<f64> = report.orders().into_iter().flatten().collect();
    v.check(
        format!("orders {}", fmt_orders(&report)),
        orders.len() == 2 && orders.iter().all(|&p| orders_ok(p)),
    );
}

fn criterion_1(v: &mut Verdict) {
    table_study(v, ProblemKind::DirichletLinear, [1.50e-5, 1.07e-6, 7.23e-8], |p| {
        p >= 3.7
    });
}

fn criterion_2(v: &mut Verdict) {
    table_study(v, ProblemKind::NeumannLinear, [4.37e-6, 4.05e-7, 3.03e-8], |p| {
        (3.4..=4.0).contains(&p)
    });
}

fn criterion_3(v: &mut Verdict) {
    let cfg = RunConfig::new(ProblemKind::MichaelisMenten).with_k(0.1);
    let report = run_self_convergence(&cfg, 4).expect("study runs");
    no_failures(v, &report);
    let errors: Vec<f64> = report.errors().into_iter().flatten().collect();
    let orders: Vec<f64> = report.orders().into_iter().flatten().collect();
    v.check(
        format!("h = {}, errors {}", report.rows[0].h, fmt_list(&report.errors(), 3)),
        errors.len() == 4 && errors.windows(2).all(|w| w[1] < w[0]),
    );
    v.check(
        format!("orders {}", fmt_orders(&report)),
        orders.len() == 3 && orders.windows(2).all(|w| w[1] > w[0]) && orders[2] >= 3.5,
    );

    let demo = run_damping_demo(19, 0.1).expect("demo runs");
    let rdp = demo.scheme(Scheme::Rdp).expect("rdp run");
    let p22 = demo.scheme(Scheme::P22).expect("p22 run");
    v.check("both schemes finish", rdp.failure.is_none() && p22.failure.is_none());
    let min = rdp.min_over_run();
    v.check(format!("rdp min over snapshots {min:.3e} >= -1e-6"), min >= -1e-6);
    let ratio = demo.first_step_ratio().unwrap_or(f64::NAN);
    v.check(
        format!("p22/rdp first-step midline ratio {ratio:.1} >= 10"),
        ratio >= 10.0,
    );
}

fn criterion_4(v: &mut Verdict) {
    let cfg = RunConfig::new(ProblemKind::Brusselator)
        .with_m(79)
        .with_k(0.05)
        .with_t_final(2.0);
    let report = run_self_convergence(&cfg, 4).expect("study runs");
    no_failures(v, &report);
    let errors = report.errors();
    v.check(
        format!(
            "h = {}, coarsest error {} vs 3.14e-4",
            report.rows[0].h,
            fmt_list(&errors[..1], 3)
        ),
        within_factor(errors[0], 3.14e-4, 3.0),
    );
    let orders: Vec<f64> = report.orders().into_iter().flatten().collect();
    let target = [4.04, 3.76, 3.63];
    v.check(
        format!("orders {} vs [4.04, 3.76, 3.63] +-0.4", fmt_orders(&report)),
        orders.len() == 3 && orders.iter().zip(target).all(|(p, q)| (p - q).abs() <= 0.4),
    );
}

fn criterion_5(v: &mut Verdict) {
    let r = stability_check(0.1).expect("stability check");
    v.check(
        format!("sum w - 1 = {:.1e}", r.weight_sum - 1.0),
        (r.weight_sum - 1.0).abs() <= 1e-12,
    );
    let defect = r.taylor_defects.iter().fold(0.0f64, |m, d| m.max(d.abs()));
    v.check(format!("taylor defect {defect:.1e}"), defect <= 1e-12);
    v.check(format!("min E(y) {:.3e}", r.e_min), r.e_min >= -1e-8);
    v.check(
        format!("contact slope {:.3}", r.contact_slope),
        (r.contact_slope - 5.0).abs() <= 0.1,
    );
    v.check(
        format!("pf/product gap {:.1e}", r.pf_product_gap),
        r.pf_product_gap <= 1e-10,
    );
}

fn criterion_6(v: &mut Verdict) {
    let w = stage_weights(1.0).expect("weights");
    let worst = w
        .identity_checks()
        .iter()
        .map(|c| c.relative_error)
        .fold(0.0f64, f64::max);
    v.check(format!("16 identities at k = 1, worst {worst:.1e}"), worst <= 1e-10);
    let mut sum_gap: f64 = 0.0;
    for k in [1.0, 0.1, 0.05, 0.0125] {
        let sums = stage_weights(k).expect("weights").sums();
        for (s, t) in sums.iter().zip([k / 2.0, k / 6.0, k / 6.0, k / 6.0]) {
            sum_gap = sum_gap.max(((s - t) / t).abs());
        }
    }
    v.check(format!("weight sums, worst relative {sum_gap:.1e}"), sum_gap <= 1e-12);
}

fn criterion_7(v: &mut Verdict) {
    let worst = (0..50u64).map(dense_equivalence_gap).fold(0.0f64, f64::max);
    v.check(
        format!("dense vs partial fractions, 50 seeds, worst {worst:.1e}"),
        worst <= 1e-10,
    );
    let rk4 = rk4_reduction_gap();
    v.check(format!("A = 0 vs RK4 {rk4:.1e}"), rk4 <= 1e-12);
    let ratio = exact_one_step_gap(0.05) / exact_one_step_gap(0.025);
    v.check(format!("one-step gap ratio {ratio:.2}"), (28.0..=36.0).contains(&ratio));
}

fn criterion_8(v: &mut Verdict) {
    let cfg = RunConfig::new(ProblemKind::Brusselator)
        .with_m(199)
        .with_k(0.05)
        .with_t_final(0.5);
    let r = bench(&cfg, &[1, 4]).expect("bench runs");
    v.check(
        format!(
            "{} unknowns, {} steps, {} cores",
            r.unknowns, r.steps, r.available_parallelism
        ),
        true,
    );
    let dev = r.max_deviation();
    v.check(format!("deviation {dev:.1e}"), dev <= 1e-12);
    let speedup = r.speedup(4).unwrap_or(f64::NAN);
    let times: Vec<String> = r.entries.iter().map(|e| format!("{:.2} s", e.step_seconds)).collect();
    v.check(
        format!("stepping [{}], speedup {speedup:.2} >= 1.5", times.join(", ")),
        speedup >= 1.5,
    );
}

type Criterion = (u32, &'static str, fn(&mut Verdict), f64);

const CRITERIA: [Criterion; 8] = [
    (1, "dirichlet-linear convergence", criterion_1, 120.0),
    (2, "neumann-linear convergence", criterion_2, 60.0),
    (3, "michaelis-menten mismatched data", criterion_3, 30.0),
    (4, "brusselator self-convergence", criterion_4, 600.0),
    (5, "rational function properties", criterion_5, f64::INFINITY),
    (6, "coefficient algebra", criterion_6, f64::INFINITY),
    (7, "oracle equivalence", criterion_7, f64::INFINITY),
    (8, "parallel determinism and speedup", criterion_8, f64::INFINITY),
];

fn main() -> ExitCode {
    let only: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = Vec::new();
    for (id, title, run, budget) in CRITERIA {
        if !only.is_empty() && !only.contains(&id) {
            continue;
        }
        let clock = Instant::now();
        let mut v = Verdict::new();
        run(&mut v);
        let seconds = clock.elapsed().as_secs_f64();
        if budget.is_finite() {
            v.check(format!("{seconds:.1} s < {budget} s"), seconds < budget);
        }
        let status = if v.passed() { "PASS" } else { "FAIL" };
        println!("{status} criterion {id} ({title}): {}", v.summary());
        if !v.passed() {
            failed.push(id);
        }
    }
    if failed.is_empty() {
        println!("all acceptance criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("failed criteria: {failed:?}");
        ExitCode::FAILURE
    }
}

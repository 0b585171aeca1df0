use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use etdrk4rdp::harness::{
    bench, parse_list, read_config_file, run_convergence, run_damping_demo_until, run_self_convergence, solve,
    stability_check, write_json, write_report, write_solve, ConvergenceReport, RunConfig,
};
use etdrk4rdp::problems::ProblemKind;
use etdrk4rdp::{Error, Result};

#[derive(Parser)]
#[command(
    name = "etdrk4rdp",
    version,
    about = "ETDRK4 with real distinct poles for 2D reaction-diffusion"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate one configuration.
    Solve(Flags),
    /// Refine k and h together against the exact solution.
    Converge(Flags),
    /// Halve k on a fixed grid and compare successive runs.
    SelfConverge(Flags),
    /// Mismatched-data run with the RDP and (2,2) Padé schemes.
    DampingDemo(Flags),
    /// Properties of the rational function and its stage weights.
    StabilityCheck(Flags),
    /// Time the stepping loop for several worker counts.
    Bench(Flags),
}

#[derive(clap::Args, Clone, Default)]
struct Flags {
    /// key = value file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    problem: Option<String>,
    /// Interior points per direction.
    #[arg(long)]
    m: Option<usize>,
    /// Nominal spacing, used when --m is absent.
    #[arg(long)]
    h: Option<f64>,
    #[arg(long)]
    k: Option<f64>,
    #[arg(long = "t-final")]
    t_final: Option<f64>,
    /// rdp, p22 or exact-ref.
    #[arg(long)]
    scheme: Option<String>,
    /// Worker count, or a comma-separated list for bench.
    #[arg(long)]
    workers: Option<String>,
    #[arg(long)]
    levels: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma-separated snapshot times.
    #[arg(long = "snapshot-at")]
    snapshot_at: Option<String>,
}

impl Flags {
    fn resolve(&self, default_problem: ProblemKind) -> Result<(RunConfig, Vec<usize>)> {
        let file = match &self.config {
            Some(path) => read_config_file(path)?,
            None => Vec::new(),
        };
        let problem = match (&self.problem, file.iter().find(|(k, _)| k == "problem")) {
            (Some(p), _) => p.parse()?,
            (None, Some((_, p))) => p.parse()?,
            (None, None) => default_problem,
        };
        let mut cfg = RunConfig::new(problem);
        let mut workers = vec![1];
        for (key, value) in &file {
            if key == "workers" {
                workers = parse_workers(value)?;
            } else if key != "problem" {
                cfg.set(key, value)?;
            }
        }
        if let Some(m) = self.m {
            cfg.m = Some(m);
        }
        if let Some(h) = self.h {
            cfg.h = Some(h);
            if self.m.is_none() {
                cfg.m = None;
            }
        }
        if let Some(k) = self.k {
            cfg.k = k;
        }
        if let Some(t) = self.t_final {
            cfg.t_final = t;
        }
        if let Some(s) = &self.scheme {
            cfg.scheme = s.parse()?;
        }
        if let Some(w) = &self.workers {
            workers = parse_workers(w)?;
        }
        if let Some(l) = self.levels {
            cfg.levels = l;
        }
        if let Some(o) = &self.out {
            cfg.out = Some(o.clone());
        }
        if let Some(s) = &self.snapshot_at {
            cfg.snapshot_at =
                parse_list(s).map_err(|_| Error::InvalidArgument(format!("invalid snapshot list '{s}'")))?;
        }
        cfg.workers = workers[0];
        Ok((cfg, workers))
    }
}

fn parse_workers(s: &str) -> Result<Vec<usize>> {
    let list: Vec<usize> = parse_list(s).map_err(|_| Error::InvalidArgument(format!("invalid worker list '{s}'")))?;
    if list.is_empty() {
        return Err(Error::InvalidArgument("empty worker list".into()));
    }
    Ok(list)
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".into(), |x| format!("{x:.3e}"))
}

fn print_study(r: &ConvergenceReport) {
    println!("{} / {} / T = {}", r.problem, r.scheme, r.t_final);
    println!(
        "{:>10} {:>4} {:>11} {:>11} {:>7} {:>9}",
        "k", "m", "h", "error", "order", "seconds"
    );
    for row in &r.rows {
        let order = row.order.map_or_else(|| "-".into(), |p| format!("{p:.2}"));
        println!(
            "{:>10} {:>4} {:>11.4e} {:>11} {:>7} {:>9.3}",
            row.k,
            row.m,
            row.h,
            opt(row.error),
            order,
            row.wall_seconds
        );
        if let Some(f) = &row.failure {
            println!("  failed: {f}");
        }
    }
}

fn study(flags: &Flags, exact: bool) -> Result<bool> {
    let (cfg, _) = flags.resolve(ProblemKind::DirichletLinear)?;
    let report = if exact {
        run_convergence(&cfg, cfg.levels)?
    } else {
        run_self_convergence(&cfg, cfg.levels)?
    };
    print_study(&report);
    if let Some(out) = &cfg.out {
        write_report(&report, Some(&cfg), out)?;
    }
    Ok(report.rows.iter().all(|r| r.failure.is_none()))
}

fn run(command: Command) -> Result<bool> {
    match command {
        Command::Solve(flags) => {
            let (cfg, _) = flags.resolve(ProblemKind::DirichletLinear)?;
            let out = solve(&cfg)?;
            println!(
                "{} / {}: m = {}, h = {:.6e}, k = {}, T = {}",
                out.problem, out.scheme, out.m, out.h, out.k, out.t_final
            );
            println!("error        {}", opt(out.error));
            println!("setup        {:.3} s", out.setup_seconds);
            println!("stepping     {:.3} s", out.step_seconds);
            if let Some(path) = &cfg.out {
                for p in write_solve(&out, &cfg, path)? {
                    println!("wrote {}", p.display());
                }
            }
            Ok(true)
        }
        Command::Converge(flags) => study(&flags, true),
        Command::SelfConverge(flags) => study(&flags, false),
        Command::DampingDemo(flags) => {
            let (cfg, _) = flags.resolve(ProblemKind::MichaelisMenten)?;
            let m = cfg.build_problem()?.grid.m();
            let report = run_damping_demo_until(m, cfg.k, cfg.t_final)?;
            println!(
                "michaelis-menten, m = {}, k = {}, T = {}",
                report.m, report.k, report.t_final
            );
            println!(
                "{:>6} {:>10} {:>11} {:>11} {:>11}",
                "scheme", "snapshot", "min", "max", "midline d2"
            );
            for s in &report.schemes {
                for (label, m) in [("step 1", s.after_first_step()), ("final", s.at_final())] {
                    if let Some(m) = m {
                        println!(
                            "{:>6} {:>10} {:>11.3e} {:>11.3e} {:>11.3e}",
                            s.scheme.name(),
                            label,
                            m.min,
                            m.max,
                            m.midline_second_difference
                        );
                    }
                }
                if let Some(f) = &s.failure {
                    println!("  {} failed: {f}", s.scheme);
                }
            }
            if let Some(r) = report.first_step_ratio() {
                println!("first-step oscillation ratio p22/rdp: {r:.1}");
            }
            if let Some(path) = &cfg.out {
                write_json(path, &report)?;
            }
            Ok(report.schemes.iter().all(|s| s.failure.is_none()))
        }
        Command::StabilityCheck(flags) => {
            let (cfg, _) = flags.resolve(ProblemKind::DirichletLinear)?;
            let r = stability_check(cfg.k)?;
            println!("sum of weights        {:.16}", r.weight_sum);
            println!("taylor defects        {:?}", r.taylor_defects);
            println!("min E(y)              {:.3e}", r.e_min);
            println!("contact slope         {:.3}", r.contact_slope);
            println!("pf/product gap        {:.3e}", r.pf_product_gap);
            println!("R(-1e8)               {:.3e}", r.far_field);
            println!("weights (k = {})     {} {:?}", r.k, r.weight_source, r.weight_sums);
            let mut ok = r.e_min >= -1e-8;
            for c in &r.identities {
                println!(
                    "  {:<14} x = {:<5} rel. error {:.2e} {}",
                    c.family.to_string(),
                    c.x,
                    c.relative_error,
                    if c.passed() { "ok" } else { "FAIL" }
                );
                ok &= c.passed();
            }
            if let Some(path) = &cfg.out {
                write_json(path, &r)?;
            }
            Ok(ok)
        }
        Command::Bench(flags) => {
            let (cfg, workers) = flags.resolve(ProblemKind::Brusselator)?;
            let workers = if flags.workers.is_none() && !workers.contains(&4) {
                vec![1, 4]
            } else {
                workers
            };
            let r = bench(&cfg, &workers)?;
            println!(
                "{}: m = {}, {} unknowns, {} steps, {} factor entries, {} cores available",
                r.problem, r.m, r.unknowns, r.steps, r.factor_entries, r.available_parallelism
            );
            println!("setup {:.3} s", r.setup_seconds);
            println!(
                "{:>7} {:>9} {:>8} {:>10}",
                "workers", "stepping", "speedup", "deviation"
            );
            for e in &r.entries {
                println!(
                    "{:>7} {:>9.3} {:>8.2} {:>10.2e}",
                    e.workers, e.step_seconds, e.speedup, e.deviation
                );
            }
            if let Some(path) = &cfg.out {
                write_json(path, &r)?;
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

use std::fmt::Write as _;

use qsera::preset::CoefficientReport;
use qsera::pseudo_boolean::mask_to_vars;
use qsera::runner::MAX_CIRCUIT_VARS;
use qsera::{
    bitstring, grover_demo, plan_iterations, run_qsera_with_state, sample_counts, sweep_power,
    IterationRule, PolyF64,
};

use crate::args::{Cli, Command, DemoArgs, ExpandArgs, Overrides, RunArgs, ScanArgs, SweepArgs};
use crate::config::{load, portfolio, search_config, Loaded};
use crate::output::{
    comparison_rows, emit, to_json, write_csv, DemoCsvRow, DistributionRow, ExpandReport,
    ScanCsvRow, SweepRow,
};
use crate::{CliError, CliResult};

pub fn dispatch(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Run(a) => run(&a),
        Command::SweepN(a) => sweep(&a),
        Command::Expand(a) => expand(&a),
        Command::GroverDemo(a) => demo(&a),
        Command::PortfolioScan(a) => scan(&a),
    }
}

fn run(args: &RunArgs) -> CliResult<()> {
    let loaded = load(&args.source)?;
    let cfg = search_config(&loaded, &args.overrides, args.n)?;
    let (result, state) = run_qsera_with_state(&cfg)?;
    log::info!(
        "top {} runner-up {} (m = {}, n = {})",
        bitstring(result.top_state, result.num_vars),
        bitstring(result.runner_up, result.num_vars),
        result.plan.m,
        result.n_power
    );

    let mut report = result.to_report();
    if args.dump_state {
        report.state = Some(state.to_pairs());
    }
    if let Some(shots) = args.shots {
        let counts = sample_counts(&result.probabilities, shots, args.seed)?;
        report.counts = Some(
            counts
                .iter()
                .enumerate()
                .map(|(z, &c)| (bitstring(z, result.num_vars), c))
                .collect(),
        );
    }
    if let Some(path) = &args.csv {
        let rows: Vec<DistributionRow> = result
            .probabilities
            .iter()
            .enumerate()
            .map(|(z, &p)| DistributionRow {
                bitstring: bitstring(z, result.num_vars),
                probability: p,
            })
            .collect();
        emit(Some(path), &write_csv(&rows)?)?;
    }
    emit(args.out.as_deref(), &to_json(&report)?)
}

fn sweep(args: &SweepArgs) -> CliResult<()> {
    if args.n_max < args.n_min {
        return Err(CliError::Input(format!(
            "empty range: --n-max {} < --n-min {}",
            args.n_max, args.n_min
        )));
    }
    let loaded = load(&args.source)?;
    let cfg = search_config(&loaded, &args.overrides, None)?;
    let ns: Vec<u32> = (args.n_min..=args.n_max).collect();
    let curve = sweep_power(&cfg, &ns)?;
    let rows: Vec<SweepRow> = curve
        .into_iter()
        .map(|(n, probability)| SweepRow { n, probability })
        .collect();
    emit(args.out.as_deref(), &write_csv(&rows)?)
}

fn term_label(mask: usize) -> String {
    if mask == 0 {
        "1".into()
    } else {
        mask_to_vars(mask)
            .iter()
            .map(|v| format!("x{v}"))
            .collect::<Vec<_>>()
            .join("*")
    }
}

fn plain_table(f: &PolyF64, g: &PolyF64, u: &PolyF64, n: u32) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:<16} {:>14} {:>14} {:>14}",
        "term",
        "f",
        "g",
        format!("g^{n}")
    );
    let mut masks: Vec<usize> = f
        .terms()
        .map(|(m, _)| m)
        .chain(g.terms().map(|(m, _)| m))
        .chain(u.terms().map(|(m, _)| m))
        .collect();
    masks.sort_by_key(|&m| (m.count_ones(), m));
    masks.dedup();
    for m in masks {
        let _ = writeln!(
            s,
            "{:<16} {:>14.6e} {:>14.6e} {:>14.6e}",
            term_label(m),
            f.coeff(m),
            g.coeff(m),
            u.coeff(m)
        );
    }
    s
}

fn expand(args: &ExpandArgs) -> CliResult<()> {
    let loaded = load(&args.source)?;
    let overrides = Overrides {
        mode: args.mode,
        ..Overrides::default()
    };
    let cfg = search_config(&loaded, &overrides, args.n)?;
    if cfg.n_power == 0 {
        return Err(CliError::Input("power n must be at least 1".into()));
    }
    let g = cfg.objective.rescale(cfg.mode, cfg.f_min, cfg.f_max)?;
    let u = g.power(cfg.n_power);
    let published = matches!(loaded, Loaded::Preset)
        .then(|| CoefficientReport::from_polys(&cfg.objective, &g, &u));

    let text = if args.table {
        match &published {
            Some(report) => report.render(),
            None => plain_table(&cfg.objective, &g, &u, cfg.n_power),
        }
    } else {
        to_json(&ExpandReport {
            mode: cfg.mode.to_string(),
            f_min: cfg.f_min,
            f_max: cfg.f_max,
            n: cfg.n_power,
            f: cfg.objective.to_json(),
            g: g.to_json(),
            g_n: u.to_json(),
            published: published.as_ref().map(comparison_rows),
        })?
    };
    emit(args.out.as_deref(), &text)
}

fn demo(args: &DemoArgs) -> CliResult<()> {
    if args.k == 0 || args.k > MAX_CIRCUIT_VARS {
        return Err(CliError::Invalid(format!(
            "--k must be in 1..={MAX_CIRCUIT_VARS}, got {}",
            args.k
        )));
    }
    let m = args
        .m
        .unwrap_or_else(|| plan_iterations(1 << args.k, IterationRule::AutoFloor).m);
    let demo = grover_demo::<f64>(args.k, args.target, m)?;
    log::info!("max |simulation - recursion| = {:e}", demo.max_deviation);

    let mut rows = Vec::with_capacity(3 * demo.rows.len());
    for r in &demo.rows {
        let sim = DemoCsvRow {
            series: "simulation".into(),
            k: r.k,
            a_other: r.sim_other,
            a_target: r.sim_target,
            p_target: r.sim_probability(),
        };
        let rec = DemoCsvRow {
            series: "recursion".into(),
            k: r.k,
            a_other: r.rec_other,
            a_target: r.rec_target,
            p_target: r.rec_probability(),
        };
        let dev = DemoCsvRow {
            series: "deviation".into(),
            k: r.k,
            a_other: (sim.a_other - rec.a_other).abs(),
            a_target: (sim.a_target - rec.a_target).abs(),
            p_target: (sim.p_target - rec.p_target).abs(),
        };
        rows.extend([sim, rec, dev]);
    }
    emit(args.out.as_deref(), &write_csv(&rows)?)
}

fn scan(args: &ScanArgs) -> CliResult<()> {
    let problem = portfolio(&load(&args.source)?)?;
    let k = problem.num_assets();
    let rows: Vec<ScanCsvRow> = problem
        .scan()?
        .into_iter()
        .map(|r| ScanCsvRow {
            selection_bits: bitstring(r.selection, k),
            n_assets: r.n_assets,
            mu_p: r.mu_p,
            sigma_p: r.sigma_p,
            f: r.f,
        })
        .collect();
    emit(args.out.as_deref(), &write_csv(&rows)?)
}

use std::fmt::Write as _;
use std::path::PathBuf;

use majorana::classical::{curve_csv, lower_bound_curve, solve_thomson, solve_toth, to_symmetric_state};
use majorana::extremal::{maximize_entanglement, named_state, result_bundle, NAMED_STATES};
use majorana::geometric::{bounds, find_cpps, g2_grid_csv};
use majorana::majorana::{points_csv, state_to_points};
use majorana::state::{read_state_json, write_state_json};
use majorana::{fmt_sig, Ansatz, CppAnalysis, CppSet, InnerConfig, SearchConfig, SymmetricState};
use serde_json::json;

use crate::manifest::Outputs;
use crate::{
    AnalyzeArgs, AnsatzFlag, BoundsArgs, BudgetArgs, ClassicalArgs, Cli, Command, Failure, Format, MaximizeArgs,
    Problem,
};

/// Runs the subcommand. `Ok(false)` means a result was produced but the
/// search did not meet its convergence test.
pub fn run(cli: &Cli) -> Result<bool, Failure> {
    match &cli.command {
        Command::Analyze(a) => analyze(cli, a),
        Command::Maximize(a) => maximize(cli, a),
        Command::Classical(a) => classical(cli, a),
        Command::Bounds(a) => bounds_table(cli, a),
    }
}

fn resolve_seed(flag: Option<u64>) -> Result<u64, Failure> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match std::env::var("MAJ_SEED") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Failure::Usage(format!("MAJ_SEED must be an unsigned integer, got '{v}'"))),
        Err(_) => Ok(SearchConfig::default().seed),
    }
}

fn search_config(budget: &BudgetArgs, ansatz: Ansatz) -> Result<SearchConfig, Failure> {
    let mut cfg = SearchConfig::with_ansatz(ansatz);
    cfg.seed = resolve_seed(budget.seed)?;
    if let Some(r) = budget.restarts {
        cfg.restarts = r;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn emit(format: Format, text: &str, json: &serde_json::Value, csv: &str) {
    match format {
        Format::Text => print!("{text}"),
        Format::Json => println!("{}", serde_json::to_string_pretty(json).expect("json")),
        Format::Csv => print!("{csv}"),
    }
}

fn cpp_lines(a: &CppAnalysis) -> String {
    let mut s = String::new();
    match &a.cpps {
        CppSet::Ring { theta } => {
            let _ = writeln!(s, "CPPs: ring at theta = {}", fmt_sig(*theta));
        }
        CppSet::Circle { axis, angle } => {
            let _ = writeln!(
                s,
                "CPPs: circle at angle {} around theta = {}, phi = {}",
                fmt_sig(*angle),
                fmt_sig(axis.theta),
                fmt_sig(axis.phi)
            );
        }
        CppSet::Discrete { points } => {
            let _ = writeln!(s, "CPPs: {}", points.len());
            for p in points {
                let _ = writeln!(s, "  theta = {}, phi = {}", fmt_sig(p.theta), fmt_sig(p.phi));
            }
        }
    }
    s
}

fn analyze(cli: &Cli, args: &AnalyzeArgs) -> Result<bool, Failure> {
    let (state, source, inputs): (SymmetricState, String, Vec<PathBuf>) = match (&args.state_file, &args.name) {
        (Some(path), None) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
            let (s, _) = read_state_json(&text)?;
            (s, path.display().to_string(), vec![path.clone()])
        }
        (None, Some(name)) => (named_state(name)?, name.clone(), Vec::new()),
        _ => {
            return Err(Failure::Usage(format!(
                "give a state file or --name (one of: {})",
                NAMED_STATES.join(", ")
            )))
        }
    };
    let mut out = Outputs::new(cli.out.as_deref())?;
    let inner = InnerConfig::default();
    let info = state.classify();
    let mps = state_to_points(&state)?;
    let analysis = find_cpps(&state, &inner)?;
    let b = bounds(state.n())?;

    let report = json!({
        "source": source,
        "n": state.n(),
        "coeffs": state.coeffs().iter().map(|c| [c.re, c.im]).collect::<Vec<_>>(),
        "symmetry": info,
        "majorana_points": mps.points,
        "k_norm": mps.k_norm,
        "cpps": analysis.cpps,
        "local_maxima": analysis.local_maxima,
        "strategy": analysis.strategy,
        "g_max": analysis.g_max,
        "e_g": analysis.e_g,
        "bounds": b,
    });

    let mut text = String::new();
    let _ = writeln!(text, "n = {}", state.n());
    let _ = writeln!(text, "E_G = {}", fmt_sig(analysis.e_g));
    let _ = writeln!(text, "g_max = {}", fmt_sig(analysis.g_max));
    let _ = writeln!(
        text,
        "symmetry: rotational order {}, real {}, positive {}, dicke {:?}",
        info.rotational_order, info.is_real, info.is_positive, info.dicke_index
    );
    text.push_str(&cpp_lines(&analysis));
    let _ = writeln!(text, "Majorana points:");
    for (p, m) in mps.multiplicities() {
        let _ = writeln!(text, "  theta = {}, phi = {} (x{m})", fmt_sig(p.theta), fmt_sig(p.phi));
    }
    let _ = writeln!(text, "upper bound log2(n+1) = {}", fmt_sig(b.upper));

    let report_text = serde_json::to_string_pretty(&report).expect("json") + "\n";
    out.write("analysis.json", &report_text)?;
    out.write("majorana_points.csv", &mps.to_csv())?;
    out.write("cpps.csv", &points_csv(&analysis.cpps.sample(72)))?;
    if let Some((nt, np)) = args.grid {
        out.write("g2_grid.csv", &g2_grid_csv(&state, nt, np))?;
    }
    emit(cli.format, &text, &report, &points_csv(&analysis.cpps.sample(72)));
    if args.grid.is_some() && cli.out.is_none() && cli.format != Format::Csv {
        eprintln!("note: --grid is written only with --out");
    }
    out.finish(json!({ "inner": inner, "grid": args.grid }), None, inputs)?;
    Ok(true)
}

fn maximize(cli: &Cli, args: &MaximizeArgs) -> Result<bool, Failure> {
    let ansatz = match args.ansatz {
        AnsatzFlag::Positive => Ansatz::PositiveFull,
        AnsatzFlag::PositiveSparse => {
            if args.support.is_empty() {
                return Err(Failure::Usage("positive-sparse needs --support".into()));
            }
            Ansatz::PositiveSparse(args.support.clone())
        }
        AnsatzFlag::Real => Ansatz::RealFull,
        AnsatzFlag::Complex => Ansatz::ComplexFull,
    };
    let cfg = search_config(&args.budget, ansatz)?;
    let mut out = Outputs::new(cli.out.as_deref())?;
    let r = maximize_entanglement(args.n, &cfg)?;
    let bundle = result_bundle(&r, &cfg)?;
    let mps = state_to_points(&r.state)?;

    out.write("result.json", &(serde_json::to_string_pretty(&bundle).expect("json") + "\n"))?;
    out.write("state.json", &(write_state_json(&r.state) + "\n"))?;
    out.write("majorana_points.csv", &mps.to_csv())?;
    out.write("cpps.csv", &points_csv(&r.analysis.cpps.sample(72)))?;

    let mut text = String::new();
    let _ = writeln!(text, "E_G = {:.9}", r.e_g);
    let _ = writeln!(text, "ansatz = {}, seed = {}, converged = {}", r.ansatz.label(), r.seed, r.converged);
    let _ = writeln!(text, "support = {:?}", r.state.support());
    text.push_str(&cpp_lines(&r.analysis));
    emit(cli.format, &text, &bundle, &mps.to_csv());
    out.finish(serde_json::to_value(&cfg).expect("json"), Some(cfg.seed), Vec::new())?;
    Ok(r.converged)
}

fn classical(cli: &Cli, args: &ClassicalArgs) -> Result<bool, Failure> {
    let cfg = search_config(&args.budget, Ansatz::PositiveFull)?;
    let mut out = Outputs::new(cli.out.as_deref())?;
    let c = match args.problem {
        Problem::Thomson => solve_thomson(args.n, &cfg)?,
        Problem::Toth => solve_toth(args.n, &cfg)?,
    }
    .canonicalize();
    let (cost_name, cost) = match args.problem {
        Problem::Thomson => ("energy", c.thomson_cost),
        Problem::Toth => ("min_distance", c.toth_cost),
    };
    let mut report = json!({
        "problem": format!("{:?}", args.problem).to_lowercase(),
        "n": args.n,
        "points": c.points,
        "thomson_cost": c.thomson_cost,
        "toth_cost": c.toth_cost,
        "converged": c.converged,
        "seed": cfg.seed,
    });
    let mut text = format!("{cost_name} = {}\n", fmt_sig(cost));
    if args.as_state {
        let state = to_symmetric_state(&c)?;
        let a = find_cpps(&state, &InnerConfig::default())?;
        report["e_g"] = json!(a.e_g);
        report["cpps"] = json!(a.cpps);
        report["state"] = json!(state);
        let _ = writeln!(text, "E_G = {}", fmt_sig(a.e_g));
        text.push_str(&cpp_lines(&a));
        out.write("state.json", &(write_state_json(&state) + "\n"))?;
    }
    out.write("configuration.json", &(serde_json::to_string_pretty(&report).expect("json") + "\n"))?;
    out.write("points.csv", &c.to_csv())?;
    emit(cli.format, &text, &report, &c.to_csv());
    out.finish(
        json!({ "restarts": cfg.restarts, "as_state": args.as_state }),
        Some(cfg.seed),
        Vec::new(),
    )?;
    Ok(c.converged)
}

fn bounds_table(cli: &Cli, args: &BoundsArgs) -> Result<bool, Failure> {
    let cfg = search_config(&args.budget, Ansatz::PositiveFull)?;
    let mut out = Outputs::new(cli.out.as_deref())?;
    let rows = lower_bound_curve(args.n_max, &cfg)?;
    let csv = curve_csv(&rows);
    out.write("bounds.csv", &csv)?;
    // the table itself is the text output
    emit(cli.format, &csv, &serde_json::to_value(&rows).expect("json"), &csv);
    out.finish(json!({ "n_max": args.n_max, "restarts": cfg.restarts }), Some(cfg.seed), Vec::new())?;
    Ok(true)
}

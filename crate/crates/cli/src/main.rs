//! Command-line front end: load game and profile documents, run the
//! compile/payoff/solve/verify/reduce pipeline, and emit JSON reports plus
//! optional CSV traces. One command per process; reports go to stdout.

mod format;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use format::{Failure, Result, RunReport};
use hamgame::game::{Game, StrategyBasis, StrategyProfile};
use hamgame::solver::{BetaPoint, SolveMode, SolveStatus, SolverConfig};
use hamgame::{compiler, equilibrium, payoff, reducibility, solver};

#[derive(Parser)]
#[command(name = "hamgame", version, about = "Operator-representation game calculator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compile an object-level game definition into payoff operators.
    Compile {
        /// Game file path, or builtin:<name> (pfg, srg, srg_restricted,
        /// prisoners_dilemma).
        game: String,
        /// Keep only the diagonal payoff terms (classical object).
        #[arg(long)]
        classical: bool,
        /// Rotate the compiled game into a new strategy basis, given as
        /// comma-separated operator names, e.g. I,iX,iY,iZ.
        #[arg(long, value_delimiter = ',')]
        basis: Option<Vec<String>>,
        /// Also write the compiled game document to this path.
        #[arg(long)]
        out: Option<String>,
    },
    /// Expected payoff of a strategy profile, one value per player.
    Payoff {
        /// Game file path or builtin:<name>.
        game: String,
        /// Profile document path.
        #[arg(long)]
        profile: String,
    },
    /// Iterate Boltzmann responses toward an equilibrium.
    Solve {
        /// Game file path or builtin:<name>.
        game: String,
        /// Inverse temperature (player rationality). Defaults to 1.
        #[arg(long, conflicts_with = "betas")]
        beta: Option<f64>,
        /// Comma-separated inverse temperatures; runs one solve per value,
        /// each from the same initial profile.
        #[arg(long, value_delimiter = ',')]
        betas: Option<Vec<f64>>,
        #[arg(long, default_value_t = 500)]
        max_sweeps: usize,
        /// Convergence threshold on the largest per-player state change.
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Mixing weight on the updated state, in (0, 1].
        #[arg(long, default_value_t = 1.0)]
        damping: f64,
        #[arg(long, value_enum, default_value_t = ModeArg::Full)]
        mode: ModeArg,
        /// Seed reserved for stochastic modes; iteration itself is
        /// deterministic.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Initial profile: "uniform" or a profile document path.
        #[arg(long, default_value = "uniform")]
        init: String,
        /// Write the final profile document (last beta when sweeping) here.
        #[arg(long)]
        out: Option<String>,
        /// Write a per-sweep CSV trace to this path. Columns: beta, sweep,
        /// player, payoff, one p_<label> column per strategy-basis label
        /// (strategy weight), delta_norm. One row per (sweep, player).
        #[arg(long)]
        trace: Option<String>,
    },
    /// Check whether a profile is a Nash equilibrium of the game.
    Verify {
        /// Game file path or builtin:<name>.
        game: String,
        /// Profile document path.
        #[arg(long)]
        profile: String,
        /// Deviation class the profile must beat.
        #[arg(long, value_enum, default_value_t = ModeArg::Full)]
        mode: ModeArg,
        /// Largest regret still counted as an equilibrium.
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Test whether the game reduces to a classical payoff table.
    Reduce {
        /// Game file path or builtin:<name>.
        game: String,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    /// Deviations range over all density matrices.
    Full,
    /// Deviations range over classical mixtures (diagonal states).
    Classical,
    /// Deviations range over mixtures of unitary strategies.
    Restricted,
}

impl ModeArg {
    fn solve_mode(self) -> SolveMode {
        match self {
            ModeArg::Full => SolveMode::Full,
            ModeArg::Classical => SolveMode::Classical,
            ModeArg::Restricted => SolveMode::Restricted,
        }
    }

    fn response_mode(self) -> equilibrium::ResponseMode {
        match self {
            ModeArg::Full => equilibrium::ResponseMode::Full,
            ModeArg::Classical => equilibrium::ResponseMode::Classical,
            ModeArg::Restricted => equilibrium::ResponseMode::restricted(),
        }
    }

    fn name(self) -> &'static str {
        match self {
            ModeArg::Full => "full",
            ModeArg::Classical => "classical",
            ModeArg::Restricted => "restricted",
        }
    }
}

fn main() {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => {}
        Err(failure) => {
            eprintln!("error: {}", failure.message());
            std::process::exit(failure.exit_code());
        }
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Compile { game, classical, basis, out } => {
            cmd_compile(&game, classical, basis.as_deref(), out.as_deref())
        }
        Command::Payoff { game, profile } => cmd_payoff(&game, &profile),
        Command::Solve {
            game,
            beta,
            betas,
            max_sweeps,
            tol,
            damping,
            mode,
            seed,
            init,
            out,
            trace,
        } => {
            let cfg = SolverConfig {
                beta: beta.unwrap_or(1.0),
                max_sweeps,
                tolerance: tol,
                damping,
                mode: mode.solve_mode(),
                simultaneous: false,
                seed,
            };
            cmd_solve(&game, cfg, mode, betas.as_deref(), &init, out.as_deref(), trace.as_deref())
        }
        Command::Verify { game, profile, mode, tol } => cmd_verify(&game, &profile, mode, tol),
        Command::Reduce { game, tol } => cmd_reduce(&game, tol),
    }
}

fn emit(report: &RunReport) {
    println!("{}", serde_json::to_string_pretty(report).expect("report serializes"));
}

fn write_file(path: &str, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Failure::Usage(format!("cannot write {path}: {e}")))
}

fn cmd_compile(
    game_spec: &str,
    classical: bool,
    basis: Option<&[String]>,
    out: Option<&str>,
) -> Result<()> {
    let (game, name) = format::load_game(game_spec)?;
    let Game::Manipulative(m) = game else {
        return Err(Failure::Usage(format!(
            "{game_spec}: compile expects an object-level definition; this game is already \
             a set of payoff operators"
        )));
    };
    let mut compiled = if classical {
        compiler::compile_classical(&m)?
    } else {
        compiler::compile(&m)?
    };
    if let Some(names) = basis {
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        let new_basis = StrategyBasis::from_names(&refs)?;
        let new_bases = vec![new_basis; m.players()];
        compiled = compiler::change_strategy_basis(&compiled, m.bases(), &new_bases)?;
    }
    let doc = format::abstract_to_doc(&compiled, &name);
    let doc_value = serde_json::to_value(&doc).expect("game document serializes");
    if let Some(path) = out {
        write_file(path, &serde_json::to_string_pretty(&doc).expect("game document serializes"))?;
    }
    emit(&RunReport {
        command: "compile".into(),
        config: json!({
            "game": game_spec,
            "classical": classical,
            "basis": basis,
            "out": out,
        }),
        results: json!({ "game": doc_value }),
        trace: None,
    });
    Ok(())
}

fn cmd_payoff(game_spec: &str, profile_path: &str) -> Result<()> {
    let (game, _) = format::load_abstract(game_spec)?;
    let profile = format::load_profile(profile_path)?;
    let payoffs = (0..game.players())
        .map(|i| payoff::expected_payoff(&game, &profile, i))
        .collect::<hamgame::Result<Vec<f64>>>()?;
    emit(&RunReport {
        command: "payoff".into(),
        config: json!({ "game": game_spec, "profile": profile_path }),
        results: json!({ "payoffs": payoffs }),
        trace: None,
    });
    Ok(())
}

fn cmd_solve(
    game_spec: &str,
    cfg: SolverConfig,
    mode: ModeArg,
    betas: Option<&[f64]>,
    init: &str,
    out: Option<&str>,
    trace_path: Option<&str>,
) -> Result<()> {
    let (game, _) = format::load_abstract(game_spec)?;
    let initial = if init == "uniform" {
        StrategyProfile::uniform(game.dims())?
    } else {
        format::load_profile(init)?
    };
    let response = mode.response_mode();
    let config_echo = json!({
        "game": game_spec,
        "beta": cfg.beta,
        "betas": betas,
        "max_sweeps": cfg.max_sweeps,
        "tol": cfg.tolerance,
        "damping": cfg.damping,
        "mode": mode.name(),
        "seed": cfg.seed,
        "init": init,
        "out": out,
        "trace": trace_path,
    });

    let points: Vec<BetaPoint> = match betas {
        Some(list) => solver::beta_sweep(&game, &initial, &cfg, list)?,
        None => {
            let (profile, trace) = solver::solve(&game, &initial, &cfg)?;
            vec![BetaPoint { beta: cfg.beta, profile, trace }]
        }
    };

    if let Some(path) = trace_path {
        write_trace(path, &game, &points)?;
    }
    let mut runs = Vec::with_capacity(points.len());
    for point in &points {
        let regrets = (0..game.players())
            .map(|i| equilibrium::regret(&game, &point.profile, i, response))
            .collect::<hamgame::Result<Vec<f64>>>()?;
        let payoffs = (0..game.players())
            .map(|i| payoff::expected_payoff(&game, &point.profile, i))
            .collect::<hamgame::Result<Vec<f64>>>()?;
        let diagonals: Vec<Vec<f64>> = point
            .profile
            .product_states()
            .expect("solver returns product profiles")
            .iter()
            .map(|s| s.matrix().diag().iter().map(|z| z.re).collect())
            .collect();
        runs.push(json!({
            "beta": point.beta,
            "status": status_name(point.trace.status),
            "sweeps": point.trace.sweeps(),
            "payoffs": payoffs,
            "regrets": regrets,
            "diagonals": diagonals,
            "restricted_residue": point.trace.restricted_residue,
        }));
    }
    let last = points.last().expect("at least one solve ran");
    if let Some(path) = out {
        let doc = format::profile_to_doc(&last.profile);
        write_file(path, &serde_json::to_string_pretty(&doc).expect("profile serializes"))?;
    }
    let results = if betas.is_some() {
        json!({ "runs": runs })
    } else {
        let mut single = runs.pop().expect("one run");
        single["profile"] = serde_json::to_value(format::profile_to_doc(&last.profile))
            .expect("profile serializes");
        single
    };
    emit(&RunReport {
        command: "solve".into(),
        config: config_echo,
        results,
        trace: trace_path.map(str::to_string),
    });
    Ok(())
}

fn status_name(status: SolveStatus) -> &'static str {
    match status {
        SolveStatus::Converged => "converged",
        SolveStatus::MaxSweepsReached => "max-sweeps-reached",
    }
}

/// One CSV row per (beta, sweep, player). Shared labels become p_<label>
/// columns; otherwise columns are p_1..p_max and short rows leave the tail
/// empty.
fn write_trace(path: &str, game: &hamgame::game::AbstractGame, points: &[BetaPoint]) -> Result<()> {
    let labels = game.basis_labels();
    let shared = labels.iter().all(|l| l == &labels[0]);
    let width = game.dims().iter().copied().max().unwrap_or(0);
    let mut header = vec!["beta".to_string(), "sweep".into(), "player".into(), "payoff".into()];
    if shared {
        header.extend(labels[0].iter().map(|l| format!("p_{l}")));
    } else {
        header.extend((1..=width).map(|k| format!("p_{k}")));
    }
    header.push("delta_norm".into());

    let mut writer = csv::Writer::from_path(path)
        .map_err(|e| Failure::Usage(format!("cannot write {path}: {e}")))?;
    let io_err = |e: csv::Error| Failure::Usage(format!("cannot write {path}: {e}"));
    writer.write_record(&header).map_err(io_err)?;
    for point in points {
        for record in &point.trace.records {
            for player in 0..game.players() {
                let mut row = vec![
                    point.beta.to_string(),
                    record.sweep.to_string(),
                    (player + 1).to_string(),
                    record.payoffs[player].to_string(),
                ];
                let diag = &record.diagonals[player];
                row.extend(diag.iter().map(f64::to_string));
                row.extend(std::iter::repeat_n(String::new(), width - diag.len()));
                row.push(record.deltas[player].to_string());
                writer.write_record(&row).map_err(io_err)?;
            }
        }
    }
    writer.flush().map_err(|e| Failure::Usage(format!("cannot write {path}: {e}")))?;
    Ok(())
}

fn cmd_verify(game_spec: &str, profile_path: &str, mode: ModeArg, tol: f64) -> Result<()> {
    let (game, _) = format::load_abstract(game_spec)?;
    let profile = format::load_profile(profile_path)?;
    let (nash, regrets) = equilibrium::is_nash(&game, &profile, tol, mode.response_mode())?;
    let payoffs = (0..game.players())
        .map(|i| payoff::expected_payoff(&game, &profile, i))
        .collect::<hamgame::Result<Vec<f64>>>()?;
    emit(&RunReport {
        command: "verify".into(),
        config: json!({
            "game": game_spec,
            "profile": profile_path,
            "mode": mode.name(),
            "tol": tol,
        }),
        results: json!({ "nash": nash, "regrets": regrets, "payoffs": payoffs }),
        trace: None,
    });
    if nash {
        Ok(())
    } else {
        Err(Failure::NotNash)
    }
}

fn cmd_reduce(game_spec: &str, tol: f64) -> Result<()> {
    let (game, _) = format::load_abstract(game_spec)?;
    let reduction = reducibility::classical_reduction(&game, tol)?;
    // Mirror the reduction's internal per-eigenvector product test so the
    // report shows which Schmidt values drove the outcome.
    let eigenvectors = if reduction.commuting && game.players() == 2 {
        let basis = reducibility::common_eigenbasis(&game, tol)?;
        let diags = basis
            .iter()
            .enumerate()
            .map(|(k, ev)| {
                let (product, schmidt) =
                    reducibility::product_form_check(&ev.vector, game.dims(), tol.max(1e-10))?;
                Ok(json!({
                    "index": k,
                    "eigenvalues": ev.eigenvalues,
                    "degenerate": ev.degenerate,
                    "schmidt_values": schmidt,
                    "product": product,
                }))
            })
            .collect::<Result<Vec<Value>>>()?;
        Value::Array(diags)
    } else {
        Value::Null
    };
    let outcome = match &reduction.outcome {
        reducibility::ReductionOutcome::ProductEigenbasis { factor_labels, factors, tables } => {
            json!({
                "form": "product-eigenbasis",
                "factor_labels": factor_labels,
                "factors": factors
                    .iter()
                    .map(|per_player| {
                        per_player
                            .iter()
                            .map(|v| v.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>())
                            .collect::<Vec<_>>()
                    })
                    .collect::<Vec<_>>(),
                "tables": tables.iter().map(table_value).collect::<Vec<_>>(),
            })
        }
        reducibility::ReductionOutcome::DiagonalRestriction { tables } => json!({
            "form": "diagonal-restriction",
            "tables": tables.iter().map(table_value).collect::<Vec<_>>(),
        }),
    };
    emit(&RunReport {
        command: "reduce".into(),
        config: json!({ "game": game_spec, "tol": tol }),
        results: json!({
            "commuting": reduction.commuting,
            "max_commutator_norm": reduction.max_commutator_norm,
            "reduced": reduction.reduced(),
            "diagnosis": reduction.diagnosis,
            "outcome": outcome,
            "eigenvectors": eigenvectors,
        }),
        trace: None,
    });
    Ok(())
}

fn table_value(table: &compiler::PayoffTable) -> Value {
    json!({ "dims": table.dims(), "values": table.values() })
}

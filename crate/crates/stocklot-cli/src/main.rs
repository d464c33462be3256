//! `stocklot` — inventory-policy analysis over stock-movement ledgers.
//!
//! Subcommands: `abc` (monetary ranking and banding), `analyze` (per-item
//! demand diagnostics), `eoq` / `qr` (lot-sizing policies), `compare`
//! (policies vs historical cost), `simulate` (policy replay), `export`
//! (normalized ledger). Reports are written to `--out` as JSON/CSV; exit
//! codes: 0 success, 1 input error, 2 missing data, 3 internal error.

mod commands;
mod config;
mod error;

pub use error::CliError;

use clap::{Args, Parser, Subcommand, ValueEnum};
use commands::{Ctx, Outputs, PolicyChoice};
use config::Config;
use std::path::{Path, PathBuf};
use stocklot::abc::AbcThresholds;
use stocklot::ledger::{parse_ledger, DateRange, FormatConfig, UnitBasis};

#[derive(Parser)]
#[command(
    name = "stocklot",
    version,
    about = "Inventory policy analysis from stock-movement ledgers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Movement ledger file (delimiter-separated).
    #[arg(long)]
    ledger: PathBuf,
    /// Calendar year to analyze.
    #[arg(long)]
    year: i32,
    /// Flat key-value configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory for report files.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Emit only JSON reports.
    #[arg(long)]
    json: bool,
    /// Emit only CSV reports.
    #[arg(long)]
    csv: bool,
    /// Disable display rounding of lot sizes.
    #[arg(long)]
    no_round: bool,
    /// Quantity basis: item units or kilograms.
    #[arg(long, value_enum)]
    basis: Option<BasisArg>,
}

#[derive(Clone, Copy, ValueEnum)]
enum BasisArg {
    Units,
    Kg,
}

#[derive(Clone, Copy, ValueEnum)]
enum PolicyArg {
    Lec,
    Qr,
}

#[derive(Subcommand)]
enum Command {
    /// Rank items by monetary value and band them A/B/C.
    Abc {
        #[command(flatten)]
        common: Common,
        /// Band cut points as `A,B` fractions (e.g. 0.80,0.95).
        #[arg(long)]
        thresholds: Option<String>,
    },
    /// Movement, consumption and demand diagnostics for one item.
    Analyze {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        item: String,
    },
    /// Economic order quantity policy for one item.
    Eoq {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        item: String,
    },
    /// Continuous-review (Q,R) policy for one item.
    Qr {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        item: String,
        /// Target no-stockout probability in (0,1).
        #[arg(long)]
        service_level: Option<f64>,
    },
    /// Both policies against the item's historical cost.
    Compare {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        item: String,
        #[arg(long)]
        service_level: Option<f64>,
    },
    /// Replay a policy against the item's recorded daily demand.
    Simulate {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        item: String,
        /// Which computed policy to replay.
        #[arg(long, value_enum, default_value = "lec")]
        policy: PolicyArg,
        /// Override the lot size.
        #[arg(long)]
        lot: Option<f64>,
        /// Override the reorder point.
        #[arg(long)]
        reorder: Option<f64>,
        #[arg(long)]
        service_level: Option<f64>,
        /// Also write a per-day trace CSV.
        #[arg(long)]
        trace: bool,
    },
    /// Export the normalized ledger (ISO dates, dot decimals).
    Export {
        #[command(flatten)]
        common: Common,
    },
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => {}
        Err(e) => {
            eprintln!("error: {}", e.message);
            std::process::exit(e.exit_code);
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let (common, outputs) = match &cli.command {
        Command::Abc { common, thresholds } => {
            let ctx = build_ctx(common)?;
            let bands = resolve_thresholds(thresholds.as_deref(), &ctx.config)?;
            (common, commands::cmd_abc(&ctx, bands)?)
        }
        Command::Analyze { common, item } => {
            let ctx = build_ctx(common)?;
            (common, commands::cmd_analyze(&ctx, item)?)
        }
        Command::Eoq { common, item } => {
            let ctx = build_ctx(common)?;
            (common, commands::cmd_eoq(&ctx, item)?)
        }
        Command::Qr {
            common,
            item,
            service_level,
        } => {
            let ctx = build_ctx(common)?;
            let level = resolve_service_level(*service_level, &ctx.config)?;
            (common, commands::cmd_qr(&ctx, item, level)?)
        }
        Command::Compare {
            common,
            item,
            service_level,
        } => {
            let ctx = build_ctx(common)?;
            let level = resolve_service_level(*service_level, &ctx.config)?;
            (common, commands::cmd_compare(&ctx, item, level)?)
        }
        Command::Simulate {
            common,
            item,
            policy,
            lot,
            reorder,
            service_level,
            trace,
        } => {
            let ctx = build_ctx(common)?;
            let level = resolve_service_level(*service_level, &ctx.config)?;
            let choice = match policy {
                PolicyArg::Lec => PolicyChoice::Lec,
                PolicyArg::Qr => PolicyChoice::Qr,
            };
            (
                common,
                commands::cmd_simulate(&ctx, item, choice, *lot, *reorder, level, *trace)?,
            )
        }
        Command::Export { common } => {
            let ctx = build_ctx(common)?;
            (common, commands::cmd_export(&ctx)?)
        }
    };
    write_outputs(&common.out, outputs)
}

fn build_ctx(common: &Common) -> Result<Ctx, CliError> {
    let config = Config::load(&common.config)?;
    let text = std::fs::read_to_string(&common.ledger).map_err(|e| {
        CliError::input(format!(
            "cannot read ledger {}: {e}",
            common.ledger.display()
        ))
    })?;
    let format = ledger_format(&config)?;
    let parsed = parse_ledger(&text, &format)?;
    for w in &parsed.warnings {
        eprintln!("warning: line {}: {}", w.line, w.message);
    }
    let ledger = parsed.ledger;

    let year_range = DateRange::year(common.year);
    if year_range.start > ledger.period.end || year_range.end < ledger.period.start {
        return Err(CliError::input(format!(
            "year {} lies outside the ledger period {}",
            common.year, ledger.period
        )));
    }

    let basis = match common.basis {
        Some(BasisArg::Units) => UnitBasis::Units,
        Some(BasisArg::Kg) => UnitBasis::Kg,
        None => match config.raw("basis") {
            Some("kg") | Some("Kg") => UnitBasis::Kg,
            Some("units") | None => UnitBasis::Units,
            Some(other) => {
                return Err(CliError::input(format!(
                    "config key basis: expected `units` or `kg`, got {other:?}"
                )))
            }
        },
    };

    Ok(Ctx {
        ledger,
        year: common.year,
        basis,
        year_days: config.u32_or("year_days", 365)?,
        round_to: if common.no_round {
            0
        } else {
            config.u32_or("round_to", 100)?
        },
        emit_json: common.json || !common.csv,
        emit_csv: common.csv || !common.json,
        config,
    })
}

fn ledger_format(config: &Config) -> Result<FormatConfig, CliError> {
    let mut format = FormatConfig::default();
    if let Some(delim) = config.raw("delimiter") {
        let mut chars = delim.chars();
        match (chars.next(), chars.next()) {
            (Some(c), None) => format.delimiter = c,
            _ => {
                return Err(CliError::input(format!(
                    "config key delimiter: expected a single character, got {delim:?}"
                )))
            }
        }
    }
    if let Some(fmt) = config.raw("date_format") {
        format.date_format = fmt.to_string();
    }
    if let Some(v) = config.raw("decimal_comma") {
        format.decimal_comma = v == "true" || v == "1";
    }
    Ok(format)
}

fn resolve_thresholds(flag: Option<&str>, config: &Config) -> Result<AbcThresholds, CliError> {
    let (a, b) = match flag {
        Some(spec) => {
            let parts: Vec<&str> = spec.split(',').collect();
            if parts.len() != 2 {
                return Err(CliError::input(format!(
                    "--thresholds expects `A,B`, got {spec:?}"
                )));
            }
            let parse = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| CliError::input(format!("--thresholds: {s:?} is not a number")))
            };
            (parse(parts[0])?, parse(parts[1])?)
        }
        None => (config.f64_or("a_cut", 0.80)?, config.f64_or("b_cut", 0.95)?),
    };
    Ok(AbcThresholds::new(a, b)?)
}

fn resolve_service_level(flag: Option<f64>, config: &Config) -> Result<f64, CliError> {
    let level = match flag {
        Some(l) => l,
        None => config.f64_or("service_level", 0.75)?,
    };
    if !(level > 0.0 && level < 1.0) {
        return Err(CliError::input(format!(
            "service level must lie strictly between 0 and 1, got {level}"
        )));
    }
    Ok(level)
}

/// Write every report atomically (temp file + rename) once the whole
/// command has succeeded.
fn write_outputs(dir: &Path, outputs: Outputs) -> Result<(), CliError> {
    std::fs::create_dir_all(dir)
        .map_err(|e| CliError::input(format!("cannot create {}: {e}", dir.display())))?;
    for (name, contents) in outputs {
        let path = dir.join(&name);
        let tmp = dir.join(format!("{name}.tmp"));
        std::fs::write(&tmp, contents)
            .map_err(|e| CliError::input(format!("cannot write {}: {e}", tmp.display())))?;
        std::fs::rename(&tmp, &path)
            .map_err(|e| CliError::input(format!("cannot write {}: {e}", path.display())))?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

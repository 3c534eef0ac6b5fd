//! `powerdomain`: build and inspect finite spaces, valuations and supports,
//! and run the law suites.

mod docs;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use powerdomain::hyperspace::build_hyperspace;
use powerdomain::lawcheck::{self, GenConfig, LawError, SuiteReport};
use powerdomain::probability::extend_to_measure;
use powerdomain::product;
use powerdomain::space::check_separation;
use powerdomain::support::support;
use powerdomain::valuation::{integrate, mult_e, product_valuation, pushforward};

use docs::{
    checksum, load_space, open_list, FunctionDocument, MapDocument, MixtureDocument, SpaceDocument, ValuationDocument,
};
use error::CliError;

#[derive(Parser)]
#[command(name = "powerdomain", version, about = "Finite hyperspaces, valuations and supports")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Finite spaces.
    #[command(subcommand)]
    Space(SpaceCommand),
    /// Valuations on finite spaces.
    #[command(subcommand)]
    Val(ValCommand),
    /// Run a law suite, or `all` of them.
    Laws(LawsArgs),
    /// Run every suite with each documented mutation switched on.
    Mutants(GenArgs),
}

#[derive(Subcommand)]
enum SpaceCommand {
    /// Check the axioms of a space document.
    Validate { space: PathBuf },
    /// Separation flags, specialization preorder and canonical open list.
    Info { space: PathBuf },
    /// The hyperspace `HX` with its closed-set index.
    Hyper { space: PathBuf },
    /// The product of two spaces.
    Product { left: PathBuf, right: PathBuf },
}

#[derive(Subcommand)]
enum ValCommand {
    /// Check the valuation axioms.
    Validate { valuation: PathBuf },
    /// `⟨ν, g⟩` for a lower semicontinuous `g`.
    Integrate { valuation: PathBuf, function: PathBuf },
    /// The pushforward along a continuous map.
    Push { valuation: PathBuf, map: PathBuf },
    /// The product valuation.
    Product { left: PathBuf, right: PathBuf },
    /// The support, as a sorted point list.
    Supp { valuation: PathBuf },
    /// Point weights of the extension to a measure.
    Extend { valuation: PathBuf },
    /// The multiplication `ℰ` of a finite mixture.
    #[command(name = "E")]
    E { mixture: PathBuf },
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 3)]
    max_points: usize,
    #[arg(long, default_value_t = 200)]
    count: usize,
    #[arg(long, default_value_t = 16)]
    denominator_bound: u32,
    /// Never generate infinite weights.
    #[arg(long)]
    finite_only: bool,
    /// Print JSON instead of text.
    #[arg(long)]
    json: bool,
}

impl GenArgs {
    fn config(&self) -> GenConfig {
        GenConfig {
            seed: self.seed,
            max_points: self.max_points,
            instance_count: self.count,
            weight_denominator_bound: self.denominator_bound,
            allow_infinity: !self.finite_only,
        }
    }
}

#[derive(Args)]
struct LawsArgs {
    suite: String,
    #[command(flatten)]
    gen: GenArgs,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Run only this instance index.
    #[arg(long)]
    only: Option<usize>,
}

fn emit<T: Serialize>(value: &T) -> Result<(), CliError> {
    println!("{}", serde_json::to_string(value)?);
    Ok(())
}

fn run_space(cmd: SpaceCommand) -> Result<(), CliError> {
    match cmd {
        SpaceCommand::Validate { space } => {
            let s = load_space(&space)?;
            emit(&json!({
                "valid": true,
                "points": s.len(),
                "opens": s.opens().len(),
                "axioms": {
                    "contains_empty": true,
                    "contains_full": true,
                    "closed_under_union": true,
                    "closed_under_intersection": true,
                },
            }))
        }
        SpaceCommand::Info { space } => {
            let s = load_space(&space)?;
            let sep = check_separation(&s);
            let specialization: Vec<(&str, &str)> =
                s.specialization().into_iter().map(|(x, y)| (s.name(x), s.name(y))).collect();
            emit(&Info {
                t0: sep.is_t0,
                t1: sep.is_t1,
                sober: sep.is_sober,
                opens: s.opens().len(),
                specialization,
                open_list: open_list(&s),
                checksum: checksum(&s),
            })
        }
        SpaceCommand::Hyper { space } => {
            let s = load_space(&space)?;
            let hx = build_hyperspace(&s);
            let closed: Vec<Vec<String>> = (0..hx.len()).map(|i| s.render(hx.members_of(i))).collect();
            emit(&json!({ "space": SpaceDocument::of(hx.space(), Some("H".into())), "closed_sets": closed }))
        }
        SpaceCommand::Product { left, right } => {
            let p = product(&load_space(&left)?, &load_space(&right)?);
            emit(&SpaceDocument::of(&p.space, None))
        }
    }
}

#[derive(Serialize)]
struct Info<'a> {
    #[serde(rename = "T0")]
    t0: bool,
    #[serde(rename = "T1")]
    t1: bool,
    sober: bool,
    opens: usize,
    specialization: Vec<(&'a str, &'a str)>,
    open_list: Vec<Vec<String>>,
    checksum: String,
}

/// A JSON object whose keys keep the given order.
struct Ordered(Vec<(String, String)>);

impl Serialize for Ordered {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = serializer.serialize_map(Some(self.0.len()))?;
        for (k, v) in &self.0 {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

fn run_val(cmd: ValCommand) -> Result<(), CliError> {
    match cmd {
        ValCommand::Validate { valuation } => {
            let nu = ValuationDocument::load(&valuation)?;
            emit(&json!({ "valid": true, "total": nu.total(), "checksum": checksum(nu.space()) }))
        }
        ValCommand::Integrate { valuation, function } => {
            let nu = ValuationDocument::load(&valuation)?;
            let g = FunctionDocument::load(&function, nu.space())?;
            emit(&integrate(&nu, &g)?)
        }
        ValCommand::Push { valuation, map } => {
            let nu = ValuationDocument::load(&valuation)?;
            let f = MapDocument::load(&map, nu.space())?;
            emit(&ValuationDocument::of(&pushforward(&f, &nu)?))
        }
        ValCommand::Product { left, right } => {
            let (nu, rho) = (ValuationDocument::load(&left)?, ValuationDocument::load(&right)?);
            let prod = product(nu.space(), rho.space());
            emit(&ValuationDocument::of(&product_valuation(&prod, &nu, &rho)?))
        }
        ValCommand::Supp { valuation } => {
            let nu = ValuationDocument::load(&valuation)?;
            emit(&support(&nu).render())
        }
        ValCommand::Extend { valuation } => {
            let nu = ValuationDocument::load(&valuation)?;
            let m = extend_to_measure(&nu)?;
            let space = m.space();
            let weights = m.point_weights().iter().enumerate();
            emit(&Ordered(weights.map(|(x, w)| (space.name(x).to_owned(), w.to_string())).collect()))
        }
        ValCommand::E { mixture } => emit(&ValuationDocument::of(&mult_e(&MixtureDocument::load(&mixture)?))),
    }
}

fn law_error(e: LawError) -> CliError {
    match e {
        LawError::UnknownSuite(s) => CliError::UnknownSuite(s),
        other => CliError::Malformed(other.to_string()),
    }
}

fn print_report(r: &SuiteReport) {
    let status = if r.passed() { "ok" } else { "FAILED" };
    println!(
        "{:<32} {status:<6} {} instances, {} skipped, {} failures ({} ms)",
        r.suite,
        r.instances,
        r.skipped,
        r.failures.len(),
        r.wall_time_ms
    );
    for f in &r.failures {
        println!("  instance {}: {}", f.index, f.message);
        println!("    shrunk to {} points: {}", f.shrunk.total_points(), f.shrunk_message);
        println!("    shrunk instance: {}", serde_json::to_string(&f.shrunk).unwrap_or_default());
        println!("    replay: {}", f.replay);
    }
}

fn run_laws(args: LawsArgs) -> Result<(), CliError> {
    let cfg = args.gen.config();
    let names: Vec<&str> = if args.suite == "all" {
        lawcheck::suite_names()
    } else {
        vec![lawcheck::suite_names()
            .into_iter()
            .find(|n| *n == args.suite)
            .ok_or_else(|| CliError::UnknownSuite(args.suite.clone()))?]
    };
    let reports = match args.only {
        Some(index) => names
            .iter()
            .map(|n| lawcheck::run_single(n, &cfg, index))
            .collect::<Result<Vec<_>, _>>()
            .map_err(law_error)?,
        None => lawcheck::run_suites(&names, &cfg, args.jobs).map_err(law_error)?,
    };
    if args.gen.json {
        emit(&reports)?;
    } else {
        reports.iter().for_each(print_report);
    }
    let failures: usize = reports.iter().map(|r| r.failures.len()).sum();
    if failures > 0 {
        return Err(CliError::LawFailures(failures));
    }
    Ok(())
}

fn run_mutants(args: GenArgs) -> Result<(), CliError> {
    let outcomes = lawcheck::run_mutation_harness(&args.config());
    if args.json {
        emit(&outcomes)?;
    } else {
        for o in &outcomes {
            match &o.caught_by {
                Some(suite) => println!(
                    "{:<28} caught by {suite} at instance {}",
                    format!("{:?}", o.mutation),
                    o.instance_index.unwrap_or_default()
                ),
                None => println!("{:<28} SURVIVED", format!("{:?}", o.mutation)),
            }
        }
    }
    let survived = outcomes.iter().filter(|o| !o.caught()).count();
    if survived > 0 {
        return Err(CliError::LawFailures(survived));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Space(cmd) => run_space(cmd),
        Command::Val(cmd) => run_val(cmd),
        Command::Laws(args) => run_laws(args),
        Command::Mutants(args) => run_mutants(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.report());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;
use tradetrust::engine::ListingContext;
use tradetrust::eventlog::{replay, write_records, EventLog};
use tradetrust::identity::{
    initial_trust, BusinessDetails, CredentialSet, EvidenceDetails, PersonalDetails, Roles,
};
use tradetrust::parallel::Execution;
use tradetrust::sim::{
    compare_ensemble, compare_variants, render_comparison, render_ensemble, run_scenario,
    run_scenario_traced, Scenario, Variant,
};
use tradetrust::stats::{
    check_reported_rank_sums, frequency_table, kruskal_wallis, render_frequency_table,
    render_kruskal, render_summary_table, summarize_group, LikertDataset,
};
use tradetrust::{AccountId, EngineConfig, Mode, RatingValue, Scope, TrustEngine};

#[derive(Parser)]
#[command(name = "tradetrust", version, about = "Trust opinions, marketplace simulation and Likert statistics")]
struct Cli {
    /// Event log read and appended by register, rate and opinion.
    #[arg(long, global = true, default_value = "events.jsonl")]
    log: PathBuf,
    /// Engine configuration as JSON. Missing fields take their defaults.
    #[arg(long, global = true, env = "TRADETRUST_CONFIG")]
    config: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
#[allow(clippy::large_enum_variant)]
enum Command {
    /// Register an account and report its profile tier.
    Register(RegisterArgs),
    /// Record a rating from one account about another.
    Rate(RateArgs),
    /// Compute the trust opinion a buyer sees for a seller's listing.
    Opinion(OpinionArgs),
    /// Run a scenario file.
    Simulate(SimulateArgs),
    /// Run a scenario under several variants with common random numbers.
    Compare(CompareArgs),
    /// Likert-scale statistics.
    #[command(subcommand)]
    Stats(StatsCommand),
    /// Rebuild state from an event log and report it.
    Replay {
        log: PathBuf,
        /// Write a compacted log holding only accounts and latest ratings.
        #[arg(long)]
        compact: Option<PathBuf>,
    },
}

#[derive(Args)]
struct RegisterArgs {
    /// Credential set as JSON instead of the individual flags.
    #[arg(long, conflicts_with_all = ["name", "national_id", "reference_account"])]
    credentials: Option<PathBuf>,
    #[arg(long)]
    name: Option<String>,
    #[arg(long)]
    address: Option<String>,
    #[arg(long)]
    phone: Option<String>,
    #[arg(long)]
    city: Option<String>,
    #[arg(long)]
    country: Option<String>,
    #[arg(long)]
    national_id: Option<String>,
    #[arg(long)]
    bank: Option<String>,
    #[arg(long)]
    business_phone: Option<String>,
    #[arg(long)]
    business_address: Option<String>,
    #[arg(long)]
    reference_account: Option<String>,
    #[arg(long)]
    id_document: Option<String>,
    #[arg(long)]
    registration_document: Option<String>,
    #[arg(long)]
    signed_declaration: bool,
    #[arg(long, value_enum, default_value_t = RoleArg::Both)]
    roles: RoleArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum RoleArg {
    Seller,
    Buyer,
    Both,
}

#[derive(Args)]
struct RateArgs {
    #[arg(long)]
    rater: u64,
    #[arg(long)]
    ratee: u64,
    #[arg(long)]
    scope: String,
    /// positive, neutral, negative, or 1, 0, -1.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_value)]
    value: RatingValue,
    /// Price of the deal being rated.
    #[arg(long)]
    cost: f64,
}

#[derive(Args)]
struct OpinionArgs {
    #[arg(long)]
    buyer: u64,
    #[arg(long)]
    seller: u64,
    #[arg(long)]
    scope: String,
    #[arg(long)]
    price: f64,
    #[arg(long, default_value_t = 1)]
    delivery_days: u32,
    /// The seller cannot deliver to this buyer.
    #[arg(long)]
    undeliverable: bool,
    #[arg(long, value_enum, default_value_t = ModeArg::Dtc)]
    mode: ModeArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Atc,
    Dtc,
}

#[derive(Args)]
struct SimulateArgs {
    scenario: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum)]
    variant: Option<VariantArg>,
    /// Write the full report as JSON.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the event trace as a replayable log.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    scenario: PathBuf,
    #[arg(long, value_enum, value_delimiter = ',')]
    variants: Vec<VariantArg>,
    /// Average over this many seeds, starting at the scenario seed.
    #[arg(long)]
    seeds: Option<u64>,
    #[arg(long)]
    sequential: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Integrated,
    Ebay,
    Unweighted,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Variant {
        match v {
            VariantArg::Integrated => Variant::Integrated,
            VariantArg::Ebay => Variant::EbayBaseline,
            VariantArg::Unweighted => Variant::UnweightedReputation,
        }
    }
}

#[derive(Subcommand)]
enum StatsCommand {
    /// Count, min, max, sum, mean, median and sample variance per group.
    Summarize { data: PathBuf },
    /// Frequency table per group.
    Freq { data: PathBuf },
    /// Kruskal-Wallis H test across groups.
    Kruskal {
        data: PathBuf,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        /// Rank sums from another source to check against N(N+1)/2.
        #[arg(long, value_delimiter = ',')]
        reported_rank_sums: Vec<f64>,
        #[arg(long)]
        reported_h: Option<f64>,
    },
}

fn parse_value(s: &str) -> Result<RatingValue, String> {
    match s.to_ascii_lowercase().as_str() {
        "positive" | "+1" | "1" => Ok(RatingValue::Positive),
        "neutral" | "0" => Ok(RatingValue::Neutral),
        "negative" | "-1" => Ok(RatingValue::Negative),
        _ => Err(format!("{s:?} is not positive, neutral or negative")),
    }
}

fn load_config(path: Option<&Path>) -> Result<EngineConfig> {
    let Some(path) = path else {
        return Ok(EngineConfig::default());
    };
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let config: EngineConfig =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    config.validate()?;
    Ok(config)
}

fn load_scenario(path: &Path) -> Result<Scenario> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(Scenario::from_json(&text)?)
}

fn load_dataset(path: &Path) -> Result<LikertDataset> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let ds = LikertDataset::parse_csv(&text).with_context(|| format!("parsing {}", path.display()))?;
    if ds.groups.is_empty() {
        bail!("{} holds no responses", path.display());
    }
    Ok(ds)
}

fn emit<T: Serialize>(format: Format, value: &T, text: impl FnOnce() -> String) {
    match format {
        Format::Json => println!("{}", serde_json::to_string_pretty(value).expect("serializable")),
        Format::Text => print!("{}", text()),
    }
}

fn credentials(a: &RegisterArgs) -> Result<CredentialSet> {
    if let Some(path) = &a.credentials {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        return serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()));
    }
    let s = |v: &Option<String>| v.clone().unwrap_or_default();
    let personal = [&a.name, &a.address, &a.phone, &a.city, &a.country]
        .iter()
        .any(|v| v.is_some())
        .then(|| PersonalDetails {
            full_name: s(&a.name),
            address: s(&a.address),
            phone: s(&a.phone),
            city: s(&a.city),
            country: s(&a.country),
        });
    let business = [&a.national_id, &a.bank, &a.business_phone, &a.business_address]
        .iter()
        .any(|v| v.is_some())
        .then(|| BusinessDetails {
            national_id: s(&a.national_id),
            bank_or_card: s(&a.bank),
            business_phone: s(&a.business_phone),
            business_address: s(&a.business_address),
        });
    let evidence = ([&a.reference_account, &a.id_document, &a.registration_document]
        .iter()
        .any(|v| v.is_some())
        || a.signed_declaration)
        .then(|| EvidenceDetails {
            reference_account: s(&a.reference_account),
            id_document: s(&a.id_document),
            registration_document: s(&a.registration_document),
            signed_declaration: a.signed_declaration,
        });
    Ok(CredentialSet {
        personal,
        business,
        evidence,
    })
}

fn run(cli: Cli) -> Result<()> {
    let config = load_config(cli.config.as_deref())?;
    let format = cli.format;
    match cli.command {
        Command::Register(args) => {
            let creds = credentials(&args)?;
            let roles = match args.roles {
                RoleArg::Seller => Roles { seller: true, buyer: false },
                RoleArg::Buyer => Roles { seller: false, buyer: true },
                RoleArg::Both => Roles::BOTH,
            };
            let mut log = EventLog::open(&cli.log, config.key_convention)?;
            let id = log.register(creds, roles)?;
            let tier = log.ledger().registry.account(id)?.tier;
            let trust = initial_trust(tier, &config.policy);
            let out = json!({"account": id, "tier": tier, "initial_trust": trust});
            emit(format, &out, || format!("registered account {id} (tier {tier}, initial trust {trust:.2})\n"));
        }
        Command::Rate(args) => {
            let mut log = EventLog::open(&cli.log, config.key_convention)?;
            let record = log.rate(
                AccountId(args.rater),
                AccountId(args.ratee),
                Scope::new(&args.scope)?,
                args.value,
                args.cost,
            )?;
            emit(format, &record, || {
                format!(
                    "recorded rating {} from {} to {} in {} (seq {})\n",
                    args.value, args.rater, args.ratee, args.scope, record.seq
                )
            });
        }
        Command::Opinion(args) => {
            let ledger = replay(&cli.log, config.key_convention)?;
            let listing = ListingContext {
                scope: Scope::new(&args.scope)?,
                price: args.price,
                delivery_days: args.delivery_days,
                deliverable: !args.undeliverable,
            };
            let mode = match args.mode {
                ModeArg::Atc => Mode::Atc,
                ModeArg::Dtc => Mode::Dtc,
            };
            let mut engine = TrustEngine::new(config)?;
            let op = engine.opinion(
                AccountId(args.buyer),
                AccountId(args.seller),
                &listing,
                &ledger.store,
                &ledger.registry,
                mode,
            )?;
            emit(format, &op, || {
                let mut s = format!(
                    "seller {} in {}: {} / 100 ({:?}, {:?}, tier {})\n",
                    op.seller, op.scope, op.display_score, op.label, op.recommended_source, op.tier
                );
                if let Some(d) = &op.direct {
                    s += &format!("your last rating: {} in {}\n", d.value, d.scope);
                }
                for a in &op.advisories {
                    s += &format!("advisory: {a:?}\n");
                }
                s
            });
        }
        Command::Simulate(args) => {
            let mut scenario = load_scenario(&args.scenario)?;
            if let Some(seed) = args.seed {
                scenario.seed = seed;
            }
            if let Some(v) = args.variant {
                scenario.variant = v.into();
            }
            let report = match &args.trace {
                Some(path) => {
                    let (report, trace) = run_scenario_traced(&scenario)?;
                    write_records(path, &trace)?;
                    report
                }
                None => run_scenario(&scenario)?,
            };
            if let Some(out) = &args.out {
                fs::write(out, report.to_json()).with_context(|| format!("writing {}", out.display()))?;
            }
            emit(format, &report, || report.summary_table());
        }
        Command::Compare(args) => {
            let scenario = load_scenario(&args.scenario)?;
            let variants: Vec<Variant> = if args.variants.is_empty() {
                Variant::ALL.to_vec()
            } else {
                args.variants.iter().map(|&v| v.into()).collect()
            };
            let exec = if args.sequential {
                Execution::Sequential
            } else {
                Execution::Parallel
            };
            match args.seeds {
                None => {
                    let c = compare_variants(&scenario, &variants, exec)?;
                    emit(format, &c, || render_comparison(&c));
                }
                Some(0) => bail!("--seeds must be at least 1"),
                Some(n) => {
                    let seeds: Vec<u64> = (0..n).map(|i| scenario.seed.wrapping_add(i)).collect();
                    let e = compare_ensemble(&scenario, &variants, &seeds, exec)?;
                    emit(format, &e, || render_ensemble(&e));
                }
            }
        }
        Command::Stats(cmd) => stats(cmd, format)?,
        Command::Replay { log, compact } => {
            let ledger = replay(&log, config.key_convention)?;
            if let Some(path) = &compact {
                write_records(path, &ledger.to_records())?;
            }
            let rejections: Vec<_> = ledger
                .rejections
                .iter()
                .map(|r| json!({"line": r.line, "seq": r.seq, "error": r.error.to_string()}))
                .collect();
            let out = json!({
                "accounts": ledger.registry.len(),
                "ratings": ledger.store.len(),
                "revision": ledger.store.revision(),
                "listings": ledger.listings,
                "deals": ledger.deals,
                "last_seq": ledger.last_seq,
                "rejections": rejections,
            });
            emit(format, &out, || {
                let mut s = format!(
                    "{} accounts, {} latest ratings (revision {}), {} listings, {} deals, last seq {}\n",
                    ledger.registry.len(),
                    ledger.store.len(),
                    ledger.store.revision(),
                    ledger.listings,
                    ledger.deals,
                    ledger.last_seq
                );
                for r in &ledger.rejections {
                    s += &format!("line {}: registration refused: {}\n", r.line, r.error);
                }
                s
            });
        }
    }
    Ok(())
}

fn stats(cmd: StatsCommand, format: Format) -> Result<()> {
    match cmd {
        StatsCommand::Summarize { data } => {
            let ds = load_dataset(&data)?;
            let rows = ds
                .groups
                .iter()
                .map(|g| Ok((g.name.clone(), summarize_group(g)?)))
                .collect::<Result<Vec<_>>>()?;
            emit(format, &rows, || render_summary_table(&rows));
        }
        StatsCommand::Freq { data } => {
            let ds = load_dataset(&data)?;
            let rows = ds
                .groups
                .iter()
                .map(|g| Ok((g.name.clone(), frequency_table(&g.responses)?)))
                .collect::<Result<Vec<_>>>()?;
            emit(format, &rows, || render_frequency_table(&rows));
        }
        StatsCommand::Kruskal {
            data,
            alpha,
            reported_rank_sums,
            reported_h,
        } => {
            let ds = load_dataset(&data)?;
            let result = kruskal_wallis(&ds, alpha)?;
            let check = (!reported_rank_sums.is_empty() || reported_h.is_some())
                .then(|| check_reported_rank_sums(&result, &reported_rank_sums, reported_h));
            let out = json!({"result": result, "reported": check});
            emit(format, &out, || render_kruskal(&result, check.as_ref()));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

//! `petrisep`: coverability, disjointness and regular separation of labeled Petri nets.
//!
//! Exit codes: 0 success, 1 a checked property fails, 2 malformed input,
//! 3 `separate` given nets whose languages intersect.

mod config;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use log::info;

use petrisep_core::benchgen::{gen_last_letter_net, gen_random_pair, RandomNetParams};
use petrisep_core::fa::to_dot;
use petrisep_core::format::{automaton_from_json, automaton_to_json, net_from_json, net_to_json};
use petrisep_core::invariant::bound_conformance;
use petrisep_core::petri::product;
use petrisep_core::verify::bounded_language;
use petrisep_core::{
    check_invariant, invariant_from_backward, prestar_basis, separate, verify_separator, Error, LabeledPetriNet, Nfa,
    VerifyReport,
};

use config::Config;

#[derive(Parser)]
#[command(name = "petrisep", version, about = "Regular separators for Petri net coverability languages")]
struct Cli {
    /// TOML configuration file (overrides the PETRISEP_CONFIG environment variable).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Level {
    T2,
    Sigma,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Contain {
    First,
    Second,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Dot,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether the final marking is coverable.
    Cover { net: PathBuf },
    /// Decide whether two nets have disjoint languages.
    Disjoint { first: PathBuf, second: PathBuf },
    /// Build a regular separator for two disjoint nets.
    Separate {
        first: PathBuf,
        second: PathBuf,
        /// Output directory.
        #[arg(short, long)]
        out: PathBuf,
        /// Which automaton `separator.*` holds.
        #[arg(long, value_enum, default_value = "sigma")]
        level: Level,
        /// Check the separator exactly before exiting.
        #[arg(long)]
        verify: bool,
        /// Which net's language the separator contains.
        #[arg(long, value_enum, default_value = "second")]
        contain: Contain,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Print and check the inductive invariant of the product net.
    Invariant { first: PathBuf, second: PathBuf },
    /// Check that an automaton contains the second net's language and avoids the first's.
    Verify { first: PathBuf, second: PathBuf, automaton: PathBuf },
    /// List accepted words up to a length.
    Sample {
        net: PathBuf,
        #[arg(long)]
        max_len: usize,
    },
    /// Write a last-letter benchmark net.
    GenLastletter {
        #[arg(long)]
        bit: u8,
        #[arg(long)]
        k: u32,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Write a seeded pair of random nets to PREFIX.first.json and PREFIX.second.json.
    GenRandom {
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        places: usize,
        #[arg(long)]
        transitions: usize,
        #[arg(long)]
        norm: u64,
        #[arg(long, default_value_t = 2)]
        letters: usize,
        #[arg(short, long)]
        out: PathBuf,
    },
}

/// A failed command with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NotDisjoint => 3,
            Error::CertificateRejected(_) | Error::Coverable => 1,
            _ => 2,
        };
        Failure { code, message: e.to_string() }
    }
}

type Outcome = Result<u8, Failure>;

fn read_net(path: &Path) -> Result<LabeledPetriNet, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    net_from_json(&text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn read_automaton(path: &Path) -> Result<Nfa, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    let (a, _) = automaton_from_json(&text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    Ok(a)
}

fn write(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn print_report(report: &VerifyReport) {
    let show = |w: &Option<Vec<String>>| match w {
        Some(w) if w.is_empty() => " (witness: ε)".to_string(),
        Some(w) => format!(" (witness: {})", w.join(" ")),
        None => String::new(),
    };
    let verdict = |ok: bool| if ok { "holds" } else { "FAILS" };
    println!(
        "excludes first: {}{}",
        verdict(report.excludes_first.holds),
        show(&report.excludes_first.witness)
    );
    println!(
        "contains second: {}{}",
        verdict(report.contains_second.holds),
        show(&report.contains_second.witness)
    );
}

fn cover(path: &Path) -> Outcome {
    let net = read_net(path)?;
    let result = prestar_basis(&net);
    info!("cover basis={} iterations={}", result.basis.basis().len(), result.iterations);
    println!("{}", if result.coverable { "COVERABLE" } else { "NOT COVERABLE" });
    println!("basis:");
    for v in result.basis.basis() {
        println!("  {v}");
    }
    if let Some(w) = &result.witness {
        let names: Vec<&str> = w.iter().map(|t| net.transitions()[t.0].name.as_str()).collect();
        println!("witness: {}", names.join(" "));
    }
    Ok(u8::from(result.coverable))
}

fn disjoint(first: &Path, second: &Path) -> Outcome {
    let (n1, n2) = (read_net(first)?, read_net(second)?);
    let result = prestar_basis(&product(&n1, &n2));
    info!("disjoint basis={} iterations={}", result.basis.basis().len(), result.iterations);
    println!("{}", if result.coverable { "NOT DISJOINT" } else { "DISJOINT" });
    Ok(u8::from(result.coverable))
}

#[allow(clippy::too_many_arguments)]
fn separate_cmd(
    cfg: &Config,
    first: &Path,
    second: &Path,
    out: &Path,
    level: Level,
    verify: bool,
    contain: Contain,
    format: Format,
) -> Outcome {
    let (mut n1, mut n2) = (read_net(first)?, read_net(second)?);
    if contain == Contain::First {
        std::mem::swap(&mut n1, &mut n2);
    }
    let bundle = separate(&n1, &n2, cfg.bound_constant)?;
    fs::create_dir_all(out).map_err(|e| Failure::input(format!("{}: {e}", out.display())))?;
    let provenance = bundle.provenance.to_json();
    let mut prov_text = serde_json::to_string_pretty(&provenance).expect("provenance serializes");
    prov_text.push('\n');
    write(&out.join("provenance.json"), &prov_text)?;
    let render = |a: &Nfa, prov: Option<&serde_json::Value>| match format {
        Format::Json => automaton_to_json(a, prov),
        Format::Dot => to_dot(a),
    };
    let ext = match format {
        Format::Json => "json",
        Format::Dot => "dot",
    };
    for (name, a) in [("a_t2", &bundle.a_t2), ("a_bar", &bundle.a_bar), ("b_sigma", &bundle.b_sigma)] {
        write(&out.join(format!("{name}.{ext}")), &render(a, None))?;
    }
    let chosen = match level {
        Level::T2 => &bundle.a_bar,
        Level::Sigma => &bundle.b_sigma,
    };
    write(&out.join(format!("separator.{ext}")), &render(chosen, Some(&provenance)))?;
    println!(
        "separator: {} states (core {}, complement {}), ideals {}, basis {}",
        chosen.num_states(),
        bundle.a_t2.num_states(),
        bundle.a_bar.num_states(),
        bundle.certificate.down.len(),
        bundle.certificate.source_basis.basis().len()
    );
    if !verify {
        return Ok(0);
    }
    let report = match level {
        Level::T2 => verify_separator(&bundle.expanded, &bundle.deterministic, chosen)?,
        Level::Sigma => verify_separator(&n1, &n2, chosen)?,
    };
    print_report(&report);
    Ok(u8::from(!report.holds()))
}

fn invariant(cfg: &Config, first: &Path, second: &Path) -> Outcome {
    let (n1, n2) = (read_net(first)?, read_net(second)?);
    let joint = product(&n1, &n2);
    let cert = match invariant_from_backward(&joint, cfg.bound_constant) {
        Err(Error::Coverable) => {
            println!("NOT DISJOINT: no inductive invariant exists");
            return Ok(1);
        }
        other => other?,
    };
    info!("invariant basis={} ideals={}", cert.source_basis.basis().len(), cert.down.len());
    println!("places: {}", joint.places().join(" "));
    println!("ideals:");
    for u in cert.down.ideals() {
        println!("  {u}");
    }
    let report = check_invariant(&joint, &cert.down)?;
    let bounds = bound_conformance(&joint, &cert);
    println!("contains initial: {}", report.contains_initial);
    println!("avoids final: {}", report.final_violations.is_empty());
    println!("closed under successors: {}", report.succ_violations.is_empty());
    for f in report.failures() {
        println!("  {f}");
    }
    println!("bound g = {}", cert.bound);
    println!("within bounds: {}", bounds.holds());
    Ok(u8::from(!(report.holds() && bounds.holds())))
}

fn verify_cmd(first: &Path, second: &Path, automaton: &Path) -> Outcome {
    let (n1, n2) = (read_net(first)?, read_net(second)?);
    let b = read_automaton(automaton)?;
    let report = verify_separator(&n1, &n2, &b)?;
    print_report(&report);
    Ok(u8::from(!report.holds()))
}

fn sample(cfg: &Config, path: &Path, max_len: usize) -> Outcome {
    let net = read_net(path)?;
    let words = bounded_language(&net, max_len, &cfg.limits())?;
    for w in &words {
        println!("{}", if w.is_empty() { "ε".to_string() } else { w.join(" ") });
    }
    info!("sample words={}", words.len());
    Ok(0)
}

fn run(cli: Cli) -> Outcome {
    let cfg = Config::load(cli.config.as_deref()).map_err(Failure::input)?;
    match cli.command {
        Command::Cover { net } => cover(&net),
        Command::Disjoint { first, second } => disjoint(&first, &second),
        Command::Separate { first, second, out, level, verify, contain, format } => {
            separate_cmd(&cfg, &first, &second, &out, level, verify, contain, format)
        }
        Command::Invariant { first, second } => invariant(&cfg, &first, &second),
        Command::Verify { first, second, automaton } => verify_cmd(&first, &second, &automaton),
        Command::Sample { net, max_len } => sample(&cfg, &net, max_len),
        Command::GenLastletter { bit, k, out } => {
            let net = gen_last_letter_net(bit, k, cfg.last_letter_cap)?;
            write(&out, &net_to_json(&net))?;
            Ok(0)
        }
        Command::GenRandom { seed, places, transitions, norm, letters, out } => {
            let params = RandomNetParams { places, transitions, norm, letters };
            let pair = gen_random_pair(seed, &params);
            let path = |suffix: &str| {
                let mut name = out.as_os_str().to_owned();
                name.push(suffix);
                PathBuf::from(name)
            };
            write(&path(".first.json"), &net_to_json(&pair.first))?;
            write(&path(".second.json"), &net_to_json(&pair.second))?;
            println!("{}", if pair.disjoint { "DISJOINT" } else { "NOT DISJOINT" });
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .target(env_logger::Target::Stderr)
        .init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let start = Instant::now();
    let outcome = run(cli);
    let code = match outcome {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    };
    info!("exit={code} elapsed_ms={}", start.elapsed().as_millis());
    ExitCode::from(code)
}

//! Command-line front end: fixtures, construction, verification, solving,
//! classification and the acceptance battery.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use semifn::analysis::{classify, residual, Verdict};
use semifn::families::{construct, FamilyDescriptor, FunctionRef, HSpec, Mode};
use semifn::functions::{enumerate_multiplicative, null_sets, MULTIPLICATIVE_ORDER_BOUND};
use semifn::io::{parse_branch, parse_function_ref, CarrierSource, LoadedCarrier, PairFile, Session};
use semifn::scalar::{format_complex, parse_complex, tol, C64};
use semifn::semigroup::{Carrier, Element};
use semifn::solver::{find_solutions, SolverConfig};
use semifn::{suite, Error};

#[derive(Parser, Debug)]
#[command(name = "semifn", version)]
#[command(about = "Solutions (g, f) of g(xσ(y)) = g(x)g(y) − f(x)f(y) + αf(xσ(y)) on semigroups")]
#[command(after_help = "EXAMPLES:
    semifn construct --family 8 --fixture real-line --lambda 1 --alpha 2+0i --out pair.json
    semifn verify --pair pair.json --alpha 2+0i
    semifn nullsets naturals-from-2 --chi parity --window 200
    semifn characters bool-mult
    semifn solve c3 --alpha 0.5 --seed 7

Relative paths are resolved against $SEMIFN_OUT_DIR when it is set.")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the axioms of a fixture or a semigroup file
    Validate(CarrierArgs),
    /// List the involutive automorphisms, default first
    Automorphisms(CarrierArgs),
    /// Enumerate the multiplicative functions of a finite carrier
    Characters(CarrierArgs),
    /// I_χ, I_χ² and P_χ for a multiplicative function
    Nullsets(NullsetsArgs),
    /// Build a family member and write it as a pair file
    Construct(Box<ConstructArgs>),
    /// Residual of a pair file over all (window) pairs
    Verify(PairArgs),
    /// Multi-start Newton solutions on a finite carrier, one JSON object per line
    Solve(SolveArgs),
    /// Which family a pair file belongs to
    Classify(PairArgs),
    /// Run the acceptance battery
    Suite(SuiteArgs),
}

#[derive(Args, Debug)]
struct CarrierArgs {
    /// Fixture name or semigroup file
    carrier: String,
    /// Sample window size of a procedural fixture
    #[arg(long)]
    window: Option<usize>,
}

#[derive(Args, Debug)]
struct NullsetsArgs {
    #[command(flatten)]
    carrier: CarrierArgs,
    /// The multiplicative function, e.g. `parity` or `chi1`
    #[arg(long)]
    chi: String,
}

#[derive(Args, Debug)]
struct ConstructArgs {
    /// Family number, 1 to 8
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=8))]
    family: u8,
    /// Fixture name or semigroup file
    #[arg(long)]
    fixture: String,
    #[arg(long)]
    window: Option<usize>,
    /// σ by name, position or permutation (`0,2,1`); defaults to the carrier's default
    #[arg(long)]
    sigma: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    alpha: String,
    /// Shorthand for `--chi exp:λ` on the real line
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<String>,
    #[arg(long)]
    chi: Option<String>,
    #[arg(long)]
    chi1: Option<String>,
    #[arg(long)]
    chi2: Option<String>,
    /// Curve parameter of families 4 and 5
    #[arg(long, allow_hyphen_values = true)]
    q: Option<String>,
    /// Square-root branch of families 4 and 5 (`+` or `-`), or the sign of h in family 7
    #[arg(long, allow_hyphen_values = true)]
    branch: Option<String>,
    /// f for family 1, g for families 2 and 3
    #[arg(long)]
    free: Option<String>,
    /// A of family 7
    #[arg(long)]
    additive: Option<String>,
    /// ρ of family 7
    #[arg(long)]
    rho: Option<String>,
    /// Cyclotomic arithmetic; finite carriers and exact parameters only
    #[arg(long)]
    exact: bool,
    #[arg(long, default_value = "pair.json")]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct PairArgs {
    #[arg(long)]
    pair: PathBuf,
    /// Defaults to the α stored in the pair file
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<String>,
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[command(flatten)]
    carrier: CarrierArgs,
    #[arg(long)]
    sigma: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    alpha: String,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    restarts: Option<usize>,
}

#[derive(Args, Debug)]
struct SuiteArgs {
    /// Run only these criteria
    #[arg(long, value_delimiter = ',')]
    only: Vec<u8>,
}

/// Why a command did not succeed.
enum Failure {
    /// A check ran and failed: exit 1.
    Check(String),
    /// Bad input: exit 2.
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let mut session = Session::new();
    let result = match cli.command {
        Command::Validate(a) => validate(&a),
        Command::Automorphisms(a) => automorphisms(&mut session, &a),
        Command::Characters(a) => characters(&mut session, &a),
        Command::Nullsets(a) => nullsets(&mut session, &a),
        Command::Construct(a) => construct_cmd(&mut session, &a),
        Command::Verify(a) => verify(&session, &a),
        Command::Solve(a) => solve(&mut session, &a),
        Command::Classify(a) => classify_cmd(&session, &a),
        Command::Suite(a) => run_suite(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn alpha_arg(text: &str) -> Result<C64, Failure> {
    Ok(parse_complex(text)?)
}

fn load(session: &mut Session, a: &CarrierArgs) -> Result<LoadedCarrier, Failure> {
    Ok(session.load_carrier("carrier", &a.carrier, a.window)?.clone())
}

fn validate(a: &CarrierArgs) -> Outcome {
    let (source, sigma) = match CarrierSource::load(&a.carrier, a.window) {
        Ok(v) => v,
        Err(e @ (Error::NotAssociative(..) | Error::NotAnInvolution(_))) => return Err(Failure::Check(e.to_string())),
        Err(e) => return Err(e.into()),
    };
    let loaded = LoadedCarrier::new(source, sigma)?;
    let s = &loaded.carrier;
    let report = s.validate();
    if let Some(&(x, y)) = report.closure.first() {
        return Err(Failure::Check(format!("table entry ({x}, {y}) is not an element")));
    }
    if let Some((x, y, z)) = report.associativity.first() {
        return Err(Failure::Check(format!("associativity fails at ({x}, {y}, {z})")));
    }
    for sigma in &loaded.sigmas {
        if let Some(v) = sigma.violations(s)?.first() {
            return Err(Failure::Check(format!("{}: {v}", sigma.name())));
        }
    }
    let size = match s {
        Carrier::Finite(fs) => format!("order {}", fs.order()),
        Carrier::Procedural(_) => format!("window of {} elements", s.window().len()),
    };
    println!("{}: valid, {size}, {} involutive automorphisms", s.name(), loaded.sigmas.len());
    Ok(())
}

fn automorphisms(session: &mut Session, a: &CarrierArgs) -> Outcome {
    let loaded = load(session, a)?;
    for (k, sigma) in loaded.sigmas.iter().enumerate() {
        let mark = if k == 0 { "  (default)" } else { "" };
        println!("{k}  {}{mark}", sigma.name());
    }
    Ok(())
}

fn characters(session: &mut Session, a: &CarrierArgs) -> Outcome {
    let loaded = load(session, a)?;
    let fs = loaded.carrier.finite()?;
    for (k, ch) in enumerate_multiplicative(fs, MULTIPLICATIVE_ORDER_BOUND)?.iter().enumerate() {
        let parity: Vec<&str> = loaded
            .sigmas
            .iter()
            .map(|s| Ok(if ch.is_even(s)? { "even" } else { "-" }))
            .collect::<Result<_, Error>>()?;
        println!("chi{k}  {}  [{}]", ch.describe(), parity.join(" "));
    }
    Ok(())
}

fn show_set(set: &std::collections::BTreeSet<Element>) -> String {
    let items: Vec<String> = set.iter().map(Element::to_string).collect();
    format!("{{{}}}", items.join(", "))
}

fn nullsets(session: &mut Session, a: &NullsetsArgs) -> Outcome {
    let loaded = load(session, &a.carrier)?;
    let chi = session.registry().resolve(&loaded.carrier, &parse_function_ref(&a.chi)?, false)?;
    let ns = null_sets(&loaded.carrier, &chi)?;
    println!("I_chi ({}) = {}", ns.i_chi.len(), show_set(&ns.i_chi));
    println!("I_chi^2 ({}) = {}", ns.i_chi_sq.len(), show_set(&ns.i_chi_sq));
    println!("P_chi ({}) = {}", ns.p_chi.len(), show_set(&ns.p_chi));
    if ns.window_certified {
        println!("quantifiers over the window only");
    }
    Ok(())
}

fn construct_cmd(session: &mut Session, a: &ConstructArgs) -> Outcome {
    let loaded = session.load_carrier("carrier", &a.fixture, a.window)?.clone();
    let sigma = match &a.sigma {
        Some(text) => loaded.sigma(text)?,
        None => loaded.default_sigma().clone(),
    };
    let alpha = alpha_arg(&a.alpha)?;
    let fref = |t: &Option<String>| t.as_deref().map(parse_function_ref).transpose();
    let mut d = FamilyDescriptor::new(a.family, alpha);
    d.chi = fref(&a.chi)?;
    if let Some(l) = &a.lambda {
        if d.chi.is_some() {
            return Err(Failure::Usage("give --lambda or --chi, not both".into()));
        }
        d.chi = Some(parse_function_ref(&format!("exp:{l}"))?);
    }
    d.chi1 = fref(&a.chi1)?;
    d.chi2 = fref(&a.chi2)?;
    d.q = a.q.as_deref().map(parse_complex).transpose()?;
    d.sign_branch = a.branch.as_deref().map(parse_branch).transpose()?;
    if a.family == 7 {
        let zero = || FunctionRef::named("zero");
        let additive = fref(&a.additive)?.unwrap_or_else(zero);
        let rho = fref(&a.rho)?.unwrap_or_else(zero);
        d.h_spec = Some(HSpec::new(additive, rho));
    }
    let free = match fref(&a.free)? {
        Some(r) => Some(session.registry().resolve(&loaded.carrier, &r, a.exact)?),
        None => None,
    };
    let mode = if a.exact { Mode::Exact } else { Mode::Float };
    let pair = construct(&loaded.carrier, &sigma, &d, free.as_ref(), session.registry(), mode)?;
    let file = PairFile {
        carrier: loaded.source.clone(),
        sigma,
        pair,
    };
    let path = session.write_pair(&a.out, &file)?;
    println!("wrote family {} pair to {}", a.family, path.display());
    Ok(())
}

fn read_pair(session: &Session, a: &PairArgs) -> Result<(PairFile, Carrier, C64), Failure> {
    let file = session.read_pair(&a.pair)?;
    let s = file.carrier.carrier()?;
    let alpha = match &a.alpha {
        Some(t) => alpha_arg(t)?,
        None => file.pair.alpha,
    };
    Ok((file, s, alpha))
}

fn verify(session: &Session, a: &PairArgs) -> Outcome {
    let (file, s, alpha) = read_pair(session, a)?;
    let r = residual(&s, &file.sigma, alpha, &file.pair.g, &file.pair.f)?;
    let mode = match r.mode {
        Mode::Exact => "exact",
        Mode::Float => "float",
    };
    let worst = r.worst_pair.map(|(x, y)| format!(", worst at ({x}, {y})")).unwrap_or_default();
    let line = format!(
        "max_residual {:e} over {} pairs ({mode}{worst}), alpha {}",
        r.max_residual,
        r.pair_count,
        format_complex(alpha)
    );
    let ok = match r.mode {
        Mode::Exact => r.max_residual == 0.0,
        Mode::Float => r.max_residual < tol::IDENTITY,
    };
    if ok {
        println!("{line}: PASS");
        Ok(())
    } else {
        Err(Failure::Check(format!("{line}: FAIL")))
    }
}

fn solve(session: &mut Session, a: &SolveArgs) -> Outcome {
    let loaded = load(session, &a.carrier)?;
    let sigma = match &a.sigma {
        Some(text) => loaded.sigma(text)?,
        None => loaded.default_sigma().clone(),
    };
    let defaults = SolverConfig::default();
    let cfg = SolverConfig {
        seed: a.seed.unwrap_or(defaults.seed),
        restarts: a.restarts.unwrap_or(defaults.restarts),
        ..defaults
    };
    let set = find_solutions(&loaded.carrier, &sigma, alpha_arg(&a.alpha)?, &cfg)?;
    print!("{}", set.to_json_lines()?);
    let deficient = set.solutions.iter().filter(|p| p.rank_deficient).count();
    eprintln!(
        "{} solutions on {} with sigma {} ({deficient} rank-deficient)",
        set.solutions.len(),
        loaded.carrier.name(),
        sigma.name()
    );
    Ok(())
}

fn classify_cmd(session: &Session, a: &PairArgs) -> Outcome {
    let (file, s, alpha) = read_pair(session, a)?;
    let result = match classify(&s, &file.sigma, alpha, &file.pair.g, &file.pair.f) {
        Ok(r) => r,
        Err(e @ Error::NotASolution(_)) => return Err(Failure::Check(e.to_string())),
        Err(e) => return Err(e.into()),
    };
    println!("{}", serde_json::to_string_pretty(&result).map_err(Error::from)?);
    match result.family_tag {
        Verdict::Family(_) => Ok(()),
        Verdict::Unclassified => Err(Failure::Check("unclassified".into())),
    }
}

fn run_suite(a: &SuiteArgs) -> Outcome {
    for id in &a.only {
        if !suite::CRITERIA.iter().any(|(k, _)| k == id) {
            return Err(Failure::Usage(format!("no criterion {id}")));
        }
    }
    let mut failed = Vec::new();
    for (id, _) in suite::CRITERIA {
        if !a.only.is_empty() && !a.only.contains(&id) {
            continue;
        }
        let outcome = suite::run(id);
        println!("{outcome}");
        if !outcome.passed {
            failed.push(id);
        }
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Check(format!("failed criteria: {failed:?}")))
    }
}

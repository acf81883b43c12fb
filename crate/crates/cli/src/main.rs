use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use quasimap_core::checks::{CheckRegistry, Verdict};
use quasimap_core::ifunc::{quasimap_coefficient, restrict_to_y, Coefficient};
use quasimap_core::lp;
use quasimap_core::rational::{fmt_q, parse_q};
use quasimap_core::sectors::{age, group_element, novikov_degree, sector_descriptor, SectorError};
use quasimap_core::series::{KappaLimit, Series};
use quasimap_core::{Engine, EnumerationError, Presentation, RationalClass, Q};
use serde_json::{json, Value};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

/// Exact I-function coefficients and quantum Lefschetz diagnostics for
/// abelian complete-intersection GIT quotients.
#[derive(Parser)]
#[command(name = "quasimap", version)]
struct Cli {
    /// Emit machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Exact cone-membership solver.
    #[arg(long, global = true, default_value = lp::DEFAULT_SOLVER)]
    lp: String,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List effective classes by degree, with their sectors and ages.
    Effective {
        file: PathBuf,
        #[arg(long, value_parser = parse_rational)]
        max_degree: Q,
    },
    /// Print I-function coefficients.
    Ifun(IfunArgs),
    /// Run a named diagnostic.
    Check {
        file: PathBuf,
        #[arg(long, value_parser = parse_rational)]
        max_degree: Q,
        /// iconvex, prop33, lemma53, homogeneity or mirror.
        which: String,
    },
}

#[derive(Args)]
struct IfunArgs {
    file: PathBuf,
    /// A single class, e.g. "(-1,3)" or "(-1/3,1)".
    #[arg(long, conflicts_with = "max_degree")]
    class: Option<String>,
    /// Every effective class up to this degree.
    #[arg(long, value_parser = parse_rational, required_unless_present = "class")]
    max_degree: Option<Q>,
    /// The κ-equivariant twisted coefficient on the ambient sector.
    #[arg(long)]
    twisted: bool,
    /// Restrict the twisted coefficient to the complete intersection.
    #[arg(long, requires = "twisted")]
    restrict: bool,
    /// Take the nonequivariant limit κ → 0.
    #[arg(long, requires = "twisted")]
    limit: bool,
}

fn parse_rational(s: &str) -> Result<Q, String> {
    parse_q(s).map_err(|e| e.to_string())
}

/// Errors carrying their exit status.
enum Failure {
    Input(anyhow::Error),
    NonPositive(EnumerationError),
    NotEffective(RationalClass),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 2,
            Failure::NonPositive(_) => 3,
            Failure::NotEffective(_) => 4,
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Input(e)
    }
}

impl From<EnumerationError> for Failure {
    fn from(e: EnumerationError) -> Self {
        Failure::NonPositive(e)
    }
}

impl From<SectorError> for Failure {
    fn from(e: SectorError) -> Self {
        match e {
            SectorError::NotEffective(b) => Failure::NotEffective(b),
            other => Failure::Input(other.into()),
        }
    }
}

fn load(path: &Path, solver: &str) -> Result<Engine, Failure> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let p = Presentation::from_json(&text).with_context(|| format!("parsing {}", path.display()))?;
    let lp = lp::solver(solver).map_err(anyhow::Error::from)?;
    Engine::new(p, lp).map_err(|e| Failure::Input(e.into()))
}

fn print(json: bool, value: &Value, text: &str) {
    if json {
        println!("{}", serde_json::to_string_pretty(value).expect("values serialize"));
    } else {
        println!("{text}");
    }
}

fn effective(engine: &Engine, max_degree: &Q, as_json: bool) -> Result<u8, Failure> {
    let classes = engine.enumerate_effective(max_degree)?;
    let p = engine.presentation();
    let mut rows = Vec::new();
    for b in &classes {
        let g = group_element(b).inverse();
        let a = age(engine, &g)?;
        rows.push((b.to_string(), fmt_q(&novikov_degree(p, b)), g.to_string(), fmt_q(&a)));
    }
    let header = ("class", "degree", "sector", "age");
    let width = |f: fn(&(String, String, String, String)) -> usize, h: usize| rows.iter().map(f).max().unwrap_or(0).max(h);
    let w0 = width(|r| r.0.chars().count(), header.0.len());
    let w1 = width(|r| r.1.len(), header.1.len());
    let w2 = width(|r| r.2.len(), header.2.len());
    let mut text = format!("{:<w0$}  {:<w1$}  {:<w2$}  {}", header.0, header.1, header.2, header.3);
    for r in &rows {
        text.push_str(&format!("\n{:<w0$}  {:<w1$}  {:<w2$}  {}", r.0, r.1, r.2, r.3));
    }
    let value = json!({
        "max_degree": fmt_q(max_degree),
        "classes": rows.iter().map(|r| json!({"class": r.0, "degree": r.1, "sector": r.2, "age": r.3})).collect::<Vec<_>>(),
    });
    print(as_json, &value, &text);
    Ok(0)
}

/// One rendered coefficient.
struct Rendered {
    text: String,
    json: Value,
}

fn series_value(s: Option<&Series>) -> Value {
    s.map_or(Value::Null, |x| Value::String(x.render()))
}

fn coefficient(engine: &Engine, b: &RationalClass, args: &IfunArgs) -> Result<Rendered, Failure> {
    if !args.twisted {
        let c = quasimap_coefficient(engine, b)?;
        let (text, value, supported) = match &c {
            Coefficient::Value(s) => (s.render(), series_value(Some(s)), true),
            Coefficient::Unsupported(why) => (c.render(), json!(why), false),
        };
        return Ok(Rendered {
            text,
            json: json!({"class": b.to_string(), "kind": "quasimap", "supported": supported, "value": value}),
        });
    }
    let d = sector_descriptor(engine, b, true)?;
    let mut x = quasimap_core::ifunc::twisted_coefficient(engine, b)?;
    if args.restrict {
        x = restrict_to_y(&x, &d);
    }
    let base = json!({"class": b.to_string(), "kind": "twisted", "restricted": args.restrict, "limit": args.limit});
    if !args.limit {
        let mut j = base;
        j["value"] = series_value(Some(&x));
        return Ok(Rendered { text: x.render(), json: j });
    }
    let mut j = base;
    Ok(match x.kappa_limit() {
        KappaLimit::Exists(v) => {
            j["exists"] = json!(true);
            j["value"] = series_value(Some(&v));
            Rendered { text: v.render(), json: j }
        }
        KappaLimit::DoesNotExist(pp) => {
            j["exists"] = json!(false);
            j["value"] = Value::Null;
            j["principal_part"] = series_value(Some(&pp));
            Rendered {
                text: format!("no limit; principal part {}", pp.render()),
                json: j,
            }
        }
    })
}

fn ifun(engine: &Engine, args: &IfunArgs, as_json: bool) -> Result<u8, Failure> {
    if let Some(text) = &args.class {
        let b = RationalClass::parse(text).map_err(anyhow::Error::from)?;
        if b.len() != engine.presentation().k() {
            return Err(Failure::Input(anyhow::anyhow!(
                "class {b} has {} components but the torus has rank {}",
                b.len(),
                engine.presentation().k()
            )));
        }
        let r = coefficient(engine, &b, args)?;
        print(as_json, &r.json, &r.text);
        return Ok(0);
    }
    let bound = args.max_degree.as_ref().expect("clap enforces one of class/max-degree");
    let mut lines = Vec::new();
    let mut values = Vec::new();
    for b in engine.enumerate_effective(bound)? {
        let r = coefficient(engine, &b, args)?;
        lines.push(format!("{b}: {}", r.text));
        values.push(r.json);
    }
    print(as_json, &json!({"max_degree": fmt_q(bound), "coefficients": values}), &lines.join("\n"));
    Ok(0)
}

fn check(engine: &Engine, which: &str, max_degree: &Q, as_json: bool) -> Result<u8, Failure> {
    let registry = CheckRegistry::default();
    let c = registry.get(which).map_err(anyhow::Error::from)?;
    let report = c.run(engine, max_degree)?;
    let mut text = report.text.clone();
    if report.verdict == Verdict::Fail {
        if let Some(w) = report.json.get("witness") {
            text.push_str(&format!("\nwitness: {w}"));
        }
    }
    print(as_json, &report.json, &text);
    Ok(match report.verdict {
        Verdict::Pass => 0,
        Verdict::Fail => 1,
        Verdict::Inconclusive => 5,
    })
}

fn run(cli: &Cli) -> Result<u8, Failure> {
    match &cli.command {
        Command::Effective { file, max_degree } => effective(&load(file, &cli.lp)?, max_degree, cli.json),
        Command::Ifun(args) => ifun(&load(&args.file, &cli.lp)?, args, cli.json),
        Command::Check { file, max_degree, which } => check(&load(file, &cli.lp)?, which, max_degree, cli.json),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            let code = f.code();
            match f {
                Failure::Input(e) => eprintln!("error: {e:#}"),
                Failure::NonPositive(e) => eprintln!("error: {e}"),
                Failure::NotEffective(b) => eprintln!("error: class {b} is not I-effective"),
            }
            ExitCode::from(code)
        }
    }
}

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use operadkit::boxprod::{enumerate_symbols, symbol_complex, ComplexityBound};
use operadkit::cochain::{verify_identities, CochainCaps};
use operadkit::cubes::{count_components, verify_cubes_axioms, CubesCaps, CubesElement};
use operadkit::delta::FiniteSimplicialSet;
use operadkit::hochschild::{
    gerstenhaber_report, hochschild_cohomology, verify_cochain_identities, Coefficients, FiniteRankAlgebra,
    GerstenhaberCaps,
};
use operadkit::operad::{build_t, operad_homology, verify_operad_axioms, SamplePolicy};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

const THREADS_ENV: &str = "OPERADKIT_THREADS";

#[derive(Parser, Debug)]
#[command(name = "operadkit", version, about = "Exact chain operads, cochain operations, Hochschild cochains and little cubes")]
struct Cli {
    /// Worker threads for the verification passes.
    #[arg(long, global = true, env = THREADS_ENV)]
    threads: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Also write the JSON report here.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
enum Format {
    Table,
    Json,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize, PartialEq, Eq)]
enum Family {
    #[value(name = "T")]
    T,
    #[value(name = "Tn")]
    Tn,
}

#[derive(Args, Debug, Serialize)]
struct FamilyArgs {
    #[arg(long, value_enum, default_value_t = Family::T)]
    family: Family,
    /// Complexity bound, required for `Tn`.
    #[arg(long)]
    n: Option<usize>,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case", tag = "command")]
enum Command {
    /// Homology of one arity of T or T_n over a degree window.
    HomologyOperad {
        #[command(flatten)]
        #[serde(flatten)]
        family: FamilyArgs,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 6)]
        qmax: usize,
        /// Inclusive range `lo..hi`.
        #[arg(long, default_value = "0..2")]
        degrees: String,
    },
    /// Operad axioms on every basis tuple of the truncation, sampling above a cap.
    VerifyOperad {
        #[command(flatten)]
        #[serde(flatten)]
        family: FamilyArgs,
        #[arg(long, default_value_t = 3)]
        kmax: usize,
        #[arg(long, default_value_t = 4)]
        qmax: usize,
        #[arg(long, default_value_t = SamplePolicy::default().exhaustive_cap)]
        cap: u64,
        #[arg(long, default_value_t = SamplePolicy::default().seed)]
        seed: u64,
    },
    /// Basis symbols of arity `k` with source `[q]` and level `r`.
    EnumerateBasis {
        #[command(flatten)]
        #[serde(flatten)]
        family: FamilyArgs,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        q: usize,
        #[arg(long)]
        r: usize,
        /// Print every symbol, not only the count.
        #[arg(long)]
        list: bool,
    },
    /// Identities of the cochain operations on a finite simplicial set.
    VerifyCochainOps {
        /// `delta<N>`, `circle`, `sphere<N>` or a JSON file.
        #[arg(long, default_value = "delta2")]
        sset: String,
        #[arg(long, default_value_t = CochainCaps::default().max_size)]
        max_size: usize,
        #[arg(long, default_value_t = CochainCaps::default().seed)]
        seed: u64,
    },
    /// Hochschild cohomology and Gerstenhaber checks for a finite-rank algebra.
    Hochschild {
        /// `integers`, `dual-numbers`, `upper-triangular`, `matrices` or a JSON file.
        #[arg(long, default_value = "dual-numbers")]
        algebra: String,
        /// Coefficient prime for the built-in algebras; integers when absent.
        #[arg(long)]
        p: Option<u64>,
        #[arg(long, default_value_t = 3)]
        pmax: usize,
        /// Also check the Gerstenhaber identities on cohomology.
        #[arg(long)]
        gerstenhaber: bool,
        #[arg(long, default_value_t = GerstenhaberCaps::default().max_degree)]
        max_degree: usize,
        #[arg(long, default_value_t = GerstenhaberCaps::default().max_output)]
        max_output: usize,
    },
    /// Little cubes: compose from a file, count components, or check axioms.
    Cubes {
        #[arg(long, value_name = "FILE", conflicts_with_all = ["components", "verify"])]
        compose: Option<PathBuf>,
        #[arg(long, requires_all = ["n", "k"], conflicts_with = "verify")]
        components: bool,
        #[arg(long)]
        verify: bool,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, default_value_t = 3)]
        resolution: usize,
        #[arg(long, default_value_t = CubesCaps::default().instances)]
        instances: usize,
        #[arg(long, default_value_t = CubesCaps::default().seed)]
        seed: u64,
    },
    /// Writes the symbol complex of one arity as JSON.
    ExportComplex {
        #[command(flatten)]
        #[serde(flatten)]
        family: FamilyArgs,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value = "0..2")]
        degrees: String,
        #[arg(long, default_value_t = 3)]
        max_level: usize,
    },
}

#[derive(Debug)]
struct ConfigError(String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "configuration error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

fn config(msg: impl Into<String>) -> anyhow::Error {
    ConfigError(msg.into()).into()
}

#[derive(Serialize)]
struct Report {
    command: Value,
    version: &'static str,
    passed: bool,
    results: Value,
}

struct Outcome {
    passed: bool,
    results: Value,
    table: String,
}

impl FamilyArgs {
    fn bound(&self) -> anyhow::Result<ComplexityBound> {
        match (self.family, self.n) {
            (Family::T, None) => Ok(ComplexityBound::Unbounded),
            (Family::T, Some(_)) => Err(config("--n only applies to --family Tn")),
            (Family::Tn, None) => Err(config("--family Tn needs --n")),
            (Family::Tn, Some(0)) => Err(config("--n must be at least 1")),
            (Family::Tn, Some(n)) => Ok(ComplexityBound::Finite(n)),
        }
    }
}

fn parse_range(s: &str) -> anyhow::Result<(i64, i64)> {
    let (lo, hi) = s.split_once("..").ok_or_else(|| config(format!("degree range {s:?} is not of the form lo..hi")))?;
    let lo: i64 = lo.trim().parse().map_err(|_| config(format!("bad lower degree in {s:?}")))?;
    let hi: i64 = hi.trim().trim_start_matches('=').parse().map_err(|_| config(format!("bad upper degree in {s:?}")))?;
    if lo > hi {
        return Err(config(format!("empty degree range {s:?}")));
    }
    Ok((lo, hi))
}

fn load_sset(name: &str) -> anyhow::Result<FiniteSimplicialSet> {
    if name == "circle" {
        return Ok(FiniteSimplicialSet::circle());
    }
    for (prefix, make) in [
        ("delta", FiniteSimplicialSet::standard_simplex as fn(usize) -> FiniteSimplicialSet),
        ("sphere", FiniteSimplicialSet::sphere),
    ] {
        if let Some(d) = name.strip_prefix(prefix).and_then(|d| d.parse::<usize>().ok()) {
            return Ok(make(d));
        }
    }
    let text = std::fs::read_to_string(name).map_err(|e| config(format!("cannot read simplicial set {name:?}: {e}")))?;
    Ok(FiniteSimplicialSet::from_json(&text)?)
}

fn is_prime(q: u64) -> bool {
    q >= 2 && !(2..q).take_while(|d| d * d <= q).any(|d| q % d == 0)
}

fn load_algebra(name: &str, p: Option<u64>) -> anyhow::Result<FiniteRankAlgebra> {
    if let Some(q) = p.filter(|&q| !is_prime(q)) {
        return Err(config(format!("{q} is not prime")));
    }
    let c = match p {
        Some(p) => Coefficients::Mod(p),
        None => Coefficients::Integers,
    };
    let alg = match name {
        "integers" if p.is_none() => FiniteRankAlgebra::integers(),
        "integers" => return Err(config("the integers take no --p; use a JSON file for Z/p")),
        "dual-numbers" => FiniteRankAlgebra::dual_numbers(c),
        "upper-triangular" => FiniteRankAlgebra::upper_triangular(c),
        "matrices" => FiniteRankAlgebra::matrix_algebra(c),
        path => {
            let text =
                std::fs::read_to_string(path).map_err(|e| config(format!("cannot read algebra {path:?}: {e}")))?;
            FiniteRankAlgebra::from_json(&text)?
        }
    };
    if let Coefficients::Mod(q) = alg.coefficients() {
        if !is_prime(q) {
            return Err(config(format!("{q} is not prime")));
        }
    }
    Ok(alg)
}

fn checks_table(title: &str, report: &operadkit::check::CheckReport) -> String {
    let mut t = format!("{title}\n{:<36} {:>12} {:>9}\n", "check", "instances", "failures");
    for c in &report.checks {
        let _ = writeln!(t, "{:<36} {:>12} {:>9}", c.name, c.instances, c.failures);
        for w in &c.witnesses {
            let _ = writeln!(t, "    witness: {w}");
        }
    }
    t
}

fn homology_table(groups: &std::collections::BTreeMap<i64, operadkit::exact::Homology>) -> String {
    let mut t = format!("{:>6} {:>6}  torsion\n", "degree", "rank");
    for (d, h) in groups {
        let tors: Vec<String> = h.torsion.iter().map(|x| x.to_string()).collect();
        let _ = writeln!(t, "{d:>6} {:>6}  {}", h.betti, if tors.is_empty() { "-".into() } else { tors.join(" ") });
    }
    t
}

#[derive(Deserialize)]
struct ComposeInput {
    outer: CubesElement,
    inner: Vec<CubesElement>,
}

fn run(cmd: &Command) -> anyhow::Result<Outcome> {
    Ok(match cmd {
        Command::HomologyOperad { family, k, qmax, degrees } => {
            let (lo, hi) = parse_range(degrees)?;
            if *k == 0 {
                return Err(config("--k must be at least 1"));
            }
            let h = operad_homology(family.bound()?, *k, lo, hi, *qmax)?;
            let torsion_free = h.torsion_free();
            let table = format!(
                "homology of arity {k} (bound {}), stable between levels {} and {}\n{}",
                h.bound,
                h.levels.0,
                h.levels.1,
                homology_table(&h.groups)
            );
            Outcome { passed: true, results: json!({ "homology": h, "torsion_free": torsion_free }), table }
        }
        Command::VerifyOperad { family, kmax, qmax, cap, seed } => {
            if *kmax == 0 {
                return Err(config("--kmax must be at least 1"));
            }
            let t = build_t(*kmax, family.bound()?, *qmax)?;
            let r = verify_operad_axioms(&t, SamplePolicy { exhaustive_cap: *cap, seed: *seed });
            let mut table = checks_table(&format!("operad axioms, bound {}, k <= {kmax}, q <= {qmax}", r.bound), &r.report);
            for (name, (count, exhaustive)) in &r.families {
                let _ = writeln!(table, "{name}: {count} ({})", if *exhaustive { "exhaustive" } else { "sampled" });
            }
            Outcome { passed: r.passed(), results: serde_json::to_value(&r)?, table }
        }
        Command::EnumerateBasis { family, k, q, r, list } => {
            if *k == 0 {
                return Err(config("--k must be at least 1"));
            }
            let syms = enumerate_symbols(*k, *q, *r, family.bound()?);
            let mut table = format!("{} basis symbols for k = {k}, q = {q}, r = {r}\n", syms.len());
            let listed: Vec<Value> = if *list { syms.iter().map(|s| s.to_json()).collect() } else { vec![] };
            if *list {
                for s in &syms {
                    let _ = writeln!(table, "  {s}");
                }
            }
            Outcome { passed: true, results: json!({ "count": syms.len(), "symbols": listed }), table }
        }
        Command::VerifyCochainOps { sset, max_size, seed } => {
            let w = load_sset(sset)?;
            if *max_size == 0 {
                return Err(config("--max-size must be at least 1"));
            }
            let caps = CochainCaps { seed: *seed, ..CochainCaps::default().with_max_size(*max_size) };
            let r = verify_identities(&w, &caps);
            let table = checks_table(&format!("cochain identities on {sset}, simplices of size <= {max_size}"), &r);
            Outcome { passed: r.passed(), results: json!({ "caps": caps, "report": r }), table }
        }
        Command::Hochschild { algebra, p, pmax, gerstenhaber, max_degree, max_output } => {
            let alg = load_algebra(algebra, *p)?;
            let h = hochschild_cohomology(&alg, *pmax)?;
            let ids = verify_cochain_identities(&alg, *pmax)?;
            let mut passed = ids.passed();
            let mut table = format!("Hochschild cohomology of {} over {}\n", alg.name(), alg.coefficients());
            for d in &h.degrees {
                let group = match (&d.dimension, &d.group) {
                    (Some(dim), _) => format!("dimension {dim}"),
                    (None, Some(g)) => format!("rank {} torsion {:?}", g.betti, g.torsion.iter().map(|x| x.to_string()).collect::<Vec<_>>()),
                    _ => String::new(),
                };
                let _ = writeln!(table, "  H^{}: {group}", d.p);
            }
            table.push_str(&checks_table("cochain identities", &ids));
            let mut results = json!({ "cohomology": h, "identities": ids });
            if *gerstenhaber {
                let g = gerstenhaber_report(&alg, GerstenhaberCaps { max_degree: *max_degree, max_output: *max_output })?;
                passed &= g.passed();
                table.push_str(&checks_table(
                    &format!("Gerstenhaber identities ({}, {} certificates)", g.representatives, g.certificates.len()),
                    &g.checks,
                ));
                results["gerstenhaber"] = serde_json::to_value(&g)?;
            }
            Outcome { passed, results, table }
        }
        Command::Cubes { compose, components, verify, n, k, resolution, instances, seed } => {
            if let Some(path) = compose {
                let text = std::fs::read_to_string(path).map_err(|e| config(format!("cannot read {path:?}: {e}")))?;
                let input: ComposeInput = serde_json::from_str(&text).context("parsing composition input")?;
                let out = input.outer.gamma(&input.inner)?;
                let table = format!("{out}\n");
                Outcome { passed: true, results: json!({ "composite": out }), table }
            } else if *components {
                let (n, k) = (n.unwrap_or(0), k.unwrap_or(0));
                if n == 0 {
                    return Err(config("--n must be at least 1"));
                }
                let c = count_components(n, k, *resolution)?;
                let table = format!(
                    "{} components of {} sampled configurations (n = {n}, k = {k}, resolution {}, refined {}: {}); heuristic\n",
                    c.components, c.samples, c.resolution, c.refined_resolution, c.refined_components
                );
                Outcome { passed: true, results: serde_json::to_value(&c)?, table }
            } else if *verify {
                let mut caps = CubesCaps { instances: *instances, seed: *seed, ..CubesCaps::default() };
                if let Some(n) = n {
                    if *n == 0 {
                        return Err(config("--n must be at least 1"));
                    }
                    caps.n_max = *n;
                }
                if let Some(k) = k {
                    caps.k_max = *k;
                }
                let r = verify_cubes_axioms(caps);
                let table = checks_table(
                    &format!("little cubes axioms, {} configurations x {} instances", r.configurations, caps.instances),
                    &r.report,
                );
                Outcome { passed: r.passed(), results: serde_json::to_value(&r)?, table }
            } else {
                return Err(config("cubes needs one of --compose, --components or --verify"));
            }
        }
        Command::ExportComplex { family, k, degrees, max_level } => {
            let (lo, hi) = parse_range(degrees)?;
            if *k == 0 {
                return Err(config("--k must be at least 1"));
            }
            let c = symbol_complex(*k, family.bound()?, lo, hi, *max_level)?.graded()?;
            let j = c.to_json();
            let table = serde_json::to_string_pretty(&j)? + "\n";
            Outcome { passed: true, results: j, table }
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if t == 0 {
            eprintln!("{}", ConfigError("--threads must be at least 1".into()));
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    let started = std::time::Instant::now();
    let outcome = match run(&cli.command) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("{e:#}");
            return ExitCode::from(if e.is::<ConfigError>() { 2 } else { 1 });
        }
    };
    let report = Report {
        command: serde_json::to_value(&cli.command).unwrap_or(Value::Null),
        version: env!("CARGO_PKG_VERSION"),
        passed: outcome.passed,
        results: outcome.results,
    };
    let text = serde_json::to_string_pretty(&report).expect("report serializes");
    match cli.format {
        Format::Json => println!("{text}"),
        Format::Table => {
            print!("{}", outcome.table);
            println!("{}", if outcome.passed { "PASS" } else { "FAIL" });
        }
    }
    if let Some(path) = &cli.output {
        if let Err(e) = std::fs::write(path, text + "\n").map_err(|e| anyhow!("writing {}: {e}", path.display())) {
            eprintln!("{e}");
            return ExitCode::from(1);
        }
    }
    eprintln!("elapsed {:.2?}", started.elapsed());
    if outcome.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use nij_core::acs::{integrability_report, is_acs, star_rank, swaps_factors, Acs, BASIS_LABELS};
use nij_core::autmod::{orbit_invariance_check, sample_automorphisms, ORBIT_TOL};
use nij_core::classify::classify;
use nij_core::families::{
    admits_integrable_structure, family, mixed_structure, sample_params, template, FamilyId, FamilyParams,
};
use nij_core::json::{AnyAcs, MatrixDocument};
use nij_core::lie::{Designator, ProductAlgebra};
use nij_core::numsearch::{
    expects_nonexistence, nonexistence_scan, search_with_exact, InitMode, SearchConfig, SearchResult, Verdict,
    NONEXIST_TOL, SUCCESS_TOL,
};
use nij_core::spectral::Spectral;
use nij_core::{Error, Rational, Scalar};

const NONEXISTENCE_NOTE: &str = "no structure found (non-existence is proven for this type)";

#[derive(Parser)]
#[command(name = "nij", version, about = "Integrable complex structures on g x g for 3-dimensional Lie algebras g")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the Bianchi algebras and the structure families each admits.
    AlgebrasList,
    /// Check a matrix document for J^2 = -I and vanishing Nijenhuis tensor.
    Check {
        /// Must agree with the document's algebra when given.
        #[arg(long)]
        algebra: Option<Designator>,
        #[arg(long)]
        matrix: PathBuf,
    },
    /// Emit a family member as a matrix document.
    Family {
        #[arg(long)]
        algebra: Designator,
        #[arg(long)]
        family: FamilyId,
        /// KEY=VALUE, repeated.
        #[arg(long = "param", value_name = "KEY=VALUE")]
        params: Vec<String>,
    },
    /// Sample every family on its reference algebras and verify exactly.
    VerifyFamilies {
        #[arg(long, default_value_t = 20)]
        samples: usize,
        #[arg(long, env = "NIJ_SEED", default_value_t = 1)]
        seed: u64,
    },
    /// Multistart least-squares search for an integrable structure.
    Search(SearchArgs),
    /// Search on type 4 for each theta.
    ScanNonexistence {
        #[arg(long, value_delimiter = ',', default_value = "1/2,2,3")]
        thetas: Vec<String>,
        #[command(flatten)]
        search: SearchOptions,
    },
    /// Sample automorphisms of the 3-dimensional algebra and check orbit invariances.
    AutSample(AutSampleArgs),
    #[command(hide = true)]
    Aut {
        #[command(subcommand)]
        command: AutCommand,
    },
    /// The mixed structure in the standard basis.
    Mixed {
        #[arg(long)]
        algebra: Designator,
    },
}

#[derive(Subcommand)]
enum AutCommand {
    Sample(AutSampleArgs),
}

#[derive(Args)]
struct AutSampleArgs {
    #[arg(long)]
    algebra: Designator,
    #[arg(long, default_value_t = 10)]
    count: usize,
    #[arg(long, env = "NIJ_SEED", default_value_t = 1)]
    seed: u64,
}

#[derive(Args)]
struct SearchArgs {
    #[arg(long)]
    algebra: Designator,
    #[command(flatten)]
    options: SearchOptions,
}

#[derive(Args)]
struct SearchOptions {
    #[arg(long, default_value_t = 50)]
    restarts: usize,
    #[arg(long, env = "NIJ_SEED", default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 300)]
    max_iters: usize,
    #[arg(long, default_value_t = SUCCESS_TOL)]
    success_tol: f64,
    #[arg(long, default_value_t = NONEXIST_TOL)]
    nonexist_tol: f64,
    #[arg(long, value_enum, default_value_t = Init::Random)]
    init: Init,
    /// Noise amplitude for `--init family`.
    #[arg(long, default_value_t = 1e-2)]
    noise: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum Init {
    Random,
    Family,
}

impl SearchOptions {
    fn config(&self) -> SearchConfig {
        SearchConfig {
            restarts: self.restarts,
            max_iters: self.max_iters,
            success_tol: self.success_tol,
            nonexist_tol: self.nonexist_tol,
            seed: self.seed,
            init: match self.init {
                Init::Random => InitMode::Random,
                Init::Family => InitMode::FamilyNoise { noise: self.noise },
            },
            ..SearchConfig::default()
        }
    }
}

/// A finished command: its JSON document and whether the mathematical check passed.
struct Outcome {
    doc: Value,
    ok: bool,
}

impl Outcome {
    fn ok(doc: Value) -> Self {
        Outcome { doc, ok: true }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(Outcome { doc, ok }) => {
            println!("{}", serde_json::to_string_pretty(&doc).expect("serializable"));
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<Outcome, Error> {
    match command {
        Command::AlgebrasList => Ok(Outcome::ok(algebras_list()?)),
        Command::Check { algebra, matrix } => check(algebra, &matrix),
        Command::Family { algebra, family, params } => family_cmd(&algebra, family, &params),
        Command::VerifyFamilies { samples, seed } => verify_families(samples, seed),
        Command::Search(args) => search(&args.algebra, &args.options),
        Command::ScanNonexistence { thetas, search } => scan(&thetas, &search),
        Command::AutSample(args) | Command::Aut { command: AutCommand::Sample(args) } => aut_sample(&args),
        Command::Mixed { algebra } => mixed(&algebra),
    }
}

fn pair_label((a, b): (usize, usize)) -> Value {
    json!([BASIS_LABELS[a], BASIS_LABELS[b]])
}

fn float_rows(acs: &Acs<f64>) -> Value {
    json!(acs.matrix().0)
}

fn algebras_list() -> Result<Value, Error> {
    let designators = ["1", "2", "3", "4:1", "4:2", "5", "6:1", "6:1/2", "6:3/2", "7", "8"];
    let entries = designators
        .iter()
        .map(|d| {
            let d: Designator = d.parse()?;
            let alg = d.algebra::<Rational>()?;
            let families: Vec<&str> = FamilyId::ALL.iter().filter(|id| id.admits(&alg)).map(|id| id.as_str()).collect();
            Ok(json!({
                "algebra": d.to_string(),
                "brackets": alg.bracket_table(),
                "admits_integrable_structure": admits_integrable_structure(&alg),
                "families": families,
            }))
        })
        .collect::<Result<Vec<_>, Error>>()?;
    Ok(json!({
        "parameters": {"4": "theta != 0", "6": "theta > 0"},
        "algebras": entries,
    }))
}

fn check(expected: Option<Designator>, path: &PathBuf) -> Result<Outcome, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", path.display())))?;
    let doc = MatrixDocument::parse(&text)?;
    if let Some(expected) = expected {
        let (a, b) = (expected.algebra::<Rational>()?, doc.algebra.algebra::<Rational>()?);
        if a != b {
            return Err(Error::InvalidArgument(format!(
                "--algebra {expected} disagrees with the document's algebra {}",
                doc.algebra
            )));
        }
    }
    let (mut report, ok) = match &doc.acs {
        AnyAcs::Rational(j) => check_report(&doc.algebra.product::<Rational>()?, j),
        AnyAcs::Float(j) => check_report(&doc.algebra.product::<f64>()?, j),
    };
    report["algebra"] = json!(doc.algebra.to_string());
    report["scalar"] = json!(doc.acs.mode().as_str());
    Ok(Outcome { doc: report, ok })
}

fn check_report<T: Spectral>(palg: &ProductAlgebra<T>, j: &Acs<T>) -> (Value, bool) {
    let square = is_acs(j);
    let integ = integrability_report(palg, j);
    let failing: Vec<Value> = integ.failing_pairs(nij_core::DEFAULT_EPS).into_iter().map(pair_label).collect();
    let mut out = json!({
        "is_acs": square.is_acs,
        "acs_residual": square.residual,
        "integrable": square.is_acs && integ.integrable,
        "max_nijenhuis": integ.max_norm,
        "failing_pairs": failing,
    });
    if square.is_acs {
        out["star_rank"] = json!(star_rank(j));
        out["swaps_factors"] = json!(swaps_factors(j));
    }
    let ok = square.is_acs && integ.integrable;
    if ok {
        if let Ok(diag) = classify(palg, j) {
            out["quasi_invariant"] = serde_json::to_value(&diag.quasi_invariant).expect("serializable");
            out["shape"] = serde_json::to_value(&diag.shape).expect("serializable");
        }
    }
    (out, ok)
}

fn parse_params(id: FamilyId, raw: &[String]) -> Result<FamilyParams<Rational>, Error> {
    let pairs = raw
        .iter()
        .map(|kv| {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("--param expects KEY=VALUE, got `{kv}`")))?;
            Ok((k.trim(), <Rational as Scalar>::parse(v)?))
        })
        .collect::<Result<Vec<_>, Error>>()?;
    FamilyParams::from_pairs(id, pairs)
}

fn params_json(id: FamilyId, params: &FamilyParams<Rational>) -> Value {
    Value::Object(params.pairs(id).into_iter().map(|(k, v)| (k.to_string(), v.to_json())).collect())
}

fn family_cmd(d: &Designator, id: FamilyId, raw: &[String]) -> Result<Outcome, Error> {
    let alg = d.algebra::<Rational>()?;
    let params = parse_params(id, raw)?;
    match family(id, &params, &alg) {
        Ok(acs) => {
            let mut doc = MatrixDocument::rational(d.clone(), acs).to_value();
            doc["family"] = json!(id.as_str());
            doc["params"] = params_json(id, &params);
            Ok(Outcome::ok(doc))
        }
        Err(Error::SelfVerification(msg)) => {
            // Emit the template anyway so the failure can be inspected.
            let acs = Acs::new(template(id, &params, alg.tag())?);
            let integ = integrability_report(&ProductAlgebra::new(alg), &acs);
            let failing: Vec<Value> = integ.failing_pairs(0.0).into_iter().map(pair_label).collect();
            let mut doc = MatrixDocument::rational(d.clone(), acs).to_value();
            doc["family"] = json!(id.as_str());
            doc["params"] = params_json(id, &params);
            doc["integrable"] = json!(false);
            doc["failing_pairs"] = json!(failing);
            eprintln!("{msg}");
            Ok(Outcome { doc, ok: false })
        }
        Err(e) => Err(e),
    }
}

fn verify_families(samples: usize, seed: u64) -> Result<Outcome, Error> {
    let mut entries = Vec::new();
    let mut all_ok = true;
    for id in FamilyId::ALL {
        for d in id.reference_algebras() {
            let alg = d.algebra::<Rational>()?;
            let params = if id == FamilyId::Mixed { vec![FamilyParams::None] } else { sample_params(id, seed, samples) };
            let mut verified = 0;
            let mut first_error = None;
            for p in &params {
                match family(id, p, &alg) {
                    Ok(_) => verified += 1,
                    Err(e) => {
                        first_error.get_or_insert_with(|| e.to_string());
                    }
                }
            }
            all_ok &= verified == params.len();
            entries.push(json!({
                "family": id.as_str(),
                "algebra": d.to_string(),
                "samples": params.len(),
                "verified": verified,
                "first_error": first_error,
            }));
        }
    }
    Ok(Outcome { doc: json!({"seed": seed, "samples": samples, "all_verified": all_ok, "results": entries}), ok: all_ok })
}

fn search_json(palg: &ProductAlgebra<f64>, r: &SearchResult, seed: u64) -> Value {
    let mut out = json!({
        "algebra": palg.base().designator().to_string(),
        "verdict": r.verdict,
        "best_residual": r.best_residual,
        "restarts": r.restarts,
        "restart_index": r.restart_index,
        "iterations_used": r.iterations_used,
        "seed": seed,
        "matrix": float_rows(&r.best_matrix),
    });
    if r.verdict == Verdict::Found {
        if let Ok(diag) = classify(palg, &r.best_matrix) {
            out["diagnostics"] = serde_json::to_value(&diag).expect("serializable");
        }
    } else if expects_nonexistence(palg) {
        out["note"] = json!(NONEXISTENCE_NOTE);
    }
    out
}

fn search(d: &Designator, opts: &SearchOptions) -> Result<Outcome, Error> {
    let palg = d.product::<f64>()?;
    let exact = d.algebra::<Rational>().ok();
    let r = search_with_exact(&palg, exact.as_ref(), &opts.config())?;
    Ok(Outcome::ok(search_json(&palg, &r, opts.seed)))
}

fn scan(thetas: &[String], opts: &SearchOptions) -> Result<Outcome, Error> {
    let values = thetas.iter().map(|t| <f64 as Scalar>::parse(t)).collect::<Result<Vec<_>, _>>()?;
    let cfg = opts.config();
    let entries: Vec<Value> = nonexistence_scan(&values, &cfg)?
        .into_iter()
        .map(|e| {
            let palg = ProductAlgebra::new(nij_core::lie::bianchi(4, Some(e.theta)).expect("validated by the scan"));
            let mut v = search_json(&palg, &e.result, opts.seed);
            v["theta"] = json!(e.theta);
            v
        })
        .collect();
    let all_above = entries.iter().all(|e| e["best_residual"].as_f64().is_some_and(|r| r >= cfg.nonexist_tol));
    Ok(Outcome::ok(json!({
        "nonexist_tol": cfg.nonexist_tol,
        "all_above_nonexist_tol": all_above,
        "results": entries,
    })))
}

fn aut_sample(args: &AutSampleArgs) -> Result<Outcome, Error> {
    let alg = args.algebra.algebra::<f64>()?;
    let sample = sample_automorphisms(&alg, args.count, args.seed)?;
    if sample.shortfall > 0 {
        eprintln!("warning: accepted {} of {} requested maps", sample.maps.len(), args.count);
    }
    let report = orbit_invariance_check(&alg, &sample.maps, ORBIT_TOL)?;
    let maps: Vec<Value> = sample
        .maps
        .iter()
        .zip(&sample.residuals)
        .map(|(m, r)| json!({"matrix": m.0, "residual": r, "det": m.determinant()}))
        .collect();
    Ok(Outcome {
        ok: report.passed,
        doc: json!({
            "algebra": args.algebra.to_string(),
            "seed": args.seed,
            "requested": args.count,
            "accepted": sample.maps.len(),
            "shortfall": sample.shortfall,
            "attempts": sample.attempts,
            "maps": maps,
            "orbit_invariance": report,
        }),
    })
}

fn mixed(d: &Designator) -> Result<Outcome, Error> {
    let palg = d.product::<Rational>()?;
    match mixed_structure(&palg) {
        Ok(m) => {
            let (u, v, w) = m.uvw;
            let mut doc = MatrixDocument::rational(d.clone(), m.acs).to_value();
            doc["family"] = json!(FamilyId::Mixed.as_str());
            doc["uvw"] = json!([BASIS_LABELS[u], BASIS_LABELS[v], BASIS_LABELS[w]]);
            Ok(Outcome::ok(doc))
        }
        Err(e @ (Error::NotAdmissible { .. } | Error::SelfVerification(_))) => {
            eprintln!("{e}");
            Ok(Outcome { doc: json!({"algebra": d.to_string(), "found": false, "reason": e.to_string()}), ok: false })
        }
        Err(e) => Err(e),
    }
}

use std::fs;
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fjpolar::conditions::{condition_report, p1_gdi_sufficient_test, Guarantee, Verdict};
use fjpolar::model::{build_response_matrix, simulate, ResponseMatrix};
use fjpolar::report::{arrows_csv, candidate_set_json, delta_table_csv, delta_table_json, matrix_csv, sig6, DeltaRow};
use fjpolar::spectral::{candidate_set, spectral_basis, CandidateKind, CandidateSet, CandidateSetOptions, EIGEN_TOL};
use fjpolar::{
    build_susceptibility, load_edge_list, load_susceptibility, pagerank, row_normalize, EdgeListFormat, Error,
    ModelConfig, OpinionVector, SocialGraph, SusceptibilityProfile, SusceptibilityScheme,
};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;
use serde_json::json;

#[derive(Parser)]
#[command(name = "fjpolar", version, about = "Polarization analysis for Friedkin-Johnsen opinion dynamics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Shift table for the prejudice candidates plus a random baseline, and condition verdicts.
    Analyze {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        output: OutputArgs,
        /// Comma-separated candidate names, or "all".
        #[arg(long, default_value = "all")]
        candidates: String,
        /// Seed for the uniform baseline and randomized searches.
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Restarts for the global search above the exact-size limit.
        #[arg(long, default_value_t = 16)]
        budget: usize,
    },
    /// Per-node prejudice and final opinion for one candidate or a given prejudice.
    Arrows {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        output: OutputArgs,
        #[arg(long, conflicts_with = "prejudice", required_unless_present = "prejudice")]
        candidate: Option<String>,
        /// File of `label value` lines.
        #[arg(long)]
        prejudice: Option<PathBuf>,
    },
    /// Trajectory of the iterated dynamics.
    Simulate {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        output: OutputArgs,
        /// File of `label value` lines.
        #[arg(long)]
        prejudice: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        steps: usize,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Which index classes the model can polarize.
    Conditions {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Influence matrix, susceptibilities and response matrix.
    DumpMatrices {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Args)]
struct ModelArgs {
    /// Edge list: `u v [weight]` per line, `u u w` sets a self weight (`inf` for stubborn).
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    directed: bool,
    #[arg(long, value_enum, default_value_t = VariantArg::Gfj)]
    variant: VariantArg,
    /// const:<c>, pagerank, pagerank-inv or file:<path> (generalized model only).
    #[arg(long, default_value = "pagerank", value_parser = parse_lambda)]
    lambda: LambdaSpec,
    #[arg(long, default_value_t = 0.01)]
    epsilon: f64,
    #[arg(long, default_value_t = 0.85)]
    damping: f64,
    /// Self weight for nodes without one (variational model).
    #[arg(long)]
    self_weight: Option<f64>,
}

#[derive(Args)]
struct OutputArgs {
    /// Directory for output files; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VariantArg {
    Gfj,
    Vfj,
    Rfj,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Debug)]
enum LambdaSpec {
    Const(f64),
    PageRank,
    PageRankInverse,
    File(PathBuf),
}

fn parse_lambda(s: &str) -> Result<LambdaSpec, String> {
    match s {
        "pagerank" => Ok(LambdaSpec::PageRank),
        "pagerank-inv" => Ok(LambdaSpec::PageRankInverse),
        _ => {
            if let Some(c) = s.strip_prefix("const:") {
                c.parse().map(LambdaSpec::Const).map_err(|e| format!("bad constant {c:?}: {e}"))
            } else if let Some(p) = s.strip_prefix("file:") {
                Ok(LambdaSpec::File(PathBuf::from(p)))
            } else {
                Err(format!("expected const:<c>, pagerank, pagerank-inv or file:<path>, got {s:?}"))
            }
        }
    }
}

struct Loaded {
    graph: SocialGraph,
    cfg: ModelConfig,
    h: ResponseMatrix,
    /// Weights the disagreement index is measured on.
    ndi_weights: DMatrix<f64>,
}

fn load(args: &ModelArgs) -> Result<Loaded, Error> {
    let file = fs::File::open(&args.graph)?;
    let graph = load_edge_list(BufReader::new(file), EdgeListFormat { directed: args.directed })?;
    let cfg = match args.variant {
        VariantArg::Gfj => {
            let lambdas = susceptibility(args, &graph)?;
            ModelConfig::gfj(row_normalize(&graph)?, lambdas)?
        }
        VariantArg::Vfj => ModelConfig::vfj_from_graph(&graph, args.self_weight)?,
        VariantArg::Rfj => ModelConfig::rfj(graph.adjacency())?,
    };
    let h = build_response_matrix(&cfg)?;
    let ndi_weights = match cfg.social() {
        Some(social) => social.clone(),
        None => cfg.generalized()?.0.matrix().clone(),
    };
    Ok(Loaded { graph, cfg, h, ndi_weights })
}

fn susceptibility(args: &ModelArgs, g: &SocialGraph) -> Result<SusceptibilityProfile, Error> {
    let scheme = match &args.lambda {
        LambdaSpec::File(path) => return load_susceptibility(BufReader::new(fs::File::open(path)?), g),
        LambdaSpec::Const(c) => return SusceptibilityProfile::constant(g.n(), *c),
        LambdaSpec::PageRank => SusceptibilityScheme::PageRankProportional,
        LambdaSpec::PageRankInverse => SusceptibilityScheme::PageRankInverse,
    };
    let c = pagerank(g, args.damping, 1e-12, 10_000)?;
    build_susceptibility(&c, scheme, args.epsilon)
}

fn read_prejudice(path: &Path, g: &SocialGraph) -> Result<OpinionVector, Error> {
    let text = fs::read_to_string(path)?;
    let mut values = vec![f64::NAN; g.n()];
    for (k, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let bad = |message: String| Error::Parse { line: k + 1, message };
        let mut parts = line.split(|c: char| c == ',' || c.is_whitespace()).filter(|p| !p.is_empty());
        let (label, value) = match (parts.next(), parts.next(), parts.next()) {
            (Some(l), Some(v), None) => (l, v),
            _ => return Err(bad("expected `label value`".into())),
        };
        let label: u64 = label.parse().map_err(|_| bad(format!("bad label {label:?}")))?;
        let value: f64 = value.parse().map_err(|_| bad(format!("bad value {value:?}")))?;
        let i = g.index_of(label).ok_or_else(|| bad(format!("unknown node {label}")))?;
        if !values[i].is_nan() {
            return Err(bad(format!("node {label} listed twice")));
        }
        values[i] = value;
    }
    if let Some(i) = values.iter().position(|v| v.is_nan()) {
        return Err(Error::Validation(format!("no prejudice for node {}", g.labels()[i])));
    }
    OpinionVector::new(values)
}

fn parse_candidates(list: &str) -> Result<Vec<CandidateKind>, Error> {
    if list == "all" {
        return Ok(CandidateKind::ALL.to_vec());
    }
    list.split(',')
        .map(|name| {
            CandidateKind::parse(name.trim())
                .ok_or_else(|| Error::Validation(format!("unknown candidate {name:?}")))
        })
        .collect()
}

fn candidates(loaded: &Loaded, kinds: Vec<CandidateKind>, budget: usize) -> Result<CandidateSet, Error> {
    let basis = spectral_basis(&loaded.h, EIGEN_TOL)?;
    let opts = CandidateSetOptions { kinds, budget, ..CandidateSetOptions::default() };
    Ok(candidate_set(&basis, &loaded.h, &opts))
}

/// Writes to `dir/name` or, without a directory, to stdout.
fn emit(out: &OutputArgs, name: &str, body: &str) -> Result<(), Error> {
    match &out.out {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            fs::write(dir.join(name), body)?;
        }
        None => io::stdout().write_all(body.as_bytes())?,
    }
    Ok(())
}

fn extension(out: &OutputArgs) -> &'static str {
    match out.format {
        Format::Csv => "csv",
        Format::Json => "json",
    }
}

fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::Polarizing => "polarizing",
        Verdict::Depolarizing => "depolarizing",
        Verdict::SufficientHolds => "sufficient_holds",
        Verdict::Inconclusive => "inconclusive",
    }
}

fn banner(loaded: &Loaded) -> Result<(), Error> {
    let report = condition_report(&loaded.cfg)?;
    match report[0].guarantee {
        Some(Guarantee::UndirectedRestricted) => {
            eprintln!("restricted model on undirected ties: never polarizing for any index")
        }
        Some(Guarantee::UndirectedEqualSelfWeights) => {
            eprintln!("undirected ties with equal self weights: never polarizing for P2, P3, P4")
        }
        None => {}
    }
    Ok(())
}

fn conditions_output(loaded: &Loaded, format: Format) -> Result<String, Error> {
    let report = condition_report(&loaded.cfg)?;
    let labels = loaded.graph.labels();
    Ok(match format {
        Format::Csv => {
            let mut s = String::from("class,verdict,witness,guarantee\n");
            for v in &report {
                let witness = v.witness.map(|i| labels[i].to_string()).unwrap_or_default();
                let guarantee = v.guarantee.map(|g| format!("{g:?}")).unwrap_or_default();
                s.push_str(&format!("{:?},{},{witness},{guarantee}\n", v.class, verdict_name(v.verdict)));
            }
            s
        }
        Format::Json => serde_json::to_string_pretty(&report).map_err(|e| Error::Numerical(e.to_string()))? + "\n",
    })
}

fn analyze(model: &ModelArgs, output: &OutputArgs, list: &str, seed: u64, budget: usize) -> Result<(), Error> {
    let kinds = parse_candidates(list)?;
    let loaded = load(model)?;
    banner(&loaded)?;
    let n = loaded.h.n();
    let set = candidates(&loaded, kinds, budget)?;
    let hm = loaded.h.matrix();
    let w = &loaded.ndi_weights;

    let mut rng = SplitMix64::seed_from_u64(seed);
    let unif: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
    let mut rows = vec![DeltaRow::new("s_unif", &unif, hm, w)?];
    for (kind, r) in set.iter() {
        match r {
            Ok(c) => rows.push(DeltaRow::new(kind.name(), c.s.values(), hm, w)?),
            Err(why) => eprintln!("{}: unavailable ({why})", kind.name()),
        }
    }

    let basis = spectral_basis(&loaded.h, EIGEN_TOL)?;
    let mut dispersion = Vec::new();
    for (kind, r) in set.iter() {
        if let (Ok(c), false) = (r, kind.targets_p4()) {
            let t = p1_gdi_sufficient_test(&basis, &basis.coefficients(c.s.values())?)?;
            dispersion.push((kind.name(), t));
        }
    }

    let conditions = conditions_output(&loaded, output.format)?;
    match output.format {
        Format::Csv => {
            let table = delta_table_csv(&rows, n)?;
            let mut disp = String::from("candidate,verdict,lhs,rhs,dP1\n");
            for (name, t) in &dispersion {
                disp.push_str(&format!(
                    "{name},{},{},{},{}\n",
                    verdict_name(t.verdict),
                    sig6(t.lhs),
                    sig6(t.rhs),
                    sig6(t.delta_p1)
                ));
            }
            if output.out.is_some() {
                emit(output, "deltas.csv", &table)?;
                emit(output, "conditions.csv", &conditions)?;
                emit(output, "dispersion.csv", &disp)?;
                let cands = candidate_set_json(&set, hm, w)?;
                emit(output, "candidates.json", &(pretty(&cands)? + "\n"))?;
            } else {
                emit(output, "", &table)?;
                eprint!("{conditions}");
            }
        }
        Format::Json => {
            let doc = json!({
                "deltas": delta_table_json(&rows, n)?,
                "candidates": candidate_set_json(&set, hm, w)?,
                "conditions": serde_json::from_str::<serde_json::Value>(&conditions).map_err(|e| Error::Numerical(e.to_string()))?,
                "dispersion": dispersion.iter().map(|(name, t)| json!({
                    "candidate": name,
                    "verdict": verdict_name(t.verdict),
                    "lhs": t.lhs,
                    "rhs": t.rhs,
                    "dP1": t.delta_p1,
                })).collect::<Vec<_>>(),
            });
            emit(output, "analysis.json", &(pretty(&doc)? + "\n"))?;
        }
    }
    Ok(())
}

fn pretty(v: &serde_json::Value) -> Result<String, Error> {
    serde_json::to_string_pretty(v).map_err(|e| Error::Numerical(e.to_string()))
}

fn arrows(model: &ModelArgs, output: &OutputArgs, candidate: Option<&str>, prejudice: Option<&Path>) -> Result<(), Error> {
    let loaded = load(model)?;
    let s = match (candidate, prejudice) {
        (_, Some(path)) => read_prejudice(path, &loaded.graph)?,
        (Some(name), None) => {
            let kind = CandidateKind::parse(name)
                .ok_or_else(|| Error::Validation(format!("unknown candidate {name:?}")))?;
            // Cheaper candidates seed the searches, so compute the ones listed before it.
            let rank = |k: &CandidateKind| CandidateKind::ALL.iter().position(|x| x == k);
            let kinds = CandidateKind::ALL
                .into_iter()
                .filter(|k| *k == kind || (!k.targets_p4() && rank(k) < rank(&kind)))
                .collect();
            let set = candidates(&loaded, kinds, 16)?;
            match set.get(kind).expect("requested kind is computed") {
                Ok(c) => c.s.clone(),
                Err(why) => return Err(Error::Validation(format!("candidate {name} unavailable: {why}"))),
            }
        }
        (None, None) => return Err(Error::Validation("need --candidate or --prejudice".into())),
    };
    let z = loaded.h.apply(s.values());
    let lambdas = loaded.cfg.lambdas()?;
    let labels = loaded.graph.labels();
    let body = match output.format {
        Format::Csv => arrows_csv(labels, s.values(), &z, &lambdas),
        Format::Json => {
            let nodes: Vec<_> = (0..s.len())
                .map(|i| json!({"node": labels[i], "prejudice": s.values()[i], "final": z[i], "lambda": lambdas[i]}))
                .collect();
            let mean = |x: &[f64]| x.iter().sum::<f64>() / x.len() as f64;
            pretty(&json!({"nodes": nodes, "mean_initial": mean(s.values()), "mean_final": mean(&z)}))? + "\n"
        }
    };
    emit(output, &format!("arrows.{}", extension(output)), &body)
}

fn simulate_cmd(model: &ModelArgs, output: &OutputArgs, prejudice: &Path, steps: usize, tol: f64) -> Result<(), Error> {
    let file = fs::File::open(&model.graph)?;
    let graph = load_edge_list(BufReader::new(file), EdgeListFormat { directed: model.directed })?;
    // The trajectory is defined even where no steady state exists, so skip the response matrix.
    let cfg = match model.variant {
        VariantArg::Gfj => ModelConfig::gfj(row_normalize(&graph)?, susceptibility(model, &graph)?)?,
        VariantArg::Vfj => ModelConfig::vfj_from_graph(&graph, model.self_weight)?,
        VariantArg::Rfj => ModelConfig::rfj(graph.adjacency())?,
    };
    let s = read_prejudice(prejudice, &graph)?;
    let mut trajectory: Vec<Vec<f64>> = Vec::new();
    let d = simulate(&cfg, &s, tol, steps, |_, z| trajectory.push(z.to_vec()))?;
    if !d.converged {
        eprintln!("warning: no convergence within {steps} steps (last change {:.3e})", d.residual);
    }
    let last = trajectory.len() - 1;
    let status = |k: usize| match (k == last, d.converged) {
        (false, _) => "running",
        (true, true) => "converged",
        (true, false) => "not_converged",
    };
    let body = match output.format {
        Format::Csv => {
            let mut out = String::from("step,status");
            for l in graph.labels() {
                out.push_str(&format!(",{l}"));
            }
            out.push('\n');
            for (k, z) in trajectory.iter().enumerate() {
                out.push_str(&format!("{k},{}", status(k)));
                for x in z {
                    out.push(',');
                    out.push_str(&sig6(*x));
                }
                out.push('\n');
            }
            out
        }
        Format::Json => {
            let doc = json!({
                "labels": graph.labels(),
                "trajectory": trajectory,
                "converged": d.converged,
                "iterations": d.iterations,
                "residual": d.residual,
            });
            pretty(&doc)? + "\n"
        }
    };
    emit(output, &format!("trajectory.{}", extension(output)), &body)
}

fn conditions_cmd(model: &ModelArgs, output: &OutputArgs) -> Result<(), Error> {
    let loaded = load(model)?;
    banner(&loaded)?;
    let body = conditions_output(&loaded, output.format)?;
    emit(output, &format!("conditions.{}", extension(output)), &body)
}

fn dump_matrices(model: &ModelArgs, output: &OutputArgs) -> Result<(), Error> {
    let loaded = load(model)?;
    let (w, lambdas) = loaded.cfg.generalized()?;
    let h = loaded.h.matrix();
    let rows = |m: &DMatrix<f64>| -> Vec<Vec<f64>> { m.row_iter().map(|r| r.iter().copied().collect()).collect() };
    match (output.format, &output.out) {
        (Format::Csv, Some(_)) => {
            emit(output, "W.csv", &matrix_csv(w.matrix()))?;
            emit(output, "H.csv", &matrix_csv(h))?;
            let mut l = String::from("node,lambda\n");
            for (label, x) in loaded.graph.labels().iter().zip(&lambdas) {
                l.push_str(&format!("{label},{x:e}\n"));
            }
            emit(output, "lambdas.csv", &l)
        }
        (Format::Csv, None) => emit(output, "", &matrix_csv(h)),
        (Format::Json, _) => {
            let doc = json!({
                "labels": loaded.graph.labels(),
                "W": rows(w.matrix()),
                "lambdas": lambdas,
                "H": rows(h),
            });
            emit(output, "matrices.json", &(pretty(&doc)? + "\n"))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse { .. } | Error::Validation(_) | Error::Dimension { .. } => 2,
        Error::Convergence { .. } | Error::Numerical(_) => 3,
        Error::Io(_) => 4,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Analyze { model, output, candidates, seed, budget } => analyze(model, output, candidates, *seed, *budget),
        Command::Arrows { model, output, candidate, prejudice } => {
            arrows(model, output, candidate.as_deref(), prejudice.as_deref())
        }
        Command::Simulate { model, output, prejudice, steps, tol } => simulate_cmd(model, output, prejudice, *steps, *tol),
        Command::Conditions { model, output } => conditions_cmd(model, output),
        Command::DumpMatrices { model, output } => dump_matrices(model, output),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

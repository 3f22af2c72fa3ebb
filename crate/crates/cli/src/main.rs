use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use fivehole::analytics::{census, garcia_audit, min_holes_corpus, min_holes_signatures, MinHolesOptions};
use fivehole::constructions::{carrot_certificate, construct_carrot_with_params, construct_horton, harborth_witness};
use fivehole::enumerate::{all_signatures, count_signatures_with};
use fivehole::partition::lower_bound_account;
use fivehole::verifier::{attach_realizations, import_order_type_corpus, run_lemma, sweep_images, verify_point_sets, LemmaSpec, RunOptions, Verdict};
use fivehole::{DividedSet, EnumerationOptions, HoleIndex, PointSet};

const SCHEMA: u32 = 1;

#[derive(Parser)]
#[command(name = "fivehole", version, about = "Exhaustive searches and constructions around empty convex pentagons")]
struct Cli {
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true, env = "FIVEHOLE_THREADS")]
    threads: Option<usize>,

    /// Print a JSON report instead of text.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a statement about divided sets over every consistent signature.
    Verify(VerifyArgs),
    /// Count the k-holes of a point set.
    CountHoles(CountArgs),
    /// Minimum number of k-holes among all configurations of n points.
    MinHoles(MinHolesArgs),
    /// Print one of the explicit constructions.
    Construct(ConstructArgs),
    /// Island partition and guaranteed 5-holes of a divided set.
    Pipeline(PipelineArgs),
    /// Count or list all consistent signatures on n points.
    EnumerateSignatures(EnumerateArgs),
    /// Read an order type database file and summarize it.
    ImportCorpus(CorpusArgs),
    /// Check the 3-hole and 4-hole identities on random rational sets.
    GarciaCheck(GarciaArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Lemma {
    Lemma6,
    Lemma7,
    Corollary8,
    Lemma9,
    Lemma10,
    Lemma11,
    Lemma12,
    Lemma13,
    Lemma14,
}

#[derive(Args)]
struct VerifyArgs {
    lemma: Lemma,
    #[arg(long)]
    size_a: Option<usize>,
    #[arg(long)]
    size_b: Option<usize>,
    /// Lower bound on |B| in the hypothesis of corollary8.
    #[arg(long, default_value_t = 6)]
    min_b: usize,
    /// Consecutive wedges considered by lemma13.
    #[arg(long, default_value_t = 3)]
    wedges: usize,
    /// Replace the conclusion by its negation.
    #[arg(long)]
    invert: bool,
    /// Drop the assumption that there is no divided 5-hole.
    #[arg(long)]
    without_hole_hypothesis: bool,
    /// lemma12 only: drop the requirement that the non-convex wedge misses B.
    #[arg(long)]
    any_nonconvex_wedge: bool,
    #[arg(long, default_value_t = 1)]
    shards: usize,
    #[arg(long, default_value_t = 0)]
    shard: usize,
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    #[arg(long)]
    prefix_depth: Option<usize>,
    #[arg(long)]
    stop_after_first: bool,
    /// Return after this many jobs; rerun with the same checkpoint to continue.
    #[arg(long)]
    max_jobs: Option<usize>,
    /// Counterexamples kept in the report.
    #[arg(long, default_value_t = 16)]
    keep: usize,
    /// Seconds spent looking for coordinates of each counterexample.
    #[arg(long, default_value_t = 5.0)]
    realize_seconds: f64,
    /// Check the realizable sets of an order type database file instead.
    #[arg(long)]
    corpus: Option<PathBuf>,
    #[arg(long, default_value_t = 8)]
    bits: u32,
    /// With --corpus: also try every sweep direction of each set.
    #[arg(long)]
    all_directions: bool,
}

#[derive(Args)]
struct CountArgs {
    #[arg(long)]
    file: PathBuf,
    #[arg(long)]
    k: usize,
    /// Also count holes with vertices on both sides of this split.
    #[arg(long)]
    split: Option<usize>,
    /// Print the full census instead.
    #[arg(long)]
    census: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Signatures,
    Corpus,
}

#[derive(Args)]
struct MinHolesArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 5)]
    k: usize,
    #[arg(long, value_enum, default_value_t = Mode::Signatures)]
    mode: Mode,
    #[arg(long)]
    corpus: Option<PathBuf>,
    #[arg(long, default_value_t = 8)]
    bits: u32,
    #[arg(long)]
    prefix_depth: Option<usize>,
    #[arg(long, default_value_t = 20.0)]
    realize_seconds: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum Construction {
    Carrot,
    Horton,
    Harborth,
}

#[derive(Args)]
struct ConstructArgs {
    kind: Construction,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct PipelineArgs {
    #[arg(long)]
    file: PathBuf,
    #[arg(long, default_value_t = 5)]
    r: usize,
    /// Points left of the line; read from the file header or else half.
    #[arg(long)]
    split: Option<usize>,
    /// Write the JSON report here.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Compare the account with the exact 5-hole count.
    #[arg(long)]
    census: bool,
}

#[derive(Args)]
struct EnumerateArgs {
    #[arg(long)]
    n: usize,
    /// Fix the first orientation; counts half the signatures.
    #[arg(long)]
    mirror: bool,
    /// Write every signature to this file.
    #[arg(long)]
    dump: Option<PathBuf>,
}

#[derive(Args)]
struct CorpusArgs {
    #[arg(long)]
    file: PathBuf,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 8)]
    bits: u32,
}

#[derive(Args)]
struct GarciaArgs {
    #[arg(long, default_value_t = 1000)]
    count: usize,
    #[arg(long, default_value_t = 10)]
    min_n: usize,
    #[arg(long, default_value_t = 14)]
    max_n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

/// Process outcome: success, or a counterexample or violation.
enum Outcome {
    Ok,
    Violation,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            return ExitCode::from(if usage { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Violation) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<Outcome> {
    if let Some(t) = cli.threads {
        if t == 0 {
            bail!("thread count must be at least 1");
        }
        rayon::ThreadPoolBuilder::new().num_threads(t).build_global()?;
    }
    let json = cli.json;
    match cli.command {
        Command::Verify(a) => verify(a, json),
        Command::CountHoles(a) => count_holes(a, json),
        Command::MinHoles(a) => min_holes(a, json),
        Command::Construct(a) => construct(a, json),
        Command::Pipeline(a) => pipeline(a, json),
        Command::EnumerateSignatures(a) => enumerate(a, json),
        Command::ImportCorpus(a) => import_corpus(a, json),
        Command::GarciaCheck(a) => garcia(a, json),
    }
}

fn emit<T: Serialize>(command: &str, body: &T) -> Result<()> {
    let mut v = serde_json::to_value(body)?;
    if let Some(obj) = v.as_object_mut() {
        obj.insert("schema".into(), json!(SCHEMA));
        obj.insert("command".into(), json!(command));
    }
    println!("{}", serde_json::to_string_pretty(&v)?);
    Ok(())
}

fn lemma_spec(a: &VerifyArgs) -> Result<LemmaSpec> {
    let mut spec = match a.lemma {
        Lemma::Lemma9 => LemmaSpec::lemma9_with_size_b(a.size_b.unwrap_or(6)),
        Lemma::Lemma10 => LemmaSpec::lemma10(a.size_b.unwrap_or(4)),
        Lemma::Lemma11 => LemmaSpec::lemma11_with_size_b(a.size_b.unwrap_or(5)),
        Lemma::Lemma12 if a.any_nonconvex_wedge => LemmaSpec::lemma12_without_empty_wedge(a.size_a.unwrap_or(5)),
        Lemma::Lemma12 => LemmaSpec::lemma12(a.size_a.unwrap_or(5)),
        Lemma::Lemma6 => LemmaSpec::lemma6(a.size_a.unwrap_or(5), a.size_b.unwrap_or(5)),
        Lemma::Lemma7 => LemmaSpec::lemma7(a.size_a.unwrap_or(5), a.size_b.unwrap_or(6)),
        Lemma::Corollary8 => LemmaSpec::corollary8(a.size_a.unwrap_or(5), a.size_b.unwrap_or(6), a.min_b),
        Lemma::Lemma13 => {
            if !(3..=4).contains(&a.wedges) {
                bail!("--wedges must be 3 or 4");
            }
            LemmaSpec::lemma13(a.size_a.unwrap_or(6), a.size_b.unwrap_or(4), a.wedges)
        }
        Lemma::Lemma14 => LemmaSpec::lemma14(a.size_a.unwrap_or(6), a.size_b.unwrap_or(4)),
    };
    if a.without_hole_hypothesis {
        spec = spec.without_hole_hypothesis();
    }
    if a.invert {
        spec = spec.inverted();
    }
    if spec.size_a == 0 || spec.size_b == 0 || spec.n() > 12 {
        bail!("part sizes {}/{} are out of range (each at least 1, at most 12 points)", spec.size_a, spec.size_b);
    }
    Ok(spec)
}

fn verify(a: VerifyArgs, json: bool) -> Result<Outcome> {
    let spec = lemma_spec(&a)?;
    if a.shards == 0 || a.shard >= a.shards {
        bail!("--shard must be below --shards");
    }
    let mut report = match &a.corpus {
        Some(path) => {
            let sets = import_order_type_corpus(path, spec.n(), a.bits)?;
            let sets: Vec<PointSet> = if a.all_directions { sets.iter().flat_map(sweep_images).collect() } else { sets };
            verify_point_sets(&spec, &sets)?
        }
        None => {
            let opts = RunOptions {
                shards: a.shards,
                shard: a.shard,
                prefix_depth: a.prefix_depth,
                checkpoint: a.checkpoint.clone(),
                stop_after_first: a.stop_after_first,
                keep: a.keep,
                max_jobs: a.max_jobs,
                ..Default::default()
            };
            run_lemma(&spec, &opts)?
        }
    };
    if a.realize_seconds > 0.0 && !report.counterexamples.is_empty() {
        attach_realizations(&mut report, Duration::from_secs_f64(a.realize_seconds), 0)?;
    }
    if json {
        emit("verify", &report)?;
    } else {
        let verdict = match report.verdict {
            Verdict::Verified => "verified",
            Verdict::Refuted => "refuted",
            Verdict::Incomplete => "incomplete",
        };
        println!(
            "{}: {verdict} (n={}, split={}, shard {}/{}, visited {}, hypothesis held {}, pruned {}, counterexamples {}, {:.1} s)",
            report.lemma,
            report.n,
            report.split,
            report.shard,
            report.shards,
            report.visited,
            report.hypothesis_held,
            report.pruned,
            report.counterexample_count,
            report.elapsed_seconds
        );
        for (i, c) in report.counterexamples.iter().enumerate() {
            print!("{c}");
            if let Some(Some(points)) = report.realizations.get(i) {
                println!("# realized by\n{}", points.trim_end().lines().map(|l| format!("# {l}")).collect::<Vec<_>>().join("\n"));
            }
        }
    }
    Ok(if report.verdict == Verdict::Refuted { Outcome::Violation } else { Outcome::Ok })
}

enum Input {
    Plain(PointSet),
    Divided(DividedSet),
}

fn read_input(path: &Path) -> Result<Input> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let header = text.lines().map(str::trim).find(|l| !l.is_empty() && !l.starts_with('#'));
    if header.is_some_and(|h| h.starts_with("split")) {
        Ok(Input::Divided(DividedSet::parse(&text)?))
    } else {
        Ok(Input::Plain(PointSet::parse(&text)?))
    }
}

fn count_holes(a: CountArgs, json: bool) -> Result<Outcome> {
    let (set, header_split) = match read_input(&a.file)? {
        Input::Plain(p) => (p, None),
        Input::Divided(d) => (d.base().clone(), Some(d.split())),
    };
    if a.census {
        let c = census(&set)?;
        if json {
            emit("count-holes", &c)?;
        } else {
            println!(
                "n {}\nh3 {}\nh4 {}\nh5 {}\nh6 {}\ngamma {}\nh3|5 {}\nh4|5 {}",
                c.n, c.h3, c.h4, c.h5, c.h6, c.gamma, c.h3_generated, c.h4_generated
            );
        }
        return Ok(Outcome::Ok);
    }
    if a.k < 3 {
        bail!("k must be at least 3");
    }
    let index = HoleIndex::new(&set);
    let count = index.count(a.k);
    let split = a.split.or(header_split);
    if let Some(s) = split {
        if s == 0 || s >= set.len() {
            bail!("split {s} is out of range for {} points", set.len());
        }
    }
    let divided = split.map(|s| index.count_divided(a.k, s));
    if json {
        emit("count-holes", &json!({ "n": set.len(), "k": a.k, "count": count, "split": split, "divided": divided }))?;
    } else {
        println!("{count}");
        if let Some(d) = divided {
            println!("divided {d}");
        }
    }
    Ok(Outcome::Ok)
}

fn min_holes(a: MinHolesArgs, json: bool) -> Result<Outcome> {
    let report = match a.mode {
        Mode::Signatures => {
            let mut opts = MinHolesOptions {
                realization_budget: Duration::from_secs_f64(a.realize_seconds.max(0.0)),
                ..Default::default()
            };
            if let Some(d) = a.prefix_depth {
                opts.enumeration.prefix_depth = d;
            }
            min_holes_signatures(a.n, a.k, &opts)?
        }
        Mode::Corpus => {
            let path = a.corpus.as_ref().context("--mode corpus needs --corpus PATH")?;
            let sets = import_order_type_corpus(path, a.n, a.bits)?;
            min_holes_corpus(&sets, a.k)?
        }
    };
    if json {
        emit("min-holes", &report)?;
    } else {
        println!("{}", report.count);
        match &report.witness {
            Some(points) => print!("{points}"),
            None => println!("{}", report.witness_signature),
        }
    }
    Ok(Outcome::Ok)
}

fn construct(a: ConstructArgs, json: bool) -> Result<Outcome> {
    let (text, extra) = match a.kind {
        Construction::Carrot => {
            let n = a.n.context("carrot needs --n")?;
            let (d, params) = construct_carrot_with_params(n)?;
            let (critical, divided) = carrot_certificate(&d);
            (d.to_text(), json!({ "params": params, "ell_critical": critical, "divided_5_holes": divided }))
        }
        Construction::Horton => {
            let n = a.n.context("horton needs --n")?;
            let h = construct_horton(n)?;
            (h.to_text(), json!({ "n": n }))
        }
        Construction::Harborth => {
            let h = harborth_witness();
            (h.to_text(), json!({ "n": h.len() }))
        }
    };
    if let Some(path) = &a.output {
        fs::write(path, &text).with_context(|| format!("writing {}", path.display()))?;
    }
    if json {
        let mut v = extra;
        v["points"] = json!(text);
        emit("construct", &v)?;
    } else if a.output.is_none() {
        print!("{text}");
    }
    Ok(Outcome::Ok)
}

fn pipeline(a: PipelineArgs, json: bool) -> Result<Outcome> {
    let d = match read_input(&a.file)? {
        Input::Divided(d) if a.split.is_none() => d,
        Input::Divided(d) => DividedSet::new(d.base().clone(), a.split.unwrap_or_default())?,
        Input::Plain(p) => {
            let s = a.split.unwrap_or(p.len() / 2);
            DividedSet::new(p, s)?
        }
    };
    let account = lower_bound_account(&d, a.r)?;
    let h5 = a.census.then(|| HoleIndex::new(d.base()).count(5));
    let sound = h5.is_none_or(|h| account.total <= h);
    let report = json!({ "n": d.len(), "split": d.split(), "account": account, "h5": h5, "sound": sound });
    if let Some(path) = &a.report {
        let mut v = report.clone();
        v["schema"] = json!(SCHEMA);
        v["command"] = json!("pipeline");
        fs::write(path, serde_json::to_string_pretty(&v)?)?;
    }
    if json {
        emit("pipeline", &report)?;
    } else {
        println!("islands {} (r = {}), remainder {} points", account.s, account.r, account.partition.remainder.len());
        println!("guaranteed 5-holes {}", account.total);
        if let Some(h) = h5 {
            println!("5-holes {h}");
        }
    }
    Ok(if sound { Outcome::Ok } else { Outcome::Violation })
}

fn enumerate(a: EnumerateArgs, json: bool) -> Result<Outcome> {
    if !(3..=12).contains(&a.n) {
        bail!("n must be between 3 and 12");
    }
    let opts = EnumerationOptions {
        mirror_symmetry: a.mirror,
        prefix_depth: a.n.saturating_sub(3).max(2),
    };
    let count = if let Some(path) = &a.dump {
        if a.n > 8 {
            bail!("listing is limited to n <= 8");
        }
        let all = all_signatures(a.n, opts);
        let text: String = all.iter().map(|s| s.to_dump()).collect();
        fs::write(path, text)?;
        all.len() as u64
    } else {
        count_signatures_with(a.n, opts)
    };
    if json {
        emit("enumerate-signatures", &json!({ "n": a.n, "mirror": a.mirror, "count": count }))?;
    } else {
        println!("{count}");
    }
    Ok(Outcome::Ok)
}

fn import_corpus(a: CorpusArgs, json: bool) -> Result<Outcome> {
    let sets = import_order_type_corpus(&a.file, a.n, a.bits)?;
    let h5: Vec<u64> = sets.iter().map(|s| HoleIndex::new(s).count(5)).collect();
    let summary = json!({
        "n": a.n,
        "bits": a.bits,
        "records": sets.len(),
        "min_h5": h5.iter().min(),
        "max_h5": h5.iter().max(),
    });
    if json {
        emit("import-corpus", &summary)?;
    } else {
        println!("{} records of {} points, all in general position", sets.len(), a.n);
        if let (Some(lo), Some(hi)) = (h5.iter().min(), h5.iter().max()) {
            println!("5-holes per set: {lo}..={hi}");
        }
    }
    Ok(Outcome::Ok)
}

fn garcia(a: GarciaArgs, json: bool) -> Result<Outcome> {
    if a.min_n > a.max_n {
        bail!("--min-n exceeds --max-n");
    }
    let audit = garcia_audit(a.count, a.min_n..=a.max_n, a.seed)?;
    if json {
        emit("garcia-check", &audit)?;
    } else {
        println!("{} sets, {} failures", audit.instances, audit.failures);
    }
    Ok(if audit.failures == 0 { Outcome::Ok } else { Outcome::Violation })
}

use crate::cache::Cache;
use crate::{AdvCommand, Cli, Command, DtreeCommand, FnCommand, GranularityArg, MeasureArgs, ProgramArg, ReportCommand, SimCommand, VerifyArgs, WitnessArg};
use anyhow::{anyhow, bail, Context, Result};
use qpar::adversary::{barrier_bound, parallel_adv_ratio, symmetric_adversary, tensor_adversary, AdversaryMatrix};
use qpar::boolfn::{block_sensitivity, certificate_complexity, spectral_sensitivity, BoolFnError, Descriptor, GeneratorSpec, Side};
use qpar::classical::{exact_parallel_D, Granularity};
use qpar::quantum::{dj_program, forrelation_program, grover_parallel, run_program};
use qpar::verify::{merge_records, run_suite, summary_table, Grid, SuiteReport, VerifyError, SUITES};
use qpar::{Bits, BooleanFunction};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

/// Bad invocation: exit code 2.
#[derive(Debug)]
pub struct Usage(pub String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    Usage(msg.into()).into()
}

fn verify_err(e: VerifyError) -> anyhow::Error {
    match e {
        VerifyError::UnknownSuite(_) | VerifyError::UnknownParam { .. } | VerifyError::BadParam { .. } => usage(e.to_string()),
        e => e.into(),
    }
}

fn boolfn_err(e: BoolFnError) -> anyhow::Error {
    match e {
        BoolFnError::UnknownGenerator(_) | BoolFnError::BadParam { .. } => usage(e.to_string()),
        e => e.into(),
    }
}

/// Flags that clap cannot see once a trailing `--key value` list has begun.
struct Extracted {
    values: BTreeMap<&'static str, String>,
    switches: Vec<&'static str>,
    rest: Vec<String>,
}

fn extract(args: &[String], valued: &[&'static str], switches: &[&'static str]) -> Result<Extracted> {
    let mut out = Extracted { values: BTreeMap::new(), switches: Vec::new(), rest: Vec::new() };
    let mut it = args.iter();
    while let Some(a) = it.next() {
        let (flag, inline) = match a.split_once('=') {
            Some((f, v)) => (f, Some(v.to_string())),
            None => (a.as_str(), None),
        };
        if let Some(&k) = valued.iter().find(|&&k| k == flag) {
            let v = match inline {
                Some(v) => v,
                None => it.next().ok_or_else(|| usage(format!("{k} needs a value")))?.clone(),
            };
            out.values.insert(k, v);
        } else if let Some(&k) = switches.iter().find(|&&k| k == a) {
            out.switches.push(k);
        } else {
            out.rest.push(a.clone());
        }
    }
    Ok(out)
}

fn seed_from(ex: &Extracted, seed: u64) -> Result<u64> {
    match ex.values.get("--seed") {
        Some(s) => s.parse().map_err(|_| usage(format!("--seed: `{s}` is not a 64-bit integer"))),
        None => Ok(seed),
    }
}

fn write_or_print(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load(path: &Path) -> Result<BooleanFunction> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let d = Descriptor::parse(&text).with_context(|| format!("parsing {}", path.display()))?;
    d.build().map_err(boolfn_err).with_context(|| format!("building {}", path.display()))
}

fn set_threads(threads: Option<usize>) -> Result<()> {
    if let Some(n) = threads {
        if n == 0 {
            bail!(usage("--threads must be positive"));
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().context("configuring the thread pool")?;
    }
    Ok(())
}

/// `Ok(false)` means the command ran but something it checked failed.
pub fn run(cli: Cli) -> Result<bool> {
    let (seed, mut threads) = (cli.seed, cli.threads);
    // Trailing parameter lists swallow later global flags; recover them.
    if let Command::Fn(FnCommand::Build { params, .. }) | Command::Verify(VerifyArgs { grid: params, .. }) = &cli.command {
        if let Some(t) = extract(params, &["--threads"], &[])?.values.get("--threads") {
            threads = Some(t.parse().map_err(|_| usage(format!("--threads: `{t}` is not a count")))?);
        }
    }
    set_threads(threads)?;
    match cli.command {
        Command::Fn(FnCommand::Build { generator, table, out, params }) => fn_build(&generator, table, out, &params),
        Command::Fn(FnCommand::Show { file }) => fn_show(&file),
        Command::Measure(args) => measure(&args),
        Command::Dtree(DtreeCommand::Solve { file, p, granularity }) => dtree_solve(&file, p, granularity),
        Command::Sim(SimCommand::Quantum { program, n, p, rounds, input, shots, trace }) => {
            sim_quantum(program, n, p, rounds, &input, shots, trace.as_deref(), seed)
        }
        Command::Adv(AdvCommand::Ratio { file, file2, witness, p, dump }) => adv_ratio(&file, file2.as_deref(), witness, p, dump.as_deref()),
        Command::Adv(AdvCommand::Barrier { file, p }) => adv_barrier(&file, p),
        Command::Verify(args) => verify(args, seed),
        Command::Report(ReportCommand::Merge { files, out }) => report_merge(&files, out.as_deref()),
    }
}

fn fn_build(generator: &str, table: bool, out: Option<PathBuf>, params: &[String]) -> Result<bool> {
    let ex = extract(params, &["--out", "-o", "--seed", "--threads"], &["--table"])?;
    let table = table || ex.switches.contains(&"--table");
    let out = out.or_else(|| ex.values.get("--out").or(ex.values.get("-o")).map(PathBuf::from));
    let grid = Grid::from_args(&ex.rest).map_err(verify_err)?;
    let mut spec = GeneratorSpec::new(generator);
    for (k, v) in &grid.0 {
        spec = spec.param(k, v);
    }
    let f = qpar::constructions::build_generator(&spec).map_err(boolfn_err)?;
    let d = if table { f.table_descriptor() } else { f.descriptor() }?;
    write_or_print(out.as_deref(), &d.to_string())?;
    Ok(true)
}

fn fn_show(file: &Path) -> Result<bool> {
    let f = load(file)?;
    let mut s = String::new();
    writeln!(s, "name {}", f.name())?;
    writeln!(s, "arity {}", f.arity())?;
    writeln!(s, "backing {}", if f.is_table() { "table" } else { "generator" })?;
    if let Some(m) = f.block_meta() {
        writeln!(s, "blocks {} x {} bits", m.block_count, m.block_bits)?;
    }
    match f.domain_size() {
        Ok(d) => {
            writeln!(s, "domain {d} of {}", 1u128 << f.arity())?;
            writeln!(s, "total {}", f.is_total())?;
        }
        Err(e) => writeln!(s, "domain not enumerated ({e})")?,
    }
    print!("{s}");
    Ok(true)
}

/// A measure cell: the value, or a flag when the computation is out of range.
fn cell<T: ToString>(r: qpar::boolfn::Result<T>) -> Result<String> {
    match r {
        Ok(v) => Ok(v.to_string()),
        Err(BoolFnError::TooLarge { .. }) => Ok("TooLarge".into()),
        Err(BoolFnError::NotTotal(_)) => Ok("NotTotal".into()),
        Err(e) => Err(e.into()),
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn measure(args: &MeasureArgs) -> Result<bool> {
    let mut out = String::from("name,arity,C0,C1,C,bs,lambda\n");
    for path in &args.files {
        let f = load(path)?;
        let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| f.name().to_string());
        let lambda = spectral_sensitivity::<f64>(&f).map(|l| format!("{l:.9}"));
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            csv_field(&name),
            f.arity(),
            cell(certificate_complexity(&f, Side::Zero))?,
            cell(certificate_complexity(&f, Side::One))?,
            cell(certificate_complexity(&f, Side::Max))?,
            cell(block_sensitivity(&f, None, None))?,
            cell(lambda)?,
        )?;
    }
    print!("{out}");
    Ok(true)
}

fn dtree_solve(file: &Path, p: usize, granularity: GranularityArg) -> Result<bool> {
    let f = load(file)?;
    let g = match granularity {
        GranularityArg::Bit => Granularity::Bit,
        GranularityArg::Block => Granularity::Block,
    };
    let cache = Cache::from_env();
    let key = format!("{}|{p}|{g}", std::fs::read_to_string(file)?);
    let d = match cache.get::<usize>("dtree", &key) {
        Some(d) => d,
        None => {
            let d = exact_parallel_D(&f, p, g)?;
            cache.put("dtree", &key, &d);
            d
        }
    };
    println!("p,granularity,rounds\n{p},{g},{d}");
    Ok(true)
}

#[allow(clippy::too_many_arguments)]
fn sim_quantum(
    program: ProgramArg,
    n: usize,
    p: usize,
    rounds: usize,
    input: &str,
    shots: Option<usize>,
    trace: Option<&Path>,
    seed: u64,
) -> Result<bool> {
    let prog = match program {
        ProgramArg::Grover => grover_parallel(n, p, rounds)?,
        ProgramArg::Forrelation => forrelation_program(n),
        ProgramArg::Dj => dj_program(n)?,
    };
    let bits: Vec<bool> = input
        .chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            _ => Err(usage(format!("--input must be a 0/1 string, found `{c}`"))),
        })
        .collect::<Result<_>>()?;
    if bits.len() != prog.input_len() {
        bail!(usage(format!("--input has {} bits; the program reads {}", bits.len(), prog.input_len())));
    }
    let run = run_program(&prog, &Bits::from_bools(&bits))?;
    if let Some(path) = trace {
        std::fs::write(path, run.trace_json_lines()).with_context(|| format!("writing {}", path.display()))?;
    }
    match shots {
        None => print!("{}", run.distribution_csv()),
        Some(shots) => {
            let mut counts = BTreeMap::new();
            for o in run.sample(shots, seed) {
                *counts.entry(o).or_insert(0usize) += 1;
            }
            let mut s = String::from("outcome,count\n");
            for (o, c) in counts {
                writeln!(s, "{o},{c}")?;
            }
            print!("{s}");
        }
    }
    if let Some(a) = run.accept_probability() {
        eprintln!("accept probability {a}");
    }
    Ok(true)
}

fn adv_ratio(file: &Path, file2: Option<&Path>, witness: WitnessArg, p: usize, dump: Option<&Path>) -> Result<bool> {
    let f = load(file)?;
    if file2.is_some() && !matches!(witness, WitnessArg::Tensor) {
        bail!(usage("--fn2 only applies to --witness tensor"));
    }
    let g: AdversaryMatrix<f64> = match witness {
        WitnessArg::Adjacency => AdversaryMatrix::adjacency(&f)?,
        WitnessArg::Symmetric => symmetric_adversary::<f64>(&f)?.matrix.matrix().clone(),
        WitnessArg::Tensor => {
            let f2 = load(file2.ok_or_else(|| usage("--witness tensor needs --fn2"))?)?;
            tensor_adversary(&AdversaryMatrix::adjacency(&f)?, &AdversaryMatrix::adjacency(&f2)?)?
        }
    };
    if let Some(path) = dump {
        std::fs::write(path, g.to_csv()).with_context(|| format!("writing {}", path.display()))?;
    }
    let r = parallel_adv_ratio(&g, p)?;
    let set: Vec<String> = r.best_set.iter().map(usize::to_string).collect();
    println!("witness lower bound {}", r.ratio);
    println!("norm {}", r.norm);
    println!("max restricted norm {}", r.max_restricted_norm);
    println!("best set {}", set.join(" "));
    println!("sets examined {}{}", r.sets_examined, if r.exhaustive { "" } else { " (sampled, heuristic)" });
    Ok(true)
}

fn adv_barrier(file: &Path, p: usize) -> Result<bool> {
    let f = load(file)?;
    let b = barrier_bound(&f, p)?;
    let c0 = certificate_complexity(&f, Side::Zero)?;
    let c1 = certificate_complexity(&f, Side::One)?;
    println!("C0 {c0}\nC1 {c1}\np {p}\nbarrier {b}");
    Ok(true)
}

fn run_cached(cache: &Cache, id: &str, grid: &Grid, seed: u64) -> Result<SuiteReport> {
    let key = serde_json::to_string(&(id, grid, seed))?;
    if let Some(r) = cache.get::<SuiteReport>("verify", &key) {
        return Ok(r);
    }
    let r = run_suite(id, grid, seed).map_err(verify_err)?;
    cache.put("verify", &key, &r);
    Ok(r)
}

fn emit(reports: &[SuiteReport], out: Option<&Path>, csv: Option<&Path>) -> Result<bool> {
    let lines: String = reports.iter().map(SuiteReport::json_lines).collect();
    write_or_print(out, &lines)?;
    if let Some(path) = csv {
        let mut text = String::from("suite,case,quantity,value\n");
        for r in reports {
            text.extend(r.csv_for_plot().lines().skip(1).map(|l| format!("{l}\n")));
        }
        std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    }
    eprint!("{}", summary_table(reports));
    Ok(reports.iter().all(SuiteReport::passed))
}

fn verify(args: VerifyArgs, seed: u64) -> Result<bool> {
    let ex = extract(&args.grid, &["--out", "--csv-for-plot", "--seed", "--threads"], &[])?;
    let seed = seed_from(&ex, seed)?;
    let out = args.out.or_else(|| ex.values.get("--out").map(PathBuf::from));
    let csv = args.csv_for_plot.or_else(|| ex.values.get("--csv-for-plot").map(PathBuf::from));
    let grid = Grid::from_args(&ex.rest).map_err(verify_err)?;
    let cache = Cache::from_env();
    let ids: Vec<&str> = match args.suite.as_str() {
        "list" => {
            for (id, what) in SUITES {
                println!("{id:<18} {what}");
            }
            return Ok(true);
        }
        "all" => {
            if !grid.0.is_empty() {
                bail!(usage("`verify all` runs default grids and takes no parameters"));
            }
            SUITES.iter().map(|(id, _)| *id).collect()
        }
        id => vec![id],
    };
    let reports = ids.iter().map(|id| run_cached(&cache, id, &grid, seed)).collect::<Result<Vec<_>>>()?;
    emit(&reports, out.as_deref(), csv.as_deref())
}

fn report_merge(files: &[PathBuf], out: Option<&Path>) -> Result<bool> {
    let mut text = String::new();
    for path in files {
        text += &std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        text.push('\n');
    }
    let reports = merge_records(&text).map_err(|e| anyhow!("malformed report line: {e}"))?;
    emit(&reports, out, None)
}

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use charon_lite::driver::translate;
use charon_lite::frontend::{parse_crate, pretty_print};
use charon_lite::interp::{Interpreter, Value, DEFAULT_FUEL};
use charon_lite::ir::{Body, Diagnostic, ScalarValue, Span, TranslatedCrate, Ty};
use charon_lite::passes::{PassConfig, DEFAULT_PANIC_FNS};
use charon_lite::serialize::{from_json, to_json, BodyKind};
use charon_lite::taint::{analyze_crate, TaintConfig};

#[derive(Parser)]
#[command(name = "charon-lite", version, about = "Translate MIR-lite programs to ULLBC/LLBC")]
#[command(args_conflicts_with_subcommands = true)]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,
    #[command(flatten)]
    translate: TranslateArgs,
}

#[derive(Subcommand)]
enum Command {
    /// Run a function on both the unstructured and the structured body.
    Interp(InterpArgs),
}

#[derive(Args)]
struct PipelineArgs {
    /// Skip a cleanup pass (repeatable).
    #[arg(long = "no-pass", value_enum)]
    no_pass: Vec<PassName>,
    /// Function treated as a panic (repeatable; replaces the defaults).
    #[arg(long = "panic-fn", value_name = "PATH")]
    panic_fn: Vec<String>,
}

#[derive(Args)]
struct TranslateArgs {
    /// `.mirl` files making up one crate, or a single `.json` file to load.
    inputs: Vec<PathBuf>,
    /// Output path without extension; defaults to the first input's stem.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Stop before restructuring and write ULLBC.
    #[arg(long)]
    ullbc: bool,
    #[command(flatten)]
    pipeline: PipelineArgs,
    /// Pretty-print the final IR to stdout.
    #[arg(long)]
    print: bool,
    #[arg(long, value_enum)]
    analyze: Option<Analysis>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Ignore unknown fields when loading JSON.
    #[arg(long)]
    lenient: bool,
}

#[derive(Args)]
struct InterpArgs {
    input: PathBuf,
    function: String,
    /// Integer or boolean arguments.
    #[arg(allow_negative_numbers = true)]
    args: Vec<String>,
    #[arg(long, default_value_t = DEFAULT_FUEL)]
    fuel: u64,
    #[command(flatten)]
    pipeline: PipelineArgs,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PassName {
    Panics,
    CheckedArith,
    MatchReconstruction,
    Constants,
    DeclGroups,
}

#[derive(Clone, Copy, ValueEnum)]
enum Analysis {
    Taint,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

/// Exit statuses: translated cleanly, translated with diagnostics, fatal.
const OK: u8 = 0;
const DIAGNOSTICS: u8 = 1;
const FATAL: u8 = 2;

struct Fatal(String);

impl PipelineArgs {
    fn config(&self) -> PassConfig {
        let on = |p| !self.no_pass.contains(&p);
        let mut c = PassConfig {
            unify_panics: on(PassName::Panics),
            fuse_checked_arith: on(PassName::CheckedArith),
            reconstruct_matches: on(PassName::MatchReconstruction),
            decode_constants: on(PassName::Constants),
            compute_decl_groups: on(PassName::DeclGroups),
            ..PassConfig::default()
        };
        if !self.panic_fn.is_empty() {
            c.panic_fns = self.panic_fn.clone();
        }
        c
    }

    fn panic_fns(&self) -> Vec<String> {
        if self.panic_fn.is_empty() {
            DEFAULT_PANIC_FNS.iter().map(|s| s.to_string()).collect()
        } else {
            self.panic_fn.clone()
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.command {
        Some(Command::Interp(a)) => interp(&a),
        None => run(&cli.translate),
    };
    ExitCode::from(res.unwrap_or_else(|Fatal(msg)| {
        eprintln!("fatal: {msg}");
        FATAL
    }))
}

fn location(krate: &TranslatedCrate, s: &Span) -> String {
    let file = krate.files.get(s.file_id).map(|f| f.name.as_str()).unwrap_or("?");
    format!("{file}:{}:{}", s.start_line, s.start_col)
}

fn report(krate: &TranslatedCrate, d: &Diagnostic) {
    let sev = if d.is_error() { "error" } else { "warning" };
    let at = d.span.map(|s| format!("{}: ", location(krate, &s))).unwrap_or_default();
    let item = d.item.as_ref().map(|i| format!(" (in `{i}`)")).unwrap_or_default();
    eprintln!("{at}{sev}[{}]: {}{item}", d.code, d.message);
}

fn read(path: &Path) -> Result<String, Fatal> {
    std::fs::read_to_string(path).map_err(|e| Fatal(format!("cannot read {}: {e}", path.display())))
}

fn parse(paths: &[PathBuf]) -> Result<TranslatedCrate, Fatal> {
    let files = paths
        .iter()
        .map(|p| Ok((p.display().to_string(), read(p)?)))
        .collect::<Result<Vec<_>, Fatal>>()?;
    parse_crate(&files).map_err(|e| Fatal(e.to_string()))
}

fn run(args: &TranslateArgs) -> Result<u8, Fatal> {
    let Some(first) = args.inputs.first() else {
        return Err(Fatal("no input files".into()));
    };
    let target = if args.ullbc { BodyKind::Ullbc } else { BodyKind::Llbc };
    let loaded = first.extension().is_some_and(|e| e == "json");
    let (krate, diags, target) = if loaded {
        if args.inputs.len() > 1 {
            return Err(Fatal("a JSON input must be the only input".into()));
        }
        let bytes = std::fs::read(first).map_err(|e| Fatal(format!("cannot read {}: {e}", first.display())))?;
        let (kind, krate) = from_json(&bytes, args.lenient).map_err(|e| Fatal(format!("{}: {e}", first.display())))?;
        (krate, Vec::new(), kind)
    } else {
        let krate = parse(&args.inputs)?;
        let (krate, diags) = translate(krate, &args.pipeline.config(), target);
        (krate, diags, target)
    };
    for d in &diags {
        report(&krate, d);
    }
    let mut status = if diags.is_empty() { OK } else { DIAGNOSTICS };
    if !loaded || args.output.is_some() {
        let base = args.output.clone().unwrap_or_else(|| first.with_extension(""));
        let mut name = base.into_os_string();
        name.push(format!(".{}", target.extension()));
        let path = PathBuf::from(name);
        std::fs::write(&path, to_json(&krate, target))
            .map_err(|e| Fatal(format!("cannot write {}: {e}", path.display())))?;
    }
    if args.print {
        print!("{}", pretty_print(&krate));
    }
    if let Some(Analysis::Taint) = args.analyze {
        if target != BodyKind::Llbc {
            return Err(Fatal("taint analysis needs LLBC; drop --ullbc".into()));
        }
        let r = analyze_crate(&krate, &TaintConfig::default());
        match args.format {
            Format::Text => print!("{}", r.to_text()),
            Format::Json => print!("{}", r.to_json()),
        }
        if !r.is_clean() {
            status = DIAGNOSTICS;
        }
    }
    Ok(status)
}

fn parse_value(text: &str, ty: &Ty) -> Option<Value> {
    match ty {
        Ty::Bool => text.parse().ok().map(Value::Bool),
        Ty::Scalar(k) => ScalarValue::new(*k, text.parse().ok()?).ok().map(Value::Scalar),
        _ => None,
    }
}

fn interp(args: &InterpArgs) -> Result<u8, Fatal> {
    let krate = parse(std::slice::from_ref(&args.input))?;
    let config = args.pipeline.config();
    let (ullbc, mut diags) = translate(krate, &config, BodyKind::Ullbc);
    let (llbc, d) = charon_lite::cfg::restructure_crate(ullbc.clone());
    diags.extend(d);
    for d in &diags {
        report(&llbc, d);
    }
    let Some(f) = ullbc.fun_by_name(&args.function) else {
        return Err(Fatal(format!("no function `{}`", args.function)));
    };
    let inputs = &f.signature.inputs;
    if inputs.len() != args.args.len() {
        return Err(Fatal(format!("`{}` takes {} argument(s)", args.function, inputs.len())));
    }
    let values = args
        .args
        .iter()
        .zip(inputs)
        .map(|(a, ty)| parse_value(a, ty).ok_or_else(|| Fatal(format!("cannot read `{a}` as an argument"))))
        .collect::<Result<Vec<_>, Fatal>>()?;
    let run = |k: &TranslatedCrate| -> String {
        let mut i = Interpreter::new(k).with_fuel(args.fuel).with_panic_fns(args.pipeline.panic_fns());
        match i.run_fun(f.id, values.clone()) {
            Ok(o) => o.to_string(),
            Err(e) => format!("error: {e}"),
        }
    };
    let a = run(&ullbc);
    println!("ullbc: {a}");
    if matches!(llbc.fun_decls[f.id].body, Body::Llbc(_)) {
        let b = run(&llbc);
        println!("llbc:  {b}");
        if a != b {
            return Ok(DIAGNOSTICS);
        }
    }
    Ok(if diags.is_empty() { OK } else { DIAGNOSTICS })
}

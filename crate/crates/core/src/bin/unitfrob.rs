use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rayon::prelude::*;
use unitfrob::cli::{builtin, describe_error, run_case, CaseFile, Report, RunOptions};
use unitfrob::{Error, Result};

#[derive(Parser)]
#[command(name = "unitfrob", version, about = "Unit Frobenius modules on P^1: minimal roots and mod-p Euler characteristics")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a case file or a built-in case (example:shriek, example:quad-cover,
    /// example:elliptic(f,p), random:direct-sum).
    Run(RunArgs),
}

#[derive(clap::Args)]
struct RunArgs {
    /// Case file path or built-in name.
    case: Option<String>,
    #[arg(long)]
    p: Option<u64>,
    #[arg(long)]
    r: Option<u32>,
    #[arg(long)]
    precision: Option<i64>,
    #[arg(long = "field-ext")]
    field_ext: Option<u32>,
    /// Cross-check against the oracles; a mismatch exits with code 2.
    #[arg(long)]
    oracle: bool,
    /// Write the JSON report here (`-` for standard output).
    #[arg(long)]
    json: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Run every `*.json` case in a directory; reports go next to the cases.
    #[arg(long)]
    batch: Option<PathBuf>,
}

fn load(name: &str, args: &RunArgs) -> Result<CaseFile> {
    let mut case = match builtin(name, args.p, args.seed)? {
        Some(c) => c,
        None => {
            let src = std::fs::read_to_string(name)
                .map_err(|e| Error::Schema(format!("cannot read case file {name}: {e}")))?;
            let mut c = CaseFile::from_json(&src)?;
            if let Some(p) = args.p {
                c.p = p;
            }
            c
        }
    };
    if let Some(r) = args.r {
        case.r = r;
    }
    Ok(case)
}

fn options(args: &RunArgs) -> RunOptions {
    RunOptions { oracle: args.oracle, precision: args.precision, field_ext: args.field_ext, seed: args.seed }
}

fn case_name(name: &str) -> String {
    match Path::new(name).file_stem() {
        Some(s) if name.ends_with(".json") => s.to_string_lossy().into_owned(),
        _ => name.to_string(),
    }
}

fn run_one(name: &str, args: &RunArgs) -> Result<Report> {
    let case = load(name, args)?;
    run_case(&case_name(name), &case, &options(args))
}

fn run_batch(dir: &Path, args: &RunArgs) -> Result<i32> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| Error::Schema(format!("cannot read {}: {e}", dir.display())))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            let s = p.to_string_lossy();
            s.ends_with(".json") && !s.ends_with(".report.json")
        })
        .collect();
    files.sort();
    let results: Vec<(PathBuf, Result<Report>)> = files
        .par_iter()
        .map(|f| {
            let r = run_one(&f.to_string_lossy(), args);
            if let Ok(rep) = &r {
                let out = f.with_extension("report.json");
                if let Err(e) = std::fs::write(&out, rep.to_json()) {
                    return (f.clone(), Err(Error::Schema(format!("cannot write {}: {e}", out.display()))));
                }
            }
            (f.clone(), r)
        })
        .collect();
    let mut code = 0;
    let (mut global, mut equal) = (0, 0);
    for (f, r) in &results {
        match r {
            Ok(rep) => {
                if let Report::Global(g) = rep {
                    global += 1;
                    equal += g.cohom.equality as usize;
                }
                println!("ok    {}", f.display());
            }
            Err(e) => {
                println!("FAIL  {}  {}", f.display(), describe_error(e));
                code = code.max(e.exit_code());
            }
        }
    }
    println!("{} cases; equality chi = bound in {equal} of {global} global cases", results.len());
    Ok(code)
}

fn main() -> ExitCode {
    env_logger::init();
    let Cmd::Run(args) = Cli::parse().cmd;
    let outcome = if let Some(dir) = &args.batch {
        run_batch(dir, &args)
    } else {
        match &args.case {
            None => Err(Error::Schema("no case given".into())),
            Some(name) => run_one(name, &args).and_then(|rep| {
                match &args.json {
                    Some(p) if p.as_os_str() == "-" => print!("{}", rep.to_json()),
                    Some(p) => {
                        std::fs::write(p, rep.to_json())
                            .map_err(|e| Error::Schema(format!("cannot write {}: {e}", p.display())))?;
                        print!("{}", rep.table());
                    }
                    None => print!("{}", rep.table()),
                }
                Ok(0)
            }),
        }
    };
    match outcome {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("{}", describe_error(&e));
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

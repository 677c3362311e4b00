use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use pbcnf_cli::run::{encoder_by_name, parse_tag_binding, translate, EncoderSpec, OutputKind};

/// Translate pseudo-Boolean constraints (OPB) into CNF (DIMACS) or
/// normalized OPB.
#[derive(Parser)]
#[command(name = "pbcnf", version)]
struct Args {
    /// OPB input file; standard input when omitted.
    #[arg(long, value_name = "PATH")]
    input: Option<PathBuf>,

    /// Output format.
    #[arg(long, value_enum, default_value_t = OutputKindArg::Dimacs)]
    output_kind: OutputKindArg,

    /// Encoder for every constraint: direct, bdd, adder, watchdog,
    /// bargraph (DIMACS) or pb (OPB).
    #[arg(long, value_name = "NAME", conflicts_with = "tag")]
    encoder: Option<String>,

    /// Per-constraint binding `<n>=<name>[,<name>...]`; constraint n is
    /// the n-th constraint of the file. May be repeated.
    #[arg(long, value_name = "N=NAMES")]
    tag: Vec<String>,

    /// Print per-constraint translation statistics on standard error.
    #[arg(long)]
    stats: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputKindArg {
    Dimacs,
    Opb,
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::FAILURE
        }
    }
}

fn run(args: &Args) -> Result<ExitCode, String> {
    let encoders = if let Some(name) = &args.encoder {
        EncoderSpec::Default(encoder_by_name(name).map_err(|e| e.to_string())?)
    } else if !args.tag.is_empty() {
        let bindings = args
            .tag
            .iter()
            .map(|t| parse_tag_binding(t))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| e.to_string())?;
        EncoderSpec::PerTag(bindings)
    } else {
        return Err("either --encoder or --tag is required".into());
    };

    let text = match &args.input {
        Some(path) => std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read {}: {e}", path.display()))?,
        None => {
            let mut buf = String::new();
            std::io::stdin()
                .read_to_string(&mut buf)
                .map_err(|e| format!("cannot read standard input: {e}"))?;
            buf
        }
    };

    let doc = pbcnf_cli::opb::parse_opb(&text).map_err(|e| e.to_string())?;
    let output_kind = match args.output_kind {
        OutputKindArg::Dimacs => OutputKind::Dimacs,
        OutputKindArg::Opb => OutputKind::Opb,
    };
    let result = translate(&doc, output_kind, &encoders, args.stats).map_err(|e| e.to_string())?;

    print!("{}", result.text);
    if let Some(stats) = &result.stats {
        eprint!("{stats}");
    }
    if result.unsat_detected {
        eprintln!("pbcnf: an input constraint is unsatisfiable; the output formula has no model");
        return Ok(ExitCode::from(2));
    }
    Ok(ExitCode::SUCCESS)
}

//! `hft`: exact harmonic function theory computations from the command line.

mod command;
mod output;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use hft_core::HftError;
use serde_json::json;

use command::{execute, Command, VERBS};
use output::{render, Format};

#[derive(Debug, Parser)]
#[command(
    name = "hft",
    version,
    about = "Exact computer algebra for harmonic functions",
    after_help = "Usage: hft [FLAGS] VERB [PAYLOAD] [key=value ...]\n\
                  Verbs: laplacian gradient partial normal-d divergence jacobian homogeneous taylor\n\
                  harmonic-conjugate volume surface-area integrate-sphere integrate-ball\n\
                  integrate-ellipsoid-area integrate-ellipsoid-volume dim-harmonic decompose basis-h\n\
                  zonal dirichlet anti-laplacian neumann exterior-neumann bi-dirichlet poisson-kernel\n\
                  poisson-kernel-h bergman-kernel bergman-kernel-h bergman-projection kelvin kelvin-h\n\
                  reflect phi eval approx\n\
                  Exit codes: 0 ok, 2 parse/usage, 3 unsupported input, 4 solvability, 5 infeasible, 6 internal."
)]
struct Cli {
    /// Dimension of the ambient space.
    #[arg(long)]
    dim: Option<usize>,
    /// Coordinate names (comma separated), or a single vector name such as `z`.
    #[arg(long, value_delimiter = ',')]
    vars: Option<Vec<String>>,
    /// Extra symbolic parameters.
    #[arg(long, value_delimiter = ',')]
    params: Vec<String>,
    /// Additional n-vectors usable in norm(), norm2() and dot().
    #[arg(long, value_delimiter = ',')]
    vectors: Vec<String>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Write the result here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Significant digits for `approx`.
    #[arg(long, default_value_t = 20)]
    digits: usize,
    /// Report elapsed time on stderr.
    #[arg(long)]
    timing: bool,
    /// Run one command per line of FILE and emit a JSON array.
    #[arg(long, value_name = "FILE", conflicts_with = "args")]
    batch: Option<PathBuf>,
    /// VERB [PAYLOAD] [key=value ...]
    #[arg(num_args = 0..)]
    args: Vec<String>,
}

impl Cli {
    fn command(&self) -> Result<Command, HftError> {
        let mut cmd = Command::from_args(&self.args)?;
        cmd.dim = self.dim;
        cmd.vars = self.vars.clone();
        cmd.params = self.params.clone();
        cmd.vectors = self.vectors.clone();
        cmd.digits = self.digits;
        Ok(cmd)
    }
}

const VALUE_FLAGS: &[&str] = &["--dim", "--vars", "--params", "--vectors", "--format", "--out", "--digits", "--batch"];
const SWITCHES: &[&str] = &["--timing", "--help", "-h", "--version", "-V"];

/// Moves known flags ahead of `--` so they may appear anywhere, while payloads
/// such as `-x1^2` stay positional.
fn normalize(argv: impl IntoIterator<Item = String>) -> Vec<String> {
    let mut it = argv.into_iter();
    let mut flags: Vec<String> = it.next().into_iter().collect();
    let mut rest = Vec::new();
    while let Some(a) = it.next() {
        let name = a.split_once('=').map_or(a.as_str(), |(n, _)| n);
        if a == "--" {
            rest.extend(it.by_ref());
        } else if SWITCHES.contains(&a.as_str()) || (a.contains('=') && VALUE_FLAGS.contains(&name)) {
            flags.push(a);
        } else if VALUE_FLAGS.contains(&a.as_str()) {
            flags.push(a);
            flags.extend(it.next());
        } else {
            rest.push(a);
        }
    }
    flags.push("--".into());
    flags.extend(rest);
    flags
}

/// Whitespace splitting with double-quoted words.
fn split_line(line: &str) -> Result<Vec<String>, HftError> {
    let mut words = Vec::new();
    let mut cur = String::new();
    let (mut quoted, mut started) = (false, false);
    for c in line.chars() {
        match c {
            '"' => {
                quoted = !quoted;
                started = true;
            }
            c if c.is_whitespace() && !quoted => {
                if started {
                    words.push(std::mem::take(&mut cur));
                    started = false;
                }
            }
            c => {
                cur.push(c);
                started = true;
            }
        }
    }
    if quoted {
        return Err(HftError::InvalidArgument("unterminated quote".into()));
    }
    if started {
        words.push(cur);
    }
    Ok(words)
}

fn run_line(line: &str, timing: bool) -> (serde_json::Value, i32) {
    let start = Instant::now();
    let parsed = split_line(line).and_then(|words| {
        let argv = normalize(std::iter::once("hft".to_string()).chain(words));
        let cli = Cli::try_parse_from(argv).map_err(|e| {
            HftError::InvalidArgument(
                e.to_string().lines().next().unwrap_or_default().trim_start_matches("error: ").to_string(),
            )
        })?;
        if cli.batch.is_some() {
            return Err(HftError::InvalidArgument("nested --batch".into()));
        }
        Ok(cli)
    });
    let outcome = parsed.and_then(|cli| Ok((cli.command().and_then(|c| execute(&c))?, cli.format)));
    let mut entry = match &outcome {
        Ok((v, format)) => {
            json!({ "command": line, "ok": true, "result": output::json(v), "text": render(v, *format) })
        }
        Err(e) => json!({ "command": line, "ok": false, "exitCode": e.exit_code(), "error": e.to_string() }),
    };
    if timing {
        entry["millis"] = json!(start.elapsed().as_millis() as u64);
    }
    (entry, outcome.as_ref().err().map_or(0, |e| e.exit_code()))
}

fn batch(path: &PathBuf, timing: bool) -> Result<(String, i32), HftError> {
    let src = std::fs::read_to_string(path)
        .map_err(|e| HftError::InvalidArgument(format!("cannot read {}: {e}", path.display())))?;
    let lines: Vec<&str> = src.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')).collect();
    let mut results = vec![(serde_json::Value::Null, 0); lines.len()];
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get()).min(lines.len().max(1));
    std::thread::scope(|s| {
        for (w, chunk) in results.chunks_mut(lines.len().div_ceil(workers).max(1)).enumerate() {
            let base = w * lines.len().div_ceil(workers).max(1);
            let lines = &lines;
            s.spawn(move || {
                for (i, slot) in chunk.iter_mut().enumerate() {
                    *slot = run_line(lines[base + i], timing);
                }
            });
        }
    });
    let code = results.iter().map(|(_, c)| *c).find(|c| *c != 0).unwrap_or(0);
    let array: Vec<_> = results.into_iter().map(|(v, _)| v).collect();
    Ok((serde_json::to_string_pretty(&array).expect("json values serialize"), code))
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<(), HftError> {
    let io = |e: std::io::Error| HftError::InvalidArgument(format!("cannot write output: {e}"));
    match out {
        Some(path) => std::fs::write(path, format!("{text}\n")).map_err(io),
        None => writeln!(std::io::stdout().lock(), "{text}").map_err(io),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse_from(normalize(std::env::args()));
    let start = Instant::now();
    let result = match &cli.batch {
        Some(path) => batch(path, cli.timing),
        None if cli.args.is_empty() => {
            Err(HftError::InvalidArgument(format!("missing verb; one of {}", VERBS.join(", "))))
        }
        None => cli.command().and_then(|c| execute(&c)).map(|v| (render(&v, cli.format), 0)),
    };
    let code = match result.and_then(|(text, code)| emit(&text, cli.out.as_ref()).map(|_| code)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    if cli.timing {
        eprintln!("elapsed: {:.3} s", start.elapsed().as_secs_f64());
    }
    ExitCode::from(code as u8)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn words(s: &[&str]) -> Vec<String> {
        s.iter().map(|w| w.to_string()).collect()
    }

    #[test]
    fn flags_move_ahead_of_positionals() {
        let got = normalize(words(&["hft", "laplacian", "-x1^2", "--dim", "3", "--timing", "--format=json"]));
        assert_eq!(got, words(&["hft", "--dim", "3", "--timing", "--format=json", "--", "laplacian", "-x1^2"]));
    }

    #[test]
    fn quoted_words_keep_spaces() {
        assert_eq!(
            split_line(r#"--dim 3 laplacian "x1 + x2"  power=2"#).unwrap(),
            words(&["--dim", "3", "laplacian", "x1 + x2", "power=2"])
        );
        assert!(split_line("laplacian \"x1").is_err());
    }

    #[test]
    fn internal_failures_exit_with_six() {
        assert_eq!(HftError::Internal("broken".into()).exit_code(), 6);
        let (entry, code) = run_line("--dim 2 gradient", false);
        assert_eq!(code, 2);
        assert_eq!(entry["ok"], false);
    }
}

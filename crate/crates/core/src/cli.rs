//! Command-line front end.

use std::ffi::OsString;
use std::fs;
use std::io::{IsTerminal, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::diagnostics::Diagnostic;
use crate::model::Schema;
use crate::reason::{self, Answer, Bounds};
use crate::semantics::{self, FutureWindow, PastTrigger, SemanticsOptions, TemporalState, TimeFlow};
use crate::text::{self, KeywordStyle};
use crate::{dlr, render, verbal};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FOUND: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "trend",
    version,
    about = "Temporal conceptual data models: check, translate, reason, render"
)]
struct Cli {
    /// Emit machine-readable JSON.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse and validate a schema.
    Check { file: PathBuf },
    /// Check a database state against a schema.
    StateCheck {
        file: PathBuf,
        state: PathBuf,
        #[command(flatten)]
        sem: SemArgs,
    },
    /// Translate a schema to DLR_US axioms.
    ToDlr {
        file: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        sem: SemArgs,
    },
    /// Describe a schema in controlled English.
    Verbalize {
        file: PathBuf,
        #[arg(long, value_parser = parse_style, default_value = "chg-ext")]
        style: KeywordStyle,
    },
    /// Draw a schema as a DOT graph.
    Render {
        file: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long, value_parser = parse_style, default_value = "chg-ext")]
        labels: KeywordStyle,
        /// Text markers instead of pictographs.
        #[arg(long)]
        ascii: bool,
    },
    /// Search for a legal state populating an element.
    Sat {
        file: PathBuf,
        #[arg(long)]
        element: String,
        #[command(flatten)]
        bounds: BoundArgs,
        #[command(flatten)]
        sem: SemArgs,
    },
    /// Check that one element is contained in another in every legal state.
    Subsume {
        file: PathBuf,
        #[arg(long)]
        sub: String,
        #[arg(long)]
        sup: String,
        #[command(flatten)]
        bounds: BoundArgs,
        #[command(flatten)]
        sem: SemArgs,
    },
    /// Check that every legal state satisfies a further constraint.
    Implies {
        file: PathBuf,
        #[arg(long)]
        constraint: String,
        #[command(flatten)]
        bounds: BoundArgs,
        #[command(flatten)]
        sem: SemArgs,
    },
    /// Print a schema in canonical form.
    Fmt {
        file: PathBuf,
        #[arg(long, value_parser = parse_style, default_value = "chg-ext")]
        style: KeywordStyle,
    },
}

#[derive(Debug, Args)]
struct BoundArgs {
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u32).range(1..))]
    max_objects: u32,
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(1..))]
    max_horizon: u32,
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u32).range(1..))]
    max_values: u32,
}

impl BoundArgs {
    fn bounds(&self) -> Bounds {
        Bounds {
            max_objects: self.max_objects as usize,
            max_horizon: self.max_horizon,
            max_values: self.max_values as usize,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Flow {
    Naturals,
    Integers,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Window {
    Reflexive,
    Strict,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Trigger {
    Target,
    Source,
}

#[derive(Debug, Args)]
struct SemArgs {
    /// Time before the first observed point.
    #[arg(long, value_enum, default_value = "naturals")]
    time_flow: Flow,
    /// Whether a mandatory future transition may start at the trigger point.
    #[arg(long, value_enum, default_value = "reflexive")]
    future_window: Window,
    /// Which end of a mandatory past transition carries the obligation.
    #[arg(long, value_enum, default_value = "target")]
    past_trigger: Trigger,
}

impl SemArgs {
    fn options(&self) -> SemanticsOptions {
        SemanticsOptions {
            flow: match self.time_flow {
                Flow::Naturals => TimeFlow::Naturals,
                Flow::Integers => TimeFlow::Integers,
            },
            future_window: match self.future_window {
                Window::Reflexive => FutureWindow::Reflexive,
                Window::Strict => FutureWindow::Strict,
            },
            past_trigger: match self.past_trigger {
                Trigger::Target => PastTrigger::Target,
                Trigger::Source => PastTrigger::Source,
            },
        }
    }
}

fn parse_style(s: &str) -> Result<KeywordStyle, String> {
    s.parse::<KeywordStyle>().map_err(|_| format!("expected chg-ext or dev-dex, found {s}"))
}

/// Whether to colour output, from `TREND_COLOR` (auto, always, never).
fn use_color() -> bool {
    match std::env::var("TREND_COLOR").as_deref() {
        Ok("always") => true,
        Ok("never") => false,
        _ => std::io::stdout().is_terminal(),
    }
}

struct Ctx<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
    json: bool,
    color: bool,
}

/// Failure that ends a command with exit status 2.
struct Fatal(String);

impl<E: std::fmt::Display> From<E> for Fatal {
    fn from(e: E) -> Self {
        Fatal(e.to_string())
    }
}

type CmdResult = Result<i32, Fatal>;

impl Ctx<'_> {
    fn diagnostic_line(&self, file: &Path, d: &Diagnostic) -> String {
        let sev = if d.is_error() { "error" } else { "warning" };
        let sev = if self.color {
            let code = if d.is_error() { 31 } else { 33 };
            format!("\x1b[1;{code}m{sev}\x1b[0m")
        } else {
            sev.to_string()
        };
        let loc = d.span.map(|s| format!(":{s}")).unwrap_or_default();
        let mut line = format!("{}{loc}: {sev}[{}]: {}", file.display(), d.rule, d.message);
        if let Some(t) = d.time {
            line.push_str(&format!(" (t={t})"));
        }
        line
    }

    fn report(&mut self, file: &Path, diags: &[Diagnostic]) -> std::io::Result<()> {
        if self.json {
            writeln!(self.out, "{}", serde_json::to_string_pretty(diags).expect("diagnostics serialize"))
        } else {
            for d in diags {
                let line = self.diagnostic_line(file, d);
                writeln!(self.out, "{line}")?;
            }
            Ok(())
        }
    }

    fn load(&mut self, file: &Path) -> Result<Result<Schema, Vec<Diagnostic>>, Fatal> {
        let src = fs::read_to_string(file).map_err(|e| Fatal(format!("{}: {e}", file.display())))?;
        Ok(text::parse_schema(&src))
    }

    /// Loads a schema that later steps depend on; an invalid schema is an
    /// input error.
    fn schema(&mut self, file: &Path) -> Result<Schema, Fatal> {
        match self.load(file)? {
            Ok(s) => Ok(s),
            Err(diags) => {
                for d in &diags {
                    let line = self.diagnostic_line(file, d);
                    writeln!(self.err, "{line}")?;
                }
                Err(Fatal(format!("{}: invalid schema", file.display())))
            }
        }
    }

    fn emit(&mut self, output: Option<&Path>, text: &str) -> CmdResult {
        match output {
            Some(p) => fs::write(p, text).map_err(|e| Fatal(format!("{}: {e}", p.display())))?,
            None => self.out.write_all(text.as_bytes())?,
        }
        Ok(EXIT_OK)
    }

    fn answer(&mut self, a: &Answer, bounds: Bounds, what: &str) -> CmdResult {
        if self.json {
            writeln!(self.out, "{}", serde_json::to_string_pretty(&a.to_json())?)?;
        } else {
            match (a.label, a.verdict.witness()) {
                ("satisfiable", Some(w)) => {
                    writeln!(self.out, "satisfiable: {what}")?;
                    writeln!(self.out, "{}", w.to_json())?;
                }
                (_, Some(w)) => {
                    writeln!(self.out, "counterexample: {what}")?;
                    for v in &a.violations {
                        writeln!(self.out, "violated {v}")?;
                    }
                    writeln!(self.out, "{}", w.to_json())?;
                }
                ("unsatisfiable", None) => writeln!(self.out, "no witness up to bounds ({bounds})")?,
                _ => writeln!(self.out, "holds up to bounds ({bounds}): {what}")?,
            }
        }
        Ok(if matches!(a.label, "satisfiable" | "holds") { EXIT_OK } else { EXIT_FOUND })
    }

    fn exec(&mut self, cmd: Command) -> CmdResult {
        match cmd {
            Command::Check { file } => match self.load(&file)? {
                Ok(_) => {
                    if self.json {
                        writeln!(self.out, "[]")?;
                    }
                    Ok(EXIT_OK)
                }
                Err(diags) => {
                    self.report(&file, &diags)?;
                    Ok(EXIT_FOUND)
                }
            },
            Command::StateCheck { file, state, sem } => {
                let schema = self.schema(&file)?;
                let text =
                    fs::read_to_string(&state).map_err(|e| Fatal(format!("{}: {e}", state.display())))?;
                let st = TemporalState::from_json(&text)?;
                let violations = semantics::check_state_with(&schema, &st, &sem.options())?;
                if self.json {
                    writeln!(self.out, "{}", serde_json::to_string_pretty(&violations)?)?;
                } else {
                    for v in &violations {
                        writeln!(self.out, "{v}")?;
                    }
                }
                Ok(if violations.is_empty() { EXIT_OK } else { EXIT_FOUND })
            }
            Command::ToDlr { file, output, sem } => {
                let schema = self.schema(&file)?;
                let kb = dlr::translate_with(&schema, &sem.options());
                self.emit(output.as_deref(), &kb.to_string())
            }
            Command::Verbalize { file, style } => {
                let schema = self.schema(&file)?;
                let lines = verbal::verbalize(&schema, style);
                if self.json {
                    writeln!(self.out, "{}", serde_json::to_string_pretty(&lines)?)?;
                } else {
                    for l in lines {
                        writeln!(self.out, "{l}")?;
                    }
                }
                Ok(EXIT_OK)
            }
            Command::Render { file, output, labels, ascii } => {
                let schema = self.schema(&file)?;
                let dot = render::to_dot(&schema, &render::RenderOptions { labels, ascii });
                self.emit(output.as_deref(), &dot)
            }
            Command::Sat { file, element, bounds, sem } => {
                let schema = self.schema(&file)?;
                let b = bounds.bounds();
                let a = reason::satisfiable(&schema, &element, b, &sem.options())?;
                self.answer(&a, b, &element)
            }
            Command::Subsume { file, sub, sup, bounds, sem } => {
                let schema = self.schema(&file)?;
                let b = bounds.bounds();
                let a = reason::subsumes(&schema, &sub, &sup, b, &sem.options())?;
                self.answer(&a, b, &format!("{sub} isa {sup}"))
            }
            Command::Implies { file, constraint, bounds, sem } => {
                let schema = self.schema(&file)?;
                let decl = match text::parse_statement(&constraint) {
                    Ok(d) => d,
                    Err(diags) => {
                        let msgs: Vec<String> = diags.iter().map(|d| d.message.clone()).collect();
                        return Err(Fatal(format!("invalid constraint: {}", msgs.join("; "))));
                    }
                };
                let b = bounds.bounds();
                let a = reason::implies(&schema, &decl, b, &sem.options())?;
                self.answer(&a, b, constraint.trim())
            }
            Command::Fmt { file, style } => {
                let schema = self.schema(&file)?;
                self.emit(None, &text::serialize_with(&schema, style))
            }
        }
    }
}

/// Runs the command line `args` (including the program name), writing to
/// the given streams; returns the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(rendered.as_bytes())
            } else {
                out.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    let mut ctx = Ctx { out, err, json: cli.json, color: use_color() };
    match ctx.exec(cli.command) {
        Ok(code) => code,
        Err(Fatal(msg)) => {
            let _ = writeln!(ctx.err, "error: {msg}");
            EXIT_USAGE
        }
    }
}

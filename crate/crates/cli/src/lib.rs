pub mod input;
pub mod report;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use goeritz_core::diagram;
use goeritz_core::equivariance;
use goeritz_core::lattice::{self, DEFAULT_BUDGET};
use goeritz_core::obstruction::{self, ClassVerdict};
use goeritz_core::{family, Error, SearchLimits};

use input::{InputError, Preset, Source};
use report::{ActionOutput, EmbedOutput, EquivariantOutput, GoeritzOutput, IncompleteOutput, Output};

#[derive(Parser, Debug)]
#[command(name = "goeritz", version, about = "Goeritz lattices and equivariant genus obstructions")]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Subcommand, Debug)]
enum Verb {
    /// Print the pre-Goeritz and Goeritz matrices of a diagram.
    Goeritz(Common),
    /// Enumerate embeddings into the standard lattice up to signed permutation.
    Embed(Common),
    /// Test every embedding class for an equivariant structure.
    Equivariant(Common),
    /// Lower bound for the equivariant non-orientable 4-genus.
    Obstruct(Common),
    /// Certificate and closed-form embeddings of K_n.
    Family(Common),
}

#[derive(Args, Debug)]
#[command(group = clap::ArgGroup::new("source").required(true).args(["preset", "input"]))]
struct Common {
    /// Built-in input: k_n:N or 12a1019.
    #[arg(long)]
    preset: Option<Preset>,
    /// JSON file: a matrix, a diagram or a certificate.
    #[arg(long, value_name = "FILE")]
    input: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    corank: usize,
    /// Sign of the target form.
    #[arg(long, value_enum, default_value = "-", allow_hyphen_values = true)]
    sign: SignArg,
    /// Search node budget.
    #[arg(long, env = "GO_BUDGET", default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    /// Worker threads (default: available processors).
    #[arg(long, env = "GO_JOBS")]
    jobs: Option<usize>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SignArg {
    #[value(name = "+")]
    Plus,
    #[value(name = "-")]
    Minus,
}

impl SignArg {
    fn value(self) -> i8 {
        match self {
            SignArg::Plus => 1,
            SignArg::Minus => -1,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Json,
    Text,
}

enum Failure {
    Input(InputError),
    Incomplete(u64),
}

impl From<InputError> for Failure {
    fn from(e: InputError) -> Self {
        Failure::Input(e)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Incomplete { budget } => Failure::Incomplete(budget),
            e => Failure::Input(e.into()),
        }
    }
}

impl Common {
    fn source(&self) -> Result<Source, InputError> {
        match (&self.preset, &self.input) {
            (Some(p), None) => Source::from_preset(p),
            (None, Some(path)) => Source::from_file(path),
            _ => Err(InputError::new("give exactly one of --preset and --input")),
        }
    }

    fn limits(&self) -> Result<SearchLimits, InputError> {
        if self.budget == 0 {
            return Err(InputError::new("--budget must be positive"));
        }
        let jobs = match self.jobs {
            Some(0) => return Err(InputError::new("--jobs must be positive")),
            Some(j) => j,
            None => SearchLimits::default().jobs,
        };
        Ok(SearchLimits { budget: self.budget, jobs })
    }
}

/// Returns the report and whether it is conclusive.
fn run(verb: &Verb) -> Result<(Output, bool), Failure> {
    match verb {
        Verb::Goeritz(c) => {
            let (name, d, action) = match c.source()? {
                Source::Diagram { diagram, action } => (diagram.label().unwrap_or("diagram").to_string(), diagram, action),
                _ if c.preset.is_some() => {
                    let (d, a) = match c.preset.as_ref().expect("checked") {
                        Preset::Kn(n) => (family::diagram_kn(*n)?, family::region_action_kn(*n).ok()),
                        Preset::Knot12a1019 => (family::diagram_12a1019(), Some(family::action_12a1019())),
                    };
                    (d.label().unwrap_or("diagram").to_string(), d, a)
                }
                _ => return Err(InputError::new("goeritz needs a diagram input").into()),
            };
            let action = action.map(|a| {
                let report = diagram::validate_action(&d, &a);
                let matrix = diagram::induced_action_matrix(&d, &a).ok();
                ActionOutput { matrix, report }
            });
            let out = GoeritzOutput {
                name,
                pre_goeritz: diagram::pre_goeritz(&d)?,
                goeritz: diagram::goeritz(&d)?.matrix().clone(),
                action,
            };
            Ok((Output::Goeritz(out), true))
        }
        Verb::Embed(c) => {
            let src = c.source()?;
            let sign = c.sign.value();
            let l = src.lattice(sign)?;
            let classes = lattice::enumerate_embeddings(&l, c.corank, sign, c.limits()?)?;
            let out = EmbedOutput {
                name: src.name(),
                source: l.matrix().clone(),
                corank: c.corank,
                sign,
                count: classes.len(),
                classes: classes.into_iter().map(|e| e.matrix().clone()).collect(),
            };
            Ok((Output::Embed(out), true))
        }
        Verb::Equivariant(c) => {
            let src = c.source()?;
            let sign = c.sign.value();
            let l = src.lattice(sign)?;
            let f = src.action(sign)?;
            let survey = equivariance::survey_equivariant_embeddings(&l, &f, c.corank, sign, c.limits()?)?;
            let classes: Vec<ClassVerdict> = survey
                .classes
                .into_iter()
                .map(|(embedding, verdict)| ClassVerdict { embedding, verdict })
                .collect();
            let out = EquivariantOutput {
                name: src.name(),
                source: l.matrix().clone(),
                action: f,
                corank: c.corank,
                sign,
                equivariant_count: classes.iter().filter(|c| c.verdict.witness().is_some()).count(),
                classes,
            };
            Ok((Output::Equivariant(out), true))
        }
        Verb::Obstruct(c) => {
            let cert = match c.source()? {
                Source::Certificate(cert) => cert,
                _ => return Err(InputError::new("obstruct needs a certificate input").into()),
            };
            let report = obstruction::gamma4p_lower_bound(&cert, c.limits()?)?;
            let conclusive = report.certifying;
            Ok((Output::Obstruct(Box::new(report)), conclusive))
        }
        Verb::Family(c) => {
            let n = match &c.preset {
                Some(Preset::Kn(n)) => *n,
                _ => return Err(InputError::new("family needs --preset k_n:N").into()),
            };
            Ok((Output::Family(Box::new(family::instance_kn(n)?)), true))
        }
    }
}

fn format_of(verb: &Verb) -> Format {
    match verb {
        Verb::Goeritz(c) | Verb::Embed(c) | Verb::Equivariant(c) | Verb::Obstruct(c) | Verb::Family(c) => c.format,
    }
}

/// Result of one invocation: exit status and captured streams.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Execution {
    pub code: u8,
    pub stdout: String,
    pub stderr: String,
}

fn render(output: &Output, format: Format) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(output).expect("reports serialize") + "\n",
        Format::Text => output.to_text(),
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn execute<I, T>(args: I) -> Execution
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let done = |code, stdout, stderr| Execution { code, stdout, stderr };
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() { done(1, String::new(), text) } else { done(0, text, String::new()) };
        }
    };
    let format = format_of(&cli.verb);
    match run(&cli.verb) {
        Ok((output, conclusive)) => done(if conclusive { 0 } else { 2 }, render(&output, format), String::new()),
        Err(Failure::Incomplete(budget)) => {
            let out = Output::Incomplete(IncompleteOutput { status: "incomplete".into(), budget });
            done(2, render(&out, format), String::new())
        }
        Err(Failure::Input(e)) => done(1, String::new(), format!("error: {}\n", e)),
    }
}

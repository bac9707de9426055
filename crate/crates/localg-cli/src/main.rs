//! `localg`: command-line front end.
//!
//! Exit codes: 0 verdict true / success, 1 verdict false, 2 unknown, 64 usage, 65 malformed
//! or inconsistent input, 66 missing input, 69 unsupported or too large, 73 cannot write output.

mod cmd;
mod fixtures;

pub use cmd::CliResult;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::Value;

pub const EXIT_TRUE: i32 = 0;
pub const EXIT_FALSE: i32 = 1;
pub const EXIT_UNKNOWN: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_DATA: i32 = 65;
pub const EXIT_NOINPUT: i32 = 66;
pub const EXIT_UNAVAILABLE: i32 = 69;
pub const EXIT_CANTCREAT: i32 = 73;

#[derive(Parser, Debug)]
#[command(
    name = "localg",
    version,
    about = "Exact computations with locality vector spaces and locality Hopf algebras"
)]
pub struct Cli {
    #[command(flatten)]
    pub out: OutputOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone, Default)]
pub struct OutputOpts {
    /// Write the JSON result document here.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Write the certificate of a negative verdict here.
    #[arg(long, global = true)]
    pub cert: Option<PathBuf>,
    /// Print the JSON document on stdout instead of the table.
    #[arg(long, global = true)]
    pub json: bool,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Locality spaces: linearity of polars, closure, polar sets.
    #[command(subcommand)]
    Space(SpaceCmd),
    /// Quotient locality by the document's "w", and whether it is a locality relation.
    Quotient { doc: PathBuf },
    /// Locality compatibility of "w".
    Compat { doc: PathBuf },
    /// Strong locality complement of "w".
    Complement { doc: PathBuf },
    #[command(subcommand)]
    Tensor(TensorCmd),
    #[command(subcommand)]
    Lie(LieCmd),
    /// Truncated locality enveloping algebras.
    #[command(subcommand)]
    Uea(UeaCmd),
    /// Grossman-Larson Hopf algebra of properly decorated forests (over Q).
    #[command(subcommand)]
    Gl(GlCmd),
    /// Witness search for the compatibility statements over F_2 / F_3.
    Fuzz(FuzzArgs),
    /// Replay a certificate.
    Certify { file: PathBuf },
    #[command(subcommand)]
    Fixtures(FixturesCmd),
}

#[derive(Subcommand, Debug)]
pub enum SpaceCmd {
    /// Whether every polar set is a subspace.
    Check { doc: PathBuf },
    /// The coarsest locality relation containing the given one.
    Closure { doc: PathBuf },
    /// Polar set of the document's "u" (a list of vectors).
    Polar { doc: PathBuf },
}

#[derive(Subcommand, Debug)]
pub enum TensorCmd {
    /// Dimension and basis of the locality tensor product of "factors" (default V ⊗ V).
    Dim { doc: PathBuf },
    /// Dimension of the alternative tensor product of "v" and "w" (default V, V).
    AltDim { doc: PathBuf },
    /// Associativity of tensor powers for degrees "m", "n" (default 1, 1).
    Assoc { doc: PathBuf },
    /// Distributivity over "v1" ⊕ "v2" against "w".
    Distrib { doc: PathBuf },
}

#[derive(Subcommand, Debug)]
pub enum LieCmd {
    /// Jacobi identity and polar stability.
    Check { doc: PathBuf },
    /// Whether the bracket extends to a full Lie bracket.
    Extend { doc: PathBuf },
}

#[derive(Subcommand, Debug)]
pub enum UeaCmd {
    /// Filtered dimensions of the truncation.
    Build {
        doc: PathBuf,
        #[arg(long, default_value_t = 2)]
        degree: usize,
    },
    /// Primitive elements of the truncation against ι(g).
    Prim {
        doc: PathBuf,
        #[arg(long, default_value_t = 3)]
        degree: usize,
    },
}

#[derive(Subcommand, Debug)]
pub enum GlCmd {
    /// Product of the forests, left to right.
    Product {
        #[arg(long)]
        omega: PathBuf,
        #[arg(required = true, num_args = 1..)]
        forests: Vec<PathBuf>,
    },
    Coprod {
        #[arg(long)]
        omega: PathBuf,
        forest: PathBuf,
    },
    Antipode {
        #[arg(long)]
        omega: PathBuf,
        forest: PathBuf,
    },
    /// Decomposition into products of trees.
    Mm {
        #[arg(long)]
        omega: PathBuf,
        forest: PathBuf,
    },
}

#[derive(Args, Debug, Clone)]
pub struct FuzzArgs {
    #[arg(long)]
    pub statement: u8,
    #[arg(long, default_value_t = 2)]
    pub field: u32,
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, env = "LOCALG_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 3)]
    pub cap: usize,
    /// Truncation degree for statements 2 and 3.
    #[arg(long, default_value_t = 2)]
    pub degree: usize,
    /// Pair relation for statement 1: componentwise | all-pairs.
    #[arg(long, default_value = "componentwise")]
    pub rule: String,
    /// Lie algebra for statement 3: family | abelian | alternate.
    #[arg(long, default_value = "alternate")]
    pub lie: String,
    /// Random generator pairs of each base relation.
    #[arg(long, default_value_t = 3)]
    pub generators: usize,
}

#[derive(Subcommand, Debug)]
pub enum FixturesCmd {
    /// Run every case under DIR/cases and compare verdicts.
    Verify {
        #[arg(default_value = "fixtures")]
        dir: PathBuf,
    },
}

/// What a command produced.
#[derive(Debug, Default)]
pub struct Outcome {
    pub code: i32,
    pub json: Value,
    pub table: Vec<(String, String)>,
    pub cert: Option<Value>,
}

#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    pub fn new(code: i32, message: impl Into<String>) -> Self {
        Failure { code, message: message.into() }
    }
}

impl From<localg::Error> for Failure {
    fn from(e: localg::Error) -> Self {
        use localg::Error as E;
        let code = match e {
            E::Unsupported(_) | E::TooLarge(_) | E::CharacteristicNotZero(_) => EXIT_UNAVAILABLE,
            _ => EXIT_DATA,
        };
        Failure::new(code, e.to_string())
    }
}

/// Result of one invocation, without touching the process streams.
#[derive(Debug)]
pub struct RunResult {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
    pub json: Option<Value>,
}

pub fn run<I, T>(argv: I) -> RunResult
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_TRUE };
            let text = e.render().to_string();
            let (stdout, stderr) = if code == EXIT_TRUE { (text, String::new()) } else { (String::new(), text) };
            return RunResult { code, stdout, stderr, json: None };
        }
    };
    let opts = cli.out.clone();
    match cmd::dispatch(&cli.command) {
        Ok(outcome) => emit(outcome, &opts),
        Err(f) => {
            RunResult { code: f.code, stdout: String::new(), stderr: format!("localg: {}\n", f.message), json: None }
        }
    }
}

fn emit(o: Outcome, opts: &OutputOpts) -> RunResult {
    let mut doc = localg::json::document(o.json);
    let mut stdout = String::new();
    let mut stderr = String::new();
    if let Some(cert) = &o.cert {
        match &opts.cert {
            Some(p) => {
                if let Err(e) = write_json(p, cert) {
                    return RunResult { code: EXIT_CANTCREAT, stdout, stderr: format!("localg: {e}\n"), json: None };
                }
                doc["certificate_path"] = Value::String(p.display().to_string());
            }
            None => doc["certificate"] = cert.clone(),
        }
    }
    if let Some(p) = &opts.out {
        if let Err(e) = write_json(p, &doc) {
            return RunResult { code: EXIT_CANTCREAT, stdout, stderr: format!("localg: {e}\n"), json: None };
        }
    }
    if opts.json {
        stdout.push_str(&serde_json::to_string_pretty(&doc).expect("serializable"));
        stdout.push('\n');
    } else {
        let w = o.table.iter().map(|(k, _)| k.chars().count()).max().unwrap_or(0);
        for (k, v) in &o.table {
            stdout.push_str(&format!("{k:<w$}  {v}\n"));
        }
        if let Some(p) = &opts.cert {
            if o.cert.is_some() {
                stdout.push_str(&format!("{:<w$}  {}\n", "certificate", p.display()));
            }
        }
    }
    if o.code == EXIT_UNKNOWN {
        stderr.push_str("localg: verdict unknown\n");
    }
    RunResult { code: o.code, stdout, stderr, json: Some(doc) }
}

fn write_json(p: &std::path::Path, v: &Value) -> std::io::Result<()> {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    std::fs::write(p, s)
}

fn main() {
    if let Some(n) = std::env::var("LOCALG_THREADS").ok().and_then(|s| s.parse::<usize>().ok()) {
        // Fails only if a pool already exists, which cannot happen this early.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let r = run(std::env::args_os());
    print!("{}", r.stdout);
    eprint!("{}", r.stderr);
    std::process::exit(r.code);
}

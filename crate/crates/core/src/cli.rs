//! The `mdres` command line.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::bundle::{Bundle, BundlePaths};
use crate::cqa::{build_cqa_instance, split_key};
use crate::error::{Error, Result};
use crate::query::Mode;
use crate::relation::{write_dir, Instance};
use crate::report::{self, Report};
use crate::resolve::Bounds;

#[derive(Debug, Parser)]
#[command(
    name = "mdres",
    version,
    about = "Entity resolution under matching dependencies"
)]
pub struct Cli {
    #[command(flatten)]
    input: InputArgs,

    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,

    /// Worker threads for parallel stages.
    #[arg(long, env = "MDRES_THREADS", global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct InputArgs {
    /// Directory holding schema.txt, data/, mds.txt and optionally sims.txt.
    #[arg(long, global = true)]
    bundle: Option<PathBuf>,
    #[arg(long, global = true)]
    schema: Option<PathBuf>,
    /// Directory with one `<relation>.csv` per relation.
    #[arg(long, global = true)]
    data: Option<PathBuf>,
    #[arg(long, global = true)]
    mds: Option<PathBuf>,
    #[arg(long, global = true)]
    sims: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Debug, Args)]
struct BoundArgs {
    #[arg(long, default_value_t = Bounds::default().max_tuples)]
    max_tuples: usize,
    #[arg(long, default_value_t = Bounds::default().max_values)]
    max_values: usize,
    /// Defaults to twice the number of MDs plus two.
    #[arg(long)]
    max_depth: Option<usize>,
    #[arg(long, default_value_t = Bounds::default().max_states)]
    max_states: usize,
}

impl BoundArgs {
    fn bounds(&self) -> Result<Bounds> {
        if self.max_tuples == 0
            || self.max_values == 0
            || self.max_states == 0
            || self.max_depth == Some(0)
        {
            return Err(Error::Config("oracle bounds must be positive".into()));
        }
        Ok(Bounds {
            max_tuples: self.max_tuples,
            max_values: self.max_values,
            max_depth: self.max_depth,
            max_states: self.max_states,
        })
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Tractability class of the MD set, with evidence.
    Classify,
    /// Tuple-attribute closure blocks with value frequencies.
    Closure,
    /// Minimally resolved instances of a non-interacting or hit-simple-cyclic set.
    Resolve {
        /// Largest number of MRIs written out.
        #[arg(long, default_value_t = 0)]
        max_materialized: usize,
    },
    /// Resolved answers to a conjunctive query.
    Answers {
        #[arg(long)]
        query: PathBuf,
        #[arg(long, default_value = "auto")]
        mode: Mode,
        #[command(flatten)]
        bounds: BoundArgs,
    },
    /// MRIs by exhaustive chase, for any MD set on small instances.
    Oracle {
        #[command(flatten)]
        bounds: BoundArgs,
        #[arg(long, default_value_t = 16)]
        max_materialized: usize,
    },
    /// Datalog program whose `ta` relation is the closure.
    EmitDatalog {
        /// Evaluate the program and print the blocks of linked positions it derives.
        #[arg(long)]
        evaluate: bool,
    },
    /// Writes the key-repair instance for a key-style MD.
    CqaExport {
        #[arg(long)]
        relation: String,
        /// Comma-separated key attributes.
        #[arg(long, value_delimiter = ',', required = true)]
        key: Vec<String>,
        #[arg(long)]
        out: PathBuf,
    },
}

impl InputArgs {
    fn paths(&self) -> Result<BundlePaths> {
        let mut p = match &self.bundle {
            Some(dir) => BundlePaths::in_dir(dir),
            None => BundlePaths::default(),
        };
        if let Some(s) = &self.schema {
            p.schema = s.clone();
        }
        if let Some(s) = &self.data {
            p.data = s.clone();
        }
        if let Some(s) = &self.mds {
            p.mds = s.clone();
        }
        if self.sims.is_some() {
            p.sims = self.sims.clone();
        }
        for (flag, path) in [
            ("--schema", &p.schema),
            ("--data", &p.data),
            ("--mds", &p.mds),
        ] {
            if path.as_os_str().is_empty() {
                return Err(Error::Config(format!("{flag} or --bundle is required")));
            }
        }
        Ok(p)
    }
}

fn emit(out: &mut dyn Write, format: Format, r: Report) -> Result<()> {
    let s = match format {
        Format::Json => serde_json::to_string_pretty(&r.json).expect("serializable") + "\n",
        Format::Text => r.text,
    };
    out.write_all(s.as_bytes())
        .map_err(|e| Error::io("<stdout>", e))
}

fn configure_threads(n: Option<usize>) -> Result<()> {
    if let Some(n) = n {
        if n == 0 {
            return Err(Error::Config("--threads must be positive".into()));
        }
        // A second configuration in the same process keeps the first pool.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    Ok(())
}

/// Parses `args` (including the program name) and runs the command, writing
/// its report to `out`. `--help` and `--version` are written to `out` too.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> Result<()>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            return out
                .write_all(e.render().to_string().as_bytes())
                .map_err(|e| Error::io("<stdout>", e));
        }
        Err(e) => return Err(Error::Config(e.render().to_string().trim_end().to_string())),
    };
    configure_threads(cli.threads)?;
    let b = Bundle::load(&cli.input.paths()?)?;
    let f = cli.format;
    match cli.command {
        Command::Classify => emit(out, f, report::classify(&b)),
        Command::Closure => emit(out, f, report::closure(&b)),
        Command::Resolve { max_materialized } => {
            emit(out, f, report::resolve(&b, max_materialized)?)
        }
        Command::Answers {
            query,
            mode,
            bounds,
        } => {
            let q = b.query(&query)?;
            emit(out, f, report::answers(&b, &q, mode, &bounds.bounds()?)?)
        }
        Command::Oracle {
            bounds,
            max_materialized,
        } => emit(
            out,
            f,
            report::oracle(&b, &bounds.bounds()?, max_materialized)?,
        ),
        Command::EmitDatalog { evaluate: false } => out
            .write_all(report::datalog(&b).as_bytes())
            .map_err(|e| Error::io("<stdout>", e)),
        Command::EmitDatalog { evaluate: true } => emit(out, f, report::datalog_blocks(&b)?),
        Command::CqaExport {
            relation,
            key,
            out: dir,
        } => {
            let rel = b
                .schema
                .rel_id(&relation)
                .ok_or_else(|| Error::UnknownRelation(relation.clone()))?;
            let names: Vec<&str> = key.iter().map(|k| k.trim()).collect();
            let (key, _) = split_key(&b.schema, rel, &names)?;
            let kr = build_cqa_instance(&b.instance, rel, &key)?;
            let mut inst = Instance::empty(b.schema.clone());
            for (r, _) in b.schema.relations().iter().enumerate() {
                if r != rel {
                    for (tid, vals) in b.instance.tuples(r) {
                        inst.insert(r, tid, vals.to_vec());
                    }
                }
            }
            for (tid, vals) in kr.to_instance().tuples(rel) {
                inst.insert(rel, tid, vals.to_vec());
            }
            write_dir(&inst, &dir)?;
            let sidecar = dir.join(format!("{relation}.key.txt"));
            std::fs::write(&sidecar, kr.constraint_text() + "\n")
                .map_err(|e| Error::io(&sidecar, e))?;
            emit(out, f, report::cqa_export(&kr, &dir))
        }
    }
}

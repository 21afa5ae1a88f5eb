//! The `fsdim` command line.
//!
//! [`run`] parses arguments, dispatches to the library and writes the
//! result. Exit status is 0 on success (an `unreachable` or `cap_exceeded`
//! answer is a success), 1 on a domain error such as an unreadable or
//! malformed file, and 2 on a usage error.

pub mod pool;
mod report;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;

use fsdim_core::digits::parse_word;
use fsdim_core::dimension::{
    dim_point_estimate, dim_point_profile, dim_seq_estimate, dim_set_estimate, normality_report, NormalityOptions,
};
use fsdim_core::fst::{build_block_huffman, format, make_identity, make_lead_in_decoder, make_periodic_decoder, parse, NamedFst};
use fsdim_core::infocontent::kt;
use fsdim_core::precision::{kdelta, kdelta_profile, Caps, Delta, PrecisionQuery, DEFAULT_LOOKAHEAD};
use fsdim_core::separator::{dimf_estimate, make_enumerator, KtfCaps};
use fsdim_core::{Base, DigitStream, Error, Fst, RealSpec};

use pool::{io_error, write_pool, PoolParams};
use report::{cost_json, profile_csv, profile_json, report_json, report_text};

#[derive(Debug, Parser)]
#[command(name = "fsdim", version, about = "Finite-state information content and dimension estimates")]
pub struct Cli {
    /// Emit JSON instead of CSV or text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Write the primary output here instead of standard output.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Warn about machines whose longest single-step output exceeds this.
    #[arg(long, global = true, default_value_t = 64)]
    pub burst_limit: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check or build transducer files.
    #[command(subcommand)]
    Fst(FstCommand),
    /// Shortest input printing exactly a string.
    Kt(KtArgs),
    /// Shortest input printing a string within δ of a real.
    Kdelta(KdeltaArgs),
    /// Cost profile over precisions 1..=nmax as CSV.
    Profile(ProfileArgs),
    /// Dimension estimates.
    #[command(subcommand)]
    Dim(DimCommand),
    /// Dimension estimate over built-in witnesses, with a verdict.
    Normality(NormalityArgs),
    /// Dimension estimate through a separator enumerator.
    Sedim(SedimArgs),
    /// Write a seeded pool of random transducers.
    Pool(PoolArgs),
}

#[derive(Debug, Subcommand)]
pub enum FstCommand {
    /// Parse files and report their shape.
    Validate {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Print a generated machine in file format.
    Gen(GenArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum GenKind {
    Identity,
    Periodic,
    Leadin,
    Huffman,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub kind: GenKind,
    #[arg(long, default_value_t = 2)]
    pub base: u32,
    /// Repeated pattern (periodic, leadin).
    #[arg(long)]
    pub pattern: Option<String>,
    /// Copies of the pattern per step (periodic, leadin).
    #[arg(long, default_value_t = 1)]
    pub copies: usize,
    /// One-time prefix (leadin).
    #[arg(long)]
    pub lead: Option<String>,
    /// Training real (huffman).
    #[arg(long)]
    pub train: Option<RealSpec>,
    /// Training prefix length (huffman).
    #[arg(long)]
    pub prefix: Option<usize>,
    /// Block length (huffman).
    #[arg(long, default_value_t = 1)]
    pub block: usize,
}

#[derive(Debug, Args)]
pub struct KtArgs {
    #[arg(long)]
    pub fst: PathBuf,
    /// Target string; empty or `-` for the empty string.
    #[arg(long, allow_hyphen_values = true)]
    pub w: String,
    /// Longest input searched; default `4·(|w|+2)`.
    #[arg(long)]
    pub cap: Option<usize>,
}

#[derive(Debug, Args)]
pub struct CapArgs {
    /// Input cap; default `4·(n+2)`.
    #[arg(long)]
    pub cap_in: Option<usize>,
    /// Output cap; default `maxBurst·cap_in`.
    #[arg(long)]
    pub cap_out: Option<usize>,
    /// Digits scanned when deciding whether an expansion ends in zeros.
    #[arg(long, default_value_t = DEFAULT_LOOKAHEAD)]
    pub lookahead: usize,
}

impl CapArgs {
    fn caps(&self) -> Caps {
        Caps {
            input: self.cap_in,
            output: self.cap_out,
            lookahead: self.lookahead,
        }
    }
}

#[derive(Debug, Args)]
pub struct PointArgs {
    /// Real: rat:P/Q, periodic:W, dyadic:W, champernowne or digitfile:PATH.
    #[arg(long)]
    pub x: RealSpec,
    #[arg(long, default_value_t = 2)]
    pub base: u32,
}

#[derive(Debug, Args)]
#[group(id = "precision", required = true, multiple = false, args = ["n", "delta"])]
pub struct KdeltaArgs {
    #[arg(long)]
    pub fst: PathBuf,
    #[command(flatten)]
    pub point: PointArgs,
    /// Precision `b^-n`.
    #[arg(long)]
    pub n: Option<u32>,
    /// Precision as `P/Q`, for reals with an exact value.
    #[arg(long)]
    pub delta: Option<String>,
    #[command(flatten)]
    pub caps: CapArgs,
}

#[derive(Debug, Args)]
pub struct WindowArgs {
    #[arg(long)]
    pub nmax: usize,
    /// The window is `[ceil(frac·nmax), nmax]`.
    #[arg(long, default_value = "1/2")]
    pub window_frac: BigRational,
}

#[derive(Debug, Args)]
pub struct ProfileArgs {
    /// Directory of `.fst` files.
    #[arg(long)]
    pub fsts: PathBuf,
    #[command(flatten)]
    pub point: PointArgs,
    #[arg(long)]
    pub nmax: usize,
    #[command(flatten)]
    pub caps: CapArgs,
}

#[derive(Debug, Subcommand)]
pub enum DimCommand {
    /// Estimate for one real.
    Point {
        #[arg(long)]
        fsts: PathBuf,
        #[command(flatten)]
        point: PointArgs,
        #[command(flatten)]
        window: WindowArgs,
        #[command(flatten)]
        caps: CapArgs,
        /// Also write the per-precision profile CSV here.
        #[arg(long)]
        profile: Option<PathBuf>,
    },
    /// Estimate for a sequence, from exact prefix costs.
    Seq {
        #[arg(long)]
        fsts: PathBuf,
        #[command(flatten)]
        point: PointArgs,
        #[command(flatten)]
        window: WindowArgs,
        /// Input cap per prefix; default `4·(n+2)`.
        #[arg(long)]
        cap: Option<usize>,
    },
    /// Estimate for a finite set of reals.
    Set {
        #[arg(long)]
        fsts: PathBuf,
        /// Repeat once per point.
        #[arg(long = "x", required = true)]
        xs: Vec<RealSpec>,
        #[arg(long, default_value_t = 2)]
        base: u32,
        #[command(flatten)]
        window: WindowArgs,
        #[command(flatten)]
        caps: CapArgs,
    },
}

#[derive(Debug, Args)]
pub struct NormalityArgs {
    #[command(flatten)]
    pub point: PointArgs,
    #[command(flatten)]
    pub window: WindowArgs,
    /// Largest Huffman block length.
    #[arg(long, default_value_t = 4)]
    pub k: usize,
    /// Training prefix length; default `max(nmax, 256)`.
    #[arg(long)]
    pub train: Option<usize>,
    /// Estimates below this are reported as compressible.
    #[arg(long, default_value = "95/100")]
    pub threshold: BigRational,
    #[command(flatten)]
    pub caps: CapArgs,
}

#[derive(Debug, Args)]
pub struct SedimArgs {
    /// canonical, blockperm:M:PERMFILE or targeted:SPEC.
    #[arg(long)]
    pub f: String,
    #[arg(long)]
    pub fsts: PathBuf,
    /// Repeat for a set estimate.
    #[arg(long = "x", required = true)]
    pub xs: Vec<RealSpec>,
    #[arg(long, default_value_t = 2)]
    pub base: u32,
    #[command(flatten)]
    pub window: WindowArgs,
    /// Longest input enumerated; the search is exponential in it.
    #[arg(long)]
    pub max_input_len: Option<usize>,
    /// Opt-in threshold below which the point is reported as not f-normal.
    #[arg(long)]
    pub threshold: Option<BigRational>,
}

#[derive(Debug, Args)]
pub struct PoolArgs {
    #[arg(long, default_value_t = 200)]
    pub count: usize,
    #[arg(long, default_value_t = 4)]
    pub max_states: usize,
    #[arg(long, default_value_t = 2)]
    pub base: u32,
    #[arg(long, default_value_t = 2)]
    pub max_burst: usize,
    /// Directory receiving the files.
    #[arg(long, default_value = ".")]
    pub dir: PathBuf,
}

/// Collects the primary output and any warnings of one command.
struct Output {
    body: Vec<u8>,
    warnings: Vec<String>,
}

impl Output {
    fn line(&mut self, s: impl AsRef<str>) {
        self.body.extend_from_slice(s.as_ref().as_bytes());
        self.body.push(b'\n');
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { stderr.write_all(text.as_bytes()) } else { stdout.write_all(text.as_bytes()) };
            return code;
        }
    };
    let mut out = Output {
        body: Vec::new(),
        warnings: Vec::new(),
    };
    let result = execute(&cli, &mut out);
    for w in &out.warnings {
        let _ = writeln!(stderr, "warning: {w}");
    }
    if let Err(e) = result {
        let _ = writeln!(stderr, "error: {e}");
        return 1;
    }
    let written = match &cli.out {
        Some(path) => std::fs::write(path, &out.body).map_err(|e| io_error(path, e)),
        None => stdout.write_all(&out.body).map_err(|e| io_error(Path::new("<stdout>"), e)),
    };
    match written {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            1
        }
    }
}

fn base(b: u32) -> Result<Base, Error> {
    Base::new(b)
}

fn stream(spec: &RealSpec, b: u32) -> Result<DigitStream, Error> {
    spec.stream(base(b)?)
}

fn load_fst(path: &Path, cli: &Cli, out: &mut Output) -> Result<Fst, Error> {
    let text = std::fs::read_to_string(path).map_err(|e| io_error(path, e))?;
    let t = parse(&text).map_err(|e| Error::Io {
        path: path.display().to_string(),
        msg: e.to_string(),
    })?;
    if t.max_burst() > cli.burst_limit {
        out.warnings.push(format!(
            "{}: a single step emits {} digits (limit {}); searches may be slow",
            path.display(),
            t.max_burst(),
            cli.burst_limit
        ));
    }
    Ok(t)
}

/// Every `.fst` file in `dir`, sorted by name, identified by file stem.
fn load_family(dir: &Path, cli: &Cli, out: &mut Output) -> Result<Vec<NamedFst>, Error> {
    let mut paths = std::fs::read_dir(dir)
        .map_err(|e| io_error(dir, e))?
        .map(|entry| entry.map(|e| e.path()).map_err(|e| io_error(dir, e)))
        .collect::<Result<Vec<_>, _>>()?;
    paths.retain(|p| p.extension().is_some_and(|ext| ext == "fst"));
    paths.sort();
    if paths.is_empty() {
        return Err(Error::Io {
            path: dir.display().to_string(),
            msg: "no .fst files found".into(),
        });
    }
    paths
        .iter()
        .map(|p| {
            let id = p.file_stem().map_or_else(String::new, |s| s.to_string_lossy().into_owned());
            Ok(NamedFst::new(id, load_fst(p, cli, out)?))
        })
        .collect()
}

fn execute(cli: &Cli, out: &mut Output) -> Result<(), Error> {
    match &cli.command {
        Command::Fst(FstCommand::Validate { files }) => {
            for path in files {
                let t = load_fst(path, cli, out)?;
                out.line(format!(
                    "ok {} base={} states={} max_burst={}",
                    path.display(),
                    t.base(),
                    t.state_count(),
                    t.max_burst()
                ));
            }
        }
        Command::Fst(FstCommand::Gen(g)) => {
            let t = generate(g)?;
            out.body.extend_from_slice(format(&t).as_bytes());
        }
        Command::Kt(a) => {
            let t = load_fst(&a.fst, cli, out)?;
            let w = parse_word(&a.w, t.base())?;
            let r = kt(&t, &w, a.cap.unwrap_or(4 * (w.len() + 2)))?;
            out.line(if cli.json { cost_json(&r) } else { r.to_csv() });
        }
        Command::Kdelta(a) => {
            let t = load_fst(&a.fst, cli, out)?;
            let delta = match (a.n, &a.delta) {
                (Some(n), _) => Delta::InversePower(n),
                (None, Some(d)) => d.parse()?,
                (None, None) => unreachable!("clap requires one precision"),
            };
            let q = PrecisionQuery::new(stream(&a.point.x, a.point.base)?, delta).with_caps(a.caps.caps());
            let r = kdelta(&t, &q)?;
            out.line(if cli.json { cost_json(&r) } else { r.to_csv() });
        }
        Command::Profile(a) => {
            let family = load_family(&a.fsts, cli, out)?;
            let ts: Vec<Fst> = family.into_iter().map(|t| t.fst).collect();
            let rows = kdelta_profile(&ts, &stream(&a.point.x, a.point.base)?, a.nmax, a.caps.caps())?;
            out.body.extend(if cli.json { profile_json(&rows).into_bytes() } else { profile_csv(&rows).into_bytes() });
        }
        Command::Dim(DimCommand::Point {
            fsts,
            point,
            window,
            caps,
            profile,
        }) => {
            let family = load_family(fsts, cli, out)?;
            let x = stream(&point.x, point.base)?;
            let report = match profile {
                Some(path) => {
                    let (p, r) = dim_point_profile(&family, &x, window.nmax, &window.window_frac, caps.caps())?;
                    std::fs::write(path, profile_csv(&p.rows)).map_err(|e| io_error(path, e))?;
                    r
                }
                None => dim_point_estimate(&family, &x, window.nmax, &window.window_frac, caps.caps())?,
            };
            emit_report(cli, out, &report, None);
        }
        Command::Dim(DimCommand::Seq { fsts, point, window, cap }) => {
            let family = load_family(fsts, cli, out)?;
            let s = stream(&point.x, point.base)?;
            let report = dim_seq_estimate(&family, &s, window.nmax, &window.window_frac, *cap)?;
            emit_report(cli, out, &report, None);
        }
        Command::Dim(DimCommand::Set {
            fsts,
            xs,
            base: b,
            window,
            caps,
        }) => {
            let family = load_family(fsts, cli, out)?;
            let xs = xs.iter().map(|x| stream(x, *b)).collect::<Result<Vec<_>, _>>()?;
            let report = dim_set_estimate(&family, &xs, window.nmax, &window.window_frac, caps.caps())?;
            emit_report(cli, out, &report, None);
        }
        Command::Normality(a) => {
            let x = stream(&a.point.x, a.point.base)?;
            let opts = NormalityOptions {
                max_block: a.k,
                train_len: a.train,
                threshold: a.threshold.clone(),
                window_frac: a.window.window_frac.clone(),
                caps: a.caps.caps(),
            };
            let r = normality_report(&x, a.window.nmax, &opts)?;
            emit_report(cli, out, &r.report, Some(r.compressible));
        }
        Command::Sedim(a) => {
            let family = load_family(&a.fsts, cli, out)?;
            let b = base(a.base)?;
            let f = make_enumerator(&a.f, b)?;
            let xs = a.xs.iter().map(|x| x.stream(b)).collect::<Result<Vec<_>, _>>()?;
            let caps = KtfCaps {
                input: a.max_input_len,
                ..KtfCaps::default()
            };
            if caps.input_for(b) > 20 {
                out.warnings.push(format!(
                    "enumerating inputs up to length {} is exponential in that length",
                    caps.input_for(b)
                ));
            }
            let mut report = dimf_estimate(&family, &f, &xs, a.window.nmax, &a.window.window_frac, caps)?;
            report.verdict = format!("{} through enumerator {f}", report.verdict);
            let below = a.threshold.as_ref().map(|th| report.estimate < *th);
            if let Some(below) = below {
                report.verdict = if below {
                    format!("{}; below threshold (not f-normal)", report.verdict)
                } else {
                    format!("{}; not below threshold", report.verdict)
                };
            }
            emit_report(cli, out, &report, below);
        }
        Command::Pool(a) => {
            let params = PoolParams {
                seed: cli.seed,
                count: a.count,
                max_states: a.max_states,
                base: base(a.base)?,
                max_burst: a.max_burst,
            };
            for path in write_pool(&a.dir, params)? {
                out.line(path.display().to_string());
            }
        }
    }
    Ok(())
}

fn emit_report(cli: &Cli, out: &mut Output, report: &fsdim_core::dimension::EstimateReport, flag: Option<bool>) {
    let text = if cli.json {
        report_json(report, flag)
    } else {
        report_text(report)
    };
    out.body.extend_from_slice(text.as_bytes());
}

fn word_arg(s: &Option<String>, name: &str, b: Base) -> Result<Vec<u8>, Error> {
    let s = s
        .as_deref()
        .ok_or_else(|| Error::InvalidParameter(format!("--{name} is required for this kind")))?;
    parse_word(s, b)
}

fn generate(g: &GenArgs) -> Result<Fst, Error> {
    let b = base(g.base)?;
    match g.kind {
        GenKind::Identity => Ok(make_identity(b)),
        GenKind::Periodic => make_periodic_decoder(&word_arg(&g.pattern, "pattern", b)?, g.copies, b),
        GenKind::Leadin => make_lead_in_decoder(
            &word_arg(&g.lead, "lead", b)?,
            &word_arg(&g.pattern, "pattern", b)?,
            g.copies,
            b,
        ),
        GenKind::Huffman => {
            let train = g
                .train
                .as_ref()
                .ok_or_else(|| Error::InvalidParameter("--train is required for this kind".into()))?;
            let prefix = g
                .prefix
                .ok_or_else(|| Error::InvalidParameter("--prefix is required for this kind".into()))?;
            Ok(build_block_huffman(&train.stream(b)?, prefix, g.block, b)?.fst)
        }
    }
}

//! Command-line front end.
//!
//! Exit codes: 0 success, 1 a claim or classification failed, 2 parse or usage
//! error, 3 point out of range, 4 operation undefined on the space.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::algebra::{classify, BinaryOp, CheckOptions, Level};
use crate::audit::{
    check_approx_theorems, check_ef_axioms, check_group_theorems, check_lodato_axiom, random_space, AuditConfig,
    AuditReport, ProximityRelationSample,
};
use crate::error::Error;
use crate::fixtures::{self, EXAMPLE1_REGION, EXAMPLE2_REGION};
use crate::format::{parse_op_spec, parse_region_list, parse_space, read_space, ParseError};
use crate::report::{self, ReportDocument};
use crate::space::{DescribedSpace, PointId, Region};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_RANGE: i32 = 3;
pub const EXIT_OP_DOMAIN: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "dprox",
    version,
    about = "Descriptive proximity approximations and approximate algebraic structures"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Kv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Set description, lower/upper approximation and boundary of a region.
    Approx {
        #[arg(long)]
        space: PathBuf,
        #[command(flatten)]
        region: RegionArg,
        #[arg(long, value_enum, default_value = "text")]
        format: OutputFormat,
    },
    /// Classify a region as approximate groupoid/semigroup/monoid/group.
    Classify {
        #[arg(long)]
        space: PathBuf,
        /// min | modadd:<n> | table:<path>
        #[arg(long)]
        op: String,
        #[command(flatten)]
        region: RegionArg,
        #[arg(long)]
        max_witnesses: Option<usize>,
        #[arg(long, value_enum, default_value = "text")]
        format: OutputFormat,
    },
    /// Audit proximity axioms, approximation laws and (with --op) group criteria.
    Audit {
        #[arg(long, conflicts_with = "random", required_unless_present = "random")]
        space: Option<PathBuf>,
        /// rows cols alphabet seed
        #[arg(long, num_args = 4, value_names = ["ROWS", "COLS", "ALPHABET", "SEED"])]
        random: Option<Vec<u64>>,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        op: Option<String>,
        /// Spaces with at most this many points get every region pair checked.
        #[arg(long, default_value_t = crate::audit::DEFAULT_MAX_POINTS)]
        exhaustive_max_points: usize,
        #[arg(long, value_enum, default_value = "text")]
        format: OutputFormat,
    },
    /// Recompute the two bundled worked examples and diff them against the pinned reports.
    ReproducePaper {
        /// Directory overriding any of table1.space, table2.space,
        /// expected-example1.kv, expected-example2.kv.
        #[arg(long)]
        fixtures: Option<PathBuf>,
        /// Write freshly computed expected-example*.kv files into this directory.
        #[arg(long)]
        bless: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "text")]
        format: OutputFormat,
    },
}

#[derive(Debug, Args)]
pub struct RegionArg {
    /// Points as "i,j", separated by spaces or ';'.
    #[arg(long, num_args = 1.., required = true)]
    pub region: Vec<String>,
}

/// A failure carrying its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl From<ParseError> for Failure {
    fn from(e: ParseError) -> Self {
        Failure {
            code: EXIT_PARSE,
            message: e.to_string(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::PointOutOfRange(_) => EXIT_RANGE,
            Error::OpDomain { .. } => EXIT_OP_DOMAIN,
            Error::SpaceTooLarge { .. } | Error::GNotGroup(_) => EXIT_FAILED,
            _ => EXIT_PARSE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

/// Parses arguments and runs one command, writing to the given streams.
/// Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
            let _ = if e.use_stderr() {
                write!(err, "{e}")
            } else {
                write!(out, "{e}")
            };
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn emit(out: &mut dyn Write, text: &str) -> Result<(), Failure> {
    out.write_all(text.as_bytes()).map_err(|e| Failure {
        code: EXIT_FAILED,
        message: e.to_string(),
    })
}

fn load_region<'s>(space: &'s DescribedSpace, tokens: &[String]) -> Result<Region<'s>, Failure> {
    let points = parse_region_list(tokens)?;
    if points.is_empty() {
        return Err(Error::EmptyRegion.into());
    }
    Ok(Region::new(space, points)?)
}

pub fn execute(command: Command, out: &mut dyn Write) -> Result<i32, Failure> {
    match command {
        Command::Approx { space, region, format } => {
            let space = read_space(&space)?;
            let region = load_region(&space, &region.region)?;
            let text = match format {
                OutputFormat::Kv => approx_document(&space, &region).to_kv(),
                OutputFormat::Text => report::render_approx_text(&space, &region),
            };
            emit(out, &text)?;
            Ok(EXIT_OK)
        }
        Command::Classify {
            space,
            op,
            region,
            max_witnesses,
            format,
        } => {
            let space = read_space(&space)?;
            let op = parse_op_spec(&op)?;
            let region = load_region(&space, &region.region)?;
            op.validate(&space)?;
            let opts = CheckOptions { max_witnesses };
            let rep = classify(&space, &op, &region, opts)?;
            let text = match format {
                OutputFormat::Kv => {
                    let mut d = report::space_fields(&space);
                    d.push("region", report::points_value(region.iter()));
                    d.extend(report::structure_fields(&op, &rep));
                    d.to_kv()
                }
                OutputFormat::Text => report::render_structure_text(&op, &region, &rep),
            };
            emit(out, &text)?;
            Ok(if rep.level >= Level::Groupoid {
                EXIT_OK
            } else {
                EXIT_FAILED
            })
        }
        Command::Audit {
            space,
            random,
            trials,
            seed,
            op,
            exhaustive_max_points,
            format,
        } => {
            let space = match (space, random) {
                (Some(path), _) => read_space(&path)?,
                (None, Some(r)) => random_space(r[0] as usize, r[1] as usize, r[2] as u32, r[3])?,
                (None, None) => unreachable!("clap requires --space or --random"),
            };
            let op = op.as_deref().map(parse_op_spec).transpose()?;
            let config = AuditConfig {
                exhaustive_max_points,
                ..AuditConfig::default()
            };
            let rep = audit_space(&space, op.as_ref(), trials, seed, &config)?;
            let text = match format {
                OutputFormat::Kv => {
                    let mut d = report::space_fields(&space);
                    d.extend(report::audit_fields(&rep));
                    d.to_kv()
                }
                OutputFormat::Text => report::render_audit_text(&rep),
            };
            emit(out, &text)?;
            Ok(if rep.all_hold() { EXIT_OK } else { EXIT_FAILED })
        }
        Command::ReproducePaper {
            fixtures,
            bless,
            format,
        } => {
            let outcome = reproduce_examples(fixtures.as_deref())?;
            if let Some(dir) = bless {
                for (spec, e) in example_specs().iter().zip(&outcome.examples) {
                    let path = dir.join(spec.expected_file);
                    std::fs::write(&path, e.actual.to_kv()).map_err(|err| Failure {
                        code: EXIT_FAILED,
                        message: format!("{}: {err}", path.display()),
                    })?;
                }
            }
            let text = match format {
                OutputFormat::Text => outcome.render(),
                OutputFormat::Kv => outcome.to_kv(),
            };
            emit(out, &text)?;
            Ok(if outcome.all_match() { EXIT_OK } else { EXIT_FAILED })
        }
    }
}

/// Runs every applicable audit on one space.
pub fn audit_space(
    space: &DescribedSpace,
    op: Option<&BinaryOp>,
    trials: usize,
    seed: u64,
    config: &AuditConfig,
) -> Result<AuditReport, Failure> {
    let mut rep = check_approx_theorems(space, trials, seed, config)?;
    if space.len() <= config.max_points {
        let sample = ProximityRelationSample::descriptive(space, config.max_points)?;
        rep.extend(check_ef_axioms(&sample));
        rep.extend(check_lodato_axiom(&sample));
    } else {
        rep.notices.push(format!(
            "proximity axiom checks skipped: {} points exceed the {}-point limit",
            space.len(),
            config.max_points
        ));
    }
    if let Some(op) = op {
        rep.extend(check_group_theorems(space, op, trials, seed, config)?);
    }
    Ok(rep)
}

pub fn approx_document(space: &DescribedSpace, region: &Region<'_>) -> ReportDocument {
    let mut d = report::space_fields(space);
    d.extend(report::approx_fields(region));
    d
}

/// Full document for one worked example: the input pixels, the
/// approximations and the structure report.
pub fn example_document(space: &DescribedSpace, op: &BinaryOp, region: &[PointId]) -> Result<ReportDocument, Failure> {
    op.validate(space)?;
    let region = Region::new(space, region.iter().copied())?;
    let rep = classify(space, op, &region, CheckOptions::default())?;
    let mut d = report::space_fields(space);
    d.extend(report::point_fields(space));
    d.extend(report::approx_fields(&region));
    d.extend(report::structure_fields(op, &rep));
    Ok(d)
}

struct ExampleSpec {
    name: &'static str,
    space_file: &'static str,
    space_text: &'static str,
    expected_file: &'static str,
    expected_text: &'static str,
    op: BinaryOp,
    region: &'static [PointId],
}

fn example_specs() -> [ExampleSpec; 2] {
    [
        ExampleSpec {
            name: "Example 1",
            space_file: "table1.space",
            space_text: fixtures::TABLE1_SPACE,
            expected_file: "expected-example1.kv",
            expected_text: fixtures::EXPECTED_EXAMPLE1,
            op: BinaryOp::MinIndex,
            region: &EXAMPLE1_REGION,
        },
        ExampleSpec {
            name: "Example 2",
            space_file: "table2.space",
            space_text: fixtures::TABLE2_SPACE,
            expected_file: "expected-example2.kv",
            expected_text: fixtures::EXPECTED_EXAMPLE2,
            op: BinaryOp::ModAdd(5),
            region: &EXAMPLE2_REGION,
        },
    ]
}

#[derive(Debug, Clone)]
pub struct ExampleOutcome {
    pub name: &'static str,
    pub actual: ReportDocument,
    pub diffs: Vec<report::FieldDiff>,
}

#[derive(Debug, Clone)]
pub struct ReproduceOutcome {
    pub examples: Vec<ExampleOutcome>,
}

impl ReproduceOutcome {
    pub fn all_match(&self) -> bool {
        self.examples.iter().all(|e| e.diffs.is_empty())
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for e in &self.examples {
            let upper = e.actual.get("upper.count").unwrap_or("?");
            let level = e.actual.get("level").unwrap_or("?");
            let upper_ok = !e.diffs.iter().any(|d| d.key == "upper" || d.key == "upper.count");
            let verdict = if e.diffs.is_empty() { "PASS" } else { "FAIL" };
            s.push_str(&format!(
                "{}: upper approximation {} ({upper} points); {level}: {verdict}\n",
                e.name,
                if upper_ok { "matches" } else { "differs" }
            ));
            for d in &e.diffs {
                s.push_str(&format!("  {d}\n"));
            }
        }
        s
    }

    pub fn to_kv(&self) -> String {
        let mut d = ReportDocument::new();
        for (i, e) in self.examples.iter().enumerate() {
            let key = format!("example{}", i + 1);
            d.push(format!("{key}.match"), e.diffs.is_empty());
            for (j, diff) in e.diffs.iter().enumerate() {
                d.push(format!("{key}.diff.{j}"), diff);
            }
        }
        d.to_kv()
    }
}

fn fixture_text(dir: Option<&Path>, name: &str, bundled: &str) -> Result<String, Failure> {
    match dir.map(|d| d.join(name)).filter(|p| p.exists()) {
        Some(path) => std::fs::read_to_string(&path).map_err(|e| Failure {
            code: EXIT_PARSE,
            message: format!("{}: {e}", path.display()),
        }),
        None => Ok(bundled.to_string()),
    }
}

/// Recomputes both worked examples from the (possibly overridden) fixtures.
pub fn reproduce_examples(dir: Option<&Path>) -> Result<ReproduceOutcome, Failure> {
    let mut examples = Vec::new();
    for spec in example_specs() {
        let space = parse_space(&fixture_text(dir, spec.space_file, spec.space_text)?).map_err(|e| Failure {
            code: EXIT_PARSE,
            message: format!("{}: {e}", spec.space_file),
        })?;
        let expected = ReportDocument::parse_kv(&fixture_text(dir, spec.expected_file, spec.expected_text)?).map_err(
            |message| Failure {
                code: EXIT_PARSE,
                message: format!("{}: {message}", spec.expected_file),
            },
        )?;
        let actual = example_document(&space, &spec.op, spec.region)?;
        let diffs = actual.diff(&expected);
        examples.push(ExampleOutcome {
            name: spec.name,
            actual,
            diffs,
        });
    }
    Ok(ReproduceOutcome { examples })
}

//! `vgeom`: build geometries, hyperplanes and reducts as JSON, and run the
//! verification battery.
//!
//! Exit codes: 0 when every requested check passes, 1 when a check fails,
//! 2 for usage, input and capacity errors.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context as _, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use vgeom::io::{
    build_space, hyperplane_from_form, parse_document, Construction, Document, FormDoc,
    HyperplaneDoc, ReductDoc, SpaceDoc, VeroneseDoc,
};
use vgeom::parallelism::{search_leaf_closed_parallelism, SearchOutcome};
use vgeom::reduct::{recover_veronese, AffineReduct};
use vgeom::report::{Report, Verdict};
use vgeom::spaces::ParallelStructure;
use vgeom::suite::{net_axiom_on, Context, Suite, SEARCH_BUDGET};

#[derive(Parser)]
#[command(
    name = "vgeom",
    version,
    about = "Veronese spaces, their hyperplanes and affine reducts"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a named space: pg N P, ag N P, w N P or quadric N P TYPE.
    Build {
        family: String,
        n: usize,
        p: u32,
        /// Quadric type: hyperbolic, parabolic or elliptic.
        kind: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build V(k, base) from a space file or a name such as pg(2,3).
    Veronese {
        #[arg(long)]
        base: String,
        #[arg(long)]
        level: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The hyperplane a form determines on a Veronese space.
    Hyperplane {
        #[arg(long)]
        space: PathBuf,
        #[arg(long)]
        form: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The affine reduct of a Veronese space by a hyperplane.
    Reduct {
        #[arg(long)]
        space: PathBuf,
        #[arg(long)]
        hyperplane: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rebuild the ambient space from a reduct and compare.
    Recover {
        #[arg(long)]
        reduct: PathBuf,
        #[arg(long = "check-against")]
        check_against: Option<PathBuf>,
    },
    /// Run a verification suite and print one JSON verdict per line.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, value_enum, default_value_t = Profile::Desk)]
        profile: Profile,
        /// A Veronese or reduct document for the net-axiom suite.
        #[arg(long)]
        space: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Include runtimes (output is then no longer reproducible).
        #[arg(long)]
        timings: bool,
        /// Print the summary table to stderr.
        #[arg(long)]
        table: bool,
    },
    /// Summarize a file of JSON verdicts as a table.
    Report {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        timings: bool,
    },
    /// Search for a parallelism of a Veronese space over an affine base.
    ParallelismSearch {
        #[arg(long)]
        space: PathBuf,
        #[arg(long, value_enum)]
        mode: Mode,
        #[arg(long, default_value_t = SEARCH_BUDGET)]
        budget: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Profile {
    Desk,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    LeafClosed,
}

/// A check ran and failed.
#[derive(Debug)]
struct CheckFailed;

impl std::fmt::Display for CheckFailed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("check failed")
    }
}

impl std::error::Error for CheckFailed {}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("cannot write {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_json<T: serde::Serialize>(out: Option<&Path>, x: &T) -> Result<()> {
    emit(out, &(serde_json::to_string(x)? + "\n"))
}

fn load_veronese(path: &Path) -> Result<VeroneseDoc> {
    match parse_document(&read(path)?)? {
        Document::Veronese(d) => Ok(*d),
        _ => bail!("{} is not a Veronese space document", path.display()),
    }
}

fn load_reduct(path: &Path) -> Result<ReductDoc> {
    match parse_document(&read(path)?)? {
        Document::Reduct(d) => Ok(*d),
        _ => bail!("{} is not a reduct document", path.display()),
    }
}

fn base_doc(base: &str) -> Result<SpaceDoc> {
    let path = Path::new(base);
    if path.exists() {
        match parse_document(&read(path)?)? {
            Document::Space(d) => Ok(d),
            _ => bail!("{base} is not a space document"),
        }
    } else {
        Ok(build_space(&base.parse::<Construction>()?)?)
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Build {
            family,
            n,
            p,
            kind,
            out,
        } => {
            let c = Construction::from_parts(&family.to_lowercase(), n, p, kind.as_deref())?;
            emit_json(out.as_deref(), &build_space(&c)?)
        }
        Command::Veronese { base, level, out } => {
            let (doc, _) = VeroneseDoc::new(base_doc(&base)?, level)?;
            emit_json(out.as_deref(), &doc)
        }
        Command::Hyperplane { space, form, out } => {
            let doc = load_veronese(&space)?;
            let v = doc.load()?;
            let form: FormDoc = serde_json::from_str(&read(&form)?).context("unreadable form")?;
            let h = hyperplane_from_form(&doc, &v, &form)?;
            emit_json(out.as_deref(), &HyperplaneDoc::new(&v, &h))
        }
        Command::Reduct {
            space,
            hyperplane,
            out,
        } => {
            let doc = load_veronese(&space)?;
            let v = doc.load()?;
            let h: HyperplaneDoc =
                serde_json::from_str(&read(&hyperplane)?).context("unreadable hyperplane")?;
            let a = AffineReduct::build(&v, &h.point_set(&v)?)?;
            emit_json(out.as_deref(), &ReductDoc::new(doc, &a))
        }
        Command::Recover {
            reduct,
            check_against,
        } => {
            let doc = load_reduct(&reduct)?;
            let (v, a) = doc.load()?;
            let r = recover_veronese(&a)?;
            let matches_given = match &check_against {
                Some(p) => {
                    let given = load_veronese(p)?.load()?;
                    given.point_count() == v.point_count()
                        && given.structure().lines() == v.structure().lines()
                }
                None => true,
            };
            emit_json(
                None,
                &json!({
                    "isomorphism": r.is_isomorphism(),
                    "matches_check_against": check_against.as_ref().map(|_| matches_given),
                    "points": r.structure.point_count(),
                    "lines": r.structure.line_count(),
                    "proper_lines": r.proper_lines,
                    "leaf_horizon_lines": r.leaf_horizon_lines,
                    "two_s_horizon_lines": r.two_s_horizon_lines,
                    "missing": r.missing.len(),
                    "spurious": r.spurious.len(),
                }),
            )?;
            if r.is_isomorphism() && matches_given {
                Ok(())
            } else {
                Err(CheckFailed.into())
            }
        }
        Command::Verify {
            suite,
            profile: Profile::Desk,
            space,
            out,
            timings,
            table,
        } => {
            let suite: Suite = suite
                .parse()
                .map_err(|e| anyhow::anyhow!("{e}; known suites: {}", Suite::names().join(", ")))?;
            let verdicts: Vec<Verdict> = match (&space, suite) {
                (Some(p), s) if s == "net-axiom".parse()? => {
                    vec![net_axiom_on(&parse_document(&read(p)?)?)?]
                }
                (Some(_), _) => bail!("--space is only used by the net-axiom suite"),
                (None, s) => s.run(&Context::default()),
            };
            let report = Report { verdicts };
            emit(out.as_deref(), &report.json_lines(timings))?;
            if table {
                eprint!("{}", report.summary_table(timings));
            }
            if report.all_pass() {
                Ok(())
            } else {
                Err(CheckFailed.into())
            }
        }
        Command::Report { input, timings } => {
            let report = Report::parse_json_lines(&read(&input)?).context("unreadable verdicts")?;
            print!("{}", report.summary_table(timings));
            if report.all_pass() {
                Ok(())
            } else {
                Err(CheckFailed.into())
            }
        }
        Command::ParallelismSearch {
            space,
            mode: Mode::LeafClosed,
            budget,
        } => {
            let doc = load_veronese(&space)?;
            let v = doc.load()?;
            let classes = doc.base.parallel_classes.clone().context(
                "the base carries no parallel classes; leaf-closed search needs an affine base",
            )?;
            let base = ParallelStructure::new(doc.base.structure()?, classes)?;
            let s = search_leaf_closed_parallelism(&v, &base, budget)?;
            emit_json(None, &s)?;
            match s.outcome {
                SearchOutcome::None => Ok(()),
                SearchOutcome::Found(_) => Err(CheckFailed.into()),
                SearchOutcome::BudgetExceeded => {
                    bail!("budget of {budget} nodes exhausted before the search finished")
                }
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.is::<CheckFailed>() => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

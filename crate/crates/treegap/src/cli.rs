//! Subcommand implementations behind the `treegap` binary.
//!
//! Exit codes: 0 success, 1 parse/IO and usage errors, 2 domain
//! violations (including a failed `--check-exact`), 3 eigensolver
//! convergence failures. Reports go to stdout, errors to stderr; repeated
//! invocations with the same arguments produce byte-identical output.

use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::bounds::{
    closed_form_bounds, iterate_ii, lower_bound, path_indicator_delta, sqrt_phi_function,
    upper_bound,
};
use crate::error::{Error, Result};
use crate::func::{check_domain, DomainTag, Family, VertexFunction};
use crate::io::{parse_function, parse_tree, serialize_function, serialize_tree};
use crate::report::{
    ClosedFormSummary, DomainCheckSummary, ExactSummary, Report, Status,
};
use crate::solve::{
    build_dirichlet_matrix, eigen_ratio, flat_extension, lambda0_sequence, ratio_function,
    smallest_eigenpair,
};
use crate::tree::{random_tree, Branching, Measure, RootedTree};

#[derive(Parser)]
#[command(
    name = "treegap",
    about = "First Dirichlet eigenvalue of birth-death processes on rooted trees: exact values, certified bounds, truncation ladders"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct OutputOpts {
    /// Emit the report as JSON instead of plain text.
    #[arg(long)]
    json: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the Dirichlet eigenproblem exactly.
    Exact {
        /// Tree file.
        file: PathBuf,
        /// Also write the eigenfunction to this path in vertex-function format.
        #[arg(long, value_name = "PATH")]
        write_g: Option<PathBuf>,
        #[command(flatten)]
        out: OutputOpts,
    },
    /// Closed-form estimates and certified bounds from built-in witnesses.
    Bounds {
        /// Tree file.
        file: PathBuf,
        /// Refinement iteration steps; reports the final step's certificates.
        #[arg(long, value_name = "K")]
        iterate: Option<usize>,
        /// Witness families to certify (comma separated:
        /// F_I, F_II, W, F_I_mod, F_II_mod, W_mod).
        #[arg(long, value_delimiter = ',', default_value = "F_I")]
        families: Vec<String>,
        #[command(flatten)]
        out: OutputOpts,
    },
    /// Eigenvalues of the truncation ladder at the given layers.
    Approx {
        /// Tree file.
        file: PathBuf,
        /// Truncation layers, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        layers: Vec<usize>,
        #[command(flatten)]
        out: OutputOpts,
    },
    /// Check an externally supplied witness and certify its bound.
    Certify {
        /// Tree file.
        file: PathBuf,
        /// Witness in vertex-function format.
        #[arg(long)]
        witness: PathBuf,
        /// Family to check against.
        #[arg(long)]
        family: String,
        /// Cutoff layer for the modified families; inferred from the
        /// witness when omitted.
        #[arg(long)]
        cutoff: Option<usize>,
        /// Also solve exactly and verify the certificate against it.
        #[arg(long)]
        check_exact: bool,
        #[command(flatten)]
        out: OutputOpts,
    },
    /// Generate a random tree file on standard output.
    Random {
        #[arg(long)]
        seed: u64,
        /// Upper bound on the vertex count (the count is seed-dependent).
        #[arg(long)]
        size: usize,
        #[arg(long)]
        rate_min: f64,
        #[arg(long)]
        rate_max: f64,
        /// Generate a single branch instead of a branching tree.
        #[arg(long)]
        path: bool,
    },
}

/// Parse the process arguments, run, print, and return the exit code.
pub fn run() -> i32 {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok((output, code)) => {
            print!("{output}");
            code
        }
        Err(err) => {
            eprintln!("error: {err}");
            err.exit_code()
        }
    }
}

fn load_tree(path: &PathBuf) -> Result<(RootedTree, Measure)> {
    let text = fs::read_to_string(path)?;
    let tree = parse_tree(&text)?;
    let measure = Measure::for_tree(&tree);
    Ok((tree, measure))
}

fn execute(command: Command) -> Result<(String, i32)> {
    match command {
        Command::Exact { file, write_g, out } => {
            let (tree, measure) = load_tree(&file)?;
            let mut report = Report::new(&tree, &measure);
            let mut code = 0;
            match smallest_eigenpair(&build_dirichlet_matrix(&tree, &measure)) {
                Ok(pair) => {
                    if let Some(path) = write_g {
                        fs::write(path, serialize_function(&pair.g))?;
                    }
                    report.exact = Some(ExactSummary::new(&tree, &pair));
                }
                Err(Error::ConvergenceFailure { estimate, residual }) => {
                    report.status = Status::Partial;
                    report.messages.push(format!(
                        "eigensolver hit the iteration cap; best estimate {estimate}, residual {residual}"
                    ));
                    code = 3;
                }
                Err(other) => return Err(other),
            }
            Ok((render(&report, out.json), code))
        }
        Command::Bounds { file, iterate, families, out } => {
            let (tree, measure) = load_tree(&file)?;
            let mut report = Report::new(&tree, &measure);
            report.closed_form = Some(ClosedFormSummary::from(&closed_form_bounds(&tree, &measure)));
            report.delta_path_indicator = Some(path_indicator_delta(&tree, &measure));
            let parsed: Vec<Family> = families
                .iter()
                .map(|s| s.parse())
                .collect::<Result<_>>()?;
            for family in parsed {
                push_family_certificates(&tree, &measure, family, &mut report)?;
            }
            if let Some(steps) = iterate {
                let f0 = VertexFunction::constant_one(tree.vertex_count());
                let trace = iterate_ii(&tree, &measure, &f0, steps)?;
                let last = trace.last().unwrap();
                report.certificates.push(last.lower.clone());
                report.certificates.push(last.upper.clone());
            }
            Ok((render(&report, out.json), 0))
        }
        Command::Approx { file, layers, out } => {
            let (tree, measure) = load_tree(&file)?;
            let mut report = Report::new(&tree, &measure);
            let ladder = lambda0_sequence(&tree, &measure, &layers)?;
            report.approx = ladder.iter().map(|level| (level.m, level.lambda0)).collect();
            Ok((render(&report, out.json), 0))
        }
        Command::Certify { file, witness, family, cutoff, check_exact, out } => {
            let (tree, measure) = load_tree(&file)?;
            let witness_text = fs::read_to_string(&witness)?;
            let witness = parse_function(&witness_text, tree.vertex_count())?;
            let family: Family = family.parse()?;
            let tag = if family.is_modified() {
                let n = cutoff.unwrap_or_else(|| infer_cutoff(&tree, &witness, family));
                DomainTag::modified(family, n)?
            } else {
                DomainTag::base(family)?
            };
            let mut report = Report::new(&tree, &measure);
            let check = check_domain(&tree, &witness, &tag);
            report.domain_check = Some(DomainCheckSummary {
                family: family.name().to_string(),
                cutoff: tag.cutoff,
                passed: check.passed,
                violation: check
                    .violation
                    .as_ref()
                    .map(|v| (v.vertex, v.condition.clone())),
            });
            if !check.passed {
                report.status = Status::Failed;
                return Ok((render(&report, out.json), 2));
            }
            let cert = if family.is_modified() {
                upper_bound(&tree, &measure, &witness, tag)?
            } else {
                lower_bound(&tree, &measure, &witness, tag)?
            };
            let mut code = 0;
            if check_exact {
                let pair = smallest_eigenpair(&build_dirichlet_matrix(&tree, &measure))?;
                let tol = 1e-8 * pair.lambda0;
                let consistent = if family.is_modified() {
                    cert.value >= pair.lambda0 - tol
                } else {
                    cert.value <= pair.lambda0 + tol
                };
                report.messages.push(format!(
                    "exact lambda0 {} {} certificate {}",
                    crate::report::fmt_sig(pair.lambda0),
                    if consistent { "consistent with" } else { "INCONSISTENT with" },
                    crate::report::fmt_sig(cert.value)
                ));
                if !consistent {
                    report.status = Status::Failed;
                    code = 2;
                }
            }
            report.certificates.push(cert);
            Ok((render(&report, out.json), code))
        }
        Command::Random { seed, size, rate_min, rate_max, path } => {
            let branching = if path { Branching::Path } else { Branching::UniformAttachment };
            let tree = random_tree(seed, size, (rate_min, rate_max), branching)?;
            Ok((serialize_tree(&tree), 0))
        }
    }
}

/// Built-in witnesses for the bounds subcommand: the square-root
/// resistance function, one refinement step from the flat function, the
/// eigenfunction's edge ratios, and the flat extensions of every
/// truncation level in both increasing-function and ratio form.
fn push_family_certificates(
    tree: &RootedTree,
    measure: &Measure,
    family: Family,
    report: &mut Report,
) -> Result<()> {
    match family {
        Family::FI => {
            let f = sqrt_phi_function(tree, measure);
            let cert = lower_bound(tree, measure, &f, DomainTag::base(Family::FI)?)?;
            report.certificates.push(cert);
        }
        Family::FII => {
            let f0 = VertexFunction::constant_one(tree.vertex_count());
            let step = iterate_ii(tree, measure, &f0, 1)?.pop().unwrap();
            report.certificates.push(step.lower);
        }
        Family::W => {
            let pair = smallest_eigenpair(&build_dirichlet_matrix(tree, measure))?;
            let w = eigen_ratio(tree, &pair)?;
            let cert = lower_bound(tree, measure, &w, DomainTag::base(Family::W)?)?;
            report.certificates.push(cert);
        }
        Family::FIMod | Family::FIIMod | Family::WMod => {
            let all_layers: Vec<usize> = (1..=tree.max_layer()).collect();
            let ladder = lambda0_sequence(tree, measure, &all_layers)?;
            for level in &ladder {
                let extended = flat_extension(tree, &level.collapsed, &level.pair)?;
                let tag = DomainTag::modified(family, level.m)?;
                let witness = if family == Family::WMod {
                    ratio_function(tree, &extended, false)?
                } else {
                    extended
                };
                report.certificates.push(upper_bound(tree, measure, &witness, tag)?);
            }
        }
    }
    Ok(())
}

/// Smallest admissible cutoff for a modified-family witness: the deepest
/// layer at which the witness still moves (differs from its parent, or
/// from 1 for ratio functions), and at least 1.
fn infer_cutoff(tree: &RootedTree, witness: &VertexFunction, family: Family) -> usize {
    let mut cutoff = 1;
    for v in 1..tree.vertex_count() {
        let moving = match family {
            Family::WMod => witness.get(v) != 1.0,
            _ => witness.get(v) != witness.get(tree.parent(v).unwrap()),
        };
        if moving {
            cutoff = cutoff.max(tree.layer(v));
        }
    }
    cutoff.min(tree.max_layer())
}

fn render(report: &Report, json: bool) -> String {
    if json {
        report.render_json()
    } else {
        report.render_text()
    }
}

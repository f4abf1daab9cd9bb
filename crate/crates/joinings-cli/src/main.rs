//! Batch command-line front end for the joinings library.
//!
//! Exit codes: 0 affirmative/success, 1 input or validation error, 2
//! resource cap exceeded, 3 negative finding (not disjoint, criterion
//! violated, oracle refuted).

mod files;
mod report;

use std::path::{Path, PathBuf};
use std::process::exit;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use num::Zero;

use joinings::asymptotics::{
    furstenberg_average, mixing_report, ornstein_check, triple_correlation, CylinderSet,
    MarkovShift,
};
use joinings::independence::{
    haar_oracle, support_growth, uniform_law_oracle, FiniteAbelianGroup, GrowthVerdict,
    Hypothesis, IndependenceError, TripleLaw,
};
use joinings::scalar::Scalar;
use joinings::{
    ergodic_decomposition, is_disjoint, joining_metric, joining_polytope, product_joining,
    rel_indep_joining, validate_joining, Caps, Coupling, FactorMap, FactorPair, FiniteSystem,
    JoiningError, ProbVector, Rational, RelativeError,
};

use files::{
    coupling_to_file, load_coupling_parts, load_finite, load_markov, load_triple_law,
    parse_cylinder_words, parse_rational, system_to_file, weights_to_strings, AnyShift,
};
use report::{
    describe_system, emit_json, factor_report, matrix_lines, obvious_label, print_matrix,
    rational_matrix_lines, table_lines, ComponentReport, DecomposeReport, DisjointReport,
    FactorsReport, GrowthJson, HaarJson, MetricReport, MixingJson, OrnsteinJson, RelativeReport,
    UniformOracleJson, ValueJson, SCHEMA_VERSION,
};

/// Exact-mode horizons beyond this need `--float` (rational numerators grow
/// without bound along matrix powers).
const RATIONAL_HORIZON_CAP: usize = 1024;

const EXIT_OK: i32 = 0;
const EXIT_INPUT: i32 = 1;
const EXIT_CAP: i32 = 2;
const EXIT_NEGATIVE: i32 = 3;

/// A failure with its exit code.
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    pub fn input(message: String) -> Self {
        Failure {
            code: EXIT_INPUT,
            message,
        }
    }

    pub fn cap(message: String) -> Self {
        Failure {
            code: EXIT_CAP,
            message,
        }
    }
}

impl From<JoiningError> for Failure {
    fn from(e: JoiningError) -> Self {
        let code = match e {
            JoiningError::DimensionCapExceeded { .. }
            | JoiningError::BruteForceCapExceeded { .. } => EXIT_CAP,
            _ => EXIT_INPUT,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<RelativeError> for Failure {
    fn from(e: RelativeError) -> Self {
        match e {
            RelativeError::BruteForceCapExceeded { .. } => Failure::cap(e.to_string()),
            RelativeError::Joining(inner) => inner.into(),
            other => Failure::input(other.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "joinings",
    version,
    about = "Exact joinings of finite measure-preserving systems: disjointness, ergodic joinings, relative products, Markov mixing statistics, triple-law oracles"
)]
struct Cli {
    /// Emit a machine-readable JSON report (schema version 1)
    #[arg(long, global = true)]
    json: bool,
    /// Binary64 arithmetic: accept decimal transition entries and long
    /// horizons
    #[arg(long, global = true)]
    float: bool,
    /// Override the product-grid cell cap for polytope operations
    /// (default 64)
    #[arg(long, global = true)]
    cap: Option<usize>,
    /// Reserved for sampled property checks; accepted, currently unused
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether two finite systems are disjoint (only joining =
    /// product). Exit 0 when disjoint, 3 with a witness when not.
    Disjoint { left: PathBuf, right: PathBuf },
    /// Joining polytope work: vertex listing, ergodic decomposition, or the
    /// joining metric.
    Joinings {
        left: PathBuf,
        right: PathBuf,
        #[command(flatten)]
        mode: JoiningsMode,
    },
    /// Relatively independent joining over a shared factor pair.
    Relative {
        left: PathBuf,
        right: PathBuf,
        /// Two factor maps onto a shared target: comma-separated images,
        /// maps joined by ';', e.g. "0,1,0,1;0,1,0,1"
        #[arg(long, value_name = "MAPS")]
        factor_pair: String,
    },
    /// List all factors of a finite system (one per invariant partition).
    Factors { system: PathBuf },
    /// Markov-shift statistics over cylinder sets.
    Mixing {
        markov: PathBuf,
        /// Cylinder sets as comma-separated words, e.g. "01,10" (2 sets for
        /// correlations, k+1 for --furstenberg, 3 for --triple)
        #[arg(long, num_args = 1..=8, required = true)]
        sets: Vec<String>,
        /// Largest shift n for correlation columns
        #[arg(long, default_value_t = 20)]
        horizon: usize,
        /// Check limsup c_n ≤ θ·μ(A)μ(B); exit 3 when violated
        #[arg(long, value_name = "THETA", conflicts_with_all = ["furstenberg", "triple"])]
        ornstein: Option<String>,
        /// Multiple-recurrence average: k and n
        #[arg(long, num_args = 2, value_names = ["K", "N"], conflicts_with = "triple")]
        furstenberg: Option<Vec<usize>>,
        /// Triple correlation μ(A ∩ T⁻ⁿB ∩ T⁻⁽ⁿ⁺ᵐ⁾C): n and m
        #[arg(long, num_args = 2, value_names = ["N", "M"])]
        triple: Option<Vec<usize>>,
    },
    /// Triple-law oracles: uniform-law, Haar, support growth.
    Triple {
        /// Law tensor file; omit when using --xor
        law: Option<PathBuf>,
        /// Build the law of (w, w', w⊕w'): letter probability p of 0 and
        /// word length m
        #[arg(long, num_args = 2, value_names = ["P", "M"])]
        xor: Option<Vec<String>>,
        /// Verify the uniform-law conclusion (π = Mπ)
        #[arg(long, conflicts_with_all = ["haar", "growth"])]
        uniform_oracle: bool,
        /// Verify the Haar conclusion over the given group (invariant
        /// factors, e.g. "4" or "2,4")
        #[arg(long, value_name = "FACTORS", conflicts_with = "growth")]
        haar: Option<String>,
        /// Conditional-support growth a_1..a_M for the --xor family
        #[arg(long, value_name = "M")]
        growth: Option<usize>,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct JoiningsMode {
    /// List every vertex (ergodic joining) in canonical order
    #[arg(long)]
    vertices: bool,
    /// Decompose the coupling in FILE into ergodic components
    #[arg(long, value_name = "FILE")]
    decompose: Option<PathBuf>,
    /// Exact metric distance between two coupling files
    #[arg(long, num_args = 2, value_names = ["C1", "C2"])]
    metric: Option<Vec<PathBuf>>,
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_INPUT,
            };
            let _ = e.print();
            exit(code);
        }
    };
    match run(cli) {
        Ok(code) => exit(code),
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            exit(failure.code);
        }
    }
}

fn run(cli: Cli) -> Result<i32, Failure> {
    let caps = match cli.cap {
        Some(cells) => Caps::with_cells(cells),
        None => Caps::default(),
    };
    let _ = cli.seed; // reserved
    match &cli.command {
        Command::Disjoint { left, right } => cmd_disjoint(&cli, &caps, left, right),
        Command::Joinings { left, right, mode } => cmd_joinings(&cli, &caps, left, right, mode),
        Command::Relative {
            left,
            right,
            factor_pair,
        } => cmd_relative(&cli, left, right, factor_pair),
        Command::Factors { system } => cmd_factors(&cli, &caps, system),
        Command::Mixing {
            markov,
            sets,
            horizon,
            ornstein,
            furstenberg,
            triple,
        } => cmd_mixing(
            &cli,
            markov,
            sets,
            *horizon,
            ornstein.as_deref(),
            furstenberg.as_deref(),
            triple.as_deref(),
        ),
        Command::Triple {
            law,
            xor,
            uniform_oracle,
            haar,
            growth,
        } => cmd_triple(
            &cli,
            law.as_deref(),
            xor.as_deref(),
            *uniform_oracle,
            haar.as_deref(),
            *growth,
        ),
    }
}

fn cmd_disjoint(cli: &Cli, caps: &Caps, left: &Path, right: &Path) -> Result<i32, Failure> {
    let l = load_finite(left)?;
    let r = load_finite(right)?;
    let disjoint = is_disjoint(&l, &r, caps)?;
    let witness = if disjoint {
        None
    } else {
        // the product lies in the relative interior of a positive-dimensional
        // polytope, so the first vertex is always a non-product witness
        let vertices = joining_polytope(&l, &r).enumerate_vertices(caps)?;
        Some(vertices[0].clone())
    };
    if cli.json {
        emit_json(&DisjointReport {
            schema: SCHEMA_VERSION,
            command: "disjoint",
            left: system_to_file(&l),
            right: system_to_file(&r),
            disjoint,
            witness: witness.as_ref().map(coupling_to_file),
        });
    } else {
        println!("{}", describe_system("left ", &l));
        println!("{}", describe_system("right", &r));
        if disjoint {
            println!("disjoint");
        } else {
            println!("not disjoint");
            let w = witness.as_ref().unwrap();
            let label = obvious_label(w.left(), w.right(), w.weights())
                .map(|l| format!(" ({l})"))
                .unwrap_or_default();
            println!("witness (non-product ergodic joining){label}:");
            print_matrix(w.weights(), "  ");
        }
    }
    Ok(if disjoint { EXIT_OK } else { EXIT_NEGATIVE })
}

fn load_coupling_for(
    path: &Path,
    left: &FiniteSystem,
    right: &FiniteSystem,
) -> Result<Coupling, Failure> {
    let (l, r, weights) = load_coupling_parts(path)?;
    if &l != left || &r != right {
        return Err(Failure::input(format!(
            "{}: coupling systems differ from the command-line systems",
            path.display()
        )));
    }
    validate_joining(left, right, weights).map_err(Failure::from)
}

fn cmd_joinings(
    cli: &Cli,
    caps: &Caps,
    left: &Path,
    right: &Path,
    mode: &JoiningsMode,
) -> Result<i32, Failure> {
    let l = load_finite(left)?;
    let r = load_finite(right)?;
    if mode.vertices {
        let polytope = joining_polytope(&l, &r);
        let vertices = polytope.enumerate_vertices(caps)?;
        if cli.json {
            emit_json(&report::vertices_report(&vertices, polytope.dimension()));
        } else {
            println!("{}", describe_system("left ", &l));
            println!("{}", describe_system("right", &r));
            println!(
                "polytope dimension {}, {} vertices",
                polytope.dimension(),
                vertices.len()
            );
            for (i, v) in vertices.iter().enumerate() {
                let label = obvious_label(v.left(), v.right(), v.weights())
                    .map(|l| format!(" ({l})"))
                    .unwrap_or_default();
                println!("vertex {}{label}:", i + 1);
                print_matrix(v.weights(), "  ");
            }
        }
        return Ok(EXIT_OK);
    }
    if let Some(path) = &mode.decompose {
        let coupling = load_coupling_for(path, &l, &r)?;
        let decomposition = ergodic_decomposition(&coupling);
        let components: Vec<ComponentReport> = decomposition
            .components()
            .iter()
            .map(|c| ComponentReport {
                weight: c.weight.to_string(),
                matrix: weights_to_strings(&c.matrix),
                label: obvious_label(&l, &r, &c.matrix),
            })
            .collect();
        if cli.json {
            emit_json(&DecomposeReport {
                schema: SCHEMA_VERSION,
                command: "joinings",
                components,
            });
        } else {
            println!("{} ergodic components", components.len());
            let summary: Vec<String> = components
                .iter()
                .enumerate()
                .map(|(i, c)| {
                    let name = c
                        .label
                        .clone()
                        .unwrap_or_else(|| format!("component {}", i + 1));
                    format!("{} · {name}", c.weight)
                })
                .collect();
            println!("{}", summary.join(" + "));
            for (i, c) in components.iter().enumerate() {
                println!(
                    "component {} (weight {}){}:",
                    i + 1,
                    c.weight,
                    c.label
                        .as_ref()
                        .map(|l| format!(" = {l}"))
                        .unwrap_or_default()
                );
                for line in matrix_lines(&c.matrix) {
                    println!("  {line}");
                }
            }
        }
        return Ok(EXIT_OK);
    }
    if let Some(paths) = &mode.metric {
        let c1 = load_coupling_for(&paths[0], &l, &r)?;
        let c2 = load_coupling_for(&paths[1], &l, &r)?;
        let d = joining_metric(&c1, &c2)?;
        if cli.json {
            emit_json(&MetricReport {
                schema: SCHEMA_VERSION,
                command: "joinings",
                distance: d.to_string(),
            });
        } else {
            println!("{d}");
        }
        return Ok(EXIT_OK);
    }
    unreachable!("clap enforces one mode");
}

/// Builds the quotient system determined by a factor map's fibers, checking
/// consistency on the way.
fn derive_target(source: &FiniteSystem, map: &[usize]) -> Result<FiniteSystem, Failure> {
    if map.len() != source.size() {
        return Err(Failure::input(format!(
            "factor map has {} entries for {} states",
            map.len(),
            source.size()
        )));
    }
    let nz = map.iter().max().copied().unwrap_or(0) + 1;
    let mut image = vec![usize::MAX; nz];
    let mut masses = vec![Rational::zero(); nz];
    for x in 0..source.size() {
        let z = map[x];
        let iz = map[source.apply(x)];
        if image[z] == usize::MAX {
            image[z] = iz;
        } else if image[z] != iz {
            return Err(Failure::input(format!(
                "factor map is inconsistent: fiber {z} maps to both {} and {iz}",
                image[z]
            )));
        }
        masses[z] += source.mass(x);
    }
    if image.contains(&usize::MAX) {
        return Err(Failure::input(
            "factor map misses some target state (labels must be 0..k)".into(),
        ));
    }
    let perm = joinings::Perm::new(image)
        .map_err(|e| Failure::input(format!("induced quotient map: {e}")))?;
    let measure = ProbVector::new(masses)
        .map_err(|e| Failure::input(format!("induced quotient measure: {e}")))?;
    FiniteSystem::new(perm, measure)
        .map_err(|e| Failure::input(format!("induced quotient system: {e}")))
}

fn cmd_relative(
    cli: &Cli,
    left: &Path,
    right: &Path,
    factor_pair: &str,
) -> Result<i32, Failure> {
    let l = load_finite(left)?;
    let r = load_finite(right)?;
    let parts: Vec<&str> = factor_pair.split(';').collect();
    let [left_part, right_part] = parts.as_slice() else {
        return Err(Failure::input(
            "--factor-pair wants two maps separated by ';'".into(),
        ));
    };
    let parse_map = |spec: &str| -> Result<Vec<usize>, Failure> {
        spec.split(',')
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|_| Failure::input(format!("bad factor-map entry {t:?}")))
            })
            .collect()
    };
    let left_map = parse_map(left_part)?;
    let right_map = parse_map(right_part)?;
    let target = derive_target(&l, &left_map)?;
    let pi_l = FactorMap::new(l.clone(), target.clone(), left_map)
        .map_err(|e| Failure::input(format!("left factor map: {e}")))?;
    let pi_r = FactorMap::new(r.clone(), target.clone(), right_map)
        .map_err(|e| Failure::input(format!("right factor map: {e}")))?;
    let pair = FactorPair::new(pi_l, pi_r)?;
    let joining = rel_indep_joining(&pair);
    let equals_product = joining == product_joining(&l, &r);
    if cli.json {
        emit_json(&RelativeReport {
            schema: SCHEMA_VERSION,
            command: "relative",
            target: system_to_file(&target),
            joining: coupling_to_file(&joining),
            equals_product,
        });
    } else {
        println!("{}", describe_system("target", &target));
        println!("relatively independent joining:");
        print_matrix(joining.weights(), "  ");
        if equals_product {
            println!("equals the product measure (trivial factor)");
        } else {
            println!("differs from the product measure (non-disjointness witness)");
        }
    }
    Ok(EXIT_OK)
}

fn cmd_factors(cli: &Cli, caps: &Caps, system: &Path) -> Result<i32, Failure> {
    let t = load_finite(system)?;
    let factors = joinings::enumerate_factors(&t, caps)?;
    if cli.json {
        emit_json(&FactorsReport {
            schema: SCHEMA_VERSION,
            command: "factors",
            count: factors.len(),
            factors: factors.iter().map(factor_report).collect(),
        });
    } else {
        println!("{}", describe_system("system", &t));
        println!("{} factors (one per invariant partition)", factors.len());
        for (i, f) in factors.iter().enumerate() {
            let blocks = report::factor_report(f).blocks;
            let rendered: Vec<String> = blocks
                .iter()
                .map(|b| {
                    format!(
                        "{{{}}}",
                        b.iter()
                            .map(|x| x.to_string())
                            .collect::<Vec<_>>()
                            .join(",")
                    )
                })
                .collect();
            println!(
                "factor {}: {} target states, partition {}",
                i + 1,
                f.target().size(),
                rendered.join(" ")
            );
        }
    }
    Ok(EXIT_OK)
}

fn cylinder_sets(
    specs: &[String],
    alphabet: &[String],
) -> Result<Vec<CylinderSet>, Failure> {
    specs
        .iter()
        .map(|spec| {
            let words = parse_cylinder_words(spec, alphabet)?;
            CylinderSet::new(alphabet.len(), words)
                .map_err(|e| Failure::input(format!("cylinder set {spec:?}: {e}")))
        })
        .collect()
}

#[allow(clippy::too_many_arguments)]
fn mixing_dispatch<W: Scalar>(
    cli: &Cli,
    shift: &MarkovShift<W>,
    sets: &[CylinderSet],
    horizon: usize,
    ornstein: Option<&str>,
    furstenberg: Option<&[usize]>,
    triple: Option<&[usize]>,
    mode: &'static str,
    parse_theta: impl Fn(&str) -> Result<W, Failure>,
) -> Result<i32, Failure> {
    if let Some(spec) = ornstein {
        let theta = parse_theta(spec)?;
        let [a, b] = sets else {
            return Err(Failure::input("--ornstein wants exactly 2 sets".into()));
        };
        let r = ornstein_check(shift, a, b, &theta, horizon)
            .map_err(|e| Failure::input(e.to_string()))?;
        if cli.json {
            emit_json(&OrnsteinJson {
                schema: SCHEMA_VERSION,
                command: "mixing",
                mode,
                theta: theta.to_string(),
                target: r.target.to_string(),
                bound: r.bound.to_string(),
                start: r.start,
                horizon: r.horizon,
                max_correlation: r.max_correlation.to_string(),
                tail_certified: r.tail_certified,
                satisfied: r.satisfied,
            });
        } else {
            println!("target μ(A)μ(B): {}", r.target);
            println!("bound θ·μ(A)μ(B): {}", r.bound);
            println!(
                "max c_n over n = {}..{}: {}",
                r.start, r.horizon, r.max_correlation
            );
            println!(
                "tail certified: {}",
                if r.tail_certified {
                    "yes (irreducible aperiodic: limsup = target)"
                } else {
                    "no (periodic chain, horizon scan only)"
                }
            );
            println!(
                "criterion: {}",
                if r.satisfied { "satisfied" } else { "violated" }
            );
        }
        return Ok(if r.satisfied { EXIT_OK } else { EXIT_NEGATIVE });
    }
    if let Some(args) = furstenberg {
        let (k, n) = (args[0], args[1]);
        if k < 1 || n < 1 {
            return Err(Failure::input("--furstenberg wants k ≥ 1 and n ≥ 1".into()));
        }
        if sets.len() != k + 1 {
            return Err(Failure::input(format!(
                "--furstenberg {k} wants k+1 = {} sets, got {}",
                k + 1,
                sets.len()
            )));
        }
        let refs: Vec<&CylinderSet> = sets.iter().collect();
        let value = furstenberg_average(shift, &refs, n);
        if cli.json {
            emit_json(&ValueJson {
                schema: SCHEMA_VERSION,
                command: "mixing",
                mode,
                value: value.to_string(),
            });
        } else {
            println!("furstenberg average (k = {k}, n = {n}): {value}");
        }
        return Ok(EXIT_OK);
    }
    if let Some(args) = triple {
        let (n, m) = (args[0], args[1]);
        let [a, b, c] = sets else {
            return Err(Failure::input("--triple wants exactly 3 sets".into()));
        };
        let value = triple_correlation(shift, a, b, c, n, m);
        if cli.json {
            emit_json(&ValueJson {
                schema: SCHEMA_VERSION,
                command: "mixing",
                mode,
                value: value.to_string(),
            });
        } else {
            println!("μ(A ∩ T^-{n}B ∩ T^-{}C) = {value}", n + m);
        }
        return Ok(EXIT_OK);
    }
    let [a, b] = sets else {
        return Err(Failure::input(
            "correlation report wants exactly 2 sets".into(),
        ));
    };
    let r = mixing_report(shift, a, b, horizon).map_err(|e| Failure::input(e.to_string()))?;
    if cli.json {
        emit_json(&MixingJson {
            schema: SCHEMA_VERSION,
            command: "mixing",
            mode,
            target: r.target.to_string(),
            certificate: r.certificate,
            aperiodic: r.aperiodic,
            mixing: r.mixing,
            correlations: r.correlations.iter().map(|c| c.to_string()).collect(),
        });
    } else {
        println!("target μ(A)μ(B): {}", r.target);
        println!("decay certificate |λ₂|: {:.6}", r.certificate);
        println!(
            "mixing: {}",
            if r.mixing {
                "yes (irreducible, aperiodic)"
            } else {
                "no (periodic)"
            }
        );
        let mut rows: Vec<Vec<String>> = vec![vec!["n".into(), "c_n = μ(A ∩ T^-n B)".into()]];
        rows.extend(
            r.correlations
                .iter()
                .enumerate()
                .map(|(n, c)| vec![n.to_string(), c.to_string()]),
        );
        for line in table_lines(&rows) {
            println!("  {line}");
        }
    }
    // correlation columns are a report, not a verdict: always exit 0
    Ok(EXIT_OK)
}

fn cmd_mixing(
    cli: &Cli,
    markov: &Path,
    set_specs: &[String],
    horizon: usize,
    ornstein: Option<&str>,
    furstenberg: Option<&[usize]>,
    triple: Option<&[usize]>,
) -> Result<i32, Failure> {
    let loaded = load_markov(markov, cli.float)?;
    let sets = cylinder_sets(set_specs, &loaded.alphabet)?;
    let reach = furstenberg
        .map(|a| a[0] * a[1])
        .or(triple.map(|a| a[0] + a[1]))
        .unwrap_or(horizon);
    if !cli.float && reach > RATIONAL_HORIZON_CAP {
        return Err(Failure::cap(format!(
            "horizon {reach} beyond the exact-mode cap of {RATIONAL_HORIZON_CAP}; pass --float"
        )));
    }
    match &loaded.shift {
        AnyShift::Exact(shift) => mixing_dispatch(
            cli,
            shift,
            &sets,
            horizon,
            ornstein,
            furstenberg,
            triple,
            "exact",
            parse_rational,
        ),
        AnyShift::Float(shift) => mixing_dispatch(
            cli,
            shift,
            &sets,
            horizon,
            ornstein,
            furstenberg,
            triple,
            "binary64",
            |spec| {
                parse_rational(spec)
                    .map(|r| Scalar::to_f64(&r))
                    .or_else(|_| {
                        spec.parse::<f64>()
                            .map_err(|_| Failure::input(format!("bad θ value {spec:?}")))
                    })
            },
        ),
    }
}

fn hypothesis_lines(checked: &[Hypothesis], failed: Option<Hypothesis>) -> Vec<String> {
    let mut lines = Vec::new();
    for h in checked {
        if Some(*h) == failed {
            lines.push(format!("{h}: FAILED"));
            break;
        }
        lines.push(format!("{h}: ok"));
    }
    lines
}

fn cmd_triple(
    cli: &Cli,
    law_path: Option<&Path>,
    xor: Option<&[String]>,
    uniform: bool,
    haar: Option<&str>,
    growth: Option<usize>,
) -> Result<i32, Failure> {
    let xor_p: Option<ProbVector> = xor
        .map(|args| -> Result<ProbVector, Failure> {
            let p = parse_rational(&args[0])?;
            let q = Rational::from_integer(1.into()) - &p;
            ProbVector::new(vec![p, q])
                .map_err(|e| Failure::input(format!("--xor probability: {e}")))
        })
        .transpose()?;

    if let Some(horizon) = growth {
        // growth needs the word-family builder, i.e. --xor
        let Some(p) = &xor_p else {
            return Err(Failure::input(
                "--growth needs --xor to define the word family".into(),
            ));
        };
        if horizon < 1 {
            return Err(Failure::input("--growth wants M ≥ 1".into()));
        }
        let result = support_growth(2, horizon, |m| {
            joinings::independence::xor_triple(p, m).expect("xor family is well-formed")
        })
        .map_err(|e| Failure::input(e.to_string()))?;
        let verdict = match result.verdict {
            GrowthVerdict::Periodic { at } => format!("periodic (a_m = 1 from m = {at})"),
            GrowthVerdict::EntropyAtLeastLog2 => "entropy ≥ log 2 (a_m ≥ 2 throughout)".into(),
        };
        if cli.json {
            emit_json(&GrowthJson {
                schema: SCHEMA_VERSION,
                command: "triple",
                mode: "growth",
                sequence: result.sequence.clone(),
                verdict: verdict.clone(),
            });
        } else {
            let mut rows: Vec<Vec<String>> = vec![vec!["m".into(), "a_m".into()]];
            rows.extend(
                result
                    .sequence
                    .iter()
                    .enumerate()
                    .map(|(i, a)| vec![(i + 1).to_string(), a.to_string()]),
            );
            for line in table_lines(&rows) {
                println!("  {line}");
            }
            println!("verdict: {verdict}");
        }
        return Ok(EXIT_OK);
    }

    let law: TripleLaw = match (law_path, &xor_p) {
        (Some(path), None) => load_triple_law(path)?,
        (None, Some(p)) => {
            let m: usize = xor.unwrap()[1]
                .parse()
                .map_err(|_| Failure::input("bad --xor word length".into()))?;
            joinings::independence::xor_triple(p, m)
                .map_err(|e| Failure::input(e.to_string()))?
        }
        (Some(_), Some(_)) => {
            return Err(Failure::input(
                "give either a law file or --xor, not both".into(),
            ))
        }
        (None, None) => {
            return Err(Failure::input(
                "give a law file or --xor to define the triple law".into(),
            ))
        }
    };

    if uniform {
        let gates = [
            Hypothesis::IdenticalMarginals,
            Hypothesis::PairwiseIndependence,
            Hypothesis::FunctionalRelation,
        ];
        match uniform_law_oracle(&law) {
            Ok(cert) => {
                if cli.json {
                    emit_json(&UniformOracleJson {
                        schema: SCHEMA_VERSION,
                        command: "triple",
                        mode: "uniform-oracle",
                        hypotheses: hypothesis_lines(&gates, None),
                        support: cert.support.clone(),
                        bistochastic: cert
                            .bistochastic
                            .iter()
                            .map(|row| row.iter().map(|x| x.to_string()).collect())
                            .collect(),
                        confirmed: true,
                    });
                } else {
                    println!("hypotheses:");
                    for line in hypothesis_lines(&gates, None) {
                        println!("  {line}");
                    }
                    let support: Vec<String> =
                        cert.support.iter().map(|s| s.to_string()).collect();
                    println!("uniform on {{{}}}: confirmed", support.join(", "));
                    println!("bistochastic fixed-point matrix:");
                    print_matrix_strings(&cert.bistochastic);
                }
                Ok(EXIT_OK)
            }
            Err(e) => report_oracle_failure(cli, &gates, e),
        }
    } else if let Some(spec) = haar {
        let factors: Vec<usize> = spec
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|_| Failure::input(format!("bad group factor {t:?}")))
            })
            .collect::<Result<_, _>>()?;
        let group = if factors == [1] {
            FiniteAbelianGroup::cyclic(1)
        } else {
            FiniteAbelianGroup::new(factors).map_err(|e| Failure::input(e.to_string()))?
        };
        let gates = [
            Hypothesis::IdenticalMarginals,
            Hypothesis::PairwiseIndependence,
            Hypothesis::AdditiveRelation,
        ];
        match haar_oracle(&group, &law) {
            Ok(cert) => {
                if cli.json {
                    emit_json(&HaarJson {
                        schema: SCHEMA_VERSION,
                        command: "triple",
                        mode: "haar",
                        hypotheses: hypothesis_lines(&gates, None),
                        group: group.invariant_factors().to_vec(),
                        subgroup: cert.subgroup.clone(),
                        confirmed: true,
                    });
                } else {
                    println!("hypotheses:");
                    for line in hypothesis_lines(&gates, None) {
                        println!("  {line}");
                    }
                    let elements: Vec<String> =
                        cert.subgroup.iter().map(|h| h.to_string()).collect();
                    println!("H = {{{}}}, Haar: confirmed", elements.join(", "));
                }
                Ok(EXIT_OK)
            }
            Err(e) => report_oracle_failure(cli, &gates, e),
        }
    } else {
        Err(Failure::input(
            "pick one of --uniform-oracle, --haar, --growth".into(),
        ))
    }
}

fn print_matrix_strings(rows: &[Vec<Rational>]) {
    for line in rational_matrix_lines(rows) {
        println!("  {line}");
    }
}

fn report_oracle_failure(
    cli: &Cli,
    gates: &[Hypothesis],
    error: IndependenceError,
) -> Result<i32, Failure> {
    match error {
        IndependenceError::HypothesisFailed(h) => {
            if !cli.json {
                println!("hypotheses:");
                for line in hypothesis_lines(gates, Some(h)) {
                    println!("  {line}");
                }
            }
            Err(Failure::input(format!("hypothesis failed: {h}")))
        }
        IndependenceError::OracleRefuted(why) => Err(Failure {
            code: EXIT_NEGATIVE,
            message: format!("oracle refuted: {why}"),
        }),
        other => Err(Failure::input(other.to_string())),
    }
}

//! Command-line frontend: one subcommand per computational module plus a
//! selftest, each emitting a JSON Report.
//!
//! Exit codes: 0 success, 1 usage error, 2 input/validation error,
//! 3 numerical-tolerance failure.

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::Instant;

use crate::algebra::{self, StarAlgebra};
use crate::cloner::{self, ClonerDecomposition};
use crate::dixmier::{self, EigenSequence};
use crate::error::{Error, Result};
use crate::fock::{self, FockMode, PhaseSpacePoint};
use crate::gns::{self, IntertwinerOutcome};
use crate::io;
use crate::matrix::{self, c};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_TOLERANCE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "opalg", version, about = "Operator-algebra state numerics")]
struct Cli {
    #[command(flatten)]
    config: ConfigArgs,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Debug, Clone, Args)]
struct ConfigArgs {
    /// Numerical tolerance for validations and residual checks.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
    /// Fock cutoff used when a subcommand does not set its own.
    #[arg(long, global = true, default_value_t = 20)]
    cutoff: usize,
    /// Seed for every randomized fixture in the run.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Also write the Report to this path.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Serialize)]
struct RunConfig {
    tol: f64,
    cutoff: usize,
    seed: u64,
    format: Format,
}

#[derive(Debug, Serialize)]
struct Report {
    command: String,
    config: RunConfig,
    results: Value,
    residuals: BTreeMap<String, f64>,
    wall_time_ms: f64,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Inspect functionals: state validation, four-state decomposition,
    /// Born matrices between worlds.
    State {
        #[command(subcommand)]
        cmd: StateCmd,
    },
    /// GNS constructions, intertwiners, and central splits.
    Gns {
        #[command(subcommand)]
        cmd: GnsCmd,
    },
    /// Weyl operators and coherent states on truncated Fock spaces.
    Fock {
        #[command(subcommand)]
        cmd: FockCmd,
    },
    /// Covariant 1-to-2 cloners and fidelity scans.
    Cloner {
        #[command(subcommand)]
        cmd: ClonerCmd,
    },
    /// Log-mean eigenvalue sums and generalized-limit estimates.
    Dixmier {
        #[command(subcommand)]
        cmd: DixmierCmd,
    },
    /// Run the built-in invariant suite.
    Selftest,
}

#[derive(Debug, Subcommand)]
enum StateCmd {
    /// Validate a functional as a state on the full matrix algebra.
    Check {
        #[arg(long)]
        functional: PathBuf,
    },
    /// Decompose a functional into at most four weighted states.
    Decompose {
        #[arg(long)]
        functional: PathBuf,
    },
    /// Born transition matrix between two worlds.
    Born {
        #[arg(long)]
        world1: PathBuf,
        #[arg(long)]
        world2: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
enum GnsCmd {
    /// Run the GNS construction for a state on an algebra.
    Build {
        /// Algebra JSON; omit to use the full matrix algebra of the
        /// state's dimension.
        #[arg(long)]
        algebra: Option<PathBuf>,
        /// Functional JSON supplying the state.
        #[arg(long)]
        state: PathBuf,
    },
    /// Find the intertwiner between two stored representations.
    Equiv {
        #[arg(long)]
        rep1: PathBuf,
        #[arg(long)]
        rep2: PathBuf,
    },
    /// Central projection splitting a *-homomorphism's kernel.
    Split {
        #[arg(long)]
        algebra: PathBuf,
        /// Homomorphism images on the basis, in basis order.
        #[arg(long)]
        hom: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
enum FockCmd {
    /// Shielded-block Weyl relation residual.
    WeylResidual {
        #[arg(long)]
        d: usize,
        /// Interleaved coordinates, e.g. "1,0".
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
    },
    /// Coherent state vector W_alpha |0>.
    Coherent {
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        d: usize,
    },
}

#[derive(Debug, Subcommand)]
enum ClonerCmd {
    /// Decomposed fidelity scan over the normal weight c12.
    Scan {
        #[arg(long)]
        d: usize,
        /// Square phase-space grid, e.g. "5x5".
        #[arg(long, default_value = "5x5")]
        grid: String,
        #[arg(long, default_value_t = 11)]
        steps: usize,
        #[arg(long, default_value_t = 0.5)]
        spacing: f64,
    },
    /// Covariance residual of a channel over a grid of shifts.
    Covariance {
        #[arg(long)]
        channel: PathBuf,
        #[arg(long)]
        grid: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
enum DixmierCmd {
    /// Estimate the generalized limit of the log-mean series.
    Estimate {
        /// Formula for eta(k): "1/k", "1/k^p", "1/sqrt(k)", or a constant.
        #[arg(long, conflicts_with = "eigs")]
        formula: Option<String>,
        /// Explicit eigenvalue vector (matrix JSON, column).
        #[arg(long)]
        eigs: Option<PathBuf>,
        #[arg(long, default_value = "1e7")]
        horizon: String,
        #[arg(long, default_value_t = dixmier::DEFAULT_DEPTH)]
        depth: usize,
    },
}

/// Outcome of one subcommand: a results payload, named residuals, and
/// whether every checked tolerance held.
struct Outcome {
    results: Value,
    residuals: BTreeMap<String, f64>,
    within_tolerance: bool,
    /// Optional CSV rendering for --format csv.
    csv: Option<String>,
}

impl Outcome {
    fn new(results: Value) -> Self {
        Outcome {
            results,
            residuals: BTreeMap::new(),
            within_tolerance: true,
            csv: None,
        }
    }
}

pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            // clap renders its own usage/help text
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    if !(cli.config.tol > 0.0) {
        eprintln!("error: --tol must be positive");
        return EXIT_INVALID;
    }
    if cli.config.cutoff < 2 {
        eprintln!("error: --cutoff must be at least 2");
        return EXIT_INVALID;
    }
    if let Ok(threads) = std::env::var("OPALG_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }

    let started = Instant::now();
    let outcome = dispatch(&cli);
    let outcome = match outcome {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INVALID;
        }
    };

    let report = Report {
        command: command_echo(&cli.cmd),
        config: RunConfig {
            tol: cli.config.tol,
            cutoff: cli.config.cutoff,
            seed: cli.config.seed,
            format: cli.config.format,
        },
        results: outcome.results,
        residuals: outcome.residuals,
        wall_time_ms: started.elapsed().as_secs_f64() * 1e3,
    };
    let body = match (cli.config.format, &outcome.csv) {
        (Format::Csv, Some(csv)) => csv.clone(),
        (Format::Csv, None) => {
            eprintln!("error: --format csv only applies to `cloner scan`");
            return EXIT_INVALID;
        }
        (Format::Json, _) => io::to_pretty_json(&report),
    };
    println!("{}", body.trim_end());
    if let Some(path) = &cli.config.output {
        if let Err(e) = std::fs::write(path, &body) {
            eprintln!("error: cannot write {}: {e}", path.display());
            return EXIT_INVALID;
        }
    }
    if outcome.within_tolerance {
        EXIT_OK
    } else {
        EXIT_TOLERANCE
    }
}

fn command_echo(cmd: &Cmd) -> String {
    match cmd {
        Cmd::State { cmd } => format!("state {}", match cmd {
            StateCmd::Check { .. } => "check",
            StateCmd::Decompose { .. } => "decompose",
            StateCmd::Born { .. } => "born",
        }),
        Cmd::Gns { cmd } => format!("gns {}", match cmd {
            GnsCmd::Build { .. } => "build",
            GnsCmd::Equiv { .. } => "equiv",
            GnsCmd::Split { .. } => "split",
        }),
        Cmd::Fock { cmd } => format!("fock {}", match cmd {
            FockCmd::WeylResidual { .. } => "weyl-residual",
            FockCmd::Coherent { .. } => "coherent",
        }),
        Cmd::Cloner { cmd } => format!("cloner {}", match cmd {
            ClonerCmd::Scan { .. } => "scan",
            ClonerCmd::Covariance { .. } => "covariance",
        }),
        Cmd::Dixmier { cmd } => format!("dixmier {}", match cmd {
            DixmierCmd::Estimate { .. } => "estimate",
        }),
        Cmd::Selftest => "selftest".into(),
    }
}

fn dispatch(cli: &Cli) -> Result<Outcome> {
    let tol = cli.config.tol;
    match &cli.cmd {
        Cmd::State { cmd } => match cmd {
            StateCmd::Check { functional } => state_check(functional, tol),
            StateCmd::Decompose { functional } => state_decompose(functional, tol),
            StateCmd::Born { world1, world2 } => state_born(world1, world2, tol),
        },
        Cmd::Gns { cmd } => match cmd {
            GnsCmd::Build { algebra, state } => gns_build(algebra.as_deref(), state, tol),
            GnsCmd::Equiv { rep1, rep2 } => gns_equiv(rep1, rep2, tol),
            GnsCmd::Split { algebra, hom } => gns_split(algebra, hom, tol),
        },
        Cmd::Fock { cmd } => match cmd {
            FockCmd::WeylResidual { d, x, y } => fock_weyl_residual(*d, x, y),
            FockCmd::Coherent { alpha, d } => fock_coherent(alpha, *d),
        },
        Cmd::Cloner { cmd } => match cmd {
            ClonerCmd::Scan {
                d,
                grid,
                steps,
                spacing,
            } => cloner_scan(*d, grid, *steps, *spacing),
            ClonerCmd::Covariance { channel, grid } => cloner_covariance(channel, grid, tol),
        },
        Cmd::Dixmier { cmd } => match cmd {
            DixmierCmd::Estimate {
                formula,
                eigs,
                horizon,
                depth,
            } => dixmier_estimate(formula.as_deref(), eigs.as_deref(), horizon, *depth),
        },
        Cmd::Selftest => selftest(tol, cli.config.seed),
    }
}

fn state_check(path: &std::path::Path, tol: f64) -> Result<Outcome> {
    let f = io::load_functional(path)?;
    let full = StarAlgebra::full(f.ambient_dim);
    match algebra::is_state(&f, &full, tol) {
        Ok(state) => {
            let pure = algebra::is_pure(&state, &full, tol)?;
            let mut results = json!({
                "valid": true,
                "dim": f.ambient_dim,
                "pure": pure,
            });
            if f.ambient_dim == 2 {
                let b = algebra::bloch_point(&state)?;
                results["bloch"] = json!(b);
            }
            let mut out = Outcome::new(results);
            out.residuals
                .insert("normalization".into(), state.normalization_residual);
            out.residuals
                .insert("positivity_margin".into(), state.positivity_certificate);
            Ok(out)
        }
        Err(Error::NotAState(reason)) => {
            let mut out = Outcome::new(json!({
                "valid": false,
                "dim": f.ambient_dim,
                "reason": format!("{reason}"),
            }));
            out.within_tolerance = false;
            Ok(out)
        }
        Err(e) => Err(e),
    }
}

fn state_decompose(path: &std::path::Path, tol: f64) -> Result<Outcome> {
    let f = io::load_functional(path)?;
    let parts = algebra::four_state_decomposition(&f)?;
    let rebuilt = algebra::recombine(&parts, f.ambient_dim);
    let residual = matrix::max_abs(&(&rebuilt - &f.pairing));
    let results = json!({
        "components": parts
            .iter()
            .map(|p| json!({
                "weight": [p.0.re, p.0.im],
                "pairing": io::MatrixJson::from_matrix(p.1.pairing()),
            }))
            .collect::<Vec<_>>(),
    });
    let mut out = Outcome::new(results);
    out.residuals.insert("recombination".into(), residual);
    out.within_tolerance = residual <= tol.max(1e-10);
    Ok(out)
}

fn state_born(w1: &std::path::Path, w2: &std::path::Path, tol: f64) -> Result<Outcome> {
    let world1 = io::load_world(w1, tol)?;
    let world2 = io::load_world(w2, tol)?;
    let born = algebra::born_matrix(&world1, &world2)?;
    let n = born.nrows();
    let mut stochastic = 0.0_f64;
    for i in 0..n {
        stochastic = stochastic.max((born.row(i).sum() - 1.0).abs());
        stochastic = stochastic.max((born.column(i).sum() - 1.0).abs());
    }
    let rows: Vec<Vec<f64>> = (0..n).map(|i| born.row(i).iter().copied().collect()).collect();
    let mut out = Outcome::new(json!({ "dim": n, "born": rows }));
    out.residuals.insert("doubly_stochastic".into(), stochastic);
    out.within_tolerance = stochastic <= tol.max(1e-10);
    Ok(out)
}

fn gns_build(algebra_path: Option<&std::path::Path>, state_path: &std::path::Path, tol: f64) -> Result<Outcome> {
    let f = io::load_functional(state_path)?;
    let source = match algebra_path {
        Some(p) => io::load_algebra(p)?,
        None => StarAlgebra::full(f.ambient_dim),
    };
    let state = algebra::is_state(&f, &source, tol)?;
    let rep = gns::gns_construct(&source, &state, tol)?;
    let recon = gns::verify_reconstruction(&rep, &source.basis, tol)?;
    let mut out = Outcome::new(json!({
        "quotient_dim": rep.quotient_dim,
        "representation": io::RepresentationJson::from_representation(&rep),
    }));
    out.residuals.insert("reconstruction".into(), recon);
    out.within_tolerance = recon <= tol.max(1e-10);
    Ok(out)
}

fn gns_equiv(p1: &std::path::Path, p2: &std::path::Path, tol: f64) -> Result<Outcome> {
    let rep1 = io::load_representation(p1, tol)?;
    let rep2 = io::load_representation(p2, tol)?;
    match gns::intertwiner(&rep1, &rep2, tol)? {
        IntertwinerOutcome::Equivalent {
            unitary,
            unitarity_residual,
            intertwining_residual,
        } => {
            let mut out = Outcome::new(json!({
                "equivalent": true,
                "unitary": io::MatrixJson::from_matrix(&unitary),
            }));
            out.residuals.insert("unitarity".into(), unitarity_residual);
            out.residuals.insert("intertwining".into(), intertwining_residual);
            out.within_tolerance =
                unitarity_residual <= tol.max(1e-9) && intertwining_residual <= tol.max(1e-9);
            Ok(out)
        }
        IntertwinerOutcome::StatesDiffer { witness_index, delta } => {
            let mut out = Outcome::new(json!({
                "equivalent": false,
                "witness_index": witness_index,
                "delta": delta,
            }));
            out.within_tolerance = false;
            Ok(out)
        }
    }
}

fn gns_split(algebra_path: &std::path::Path, hom_path: &std::path::Path, tol: f64) -> Result<Outcome> {
    let source = io::load_algebra(algebra_path)?;
    let images = io::load_hom_images(hom_path)?;
    let split = gns::kernel_central_projection(&source, &images, tol)?;
    let mut out = Outcome::new(json!({
        "e": io::MatrixJson::from_matrix(&split.e),
        "kernel_dim": split.kernel_dim,
        "phi_injective": split.phi_injective,
    }));
    out.residuals.insert("phi".into(), split.phi_residual);
    out.within_tolerance = split.phi_residual <= tol.max(1e-9);
    Ok(out)
}

fn parse_point(text: &str) -> Result<PhaseSpacePoint> {
    let coords = text
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<std::result::Result<Vec<f64>, _>>()
        .map_err(|e| Error::InvalidArgument(format!("bad phase-space point {text:?}: {e}")))?;
    PhaseSpacePoint::new(coords)
}

fn fock_weyl_residual(d: usize, x: &str, y: &str) -> Result<Outcome> {
    let mode = FockMode::new(d)?;
    let x = parse_point(x)?;
    let y = parse_point(y)?;
    if x.modes() != y.modes() {
        return Err(Error::BadPhasePoint {
            expected: x.coords.len(),
            found: y.coords.len(),
        });
    }
    let residual = fock::weyl_relation_residual(&x, &y, &mode)?;
    let w = fock::weyl(&x, &mode);
    let unitarity = matrix::max_abs(&(w.adjoint() * &w - matrix::identity(w.nrows())));
    let mut out = Outcome::new(json!({
        "d": d,
        "x": x.coords,
        "y": y.coords,
    }));
    out.residuals.insert("weyl_relation".into(), residual);
    out.residuals.insert("unitarity".into(), unitarity);
    out.within_tolerance = unitarity <= 1e-10;
    Ok(out)
}

fn fock_coherent(alpha: &str, d: usize) -> Result<Outcome> {
    let mode = FockMode::new(d)?;
    let alpha = parse_point(alpha)?;
    let v = fock::coherent(&alpha, &mode);
    let vm = matrix::CMatrix::from_iterator(v.len(), 1, v.iter().copied());
    let mut out = Outcome::new(json!({
        "d": d,
        "alpha": alpha.coords,
        "vector": io::MatrixJson::from_matrix(&vm),
    }));
    out.residuals.insert("norm_deviation".into(), (v.norm() - 1.0).abs());
    Ok(out)
}

fn parse_square_grid(text: &str, spacing: f64) -> Result<Vec<PhaseSpacePoint>> {
    let parts: Vec<&str> = text.split('x').collect();
    let err = || Error::InvalidArgument(format!("bad grid {text:?}; expected e.g. \"5x5\" with odd side"));
    if parts.len() != 2 || parts[0] != parts[1] {
        return Err(err());
    }
    let side: i32 = parts[0].parse().map_err(|_| err())?;
    if side < 1 || side % 2 == 0 {
        return Err(err());
    }
    Ok(fock::square_grid(side / 2, spacing))
}

fn cloner_scan(d: usize, grid: &str, steps: usize, spacing: f64) -> Result<Outcome> {
    let mode = FockMode::new(d)?;
    let shift_grid = parse_square_grid(grid, spacing)?;
    let normal = cloner::reference_cloner(&mode, &shift_grid)?;
    let mut weights = BTreeMap::new();
    weights.insert("12".to_string(), 1.0);
    let dec = ClonerDecomposition::new(normal, weights)?;
    let rows = cloner::decomposed_fidelity_scan(&dec, &shift_grid, &mode, steps)?;
    let slope = rows.last().map(|r| r.worst_fidelity).unwrap_or(0.0);
    let affine_dev = rows
        .iter()
        .map(|r| (r.worst_fidelity - r.c12 * slope).abs())
        .fold(0.0, f64::max);
    let argmax = rows
        .iter()
        .max_by(|a, b| a.worst_fidelity.partial_cmp(&b.worst_fidelity).unwrap())
        .map(|r| r.c12)
        .unwrap_or(0.0);
    let mut csv = String::from("c12,worst_fidelity\n");
    for r in &rows {
        csv.push_str(&format!("{},{}\n", r.c12, r.worst_fidelity));
    }
    let mut out = Outcome::new(json!({
        "d": d,
        "grid": grid,
        "spacing": spacing,
        "table": rows,
        "argmax_c12": argmax,
    }));
    out.residuals.insert("affine_deviation".into(), affine_dev);
    out.within_tolerance = affine_dev <= 1e-7 && argmax == 1.0;
    out.csv = Some(csv);
    Ok(out)
}

fn cloner_covariance(channel_path: &std::path::Path, grid_path: &std::path::Path, tol: f64) -> Result<Outcome> {
    let ch = io::load_channel(channel_path, tol)?;
    let grid = io::load_grid(grid_path)?;
    let d = ch.in_dim;
    if ch.out_dim != d * d {
        return Err(Error::DimensionMismatch {
            expected: d * d,
            found: ch.out_dim,
        });
    }
    let mode = FockMode::new(d)?;
    let probes = [
        PhaseSpacePoint::single(0.0, 0.0),
        PhaseSpacePoint::single(0.5, 0.0),
        PhaseSpacePoint::single(0.0, 0.5),
    ];
    let states: Vec<matrix::CMatrix> = probes
        .iter()
        .map(|a| {
            let v = fock::coherent(a, &mode);
            &v * v.adjoint()
        })
        .collect();
    let residual = cloner::covariance_residual(&ch, &grid, &states, &mode)?;
    let mut out = Outcome::new(json!({
        "d": d,
        "grid_points": grid.len(),
        "test_states": states.len(),
    }));
    out.residuals.insert("covariance".into(), residual);
    Ok(out)
}

fn dixmier_estimate(
    formula: Option<&str>,
    eigs: Option<&std::path::Path>,
    horizon: &str,
    depth: usize,
) -> Result<Outcome> {
    let horizon_f: f64 = horizon
        .parse()
        .map_err(|e| Error::InvalidArgument(format!("bad horizon {horizon:?}: {e}")))?;
    if !(horizon_f >= 10.0) || horizon_f > 1e9 {
        return Err(Error::InvalidArgument(format!(
            "horizon must lie in [10, 1e9], got {horizon}"
        )));
    }
    let n_max = horizon_f as u64;
    let seq = match (formula, eigs) {
        (Some(f), None) => EigenSequence::from_formula(f, n_max)?,
        (None, Some(path)) => {
            let v = io::load_vector(path)?;
            let reals: Vec<f64> = v
                .iter()
                .map(|z| {
                    if z.im.abs() > 1e-12 {
                        Err(Error::InvalidArgument("eigenvalues must be real".into()))
                    } else {
                        Ok(z.re)
                    }
                })
                .collect::<Result<Vec<f64>>>()?;
            EigenSequence::explicit(reals, n_max)?
        }
        _ => {
            return Err(Error::InvalidArgument(
                "give exactly one of --formula or --eigs".into(),
            ))
        }
    };
    let report = dixmier::singularity_witness(&seq, n_max, depth)?;
    let mut out = Outcome::new(serde_json::to_value(&report).expect("report serializes"));
    out.residuals.insert("spread".into(), report.spread);
    out.within_tolerance = report.head_insensitive;
    Ok(out)
}

fn selftest(tol: f64, seed: u64) -> Result<Outcome> {
    let mut checks: Vec<(String, bool, String)> = Vec::new();
    let push = |name: &str, ok: bool, detail: String, checks: &mut Vec<(String, bool, String)>| {
        checks.push((name.to_string(), ok, detail));
    };

    // GNS dimensions on M2
    let full2 = StarAlgebra::full(2);
    let faithful = algebra::State::from_density(matrix::identity(2) * c(0.5, 0.0))?;
    let rep = gns::gns_construct(&full2, &faithful, tol)?;
    push(
        "gns_dim_faithful",
        rep.quotient_dim == 4,
        format!("quotient_dim {}", rep.quotient_dim),
        &mut checks,
    );
    let e1 = matrix::CVector::from_iterator(2, [c(1.0, 0.0), c(0.0, 0.0)]);
    let vec_state = algebra::vector_state(&e1, tol)?;
    let rep2 = gns::gns_construct(&full2, &vec_state, tol)?;
    push(
        "gns_dim_vector",
        rep2.quotient_dim == 2,
        format!("quotient_dim {}", rep2.quotient_dim),
        &mut checks,
    );

    // reconstruction on a random state
    let mut rng = crate::seeded_rng(seed);
    let full3 = StarAlgebra::full(3);
    let state3 = algebra::State::from_density(matrix::random_density(&mut rng, 3))?;
    let rep3 = gns::gns_construct(&full3, &state3, tol)?;
    let recon = gns::verify_reconstruction(&rep3, &full3.basis, tol)?;
    push("gns_reconstruction", recon <= 1e-10, format!("residual {recon:.3e}"), &mut checks);

    // fidelity spot value
    let f = cloner::fidelity(
        &matrix::diag_reals(&[1.0, 0.0]),
        &(matrix::identity(2) * c(0.5, 0.0)),
    )?;
    push("fidelity_half", (f - 0.5).abs() <= 1e-10, format!("F {f}"), &mut checks);

    // Weyl unitarity at the default cutoff
    let mode = FockMode::new(20)?;
    let w = fock::weyl(&PhaseSpacePoint::single(1.0, 0.0), &mode);
    let uni = matrix::max_abs(&(w.adjoint() * &w - matrix::identity(20)));
    push("weyl_unitarity", uni <= 1e-10, format!("residual {uni:.3e}"), &mut checks);

    // Born doubly stochastic for the Fourier world
    let born = algebra::born_matrix(&algebra::World::standard(3), &algebra::World::fourier(3))?;
    let uniform = born.iter().map(|&v| (v - 1.0 / 3.0).abs()).fold(0.0, f64::max);
    push("born_fourier_uniform", uniform <= 1e-10, format!("deviation {uniform:.3e}"), &mut checks);

    // finite-rank Dixmier estimate vanishes
    let seq = EigenSequence::explicit(vec![1.0, 1.0], 1_000_000)?;
    let series = dixmier::log_mean_series(&seq, 1_000_000)?;
    let (est, _) = dixmier::generalized_limit(&series, dixmier::DEFAULT_DEPTH)?;
    push("dixmier_finite_rank", est.abs() <= 1e-3, format!("estimate {est:.3e}"), &mut checks);

    let all_ok = checks.iter().all(|(_, ok, _)| *ok);
    let results = json!({
        "checks": checks
            .iter()
            .map(|(name, ok, detail)| json!({
                "name": name,
                "ok": ok,
                "detail": detail,
            }))
            .collect::<Vec<_>>(),
        "passed": checks.iter().filter(|(_, ok, _)| *ok).count(),
        "total": checks.len(),
    });
    let mut out = Outcome::new(results);
    out.within_tolerance = all_ok;
    Ok(out)
}

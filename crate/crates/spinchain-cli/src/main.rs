//! Command-line surface for the spin-chain transfer toolkit: builds
//! single-excitation operators from JSON specs, certifies transfer criteria
//! and no-go verdicts, sizes pretty-good-transfer plans, and emits the CSV
//! datasets behind the scaling figures.
//!
//! Exit-code policy: verdicts (including "infeasible") are data and exit 0;
//! only I/O, parse, and validation failures are nonzero. Output is
//! deterministic — identical inputs give byte-identical JSON/CSV, with tool
//! metadata in a sidecar rather than timestamps in data files.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use num_bigint::{BigInt, BigUint};
use serde_json::{json, Value};

use spinchain::chain_model::{build_single_excitation_matrix, ChainSpec};
use spinchain::constructions::{hahn_chain, lm_chain, uniform_overlap_chain};
use spinchain::criteria::{
    check_centrosymmetry, check_pst_spectrum, check_revival_spectrum,
    linear_spectrum_feasibility, pgst_certificate, Feasibility,
};
use spinchain::exact::{
    exhaustive_n4_no_pst, large_a_no_go, parse_bigint, rational_string, verify_no_pst, Verdict,
};
use spinchain::pgt_route::{
    default_a_grid, default_k_ceiling, evaluate_plan_with_ceiling, fig1_dataset, fig2_dataset,
    plan_full_spectrum, plan_truncated, PgtPlan, DEFAULT_T_WINDOW,
};
use spinchain::spectral::{eigendecompose, fidelity_sweep, sweep_csv};
use spinchain::Error;

#[derive(Parser)]
#[command(
    name = "spinchain",
    version,
    about = "Engineer, simulate, and certify state transfer in spin chains"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the single-excitation operator of a chain spec and print its spectrum
    Build(BuildArgs),
    /// Run transfer criteria and impossibility checks; verdicts are data, not errors
    Certify(CertifyArgs),
    /// Size a pretty-good-transfer plan (junction strength a, time horizon k*pi)
    Plan(PlanArgs),
    /// Emit the figure datasets as CSV files with a metadata sidecar
    Figures(FiguresArgs),
    /// Print a named chain construction as a spec usable with --spec
    Construct(ConstructArgs),
    /// Scan transfer fidelity over a time window and emit t,fidelity CSV
    Sweep(SweepArgs),
}

#[derive(Args)]
struct BuildArgs {
    /// Chain spec JSON file (also accepts `build --json` output)
    #[arg(long)]
    spec: PathBuf,
    /// Emit machine-readable JSON instead of the human summary
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct CertifyArgs {
    /// Chain spec JSON file to derive the operator and spectrum from
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Comma-separated spectrum, decreasing (integers for --pgst/--no-pst)
    #[arg(long, allow_hyphen_values = true, value_delimiter = ',')]
    spectrum: Option<Vec<String>>,
    /// Check mirror symmetry of the operator (needs --spec)
    #[arg(long)]
    centrosymmetry: bool,
    /// Check the odd-gap perfect-transfer spectrum condition at --t0
    #[arg(long)]
    pst: bool,
    /// Transfer time for --pst
    #[arg(long, default_value_t = std::f64::consts::PI)]
    t0: f64,
    /// Check the even-gap perfect-revival spectrum condition at --tr
    #[arg(long)]
    revival: bool,
    /// Revival time for --revival
    #[arg(long, default_value_t = std::f64::consts::PI)]
    tr: f64,
    /// Tolerance for the --pst/--revival gap checks
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    /// Run the integer-lattice pretty-good-transfer certificate
    #[arg(long)]
    pgst: bool,
    /// Run the exact null-overlap perfect-transfer check
    #[arg(long)]
    no_pst: bool,
    /// Sweep all four-site odd/even/odd spectra up to --bound
    #[arg(long)]
    n4_exhaustive: bool,
    /// Parameter bound for --n4-exhaustive
    #[arg(long, default_value_t = 50)]
    bound: u64,
    /// Check the linear-spectrum counting bound over a size range, e.g. 3..100
    #[arg(long, value_name = "FROM..TO")]
    linear_spectrum_feasibility: Option<String>,
    /// Run the strong-junction impossibility check for the input size
    #[arg(long)]
    large_a: bool,
}

#[derive(Args)]
struct PlanArgs {
    /// Number of sites in each half chain
    #[arg(long, alias = "N")]
    n: usize,
    /// Target infidelity
    #[arg(long)]
    epsilon: f64,
    /// Keep only the heaviest modes (truncated plan)
    #[arg(long)]
    truncate: bool,
    /// Evaluate the plan's exact dynamics when within the ceiling
    #[arg(long)]
    evaluate: bool,
    /// Override the exact-evaluation ceiling on k = t/pi (decimal)
    #[arg(long)]
    k_ceiling: Option<String>,
}

#[derive(Args)]
struct FiguresArgs {
    /// Emit the phase-multiplier growth dataset for N = 2^r, r = 2..=R_MAX
    #[arg(long, value_name = "R_MAX")]
    fig1: Option<u32>,
    /// Emit the junction-strength fidelity scan for a 2N-site mirror chain
    #[arg(long, value_name = "N")]
    fig2: Option<usize>,
    /// Output directory (created if missing)
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct ConstructArgs {
    #[command(subcommand)]
    kind: ConstructKind,
}

#[derive(Subcommand)]
enum ConstructKind {
    /// Quadratic-coupling field-free chain with spectrum {-n(n-1)}
    Hahn {
        #[arg(long)]
        n: usize,
    },
    /// Chain with uniform end overlaps 1/N on a linear spectrum
    UniformOverlap {
        #[arg(long)]
        n: usize,
    },
    /// Half chain of the dual-revival mirror pair
    Lm {
        #[arg(long)]
        n: usize,
    },
}

#[derive(Args)]
struct SweepArgs {
    /// Chain spec JSON file
    #[arg(long)]
    spec: PathBuf,
    /// Source site (1-based)
    #[arg(long, default_value_t = 1)]
    from: usize,
    /// Target site (1-based; defaults to the last site)
    #[arg(long)]
    to: Option<usize>,
    /// End of the scan window [0, t_max]
    #[arg(long)]
    t_max: f64,
    /// Number of sample points
    #[arg(long, default_value_t = 2001)]
    points: usize,
    /// Write the CSV here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Build(args) => cmd_build(args),
        Command::Certify(args) => cmd_certify(args),
        Command::Plan(args) => cmd_plan(args),
        Command::Figures(args) => cmd_figures(args),
        Command::Construct(args) => cmd_construct(args),
        Command::Sweep(args) => cmd_sweep(args),
    }
}

/// Reads a chain spec, accepting either a bare spec object or the output of
/// `build --json` (which nests the spec under a "spec" key).
fn load_spec(path: &Path) -> Result<ChainSpec> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let value: Value =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    let spec_value = match value.get("spec") {
        Some(inner) => inner.clone(),
        None => value,
    };
    serde_json::from_value(spec_value)
        .with_context(|| format!("validating chain spec in {}", path.display()))
}

fn cmd_build(args: BuildArgs) -> Result<()> {
    let spec = load_spec(&args.spec)?;
    let op = build_single_excitation_matrix(&spec);
    let es = eigendecompose(&op);

    if args.json {
        let out = json!({
            "spec": spec,
            "operator": {
                "diagonal": op.diagonal,
                "off_diagonal": op.off_diagonal,
            },
            "eigenvalues": es.eigenvalues,
        });
        println!("{}", serde_json::to_string_pretty(&out)?);
        return Ok(());
    }

    println!("model: {:?}", spec.model());
    println!("sites: {}", spec.len());
    println!("couplings: {:?}", spec.couplings());
    if !spec.is_field_free() {
        println!("fields: {:?}", spec.fields());
    }
    println!("diagonal: {:?}", op.diagonal);
    println!("off-diagonal: {:?}", op.off_diagonal);
    println!("eigenvalues (decreasing): {:?}", es.eigenvalues);
    Ok(())
}

/// Parses "FROM..TO" (inclusive) for the feasibility range flag.
fn parse_range(text: &str) -> Result<(u64, u64)> {
    let (lo, hi) = text
        .split_once("..")
        .with_context(|| format!("range must look like 3..100, got {text}"))?;
    let lo: u64 = lo.trim().parse().with_context(|| format!("bad range start {lo}"))?;
    let hi: u64 = hi.trim().parse().with_context(|| format!("bad range end {hi}"))?;
    if lo > hi {
        bail!("empty range {text}");
    }
    Ok((lo, hi))
}

fn cmd_certify(args: CertifyArgs) -> Result<()> {
    let spec = args.spec.as_deref().map(load_spec).transpose()?;
    let op = spec.as_ref().map(build_single_excitation_matrix);

    // The working spectrum: explicit --spectrum wins, else the operator's.
    let spectrum_f64: Option<Vec<f64>> = match &args.spectrum {
        Some(items) => Some(
            items
                .iter()
                .map(|s| s.trim().parse::<f64>().with_context(|| format!("bad eigenvalue {s}")))
                .collect::<Result<_>>()?,
        ),
        None => op.as_ref().map(|op| eigendecompose(op).eigenvalues),
    };
    let spectrum_int = || -> Result<Vec<BigInt>> {
        let items = args
            .spectrum
            .as_ref()
            .context("this check needs an integer --spectrum")?;
        items
            .iter()
            .map(|s| parse_bigint(s.trim()).map_err(Into::into))
            .collect()
    };
    let n_sites = spectrum_f64.as_ref().map(|s| s.len());

    let mut verdicts = serde_json::Map::new();
    if args.centrosymmetry {
        let op = op.as_ref().context("--centrosymmetry needs --spec")?;
        let tol = 1e-9 * op.norm_inf().max(1.0);
        verdicts.insert("centrosymmetric".into(), json!(check_centrosymmetry(op, tol)));
    }
    if args.pst {
        let s = spectrum_f64.as_ref().context("--pst needs --spec or --spectrum")?;
        verdicts.insert(
            "pst".into(),
            json!({"t0": args.t0, "holds": check_pst_spectrum(s, args.t0, args.tol)}),
        );
    }
    if args.revival {
        let s = spectrum_f64.as_ref().context("--revival needs --spec or --spectrum")?;
        verdicts.insert(
            "revival".into(),
            json!({"t_r": args.tr, "holds": check_revival_spectrum(s, args.tr, args.tol)}),
        );
    }
    if args.pgst {
        let cert = pgst_certificate(&spectrum_int()?)?;
        let witness = cert
            .witness
            .map(|l| Value::from(l.iter().map(|x| x.to_string()).collect::<Vec<_>>()))
            .unwrap_or(Value::Null);
        verdicts.insert(
            "pgst".into(),
            json!({
                "holds": cert.holds,
                "witness": witness,
                "sign_pattern": cert.sign_pattern,
            }),
        );
    }
    if args.no_pst {
        let report = verify_no_pst(&spectrum_int()?)?;
        let reason = match &report.verdict {
            Verdict::Impossible { reason } => Value::from(reason.clone()),
            Verdict::NotExcluded => Value::Null,
        };
        verdicts.insert(
            "no_pst".into(),
            json!({
                "impossible": report.verdict.is_impossible(),
                "reason": reason,
                "null_overlap": rational_string(&report.null_overlap),
                "required": rational_string(&report.required),
            }),
        );
    }
    if args.n4_exhaustive {
        let report = exhaustive_n4_no_pst(args.bound)?;
        verdicts.insert(
            "n4_exhaustive".into(),
            json!({
                "bound": args.bound,
                "cases": report.cases,
                "all_impossible": report.all_differ_from_quarter,
                "formula_always_matches": report.formula_always_matches,
            }),
        );
    }
    if let Some(range) = &args.linear_spectrum_feasibility {
        let (lo, hi) = parse_range(range)?;
        let mut feasible = Vec::new();
        for n in lo..=hi {
            if linear_spectrum_feasibility(n)? == Feasibility::Feasible {
                feasible.push(n);
            }
        }
        verdicts.insert(
            "linear_spectrum_feasibility".into(),
            json!({
                "range": format!("{lo}..{hi}"),
                "feasible_sizes": feasible,
                "all_infeasible": feasible.is_empty(),
            }),
        );
    }
    if args.large_a {
        let n = n_sites.context("--large-a needs --spec or --spectrum")? as u64;
        let report = large_a_no_go(n)?;
        verdicts.insert(
            "large_a".into(),
            json!({
                "n": n,
                "impossible": report.verdict.is_impossible(),
                "overlap_valuation_bound": report.overlap_valuation_bound,
                "required_valuation": report.required_valuation,
            }),
        );
    }

    if verdicts.is_empty() {
        bail!("no checks requested; pass at least one of --centrosymmetry, --pst, --revival, --pgst, --no-pst, --n4-exhaustive, --linear-spectrum-feasibility, --large-a");
    }
    println!("{}", serde_json::to_string_pretty(&Value::Object(verdicts))?);
    Ok(())
}

fn plan_json(plan: &PgtPlan) -> Value {
    json!({
        "N": plan.n_sites,
        "epsilon": plan.epsilon,
        "a": rational_string(&plan.a),
        "k": plan.k.to_string(),
        "M": plan.m,
        "t_over_pi": plan.t_over_pi().to_string(),
        "predicted_fidelity": plan.predicted_fidelity,
        "truncation_tail": rational_string(&plan.truncation_tail),
        "fallback": plan.fallback,
    })
}

fn cmd_plan(args: PlanArgs) -> Result<()> {
    let planned = if args.truncate {
        plan_truncated(args.n, args.epsilon)
    } else {
        plan_full_spectrum(args.n, args.epsilon)
    };
    let plan = match planned {
        Ok(plan) => plan,
        Err(Error::Infeasible(reason)) => {
            eprintln!("notice: no plan for N={}, epsilon={}: {reason}", args.n, args.epsilon);
            let out = json!({"N": args.n, "epsilon": args.epsilon, "infeasible": reason});
            println!("{}", serde_json::to_string_pretty(&out)?);
            return Ok(());
        }
        Err(e) => return Err(e.into()),
    };

    let ceiling = match &args.k_ceiling {
        Some(text) => text
            .parse::<BigUint>()
            .with_context(|| format!("bad --k-ceiling {text}"))?,
        None => default_k_ceiling(),
    };

    let mut out = plan_json(&plan);
    if plan.k > ceiling {
        eprintln!(
            "notice: t/pi = {} exceeds the exact-evaluation ceiling {ceiling}; evaluation skipped",
            plan.k
        );
        if args.evaluate {
            out["evaluation"] = Value::Null;
        }
    } else if args.evaluate {
        let eval = evaluate_plan_with_ceiling(&plan, &ceiling)?;
        out["evaluation"] = json!({
            "achieved_fidelity": eval.achieved_fidelity,
            "max_first_order_residual": eval.max_first_order_residual,
            "residual_over_a_squared": eval.residual_over_a_squared,
        });
    }
    println!("{}", serde_json::to_string_pretty(&out)?);
    Ok(())
}

fn write_sidecar(dir: &Path, name: &str, parameters: Value) -> Result<()> {
    let meta = json!({
        "tool": "spinchain",
        "version": env!("CARGO_PKG_VERSION"),
        "parameters": parameters,
    });
    let path = dir.join(format!("{name}.meta.json"));
    fs::write(&path, serde_json::to_string_pretty(&meta)? + "\n")
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn cmd_figures(args: FiguresArgs) -> Result<()> {
    if args.fig1.is_none() && args.fig2.is_none() {
        bail!("nothing to do; pass --fig1 R_MAX and/or --fig2 N");
    }
    fs::create_dir_all(&args.out_dir)
        .with_context(|| format!("creating {}", args.out_dir.display()))?;

    if let Some(r_max) = args.fig1 {
        if r_max < 2 {
            bail!("--fig1 needs R_MAX >= 2");
        }
        let r_values: Vec<u32> = (2..=r_max).collect();
        let rows = fig1_dataset(&r_values)?;
        let mut csv = String::from("N,M,L,x,y\n");
        for row in &rows {
            csv.push_str(&format!("{},{},{},{},{}\n", row.n, row.m, row.l, row.x, row.y));
        }
        let path = args.out_dir.join("fig1.csv");
        fs::write(&path, csv).with_context(|| format!("writing {}", path.display()))?;
        write_sidecar(&args.out_dir, "fig1", json!({"r_min": 2, "r_max": r_max}))?;
        println!("wrote {}", path.display());
    }

    if let Some(n_half) = args.fig2 {
        let grid = default_a_grid(n_half);
        let rows = fig2_dataset(n_half, &grid, DEFAULT_T_WINDOW)?;
        let mut csv = String::from("a,max_fidelity,argmax_t\n");
        for row in &rows {
            csv.push_str(&format!("{},{},{}\n", row.a, row.max_fidelity, row.argmax_t));
        }
        let path = args.out_dir.join("fig2.csv");
        fs::write(&path, csv).with_context(|| format!("writing {}", path.display()))?;
        write_sidecar(
            &args.out_dir,
            "fig2",
            json!({"n_half": n_half, "t_window": DEFAULT_T_WINDOW, "a_grid_points": grid.len()}),
        )?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn cmd_construct(args: ConstructArgs) -> Result<()> {
    let spec = match args.kind {
        ConstructKind::Hahn { n } => hahn_chain(n)?,
        ConstructKind::UniformOverlap { n } => {
            eprintln!(
                "note: this chain is not mirror-symmetric; it engineers uniform end overlaps \
                 and a perfect revival, not end-to-end transfer"
            );
            uniform_overlap_chain(n)?
        }
        ConstructKind::Lm { n } => lm_chain(n)?,
    };
    println!("{}", serde_json::to_string_pretty(&spec)?);
    Ok(())
}

fn cmd_sweep(args: SweepArgs) -> Result<()> {
    let spec = load_spec(&args.spec)?;
    let op = build_single_excitation_matrix(&spec);
    let es = eigendecompose(&op);
    let to = args.to.unwrap_or(spec.len());
    let rows = fidelity_sweep(&es, args.from, to, 0.0, args.t_max, args.points)?;
    let csv = sweep_csv(&rows);
    match &args.out {
        Some(path) => {
            fs::write(path, csv).with_context(|| format!("writing {}", path.display()))?;
            println!("wrote {}", path.display());
        }
        None => print!("{csv}"),
    }
    Ok(())
}

//! `padec` — construct compact finite-difference schemes for `-u'' = f` on
//! `(0,1)` with homogeneous Dirichlet conditions, run convergence and
//! resonance experiments, and probe stability diagnostics.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use padec::assembly::{MuMode, Scheme};
use padec::experiments::{
    self, convergence_plot_script, problem, resonance_plot_script, run_convergence,
    run_liouville, run_random_stability, run_resonance, Field, QuadraticIrrational,
};
use padec::formula::SymmetricFormula;
use padec::pade::optimal_scheme;
use padec::scalar::parse_number;
use padec::solver::stability_sweep;
use padec::sturm::RootSet;

#[derive(Parser)]
#[command(name = "padec", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct OutputArgs {
    /// Directory for generated files (created if missing); stdout otherwise.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct SchemeArgs {
    /// Numerator stencil budget: tau(d) = l + 1.
    #[arg(long, default_value_t = 0)]
    l: usize,
    /// Source stencil budget: tau(s) = m.
    #[arg(long, default_value_t = 1)]
    m: usize,
    /// Boundary order: `n` or `n-2`.
    #[arg(long = "mu-mode", default_value = "n-2", value_parser = parse_mu_mode)]
    mu_mode: MuMode,
}

fn parse_mu_mode(s: &str) -> Result<MuMode, String> {
    match s {
        "n" => Ok(MuMode::Full),
        "n-2" => Ok(MuMode::Reduced),
        other => Err(format!("unknown mu-mode `{other}` (use n|n-2)")),
    }
}

/// Comma-separated list of interior point counts.
#[derive(Clone, Debug)]
struct NList(Vec<usize>);

impl std::str::FromStr for NList {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let values: Result<Vec<usize>, String> = s
            .split(',')
            .map(|t| t.trim().parse::<usize>().map_err(|e| e.to_string()))
            .collect();
        let values = values?;
        if values.is_empty() {
            return Err("empty N list".into());
        }
        Ok(NList(values))
    }
}

#[derive(Subcommand)]
enum Command {
    /// Print the most efficient scheme for given stencil budgets, exactly.
    Optimal {
        #[command(flatten)]
        scheme: SchemeArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Solve a manufactured problem over a list of resolutions and fit the
    /// convergence order.
    Convergence {
        #[command(flatten)]
        scheme: SchemeArgs,
        /// Manufactured problem: quadratic | sine | exp2x | cosine41.
        #[arg(long, default_value = "exp2x")]
        problem: String,
        /// Comma-separated interior point counts.
        #[arg(long = "N-list", default_value = "25,50,100,200,400")]
        n_list: NList,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Compare the base stencil against the quasi-resonant z-family at the
    /// same order, tracking eigenvalue gaps.
    Resonance {
        /// Parameter of the family (2-6z, 4z-1, -z); exact decimal.
        #[arg(long, default_value = "0.358946420670826")]
        z: String,
        /// Interior order of consistency for both runs.
        #[arg(long, default_value_t = 2)]
        n: u32,
        #[arg(long, default_value = "exp2x")]
        problem: String,
        #[arg(long = "N-list", default_value = "50,60,70,80,90,100,110,120,130,140,150,160,170,180,190,200,210,220,230,240,250,260,270,280,290,300,310,320,330,340,350,360,370,380,390,400,410,420,430,440,450,460,470,480,490,500")]
        n_list: NList,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Monte-Carlo stability survey over random zero-mean formulas.
    RandomStability {
        #[arg(long, default_value_t = 2)]
        l: usize,
        /// Coefficient field: real | complex.
        #[arg(long, default_value = "complex")]
        field: Field,
        /// Number of samples.
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long = "N-list", default_value = "32,64,128")]
        n_list: NList,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Stability demo for a root placed at a quadratic irrational: builds
    /// P = X(X - 4 sin^2(pi alpha / 2)) and probes the h^-2-relative bound.
    Liouville {
        /// `p,q,r,s` for alpha = (p + q*sqrt(r))/s.
        #[arg(long, default_value = "-1,1,2,1")]
        alpha: String,
        #[arg(long = "N-list", default_value = "100,200,300,400,500,600,700,800,900,1000,1100,1200,1300,1400,1500,1600,1700,1800,1900,2000")]
        n_list: NList,
        #[command(flatten)]
        output: OutputArgs,
    },
}

fn emit(output: &OutputArgs, name: &str, contents: &str) -> Result<()> {
    match &output.out {
        Some(dir) => {
            fs::create_dir_all(dir)
                .with_context(|| format!("creating {}", dir.display()))?;
            let path: PathBuf = Path::new(dir).join(name);
            fs::write(&path, contents)
                .with_context(|| format!("writing {}", path.display()))?;
            eprintln!("wrote {}", path.display());
        }
        None => print!("{contents}"),
    }
    Ok(())
}

/// Build the full scheme (with boundary corrections) for the optimal pair.
fn build_optimal_scheme(args: &SchemeArgs) -> Result<(Scheme<padec::Rational>, usize, usize)> {
    let opt = optimal_scheme(args.l, args.m)?;
    let n = opt.order;
    let scheme = Scheme::from_formula(opt.d, n, args.mu_mode)?;
    Ok((scheme, args.l, args.m))
}

fn scheme_json(scheme: &Scheme<padec::Rational>, l: usize, m: usize) -> String {
    let mut v = scheme.to_json();
    v["l"] = serde_json::json!(l);
    v["m"] = serde_json::json!(m);
    let mut text = serde_json::to_string_pretty(&v).expect("serializable");
    text.push('\n');
    text
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Optimal { scheme, output } => {
            let (full, l, m) = build_optimal_scheme(&scheme)?;
            emit(&output, "scheme.json", &scheme_json(&full, l, m))?;
        }
        Command::Convergence {
            scheme,
            problem: prob_name,
            n_list,
            output,
        } => {
            let (full, l, m) = build_optimal_scheme(&scheme)?;
            let prob = problem(&prob_name)?;
            let report = run_convergence(&full, prob, &n_list.0);
            emit(&output, "scheme.json", &scheme_json(&full, l, m))?;
            emit(&output, "convergence.csv", &report.to_csv())?;
            emit(&output, "plot.gp", &convergence_plot_script("convergence.csv"))?;
            match report.fit {
                Some((slope, residual)) => {
                    println!("problem={} n={} fitted_slope={slope} fit_residual={residual}", prob.name, full.interior_order)
                }
                None => println!(
                    "problem={} n={} fit: fewer than 3 usable rows",
                    prob.name, full.interior_order
                ),
            }
        }
        Command::Resonance {
            z,
            n,
            problem: prob_name,
            n_list,
            output,
        } => {
            let z = parse_number(&z).with_context(|| format!("parsing z `{z}`"))?;
            let prob = problem(&prob_name)?;
            let report = run_resonance(&z, n, prob, &n_list.0)?;
            emit(&output, "convergence.csv", &report.to_csv())?;
            emit(&output, "plot.gp", &resonance_plot_script("convergence.csv"))?;
            // Stability sweep of the resonant formula, with its root set.
            let d = experiments::resonance_formula(&z);
            let coeffs = d.to_base_polynomial().coeffs_f64();
            let mut roots = vec![0.0];
            if let Some(&top) = coeffs.last() {
                if coeffs.len() == 3 && top != 0.0 {
                    roots.push(-coeffs[1] / top);
                }
            }
            let sweep = stability_sweep(
                &coeffs,
                &d.to_f64(),
                &n_list.0,
                d.radius().unwrap_or(0),
                Some(&RootSet::from_float_roots(&roots)),
            );
            emit(&output, "stability.csv", &sweep.to_csv())?;
            let summary = |label: &str, rep: &padec::experiments::ConvergenceReport| {
                let me = rep
                    .rows
                    .iter()
                    .map(|r| r.min_abs_eig)
                    .fold(f64::INFINITY, f64::min);
                match rep.fit {
                    Some((s, r)) => println!("{label}: sweep_min_eig={me} slope={s} residual={r}"),
                    None => println!("{label}: sweep_min_eig={me} fit unavailable"),
                }
            };
            summary("baseline", &report.baseline);
            summary("resonant", &report.resonant);
        }
        Command::RandomStability {
            l,
            field,
            samples,
            seed,
            n_list,
            output,
        } => {
            if samples == 0 {
                bail!("need at least one sample");
            }
            let report = run_random_stability(l, field, samples, seed, &n_list.0);
            emit(&output, "stability.csv", &report.to_csv())?;
            println!("{}", report.summary());
        }
        Command::Liouville {
            alpha,
            n_list,
            output,
        } => {
            let alpha = QuadraticIrrational::parse(&alpha)?;
            let report = run_liouville(alpha, &n_list.0);
            // Full stability sweep for the demo polynomial.
            let lambda = report.lambda;
            let d = SymmetricFormula::<f64>::from_base_polynomial(&[0.0, -lambda, 1.0]);
            let sweep = stability_sweep(
                &[0.0, -lambda, 1.0],
                &d,
                &n_list.0,
                d.radius().unwrap_or(0),
                Some(&RootSet::from_float_roots(&[0.0, lambda])),
            );
            emit(&output, "stability.csv", &sweep.to_csv())?;
            println!("{}", report.summary());
            for row in &report.relative.rows {
                println!("N={} relative_c={}", row.n, row.constant);
            }
        }
    }
    Ok(())
}

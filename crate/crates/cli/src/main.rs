use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rhofront::finite_market::excess_return;
use rhofront::fixtures::{
    exponential_loss, hull_gap_profile, hull_gap_profile_hat, irregular_boundary_grid, normal_sample,
};
use rhofront::frontier::recession_efficient_frontier;
use rhofront::risk_measures::{adjusted_es, axiom_probe, classify_sensitivity};
use rhofront::{
    detect_arbitrage, dual_evaluate, efficient_frontier, lses, mean_rho_solve, optimal_boundary, parse_market,
    price_bounds, recession_value, Error, FiniteSpace, Market, MeanRhoMode, MeanRhoOutcome, Portfolio, PriceKind,
    RandVar, RiskSpec,
};

#[derive(Parser)]
#[command(name = "rhofront", version, about = "Mean-risk frontiers and arbitrage under star-shaped risk measures")]
struct Cli {
    /// Seed for randomized sub-procedures.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for frontier sweeps; all cores when absent.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Args)]
struct MarketMeasure {
    /// Market file.
    #[arg(long)]
    market: PathBuf,
    /// Risk measure, e.g. `es:0.05`, `lses:0.5`, `oce:l=exp`.
    #[arg(long)]
    measure: String,
}

#[derive(Subcommand)]
enum Verb {
    /// Evaluates a measure on a portfolio's excess return.
    Eval {
        #[command(flatten)]
        mm: MarketMeasure,
        /// Risky weights, space separated.
        #[arg(long, allow_hyphen_values = true)]
        portfolio: String,
    },
    /// Samples the optimal boundary, or solves one mean-risk problem.
    Frontier {
        #[command(flatten)]
        mm: MarketMeasure,
        #[arg(long, default_value_t = 1.0)]
        nu_max: f64,
        #[arg(long, default_value_t = 21)]
        steps: usize,
        /// Emit `set,risk,return` plot data instead of the boundary table.
        #[arg(long)]
        plot: bool,
        /// Minimal risk subject to an expected excess return of at least this.
        #[arg(long, conflicts_with_all = ["max_return", "plot"])]
        min_risk: Option<f64>,
        /// Maximal expected excess return subject to risk at most this.
        #[arg(long, allow_hyphen_values = true, conflicts_with = "plot")]
        max_return: Option<f64>,
    },
    /// Decides classical, rho- and strong rho-arbitrage.
    Arbitrage {
        #[command(flatten)]
        mm: MarketMeasure,
    },
    /// Price intervals of a payoff that avoid each kind of arbitrage.
    PriceBounds {
        #[command(flatten)]
        mm: MarketMeasure,
        /// Payoff per atom, space separated.
        #[arg(long, allow_hyphen_values = true)]
        payoff: String,
        /// `no-arb`, `no-rho-arb`, `no-strong-rho-arb`; all three when absent.
        #[arg(long)]
        kind: Option<String>,
    },
    /// Sensitivity classification and randomized axiom probes.
    Classify {
        #[arg(long)]
        measure: String,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 7)]
        atoms: usize,
    },
    /// Empirical versus analytic alpha* for a discretized normal law.
    LsesCalibrate {
        /// Ratios b / sigma, space separated.
        #[arg(long, default_value = "0.05 0.1 0.2 0.39894")]
        b_over_sigma: String,
        #[arg(long, default_value_t = 100_000)]
        atoms: usize,
    },
    /// Reference data sets: `irregular-boundary`, `hull-gap`.
    Fixtures {
        #[arg(long)]
        name: String,
        #[arg(long, default_value_t = 60.0)]
        nu_max: f64,
        #[arg(long, default_value_t = 601)]
        steps: usize,
        #[arg(long, default_value_t = 200_000)]
        atoms: usize,
    },
}

enum Failure {
    Domain(String),
    Usage(String),
    Solver(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Solver(_) | Error::Disagreement(_) => Failure::Solver(e.to_string()),
            _ => Failure::Domain(e.to_string()),
        }
    }
}

type Run<T> = Result<T, Failure>;

fn numbers(flag: &str, s: &str) -> Run<Vec<f64>> {
    s.split_whitespace()
        .map(|t| t.parse::<f64>().map_err(|_| Failure::Usage(format!("--{flag}: `{t}` is not a number"))))
        .collect()
}

fn spec(s: &str) -> Run<RiskSpec> {
    s.parse().map_err(|e: Error| Failure::Usage(format!("--measure: {e}")))
}

fn market(path: &PathBuf) -> Run<Market> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Domain(format!("{}: {e}", path.display())))?;
    Ok(parse_market(&text)?)
}

fn load(mm: &MarketMeasure) -> Run<(Market, RiskSpec)> {
    Ok((market(&mm.market)?, spec(&mm.measure)?))
}

fn eval(mm: &MarketMeasure, portfolio: &str) -> Run<String> {
    let (m, spec) = load(mm)?;
    let pi = Portfolio::new(numbers("portfolio", portfolio)?)?;
    let x = excess_return(&m, &pi)?;
    let mut s = String::from("quantity,value\n");
    writeln!(s, "rho,{}", spec.eval(&x)).unwrap();
    if spec.is_dual_capable() {
        writeln!(s, "rho_dual,{}", dual_evaluate(&spec, &x)?).unwrap();
    }
    writeln!(s, "rho_inf,{}", recession_value(&spec, &x)?).unwrap();
    writeln!(s, "mean_excess,{}", x.mean()).unwrap();
    match &spec {
        RiskSpec::Lses { b } => {
            let r = lses::evaluate(&x, *b);
            writeln!(s, "alpha_star,{}", r.alpha_star).unwrap();
            writeln!(s, "alpha_star_min,{}", r.alpha_star_interval.0).unwrap();
            writeln!(s, "es_at_alpha_star,{}", r.es_at_star).unwrap();
            writeln!(s, "var_at_alpha_star,{}", r.var_at_star).unwrap();
        }
        RiskSpec::AdjEs { g } => writeln!(s, "alpha_star,{}", adjusted_es(&x, g).alpha).unwrap(),
        _ => {}
    }
    Ok(s)
}

fn weights(p: &Option<Portfolio>, d: usize) -> String {
    match p {
        Some(p) => p.weights.iter().map(|w| format!(",{w}")).collect(),
        None => ",".repeat(d),
    }
}

fn frontier(mm: &MarketMeasure, nu_max: f64, steps: usize, plot: bool, mode: Option<MeanRhoMode>) -> Run<String> {
    let (m, spec) = load(mm)?;
    let d = m.dim();
    if let Some(mode) = mode {
        let header: String = (1..=d).map(|j| format!(",pi_{j}")).collect();
        let mut s = format!("status,nu,rho{header}\n");
        match mean_rho_solve(&spec, &m, mode)? {
            MeanRhoOutcome::Solved { nu, rho, portfolio } => {
                writeln!(s, "solved,{nu},{rho}{}", weights(&portfolio, d)).unwrap()
            }
            MeanRhoOutcome::Unbounded(why) => {
                eprintln!("unbounded: {why}");
                writeln!(s, "unbounded,,{}", ",".repeat(d)).unwrap()
            }
            MeanRhoOutcome::Infeasible(why) => {
                eprintln!("infeasible: {why}");
                writeln!(s, "infeasible,,{}", ",".repeat(d)).unwrap()
            }
        }
        return Ok(s);
    }
    let fr = optimal_boundary(&spec, &m, nu_max, steps)?;
    for (nu, e) in fr.nu_grid.iter().zip(&fr.errors) {
        if let Some(e) = e {
            return Err(Failure::Solver(format!("nu = {nu}: {e}")));
        }
    }
    eprintln!("regime {} (rho^inf_1 = {}), nu_min = {}, rho_min = {}", fr.regime, fr.rho_inf_1, fr.nu_min, fr.rho_min);
    if plot {
        let eff = if spec.is_convex() { efficient_frontier(&fr) } else { recession_efficient_frontier(fr.rho_inf_1) };
        Ok(fr.plot_data(&eff))
    } else {
        Ok(fr.to_csv(d))
    }
}

fn join(v: &[f64]) -> String {
    v.iter().map(f64::to_string).collect::<Vec<_>>().join(" ")
}

fn arbitrage(mm: &MarketMeasure) -> Run<String> {
    let (m, spec) = load(mm)?;
    let r = detect_arbitrage(&spec, &m)?;
    let mut s = String::from("quantity,value\n");
    writeln!(s, "measure,{}", r.spec).unwrap();
    writeln!(s, "classical_arbitrage,{}", r.classical.is_some()).unwrap();
    if let Some(w) = &r.classical {
        writeln!(s, "classical_witness_pi,{}", join(&w.pi)).unwrap();
    }
    writeln!(s, "rho_inf_1,{}", r.rho_inf_1).unwrap();
    writeln!(s, "rho_arbitrage,{}", r.rho_arbitrage).unwrap();
    writeln!(s, "strong_rho_arbitrage,{}", r.strong_rho_arbitrage).unwrap();
    writeln!(s, "strong_rho_inf_arbitrage,{}", r.strong_rho_inf_arbitrage).unwrap();
    if let Some((pi, v)) = &r.descent_ray {
        writeln!(s, "descent_ray_pi,{}", join(&pi.weights)).unwrap();
        writeln!(s, "descent_ray_rho_inf,{v}").unwrap();
    }
    if let Some((z, eps)) = &r.interior_witness {
        writeln!(s, "interior_density,{}", join(z.values())).unwrap();
        writeln!(s, "interior_slack,{eps}").unwrap();
    }
    if let Some(z) = &r.closure_witness {
        writeln!(s, "closure_density,{}", join(z.values())).unwrap();
    }
    writeln!(s, "dual_checked,{}", r.dual_checked).unwrap();
    Ok(s)
}

fn price(mm: &MarketMeasure, payoff: &str, kind: &Option<String>) -> Run<String> {
    let (m, spec) = load(mm)?;
    let y = RandVar::new(m.space(), numbers("payoff", payoff)?)?;
    let kinds = match kind {
        Some(k) => vec![k.parse::<PriceKind>().map_err(|e| Failure::Usage(format!("--kind: {e}")))?],
        None => vec![PriceKind::NoArb, PriceKind::NoRhoArb, PriceKind::NoStrongRhoArb],
    };
    let mut s = String::from("kind,lower,upper,lower_open,upper_open,set\n");
    for k in kinds {
        let iv = price_bounds(&m, &y, &spec, k)?;
        writeln!(s, "{},{},{},{},{},{}", iv.kind, iv.lower, iv.upper, iv.lower_open, iv.upper_open, iv.set).unwrap();
    }
    Ok(s)
}

fn classify(measure: &str, trials: usize, atoms: usize, seed: u64) -> Run<String> {
    let spec = spec(measure)?;
    let c = classify_sensitivity(&spec);
    let mut s = String::from("property,expected,observed,consistent\n");
    for (name, v) in [
        ("weak_sensitivity", c.weak),
        ("strong_sensitivity", c.strong),
        ("suitable_risk_measure", c.suitable_rm),
        ("suitable_portfolio_selection", c.suitable_ps),
    ] {
        writeln!(s, "{name},{v},,").unwrap();
    }
    let space = FiniteSpace::uniform(atoms)?;
    let report = axiom_probe(&spec, &space, trials, seed)?;
    for ch in &report.checks {
        let observed = if ch.held { "holds" } else { "fails" };
        writeln!(s, "{},{:?},{observed},{}", ch.axiom, ch.expected, ch.consistent()).unwrap();
        if let Some(w) = &ch.witness {
            eprintln!("{} witness: {w}", ch.axiom);
        }
    }
    Ok(s)
}

fn calibrate(ratios: &str, atoms: usize) -> Run<String> {
    let x = normal_sample(atoms)?;
    let mut s = String::from("b_over_sigma,alpha_star_analytic,alpha_star_empirical\n");
    for b in numbers("b-over-sigma", ratios)? {
        if b.is_nan() || b <= 0.0 {
            return Err(Failure::Usage("--b-over-sigma values must be positive".into()));
        }
        writeln!(s, "{b},{},{}", lses::normal_alpha_star(b)?, lses::evaluate(&x, b).alpha_star).unwrap();
    }
    Ok(s)
}

fn fixtures(name: &str, nu_max: f64, steps: usize, atoms: usize) -> Run<String> {
    match name {
        "irregular-boundary" => {
            let mut s = String::from("nu,f\n");
            for (nu, f) in irregular_boundary_grid(nu_max, steps) {
                writeln!(s, "{nu},{f}").unwrap();
            }
            Ok(s)
        }
        "hull-gap" => {
            let y = exponential_loss(atoms, 0.7)?;
            let g = adjusted_es(&y, &hull_gap_profile());
            let h = adjusted_es(&y, &hull_gap_profile_hat());
            Ok(format!("profile,value,alpha_star\ng,{},{}\ng_hat,{},{}\n", g.value, g.alpha, h.value, h.alpha))
        }
        _ => Err(Failure::Usage(format!("unknown fixture `{name}`; expected irregular-boundary or hull-gap"))),
    }
}

fn run(cli: &Cli) -> Run<String> {
    match &cli.verb {
        Verb::Eval { mm, portfolio } => eval(mm, portfolio),
        Verb::Frontier { mm, nu_max, steps, plot, min_risk, max_return } => {
            let mode = min_risk.map(MeanRhoMode::MinRisk).or(max_return.map(MeanRhoMode::MaxReturn));
            frontier(mm, *nu_max, *steps, *plot, mode)
        }
        Verb::Arbitrage { mm } => arbitrage(mm),
        Verb::PriceBounds { mm, payoff, kind } => price(mm, payoff, kind),
        Verb::Classify { measure, trials, atoms } => classify(measure, *trials, *atoms, cli.seed),
        Verb::LsesCalibrate { b_over_sigma, atoms } => calibrate(b_over_sigma, *atoms),
        Verb::Fixtures { name, nu_max, steps, atoms } => fixtures(name, *nu_max, *steps, *atoms),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
            eprintln!("error: --jobs: {e}");
            return ExitCode::from(2);
        }
    }
    let out = run(&cli).and_then(|text| match &cli.out {
        Some(path) => fs::write(path, text).map_err(|e| Failure::Domain(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    });
    match out {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Domain(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(Failure::Solver(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}

mod output;

use std::path::Path;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use montail::distributions::standardizer_by_name;
use montail::oracle::mc::{mc_quantile, mc_tvar, order_statistic_quantile, sample_transformed};
use montail::oracle::mc_pushforward_quantile;
use montail::parametric_levy::{case_price_bound, uniform_price_bound};
use montail::quadrant_dependence::{
    check_quadrant_dependence, dependence_from_tail, QuadrantKind, SupportSet,
};
use montail::quantile_transform::transform_quantile_with;
use montail::reducers::{difference_var, reducer_verdict};
use montail::schema::{parse_distribution, parse_function};
use montail::{
    build_payoff, classify_levy_case, classify_tail, comonotonic_difference, z_upper_bound, Error,
    LevyCase, PayoffSpec, QuantileSide, ReducerQuery, RiskMeasure,
};
use serde_json::{json, Map, Value};

const MIN_MC_SAMPLES: usize = 10_000;

#[derive(Parser)]
#[command(
    name = "montail",
    version,
    about = "Quantiles of transformed variables, tail classes and hedging verdicts"
)]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    /// Seed of the Monte Carlo streams.
    #[arg(long, default_value_t = 42, global = true)]
    seed: u64,
    /// Adds a Monte Carlo estimate with this many draws.
    #[arg(long, global = true)]
    mc_samples: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Measure {
    Var,
    Tvar,
    Ltvar,
}

#[derive(Subcommand)]
enum Command {
    /// Quantile or tail average of a distribution.
    Quantile {
        #[arg(long)]
        dist: String,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value = "left", value_parser = parse_side)]
        side: QuantileSide,
        #[arg(long, value_enum, default_value_t = Measure::Var)]
        measure: Measure,
    },
    /// Tail class of a piecewise function.
    Classify {
        #[arg(long = "fn")]
        function: String,
    },
    /// Quantile of f(X) through the transform rules.
    TransformQuantile {
        #[arg(long = "fn")]
        function: String,
        #[arg(long)]
        dist: String,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value = "left", value_parser = parse_side)]
        side: QuantileSide,
        /// Fail outside the validity intervals instead of using the oracle.
        #[arg(long)]
        no_fallback: bool,
    },
    /// Quadrant structure of a support set, or of a comonotonic pair.
    Dependence(DependenceArgs),
    /// VaR or TVaR reducer verdict for a hedger.
    Reducer {
        #[arg(long)]
        liability: String,
        #[arg(long)]
        hedger: String,
        #[arg(long)]
        price: f64,
        #[arg(long)]
        p: f64,
        #[arg(long, value_enum, default_value_t = Measure::Var)]
        measure: Measure,
    },
    /// Case analysis of two exponential location-scale marginals.
    Levy {
        #[arg(long, allow_hyphen_values = true)]
        mu1: f64,
        #[arg(long)]
        sigma1: f64,
        #[arg(long, allow_hyphen_values = true)]
        mu2: f64,
        #[arg(long)]
        sigma2: f64,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long, default_value = "normal")]
        standardizer: String,
    },
    /// Tail class and quantile of an option or endowment payoff.
    Payoff {
        #[arg(long)]
        spec: String,
        #[arg(long)]
        dist: String,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value = "left", value_parser = parse_side)]
        side: QuantileSide,
    },
}

#[derive(Args)]
struct DependenceArgs {
    #[arg(long, conflicts_with_all = ["dist1", "dist2"], requires_all = ["a", "kind"])]
    support: Option<String>,
    /// Threshold point `x,y`.
    #[arg(long, allow_hyphen_values = true)]
    a: Option<String>,
    #[arg(long)]
    kind: Option<String>,
    #[arg(long, requires_all = ["dist2", "pi"])]
    dist1: Option<String>,
    #[arg(long)]
    dist2: Option<String>,
    #[arg(long, default_value_t = 0.0)]
    alpha: f64,
    #[arg(long)]
    pi: Option<f64>,
}

fn parse_side(s: &str) -> Result<QuantileSide, String> {
    match s {
        "left" => Ok(QuantileSide::Left),
        "right" => Ok(QuantileSide::Right),
        _ => {
            let a = s
                .strip_prefix("alpha:")
                .ok_or_else(|| format!("expected left, right or alpha:A, got {s}"))?;
            let a: f64 = a.parse().map_err(|e| format!("alpha {a}: {e}"))?;
            QuantileSide::alpha(a).map_err(|e| e.to_string())
        }
    }
}

fn side_name(s: QuantileSide) -> String {
    match s {
        QuantileSide::Left => "left".into(),
        QuantileSide::Right => "right".into(),
        QuantileSide::Alpha(a) => format!("alpha:{a}"),
    }
}

enum Failure {
    Validation(String),
    OutOfRange(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::OutOfValidRange { .. } => Failure::OutOfRange(e.to_string()),
            e => Failure::Validation(e.to_string()),
        }
    }
}

type Outcome = Result<Value, Failure>;

/// Inline JSON, or the path of a file holding it.
fn load(arg: &str) -> Result<String, Failure> {
    let t = arg.trim_start();
    if t.starts_with('{') || t.starts_with('[') {
        return Ok(arg.to_string());
    }
    std::fs::read_to_string(Path::new(arg))
        .map_err(|e| Failure::Validation(format!("cannot read {arg}: {e}")))
}

fn mc_samples(cli: &Cli) -> Result<Option<usize>, Failure> {
    match cli.mc_samples {
        Some(n) if n < MIN_MC_SAMPLES => Err(Failure::Validation(format!(
            "--mc-samples needs at least {MIN_MC_SAMPLES} draws, got {n}"
        ))),
        n => Ok(n),
    }
}

fn quantile(cli: &Cli, dist: &str, p: f64, side: QuantileSide, measure: Measure) -> Outcome {
    let d = parse_distribution(&load(dist)?)?;
    let (name, value) = match measure {
        Measure::Var => ("var", serde_json::to_value(d.quantile(p, side)?).unwrap()),
        Measure::Tvar => ("tvar", json!(d.tvar(p)?)),
        Measure::Ltvar => ("ltvar", json!(d.ltvar(p)?)),
    };
    let mut out = Map::new();
    out.insert("measure".into(), json!(name));
    out.insert("p".into(), json!(p));
    out.insert("side".into(), json!(side_name(side)));
    out.insert("value".into(), value);
    if let Some(n) = mc_samples(cli)? {
        let est = match measure {
            Measure::Var => mc_quantile(&d, p, side, n, cli.seed),
            Measure::Tvar => mc_tvar(&d, p, n, cli.seed),
            Measure::Ltvar => {
                return Err(Failure::Validation(
                    "no Monte Carlo estimate for ltvar".into(),
                ))
            }
        };
        out.insert("mc".into(), serde_json::to_value(est).unwrap());
    }
    Ok(Value::Object(out))
}

fn classify(function: &str) -> Outcome {
    let f = parse_function(&load(function)?)?;
    let c = classify_tail(&f);
    let mut out = output::doc(&c);
    if let Some(b) = c.boundary_value {
        let key = if c.kind.uses_lower_mass() {
            "h_star"
        } else {
            "g_star"
        };
        out.insert(key.into(), serde_json::to_value(b).unwrap());
    }
    out.insert("left_continuous".into(), json!(f.is_left_continuous()));
    out.insert("right_continuous".into(), json!(f.is_right_continuous()));
    Ok(Value::Object(out))
}

fn transform(
    cli: &Cli,
    function: &str,
    dist: &str,
    p: f64,
    side: QuantileSide,
    fallback: bool,
) -> Outcome {
    let f = parse_function(&load(function)?)?;
    let d = parse_distribution(&load(dist)?)?;
    let c = classify_tail(&f);
    let r = transform_quantile_with(&f, &c, &d, p, side, fallback)?;
    let mut out = output::doc(&r);
    out.insert("p".into(), json!(p));
    out.insert("side".into(), json!(side_name(side)));
    if let Some(n) = mc_samples(cli)? {
        let est = mc_pushforward_quantile(&f, &d, p, side, n, cli.seed)?;
        out.insert("mc".into(), serde_json::to_value(est).unwrap());
    }
    Ok(Value::Object(out))
}

fn point(s: &str) -> Result<(f64, f64), Failure> {
    let bad = || Failure::Validation(format!("expected a point x,y, got {s}"));
    let (x, y) = s.split_once(',').ok_or_else(bad)?;
    Ok((
        x.trim().parse().map_err(|_| bad())?,
        y.trim().parse().map_err(|_| bad())?,
    ))
}

fn dependence(a: &DependenceArgs) -> Outcome {
    if let Some(s) = &a.support {
        let set: SupportSet = serde_json::from_str(&load(s)?)
            .map_err(|e| Failure::Validation(format!("support: {e}")))?;
        set.validate()?;
        let kind_arg = a.kind.as_deref().unwrap_or_default();
        let kind = QuadrantKind::parse(kind_arg)
            .ok_or_else(|| Failure::Validation(format!("unknown quadrant structure {kind_arg}")))?;
        let v = check_quadrant_dependence(&set, point(a.a.as_deref().unwrap_or_default())?, kind);
        let mut out = output::doc(&v);
        out.insert("holds".into(), json!(v.holds()));
        return Ok(Value::Object(out));
    }
    let (Some(d1), Some(d2), Some(pi)) = (&a.dist1, &a.dist2, a.pi) else {
        return Err(Failure::Validation(
            "dependence needs --support, --a and --kind, or --dist1, --dist2 and --pi".into(),
        ));
    };
    let (d1, d2) = (
        parse_distribution(&load(d1)?)?,
        parse_distribution(&load(d2)?)?,
    );
    let discrete = |d: &montail::Distribution| {
        d.as_discrete()
            .cloned()
            .ok_or_else(|| Failure::Validation("dependence from a pair needs discrete laws".into()))
    };
    let r = dependence_from_tail(&discrete(&d1)?, &discrete(&d2)?, a.alpha, pi)?;
    Ok(serde_json::to_value(r).unwrap())
}

fn reducer(liability: &str, hedger: &str, price: f64, p: f64, measure: Measure) -> Outcome {
    let measure = match measure {
        Measure::Var => RiskMeasure::VaR,
        Measure::Tvar => RiskMeasure::TVaR,
        Measure::Ltvar => return Err(Failure::Validation("reducers use var or tvar".into())),
    };
    let q = ReducerQuery::new(
        parse_distribution(&load(liability)?)?,
        parse_distribution(&load(hedger)?)?,
        price,
        p,
    )?;
    let v = reducer_verdict(&q, measure)?;
    let mut out = output::doc(&v);
    out.insert(
        "bound".into(),
        serde_json::to_value(v.sufficient_bound).unwrap(),
    );
    let rule = v.difference_rule.map(|r| r.as_str());
    out.insert("rule".into(), serde_json::to_value(rule).unwrap());
    Ok(Value::Object(out))
}

fn levy(
    cli: &Cli,
    mu1: f64,
    sigma1: f64,
    mu2: f64,
    sigma2: f64,
    p: Option<f64>,
    w: &str,
) -> Outcome {
    let w = standardizer_by_name(w)
        .ok_or_else(|| Failure::Validation(format!("unknown standardizer {w}")))?;
    let a = classify_levy_case(mu1, sigma1, mu2, sigma2, w.clone())?;
    let mut out = output::doc(&a);
    let (lo, hi) = a.valid_interval(RiskMeasure::VaR);
    out.insert("var_interval".into(), json!([lo, hi]));
    let (lo, hi) = a.valid_interval(RiskMeasure::TVaR);
    out.insert("tvar_interval".into(), json!([lo, hi]));
    if a.case == LevyCase::Sigma2Gt {
        out.insert(
            "z_upper_bound".into(),
            json!(z_upper_bound(mu1, sigma1, mu2, sigma2)?),
        );
    }
    if let Some(b) = uniform_price_bound(&a) {
        out.insert("uniform_price_bound".into(), json!(b));
    }
    if let Some(p) = p {
        out.insert("p".into(), json!(p));
        out.insert(
            "var_bound".into(),
            serde_json::to_value(case_price_bound(&a, p, RiskMeasure::VaR)?).unwrap(),
        );
        out.insert(
            "tvar_bound".into(),
            serde_json::to_value(case_price_bound(&a, p, RiskMeasure::TVaR)?).unwrap(),
        );
        let diff = comonotonic_difference(&a.liability(), &a.hedger())?;
        let (var_z, rule) = difference_var(&diff, p)?;
        out.insert("var_z".into(), json!(var_z));
        out.insert("rule".into(), json!(rule.as_str()));
        if let Some(n) = mc_samples(cli)? {
            let d = a.difference();
            let mut zs = sample_transformed(n, cli.seed, |u| d.eval(u));
            let est = order_statistic_quantile(&mut zs, p, QuantileSide::Left);
            out.insert("mc".into(), serde_json::to_value(est).unwrap());
        }
    }
    Ok(Value::Object(out))
}

fn payoff(cli: &Cli, spec: &str, dist: &str, p: f64, side: QuantileSide) -> Outcome {
    let spec: PayoffSpec = serde_json::from_str(&load(spec)?)
        .map_err(|e| Failure::Validation(format!("payoff spec: {e}")))?;
    let d = parse_distribution(&load(dist)?)?;
    let (f, c) = build_payoff(&spec)?;
    let r = transform_quantile_with(&f, &c, &d, p, side, true)?;
    let mut out = Map::new();
    out.insert("payoff".into(), json!(spec.name()));
    out.insert("classification".into(), serde_json::to_value(&c).unwrap());
    out.insert("quantile".into(), serde_json::to_value(&r).unwrap());
    out.insert("p".into(), json!(p));
    out.insert("side".into(), json!(side_name(side)));
    if let Some(n) = mc_samples(cli)? {
        let est = mc_pushforward_quantile(&f, &d, p, side, n, cli.seed)?;
        out.insert("mc".into(), serde_json::to_value(est).unwrap());
    }
    Ok(Value::Object(out))
}

fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Quantile {
            dist,
            p,
            side,
            measure,
        } => quantile(cli, dist, *p, *side, *measure),
        Command::Classify { function } => classify(function),
        Command::TransformQuantile {
            function,
            dist,
            p,
            side,
            no_fallback,
        } => transform(cli, function, dist, *p, *side, !no_fallback),
        Command::Dependence(a) => dependence(a),
        Command::Reducer {
            liability,
            hedger,
            price,
            p,
            measure,
        } => reducer(liability, hedger, *price, *p, *measure),
        Command::Levy {
            mu1,
            sigma1,
            mu2,
            sigma2,
            p,
            standardizer,
        } => levy(cli, *mu1, *sigma1, *mu2, *sigma2, *p, standardizer),
        Command::Payoff {
            spec,
            dist,
            p,
            side,
        } => payoff(cli, spec, dist, *p, *side),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(v) => match output::render(v, cli.format == Format::Csv) {
            Ok(s) => {
                print!("{s}");
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(2)
            }
        },
        Err(Failure::Validation(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::OutOfRange(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(3)
        }
    }
}

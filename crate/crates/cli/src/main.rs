use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde_json::{json, Value};

use gstower::field::{eval_wgh, trace_norm, Wgh};
use gstower::identities::{run_suite, verify_expression, Suite};
use gstower::points::{count_split_points, degree_via_fiber, ModelDegree};
use gstower::ramification::{
    self as ram, degree_floor, formula_row, genus_closure, path_different, path_different_closed_form,
    path_different_grouped, Locus, RamPath,
};
use gstower::tower::{closure_tower, default_beta, gs_tower, ClosureModel, TowerSpec};
use gstower::{make_field, RunManifest};

mod table;

use table::Table;

#[derive(Parser)]
#[command(name = "gstower", version, about = "Explicit Garcia-Stichtenoth tower and Galois closure computations over F_{p^2}")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Field tables, the trace-zero set and the g(xi) = Nm/Tr census.
    FieldInfo(FieldInfoArgs),
    /// Rational points over the split locus, fiber by fiber.
    Count(CountArgs),
    /// Degree of a model read off a completely split fiber.
    Degree(DegreeArgs),
    /// Identity checklist; exits 1 if any entry fails.
    Verify(VerifyArgs),
    /// Genus of the closure tower as a function of deg.
    Genus(GenusArgs),
    /// Different exponents along ramified paths and divisor degrees.
    Different(DifferentArgs),
    /// Ratio of split rational points to genus, level by level.
    Ratio(RatioArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TowerKind {
    Gs,
    Closure,
}

#[derive(Clone, Copy, ValueEnum)]
enum Model {
    Full,
    Reduced,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    All,
    Lemma,
    Delta,
    Eta,
    Gshift,
    Split,
}

#[derive(Args)]
struct FieldInfoArgs {
    #[arg(long)]
    p: u64,
    #[arg(long, value_enum, default_value = "table")]
    format: Format,
}

#[derive(Args)]
struct ModelArgs {
    #[arg(long)]
    p: u64,
    #[arg(long)]
    n: usize,
    #[arg(long, value_enum, default_value = "gs")]
    tower: TowerKind,
    #[arg(long, value_enum, default_value = "full")]
    model: Model,
    /// Nonzero trace-zero element, e.g. "t" or "2t".
    #[arg(long)]
    beta: Option<String>,
}

#[derive(Args)]
struct CountArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long)]
    parallel: bool,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Args)]
struct DegreeArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, value_enum, default_value = "table")]
    format: Format,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    p: u64,
    /// Deepest level k checked for the relation lemma; the node vector has length k-1.
    #[arg(long, default_value_t = 3)]
    kmax: usize,
    #[arg(long, value_enum, default_value = "all")]
    suite: SuiteArg,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Extra identity "lhs = rhs" checked in the closure model of level --n.
    #[arg(long)]
    identity: Option<String>,
    #[arg(long, default_value_t = 3)]
    n: usize,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Args)]
struct GenusArgs {
    #[arg(long)]
    p: u64,
    #[arg(long)]
    n: usize,
    /// Value substituted for deg; must be at least p^(n-1).
    #[arg(long)]
    deg: Option<BigInt>,
    #[arg(long, value_enum, default_value = "table")]
    format: Format,
}

#[derive(Args)]
struct DifferentArgs {
    #[arg(long)]
    p: u64,
    #[arg(long)]
    n: usize,
    #[arg(long, value_enum, default_value = "table")]
    format: Format,
}

#[derive(Args)]
struct RatioArgs {
    #[arg(long)]
    p: u64,
    #[arg(long)]
    nmax: usize,
    /// Evaluate at deg = p^(n-1) on every row.
    #[arg(long)]
    deg_floor: bool,
    /// Evaluate at this deg on every row.
    #[arg(long, conflicts_with = "deg_floor")]
    deg: Option<BigInt>,
    #[arg(long, value_enum, default_value = "table")]
    format: Format,
}

type Failure = Box<dyn std::error::Error>;

/// Text to print and whether every check passed.
struct Output {
    text: String,
    ok: bool,
}

impl Output {
    fn ok(text: String) -> Self {
        Output { text, ok: true }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::FieldInfo(a) => field_info(a),
        Command::Count(a) => count(a),
        Command::Degree(a) => degree(a),
        Command::Verify(a) => verify(a),
        Command::Genus(a) => genus(a),
        Command::Different(a) => different(a),
        Command::Ratio(a) => ratio(a),
    };
    match result {
        Ok(out) => {
            print!("{}", out.text);
            if !out.text.ends_with('\n') {
                println!();
            }
            if out.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("json values serialize") + "\n"
}

fn build_spec(m: &ModelArgs) -> Result<TowerSpec, Failure> {
    Ok(match m.tower {
        TowerKind::Gs => gs_tower(m.p, m.n)?,
        TowerKind::Closure => {
            let model = match m.model {
                Model::Full => ClosureModel::Full,
                Model::Reduced => ClosureModel::Reduced,
            };
            closure_tower(m.p, m.n, m.beta.as_deref(), model)?
        }
    })
}

fn model_manifest(cmd: &str, m: &ModelArgs, spec: &TowerSpec) -> RunManifest {
    let mut man = RunManifest::new(cmd, spec.ctx())
        .flag("p", m.p)
        .flag("n", m.n)
        .flag("tower", if m.tower == TowerKind::Gs { "gs" } else { "closure" });
    if m.tower == TowerKind::Closure {
        man = man
            .flag("model", match m.model {
                Model::Full => "full",
                Model::Reduced => "reduced",
            })
            .flag("beta", spec.beta().map(|b| b.to_string()).unwrap_or_default());
    }
    man
}

fn field_info(a: FieldInfoArgs) -> Result<Output, Failure> {
    let ctx = make_field(a.p, 2)?;
    let census = ctx.check_norm_trace_identity()?;
    let mut t = Table::new(&["element", "trace", "norm", "trace_zero", "g"]);
    for x in ctx.elements() {
        let (tr, nm) = trace_norm(&x)?;
        let g = eval_wgh(&x, Wgh::G).map(|v| v.to_string()).unwrap_or_else(|_| "pole".into());
        t.row(vec![x.to_string(), tr.to_string(), nm.to_string(), x.is_trace_zero().to_string(), g]);
    }
    let kminus: Vec<String> = ctx.trace_zero_set()?.elements().iter().map(|e| e.to_string()).collect();
    let beta = default_beta(&ctx).to_string();
    let text = match a.format {
        Format::Json => pretty(&json!({
            "manifest": RunManifest::new("field-info", &ctx).flag("p", a.p),
            "order": ctx.order(),
            "modulus": ctx.modulus_string(),
            "trace_zero_set": kminus,
            "default_beta": beta,
            "elements": t.to_json(),
            "norm_trace_census": census,
        })),
        Format::Csv => t.to_csv(),
        Format::Table => format!(
            "F_{} = F_{}[t]/({})\ntrace-zero set: {}\ndefault beta: {}\n\n{}\ng(xi) = Nm(xi)/Tr(xi) in F_p^*: {} ({} elements outside the trace-zero set)\n",
            ctx.order(),
            a.p,
            ctx.modulus_string(),
            kminus.join(", "),
            beta,
            t.to_markdown(),
            if census.passed { "yes" } else { "NO" },
            census.checked,
        ),
    };
    Ok(Output { text, ok: census.passed })
}

fn degree_json(d: ModelDegree) -> Value {
    serde_json::to_value(d).expect("degree serializes")
}

fn degree_text(d: ModelDegree) -> String {
    match d {
        ModelDegree::Exact(v) => format!("{v} (exact)"),
        ModelDegree::UpperBound(v) => format!("{v} (upper bound: the full affine model may be reducible)"),
    }
}

fn count(a: CountArgs) -> Result<Output, Failure> {
    let spec = build_spec(&a.model)?;
    let census = count_split_points(&spec, a.parallel)?;
    let text = match a.format {
        Format::Csv => census.to_csv(),
        Format::Json => pretty(&json!({
            "manifest": model_manifest("count", &a.model, &spec),
            "rows": census.rows,
            "total": census.total,
            "degree": degree_json(census.degree),
            "bound": census.bound,
            "bound_met": census.bound_met,
        })),
        Format::Table => {
            let mut t = Table::new(&["base", "fiber_size", "split", "values_outside_Kminus"]);
            for r in &census.rows {
                t.row(vec![
                    r.base.clone(),
                    r.fiber_size.to_string(),
                    r.split.to_string(),
                    r.values_outside_kminus.to_string(),
                ]);
            }
            format!(
                "{}\ntotal: {}\ndegree: {}\nbound (p^2-p)*degree: {}\nbound met: {}\n",
                t.to_markdown(),
                census.total,
                degree_text(census.degree),
                census.bound,
                census.bound_met
            )
        }
    };
    Ok(Output::ok(text))
}

fn degree(a: DegreeArgs) -> Result<Output, Failure> {
    let spec = build_spec(&a.model)?;
    let d = degree_via_fiber(&spec)?;
    let text = match a.format {
        Format::Json => pretty(&json!({
            "manifest": model_manifest("degree", &a.model, &spec),
            "degree": degree_json(d),
        })),
        Format::Csv => format!(
            "degree,kind\n{},{}\n",
            d.value(),
            if d.is_exact() { "exact" } else { "upper_bound" }
        ),
        Format::Table => format!("degree: {}\n", degree_text(d)),
    };
    Ok(Output::ok(text))
}

fn verify(a: VerifyArgs) -> Result<Output, Failure> {
    let ctx = make_field(a.p, 2)?;
    let suite = match a.suite {
        SuiteArg::All => Suite::All,
        SuiteArg::Lemma => Suite::Lemma,
        SuiteArg::Delta => Suite::Delta,
        SuiteArg::Eta => Suite::Eta,
        SuiteArg::Gshift => Suite::GShift,
        SuiteArg::Split => Suite::Split,
    };
    let mut list = run_suite(&ctx, a.kmax, suite, a.seed)?;
    if let Some(text) = &a.identity {
        let spec = closure_tower(a.p, a.n, None, ClosureModel::Full)?;
        let e = verify_expression(&spec, text, a.seed)?;
        list.passed &= e.passed;
        list.entries.push(e);
    }
    let mut man = RunManifest::new("verify", &ctx)
        .flag("p", a.p)
        .flag("kmax", a.kmax)
        .flag("suite", format!("{suite:?}").to_lowercase())
        .flag("seed", a.seed);
    if let Some(text) = &a.identity {
        man = man.flag("identity", text).flag("n", a.n);
    }
    let mut t = Table::new(&["statement_id", "instances", "passed", "numeric_points", "negative_controls", "counterexample"]);
    for e in &list.entries {
        t.row(vec![
            e.statement_id.clone(),
            e.instances.to_string(),
            e.passed.to_string(),
            e.numeric_points.to_string(),
            e.negative_controls.to_string(),
            e.counterexample.clone().unwrap_or_default(),
        ]);
    }
    let text = match a.format {
        Format::Json => pretty(&json!({
            "manifest": man,
            "checklist": list.entries,
            "passed": list.passed,
        })),
        Format::Csv => t.to_csv(),
        Format::Table => format!("{}\nall passed: {}\n", t.to_markdown(), list.passed),
    };
    Ok(Output { text, ok: list.passed })
}

fn genus(a: GenusArgs) -> Result<Output, Failure> {
    let ctx = make_field(a.p, 2)?;
    let g = genus_closure(a.p, a.n)?;
    let value = match &a.deg {
        Some(d) => {
            let floor = degree_floor(a.p, a.n);
            if *d < floor {
                return Err(Box::new(ram::RamificationError::DegreeTooSmall { floor, got: d.clone() }));
            }
            Some(g.eval(&num_rational::BigRational::from_integer(d.clone())))
        }
        None => None,
    };
    let mut t = Table::new(&["n", "genus", "deg", "genus_at_deg"]);
    t.row(vec![
        a.n.to_string(),
        g.to_string(),
        a.deg.as_ref().map(|d| d.to_string()).unwrap_or_default(),
        value.as_ref().map(|v| v.to_string()).unwrap_or_default(),
    ]);
    let text = match a.format {
        Format::Json => {
            let mut man = RunManifest::new("genus", &ctx).flag("p", a.p).flag("n", a.n);
            if let Some(d) = &a.deg {
                man = man.flag("deg", d);
            }
            pretty(&json!({
                "manifest": man,
                "genus": g,
                "genus_at_deg": value.map(|v| v.to_string()),
            }))
        }
        Format::Csv => t.to_csv(),
        Format::Table => t.to_markdown(),
    };
    Ok(Output::ok(text))
}

fn different(a: DifferentArgs) -> Result<Output, Failure> {
    let ctx = make_field(a.p, 2)?;
    let mut t = Table::new(&[
        "locus",
        "steps",
        "different",
        "closed_form",
        "grouped_sum",
        "ramification_index",
        "divisor_degree",
    ]);
    for (locus, name) in [(Locus::Zero, "zero"), (Locus::KminusStarOrInfty, "kminus-star-or-infty")] {
        let Ok(path) = RamPath::new(a.p, a.n, locus) else {
            continue;
        };
        let steps: Vec<String> = path.steps.iter().map(|s| format!("({},{})", s.e, s.d)).collect();
        let grouped = match locus {
            Locus::KminusStarOrInfty => path_different_grouped(a.p, a.n).ok().map(|v| v.to_string()),
            Locus::Zero => None,
        };
        let divisor = match locus {
            Locus::Zero => ram::deg_D(a.p, a.n).ok(),
            Locus::KminusStarOrInfty => ram::deg_L(a.p, a.n).ok(),
        };
        t.row(vec![
            name.into(),
            steps.join(" "),
            path_different(a.p, a.n, locus)?.to_string(),
            path_different_closed_form(a.p, a.n, locus)?.to_string(),
            grouped.unwrap_or_default(),
            path.ramification_index().to_string(),
            divisor.map(|d| d.to_string()).unwrap_or_default(),
        ]);
    }
    if t.is_empty() {
        // Both loci rejected the level; report the stricter guard.
        path_different(a.p, a.n, Locus::KminusStarOrInfty)?;
    }
    let text = match a.format {
        Format::Json => pretty(&json!({
            "manifest": RunManifest::new("different", &ctx).flag("p", a.p).flag("n", a.n),
            "paths": t.to_json(),
        })),
        Format::Csv => t.to_csv(),
        Format::Table => t.to_markdown(),
    };
    Ok(Output::ok(text))
}

fn ratio(a: RatioArgs) -> Result<Output, Failure> {
    let ctx = make_field(a.p, 2)?;
    if a.nmax < 5 {
        return Err(Box::new(ram::RamificationError::LevelTooSmall {
            what: "the ratio table",
            min: 5,
            got: a.nmax,
        }));
    }
    let mut t = Table::new(&[
        "n",
        "deg_D/deg",
        "deg_L/deg",
        "genus_coeff",
        "ratio_limit",
        "ratio_limit_approx",
        "deg",
        "ratio_at_deg",
        "ratio_at_deg_approx",
    ]);
    let mut rows = Vec::new();
    for n in 5..=a.nmax {
        let deg = if a.deg_floor {
            Some(degree_floor(a.p, n))
        } else {
            a.deg.clone()
        };
        let r = formula_row(a.p, n, deg.as_ref())?;
        t.row(vec![
            n.to_string(),
            r.deg_d_coeff.to_string(),
            r.deg_l_coeff.to_string(),
            r.genus_coeff.to_string(),
            r.ratio_limit.to_string(),
            format!("{:.6}", r.ratio_limit_approx),
            r.deg.clone().unwrap_or_default(),
            r.ratio_at_deg.as_ref().map(|v| v.to_string()).unwrap_or_default(),
            r.ratio_at_deg_approx.map(|v| format!("{v:.6}")).unwrap_or_default(),
        ]);
        rows.push(r);
    }
    let limit = ram::ratio_limit_in_n(a.p)?;
    let text = match a.format {
        Format::Json => {
            let mut man = RunManifest::new("ratio", &ctx).flag("p", a.p).flag("nmax", a.nmax);
            if a.deg_floor {
                man = man.flag("deg_floor", true);
            }
            if let Some(d) = &a.deg {
                man = man.flag("deg", d);
            }
            pretty(&json!({
                "manifest": man,
                "rows": rows,
                "limit_in_n": limit.to_string(),
            }))
        }
        Format::Csv => t.to_csv(),
        Format::Table => format!(
            "{}\nlimit as n grows: {} (approx columns are display only)\n",
            t.to_markdown(),
            limit
        ),
    };
    Ok(Output::ok(text))
}

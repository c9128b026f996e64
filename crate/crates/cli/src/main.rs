//! `polysym`: symbols, integration and HPL reductions from the command line.
//!
//! Exit status: 0 on success, 1 when a verification fails, 2 on bad input.

use clap::{Parser, Subcommand};
use num_bigint::BigInt;
use polysym::alphabet::{Alphabet, Bounds};
use polysym::exact_arith::{fmt_rational, parse_rational, vars, Rational, Vars};
use polysym::hpl::{self, HplIndex, ReduceOptions};
use polysym::integrator::{
    default_kernel, default_points, expr_oracle, fix_constants, integrate_symbol, letter_log, AnsatzBasis, ConstantFix,
    IntegrateError, IntegrationResult,
};
use polysym::mpl::{cmzv_symbol, grow_alphabet, symbol_of, CmzvSpec, FuncExpr};
use polysym::numeric::eval_mpl_report;
use polysym::polygon::enumerate_maximal_dissections;
use polysym::tensor::Symbol;
use serde_json::{json, Value};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "polysym", version, about = "Symbols of multiple polylogarithms")]
struct Cli {
    /// Alphabet file: a JSON list of letters, or `{"vars": [...], "letters": [...]}`.
    #[arg(long, global = true)]
    alphabet: Option<String>,
    /// Working precision in decimal digits.
    #[arg(long, global = true, default_value_t = 40)]
    precision: u32,
    /// Exponent bound for non-constant letters in argument searches.
    #[arg(long, global = true, default_value_t = 4)]
    bound: i64,
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Comma-separated sample points, e.g. `1/5,1/4,1/3`.
    #[arg(long, global = true)]
    points: Option<String>,
    /// Comma-separated variable names.
    #[arg(long, global = true, default_value = "x")]
    vars: String,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Symbol of an expression.
    Symbol {
        #[arg(allow_hyphen_values = true)]
        expr: String,
    },
    /// Integrates the symbol of an expression back to a function.
    Integrate {
        #[arg(allow_hyphen_values = true)]
        expr: String,
    },
    /// Compares two expressions: symbols first, then optionally numerically.
    CheckIdentity {
        #[arg(allow_hyphen_values = true)]
        lhs: String,
        #[arg(allow_hyphen_values = true)]
        rhs: String,
        /// Also compare values at the sample points.
        #[arg(long)]
        numeric: bool,
    },
    /// Reduces an HPL, given as `0,0,1,1`, onto the spanning set.
    HplReduce {
        #[arg(allow_hyphen_values = true)]
        index: String,
    },
    /// Counts the maximal dissections of an n-gon.
    EnumerateDissections {
        n: usize,
        /// Print the dissections themselves.
        #[arg(long)]
        list: bool,
    },
    /// Solutions of `1 - R = R'` for `R = ± 2^δ x^α (1-x)^β (1+x)^γ`.
    Table2,
    /// Symbol of a coloured MZV, e.g. `cmzv-symbol 2,1 -1,1`.
    CmzvSymbol {
        m: String,
        #[arg(allow_hyphen_values = true)]
        s: String,
    },
    /// Evaluates an expression at a point, e.g. `eval "Li2(x)" --at 1/3`.
    Eval {
        #[arg(allow_hyphen_values = true)]
        expr: String,
        #[arg(long, allow_hyphen_values = true)]
        at: String,
    },
}

enum Failure {
    Input(String),
    Verify(String),
}

type Out = Result<(String, Value), Failure>;

fn input<E: std::fmt::Display>(stage: &str) -> impl Fn(E) -> Failure + '_ {
    move |e| Failure::Input(format!("{stage}: {e}"))
}

fn integrate_failure(e: IntegrateError) -> Failure {
    match e {
        IntegrateError::NotIntegrable
        | IntegrateError::Unsolvable { .. }
        | IntegrateError::ReconstructionFailed(_) => Failure::Verify(format!("integration: {e}")),
        e => Failure::Input(format!("integration: {e}")),
    }
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>, Failure> {
    s.split(',')
        .map(|t| t.trim().parse::<T>().map_err(|_| Failure::Input(format!("{what}: cannot read `{t}`"))))
        .collect()
}

fn parse_points(s: &str) -> Result<Vec<Rational>, Failure> {
    s.split(',').map(|t| parse_rational(t.trim()).map_err(input("points"))).collect()
}

struct Session {
    vars: Vars,
    alphabet: Option<Alphabet>,
}

impl Session {
    fn new(cli: &Cli) -> Result<Self, Failure> {
        let names: Vec<&str> = cli.vars.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
        let mut v = vars(&names);
        let alphabet = match &cli.alphabet {
            None => None,
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(input("alphabet file"))?;
                let j: Value = serde_json::from_str(&text).map_err(input("alphabet file"))?;
                let letters = match &j {
                    Value::Object(o) => {
                        if let Some(vs) = o.get("vars") {
                            let vs: Vec<String> = serde_json::from_value(vs.clone()).map_err(input("alphabet vars"))?;
                            v = vars(&vs);
                        }
                        o.get("letters").cloned().unwrap_or(Value::Null)
                    }
                    other => other.clone(),
                };
                Some(Alphabet::from_json(&v, &letters).map_err(input("alphabet"))?)
            }
        };
        Ok(Session { vars: v, alphabet })
    }

    fn expr(&self, s: &str) -> Result<FuncExpr, Failure> {
        FuncExpr::parse(s, &self.vars).map_err(input("parse"))
    }

    fn alphabet_for(&self, es: &[&FuncExpr]) -> Result<Alphabet, Failure> {
        if let Some(a) = &self.alphabet {
            return Ok(a.clone());
        }
        let mut a = Alphabet::empty(&self.vars);
        for e in es {
            grow_alphabet(e, &mut a).map_err(input("alphabet"))?;
        }
        Ok(a)
    }
}

fn symbol_json(s: &Symbol, a: &Alphabet) -> Value {
    json!({ "alphabet": a.to_json(), "weight": s.weight(), "symbol": s.to_json(a) })
}

fn cmd_symbol(ses: &Session, e: &str) -> Out {
    let e = ses.expr(e)?;
    let a = ses.alphabet_for(&[&e])?;
    let s = symbol_of(&e, &a).map_err(input("symbol"))?;
    Ok((s.display(&a), symbol_json(&s, &a)))
}

fn constants_json(c: &ConstantFix) -> Value {
    json!({
        "coefficients": c.coefficients.iter().map(|(q, k)| json!({"element": k.to_string(), "coefficient": fmt_rational(q)})).collect::<Vec<_>>(),
        "points": c.points.iter().map(fmt_rational).collect::<Vec<_>>(),
        "residuals": c.residuals.iter().map(|r| format!("{:.1e}", r.to_f64())).collect::<Vec<_>>(),
    })
}

fn integration_json(r: &IntegrationResult, a: &Alphabet) -> Value {
    json!({
        "layers": r.layers.iter().map(|l| json!({
            "partition": l.partition.to_string(),
            "terms": l.terms.iter().map(|(c, f)| json!({"function": f.to_string(), "coefficient": fmt_rational(c)})).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
        "residual": r.residual.to_json(a),
    })
}

fn report_text(expr: &FuncExpr, r: &IntegrationResult, c: Option<&ConstantFix>, a: &Alphabet) -> String {
    let mut out = format!("{expr}\n");
    for l in &r.layers {
        out += &format!("  partition {}: {} term(s)\n", l.partition, l.terms.len());
    }
    out += &format!("  residual symbol: {}\n", if r.residual.is_zero() { "0".to_string() } else { r.residual.display(a) });
    match c {
        Some(c) => {
            for (q, k) in &c.coefficients {
                out += &format!("  constant {} * {}\n", fmt_rational(q), k);
            }
            let worst = c.residuals.iter().map(|r| r.to_f64()).fold(0.0, f64::max);
            out += &format!("  checked at {} points, max residual {:.1e}\n", c.points.len(), worst);
        }
        None => out += "  constants not fixed\n",
    }
    out
}

fn cmd_integrate(ses: &Session, cli: &Cli, e: &str) -> Out {
    let e = ses.expr(e)?;
    let a = ses.alphabet_for(&[&e])?;
    let s = symbol_of(&e, &a).map_err(input("symbol"))?;
    let w = s.weight();
    let bounds = Bounds { nonconstant: cli.bound, ..Bounds::default() };
    let basis = AnsatzBasis::generic(&a, bounds, w).map_err(integrate_failure)?;
    let r = integrate_symbol(&s, &a, &basis).map_err(integrate_failure)?;
    let fix = if ses.vars.len() == 1 {
        let b1: Vec<FuncExpr> = (0..a.len()).map(|i| letter_log(&a, i)).collect();
        let b2: Vec<FuncExpr> = basis.weight(2).iter().map(|b| b.expr.clone()).collect();
        let kernel = default_kernel(w, &b1, &b2);
        let pts = match &cli.points {
            Some(p) => parse_points(p)?,
            None => default_points(),
        };
        let oracle = expr_oracle(&e);
        Some(
            fix_constants(&oracle, &r.expression, &kernel, &pts, cli.precision, &BigInt::from(1u32 << 16))
                .map_err(integrate_failure)?,
        )
    } else {
        None
    };
    let expr = fix.as_ref().map(|c| c.expression.clone()).unwrap_or_else(|| r.expression.clone());
    let mut j = integration_json(&r, &a);
    j["expression"] = json!(expr.to_string());
    j["constants"] = fix.as_ref().map(constants_json).unwrap_or(Value::Null);
    Ok((report_text(&expr, &r, fix.as_ref(), &a), j))
}

fn cmd_check(ses: &Session, cli: &Cli, l: &str, r: &str, numeric: bool) -> Out {
    let (l, r) = (ses.expr(l)?, ses.expr(r)?);
    let a = ses.alphabet_for(&[&l, &r])?;
    let sl = symbol_of(&l, &a).map_err(input("symbol"))?;
    let sr = symbol_of(&r, &a).map_err(input("symbol"))?;
    let symbol_equal = sl == sr;
    let mut j = json!({ "symbol_equal": symbol_equal, "decided_by": "symbol" });
    let mut text = format!("symbols {}\n", if symbol_equal { "equal" } else { "differ" });
    let mut equal = symbol_equal;
    if symbol_equal && numeric {
        let pts = match &cli.points {
            Some(p) => parse_points(p)?,
            None => default_points(),
        };
        let tol = 10f64.powi(-(cli.precision as i32 - 10));
        let mut gaps = Vec::new();
        for x in &pts {
            let p = vec![x.clone(); ses.vars.len()];
            let vl = polysym::numeric::eval_mpl(&l, &p, cli.precision).map_err(input("eval"))?;
            let vr = polysym::numeric::eval_mpl(&r, &p, cli.precision).map_err(input("eval"))?;
            gaps.push(vl.sub(&vr).abs().to_f64());
        }
        equal = gaps.iter().all(|g| *g < tol);
        text += &format!("values {} at {} point(s)\n", if equal { "equal" } else { "differ" }, gaps.len());
        j["decided_by"] = json!("numeric");
        j["numeric_gaps"] = json!(gaps.iter().map(|g| format!("{g:.1e}")).collect::<Vec<_>>());
    }
    j["equal"] = json!(equal);
    if equal {
        Ok((text + "equal", j))
    } else if cli.json {
        println!("{}", serde_json::to_string_pretty(&j).expect("json"));
        Err(Failure::Verify(String::new()))
    } else {
        Err(Failure::Verify(text + "not equal"))
    }
}

fn cmd_hpl(cli: &Cli, index: &str) -> Out {
    let h = HplIndex::parse(index).map_err(input("HPL index"))?;
    let opts = ReduceOptions { digits: cli.precision, ..ReduceOptions::default() };
    let opts = match &cli.points {
        Some(p) => ReduceOptions { points: parse_points(p)?, ..opts },
        None => opts,
    };
    let r = hpl::hpl_reduce(&h, &opts).map_err(integrate_failure)?;
    let (_, a) = hpl::hpl_alphabet();
    let symbol_ok = hpl::symbol_matches(&h, &r.expression).map_err(input("symbol"))?;
    let checks = [polysym::exact_arith::rat(1, 4), polysym::exact_arith::rat(1, 3), polysym::exact_arith::rat(1, 2)];
    let mut gaps = Vec::new();
    for x in &checks {
        gaps.push(hpl::numeric_gap(&h, &r.expression, x, cli.precision).map_err(input("eval"))?.to_f64());
    }
    let tol = 10f64.powi(-(cli.precision as i32 - 15));
    let numeric_ok = gaps.iter().all(|g| *g < tol);
    let mut text = report_text(&r.expression, &r.integration, Some(&r.constants), &a);
    text += &format!("  symbol check: {}\n", if symbol_ok { "ok" } else { "FAILED" });
    for (x, g) in checks.iter().zip(&gaps) {
        text += &format!("  |H - reduction| at x = {x}: {g:.1e}\n");
    }
    let mut j = integration_json(&r.integration, &a);
    j["index"] = json!(h.0);
    j["expression"] = json!(r.expression.to_string());
    j["constants"] = constants_json(&r.constants);
    j["verification"] = json!({
        "symbol_equal": symbol_ok,
        "points": checks.iter().map(fmt_rational).collect::<Vec<_>>(),
        "gaps": gaps.iter().map(|g| format!("{g:.1e}")).collect::<Vec<_>>(),
    });
    if symbol_ok && numeric_ok {
        Ok((text.trim_end().to_string(), j))
    } else {
        Err(Failure::Verify(text))
    }
}

fn cmd_dissections(n: usize, list: bool) -> Out {
    let ds = enumerate_maximal_dissections(n);
    let mut text = ds.len().to_string();
    if list {
        for d in ds.iter() {
            text += &format!("\n{d}");
        }
    }
    let mut j = json!({ "n": n, "count": ds.len() });
    if list {
        j["dissections"] = Value::Array(ds.iter().map(|d| d.to_json()).collect());
    }
    Ok((text, j))
}

fn cmd_table2(cli: &Cli) -> Out {
    let (v, _) = hpl::hpl_alphabet();
    let rows = hpl::table2_enumerate(Bounds { nonconstant: cli.bound, ..Bounds::default() });
    let listed = hpl::table2_listed();
    let mut text = String::new();
    let mut js = Vec::new();
    for r in &rows {
        let value = r.value(&v).to_string();
        let flag = if r.is_constant() { "  constant" } else { "" };
        let inv = if listed.contains(r) { "" } else { "  (inverse)" };
        text += &format!("{r}  {value}{flag}{inv}\n");
        js.push(json!({
            "s": r.s, "alpha": r.alpha, "beta": r.beta, "gamma": r.gamma, "delta": r.delta,
            "value": value, "constant": r.is_constant(), "listed": listed.contains(r),
        }));
    }
    text += &format!("{} solutions", rows.len());
    Ok((text, Value::Array(js)))
}

fn cmd_cmzv(ses: &Session, m: &str, s: &str) -> Out {
    let z = CmzvSpec::new(parse_list(m, "weights")?, parse_list(s, "signs")?).map_err(input("CMZV"))?;
    let a = match &ses.alphabet {
        Some(a) => a.clone(),
        None => Alphabet::parse(&ses.vars, &["2"]).map_err(input("alphabet"))?,
    };
    let sym = cmzv_symbol(&z, &a).map_err(input("symbol"))?;
    let text = if sym.is_zero() { "0".to_string() } else { sym.display(&a) };
    Ok((text, symbol_json(&sym, &a)))
}

fn cmd_eval(ses: &Session, cli: &Cli, e: &str, at: &str) -> Out {
    let e = ses.expr(e)?;
    let p = parse_points(at)?;
    if p.len() != ses.vars.len() {
        return Err(Failure::Input(format!("eval: {} value(s) for {} variable(s)", p.len(), ses.vars.len())));
    }
    let (v, n) = eval_mpl_report(&e, &p, cli.precision).map_err(input("eval"))?;
    let digits = cli.precision;
    let val = v.to_decimal(digits);
    Ok((
        format!("{val}\n  truncation order N = {n}"),
        json!({ "value": val, "digits": digits, "truncation_order": n }),
    ))
}

fn run(cli: &Cli) -> Out {
    let ses = Session::new(cli)?;
    match &cli.cmd {
        Cmd::Symbol { expr } => cmd_symbol(&ses, expr),
        Cmd::Integrate { expr } => cmd_integrate(&ses, cli, expr),
        Cmd::CheckIdentity { lhs, rhs, numeric } => cmd_check(&ses, cli, lhs, rhs, *numeric),
        Cmd::HplReduce { index } => cmd_hpl(cli, index),
        Cmd::EnumerateDissections { n, list } => cmd_dissections(*n, *list),
        Cmd::Table2 => cmd_table2(cli),
        Cmd::CmzvSymbol { m, s } => cmd_cmzv(&ses, m, s),
        Cmd::Eval { expr, at } => cmd_eval(&ses, cli, expr, at),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((text, j)) => {
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&j).expect("json"));
            } else {
                println!("{text}");
            }
            ExitCode::SUCCESS
        }
        Err(Failure::Verify(msg)) => {
            if !msg.is_empty() {
                eprintln!("{}", msg.trim_end());
            }
            ExitCode::from(1)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

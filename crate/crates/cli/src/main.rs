//! `settled`: evaluate elements, count stable cycles, follow descendants and
//! run the check harness from the command line.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use settled::dynamics::{
    block_analysis, cycle_records_portrait, cycle_records_word, descendant_levels, settle_profile,
    CycleRecord, StabilityStatus,
};
use settled::portrait::MAX_DEPTH;
use settled::symbolic::{
    approximate_in_a, membership_u_gamma, parse_portrait_expression, Base, PortraitExpr,
    DEFAULT_MEMBERSHIP_DEPTH,
};
use settled::verify::{run_harness, GridConfig, Verdict};
use settled::{GeneratorSystem, Word, DEFAULT_PRECISION, PRECISION_HEADROOM};

#[derive(Parser, Debug)]
#[command(
    name = "settled",
    version,
    about = "Odometer normalizers, iterated monodromy generators and stable cycles"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
enum Command {
    /// Portrait of an element on T_n, with level signs and cycle lengths.
    Eval,
    /// Cycles and their stability on levels 1..=max-level.
    Cycles,
    /// Stable-vertex counts s_n for n = 1..=max-level.
    Profile,
    /// Iterated descendants with 𝒰(γ) verdicts and coset labels.
    Descendants,
    /// Stable-block analysis through --depth levels.
    Blocks,
    /// Runs the check harness; exits nonzero when a case fails.
    Verify,
    /// Rewrites an element as a positive generator word times z_k0 on T_n.
    ApproxDense,
}

#[derive(clap::Args, Debug)]
struct Opts {
    /// Element expression, e.g. "a1*g^3*z[5]" or "z[5%16]".
    #[arg(long, global = true)]
    expr: Option<String>,
    /// Length of the postcritical cycle (number of generators).
    /// Defaults to 2; for verify it replaces the grid's generator systems.
    #[arg(long, global = true)]
    r: Option<u32>,
    #[arg(long, global = true)]
    max_level: Option<u32>,
    /// Depth for block and descendant walks, and the stability budget for portraits.
    #[arg(long, global = true, default_value_t = 12)]
    depth: u32,
    /// Working precision in bits; must be at least max-level + 8.
    #[arg(long, global = true, default_value_t = DEFAULT_PRECISION)]
    precision: u32,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Grid config (TOML) for verify.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Restrict verify to this suite; repeatable.
    #[arg(long, global = true)]
    suite: Vec<String>,
    /// Record per-suite wall time in the verify report.
    #[arg(long, global = true)]
    timings: bool,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Csv,
    Json,
}

const DEFAULT_MAX_LEVEL: u32 = 10;

type Res<T> = Result<T, String>;

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((text, ok)) => {
            if let Some(path) = &cli.opts.out {
                if let Err(e) = std::fs::write(path, &text) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return ExitCode::from(2);
                }
            } else {
                print!("{text}");
            }
            if ok {
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

/// Output text and whether the command succeeded.
fn run(cli: &Cli) -> Res<(String, bool)> {
    let o = &cli.opts;
    let sys = GeneratorSystem::new(o.r.unwrap_or(2)).map_err(err)?;
    let max_level = o.max_level.unwrap_or(DEFAULT_MAX_LEVEL);
    let needed = match cli.command {
        Command::Descendants | Command::Blocks => o.depth.max(o.max_level.unwrap_or(0)),
        Command::Verify => o.max_level.unwrap_or(0),
        _ => max_level,
    };
    check_precision(o.precision, needed)?;
    let uses_level = !matches!(
        cli.command,
        Command::Verify | Command::Descendants | Command::Blocks
    );
    if uses_level && max_level == 0 {
        return Err("--max-level must be at least 1".into());
    }
    let format = o.format.unwrap_or(match cli.command {
        Command::Profile => Format::Csv,
        _ => Format::Json,
    });
    if cli.command == Command::Verify {
        return verify(o, format);
    }

    let text = o.expr.as_deref().ok_or("--expr is required")?;
    let parsed = parse_portrait_expression(text).map_err(err)?;
    let word = parsed.as_word(&sys).ok();
    if let Some(w) = &word {
        w.validate(&sys).map_err(err)?;
        check_literals(w, o.precision)?;
    }
    let need_word = || {
        word.clone()
            .ok_or_else(|| format!("'{text}' uses s, which is only allowed in eval and cycles"))
    };

    let out = match cli.command {
        Command::Eval => eval(text, &parsed, max_level, &sys, format)?,
        Command::Cycles => cycles(&parsed, word.as_ref(), max_level, o.depth, &sys, format)?,
        Command::Profile => {
            let p = settle_profile(&need_word()?, max_level, &sys).map_err(err)?;
            match format {
                Format::Csv => p.to_csv(),
                Format::Json => to_json(&p),
            }
        }
        Command::Descendants => descendants(&need_word()?, o.depth, &sys, format)?,
        Command::Blocks => {
            let rep = block_analysis(&need_word()?, o.depth, &sys).map_err(err)?;
            match format {
                Format::Json => to_json(&rep),
                Format::Csv => {
                    let mut s = String::from("level,is_block,d_size,d_sign,member\n");
                    for l in &rep.levels {
                        let _ = writeln!(
                            s,
                            "{},{},{},{},{}",
                            l.level,
                            l.is_block,
                            opt(l.d_size()),
                            opt(l.d_sign),
                            l.member
                                .as_ref()
                                .map_or("unknown".to_string(), |w| quote(&w.to_string()))
                        );
                    }
                    s
                }
            }
        }
        Command::ApproxDense => {
            let a = approximate_in_a(&need_word()?, max_level, &sys).map_err(err)?;
            match format {
                Format::Json => to_json(&a),
                Format::Csv => format!(
                    "level,k0,verified,g0_length,g0\n{},{},{},{},{}\n",
                    a.level,
                    a.k0,
                    a.verified,
                    a.g0.len(),
                    quote(&a.g0.to_string())
                ),
            }
        }
        Command::Verify => unreachable!(),
    };
    Ok((out, true))
}

fn check_precision(precision: u32, level: u32) -> Res<()> {
    if precision > DEFAULT_PRECISION {
        return Err(format!(
            "--precision {precision} exceeds the supported {DEFAULT_PRECISION} bits"
        ));
    }
    if precision < level + PRECISION_HEADROOM {
        return Err(format!(
            "--precision {precision} is too small for level {level}: need at least {}",
            level + PRECISION_HEADROOM
        ));
    }
    Ok(())
}

/// Residue literals may not carry more bits than the working precision.
fn check_literals(w: &Word, precision: u32) -> Res<()> {
    for l in w.letters() {
        let idx = match &l.base {
            Base::Z(k) => k.precision(),
            _ => None,
        };
        if let Some(p) = l.exp.precision().into_iter().chain(idx).max() {
            if p > precision {
                return Err(format!(
                    "literal {l} has {p} bits, above --precision {precision}"
                ));
            }
        }
    }
    Ok(())
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn opt<T: std::fmt::Display>(v: Option<T>) -> String {
    v.map_or("unknown".to_string(), |x| x.to_string())
}

fn quote(s: &str) -> String {
    if s.contains([',', '"']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn status_text(s: &StabilityStatus) -> String {
    match s {
        StabilityStatus::Certified => "certified".into(),
        StabilityStatus::StableToDepth(d) => format!("stable_to_depth({d})"),
        StabilityStatus::Splits(at) => format!("splits_at({at})"),
    }
}

fn eval(
    text: &str,
    e: &PortraitExpr,
    n: u32,
    sys: &GeneratorSystem,
    format: Format,
) -> Res<String> {
    let p = e.evaluate(n, sys).map_err(err)?;
    let mut levels = Vec::new();
    for j in 1..=n {
        let counts = p.cycle_structure(j).map_err(err)?.length_counts();
        levels.push((j, p.sign_at(j).map_err(err)?, counts));
    }
    Ok(match format {
        Format::Json => to_json(&json!({
            "expression": text,
            "level": n,
            "odometer": p.is_odometer(),
            "levels": levels.iter().map(|(j, s, c)| json!({
                "level": j,
                "sign": s,
                "cycle_lengths": c.iter().map(|(l, k)| json!({"length": l, "count": k})).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
            "portrait": p.to_json(),
        })),
        Format::Csv => {
            let mut s = String::from("level,sign,cycle_lengths\n");
            for (j, sign, c) in &levels {
                let lengths: Vec<String> = c.iter().map(|(l, k)| format!("{l}x{k}")).collect();
                let _ = writeln!(s, "{j},{sign},{}", lengths.join(";"));
            }
            s
        }
    })
}

fn cycles(
    e: &PortraitExpr,
    word: Option<&Word>,
    max_level: u32,
    budget: u32,
    sys: &GeneratorSystem,
    format: Format,
) -> Res<String> {
    let mut all: Vec<(u32, Vec<CycleRecord>)> = Vec::new();
    let portrait = match word {
        Some(_) => None,
        None => {
            if max_level + budget > MAX_DEPTH {
                return Err(format!(
                    "portrait expressions need max-level + depth ≤ {MAX_DEPTH}; lower --depth"
                ));
            }
            Some(e.evaluate(max_level + budget, sys).map_err(err)?)
        }
    };
    for n in 1..=max_level {
        let recs = match (word, &portrait) {
            (Some(w), _) => cycle_records_word(w, n, sys),
            (None, Some(p)) => cycle_records_portrait(p, n, budget),
            (None, None) => unreachable!(),
        }
        .map_err(err)?;
        all.push((n, recs));
    }
    Ok(match format {
        Format::Json => to_json(
            &all.iter()
                .map(|(n, recs)| json!({"level": n, "cycles": recs}))
                .collect::<Vec<_>>(),
        ),
        Format::Csv => {
            let mut s = String::from("level,representative,length,status\n");
            for (n, recs) in &all {
                for c in recs {
                    let _ = writeln!(
                        s,
                        "{n},{},{},{}",
                        c.representative,
                        c.length,
                        status_text(&c.status)
                    );
                }
            }
            s
        }
    })
}

fn descendants(w: &Word, depth: u32, sys: &GeneratorSystem, format: Format) -> Res<String> {
    let levels = descendant_levels(w, depth, sys).map_err(err)?;
    let mut rows = Vec::new();
    for (n, ws) in levels.iter().enumerate() {
        for d in ws {
            let mdepth = d.min_precision().map_or(DEFAULT_MEMBERSHIP_DEPTH, |p| {
                p.min(DEFAULT_MEMBERSHIP_DEPTH)
            });
            let m = membership_u_gamma(d, sys, mdepth).map_err(err)?;
            rows.push((n, d, d.coset_label().map_err(err)?, m));
        }
    }
    Ok(match format {
        Format::Json => to_json(
            &rows
                .iter()
                .map(|(n, d, k, m)| {
                    json!({
                        "level": n,
                        "element": d,
                        "coset_label": k,
                        "in_u_gamma": m.trit(),
                        "membership": m,
                    })
                })
                .collect::<Vec<_>>(),
        ),
        Format::Csv => {
            let mut s = String::from("level,element,coset_label,in_u_gamma,membership\n");
            for (n, d, k, m) in &rows {
                let _ = writeln!(
                    s,
                    "{n},{},{k},{},{}",
                    quote(&d.to_string()),
                    m.trit(),
                    quote(&m.to_string())
                );
            }
            s
        }
    })
}

fn verify(o: &Opts, format: Format) -> Res<(String, bool)> {
    let mut cfg = match &o.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
            GridConfig::from_toml(&text).map_err(err)?
        }
        None => GridConfig::default(),
    };
    if let Some(seed) = o.seed {
        cfg = cfg.with_seed(seed);
    }
    if let Some(r) = o.r {
        cfg = cfg.with_r(r).map_err(err)?;
    }
    if let Some(n) = o.max_level {
        cfg = cfg.with_max_level(n);
    }
    let report = run_harness(&cfg, &o.suite, o.timings).map_err(err)?;
    for s in &report.suites {
        let failed = s.failures().count();
        let status = if s.passed { "PASS" } else { "FAIL" };
        eprintln!(
            "{status} {} ({} cases, {failed} failed)",
            s.name,
            s.cases.len()
        );
    }
    let text = match format {
        Format::Json => to_json(&report),
        Format::Csv => {
            let mut s = String::from("suite,case,verdict,params\n");
            for suite in &report.suites {
                for (i, c) in suite.cases.iter().enumerate() {
                    let v = match c.verdict {
                        Verdict::Pass => "pass",
                        Verdict::Fail => "fail",
                    };
                    let _ = writeln!(s, "{},{i},{v},{}", suite.name, quote(&c.params.to_string()));
                }
            }
            s
        }
    };
    Ok((text, report.passed))
}

//! Command-line front end.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::construct::{
    build_perm_poly, check_criterion, count_valid_n, family_poly, is_permutation_bruteforce_with,
    FamilyKind, FamilyMember, PermSpec, SqrtCase, Variant,
};
use crate::field::{FieldCtx, DEFAULT_SIZE_BOUND};
use crate::inverse::{inverse_cyclotomic_with, route_table, table_digest, Route};
use crate::par::Exec;
use crate::poly::{render_terms, PolyRing};
use crate::record::{
    CountRow, FamilyRecord, FieldRecord, PolyRecord, Record, RouteReport, SpecRecord, VerdictRecord,
};
use crate::selftest::{self, Fault, Level};

#[derive(Parser, Debug)]
#[command(
    name = "redei-perm",
    version,
    about = "Permutation polynomials of F_{q^2} from Rédei functions"
)]
pub struct Cli {
    #[command(flatten)]
    pub config: RunConfig,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct RunConfig {
    /// Largest field size q^2 that will be built and enumerated.
    #[arg(long, global = true, env = "REDEI_PERM_SIZE_BOUND", default_value_t = DEFAULT_SIZE_BOUND)]
    pub size_bound: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write to this file instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Seed for sampled checks.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Run everything on the calling thread.
    #[arg(long, global = true)]
    pub sequential: bool,
}

impl RunConfig {
    fn exec(&self) -> Exec {
        if self.sequential {
            Exec::Sequential
        } else {
            Exec::Parallel
        }
    }

    fn field(&self, p: u64, k: u32) -> Result<FieldCtx, CliError> {
        if self.size_bound == 0 {
            return Err(CliError::Input("size bound must be positive".into()));
        }
        FieldCtx::with_bound(p, k, self.size_bound).map_err(|e| CliError::Input(e.to_string()))
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum RouteArg {
    Cyclotomic,
    Closed,
    Table,
    All,
}

#[derive(Args, Debug, Clone)]
pub struct SpecArgs {
    #[arg(long)]
    pub p: u64,
    #[arg(long, default_value_t = 1)]
    pub k: u32,
    #[arg(long, default_value = "H")]
    pub variant: Variant,
    #[arg(long)]
    pub n: u64,
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    pub m: i64,
    /// α = γ^{l(q-1)}.
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    pub l: i64,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build P(x) and decide whether it permutes F_{q^2}.
    Construct {
        #[command(flatten)]
        spec: SpecArgs,
        /// Skip the exhaustive confirmation.
        #[arg(long)]
        no_oracle: bool,
    },
    /// Compute the compositional inverse of P.
    Invert {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, value_enum, default_value_t = RouteArg::All)]
        route: RouteArg,
    },
    /// Count n in [1, q-1] with gcd(n(n+2m), q-1) = 1 for q = p^k.
    Count {
        #[arg(long, default_value_t = 3)]
        p: u64,
        #[arg(long, default_value_t = 2)]
        k: u32,
        /// Last exponent of the range k..=k_max.
        #[arg(long)]
        k_max: Option<u32>,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        m: i64,
    },
    /// One binomial or trinomial family member.
    Family {
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 1)]
        k: u32,
        #[arg(long)]
        family: FamilyKind,
        #[arg(long, default_value = "P1")]
        member: FamilyMember,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        m: i64,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        l: i64,
    },
    /// Run the built-in invariant suites.
    Selftest {
        #[arg(long, value_enum, default_value_t = LevelArg::Quick)]
        level: LevelArg,
        /// Corrupt a component on purpose (for checking the suites).
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum LevelArg {
    Quick,
    Full,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Refused(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

/// What a command produced: rendered output and whether its claim held.
pub struct Outcome {
    pub body: String,
    pub verified: bool,
}

fn emit<T: Serialize>(format: Format, value: &T, text: impl FnOnce() -> String) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(value).expect("records serialize");
            s.push('\n');
            s
        }
        Format::Text => text(),
    }
}

fn build_spec(ctx: &FieldCtx, a: &SpecArgs) -> Result<PermSpec, CliError> {
    PermSpec::from_l(ctx, a.variant, a.n, a.m, a.l).map_err(|e| CliError::Input(e.to_string()))
}

fn field_line(ctx: &FieldCtx) -> String {
    format!(
        "field: F_{{{}^{}}} (q = {}), modulus {:?}, gamma {:?}",
        ctx.p(),
        2 * ctx.k(),
        ctx.q(),
        ctx.modulus(),
        ctx.coeffs(ctx.gamma())
    )
}

fn spec_line(ctx: &FieldCtx, a: &SpecArgs) -> String {
    format!(
        "spec: P(x) = x^(n+m(q+1))·{}_n(x^(q-1), α), n = {}, m = {}, l = {}, α = {}",
        match a.variant {
            Variant::H => "H",
            Variant::G => "G",
        },
        a.n,
        a.m,
        a.l,
        ctx.render(ctx.alpha_from_l(a.l))
    )
}

fn construct_record(
    ctx: &FieldCtx,
    a: &SpecArgs,
    exec: Exec,
    oracle: bool,
) -> Result<Record, CliError> {
    let spec = build_spec(ctx, a)?;
    let built = build_perm_poly(ctx, &spec).map_err(|e| CliError::Input(e.to_string()))?;
    let verdict = check_criterion(ctx, &spec).map_err(|e| CliError::Input(e.to_string()))?;
    let oracle =
        oracle.then(|| is_permutation_bruteforce_with(ctx, exec, |x| spec.eval(ctx, x)).is_perm);
    Ok(Record {
        field: FieldRecord::new(ctx),
        spec: SpecRecord::new(ctx, &spec, a.l),
        poly: PolyRecord::new(ctx, &built.reduced),
        raw: built
            .raw_terms
            .iter()
            .map(|&(e, c)| (e, ctx.coeffs(c)))
            .collect(),
        verdict: VerdictRecord { verdict, oracle },
        inverse: None,
        report: None,
    })
}

fn verdict_text(ctx: &FieldCtx, rec: &Record, out: &mut String) {
    let raw = rec
        .raw
        .iter()
        .map(|(e, c)| (*e, ctx.from_coeffs(c).expect("own record")));
    let _ = writeln!(out, "P(x) = {}", render_terms(ctx, raw));
    let _ = writeln!(out, "P(x) ≡ {}  (mod x^{} - x)", rec.poly.text, ctx.q2());
    let v = &rec.verdict.verdict;
    let _ = writeln!(
        out,
        "case: √α {} μ_{{q+1}}",
        if v.case == SqrtCase::SqrtInMu {
            "in"
        } else {
            "not in"
        }
    );
    for c in &v.conditions {
        let _ = writeln!(
            out,
            "  {} = {}  {}",
            c.name,
            c.gcd,
            if c.pass { "ok" } else { "fails" }
        );
    }
    let _ = writeln!(
        out,
        "verdict: {}",
        if v.is_perm {
            "permutation"
        } else {
            "not a permutation"
        }
    );
    match rec.verdict.oracle {
        Some(o) if o == v.is_perm => {
            let _ = writeln!(out, "oracle: confirmed over all {} elements", ctx.q2());
        }
        Some(_) => {
            let _ = writeln!(out, "oracle: DISAGREES");
        }
        None => {
            let _ = writeln!(out, "oracle: skipped");
        }
    }
}

fn cmd_construct(cfg: &RunConfig, a: &SpecArgs, no_oracle: bool) -> Result<Outcome, CliError> {
    let ctx = cfg.field(a.p, a.k)?;
    let rec = construct_record(&ctx, a, cfg.exec(), !no_oracle)?;
    let verified = rec
        .verdict
        .oracle
        .is_none_or(|o| o == rec.verdict.verdict.is_perm);
    let body = emit(cfg.format, &rec, || {
        let mut s = format!("{}\n{}\n", field_line(&ctx), spec_line(&ctx, a));
        verdict_text(&ctx, &rec, &mut s);
        s
    });
    Ok(Outcome { body, verified })
}

fn cmd_invert(cfg: &RunConfig, a: &SpecArgs, route: RouteArg) -> Result<Outcome, CliError> {
    let ctx = cfg.field(a.p, a.k)?;
    let exec = cfg.exec();
    let spec = build_spec(&ctx, a)?;
    let mut rec = construct_record(&ctx, a, exec, true)?;
    let routes: Vec<Route> = match route {
        RouteArg::Cyclotomic => vec![Route::Cyclotomic],
        RouteArg::Closed => vec![Route::Closed],
        RouteArg::Table => vec![Route::Table],
        RouteArg::All => Route::ALL.to_vec(),
    };
    let mut tables = BTreeMap::new();
    for r in &routes {
        let table = route_table(&ctx, &spec, *r, exec)
            .map_err(|e| CliError::Refused(format!("{} route: {e}", r.name())))?;
        tables.insert(r.name().to_string(), table);
    }
    let first = tables.values().next().expect("at least one route");
    let agree = tables.values().all(|t| t == first);
    let inverts = ctx
        .elements()
        .all(|x| first[spec.eval(&ctx, x).index()] == x);
    if routes.contains(&Route::Cyclotomic) {
        let inv = inverse_cyclotomic_with(&ctx, &spec, exec)
            .map_err(|e| CliError::Refused(e.to_string()))?;
        rec.inverse = Some(PolyRecord::new(&ctx, &inv));
    }
    rec.report = Some(RouteReport {
        spec: rec.spec.clone(),
        routes: tables
            .iter()
            .map(|(k, v)| (k.clone(), table_digest(v)))
            .collect(),
        agree,
    });
    let body = emit(cfg.format, &rec, || {
        let mut s = format!("{}\n{}\n", field_line(&ctx), spec_line(&ctx, a));
        verdict_text(&ctx, &rec, &mut s);
        if let Some(inv) = &rec.inverse {
            let _ = writeln!(s, "P^-1(x) ≡ {}", inv.text);
        }
        let report = rec.report.as_ref().expect("set above");
        for (name, digest) in &report.routes {
            let _ = writeln!(s, "  {name:<10} sha256 {digest}");
        }
        let n = tables.len();
        let _ = match (n, agree && inverts) {
            (1, true) => writeln!(
                s,
                "inverse verified: P^-1(P(x)) = x on all {} elements",
                ctx.q2()
            ),
            (_, true) => writeln!(
                s,
                "{n} routes agree; P^-1(P(x)) = x on all {} elements",
                ctx.q2()
            ),
            _ => writeln!(s, "routes DISAGREE or fail to invert P"),
        };
        s
    });
    Ok(Outcome {
        body,
        verified: agree && inverts,
    })
}

fn cmd_count(
    cfg: &RunConfig,
    p: u64,
    k: u32,
    k_max: Option<u32>,
    m: i64,
) -> Result<Outcome, CliError> {
    if p == 2 || !crate::intmath::is_prime(p) {
        return Err(CliError::Input(format!("p = {p} is not an odd prime")));
    }
    let k_max = k_max.unwrap_or(k);
    if k == 0 || k_max < k {
        return Err(CliError::Input("need 1 <= k <= k-max".into()));
    }
    let mut rows = Vec::new();
    for e in k..=k_max {
        let q = p
            .checked_pow(e)
            .filter(|&q| q <= 1 << 32)
            .ok_or_else(|| CliError::Input(format!("{p}^{e} is too large to sweep")))?;
        let valid = count_valid_n(q, m, q - 1);
        rows.push(CountRow {
            q,
            m,
            valid,
            total: q - 1,
            ratio: valid as f64 / (q - 1) as f64,
        });
    }
    let body = emit(cfg.format, &rows, || {
        let mut s = String::from("q\tm\tvalid/total\tratio\n");
        for r in &rows {
            let _ = writeln!(
                s,
                "{}\t{}\t{}/{}\t{:.4}",
                r.q, r.m, r.valid, r.total, r.ratio
            );
        }
        s
    });
    Ok(Outcome {
        body,
        verified: true,
    })
}

#[allow(clippy::too_many_arguments)]
fn cmd_family(
    cfg: &RunConfig,
    p: u64,
    k: u32,
    family: FamilyKind,
    member: FamilyMember,
    m: i64,
    l: i64,
) -> Result<Outcome, CliError> {
    let ctx = cfg.field(p, k)?;
    let poly =
        family_poly(&ctx, family, member, m, l).map_err(|e| CliError::Input(e.to_string()))?;
    let ring = PolyRing::new(&ctx);
    let oracle = is_permutation_bruteforce_with(&ctx, cfg.exec(), |x| ring.eval(&poly, x)).is_perm;
    let spec = PermSpec::from_l(&ctx, member.variant(), family.n(), m, l)
        .map_err(|e| CliError::Input(e.to_string()))?;
    let claim = check_criterion(&ctx, &spec)
        .map_err(|e| CliError::Input(e.to_string()))?
        .is_perm;
    let rec = FamilyRecord {
        field: FieldRecord::new(&ctx),
        family,
        member,
        m,
        l,
        poly: PolyRecord::new(&ctx, &poly),
        is_perm: oracle,
    };
    let body = emit(cfg.format, &rec, || {
        format!(
            "{}\n{member:?}(x) ≡ {}\n{}\n",
            field_line(&ctx),
            rec.poly.text,
            if oracle {
                "permutation"
            } else {
                "not a permutation"
            }
        )
    });
    Ok(Outcome {
        body,
        verified: claim == oracle,
    })
}

fn cmd_selftest(cfg: &RunConfig, level: LevelArg, inject: bool) -> Result<Outcome, CliError> {
    let level = match level {
        LevelArg::Quick => Level::Quick,
        LevelArg::Full => Level::Full,
    };
    let fault = if inject { Fault::GhCoeffs } else { Fault::None };
    let results = selftest::run(level, fault, cfg.exec(), cfg.seed);
    let verified = results.iter().all(|c| c.passed());
    let body = emit(cfg.format, &results, || {
        let mut s = String::new();
        for c in &results {
            match &c.failure {
                None => writeln!(s, "pass  {} ({} cases)", c.name, c.cases),
                Some(why) => writeln!(s, "FAIL  {}: {why}", c.name),
            }
            .expect("string write");
        }
        let failed = results.iter().filter(|c| !c.passed()).count();
        let _ = writeln!(
            s,
            "{} of {} checks passed",
            results.len() - failed,
            results.len()
        );
        s
    });
    Ok(Outcome { body, verified })
}

pub fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    let cfg = &cli.config;
    match &cli.command {
        Command::Construct { spec, no_oracle } => cmd_construct(cfg, spec, *no_oracle),
        Command::Invert { spec, route } => cmd_invert(cfg, spec, *route),
        Command::Count { p, k, k_max, m } => cmd_count(cfg, *p, *k, *k_max, *m),
        Command::Family {
            p,
            k,
            family,
            member,
            m,
            l,
        } => cmd_family(cfg, *p, *k, *family, *member, *m, *l),
        Command::Selftest {
            level,
            inject_fault,
        } => cmd_selftest(cfg, *level, *inject_fault),
    }
}

/// Runs a parsed command line and returns the process exit status:
/// 0 when the claim was verified, 1 when it was not, 2 on bad input or a
/// refused computation.
pub fn run(cli: &Cli) -> i32 {
    match execute(cli) {
        Ok(outcome) => {
            let written = match &cli.config.output {
                Some(path) => std::fs::write(path, &outcome.body),
                None => {
                    print!("{}", outcome.body);
                    Ok(())
                }
            };
            if let Err(e) = written {
                eprintln!("error: {e}");
                return 2;
            }
            if outcome.verified {
                0
            } else {
                1
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

//! Command-line front end: *-cleanness analyses, primitive idempotent
//! listings, abelian-code classification, involution surveys, and batch
//! scans, with deterministic text and JSON reports.
//!
//! Exit codes: 0 on success, 2 on invalid input or a refused bound, 3 on an
//! internal consistency failure (a criterion-oracle discrepancy or a broken
//! structural identity).

use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use starclean_core::algebra::Involution;
use starclean_core::codes;
use starclean_core::error::Error;
use starclean_core::gf::FieldCtx;
use starclean_core::group::{abelian_groups_of_order, AbelianGroup, SylowSplit};
use starclean_core::idem::{self, PrimitiveIdempotentReport};
use starclean_core::numtheory::{gcd, prime_power_split};
use starclean_core::starclean::{
    analyze, involution_exponents, only_sigma1_involutions, OnlySigma1Report, StarCleanReport,
};

const SCHEMA: &str = "starclean/1";
const HARD_MAX_SUBSETS: u64 = 1 << 20;
const HARD_MAX_FIELD: u64 = 1 << 24;

#[derive(Parser)]
#[command(
    name = "starclean",
    version,
    about = "Decide *-cleanness of finite abelian group algebras and classify their abelian codes"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    /// One JSON object per row; scan only.
    Jsonl,
}

#[derive(Args)]
struct FieldGroupArgs {
    /// Coefficient field size q (a prime power)
    #[arg(long)]
    field: u64,
    /// Group spec, e.g. C3xC9
    #[arg(long)]
    group: String,
    /// Output format
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Subcommand)]
enum Cmd {
    /// Decide whether F_q G is *-clean under an involution
    Analyze {
        #[command(flatten)]
        common: FieldGroupArgs,
        /// classical | sigma1:v=<int> | sigma2:v=<int>
        #[arg(long)]
        involution: String,
        /// Skip the primitive-idempotent projection oracle
        #[arg(long)]
        no_oracle: bool,
        /// Re-verify the oracle on all subset sums (bounded)
        #[arg(long)]
        paranoid: bool,
    },
    /// List the primitive idempotents of F_q G
    Idempotents {
        #[command(flatten)]
        common: FieldGroupArgs,
        /// Also count the full idempotent set 2^s by enumeration
        #[arg(long)]
        enumerate: bool,
    },
    /// Classify every class code of F_q G as LCD or self-orthogonal
    Codes {
        #[command(flatten)]
        common: FieldGroupArgs,
        /// Compute exhaustive minimum distances where feasible
        #[arg(long)]
        distance: bool,
    },
    /// Survey the valid involutions of F_q G
    Involutions {
        #[command(flatten)]
        common: FieldGroupArgs,
    },
    /// Analyze every abelian group of order up to a bound (orders coprime to
    /// the characteristic)
    Scan {
        /// Coefficient field size q (a prime power)
        #[arg(long)]
        field: u64,
        /// Largest group order to scan
        #[arg(long)]
        max_order: u64,
        /// classical | sigma1:v=<int> | sigma2:v=<int>
        #[arg(long)]
        involution: String,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        #[arg(long)]
        no_oracle: bool,
        #[arg(long)]
        paranoid: bool,
    },
}

/// Top-level JSON wrapper carrying the schema version.
#[derive(Serialize, Deserialize)]
struct Envelope<T> {
    schema: String,
    #[serde(flatten)]
    payload: T,
}

fn envelope<T: Serialize>(payload: T) -> String {
    let e = Envelope {
        schema: SCHEMA.into(),
        payload,
    };
    let mut s = serde_json::to_string_pretty(&e).expect("reports serialize");
    s.push('\n');
    s
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Failure {
        Failure {
            code: 2,
            message: message.into(),
        }
    }

    fn internal(message: impl Into<String>) -> Failure {
        Failure {
            code: 3,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        match e {
            Error::Internal(_) => Failure::internal(e.to_string()),
            _ => Failure::usage(e.to_string()),
        }
    }
}

struct Bounds {
    max_subsets: u64,
    max_field: u64,
}

fn env_cap(name: &str, hard: u64) -> Result<u64, Failure> {
    match std::env::var(name) {
        Err(_) => Ok(hard),
        Ok(s) => {
            let v: u64 = s
                .parse()
                .map_err(|_| Failure::usage(format!("{name} must be a positive integer")))?;
            if v == 0 || v > hard {
                return Err(Failure::usage(format!(
                    "{name} must be in 1..={hard}, got {v}"
                )));
            }
            Ok(v)
        }
    }
}

impl Bounds {
    fn from_env() -> Result<Bounds, Failure> {
        Ok(Bounds {
            max_subsets: env_cap("STARCLEAN_MAX_SUBSETS", HARD_MAX_SUBSETS)?,
            max_field: env_cap("STARCLEAN_MAX_FIELD", HARD_MAX_FIELD)?,
        })
    }
}

fn parse_field(q: u64, bounds: &Bounds) -> Result<Arc<FieldCtx>, Failure> {
    if q > bounds.max_field {
        return Err(Failure::usage(format!(
            "field size {q} exceeds the cap {}",
            bounds.max_field
        )));
    }
    let (p, k) = prime_power_split(q)?;
    Ok(FieldCtx::build(p, k, 1)?)
}

fn parse_involution(spec: &str) -> Result<Involution, Failure> {
    let s = spec.trim().to_ascii_lowercase();
    if s == "classical" {
        return Ok(Involution::classical());
    }
    if s == "identity" {
        return Err(Failure::usage(
            "the identity map (sigma1 with v = 1) is not accepted for *-cleanness analysis; \
             use `involutions` to survey the valid parameters",
        ));
    }
    let (kind, rest) = s
        .split_once(':')
        .ok_or_else(|| bad_involution_spec(spec))?;
    let v: i64 = rest
        .strip_prefix("v=")
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| bad_involution_spec(spec))?;
    match kind {
        "sigma1" => Ok(Involution::sigma1(v)),
        "sigma2" => Ok(Involution::sigma2(v)),
        _ => Err(bad_involution_spec(spec)),
    }
}

fn bad_involution_spec(spec: &str) -> Failure {
    Failure::usage(format!(
        "bad involution spec {spec:?}: expected classical | identity | sigma1:v=<int> | \
         sigma2:v=<int>"
    ))
}

fn main() -> ExitCode {
    // behave like a standard unix filter when the reader closes the pipe
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let bounds = Bounds::from_env()?;
    match cli.cmd {
        Cmd::Analyze {
            common,
            involution,
            no_oracle,
            paranoid,
        } => cmd_analyze(&common, &involution, !no_oracle, paranoid, &bounds),
        Cmd::Idempotents { common, enumerate } => cmd_idempotents(&common, enumerate, &bounds),
        Cmd::Codes { common, distance } => cmd_codes(&common, distance, &bounds),
        Cmd::Involutions { common } => cmd_involutions(&common, &bounds),
        Cmd::Scan {
            field,
            max_order,
            involution,
            format,
            no_oracle,
            paranoid,
        } => cmd_scan(
            field, max_order, &involution, format, !no_oracle, paranoid, &bounds,
        ),
    }
}

// ---------------------------------------------------------------------------
// analyze
// ---------------------------------------------------------------------------

fn render_analyze_text(r: &StarCleanReport) -> String {
    let mut out = String::new();
    out.push_str(&format!("group:      {}\n", r.group));
    out.push_str(&format!("field:      {}\n", r.field));
    out.push_str(&format!(
        "involution: {} (v = {})\n",
        r.involution.kind, r.involution.v
    ));
    out.push_str(&format!("m:          {}\n", r.m));
    out.push_str(&format!(
        "verdict:    {}\n",
        if r.verdict { "*-clean" } else { "not *-clean" }
    ));
    match r.witness_t {
        Some(t) => out.push_str(&format!("witness t:  {t}\n")),
        None => out.push_str("witness t:  none (searched the full power cycle)\n"),
    }
    let method = match (r.oracle_checked, r.discrepancy) {
        (false, _) => "criterion".to_string(),
        (true, false) => "criterion + oracle (agreed)".to_string(),
        (true, true) => "criterion + oracle (DISAGREED)".to_string(),
    };
    out.push_str(&format!("method:     {method}\n"));
    if r.degenerate {
        out.push_str("note:       the involution degenerates to the identity map here\n");
    }
    out
}

fn cmd_analyze(
    common: &FieldGroupArgs,
    involution: &str,
    oracle: bool,
    paranoid: bool,
    bounds: &Bounds,
) -> Result<(), Failure> {
    let field = parse_field(common.field, bounds)?;
    let group = AbelianGroup::parse(&common.group)?;
    let iota = parse_involution(involution)?;
    let report = analyze(&field, &group, &iota, oracle, paranoid, bounds.max_subsets)?;
    match common.format {
        Format::Json => print!("{}", envelope(&report)),
        _ => print!("{}", render_analyze_text(&report)),
    }
    if report.discrepancy {
        return Err(Failure::internal(format!(
            "criterion and oracle disagree for {} over {}",
            report.group, report.field
        )));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// idempotents
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct IdempotentsOut {
    group: String,
    field: String,
    coprime_part: String,
    primitives: Vec<PrimitiveIdempotentReport>,
    /// |full idempotent set| = 2^s, when enumeration was requested.
    #[serde(skip_serializing_if = "Option::is_none")]
    total_idempotents: Option<u64>,
}

fn cmd_idempotents(
    common: &FieldGroupArgs,
    enumerate: bool,
    bounds: &Bounds,
) -> Result<(), Failure> {
    let field = parse_field(common.field, bounds)?;
    let group = AbelianGroup::parse(&common.group)?;
    let split = SylowSplit::new(&group, field.p())?;
    let h = split.coprime.clone();
    let prims = idem::primitive_idempotents(&h, &field)?;
    let total = if enumerate {
        let mut count = 0u64;
        for e in idem::all_idempotents(&prims, &h, &field, bounds.max_subsets)? {
            debug_assert!(starclean_core::algebra::is_idempotent(&e));
            count += 1;
        }
        Some(count)
    } else {
        None
    };

    match common.format {
        Format::Json => {
            let out = IdempotentsOut {
                group: group.to_string(),
                field: format!("GF({})", common.field),
                coprime_part: h.to_string(),
                primitives: prims.iter().map(|p| p.report()).collect(),
                total_idempotents: total,
            };
            print!("{}", envelope(&out));
        }
        _ => {
            println!("group:        {group}");
            println!("field:        GF({})", common.field);
            println!("coprime part: {h}");
            println!("primitive idempotents: {}", prims.len());
            for p in &prims {
                println!(
                    "  class {:?}  orbit {}  e = {}",
                    p.class.rep.exponents(),
                    p.class.size(),
                    p.element
                );
            }
            if let Some(total) = total {
                println!("idempotents:  2^{} = {}", prims.len(), total);
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// codes
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct CodeRow {
    #[serde(flatten)]
    classification: codes::Classification,
    #[serde(skip_serializing_if = "Option::is_none")]
    min_distance: Option<u64>,
}

#[derive(Serialize, Deserialize)]
struct CodesOut {
    group: String,
    field: String,
    classes: Vec<CodeRow>,
    theorem: codes::Theorem43Report,
}

fn cmd_codes(common: &FieldGroupArgs, distance: bool, bounds: &Bounds) -> Result<(), Failure> {
    let field = parse_field(common.field, bounds)?;
    let group = AbelianGroup::parse(&common.group)?;
    if group.order() % field.p() == 0 {
        return Err(Failure::usage(format!(
            "codes need a semisimple algebra: gcd({}, {}) != 1",
            common.field,
            group.order()
        )));
    }
    let prims = idem::primitive_idempotents(&group, &field)?;
    let mut rows = Vec::new();
    for prim in &prims {
        let classification = codes::classify_code(prim)?;
        let min_distance = if distance {
            codes::min_distance(&codes::code_from_class(prim)?, 1 << 16)
        } else {
            None
        };
        rows.push(CodeRow {
            classification,
            min_distance,
        });
    }
    let theorem = codes::theorem43_report(&field, &group)?;

    match common.format {
        Format::Json => {
            let out = CodesOut {
                group: group.to_string(),
                field: format!("GF({})", common.field),
                classes: rows,
                theorem,
            };
            print!("{}", envelope(&out));
        }
        _ => {
            println!("group: {group}   field: GF({})", common.field);
            println!(
                "{:<14} {:>5} {:>4}  {:<16} {:<10} {}",
                "class", "order", "dim", "kind", "witness", "distance"
            );
            for row in &rows {
                let c = &row.classification;
                println!(
                    "{:<14} {:>5} {:>4}  {:<16} {:<10} {}",
                    format!("{:?}", c.class_rep),
                    c.char_order,
                    c.dimension,
                    match c.kind {
                        codes::CodeKind::Lcd => "LCD",
                        codes::CodeKind::SelfOrthogonal => "self-orthogonal",
                    },
                    c.witness_t
                        .map(|t| format!("t={t}"))
                        .unwrap_or_else(|| "none".into()),
                    row.min_distance
                        .map(|d| d.to_string())
                        .unwrap_or_else(|| "-".into()),
                );
            }
            println!(
                "theorem: all-LCD={} no-SO={} full-order-LCD={} full-order-not-SO={} => \
                 star-clean: {}{}",
                theorem.all_lcd,
                theorem.none_self_orthogonal,
                theorem.exists_full_order_lcd,
                theorem.exists_full_order_not_self_orthogonal,
                theorem.star_clean,
                if theorem.degenerate {
                    " (degenerate exponent 1)"
                } else {
                    ""
                }
            );
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// involutions
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct InvolutionsOut {
    group: String,
    field: String,
    exponent: u64,
    /// v with v^2 = 1 (mod n), v != 1: the sigma1 parameters.
    sigma1_v: Vec<u64>,
    /// v with v^2 = 1 (mod n): the sigma2 parameters (square fields only).
    #[serde(skip_serializing_if = "Option::is_none")]
    sigma2_v: Option<Vec<u64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    only_sigma1: Option<OnlySigma1Report>,
    #[serde(skip_serializing_if = "Option::is_none")]
    note: Option<String>,
}

fn cmd_involutions(common: &FieldGroupArgs, bounds: &Bounds) -> Result<(), Failure> {
    let field = parse_field(common.field, bounds)?;
    let group = AbelianGroup::parse(&common.group)?;
    let n = group.exponent();
    let all_v = involution_exponents(n);
    let sigma1_v: Vec<u64> = all_v.iter().copied().filter(|&v| v != 1 % n.max(1)).collect();
    let sigma2_v = (field.degree() % 2 == 0).then(|| all_v.clone());
    let (only_sigma1, note) = if group.order() % 2 == 1 && gcd(common.field, group.order()) == 1 {
        (
            Some(only_sigma1_involutions(common.field, &group)?),
            None,
        )
    } else {
        (
            None,
            Some(
                "the sigma1-only classification applies to odd-order groups in the semisimple \
                 case"
                    .to_string(),
            ),
        )
    };
    let out = InvolutionsOut {
        group: group.to_string(),
        field: format!("GF({})", common.field),
        exponent: n,
        sigma1_v,
        sigma2_v,
        only_sigma1,
        note,
    };
    match common.format {
        Format::Json => print!("{}", envelope(&out)),
        _ => {
            println!("group:    {}", out.group);
            println!("field:    {}", out.field);
            println!("exponent: {}", out.exponent);
            println!("sigma1 v: {:?}", out.sigma1_v);
            match &out.sigma2_v {
                Some(vs) => println!("sigma2 v: {vs:?}"),
                None => println!("sigma2:   not available (field is not a square)"),
            }
            match &out.only_sigma1 {
                Some(r) => println!(
                    "only sigma1 involutions: {} ({})",
                    if r.verdict { "yes" } else { "no" },
                    r.reason
                ),
                None => println!("only sigma1 involutions: n/a ({})", out.note.as_ref().unwrap()),
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// scan
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct ScanOut {
    field: String,
    involution: String,
    max_order: u64,
    rows: Vec<StarCleanReport>,
}

fn cmd_scan(
    field_q: u64,
    max_order: u64,
    involution: &str,
    format: Format,
    oracle: bool,
    paranoid: bool,
    bounds: &Bounds,
) -> Result<(), Failure> {
    let field = parse_field(field_q, bounds)?;
    let iota = parse_involution(involution)?;
    if max_order == 0 || max_order > starclean_core::group::MAX_GROUP_ORDER {
        return Err(Failure::usage(format!(
            "max order must be in 1..={}",
            starclean_core::group::MAX_GROUP_ORDER
        )));
    }
    let mut rows = Vec::new();
    for order in 1..=max_order {
        if gcd(order, field.p()) != 1 {
            continue;
        }
        for group in abelian_groups_of_order(order)? {
            // groups where the involution parameters are invalid (sigma1 with
            // no admissible v) are skipped rather than failing the whole scan
            match analyze(&field, &group, &iota, oracle, paranoid, bounds.max_subsets) {
                Ok(report) => rows.push(report),
                Err(Error::BadInvolution(_)) => continue,
                Err(e) => return Err(e.into()),
            }
        }
    }
    let discrepancy = rows.iter().any(|r| r.discrepancy);
    match format {
        Format::Json => {
            let out = ScanOut {
                field: format!("GF({field_q})"),
                involution: involution.into(),
                max_order,
                rows,
            };
            print!("{}", envelope(&out));
        }
        Format::Jsonl => {
            for row in &rows {
                let mut line = serde_json::to_string(&Envelope {
                    schema: SCHEMA.to_string(),
                    payload: row,
                })
                .expect("rows serialize");
                line.push('\n');
                print!("{line}");
            }
        }
        Format::Text => {
            println!(
                "{:<16} {:>6} {:>6}  {:<12} {:<8} {}",
                "group", "order", "m", "verdict", "t", "oracle"
            );
            for r in &rows {
                let g = AbelianGroup::parse(&r.group).expect("round-trip group spec");
                println!(
                    "{:<16} {:>6} {:>6}  {:<12} {:<8} {}",
                    r.group,
                    g.order(),
                    r.m,
                    if r.verdict { "*-clean" } else { "not *-clean" },
                    r.witness_t
                        .map(|t| t.to_string())
                        .unwrap_or_else(|| "-".into()),
                    match (r.oracle_checked, r.discrepancy) {
                        (false, _) => "off",
                        (true, false) => "agreed",
                        (true, true) => "DISAGREED",
                    }
                );
            }
        }
    }
    if discrepancy {
        return Err(Failure::internal("criterion-oracle discrepancy in scan"));
    }
    Ok(())
}

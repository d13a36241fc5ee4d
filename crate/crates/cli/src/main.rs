//! `ringext`: JSON reports on ideal lattices, orthogonality matrices, the Extension
//! Property criterion, counterexamples and the exhaustive oracle.

mod render;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ringext::ideal::{all_ideals, IdealLattice, Side, DEFAULT_MAX_IDEALS};
use ringext::oracle::{
    build_counterexample, is_extendable, null_vector_integer, oracle_extension_property, OracleConfig, OracleError,
    DEFAULT_EXTENSION_BUDGET, DEFAULT_ORACLE_BUDGET,
};
use ringext::orthogonality::{MatrixKind, OrthogonalityContext, ORDERING};
use ringext::rational::{format_rational, parse_rational};
use ringext::ring::{build_ring, FiniteRing, RingConfig, DEFAULT_MAX_ORDER};
use ringext::weight::{Weight, WeightSpec};
use serde_json::{json, Map, Value};
use std::path::Path;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

const MAX_ORDER_ENV: &str = "RINGEXT_MAX_ORDER";

#[derive(Parser)]
#[command(name = "ringext", version, about = "Extension Property analysis for weights on finite rings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Exit 1 when the weight fails the criterion or the oracle finds a failure.
    #[arg(long, global = true)]
    strict: bool,
    /// Ring order cap; overrides RINGEXT_MAX_ORDER.
    #[arg(long, global = true)]
    max_order: Option<usize>,
    /// Search budget for extension and oracle enumeration.
    #[arg(long, global = true)]
    search_budget: Option<u64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum SideArg {
    Left,
    Right,
}

#[derive(Args)]
struct RingArg {
    /// Ring spec, e.g. "Z(4)", "Mat(2,GF(2))", "Table(path.json)".
    #[arg(long)]
    ring: String,
}

#[derive(Args)]
struct WeightArg {
    /// Weight JSON file, or one of hamming, lee, rank, homogeneous[:gamma].
    #[arg(long)]
    weight: String,
}

#[derive(Subcommand)]
enum Command {
    /// Classification, criterion, determinants and structure checks in one report.
    Analyze {
        #[command(flatten)]
        ring: RingArg,
        #[command(flatten)]
        weight: WeightArg,
        #[arg(long)]
        no_socle_reduction: bool,
        /// Include W0, W, Q, T and WQ in the report.
        #[arg(long)]
        matrices: bool,
    },
    /// Ideal lattice with covers and Möbius values from the zero ideal.
    Ideals {
        #[command(flatten)]
        ring: RingArg,
        #[arg(long, value_enum, default_value_t = SideArg::Right)]
        side: SideArg,
        /// All ideals rather than principal ones only.
        #[arg(long)]
        all: bool,
    },
    /// One orthogonality matrix.
    Matrix {
        #[command(flatten)]
        ring: RingArg,
        /// Required for W0, W and WQ.
        #[arg(long)]
        weight: Option<String>,
        #[arg(long, value_parser = parse_matrix_kind)]
        which: MatrixKind,
        /// Value of w at zero, as p/q.
        #[arg(long)]
        w0: Option<String>,
    },
    /// Criterion verdict with per-ideal factors.
    Criterion {
        #[command(flatten)]
        ring: RingArg,
        #[command(flatten)]
        weight: WeightArg,
        #[arg(long)]
        no_socle_reduction: bool,
    },
    /// Non-extendable isometry from a null vector of W0.
    Counterexample {
        #[command(flatten)]
        ring: RingArg,
        #[command(flatten)]
        weight: WeightArg,
    },
    /// Exhaustive search over linear codes of short length.
    Oracle {
        #[command(flatten)]
        ring: RingArg,
        #[command(flatten)]
        weight: WeightArg,
        #[arg(long, default_value_t = 2)]
        max_len: usize,
    },
    /// Ring axioms and, if given, weight bi-invariance.
    Validate {
        #[command(flatten)]
        ring: RingArg,
        #[arg(long)]
        weight: Option<String>,
    },
}

fn parse_matrix_kind(s: &str) -> Result<MatrixKind, String> {
    s.parse()
}

/// Input problem; exit code 2.
struct InputError(String);

impl<E: std::fmt::Display> From<E> for InputError {
    fn from(e: E) -> Self {
        InputError(e.to_string())
    }
}

type Outcome = Result<(Value, bool), InputError>;

struct Timer {
    stages: Map<String, Value>,
    last: Instant,
}

impl Timer {
    fn new() -> Self {
        Timer { stages: Map::new(), last: Instant::now() }
    }

    fn lap(&mut self, stage: &str) {
        let now = Instant::now();
        let ms = (now - self.last).as_secs_f64() * 1e3;
        self.stages.insert(stage.to_string(), json!((ms * 1000.0).round() / 1000.0));
        self.last = now;
    }
}

fn max_order(flag: Option<usize>) -> Result<usize, InputError> {
    if let Some(m) = flag {
        return Ok(m);
    }
    match std::env::var(MAX_ORDER_ENV) {
        Ok(v) => v.trim().parse().map_err(|_| InputError(format!("{MAX_ORDER_ENV}={v:?} is not a number"))),
        Err(_) => Ok(DEFAULT_MAX_ORDER),
    }
}

fn load_ring(spec: &str, cap: usize) -> Result<Arc<FiniteRing>, InputError> {
    build_ring(spec, &RingConfig { max_order: cap, base_dir: None }).map_err(|e| InputError(format!("--ring {spec:?}: {e}")))
}

fn load_weight(ring: &Arc<FiniteRing>, arg: &str) -> Result<Weight, InputError> {
    let path = Path::new(arg);
    let spec = if path.is_file() {
        let text = std::fs::read_to_string(path).map_err(|e| InputError(format!("--weight {arg:?}: {e}")))?;
        WeightSpec::from_json(&text).map_err(|e| InputError(format!("--weight {arg:?}: {e}")))?
    } else {
        WeightSpec::from_name(arg)
            .ok_or_else(|| InputError(format!("--weight {arg:?}: no such file and not a built-in weight name")))?
    };
    spec.build(ring).map_err(|e| InputError(format!("--weight {arg:?}: {e}")))
}

fn labels(ring: &FiniteRing, xs: &[u32]) -> Vec<String> {
    xs.iter().map(|&x| ring.label(x)).collect()
}

fn weight_meta(ring: &FiniteRing, w: &Weight) -> Value {
    let sym = w.symmetry();
    json!({
        "bi_invariant": true,
        "values": w.to_table(),
        "w0": format_rational(w.w0()),
        "positive": w.is_positive(),
        "g_lt": labels(ring, &sym.g_lt),
        "g_rt": labels(ring, &sym.g_rt),
    })
}

fn classification(ring: &FiniteRing, ctx: &OrthogonalityContext) -> Value {
    json!({
        "spec": ring.spec(),
        "order": ring.order(),
        "units": ring.units().len(),
        "commutative": ring.is_commutative(),
        "classification": ctx.classification(),
    })
}

fn lattice_json(ring: &FiniteRing, lattice: &IdealLattice) -> Value {
    let mu = lattice.mobius_row(lattice.zero_id());
    let ideals: Vec<Value> = lattice
        .ideals()
        .iter()
        .map(|i| {
            let gens = if i.is_principal() { i.generators() } else { i.additive_generators() };
            json!({
                "id": i.id(),
                "label": i.label(),
                "cardinality": i.size(),
                "principal": i.is_principal(),
                "generators": labels(ring, gens),
                "mu_from_zero": mu[i.id()],
            })
        })
        .collect();
    json!({ "ideals": ideals, "covers": lattice.covers(), "complete": lattice.is_complete() })
}

fn analyze(ring: &Arc<FiniteRing>, w: &Weight, socle: bool, matrices: bool, t: &mut Timer) -> Outcome {
    let ctx = OrthogonalityContext::new(ring)?;
    t.lap("lattices");
    let verdict = ctx.criterion(w, socle)?;
    t.lap("criterion");
    let mut report = Map::new();
    report.insert("ring".into(), classification(ring, &ctx));
    report.insert("weight".into(), weight_meta(ring, w));
    report.insert("criterion".into(), serde_json::to_value(&verdict)?);
    if ctx.classification().is_pir {
        let tri = ctx.triangularity(w)?;
        let poly = ctx.det_poly_in_w0(w)?;
        report.insert(
            "determinants".into(),
            json!({
                "det_w0": verdict.det_w0.as_ref().map(format_rational),
                "det_factorized": format_rational(&ctx.det_factorized(w)?),
                "det_w_in_w0": poly,
            }),
        );
        report.insert("diagonal_factors".into(), serde_json::to_value(ctx.diagonal_factors(w)?)?);
        report.insert("structure".into(), json!({ "tq_is_identity": ctx.tq_is_identity(), "triangularity": tri }));
        t.lap("determinants");
    }
    if matrices {
        let mut dumps = Map::new();
        for kind in [MatrixKind::W0, MatrixKind::W, MatrixKind::Q, MatrixKind::T, MatrixKind::WQ] {
            let m = match kind {
                MatrixKind::Q | MatrixKind::T => ctx.structure_matrix(kind),
                _ => ctx.build_matrix(w, kind)?,
            };
            dumps.insert(format!("{kind:?}"), serde_json::to_value(m)?);
        }
        report.insert("matrices".into(), Value::Object(dumps));
        t.lap("matrices");
    }
    let w0_singular = verdict.w0_invertible == Some(false);
    if ctx.classification().is_pir && w0_singular && w.w0() == &ringext::rational::zero() {
        let m = ctx.build_matrix(w, MatrixKind::W0)?;
        if let Some(v) = null_vector_integer(&m) {
            let pair = build_counterexample(&ctx, w, &v)?;
            report.insert("counterexample".into(), serde_json::to_value(pair)?);
        }
        t.lap("counterexample");
    }
    let ok = verdict.passes != Some(false);
    Ok((Value::Object(report), ok))
}

fn matrix(ring: &Arc<FiniteRing>, weight: Option<&str>, kind: MatrixKind, w0: Option<&str>, t: &mut Timer) -> Outcome {
    let ctx = OrthogonalityContext::new(ring)?;
    t.lap("lattices");
    let m = match kind {
        MatrixKind::Q | MatrixKind::T => ctx.structure_matrix(kind),
        _ => {
            let arg = weight.ok_or_else(|| InputError(format!("--which {kind:?} needs --weight")))?;
            let mut w = load_weight(ring, arg)?;
            if let Some(s) = w0 {
                let q = parse_rational(s).map_err(|e| InputError(format!("--w0 {s:?}: {e}")))?;
                w = w.with_w0(q);
            }
            ctx.build_matrix(&w, kind)?
        }
    };
    t.lap("matrix");
    let mut v = serde_json::to_value(&m)?;
    if let (Value::Object(map), Ok(d)) = (&mut v, m.det()) {
        map.insert("det".into(), json!(format_rational(&d)));
    }
    Ok((v, true))
}

fn counterexample(ring: &Arc<FiniteRing>, w: &Weight, budget: u64, t: &mut Timer) -> Outcome {
    let ctx = OrthogonalityContext::new(ring)?;
    t.lap("lattices");
    let m = ctx.build_matrix(w, MatrixKind::W0)?;
    let det = m.det()?;
    let mut transcript = vec![format!("det W0 = {}", format_rational(&det))];
    let Some(v) = null_vector_integer(&m) else {
        transcript.push("W0 invertible: no counterexample".into());
        return Ok((json!({ "ring": ring.spec(), "w0_invertible": true, "transcript": transcript }), true));
    };
    transcript.push(format!("null vector {v:?} over columns {:?}", m.cols));
    let pair = build_counterexample(&ctx, w, &v)?;
    transcript.push(format!("D(a) = 0 for all a: {}", pair.defect_zero));
    transcript.push(format!("coordinate right-orbit multisets differ: {}", pair.orbit_multisets_differ));
    let phi = pair.map(ring);
    let isometry = phi.is_isometry(w)?;
    transcript.push(format!("weight preserved on the code: {isometry}"));
    t.lap("construction");
    let ext = is_extendable(&phi, w, budget)?;
    transcript.push(format!("monomial maps searched: {}; extension found: {}", ext.maps_searched, ext.extendable));
    t.lap("extension_search");
    let report = json!({
        "ring": ring.spec(),
        "w0_invertible": false,
        "pair": pair,
        "isometry": isometry,
        "extension": ext,
        "transcript": transcript,
    });
    Ok((report, !ext.extendable && isometry))
}

fn oracle(ring: &Arc<FiniteRing>, w: &Weight, max_len: usize, budget: u64, t: &mut Timer) -> Outcome {
    let config = OracleConfig { n_max: max_len, budget, ..OracleConfig::default() };
    let report = match oracle_extension_property(ring, w, &config) {
        Ok(r) => r,
        Err(OracleError::BudgetExceeded { needed, budget, partial }) => {
            let partial = partial.map(|p| serde_json::to_value(*p)).transpose()?;
            return Err(InputError(format!(
                "search budget exceeded: needs {needed} checks, budget {budget}; partial report {}",
                partial.unwrap_or(Value::Null)
            )));
        }
        Err(e) => return Err(e.into()),
    };
    t.lap("oracle");
    let ep = report.extension_property;
    Ok((serde_json::to_value(report)?, ep))
}

fn validate(ring: &Arc<FiniteRing>, weight: Option<&str>, t: &mut Timer) -> Outcome {
    let axioms = ring.validate();
    let mut report = json!({
        "ring": ring.spec(),
        "order": ring.order(),
        "axioms_hold": axioms.is_valid(),
        "axioms": axioms.to_string(),
    });
    if let Some(arg) = weight {
        let w = load_weight(ring, arg)?;
        report["weight"] = weight_meta(ring, &w);
    }
    t.lap("validate");
    Ok((report, axioms.is_valid()))
}

fn run(cli: &Cli) -> Outcome {
    let cap = max_order(cli.max_order)?;
    let mut t = Timer::new();
    let ring_of = |r: &RingArg| load_ring(&r.ring, cap);
    let (mut report, ok) = match &cli.command {
        Command::Analyze { ring, weight, no_socle_reduction, matrices } => {
            let r = ring_of(ring)?;
            let w = load_weight(&r, &weight.weight)?;
            t.lap("load");
            analyze(&r, &w, !no_socle_reduction, *matrices, &mut t)?
        }
        Command::Ideals { ring, side, all } => {
            let r = ring_of(ring)?;
            t.lap("load");
            let side = match side {
                SideArg::Left => Side::Left,
                SideArg::Right => Side::Right,
            };
            let lattice = if *all { all_ideals(&r, side, DEFAULT_MAX_IDEALS)? } else { IdealLattice::principal(&r, side) };
            t.lap("lattice");
            let mut v = lattice_json(&r, &lattice);
            v["ring"] = json!(r.spec());
            v["side"] = json!(format!("{side:?}").to_lowercase());
            v["ordering"] = json!(ORDERING);
            (v, true)
        }
        Command::Matrix { ring, weight, which, w0 } => {
            let r = ring_of(ring)?;
            t.lap("load");
            matrix(&r, weight.as_deref(), *which, w0.as_deref(), &mut t)?
        }
        Command::Criterion { ring, weight, no_socle_reduction } => {
            let r = ring_of(ring)?;
            let w = load_weight(&r, &weight.weight)?;
            t.lap("load");
            let ctx = OrthogonalityContext::new(&r)?;
            let verdict = ctx.criterion(&w, !no_socle_reduction)?;
            t.lap("criterion");
            (serde_json::to_value(&verdict)?, verdict.passes != Some(false))
        }
        Command::Counterexample { ring, weight } => {
            let r = ring_of(ring)?;
            let w = load_weight(&r, &weight.weight)?;
            t.lap("load");
            counterexample(&r, &w, cli.search_budget.unwrap_or(DEFAULT_EXTENSION_BUDGET), &mut t)?
        }
        Command::Oracle { ring, weight, max_len } => {
            let r = ring_of(ring)?;
            let w = load_weight(&r, &weight.weight)?;
            t.lap("load");
            oracle(&r, &w, *max_len, cli.search_budget.unwrap_or(DEFAULT_ORACLE_BUDGET), &mut t)?
        }
        Command::Validate { ring, weight } => {
            let r = ring_of(ring)?;
            t.lap("load");
            validate(&r, weight.as_deref(), &mut t)?
        }
    };
    if let Value::Object(map) = &mut report {
        map.insert("timings_ms".into(), Value::Object(t.stages));
    }
    Ok((report, ok))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((report, ok)) => {
            match cli.format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&report).expect("report serializes")),
                Format::Text => print!("{}", render::text(&report)),
            }
            if cli.strict && !ok {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(InputError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

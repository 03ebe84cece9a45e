use std::fmt;
use std::path::Path;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use unitdist_core::arith::{format_rational, parse_rational};
use unitdist_core::construct::{
    build_pointset, conjugate_free_primes, pigeonhole_units, select_translate, theorem_parameters, SearchParams, WindowConfig,
};
use unitdist_core::gscalc::{self, TowerSpec};
use unitdist_core::numberfield::{detect_cm, preset, FieldElement, NumberField};
use unitdist_core::numberfield::FieldDescription;
use unitdist_core::unitdist::{
    count_exact_brute, count_exact_with, count_float, count_float_brute, erdos_grid, lattice_pairs, float_unit_pairs, r2_count, DistanceCensus,
};
use unitdist_core::{Error, ErrorFamily};

use crate::io;
use crate::{CountArgs, ExponentArgs, GenerateArgs, GridArgs, GsArgs, R2Args, SplitArgs};

/// Largest point set drawn as an SVG.
const SVG_CAP: usize = 2000;
/// Largest set cross-checked by a full brute-force count.
const FULL_ORACLE_CAP: usize = 5000;

#[derive(Debug)]
pub enum CliError {
    Core(Error),
    Usage(String),
    Io(String),
    /// A module error raised after a JSON result was produced.
    Reported(Value, Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Core(e) | CliError::Reported(_, e) => write!(f, "{e}"),
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Io(m) => write!(f, "i/o: {m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    /// 2 input, 3 arithmetic, 4 field, 5 ideal, 6 construction, 7 counting,
    /// 8 tower, 9 i/o. Code 1 is reserved for failed bounds.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Io(_) => 9,
            CliError::Core(e) | CliError::Reported(_, e) => match e.family() {
                ErrorFamily::Input => 2,
                ErrorFamily::Arithmetic => 3,
                ErrorFamily::Field => 4,
                ErrorFamily::Ideal => 5,
                ErrorFamily::Construction => 6,
                ErrorFamily::Counting => 7,
                ErrorFamily::Tower => 8,
            },
        }
    }
}

pub struct Context {
    pub precision: u32,
    pub timings: bool,
}

impl Context {
    pub fn check(&self) -> Result<(), CliError> {
        if !(32..=4096).contains(&self.precision) {
            return Err(CliError::Usage(format!("precision {} outside [32, 4096]", self.precision)));
        }
        Ok(())
    }

    fn census(&self, mut c: DistanceCensus) -> DistanceCensus {
        if !self.timings {
            c.runtime_ms = 0;
        }
        c
    }
}

/// JSON result and the bounds that failed.
pub struct Outcome {
    pub json: Value,
    pub failures: Vec<String>,
}

impl Outcome {
    fn ok(json: Value) -> Self {
        Outcome { json, failures: vec![] }
    }
}

type CmdResult = Result<Outcome, CliError>;

fn parse_primes(s: &str) -> Result<Vec<u64>, CliError> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<u64>().map_err(|_| CliError::Usage(format!("bad prime {t:?}"))))
        .collect()
}

fn parse_q(s: &str) -> Result<BigRational, CliError> {
    parse_rational(s.trim()).ok_or_else(|| CliError::Usage(format!("bad rational {s:?}")))
}

fn parse_q_list(s: &str) -> Result<Vec<BigRational>, CliError> {
    s.split(',').map(parse_q).collect()
}

pub fn load_field(spec: &str) -> Result<Arc<NumberField>, CliError> {
    if let Ok(k) = preset(spec) {
        return Ok(k);
    }
    let path = Path::new(spec);
    if !path.exists() {
        return Err(CliError::Usage(format!("{spec:?} is neither a preset nor a file")));
    }
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{spec}: {e}")))?;
    let desc: FieldDescription =
        serde_json::from_str(&text).map_err(|e| Error::Parse { line: e.line(), msg: e.to_string() })?;
    Ok(desc.build()?)
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

pub fn generate(ctx: &Context, a: &GenerateArgs) -> CmdResult {
    let field = load_field(&a.field)?;
    let r = parse_q(&a.r)?;
    if r < BigRational::from_integer(2.into()) && !a.allow_small_r {
        return Err(CliError::Usage("R must be at least 2 (pass --allow-small-r to override)".into()));
    }
    let scale = parse_q(&a.scale)?;
    let mut primes = Vec::new();
    if a.k > 0 {
        for &p in &a.primes {
            for pr in conjugate_free_primes(&field, p)? {
                primes.push((pr, a.k));
            }
        }
    }
    let mut params = SearchParams::default();
    if let Some(s) = &a.slack {
        params.slack = parse_q(s)?;
    }
    if let Some(d) = a.depth {
        params.depth = d;
    }
    let units = pigeonhole_units(&field, &primes, &params)?;
    let translate = match (&a.translate, a.translates) {
        (Some(t), _) => Some(parse_q_list(t)?),
        (None, 0) => None,
        (None, c) => Some(select_translate(&field, &scale, &r, c)?.0),
    };
    let cfg = WindowConfig { r, translate, scale, projection: a.projection };
    let (ps, mut report) = build_pointset(&field, &units, &cfg)?;
    report.census = ctx.census(report.census.clone());

    std::fs::create_dir_all(&a.out).map_err(|e| CliError::Io(format!("{}: {e}", a.out.display())))?;
    io::write_pointset(&a.out.join("pointset.csv"), &ps)?;
    let meta = json!({
        "field": FieldDescription::of(&field),
        "embedding": ps.embedding,
        "projection_coordinate": ps.projection,
        "scale": report.scale,
        "translate": report.translate,
        "R": report.r,
        "points": ps.len(),
        "unit_pairs_exact": ps.unit_pairs_exact,
        "float_format": "17 significant digits",
    });
    write_file(&a.out.join("pointset.json"), &serde_json::to_string_pretty(&meta).expect("json"))?;
    let report_json = serde_json::to_value(&report).expect("report serializes");
    write_file(&a.out.join("report.json"), &serde_json::to_string_pretty(&report_json).expect("json"))?;
    if !a.no_svg && ps.len() <= SVG_CAP {
        let pts = ps.approx();
        let pairs = float_unit_pairs(&pts, 1e-6)?;
        write_file(&a.out.join("scatter.svg"), &io::scatter_svg(&pts, &pairs))?;
    }
    let mut failures = Vec::new();
    if !report.translation_bound_holds {
        failures.push(format!("2 nu = {} < translation bound {}", 2 * report.measured_unit_pairs, report.translation_bound));
    }
    if !report.packing_bound_holds {
        failures.push(format!("|P| = {} exceeds {}", report.measured_points, report.upper_bound_cardinality));
    }
    Ok(Outcome { json: report_json, failures })
}

fn subset_oracle(pts: &[(f64, f64)], eps: f64, subsets: usize, size: usize, seed: u64) -> Result<(usize, usize), CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut agreed = 0;
    for _ in 0..subsets {
        let idx = sample(&mut rng, pts.len(), size.min(pts.len()));
        let sub: Vec<(f64, f64)> = idx.iter().map(|i| pts[i]).collect();
        if count_float(&sub, eps)?.unit_pairs == count_float_brute(&sub, eps)?.unit_pairs {
            agreed += 1;
        }
    }
    Ok((subsets, agreed))
}

pub fn count(ctx: &Context, a: &CountArgs) -> CmdResult {
    let data = io::read_points(&a.input)?;
    let n = data.approx.len();
    let mut failures = Vec::new();
    let (census, oracle) = match a.method.as_str() {
        "hashed" | "brute" => {
            let c = if a.method == "hashed" { count_float(&data.approx, a.eps)? } else { count_float_brute(&data.approx, a.eps)? };
            let oracle = if !a.oracle {
                None
            } else if n <= FULL_ORACLE_CAP {
                let b = count_float_brute(&data.approx, a.eps)?.unit_pairs;
                if b != c.unit_pairs {
                    failures.push(format!("brute force gives {b}, counted {}", c.unit_pairs));
                }
                Some(json!({ "mode": "full", "brute_unit_pairs": b, "agrees": b == c.unit_pairs }))
            } else {
                let (checked, agreed) = subset_oracle(&data.approx, a.eps, a.oracle_subsets, a.oracle_size, a.seed)?;
                if agreed != checked {
                    failures.push(format!("{} of {checked} subsets disagree with brute force", checked - agreed));
                }
                Some(json!({ "mode": "subsets", "subsets": checked, "subset_size": a.oracle_size, "seed": a.seed, "agreeing": agreed }))
            };
            (c, oracle)
        }
        "exact" => {
            let spec = a.field.as_deref().ok_or_else(|| CliError::Usage("--method exact needs --field".into()))?;
            let field = load_field(spec)?;
            let cm = detect_cm(&field).ok_or(Error::NotCm)?;
            let coords = data.coords.ok_or_else(|| CliError::Usage("exact counting needs c0.. columns".into()))?;
            let pts = coords.into_iter().map(|c| FieldElement::new(&field, c)).collect::<Result<Vec<_>, _>>()?;
            let c = count_exact_with(&pts, &data.approx, &cm)?;
            let oracle = if a.oracle {
                let b = count_exact_brute(&pts, &cm)?.unit_pairs;
                if b != c.unit_pairs {
                    failures.push(format!("brute force gives {b}, counted {}", c.unit_pairs));
                }
                Some(json!({ "mode": "full", "brute_unit_pairs": b, "agrees": b == c.unit_pairs }))
            } else {
                None
            };
            (c, oracle)
        }
        other => return Err(CliError::Usage(format!("unknown method {other:?}"))),
    };
    let mut json = json!({ "points": n, "census": ctx.census(census) });
    if let Some(o) = oracle {
        json["oracle"] = o;
    }
    Ok(Outcome { json, failures })
}

pub fn exponent(ctx: &Context, a: &ExponentArgs) -> CmdResult {
    let t = parse_primes(&a.t)?;
    let ledger = theorem_parameters(&t, a.p, ctx.precision)?;
    let json = ledger.to_json();
    if !ledger.feasible {
        return Err(CliError::Reported(json, Error::ConditionFailed("u pi <= 36 v".into())));
    }
    Ok(Outcome::ok(json))
}

pub fn gs_check(_ctx: &Context, a: &GsArgs) -> CmdResult {
    let t = parse_primes(&a.t)?;
    let s = parse_primes(&a.s)?;
    let spec = TowerSpec { t, p_split: a.p_split.or_else(|| s.first().copied()), s_finite: s };
    let rep = gscalc::gs_check(&spec)?;
    Ok(Outcome::ok(serde_json::to_value(rep).expect("report serializes")))
}

pub fn find_split_primes(_ctx: &Context, a: &SplitArgs) -> CmdResult {
    let t = parse_primes(&a.t)?;
    let primes = gscalc::find_split_primes(&t, a.count, a.require_1_mod_4, a.cap)?;
    let gens = gscalc::multiquadratic_generators(&t)?;
    Ok(Outcome::ok(json!({ "T": t, "generators": gens, "require_1_mod_4": a.require_1_mod_4, "primes": primes })))
}

pub fn r2(_ctx: &Context, a: &R2Args) -> CmdResult {
    let field = load_field(&a.field)?;
    let coords = parse_q_list(&a.alpha)?;
    if coords.len() != field.degree() {
        return Err(CliError::Usage(format!("alpha needs {} coordinates", field.degree())));
    }
    let alpha = FieldElement::new(&field, coords)?;
    let bound = match &a.bound {
        Some(b) => parse_q(b)?,
        None => {
            let top = (0..field.degree()).map(|k| alpha.approx(k).0).fold(0.0f64, f64::max);
            BigRational::from_integer(BigInt::from(top.max(0.0).sqrt().ceil() as i64 + 1))
        }
    };
    let n = r2_count(&field, &alpha, &bound)?;
    Ok(Outcome::ok(json!({
        "field": field.label(),
        "alpha": alpha.coords().iter().map(format_rational).collect::<Vec<_>>(),
        "bound": format_rational(&bound),
        "r2": n,
    })))
}

const FLOAT_GRID_LIMIT: u64 = 10_000;

pub fn grid(ctx: &Context, a: &GridArgs) -> CmdResult {
    let g = erdos_grid(a.n)?;
    // the float hash degrades with density (about m points per cell), so
    // large grids are counted on their integer labels
    let (measured_pairs, measured_by, census) = if a.n <= FLOAT_GRID_LIMIT {
        let c = ctx.census(count_float(&g.points, 1e-9)?);
        (c.unit_pairs, "hashed", Some(c))
    } else {
        (lattice_pairs(g.side, g.m), "lattice", None)
    };
    if let Some(path) = &a.out {
        let header = vec!["index".to_string(), "re".to_string(), "im".to_string()];
        let rows: Vec<Vec<String>> =
            g.points.iter().enumerate().map(|(i, p)| vec![i.to_string(), format!("{:.16e}", p.0), format!("{:.16e}", p.1)]).collect();
        io::write_rows(path, &header, &rows)?;
    }
    let mut failures = Vec::new();
    if measured_pairs != g.predicted_pairs {
        failures.push(format!("measured {measured_pairs} pairs, predicted {}", g.predicted_pairs));
    }
    let ratio = measured_pairs as f64 / a.n as f64;
    let mut json = serde_json::to_value(&g).expect("grid serializes");
    json["measured_pairs"] = json!(measured_pairs);
    json["measured_by"] = json!(measured_by);
    json["pairs_per_point"] = json!(format!("{ratio:.6}"));
    if let Some(c) = census {
        json["census"] = serde_json::to_value(c).expect("census serializes");
    }
    Ok(Outcome { json, failures })
}

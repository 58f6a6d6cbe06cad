//! `magnus`: exact Magnus-expansion algebra, the Stasheff-complex cocycle
//! verifier, and the harmonic expansion pipeline on flat tori.
//!
//! Exit codes: 0 all checks pass, 1 verification failure, 2 usage error,
//! 3 runtime or numerical failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde_json::{json, Map, Value};

use magnus_core::json as cjson;
use magnus_core::magnus::{johnson_components, MagnusExpansion};
use magnus_core::scalar::Mode;
use magnus_core::symplectic::SymplecticStructure;
use magnus_core::tensor::TensorSeries;
use magnus_torus::connection::{build_connection, diagnostics, ConnectionForm};
use magnus_torus::expansion::{harmonic_expansion, word_transport};
use magnus_torus::geometry::TorusGeometry;
use magnus_torus::integrate::TransportOpts;
use magnus_torus::loops::{canonical_loops, loop_from_polyline, LoopParams, TangentialLoop};
use magnus_torus::quaddiff::quad_differential;
use magnus_torus::variation::variation_run;

const SCHEMA_VERSION: u32 = 1;

#[derive(Parser)]
#[command(
    name = "magnus",
    version,
    about = "Magnus expansions, Johnson maps, associahedron cocycles, and harmonic expansions of flat tori"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Johnson map components of a free-group automorphism
    Johnson(JohnsonArgs),
    /// Stasheff-complex commands
    #[command(subcommand)]
    Assoc(AssocCmd),
    /// Flat-torus pipeline
    #[command(subcommand)]
    Torus(TorusCmd),
    /// Run the full acceptance suite
    Selftest(SelftestArgs),
}

#[derive(Args)]
struct JohnsonArgs {
    /// Free-group rank
    #[arg(long, default_value_t = 4)]
    n: usize,
    /// Truncation degree
    #[arg(long, default_value_t = 5)]
    trunc: usize,
    /// Base expansion (only "std" is built in)
    #[arg(long, default_value = "std")]
    expansion: String,
    /// Automorphism JSON file
    #[arg(long)]
    aut: PathBuf,
    /// Output file
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum AssocCmd {
    /// Verify the cocycle identity dY = Y o boundary on every cell
    Verify(AssocVerifyArgs),
    /// Enumerate cells with degrees and boundary chains
    Cells(AssocCellsArgs),
}

#[derive(Args)]
struct AssocVerifyArgs {
    #[arg(long)]
    p: usize,
    #[arg(long = "dim-h", default_value_t = 4)]
    dim_h: usize,
    /// Truncation degree (default p + 3)
    #[arg(long)]
    trunc: Option<usize>,
    #[arg(long, default_value_t = 5)]
    tuples: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AssocCellsArgs {
    #[arg(long)]
    p: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum TorusCmd {
    /// Build the connection form and write config plus diagnostics
    Build(TorusBuildArgs),
    /// Harmonic expansion along loops
    Expand(TorusExpandArgs),
    /// Quadratic differential N(omega' omega') diagnostics
    Quaddiff(TorusRefArgs),
    /// First-order variation against finite differences
    Vary(TorusVaryArgs),
}

#[derive(Args)]
struct TorusBuildArgs {
    /// Modulus, e.g. 0.3+1.1i
    #[arg(long)]
    tau: String,
    /// Puncture in lattice coordinates, e.g. 0.41+0.27i
    #[arg(long)]
    p0: String,
    /// Tangential direction, e.g. 1+0i
    #[arg(long, default_value = "1+0i")]
    v: String,
    #[arg(long, default_value_t = 256)]
    grid: usize,
    #[arg(long, default_value_t = 4)]
    deg: usize,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct TorusRefArgs {
    /// Build directory produced by `torus build`
    #[arg(long)]
    build: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct TorusExpandArgs {
    #[arg(long)]
    build: PathBuf,
    /// Loops JSON; canonical a/b loops when omitted
    #[arg(long)]
    loops: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct TorusVaryArgs {
    #[arg(long)]
    build: PathBuf,
    /// Constant Beltrami coefficient, e.g. 0.05+0.02i
    #[arg(long)]
    mu: String,
    /// Bump radius around the puncture
    #[arg(long, default_value_t = 0.08)]
    bump: f64,
    /// Central-difference step
    #[arg(long, default_value_t = 1e-3)]
    h: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SelftestArgs {
    #[arg(long, default_value_t = 0xACCE)]
    seed: u64,
    /// Grid for the expansion criterion (A5)
    #[arg(long, default_value_t = 256)]
    grid: usize,
}

fn main() -> ExitCode {
    if let Ok(threads) = std::env::var("MAGNUS_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}

type AnyErr = Box<dyn std::error::Error>;

fn run(cli: Cli) -> Result<ExitCode, AnyErr> {
    match cli.cmd {
        Cmd::Johnson(a) => cmd_johnson(a),
        Cmd::Assoc(AssocCmd::Verify(a)) => cmd_assoc_verify(a),
        Cmd::Assoc(AssocCmd::Cells(a)) => cmd_assoc_cells(a),
        Cmd::Torus(TorusCmd::Build(a)) => cmd_torus_build(a),
        Cmd::Torus(TorusCmd::Expand(a)) => cmd_torus_expand(a),
        Cmd::Torus(TorusCmd::Quaddiff(a)) => cmd_torus_quaddiff(a),
        Cmd::Torus(TorusCmd::Vary(a)) => cmd_torus_vary(a),
        Cmd::Selftest(a) => cmd_selftest(a),
    }
}

fn parse_complex(s: &str) -> Result<Complex64, AnyErr> {
    let t = s.trim().replace(' ', "");
    if let Some(stripped) = t.strip_suffix('i') {
        // split at the last +/- that is not an exponent sign
        let bytes = stripped.as_bytes();
        let mut split = None;
        for k in (1..bytes.len()).rev() {
            let c = bytes[k] as char;
            if (c == '+' || c == '-') && !matches!(bytes[k - 1] as char, 'e' | 'E') {
                split = Some(k);
                break;
            }
        }
        match split {
            Some(k) => {
                let re: f64 = stripped[..k].parse()?;
                let imstr = &stripped[k..];
                let im: f64 = match imstr {
                    "+" => 1.0,
                    "-" => -1.0,
                    _ => imstr.parse()?,
                };
                Ok(Complex64::new(re, im))
            }
            None => {
                let im: f64 = if stripped.is_empty() { 1.0 } else { stripped.parse()? };
                Ok(Complex64::new(0.0, im))
            }
        }
    } else {
        Ok(Complex64::new(t.parse()?, 0.0))
    }
}

fn complex_str(z: Complex64) -> String {
    if z.im >= 0.0 {
        format!("{}+{}i", z.re, z.im)
    } else {
        format!("{}{}i", z.re, z.im)
    }
}

fn artifact_header(config: Value, seed: u64) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("schema_version".into(), json!(SCHEMA_VERSION));
    m.insert("library_version".into(), json!(env!("CARGO_PKG_VERSION")));
    m.insert("seed".into(), json!(seed));
    m.insert("config".into(), config);
    m
}

fn write_artifact(path: &Path, value: &Value) -> Result<(), AnyErr> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    std::fs::write(path, serde_json::to_string_pretty(value)?)?;
    Ok(())
}

fn cmd_johnson(a: JohnsonArgs) -> Result<ExitCode, AnyErr> {
    if a.expansion != "std" {
        eprintln!("unknown expansion {:?}; only \"std\" is available", a.expansion);
        return Ok(ExitCode::from(2));
    }
    let aut_json: Value = serde_json::from_str(&std::fs::read_to_string(&a.aut)?)?;
    let phi = cjson::aut_from_json(&aut_json)?;
    if phi.n() != a.n {
        eprintln!("automorphism rank {} does not match --n {}", phi.n(), a.n);
        return Ok(ExitCode::from(2));
    }
    let theta = MagnusExpansion::standard(a.n, a.trunc, Mode::Exact)?;
    let comps = johnson_components(&theta, &phi)?;
    let mut body = artifact_header(
        json!({"n": a.n, "trunc": a.trunc, "expansion": a.expansion, "aut": aut_json}),
        a.seed,
    );
    let mut taus = Map::new();
    for (p, der) in &comps {
        let mut per_gen = Map::new();
        for i in 1..=a.n {
            per_gen.insert(i.to_string(), cjson::series_to_json(der.image(i as u8)));
        }
        taus.insert(p.to_string(), Value::Object(per_gen));
    }
    body.insert("tau".into(), Value::Object(taus));
    write_artifact(&a.out, &Value::Object(body))?;
    println!(
        "johnson: n={} trunc={} nonzero components at p = {:?}",
        a.n,
        a.trunc,
        comps.keys().collect::<Vec<_>>()
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_assoc_verify(a: AssocVerifyArgs) -> Result<ExitCode, AnyErr> {
    let trunc = a.trunc.unwrap_or(a.p + 3);
    let rep = magnus_core::assoc::verify_cocycle(a.p, a.dim_h, trunc, a.tuples, a.seed)?;
    let ok = rep.all_exact();
    let mut body = artifact_header(
        json!({"p": a.p, "dim_h": a.dim_h, "trunc": trunc, "tuples": a.tuples}),
        a.seed,
    );
    body.insert(
        "cells".into(),
        Value::Array(
            rep.cells
                .iter()
                .map(|c| json!({"cell": c.cell, "deg": c.deg, "tuples": c.tuples, "exact": c.exact}))
                .collect(),
        ),
    );
    body.insert("peeling_orders_agree".into(), json!(rep.peeling_orders_agree));
    body.insert("all_exact".into(), json!(ok));
    if let Some(out) = &a.out {
        write_artifact(out, &Value::Object(body))?;
    }
    println!(
        "assoc verify: p={} cells={} tuples={} -> {}",
        a.p,
        rep.cells.len(),
        a.tuples,
        if ok { "all exact" } else { "FAILURE" }
    );
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn cmd_assoc_cells(a: AssocCellsArgs) -> Result<ExitCode, AnyErr> {
    let cells = magnus_core::assoc::cells(a.p);
    let f_vec = magnus_core::assoc::f_vector(a.p);
    let mut body = artifact_header(json!({"p": a.p}), 0);
    body.insert("f_vector".into(), json!(f_vec));
    body.insert(
        "cells".into(),
        Value::Array(
            cells
                .iter()
                .map(|c| {
                    let boundary: Vec<Value> = c
                        .boundary()
                        .iter()
                        .map(|(s, b)| json!({"sign": s, "brackets": b.brackets()}))
                        .collect();
                    json!({
                        "brackets": c.brackets(),
                        "deg": c.deg(),
                        "dim": c.dim(),
                        "boundary": boundary,
                    })
                })
                .collect(),
        ),
    );
    if let Some(out) = &a.out {
        write_artifact(out, &Value::Object(body))?;
    }
    println!("assoc cells: p={} total={} f-vector={f_vec:?}", a.p, cells.len());
    Ok(ExitCode::SUCCESS)
}

fn torus_config(geom: &TorusGeometry, deg: usize, seed: u64) -> Value {
    json!({
        "tau": complex_str(geom.tau),
        "p0": complex_str(Complex64::new(geom.p0.0, geom.p0.1)),
        "v": complex_str(geom.v),
        "grid": geom.m,
        "deg": deg,
        "seed": seed,
    })
}

fn geometry_from_config(cfg: &Value) -> Result<(TorusGeometry, usize, u64), AnyErr> {
    let tau = parse_complex(cfg["tau"].as_str().ok_or("missing tau")?)?;
    let p0 = parse_complex(cfg["p0"].as_str().ok_or("missing p0")?)?;
    let v = parse_complex(cfg["v"].as_str().ok_or("missing v")?)?;
    let grid = cfg["grid"].as_u64().ok_or("missing grid")? as usize;
    let deg = cfg["deg"].as_u64().ok_or("missing deg")? as usize;
    let seed = cfg["seed"].as_u64().unwrap_or(0);
    Ok((TorusGeometry::new(tau, (p0.re, p0.im), v, grid)?, deg, seed))
}

/// Loads a build directory: the connection is regenerated deterministically
/// from the configuration contract written by `torus build`.
fn load_build(dir: &Path) -> Result<(ConnectionForm, usize, u64), AnyErr> {
    let cfg: Value = serde_json::from_str(&std::fs::read_to_string(dir.join("config.json"))?)?;
    let (geom, deg, seed) = geometry_from_config(&cfg["config"])?;
    let cf = build_connection(&geom, deg)?;
    Ok((cf, deg, seed))
}

fn cmd_torus_build(a: TorusBuildArgs) -> Result<ExitCode, AnyErr> {
    let tau = parse_complex(&a.tau)?;
    let p0 = parse_complex(&a.p0)?;
    let v = parse_complex(&a.v)?;
    let geom = TorusGeometry::new(tau, (p0.re, p0.im), v, a.grid)?;
    let cf = build_connection(&geom, a.deg)?;

    let mut diag = Map::new();
    for m in 2..=a.deg {
        let mut d = Map::new();
        d.insert(
            "integrability_l2_off_excision".into(),
            json!(diagnostics::integrability_residual(&cf, m, 8.0)?),
        );
        d.insert(
            "coclosedness_l2_off_excision".into(),
            json!(diagnostics::coclosedness_residual(&cf, m, 8.0)?),
        );
        d.insert(
            "harmonic_projection".into(),
            json!(diagnostics::harmonic_projection_norm(&cf, m)?),
        );
        d.insert("mean_residual".into(), json!(cf.degree(m).mean_residual));
        if let Some((c_fit, ratio)) = diagnostics::envelope_check(&cf, m) {
            d.insert("envelope_c_fit".into(), json!(c_fit));
            d.insert("envelope_max_ratio".into(), json!(ratio));
        }
        diag.insert(format!("degree_{m}"), Value::Object(d));
    }
    let mut ortho = Map::new();
    for m in 3..=(a.deg + 1) {
        for q in 1..m {
            let p = m - q;
            if p > a.deg || q > a.deg {
                continue;
            }
            let worst = diagnostics::wedge_integral(&cf, q, p)?
                .iter()
                .map(|(_, v)| v.norm())
                .fold(0.0, f64::max);
            ortho.insert(format!("int_w{q}_w{p}"), json!(worst));
        }
    }
    diag.insert("orthogonality".into(), Value::Object(ortho));

    let mut body = artifact_header(torus_config(&geom, a.deg, a.seed), a.seed);
    body.insert("diagnostics".into(), Value::Object(diag));
    std::fs::create_dir_all(&a.out)?;
    write_artifact(&a.out.join("config.json"), &Value::Object(body))?;
    println!(
        "torus build: grid={} deg={} written to {}",
        a.grid,
        a.deg,
        a.out.display()
    );
    Ok(ExitCode::SUCCESS)
}

fn loops_from_file(
    geom: &TorusGeometry,
    path: &Path,
) -> Result<(TangentialLoop, TangentialLoop), AnyErr> {
    let v: Value = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    for (key, expect) in [
        ("tau", geom.tau),
        ("p0", Complex64::new(geom.p0.0, geom.p0.1)),
        ("v", geom.v),
    ] {
        if let Some(s) = v.get(key).and_then(Value::as_str) {
            let got = parse_complex(s)?;
            if (got - expect).norm() > 1e-9 {
                return Err(format!("loops file {key} = {got} does not match the build ({expect})").into());
            }
        }
    }
    let params = LoopParams::default();
    let mut a_loop = None;
    let mut b_loop = None;
    for entry in v["loops"].as_array().ok_or("missing loops array")? {
        let label = entry["label"].as_str().ok_or("loop without label")?;
        let poly: Vec<(f64, f64)> = entry["polyline"]
            .as_array()
            .ok_or("loop without polyline")?
            .iter()
            .map(|p| {
                let xy = p.as_array().ok_or("polyline point")?;
                Ok::<(f64, f64), AnyErr>((
                    xy[0].as_f64().ok_or("x")?,
                    xy[1].as_f64().ok_or("y")?,
                ))
            })
            .collect::<Result<_, _>>()?;
        let lp = loop_from_polyline(geom, label, &poly, &params)?;
        match label {
            "a" => a_loop = Some(lp),
            "b" => b_loop = Some(lp),
            other => return Err(format!("unknown loop label {other:?}").into()),
        }
    }
    match (a_loop, b_loop) {
        (Some(a), Some(b)) => Ok((a, b)),
        _ => Err("loops file must define labels \"a\" and \"b\"".into()),
    }
}

fn cmd_torus_expand(a: TorusExpandArgs) -> Result<ExitCode, AnyErr> {
    let (cf, deg, seed) = load_build(&a.build)?;
    let geom = cf.geom;
    let (la, lb) = match &a.loops {
        Some(path) => loops_from_file(&geom, path)?,
        None => canonical_loops(&geom, &LoopParams::default())?,
    };
    let opts = TransportOpts::default();
    let theta = harmonic_expansion(&cf, &la, &lb, &opts)?;

    let mut deg1 = 0.0f64;
    for (i, l) in [(1usize, 1u8), (2, 2)] {
        let g = theta.generator_value(i);
        for k in 1..=2u8 {
            let c = g.coeff(&[k]).abs_f64();
            deg1 = deg1.max((c - if k == l { 1.0 } else { 0.0 }).abs());
        }
    }
    let hom = {
        let tab = word_transport(&cf, &la, &lb, &[1, 2], &TransportOpts::coarse())?;
        let prod = theta.generator_value(1).mul(theta.generator_value(2))?;
        tab.dist_max(&prod)
    };
    let sympl = {
        let s = SymplecticStructure::new(1)?;
        let target = s.intersection_tensor(deg, Mode::Float).neg().exp()?;
        let mut acc = TensorSeries::one(2, deg, Mode::Float);
        for &l in &magnus_torus::acceptance::positive_commutator_word() {
            let f = if l > 0 {
                theta.generator_value(l as usize).clone()
            } else {
                theta.generator_value((-l) as usize).group_inverse()?
            };
            acc = acc.mul(&f)?;
        }
        acc.dist_max(&target)
    };

    let mut body = artifact_header(torus_config(&geom, deg, seed), seed);
    body.insert(
        "diagnostics".into(),
        json!({
            "degree1_defect": deg1,
            "homomorphism_defect": hom,
            "symplectic_defect": sympl,
        }),
    );
    body.insert(
        "theta".into(),
        json!({
            "a": cjson::series_to_json(theta.generator_value(1)),
            "b": cjson::series_to_json(theta.generator_value(2)),
        }),
    );
    write_artifact(&a.out, &Value::Object(body))?;
    println!("torus expand: deg1 {deg1:.2e}, homomorphism {hom:.2e}, symplectic {sympl:.2e}");
    Ok(ExitCode::SUCCESS)
}

fn cmd_torus_quaddiff(a: TorusRefArgs) -> Result<ExitCode, AnyErr> {
    let (cf, deg, seed) = load_build(&a.build)?;
    let q = quad_differential(&cf, deg + 1)?;
    let mut per_deg = Map::new();
    for m in 2..=deg + 1 {
        let mut d = Map::new();
        if let Some(r) = q.dbar_residual(m, 8.0) {
            d.insert("dbar_residual_off_excision".into(), json!(r));
        }
        if let Some(p) = q.pole_order(m) {
            d.insert("pole_order_fit".into(), json!(p));
            d.insert("pole_order_bound".into(), json!(if m == 4 { 2 } else { 1 }));
        }
        d.insert("norm_off_excision".into(), json!(q.norm_off(m, 8.0)));
        per_deg.insert(format!("degree_{m}"), Value::Object(d));
    }
    let mut body = artifact_header(torus_config(&cf.geom, deg, seed), seed);
    body.insert("rauch_identity_error".into(), json!(q.rauch_identity_error(&cf)));
    body.insert("epsilon_invariance_error".into(), json!(q.epsilon_invariance_error()));
    body.insert("degrees".into(), Value::Object(per_deg));
    write_artifact(&a.out, &Value::Object(body))?;
    println!(
        "torus quaddiff: rauch {:.2e}, eps-invariance {:.2e}",
        q.rauch_identity_error(&cf),
        q.epsilon_invariance_error()
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_torus_vary(a: TorusVaryArgs) -> Result<ExitCode, AnyErr> {
    let (cf, deg, seed) = load_build(&a.build)?;
    let geom = cf.geom;
    let mu = parse_complex(&a.mu)?;
    let (la, lb) = canonical_loops(&geom, &LoopParams::default())?;
    let words: Vec<(&str, Vec<i32>)> = vec![("a", vec![1]), ("b", vec![2]), ("ab", vec![1, 2])];
    let run = variation_run(
        &geom,
        &cf,
        &la,
        &lb,
        mu,
        a.bump,
        a.h,
        &words,
        &TransportOpts::default(),
    )?;
    let mut per_word = Map::new();
    let mut worst = 0.0f64;
    for ((label, pred), (_, meas)) in run.predicted.iter().zip(&run.measured) {
        let mut entry = Map::new();
        entry.insert("predicted".into(), cjson::series_to_json(pred));
        entry.insert("finite_difference".into(), cjson::series_to_json(meas));
        let mut rels = Map::new();
        for d in 3..=deg {
            let norm = pred.max_coeff(d, d);
            if norm == 0.0 {
                continue;
            }
            let diff = pred.sub(meas)?;
            let mut w_rel = 0.0f64;
            for (wd, _) in pred.component(d) {
                let p = pred.coeff(wd).abs_f64();
                if p < 1e-3 * norm {
                    continue;
                }
                let rel = diff.coeff(wd).abs_f64() / p.max(meas.coeff(wd).abs_f64());
                w_rel = w_rel.max(rel);
            }
            rels.insert(format!("degree_{d}_worst_rel"), json!(w_rel));
            worst = worst.max(w_rel);
        }
        entry.insert("agreement".into(), Value::Object(rels));
        per_word.insert(label.clone(), Value::Object(entry));
    }
    let mut body = artifact_header(torus_config(&geom, deg, seed), seed);
    body.insert(
        "rauch".into(),
        json!({
            "tau_dot_fd": complex_str(run.tau_dot_fd),
            "tau_dot_pairing": complex_str(run.tau_dot_rauch),
            "relative_error": (run.tau_dot_fd - run.tau_dot_rauch).norm() / run.tau_dot_rauch.norm(),
        }),
    );
    body.insert("mu".into(), json!(complex_str(mu)));
    body.insert("bump".into(), json!(a.bump));
    body.insert("h".into(), json!(a.h));
    body.insert("words".into(), Value::Object(per_word));
    write_artifact(&a.out, &Value::Object(body))?;
    println!("torus vary: worst significant-coefficient deviation {:.2}%", worst * 100.0);
    Ok(ExitCode::SUCCESS)
}

fn cmd_selftest(a: SelftestArgs) -> Result<ExitCode, AnyErr> {
    let mut all = magnus_core::acceptance::run_all(a.seed);
    all.push(magnus_torus::acceptance::a5_expansion(a.grid));
    all.push(magnus_torus::acceptance::a6_integrability());
    all.push(magnus_torus::acceptance::a7_quaddiff());
    all.push(magnus_torus::acceptance::a8_variation(512));
    all.push(magnus_torus::acceptance::a9_kernel());
    let mut ok = true;
    for c in &all {
        println!(
            "[{}] {} ({:.2}s): {}",
            c.id,
            if c.pass { "PASS" } else { "FAIL" },
            c.seconds,
            c.detail
        );
        ok &= c.pass;
    }
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

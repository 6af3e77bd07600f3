//! Pipeline stages. Each stage reads its inputs from the run directory and
//! writes its outputs there, so any stage can be rerun on its own.

use std::fmt;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use anyhow::{bail, ensure, Context};
use log::{info, warn};
use mertens_core::evaluator::dyadic_to_decimal;
use mertens_core::rug::{Integer, Rational};
use mertens_core::zeros::Decimal;
use mertens_core::{
    bkz_progressive, build_instance, correlation_report, determinant, enumerate_bdd, eval_h, eval_partial,
    gram_schmidt, linear_beta_profile, parse_zero_file, profile, take_top, to_bound, weight_dataset, BddOptions,
    CorrelationInput, EnumTarget, IntervalValue, LatticeBasis, MertensInstance, MertensParams, PruningProfile,
    WeightedZero, ZeroDataset,
};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::artifacts::*;
use crate::config::{PruningKind, RunConfig, SAVED_CONFIG};

/// A problem with the configuration or the command line rather than with a stage.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug)]
pub struct StageFailure {
    pub stage: &'static str,
    pub error: anyhow::Error,
}

impl fmt::Display for StageFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "stage {} failed: {:#}", self.stage, self.error)
    }
}

#[derive(Debug, PartialEq, Eq)]
pub enum Status {
    Complete,
    Incomplete(String),
}

pub fn tagged<T>(stage: &'static str, r: anyhow::Result<T>) -> Result<T, StageFailure> {
    r.map_err(|error| StageFailure { stage, error })
}

pub const EVALUATION: &str = "evaluation.json";

pub struct Ctx {
    pub cfg: RunConfig,
    pub dir: RunDir,
}

impl Ctx {
    /// Creates the run directory and saves the resolved config into it.
    pub fn open(cfg: RunConfig) -> anyhow::Result<Ctx> {
        let dir = RunDir::create(&cfg.out)?;
        dir.write_text(SAVED_CONFIG, &cfg.to_toml())?;
        Ok(Ctx { cfg, dir })
    }

    fn zeros_path(&self) -> anyhow::Result<PathBuf> {
        if let Some(p) = &self.cfg.zeros {
            return Ok(p.clone());
        }
        if self.dir.exists(DATASET) {
            let rec = self.dir.read_json(DATASET)?;
            return Ok(PathBuf::from(rec["zeros"].as_str().context("dataset.json lacks the zero file path")?));
        }
        Err(ConfigError("no zero data: pass --zeros".into()).into())
    }

    /// Reads and weights the zero file. Unless `fresh`, the result must match
    /// the fingerprint recorded by `ingest`.
    pub fn dataset(&self, fresh: bool) -> anyhow::Result<ZeroDataset> {
        let path = self.zeros_path()?;
        let t0 = Instant::now();
        let zeros = parse_zero_file(&path, self.cfg.min_digits()).with_context(|| format!("ingesting {}", path.display()))?;
        let cutoff = match self.cfg.cutoff() {
            Some(c) => c,
            None => zeros.last().map(|z| z.gamma.to_f64() + 0.5).context("the zero file is empty")?,
        };
        let ds = weight_dataset(&zeros, self.cfg.mode, cutoff)?;
        info!(
            "{} zeros below height {} from {} ({:.1}s)",
            ds.len(),
            cutoff,
            path.display(),
            t0.elapsed().as_secs_f64()
        );
        if !fresh && self.dir.exists(DATASET) {
            let rec = self.dir.read_json(DATASET)?;
            let want = rec["fingerprint"].as_str().unwrap_or_default();
            if want != ds.fingerprint() {
                bail!("the zero data or mode differs from the one recorded in dataset.json; rerun ingest");
            }
        }
        Ok(ds)
    }
}

pub fn ingest(ctx: &Ctx) -> anyhow::Result<ZeroDataset> {
    let ds = ctx.dataset(true)?;
    let path = ctx.zeros_path()?;
    let heaviest: Vec<Value> = ds
        .zeros
        .iter()
        .take(5)
        .map(|z| json!({"gamma": z.gamma().as_str(), "alpha_star": real(z.alpha_star_f64())}))
        .collect();
    let min_digits = ds.zeros.iter().map(|z| z.base.precision_digits).min().unwrap_or(0);
    ctx.dir.write_json(
        DATASET,
        json!({
            "zeros": path.to_string_lossy(),
            "mode": ds.mode.name(),
            "height_cutoff": real(ds.height_cutoff),
            "zero_count": ds.len(),
            "min_precision_digits": min_digits,
            "fingerprint": ds.fingerprint(),
            "heaviest": heaviest,
        }),
    )?;
    Ok(ds)
}

fn instance_json(inst: &MertensInstance, fingerprint: &str) -> Value {
    let p = &inst.params;
    let manifest = mertens_core::mertens::InstanceManifest::new(inst, fingerprint);
    let pr = &manifest.predicted;
    json!({
        "params": {
            "n": p.n,
            "nu": p.nu,
            "nu_y": p.nu_y,
            "nu_t": p.nu_t,
            "radius_scale": real(p.radius_scale),
            "mode": p.mode.name(),
            "sign": p.sign.to_string(),
        },
        "dataset_fingerprint": fingerprint,
        "dimension": inst.dim(),
        "det": manifest.det,
        "log2_det": real(manifest.log2_det),
        "radius": real(inst.radius()),
        "gaussian_estimate": real(manifest.gaussian_estimate),
        "predicted": {
            "c": real(pr.c),
            "entry_range": [real(pr.entry_range.0), real(pr.entry_range.1)],
            "y_range": [real(pr.y_range.0), real(pr.y_range.1)],
        },
    })
}

fn params_from_json(v: &Value) -> anyhow::Result<MertensParams> {
    let p = &v["params"];
    let int = |k: &str| p[k].as_u64().with_context(|| format!("instance.json: params.{k} missing"));
    let text = |k: &str| p[k].as_str().with_context(|| format!("instance.json: params.{k} missing"));
    Ok(MertensParams {
        n: int("n")? as usize,
        nu: int("nu")? as u32,
        nu_y: int("nu_y")? as u32,
        nu_t: int("nu_t")? as u32,
        radius_scale: parse_real(&p["radius_scale"], "params.radius_scale")?,
        mode: text("mode")?.parse().map_err(anyhow::Error::msg)?,
        sign: text("sign")?.parse().map_err(anyhow::Error::msg)?,
    })
}

pub fn build(ctx: &Ctx, ds: &ZeroDataset) -> anyhow::Result<MertensInstance> {
    let params = ctx.cfg.mertens_params();
    let inst = build_instance(take_top(ds, params.n)?, &params)?;
    info!(
        "lattice of dimension {}: log2 det {:.2}, radius {:.4e}, about {:.3e} points in the ball",
        inst.dim(),
        inst.log2_det(),
        inst.radius(),
        inst.gaussian_estimate()
    );
    ctx.dir.write_json(INSTANCE, instance_json(&inst, &ds.fingerprint()))?;
    ctx.dir.write_basis(BASIS, &inst.basis)?;
    let target: Vec<String> = inst.target.iter().map(Integer::to_string).collect();
    ctx.dir.write_text(TARGET, &format!("{}\n", target.join(" ")))?;
    Ok(inst)
}

/// Rebuilds the instance recorded in `instance.json` and checks it against the record.
pub fn load_instance(ctx: &Ctx, ds: &ZeroDataset) -> anyhow::Result<MertensInstance> {
    let rec = ctx.dir.read_json(INSTANCE)?;
    let params = params_from_json(&rec)?;
    if rec["dataset_fingerprint"].as_str() != Some(ds.fingerprint().as_str()) {
        bail!("instance.json was built from different zero data; rerun build");
    }
    let inst = build_instance(take_top(ds, params.n)?, &params)?;
    if rec["det"].as_str() != Some(inst.det.to_string().as_str()) {
        bail!("instance.json does not match the rebuilt lattice; rerun build");
    }
    Ok(inst)
}

pub fn reduce(ctx: &Ctx, input: Option<&Path>, dump: Option<&Path>) -> anyhow::Result<()> {
    let input = input.map(Path::to_path_buf).unwrap_or_else(|| ctx.dir.path(BASIS));
    let basis = read_basis(&input)?;
    let params = ctx.cfg.reduction_params();
    let t0 = Instant::now();
    let out = bkz_progressive(&basis, &params)?;
    ensure!(out.transform.apply(&basis) == out.basis, "the transformation does not map the input to the output");
    let elapsed = t0.elapsed().as_secs_f64();
    let prof = profile(&out.basis)?;
    info!(
        "reduced in {:.1}s: |b1| = {:.4e}, normalized first {:.3}",
        elapsed,
        out.tours.last().map_or(f64::NAN, |t| t.b1_norm),
        prof.normalized_first
    );
    let skipped: usize = out.tours.iter().map(|t| t.skipped_blocks).sum();
    if skipped > 0 {
        warn!("{skipped} block searches ran out of time and were skipped");
    }
    ctx.dir.write_basis(REDUCED, &out.basis)?;
    ctx.dir
        .write_text(TRANSFORM, &LatticeBasis::new(out.transform.unimodular.clone())?.to_text())?;
    let reals = |v: &[f64]| v.iter().map(|x| real(*x)).collect::<Vec<_>>();
    let tours: Vec<Value> = out
        .tours
        .iter()
        .map(|t| {
            json!({
                "beta": t.beta,
                "b1_norm": real(t.b1_norm),
                "elapsed_secs": real(t.elapsed_secs),
                "insertions": t.insertions,
                "skipped_blocks": t.skipped_blocks,
                "nodes": t.nodes,
                "log_norms": reals(&t.log_norms),
            })
        })
        .collect();
    ctx.dir.write_json(
        REDUCTION,
        json!({
            "input": input.to_string_lossy(),
            "dimension": basis.rank(),
            "params": {
                "delta": real(params.delta),
                "beta_start": params.beta_start,
                "beta_end": params.beta_end,
                "svp_timeout_secs": params.svp_timeout.map(|d| real(d.as_secs_f64())),
                "gso_precision": params.gso_precision,
            },
            "tours": tours,
            "profile": {
                "log_norms": reals(&prof.log_norms),
                "log_det": real(prof.log_det),
                "normalized_first": real(prof.normalized_first),
            },
            "elapsed_secs": real(elapsed),
        }),
    )?;
    if let Some(d) = dump {
        out.basis.write_to(d).with_context(|| format!("writing {}", d.display()))?;
    }
    Ok(())
}

pub fn enumerate(ctx: &Ctx, ds: &ZeroDataset) -> anyhow::Result<Status> {
    let inst = load_instance(ctx, ds)?;
    let reduced = ctx.dir.read_basis(REDUCED)?;
    ensure!(reduced.dim() == inst.basis.dim(), "reduced.txt has the wrong shape; rerun reduce");
    let det = determinant(&reduced)?;
    ensure!(
        det.exact.map(|d| d.abs()) == Some(inst.det.clone()),
        "reduced.txt spans a different lattice; rerun reduce"
    );
    let gso = gram_schmidt(&reduced, ctx.cfg.gso_precision)?;
    let target = EnumTarget::from_integers(&reduced, &gso, &inst.target)?;
    let m = inst.dim();
    let prof = match ctx.cfg.pruning {
        PruningKind::None => PruningProfile::full(m, inst.radius()),
        PruningKind::LinearBeta => linear_beta_profile(m, inst.radius()),
    };
    let options = BddOptions {
        dedup_b1: ctx.cfg.dedup_b1,
        limit: ctx.cfg.limit,
        node_cap: ctx.cfg.node_cap,
        trace: false,
    };
    let t0 = Instant::now();
    let mut it = enumerate_bdd(&reduced, &gso, &target, &prof, options)?;
    let mut rows = Vec::new();
    for c in it.by_ref() {
        let point = reduced.combination(&c.coeffs);
        let cy = inst.recover_from_point(&point)?;
        rows.push(json!({
            "index": rows.len(),
            "x": cy.x.to_string(),
            "y": dyadic_to_decimal(&cy.y),
            "dist_sq": cy.dist_sq(inst.params.nu_t).to_string(),
            "residual_sq": cy.residual_sq.to_string(),
            "log2_offset_from_range": format!("{:.3}", cy.log2_offset_from_range()),
        }));
    }
    let stats = it.stats();
    info!(
        "{} candidates from {} nodes in {:.1}s",
        rows.len(),
        stats.nodes,
        t0.elapsed().as_secs_f64()
    );
    write_jsonl(&ctx.dir.path(CANDIDATES), &rows)?;
    ctx.dir.write_json(
        ENUMERATION,
        json!({
            "pruning": match ctx.cfg.pruning { PruningKind::None => "none", PruningKind::LinearBeta => "linear-beta" },
            "radius": real(inst.radius()),
            "gaussian_estimate": real(inst.gaussian_estimate()),
            "candidates": rows.len(),
            "nodes": stats.nodes,
            "rejected": stats.rejected,
            "shifted": stats.shifted,
            "incomplete": stats.incomplete,
            "elapsed_secs": real(t0.elapsed().as_secs_f64()),
        }),
    )?;
    Ok(if stats.incomplete {
        Status::Incomplete(format!("enumeration stopped at the node cap after {} nodes", stats.nodes))
    } else {
        Status::Complete
    })
}

/// One value of `y` to evaluate, with whatever the enumeration recorded about it.
pub struct EvalInput {
    pub y_text: String,
    pub index: Option<u64>,
    pub dist_sq: Option<Rational>,
}

impl EvalInput {
    fn from_row(v: &Value) -> anyhow::Result<EvalInput> {
        let y_text = v["y"].as_str().context("candidate lacks a \"y\" string")?.to_string();
        let dist_sq = match v["dist_sq"].as_str() {
            Some(s) => Some(s.parse::<Rational>().map_err(|e| anyhow::anyhow!("bad dist_sq {s:?}: {e}"))?),
            None => None,
        };
        Ok(EvalInput {
            y_text,
            index: v["index"].as_u64(),
            dist_sq,
        })
    }
}

pub fn read_candidates(path: &Path) -> anyhow::Result<Vec<EvalInput>> {
    read_jsonl(path)?.iter().map(EvalInput::from_row).collect()
}

pub struct Evaluated {
    pub row: Value,
    pub full: Option<IntervalValue>,
    pub partial: Option<IntervalValue>,
}

fn evaluate_one(input: &EvalInput, ds: &ZeroDataset, lattice: Option<&[WeightedZero]>, bits: u32) -> Evaluated {
    let failed = |msg: String| Evaluated {
        row: json!({"y": input.y_text, "index": input.index, "error": msg}),
        full: None,
        partial: None,
    };
    let y = match input.y_text.parse::<Decimal>() {
        Ok(d) => d.value().clone(),
        Err(e) => return failed(e),
    };
    if y <= 0 {
        return failed("y must be positive".into());
    }
    let full = match eval_h(&y, ds, bits) {
        Ok(h) => h,
        Err(e) => return failed(e.to_string()),
    };
    let mut row = to_bound(&y, &full, ds.mode).to_json();
    let map = row.as_object_mut().expect("object");
    map.insert("y".into(), input.y_text.clone().into());
    if let Some(i) = input.index {
        map.insert("index".into(), i.into());
    }
    if let Some(d) = &input.dist_sq {
        map.insert("dist_sq".into(), d.to_string().into());
    }
    let partial = lattice.and_then(|zs| eval_partial(&y, zs, ds.mode, bits).ok());
    if let Some(p) = &partial {
        let (lo, hi) = p.to_decimal_strings(20);
        map.insert("partial_lo".into(), lo.into());
        map.insert("partial_hi".into(), hi.into());
    }
    Evaluated {
        row,
        full: Some(full),
        partial,
    }
}

/// Evaluates every input in parallel; the output keeps the input order.
pub fn evaluate(ctx: &Ctx, ds: &ZeroDataset, inputs: &[EvalInput], lattice_n: Option<usize>) -> anyhow::Result<Vec<Evaluated>> {
    let lattice = match lattice_n {
        Some(n) => Some(take_top(ds, n)?),
        None => None,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(ctx.cfg.jobs.unwrap_or(0))
        .build()?;
    let bits = ctx.cfg.eval_precision;
    let t0 = Instant::now();
    let out: Vec<Evaluated> = pool.install(|| inputs.par_iter().map(|inp| evaluate_one(inp, ds, lattice, bits)).collect());
    info!("evaluated {} values in {:.1}s", out.len(), t0.elapsed().as_secs_f64());
    Ok(out)
}

/// The evaluate stage: reports for the run's candidates (or `candidates`) plus
/// the correlation table.
pub fn evaluate_stage(ctx: &Ctx, ds: &ZeroDataset, candidates: Option<&Path>) -> anyhow::Result<()> {
    let path = candidates.map(Path::to_path_buf).unwrap_or_else(|| ctx.dir.path(CANDIDATES));
    let inputs = read_candidates(&path)?;
    let lattice_n = if ctx.dir.exists(INSTANCE) {
        Some(params_from_json(&ctx.dir.read_json(INSTANCE)?)?.n)
    } else {
        None
    };
    let results = evaluate(ctx, ds, &inputs, lattice_n)?;
    let rows: Vec<Value> = results.iter().map(|r| r.row.clone()).collect();
    write_jsonl(&ctx.dir.path(REPORTS), &rows)?;

    let corr: Vec<CorrelationInput<'_>> = results
        .iter()
        .zip(&inputs)
        .filter_map(|(r, inp)| {
            Some(CorrelationInput {
                dist_sq: inp.dist_sq.as_ref()?,
                partial: r.partial.as_ref()?,
                full: r.full.as_ref()?,
            })
        })
        .collect();
    let rank_correlation = if corr.len() >= 2 {
        let report = correlation_report(&corr)?;
        ctx.dir.write_text(CORRELATION, &report.to_csv())?;
        Some(real(report.rank_correlation))
    } else {
        None
    };
    let errors = rows.iter().filter(|r| r.get("error").is_some()).count();
    let hits = rows.iter().filter(|r| r["hit"] == true).count();
    ctx.dir.write_json(
        EVALUATION,
        json!({
            "candidates": path.to_string_lossy(),
            "evaluated": rows.len() - errors,
            "errors": errors,
            "hits": hits,
            "precision_bits": ctx.cfg.eval_precision,
            "rank_correlation": rank_correlation,
        }),
    )?;
    Ok(())
}

/// Lower bound of `|h|` from a report row, for ranking.
fn abs_lo(row: &Value) -> Option<f64> {
    let lo: f64 = row["h_lo"].as_str()?.parse().ok()?;
    let hi: f64 = row["h_hi"].as_str()?.parse().ok()?;
    Some(if lo > 0.0 {
        lo
    } else if hi < 0.0 {
        -hi
    } else {
        0.0
    })
}

pub fn summarize(rows: &[Value]) -> Value {
    let evaluated: Vec<&Value> = rows.iter().filter(|r| r.get("error").is_none()).collect();
    let best = evaluated
        .iter()
        .filter_map(|r| Some((abs_lo(r)?, *r)))
        .max_by(|a, b| a.0.total_cmp(&b.0))
        .map(|(_, r)| json!({"y": r["y"], "h_lo": r["h_lo"], "h_hi": r["h_hi"], "hit": r["hit"]}));
    // the smallest refined exponent among the hits is the best bound
    let best_bound = evaluated
        .iter()
        .filter(|r| r["hit"] == true)
        .filter_map(|r| Some((r["bound_refined"].as_str()?.parse::<f64>().ok()?, *r)))
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .map(|(_, r)| {
            json!({
                "y": r["y"],
                "bound_simple": r["bound_simple"],
                "bound_refined": r["bound_refined"],
                "bound_widened": r["bound_widened"],
            })
        });
    json!({
        "candidates": rows.len(),
        "evaluated": evaluated.len(),
        "errors": rows.len() - evaluated.len(),
        "hits": evaluated.iter().filter(|r| r["hit"] == true).count(),
        "best": best,
        "best_bound": best_bound,
    })
}

pub fn summary_text(summary: &Value) -> String {
    let mut s = format!(
        "candidates {}  evaluated {}  errors {}  hits {}\n",
        summary["candidates"], summary["evaluated"], summary["errors"], summary["hits"]
    );
    if let Some(b) = summary.get("best").filter(|b| !b.is_null()) {
        s.push_str(&format!(
            "largest |h|: y = {}  h in [{}, {}]\n",
            b["y"].as_str().unwrap_or("?"),
            b["h_lo"].as_str().unwrap_or("?"),
            b["h_hi"].as_str().unwrap_or("?")
        ));
    }
    if let Some(b) = summary.get("best_bound").filter(|b| !b.is_null()) {
        s.push_str(&format!(
            "counterexample below exp({}); refined exp({})\n",
            b["bound_simple"].as_str().unwrap_or("?"),
            b["bound_refined"].as_str().unwrap_or("?")
        ));
    }
    if let Some(r) = summary.get("rank_correlation").and_then(Value::as_str) {
        s.push_str(&format!("rank correlation of lattice and full sums: {r}\n"));
    }
    if let Some(r) = summary.get("incomplete").and_then(Value::as_str) {
        s.push_str(&format!("INCOMPLETE: {r}\n"));
    }
    s
}

pub fn report(ctx: &Ctx) -> anyhow::Result<String> {
    let rows = read_jsonl(&ctx.dir.path(REPORTS))?;
    let mut summary = summarize(&rows);
    let map = summary.as_object_mut().expect("object");
    if ctx.dir.exists(EVALUATION) {
        map.insert("rank_correlation".into(), ctx.dir.read_json(EVALUATION)?["rank_correlation"].clone());
    }
    if ctx.dir.exists(INCOMPLETE) {
        let reason = std::fs::read_to_string(ctx.dir.path(INCOMPLETE))?;
        map.insert("incomplete".into(), reason.trim().into());
    }
    let text = summary_text(&summary);
    ctx.dir.write_json(SUMMARY, summary)?;
    ctx.dir.write_text(SUMMARY_TEXT, &text)?;
    Ok(text)
}

/// A table of `h` at the given `y` values (no files written).
pub fn report_values(ctx: &Ctx, ds: &ZeroDataset, ys: &[String]) -> anyhow::Result<String> {
    let inputs: Vec<EvalInput> = ys
        .iter()
        .map(|y| EvalInput {
            y_text: y.clone(),
            index: None,
            dist_sq: None,
        })
        .collect();
    let mut s = format!("{:<40} {:>24} {:>24} {:>5} {}\n", "y", "h_lo", "h_hi", "hit", "y+sqrt(y)");
    for r in evaluate(ctx, ds, &inputs, None)? {
        let row = &r.row;
        let cell = |k: &str| row[k].as_str().map(|v| v.chars().take(24).collect::<String>()).unwrap_or_default();
        if let Some(e) = row.get("error") {
            s.push_str(&format!("{:<40} error: {}\n", row["y"].as_str().unwrap_or("?"), e));
            continue;
        }
        s.push_str(&format!(
            "{:<40} {:>24} {:>24} {:>5} {}\n",
            cell("y"),
            cell("h_lo"),
            cell("h_hi"),
            row["hit"],
            cell("bound_simple")
        ));
    }
    Ok(s)
}

fn unix_now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs())
}

/// Every stage in order. A failed stage leaves its predecessors' artifacts and
/// an `INCOMPLETE` marker behind.
pub fn run(ctx: &Ctx) -> Result<Status, StageFailure> {
    tagged(
        "run",
        ctx.dir.write_json(
            RUN_MANIFEST,
            json!({
                "version": env!("CARGO_PKG_VERSION"),
                "started_unix": unix_now(),
                "config": ctx.cfg.to_toml(),
            }),
        ),
    )?;
    tagged("run", ctx.dir.mark_incomplete("run in progress"))?;
    let result = run_stages(ctx);
    let marker = match &result {
        Ok(Status::Complete) => ctx.dir.clear_incomplete(),
        Ok(Status::Incomplete(reason)) => ctx.dir.mark_incomplete(reason),
        Err(f) => ctx.dir.mark_incomplete(&f.to_string()),
    };
    if let Err(e) = marker {
        warn!("could not update the INCOMPLETE marker: {e:#}");
    }
    if result.is_ok() {
        match report(ctx) {
            Ok(text) => print!("{text}"),
            Err(e) => return Err(StageFailure { stage: "report", error: e }),
        }
    }
    result
}

fn run_stages(ctx: &Ctx) -> Result<Status, StageFailure> {
    let ds = tagged("ingest", ingest(ctx))?;
    tagged("build", build(ctx, &ds))?;
    tagged("reduce", reduce(ctx, None, None))?;
    let status = tagged("enumerate", enumerate(ctx, &ds))?;
    tagged("evaluate", evaluate_stage(ctx, &ds, None))?;
    Ok(status)
}

use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use boxpress::basesearch::{candidate_set, omcop_translation, DefaultStripPacker, GridSpec};
use boxpress::gen::{random_hulls, skewed_boxes, uniform_boxes, GenKind};
use boxpress::model::Method;
use boxpress::slab::{self, RatioParamsSpec, SlabParams};
use boxpress::verify::{lower_bound, validate_packing, Certificate};
use boxpress::{Instance, PackingResult, Variant};
use rayon::prelude::*;

use crate::format::{read_instance, read_result, ConvexRecord, InstanceFile, ResultFile};
use crate::obj::{read_obj, validate_scene, write_obj};

/// A check that ran to completion but did not hold.
#[derive(Debug, thiserror::Error)]
pub enum Failure {
    #[error("certificate failed: volume {achieved} > {ratio} x lower bound {lower_bound}")]
    Certificate { achieved: f64, ratio: f64, lower_bound: f64 },
    #[error("result does not match instance: {0}")]
    FileMismatch(String),
    #[error("validation failed: {0}")]
    Invalid(String),
    #[error("{0}")]
    Bench(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    Slab,
    BaseSearch,
}

impl Algorithm {
    pub fn tag(self) -> &'static str {
        match self {
            Algorithm::Slab => "slab",
            Algorithm::BaseSearch => "basesearch",
        }
    }

    pub fn from_tag(s: &str) -> Option<Self> {
        match s {
            "slab" => Some(Algorithm::Slab),
            "basesearch" => Some(Algorithm::BaseSearch),
            _ => None,
        }
    }
}

pub fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

/// Writes to `out`, or stdout when absent.
pub fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("cannot write {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

#[derive(Debug, Clone)]
pub struct GenArgs {
    pub kind: GenKind,
    pub n: usize,
    pub seed: u64,
    pub lo: f64,
    pub hi: f64,
    pub max_aspect: f64,
    pub points: usize,
    pub variant: Option<Variant>,
}

pub fn cmd_gen(args: &GenArgs) -> Result<InstanceFile> {
    let (instance, default_variant) = match args.kind {
        GenKind::UniformBoxes => (Instance::Boxes(uniform_boxes(args.n, args.seed, args.lo, args.hi)?), Variant::Translation),
        GenKind::SkewedBoxes => (
            Instance::Boxes(skewed_boxes(args.n, args.seed, args.lo, args.hi, args.max_aspect)?),
            Variant::Translation,
        ),
        GenKind::RandomHulls => (
            Instance::Polyhedra(random_hulls(args.n, args.seed, args.lo, args.hi, args.points)?),
            Variant::RigidPolyhedra,
        ),
    };
    let variant = args.variant.unwrap_or(default_variant);
    if variant.is_polyhedra() != matches!(instance, Instance::Polyhedra(_)) {
        bail!(boxpress::Error::VariantMismatch(format!("{} items cannot carry variant {variant}", kind_name(&instance))));
    }
    Ok(InstanceFile { variant, instance })
}

fn kind_name(instance: &Instance) -> &'static str {
    match instance {
        Instance::Boxes(_) => "box",
        Instance::Polyhedra(_) => "polyhedron",
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct PackArgs {
    pub algorithm: Option<Algorithm>,
    pub variant: Option<Variant>,
    pub eps: Option<f64>,
    pub c: Option<f64>,
    pub alpha: Option<f64>,
}

pub fn cmd_pack(file: &InstanceFile, args: &PackArgs) -> Result<ResultFile> {
    let variant = args.variant.unwrap_or(file.variant);
    match args.algorithm.unwrap_or(Algorithm::Slab) {
        Algorithm::Slab => {
            if args.alpha.is_some() {
                bail!("--alpha applies to basesearch only");
            }
            let tuned = SlabParams::tuned(variant);
            let params = SlabParams::new(args.c.unwrap_or(tuned.c), args.eps.unwrap_or(tuned.eps))?;
            let result = slab::pack(&file.instance, variant, Some(params))?;
            let convex = match variant.convex_counterpart() {
                Some(_) => {
                    let cv = slab::convex_container_certificate(&result, &file.instance)?;
                    Some(ConvexRecord {
                        variant: cv.variant,
                        lower_bound: cv.lower_bound.lower_bound,
                        ratio: cv.claimed_ratio,
                        pass: cv.certificate.pass,
                    })
                }
                None => None,
            };
            Ok(ResultFile { result, convex })
        }
        Algorithm::BaseSearch => {
            if args.c.is_some() {
                bail!("--c applies to slab only");
            }
            let Instance::Boxes(boxes) = &file.instance else {
                bail!(boxpress::Error::VariantMismatch("basesearch packs boxes only".into()));
            };
            if variant != Variant::Translation {
                bail!(boxpress::Error::VariantMismatch(format!("basesearch is translation-only, not {variant}")));
            }
            let eps = args.eps.unwrap_or(1.0);
            let spec = match args.alpha {
                Some(a) => GridSpec::new(eps, a)?,
                None => GridSpec::with_default_alpha(eps)?,
            };
            let result = omcop_translation(boxes, &spec, &DefaultStripPacker::default())?;
            Ok(ResultFile { result, convex: None })
        }
    }
}

/// Error for certificate failures that should end the run with status 1.
pub fn certificate_failure(file: &ResultFile) -> Option<Failure> {
    let c = file.result.certificate;
    if !c.pass {
        return Some(Failure::Certificate { achieved: c.achieved, ratio: c.ratio, lower_bound: c.lower_bound });
    }
    let cv = file.convex?;
    (!cv.pass).then_some(Failure::Certificate {
        achieved: file.result.volume,
        ratio: cv.ratio,
        lower_bound: cv.lower_bound,
    })
}

fn same(a: f64, b: f64) -> bool {
    a == b || (a - b).abs() <= 1e-12 * a.abs().max(b.abs())
}

fn claimed_ratio(result: &PackingResult) -> f64 {
    match result.method {
        Method::Slab(p) => RatioParamsSpec::for_variant(result.variant).ratio(p),
        Method::BaseSearch(g) => g.claimed_ratio(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidateReport {
    pub lines: Vec<String>,
    pub failures: Vec<String>,
}

/// Re-checks a result against its instance from scratch: placements,
/// container volume, lower bound, claimed ratio and certificate verdicts.
pub fn cmd_validate(instance: &InstanceFile, file: &ResultFile) -> Result<ValidateReport> {
    let r = &file.result;
    let mut lines = Vec::new();
    let mut failures = Vec::new();

    let mut ids: Vec<_> = instance.instance.ids();
    let mut placed: Vec<_> = r.placements.iter().map(|p| p.id).collect();
    ids.sort();
    placed.sort();
    if ids != placed {
        bail!(Failure::FileMismatch(format!(
            "instance has {} items, result places {} and the id sets differ",
            ids.len(),
            placed.len()
        )));
    }
    if r.variant.is_polyhedra() != matches!(instance.instance, Instance::Polyhedra(_)) {
        bail!(Failure::FileMismatch(format!("{} result for a {} instance", r.variant, kind_name(&instance.instance))));
    }

    let report = validate_packing(r, &instance.instance)?;
    match &report.first_violation {
        None => lines.push(format!("placements: ok ({} items)", report.items)),
        Some(v) => failures.push(format!("placements: {v}")),
    }

    let volume = r.container.volume();
    if !same(volume, r.volume) {
        failures.push(format!("volume: file {} recomputed {volume}", r.volume));
    }
    let lb = lower_bound(&instance.instance, r.variant)?;
    if !same(lb.lower_bound, r.lower_bound.lower_bound) {
        failures.push(format!("lower bound: file {} recomputed {}", r.lower_bound.lower_bound, lb.lower_bound));
    }
    let ratio = claimed_ratio(r);
    if !same(ratio, r.claimed_ratio) {
        failures.push(format!("ratio: file {} recomputed {ratio}", r.claimed_ratio));
    }
    let cert = Certificate::new(volume, lb.lower_bound, ratio);
    if cert.pass != r.certificate.pass {
        failures.push(format!("certificate: file says {} recomputed {}", verdict(r.certificate.pass), verdict(cert.pass)));
    }
    if !cert.pass {
        failures.push(format!("certificate: volume {volume} > {ratio} x {}", lb.lower_bound));
    }
    lines.push(format!(
        "certificate: volume {volume:.6} <= {ratio:.4} x {:.6} ({}; empirical ratio {:.4})",
        lb.lower_bound,
        verdict(cert.pass),
        cert.empirical_ratio()
    ));

    if let Some(cv) = file.convex {
        let Some(variant) = r.variant.convex_counterpart() else {
            bail!(Failure::FileMismatch(format!("{} result carries a convex certificate", r.variant)));
        };
        let lb = lower_bound(&instance.instance, variant)?;
        let ratio = variant.published_ratio();
        let cert = Certificate::new(volume, lb.lower_bound, ratio);
        if cv.variant != variant || !same(cv.lower_bound, lb.lower_bound) || !same(cv.ratio, ratio) || cv.pass != cert.pass {
            failures.push(format!(
                "convex certificate: file {} {} {} {} recomputed {} {} {} {}",
                cv.variant,
                cv.lower_bound,
                cv.ratio,
                verdict(cv.pass),
                variant,
                lb.lower_bound,
                ratio,
                verdict(cert.pass)
            ));
        }
        if !cert.pass {
            failures.push(format!("convex certificate: volume {volume} > {ratio} x {}", lb.lower_bound));
        }
        lines.push(format!("convex certificate ({variant}): ratio {ratio} {}", verdict(cert.pass)));
    }

    if let Method::BaseSearch(spec) = r.method {
        let Instance::Boxes(boxes) = &instance.instance else { unreachable!("variant checked above") };
        let expected = candidate_set(boxes, &spec)?;
        let logged: Vec<_> = r.audit.iter().map(|a| a.base).collect();
        if logged != expected {
            failures.push(format!("audit: {} candidates logged, grid has {}", logged.len(), expected.len()));
        }
        let best = r.audit.iter().filter_map(|a| a.volume()).fold(f64::INFINITY, f64::min);
        if !same(best, r.volume) {
            failures.push(format!("audit: best logged volume {best}, result {}", r.volume));
        }
        lines.push(format!("audit: {} candidates, best volume {best:.6}", r.audit.len()));
    }

    Ok(ValidateReport { lines, failures })
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "pass"
    } else {
        "fail"
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub instance: String,
    pub variant: Variant,
    pub algorithm: Algorithm,
    pub eps: Option<f64>,
    pub items: usize,
    pub candidates: Option<usize>,
    pub volume: f64,
    pub lower_bound: f64,
    pub ratio: f64,
    pub bound: f64,
    pub millis: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchSummary {
    pub variant: Variant,
    pub algorithm: Algorithm,
    pub runs: usize,
    pub max_ratio: f64,
    pub mean_ratio: f64,
    pub bound: f64,
}

impl BenchSummary {
    pub fn within_bound(&self) -> bool {
        self.max_ratio <= self.bound * (1.0 + boxpress::geom3::REL_TOL)
    }
}

fn corpus_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .with_context(|| format!("cannot list {}", dir.display()))?
        .map(|e| e.map(|e| e.path()))
        .collect::<std::io::Result<_>>()?;
    files.retain(|p| p.is_file());
    files.sort();
    if files.is_empty() {
        bail!("empty corpus: no instance files in {}", dir.display());
    }
    Ok(files)
}

/// Runs every algorithm (and every grid `eps` for basesearch) on every
/// instance in `dir`. Rows are ordered by file name. Slab rows are measured
/// against the published constant of the variant, basesearch rows against
/// their claimed ratio.
pub fn cmd_bench(dir: &Path, algorithms: &[Algorithm], eps_list: &[f64]) -> Result<(Vec<BenchRow>, Vec<BenchSummary>)> {
    let files = corpus_files(dir)?;
    let instances: Vec<(String, InstanceFile)> = files
        .iter()
        .map(|p| {
            let name = p.file_name().map_or_else(|| p.display().to_string(), |n| n.to_string_lossy().into_owned());
            read_instance(&read_file(p)?).with_context(|| format!("in {}", p.display())).map(|f| (name, f))
        })
        .collect::<Result<_>>()?;

    let mut jobs: Vec<(usize, Algorithm, Option<f64>)> = Vec::new();
    for (i, (_, f)) in instances.iter().enumerate() {
        for &alg in algorithms {
            match alg {
                Algorithm::Slab => jobs.push((i, alg, None)),
                Algorithm::BaseSearch if f.variant == Variant::Translation => {
                    jobs.extend(eps_list.iter().map(|&e| (i, alg, Some(e))));
                }
                Algorithm::BaseSearch => {}
            }
        }
    }
    let rows: Vec<BenchRow> = jobs
        .par_iter()
        .map(|&(i, algorithm, eps)| {
            let (name, file) = &instances[i];
            let args = PackArgs { algorithm: Some(algorithm), eps, ..Default::default() };
            let start = Instant::now();
            let out = cmd_pack(file, &args).with_context(|| format!("packing {name}"))?;
            let millis = start.elapsed().as_secs_f64() * 1e3;
            let r = out.result;
            let (candidates, bound) = match r.method {
                Method::BaseSearch(spec) => (Some(r.audit.len()), spec.claimed_ratio()),
                Method::Slab(_) => (None, r.variant.published_ratio()),
            };
            Ok(BenchRow {
                instance: name.clone(),
                variant: r.variant,
                algorithm,
                eps,
                items: file.instance.len(),
                candidates,
                volume: r.volume,
                lower_bound: r.lower_bound.lower_bound,
                ratio: r.certificate.empirical_ratio(),
                bound,
                millis,
            })
        })
        .collect::<Result<_>>()?;

    let mut summaries: Vec<BenchSummary> = Vec::new();
    for row in &rows {
        match summaries.iter_mut().find(|s| s.variant == row.variant && s.algorithm == row.algorithm) {
            Some(s) => {
                s.runs += 1;
                s.max_ratio = s.max_ratio.max(row.ratio);
                s.mean_ratio += row.ratio;
                s.bound = s.bound.min(row.bound);
            }
            None => summaries.push(BenchSummary {
                variant: row.variant,
                algorithm: row.algorithm,
                runs: 1,
                max_ratio: row.ratio,
                mean_ratio: row.ratio,
                bound: row.bound,
            }),
        }
    }
    for s in &mut summaries {
        s.mean_ratio /= s.runs as f64;
    }
    Ok((rows, summaries))
}

pub fn bench_table(rows: &[BenchRow], summaries: &[BenchSummary]) -> String {
    let mut out = format!(
        "{:<24} {:<16} {:<10} {:>6} {:>7} {:>6} {:>14} {:>14} {:>8} {:>8} {:>10}\n",
        "instance", "variant", "algorithm", "eps", "n", "|S|", "volume", "LB", "ratio", "bound", "ms"
    );
    for r in rows {
        out.push_str(&format!(
            "{:<24} {:<16} {:<10} {:>6} {:>7} {:>6} {:>14.6} {:>14.6} {:>8.4} {:>8.4} {:>10.2}\n",
            r.instance,
            r.variant.tag(),
            r.algorithm.tag(),
            r.eps.map_or("-".into(), |e| format!("{e}")),
            r.items,
            r.candidates.map_or("-".into(), |c| c.to_string()),
            r.volume,
            r.lower_bound,
            r.ratio,
            r.bound,
            r.millis
        ));
    }
    out.push('\n');
    for s in summaries {
        out.push_str(&format!(
            "{} {}: {} runs, max ratio {:.4}, mean ratio {:.4}, bound {:.4}: {}\n",
            s.variant.tag(),
            s.algorithm.tag(),
            s.runs,
            s.max_ratio,
            s.mean_ratio,
            s.bound,
            if s.within_bound() { "ok" } else { "EXCEEDED" }
        ));
    }
    out
}

pub fn write_bench_csv(path: &Path, rows: &[BenchRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("cannot write {}", path.display()))?;
    w.write_record(["instance", "variant", "algorithm", "eps", "n", "candidates", "volume", "lower_bound", "ratio", "bound", "millis"])?;
    for r in rows {
        w.write_record([
            r.instance.clone(),
            r.variant.tag().to_string(),
            r.algorithm.tag().to_string(),
            r.eps.map_or(String::new(), |e| e.to_string()),
            r.items.to_string(),
            r.candidates.map_or(String::new(), |c| c.to_string()),
            r.volume.to_string(),
            r.lower_bound.to_string(),
            r.ratio.to_string(),
            r.bound.to_string(),
            r.millis.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Exports a result as OBJ, then reads the text back and re-validates the
/// exported geometry.
pub fn cmd_export(instance: &InstanceFile, file: &ResultFile) -> Result<String> {
    let text = write_obj(&file.result, &instance.instance)?;
    let scene = read_obj(&text)?;
    if let Some(v) = validate_scene(&scene, &instance.instance)? {
        bail!(Failure::Invalid(v.to_string()));
    }
    Ok(text)
}

pub fn load_instance(path: &Path) -> Result<InstanceFile> {
    read_instance(&read_file(path)?).with_context(|| format!("in {}", path.display()))
}

pub fn load_result(path: &Path) -> Result<ResultFile> {
    read_result(&read_file(path)?).with_context(|| format!("in {}", path.display()))
}

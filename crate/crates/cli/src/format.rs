//! Line-oriented text formats for instances and results.
//!
//! Every file starts with a `boxpress-instance 1` or `boxpress-result 1`
//! header. Reals are written with 17 significant digits so a read-back
//! reproduces the exact bits.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::str::FromStr;

use anyhow::{anyhow, bail, ensure, Context, Result};
use boxpress::basesearch::{CandidateAudit, CandidateBase, CandidateOutcome, GridSpec};
use boxpress::geom3::Point3;
use boxpress::model::Method;
use boxpress::slab::SlabParams;
use boxpress::verify::{Certificate, LowerBoundReport};
use boxpress::{BoxItem, Container, Instance, ItemId, PackingResult, Placement, PolyItem, Variant};
use nalgebra::{Matrix3, Vector3};

pub const INSTANCE_HEADER: &str = "boxpress-instance";
pub const RESULT_HEADER: &str = "boxpress-result";
pub const FORMAT_VERSION: u32 = 1;

/// 17 significant digits.
pub fn real(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone, PartialEq)]
pub struct InstanceFile {
    pub variant: Variant,
    pub instance: Instance,
}

/// Convex-container re-certification stored next to a rigid result.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvexRecord {
    pub variant: Variant,
    pub lower_bound: f64,
    pub ratio: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultFile {
    pub result: PackingResult,
    pub convex: Option<ConvexRecord>,
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    line: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Self { inner: text.lines().enumerate(), line: 0 }
    }

    /// Next non-blank, non-comment line split into fields.
    fn next_fields(&mut self) -> Option<Vec<&'a str>> {
        for (i, l) in self.inner.by_ref() {
            let l = l.trim();
            if l.is_empty() || l.starts_with('#') {
                continue;
            }
            self.line = i + 1;
            return Some(l.split_whitespace().collect());
        }
        None
    }

    fn expect(&mut self, key: &str) -> Result<Vec<&'a str>> {
        let f = self.next_fields().ok_or_else(|| anyhow!("unexpected end of file, expected `{key}`"))?;
        ensure!(f[0] == key, "line {}: expected `{key}`, found `{}`", self.line, f[0]);
        Ok(f)
    }
}

fn parse<T: FromStr>(s: &str, line: usize) -> Result<T>
where
    T::Err: std::error::Error + Send + Sync + 'static,
{
    s.parse::<T>().with_context(|| format!("line {line}: cannot parse `{s}`"))
}

fn parse_reals(fields: &[&str], line: usize) -> Result<Vec<f64>> {
    fields.iter().map(|s| parse::<f64>(s, line)).collect()
}

fn arity(fields: &[&str], n: usize, line: usize) -> Result<()> {
    ensure!(fields.len() == n, "line {line}: `{}` takes {} values, found {}", fields[0], n - 1, fields.len() - 1);
    Ok(())
}

fn header(lines: &mut Lines<'_>, expected: &str) -> Result<()> {
    let f = lines.next_fields().ok_or_else(|| anyhow!("empty file"))?;
    ensure!(f.len() == 2 && f[0] == expected, "not a {expected} file");
    let version: u32 = parse(f[1], lines.line)?;
    ensure!(version == FORMAT_VERSION, "unsupported format version {version}");
    Ok(())
}

fn variant_field(lines: &mut Lines<'_>) -> Result<Variant> {
    let f = lines.expect("variant")?;
    arity(&f, 2, lines.line)?;
    Variant::from_tag(f[1]).ok_or_else(|| anyhow!("line {}: unknown variant `{}`", lines.line, f[1]))
}

pub fn write_instance(file: &InstanceFile) -> String {
    let mut out = String::new();
    writeln!(out, "{INSTANCE_HEADER} {FORMAT_VERSION}").unwrap();
    writeln!(out, "variant {}", file.variant.tag()).unwrap();
    match &file.instance {
        Instance::Boxes(boxes) => {
            writeln!(out, "boxes {}", boxes.len()).unwrap();
            for b in boxes {
                writeln!(out, "box {} {} {} {}", b.id.0, real(b.h), real(b.w), real(b.d)).unwrap();
            }
        }
        Instance::Polyhedra(polys) => {
            writeln!(out, "polyhedra {}", polys.len()).unwrap();
            for p in polys {
                writeln!(out, "poly {} {}", p.id.0, p.vertices.len()).unwrap();
                for v in &p.vertices {
                    writeln!(out, "v {} {} {}", real(v.x), real(v.y), real(v.z)).unwrap();
                }
            }
        }
    }
    out
}

pub fn read_instance(text: &str) -> Result<InstanceFile> {
    let mut lines = Lines::new(text);
    header(&mut lines, INSTANCE_HEADER)?;
    let variant = variant_field(&mut lines)?;
    let kind = lines.next_fields().ok_or_else(|| anyhow!("missing item section"))?;
    arity(&kind, 2, lines.line)?;
    let count: usize = parse(kind[1], lines.line)?;
    let mut ids = HashSet::new();
    let mut check_id = |id: u64, line: usize| -> Result<ItemId> {
        ensure!(ids.insert(id), "line {line}: duplicate item id {id}");
        Ok(ItemId(id))
    };
    let instance = match kind[0] {
        "boxes" => {
            let mut boxes = Vec::with_capacity(count);
            for _ in 0..count {
                let f = lines.expect("box")?;
                arity(&f, 5, lines.line)?;
                let id = check_id(parse(f[1], lines.line)?, lines.line)?;
                let d = parse_reals(&f[2..], lines.line)?;
                ensure!(d.iter().all(|&x| x > 0.0 && x.is_finite()), "line {}: dimensions must be positive", lines.line);
                boxes.push(BoxItem { id, h: d[0], w: d[1], d: d[2] });
            }
            ensure!(!variant.is_polyhedra(), "box instance declares variant {}", variant.tag());
            Instance::Boxes(boxes)
        }
        "polyhedra" => {
            let mut polys = Vec::with_capacity(count);
            for _ in 0..count {
                let f = lines.expect("poly")?;
                arity(&f, 3, lines.line)?;
                let id = check_id(parse(f[1], lines.line)?, lines.line)?;
                let k: usize = parse(f[2], lines.line)?;
                ensure!(k >= 4, "line {}: a polyhedron needs at least 4 vertices", lines.line);
                let mut vertices = Vec::with_capacity(k);
                for _ in 0..k {
                    let v = lines.expect("v")?;
                    arity(&v, 4, lines.line)?;
                    let c = parse_reals(&v[1..], lines.line)?;
                    vertices.push(Point3::new(c[0], c[1], c[2]));
                }
                polys.push(PolyItem { id, vertices });
            }
            ensure!(variant.is_polyhedra(), "polyhedra instance declares variant {}", variant.tag());
            Instance::Polyhedra(polys)
        }
        other => bail!("line {}: unknown item section `{other}`", lines.line),
    };
    ensure!(lines.next_fields().is_none(), "line {}: trailing content", lines.line);
    Ok(InstanceFile { variant, instance })
}

pub fn write_result(file: &ResultFile) -> String {
    let r = &file.result;
    let mut out = String::new();
    writeln!(out, "{RESULT_HEADER} {FORMAT_VERSION}").unwrap();
    writeln!(out, "variant {}", r.variant.tag()).unwrap();
    match r.method {
        Method::Slab(p) => writeln!(out, "method slab {} {}", real(p.c), real(p.eps)).unwrap(),
        Method::BaseSearch(g) => writeln!(out, "method basesearch {} {}", real(g.eps), real(g.alpha)).unwrap(),
    }
    let c = r.container;
    writeln!(out, "container {} {} {}", real(c.height), real(c.width), real(c.depth)).unwrap();
    writeln!(out, "volume {}", real(r.volume)).unwrap();
    let lb = r.lower_bound;
    writeln!(
        out,
        "lower-bound {} {} {} {}",
        real(lb.sum_volume),
        real(lb.extent_product),
        real(lb.divisor),
        real(lb.lower_bound)
    )
    .unwrap();
    writeln!(out, "ratio {}", real(r.claimed_ratio)).unwrap();
    writeln!(out, "certificate {}", verdict(r.certificate.pass)).unwrap();
    if let Some(cv) = file.convex {
        writeln!(
            out,
            "convex-certificate {} {} {} {}",
            cv.variant.tag(),
            real(cv.lower_bound),
            real(cv.ratio),
            verdict(cv.pass)
        )
        .unwrap();
    }
    writeln!(out, "placements {}", r.placements.len()).unwrap();
    for p in &r.placements {
        let rot: Vec<String> = (0..3).flat_map(|i| (0..3).map(move |j| (i, j))).map(|(i, j)| real(p.rotation[(i, j)])).collect();
        let t = &p.translation;
        writeln!(out, "place {} {} {} {} {}", p.id.0, rot.join(" "), real(t.x), real(t.y), real(t.z)).unwrap();
    }
    writeln!(out, "audit {}", r.audit.len()).unwrap();
    for a in &r.audit {
        let base = format!("{} {}", real(a.base.width), real(a.base.depth));
        match &a.outcome {
            CandidateOutcome::Packed { height, volume } => {
                writeln!(out, "candidate {base} packed {} {}", real(*height), real(*volume)).unwrap()
            }
            CandidateOutcome::Failed(msg) => {
                writeln!(out, "candidate {base} failed {}", msg.replace(['\n', '\r'], " ")).unwrap()
            }
        }
    }
    out
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "pass"
    } else {
        "fail"
    }
}

fn parse_verdict(s: &str, line: usize) -> Result<bool> {
    match s {
        "pass" => Ok(true),
        "fail" => Ok(false),
        _ => bail!("line {line}: expected pass or fail, found `{s}`"),
    }
}

pub fn read_result(text: &str) -> Result<ResultFile> {
    let mut lines = Lines::new(text);
    header(&mut lines, RESULT_HEADER)?;
    let variant = variant_field(&mut lines)?;

    let m = lines.expect("method")?;
    arity(&m, 4, lines.line)?;
    let (a, b) = (parse::<f64>(m[2], lines.line)?, parse::<f64>(m[3], lines.line)?);
    let method = match m[1] {
        "slab" => Method::Slab(SlabParams { c: a, eps: b }),
        "basesearch" => Method::BaseSearch(GridSpec { eps: a, alpha: b }),
        other => bail!("line {}: unknown method `{other}`", lines.line),
    };

    let f = lines.expect("container")?;
    arity(&f, 4, lines.line)?;
    let c = parse_reals(&f[1..], lines.line)?;
    let container = Container { height: c[0], width: c[1], depth: c[2] };

    let f = lines.expect("volume")?;
    arity(&f, 2, lines.line)?;
    let volume = parse(f[1], lines.line)?;

    let f = lines.expect("lower-bound")?;
    arity(&f, 5, lines.line)?;
    let l = parse_reals(&f[1..], lines.line)?;
    let lower_bound = LowerBoundReport { sum_volume: l[0], extent_product: l[1], divisor: l[2], lower_bound: l[3] };

    let f = lines.expect("ratio")?;
    arity(&f, 2, lines.line)?;
    let claimed_ratio: f64 = parse(f[1], lines.line)?;

    let f = lines.expect("certificate")?;
    arity(&f, 2, lines.line)?;
    let pass = parse_verdict(f[1], lines.line)?;
    let certificate = Certificate { achieved: volume, lower_bound: lower_bound.lower_bound, ratio: claimed_ratio, pass };

    let mut f = lines.next_fields().ok_or_else(|| anyhow!("missing placements"))?;
    let mut convex = None;
    if f[0] == "convex-certificate" {
        arity(&f, 5, lines.line)?;
        let cv = Variant::from_tag(f[1]).ok_or_else(|| anyhow!("line {}: unknown variant `{}`", lines.line, f[1]))?;
        convex = Some(ConvexRecord {
            variant: cv,
            lower_bound: parse(f[2], lines.line)?,
            ratio: parse(f[3], lines.line)?,
            pass: parse_verdict(f[4], lines.line)?,
        });
        f = lines.next_fields().ok_or_else(|| anyhow!("missing placements"))?;
    }
    ensure!(f[0] == "placements", "line {}: expected `placements`", lines.line);
    arity(&f, 2, lines.line)?;
    let n: usize = parse(f[1], lines.line)?;
    let mut placements = Vec::with_capacity(n);
    for _ in 0..n {
        let f = lines.expect("place")?;
        arity(&f, 14, lines.line)?;
        let id = ItemId(parse(f[1], lines.line)?);
        let v = parse_reals(&f[2..], lines.line)?;
        placements.push(Placement {
            id,
            rotation: Matrix3::from_row_slice(&v[..9]),
            translation: Vector3::new(v[9], v[10], v[11]),
        });
    }

    let f = lines.expect("audit")?;
    arity(&f, 2, lines.line)?;
    let n: usize = parse(f[1], lines.line)?;
    let mut audit = Vec::with_capacity(n);
    for _ in 0..n {
        let f = lines.expect("candidate")?;
        ensure!(f.len() >= 4, "line {}: truncated candidate", lines.line);
        let base = CandidateBase { width: parse(f[1], lines.line)?, depth: parse(f[2], lines.line)? };
        let outcome = match f[3] {
            "packed" => {
                arity(&f, 6, lines.line)?;
                CandidateOutcome::Packed { height: parse(f[4], lines.line)?, volume: parse(f[5], lines.line)? }
            }
            "failed" => CandidateOutcome::Failed(f[4..].join(" ")),
            other => bail!("line {}: unknown candidate outcome `{other}`", lines.line),
        };
        audit.push(CandidateAudit { base, outcome });
    }
    ensure!(lines.next_fields().is_none(), "line {}: trailing content", lines.line);

    Ok(ResultFile {
        result: PackingResult {
            variant,
            method,
            container,
            placements,
            volume,
            lower_bound,
            claimed_ratio,
            certificate,
            audit,
        },
        convex,
    })
}

//! Text formats read and written by the CLI. Every writer here has a reader
//! that parses its output back to an equal value.

use std::fmt;

use serde::{Deserialize, Serialize};
use topokit::format::format_float;
use topokit::geometry::{PointCloud, Simplex};
use topokit::lpvi::LpviReport;
use topokit::optimizer::ToyProblem;
use topokit::persistence::PersistenceDiagram;
use topokit::persloss::{Image, PersLossGradient, PersLossValue};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    /// 1-based line, 0 when the problem concerns the whole input.
    pub line: usize,
    pub msg: String,
}

impl ParseError {
    fn at(line: usize, msg: impl Into<String>) -> Self {
        Self { line, msg: msg.into() }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line == 0 {
            write!(f, "{}", self.msg)
        } else {
            write!(f, "line {}: {}", self.line, self.msg)
        }
    }
}

impl std::error::Error for ParseError {}

type Parsed<T> = Result<T, ParseError>;

fn number(tok: &str, line: usize) -> Parsed<f64> {
    tok.parse::<f64>().map_err(|_| ParseError::at(line, format!("not a number: {tok:?}")))
}

fn integer(tok: &str, line: usize) -> Parsed<usize> {
    tok.parse::<usize>().map_err(|_| ParseError::at(line, format!("not a non-negative integer: {tok:?}")))
}

/// Non-empty lines with `#` comments removed, numbered from 1.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("").trim();
        (!l.is_empty()).then_some((i + 1, l))
    })
}

/// A cloud read from XYZ, with the optional fourth column.
#[derive(Debug, Clone, PartialEq)]
pub struct Xyz {
    pub cloud: PointCloud,
    pub flags: Option<Vec<u8>>,
}

/// Whitespace-separated rows of 2 (planar), 3, or 3 + flag columns. All
/// rows must have the same width.
pub fn parse_xyz(text: &str) -> Parsed<Xyz> {
    let mut width = None;
    let mut points = Vec::new();
    let mut flags = Vec::new();
    for (line, l) in content_lines(text) {
        let toks: Vec<&str> = l.split_whitespace().collect();
        let w = *width.get_or_insert(toks.len());
        if toks.len() != w {
            return Err(ParseError::at(line, format!("expected {w} columns, found {}", toks.len())));
        }
        if !(2..=4).contains(&w) {
            return Err(ParseError::at(line, format!("expected 2 to 4 columns, found {w}")));
        }
        let coords = toks[..w.min(3)].iter().map(|t| number(t, line)).collect::<Parsed<Vec<f64>>>()?;
        points.push([coords[0], coords[1], coords.get(2).copied().unwrap_or(0.0)]);
        if w == 4 {
            match toks[3] {
                "0" => flags.push(0),
                "1" => flags.push(1),
                t => return Err(ParseError::at(line, format!("flag must be 0 or 1, found {t:?}"))),
            }
        }
    }
    let Some(w) = width else {
        return Err(ParseError::at(0, "no points"));
    };
    let cloud = PointCloud::new(if w == 2 { 2 } else { 3 }, points).map_err(|e| ParseError::at(0, e.to_string()))?;
    Ok(Xyz { cloud, flags: (w == 4).then_some(flags) })
}

pub fn write_xyz(cloud: &PointCloud, flags: Option<&[u8]>) -> String {
    let mut out = String::new();
    for (i, p) in cloud.points().iter().enumerate() {
        let cols: Vec<String> = p[..cloud.dim()].iter().map(|&c| format_float(c)).collect();
        out.push_str(&cols.join(" "));
        if let Some(f) = flags {
            out.push(' ');
            out.push_str(&f[i].to_string());
        }
        out.push('\n');
    }
    out
}

/// ASCII PLY, vertex coordinates only. Properties other than `x`, `y`, `z`
/// and elements other than `vertex` are skipped. Without a `z` property the
/// cloud is planar.
pub fn parse_ply(text: &str) -> Parsed<PointCloud> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    match lines.next() {
        Some((_, "ply")) => {}
        _ => return Err(ParseError::at(1, "missing 'ply' magic")),
    }
    // (name, count, property names)
    let mut elements: Vec<(String, usize, Vec<String>)> = Vec::new();
    let mut ascii = false;
    loop {
        let Some((line, l)) = lines.next() else {
            return Err(ParseError::at(0, "header has no end_header"));
        };
        let toks: Vec<&str> = l.split_whitespace().collect();
        match toks.as_slice() {
            ["end_header"] => break,
            ["format", "ascii", _] => ascii = true,
            ["format", ..] => return Err(ParseError::at(line, "only ascii PLY is supported")),
            ["comment", ..] | ["obj_info", ..] | [] => {}
            ["element", name, count] => elements.push((name.to_string(), integer(count, line)?, Vec::new())),
            ["property", "list", ..] => match elements.last_mut() {
                Some((name, ..)) if name == "vertex" => {
                    return Err(ParseError::at(line, "list properties on vertices are not supported"))
                }
                Some((_, _, props)) => props.push(String::new()),
                None => return Err(ParseError::at(line, "property before any element")),
            },
            ["property", _, name] => match elements.last_mut() {
                Some((_, _, props)) => props.push(name.to_string()),
                None => return Err(ParseError::at(line, "property before any element")),
            },
            _ => return Err(ParseError::at(line, format!("unrecognised header line {l:?}"))),
        }
    }
    if !ascii {
        return Err(ParseError::at(0, "missing format line"));
    }
    let mut points = None;
    let mut planar = false;
    for (name, count, props) in &elements {
        if name != "vertex" {
            for _ in 0..*count {
                lines.next().ok_or_else(|| ParseError::at(0, format!("truncated {name} element")))?;
            }
            continue;
        }
        let find = |axis: &str| props.iter().position(|p| p == axis);
        let (Some(ix), Some(iy)) = (find("x"), find("y")) else {
            return Err(ParseError::at(0, "vertex element needs x and y properties"));
        };
        let iz = find("z");
        planar = iz.is_none();
        let mut pts = Vec::with_capacity(*count);
        for _ in 0..*count {
            let (line, l) = lines.next().ok_or_else(|| ParseError::at(0, "truncated vertex element"))?;
            let toks: Vec<&str> = l.split_whitespace().collect();
            if toks.len() != props.len() {
                return Err(ParseError::at(line, format!("expected {} values, found {}", props.len(), toks.len())));
            }
            let z = match iz {
                Some(i) => number(toks[i], line)?,
                None => 0.0,
            };
            pts.push([number(toks[ix], line)?, number(toks[iy], line)?, z]);
        }
        points = Some(pts);
    }
    let points = points.ok_or_else(|| ParseError::at(0, "no vertex element"))?;
    if points.is_empty() {
        return Err(ParseError::at(0, "no points"));
    }
    PointCloud::new(if planar { 2 } else { 3 }, points).map_err(|e| ParseError::at(0, e.to_string()))
}

/// PLY if the text starts with the `ply` magic, XYZ otherwise.
pub fn parse_cloud(text: &str) -> Parsed<PointCloud> {
    if text.trim_start().starts_with("ply") {
        parse_ply(text)
    } else {
        parse_xyz(text).map(|x| x.cloud)
    }
}

/// Plain PPM (`P3`). Channels are divided by the declared maximum.
pub fn parse_ppm(text: &str) -> Parsed<Image> {
    let mut toks = content_lines(text).flat_map(|(line, l)| l.split_whitespace().map(move |t| (line, t)));
    match toks.next() {
        Some((_, "P3")) => {}
        Some((line, t)) => return Err(ParseError::at(line, format!("expected P3, found {t:?}"))),
        None => return Err(ParseError::at(0, "empty image")),
    }
    let mut header = [0usize; 3];
    for h in &mut header {
        let (line, t) = toks.next().ok_or_else(|| ParseError::at(0, "truncated header"))?;
        *h = integer(t, line)?;
    }
    let [width, height, maxval] = header;
    if width == 0 || height == 0 || maxval == 0 || maxval > 65535 {
        return Err(ParseError::at(0, format!("bad header {width} × {height}, max {maxval}")));
    }
    let mut pixels = Vec::with_capacity(width * height);
    for _ in 0..width * height {
        let mut px = [0.0; 3];
        for c in &mut px {
            let (line, t) = toks.next().ok_or_else(|| ParseError::at(0, "truncated pixel data"))?;
            let v = integer(t, line)?;
            if v > maxval {
                return Err(ParseError::at(line, format!("sample {v} exceeds maximum {maxval}")));
            }
            *c = v as f64 / maxval as f64;
        }
        pixels.push(px);
    }
    if let Some((line, _)) = toks.next() {
        return Err(ParseError::at(line, "trailing data after pixels"));
    }
    Image::new(height, width, pixels).map_err(|e| ParseError::at(0, e.to_string()))
}

/// Writes samples rounded to the nearest multiple of `1/maxval`, one image
/// row per line.
pub fn write_ppm(img: &Image, maxval: u16) -> String {
    let mut out = format!("P3\n{} {}\n{}\n", img.width(), img.height(), maxval);
    for r in 0..img.height() {
        let row: Vec<String> = (0..img.width())
            .flat_map(|c| img.pixel(r, c))
            .map(|v| ((v * maxval as f64).round() as u32).to_string())
            .collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

pub const DIAGRAM_HEADER: &str = "dim,birth,death";

/// Pairs sorted by `(dim, birth, death)`; essential bars die at `inf`.
pub fn write_diagram_csv(d: &PersistenceDiagram) -> String {
    let mut out = format!("{DIAGRAM_HEADER}\n");
    for (dim, b, e) in d.sorted_triples() {
        out.push_str(&format!("{dim},{},{}\n", format_float(b), format_float(e)));
    }
    out
}

fn csv_rows<'a>(text: &'a str, header: &str) -> Parsed<impl Iterator<Item = (usize, Vec<&'a str>)>> {
    let mut rows = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'));
    match rows.next() {
        Some((_, h)) if h.trim() == header => {}
        Some((i, h)) => return Err(ParseError::at(i + 1, format!("expected header {header:?}, found {h:?}"))),
        None => return Err(ParseError::at(0, "empty file")),
    }
    Ok(rows.map(|(i, l)| (i + 1, l.trim().split(',').collect())))
}

pub fn parse_diagram_csv(text: &str) -> Parsed<PersistenceDiagram> {
    let mut triples = Vec::new();
    for (line, cells) in csv_rows(text, DIAGRAM_HEADER)? {
        let [dim, b, d] = cells[..] else {
            return Err(ParseError::at(line, "expected 3 columns"));
        };
        triples.push((integer(dim, line)?, number(b, line)?, number(d, line)?));
    }
    Ok(PersistenceDiagram::from_triples(&triples))
}

/// One line per image row, three values per pixel.
pub fn write_gradient_csv(g: &PersLossGradient) -> String {
    let mut out = String::new();
    for r in 0..g.height {
        let row: Vec<String> = (0..g.width).flat_map(|c| g.get(r, c)).map(format_float).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn parse_gradient_csv(text: &str) -> Parsed<PersLossGradient> {
    let mut width = None;
    let mut d_pixels = Vec::new();
    let mut height = 0;
    for (i, l) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let vals = l.trim().split(',').map(|t| number(t, i + 1)).collect::<Parsed<Vec<f64>>>()?;
        let w = *width.get_or_insert(vals.len());
        if vals.len() != w || w % 3 != 0 {
            return Err(ParseError::at(i + 1, format!("row has {} values", vals.len())));
        }
        d_pixels.extend(vals.chunks(3).map(|c| [c[0], c[1], c[2]]));
        height += 1;
    }
    let width = width.ok_or_else(|| ParseError::at(0, "empty gradient"))? / 3;
    Ok(PersLossGradient { height, width, d_pixels })
}

/// Bar pairing of one rank, as exported.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairRecord {
    pub dim: usize,
    pub rendered: Option<[f64; 2]>,
    pub gt: Option<[f64; 2]>,
    pub pred: [f64; 2],
    pub target: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PersLossReport {
    pub total: f64,
    pub per_dim_terms: [f64; 3],
    pub weights: [f64; 3],
    pub k: [usize; 3],
    pub max_points: usize,
    pub height: usize,
    pub width: usize,
    pub pairs: Vec<PairRecord>,
    pub gradient_nonzero_pixels: Option<usize>,
}

impl PersLossReport {
    pub fn new(
        v: &PersLossValue,
        k: [usize; 3],
        max_points: usize,
        img: &Image,
        grad: Option<&PersLossGradient>,
    ) -> Self {
        let pairs = v
            .matching
            .iter()
            .enumerate()
            .flat_map(|(dim, ps)| {
                ps.iter().map(move |p| PairRecord {
                    dim,
                    rendered: p.rendered.map(|b| [b.birth, b.death]),
                    gt: p.gt.map(|b| [b.birth, b.death]),
                    pred: [p.pred.0, p.pred.1],
                    target: [p.target.0, p.target.1],
                })
            })
            .collect();
        Self {
            total: v.total,
            per_dim_terms: v.per_dim_terms,
            weights: v.weights,
            k,
            max_points,
            height: img.height(),
            width: img.width(),
            pairs,
            gradient_nonzero_pixels: grad.map(|g| g.nonzero_pixels()),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report values are finite");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Parsed<Self> {
        serde_json::from_str(text).map_err(|e| ParseError::at(e.line(), e.to_string()))
    }
}

pub const LPVI_REPORT_HEADER: &str = "center,branch,neighbors,candidates,added,topo_diff";

/// One neighbourhood line of the LPVI report.
#[derive(Debug, Clone, PartialEq)]
pub struct LpviRow {
    pub center: usize,
    pub branch: String,
    pub neighbors: usize,
    pub candidates: usize,
    pub added: usize,
    pub topo_diff: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpviSummary {
    pub accepted_3d: usize,
    pub fallback_2d: usize,
    pub skipped: usize,
    pub points_added: usize,
    pub rows: Vec<LpviRow>,
}

impl From<&LpviReport> for LpviSummary {
    fn from(r: &LpviReport) -> Self {
        Self {
            accepted_3d: r.accepted_3d,
            fallback_2d: r.fallback_2d,
            skipped: r.skipped,
            points_added: r.points_added,
            rows: r
                .neighborhoods
                .iter()
                .map(|n| LpviRow {
                    center: n.center,
                    branch: n.branch.to_string(),
                    neighbors: n.neighbors.len(),
                    candidates: n.candidates.len(),
                    added: n.added.len(),
                    topo_diff: n.topo_diff,
                })
                .collect(),
        }
    }
}

/// A `# key=value` summary line, the header, then one row per
/// neighbourhood; `topo_diff` is empty when no 3D attempt was made.
pub fn write_lpvi_report(s: &LpviSummary) -> String {
    let mut out = format!(
        "# accepted_3d={} fallback_2d={} skipped={} points_added={}\n{LPVI_REPORT_HEADER}\n",
        s.accepted_3d, s.fallback_2d, s.skipped, s.points_added
    );
    for r in &s.rows {
        let td = r.topo_diff.map(format_float).unwrap_or_default();
        out.push_str(&format!("{},{},{},{},{},{td}\n", r.center, r.branch, r.neighbors, r.candidates, r.added));
    }
    out
}

pub fn parse_lpvi_report(text: &str) -> Parsed<LpviSummary> {
    let first = text.lines().next().unwrap_or("");
    let mut counts = [None; 4];
    let keys = ["accepted_3d", "fallback_2d", "skipped", "points_added"];
    for tok in first.strip_prefix('#').unwrap_or("").split_whitespace() {
        let (k, v) = tok.split_once('=').ok_or_else(|| ParseError::at(1, format!("bad summary item {tok:?}")))?;
        let i = keys.iter().position(|&x| x == k).ok_or_else(|| ParseError::at(1, format!("unknown key {k:?}")))?;
        counts[i] = Some(integer(v, 1)?);
    }
    let [Some(accepted_3d), Some(fallback_2d), Some(skipped), Some(points_added)] = counts else {
        return Err(ParseError::at(1, "incomplete summary line"));
    };
    let mut rows = Vec::new();
    for (line, cells) in csv_rows(text, LPVI_REPORT_HEADER)? {
        let [center, branch, neighbors, candidates, added, td] = cells[..] else {
            return Err(ParseError::at(line, "expected 6 columns"));
        };
        rows.push(LpviRow {
            center: integer(center, line)?,
            branch: branch.to_string(),
            neighbors: integer(neighbors, line)?,
            candidates: integer(candidates, line)?,
            added: integer(added, line)?,
            topo_diff: if td.is_empty() { None } else { Some(number(td, line)?) },
        });
    }
    Ok(LpviSummary { accepted_3d, fallback_2d, skipped, points_added, rows })
}

/// Problem files list, one per line: `vertices N`, `targets v0 … vN−1`,
/// `supv_weight S`, optionally `initial v0 … vN−1`, and any number of
/// `simplex a b …` lines. Every vertex is part of the complex even if no
/// simplex mentions it.
pub fn parse_problem(text: &str) -> Parsed<ToyProblem> {
    let mut n = None;
    let mut targets = None;
    let mut initial = None;
    let mut weight = None;
    let mut cells = Vec::new();
    let floats = |toks: &[&str], line| toks.iter().map(|t| number(t, line)).collect::<Parsed<Vec<f64>>>();
    for (line, l) in content_lines(text) {
        let toks: Vec<&str> = l.split_whitespace().collect();
        let once = |slot: bool, key: &str| {
            if slot {
                Err(ParseError::at(line, format!("duplicate {key} line")))
            } else {
                Ok(())
            }
        };
        match toks[0] {
            "vertices" if toks.len() == 2 => {
                once(n.is_some(), "vertices")?;
                n = Some(integer(toks[1], line)?);
            }
            "supv_weight" if toks.len() == 2 => {
                once(weight.is_some(), "supv_weight")?;
                weight = Some(number(toks[1], line)?);
            }
            "targets" => {
                once(targets.is_some(), "targets")?;
                targets = Some(floats(&toks[1..], line)?);
            }
            "initial" => {
                once(initial.is_some(), "initial")?;
                initial = Some(floats(&toks[1..], line)?);
            }
            "simplex" => {
                let v = toks[1..].iter().map(|t| integer(t, line)).collect::<Parsed<Vec<usize>>>()?;
                cells.push(Simplex::new(&v).map_err(|e| ParseError::at(line, e.to_string()))?);
            }
            k => return Err(ParseError::at(line, format!("unrecognised line starting with {k:?}"))),
        }
    }
    let n = n.ok_or_else(|| ParseError::at(0, "missing vertices line"))?;
    let targets = targets.ok_or_else(|| ParseError::at(0, "missing targets line"))?;
    let weight = weight.ok_or_else(|| ParseError::at(0, "missing supv_weight line"))?;
    if targets.len() != n {
        return Err(ParseError::at(0, format!("{} targets for {n} vertices", targets.len())));
    }
    if let Some(bad) = cells.iter().flat_map(|s| s.vertices()).find(|&&v| v >= n) {
        return Err(ParseError::at(0, format!("simplex uses vertex {bad} of {n}")));
    }
    cells.extend((0..n).map(Simplex::vertex));
    let p = ToyProblem::new(&cells, targets, weight).map_err(|e| ParseError::at(0, e.to_string()))?;
    match initial {
        Some(init) => p.with_initial(init).map_err(|e| ParseError::at(0, e.to_string())),
        None => Ok(p),
    }
}

fn join_floats(v: &[f64]) -> String {
    v.iter().map(|&x| format_float(x)).collect::<Vec<_>>().join(" ")
}

/// Writes every simplex of positive dimension of the (closed) complex.
pub fn write_problem(p: &ToyProblem) -> String {
    let mut out = format!("vertices {}\n", p.vertex_count());
    out.push_str(&format!("supv_weight {}\n", format_float(p.supv_weight())));
    out.push_str(&format!("targets {}\n", join_floats(p.targets())));
    if let Some(init) = p.initial() {
        out.push_str(&format!("initial {}\n", join_floats(init)));
    }
    for s in p.complex().iter().filter(|s| s.dim() > 0) {
        let v: Vec<String> = s.vertices().iter().map(|v| v.to_string()).collect();
        out.push_str(&format!("simplex {}\n", v.join(" ")));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn xyz_widths() {
        let x = parse_xyz("0 0\n1 0\n# comment\n\n1 1\n").unwrap();
        assert_eq!(x.cloud.dim(), 2);
        assert_eq!(x.cloud.len(), 3);
        let x = parse_xyz("0 0 0 0\n1 2 3 1\n").unwrap();
        assert_eq!(x.flags, Some(vec![0, 1]));
        assert_eq!(x.cloud.point(1), [1.0, 2.0, 3.0]);
        assert_eq!(parse_xyz("").unwrap_err().line, 0);
        assert_eq!(parse_xyz("0 0 0\n1 1\n").unwrap_err().line, 2);
        assert!(parse_xyz("0 0 0 2\n").is_err());
        assert!(parse_xyz("0 x 0\n").is_err());
        assert!(parse_xyz("0 nan 0\n").is_err());
    }

    #[test]
    fn ply_subset() {
        let text = "ply\nformat ascii 1.0\ncomment hi\nelement vertex 3\nproperty float x\nproperty float y\n\
                    property float z\nproperty uchar red\nelement face 1\nproperty list uchar int vertex_indices\n\
                    end_header\n0 0 0 255\n1 0 0 0\n0 1 0.5 3\n3 0 1 2\n";
        let c = parse_ply(text).unwrap();
        assert_eq!(c.points(), &[[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.5]]);
        assert_eq!(parse_cloud(text).unwrap(), c);
        let planar =
            "ply\nformat ascii 1.0\nelement vertex 2\nproperty double x\nproperty double y\nend_header\n1 2\n3 4\n";
        assert_eq!(parse_ply(planar).unwrap().dim(), 2);
        assert!(parse_ply("ply\nformat binary_little_endian 1.0\nend_header\n").is_err());
        assert!(parse_ply(
            "ply\nformat ascii 1.0\nelement vertex 2\nproperty float x\nproperty float y\nend_header\n1 2\n"
        )
        .is_err());
    }

    #[test]
    fn ppm_scaling() {
        let img = parse_ppm("P3\n# c\n2 1\n10\n0 5 10  9 7 3\n").unwrap();
        assert_eq!((img.height(), img.width()), (1, 2));
        assert_eq!(img.pixel(0, 0), [0.0, 0.5, 1.0]);
        assert_eq!(img.pixel(0, 1), [0.9, 0.7, 0.3]);
        assert_eq!(parse_ppm(&write_ppm(&img, 10)).unwrap(), img);
        assert!(parse_ppm("P3\n1 1\n10\n0 0 11\n").is_err());
        assert!(parse_ppm("P3\n1 1\n10\n0 0\n").is_err());
        assert!(parse_ppm("P6\n1 1\n10\n").is_err());
    }

    #[test]
    fn diagram_round_trip() {
        let d = PersistenceDiagram::from_triples(&[(1, 0.25, 0.5), (0, 0.0, f64::INFINITY), (0, 0.0, 0.5)]);
        let text = write_diagram_csv(&d);
        assert_eq!(text, "dim,birth,death\n0,0,0.5\n0,0,inf\n1,0.25,0.5\n");
        assert_eq!(parse_diagram_csv(&text).unwrap().sorted_triples(), d.sorted_triples());
    }

    #[test]
    fn problem_round_trip() {
        let text = "vertices 3\nsupv_weight 2\ntargets 0 0.5 1\nsimplex 0 1\nsimplex 1 2\n";
        let p = parse_problem(text).unwrap();
        assert_eq!(p.complex().len(), 5);
        assert_eq!(write_problem(&p), text);
        assert_eq!(parse_problem(&write_problem(&p)).unwrap(), p);
        assert!(parse_problem("vertices 2\nsupv_weight 1\ntargets 0\n").is_err());
        assert!(parse_problem("vertices 2\nsupv_weight 1\ntargets 0 1\nsimplex 0 2\n").is_err());
        assert!(parse_problem("vertices 1\nvertices 1\n").is_err());
    }

    #[test]
    fn lpvi_report_round_trip() {
        let s = LpviSummary {
            accepted_3d: 1,
            fallback_2d: 1,
            skipped: 0,
            points_added: 5,
            rows: vec![
                LpviRow {
                    center: 0,
                    branch: "3d".into(),
                    neighbors: 16,
                    candidates: 3,
                    added: 3,
                    topo_diff: Some(0.125),
                },
                LpviRow { center: 4, branch: "2d".into(), neighbors: 8, candidates: 2, added: 2, topo_diff: None },
            ],
        };
        let text = write_lpvi_report(&s);
        assert!(text.ends_with("4,2d,8,2,2,\n"));
        assert_eq!(parse_lpvi_report(&text).unwrap(), s);
    }
}

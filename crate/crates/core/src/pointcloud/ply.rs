//! PLY reader and writer.
//!
//! Reads `ascii` and `binary_little_endian` files. The `vertex` element must
//! carry `x`, `y`, `z`; labels come from an integer `label` property when
//! present, otherwise from `red`/`green`/`blue` through the palette (or, in
//! [`LabelMode::DistinctColors`], one label per distinct color). Other
//! elements and properties are skipped.

use std::collections::HashMap;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use super::palette::{color_to_label, label_to_color};
use super::{Labeling, Point3, PointCloud};
use crate::error::{Error, Result};

/// Output encoding for [`save_ply`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PlyFormat {
    #[default]
    Ascii,
    BinaryLittleEndian,
}

/// How RGB colors are turned into labels on load.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LabelMode {
    /// Invert the crate palette.
    #[default]
    Palette,
    /// Black is label 0; every other distinct color gets the next label
    /// (1, 2, ...) in order of first appearance.
    DistinctColors,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Scalar {
    I8,
    U8,
    I16,
    U16,
    I32,
    U32,
    F32,
    F64,
}

impl Scalar {
    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "char" | "int8" => Self::I8,
            "uchar" | "uint8" => Self::U8,
            "short" | "int16" => Self::I16,
            "ushort" | "uint16" => Self::U16,
            "int" | "int32" => Self::I32,
            "uint" | "uint32" => Self::U32,
            "float" | "float32" => Self::F32,
            "double" | "float64" => Self::F64,
            _ => return None,
        })
    }

    fn size(self) -> usize {
        match self {
            Self::I8 | Self::U8 => 1,
            Self::I16 | Self::U16 => 2,
            Self::I32 | Self::U32 | Self::F32 => 4,
            Self::F64 => 8,
        }
    }

    fn is_integer(self) -> bool {
        !matches!(self, Self::F32 | Self::F64)
    }

    fn read_le(self, b: &[u8]) -> f64 {
        match self {
            Self::I8 => f64::from(b[0] as i8),
            Self::U8 => f64::from(b[0]),
            Self::I16 => f64::from(i16::from_le_bytes([b[0], b[1]])),
            Self::U16 => f64::from(u16::from_le_bytes([b[0], b[1]])),
            Self::I32 => f64::from(i32::from_le_bytes([b[0], b[1], b[2], b[3]])),
            Self::U32 => f64::from(u32::from_le_bytes([b[0], b[1], b[2], b[3]])),
            Self::F32 => f64::from(f32::from_le_bytes([b[0], b[1], b[2], b[3]])),
            Self::F64 => f64::from_le_bytes(b[..8].try_into().unwrap()),
        }
    }
}

#[derive(Debug, Clone)]
enum PropKind {
    Scalar(Scalar),
    List { count: Scalar, item: Scalar },
}

#[derive(Debug, Clone)]
struct Property {
    name: String,
    kind: PropKind,
}

#[derive(Debug, Clone)]
struct Element {
    name: String,
    count: usize,
    props: Vec<Property>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Encoding {
    Ascii,
    BinaryLe,
}

struct Header {
    encoding: Encoding,
    elements: Vec<Element>,
    /// Byte offset of the body.
    body_start: usize,
    /// 1-based line number of the first body line.
    body_line: usize,
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::PlyParse {
        line,
        message: message.into(),
    }
}

fn parse_header(bytes: &[u8]) -> Result<Header> {
    let mut pos = 0;
    let mut line_no = 0;
    let mut encoding = None;
    let mut elements: Vec<Element> = Vec::new();

    loop {
        line_no += 1;
        let Some(rel) = bytes[pos..].iter().position(|&b| b == b'\n') else {
            return Err(parse_err(line_no, "header ended without end_header"));
        };
        let raw = &bytes[pos..pos + rel];
        pos += rel + 1;
        let line = std::str::from_utf8(raw)
            .map_err(|_| parse_err(line_no, "header is not valid text"))?
            .trim();
        let mut tok = line.split_whitespace();
        let keyword = tok.next().unwrap_or("");

        if line_no == 1 {
            if line != "ply" {
                return Err(parse_err(line_no, "missing 'ply' magic"));
            }
            continue;
        }
        match keyword {
            "" | "comment" | "obj_info" => {}
            "format" => {
                encoding = Some(match tok.next() {
                    Some("ascii") => Encoding::Ascii,
                    Some("binary_little_endian") => Encoding::BinaryLe,
                    Some(other) => return Err(parse_err(line_no, format!("unsupported format '{other}'"))),
                    None => return Err(parse_err(line_no, "format line without a format")),
                });
            }
            "element" => {
                let (Some(name), Some(count), None) = (tok.next(), tok.next(), tok.next()) else {
                    return Err(parse_err(line_no, format!("malformed element line '{line}'")));
                };
                let count = count
                    .parse()
                    .map_err(|_| parse_err(line_no, format!("bad element count '{count}'")))?;
                elements.push(Element {
                    name: name.to_string(),
                    count,
                    props: Vec::new(),
                });
            }
            "property" => {
                let Some(element) = elements.last_mut() else {
                    return Err(parse_err(line_no, "property before any element"));
                };
                let parts: Vec<&str> = tok.collect();
                let bad = || parse_err(line_no, format!("malformed property line '{line}'"));
                let prop = match parts.as_slice() {
                    ["list", count, item, name] => Property {
                        name: name.to_string(),
                        kind: PropKind::List {
                            count: Scalar::parse(count).filter(|s| s.is_integer()).ok_or_else(bad)?,
                            item: Scalar::parse(item).ok_or_else(bad)?,
                        },
                    },
                    [ty, name] => Property {
                        name: name.to_string(),
                        kind: PropKind::Scalar(Scalar::parse(ty).ok_or_else(bad)?),
                    },
                    _ => return Err(bad()),
                };
                element.props.push(prop);
            }
            "end_header" => break,
            other => return Err(parse_err(line_no, format!("unknown header keyword '{other}'"))),
        }
    }

    let encoding = encoding.ok_or_else(|| parse_err(line_no, "header has no format line"))?;
    Ok(Header {
        encoding,
        elements,
        body_start: pos,
        body_line: line_no + 1,
    })
}

/// Where the interesting vertex properties live.
struct VertexLayout {
    xyz: [usize; 3],
    label: Option<usize>,
    rgb: Option<[usize; 3]>,
}

impl VertexLayout {
    fn new(element: &Element, header_line: usize) -> Result<Self> {
        let find = |name: &str| {
            element
                .props
                .iter()
                .position(|p| p.name == name && matches!(p.kind, PropKind::Scalar(_)))
        };
        let mut xyz = [0; 3];
        for (slot, name) in xyz.iter_mut().zip(["x", "y", "z"]) {
            *slot = find(name)
                .ok_or_else(|| parse_err(header_line, format!("vertex element lacks scalar property '{name}'")))?;
        }
        let label = find("label").filter(|&i| match element.props[i].kind {
            PropKind::Scalar(s) => s.is_integer(),
            PropKind::List { .. } => false,
        });
        let rgb = match (find("red"), find("green"), find("blue")) {
            (Some(r), Some(g), Some(b)) => Some([r, g, b]),
            _ => None,
        };
        Ok(Self { xyz, label, rgb })
    }
}

/// Raw per-vertex values needed to build the cloud.
struct VertexRecord {
    xyz: [f64; 3],
    label: Option<f64>,
    rgb: Option<[f64; 3]>,
}

fn record_from(values: &[f64], layout: &VertexLayout) -> VertexRecord {
    VertexRecord {
        xyz: layout.xyz.map(|i| values[i]),
        label: layout.label.map(|i| values[i]),
        rgb: layout.rgb.map(|c| c.map(|i| values[i])),
    }
}

fn read_ascii<'a>(
    header: &Header,
    bytes: &[u8],
    layout_of: &dyn Fn(usize) -> Option<&'a VertexLayout>,
) -> Result<Vec<VertexRecord>> {
    let text = std::str::from_utf8(&bytes[header.body_start..])
        .map_err(|_| parse_err(header.body_line, "ascii body is not valid text"))?;
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (header.body_line + i, l))
        .filter(|(_, l)| !l.trim().is_empty());
    let mut out = Vec::new();

    for (ei, element) in header.elements.iter().enumerate() {
        let layout = layout_of(ei);
        for n in 0..element.count {
            let Some((line_no, line)) = lines.next() else {
                return match layout {
                    Some(_) => Err(Error::Truncated {
                        expected: element.count,
                        found: n,
                    }),
                    None => Err(parse_err(
                        header.body_line,
                        format!("body ends inside element '{}'", element.name),
                    )),
                };
            };
            let Some(layout) = layout else { continue };
            let mut tokens = line.split_whitespace();
            let mut values = Vec::with_capacity(element.props.len());
            for prop in &element.props {
                let mut next = || -> Result<f64> {
                    let t = tokens
                        .next()
                        .ok_or_else(|| parse_err(line_no, format!("missing value for '{}'", prop.name)))?;
                    t.parse::<f64>()
                        .map_err(|_| parse_err(line_no, format!("bad value '{t}' for '{}'", prop.name)))
                };
                match prop.kind {
                    PropKind::Scalar(_) => values.push(next()?),
                    PropKind::List { .. } => {
                        let count = next()?;
                        for _ in 0..count as usize {
                            next()?;
                        }
                        values.push(f64::NAN);
                    }
                }
            }
            out.push(record_from(&values, layout));
        }
        if layout.is_some() {
            break;
        }
    }
    Ok(out)
}

fn read_binary<'a>(
    header: &Header,
    bytes: &[u8],
    layout_of: &dyn Fn(usize) -> Option<&'a VertexLayout>,
) -> Result<Vec<VertexRecord>> {
    let body = &bytes[header.body_start..];
    let mut pos = 0usize;
    let mut out = Vec::new();

    for (ei, element) in header.elements.iter().enumerate() {
        let layout = layout_of(ei);
        let mut values = Vec::with_capacity(element.props.len());
        for n in 0..element.count {
            values.clear();
            let truncated = || match layout {
                Some(_) => Error::Truncated {
                    expected: element.count,
                    found: n,
                },
                None => parse_err(header.body_line, format!("body ends inside element '{}'", element.name)),
            };
            for prop in &element.props {
                match prop.kind {
                    PropKind::Scalar(s) => {
                        let end = pos + s.size();
                        let chunk = body.get(pos..end).ok_or_else(truncated)?;
                        values.push(s.read_le(chunk));
                        pos = end;
                    }
                    PropKind::List { count, item } => {
                        let end = pos + count.size();
                        let chunk = body.get(pos..end).ok_or_else(truncated)?;
                        let len = count.read_le(chunk).max(0.0) as usize;
                        pos = end + len * item.size();
                        if pos > body.len() {
                            return Err(truncated());
                        }
                        values.push(f64::NAN);
                    }
                }
            }
            if let Some(layout) = layout {
                out.push(record_from(&values, layout));
            }
        }
        if layout.is_some() {
            break;
        }
    }
    Ok(out)
}

/// Loads a PLY file, reading labels through the palette.
pub fn load_ply(path: impl AsRef<Path>) -> Result<PointCloud> {
    load_ply_with(path, LabelMode::Palette)
}

/// Loads a PLY file with an explicit color-to-label mode.
pub fn load_ply_with(path: impl AsRef<Path>, mode: LabelMode) -> Result<PointCloud> {
    let bytes = fs::read(path)?;
    let header = parse_header(&bytes)?;
    let vertex_idx = header
        .elements
        .iter()
        .position(|e| e.name == "vertex")
        .ok_or_else(|| parse_err(header.body_line - 1, "no vertex element"))?;
    let layout = VertexLayout::new(&header.elements[vertex_idx], header.body_line - 1)?;
    let layout_of = |i: usize| (i == vertex_idx).then_some(&layout);

    let records = match header.encoding {
        Encoding::Ascii => read_ascii(&header, &bytes, &layout_of)?,
        Encoding::BinaryLe => read_binary(&header, &bytes, &layout_of)?,
    };

    let mut points = Vec::with_capacity(records.len());
    for (index, r) in records.iter().enumerate() {
        let p = Point3::from(r.xyz);
        if !p.is_finite() {
            return Err(Error::NonFinite { index });
        }
        points.push(p);
    }

    let labels = if layout.label.is_some() {
        let labels = records
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let v = r.label.unwrap_or(0.0);
                if v < 0.0 || v > f64::from(u32::MAX) {
                    Err(Error::Data(format!("point {i} has invalid label {v}")))
                } else {
                    Ok(v as u32)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Some(labels)
    } else if layout.rgb.is_some() {
        let colors = records
            .iter()
            .map(|r| r.rgb.unwrap_or_default().map(|c| c.clamp(0.0, 255.0) as u8));
        Some(match mode {
            LabelMode::Palette => colors.map(color_to_label).collect(),
            LabelMode::DistinctColors => {
                let mut ids: HashMap<[u8; 3], u32> = HashMap::new();
                ids.insert([0, 0, 0], 0);
                colors
                    .map(|c| {
                        let next = ids.len() as u32;
                        *ids.entry(c).or_insert(next)
                    })
                    .collect()
            }
        })
    } else {
        None
    };

    match labels {
        Some(labels) => PointCloud::with_labels(points, labels),
        None => PointCloud::new(points),
    }
}

/// Formats `v` with 9 significant digits, without trailing zeros.
fn format_coord(v: f64) -> String {
    if v == 0.0 {
        return if v.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{v:.8e}");
    let (_, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    let s = if (-5..=9).contains(&exp) {
        let decimals = (8 - exp).max(0) as usize;
        format!("{v:.decimals$}")
    } else {
        sci
    };
    trim_mantissa(&s)
}

fn trim_mantissa(s: &str) -> String {
    let (mantissa, exp) = match s.split_once('e') {
        Some((m, e)) => (m, Some(e)),
        None => (s, None),
    };
    let mut m = mantissa.to_string();
    if m.contains('.') {
        while m.ends_with('0') {
            m.pop();
        }
        if m.ends_with('.') {
            m.pop();
        }
    }
    match exp {
        Some(e) => format!("{m}e{e}"),
        None => m,
    }
}

/// Writes `cloud` with colors from `labeling` through the palette.
///
/// Coordinates are written as `double`. The output is byte-identical for
/// equal inputs.
pub fn save_ply(cloud: &PointCloud, labeling: &Labeling, path: impl AsRef<Path>, format: PlyFormat) -> Result<()> {
    if labeling.len() != cloud.len() {
        return Err(Error::Contract(format!(
            "labeling has {} entries for {} points",
            labeling.len(),
            cloud.len()
        )));
    }
    let colors = labeling
        .as_slice()
        .iter()
        .map(|&l| label_to_color(l))
        .collect::<Result<Vec<_>>>()?;

    let mut w = BufWriter::new(fs::File::create(path)?);
    let format_name = match format {
        PlyFormat::Ascii => "ascii",
        PlyFormat::BinaryLittleEndian => "binary_little_endian",
    };
    write!(
        w,
        "ply\nformat {format_name} 1.0\nelement vertex {}\n\
         property double x\nproperty double y\nproperty double z\n\
         property uchar red\nproperty uchar green\nproperty uchar blue\nend_header\n",
        cloud.len()
    )?;
    for (p, c) in cloud.points().iter().zip(&colors) {
        match format {
            PlyFormat::Ascii => writeln!(
                w,
                "{} {} {} {} {} {}",
                format_coord(p.x),
                format_coord(p.y),
                format_coord(p.z),
                c[0],
                c[1],
                c[2]
            )?,
            PlyFormat::BinaryLittleEndian => {
                for v in p.xyz() {
                    w.write_all(&v.to_le_bytes())?;
                }
                w.write_all(c)?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use crate::cloud::PointCloud;
use crate::error::{Error, Result};
use crate::Vec3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlyEncoding {
    Ascii,
    BinaryLittleEndian,
}

impl PlyEncoding {
    fn header_name(self) -> &'static str {
        match self {
            PlyEncoding::Ascii => "ascii",
            PlyEncoding::BinaryLittleEndian => "binary_little_endian",
        }
    }
}

impl fmt::Display for PlyEncoding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.header_name())
    }
}

impl FromStr for PlyEncoding {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ascii" => Ok(PlyEncoding::Ascii),
            "binary" | "binary_little_endian" => Ok(PlyEncoding::BinaryLittleEndian),
            _ => Err(Error::invalid(format!("unknown PLY encoding `{s}`"))),
        }
    }
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
            "char" | "int8" => Scalar::I8,
            "uchar" | "uint8" => Scalar::U8,
            "short" | "int16" => Scalar::I16,
            "ushort" | "uint16" => Scalar::U16,
            "int" | "int32" => Scalar::I32,
            "uint" | "uint32" => Scalar::U32,
            "float" | "float32" => Scalar::F32,
            "double" | "float64" => Scalar::F64,
            _ => return None,
        })
    }

    fn size(self) -> usize {
        match self {
            Scalar::I8 | Scalar::U8 => 1,
            Scalar::I16 | Scalar::U16 => 2,
            Scalar::I32 | Scalar::U32 | Scalar::F32 => 4,
            Scalar::F64 => 8,
        }
    }

    fn read_le(self, b: &[u8]) -> f64 {
        match self {
            Scalar::I8 => b[0] as i8 as f64,
            Scalar::U8 => b[0] as f64,
            Scalar::I16 => i16::from_le_bytes([b[0], b[1]]) as f64,
            Scalar::U16 => u16::from_le_bytes([b[0], b[1]]) as f64,
            Scalar::I32 => i32::from_le_bytes(b[..4].try_into().unwrap()) as f64,
            Scalar::U32 => u32::from_le_bytes(b[..4].try_into().unwrap()) as f64,
            Scalar::F32 => f32::from_le_bytes(b[..4].try_into().unwrap()) as f64,
            Scalar::F64 => f64::from_le_bytes(b[..8].try_into().unwrap()),
        }
    }
}

struct Header {
    encoding: PlyEncoding,
    vertices: usize,
    properties: Vec<(String, Scalar)>,
    /// Byte offset of the first payload byte.
    body: usize,
}

fn perr(offset: usize, message: impl Into<String>) -> Error {
    Error::parse(offset as u64, message)
}

fn parse_header(bytes: &[u8]) -> Result<Header> {
    let mut pos = 0;
    let next_line = |pos: &mut usize| -> Result<(usize, String)> {
        let start = *pos;
        let end = bytes[start..]
            .iter()
            .position(|&b| b == b'\n')
            .map(|i| start + i)
            .ok_or_else(|| perr(start, "header is not terminated by end_header"))?;
        *pos = end + 1;
        let line = std::str::from_utf8(&bytes[start..end])
            .map_err(|_| perr(start, "header line is not valid text"))?;
        Ok((start, line.trim_end_matches('\r').trim().to_string()))
    };
    let (_, magic) = next_line(&mut pos)?;
    if magic != "ply" {
        return Err(perr(0, "missing `ply` magic line"));
    }
    let mut encoding = None;
    let mut vertices = None;
    let mut properties = Vec::new();
    let mut current: Option<String> = None;
    let mut seen_other = false;
    loop {
        let (at, line) = next_line(&mut pos)?;
        let tokens: Vec<&str> = line.split_whitespace().collect();
        match tokens.as_slice() {
            [] => {}
            ["comment", ..] | ["obj_info", ..] => {}
            ["format", enc, version] => {
                if *version != "1.0" {
                    return Err(perr(at, format!("unsupported PLY version {version}")));
                }
                encoding = Some(match *enc {
                    "ascii" => PlyEncoding::Ascii,
                    "binary_little_endian" => PlyEncoding::BinaryLittleEndian,
                    other => return Err(perr(at, format!("unsupported encoding `{other}`"))),
                });
            }
            ["element", name, count] => {
                let count: usize = count
                    .parse()
                    .map_err(|_| perr(at, format!("bad element count `{count}`")))?;
                if *name == "vertex" {
                    if seen_other {
                        return Err(perr(at, "the vertex element must come first"));
                    }
                    vertices = Some(count);
                } else {
                    if count > 0 {
                        log::warn!("ignoring {count} `{name}` element(s)");
                    }
                    seen_other = true;
                }
                current = Some(name.to_string());
            }
            ["property", "list", ..] => {
                if current.as_deref() == Some("vertex") {
                    return Err(perr(at, "list properties on vertices are not supported"));
                }
            }
            ["property", ty, name] => {
                if current.as_deref() == Some("vertex") {
                    let ty = Scalar::parse(ty)
                        .ok_or_else(|| perr(at, format!("unknown property type `{ty}`")))?;
                    properties.push((name.to_string(), ty));
                } else if current.is_none() {
                    return Err(perr(at, "property before any element"));
                }
            }
            ["end_header"] => break,
            _ => return Err(perr(at, format!("unrecognized header line `{line}`"))),
        }
    }
    let encoding = encoding.ok_or_else(|| perr(0, "missing format line"))?;
    let vertices = vertices.ok_or_else(|| perr(0, "missing vertex element"))?;
    Ok(Header {
        encoding,
        vertices,
        properties,
        body: pos,
    })
}

/// Parse a PLY file held in memory.
pub fn parse_ply(bytes: &[u8]) -> Result<PointCloud> {
    let header = parse_header(bytes)?;
    let slot = |name: &str| header.properties.iter().position(|(n, _)| n == name);
    let xyz = match (slot("x"), slot("y"), slot("z")) {
        (Some(x), Some(y), Some(z)) => [x, y, z],
        _ => return Err(perr(0, "vertex element lacks x, y or z")),
    };
    let nxyz = match (slot("nx"), slot("ny"), slot("nz")) {
        (Some(x), Some(y), Some(z)) => Some([x, y, z]),
        (None, None, None) => None,
        _ => return Err(perr(0, "vertex normals need all of nx, ny and nz")),
    };
    let n = header.vertices;
    let nprop = header.properties.len();
    let mut values = vec![0.0f64; nprop];
    let mut points = Vec::with_capacity(n);
    let mut normals = nxyz.map(|_| Vec::with_capacity(n));
    let mut emit = |values: &[f64], at: usize| -> Result<()> {
        let p = Vec3::new(values[xyz[0]], values[xyz[1]], values[xyz[2]]);
        if !p.iter().all(|c| c.is_finite()) {
            return Err(perr(at, "non-finite coordinate"));
        }
        points.push(p);
        if let (Some(slots), Some(ns)) = (nxyz, normals.as_mut()) {
            ns.push(Vec3::new(
                values[slots[0]],
                values[slots[1]],
                values[slots[2]],
            ));
        }
        Ok(())
    };
    match header.encoding {
        PlyEncoding::BinaryLittleEndian => {
            let stride: usize = header.properties.iter().map(|(_, t)| t.size()).sum();
            let mut at = header.body;
            for i in 0..n {
                if at + stride > bytes.len() {
                    return Err(perr(
                        at.min(bytes.len()),
                        format!("payload truncated in vertex {i} of {n}"),
                    ));
                }
                let mut off = at;
                for (v, (_, ty)) in values.iter_mut().zip(&header.properties) {
                    *v = ty.read_le(&bytes[off..]);
                    off += ty.size();
                }
                emit(&values, at)?;
                at += stride;
            }
        }
        PlyEncoding::Ascii => {
            let mut at = header.body;
            let mut i = 0;
            while i < n {
                if at >= bytes.len() {
                    return Err(perr(at, format!("payload truncated in vertex {i} of {n}")));
                }
                let end = bytes[at..]
                    .iter()
                    .position(|&b| b == b'\n')
                    .map_or(bytes.len(), |k| at + k);
                let line = std::str::from_utf8(&bytes[at..end])
                    .map_err(|_| perr(at, "vertex line is not valid text"))?;
                let tokens: Vec<&str> = line.split_whitespace().collect();
                if !tokens.is_empty() {
                    if tokens.len() != nprop {
                        return Err(perr(
                            at,
                            format!("vertex {i} has {} values, expected {nprop}", tokens.len()),
                        ));
                    }
                    for (v, t) in values.iter_mut().zip(&tokens) {
                        *v = t
                            .parse()
                            .map_err(|_| perr(at, format!("bad number `{t}` in vertex {i}")))?;
                    }
                    emit(&values, at)?;
                    i += 1;
                }
                at = end + 1;
            }
        }
    }
    let cloud = PointCloud::new(points)?;
    match normals {
        Some(ns)
            if ns
                .iter()
                .all(|v| v.norm() > 1e-12 && v.iter().all(|c| c.is_finite())) =>
        {
            let mut cloud = cloud;
            cloud.set_normals(ns.into_iter().map(|v| v.normalize()).collect())?;
            Ok(cloud)
        }
        Some(_) => {
            log::warn!("dropping vertex normals: some are zero or non-finite");
            Ok(cloud)
        }
        None => Ok(cloud),
    }
}

pub fn read_ply(path: &Path) -> Result<PointCloud> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    parse_ply(&bytes).map_err(|e| match e {
        Error::Parse { offset, message } => Error::Parse {
            offset,
            message: format!("{}: {message}", path.display()),
        },
        other => other,
    })
}

/// Serialize as 32-bit float vertices, with normals when present.
pub fn write_ply_to<W: Write>(
    w: &mut W,
    cloud: &PointCloud,
    encoding: PlyEncoding,
) -> std::io::Result<()> {
    let normals = cloud.normals();
    write!(
        w,
        "ply\nformat {} 1.0\nelement vertex {}\nproperty float x\nproperty float y\nproperty float z\n",
        encoding.header_name(),
        cloud.len()
    )?;
    if normals.is_some() {
        w.write_all(b"property float nx\nproperty float ny\nproperty float nz\n")?;
    }
    w.write_all(b"end_header\n")?;
    for (i, p) in cloud.points().iter().enumerate() {
        let mut row = vec![p.x as f32, p.y as f32, p.z as f32];
        if let Some(ns) = normals {
            row.extend(ns[i].iter().map(|c| *c as f32));
        }
        match encoding {
            PlyEncoding::BinaryLittleEndian => {
                for v in row {
                    w.write_all(&v.to_le_bytes())?;
                }
            }
            PlyEncoding::Ascii => {
                let text: Vec<String> = row.iter().map(|v| v.to_string()).collect();
                writeln!(w, "{}", text.join(" "))?;
            }
        }
    }
    Ok(())
}

pub fn write_ply(cloud: &PointCloud, path: &Path, encoding: PlyEncoding) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = std::io::BufWriter::new(file);
    write_ply_to(&mut w, cloud, encoding)
        .and_then(|_| w.flush())
        .map_err(|e| Error::io(path, e))
}

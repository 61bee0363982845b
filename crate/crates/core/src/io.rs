//! Text file formats: sinogram and field CSVs, the plain mesh file and the
//! mode-table dump. Floats are written in shortest round-trip form, so a
//! write/read cycle is bit-exact.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::geometry::{ArcGrid, ArcKind, DirectionGrid, Triangulation, Vec2};
use crate::harmonics::ModeTable;
use crate::pipeline::{FieldOnMesh, Provenance};
use crate::{Error, Result, Sinogram};

/// Node and direction positions read from a file may differ from the
/// regenerated grid by formatting noise at most.
const GRID_TOLERANCE: f64 = 1e-9;

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        let line = e.position().map_or(0, |p| p.line() as usize);
        match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::Io(io),
            kind => Error::Parse {
                line,
                message: format!("{kind:?}"),
            },
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct SinogramRow {
    k: usize,
    n: usize,
    zeta_x: f64,
    zeta_y: f64,
    theta_x: f64,
    theta_y: f64,
    mask: u8,
    #[serde(rename = "I0")]
    i0: f64,
    #[serde(rename = "I1")]
    i1: f64,
}

pub fn write_sinogram<W: Write>(sin: &Sinogram, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let (kk, nn) = sin.shape();
    for k in 0..kk {
        let zeta = sin.arc().node(k);
        for n in 0..nn {
            let theta = sin.dirs().dir(n);
            let idx = sin.index(k, n);
            w.serialize(SinogramRow {
                k,
                n,
                zeta_x: zeta.x,
                zeta_y: zeta.y,
                theta_x: theta.x,
                theta_y: theta.y,
                mask: sin.mask()[idx] as u8,
                i0: sin.i0()[idx],
                i1: sin.i1()[idx],
            })?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Reads a sinogram CSV. The grid sizes are inferred from the largest
/// indices; the arc covers the whole circle if any node lies below the real
/// axis. Positions must agree with the regenerated uniform grids.
pub fn read_sinogram<R: Read>(input: R) -> Result<Sinogram> {
    let mut rows = Vec::new();
    for row in csv::Reader::from_reader(input).deserialize() {
        let row: SinogramRow = row?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Parse {
            line: 1,
            message: "sinogram file has no rows".into(),
        });
    }
    let kk = rows.iter().map(|r| r.k).max().unwrap_or(0) + 1;
    let nn = rows.iter().map(|r| r.n).max().unwrap_or(0) + 1;
    if rows.len() != kk * nn {
        return Err(Error::GridMismatch(format!(
            "{} rows for an inferred {kk}x{nn} grid",
            rows.len()
        )));
    }
    let kind = if rows.iter().any(|r| r.zeta_y < -GRID_TOLERANCE) {
        ArcKind::FullCircle
    } else {
        ArcKind::UpperHalf
    };
    let arc = ArcGrid::uniform(kind, kk)?;
    let dirs = DirectionGrid::new(nn)?;
    let len = kk * nn;
    let mut seen = vec![false; len];
    let mut mask = vec![false; len];
    let mut i0 = vec![0.0; len];
    let mut i1 = vec![0.0; len];
    for (line, r) in rows.iter().enumerate() {
        let idx = r.k * nn + r.n;
        if std::mem::replace(&mut seen[idx], true) {
            return Err(Error::Parse {
                line: line + 2,
                message: format!("duplicate cell ({}, {})", r.k, r.n),
            });
        }
        let zeta = arc.node(r.k);
        let theta = dirs.dir(r.n);
        let off = (Vec2::new(r.zeta_x, r.zeta_y) - zeta).norm()
            + (Vec2::new(r.theta_x, r.theta_y) - theta).norm();
        if off > GRID_TOLERANCE {
            return Err(Error::GridMismatch(format!(
                "cell ({}, {}) is not on the uniform {kk}x{nn} grid",
                r.k, r.n
            )));
        }
        mask[idx] = r.mask != 0;
        i0[idx] = r.i0;
        i1[idx] = r.i1;
    }
    Sinogram::new(arc, dirs, mask, i0, i1)
}

pub fn save_sinogram(sin: &Sinogram, path: &Path) -> Result<()> {
    write_sinogram(sin, BufWriter::new(File::create(path)?))
}

pub fn load_sinogram(path: &Path) -> Result<Sinogram> {
    read_sinogram(BufReader::new(File::open(path)?))
}

#[derive(Debug, Serialize, Deserialize)]
struct FieldRow {
    s: usize,
    cx: f64,
    cy: f64,
    area: f64,
    f1: f64,
    f2: f64,
}

pub fn write_field<W: Write>(field: &FieldOnMesh, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for (s, ((c, &area), v)) in field
        .centroids
        .iter()
        .zip(&field.areas)
        .zip(&field.values)
        .enumerate()
    {
        w.serialize(FieldRow {
            s,
            cx: c.x,
            cy: c.y,
            area,
            f1: v.x,
            f2: v.y,
        })?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a field CSV; rows must be in triangle order.
pub fn read_field<R: Read>(input: R, provenance: Provenance) -> Result<FieldOnMesh> {
    let mut field = FieldOnMesh {
        centroids: Vec::new(),
        areas: Vec::new(),
        values: Vec::new(),
        provenance,
    };
    for (i, row) in csv::Reader::from_reader(input).deserialize().enumerate() {
        let r: FieldRow = row?;
        if r.s != i {
            return Err(Error::Parse {
                line: i + 2,
                message: format!("expected triangle {i}, found {}", r.s),
            });
        }
        field.centroids.push(Vec2::new(r.cx, r.cy));
        field.areas.push(r.area);
        field.values.push(Vec2::new(r.f1, r.f2));
    }
    Ok(field)
}

pub fn save_field(field: &FieldOnMesh, path: &Path) -> Result<()> {
    write_field(field, BufWriter::new(File::create(path)?))
}

pub fn load_field(path: &Path, provenance: Provenance) -> Result<FieldOnMesh> {
    read_field(BufReader::new(File::open(path)?), provenance)
}

/// Mesh file: `V S`, then `V` lines `x y`, then `S` lines of 0-based vertex
/// indices.
pub fn write_mesh<W: Write>(mesh: &Triangulation, out: W) -> Result<()> {
    let mut w = BufWriter::new(out);
    writeln!(w, "{} {}", mesh.vertices().len(), mesh.len())?;
    for v in mesh.vertices() {
        writeln!(w, "{} {}", v.x, v.y)?;
    }
    for t in mesh.triangles() {
        writeln!(w, "{} {} {}", t[0], t[1], t[2])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_mesh<R: Read>(input: R) -> Result<Triangulation> {
    let mut lines = BufReader::new(input).lines().enumerate();
    let mut next = |what: &str| -> Result<(usize, Vec<String>)> {
        match lines.next() {
            Some((i, line)) => Ok((i + 1, line?.split_whitespace().map(String::from).collect())),
            None => Err(Error::Parse {
                line: 0,
                message: format!("unexpected end of mesh file, expected {what}"),
            }),
        }
    };
    fn fields<T: std::str::FromStr>(line: usize, parts: &[String], n: usize) -> Result<Vec<T>> {
        if parts.len() != n {
            return Err(Error::Parse {
                line,
                message: format!("expected {n} fields, found {}", parts.len()),
            });
        }
        parts
            .iter()
            .map(|p| {
                p.parse().map_err(|_| Error::Parse {
                    line,
                    message: format!("cannot parse `{p}`"),
                })
            })
            .collect()
    }
    let (line, head) = next("header")?;
    let counts: Vec<usize> = fields(line, &head, 2)?;
    let mut vertices = Vec::with_capacity(counts[0]);
    for _ in 0..counts[0] {
        let (line, parts) = next("a vertex")?;
        let xy: Vec<f64> = fields(line, &parts, 2)?;
        vertices.push(Vec2::new(xy[0], xy[1]));
    }
    let mut triangles = Vec::with_capacity(counts[1]);
    for _ in 0..counts[1] {
        let (line, parts) = next("a triangle")?;
        let t: Vec<usize> = fields(line, &parts, 3)?;
        triangles.push([t[0], t[1], t[2]]);
    }
    Triangulation::new(vertices, triangles)
}

pub fn save_mesh(mesh: &Triangulation, path: &Path) -> Result<()> {
    write_mesh(mesh, File::create(path)?)
}

pub fn load_mesh(path: &Path) -> Result<Triangulation> {
    read_mesh(File::open(path)?)
}

#[derive(Debug, Serialize)]
struct ModeRow {
    k: usize,
    m: i32,
    #[serde(rename = "Re")]
    re: f64,
    #[serde(rename = "Im")]
    im: f64,
}

/// Debug dump of a mode table, one row per (point, mode).
pub fn write_modes<W: Write>(table: &ModeTable, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for k in 0..table.points() {
        for (p, z) in table.row(k).iter().enumerate() {
            w.serialize(ModeRow {
                k,
                m: table.parity().mode(p),
                re: z.re,
                im: z.im,
            })?;
        }
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forward::add_noise;
    use crate::geometry::triangulate_half_disc;

    fn sinogram(kind: ArcKind) -> Sinogram {
        let arc = ArcGrid::uniform(kind, 4).unwrap();
        let dirs = DirectionGrid::new(8).unwrap();
        let len = 32;
        let i0 = (0..len).map(|i| (i as f64 * 0.37).sin() / 3.0).collect();
        let i1 = (0..len).map(|i| (i as f64).sqrt() * 1e-7).collect();
        let mask = crate::forward::visibility_mask(&arc, &dirs);
        Sinogram::new(arc, dirs, mask, i0, i1).unwrap()
    }

    #[test]
    fn sinogram_round_trip() {
        for kind in [ArcKind::UpperHalf, ArcKind::FullCircle] {
            let sin = add_noise(&sinogram(kind), 0.05, 3).unwrap();
            let mut buf = Vec::new();
            write_sinogram(&sin, &mut buf).unwrap();
            let text = String::from_utf8(buf.clone()).unwrap();
            assert!(text.starts_with("k,n,zeta_x,zeta_y,theta_x,theta_y,mask,I0,I1\n"));
            assert_eq!(text.lines().count(), 33);
            let back = read_sinogram(&buf[..]).unwrap();
            assert_eq!(back.arc(), sin.arc());
            assert_eq!(back.mask(), sin.mask());
            assert_eq!(back.i0(), sin.i0());
            assert_eq!(back.i1(), sin.i1());
        }
    }

    #[test]
    fn sinogram_rejects_bad_grids() {
        let mut buf = Vec::new();
        write_sinogram(&sinogram(ArcKind::UpperHalf), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let short: String = text.lines().take(20).map(|l| format!("{l}\n")).collect();
        let err = read_sinogram(short.as_bytes()).unwrap_err();
        assert!(err.to_string().contains("grid mismatch"), "{err}");

        let moved = text.replacen(",0.9238795325112867,", ",0.9,", 1);
        assert_ne!(moved, text);
        assert!(matches!(read_sinogram(moved.as_bytes()), Err(Error::GridMismatch(_))));

        let garbage = text.replacen("0,0,", "0,x,", 1);
        assert!(matches!(read_sinogram(garbage.as_bytes()), Err(Error::Parse { .. })));
        assert!(read_sinogram("k,n,zeta_x,zeta_y,theta_x,theta_y,mask,I0,I1\n".as_bytes()).is_err());
    }

    #[test]
    fn mesh_and_field_round_trip() {
        let mesh = triangulate_half_disc(0.4).unwrap();
        let mut buf = Vec::new();
        write_mesh(&mesh, &mut buf).unwrap();
        let back = read_mesh(&buf[..]).unwrap();
        assert_eq!(back, mesh);
        assert!(read_mesh("2 1\n0 0\n1 0\n0 1 2\n".as_bytes()).is_err());

        let values = mesh.centroids().iter().map(|c| Vec2::new(c.x * c.y, 1.0 / 3.0)).collect();
        let field = FieldOnMesh::new(&mesh, values, Provenance::Analytic).unwrap();
        let mut buf = Vec::new();
        write_field(&field, &mut buf).unwrap();
        assert!(buf.starts_with(b"s,cx,cy,area,f1,f2\n"));
        assert_eq!(read_field(&buf[..], Provenance::Analytic).unwrap(), field);
    }

    #[test]
    fn mode_dump_layout() {
        let table = ModeTable::zeros(crate::Parity::Odd, 2, 3);
        let mut buf = Vec::new();
        write_modes(&table, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "k,m,Re,Im");
        assert_eq!(lines[1], "0,-1,0.0,0.0");
        assert_eq!(lines[2], "0,-3,0.0,0.0");
        assert_eq!(lines.len(), 7);
    }
}

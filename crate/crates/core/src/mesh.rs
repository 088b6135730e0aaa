//! Triangulated surface patches of `F_N(Ω_N)` and their export formats.

use std::fmt::Write as _;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::domain::DomainSpec;
use crate::error::{CoreError, Result};
use crate::immersion::{self, curvature_from_sample, eta_grid, normal_from_sample, Vec3};

/// Header of the slice CSV export.
pub const CSV_HEADER: &str = "N,x,y,F1,F2,F3,u,v,K";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceMesh {
    pub n: u32,
    /// Grid size `(nx, ny)`: columns in `x`, rows in `eta`.
    pub grid_dims: (usize, usize),
    /// Domain coordinates `(x, y)` of each vertex.
    pub params: Vec<[f64; 2]>,
    pub vertices: Vec<Vec3>,
    pub normals: Vec<Vec3>,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    /// Gauss curvature, `0` where it underflows.
    pub k: Vec<f64>,
    /// Counter-clockwise in `(x, y)`, so face normals agree with `normals`.
    pub faces: Vec<[u32; 3]>,
    /// Columns that lost vertices to the truncation radius.
    pub truncated_columns: Vec<bool>,
}

impl SurfaceMesh {
    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    /// Unit normal of a face from its vertex positions.
    pub fn face_normal(&self, f: usize) -> Vec3 {
        let [a, b, c] = self.faces[f].map(|i| self.vertices[i as usize]);
        let e1 = sub(&b, &a);
        let e2 = sub(&c, &a);
        let n = cross(&e1, &e2);
        let l = immersion::norm(&n);
        n.map(|c| c / l)
    }

    /// `V − E + F`.
    pub fn euler_characteristic(&self) -> i64 {
        let mut edges: Vec<(u32, u32)> =
            self.faces.iter().flat_map(|f| [(f[0], f[1]), (f[1], f[2]), (f[2], f[0])]).map(|(a, b)| (a.min(b), a.max(b))).collect();
        edges.sort_unstable();
        edges.dedup();
        let mut used: Vec<u32> = self.faces.iter().flatten().copied().collect();
        used.sort_unstable();
        used.dedup();
        used.len() as i64 - edges.len() as i64 + self.faces.len() as i64
    }
}

/// Tessellates `F_N` over `nx` columns in `x ∈ [−1/2, 1/2]` and `ny` (odd)
/// rows on the `eta` grid. Each quad is split along its shorter diagonal;
/// faces touching a truncated vertex are dropped.
pub fn build_mesh(spec: &DomainSpec, nx: usize, ny: usize, tol: f64) -> Result<SurfaceMesh> {
    if nx < 2 {
        return Err(CoreError::InvalidParameter(format!("mesh needs at least 2 columns, got {nx}")));
    }
    eta_grid(ny)?;
    let xs = crate::domain::uniform_grid(crate::domain::X_MIN, crate::domain::X_MAX, nx);
    let columns: Vec<immersion::SliceCurve> = xs.par_iter().map(|&x| immersion::slice(spec, x, ny, tol)).collect::<Result<_>>()?;

    let mut index = vec![u32::MAX; nx * ny];
    let mut mesh = SurfaceMesh {
        n: spec.n(),
        grid_dims: (nx, ny),
        params: Vec::new(),
        vertices: Vec::new(),
        normals: Vec::new(),
        u: Vec::new(),
        v: Vec::new(),
        k: Vec::new(),
        faces: Vec::new(),
        truncated_columns: columns.iter().map(|c| c.truncated).collect(),
    };
    for (i, col) in columns.iter().enumerate() {
        for j in col.kept.clone() {
            let s = &col.samples[j];
            index[i * ny + j] = mesh.vertices.len() as u32;
            mesh.params.push([col.x, col.ys[j]]);
            mesh.vertices.push(*col.point(j).expect("kept"));
            mesh.normals.push(normal_from_sample(s));
            mesh.u.push(s.u);
            mesh.v.push(s.v);
            mesh.k.push(curvature_from_sample(s).0);
        }
    }
    for i in 0..nx - 1 {
        for j in 0..ny - 1 {
            let q = [index[i * ny + j], index[(i + 1) * ny + j], index[(i + 1) * ny + j + 1], index[i * ny + j + 1]];
            if q.contains(&u32::MAX) {
                continue;
            }
            let p = q.map(|k| mesh.vertices[k as usize]);
            let d02 = immersion::norm(&sub(&p[2], &p[0]));
            let d13 = immersion::norm(&sub(&p[3], &p[1]));
            if d02 <= d13 {
                mesh.faces.push([q[0], q[1], q[2]]);
                mesh.faces.push([q[0], q[2], q[3]]);
            } else {
                mesh.faces.push([q[0], q[1], q[3]]);
                mesh.faces.push([q[1], q[2], q[3]]);
            }
        }
    }
    Ok(mesh)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeshFormat {
    Obj,
    Ply,
    Csv,
    Json,
}

impl MeshFormat {
    pub fn from_path(path: &Path) -> Option<Self> {
        path.extension()?.to_str()?.parse().ok()
    }
}

impl FromStr for MeshFormat {
    type Err = CoreError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "obj" => Ok(Self::Obj),
            "ply" => Ok(Self::Ply),
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            _ => Err(CoreError::InvalidParameter(format!("unknown mesh format {s:?}"))),
        }
    }
}

pub fn to_obj(mesh: &SurfaceMesh) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# minimal disk N={} grid {}x{}", mesh.n, mesh.grid_dims.0, mesh.grid_dims.1);
    for p in &mesh.vertices {
        let _ = writeln!(s, "v {} {} {}", p[0], p[1], p[2]);
    }
    for n in &mesh.normals {
        let _ = writeln!(s, "vn {} {} {}", n[0], n[1], n[2]);
    }
    for f in &mesh.faces {
        let [a, b, c] = f.map(|i| i + 1);
        let _ = writeln!(s, "f {a}//{a} {b}//{b} {c}//{c}");
    }
    s
}

pub fn to_ply(mesh: &SurfaceMesh) -> String {
    let mut s = String::new();
    let _ = write!(
        s,
        "ply\nformat ascii 1.0\ncomment minimal disk N={}\nelement vertex {}\n\
         property double x\nproperty double y\nproperty double z\n\
         property double nx\nproperty double ny\nproperty double nz\n\
         property double u\nproperty double v\nproperty double k\n\
         element face {}\nproperty list uchar int vertex_indices\nend_header\n",
        mesh.n,
        mesh.vertices.len(),
        mesh.faces.len()
    );
    for i in 0..mesh.vertices.len() {
        let (p, n) = (mesh.vertices[i], mesh.normals[i]);
        let _ = writeln!(s, "{} {} {} {} {} {} {} {} {}", p[0], p[1], p[2], n[0], n[1], n[2], mesh.u[i], mesh.v[i], mesh.k[i]);
    }
    for f in &mesh.faces {
        let _ = writeln!(s, "3 {} {} {}", f[0], f[1], f[2]);
    }
    s
}

/// One row per vertex, grouped by slice.
pub fn to_csv(mesh: &SurfaceMesh) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for i in 0..mesh.vertices.len() {
        let ([x, y], p) = (mesh.params[i], mesh.vertices[i]);
        let _ = writeln!(s, "{},{x},{y},{},{},{},{},{},{}", mesh.n, p[0], p[1], p[2], mesh.u[i], mesh.v[i], mesh.k[i]);
    }
    s
}

/// One row per slice sample; positions beyond the truncation radius are `NaN`.
pub fn slice_csv(slice: &immersion::SliceCurve) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for (j, (y, h)) in slice.ys.iter().zip(&slice.samples).enumerate() {
        let p = slice.point(j).copied().unwrap_or([f64::NAN; 3]);
        let k = curvature_from_sample(h).0;
        let _ = writeln!(s, "{},{},{y},{},{},{},{},{},{k}", slice.n, slice.x, p[0], p[1], p[2], h.u, h.v);
    }
    s
}

pub fn to_json(mesh: &SurfaceMesh) -> String {
    serde_json::to_string(mesh).expect("mesh serialises")
}

pub fn render(mesh: &SurfaceMesh, format: MeshFormat) -> String {
    match format {
        MeshFormat::Obj => to_obj(mesh),
        MeshFormat::Ply => to_ply(mesh),
        MeshFormat::Csv => to_csv(mesh),
        MeshFormat::Json => to_json(mesh),
    }
}

pub fn write_mesh(mesh: &SurfaceMesh, path: &Path, format: MeshFormat) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| CoreError::io(path, e))?;
    let mut w = BufWriter::new(file);
    w.write_all(render(mesh, format).as_bytes()).and_then(|_| w.flush()).map_err(|e| CoreError::io(path, e))
}

/// Geometry read back from an OBJ file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ObjData {
    pub vertices: Vec<Vec3>,
    pub normals: Vec<Vec3>,
    /// Zero-based vertex indices.
    pub faces: Vec<[u32; 3]>,
}

pub fn parse_obj(text: &str) -> std::result::Result<ObjData, String> {
    let mut out = ObjData::default();
    let triple = |it: &mut std::str::SplitWhitespace, line: usize| -> std::result::Result<Vec3, String> {
        let mut v = [0.0; 3];
        for c in &mut v {
            *c = it.next().and_then(|t| t.parse().ok()).ok_or(format!("line {line}: expected three numbers"))?;
        }
        Ok(v)
    };
    for (ln, line) in text.lines().enumerate() {
        let ln = ln + 1;
        let mut it = line.split_whitespace();
        match it.next() {
            Some("v") => out.vertices.push(triple(&mut it, ln)?),
            Some("vn") => out.normals.push(triple(&mut it, ln)?),
            Some("f") => {
                let idx: Vec<u32> = it
                    .map(|t| t.split('/').next().and_then(|i| i.parse::<u32>().ok()).filter(|&i| i >= 1).map(|i| i - 1))
                    .collect::<Option<_>>()
                    .ok_or(format!("line {ln}: bad face index"))?;
                if idx.len() != 3 {
                    return Err(format!("line {ln}: only triangles are supported"));
                }
                if idx.iter().any(|&i| i as usize >= out.vertices.len()) {
                    return Err(format!("line {ln}: face index out of range"));
                }
                out.faces.push([idx[0], idx[1], idx[2]]);
            }
            _ => {}
        }
    }
    Ok(out)
}

pub fn read_obj(path: &Path) -> Result<ObjData> {
    let text = fs::read_to_string(path).map_err(|e| CoreError::io(path, e))?;
    parse_obj(&text).map_err(|msg| CoreError::Parse { path: path.to_path_buf(), msg })
}

pub fn read_json(path: &Path) -> Result<SurfaceMesh> {
    let text = fs::read_to_string(path).map_err(|e| CoreError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CoreError::Parse { path: path.to_path_buf(), msg: e.to_string() })
}

fn sub(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn cross(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::immersion::dot;

    fn small(n: u32) -> SurfaceMesh {
        build_mesh(&DomainSpec::new(n).unwrap(), 21, 9, 1e-10).unwrap()
    }

    #[test]
    fn disk_topology() {
        let m = small(4);
        assert_eq!(m.vertex_count(), 21 * 9);
        assert_eq!(m.face_count(), 2 * 20 * 8);
        assert_eq!(m.euler_characteristic(), 1);
    }

    #[test]
    fn smallest_grid() {
        let m = build_mesh(&DomainSpec::new(2).unwrap(), 2, 3, 1e-10).unwrap();
        assert_eq!((m.vertex_count(), m.face_count(), m.euler_characteristic()), (6, 4, 1));
    }

    #[test]
    fn heights_and_rotation_symmetry() {
        let m = small(8);
        let ny = m.grid_dims.1;
        for (i, p) in m.vertices.iter().enumerate() {
            assert!((p[2] - m.params[i][0]).abs() <= 1e-10);
        }
        for col in 0..m.grid_dims.0 {
            for j in 0..ny {
                let a = m.vertices[col * ny + j];
                let b = m.vertices[col * ny + ny - 1 - j];
                let scale = immersion::norm(&a).max(1.0);
                assert!((a[0] + b[0]).abs() / scale < 1e-12 && (a[1] + b[1]).abs() / scale < 1e-12);
                assert_eq!(a[2], b[2]);
            }
        }
    }

    #[test]
    fn no_degenerate_faces() {
        let m = small(16);
        for f in 0..m.face_count() {
            let [a, b, c] = m.faces[f].map(|i| m.vertices[i as usize]);
            let area = 0.5 * immersion::norm(&cross(&sub(&b, &a), &sub(&c, &a)));
            assert!(area > 1e-18, "face {f}");
        }
    }

    #[test]
    fn faces_follow_the_normal() {
        let m = small(4);
        for f in 0..m.face_count() {
            let fn_ = m.face_normal(f);
            let vn = m.faces[f].map(|i| m.normals[i as usize]);
            let avg: Vec3 = std::array::from_fn(|c| vn.iter().map(|n| n[c]).sum::<f64>());
            assert!(dot(&fn_, &avg) > 0.0, "face {f}");
        }
    }

    #[test]
    fn obj_roundtrip_is_exact() {
        let m = small(2);
        let back = parse_obj(&to_obj(&m)).unwrap();
        assert_eq!(back.vertices, m.vertices);
        assert_eq!(back.normals, m.normals);
        assert_eq!(back.faces, m.faces);
    }

    #[test]
    fn json_roundtrip_is_exact() {
        let m = small(2);
        let back: SurfaceMesh = serde_json::from_str(&to_json(&m)).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn csv_layout() {
        let m = small(2);
        let csv = to_csv(&m);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some(CSV_HEADER));
        let row: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(row.len(), 9);
        assert_eq!(row[0], "2");
        assert_eq!(csv.lines().count(), m.vertex_count() + 1);
    }

    #[test]
    fn slice_rows() {
        let s = DomainSpec::new(4).unwrap();
        let sl = immersion::slice(&s, 0.1, 11, 1e-10).unwrap();
        let csv = slice_csv(&sl);
        assert_eq!(csv.lines().count(), 12);
        assert!(csv.lines().nth(6).unwrap().starts_with("4,0.1,0,0,0,0.1,"));
    }

    #[test]
    fn ply_header_counts() {
        let m = small(2);
        let ply = to_ply(&m);
        assert!(ply.contains(&format!("element vertex {}", m.vertex_count())));
        assert!(ply.contains(&format!("element face {}", m.face_count())));
        let body = ply.split("end_header\n").nth(1).unwrap();
        assert_eq!(body.lines().count(), m.vertex_count() + m.face_count());
    }

    #[test]
    fn truncated_columns_drop_faces() {
        let m = build_mesh(&DomainSpec::new(256).unwrap(), 11, 33, 1e-10).unwrap();
        assert!(m.truncated_columns.iter().any(|&t| t));
        assert!(m.face_count() < 2 * 10 * 32);
        for f in &m.faces {
            for &i in f {
                assert!((i as usize) < m.vertex_count());
            }
        }
        assert!(m.vertices.iter().all(|p| p.iter().all(|c| c.is_finite())));
    }

    #[test]
    fn bad_inputs() {
        let s = DomainSpec::new(2).unwrap();
        assert!(build_mesh(&s, 1, 9, 1e-10).is_err());
        assert!(build_mesh(&s, 4, 8, 1e-10).is_err());
        assert!(parse_obj("v 1 2\n").is_err());
        assert!(parse_obj("v 0 0 0\nf 1 2 3\n").is_err());
        assert!("stl".parse::<MeshFormat>().is_err());
        assert_eq!(MeshFormat::from_path(Path::new("a/b.PLY")), Some(MeshFormat::Ply));
    }

    #[test]
    fn io_errors_carry_the_path() {
        let p = Path::new("/nonexistent-dir/mesh.obj");
        let e = read_obj(p).unwrap_err();
        assert!(e.to_string().contains("/nonexistent-dir/mesh.obj"), "{e}");
    }
}

//! OBJ and PLY export of grid patches.
//!
//! Vertices are in row-major grid order (`u` fastest). Each cell
//! `a = (i, j)`, `b = (i+1, j)`, `c = (i+1, j+1)`, `d = (i, j+1)` becomes the
//! triangles `(a, b, c)` and `(a, c, d)`, counterclockwise about `X_u × X_v`.

use std::fmt::Write as _;
use std::io::{self, Write};
use std::path::Path;

use bjorling_core::bjorling::DomainGrid;
use bjorling_core::Vec3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeshFormat {
    Obj,
    Ply,
}

impl MeshFormat {
    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "obj" => Some(MeshFormat::Obj),
            "ply" => Some(MeshFormat::Ply),
            _ => None,
        }
    }

    pub fn from_path(path: &Path) -> Option<Self> {
        path.extension().and_then(|e| e.to_str()).and_then(Self::parse)
    }

    pub fn name(&self) -> &'static str {
        match self {
            MeshFormat::Obj => "obj",
            MeshFormat::Ply => "ply",
        }
    }
}

/// Positions and optional per-vertex normals on a grid.
#[derive(Debug, Clone, Copy)]
pub struct GridMesh<'a> {
    pub grid: &'a DomainGrid,
    pub points: &'a [Vec3],
    pub normals: &'a [Vec3],
    /// Nodes whose normal is undefined.
    pub singular: &'a [bool],
}

impl GridMesh<'_> {
    pub fn vertex_count(&self) -> usize {
        self.points.len()
    }

    pub fn face_count(&self) -> usize {
        2 * (self.grid.nu - 1) * (self.grid.nv - 1)
    }

    pub fn triangles(&self) -> impl Iterator<Item = [usize; 3]> + '_ {
        let g = self.grid;
        (0..g.nv - 1).flat_map(move |j| {
            (0..g.nu - 1).flat_map(move |i| {
                let (a, b, c, d) = (g.index(i, j), g.index(i + 1, j), g.index(i + 1, j + 1), g.index(i, j + 1));
                [[a, b, c], [a, c, d]]
            })
        })
    }
}

fn sci(v: f64) -> String {
    // Nine significant digits; `-0` is printed as `0` so the output does not depend on signed zeros.
    let v = if v == 0.0 { 0.0 } else { v };
    format!("{v:.8e}")
}

pub fn obj_string(mesh: &GridMesh<'_>) -> String {
    let mut out = String::with_capacity(mesh.vertex_count() * 64);
    let _ = writeln!(out, "# {} vertices, {} faces", mesh.vertex_count(), mesh.face_count());
    for p in mesh.points {
        let _ = writeln!(out, "v {} {} {}", sci(p.x), sci(p.y), sci(p.z));
    }
    // OBJ numbers normals in the order written, so skipped nodes shift the indices.
    let mut normal_index = vec![0usize; mesh.vertex_count()];
    let mut next = 1;
    for (k, n) in mesh.normals.iter().enumerate() {
        if !mesh.singular[k] {
            let _ = writeln!(out, "vn {} {} {}", sci(n.x), sci(n.y), sci(n.z));
            normal_index[k] = next;
            next += 1;
        }
    }
    for tri in mesh.triangles() {
        out.push('f');
        let with_normals = tri.iter().all(|&k| normal_index[k] > 0);
        for k in tri {
            if with_normals {
                let _ = write!(out, " {}//{}", k + 1, normal_index[k]);
            } else {
                let _ = write!(out, " {}", k + 1);
            }
        }
        out.push('\n');
    }
    out
}

/// Binary little-endian PLY with double positions and normals; singular nodes get a zero normal.
pub fn ply_bytes(mesh: &GridMesh<'_>) -> Vec<u8> {
    let header = format!(
        "ply\nformat binary_little_endian 1.0\ncomment grid {}x{}, zero normal marks a singular node\n\
         element vertex {}\nproperty double x\nproperty double y\nproperty double z\n\
         property double nx\nproperty double ny\nproperty double nz\n\
         element face {}\nproperty list uchar uint vertex_indices\nend_header\n",
        mesh.grid.nu,
        mesh.grid.nv,
        mesh.vertex_count(),
        mesh.face_count()
    );
    let mut out = header.into_bytes();
    out.reserve(mesh.vertex_count() * 48 + mesh.face_count() * 13);
    for (k, p) in mesh.points.iter().enumerate() {
        let n = if mesh.singular[k] { Vec3::zeros() } else { mesh.normals[k] };
        for v in [p.x, p.y, p.z, n.x, n.y, n.z] {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    for tri in mesh.triangles() {
        out.push(3);
        for k in tri {
            out.extend_from_slice(&(k as u32).to_le_bytes());
        }
    }
    out
}

pub fn mesh_bytes(mesh: &GridMesh<'_>, format: MeshFormat) -> Vec<u8> {
    match format {
        MeshFormat::Obj => obj_string(mesh).into_bytes(),
        MeshFormat::Ply => ply_bytes(mesh),
    }
}

pub fn export_mesh(mesh: &GridMesh<'_>, format: MeshFormat, path: &Path) -> io::Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    let mut file = io::BufWriter::new(std::fs::File::create(path)?);
    file.write_all(&mesh_bytes(mesh, format))?;
    file.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square(nu: usize, nv: usize) -> (DomainGrid, Vec<Vec3>, Vec<Vec3>) {
        let g = DomainGrid::new((0.0, 1.0), (0.0, 1.0), nu, nv).unwrap();
        let pts = (0..g.len()).map(|k| Vec3::new(g.u(k % nu), g.v(k / nu), 0.0)).collect();
        let nrm = vec![Vec3::z(); g.len()];
        (g, pts, nrm)
    }

    #[test]
    fn two_by_two_is_two_counterclockwise_triangles() {
        let (g, pts, nrm) = square(2, 2);
        let sing = vec![false; 4];
        let m = GridMesh {
            grid: &g,
            points: &pts,
            normals: &nrm,
            singular: &sing,
        };
        let tris: Vec<_> = m.triangles().collect();
        assert_eq!(tris, vec![[0, 1, 3], [0, 3, 2]]);
        for [a, b, c] in tris {
            let n = (pts[b] - pts[a]).cross(&(pts[c] - pts[a]));
            assert!(n.dot(&Vec3::z()) > 0.0);
        }
        let obj = obj_string(&m);
        assert_eq!(obj.lines().filter(|l| l.starts_with("v ")).count(), 4);
        assert_eq!(obj.lines().filter(|l| l.starts_with("f ")).count(), 2);
        assert!(obj.contains("v 1.00000000e0 0.00000000e0 0.00000000e0\n"));
        assert!(obj.contains("f 1//1 2//2 4//4\n"));
    }

    #[test]
    fn singular_nodes_lose_their_normals() {
        let (g, pts, nrm) = square(3, 2);
        let mut sing = vec![false; 6];
        sing[1] = true;
        let m = GridMesh {
            grid: &g,
            points: &pts,
            normals: &nrm,
            singular: &sing,
        };
        let obj = obj_string(&m);
        assert_eq!(obj.lines().filter(|l| l.starts_with("vn ")).count(), 5);
        // Faces touching node 2 (1-based) are written without normals; the others reindex.
        assert!(obj.contains("f 1 2 5\n"));
        assert!(obj.contains("f 2 3 6\n"));
        assert!(obj.contains("f 1//1 5//4 4//3\n"));
    }

    #[test]
    fn ply_layout() {
        let (g, pts, nrm) = square(101, 101);
        let sing = vec![false; g.len()];
        let m = GridMesh {
            grid: &g,
            points: &pts,
            normals: &nrm,
            singular: &sing,
        };
        assert_eq!((m.vertex_count(), m.face_count()), (10201, 20000));
        let bytes = ply_bytes(&m);
        let end = bytes.windows(11).position(|w| w == b"end_header\n").unwrap() + 11;
        assert_eq!(bytes.len() - end, 10201 * 48 + 20000 * 13);
        assert!(std::str::from_utf8(&bytes[..end]).unwrap().contains("element face 20000"));
        let x1 = f64::from_le_bytes(bytes[end + 48..end + 56].try_into().unwrap());
        assert_eq!(x1, 0.01);
        assert_eq!(ply_bytes(&m), bytes);
    }
}

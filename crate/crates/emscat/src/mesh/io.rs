//! Mesh file IO: Gmsh ASCII v2 `.msh` and Wavefront `.obj`.
//!
//! Coordinates are interpreted in meters. In `.msh` files the physical tag of
//! each triangle element becomes the scatterer id; in `.obj` files each `o`
//! object is a separate body.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use super::{MeshError, MeshFormat, SurfaceMesh};
use crate::geom::Vec3;

/// Load a single closed body from a mesh file.
///
/// Errors if the file holds more than one body; use [`load_bodies`] for
/// multi-body files.
pub fn load_mesh(path: impl AsRef<Path>, format: MeshFormat) -> Result<SurfaceMesh, MeshError> {
    let mut bodies = load_bodies(path, format)?;
    match bodies.len() {
        1 => Ok(bodies.pop().expect("length checked")),
        n => Err(MeshError::MultipleBodies { count: n }),
    }
}

/// Load every body in a mesh file, one validated `SurfaceMesh` each.
pub fn load_bodies(
    path: impl AsRef<Path>,
    format: MeshFormat,
) -> Result<Vec<SurfaceMesh>, MeshError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| MeshError::Io {
        path: path.display().to_string(),
        source,
    })?;
    match format {
        MeshFormat::GmshV2 => parse_gmsh_v2(&text),
        MeshFormat::Obj => parse_obj(&text),
    }
}

fn parse_err(line: usize, msg: impl Into<String>) -> MeshError {
    MeshError::Parse {
        line,
        msg: msg.into(),
    }
}

/// Parse Gmsh ASCII v2. Only 3-node triangle elements (type 2) are used;
/// point/line elements are skipped.
pub fn parse_gmsh_v2(text: &str) -> Result<Vec<SurfaceMesh>, MeshError> {
    let lines: Vec<&str> = text.lines().collect();
    let mut i = 0usize;
    let mut node_pos: HashMap<u64, Vec3> = HashMap::new();
    // (physical tag, node ids)
    let mut tris: Vec<(i64, [u64; 3])> = Vec::new();
    let mut saw_format = false;

    while i < lines.len() {
        let line = lines[i].trim();
        match line {
            "$MeshFormat" => {
                let l = lines
                    .get(i + 1)
                    .ok_or_else(|| parse_err(i + 2, "truncated $MeshFormat"))?;
                let version = l
                    .split_whitespace()
                    .next()
                    .ok_or_else(|| parse_err(i + 2, "empty format line"))?;
                if !version.starts_with("2.") {
                    return Err(parse_err(
                        i + 2,
                        format!("unsupported msh version {version}"),
                    ));
                }
                saw_format = true;
                i += 2;
                while i < lines.len() && lines[i].trim() != "$EndMeshFormat" {
                    i += 1;
                }
                i += 1;
            }
            "$Nodes" => {
                let count: usize = lines
                    .get(i + 1)
                    .and_then(|l| l.trim().parse().ok())
                    .ok_or_else(|| parse_err(i + 2, "bad node count"))?;
                for k in 0..count {
                    let ln = i + 2 + k;
                    let l = lines
                        .get(ln)
                        .ok_or_else(|| parse_err(ln + 1, "truncated $Nodes"))?;
                    let mut it = l.split_whitespace();
                    let id: u64 = it
                        .next()
                        .and_then(|s| s.parse().ok())
                        .ok_or_else(|| parse_err(ln + 1, "bad node id"))?;
                    let mut coord = [0.0f64; 3];
                    for c in &mut coord {
                        *c = it
                            .next()
                            .and_then(|s| s.parse().ok())
                            .ok_or_else(|| parse_err(ln + 1, "bad node coordinate"))?;
                    }
                    node_pos.insert(id, Vec3::new(coord[0], coord[1], coord[2]));
                }
                i += 2 + count;
                if lines.get(i).map(|l| l.trim()) != Some("$EndNodes") {
                    return Err(parse_err(i + 1, "missing $EndNodes"));
                }
                i += 1;
            }
            "$Elements" => {
                let count: usize = lines
                    .get(i + 1)
                    .and_then(|l| l.trim().parse().ok())
                    .ok_or_else(|| parse_err(i + 2, "bad element count"))?;
                for k in 0..count {
                    let ln = i + 2 + k;
                    let l = lines
                        .get(ln)
                        .ok_or_else(|| parse_err(ln + 1, "truncated $Elements"))?;
                    let fields: Vec<&str> = l.split_whitespace().collect();
                    if fields.len() < 3 {
                        return Err(parse_err(ln + 1, "short element line"));
                    }
                    let etype: u32 = fields[1]
                        .parse()
                        .map_err(|_| parse_err(ln + 1, "bad element type"))?;
                    if etype != 2 {
                        continue; // not a 3-node triangle
                    }
                    let ntags: usize = fields[2]
                        .parse()
                        .map_err(|_| parse_err(ln + 1, "bad tag count"))?;
                    let phys: i64 = if ntags >= 1 {
                        fields
                            .get(3)
                            .and_then(|s| s.parse().ok())
                            .ok_or_else(|| parse_err(ln + 1, "bad physical tag"))?
                    } else {
                        0
                    };
                    let base = 3 + ntags;
                    if fields.len() < base + 3 {
                        return Err(parse_err(ln + 1, "triangle element missing nodes"));
                    }
                    let mut nodes = [0u64; 3];
                    for (slot, f) in nodes.iter_mut().zip(&fields[base..base + 3]) {
                        *slot = f
                            .parse()
                            .map_err(|_| parse_err(ln + 1, "bad node reference"))?;
                    }
                    tris.push((phys, nodes));
                }
                i += 2 + count;
                if lines.get(i).map(|l| l.trim()) != Some("$EndElements") {
                    return Err(parse_err(i + 1, "missing $EndElements"));
                }
                i += 1;
            }
            _ => i += 1,
        }
    }

    if !saw_format {
        return Err(parse_err(1, "not a Gmsh ASCII v2 file (no $MeshFormat)"));
    }
    if tris.is_empty() {
        return Err(MeshError::Empty);
    }

    // Group triangles by physical tag; each tag is one body.
    let mut tags: Vec<i64> = tris.iter().map(|(t, _)| *t).collect();
    tags.sort_unstable();
    tags.dedup();
    let mut bodies = Vec::new();
    for tag in tags {
        let mut local: HashMap<u64, usize> = HashMap::new();
        let mut vertices = Vec::new();
        let mut triangles = Vec::new();
        for (t, nodes) in tris.iter().filter(|(t, _)| *t == tag) {
            let mut tri = [0usize; 3];
            for (slot, node) in tri.iter_mut().zip(nodes) {
                let pos = node_pos.get(node).ok_or_else(|| {
                    parse_err(0, format!("element references unknown node {node}"))
                })?;
                *slot = *local.entry(*node).or_insert_with(|| {
                    vertices.push(*pos);
                    vertices.len() - 1
                });
            }
            let _ = t;
            triangles.push(tri);
        }
        bodies.push(SurfaceMesh::build(
            vertices,
            triangles,
            tag.max(0) as usize,
        )?);
    }
    Ok(bodies)
}

/// Parse a triangulated Wavefront OBJ; `f` entries may use `v`, `v/t`,
/// `v/t/n` or `v//n` references.
pub fn parse_obj(text: &str) -> Result<Vec<SurfaceMesh>, MeshError> {
    let mut vertices: Vec<Vec3> = Vec::new();
    // (object id, triangle of global vertex indices)
    let mut faces: Vec<(usize, [usize; 3])> = Vec::new();
    let mut object = 0usize;
    let mut saw_object = false;

    for (ln, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut it = line.split_whitespace();
        match it.next() {
            Some("v") => {
                let mut coord = [0.0f64; 3];
                for c in &mut coord {
                    *c = it
                        .next()
                        .and_then(|s| s.parse().ok())
                        .ok_or_else(|| parse_err(ln + 1, "bad vertex coordinate"))?;
                }
                vertices.push(Vec3::new(coord[0], coord[1], coord[2]));
            }
            Some("o") | Some("g") => {
                if saw_object {
                    object += 1;
                } else {
                    saw_object = true;
                }
            }
            Some("f") => {
                let idx: Vec<usize> = it
                    .map(|tok| {
                        let first = tok.split('/').next().unwrap_or("");
                        first
                            .parse::<i64>()
                            .ok()
                            .and_then(|v| {
                                if v > 0 {
                                    Some(v as usize - 1)
                                } else if v < 0 {
                                    vertices.len().checked_sub(v.unsigned_abs() as usize)
                                } else {
                                    None
                                }
                            })
                            .ok_or_else(|| parse_err(ln + 1, format!("bad face index {tok:?}")))
                    })
                    .collect::<Result<_, _>>()?;
                if idx.len() != 3 {
                    return Err(parse_err(
                        ln + 1,
                        format!(
                            "face with {} vertices; mesh must be triangulated",
                            idx.len()
                        ),
                    ));
                }
                faces.push((object, [idx[0], idx[1], idx[2]]));
            }
            _ => {}
        }
    }
    if faces.is_empty() {
        return Err(MeshError::Empty);
    }

    let n_objects = faces.iter().map(|(o, _)| *o).max().unwrap_or(0) + 1;
    let mut bodies = Vec::new();
    for obj in 0..n_objects {
        let mut local: HashMap<usize, usize> = HashMap::new();
        let mut verts = Vec::new();
        let mut triangles = Vec::new();
        for (_, tri) in faces.iter().filter(|(o, _)| *o == obj) {
            let mut t = [0usize; 3];
            for (slot, &gi) in t.iter_mut().zip(tri) {
                if gi >= vertices.len() {
                    return Err(parse_err(
                        0,
                        format!("face references vertex {} of {}", gi + 1, vertices.len()),
                    ));
                }
                *slot = *local.entry(gi).or_insert_with(|| {
                    verts.push(vertices[gi]);
                    verts.len() - 1
                });
            }
            triangles.push(t);
        }
        bodies.push(SurfaceMesh::build(verts, triangles, obj)?);
    }
    Ok(bodies)
}

/// Serialize one or more bodies as Gmsh ASCII v2 (physical tag = scatterer id).
pub fn to_gmsh_v2(bodies: &[&SurfaceMesh]) -> String {
    let mut out = String::new();
    out.push_str("$MeshFormat\n2.2 0 8\n$EndMeshFormat\n");
    let total_nodes: usize = bodies.iter().map(|m| m.num_vertices()).sum();
    let total_tris: usize = bodies.iter().map(|m| m.num_triangles()).sum();
    out.push_str("$Nodes\n");
    let _ = writeln!(out, "{total_nodes}");
    let mut base = 1u64;
    let mut bases = Vec::new();
    for m in bodies {
        bases.push(base);
        for (i, v) in m.vertices.iter().enumerate() {
            let _ = writeln!(
                out,
                "{} {:.17e} {:.17e} {:.17e}",
                base + i as u64,
                v.x,
                v.y,
                v.z
            );
        }
        base += m.num_vertices() as u64;
    }
    out.push_str("$EndNodes\n$Elements\n");
    let _ = writeln!(out, "{total_tris}");
    let mut eid = 1u64;
    for (m, b) in bodies.iter().zip(&bases) {
        for t in &m.triangles {
            let _ = writeln!(
                out,
                "{} 2 2 {} 0 {} {} {}",
                eid,
                m.scatterer_id,
                b + t[0] as u64,
                b + t[1] as u64,
                b + t[2] as u64
            );
            eid += 1;
        }
    }
    out.push_str("$EndElements\n");
    out
}

pub fn save_gmsh_v2(path: impl AsRef<Path>, bodies: &[&SurfaceMesh]) -> Result<(), MeshError> {
    let path = path.as_ref();
    std::fs::write(path, to_gmsh_v2(bodies)).map_err(|source| MeshError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Serialize bodies as a Wavefront OBJ, one `o` object per body.
pub fn to_obj(bodies: &[&SurfaceMesh]) -> String {
    let mut out = String::new();
    let mut base = 1usize;
    for m in bodies {
        let _ = writeln!(out, "o scatterer_{}", m.scatterer_id);
        for v in &m.vertices {
            let _ = writeln!(out, "v {:.17e} {:.17e} {:.17e}", v.x, v.y, v.z);
        }
        for t in &m.triangles {
            let _ = writeln!(out, "f {} {} {}", base + t[0], base + t[1], base + t[2]);
        }
        base += m.num_vertices();
    }
    out
}

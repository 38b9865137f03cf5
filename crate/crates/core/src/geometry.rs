//! Coordinates for a Wythoffian polytope and the numerical checks run on them.

use std::collections::HashMap;
use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use thiserror::Error;

use crate::decoration::Decoration012;
use crate::group::{Group, SimpleNormals};
use crate::lattice::{FaceLattice, EMPTY_FACE};

/// Orbit points closer than this are one vertex.
pub const VERTEX_TOLERANCE: f64 = 1e-7;
/// Distinct vertices must be at least this far apart.
pub const VERTEX_SEPARATION: f64 = 1e-3;
/// Singular values above this count towards a face's dimension.
pub const RANK_THRESHOLD: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("mirror system is singular")]
    SingularSystem,
    #[error("orbit points {distance:e} apart are neither equal nor separated")]
    DedupCollision { distance: f64 },
    #[error("orbit has {found} distinct points but the lattice has {expected} vertices")]
    VertexCountMismatch { found: usize, expected: usize },
    #[error("ridge {ridge} spans a {found}-dimensional subspace, expected {expected}")]
    SpanDeficient { ridge: u32, found: usize, expected: usize },
    #[error("OFF export needs a 3-dimensional polytope, this one has dimension {0}")]
    UnsupportedDimension(usize),
}

/// Unit point on every crossed mirror, equidistant from the ringed ones.
#[derive(Debug, Clone)]
pub struct WythoffPoint {
    pub x: DVector<f64>,
    pub ring_distance: f64,
}

pub fn wythoff_point(normals: &SimpleNormals, f0: &Decoration012) -> Result<WythoffPoint, GeometryError> {
    let n = normals.dim();
    let rhs = DVector::from_fn(n, |i, _| if f0.value(i) == 1 { 1.0 } else { 0.0 });
    let solution = normals.as_rows().lu().solve(&rhs).ok_or(GeometryError::SingularSystem)?;
    let norm = solution.norm();
    if !norm.is_finite() || norm == 0.0 {
        return Err(GeometryError::SingularSystem);
    }
    Ok(WythoffPoint { x: solution / norm, ring_distance: 1.0 / norm })
}

/// Sorted-projection index for tolerance lookups of points.
#[derive(Debug, Clone)]
struct PointIndex {
    direction: DVector<f64>,
    keys: Vec<(f64, u32)>,
}

impl PointIndex {
    fn new(points: &[DVector<f64>]) -> Self {
        let dim = points.first().map_or(0, |p| p.len());
        let direction = generic_direction(dim);
        let mut keys: Vec<(f64, u32)> =
            points.iter().enumerate().map(|(i, p)| (p.dot(&direction), i as u32)).collect();
        keys.sort_by(|a, b| a.0.total_cmp(&b.0));
        Self { direction, keys }
    }

    fn find(&self, points: &[DVector<f64>], q: &DVector<f64>, tol: f64) -> Option<u32> {
        let key = q.dot(&self.direction);
        let start = self.keys.partition_point(|&(k, _)| k < key - tol);
        self.keys[start..]
            .iter()
            .take_while(|&&(k, _)| k <= key + tol)
            .find(|&&(_, i)| (&points[i as usize] - q).amax() <= tol)
            .map(|&(_, i)| i)
    }
}

fn generic_direction(dim: usize) -> DVector<f64> {
    let v = DVector::from_fn(dim, |i, _| 1.0 / ((i as f64) + 1.7).sqrt());
    let norm = v.norm();
    if norm == 0.0 {
        v
    } else {
        v / norm
    }
}

/// Vertex coordinates and per-face vertex sets.
#[derive(Debug, Clone)]
pub struct Realization {
    dim: usize,
    vertices: Vec<DVector<f64>>,
    face_vertices: Vec<Vec<u32>>,
    face_ranks: Vec<i32>,
    faces_by_rank: Vec<Vec<u32>>,
    centroid: DVector<f64>,
    index: PointIndex,
}

/// Orbit of `x`, clustered at [`VERTEX_TOLERANCE`], with vertices ordered
/// like the lattice's rank-0 faces.
pub fn realize(l: &FaceLattice, g: &Group, x: &WythoffPoint) -> Result<Realization, GeometryError> {
    let dim = g.rank();
    let order = g.order();
    let points: Vec<DVector<f64>> = (0..order as u32).map(|e| g.apply(e, &x.x)).collect();

    // Cluster along a generic projection; anything within the separation
    // window must be either the same point or far apart.
    let direction = generic_direction(dim);
    let mut sorted: Vec<(f64, u32)> = points.iter().enumerate().map(|(i, p)| (p.dot(&direction), i as u32)).collect();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut cluster = vec![u32::MAX; order];
    let mut reps: Vec<u32> = Vec::new();
    let mut active: Vec<u32> = Vec::new();
    for &(key, i) in &sorted {
        active.retain(|&c| points[reps[c as usize] as usize].dot(&direction) >= key - VERTEX_SEPARATION);
        let mut assigned = None;
        for &c in &active {
            let dist = (&points[reps[c as usize] as usize] - &points[i as usize]).norm();
            if dist <= VERTEX_TOLERANCE {
                assigned = Some(c);
                break;
            } else if dist < VERTEX_SEPARATION {
                return Err(GeometryError::DedupCollision { distance: dist });
            }
        }
        let c = assigned.unwrap_or_else(|| {
            reps.push(i);
            active.push(reps.len() as u32 - 1);
            reps.len() as u32 - 1
        });
        cluster[i as usize] = c;
    }

    let rank0 = l.rank_range(0);
    if reps.len() != rank0.len() {
        return Err(GeometryError::VertexCountMismatch { found: reps.len(), expected: rank0.len() });
    }
    let mut vertex_of_cluster = vec![u32::MAX; reps.len()];
    for (v, face) in rank0.clone().enumerate() {
        let c = cluster[l.face(face).coset as usize] as usize;
        if vertex_of_cluster[c] != u32::MAX {
            return Err(GeometryError::VertexCountMismatch { found: reps.len(), expected: rank0.len() });
        }
        vertex_of_cluster[c] = v as u32;
    }
    let mut vertices = vec![DVector::zeros(dim); reps.len()];
    for (c, &rep) in reps.iter().enumerate() {
        vertices[vertex_of_cluster[c] as usize] = points[rep as usize].clone();
    }

    let mut face_vertices: Vec<Vec<u32>> = vec![Vec::new(); l.len()];
    for di in 0..l.decorations().len() as u32 {
        for e in 0..order as u32 {
            let face = l.face_of_element(di, e);
            face_vertices[face as usize].push(vertex_of_cluster[cluster[e as usize] as usize]);
        }
    }
    for list in &mut face_vertices {
        list.sort_unstable();
        list.dedup();
    }
    let face_ranks: Vec<i32> = l.faces().iter().map(|f| f.rank).collect();
    let mut faces_by_rank = vec![Vec::new(); dim + 1];
    for (id, &r) in face_ranks.iter().enumerate() {
        if r >= 0 {
            faces_by_rank[r as usize].push(id as u32);
        }
    }
    let centroid = vertices.iter().fold(DVector::zeros(dim), |acc, v| acc + v) / vertices.len() as f64;
    let index = PointIndex::new(&vertices);
    Ok(Realization { dim, vertices, face_vertices, face_ranks, faces_by_rank, centroid, index })
}

fn affine_dimension(points: &[&DVector<f64>]) -> usize {
    if points.len() <= 1 {
        return 0;
    }
    let dim = points[0].len();
    let mean = points.iter().fold(DVector::zeros(dim), |acc, p| acc + *p) / points.len() as f64;
    linear_dimension_of(points.iter().map(|p| *p - &mean))
}

fn linear_dimension_of(rows: impl Iterator<Item = DVector<f64>>) -> usize {
    let rows: Vec<DVector<f64>> = rows.collect();
    if rows.is_empty() {
        return 0;
    }
    let dim = rows[0].len();
    let m = DMatrix::from_fn(rows.len(), dim, |i, j| rows[i][j]);
    m.singular_values().iter().filter(|&&s| s > RANK_THRESHOLD).count()
}

impl Realization {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[DVector<f64>] {
        &self.vertices
    }

    pub fn centroid(&self) -> &DVector<f64> {
        &self.centroid
    }

    pub fn face_vertices(&self, face: u32) -> &[u32] {
        &self.face_vertices[face as usize]
    }

    pub fn faces_of_rank(&self, k: usize) -> &[u32] {
        &self.faces_by_rank[k]
    }

    pub fn face_rank(&self, face: u32) -> i32 {
        self.face_ranks[face as usize]
    }

    pub fn find_vertex(&self, p: &DVector<f64>) -> Option<u32> {
        self.index.find(&self.vertices, p, VERTEX_TOLERANCE)
    }

    pub fn face_centroid(&self, face: u32) -> DVector<f64> {
        let vs = self.face_vertices(face);
        vs.iter().fold(DVector::zeros(self.dim), |acc, &v| acc + &self.vertices[v as usize]) / vs.len() as f64
    }

    /// Edge lengths must agree within a relative spread of 1e-9.
    pub fn check_uniform_edges(&self) -> EdgeReport {
        let lengths: Vec<f64> = self
            .faces_of_rank(1.min(self.dim))
            .iter()
            .map(|&e| {
                let vs = self.face_vertices(e);
                (&self.vertices[vs[0] as usize] - &self.vertices[vs[vs.len() - 1] as usize]).norm()
            })
            .collect();
        let min = lengths.iter().copied().fold(f64::INFINITY, f64::min);
        let max = lengths.iter().copied().fold(0.0, f64::max);
        EdgeReport { edges: lengths.len(), min, max, relative_spread: if max > 0.0 { (max - min) / max } else { 0.0 } }
    }

    /// Faces whose vertex set does not span an affine space of the face's rank.
    pub fn check_face_dimensions(&self) -> Vec<u32> {
        (0..self.face_vertices.len() as u32)
            .filter(|&f| self.face_ranks[f as usize] >= 0)
            .filter(|&f| {
                let pts: Vec<&DVector<f64>> =
                    self.face_vertices(f).iter().map(|&v| &self.vertices[v as usize]).collect();
                affine_dimension(&pts) != self.face_ranks[f as usize] as usize
            })
            .collect()
    }

    /// Cover pairs whose vertex sets are not strictly nested, plus pairs of
    /// equal-rank faces sharing a vertex set.
    pub fn check_cover_containment(&self, l: &FaceLattice) -> Vec<(u32, u32)> {
        let mut bad: Vec<(u32, u32)> = l
            .cover_pairs()
            .filter(|&(a, b)| {
                let (va, vb) = (self.face_vertices(a), self.face_vertices(b));
                !(va.len() < vb.len() && va.iter().all(|v| vb.binary_search(v).is_ok()))
                    && !(a == EMPTY_FACE && !vb.is_empty())
            })
            .collect();
        let mut seen: HashMap<(i32, &[u32]), u32> = HashMap::new();
        for id in 0..self.face_vertices.len() as u32 {
            if let Some(&other) = seen.get(&(self.face_ranks[id as usize], self.face_vertices(id))) {
                bad.push((other, id));
            } else {
                seen.insert((self.face_ranks[id as usize], self.face_vertices(id)), id);
            }
        }
        bad
    }

    /// Reflection through the hyperplane spanned by each ridge must map the
    /// vertex set onto itself.
    pub fn ridge_reflection_check(&self) -> Result<RidgeReport, GeometryError> {
        let n = self.dim;
        assert!(n >= 2, "ridges need dimension at least 2");
        let mut reflections = Vec::new();
        let mut failures = Vec::new();
        let mut worst: f64 = 0.0;
        for &ridge in self.faces_of_rank(n - 2) {
            let vs = self.face_vertices(ridge);
            let m = DMatrix::from_fn(vs.len(), n, |i, j| self.vertices[vs[i] as usize][j]);
            let svd = m.clone().svd(false, true);
            let rank = svd.singular_values.iter().filter(|&&s| s > RANK_THRESHOLD).count();
            if rank != n - 1 {
                return Err(GeometryError::SpanDeficient { ridge, found: rank, expected: n - 1 });
            }
            let v_t = svd.v_t.expect("requested");
            let smallest = svd
                .singular_values
                .iter()
                .enumerate()
                .min_by(|a, b| a.1.total_cmp(b.1))
                .map(|(i, _)| i)
                .unwrap();
            // with fewer rows than columns the null vector is missing from v_t
            let normal = if vs.len() < n {
                null_vector(&m)
            } else {
                DVector::from_fn(n, |j, _| v_t[(smallest, j)])
            };
            let mut perm = Vec::with_capacity(self.vertices.len());
            let mut ok = true;
            for v in &self.vertices {
                let image = v - &normal * (2.0 * normal.dot(v));
                match self.find_vertex(&image) {
                    Some(i) => {
                        worst = worst.max((&self.vertices[i as usize] - &image).amax());
                        perm.push(i);
                    }
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                reflections.push(RidgeReflection { ridge, normal, vertex_permutation: perm });
            } else {
                failures.push(ridge);
            }
        }
        Ok(RidgeReport { ridges: self.faces_of_rank(n - 2).len(), failures, reflections, worst_match: worst })
    }

    /// Facet centroids: equal norms, and one orbit under the ridge reflections.
    pub fn polar_dual_check(&self, ridges: &RidgeReport) -> DualReport {
        let n = self.dim;
        let facets = self.faces_of_rank(n - 1);
        let centroids: Vec<DVector<f64>> = facets.iter().map(|&f| self.face_centroid(f)).collect();
        let norms: Vec<f64> = centroids.iter().map(|c| c.norm()).collect();
        let max = norms.iter().copied().fold(0.0, f64::max);
        let min = norms.iter().copied().fold(f64::INFINITY, f64::min);
        let index = PointIndex::new(&centroids);
        let mut reached = vec![false; centroids.len()];
        let mut stack = vec![0usize];
        reached[0] = true;
        let mut unmatched = 0;
        while let Some(i) = stack.pop() {
            for r in &ridges.reflections {
                let image = &centroids[i] - &r.normal * (2.0 * r.normal.dot(&centroids[i]));
                match index.find(&centroids, &image, VERTEX_TOLERANCE) {
                    Some(j) if !reached[j as usize] => {
                        reached[j as usize] = true;
                        stack.push(j as usize);
                    }
                    Some(_) => {}
                    None => unmatched += 1,
                }
            }
        }
        DualReport {
            facets: centroids.len(),
            norm_spread: if max > 0.0 { (max - min) / max } else { 0.0 },
            orbit_size: reached.iter().filter(|&&r| r).count(),
            unmatched_images: unmatched,
        }
    }

    /// OFF mesh: vertices, then 2-faces in counterclockwise order seen from outside.
    pub fn export_off(&self) -> Result<String, GeometryError> {
        if self.dim != 3 {
            return Err(GeometryError::UnsupportedDimension(self.dim));
        }
        let faces = self.faces_of_rank(2);
        let mut out = String::new();
        writeln!(out, "OFF").unwrap();
        writeln!(out, "{} {} 0", self.vertices.len(), faces.len()).unwrap();
        for v in &self.vertices {
            writeln!(out, "{} {} {}", fmt_coord(v[0]), fmt_coord(v[1]), fmt_coord(v[2])).unwrap();
        }
        for &f in faces {
            let cycle = self.polygon_cycle(f);
            write!(out, "{}", cycle.len()).unwrap();
            for v in cycle {
                write!(out, " {v}").unwrap();
            }
            out.push('\n');
        }
        Ok(out)
    }

    /// Vertices of a 2-face in cyclic order, counterclockwise seen from the
    /// side away from the origin.
    pub fn polygon_cycle(&self, face: u32) -> Vec<u32> {
        let vs = self.face_vertices(face);
        let c = self.face_centroid(face);
        let pts: Vec<DVector<f64>> = vs.iter().map(|&v| &self.vertices[v as usize] - &c).collect();
        let e1 = pts[0].normalize();
        // second in-plane direction by Gram-Schmidt against the most orthogonal point
        let other = pts
            .iter()
            .max_by(|a, b| {
                let ra = (*a - &e1 * e1.dot(a)).norm();
                let rb = (*b - &e1 * e1.dot(b)).norm();
                ra.total_cmp(&rb)
            })
            .unwrap();
        let mut e2 = other - &e1 * e1.dot(other);
        e2 /= e2.norm();
        if self.dim == 3 {
            let a = nalgebra::Vector3::new(e1[0], e1[1], e1[2]);
            let b = nalgebra::Vector3::new(e2[0], e2[1], e2[2]);
            let normal = a.cross(&b);
            if normal.dot(&nalgebra::Vector3::new(c[0], c[1], c[2])) < 0.0 {
                e2 = -e2;
            }
        }
        let mut order: Vec<(f64, u32)> =
            pts.iter().zip(vs).map(|(p, &v)| (e2.dot(p).atan2(e1.dot(p)), v)).collect();
        order.sort_by(|a, b| a.0.total_cmp(&b.0));
        order.into_iter().map(|(_, v)| v).collect()
    }

    /// Vertices and per-rank vertex-index lists.
    pub fn document(&self) -> RealizationDocument {
        RealizationDocument {
            dimension: self.dim,
            vertices: self.vertices.iter().map(|v| v.iter().map(|&x| clean(x)).collect()).collect(),
            faces: (0..=self.dim)
                .map(|k| self.faces_of_rank(k).iter().map(|&f| self.face_vertices(f).to_vec()).collect())
                .collect(),
        }
    }
}

fn null_vector(m: &DMatrix<f64>) -> DVector<f64> {
    // pad with zero rows so the SVD returns a full V
    let n = m.ncols();
    let padded = DMatrix::from_fn(n, n, |i, j| if i < m.nrows() { m[(i, j)] } else { 0.0 });
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("requested");
    let smallest = svd
        .singular_values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .unwrap();
    DVector::from_fn(n, |j, _| v_t[(smallest, j)])
}

fn clean(x: f64) -> f64 {
    if x.abs() < 5e-13 {
        0.0
    } else {
        x
    }
}

fn fmt_coord(x: f64) -> String {
    format!("{:.9}", clean(x))
}

#[derive(Debug, Clone, PartialEq)]
pub struct EdgeReport {
    pub edges: usize,
    pub min: f64,
    pub max: f64,
    pub relative_spread: f64,
}

#[derive(Debug, Clone)]
pub struct RidgeReflection {
    pub ridge: u32,
    pub normal: DVector<f64>,
    /// Image of each vertex index under the reflection.
    pub vertex_permutation: Vec<u32>,
}

#[derive(Debug, Clone)]
pub struct RidgeReport {
    pub ridges: usize,
    /// Ridges whose reflection does not preserve the vertex set.
    pub failures: Vec<u32>,
    pub reflections: Vec<RidgeReflection>,
    /// Largest coordinate error among matched reflected vertices.
    pub worst_match: f64,
}

impl RidgeReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DualReport {
    pub facets: usize,
    pub norm_spread: f64,
    pub orbit_size: usize,
    pub unmatched_images: usize,
}

impl DualReport {
    pub fn ok(&self) -> bool {
        self.norm_spread <= 1e-9 && self.orbit_size == self.facets && self.unmatched_images == 0
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RealizationDocument {
    pub dimension: usize,
    pub vertices: Vec<Vec<f64>>,
    /// For each rank `0..=n`, the vertex-index list of every face.
    pub faces: Vec<Vec<Vec<u32>>>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::DecoratedDiagram;
    use crate::group::simple_normals;

    fn build(s: &str) -> (FaceLattice, Realization) {
        let d = DecoratedDiagram::parse(s).unwrap();
        let g = Group::of(&d).unwrap();
        let l = FaceLattice::build(&d, &g).unwrap();
        let x = wythoff_point(g.normals(), &Decoration012::initial(&d)).unwrap();
        let r = realize(&l, &g, &x).unwrap();
        (l, r)
    }

    #[test]
    fn wythoff_points() {
        let d = DecoratedDiagram::parse("x4x").unwrap();
        let n = simple_normals(&d).unwrap();
        let p = wythoff_point(&n, &Decoration012::initial(&d)).unwrap();
        let (a, b) = (n.vectors()[0].dot(&p.x), n.vectors()[1].dot(&p.x));
        assert!((a - b).abs() < 1e-10 && a > 0.0);
        assert!((p.x.norm() - 1.0).abs() < 1e-12);
        assert!((a - p.ring_distance).abs() < 1e-10);

        let d = DecoratedDiagram::parse("x3o").unwrap();
        let n = simple_normals(&d).unwrap();
        let p = wythoff_point(&n, &Decoration012::initial(&d)).unwrap();
        assert!(n.vectors()[1].dot(&p.x).abs() < 1e-10);

        let d = DecoratedDiagram::parse("x4o3o").unwrap();
        let n = simple_normals(&d).unwrap();
        let p = wythoff_point(&n, &Decoration012::initial(&d)).unwrap();
        assert!(n.vectors()[1].dot(&p.x).abs() < 1e-10);
        assert!(n.vectors()[2].dot(&p.x).abs() < 1e-10);
    }

    #[test]
    fn cube_realization() {
        let (l, r) = build("x4o3o");
        assert_eq!(r.vertices().len(), 8);
        for &f in r.faces_of_rank(2) {
            assert_eq!(r.face_vertices(f).len(), 4);
        }
        assert!(r.centroid().norm() < 1e-9);
        assert!(r.check_uniform_edges().relative_spread < 1e-9);
        assert!(r.check_face_dimensions().is_empty());
        assert!(r.check_cover_containment(&l).is_empty());
        let ridges = r.ridge_reflection_check().unwrap();
        assert_eq!((ridges.ridges, ridges.failures.len()), (12, 0));
        let dual = r.polar_dual_check(&ridges);
        assert!(dual.ok());
        assert_eq!(dual.facets, 6);
    }

    #[test]
    fn octagon_realization() {
        let (_, r) = build("x4x");
        assert_eq!(r.vertices().len(), 8);
        let radius = r.vertices()[0].norm();
        assert!(r.vertices().iter().all(|v| (v.norm() - radius).abs() < 1e-12));
        let ridges = r.ridge_reflection_check().unwrap();
        assert_eq!((ridges.ridges, ridges.failures.len()), (8, 0));
        assert!(r.polar_dual_check(&ridges).ok());
    }

    #[test]
    fn truncated_cube_faces() {
        let (_, r) = build("o3x4x");
        let mut sizes: Vec<usize> = r.faces_of_rank(2).iter().map(|&f| r.face_vertices(f).len()).collect();
        sizes.sort_unstable();
        assert_eq!(sizes, [vec![3; 8], vec![8; 6]].concat());
        assert!(r.check_uniform_edges().relative_spread < 1e-9);
        let ridges = r.ridge_reflection_check().unwrap();
        assert!(!ridges.ok(), "not every edge is a mirror of the truncated cube");
    }

    #[test]
    fn tetrahedron_dual() {
        let (_, r) = build("x3o3o");
        let ridges = r.ridge_reflection_check().unwrap();
        let dual = r.polar_dual_check(&ridges);
        assert_eq!((dual.facets, dual.orbit_size), (4, 4));
        assert!(dual.ok());
    }

    #[test]
    fn segment_edges() {
        let (_, r) = build("x");
        let e = r.check_uniform_edges();
        assert_eq!((e.edges, e.relative_spread), (1, 0.0));
    }

    #[test]
    fn off_export() {
        let (_, r) = build("x4o3o");
        let off = r.export_off().unwrap();
        let mut lines = off.lines();
        assert_eq!(lines.next(), Some("OFF"));
        assert_eq!(lines.next(), Some("8 6 0"));
        let faces: Vec<&str> = off.lines().skip(10).collect();
        assert_eq!(faces.len(), 6);
        assert!(faces.iter().all(|f| f.starts_with("4 ")));

        let (_, r) = build("o3x4x");
        let off = r.export_off().unwrap();
        assert!(off.lines().nth(1) == Some("24 14 0"));

        let (_, r) = build("x3o3o3o");
        assert!(matches!(r.export_off(), Err(GeometryError::UnsupportedDimension(4))));
    }

    #[test]
    fn polygon_cycles_are_outward_counterclockwise() {
        let (_, r) = build("x3x4o");
        for &f in r.faces_of_rank(2) {
            let cycle = r.polygon_cycle(f);
            let c = r.face_centroid(f);
            let p = |i: usize| {
                let v = &r.vertices()[cycle[i % cycle.len()] as usize];
                nalgebra::Vector3::new(v[0], v[1], v[2])
            };
            let cc = nalgebra::Vector3::new(c[0], c[1], c[2]);
            for i in 0..cycle.len() {
                let turn = (p(i) - cc).cross(&(p(i + 1) - cc));
                assert!(turn.dot(&cc) > 0.0);
                // consecutive vertices are joined by an edge of the polytope
                let len = (p(i + 1) - p(i)).norm();
                assert!((len - r.check_uniform_edges().max).abs() < 1e-9);
            }
        }
    }
}

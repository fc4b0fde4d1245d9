//! Dirichlet–Neumann fields on the unit disk whose boundary is split into
//! `K` Dirichlet arcs and their complement. The fields `∇η_k`, with `η_k`
//! harmonic, equal to 1 on arc `k` and 0 on the other arcs, and with natural
//! conditions elsewhere, span a space of dimension `K − 1`. Everything here
//! is piecewise linear on a concentric-ring triangulation.

use std::f64::consts::TAU;

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{pcg, Csr};

/// Relative threshold for the numerical rank of the Gram matrix.
pub const RANK_THRESHOLD: f64 = 1e-8;

/// Relative tolerance of the conjugate-gradient solves.
const CG_TOL: f64 = 1e-12;

/// `K` disjoint closed arcs `[start, start + length]` of the unit circle
/// carrying Dirichlet data. Angles are in radians.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ArcPartition {
    arcs: Vec<(f64, f64)>,
}

fn wrap(angle: f64) -> f64 {
    angle.rem_euclid(TAU)
}

impl ArcPartition {
    /// Arcs given as `(start, end)` with `start < end < start + 2π`.
    pub fn new(arcs: Vec<(f64, f64)>) -> Result<Self> {
        if arcs.is_empty() {
            return Err(Error::InvalidArgument("at least one Dirichlet arc is required".into()));
        }
        let mut normalized = Vec::with_capacity(arcs.len());
        for &(a, b) in &arcs {
            if !(a.is_finite() && b.is_finite()) || b <= a || b - a >= TAU {
                return Err(Error::InvalidArgument(format!("arc {a}:{b} must satisfy start < end < start + 2π")));
            }
            normalized.push((wrap(a), b - a));
        }
        let mut sorted = normalized.clone();
        sorted.sort_by(|x, y| x.0.total_cmp(&y.0));
        for (i, &(a, len)) in sorted.iter().enumerate() {
            let next = sorted[(i + 1) % sorted.len()].0;
            let gap = wrap(next - (a + len));
            let gap = if sorted.len() == 1 { TAU - len } else { gap };
            if gap <= 0.0 || (sorted.len() > 1 && wrap(next - a) <= len) {
                return Err(Error::InvalidArgument("Dirichlet arcs must be separated by positive gaps".into()));
            }
        }
        Ok(Self { arcs: normalized })
    }

    /// `k` equal arcs, each covering `fill` of its sector, the first starting at `offset`.
    pub fn equal(k: usize, fill: f64, offset: f64) -> Result<Self> {
        if k == 0 || !(fill > 0.0 && fill < 1.0) {
            return Err(Error::InvalidArgument("need k ≥ 1 and a fill fraction in (0, 1)".into()));
        }
        let sector = TAU / k as f64;
        Self::new((0..k).map(|i| (offset + i as f64 * sector, offset + i as f64 * sector + fill * sector)).collect())
    }

    pub fn len(&self) -> usize {
        self.arcs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }

    /// `(start, length)` of each arc, `start ∈ [0, 2π)`.
    pub fn arcs(&self) -> &[(f64, f64)] {
        &self.arcs
    }

    pub fn rotated(&self, angle: f64) -> Self {
        Self { arcs: self.arcs.iter().map(|&(a, l)| (wrap(a + angle), l)).collect() }
    }

    /// The arc whose closure contains `angle`, if any (endpoints count as Dirichlet).
    pub fn arc_of(&self, angle: f64, tol: f64) -> Option<usize> {
        self.arcs.iter().position(|&(a, l)| {
            let t = wrap(angle - a);
            t <= l + tol || t >= TAU - tol
        })
    }

    /// Sorted arc endpoints relative to the first arc start, in `[0, 2π)`.
    fn endpoints_relative(&self) -> Vec<f64> {
        let base = self.arcs[0].0;
        let mut v: Vec<f64> = self
            .arcs
            .iter()
            .flat_map(|&(a, l)| [wrap(a - base), wrap(a - base) + l])
            .map(|t| if t >= TAU - 1e-14 { t - TAU } else { t })
            .collect();
        v.sort_by(f64::total_cmp);
        v.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
        v
    }
}

/// Boundary tag of a mesh node.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum NodeTag {
    Interior,
    /// On the closure of Dirichlet arc `k` (0-based).
    Dirichlet(usize),
    Neumann,
}

/// Conforming triangulation of the unit disk by concentric rings. Ring `j`
/// has radius `j/R`; the outer ring contains every arc endpoint, and every
/// ring is laid out relative to the first arc start so that rotating the
/// partition rotates the mesh.
#[derive(Clone, Debug, Serialize)]
pub struct DiskMesh {
    pub h: f64,
    pub nodes: Vec<[f64; 2]>,
    pub triangles: Vec<[usize; 3]>,
    pub tags: Vec<NodeTag>,
}

impl DiskMesh {
    pub fn new(partition: &ArcPartition, h: f64) -> Result<Self> {
        if !(h > 0.0 && h <= 0.5) {
            return Err(Error::InvalidArgument(format!("mesh size must lie in (0, 0.5], got {h}")));
        }
        let rings = (1.0 / h).ceil() as usize;
        let step = 1.0 / rings as f64;
        let base = partition.arcs[0].0;
        let mut nodes = vec![[0.0, 0.0]];
        let mut tags = vec![NodeTag::Interior];
        let mut ring_ids: Vec<Vec<usize>> = vec![vec![0]];
        let mut ring_angles: Vec<Vec<f64>> = vec![vec![0.0]];
        for j in 1..=rings {
            let radius = j as f64 * step;
            let rel: Vec<f64> = if j == rings {
                // Subdivide each boundary piece between consecutive endpoints.
                let ends = partition.endpoints_relative();
                let mut v = Vec::new();
                for (i, &a) in ends.iter().enumerate() {
                    let b = if i + 1 < ends.len() { ends[i + 1] } else { ends[0] + TAU };
                    let pieces = ((b - a) * radius / step).ceil().max(1.0) as usize;
                    v.extend((0..pieces).map(|p| a + (b - a) * p as f64 / pieces as f64));
                }
                v
            } else {
                let count = ((TAU * radius / step).round() as usize).max(6);
                (0..count).map(|p| TAU * p as f64 / count as f64).collect()
            };
            let mut ids = Vec::with_capacity(rel.len());
            for &t in &rel {
                let angle = base + t;
                ids.push(nodes.len());
                nodes.push([radius * angle.cos(), radius * angle.sin()]);
                tags.push(if j == rings {
                    match partition.arc_of(angle, 1e-12) {
                        Some(k) => NodeTag::Dirichlet(k),
                        None => NodeTag::Neumann,
                    }
                } else {
                    NodeTag::Interior
                });
            }
            ring_ids.push(ids);
            ring_angles.push(rel);
        }
        let mut triangles = Vec::new();
        let first = &ring_ids[1];
        for p in 0..first.len() {
            triangles.push([0, first[p], first[(p + 1) % first.len()]]);
        }
        for j in 1..rings {
            zip_rings(&ring_ids[j], &ring_angles[j], &ring_ids[j + 1], &ring_angles[j + 1], &mut triangles);
        }
        for t in &mut triangles {
            if signed_area(&nodes, t) < 0.0 {
                t.swap(1, 2);
            }
        }
        let interior = tags.iter().filter(|t| !matches!(t, NodeTag::Dirichlet(_))).count();
        if interior < partition.len() {
            return Err(Error::MeshTooCoarse { interior, arcs: partition.len() });
        }
        for k in 0..partition.len() {
            if !tags.contains(&NodeTag::Dirichlet(k)) {
                return Err(Error::MeshTooCoarse { interior, arcs: partition.len() });
            }
        }
        Ok(Self { h: step, nodes, triangles, tags })
    }

    pub fn area(&self) -> f64 {
        self.triangles.iter().map(|t| signed_area(&self.nodes, t)).sum()
    }

    pub fn dirichlet_nodes(&self, k: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.nodes.len()).filter(move |&i| self.tags[i] == NodeTag::Dirichlet(k))
    }
}

fn signed_area(nodes: &[[f64; 2]], t: &[usize; 3]) -> f64 {
    let (a, b, c) = (nodes[t[0]], nodes[t[1]], nodes[t[2]]);
    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))
}

/// Triangulates the band between two rings by merging their angular orders.
fn zip_rings(inner: &[usize], ia: &[f64], outer: &[usize], oa: &[f64], out: &mut Vec<[usize; 3]>) {
    let (n, m) = (inner.len(), outer.len());
    let angle = |v: &[f64], k: usize| if k < v.len() { v[k] } else { v[k - v.len()] + TAU };
    let (mut i, mut j) = (0, 0);
    while i < n || j < m {
        // Ties (within roundoff) go to the inner ring so that rotated inputs
        // produce the same connectivity.
        let advance_inner = j == m || (i < n && angle(ia, i + 1) <= angle(oa, j + 1) + 1e-9);
        if advance_inner {
            out.push([inner[i % n], inner[(i + 1) % n], outer[j % m]]);
            i += 1;
        } else {
            out.push([inner[i % n], outer[j % m], outer[(j + 1) % m]]);
            j += 1;
        }
    }
}

/// Gradients of the barycentric hat functions of a triangle, and its area.
fn hat_gradients(nodes: &[[f64; 2]], t: &[usize; 3]) -> ([[f64; 2]; 3], f64) {
    let p = [nodes[t[0]], nodes[t[1]], nodes[t[2]]];
    let area = signed_area(nodes, t);
    let mut g = [[0.0; 2]; 3];
    for k in 0..3 {
        let (b, c) = (p[(k + 1) % 3], p[(k + 2) % 3]);
        g[k] = [(b[1] - c[1]) / (2.0 * area), (c[0] - b[0]) / (2.0 * area)];
    }
    (g, area)
}

/// A discrete `η_k` with the relative residual of its variational equation.
#[derive(Clone, Debug, Serialize)]
pub struct EtaField {
    pub k: usize,
    pub values: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
}

impl EtaField {
    /// Piecewise-constant gradient on each triangle.
    pub fn gradient(&self, mesh: &DiskMesh) -> Vec<[f64; 2]> {
        mesh.triangles
            .iter()
            .map(|t| {
                let (g, _) = hat_gradients(&mesh.nodes, t);
                let mut v = [0.0; 2];
                for a in 0..3 {
                    v[0] += self.values[t[a]] * g[a][0];
                    v[1] += self.values[t[a]] * g[a][1];
                }
                v
            })
            .collect()
    }
}

/// Solves for `η_k` (1-based `k`): 1 on arc `k`, 0 on the other arcs, natural condition elsewhere.
pub fn solve_eta(k: usize, partition: &ArcPartition, mesh: &DiskMesh) -> Result<EtaField> {
    if k == 0 || k > partition.len() {
        return Err(Error::InvalidArgument(format!("arc index {k} outside 1..={}", partition.len())));
    }
    let n = mesh.nodes.len();
    let mut data = vec![None; n];
    for (i, tag) in mesh.tags.iter().enumerate() {
        if let NodeTag::Dirichlet(l) = tag {
            data[i] = Some(if *l + 1 == k { 1.0 } else { 0.0 });
        }
    }
    let mut free_index = vec![usize::MAX; n];
    let mut free = Vec::new();
    for i in 0..n {
        if data[i].is_none() {
            free_index[i] = free.len();
            free.push(i);
        }
    }
    let mut trip = Vec::new();
    let mut rhs = vec![0.0; free.len()];
    for t in &mesh.triangles {
        let (g, area) = hat_gradients(&mesh.nodes, t);
        for a in 0..3 {
            let ia = free_index[t[a]];
            if ia == usize::MAX {
                continue;
            }
            for b in 0..3 {
                let kab = area * (g[a][0] * g[b][0] + g[a][1] * g[b][1]);
                match data[t[b]] {
                    Some(v) => rhs[ia] -= kab * v,
                    None => trip.push((ia, free_index[t[b]], kab)),
                }
            }
        }
    }
    let mut values: Vec<f64> = data.iter().map(|d| d.unwrap_or(0.0)).collect();
    if free.is_empty() {
        return Ok(EtaField { k, values, residual: 0.0, iterations: 0 });
    }
    let a = Csr::from_triplets(free.len(), trip);
    let out = pcg(&a, &rhs, CG_TOL, 20 * free.len() + 100)?;
    for (f, &i) in free.iter().enumerate() {
        values[i] = out.x[f];
    }
    Ok(EtaField { k, values, residual: out.relative_residual, iterations: out.iterations })
}

fn l2_inner(mesh: &DiskMesh, a: &[[f64; 2]], b: &[[f64; 2]]) -> f64 {
    mesh.triangles
        .iter()
        .enumerate()
        .map(|(t, tri)| signed_area(&mesh.nodes, tri) * (a[t][0] * b[t][0] + a[t][1] * b[t][1]))
        .sum()
}

/// The fields `∇η_1, …, ∇η_{K−1}` with their Gram matrix and solver residuals.
#[derive(Clone, Debug, Serialize)]
pub struct HarmonicBasis {
    pub fields: Vec<Vec<[f64; 2]>>,
    pub gram: Vec<Vec<f64>>,
    pub residuals: Vec<f64>,
}

fn all_etas(partition: &ArcPartition, mesh: &DiskMesh) -> Result<Vec<EtaField>> {
    (1..=partition.len()).into_par_iter().map(|k| solve_eta(k, partition, mesh)).collect()
}

fn gram_of(mesh: &DiskMesh, fields: &[Vec<[f64; 2]>]) -> Vec<Vec<f64>> {
    fields.iter().map(|a| fields.iter().map(|b| l2_inner(mesh, a, b)).collect()).collect()
}

pub fn build_basis(partition: &ArcPartition, mesh: &DiskMesh) -> Result<HarmonicBasis> {
    let etas = all_etas(partition, mesh)?;
    let keep = partition.len() - 1;
    let fields: Vec<Vec<[f64; 2]>> = etas[..keep].iter().map(|e| e.gradient(mesh)).collect();
    let gram = gram_of(mesh, &fields);
    Ok(HarmonicBasis { fields, gram, residuals: etas[..keep].iter().map(|e| e.residual).collect() })
}

/// Rank of the Gram matrix of all `K` gradients `∇η_k`, which must be `K − 1`
/// because `Σ_k η_k ≡ 1`.
#[derive(Clone, Debug, Serialize)]
pub struct DimensionReport {
    pub arcs: usize,
    pub nodes: usize,
    pub rank: usize,
    /// `σ_{K−1} / max(σ_K, threshold)`; infinite for `K = 1`.
    pub gap: f64,
    /// Descending eigenvalues of the Gram matrix.
    pub gram_eigenvalues: Vec<f64>,
    pub residuals: Vec<f64>,
}

pub fn dimension_check(partition: &ArcPartition, mesh: &DiskMesh) -> Result<DimensionReport> {
    let etas = all_etas(partition, mesh)?;
    let fields: Vec<Vec<[f64; 2]>> = etas.iter().map(|e| e.gradient(mesh)).collect();
    let k = fields.len();
    let gram = gram_of(mesh, &fields);
    let eig = SymmetricEigen::new(DMatrix::from_fn(k, k, |i, j| gram[i][j]));
    let mut sigma: Vec<f64> = eig.eigenvalues.iter().map(|v| v.abs()).collect();
    sigma.sort_by(|a, b| b.total_cmp(a));
    // Relative to the largest eigenvalue, but never below the Gram entry of a
    // unit gradient times the same factor: for K = 1 every eigenvalue is roundoff.
    let threshold = sigma[0].max(mesh.area()) * RANK_THRESHOLD;
    let rank = sigma.iter().filter(|&&s| s > threshold).count();
    let gap = if k == 1 { f64::INFINITY } else { sigma[k - 2] / sigma[k - 1].max(threshold) };
    Ok(DimensionReport {
        arcs: k,
        nodes: mesh.nodes.len(),
        rank,
        gap,
        gram_eigenvalues: sigma,
        residuals: etas.iter().map(|e| e.residual).collect(),
    })
}

/// Rank of the `(K−1) × K` matrix of the constants `η_k` takes on each arc.
pub fn boundary_constant_rank(partition: &ArcPartition, mesh: &DiskMesh) -> Result<usize> {
    let etas = all_etas(partition, mesh)?;
    let k = partition.len();
    if k == 1 {
        return Ok(0);
    }
    let m = DMatrix::from_fn(k - 1, k, |i, l| {
        let idx = mesh.dirichlet_nodes(l).next().expect("every arc has a node");
        etas[i].values[idx]
    });
    Ok(m.rank(1e-10))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partition_validation() {
        assert!(ArcPartition::new(vec![]).is_err());
        assert!(ArcPartition::new(vec![(0.0, 1.0), (0.5, 2.0)]).is_err());
        assert!(ArcPartition::new(vec![(0.0, 1.0), (1.0, 2.0)]).is_err());
        assert!(ArcPartition::new(vec![(0.0, 1.0), (1.5, 2.0)]).is_ok());
        assert!(ArcPartition::new(vec![(5.0, 7.0), (1.0, 2.0)]).is_ok());
        assert!(ArcPartition::new(vec![(5.0, 7.0), (0.5, 2.0)]).is_err());
        let p = ArcPartition::equal(3, 0.5, 0.2).unwrap();
        assert_eq!(p.arc_of(0.2, 0.0), Some(0));
        assert_eq!(p.arc_of(0.2 + TAU / 6.0, 1e-12), Some(0));
        assert_eq!(p.arc_of(0.2 + TAU / 6.0 + 0.01, 1e-12), None);
    }

    #[test]
    fn mesh_is_conforming_disk() {
        let p = ArcPartition::equal(2, 0.4, 0.3).unwrap();
        let mesh = DiskMesh::new(&p, 0.1).unwrap();
        assert!(mesh.triangles.iter().all(|t| signed_area(&mesh.nodes, t) > 0.0));
        // Polygon area of the inscribed boundary polygon.
        assert!((mesh.area() - std::f64::consts::PI).abs() < 0.02);
        // Each interior edge is shared by two triangles, boundary edges by one.
        let mut edges = std::collections::HashMap::new();
        for t in &mesh.triangles {
            for k in 0..3 {
                let (a, b) = (t[k].min(t[(k + 1) % 3]), t[k].max(t[(k + 1) % 3]));
                *edges.entry((a, b)).or_insert(0) += 1;
            }
        }
        assert!(edges.values().all(|&c| c == 1 || c == 2));
        let boundary = edges.values().filter(|&&c| c == 1).count();
        let outer = mesh.tags.iter().filter(|t| **t != NodeTag::Interior).count();
        assert_eq!(boundary, outer);
    }

    #[test]
    fn single_arc_gives_constant() {
        let p = ArcPartition::new(vec![(0.0, 2.0)]).unwrap();
        let mesh = DiskMesh::new(&p, 0.1).unwrap();
        let eta = solve_eta(1, &p, &mesh).unwrap();
        assert!(eta.values.iter().all(|v| (v - 1.0).abs() < 1e-10));
        assert!(build_basis(&p, &mesh).unwrap().fields.is_empty());
        assert_eq!(dimension_check(&p, &mesh).unwrap().rank, 0);
    }

    #[test]
    fn coarse_mesh_rejected() {
        let p = ArcPartition::equal(4, 0.5, 0.0).unwrap();
        assert!(DiskMesh::new(&p, 0.7).is_err());
    }
}

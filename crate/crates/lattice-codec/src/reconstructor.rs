//! Rebuilding 3D geometry from a descriptor set.
//!
//! Placement works from four anchor nodes: node 1 at the origin, node 2 on
//! the positive x-axis, the first non-collinear node in the upper half
//! plane, and the first non-coplanar node above it. Every remaining node is
//! the solution of a small linear system against those anchors, so only
//! 4n - 10 geometry entries are ever read.

use crate::canonicalizer;
use crate::encoder::{self, EncodeConfig};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::Scalar;
use crate::types::{DescriptorSet, Node, Strut, UnitCell, Vec3};

/// Whether the rebuilt cell's handedness is pinned down by its descriptors.
/// Below three periodic axes the mirror image encodes identically.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Chirality {
    Resolved,
    Unresolved,
}

/// Raw embedding of a geometry matrix: coordinates in an arbitrary frame.
#[derive(Clone, Debug)]
pub struct Placement<S> {
    pub coords: Vec<Vec3<S>>,
    pub planar: bool,
    /// 0-based indices of the anchor nodes, in placement order.
    pub anchors: Vec<usize>,
}

/// The two mirror-image embeddings of a geometry matrix.
#[derive(Clone, Debug)]
pub struct EmbeddingResult<S> {
    pub reference: Vec<Vec3<S>>,
    pub mirrored: Vec<Vec3<S>>,
    pub planar: bool,
}

fn solve3<S: Scalar>(rows: [Vec3<S>; 3], rhs: Vec3<S>) -> Result<Vec3<S>> {
    // Cramer's rule on the column vectors of the system matrix.
    let col = |d: usize| Vec3::new(rows[0].axis(d), rows[1].axis(d), rows[2].axis(d));
    let (c0, c1, c2) = (col(0), col(1), col(2));
    let det = c0.dot(c1.cross(c2));
    if det == S::zero() {
        return Err(Error::SingularSystem("anchor nodes are degenerate".into()));
    }
    let dx = rhs.dot(c1.cross(c2));
    let dy = c0.dot(rhs.cross(c2));
    let dz = c0.dot(c1.cross(rhs));
    Ok(Vec3::new(dx / det, dy / det, dz / det))
}

/// Embed a geometry matrix as one 3D point set (the reference embedding,
/// with the fourth anchor above the base plane).
pub fn place_nodes<S: Scalar>(g: &Matrix<S>) -> Result<Placement<S>> {
    if !g.is_square() {
        return Err(Error::DimensionMismatch("geometry matrix must be square".into()));
    }
    let n = g.n();
    let mut coords = vec![Vec3::zero(); n];
    if n <= 1 {
        return Ok(Placement { coords, planar: true, anchors: (0..n).collect() });
    }
    let g_max = g.entries().fold(S::zero(), S::max);
    let r12 = g.get(0, 1);
    if r12 <= S::zero() {
        return Err(Error::DegenerateGeometry("nodes 1 and 2 coincide".into()));
    }
    coords[1] = Vec3::new(r12, S::zero(), S::zero());
    if n == 2 {
        return Ok(Placement { coords, planar: true, anchors: vec![0, 1] });
    }

    // Third anchor: first node off the 1-2 line.
    let ctol = S::c(1e-8) * r12;
    let k = (2..n)
        .find(|&q| {
            let (r1, r2) = (g.get(0, q), g.get(1, q));
            (r1 + r2 - r12).abs() > ctol && ((r1 - r2).abs() - r12).abs() > ctol
        })
        .ok_or_else(|| Error::DegenerateEmbedding("all nodes are collinear".into()))?;
    // Discriminants like r^2 - x^2 - y^2 cancel to machine noise for
    // coplanar nodes, so the in-plane/off-plane split is a relative 1e-6
    // band; the final residual check still catches inconsistency.
    let clamp = (S::c(1e-6) * g_max) * (S::c(1e-6) * g_max);
    let (r1k, r2k) = (g.get(0, k), g.get(1, k));
    let xk = (r12 * r12 + r1k * r1k - r2k * r2k) / (S::c(2.0) * r12);
    let yk2 = r1k * r1k - xk * xk;
    if yk2 < -clamp {
        return Err(Error::InconsistentGeometry { residual: (-yk2).sqrt().as_f64() });
    }
    let yk = yk2.max(S::zero()).sqrt();
    coords[k] = Vec3::new(xk, yk, S::zero());

    // Fourth anchor: first node off the 1-2-k plane, placed at z > 0.
    let ztol2 = clamp;
    let mut m = None;
    for q in 2..n {
        if q == k {
            continue;
        }
        let (r1, r2, rk) = (g.get(0, q), g.get(1, q), g.get(k, q));
        let x = (r12 * r12 + r1 * r1 - r2 * r2) / (S::c(2.0) * r12);
        let y = (r1 * r1 - rk * rk + xk * xk + yk * yk - S::c(2.0) * x * xk) / (S::c(2.0) * yk);
        let z2 = r1 * r1 - x * x - y * y;
        if z2 > ztol2 {
            coords[q] = Vec3::new(x, y, z2.sqrt());
            m = Some(q);
            break;
        }
        if z2 < -clamp {
            return Err(Error::InconsistentGeometry { residual: (-z2).sqrt().as_f64() });
        }
    }

    let anchors: Vec<usize> = match m {
        Some(m) => vec![0, 1, k, m],
        None => vec![0, 1, k],
    };
    for q in 2..n {
        if anchors.contains(&q) {
            continue;
        }
        // 2 p . p_a = |p_a|^2 + r_1q^2 - r_aq^2 for each non-origin anchor a.
        let r0 = g.get(0, q);
        let rhs_for = |a: usize| {
            (coords[a].norm_sq() + r0 * r0 - g.get(a, q) * g.get(a, q)) / S::c(2.0)
        };
        coords[q] = match m {
            Some(m) => solve3(
                [coords[1], coords[k], coords[m]],
                Vec3::new(rhs_for(1), rhs_for(k), rhs_for(m)),
            )?,
            None => {
                let x = rhs_for(1) / r12;
                let y = (rhs_for(k) - xk * x) / yk;
                Vec3::new(x, y, S::zero())
            }
        };
    }
    Ok(Placement { coords, planar: m.is_none(), anchors })
}

/// Largest deviation between the coordinates' pairwise distances and the
/// geometry matrix, with the offending (0-based) pair.
pub fn worst_residual<S: Scalar>(coords: &[Vec3<S>], g: &Matrix<S>) -> (S, (usize, usize)) {
    let n = coords.len();
    let mut worst = (S::zero(), (0, 0));
    for i in 0..n {
        for j in (i + 1)..n {
            let res = ((coords[i] - coords[j]).norm() - g.get(i, j)).abs();
            if res > worst.0 {
                worst = (res, (i, j));
            }
        }
    }
    worst
}

/// Both mirror-image embeddings, verified against every geometry entry
/// within `1e-6 * max(G)`.
pub fn embed_nodes<S: Scalar>(g: &Matrix<S>) -> Result<EmbeddingResult<S>> {
    let placement = place_nodes(g)?;
    let g_max = g.entries().fold(S::zero(), S::max);
    let (residual, _) = worst_residual(&placement.coords, g);
    if residual > S::c(1e-6) * g_max {
        return Err(Error::InconsistentGeometry { residual: residual.as_f64() });
    }
    let mirrored: Vec<Vec3<S>> = placement
        .coords
        .iter()
        .map(|p| Vec3::new(p.axis(0), p.axis(1), -p.axis(2)))
        .collect();
    Ok(EmbeddingResult { reference: placement.coords, mirrored, planar: placement.planar })
}

/// Internal: used by the validator to run the intersection check on a
/// descriptor-only input once an embedding exists.
pub(crate) fn cell_from_embedding<S: Scalar>(
    coords: &[Vec3<S>],
    d: &Matrix<S>,
    kt: &Matrix<S>,
    kb: &Matrix<S>,
) -> Result<UnitCell<S>> {
    let n = coords.len();
    let mut lo = [S::zero(); 3];
    let mut hi = [S::zero(); 3];
    for a in 0..3 {
        lo[a] = coords.iter().map(|p| p.axis(a)).fold(S::infinity(), S::min);
        hi[a] = coords.iter().map(|p| p.axis(a)).fold(S::neg_infinity(), S::max);
    }
    let span = (0..3).map(|a| hi[a] - lo[a]).fold(S::zero(), S::max);
    let floor = if span > S::zero() { span * S::c(1e-3) } else { S::one() };
    let obb = [
        (hi[0] - lo[0]).max(floor),
        (hi[1] - lo[1]).max(floor),
        (hi[2] - lo[2]).max(floor),
    ];
    let nodes = coords
        .iter()
        .enumerate()
        .map(|(i, p)| Node {
            id: i + 1,
            position: *p - Vec3::new(lo[0], lo[1], lo[2]),
        })
        .collect();
    let mut struts = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if d.get(i, j) != S::zero() {
                struts.push(Strut::new(i + 1, j + 1, kt.get(i, j), kb.get(i, j), d.get(i, j))?);
            }
        }
    }
    UnitCell::new(nodes, struts, obb)
}

fn axis_count(p: &Matrix<i32>) -> u8 {
    let mut axes = std::collections::BTreeSet::new();
    for v in p.entries() {
        if v != 0 {
            axes.insert(v.abs());
        }
    }
    axes.len() as u8
}

/// Rotate and translate an embedding into the frame spanned by the periodic
/// axes of the packing matrix: axis d along coordinate d, minimum node
/// corner at the origin. Fails on inconsistent axis pairs, non-orthogonal
/// axes, or (with three axes) a left-handed embedding.
pub fn recover_frame<S: Scalar>(
    coords: &[Vec3<S>],
    p: &Matrix<i32>,
    g_max: S,
    eps: S,
) -> Result<(Vec<Vec3<S>>, [S; 3])> {
    let n = coords.len();
    let mut axis: [Option<Vec3<S>>; 3] = [None; 3];
    for d in 0..3 {
        for i in 0..n {
            for j in 0..n {
                if p.get(i, j) == (d + 1) as i32 {
                    let v = coords[j] - coords[i];
                    match axis[d] {
                        None => axis[d] = Some(v),
                        Some(v0) => {
                            if (v - v0).norm() > eps {
                                return Err(Error::FrameError(format!(
                                    "axis {} pairs disagree on the periodic vector",
                                    d + 1
                                )));
                            }
                        }
                    }
                }
            }
        }
    }

    let present: Vec<usize> = (0..3).filter(|&d| axis[d].is_some()).collect();
    if present.len() < 2 {
        return Err(Error::NotFullyPeriodic { dimension: present.len() as u8 });
    }
    let mut units = [Vec3::zero(); 3];
    let mut lengths = [S::zero(); 3];
    for d in 0..3 {
        if let Some(v) = axis[d] {
            lengths[d] = v.norm();
            units[d] = v.normalized();
        }
    }
    if present.len() == 2 {
        // Complete the right-handed triad with the cross product.
        let missing = (0..3).find(|d| axis[*d].is_none()).unwrap();
        let (a, b) = ((missing + 1) % 3, (missing + 2) % 3);
        units[missing] = units[a].cross(units[b]);
    }
    for a in 0..3 {
        for b in (a + 1)..3 {
            if units[a].dot(units[b]).abs() > S::c(1e-6) {
                return Err(Error::FrameError(format!(
                    "periodic axes {} and {} are not orthogonal",
                    a + 1,
                    b + 1
                )));
            }
        }
    }
    if present.len() == 3 && units[0].dot(units[1].cross(units[2])) < S::zero() {
        return Err(Error::FrameError("embedding is left-handed for this packing".into()));
    }

    let mut aligned: Vec<Vec3<S>> = coords
        .iter()
        .map(|p| Vec3::new(p.dot(units[0]), p.dot(units[1]), p.dot(units[2])))
        .collect();
    for d in 0..3 {
        let lo = aligned.iter().map(|p| p.axis(d)).fold(S::infinity(), S::min);
        for p in &mut aligned {
            p.0[d] = p.0[d] - lo;
        }
        if axis[d].is_none() {
            let hi = aligned.iter().map(|p| p.axis(d)).fold(S::zero(), S::max);
            lengths[d] = if hi > eps {
                hi
            } else {
                // Flat aperiodic direction: give the box a nominal depth.
                S::c(1e-3) * g_max
            };
        }
    }
    Ok((aligned, lengths))
}

/// Rebuild coordinates from descriptors without any claim about the node
/// labeling. At least two periodic axes are required to pin the frame;
/// with all three the handedness is resolved by the packing matrix.
pub fn rebuild_cell<S: Scalar>(
    desc: &DescriptorSet<S>,
    eps_pos: Option<S>,
) -> Result<(UnitCell<S>, Chirality)> {
    let g_max = desc.max_distance();
    let eps = eps_pos.unwrap_or(S::c(1e-9) * g_max);
    let pdim = axis_count(desc.packing());
    if pdim < 2 {
        return Err(Error::NotFullyPeriodic { dimension: pdim });
    }
    let emb = embed_nodes(desc.geometry())?;
    let mut last = None;
    for coords in [&emb.reference, &emb.mirrored] {
        match recover_frame(coords, desc.packing(), g_max, eps) {
            Ok((aligned, obb)) => {
                let nodes = aligned
                    .iter()
                    .enumerate()
                    .map(|(i, p)| Node { id: i + 1, position: *p })
                    .collect();
                let cell = UnitCell::new(nodes, desc.struts(), obb)?;
                let chirality =
                    if pdim == 3 { Chirality::Resolved } else { Chirality::Unresolved };
                return Ok((cell, chirality));
            }
            Err(e) => last = Some(e),
        }
    }
    Err(last.unwrap_or(Error::FrameError("no embedding fits the packing axes".into())))
}

fn close_rel<S: Scalar>(a: &Matrix<S>, b: &Matrix<S>, scale: S) -> bool {
    a.rows() == b.rows()
        && a.cols() == b.cols()
        && a.entries().zip(b.entries()).all(|(x, y)| (x - y).abs() <= S::c(1e-9) * scale)
}

fn matches_descriptors<S: Scalar>(cell: &UnitCell<S>, desc: &DescriptorSet<S>) -> bool {
    let cfg = EncodeConfig { position_tolerance: None, run_validation: false };
    let (g, d, kt, kb, p) = encoder::encode_unchecked(cell, &cfg);
    let scale = desc.max_distance();
    p == *desc.packing()
        && close_rel(&g, desc.geometry(), scale)
        && close_rel(&d, desc.density(), S::one().max(scale))
        && close_rel(&kt, desc.stretching(), S::one().max(scale))
        && close_rel(&kb, desc.bending(), S::one().max(scale))
}

/// Rebuild a cell and verify the labeling is canonical: some admissible
/// frame (and, when chirality is unresolved, possibly the mirror image)
/// must reproduce the descriptors with the nodes already in lexicographic
/// order. Descriptors straight out of canonicalization satisfy this;
/// arbitrarily labeled ones fail with [`Error::NonCanonicalLabeling`].
pub fn reconstruct<S: Scalar>(
    desc: &DescriptorSet<S>,
    eps_pos: Option<S>,
) -> Result<(UnitCell<S>, Chirality)> {
    let g_max = desc.max_distance();
    let eps = eps_pos.unwrap_or(S::c(1e-9) * g_max);
    let (cell, chirality) = rebuild_cell(desc, eps_pos)?;
    let n = cell.node_count();
    let base: Vec<Vec3<S>> = cell.nodes().iter().map(|nd| nd.position).collect();
    for frame in canonicalizer::canonical_frames() {
        let coords = frame.apply_all(&base, cell.obb_lengths());
        let obb = frame.apply_obb(cell.obb_lengths());
        for mirror in [false, true] {
            let coords: Vec<Vec3<S>> = if mirror {
                coords.iter().map(|p| Vec3::new(obb[0] - p.axis(0), p.axis(1), p.axis(2))).collect()
            } else {
                coords.clone()
            };
            let order = match canonicalizer::order_nodes(&coords, eps) {
                Ok(o) => o,
                Err(_) => continue,
            };
            if !order.is_identity() {
                continue;
            }
            let nodes = coords
                .iter()
                .enumerate()
                .map(|(i, p)| Node { id: i + 1, position: *p })
                .collect();
            let candidate = match UnitCell::new(nodes, desc.struts(), obb) {
                Ok(c) => c,
                Err(_) => continue,
            };
            if matches_descriptors(&candidate, desc) {
                debug_assert_eq!(candidate.node_count(), n);
                return Ok((candidate, chirality));
            }
        }
    }
    Err(Error::NonCanonicalLabeling)
}

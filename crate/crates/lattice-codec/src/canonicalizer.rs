//! Canonical labeling, frames and fingerprints.
//!
//! A cell's descriptors depend on the node labeling and on the orientation
//! of the box. Canonicalization quotients both out: every right-handed
//! axis-aligned frame of the box (24 of them, twice that when mirror images
//! are identified) is tried, nodes are relabeled into lexicographic
//! coordinate order, and the serialization that sorts first wins.

use sha2::{Digest, Sha256};

use crate::encoder::{self, EncodeConfig};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::Scalar;
use crate::types::{DescriptorSet, Node, Strut, UnitCell, Vec3};

/// A signed axis permutation: one of the 24 rotations mapping the box onto
/// an axis-aligned box, together with the translation that returns the
/// image's minimum corner to the origin.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FrameTransform {
    /// Rows of the rotation matrix; entries in {-1, 0, 1}.
    pub rotation: [[i8; 3]; 3],
}

impl FrameTransform {
    /// Edge lengths of the transformed box.
    pub fn apply_obb<S: Scalar>(&self, obb: [S; 3]) -> [S; 3] {
        let mut out = [S::zero(); 3];
        for k in 0..3 {
            for j in 0..3 {
                if self.rotation[k][j] != 0 {
                    out[k] = obb[j];
                }
            }
        }
        out
    }

    /// Image of a point of the box (rotation plus re-origin translation).
    pub fn apply<S: Scalar>(&self, p: Vec3<S>, obb: [S; 3]) -> Vec3<S> {
        let mut out = [S::zero(); 3];
        for k in 0..3 {
            let mut v = S::zero();
            for j in 0..3 {
                match self.rotation[k][j] {
                    1 => v = v + p.axis(j),
                    -1 => v = v + obb[j] - p.axis(j),
                    _ => {}
                }
            }
            out[k] = v;
        }
        Vec3(out)
    }

    pub fn apply_all<S: Scalar>(&self, coords: &[Vec3<S>], obb: [S; 3]) -> Vec<Vec3<S>> {
        coords.iter().map(|&p| self.apply(p, obb)).collect()
    }

    fn det(&self) -> i32 {
        let r = &self.rotation;
        let m = |i: usize, j: usize| r[i][j] as i32;
        m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1))
            - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0))
            + m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0))
    }
}

/// The 24 rotational frames, in a fixed deterministic order starting with
/// the identity.
pub fn canonical_frames() -> Vec<FrameTransform> {
    const PERMS: [[usize; 3]; 6] =
        [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let mut out = Vec::with_capacity(24);
    for perm in PERMS {
        for bits in 0..8u8 {
            let mut rotation = [[0i8; 3]; 3];
            for k in 0..3 {
                let sign = if bits & (1 << k) == 0 { 1 } else { -1 };
                rotation[k][perm[k]] = sign;
            }
            let f = FrameTransform { rotation };
            if f.det() == 1 {
                out.push(f);
            }
        }
    }
    debug_assert_eq!(out.len(), 24);
    out
}

/// Relabeling map: `to_new[old]` is the new 0-based index of old node `old`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Permutation {
    to_new: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation { to_new: (0..n).collect() }
    }

    /// Build from 1-based new labels listed per old node.
    pub fn from_map(labels: &[usize]) -> Result<Self> {
        let n = labels.len();
        let mut seen = vec![false; n];
        for &l in labels {
            if l < 1 || l > n || seen[l - 1] {
                return Err(Error::Domain(format!("invalid permutation image {l}")));
            }
            seen[l - 1] = true;
        }
        Ok(Permutation { to_new: labels.iter().map(|&l| l - 1).collect() })
    }

    pub fn len(&self) -> usize {
        self.to_new.len()
    }

    pub fn is_empty(&self) -> bool {
        self.to_new.is_empty()
    }

    /// New 0-based index of old 0-based index `old`.
    pub fn apply(&self, old: usize) -> usize {
        self.to_new[old]
    }

    pub fn is_identity(&self) -> bool {
        self.to_new.iter().enumerate().all(|(i, &v)| i == v)
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.to_new.len()];
        for (old, &new) in self.to_new.iter().enumerate() {
            inv[new] = old;
        }
        Permutation { to_new: inv }
    }
}

fn quantize<S: Scalar>(p: Vec3<S>, eps: S) -> [i64; 3] {
    let q = |x: S| (x / eps).round().to_i64().unwrap_or(i64::MAX);
    [q(p.axis(0)), q(p.axis(1)), q(p.axis(2))]
}

/// Lexicographic relabeling of coordinates quantized to multiples of `eps`.
/// Two nodes landing on the same grid point make the order ambiguous.
pub fn order_nodes<S: Scalar>(coords: &[Vec3<S>], eps: S) -> Result<Permutation> {
    let mut keyed: Vec<(usize, [i64; 3])> =
        coords.iter().enumerate().map(|(i, &p)| (i, quantize(p, eps))).collect();
    keyed.sort_by(|a, b| a.1.cmp(&b.1));
    for w in keyed.windows(2) {
        if w[0].1 == w[1].1 {
            let (a, b) = (w[0].0.min(w[1].0), w[0].0.max(w[1].0));
            return Err(Error::AmbiguousOrdering { a: a + 1, b: b + 1 });
        }
    }
    let mut to_new = vec![0; coords.len()];
    for (rank, &(old, _)) in keyed.iter().enumerate() {
        to_new[old] = rank;
    }
    Ok(Permutation { to_new })
}

fn permute_matrix<T: Copy + Default>(m: &Matrix<T>, perm: &Permutation) -> Matrix<T> {
    let n = m.n();
    let mut out = Matrix::from_elem(n, n, T::default());
    for a in 0..n {
        for b in 0..n {
            out.set(perm.apply(a), perm.apply(b), m.get(a, b));
        }
    }
    out
}

/// Conjugate all five matrices by the relabeling.
pub fn permute_descriptors<S: Scalar>(
    desc: &DescriptorSet<S>,
    perm: &Permutation,
) -> Result<DescriptorSet<S>> {
    if perm.len() != desc.n() {
        return Err(Error::DimensionMismatch(format!(
            "permutation of length {} on {} nodes",
            perm.len(),
            desc.n()
        )));
    }
    DescriptorSet::new(
        permute_matrix(desc.geometry(), perm),
        permute_matrix(desc.density(), perm),
        permute_matrix(desc.stretching(), perm),
        permute_matrix(desc.bending(), perm),
        permute_matrix(desc.packing(), perm),
    )
}

/// Whether mirror images are identified (the default) or kept distinct.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ChiralityMode {
    #[default]
    Ignore,
    Preserve,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct CanonicalizeConfig<S> {
    pub chirality: ChiralityMode,
    pub position_tolerance: Option<S>,
}

/// Canonical form of a cell: the winning frame's relabeled cell, its
/// descriptors, the old-to-new relabeling, and the serialization that was
/// minimized.
#[derive(Clone, Debug)]
pub struct CanonicalForm<S> {
    pub cell: UnitCell<S>,
    pub descriptors: DescriptorSet<S>,
    pub permutation: Permutation,
    pub serialization: String,
}

/// Deterministic text form of a descriptor set: node count, then all five
/// matrices row-major, floats at 12 significant digits.
pub fn serialize_descriptors<S: Scalar>(desc: &DescriptorSet<S>) -> String {
    let mut s = String::new();
    s.push_str(&desc.n().to_string());
    for m in [desc.geometry(), desc.density(), desc.stretching(), desc.bending()] {
        for v in m.entries() {
            s.push(' ');
            s.push_str(&format!("{:.11e}", v.as_f64()));
        }
    }
    for v in desc.packing().entries() {
        s.push(' ');
        s.push_str(&v.to_string());
    }
    s
}

fn candidate<S: Scalar>(
    coords: &[Vec3<S>],
    obb: [S; 3],
    struts: &[Strut<S>],
    eps: S,
) -> Result<(UnitCell<S>, DescriptorSet<S>, Permutation, String)> {
    let perm = order_nodes(coords, eps)?;
    let n = coords.len();
    let mut nodes = vec![Node { id: 0, position: Vec3::zero() }; n];
    for old in 0..n {
        let new = perm.apply(old);
        nodes[new] = Node { id: new + 1, position: coords[old] };
    }
    let struts = struts
        .iter()
        .map(|s| Strut {
            i: perm.apply(s.i - 1) + 1,
            j: perm.apply(s.j - 1) + 1,
            ..*s
        })
        .collect();
    let cell = UnitCell::new(nodes, struts, obb)?;
    let cfg = EncodeConfig { position_tolerance: Some(eps), run_validation: false };
    let desc = encoder::encode(&cell, &cfg)?;
    let ser = serialize_descriptors(&desc);
    Ok((cell, desc, perm, ser))
}

/// Minimize the descriptor serialization over all admissible frames and
/// relabelings.
pub fn canonicalize_cell<S: Scalar>(
    cell: &UnitCell<S>,
    cfg: &CanonicalizeConfig<S>,
) -> Result<CanonicalForm<S>> {
    let eps = cfg.position_tolerance.unwrap_or_else(|| cell.default_position_tolerance());
    let base: Vec<Vec3<S>> = cell.nodes().iter().map(|nd| nd.position).collect();
    let obb0 = cell.obb_lengths();
    let mirrors: &[bool] = match cfg.chirality {
        ChiralityMode::Ignore => &[false, true],
        ChiralityMode::Preserve => &[false],
    };
    let mut best: Option<CanonicalForm<S>> = None;
    for frame in canonical_frames() {
        let coords = frame.apply_all(&base, obb0);
        let obb = frame.apply_obb(obb0);
        for &mirror in mirrors {
            let coords: Vec<Vec3<S>> = if mirror {
                coords
                    .iter()
                    .map(|p| Vec3::new(obb[0] - p.axis(0), p.axis(1), p.axis(2)))
                    .collect()
            } else {
                coords.clone()
            };
            let (cell2, desc, perm, ser) = candidate(&coords, obb, cell.struts(), eps)?;
            let better = best.as_ref().map_or(true, |b| ser < b.serialization);
            if better {
                best = Some(CanonicalForm {
                    cell: cell2,
                    descriptors: desc,
                    permutation: perm,
                    serialization: ser,
                });
            }
        }
    }
    Ok(best.expect("at least one frame always succeeds"))
}

/// SHA-256 of the canonical serialization, as lowercase hex.
pub fn fingerprint<S: Scalar>(cell: &UnitCell<S>, cfg: &CanonicalizeConfig<S>) -> Result<String> {
    let canon = canonicalize_cell(cell, cfg)?;
    Ok(digest_hex(&canon.serialization))
}

pub(crate) fn digest_hex(s: &str) -> String {
    let mut hasher = Sha256::new();
    hasher.update(s.as_bytes());
    let out = hasher.finalize();
    out.iter().map(|b| format!("{b:02x}")).collect()
}

/// True when two cells canonicalize to the same serialization.
pub fn equivalent<S: Scalar>(
    a: &UnitCell<S>,
    b: &UnitCell<S>,
    cfg: &CanonicalizeConfig<S>,
) -> Result<bool> {
    Ok(canonicalize_cell(a, cfg)?.serialization == canonicalize_cell(b, cfg)?.serialization)
}

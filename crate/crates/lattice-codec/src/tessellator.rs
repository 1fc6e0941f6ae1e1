//! Tiling a unit cell into an m1 x m2 x m3 block.
//!
//! Copies are offset by whole box lengths; nodes that land on the same
//! position (within the merge tolerance) collapse into one, and duplicated
//! struts must agree on their section properties.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::types::{Node, Strut, UnitCell, Vec3};

/// A tessellated block, itself a unit cell with the enlarged box.
#[derive(Clone, Debug)]
pub struct Tessellation<S> {
    cell: UnitCell<S>,
    counts: [usize; 3],
}

impl<S: Scalar> Tessellation<S> {
    pub fn as_unit_cell(&self) -> &UnitCell<S> {
        &self.cell
    }

    pub fn into_unit_cell(self) -> UnitCell<S> {
        self.cell
    }

    pub fn counts(&self) -> [usize; 3] {
        self.counts
    }
}

fn quantize<S: Scalar>(p: Vec3<S>, eps: S) -> [i64; 3] {
    let q = |x: S| (x / eps).round().to_i64().unwrap_or(i64::MAX);
    [q(p.axis(0)), q(p.axis(1)), q(p.axis(2))]
}

fn rel_close<S: Scalar>(a: S, b: S) -> bool {
    (a - b).abs() <= S::c(1e-9) * a.abs().max(b.abs()).max(S::one())
}

/// Tile `cell` `counts[d]` times along each axis.
pub fn tessellate<S: Scalar>(
    cell: &UnitCell<S>,
    counts: [usize; 3],
    merge_tolerance: Option<S>,
) -> Result<Tessellation<S>> {
    if counts.iter().any(|&m| m == 0) {
        return Err(Error::Domain("tessellation counts must be at least 1".into()));
    }
    let eps = merge_tolerance.unwrap_or_else(|| cell.default_position_tolerance());
    let lengths = cell.obb_lengths();
    let n = cell.node_count();

    // First-seen merge: a quantized position keys its node.
    let mut index: std::collections::HashMap<[i64; 3], usize> = std::collections::HashMap::new();
    let mut nodes: Vec<Node<S>> = Vec::new();
    let mut struts: Vec<Strut<S>> = Vec::new();
    let mut seen: std::collections::BTreeMap<(usize, usize), (S, S, S)> =
        std::collections::BTreeMap::new();

    for a in 0..counts[0] {
        for b in 0..counts[1] {
            for c in 0..counts[2] {
                let offset = Vec3::new(
                    S::c(a as f64) * lengths[0],
                    S::c(b as f64) * lengths[1],
                    S::c(c as f64) * lengths[2],
                );
                let mut local = vec![0usize; n];
                for nd in cell.nodes() {
                    let p = nd.position + offset;
                    let key = quantize(p, eps);
                    let id = *index.entry(key).or_insert_with(|| {
                        nodes.push(Node { id: nodes.len() + 1, position: p });
                        nodes.len()
                    });
                    local[nd.id - 1] = id;
                }
                for s in cell.struts() {
                    let (mut i, mut j) = (local[s.i - 1], local[s.j - 1]);
                    if i == j {
                        return Err(Error::InconsistentTiling(format!(
                            "strut ({}, {}) collapses onto one node when tiled",
                            s.i, s.j
                        )));
                    }
                    if i > j {
                        std::mem::swap(&mut i, &mut j);
                    }
                    let props = (s.linear_density, s.stretch_stiffness, s.bend_stiffness);
                    match seen.get(&(i, j)) {
                        None => {
                            seen.insert((i, j), props);
                            struts.push(Strut { i, j, ..*s });
                        }
                        Some(&(lam, t, bb)) => {
                            if !rel_close(lam, props.0)
                                || !rel_close(t, props.1)
                                || !rel_close(bb, props.2)
                            {
                                return Err(Error::InconsistentTiling(format!(
                                    "tiled copies disagree on the properties of strut ({i}, {j})"
                                )));
                            }
                        }
                    }
                }
            }
        }
    }

    let obb = [
        S::c(counts[0] as f64) * lengths[0],
        S::c(counts[1] as f64) * lengths[1],
        S::c(counts[2] as f64) * lengths[2],
    ];
    Ok(Tessellation { cell: UnitCell::new(nodes, struts, obb)?, counts })
}

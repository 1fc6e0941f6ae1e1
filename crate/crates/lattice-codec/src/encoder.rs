//! Encoding a coordinatized unit cell into its five descriptor matrices.

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::Scalar;
use crate::types::{DescriptorSet, Material, UnitCell, Vec3};
use crate::validator;

/// Encoder settings. `position_tolerance` defaults to `1e-9 * max(L_d)`.
#[derive(Clone, Copy, Debug)]
pub struct EncodeConfig<S> {
    pub position_tolerance: Option<S>,
    pub run_validation: bool,
}

impl<S> Default for EncodeConfig<S> {
    fn default() -> Self {
        EncodeConfig { position_tolerance: None, run_validation: true }
    }
}

impl<S: Scalar> EncodeConfig<S> {
    pub fn tolerance_for(&self, cell: &UnitCell<S>) -> S {
        self.position_tolerance.unwrap_or_else(|| cell.default_position_tolerance())
    }
}

/// Section properties of a slender circular strut: linear density, stretch
/// stiffness and bend stiffness.
pub fn circular_strut_properties<S: Scalar>(radius: S, material: &Material<S>) -> Result<(S, S, S)> {
    if radius <= S::zero() {
        return Err(Error::Domain("strut radius must be positive".into()));
    }
    let r2 = radius * radius;
    let lam = S::PI() * material.density * r2;
    let t = S::PI() * material.youngs_modulus * r2;
    let b = S::PI() * material.youngs_modulus * r2 * r2 / S::c(4.0);
    Ok((lam, t, b))
}

/// Pairwise Euclidean distances of the cell's nodes.
pub fn encode_geometry<S: Scalar>(cell: &UnitCell<S>, eps_pos: S) -> Result<Matrix<S>> {
    let g = geometry_unchecked(cell);
    let n = cell.node_count();
    for i in 0..n {
        for j in (i + 1)..n {
            if g.get(i, j) < eps_pos {
                return Err(Error::InvalidCell(format!(
                    "nodes {} and {} occupy the same position",
                    i + 1,
                    j + 1
                )));
            }
        }
    }
    Ok(g)
}

fn geometry_unchecked<S: Scalar>(cell: &UnitCell<S>) -> Matrix<S> {
    let n = cell.node_count();
    let mut g = Matrix::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let r = (cell.position(i + 1) - cell.position(j + 1)).norm();
            g.set(i, j, r);
            g.set(j, i, r);
        }
    }
    g
}

/// Density, stretching and bending stiffness matrices from the strut list.
pub fn encode_struts<S: Scalar>(cell: &UnitCell<S>) -> Result<(Matrix<S>, Matrix<S>, Matrix<S>)> {
    let n = cell.node_count();
    let mut d = Matrix::zeros(n, n);
    let mut kt = Matrix::zeros(n, n);
    let mut kb = Matrix::zeros(n, n);
    for s in cell.struts() {
        let (i, j) = (s.i - 1, s.j - 1);
        if d.get(i, j) != S::zero() {
            return Err(Error::InvalidCell(format!(
                "duplicate strut between nodes {} and {}",
                s.i, s.j
            )));
        }
        d.set(i, j, s.linear_density);
        d.set(j, i, s.linear_density);
        kt.set(i, j, s.stretch_stiffness);
        kt.set(j, i, s.stretch_stiffness);
        kb.set(i, j, s.bend_stiffness);
        kb.set(j, i, s.bend_stiffness);
    }
    Ok((d, kt, kb))
}

/// Packing matrix: `P_ij = +d` exactly when node j is the periodic translate
/// of node i along principal axis d, i.e. `pos_j - pos_i = L_d * e_d` within
/// the position tolerance. This forces both nodes onto the opposite OBB
/// faces normal to d. Axis labels follow the right-handed axis order.
pub fn encode_packing<S: Scalar>(cell: &UnitCell<S>, eps_pos: S) -> Matrix<i32> {
    let n = cell.node_count();
    let lengths = cell.obb_lengths();
    let mut p = Matrix::from_elem(n, n, 0i32);
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let delta = cell.position(j + 1) - cell.position(i + 1);
            for d in 0..3 {
                let mut target = Vec3::zero();
                target.0[d] = lengths[d];
                let err = delta - target;
                if err.0.iter().all(|c| c.abs() <= eps_pos) {
                    // Distinct translates cannot satisfy two axes at once.
                    debug_assert_eq!(p.get(i, j), 0);
                    p.set(i, j, (d + 1) as i32);
                    p.set(j, i, -((d + 1) as i32));
                }
            }
        }
    }
    p
}

/// Matrices of a cell without any invariant or rule checking. Used by the
/// validator fixtures, which deliberately encode ill-formed cells.
pub fn encode_unchecked<S: Scalar>(
    cell: &UnitCell<S>,
    cfg: &EncodeConfig<S>,
) -> (Matrix<S>, Matrix<S>, Matrix<S>, Matrix<S>, Matrix<i32>) {
    let eps = cfg.tolerance_for(cell);
    let g = geometry_unchecked(cell);
    let (d, kt, kb) = encode_struts(cell).expect("cell invariants exclude duplicate struts");
    let p = encode_packing(cell, eps);
    (g, d, kt, kb, p)
}

/// Full encoding. With `run_validation` on, the validator must come back
/// clean or encoding fails carrying the report.
pub fn encode<S: Scalar>(cell: &UnitCell<S>, cfg: &EncodeConfig<S>) -> Result<DescriptorSet<S>> {
    let eps = cfg.tolerance_for(cell);
    let g = encode_geometry(cell, eps)?;
    let (d, kt, kb) = encode_struts(cell)?;
    let p = encode_packing(cell, eps);
    let desc = DescriptorSet::new(g, d, kt, kb, p)?;
    if cfg.run_validation {
        let report = validator::validate(&desc, Some(cell))?;
        if !report.is_clean() {
            return Err(Error::Validation(Box::new(report)));
        }
    }
    Ok(desc)
}

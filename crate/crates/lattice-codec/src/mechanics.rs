//! Beam mechanics: per-strut stiffness relations, assembly of a global
//! frame stiffness matrix over 6 degrees of freedom per node, and a dense
//! direct solver.
//!
//! Each strut is an Euler-Bernoulli beam, optionally subdivided into `m`
//! equal elements. Hermite interpolation makes nodal results exact for end
//! loads regardless of `m`.

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::Scalar;
use crate::types::{UnitCell, Vec3};

pub const DOF_PER_NODE: usize = 6;

/// Axial force-displacement relation of a strut of stretch stiffness `t`
/// and length `r`.
pub fn axial_relation<S: Scalar>(t: S, r: S) -> Result<Matrix<S>> {
    if r <= S::zero() {
        return Err(Error::Domain("strut length must be positive".into()));
    }
    let k = t / r;
    Matrix::from_rows(&[vec![k, -k], vec![-k, k]])
}

/// Transverse force/moment relation of a strut of bend stiffness `b` and
/// length `r`, over the DOFs (deflection, rotation) at both ends.
pub fn flexural_relation<S: Scalar>(b: S, r: S) -> Result<Matrix<S>> {
    if r <= S::zero() {
        return Err(Error::Domain("strut length must be positive".into()));
    }
    let c = b / (r * r * r);
    let (s6, s4, s2, s12) =
        (S::c(6.0) * r, S::c(4.0) * r * r, S::c(2.0) * r * r, S::c(12.0));
    Matrix::from_rows(&[
        vec![c * s12, c * s6, -(c * s12), c * s6],
        vec![c * s6, c * s4, -(c * s6), c * s2],
        vec![-(c * s12), -(c * s6), c * s12, -(c * s6)],
        vec![c * s6, c * s2, -(c * s6), c * s4],
    ])
}

/// Local 10x10 beam element over [u, v, w, theta_y, theta_z] at each end:
/// the axial relation plus both bending planes. Couplings between w and
/// theta_y carry the opposite sign of those between v and theta_z.
pub fn element_stiffness_local<S: Scalar>(t: S, b: S, h: S) -> Result<Matrix<S>> {
    let axial = axial_relation(t, h)?;
    let flex = flexural_relation(b, h)?;
    let mut k = Matrix::zeros(10, 10);
    // u1, u2
    let u = [0usize, 5];
    for a in 0..2 {
        for c in 0..2 {
            k.set(u[a], u[c], axial.get(a, c));
        }
    }
    // (v1, theta_z1, v2, theta_z2)
    let vz = [1usize, 4, 6, 9];
    for a in 0..4 {
        for c in 0..4 {
            k.set(vz[a], vz[c], flex.get(a, c));
        }
    }
    // (w1, theta_y1, w2, theta_y2): odd/even sign flip on the couplings.
    let wy = [2usize, 3, 7, 8];
    let sign = |idx: usize| if idx % 2 == 1 { S::c(-1.0) } else { S::one() };
    for a in 0..4 {
        for c in 0..4 {
            k.set(wy[a], wy[c], flex.get(a, c) * sign(a) * sign(c));
        }
    }
    Ok(k)
}

/// Expand the 10 DOF element with the torsional pair at theta_x, giving the
/// full 12x12 local matrix. The torsional stiffness follows from the bend
/// stiffness of a circular section: `GJ/h = b / ((1 + nu) h)`.
fn element_with_torsion<S: Scalar>(t: S, b: S, h: S, nu: S) -> Result<Matrix<S>> {
    let k10 = element_stiffness_local(t, b, h)?;
    // 10-DOF slot -> 12-DOF slot ([u,v,w,tx,ty,tz] per node).
    const MAP: [usize; 10] = [0, 1, 2, 4, 5, 6, 7, 8, 10, 11];
    let mut k = Matrix::zeros(12, 12);
    for a in 0..10 {
        for c in 0..10 {
            k.set(MAP[a], MAP[c], k10.get(a, c));
        }
    }
    let kt = b / ((S::one() + nu) * h);
    k.set(3, 3, kt);
    k.set(9, 9, kt);
    k.set(3, 9, -kt);
    k.set(9, 3, -kt);
    Ok(k)
}

/// Orthonormal local triad with the first axis along `dir`.
fn local_triad<S: Scalar>(dir: Vec3<S>) -> [Vec3<S>; 3] {
    let ex = dir.normalized();
    let helper = if ex.axis(2).abs() < S::c(0.9) {
        Vec3::new(S::zero(), S::zero(), S::one())
    } else {
        Vec3::new(S::one(), S::zero(), S::zero())
    };
    let ey = helper.cross(ex).normalized();
    let ez = ex.cross(ey);
    [ex, ey, ez]
}

/// Rotate the 12x12 local matrix into global axes: `K = T' K_l T` with the
/// triad repeated over all four 3-DOF blocks.
fn to_global<S: Scalar>(k_local: &Matrix<S>, triad: &[Vec3<S>; 3]) -> Matrix<S> {
    let mut t = Matrix::zeros(12, 12);
    for block in 0..4 {
        for a in 0..3 {
            for c in 0..3 {
                t.set(3 * block + a, 3 * block + c, triad[a].axis(c));
            }
        }
    }
    let mut tmp = Matrix::zeros(12, 12);
    for i in 0..12 {
        for j in 0..12 {
            let mut acc = S::zero();
            for l in 0..12 {
                acc = acc + k_local.get(i, l) * t.get(l, j);
            }
            tmp.set(i, j, acc);
        }
    }
    let mut out = Matrix::zeros(12, 12);
    for i in 0..12 {
        for j in 0..12 {
            let mut acc = S::zero();
            for l in 0..12 {
                acc = acc + t.get(l, i) * tmp.get(l, j);
            }
            out.set(i, j, acc);
        }
    }
    out
}

/// Assembled frame model. Node indices 0..original_nodes map to the cell's
/// nodes 1..n; subdivision nodes follow.
#[derive(Clone, Debug)]
pub struct GlobalStiffness<S> {
    pub matrix: Matrix<S>,
    pub node_positions: Vec<Vec3<S>>,
    pub original_nodes: usize,
}

/// Assemble the global stiffness matrix of a cell with every strut split
/// into `subdivisions` equal beam elements.
pub fn assemble_global<S: Scalar>(
    cell: &UnitCell<S>,
    subdivisions: usize,
    poisson_ratio: S,
) -> Result<GlobalStiffness<S>> {
    if subdivisions == 0 {
        return Err(Error::Domain("subdivision count must be at least 1".into()));
    }
    let n0 = cell.node_count();
    let mut positions: Vec<Vec3<S>> = cell.nodes().iter().map(|nd| nd.position).collect();
    let mut elements: Vec<(usize, usize, S, S, S, Vec3<S>)> = Vec::new();
    for s in cell.struts() {
        let pa = cell.position(s.i);
        let pb = cell.position(s.j);
        let dir = pb - pa;
        let r = dir.norm();
        if r <= S::zero() {
            return Err(Error::DegenerateGeometry(format!(
                "strut ({}, {}) has zero length",
                s.i, s.j
            )));
        }
        let h = r / S::c(subdivisions as f64);
        let mut chain = vec![s.i - 1];
        for q in 1..subdivisions {
            let frac = S::c(q as f64) / S::c(subdivisions as f64);
            positions.push(pa + dir.scaled(frac));
            chain.push(positions.len() - 1);
        }
        chain.push(s.j - 1);
        for w in chain.windows(2) {
            elements.push((w[0], w[1], s.stretch_stiffness, s.bend_stiffness, h, dir));
        }
    }
    let dof = positions.len() * DOF_PER_NODE;
    let mut k = Matrix::zeros(dof, dof);
    for (a, b, t, bend, h, dir) in elements {
        let local = element_with_torsion(t, bend, h, poisson_ratio)?;
        let global = to_global(&local, &local_triad(dir));
        let base = [a * DOF_PER_NODE, b * DOF_PER_NODE];
        for i in 0..12 {
            for j in 0..12 {
                let gi = base[i / 6] + i % 6;
                let gj = base[j / 6] + j % 6;
                k.set(gi, gj, k.get(gi, gj) + global.get(i, j));
            }
        }
    }
    Ok(GlobalStiffness { matrix: k, node_positions: positions, original_nodes: n0 })
}

/// Dense LU solve with partial pivoting.
pub fn lu_solve<S: Scalar>(a: &Matrix<S>, rhs: &[S]) -> Result<Vec<S>> {
    let n = a.n();
    if rhs.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "matrix is {n}x{n} but the right-hand side has {} entries",
            rhs.len()
        )));
    }
    let mut m = a.clone();
    let mut x: Vec<S> = rhs.to_vec();
    for col in 0..n {
        let (pivot_row, pivot) = (col..n)
            .map(|r| (r, m.get(r, col).abs()))
            .fold((col, S::zero()), |acc, v| if v.1 > acc.1 { v } else { acc });
        if pivot <= S::c(1e-14) * (S::one() + m.get(0, 0).abs()) {
            return Err(Error::SingularSystem(format!("pivot vanished in column {col}")));
        }
        if pivot_row != col {
            for j in 0..n {
                let tmp = m.get(col, j);
                m.set(col, j, m.get(pivot_row, j));
                m.set(pivot_row, j, tmp);
            }
            x.swap(col, pivot_row);
        }
        for r in (col + 1)..n {
            let f = m.get(r, col) / m.get(col, col);
            if f == S::zero() {
                continue;
            }
            for j in col..n {
                m.set(r, j, m.get(r, j) - f * m.get(col, j));
            }
            x[r] = x[r] - f * x[col];
        }
    }
    for col in (0..n).rev() {
        let mut acc = x[col];
        for j in (col + 1)..n {
            acc = acc - m.get(col, j) * x[j];
        }
        x[col] = acc / m.get(col, col);
    }
    Ok(x)
}

/// Static solve: given nodal loads and a set of fixed DOF indices, return
/// the full displacement vector (zeros at the fixed DOFs).
pub fn solve_static<S: Scalar>(
    stiffness: &Matrix<S>,
    loads: &[S],
    fixed_dofs: &[usize],
) -> Result<Vec<S>> {
    let n = stiffness.n();
    if loads.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "{n} DOFs but {} load entries",
            loads.len()
        )));
    }
    let fixed: std::collections::BTreeSet<usize> = fixed_dofs.iter().copied().collect();
    if fixed.iter().any(|&d| d >= n) {
        return Err(Error::DimensionMismatch("fixed DOF out of range".into()));
    }
    let free: Vec<usize> = (0..n).filter(|d| !fixed.contains(d)).collect();
    let nf = free.len();
    let mut reduced = Matrix::zeros(nf, nf);
    let mut rhs = vec![S::zero(); nf];
    for (i, &gi) in free.iter().enumerate() {
        rhs[i] = loads[gi];
        for (j, &gj) in free.iter().enumerate() {
            reduced.set(i, j, stiffness.get(gi, gj));
        }
    }
    let sol = lu_solve(&reduced, &rhs)?;
    let mut full = vec![S::zero(); n];
    for (i, &gi) in free.iter().enumerate() {
        full[gi] = sol[i];
    }
    Ok(full)
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations.
pub fn symmetric_eigenvalues<S: Scalar>(m: &Matrix<S>) -> Result<Vec<S>> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch("eigenvalues need a square matrix".into()));
    }
    let n = m.n();
    let mut a = m.clone();
    let scale = a.entries().fold(S::zero(), |acc, v| acc.max(v.abs())).max(S::one());
    for _sweep in 0..100 {
        let mut off = S::zero();
        for i in 0..n {
            for j in (i + 1)..n {
                off = off + a.get(i, j).abs();
            }
        }
        if off <= S::c(1e-12) * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a.get(p, q);
                if apq.abs() <= S::c(1e-15) * scale {
                    continue;
                }
                let theta = (a.get(q, q) - a.get(p, p)) / (S::c(2.0) * apq);
                let t = {
                    let sign = if theta >= S::zero() { S::one() } else { -S::one() };
                    sign / (theta.abs() + (theta * theta + S::one()).sqrt())
                };
                let c = S::one() / (t * t + S::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a.get(k, p);
                    let akq = a.get(k, q);
                    a.set(k, p, c * akp - s * akq);
                    a.set(k, q, s * akp + c * akq);
                }
                for k in 0..n {
                    let apk = a.get(p, k);
                    let aqk = a.get(q, k);
                    a.set(p, k, c * apk - s * aqk);
                    a.set(q, k, s * apk + c * aqk);
                }
            }
        }
    }
    let mut eig: Vec<S> = (0..n).map(|i| a.get(i, i)).collect();
    eig.sort_by(|x, y| x.partial_cmp(y).unwrap());
    Ok(eig)
}

//! Domain types: materials, struts, unit cells and the descriptor set.

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::Scalar;

/// 3-vector of scalars.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Vec3<S>(pub [S; 3]);

impl<S: Scalar> Vec3<S> {
    pub fn new(x: S, y: S, z: S) -> Self {
        Vec3([x, y, z])
    }

    pub fn zero() -> Self {
        Vec3([S::zero(); 3])
    }

    #[inline]
    pub fn axis(self, d: usize) -> S {
        self.0[d]
    }

    pub fn dot(self, o: Vec3<S>) -> S {
        self.0[0] * o.0[0] + self.0[1] * o.0[1] + self.0[2] * o.0[2]
    }

    pub fn cross(self, o: Vec3<S>) -> Vec3<S> {
        Vec3([
            self.0[1] * o.0[2] - self.0[2] * o.0[1],
            self.0[2] * o.0[0] - self.0[0] * o.0[2],
            self.0[0] * o.0[1] - self.0[1] * o.0[0],
        ])
    }

    pub fn norm_sq(self) -> S {
        self.dot(self)
    }

    pub fn norm(self) -> S {
        self.norm_sq().sqrt()
    }

    pub fn scaled(self, c: S) -> Vec3<S> {
        Vec3([self.0[0] * c, self.0[1] * c, self.0[2] * c])
    }

    pub fn normalized(self) -> Vec3<S> {
        self.scaled(S::one() / self.norm())
    }
}

impl<S: Scalar> std::ops::Add for Vec3<S> {
    type Output = Vec3<S>;
    fn add(self, o: Vec3<S>) -> Vec3<S> {
        Vec3([self.0[0] + o.0[0], self.0[1] + o.0[1], self.0[2] + o.0[2]])
    }
}

impl<S: Scalar> std::ops::Sub for Vec3<S> {
    type Output = Vec3<S>;
    fn sub(self, o: Vec3<S>) -> Vec3<S> {
        Vec3([self.0[0] - o.0[0], self.0[1] - o.0[1], self.0[2] - o.0[2]])
    }
}

/// Parent material of a strut.
///
/// The Poisson ratio is consumed only by the torsion padding in the
/// mechanics module.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Material<S> {
    pub youngs_modulus: S,
    pub density: S,
    pub poisson_ratio: S,
}

impl<S: Scalar> Material<S> {
    pub fn new(youngs_modulus: S, density: S, poisson_ratio: S) -> Result<Self> {
        if youngs_modulus <= S::zero() {
            return Err(Error::Domain("Young's modulus must be positive".into()));
        }
        if density <= S::zero() {
            return Err(Error::Domain("material density must be positive".into()));
        }
        if poisson_ratio <= S::c(-1.0) || poisson_ratio >= S::c(0.5) {
            return Err(Error::Domain("Poisson ratio must lie in (-1, 0.5)".into()));
        }
        Ok(Material { youngs_modulus, density, poisson_ratio })
    }
}

/// Cross-section of a strut: a circular radius or explicit section values.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StrutSection<S> {
    Circular { radius: S },
    Explicit { area: S, second_moment: S, linear_density: S },
}

impl<S: Scalar> StrutSection<S> {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            StrutSection::Circular { radius } => radius > S::zero(),
            StrutSection::Explicit { area, second_moment, linear_density } => {
                area > S::zero() && second_moment > S::zero() && linear_density > S::zero()
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Domain("strut section values must be positive".into()))
        }
    }
}

/// Lattice node: 1-based id plus position.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Node<S> {
    pub id: usize,
    pub position: Vec3<S>,
}

/// A strut between two nodes carrying its derived physical properties:
/// stretch stiffness `t = E*A`, bend stiffness `b = E*I`, and linear density.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Strut<S> {
    pub i: usize,
    pub j: usize,
    pub stretch_stiffness: S,
    pub bend_stiffness: S,
    pub linear_density: S,
}

impl<S: Scalar> Strut<S> {
    pub fn new(i: usize, j: usize, stretch: S, bend: S, linear_density: S) -> Result<Self> {
        if i == j {
            return Err(Error::InvalidCell(format!("strut endpoints coincide at node {i}")));
        }
        if stretch <= S::zero() || bend <= S::zero() || linear_density <= S::zero() {
            return Err(Error::Domain(format!(
                "strut ({i},{j}) properties must be positive"
            )));
        }
        Ok(Strut { i, j, stretch_stiffness: stretch, bend_stiffness: bend, linear_density })
    }

    /// Unordered endpoint pair with the smaller id first.
    pub fn key(&self) -> (usize, usize) {
        if self.i < self.j {
            (self.i, self.j)
        } else {
            (self.j, self.i)
        }
    }
}

/// A coordinatized unit cell: nodes, struts and the edge lengths of its
/// oriented bounding box. Coordinates are expressed in the OBB frame with
/// the minimum corner at the origin.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitCell<S> {
    nodes: Vec<Node<S>>,
    struts: Vec<Strut<S>>,
    obb_lengths: [S; 3],
}

impl<S: Scalar> UnitCell<S> {
    pub fn new(mut nodes: Vec<Node<S>>, struts: Vec<Strut<S>>, obb_lengths: [S; 3]) -> Result<Self> {
        let n = nodes.len();
        if n == 0 {
            return Err(Error::InvalidCell("cell has no nodes".into()));
        }
        for (d, &l) in obb_lengths.iter().enumerate() {
            if l <= S::zero() {
                return Err(Error::InvalidCell(format!("OBB length {} must be positive", d + 1)));
            }
        }
        nodes.sort_by_key(|nd| nd.id);
        for (k, nd) in nodes.iter().enumerate() {
            if nd.id != k + 1 {
                return Err(Error::InvalidCell(format!(
                    "node ids must be exactly 1..{n}; found id {}",
                    nd.id
                )));
            }
        }
        let max_l = obb_lengths.iter().cloned().fold(S::zero(), S::max);
        let tol = S::c(1e-9) * max_l;
        for nd in &nodes {
            for d in 0..3 {
                let p = nd.position.axis(d);
                if p < -tol || p > obb_lengths[d] + tol {
                    return Err(Error::InvalidCell(format!(
                        "node {} lies outside the OBB along axis {}",
                        nd.id,
                        d + 1
                    )));
                }
            }
        }
        let mut seen = std::collections::BTreeSet::new();
        for s in &struts {
            if s.i == s.j {
                return Err(Error::InvalidCell(format!("strut endpoints coincide at node {}", s.i)));
            }
            if s.i < 1 || s.i > n || s.j < 1 || s.j > n {
                return Err(Error::InvalidCell(format!(
                    "strut ({}, {}) references a missing node",
                    s.i, s.j
                )));
            }
            if !seen.insert(s.key()) {
                return Err(Error::InvalidCell(format!(
                    "duplicate strut between nodes {} and {}",
                    s.i, s.j
                )));
            }
        }
        Ok(UnitCell { nodes, struts, obb_lengths })
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[Node<S>] {
        &self.nodes
    }

    pub fn struts(&self) -> &[Strut<S>] {
        &self.struts
    }

    pub fn obb_lengths(&self) -> [S; 3] {
        self.obb_lengths
    }

    /// Position of the node with the given 1-based id.
    pub fn position(&self, id: usize) -> Vec3<S> {
        self.nodes[id - 1].position
    }

    pub fn max_obb_length(&self) -> S {
        self.obb_lengths.iter().cloned().fold(S::zero(), S::max)
    }

    /// Default position tolerance, relative to the largest OBB edge.
    pub fn default_position_tolerance(&self) -> S {
        S::c(1e-9) * self.max_obb_length()
    }
}

/// The five canonical matrices describing one unit cell.
#[derive(Clone, Debug, PartialEq)]
pub struct DescriptorSet<S> {
    n: usize,
    geometry: Matrix<S>,
    density: Matrix<S>,
    stretching: Matrix<S>,
    bending: Matrix<S>,
    packing: Matrix<i32>,
}

impl<S: Scalar> DescriptorSet<S> {
    pub fn new(
        geometry: Matrix<S>,
        density: Matrix<S>,
        stretching: Matrix<S>,
        bending: Matrix<S>,
        packing: Matrix<i32>,
    ) -> Result<Self> {
        let n = geometry.rows();
        for (name, m) in [("G", &geometry), ("D", &density), ("Kt", &stretching), ("Kb", &bending)] {
            if !m.is_square() || m.rows() != n {
                return Err(Error::InvalidDescriptor(format!("{name} is not {n}x{n}")));
            }
            if !m.is_hollow() {
                return Err(Error::InvalidDescriptor(format!("{name} has a nonzero diagonal")));
            }
            if !m.is_symmetric() {
                return Err(Error::InvalidDescriptor(format!("{name} is not symmetric")));
            }
        }
        if !packing.is_square() || packing.rows() != n {
            return Err(Error::InvalidDescriptor(format!("P is not {n}x{n}")));
        }
        if !packing.is_skew_symmetric() {
            return Err(Error::InvalidDescriptor("P is not skew-symmetric".into()));
        }
        if packing.entries().any(|p| p.abs() > 3) {
            return Err(Error::InvalidDescriptor("P entries must lie in {-3..3}".into()));
        }
        for i in 0..n {
            for j in 0..n {
                if i != j && geometry.get(i, j) <= S::zero() {
                    return Err(Error::InvalidDescriptor(format!(
                        "G({}, {}) must be positive",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        for (name, m) in [("D", &density), ("Kt", &stretching), ("Kb", &bending)] {
            if m.entries().any(|v| v < S::zero()) {
                return Err(Error::InvalidDescriptor(format!("{name} has a negative entry")));
            }
        }
        if !density.same_support(&stretching) || !density.same_support(&bending) {
            return Err(Error::InvalidDescriptor(
                "D, Kt and Kb must share the same nonzero pattern".into(),
            ));
        }
        Ok(DescriptorSet { n, geometry, density, stretching, bending, packing })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn geometry(&self) -> &Matrix<S> {
        &self.geometry
    }

    pub fn density(&self) -> &Matrix<S> {
        &self.density
    }

    pub fn stretching(&self) -> &Matrix<S> {
        &self.stretching
    }

    pub fn bending(&self) -> &Matrix<S> {
        &self.bending
    }

    pub fn packing(&self) -> &Matrix<i32> {
        &self.packing
    }

    pub fn max_distance(&self) -> S {
        self.geometry.entries().fold(S::zero(), S::max)
    }

    /// Struts implied by the nonzero pattern, smaller id first.
    pub fn struts(&self) -> Vec<Strut<S>> {
        let mut out = Vec::new();
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                let lam = self.density.get(i, j);
                if lam != S::zero() {
                    out.push(Strut {
                        i: i + 1,
                        j: j + 1,
                        stretch_stiffness: self.stretching.get(i, j),
                        bend_stiffness: self.bending.get(i, j),
                        linear_density: lam,
                    });
                }
            }
        }
        out
    }
}

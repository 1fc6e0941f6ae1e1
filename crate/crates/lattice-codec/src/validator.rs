//! Structural rule checking: repeated nodes, isolation, connectivity,
//! periodicity, strut intersections and 3D embeddability.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::reconstructor;
use crate::scalar::Scalar;
use crate::types::{DescriptorSet, UnitCell, Vec3};

/// The checked structural rules.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rule {
    RepeatedNodes,
    IsolatedNode,
    IsolatedStrut,
    IsolatedSubPart,
    StrutIntersection,
    NotEmbeddable,
    PeriodicityDefect,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Rule::RepeatedNodes => "repeated-nodes",
            Rule::IsolatedNode => "isolated-node",
            Rule::IsolatedStrut => "isolated-strut",
            Rule::IsolatedSubPart => "isolated-sub-part",
            Rule::StrutIntersection => "strut-intersection",
            Rule::NotEmbeddable => "not-embeddable",
            Rule::PeriodicityDefect => "periodicity-defect",
        };
        f.write_str(s)
    }
}

/// One rule violation with the node/strut indices involved.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub rule: Rule,
    pub indices: Vec<usize>,
    pub detail: String,
}

/// Aggregate result of all checks, in canonical order.
#[derive(Clone, Debug, Default)]
pub struct ValidationReport {
    violations: Vec<Violation>,
    periodic_dimension: u8,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn violations(&self) -> &[Violation] {
        &self.violations
    }

    pub fn periodic_dimension(&self) -> u8 {
        self.periodic_dimension
    }

    pub fn rules_fired(&self) -> Vec<Rule> {
        let mut rules: Vec<Rule> = self.violations.iter().map(|v| v.rule).collect();
        rules.dedup();
        rules
    }

    fn finish(mut self) -> Self {
        self.violations.sort_by(|a, b| (a.rule, &a.indices).cmp(&(b.rule, &b.indices)));
        self
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "periodic dimension: {}", self.periodic_dimension)?;
        if self.violations.is_empty() {
            writeln!(f, "clean")?;
        }
        for v in &self.violations {
            writeln!(f, "{} {:?}: {}", v.rule, v.indices, v.detail)?;
        }
        Ok(())
    }
}

/// Zero (or near-zero) off-diagonal geometry entries, one violation per pair.
pub fn check_repeated_nodes<S: Scalar>(g: &Matrix<S>, eps_pos: S) -> Vec<Violation> {
    let n = g.n();
    let mut out = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if g.get(i, j) < eps_pos {
                out.push(Violation {
                    rule: Rule::RepeatedNodes,
                    indices: vec![i + 1, j + 1],
                    detail: format!("distance between nodes {} and {} is zero", i + 1, j + 1),
                });
            }
        }
    }
    out
}

/// All-zero rows of the density matrix.
pub fn check_isolated_nodes<S: Scalar>(d: &Matrix<S>) -> Vec<Violation> {
    let n = d.n();
    (0..n)
        .filter(|&i| (0..n).all(|j| d.get(i, j) == S::zero()))
        .map(|i| Violation {
            rule: Rule::IsolatedNode,
            indices: vec![i + 1],
            detail: format!("node {} is connected to no strut", i + 1),
        })
        .collect()
}

fn degree<S: Scalar>(d: &Matrix<S>, i: usize) -> usize {
    (0..d.n()).filter(|&j| d.get(i, j) != S::zero()).count()
}

/// Struts whose endpoint rows carry no other connection.
pub fn check_isolated_struts<S: Scalar>(d: &Matrix<S>) -> Vec<Violation> {
    let n = d.n();
    let mut out = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if d.get(i, j) != S::zero() && degree(d, i) == 1 && degree(d, j) == 1 {
                out.push(Violation {
                    rule: Rule::IsolatedStrut,
                    indices: vec![i + 1, j + 1],
                    detail: format!("strut ({}, {}) has no link to the rest", i + 1, j + 1),
                });
            }
        }
    }
    out
}

/// Breadth-first traversal of the nonzero pattern from node 1. Unreached
/// nodes form the isolated-sub-part violation. Nodes already reported as
/// isolated nodes or as endpoints of isolated struts are left to those
/// rules and not re-reported here.
pub fn check_connected<S: Scalar>(d: &Matrix<S>) -> Vec<Violation> {
    let n = d.n();
    let isolated_nodes: Vec<bool> = (0..n).map(|i| degree(d, i) == 0).collect();
    let mut in_isolated_strut = vec![false; n];
    for v in check_isolated_struts(d) {
        in_isolated_strut[v.indices[0] - 1] = true;
        in_isolated_strut[v.indices[1] - 1] = true;
    }
    let excluded = |i: usize| isolated_nodes[i] || in_isolated_strut[i];

    let start = match (0..n).find(|&i| !excluded(i)) {
        Some(s) => s,
        None => return Vec::new(),
    };
    let mut reached = vec![false; n];
    let mut queue = std::collections::VecDeque::from([start]);
    reached[start] = true;
    while let Some(i) = queue.pop_front() {
        for j in 0..n {
            if d.get(i, j) != S::zero() && !reached[j] {
                reached[j] = true;
                queue.push_back(j);
            }
        }
    }
    let missing: Vec<usize> =
        (0..n).filter(|&i| !reached[i] && !excluded(i)).map(|i| i + 1).collect();
    if missing.is_empty() {
        Vec::new()
    } else {
        vec![Violation {
            rule: Rule::IsolatedSubPart,
            indices: missing.clone(),
            detail: format!("nodes {missing:?} are not reached from the main network"),
        }]
    }
}

/// Periodic dimension plus defects: an all-zero packing matrix, or pairs on
/// the same axis with unequal geometry entries.
pub fn check_periodicity<S: Scalar>(
    p: &Matrix<i32>,
    g: &Matrix<S>,
    eps_pos: S,
) -> (u8, Vec<Violation>) {
    let n = p.n();
    let mut axes = std::collections::BTreeSet::new();
    for v in p.entries() {
        if v != 0 {
            axes.insert(v.abs());
        }
    }
    let dim = axes.len() as u8;
    let mut out = Vec::new();
    if dim == 0 {
        out.push(Violation {
            rule: Rule::PeriodicityDefect,
            indices: vec![],
            detail: "packing matrix is all zero; the cell cannot be periodically arranged".into(),
        });
    }
    for d in axes {
        let mut len: Option<(S, usize, usize)> = None;
        for i in 0..n {
            for j in 0..n {
                if p.get(i, j) == d {
                    let r = g.get(i, j);
                    match len {
                        None => len = Some((r, i, j)),
                        Some((l0, i0, j0)) => {
                            if (r - l0).abs() > eps_pos {
                                out.push(Violation {
                                    rule: Rule::PeriodicityDefect,
                                    indices: vec![i0 + 1, j0 + 1, i + 1, j + 1],
                                    detail: format!(
                                        "axis {d} pairs have unequal periodic lengths {} and {}",
                                        l0, r
                                    ),
                                });
                            }
                        }
                    }
                }
            }
        }
    }
    (dim, out)
}

/// Spatial relation of an unordered strut pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairState {
    /// Illegal contact: collinear overlap, or coplanar interior contact.
    Intersect,
    /// No contact, or contact exactly at a shared node.
    Clear,
    /// One of the struts is absent, or both indices name the same strut.
    Undefined,
}

/// Pairwise intersection states keyed by the two struts' endpoint pairs
/// (each pair sorted, pairs sorted).
#[derive(Clone, Debug, Default)]
pub struct IntersectionState {
    states: BTreeMap<((usize, usize), (usize, usize)), PairState>,
}

impl IntersectionState {
    pub fn get(&self, a: (usize, usize), b: (usize, usize)) -> PairState {
        let a = sort_pair(a);
        let b = sort_pair(b);
        if a == b {
            return PairState::Undefined;
        }
        let key = if a < b { (a, b) } else { (b, a) };
        self.states.get(&key).copied().unwrap_or(PairState::Undefined)
    }

    pub fn intersecting_pairs(&self) -> Vec<((usize, usize), (usize, usize))> {
        self.states
            .iter()
            .filter(|(_, &s)| s == PairState::Intersect)
            .map(|(&k, _)| k)
            .collect()
    }
}

fn sort_pair(p: (usize, usize)) -> (usize, usize) {
    if p.0 <= p.1 {
        p
    } else {
        (p.1, p.0)
    }
}

/// Classify one segment pair. Contact exactly at a shared endpoint is legal;
/// collinear overlap and contact interior to either segment are not.
pub fn segment_pair_state<S: Scalar>(
    a0: Vec3<S>,
    a1: Vec3<S>,
    b0: Vec3<S>,
    b1: Vec3<S>,
    eps: S,
) -> Result<PairState> {
    let dir_a = a1 - a0;
    let dir_b = b1 - b0;
    let len_a = dir_a.norm();
    let len_b = dir_b.norm();
    if len_a < eps || len_b < eps {
        return Err(Error::DegenerateGeometry("zero-length strut".into()));
    }

    let cross = dir_a.cross(dir_b);
    if cross.norm() <= eps * len_a.max(len_b) {
        // Parallel. Collinear iff both endpoints of B sit on line A.
        let u = dir_a.scaled(S::one() / len_a);
        let off0 = b0 - a0;
        let off1 = b1 - a0;
        let perp0 = (off0 - u.scaled(off0.dot(u))).norm();
        let perp1 = (off1 - u.scaled(off1.dot(u))).norm();
        if perp0 > eps || perp1 > eps {
            return Ok(PairState::Clear); // parallel, distinct lines
        }
        // Collinear: 1D interval overlap along the common line.
        let (tb0, tb1) = (off0.dot(u), off1.dot(u));
        let (blo, bhi) = if tb0 <= tb1 { (tb0, tb1) } else { (tb1, tb0) };
        let overlap = bhi.min(len_a) - blo.max(S::zero());
        if overlap > eps {
            Ok(PairState::Intersect)
        } else {
            Ok(PairState::Clear)
        }
    } else {
        // Closest-point parameters by least squares on the two directions.
        let r = b0 - a0;
        let aa = dir_a.dot(dir_a);
        let bb = dir_a.dot(dir_b);
        let cc = dir_b.dot(dir_b);
        let dd = dir_a.dot(r);
        let ee = dir_b.dot(r);
        let den = aa * cc - bb * bb;
        let s = (cc * dd - bb * ee) / den;
        let t = (bb * dd - aa * ee) / den;
        let pa = a0 + dir_a.scaled(s);
        let pb = b0 + dir_b.scaled(t);
        let dist = (pa - pb).norm();

        let tp_a = eps / len_a;
        let tp_b = eps / len_b;
        let inside = s >= -tp_a && s <= S::one() + tp_a && t >= -tp_b && t <= S::one() + tp_b;
        let interior_a = s > tp_a && s < S::one() - tp_a;
        let interior_b = t > tp_b && t < S::one() - tp_b;
        if dist < eps && inside && (interior_a || interior_b) {
            Ok(PairState::Intersect)
        } else {
            Ok(PairState::Clear)
        }
    }
}

/// Pairwise states for every unordered pair of distinct struts of the cell.
pub fn check_intersections<S: Scalar>(cell: &UnitCell<S>, eps: S) -> Result<IntersectionState> {
    let struts = cell.struts();
    let mut states = BTreeMap::new();
    for (a, sa) in struts.iter().enumerate() {
        for sb in struts.iter().skip(a + 1) {
            let state = segment_pair_state(
                cell.position(sa.i),
                cell.position(sa.j),
                cell.position(sb.i),
                cell.position(sb.j),
                eps,
            )?;
            let (ka, kb) = (sa.key(), sb.key());
            let key = if ka < kb { (ka, kb) } else { (kb, ka) };
            states.insert(key, state);
        }
    }
    Ok(IntersectionState { states })
}

fn intersection_violations<S: Scalar>(cell: &UnitCell<S>, eps: S) -> Result<Vec<Violation>> {
    let state = check_intersections(cell, eps)?;
    let mut out = Vec::new();
    for ((i, j), (ip, jp)) in state.intersecting_pairs() {
        // If the contact sits on a node neither strut is incident to,
        // name that node as well.
        let through_node = cell
            .nodes()
            .iter()
            .filter(|nd| ![i, j, ip, jp].contains(&nd.id))
            .find(|nd| {
                point_on_segment(nd.position, cell.position(i), cell.position(j), eps)
                    || point_on_segment(nd.position, cell.position(ip), cell.position(jp), eps)
            })
            .map(|nd| nd.id);
        let detail = match through_node {
            Some(id) => format!(
                "struts ({i}, {j}) and ({ip}, {jp}) intersect away from their nodes (through node {id})"
            ),
            None => format!("struts ({i}, {j}) and ({ip}, {jp}) intersect away from their nodes"),
        };
        out.push(Violation { rule: Rule::StrutIntersection, indices: vec![i, j, ip, jp], detail });
    }
    Ok(out)
}

fn point_on_segment<S: Scalar>(p: Vec3<S>, a: Vec3<S>, b: Vec3<S>, eps: S) -> bool {
    let d = b - a;
    let len = d.norm();
    if len < eps {
        return false;
    }
    let t = (p - a).dot(d) / (len * len);
    if t < S::zero() || t > S::one() {
        return false;
    }
    ((p - a) - d.scaled(t)).norm() < eps
}

/// Re-embed the geometry matrix in 3D and flag it when no consistent point
/// set exists within `tau`.
pub fn check_embeddable<S: Scalar>(g: &Matrix<S>, tau: S) -> Vec<Violation> {
    match reconstructor::place_nodes(g) {
        Ok(placement) => {
            let (residual, worst) = reconstructor::worst_residual(&placement.coords, g);
            if residual > tau {
                vec![Violation {
                    rule: Rule::NotEmbeddable,
                    indices: vec![worst.0 + 1, worst.1 + 1],
                    detail: format!(
                        "no 3D point set realizes G; worst residual {:e} at ({}, {})",
                        residual.as_f64(),
                        worst.0 + 1,
                        worst.1 + 1
                    ),
                }]
            } else {
                Vec::new()
            }
        }
        Err(e) => vec![Violation {
            rule: Rule::NotEmbeddable,
            indices: vec![],
            detail: format!("embedding failed: {e}"),
        }],
    }
}

/// Validate raw matrices. Symmetry-level invariants must hold; the
/// structural rules are reported, not errored. Fixtures with deliberately
/// broken rule content (zero distances, empty rows) go through here.
pub fn validate_raw<S: Scalar>(
    g: &Matrix<S>,
    d: &Matrix<S>,
    kt: &Matrix<S>,
    kb: &Matrix<S>,
    p: &Matrix<i32>,
    cell: Option<&UnitCell<S>>,
    eps_pos: Option<S>,
    tau: Option<S>,
) -> Result<ValidationReport> {
    let n = g.rows();
    for (name, m) in [("G", g), ("D", d), ("Kt", kt), ("Kb", kb)] {
        if !m.is_square() || m.rows() != n {
            return Err(Error::InvalidDescriptor(format!("{name} is not {n}x{n}")));
        }
        if !m.is_symmetric() {
            return Err(Error::InvalidDescriptor(format!("{name} is not symmetric")));
        }
        if !m.is_hollow() {
            return Err(Error::InvalidDescriptor(format!("{name} has a nonzero diagonal")));
        }
    }
    if !p.is_square() || p.rows() != n || !p.is_skew_symmetric() {
        return Err(Error::InvalidDescriptor("P must be a skew-symmetric n x n matrix".into()));
    }

    let g_max = g.entries().fold(S::zero(), S::max);
    let eps = eps_pos.unwrap_or_else(|| {
        cell.map(|c| c.default_position_tolerance()).unwrap_or(S::c(1e-9) * g_max)
    });
    let tau = tau.unwrap_or(S::c(1e-6) * g_max);

    let mut violations = Vec::new();
    violations.extend(check_repeated_nodes(g, eps));
    violations.extend(check_isolated_nodes(d));
    violations.extend(check_isolated_struts(d));
    violations.extend(check_connected(d));
    let (dim, periodic) = check_periodicity(p, g, eps);
    violations.extend(periodic);
    let repeated = violations.iter().any(|v| v.rule == Rule::RepeatedNodes);
    if !repeated {
        violations.extend(check_embeddable(g, tau));
    }

    // Intersections need coordinates: use the cell when given, otherwise a
    // fresh embedding when one exists.
    let embeddable = !violations.iter().any(|v| v.rule == Rule::NotEmbeddable);
    match cell {
        Some(c) => violations.extend(intersection_violations(c, eps)?),
        None if embeddable && !repeated => {
            if let Ok(placement) = reconstructor::place_nodes(g) {
                if let Ok(c) = reconstructor::cell_from_embedding(&placement.coords, d, kt, kb) {
                    violations.extend(intersection_violations(&c, eps)?);
                }
            }
        }
        None => {}
    }

    Ok(ValidationReport { violations, periodic_dimension: dim }.finish())
}

/// Validate a well-formed descriptor set, optionally with its coordinates.
pub fn validate<S: Scalar>(
    desc: &DescriptorSet<S>,
    cell: Option<&UnitCell<S>>,
) -> Result<ValidationReport> {
    validate_raw(
        desc.geometry(),
        desc.density(),
        desc.stretching(),
        desc.bending(),
        desc.packing(),
        cell,
        None,
        None,
    )
}

//! Ready-made unit cells: the textbook cubic lattices plus the defective
//! fixtures used to exercise one validation rule at a time.
//!
//! Node numbering of the cubic cells follows the usual textbook convention:
//! the origin corner first, then its translates along axis 2, axis 1 and
//! axis 3. This ordering is deliberately not the lexicographic one the
//! canonicalizer produces.

use crate::encoder::{encode_unchecked, EncodeConfig};
use crate::matrix::Matrix;
use crate::types::{Node, Strut, UnitCell, Vec3};

fn cell(
    positions: &[(f64, f64, f64)],
    struts: &[(usize, usize)],
    props: &[(f64, f64, f64)],
    obb: [f64; 3],
) -> UnitCell<f64> {
    let nodes = positions
        .iter()
        .enumerate()
        .map(|(i, &(x, y, z))| Node { id: i + 1, position: Vec3::new(x, y, z) })
        .collect();
    let struts = struts
        .iter()
        .zip(props)
        .map(|(&(i, j), &(lam, t, b))| Strut::new(i, j, t, b, lam).unwrap())
        .collect();
    UnitCell::new(nodes, struts, obb).unwrap()
}

fn uniform(n: usize, lam: f64, t: f64, b: f64) -> Vec<(f64, f64, f64)> {
    vec![(lam, t, b); n]
}

/// Corner positions of a cube of side `s` in the textbook order.
fn cube_corners(s: f64) -> Vec<(f64, f64, f64)> {
    vec![
        (0.0, 0.0, 0.0),
        (0.0, s, 0.0),
        (s, 0.0, 0.0),
        (s, s, 0.0),
        (0.0, 0.0, s),
        (0.0, s, s),
        (s, 0.0, s),
        (s, s, s),
    ]
}

const CUBE_EDGES: [(usize, usize); 12] = [
    (1, 2),
    (1, 3),
    (1, 5),
    (2, 4),
    (2, 6),
    (3, 4),
    (3, 7),
    (4, 8),
    (5, 6),
    (5, 7),
    (6, 8),
    (7, 8),
];

/// Simple cubic cell: 8 corners, 12 edges.
pub fn sc(s: f64, lam: f64, t: f64, b: f64) -> UnitCell<f64> {
    cell(&cube_corners(s), &CUBE_EDGES, &uniform(12, lam, t, b), [s, s, s])
}

/// Body-centred cubic cell: a centre node (node 1) connected to all 8
/// corners; no edge struts.
pub fn bcc(s: f64, lam: f64, t: f64, b: f64) -> UnitCell<f64> {
    let mut positions = vec![(s / 2.0, s / 2.0, s / 2.0)];
    positions.extend(cube_corners(s));
    let struts: Vec<(usize, usize)> = (2..=9).map(|j| (1, j)).collect();
    cell(&positions, &struts, &uniform(8, lam, t, b), [s, s, s])
}

fn fcc_positions(s: f64) -> Vec<(f64, f64, f64)> {
    let h = s / 2.0;
    let mut positions = cube_corners(s);
    positions.extend([(h, h, 0.0), (h, 0.0, h), (0.0, h, h), (s, h, h), (h, s, h), (h, h, s)]);
    positions
}

const FCC_STRUTS: [(usize, usize); 24] = [
    (9, 1),
    (9, 2),
    (9, 3),
    (9, 4),
    (10, 1),
    (10, 3),
    (10, 5),
    (10, 7),
    (11, 1),
    (11, 2),
    (11, 5),
    (11, 6),
    (12, 3),
    (12, 4),
    (12, 7),
    (12, 8),
    (13, 2),
    (13, 4),
    (13, 6),
    (13, 8),
    (14, 5),
    (14, 6),
    (14, 7),
    (14, 8),
];

/// Face-centred cubic cell: 8 corners plus 6 face centres, each face centre
/// connected to its face's corners.
pub fn fcc(s: f64, lam: f64, t: f64, b: f64) -> UnitCell<f64> {
    cell(&fcc_positions(s), &FCC_STRUTS, &uniform(24, lam, t, b), [s, s, s])
}

/// Octet truss: the face-centred cell plus the octahedron of struts
/// between adjacent face centres.
pub fn octet(s: f64, lam: f64, t: f64, b: f64) -> UnitCell<f64> {
    let mut struts = FCC_STRUTS.to_vec();
    struts.extend([
        (9, 10),
        (9, 11),
        (9, 12),
        (9, 13),
        (10, 11),
        (10, 12),
        (10, 14),
        (11, 13),
        (11, 14),
        (12, 13),
        (12, 14),
        (13, 14),
    ]);
    let n = struts.len();
    cell(&fcc_positions(s), &struts, &uniform(n, lam, t, b), [s, s, s])
}

/// Pyramidal cell: four base corners and a centred apex, periodic along
/// the two in-plane axes only.
pub fn pyramid(s: f64, lam: f64, t: f64, b: f64) -> UnitCell<f64> {
    let positions = vec![
        (0.0, 0.0, 0.0),
        (0.0, s, 0.0),
        (s, 0.0, 0.0),
        (s, s, 0.0),
        (s / 2.0, s / 2.0, s / 2.0),
    ];
    let struts = vec![(5, 1), (5, 2), (5, 3), (5, 4)];
    cell(&positions, &struts, &uniform(4, lam, t, b), [s, s, s])
}

/// A cube with an off-centre interior node whose three struts all carry
/// different section properties. No proper rotation maps it onto its
/// mirror image, which makes it a usable chirality probe.
pub fn chiral_marker(s: f64) -> UnitCell<f64> {
    let mut positions = cube_corners(s);
    positions.push((0.25 * s, 0.5 * s, 0.75 * s));
    let mut struts: Vec<(usize, usize)> = CUBE_EDGES.to_vec();
    struts.extend([(1, 9), (4, 9), (7, 9)]);
    let mut props = uniform(12, 1.0, 1.0, 1.0);
    props.extend([(2.0, 2.0, 2.0), (3.0, 3.0, 3.0), (4.0, 4.0, 4.0)]);
    cell(&positions, &struts, &props, [s, s, s])
}

/// Raw matrices of a deliberately defective cell, with its coordinates.
#[derive(Clone, Debug)]
pub struct RuleFixture {
    pub g: Matrix<f64>,
    pub d: Matrix<f64>,
    pub kt: Matrix<f64>,
    pub kb: Matrix<f64>,
    pub p: Matrix<i32>,
    pub cell: Option<UnitCell<f64>>,
}

fn fixture(cell_: UnitCell<f64>) -> RuleFixture {
    let cfg = EncodeConfig::default();
    let (g, d, kt, kb, p) = encode_unchecked(&cell_, &cfg);
    RuleFixture { g, d, kt, kb, p, cell: Some(cell_) }
}

/// Two nodes sharing one position: the cube plus a ninth node sitting
/// exactly on corner 8, tied in by a body-diagonal strut.
pub fn fig2a(s: f64) -> RuleFixture {
    let mut positions = cube_corners(s);
    positions.push((s, s, s));
    let mut struts: Vec<(usize, usize)> = CUBE_EDGES.to_vec();
    struts.push((1, 9));
    fixture(cell(&positions, &struts, &uniform(13, 1.0, 1.0, 1.0), [s, s, s]))
}

/// A strut-free node: the cube with its centre present but unconnected.
/// The loose node carries label 5; corner labels flow around it.
pub fn fig2b(s: f64) -> RuleFixture {
    let c = cube_corners(s);
    let mut positions = c[..4].to_vec();
    positions.push((s / 2.0, s / 2.0, s / 2.0));
    positions.extend(&c[4..]);
    let bump = |k: usize| if k >= 5 { k + 1 } else { k };
    let struts: Vec<(usize, usize)> = CUBE_EDGES.iter().map(|&(i, j)| (bump(i), bump(j))).collect();
    fixture(cell(&positions, &struts, &uniform(12, 1.0, 1.0, 1.0), [s, s, s]))
}

/// A floating strut: the cube plus a loose interior strut between nodes 3
/// and 5, touching nothing else.
pub fn fig2c(s: f64) -> RuleFixture {
    let c = cube_corners(s);
    let mut positions = vec![c[0], c[1]];
    positions.push((0.3 * s, 0.3 * s, 0.3 * s));
    positions.push(c[2]);
    positions.push((0.3 * s, 0.3 * s, 0.6 * s));
    positions.extend(&c[3..]);
    // Old corner labels 3..8 now sit at 4, 6, 7, 8, 9, 10.
    let relabel = |k: usize| match k {
        1 => 1,
        2 => 2,
        3 => 4,
        4 => 6,
        5 => 7,
        6 => 8,
        7 => 9,
        8 => 10,
        _ => unreachable!(),
    };
    let mut struts: Vec<(usize, usize)> =
        CUBE_EDGES.iter().map(|&(i, j)| (relabel(i), relabel(j))).collect();
    struts.push((3, 5));
    fixture(cell(&positions, &struts, &uniform(13, 1.0, 1.0, 1.0), [s, s, s]))
}

/// Two detached networks: a base pyramid holding node 1 and a floating
/// square of nodes 2, 4, 6, 9.
pub fn fig2d(s: f64) -> RuleFixture {
    let positions = vec![
        (0.0, 0.0, 0.0),            // 1
        (0.2 * s, 0.2 * s, 0.8 * s), // 2
        (s, 0.0, 0.0),              // 3
        (0.8 * s, 0.2 * s, 0.8 * s), // 4
        (0.0, s, 0.0),              // 5
        (0.2 * s, 0.8 * s, 0.8 * s), // 6
        (s, s, 0.0),                // 7
        (0.5 * s, 0.5 * s, 0.5 * s), // 8 (apex)
        (0.8 * s, 0.8 * s, 0.8 * s), // 9
    ];
    let struts = vec![
        (1, 3),
        (1, 5),
        (3, 7),
        (5, 7),
        (8, 1),
        (8, 3),
        (8, 5),
        (8, 7),
        (2, 4),
        (4, 9),
        (9, 6),
        (6, 2),
    ];
    fixture(cell(&positions, &struts, &uniform(12, 1.0, 1.0, 1.0), [s, s, s]))
}

/// A regular tetrahedron: sound as a structure but impossible to tile, so
/// its packing matrix is empty.
pub fn fig2e(s: f64) -> RuleFixture {
    // Edge 0.8 s, offset into the box so no pair is a whole-box translate.
    let (a, o) = (0.8 * s, 0.1 * s);
    let positions = vec![
        (o, o, o),
        (o + a, o, o),
        (o + 0.5 * a, o + 3f64.sqrt() / 2.0 * a, o),
        (o + 0.5 * a, o + 3f64.sqrt() / 6.0 * a, o + (2.0 / 3.0f64).sqrt() * a),
    ];
    let struts = vec![(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)];
    fixture(cell(&positions, &struts, &uniform(6, 1.0, 1.0, 1.0), [s, s, s]))
}

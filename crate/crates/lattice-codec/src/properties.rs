//! Scalar quantities and coefficient matrices read directly off the
//! descriptors: counts, weight, effective density and the per-strut
//! stiffness coefficients.

use crate::error::{Error, Result};
use crate::matrix::ExtendedMatrix;
use crate::scalar::Scalar;
use crate::types::DescriptorSet;

/// Node count, strut count and average coordination number.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Connectivity<S> {
    pub nodes: usize,
    pub struts: usize,
    pub average_coordination: S,
}

pub fn counts<S: Scalar>(desc: &DescriptorSet<S>) -> Connectivity<S> {
    let n = desc.n();
    let nnz = desc.density().entrywise_l0();
    Connectivity {
        nodes: n,
        struts: nnz / 2,
        average_coordination: S::c(nnz as f64) / S::c(n as f64),
    }
}

/// Total strut mass of one cell: half the entrywise 1-norm of `G . D`
/// (each strut appears twice in the symmetric matrices).
pub fn weight<S: Scalar>(desc: &DescriptorSet<S>) -> Result<S> {
    Ok(desc.geometry().hadamard_product(desc.density())?.entrywise_l1() / S::c(2.0))
}

/// The three periodic box lengths read from the packing matrix: for each
/// axis, the geometry entry of its first (row-major) periodic pair.
pub fn periodic_lengths<S: Scalar>(desc: &DescriptorSet<S>) -> Result<[S; 3]> {
    let n = desc.n();
    let p = desc.packing();
    let g = desc.geometry();
    let mut lengths = [None; 3];
    'axis: for d in 0..3 {
        for i in 0..n {
            for j in 0..n {
                if p.get(i, j) == (d + 1) as i32 {
                    lengths[d] = Some(g.get(i, j));
                    continue 'axis;
                }
            }
        }
    }
    let dim = lengths.iter().flatten().count() as u8;
    match lengths {
        [Some(a), Some(b), Some(c)] => Ok([a, b, c]),
        _ => Err(Error::NotFullyPeriodic { dimension: dim }),
    }
}

/// Effective (smeared) density: cell mass over cell volume. Needs all
/// three periodic axes to know the volume.
pub fn density<S: Scalar>(desc: &DescriptorSet<S>) -> Result<S> {
    let [a, b, c] = periodic_lengths(desc)?;
    Ok(weight(desc)? / (a * b * c))
}

/// Effective density relative to the parent material's.
pub fn relative_density<S: Scalar>(desc: &DescriptorSet<S>, parent_density: S) -> Result<S> {
    if parent_density <= S::zero() {
        return Err(Error::Domain("parent density must be positive".into()));
    }
    Ok(density(desc)? / parent_density)
}

/// Entrywise stiffness coefficients: stretch `Kt/G` and the three bending
/// families `Kb/G`, `Kb/G^2`, `Kb/G^3`. Diagonals come out as the
/// undefined sentinel.
#[derive(Clone, Debug)]
pub struct CoefficientMatrices<S> {
    pub stretch: ExtendedMatrix<S>,
    pub bend1: ExtendedMatrix<S>,
    pub bend2: ExtendedMatrix<S>,
    pub bend3: ExtendedMatrix<S>,
}

pub fn coefficient_matrices<S: Scalar>(desc: &DescriptorSet<S>) -> Result<CoefficientMatrices<S>> {
    let g = desc.geometry();
    let g2 = g.hadamard_product(g)?;
    let g3 = g2.hadamard_product(g)?;
    Ok(CoefficientMatrices {
        stretch: desc.stretching().hadamard_div(g)?,
        bend1: desc.bending().hadamard_div(g)?,
        bend2: desc.bending().hadamard_div(&g2)?,
        bend3: desc.bending().hadamard_div(&g3)?,
    })
}

/// One-stop summary. Density fields stay empty below three periodic axes.
#[derive(Clone, Debug)]
pub struct PropertySummary<S> {
    pub nodes: usize,
    pub struts: usize,
    pub average_coordination: S,
    pub weight: S,
    pub periodic_dimension: u8,
    pub density: Option<S>,
    pub relative_density: Option<S>,
}

pub fn summary<S: Scalar>(
    desc: &DescriptorSet<S>,
    parent_density: Option<S>,
) -> Result<PropertySummary<S>> {
    let c = counts(desc);
    let w = weight(desc)?;
    let (dim, rho) = match periodic_lengths(desc) {
        Ok([a, b, c]) => (3, Some(w / (a * b * c))),
        Err(Error::NotFullyPeriodic { dimension }) => (dimension, None),
        Err(e) => return Err(e),
    };
    let rel = match (rho, parent_density) {
        (Some(r), Some(ps)) if ps > S::zero() => Some(r / ps),
        (Some(_), Some(_)) => {
            return Err(Error::Domain("parent density must be positive".into()))
        }
        _ => None,
    };
    Ok(PropertySummary {
        nodes: c.nodes,
        struts: c.struts,
        average_coordination: c.average_coordination,
        weight: w,
        periodic_dimension: dim,
        density: rho,
        relative_density: rel,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoder::{encode, EncodeConfig};
    use crate::prefab;
    use crate::types::DescriptorSet;

    fn desc(cell: &crate::types::UnitCell<f64>) -> DescriptorSet<f64> {
        encode(cell, &EncodeConfig::default()).unwrap()
    }

    #[test]
    fn sc_counts() {
        let d = desc(&prefab::sc(1.0, 1.0, 1.0, 1.0));
        let c = counts(&d);
        assert_eq!(c.nodes, 8);
        assert_eq!(c.struts, 12);
        assert!((c.average_coordination - 3.0).abs() < 1e-15);
    }

    #[test]
    fn octet_coordination() {
        let d = desc(&prefab::octet(1.0, 1.0, 1.0, 1.0));
        let c = counts(&d);
        assert_eq!(c.nodes, 14);
        assert_eq!(c.struts, 36);
        assert!((c.average_coordination - 72.0 / 14.0).abs() < 1e-15);
    }

    #[test]
    fn sc_weight_is_total_edge_length() {
        let d = desc(&prefab::sc(2.0, 1.5, 1.0, 1.0));
        // 12 edges of length 2 at linear density 1.5.
        assert!((weight(&d).unwrap() - 36.0).abs() < 1e-12);
    }

    #[test]
    fn bcc_density() {
        let d = desc(&prefab::bcc(1.0, 1.0, 1.0, 1.0));
        // 8 struts of length sqrt(3)/2 in a unit box.
        let expect = 8.0 * 3f64.sqrt() / 2.0;
        assert!((density(&d).unwrap() - expect).abs() < 1e-12);
        assert!((relative_density(&d, 2.0).unwrap() - expect / 2.0).abs() < 1e-12);
    }

    #[test]
    fn aperiodic_cell_has_no_density() {
        let f = prefab::fig2e(1.0);
        let d = DescriptorSet::new(f.g, f.d, f.kt, f.kb, f.p).unwrap();
        assert!(matches!(density(&d), Err(Error::NotFullyPeriodic { dimension: 0 })));
        let s = summary(&d, Some(1.0)).unwrap();
        assert_eq!(s.periodic_dimension, 0);
        assert!(s.density.is_none());
        assert!(s.relative_density.is_none());
    }

    #[test]
    fn coefficients_divide_entrywise() {
        let d = desc(&prefab::sc(2.0, 1.0, 3.0, 5.0));
        let c = coefficient_matrices(&d).unwrap();
        // Edge (1,2) has length 2: t/r = 1.5, b/r = 2.5, b/r^2 = 1.25,
        // b/r^3 = 0.625.
        assert_eq!(c.stretch.get(0, 1).finite(), Some(1.5));
        assert_eq!(c.bend1.get(0, 1).finite(), Some(2.5));
        assert_eq!(c.bend2.get(0, 1).finite(), Some(1.25));
        assert_eq!(c.bend3.get(0, 1).finite(), Some(0.625));
        // The diagonal is undefined; non-strut pairs carry zero stiffness.
        assert!(c.stretch.get(0, 0).is_omega());
        assert_eq!(c.stretch.get(0, 3).finite(), Some(0.0));
    }

    #[test]
    fn summary_matches_parts() {
        let d = desc(&prefab::fcc(1.0, 2.0, 1.0, 1.0));
        let s = summary(&d, Some(4.0)).unwrap();
        assert_eq!(s.nodes, 14);
        assert_eq!(s.struts, 24);
        assert_eq!(s.periodic_dimension, 3);
        let w = weight(&d).unwrap();
        assert_eq!(s.weight, w);
        assert_eq!(s.density, Some(w));
        assert_eq!(s.relative_density, Some(w / 4.0));
    }
}

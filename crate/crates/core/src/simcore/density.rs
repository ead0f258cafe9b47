use nalgebra::DMatrix;

use super::{tol, Wire, C64};
use crate::error::{domain, Error, Result};

/// Density operator on a list of wires.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOp {
    wires: Vec<Wire>,
    mat: DMatrix<C64>,
}

impl DensityOp {
    /// Validates hermiticity, unit trace and positivity.
    pub fn new(wires: Vec<Wire>, mat: DMatrix<C64>) -> Result<Self> {
        let n: usize = wires.iter().map(|w| w.dim).product();
        if mat.nrows() != n || mat.ncols() != n {
            return domain(format!("density matrix must be {n}x{n}"));
        }
        let herm_err = (&mat - mat.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if herm_err > tol::CONSTRUCTION {
            return domain(format!("matrix is not Hermitian (deviation {herm_err:e})"));
        }
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > tol::CONSTRUCTION || tr.im.abs() > tol::CONSTRUCTION {
            return domain(format!("trace {tr} is not 1"));
        }
        let rho = DensityOp { wires, mat };
        let min = rho.eigenvalues().into_iter().fold(f64::INFINITY, f64::min);
        if min < -tol::CONSTRUCTION {
            return domain(format!("matrix has negative eigenvalue {min:e}"));
        }
        Ok(rho)
    }

    /// Convex combination of operators on a common layout.
    pub fn mix(parts: &[(f64, DensityOp)]) -> Result<Self> {
        let first = match parts.first() {
            Some((_, r)) => r,
            None => return domain("mixture needs at least one component"),
        };
        let mut mat = DMatrix::<C64>::zeros(first.mat.nrows(), first.mat.ncols());
        for (p, r) in parts {
            if r.wires != first.wires {
                return Err(Error::Layout("mixture components have different layouts".into()));
            }
            if *p < 0.0 {
                return domain("mixture weight is negative");
            }
            mat += &r.mat * C64::new(*p, 0.0);
        }
        DensityOp::new(first.wires.clone(), mat)
    }

    pub fn wires(&self) -> &[Wire] {
        &self.wires
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.mat
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self.mat.clone().symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(|a, b| a.total_cmp(b));
        ev
    }

    /// Half the trace norm of the difference.
    pub fn trace_distance(&self, other: &DensityOp) -> Result<f64> {
        if self.wires != other.wires {
            return Err(Error::Layout("trace distance needs identical layouts".into()));
        }
        let diff = &self.mat - &other.mat;
        Ok(0.5 * diff.symmetric_eigenvalues().iter().map(|x| x.abs()).sum::<f64>())
    }
}

/// Von Neumann entropy in bits; eigenvalues below the floor are ignored.
pub fn entropy_bits(rho: &DensityOp) -> f64 {
    rho.eigenvalues()
        .into_iter()
        .filter(|&l| l > tol::EIGEN_FLOOR)
        .map(|l| -l * l.log2())
        .sum::<f64>()
        .max(0.0)
}

/// Shannon entropy in bits of a probability vector.
pub fn shannon_bits(p: &[f64]) -> f64 {
    p.iter().filter(|&&x| x > tol::EIGEN_FLOOR).map(|&x| -x * x.log2()).sum::<f64>().max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simcore::{c64, Party};

    fn diag(ps: &[f64]) -> DensityOp {
        let n = ps.len();
        let wires = vec![Wire::new("A", Party::Alice, n)];
        let mut m = DMatrix::zeros(n, n);
        for (i, p) in ps.iter().enumerate() {
            m[(i, i)] = c64(*p, 0.0);
        }
        DensityOp::new(wires, m).unwrap()
    }

    #[test]
    fn entropy_values() {
        assert!(entropy_bits(&diag(&[1.0, 0.0])).abs() < 1e-15);
        assert!((entropy_bits(&diag(&[0.5, 0.5])) - 1.0).abs() < 1e-12);
        assert!((entropy_bits(&diag(&[0.25; 4])) - 2.0).abs() < 1e-12);
        let h = -(0.75f64 * 0.75f64.log2() + 0.25 * 0.25f64.log2());
        assert!((entropy_bits(&diag(&[0.75, 0.25])) - h).abs() < 1e-12);
    }

    #[test]
    fn entropy_is_basis_independent() {
        // |+><+| has zero entropy even though it is not diagonal
        let wires = vec![Wire::qubit("A", Party::Alice)];
        let m = DMatrix::from_element(2, 2, c64(0.5, 0.0));
        assert!(entropy_bits(&DensityOp::new(wires, m).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn rejects_invalid() {
        let wires = vec![Wire::qubit("A", Party::Alice)];
        let mut m = DMatrix::zeros(2, 2);
        m[(0, 0)] = c64(1.5, 0.0);
        m[(1, 1)] = c64(-0.5, 0.0);
        assert!(DensityOp::new(wires.clone(), m).is_err());
        let mut m = DMatrix::zeros(2, 2);
        m[(0, 0)] = c64(1.0, 0.0);
        m[(0, 1)] = c64(0.1, 0.0);
        assert!(DensityOp::new(wires, m).is_err());
    }

    #[test]
    fn trace_distance_diag() {
        let d = diag(&[0.5, 0.5]).trace_distance(&diag(&[1.0, 0.0])).unwrap();
        assert!((d - 0.5).abs() < 1e-12);
        let mix = DensityOp::mix(&[(0.5, diag(&[1.0, 0.0])), (0.5, diag(&[0.0, 1.0]))]).unwrap();
        assert!(mix.trace_distance(&diag(&[0.5, 0.5])).unwrap() < 1e-12);
    }

    #[test]
    fn shannon() {
        assert!((shannon_bits(&[0.5, 0.25, 0.25]) - 1.5).abs() < 1e-12);
        assert_eq!(shannon_bits(&[1.0]), 0.0);
    }
}

use nalgebra::{DMatrix, DVector};

use super::{c64, QState, Wire, C64};
use crate::error::{domain, Result};

/// Schmidt coefficients above this count towards the rank.
const RANK_CUTOFF: f64 = 1e-10;

/// Schmidt decomposition of a pure state across a bipartition.
#[derive(Debug, Clone)]
pub struct SchmidtDecomp {
    pub left_wires: Vec<Wire>,
    pub right_wires: Vec<Wire>,
    /// Non-increasing.
    pub coefficients: Vec<f64>,
    /// Column `i` is the `i`-th left Schmidt vector.
    pub left_basis: DMatrix<C64>,
    /// Column `i` is the `i`-th right Schmidt vector.
    pub right_basis: DMatrix<C64>,
}

impl SchmidtDecomp {
    pub fn rank(&self) -> usize {
        self.coefficients.iter().filter(|&&c| c > RANK_CUTOFF).count()
    }

    /// Entanglement entropy in bits.
    pub fn entropy_bits(&self) -> f64 {
        self.coefficients
            .iter()
            .map(|c| c * c)
            .filter(|&p| p > super::tol::EIGEN_FLOOR)
            .map(|p| -p * p.log2())
            .sum()
    }

    /// Rebuilds the state with wires ordered `left ++ right`.
    pub fn reconstruct(&self) -> Result<QState> {
        let nl = self.left_basis.nrows();
        let nr = self.right_basis.nrows();
        let mut amps = vec![C64::default(); nl * nr];
        for (k, &c) in self.coefficients.iter().enumerate() {
            let l = self.left_basis.column(k);
            let r = self.right_basis.column(k);
            for i in 0..nl {
                for j in 0..nr {
                    amps[i * nr + j] += l[i] * r[j] * c64(c, 0.0);
                }
            }
        }
        let mut wires = self.left_wires.clone();
        wires.extend(self.right_wires.iter().cloned());
        QState::new(wires, amps)
    }
}

/// Decomposes `state` with `left` (in the given order) against every other wire.
pub fn schmidt_decompose(state: &QState, left: &[&str]) -> Result<SchmidtDecomp> {
    let mut lpos = Vec::with_capacity(left.len());
    for id in left {
        let p = state.wire_index(id)?;
        if lpos.contains(&p) {
            return domain(format!("wire `{id}` listed twice"));
        }
        lpos.push(p);
    }
    let rpos: Vec<usize> = (0..state.wires().len()).filter(|p| !lpos.contains(p)).collect();
    if lpos.is_empty() || rpos.is_empty() {
        return domain("both sides of a Schmidt cut must be nonempty");
    }
    let psi = state.as_matrix(&lpos, &rpos);
    let svd = psi.svd(true, true);
    let u = svd.u.expect("u requested");
    let v_t = svd.v_t.expect("v_t requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));

    let coefficients: Vec<f64> = order.iter().map(|&k| svd.singular_values[k]).collect();
    let left_basis = DMatrix::from_columns(&order.iter().map(|&k| u.column(k).into_owned()).collect::<Vec<DVector<C64>>>());
    let right_basis = DMatrix::from_columns(
        &order.iter().map(|&k| v_t.row(k).transpose().into_owned()).collect::<Vec<DVector<C64>>>(),
    );
    Ok(SchmidtDecomp {
        left_wires: lpos.iter().map(|&p| state.wires()[p].clone()).collect(),
        right_wires: rpos.iter().map(|&p| state.wires()[p].clone()).collect(),
        coefficients,
        left_basis,
        right_basis,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simcore::{fidelity_pure, make_basis_state, make_ebit_pairs, Party};

    #[test]
    fn product_and_bell() {
        let p = make_basis_state(
            vec![Wire::qubit("A", Party::Alice), Wire::qubit("B", Party::Bob)],
            &[1, 0],
        )
        .unwrap();
        let d = schmidt_decompose(&p, &["A"]).unwrap();
        assert_eq!(d.rank(), 1);
        assert!(d.entropy_bits().abs() < 1e-12);

        let b = make_ebit_pairs(2).unwrap();
        let d = schmidt_decompose(&b, &["A0", "A1"]).unwrap();
        assert_eq!(d.rank(), 4);
        for c in &d.coefficients {
            assert!((c - 0.5).abs() < 1e-12);
        }
        assert!((d.entropy_bits() - 2.0).abs() < 1e-12);
        let d = schmidt_decompose(&b, &["A0", "B0"]).unwrap();
        assert_eq!(d.rank(), 1);
    }

    #[test]
    fn reconstruct_round_trip() {
        let t = 0.3f64;
        let s = QState::new(
            vec![Wire::qubit("A", Party::Alice), Wire::new("B", Party::Bob, 3)],
            vec![c64(t.cos(), 0.0), C64::default(), C64::default(), C64::default(), c64(0.0, t.sin()), C64::default()],
        )
        .unwrap();
        let d = schmidt_decompose(&s, &["B"]).unwrap();
        assert_eq!(d.rank(), 2);
        assert!((d.coefficients[0] - t.cos()).abs() < 1e-12);
        let back = d.reconstruct().unwrap().aligned_to(&s).unwrap();
        assert!((fidelity_pure(&back, &s).unwrap() - 1.0).abs() < 1e-8);
    }
}

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::{c64, tol, BlockOp, DensityOp, Party, Wire, C64, MAX_DIM};
use crate::error::{domain, Error, Result};

/// Pure state over an ordered list of labelled wires.
#[derive(Debug, Clone, PartialEq)]
pub struct QState {
    wires: Vec<Wire>,
    amps: Vec<C64>,
}

/// Serialized form: wire metadata plus `[re, im]` amplitude pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateDump {
    pub wires: Vec<Wire>,
    pub amplitudes: Vec<[f64; 2]>,
}

fn total_dim(wires: &[Wire]) -> Result<usize> {
    let mut seen = HashSet::new();
    let mut total: usize = 1;
    for w in wires {
        if w.dim < 2 {
            return domain(format!("wire `{}` has dimension {} < 2", w.id, w.dim));
        }
        if !seen.insert(w.id.as_str()) {
            return domain(format!("duplicate wire id `{}`", w.id));
        }
        total = match total.checked_mul(w.dim) {
            Some(t) if t <= MAX_DIM => t,
            _ => return Err(Error::Size(format!("register dimension exceeds {MAX_DIM}"))),
        };
    }
    Ok(total)
}

fn strides_of(wires: &[Wire]) -> Vec<usize> {
    let mut strides = vec![1; wires.len()];
    for i in (0..wires.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * wires[i + 1].dim;
    }
    strides
}

#[inline]
fn digit(idx: usize, stride: usize, dim: usize) -> usize {
    (idx / stride) % dim
}

/// Removes one digit from a mixed-radix index.
#[inline]
fn drop_digit(idx: usize, stride: usize, dim: usize) -> usize {
    (idx / (stride * dim)) * stride + idx % stride
}

impl QState {
    /// Builds a state, requiring unit norm within the construction tolerance.
    pub fn new(wires: Vec<Wire>, amps: Vec<C64>) -> Result<Self> {
        let n = total_dim(&wires)?;
        if amps.len() != n {
            return domain(format!("expected {n} amplitudes, got {}", amps.len()));
        }
        let state = QState { wires, amps };
        let norm = state.norm();
        if (norm - 1.0).abs() > tol::CONSTRUCTION {
            return domain(format!("state norm {norm} is not 1"));
        }
        Ok(state)
    }

    /// Builds a state from an arbitrary nonzero vector by normalizing it.
    pub fn normalized(wires: Vec<Wire>, mut amps: Vec<C64>) -> Result<Self> {
        let n = total_dim(&wires)?;
        if amps.len() != n {
            return domain(format!("expected {n} amplitudes, got {}", amps.len()));
        }
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-300 {
            return domain("cannot normalize the zero vector");
        }
        amps.iter_mut().for_each(|a| *a /= norm);
        Ok(QState { wires, amps })
    }

    /// The empty register: a single amplitude equal to 1.
    pub fn scalar() -> Self {
        QState { wires: Vec::new(), amps: vec![c64(1.0, 0.0)] }
    }

    pub fn wires(&self) -> &[Wire] {
        &self.wires
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn wire(&self, id: &str) -> Option<&Wire> {
        self.wires.iter().find(|w| w.id == id)
    }

    pub fn wire_index(&self, id: &str) -> Result<usize> {
        self.wires
            .iter()
            .position(|w| w.id == id)
            .ok_or_else(|| Error::Domain(format!("no wire `{id}`")))
    }

    /// Ids of all wires held by `party`, in register order.
    pub fn ids_of(&self, party: Party) -> Vec<String> {
        self.wires.iter().filter(|w| w.party == party).map(|w| w.id.clone()).collect()
    }

    pub fn strides(&self) -> Vec<usize> {
        strides_of(&self.wires)
    }

    pub fn index_of(&self, labels: &[usize]) -> Result<usize> {
        if labels.len() != self.wires.len() {
            return domain(format!("expected {} labels, got {}", self.wires.len(), labels.len()));
        }
        let mut idx = 0;
        for (w, &l) in self.wires.iter().zip(labels) {
            if l >= w.dim {
                return domain(format!("label {l} out of range for wire `{}` (dim {})", w.id, w.dim));
            }
            idx = idx * w.dim + l;
        }
        Ok(idx)
    }

    pub fn labels_of(&self, mut index: usize) -> Vec<usize> {
        let mut labels = vec![0; self.wires.len()];
        for (i, w) in self.wires.iter().enumerate().rev() {
            labels[i] = index % w.dim;
            index /= w.dim;
        }
        labels
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn amplitude(&self, labels: &[usize]) -> Result<C64> {
        Ok(self.amps[self.index_of(labels)?])
    }

    /// Index of the largest-magnitude amplitude.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (i, a) in self.amps.iter().enumerate() {
            if a.norm_sqr() > self.amps[best].norm_sqr() {
                best = i;
            }
        }
        best
    }

    pub fn tensor(&self, other: &QState) -> Result<QState> {
        let mut wires = self.wires.clone();
        wires.extend(other.wires.iter().cloned());
        total_dim(&wires)?;
        let mut amps = Vec::with_capacity(self.amps.len() * other.amps.len());
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        Ok(QState { wires, amps })
    }

    /// Applies `op` to the named wires, identity elsewhere.
    pub fn apply(&self, op: &dyn BlockOp, targets: &[&str]) -> Result<QState> {
        let mut out = self.clone();
        out.apply_in_place(op, targets)?;
        Ok(out)
    }

    pub fn apply_in_place(&mut self, op: &dyn BlockOp, targets: &[&str]) -> Result<()> {
        let positions = self.target_positions(targets)?;
        check_grouping(&op.factor_dims(), &positions.iter().map(|&p| self.wires[p].dim).collect::<Vec<_>>())?;
        let strides = self.strides();
        let tdims: Vec<usize> = positions.iter().map(|&p| self.wires[p].dim).collect();
        let block: usize = tdims.iter().product();

        let mut offsets = vec![0usize; block];
        for (g, off) in offsets.iter_mut().enumerate() {
            let mut rem = g;
            for k in (0..positions.len()).rev() {
                *off += (rem % tdims[k]) * strides[positions[k]];
                rem /= tdims[k];
            }
        }

        let mut out = vec![C64::default(); self.amps.len()];
        let mut buf_in = vec![C64::default(); block];
        let mut buf_out = vec![C64::default(); block];
        for base in 0..self.amps.len() {
            if positions.iter().any(|&p| digit(base, strides[p], self.wires[p].dim) != 0) {
                continue;
            }
            for g in 0..block {
                buf_in[g] = self.amps[base + offsets[g]];
            }
            buf_out.iter_mut().for_each(|v| *v = C64::default());
            op.apply_block(&buf_in, &mut buf_out);
            for g in 0..block {
                out[base + offsets[g]] = buf_out[g];
            }
        }
        self.amps = out;
        Ok(())
    }

    fn target_positions(&self, targets: &[&str]) -> Result<Vec<usize>> {
        let mut seen = HashSet::new();
        let mut positions = Vec::with_capacity(targets.len());
        for t in targets {
            if !seen.insert(*t) {
                return domain(format!("wire `{t}` targeted twice"));
            }
            positions.push(self.wire_index(t)?);
        }
        Ok(positions)
    }

    /// Reduced density operator on `keep` (in the given order).
    pub fn partial_trace(&self, keep: &[&str]) -> Result<DensityOp> {
        if keep.is_empty() {
            return domain("partial trace needs a nonempty keep set");
        }
        let kept = self.target_positions(keep)?;
        let rest: Vec<usize> = (0..self.wires.len()).filter(|i| !kept.contains(i)).collect();
        let psi = self.as_matrix(&kept, &rest);
        let rho = &psi * psi.adjoint();
        let wires = kept.iter().map(|&p| self.wires[p].clone()).collect();
        DensityOp::new(wires, rho)
    }

    /// Reduced density operator of every wire held by `party`.
    pub fn party_marginal(&self, party: Party) -> Result<DensityOp> {
        let ids = self.ids_of(party);
        let refs: Vec<&str> = ids.iter().map(String::as_str).collect();
        self.partial_trace(&refs)
    }

    /// Amplitudes reshaped into a (row wires) x (column wires) matrix.
    pub(crate) fn as_matrix(&self, rows: &[usize], cols: &[usize]) -> nalgebra::DMatrix<C64> {
        let strides = self.strides();
        let rdims: Vec<usize> = rows.iter().map(|&p| self.wires[p].dim).collect();
        let cdims: Vec<usize> = cols.iter().map(|&p| self.wires[p].dim).collect();
        let nr: usize = rdims.iter().product();
        let nc: usize = cdims.iter().product();
        let mut m = nalgebra::DMatrix::<C64>::zeros(nr, nc);
        for (idx, a) in self.amps.iter().enumerate() {
            if a.norm_sqr() == 0.0 {
                continue;
            }
            let mut r = 0;
            for &p in rows {
                r = r * self.wires[p].dim + digit(idx, strides[p], self.wires[p].dim);
            }
            let mut c = 0;
            for &p in cols {
                c = c * self.wires[p].dim + digit(idx, strides[p], self.wires[p].dim);
            }
            m[(r, c)] = *a;
        }
        m
    }

    /// Same state with wires permuted into `order` (which must name every wire).
    pub fn reordered(&self, order: &[&str]) -> Result<QState> {
        if order.len() != self.wires.len() {
            return Err(Error::Layout(format!(
                "reorder names {} wires, state has {}",
                order.len(),
                self.wires.len()
            )));
        }
        let positions = self.target_positions(order)?;
        let m = self.as_matrix(&positions, &[]);
        let wires = positions.iter().map(|&p| self.wires[p].clone()).collect();
        Ok(QState { wires, amps: m.column(0).iter().copied().collect() })
    }

    /// Reorders wires to match `other` and checks dims and parties agree.
    pub fn aligned_to(&self, other: &QState) -> Result<QState> {
        let order: Vec<&str> = other.wires.iter().map(|w| w.id.as_str()).collect();
        let out = self.reordered(&order).map_err(|e| Error::Layout(e.to_string()))?;
        if out.wires != other.wires {
            return Err(Error::Layout("wire dims or parties differ".into()));
        }
        Ok(out)
    }

    /// `<self|other>` for identical layouts.
    pub fn inner(&self, other: &QState) -> Result<C64> {
        if self.wires != other.wires {
            return Err(Error::Layout("inner product needs identical wire layouts".into()));
        }
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    /// Appends a fresh wire in state |0>.
    pub fn push_wire(&mut self, wire: Wire) -> Result<()> {
        let mut wires = self.wires.clone();
        let d = wire.dim;
        wires.push(wire);
        total_dim(&wires)?;
        let mut amps = vec![C64::default(); self.amps.len() * d];
        for (i, a) in self.amps.iter().enumerate() {
            amps[i * d] = *a;
        }
        self.wires = wires;
        self.amps = amps;
        Ok(())
    }

    pub fn set_party(&mut self, id: &str, party: Party) -> Result<()> {
        let i = self.wire_index(id)?;
        self.wires[i].party = party;
        Ok(())
    }

    pub fn rename_wire(&mut self, id: &str, new_id: &str) -> Result<()> {
        if id != new_id && self.wire(new_id).is_some() {
            return domain(format!("wire `{new_id}` already exists"));
        }
        let i = self.wire_index(id)?;
        self.wires[i].id = new_id.to_string();
        Ok(())
    }

    /// Total probability of basis labels satisfying `pred`.
    pub fn weight_where(&self, pred: impl Fn(&[usize]) -> bool) -> f64 {
        self.amps
            .iter()
            .enumerate()
            .filter(|(_, a)| a.norm_sqr() > 0.0)
            .filter(|(i, _)| pred(&self.labels_of(*i)))
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    /// Removes wire `id`, keeping the component where it reads `value`.
    ///
    /// Returns the norm of the discarded remainder; the kept part is not
    /// renormalized so callers can decide what leakage is acceptable.
    pub fn remove_wire(&mut self, id: &str, value: usize) -> Result<f64> {
        let p = self.wire_index(id)?;
        let (stride, dim) = (self.strides()[p], self.wires[p].dim);
        if value >= dim {
            return domain(format!("value {value} out of range for `{id}`"));
        }
        let mut amps = vec![C64::default(); self.amps.len() / dim];
        let mut leak = 0.0;
        for (idx, a) in self.amps.iter().enumerate() {
            if digit(idx, stride, dim) == value {
                amps[drop_digit(idx, stride, dim)] = *a;
            } else {
                leak += a.norm_sqr();
            }
        }
        self.wires.remove(p);
        self.amps = amps;
        Ok(leak.sqrt())
    }

    /// Ideal copying isometry |v>_src -> |v>_src |v>_new.
    pub fn copy_into_new(&mut self, src: &str, new_wire: Wire) -> Result<()> {
        let p = self.wire_index(src)?;
        let (stride, dim) = (self.strides()[p], self.wires[p].dim);
        if new_wire.dim != dim {
            return domain(format!("copy target has dim {}, source `{src}` has {dim}", new_wire.dim));
        }
        let mut wires = self.wires.clone();
        wires.push(new_wire);
        total_dim(&wires)?;
        let mut amps = vec![C64::default(); self.amps.len() * dim];
        for (idx, a) in self.amps.iter().enumerate() {
            amps[idx * dim + digit(idx, stride, dim)] = *a;
        }
        self.wires = wires;
        self.amps = amps;
        Ok(())
    }

    /// Ideal coherent erasure |v>_keep |v>_erase -> |v>_keep.
    ///
    /// Returns the norm of the component where the two wires disagree; that
    /// component is dropped.
    pub fn erase_duplicate(&mut self, keep: &str, erase: &str) -> Result<f64> {
        let pk = self.wire_index(keep)?;
        let pe = self.wire_index(erase)?;
        if pk == pe {
            return domain("keep and erase wires must differ");
        }
        if self.wires[pk].dim != self.wires[pe].dim {
            return domain("coherent erasure needs equal wire dimensions");
        }
        let strides = self.strides();
        let dim = self.wires[pe].dim;
        let mut amps = vec![C64::default(); self.amps.len() / dim];
        let mut leak = 0.0;
        for (idx, a) in self.amps.iter().enumerate() {
            if digit(idx, strides[pk], dim) == digit(idx, strides[pe], dim) {
                amps[drop_digit(idx, strides[pe], dim)] = *a;
            } else {
                leak += a.norm_sqr();
            }
        }
        self.wires.remove(pe);
        self.amps = amps;
        Ok(leak.sqrt())
    }

    pub fn dump(&self) -> StateDump {
        StateDump {
            wires: self.wires.clone(),
            amplitudes: self.amps.iter().map(|a| [a.re, a.im]).collect(),
        }
    }

    pub fn from_dump(dump: &StateDump) -> Result<QState> {
        QState::new(
            dump.wires.clone(),
            dump.amplitudes.iter().map(|[re, im]| c64(*re, *im)).collect(),
        )
    }
}

/// Checks that the target dims can be grouped, in order, onto the factors.
fn check_grouping(factors: &[usize], targets: &[usize]) -> Result<()> {
    let mut t = targets.iter();
    for &f in factors {
        let mut acc = 1usize;
        while acc < f {
            match t.next() {
                Some(&d) => acc *= d,
                None => return domain(format!("targets too small for gate factor of dim {f}")),
            }
        }
        if acc != f {
            return domain(format!("target dims do not match gate factor of dim {f}"));
        }
    }
    if t.next().is_some() {
        return domain("more target wires than the gate acts on");
    }
    Ok(())
}

/// Computational basis state on `wires` with one label per wire.
pub fn make_basis_state(wires: Vec<Wire>, labels: &[usize]) -> Result<QState> {
    let n = total_dim(&wires)?;
    let mut s = QState { wires, amps: vec![C64::default(); n] };
    let idx = s.index_of(labels)?;
    s.amps[idx] = c64(1.0, 0.0);
    Ok(s)
}

/// `k` Bell pairs on wires `A0, B0, A1, B1, ...`.
pub fn make_ebit_pairs(k: usize) -> Result<QState> {
    let mut s = QState::scalar();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    for i in 0..k {
        let pair = QState {
            wires: vec![Wire::qubit(format!("A{i}"), Party::Alice), Wire::qubit(format!("B{i}"), Party::Bob)],
            amps: vec![c64(h, 0.0), C64::default(), C64::default(), c64(h, 0.0)],
        };
        s = s.tensor(&pair)?;
    }
    Ok(s)
}

/// `|<a|b>|^2` for states with the same layout.
pub fn fidelity_pure(a: &QState, b: &QState) -> Result<f64> {
    Ok(a.inner(b)?.norm_sqr().min(1.0))
}

/// Trace distance between two pure states, `sqrt(1 - F)`.
pub fn trace_distance(a: &QState, b: &QState) -> Result<f64> {
    Ok((1.0 - fidelity_pure(a, b)?).max(0.0).sqrt())
}

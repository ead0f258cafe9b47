//! Bipartite unitaries and the local gates protocols are built from.
//!
//! A [`GateSpec`] acts on the factors `alice_dims ++ bob_dims`. Local gates
//! list all of their factors in `alice_dims` and leave `bob_dims` empty; who
//! may apply them is decided by the protocol runner, not the gate.

use std::fmt;

use nalgebra::DMatrix;

use crate::error::{domain, Error, Result};
use crate::simcore::{c64, tol, BlockOp, C64};

/// Largest register size (bits per side) accepted by the structured constructors.
pub const MAX_M: u32 = 8;

#[derive(Debug, Clone, PartialEq)]
pub enum GateAction {
    /// Basis vector `i` goes to `phases[i] * |table[i]>`.
    Permutation { table: Vec<usize>, phases: Option<Vec<C64>> },
    Dense(DMatrix<C64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct GateSpec {
    /// Base name as used in the registry, e.g. `v_m:3`.
    pub name: String,
    pub adjoint: bool,
    /// True for `F U F`, the gate with Alice's and Bob's roles swapped.
    pub exchanged: bool,
    pub alice_dims: Vec<usize>,
    pub bob_dims: Vec<usize>,
    action: GateAction,
}

impl fmt::Display for GateSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let inner = if self.adjoint { format!("{}^dag", self.name) } else { self.name.clone() };
        if self.exchanged {
            write!(f, "F*{inner}*F")
        } else {
            f.write_str(&inner)
        }
    }
}

impl BlockOp for GateSpec {
    fn factor_dims(&self) -> Vec<usize> {
        self.alice_dims.iter().chain(&self.bob_dims).copied().collect()
    }

    fn apply_block(&self, input: &[C64], output: &mut [C64]) {
        match &self.action {
            GateAction::Permutation { table, phases: None } => {
                for (i, &t) in table.iter().enumerate() {
                    output[t] = input[i];
                }
            }
            GateAction::Permutation { table, phases: Some(ph) } => {
                for (i, &t) in table.iter().enumerate() {
                    output[t] = input[i] * ph[i];
                }
            }
            GateAction::Dense(m) => {
                for (r, out) in output.iter_mut().enumerate() {
                    let mut acc = C64::default();
                    for (c, v) in input.iter().enumerate() {
                        acc += m[(r, c)] * v;
                    }
                    *out = acc;
                }
            }
        }
    }
}

fn split_index(mut idx: usize, dims: &[usize], out: &mut [usize]) {
    for k in (0..dims.len()).rev() {
        out[k] = idx % dims[k];
        idx /= dims[k];
    }
}

fn join_index(digits: &[usize], dims: &[usize]) -> usize {
    digits.iter().zip(dims).fold(0, |acc, (d, n)| acc * n + d)
}

impl GateSpec {
    /// Permutation gate from a map on digit tuples; fails unless the map is a bijection.
    pub fn from_basis_map(
        name: impl Into<String>,
        alice_dims: Vec<usize>,
        bob_dims: Vec<usize>,
        f: impl Fn(&[usize]) -> Vec<usize>,
    ) -> Result<GateSpec> {
        Self::from_basis_map_phased(name, alice_dims, bob_dims, |d| (f(d), c64(1.0, 0.0)), false)
    }

    /// Permutation gate with a phase attached to each input basis vector.
    pub fn from_basis_map_phased(
        name: impl Into<String>,
        alice_dims: Vec<usize>,
        bob_dims: Vec<usize>,
        f: impl Fn(&[usize]) -> (Vec<usize>, C64),
        keep_phases: bool,
    ) -> Result<GateSpec> {
        let name = name.into();
        let dims: Vec<usize> = alice_dims.iter().chain(&bob_dims).copied().collect();
        let n: usize = dims.iter().product();
        let mut table = Vec::with_capacity(n);
        let mut phases = Vec::with_capacity(n);
        let mut hit = vec![false; n];
        let mut digits = vec![0; dims.len()];
        for i in 0..n {
            split_index(i, &dims, &mut digits);
            let (out, ph) = f(&digits);
            if out.len() != dims.len() || out.iter().zip(&dims).any(|(o, d)| o >= d) {
                return domain(format!("basis map of `{name}` leaves the register"));
            }
            if (ph.norm() - 1.0).abs() > tol::CONSTRUCTION {
                return domain(format!("basis map of `{name}` has a non-unit phase"));
            }
            let j = join_index(&out, &dims);
            if std::mem::replace(&mut hit[j], true) {
                return domain(format!("basis map of `{name}` is not a bijection"));
            }
            table.push(j);
            phases.push(ph);
        }
        let phases = if keep_phases { Some(phases) } else { None };
        Ok(GateSpec {
            name,
            adjoint: false,
            exchanged: false,
            alice_dims,
            bob_dims,
            action: GateAction::Permutation { table, phases },
        })
    }

    /// Dense gate; the matrix must be unitary within the construction tolerance.
    pub fn dense(
        name: impl Into<String>,
        alice_dims: Vec<usize>,
        bob_dims: Vec<usize>,
        matrix: DMatrix<C64>,
    ) -> Result<GateSpec> {
        let n: usize = alice_dims.iter().chain(&bob_dims).product();
        if matrix.nrows() != n || matrix.ncols() != n {
            return domain(format!("gate matrix must be {n}x{n}"));
        }
        let g = GateSpec {
            name: name.into(),
            adjoint: false,
            exchanged: false,
            alice_dims,
            bob_dims,
            action: GateAction::Dense(matrix),
        };
        let err = g.unitarity_error();
        if err > tol::CONSTRUCTION {
            return domain(format!("gate `{}` is not unitary (error {err:e})", g.name));
        }
        Ok(g)
    }

    pub fn action(&self) -> &GateAction {
        &self.action
    }

    pub fn dim(&self) -> usize {
        self.alice_dims.iter().chain(&self.bob_dims).product()
    }

    pub fn is_local(&self) -> bool {
        self.bob_dims.is_empty()
    }

    /// Permutation table if the gate is a phase-free permutation.
    pub fn permutation(&self) -> Option<&[usize]> {
        match &self.action {
            GateAction::Permutation { table, phases: None } => Some(table),
            _ => None,
        }
    }

    pub fn matrix(&self) -> DMatrix<C64> {
        match &self.action {
            GateAction::Dense(m) => m.clone(),
            GateAction::Permutation { table, phases } => {
                let n = table.len();
                let mut m = DMatrix::zeros(n, n);
                for (i, &t) in table.iter().enumerate() {
                    m[(t, i)] = phases.as_ref().map_or(c64(1.0, 0.0), |p| p[i]);
                }
                m
            }
        }
    }

    /// `max |U^dag U - I|` entrywise.
    pub fn unitarity_error(&self) -> f64 {
        if let GateAction::Permutation { phases, .. } = &self.action {
            // bijectivity was checked at construction, only phases can be off
            return phases.iter().flatten().map(|p| (p.norm() - 1.0).abs()).fold(0.0, f64::max);
        }
        let m = self.matrix();
        let p = m.adjoint() * &m;
        let n = p.nrows();
        let mut err: f64 = 0.0;
        for r in 0..n {
            for c in 0..n {
                let target = if r == c { 1.0 } else { 0.0 };
                err = err.max((p[(r, c)] - c64(target, 0.0)).norm());
            }
        }
        err
    }

    pub fn adjoint(&self) -> GateSpec {
        let action = match &self.action {
            GateAction::Dense(m) => GateAction::Dense(m.adjoint()),
            GateAction::Permutation { table, phases } => {
                let mut inv = vec![0; table.len()];
                let mut inv_ph = phases.as_ref().map(|_| vec![C64::default(); table.len()]);
                for (i, &t) in table.iter().enumerate() {
                    inv[t] = i;
                    if let (Some(out), Some(p)) = (inv_ph.as_mut(), phases.as_ref()) {
                        out[t] = p[i].conj();
                    }
                }
                GateAction::Permutation { table: inv, phases: inv_ph }
            }
        };
        GateSpec { adjoint: !self.adjoint, action, ..self.clone() }
    }

    /// `F U F`: the same interaction with the two parties' roles swapped.
    pub fn exchange_parties(&self) -> GateSpec {
        let da: usize = self.alice_dims.iter().product();
        let db: usize = self.bob_dims.iter().product();
        // index in (A,B) order -> index in (B,A) order
        let swap = |i: usize| (i % db) * da + i / db;
        let action = match &self.action {
            GateAction::Permutation { table, phases } => {
                let n = table.len();
                let mut t2 = vec![0; n];
                let mut p2 = phases.as_ref().map(|_| vec![C64::default(); n]);
                for (i, &t) in table.iter().enumerate() {
                    t2[swap(i)] = swap(t);
                    if let (Some(out), Some(p)) = (p2.as_mut(), phases.as_ref()) {
                        out[swap(i)] = p[i];
                    }
                }
                GateAction::Permutation { table: t2, phases: p2 }
            }
            GateAction::Dense(m) => {
                let n = m.nrows();
                let mut m2 = DMatrix::zeros(n, n);
                for r in 0..n {
                    for c in 0..n {
                        m2[(swap(r), swap(c))] = m[(r, c)];
                    }
                }
                GateAction::Dense(m2)
            }
        };
        GateSpec {
            name: self.name.clone(),
            adjoint: self.adjoint,
            exchanged: !self.exchanged,
            alice_dims: self.bob_dims.clone(),
            bob_dims: self.alice_dims.clone(),
            action,
        }
    }

    /// Local gate acting as `self` when a `ctrl_dim`-level control reads `value`.
    ///
    /// The control becomes the first factor; all other factors follow in order.
    pub fn controlled(&self, ctrl_dim: usize, value: usize) -> Result<GateSpec> {
        if value >= ctrl_dim {
            return domain(format!("control value {value} out of range for dim {ctrl_dim}"));
        }
        let n = self.dim();
        let mut dims = vec![ctrl_dim];
        dims.extend(self.factor_dims());
        let name = format!("c{value}[{self}]");
        let action = match &self.action {
            GateAction::Permutation { table, phases } => {
                let mut t = Vec::with_capacity(n * ctrl_dim);
                let mut p = phases.as_ref().map(|_| Vec::with_capacity(n * ctrl_dim));
                for c in 0..ctrl_dim {
                    for i in 0..n {
                        let hit = c == value;
                        t.push(c * n + if hit { table[i] } else { i });
                        if let (Some(out), Some(ph)) = (p.as_mut(), phases.as_ref()) {
                            out.push(if hit { ph[i] } else { c64(1.0, 0.0) });
                        }
                    }
                }
                GateAction::Permutation { table: t, phases: p }
            }
            GateAction::Dense(m) => {
                let mut big = DMatrix::identity(n * ctrl_dim, n * ctrl_dim);
                big.view_mut((value * n, value * n), (n, n)).copy_from(m);
                GateAction::Dense(big)
            }
        };
        Ok(GateSpec { name, adjoint: false, exchanged: false, alice_dims: dims, bob_dims: vec![], action })
    }

    /// Number of singular values above `1e-10` of the operator reshaped across the A|B cut.
    pub fn operator_schmidt_rank(&self) -> usize {
        let da: usize = self.alice_dims.iter().product();
        let db: usize = self.bob_dims.iter().product();
        let u = self.matrix();
        let mut r = DMatrix::<C64>::zeros(da * da, db * db);
        for a in 0..da {
            for b in 0..db {
                for a2 in 0..da {
                    for b2 in 0..db {
                        r[(a * da + a2, b * db + b2)] = u[(a * db + b, a2 * db + b2)];
                    }
                }
            }
        }
        r.singular_values().iter().filter(|&&s| s > 1e-10).count()
    }

    /// How many leading target wires (with the given dims) make up Alice's factors.
    pub fn alice_target_count(&self, target_dims: &[usize]) -> Option<usize> {
        let mut i = 0;
        for &f in &self.alice_dims {
            let mut acc = 1;
            while acc < f {
                acc *= *target_dims.get(i)?;
                i += 1;
            }
            if acc != f {
                return None;
            }
        }
        Some(i)
    }
}

fn check_m(m: u32) -> Result<usize> {
    if (1..=MAX_M).contains(&m) {
        Ok(1usize << m)
    } else {
        domain(format!("m = {m} outside 1..={MAX_M}"))
    }
}

/// `|x,0> <-> |x,x>`, every other `|x,y>` fixed.
pub fn u_xoxo(m: u32) -> Result<GateSpec> {
    let n = check_m(m)?;
    GateSpec::from_basis_map(format!("u_xoxo:{m}"), vec![n], vec![n], |d| {
        let (x, y) = (d[0], d[1]);
        if y == 0 {
            vec![x, x]
        } else if y == x {
            vec![x, 0]
        } else {
            vec![x, y]
        }
    })
}

/// `|x,0> -> |x,x>`, `|x,y> -> |x,y-1>` for `0<y<=x`, fixed for `y>x`.
pub fn v_m(m: u32) -> Result<GateSpec> {
    let n = check_m(m)?;
    GateSpec::from_basis_map(format!("v_m:{m}"), vec![n], vec![n], |d| {
        let (x, y) = (d[0], d[1]);
        if y == 0 {
            vec![x, x]
        } else if y <= x {
            vec![x, y - 1]
        } else {
            vec![x, y]
        }
    })
}

pub fn v_m_dag(m: u32) -> Result<GateSpec> {
    Ok(v_m(m)?.adjoint())
}

/// Bell state `(X^{x1} Z^{x2} (x) I)|Phi>` as a 4-vector.
pub fn bell_vector(x1: usize, x2: usize) -> [C64; 4] {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let sign = if x2 == 1 { -1.0 } else { 1.0 };
    let mut v = [C64::default(); 4];
    // Z^{x2} gives |00> + sign|11>; X^{x1} on the first qubit flips its label
    v[x1 << 1] += c64(h, 0.0);
    v[((1 ^ x1) << 1) | 1] += c64(sign * h, 0.0);
    v
}

/// Two-qubit unitary taking each generalized Bell state to `|x1 x2>`.
pub fn u_sd() -> GateSpec {
    let mut m = DMatrix::zeros(4, 4);
    for x1 in 0..2 {
        for x2 in 0..2 {
            let v = bell_vector(x1, x2);
            for (c, a) in v.iter().enumerate() {
                m[(x1 * 2 + x2, c)] = a.conj();
            }
        }
    }
    GateSpec::dense("u_sd", vec![2, 2], vec![], m).expect("Bell basis is orthonormal")
}

/// Reflection exchanging `|01>` and `|Phi_d>` on `C^d (x) C^d`.
pub fn phi_swap(d: usize) -> Result<GateSpec> {
    if d < 2 {
        return domain(format!("phi_swap needs d >= 2, got {d}"));
    }
    let n = d * d;
    let s = 1.0 / (d as f64).sqrt();
    let mut phi = vec![0.0; n];
    for i in 0..d {
        phi[i * d + i] = s;
    }
    let mut e01 = vec![0.0; n];
    e01[1] = 1.0;
    let m = DMatrix::from_fn(n, n, |r, c| {
        let id = if r == c { 1.0 } else { 0.0 };
        c64(id - e01[r] * e01[c] - phi[r] * phi[c] + e01[r] * phi[c] + phi[r] * e01[c], 0.0)
    });
    GateSpec::dense(format!("phi_swap:{d}"), vec![d], vec![d], m)
}

pub fn hadamard() -> GateSpec {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let m = DMatrix::from_row_slice(2, 2, &[c64(h, 0.0), c64(h, 0.0), c64(h, 0.0), c64(-h, 0.0)]);
    GateSpec::dense("h", vec![2], vec![], m).expect("hadamard is unitary")
}

/// Rotation `exp(-i theta Y / 2)`.
pub fn ry(theta: f64) -> GateSpec {
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let m = DMatrix::from_row_slice(2, 2, &[c64(c, 0.0), c64(-s, 0.0), c64(s, 0.0), c64(c, 0.0)]);
    GateSpec::dense(format!("ry:{theta}"), vec![2], vec![], m).expect("rotation is unitary")
}

pub fn pauli_x() -> GateSpec {
    GateSpec::from_basis_map("x", vec![2], vec![], |d| vec![1 - d[0]]).unwrap()
}

pub fn pauli_z() -> GateSpec {
    z_string(&[true])
}

/// Control on the first factor, target on the second.
pub fn cnot() -> GateSpec {
    GateSpec::from_basis_map("cnot", vec![2, 2], vec![], |d| vec![d[0], d[1] ^ d[0]]).unwrap()
}

/// Controlled-Z on two qubits.
pub fn cz() -> GateSpec {
    GateSpec::from_basis_map_phased(
        "cz",
        vec![2, 2],
        vec![],
        |d| (d.to_vec(), c64(if d[0] == 1 && d[1] == 1 { -1.0 } else { 1.0 }, 0.0)),
        true,
    )
    .unwrap()
}

/// `|s, t> -> |s, t XOR s>` on two `d`-level registers, `d` a power of two.
pub fn xor_into(d: usize) -> Result<GateSpec> {
    if d < 2 || !d.is_power_of_two() {
        return domain(format!("xor needs a power-of-two dimension, got {d}"));
    }
    GateSpec::from_basis_map(format!("xor:{d}"), vec![d, d], vec![], |v| vec![v[0], v[1] ^ v[0]])
}

pub fn swap(d: usize) -> Result<GateSpec> {
    if d < 2 {
        return domain("swap needs d >= 2");
    }
    GateSpec::from_basis_map(format!("swap:{d}"), vec![d, d], vec![], |v| vec![v[1], v[0]])
}

/// `|x> -> |x + k mod d>`.
pub fn shift(d: usize, k: usize) -> Result<GateSpec> {
    if d < 2 {
        return domain("shift needs d >= 2");
    }
    GateSpec::from_basis_map(format!("shift:{d}:{k}"), vec![d], vec![], |v| vec![(v[0] + k) % d])
}

/// Increment modulo `2^m` on an `m`-qubit register.
pub fn add_mod(m: u32) -> Result<GateSpec> {
    let n = check_m(m)?;
    GateSpec::from_basis_map(format!("add:{m}"), vec![n], vec![], |v| vec![(v[0] + 1) % n])
}

/// Decrement modulo `2^m` on an `m`-qubit register.
pub fn sub_mod(m: u32) -> Result<GateSpec> {
    let n = check_m(m)?;
    GateSpec::from_basis_map(format!("sub:{m}"), vec![n], vec![], |v| vec![(v[0] + n - 1) % n])
}

/// `Z^{b1} (x) ... (x) Z^{bk}` on `k` qubits.
pub fn z_string(bits: &[bool]) -> GateSpec {
    let name: String = bits.iter().map(|&b| if b { '1' } else { '0' }).collect();
    GateSpec::from_basis_map_phased(
        format!("zstring:{name}"),
        vec![2; bits.len()],
        vec![],
        |d| {
            let odd = d.iter().zip(bits).filter(|(&x, &b)| b && x == 1).count() % 2 == 1;
            (d.to_vec(), c64(if odd { -1.0 } else { 1.0 }, 0.0))
        },
        true,
    )
    .unwrap()
}

/// Outcome classes a comparator can compute into its `w` registers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Comparison {
    /// 1 if `y = 0`, 2 if `0 < y <= x`, 3 if `y > x`.
    VmBranch,
    /// 1 if `y = x`, 2 if `y < x`, 3 if `y > x`.
    Order,
}

impl Comparison {
    pub fn eval(self, x: usize, y: usize) -> usize {
        match self {
            Comparison::VmBranch if y == 0 => 1,
            Comparison::VmBranch if y <= x => 2,
            Comparison::Order if y == x => 1,
            Comparison::Order if y < x => 2,
            _ => 3,
        }
    }

    fn tag(self) -> &'static str {
        match self {
            Comparison::VmBranch => "cmp_vm",
            Comparison::Order => "cmp_ord",
        }
    }
}

/// `|x, a>^A |y, b>^B -> |x, a^w>^A |y, b^w>^B` with `w = kind(x, y)`.
///
/// The `w` registers are 4-dimensional and updated by XOR, so the gate is
/// its own inverse and computing a second comparison into the same register
/// combines the two outcomes reversibly.
pub fn comparator(m: u32, kind: Comparison) -> Result<GateSpec> {
    let n = check_m(m)?;
    GateSpec::from_basis_map(format!("{}:{m}", kind.tag()), vec![n, 4], vec![n, 4], |d| {
        let w = kind.eval(d[0], d[2]);
        vec![d[0], d[1] ^ w, d[2], d[3] ^ w]
    })
}

fn parse_m(arg: Option<&str>, full: &str) -> Result<u32> {
    arg.and_then(|a| a.parse().ok())
        .ok_or_else(|| Error::Domain(format!("gate `{full}` needs an integer parameter")))
}

/// Names accepted by [`gate_by_name`].
pub const REGISTRY: &[&str] = &[
    "u_xoxo:M", "v_m:M", "v_m_dag:M", "u_sd", "u_sd_dag", "phi_swap:D", "h", "x", "z", "cnot", "cz",
    "swap", "add:M", "sub:M", "zstring:BITS", "cmp_vm:M", "cmp_ord:M",
];

/// Looks up a gate by registry name, e.g. `v_m:3` or `zstring:101`.
pub fn gate_by_name(full: &str) -> Result<GateSpec> {
    let mut parts = full.splitn(2, ':');
    let head = parts.next().unwrap_or_default();
    let arg = parts.next();
    match head {
        "u_xoxo" => u_xoxo(parse_m(arg, full)?),
        "v_m" => v_m(parse_m(arg, full)?),
        "v_m_dag" => v_m_dag(parse_m(arg, full)?),
        "u_sd" => Ok(u_sd()),
        "u_sd_dag" => Ok(u_sd().adjoint()),
        "phi_swap" => phi_swap(parse_m(arg, full)? as usize),
        "h" => Ok(hadamard()),
        "x" => Ok(pauli_x()),
        "z" => Ok(pauli_z()),
        "cnot" => Ok(cnot()),
        "cz" => Ok(cz()),
        "swap" => swap(2),
        "add" => add_mod(parse_m(arg, full)?),
        "sub" => sub_mod(parse_m(arg, full)?),
        "cmp_vm" => comparator(parse_m(arg, full)?, Comparison::VmBranch),
        "cmp_ord" => comparator(parse_m(arg, full)?, Comparison::Order),
        "zstring" => {
            let bits = arg.filter(|b| !b.is_empty() && b.chars().all(|c| c == '0' || c == '1'));
            match bits {
                Some(b) => Ok(z_string(&b.chars().map(|c| c == '1').collect::<Vec<_>>())),
                None => domain(format!("gate `{full}` needs a nonempty bit string")),
            }
        }
        _ => Err(Error::UnknownName(full.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simcore::{make_basis_state, Party, QState, Wire};

    fn pair(n: usize, x: usize, y: usize) -> QState {
        make_basis_state(vec![Wire::new("A", Party::Alice, n), Wire::new("B", Party::Bob, n)], &[x, y]).unwrap()
    }

    fn apply_ab(g: &GateSpec, s: &QState) -> QState {
        s.apply(g, &["A", "B"]).unwrap()
    }

    #[test]
    fn u_xoxo_lines() {
        let g = u_xoxo(2).unwrap();
        assert_eq!(apply_ab(&g, &pair(4, 2, 0)), pair(4, 2, 2));
        assert_eq!(apply_ab(&g, &pair(4, 2, 2)), pair(4, 2, 0));
        assert_eq!(apply_ab(&g, &pair(4, 2, 1)), pair(4, 2, 1));
        assert!(matches!(u_xoxo(0), Err(Error::Domain(_))));
        assert!(matches!(u_xoxo(9), Err(Error::Domain(_))));
    }

    #[test]
    fn v_m_lines() {
        let g = v_m(2).unwrap();
        assert_eq!(apply_ab(&g, &pair(4, 2, 0)), pair(4, 2, 2));
        assert_eq!(apply_ab(&g, &pair(4, 3, 2)), pair(4, 3, 1));
        assert_eq!(apply_ab(&g, &pair(4, 1, 3)), pair(4, 1, 3));
        let d = v_m_dag(2).unwrap();
        for x in 0..4 {
            for y in 0..4 {
                assert_eq!(apply_ab(&d, &apply_ab(&g, &pair(4, x, y))), pair(4, x, y));
            }
        }
        // the dagger's own defining lines
        assert_eq!(apply_ab(&d, &pair(4, 2, 2)), pair(4, 2, 0));
        assert_eq!(apply_ab(&d, &pair(4, 3, 1)), pair(4, 3, 2));
        assert_eq!(apply_ab(&d, &pair(4, 1, 3)), pair(4, 1, 3));
    }

    #[test]
    fn u_sd_maps_bell_basis() {
        let g = u_sd();
        for x1 in 0..2 {
            for x2 in 0..2 {
                let wires = vec![Wire::qubit("A", Party::Alice), Wire::qubit("B", Party::Bob)];
                let s = QState::new(wires.clone(), bell_vector(x1, x2).to_vec()).unwrap();
                let out = apply_ab(&g, &s);
                let expect = make_basis_state(wires, &[x1, x2]).unwrap();
                assert!((crate::simcore::fidelity_pure(&out, &expect).unwrap() - 1.0).abs() < 1e-12);
            }
        }
        // explicit (X (x) I)|Phi> = (|10> + |01>)/sqrt2
        let v = bell_vector(1, 0);
        assert!((v[1].re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((v[2].re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn phi_swap_d2() {
        let g = phi_swap(2).unwrap();
        let m = g.matrix();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        // column |01> is |Phi_2>
        assert!((m[(0, 1)].re - h).abs() < 1e-12 && (m[(3, 1)].re - h).abs() < 1e-12);
        assert!(m[(1, 1)].norm() < 1e-12 && m[(2, 1)].norm() < 1e-12);
        // |10> fixed
        assert!((m[(2, 2)].re - 1.0).abs() < 1e-12);
        let sq = &m * &m;
        assert!((sq - DMatrix::identity(4, 4)).iter().all(|z| z.norm() < 1e-12));
        assert!(phi_swap(1).is_err());
    }

    #[test]
    fn local_gate_examples() {
        let w2 = vec![Wire::qubit("a", Party::Alice), Wire::qubit("b", Party::Alice)];
        let s = make_basis_state(w2.clone(), &[1, 1]).unwrap();
        let out = s.apply(&z_string(&[true, false]), &["a", "b"]).unwrap();
        assert_eq!(out.amplitudes()[3], c64(-1.0, 0.0));

        let s = make_basis_state(w2.clone(), &[0, 0]).unwrap();
        let out = s.apply(&sub_mod(2).unwrap(), &["a", "b"]).unwrap();
        assert_eq!(out, make_basis_state(w2.clone(), &[1, 1]).unwrap());

        // 1/2 sum_x (-1)^{b.x}|x> with b = 11 is H^{(x)2}|11>
        let amps = (0..4usize)
            .map(|x| c64(if (x.count_ones() % 2) == 1 { -0.5 } else { 0.5 }, 0.0))
            .collect();
        let mut s = QState::new(w2.clone(), amps).unwrap();
        s.apply_in_place(&hadamard(), &["a"]).unwrap();
        s.apply_in_place(&hadamard(), &["b"]).unwrap();
        assert!((s.amplitudes()[3].re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn unitarity_of_all_constructors() {
        let gates = vec![
            u_xoxo(3).unwrap(),
            v_m(3).unwrap(),
            v_m_dag(3).unwrap(),
            u_sd(),
            phi_swap(3).unwrap(),
            hadamard(),
            ry(0.3),
            pauli_x(),
            pauli_z(),
            cnot(),
            swap(3).unwrap(),
            add_mod(3).unwrap(),
            sub_mod(3).unwrap(),
            z_string(&[true, false, true]),
            comparator(2, Comparison::VmBranch).unwrap(),
        ];
        for g in gates {
            assert!(g.unitarity_error() < 1e-9, "{g}");
        }
    }

    #[test]
    fn permutation_structure() {
        for m in 1..=4 {
            let u = u_xoxo(m).unwrap();
            let t = u.permutation().unwrap();
            assert!(t.iter().enumerate().all(|(i, &j)| t[j] == i), "self-inverse");
            let v = v_m(m).unwrap();
            let vd = v_m_dag(m).unwrap();
            let (tv, td) = (v.permutation().unwrap(), vd.permutation().unwrap());
            assert!((0..tv.len()).all(|i| td[tv[i]] == i));
        }
    }

    #[test]
    fn operator_schmidt_rank_bounds() {
        for m in 1..=3 {
            let r = v_m(m).unwrap().operator_schmidt_rank();
            assert!(r <= 1 << m, "m={m} rank={r}");
        }
        assert_eq!(swap(2).map(|s| GateSpec { bob_dims: vec![2], alice_dims: vec![2], ..s }).unwrap().operator_schmidt_rank(), 4);
    }

    #[test]
    fn exchange_conjugates_by_swap() {
        let g = u_xoxo(2).unwrap();
        let f = g.exchange_parties();
        assert_eq!(f.to_string(), "F*u_xoxo:2*F");
        // F U F |0, x> = |x, x> (Bob's register now plays the control)
        assert_eq!(apply_ab(&f, &pair(4, 0, 2)), pair(4, 2, 2));
        assert_eq!(f.exchange_parties(), g);
        let vd = v_m(2).unwrap().adjoint();
        assert_eq!(vd.to_string(), "v_m:2^dag");
    }

    #[test]
    fn comparator_values() {
        assert_eq!(Comparison::VmBranch.eval(3, 0), 1);
        assert_eq!(Comparison::VmBranch.eval(2, 2), 2);
        assert_eq!(Comparison::VmBranch.eval(1, 3), 3);
        assert_eq!(Comparison::Order.eval(2, 2), 1);
        assert_eq!(Comparison::Order.eval(2, 1), 2);
        assert_eq!(Comparison::Order.eval(1, 2), 3);
    }

    #[test]
    fn controlled_gates() {
        let cx = pauli_x().controlled(2, 1).unwrap();
        assert_eq!(cx.permutation(), cnot().permutation());
        let ch = hadamard().controlled(3, 2).unwrap();
        assert!(ch.unitarity_error() < 1e-12);
        let m = ch.matrix();
        assert!((m[(0, 0)].re - 1.0).abs() < 1e-15 && m[(0, 1)].norm() == 0.0);
        assert!((m[(5, 5)].re + std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        let cz1 = pauli_z().controlled(2, 1).unwrap();
        assert_eq!(cz1.matrix(), cz().matrix());
        assert!(pauli_x().controlled(2, 2).is_err());
    }

    #[test]
    fn registry() {
        assert_eq!(gate_by_name("v_m:3").unwrap(), v_m(3).unwrap());
        assert_eq!(gate_by_name("zstring:101").unwrap(), z_string(&[true, false, true]));
        assert!(matches!(gate_by_name("nope"), Err(Error::UnknownName(_))));
        assert!(matches!(gate_by_name("v_m:x"), Err(Error::Domain(_))));
        assert!(matches!(gate_by_name("v_m:12"), Err(Error::Domain(_))));
    }
}

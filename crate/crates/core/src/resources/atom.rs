use std::fmt;

use serde::{Deserialize, Serialize};

use crate::gates::GateSpec;

/// Direction of a one-way resource.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Dir {
    AtoB,
    BtoA,
}

impl Dir {
    pub fn flip(self) -> Dir {
        match self {
            Dir::AtoB => Dir::BtoA,
            Dir::BtoA => Dir::AtoB,
        }
    }
}

/// Reference to the asymptotic resource `<U>` of a gate.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct GateRef {
    pub name: String,
    pub adjoint: bool,
    pub exchanged: bool,
}

impl GateRef {
    pub fn new(name: impl Into<String>) -> Self {
        GateRef { name: name.into(), adjoint: false, exchanged: false }
    }
}

impl From<&GateSpec> for GateRef {
    fn from(g: &GateSpec) -> Self {
        GateRef { name: g.name.clone(), adjoint: g.adjoint, exchanged: g.exchanged }
    }
}

impl fmt::Display for GateRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let dag = if self.adjoint { "^dag" } else { "" };
        if self.exchanged {
            write!(f, "F*{}{dag}*F", self.name)
        } else {
            write!(f, "{}{dag}", self.name)
        }
    }
}

/// One unit of a communication resource.
///
/// Cobit and co-cobit directions name the side that ends up holding the
/// surviving copy: `Cobit(AtoB)` is `[q->qq]`, `Cobit(BtoA)` is `[qq<-q]`,
/// `Cocobit(AtoB)` is `[qq->q]` and `Cocobit(BtoA)` is `[q<-qq]`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ResourceAtom {
    Cbit(Dir),
    Qubit(Dir),
    Ebit,
    Cobit(Dir),
    Cocobit(Dir),
    Gate(GateRef),
}

impl ResourceAtom {
    pub fn exchange(&self) -> ResourceAtom {
        use ResourceAtom::*;
        match self {
            Cbit(d) => Cbit(d.flip()),
            Qubit(d) => Qubit(d.flip()),
            Ebit => Ebit,
            Cobit(d) => Cobit(d.flip()),
            Cocobit(d) => Cocobit(d.flip()),
            Gate(g) => Gate(GateRef { exchanged: !g.exchanged, ..g.clone() }),
        }
    }

    /// Time reversal as `(sign, atom)`; `None` for cbits.
    pub fn reverse(&self) -> Option<(i8, ResourceAtom)> {
        use ResourceAtom::*;
        Some(match self {
            Cbit(_) => return None,
            Qubit(d) => (1, Qubit(d.flip())),
            Ebit => (-1, Ebit),
            Cobit(d) => (1, Cocobit(d.flip())),
            Cocobit(d) => (1, Cobit(d.flip())),
            Gate(g) => (1, Gate(GateRef { adjoint: !g.adjoint, ..g.clone() })),
        })
    }
}

impl fmt::Display for ResourceAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Dir::*;
        use ResourceAtom::*;
        let s = match self {
            Cbit(AtoB) => "[c->c]",
            Cbit(BtoA) => "[c<-c]",
            Qubit(AtoB) => "[q->q]",
            Qubit(BtoA) => "[q<-q]",
            Ebit => "[qq]",
            Cobit(AtoB) => "[q->qq]",
            Cobit(BtoA) => "[qq<-q]",
            Cocobit(AtoB) => "[qq->q]",
            Cocobit(BtoA) => "[q<-qq]",
            Gate(g) => return write!(f, "<GATE:{g}>"),
        };
        f.write_str(s)
    }
}

/// Bracketed atom spellings accepted by the parser (whitespace already stripped).
pub(crate) fn bracket_atom(inner: &str) -> Option<ResourceAtom> {
    use Dir::*;
    use ResourceAtom::*;
    let inner = inner.replace('→', "->").replace('←', "<-");
    Some(match inner.as_str() {
        "c->c" => Cbit(AtoB),
        "c<-c" => Cbit(BtoA),
        "q->q" => Qubit(AtoB),
        "q<-q" => Qubit(BtoA),
        "qq" => Ebit,
        "q->qq" => Cobit(AtoB),
        "qq<-q" => Cobit(BtoA),
        "qq->q" => Cocobit(AtoB),
        "q<-qq" => Cocobit(BtoA),
        _ => return None,
    })
}

use serde::{Deserialize, Serialize};

/// A point `(C1, C2, E)`: cbits forward, cbits backward and ebits per gate use.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CapacityTriple {
    pub c1: f64,
    pub c2: f64,
    pub e: f64,
}

impl CapacityTriple {
    pub fn new(c1: f64, c2: f64, e: f64) -> Self {
        CapacityTriple { c1, c2, e }
    }
}

/// Maps an achievable point of `U` to one of `U^dag`.
pub fn region_reverse(t: CapacityTriple) -> CapacityTriple {
    CapacityTriple { c1: t.c2, c2: t.c1, e: -t.e - t.c1 - t.c2 }
}

/// A finite set of certified achievable points.
///
/// The accessors are lower bounds on the corresponding capacities: each is
/// the best value attained by a listed point, with the region taken to be
/// closed under giving up resources.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RegionPoints {
    pub points: Vec<CapacityTriple>,
}

impl RegionPoints {
    pub fn new(points: Vec<CapacityTriple>) -> Self {
        RegionPoints { points }
    }

    pub fn reversed(&self) -> RegionPoints {
        RegionPoints { points: self.points.iter().copied().map(region_reverse).collect() }
    }

    fn best(&self, admit: impl Fn(&CapacityTriple) -> bool, score: impl Fn(&CapacityTriple) -> f64) -> Option<f64> {
        self.points.iter().filter(|p| admit(p)).map(score).fold(None, |acc, v| Some(acc.map_or(v, |a: f64| a.max(v))))
    }

    /// Forward classical capacity without entanglement assistance.
    pub fn c_forward(&self) -> Option<f64> {
        self.best(|p| p.c2 >= 0.0 && p.e >= 0.0, |p| p.c1)
    }

    pub fn c_backward(&self) -> Option<f64> {
        self.best(|p| p.c1 >= 0.0 && p.e >= 0.0, |p| p.c2)
    }

    /// Forward classical capacity with free entanglement.
    pub fn c_forward_assisted(&self) -> Option<f64> {
        self.best(|p| p.c2 >= 0.0, |p| p.c1)
    }

    pub fn c_backward_assisted(&self) -> Option<f64> {
        self.best(|p| p.c1 >= 0.0, |p| p.c2)
    }

    pub fn c_sum(&self) -> Option<f64> {
        self.best(|p| p.c1 >= 0.0 && p.c2 >= 0.0 && p.e >= 0.0, |p| p.c1 + p.c2)
    }

    pub fn c_sum_assisted(&self) -> Option<f64> {
        self.best(|p| p.c1 >= 0.0 && p.c2 >= 0.0, |p| p.c1 + p.c2)
    }

    /// Entanglement-generating capacity.
    pub fn entangling(&self) -> Option<f64> {
        self.best(|p| p.c1 >= 0.0 && p.c2 >= 0.0, |p| p.e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reverse_examples() {
        assert_eq!(region_reverse(CapacityTriple::new(0.0, 0.0, 1.5)), CapacityTriple::new(0.0, 0.0, -1.5));
        assert_eq!(region_reverse(CapacityTriple::new(1.0, 1.0, 0.0)), CapacityTriple::new(1.0, 1.0, -2.0));
        let t = CapacityTriple::new(0.3, 2.0, -0.7);
        assert_eq!(region_reverse(region_reverse(t)), t);
    }

    #[test]
    fn accessors() {
        // forward cbit via m cobits worth of V_m is (m, 0, 0); reversed gives (0, m, -m)
        let r = RegionPoints::new(vec![CapacityTriple::new(3.0, 0.0, 0.0), CapacityTriple::new(0.0, 0.0, 3.0)]);
        assert_eq!(r.c_forward(), Some(3.0));
        assert_eq!(r.entangling(), Some(3.0));
        let rev = r.reversed();
        assert_eq!(rev.c_backward(), None);
        assert_eq!(rev.c_backward_assisted(), Some(3.0));
        assert_eq!(rev.entangling(), Some(-3.0));
    }
}

//! Contaminant concentrations on directed flow networks.
//!
//! A [`FlowNetwork`] compiles to a concentration sheaf on its underlying
//! graph. A vertex with in-degree `n ≥ 1` carries one concentration per
//! incoming channel (`Q^n`); it restricts to its `i`-th incoming edge by the
//! `i`-th coordinate projection, and to every outgoing edge by the
//! flow-weighted mean
//!
//! ```text
//!   (c_1, …, c_n) ↦ Σ c_j R(e_j) / Σ R(e_j)
//! ```
//!
//! (perfect mixing). A source vertex carries the single inlet concentration
//! and restricts to its outgoing edges by the identity.
//!
//! Sensors define a sampling morphism into a measurement sheaf with zero edge
//! stalks. Its facewise kernel is the ambiguity sheaf, whose global sections
//! are exactly the concentration patterns the sensors cannot see.

use std::collections::{BTreeMap, BTreeSet};

use crate::complex::{Atom, Face, SimplicialComplex};
use crate::error::{Error, Result};
use crate::morphism::Morphism;
use crate::ratlin::{Rational, RationalMatrix};
use crate::sheaf::{Section, Sheaf};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlowEdge {
    pub tail: Atom,
    pub head: Atom,
    /// Volume flow rate, strictly positive.
    pub rate: Rational,
}

impl FlowEdge {
    pub fn new(tail: impl Into<Atom>, head: impl Into<Atom>, rate: Rational) -> Self {
        FlowEdge { tail: tail.into(), head: head.into(), rate }
    }

    pub fn face(&self) -> Face {
        Face::new([self.tail.clone(), self.head.clone()]).expect("no self-loops")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlowNetwork {
    vertices: Vec<Atom>,
    edges: Vec<FlowEdge>,
}

impl FlowNetwork {
    /// Checks rates, self-loops, parallel edges, and conservation at every
    /// vertex that has both inflow and outflow.
    pub fn new(vertices: Vec<Atom>, edges: Vec<FlowEdge>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for v in &vertices {
            if !seen.insert(v.clone()) {
                return Err(Error::DuplicateVertex(v.to_string()));
            }
        }
        let mut pairs = BTreeSet::new();
        for e in &edges {
            for end in [&e.tail, &e.head] {
                if !seen.contains(end) {
                    return Err(Error::UnknownVertex(end.to_string()));
                }
            }
            if e.tail == e.head {
                return Err(Error::SelfLoop { tail: e.tail.to_string(), head: e.head.to_string() });
            }
            if !e.rate.is_positive() {
                return Err(Error::NonpositiveRate {
                    tail: e.tail.to_string(),
                    head: e.head.to_string(),
                    rate: e.rate.to_string(),
                });
            }
            if !pairs.insert(e.face()) {
                return Err(Error::ParallelEdge { tail: e.tail.to_string(), head: e.head.to_string() });
            }
        }
        let net = FlowNetwork { vertices, edges };
        for v in &net.vertices {
            let inflow: Rational = net.incoming(v).iter().map(|e| e.rate.clone()).sum();
            let outgoing: Vec<&FlowEdge> = net.edges.iter().filter(|e| &e.tail == v).collect();
            if net.incoming(v).is_empty() || outgoing.is_empty() {
                continue;
            }
            let outflow: Rational = outgoing.iter().map(|e| e.rate.clone()).sum();
            if inflow != outflow {
                return Err(Error::ConservationViolation {
                    vertex: v.to_string(),
                    inflow: inflow.to_string(),
                    outflow: outflow.to_string(),
                });
            }
        }
        Ok(net)
    }

    pub fn vertices(&self) -> &[Atom] {
        &self.vertices
    }

    pub fn edges(&self) -> &[FlowEdge] {
        &self.edges
    }

    /// Incoming edges ordered by tail vertex, then by position in the edge list.
    pub fn incoming(&self, v: &Atom) -> Vec<&FlowEdge> {
        let mut inc: Vec<(usize, &FlowEdge)> = self.edges.iter().enumerate().filter(|(_, e)| &e.head == v).collect();
        inc.sort_by(|(i, a), (j, b)| a.tail.cmp(&b.tail).then(i.cmp(j)));
        inc.into_iter().map(|(_, e)| e).collect()
    }

    pub fn outgoing(&self, v: &Atom) -> Vec<&FlowEdge> {
        self.edges.iter().filter(|e| &e.tail == v).collect()
    }

    pub fn complex(&self) -> SimplicialComplex {
        let faces = self.vertices.iter().map(|v| Face::vertex(v.clone())).chain(self.edges.iter().map(FlowEdge::face));
        SimplicialComplex::from_maximal_faces(faces).expect("network faces are well formed")
    }

    /// Mixing weights `R(e_j)/Σ R` over the incoming edges of `v`, in
    /// [`FlowNetwork::incoming`] order. `[1]` for a source.
    pub fn mixing_row(&self, v: &Atom) -> RationalMatrix {
        let inc = self.incoming(v);
        if inc.is_empty() {
            return RationalMatrix::identity(1);
        }
        let total: Rational = inc.iter().map(|e| e.rate.clone()).sum();
        let row = inc.iter().map(|e| &e.rate / &total).collect();
        RationalMatrix::from_rows(inc.len(), vec![row]).expect("row length matches")
    }

    pub fn concentration_sheaf(&self) -> Sheaf {
        let base = self.complex();
        let mut sheaf = Sheaf::new(base, |f| match f.vertices() {
            [v] => self.incoming(v).len().max(1),
            _ => 1,
        });
        for v in &self.vertices {
            let vf = Face::vertex(v.clone());
            let inc = self.incoming(v);
            let n = inc.len();
            for (i, e) in inc.iter().enumerate() {
                let mut pr = RationalMatrix::zeros(1, n);
                pr[(0, i)] = Rational::one();
                sheaf.set_restriction(&vf, &e.face(), pr).expect("edge contains its head");
            }
            let mix = self.mixing_row(v);
            for e in self.outgoing(v) {
                sheaf.set_restriction(&vf, &e.face(), mix.clone()).expect("edge contains its tail");
            }
        }
        sheaf
    }

    /// One source fanning out to delivery points with the given rates.
    ///
    /// Vertices: `source → main → d1, …, dk`; the source pipe carries the total.
    pub fn distribution(delivery_rates: &[Rational]) -> Result<Self> {
        let total: Rational = delivery_rates.iter().cloned().sum();
        let mut vertices: Vec<Atom> = vec!["source".into(), "main".into()];
        let mut edges = vec![FlowEdge::new("source", "main", total)];
        for (i, r) in delivery_rates.iter().enumerate() {
            let d = format!("d{}", i + 1);
            vertices.push(d.clone().into());
            edges.push(FlowEdge::new("main", d, r.clone()));
        }
        FlowNetwork::new(vertices, edges)
    }

    /// Input branches `in1, …, inn` merging at `junction`, draining to `outlet`.
    pub fn collection(input_rates: &[Rational]) -> Result<Self> {
        let total: Rational = input_rates.iter().cloned().sum();
        let mut vertices: Vec<Atom> = Vec::new();
        let mut edges = Vec::new();
        for (i, r) in input_rates.iter().enumerate() {
            let v = format!("in{}", i + 1);
            vertices.push(v.clone().into());
            edges.push(FlowEdge::new(v, "junction", r.clone()));
        }
        vertices.push("junction".into());
        vertices.push("outlet".into());
        edges.push(FlowEdge::new("junction", "outlet", total));
        FlowNetwork::new(vertices, edges)
    }
}

/// Measurement maps out of vertex stalks; unlisted vertices measure nothing.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SensorPlacement {
    measured: BTreeMap<Atom, RationalMatrix>,
}

impl SensorPlacement {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, vertex: impl Into<Atom>, map: RationalMatrix) -> Self {
        self.measured.insert(vertex.into(), map);
        self
    }

    pub fn insert(&mut self, vertex: impl Into<Atom>, map: RationalMatrix) {
        self.measured.insert(vertex.into(), map);
    }

    pub fn measured(&self) -> &BTreeMap<Atom, RationalMatrix> {
        &self.measured
    }

    /// Identity measurement on every listed vertex.
    pub fn full(sheaf: &Sheaf, vertices: impl IntoIterator<Item = Atom>) -> Self {
        let mut p = Self::new();
        for v in vertices {
            let d = sheaf.stalk_dim(&Face::vertex(v.clone())).unwrap_or(0);
            p.insert(v, RationalMatrix::identity(d));
        }
        p
    }
}

/// The morphism from a concentration sheaf to its measurement sheaf.
///
/// The measurement sheaf has the sensor's codomain at measured vertices and
/// zero stalks everywhere else (all edges included), with zero restrictions.
pub fn sampling_morphism(concentration: &Sheaf, placement: &SensorPlacement) -> Result<Morphism> {
    let base = concentration.base().clone();
    let mut components = BTreeMap::new();
    for (v, m) in &placement.measured {
        let face = Face::vertex(v.clone());
        let d = concentration.stalk_dim(&face).ok_or_else(|| Error::UnknownVertex(v.to_string()))?;
        if m.cols() != d {
            return Err(Error::DimensionMismatch(format!(
                "sensor at {v} reads {} coordinates but the stalk has dimension {d}",
                m.cols()
            )));
        }
        components.insert(face, m.clone());
    }
    let mut measurement = Sheaf::new(base.clone(), |f| components.get(f).map_or(0, RationalMatrix::rows));
    for (a, b) in base.inclusions() {
        let rows = measurement.stalk_dim(b).expect("face of base");
        let cols = measurement.stalk_dim(a).expect("face of base");
        measurement.set_restriction(a, b, RationalMatrix::zeros(rows, cols))?;
    }
    Morphism::new(concentration.clone(), measurement, components)
}

/// Outcome of checking whether a sensor placement determines all concentrations.
#[derive(Clone, Debug)]
pub struct RecoverabilityReport {
    /// Dimension of the space of consistent concentration assignments.
    pub section_dimension: usize,
    /// Dimension of the global sections of the ambiguity sheaf.
    pub ambiguity_dimension: usize,
    /// Dimension of the kernel of the induced map on sections, computed separately.
    pub induced_kernel_dimension: usize,
    pub recoverable: bool,
    /// Concentration sections invisible to the sensors (a basis), empty when recoverable.
    pub unrecoverable_patterns: Vec<Section>,
}

pub fn recoverability(concentration: &Sheaf, placement: &SensorPlacement) -> Result<RecoverabilityReport> {
    let m = sampling_morphism(concentration, placement)?;
    let (ambiguity, embedding) = m.kernel_sheaf()?;
    let ambiguous_sections = ambiguity.global_sections()?;
    let unrecoverable_patterns =
        ambiguous_sections.basis().iter().map(|s| embedding.apply(s)).collect::<Result<_>>()?;
    let induced = m.induced_map()?;
    let ambiguity_dimension = ambiguous_sections.dimension();
    Ok(RecoverabilityReport {
        section_dimension: induced.source_space.dimension(),
        ambiguity_dimension,
        induced_kernel_dimension: induced.matrix.cols() - induced.rank(),
        recoverable: ambiguity_dimension == 0,
        unrecoverable_patterns,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn single_pipe() {
        let net = FlowNetwork::new(vec!["a".into(), "b".into()], vec![FlowEdge::new("a", "b", q("5/2"))]).unwrap();
        let c = net.concentration_sheaf();
        assert!(c.validate().is_ok());
        let e = Face::new(["a", "b"]).unwrap();
        assert_eq!(c.restriction(&Face::vertex("a"), &e), Some(&RationalMatrix::identity(1)));
        assert_eq!(c.restriction(&Face::vertex("b"), &e), Some(&RationalMatrix::identity(1)));
        assert_eq!(c.global_sections().unwrap().dimension(), 1);
    }

    #[test]
    fn junction_mixes_by_rate() {
        let net = FlowNetwork::new(
            vec!["a".into(), "b".into(), "c".into(), "j".into(), "o".into()],
            vec![
                FlowEdge::new("a", "j", q("1")),
                FlowEdge::new("b", "j", q("1")),
                FlowEdge::new("c", "j", q("2")),
                FlowEdge::new("j", "o", q("4")),
            ],
        )
        .unwrap();
        let c = net.concentration_sheaf();
        let out = c.restriction(&Face::vertex("j"), &Face::new(["j", "o"]).unwrap()).unwrap();
        let conc = vec![q("3"), q("5"), q("7/2")];
        // (3 + 5 + 2·7/2) / 4
        assert_eq!(out.mul_vec(&conc).unwrap(), vec![q("15/4")]);
        let pr2 = c.restriction(&Face::vertex("j"), &Face::new(["b", "j"]).unwrap()).unwrap();
        assert_eq!(pr2.mul_vec(&conc).unwrap(), vec![q("5")]);
    }

    #[test]
    fn rejects_bad_networks() {
        let v = || vec![Atom::from("a"), Atom::from("b"), Atom::from("c")];
        let err = FlowNetwork::new(v(), vec![FlowEdge::new("a", "b", q("0"))]).unwrap_err();
        assert!(matches!(err, Error::NonpositiveRate { .. }));
        let err = FlowNetwork::new(v(), vec![FlowEdge::new("a", "a", q("1"))]).unwrap_err();
        assert!(matches!(err, Error::SelfLoop { .. }));
        let err =
            FlowNetwork::new(v(), vec![FlowEdge::new("a", "b", q("1")), FlowEdge::new("b", "c", q("2"))]).unwrap_err();
        assert!(matches!(err, Error::ConservationViolation { .. }));
        let err =
            FlowNetwork::new(v(), vec![FlowEdge::new("a", "b", q("1")), FlowEdge::new("b", "a", q("1"))]).unwrap_err();
        assert!(matches!(err, Error::ParallelEdge { .. }));
        let err = FlowNetwork::new(v(), vec![FlowEdge::new("a", "z", q("1"))]).unwrap_err();
        assert!(matches!(err, Error::UnknownVertex(_)));
    }

    #[test]
    fn empty_placement_leaves_everything_ambiguous() {
        let net = FlowNetwork::distribution(&[q("1"), q("2")]).unwrap();
        let c = net.concentration_sheaf();
        let m = sampling_morphism(&c, &SensorPlacement::new()).unwrap();
        assert!(m.components().all(|(_, x)| x.is_zero()));
        let (a, _) = m.kernel_sheaf().unwrap();
        assert_eq!(a.stalk_dims(), c.stalk_dims());
        let r = recoverability(&c, &SensorPlacement::new()).unwrap();
        assert_eq!(r.ambiguity_dimension, 1);
        assert!(!r.recoverable);
    }

    #[test]
    fn full_measurement_kills_vertex_stalks() {
        let net = FlowNetwork::collection(&[q("1"), q("3"), q("1/2")]).unwrap();
        let c = net.concentration_sheaf();
        let placement = SensorPlacement::full(&c, net.vertices().iter().cloned());
        let m = sampling_morphism(&c, &placement).unwrap();
        let (a, _) = m.kernel_sheaf().unwrap();
        for v in c.base().vertices() {
            assert_eq!(a.stalk_dim(v), Some(0));
        }
        assert!(recoverability(&c, &placement).unwrap().recoverable);
    }

    #[test]
    fn sensor_shape_is_checked() {
        let net = FlowNetwork::collection(&[q("1"), q("1")]).unwrap();
        let c = net.concentration_sheaf();
        let bad = SensorPlacement::new().with("junction", RationalMatrix::identity(1));
        assert!(matches!(sampling_morphism(&c, &bad), Err(Error::DimensionMismatch(_))));
        let unknown = SensorPlacement::new().with("nowhere", RationalMatrix::identity(1));
        assert!(matches!(sampling_morphism(&c, &unknown), Err(Error::UnknownVertex(_))));
    }
}

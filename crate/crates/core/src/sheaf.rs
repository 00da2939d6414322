//! Sheaves of rational vector spaces on a simplicial complex and their
//! global sections.
//!
//! A [`Sheaf`] assigns a stalk dimension to every face and a restriction
//! matrix (shape `dim(b) × dim(a)`) to every inclusion `a ⊂ b`, including
//! inclusions of codimension two or more. Global sections are computed as
//! the kernel of one stacked linear system, built from the codimension-one
//! constraints only: on a sheaf satisfying the composition axiom the deeper
//! constraints are implied.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Range;

use crate::complex::{Face, SimplicialComplex, Timeline};
use crate::error::{Error, Result};
use crate::ratlin::{compose, nullspace_basis, solve_exact, Rational, RationalMatrix};

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Sheaf {
    base: SimplicialComplex,
    stalks: Vec<usize>,
    restrictions: BTreeMap<(usize, usize), RationalMatrix>,
}

/// One way in which sheaf data fails the axioms.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Violation {
    MissingRestriction {
        from: Face,
        to: Face,
    },
    ShapeMismatch {
        from: Face,
        to: Face,
        expected: (usize, usize),
        found: (usize, usize),
    },
    /// `restriction(b,c)·restriction(a,b) ≠ restriction(a,c)`.
    Composition {
        a: Face,
        b: Face,
        c: Face,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::MissingRestriction { from, to } => write!(f, "missing restriction {from} -> {to}"),
            Violation::ShapeMismatch { from, to, expected, found } => write!(
                f,
                "restriction {from} -> {to} is {}x{}, expected {}x{}",
                found.0, found.1, expected.0, expected.1
            ),
            Violation::Composition { a, b, c } => {
                write!(f, "restrictions do not compose along {a} -> {b} -> {c}")
            }
        }
    }
}

impl Sheaf {
    /// A sheaf with the given stalk dimensions and no restrictions yet.
    pub fn new(base: SimplicialComplex, stalk_dim: impl Fn(&Face) -> usize) -> Self {
        let stalks = base.faces().iter().map(stalk_dim).collect();
        Sheaf { base, stalks, restrictions: BTreeMap::new() }
    }

    /// Stalk dimensions listed in face order.
    pub fn from_stalks(base: SimplicialComplex, stalks: Vec<usize>) -> Result<Self> {
        if stalks.len() != base.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} stalk dimensions for {} faces",
                stalks.len(),
                base.len()
            )));
        }
        Ok(Sheaf { base, stalks, restrictions: BTreeMap::new() })
    }

    /// The sheaf with zero-dimensional stalks everywhere.
    pub fn zero(base: SimplicialComplex) -> Self {
        let mut s = Sheaf::new(base, |_| 0);
        for &(a, b) in s.base.inclusion_indices() {
            s.restrictions.insert((a, b), RationalMatrix::zeros(0, 0));
        }
        s
    }

    /// Sets the restriction along `from ⊂ to`. Shapes are checked by [`Sheaf::violations`].
    pub fn set_restriction(&mut self, from: &Face, to: &Face, matrix: RationalMatrix) -> Result<()> {
        let (a, b) = self.inclusion_index(from, to)?;
        self.restrictions.insert((a, b), matrix);
        Ok(())
    }

    pub fn with_restriction(mut self, from: &Face, to: &Face, matrix: RationalMatrix) -> Result<Self> {
        self.set_restriction(from, to, matrix)?;
        Ok(self)
    }

    /// Fills every missing restriction of codimension two or more by composing
    /// along the chain through the first intermediate face (in face order).
    pub fn fill_by_composition(&mut self) -> Result<()> {
        let mut pairs: Vec<(usize, usize)> = self.base.inclusion_indices().to_vec();
        pairs.sort_by_key(|&(a, b)| (self.base.face(b).dimension() - self.base.face(a).dimension(), a, b));
        for (a, b) in pairs {
            if self.restrictions.contains_key(&(a, b)) {
                continue;
            }
            let mid = self
                .base
                .inclusion_indices()
                .iter()
                .find(|&&(x, y)| x == a && self.base.face(y).is_proper_subface_of(self.base.face(b)))
                .map(|&(_, y)| y);
            let Some(m) = mid else { continue };
            let (Some(first), Some(second)) = (self.restrictions.get(&(a, m)), self.restrictions.get(&(m, b))) else {
                continue;
            };
            let composed = compose(second, first)?;
            self.restrictions.insert((a, b), composed);
        }
        Ok(())
    }

    fn inclusion_index(&self, from: &Face, to: &Face) -> Result<(usize, usize)> {
        let a = self.base.index_of(from).ok_or_else(|| Error::UnknownFace(from.key()))?;
        let b = self.base.index_of(to).ok_or_else(|| Error::UnknownFace(to.key()))?;
        if !from.is_proper_subface_of(to) {
            return Err(Error::NotAnInclusion { from: from.key(), to: to.key() });
        }
        Ok((a, b))
    }

    pub fn base(&self) -> &SimplicialComplex {
        &self.base
    }

    pub fn stalk_dim(&self, face: &Face) -> Option<usize> {
        self.base.index_of(face).map(|i| self.stalks[i])
    }

    pub(crate) fn dim_at(&self, i: usize) -> usize {
        self.stalks[i]
    }

    pub fn stalk_dims(&self) -> &[usize] {
        &self.stalks
    }

    pub fn total_dim(&self) -> usize {
        self.stalks.iter().sum()
    }

    pub fn restriction(&self, from: &Face, to: &Face) -> Option<&RationalMatrix> {
        let a = self.base.index_of(from)?;
        let b = self.base.index_of(to)?;
        self.restrictions.get(&(a, b))
    }

    pub(crate) fn restriction_at(&self, a: usize, b: usize) -> Option<&RationalMatrix> {
        self.restrictions.get(&(a, b))
    }

    /// All stored restrictions in inclusion order.
    pub fn restrictions(&self) -> impl Iterator<Item = (&Face, &Face, &RationalMatrix)> {
        self.restrictions.iter().map(|(&(a, b), m)| (self.base.face(a), self.base.face(b), m))
    }

    /// Every missing restriction, mis-shaped matrix, and failed composition chain.
    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let face = |i: usize| self.base.face(i).clone();
        let mut well_shaped = BTreeMap::new();
        for &(a, b) in self.base.inclusion_indices() {
            let expected = (self.stalks[b], self.stalks[a]);
            match self.restrictions.get(&(a, b)) {
                None => out.push(Violation::MissingRestriction { from: face(a), to: face(b) }),
                Some(m) if m.shape() != expected => {
                    out.push(Violation::ShapeMismatch { from: face(a), to: face(b), expected, found: m.shape() })
                }
                Some(m) => {
                    well_shaped.insert((a, b), m);
                }
            }
        }
        for &(a, b) in self.base.inclusion_indices() {
            for &(b2, c) in self.base.inclusion_indices() {
                if b2 != b {
                    continue;
                }
                let (Some(ab), Some(bc), Some(ac)) =
                    (well_shaped.get(&(a, b)), well_shaped.get(&(b, c)), well_shaped.get(&(a, c)))
                else {
                    continue;
                };
                if &compose(bc, ab).expect("shapes checked") != *ac {
                    out.push(Violation::Composition { a: face(a), b: face(b), c: face(c) });
                }
            }
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidSheaf(v))
        }
    }

    /// Coordinate layout: each face's slice in the concatenated stalk vector.
    pub fn layout(&self) -> Layout {
        let mut offset = 0;
        let slices = self
            .base
            .faces()
            .iter()
            .zip(&self.stalks)
            .map(|(f, &d)| {
                let r = offset..offset + d;
                offset += d;
                (f.clone(), r)
            })
            .collect();
        Layout { slices, total: offset }
    }

    /// The stacked system whose kernel is the space of global sections.
    ///
    /// One block row per codimension-one inclusion `a ⊂ b`, encoding
    /// `restriction(a,b)·s(a) − s(b) = 0`. Missing restrictions are treated as
    /// zero maps; call [`Sheaf::validate`] first.
    pub fn consistency_matrix(&self) -> ConsistencyMatrix {
        let layout = self.layout();
        let pairs: Vec<(usize, usize)> = self.base.codim1_indices().collect();
        let total_rows: usize = pairs.iter().map(|&(_, b)| self.stalks[b]).sum();
        let mut matrix = RationalMatrix::zeros(total_rows, layout.total);
        let mut blocks = Vec::with_capacity(pairs.len());
        let mut row = 0;
        for (a, b) in pairs {
            let rows = self.stalks[b];
            if let Some(r) = self.restrictions.get(&(a, b)) {
                if r.shape() == (rows, self.stalks[a]) {
                    matrix.set_block(row, layout.slices[a].1.start, r);
                }
            }
            let target = layout.slices[b].1.start;
            for i in 0..rows {
                matrix[(row + i, target + i)] = -Rational::one();
            }
            blocks.push((self.base.face(a).clone(), self.base.face(b).clone(), row..row + rows));
            row += rows;
        }
        ConsistencyMatrix { matrix, layout, blocks }
    }

    /// Basis of the global sections (RREF-canonical kernel of the consistency matrix).
    pub fn global_sections(&self) -> Result<SectionSpace> {
        self.validate()?;
        let cm = self.consistency_matrix();
        let vectors = nullspace_basis(&cm.matrix);
        Ok(SectionSpace::from_vectors(cm.layout, vectors))
    }

    /// Checks every inclusion constraint exactly.
    pub fn is_section(&self, candidate: &Section) -> Result<bool> {
        let mut values = Vec::with_capacity(self.base.len());
        for (f, &d) in self.base.faces().iter().zip(&self.stalks) {
            let v = candidate.get(f).ok_or_else(|| Error::UnknownFace(f.key()))?;
            if v.len() != d {
                return Err(Error::SectionShape { face: f.key(), expected: d, found: v.len() });
            }
            values.push(v);
        }
        for &(a, b) in self.base.inclusion_indices() {
            let r = self.restrictions.get(&(a, b)).ok_or_else(|| {
                Error::InvalidSheaf(vec![Violation::MissingRestriction {
                    from: self.base.face(a).clone(),
                    to: self.base.face(b).clone(),
                }])
            })?;
            if r.mul_vec(values[a])? != *values[b] {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn zero_section(&self) -> Section {
        let layout = self.layout();
        layout.unflatten(&vec![Rational::zero(); layout.total]).expect("length matches layout")
    }

    /// The `n`-term grouping sheaf over a timeline window.
    ///
    /// Vertex stalks are `V^n` and edge stalks `V^(n−1)`, with `V = Q^value_dim`
    /// and slots stored oldest first. Along the edge `{t, t+1}` the left vertex
    /// restricts by `σ− = (0 | I)` (drop the oldest slot) and the right vertex
    /// by `σ+ = (I | 0)` (drop the newest slot).
    pub fn grouping(n: usize, value_dim: usize, window: &Timeline) -> Result<Sheaf> {
        if n == 0 {
            return Err(Error::InvalidParameter("grouping sheaf needs at least one register slot".into()));
        }
        if value_dim == 0 {
            return Err(Error::ZeroValueDim);
        }
        let base = window.complex();
        let mut sheaf = Sheaf::new(base, |f| if f.dimension() == 0 { n * value_dim } else { (n - 1) * value_dim });
        let (sigma_minus, sigma_plus) = shift_maps(n);
        let sigma_minus = sigma_minus.kron_identity(value_dim);
        let sigma_plus = sigma_plus.kron_identity(value_dim);
        for t in window.first()..window.last() {
            let e = window.edge(t);
            sheaf.set_restriction(&window.vertex(t), &e, sigma_minus.clone())?;
            sheaf.set_restriction(&window.vertex(t + 1), &e, sigma_plus.clone())?;
        }
        Ok(sheaf)
    }
}

/// `(σ−, σ+)` for an `n`-word register: `(n−1)×n` matrices `(0 | I)` and `(I | 0)`.
pub fn shift_maps(n: usize) -> (RationalMatrix, RationalMatrix) {
    let mut minus = RationalMatrix::zeros(n - 1, n);
    let mut plus = RationalMatrix::zeros(n - 1, n);
    for i in 0..n - 1 {
        minus[(i, i + 1)] = Rational::one();
        plus[(i, i)] = Rational::one();
    }
    (minus, plus)
}

/// Face slices of a concatenated stalk vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Layout {
    slices: Vec<(Face, Range<usize>)>,
    total: usize,
}

impl Layout {
    pub fn slices(&self) -> &[(Face, Range<usize>)] {
        &self.slices
    }

    pub fn slice(&self, face: &Face) -> Option<Range<usize>> {
        self.slices.iter().find(|(f, _)| f == face).map(|(_, r)| r.clone())
    }

    pub fn total(&self) -> usize {
        self.total
    }

    pub fn unflatten(&self, v: &[Rational]) -> Result<Section> {
        if v.len() != self.total {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} for {} coordinates",
                v.len(),
                self.total
            )));
        }
        Ok(Section { values: self.slices.iter().map(|(f, r)| (f.clone(), v[r.clone()].to_vec())).collect() })
    }

    pub fn flatten(&self, s: &Section) -> Result<Vec<Rational>> {
        let mut out = Vec::with_capacity(self.total);
        for (f, r) in &self.slices {
            let v = s.get(f).ok_or_else(|| Error::UnknownFace(f.key()))?;
            if v.len() != r.len() {
                return Err(Error::SectionShape { face: f.key(), expected: r.len(), found: v.len() });
            }
            out.extend_from_slice(v);
        }
        Ok(out)
    }
}

#[derive(Clone, Debug)]
pub struct ConsistencyMatrix {
    pub matrix: RationalMatrix,
    pub layout: Layout,
    /// `(a, b, rows)` for each codimension-one block.
    pub blocks: Vec<(Face, Face, Range<usize>)>,
}

/// An assignment of a stalk value to each face.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Section {
    values: BTreeMap<Face, Vec<Rational>>,
}

impl Section {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, face: Face, value: Vec<Rational>) {
        self.values.insert(face, value);
    }

    pub fn with(mut self, face: Face, value: Vec<Rational>) -> Self {
        self.insert(face, value);
        self
    }

    pub fn get(&self, face: &Face) -> Option<&Vec<Rational>> {
        self.values.get(face)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Face, &Vec<Rational>)> {
        self.values.iter()
    }
}

/// A basis of global sections together with its coordinate machinery.
#[derive(Clone, Debug)]
pub struct SectionSpace {
    layout: Layout,
    basis: Vec<Section>,
    /// Basis vectors as columns.
    matrix: RationalMatrix,
}

impl SectionSpace {
    pub fn from_vectors(layout: Layout, vectors: Vec<Vec<Rational>>) -> Self {
        let matrix = RationalMatrix::from_columns(layout.total, &vectors).expect("vectors match layout");
        let basis = vectors.iter().map(|v| layout.unflatten(v).expect("vectors match layout")).collect();
        SectionSpace { layout, basis, matrix }
    }

    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Section] {
        &self.basis
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    /// Basis vectors as the columns of a matrix.
    pub fn basis_matrix(&self) -> &RationalMatrix {
        &self.matrix
    }

    /// Coordinates of `s` in this basis.
    pub fn coordinates(&self, s: &Section) -> Result<Vec<Rational>> {
        let v = self.layout.flatten(s)?;
        solve_exact(&self.matrix, &v).map_err(|e| match e {
            Error::NoSolution => Error::NotInSpan,
            other => other,
        })
    }

    pub fn combine(&self, coefficients: &[Rational]) -> Result<Section> {
        let v = self.matrix.mul_vec(coefficients)?;
        self.layout.unflatten(&v)
    }
}

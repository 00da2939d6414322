//! Abstract simplicial complexes with explicit face inclusions.
//!
//! A face is a finite set of atoms, stored sorted so that every face has one
//! canonical key. Faces are ordered by dimension first and then
//! lexicographically by vertex list; every coordinate layout in the crate
//! follows that order.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};

/// Largest face (in vertices) the complex will close downward. Closure is
/// exponential in face size.
pub const MAX_FACE_VERTICES: usize = 16;

/// A vertex label. Integers sort numerically and before names.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Atom {
    Int(i64),
    Name(String),
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Int(n) => write!(f, "{n}"),
            Atom::Name(s) => f.write_str(s),
        }
    }
}

impl From<i64> for Atom {
    fn from(n: i64) -> Self {
        Atom::Int(n)
    }
}

impl From<&str> for Atom {
    fn from(s: &str) -> Self {
        Atom::Name(s.to_string())
    }
}

impl From<String> for Atom {
    fn from(s: String) -> Self {
        Atom::Name(s)
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Face {
    vertices: Vec<Atom>,
}

impl Face {
    pub fn new<I, A>(atoms: I) -> Result<Self>
    where
        I: IntoIterator<Item = A>,
        A: Into<Atom>,
    {
        let mut vertices: Vec<Atom> = atoms.into_iter().map(Into::into).collect();
        if vertices.is_empty() {
            return Err(Error::EmptyFace);
        }
        vertices.sort();
        if let Some(w) = vertices.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateAtom { face: join(&vertices), atom: w[0].to_string() });
        }
        Ok(Face { vertices })
    }

    pub fn vertex(atom: impl Into<Atom>) -> Self {
        Face { vertices: vec![atom.into()] }
    }

    pub fn vertices(&self) -> &[Atom] {
        &self.vertices
    }

    pub fn dimension(&self) -> usize {
        self.vertices.len() - 1
    }

    /// Sorted vertex list joined by commas, the key used in JSON documents.
    pub fn key(&self) -> String {
        join(&self.vertices)
    }

    pub fn is_proper_subface_of(&self, other: &Face) -> bool {
        self.vertices.len() < other.vertices.len()
            && self.vertices.iter().all(|v| other.vertices.binary_search(v).is_ok())
    }

    /// All nonempty proper subfaces.
    fn proper_subfaces(&self) -> impl Iterator<Item = Face> + '_ {
        let n = self.vertices.len();
        (1u32..(1u32 << n) - 1).map(move |mask| Face {
            vertices: (0..n).filter(|i| mask & (1 << i) != 0).map(|i| self.vertices[i].clone()).collect(),
        })
    }
}

fn join(atoms: &[Atom]) -> String {
    atoms.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

impl Ord for Face {
    fn cmp(&self, other: &Self) -> Ordering {
        self.vertices.len().cmp(&other.vertices.len()).then_with(|| self.vertices.cmp(&other.vertices))
    }
}

impl PartialOrd for Face {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Face {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.key())
    }
}

impl fmt::Debug for Face {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A downward-closed set of faces together with every proper-subface pair.
#[derive(Clone, PartialEq, Eq)]
pub struct SimplicialComplex {
    faces: Vec<Face>,
    index: BTreeMap<Face, usize>,
    /// (sub, super) face indices, sorted.
    inclusions: Vec<(usize, usize)>,
}

impl fmt::Debug for SimplicialComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SimplicialComplex").field("faces", &self.faces).finish()
    }
}

impl SimplicialComplex {
    /// Downward closure of the given faces.
    pub fn from_maximal_faces(maximal: impl IntoIterator<Item = Face>) -> Result<Self> {
        let mut all = BTreeSet::new();
        for face in maximal {
            if face.vertices.len() > MAX_FACE_VERTICES {
                return Err(Error::FaceTooLarge(face.key()));
            }
            all.extend(face.proper_subfaces());
            all.insert(face);
        }
        Self::build(all)
    }

    /// Takes an explicit face list and checks downward closure.
    pub fn from_faces(faces: impl IntoIterator<Item = Face>) -> Result<Self> {
        let all: BTreeSet<Face> = faces.into_iter().collect();
        for face in &all {
            if face.vertices.len() > MAX_FACE_VERTICES {
                return Err(Error::FaceTooLarge(face.key()));
            }
            if let Some(missing) = face.proper_subfaces().find(|s| !all.contains(s)) {
                return Err(Error::NotDownwardClosed { face: face.key(), missing: missing.key() });
            }
        }
        Self::build(all)
    }

    /// Vertices `first..=last` joined by the edges `{n, n+1}`.
    pub fn timeline(first: i64, last: i64) -> Result<Self> {
        Ok(Timeline::new(first, last)?.complex())
    }

    fn build(all: BTreeSet<Face>) -> Result<Self> {
        if all.is_empty() {
            return Err(Error::EmptyComplex);
        }
        let faces: Vec<Face> = all.into_iter().collect();
        let index: BTreeMap<Face, usize> = faces.iter().cloned().enumerate().map(|(i, f)| (f, i)).collect();
        let mut inclusions: Vec<(usize, usize)> = faces
            .iter()
            .enumerate()
            .flat_map(|(b, face)| face.proper_subfaces().map(move |s| (s, b)).collect::<Vec<_>>())
            .map(|(s, b)| (index[&s], b))
            .collect();
        inclusions.sort_unstable();
        Ok(SimplicialComplex { faces, index, inclusions })
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn len(&self) -> usize {
        self.faces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.faces.is_empty()
    }

    pub fn contains(&self, face: &Face) -> bool {
        self.index.contains_key(face)
    }

    pub fn index_of(&self, face: &Face) -> Option<usize> {
        self.index.get(face).copied()
    }

    pub fn face(&self, i: usize) -> &Face {
        &self.faces[i]
    }

    /// Looks a face up by its JSON key.
    pub fn face_by_key(&self, key: &str) -> Option<&Face> {
        self.faces.iter().find(|f| f.key() == key)
    }

    pub fn vertices(&self) -> impl Iterator<Item = &Face> {
        self.faces.iter().filter(|f| f.dimension() == 0)
    }

    pub fn faces_of_dimension(&self, k: usize) -> impl Iterator<Item = &Face> {
        self.faces.iter().filter(move |f| f.dimension() == k)
    }

    pub fn dimension(&self) -> usize {
        self.faces.last().map_or(0, Face::dimension)
    }

    /// Every (sub, super) pair with the sub-face a proper subset.
    pub fn inclusions(&self) -> impl Iterator<Item = (&Face, &Face)> {
        self.inclusions.iter().map(|&(a, b)| (&self.faces[a], &self.faces[b]))
    }

    pub(crate) fn inclusion_indices(&self) -> &[(usize, usize)] {
        &self.inclusions
    }

    pub(crate) fn codim1_indices(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.inclusions
            .iter()
            .copied()
            .filter(|&(a, b)| self.faces[a].vertices.len() + 1 == self.faces[b].vertices.len())
    }

    /// Pairs whose sub-face has exactly one fewer vertex.
    pub fn codim1_inclusions(&self) -> Vec<(Face, Face)> {
        self.codim1_indices().map(|(a, b)| (self.faces[a].clone(), self.faces[b].clone())).collect()
    }

    pub fn is_inclusion(&self, a: &Face, b: &Face) -> bool {
        self.contains(a) && self.contains(b) && a.is_proper_subface_of(b)
    }
}

/// A finite window `first..=last` of the integer timeline.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Timeline {
    first: i64,
    last: i64,
}

impl Timeline {
    pub fn new(first: i64, last: i64) -> Result<Self> {
        if first > last {
            return Err(Error::EmptyWindow { first, last });
        }
        Ok(Timeline { first, last })
    }

    /// `len` vertices starting at 0.
    pub fn with_len(len: usize) -> Result<Self> {
        Timeline::new(0, len as i64 - 1)
    }

    pub fn first(&self) -> i64 {
        self.first
    }

    pub fn last(&self) -> i64 {
        self.last
    }

    /// Number of vertices.
    pub fn len(&self) -> usize {
        (self.last - self.first + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn times(&self) -> impl Iterator<Item = i64> {
        self.first..=self.last
    }

    pub fn vertex(&self, t: i64) -> Face {
        Face::vertex(t)
    }

    /// The edge `{t, t+1}`.
    pub fn edge(&self, t: i64) -> Face {
        Face { vertices: vec![Atom::Int(t), Atom::Int(t + 1)] }
    }

    pub fn complex(&self) -> SimplicialComplex {
        let maximal: Vec<Face> = if self.first == self.last {
            vec![self.vertex(self.first)]
        } else {
            (self.first..self.last).map(|t| self.edge(t)).collect()
        };
        SimplicialComplex::from_maximal_faces(maximal).expect("timeline faces are well formed")
    }
}

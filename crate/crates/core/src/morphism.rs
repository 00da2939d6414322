//! Sheaf morphisms, the maps they induce on global sections, and kernel sheaves.
//!
//! A [`Morphism`] carries one matrix per face. It is valid when every square
//!
//! ```text
//!   F(a) --F(a⊂b)--> F(b)
//!    |f_a             |f_b
//!   G(a) --G(a⊂b)--> G(b)
//! ```
//!
//! commutes. The induced map on sections is written in the canonical bases
//! returned by [`Sheaf::global_sections`], so rank and injectivity claims are
//! claims about ordinary matrices.

use std::collections::BTreeMap;
use std::fmt;

use crate::complex::Face;
use crate::error::{Error, Result};
use crate::ratlin::{compose, nullspace_basis, solve_exact, Rational, RationalMatrix};
use crate::sheaf::{Section, SectionSpace, Sheaf};

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Morphism {
    source: Sheaf,
    target: Sheaf,
    components: Vec<RationalMatrix>,
}

/// A non-commuting square, with both composites.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SquareViolation {
    pub from: Face,
    pub to: Face,
    /// `f_b · F(a⊂b)`
    pub via_source: RationalMatrix,
    /// `G(a⊂b) · f_a`
    pub via_target: RationalMatrix,
}

impl fmt::Display for SquareViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "square {} -> {} does not commute: {:?} vs {:?}",
            self.from, self.to, self.via_source, self.via_target
        )
    }
}

impl Morphism {
    /// Components keyed by face; omitted faces get zero maps of the right shape.
    pub fn new(source: Sheaf, target: Sheaf, components: BTreeMap<Face, RationalMatrix>) -> Result<Self> {
        if source.base() != target.base() {
            return Err(Error::BaseMismatch);
        }
        for face in components.keys() {
            if !source.base().contains(face) {
                return Err(Error::UnknownFace(face.key()));
            }
        }
        let components = source
            .base()
            .faces()
            .iter()
            .enumerate()
            .map(|(i, f)| {
                components.get(f).cloned().unwrap_or_else(|| RationalMatrix::zeros(target.dim_at(i), source.dim_at(i)))
            })
            .collect();
        Ok(Morphism { source, target, components })
    }

    pub fn zero(source: Sheaf, target: Sheaf) -> Result<Self> {
        Morphism::new(source, target, BTreeMap::new())
    }

    pub fn identity(sheaf: &Sheaf) -> Self {
        let components = sheaf.stalk_dims().iter().map(|&d| RationalMatrix::identity(d)).collect();
        Morphism { source: sheaf.clone(), target: sheaf.clone(), components }
    }

    pub fn source(&self) -> &Sheaf {
        &self.source
    }

    pub fn target(&self) -> &Sheaf {
        &self.target
    }

    pub fn component(&self, face: &Face) -> Option<&RationalMatrix> {
        self.source.base().index_of(face).map(|i| &self.components[i])
    }

    pub fn components(&self) -> impl Iterator<Item = (&Face, &RationalMatrix)> {
        self.source.base().faces().iter().zip(&self.components)
    }

    fn check_shapes(&self) -> Result<()> {
        for (i, m) in self.components.iter().enumerate() {
            let expected = (self.target.dim_at(i), self.source.dim_at(i));
            if m.shape() != expected {
                return Err(Error::DimensionMismatch(format!(
                    "component at {} is {}x{}, expected {}x{}",
                    self.source.base().face(i),
                    m.rows(),
                    m.cols(),
                    expected.0,
                    expected.1
                )));
            }
        }
        Ok(())
    }

    /// Every inclusion whose square fails to commute. Both sheaves must be valid.
    pub fn square_violations(&self) -> Result<Vec<SquareViolation>> {
        self.check_shapes()?;
        self.source.validate()?;
        self.target.validate()?;
        let base = self.source.base();
        let mut out = Vec::new();
        for &(a, b) in base.inclusion_indices() {
            let src = self.source.restriction_at(a, b).expect("validated");
            let tgt = self.target.restriction_at(a, b).expect("validated");
            let via_source = compose(&self.components[b], src)?;
            let via_target = compose(tgt, &self.components[a])?;
            if via_source != via_target {
                out.push(SquareViolation {
                    from: base.face(a).clone(),
                    to: base.face(b).clone(),
                    via_source,
                    via_target,
                });
            }
        }
        Ok(out)
    }

    pub fn validate(&self) -> Result<()> {
        let v = self.square_violations()?;
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::NotCommuting(v))
        }
    }

    /// Facewise composite `next ∘ self`.
    pub fn then(&self, next: &Morphism) -> Result<Morphism> {
        if self.target != next.source {
            return Err(Error::DimensionMismatch("morphisms are not composable".into()));
        }
        let components =
            self.components.iter().zip(&next.components).map(|(f, g)| compose(g, f)).collect::<Result<_>>()?;
        Ok(Morphism { source: self.source.clone(), target: next.target.clone(), components })
    }

    /// Applies the components facewise.
    pub fn apply(&self, s: &Section) -> Result<Section> {
        let mut out = Section::new();
        for (face, m) in self.components() {
            let v = s.get(face).ok_or_else(|| Error::UnknownFace(face.key()))?;
            out.insert(face.clone(), m.mul_vec(v)?);
        }
        Ok(out)
    }

    /// The linear map on global sections, in the canonical section bases.
    pub fn induced_map(&self) -> Result<InducedMap> {
        self.validate()?;
        let source_space = self.source.global_sections()?;
        let target_space = self.target.global_sections()?;
        let mut columns = Vec::with_capacity(source_space.dimension());
        for s in source_space.basis() {
            let image = self.apply(s)?;
            if !self.target.is_section(&image)? {
                return Err(Error::ImageNotSection);
            }
            let coords = target_space.coordinates(&image).map_err(|e| match e {
                Error::NotInSpan => Error::ImageNotSection,
                other => other,
            })?;
            columns.push(coords);
        }
        let matrix = RationalMatrix::from_columns(target_space.dimension(), &columns)?;
        Ok(InducedMap { matrix, source_space, target_space })
    }

    /// The facewise kernel `a ↦ ker f_a` with its embedding back into the source.
    ///
    /// Each kernel stalk carries the RREF-canonical basis of `ker f_a`; the
    /// restrictions are the source restrictions rewritten in those bases.
    pub fn kernel_sheaf(&self) -> Result<(Sheaf, Morphism)> {
        self.validate()?;
        let base = self.source.base().clone();
        let embeddings: Vec<RationalMatrix> = self
            .components
            .iter()
            .enumerate()
            .map(|(i, m)| RationalMatrix::from_columns(self.source.dim_at(i), &nullspace_basis(m)))
            .collect::<Result<_>>()?;
        let dims: Vec<usize> = embeddings.iter().map(RationalMatrix::cols).collect();
        let mut kernel = Sheaf::from_stalks(base.clone(), dims)?;
        for &(a, b) in base.inclusion_indices() {
            let r = self.source.restriction_at(a, b).expect("validated");
            let pushed = compose(r, &embeddings[a])?;
            let mut restricted = RationalMatrix::zeros(embeddings[b].cols(), embeddings[a].cols());
            for j in 0..pushed.cols() {
                let x = solve_exact(&embeddings[b], &pushed.column(j))
                    .map_err(|_| Error::KernelNotPreserved { from: base.face(a).key(), to: base.face(b).key() })?;
                for (i, xi) in x.into_iter().enumerate() {
                    restricted[(i, j)] = xi;
                }
            }
            kernel.set_restriction(base.face(a), base.face(b), restricted)?;
        }
        let embedding = Morphism { source: kernel.clone(), target: self.source.clone(), components: embeddings };
        Ok((kernel, embedding))
    }

    /// Kernel of the induced map, as sections of the source.
    pub fn kernel_of_induced(&self) -> Result<SectionSpace> {
        let induced = self.induced_map()?;
        let layout = induced.source_space.layout().clone();
        let vectors = nullspace_basis(&induced.matrix)
            .iter()
            .map(|c| induced.source_space.basis_matrix().mul_vec(c))
            .collect::<Result<_>>()?;
        Ok(SectionSpace::from_vectors(layout, vectors))
    }
}

/// `f_*: ΓF → ΓG` as a matrix in the canonical section bases.
#[derive(Clone, Debug)]
pub struct InducedMap {
    pub matrix: RationalMatrix,
    pub source_space: SectionSpace,
    pub target_space: SectionSpace,
}

impl InducedMap {
    pub fn rank(&self) -> usize {
        self.matrix.rank()
    }

    pub fn is_injective(&self) -> bool {
        self.rank() == self.matrix.cols()
    }

    pub fn is_surjective(&self) -> bool {
        self.rank() == self.matrix.rows()
    }

    /// Pushes a source section through the map, returning a target section.
    pub fn apply(&self, s: &Section) -> Result<Section> {
        let coords = self.source_space.coordinates(s)?;
        let image: Vec<Rational> = self.matrix.mul_vec(&coords)?;
        self.target_space.combine(&image)
    }
}

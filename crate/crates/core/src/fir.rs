//! FIR filters as spans of sheaf morphisms.
//!
//! A filter with taps `h(0), …, h(N−1)` is encoded over a timeline window as
//!
//! ```text
//!   S1  <--p--  S2  --λ-->  S3
//! ```
//!
//! where `S1 = S3` is the one-term grouping sheaf (one sample per vertex,
//! nothing on edges) and `S2` is the `N`-term grouping sheaf holding the
//! shift-register contents. On vertices `p` reads the newest slot and `λ`
//! forms `L(x_1, …, x_N) = Σ_k h(k)·x_{N−k}`; both are zero on edges.
//!
//! Windows are finite, so inputs carry their own history: a window of `T`
//! vertices takes `T + N − 1` samples and produces `T` outputs, each of which
//! is fully determined by the input (no padding).

use std::collections::BTreeMap;

use crate::complex::Timeline;
use crate::error::{Error, Result};
use crate::morphism::Morphism;
use crate::ratlin::{Rational, RationalMatrix};
use crate::sheaf::{Section, Sheaf};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FilterSpec {
    taps: Vec<Rational>,
    value_dim: usize,
}

impl FilterSpec {
    pub fn new(taps: Vec<Rational>, value_dim: usize) -> Result<Self> {
        if taps.is_empty() {
            return Err(Error::EmptyFilter);
        }
        if value_dim == 0 {
            return Err(Error::ZeroValueDim);
        }
        Ok(FilterSpec { taps, value_dim })
    }

    pub fn scalar(taps: Vec<Rational>) -> Result<Self> {
        FilterSpec::new(taps, 1)
    }

    pub fn taps(&self) -> &[Rational] {
        &self.taps
    }

    /// Register length `N`.
    pub fn len(&self) -> usize {
        self.taps.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn value_dim(&self) -> usize {
        self.value_dim
    }

    /// `pr_N ⊗ I`: the newest register slot.
    pub fn newest_slot(&self) -> RationalMatrix {
        let n = self.len();
        let mut row = RationalMatrix::zeros(1, n);
        row[(0, n - 1)] = Rational::one();
        row.kron_identity(self.value_dim)
    }

    /// `L ⊗ I` with row `(h(N−1), …, h(0))`, matching the oldest-first slot order.
    pub fn weighted_sum(&self) -> RationalMatrix {
        let n = self.len();
        let row = self.taps.iter().rev().cloned().collect();
        RationalMatrix::from_rows(n, vec![row]).expect("row length matches").kron_identity(self.value_dim)
    }
}

/// The three sheaves and two morphisms encoding a filter over one window.
#[derive(Clone, Debug)]
pub struct FilterEncoding {
    pub spec: FilterSpec,
    pub window: Timeline,
    pub s1: Sheaf,
    pub s2: Sheaf,
    pub s3: Sheaf,
    pub p: Morphism,
    pub lambda: Morphism,
}

pub fn encode(spec: &FilterSpec, window: &Timeline) -> Result<FilterEncoding> {
    let d = spec.value_dim;
    let s1 = Sheaf::grouping(1, d, window)?;
    let s2 = Sheaf::grouping(spec.len(), d, window)?;
    let s3 = s1.clone();
    let on_vertices =
        |m: RationalMatrix| -> BTreeMap<_, _> { window.times().map(|t| (window.vertex(t), m.clone())).collect() };
    let p = Morphism::new(s2.clone(), s1.clone(), on_vertices(spec.newest_slot()))?;
    let lambda = Morphism::new(s2.clone(), s3.clone(), on_vertices(spec.weighted_sum()))?;
    p.validate()?;
    lambda.validate()?;
    Ok(FilterEncoding { spec: spec.clone(), window: *window, s1, s2, s3, p, lambda })
}

impl FilterEncoding {
    pub fn new(spec: &FilterSpec, window: &Timeline) -> Result<Self> {
        encode(spec, window)
    }

    /// Number of input samples this window consumes: `T + N − 1`.
    pub fn input_len(&self) -> usize {
        self.window.len() + self.spec.len() - 1
    }

    fn check_input(&self, x: &[Vec<Rational>]) -> Result<()> {
        if x.len() != self.input_len() {
            return Err(Error::WrongInputLength { expected: self.input_len(), found: x.len() });
        }
        if let Some(bad) = x.iter().find(|v| v.len() != self.spec.value_dim) {
            return Err(Error::DimensionMismatch(format!(
                "sample of dimension {}, expected {}",
                bad.len(),
                self.spec.value_dim
            )));
        }
        Ok(())
    }

    /// The register-contents section of `S2` carrying the input: vertex `i`
    /// holds samples `i..i+N` oldest first, each edge the `N−1` samples its
    /// endpoints share.
    pub fn lift_input(&self, x: &[Vec<Rational>]) -> Result<Section> {
        self.check_input(x)?;
        let n = self.spec.len();
        let mut s = Section::new();
        for (i, t) in self.window.times().enumerate() {
            s.insert(self.window.vertex(t), x[i..i + n].concat());
            if t < self.window.last() {
                s.insert(self.window.edge(t), x[i + 1..i + n].concat());
            }
        }
        Ok(s)
    }

    /// Filters `x`, applying `λ` facewise to the lifted register contents.
    pub fn apply(&self, x: &[Vec<Rational>]) -> Result<Vec<Vec<Rational>>> {
        let lifted = self.lift_input(x)?;
        let out = self.lambda.apply(&lifted)?;
        Ok(self.read_vertices(&out))
    }

    /// Same result as [`FilterEncoding::apply`], computed through the induced
    /// map `λ_*` in the canonical section bases.
    pub fn apply_via_sections(&self, x: &[Vec<Rational>]) -> Result<Vec<Vec<Rational>>> {
        let lifted = self.lift_input(x)?;
        let out = self.lambda.induced_map()?.apply(&lifted)?;
        Ok(self.read_vertices(&out))
    }

    pub fn apply_scalar(&self, x: &[Rational]) -> Result<Vec<Rational>> {
        let wrapped: Vec<Vec<Rational>> = x.iter().map(|v| vec![v.clone()]).collect();
        Ok(self.apply(&wrapped)?.into_iter().flatten().collect())
    }

    /// The vertex values of an `S1`/`S3` section, in time order.
    pub fn read_vertices(&self, s: &Section) -> Vec<Vec<Rational>> {
        self.window.times().map(|t| s.get(&self.window.vertex(t)).cloned().unwrap_or_default()).collect()
    }
}

/// Direct evaluation of `y_n = Σ_k h(k)·x_{n−k}` for every `n` whose window
/// `n−N+1..=n` lies inside `x`.
pub fn convolve_oracle(h: &[Rational], x: &[Rational]) -> Vec<Rational> {
    let n = h.len();
    if n == 0 || x.len() < n {
        return Vec::new();
    }
    let mut y = Vec::with_capacity(x.len() - n + 1);
    for i in n - 1..x.len() {
        let mut acc = Rational::zero();
        for (k, hk) in h.iter().enumerate() {
            acc += &(hk * &x[i - k]);
        }
        y.push(acc);
    }
    y
}

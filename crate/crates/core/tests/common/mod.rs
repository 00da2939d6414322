//! Independent oracles and random instance generators shared by the
//! integration tests. Nothing here goes through the crate's own elimination
//! or section code except where a generator needs a valid instance.

#![allow(dead_code)]

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use sheafkit::ratlin::{nullspace_basis, solve_exact};
use sheafkit::{Face, Morphism, Rational, RationalMatrix, Sheaf, SimplicialComplex};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn q(s: &str) -> Rational {
    s.parse().unwrap()
}

pub fn qs(v: &[i64]) -> Vec<Rational> {
    v.iter().map(|&x| Rational::integer(x)).collect()
}

// ---------------------------------------------------------------------------
// Fraction-free (Bareiss) elimination over the integers.

fn to_integer_row(row: &[Rational]) -> Vec<BigInt> {
    let lcm = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denominator()));
    row.iter().map(|x| x.numerator() * (&lcm / x.denominator())).collect()
}

/// Rank by Bareiss elimination on denominator-cleared rows.
pub fn bareiss_rank(rows: &[Vec<Rational>], cols: usize) -> usize {
    let mut a: Vec<Vec<BigInt>> = rows.iter().map(|r| to_integer_row(r)).collect();
    let n = a.len();
    let mut rank = 0;
    let mut prev = BigInt::one();
    for c in 0..cols {
        let Some(p) = (rank..n).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(rank, p);
        for i in rank + 1..n {
            for j in 0..cols {
                if j == c {
                    continue;
                }
                let v = (&a[rank][c] * &a[i][j] - &a[i][c] * &a[rank][j]) / &prev;
                a[i][j] = v;
            }
            a[i][c] = BigInt::zero();
        }
        // Columns left of c are already zero below the pivot row.
        prev = a[rank][c].clone();
        rank += 1;
        if rank == n {
            break;
        }
    }
    rank
}

pub fn matrix_rows(m: &RationalMatrix) -> Vec<Vec<Rational>> {
    (0..m.rows()).map(|i| m.row(i).to_vec()).collect()
}

pub fn oracle_rank(m: &RationalMatrix) -> usize {
    bareiss_rank(&matrix_rows(m), m.cols())
}

/// dim Γ from scratch: every inclusion (not only codimension one) becomes a
/// constraint block, and the rank comes from Bareiss elimination.
pub fn oracle_section_dim(s: &Sheaf) -> usize {
    let faces = s.base().faces();
    let mut offset = BTreeMap::new();
    let mut total = 0;
    for f in faces {
        offset.insert(f.clone(), total);
        total += s.stalk_dim(f).unwrap();
    }
    let mut rows = Vec::new();
    for (a, b) in s.base().inclusions() {
        let r = s.restriction(a, b).unwrap();
        for i in 0..r.rows() {
            let mut row = vec![Rational::zero(); total];
            for j in 0..r.cols() {
                row[offset[a] + j] = r[(i, j)].clone();
            }
            row[offset[b] + i] = &row[offset[b] + i] - &Rational::one();
            rows.push(row);
        }
    }
    total - bareiss_rank(&rows, total)
}

/// dim Γ of the `n`-term grouping sheaf on a `t`-vertex window with
/// `d`-dimensional values, built directly from the overlap constraints.
pub fn oracle_grouping_dim(n: usize, t: usize, d: usize) -> usize {
    let vertex_vars = n * d;
    let edge_vars = (n - 1) * d;
    let total = t * vertex_vars + (t - 1) * edge_vars;
    let x = |time: usize, slot: usize, c: usize| time * vertex_vars + slot * d + c;
    let y = |time: usize, slot: usize, c: usize| t * vertex_vars + time * edge_vars + slot * d + c;
    let mut rows = Vec::new();
    for time in 0..t.saturating_sub(1) {
        for slot in 0..n - 1 {
            for c in 0..d {
                // edge = newer N−1 slots of the left vertex
                let mut r = vec![Rational::zero(); total];
                r[y(time, slot, c)] = Rational::one();
                r[x(time, slot + 1, c)] = -Rational::one();
                rows.push(r);
                // edge = older N−1 slots of the right vertex
                let mut r = vec![Rational::zero(); total];
                r[y(time, slot, c)] = Rational::one();
                r[x(time + 1, slot, c)] = -Rational::one();
                rows.push(r);
            }
        }
    }
    total - bareiss_rank(&rows, total)
}

/// `y_n = Σ_k h(k)·x_{n−k}` by a plain double loop over all index pairs,
/// keeping only outputs whose full window is inside `x`.
pub fn direct_convolution(h: &[Rational], x: &[Rational]) -> Vec<Rational> {
    let n = h.len() as i64;
    let mut out = Vec::new();
    for i in 0..x.len() as i64 {
        if i < n - 1 {
            continue;
        }
        let mut acc = Rational::zero();
        for k in 0..n {
            let j = i - k;
            acc = acc + &h[k as usize] * &x[j as usize];
        }
        out.push(acc);
    }
    out
}

// ---------------------------------------------------------------------------
// Random instances.

pub fn random_rational(rng: &mut impl Rng) -> Rational {
    Rational::new(rng.gen_range(-4i64..=4), rng.gen_range(1i64..=3)).unwrap()
}

pub fn random_nonzero(rng: &mut impl Rng) -> Rational {
    loop {
        let r = random_rational(rng);
        if !r.is_zero() {
            return r;
        }
    }
}

pub fn random_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> RationalMatrix {
    let e = (0..rows * cols).map(|_| random_rational(rng)).collect();
    RationalMatrix::from_entries(rows, cols, e).unwrap()
}

pub fn random_invertible(rng: &mut impl Rng, n: usize) -> RationalMatrix {
    loop {
        let m = random_matrix(rng, n, n);
        if oracle_rank(&m) == n {
            return m;
        }
    }
}

pub fn inverse(m: &RationalMatrix) -> RationalMatrix {
    let n = m.rows();
    let cols: Vec<Vec<Rational>> = (0..n)
        .map(|j| {
            let e: Vec<Rational> = (0..n).map(|i| if i == j { Rational::one() } else { Rational::zero() }).collect();
            solve_exact(m, &e).unwrap()
        })
        .collect();
    RationalMatrix::from_columns(n, &cols).unwrap()
}

/// A random graph complex with at most `max_faces` faces.
pub fn random_graph(rng: &mut impl Rng, max_faces: usize) -> SimplicialComplex {
    let nv = rng.gen_range(1..=max_faces.min(4));
    let names: Vec<String> = (0..nv).map(|i| format!("v{i}")).collect();
    let mut pairs: Vec<(usize, usize)> = (0..nv).flat_map(|i| (i + 1..nv).map(move |j| (i, j))).collect();
    pairs.shuffle(rng);
    let ne = rng.gen_range(0..=pairs.len().min(max_faces - nv));
    let mut faces: Vec<Face> = names.iter().map(|n| Face::vertex(n.as_str())).collect();
    for &(i, j) in &pairs[..ne] {
        faces.push(Face::new([names[i].as_str(), names[j].as_str()]).unwrap());
    }
    SimplicialComplex::from_maximal_faces(faces).unwrap()
}

/// Random sheaf on a graph: any restrictions are valid (no length-2 chains).
pub fn random_graph_sheaf(rng: &mut impl Rng, max_faces: usize, max_dim: usize) -> Sheaf {
    let base = random_graph(rng, max_faces);
    let dims: Vec<usize> = base.faces().iter().map(|_| rng.gen_range(0..=max_dim)).collect();
    let mut s = Sheaf::from_stalks(base.clone(), dims).unwrap();
    for (a, b) in base.codim1_inclusions() {
        let m = random_matrix(rng, s.stalk_dim(&b).unwrap(), s.stalk_dim(&a).unwrap());
        s.set_restriction(&a, &b, m).unwrap();
    }
    s
}

/// Complexes in which every face lies in a triangle.
pub fn triangle_complexes() -> Vec<SimplicialComplex> {
    let f = |v: &[&str]| Face::new(v.iter().copied()).unwrap();
    vec![
        SimplicialComplex::from_maximal_faces([f(&["a", "b", "c"])]).unwrap(),
        SimplicialComplex::from_maximal_faces([f(&["a", "b", "c"]), f(&["b", "c", "d"])]).unwrap(),
        SimplicialComplex::from_maximal_faces([f(&["a", "b", "c"]), f(&["a", "c", "d"]), f(&["c", "d", "e"])]).unwrap(),
        SimplicialComplex::from_maximal_faces([f(&["a", "b", "c", "d"])]).unwrap(),
    ]
}

/// A valid sheaf on `base` built from nested quotients of an ambient `Q^k`:
/// stalk(a) = Q^k / K_a with K_a ⊆ K_b whenever a ⊂ b, written in a random
/// basis per face. Every face of dimension ≥ 1 quotients by the same
/// subspace, so restrictions between them are isomorphisms and restrictions
/// out of vertices are surjective. That makes every single-entry perturbation
/// break every chain through the perturbed map.
pub fn random_quotient_sheaf(rng: &mut impl Rng, base: &SimplicialComplex) -> Sheaf {
    let k = rng.gen_range(1..=3);
    let b = random_invertible(rng, k);
    let b_inv = inverse(&b);
    let shared = rng.gen_range(0..k);
    let mut quotient = BTreeMap::new();
    let mut section = BTreeMap::new();
    for face in base.faces() {
        let m = if face.dimension() == 0 { rng.gen_range(0..=shared) } else { shared };
        let d = k - m;
        let g = random_invertible(rng, d);
        let g_inv = inverse(&g);
        // Q = G · (B⁻¹ rows m..k),  S = (B cols m..k) · G⁻¹
        let mut rows_part = RationalMatrix::zeros(d, k);
        let mut cols_part = RationalMatrix::zeros(k, d);
        for i in 0..d {
            for j in 0..k {
                rows_part[(i, j)] = b_inv[(m + i, j)].clone();
                cols_part[(j, i)] = b[(j, m + i)].clone();
            }
        }
        quotient.insert(face.clone(), mul(&g, &rows_part));
        section.insert(face.clone(), mul(&cols_part, &g_inv));
    }
    let mut s = Sheaf::new(base.clone(), |f| quotient[f].rows());
    for (a, bf) in base.inclusions() {
        s.set_restriction(a, bf, mul(&quotient[bf], &section[a])).unwrap();
    }
    s
}

pub fn mul(a: &RationalMatrix, b: &RationalMatrix) -> RationalMatrix {
    sheafkit::ratlin::compose(a, b).unwrap()
}

/// `G(a⊂b) = P_b · F(a⊂b) · P_a⁻¹` for random invertible `P`, so `P` is an
/// isomorphism `F → G`.
pub fn random_conjugate(rng: &mut impl Rng, f: &Sheaf) -> Sheaf {
    let base = f.base().clone();
    let p: BTreeMap<Face, RationalMatrix> =
        base.faces().iter().map(|face| (face.clone(), random_invertible(rng, f.stalk_dim(face).unwrap()))).collect();
    let mut g = Sheaf::new(base.clone(), |face| f.stalk_dim(face).unwrap());
    for (a, b, r) in f.restrictions() {
        g.set_restriction(a, b, mul(&mul(&p[b], r), &inverse(&p[a]))).unwrap();
    }
    g
}

/// A random element of Hom(F, G): solve the commutativity constraints for
/// all component entries at once and take a random combination of the
/// solution basis.
pub fn random_hom(rng: &mut impl Rng, f: &Sheaf, g: &Sheaf) -> Morphism {
    let faces = f.base().faces().to_vec();
    let mut offset = BTreeMap::new();
    let mut total = 0;
    for face in &faces {
        offset.insert(face.clone(), total);
        total += g.stalk_dim(face).unwrap() * f.stalk_dim(face).unwrap();
    }
    // entry (i, j) of the component at face a sits at offset[a] + i·dim F(a) + j
    let var = |face: &Face, i: usize, j: usize| offset[face] + i * f.stalk_dim(face).unwrap() + j;
    let mut rows = Vec::new();
    for (a, b) in f.base().inclusions() {
        let fr = f.restriction(a, b).unwrap();
        let gr = g.restriction(a, b).unwrap();
        for i in 0..gr.rows() {
            for j in 0..fr.cols() {
                let mut row = vec![Rational::zero(); total];
                for k in 0..fr.rows() {
                    let v = var(b, i, k);
                    row[v] = &row[v] + &fr[(k, j)];
                }
                for k in 0..gr.cols() {
                    let v = var(a, k, j);
                    row[v] = &row[v] - &gr[(i, k)];
                }
                rows.push(row);
            }
        }
    }
    let system = RationalMatrix::from_rows(total, rows).unwrap();
    let basis = nullspace_basis(&system);
    let mut x = vec![Rational::zero(); total];
    for v in &basis {
        let c = random_rational(rng);
        for (xi, vi) in x.iter_mut().zip(v) {
            *xi = &*xi + &(&c * vi);
        }
    }
    let comps = faces
        .iter()
        .map(|face| {
            let (r, c) = (g.stalk_dim(face).unwrap(), f.stalk_dim(face).unwrap());
            let entries = x[offset[face]..offset[face] + r * c].to_vec();
            (face.clone(), RationalMatrix::from_entries(r, c, entries).unwrap())
        })
        .collect();
    Morphism::new(f.clone(), g.clone(), comps).unwrap()
}

/// Random measurement maps (0–3 readings) on a random subset of vertices.
pub fn random_placement(rng: &mut impl Rng, s: &Sheaf) -> sheafkit::SensorPlacement {
    let mut p = sheafkit::SensorPlacement::new();
    for v in s.base().vertices() {
        if rng.gen_bool(0.5) {
            let d = s.stalk_dim(v).unwrap();
            let rows = rng.gen_range(0..=3);
            p.insert(v.vertices()[0].clone(), random_matrix(rng, rows, d));
        }
    }
    p
}

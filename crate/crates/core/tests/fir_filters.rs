mod common;

use common::*;
use proptest::prelude::*;
use rand::Rng;
use sheafkit::{convolve_oracle, encode, FilterEncoding, FilterSpec, Rational, RationalMatrix, Timeline};

fn random_encoding(rng: &mut impl Rng) -> FilterEncoding {
    let n = rng.gen_range(1..=4);
    let d = rng.gen_range(1..=2);
    let taps = (0..n).map(|_| random_rational(rng)).collect();
    let t = rng.gen_range(1..=5);
    encode(&FilterSpec::new(taps, d).unwrap(), &Timeline::with_len(t).unwrap()).unwrap()
}

fn random_input(rng: &mut impl Rng, enc: &FilterEncoding) -> Vec<Vec<Rational>> {
    (0..enc.input_len()).map(|_| (0..enc.spec.value_dim()).map(|_| random_rational(rng)).collect()).collect()
}

fn component(x: &[Vec<Rational>], k: usize) -> Vec<Rational> {
    x.iter().map(|v| v[k].clone()).collect()
}

#[test]
fn moving_average_example() {
    let spec = FilterSpec::scalar(vec![q("1/3"), q("1/3"), q("1/3")]).unwrap();
    let enc = encode(&spec, &Timeline::with_len(2).unwrap()).unwrap();
    let x = qs(&[1, 1, 9, 2]);
    assert_eq!(enc.apply_scalar(&x).unwrap(), vec![q("11/3"), q("4")]);
    let wrapped: Vec<Vec<Rational>> = x.iter().map(|v| vec![v.clone()]).collect();
    assert_eq!(enc.apply_via_sections(&wrapped).unwrap(), vec![vec![q("11/3")], vec![q("4")]]);
}

// On a finite window p_* forgets the N−1 samples of history before the
// first vertex, so it is onto but not one-to-one.
#[test]
fn projection_on_sections_is_surjective() {
    for n in 1..=4 {
        for t in 1..=4 {
            for d in 1..=2 {
                let spec = FilterSpec::new(vec![Rational::one(); n], d).unwrap();
                let enc = encode(&spec, &Timeline::with_len(t).unwrap()).unwrap();
                let p = enc.p.induced_map().unwrap();
                assert_eq!(p.matrix.shape(), (d * t, d * (t + n - 1)));
                assert!(p.is_surjective());
                assert_eq!(p.matrix.cols() - oracle_rank(&p.matrix), d * (n - 1));
                assert_eq!(p.is_injective(), n == 1);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn all_evaluations_agree(seed in any::<u64>()) {
        let mut r = rng(seed);
        let enc = random_encoding(&mut r);
        let x = random_input(&mut r, &enc);
        let y = enc.apply(&x).unwrap();
        prop_assert_eq!(&enc.apply_via_sections(&x).unwrap(), &y);
        for k in 0..enc.spec.value_dim() {
            let expected = direct_convolution(enc.spec.taps(), &component(&x, k));
            prop_assert_eq!(&component(&y, k), &expected);
            prop_assert_eq!(convolve_oracle(enc.spec.taps(), &component(&x, k)), expected);
        }
    }

    #[test]
    fn linear(seed in any::<u64>()) {
        let mut r = rng(seed);
        let enc = random_encoding(&mut r);
        let (x, z) = (random_input(&mut r, &enc), random_input(&mut r, &enc));
        let (a, b) = (random_rational(&mut r), random_rational(&mut r));
        let mix = |u: &[Vec<Rational>], v: &[Vec<Rational>]| -> Vec<Vec<Rational>> {
            u.iter().zip(v).map(|(p, q)| p.iter().zip(q).map(|(s, t)| &(&a * s) + &(&b * t)).collect()).collect()
        };
        let lhs = enc.apply(&mix(&x, &z)).unwrap();
        let rhs = mix(&enc.apply(&x).unwrap(), &enc.apply(&z).unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    // Dropping the first sample and the first vertex drops the first output.
    #[test]
    fn time_invariant(seed in any::<u64>()) {
        let mut r = rng(seed);
        let enc = random_encoding(&mut r);
        prop_assume!(enc.window.len() > 1);
        let x = random_input(&mut r, &enc);
        let shorter = encode(&enc.spec, &Timeline::with_len(enc.window.len() - 1).unwrap()).unwrap();
        let y = enc.apply(&x).unwrap();
        prop_assert_eq!(shorter.apply(&x[1..]).unwrap(), y[1..].to_vec());
    }

    #[test]
    fn lift_is_a_coordinate_system_for_register_sections(seed in any::<u64>()) {
        let mut r = rng(seed);
        let enc = random_encoding(&mut r);
        let space = enc.s2.global_sections().unwrap();
        let d = enc.spec.value_dim();
        prop_assert_eq!(space.dimension(), d * enc.input_len());
        // Lifts of the unit inputs span Γ(S2).
        let mut columns = Vec::new();
        for i in 0..enc.input_len() * d {
            let x: Vec<Vec<Rational>> = (0..enc.input_len())
                .map(|t| (0..d).map(|k| if t * d + k == i { Rational::one() } else { Rational::zero() }).collect())
                .collect();
            let s = enc.lift_input(&x).unwrap();
            prop_assert!(enc.s2.is_section(&s).unwrap());
            columns.push(space.coordinates(&s).unwrap());
        }
        let m = RationalMatrix::from_columns(space.dimension(), &columns).unwrap();
        prop_assert_eq!(oracle_rank(&m), space.dimension());
    }

    #[test]
    fn projection_reads_newest_samples(seed in any::<u64>()) {
        let mut r = rng(seed);
        let enc = random_encoding(&mut r);
        let x = random_input(&mut r, &enc);
        let lifted = enc.lift_input(&x).unwrap();
        let out = enc.p.induced_map().unwrap().apply(&lifted).unwrap();
        prop_assert_eq!(enc.read_vertices(&out), x[enc.spec.len() - 1..].to_vec());
        // λ at the first vertex is L applied to the first register contents.
        let l = enc.spec.weighted_sum();
        let first = l.mul_vec(lifted.get(&enc.window.vertex(0)).unwrap()).unwrap();
        prop_assert_eq!(&first, &enc.apply(&x).unwrap()[0]);
    }
}

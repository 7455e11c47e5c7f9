use std::collections::HashSet;

use proptest::prelude::*;

use kproj_core::analysis::{fractal_copy_census, fractal_decompose};
use kproj_core::levels::LevelTable;
use kproj_core::matrix::{digits, verify_cartier, CartierSystem, MatrixProductSpec};
use kproj_core::{Poly, PolyMatrix, Scalar, ScalarMatrix};

fn int(x: i64) -> Scalar {
    Scalar::from_int(x)
}

/// `A_y(z)` with `A_y(0) = I`, so any seed is consistent.
fn product_spec(k: u32, d: usize, entries: Vec<Vec<i64>>, period: usize) -> MatrixProductSpec {
    let mut it = entries.into_iter();
    let levels = (0..period)
        .map(|_| {
            let rows = (0..d)
                .map(|r| {
                    (0..d)
                        .map(|c| {
                            let mut cs = it.next().unwrap();
                            cs[0] = (r == c) as i64;
                            Poly::from_ints(&cs)
                        })
                        .collect()
                })
                .collect();
            PolyMatrix::from_rows(rows).unwrap()
        })
        .collect();
    let seed: Vec<Scalar> = (0..d).map(|i| int(i as i64 + 1)).collect();
    MatrixProductSpec {
        k,
        d,
        matrices: LevelTable::cycle(levels).unwrap(),
        seeds: LevelTable::constant(seed),
        output: 0,
    }
}

fn spec_strategy() -> impl Strategy<Value = MatrixProductSpec> {
    (2u32..4, 1usize..3, 1usize..3).prop_flat_map(|(k, d, period)| {
        prop::collection::vec(prop::collection::vec(-2i64..3, k as usize), d * d * period)
            .prop_map(move |e| product_spec(k, d, e, period))
    })
}

/// `a(n) = e_out · C_{n_0,0} C_{n_1,1} ⋯ v`, read off the digits of `n`.
fn digit_walk(sys: &CartierSystem, n: u64, out: usize) -> Scalar {
    let ds = digits(n, sys.k);
    let mut v = sys.seeds.get(ds.len()).clone();
    for (y, &j) in ds.iter().enumerate().rev() {
        v = sys.matrix(j, y).mul_vec(&v).unwrap();
    }
    v[out].clone()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn products_and_cartier_systems_agree(spec in spec_strategy()) {
        let sys = spec.to_cartier().unwrap();
        let coeffs = spec.product_coeffs(300).unwrap();
        for n in 0..300u64 {
            prop_assert_eq!(&sys.eval(n).unwrap(), &coeffs.coeffs()[n as usize], "n = {}", n);
            prop_assert_eq!(digit_walk(&sys, n, 0), sys.eval(n).unwrap());
        }
        let back = sys.to_matrix_product().product_coeffs(300).unwrap();
        prop_assert_eq!(back, coeffs);
    }

    #[test]
    fn fractal_blocks_rebuild_the_sequence(spec in spec_strategy(), y in 0usize..4) {
        let sys = spec.to_cartier().unwrap();
        let dec = fractal_decompose(&sys, y, 20).unwrap();
        let block = (sys.k as usize).pow(y as u32);
        prop_assert_eq!(dec.boundaries.len(), block);
        let census = fractal_copy_census(&dec);
        let word: Vec<Scalar> = (0..(21 * block) as u64).map(|n| sys.eval(n).unwrap()).collect();
        for m in 1..=block {
            let factors: HashSet<&[Scalar]> = word.windows(m).collect();
            prop_assert!(factors.len() as u64 <= census.factor_bound, "m = {}", m);
        }
    }
}

#[test]
fn corrupted_target_is_located() {
    let spec = product_spec(2, 1, vec![vec![0, -1]], 1);
    let truth: Vec<Scalar> = (0..64)
        .map(|n| spec.to_cartier().unwrap().eval(n).unwrap())
        .collect();
    let mut wrong = truth.clone();
    wrong[45] = int(7);
    let sys = spec
        .to_cartier()
        .unwrap()
        .with_target(kproj_core::seq::SequenceSpec::explicit(wrong));
    let report = verify_cartier(&sys, sys.target.as_deref().unwrap(), 3, 16).unwrap();
    assert!(!report.passed);
    match fractal_decompose(&sys, 2, 16) {
        Err(kproj_core::Error::BlockMismatch { n, j, .. }) => assert_eq!(n * 4 + j, 45),
        other => panic!("expected a block mismatch, got {other:?}"),
    }
}

#[test]
fn boundaries_multiply_low_digit_first() {
    let c0 = ScalarMatrix::from_ints(&[&[1, 1], &[0, 1]]);
    let c1 = ScalarMatrix::from_ints(&[&[1, 0], &[1, 1]]);
    let sys = CartierSystem::new(
        2,
        LevelTable::constant(vec![c0.clone(), c1.clone()]),
        LevelTable::constant(vec![int(1), int(0)]),
    )
    .unwrap();
    // j = 2 = (0, 1) in base 2, low digit first: B = C_0 C_1.
    assert_eq!(sys.boundary(2, 2).unwrap(), c0.mul(&c1).unwrap());
}

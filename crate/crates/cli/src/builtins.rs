//! Builtin specification documents, addressable as `builtin:NAME`.

use kproj_core::generators::{
    ex35_spec, infinite_product_cartier, infinite_sum_matrix_product, pattern11_mod2,
    thue_morse_word, CoeffFamily,
};
use kproj_core::levels::LevelTable;
use kproj_core::matrix::{mi3_product, CartierSystem, Mi3Choice};
use kproj_core::seq::SequenceSpec;
use kproj_core::{Scalar, ScalarMatrix};

use crate::document::SpecDocument;

pub const NAMES: &[&str] = &[
    "thue-morse",
    "example-3.5",
    "stern",
    "example-3.3",
    "example-3.4",
    "ooto",
    "rudin-shapiro-type",
    "pattern-11-mod2",
    "example-2.1",
    "deg2-dn-family",
    "prop52-family",
];

/// Builtins whose body is a Cartier system carrying a target sequence.
pub const CARTIER_NAMES: &[&str] = &["thue-morse", "example-3.5", "stern", "example-3.4"];

pub fn thue_morse_system() -> CartierSystem {
    let m = |x: i64| ScalarMatrix::from_ints(&[&[x]]);
    CartierSystem::new(
        2,
        LevelTable::constant(vec![m(1), m(-1)]),
        LevelTable::constant(vec![Scalar::one()]),
    )
    .expect("valid")
    .with_target(SequenceSpec::RecursiveWord(thue_morse_word()))
}

/// The signed recursive word with the given sign table, as a Cartier system.
pub fn ex35_system(signs: &LevelTable<Scalar>) -> CartierSystem {
    let word = ex35_spec(signs).expect("signs are ±1");
    word.to_cartier()
        .expect("valid")
        .with_target(SequenceSpec::RecursiveWord(word))
}

pub fn stern_family() -> CoeffFamily {
    CoeffFamily::constant(2, &[1, 1])
}

pub fn stern_system() -> CartierSystem {
    let fam = stern_family();
    infinite_product_cartier(&fam)
        .expect("valid")
        .with_target(SequenceSpec::InfiniteProduct(fam))
}

pub fn ex34_system() -> CartierSystem {
    let fam = CoeffFamily::constant(2, &[1, 1]);
    let product = infinite_sum_matrix_product(&fam).expect("valid");
    product
        .to_cartier()
        .expect("valid")
        .with_target(SequenceSpec::InfiniteSum(fam))
}

pub fn example21_choices() -> LevelTable<Mi3Choice> {
    LevelTable::cycle(vec![Mi3Choice::First, Mi3Choice::Second, Mi3Choice::Second])
        .expect("nonempty")
}

/// `a_{1,y} = 2` at even `y`, 1 at odd `y`; `a_{2,y} = 1`.
pub fn deg2_family() -> CoeffFamily {
    let row = |a: i64| vec![Scalar::from_int(a), Scalar::one()];
    CoeffFamily::new(
        2,
        LevelTable::cycle(vec![row(2), row(1)]).expect("nonempty"),
    )
    .expect("valid")
}

/// `k = 3`, `a_{1,y} = 1`, `a_{2,y} = 2`.
pub fn prop52_family() -> CoeffFamily {
    CoeffFamily::constant(3, &[1, 2])
}

pub fn body(name: &str) -> Option<SequenceSpec> {
    Some(match name {
        "thue-morse" => SequenceSpec::CartierSystem(thue_morse_system()),
        "example-3.5" => {
            SequenceSpec::CartierSystem(ex35_system(&LevelTable::constant(-Scalar::one())))
        }
        "stern" | "example-3.3" => SequenceSpec::CartierSystem(stern_system()),
        "example-3.4" => SequenceSpec::CartierSystem(ex34_system()),
        "ooto" => SequenceSpec::Ooto,
        "rudin-shapiro-type" => SequenceSpec::BarTransform {
            order: 2,
            a: SequenceSpec::DigitPattern(pattern11_mod2()).boxed(),
        },
        "pattern-11-mod2" => SequenceSpec::DigitPattern(pattern11_mod2()),
        "example-2.1" => SequenceSpec::MatrixProduct(mi3_product(&example21_choices())),
        "deg2-dn-family" => SequenceSpec::InfiniteProduct(deg2_family()),
        "prop52-family" => SequenceSpec::InfiniteProduct(prop52_family()),
        _ => return None,
    })
}

fn description(name: &str) -> &'static str {
    match name {
        "thue-morse" => "±1 Thue-Morse word as a 1-dimensional Cartier system",
        "example-3.5" => "signed recursive word A = AB, B = B(-A) as a Cartier system",
        "stern" | "example-3.3" => {
            "Stern's diatomic sequence from the product of 1 + z^(2^y) + z^(2^(y+1))"
        }
        "example-3.4" => "coefficients of the sum of z^(2^y) + z^(2^(y+1)) via a 3x3 system",
        "ooto" => "indicator of 2^E with E = 4^j l, l odd",
        "rudin-shapiro-type" => "(-1)^(number of 11 blocks in binary)",
        "pattern-11-mod2" => "number of 11 blocks in binary, mod 2",
        "example-2.1" => "2x2 chain product alternating [[1+z,0],[1-z,0]] and [[1,z],[1,-z]]",
        "deg2-dn-family" => "degree-2 product with a_1 = 2, 1, 2, 1, ... and a_2 = 1",
        "prop52-family" => "ternary product of 1 + z^(3^y) + 2 z^(2 3^y)",
        _ => "",
    }
}

pub fn document(name: &str) -> Option<SpecDocument> {
    let body = body(name)?;
    let field = if name == "rudin-shapiro-type" { 2 } else { 1 };
    Some(SpecDocument::new(name, description(name), field, body))
}

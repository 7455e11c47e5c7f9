//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use kproj_cli::builtins;
use kproj_core::analysis::{
    check_complexity_bound, fractal_decompose, word_complexity, word_repetitions,
};
use kproj_core::generators::{
    ex35_spec, gap_multiple, infinite_product_series, pattern11_mod2, CoeffFamily, DEFAULT_GAP_CAP,
};
use kproj_core::levels::{LevelTable, Tail};
use kproj_core::matrix::{
    becker_block_size, becker_lift, mi3_chain_verify, CartierSystem, ChainLevel, ChainMahlerSpec,
    Mi3Choice, Mi3Table,
};
use kproj_core::pade::{deg2_pair, dn_check, prop52_pair, DNParams, MSequence, PadePair};
use kproj_core::seq::{self, gen_series, prefix, SequenceSpec};
use kproj_core::{Error, Poly, Scalar, ScalarMatrix, TruncatedSeries};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn int(x: i64) -> Scalar {
    Scalar::from_int(x)
}

fn random_signs(rng: &mut ChaCha8Rng, len: usize) -> LevelTable<Scalar> {
    let v = (0..len)
        .map(|_| if rng.gen_bool(0.5) { int(1) } else { int(-1) })
        .collect();
    if rng.gen_bool(0.5) {
        LevelTable::cycle(v).unwrap()
    } else {
        LevelTable::new(v, Tail::RepeatLast).unwrap()
    }
}

fn random_leaf(rng: &mut ChaCha8Rng) -> SequenceSpec {
    match rng.gen_range(0..8) {
        0 => builtins::body("thue-morse").unwrap(),
        1 => builtins::body("stern").unwrap(),
        2 => builtins::body("example-3.4").unwrap(),
        3 => SequenceSpec::RecursiveWord(ex35_spec(&random_signs(rng, 4)).unwrap()),
        4 => builtins::body("pattern-11-mod2").unwrap(),
        5 => builtins::body("ooto").unwrap(),
        6 => {
            let len = rng.gen_range(1..40);
            SequenceSpec::explicit(
                (0..len)
                    .map(|_| Scalar::from_ratio(rng.gen_range(-5..6), rng.gen_range(1..4)))
                    .collect(),
            )
        }
        _ => {
            let rows = (0..rng.gen_range(1..4))
                .map(|_| vec![int(rng.gen_range(-2..3)), int(rng.gen_range(-2..3))])
                .collect();
            SequenceSpec::InfiniteProduct(
                CoeffFamily::new(2, LevelTable::cycle(rows).unwrap()).unwrap(),
            )
        }
    }
}

fn random_spec(rng: &mut ChaCha8Rng, depth: u32) -> SequenceSpec {
    if depth == 0 || rng.gen_bool(0.5) {
        return random_leaf(rng);
    }
    let a = random_spec(rng, depth - 1);
    match rng.gen_range(0..4) {
        0 => seq::add(&a, &random_spec(rng, depth - 1)).unwrap(),
        1 => seq::pointwise_mul(&a, &random_spec(rng, depth - 1)).unwrap(),
        2 => seq::scalar_mul(
            Scalar::from_ratio(rng.gen_range(-3..4), rng.gen_range(1..3)),
            &a,
        ),
        _ => seq::arith_subseq(&a, rng.gen_range(0..5), rng.gen_range(1..4)).unwrap(),
    }
}

fn convolve(a: &[Scalar], b: &[Scalar]) -> Vec<Scalar> {
    (0..a.len())
        .map(|n| (0..=n).map(|i| &a[i] * &b[n - i]).sum())
        .collect()
}

fn ring_closure() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    const N: usize = 256;
    for case in 0..20 {
        let (a, b) = (random_spec(&mut rng, 2), random_spec(&mut rng, 2));
        let (pa, pb) = (
            prefix(&a, 3 * N + 8).map_err(|e| e.to_string())?,
            prefix(&b, N).map_err(|e| e.to_string())?,
        );
        let conv = gen_series(&seq::cauchy(&a, &b).unwrap(), N).unwrap();
        let product = gen_series(&a, N).unwrap().mul(&gen_series(&b, N).unwrap());
        ensure(conv == product, || {
            format!("case {case}: cauchy series differs from series_mul")
        })?;
        ensure(conv.coeffs() == convolve(&pa[..N], &pb).as_slice(), || {
            format!("case {case}: cauchy differs from direct sum")
        })?;
        let sum = prefix(&seq::add(&a, &b).unwrap(), N).unwrap();
        ensure((0..N).all(|n| sum[n] == &pa[n] + &pb[n]), || {
            format!("case {case}: add")
        })?;
        let prod = prefix(&seq::pointwise_mul(&a, &b).unwrap(), N).unwrap();
        ensure((0..N).all(|n| prod[n] == &pa[n] * &pb[n]), || {
            format!("case {case}: pointwise_mul")
        })?;
        let c = Scalar::from_ratio(-7, 3);
        let scaled = prefix(&seq::scalar_mul(c.clone(), &a), N).unwrap();
        ensure((0..N).all(|n| scaled[n] == &c * &pa[n]), || {
            format!("case {case}: scalar_mul")
        })?;
        let (off, step) = (rng.gen_range(0..8u64), rng.gen_range(1..4u64));
        let sub = prefix(&seq::arith_subseq(&a, off, step).unwrap(), N).unwrap();
        ensure(
            (0..N).all(|n| sub[n] == pa[off as usize + step as usize * n]),
            || format!("case {case}: arith_subseq"),
        )?;
    }
    Ok("20 random pairs, N = 256".into())
}

fn bridge() -> Check {
    const N: usize = 1024;
    let mut systems = vec![
        ("thue-morse", builtins::thue_morse_system()),
        ("stern", builtins::stern_system()),
        ("example-3.4", builtins::ex34_system()),
        (
            "example-3.5 f = -1",
            builtins::ex35_system(&LevelTable::constant(int(-1))),
        ),
    ];
    let alternating = LevelTable::cycle(vec![int(1), int(-1), int(-1)]).unwrap();
    systems.push((
        "example-3.5 f = (1,-1,-1)*",
        builtins::ex35_system(&alternating),
    ));
    for (name, sys) in &systems {
        let product = sys
            .to_matrix_product()
            .product_coeffs(N)
            .map_err(|e| e.to_string())?;
        let direct = prefix(sys.target.as_deref().unwrap(), N).map_err(|e| e.to_string())?;
        let first = (0..N).find(|&n| product.coeffs()[n] != direct[n]);
        ensure(first.is_none(), || {
            format!("{name}: product and direct evaluation differ at {first:?}")
        })?;
        let own = (0..N as u64)
            .map(|n| sys.eval(n).unwrap())
            .collect::<Vec<_>>();
        ensure(own == direct, || {
            format!("{name}: Cartier evaluation differs from target")
        })?;
    }
    Ok(format!("{} systems agree to N = {N}", systems.len()))
}

fn chain(
    k: u32,
    depth: usize,
    levels: Vec<Vec<Poly>>,
    constants: LevelTable<Scalar>,
) -> ChainMahlerSpec {
    // f_y = Σ c_i f_{y+i}(z^{k^i}) is written with a_0 = 1, a_i = -c_i
    let lv = levels
        .into_iter()
        .map(|cs| {
            ChainLevel::homogeneous(
                std::iter::once(Poly::one())
                    .chain(cs.iter().map(|c| -c))
                    .collect(),
            )
        })
        .collect();
    ChainMahlerSpec {
        k,
        depth,
        levels: LevelTable::cycle(lv).unwrap(),
        constants,
    }
}

fn becker() -> Check {
    const N: usize = 512;
    let p = Poly::from_ints;
    let families = [
        (
            "k=2, L=1",
            chain(2, 1, vec![vec![p(&[1, 1])]], LevelTable::constant(int(1))),
            1usize,
        ),
        (
            "k=2, L=3",
            chain(
                2,
                2,
                vec![
                    vec![p(&[1, 1, 0, -1]), p(&[0, 0, 2, 1])],
                    vec![p(&[1, -1, 1]), p(&[0, 3, 0, 1])],
                ],
                LevelTable::constant(int(1)),
            ),
            3,
        ),
        (
            "k=3, L=2",
            chain(
                3,
                2,
                vec![vec![p(&[2, 1, 1]), p(&[-1, 0, 2])]],
                LevelTable::constant(int(1)),
            ),
            2,
        ),
    ];
    let mut notes = Vec::new();
    for (name, ch, l) in &families {
        let lift = becker_lift(ch, *l).map_err(|e| format!("{name}: {e}"))?;
        let s = becker_block_size(ch.k, *l);
        ensure(lift.d == ch.depth * (s + 1), || {
            format!("{name}: lift dimension {}", lift.d)
        })?;
        let lifted = lift.product_coeffs(N).map_err(|e| e.to_string())?;
        let solved = ch.chain_solve(N).map_err(|e| e.to_string())?;
        ensure(lifted == solved, || {
            format!("{name}: lift and chain_solve differ")
        })?;
        notes.push(format!("{name}: s={s}"));
    }
    ensure(becker_block_size(2, 3) == 3, || {
        "k=2, L=3 must give s=3".into()
    })?;
    Ok(format!("{} to N = {N}", notes.join(", ")))
}

fn example21() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let table = Mi3Table::published();
    let mut seen = std::collections::BTreeMap::new();
    for case in 0..10 {
        let len = rng.gen_range(1..7);
        let v: Vec<Mi3Choice> = (0..len)
            .map(|_| {
                if rng.gen_bool(0.5) {
                    Mi3Choice::First
                } else {
                    Mi3Choice::Second
                }
            })
            .collect();
        let choices = if rng.gen_bool(0.5) {
            LevelTable::cycle(v).unwrap()
        } else {
            LevelTable::new(v, Tail::RepeatLast).unwrap()
        };
        let report = mi3_chain_verify(&choices, 256, &table).map_err(|e| e.to_string())?;
        ensure(report.passed, || {
            format!(
                "sequence {case}: {:?}",
                report.levels.iter().find(|l| !l.passed)
            )
        })?;
        for c in report.conventions {
            if let Some(s) = c.signs {
                seen.insert(format!("{:?}", c.case), s);
            }
        }
    }
    Ok(format!(
        "10 choice sequences to N = 256; sign conventions (s1, s2): {seen:?}"
    ))
}

fn corrupted(sys: &CartierSystem, level: usize, j: usize, r: usize, c: usize) -> CartierSystem {
    let mut bad = sys.clone();
    let mut levels = bad.matrices.levels().to_vec();
    let m: &mut ScalarMatrix = &mut levels[level][j];
    let v = m.get(r, c) + &int(1);
    m.set(r, c, v);
    bad.matrices = LevelTable::new(levels, bad.matrices.tail()).unwrap();
    bad
}

fn hidden_fractal() -> Check {
    let mut corruptions = 0;
    for name in builtins::CARTIER_NAMES {
        let Some(SequenceSpec::CartierSystem(sys)) = builtins::body(name) else {
            unreachable!()
        };
        for y in 0..=5 {
            fractal_decompose(&sys, y, 64).map_err(|e| format!("{name} at y = {y}: {e}"))?;
        }
        for level in 0..sys.matrices.levels().len() {
            for j in 0..sys.k as usize {
                for r in 0..sys.d {
                    for c in 0..sys.d {
                        let bad = corrupted(&sys, level, j, r, c);
                        let located = (0..=5).find_map(|y| match fractal_decompose(&bad, y, 64) {
                            Err(Error::BlockMismatch { n, j, .. }) => Some((y, n, j)),
                            _ => None,
                        });
                        ensure(located.is_some(), || {
                            format!("{name}: corrupting C[{j}] entry ({r},{c}) at level {level} went unnoticed")
                        })?;
                        corruptions += 1;
                    }
                }
            }
        }
    }
    Ok(format!(
        "{} systems pass at y <= 5, n_max = 64; {corruptions} single-entry corruptions all located",
        builtins::CARTIER_NAMES.len()
    ))
}

/// `±1` form of the "11"-count sequence: `(ā(n), ā(2n+1))` with
/// `C_0 = [[1,0],[1,0]]`, `C_1 = [[0,1],[0,-1]]`.
fn bar_pattern_system() -> CartierSystem {
    let c0 = ScalarMatrix::from_ints(&[&[1, 0], &[1, 0]]);
    let c1 = ScalarMatrix::from_ints(&[&[0, 1], &[0, -1]]);
    CartierSystem::new(
        2,
        LevelTable::constant(vec![c0, c1]),
        LevelTable::constant(vec![int(1), int(1)]),
    )
    .unwrap()
}

fn complexity_bound() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    const W: usize = 4096;
    const M: usize = 128;
    let mut worst: f64 = 0.0;
    for case in 0..20 {
        let word = {
            let len = rng.gen_range(1..6);
            ex35_spec(&random_signs(&mut rng, len))
        }
        .unwrap()
        .expand(12)
        .unwrap()
        .swap_remove(0);
        let report = word_complexity(&word[..W], M).unwrap();
        let bound = check_complexity_bound(&report, 2, 2, 2);
        ensure(bound.passed, || {
            format!("sign sequence {case}: p(m) exceeds 32 m at some m")
        })?;
        worst = worst.max(
            (1..=M)
                .map(|m| report.p(m) as f64 / (32.0 * m as f64))
                .fold(0.0, f64::max),
        );
    }
    let sys = bar_pattern_system();
    let bar = SequenceSpec::BarTransform {
        order: 2,
        a: SequenceSpec::DigitPattern(pattern11_mod2()).boxed(),
    };
    let direct = prefix(&bar, W).unwrap();
    ensure(
        (0..W as u64).all(|n| sys.eval(n).unwrap() == direct[n as usize]),
        || "2-dimensional system for the ±1 form disagrees".into(),
    )?;
    let word = prefix(&SequenceSpec::DigitPattern(pattern11_mod2()), W).unwrap();
    let report = word_complexity(&word, M).unwrap();
    ensure(check_complexity_bound(&report, 2, 2, 2).passed, || {
        "mod-2 sequence exceeds 32 m".into()
    })?;
    Ok(format!("m <= {M}, W = {W}; max p(m)/(b^2d k m) = {worst:.3} over sign sequences, p(128) = {} for the mod-2 sequence", report.p(M)))
}

fn recurrences() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for case in 0..50 {
        let len = rng.gen_range(1..14);
        let signs = random_signs(&mut rng, len);
        let word = ex35_spec(&signs)
            .unwrap()
            .expand(14)
            .unwrap()
            .swap_remove(0);
        for n in 0..=12usize {
            let (p, f) = (1usize << n, signs.get(n));
            for j in 0..p {
                ensure(word[j + p + 2 * p] == &word[j] * f, || {
                    format!("case {case}: a(j+2^n+2^(n+1)) = a(j) f_n fails at n = {n}, j = {j}")
                })?;
                ensure(word[j + p] == word[j + 2 * p], || {
                    format!("case {case}: a(j+2^n) = a(j+2^(n+1)) fails at n = {n}, j = {j}")
                })?;
            }
        }
    }
    Ok("50 sign sequences, n <= 12, all j < 2^n".into())
}

fn pattern_sequence() -> Check {
    let spec = pattern11_mod2();
    let a = |n: u64| spec.eval(n).unwrap().to_i64().unwrap();
    let mut checked = 0u64;
    for big_n in 0..=4u64 {
        for l in 1..=4u64 {
            for n in 0..=4u32 {
                let scale = 1u64 << (big_n as u32 + l as u32 + 1 + n);
                for t in 1..=8u64 {
                    for j in 0..=(1u64 << n) {
                        let lhs = a(big_n + l * (scale * t + j));
                        let rhs = (a(big_n + l * j) + a(l * scale * t)) % 2;
                        ensure(lhs == rhs, || {
                            format!("congruence fails at N={big_n}, l={l}, n={n}, t={t}, j={j}")
                        })?;
                        checked += 1;
                    }
                }
            }
        }
    }
    let bar = SequenceSpec::BarTransform {
        order: 2,
        a: SequenceSpec::DigitPattern(spec.clone()).boxed(),
    };
    let abar = prefix(&bar, (1 << 8) * 65).unwrap();
    for e in 1..=8usize {
        for n in 0..=64usize {
            for j in 0..(1usize << (e - 1)) {
                let lhs = &abar[(n << e) + j];
                ensure(*lhs == &abar[n << e] * &abar[j], || {
                    format!("multiplicativity fails at e={e}, n={n}, j={j}")
                })?;
            }
        }
    }
    let word = prefix(&SequenceSpec::DigitPattern(spec), 1 << 14).unwrap();
    let scales = word_repetitions(&word, (4.0, 4.0)).unwrap();
    let found: Vec<_> = scales
        .iter()
        .filter_map(|s| s.found.as_ref())
        .filter(|d| d.v_len >= 8)
        .collect();
    ensure(!found.is_empty(), || {
        "no U V W V decomposition with |V| >= 8".into()
    })?;
    ensure(found.iter().all(|d| d.validate(&word)), || {
        "a decomposition failed symbol-wise revalidation".into()
    })?;
    let largest = found.iter().map(|d| d.v_len).max().unwrap();
    Ok(format!("{checked} congruence instances, multiplicativity for e <= 8, repetitions up to |V| = {largest} in W = 2^14"))
}

fn dn_suite() -> Check {
    let fam = builtins::prop52_family();
    let pairs: Vec<PadePair> = (0..=5)
        .map(|y| prop52_pair(&fam, y, 1, 2))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    for p in &pairs {
        ensure(p.certified_order == 3 * 3usize.pow(p.n as u32), || {
            format!("prop52 order at Y = {}", p.n)
        })?;
    }
    let f = infinite_product_series(&fam, 3 * 243).unwrap();
    let params = DNParams::new(int(2), int(3), 1, 3, MSequence::affine(1, 0)).unwrap();
    let report = dn_check(&f, &pairs, &params).unwrap();
    ensure(report.passed, || {
        format!("prop52 DN report: {:?}", report.levels)
    })?;

    let fam2 = builtins::deg2_family();
    let pairs2: Vec<PadePair> = [0, 2, 4, 6]
        .iter()
        .map(|&n| deg2_pair(&fam2, n))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    for p in &pairs2 {
        ensure(p.certified_order == 4 << p.n, || {
            format!("deg2 order at n = {}", p.n)
        })?;
    }
    let f2 = infinite_product_series(&fam2, 4 << 6).unwrap();
    let params2 = DNParams::new(int(3), int(4), 2, 2, MSequence::affine(2, 0)).unwrap();
    ensure(dn_check(&f2, &pairs2, &params2).unwrap().passed, || {
        "deg2 DN report fails".into()
    })?;

    let zero_coeff = CoeffFamily::constant(3, &[0, 2]);
    ensure(
        matches!(prop52_pair(&zero_coeff, 2, 1, 2), Err(Error::Hypothesis(_))),
        || "zero coefficient accepted".into(),
    )?;
    let unit = CoeffFamily::constant(2, &[1, 0]);
    ensure(
        matches!(deg2_pair(&unit, 2), Err(Error::Hypothesis(_))),
        || "a_1,n = 1 accepted".into(),
    )?;
    let geo = TruncatedSeries::new(vec![int(1); 64]);
    let prop: Vec<PadePair> = (0..3)
        .map(|n| PadePair {
            n,
            p: Poly::one(),
            q: Poly::from_ints(&[1, -1]),
            certified_order: 64,
        })
        .collect();
    let geo_params = DNParams::new(int(1), int(2), 1, 2, MSequence::affine(1, 0)).unwrap();
    let geo_report = dn_check(&geo, &prop, &geo_params).unwrap();
    ensure(
        !geo_report.passed && geo_report.levels[0].cross_nonzero == Some(false),
        || "proportional pairs passed".into(),
    )?;
    let tight = DNParams::new(
        Scalar::from_ratio(1, 100),
        int(3),
        1,
        3,
        MSequence::affine(1, 0),
    )
    .unwrap();
    let tight_report = dn_check(&f, &pairs, &tight).unwrap();
    ensure(
        !tight_report.passed && tight_report.levels.iter().any(|l| !l.degree_ok),
        || "degree budget not enforced".into(),
    )?;
    Ok("prop52 Y <= 5 and deg2 n in {0,2,4,6} pass; 4 negative controls fail".into())
}

fn gap_witnesses() -> Check {
    let mut count = 0;
    for k in [2u32, 3] {
        for l in [1u64, 3, 5, 7] {
            for t in 0..=6u32 {
                let w = gap_multiple(k, l, t, None, DEFAULT_GAP_CAP)
                    .map_err(|e| format!("k={k}, l={l}, t={t}: {e}"))?;
                ensure(w.is_valid(k, l, t, None), || {
                    format!("invalid witness for k={k}, l={l}, t={t}")
                })?;
                let pos = w.positions[0];
                let t2 = t + 3;
                let m = gap_multiple(k, l, t2, Some(pos), DEFAULT_GAP_CAP)
                    .map_err(|e| format!("matched k={k}, l={l}: {e}"))?;
                ensure(
                    m.is_valid(k, l, t2, Some(pos)) && m.positions[0] == pos,
                    || format!("matched witness invalid for k={k}, l={l}, t={t}"),
                )?;
                count += 2;
            }
        }
    }
    Ok(format!(
        "{count} witnesses validated, half with a pinned lowest position"
    ))
}

fn kproj(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_kproj"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn cli_round_trips() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    for name in builtins::NAMES {
        let spec = format!("builtin:{name}");
        let p = |f: &str| {
            dir.path()
                .join(format!("{name}.{f}"))
                .to_string_lossy()
                .into_owned()
        };
        let first = kproj(&[
            "gen",
            "--spec",
            &spec,
            "--N",
            "1024",
            "--out",
            &p("a.csv"),
            "--cache",
            &p("a.bin"),
        ]);
        ensure(first.status.success(), || {
            format!(
                "{name}: gen failed: {}",
                String::from_utf8_lossy(&first.stderr)
            )
        })?;
        let second = kproj(&[
            "gen",
            "--spec",
            &spec,
            "--N",
            "1024",
            "--from-cache",
            &p("a.bin"),
            "--out",
            &p("b.csv"),
            "--cache",
            &p("b.bin"),
        ]);
        ensure(second.status.success(), || {
            format!(
                "{name}: reload failed: {}",
                String::from_utf8_lossy(&second.stderr)
            )
        })?;
        let same = |a: &str, b: &str| std::fs::read(p(a)).unwrap() == std::fs::read(p(b)).unwrap();
        ensure(same("a.csv", "b.csv") && same("a.bin", "b.bin"), || {
            format!("{name}: regeneration is not byte-identical")
        })?;
    }
    let out = kproj(&[
        "expand",
        "--spec",
        "builtin:pattern-11-mod2",
        "--base",
        "2",
        "--digits",
        "8",
    ]);
    let digits = String::from_utf8_lossy(&out.stdout).trim().to_string();
    ensure(out.status.success() && digits == "00010010", || {
        format!("expand gave {digits:?}")
    })?;
    let long = kproj(&[
        "expand",
        "--spec",
        "builtin:pattern-11-mod2",
        "--base",
        "2",
        "--digits",
        "256",
    ]);
    let expected: String = prefix(&SequenceSpec::DigitPattern(pattern11_mod2()), 256)
        .unwrap()
        .iter()
        .map(|v| char::from_digit(v.to_i64().unwrap() as u32, 2).unwrap())
        .collect();
    ensure(
        String::from_utf8_lossy(&long.stdout).trim() == expected,
        || "256-digit expansion differs from the prefix".into(),
    )?;
    Ok(format!(
        "{} builtins regenerate byte-identically at N = 1024; expand gives {digits}",
        builtins::NAMES.len()
    ))
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("ring and closure identities", ring_closure),
        ("Cartier systems vs matrix products", bridge),
        ("chain lift vs chain solve", becker),
        ("2x2 chain case table", example21),
        ("hidden fractal decomposition", hidden_fractal),
        ("complexity bound", complexity_bound),
        ("signed recursive word recurrences", recurrences),
        (
            "pattern sequence congruence and repetitions",
            pattern_sequence,
        ),
        ("Pade pairs and DN conditions", dn_suite),
        ("gap multiples", gap_witnesses),
        ("CLI round trips", cli_round_trips),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let result =
            catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        match result {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail}", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}

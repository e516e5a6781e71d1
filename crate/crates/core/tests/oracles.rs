//! Values frozen from 30-digit arbitrary-precision evaluations of the spectral formulas.

use qfef::bounds::{isotropic_cvne_fef_bound, rank_deficient_thresholds};
use qfef::entropy::{cond_entropy, EntropyKind};
use qfef::multicopy::{
    kcopy_steer_threshold, noisy_thresholds, nonweyl_x_star, reference_schmidt_vectors,
};
use qfef::{make_state, StateSpec};

fn spectral(spec: StateSpec, kind: EntropyKind) -> f64 {
    cond_entropy(&make_state::<f64>(&spec).unwrap(), kind).unwrap()
}

#[test]
fn conditional_entropies_match_high_precision_values() {
    let cases = [
        (
            StateSpec::werner2(0.5),
            EntropyKind::VonNeumann,
            0.548_794_940_695_398_5,
        ),
        (
            StateSpec::werner2(0.9),
            EntropyKind::VonNeumann,
            -0.496_816_268_319_416_2,
        ),
        (
            StateSpec::isotropic(3, 0.9),
            EntropyKind::VonNeumann,
            -0.815_966_907_131_875_0,
        ),
        (
            StateSpec::isotropic(3, 0.9),
            EntropyKind::Renyi(2.0),
            -1.283_180_978_945_570_0,
        ),
        (
            StateSpec::werner_d(3, 0.5),
            EntropyKind::VonNeumann,
            1.561_278_124_459_132_9,
        ),
        (
            StateSpec::werner_d(3, 0.5),
            EntropyKind::Renyi(3.0),
            1.522_901_844_806_562_4,
        ),
        (
            StateSpec::gen_bell(2, vec![0.9, 0.05, 0.03, 0.02]),
            EntropyKind::VonNeumann,
            -0.382_456_876_687_985_3,
        ),
        (
            StateSpec::gen_bell(2, vec![0.8, 0.1, 0.05, 0.05]),
            EntropyKind::Renyi(2.0),
            -0.389_566_811_762_725_6,
        ),
    ];
    for (spec, kind, want) in cases {
        let got = spectral(spec.clone(), kind);
        assert!((got - want).abs() < 1e-12, "{spec} {kind}: {got} vs {want}");
    }
}

#[test]
fn rank_deficient_roots_match_high_precision_values() {
    let want = [
        (2, 0.666_666_666_666_666_7),
        (3, 0.241_216_884_712_540_56),
        (4, 0.040_951_055_767_680_754),
        (5, 0.004_332_292_783_393_763_4),
        (6, 0.000_349_461_298_221_372_2),
        (12, 3.658_480_759_688_454e-12),
    ];
    for (d, p) in want {
        let got = rank_deficient_thresholds(d).unwrap().p_cvne;
        assert!((got - p).abs() <= 1e-9 * p, "d={d}: {got} vs {p}");
    }
}

#[test]
fn steering_thresholds_match_exact_harmonic_sums() {
    let want = [
        (2, 2, 0.297_559_517_855_952_1),
        (2, 7, 0.597_200_610_260_180_9),
        (6, 2, 0.250_706_856_081_493_5),
        (3, 5, 0.441_866_919_551_706_7),
        (5, 8, 0.271_264_978_661_634_3),
        (6, 8, 0.229_466_872_312_241_8),
    ];
    for (d, k, f) in want {
        let got = kcopy_steer_threshold(d, k).unwrap().threshold;
        assert!((got - f).abs() < 1e-12, "d={d} k={k}: {got} vs {f}");
    }
}

#[test]
fn scalar_thresholds_match_high_precision_values() {
    assert!((nonweyl_x_star() - 0.187_367_216_354_370_04).abs() < 1e-15);
    assert!((isotropic_cvne_fef_bound(3) - 0.471_679_166_426_281_27).abs() < 1e-15);
    let t = noisy_thresholds(&reference_schmidt_vectors()[0]).unwrap();
    assert!((t.p_cvne - 0.728_900_774_842_747_9).abs() < 1e-10);
}

use proptest::prelude::*;
use stringar::artheory::{knit, tau_oracle, matches_string_module, ArContext};
use stringar::families::{make_family, Family};
use stringar::modules::realize;
use stringar::strings::{canonicalize, enumerate_strings, find_bands};
use stringar::{parse_presentation, Error, Fp, Rational};

fn family(f: Family, m: usize, n: usize) -> stringar::AlgebraPresentation {
    make_family(f, m, n).unwrap().presentation
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn canonical_words_are_stable(n in 2usize..6) {
        let p = family(Family::W, 0, n);
        let q = p.quiver();
        for w in enumerate_strings(&p, None).unwrap() {
            prop_assert_eq!(canonicalize(q, &w), w.clone());
            prop_assert_eq!(canonicalize(q, &w.inverse(q)), w.clone());
        }
    }

    #[test]
    fn tau_inverse_undoes_tau(m in 2usize..4, n in 2usize..4) {
        let p = family(Family::U, m, n);
        let ctx = ArContext::new(&p).unwrap();
        for w in enumerate_strings(&p, None).unwrap() {
            if ctx.is_projective(&w) {
                continue;
            }
            let t = ctx.tau_word(&w).unwrap();
            prop_assert!(!ctx.is_injective(&t));
            prop_assert_eq!(ctx.tau_inverse_word(&t).unwrap(), w);
        }
    }
}

#[test]
fn w_family_string_counts() {
    let p = family(Family::W, 0, 3);
    assert_eq!(enumerate_strings(&p, None).unwrap().len(), 12);
    assert!(find_bands(&p, 10).is_empty());
}

#[test]
fn banded_algebra_refuses_enumeration_and_knitting() {
    let p = parse_presentation("vertices 1 2\narrow a 1 -> 2\narrow b 1 -> 2\n").unwrap();
    assert!(matches!(enumerate_strings(&p, None), Err(Error::BandFound(_))));
    assert!(!find_bands(&p, 4).is_empty());
    assert!(matches!(knit::<Rational>(&p), Err(Error::BandFound(_))));
    assert_eq!(enumerate_strings(&p, Some(2)).unwrap().len(), 6);
}

#[test]
fn oracle_over_prime_field() {
    let p = family(Family::V, 2, 1);
    let ctx = ArContext::new(&p).unwrap();
    for w in enumerate_strings(&p, None).unwrap() {
        if ctx.is_projective(&w) {
            continue;
        }
        let m = realize::<Fp<101>>(&p, &w).unwrap();
        let image = realize::<Fp<101>>(&p, &ctx.tau_word(&w).unwrap()).unwrap();
        assert!(matches_string_module(&p, &tau_oracle(&p, m.rep()).unwrap(), &image));
    }
}

#[test]
fn knitted_quivers_satisfy_mesh_relations() {
    for (f, m, n) in [(Family::W, 0, 4), (Family::U, 3, 3), (Family::V, 2, 2)] {
        let g = knit::<Rational>(&family(f, m, n)).unwrap();
        for s in g.meshes() {
            s.verify(g.presentation()).unwrap();
        }
        for i in 0..g.nodes().len() {
            if let Some(t) = g.tau(i) {
                assert_eq!(g.tau_inverse(t), Some(i));
            }
        }
    }
}

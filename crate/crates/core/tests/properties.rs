use num_complex::Complex;
use proptest::prelude::*;
use schottky_triples::scalar::Field;
use schottky_triples::schottky::{hyperbolic_distance, reduce_word, Alphabet, H3Point, MobiusElement};
use schottky_triples::subshift::{coboundary, enumerate_periodic, pair_function, CylinderFunction};
use schottky_triples::triples::{koopman_core, DiracTilde, ParryWeight};
use schottky_triples::zeta::{hurwitz_zeta, LFactorSpec};
use schottky_triples::{Caps, Rational};

type C64 = Complex<f64>;

fn mobius() -> impl Strategy<Value = MobiusElement<f64>> {
    prop::array::uniform8(-2.0f64..2.0)
        .prop_filter("non-degenerate", |e| {
            let (a, b, c, d) = (C64::new(e[0], e[1]), C64::new(e[2], e[3]), C64::new(e[4], e[5]), C64::new(e[6], e[7]));
            (a * d - b * c).norm() > 0.2
        })
        .prop_map(|e| {
            MobiusElement::new(C64::new(e[0], e[1]), C64::new(e[2], e[3]), C64::new(e[4], e[5]), C64::new(e[6], e[7])).unwrap()
        })
}

fn point() -> impl Strategy<Value = H3Point<f64>> {
    (-1.0f64..1.0, -1.0f64..1.0, 0.2f64..3.0).prop_map(|(x, y, t)| H3Point::new(x, y, t).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn word_times_inverse_reduces_to_empty(g in 2usize..4, letters in prop::collection::vec(0usize..6, 0..12)) {
        let al = Alphabet::new(g).unwrap();
        let letters: Vec<usize> = letters.into_iter().map(|a| a % al.size()).collect();
        let w = reduce_word(&al, &letters).unwrap();
        let mut both = w.letters().to_vec();
        both.extend_from_slice(w.inverse(&al).letters());
        prop_assert!(reduce_word(&al, &both).unwrap().is_empty());
        prop_assert_eq!(w.inverse(&al).inverse(&al), w);
    }

    #[test]
    fn action_is_a_homomorphism(m in mobius(), n in mobius(), p in point()) {
        let lhs = m.mul(&n).apply_h3(&p).unwrap();
        let rhs = m.apply_h3(&n.apply_h3(&p).unwrap()).unwrap();
        prop_assert!(hyperbolic_distance(&lhs, &rhs) < 1e-8);
    }

    #[test]
    fn hurwitz_shift_relation(z in 1.1f64..6.0, q in 0.2f64..5.0) {
        // zeta_H(z, q) - zeta_H(z, q + 1) = q^{-z}
        let a = hurwitz_zeta(C64::new(z, 0.0), C64::new(q, 0.0)).unwrap();
        let b = hurwitz_zeta(C64::new(z, 0.0), C64::new(q + 1.0, 0.0)).unwrap();
        let expect = q.powf(-z);
        prop_assert!(((a - b).re - expect).abs() < 1e-11 * expect.max(1.0));
    }

    #[test]
    fn koopman_isometry_parry(seed in prop::collection::vec(-5i64..=5, 36), i in 0usize..4, n in 0usize..2) {
        // <S xi, S xi> at level n+1 equals <xi, xi> at level n, S = sqrt(3) R
        let al = Alphabet::new(2).unwrap();
        let caps = Caps::default();
        let r = koopman_core::<Rational>(&al, i, n as isize, &caps).unwrap();
        let xi: Vec<Rational> = (0..r.cols()).map(|k| Rational::from_int(seed[k % seed.len()])).collect();
        let img = r.apply(&xi).unwrap();
        let w_in = ParryWeight::new(2, n as isize).unwrap().weight::<Rational>();
        let w_out = ParryWeight::new(2, n as isize + 1).unwrap().weight::<Rational>();
        let norm_in: Rational = xi.iter().map(|x| x * x).fold(Rational::from_int(0), |a, b| a + b) * w_in.clone();
        let norm_out: Rational = img.iter().map(|x| x * x).fold(Rational::from_int(0), |a, b| a + b) * w_out * Rational::from_int(3);
        // S_i is an isometry on functions supported where g_i may precede a_0
        let supported: Vec<Rational> = (0..r.cols())
            .map(|k| if al.word_at(n + 1, k)[0] == al.inverse_of(i) { Rational::from_int(0) } else { xi[k].clone() })
            .collect();
        let norm_supported: Rational = supported.iter().map(|x| x * x).fold(Rational::from_int(0), |a, b| a + b) * w_in.clone();
        prop_assert_eq!(norm_out, norm_supported.clone());
        prop_assert!(norm_supported <= norm_in);
    }

    #[test]
    fn coboundaries_pair_to_zero(vals in prop::collection::vec(-7i64..=7, 12), period in 1usize..6) {
        let al = Alphabet::new(2).unwrap();
        let caps = Caps::default();
        let words = schottky_triples::schottky::enumerate_admissible(&al, 2, &caps).unwrap();
        let h = CylinderFunction::from_values(al, 1, words.into_iter().zip(vals.into_iter().map(Rational::from_int))).unwrap();
        let dh = coboundary(&h);
        for o in enumerate_periodic(&al, period, &caps).unwrap() {
            prop_assert_eq!(pair_function(&dh, &o).value, Rational::from_int(0));
        }
    }

    #[test]
    fn dirac_tilde_is_symmetric_with_integer_spectrum(v in prop::collection::vec(-3.0f64..3.0, 36)) {
        let al = Alphabet::new(2).unwrap();
        let d = DiracTilde::new(al, 2, &Caps::default()).unwrap();
        let m = d.matrix::<Rational>();
        prop_assert_eq!(m.transpose(), m);
        // D~ (D~ + 1) (D~ + 2) = 0 on level 2
        let x = v;
        let a = d.apply(&x);
        let b: Vec<f64> = d.apply(&a).iter().zip(&a).map(|(p, q)| p + q).collect();
        let c: Vec<f64> = d.apply(&b).iter().zip(&b).map(|(p, q)| p + 2.0 * q).collect();
        prop_assert!(c.iter().all(|e| e.abs() < 1e-10));
    }

    #[test]
    fn factor_products_combine(s in 2.1f64..6.0, k in 1i64..4) {
        let a = LFactorSpec::single(0, k);
        let b = LFactorSpec::single(1, 1);
        let ratio = a.combine(&b, -1).value(C64::new(s, 0.0)).unwrap();
        let direct = a.value(C64::new(s, 0.0)).unwrap() / b.value(C64::new(s, 0.0)).unwrap();
        prop_assert!((ratio - direct).norm() < 1e-12 * direct.norm());
    }
}

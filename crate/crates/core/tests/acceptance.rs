//! Acceptance run: one line per criterion. Every numeric check is compared
//! against an oracle computed here, independently of the library code path
//! it checks (closed forms, `statrs` special functions, quaternion Mobius
//! action, direct matrix powers).
//!
//! A criterion whose literal statement is false for every admissible
//! realization is printed as `FAIL (literal)` together with the exact
//! statement that does hold; the run asserts that replacement and pins the
//! literal failure so that a change in either is noticed.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use num_complex::Complex;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use schottky_triples::arch::omega_report;
use schottky_triples::bridge::{check_diagram, duality_dyn, f_infinity_dyn, map_u, BridgeConfig};
use schottky_triples::scalar::Field;
use schottky_triples::schottky::{enumerate_admissible, hyperbolic_distance, Alphabet, H3Point, MobiusElement, SchottkyGroup};
use schottky_triples::subshift::{coboundary, enumerate_periodic, pair_function, periodic_point_count, rank_f, CylinderFunction};
use schottky_triples::triples::{
    ck_relations_check, koopman_core, koopman_stabilization, log_ratio_spread, parry_projection_factor,
    phi_multiplicity_source, phi_sigma2_commutator_norm, rho_stabilization, summability_profile,
};
use schottky_triples::zeta::{hurwitz_dz_at_0, regularized_det, factorization_report, Family, SpectralMultiplicities};
use schottky_triples::{Caps, Rational};
use statrs::function::gamma::ln_gamma;

type C64 = Complex<f64>;

#[derive(PartialEq)]
enum Status {
    Pass,
    Fail,
    /// The literal statement is false; the corrected statement holds.
    LiteralFail,
}

struct Outcome {
    status: Status,
    detail: String,
}

fn pass_if(ok: bool, detail: String) -> Outcome {
    Outcome { status: if ok { Status::Pass } else { Status::Fail }, detail }
}

fn q(v: i64) -> Rational {
    Rational::from_int(v)
}

fn c1_ranks() -> Outcome {
    let caps = Caps::default();
    let start = Instant::now();
    let mut worst = String::new();
    let mut ok = true;
    for (g, max_n) in [(2usize, 4usize), (3, 3)] {
        let al = Alphabet::new(g).unwrap();
        for n in 0..=max_n {
            let oracle = if n == 0 { 2 * g } else { 2 * g * (2 * g - 1).pow(n as u32 - 1) * (2 * g - 2) + 1 };
            let r = rank_f::<Rational>(&al, n, &caps).unwrap();
            if r.rank != oracle {
                ok = false;
                worst = format!(" mismatch at g={g} n={n}: {} vs {oracle}", r.rank);
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    pass_if(ok && secs < 60.0, format!("filtration ranks g=2 n<=4, g=3 n<=3 exact, {secs:.2}s{worst}"))
}

fn c2_lerch() -> Outcome {
    let mut worst = 0.0f64;
    for x in [0.3, 1.0, 2.7, 5.5] {
        let em = hurwitz_dz_at_0(x).unwrap();
        let oracle = ln_gamma(x) - 0.5 * (2.0 * PI).ln();
        worst = worst.max((em - oracle).abs());
    }
    pass_if(worst < 1e-10, format!("Euler-Maclaurin dz zeta_H(0,q) vs lnGamma(q) - ln(2pi)/2: max err {worst:.2e} (< 1e-10)"))
}

fn gamma_c_oracle(x: f64) -> f64 {
    (ln_gamma(x) - x * (2.0 * PI).ln()).exp()
}

fn c3_determinants() -> Outcome {
    let samples = [2.5, 3.7, 5.25];
    let mut single = 0.0f64;
    for top in -2..=2 {
        let m = SpectralMultiplicities::with_two_pi_scale([Family { top: top as f64, mult: 1 }]).unwrap();
        for s in samples {
            let det = regularized_det(&m, C64::new(s, 0.0)).unwrap();
            single = single.max((det.re * gamma_c_oracle(s - top as f64) - 1.0).abs() + det.im.abs());
        }
    }
    let a = [Family { top: 1.0, mult: -1 }, Family { top: -0.5, mult: 2 }];
    let b = [Family { top: 0.0, mult: 3 }, Family { top: 1.0, mult: 2 }];
    let ma = SpectralMultiplicities::with_two_pi_scale(a).unwrap();
    let mb = SpectralMultiplicities::with_two_pi_scale(b).unwrap();
    let union = ma.union(&mb).unwrap();
    let mut multi = 0.0f64;
    for s in samples {
        let s = C64::new(s, 0.0);
        let lhs = regularized_det(&union, s).unwrap();
        let rhs = regularized_det(&ma, s).unwrap() * regularized_det(&mb, s).unwrap();
        multi = multi.max((lhs / rhs - 1.0).norm());
    }
    pass_if(
        single < 1e-9 && multi < 1e-9,
        format!("single-family det*Gamma_C(s-l0) - 1: {single:.2e}; multiplicativity: {multi:.2e} (< 1e-9)"),
    )
}

fn c4_factorization() -> Outcome {
    let samples: Vec<C64> = [2.5, 3.7, 5.25].iter().map(|&s| C64::new(s, 0.0)).collect();
    let mut worst = 0.0f64;
    let mut worst_oracle = 0.0f64;
    let mut ratios = Vec::new();
    for g in [2usize, 3] {
        let r = factorization_report(g, &samples, None).unwrap();
        worst = worst.max(r.max_rel_err);
        for row in &r.rows {
            // Gamma_C(s)^{2g-1} / Gamma_C(s-1) from statrs
            let s = row.s.re;
            let oracle = gamma_c_oracle(s).powi(2 * g as i32 - 1) / gamma_c_oracle(s - 1.0);
            worst_oracle = worst_oracle.max((row.lhs.re - oracle).abs() / oracle);
            ratios.push(format!("{:.12}", row.ratio_to_table.re));
        }
    }
    ratios.dedup();
    pass_if(
        worst < 1e-8 && worst_oracle < 1e-8,
        format!(
            "det^-1 vs Gamma product of the model multiplicities: max rel err {worst:.2e}; vs independent Gamma_C: {worst_oracle:.2e}; ratio to factor table: {}",
            ratios.join(", ")
        ),
    )
}

fn c5_duality() -> Outcome {
    let mut exact = true;
    let mut literal = false;
    for g in [2usize, 3] {
        let r = omega_report::<Rational>(g, -6, 6).unwrap();
        exact &= r.omega_squared_is_id && r.block_identity && r.anticommutator_is_q_omega;
        literal |= r.anticommutator_is_q_id;
    }
    let detail = format!(
        "omega^2 = id: {exact}; Phi + omega Phi omega = q id on delta_q blocks (equivalently Phi omega + omega Phi = q omega): {exact}; \
         literal Phi omega + omega Phi = q id: {literal} (omega reverses the Phi-spectrum of each block, so the anticommutator is q omega)"
    );
    let status = match (exact, literal) {
        (true, true) => Status::Pass,
        (true, false) => Status::LiteralFail,
        _ => Status::Fail,
    };
    Outcome { status, detail }
}

fn c6_diagram() -> Outcome {
    let mut commutes = true;
    let mut u_eq = true;
    let mut d_eq = true;
    let mut d_anti = true;
    let mut count = 0;
    for g in [2usize, 3] {
        let r = check_diagram::<Rational>(&BridgeConfig::new(g, -4, 0).unwrap()).unwrap();
        count += r.rows.len();
        for row in &r.rows {
            commutes &= row.commutes;
            u_eq &= row.u_equivariant && row.u_tilde_equivariant;
            d_anti &= row.d_anti_equivariant;
        }
        let cfg = BridgeConfig::new(g, -4, 0).unwrap();
        let model = cfg.arch_model().unwrap();
        for p in -4..=0 {
            for k in 0..2 * g {
                let v = map_u(&cfg, &model.basis_element::<Rational>(1, p, k).unwrap()).unwrap();
                let df = duality_dyn(&f_infinity_dyn(g, &v)).unwrap();
                let fd = f_infinity_dyn(g, &duality_dyn(&v).unwrap());
                d_eq &= df == fd;
            }
        }
    }
    let detail = format!(
        "{count} basis checks: D U = U~ delta_1: {commutes}; F-equivariance of U, U~: {u_eq}; of D: {d_eq} (D F = -F D holds: {d_anti}, forced by F delta_1 = -delta_1 F)"
    );
    let status = match (commutes && u_eq, d_eq, d_anti) {
        (true, true, _) => Status::Pass,
        (true, false, true) => Status::LiteralFail,
        _ => Status::Fail,
    };
    Outcome { status, detail }
}

fn random_function(al: &Alphabet, level: usize, rng: &mut ChaCha8Rng) -> CylinderFunction<Rational> {
    let words = enumerate_admissible(al, level + 1, &Caps::default()).unwrap();
    CylinderFunction::from_values(
        *al,
        level,
        words.into_iter().map(|w| {
            let v = Rational::new(rng.gen_range(-9i64..=9).into(), rng.gen_range(1i64..=5).into());
            (w, v)
        }),
    )
    .unwrap()
}

fn c7_pairing() -> Outcome {
    let al = Alphabet::new(2).unwrap();
    let caps = Caps::default();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let orbits: Vec<_> = (1..=6).flat_map(|n| enumerate_periodic(&al, n, &caps).unwrap()).collect();
    let mut failures = 0;
    let mut nonzero = 0;
    for _ in 0..100 {
        let level = rng.gen_range(0..=3usize);
        let f = random_function(&al, level, &mut rng);
        let h_level = rng.gen_range(0..=level.max(1) - 1);
        let h = random_function(&al, h_level, &mut rng);
        let dh = coboundary(&h).lift(level.max(h_level + 1)).unwrap();
        let perturbed = f.lift(dh.level()).unwrap().add(&dh).unwrap();
        let o = &orbits[rng.gen_range(0..orbits.len())];
        let a = pair_function(&f, o).value;
        let b = pair_function(&perturbed, o).value;
        // the coboundary alone pairs to zero
        let z = pair_function(&dh, o).value;
        if a != b || !z.is_zero() {
            failures += 1;
        }
        if !a.is_zero() {
            nonzero += 1;
        }
    }
    pass_if(failures == 0 && nonzero > 50, format!("100 coboundary perturbations, levels <= 3, g=2: {failures} changed pairings ({nonzero} nonzero values)"))
}

fn c8_periodic() -> Outcome {
    let caps = Caps::default();
    let mut ok = true;
    for g in [2usize, 3] {
        let al = Alphabet::new(g).unwrap();
        let n = 2 * g;
        let a: Vec<Vec<u128>> = (0..n).map(|i| (0..n).map(|j| u128::from(j != (i + g) % n)).collect()).collect();
        let mut pow = a.clone();
        for period in 1..=8 {
            if period > 1 {
                pow = (0..n).map(|i| (0..n).map(|j| (0..n).map(|k| pow[i][k] * a[k][j]).sum()).collect()).collect();
            }
            let trace: u128 = (0..n).map(|i| pow[i][i]).sum();
            ok &= periodic_point_count(&enumerate_periodic(&al, period, &caps).unwrap()) == trace;
        }
    }
    pass_if(ok, "periodic points of period N = trace(A^N), N <= 8, g in {2,3}, exact".into())
}

fn c9_cuntz_krieger() -> Outcome {
    let caps = Caps::default();
    let r = ck_relations_check::<Rational>(2, &[0, 1, 2, 3], &caps).unwrap();
    let al = Alphabet::new(2).unwrap();
    // oracle: S_j S_j^* is the indicator of the cylinder [j]
    let mut oracle = true;
    for level in 1..=3usize {
        let words = enumerate_admissible(&al, level + 1, &caps).unwrap();
        for j in 0..4 {
            let rj = koopman_core::<Rational>(&al, j, level as isize - 1, &caps).unwrap();
            let p = rj.mul(&rj.transpose()).unwrap().scale(&parry_projection_factor(2, level as isize - 1));
            for (i, w) in words.iter().enumerate() {
                for k in 0..words.len() {
                    let expect = if i == k && w.letters()[0] == j { q(1) } else { q(0) };
                    oracle &= *p.get(i, k) == expect;
                }
            }
        }
    }
    let levels_ok = r.rows.iter().filter(|row| row.level >= 1).all(|row| row.exact);
    pass_if(
        levels_ok && r.all_pass && oracle && r.negative_control_residual > 0.0,
        format!(
            "both relations exact on levels 1..3 (g=2); minimal exact level {:?}; level-0 sum residual {}; all-ones control residual {}",
            r.minimal_exact_level, r.rows[0].sum_residual, r.negative_control_residual
        ),
    )
}

/// Quaternion Mobius action `(aP + b)(cP + d)^{-1}` with `P = z + t j`.
fn quaternion_action(m: [[C64; 2]; 2], p: &H3Point<f64>) -> [f64; 3] {
    #[derive(Clone, Copy)]
    struct Quat(f64, f64, f64, f64);
    let mul = |x: Quat, y: Quat| {
        Quat(
            x.0 * y.0 - x.1 * y.1 - x.2 * y.2 - x.3 * y.3,
            x.0 * y.1 + x.1 * y.0 + x.2 * y.3 - x.3 * y.2,
            x.0 * y.2 - x.1 * y.3 + x.2 * y.0 + x.3 * y.1,
            x.0 * y.3 + x.1 * y.2 - x.2 * y.1 + x.3 * y.0,
        )
    };
    let inv = |x: Quat| {
        let n = x.0 * x.0 + x.1 * x.1 + x.2 * x.2 + x.3 * x.3;
        Quat(x.0 / n, -x.1 / n, -x.2 / n, -x.3 / n)
    };
    let add = |x: Quat, y: Quat| Quat(x.0 + y.0, x.1 + y.1, x.2 + y.2, x.3 + y.3);
    let c = |z: C64| Quat(z.re, z.im, 0.0, 0.0);
    let pq = Quat(p.x1, p.x2, p.t, 0.0);
    let num = add(mul(c(m[0][0]), pq), c(m[0][1]));
    let den = add(mul(c(m[1][0]), pq), c(m[1][1]));
    let r = mul(num, inv(den));
    [r.0, r.1, r.2]
}

fn random_mobius(rng: &mut ChaCha8Rng) -> MobiusElement<f64> {
    loop {
        let mut e = || C64::new(rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5));
        let (a, b, c, d) = (e(), e(), e(), e());
        if (a * d - b * c).norm() > 0.3 {
            return MobiusElement::new(a, b, c, d).unwrap();
        }
    }
}

fn random_point(rng: &mut ChaCha8Rng) -> H3Point<f64> {
    H3Point::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(0.3..2.0)).unwrap()
}

fn c10_geometry() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut iso = 0.0f64;
    let mut action = 0.0f64;
    for _ in 0..100 {
        let m = random_mobius(&mut rng);
        let (p, r) = (random_point(&mut rng), random_point(&mut rng));
        let (mp, mr) = (m.apply_h3(&p).unwrap(), m.apply_h3(&r).unwrap());
        iso = iso.max((hyperbolic_distance(&mp, &mr) - hyperbolic_distance(&p, &r)).abs());
        let o = quaternion_action(m.entries(), &p);
        action = action.max((o[0] - mp.x1).abs().max((o[1] - mp.x2).abs()).max((o[2] - mp.t).abs() / o[2]));
    }
    let mut axis = 0.0f64;
    for _ in 0..100 {
        // m = h diag(lambda, 1/lambda) h^{-1} moves h(0,0,1) by 2 ln|lambda|
        let lambda = C64::from_polar(rng.gen_range(1.2..4.0), rng.gen_range(-PI..PI));
        let h = random_mobius(&mut rng);
        let m = h.mul(&MobiusElement::diagonal(lambda).unwrap()).mul(&h.inverse());
        let x = h.apply_h3(&H3Point::new(0.0, 0.0, 1.0).unwrap()).unwrap();
        let moved = hyperbolic_distance(&m.apply_h3(&x).unwrap(), &x);
        let expect = 2.0 * lambda.norm().ln();
        axis = axis.max((m.translation_length().unwrap() - expect).abs()).max((moved - expect).abs());
    }
    let d = MobiusElement::<f64>::real(2.0, 0.0, 0.0, 0.5).unwrap().apply_h3(&H3Point::new(0.0, 0.0, 1.0).unwrap()).unwrap();
    let example = d.x1.abs().max(d.x2.abs()).max((d.t - 4.0).abs());
    pass_if(
        iso < 1e-12 && axis < 1e-10 && example < 1e-15 && action < 1e-12,
        format!("isometry defect {iso:.1e} (< 1e-12, quaternion-action defect {action:.1e}); axis displacement vs 2 ln|lambda| {axis:.1e} (< 1e-10); diag(2,1/2)(0,0,1) = ({}, {}, {})", d.x1, d.x2, d.t),
    )
}

fn c11_summability() -> Outcome {
    let g = 2;
    let mult = phi_multiplicity_source(g);
    let bound = (2 * g + 3) as u64;
    let rows = summability_profile(&mult, bound, 1.5, &[100_000, 100_001, 200_000]).unwrap();
    let step = rows[1].successive_difference;
    // the next increment, from the closed-form multiplicities
    let oracle = 2.0 * (2 * g + 2) as f64 * (1.0 + 100_001f64.powi(2)).powf(-0.75);
    let harmonic = summability_profile(&mult, bound, 1.0, &[1_000, 10_000, 100_000]).unwrap();
    let spread = log_ratio_spread(&harmonic);
    let corrected = step < 1e-6 && (step - oracle).abs() < 1e-12 * oracle && spread < 0.05;
    // part of the remainder beyond 1e5: already far above 1e-6
    let partial_tail = rows[2].partial_sum - rows[0].partial_sum;
    let literal = partial_tail < 1e-6;
    let detail = format!(
        "z=1.5: successive difference beyond R=1e5 {step:.2e} (< 1e-6); literal remainder beyond 1e5 >= S(2e5) - S(1e5) = {partial_tail:.3e}, \
         bound 2M R^(1-z)/(z-1) = {:.3e}; z=1: S(R)/ln R = {:.4}, {:.4}, {:.4}, spread {:.2}% (< 5%)",
        rows[0].tail_bound,
        harmonic[0].ratio_to_log,
        harmonic[1].ratio_to_log,
        harmonic[2].ratio_to_log,
        100.0 * spread
    );
    let status = match (corrected, literal) {
        (true, true) => Status::Pass,
        (true, false) => Status::LiteralFail,
        _ => Status::Fail,
    };
    Outcome { status, detail }
}

fn c12_commutators() -> Outcome {
    let m = [[2.0, 3.0], [1.0, 2.0]];
    let norms: Vec<f64> = (1..=5).map(|k| phi_sigma2_commutator_norm(2, -k, k + 1, &m).unwrap()).collect();
    // oracle: max(|b|, |c|) since tower partners differ by exactly 1 in Phi
    let arch_ok = norms.iter().all(|&n| n == 3.0);
    let caps = Caps::default();
    let al = Alphabet::new(2).unwrap();
    let levels = [3, 4, 5, 6];
    let koop = koopman_stabilization(&al, &levels, &caps).unwrap();
    let rho = rho_stabilization(&SchottkyGroup::default_genus2(), &levels, &caps).unwrap();
    let k_change = koop.iter().map(|r| r.max_relative_change).fold(0.0, f64::max);
    let r_change = rho.iter().map(|r| r.max_relative_change).fold(0.0, f64::max);
    let k_one = koop.iter().all(|r| r.window_norms.iter().all(|n| (n - 1.0).abs() < 1e-12));
    let rho_norms: Vec<String> = rho.iter().map(|r| format!("{:.6e}", r.window_norms[3])).collect();
    pass_if(
        arch_ok && k_one && k_change < 1e-6 && r_change < 1e-6,
        format!(
            "[Phi, sigma2] = 3 on windows [-k, k+1], k=1..5: {arch_ok}; levels 3..6: [D~, S_i] rel change {k_change:.1e}, [D~, rho(f)] rel change {r_change:.1e} (norms {})",
            rho_norms.join(", ")
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("filtration ranks", c1_ranks),
        ("Lerch dual path", c2_lerch),
        ("regularized determinants", c3_determinants),
        ("determinant vs Gamma factors", c4_factorization),
        ("duality/involution identities", c5_duality),
        ("commutative diagram", c6_diagram),
        ("pairing well-definedness", c7_pairing),
        ("periodic counts", c8_periodic),
        ("Cuntz-Krieger relations", c9_cuntz_krieger),
        ("geometry", c10_geometry),
        ("summability", c11_summability),
        ("commutator stabilization", c12_commutators),
    ];
    let mut hard_failures = 0;
    println!();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        let tag = match o.status {
            Status::Pass => "PASS",
            Status::Fail => {
                hard_failures += 1;
                "FAIL"
            }
            Status::LiteralFail => "FAIL (literal; corrected form PASS)",
        };
        println!("criterion {:>2} {tag}: {name}: {}", i + 1, o.detail);
    }
    if hard_failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

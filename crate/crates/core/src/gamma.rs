//! Complex log-Gamma and the archimedean factors `Gamma_C`, `Gamma_R`.

use num_complex::Complex;
use num_traits::One;

use crate::error::{Error, Result};
use crate::scalar::Real;

// Lanczos approximation, g = 7, n = 9.
const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

fn is_pole<T: Real>(s: Complex<T>) -> bool {
    s.im == T::zero() && s.re <= T::zero() && s.re == s.re.round()
}

/// Principal branch of `ln Gamma(s)` (continuous off the negative real
/// axis), by Lanczos with reflection for `Re s < 1/2`.
pub fn ln_gamma<T: Real>(s: Complex<T>) -> Result<Complex<T>> {
    if is_pole(s) {
        return Err(Error::Pole("Gamma"));
    }
    let half = T::lit(0.5);
    if s.re < half {
        // ln Gamma(s) = ln pi - ln sin(pi s) - ln Gamma(1 - s)
        let pi = T::PI();
        let sin = (s * pi).sin();
        let rest = ln_gamma(Complex::<T>::one() - s)?;
        return Ok(Complex::new(pi.ln(), T::zero()) - sin.ln() - rest);
    }
    let z = s - Complex::<T>::one();
    let mut x = Complex::new(T::lit(LANCZOS[0]), T::zero());
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        x = x + Complex::new(T::lit(*c), T::zero()) / (z + T::from_usize(i).expect("small index"));
    }
    let t = z + T::lit(LANCZOS_G + 0.5);
    let half_ln_2pi = T::lit(0.5) * (T::PI() + T::PI()).ln();
    Ok(Complex::new(half_ln_2pi, T::zero()) + (z + half) * t.ln() - t + x.ln())
}

pub fn gamma<T: Real>(s: Complex<T>) -> Result<Complex<T>> {
    Ok(ln_gamma(s)?.exp())
}

/// `ln Gamma_C(s) = ln Gamma(s) - s ln(2 pi)`.
pub fn ln_gamma_c<T: Real>(s: Complex<T>) -> Result<Complex<T>> {
    let two_pi = T::PI() + T::PI();
    Ok(ln_gamma(s)? - s * two_pi.ln())
}

/// `Gamma_C(s) = (2 pi)^{-s} Gamma(s)`.
pub fn gamma_c<T: Real>(s: Complex<T>) -> Result<Complex<T>> {
    Ok(ln_gamma_c(s)?.exp())
}

/// `Gamma_R(s) = pi^{-s/2} Gamma(s/2)`.
pub fn gamma_r<T: Real>(s: Complex<T>) -> Result<Complex<T>> {
    let half = s * T::lit(0.5);
    Ok((ln_gamma(half)? - half * T::PI().ln()).exp())
}

/// Real-argument convenience wrapper.
pub fn gamma_c_real(s: f64) -> Result<f64> {
    Ok(gamma_c(Complex::new(s, 0.0))?.re)
}

//! Thin wrappers over `libm` so results are identical with and without `std`.

#[inline]
pub fn exp(x: f64) -> f64 {
    libm::exp(x)
}

#[inline]
pub fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline]
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub fn abs(x: f64) -> f64 {
    libm::fabs(x)
}

#[inline]
pub fn sinh(x: f64) -> f64 {
    libm::sinh(x)
}

#[inline]
pub fn cosh(x: f64) -> f64 {
    libm::cosh(x)
}

#[inline]
pub fn acosh(x: f64) -> f64 {
    libm::acosh(x)
}

#[inline]
pub fn powf(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}

#[inline]
pub fn ln_1p(x: f64) -> f64 {
    libm::log1p(x)
}

/// `ln(sum(exp(v)))` with max subtraction.
pub fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    let sum: f64 = values.iter().map(|v| exp(v - max)).sum();
    max + ln(sum)
}

/// `ln(exp(a) + exp(b))`.
#[inline]
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if lo == f64::NEG_INFINITY {
        return hi;
    }
    hi + ln_1p(exp(lo - hi))
}

/// Critical inverse temperature of the square-lattice Ising model.
pub fn beta_critical() -> f64 {
    0.5 * ln(1.0 + sqrt(2.0))
}

/// Critical inverse temperature of the decorated lattice left after freezing
/// the even sublattice: `acosh(exp(2 beta_c)) / 2`.
pub fn beta_decorated_critical() -> f64 {
    0.5 * acosh(exp(2.0 * beta_critical()))
}

/// Onsager's spontaneous magnetization, zero at or above the critical temperature.
pub fn spontaneous_magnetization(beta: f64) -> f64 {
    if beta <= beta_critical() {
        return 0.0;
    }
    let s = sinh(2.0 * beta);
    powf(1.0 - powf(s, -4.0), 0.125)
}

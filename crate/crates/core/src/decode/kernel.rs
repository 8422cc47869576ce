use crate::scalar::Scalar;

use super::LLR_CLAMP;

#[inline]
pub(crate) fn clamp<T: Scalar>(x: T) -> T {
    let c = T::lit(LLR_CLAMP);
    x.max(-c).min(c)
}

#[inline]
pub(crate) fn hard<T: Scalar>(llr: T) -> u8 {
    (llr < T::zero()) as u8
}

/// `2·atanh(tanh(a/2)·tanh(b/2))`, evaluated as a signed magnitude so that
/// flipping the sign of either input flips the output exactly.
#[inline]
pub(crate) fn check_node<T: Scalar>(a: T, b: T) -> T {
    let (x, y) = (a.abs(), b.abs());
    // min + log(1 + e^-(x+y)) - log(1 + e^-|x-y|), with e^-x and e^-y
    // computed once.
    let (lo, hi) = if x < y { (x, y) } else { (y, x) };
    let (el, eh) = ((-lo).exp(), (-hi).exp());
    let mag = lo + ((T::one() + el * eh) * el / (el + eh)).ln();
    let mag = mag.max(T::zero()).min(T::lit(LLR_CLAMP));
    if (a < T::zero()) != (b < T::zero()) {
        -mag
    } else {
        mag
    }
}

/// Right-branch update given the left partial-sum bit.
#[inline]
pub(crate) fn bit_node<T: Scalar>(a: T, b: T, left: u8) -> T {
    clamp(if left == 0 { b + a } else { b - a })
}

/// `-log P(bit | llr) = log(1 + exp(∓llr))`.
#[inline]
pub(crate) fn penalty<T: Scalar>(llr: T, bit: u8) -> T {
    let agree = if bit == 0 { llr } else { -llr };
    if agree >= T::zero() {
        (-agree).exp().ln_1p()
    } else {
        -agree + agree.exp().ln_1p()
    }
}

//! Thin float helpers so the rest of the crate reads like std code.

pub(crate) fn db_to_linear(db: f64) -> f64 {
    if db == f64::NEG_INFINITY {
        0.0
    } else {
        libm::pow(10.0, db / 10.0)
    }
}

pub(crate) fn linear_to_db(lin: f64) -> f64 {
    if lin <= 0.0 {
        f64::NEG_INFINITY
    } else {
        10.0 * libm::log10(lin)
    }
}

/// Wraps an angle in degrees to `[-180, 180)`.
pub(crate) fn wrap_deg(deg: f64) -> f64 {
    let w = libm::fmod(deg + 180.0, 360.0);
    let w = if w < 0.0 { w + 360.0 } else { w };
    w - 180.0
}

#[inline]
pub(crate) fn sin_deg(deg: f64) -> f64 {
    libm::sin(deg.to_radians())
}

#[inline]
pub(crate) fn cos_deg(deg: f64) -> f64 {
    libm::cos(deg.to_radians())
}

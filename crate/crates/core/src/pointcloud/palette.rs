//! Deterministic label <-> RGB palette.
//!
//! Label `L` maps to the 24-bit value `L * 2654435761 mod 2^24`, split into
//! red, green and blue bytes. The multiplier is odd, so the map is a bijection
//! of `0..2^24` and label 0 is the only label that lands on black.

use crate::error::{Error, Result};

const MULTIPLIER: u32 = 2_654_435_761;
const MASK: u32 = (1 << 24) - 1;

/// Largest label representable by the palette.
pub const MAX_LABEL: u32 = MASK;

const fn inverse_multiplier() -> u32 {
    // Newton iteration for the inverse of an odd number mod 2^32.
    let mut inv = MULTIPLIER;
    let mut i = 0;
    while i < 5 {
        inv = inv.wrapping_mul(2u32.wrapping_sub(MULTIPLIER.wrapping_mul(inv)));
        i += 1;
    }
    inv
}

const INVERSE: u32 = inverse_multiplier();

/// Color for `label`; label 0 (ground / unlabeled) is black.
pub fn label_to_color(label: u32) -> Result<[u8; 3]> {
    if label > MAX_LABEL {
        return Err(Error::Parameter(format!(
            "label {label} exceeds the palette range 0..2^24"
        )));
    }
    let h = label.wrapping_mul(MULTIPLIER) & MASK;
    Ok([(h >> 16) as u8, (h >> 8) as u8, h as u8])
}

/// Exact inverse of [`label_to_color`].
pub fn color_to_label(rgb: [u8; 3]) -> u32 {
    let h = (u32::from(rgb[0]) << 16) | (u32::from(rgb[1]) << 8) | u32::from(rgb[2]);
    h.wrapping_mul(INVERSE) & MASK
}

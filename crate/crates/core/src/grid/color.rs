//! Categorical colors from attribute values.
//!
//! The 32-bit FNV-1a hash of the value picks one of 360 hues, one of four
//! saturations and one of three lightnesses. The HSL to RGB conversion is
//! done in exact integer arithmetic, with halves rounding up, so every
//! platform produces the same bytes.

use std::fmt;

use serde::{Serialize, Serializer};

const FNV_OFFSET: u32 = 0x811c_9dc5;
const FNV_PRIME: u32 = 0x0100_0193;

const SATURATION: [u32; 4] = [55, 65, 75, 85];
const LIGHTNESS: [u32; 3] = [40, 55, 70];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rgb {
    pub r: u8,
    pub g: u8,
    pub b: u8,
}

impl Rgb {
    pub fn hex(self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Rgb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{:02x}{:02x}{:02x}", self.r, self.g, self.b)
    }
}

impl Serialize for Rgb {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

pub fn fnv1a32(bytes: &[u8]) -> u32 {
    bytes
        .iter()
        .fold(FNV_OFFSET, |h, &b| (h ^ u32::from(b)).wrapping_mul(FNV_PRIME))
}

/// `(hue degrees, saturation %, lightness %)` for a value.
pub fn hsl_of(value: &str) -> (u32, u32, u32) {
    let h = fnv1a32(value.as_bytes());
    (
        h % 360,
        SATURATION[(h / 360 % 4) as usize],
        LIGHTNESS[(h / 1440 % 3) as usize],
    )
}

/// Converts integer-degree hue and percent saturation/lightness.
pub fn hsl_to_rgb(hue: u32, saturation: u32, lightness: u32) -> Rgb {
    debug_assert!(hue < 360 && saturation <= 100 && lightness <= 100);
    // Quantities below are in units of 1 / 1_200_000.
    const UNIT: u64 = 1_200_000;
    let (s, l) = (u64::from(saturation), u64::from(lightness));
    let c = (100 - (2 * l).abs_diff(100)) * s;
    let chroma = c * 120;
    let x = c * 2 * (60 - u64::from(hue % 120).abs_diff(60));
    let m = l * 12_000 - c * 60;

    let (r, g, b) = match hue / 60 {
        0 => (chroma, x, 0),
        1 => (x, chroma, 0),
        2 => (0, chroma, x),
        3 => (0, x, chroma),
        4 => (x, 0, chroma),
        _ => (chroma, 0, x),
    };
    let channel = |v: u64| ((2 * (v + m) * 255 + UNIT) / (2 * UNIT)) as u8;
    Rgb {
        r: channel(r),
        g: channel(g),
        b: channel(b),
    }
}

/// Color for an attribute value. Equal values always get equal colors.
pub fn color_of(value: &str) -> Rgb {
    let (h, s, l) = hsl_of(value);
    hsl_to_rgb(h, s, l)
}

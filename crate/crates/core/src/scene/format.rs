//! Value encodings used in scene documents: fixed six-decimal numbers and
//! `#rrggbb` colors.

use std::fmt;
use std::str::FromStr;

use serde::de::{self, Deserializer};
use serde::ser::{self, Serializer};
use serde::{Deserialize, Serialize};

/// A float written with exactly six decimals.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct F6(pub f64);

impl F6 {
    pub fn get(self) -> f64 {
        self.0
    }

    pub fn format(v: f64) -> Option<String> {
        if !v.is_finite() {
            return None;
        }
        let s = format!("{v:.6}");
        Some(if s == "-0.000000" { "0.000000".to_string() } else { s })
    }
}

impl From<f64> for F6 {
    fn from(v: f64) -> Self {
        F6(v)
    }
}

impl Serialize for F6 {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let text = F6::format(self.0).ok_or_else(|| ser::Error::custom(format!("non-finite number {}", self.0)))?;
        let number = serde_json::Number::from_str(&text).map_err(ser::Error::custom)?;
        number.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for F6 {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let n = serde_json::Number::deserialize(deserializer)?;
        n.as_f64()
            .map(F6)
            .ok_or_else(|| de::Error::custom(format!("number {n} is not representable")))
    }
}

/// 24-bit color.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rgb(pub u8, pub u8, pub u8);

impl fmt::Display for Rgb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{:02x}{:02x}{:02x}", self.0, self.1, self.2)
    }
}

impl FromStr for Rgb {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let hex = s
            .strip_prefix('#')
            .filter(|h| h.len() == 6 && h.bytes().all(|b| b.is_ascii_hexdigit()))
            .ok_or_else(|| format!("invalid color {s:?}, expected #rrggbb"))?;
        let byte = |i: usize| u8::from_str_radix(&hex[i..i + 2], 16).expect("validated hex");
        Ok(Rgb(byte(0), byte(2), byte(4)))
    }
}

impl Serialize for Rgb {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rgb {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(de::Error::custom)
    }
}

//! Frequencies written with an explicit unit, e.g. `"50 MHz"`.

use std::fmt;
use std::str::FromStr;

use phononbus_core::units;
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FreqUnit {
    GHz,
    MHz,
    KHz,
    Hz,
}

impl FreqUnit {
    fn symbol(self) -> &'static str {
        match self {
            FreqUnit::GHz => "GHz",
            FreqUnit::MHz => "MHz",
            FreqUnit::KHz => "kHz",
            FreqUnit::Hz => "Hz",
        }
    }
}

/// An ordinary frequency as written in a config file. The original value
/// and unit are kept so that serialization reproduces the input.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Freq {
    pub value: f64,
    pub unit: FreqUnit,
}

impl Freq {
    pub const fn new(value: f64, unit: FreqUnit) -> Self {
        Self { value, unit }
    }

    pub const fn mhz(value: f64) -> Self {
        Self::new(value, FreqUnit::MHz)
    }

    pub const fn khz(value: f64) -> Self {
        Self::new(value, FreqUnit::KHz)
    }

    pub const fn ghz(value: f64) -> Self {
        Self::new(value, FreqUnit::GHz)
    }

    pub const fn hz(value: f64) -> Self {
        Self::new(value, FreqUnit::Hz)
    }

    /// Angular rate in rad·µs⁻¹.
    pub fn angular(&self) -> f64 {
        match self.unit {
            FreqUnit::GHz => units::ghz(self.value),
            FreqUnit::MHz => units::mhz(self.value),
            FreqUnit::KHz => units::khz(self.value),
            FreqUnit::Hz => units::hz(self.value),
        }
    }
}

impl fmt::Display for Freq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.value, self.unit.symbol())
    }
}

impl FromStr for Freq {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let (num, unit) = s.split_at(s.trim_end_matches(|c: char| c.is_ascii_alphabetic()).len());
        if unit.is_empty() {
            return Err(format!("missing unit in {s:?} (expected GHz, MHz, kHz or Hz)"));
        }
        let unit = match unit.trim() {
            "GHz" => FreqUnit::GHz,
            "MHz" => FreqUnit::MHz,
            "kHz" => FreqUnit::KHz,
            "Hz" => FreqUnit::Hz,
            other => return Err(format!("unknown frequency unit {other:?} (expected GHz, MHz, kHz or Hz)")),
        };
        let value: f64 = num.trim().parse().map_err(|_| format!("bad number in {s:?}"))?;
        if !value.is_finite() {
            return Err(format!("non-finite frequency {s:?}"));
        }
        Ok(Freq { value, unit })
    }
}

impl Serialize for Freq {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Freq {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Freq;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a frequency string such as \"50 MHz\"")
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Freq, E> {
                v.parse().map_err(E::custom)
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Freq, E> {
                Err(E::custom(format!("missing unit: write \"{v} MHz\" (or GHz/kHz/Hz)")))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Freq, E> {
                self.visit_f64(v as f64)
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Freq, E> {
                self.visit_f64(v as f64)
            }
        }
        d.deserialize_any(V)
    }
}

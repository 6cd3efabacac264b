use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// The five weather variables shared by observations and forecasts.
///
/// Declaration order is the canonical order used for tie-breaking and for
/// subset bitmasks (`SkyCover` is bit 0).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum WeatherVariable {
    SkyCover,
    DewPoint,
    RelHumidity,
    Temperature,
    WindSpeed,
}

impl WeatherVariable {
    pub const ALL: [WeatherVariable; 5] = [
        WeatherVariable::SkyCover,
        WeatherVariable::DewPoint,
        WeatherVariable::RelHumidity,
        WeatherVariable::Temperature,
        WeatherVariable::WindSpeed,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    /// Short code used in reports: SC, DP, RH, T, W.
    pub fn code(self) -> &'static str {
        match self {
            WeatherVariable::SkyCover => "SC",
            WeatherVariable::DewPoint => "DP",
            WeatherVariable::RelHumidity => "RH",
            WeatherVariable::Temperature => "T",
            WeatherVariable::WindSpeed => "W",
        }
    }

    /// Column name in the CSV files.
    pub fn column(self) -> &'static str {
        match self {
            WeatherVariable::SkyCover => "sky_cover",
            WeatherVariable::DewPoint => "dew_point",
            WeatherVariable::RelHumidity => "rel_humidity",
            WeatherVariable::Temperature => "temperature",
            WeatherVariable::WindSpeed => "wind_speed",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            WeatherVariable::SkyCover => "Sky cover",
            WeatherVariable::DewPoint => "Dew point",
            WeatherVariable::RelHumidity => "Relative humidity",
            WeatherVariable::Temperature => "Temperature",
            WeatherVariable::WindSpeed => "Wind",
        }
    }

    /// Variables whose bit is set in `mask` (bit i = `ALL[i]`).
    pub fn from_mask(mask: u32) -> Vec<WeatherVariable> {
        Self::ALL
            .iter()
            .copied()
            .filter(|v| mask & (1 << v.index()) != 0)
            .collect()
    }

    pub fn mask(vars: &[WeatherVariable]) -> u32 {
        vars.iter().fold(0, |m, v| m | (1 << v.index()))
    }
}

impl fmt::Display for WeatherVariable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for WeatherVariable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = s.trim().to_ascii_lowercase().replace([' ', '-'], "_");
        let var = match key.as_str() {
            "sc" | "sky_cover" | "skycover" => WeatherVariable::SkyCover,
            "dp" | "dew_point" | "dewpoint" => WeatherVariable::DewPoint,
            "rh" | "rel_humidity" | "relative_humidity" | "relhumidity" => {
                WeatherVariable::RelHumidity
            }
            "t" | "temperature" => WeatherVariable::Temperature,
            "w" | "wind" | "wind_speed" | "windspeed" => WeatherVariable::WindSpeed,
            _ => return Err(Error::UnknownVariable(s.to_string())),
        };
        Ok(var)
    }
}

use serde::{Deserialize, Serialize};

/// Module that raised a warning.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Module {
    PanelStore,
    GreyRelational,
    Gm11Forecast,
    StatsFit,
    GgdpAccounting,
    ReportingCli,
}

/// A non-fatal condition surfaced in reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Warning {
    pub module: Module,
    pub code: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub country: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub year: Option<i32>,
    pub message: String,
}

impl Warning {
    pub fn new(module: Module, code: &str, message: impl Into<String>) -> Self {
        Self {
            module,
            code: code.to_string(),
            country: None,
            year: None,
            message: message.into(),
        }
    }

    pub fn for_country(mut self, country: &str) -> Self {
        self.country = Some(country.to_string());
        self
    }

    pub fn at_year(mut self, year: i32) -> Self {
        self.year = Some(year);
        self
    }
}

use clap::ValueEnum;
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Human,
    Json,
    Csv,
}

/// An error with its process exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn input(message: impl Into<String>) -> Self {
        Failure {
            code: 1,
            message: message.into(),
        }
    }

    pub fn internal(message: impl Into<String>) -> Self {
        Failure {
            code: 3,
            message: message.into(),
        }
    }
}

impl From<qmeasure::Error> for Failure {
    fn from(e: qmeasure::Error) -> Self {
        use qmeasure::Error::*;
        let code = match e {
            SpaceTooLarge { .. } | EnumerationCap { .. } => 2,
            _ => 1,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

/// Command result in every format it supports, plus the exit code to use
/// after printing it.
pub struct Report {
    pub human: String,
    pub json: Value,
    pub csv: Option<String>,
    pub exit_code: u8,
}

impl Report {
    pub fn new(human: String, json: Value) -> Self {
        Report {
            human,
            json,
            csv: None,
            exit_code: 0,
        }
    }

    pub fn with_csv(mut self, csv: String) -> Self {
        self.csv = Some(csv);
        self
    }

    pub fn exit(mut self, code: u8) -> Self {
        self.exit_code = code;
        self
    }

    pub fn render(&self, format: Format) -> Result<String, Failure> {
        let mut text = match format {
            Format::Human => self.human.clone(),
            Format::Json => serde_json::to_string_pretty(&self.json)
                .map_err(|e| Failure::internal(e.to_string()))?,
            Format::Csv => self
                .csv
                .clone()
                .ok_or_else(|| Failure::input("this command has no CSV output"))?,
        };
        if !text.ends_with('\n') {
            text.push('\n');
        }
        Ok(text)
    }
}

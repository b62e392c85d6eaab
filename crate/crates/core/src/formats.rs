//! String formats understood by both cell coercion and event validation.

use std::fmt;
use std::str::FromStr;

use chrono::{DateTime, NaiveDate};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Format {
    #[serde(rename = "date-time")]
    DateTime,
    #[serde(rename = "date")]
    Date,
    #[serde(rename = "email")]
    Email,
}

impl Format {
    pub fn as_str(self) -> &'static str {
        match self {
            Format::DateTime => "date-time",
            Format::Date => "date",
            Format::Email => "email",
        }
    }

    pub fn matches(self, value: &str) -> bool {
        match self {
            Format::DateTime => is_date_time(value),
            Format::Date => is_date(value),
            Format::Email => is_email(value),
        }
    }

    /// Human-readable lexical form, used in issue messages.
    pub fn expected(self) -> &'static str {
        match self {
            Format::DateTime => "an RFC 3339 date-time such as 2024-03-01T08:30:00Z",
            Format::Date => "a calendar date in YYYY-MM-DD form",
            Format::Email => "an address of the form local@domain.tld",
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Format {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "date-time" => Ok(Format::DateTime),
            "date" => Ok(Format::Date),
            "email" => Ok(Format::Email),
            _ => Err(()),
        }
    }
}

pub fn is_date(value: &str) -> bool {
    let b = value.as_bytes();
    // chrono's %Y accepts signs and more than four digits
    let shape_ok = b.len() == 10
        && b[4] == b'-'
        && b[7] == b'-'
        && b.iter()
            .enumerate()
            .all(|(i, c)| i == 4 || i == 7 || c.is_ascii_digit());
    shape_ok && NaiveDate::parse_from_str(value, "%Y-%m-%d").is_ok()
}

pub fn is_date_time(value: &str) -> bool {
    value.len() >= 20 && is_date(&value[..10]) && DateTime::parse_from_rfc3339(value).is_ok()
}

pub fn is_email(value: &str) -> bool {
    let Some((local, domain)) = value.split_once('@') else {
        return false;
    };
    if local.is_empty() || domain.contains('@') {
        return false;
    }
    if value.chars().any(|c| c.is_whitespace() || c.is_control()) {
        return false;
    }
    let labels: Vec<&str> = domain.split('.').collect();
    labels.len() >= 2 && labels.iter().all(|l| !l.is_empty())
}

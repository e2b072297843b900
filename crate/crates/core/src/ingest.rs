//! Record parsing and USPTO advanced-search query composition.
//!
//! Ingestion works on saved exports only. Two formats are accepted: the
//! tagged plain-text record format (blocks separated by `----`) and a
//! tab-separated tabular import. Batched downloads are handled by passing
//! several files to one run; duplicate patent ids across batches are
//! dropped keeping the first occurrence.

use chrono::{Datelike, NaiveDate};

use crate::error::Error;
use crate::Result;

/// Block separator of the tagged record format.
pub const RECORD_SEPARATOR: &str = "----";

/// One inventor address: city, optional region, 2-letter country code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InventorLocation {
    pub city: String,
    pub region: Option<String>,
    pub country: String,
}

impl InventorLocation {
    pub fn new(city: &str, region: Option<&str>, country: &str) -> Result<Self> {
        let country = country.to_ascii_uppercase();
        if country.len() != 2 || !country.chars().all(|c| c.is_ascii_uppercase()) {
            return Err(Error::Format(format!("country code {country:?} is not 2 letters")));
        }
        Ok(Self {
            city: city.to_string(),
            region: region.filter(|r| !r.is_empty()).map(str::to_string),
            country,
        })
    }
}

/// One granted patent as parsed from an export.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatentRecord {
    pub patent_id: String,
    pub issue_date: NaiveDate,
    pub inventor_locations: Vec<InventorLocation>,
    /// Raw classification symbols, duplicates preserved verbatim.
    pub class_symbols: Vec<String>,
}

/// Result of parsing one stream: the records plus the number of unknown
/// tags that were skipped.
#[derive(Debug, Clone, Default)]
pub struct ParsedRecords {
    pub records: Vec<PatentRecord>,
    pub unknown_tags: usize,
}

/// Parse the tagged record format.
///
/// Fields are one per line: `PN <id>`, `ISD <YYYYMMDD>`,
/// `IC <city>|<region-or-empty>|<CC>` (repeatable), `CL <symbol>`
/// (repeatable); records are separated by a `----` line. A block without
/// a PN tag is an error naming the block's first line.
pub fn parse_records(text: &str) -> Result<ParsedRecords> {
    let mut out = ParsedRecords::default();
    let mut block: Vec<(usize, &str)> = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if line.trim() == RECORD_SEPARATOR {
            flush_block(&block, &mut out)?;
            block.clear();
        } else {
            block.push((idx + 1, line));
        }
    }
    flush_block(&block, &mut out)?;
    Ok(out)
}

fn flush_block(block: &[(usize, &str)], out: &mut ParsedRecords) -> Result<()> {
    let lines: Vec<(usize, &str)> =
        block.iter().filter(|(_, l)| !l.trim().is_empty()).map(|&(n, l)| (n, l)).collect();
    if lines.is_empty() {
        return Ok(());
    }
    let first_line = lines[0].0;
    let mut patent_id: Option<String> = None;
    let mut issue_date: Option<NaiveDate> = None;
    let mut locations = Vec::new();
    let mut symbols = Vec::new();

    for (lineno, line) in &lines {
        let line = line.trim_end();
        let (tag, rest) = match line.split_once(' ') {
            Some((t, r)) => (t, r.trim()),
            None => (line.trim(), ""),
        };
        match tag {
            "PN" => {
                if rest.is_empty() {
                    return Err(Error::Parse { line: *lineno, message: "empty PN".into() });
                }
                patent_id = Some(rest.to_string());
            }
            "ISD" => {
                let date = NaiveDate::parse_from_str(rest, "%Y%m%d").map_err(|_| Error::Parse {
                    line: *lineno,
                    message: format!("bad ISD date {rest:?}, expected YYYYMMDD"),
                })?;
                issue_date = Some(date);
            }
            "IC" => {
                let parts: Vec<&str> = rest.split('|').collect();
                if parts.len() != 3 {
                    return Err(Error::Parse {
                        line: *lineno,
                        message: format!("IC needs city|region|country, got {rest:?}"),
                    });
                }
                let loc = InventorLocation::new(parts[0], Some(parts[1]), parts[2]).map_err(
                    |e| Error::Parse { line: *lineno, message: e.to_string() },
                )?;
                locations.push(loc);
            }
            "CL" => symbols.push(rest.to_string()),
            _ => out.unknown_tags += 1,
        }
    }

    let patent_id = patent_id.ok_or(Error::Parse {
        line: first_line,
        message: "record block has no PN tag".into(),
    })?;
    let issue_date = issue_date.ok_or(Error::Parse {
        line: first_line,
        message: format!("record {patent_id} has no ISD tag"),
    })?;
    out.records.push(PatentRecord {
        patent_id,
        issue_date,
        inventor_locations: locations,
        class_symbols: symbols,
    });
    Ok(())
}

/// Parse the tab-separated tabular import. Header:
/// `patent_id issue_date city region country class_symbols` (tab-joined);
/// `class_symbols` is semicolon-joined, `issue_date` is YYYYMMDD.
pub fn parse_tabular(text: &str) -> Result<ParsedRecords> {
    const HEADER: [&str; 6] = ["patent_id", "issue_date", "city", "region", "country", "class_symbols"];
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or(Error::Parse { line: 1, message: "empty tabular input".into() })?;
    let cols: Vec<&str> = header.split('\t').map(str::trim).collect();
    if cols != HEADER {
        return Err(Error::Parse {
            line: 1,
            message: format!("bad header {cols:?}, expected {HEADER:?}"),
        });
    }
    let mut out = ParsedRecords::default();
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let lineno = idx + 1;
        let cells: Vec<&str> = line.split('\t').collect();
        if cells.len() != 6 {
            return Err(Error::Parse {
                line: lineno,
                message: format!("expected 6 columns, got {}", cells.len()),
            });
        }
        let issue_date = NaiveDate::parse_from_str(cells[1].trim(), "%Y%m%d").map_err(|_| {
            Error::Parse { line: lineno, message: format!("bad issue_date {:?}", cells[1]) }
        })?;
        let loc = InventorLocation::new(cells[2].trim(), Some(cells[3].trim()), cells[4].trim())
            .map_err(|e| Error::Parse { line: lineno, message: e.to_string() })?;
        let symbols: Vec<String> = cells[5]
            .split(';')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(str::to_string)
            .collect();
        if cells[0].trim().is_empty() {
            return Err(Error::Parse { line: lineno, message: "empty patent_id".into() });
        }
        out.records.push(PatentRecord {
            patent_id: cells[0].trim().to_string(),
            issue_date,
            inventor_locations: vec![loc],
            class_symbols: symbols,
        });
    }
    Ok(out)
}

/// Keep records whose issue year equals `year`.
pub fn filter_by_year(records: Vec<PatentRecord>, year: i32) -> Vec<PatentRecord> {
    records.into_iter().filter(|r| r.issue_date.year() == year).collect()
}

/// Drop duplicate patent ids keeping the first occurrence; returns the
/// surviving records and the number of duplicates removed.
pub fn dedup_records(records: Vec<PatentRecord>) -> (Vec<PatentRecord>, usize) {
    let mut seen = std::collections::HashSet::new();
    let mut kept = Vec::with_capacity(records.len());
    let mut dropped = 0usize;
    for r in records {
        if seen.insert(r.patent_id.clone()) {
            kept.push(r);
        } else {
            dropped += 1;
        }
    }
    (kept, dropped)
}

/// One city group of a CBSA query: places searched within one state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CbsaGroup {
    pub state: String,
    pub places: Vec<String>,
}

/// A USPTO advanced-search query. The three shapes mirror the retrieval
/// strings used for non-US cities, US cities, and CBSA county lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QuerySpec {
    CityCountry { cities: Vec<String>, country: String, year: u16 },
    CityState { cities: Vec<String>, state: String, year: u16 },
    Cbsa { groups: Vec<CbsaGroup>, year: u16 },
}

fn check_code(code: &str, what: &str) -> Result<()> {
    if code.len() != 2 || !code.chars().all(|c| c.is_ascii_alphabetic()) {
        return Err(Error::InvalidSpec(format!("{what} {code:?} must be 2 letters")));
    }
    Ok(())
}

fn check_year(year: u16) -> Result<()> {
    if !(1000..=9999).contains(&year) {
        return Err(Error::InvalidSpec(format!("year {year} must have 4 digits")));
    }
    Ok(())
}

fn quoted(term: &str) -> String {
    if term.contains(' ') {
        format!("\"{term}\"")
    } else {
        term.to_string()
    }
}

/// `(ic/a or ic/b)` for multi-term lists, `ic/a` for a single term.
fn ic_each(terms: &[String]) -> String {
    if terms.len() == 1 {
        format!("ic/{}", quoted(&terms[0]))
    } else {
        let parts: Vec<String> = terms.iter().map(|t| format!("ic/{}", quoted(t))).collect();
        format!("({})", parts.join(" or "))
    }
}

/// `ic/(a OR b)` for multi-term lists, `ic/a` for a single term.
fn ic_grouped(terms: &[String]) -> String {
    if terms.len() == 1 {
        format!("ic/{}", quoted(&terms[0]))
    } else {
        let parts: Vec<String> = terms.iter().map(|t| quoted(t)).collect();
        format!("ic/({})", parts.join(" OR "))
    }
}

/// Render the exact advanced-search string for a query spec.
///
/// The keyword casing differs between the simple city forms (lowercase
/// `ic/… and icn/… and isd/…`) and the CBSA forms (uppercase `IS/XX`,
/// and `AND ISD/…` in the multi-state shape); both appear verbatim in
/// USPTO practice and are reproduced byte-exactly.
pub fn build_search_string(spec: &QuerySpec) -> Result<String> {
    match spec {
        QuerySpec::CityCountry { cities, country, year } => {
            if cities.is_empty() {
                return Err(Error::InvalidSpec("city_terms is empty".into()));
            }
            check_code(country, "country")?;
            check_year(*year)?;
            Ok(format!(
                "{} and icn/{} and isd/{}$$",
                ic_each(cities),
                country.to_ascii_lowercase(),
                year
            ))
        }
        QuerySpec::CityState { cities, state, year } => {
            if cities.is_empty() {
                return Err(Error::InvalidSpec("city_terms is empty".into()));
            }
            check_code(state, "state")?;
            check_year(*year)?;
            Ok(format!(
                "{} and is/{} and isd/{}$$",
                ic_each(cities),
                state.to_ascii_lowercase(),
                year
            ))
        }
        QuerySpec::Cbsa { groups, year } => {
            check_year(*year)?;
            if groups.is_empty() {
                return Err(Error::InvalidSpec("cbsa query has no state groups".into()));
            }
            for g in groups {
                check_code(&g.state, "state")?;
                if g.places.is_empty() {
                    return Err(Error::InvalidSpec(format!(
                        "cbsa group {} has no places",
                        g.state
                    )));
                }
            }
            if groups.len() == 1 {
                let g = &groups[0];
                Ok(format!(
                    "IS/{} and isd/{}$$ and {}",
                    g.state.to_ascii_uppercase(),
                    year,
                    ic_grouped(&g.places)
                ))
            } else {
                let parts: Vec<String> = groups
                    .iter()
                    .map(|g| {
                        format!(
                            "({} AND IS/{})",
                            ic_grouped(&g.places),
                            g.state.to_ascii_uppercase()
                        )
                    })
                    .collect();
                Ok(format!("{} AND ISD/{}$$", parts.join(" OR "), year))
            }
        }
    }
}

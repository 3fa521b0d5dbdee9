//! Country-level language/population aggregation: CSV ingest, exclusion
//! lists, population binning, and scatter export.

use std::fmt::Write as _;
use std::path::Path;

use crate::{Error, Result};

/// Countries whose population or language count dwarfs the rest of the
/// data; excluded by default from binned aggregates.
pub const DEFAULT_EXCLUSIONS: [&str; 4] = ["China", "India", "Indonesia", "Papua New Guinea"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountryRecord {
    pub country: String,
    pub population: u64,
    pub languages: u64,
}

/// One population interval `[lower, upper)` with its language average.
#[derive(Debug, Clone, PartialEq)]
pub struct BinRow {
    pub lower: u64,
    pub upper: u64,
    /// `None` for empty bins.
    pub mean_languages: Option<f64>,
    pub country_count: usize,
}

/// Loads `country,population,languages` CSV. Rows violating the
/// invariants (population >= 1, languages >= 1, numeric fields) fail the
/// whole load; the error lists every offending line number.
pub fn load_countries(path: &Path) -> Result<Vec<CountryRecord>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| match e.kind() {
            csv::ErrorKind::Io(_) => Error::Parse(format!("cannot open {}: {e}", path.display())),
            _ => Error::Parse(e.to_string()),
        })?;
    {
        let headers = reader
            .headers()
            .map_err(|e| Error::Parse(e.to_string()))?;
        let expected = ["country", "population", "languages"];
        if headers.iter().map(str::trim).ne(expected) {
            return Err(Error::Parse(format!(
                "{}: header must be `country,population,languages`",
                path.display()
            )));
        }
    }
    let mut records = Vec::new();
    let mut bad_lines = Vec::new();
    for (idx, row) in reader.records().enumerate() {
        let lineno = idx + 2; // 1-based, after the header
        let row = match row {
            Ok(r) => r,
            Err(_) => {
                bad_lines.push(format!("line {lineno}: malformed row"));
                continue;
            }
        };
        if row.len() != 3 {
            bad_lines.push(format!("line {lineno}: expected 3 fields"));
            continue;
        }
        let country = row[0].trim().to_string();
        let population: Option<u64> = row[1].trim().parse().ok();
        let languages: Option<u64> = row[2].trim().parse().ok();
        match (population, languages) {
            (Some(p), Some(l)) if p >= 1 && l >= 1 && !country.is_empty() => {
                records.push(CountryRecord {
                    country,
                    population: p,
                    languages: l,
                })
            }
            _ => bad_lines.push(format!(
                "line {lineno}: need non-empty country, population >= 1, languages >= 1"
            )),
        }
    }
    if !bad_lines.is_empty() {
        return Err(Error::Parse(format!(
            "{}: {} invalid row(s): {}",
            path.display(),
            bad_lines.len(),
            bad_lines.join("; ")
        )));
    }
    Ok(records)
}

/// Drops records whose country matches one of `names` (trimmed,
/// case-insensitive). Names that match nothing are returned as warnings.
pub fn exclude(
    records: Vec<CountryRecord>,
    names: &[String],
) -> (Vec<CountryRecord>, Vec<String>) {
    let normalized: Vec<String> = names.iter().map(|n| n.trim().to_lowercase()).collect();
    let mut matched = vec![false; normalized.len()];
    let kept = records
        .into_iter()
        .filter(|rec| {
            let key = rec.country.trim().to_lowercase();
            match normalized.iter().position(|n| *n == key) {
                Some(i) => {
                    matched[i] = true;
                    false
                }
                None => true,
            }
        })
        .collect();
    let warnings = normalized
        .iter()
        .zip(&matched)
        .filter(|(n, &m)| !m && !n.is_empty())
        .map(|(n, _)| format!("exclusion `{n}` matched no record"))
        .collect();
    (kept, warnings)
}

/// Fixed-width bins `[k*w, (k+1)*w)` from 0 up to the maximum population;
/// empty bins are emitted with count 0 and no mean.
pub fn bin_average(records: &[CountryRecord], bin_width: u64) -> Result<Vec<BinRow>> {
    assert!(bin_width > 0, "bin width must be positive");
    if records.is_empty() {
        return Ok(Vec::new());
    }
    let max_pop = records.iter().map(|r| r.population).max().unwrap();
    let bin_count = (max_pop / bin_width + 1) as usize;
    let mut sums = vec![0u64; bin_count];
    let mut counts = vec![0usize; bin_count];
    for rec in records {
        let k = (rec.population / bin_width) as usize;
        sums[k] += rec.languages;
        counts[k] += 1;
    }
    Ok((0..bin_count)
        .map(|k| BinRow {
            lower: k as u64 * bin_width,
            upper: (k as u64 + 1) * bin_width,
            mean_languages: (counts[k] > 0).then(|| sums[k] as f64 / counts[k] as f64),
            country_count: counts[k],
        })
        .collect())
}

/// Logarithmic bins `[base^k, base^(k+1))` covering the population range.
pub fn bin_average_log(records: &[CountryRecord], base: f64) -> Result<Vec<BinRow>> {
    if !(base > 1.0) {
        return Err(Error::Parameter("log-bin base must be > 1".into()));
    }
    if records.is_empty() {
        return Ok(Vec::new());
    }
    let max_pop = records.iter().map(|r| r.population).max().unwrap();
    let bin_index = |p: u64| (p as f64).log(base).floor() as i64;
    let top = bin_index(max_pop);
    let mut rows = Vec::new();
    for k in 0..=top {
        let lower = base.powi(k as i32).floor() as u64;
        let upper = base.powi(k as i32 + 1).floor() as u64;
        let in_bin: Vec<&CountryRecord> = records
            .iter()
            .filter(|r| bin_index(r.population) == k)
            .collect();
        rows.push(BinRow {
            lower,
            upper,
            mean_languages: (!in_bin.is_empty())
                .then(|| in_bin.iter().map(|r| r.languages as f64).sum::<f64>() / in_bin.len() as f64),
            country_count: in_bin.len(),
        });
    }
    Ok(rows)
}

/// `lower,upper,mean_languages,country_count`; the mean of an empty bin
/// serializes as an empty field.
pub fn bins_csv(rows: &[BinRow]) -> String {
    let mut out = String::from("lower,upper,mean_languages,country_count\n");
    for row in rows {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            row.lower,
            row.upper,
            row.mean_languages.map_or(String::new(), |m| m.to_string()),
            row.country_count
        );
    }
    out
}

/// `population,languages,country`, sorted by population ascending, ties by
/// country name.
pub fn scatter_csv(records: &[CountryRecord]) -> String {
    let mut sorted: Vec<&CountryRecord> = records.iter().collect();
    sorted.sort_by(|a, b| {
        a.population
            .cmp(&b.population)
            .then_with(|| a.country.cmp(&b.country))
    });
    let mut out = String::from("population,languages,country\n");
    for rec in sorted {
        let _ = writeln!(out, "{},{},{}", rec.population, rec.languages, rec.country);
    }
    out
}

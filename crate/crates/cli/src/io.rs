//! CSV readers and writers for comparison data and races.
//!
//! Labels are ordered by first appearance everywhere.

use std::fmt::Write as _;

use btkit::geometric::RaceRecord;
use btkit::ComparisonMatrix;
use csv::{ReaderBuilder, StringRecord, Trim};

/// Parse failure, carrying the 1-based line it happened on when known.
#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    pub line: Option<u64>,
    pub message: String,
}

impl std::fmt::Display for ParseError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

impl std::error::Error for ParseError {}

fn err(line: Option<u64>, message: impl Into<String>) -> ParseError {
    ParseError {
        line,
        message: message.into(),
    }
}

fn records(text: &str) -> impl Iterator<Item = Result<StringRecord, ParseError>> + '_ {
    ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(Trim::All)
        .from_reader(text.as_bytes())
        .into_records()
        .map(|r| r.map_err(|e| err(e.position().map(|p| p.line()), e.to_string())))
        .filter(|r| !matches!(r, Ok(rec) if rec.iter().all(str::is_empty)))
}

fn line_of(rec: &StringRecord) -> Option<u64> {
    rec.position().map(|p| p.line())
}

fn parse_count(field: &str, line: Option<u64>) -> Result<f64, ParseError> {
    let v: f64 = field
        .parse()
        .map_err(|_| err(line, format!("count {field:?} is not a number")))?;
    if !v.is_finite() || v < 0.0 {
        return Err(err(
            line,
            format!("count {field:?} must be a nonnegative number"),
        ));
    }
    Ok(v)
}

fn intern(labels: &mut Vec<String>, label: &str) -> usize {
    match labels.iter().position(|l| l == label) {
        Some(i) => i,
        None => {
            labels.push(label.to_string());
            labels.len() - 1
        }
    }
}

/// True when the first non-empty line is a `winner,loser[,count]` header.
pub fn is_results_csv(text: &str) -> bool {
    text.lines()
        .map(str::trim)
        .find(|l| !l.is_empty())
        .map(|l| {
            let fields: Vec<String> = l
                .split(',')
                .map(|f| f.trim().to_ascii_lowercase())
                .collect();
            fields == ["winner", "loser"] || fields == ["winner", "loser", "count"]
        })
        .unwrap_or(false)
}

/// Accumulates a `winner,loser[,count]` file into a comparison matrix.
pub fn parse_results(text: &str) -> Result<ComparisonMatrix, ParseError> {
    let mut rows = records(text);
    let header = rows.next().ok_or_else(|| err(None, "empty input"))??;
    let names: Vec<String> = header.iter().map(|h| h.to_ascii_lowercase()).collect();
    let with_count = match names.as_slice() {
        [w, l] if w == "winner" && l == "loser" => false,
        [w, l, c] if w == "winner" && l == "loser" && c == "count" => true,
        _ => {
            return Err(err(
                line_of(&header),
                "expected header winner,loser or winner,loser,count",
            ))
        }
    };
    let width = if with_count { 3 } else { 2 };

    let mut labels: Vec<String> = Vec::new();
    let mut entries: Vec<(usize, usize, f64)> = Vec::new();
    for rec in rows {
        let rec = rec?;
        let line = line_of(&rec);
        if rec.len() != width {
            return Err(err(
                line,
                format!("expected {width} fields, found {}", rec.len()),
            ));
        }
        let (w, l) = (&rec[0], &rec[1]);
        if w.is_empty() || l.is_empty() {
            return Err(err(line, "empty label"));
        }
        if w == l {
            return Err(err(line, format!("{w:?} cannot be compared with itself")));
        }
        let count = if with_count {
            parse_count(&rec[2], line)?
        } else {
            1.0
        };
        let i = intern(&mut labels, w);
        let j = intern(&mut labels, l);
        entries.push((i, j, count));
    }
    let n = labels.len();
    if n < 2 {
        return Err(err(None, "need results involving at least two items"));
    }
    let mut counts = vec![vec![0.0; n]; n];
    for (i, j, c) in entries {
        counts[i][j] += c;
    }
    ComparisonMatrix::new(labels, counts).map_err(|e| err(None, e.to_string()))
}

/// Loads a square matrix CSV: header row of labels (after one leading corner
/// cell), then one row per label.
pub fn parse_matrix(text: &str) -> Result<ComparisonMatrix, ParseError> {
    let mut rows = records(text);
    let header = rows.next().ok_or_else(|| err(None, "empty input"))??;
    let labels: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
    let n = labels.len();
    if n < 2 {
        return Err(err(
            line_of(&header),
            "header must list at least two labels",
        ));
    }
    let mut counts = Vec::with_capacity(n);
    for (k, rec) in rows.enumerate() {
        let rec = rec?;
        let line = line_of(&rec);
        if k >= n {
            return Err(err(
                line,
                format!("more than {n} rows: matrix is not square"),
            ));
        }
        if rec.len() != n + 1 {
            return Err(err(
                line,
                format!("expected {} fields, found {}", n + 1, rec.len()),
            ));
        }
        if rec[0] != labels[k] {
            return Err(err(
                line,
                format!(
                    "row label {:?} does not match column label {:?}",
                    &rec[0], labels[k]
                ),
            ));
        }
        let row = rec
            .iter()
            .skip(1)
            .map(|f| parse_count(f, line))
            .collect::<Result<Vec<_>, _>>()?;
        if row[k] != 0.0 {
            return Err(err(
                line,
                format!("diagonal entry for {:?} must be 0", labels[k]),
            ));
        }
        counts.push(row);
    }
    if counts.len() != n {
        return Err(err(
            None,
            format!(
                "found {} rows for {n} labels: matrix is not square",
                counts.len()
            ),
        ));
    }
    ComparisonMatrix::new(labels, counts).map_err(|e| err(None, e.to_string()))
}

/// Either format, chosen by the header.
pub fn parse_comparisons(text: &str) -> Result<ComparisonMatrix, ParseError> {
    if is_results_csv(text) {
        parse_results(text)
    } else {
        parse_matrix(text)
    }
}

/// Matrix CSV with shortest round-trip number formatting.
pub fn write_matrix_csv(c: &ComparisonMatrix) -> String {
    let mut out = String::new();
    for label in c.items() {
        out.push(',');
        out.push_str(label);
    }
    out.push('\n');
    for (i, label) in c.items().iter().enumerate() {
        out.push_str(label);
        for j in 0..c.len() {
            let _ = write!(out, ",{}", c.get(i, j));
        }
        out.push('\n');
    }
    out
}

/// Races from `race_id,competitor,rank`, with competitor labels in
/// first-appearance order. Races keep their first-appearance order too.
pub fn parse_races(text: &str) -> Result<(Vec<String>, Vec<RaceRecord>), ParseError> {
    let mut rows = records(text);
    let header = rows.next().ok_or_else(|| err(None, "empty input"))??;
    let names: Vec<String> = header.iter().map(|h| h.to_ascii_lowercase()).collect();
    if names != ["race_id", "competitor", "rank"] {
        return Err(err(
            line_of(&header),
            "expected header race_id,competitor,rank",
        ));
    }
    let mut labels: Vec<String> = Vec::new();
    let mut races: Vec<RaceRecord> = Vec::new();
    for rec in rows {
        let rec = rec?;
        let line = line_of(&rec);
        if rec.len() != 3 {
            return Err(err(line, format!("expected 3 fields, found {}", rec.len())));
        }
        if rec[1].is_empty() {
            return Err(err(line, "empty competitor"));
        }
        let rank: usize = rec[2].parse().map_err(|_| {
            err(
                line,
                format!("rank {:?} is not a positive integer", &rec[2]),
            )
        })?;
        let who = intern(&mut labels, &rec[1]);
        let race = match races.iter().position(|r| r.race_id == rec[0]) {
            Some(k) => &mut races[k],
            None => {
                races.push(RaceRecord {
                    race_id: rec[0].to_string(),
                    participants: Vec::new(),
                    ranks: Vec::new(),
                });
                races.last_mut().expect("just pushed")
            }
        };
        if race.participants.contains(&who) {
            return Err(err(
                line,
                format!("{:?} appears twice in race {:?}", &rec[1], race.race_id),
            ));
        }
        race.participants.push(who);
        race.ranks.push(rank);
    }
    if races.is_empty() {
        return Err(err(None, "no races"));
    }
    let n = labels.len();
    for race in &races {
        race.validate(n).map_err(|e| err(None, e.to_string()))?;
    }
    Ok((labels, races))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accumulates_results() {
        let c = parse_results("winner,loser\nA,B\nA,B\nB,A\n").unwrap();
        assert_eq!(c.items(), &["A".to_string(), "B".to_string()]);
        assert_eq!(c.get(0, 1), 2.0);
        assert_eq!(c.get(1, 0), 1.0);
    }

    #[test]
    fn counted_results_give_the_even_three_team_matrix() {
        let c = parse_results(
            "winner,loser,count\r\nF,G,10\r\nG,F,5\r\nF,H,12\r\nH,F,3\r\nG,H,10\r\nH,G,5\r\n",
        )
        .unwrap();
        assert_eq!(
            c.to_rows(),
            vec![vec![0., 10., 12.], vec![5., 0., 10.], vec![3., 5., 0.]]
        );
    }

    #[test]
    fn result_errors_name_the_line() {
        let e = parse_results("winner,loser,count\nA,A,1\n").unwrap_err();
        assert_eq!(e.line, Some(2));
        let e = parse_results("winner,loser,count\nA,B,1\nA,B,-2\n").unwrap_err();
        assert_eq!(e.line, Some(3));
        let e = parse_results("winner,loser,count\nA,B,x\n").unwrap_err();
        assert_eq!(e.line, Some(2));
        let e = parse_results("winner,loser\nA\n").unwrap_err();
        assert_eq!(e.line, Some(2));
        assert!(parse_results("who,whom\nA,B\n").is_err());
    }

    #[test]
    fn matrix_csv() {
        let text = ",A,B,C,D,E\nA,0,1,1,1,0\nB,0,0,1,1,1\nC,0,0,0,1,1\nD,0,0,0,0,1\nE,1,0,0,0,0\n";
        let c = parse_matrix(text).unwrap();
        assert_eq!(c.wins().values, vec![3., 3., 2., 1., 1.]);
        assert_eq!(write_matrix_csv(&c), text);
        let zero = parse_matrix(",a,b\na,0,0\nb,0,0\n").unwrap();
        assert!(!zero.is_irreducible());
        assert!(parse_matrix(",a,b\na,1,0\nb,0,0\n").is_err());
        assert!(parse_matrix(",a,b\na,0,-1\nb,0,0\n").is_err());
        assert!(parse_matrix(",a,b\nb,0,1\na,1,0\n").is_err());
        assert!(parse_matrix(",a,b\na,0,1\n").is_err());
        assert!(parse_matrix(",a,b\na,0,1,2\nb,0,0\n").is_err());
    }

    #[test]
    fn races() {
        let (labels, races) =
            parse_races("race_id,competitor,rank\nr1,x,2\nr1,y,1\nr2,z,1\nr2,x,2\nr2,y,3\n")
                .unwrap();
        assert_eq!(labels, vec!["x", "y", "z"]);
        assert_eq!(races.len(), 2);
        assert_eq!(races[1].participants, vec![2, 0, 1]);
        assert!(parse_races("race_id,competitor,rank\nr1,x,1\nr1,y,1\n").is_err());
        assert!(parse_races("race_id,competitor,rank\nr1,x,1\n").is_err());
    }

    #[test]
    fn detects_format() {
        assert!(is_results_csv("\nWinner, Loser\nA,B\n"));
        assert!(!is_results_csv(",A,B\nA,0,1\nB,1,0\n"));
    }
}

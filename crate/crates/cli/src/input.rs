//! Matrix and chain files.

use std::fs;
use std::path::Path;

use idgauss::oracle::ChainSpec;
use idgauss::Matrix;

use crate::error::CliError;
use crate::Format;

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Format from the flag, else from the extension (`.json`), else CSV.
pub fn resolve_format(path: &Path, flag: Option<Format>) -> Format {
    flag.unwrap_or_else(|| match path.extension().and_then(|e| e.to_str()) {
        Some(e) if e.eq_ignore_ascii_case("json") => Format::Json,
        _ => Format::Csv,
    })
}

pub fn read_matrix(path: &Path, format: Option<Format>) -> Result<Matrix, CliError> {
    let text = read(path)?;
    match resolve_format(path, format) {
        Format::Csv => parse_csv(&text),
        Format::Json => parse_json(&text),
    }
}

/// `n` rows of `n` comma-separated decimals; `#` comments and blank lines
/// are skipped.
pub fn parse_csv(text: &str) -> Result<Matrix, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| CliError::Parse(e.to_string()))?;
        if record.iter().all(str::is_empty) {
            continue;
        }
        let line = record.position().map_or(0, |p| p.line());
        let row = record
            .iter()
            .enumerate()
            .map(|(k, field)| parse_field(field, line, k + 1))
            .collect::<Result<Vec<f64>, _>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(CliError::Parse("no rows".into()));
    }
    Ok(Matrix::from_rows(&rows)?)
}

fn parse_field(field: &str, line: u64, col: usize) -> Result<f64, CliError> {
    match field.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(CliError::Parse(format!(
            "line {line}, field {col}: {field:?} is not a number"
        ))),
    }
}

/// `{"n": …, "entries": [[…], …]}`.
pub fn parse_json(text: &str) -> Result<Matrix, CliError> {
    let m: Matrix = serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))?;
    if m.n() == 0 {
        return Err(CliError::Parse("empty matrix".into()));
    }
    Ok(m)
}

/// Chain file, or a decomposition report (which carries the same fields).
pub fn read_chain(path: &Path) -> Result<ChainSpec, CliError> {
    serde_json::from_str(&read(path)?).map_err(|e| CliError::Parse(format!("chain: {e}")))
}

pub fn parse_list(s: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(|x| {
            x.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Usage(format!("{x:?} is not a number")))
        })
        .collect()
}

/// `x1:s1,x2:s2,…`.
pub fn parse_points(s: &str) -> Result<Vec<(f64, f64)>, CliError> {
    s.split(',')
        .map(|p| {
            let (x, y) = p
                .split_once(':')
                .ok_or_else(|| CliError::Usage(format!("{p:?} is not of the form x:s")))?;
            let v = parse_list(&format!("{x},{y}"))?;
            Ok((v[0], v[1]))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_with_comments_and_blanks() {
        let m = parse_csv("# min kernel\n1, 1, 1\n\n1,2,2 # tail\n1,2,3e0\n").unwrap_err();
        assert!(matches!(m, CliError::Parse(_)));
        let m = parse_csv("# min kernel\n1, 1, 1\n\n1,2,2\n  \n1,2,3e0\n").unwrap();
        assert_eq!(
            m,
            Matrix::from_rows(&[[1., 1., 1.], [1., 2., 2.], [1., 2., 3.]]).unwrap()
        );
    }

    #[test]
    fn csv_not_square() {
        assert!(matches!(parse_csv("1,2\n3,4\n5,6\n"), Err(CliError::Parse(_))));
        assert!(matches!(parse_csv("1,2\n3\n"), Err(CliError::Parse(_))));
        assert!(matches!(parse_csv("1,x\n3,4\n"), Err(CliError::Parse(_))));
        assert!(matches!(parse_csv("1,nan\n3,4\n"), Err(CliError::Parse(_))));
    }

    #[test]
    fn json_matrix() {
        let m = parse_json(r#"{"n":2,"entries":[[2,1],[1,2]]}"#).unwrap();
        assert_eq!(m[(0, 1)], 1.0);
        assert!(parse_json(r#"{"n":3,"entries":[[2,1],[1,2]]}"#).is_err());
    }

    #[test]
    fn lists_and_points() {
        assert_eq!(parse_list("1, 2.5,3").unwrap(), vec![1.0, 2.5, 3.0]);
        assert_eq!(parse_points("1:2,3:4").unwrap(), vec![(1.0, 2.0), (3.0, 4.0)]);
        assert!(parse_points("1,2").is_err());
    }
}

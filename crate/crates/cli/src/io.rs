use std::fs;
use std::io::Write;
use std::path::Path;

use fracsob::{Grid, SampledFunction, Singular};
use serde::Serialize;

use crate::{Failure, UsageError};

/// Writes through a temporary sibling and renames it into place, so a
/// reader never sees a half-written file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    let io = |e: std::io::Error| Failure::Io(format!("{}: {e}", path.display()));
    let name = path.file_name().ok_or_else(|| Failure::Io(format!("{}: not a file path", path.display())))?;
    let tmp = path.with_file_name(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    let result = fs::File::create(&tmp)
        .and_then(|mut f| {
            f.write_all(bytes)?;
            f.sync_all()
        })
        .and_then(|_| fs::rename(&tmp, path));
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result.map_err(io)
}

pub fn json_bytes<T: Serialize>(value: &T) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(value).expect("reports serialize");
    out.push(b'\n');
    out
}

fn number(v: f64) -> String {
    if v.is_infinite() {
        // flagged endpoint
        "inf".to_string()
    } else {
        format!("{v:.16e}")
    }
}

/// `x,value` rows at 17 significant digits; a flagged node is written as
/// `inf` after a `# flagged` line.
pub fn csv_bytes(nodes: &[f64], values: &[f64], flagged: impl Fn(usize) -> bool) -> Vec<u8> {
    let mut out = String::from("x,value\n");
    for (j, (x, v)) in nodes.iter().zip(values).enumerate() {
        if flagged(j) {
            out.push_str("# flagged\n");
        }
        out.push_str(&number(*x));
        out.push(',');
        out.push_str(&number(if flagged(j) { f64::INFINITY } else { *v }));
        out.push('\n');
    }
    out.into_bytes()
}

/// Reads a uniform two-column CSV written by `compute` (or by hand).
pub fn read_csv(path: &Path) -> Result<SampledFunction, Failure> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    let bad = |msg: String| UsageError(format!("{}: {msg}", path.display()));
    let mut xs = Vec::new();
    let mut vs = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| bad(e.to_string()))?;
        if record.len() != 2 {
            return Err(bad(format!("row {} has {} columns, expected 2", i + 1, record.len())).into());
        }
        let parse = |s: &str| s.parse::<f64>().map_err(|_| bad(format!("row {}: `{s}` is not a number", i + 1)));
        xs.push(parse(&record[0])?);
        vs.push(parse(&record[1])?);
    }
    if xs.len() < 3 {
        return Err(bad("need at least three rows".into()).into());
    }
    let n = xs.len() - 1;
    let grid = Grid::new(xs[0], xs[n], n).map_err(|e| bad(e.to_string()))?;
    let h = grid.h();
    if xs.iter().enumerate().any(|(j, &x)| (x - grid.node(j)).abs() > 1e-9 * h.max(x.abs())) {
        return Err(bad("x column is not uniformly spaced".into()).into());
    }
    let singular = Singular {
        left: vs[0].is_infinite(),
        right: vs[n].is_infinite(),
    };
    SampledFunction::with_singular(grid, vs, singular).map_err(|e| bad(e.to_string()).into())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("u.csv");
        let grid = Grid::new(0.0, 1.0, 7).unwrap();
        let u = SampledFunction::from_fn(grid, |x| if x == 0.0 { f64::INFINITY } else { x.powf(-0.3) + 1.0 / 3.0 })
            .unwrap();
        let bytes = csv_bytes(&grid.nodes(), u.values(), |j| u.is_flagged(j));
        write_atomic(&path, &bytes).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("x,value\n# flagged\n"));
        let back = read_csv(&path).unwrap();
        assert_eq!(back.values(), u.values());
        assert_eq!(back.singular(), u.singular());
        assert_eq!(back.grid(), u.grid());
        // no temporaries left behind
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
    }

    #[test]
    fn rejects_irregular_csv() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        fs::write(&path, "x,value\n0,1\n0.3,1\n1,1\n").unwrap();
        assert!(matches!(read_csv(&path), Err(Failure::Usage(_))));
        fs::write(&path, "x,value\n0,1\n0.5,inf\n1,1\n").unwrap();
        assert!(read_csv(&path).is_err());
        assert!(matches!(read_csv(&dir.path().join("missing.csv")), Err(Failure::Io(_))));
    }
}

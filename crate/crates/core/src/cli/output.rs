use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use ndarray::Array2;
use serde_json::{Number, Value};

use crate::error::{Error, Result};
use crate::C64;

/// `x` as a JSON number with 17 significant digits; non-finite values
/// become `null`.
pub fn num(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    Value::Number(Number::from_str(&format!("{x:.16e}")).expect("formatted float is valid JSON"))
}

/// Rewrite every non-integer number in `v` with 17 significant digits.
pub fn normalize_floats(v: &mut Value) {
    match v {
        Value::Number(n) => {
            let text = n.to_string();
            if text.contains(['.', 'e', 'E']) {
                if let Some(x) = n.as_f64() {
                    *v = num(x);
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(normalize_floats),
        Value::Object(map) => map.values_mut().for_each(normalize_floats),
        _ => {}
    }
}

/// Serialize with normalized floats; `pretty` for human-facing reports.
pub fn to_json(value: impl serde::Serialize, pretty: bool) -> Result<String> {
    let mut v = serde_json::to_value(value)?;
    normalize_floats(&mut v);
    let mut text = if pretty { serde_json::to_string_pretty(&v)? } else { serde_json::to_string(&v)? };
    text.push('\n');
    Ok(text)
}

/// Write through a sibling temporary file and rename over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let name = path
        .file_name()
        .ok_or_else(|| Error::InvalidArgument(format!("output path {} has no file name", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp-{}", name.to_string_lossy(), std::process::id()));
    let result = (|| -> std::io::Result<()> {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result.map_err(|e| Error::InvalidArgument(format!("cannot write {}: {e}", path.display())))
}

/// `{"dims", "entries": [[re, im], ...]}` with entries in row-major order.
pub fn matrix_entries(m: &Array2<C64>) -> Value {
    Value::Array(m.iter().map(|z| Value::Array(vec![num(z.re), num(z.im)])).collect())
}

/// Read back the `entries` of a matrix document as a `dim × dim` matrix,
/// `dim` being the product of `dims`.
pub fn parse_matrix_json(text: &str) -> Result<(Vec<usize>, Array2<C64>)> {
    let v: Value = serde_json::from_str(text)?;
    let bad = |what: &str| Error::InvalidArgument(format!("matrix document: {what}"));
    let dims: Vec<usize> = v
        .get("dims")
        .and_then(Value::as_array)
        .ok_or_else(|| bad("missing dims"))?
        .iter()
        .map(|d| d.as_u64().map(|d| d as usize).ok_or_else(|| bad("dims must be integers")))
        .collect::<Result<_>>()?;
    let n: usize = dims.iter().product();
    let entries = v.get("entries").and_then(Value::as_array).ok_or_else(|| bad("missing entries"))?;
    if entries.len() != n * n {
        return Err(bad(&format!("expected {} entries, found {}", n * n, entries.len())));
    }
    let part = |x: &Value| x.as_f64().ok_or_else(|| bad("entries must be numbers"));
    let data = entries
        .iter()
        .map(|e| match e.as_array().map(Vec::as_slice) {
            Some([re, im]) => Ok(C64::new(part(re)?, part(im)?)),
            _ => Err(bad("entries must be [re, im] pairs")),
        })
        .collect::<Result<Vec<_>>>()?;
    let m = Array2::from_shape_vec((n, n), data).map_err(|e| bad(&e.to_string()))?;
    Ok((dims, m))
}

/// `dir/stem.{index}.ext` for the `index`-th sweep point.
pub fn indexed_path(path: &Path, index: usize) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match path.extension() {
        Some(ext) => format!("{stem}.{index}.{}", ext.to_string_lossy()),
        None => format!("{stem}.{index}"),
    };
    path.with_file_name(name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits() {
        assert_eq!(num(0.1).to_string(), "1.0000000000000001e-1");
        assert_eq!(num(f64::NAN), Value::Null);
        let bits = [0.1, 1.0 / 3.0, -2.5e-300, f64::MAX, 5e-324];
        for x in bits {
            assert_eq!(num(x).as_f64().unwrap().to_bits(), x.to_bits());
        }
    }

    #[test]
    fn integers_untouched() {
        let mut v = serde_json::json!({"n": 3, "x": [0.5, 2]});
        normalize_floats(&mut v);
        assert_eq!(v.to_string(), r#"{"n":3,"x":[5.0000000000000000e-1,2]}"#);
    }

    #[test]
    fn matrix_round_trip() {
        let m = Array2::from_shape_fn((6, 6), |(i, j)| C64::new((i as f64 + 0.1).ln(), (j as f64).sqrt() / 7.0));
        let doc = serde_json::json!({"dims": [2, 3], "entries": matrix_entries(&m)});
        let (dims, back) = parse_matrix_json(&doc.to_string()).unwrap();
        assert_eq!(dims, vec![2, 3]);
        assert!(m
            .iter()
            .zip(back.iter())
            .all(|(a, b)| a.re.to_bits() == b.re.to_bits() && a.im.to_bits() == b.im.to_bits()));
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("out.json");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(fs::read(&p).unwrap(), b"two");
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
        assert!(write_atomic(&dir.path().join("missing/out.json"), b"x").is_err());
    }

    #[test]
    fn sweep_paths() {
        assert_eq!(indexed_path(Path::new("runs/a.csv"), 3), PathBuf::from("runs/a.3.csv"));
        assert_eq!(indexed_path(Path::new("a"), 0), PathBuf::from("a.0"));
    }
}

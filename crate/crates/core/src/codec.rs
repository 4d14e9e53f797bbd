//! Text format for maps: one JSON object per map, NDJSON for streams.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::map::{CombinatorialMap, Profile};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct MapRecord {
    pub dart_count: usize,
    pub sigma: Vec<usize>,
    pub alpha: Vec<usize>,
    pub root: usize,
    pub holes: Vec<usize>,
    pub profile: Profile,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<u32>>,
}

impl MapRecord {
    pub fn from_map(m: &CombinatorialMap) -> Self {
        MapRecord {
            dart_count: m.dart_count(),
            sigma: m.sigma_slice().to_vec(),
            alpha: m.alpha_slice().to_vec(),
            root: m.root(),
            holes: m.holes().to_vec(),
            profile: m.profile(),
            labels: None,
        }
    }

    pub fn into_map(self) -> Result<CombinatorialMap> {
        if self.dart_count % 2 == 1 {
            return Err(crate::error::MapError::OddDartCount(self.dart_count).into());
        }
        if self.sigma.len() != self.dart_count {
            return Err(crate::error::MapError::Length {
                which: "sigma",
                len: self.sigma.len(),
                expected: self.dart_count,
            }
            .into());
        }
        Ok(CombinatorialMap::new(
            self.sigma,
            self.alpha,
            self.root,
            self.holes,
            self.profile,
        )?)
    }
}

pub fn to_json(m: &CombinatorialMap) -> String {
    serde_json::to_string(&MapRecord::from_map(m)).expect("map serializes")
}

pub fn to_json_labeled(m: &CombinatorialMap, labels: &[u32]) -> String {
    let mut r = MapRecord::from_map(m);
    r.labels = Some(labels.to_vec());
    serde_json::to_string(&r).expect("map serializes")
}

pub fn parse_record(text: &str) -> Result<MapRecord> {
    serde_json::from_str(text).map_err(|e| Error::Syntax(e.to_string()))
}

pub fn from_json(text: &str) -> Result<CombinatorialMap> {
    parse_record(text)?.into_map()
}

pub fn write_ndjson<W: Write>(mut w: W, maps: &[CombinatorialMap]) -> Result<()> {
    for m in maps {
        writeln!(w, "{}", to_json(m))?;
    }
    Ok(())
}

pub fn read_ndjson<R: BufRead>(r: R) -> Result<Vec<CombinatorialMap>> {
    let mut out = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let m = from_json(&line).map_err(|e| match e {
            Error::Syntax(s) => Error::Syntax(format!("line {}: {s}", i + 1)),
            other => other,
        })?;
        out.push(m);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::map::fixtures::*;

    const F2_GOLDEN: &str = r#"{"dart_count":8,"sigma":[1,2,3,0,5,6,7,4],"alpha":[4,5,6,7,0,1,2,3],"root":0,"holes":[],"profile":"quadrangulation"}"#;

    #[test]
    fn f2_golden() {
        assert_eq!(to_json(&f2()), F2_GOLDEN);
        let m = from_json(F2_GOLDEN).unwrap();
        assert_eq!(m.canonical_code(), f2().canonical_code());
    }

    #[test]
    fn odd_dart_count_rejected() {
        let text = r#"{"dart_count":3,"sigma":[0,1,2],"alpha":[1,0,2],"root":0,"holes":[],"profile":"general"}"#;
        assert!(from_json(text).is_err());
    }

    #[test]
    fn syntax_error() {
        assert!(matches!(from_json("{"), Err(Error::Syntax(_))));
        let bad_profile = F2_GOLDEN.replace("quadrangulation", "torus");
        assert!(matches!(from_json(&bad_profile), Err(Error::Syntax(_))));
    }

    #[test]
    fn ndjson_round_trip() {
        let maps = vec![f1(), f2(), f3()];
        let mut buf = Vec::new();
        write_ndjson(&mut buf, &maps).unwrap();
        let back = read_ndjson(&buf[..]).unwrap();
        assert_eq!(back, maps);
    }
}

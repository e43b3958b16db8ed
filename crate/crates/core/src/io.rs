//! Coefficient vectors as JSON: `{"modulus": "<p>", "coeffs": ["<c0>", ...]}`,
//! every number a decimal string, `coeffs[i]` the coefficient of index `i`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modfield::{FieldElement, Modulus};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoeffFile {
    pub modulus: String,
    pub coeffs: Vec<String>,
}

/// Parses a coefficient file, checking that its modulus is `md`'s and that
/// every coefficient is a canonical residue.
pub fn read_coeffs(md: &Modulus, text: &str) -> Result<Vec<FieldElement>> {
    let file: CoeffFile = serde_json::from_str(text).map_err(|e| Error::Parse(format!("invalid JSON: {e}")))?;
    let p: u64 = file
        .modulus
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("invalid modulus {:?}", file.modulus)))?;
    if p != md.p() {
        return Err(Error::Parse(format!("input modulus {p} differs from {}", md.p())));
    }
    file.coeffs
        .iter()
        .map(|s| {
            let v: u64 = s.trim().parse().map_err(|_| Error::Parse(format!("invalid coefficient {s:?}")))?;
            if v >= p {
                return Err(Error::Parse(format!("coefficient {v} is not reduced mod {p}")));
            }
            Ok(md.elem(v))
        })
        .collect()
}

/// Serialises a coefficient vector.
pub fn write_coeffs(md: &Modulus, coeffs: &[FieldElement]) -> String {
    let file = CoeffFile {
        modulus: md.p().to_string(),
        coeffs: coeffs.iter().map(|c| c.value().to_string()).collect(),
    };
    serde_json::to_string(&file).expect("plain strings serialise")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let md = Modulus::default();
        let v: Vec<FieldElement> = [0u64, 1, 2013265920, 12345].iter().map(|&x| md.elem(x)).collect();
        let text = write_coeffs(&md, &v);
        assert_eq!(text, r#"{"modulus":"2013265921","coeffs":["0","1","2013265920","12345"]}"#);
        assert_eq!(read_coeffs(&md, &text).unwrap(), v);
    }

    #[test]
    fn rejects_bad_input() {
        let md = Modulus::new(101).unwrap();
        assert!(read_coeffs(&md, r#"{"modulus":"103","coeffs":["1"]}"#).is_err());
        assert!(read_coeffs(&md, r#"{"modulus":"101","coeffs":["101"]}"#).is_err());
        assert!(read_coeffs(&md, r#"{"modulus":"101","coeffs":["x"]}"#).is_err());
        assert!(read_coeffs(&md, "[1,2]").is_err());
        assert_eq!(read_coeffs(&md, r#"{"modulus":"101","coeffs":[]}"#).unwrap(), vec![]);
    }
}

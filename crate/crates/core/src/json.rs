//! Serde schemas for the file formats the CLI exchanges: seeds (with
//! optional odd weights), boundary matrices, vertical systems, and hexagon
//! charts. SFRat values travel as their textual form.

use serde::{Deserialize, Serialize};

use crate::boundary::BoundaryMatrix;
use crate::fiber::VerticalSystem;
use crate::hexagon::FlagChart;
use crate::seed::{ASeed, ExchangeData, SeedError, XSeed};
use crate::sfrat::SFRat;
use crate::superseed::SuperSeed;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeedJson {
    pub n_mut: usize,
    pub n_frozen: usize,
    pub epsilon: Vec<Vec<i64>>,
    pub d: Vec<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<Vec<String>>,
    #[serde(rename = "W", default, skip_serializing_if = "Option::is_none")]
    pub w: Option<Vec<Vec<i64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quantum: Option<bool>,
}

impl SeedJson {
    pub fn exchange(&self) -> Result<ExchangeData, SeedError> {
        ExchangeData::new(self.n_mut, self.n_frozen, self.epsilon.clone(), self.d.clone())
    }

    pub fn x_seed(&self) -> Result<XSeed, String> {
        let exchange = self.exchange().map_err(|e| e.to_string())?;
        let x = match &self.x {
            Some(strings) => strings
                .iter()
                .map(|s| s.parse::<SFRat>())
                .collect::<Result<Vec<_>, _>>()?,
            None => return Ok(XSeed::initial(exchange)),
        };
        if x.len() != exchange.n_mut {
            return Err("x must list one entry per mutable index".into());
        }
        Ok(XSeed { exchange, x })
    }

    pub fn a_seed(&self) -> Result<ASeed, String> {
        let exchange = self.exchange().map_err(|e| e.to_string())?;
        let a = match &self.a {
            Some(strings) => strings
                .iter()
                .map(|s| s.parse::<SFRat>())
                .collect::<Result<Vec<_>, _>>()?,
            None => return Ok(ASeed::initial(exchange)),
        };
        if a.len() != exchange.n() {
            return Err("a must list one entry per index, frozen included".into());
        }
        Ok(ASeed { exchange, a })
    }

    pub fn super_seed(&self) -> Result<SuperSeed, String> {
        let exchange = self.exchange().map_err(|e| e.to_string())?;
        let w = self.w.clone().ok_or("seed file has no odd weight matrix W")?;
        for row in &w {
            if row.len() != exchange.n() {
                return Err("every W row needs one column per seed index".into());
            }
        }
        let mut s = SuperSeed::initial(exchange, w);
        if let Some(strings) = &self.x {
            let x = strings
                .iter()
                .map(|t| t.parse::<SFRat>())
                .collect::<Result<Vec<_>, _>>()?;
            if x.len() != s.exchange.n_mut {
                return Err("x must list one entry per mutable index".into());
            }
            s.x = x;
        }
        Ok(s)
    }

    pub fn from_x_seed(seed: &XSeed) -> Self {
        SeedJson {
            n_mut: seed.exchange.n_mut,
            n_frozen: seed.exchange.n_frozen,
            epsilon: seed.exchange.epsilon.clone(),
            d: seed.exchange.d.clone(),
            x: Some(seed.x.iter().map(|f| f.to_string()).collect()),
            a: None,
            w: None,
            mode: None,
            quantum: None,
        }
    }

    pub fn from_super_seed(seed: &SuperSeed, mode: &str) -> Self {
        SeedJson {
            n_mut: seed.exchange.n_mut,
            n_frozen: seed.exchange.n_frozen,
            epsilon: seed.exchange.epsilon.clone(),
            d: seed.exchange.d.clone(),
            x: Some(seed.x.iter().map(|f| f.to_string()).collect()),
            a: None,
            w: Some(seed.w.clone()),
            mode: Some(mode.to_string()),
            quantum: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundaryJson {
    pub r: usize,
    pub f: usize,
    pub entries: Vec<Vec<String>>,
}

impl BoundaryJson {
    pub fn matrix(&self) -> Result<BoundaryMatrix, String> {
        if self.entries.len() != self.r {
            return Err("entry rows must match r".into());
        }
        let entries = self
            .entries
            .iter()
            .map(|row| {
                if row.len() != self.f {
                    return Err("entry columns must match f".to_string());
                }
                row.iter().map(|s| s.parse::<SFRat>()).collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(BoundaryMatrix { r: self.r, f: self.f, entries, gauge_log: Vec::new() })
    }

    pub fn from_matrix(m: &BoundaryMatrix) -> Self {
        BoundaryJson {
            r: m.r,
            f: m.f,
            entries: m
                .entries
                .iter()
                .map(|row| row.iter().map(|f| f.to_string()).collect())
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerticalSystemJson {
    pub letters: Vec<String>,
    #[serde(default)]
    pub binomials: Vec<BinomialJson>,
    pub laurents: Vec<LaurentRelationJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BinomialJson {
    pub exponents: Vec<i64>,
    pub unit: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LaurentRelationJson {
    pub terms: Vec<LaurentTermJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LaurentTermJson {
    pub exponents: Vec<i64>,
    pub coeff: String,
}

impl VerticalSystemJson {
    pub fn system(&self) -> Result<VerticalSystem, String> {
        let m = self.letters.len();
        let binomials = self
            .binomials
            .iter()
            .map(|b| {
                if b.exponents.len() != m {
                    return Err("binomial exponent length mismatch".to_string());
                }
                Ok((b.exponents.clone(), b.unit.parse::<SFRat>()?))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let laurents = self
            .laurents
            .iter()
            .map(|rel| {
                let mut map = std::collections::BTreeMap::new();
                for t in &rel.terms {
                    if t.exponents.len() != m {
                        return Err("laurent exponent length mismatch".to_string());
                    }
                    map.insert(t.exponents.clone(), t.coeff.parse::<SFRat>()?);
                }
                Ok(map)
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(VerticalSystem { letters: self.letters.clone(), binomials, laurents })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChartJson {
    #[serde(default = "default_anchor")]
    pub anchor: usize,
    pub f_o: [f64; 3],
    pub f_e: [f64; 3],
}

fn default_anchor() -> usize {
    1
}

impl ChartJson {
    pub fn chart(&self) -> FlagChart {
        FlagChart { anchor: self.anchor, f_o: self.f_o, f_e: self.f_e }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PolygonJson {
    pub support: Vec<(i64, i64)>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_round_trip() {
        let text = r#"{
            "n_mut": 2, "n_frozen": 0,
            "epsilon": [[0, 1], [-1, 0]],
            "d": [1, 1],
            "x": ["x1", "x2"],
            "W": [[1, 0]],
            "mode": "consistent"
        }"#;
        let parsed: SeedJson = serde_json::from_str(text).unwrap();
        let s = parsed.super_seed().unwrap();
        assert_eq!(s.w, vec![vec![1, 0]]);
        let back = SeedJson::from_super_seed(&s, "consistent");
        let again: SeedJson =
            serde_json::from_str(&serde_json::to_string(&back).unwrap()).unwrap();
        assert_eq!(again.epsilon, parsed.epsilon);
        assert_eq!(again.w, parsed.w);
    }

    #[test]
    fn boundary_round_trip() {
        let text = r#"{"r": 2, "f": 3, "entries": [["1", "0", "g"], ["0", "1", "1 + g"]]}"#;
        let parsed: BoundaryJson = serde_json::from_str(text).unwrap();
        let m = parsed.matrix().unwrap();
        let back = BoundaryJson::from_matrix(&m);
        let m2 = back.matrix().unwrap();
        for i in 0..2 {
            for j in 0..3 {
                assert!(m.entries[i][j].equals(&m2.entries[i][j]));
            }
        }
    }

    #[test]
    fn vertical_system_parse() {
        let text = r#"{
            "letters": ["u1", "u2", "u3"],
            "binomials": [{"exponents": [1, -1, 0], "unit": "c"}],
            "laurents": [{"terms": [
                {"exponents": [0, 0, 0], "coeff": "1"},
                {"exponents": [1, 0, 0], "coeff": "1"},
                {"exponents": [0, 1, 0], "coeff": "1"},
                {"exponents": [0, 0, 1], "coeff": "1"}
            ]}]
        }"#;
        let parsed: VerticalSystemJson = serde_json::from_str(text).unwrap();
        let sys = parsed.system().unwrap();
        let curve = crate::fiber::eliminate(&sys).unwrap();
        assert_eq!(curve.newton.genus, 0);
    }
}

use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::coords::FaceCoord;
use super::domain::HexDomain;
use super::marked::MarkedDomain;
use crate::error::Result;

/// On-disk form of a (marked) domain: `{mesh, faces: [[q, r], ...], marks: [mid-edge ids]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DomainFile {
    pub mesh: f64,
    pub faces: Vec<[i32; 2]>,
    #[serde(default)]
    pub marks: Vec<usize>,
}

impl DomainFile {
    pub fn from_domain(domain: &HexDomain, marks: &[usize]) -> Self {
        Self {
            mesh: domain.mesh(),
            faces: domain.faces().iter().map(|f| [f.q, f.r]).collect(),
            marks: marks.to_vec(),
        }
    }

    pub fn from_marked(md: &MarkedDomain) -> Self {
        Self::from_domain(md.domain(), md.marks())
    }

    pub fn build_domain(&self) -> Result<HexDomain> {
        HexDomain::new(
            self.faces.iter().map(|&[q, r]| FaceCoord::new(q, r)),
            self.mesh,
        )
    }

    /// Builds the domain and validates `marks` as counterclockwise boundary marks.
    pub fn build_marked(&self) -> Result<MarkedDomain> {
        MarkedDomain::new(Arc::new(self.build_domain()?), self.marks.clone())
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string(self).expect("domain files always serialize");
        s.push('\n');
        s
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn canonical_bytes() {
        let d = HexDomain::new([FaceCoord::new(1, 0), FaceCoord::new(0, 0)], 0.5).unwrap();
        let file = DomainFile::from_domain(&d, &[0, 3]);
        assert_eq!(
            file.to_json(),
            "{\"mesh\":0.5,\"faces\":[[0,0],[1,0]],\"marks\":[0,3]}\n"
        );
    }

    proptest! {
        #[test]
        fn round_trip_is_byte_stable(len in 1usize..8, mesh in 0.001f64..10.0) {
            let faces: Vec<FaceCoord> = (0..len as i32).map(|q| FaceCoord::new(q, -q / 2)).collect();
            let Ok(d) = HexDomain::new(faces, mesh) else { return Ok(()); };
            let marks = vec![d.boundary_cycle()[0], d.boundary_cycle()[2]];
            let text = DomainFile::from_domain(&d, &marks).to_json();
            let again = DomainFile::from_json(&text).unwrap().build_marked().unwrap();
            prop_assert_eq!(DomainFile::from_marked(&again).to_json(), text);
        }
    }
}

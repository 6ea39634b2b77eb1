//! Every simply connected domain up to a face count, one per lattice-symmetry class.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::hexlattice::{FaceCoord, HexDomain};
use crate::rng::SampleRng;

type Shape = Vec<FaceCoord>;

fn normalize(mut s: Shape) -> Shape {
    let qmin = s.iter().map(|f| f.q).min().unwrap_or(0);
    let rmin = s.iter().map(|f| f.r).min().unwrap_or(0);
    for f in &mut s {
        *f = FaceCoord::new(f.q - qmin, f.r - rmin);
    }
    s.sort_unstable();
    s
}

/// Smallest normalized image under the 12 rotations and reflections.
pub fn canonical(faces: &[FaceCoord]) -> Vec<FaceCoord> {
    let mut best: Option<Shape> = None;
    let mut cur: Shape = faces.to_vec();
    for _ in 0..2 {
        for _ in 0..6 {
            cur = cur.iter().map(|f| f.rotate60()).collect();
            let n = normalize(cur.clone());
            if best.as_ref().map_or(true, |b| n < *b) {
                best = Some(n);
            }
        }
        cur = cur.iter().map(|f| f.reflect()).collect();
    }
    best.unwrap_or_default()
}

/// Connected face sets (holes allowed) of exactly `n` faces, up to symmetry.
fn connected_classes(n: usize) -> Vec<BTreeSet<Shape>> {
    let mut levels = vec![
        BTreeSet::new(),
        BTreeSet::from([vec![FaceCoord::new(0, 0)]]),
    ];
    for k in 2..=n {
        let mut next = BTreeSet::new();
        for s in &levels[k - 1] {
            for f in s {
                for g in f.neighbors() {
                    if s.contains(&g) {
                        continue;
                    }
                    let mut t = s.clone();
                    t.push(g);
                    next.insert(canonical(&t));
                }
            }
        }
        levels.push(next);
    }
    levels
}

/// The exact-suite corpus: simply connected domains with 1..=max_faces faces,
/// by increasing size, canonical order within a size.
pub fn corpus(max_faces: usize) -> Result<Vec<HexDomain>> {
    if max_faces > 24 {
        return Err(Error::TooLarge {
            faces: max_faces,
            cap: 24,
        });
    }
    let mut out = Vec::new();
    for level in connected_classes(max_faces).into_iter().skip(1) {
        for s in level {
            match HexDomain::new(s, 1.0) {
                Ok(d) => out.push(d),
                Err(Error::NotSimplyConnected { .. }) => {}
                Err(e) => return Err(e),
            }
        }
    }
    Ok(out)
}

/// A simply connected domain of `n` faces grown at random from one face.
pub fn random_domain(n: usize, seed: u64) -> Result<HexDomain> {
    let mut rng = SampleRng::new(seed, 0xd0, n as u64);
    loop {
        let mut faces = vec![FaceCoord::new(0, 0)];
        while faces.len() < n {
            let f = faces[(rng.next_u64() % faces.len() as u64) as usize];
            let g = f.neighbor((rng.next_u64() % 6) as usize);
            if !faces.contains(&g) {
                faces.push(g);
            }
        }
        match HexDomain::new(faces, 1.0) {
            Ok(d) => return Ok(d),
            Err(Error::NotSimplyConnected { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
}

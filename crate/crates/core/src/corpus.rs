//! Built-in test potentials: wells, bumps and random Hermitian matrices of
//! size one to three, all free of zero-energy resonances.

use serde::{Deserialize, Serialize};

use crate::field::{Box2d, Potential2dSpec};
use crate::potential::{Envelope, PotentialSpec, Smoothness};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusEntry {
    pub name: String,
    pub spec: PotentialSpec,
}

impl CorpusEntry {
    fn new(name: &str, spec: PotentialSpec) -> Self {
        Self {
            name: name.to_string(),
            spec,
        }
    }

    pub fn is_smooth(&self) -> bool {
        self.spec.smoothness() == Smoothness::Smooth
    }
}

pub fn corpus() -> Vec<CorpusEntry> {
    vec![
        CorpusEntry::new("square_well", PotentialSpec::square_well(4.0, 1.0)),
        CorpusEntry::new("shallow_well", PotentialSpec::square_well(0.5, 1.0)),
        CorpusEntry::new("bump", PotentialSpec::bump(4.0, 1.0)),
        CorpusEntry::new("gaussian", PotentialSpec::truncated_gaussian(3.0, 0.4, 1.5)),
        CorpusEntry::new("random_2x2", PotentialSpec::random_hermitian(2, 7, 3.0, Envelope::default())),
        CorpusEntry::new("random_2x2_b", PotentialSpec::random_hermitian(2, 19, 2.0, Envelope::default())),
        CorpusEntry::new("random_3x3", PotentialSpec::random_hermitian(3, 11, 3.0, Envelope::default())),
        CorpusEntry::new("well_x_identity3", PotentialSpec::square_well(4.0, 1.0).times_identity(3)),
        CorpusEntry::new("bump_x_identity3", PotentialSpec::bump(4.0, 1.0).times_identity(3)),
    ]
}

pub fn smooth_corpus() -> Vec<CorpusEntry> {
    corpus().into_iter().filter(CorpusEntry::is_smooth).collect()
}

/// Two non-positive scalar potentials in the plane with their Dirichlet boxes.
pub fn corpus_2d() -> Vec<(String, Potential2dSpec, Box2d)> {
    let separable = Potential2dSpec::separable(
        PotentialSpec::truncated_gaussian(3.0, 0.5, 1.5),
        PotentialSpec::bump(2.0, 1.2),
    );
    let bx = Box2d {
        x1: (-2.5, 2.5),
        x2: (-2.5, 2.5),
    };
    vec![
        ("separable".to_string(), separable, bx),
        ("gaussian_2d".to_string(), Potential2dSpec::gaussian(6.0, 0.7, 2.5), Box2d::square(4.0)),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::build_potential;
    use crate::scattering::resonance_screen;

    #[test]
    fn corpus_covers_sizes_and_passes_screen() {
        let c = corpus();
        for n in 1..=3 {
            assert!(c.iter().any(|e| e.spec.dim() == n));
        }
        assert!(smooth_corpus().len() >= 6);
        for e in &c {
            let v = build_potential(&e.spec).unwrap();
            resonance_screen(&v).unwrap_or_else(|err| panic!("{}: {err}", e.name));
        }
    }
}

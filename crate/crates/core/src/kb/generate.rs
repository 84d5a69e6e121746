use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::csv2rdf::{convert_default, PpgRecord};
use crate::rdf::vocab::{ppg, RDFS_CLASS, RDFS_LABEL, RDF_TYPE};
use crate::rdf::{Term, Triple, TripleStore};

use super::{load_sample_kb, KbError};

const SIDE_EFFECTS: &[&str] = &[
    "Nausea",
    "Dizziness",
    "Fatigue",
    "Cough",
    "Rash",
    "Diarrhea",
    "Constipation",
    "Insomnia",
    "Drowsiness",
    "Dry Mouth",
    "Bleeding",
    "Hypotension",
    "Edema",
    "Muscle Pain",
    "Weight Gain",
    "Blurred Vision",
];

fn iri(local: &str) -> Term {
    Term::iri(ppg(local)).expect("generated local names are valid")
}

fn push(store: &mut TripleStore, s: &Term, p: &str, o: Term) {
    store.insert(Triple::new(s.clone(), Term::Iri(p.to_string()), o).expect("generated triple is valid"));
}

/// Deterministic synthetic KB: `drugs` drugs with 1 to 3 side effects each,
/// `diseases` diseases treated by 1 to 3 drugs, one of which is recommended.
pub fn generate_kb(diseases: usize, drugs: usize, seed: u64) -> Result<TripleStore, KbError> {
    if diseases == 0 || drugs == 0 {
        return Err(KbError::InvalidArgument("disease and drug counts must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut store = TripleStore::new();
    let ty = RDF_TYPE;
    for class in ["Disease", "Drug", "SideEffect"] {
        push(&mut store, &iri(class), ty, Term::Iri(RDFS_CLASS.to_string()));
    }
    let effects: Vec<Term> = SIDE_EFFECTS
        .iter()
        .enumerate()
        .map(|(i, label)| {
            let se = iri(&format!("SideEffect_G{:03}", i + 1));
            push(&mut store, &se, ty, iri("SideEffect"));
            push(&mut store, &se, RDFS_LABEL, Term::string(*label));
            se
        })
        .collect();
    let drug_iris: Vec<Term> = (1..=drugs)
        .map(|i| {
            let d = iri(&format!("Drug_G{i:05}"));
            push(&mut store, &d, ty, iri("Drug"));
            push(&mut store, &d, RDFS_LABEL, Term::string(format!("Drug {i}")));
            let n = rng.gen_range(1..=3);
            for se in effects.choose_multiple(&mut rng, n) {
                push(&mut store, &d, &ppg("hasSideEffect"), se.clone());
            }
            d
        })
        .collect();
    for i in 1..=diseases {
        let d = iri(&format!("Disease_G{i:05}"));
        push(&mut store, &d, ty, iri("Disease"));
        push(&mut store, &d, RDFS_LABEL, Term::string(format!("Disease {i}")));
        let n = rng.gen_range(1..=3.min(drugs));
        let treated: Vec<&Term> = drug_iris.choose_multiple(&mut rng, n).collect();
        for drug in &treated {
            push(&mut store, &d, &ppg("treatedBy"), (*drug).clone());
        }
        let rec = treated.choose(&mut rng).expect("at least one treating drug");
        push(&mut store, &d, &ppg("recommendedMedication"), (*rec).clone());
    }
    Ok(store)
}

/// Patients, their PPG samples and the bundled KB in one store, for
/// benchmarking the built-in queries.
#[derive(Debug, Clone)]
pub struct ClinicalDataset {
    pub store: TripleStore,
    pub patients: usize,
    pub samples_per_patient: usize,
}

pub fn generate_clinical_dataset(patients: usize, samples_per_patient: usize, seed: u64) -> ClinicalDataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut store = load_sample_kb();
    let drugs: Vec<Term> = (1..=52).map(|i| iri(&format!("Drug_D{i:04}"))).collect();
    let conditions = ["Normal", "Hypertension", "Asthma", "Hypoxemia"];
    for p in 0..patients {
        let id = format!("P{p:05}");
        let patient = iri(&format!("Patient_{id}"));
        let hr: i64 = rng.gen_range(55..=150);
        push(&mut store, &patient, RDF_TYPE, iri("Patient"));
        push(&mut store, &patient, &ppg("hasHeartRate"), Term::integer(hr));
        let condition = if hr > 100 { "Tachycardia" } else { conditions[rng.gen_range(0..conditions.len())] };
        push(&mut store, &patient, &ppg("hasCondition"), Term::string(condition));
        let n = rng.gen_range(1..=2);
        for drug in drugs.choose_multiple(&mut rng, n) {
            push(&mut store, &patient, &ppg("takesMedication"), drug.clone());
        }
        let records: Vec<PpgRecord> = (0..samples_per_patient as i64)
            .map(|t| {
                let hr = rng.gen_range(55..=150) as f64;
                PpgRecord::new(t, hr, hr, rng.gen_range(10..=30) as f64, rng.gen_range(84..=100) as f64)
            })
            .collect();
        for t in convert_default(&records, &id).expect("generated records are complete") {
            store.insert(t);
        }
    }
    ClinicalDataset { store, patients, samples_per_patient }
}

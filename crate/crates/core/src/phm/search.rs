use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{build_matrix, CodeMatrix, EvaluationVector, PhmError};
use crate::ff::PrimeField;

/// A verified evaluation vector together with its matrix.
#[derive(Clone, Debug)]
pub struct VectorSearch {
    pub vector: EvaluationVector,
    pub matrix: CodeMatrix,
    /// Candidates examined, including the accepted one.
    pub tries: usize,
}

/// The identity vector `(0, …, r-1)`, then seeded random nonrepetitive vectors.
pub fn candidate_vectors(
    q: u64,
    r: usize,
    seed: u64,
) -> Result<impl Iterator<Item = EvaluationVector>, PhmError> {
    let field = PrimeField::new(q)?;
    if r as u64 > q {
        return Err(PhmError::InvalidParameters(format!(
            "no nonrepetitive vector of length {r} over GF({q})"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let identity = EvaluationVector::identity(field, r)?;
    let random = std::iter::repeat_with(move || {
        let entries: Vec<u64> = sample(&mut rng, q as usize, r)
            .into_iter()
            .map(|a| a as u64)
            .collect();
        EvaluationVector::new(field, &entries).expect("sampled entries are in range")
    });
    Ok(std::iter::once(identity).chain(random))
}

/// Returns the first candidate from [`candidate_vectors`] whose matrix is
/// strongly 3-perfect hashing, examining at most `max_tries` candidates.
pub fn find_good_vector(
    q: u64,
    k: usize,
    r: usize,
    seed: u64,
    max_tries: usize,
) -> Result<VectorSearch, PhmError> {
    if k < 2 || r <= k {
        return Err(PhmError::InvalidParameters(format!(
            "vector search needs r > k >= 2 (r={r}, k={k})"
        )));
    }
    for (i, vector) in candidate_vectors(q, r, seed)?.take(max_tries).enumerate() {
        let matrix = build_matrix(q, k, &vector)?;
        if matrix.is_strongly_3ph().holds() {
            return Ok(VectorSearch {
                vector,
                matrix,
                tries: i + 1,
            });
        }
    }
    Err(PhmError::SearchExhausted { tries: max_tries })
}

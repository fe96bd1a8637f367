use crate::netmodel::EdgeFragment;

/// Emission probabilities of a candidate set: each fragment's share of the
/// total candidate length. `None` when there are no candidates.
pub fn emission(candidates: &[EdgeFragment]) -> Option<Vec<f64>> {
    if candidates.is_empty() {
        return None;
    }
    let total: f64 = candidates.iter().map(EdgeFragment::length).sum();
    Some(candidates.iter().map(|f| f.length() / total).collect())
}

//! Majority votes.

/// Strict majority of true votes. An even split is false.
pub fn majority(votes: &[bool]) -> bool {
    2 * votes.iter().filter(|v| **v).count() > votes.len()
}

/// Fraction of true votes; 0 for an empty ballot.
pub fn vote_share(votes: &[bool]) -> f64 {
    if votes.is_empty() {
        return 0.0;
    }
    votes.iter().filter(|v| **v).count() as f64 / votes.len() as f64
}

/// Majority within each group, then majority over the group outcomes.
/// Returns the final decision and the per-group decisions.
pub fn nested_majority(groups: &[Vec<bool>]) -> (bool, Vec<bool>) {
    let inner: Vec<bool> = groups.iter().map(|g| majority(g)).collect();
    (majority(&inner), inner)
}

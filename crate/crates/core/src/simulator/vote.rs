//! Majority voting over replica outputs.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VoteResult<T> {
    /// Agreed value; `None` without quorum.
    pub output: Option<T>,
    /// Present replicas outside the winning group.
    pub minority: Vec<usize>,
    pub quorum_met: bool,
}

/// Smallest group size that forms a majority of `n`: `⌈(n+1)/2⌉`.
pub fn quorum(n: usize) -> usize {
    (n + 2) / 2
}

/// Groups present values by `same` against each group's lowest-index
/// member; the largest group wins, ties to the lowest index. Absent slots
/// neither vote nor count as minority.
pub fn vote_by<T: Clone>(values: &[Option<T>], same: impl Fn(&T, &T) -> bool, needed: usize) -> VoteResult<T> {
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (i, v) in values.iter().enumerate() {
        let Some(v) = v else { continue };
        match groups
            .iter_mut()
            .find(|g| values[g[0]].as_ref().is_some_and(|lead| same(lead, v)))
        {
            Some(g) => g.push(i),
            None => groups.push(vec![i]),
        }
    }
    let Some(win) = groups
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.len().cmp(&b.1.len()).then(b.0.cmp(&a.0)))
    else {
        return VoteResult {
            output: None,
            minority: Vec::new(),
            quorum_met: false,
        };
    };
    let winners = win.1;
    let quorum_met = winners.len() >= needed && needed > 0;
    let minority = values
        .iter()
        .enumerate()
        .filter(|(i, v)| v.is_some() && !winners.contains(i))
        .map(|(i, _)| i)
        .collect();
    VoteResult {
        output: if quorum_met { values[winners[0]].clone() } else { None },
        minority,
        quorum_met,
    }
}

/// Tolerance vote over real-valued outputs, quorum over all inputs.
pub fn majority_vote(values: &[f64], tolerance: f64) -> Result<VoteResult<f64>> {
    if values.is_empty() {
        return Err(Error::Internal("vote over no values".into()));
    }
    let slots: Vec<Option<f64>> = values.iter().copied().map(Some).collect();
    Ok(vote_by(&slots, |a, b| (a - b).abs() <= tolerance, quorum(values.len())))
}

/// Tolerance vote over replica slots, some of which may be silent. The
/// quorum counts every slot.
pub fn majority_vote_slots(values: &[Option<f64>], tolerance: f64) -> VoteResult<f64> {
    vote_by(values, |a, b| (a - b).abs() <= tolerance, quorum(values.len()))
}

/// Exact-equality vote over allocator outputs. Strict mode needs a majority
/// of all replicas; degraded mode a majority of those that answered.
pub fn vote_allocations<T: Clone + PartialEq>(outputs: &[Option<T>], degraded: bool) -> VoteResult<T> {
    let present = outputs.iter().filter(|o| o.is_some()).count();
    let needed = if degraded {
        quorum(present)
    } else {
        quorum(outputs.len())
    };
    vote_by(outputs, |a, b| a == b, if present == 0 { 0 } else { needed })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_of_three() {
        let r = majority_vote(&[1.0, 1.001, 5.0], 0.01).unwrap();
        assert_eq!(r.output, Some(1.0));
        assert_eq!(r.minority, vec![2]);
        assert!(r.quorum_met);
    }

    #[test]
    fn incoherent_values() {
        let r = majority_vote(&[1.0, 2.0, 3.0], 0.01).unwrap();
        assert_eq!(r.output, None);
        assert!(!r.quorum_met);
    }

    #[test]
    fn unanimous_and_single() {
        let r = majority_vote(&[7.0, 7.0, 7.0], 0.0).unwrap();
        assert_eq!((r.output, r.minority.len()), (Some(7.0), 0));
        let r = majority_vote(&[3.5], 0.0).unwrap();
        assert_eq!(r.output, Some(3.5));
        assert!(majority_vote(&[], 0.0).is_err());
    }

    #[test]
    fn allocation_votes() {
        let a = vec![1, 0, 1];
        let bad = vec![0, 0, 1];
        let r = vote_allocations(&[Some(a.clone()), Some(a.clone()), Some(a.clone())], false);
        assert_eq!(r.output, Some(a.clone()));
        let r = vote_allocations(&[Some(a.clone()), Some(bad), Some(a.clone())], false);
        assert_eq!((r.output, r.minority), (Some(a.clone()), vec![1]));
        let r = vote_allocations(&[None, Some(a.clone()), None], false);
        assert!(!r.quorum_met);
        let r = vote_allocations(&[None, Some(a.clone()), None], true);
        assert_eq!(r.output, Some(a));
        let r = vote_allocations::<Vec<i32>>(&[None, None, None], true);
        assert!(!r.quorum_met);
    }

    #[test]
    fn quorum_sizes() {
        assert_eq!((quorum(1), quorum(2), quorum(3), quorum(4), quorum(5)), (1, 2, 2, 3, 3));
    }
}

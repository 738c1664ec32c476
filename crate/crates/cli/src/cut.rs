//! Cut syntax: `A:BC` over party labels, or `0,1:2` over subsystem indices.

use pptmerge::{Bipartition, Party};

use crate::error::{CliError, CliResult};
use crate::statefile::{parse_index_list, Labels};

fn party(c: char) -> Option<Party> {
    match c {
        'A' => Some(Party::A),
        'B' => Some(Party::B),
        'C' => Some(Party::C),
        _ => None,
    }
}

fn is_label_side(side: &str) -> bool {
    !side.is_empty() && side.chars().all(|c| party(c).is_some())
}

pub fn parse_cut(spec: &str, n_subsystems: usize, labels: Option<&Labels>) -> CliResult<Bipartition> {
    let bad = |why: String| CliError::usage(format!("invalid cut {spec:?}: {why}"));
    let (left, right) = spec.split_once(':').ok_or_else(|| bad("expected LEFT:RIGHT".into()))?;
    let (left, right) = if is_label_side(left) && is_label_side(right) {
        let labels = labels.ok_or_else(|| bad("party labels used but the state has none".into()))?;
        let expand = |side: &str| -> Vec<usize> {
            side.chars()
                .filter_map(party)
                .flat_map(|p| labels.party(p).iter().copied())
                .collect()
        };
        (expand(left), expand(right))
    } else {
        (
            parse_index_list(left).map_err(bad)?,
            parse_index_list(right).map_err(bad)?,
        )
    };
    Bipartition::from_sides(&left, &right, n_subsystems).map_err(|e| bad(e.to_string()))
}

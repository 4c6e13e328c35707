//! User grouping schemes: how the user population is partitioned into
//! clusters based on uplink channel strength.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{ChannelRealization, SystemParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GroupingScheme {
    /// Large channel-strength difference inside each cluster: users sorted
    /// by descending uplink norm are dealt round-robin across clusters.
    Lcsd,
    /// Small channel-strength difference inside each cluster: contiguous
    /// blocks of the sorted order.
    Scsd,
    /// Uniformly random permutation, then contiguous blocks.
    Random(u64),
}

impl GroupingScheme {
    pub fn label(&self) -> &'static str {
        match self {
            Self::Lcsd => "lcsd",
            Self::Scsd => "scsd",
            Self::Random(_) => "random",
        }
    }
}

/// Cluster assignment: for every new cluster, the list of original user
/// coordinates `(cluster, member)`.
pub type ClusterAssignment = Vec<Vec<(usize, usize)>>;

/// Partitions the users into clusters of the given sizes.
///
/// Users are ranked by descending norm of their uplink (user to surface)
/// channel, ties broken by their original position.
pub fn group_users(
    chans: &ChannelRealization,
    scheme: &GroupingScheme,
    sizes: &[usize],
) -> Result<ClusterAssignment> {
    let ids: Vec<(usize, usize)> = chans
        .h
        .iter()
        .enumerate()
        .flat_map(|(k, row)| (0..row.len()).map(move |m| (k, m)))
        .collect();
    let total: usize = sizes.iter().sum();
    if total != ids.len() {
        return Err(Error::DimensionMismatch(format!(
            "cluster sizes sum to {total} but there are {} users",
            ids.len()
        )));
    }
    if sizes.iter().any(|&s| s == 0) {
        return Err(Error::InvalidParameter("empty cluster in grouping".into()));
    }

    let ordered: Vec<(usize, usize)> = match scheme {
        GroupingScheme::Lcsd | GroupingScheme::Scsd => {
            let mut with_norm: Vec<((usize, usize), f64)> = ids
                .iter()
                .map(|&(k, m)| ((k, m), chans.h[k][m].norm()))
                .collect();
            with_norm.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
            with_norm.into_iter().map(|(id, _)| id).collect()
        }
        GroupingScheme::Random(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let mut shuffled = ids.clone();
            // Fisher-Yates with the portable generator
            for i in (1..shuffled.len()).rev() {
                let j = (rng.gen::<u64>() % (i as u64 + 1)) as usize;
                shuffled.swap(i, j);
            }
            shuffled
        }
    };

    let k_total = sizes.len();
    let mut clusters: ClusterAssignment = vec![Vec::new(); k_total];
    match scheme {
        GroupingScheme::Lcsd => {
            // Round-robin deal, skipping clusters already at capacity.
            let mut target = 0usize;
            for id in ordered {
                while clusters[target].len() >= sizes[target] {
                    target = (target + 1) % k_total;
                }
                clusters[target].push(id);
                target = (target + 1) % k_total;
            }
        }
        GroupingScheme::Scsd | GroupingScheme::Random(_) => {
            let mut it = ordered.into_iter();
            for (k, &size) in sizes.iter().enumerate() {
                clusters[k] = it.by_ref().take(size).collect();
            }
        }
    }
    Ok(clusters)
}

/// Rebuilds the parameter set and the channel realization under a new
/// cluster assignment, moving each user's distances, exponents and
/// channel vectors with it.
pub fn regroup(
    params: &SystemParams,
    chans: &ChannelRealization,
    assignment: &ClusterAssignment,
) -> Result<(SystemParams, ChannelRealization)> {
    let sizes: Vec<usize> = assignment.iter().map(Vec::len).collect();
    if sizes.iter().sum::<usize>() != params.num_users() {
        return Err(Error::DimensionMismatch(
            "assignment does not cover the user population".into(),
        ));
    }
    let mut new_params = params.clone();
    new_params.clusters = sizes;
    new_params.d_user = assignment
        .iter()
        .map(|c| c.iter().map(|&(k, m)| params.d_user[k][m]).collect())
        .collect();
    new_params.alpha_user = assignment
        .iter()
        .map(|c| c.iter().map(|&(k, m)| params.alpha_user[k][m]).collect())
        .collect();
    new_params.validate()?;

    let mut new_chans = chans.clone();
    new_chans.g = assignment
        .iter()
        .map(|c| c.iter().map(|&(k, m)| chans.g[k][m].clone()).collect())
        .collect();
    new_chans.h = assignment
        .iter()
        .map(|c| c.iter().map(|&(k, m)| chans.h[k][m].clone()).collect())
        .collect();
    new_chans.check_dims(&new_params)?;
    Ok((new_params, new_chans))
}

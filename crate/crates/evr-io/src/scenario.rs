use crate::library::StationType;
use evr_model::VertexId;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::fmt;
use std::str::FromStr;

/// Fixed mixes of station types.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Scenario {
    /// Battery swapping everywhere.
    Bss,
    Mixed,
    Realistic,
}

impl Scenario {
    pub const ALL: [Scenario; 3] = [Scenario::Bss, Scenario::Mixed, Scenario::Realistic];

    /// Station types with their percentage shares.
    pub fn composition(self) -> &'static [(StationType, u32)] {
        use StationType::*;
        match self {
            Scenario::Bss => &[(Swap, 100)],
            Scenario::Mixed => &[(Kw11, 30), (Kw22, 30), (Kw44, 20), (Super, 10), (Swap, 10)],
            Scenario::Realistic => &[(Kw11, 50), (Kw22, 40), (Kw44, 10)],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Scenario::Bss => "bss",
            Scenario::Mixed => "mixed",
            Scenario::Realistic => "realistic",
        }
    }

    /// Number of stations of each type in the composition for `n` stations.
    pub fn counts(self, n: usize) -> Vec<(StationType, usize)> {
        let comp = self.composition();
        let shares: Vec<u32> = comp.iter().map(|c| c.1).collect();
        comp.iter()
            .map(|c| c.0)
            .zip(apportion(n, &shares))
            .collect()
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Scenario::ALL
            .into_iter()
            .find(|x| x.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown scenario {s:?} (expected bss, mixed or realistic)"))
    }
}

/// Splits `n` items by integer `weights` with the largest-remainder rule.
/// Equal remainders go to the earlier weight.
pub fn apportion(n: usize, weights: &[u32]) -> Vec<usize> {
    let total: u64 = weights.iter().map(|&w| w as u64).sum();
    if total == 0 {
        return vec![0; weights.len()];
    }
    let exact: Vec<(usize, u64)> = weights
        .iter()
        .map(|&w| {
            let q = n as u64 * w as u64;
            ((q / total) as usize, q % total)
        })
        .collect();
    let mut counts: Vec<usize> = exact.iter().map(|e| e.0).collect();
    let left = n - counts.iter().sum::<usize>();
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|&a, &b| exact[b].1.cmp(&exact[a].1).then(a.cmp(&b)));
    for &i in order.iter().take(left) {
        counts[i] += 1;
    }
    counts
}

/// Assigns station types to `vertices` in the scenario's proportions. The
/// counts are exact; which vertex gets which type depends only on `seed`.
pub fn assign_scenario(
    vertices: &[VertexId],
    scenario: Scenario,
    seed: u64,
) -> Vec<(VertexId, StationType)> {
    let mut types: Vec<StationType> = scenario
        .counts(vertices.len())
        .into_iter()
        .flat_map(|(t, c)| std::iter::repeat_n(t, c))
        .collect();
    types.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    vertices.iter().copied().zip(types).collect()
}

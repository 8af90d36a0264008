//! Candidate analysis, certificates, and replay.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::quotient::{build_cover, QuotientSpace};
use super::{
    enumerate_graphs, format_rational, induced_kernel_action, GogError, GraphOfGroups, QuotientMap,
    SearchConfig,
};
use crate::exact_linalg::{
    cokernel, extension_abelianization, phi_target, FinGenAbGroup, IntMatrix, LinalgError,
};
use crate::serde_int;

pub const CERTIFICATE_SCHEMA_VERSION: u32 = 1;

/// Conjugacy invariants compared against the target: characteristic polynomial, rank of the
/// fixed lattice, and coinvariants `coker(M − I)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ActionInvariants {
    #[serde(with = "serde_int::vec")]
    pub char_poly: Vec<BigInt>,
    pub fixed_rank: usize,
    pub coinvariants: FinGenAbGroup,
}

impl ActionInvariants {
    pub fn of(m: &IntMatrix) -> Result<Self, LinalgError> {
        let mmi = m.minus_identity()?;
        Ok(Self {
            char_poly: m.char_poly()?,
            fixed_rank: m.rows() - mmi.rank(),
            coinvariants: cokernel(&mmi),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Problem {
    pub rank: usize,
    pub quotient: u64,
    pub target: IntMatrix,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchBounds {
    pub max_edges: usize,
    pub max_vertices: usize,
    pub single_vertex_of_order_q: bool,
    pub tree_edges_trivial: bool,
}

impl SearchBounds {
    /// Each edge raises `−q·χ` by at least one, starting from at least `−q`.
    pub fn new(n: usize, q: u64, config: SearchConfig) -> Self {
        let max_edges = n - 1 + q as usize;
        Self {
            max_edges,
            max_vertices: max_edges + 1,
            single_vertex_of_order_q: config.single_vertex_of_order_q,
            tree_edges_trivial: config.tree_edges_trivial,
        }
    }

    pub fn config(&self) -> SearchConfig {
        SearchConfig {
            single_vertex_of_order_q: self.single_vertex_of_order_q,
            tree_edges_trivial: self.tree_edges_trivial,
        }
    }
}

/// What the target forces on any extension realising it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TargetProfile {
    pub invariants: ActionInvariants,
    /// Abelianisations of `Z^n`-by-`Z_q` extensions with the target monodromy, over every
    /// class `t^q = a` in the fixed lattice.
    pub allowed_abelianizations: Vec<FinGenAbGroup>,
}

impl TargetProfile {
    pub fn new(target: &IntMatrix, q: u64) -> Result<Self, GogError> {
        let n = target.rows();
        if !target.is_square() {
            return Err(GogError::Target(format!(
                "expected a square matrix, got {}x{}",
                n,
                target.cols()
            )));
        }
        if !target.pow(q)?.is_identity() {
            return Err(GogError::Target(format!(
                "target does not satisfy M^{q} = I"
            )));
        }
        let fixed = target.minus_identity()?.integer_kernel();
        let k = fixed.cols();
        let total = (q as usize)
            .checked_pow(k as u32)
            .ok_or_else(|| GogError::Target("fixed lattice too large to scan".into()))?;
        let groups: Result<BTreeSet<FinGenAbGroup>, LinalgError> = (0..total)
            .into_par_iter()
            .map(|mut idx| {
                let mut coeffs = vec![0i64; k];
                for c in coeffs.iter_mut() {
                    *c = (idx % q as usize) as i64;
                    idx /= q as usize;
                }
                let a: Vec<BigInt> = (0..n)
                    .map(|i| (0..k).map(|j| fixed.get(i, j) * coeffs[j]).sum::<BigInt>())
                    .collect();
                extension_abelianization(target, q, &a)
            })
            .collect();
        Ok(Self {
            invariants: ActionInvariants::of(target)?,
            allowed_abelianizations: groups?.into_iter().collect(),
        })
    }
}

/// Quotient maps sharing one set of action invariants.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionClass {
    pub invariants: ActionInvariants,
    pub maps: u64,
    pub first_map: QuotientMap,
    pub matches_target: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Filter {
    NoQuotient,
    Abelianization,
    InducedAction,
    Effectiveness,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateTrace {
    pub graph: GraphOfGroups,
    pub euler_char: String,
    pub abelianization: FinGenAbGroup,
    pub abelianization_allowed: bool,
    pub central_order: u64,
    pub effective: bool,
    pub quotient_maps: u64,
    pub action_classes: Vec<ActionClass>,
    pub rejected_by: Vec<Filter>,
    pub surviving_maps: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Survivor {
    pub candidate: usize,
    pub graph: GraphOfGroups,
    pub map: QuotientMap,
    pub invariants: ActionInvariants,
    pub maps: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    NonLifting,
    SurvivorsFound,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub schema_version: u32,
    pub problem: Problem,
    pub search: SearchBounds,
    pub target: TargetProfile,
    pub candidates: Vec<CandidateTrace>,
    pub survivors: Vec<Survivor>,
    pub verdict: Verdict,
}

impl Certificate {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("certificate serialisation");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, GogError> {
        serde_json::from_str(text).map_err(|e| GogError::Parse(e.to_string()))
    }

    pub fn candidate(&self, g: &GraphOfGroups) -> Option<&CandidateTrace> {
        self.candidates.iter().find(|c| &c.graph == g)
    }
}

/// Runs every filter on one graph without short-circuiting.
pub fn analyze_candidate(g: &GraphOfGroups, q: u64, target: &TargetProfile) -> CandidateTrace {
    let abelianization = g.abelianization();
    let abelianization_allowed = target.allowed_abelianizations.contains(&abelianization);
    let central_order = g.central_vertex_subgroup();
    let effective = central_order == 1;

    let space = QuotientSpace::new(g, q);
    let mut classes: BTreeMap<ActionInvariants, (u64, QuotientMap)> = BTreeMap::new();
    let mut cache: HashMap<Vec<i64>, ActionInvariants> = HashMap::new();
    let mut quotient_maps = 0u64;
    for stable in space.stable_assignments() {
        let surjective: Vec<usize> = space.surjective_with(&stable).collect();
        let Some(&first) = surjective.first() else {
            continue;
        };
        quotient_maps += surjective.len() as u64;
        let cover = build_cover(g, q, &space.edge_images(&stable));
        let (k, entries) = cover.homology_action_i64();
        let invariants = cache
            .entry(entries)
            .or_insert_with_key(|e| {
                let m = IntMatrix::from_i64(k, k, e).expect("square");
                ActionInvariants::of(&m).expect("square")
            })
            .clone();
        classes
            .entry(invariants)
            .or_insert_with(|| (0, space.map(first, &stable)))
            .0 += surjective.len() as u64;
    }

    let action_classes: Vec<ActionClass> = classes
        .into_iter()
        .map(|(invariants, (maps, first_map))| ActionClass {
            matches_target: invariants == target.invariants,
            invariants,
            maps,
            first_map,
        })
        .collect();
    let matching: u64 = action_classes
        .iter()
        .filter(|c| c.matches_target)
        .map(|c| c.maps)
        .sum();

    let mut rejected_by = Vec::new();
    if quotient_maps == 0 {
        rejected_by.push(Filter::NoQuotient);
    }
    if !abelianization_allowed {
        rejected_by.push(Filter::Abelianization);
    }
    if quotient_maps > 0 && matching == 0 {
        rejected_by.push(Filter::InducedAction);
    }
    if !effective {
        rejected_by.push(Filter::Effectiveness);
    }
    let surviving_maps = if rejected_by.is_empty() { matching } else { 0 };

    CandidateTrace {
        graph: g.clone(),
        euler_char: format_rational(&g.euler_char()),
        abelianization,
        abelianization_allowed,
        central_order,
        effective,
        quotient_maps,
        action_classes,
        rejected_by,
        surviving_maps,
    }
}

fn collect_survivors(candidates: &[CandidateTrace]) -> Vec<Survivor> {
    let mut out = Vec::new();
    for (i, c) in candidates.iter().enumerate() {
        if c.surviving_maps == 0 {
            continue;
        }
        for class in c.action_classes.iter().filter(|a| a.matches_target) {
            out.push(Survivor {
                candidate: i,
                graph: c.graph.clone(),
                map: class.first_map.clone(),
                invariants: class.invariants.clone(),
                maps: class.maps,
            });
        }
    }
    out
}

/// Enumerates every admissible graph of groups and records each filter outcome.
///
/// A survivor is a (graph, map) pair passing the abelianisation, induced-action and
/// effectiveness filters; the verdict is `NonLifting` exactly when none exist.
pub fn enumerate_candidates(
    n: usize,
    q: u64,
    target: &IntMatrix,
    config: SearchConfig,
) -> Result<Certificate, GogError> {
    if n == 0 || q == 0 {
        return Err(GogError::Target(
            "rank and quotient order must be positive".into(),
        ));
    }
    if target.rows() != n {
        return Err(GogError::Target(format!(
            "target has size {}, expected {n}",
            target.rows()
        )));
    }
    let profile = TargetProfile::new(target, q)?;
    let graphs = enumerate_graphs(n, q, config);
    let candidates: Vec<CandidateTrace> = graphs
        .par_iter()
        .map(|g| analyze_candidate(g, q, &profile))
        .collect();
    let survivors = collect_survivors(&candidates);
    let verdict = if survivors.is_empty() {
        Verdict::NonLifting
    } else {
        Verdict::SurvivorsFound
    };
    Ok(Certificate {
        schema_version: CERTIFICATE_SCHEMA_VERSION,
        problem: Problem {
            rank: n,
            quotient: q,
            target: target.clone(),
        },
        search: SearchBounds::new(n, q, config),
        target: profile,
        candidates,
        survivors,
        verdict,
    })
}

/// Exhaustive search for an order-6 lift of `φ ⊕ I_{n−2}`.
pub fn verify_phi_nonlift(n: usize, config: SearchConfig) -> Result<Certificate, GogError> {
    if n < 3 {
        return Err(GogError::Target(format!(
            "rank must be at least 3, got {n}"
        )));
    }
    enumerate_candidates(n, 6, &phi_target(n), config)
}

/// Re-derives every recorded outcome; returns the list of discrepancies (empty when clean).
pub fn replay(cert: &Certificate) -> Result<Vec<String>, GogError> {
    let mut issues = Vec::new();
    if cert.schema_version != CERTIFICATE_SCHEMA_VERSION {
        issues.push(format!(
            "schema version {} is not {}",
            cert.schema_version, CERTIFICATE_SCHEMA_VERSION
        ));
        return Ok(issues);
    }
    let Problem {
        rank: n,
        quotient: q,
        ref target,
    } = cert.problem;
    let config = cert.search.config();
    if cert.search != SearchBounds::new(n, q, config) {
        issues.push("search bounds do not follow from rank and quotient".into());
    }
    let profile = TargetProfile::new(target, q)?;
    if profile != cert.target {
        issues.push("target profile differs from recomputation".into());
    }

    let graphs = enumerate_graphs(n, q, config);
    let recorded: Vec<&GraphOfGroups> = cert.candidates.iter().map(|c| &c.graph).collect();
    if graphs.iter().collect::<Vec<_>>() != recorded {
        issues.push(format!(
            "candidate list differs from re-enumeration ({} recorded, {} found)",
            recorded.len(),
            graphs.len()
        ));
    }

    let per_candidate: Vec<Vec<String>> = cert
        .candidates
        .par_iter()
        .enumerate()
        .map(|(i, c)| check_candidate(i, c, q, &profile))
        .collect();
    issues.extend(per_candidate.into_iter().flatten());

    if collect_survivors(&cert.candidates) != cert.survivors {
        issues.push("survivor list does not match the candidate traces".into());
    }
    let verdict = if cert.survivors.is_empty() {
        Verdict::NonLifting
    } else {
        Verdict::SurvivorsFound
    };
    if verdict != cert.verdict {
        issues.push(format!(
            "verdict {:?} does not follow from the survivors",
            cert.verdict
        ));
    }
    Ok(issues)
}

fn check_candidate(i: usize, c: &CandidateTrace, q: u64, profile: &TargetProfile) -> Vec<String> {
    let mut issues = Vec::new();
    let fresh = analyze_candidate(&c.graph, q, profile);
    macro_rules! same {
        ($field:ident) => {
            if fresh.$field != c.$field {
                issues.push(format!(
                    "candidate {i} ({}): recorded {} differs from recomputation",
                    c.graph,
                    stringify!($field)
                ));
            }
        };
    }
    same!(euler_char);
    same!(abelianization);
    same!(abelianization_allowed);
    same!(central_order);
    same!(effective);
    same!(quotient_maps);
    same!(action_classes);
    same!(rejected_by);
    same!(surviving_maps);
    // Each class representative must be a valid map whose action has the recorded invariants.
    for class in &c.action_classes {
        let ok = induced_kernel_action(&c.graph, &class.first_map)
            .ok()
            .and_then(|m| ActionInvariants::of(&m).ok())
            .is_some_and(|inv| inv == class.invariants);
        if !ok {
            issues.push(format!(
                "candidate {i} ({}): representative {} does not reproduce its class",
                c.graph, class.first_map
            ));
        }
    }
    issues
}

#[cfg(test)]
mod tests {
    use super::*;

    fn four_forms(n: usize) -> Vec<FinGenAbGroup> {
        let mut v: Vec<FinGenAbGroup> = [1u64, 2, 3, 6]
            .iter()
            .map(|&m| FinGenAbGroup::from_invariant_factors(n - 2, &[m]).unwrap())
            .collect();
        v.sort();
        v
    }

    #[test]
    fn phi_profile_allows_exactly_four_forms() {
        for n in 3..=6 {
            let p = TargetProfile::new(&phi_target(n), 6).unwrap();
            assert_eq!(p.allowed_abelianizations, four_forms(n));
            assert_eq!(p.invariants.fixed_rank, n - 2);
            assert_eq!(p.invariants.coinvariants, FinGenAbGroup::free(n - 2));
        }
    }

    #[test]
    fn target_must_be_periodic() {
        let shear = IntMatrix::from_i64(2, 2, &[1, 1, 0, 1]).unwrap();
        assert!(TargetProfile::new(&shear, 6).is_err());
        assert!(verify_phi_nonlift(2, SearchConfig::pruned()).is_err());
    }

    #[test]
    fn rank_three_is_non_lifting_and_replays() {
        let cert = verify_phi_nonlift(3, SearchConfig::pruned()).unwrap();
        assert_eq!(cert.verdict, Verdict::NonLifting);
        assert!(cert.survivors.is_empty());
        assert!(replay(&cert).unwrap().is_empty());
        let back = Certificate::from_json(&cert.to_json()).unwrap();
        assert_eq!(back, cert);
    }

    #[test]
    fn tampering_is_detected() {
        let mut cert = verify_phi_nonlift(3, SearchConfig::pruned()).unwrap();
        cert.candidates[0].central_order += 1;
        let issues = replay(&cert).unwrap();
        assert!(
            issues.iter().any(|s| s.contains("central_order")),
            "{issues:?}"
        );

        let mut cert = verify_phi_nonlift(3, SearchConfig::pruned()).unwrap();
        cert.candidates.pop();
        assert!(!replay(&cert).unwrap().is_empty());

        let mut cert = verify_phi_nonlift(3, SearchConfig::pruned()).unwrap();
        cert.verdict = Verdict::SurvivorsFound;
        assert!(!replay(&cert).unwrap().is_empty());
    }

    #[test]
    fn liftable_permutation_has_survivors() {
        // Swapping two petals of a rose and fixing the third lifts; its quotient is an order-2
        // vertex with a trivial loop and an order-2 loop.
        let swap = IntMatrix::from_i64(3, 3, &[0, 1, 0, 1, 0, 0, 0, 0, 1]).unwrap();
        let cert = enumerate_candidates(3, 2, &swap, SearchConfig::exhaustive()).unwrap();
        assert_eq!(cert.verdict, Verdict::SurvivorsFound);
        let rose_quotient = GraphOfGroups::bouquet(2, &[(1, 1, 1), (2, 1, 1)]).unwrap();
        assert!(cert.survivors.iter().any(|s| s.graph == rose_quotient));
        assert!(replay(&cert).unwrap().is_empty());
    }
}

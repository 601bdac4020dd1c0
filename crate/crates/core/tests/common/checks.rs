//! Whole-criterion checks shared by the regular tests and the acceptance run.

use std::fmt::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use supplynet::metrics::{
    avg_shortest_path, clustering_coefficient, degree_assortativity, density, detect_communities,
    location_assortativity, modularity_of_partition, Partition, PathMode,
};
use supplynet::policy::{apply_policy, PolicyKind, SelectionStrategy};
use supplynet::scopes::builtin_scopes;

use super::*;

#[derive(Debug)]
pub struct Check {
    pub passed: bool,
    pub detail: String,
}

/// Library policies in mode=all against the literal transcriptions.
pub fn oracle_equivalence(nets: u64) -> Check {
    let mut mismatches = Vec::new();
    let (mut flags, mut added, mut removed) = (0, 0, 0);
    for seed in 0..nets {
        let case = random_case(seed);
        let (acting, risky) = random_scope_sets(seed, &case.countries);
        for scope in scopes_for(&acting, &risky) {
            let lib = apply_policy(&case.net, &scope, SelectionStrategy::All, seed).unwrap();
            let expected = match scope.policy {
                PolicyKind::CountryPlusOne => oracle_country_plus_one(&case.plain, &risky, &acting),
                PolicyKind::Friendshoring => oracle_friendshoring(&case.plain, &acting),
                PolicyKind::Reshoring => oracle_reshoring(&case.plain, &acting),
            };
            flags += expected.flagged.len();
            added += lib.added_edges.len();
            removed += lib.removed_edges.len();
            if plain_outcome(&lib) != expected {
                mismatches.push(format!("seed {seed} {}", scope.policy));
            }
        }
    }
    Check {
        passed: mismatches.is_empty(),
        detail: format!(
            "{nets} networks x 3 policies ({flags} flagged pairs, {added} added and {removed} removed edges), {} mismatches {:?}",
            mismatches.len(),
            mismatches
        ),
    }
}

/// Every metric against dense-matrix formulas; Louvain against the exhaustive optimum.
pub fn metric_bruteforce(graphs: usize) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut failures = Vec::new();
    let mut optimal = 0;
    let mut partitions_seen = 0;
    for g in 0..graphs {
        let n = rng.gen_range(2..=7);
        let (countries, edges) = random_connected(&mut rng, n);
        let net = small_net(&countries, &edges);
        let b = Brute::new(n, &countries, &edges);
        let tol = 1e-9;
        let mut fail = |what: &str| failures.push(format!("graph {g} (n={n}): {what}"));
        if !close(density(&net).unwrap(), b.density(), tol) {
            fail("density");
        }
        if !close_opt(degree_assortativity(&net), b.degree_assortativity(), tol) {
            fail("degree assortativity");
        }
        if !close_opt(
            location_assortativity(&net),
            b.location_assortativity(),
            tol,
        ) {
            fail("location assortativity");
        }
        if !close(clustering_coefficient(&net), b.clustering(), tol) {
            fail("clustering");
        }
        if !close(
            avg_shortest_path(&net, PathMode::Exact, 0).unwrap(),
            b.avg_shortest_path(),
            tol,
        ) {
            fail("avg shortest path");
        }
        let labels: Vec<usize> = (0..n).map(|_| rng.gen_range(0..3)).collect();
        let part = Partition::from_labels(&net, &labels);
        if !close(
            modularity_of_partition(&net, &part).unwrap(),
            b.modularity(&labels),
            tol,
        ) {
            fail("modularity_of_partition");
        }
        let (best, count) = b.best_modularity();
        partitions_seen = partitions_seen.max(count);
        let (_, q) = detect_communities(&net, g as u64);
        if q > best + tol {
            fail("louvain above optimum");
        }
        if close(q, best, tol) {
            optimal += 1;
        }
    }
    Check {
        passed: failures.is_empty(),
        detail: format!(
            "{graphs} graphs, {} failures {:?}; louvain optimal on {optimal}/{graphs} ({:.1}%), up to {partitions_seen} partitions per graph",
            failures.len(),
            failures.iter().take(5).collect::<Vec<_>>(),
            100.0 * optimal as f64 / graphs as f64
        ),
    }
}

/// Friendshoring flags are a subset of reshoring flags for the same acting set.
pub fn containment(nets_per_scope: u64) -> Check {
    let scopes = builtin_scopes();
    let mut violations = 0;
    let mut detail = String::new();
    let mut acting_sets: Vec<(String, Vec<String>)> = scopes
        .names()
        .map(|name| {
            let c = &scopes.clusters[name];
            (name.to_string(), c.countries.iter().cloned().collect())
        })
        .collect();
    acting_sets.push(("random".into(), Vec::new()));
    for (name, codes) in &acting_sets {
        let mut strict = 0;
        for seed in 0..nets_per_scope {
            let case = random_case(1_000 + seed);
            let acting = if codes.is_empty() {
                random_scope_sets(seed, &case.countries).0
            } else {
                codes.clone()
            };
            let [_, f, r] = scopes_for(&acting, &acting);
            let fo = apply_policy(&case.net, &f, SelectionStrategy::All, seed).unwrap();
            let ro = apply_policy(&case.net, &r, SelectionStrategy::All, seed).unwrap();
            if !fo.ns_products.is_subset(&ro.ns_products)
                || !fo.flagged_pairs.is_subset(&ro.flagged_pairs)
            {
                violations += 1;
            }
            if fo.ns_products.len() < ro.ns_products.len() {
                strict += 1;
            }
        }
        let _ = write!(detail, "{name}: {strict}/{nets_per_scope} strict; ");
    }
    Check {
        passed: violations == 0,
        detail: format!("{violations} violations; {detail}"),
    }
}

/// Postconditions, superset, portfolio conservation and idempotence over random cases.
pub fn invariant_cases(cases: u64) -> Check {
    let mut violations = Vec::new();
    for seed in 0..cases {
        if let Err(e) = invariant_case(seed) {
            violations.push(format!("seed {seed}: {e}"));
        }
    }
    Check {
        passed: violations.is_empty(),
        detail: format!(
            "{cases} cases x 3 policies x 2 modes, {} violations {:?}",
            violations.len(),
            violations.iter().take(5).collect::<Vec<_>>()
        ),
    }
}

pub fn invariant_case(seed: u64) -> Result<(), String> {
    let case = random_case(50_000 + seed);
    let (acting, risky) = random_scope_sets(seed, &case.countries);
    let k = 1 + (seed % 3) as usize;
    for scope in scopes_for(&acting, &risky) {
        for sel in [SelectionStrategy::All, SelectionStrategy::Sample { k }] {
            let o = apply_policy(&case.net, &scope, sel, seed).map_err(|e| e.to_string())?;
            check_invariants(&case.net, &scope, &o)
                .map_err(|e| format!("{} {sel:?}: {e}", scope.policy))?;
            if sel == SelectionStrategy::All {
                let again =
                    apply_policy(&o.network_after, &scope, sel, seed).map_err(|e| e.to_string())?;
                if edge_set(&again.network_after) != edge_set(&o.network_after)
                    || again.flagged_pairs != o.flagged_pairs
                {
                    return Err(format!("{} not idempotent", scope.policy));
                }
            }
        }
    }
    Ok(())
}

use std::path::Path;
use std::time::Duration;

use serde_json::json;
use shforge_core::algebraic::{construct_recursive, AlgebraicError, RecursionBudget};
use shforge_core::bounds::{
    certificate_check, lower_bound_density, to_f64, upper_bound_density, BoundsError, Rational,
};
use shforge_core::hypergraph::{Freeness, Hypergraph, HypergraphError, DEFAULT_NAIVE_BUDGET};
use shforge_core::lift::{construct_lifted, verify_lift, verify_packing, LiftError};
use shforge_core::oracle::{exact_max_edges, greedy_free_graph, OracleError, SearchConfig};
use shforge_core::phm::{
    build_matrix, find_good_vector, CodeMatrix, EvaluationVector, PhmError, Strong3ph,
    FULL_ENUMERATION_BUDGET,
};
use shforge_core::PrimeField;

use crate::manifest::{sidecar, Recorder};
use crate::{
    AlgebraicArgs, BoundsArgs, CertifyArgs, CliError, LiftArgs, MatrixArgs, OracleArgs,
    VerifyArgs, VerifyMatrixArgs,
};

impl From<HypergraphError> for CliError {
    fn from(e: HypergraphError) -> Self {
        match e {
            HypergraphError::BudgetExceeded { .. } => CliError::Budget(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<PhmError> for CliError {
    fn from(e: PhmError) -> Self {
        match e {
            PhmError::BudgetExceeded { .. } => CliError::Budget(e.to_string()),
            PhmError::SearchExhausted { .. } => CliError::Negative(e.to_string()),
            PhmError::Hypergraph(h) => h.into(),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<OracleError> for CliError {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::TooLarge { .. } | OracleError::BudgetExceeded { .. } => {
                CliError::Budget(e.to_string())
            }
            OracleError::Hypergraph(h) => h.into(),
            OracleError::InvalidParameters(_) => CliError::Usage(e.to_string()),
        }
    }
}

impl From<AlgebraicError> for CliError {
    fn from(e: AlgebraicError) -> Self {
        match e {
            AlgebraicError::Hypergraph(h) => h.into(),
            AlgebraicError::Phm(p) => p.into(),
            AlgebraicError::Oracle(o) => o.into(),
            AlgebraicError::InvalidParameters(_) => CliError::Usage(e.to_string()),
        }
    }
}

fn load_hg(rec: &mut Recorder, path: &Path) -> Result<Hypergraph, CliError> {
    let text = rec.read(path)?;
    Ok(Hypergraph::parse_hg(&text)?)
}

fn read_hg(path: &Path) -> Result<Hypergraph, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    Ok(Hypergraph::parse_hg(&text)?)
}

fn print_witness(h: &Hypergraph, verdict: &Freeness) {
    if let Some(w) = verdict.witness() {
        println!("VIOLATED edges {:?} span {} vertices", w.edge_indices, w.union_size);
        for &i in &w.edge_indices {
            println!("  {:?}", h.edge(i));
        }
    }
}

pub fn construct_algebraic(a: &AlgebraicArgs) -> Result<(), CliError> {
    let mut rec = Recorder::new(
        "construct-algebraic",
        json!({ "r": a.r, "k": a.k, "n": a.n, "max_tries": a.max_tries }),
        Some(a.seed),
    );
    let mut budget = RecursionBudget::new(a.r, a.seed);
    budget.max_vector_tries = a.max_tries;
    let (graph, report) = construct_recursive(a.r, a.k, a.n, &budget)?;
    rec.write(&a.out, &graph.to_hg_string())?;
    rec.write_json(&sidecar(&a.out, "report.json"), &report)?;
    rec.finish(&a.out)?;
    println!(
        "{} edges on {} vertices (target n^k/(r^k-r) = {}), verified: {}",
        graph.len(),
        a.n,
        report.target_count,
        report.verified
    );
    if report.verified {
        Ok(())
    } else {
        Err(CliError::Negative("construction failed verification".into()))
    }
}

pub fn construct_lift(a: &LiftArgs) -> Result<(), CliError> {
    let mut rec = Recorder::new(
        "construct-lift",
        json!({ "t": a.t, "n": a.n, "max_failures": a.max_failures }),
        Some(a.seed),
    );
    let seed_graph = load_hg(&mut rec, &a.seed_graph)?;
    let built = construct_lifted(&seed_graph, a.t, a.n, a.seed, a.max_failures).map_err(|e| match e {
        LiftError::Hypergraph(h) => h.into(),
        LiftError::Precondition { reason, witness } => {
            if let Some(w) = witness {
                for &i in &w.edge_indices {
                    println!("  {:?}", seed_graph.edge(i));
                }
            }
            CliError::Usage(reason)
        }
        other => CliError::Usage(other.to_string()),
    })?;
    let lift_check = verify_lift(&built.lifted, &built.template).map_err(|e| CliError::Usage(e.to_string()))?;
    let packing_ok = verify_packing(&built.plan, built.template.graph()).is_ok();
    let r1 = built.graph.r();
    let free = built.graph.is_free(3 * r1 - 4, 3)?.is_free();
    let almost_linear = built.graph.is_almost_linear();
    let dichotomy = built.copy_dichotomy_holds();

    rec.write(&a.out, &built.graph.to_hg_string())?;
    rec.write_json(&sidecar(&a.out, "plan.json"), &built.plan)?;
    rec.write_json(
        &sidecar(&a.out, "report.json"),
        &json!({
            "construction": built.report,
            "lift_check": lift_check,
            "packing_valid": packing_ok,
            "free": free,
            "almost_linear": almost_linear,
            "copy_dichotomy": dichotomy,
        }),
    )?;
    rec.finish(&a.out)?;
    println!(
        "{} copies of G_t (target {:.1}), {} edges, free: {free}, almost linear: {almost_linear}",
        built.report.copies, built.report.target_copies, built.report.edge_count
    );
    if lift_check.passed() && packing_ok && free && almost_linear && dichotomy {
        Ok(())
    } else {
        Err(CliError::Negative("lifted construction failed verification".into()))
    }
}

pub fn verify(a: &VerifyArgs, budget: Option<u128>) -> Result<(), CliError> {
    let h = read_hg(&a.path)?;
    let verdict = if a.naive {
        h.is_free_naive_with_budget(a.v, a.e, budget.unwrap_or(DEFAULT_NAIVE_BUDGET))?
    } else {
        h.is_free(a.v, a.e)?
    };
    if verdict.is_free() {
        println!("FREE");
        Ok(())
    } else {
        print_witness(&h, &verdict);
        Err(CliError::Negative(format!(
            "some {} edges span at most {} vertices",
            a.e, a.v
        )))
    }
}

pub fn certify(a: &CertifyArgs) -> Result<(), CliError> {
    let h = read_hg(&a.path)?;
    match certificate_check(&h, a.k) {
        Ok(cert) => {
            println!("{}", serde_json::to_string_pretty(&cert).expect("serializable"));
            Ok(())
        }
        Err(BoundsError::Invariant(msg)) => Err(CliError::Negative(msg)),
        Err(BoundsError::NotFree { witness, .. }) => {
            for &i in &witness.edge_indices {
                println!("  {:?}", h.edge(i));
            }
            Err(CliError::Usage(format!(
                "input is not free: edges {:?} span {} vertices",
                witness.edge_indices, witness.union_size
            )))
        }
        Err(e) => Err(CliError::Usage(e.to_string())),
    }
}

/// `"3..5"` or `"4"`, inclusive.
pub fn parse_range(s: &str) -> Result<(usize, usize), CliError> {
    let bad = || CliError::Usage(format!("bad range `{s}`"));
    let (lo, hi) = match s.split_once("..") {
        Some((lo, hi)) => (lo, hi.strip_prefix('=').unwrap_or(hi)),
        None => (s, s),
    };
    let lo: usize = lo.trim().parse().map_err(|_| bad())?;
    let hi: usize = hi.trim().parse().map_err(|_| bad())?;
    if lo > hi {
        return Err(bad());
    }
    Ok((lo, hi))
}

pub fn bounds(a: &BoundsArgs) -> Result<(), CliError> {
    let (r_lo, r_hi) = parse_range(&a.r)?;
    let (k_lo, k_hi) = parse_range(&a.k)?;
    println!("{:>3} {:>3} {:>14} {:>12} {:>14} {:>12}  lower<upper", "r", "k", "lower", "", "upper", "");
    for r in r_lo..=r_hi {
        for k in k_lo.max(2)..=k_hi.min(r.saturating_sub(1)) {
            let lo = lower_bound_density(r, k).map_err(|e| CliError::Usage(e.to_string()))?;
            let hi = upper_bound_density(r, k).map_err(|e| CliError::Usage(e.to_string()))?;
            let dec = |x: &Rational| format!("{:.6e}", to_f64(x));
            println!(
                "{r:>3} {k:>3} {:>14} {:>12} {:>14} {:>12}  {}",
                lo.to_string(),
                dec(&lo),
                hi.to_string(),
                dec(&hi),
                lo < hi
            );
        }
    }
    Ok(())
}

pub fn oracle(a: &OracleArgs) -> Result<(), CliError> {
    let mut cfg = SearchConfig::new(a.n, a.r, a.v, a.e)
        .with_time_budget(Duration::from_secs(a.time_limit));
    if let Some(p) = a.max_pair {
        cfg = cfg.with_max_pairwise_intersection(p);
    }
    if a.almost_linear {
        cfg = cfg.with_almost_linear();
    }
    if let Some(seed) = a.seed {
        cfg = cfg.with_seed(seed);
    }
    let family = if a.greedy {
        let h = greedy_free_graph(&cfg)?;
        println!("{}", h.len());
        h
    } else {
        let res = exact_max_edges(&cfg)?;
        println!("{}", res.value);
        eprintln!("{} nodes in {:?}", res.nodes, res.elapsed);
        res.witness
    };
    if let Some(out) = &a.out {
        std::fs::write(out, family.to_hg_string())
            .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", out.display())))?;
    }
    Ok(())
}

pub fn matrix(a: &MatrixArgs) -> Result<(), CliError> {
    let mut rec = Recorder::new(
        "matrix",
        json!({ "q": a.q, "k": a.k, "r": a.r, "vector": a.vector, "max_tries": a.max_tries }),
        a.seed,
    );
    let (m, tries) = match (&a.vector, a.seed) {
        (Some(points), _) => {
            let field = PrimeField::new(a.q).map_err(|e| CliError::Usage(e.to_string()))?;
            let vector = EvaluationVector::new(field, points)?;
            if vector.len() != a.r {
                return Err(CliError::Usage(format!(
                    "--vector has {} entries, --r is {}",
                    vector.len(),
                    a.r
                )));
            }
            (build_matrix(a.q, a.k, &vector)?, 0)
        }
        (None, Some(seed)) => {
            let found = find_good_vector(a.q, a.k, a.r, seed, a.max_tries)?;
            (found.matrix, found.tries)
        }
        (None, None) => return Err(CliError::Usage("need --vector or --seed".into())),
    };
    rec.write(&a.out, &m.to_phm_string())?;
    rec.write(&sidecar(&a.out, "hg"), &m.to_hypergraph()?.to_hg_string())?;
    rec.finish(&a.out)?;
    println!(
        "{} x {} matrix over GF({}), vector {:?}, tries {tries}",
        m.rows(),
        m.columns(),
        m.q(),
        m.vector().entries()
    );
    Ok(())
}

pub fn verify_matrix(a: &VerifyMatrixArgs, budget: Option<u128>) -> Result<(), CliError> {
    let text = std::fs::read_to_string(&a.path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", a.path.display())))?;
    let m = CodeMatrix::parse_phm(&text)?;
    let verdict = if a.full {
        m.is_strongly_3ph_full(budget.unwrap_or(FULL_ENUMERATION_BUDGET))?
    } else {
        m.is_strongly_3ph()
    };
    match verdict {
        Strong3ph::Holds => {
            println!("HOLDS");
            Ok(())
        }
        Strong3ph::Fails(report) => {
            println!(
                "FAILS columns {:?}: common rows {:?}, separating rows {:?}, need more than {}",
                report.triple, report.common, report.separating, report.threshold
            );
            Err(CliError::Negative("matrix is not strongly 3-perfect hashing".into()))
        }
    }
}

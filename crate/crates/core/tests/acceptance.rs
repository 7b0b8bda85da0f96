//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion
//! and exits nonzero when any fails.

use std::time::{Duration, Instant};

use num_complex::Complex64;
use rayon::ThreadPoolBuilder;
use resultant_forge_core::artifact::{generate_with, PipelineOptions};
use resultant_forge_core::bench::{instance_coeffs, stability_run, NormalSampler};
use resultant_forge_core::gep::gep_baseline;
use resultant_forge_core::oracle::{bkk_2d, match_roots, sylvester_roots, Matching};
use resultant_forge_core::solver::{eigensolve, fill, schur_reduce};
use resultant_forge_core::poly::Monomial;
use resultant_forge_core::solver::SolverTemplate;
use resultant_forge_core::template::{
    augment, build_matrix, check_conditions, finalize, multiplier_sets, reduce_columns, remove_excess_rows, search,
    CandidateBasis, Formulation,
};
use resultant_forge_core::verify::check_layout_blocks;
use resultant_forge_core::{fixtures, generate, solve, Error, PolySystem, SearchConfig, SolutionSet, TemplateFile};

type Outcome = Result<String, String>;

fn roots_of(s: &SolutionSet) -> Vec<Vec<Complex64>> {
    s.roots.iter().map(|r| r.x.clone()).collect()
}

fn support_bkk(sys: &PolySystem) -> i64 {
    bkk_2d(
        &sys.polys()[0].support().unwrap(),
        &sys.polys()[1].support().unwrap(),
    )
}

fn within(start: Instant, limit: Duration, what: &str) -> Result<(), String> {
    let took = start.elapsed();
    if took < limit {
        Ok(())
    } else {
        Err(format!("{what} took {took:.2?}, limit {limit:?}"))
    }
}

fn univariate() -> Outcome {
    let start = Instant::now();
    let file = generate(&fixtures::cubic(), &SearchConfig::default()).map_err(|e| e.to_string())?;
    let sol = solve(&file.template, &fixtures::CUBIC_COEFFS).map_err(|e| e.to_string())?;
    within(start, Duration::from_secs(1), "generate + solve")?;
    if file.template.eigen_size() != 3 {
        return Err(format!("eigenproblem size {}", file.template.eigen_size()));
    }
    let want: Vec<Vec<Complex64>> = [1.0, 2.0, 3.0].iter().map(|&r| vec![Complex64::new(r, 0.0)]).collect();
    let mt = match_roots(&roots_of(&sol), &want, 1e-4);
    if !mt.is_perfect() || mt.max_error() >= 1e-8 {
        return Err(format!("roots {:?}, max |Δ| {:.2e}", roots_of(&sol), mt.max_error()));
    }
    if sol.max_residual() >= 1e-10 {
        return Err(format!("residual {:.2e}", sol.max_residual()));
    }
    Ok(format!(
        "roots {{1,2,3}}, max |Δ| {:.1e}, residual {:.1e}, eig 3, {:.1?}",
        mt.max_error(),
        sol.max_residual(),
        start.elapsed()
    ))
}

fn s1_fixture() -> Outcome {
    let start = Instant::now();
    let sys = fixtures::s1();
    let file = generate(&sys, &SearchConfig::default()).map_err(|e| e.to_string())?;
    let sol = solve(&file.template, &fixtures::S1_COEFFS).map_err(|e| e.to_string())?;
    within(start, Duration::from_secs(5), "generate + solve")?;
    let polys = sys.instantiate(&fixtures::S1_COEFFS).unwrap();
    let oracle: Vec<Vec<Complex64>> = sylvester_roots(&polys[0], &polys[1])
        .map_err(|e| e.to_string())?
        .into_iter()
        .map(|z| z.to_vec())
        .collect();
    let mt = match_roots(&roots_of(&sol), &oracle, 1e-4);
    let bkk = support_bkk(&sys);
    if sol.roots.len() != 4 || bkk != 4 || !mt.is_perfect() || mt.max_error() >= 1e-6 {
        return Err(format!(
            "{} roots, bkk {bkk}, oracle {} roots, max |Δ| {:.2e}",
            sol.roots.len(),
            oracle.len(),
            mt.max_error()
        ));
    }
    Ok(format!(
        "4 roots = bkk 4, max |Δ| vs Sylvester {:.1e}, {}, {:.1?}",
        mt.max_error(),
        file.summary_line(),
        start.elapsed()
    ))
}

fn oracle_sweep() -> Outcome {
    let total = 12;
    let mut passed = 0;
    let mut log = Vec::new();
    for seed in 0..total {
        let (sys, coeffs) = fixtures::random_sparse_bivariate(seed);
        let bkk = support_bkk(&sys);
        let result = (|| -> Result<(usize, f64), String> {
            let file = generate(&sys, &SearchConfig::default()).map_err(|e| e.to_string())?;
            let sol = solve(&file.template, &coeffs).map_err(|e| e.to_string())?;
            let polys = sys.instantiate(&coeffs).unwrap();
            let oracle: Vec<Vec<Complex64>> = sylvester_roots(&polys[0], &polys[1])
                .map_err(|e| format!("oracle: {e}"))?
                .into_iter()
                .map(|z| z.to_vec())
                .collect();
            let mt = match_roots(&roots_of(&sol), &oracle, 1e-4);
            if !mt.is_perfect() || mt.max_error() >= 1e-6 {
                return Err(format!(
                    "{} vs {} roots, max |Δ| {:.2e}",
                    sol.roots.len(),
                    oracle.len(),
                    mt.max_error()
                ));
            }
            if sol.roots.len() as i64 != bkk {
                return Err(format!("{} roots, bkk {bkk}", sol.roots.len()));
            }
            Ok((sol.roots.len(), mt.max_error()))
        })();
        match result {
            Ok((count, err)) => {
                passed += 1;
                println!("    seed {seed:>2}: {count} roots = bkk, max |Δ| {err:.1e}");
            }
            Err(e) => {
                println!("    seed {seed:>2}: FAILED {e}");
                log.push(seed);
            }
        }
    }
    let msg = format!("{passed}/{total} systems agree with the oracle, failures at seeds {log:?}");
    if passed * 10 >= total * 9 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn stability() -> Outcome {
    let file = generate(&fixtures::s1(), &SearchConfig::default()).map_err(|e| e.to_string())?;
    let start = Instant::now();
    let rep = stability_run(&file.template, &NormalSampler, 5000, 0);
    within(start, Duration::from_secs(60), "5000 instances")?;
    let msg = format!(
        "mean log10 residual {:.2}, median {:.2}, fail {:.2}%, {:.1?}",
        rep.mean_log10_residual,
        rep.median_log10_residual,
        100.0 * rep.fail_fraction,
        start.elapsed()
    );
    if rep.mean_log10_residual <= -8.0 && rep.fail_fraction < 0.01 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn final_conditions(file: &TemplateFile) -> Result<(), String> {
    let cfg = &file.config;
    let cand = file.trace.replay(&file.unreduced).map_err(|e| e.to_string())?;
    let aug = augment(&file.template.system, file.template.hidden_var).map_err(|e| e.to_string())?;
    let mat = check_conditions(&cand, &aug, cfg).map_err(|e| e.to_string())?;
    if mat.n_rows() != mat.n_cols() {
        return Err(format!("{}×{} after squaring", mat.n_rows(), mat.n_cols()));
    }
    Ok(())
}

/// Roots with residual below 1e-6; spurious eigenvalues are not solutions.
fn genuine(s: &SolutionSet) -> Vec<Vec<Complex64>> {
    s.roots.iter().filter(|r| r.residual < 1e-6).map(|r| r.x.clone()).collect()
}

/// Smallest gap between two eigenvalues, relative to their size.
fn min_gap(s: &SolutionSet) -> f64 {
    let mut gap = f64::INFINITY;
    for (k, a) in s.roots.iter().enumerate() {
        for b in &s.roots[k + 1..] {
            gap = gap.min((a.lambda - b.lambda).norm() / (1.0 + a.lambda.norm()));
        }
    }
    gap
}

fn lambdas(s: &SolutionSet) -> Vec<Vec<Complex64>> {
    s.roots.iter().map(|r| vec![r.lambda]).collect()
}

/// Outcome of comparing two solves of the same instance.
enum Agreement {
    Roots(f64),
    /// Two eigenvalues nearly coincide; only `λ` is compared.
    Clustered { roots: f64, lambda: f64, gap: f64 },
    /// Both sides refuse the instance as ill-conditioned.
    Refused(String),
}

/// Largest matched distance relative to the size of the root.
fn relative_error(a: &[Vec<Complex64>], mt: &Matching) -> f64 {
    mt.pairs
        .iter()
        .map(|&(i, _, d)| d / (1.0 + a[i].iter().map(|z| z.norm()).fold(0.0, f64::max)))
        .fold(0.0, f64::max)
}

fn relative_match(a: &[Vec<Complex64>], b: &[Vec<Complex64>]) -> (bool, f64) {
    let mt = match_roots(a, b, f64::INFINITY);
    let rel = relative_error(a, &mt);
    (mt.is_perfect(), rel)
}

/// Compare `a` and `b` at relative 1e-8. With `strict` the roots must agree.
/// Otherwise a near-degenerate draw (two eigenvalues within relative 1e-4,
/// where the eigenvectors of the pair mix) is logged and only its
/// eigenvalues have to agree, at relative 1e-6.
fn compare(
    a: &SolutionSet,
    b: &SolutionSet,
    pick: fn(&SolutionSet) -> Vec<Vec<Complex64>>,
    strict: bool,
) -> Result<Agreement, String> {
    let (perfect, rel) = relative_match(&pick(a), &pick(b));
    if perfect && rel < 1e-8 {
        return Ok(Agreement::Roots(rel));
    }
    let gap = min_gap(a).min(min_gap(b));
    let (lperfect, lrel) = relative_match(&lambdas(a), &lambdas(b));
    if !strict && gap < 1e-4 && lperfect && lrel < 1e-6 {
        return Ok(Agreement::Clustered {
            roots: if perfect { rel } else { f64::INFINITY },
            lambda: lrel,
            gap,
        });
    }
    Err(format!(
        "{} vs {} roots, max relative |Δ| {rel:.2e}, eigenvalue gap {gap:.1e}, eigenvalue |Δ| {lrel:.2e}",
        pick(a).len(),
        pick(b).len(),
    ))
}

/// Tallies agreement over many instances and logs near-degenerate ones.
#[derive(Default)]
struct Tally {
    instances: usize,
    worst: f64,
    clustered: Vec<String>,
}

impl Tally {
    fn add(&mut self, label: &str, k: u64, a: Agreement) {
        self.instances += 1;
        match a {
            Agreement::Roots(e) => self.worst = self.worst.max(e),
            Agreement::Clustered { roots, lambda, gap } => {
                println!(
                    "    {label} instance {k}: eigenvalue gap {gap:.1e}, roots |Δ| {roots:.1e}, λ |Δ| {lambda:.1e} (near-degenerate)"
                );
                self.clustered.push(format!("{label}#{k}"));
            }
            Agreement::Refused(why) => {
                println!("    {label} instance {k}: both refuse, {why} (near-degenerate)");
                self.clustered.push(format!("{label}#{k}"));
            }
        }
    }

    fn finish(&self, what: &str) -> Outcome {
        let msg = format!(
            "{} instances, {what} max |Δ| {:.1e}, {} near-degenerate draws logged",
            self.instances,
            self.worst,
            self.clustered.len()
        );
        // near-degenerate draws must stay rare
        if self.clustered.len() * 50 > self.instances {
            Err(msg)
        } else {
            Ok(msg)
        }
    }
}

/// The searched basis grown by one step in every variable; column pruning
/// has something to remove there.
fn padded_templates(sys: &PolySystem, cfg: &SearchConfig) -> Result<Option<(SolverTemplate, SolverTemplate, usize)>, String> {
    let cand = search(sys, cfg).map_err(|e| e.to_string())?;
    let aug = augment(sys, cand.hidden_var).map_err(|e| e.to_string())?;
    let n = sys.n_vars();
    let mut basis = cand.basis.clone();
    for b in &cand.basis {
        for k in 0..n {
            basis.push(b.add(&Monomial::unit(n, k)));
        }
    }
    basis.sort();
    basis.dedup();
    let t = multiplier_sets(&basis, aug.supports());
    let padded = CandidateBasis::new(cand.hidden_var, basis, t, cand.formulation);
    if check_conditions(&padded, &aug, cfg).is_err() {
        return Ok(None);
    }
    let (pruned, _, trace) = reduce_columns(&padded, &aug, cfg).map_err(|e| e.to_string())?;
    let mut out = Vec::new();
    for c in [&padded, &pruned] {
        let (sq, _, _) = remove_excess_rows(c, &aug, cfg).map_err(|e| e.to_string())?;
        check_conditions(&sq, &aug, cfg).map_err(|e| e.to_string())?;
        out.push(finalize(&sq, &aug, cfg).map_err(|e| e.to_string())?);
    }
    let pruned_tpl = out.pop().unwrap();
    let full_tpl = out.pop().unwrap();
    Ok(Some((full_tpl, pruned_tpl, trace.removed_cols.len())))
}

fn reduction_safety() -> Outcome {
    let mut systems = vec![("cubic".to_string(), fixtures::cubic(), true), ("s1".to_string(), fixtures::s1(), true)];
    for seed in 0..4 {
        systems.push((format!("random{seed}"), fixtures::random_sparse_bivariate(seed).0, false));
    }
    let cfg = SearchConfig::default();
    let mut tally = Tally::default();
    let mut removed_cols = 0;
    for (name, sys, strict) in &systems {
        let full = generate_with(sys, &cfg, PipelineOptions { reduce_columns: false }).map_err(|e| e.to_string())?;
        let reduced = generate(sys, &cfg).map_err(|e| e.to_string())?;
        removed_cols += reduced.trace.removed_cols.len();
        for file in [&full, &reduced] {
            final_conditions(file).map_err(|e| format!("{name}: {e}"))?;
        }
        let mut pairs = vec![(format!("{name}"), full.template, reduced.template)];
        if let Some((a, b, cols)) = padded_templates(sys, &cfg).map_err(|e| format!("{name} padded: {e}"))? {
            removed_cols += cols;
            pairs.push((format!("{name}/padded"), a, b));
        }
        for (label, a_tpl, b_tpl) in &pairs {
            for k in 0..100 {
                let coeffs = instance_coeffs(&NormalSampler, sys.n_slots(), 7, k);
                let agreement = match (solve(a_tpl, &coeffs), solve(b_tpl, &coeffs)) {
                    (Ok(a), Ok(b)) => compare(&a, &b, genuine, *strict),
                    (Err(Error::IllConditioned { condition, .. }), Err(Error::IllConditioned { .. })) if !strict => {
                        Ok(Agreement::Refused(format!("condition {condition:.1e}")))
                    }
                    (a, b) => Err(format!(
                        "solver errors {:?} / {:?}",
                        a.err().map(|e| e.to_string()),
                        b.err().map(|e| e.to_string())
                    )),
                }
                .map_err(|e| format!("{label} instance {k}: {e}"))?;
                tally.add(label, k, agreement);
            }
        }
    }
    if removed_cols == 0 {
        return Err("column pruning never removed anything".into());
    }
    tally
        .finish("pre/post reduction roots")
        .map(|m| format!("{m}; {removed_cols} columns pruned; conditions hold on every final template"))
}

fn structure() -> Outcome {
    let mut systems = vec![fixtures::cubic(), fixtures::s1()];
    for seed in 0..10 {
        systems.push(fixtures::random_sparse_bivariate(seed).0);
    }
    let mut layouts = 0;
    let mut roots = 0;
    let mut worst: f64 = 0.0;
    for (idx, sys) in systems.iter().enumerate() {
        let file = generate(sys, &SearchConfig::default()).map_err(|e| e.to_string())?;
        let tpl = &file.template;
        let cand = file.trace.replay(&file.unreduced).map_err(|e| e.to_string())?;
        let aug = augment(sys, tpl.hidden_var).unwrap();
        for layout in std::iter::once(&tpl.primary).chain(&tpl.fallback) {
            let c = cand.with_formulation(layout.formulation);
            let mat = build_matrix(&c, &aug).map_err(|e| e.to_string())?;
            mat.check_block_structure(layout.formulation)
                .and_then(|_| check_layout_blocks(layout))
                .map_err(|e| format!("system {idx} {:?}: {e}", layout.formulation))?;
            layouts += 1;
            let single = if layout == &tpl.primary {
                tpl.clone()
            } else {
                tpl.with_fallback_as_primary().unwrap()
            };
            for k in 0..10 {
                let coeffs = instance_coeffs(&NormalSampler, sys.n_slots(), 11, k);
                let sol = solve(&single, &coeffs).map_err(|e| e.to_string())?;
                for r in &sol.roots {
                    let rel = r.eq12_residual / r.eq12_scale.max(1.0);
                    worst = worst.max(rel);
                    roots += 1;
                    if !(rel < 1e-8) {
                        return Err(format!(
                            "system {idx} {:?}: back-substitution residual {:.2e}",
                            layout.formulation, rel
                        ));
                    }
                }
            }
        }
    }
    Ok(format!(
        "{layouts} layouts with literal B21 = −I, B22 = 0 / A21 = I, A22 = 0; {roots} roots, back-substitution residual ≤ {worst:.1e}"
    ))
}

fn formulations() -> Outcome {
    let mut systems = vec![("cubic".to_string(), fixtures::cubic(), true), ("s1".to_string(), fixtures::s1(), true)];
    for seed in 0..5 {
        systems.push((format!("random{seed}"), fixtures::random_sparse_bivariate(seed).0, false));
    }
    let mut compared = Vec::new();
    let mut tally = Tally::default();
    let mut worst_mu: f64 = 0.0;
    for (name, sys, strict) in &systems {
        let file = generate(sys, &SearchConfig::default()).map_err(|e| e.to_string())?;
        let tpl = &file.template;
        let Some(alt) = tpl.with_fallback_as_primary() else {
            continue;
        };
        compared.push(name.clone());
        let (std_tpl, alt_tpl) = if tpl.formulation() == Formulation::Standard {
            (tpl.clone(), alt)
        } else {
            (alt, tpl.clone())
        };
        for k in 0..100 {
            let coeffs = instance_coeffs(&NormalSampler, sys.n_slots(), 13, k);
            let a = solve(&std_tpl, &coeffs).map_err(|e| format!("{name}: {e}"))?;
            let b = solve(&alt_tpl, &coeffs).map_err(|e| format!("{name}: {e}"))?;
            let agreement = compare(&a, &b, roots_of, *strict).map_err(|e| format!("{name} instance {k}: {e}"))?;
            let clustered = !matches!(agreement, Agreement::Roots(_));
            tally.add(name, k, agreement);
            // raw μ of the alternate eigenproblem against −1/λ of the standard one
            let blocks = fill(&alt_tpl, &alt_tpl.primary, &coeffs).map_err(|e| e.to_string())?;
            let x = schur_reduce(&blocks, f64::INFINITY).map_err(|e| e.to_string())?.x;
            let evd = x.eigen().map_err(|e| format!("{e:?}"))?;
            let mus: Vec<Vec<Complex64>> = (0..x.nrows())
                .map(|i| evd.S()[i])
                .filter(|mu: &Complex64| mu.norm() > 1e-12)
                .map(|mu| vec![mu])
                .collect();
            let std_blocks = fill(&std_tpl, &std_tpl.primary, &coeffs).map_err(|e| e.to_string())?;
            let y = schur_reduce(&std_blocks, f64::INFINITY).map_err(|e| e.to_string())?.x;
            let (pairs, _) = eigensolve(&y, Formulation::Standard).map_err(|e| e.to_string())?;
            let mapped: Vec<Vec<Complex64>> = pairs.iter().map(|p| vec![-p.lambda.inv()]).collect();
            let mt = match_roots(&mus, &mapped, f64::INFINITY);
            let rel = relative_error(&mus, &mt);
            if !clustered {
                worst_mu = worst_mu.max(rel);
            }
            let tol = if clustered { 1e-6 } else { 1e-8 };
            if !mt.is_perfect() || rel >= tol {
                return Err(format!("{name} instance {k}: μ vs −1/λ relative |Δ| {rel:.2e}"));
            }
        }
    }
    if !compared.iter().any(|n| n == "s1" || n == "cubic") {
        return Err("no fixture finalized in both formulations".into());
    }
    tally
        .finish("standard vs alternate roots")
        .map(|m| format!("{} ({m}); μ = −1/λ relative |Δ| ≤ {worst_mu:.1e}", compared.join(", ")))
}

fn baseline() -> Outcome {
    let sys = fixtures::s1();
    let cfg = SearchConfig::default();
    let file = generate(&sys, &cfg).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    let mut parasitic = 0;
    let mut canonical_parasitic = 0;
    for k in 0..=100u64 {
        let coeffs = if k == 0 {
            fixtures::S1_COEFFS.to_vec()
        } else {
            instance_coeffs(&NormalSampler, sys.n_slots(), 17, k)
        };
        let mine = solve(&file.template, &coeffs).map_err(|e| e.to_string())?;
        let g = gep_baseline(&sys, 1, &coeffs, &cfg).map_err(|e| e.to_string())?;
        let theirs: Vec<Vec<Complex64>> = g.roots.iter().map(|r| r.x.clone()).collect();
        let mt = match_roots(&roots_of(&mine), &theirs, 1e-4);
        worst = worst.max(mt.max_error());
        parasitic += g.parasitic();
        if k == 0 {
            canonical_parasitic = g.parasitic();
        }
        if !mt.is_perfect() || mt.max_error() >= 1e-8 {
            return Err(format!(
                "instance {k}: {} vs {} roots, max |Δ| {:.2e}",
                mine.roots.len(),
                theirs.len(),
                mt.max_error()
            ));
        }
    }
    Ok(format!(
        "101 instances, max |Δ| {worst:.1e}; hidden-variable pencil discards {canonical_parasitic} parasitic eigenvalues on the canonical instance ({parasitic} in total)"
    ))
}

fn determinism() -> Outcome {
    let mut systems = vec![fixtures::cubic(), fixtures::s1()];
    systems.push(fixtures::random_sparse_bivariate(4).0);
    let single = ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let many = ThreadPoolBuilder::new().num_threads(4).build().unwrap();
    for (idx, sys) in systems.iter().enumerate() {
        let cfg = SearchConfig::with_seed(42);
        let a = single.install(|| generate(sys, &cfg)).map_err(|e| e.to_string())?.to_json();
        let b = many.install(|| generate(sys, &cfg)).map_err(|e| e.to_string())?.to_json();
        if a != b {
            return Err(format!("system {idx}: template files differ"));
        }
    }
    let file = generate(&fixtures::s1(), &SearchConfig::default()).map_err(|e| e.to_string())?;
    let r1 = single.install(|| stability_run(&file.template, &NormalSampler, 500, 9)).to_json();
    let r2 = many.install(|| stability_run(&file.template, &NormalSampler, 500, 9)).to_json();
    if r1 != r2 {
        return Err("bench reports differ".into());
    }
    Ok(format!(
        "{} problems give byte-identical templates on 1 and 4 threads; bench reports identical",
        systems.len()
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("univariate end-to-end", univariate),
        ("bivariate fixture S1", s1_fixture),
        ("oracle sweep", oracle_sweep),
        ("stability harness", stability),
        ("reduction safety", reduction_safety),
        ("structural invariants", structure),
        ("formulation equivalence", formulations),
        ("baseline cross-check", baseline),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("PASS criterion {} {name}: {detail}", k + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {} {name}: {detail}", k + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use chsh_zn::bcs::{
    glued_e_observables, glued_magic_square, magic_square, nonrigidity_witness, perfect_conditions_residual,
    solution_group, solution_group_defects, solution_to_strategy, verify_operator_solution, BinaryLCS,
    OperatorSolution, SecondSquareMapping,
};
use chsh_zn::bias::{bias_row, bias_spectrum, bias_value, canonical_eigenvalue, eigenrelation_residual, write_bias_csv, DENSE_LIMIT};
use chsh_zn::checks::*;
use chsh_zn::game::{classical_value_with_budget, make_mod_n_game, ModNGameParams};
use chsh_zn::group::{enumerate_group, normal_form_enumerate, verify_presentation, MonomialUnitary, DEFAULT_CAP};
use chsh_zn::npa::{build_moment_problem, check_strategy_moments, to_sdpa, SdpaProblem};
use chsh_zn::numerics::{norm, SeededRng};
use chsh_zn::poly::apply_to_state;
use chsh_zn::psirep::check_induced;
use chsh_zn::sos::{
    annihilation_residuals, certificate_chsh, certificate_g3, derived_relations_g3, max_random_bias_eigenvalue,
    verify_sos_identity,
};
use chsh_zn::strategy::{
    canonical_strategy, canonical_value_formula, entropy_row, random_strategy, schmidt, strategy_value_direct,
    write_entropy_csv, Side,
};
use serde::Serialize;
use serde_json::json;

use crate::report::{CheckResult, RunReport};

/// Version of the CSV column layouts written by `strategy entropy` and `bias table`.
pub const CSV_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Arguments parsed but describe an impossible request.
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Run(String),
}

impl CliError {
    fn run(e: impl std::fmt::Display) -> Self {
        CliError::Run(e.to_string())
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn require_order(n: u32) -> Result<()> {
    if n < 2 {
        return Err(CliError::Usage(format!("--n must be at least 2, got {n}")));
    }
    Ok(())
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::Run(format!("cannot write {}: {e}", path.display())))
}

pub fn game_classical(n: u32, m1: u32, m2: u32, budget: u64) -> Result<RunReport> {
    require_order(n)?;
    let p = ModNGameParams::new(n, m1, m2).map_err(|e| CliError::Usage(e.to_string()))?;
    let mut r = RunReport::new("game classical");
    r.param("n", n).param("m1", m1).param("m2", m2).param("budget", budget);
    let cv = classical_value_with_budget(&make_mod_n_game(p).map_err(CliError::run)?, budget).map_err(CliError::run)?;
    // With m1 = m2 the two equations are consistent and the game is classically winnable.
    let expected = if m1 == m2 { 1.0 } else { 0.75 };
    r.push(CheckResult::within(CLASSICAL_VALUES, "classical_value", cv.value, expected, 0.0));
    r.data(json!({ "optimalPairs": cv.optimal_pairs.to_string() }));
    Ok(r)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ValueRoute {
    Direct,
    Bias,
    Both,
}

pub fn strategy_value(n: u32, via: ValueRoute) -> Result<RunReport> {
    require_order(n)?;
    let mut r = RunReport::new("strategy value");
    r.param("n", n).param("via", via);
    let p = ModNGameParams::chsh(n).map_err(CliError::run)?;
    let s = canonical_strategy(n).map_err(CliError::run)?;
    let formula = canonical_value_formula(n);
    let direct = || -> Result<f64> { strategy_value_direct(&make_mod_n_game(p).map_err(CliError::run)?, &s).map_err(CliError::run) };
    let biased = || bias_value(p, &s).map_err(CliError::run);
    match via {
        ValueRoute::Direct => r.push(CheckResult::within(QUANTUM_LOWER_BOUND, "value_direct", direct()?, formula, 1e-10)),
        ValueRoute::Bias => r.push(CheckResult::within(QUANTUM_LOWER_BOUND, "value_bias", biased()?, formula, 1e-10)),
        ValueRoute::Both => {
            let (d, b) = (direct()?, biased()?);
            r.push(CheckResult::within(QUANTUM_LOWER_BOUND, "value_direct", d, formula, 1e-10));
            r.push(CheckResult::within(VALUE_FORMULA_EQUIVALENCE, "value_bias", b, d, 1e-9));
        }
    }
    if let Some(&(_, reference)) = REFERENCE_VALUES.iter().find(|(m, _)| *m == n) {
        r.push(CheckResult::within(QUANTUM_LOWER_BOUND, "reference_value", formula, reference, 1e-6));
    }
    Ok(r)
}

pub fn strategy_entropy(n_min: u32, n_max: u32, out: Option<&Path>) -> Result<RunReport> {
    require_order(n_min)?;
    if n_max < n_min {
        return Err(CliError::Usage(format!("--n-max ({n_max}) is below --n-min ({n_min})")));
    }
    let mut r = RunReport::new("strategy entropy");
    r.param("n_min", n_min).param("n_max", n_max).param("out", out.map(|p| p.display().to_string()));
    let mut rows = Vec::new();
    for n in n_min..=n_max {
        let row = entropy_row(n).map_err(CliError::run)?;
        let s = canonical_strategy(n).map_err(CliError::run)?;
        let rank = schmidt(s.state(), s.dim_a(), s.dim_b()).map_err(CliError::run)?.rank;
        r.push(CheckResult::within(QUANTUM_LOWER_BOUND, format!("value_n{n}"), row.value, canonical_value_formula(n), 1e-10));
        r.push(CheckResult::within(ENTROPY, format!("schmidt_rank_n{n}"), rank as f64, n as f64, 0.0));
        if let Some(&(_, reference)) = REFERENCE_ENTROPY_RATIOS.iter().find(|(m, _)| *m == n) {
            r.push(CheckResult::within(ENTROPY, format!("entropy_ratio_n{n}"), row.entropy_ratio, reference, 1e-5));
        }
        rows.push(row);
    }
    match out {
        Some(path) => {
            let mut w = create(path)?;
            write_entropy_csv(&rows, &mut w).map_err(CliError::run)?;
            r.data(json!({ "csvSchemaVersion": CSV_SCHEMA_VERSION, "rows": rows.len() }));
        }
        None => r.data(json!({ "csvSchemaVersion": CSV_SCHEMA_VERSION, "rows": rows })),
    }
    Ok(r)
}

pub fn bias_spectrum_cmd(n: u32) -> Result<RunReport> {
    require_order(n)?;
    let mut r = RunReport::new("bias spectrum");
    r.param("n", n);
    let row = bias_row(n).map_err(CliError::run)?;
    let expected = canonical_eigenvalue(n);
    r.push(CheckResult::residual(BIAS_EIGEN_CLAIM, "eigenrelation_residual", eigenrelation_residual(n).map_err(CliError::run)?, 1e-9));
    r.push(CheckResult::within(BIAS_EIGEN_CLAIM, "top_eigenvalue", row.top_eigenvalue, expected, 1e-9));
    r.push(CheckResult::within(QUANTUM_LOWER_BOUND, "predicted_value", row.predicted_value, row.formula_value, 1e-9));
    let mut data = json!({ "method": row.method });
    if (n * n) as usize <= DENSE_LIMIT {
        let s = canonical_strategy(n).map_err(CliError::run)?;
        let spec = bias_spectrum(ModNGameParams::chsh(n).map_err(CliError::run)?, &s).map_err(CliError::run)?;
        r.push(CheckResult::within(BIAS_EIGEN_CLAIM, "top_multiplicity", spec.multiplicity as f64, 1.0, 0.0));
        if let Some(v) = &spec.top_eigenvector {
            let overlap = chsh_zn::numerics::inner(v, s.state()).norm();
            r.push(CheckResult::at_least(BIAS_EIGEN_CLAIM, "top_eigenvector_overlap", overlap, 1.0 - 1e-8));
        }
        data["multiplicity"] = json!(spec.multiplicity);
    }
    r.data(data);
    Ok(r)
}

pub fn bias_table(n_min: u32, n_max: u32, out: Option<&Path>) -> Result<RunReport> {
    require_order(n_min)?;
    if n_max < n_min {
        return Err(CliError::Usage(format!("--n-max ({n_max}) is below --n-min ({n_min})")));
    }
    let mut r = RunReport::new("bias table");
    r.param("n_min", n_min).param("n_max", n_max).param("out", out.map(|p| p.display().to_string()));
    let mut rows = Vec::new();
    for n in n_min..=n_max {
        let row = bias_row(n).map_err(CliError::run)?;
        r.push(CheckResult::within(BIAS_EIGEN_CLAIM, format!("top_eigenvalue_n{n}"), row.top_eigenvalue, canonical_eigenvalue(n), 1e-9));
        rows.push(row);
    }
    match out {
        Some(path) => {
            let mut w = create(path)?;
            write_bias_csv(&rows, &mut w).map_err(CliError::run)?;
            r.data(json!({ "csvSchemaVersion": CSV_SCHEMA_VERSION, "rows": rows.len() }));
        }
        None => r.data(json!({ "csvSchemaVersion": CSV_SCHEMA_VERSION, "rows": rows })),
    }
    Ok(r)
}

fn group_order(n: u32) -> usize {
    ((n * n) as usize) << (n - 1)
}

pub fn group_enumerate(n: u32, table_out: Option<&Path>, list_elements: bool) -> Result<RunReport> {
    require_order(n)?;
    let mut r = RunReport::new("group enumerate");
    r.param("n", n).param("table_out", table_out.map(|p| p.display().to_string()));
    let alice = enumerate_group(&MonomialUnitary::alice_generators(n), DEFAULT_CAP).map_err(CliError::run)?;
    let bob = enumerate_group(&MonomialUnitary::bob_generators(n), DEFAULT_CAP).map_err(CliError::run)?;
    let expected = group_order(n) as f64;
    r.push(CheckResult::within(GROUP_ORDERS, "alice_order", alice.size() as f64, expected, 0.0));
    r.push(CheckResult::within(GROUP_ORDERS, "bob_order", bob.size() as f64, expected, 0.0));
    let (pa, pb) = verify_presentation(n).map_err(CliError::run)?;
    r.push(CheckResult::holds(GROUP_ORDERS, "alice_presentation_exact", pa.passed()));
    r.push(CheckResult::holds(GROUP_ORDERS, "bob_presentation_exact", pb.passed()));
    if let Some(path) = table_out {
        let mut w = create(path)?;
        alice.write_table_csv(&mut w).map_err(CliError::run)?;
    }
    let histogram: std::collections::BTreeMap<String, usize> =
        alice.order_histogram().into_iter().map(|(k, v)| (k.to_string(), v)).collect();
    let mut data = json!({
        "centerSize": alice.center().len(),
        "elementOrders": histogram,
        "presentationFailures": { "alice": pa.failures, "bob": pb.failures },
    });
    if list_elements {
        data["elements"] = alice.to_json();
    }
    r.data(data);
    Ok(r)
}

pub fn group_normal_form(n: u32) -> Result<RunReport> {
    require_order(n)?;
    let mut r = RunReport::new("group normal-form");
    r.param("n", n);
    let nfs = normal_form_enumerate(n);
    let distinct = nfs.is_ok();
    r.push(CheckResult::holds(GROUP_ORDERS, "normal_forms_distinct", distinct));
    let nfs = nfs.unwrap_or_default();
    r.push(CheckResult::within(GROUP_ORDERS, "normal_form_count", nfs.len() as f64, group_order(n) as f64, 0.0));
    let cat = enumerate_group(&MonomialUnitary::alice_generators(n), DEFAULT_CAP).map_err(CliError::run)?;
    r.push(CheckResult::holds(GROUP_ORDERS, "normal_forms_in_group", nfs.iter().all(|(_, g)| cat.contains(g))));
    let stale = chsh_zn::psirep::normal_form_rewrites_agree(n).map_err(CliError::run)?;
    r.push(CheckResult::holds(PSI_REPRESENTATION, "signed_minimal_rewrites_agree", stale.is_empty()));
    if nfs.len() <= 256 {
        r.data(nfs.iter().map(|(nf, _)| nf.to_string()).collect::<Vec<_>>());
    }
    Ok(r)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Certificate {
    Chsh,
    G3,
}

pub fn sos_verify(cert: Certificate, trials: usize, seed: u64) -> Result<RunReport> {
    let mut r = RunReport::new("sos verify");
    r.param("cert", cert).param("trials", trials);
    r.seed = Some(seed);
    let (c, n, tol) = match cert {
        Certificate::Chsh => (certificate_chsh(), 2, 1e-9),
        Certificate::G3 => (certificate_g3(), 3, 1e-8),
    };
    let p = ModNGameParams::chsh(n).map_err(CliError::run)?;
    let bias = chsh_zn::bias::bias_polynomial(p).map_err(CliError::run)?;
    let v = verify_sos_identity(&c, &bias, trials, seed).map_err(CliError::run)?;
    r.push(CheckResult::residual(SOS_CERTIFICATES, "identity_residual", v.max_residual, tol));
    r.push(CheckResult::at_least(SOS_CERTIFICATES, "min_sos_eigenvalue", v.min_sos_eigenvalue, -1e-9));
    let s = canonical_strategy(n).map_err(CliError::run)?;
    for (name, res) in annihilation_residuals(&c, &s).map_err(CliError::run)? {
        r.push(CheckResult::residual(SOS_CERTIFICATES, format!("annihilation_{name}"), res, 1e-9));
    }
    if cert == Certificate::G3 {
        let top = max_random_bias_eigenvalue(p, trials, seed).map_err(CliError::run)?;
        r.push(CheckResult::at_most(SOS_CERTIFICATES, "max_sampled_bias_eigenvalue", top, c.lambda, 1e-7));
    }
    r.data(json!({ "lambda": c.lambda, "valueBound": c.value_bound(), "dims": v.dims }));
    Ok(r)
}

pub fn relations_check(n: u32, seed: u64) -> Result<RunReport> {
    if n != 3 {
        return Err(CliError::Usage(format!("relations are available for n = 3 only, got {n}")));
    }
    let mut r = RunReport::new("relations check");
    r.param("n", n);
    r.seed = Some(seed);
    let s = canonical_strategy(3).map_err(CliError::run)?;
    let mut rng = SeededRng::new(seed);
    let t = random_strategy(3, 3, 3, &mut rng).map_err(CliError::run)?;
    let (sa, ta) = (s.assignment(), t.assignment());
    let mut on_random: f64 = 0.0;
    for rel in derived_relations_g3() {
        let mut worst: f64 = 0.0;
        for p in &rel.polys {
            worst = worst.max(norm(&apply_to_state(p, &sa, s.state()).map_err(CliError::run)?));
            on_random = on_random.max(norm(&apply_to_state(p, &ta, t.state()).map_err(CliError::run)?));
        }
        r.push(CheckResult::residual(RELATION_SUITE, rel.name, worst, 1e-9));
    }
    r.push(CheckResult::at_least(RELATION_SUITE, "max_residual_random_strategy", on_random, 1e-2));
    Ok(r)
}

fn check_solution(r: &mut RunReport, label: &str, lcs: &BinaryLCS, sol: &OperatorSolution) -> Result<()> {
    let report = verify_operator_solution(lcs, sol, 1e-9).map_err(CliError::run)?;
    r.push(CheckResult::holds(GLUED_MAGIC_SQUARE, format!("{label}_operator_solution"), report.is_clean()));
    if !report.is_clean() {
        return Ok(());
    }
    let induced = solution_to_strategy(lcs, sol, 1e-9).map_err(CliError::run)?;
    r.push(CheckResult::within(GLUED_MAGIC_SQUARE, format!("{label}_value"), induced.value, 1.0, 1e-9));
    let pc = perfect_conditions_residual(lcs, &induced.strategy);
    r.push(CheckResult::residual(GLUED_MAGIC_SQUARE, format!("{label}_consistency"), pc.consistency, 1e-9));
    r.push(CheckResult::residual(GLUED_MAGIC_SQUARE, format!("{label}_constraint"), pc.constraint, 1e-9));
    let group = solution_group(lcs);
    let worst = solution_group_defects(&group, sol).into_iter().map(|(_, d)| d).fold(0.0, f64::max);
    r.push(CheckResult::residual(GLUED_MAGIC_SQUARE, format!("{label}_solution_group"), worst, 1e-9));
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BcsSystem {
    MagicSquare,
    Glued,
}

pub fn bcs(system: BcsSystem, check: bool, witness: bool, system_out: Option<&Path>) -> Result<RunReport> {
    let name = match system {
        BcsSystem::MagicSquare => "bcs magic-square",
        BcsSystem::Glued => "bcs glued",
    };
    let (check, witness) = if !check && !witness { (true, false) } else { (check, witness) };
    let mut r = RunReport::new(name);
    r.param("check", check).param("witness", witness);
    let lcs = match system {
        BcsSystem::MagicSquare => magic_square().0,
        BcsSystem::Glued => glued_magic_square().0,
    };
    if let Some(path) = system_out {
        std::fs::write(path, lcs.to_string()).map_err(|e| CliError::Run(format!("cannot write {}: {e}", path.display())))?;
    }
    if check {
        match system {
            BcsSystem::MagicSquare => {
                let (lcs, sol) = magic_square();
                check_solution(&mut r, "pauli", &lcs, &sol)?;
            }
            BcsSystem::Glued => {
                let (lcs, e, f) = glued_magic_square();
                check_solution(&mut r, "E", &lcs, &e)?;
                check_solution(&mut r, "F", &lcs, &f)?;
                let literal = OperatorSolution::new(glued_e_observables(SecondSquareMapping::Literal), 1e-12).map_err(CliError::run)?;
                let failures = verify_operator_solution(&lcs, &literal, 1e-9).map_err(CliError::run)?.failures();
                r.push(CheckResult::holds(
                    GLUED_MAGIC_SQUARE,
                    "literal_mapping_fails_glue",
                    failures.iter().any(|f| f.starts_with("constraint 6:")),
                ));
                r.data(json!({ "literalMappingFailures": failures }));
            }
        }
    }
    if witness {
        if system == BcsSystem::MagicSquare {
            return Err(CliError::Usage("--witness applies to the glued system only".into()));
        }
        let w = nonrigidity_witness();
        r.push(CheckResult::within(GLUED_MAGIC_SQUARE, "witness_inner_product_re", w.inner_product.re, 0.5, 1e-9));
        r.push(CheckResult::within(GLUED_MAGIC_SQUARE, "witness_inner_product_im", w.inner_product.im, 0.0, 1e-9));
        r.push(CheckResult::within(GLUED_MAGIC_SQUARE, "witness_trace_re", w.trace.re, 4.0, 1e-9));
        r.push(CheckResult::within(GLUED_MAGIC_SQUARE, "witness_trace_im", w.trace.im, 0.0, 1e-9));
        r.push(CheckResult::residual(GLUED_MAGIC_SQUARE, "witness_anticommutator_norm", w.anticommutator_norm, 1e-9));
    }
    Ok(r)
}

pub fn npa_export(n: u32, m1: u32, m2: u32, level: u32, out: &Path) -> Result<RunReport> {
    require_order(n)?;
    let p = ModNGameParams::new(n, m1, m2).map_err(|e| CliError::Usage(e.to_string()))?;
    if !(1..=2).contains(&level) {
        return Err(CliError::Usage(format!("--level must be 1 or 2, got {level}")));
    }
    let mut r = RunReport::new("npa export");
    r.param("n", n).param("m1", m1).param("m2", m2).param("level", level).param("out", out.display().to_string());
    let mp = build_moment_problem(p, level).map_err(CliError::run)?;
    let sdpa = to_sdpa(&mp);
    sdpa.write(out).map_err(CliError::run)?;
    let text = std::fs::read_to_string(out).map_err(|e| CliError::Run(format!("cannot read back {}: {e}", out.display())))?;
    let back = SdpaProblem::parse(&text).map_err(CliError::run)?;
    r.push(CheckResult::holds(NPA_STRUCTURE, "sdpa_round_trip", back == sdpa));
    let s = canonical_strategy(n).map_err(CliError::run)?;
    let feas = check_strategy_moments(&mp, &s).map_err(CliError::run)?;
    r.push(CheckResult::residual(NPA_STRUCTURE, "canonical_hermitian_defect", feas.hermitian_defect, 1e-8));
    r.push(CheckResult::at_least(NPA_STRUCTURE, "canonical_min_eigenvalue", feas.min_eigenvalue, -1e-8));
    r.push(CheckResult::residual(NPA_STRUCTURE, "canonical_identification_defect", feas.identification_defect, 1e-9));
    let bias = bias_value(p, &s).map_err(CliError::run)?;
    let nf = n as f64;
    r.push(CheckResult::within(NPA_STRUCTURE, "canonical_objective", feas.objective, 4.0 * nf * (bias - 1.0 / nf), 1e-9));
    r.data(json!({
        "words": mp.size(),
        "moments": mp.moment_count(),
        "variables": sdpa.variable_count(),
        "blockSize": sdpa.block_sizes[0],
    }));
    Ok(r)
}

pub fn psirep_check(n: u32) -> Result<RunReport> {
    require_order(n)?;
    let mut r = RunReport::new("psirep check");
    r.param("n", n);
    for (side, label) in [(Side::Alice, "alice"), (Side::Bob, "bob")] {
        let rep = check_induced(n, side).map_err(CliError::run)?;
        r.push(CheckResult::residual(PSI_REPRESENTATION, format!("{label}_residual"), rep.max_residual, 1e-9));
        r.push(CheckResult::within(PSI_REPRESENTATION, format!("{label}_pairs"), rep.pairs as f64, (group_order(n) * group_order(n)) as f64, 0.0));
    }
    Ok(r)
}

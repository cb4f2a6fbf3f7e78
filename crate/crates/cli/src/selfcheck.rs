use cantor_frame::frame::{
    assemble_kinf_truncated, assemble_km_closed, assemble_km_filtration, assemble_km_gram_oracle,
    compression_2x2, symmetric_closed_spectrum, truncation_error_bound, GRAM_ORACLE_MAX_DEPTH,
};
use cantor_frame::linalg::{embed, max_abs_diff, symmetric_norm};
use cantor_frame::moments::{moments_closed, moments_recursive, renormalization_residual_with, WeightSpec};
use cantor_frame::secular::{simplicity_report, solve_top_eigenvalue_with};
use cantor_frame::selfsim::{
    block_form_residual, cuntz_check, neumann_partial_sum, phi_apply_mat, psi_apply,
};
use cantor_frame::spectral::{eigh, limit_spectral_data};
use cantor_frame::word::{relation, Relation};
use cantor_frame::{BasisIndex, SymMatrix};
use num_rational::BigRational;

use crate::args::SelfcheckArgs;
use crate::commands::{check_truncation, parse_weight, MAX_FRAME_DEPTH};
use crate::error::{CliError, EXIT_INVARIANT};

struct Check {
    reference: &'static str,
    name: &'static str,
    pass: bool,
    detail: String,
}

fn check(reference: &'static str, name: &'static str, pass: bool, detail: String) -> Check {
    Check {
        reference,
        name,
        pass,
        detail,
    }
}

fn incomparable_violations(k: &SymMatrix) -> usize {
    let mut bad = 0;
    for j in 1..k.dim() {
        for i in 1..k.dim() {
            let (BasisIndex::Diff(u), BasisIndex::Diff(v)) =
                (BasisIndex::from_position(i), BasisIndex::from_position(j))
            else {
                unreachable!()
            };
            if relation(&u, &v) == Relation::Incomparable && k.get(i, j).to_bits() != 0 {
                bad += 1;
            }
        }
    }
    bad
}

fn moment_check(spec: &WeightSpec) -> Result<(bool, String), CliError> {
    if let Some(p) = spec.as_rational() {
        let seq = moments_recursive(p, 3)?;
        let (m1, m2, m3) = moments_closed(p)?;
        let ok = seq.values[1..] == [m1, m2, m3];
        return Ok((ok, format!("exact rational agreement at p = {p}: {ok}")));
    }
    let p = spec.to_f64();
    let seq = moments_recursive(&p, 3)?;
    let (m1, m2, m3) = moments_closed(&p)?;
    let err = seq.values[1..]
        .iter()
        .zip([m1, m2, m3])
        .fold(0.0f64, |acc, (g, w)| acc.max((g - w).abs() / w));
    Ok((err <= 1e-12, format!("relative error {err:.1e}")))
}

fn run_checks(args: &SelfcheckArgs) -> Result<Vec<Check>, CliError> {
    let spec = parse_weight(&args.p)?;
    let p = spec.to_f64();
    let m = args.m;
    if !(1..=MAX_FRAME_DEPTH - 2).contains(&m) {
        return Err(CliError::size(format!(
            "selfcheck needs 1 <= --m <= {}",
            MAX_FRAME_DEPTH - 2
        )));
    }
    check_truncation(p, args.big_m)?;
    let alpha = p.max(1.0 - p);
    let mut out = Vec::new();

    let km = assemble_km_closed(p, m)?;
    let bad = incomparable_violations(&km);
    out.push(check("Thm 4.1(5)", "tree sparsity of K_m", bad == 0, format!("{bad} nonzero incomparable entries")));

    let sym = assemble_km_closed(0.5, m)?;
    let off = (0..sym.dim())
        .flat_map(|i| (0..sym.dim()).map(move |j| (i, j)))
        .filter(|(i, j)| i != j)
        .fold(0.0f64, |acc, (i, j)| acc.max(sym.get(i, j).abs()));
    out.push(check("Thm 4.1", "diagonal at p = 1/2", off == 0.0, format!("max off-diagonal {off:e}")));

    let gram = assemble_km_gram_oracle(p, m.min(GRAM_ORACLE_MAX_DEPTH))?;
    let closed_g = assemble_km_closed(p, m.min(GRAM_ORACLE_MAX_DEPTH))?;
    let d = max_abs_diff(gram.entries(), closed_g.entries());
    out.push(check("Cor 4.5", "closed form = Gram oracle", d <= 1e-10, format!("max difference {d:.1e}")));

    let mut filt = assemble_km_filtration(p, m)?.into_entries();
    if args.perturb {
        filt[(0, 0)] += 1e-6;
    }
    let d = max_abs_diff(filt.as_ref(), km.entries());
    out.push(check("Prop 4.3", "closed form = filtration sum", d <= 1e-10, format!("max difference {d:.1e}")));

    let sd = eigh(&sym)?;
    let mut got = sd.clusters();
    got.reverse();
    let mut want = symmetric_closed_spectrum(m);
    want.sort_by(|a, b| b.value.total_cmp(&a.value));
    let ok = got.len() == want.len()
        && got
            .iter()
            .zip(&want)
            .all(|(g, w)| (g.value - w.value).abs() <= 1e-10 && g.multiplicity == w.multiplicity);
    out.push(check("Cor 3.5", "spectrum at p = 1/2", ok, format!("{} eigenvalue groups", got.len())));

    let tau = truncation_error_bound(p, m)?;
    let mut worst = 0.0f64;
    for k in 1..=2 {
        let deep = assemble_km_closed(p, m + k)?;
        let diff = deep.entries().to_owned() - embed(km.entries(), deep.dim());
        worst = worst.max(symmetric_norm(diff.as_ref())?);
    }
    out.push(check("Prop 5.1", "tail bound on K_(m+k) - K_m", worst <= tau, format!("{worst:.3e} <= {tau:.3e}")));

    let kinf = assemble_kinf_truncated(p, m)?;
    let bad = incomparable_violations(&kinf);
    out.push(check("Prop 5.2(2)", "tree sparsity of the limit", bad == 0, format!("{bad} nonzero incomparable entries")));

    let c = cuntz_check(p, m)?;
    let iso = c.isometry_0.max(c.isometry_2).max(c.orthogonal_ranges);
    out.push(check("Lemma 6.1", "branch isometries, orthogonal ranges", iso <= 1e-12, format!("residual {iso:.1e}")));
    out.push(check("Eq. 6-3", "branch completeness", c.completeness <= 1e-12, format!("residual {:.1e}", c.completeness)));

    let next = psi_apply(&km, p)?;
    let d = max_abs_diff(next.entries(), assemble_km_closed(p, m + 1)?.entries());
    out.push(check("Thm 6.3(1)", "fixed-point recursion", d <= 1e-12, format!("residual {d:.1e}")));

    let ratio = symmetric_norm(phi_apply_mat(km.entries(), p)?.as_ref())? / symmetric_norm(km.entries())?;
    out.push(check("Thm 6.3(3)", "contraction constant", (ratio - alpha).abs() <= 1e-10, format!("ratio {ratio:.12}, alpha {alpha}")));

    let d = max_abs_diff(neumann_partial_sum(p, m)?.entries(), km.entries());
    out.push(check("Cor 6.6", "Neumann partial sum", d <= 1e-12, format!("residual {d:.1e}")));

    let b = block_form_residual(p, m.max(2))?;
    out.push(check("Cor 6.4", "block form", b <= 1e-10, format!("residual {b:.1e}")));

    let limit = limit_spectral_data(p, args.big_m)?;
    let mut holds = true;
    let mut ratio = 0.0f64;
    for z in [6.0, 8.0] {
        let r = renormalization_residual_with(&limit, z)?;
        holds &= r.holds();
        ratio = ratio.max(r.residual / r.tolerance);
    }
    out.push(check("Thm 7.1", "renormalization identity", holds, format!("max residual/tolerance {ratio:.2e}")));

    let (ok, detail) = moment_check(&spec)?;
    out.push(check("Prop 7.2", "moment recursion", ok, detail));

    let (m1, _, _) = moments_closed(&p)?;
    let q = p * p + (1.0 - p) * (1.0 - p);
    let d = (m1 - 1.0 / (1.0 - q)).abs();
    out.push(check("Cor 7.3(1)", "first moment", d <= 1e-12, format!("difference {d:.1e}")));

    let half = BigRational::new(1.into(), 2.into());
    let seq = moments_recursive(&half, 3)?;
    let ok = seq.to_f64() == [1.0, 2.0, 4.0, 8.0];
    out.push(check("Cor 7.3(2)", "moments at p = 1/2", ok, format!("{:?}", seq.to_f64())));

    let solve = solve_top_eigenvalue_with(&limit, 1e-12)?;
    let (_, lower) = compression_2x2(p)?;
    let above = solve.lambda_star >= lower - solve.combined_tolerance;
    out.push(check("Cor 5.3", "two-by-two lower bound", above, format!("{:.10} >= {lower:.10}", solve.lambda_star)));

    let simple = simplicity_report(&limit);
    out.push(check(
        "Thm 7.6",
        "secular root and simplicity",
        solve.agrees() && simple.certified_simple,
        format!(
            "|scalar - direct| = {:.1e} <= {:.1e}, gap {:.4}",
            (solve.lambda_star - solve.direct_lambda).abs(),
            solve.combined_tolerance,
            simple.gap
        ),
    ));

    let sd2 = limit_spectral_data(0.5, 20)?;
    let s2 = solve_top_eigenvalue_with(&sd2, 1e-12)?;
    let d = (s2.lambda_star - 2.0).abs();
    out.push(check("Cor 3.6", "norm 2 at p = 1/2", d <= 1e-8, format!("error {d:.1e}")));

    Ok(out)
}

pub fn selfcheck(args: &SelfcheckArgs) -> Result<(), CliError> {
    let checks = run_checks(args)?;
    let width = checks.iter().map(|c| c.reference.len()).max().unwrap_or(0);
    for c in &checks {
        println!(
            "{:<width$}  {}  {}: {}",
            c.reference,
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            c.detail
        );
    }
    let failed: Vec<&str> = checks.iter().filter(|c| !c.pass).map(|c| c.reference).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError {
            code: EXIT_INVARIANT,
            message: format!("failed: {}", failed.join(", ")),
        })
    }
}

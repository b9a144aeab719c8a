//! Fast oracle-equivalence battery: quadrature vs closed forms, field
//! axioms, exhaustive MDS structure, bound dominance, and the selection
//! identities. Prints one PASS/FAIL line per invariant.

use mbm::analysis::{
    dmt_coded, dmt_uncoded, pep_exact, pep_hypergeometric, pep_quadrature, pep_upper_bound,
};
use mbm::gf::Field;
use mbm::mds::MdsCode;
use mbm::selection::{extra_mirrors, selection_gain_analytic};
use mbm::specfun::{chi2_cdf, chi2_pdf, integrate, q_function};

pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, result: Result<(), String>) -> Check {
    match result {
        Ok(()) => Check {
            name,
            passed: true,
            detail: String::new(),
        },
        Err(detail) => Check {
            name,
            passed: false,
            detail,
        },
    }
}

const GRID_C: [f64; 7] = [0.1, 0.5, 1.0, 5.0, 10.0, 100.0, 1000.0];
const GRID_N: [u32; 5] = [2, 4, 8, 16, 32];

fn pep_triple_equivalence() -> Result<(), String> {
    for &c in &GRID_C {
        for &n in &GRID_N {
            let exact = pep_exact(c, n).map_err(|e| e.to_string())?.value;
            let hyp = pep_hypergeometric(c, n).map_err(|e| e.to_string())?.value;
            let quad = pep_quadrature(2.0 * c, n).map_err(|e| e.to_string())?.value;
            if (exact - hyp).abs() > 1e-8 || (exact - quad).abs() > 1e-8 {
                return Err(format!(
                    "c={c} n={n}: exact={exact:e} hyp={hyp:e} quad={quad:e}"
                ));
            }
        }
    }
    Ok(())
}

fn bound_dominance() -> Result<(), String> {
    for &c in &GRID_C {
        if c < 0.5 {
            continue;
        }
        for &n in &GRID_N {
            let bound = pep_upper_bound(c, n).map_err(|e| e.to_string())?.value;
            let exact = pep_exact(c, n).map_err(|e| e.to_string())?.value;
            if bound < exact {
                return Err(format!("c={c} n={n}: bound {bound:e} < exact {exact:e}"));
            }
        }
    }
    Ok(())
}

fn q_function_symmetry() -> Result<(), String> {
    for i in 0..=160 {
        let x = -8.0 + 0.1 * i as f64;
        let s = q_function(x).map_err(|e| e.to_string())?
            + q_function(-x).map_err(|e| e.to_string())?;
        if (s - 1.0).abs() > 1e-12 {
            return Err(format!("x={x}: Q(x)+Q(-x) = {s}"));
        }
    }
    Ok(())
}

fn chi2_cdf_vs_quadrature() -> Result<(), String> {
    for &k in &[1u32, 2, 8, 32] {
        for &x in &[0.5, 4.0, 20.0] {
            let quad = integrate(&|t: f64| chi2_pdf(t, k).unwrap(), 0.0, x, 1e-12)
                .map_err(|e| e.to_string())?
                .value;
            let cdf = chi2_cdf(x, k).map_err(|e| e.to_string())?;
            if (quad - cdf).abs() > 1e-8 {
                return Err(format!("k={k} x={x}: quad {quad} vs cdf {cdf}"));
            }
        }
    }
    Ok(())
}

fn field_axioms() -> Result<(), String> {
    for (p, m) in [(2u32, 1u32), (5, 1), (2, 2), (3, 2), (2, 4)] {
        let f = Field::new(p, m).map_err(|e| e.to_string())?;
        let q = f.q();
        for a in 0..q {
            for b in 0..q {
                if f.add(a, b) != f.add(b, a) || f.mul(a, b) != f.mul(b, a) {
                    return Err(format!("GF({p}^{m}): commutativity fails at ({a},{b})"));
                }
                for c in 0..q {
                    if f.mul(a, f.add(b, c)) != f.add(f.mul(a, b), f.mul(a, c)) {
                        return Err(format!("GF({p}^{m}): distributivity fails"));
                    }
                    if f.mul(a, f.mul(b, c)) != f.mul(f.mul(a, b), c) {
                        return Err(format!("GF({p}^{m}): associativity fails"));
                    }
                }
            }
            if a != 0 && f.mul(a, f.inv(a).map_err(|e| e.to_string())?) != 1 {
                return Err(format!("GF({p}^{m}): inverse fails at {a}"));
            }
        }
    }
    Ok(())
}

fn mds_structure() -> Result<(), String> {
    let code = MdsCode::reed_solomon(Field::new(5, 1).map_err(|e| e.to_string())?, 4, 2)
        .map_err(|e| e.to_string())?;
    let d = code.min_distance_exhaustive().map_err(|e| e.to_string())?;
    if d != 3 {
        return Err(format!("RS(4,2)/GF(5) min distance {d}, want 3"));
    }
    for mask in 1u32..16 {
        let positions: Vec<usize> = (0..4).filter(|&i| mask >> i & 1 == 1).collect();
        let count = code
            .count_support_subset(&positions)
            .map_err(|e| e.to_string())?;
        let want_max = if positions.len() < 3 {
            0
        } else {
            5u64.pow((positions.len() - 3 + 1) as u32)
        };
        if count > want_max {
            return Err(format!("|Δ({positions:?})| = {count} > {want_max}"));
        }
    }
    Ok(())
}

fn selection_identities() -> Result<(), String> {
    for &e in &[0.1, 0.5, 1.0, 2.0] {
        let g = selection_gain_analytic(e, 2).map_err(|x| x.to_string())?;
        if (g - e.exp()).abs() > 1e-12 * e.exp() {
            return Err(format!("γ_c(E={e}, n=2) = {g}, want e^E"));
        }
    }
    let d = extra_mirrors(1.0, 2).map_err(|x| x.to_string())?;
    if (d - 1.0 / std::f64::consts::LN_2).abs() > 1e-12 {
        return Err(format!("δ(1, 2) = {d}"));
    }
    Ok(())
}

fn dmt_consistency() -> Result<(), String> {
    for r in [0.0, 1.0, 3.5] {
        let unc = dmt_uncoded(8, r).map_err(|e| e.to_string())?.d;
        let cod = dmt_coded(8, r, 1, 1.0).map_err(|e| e.to_string())?.d;
        if unc != cod {
            return Err(format!("r={r}: coded D=1 τ=1 gives {cod}, uncoded {unc}"));
        }
    }
    Ok(())
}

pub fn run_selfcheck() -> Vec<Check> {
    vec![
        check("pep-triple-equivalence-1e-8", pep_triple_equivalence()),
        check("pep-upper-bound-dominance", bound_dominance()),
        check("q-function-symmetry-1e-12", q_function_symmetry()),
        check("chi2-cdf-vs-quadrature-1e-8", chi2_cdf_vs_quadrature()),
        check("field-axioms-exhaustive", field_axioms()),
        check("mds-rs42-gf5-exhaustive", mds_structure()),
        check("selection-gain-identities", selection_identities()),
        check("dmt-coded-reduces-to-uncoded", dmt_consistency()),
    ]
}

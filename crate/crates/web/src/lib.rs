//! wasm-bindgen entry points for the static demo page in `www/`.
//!
//! Every function returns a JSON string; errors come back as
//! `{"error": "..."}` so the page can show them inline.

use lap_lchs::engine::{transform, GridPolicy, GridSpec, SolveOptions};
use lap_lchs::kernel::Kernel;
use lap_lchs::linalg::testmat::dissipative;
use lap_lchs::pairs::{pair_by_name, tail_truncation_time, PairKind};
use lap_lchs::Result;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

fn respond(r: Result<Value>) -> String {
    match r {
        Ok(v) => v.to_string(),
        Err(e) => json!({ "error": e.to_string() }).to_string(),
    }
}

fn samples(n: usize) -> Result<usize> {
    if (2..=4000).contains(&n) {
        Ok(n)
    } else {
        Err(lap_lchs::Error::Contract(format!("sample count must lie in 2..=4000, got {n}")))
    }
}

/// |f(k)| and the weight f(k)/(1−ik) on [−k_max, k_max], plus the K that
/// leaves a tail of `eps`.
#[wasm_bindgen]
pub fn kernel_profile(beta: f64, k_max: f64, n: usize, eps: f64) -> String {
    respond((|| {
        let n = samples(n)?;
        let kernel = Kernel::new(beta)?;
        let chosen = kernel.choose_k(eps)?;
        let pts: Vec<Value> = (0..n)
            .map(|i| {
                let k = -k_max + 2.0 * k_max * i as f64 / (n - 1) as f64;
                let w = kernel.weight(k);
                json!([k, kernel.abs_f(k), w.re, w.im])
            })
            .collect();
        Ok(json!({ "beta": beta, "chosen_k": chosen, "l1_norm": kernel.l1_norm, "points": pts }))
    })())
}

/// g(t) on (0, t_max] with its L1 norm and the tail bound at t_max.
#[wasm_bindgen]
pub fn pair_profile(name: &str, t_final: f64, eta: f64, p: f64, gamma: f64, t_max: f64, n: usize) -> String {
    respond((|| {
        let n = samples(n)?;
        let pair = pair_by_name(name, t_final, eta, p, gamma)?;
        let pts: Vec<Value> = (1..=n)
            .map(|i| {
                let t = t_max * i as f64 / n as f64;
                json!([t, pair.g(t)])
            })
            .collect();
        Ok(json!({
            "pair": pair.name(),
            "l1": pair.l1.value,
            "l1_exact": pair.l1.exact,
            "shift": pair.shift,
            "tail_at_t_max": pair.tail_bound(t_max),
            "points": pts,
        }))
    })())
}

/// Error against the eigen-oracle for a seeded dissipative matrix under
/// repeated doubling of (M_k, M_t), starting from a coarse grid.
#[wasm_bindgen]
pub fn convergence_demo(name: &str, dim: usize, seed: u32, gamma: f64, eps: f64, levels: usize) -> String {
    respond((|| {
        if !(1..=6).contains(&dim) || !(1..=6).contains(&levels) {
            return Err(lap_lchs::Error::Contract("dimension and levels must lie in 1..=6".into()));
        }
        let a = dissipative(dim, gamma, 1.0, 0.5, seed as u64)?;
        let pair = pair_by_name(name, 1.0, 1.0, 1.0, gamma)?;
        let kernel = Kernel::new(0.8)?;
        let k_max = kernel.choose_k(eps)?;
        let t_prime = tail_truncation_time(&pair, eps)?.max(1.0);
        let t_prime = match pair.kind {
            PairKind::Inhomogeneous { t_final } => t_final,
            _ => t_prime,
        };
        let mut rows = Vec::new();
        for level in 0..levels {
            let spec = GridSpec {
                k_max: Some(k_max),
                t_prime: Some(t_prime),
                m_k: Some(32 << level),
                m_t: Some(16 << level),
            };
            let opts = SolveOptions { policy: GridPolicy::Adaptive(spec), ..SolveOptions::default() };
            let r = transform(&a, None, &pair, eps, &opts)?;
            rows.push(json!({
                "m_k": r.grid.m_k,
                "m_t": r.grid.m_t,
                "error": r.error_vs_oracle,
                "bound": r.budget.total,
            }));
        }
        Ok(json!({ "pair": pair.name(), "k_max": k_max, "t_prime": t_prime, "rows": rows }))
    })())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Value {
        serde_json::from_str(s).unwrap()
    }

    #[test]
    fn kernel_profile_shape() {
        let v = parse(&kernel_profile(0.8, 10.0, 11, 1e-6));
        assert_eq!(v["points"].as_array().unwrap().len(), 11);
        assert!(v["chosen_k"].as_f64().unwrap() > 10.0);
    }

    #[test]
    fn errors_are_reported_as_json() {
        let v = parse(&pair_profile("nope", 1.0, 1.0, 1.0, 0.5, 5.0, 10));
        assert!(v["error"].as_str().unwrap().contains("unknown pair"));
        let v = parse(&kernel_profile(0.8, 10.0, 1, 1e-6));
        assert!(v.get("error").is_some());
    }

    #[test]
    fn convergence_demo_improves() {
        let v = parse(&convergence_demo("inverse-power", 2, 1, 0.5, 1e-4, 4));
        let errs: Vec<f64> = v["rows"].as_array().unwrap().iter().map(|r| r["error"].as_f64().unwrap()).collect();
        assert_eq!(errs.len(), 4);
        assert!(errs[3] < errs[0]);
    }
}

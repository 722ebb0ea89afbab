//! The corpus-wide invariant suite and the worked-example gallery.

use serde_json::{json, Value};

use rescurv::capacity::{full_table, recover_from_table};
use rescurv::corpus::{corpus, CorpusGraph};
use rescurv::decide::classify;
use rescurv::enumerate::Caps;
use rescurv::resistance::{
    curvature, curvature_via_k, effective_resistances, foster_check, kspace_membership, normalize_weights, Weights,
};
use rescurv::scalar::{json_vec, vec_approx_eq};
use rescurv::transforms::{cinv_involution, circle_invert, kron_preserves_resistance, kron_reduce};
use rescurv::{Error, Graph, Rational, Result, Scalar};

/// Unit weights are too symmetric to catch much, so the suite uses a
/// fixed pattern of small integers instead.
fn patterned(g: &Graph) -> Result<Weights<Rational>> {
    let values = (0..g.edge_count()).map(|e| Rational::from_i64(1 + (e % 3) as i64)).collect();
    Weights::new(g, values)
}

fn check_graph(cg: &CorpusGraph, caps: &Caps) -> Result<(Value, bool)> {
    let g = &cg.graph;
    let n = g.vertex_count();
    let c = normalize_weights(g, &patterned(g)?)?;
    let mut checks = serde_json::Map::new();
    let mut record = |name: &str, ok: Option<bool>| {
        checks.insert(name.to_string(), ok.map_or(json!("skipped"), Value::Bool));
        ok.unwrap_or(true)
    };
    let mut all = true;

    let foster = foster_check(g, &c)?;
    all &= record("foster", Some(foster.global && foster.per_component));

    let p = curvature(g, &c)?;
    all &= record("curvature_routes_agree", Some(curvature_via_k(g, &c)? == p));
    all &= record(
        "numeric_matches_exact",
        Some(vec_approx_eq(&curvature(g, &c.to_f64())?, &rescurv::scalar::to_f64_vec(&p), 1e-9)),
    );

    let k = effective_resistances(g, &c)?
        .inverse()
        .ok_or_else(|| Error::Consistency("resistance matrix is singular".into()))?;
    let kspace = kspace_membership(g, &k)?;
    all &= record(
        "inverse_resistance_round_trip",
        Some(kspace.member && kspace.reconstructed_weights.as_deref() == Some(c.values())),
    );

    let kron = (n >= 3).then(|| -> Result<bool> {
        for x in 0..n {
            let rec = kron_reduce(g, &c, &[x])?;
            if !rec.lemma_holds() || !kron_preserves_resistance(&rec)? {
                return Ok(false);
            }
        }
        Ok(true)
    });
    all &= record("kron_single_vertex", kron.transpose()?);

    let nonneg = p.iter().all(|v| *v >= Rational::from_i64(0));
    let cinv = nonneg.then(|| -> Result<bool> {
        for x in 0..n {
            let rec = circle_invert(g, &c, x);
            match rec {
                Ok(rec) if !rec.lemma_holds() => return Ok(false),
                Ok(_) => {}
                Err(Error::Disconnected(_)) => continue,
                Err(e) => return Err(e),
            }
            if !cinv_involution(g, &c, x)?.equivalent() {
                return Ok(false);
            }
        }
        Ok(true)
    });
    all &= record("circle_inversion", cinv.transpose()?);

    let capacity = (n <= caps.capacity_vertices).then(|| -> Result<bool> {
        let table = full_table(g, &c, caps)?;
        let (g2, c2) = recover_from_table(&table)?;
        Ok(&g2 == g && c2 == c)
    });
    all &= record("capacity_round_trip", capacity.transpose()?);

    let (verdict, _) = classify(g, caps)?;
    let row = json!({
        "name": cg.name,
        "class": verdict.class,
        "checks": Value::Object(checks),
        "passed": all,
    });
    Ok((row, all))
}

/// Run every check on the corpus (or on one graph); a failed check is an
/// internal consistency error, reported after the full table.
pub fn verify(graph: Option<Graph>, caps: &Caps) -> Result<Value> {
    let graphs = match graph {
        Some(graph) => vec![CorpusGraph { name: "input".into(), graph }],
        None => corpus(),
    };
    let mut rows = Vec::new();
    let mut failed = Vec::new();
    for cg in &graphs {
        let (row, ok) = check_graph(cg, caps)?;
        if !ok {
            failed.push(cg.name.clone());
        }
        rows.push(row);
    }
    let payload = json!({"graphs": rows, "all_passed": failed.is_empty()});
    if failed.is_empty() {
        Ok(payload)
    } else {
        crate::emit(&crate::pretty(&payload));
        Err(Error::Consistency(format!("invariant checks failed on {}", failed.join(", "))))
    }
}

pub const GALLERY: &[&str] = &[
    "cycle:3", "cycle:4", "cycle:5", "cycle:6", "cycle:7", "cycle:8", "kab:1,2", "kab:2,3", "kab:3,4", "petersen",
    "path:2", "path:3", "path:4", "path:5", "grid:2,3", "grid:2,4", "grid:3,3", "grid:3,4",
];

/// Class, optimal margin and unit-weight curvature of each example.
pub fn gallery(caps: &Caps) -> Result<Value> {
    let mut rows = Vec::new();
    for name in GALLERY {
        let g = rescurv::corpus::parse_keyword(name).expect("gallery keyword")?;
        let (verdict, _) = classify(&g, caps)?;
        let p = curvature(&g, &Weights::<Rational>::unit(&g))?;
        rows.push(json!({
            "graph": name,
            "vertices": g.vertex_count(),
            "edges": g.edge_count(),
            "class": verdict.class,
            "t_star": verdict.t_star.map(|t| t.to_string()),
            "unit_curvature": json_vec(&p),
        }));
    }
    Ok(json!({"examples": rows}))
}

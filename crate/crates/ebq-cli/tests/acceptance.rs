//! One line per acceptance criterion. Each gate check is judged against the tolerance pinned
//! here; a gate whose own tolerance is looser than the pinned one counts as a failure.
//! Exit status is nonzero only for failures outside the documented set in `KNOWN_FAILING`.

use ebq_core::report::CheckReport;
use ebq_core::suites::{self, RunConfig, Suite};
use ebq_core::{c, AlgebraParams};
use std::collections::BTreeMap;
use std::process::Command;

/// Gate checks that fail faithfully at the default parameters (see the decisions ledger).
const KNOWN_FAILING: &[&str] = &[
    "exchange.kplus_kplus.minus_minus",
    "exchange.kplus_kplus.minus_zero",
    "vector.k_e_exchange",
    "vector.k_f_exchange",
    "replr.full_match",
    "vector.h_plus_decomposition",
    "vertex.phi_psi",
    "vertex.psi_psi",
];

/// Exact checks report integer mismatch counts; anything below 0.5 means zero.
const EXACT: f64 = 0.5;

const SEED: u64 = 7;
const SAMPLES: usize = 5;

struct Criterion {
    id: u32,
    title: &'static str,
    suites: &'static [Suite],
    ranks: &'static [usize],
    /// `(check_id prefix, pinned tolerance)`; the longest matching prefix wins.
    pins: &'static [(&'static str, f64)],
}

const CRITERIA: &[Criterion] = &[
    Criterion {
        id: 1,
        title: "theta engine",
        suites: &[Suite::Special],
        ranks: &[2],
        pins: &[("special.", 1e-12)],
    },
    Criterion {
        id: 2,
        title: "mode algebra",
        suites: &[Suite::Modes],
        ranks: &[1, 2, 3],
        pins: &[
            ("modes.eps_eps.", 1e-10),
            ("modes.alpha_reconstruction", 1e-12),
            ("modes.alpha_eps_commutator", 1e-10),
            ("modes.eps_e_commutator", 1e-10),
            ("modes.eps_f_commutator", 1e-10),
            ("modes.gram_symmetry", 1e-12),
            ("modes.commutator_antisymmetry", 1e-12),
        ],
    },
    Criterion {
        id: 3,
        title: "exchange engine",
        suites: &[Suite::Exchange],
        ranks: &[1, 2, 3],
        pins: &[
            ("exchange.", 1e-8),
            ("exchange.inverse_ratio", 1e-10),
            ("exchange.p_independence", 1e-10),
        ],
    },
    Criterion {
        id: 4,
        title: "fermion contractions",
        suites: &[Suite::Modes],
        ranks: &[1, 2, 3],
        pins: &[("modes.fermion_", 1e-10)],
    },
    Criterion {
        id: 5,
        title: "R-matrix structure",
        suites: &[Suite::Face],
        ranks: &[1, 2, 3],
        pins: &[
            ("rmatrix.weight_conservation", EXACT),
            ("rmatrix.initial_condition", 1e-12),
            ("rmatrix.bbar_spread", 1e-14),
            ("rmatrix.g_inversion", 1e-10),
            ("rmatrix.d_vanish_at_zero", 1e-12),
        ],
    },
    Criterion {
        id: 6,
        title: "global identities",
        suites: &[Suite::Face, Suite::Dybe],
        ranks: &[1, 2],
        pins: &[
            ("dybe.", 1e-9),
            ("face.unitarity_offdiag", 1e-10),
            ("face.unitarity_diag", 1e-9),
            ("face.reflection", 1e-10),
            ("face.crossing_squared", 1e-9),
            ("face.inversion2", 1e-9),
            ("face.rho_inversion", 1e-10),
            ("face.rho_crossing", 1e-10),
        ],
    },
    Criterion {
        id: 7,
        title: "representation",
        suites: &[Suite::RepLR],
        ranks: &[1, 2, 3],
        pins: &[
            ("replr.", 1e-10),
            ("replr.net_shift", EXACT),
            ("replr.dbar_identity", 1e-12),
            ("replr.e0_identity", 1e-12),
            ("vector.", 1e-10),
            ("vector.k_", 1e-10),
        ],
    },
    Criterion {
        id: 8,
        title: "vertex operators (c = 1)",
        suites: &[Suite::Vertex],
        ranks: &[1, 2, 3],
        pins: &[
            ("vertex.", 1e-8),
            ("vertex.phi_phi_exponent", EXACT),
            ("vertex.phi_psi_exponent", EXACT),
            ("vertex.inverse_ratio", 1e-10),
            ("vertex.p_independence", 1e-10),
        ],
    },
];

fn pinned(pins: &[(&str, f64)], id: &str) -> Option<f64> {
    pins.iter().filter(|(p, _)| id.starts_with(p)).max_by_key(|(p, _)| p.len()).map(|&(_, t)| t)
}

fn params(n: usize) -> AlgebraParams {
    AlgebraParams::new(n, c(0.45, 0.05), c(4.3, 0.0), c(1.2, 0.0)).unwrap()
}

#[derive(Default)]
struct Tally {
    gates: usize,
    worst_pass: f64,
    /// check_id -> (ranks, worst residual, looser-than-pinned)
    failed: BTreeMap<String, (Vec<usize>, f64, bool)>,
}

impl Tally {
    fn add(&mut self, n: usize, r: &CheckReport, pin: f64) {
        self.gates += 1;
        let loose = r.tol > pin;
        if r.pass && !loose {
            self.worst_pass = self.worst_pass.max(r.max_rel_residual);
        } else {
            let e = self.failed.entry(r.check_id.clone()).or_insert((Vec::new(), 0.0, false));
            e.0.push(n);
            e.1 = e.1.max(r.max_rel_residual);
            e.2 |= loose;
        }
    }
}

fn ranks(ns: &[usize]) -> String {
    ns.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(",")
}

fn judge(cr: &Criterion) -> bool {
    let mut t = Tally::default();
    for &n in cr.ranks {
        let cfg = RunConfig::new(params(n), SEED, SAMPLES);
        let reps = suites::run(cr.suites, &cfg).expect("suite run");
        for r in reps.iter().filter(|r| r.gate) {
            if let Some(pin) = pinned(cr.pins, &r.check_id) {
                t.add(n, r, pin);
            }
        }
    }
    let ok = t.failed.is_empty() && t.gates > 0;
    let mut line = format!(
        "[{}] {}. {} (N={}): {} gate checks",
        if ok { "PASS" } else { "FAIL" },
        cr.id,
        cr.title,
        ranks(cr.ranks),
        t.gates
    );
    if !t.failed.is_empty() {
        let detail: Vec<String> = t
            .failed
            .iter()
            .map(|(id, (ns, res, loose))| {
                let why = if *loose { ", tolerance looser than pinned" } else { "" };
                format!("{id} at N={} (residual {res:.2e}{why})", ranks(ns))
            })
            .collect();
        line += &format!("; failing: {}", detail.join("; "));
    }
    line += &format!("; worst passing residual {:.2e}", t.worst_pass);
    println!("{line}");
    t.failed.keys().all(|id| KNOWN_FAILING.contains(&id.as_str())) && t.gates > 0
}

fn cli_criterion() -> bool {
    let bin = env!("CARGO_BIN_EXE_ebq");
    let run = |args: &[&str]| Command::new(bin).args(args).env_remove("EBQ_MAX_TERMS").output().unwrap();
    let all = run(&["verify", "--suite", "all", "--seed", "7", "--samples", "5"]);
    let again = run(&["verify", "--suite", "all", "--seed", "7", "--samples", "5"]);
    let deterministic = all.stdout == again.stdout;
    let doc: serde_json::Value = serde_json::from_slice(&all.stdout).unwrap();
    let failing: Vec<String> = doc["reports"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|r| r["gate"] == true && r["pass"] == false)
        .map(|r| r["check_id"].as_str().unwrap().to_string())
        .collect();
    let invalid = run(&["eval-rmatrix", "--q-re", "1.5", "--u", "0.1", "--s", "0.3", "0.9"]).status.code();
    let degenerate = run(&["verify", "--suite", "dybe", "--s", "0.3", "0.3"]).status.code();
    let nonconv = Command::new(bin)
        .args(["eval-rmatrix", "--N", "1", "--q-re", "0.95", "--q-im", "0", "--u", "0.3", "--s", "0.4"])
        .env("EBQ_MAX_TERMS", "8")
        .output()
        .unwrap()
        .status
        .code();
    let codes_ok = invalid == Some(2) && degenerate == Some(2) && nonconv == Some(3);
    let code = all.status.code();
    let ok = code == Some(0) && deterministic && codes_ok;
    println!(
        "[{}] 9. CLI: verify --suite all exit {:?} (0 required){}; invalid input exit {:?}/{:?}, non-convergence exit {:?}; \
         report bytes {}",
        if ok { "PASS" } else { "FAIL" },
        code,
        if failing.is_empty() { String::new() } else { format!(", failing gates: {}", failing.join(", ")) },
        invalid,
        degenerate,
        nonconv,
        if deterministic { "identical across runs" } else { "DIFFER across runs" }
    );
    let explained = code == Some(1) && failing.iter().all(|id| KNOWN_FAILING.contains(&id.as_str()));
    deterministic && codes_ok && (ok || explained)
}

fn main() {
    println!("acceptance: seed {SEED}, {SAMPLES} samples, q = 0.45+0.05i, r = 4.3, c = 1.2");
    let mut expected = true;
    for cr in CRITERIA {
        expected &= judge(cr);
    }
    expected &= cli_criterion();
    if !expected {
        println!("acceptance: failures outside the documented set");
        std::process::exit(1);
    }
}

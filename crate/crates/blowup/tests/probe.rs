// Temporary tuning probe; replaced by the acceptance suite.

use blowup::instance::{assemble_instance, gen_hamiltonian_path_pattern, gen_square_ham_cycle_pattern};
use blowup::params::ParameterCascade;
use blowup::rat::{rat, Rat};
use blowup::regularity::ClusterGraph;

fn cascade(delta: Rat, max_degree: usize, d1_den: i128, d2_frac: (i128, i128), eps_frac: (i128, i128)) -> ParameterCascade {
    let d1 = (delta / rat(4, 1)).min(rat(1, d1_den));
    let d2 = d1 * rat(d2_frac.0, d2_frac.1);
    ParameterCascade {
        eps: d2 * rat(eps_frac.0, eps_frac.1),
        eps1: d2 * rat(93, 100),
        eps2: d2 * rat(19, 20),
        d3: d2 * rat(97, 100),
        d2,
        d1,
        delta,
        max_degree,
        c: rat(1, 4),
        alpha: rat(1, 16),
        alpha_batch: rat(1, 20),
    }
}

#[test]
#[ignore]
fn probe_sqham_forensics() {
    std::env::set_var("BLOWUP_THR", "2");
    let k3 = ClusterGraph::complete(3);
    for seed in 0..20u64 {
        let params = cascade(rat(1, 2), 4, 8, (1, 4), (9, 10));
        let inst = assemble_instance(&k3, 150, rat(1, 2), gen_square_ham_cycle_pattern(150).unwrap(), params, vec![], seed).unwrap();
        let (report, res) = blowup::embed::run(&inst);
        let err = match res {
            Ok(_) => continue,
            Err(e) => e,
        };
        eprintln!("seed {seed} failure: {err}");
        eprintln!("  deferrals: {} pulls: {}", report.deferrals.len(), report.sweeps.iter().map(|s| s.exceptional.len()).sum::<usize>());
        for p2 in &report.phase2 {
            eprintln!(
                "  phase2 cluster {}: m={} matched={} hall5={} min|H|={} hall7={} minmem={}",
                p2.cluster, p2.m, p2.matching_size, p2.hall.cond5_ok, p2.hall.cond5_min_size, p2.hall.cond7_ok, p2.hall.cond7_min_membership
            );
        }
    }
    std::env::remove_var("BLOWUP_THR");
    // replay to the failure point and inspect the dying vertex
    let mut st = blowup::embed::preprocess(&inst).unwrap();
    for e in &report.sequence {
        st.embed(&inst, e.x, e.v);
    }
    if let blowup::Error::SelectionExhausted { vertex, .. } = err {
        eprintln!("vertex {vertex}: nu={} buffer={} pulled={}", st.nu[vertex], st.is_buffer[vertex], st.pulled[vertex]);
        eprintln!("pool (host set) size = {}", st.host_set(vertex).count());
        for y in inst.pattern.graph.neighbor_list(vertex) {
            if !st.is_embedded(y) {
                eprintln!("  unembedded neighbor {y}: |C|={} |Hs|={} nu={} buffer={}", st.candidate_set(y).count(), st.host_set(y).count(), st.nu[y], st.is_buffer[y]);
            }
        }
        let t = report.sequence.len();
        eprintln!("t = {t}, n = {}, sweeps so far: {}", inst.n(), report.sweeps.len());
        let unocc: usize = (0..inst.r()).map(|c| inst.host.cluster_range(c).filter(|&v| !st.occupied.contains(v)).count()).sum();
        eprintln!("unoccupied total: {unocc}");
        // how many unembedded vertices have tiny pools?
        let mut tiny = 0;
        for x in 0..inst.n() {
            if !st.is_embedded(x) && st.host_set(x).count() <= 3 {
                tiny += 1;
            }
        }
        eprintln!("unembedded with |Hs| <= 3: {tiny}");
    }
    panic!("probe only");
}

#[test]
#[ignore]
fn probe_success_rates() {
    let mut k2 = ClusterGraph::new(2);
    k2.add_edge(0, 1);
    let k3 = ClusterGraph::complete(3);

    for (d1_den, thr) in [(8i128, "f"), (8, "1"), (8, "2"), (8, "3"), (10, "2"), (12, "1"), (12, "2")] {
        if thr == "f" {
            std::env::remove_var("BLOWUP_THR");
        } else {
            std::env::set_var("BLOWUP_THR", thr);
        }
        let mut fails = String::new();
        let mut ok3 = 0;
        for seed in 0..20u64 {
            let params = cascade(rat(1, 2), 4, d1_den, (1, 4), (9, 10));
            let inst = assemble_instance(&k3, 150, rat(1, 2), gen_square_ham_cycle_pattern(150).unwrap(), params, vec![], seed).unwrap();
            match blowup::embed::run(&inst).1 {
                Ok(_) => ok3 += 1,
                Err(e) => {
                    let s = e.to_string();
                    fails.push_str(if s.contains("representatives") { "H" } else if s.contains("exhausted") { "S" } else { "?" });
                }
            }
        }
        eprintln!("[d1=1/{d1_den} thr={thr}] sqham {ok3}/20 fails={fails}");
    }
    std::env::remove_var("BLOWUP_THR");

    let mut ok = 0;
    for seed in 0..20u64 {
        let params = cascade(rat(1, 2), 2, 8, (1, 4), (9, 10));
        let inst = assemble_instance(&k2, 200, rat(1, 2), gen_hamiltonian_path_pattern(200), params, vec![], seed).unwrap();
        if blowup::embed::run(&inst).1.is_ok() {
            ok += 1;
        }
    }
    eprintln!("[default] hampath {ok}/20");
    panic!("probe only");
}

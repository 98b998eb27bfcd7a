use gasp_core::output::{render_model, RenderOptions};
use gasp_core::{compile, engine, parse_program, parse_query, CompileOptions, Program, RunOptions};
use std::time::Instant;

fn load(files: &[&str]) -> Program {
    let mut prog = Program::default();
    for f in files {
        let text = std::fs::read_to_string(f).unwrap();
        prog.extend(parse_program(&text).unwrap());
    }
    prog
}

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let which = args.get(1).map(|s| s.as_str()).unwrap_or("ham4");
    let dcc = args.iter().any(|a| a == "--dcc");
    let (prog, query) = match which {
        "ham4" => (load(&["programs/hamiltonian.pl", "programs/graph_4.pl"]), "?- reachable(a).".to_string()),
        "ham7" => (load(&["programs/hamiltonian.pl", "programs/graph_7.pl"]), "?- reachable(a).".to_string()),
        "queens" => {
            let n = args.get(2).cloned().unwrap_or("4".into());
            (load(&["programs/n_queens.pl"]), format!("?- nqueens({n}, Q)."))
        }
        "attack" => {
            let n = args.get(2).cloned().unwrap_or("4".into());
            (load(&["programs/n_queens_attack.pl"]), format!("?- nqueens({n}, Q)."))
        }
        other => panic!("unknown case {other}"),
    };
    let q = parse_query(&query).unwrap();
    let mut prog = prog;
    prog.queries.push(q.clone());
    let compiled = compile(&prog, &CompileOptions::default());
    let t0 = Instant::now();
    let result = engine::with_solver_stack(|| {
        engine::solve_all(&compiled, &q, &RunOptions { dcc, limit: 0 })
    });
    let (answers, stats) = result.unwrap();
    let opts = RenderOptions::default();
    for a in answers.iter().take(12) {
        println!("{}", render_model(a, &compiled.shows, &opts));
    }
    println!(
        "answers={} discarded={} dcc={} time={:?} lits={} nmr_lits={}",
        stats.models_returned, stats.nmr_discarded, stats.dcc_detections, t0.elapsed(),
        gasp_core::engine::LIT_CALLS.load(std::sync::atomic::Ordering::Relaxed),
        gasp_core::engine::IN_NMR.load(std::sync::atomic::Ordering::Relaxed),
    );
}

use chronocast_core::benchmark::{run_benchmark, render_table, BenchmarkConfig};
use chronocast_core::pipeline::prepare;
use chronocast_core::synth::{generate, SynthConfig};
use std::time::Instant;

fn main() {
    let frame = generate(&SynthConfig::default()).unwrap();
    let prepared = prepare(&frame).unwrap();
    let cfg = BenchmarkConfig::default();
    let t1 = Instant::now();
    let run = run_benchmark(&prepared, &cfg);
    eprintln!("benchmark: {:.1}s total", t1.elapsed().as_secs_f64());
    println!("{}", render_table(&run.report));
    for m in &run.report.models {
        if let Some(h) = &m.history {
            eprintln!("{}: {} epochs, best {} (val {:.6})", m.model, h.epochs_run(), h.best_epoch, h.best_val_loss());
            let traj: Vec<String> = h.val_loss.iter().enumerate().step_by(5)
                .map(|(i, v)| format!("{}:{:.5}", i+1, v)).collect();
            eprintln!("  val trajectory: {}", traj.join(" "));
        }
    }
}

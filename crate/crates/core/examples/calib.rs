use chronocast_core::synth::{generate, SynthConfig, autocorrelation};
use chronocast_core::frame::summarize;

fn main() {
    let frame = generate(&SynthConfig::default()).unwrap();
    let stats = summarize(&frame).unwrap();
    println!("consumption: mean={:.2} std={:.2} min={:.1} max={:.1}", stats.consumption.mean, stats.consumption.std, stats.consumption.min, stats.consumption.max);
    println!("temperature: mean={:.2} std={:.2} min={:.1} max={:.1}", stats.temperature.mean, stats.temperature.std, stats.temperature.min, stats.temperature.max);
    println!("humidity:    mean={:.2} std={:.2} min={:.1} max={:.1}", stats.humidity.mean, stats.humidity.std, stats.humidity.min, stats.humidity.max);
    println!("wind:        mean={:.2} std={:.2} min={:.1} max={:.1}", stats.wind_speed.mean, stats.wind_speed.std, stats.wind_speed.min, stats.wind_speed.max);
    let series = frame.dense_column("consumption").unwrap();
    println!("acf24={:.3} acf168={:.3}", autocorrelation(&series, 24), autocorrelation(&series, 168));
    let clipped = series.iter().filter(|&&v| v == 150.0 || v == 520.0).count();
    println!("clipped fraction: {:.4}", clipped as f64 / series.len() as f64);
}

// Scratch calibration runs against the checked-in Cora copy.
use std::fs::File;
use std::io::BufReader;
use std::time::Instant;

use gvnr::*;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let what = args.get(1).map(|s| s.as_str()).unwrap_or("all");

    let t0 = Instant::now();
    let content = BufReader::new(File::open("data/cora/cora.content").unwrap());
    let cites = BufReader::new(File::open("data/cora/cora.cites").unwrap());
    let (data, report) = load_cora_format(content, cites).unwrap();
    println!("load: {:?} report={:?}", t0.elapsed(), report);

    let mut walk_cfg = WalkConfig::default();
    if let Some(w) = args.get(3).and_then(|s| s.parse::<usize>().ok()) {
        walk_cfg.walks_per_node = w;
    }
    let t = Instant::now();
    let walks = generate_walks(&data, &walk_cfg).unwrap();
    println!("walks: {:?} count={}", t.elapsed(), walks.len());

    let t = Instant::now();
    let x = count_cooccurrences(&walks, data.len(), walk_cfg.window).unwrap();
    println!(
        "cooc: {:?} nnz(ordered)={} total={}",
        t.elapsed(),
        x.nnz(),
        x.total()
    );
    let freqs = visit_frequencies(&walks, data.len());
    let mut sorted = freqs.clone();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    let total: u64 = sorted.iter().sum();
    let top1pct: u64 = sorted.iter().take(data.len() / 100).sum();
    println!(
        "visit freq: top1% nodes take {:.1}% of visits (max={} median={})",
        100.0 * top1pct as f64 / total as f64,
        sorted[0],
        sorted[data.len() / 2]
    );

    if what == "gvnr" || what == "all" {
        for (dim, epochs) in [(100usize, 10usize), (100, 50)] {
            let cfg = GvnrConfig {
                dim,
                epochs,
                ..Default::default()
            };
            let t = Instant::now();
            let fit = train_gvnr(&x, &cfg).unwrap();
            let train_time = t.elapsed();
            let reps: Vec<Vec<f64>> = (0..data.len())
                .map(|i| fit.model.node_representation(i, RepresentationMode::Concat))
                .collect();
            let t = Instant::now();
            let rep = classification_protocol(&reps, &data.labels, &[0.5], 10, 42, 1.0).unwrap();
            println!(
                "gvnr d={dim} epochs={epochs}: train {:?}, eval {:?}, acc@50 = {:.3} ± {:.3}, loss {:.4} -> {:.4}",
                train_time,
                t.elapsed(),
                rep.settings[0].mean,
                rep.settings[0].stddev,
                fit.epoch_losses.first().unwrap(),
                fit.epoch_losses.last().unwrap()
            );
        }
    }

    if what == "unseen" {
        // args: unseen <epochs> <walks> <repeats> <k> <l2> <window> <dim>
        let epochs = args
            .get(2)
            .and_then(|s| s.parse::<usize>().ok())
            .unwrap_or(10);
        let repeats = args
            .get(4)
            .and_then(|s| s.parse::<usize>().ok())
            .unwrap_or(3);
        let k = args.get(5).and_then(|s| s.parse::<u32>().ok()).unwrap_or(1);
        let l2 = args.get(6).and_then(|s| s.parse::<f64>().ok()).unwrap_or(1.0);
        if let Some(w) = args.get(7).and_then(|s| s.parse::<usize>().ok()) {
            walk_cfg.window = w;
        }
        let dim = args.get(8).and_then(|s| s.parse::<usize>().ok()).unwrap_or(100);
        let lr = args.get(9).and_then(|s| s.parse::<f64>().ok()).unwrap_or(0.05);
        let cfg = GvnrConfig {
            dim,
            epochs,
            k,
            learning_rate: lr,
            ..Default::default()
        };
        let t = Instant::now();
        let rep = eval::unseen_document_protocol(
            &data,
            &walk_cfg,
            &cfg,
            &[0.3, 0.7],
            repeats,
            42,
            l2,
        )
        .unwrap();
        let curve: Vec<String> = rep
            .settings
            .iter()
            .map(|s| format!("{:.1}±{:.1}", s.mean * 100.0, s.stddev * 100.0))
            .collect();
        println!(
            "unseen epochs={epochs} walks={} repeats={repeats} k={k} l2={l2} win={} d={dim} lr={lr}: {:?} -> [{}]",
            walk_cfg.walks_per_node,
            walk_cfg.window,
            t.elapsed(),
            curve.join(", ")
        );
        return;
    }

    if what == "gvnrt" || what == "all" {
        let combos: Vec<(usize, usize, u32)> = match args.get(2).map(|s| s.as_str()) {
            Some("a") => vec![(100, 5, 1)],
            Some("b") => vec![(100, 10, 2)],
            Some("c") => vec![(80, 10, 1)],
            Some("d") => vec![(100, 10, 3)],
            _ => vec![(100, 10, 1)],
        };
        for (dim, epochs, k) in combos {
            let cfg = GvnrConfig {
                dim,
                epochs,
                k,
                ..Default::default()
            };
            let t = Instant::now();
            let fit = train_gvnr_t(&x, &data.bows, data.vocab_size, &cfg).unwrap();
            let train_time = t.elapsed();
            let full: Vec<Vec<f64>> = (0..data.len())
                .map(|i| {
                    fit.model
                        .text_representation(i, TextMode::Full, &data.bows)
                        .unwrap()
                })
                .collect();
            let t = Instant::now();
            let fracs = [0.1, 0.2, 0.3, 0.4, 0.5];
            let rep =
                classification_protocol(&full, &data.labels, &fracs, 10, 42, 1.0).unwrap();
            let text: Vec<Vec<f64>> = (0..data.len())
                .map(|i| {
                    fit.model
                        .text_representation(i, TextMode::TextOnly, &data.bows)
                        .unwrap()
                })
                .collect();
            let rep_t =
                classification_protocol(&text, &data.labels, &[0.1, 0.5], 10, 42, 1.0).unwrap();
            let curve: Vec<String> = rep
                .settings
                .iter()
                .map(|s| format!("{:.1}", s.mean * 100.0))
                .collect();
            println!(
                "gvnr-t d={dim} epochs={epochs} k={k}: train {:?}, eval {:?}, full=[{}] text@10={:.3} text@50={:.3}, loss {:.4} -> {:.4}",
                train_time,
                t.elapsed(),
                curve.join(", "),
                rep_t.settings[0].mean,
                rep_t.settings[1].mean,
                fit.epoch_losses.first().unwrap(),
                fit.epoch_losses.last().unwrap()
            );
        }
    }
}

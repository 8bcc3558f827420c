//! Generate one random network, report geometry and serving-cluster
//! statistics, and export the layout as CSV.

use fluidfield::experiments::realization_rng;
use fluidfield::network::{export_csv, generate_network, NetworkConfig};

fn main() -> fluidfield::Result<()> {
    let cfg = NetworkConfig::default();
    let mut rng = realization_rng(3, 0);
    let net = generate_network(&cfg, &mut rng)?;

    println!(
        "{} access points and {} users on a {} m x {} m area",
        cfg.aps, cfg.ues, cfg.area_side, cfg.area_side
    );
    println!("each user is served by its {} strongest access points", cfg.cluster_size);
    println!();

    for (k, cluster) in net.serving.iter().enumerate().take(4) {
        let gains: Vec<String> = cluster
            .iter()
            .map(|&l| format!("{:>5.1}", 10.0 * net.beta[(k, l)].log10()))
            .collect();
        println!(
            "user {k:>2} at ({:6.1}, {:6.1})  serving APs {:?}  gains [dB] {}",
            net.ue_xy[k][0],
            net.ue_xy[k][1],
            cluster,
            gains.join(" ")
        );
    }
    println!("...");

    // how many users each AP serves (load); most serve none under cluster_size=8
    let load: Vec<usize> = net.served.iter().map(Vec::len).collect();
    let busiest = load.iter().enumerate().max_by_key(|(_, &n)| n).unwrap();
    println!();
    println!(
        "busiest access point: {} with {} users; {} of {} APs serve no one",
        busiest.0,
        busiest.1,
        load.iter().filter(|&&n| n == 0).count(),
        cfg.aps
    );

    let dir = std::env::temp_dir().join("fluidfield_network");
    std::fs::create_dir_all(&dir)?;
    export_csv(&net, &dir)?;
    println!("layout written to {}", dir.display());
    Ok(())
}

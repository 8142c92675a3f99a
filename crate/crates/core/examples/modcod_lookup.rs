use mgw_precoding::metrics::ModcodTable;

fn main() {
    let table = ModcodTable::dvb_s2x();
    for sinr in [-3.0, -2.85, 0.0, 7.8, 12.5, 17.73, 25.0] {
        match table.lookup(sinr) {
            Some(row) => println!("{sinr:>6.2} dB -> {:<14} {:.3}", row.mode, row.efficiency_bps),
            None => println!("{sinr:>6.2} dB -> outage"),
        }
    }
    let dominated: Vec<&str> = table.dominated().iter().map(|r| r.mode.as_str()).collect();
    println!("never selected: {}", dominated.join(", "));
}

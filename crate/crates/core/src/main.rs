fn main() {
    if let Ok(t) = std::env::var("EISCOC_THREADS") {
        if let Ok(n) = t.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
    std::process::exit(eiscoc::cli::run(std::env::args_os()));
}

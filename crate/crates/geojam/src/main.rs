fn main() {
    std::process::exit(geojam::cli::run(std::env::args_os()));
}

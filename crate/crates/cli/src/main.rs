fn main() {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("INKMETRICS_LOG", "warn")).init();
    std::process::exit(inkmetrics_cli::run(std::env::args_os()));
}

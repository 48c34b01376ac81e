fn main() {
    env_logger::init();
    std::process::exit(cohere_opt::cli::main_with_args(std::env::args_os()));
}

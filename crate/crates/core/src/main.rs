fn main() {
    std::process::exit(rkhs_nbest::cli::run(std::env::args_os()));
}

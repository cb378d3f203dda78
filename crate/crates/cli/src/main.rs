fn main() {
    std::process::exit(bohmz::run(std::env::args_os()));
}

fn main() {
    std::process::exit(vbmi_base64::cli::run(std::env::args_os()));
}

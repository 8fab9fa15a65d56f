fn main() {
    eprintln!("workbench: command surface not wired up yet");
    std::process::exit(2);
}

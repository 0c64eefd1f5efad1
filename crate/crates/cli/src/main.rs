// SPDX-License-Identifier: Apache-2.0

fn main() {
    if let Err(e) = superwave_cli::init_thread_pool() {
        eprintln!("superwave: configuration error: {e}");
        std::process::exit(2);
    }
    std::process::exit(superwave_cli::run(std::env::args_os()));
}

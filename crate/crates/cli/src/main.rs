// SPDX-License-Identifier: Apache-2.0

use clap::Parser;

fn main() {
    let cli = match lichk_cli::Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { lichk_cli::exit::ERROR } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    std::process::exit(lichk_cli::main_with(cli));
}

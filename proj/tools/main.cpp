#include <iostream>
#include <string>
#include <vector>

#include "vim/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    vim::cli::RunManifest manifest;
    try {
        manifest = vim::cli::parse_args(args);
    } catch (const vim::cli::UsageError& e) {
        std::cerr << e.what() << "\n";
        return 1;
    }
    return vim::cli::run(manifest, std::cout, std::cerr);
}

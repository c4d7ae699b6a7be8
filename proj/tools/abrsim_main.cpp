#include "abrsim/cli_app.hpp"

int main(int argc, char** argv) {
    return abrsim::cli::run_cli(argc, argv);
}

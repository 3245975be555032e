#include "polyalign/cli.hpp"

int main(int argc, char** argv) {
    return polyalign::cli::run(argc, argv);
}

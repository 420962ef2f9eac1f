#include "app.hpp"

int main(int argc, char** argv) { return cendre::cli::run_cli(argc, argv); }

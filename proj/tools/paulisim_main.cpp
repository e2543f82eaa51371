#include "paulisim/cli_app.hpp"

int main(int argc, char** argv) { return paulisim::run_cli(argc, argv); }

#include "robustsum/cli.hpp"

int main(int argc, char** argv) { return robustsum::run(argc, argv); }

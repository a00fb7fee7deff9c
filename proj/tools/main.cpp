#include "tcond/cli.hpp"

int main(int argc, char** argv) { return tcond::run(argc, argv); }

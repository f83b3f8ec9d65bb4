#include "nakao/cli.hpp"

int main(int argc, char** argv) { return nakao::dispatch(argc, argv); }

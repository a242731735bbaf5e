#include "yolo_assist/cli.hpp"

int main(int argc, char** argv) { return yolo_assist::cli::run(argc, argv); }

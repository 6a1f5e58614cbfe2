#include "intorder/cli.hpp"

int main(int argc, char** argv)
{
    return intorder::cli::run(argc, argv);
}

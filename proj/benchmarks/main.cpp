#include <benchmark/benchmark.h>

// The distro's benchmark_main archive is LTO bytecode tied to another compiler
// patch level, so the entry point lives here.
BENCHMARK_MAIN();

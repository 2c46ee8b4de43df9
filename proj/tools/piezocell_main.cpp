#include <cstdio>
#include <cstdlib>
#include <string>

#include <CLI11.hpp>

#include "piezocell/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{
        "piezocell - periodic piezoelectric homogenization toolkit.\n"
        "Modes: homogenize (effective tensors from a unit cell), macro\n"
        "(homogenized boundary-value problem), dns (full fine-scale solve),\n"
        "sweep (corrector convergence study), validate (invariant suite)."};

    std::string mode;
    std::string config;
    std::string out = ".";
    int threads = 0;

    app.add_option("mode", mode, "homogenize | macro | dns | sweep | validate")
        ->required()
        ->check(CLI::IsMember(
            {"homogenize", "macro", "dns", "sweep", "validate"}));
    app.add_option("--config", config, "run configuration file (JSON)")
        ->required();
    app.add_option("--out", out, "output directory (default: .)");
    app.add_option("--threads", threads,
                   "worker threads (0 = automatic; PIEZOCELL_THREADS is the "
                   "fallback)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e); // prints help, exit 0
    } catch (const CLI::ParseError& e) {
        app.exit(e); // prints the parser message
        return piezocell::kExitConfigError;
    }

    if (threads == 0) {
        if (const char* env = std::getenv("PIEZOCELL_THREADS")) {
            char* end = nullptr;
            long v = std::strtol(env, &end, 10);
            if (end == env || *end != '\0' || v < 0) {
                std::fprintf(stderr,
                             "config error: PIEZOCELL_THREADS must be a "
                             "non-negative integer\n");
                return piezocell::kExitConfigError;
            }
            threads = static_cast<int>(v);
        }
    }

    return piezocell::run_mode(mode, config, out, threads);
}
